//! Exact algebra over weighted sums of Pauli strings.
//!
//! Qubit `0` is the least-significant bit of a basis index and is printed
//! rightmost, so `"XIY"` means `X` on qubit 2 and `Y` on qubit 0.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{is_power_of_two, CMatrix};

/// Coefficients below this magnitude are dropped on canonicalisation.
pub const PRUNE_TOL: f64 = 1e-12;

/// Largest register [`PauliSum::to_dense`] will expand.
pub const DENSE_QUBIT_LIMIT: usize = 14;

/// Largest register [`pauli_project`] will decompose.
pub const PROJECT_QUBIT_LIMIT: usize = 8;

const I_UNIT: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(ch: char) -> Option<Pauli> {
        match ch {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Whether the letter flips the computational-basis bit.
    pub fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// Whether the letter contributes a `(-1)^bit` sign.
    pub fn has_z(self) -> bool {
        matches!(self, Pauli::Y | Pauli::Z)
    }

    /// Single-qubit product `self · other = phase · result`.
    pub fn mul(self, other: Pauli) -> (C64, Pauli) {
        use Pauli::*;
        let one = C64::new(1.0, 0.0);
        match (self, other) {
            (I, p) | (p, I) => (one, p),
            (X, X) | (Y, Y) | (Z, Z) => (one, I),
            (X, Y) => (I_UNIT, Z),
            (Y, X) => (-I_UNIT, Z),
            (Y, Z) => (I_UNIT, X),
            (Z, Y) => (-I_UNIT, X),
            (Z, X) => (I_UNIT, Y),
            (X, Z) => (-I_UNIT, Y),
        }
    }
}

/// Bit masks of a Pauli string on at most 63 qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PauliMasks {
    pub x: usize,
    pub z: usize,
    pub n_y: u32,
}

impl PauliMasks {
    /// `P|b> = phase · |b ^ x>`.
    #[inline]
    pub fn act(&self, b: usize) -> (C64, usize) {
        (self.phase(b), b ^ self.x)
    }

    #[inline]
    pub fn phase(&self, b: usize) -> C64 {
        let sign = if (b & self.z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        match self.n_y % 4 {
            0 => C64::new(sign, 0.0),
            1 => C64::new(0.0, sign),
            2 => C64::new(-sign, 0.0),
            _ => C64::new(0.0, -sign),
        }
    }
}

/// A tensor product of single-qubit Paulis, stored sparsely (identity letters omitted).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    ops: Vec<(usize, Pauli)>,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        PauliString { n_qubits, ops: Vec::new() }
    }

    pub fn single(n_qubits: usize, qubit: usize, p: Pauli) -> Self {
        Self::from_ops(n_qubits, [(qubit, p)])
    }

    /// Builds a string from `(qubit, letter)` pairs. Panics on out-of-range or repeated qubits.
    pub fn from_ops(n_qubits: usize, ops: impl IntoIterator<Item = (usize, Pauli)>) -> Self {
        let mut ops: Vec<(usize, Pauli)> = ops.into_iter().filter(|&(_, p)| p != Pauli::I).collect();
        ops.sort_by_key(|&(q, _)| q);
        for w in ops.windows(2) {
            assert!(w[0].0 != w[1].0, "qubit {} repeated in Pauli string", w[0].0);
        }
        if let Some(&(q, _)) = ops.last() {
            assert!(q < n_qubits, "qubit {q} out of range for {n_qubits} qubits");
        }
        PauliString { n_qubits, ops }
    }

    /// Parses letters with qubit 0 rightmost.
    pub fn from_letters(letters: &str) -> Result<Self> {
        let chars: Vec<char> = letters.chars().collect();
        let n = chars.len();
        let mut ops = Vec::new();
        for (pos, ch) in chars.iter().enumerate() {
            let p = Pauli::from_char(*ch)
                .ok_or_else(|| Error::Parse(format!("bad Pauli letter {ch:?} in {letters:?}")))?;
            ops.push((n - 1 - pos, p));
        }
        Ok(Self::from_ops(n, ops))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Non-identity `(qubit, letter)` pairs in ascending qubit order.
    pub fn ops(&self) -> &[(usize, Pauli)] {
        &self.ops
    }

    pub fn locality(&self) -> usize {
        self.ops.len()
    }

    pub fn is_identity(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        match self.ops.binary_search_by_key(&qubit, |&(q, _)| q) {
            Ok(i) => self.ops[i].1,
            Err(_) => Pauli::I,
        }
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.ops.iter().map(|&(q, _)| q)
    }

    pub fn letters(&self) -> String {
        (0..self.n_qubits).rev().map(|q| self.get(q).to_char()).collect()
    }

    /// Masks for index arithmetic; `None` when the register is too wide for a `usize`.
    pub fn masks(&self) -> Option<PauliMasks> {
        if self.n_qubits >= usize::BITS as usize {
            return None;
        }
        let mut m = PauliMasks { x: 0, z: 0, n_y: 0 };
        for &(q, p) in &self.ops {
            if p.flips() {
                m.x |= 1 << q;
            }
            if p.has_z() {
                m.z |= 1 << q;
            }
            if p == Pauli::Y {
                m.n_y += 1;
            }
        }
        Some(m)
    }

    /// Applies the string to a basis state held as little-endian 64-bit words, in place.
    /// Returns the phase picked up.
    pub fn act_on_bits(&self, bits: &mut [u64]) -> C64 {
        let mut phase = C64::new(1.0, 0.0);
        for &(q, p) in &self.ops {
            let (w, b) = (q / 64, q % 64);
            let set = (bits[w] >> b) & 1 == 1;
            match p {
                Pauli::I => {}
                Pauli::X => bits[w] ^= 1 << b,
                Pauli::Y => {
                    phase *= if set { -I_UNIT } else { I_UNIT };
                    bits[w] ^= 1 << b;
                }
                Pauli::Z => {
                    if set {
                        phase = -phase;
                    }
                }
            }
        }
        phase
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let mut anti = 0;
        let (mut i, mut j) = (0, 0);
        while i < self.ops.len() && j < other.ops.len() {
            let (qa, pa) = self.ops[i];
            let (qb, pb) = other.ops[j];
            match qa.cmp(&qb) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    if pa != pb {
                        anti += 1;
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        anti % 2 == 0
    }

    /// `self ⊗ low`: `low` occupies the low-order qubits.
    pub fn tensor(&self, low: &PauliString) -> PauliString {
        let shift = low.n_qubits;
        let mut ops = low.ops.clone();
        ops.extend(self.ops.iter().map(|&(q, p)| (q + shift, p)));
        PauliString { n_qubits: self.n_qubits + low.n_qubits, ops }
    }

    /// Places the string at `offset` inside a register of `total` qubits.
    pub fn place(&self, offset: usize, total: usize) -> PauliString {
        assert!(offset + self.n_qubits <= total, "placement overflows register");
        PauliString {
            n_qubits: total,
            ops: self.ops.iter().map(|&(q, p)| (q + offset, p)).collect(),
        }
    }

    /// Restricts the string to qubits `[offset, offset + width)` and relabels them from zero.
    pub fn slice(&self, offset: usize, width: usize) -> PauliString {
        PauliString {
            n_qubits: width,
            ops: self
                .ops
                .iter()
                .filter(|&&(q, _)| q >= offset && q < offset + width)
                .map(|&(q, p)| (q - offset, p))
                .collect(),
        }
    }

    pub fn with_qubit(&self, qubit: usize, p: Pauli) -> PauliString {
        let mut ops: Vec<(usize, Pauli)> = self.ops.iter().cloned().filter(|&(q, _)| q != qubit).collect();
        ops.push((qubit, p));
        Self::from_ops(self.n_qubits, ops)
    }

    /// Relabels qubits through `map` into a register of `total` qubits.
    pub fn remap(&self, total: usize, map: impl Fn(usize) -> usize) -> PauliString {
        Self::from_ops(total, self.ops.iter().map(|&(q, p)| (map(q), p)))
    }
}

impl Ord for PauliString {
    /// Lexicographic on the printed letters (highest qubit first).
    fn cmp(&self, other: &Self) -> Ordering {
        let by_width = self.n_qubits.cmp(&other.n_qubits);
        if by_width != Ordering::Equal {
            return by_width;
        }
        let (mut i, mut j) = (self.ops.len(), other.ops.len());
        loop {
            match (i, j) {
                (0, 0) => return Ordering::Equal,
                (0, _) => return Ordering::Less,
                (_, 0) => return Ordering::Greater,
                _ => {}
            }
            let (qa, pa) = self.ops[i - 1];
            let (qb, pb) = other.ops[j - 1];
            match qa.cmp(&qb) {
                // `other` has identity at qa.
                Ordering::Greater => return Ordering::Greater,
                Ordering::Less => return Ordering::Less,
                Ordering::Equal => {
                    let c = pa.cmp(&pb);
                    if c != Ordering::Equal {
                        return c;
                    }
                    i -= 1;
                    j -= 1;
                }
            }
        }
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.letters())
    }
}

/// Product of two strings: `a · b = phase · result`, phase in {±1, ±i}.
pub fn multiply(a: &PauliString, b: &PauliString) -> Result<(C64, PauliString)> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::QubitMismatch { left: a.n_qubits, right: b.n_qubits });
    }
    let mut phase = C64::new(1.0, 0.0);
    let mut ops = Vec::with_capacity(a.ops.len() + b.ops.len());
    let (mut i, mut j) = (0, 0);
    while i < a.ops.len() || j < b.ops.len() {
        let qa = a.ops.get(i).map(|o| o.0).unwrap_or(usize::MAX);
        let qb = b.ops.get(j).map(|o| o.0).unwrap_or(usize::MAX);
        match qa.cmp(&qb) {
            Ordering::Less => {
                ops.push(a.ops[i]);
                i += 1;
            }
            Ordering::Greater => {
                ops.push(b.ops[j]);
                j += 1;
            }
            Ordering::Equal => {
                let (ph, p) = a.ops[i].1.mul(b.ops[j].1);
                phase *= ph;
                if p != Pauli::I {
                    ops.push((qa, p));
                }
                i += 1;
                j += 1;
            }
        }
    }
    Ok((phase, PauliString { n_qubits: a.n_qubits, ops }))
}

/// A weighted sum of Pauli strings in canonical form: sorted, deduplicated and pruned.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<(C64, PauliString)>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        PauliSum { n_qubits, terms: Vec::new() }
    }

    pub fn identity(n_qubits: usize, coeff: f64) -> Self {
        Self::from_terms(n_qubits, [(C64::new(coeff, 0.0), PauliString::identity(n_qubits))])
    }

    pub fn single(coeff: f64, s: PauliString) -> Self {
        let n = s.n_qubits();
        Self::from_terms(n, [(C64::new(coeff, 0.0), s)])
    }

    /// Canonicalises an arbitrary list of terms. Panics if a string has the wrong width.
    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = (C64, PauliString)>) -> Self {
        let mut acc: BTreeMap<PauliString, C64> = BTreeMap::new();
        for (c, s) in terms {
            assert_eq!(s.n_qubits, n_qubits, "term width mismatch");
            *acc.entry(s).or_insert(C64::new(0.0, 0.0)) += c;
        }
        Self::from_map(n_qubits, acc)
    }

    fn from_map(n_qubits: usize, acc: BTreeMap<PauliString, C64>) -> Self {
        let terms = acc
            .into_iter()
            .filter(|(_, c)| c.norm() >= PRUNE_TOL)
            .map(|(s, c)| (c, s))
            .collect();
        PauliSum { n_qubits, terms }
    }

    /// Parses `(coefficient, letters)` pairs.
    pub fn from_letters(terms: &[(f64, &str)]) -> Result<Self> {
        let parsed: Result<Vec<(C64, PauliString)>> = terms
            .iter()
            .map(|&(c, l)| PauliString::from_letters(l).map(|s| (C64::new(c, 0.0), s)))
            .collect();
        let parsed = parsed?;
        let n = parsed.first().map(|t| t.1.n_qubits()).unwrap_or(0);
        if let Some(bad) = parsed.iter().find(|t| t.1.n_qubits() != n) {
            return Err(Error::QubitMismatch { left: n, right: bad.1.n_qubits() });
        }
        Ok(Self::from_terms(n, parsed))
    }

    /// Projector `(I + Z_q)/2` (`bit = 0`) or `(I - Z_q)/2` (`bit = 1`) onto a qubit value.
    pub fn bit_projector(n_qubits: usize, qubit: usize, bit: u8) -> Self {
        let sign = if bit == 0 { 0.5 } else { -0.5 };
        Self::from_terms(
            n_qubits,
            [
                (C64::new(0.5, 0.0), PauliString::identity(n_qubits)),
                (C64::new(sign, 0.0), PauliString::single(n_qubits, qubit, Pauli::Z)),
            ],
        )
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(C64, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, s: &PauliString) -> C64 {
        self.terms
            .binary_search_by(|(_, t)| t.cmp(s))
            .map(|i| self.terms[i].0)
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn max_locality(&self) -> usize {
        self.terms.iter().map(|(_, s)| s.locality()).max().unwrap_or(0)
    }

    pub fn norm1(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.norm()).sum()
    }

    /// Maximum over qubits of the summed coefficient magnitudes of terms touching that qubit.
    pub fn induced1(&self) -> f64 {
        let mut per_site = vec![0.0; self.n_qubits];
        for (c, s) in &self.terms {
            for q in s.support() {
                per_site[q] += c.norm();
            }
        }
        per_site.into_iter().fold(0.0, f64::max)
    }

    /// All coefficients real to within `tol` (equivalent to Hermiticity).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.iter().all(|(c, _)| c.im.abs() <= tol)
    }

    pub fn scale(&self, k: C64) -> Self {
        Self::from_terms(self.n_qubits, self.terms.iter().map(|(c, s)| (c * k, s.clone())))
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(C64::new(k, 0.0))
    }

    pub fn dagger(&self) -> Self {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(c, s)| (c.conj(), s.clone())).collect(),
        }
    }

    /// Real part of each coefficient (the Hermitian part of the operator).
    pub fn real_part(&self) -> Self {
        Self::from_terms(self.n_qubits, self.terms.iter().map(|(c, s)| (C64::new(c.re, 0.0), s.clone())))
    }

    pub fn identity_coefficient(&self) -> C64 {
        self.coefficient(&PauliString::identity(self.n_qubits))
    }

    pub fn without_identity(&self) -> Self {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().filter(|(_, s)| !s.is_identity()).cloned().collect(),
        }
    }

    pub fn try_add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_width(other)?;
        Ok(Self::from_terms(self.n_qubits, self.terms.iter().chain(other.terms.iter()).cloned()))
    }

    pub fn try_mul(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_width(other)?;
        let mut acc: BTreeMap<PauliString, C64> = BTreeMap::new();
        for (ca, sa) in &self.terms {
            for (cb, sb) in &other.terms {
                let (ph, s) = multiply(sa, sb)?;
                *acc.entry(s).or_insert(C64::new(0.0, 0.0)) += ca * cb * ph;
            }
        }
        Ok(Self::from_map(self.n_qubits, acc))
    }

    pub fn powi(&self, k: u32) -> PauliSum {
        let mut out = PauliSum::identity(self.n_qubits, 1.0);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    fn check_width(&self, other: &PauliSum) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch { left: self.n_qubits, right: other.n_qubits });
        }
        Ok(())
    }

    /// `self ⊗ low`; `low` occupies the low-order qubits.
    pub fn tensor(&self, low: &PauliSum) -> PauliSum {
        let mut terms = Vec::with_capacity(self.len() * low.len());
        for (ca, sa) in &self.terms {
            for (cb, sb) in &low.terms {
                terms.push((ca * cb, sa.tensor(sb)));
            }
        }
        Self::from_terms(self.n_qubits + low.n_qubits, terms)
    }

    /// Places the sum at `offset` inside a register of `total` qubits.
    pub fn place(&self, offset: usize, total: usize) -> PauliSum {
        PauliSum {
            n_qubits: total,
            terms: self.terms.iter().map(|(c, s)| (*c, s.place(offset, total))).collect(),
        }
        .recanonicalised()
    }

    fn recanonicalised(self) -> PauliSum {
        Self::from_terms(self.n_qubits, self.terms)
    }

    /// Whether every pair of terms commutes.
    pub fn is_commuting(&self) -> bool {
        for (i, (_, a)) in self.terms.iter().enumerate() {
            for (_, b) in &self.terms[i + 1..] {
                if !a.commutes_with(b) {
                    return false;
                }
            }
        }
        true
    }

    /// Exact dense matrix, guarded to [`DENSE_QUBIT_LIMIT`] qubits.
    pub fn to_dense(&self) -> Result<CMatrix> {
        if self.n_qubits > DENSE_QUBIT_LIMIT {
            return Err(Error::DimensionGuard {
                what: format!("to_dense on {} qubits", self.n_qubits),
                limit: DENSE_QUBIT_LIMIT,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        for (c, s) in &self.terms {
            let masks = s.masks().expect("width checked above");
            for col in 0..dim {
                let (ph, row) = masks.act(col);
                m[(row, col)] += c * ph;
            }
        }
        Ok(m)
    }

    /// Textual dump: one `<re> <im> <letters>` line per term.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (c, s) in &self.terms {
            out.push_str(&format!("{} {} {}\n", c.re, c.im, s.letters()));
        }
        out
    }

    /// Parses the textual dump. Blank lines and `#` comments are skipped.
    pub fn parse_dump(text: &str, n_qubits: usize) -> Result<PauliSum> {
        let mut terms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!("line {}: expected 3 fields", lineno + 1)));
            }
            let re: f64 = fields[0].parse().map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let im: f64 = fields[1].parse().map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let s = PauliString::from_letters(fields[2])?;
            if s.n_qubits() != n_qubits {
                return Err(Error::QubitMismatch { left: n_qubits, right: s.n_qubits() });
            }
            terms.push((C64::new(re, im), s));
        }
        Ok(PauliSum::from_terms(n_qubits, terms))
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

impl FromStr for PauliSum {
    type Err = Error;

    /// Infers the width from the first term; an empty dump parses as a 0-qubit zero.
    fn from_str(s: &str) -> Result<Self> {
        let width = s
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .and_then(|l| l.split_whitespace().nth(2))
            .map(|w| w.chars().count())
            .unwrap_or(0);
        PauliSum::parse_dump(s, width)
    }
}

impl Add for &PauliSum {
    type Output = PauliSum;
    fn add(self, rhs: &PauliSum) -> PauliSum {
        self.try_add(rhs).expect("qubit count mismatch in PauliSum addition")
    }
}

impl Sub for &PauliSum {
    type Output = PauliSum;
    fn sub(self, rhs: &PauliSum) -> PauliSum {
        self + &(-rhs)
    }
}

impl Neg for &PauliSum {
    type Output = PauliSum;
    fn neg(self) -> PauliSum {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(c, s)| (-c, s.clone())).collect(),
        }
    }
}

impl Mul for &PauliSum {
    type Output = PauliSum;
    fn mul(self, rhs: &PauliSum) -> PauliSum {
        self.try_mul(rhs).expect("qubit count mismatch in PauliSum product")
    }
}

impl Mul<f64> for &PauliSum {
    type Output = PauliSum;
    fn mul(self, k: f64) -> PauliSum {
        self.scale_real(k)
    }
}

/// Decomposes a dense `2^n × 2^n` matrix into Pauli strings: `c_P = Tr(P·M) / 2^n`.
pub fn pauli_project(m: &CMatrix) -> Result<PauliSum> {
    if !m.is_square() {
        return Err(Error::invalid(format!("pauli_project needs a square matrix, got {:?}", m.shape())));
    }
    let dim = m.nrows();
    if !is_power_of_two(dim) {
        return Err(Error::NotPowerOfTwo(dim));
    }
    let n = dim.trailing_zeros() as usize;
    if n > PROJECT_QUBIT_LIMIT {
        return Err(Error::DimensionGuard { what: format!("pauli_project on {n} qubits"), limit: PROJECT_QUBIT_LIMIT });
    }
    let scale = 1.0 / dim as f64;
    let mut terms = Vec::new();
    for x in 0..dim {
        for z in 0..dim {
            let ops = (0..n).map(|q| {
                let p = match ((x >> q) & 1, (z >> q) & 1) {
                    (0, 0) => Pauli::I,
                    (1, 0) => Pauli::X,
                    (1, 1) => Pauli::Y,
                    _ => Pauli::Z,
                };
                (q, p)
            });
            let s = PauliString::from_ops(n, ops);
            let masks = s.masks().expect("n <= 8");
            // Tr(P M) = sum_b <b^x|P|b> M[b, b^x]
            let mut tr = C64::new(0.0, 0.0);
            for b in 0..dim {
                tr += masks.phase(b) * m[(b, b ^ x)];
            }
            let coeff = tr * scale;
            if coeff.norm() >= PRUNE_TOL {
                terms.push((coeff, s));
            }
        }
    }
    Ok(PauliSum::from_terms(n, terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs_diff, spectral_norm};
    use proptest::prelude::*;

    fn ps(l: &str) -> PauliString {
        PauliString::from_letters(l).unwrap()
    }

    #[test]
    fn single_qubit_products() {
        let (ph, r) = multiply(&ps("X"), &ps("Y")).unwrap();
        assert_eq!((ph, r), (c(0.0, 1.0), ps("Z")));
        let (ph, r) = multiply(&ps("ZI"), &ps("ZI")).unwrap();
        assert_eq!((ph, r), (c(1.0, 0.0), ps("II")));
    }

    #[test]
    fn two_qubit_product_matches_dense() {
        // (X⊗Y)(Y⊗Y) = i Z⊗I
        let (ph, r) = multiply(&ps("XY"), &ps("YY")).unwrap();
        assert_eq!(ph, c(0.0, 1.0));
        assert_eq!(r, ps("ZI"));
        let a = PauliSum::single(1.0, ps("XY")).to_dense().unwrap();
        let b = PauliSum::single(1.0, ps("YY")).to_dense().unwrap();
        let expect = PauliSum::single(1.0, ps("ZI")).to_dense().unwrap() * c(0.0, 1.0);
        assert!(max_abs_diff(&(a * b), &expect) < 1e-15);
    }

    #[test]
    fn mismatched_widths_rejected() {
        assert!(matches!(multiply(&ps("X"), &ps("XX")), Err(Error::QubitMismatch { .. })));
    }

    #[test]
    fn norms() {
        let h = PauliSum::from_letters(&[(0.5, "IZ"), (0.5, "ZI")]).unwrap();
        assert_eq!(h.norm1(), 1.0);
        assert_eq!(h.induced1(), 0.5);
        let empty = PauliSum::zero(3);
        assert_eq!(empty.norm1(), 0.0);
        assert_eq!(empty.induced1(), 0.0);
    }

    #[test]
    fn dense_examples() {
        let z = PauliSum::from_letters(&[(1.0, "Z")]).unwrap().to_dense().unwrap();
        assert_eq!(z[(0, 0)], c(1.0, 0.0));
        assert_eq!(z[(1, 1)], c(-1.0, 0.0));

        let xy = PauliSum::from_letters(&[(0.5, "XX"), (0.5, "YY")]).unwrap().to_dense().unwrap();
        // |01> = index 1, |10> = index 2
        assert!((xy[(1, 2)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((xy[(2, 1)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(xy[(0, 3)].norm() < 1e-15);
        assert!(xy[(0, 0)].norm() < 1e-15);

        let zero = PauliSum::zero(2).to_dense().unwrap();
        assert_eq!(zero.shape(), (4, 4));
        assert_eq!(crate::linalg::max_abs(&zero), 0.0);
    }

    #[test]
    fn dense_guard() {
        let big = PauliSum::identity(DENSE_QUBIT_LIMIT + 1, 1.0);
        assert!(matches!(big.to_dense(), Err(Error::DimensionGuard { .. })));
    }

    #[test]
    fn project_single_qubit_projector() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let p = pauli_project(&m).unwrap();
        let expect = PauliSum::from_letters(&[(0.5, "I"), (-0.5, "Z")]).unwrap();
        assert_eq!(p, expect);
    }

    #[test]
    fn project_uniform_hopping_round_trip() {
        let mut m = CMatrix::zeros(4, 4);
        for j in 0..3 {
            m[(j, j + 1)] = c(1.0, 0.0);
            m[(j + 1, j)] = c(1.0, 0.0);
        }
        let p = pauli_project(&m).unwrap();
        assert!(max_abs_diff(&p.to_dense().unwrap(), &m) < 1e-12);
    }

    #[test]
    fn project_frequency_diagonal() {
        let d = [0.0, 1.0, -2.0, -1.0];
        let m = CMatrix::from_fn(4, 4, |i, j| if i == j { c(d[i], 0.0) } else { c(0.0, 0.0) });
        let p = pauli_project(&m).unwrap();
        // -1/2 (I - 4 Z_2 + Z_1 + 2 Z_2) = -1/2 I + Z_2 - 1/2 Z_1 (qubits 1-based)
        let expect = PauliSum::from_letters(&[(-0.5, "II"), (1.0, "ZI"), (-0.5, "IZ")]).unwrap();
        assert_eq!(p, expect);
    }

    #[test]
    fn project_rejects_bad_dimension() {
        assert!(matches!(pauli_project(&CMatrix::zeros(3, 3)), Err(Error::NotPowerOfTwo(3))));
    }

    #[test]
    fn dump_round_trip() {
        let h = PauliSum::from_terms(
            3,
            [(c(0.5, 0.0), ps("XIY")), (c(-0.25, 1.5), ps("ZZI"))],
        );
        let text = h.dump();
        assert!(text.contains("0.5 0 XIY"));
        let back: PauliSum = text.parse().unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn canonical_order_is_lexicographic() {
        let h = PauliSum::from_letters(&[(1.0, "ZI"), (1.0, "IX"), (1.0, "XZ"), (1.0, "IZ"), (1.0, "II")]).unwrap();
        let letters: Vec<String> = h.terms().iter().map(|(_, s)| s.letters()).collect();
        assert_eq!(letters, ["II", "IX", "IZ", "XZ", "ZI"]);
    }

    #[test]
    fn pruning_and_dedup() {
        let h = PauliSum::from_letters(&[(1.0, "XX"), (-1.0, "XX"), (1e-14, "ZZ"), (0.5, "YY"), (0.5, "YY")]).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h.coefficient(&ps("YY")), c(1.0, 0.0));
    }

    fn arb_string(n: usize) -> impl Strategy<Value = PauliString> {
        proptest::collection::vec(0u8..4, n).prop_map(move |v| {
            PauliString::from_ops(
                n,
                v.into_iter().enumerate().map(|(q, k)| (q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][k as usize])),
            )
        })
    }

    fn arb_sum(max_n: usize) -> impl Strategy<Value = PauliSum> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec((arb_string(n), -2.0f64..2.0, -1.0f64..1.0), 0..12).prop_map(move |ts| {
                PauliSum::from_terms(n, ts.into_iter().map(|(s, re, im)| (c(re, im), s)))
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn project_inverts_to_dense(h in arb_sum(6)) {
            let back = pauli_project(&h.to_dense().unwrap()).unwrap();
            prop_assert_eq!(back.len(), h.len());
            for ((ca, sa), (cb, sb)) in back.terms().iter().zip(h.terms()) {
                prop_assert_eq!(sa, sb);
                prop_assert!((ca - cb).norm() < 1e-12);
            }
        }

        #[test]
        fn multiply_associative_and_dense_consistent(
            (a, b, d) in (1usize..=4).prop_flat_map(|n| (arb_string(n), arb_string(n), arb_string(n)))
        ) {
            let (p1, ab) = multiply(&a, &b).unwrap();
            let (p2, ab_d) = multiply(&ab, &d).unwrap();
            let (p3, bd) = multiply(&b, &d).unwrap();
            let (p4, a_bd) = multiply(&a, &bd).unwrap();
            prop_assert_eq!(&ab_d, &a_bd);
            prop_assert!((p1 * p2 - p3 * p4).norm() < 1e-15);

            let dense = |s: &PauliString| PauliSum::single(1.0, s.clone()).to_dense().unwrap();
            let lhs = dense(&a) * dense(&b);
            let rhs = dense(&ab) * p1;
            prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-14);
        }

        #[test]
        fn norm1_bounds_spectral_norm(h in arb_sum(6)) {
            let dense = h.to_dense().unwrap();
            prop_assert!(h.norm1() + 1e-12 >= spectral_norm(&dense));
        }
    }
}
