//! Hamiltonian embeddings of tridiagonal and diagonal operators.
//!
//! Every embedding is also produced as a list of *fragments*: groups of mutually
//! commuting Pauli terms that each leave the code subspace invariant. Trotterising
//! over fragments rather than single terms keeps the state inside the subspace.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::discretize::TridiagonalOperator;
use crate::error::{Error, Result};
use crate::linalg::{ceil_log2, max_eigenvalue_hermitian, CMatrix};
use crate::pauli::{pauli_project, Pauli, PauliString, PauliSum};

/// Widest register `embed_vector` will expand into a dense amplitude array.
pub const VECTOR_QUBIT_LIMIT: usize = 26;

/// Tolerance for Hermiticity of inputs to the tridiagonal embeddings.
const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EncodingScheme {
    StdBinary,
    OneHot,
    Unary,
    CircUnary,
}

impl EncodingScheme {
    pub const ALL: [EncodingScheme; 4] =
        [EncodingScheme::StdBinary, EncodingScheme::OneHot, EncodingScheme::Unary, EncodingScheme::CircUnary];

    /// Physical qubits needed for `n` logical states.
    pub fn qubits(self, n: usize) -> usize {
        match self {
            EncodingScheme::StdBinary => ceil_log2(n).max(1),
            EncodingScheme::OneHot => n,
            EncodingScheme::Unary => n - 1,
            EncodingScheme::CircUnary => n / 2,
        }
    }
}

impl fmt::Display for EncodingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EncodingScheme::StdBinary => "binary",
            EncodingScheme::OneHot => "onehot",
            EncodingScheme::Unary => "unary",
            EncodingScheme::CircUnary => "circunary",
        })
    }
}

impl FromStr for EncodingScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(EncodingScheme::StdBinary),
            "onehot" => Ok(EncodingScheme::OneHot),
            "unary" => Ok(EncodingScheme::Unary),
            "circunary" => Ok(EncodingScheme::CircUnary),
            _ => Err(Error::invalid(format!("unknown encoding {s:?}"))),
        }
    }
}

/// A basis state on an arbitrary-width register, little-endian 64-bit words.
pub type Bits = Vec<u64>;

fn bits_with(q: usize, set: impl Fn(usize) -> bool) -> Bits {
    let mut w = vec![0u64; q.div_ceil(64).max(1)];
    for b in 0..q {
        if set(b) {
            w[b / 64] |= 1 << (b % 64);
        }
    }
    w
}

fn bits_to_index(bits: &Bits) -> usize {
    bits[0] as usize
}

/// Letters of a basis state with qubit 0 rightmost.
pub fn bits_to_string(bits: &Bits, q: usize) -> String {
    (0..q).rev().map(|b| if (bits[b / 64] >> (b % 64)) & 1 == 1 { '1' } else { '0' }).collect()
}

/// The codewords of an encoding of `n` logical states.
#[derive(Clone, Debug)]
pub struct Codebook {
    pub scheme: EncodingScheme,
    pub n: usize,
    pub q: usize,
    pub codewords: Vec<Bits>,
}

pub fn codewords(scheme: EncodingScheme, n: usize) -> Result<Codebook> {
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 logical states, got {n}")));
    }
    if scheme == EncodingScheme::CircUnary && n % 2 != 0 {
        return Err(Error::invalid(format!("circulant unary needs even N, got {n}")));
    }
    let q = scheme.qubits(n);
    let codewords = (0..n)
        .map(|j| match scheme {
            EncodingScheme::StdBinary => bits_with(q, |b| (j >> b) & 1 == 1),
            EncodingScheme::OneHot => bits_with(q, |b| b == j),
            EncodingScheme::Unary => bits_with(q, |b| b < j),
            EncodingScheme::CircUnary => {
                let m = n / 2;
                if j < m {
                    bits_with(q, |b| b < j)
                } else {
                    bits_with(q, |b| b >= j - m)
                }
            }
        })
        .collect();
    Ok(Codebook { scheme, n, q, codewords })
}

impl Codebook {
    pub fn subspace(&self) -> Subspace {
        Subspace::new(self.q, self.codewords.clone())
    }

    pub fn embed_vector(&self, v: &[C64]) -> Result<Vec<C64>> {
        self.subspace().embed(v)
    }

    pub fn project_vector(&self, w: &[C64]) -> Result<Vec<C64>> {
        self.subspace().project(w)
    }
}

/// A code subspace spanned by computational basis states.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub n_qubits: usize,
    pub words: Vec<Bits>,
    lookup: HashMap<Bits, usize>,
}

impl Subspace {
    pub fn new(n_qubits: usize, words: Vec<Bits>) -> Self {
        let lookup = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        Subspace { n_qubits, words, lookup }
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn index_of(&self, bits: &Bits) -> Option<usize> {
        self.lookup.get(bits).copied()
    }

    /// `self ⊗ low`: words of `low` occupy the low-order qubits. The logical index is
    /// `i_self * low.dim() + i_low`.
    pub fn tensor(&self, low: &Subspace) -> Subspace {
        let n = self.n_qubits + low.n_qubits;
        let mut words = Vec::with_capacity(self.dim() * low.dim());
        for hi in &self.words {
            for lo in &low.words {
                words.push(bits_with(n, |b| {
                    let (w, s) = if b < low.n_qubits { (lo, b) } else { (hi, b - low.n_qubits) };
                    (w[s / 64] >> (s % 64)) & 1 == 1
                }));
            }
        }
        Subspace::new(n, words)
    }

    /// Restriction `P_S H P_S†` together with the off-block norm `‖P_⊥ H P_S‖`.
    pub fn restrict_with_leakage(&self, h: &PauliSum) -> Result<(CMatrix, f64)> {
        if h.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch { left: self.n_qubits, right: h.n_qubits() });
        }
        let d = self.dim();
        let mut inside = CMatrix::zeros(d, d);
        let mut outside: HashMap<Bits, Vec<C64>> = HashMap::new();
        for (col, word) in self.words.iter().enumerate() {
            for (c, s) in h.terms() {
                let mut bits = word.clone();
                let phase = s.act_on_bits(&mut bits);
                let amp = c * phase;
                match self.lookup.get(&bits) {
                    Some(&row) => inside[(row, col)] += amp,
                    None => outside.entry(bits).or_insert_with(|| vec![C64::new(0.0, 0.0); d])[col] += amp,
                }
            }
        }
        // ‖R‖² = λ_max(R† R)
        let mut gram = CMatrix::zeros(d, d);
        for row in outside.values() {
            for i in 0..d {
                if row[i].norm() == 0.0 {
                    continue;
                }
                for j in 0..d {
                    gram[(i, j)] += row[i].conj() * row[j];
                }
            }
        }
        let leak = if outside.is_empty() { 0.0 } else { max_eigenvalue_hermitian(&gram).max(0.0).sqrt() };
        Ok((inside, leak))
    }

    pub fn restrict(&self, h: &PauliSum) -> Result<CMatrix> {
        Ok(self.restrict_with_leakage(h)?.0)
    }

    pub fn embed(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim() {
            return Err(Error::invalid(format!("vector length {} != subspace dimension {}", v.len(), self.dim())));
        }
        self.guard()?;
        let mut w = vec![C64::new(0.0, 0.0); 1usize << self.n_qubits];
        for (x, word) in v.iter().zip(&self.words) {
            w[bits_to_index(word)] = *x;
        }
        Ok(w)
    }

    pub fn project(&self, w: &[C64]) -> Result<Vec<C64>> {
        self.guard()?;
        if w.len() != 1usize << self.n_qubits {
            return Err(Error::invalid(format!("state length {} does not match {} qubits", w.len(), self.n_qubits)));
        }
        Ok(self.words.iter().map(|word| w[bits_to_index(word)]).collect())
    }

    fn guard(&self) -> Result<()> {
        if self.n_qubits > VECTOR_QUBIT_LIMIT {
            return Err(Error::DimensionGuard {
                what: format!("dense state on {} qubits", self.n_qubits),
                limit: VECTOR_QUBIT_LIMIT,
            });
        }
        Ok(())
    }
}

fn projector(n: usize, qubit: usize, bit: u8) -> PauliSum {
    PauliSum::bit_projector(n, qubit, bit)
}

fn single(n: usize, qubit: usize, p: Pauli, coeff: f64) -> PauliSum {
    PauliSum::single(coeff, PauliString::single(n, qubit, p))
}

fn pair(n: usize, a: (usize, Pauli), b: (usize, Pauli), coeff: f64) -> PauliSum {
    PauliSum::single(coeff, PauliString::from_ops(n, [a, b]))
}

/// Logical hopping edges `(j, k, A_jk)` with `j < k`, corners included.
fn edges(t: &TridiagonalOperator) -> Vec<(usize, usize, C64)> {
    let n = t.n;
    let mut out: Vec<(usize, usize, C64)> = (0..n - 1).map(|j| (j, j + 1, t.get(j, j + 1))).collect();
    if t.is_circulant() && n > 2 {
        out.push((0, n - 1, t.get(0, n - 1)));
    }
    out
}

fn check_hermitian(t: &TridiagonalOperator) -> Result<()> {
    if !t.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::invalid("embedding needs a Hermitian operator"));
    }
    Ok(())
}

fn push_nonzero(out: &mut Vec<PauliSum>, s: PauliSum) {
    if !s.is_empty() {
        out.push(s);
    }
}

/// Fragments of the embedding of a Hermitian tridiagonal operator, in colour order.
pub fn tridiagonal_fragments(scheme: EncodingScheme, t: &TridiagonalOperator) -> Result<Vec<PauliSum>> {
    check_hermitian(t)?;
    let d: Vec<f64> = t.diag.iter().map(|z| z.re).collect();
    let mut frags = Vec::new();
    push_nonzero(&mut frags, embed_diagonal(scheme, &d)?);
    match scheme {
        EncodingScheme::StdBinary => {
            // A zero-diagonal matrix has no I/Z component, so every term here flips bits.
            let off = off_diagonal_binary(t)?;
            for (c, s) in off.terms() {
                frags.push(PauliSum::from_terms(off.n_qubits(), [(*c, s.clone())]));
            }
        }
        EncodingScheme::OneHot => {
            let n = t.n;
            for (j, k, a) in edges(t) {
                // a σ⁺_j σ⁻_k + h.c. = Re(a)/2 (X_j X_k + Y_j Y_k) − Im(a)/2 (X_j Y_k − Y_j X_k)
                let re = &pair(n, (j, Pauli::X), (k, Pauli::X), a.re / 2.0)
                    + &pair(n, (j, Pauli::Y), (k, Pauli::Y), a.re / 2.0);
                let im = &pair(n, (j, Pauli::X), (k, Pauli::Y), -a.im / 2.0)
                    + &pair(n, (j, Pauli::Y), (k, Pauli::X), a.im / 2.0);
                push_nonzero(&mut frags, re);
                push_nonzero(&mut frags, im);
            }
        }
        EncodingScheme::Unary => {
            if t.is_circulant() {
                return Err(Error::invalid("unary embedding supports only open tridiagonal operators"));
            }
            let n = t.n;
            let q = n - 1;
            for j in 0..n - 1 {
                let a = t.get(j, j + 1);
                let mut ctrl = PauliSum::identity(q, 1.0);
                if j >= 1 {
                    ctrl = &ctrl * &projector(q, j - 1, 1);
                }
                if j + 1 < q {
                    ctrl = &ctrl * &projector(q, j + 1, 0);
                }
                push_nonzero(&mut frags, &single(q, j, Pauli::X, a.re) * &ctrl);
                push_nonzero(&mut frags, &single(q, j, Pauli::Y, -a.im) * &ctrl);
            }
        }
        EncodingScheme::CircUnary => {
            let n = t.n;
            if n % 2 != 0 {
                return Err(Error::invalid(format!("circulant unary needs even N, got {n}")));
            }
            let m = n / 2;
            if m == 1 {
                let a = t.get(0, 1);
                push_nonzero(&mut frags, single(1, 0, Pauli::X, a.re));
                push_nonzero(&mut frags, single(1, 0, Pauli::Y, -a.im));
            } else {
                for j in 0..n {
                    let a = if j + 1 < n { t.get(j, j + 1) } else { t.get(n - 1, 0) };
                    if a.norm() == 0.0 {
                        continue;
                    }
                    let qb = j % m;
                    let prev = (qb + m - 1) % m;
                    let next = (qb + 1) % m;
                    let prev_val = u8::from((1..=m).contains(&j));
                    let next_val = u8::from(j + 1 >= m && j + 2 <= n);
                    let mut ctrl = projector(m, prev, prev_val);
                    if next != prev {
                        ctrl = &ctrl * &projector(m, next, next_val);
                    }
                    // Forward edges below m raise the flipped bit, the rest lower it.
                    let im_sign = if j < m { -1.0 } else { 1.0 };
                    push_nonzero(&mut frags, &single(m, qb, Pauli::X, a.re) * &ctrl);
                    push_nonzero(&mut frags, &single(m, qb, Pauli::Y, im_sign * a.im) * &ctrl);
                }
            }
        }
    }
    Ok(color_order(frags))
}

fn off_diagonal_binary(t: &TridiagonalOperator) -> Result<PauliSum> {
    let mut off = t.clone();
    off.diag.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
    pauli_project(&padded(&off.to_dense()))
}

fn padded(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let dim = 1usize << ceil_log2(n).max(1);
    let mut out = CMatrix::zeros(dim, dim);
    out.view_mut((0, 0), (n, n)).copy_from(m);
    out
}

/// Embedding of a Hermitian tridiagonal operator.
pub fn embed_tridiagonal(scheme: EncodingScheme, t: &TridiagonalOperator) -> Result<PauliSum> {
    let frags = tridiagonal_fragments(scheme, t)?;
    let q = scheme.qubits(t.n);
    Ok(frags.iter().fold(PauliSum::zero(q), |acc, f| &acc + f))
}

/// Embedding of `diag(d)`.
pub fn embed_diagonal(scheme: EncodingScheme, d: &[f64]) -> Result<PauliSum> {
    let n = d.len();
    if n < 2 {
        return Err(Error::invalid("diagonal embedding needs at least 2 entries"));
    }
    let q = scheme.qubits(n);
    Ok(match scheme {
        EncodingScheme::StdBinary => {
            let m = CMatrix::from_fn(n, n, |i, j| if i == j { C64::new(d[i], 0.0) } else { C64::new(0.0, 0.0) });
            pauli_project(&padded(&m))?
        }
        EncodingScheme::OneHot => {
            let mut out = PauliSum::zero(q);
            for (j, &dj) in d.iter().enumerate() {
                out = &out + &projector(q, j, 1).scale_real(dj);
            }
            out
        }
        EncodingScheme::Unary => {
            let mut out = PauliSum::identity(q, d[0]);
            for j in 1..n {
                out = &out + &projector(q, j - 1, 1).scale_real(d[j] - d[j - 1]);
            }
            out
        }
        EncodingScheme::CircUnary => {
            if n % 2 != 0 {
                return Err(Error::invalid(format!("circulant unary needs even N, got {n}")));
            }
            let m = n / 2;
            if m == 1 {
                &projector(1, 0, 0).scale_real(d[0]) + &projector(1, 0, 1).scale_real(d[1])
            } else {
                let mut out = PauliSum::zero(m);
                for (j, &dj) in d.iter().enumerate() {
                    let qb = j % m;
                    let prev = (qb + m - 1) % m;
                    let sel = &projector(m, prev, u8::from((1..=m).contains(&j))) * &projector(m, qb, u8::from(j >= m));
                    out = &out + &sel.scale_real(dj);
                }
                out
            }
        }
    })
}

/// Qubits touched by any term of the sum.
pub fn support(s: &PauliSum) -> Vec<usize> {
    let mut q: Vec<usize> = s.terms().iter().flat_map(|(_, p)| p.support().collect::<Vec<_>>()).collect();
    q.sort_unstable();
    q.dedup();
    q
}

/// Greedy first-fit colouring: fragments with disjoint supports share a colour class.
/// Classes are emitted in order, preserving the input order inside each class.
pub fn color_order(frags: Vec<PauliSum>) -> Vec<PauliSum> {
    let mut classes: Vec<(Vec<usize>, Vec<PauliSum>)> = Vec::new();
    for f in frags {
        let sup = support(&f);
        match classes.iter_mut().find(|(used, _)| sup.iter().all(|q| used.binary_search(q).is_err())) {
            Some((used, members)) => {
                used.extend(sup);
                used.sort_unstable();
                members.push(f);
            }
            None => classes.push((sup, vec![f])),
        }
    }
    classes.into_iter().flat_map(|(_, m)| m).collect()
}

/// Named qubit blocks listed from the low-order end of the register.
#[derive(Clone, Debug, PartialEq)]
pub struct RegisterLayout {
    blocks: Vec<(String, usize, usize)>,
}

impl RegisterLayout {
    pub fn new(blocks_low_to_high: &[(&str, usize)]) -> Result<Self> {
        let mut offset = 0;
        let mut blocks = Vec::new();
        for &(name, width) in blocks_low_to_high {
            if blocks.iter().any(|(n, _, _): &(String, usize, usize)| n == name) {
                return Err(Error::invalid(format!("register {name:?} declared twice")));
            }
            blocks.push((name.to_string(), offset, width));
            offset += width;
        }
        Ok(RegisterLayout { blocks })
    }

    pub fn total(&self) -> usize {
        self.blocks.iter().map(|b| b.2).sum()
    }

    /// `(offset, width)` of a named block.
    pub fn block(&self, name: &str) -> Result<(usize, usize)> {
        self.blocks
            .iter()
            .find(|b| b.0 == name)
            .map(|b| (b.1, b.2))
            .ok_or_else(|| Error::invalid(format!("unknown register {name:?}")))
    }

    /// Places a sum defined on one block into the full register.
    pub fn place(&self, name: &str, s: &PauliSum) -> Result<PauliSum> {
        let (offset, width) = self.block(name)?;
        if s.n_qubits() != width {
            return Err(Error::QubitMismatch { left: width, right: s.n_qubits() });
        }
        Ok(s.place(offset, self.total()))
    }
}

/// Product of factors acting on distinct named blocks; unnamed blocks carry the identity.
pub fn tensor_embed(layout: &RegisterLayout, factors: &[(&str, &PauliSum)]) -> Result<PauliSum> {
    let mut seen: Vec<&str> = Vec::new();
    let mut out = PauliSum::identity(layout.total(), 1.0);
    for &(name, f) in factors {
        if seen.contains(&name) {
            return Err(Error::invalid(format!("register {name:?} used by two factors")));
        }
        seen.push(name);
        out = &out * &layout.place(name, f)?;
    }
    Ok(out)
}
