//! Two-qubit depth and gate counts, Trotter-error evaluation and Trotter-number search.

use rayon::prelude::*;

use super::formula::ProductFormula;
use super::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::linalg::{expm_hermitian, hermitian_eigen, spectral_norm, CMatrix};
use crate::pauli::{PauliMasks, PauliSum};
use crate::C64;

/// Largest qubit count for dense Trotter-error evaluation of a [`PauliSum`].
pub const TROTTER_DENSE_LIMIT: usize = 12;

/// Upper bound on the Trotter number explored by the search.
pub const MAX_TROTTER_NUMBER: usize = 1 << 40;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ResourceReport {
    pub depth_2q: usize,
    pub count_2q: usize,
    pub count_1q: usize,
}

/// Greedy ASAP layering over two-qubit gates; single-qubit gates are free.
pub fn resource_report(c: &Circuit) -> Result<ResourceReport> {
    let mut level = vec![0usize; c.n_qubits];
    let mut rep = ResourceReport::default();
    for g in &c.gates {
        if let Gate::Rpp(s, _) = g {
            return Err(Error::invalid(format!("uncompiled Pauli rotation on {} qubits", s.locality())));
        }
        let qs = g.qubits();
        match qs.as_slice() {
            [_] => rep.count_1q += 1,
            [a, b] => {
                let l = level[*a].max(level[*b]) + 1;
                level[*a] = l;
                level[*b] = l;
                rep.count_2q += 1;
                rep.depth_2q = rep.depth_2q.max(l);
            }
            _ => unreachable!("native gates act on one or two qubits"),
        }
    }
    Ok(rep)
}

/// Smallest `r` with `err(r) <= eps`, bracketed by doubling then bisected.
///
/// `err(r)` is the error bound for `r` steps, assumed non-increasing in `r`.
pub fn search_trotter_number(eps: f64, mut err: impl FnMut(usize) -> Result<f64>) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("target error must be positive, got {eps}")));
    }
    if err(1)? <= eps {
        return Ok(1);
    }
    let mut hi = 2;
    while err(hi)? > eps {
        hi *= 2;
        if hi > MAX_TROTTER_NUMBER {
            return Err(Error::numerical("Trotter number search did not converge"));
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if err(mid)? <= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// A fragment restricted to an invariant subspace, ready for repeated exponentiation.
#[derive(Clone, Debug)]
pub enum RestrictedFragment {
    /// `c·P` on the full computational space.
    Pauli { coeff: f64, masks: PauliMasks },
    /// Diagonal entries of a diagonal block.
    Diagonal { values: Vec<f64> },
    /// Eigen-decompositions of the connected blocks; identity on untouched basis states.
    Blocks(Vec<Block>),
}

#[derive(Clone, Debug)]
pub struct Block {
    support: Vec<usize>,
    values: Vec<f64>,
    vectors: CMatrix,
}

impl RestrictedFragment {
    pub fn dense(m: &CMatrix) -> Self {
        let d = m.nrows();
        let off_diagonal = (0..d).any(|i| (0..d).any(|j| i != j && m[(i, j)] != C64::new(0.0, 0.0)));
        if !off_diagonal {
            return RestrictedFragment::Diagonal { values: (0..d).map(|i| m[(i, i)].re).collect() };
        }
        let zero = C64::new(0.0, 0.0);
        let mut seen = vec![false; d];
        let mut blocks = Vec::new();
        for start in 0..d {
            if seen[start] || (0..d).all(|j| m[(start, j)] == zero && m[(j, start)] == zero) {
                continue;
            }
            seen[start] = true;
            let mut support = vec![start];
            let mut k = 0;
            while k < support.len() {
                let i = support[k];
                for j in 0..d {
                    if !seen[j] && (m[(i, j)] != zero || m[(j, i)] != zero) {
                        seen[j] = true;
                        support.push(j);
                    }
                }
                k += 1;
            }
            support.sort_unstable();
            let block = CMatrix::from_fn(support.len(), support.len(), |a, b| m[(support[a], support[b])]);
            let (values, vectors) = hermitian_eigen(&block);
            blocks.push(Block { support, values, vectors });
        }
        RestrictedFragment::Blocks(blocks)
    }

    /// Single Pauli term acting on the whole space, or `None` for anything else.
    pub fn from_single_term(frag: &PauliSum) -> Option<Self> {
        match frag.terms() {
            [(c, s)] if c.im == 0.0 => Some(RestrictedFragment::Pauli { coeff: c.re, masks: s.masks()? }),
            _ => None,
        }
    }

    /// `m ← exp(-i t F) m`.
    pub fn apply_exp(&self, m: &mut CMatrix, t: f64) {
        match self {
            RestrictedFragment::Pauli { coeff, masks } => {
                let (cs, sn) = ((coeff * t).cos(), (coeff * t).sin());
                let src = m.clone();
                for b in 0..m.nrows() {
                    let (ph, b2) = masks.act(b);
                    let k = C64::new(0.0, -sn) * ph;
                    for col in 0..m.ncols() {
                        m[(b2, col)] = src[(b2, col)] * cs + k * src[(b, col)];
                    }
                }
            }
            RestrictedFragment::Diagonal { values } => {
                for (i, l) in values.iter().enumerate() {
                    let ph = C64::from_polar(1.0, -l * t);
                    m.row_mut(i).iter_mut().for_each(|z| *z *= ph);
                }
            }
            RestrictedFragment::Blocks(blocks) => {
                for Block { support, values, vectors } in blocks {
                    let rows = CMatrix::from_fn(support.len(), m.ncols(), |a, col| m[(support[a], col)]);
                    let mut w = vectors.adjoint() * rows;
                    for (i, l) in values.iter().enumerate() {
                        let ph = C64::from_polar(1.0, -l * t);
                        w.row_mut(i).iter_mut().for_each(|z| *z *= ph);
                    }
                    let w = vectors * w;
                    for (a, &r) in support.iter().enumerate() {
                        m.row_mut(r).copy_from(&w.row(a));
                    }
                }
            }
        }
    }
}

/// `‖S(τ) − exp(-iτ H)‖` with `S` built from `(fragment, scale)` pairs and `H = Σ scale·F`.
pub fn step_error(
    frags: &[(&RestrictedFragment, f64)],
    h: &CMatrix,
    tau: f64,
    formula: &ProductFormula,
) -> f64 {
    let d = h.nrows();
    let mut s = CMatrix::identity(d, d);
    for (idx, a) in formula.schedule(frags.len(), 1) {
        let (f, scale) = frags[idx];
        f.apply_exp(&mut s, a * tau * scale);
    }
    spectral_norm(&(s - expm_hermitian(h, tau)))
}

/// Single-step error of the warped-phase Hamiltonian `H1 ⊗ diag(ξ) − H2 ⊗ I`.
///
/// The Hamiltonian is block diagonal over the auxiliary frequencies, so the
/// error is the maximum over `ξ` of the error for fragments `ξ·F1` and `−F2`.
pub fn warped_step_error(
    h1: &[RestrictedFragment],
    h1_dense: &CMatrix,
    h2: &[RestrictedFragment],
    h2_dense: &CMatrix,
    xis: &[f64],
    tau: f64,
    formula: &ProductFormula,
) -> f64 {
    xis.par_iter()
        .map(|&xi| {
            let frags: Vec<(&RestrictedFragment, f64)> =
                h1.iter().map(|f| (f, xi)).chain(h2.iter().map(|f| (f, -1.0))).collect();
            let h = h1_dense * C64::new(xi, 0.0) - h2_dense;
            step_error(&frags, &h, tau, formula)
        })
        .reduce(|| 0.0, f64::max)
}

/// Trotter number for `exp(-iHT)` with each Pauli term as a fragment,
/// using `r·‖P(T/r) − exp(-iHT/r)‖ ≤ ε`.
pub fn trotter_number_search(h: &PauliSum, t: f64, eps: f64, formula: &ProductFormula) -> Result<usize> {
    if h.n_qubits() > TROTTER_DENSE_LIMIT {
        return Err(Error::DimensionGuard { what: "dense Trotter error".into(), limit: TROTTER_DENSE_LIMIT });
    }
    if !h.is_hermitian(1e-12) {
        return Err(Error::invalid("Trotter search needs a Hermitian Hamiltonian"));
    }
    let dense = h.to_dense()?;
    let frags: Vec<RestrictedFragment> = h
        .terms()
        .iter()
        .map(|(c, s)| {
            RestrictedFragment::from_single_term(&PauliSum::from_terms(h.n_qubits(), [(*c, s.clone())]))
                .expect("single Hermitian term")
        })
        .collect();
    let pairs: Vec<(&RestrictedFragment, f64)> = frags.iter().map(|f| (f, 1.0)).collect();
    search_trotter_number(eps, |r| Ok(r as f64 * step_error(&pairs, &dense, t / r as f64, formula)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::formula::trotter_circuit;
    use crate::circuits::testutil::unitary;
    use crate::linalg::max_abs_diff;

    #[test]
    fn report_examples() {
        assert_eq!(resource_report(&Circuit::new(3)).unwrap(), ResourceReport::default());
        let mut c = Circuit::new(4);
        c.push(Gate::CX(0, 1));
        c.push(Gate::CX(2, 3));
        assert_eq!(resource_report(&c).unwrap(), ResourceReport { depth_2q: 1, count_2q: 2, count_1q: 0 });
        let mut c = Circuit::new(3);
        c.push(Gate::CX(0, 1));
        c.push(Gate::H(2));
        c.push(Gate::CX(1, 2));
        assert_eq!(resource_report(&c).unwrap(), ResourceReport { depth_2q: 2, count_2q: 2, count_1q: 1 });
        let mut c = Circuit::new(2);
        c.push(Gate::Rpp(crate::pauli::PauliString::from_letters("XX").unwrap(), 0.1));
        assert!(resource_report(&c).is_err());
    }

    #[test]
    fn depth_invariant_under_reordering_within_layer() {
        let gates = [Gate::CX(0, 1), Gate::CX(2, 3), Gate::CX(4, 5), Gate::CX(1, 2), Gate::CX(3, 4)];
        let mut a = Circuit::new(6);
        let mut b = Circuit::new(6);
        for g in &gates {
            a.push(g.clone());
        }
        for i in [2, 0, 1, 4, 3] {
            b.push(gates[i].clone());
        }
        assert_eq!(resource_report(&a).unwrap(), resource_report(&b).unwrap());
    }

    #[test]
    fn block_split_exponential_matches_dense() {
        let c = |re, im| C64::new(re, im);
        let mut m = CMatrix::zeros(6, 6);
        m[(0, 4)] = c(0.3, -0.7);
        m[(4, 0)] = c(0.3, 0.7);
        m[(4, 4)] = c(1.1, 0.0);
        m[(2, 5)] = c(-0.4, 0.0);
        m[(5, 2)] = c(-0.4, 0.0);
        m[(5, 5)] = c(0.2, 0.0);
        let frag = RestrictedFragment::dense(&m);
        assert!(matches!(&frag, RestrictedFragment::Blocks(b) if b.len() == 2));
        let mut s = CMatrix::identity(6, 6);
        frag.apply_exp(&mut s, 0.9);
        assert!(max_abs_diff(&s, &expm_hermitian(&m, 0.9)) < 1e-12);
        let diag = CMatrix::from_diagonal(&crate::linalg::CVector::from_fn(6, |i, _| c(i as f64, 0.0)));
        let mut s = CMatrix::identity(6, 6);
        RestrictedFragment::dense(&diag).apply_exp(&mut s, 0.4);
        assert!(max_abs_diff(&s, &expm_hermitian(&diag, 0.4)) < 1e-12);
    }

    #[test]
    fn step_error_matches_circuit_unitary() {
        let h = PauliSum::from_letters(&[(0.9, "XY"), (0.5, "ZI"), (-0.4, "IX")]).unwrap();
        let f = ProductFormula::second_order();
        let dense = h.to_dense().unwrap();
        let frags: Vec<RestrictedFragment> = h
            .terms()
            .iter()
            .map(|(c, s)| RestrictedFragment::from_single_term(&PauliSum::from_terms(2, [(*c, s.clone())])).unwrap())
            .collect();
        let dense_frags: Vec<RestrictedFragment> = h
            .terms()
            .iter()
            .map(|(c, s)| RestrictedFragment::dense(&PauliSum::from_terms(2, [(*c, s.clone())]).to_dense().unwrap()))
            .collect();
        let circ = trotter_circuit(&h, 0.3, &f, 1).unwrap();
        let want = spectral_norm(&(unitary(&circ) - expm_hermitian(&dense, 0.3)));
        for fr in [&frags, &dense_frags] {
            let pairs: Vec<_> = fr.iter().map(|f| (f, 1.0)).collect();
            assert!((step_error(&pairs, &dense, 0.3, &f) - want).abs() < 1e-12);
        }
        let mut m = crate::linalg::identity(4);
        frags[0].apply_exp(&mut m, 0.7);
        let mut m2 = crate::linalg::identity(4);
        dense_frags[0].apply_exp(&mut m2, 0.7);
        assert!(max_abs_diff(&m, &m2) < 1e-12);
    }

    #[test]
    fn search_brackets_and_is_monotone() {
        let h = PauliSum::from_letters(&[(1.0, "XX"), (0.7, "ZI"), (0.3, "IZ"), (0.5, "YY")]).unwrap();
        let f = ProductFormula::second_order();
        let commuting = PauliSum::from_letters(&[(1.0, "ZZ"), (0.7, "ZI")]).unwrap();
        assert_eq!(trotter_number_search(&commuting, 2.0, 1e-6, &f).unwrap(), 1);
        let r = trotter_number_search(&h, 2.0, 5e-2, &f).unwrap();
        assert!(r > 1);
        let bound = |r: usize| {
            let dense = h.to_dense().unwrap();
            let fr: Vec<RestrictedFragment> = h
                .terms()
                .iter()
                .map(|(c, s)| RestrictedFragment::from_single_term(&PauliSum::from_terms(2, [(*c, s.clone())])).unwrap())
                .collect();
            let pairs: Vec<_> = fr.iter().map(|f| (f, 1.0)).collect();
            r as f64 * step_error(&pairs, &dense, 2.0 / r as f64, &f)
        };
        assert!(bound(r) <= 5e-2 && bound(r - 1) > 5e-2);
        assert!(trotter_number_search(&h, 2.0, 1e-1, &f).unwrap() <= r);
    }

    #[test]
    fn search_rejects_large_systems() {
        let h = PauliSum::identity(TROTTER_DENSE_LIMIT + 1, 1.0);
        assert!(trotter_number_search(&h, 1.0, 0.1, &ProductFormula::second_order()).is_err());
    }
}
