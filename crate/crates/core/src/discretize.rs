//! Coefficient matrices from PDE discretisations.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{max_abs_diff, max_eigenvalue_hermitian, CMatrix};
use crate::pauli::{Pauli, PauliString, PauliSum};

/// Largest dimension for which the dense stability check is run.
pub const STABILITY_CHECK_LIMIT: usize = 4096;

/// Uniform one-dimensional grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub periodic: bool,
}

impl Grid1D {
    pub fn new(lo: f64, hi: f64, n: usize, periodic: bool) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("grid needs at least 2 points, got {n}")));
        }
        if !(hi > lo) {
            return Err(Error::invalid(format!("grid endpoints out of order: [{lo}, {hi}]")));
        }
        Ok(Grid1D { lo, hi, n, periodic })
    }

    pub fn periodic(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new(lo, hi, n, true)
    }

    /// Inflow grid on `(lo, hi]`: the inflow value at `lo` is implicit, spacing `(hi - lo)/n`.
    pub fn inflow(lo: f64, hi: f64, n: usize) -> Result<Self> {
        let h = (hi - lo) / n as f64;
        Self::new(lo + h, hi, n, false)
    }

    pub fn spacing(&self) -> f64 {
        if self.periodic {
            (self.hi - self.lo) / self.n as f64
        } else {
            (self.hi - self.lo) / (self.n - 1) as f64
        }
    }

    pub fn point(&self, j: usize) -> f64 {
        self.lo + j as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Midpoint between point `j` and point `j + 1` (the latter may lie past the last point).
    pub fn midpoint(&self, j: usize) -> f64 {
        self.point(j) + 0.5 * self.spacing()
    }
}

/// Tridiagonal matrix with optional corner entries for circulant boundaries.
///
/// `upper[j]` sits at `(j, j+1)` and `lower[j]` at `(j+1, j)`. `wrap_upper` is the
/// top-right corner `(0, n-1)` and `wrap_lower` the bottom-left corner `(n-1, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalOperator {
    pub n: usize,
    pub diag: Vec<C64>,
    pub lower: Vec<C64>,
    pub upper: Vec<C64>,
    pub wrap_upper: Option<C64>,
    pub wrap_lower: Option<C64>,
}

impl TridiagonalOperator {
    pub fn zeros(n: usize) -> Self {
        let z = C64::new(0.0, 0.0);
        TridiagonalOperator {
            n,
            diag: vec![z; n],
            lower: vec![z; n.saturating_sub(1)],
            upper: vec![z; n.saturating_sub(1)],
            wrap_upper: None,
            wrap_lower: None,
        }
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut t = Self::zeros(d.len());
        t.diag = d.iter().map(|&x| C64::new(x, 0.0)).collect();
        t
    }

    pub fn is_circulant(&self) -> bool {
        self.wrap_upper.is_some() || self.wrap_lower.is_some()
    }

    /// Entry `(i, j)`; all stored contributions landing on the same position are summed.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        let mut v = C64::new(0.0, 0.0);
        if i == j {
            v += self.diag[i];
        }
        if j == i + 1 {
            v += self.upper[i];
        }
        if i == j + 1 {
            v += self.lower[j];
        }
        if i == 0 && j == self.n - 1 {
            v += self.wrap_upper.unwrap_or_default();
        }
        if i == self.n - 1 && j == 0 {
            v += self.wrap_lower.unwrap_or_default();
        }
        v
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.n, self.n);
        for j in 0..self.n {
            m[(j, j)] += self.diag[j];
        }
        for j in 0..self.n - 1 {
            m[(j, j + 1)] += self.upper[j];
            m[(j + 1, j)] += self.lower[j];
        }
        if let Some(w) = self.wrap_upper {
            m[(0, self.n - 1)] += w;
        }
        if let Some(w) = self.wrap_lower {
            m[(self.n - 1, 0)] += w;
        }
        m
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.to_dense();
        max_abs_diff(&d, &d.adjoint()) <= tol
    }

    pub fn adjoint(&self) -> Self {
        TridiagonalOperator {
            n: self.n,
            diag: self.diag.iter().map(|z| z.conj()).collect(),
            lower: self.upper.iter().map(|z| z.conj()).collect(),
            upper: self.lower.iter().map(|z| z.conj()).collect(),
            wrap_upper: self.wrap_lower.map(|z| z.conj()),
            wrap_lower: self.wrap_upper.map(|z| z.conj()),
        }
    }

    fn combine(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!(self.n, other.n);
        let zip = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect();
        let wrap = |a: Option<C64>, b: Option<C64>| match (a, b) {
            (None, None) => None,
            _ => Some(f(a.unwrap_or_default(), b.unwrap_or_default())),
        };
        TridiagonalOperator {
            n: self.n,
            diag: zip(&self.diag, &other.diag),
            lower: zip(&self.lower, &other.lower),
            upper: zip(&self.upper, &other.upper),
            wrap_upper: wrap(self.wrap_upper, other.wrap_upper),
            wrap_lower: wrap(self.wrap_lower, other.wrap_lower),
        }
    }

    /// Structured Cartesian split `A = H1 + i H2`.
    pub fn cartesian(&self) -> (Self, Self) {
        let adj = self.adjoint();
        let h1 = self.combine(&adj, |a, b| (a + b) * 0.5);
        let h2 = self.combine(&adj, |a, b| (a - b) / C64::new(0.0, 2.0));
        (h1, h2)
    }

    pub fn scale(&self, k: C64) -> Self {
        self.combine(self, |a, _| a * k)
    }
}

/// Centred differences for `u_t + (f u)_x = 0` on a periodic grid.
pub fn centered_difference(
    grid: &Grid1D,
    f: impl Fn(f64) -> f64,
    fprime: impl Fn(f64) -> f64,
) -> Result<TridiagonalOperator> {
    if !grid.periodic {
        return Err(Error::invalid("centred differences need a periodic grid"));
    }
    let n = grid.n;
    let h = grid.spacing();
    let mut t = TridiagonalOperator::zeros(n);
    for j in 0..n {
        t.diag[j] = C64::new(fprime(grid.point(j)) / 2.0, 0.0);
    }
    for j in 0..n - 1 {
        let fm = f(grid.midpoint(j)) / (2.0 * h);
        t.upper[j] = C64::new(-fm, 0.0);
        t.lower[j] = C64::new(fm, 0.0);
    }
    let fw = f(grid.midpoint(n - 1)) / (2.0 * h);
    t.wrap_upper = Some(C64::new(fw, 0.0));
    t.wrap_lower = Some(C64::new(-fw, 0.0));
    Ok(t)
}

/// First-order upwind scheme for `u_t + f(x) u_x = 0`, `f > 0`, zero inflow.
pub fn upwind(grid: &Grid1D, f: impl Fn(f64) -> f64) -> Result<TridiagonalOperator> {
    if grid.periodic {
        return Err(Error::invalid("upwind scheme needs an inflow (non-periodic) grid"));
    }
    let n = grid.n;
    let h = grid.spacing();
    let vals: Vec<f64> = grid.points().into_iter().map(f).collect();
    if let Some((j, v)) = vals.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::invalid(format!("upwind needs f > 0; f(q_{j}) = {v}")));
    }
    let mut t = TridiagonalOperator::zeros(n);
    for j in 0..n {
        t.diag[j] = C64::new(-vals[j] / h, 0.0);
    }
    for j in 0..n - 1 {
        t.lower[j] = C64::new(vals[j + 1] / h, 0.0);
    }
    Ok(t)
}

/// Fourier frequencies `(0, 1, …, N/2-1, -N/2, …, -1)` for `N = 2^n`.
pub fn frequency_vector(n: usize) -> Vec<f64> {
    let dim = 1usize << n;
    (0..dim)
        .map(|k| if k < dim / 2 { k as f64 } else { k as f64 - dim as f64 })
        .collect()
}

/// One-local Pauli form of the Fourier-frequency diagonal on `n` qubits.
pub fn fourier_frequencies(n: usize) -> PauliSum {
    assert!(n >= 1, "need at least one qubit");
    let mut terms = vec![(C64::new(-0.5, 0.0), PauliString::identity(n))];
    terms.push((C64::new(0.5 * (1u64 << n) as f64, 0.0), PauliString::single(n, n - 1, Pauli::Z)));
    for j in 0..n {
        terms.push((C64::new(-0.5 * (1u64 << j) as f64, 0.0), PauliString::single(n, j, Pauli::Z)));
    }
    PauliSum::from_terms(n, terms)
}

/// `Σ_k a_k P^k` with `P = diag(0, 1, …, N-1)/N`.
pub fn poly_diagonal(n: usize, coeffs: &[f64]) -> PauliSum {
    let dim = (1u64 << n) as f64;
    let mut p_terms = vec![(C64::new((dim - 1.0) / (2.0 * dim), 0.0), PauliString::identity(n))];
    for j in 0..n {
        p_terms.push((C64::new(-((1u64 << j) as f64) / (2.0 * dim), 0.0), PauliString::single(n, j, Pauli::Z)));
    }
    let p = PauliSum::from_terms(n, p_terms);
    let mut out = PauliSum::zero(n);
    let mut power = PauliSum::identity(n, 1.0);
    for (k, &a) in coeffs.iter().enumerate() {
        if k > 0 {
            power = &power * &p;
        }
        if a != 0.0 {
            out = &out + &power.scale_real(a);
        }
    }
    out
}

/// `A = H1 + i H2` with both parts Hermitian.
#[derive(Clone, Debug)]
pub struct CartesianParts {
    pub h1: CMatrix,
    pub h2: CMatrix,
    /// `Some(true)` when `λ_max(H1) <= 1e-10`; `None` above [`STABILITY_CHECK_LIMIT`].
    pub stable: Option<bool>,
}

pub fn cartesian_split(a: &CMatrix) -> Result<CartesianParts> {
    if !a.is_square() {
        return Err(Error::invalid("cartesian_split needs a square matrix"));
    }
    let adj = a.adjoint();
    let h1 = (a + &adj) * C64::new(0.5, 0.0);
    let h2 = (a - &adj) * C64::new(0.0, -0.5);
    let stable = if a.nrows() <= STABILITY_CHECK_LIMIT {
        Some(max_eigenvalue_hermitian(&h1) <= 1e-10)
    } else {
        None
    };
    Ok(CartesianParts { h1, h2, stable })
}
