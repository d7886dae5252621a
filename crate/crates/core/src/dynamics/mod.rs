//! Non-unitary dynamics through unitary simulation: the warped-phase
//! (Schrödingerization) pipeline and linear combination of Hamiltonian simulations.

pub mod lchs;
pub mod schrod;

use std::fmt;

use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::C64;

pub use lchs::{lchs_nodes, run_lchs, Kernel, LchsConfig};
pub use schrod::{build_hs, postselect_estimate, run_schrodingerization, schrod_circuit, SchrodConfig};

/// Embedded problem `du/dt = (H̃1 + i H̃2) u` with the Trotter fragments of both parts.
#[derive(Clone, Debug)]
pub struct LinearProblem {
    pub n_u: usize,
    pub h1: Vec<PauliSum>,
    pub h2: Vec<PauliSum>,
    pub observable: PauliSum,
    pub u0: Vec<C64>,
}

impl LinearProblem {
    pub fn new(h1: Vec<PauliSum>, h2: Vec<PauliSum>, observable: PauliSum, u0: Vec<C64>) -> Result<Self> {
        let n_u = observable.n_qubits();
        for f in h1.iter().chain(&h2) {
            if f.n_qubits() != n_u {
                return Err(Error::QubitMismatch { left: n_u, right: f.n_qubits() });
            }
            if !f.is_hermitian(1e-12) {
                return Err(Error::invalid("fragments must be Hermitian"));
            }
            if !f.is_commuting() {
                return Err(Error::invalid("fragment terms must commute pairwise"));
            }
        }
        if u0.len() != 1 << n_u {
            return Err(Error::invalid(format!("initial state has length {}, expected {}", u0.len(), 1usize << n_u)));
        }
        if u0.iter().map(|z| z.norm_sqr()).sum::<f64>() == 0.0 {
            return Err(Error::invalid("initial state is zero"));
        }
        Ok(LinearProblem { n_u, h1, h2, observable, u0 })
    }

    pub fn u0_norm(&self) -> f64 {
        self.u0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest eigenvalue of `Σ H̃1`; positive means the solution can grow. `None` above 12 qubits.
    pub fn growth_rate(&self) -> Option<f64> {
        if self.n_u > 12 {
            return None;
        }
        let total = self.h1.iter().fold(PauliSum::zero(self.n_u), |acc, f| &acc + f);
        total.to_dense().ok().map(|m| crate::linalg::max_eigenvalue_hermitian(&m))
    }

    pub(crate) fn shifted_h1(&self, shift: f64) -> Vec<PauliSum> {
        if shift == 0.0 {
            return self.h1.clone();
        }
        let mut out = self.h1.clone();
        let id = PauliSum::identity(self.n_u, -shift);
        match out.first_mut() {
            Some(f) => *f = &*f + &id,
            None => out.push(id),
        }
        out
    }
}

/// Expectation values are either computed exactly or estimated from `k` shots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Shots(usize),
}

/// Estimate of the normalised quadratic form `u†Ou / u†u`.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableEstimate {
    pub value: f64,
    pub stderr: f64,
    pub circuits: usize,
    pub shots: usize,
    /// `u†Ou` itself, available in exact mode.
    pub unnormalized: Option<f64>,
}

impl ObservableEstimate {
    pub fn exact(value: f64, unnormalized: Option<f64>, circuits: usize) -> Self {
        ObservableEstimate { value, stderr: 0.0, circuits, shots: 0, unnormalized }
    }

    /// `method,value,stderr,circuits,shots,seed`
    pub fn csv_row(&self, method: &str, seed: u64) -> String {
        format!("{method},{},{},{},{},{seed}", self.value, self.stderr, self.circuits, self.shots)
    }
}

pub const ESTIMATE_CSV_HEADER: &str = "method,value,stderr,circuits,shots,seed";

impl fmt::Display for ObservableEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6} ± {:.6} ({} circuits, {} shots)", self.value, self.stderr, self.circuits, self.shots)
    }
}

/// Greedy partition of a sum into groups of mutually commuting terms, in term order.
pub fn commuting_groups(h: &PauliSum) -> Vec<PauliSum> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let terms = h.terms();
    for (i, (_, s)) in terms.iter().enumerate() {
        match groups.iter_mut().find(|g| g.iter().all(|&j| terms[j].1.commutes_with(s))) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    groups
        .into_iter()
        .map(|g| PauliSum::from_terms(h.n_qubits(), g.into_iter().map(|j| terms[j].clone())))
        .collect()
}

/// Values of a diagonal observable on every basis state.
pub fn diagonal_values(o: &PauliSum) -> Result<Vec<f64>> {
    if o.terms().iter().any(|(_, s)| s.ops().iter().any(|&(_, p)| p.flips())) {
        return Err(Error::invalid("sampling estimators need an observable diagonal in the computational basis"));
    }
    if !o.is_hermitian(1e-12) {
        return Err(Error::invalid("observable must be Hermitian"));
    }
    let masks: Vec<(f64, usize)> = o
        .terms()
        .iter()
        .map(|(c, s)| (c.re, s.masks().expect("narrow register").z))
        .collect();
    Ok((0..1usize << o.n_qubits())
        .map(|b| {
            masks
                .iter()
                .map(|&(c, z)| if (b & z).count_ones() % 2 == 0 { c } else { -c })
                .sum()
        })
        .collect())
}

/// Ratio `mean(num)/mean(den)` of paired samples with its delta-method standard error.
pub fn ratio_estimate(num: &[f64], den: &[f64]) -> Result<(f64, f64)> {
    let n = num.len();
    if n == 0 || n != den.len() {
        return Err(Error::invalid("ratio estimate needs paired, non-empty samples"));
    }
    let mn = num.iter().sum::<f64>() / n as f64;
    let md = den.iter().sum::<f64>() / n as f64;
    if md.abs() < 1e-300 {
        return Err(Error::numerical("normalisation estimate is zero"));
    }
    let r = mn / md;
    if n < 2 {
        return Ok((r, f64::INFINITY));
    }
    let var = num.iter().zip(den).map(|(a, b)| (a - r * b).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    Ok((r, (var / n as f64).sqrt() / md.abs()))
}
