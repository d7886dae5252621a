//! Linear combination of Hamiltonian simulations:
//! `u(T) ≈ Σ_j c_j U(k_j) u0` with `U(k) = exp(iT(k H̃1 + H̃2))`
//! on a trapezoidal grid over `[-R, R]`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use super::{diagonal_values, ratio_estimate, LinearProblem, Mode, ObservableEstimate};
use crate::circuits::{Gate, ProductFormula};
use crate::error::{Error, Result};
use crate::simulate::StateVector;
use crate::C64;

/// Weight function `f(k)` of the integral representation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kernel {
    /// `1/(π(1+ik))`, whose product with `1/(1-ik)` is the Cauchy density.
    Reciprocal,
    /// `1/(2π e^{-2^β} e^{(1+ik)^β})` for `β ∈ (0, 1)`.
    Beta(f64),
}

impl Kernel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Beta(b) if !(b > 0.0 && b < 1.0) => {
                Err(Error::invalid(format!("beta must lie in (0, 1), got {b}")))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, k: f64) -> C64 {
        match *self {
            Kernel::Reciprocal => 1.0 / (PI * C64::new(1.0, k)),
            Kernel::Beta(b) => {
                let norm = 2.0 * PI * (-(2f64.powf(b))).exp();
                1.0 / (norm * C64::new(1.0, k).powf(b).exp())
            }
        }
    }

    /// `|f(k)/(1-ik)|`, the integrand magnitude.
    pub fn integrand_abs(&self, k: f64) -> f64 {
        self.eval(k).norm() / (1.0 + k * k).sqrt()
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Reciprocal => write!(f, "reciprocal"),
            Kernel::Beta(b) => write!(f, "beta({b})"),
        }
    }
}

impl FromStr for Kernel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reciprocal" | "recip" => Ok(Kernel::Reciprocal),
            "beta" => Ok(Kernel::Beta(0.75)),
            _ => Err(Error::Parse(format!("unknown kernel '{s}' (expected reciprocal or beta)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LchsConfig {
    /// Truncation `R` of the `k` integral.
    pub half_width: f64,
    /// Number of trapezoid nodes.
    pub nodes: usize,
    pub kernel: Kernel,
    pub n_samples: usize,
    pub shots_per_sample: usize,
    pub seed: u64,
    pub formula: ProductFormula,
    pub steps: usize,
    pub mode: Mode,
}

impl Default for LchsConfig {
    fn default() -> Self {
        LchsConfig {
            half_width: 25.0,
            nodes: 128,
            kernel: Kernel::Beta(0.75),
            n_samples: 100,
            shots_per_sample: 10,
            seed: 0,
            formula: ProductFormula::second_order(),
            steps: 20,
            mode: Mode::Exact,
        }
    }
}

impl LchsConfig {
    pub fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        if !(self.half_width > 0.0) {
            return Err(Error::invalid("truncation R must be positive"));
        }
        if self.nodes < 2 {
            return Err(Error::invalid("need at least two quadrature nodes"));
        }
        if self.steps == 0 {
            return Err(Error::invalid("Trotter steps must be positive"));
        }
        if let Mode::Shots(_) = self.mode {
            if self.n_samples == 0 || self.shots_per_sample == 0 {
                return Err(Error::invalid("sample and shot counts must be positive"));
            }
        }
        Ok(())
    }

    /// Truncation at which the integrand of the beta kernel falls below `eps`.
    pub fn beta_truncation(beta: f64, eps: f64) -> f64 {
        ((1.0 / eps).ln() / (beta * PI / 2.0).cos()).powf(1.0 / beta)
    }
}

/// Trapezoid nodes `k_j` and weights `c_j = w_j f(k_j)/(1 - i k_j)`.
pub fn lchs_nodes(cfg: &LchsConfig) -> Result<Vec<(f64, C64)>> {
    cfg.validate()?;
    let m = cfg.nodes;
    let h = 2.0 * cfg.half_width / (m - 1) as f64;
    Ok((0..m)
        .map(|j| {
            let k = -cfg.half_width + j as f64 * h;
            let w = if j == 0 || j == m - 1 { h / 2.0 } else { h };
            (k, w * cfg.kernel.eval(k) / C64::new(1.0, -k))
        })
        .collect())
}

/// Trotterised `U(k) u0/‖u0‖`.
pub fn evolve_node(problem: &LinearProblem, k: f64, t: f64, cfg: &LchsConfig) -> Result<StateVector> {
    let norm = problem.u0_norm();
    let mut s = StateVector::from_amplitudes(problem.u0.iter().map(|z| z / norm).collect())?;
    let frags: Vec<(f64, &crate::pauli::PauliSum)> =
        problem.h1.iter().map(|f| (-k, f)).chain(problem.h2.iter().map(|f| (-1.0, f))).collect();
    let tau = t / cfg.steps as f64;
    for (idx, a) in cfg.formula.schedule(frags.len(), cfg.steps) {
        let (scale, f) = frags[idx];
        for (c, p) in f.terms() {
            s.apply_pauli_rotation(&p.masks().expect("narrow register"), 2.0 * a * tau * scale * c.re);
        }
    }
    Ok(s)
}

fn node_states(problem: &LinearProblem, nodes: &[(f64, C64)], t: f64, cfg: &LchsConfig) -> Result<Vec<Vec<C64>>> {
    nodes
        .par_iter()
        .map(|&(k, _)| evolve_node(problem, k, t, cfg).map(StateVector::into_amplitudes))
        .collect()
}

/// `Σ_j c_j U(k_j) u0`, the truncated and discretised solution.
pub fn lchs_solution(problem: &LinearProblem, t: f64, cfg: &LchsConfig) -> Result<Vec<C64>> {
    let nodes = lchs_nodes(cfg)?;
    let states = node_states(problem, &nodes, t, cfg)?;
    let norm = problem.u0_norm();
    let mut w = vec![C64::new(0.0, 0.0); problem.u0.len()];
    for ((_, c), v) in nodes.iter().zip(&states) {
        for (wi, vi) in w.iter_mut().zip(v) {
            *wi += c * vi * norm;
        }
    }
    Ok(w)
}

/// Estimate of `u(T)†Ou(T)/u(T)†u(T)`.
///
/// Shot mode draws node pairs with probability `∝ |c_1||c_2|`, runs the
/// real or imaginary Hadamard test on each pair and forms the ratio of the
/// observable and normalisation estimates.
pub fn run_lchs(problem: &LinearProblem, t: f64, cfg: &LchsConfig) -> Result<ObservableEstimate> {
    match cfg.mode {
        Mode::Exact => {
            let w = lchs_solution(problem, t, cfg)?;
            let s = StateVector::from_amplitudes(w)?;
            let den = s.norm_sqr();
            if den < 1e-300 {
                return Err(Error::numerical("reconstructed solution vanishes"));
            }
            let num = s.expectation(&problem.observable)?;
            Ok(ObservableEstimate::exact(num / den, Some(num), cfg.nodes))
        }
        Mode::Shots(_) => {
            cfg.validate()?;
            let ovals = diagonal_values(&problem.observable)?;
            let nodes = lchs_nodes(cfg)?;
            let states = node_states(problem, &nodes, t, cfg)?;
            let abs: Vec<f64> = nodes.iter().map(|(_, c)| c.norm()).collect();
            let big_c: f64 = abs.iter().sum();
            let pick = WeightedIndex::new(&abs).map_err(|e| Error::numerical(format!("node weights: {e}")))?;
            let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
            let n_u = problem.n_u;
            let dim = 1usize << n_u;
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let mut num = Vec::with_capacity(cfg.n_samples);
            let mut den = Vec::with_capacity(cfg.n_samples);
            for _ in 0..cfg.n_samples {
                let (j1, j2) = (pick.sample(&mut rng), pick.sample(&mut rng));
                let imag = rng.gen_bool(0.5);
                let phi = nodes[j2].1.arg() - nodes[j1].1.arg();
                let fac = 2.0 * big_c * big_c * if imag { -phi.sin() } else { phi.cos() };
                let mut amps = Vec::with_capacity(2 * dim);
                amps.extend(states[j1].iter().map(|z| z * h));
                amps.extend(states[j2].iter().map(|z| z * h));
                let mut s = StateVector::from_amplitudes(amps)?;
                if imag {
                    s.apply_gate(&Gate::Sdg(n_u))?;
                }
                s.apply_gate(&Gate::H(n_u))?;
                let (mut sn, mut sd) = (0.0, 0.0);
                for idx in s.sample_indices(cfg.shots_per_sample, &mut rng) {
                    let sign = if idx >> n_u == 0 { 1.0 } else { -1.0 };
                    sn += sign * ovals[idx & (dim - 1)];
                    sd += sign;
                }
                let m = cfg.shots_per_sample as f64;
                num.push(fac * sn / m);
                den.push(fac * sd / m);
            }
            let (value, stderr) = ratio_estimate(&num, &den)?;
            Ok(ObservableEstimate {
                value,
                stderr,
                circuits: cfg.n_samples,
                shots: cfg.n_samples * cfg.shots_per_sample,
                unnormalized: None,
            })
        }
    }
}
