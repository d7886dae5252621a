//! Transverse-field Ising chain with an imaginary longitudinal field,
//! `A = −γ Σ(I − Z_j) − i(J Σ Z_j Z_{j+1} + h Σ X_j)`, estimated by both pipelines.

use crate::dynamics::lchs::{run_lchs, Kernel, LchsConfig};
use crate::dynamics::schrod::{run_schrodingerization, SchrodConfig};
use crate::dynamics::{commuting_groups, LinearProblem, Mode, ObservableEstimate, ESTIMATE_CSV_HEADER};
use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::simulate::expm_evolve;
use crate::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct TfimConfig {
    pub n: usize,
    pub j: f64,
    pub h: f64,
    pub gamma: f64,
    pub t: f64,
    pub steps: usize,
    pub n_p: usize,
    pub schrod_half_width: f64,
    pub lchs_half_width: f64,
    pub nodes: usize,
    pub kernel: Kernel,
    /// Total circuit executions per method.
    pub budgets: Vec<usize>,
    /// LCHS circuits per budget; `None` uses `budget / LCHS_SHOTS_PER_CIRCUIT` circuits.
    pub lchs_samples: Option<usize>,
    pub exact: bool,
    pub seed: u64,
}

/// Shots per sampled LCHS circuit when the sample count scales with the budget.
pub const LCHS_SHOTS_PER_CIRCUIT: usize = 10;

impl Default for TfimConfig {
    fn default() -> Self {
        TfimConfig {
            n: 4,
            j: 1.0,
            h: 1.0,
            gamma: 0.1,
            t: 0.5,
            steps: 20,
            n_p: 7,
            schrod_half_width: 25.0,
            lchs_half_width: 25.0,
            nodes: 128,
            kernel: Kernel::Beta(0.75),
            budgets: vec![100, 1_000, 10_000, 100_000],
            lchs_samples: None,
            exact: false,
            seed: 0,
        }
    }
}

impl TfimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=10).contains(&self.n) {
            return Err(Error::invalid(format!("chain length must be in 2..=10, got {}", self.n)));
        }
        if self.gamma < 0.0 {
            return Err(Error::invalid("decay rate must be non-negative"));
        }
        if self.budgets.iter().any(|&b| b < LCHS_SHOTS_PER_CIRCUIT) {
            return Err(Error::invalid(format!("budgets must be at least {LCHS_SHOTS_PER_CIRCUIT}")));
        }
        if let Some(s) = self.lchs_samples {
            if s == 0 || self.budgets.iter().any(|&b| b < s) {
                return Err(Error::invalid("LCHS sample count must be positive and within every budget"));
            }
        }
        self.kernel.validate()
    }

    fn schrod(&self, mode: Mode, seed: u64) -> SchrodConfig {
        SchrodConfig { steps: self.steps, mode, seed, ..SchrodConfig::new(self.n_p, self.schrod_half_width) }
    }

    fn lchs(&self, mode: Mode, budget: usize, seed: u64) -> LchsConfig {
        let n_samples = self.lchs_samples.unwrap_or(budget / LCHS_SHOTS_PER_CIRCUIT);
        LchsConfig {
            half_width: self.lchs_half_width,
            nodes: self.nodes,
            kernel: self.kernel,
            n_samples,
            shots_per_sample: budget / n_samples,
            seed,
            steps: self.steps,
            mode,
            ..LchsConfig::default()
        }
    }
}

/// `(H̃1, H̃2, O)` on `n` qubits.
pub fn tfim_operators(cfg: &TfimConfig) -> (PauliSum, PauliSum, PauliSum) {
    let n = cfg.n;
    let c = |x: f64| C64::new(x, 0.0);
    let z = |j| PauliString::single(n, j, Pauli::Z);
    let mut h1 = vec![(c(-cfg.gamma * n as f64), PauliString::identity(n))];
    let mut count = vec![(c(0.5 * n as f64), PauliString::identity(n))];
    for j in 0..n {
        h1.push((c(cfg.gamma), z(j)));
        count.push((c(-0.5), z(j)));
    }
    let mut h2 = Vec::new();
    for j in 0..n - 1 {
        h2.push((c(-cfg.j), PauliString::from_ops(n, [(j, Pauli::Z), (j + 1, Pauli::Z)])));
    }
    for j in 0..n {
        h2.push((c(-cfg.h), PauliString::single(n, j, Pauli::X)));
    }
    (PauliSum::from_terms(n, h1), PauliSum::from_terms(n, h2), PauliSum::from_terms(n, count))
}

pub fn tfim_problem(cfg: &TfimConfig) -> Result<LinearProblem> {
    let (h1, h2, o) = tfim_operators(cfg);
    let mut u0 = vec![C64::new(0.0, 0.0); 1 << cfg.n];
    u0[0] = C64::new(1.0, 0.0);
    LinearProblem::new(commuting_groups(&h1), commuting_groups(&h2), o, u0)
}

/// Dense reference value of `u†Ou / u†u`.
pub fn tfim_oracle(cfg: &TfimConfig) -> Result<f64> {
    let (h1, h2, o) = tfim_operators(cfg);
    let a = h1.to_dense()? + h2.to_dense()? * C64::new(0.0, 1.0);
    let mut u0 = CVector::zeros(1 << cfg.n);
    u0[0] = C64::new(1.0, 0.0);
    let u = expm_evolve(&a, &u0, cfg.t)?.u_t;
    Ok((u.adjoint() * o.to_dense()? * &u)[(0, 0)].re / u.norm_squared())
}

#[derive(Clone, Debug, PartialEq)]
pub struct TfimRow {
    pub method: String,
    pub estimate: ObservableEstimate,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TfimResult {
    pub oracle: f64,
    pub rows: Vec<TfimRow>,
}

impl TfimResult {
    pub fn csv(&self) -> String {
        let mut out = format!("{ESTIMATE_CSV_HEADER}\n");
        out.push_str(&format!("oracle,{},0,0,0,0\n", self.oracle));
        for r in &self.rows {
            out.push_str(&r.estimate.csv_row(&r.method, r.seed));
            out.push('\n');
        }
        out
    }

    pub fn method_rows<'a>(&'a self, method: &'a str) -> impl Iterator<Item = &'a TfimRow> + 'a {
        self.rows.iter().filter(move |r| r.method == method)
    }
}

/// Least-squares slope of `log stderr` against `log shots`.
pub fn stderr_slope<'a>(rows: impl Iterator<Item = &'a TfimRow>) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .filter(|r| r.estimate.shots > 0 && r.estimate.stderr > 0.0)
        .map(|r| ((r.estimate.shots as f64).ln(), r.estimate.stderr.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

pub fn run_tfim(cfg: &TfimConfig) -> Result<TfimResult> {
    cfg.validate()?;
    let problem = tfim_problem(cfg)?;
    let oracle = tfim_oracle(cfg)?;
    let mut rows = Vec::new();
    if cfg.exact {
        let s = run_schrodingerization(&problem, cfg.t, &cfg.schrod(Mode::Exact, cfg.seed))?;
        rows.push(TfimRow { method: "schrod".into(), estimate: s, seed: cfg.seed });
        let l = run_lchs(&problem, cfg.t, &cfg.lchs(Mode::Exact, LCHS_SHOTS_PER_CIRCUIT, cfg.seed))?;
        rows.push(TfimRow { method: "lchs".into(), estimate: l, seed: cfg.seed });
        return Ok(TfimResult { oracle, rows });
    }
    for (i, &budget) in cfg.budgets.iter().enumerate() {
        let seed = cfg.seed.wrapping_add(2 * i as u64);
        let s = run_schrodingerization(&problem, cfg.t, &cfg.schrod(Mode::Shots(budget), seed))?;
        rows.push(TfimRow { method: "schrod".into(), estimate: s, seed });
        let seed = seed.wrapping_add(1);
        let l = run_lchs(&problem, cfg.t, &cfg.lchs(Mode::Shots(budget), budget, seed))?;
        rows.push(TfimRow { method: "lchs".into(), estimate: l, seed });
    }
    Ok(TfimResult { oracle, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_modes_match_oracle() {
        let cfg = TfimConfig { exact: true, ..TfimConfig::default() };
        let r = run_tfim(&cfg).unwrap();
        for row in &r.rows {
            assert!((row.estimate.value - r.oracle).abs() < 2e-2, "{}: {} vs {}", row.method, row.estimate.value, r.oracle);
        }
    }

    #[test]
    fn unitary_limit_agrees_within_noise() {
        let cfg = TfimConfig { gamma: 0.0, budgets: vec![4000], ..TfimConfig::default() };
        let r = run_tfim(&cfg).unwrap();
        for row in &r.rows {
            let e = &row.estimate;
            assert!((e.value - r.oracle).abs() < 4.0 * e.stderr + 1e-3, "{}: {e}", row.method);
        }
        assert_eq!(r, run_tfim(&cfg).unwrap());
    }

    #[test]
    fn slope_of_exact_power_law() {
        let rows: Vec<TfimRow> = [100usize, 1000, 10000]
            .iter()
            .map(|&s| TfimRow {
                method: "x".into(),
                estimate: ObservableEstimate { value: 0.0, stderr: 1.0 / (s as f64).sqrt(), circuits: 1, shots: s, unnormalized: None },
                seed: 0,
            })
            .collect();
        assert!((stderr_slope(rows.iter()).unwrap() + 0.5).abs() < 1e-12);
    }
}
