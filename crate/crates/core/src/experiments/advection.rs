//! Two-dimensional periodic advection `u_t + c·∇u = 0` with centred differences.
//! The generator is anti-Hermitian, so the embedded dynamics is plain Hamiltonian simulation.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::circuits::{compile, resource_report, trotter_fragment_circuit, Circuit, Preset, ProductFormula, ResourceReport};
use crate::discretize::{centered_difference, Grid1D};
use crate::dynamics::Mode;
use crate::embed::{codewords, tridiagonal_fragments, EncodingScheme, VECTOR_QUBIT_LIMIT};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::simulate::StateVector;
use crate::C64;

/// Largest leakage out of the code space tolerated before the run is aborted.
pub const LEAKAGE_LIMIT: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub center: (f64, f64),
    pub sigma: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdvectionConfig {
    pub n: usize,
    pub velocity: (f64, f64),
    pub times: Vec<f64>,
    /// Trotter steps per snapshot.
    pub steps: usize,
    pub formula: ProductFormula,
    pub encoding: EncodingScheme,
    pub mode: Mode,
    pub seed: u64,
    pub peaks: Vec<Peak>,
}

impl Default for AdvectionConfig {
    fn default() -> Self {
        AdvectionConfig {
            n: 10,
            velocity: (1.0, 1.0),
            times: vec![0.0, 0.05, 0.10, 0.15, 0.20],
            steps: 2,
            formula: ProductFormula::second_order(),
            encoding: EncodingScheme::OneHot,
            mode: Mode::Exact,
            seed: 0,
            peaks: vec![
                Peak { center: (0.25, 0.25), sigma: 0.1 },
                Peak { center: (0.75, 0.5), sigma: 0.1 },
            ],
        }
    }
}

impl AdvectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::invalid("advection needs at least 3 grid points per dimension"));
        }
        if self.steps == 0 {
            return Err(Error::invalid("Trotter steps must be positive"));
        }
        if self.times.iter().any(|t| !(*t >= 0.0)) {
            return Err(Error::invalid("snapshot times must be non-negative"));
        }
        if self.peaks.is_empty() || self.peaks.iter().any(|p| !(p.sigma > 0.0)) {
            return Err(Error::invalid("initial peaks need positive widths"));
        }
        if self.mode == Mode::Shots(0) {
            return Err(Error::invalid("shot count must be positive"));
        }
        let q = self.encoding.qubits(self.n);
        if 2 * q > VECTOR_QUBIT_LIMIT {
            return Err(Error::DimensionGuard { what: format!("{}-qubit advection state", 2 * q), limit: VECTOR_QUBIT_LIMIT });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    /// Probability on the grid, index `i2 * n + i1`.
    pub prob: Vec<f64>,
    pub leakage: f64,
    /// Translation of the initial density that best matches this snapshot.
    pub displacement: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdvectionResult {
    pub n: usize,
    pub snapshots: Vec<Snapshot>,
    /// Resources of the last snapshot's circuit, RXX and CX presets.
    pub gates_rxx: ResourceReport,
    pub gates_cx: ResourceReport,
}

pub const ADVECTION_CSV_HEADER: &str = "t,x1,x2,prob";

impl AdvectionResult {
    pub fn csv(&self) -> String {
        let mut out = String::from(ADVECTION_CSV_HEADER);
        out.push('\n');
        for s in &self.snapshots {
            for i2 in 0..self.n {
                for i1 in 0..self.n {
                    let (x1, x2) = (i1 as f64 / self.n as f64, i2 as f64 / self.n as f64);
                    out.push_str(&format!("{},{x1},{x2},{}\n", s.t, s.prob[i2 * self.n + i1]));
                }
            }
        }
        out
    }

    /// Largest displacement error in grid cells against the exact drift `c t mod 1`.
    pub fn drift_error_cells(&self, velocity: (f64, f64)) -> f64 {
        let wrap = |d: f64| d - d.round();
        self.snapshots
            .iter()
            .map(|s| {
                let e1 = wrap(s.displacement.0 - velocity.0 * s.t).abs();
                let e2 = wrap(s.displacement.1 - velocity.1 * s.t).abs();
                e1.max(e2) * self.n as f64
            })
            .fold(0.0, f64::max)
    }
}

fn periodic_gaussian(x: (f64, f64), p: &Peak) -> f64 {
    let d = |a: f64, b: f64| {
        let t = (a - b).rem_euclid(1.0);
        t.min(1.0 - t)
    };
    let (d1, d2) = (d(x.0, p.center.0), d(x.1, p.center.1));
    (-(d1 * d1 + d2 * d2) / (2.0 * p.sigma * p.sigma)).exp()
}

/// Normalised initial amplitudes, index `i2 * n + i1`.
pub fn initial_grid(cfg: &AdvectionConfig) -> Vec<f64> {
    let n = cfg.n;
    let mut u: Vec<f64> = (0..n * n)
        .map(|k| {
            let x = ((k % n) as f64 / n as f64, (k / n) as f64 / n as f64);
            cfg.peaks.iter().map(|p| periodic_gaussian(x, p)).sum()
        })
        .collect();
    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    u.iter_mut().for_each(|v| *v /= norm);
    u
}

/// Fragments of the embedded Hamiltonian `H` with `u(t) = exp(-iHt) u0`, x1 on the low register.
/// Fragment `k` of both axes is merged; they act on disjoint qubits.
pub fn advection_fragments(cfg: &AdvectionConfig) -> Result<Vec<PauliSum>> {
    let grid = Grid1D::periodic(0.0, 1.0, cfg.n)?;
    let q = cfg.encoding.qubits(cfg.n);
    let axis = |c: f64| -> Result<Vec<PauliSum>> {
        let a = centered_difference(&grid, |_| c, |_| 0.0)?;
        // A = iH2, so exp(AT) = exp(-iT(-H2)).
        let h = a.cartesian().1.scale(C64::new(-1.0, 0.0));
        tridiagonal_fragments(cfg.encoding, &h)
    };
    let f1 = axis(cfg.velocity.0)?;
    let f2 = axis(cfg.velocity.1)?;
    let k = f1.len().max(f2.len());
    Ok((0..k)
        .map(|i| {
            let lo = f1.get(i).map(|f| f.place(0, 2 * q)).unwrap_or_else(|| PauliSum::zero(2 * q));
            let hi = f2.get(i).map(|f| f.place(q, 2 * q)).unwrap_or_else(|| PauliSum::zero(2 * q));
            &lo + &hi
        })
        .filter(|f| !f.is_empty())
        .collect())
}

pub fn advection_circuit(cfg: &AdvectionConfig, t: f64) -> Result<Circuit> {
    let q = cfg.encoding.qubits(cfg.n);
    let c = trotter_fragment_circuit(&advection_fragments(cfg)?, t, &cfg.formula, cfg.steps)?;
    Ok(Circuit { registers: Vec::new(), ..c }.with_register("x1", 0, q).with_register("x2", q, q))
}

/// Shift `d` maximising `Σ_k prob_k ρ0(x_k − d)` with `ρ0` the continuous initial density,
/// scanned on a grid of `SHIFT_RESOLUTION` points per cell.
fn matched_shift(prob: &[f64], cfg: &AdvectionConfig) -> (f64, f64) {
    let n = cfg.n;
    let m = SHIFT_RESOLUTION * n;
    let rho = |x: (f64, f64)| cfg.peaks.iter().map(|p| periodic_gaussian(x, p)).sum::<f64>().powi(2);
    let cells: Vec<(f64, (f64, f64))> = prob
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.0)
        .map(|(k, &p)| (p, ((k % n) as f64 / n as f64, (k / n) as f64 / n as f64)))
        .collect();
    let mut best = (f64::NEG_INFINITY, (0.0, 0.0));
    for a in 0..m {
        for b in 0..m {
            let d = (a as f64 / m as f64, b as f64 / m as f64);
            let score: f64 = cells.iter().map(|&(p, x)| p * rho((x.0 - d.0, x.1 - d.1))).sum();
            if score > best.0 {
                best = (score, d);
            }
        }
    }
    best.1
}

const SHIFT_RESOLUTION: usize = 20;

pub fn run_advection(cfg: &AdvectionConfig) -> Result<AdvectionResult> {
    cfg.validate()?;
    let n = cfg.n;
    let book = codewords(cfg.encoding, n)?;
    let q = book.q;
    let words: Vec<usize> = book.codewords.iter().map(|w| w[0] as usize).collect();
    let index: Vec<usize> = (0..n * n).map(|k| words[k % n] | (words[k / n] << q)).collect();
    let lookup: HashMap<usize, usize> = index.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let u0 = initial_grid(cfg);
    let mut amps = vec![C64::new(0.0, 0.0); 1 << (2 * q)];
    for (k, &i) in index.iter().enumerate() {
        amps[i] = C64::new(u0[k], 0.0);
    }
    let start = StateVector::from_amplitudes(amps)?;

    let mut snapshots = Vec::new();
    let mut last = None;
    for (si, &t) in cfg.times.iter().enumerate() {
        let circ = advection_circuit(cfg, t)?;
        let mut s = start.clone();
        s.apply_circuit(&circ)?;
        let exact: Vec<f64> = index.iter().map(|&i| s.amplitudes()[i].norm_sqr()).collect();
        let leakage = (1.0 - exact.iter().sum::<f64>()).abs();
        if leakage > LEAKAGE_LIMIT {
            return Err(Error::numerical(format!("leakage {leakage:e} out of the code space at t = {t}")));
        }
        let prob = match cfg.mode {
            Mode::Exact => exact,
            Mode::Shots(shots) => {
                let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed.wrapping_add(si as u64));
                let mut counts = vec![0.0; n * n];
                for i in s.sample_indices(shots, &mut rng) {
                    if let Some(&k) = lookup.get(&i) {
                        counts[k] += 1.0 / shots as f64;
                    }
                }
                counts
            }
        };
        let displacement = matched_shift(&prob, cfg);
        snapshots.push(Snapshot { t, prob, leakage, displacement });
        last = Some(circ);
    }
    let circ = last.ok_or_else(|| Error::invalid("no snapshot times"))?;
    Ok(AdvectionResult {
        n,
        snapshots,
        gates_rxx: resource_report(&compile(&circ, Preset::Rxx)?)?,
        gates_cx: resource_report(&compile(&circ, Preset::Cx)?)?,
    })
}
