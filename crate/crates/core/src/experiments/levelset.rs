//! Level-set form of `u_t + G(u)(u_{x1} + u_{x2}) = 0`: `φ(0, x, q) = δ(q − u0(x))`
//! is transported with velocity `G(q)(1, 1)` in the Fourier basis of `x`,
//! where the generator `2π(D_{x1} ⊗ I ⊗ D̃_q + I ⊗ D_{x2} ⊗ D̃_q)` is diagonal.

use std::f64::consts::PI;

use crate::circuits::{inverse_qft, qft, trotter_fragment_circuit, Circuit, ProductFormula};
use crate::discretize::fourier_frequencies;
use crate::dynamics::commuting_groups;
use crate::embed::{codewords, embed_diagonal, tensor_embed, EncodingScheme, RegisterLayout, VECTOR_QUBIT_LIMIT};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::simulate::{characteristics_solve, StateVector};
use crate::C64;

pub type ScalarField = fn(f64, f64) -> f64;
pub type Flux = fn(f64) -> f64;

pub fn default_g(u: f64) -> f64 {
    u.powi(3) * (1.0 - u.powi(4))
}

pub fn default_u0(x1: f64, x2: f64) -> f64 {
    0.4 * ((2.0 * PI * x1).sin() + (2.0 * PI * x2).sin())
}

#[derive(Clone, Debug)]
pub struct LevelsetConfig {
    /// Qubits per spatial axis; `N_x = 2^n_x`.
    pub n_x: usize,
    pub n_q: usize,
    pub t: f64,
    pub encoding: EncodingScheme,
    pub steps: usize,
    pub g: Flux,
    pub u0: ScalarField,
}

impl Default for LevelsetConfig {
    fn default() -> Self {
        LevelsetConfig { n_x: 5, n_q: 32, t: 0.25, encoding: EncodingScheme::StdBinary, steps: 1, g: default_g, u0: default_u0 }
    }
}

impl LevelsetConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_x == 0 {
            return Err(Error::invalid("need at least one qubit per spatial axis"));
        }
        if self.n_q < 2 {
            return Err(Error::invalid("need at least two q grid points"));
        }
        if !(self.t >= 0.0) {
            return Err(Error::invalid("final time must be non-negative"));
        }
        if self.steps == 0 {
            return Err(Error::invalid("Trotter steps must be positive"));
        }
        Ok(())
    }

    /// Grid `q_j = −1 + 2j/(N_q − 1)`, endpoints included.
    pub fn q_grid(&self) -> Vec<f64> {
        (0..self.n_q).map(|j| -1.0 + 2.0 * j as f64 / (self.n_q - 1) as f64).collect()
    }

    pub fn q_spacing(&self) -> f64 {
        2.0 / (self.n_q - 1) as f64
    }

    /// Qubit layout, low to high: `x1`, `x2`, `q`.
    pub fn layout(&self) -> Result<RegisterLayout> {
        RegisterLayout::new(&[("x1", self.n_x), ("x2", self.n_x), ("q", self.encoding.qubits(self.n_q))])
    }
}

/// Embedded diagonal generator `H̃_d`.
pub fn levelset_hamiltonian(cfg: &LevelsetConfig) -> Result<PauliSum> {
    let layout = cfg.layout()?;
    let gq: Vec<f64> = cfg.q_grid().iter().map(|&q| (cfg.g)(q)).collect();
    let dq = embed_diagonal(cfg.encoding, &gq)?;
    let dx = fourier_frequencies(cfg.n_x);
    let a = tensor_embed(&layout, &[("x1", &dx), ("q", &dq)])?;
    let b = tensor_embed(&layout, &[("x2", &dx), ("q", &dq)])?;
    Ok((&a + &b).scale_real(2.0 * PI))
}

/// Rotations of `exp(-iT H̃_d)`; every term is diagonal so any step count is exact.
pub fn levelset_evolution(cfg: &LevelsetConfig) -> Result<Circuit> {
    let h = levelset_hamiltonian(cfg)?;
    if h.is_empty() {
        return Ok(Circuit::new(h.n_qubits()));
    }
    trotter_fragment_circuit(&commuting_groups(&h), cfg.t, &ProductFormula::second_order(), cfg.steps)
}

/// Full pipeline: transform to frequencies, evolve, transform back.
pub fn levelset_circuit(cfg: &LevelsetConfig) -> Result<Circuit> {
    let layout = cfg.layout()?;
    let n = layout.total();
    let (o1, _) = layout.block("x1")?;
    let (o2, _) = layout.block("x2")?;
    let (oq, wq) = layout.block("q")?;
    let mut c = Circuit::new(n).with_register("x1", o1, cfg.n_x).with_register("x2", o2, cfg.n_x).with_register("q", oq, wq);
    c.append_at(&inverse_qft(cfg.n_x), o1);
    c.append_at(&inverse_qft(cfg.n_x), o2);
    c.append(&levelset_evolution(cfg)?);
    c.append_at(&qft(cfg.n_x), o1);
    c.append_at(&qft(cfg.n_x), o2);
    Ok(c)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelsetResult {
    pub n_x: usize,
    pub q_spacing: f64,
    /// Per grid point, index `i2 * N_x + i1`.
    pub decoded: Vec<f64>,
    pub oracle: Vec<f64>,
    pub leakage: f64,
}

pub const LEVELSET_CSV_HEADER: &str = "x1,x2,u_decoded,u_oracle,flag";

impl LevelsetResult {
    fn side(&self) -> usize {
        1 << self.n_x
    }

    /// Whether each point decodes further than one q-spacing from the oracle.
    pub fn flags(&self) -> Vec<bool> {
        self.decoded.iter().zip(&self.oracle).map(|(d, o)| (d - o).abs() > self.q_spacing * (1.0 + 1e-9)).collect()
    }

    pub fn fraction_within_one_spacing(&self) -> f64 {
        let f = self.flags();
        f.iter().filter(|b| !**b).count() as f64 / f.len() as f64
    }

    pub fn csv(&self) -> String {
        let n = self.side();
        let mut out = String::from(LEVELSET_CSV_HEADER);
        out.push('\n');
        for (k, flag) in self.flags().into_iter().enumerate() {
            let (x1, x2) = ((k % n) as f64 / n as f64, (k / n) as f64 / n as f64);
            out.push_str(&format!("{x1},{x2},{},{},{}\n", self.decoded[k], self.oracle[k], u8::from(flag)));
        }
        out
    }
}

/// Evolves the level-set state and decodes `u(T, x) = argmax_q |φ(T, x, q)|²`.
pub fn run_levelset(cfg: &LevelsetConfig) -> Result<LevelsetResult> {
    cfg.validate()?;
    let layout = cfg.layout()?;
    if layout.total() > VECTOR_QUBIT_LIMIT {
        return Err(Error::DimensionGuard { what: format!("{}-qubit level-set state", layout.total()), limit: VECTOR_QUBIT_LIMIT });
    }
    let nx = 1usize << cfg.n_x;
    let (oq, _) = layout.block("q")?;
    let book = codewords(cfg.encoding, cfg.n_q)?;
    let words: Vec<usize> = book.codewords.iter().map(|w| w[0] as usize).collect();
    let qs = cfg.q_grid();
    let nearest = |u: f64| {
        qs.iter()
            .enumerate()
            .min_by(|a, b| (a.1 - u).abs().total_cmp(&(b.1 - u).abs()))
            .map(|(j, _)| j)
            .expect("non-empty grid")
    };
    let points: Vec<(f64, f64)> = (0..nx * nx).map(|k| ((k % nx) as f64 / nx as f64, (k / nx) as f64 / nx as f64)).collect();
    let mut amps = vec![C64::new(0.0, 0.0); 1 << layout.total()];
    let a = 1.0 / nx as f64;
    for (k, &(x1, x2)) in points.iter().enumerate() {
        amps[k | (words[nearest((cfg.u0)(x1, x2))] << oq)] = C64::new(a, 0.0);
    }
    let mut s = StateVector::from_amplitudes(amps)?;
    s.apply_circuit(&levelset_circuit(cfg)?)?;

    let amps = s.amplitudes();
    let mut inside = 0.0;
    let decoded: Vec<f64> = (0..nx * nx)
        .map(|k| {
            let probs: Vec<f64> = words.iter().map(|&w| amps[k | (w << oq)].norm_sqr()).collect();
            inside += probs.iter().sum::<f64>();
            let j = probs.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(j, _)| j).expect("non-empty grid");
            qs[j]
        })
        .collect();
    let g = cfg.g;
    let u0 = cfg.u0;
    let oracle = characteristics_solve(&|x1, x2| u0(x1, x2), &|u| g(u), &points, cfg.t)?;
    Ok(LevelsetResult { n_x: cfg.n_x, q_spacing: cfg.q_spacing(), decoded, oracle, leakage: (1.0 - inside).abs() })
}
