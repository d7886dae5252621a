//! Warped-phase pipeline: `v(t, p) = e^{-|p|} u(t)` on an auxiliary register,
//! evolved under `H_S = H̃1 ⊗ H_F − H̃2 ⊗ I` in the Fourier frame of `p`.
//!
//! Register layout: the `n_p` auxiliary qubits are the low bits, the solution
//! register sits above them. The auxiliary grid is cell centred, so `p > 0`
//! is exactly the upper half of the index range.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::{diagonal_values, LinearProblem, Mode, ObservableEstimate};
use crate::circuits::formula::trotter_fragment_circuit;
use crate::circuits::qft::{inverse_qft, laplace_prep, p_grid, qft};
use crate::circuits::{Circuit, ProductFormula};
use crate::discretize::{fourier_frequencies, frequency_vector};
use crate::embed::VECTOR_QUBIT_LIMIT;
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::simulate::StateVector;
use crate::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct SchrodConfig {
    pub n_p: usize,
    /// Half-width `R` of the auxiliary domain `[-R, R]`.
    pub half_width: f64,
    pub formula: ProductFormula,
    pub steps: usize,
    pub mode: Mode,
    pub seed: u64,
    /// Subtracted from `H̃1` when it is not negative semidefinite; undone in the unnormalised value.
    pub decay_shift: f64,
}

impl SchrodConfig {
    pub fn new(n_p: usize, half_width: f64) -> Self {
        SchrodConfig {
            n_p,
            half_width,
            formula: ProductFormula::second_order(),
            steps: 20,
            mode: Mode::Exact,
            seed: 0,
            decay_shift: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_p < 2 {
            return Err(Error::invalid(format!("need at least 2 auxiliary qubits, got {}", self.n_p)));
        }
        if !(self.half_width > 0.0) {
            return Err(Error::invalid(format!("auxiliary half-width must be positive, got {}", self.half_width)));
        }
        if self.steps == 0 {
            return Err(Error::invalid("Trotter steps must be positive"));
        }
        if self.decay_shift < 0.0 {
            return Err(Error::invalid("decay shift must be non-negative"));
        }
        Ok(())
    }

    /// Diagonal of `H_F = (π/R)·diag(Fourier frequencies)`.
    pub fn hf_diagonal(&self) -> Vec<f64> {
        let k = std::f64::consts::PI / self.half_width;
        frequency_vector(self.n_p).into_iter().map(|m| k * m).collect()
    }
}

/// `H̃1 ⊗ H_F − H̃2 ⊗ I` with the auxiliary register on the low qubits.
pub fn build_hs(h1: &PauliSum, h2: &PauliSum, n_p: usize, half_width: f64) -> Result<PauliSum> {
    if h1.n_qubits() != h2.n_qubits() {
        return Err(Error::QubitMismatch { left: h1.n_qubits(), right: h2.n_qubits() });
    }
    let hf = fourier_frequencies(n_p).scale_real(std::f64::consts::PI / half_width);
    let a = h1.tensor(&hf);
    let b = h2.tensor(&PauliSum::identity(n_p, 1.0));
    Ok(&a - &b)
}

/// Trotter fragments of `H_S`: every `F ⊗ H_F` for `F` in `H̃1`, then every `−F ⊗ I` for `F` in `H̃2`.
pub fn hs_fragments(problem: &LinearProblem, cfg: &SchrodConfig) -> Vec<PauliSum> {
    let hf = fourier_frequencies(cfg.n_p).scale_real(std::f64::consts::PI / cfg.half_width);
    let id = PauliSum::identity(cfg.n_p, -1.0);
    problem
        .shifted_h1(cfg.decay_shift)
        .iter()
        .map(|f| f.tensor(&hf))
        .chain(problem.h2.iter().map(|f| f.tensor(&id)))
        .collect()
}

/// Gate-level circuit: Laplace preparation and inverse QFT on `p`, Trotterised
/// `exp(-i T H_S)`, QFT on `p`. The solution register is left for state injection.
pub fn schrod_circuit(problem: &LinearProblem, t: f64, cfg: &SchrodConfig) -> Result<Circuit> {
    cfg.validate()?;
    let n = problem.n_u + cfg.n_p;
    let mut c = Circuit::new(n).with_register("p", 0, cfg.n_p).with_register("u", cfg.n_p, problem.n_u);
    c.append_at(&laplace_prep(cfg.n_p, cfg.half_width)?, 0);
    c.append_at(&inverse_qft(cfg.n_p), 0);
    c.append(&trotter_fragment_circuit(&hs_fragments(problem, cfg), t, &cfg.formula, cfg.steps)?);
    c.append_at(&qft(cfg.n_p), 0);
    Ok(c)
}

fn initial_state(problem: &LinearProblem, cfg: &SchrodConfig) -> Result<StateVector> {
    let n = problem.n_u + cfg.n_p;
    if n > VECTOR_QUBIT_LIMIT {
        return Err(Error::DimensionGuard { what: "warped-phase state".into(), limit: VECTOR_QUBIT_LIMIT });
    }
    let norm = problem.u0_norm();
    let np = 1usize << cfg.n_p;
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    for (u, a) in problem.u0.iter().enumerate() {
        amps[u * np] = a / norm;
    }
    let mut s = StateVector::from_amplitudes(amps)?;
    let mut prep = Circuit::new(n);
    prep.append_at(&laplace_prep(cfg.n_p, cfg.half_width)?, 0);
    prep.append_at(&inverse_qft(cfg.n_p), 0);
    s.apply_circuit(&prep)?;
    Ok(s)
}

/// Product-formula evolution with each `P ⊗ H_F` term applied as one weighted rotation.
fn evolve_fused(s: &mut StateVector, problem: &LinearProblem, t: f64, cfg: &SchrodConfig) -> Result<()> {
    let n = problem.n_u + cfg.n_p;
    let hf = cfg.hf_diagonal();
    let pmask = (1usize << cfg.n_p) - 1;
    let h1 = problem.shifted_h1(cfg.decay_shift);
    let n1 = h1.len();
    let tau = t / cfg.steps as f64;
    for (idx, a) in cfg.formula.schedule(n1 + problem.h2.len(), cfg.steps) {
        let (frag, weighted) = if idx < n1 { (&h1[idx], true) } else { (&problem.h2[idx - n1], false) };
        for (c, p) in frag.terms() {
            let masks = p.place(cfg.n_p, n).masks().expect("narrow register");
            if weighted {
                s.apply_weighted_pauli_rotation(&masks, 2.0 * a * tau * c.re, |b| hf[b & pmask]);
            } else {
                s.apply_pauli_rotation(&masks, -2.0 * a * tau * c.re);
            }
        }
    }
    Ok(())
}

/// Final warped-phase state, before measurement.
pub fn final_state(problem: &LinearProblem, t: f64, cfg: &SchrodConfig) -> Result<StateVector> {
    cfg.validate()?;
    let mut s = initial_state(problem, cfg)?;
    evolve_fused(&mut s, problem, t, cfg)?;
    let mut fin = Circuit::new(s.n_qubits());
    fin.append_at(&qft(cfg.n_p), 0);
    s.apply_circuit(&fin)?;
    Ok(s)
}

/// Post-selected mass on `p > 0` and `Tr(Õ ρ_u)/mass`.
pub fn postselect_estimate(state: &StateVector, o: &PauliSum, n_p: usize) -> Result<(f64, f64)> {
    let n_u = state.n_qubits().checked_sub(n_p).ok_or_else(|| Error::invalid("auxiliary register too wide"))?;
    if o.n_qubits() != n_u {
        return Err(Error::QubitMismatch { left: n_u, right: o.n_qubits() });
    }
    if !o.is_hermitian(1e-12) {
        return Err(Error::invalid("observable must be Hermitian"));
    }
    let np = 1usize << n_p;
    let amps = state.amplitudes();
    let mass: f64 = amps
        .iter()
        .enumerate()
        .filter(|(i, _)| i % np >= np / 2)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    if mass <= 1e-300 {
        return Err(Error::numerical("no post-selection mass on p > 0; enlarge the auxiliary domain"));
    }
    let mut acc = C64::new(0.0, 0.0);
    for (c, s) in o.terms() {
        let m = s.masks().expect("narrow register");
        let mut part = C64::new(0.0, 0.0);
        for u in 0..1usize << n_u {
            let (ph, u2) = m.act(u);
            for k in np / 2..np {
                part += amps[u2 * np + k].conj() * ph * amps[u * np + k];
            }
        }
        acc += c * part;
    }
    Ok((mass, acc.re / mass))
}

/// `∫_0^∞ v(T, p) dp` as a midpoint sum; recovers `u(T)` from the final state.
pub fn recover_solution(state: &StateVector, n_p: usize, half_width: f64, u0_norm: f64) -> Vec<C64> {
    let np = 1usize << n_p;
    let dp = 2.0 * half_width / np as f64;
    let z = p_grid(n_p, half_width).iter().map(|p| (-2.0 * p.abs()).exp()).sum::<f64>().sqrt();
    let n_u = state.n_qubits() - n_p;
    (0..1usize << n_u)
        .map(|u| (np / 2..np).map(|k| state.amplitudes()[u * np + k]).sum::<C64>() * (z * u0_norm * dp))
        .collect()
}

/// Estimate of `u(T)†Ou(T)/u(T)†u(T)`.
pub fn run_schrodingerization(problem: &LinearProblem, t: f64, cfg: &SchrodConfig) -> Result<ObservableEstimate> {
    let s = final_state(problem, t, cfg)?;
    match cfg.mode {
        Mode::Exact => {
            let (mass, value) = postselect_estimate(&s, &problem.observable, cfg.n_p)?;
            let unnorm = 2.0 * problem.u0_norm().powi(2) * mass * value * (2.0 * cfg.decay_shift * t).exp();
            Ok(ObservableEstimate::exact(value, Some(unnorm), 1))
        }
        Mode::Shots(shots) => {
            if shots == 0 {
                return Err(Error::invalid("shot count must be positive"));
            }
            let ovals = diagonal_values(&problem.observable)?;
            let np = 1usize << cfg.n_p;
            let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
            let kept: Vec<f64> = s
                .sample_indices(shots, &mut rng)
                .into_iter()
                .filter(|i| i % np >= np / 2)
                .map(|i| ovals[i / np])
                .collect();
            if kept.is_empty() {
                return Err(Error::numerical("no shots survived post-selection; enlarge the auxiliary domain"));
            }
            let m = kept.len() as f64;
            let mean = kept.iter().sum::<f64>() / m;
            let var = if kept.len() > 1 { kept.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0) } else { 0.0 };
            Ok(ObservableEstimate { value: mean, stderr: (var / m).sqrt(), circuits: 1, shots, unnormalized: None })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{cartesian_split, upwind, Grid1D};
    use crate::embed::{embed_tridiagonal, tridiagonal_fragments, EncodingScheme};
    use crate::linalg::{c, CVector};
    use crate::pauli::PauliString;
    use crate::simulate::expm_evolve;

    fn scalar_decay(rate: f64) -> LinearProblem {
        let h1 = vec![PauliSum::identity(1, -rate)];
        let o = PauliSum::from_letters(&[(1.0, "I")]).unwrap();
        LinearProblem::new(h1, vec![], o, vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap()
    }

    #[test]
    fn scalar_decay_matches_closed_form() {
        let mut cfg = SchrodConfig::new(8, 6.0);
        cfg.steps = 1;
        let t = 0.7;
        let est = run_schrodingerization(&scalar_decay(1.0), t, &cfg).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);
        let want = (-2.0 * t).exp();
        let got = est.unnormalized.unwrap();
        assert!((got - want).abs() < 5e-3 * want, "{got} vs {want}");
    }

    #[test]
    fn initial_mass_is_one_half() {
        let s = initial_state(&scalar_decay(0.0), &SchrodConfig::new(5, 3.0)).unwrap();
        let mut fin = Circuit::new(s.n_qubits());
        fin.append_at(&qft(5), 0);
        let mut s = s;
        s.apply_circuit(&fin).unwrap();
        let (mass, _) = postselect_estimate(&s, &PauliSum::identity(1, 1.0), 5).unwrap();
        assert!((mass - 0.5).abs() < 1e-12);
    }

    #[test]
    fn hermitian_case_reduces_to_hamiltonian_simulation() {
        let h2 = PauliSum::from_letters(&[(0.8, "XI"), (0.5, "ZZ"), (-0.3, "IY")]).unwrap();
        let o = PauliSum::from_letters(&[(1.0, "ZI"), (0.4, "XX")]).unwrap();
        let u0 = vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0), c(0.0, 0.0)];
        let problem = LinearProblem::new(vec![], super::super::commuting_groups(&h2), o.clone(), u0.clone()).unwrap();
        let mut cfg = SchrodConfig::new(4, 3.0);
        cfg.steps = 100;
        let est = run_schrodingerization(&problem, 0.9, &cfg).unwrap();
        let a = h2.to_dense().unwrap() * c(0.0, 1.0);
        let v = expm_evolve(&a, &CVector::from_vec(u0), 0.9).unwrap().u_t;
        let want = (v.adjoint() * o.to_dense().unwrap() * &v)[(0, 0)].re;
        assert!((est.value - want).abs() < 1e-4, "{} vs {want}", est.value);
    }

    #[test]
    fn fused_kernel_matches_gate_level_circuit() {
        let g = Grid1D::inflow(0.0, 1.0, 4).unwrap();
        let a = upwind(&g, |_| 1.0).unwrap();
        let (h1, h2) = a.cartesian();
        let problem = LinearProblem::new(
            tridiagonal_fragments(EncodingScheme::StdBinary, &h1).unwrap(),
            tridiagonal_fragments(EncodingScheme::StdBinary, &h2).unwrap(),
            PauliSum::from_letters(&[(1.0, "ZI")]).unwrap(),
            vec![c(0.3, 0.0), c(0.5, 0.0), c(0.7, 0.1), c(0.2, 0.0)],
        )
        .unwrap();
        let mut cfg = SchrodConfig::new(4, 3.0);
        cfg.steps = 3;
        let fused = final_state(&problem, 0.4, &cfg).unwrap();
        let circ = schrod_circuit(&problem, 0.4, &cfg).unwrap();
        let norm = problem.u0_norm();
        let mut amps = vec![c(0.0, 0.0); 1 << circ.n_qubits];
        for (u, z) in problem.u0.iter().enumerate() {
            amps[u << cfg.n_p] = z / norm;
        }
        let mut s = StateVector::from_amplitudes(amps).unwrap();
        s.apply_circuit(&circ).unwrap();
        let diff = s.amplitudes().iter().zip(fused.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-10, "{diff}");
    }

    #[test]
    fn upwind_pipeline_matches_oracle_and_recovers_solution() {
        let g = Grid1D::inflow(0.0, 1.0, 4).unwrap();
        let a = upwind(&g, |_| 1.0).unwrap();
        let (h1, h2) = a.cartesian();
        let u0: Vec<C64> = g.points().iter().map(|x| c((-10.0 * (x - 0.4).powi(2)).exp(), 0.0)).collect();
        let o = PauliSum::from_terms(2, [(c(0.5, 0.0), PauliString::identity(2)), (c(-0.5, 0.0), PauliString::from_letters("ZI").unwrap())]);
        let problem = LinearProblem::new(
            tridiagonal_fragments(EncodingScheme::StdBinary, &h1).unwrap(),
            tridiagonal_fragments(EncodingScheme::StdBinary, &h2).unwrap(),
            o.clone(),
            u0.clone(),
        )
        .unwrap();
        let t = 0.3;
        let mut cfg = SchrodConfig::new(9, 6.0);
        cfg.steps = 200;
        let est = run_schrodingerization(&problem, t, &cfg).unwrap();
        let dense = a.to_dense();
        let exact = expm_evolve(&dense, &CVector::from_vec(u0.clone()), t).unwrap().u_t;
        let od = o.to_dense().unwrap();
        let want = (exact.adjoint() * &od * &exact)[(0, 0)].re / exact.norm_squared();
        assert!((est.value - want).abs() < 1e-2 * want.abs(), "{} vs {want}", est.value);
        let s = final_state(&problem, t, &cfg).unwrap();
        let rec = recover_solution(&s, cfg.n_p, cfg.half_width, problem.u0_norm());
        for (r, e) in rec.iter().zip(exact.iter()) {
            assert!((r - e).norm() < 2e-2 * exact.norm(), "{r} vs {e}");
        }
        let parts = cartesian_split(&dense).unwrap();
        assert_eq!(parts.stable, Some(true));
        let hs = build_hs(&embed_tridiagonal(EncodingScheme::StdBinary, &h1).unwrap(), &embed_tridiagonal(EncodingScheme::StdBinary, &h2).unwrap(), 9, 6.0).unwrap();
        assert!(hs.is_hermitian(1e-12));
    }

    #[test]
    fn shot_mode_is_unbiased_and_reproducible() {
        let h2 = PauliSum::from_letters(&[(0.8, "XI"), (0.5, "IX")]).unwrap();
        let h1 = PauliSum::from_letters(&[(-0.3, "II"), (0.3, "ZI")]).unwrap();
        let o = PauliSum::from_letters(&[(0.5, "II"), (-0.5, "IZ")]).unwrap();
        let u0 = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let problem = LinearProblem::new(vec![h1], vec![h2], o, u0).unwrap();
        let mut cfg = SchrodConfig::new(6, 5.0);
        let exact = run_schrodingerization(&problem, 0.5, &cfg).unwrap().value;
        cfg.mode = Mode::Shots(4000);
        cfg.seed = 5;
        let a = run_schrodingerization(&problem, 0.5, &cfg).unwrap();
        assert_eq!(a, run_schrodingerization(&problem, 0.5, &cfg).unwrap());
        assert!((a.value - exact).abs() < 4.0 * a.stderr);
    }

    #[test]
    fn validation() {
        assert!(SchrodConfig::new(1, 1.0).validate().is_err());
        assert!(SchrodConfig::new(3, 0.0).validate().is_err());
        let s = StateVector::basis(3, 0);
        assert!(postselect_estimate(&s, &PauliSum::identity(1, 1.0), 2).is_err());
    }
}
