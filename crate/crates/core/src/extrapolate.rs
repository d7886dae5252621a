//! Richardson extrapolation in the Trotter step `s = s0/r` towards `s → 0`.

use nalgebra::{DMatrix, DVector};

use crate::dynamics::ObservableEstimate;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ExtrapolationPlan {
    pub m: usize,
    /// Leading error exponent.
    pub p: usize,
    /// Spacing of the error exponents.
    pub sigma: usize,
    pub r_scale: usize,
    pub s0: f64,
    /// Strictly increasing step divisors.
    pub r: Vec<usize>,
    pub b: Vec<f64>,
    /// 2-norm condition number of the annihilation system.
    pub condition: f64,
}

pub const PLAN_CSV_HEADER: &str = "m,r_scale,node_k,r_k,b_k";

/// Chebyshev-like divisors `r_scale·⌈√8 m / (π sin(π(2k−1)/(8m)))⌉`, sorted ascending.
pub fn richardson_nodes(m: usize, r_scale: usize) -> Vec<usize> {
    let mf = m as f64;
    let mut r: Vec<usize> = (1..=m)
        .map(|k| {
            let s = (std::f64::consts::PI * (2 * k - 1) as f64 / (8.0 * mf)).sin();
            r_scale * (8f64.sqrt() * mf / (std::f64::consts::PI * s)).ceil() as usize
        })
        .collect();
    r.sort_unstable();
    r
}

pub fn plan(m: usize, p: usize, sigma: usize, r_scale: usize, s0: f64) -> Result<ExtrapolationPlan> {
    if m == 0 || r_scale == 0 {
        return Err(Error::invalid("extrapolation needs m >= 1 and r_scale >= 1"));
    }
    plan_with_nodes(richardson_nodes(m, r_scale), p, sigma, r_scale, s0)
}

/// Coefficients solving `Σ b_k = 1` and `Σ b_k s_k^e = 0` for `e = p, p+σ, …` (m−1 exponents).
pub fn plan_with_nodes(r: Vec<usize>, p: usize, sigma: usize, r_scale: usize, s0: f64) -> Result<ExtrapolationPlan> {
    let m = r.len();
    if m == 0 {
        return Err(Error::invalid("no extrapolation nodes"));
    }
    if r[0] == 0 || r.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::numerical(format!("extrapolation nodes {r:?} are not strictly increasing; increase r_scale")));
    }
    if m > 1 && (p == 0 || sigma == 0) {
        return Err(Error::invalid("error exponents must be positive"));
    }
    if !(s0 > 0.0) {
        return Err(Error::invalid("base step must be positive"));
    }
    // Rows are scaled by s0^e, which leaves the solution unchanged.
    let a = DMatrix::from_fn(m, m, |i, k| if i == 0 { 1.0 } else { (r[k] as f64).powi(-((p + (i - 1) * sigma) as i32)) });
    let mut rhs = DVector::zeros(m);
    rhs[0] = 1.0;
    let sv = a.clone().singular_values();
    let condition = sv.max() / sv.min();
    let b = a
        .lu()
        .solve(&rhs)
        .filter(|_| condition.is_finite())
        .ok_or_else(|| Error::numerical("singular extrapolation system"))?;
    Ok(ExtrapolationPlan { m, p, sigma, r_scale, s0, r, b: b.iter().copied().collect(), condition })
}

impl ExtrapolationPlan {
    /// Step sizes `s_k = s0/r_k`.
    pub fn steps(&self) -> Vec<f64> {
        self.r.iter().map(|&r| self.s0 / r as f64).collect()
    }

    pub fn norm1(&self) -> f64 {
        self.b.iter().map(|x| x.abs()).sum()
    }

    pub fn csv_rows(&self) -> Vec<String> {
        self.r
            .iter()
            .zip(&self.b)
            .enumerate()
            .map(|(k, (r, b))| format!("{},{},{},{r},{b}", self.m, self.r_scale, k + 1))
            .collect()
    }
}

pub fn extrapolate(plan: &ExtrapolationPlan, values: &[ObservableEstimate]) -> Result<ObservableEstimate> {
    if values.len() != plan.m {
        return Err(Error::invalid(format!("{} estimates for {} extrapolation nodes", values.len(), plan.m)));
    }
    let value = plan.b.iter().zip(values).map(|(b, v)| b * v.value).sum();
    let var: f64 = plan.b.iter().zip(values).map(|(b, v)| (b * v.stderr).powi(2)).sum();
    Ok(ObservableEstimate {
        value,
        stderr: var.sqrt(),
        circuits: values.iter().map(|v| v.circuits).sum(),
        shots: values.iter().map(|v| v.shots).sum(),
        unnormalized: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{trotter_circuit, ProductFormula};
    use crate::linalg::{c, expm_hermitian, CVector};
    use crate::pauli::PauliSum;
    use crate::simulate::StateVector;
    use proptest::prelude::*;

    fn exact(v: f64) -> ObservableEstimate {
        ObservableEstimate::exact(v, None, 1)
    }

    #[test]
    fn small_plans() {
        let one = plan(1, 2, 2, 1, 0.5).unwrap();
        assert_eq!(one.b, vec![1.0]);
        let two = plan_with_nodes(vec![1, 2], 2, 2, 1, 1.0).unwrap();
        assert!((two.b[0] + 1.0 / 3.0).abs() < 1e-14 && (two.b[1] - 4.0 / 3.0).abs() < 1e-14);
        assert_eq!(richardson_nodes(3, 1), vec![5, 8, 21]);
        assert_eq!(richardson_nodes(3, 2), vec![10, 16, 42]);
        assert!(plan_with_nodes(vec![2, 2], 2, 2, 1, 1.0).is_err());
        assert_eq!(plan(2, 2, 2, 1, 1.0).unwrap().csv_rows().len(), 2);
    }

    #[test]
    fn coefficient_norm_grows_slowly() {
        let norms: Vec<f64> = (1..=5).map(|m| plan(m, 2, 2, 1, 1.0).unwrap().norm1()).collect();
        for (m, n) in norms.iter().enumerate() {
            assert!(*n <= 1.0 + 2.0 * ((m + 1) as f64).ln(), "m = {}: {n}", m + 1);
        }
    }

    #[test]
    fn constant_and_quadratic_series() {
        let pl = plan(3, 2, 2, 1, 0.4).unwrap();
        let vals: Vec<_> = pl.steps().iter().map(|_| exact(1.25)).collect();
        assert!((extrapolate(&pl, &vals).unwrap().value - 1.25).abs() < 1e-12);
        let pl = plan(2, 2, 2, 1, 0.4).unwrap();
        let vals: Vec<_> = pl.steps().iter().map(|s| exact(0.7 + 3.0 * s * s)).collect();
        assert!((extrapolate(&pl, &vals).unwrap().value - 0.7).abs() < 1e-10);
        assert!(extrapolate(&pl, &vals[..1]).is_err());
    }

    proptest! {
        #[test]
        fn annihilates_listed_powers(m in 1usize..6, p in 1usize..3, sigma in 1usize..3, coefs in prop::collection::vec(-5.0f64..5.0, 6), s0 in 0.1f64..2.0) {
            let pl = plan(m, p, sigma, 1, s0).unwrap();
            prop_assert!((pl.b.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            let f = |s: f64| 0.3 + (0..m - 1).map(|i| coefs[i] * s.powi((p + i * sigma) as i32)).sum::<f64>();
            let vals: Vec<_> = pl.steps().iter().map(|&s| exact(f(s))).collect();
            prop_assert!((extrapolate(&pl, &vals).unwrap().value - 0.3).abs() < 1e-9);
        }
    }

    fn trotter_expectation(h: &PauliSum, o: &PauliSum, t: f64, r: usize) -> f64 {
        let mut s = StateVector::zero(h.n_qubits());
        s.apply_circuit(&trotter_circuit(h, t, &ProductFormula::second_order(), r).unwrap()).unwrap();
        s.expectation(o).unwrap()
    }

    #[test]
    fn improves_trotter_observable() {
        let h = PauliSum::from_letters(&[(1.0, "XXI"), (0.8, "IYY"), (0.6, "ZIZ"), (0.5, "XII"), (0.4, "IZI")]).unwrap();
        let o = PauliSum::from_letters(&[(1.0, "IIZ"), (0.5, "XIX")]).unwrap();
        let t = 2.0;
        let u = expm_hermitian(&h.to_dense().unwrap(), t);
        let mut e0 = CVector::zeros(8);
        e0[0] = c(1.0, 0.0);
        let v = &u * e0;
        let truth = (v.adjoint() * o.to_dense().unwrap() * &v)[(0, 0)].re;
        let mut errors = Vec::new();
        for m in 1..=4 {
            let pl = plan(m, 2, 2, 1, t).unwrap();
            let vals: Vec<_> = pl.r.iter().map(|&r| exact(trotter_expectation(&h, &o, t, r))).collect();
            let err = (extrapolate(&pl, &vals).unwrap().value - truth).abs();
            if m == 3 {
                let best = vals.iter().map(|v| (v.value - truth).abs()).fold(f64::INFINITY, f64::min);
                assert!(err <= 1e-2 * best, "{err} vs {best}");
            }
            errors.push(err);
        }
        assert!(errors[0] < 0.1);
        assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    }

    #[test]
    fn symmetric_formula_error_is_even_in_step() {
        // Least-squares fit of err(s) = a1 s + a2 s^2 + a3 s^3 + a4 s^4: odd coefficients are negligible.
        let h = PauliSum::from_letters(&[(1.0, "XX"), (0.7, "ZI"), (0.4, "IY")]).unwrap();
        let o = PauliSum::from_letters(&[(1.0, "ZZ")]).unwrap();
        let t = 1.0;
        let truth = trotter_expectation(&h, &o, t, 4096);
        let rs = [8usize, 10, 12, 16, 20, 24, 32, 40];
        let a = DMatrix::from_fn(rs.len(), 4, |i, j| (t / rs[i] as f64).powi(j as i32 + 1));
        let y = DVector::from_iterator(rs.len(), rs.iter().map(|&r| trotter_expectation(&h, &o, t, r) - truth));
        let fit = a.svd(true, true).solve(&y, 1e-14).unwrap();
        assert!(fit[0].abs() < 1e-3 * fit[1].abs() && fit[2].abs() < 1e-2 * fit[1].abs().max(fit[3].abs()), "{fit}");
    }
}
