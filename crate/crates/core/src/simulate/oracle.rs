//! Dense reference solutions of `du/dt = A u`.

use crate::error::{Error, Result};
use crate::linalg::{expm, vec_norm, CMatrix, CVector};
use crate::C64;

/// Largest dimension accepted by [`expm_evolve`].
pub const EXPM_DIM_LIMIT: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMethod {
    Expm,
    Integrator,
    Characteristics,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub u_t: CVector,
    pub method: OracleMethod,
}

fn check_shapes(a: &CMatrix, u0: &CVector) -> Result<()> {
    if !a.is_square() || a.nrows() != u0.len() {
        return Err(Error::invalid(format!(
            "generator is {}x{} but the initial vector has length {}",
            a.nrows(),
            a.ncols(),
            u0.len()
        )));
    }
    if a.nrows() > EXPM_DIM_LIMIT {
        return Err(Error::DimensionGuard { what: "dense matrix exponential".into(), limit: EXPM_DIM_LIMIT });
    }
    Ok(())
}

/// `exp(A T) u0` by Padé scaling and squaring.
pub fn expm_evolve(a: &CMatrix, u0: &CVector, t: f64) -> Result<OracleResult> {
    check_shapes(a, u0)?;
    let e = expm(&(a * C64::new(t, 0.0)));
    let u_t = e * u0;
    if u_t.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::numerical("matrix exponential produced non-finite values"));
    }
    Ok(OracleResult { u_t, method: OracleMethod::Expm })
}

// Dormand–Prince 5(4) tableau; the generator is autonomous so the nodes c_i are unused.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Adaptive Dormand–Prince integration of `du/dt = A u` to relative tolerance `rtol`.
pub fn integrate(a: &CMatrix, u0: &CVector, t_end: f64, rtol: f64) -> Result<OracleResult> {
    check_shapes(a, u0)?;
    let atol = rtol * vec_norm(u0).max(1e-300);
    let f = |u: &CVector| a * u;
    let r = |x: f64| C64::new(x, 0.0);
    let mut u = u0.clone();
    let mut t = 0.0;
    let mut h = (t_end / 100.0).max(1e-6 * t_end.abs()).min(t_end);
    let mut k1 = f(&u);
    let mut steps = 0usize;
    while t < t_end {
        steps += 1;
        if steps > 10_000_000 {
            return Err(Error::numerical("integrator exceeded its step budget"));
        }
        h = h.min(t_end - t);
        let k2 = f(&(&u + &k1 * r(h * A21)));
        let k3 = f(&(&u + (&k1 * r(A31) + &k2 * r(A32)) * r(h)));
        let k4 = f(&(&u + (&k1 * r(A41) + &k2 * r(A42) + &k3 * r(A43)) * r(h)));
        let k5 = f(&(&u + (&k1 * r(A51) + &k2 * r(A52) + &k3 * r(A53) + &k4 * r(A54)) * r(h)));
        let k6 = f(&(&u + (&k1 * r(A61) + &k2 * r(A62) + &k3 * r(A63) + &k4 * r(A64) + &k5 * r(A65)) * r(h)));
        let u_new = &u + (&k1 * r(B1) + &k3 * r(B3) + &k4 * r(B4) + &k5 * r(B5) + &k6 * r(B6)) * r(h);
        let k7 = f(&u_new);
        let err_vec = (&k1 * r(E1) + &k3 * r(E3) + &k4 * r(E4) + &k5 * r(E5) + &k6 * r(E6) + &k7 * r(E7)) * r(h);
        let scale = atol + rtol * vec_norm(&u).max(vec_norm(&u_new));
        let err = vec_norm(&err_vec) / scale;
        if err <= 1.0 {
            t += h;
            u = u_new;
            k1 = k7;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Ok(OracleResult { u_t: u, method: OracleMethod::Integrator })
}
