//! Quantum Fourier transform and the Laplace-profile state preparation.

use std::f64::consts::PI;

use super::{Circuit, Gate};
use crate::error::{Error, Result};

/// QFT on `n` qubits: `|j⟩ ↦ N^{-1/2} Σ_k e^{2πi jk/N} |k⟩`, output in natural order.
pub fn qft(n: usize) -> Circuit {
    let mut c = Circuit::new(n);
    for j in (0..n).rev() {
        c.push(Gate::H(j));
        for k in (0..j).rev() {
            c.push(Gate::CP(k, j, PI / (1u64 << (j - k)) as f64));
        }
    }
    for i in 0..n / 2 {
        c.push(Gate::Swap(i, n - 1 - i));
    }
    c
}

pub fn inverse_qft(n: usize) -> Circuit {
    qft(n).inverse()
}

/// Cell-centred auxiliary grid `p_k = -R + (k + 1/2) Δp`, `Δp = 2R / 2^n`.
pub fn p_grid(n: usize, r: f64) -> Vec<f64> {
    let dim = 1usize << n;
    let dp = 2.0 * r / dim as f64;
    (0..dim).map(|k| -r + (k as f64 + 0.5) * dp).collect()
}

/// Prepares amplitudes proportional to `e^{-|p_k|}` on the grid [`p_grid`].
///
/// Layout: an `RY` layer on the low `n-1` qubits, `H` on the top qubit,
/// a CX fan-out from the top qubit and a final `X` on it.
pub fn laplace_prep(n: usize, r: f64) -> Result<Circuit> {
    if n < 1 {
        return Err(Error::invalid("Laplace preparation needs at least one qubit"));
    }
    if !(r > 0.0) {
        return Err(Error::invalid(format!("domain half-width must be positive, got {r}")));
    }
    let dp = 2.0 * r / (1u64 << n) as f64;
    let top = n - 1;
    let mut c = Circuit::new(n);
    for i in 0..top {
        let w = (-2.0 * (1u64 << i) as f64 * dp).exp();
        c.push(Gate::RY(i, 2.0 * (1.0 / (1.0 + w).sqrt()).acos()));
    }
    c.push(Gate::H(top));
    for i in 0..top {
        c.push(Gate::CX(top, i));
    }
    c.push(Gate::X(top));
    Ok(c)
}
