//! Product formulas over commuting fragments.

use super::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

/// One sweep over all fragments with time factor `coeff`, optionally in reverse order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stage {
    pub coeff: f64,
    pub reversed: bool,
}

/// A product formula `S(τ) = Π_stages Π_fragments exp(-i a τ F)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductFormula {
    pub order: usize,
    pub stages: Vec<Stage>,
}

impl ProductFormula {
    pub fn first_order() -> Self {
        ProductFormula { order: 1, stages: vec![Stage { coeff: 1.0, reversed: false }] }
    }

    pub fn second_order() -> Self {
        ProductFormula {
            order: 2,
            stages: vec![Stage { coeff: 0.5, reversed: false }, Stage { coeff: 0.5, reversed: true }],
        }
    }

    /// Suzuki recursion; `order` must be 1 or even.
    pub fn suzuki(order: usize) -> Result<Self> {
        match order {
            1 => Ok(Self::first_order()),
            2 => Ok(Self::second_order()),
            k if k % 2 == 0 => {
                let inner = Self::suzuki(k - 2)?;
                let p = (k / 2) as f64;
                let u = 1.0 / (4.0 - 4f64.powf(1.0 / (2.0 * p - 1.0)));
                let mut stages = Vec::with_capacity(5 * inner.stages.len());
                for w in [u, u, 1.0 - 4.0 * u, u, u] {
                    stages.extend(inner.stages.iter().map(|s| Stage { coeff: s.coeff * w, reversed: s.reversed }));
                }
                Ok(ProductFormula { order: k, stages })
            }
            k => Err(Error::invalid(format!("product-formula order must be 1 or even, got {k}"))),
        }
    }

    /// Number of stages (sweeps over the fragment list).
    pub fn upsilon(&self) -> usize {
        self.stages.len()
    }

    /// Order of the leading error term.
    pub fn sigma(&self) -> usize {
        self.order + 1
    }

    pub fn max_coeff(&self) -> f64 {
        self.stages.iter().map(|s| s.coeff.abs()).fold(0.0, f64::max)
    }

    /// `(fragment index, time factor)` pairs for `r` steps, adjacent repeats merged.
    pub fn schedule(&self, n_fragments: usize, r: usize) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = Vec::new();
        for _ in 0..r {
            for st in &self.stages {
                for k in 0..n_fragments {
                    let idx = if st.reversed { n_fragments - 1 - k } else { k };
                    match out.last_mut() {
                        Some((last, a)) if *last == idx => *a += st.coeff,
                        _ => out.push((idx, st.coeff)),
                    }
                }
            }
        }
        out
    }
}

fn push_fragment(circ: &mut Circuit, frag: &PauliSum, tau: f64) -> Result<()> {
    for (c, s) in frag.terms() {
        if c.im.abs() > 1e-12 {
            return Err(Error::invalid(format!("non-Hermitian term {c} {s} in fragment")));
        }
        if s.is_identity() {
            circ.global_phase -= c.re * tau;
        } else {
            circ.push(Gate::Rpp(s.clone(), 2.0 * c.re * tau));
        }
    }
    Ok(())
}

/// `S(t/r)^r` over the given fragments, each lowered to Pauli rotations.
pub fn trotter_fragment_circuit(
    fragments: &[PauliSum],
    t: f64,
    formula: &ProductFormula,
    r: usize,
) -> Result<Circuit> {
    let n = fragments.first().map(|f| f.n_qubits()).ok_or_else(|| Error::invalid("no fragments"))?;
    if r == 0 {
        return Err(Error::invalid("Trotter number must be positive"));
    }
    if let Some(f) = fragments.iter().find(|f| f.n_qubits() != n) {
        return Err(Error::QubitMismatch { left: n, right: f.n_qubits() });
    }
    let tau = t / r as f64;
    let mut circ = Circuit::new(n);
    for (idx, a) in formula.schedule(fragments.len(), r) {
        push_fragment(&mut circ, &fragments[idx], a * tau)?;
    }
    Ok(circ)
}

/// Product formula with every Pauli term as its own fragment.
pub fn trotter_circuit(h: &PauliSum, t: f64, formula: &ProductFormula, r: usize) -> Result<Circuit> {
    if !h.is_hermitian(1e-12) {
        return Err(Error::invalid("Trotter circuit needs a Hermitian Hamiltonian"));
    }
    let frags: Vec<PauliSum> = if h.is_empty() {
        vec![PauliSum::zero(h.n_qubits())]
    } else {
        h.terms().iter().map(|(c, s)| PauliSum::from_terms(h.n_qubits(), [(*c, s.clone())])).collect()
    };
    trotter_fragment_circuit(&frags, t, formula, r)
}

/// A single Pauli rotation circuit `exp(-iθP/2)`.
pub fn rpp_circuit(s: &PauliString, theta: f64) -> Circuit {
    let mut c = Circuit::new(s.n_qubits());
    if s.is_identity() {
        c.global_phase = -theta / 2.0;
    } else {
        c.push(Gate::Rpp(s.clone(), theta));
    }
    c
}
