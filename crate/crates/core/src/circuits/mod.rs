//! Gate-level circuits: product-formula lowering, compilation presets, QFT,
//! Laplace state preparation, repetition-code parallelisation and resource counts.

pub mod compile;
pub mod formula;
pub mod parallel;
pub mod qft;
pub mod resources;

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::pauli::PauliString;

pub use compile::{compile, compile_rpp, peephole, Preset};
pub use formula::{trotter_circuit, trotter_fragment_circuit, ProductFormula};
pub use parallel::parallelize_controlled;
pub use qft::{inverse_qft, laplace_prep, qft};
pub use resources::{resource_report, trotter_number_search, ResourceReport};

/// Gates understood by the simulator and the resource counter.
///
/// Rotations follow `R_P(θ) = exp(-iθP/2)`; `P` is the phase gate `diag(1, e^{iθ})`,
/// `CP` the controlled phase and `Rpp` a multi-qubit Pauli rotation.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    S(usize),
    Sdg(usize),
    RX(usize, f64),
    RY(usize, f64),
    RZ(usize, f64),
    P(usize, f64),
    CX(usize, usize),
    CP(usize, usize, f64),
    Swap(usize, usize),
    RXX(usize, usize, f64),
    Rpp(PauliString, f64),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::X(q) | Gate::S(q) | Gate::Sdg(q) => vec![*q],
            Gate::RX(q, _) | Gate::RY(q, _) | Gate::RZ(q, _) | Gate::P(q, _) => vec![*q],
            Gate::CX(a, b) | Gate::CP(a, b, _) | Gate::Swap(a, b) | Gate::RXX(a, b, _) => vec![*a, *b],
            Gate::Rpp(s, _) => s.support().collect(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::X(_) => "X",
            Gate::S(_) => "S",
            Gate::Sdg(_) => "SDG",
            Gate::RX(..) => "RX",
            Gate::RY(..) => "RY",
            Gate::RZ(..) => "RZ",
            Gate::P(..) => "P",
            Gate::CX(..) => "CX",
            Gate::CP(..) => "CP",
            Gate::Swap(..) => "SWAP",
            Gate::RXX(..) => "RXX",
            Gate::Rpp(..) => "RPP",
        }
    }

    pub fn is_single_qubit(&self) -> bool {
        match self {
            Gate::Rpp(s, _) => s.locality() == 1,
            g => g.qubits().len() == 1,
        }
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::S(q) => Gate::Sdg(*q),
            Gate::Sdg(q) => Gate::S(*q),
            Gate::RX(q, a) => Gate::RX(*q, -a),
            Gate::RY(q, a) => Gate::RY(*q, -a),
            Gate::RZ(q, a) => Gate::RZ(*q, -a),
            Gate::P(q, a) => Gate::P(*q, -a),
            Gate::CP(a, b, t) => Gate::CP(*a, *b, -t),
            Gate::RXX(a, b, t) => Gate::RXX(*a, *b, -t),
            Gate::Rpp(s, t) => Gate::Rpp(s.clone(), -t),
            g => g.clone(),
        }
    }

    /// Relabels qubits through `map`; Pauli rotations are widened to `total` qubits.
    pub fn remap(&self, total: usize, map: impl Fn(usize) -> usize) -> Gate {
        match self {
            Gate::H(q) => Gate::H(map(*q)),
            Gate::X(q) => Gate::X(map(*q)),
            Gate::S(q) => Gate::S(map(*q)),
            Gate::Sdg(q) => Gate::Sdg(map(*q)),
            Gate::RX(q, a) => Gate::RX(map(*q), *a),
            Gate::RY(q, a) => Gate::RY(map(*q), *a),
            Gate::RZ(q, a) => Gate::RZ(map(*q), *a),
            Gate::P(q, a) => Gate::P(map(*q), *a),
            Gate::CX(a, b) => Gate::CX(map(*a), map(*b)),
            Gate::CP(a, b, t) => Gate::CP(map(*a), map(*b), *t),
            Gate::Swap(a, b) => Gate::Swap(map(*a), map(*b)),
            Gate::RXX(a, b, t) => Gate::RXX(map(*a), map(*b), *t),
            Gate::Rpp(s, t) => Gate::Rpp(s.remap(total, map), *t),
        }
    }
}

impl fmt::Display for Gate {
    /// `GATE q0[,q1] [angle]`; Pauli rotations list their letters after the angle.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qs: Vec<String> = self.qubits().iter().map(|q| q.to_string()).collect();
        write!(f, "{} {}", self.name(), qs.join(","))?;
        match self {
            Gate::RX(_, a) | Gate::RY(_, a) | Gate::RZ(_, a) | Gate::P(_, a) => write!(f, " {a}"),
            Gate::CP(_, _, a) | Gate::RXX(_, _, a) => write!(f, " {a}"),
            Gate::Rpp(s, a) => {
                let letters: String = s.ops().iter().map(|&(_, p)| p.to_char()).collect();
                write!(f, " {a} {letters}")
            }
            _ => Ok(()),
        }
    }
}

/// A named block of consecutive qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Register {
    pub name: String,
    pub offset: usize,
    pub width: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    pub registers: Vec<Register>,
    /// Accumulated global phase (radians); the circuit implements `e^{i φ} Π gates`.
    pub global_phase: f64,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit { n_qubits, gates: Vec::new(), registers: Vec::new(), global_phase: 0.0 }
    }

    pub fn with_register(mut self, name: &str, offset: usize, width: usize) -> Self {
        self.registers.push(Register { name: name.to_string(), offset, width });
        self
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn push(&mut self, g: Gate) {
        debug_assert!(self.check_gate(&g).is_ok(), "bad gate {g}");
        self.gates.push(g);
    }

    pub fn check_gate(&self, g: &Gate) -> Result<()> {
        let qs = g.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::invalid(format!("gate {g} touches qubit {q} of {}", self.n_qubits)));
        }
        for (i, a) in qs.iter().enumerate() {
            if qs[i + 1..].contains(a) {
                return Err(Error::invalid(format!("gate {g} repeats qubit {a}")));
            }
        }
        if let Gate::Rpp(s, _) = g {
            if s.n_qubits() != self.n_qubits {
                return Err(Error::QubitMismatch { left: self.n_qubits, right: s.n_qubits() });
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.gates.iter().try_for_each(|g| self.check_gate(g))
    }

    /// Appends `other`, mapping its qubit `k` to `offset + k`.
    pub fn append_at(&mut self, other: &Circuit, offset: usize) {
        assert!(offset + other.n_qubits <= self.n_qubits, "appended circuit overflows register");
        let total = self.n_qubits;
        for g in &other.gates {
            self.gates.push(g.remap(total, |q| q + offset));
        }
        self.global_phase += other.global_phase;
    }

    pub fn append(&mut self, other: &Circuit) {
        self.append_at(other, 0);
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            registers: self.registers.clone(),
            global_phase: -self.global_phase,
        }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Line-oriented text form, one gate per line.
    pub fn dump(&self) -> String {
        let mut out = format!("# qubits {}\n", self.n_qubits);
        for r in &self.registers {
            out.push_str(&format!("# register {} {} {}\n", r.name, r.offset, r.width));
        }
        for g in &self.gates {
            out.push_str(&format!("{g}\n"));
        }
        out
    }
}

/// Reduces an angle to `(-2π, 2π]`, the period of `exp(-iθP/2)`.
pub(crate) fn wrap_4pi(a: f64) -> f64 {
    let mut r = a % (4.0 * PI);
    if r > 2.0 * PI {
        r -= 4.0 * PI;
    } else if r <= -2.0 * PI {
        r += 4.0 * PI;
    }
    r
}
