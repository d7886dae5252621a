//! Lowering of Pauli rotations and composite gates to a native gate set.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use super::{wrap_4pi, Circuit, Gate};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

const ANGLE_TOL: f64 = 1e-12;

/// Native gate sets: single-qubit rotations plus either CX or RXX.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    Cx,
    Rxx,
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Cx => "cx",
            Preset::Rxx => "rxx",
        })
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cx" => Ok(Preset::Cx),
            "rxx" => Ok(Preset::Rxx),
            _ => Err(Error::invalid(format!("unknown gate preset '{s}'"))),
        }
    }
}

fn native_rotation(q: usize, p: Pauli, theta: f64) -> Gate {
    match p {
        Pauli::X => Gate::RX(q, theta),
        Pauli::Y => Gate::RY(q, theta),
        Pauli::Z => Gate::RZ(q, theta),
        Pauli::I => unreachable!("identity has no rotation"),
    }
}

/// Gates `(before, after)` with `U P U† = Z` applied as `before … after`.
fn to_z(q: usize, p: Pauli) -> (Option<Gate>, Option<Gate>) {
    match p {
        Pauli::X => (Some(Gate::H(q)), Some(Gate::H(q))),
        Pauli::Y => (Some(Gate::RX(q, FRAC_PI_2)), Some(Gate::RX(q, -FRAC_PI_2))),
        _ => (None, None),
    }
}

/// Same as [`to_z`] but onto `X`.
fn to_x(q: usize, p: Pauli) -> (Option<Gate>, Option<Gate>) {
    match p {
        Pauli::Y => (Some(Gate::RZ(q, -FRAC_PI_2)), Some(Gate::RZ(q, FRAC_PI_2))),
        Pauli::Z => (Some(Gate::RY(q, FRAC_PI_2)), Some(Gate::RY(q, -FRAC_PI_2))),
        _ => (None, None),
    }
}

/// `exp(-iθP/2)` as basis changes, a CX parity ladder and one `RZ`.
pub fn compile_rpp(s: &PauliString, theta: f64) -> Vec<Gate> {
    let ops = s.ops();
    match ops.len() {
        0 => Vec::new(),
        1 => vec![native_rotation(ops[0].0, ops[0].1, theta)],
        k => {
            let mut pre = Vec::new();
            let mut post = Vec::new();
            for &(q, p) in ops {
                let (b, a) = to_z(q, p);
                pre.extend(b);
                post.extend(a);
            }
            let ladder: Vec<Gate> = (0..k - 1).map(|i| Gate::CX(ops[i].0, ops[i + 1].0)).collect();
            let mut out = pre;
            out.extend(ladder.iter().cloned());
            out.push(Gate::RZ(ops[k - 1].0, theta));
            out.extend(ladder.into_iter().rev());
            out.extend(post);
            out
        }
    }
}

/// CX from one RXX and single-qubit rotations; returns the gates and the global phase.
fn cx_via_rxx(c: usize, t: usize) -> (Vec<Gate>, f64) {
    (
        vec![
            Gate::RY(c, FRAC_PI_2),
            Gate::RXX(c, t, -FRAC_PI_2),
            Gate::RY(c, -FRAC_PI_2),
            Gate::RZ(c, FRAC_PI_2),
            Gate::RX(t, FRAC_PI_2),
        ],
        PI / 4.0,
    )
}

/// `exp(-iθP/2)` over `{1q, RXX}`; returns the gates and the global phase.
fn compile_rpp_rxx(s: &PauliString, theta: f64) -> (Vec<Gate>, f64) {
    let ops = s.ops();
    match ops.len() {
        0 => (Vec::new(), 0.0),
        1 => (vec![native_rotation(ops[0].0, ops[0].1, theta)], 0.0),
        2 => {
            let mut out = Vec::new();
            let mut post = Vec::new();
            for &(q, p) in ops {
                let (b, a) = to_x(q, p);
                out.extend(b);
                post.extend(a);
            }
            out.push(Gate::RXX(ops[0].0, ops[1].0, theta));
            out.extend(post);
            (out, 0.0)
        }
        _ => {
            let mut out = Vec::new();
            let mut phase = 0.0;
            for g in compile_rpp(s, theta) {
                if let Gate::CX(c, t) = g {
                    let (gs, ph) = cx_via_rxx(c, t);
                    out.extend(gs);
                    phase += ph;
                } else {
                    out.push(g);
                }
            }
            (out, phase)
        }
    }
}

/// Lowers one gate to the preset; returns the gates and a global phase.
fn lower(g: &Gate, preset: Preset) -> (Vec<Gate>, f64) {
    let zz = |a: usize, b: usize, n: usize| PauliString::from_ops(n, [(a, Pauli::Z), (b, Pauli::Z)]);
    match (g, preset) {
        (Gate::Rpp(s, t), _) if s.is_identity() => (Vec::new(), -t / 2.0),
        (Gate::Rpp(s, t), Preset::Cx) => (compile_rpp(s, *t), 0.0),
        (Gate::Rpp(s, t), Preset::Rxx) => compile_rpp_rxx(s, *t),
        (Gate::RXX(a, b, t), Preset::Cx) => {
            (compile_rpp(&PauliString::from_ops(a.max(b) + 1, [(*a, Pauli::X), (*b, Pauli::X)]), *t), 0.0)
        }
        (Gate::CX(c, t), Preset::Rxx) => cx_via_rxx(*c, *t),
        (Gate::CP(a, b, t), _) => {
            // diag(1,1,1,e^{iθ}) = e^{iθ/4} RZ_a(θ/2) RZ_b(θ/2) RZZ(-θ/2)
            let n = a.max(b) + 1;
            let mut out = vec![Gate::RZ(*a, t / 2.0), Gate::RZ(*b, t / 2.0)];
            let (zz_gates, ph) = lower(&Gate::Rpp(zz(*a, *b, n), -t / 2.0), preset);
            out.extend(zz_gates);
            (out, ph + t / 4.0)
        }
        (Gate::Swap(a, b), _) => {
            let mut out = Vec::new();
            let mut phase = 0.0;
            for cx in [Gate::CX(*a, *b), Gate::CX(*b, *a), Gate::CX(*a, *b)] {
                let (gs, ph) = lower(&cx, preset);
                out.extend(gs);
                phase += ph;
            }
            (out, phase)
        }
        (g, _) => (vec![g.clone()], 0.0),
    }
}

/// Lowers every gate to the preset and runs [`peephole`].
pub fn compile(circ: &Circuit, preset: Preset) -> Result<Circuit> {
    circ.validate()?;
    let mut out = Circuit { gates: Vec::with_capacity(circ.len() * 4), ..circ.clone() };
    for g in &circ.gates {
        let (gs, ph) = lower(g, preset);
        out.gates.extend(gs);
        out.global_phase += ph;
    }
    Ok(peephole(&out))
}

enum Merged {
    Identity(f64),
    Gate(Gate),
}

fn rotation_sum(make: impl Fn(f64) -> Gate, a: f64, b: f64) -> Merged {
    let s = wrap_4pi(a + b);
    if s.abs() < ANGLE_TOL {
        Merged::Identity(0.0)
    } else if (s - 2.0 * PI).abs() < ANGLE_TOL {
        Merged::Identity(PI)
    } else {
        Merged::Gate(make(s))
    }
}

fn phase_sum(make: impl Fn(f64) -> Gate, a: f64, b: f64) -> Merged {
    let s = (a + b).rem_euclid(2.0 * PI);
    if s < ANGLE_TOL || 2.0 * PI - s < ANGLE_TOL {
        Merged::Identity(0.0)
    } else {
        Merged::Gate(make(s))
    }
}

fn merge(a: &Gate, b: &Gate) -> Option<Merged> {
    use Gate::*;
    Some(match (a, b) {
        (H(p), H(q)) | (X(p), X(q)) | (S(p), Sdg(q)) | (Sdg(p), S(q)) if p == q => Merged::Identity(0.0),
        (RX(p, x), RX(q, y)) if p == q => rotation_sum(|s| RX(*p, s), *x, *y),
        (RY(p, x), RY(q, y)) if p == q => rotation_sum(|s| RY(*p, s), *x, *y),
        (RZ(p, x), RZ(q, y)) if p == q => rotation_sum(|s| RZ(*p, s), *x, *y),
        (P(p, x), P(q, y)) if p == q => phase_sum(|s| P(*p, s), *x, *y),
        (CX(c1, t1), CX(c2, t2)) if c1 == c2 && t1 == t2 => Merged::Identity(0.0),
        (RXX(a1, b1, x), RXX(a2, b2, y)) if (a1, b1) == (a2, b2) || (a1, b1) == (b2, a2) => {
            rotation_sum(|s| RXX(*a1, *b1, s), *x, *y)
        }
        (CP(a1, b1, x), CP(a2, b2, y)) if (a1, b1) == (a2, b2) || (a1, b1) == (b2, a2) => {
            phase_sum(|s| CP(*a1, *b1, s), *x, *y)
        }
        _ => return None,
    })
}

fn trivial(g: &Gate) -> Option<f64> {
    match g {
        Gate::Rpp(s, a) if s.is_identity() => Some(-a / 2.0),
        Gate::RX(_, a) | Gate::RY(_, a) | Gate::RZ(_, a) | Gate::RXX(_, _, a) | Gate::Rpp(_, a) => {
            let s = wrap_4pi(*a);
            if s.abs() < ANGLE_TOL {
                Some(0.0)
            } else if (s - 2.0 * PI).abs() < ANGLE_TOL {
                Some(PI)
            } else {
                None
            }
        }
        Gate::P(_, a) | Gate::CP(_, _, a) => {
            let s = a.rem_euclid(2.0 * PI);
            (s < ANGLE_TOL || 2.0 * PI - s < ANGLE_TOL).then_some(0.0)
        }
        _ => None,
    }
}

/// Cancels and merges adjacent gates acting on the same qubits.
pub fn peephole(circ: &Circuit) -> Circuit {
    let mut slots: Vec<Option<Gate>> = Vec::with_capacity(circ.len());
    let mut stacks: Vec<Vec<usize>> = vec![Vec::new(); circ.n_qubits];
    let mut phase = circ.global_phase;
    for g in &circ.gates {
        if let Some(ph) = trivial(g) {
            phase += ph;
            continue;
        }
        let qs = g.qubits();
        let top = stacks[qs[0]].last().copied();
        let shared = top.filter(|&i| {
            qs.iter().all(|&q| stacks[q].last() == Some(&i))
                && slots[i].as_ref().is_some_and(|h| h.qubits().len() == qs.len())
        });
        if let Some(i) = shared {
            if let Some(m) = merge(slots[i].as_ref().unwrap(), g) {
                match m {
                    Merged::Identity(ph) => {
                        phase += ph;
                        slots[i] = None;
                        for &q in &qs {
                            stacks[q].pop();
                        }
                    }
                    Merged::Gate(h) => slots[i] = Some(h),
                }
                continue;
            }
        }
        let i = slots.len();
        slots.push(Some(g.clone()));
        for &q in &qs {
            stacks[q].push(i);
        }
    }
    Circuit {
        n_qubits: circ.n_qubits,
        gates: slots.into_iter().flatten().collect(),
        registers: circ.registers.clone(),
        global_phase: phase,
    }
}
