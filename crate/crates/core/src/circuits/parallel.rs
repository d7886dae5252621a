//! Repetition-code copies of control qubits so Z-controlled rotations on
//! disjoint targets can run in parallel.

use super::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::pauli::Pauli;

/// True if the gate acts diagonally on qubit `q` (commutes with a CX fan-out from `q`).
fn diagonal_on(g: &Gate, q: usize) -> bool {
    match g {
        Gate::RZ(..) | Gate::P(..) | Gate::S(_) | Gate::Sdg(_) | Gate::CP(..) => true,
        Gate::CX(c, _) => *c == q,
        Gate::Rpp(s, _) => matches!(s.get(q), Pauli::I | Pauli::Z),
        _ => false,
    }
}

/// Rewrites `circ` so every Pauli rotation that is Z on a control reads one of
/// `targets.len()` copies of that control, chosen by the lowest target qubit it touches.
///
/// Copies live on fresh ancillas (register `copies`), are created by a balanced CX
/// fan-out just before the first such rotation and are uncomputed before any gate that
/// is not diagonal on the control, and at the end.
pub fn parallelize_controlled(circ: &Circuit, controls: &[usize], targets: &[usize]) -> Result<Circuit> {
    let n = circ.n_qubits;
    let m = targets.len();
    if m == 0 {
        return Err(Error::invalid("parallelisation needs at least one target qubit"));
    }
    if let Some(&q) = controls.iter().chain(targets).find(|&&q| q >= n) {
        return Err(Error::invalid(format!("qubit {q} outside a {n}-qubit circuit")));
    }
    if let Some(q) = controls.iter().find(|q| targets.contains(q)) {
        return Err(Error::invalid(format!("qubit {q} is both control and target")));
    }
    let total = n + controls.len() * (m - 1);
    let copies: Vec<Vec<usize>> = controls
        .iter()
        .enumerate()
        .map(|(ci, &c)| std::iter::once(c).chain((0..m - 1).map(|j| n + ci * (m - 1) + j)).collect())
        .collect();
    let mut fan: Vec<(usize, usize)> = Vec::new();
    let mut have = 1;
    while have < m {
        for h in 0..have {
            if have + h < m {
                fan.push((h, have + h));
            }
        }
        have *= 2;
    }

    let mut out = Circuit { n_qubits: total, gates: Vec::new(), registers: circ.registers.clone(), global_phase: circ.global_phase };
    if m > 1 && !controls.is_empty() {
        out = out.with_register("copies", n, total - n);
    }
    let mut fanned = vec![false; controls.len()];
    let set_fan = |out: &mut Circuit, ci: usize, on: bool| {
        let order: Vec<&(usize, usize)> = if on { fan.iter().collect() } else { fan.iter().rev().collect() };
        for &&(a, b) in &order {
            out.push(Gate::CX(copies[ci][a], copies[ci][b]));
        }
    };

    for g in &circ.gates {
        for (ci, &c) in controls.iter().enumerate() {
            if fanned[ci] && g.qubits().contains(&c) && !diagonal_on(g, c) {
                set_fan(&mut out, ci, false);
                fanned[ci] = false;
            }
        }
        let g = g.remap(total, |q| q);
        let controlled: Vec<usize> = match &g {
            Gate::Rpp(s, _) => (0..controls.len()).filter(|&ci| s.get(controls[ci]) == Pauli::Z).collect(),
            _ => Vec::new(),
        };
        if controlled.is_empty() || m == 1 {
            out.push(g);
            continue;
        }
        let Gate::Rpp(s, theta) = &g else { unreachable!() };
        let copy = s
            .support()
            .filter_map(|q| targets.iter().position(|&t| t == q).map(|pos| (q, pos)))
            .min()
            .map_or(0, |(_, pos)| pos);
        for &ci in &controlled {
            if !fanned[ci] {
                set_fan(&mut out, ci, true);
                fanned[ci] = true;
            }
        }
        let s = s.remap(total, |q| match controls.iter().position(|&c| c == q) {
            Some(ci) if controlled.contains(&ci) => copies[ci][copy],
            _ => q,
        });
        out.push(Gate::Rpp(s, *theta));
    }
    for ci in 0..controls.len() {
        if fanned[ci] {
            set_fan(&mut out, ci, false);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::resources::resource_report;
    use crate::circuits::testutil::unitary;
    use crate::circuits::{compile, Preset};
    use crate::pauli::PauliString;

    /// Rotations `Z_c ⊗ X_t` for every target, twice, with an `H` on the control between.
    fn controlled_layer(n_targets: usize) -> Circuit {
        let n = n_targets + 1;
        let mut c = Circuit::new(n);
        for rep in 0..2 {
            for t in 1..n {
                let s = PauliString::from_ops(n, [(0, Pauli::Z), (t, Pauli::X)]);
                c.push(Gate::Rpp(s, 0.3 + 0.1 * t as f64 + rep as f64));
            }
            c.push(Gate::H(0));
        }
        c
    }

    #[test]
    fn preserves_action_with_clean_ancillas() {
        let c = controlled_layer(3);
        let p = parallelize_controlled(&c, &[0], &[1, 2, 3]).unwrap();
        assert_eq!(p.n_qubits, 6);
        let u = unitary(&c);
        let up = unitary(&p);
        // Ancillas are the high qubits; on the |0⟩ block the action must agree and stay there.
        for col in 0..16 {
            for row in 0..64 {
                let want = if row < 16 { u[(row, col)] } else { crate::C64::new(0.0, 0.0) };
                assert!((up[(row, col)] - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn reduces_two_qubit_depth() {
        let n_t = 8;
        let mut c = Circuit::new(n_t + 1);
        for t in 1..=n_t {
            c.push(Gate::Rpp(PauliString::from_ops(n_t + 1, [(0, Pauli::Z), (t, Pauli::Z)]), 0.4));
        }
        let targets: Vec<usize> = (1..=n_t).collect();
        let serial = resource_report(&compile(&c, Preset::Cx).unwrap()).unwrap();
        let par = parallelize_controlled(&c, &[0], &targets).unwrap();
        let par = resource_report(&compile(&par, Preset::Cx).unwrap()).unwrap();
        assert!(par.depth_2q < serial.depth_2q, "{par:?} vs {serial:?}");
    }

    #[test]
    fn rejects_overlapping_roles() {
        let c = controlled_layer(2);
        assert!(parallelize_controlled(&c, &[1], &[1, 2]).is_err());
        assert!(parallelize_controlled(&c, &[0], &[]).is_err());
    }
}
