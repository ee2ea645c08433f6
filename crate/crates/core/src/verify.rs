//! Perfect-blockade qutrit simulation of pulse sequences and equivalence
//! checks against the source circuit.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::circuit::unitary::{circuit_unitary, phase_match, C64};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::sequence::{InstrKind, PulseSequence, Role};

/// Largest register `sequence_operator` accepts.
pub const MAX_QUTRITS: usize = 7;

pub const EQUIVALENCE_TOL: f64 = 1e-7;

const ZERO: C64 = C64::new(0.0, 0.0);
const MINUS_I: C64 = C64::new(0.0, -1.0);

fn pow3(q: usize) -> usize {
    3usize.pow(q as u32)
}

/// Digit of qubit `q` in a qutrit basis index: 0, 1, or 2 for |r⟩.
pub fn digit(index: usize, q: usize) -> usize {
    (index / pow3(q)) % 3
}

/// Qutrit index of a computational basis index (bit q is qubit q).
pub fn qutrit_index(bits: usize, n_qubits: usize) -> usize {
    (0..n_qubits).filter(|&q| bits >> q & 1 == 1).map(pow3).sum()
}

fn blocked(index: usize, context: &[usize]) -> bool {
    context.iter().any(|&c| digit(index, c) == 2)
}

/// One Rydberg pulse on `target`, blockaded by any `context` qubit in |r⟩.
pub fn apply_rydberg_pulse(state: &mut [C64], target: usize, role: Role, context: &[usize]) {
    let stride = pow3(target);
    for i in 0..state.len() {
        if digit(i, target) != 0 || blocked(i, context) {
            continue;
        }
        let r = i + 2 * stride;
        match role {
            Role::Pi => {
                let (a0, ar) = (state[i], state[r]);
                state[i] = MINUS_I * ar;
                state[r] = MINUS_I * a0;
            }
            Role::TwoPi => {
                state[i] = -state[i];
                state[r] = -state[r];
            }
            Role::Raman { .. } => {}
        }
    }
}

/// R(θ,φ) on the {|0⟩,|1⟩} levels of `target`; |r⟩ is left alone.
pub fn apply_raman_pulse(state: &mut [C64], target: usize, theta: f64, phi: f64) {
    let m = crate::circuit::unitary::Mat2::rotation(theta, phi).0;
    let stride = pow3(target);
    for i in 0..state.len() {
        if digit(i, target) != 0 {
            continue;
        }
        let j = i + stride;
        let (a, b) = (state[i], state[j]);
        state[i] = m[0][0] * a + m[0][1] * b;
        state[j] = m[1][0] * a + m[1][1] * b;
    }
}

enum Step {
    Rydberg { target: usize, role: Role, context: Vec<usize> },
    Raman { target: usize, theta: f64, phi: f64 },
}

fn steps(seq: &PulseSequence) -> Result<Vec<Step>> {
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for ins in seq.rydberg.iter().filter(|i| i.is_pulse()) {
        if let Some(b) = ins.block {
            let m = members.entry(b).or_default();
            if !m.contains(&ins.target) {
                m.push(ins.target);
            }
        }
    }
    let mut timed = Vec::new();
    for (ch, list) in [(0u8, &seq.rydberg), (1u8, &seq.raman)] {
        for (k, ins) in list.iter().enumerate() {
            if ins.kind == InstrKind::Retarget {
                continue;
            }
            if ins.target >= seq.n_qubits {
                return Err(Error::IllFormed(format!("pulse targets qubit {} of {}", ins.target, seq.n_qubits)));
            }
            let step = match (ch, ins.role) {
                (0, Some(role @ (Role::Pi | Role::TwoPi))) => {
                    let context = ins
                        .block
                        .and_then(|b| members.get(&b))
                        .map(|m| m.iter().copied().filter(|&q| q != ins.target).collect())
                        .unwrap_or_default();
                    Step::Rydberg { target: ins.target, role, context }
                }
                (1, Some(Role::Raman { theta, phi })) => Step::Raman { target: ins.target, theta, phi },
                _ => return Err(Error::IllFormed(format!("pulse {k} has a role its channel cannot play"))),
            };
            timed.push(((ins.t_start, ch, k), step));
        }
    }
    timed.sort_by_key(|a| a.0);
    Ok(timed.into_iter().map(|(_, s)| s).collect())
}

fn run(steps: &[Step], state: &mut [C64]) {
    for s in steps {
        match s {
            Step::Rydberg { target, role, context } => apply_rydberg_pulse(state, *target, *role, context),
            Step::Raman { target, theta, phi } => apply_raman_pulse(state, *target, *theta, *phi),
        }
    }
}

/// Images of the `2^n` computational basis states, one column each, as
/// vectors over the `3^n` qutrit basis.
pub fn sequence_operator(seq: &PulseSequence) -> Result<Vec<Vec<C64>>> {
    let n = seq.n_qubits;
    if n > MAX_QUTRITS {
        return Err(Error::TooLarge { what: "sequence_operator", max: MAX_QUTRITS, got: n });
    }
    let steps = steps(seq)?;
    let dim = pow3(n);
    let columns = (0..1usize << n)
        .map(|bits| {
            let mut state = vec![ZERO; dim];
            state[qutrit_index(bits, n)] = C64::new(1.0, 0.0);
            run(&steps, &mut state);
            state
        })
        .collect();
    Ok(columns)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    /// Largest norm left outside the computational subspace by any input.
    pub leakage: f64,
    /// Global phase `e^{iγ}` with sequence ≈ e^{iγ}·circuit, as [re, im].
    pub phase: [f64; 2],
}

/// Simulate `seq` and compare it with the circuit's unitary up to a global
/// phase. The sequence is not checked against the timing rules here.
pub fn check_equivalence(circuit: &Circuit, seq: &PulseSequence) -> Result<EquivalenceReport> {
    let n = circuit.n_qubits;
    if seq.n_qubits != n {
        return Err(Error::IllFormed(format!("sequence has {} qubits, circuit has {n}", seq.n_qubits)));
    }
    let columns = sequence_operator(seq)?;
    let expected = circuit_unitary(circuit)?;
    let dim = 1usize << n;
    let comp: Vec<usize> = (0..dim).map(|b| qutrit_index(b, n)).collect();
    let mut leakage: f64 = 0.0;
    let mut restricted = vec![ZERO; dim * dim];
    for (j, col) in columns.iter().enumerate() {
        let inside: f64 = comp.iter().map(|&i| col[i].norm_sqr()).sum();
        let total: f64 = col.iter().map(|a| a.norm_sqr()).sum();
        leakage = leakage.max((total - inside).max(0.0).sqrt());
        for (i, &qi) in comp.iter().enumerate() {
            restricted[i * dim + j] = col[qi];
        }
    }
    let phase = phase_match(&restricted, &expected.data, EQUIVALENCE_TOL);
    let equivalent = leakage < EQUIVALENCE_TOL && phase.is_some();
    let phase = phase.map(|p| [p.re, p.im]).unwrap_or([0.0, 0.0]);
    Ok(EquivalenceReport { equivalent, leakage, phase })
}
