//! Gate-level optimization passes that bring a native circuit into practical form.

use serde_json::Value;

use super::unitary::{pulse_frame, Mat2};
use super::{is_zero_angle, normalize_angle, Circuit, Gate};

/// Merge runs of consecutive single-qubit native gates on each qubit into one
/// pulse plus (when needed) one virtual Z. Runs that compose to identity vanish.
pub fn merge_adjacent_1q(circuit: &Circuit) -> Circuit {
    let n = circuit.n_qubits;
    let mut slots: Vec<Vec<Gate>> = vec![Vec::new(); circuit.gates.len()];
    // (slot of the run's first gate, run length, accumulated operator)
    let mut pending: Vec<Option<(usize, usize, Mat2)>> = vec![None; n];

    let flush = |q: usize, pending: &mut Vec<Option<(usize, usize, Mat2)>>, slots: &mut Vec<Vec<Gate>>| {
        if let Some((slot, len, m)) = pending[q].take() {
            if len == 1 {
                let g = &circuit.gates[slot];
                let identity = match g {
                    Gate::R { theta, .. } => is_zero_angle(*theta),
                    Gate::VirtualZ { angle, .. } => is_zero_angle(*angle),
                    _ => false,
                };
                if !identity {
                    slots[slot].push(g.clone());
                }
                return;
            }
            slots[slot].extend(pulse_and_frame(q, &m));
        }
    };

    for (i, gate) in circuit.gates.iter().enumerate() {
        match gate {
            Gate::R { qubit, .. } | Gate::VirtualZ { qubit, .. } => {
                let m = Mat2::of_gate(gate).expect("native single-qubit gate");
                pending[*qubit] = Some(match pending[*qubit].take() {
                    None => (i, 1, m),
                    Some((slot, len, acc)) => (slot, len + 1, m.mul(&acc)),
                });
            }
            other => {
                for q in other.qubits() {
                    flush(q, &mut pending, &mut slots);
                }
                slots[i].push(other.clone());
            }
        }
    }
    for q in 0..n {
        flush(q, &mut pending, &mut slots);
    }
    Circuit {
        n_qubits: n,
        gates: slots.into_iter().flatten().collect(),
        metadata: circuit.metadata.clone(),
    }
}

/// Gates realizing `m` on qubit `q`: a pulse if the rotation is non-trivial,
/// then a virtual Z if a frame change remains.
pub(crate) fn pulse_and_frame(q: usize, m: &Mat2) -> Vec<Gate> {
    let f = pulse_frame(m);
    let mut out = Vec::new();
    if !is_zero_angle(f.theta) {
        out.push(Gate::R { qubit: q, theta: f.theta, phi: f.phi });
    }
    if !is_zero_angle(f.lambda) {
        out.push(Gate::VirtualZ { qubit: q, angle: f.lambda });
    }
    out
}

/// Fold every virtual Z into the phase of later pulses on the same qubit.
pub fn eliminate_virtual_z(circuit: &Circuit) -> Circuit {
    eliminate_virtual_z_with_frames(circuit).0
}

/// Also returns the per-qubit frame left over at the end of the circuit, which
/// the pass drops because it does not affect computational-basis readout.
pub(crate) fn eliminate_virtual_z_with_frames(circuit: &Circuit) -> (Circuit, Vec<f64>) {
    let n = circuit.n_qubits;
    let mut frame = vec![0.0f64; n];
    let mut gates = Vec::with_capacity(circuit.gates.len());
    for gate in &circuit.gates {
        match gate {
            Gate::VirtualZ { qubit, angle } => frame[*qubit] += angle,
            Gate::R { qubit, theta, phi } => {
                let f = frame[*qubit];
                // Z(α) then R(θ,φ) equals R(θ,φ−α) then Z(α).
                let phi = if f == 0.0 { *phi } else { normalize_angle(phi - f) };
                gates.push(Gate::R { qubit: *qubit, theta: *theta, phi });
            }
            Gate::Mcz { .. } | Gate::Ccz { .. } => gates.push(gate.clone()),
            other => {
                for q in other.qubits() {
                    if !is_zero_angle(frame[q]) {
                        gates.push(Gate::VirtualZ { qubit: q, angle: normalize_angle(frame[q]) });
                    }
                    frame[q] = 0.0;
                }
                gates.push(other.clone());
            }
        }
    }
    let out = Circuit { n_qubits: n, gates, metadata: circuit.metadata.clone() };
    (out, frame)
}

/// Drop every MCZ acting on a qubit that no earlier gate has rotated out of |0⟩.
pub fn remove_redundant_mcz(circuit: &Circuit) -> Circuit {
    let mut current = circuit.clone();
    loop {
        let mut rotated = vec![false; current.n_qubits];
        let before = current.gates.len();
        current.gates.retain(|g| {
            let qubits = g.qubits();
            let redundant = (g.is_mcz() || matches!(g, Gate::Ccz { .. })) && qubits.iter().any(|&q| !rotated[q]);
            if !redundant {
                for &q in &qubits {
                    rotated[q] |= g.rotates(q);
                }
            }
            !redundant
        });
        if current.gates.len() == before {
            return current;
        }
    }
}

/// Remove qubits that never take part in a multi-qubit gate, reindexing the
/// rest densely. Returns the removed original indices.
pub fn strip_classical_qubits(circuit: &Circuit) -> (Circuit, Vec<usize>) {
    let n = circuit.n_qubits;
    let mut used = vec![false; n];
    for g in &circuit.gates {
        if !g.is_single_qubit() {
            for q in g.qubits() {
                used[q] = true;
            }
        }
    }
    let removed: Vec<usize> = (0..n).filter(|&q| !used[q]).collect();
    if removed.is_empty() {
        return (circuit.clone(), removed);
    }
    let mut new_index = vec![usize::MAX; n];
    let mut next = 0;
    for q in 0..n {
        if used[q] {
            new_index[q] = next;
            next += 1;
        }
    }
    let (kept, dropped): (Vec<&Gate>, Vec<&Gate>) =
        circuit.gates.iter().partition(|g| g.qubits().iter().all(|&q| used[q]));
    let mut metadata = circuit.metadata.clone();
    let mut stripped_qubits: Vec<Value> = metadata
        .get("stripped_qubits")
        .and_then(|v| v.as_array().cloned())
        .unwrap_or_default();
    stripped_qubits.extend(removed.iter().map(|&q| Value::from(q)));
    metadata.insert("stripped_qubits".into(), Value::Array(stripped_qubits));
    let mut stripped_gates: Vec<Value> = metadata
        .get("stripped_gates")
        .and_then(|v| v.as_array().cloned())
        .unwrap_or_default();
    stripped_gates.extend(dropped.iter().map(|g| serde_json::to_value(g).expect("gate serializes")));
    metadata.insert("stripped_gates".into(), Value::Array(stripped_gates));
    let out = Circuit {
        n_qubits: next,
        gates: kept.into_iter().map(|g| g.relabel(&|q| new_index[q])).collect(),
        metadata,
    };
    (out, removed)
}

/// The full pass pipeline, repeated until it stops changing the circuit.
///
/// Returns the optimized circuit and, for each of its qubits, the index that
/// qubit had in the input.
pub fn optimize(circuit: &Circuit) -> (Circuit, Vec<usize>) {
    let mut kept: Vec<usize> = (0..circuit.n_qubits).collect();
    let mut current = circuit.clone();
    for _ in 0..16 {
        let merged = merge_adjacent_1q(&current);
        let framed = eliminate_virtual_z(&merged);
        let pruned = remove_redundant_mcz(&framed);
        let (stripped, removed) = strip_classical_qubits(&pruned);
        kept = kept.into_iter().enumerate().filter(|(i, _)| !removed.contains(i)).map(|(_, q)| q).collect();
        let done = stripped == current;
        current = stripped;
        if done {
            break;
        }
    }
    (current, kept)
}
