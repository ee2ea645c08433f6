//! The alternating single-/multi-qubit layer structure of practical circuits.

use std::collections::BTreeMap;

use super::{validate_practical_form, Circuit, Criterion, Gate};
use crate::error::{Error, Result};

/// A view of one layer. Gate ids index into [`LayeredCircuit::circuit`].
#[derive(Debug, Clone, PartialEq)]
pub enum Layer<'a> {
    Single(&'a BTreeMap<usize, usize>),
    Multi(&'a [usize]),
}

/// `singles[k]` is the single-qubit layer following `multis[k-1]` (`singles[0]`
/// is the opening layer); `multis[k]` holds MCZs with disjoint qubit sets.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredCircuit {
    pub circuit: Circuit,
    /// qubit → gate id
    pub singles: Vec<BTreeMap<usize, usize>>,
    /// gate ids, in input order
    pub multis: Vec<Vec<usize>>,
}

impl LayeredCircuit {
    /// Number of multi-qubit layers.
    pub fn layer_count(&self) -> usize {
        self.multis.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.circuit.n_qubits
    }

    pub fn gate(&self, id: usize) -> &Gate {
        &self.circuit.gates[id]
    }

    /// Layers in execution order, omitting a trailing empty single layer.
    pub fn layers(&self) -> Vec<Layer<'_>> {
        let mut out = Vec::new();
        for (k, single) in self.singles.iter().enumerate() {
            let last = k == self.multis.len();
            if !(last && single.is_empty()) {
                out.push(Layer::Single(single));
            }
            if let Some(multi) = self.multis.get(k) {
                out.push(Layer::Multi(multi));
            }
        }
        out
    }

    /// Gates in layer order.
    pub fn flatten(&self) -> Circuit {
        let mut gates = Vec::with_capacity(self.circuit.gates.len());
        for layer in self.layers() {
            match layer {
                Layer::Single(map) => gates.extend(map.values().map(|&id| self.circuit.gates[id].clone())),
                Layer::Multi(ids) => gates.extend(ids.iter().map(|&id| self.circuit.gates[id].clone())),
            }
        }
        Circuit { n_qubits: self.circuit.n_qubits, gates, metadata: self.circuit.metadata.clone() }
    }
}

/// Pack a practical-form circuit into alternating layers, placing every gate
/// in the earliest layer its qubits allow. Gates are taken in input order.
///
/// Qubits that never meet a multi-qubit gate are tolerated: their gates are
/// ordinary 1q gates with nothing to attach to.
pub fn layerize(circuit: &Circuit) -> Result<LayeredCircuit> {
    let report = validate_practical_form(circuit)?;
    if report.violations.iter().any(|v| v.criterion != Criterion::NoClassicalQubits) {
        return Err(Error::NotPractical(report));
    }
    Ok(pack(circuit))
}

pub(crate) fn pack(circuit: &Circuit) -> LayeredCircuit {
    // Level of the last op on each qubit: single layer k or multi layer k (1-based
    // among multis), both stored as k. Singles after multi k share index k.
    let mut level = vec![0usize; circuit.n_qubits];
    let mut singles: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new()];
    let mut multis: Vec<Vec<usize>> = Vec::new();
    for (id, gate) in circuit.gates.iter().enumerate() {
        let qubits = gate.qubits();
        if gate.is_single_qubit() {
            let q = qubits[0];
            singles[level[q]].insert(q, id);
        } else {
            let m = qubits.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            while multis.len() < m {
                multis.push(Vec::new());
                singles.push(BTreeMap::new());
            }
            multis[m - 1].push(id);
            for &q in &qubits {
                level[q] = m;
            }
        }
    }
    LayeredCircuit { circuit: circuit.clone(), singles, multis }
}
