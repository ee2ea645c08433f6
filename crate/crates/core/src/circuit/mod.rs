//! Circuit representation, practical-form validation, gate-level
//! optimization passes, and the alternating layer structure.

mod layer;
mod optimize;
pub mod unitary;
mod validate;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use layer::{layerize, Layer, LayeredCircuit};
pub use optimize::{
    eliminate_virtual_z, merge_adjacent_1q, optimize, remove_redundant_mcz, strip_classical_qubits,
};
pub use unitary::{circuit_unitary, Unitary};
pub use validate::{
    validate_practical_form, validate_with_connectivity, Criterion, ValidationReport, Violation,
};

/// Angles closer than this to a multiple of 2π are treated as zero.
pub const ANGLE_EPS: f64 = 1e-9;

/// A gate in the circuit IR.
///
/// `R`, `RZ` (virtual Z) and `MCZ` are native. The remaining variants are
/// input conveniences lowered by the transpiler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Gate {
    /// Resonant pulse: rotation by `theta` about the axis `(cos phi, sin phi, 0)`.
    #[serde(rename = "R")]
    R { qubit: usize, theta: f64, phi: f64 },
    /// Phase-frame change; zero duration.
    #[serde(rename = "RZ")]
    VirtualZ { qubit: usize, angle: f64 },
    #[serde(rename = "MCZ")]
    Mcz { qubits: Vec<usize> },
    #[serde(rename = "H")]
    H { qubit: usize },
    #[serde(rename = "X")]
    X { qubit: usize },
    /// `qubits = [control, target]`.
    #[serde(rename = "CNOT")]
    Cnot { qubits: [usize; 2] },
    #[serde(rename = "SWAP")]
    Swap { qubits: [usize; 2] },
    #[serde(rename = "CCZ")]
    Ccz { qubits: [usize; 3] },
}

impl Gate {
    pub fn r(qubit: usize, theta: f64, phi: f64) -> Self {
        Gate::R { qubit, theta, phi }
    }

    pub fn mcz(qubits: impl Into<Vec<usize>>) -> Self {
        Gate::Mcz { qubits: qubits.into() }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::R { qubit, .. }
            | Gate::VirtualZ { qubit, .. }
            | Gate::H { qubit }
            | Gate::X { qubit } => vec![*qubit],
            Gate::Mcz { qubits } => qubits.clone(),
            Gate::Cnot { qubits } | Gate::Swap { qubits } => qubits.to_vec(),
            Gate::Ccz { qubits } => qubits.to_vec(),
        }
    }

    pub fn touches(&self, q: usize) -> bool {
        match self {
            Gate::R { qubit, .. }
            | Gate::VirtualZ { qubit, .. }
            | Gate::H { qubit }
            | Gate::X { qubit } => *qubit == q,
            Gate::Mcz { qubits } => qubits.contains(&q),
            Gate::Cnot { qubits } | Gate::Swap { qubits } => qubits.contains(&q),
            Gate::Ccz { qubits } => qubits.contains(&q),
        }
    }

    pub fn is_single_qubit(&self) -> bool {
        matches!(
            self,
            Gate::R { .. } | Gate::VirtualZ { .. } | Gate::H { .. } | Gate::X { .. }
        )
    }

    pub fn is_mcz(&self) -> bool {
        matches!(self, Gate::Mcz { .. })
    }

    pub fn is_native(&self) -> bool {
        matches!(self, Gate::R { .. } | Gate::VirtualZ { .. } | Gate::Mcz { .. })
    }

    /// Whether the gate can move population out of |0⟩ on `q`.
    pub fn rotates(&self, q: usize) -> bool {
        match self {
            Gate::R { qubit, theta, .. } => *qubit == q && !is_zero_angle(*theta),
            Gate::VirtualZ { .. } | Gate::Mcz { .. } | Gate::Ccz { .. } => false,
            // Conservative for the convenience variants.
            other => other.touches(q),
        }
    }

    pub(crate) fn relabel(&self, map: &dyn Fn(usize) -> usize) -> Gate {
        match self {
            Gate::R { qubit, theta, phi } => Gate::R { qubit: map(*qubit), theta: *theta, phi: *phi },
            Gate::VirtualZ { qubit, angle } => Gate::VirtualZ { qubit: map(*qubit), angle: *angle },
            Gate::Mcz { qubits } => Gate::Mcz { qubits: qubits.iter().map(|&q| map(q)).collect() },
            Gate::H { qubit } => Gate::H { qubit: map(*qubit) },
            Gate::X { qubit } => Gate::X { qubit: map(*qubit) },
            Gate::Cnot { qubits } => Gate::Cnot { qubits: [map(qubits[0]), map(qubits[1])] },
            Gate::Swap { qubits } => Gate::Swap { qubits: [map(qubits[0]), map(qubits[1])] },
            Gate::Ccz { qubits } => Gate::Ccz { qubits: [map(qubits[0]), map(qubits[1]), map(qubits[2])] },
        }
    }
}

/// `x` reduced to `[0, 2π)`.
pub fn normalize_angle(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    if (2.0 * PI - r).abs() < ANGLE_EPS {
        0.0
    } else {
        r
    }
}

pub fn is_zero_angle(x: f64) -> bool {
    let r = normalize_angle(x);
    r.abs() < ANGLE_EPS || (2.0 * PI - r).abs() < ANGLE_EPS
}

/// An ordered gate list over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    #[serde(default)]
    pub metadata: serde_json::Map<String, serde_json::Value>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit { n_qubits, gates: Vec::new(), metadata: Default::default() }
    }

    pub fn with_gates(n_qubits: usize, gates: Vec<Gate>) -> Self {
        Circuit { n_qubits, gates, metadata: Default::default() }
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Circuit = serde_json::from_str(s)?;
        c.check_structure()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serializes")
    }

    /// Indices in range, no duplicate qubits in a gate, finite angles.
    pub fn check_structure(&self) -> Result<()> {
        for (i, g) in self.gates.iter().enumerate() {
            let qs = g.qubits();
            for &q in &qs {
                if q >= self.n_qubits {
                    return Err(Error::QubitOutOfRange { gate: i, qubit: q, n_qubits: self.n_qubits });
                }
            }
            let mut sorted = qs.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != qs.len() {
                return Err(Error::MalformedGate { gate: i, message: "repeated qubit".into() });
            }
            match g {
                Gate::Mcz { qubits } if qubits.len() < 2 => {
                    return Err(Error::MalformedGate { gate: i, message: "MCZ needs at least 2 qubits".into() });
                }
                Gate::R { theta, phi, .. } if !theta.is_finite() || !phi.is_finite() => {
                    return Err(Error::MalformedGate { gate: i, message: "non-finite angle".into() });
                }
                Gate::VirtualZ { angle, .. } if !angle.is_finite() => {
                    return Err(Error::MalformedGate { gate: i, message: "non-finite angle".into() });
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// For each qubit, the indices of the gates touching it, in circuit order.
    pub fn per_qubit_gates(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_qubits];
        for (i, g) in self.gates.iter().enumerate() {
            for q in g.qubits() {
                if q < self.n_qubits {
                    out[q].push(i);
                }
            }
        }
        out
    }

    pub fn mcz_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_mcz()).count()
    }

    /// Rename qubits through `map`, producing a circuit over `n_qubits`.
    pub fn relabeled(&self, n_qubits: usize, map: impl Fn(usize) -> usize) -> Circuit {
        Circuit {
            n_qubits,
            gates: self.gates.iter().map(|g| g.relabel(&map)).collect(),
            metadata: self.metadata.clone(),
        }
    }
}
