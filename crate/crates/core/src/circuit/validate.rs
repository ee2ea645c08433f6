use std::fmt;

use serde::{Deserialize, Serialize};

use super::{is_zero_angle, Circuit, Gate};
use crate::device::ConnectivityGraph;
use crate::error::Result;

/// The five practical-form criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Criterion {
    NativeGates = 1,
    Connectivity = 2,
    Merged = 3,
    NoRedundancy = 4,
    NoClassicalQubits = 5,
}

impl Serialize for Criterion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(*self as u8)
    }
}

impl<'de> Deserialize<'de> for Criterion {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match u8::deserialize(d)? {
            1 => Ok(Criterion::NativeGates),
            2 => Ok(Criterion::Connectivity),
            3 => Ok(Criterion::Merged),
            4 => Ok(Criterion::NoRedundancy),
            5 => Ok(Criterion::NoClassicalQubits),
            other => Err(serde::de::Error::custom(format!("unknown criterion {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub criterion: Criterion,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gate: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qubit: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// False when no connectivity graph was supplied and criterion 2 was skipped.
    pub connectivity_checked: bool,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, criterion: Criterion) -> bool {
        self.violations.iter().any(|v| v.criterion == criterion)
    }

    fn push(&mut self, criterion: Criterion, gate: Option<usize>, qubit: Option<usize>, message: String) {
        self.violations.push(Violation { criterion, gate, qubit, message });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "no violations");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "criterion {}: {}", v.criterion as u8, v.message)?;
        }
        Ok(())
    }
}

/// Check criteria 1, 3, 4 and 5. Connectivity is skipped.
pub fn validate_practical_form(circuit: &Circuit) -> Result<ValidationReport> {
    circuit.check_structure()?;
    Ok(scan(circuit, None))
}

/// Check all five criteria; qubit `q` sits on lattice site `site_of[q]`.
pub fn validate_with_connectivity(
    circuit: &Circuit,
    graph: &ConnectivityGraph,
    site_of: &[usize],
) -> Result<ValidationReport> {
    circuit.check_structure()?;
    Ok(scan(circuit, Some((graph, site_of))))
}

fn scan(circuit: &Circuit, connectivity: Option<(&ConnectivityGraph, &[usize])>) -> ValidationReport {
    let n = circuit.n_qubits;
    let mut report = ValidationReport { connectivity_checked: connectivity.is_some(), ..Default::default() };
    // Whether the previous op on the qubit was a single-qubit gate.
    let mut last_single = vec![false; n];
    let mut rotated = vec![false; n];
    let mut in_multi = vec![false; n];

    for (i, gate) in circuit.gates.iter().enumerate() {
        if !matches!(gate, Gate::R { .. } | Gate::Mcz { .. }) {
            report.push(Criterion::NativeGates, Some(i), None, format!("gate {i} is not a native pulse or MCZ"));
        }
        let qubits = gate.qubits();
        if gate.is_single_qubit() {
            let q = qubits[0];
            if last_single[q] {
                report.push(
                    Criterion::Merged,
                    Some(i),
                    Some(q),
                    format!("gate {i} follows another single-qubit gate on qubit {q}"),
                );
            }
            last_single[q] = true;
            if let Gate::R { theta, .. } = gate {
                if is_zero_angle(*theta) {
                    report.push(Criterion::NoRedundancy, Some(i), Some(q), format!("gate {i} is an identity pulse"));
                }
            }
        } else {
            if let Some((graph, site_of)) = connectivity {
                let sites: Vec<usize> = qubits.iter().map(|&q| site_of[q]).collect();
                if !graph.is_mutually_connected(&sites) {
                    report.push(
                        Criterion::Connectivity,
                        Some(i),
                        None,
                        format!("gate {i} acts on sites {sites:?} that do not all interact"),
                    );
                }
            }
            if gate.is_mcz() || matches!(gate, Gate::Ccz { .. }) {
                for &q in &qubits {
                    if !rotated[q] {
                        report.push(
                            Criterion::NoRedundancy,
                            Some(i),
                            Some(q),
                            format!("gate {i} is redundant: qubit {q} is still in |0>"),
                        );
                    }
                }
            }
            for &q in &qubits {
                last_single[q] = false;
                in_multi[q] = true;
            }
        }
        for &q in &qubits {
            if gate.rotates(q) {
                rotated[q] = true;
            }
        }
    }
    for (q, used) in in_multi.iter().enumerate() {
        if !used {
            report.push(
                Criterion::NoClassicalQubits,
                None,
                Some(q),
                format!("qubit {q} is never involved in a multi-qubit gate"),
            );
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::triangular_lattice;

    #[test]
    fn qubit_without_mcz_violates_five() {
        let c = Circuit::with_gates(
            3,
            vec![Gate::r(0, 1.0, 0.0), Gate::r(1, 1.0, 0.0), Gate::r(2, 1.0, 0.0), Gate::mcz(vec![0, 1])],
        );
        let r = validate_practical_form(&c).unwrap();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].criterion, Criterion::NoClassicalQubits);
        assert_eq!(r.violations[0].qubit, Some(2));
        assert!(!r.connectivity_checked);
    }

    #[test]
    fn empty_circuit_is_vacuously_practical() {
        assert!(validate_practical_form(&Circuit::new(0)).unwrap().is_empty());
    }

    #[test]
    fn unmerged_and_redundant() {
        let c = Circuit::with_gates(
            2,
            vec![Gate::r(0, 1.0, 0.0), Gate::r(0, 0.5, 0.0), Gate::mcz(vec![0, 1]), Gate::r(1, 1.0, 0.0)],
        );
        let r = validate_practical_form(&c).unwrap();
        let merged: Vec<_> = r.violations.iter().filter(|v| v.criterion == Criterion::Merged).collect();
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].gate, Some(1));
        let redundant: Vec<_> = r.violations.iter().filter(|v| v.criterion == Criterion::NoRedundancy).collect();
        assert_eq!(redundant.len(), 1);
        assert_eq!((redundant[0].gate, redundant[0].qubit), (Some(2), Some(1)));
    }

    #[test]
    fn non_native_flagged() {
        let c = Circuit::with_gates(2, vec![Gate::H { qubit: 0 }, Gate::Cnot { qubits: [0, 1] }]);
        let r = validate_practical_form(&c).unwrap();
        assert_eq!(r.violations.iter().filter(|v| v.criterion == Criterion::NativeGates).count(), 2);
    }

    #[test]
    fn connectivity_checked_when_graph_given() {
        let g = triangular_lattice(1, 4).unwrap();
        let c = Circuit::with_gates(
            2,
            vec![Gate::r(0, 1.0, 0.0), Gate::r(1, 1.0, 0.0), Gate::mcz(vec![0, 1])],
        );
        assert!(validate_with_connectivity(&c, &g, &[0, 1]).unwrap().is_empty());
        let r = validate_with_connectivity(&c, &g, &[0, 3]).unwrap();
        assert!(r.connectivity_checked);
        assert!(r.has(Criterion::Connectivity));
    }

    #[test]
    fn out_of_range_is_structural() {
        let c = Circuit::with_gates(1, vec![Gate::r(3, 1.0, 0.0)]);
        assert!(validate_practical_form(&c).is_err());
    }
}
