use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::{Channel, InstrKind, Instruction, PulseSequence, Role};
use crate::circuit::{normalize_angle, Circuit, Gate};
use crate::tick::Tick;

const ANGLE_TOL: f64 = 1e-9;

/// Which physical rule an instruction breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    /// Durations, roles and targets fit the channel and timing.
    Shape,
    /// (a) instructions on one channel never overlap.
    Overlap,
    /// (b) a pulse needs its channel aimed at its qubit.
    Retarget,
    /// (c) each MCZ is one uninterrupted palindromic train.
    Train,
    /// (d) no Raman pulse inside a qubit's involvement window.
    Conflict,
    /// (e) per-qubit circuit order respected.
    Order,
    /// (f) every gate realized exactly once.
    Coverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct InstrRef {
    pub channel: Channel,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WellformedViolation {
    pub clause: Clause,
    pub instructions: Vec<InstrRef>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct WellformedReport {
    pub violations: Vec<WellformedViolation>,
}

impl WellformedReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, clause: Clause) -> bool {
        self.violations.iter().any(|v| v.clause == clause)
    }

    fn push(&mut self, clause: Clause, instructions: Vec<InstrRef>, message: impl Into<String>) {
        self.violations.push(WellformedViolation { clause, instructions, message: message.into() });
    }
}

impl fmt::Display for WellformedReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{:?}: {}", v.clause, v.message)?;
        }
        Ok(())
    }
}

/// Interval during which a qubit takes part in an MCZ block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub block: usize,
    pub qubit: usize,
    pub start: Tick,
    pub end: Tick,
}

fn rref(index: usize) -> InstrRef {
    InstrRef { channel: Channel::Rydberg, index }
}

fn mref(index: usize) -> InstrRef {
    InstrRef { channel: Channel::Raman, index }
}

fn overlaps(a0: Tick, a1: Tick, b0: Tick, b1: Tick) -> bool {
    a0 < b1 && b0 < a1
}

/// Involvement windows of every block: from a qubit's first pulse start to
/// its last pulse end within the block.
pub fn involvement_windows(seq: &PulseSequence) -> Vec<Window> {
    let mut out = Vec::new();
    for (block, idx) in seq.blocks() {
        let mut per_qubit: BTreeMap<usize, (Tick, Tick)> = BTreeMap::new();
        for &i in &idx {
            let ins = &seq.rydberg[i];
            per_qubit
                .entry(ins.target)
                .and_modify(|w| {
                    w.0 = w.0.min(ins.t_start);
                    w.1 = w.1.max(ins.end());
                })
                .or_insert((ins.t_start, ins.end()));
        }
        out.extend(per_qubit.into_iter().map(|(qubit, (start, end))| Window { block, qubit, start, end }));
    }
    out
}

fn check_shape(seq: &PulseSequence, report: &mut WellformedReport) {
    let t = &seq.timing;
    for (ch, list) in [(Channel::Rydberg, &seq.rydberg), (Channel::Raman, &seq.raman)] {
        for (i, ins) in list.iter().enumerate() {
            let r = InstrRef { channel: ch, index: i };
            if ins.target >= seq.n_qubits {
                report.push(Clause::Shape, vec![r], format!("target {} out of range", ins.target));
            }
            let ok = match (ins.kind, ins.role, ch) {
                (InstrKind::Retarget, _, _) => ins.duration == t.delta_t,
                (InstrKind::Pulse, Some(Role::Pi), Channel::Rydberg) => {
                    ins.duration > Tick::from_integer(0) && ins.duration <= t.delta_pi
                }
                (InstrKind::Pulse, Some(Role::TwoPi), Channel::Rydberg) => ins.duration == t.two_pi(),
                (InstrKind::Pulse, Some(Role::Raman { .. }), Channel::Raman) => {
                    ins.duration > Tick::from_integer(0) && ins.duration <= t.delta_pi
                }
                _ => false,
            };
            if !ok {
                report.push(Clause::Shape, vec![r], format!("{ch:?} instruction {i} has an invalid role or duration"));
            }
        }
    }
}

fn check_channel_order(ch: Channel, list: &[Instruction], report: &mut WellformedReport) {
    for i in 1..list.len() {
        if list[i].t_start < list[i - 1].end() {
            report.push(
                Clause::Overlap,
                vec![InstrRef { channel: ch, index: i - 1 }, InstrRef { channel: ch, index: i }],
                format!("{ch:?} instructions {} and {i} overlap or are out of order", i - 1),
            );
        }
    }
    let mut aimed: Option<usize> = None;
    for (i, ins) in list.iter().enumerate() {
        match ins.kind {
            InstrKind::Retarget => aimed = Some(ins.target),
            InstrKind::Pulse => {
                if aimed != Some(ins.target) {
                    report.push(
                        Clause::Retarget,
                        vec![InstrRef { channel: ch, index: i }],
                        format!("{ch:?} pulse {i} on qubit {} without a retarget", ins.target),
                    );
                }
            }
        }
    }
}

/// Qubit set of each well-shaped block, or `None` for broken trains.
fn check_trains(seq: &PulseSequence, report: &mut WellformedReport) -> BTreeMap<usize, Option<BTreeSet<usize>>> {
    let pulses: Vec<usize> = (0..seq.rydberg.len()).filter(|&i| seq.rydberg[i].is_pulse()).collect();
    for &i in &pulses {
        if seq.rydberg[i].block.is_none() {
            report.push(Clause::Train, vec![rref(i)], format!("Rydberg pulse {i} belongs to no block"));
        }
    }
    let mut out = BTreeMap::new();
    for (block, idx) in seq.blocks() {
        let refs: Vec<InstrRef> = idx.iter().map(|&i| rref(i)).collect();
        // contiguous among Rydberg pulses
        let first = pulses.iter().position(|&p| p == idx[0]).expect("block pulse is a pulse");
        let contiguous = idx.iter().enumerate().all(|(k, &i)| pulses.get(first + k) == Some(&i));
        if !contiguous {
            report.push(Clause::Train, refs.clone(), format!("block {block} is interrupted by other Rydberg pulses"));
        }
        let len = idx.len();
        let targets: Vec<usize> = idx.iter().map(|&i| seq.rydberg[i].target).collect();
        let roles: Vec<Option<Role>> = idx.iter().map(|&i| seq.rydberg[i].role).collect();
        let mut shaped = len >= 3 && len % 2 == 1;
        if shaped {
            let mid = len / 2;
            shaped &= roles[mid] == Some(Role::TwoPi);
            shaped &= (0..len).filter(|&k| k != mid).all(|k| roles[k] == Some(Role::Pi));
            shaped &= (0..len).all(|k| targets[k] == targets[len - 1 - k]);
            let distinct: BTreeSet<usize> = targets[..=mid].iter().copied().collect();
            shaped &= distinct.len() == mid + 1;
        }
        if shaped {
            out.insert(block, Some(targets.iter().copied().collect()));
        } else {
            report.push(Clause::Train, refs, format!("block {block} is not a palindromic MCZ train"));
            out.insert(block, None);
        }
    }
    out
}

enum Op {
    Raman { index: usize, theta: f64, phi: f64 },
    Window { block: usize },
}

fn angles_match(a: f64, b: f64) -> bool {
    let d = normalize_angle(a - b);
    d < ANGLE_TOL || (2.0 * std::f64::consts::PI - d) < ANGLE_TOL
}

/// Check a sequence against every physical rule and against the circuit it
/// claims to realize. An empty report means the sequence is well-formed.
pub fn check_wellformed(seq: &PulseSequence, circuit: &Circuit) -> WellformedReport {
    let mut report = WellformedReport::default();
    check_shape(seq, &mut report);
    check_channel_order(Channel::Rydberg, &seq.rydberg, &mut report);
    check_channel_order(Channel::Raman, &seq.raman, &mut report);
    let block_sets = check_trains(seq, &mut report);

    let windows = involvement_windows(seq);
    for (i, ins) in seq.raman.iter().enumerate() {
        if !ins.is_pulse() {
            continue;
        }
        for w in windows.iter().filter(|w| w.qubit == ins.target) {
            if overlaps(ins.t_start, ins.end(), w.start, w.end) {
                report.push(
                    Clause::Conflict,
                    vec![mref(i)],
                    format!("Raman pulse {i} hits qubit {} during block {}", ins.target, w.block),
                );
            }
        }
    }

    if seq.n_qubits != circuit.n_qubits {
        report.push(
            Clause::Coverage,
            vec![],
            format!("sequence has {} qubits, circuit has {}", seq.n_qubits, circuit.n_qubits),
        );
        return report;
    }

    // Per-qubit op lists in time order.
    let n = seq.n_qubits;
    let mut ops: Vec<Vec<(Tick, Tick, Op)>> = (0..n).map(|_| Vec::new()).collect();
    for (i, ins) in seq.raman.iter().enumerate() {
        if let (InstrKind::Pulse, Some(Role::Raman { theta, phi })) = (ins.kind, ins.role) {
            if ins.target < n {
                ops[ins.target].push((ins.t_start, ins.end(), Op::Raman { index: i, theta, phi }));
            }
        }
    }
    for w in &windows {
        if w.qubit < n {
            ops[w.qubit].push((w.start, w.end, Op::Window { block: w.block }));
        }
    }
    for list in ops.iter_mut() {
        list.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    }

    let per_qubit = circuit.per_qubit_gates();
    let mut gate_block: BTreeMap<usize, usize> = BTreeMap::new();
    let mut block_gate: BTreeMap<usize, usize> = BTreeMap::new();
    for q in 0..n {
        let list = &ops[q];
        for k in 1..list.len() {
            if list[k].0 < list[k - 1].1 {
                report.push(Clause::Order, vec![], format!("operations on qubit {q} overlap in time"));
            }
        }
        let gates: Vec<usize> = per_qubit[q]
            .iter()
            .copied()
            .filter(|&g| !matches!(circuit.gates[g], Gate::VirtualZ { .. }))
            .collect();
        if gates.len() != list.len() {
            report.push(
                Clause::Coverage,
                vec![],
                format!("qubit {q}: circuit has {} operations, sequence has {}", gates.len(), list.len()),
            );
        }
        for (&g, (_, _, op)) in gates.iter().zip(list) {
            match (&circuit.gates[g], op) {
                (Gate::R { theta, phi, .. }, Op::Raman { index, theta: t, phi: p }) => {
                    if (theta - t).abs() > ANGLE_TOL || !angles_match(*phi, *p) {
                        report.push(
                            Clause::Order,
                            vec![mref(*index)],
                            format!("qubit {q}: Raman pulse {index} does not realize gate {g}"),
                        );
                    }
                }
                (Gate::Mcz { qubits }, Op::Window { block }) => {
                    let set: BTreeSet<usize> = qubits.iter().copied().collect();
                    match block_sets.get(block) {
                        Some(Some(bs)) if *bs == set => {}
                        _ => report.push(
                            Clause::Order,
                            vec![],
                            format!("qubit {q}: block {block} does not realize gate {g}"),
                        ),
                    }
                    if let Some(&prev) = gate_block.get(&g) {
                        if prev != *block {
                            report.push(Clause::Coverage, vec![], format!("gate {g} split across blocks {prev} and {block}"));
                        }
                    } else {
                        gate_block.insert(g, *block);
                        if let Some(&other) = block_gate.get(block) {
                            report.push(Clause::Coverage, vec![], format!("block {block} realizes gates {other} and {g}"));
                        } else {
                            block_gate.insert(*block, g);
                        }
                    }
                }
                (gate, _) if !gate.is_native() => {
                    report.push(Clause::Coverage, vec![], format!("gate {g} is not native and cannot be scheduled"));
                }
                _ => report.push(
                    Clause::Order,
                    vec![],
                    format!("qubit {q}: operation order differs from the circuit at gate {g}"),
                ),
            }
        }
    }
    report
}
