//! Two-channel pulse timelines: instructions, MCZ pulse trains, duration
//! accounting and the physical well-formedness rules.

mod check;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::device::TimingParams;
use crate::error::{Error, Result};
use crate::tick::{serde_tick, Tick};

pub use check::{check_wellformed, involvement_windows, Clause, InstrRef, WellformedReport, Window, WellformedViolation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Rydberg,
    Raman,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstrKind {
    Retarget,
    Pulse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// |0⟩ ↔ |r⟩ half cycle.
    Pi,
    /// Full |0⟩ → |r⟩ → |0⟩ cycle.
    TwoPi,
    /// Hyperfine rotation R(θ,φ).
    Raman { theta: f64, phi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instruction {
    #[serde(with = "serde_tick")]
    pub t_start: Tick,
    pub kind: InstrKind,
    /// Destination qubit of a retarget, or the qubit a pulse acts on.
    pub target: usize,
    #[serde(with = "serde_tick")]
    pub duration: Tick,
    #[serde(default)]
    pub role: Option<Role>,
    /// MCZ block tag for Rydberg pulses.
    #[serde(default)]
    pub block: Option<usize>,
}

impl Instruction {
    pub fn retarget(t_start: Tick, target: usize, timing: &TimingParams) -> Self {
        Instruction { t_start, kind: InstrKind::Retarget, target, duration: timing.delta_t, role: None, block: None }
    }

    pub fn pulse(t_start: Tick, target: usize, duration: Tick, role: Role, block: Option<usize>) -> Self {
        Instruction { t_start, kind: InstrKind::Pulse, target, duration, role: Some(role), block }
    }

    pub fn end(&self) -> Tick {
        self.t_start + self.duration
    }

    pub fn is_pulse(&self) -> bool {
        self.kind == InstrKind::Pulse
    }
}

/// Per-channel instruction lists, each sorted by start time.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    pub n_qubits: usize,
    pub timing: TimingParams,
    pub rydberg: Vec<Instruction>,
    pub raman: Vec<Instruction>,
}

#[derive(Serialize, Deserialize)]
struct Channels {
    rydberg: Vec<Instruction>,
    raman: Vec<Instruction>,
}

#[derive(Serialize, Deserialize)]
struct SequenceFile {
    n_qubits: usize,
    timing: TimingParams,
    channels: Channels,
}

impl PulseSequence {
    pub fn empty(n_qubits: usize, timing: TimingParams) -> Self {
        PulseSequence { n_qubits, timing, rydberg: Vec::new(), raman: Vec::new() }
    }

    pub fn channel(&self, ch: Channel) -> &[Instruction] {
        match ch {
            Channel::Rydberg => &self.rydberg,
            Channel::Raman => &self.raman,
        }
    }

    /// Latest instruction end; zero when empty.
    pub fn duration(&self) -> Tick {
        duration(self)
    }

    /// Rydberg pulse indices grouped by block tag, in channel order.
    pub fn blocks(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, ins) in self.rydberg.iter().enumerate() {
            if let (InstrKind::Pulse, Some(b)) = (ins.kind, ins.block) {
                out.entry(b).or_default().push(i);
            }
        }
        out
    }

    /// The same sequence without any Raman instruction.
    pub fn without_raman(&self) -> PulseSequence {
        PulseSequence { raman: Vec::new(), ..self.clone() }
    }

    pub fn to_json(&self) -> String {
        let file = SequenceFile {
            n_qubits: self.n_qubits,
            timing: self.timing,
            channels: Channels { rydberg: self.rydberg.clone(), raman: self.raman.clone() },
        };
        serde_json::to_string_pretty(&file).expect("sequence serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: SequenceFile = serde_json::from_str(s)?;
        let timing = TimingParams::new(f.timing.delta_pi, f.timing.delta_t)?;
        Ok(PulseSequence { n_qubits: f.n_qubits, timing, rydberg: f.channels.rydberg, raman: f.channels.raman })
    }
}

pub fn duration(seq: &PulseSequence) -> Tick {
    seq.rydberg
        .iter()
        .chain(&seq.raman)
        .map(Instruction::end)
        .max()
        .unwrap_or_else(|| Tick::from_integer(0))
}

/// Target and role of each pulse in an MCZ train.
///
/// `qubits` fixes the order of the π pulses: the border goes first, the 2π
/// recipient sits in the middle, and the others follow their order in `qubits`.
pub fn mcz_pulse_train(qubits: &[usize], border: usize, two_pi_recipient: usize) -> Result<Vec<(usize, Role)>> {
    let n = qubits.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("an MCZ needs at least 2 qubits, got {n}")));
    }
    if border == two_pi_recipient {
        return Err(Error::InvalidArgument("border and 2π recipient must differ".into()));
    }
    if !qubits.contains(&border) || !qubits.contains(&two_pi_recipient) {
        return Err(Error::InvalidArgument("border and 2π recipient must belong to the gate".into()));
    }
    let mut first_half = vec![border];
    first_half.extend(qubits.iter().copied().filter(|&q| q != border && q != two_pi_recipient));
    let mut train: Vec<(usize, Role)> = first_half.iter().map(|&q| (q, Role::Pi)).collect();
    train.push((two_pi_recipient, Role::TwoPi));
    train.extend(first_half.iter().rev().map(|&q| (q, Role::Pi)));
    Ok(train)
}

/// Rydberg time of an `n`-qubit block, excluding its leading retarget.
pub fn mcz_block_duration(n: usize, timing: &TimingParams) -> Result<Tick> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("an MCZ needs at least 2 qubits, got {n}")));
    }
    let n = n as i64;
    Ok(timing.delta_pi * (2 * n) + timing.delta_t * (2 * n - 2))
}
