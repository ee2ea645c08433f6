//! Pulse-level scheduling: absorb 1q gates into MCZ pulse trains, order the
//! resulting blocks, then lay them out as soon as possible.

mod emit;
mod order;
mod plan;

use serde::Serialize;

pub use emit::emit_timeline;
pub use order::{order_blocks, ScheduleOrder, ScheduledBlock};
pub use plan::{analysis_order, plan_absorption, AbsorptionPlan, Adjacency, BlockPlan};

use crate::circuit::{layerize, Circuit};
use crate::device::TimingParams;
use crate::error::Result;
use crate::sequence::{mcz_block_duration, InstrKind, PulseSequence};
use crate::tick::Tick;

/// A pulse-level schedule with the decisions that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    pub sequence: PulseSequence,
    pub order: ScheduleOrder,
}

pub fn schedule_pulse_level(circuit: &Circuit, timing: TimingParams) -> Result<PulseSequence> {
    Ok(schedule_pulse_level_detailed(circuit, timing)?.sequence)
}

pub fn schedule_pulse_level_detailed(circuit: &Circuit, timing: TimingParams) -> Result<PulseSchedule> {
    let layered = layerize(circuit)?;
    let plan = plan_absorption(&layered);
    let order = order_blocks(&layered, &plan)?;
    let (sequence, order) = emit_timeline(&order, circuit, timing)?;
    Ok(PulseSchedule { sequence, order })
}

/// Σ(block + leading retarget) plus two standalone 1q gates.
pub fn duration_bound(plan: &AbsorptionPlan, timing: &TimingParams) -> Result<Tick> {
    let mut total = (timing.delta_pi + timing.delta_t) * 2;
    for b in &plan.blocks {
        total += mcz_block_duration(b.qubits.len(), timing)? + timing.delta_t;
    }
    Ok(total)
}

/// Rydberg idle time beyond retargets, before some pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StreamGap {
    pub block: usize,
    /// Index of the pulse in the Rydberg channel.
    pub pulse: usize,
    #[serde(with = "crate::tick::serde_tick")]
    pub idle: Tick,
    /// The block opens with a standalone pre-gate.
    pub flagged: bool,
}

/// Every pause on the Rydberg channel not explained by a retarget.
pub fn stream_gaps(schedule: &PulseSchedule) -> Vec<StreamGap> {
    let seq = &schedule.sequence;
    let mut out = Vec::new();
    let mut prev_end = Tick::from_integer(0);
    let mut retargets = Tick::from_integer(0);
    for (i, ins) in seq.rydberg.iter().enumerate() {
        if ins.kind == InstrKind::Retarget {
            retargets += ins.duration;
            continue;
        }
        let idle = ins.t_start - prev_end - retargets;
        if idle > Tick::from_integer(0) {
            let block = ins.block.unwrap_or(usize::MAX);
            let first_of_block = i == 0 || seq.rydberg[..i].iter().rev().find(|p| p.is_pulse()).and_then(|p| p.block) != ins.block;
            let flagged = first_of_block
                && schedule.order.items.iter().any(|it| it.block == block && it.pre_gate.is_some());
            out.push(StreamGap { block, pulse: i, idle, flagged });
        }
        prev_end = ins.end();
        retargets = Tick::from_integer(0);
    }
    out
}
