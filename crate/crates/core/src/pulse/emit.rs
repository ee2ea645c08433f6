use std::collections::BTreeSet;

use super::order::{final_gates, ScheduleOrder};
use super::plan::BlockPlan;
use crate::circuit::{Circuit, Gate};
use crate::device::TimingParams;
use crate::error::{Error, Result};
use crate::sequence::{mcz_pulse_train, Instruction, PulseSequence, Role};
use crate::tick::Tick;

/// Append-only two-channel timeline with ASAP placement.
#[derive(Debug, Clone)]
pub(crate) struct Timeline {
    pub seq: PulseSequence,
    pub ryd_free: Tick,
    pub ram_free: Tick,
    ryd_target: Option<usize>,
    ram_target: Option<usize>,
    /// Earliest start for the next operation on each qubit.
    pub qubit_free: Vec<Tick>,
}

impl Timeline {
    pub fn new(n_qubits: usize, timing: TimingParams) -> Self {
        let zero = Tick::from_integer(0);
        Timeline {
            seq: PulseSequence::empty(n_qubits, timing),
            ryd_free: zero,
            ram_free: zero,
            ryd_target: None,
            ram_target: None,
            qubit_free: vec![zero; n_qubits],
        }
    }

    pub fn makespan(&self) -> Tick {
        self.ryd_free.max(self.ram_free)
    }

    /// Place a Raman pulse for `gate`.
    pub fn raman(&mut self, gate: &Gate) -> Result<()> {
        let Gate::R { qubit, theta, phi } = *gate else {
            return Err(Error::Internal(format!("cannot drive {gate:?} on the Raman channel")));
        };
        let t = self.seq.timing;
        let retarget = self.ram_target != Some(qubit);
        let earliest = self.ram_free + if retarget { t.delta_t } else { Tick::from_integer(0) };
        let start = earliest.max(self.qubit_free[qubit]);
        if retarget {
            self.seq.raman.push(Instruction::retarget(start - t.delta_t, qubit, &t));
            self.ram_target = Some(qubit);
        }
        self.seq.raman.push(Instruction::pulse(start, qubit, t.delta_pi, Role::Raman { theta, phi }, None));
        self.ram_free = start + t.delta_pi;
        self.qubit_free[qubit] = self.ram_free;
        Ok(())
    }

    /// Place one Rydberg pulse of block `block`.
    pub fn rydberg(&mut self, qubit: usize, role: Role, block: usize) {
        let t = self.seq.timing;
        let retarget = self.ryd_target != Some(qubit);
        let earliest = self.ryd_free + if retarget { t.delta_t } else { Tick::from_integer(0) };
        let start = earliest.max(self.qubit_free[qubit]);
        if retarget {
            self.seq.rydberg.push(Instruction::retarget(start - t.delta_t, qubit, &t));
            self.ryd_target = Some(qubit);
        }
        let duration = if role == Role::TwoPi { t.two_pi() } else { t.delta_pi };
        self.seq.rydberg.push(Instruction::pulse(start, qubit, duration, role, Some(block)));
        self.ryd_free = start + duration;
        self.qubit_free[qubit] = self.ryd_free;
    }

    /// Emit one absorbed block with its standalone and parallel gates.
    pub fn block(
        &mut self,
        circuit: &Circuit,
        index: usize,
        plan: &BlockPlan,
        pre: Option<usize>,
        parallel: Option<usize>,
    ) -> Result<()> {
        let order = plan.train_qubits();
        if let Some(g) = pre {
            self.raman(&circuit.gates[g])?;
        }
        for q in &order {
            if let Some(&g) = plan.absorbed_before.get(q) {
                self.raman(&circuit.gates[g])?;
            }
        }
        for (q, role) in mcz_pulse_train(&order, plan.border, plan.two_pi_recipient)? {
            self.rydberg(q, role, index);
        }
        if let Some(g) = parallel {
            self.raman(&circuit.gates[g])?;
        }
        for q in order.iter().rev() {
            if let Some(&g) = plan.absorbed_after.get(q) {
                self.raman(&circuit.gates[g])?;
            }
        }
        Ok(())
    }
}

/// Lay out `order` on the two channels, returning the sequence and the order
/// actually realized. A parallel gate stays beside its block only when that
/// does not finish the following block later than running it elsewhere.
pub fn emit_timeline(
    order: &ScheduleOrder,
    circuit: &Circuit,
    timing: TimingParams,
) -> Result<(PulseSequence, ScheduleOrder)> {
    let finals: BTreeSet<usize> = final_gates(circuit, &order.plan)?.into_keys().collect();
    let mut realized = order.clone();
    let mut tl = Timeline::new(circuit.n_qubits, timing);
    let mut pending: Vec<usize> = Vec::new();
    let blocks = &order.plan.blocks;

    for k in 0..realized.items.len() {
        if realized.items[k].parallel_gate.is_none() {
            let plan = &blocks[realized.items[k].block];
            if let Some(pos) = pending.iter().position(|&g| !plan.contains(circuit.gates[g].qubits()[0])) {
                realized.items[k].parallel_gate = Some(pending.remove(pos));
            }
        }
        let item = realized.items[k].clone();
        let plan = &blocks[item.block];
        if let Some(p) = item.parallel_gate {
            let next = realized.items.get(k + 1).cloned();
            let is_final = finals.contains(&p);

            let mut keep = tl.clone();
            keep.block(circuit, k, plan, item.pre_gate, Some(p))?;
            let mut defer = tl.clone();
            defer.block(circuit, k, plan, item.pre_gate, None)?;
            let keep_wins = match &next {
                Some(n) => {
                    let nplan = &blocks[n.block];
                    keep.block(circuit, k + 1, nplan, n.pre_gate, n.parallel_gate)?;
                    let (pre, par) = if is_final {
                        (n.pre_gate, n.parallel_gate.or(Some(p)))
                    } else {
                        (Some(p), n.parallel_gate)
                    };
                    defer.block(circuit, k + 1, nplan, pre, par)?;
                    (keep.ryd_free, keep.ram_free) <= (defer.ryd_free, defer.ram_free)
                }
                None => {
                    for &g in realized.trailing.iter().chain(&pending) {
                        keep.raman(&circuit.gates[g])?;
                    }
                    let mut rest: Vec<usize> = realized.trailing.iter().chain(&pending).copied().collect();
                    rest.push(p);
                    rest.sort_unstable();
                    for &g in &rest {
                        defer.raman(&circuit.gates[g])?;
                    }
                    keep.makespan() <= defer.makespan()
                }
            };
            if !keep_wins {
                realized.items[k].parallel_gate = None;
                if is_final {
                    pending.push(p);
                } else {
                    let n = realized
                        .items
                        .get_mut(k + 1)
                        .ok_or_else(|| Error::Internal(format!("gate {p} precedes no block")))?;
                    if n.pre_gate.is_some() {
                        return Err(Error::Internal(format!("block {} has two standalone gates", k + 1)));
                    }
                    n.pre_gate = Some(p);
                }
            }
        }
        let item = &realized.items[k];
        tl.block(circuit, k, plan, item.pre_gate, item.parallel_gate)?;
    }

    realized.trailing.extend(pending);
    realized.trailing.sort_unstable();
    for &g in &realized.trailing {
        tl.raman(&circuit.gates[g])?;
    }
    realized.check_coverage(circuit)?;
    Ok((tl.seq, realized))
}
