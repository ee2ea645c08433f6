use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::plan::{Adjacency, AbsorptionPlan};
use crate::circuit::{Circuit, LayeredCircuit};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScheduledBlock {
    /// Index into `AbsorptionPlan::blocks`.
    pub block: usize,
    /// Unabsorbed 1q gate executed on its own right before the block.
    pub pre_gate: Option<usize>,
    /// 1q gate on a qubit outside the block, executed alongside it.
    pub parallel_gate: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScheduleOrder {
    pub plan: AbsorptionPlan,
    pub items: Vec<ScheduledBlock>,
    /// 1q gates left over after the last block, in circuit order.
    pub trailing: Vec<usize>,
}

impl ScheduleOrder {
    /// Number of blocks with a standalone pre-gate.
    pub fn standalone_pre_gates(&self) -> usize {
        self.items.iter().filter(|i| i.pre_gate.is_some()).count()
    }

    /// Every gate of `circuit` must be placed exactly once.
    pub fn check_coverage(&self, circuit: &Circuit) -> Result<()> {
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        let mut note = |g: usize| *seen.entry(g).or_default() += 1;
        for item in &self.items {
            let b = &self.plan.blocks[item.block];
            note(b.mcz);
            b.absorbed_before.values().chain(b.absorbed_after.values()).for_each(|&g| note(g));
            item.pre_gate.into_iter().chain(item.parallel_gate).for_each(&mut note);
        }
        self.trailing.iter().for_each(|&g| note(g));
        for g in 0..circuit.gates.len() {
            match seen.get(&g).copied().unwrap_or(0) {
                1 => {}
                0 => return Err(Error::Internal(format!("gate {g} is never scheduled"))),
                k => return Err(Error::Internal(format!("gate {g} is scheduled {k} times"))),
            }
        }
        if seen.len() != circuit.gates.len() {
            return Err(Error::Internal("schedule refers to gates outside the circuit".into()));
        }
        Ok(())
    }
}

/// Unabsorbed 1q gates that end their qubit's gate list, mapped to the plan
/// index of the block they follow (`None` on a qubit without MCZs).
pub(crate) fn final_gates(circuit: &Circuit, plan: &AbsorptionPlan) -> Result<BTreeMap<usize, Option<usize>>> {
    let absorbed = plan.absorbed_gates();
    let block_of: BTreeMap<usize, usize> = plan.blocks.iter().enumerate().map(|(i, b)| (b.mcz, i)).collect();
    let mut out = BTreeMap::new();
    for list in circuit.per_qubit_gates() {
        let Some(&last) = list.last() else { continue };
        if !circuit.gates[last].is_single_qubit() || absorbed.contains(&last) {
            continue;
        }
        let block = match list.len().checked_sub(2).map(|i| list[i]) {
            None => None,
            Some(p) => Some(
                block_of
                    .get(&p)
                    .copied()
                    .ok_or_else(|| Error::Internal(format!("final gate {last} does not follow an MCZ")))?,
            ),
        };
        out.insert(last, block);
    }
    Ok(out)
}

/// Sequence blocks and the unabsorbed 1q gates around them.
pub fn order_blocks(layered: &LayeredCircuit, plan: &AbsorptionPlan) -> Result<ScheduleOrder> {
    let circuit = &layered.circuit;
    let adj = Adjacency::of(layered);
    let absorbed = plan.absorbed_gates();
    let mcz_count = circuit.gates.iter().filter(|g| g.is_mcz()).count();
    if plan.blocks.len() != mcz_count {
        return Err(Error::Internal(format!("plan has {} blocks for {mcz_count} MCZs", plan.blocks.len())));
    }
    let finals = final_gates(circuit, plan)?;
    let mut ready: BTreeSet<usize> = finals.iter().filter(|(_, b)| b.is_none()).map(|(&g, _)| g).collect();
    let mut items: Vec<ScheduledBlock> = Vec::with_capacity(plan.blocks.len());

    for (k, block) in plan.blocks.iter().enumerate() {
        for &q in &block.qubits {
            let Some(g) = adj.before(block.mcz, q) else { continue };
            if q != block.border && !absorbed.contains(&g) {
                return Err(Error::Internal(format!("gate {g} before block {k} is neither absorbed nor on the border")));
            }
        }
        let pre = adj.before(block.mcz, block.border).filter(|g| !absorbed.contains(g));
        let mut item = ScheduledBlock { block: k, pre_gate: None, parallel_gate: None };
        match (pre, items.last_mut()) {
            (Some(g), Some(prev)) if prev.parallel_gate.is_none() && !plan.blocks[prev.block].contains(block.border) => {
                prev.parallel_gate = Some(g);
            }
            (Some(g), _) => item.pre_gate = Some(g),
            (None, Some(prev)) if prev.parallel_gate.is_none() => {
                let pick = ready.iter().copied().find(|g| finals[g] != Some(prev.block));
                if let Some(g) = pick {
                    ready.remove(&g);
                    prev.parallel_gate = Some(g);
                }
            }
            (None, _) => {}
        }
        items.push(item);
        ready.extend(finals.iter().filter(|&(_, &b)| b == Some(k)).map(|(&g, _)| g));
    }

    if let Some(last) = items.last_mut() {
        if last.parallel_gate.is_none() {
            let pick = ready.iter().copied().find(|g| finals[g] != Some(last.block));
            if let Some(g) = pick {
                ready.remove(&g);
                last.parallel_gate = Some(g);
            }
        }
    }
    let trailing: Vec<usize> = ready.into_iter().collect();
    let order = ScheduleOrder { plan: plan.clone(), items, trailing };
    order.check_coverage(circuit)?;
    Ok(order)
}
