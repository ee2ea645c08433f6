use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::circuit::LayeredCircuit;

/// Absorption decisions for one MCZ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockPlan {
    /// Gate index of the MCZ in the circuit.
    pub mcz: usize,
    pub qubits: Vec<usize>,
    pub border: usize,
    pub two_pi_recipient: usize,
    /// Qubits receiving π pulses between the border and the 2π recipient, in
    /// train order.
    pub pi_order: Vec<usize>,
    /// qubit → 1q gate run inside the block before the qubit's window.
    pub absorbed_before: BTreeMap<usize, usize>,
    /// qubit → 1q gate run inside the block after the qubit's window.
    pub absorbed_after: BTreeMap<usize, usize>,
}

impl BlockPlan {
    /// Qubits in train order from the border up to the 2π recipient.
    pub fn train_qubits(&self) -> Vec<usize> {
        let mut out = vec![self.border];
        out.extend(&self.pi_order);
        out.push(self.two_pi_recipient);
        out
    }

    pub fn absorbed_count(&self) -> usize {
        self.absorbed_before.len() + self.absorbed_after.len()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.qubits.contains(&q)
    }
}

/// Blocks in analysis order; every MCZ of the circuit appears once.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AbsorptionPlan {
    pub blocks: Vec<BlockPlan>,
}

impl AbsorptionPlan {
    pub fn absorbed_gates(&self) -> BTreeSet<usize> {
        self.blocks
            .iter()
            .flat_map(|b| b.absorbed_before.values().chain(b.absorbed_after.values()).copied())
            .collect()
    }

    pub fn absorbed_count(&self) -> usize {
        self.blocks.iter().map(BlockPlan::absorbed_count).sum()
    }
}

/// The 1q gates directly before and after each MCZ on each of its qubits.
#[derive(Debug, Clone, Default)]
pub struct Adjacency {
    before: BTreeMap<(usize, usize), usize>,
    after: BTreeMap<(usize, usize), usize>,
}

impl Adjacency {
    pub fn of(layered: &LayeredCircuit) -> Self {
        let c = &layered.circuit;
        let mut adj = Adjacency::default();
        for list in c.per_qubit_gates().iter() {
            for w in list.windows(2) {
                let (a, b) = (w[0], w[1]);
                let (ga, gb) = (&c.gates[a], &c.gates[b]);
                if ga.is_single_qubit() && gb.is_mcz() {
                    adj.before.insert((b, ga.qubits()[0]), a);
                }
                if ga.is_mcz() && gb.is_single_qubit() {
                    adj.after.insert((a, gb.qubits()[0]), b);
                }
            }
        }
        adj
    }

    pub fn before(&self, mcz: usize, q: usize) -> Option<usize> {
        self.before.get(&(mcz, q)).copied()
    }

    pub fn after(&self, mcz: usize, q: usize) -> Option<usize> {
        self.after.get(&(mcz, q)).copied()
    }
}

/// MCZ gate indices in analysis order: by layer, then by lowest qubit.
pub fn analysis_order(layered: &LayeredCircuit) -> Vec<usize> {
    let mut out = Vec::new();
    for layer in &layered.multis {
        let mut ids = layer.clone();
        ids.sort_by_key(|&id| layered.gate(id).qubits().into_iter().min());
        out.extend(ids);
    }
    out
}

/// Decide which 1q gates each MCZ absorbs.
pub fn plan_absorption(layered: &LayeredCircuit) -> AbsorptionPlan {
    let adj = Adjacency::of(layered);
    let mut taken: BTreeSet<usize> = BTreeSet::new();
    let mut prev_border: Option<usize> = None;
    let mut blocks = Vec::new();
    for mcz in analysis_order(layered) {
        let mut qubits = layered.gate(mcz).qubits();
        qubits.sort_unstable();
        let n = qubits.len();
        let before = |q: usize| adj.before(mcz, q).filter(|g| !taken.contains(g));
        let after = |q: usize| adj.after(mcz, q);

        let mut ranked: Vec<(u8, usize)> = qubits
            .iter()
            .filter_map(|&q| {
                let (b, a) = (before(q).is_some(), after(q).is_some());
                let rank = match (b, a) {
                    _ if b && prev_border == Some(q) => 1,
                    (true, true) => 2,
                    (true, false) => 3,
                    (false, true) => 4,
                    (false, false) => return None,
                };
                Some((rank, q))
            })
            .collect();
        ranked.sort_unstable();
        ranked.truncate(n - 1);
        let selected: BTreeSet<usize> = ranked.iter().map(|&(_, q)| q).collect();

        let absorbable = |q: usize| before(q).is_some() as usize + after(q).is_some() as usize;
        let border = qubits
            .iter()
            .copied()
            .filter(|q| !selected.contains(q))
            .min_by_key(|&q| (absorbable(q), q))
            .expect("at most n - 1 qubits are selected");

        let mut absorbed_before = BTreeMap::new();
        let mut absorbed_after = BTreeMap::new();
        for &q in &selected {
            if let Some(g) = before(q) {
                absorbed_before.insert(q, g);
            }
            if let Some(g) = after(q) {
                absorbed_after.insert(q, g);
            }
        }
        let two_pi_recipient = selected
            .iter()
            .copied()
            .find(|q| absorbed_before.contains_key(q) && absorbed_after.contains_key(q))
            .unwrap_or_else(|| *qubits.iter().find(|&&q| q != border).expect("n >= 2"));
        let pi_order = qubits.iter().copied().filter(|&q| q != border && q != two_pi_recipient).collect();

        taken.extend(absorbed_before.values().chain(absorbed_after.values()));
        prev_border = Some(border);
        blocks.push(BlockPlan { mcz, qubits, border, two_pi_recipient, pi_order, absorbed_before, absorbed_after });
    }
    AbsorptionPlan { blocks }
}
