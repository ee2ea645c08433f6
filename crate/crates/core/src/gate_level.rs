//! Baseline scheduler: whole gates only, with 1q gates run in parallel with
//! disjoint MCZs but never inside them.

use crate::circuit::{Gate, LayeredCircuit};
use crate::device::TimingParams;
use crate::error::{Error, Result};
use crate::pulse::Adjacency;
use crate::sequence::{mcz_pulse_train, Instruction, PulseSequence, Role};
use crate::tick::Tick;

/// One Raman pulse placed by gap filling; retargets are derived afterwards.
#[derive(Debug, Clone, Copy)]
struct RamanSlot {
    /// Earliest time any instruction aimed at the qubit may start.
    ready: Tick,
    start: Tick,
    qubit: usize,
    theta: f64,
    phi: f64,
}

struct RamanLane {
    timing: TimingParams,
    slots: Vec<RamanSlot>,
}

impl RamanLane {
    fn gap(&self, prev: Option<usize>, next: usize) -> Tick {
        if prev == Some(next) {
            Tick::from_integer(0)
        } else {
            self.timing.delta_t
        }
    }

    /// Whether a pulse on `qubit` at `start` fits between its neighbours,
    /// counting the retargets it adds or removes. No instruction aimed at
    /// the qubit, retargets included, may start before `ready`.
    fn fits(&self, ready: Tick, start: Tick, qubit: usize) -> bool {
        let pos = self.slots.partition_point(|s| s.start <= start);
        let prev = pos.checked_sub(1).map(|i| self.slots[i]);
        let lead = self.gap(prev.map(|p| p.qubit), qubit);
        let channel_free = prev.map_or(Tick::from_integer(0), |p| p.start + self.timing.delta_pi);
        if start - lead < channel_free.max(ready) {
            return false;
        }
        match self.slots.get(pos) {
            Some(n) => {
                let gap = self.gap(Some(qubit), n.qubit);
                n.start - gap >= start + self.timing.delta_pi && n.start - gap >= n.ready
            }
            None => true,
        }
    }

    /// Earliest start at or after `ready`, filling gaps left earlier.
    fn place(&mut self, ready: Tick, qubit: usize, theta: f64, phi: f64) -> Tick {
        let mut candidates = vec![ready, ready + self.timing.delta_t];
        for s in &self.slots {
            for gap in [Tick::from_integer(0), self.timing.delta_t] {
                let t = s.start + self.timing.delta_pi + gap;
                if t >= ready {
                    candidates.push(t);
                }
            }
        }
        candidates.sort();
        let start = candidates
            .into_iter()
            .find(|&t| self.fits(ready, t, qubit))
            .expect("the end of the lane always fits");
        let pos = self.slots.partition_point(|s| s.start <= start);
        self.slots.insert(pos, RamanSlot { ready, start, qubit, theta, phi });
        start
    }

    /// Qubit addressed by the latest pulse.
    fn facing(&self) -> Option<usize> {
        self.slots.last().map(|s| s.qubit)
    }

    fn instructions(&self) -> Vec<Instruction> {
        let mut out = Vec::with_capacity(2 * self.slots.len());
        let mut target = None;
        for s in &self.slots {
            if target != Some(s.qubit) {
                out.push(Instruction::retarget(s.start - self.timing.delta_t, s.qubit, &self.timing));
                target = Some(s.qubit);
            }
            out.push(Instruction::pulse(
                s.start,
                s.qubit,
                self.timing.delta_pi,
                Role::Raman { theta: s.theta, phi: s.phi },
                None,
            ));
        }
        out
    }
}

/// Schedule whole gates: per layer, MCZs in order of their qubits' last
/// finish time, each preceded by its 1q gates; remaining 1q gates last.
pub fn schedule_gate_level(layered: &LayeredCircuit, timing: TimingParams) -> Result<PulseSequence> {
    let circuit = &layered.circuit;
    let adj = Adjacency::of(layered);
    let zero = Tick::from_integer(0);
    let mut free = vec![zero; circuit.n_qubits];
    let mut lane = RamanLane { timing, slots: Vec::new() };
    let mut seq = PulseSequence::empty(circuit.n_qubits, timing);
    let mut ryd_free = zero;
    let mut ryd_target: Option<usize> = None;
    let mut placed = vec![false; circuit.gates.len()];
    let mut block = 0;

    let put_1q = |lane: &mut RamanLane, free: &mut [Tick], placed: &mut [bool], g: usize| -> Result<()> {
        let Gate::R { qubit, theta, phi } = circuit.gates[g] else {
            return Err(Error::Internal(format!("gate {g} is not a Raman rotation")));
        };
        let start = lane.place(free[qubit], qubit, theta, phi);
        free[qubit] = start + timing.delta_pi;
        placed[g] = true;
        Ok(())
    };

    for layer in &layered.multis {
        let mut mczs: Vec<(Tick, usize, usize, usize)> = layer
            .iter()
            .map(|&id| {
                let qubits = circuit.gates[id].qubits();
                let last = qubits.iter().map(|&q| free[q]).max().unwrap_or(zero);
                let before = qubits.iter().filter(|&&q| adj.before(id, q).is_some()).count();
                let low = qubits.iter().copied().min().unwrap_or(0);
                (last, before, low, id)
            })
            .collect();
        mczs.sort();
        for (_, _, _, id) in mczs {
            let mut qubits = circuit.gates[id].qubits();
            qubits.sort_unstable();
            let pre: Vec<(usize, usize)> = qubits.iter().filter_map(|&q| adj.before(id, q).map(|g| (q, g))).collect();
            place_in_turn(&mut lane, &mut free, &mut placed, pre, &put_1q)?;
            // Start the train on the qubit the channel already faces, if any.
            let border = ryd_target.filter(|t| qubits.contains(t)).unwrap_or(qubits[0]);
            let two_pi = *qubits.iter().find(|&&q| q != border).expect("MCZ has two qubits");
            let mut order = vec![border];
            order.extend(qubits.iter().copied().filter(|&q| q != border));
            let train = mcz_pulse_train(&order, border, two_pi)?;

            let lead = if ryd_target == Some(border) { zero } else { timing.delta_t };
            let mut t = (ryd_free + lead).max(qubits.iter().map(|&q| free[q]).max().unwrap_or(zero));
            for (i, (q, role)) in train.into_iter().enumerate() {
                if ryd_target != Some(q) {
                    if i > 0 {
                        t += timing.delta_t;
                    }
                    seq.rydberg.push(Instruction::retarget(t - timing.delta_t, q, &timing));
                    ryd_target = Some(q);
                }
                let d = if role == Role::TwoPi { timing.two_pi() } else { timing.delta_pi };
                seq.rydberg.push(Instruction::pulse(t, q, d, role, Some(block)));
                t += d;
            }
            ryd_free = t;
            for &q in &qubits {
                free[q] = t;
            }
            placed[id] = true;
            block += 1;
        }
    }

    // Leftovers are final gates, at most one per qubit.
    let rest: Vec<(usize, usize)> =
        (0..circuit.gates.len()).filter(|&g| !placed[g]).map(|g| (circuit.gates[g].qubits()[0], g)).collect();
    place_in_turn(&mut lane, &mut free, &mut placed, rest, &put_1q)?;
    seq.raman = lane.instructions();
    Ok(seq)
}

/// Place 1q gates on distinct qubits, earliest ready first; ties go to the
/// qubit the Raman channel already faces, then to the lowest qubit.
fn place_in_turn(
    lane: &mut RamanLane,
    free: &mut [Tick],
    placed: &mut [bool],
    mut gates: Vec<(usize, usize)>,
    put: &impl Fn(&mut RamanLane, &mut [Tick], &mut [bool], usize) -> Result<()>,
) -> Result<()> {
    while !gates.is_empty() {
        let facing = lane.facing();
        let (i, _) = gates
            .iter()
            .enumerate()
            .min_by_key(|&(_, &(q, _))| (free[q], facing != Some(q), q))
            .expect("non-empty");
        let (_, g) = gates.swap_remove(i);
        put(lane, free, placed, g)?;
    }
    Ok(())
}

/// Raman instructions aimed at a qubit of an MCZ anywhere within the MCZ's
/// span, as (raman index, block) pairs.
pub fn busy_violations(seq: &PulseSequence) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (block, idx) in seq.blocks() {
        let start = idx.iter().map(|&i| seq.rydberg[i].t_start).min().expect("blocks are non-empty");
        let end = idx.iter().map(|&i| seq.rydberg[i].end()).max().expect("blocks are non-empty");
        let qubits: Vec<usize> = idx.iter().map(|&i| seq.rydberg[i].target).collect();
        for (k, ins) in seq.raman.iter().enumerate() {
            if qubits.contains(&ins.target) && ins.t_start < end && start < ins.end() {
                out.push((k, block));
            }
        }
    }
    out
}
