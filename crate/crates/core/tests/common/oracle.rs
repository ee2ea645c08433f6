//! Exhaustive branch-and-bound search for the shortest well-formed pulse
//! schedule of a small circuit.
//!
//! With the MCZ order, each train's pulse order and the Raman gate order
//! fixed, every rule is a precedence: a pulse on a qubit waits for the
//! qubit's previous Raman gate, a Raman gate waits for the last pulse of the
//! qubit's previous MCZ, and each channel retargets between distinct
//! qubits. ASAP timing is then optimal, so searching all three orders finds
//! the true minimum.

use atomsched::circuit::{Circuit, Gate};
use atomsched::device::TimingParams;
use atomsched::tick::Tick;

#[derive(Clone, Copy)]
enum Prev {
    None,
    Mcz(usize),
    Raman(usize),
}

struct Problem {
    dp: i64,
    dt: i64,
    /// MCZ gate ids.
    mczs: Vec<usize>,
    mcz_qubits: Vec<Vec<usize>>,
    /// Raman gates as (qubit, previous op on the qubit).
    raman: Vec<(usize, Prev)>,
    /// Previous op of qubit `q` before MCZ `m`: `prev_of_mcz[m][i]` for the
    /// `i`-th qubit of `mcz_qubits[m]`.
    prev_of_mcz: Vec<Vec<Prev>>,
    /// MCZs that must precede each MCZ.
    mcz_preds: Vec<Vec<usize>>,
}

#[derive(Clone, Copy)]
struct Pulse {
    qubit: usize,
    duration: i64,
    /// Raman gate this pulse waits for.
    dep: Option<usize>,
}

struct Plan {
    pulses: Vec<Pulse>,
    /// Index in `pulses` of the last pulse of (MCZ, qubit).
    last_pulse: Vec<Vec<(usize, usize)>>,
}

struct Search<'a> {
    p: &'a Problem,
    plan: &'a Plan,
    /// Rydberg pulse each Raman gate waits for.
    raman_dep: Vec<Option<usize>>,
    best: i64,
}

#[derive(Clone)]
struct State {
    placed: u64,
    raman_end: Vec<i64>,
    raman_free: i64,
    raman_target: Option<usize>,
    next_pulse: usize,
    pulse_end: Vec<i64>,
    ryd_free: i64,
    ryd_target: Option<usize>,
}

impl Search<'_> {
    fn advance(&self, s: &mut State) {
        while let Some(pulse) = self.plan.pulses.get(s.next_pulse) {
            let ready = match pulse.dep {
                Some(g) if s.placed & (1 << g) == 0 => return,
                Some(g) => s.raman_end[g],
                None => 0,
            };
            let lead = if s.ryd_target == Some(pulse.qubit) { 0 } else { self.p.dt };
            let start = (s.ryd_free + lead).max(ready);
            s.ryd_free = start + pulse.duration;
            s.ryd_target = Some(pulse.qubit);
            s.pulse_end[s.next_pulse] = s.ryd_free;
            s.next_pulse += 1;
        }
    }

    fn lower_bound(&self, s: &State) -> i64 {
        let mut ryd = s.ryd_free;
        let mut target = s.ryd_target;
        for pulse in &self.plan.pulses[s.next_pulse..] {
            ryd += pulse.duration + if target == Some(pulse.qubit) { 0 } else { self.p.dt };
            target = Some(pulse.qubit);
        }
        let mut qubits: Vec<usize> = (0..self.p.raman.len())
            .filter(|&g| s.placed & (1 << g) == 0)
            .map(|g| self.p.raman[g].0)
            .collect();
        let remaining = qubits.len() as i64;
        qubits.sort_unstable();
        qubits.dedup();
        let retargets = qubits.len() as i64 - i64::from(s.raman_target.is_some_and(|t| qubits.contains(&t)));
        ryd.max(s.raman_free + remaining * self.p.dp + retargets * self.p.dt)
    }

    fn dfs(&mut self, mut s: State) {
        self.advance(&mut s);
        let n = self.p.raman.len();
        if s.placed.count_ones() as usize == n {
            let end = s.ryd_free.max(s.raman_free);
            self.best = self.best.min(end);
            return;
        }
        if self.lower_bound(&s) >= self.best {
            return;
        }
        let mut options: Vec<(i64, usize)> = Vec::new();
        for g in 0..n {
            if s.placed & (1 << g) != 0 {
                continue;
            }
            let (q, prev) = self.p.raman[g];
            let ready = match prev {
                Prev::None => 0,
                Prev::Raman(h) if s.placed & (1 << h) == 0 => continue,
                Prev::Raman(h) => s.raman_end[h],
                Prev::Mcz(_) => {
                    let k = self.raman_dep[g].expect("MCZ predecessor has a last pulse");
                    if k >= s.next_pulse {
                        continue;
                    }
                    s.pulse_end[k]
                }
            };
            let lead = if s.raman_target == Some(q) { 0 } else { self.p.dt };
            options.push(((s.raman_free + lead).max(ready), g));
        }
        options.sort_unstable();
        for (start, g) in options {
            let mut t = s.clone();
            t.placed |= 1 << g;
            t.raman_free = start + self.p.dp;
            t.raman_end[g] = t.raman_free;
            t.raman_target = Some(self.p.raman[g].0);
            self.dfs(t);
        }
    }
}

fn problem(c: &Circuit, timing: TimingParams) -> Problem {
    let denom = lcm(*timing.delta_pi.denom(), *timing.delta_t.denom());
    let scale = |t: Tick| (t * denom).to_integer();
    let mut last: Vec<Prev> = vec![Prev::None; c.n_qubits];
    let mut mczs = Vec::new();
    let mut mcz_qubits = Vec::new();
    let mut prev_of_mcz = Vec::new();
    let mut raman = Vec::new();
    for (id, g) in c.gates.iter().enumerate() {
        match g {
            Gate::R { qubit, .. } => {
                raman.push((*qubit, last[*qubit]));
                last[*qubit] = Prev::Raman(raman.len() - 1);
            }
            Gate::Mcz { qubits } => {
                let m = mczs.len();
                mczs.push(id);
                mcz_qubits.push(qubits.clone());
                prev_of_mcz.push(qubits.iter().map(|&q| last[q]).collect());
                for &q in qubits {
                    last[q] = Prev::Mcz(m);
                }
            }
            other => panic!("oracle handles R and MCZ only, got {other:?}"),
        }
    }
    let mcz_preds = (0..mczs.len())
        .map(|m| {
            (0..m)
                .filter(|&k| mcz_qubits[k].iter().any(|q| mcz_qubits[m].contains(q)))
                .collect()
        })
        .collect();
    assert!(raman.len() <= 64);
    Problem {
        dp: scale(timing.delta_pi),
        dt: scale(timing.delta_t),
        mczs,
        mcz_qubits,
        raman,
        prev_of_mcz,
        mcz_preds,
    }
}

fn lcm(a: i64, b: i64) -> i64 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Orders of the first half of a train (border first) plus the 2π recipient.
fn train_variants(qubits: &[usize]) -> Vec<(Vec<usize>, usize)> {
    let mut out = Vec::new();
    for &two_pi in qubits {
        let rest: Vec<usize> = qubits.iter().copied().filter(|&q| q != two_pi).collect();
        for half in permutations(&rest) {
            out.push((half, two_pi));
        }
    }
    out
}

fn mcz_orders(p: &Problem) -> Vec<Vec<usize>> {
    permutations(&(0..p.mczs.len()).collect::<Vec<_>>())
        .into_iter()
        .filter(|order| {
            order.iter().enumerate().all(|(i, m)| p.mcz_preds[*m].iter().all(|k| order[..i].contains(k)))
        })
        .collect()
}

fn build_plan(p: &Problem, order: &[usize], variants: &[(Vec<usize>, usize)]) -> Plan {
    let mut pulses = Vec::new();
    let mut last_pulse = vec![Vec::new(); p.mczs.len()];
    for (&m, (half, two_pi)) in order.iter().zip(variants) {
        let mut train: Vec<(usize, i64)> = half.iter().map(|&q| (q, p.dp)).collect();
        train.push((*two_pi, 2 * p.dp));
        train.extend(half.iter().rev().map(|&q| (q, p.dp)));
        let mut seen = Vec::new();
        for (k, &(q, duration)) in train.iter().enumerate() {
            let dep = if seen.contains(&q) {
                None
            } else {
                seen.push(q);
                let i = p.mcz_qubits[m].iter().position(|&x| x == q).expect("train qubit is in the gate");
                match p.prev_of_mcz[m][i] {
                    Prev::Raman(g) => Some(g),
                    _ => None,
                }
            };
            pulses.push(Pulse { qubit: q, duration, dep });
            let last = train.iter().rposition(|&(x, _)| x == q).expect("present");
            if k == last {
                last_pulse[m].push((q, pulses.len() - 1));
            }
        }
    }
    Plan { pulses, last_pulse }
}

/// Shortest makespan over every schedule, or `None` if none beats `below`.
pub fn brute_force_min(c: &Circuit, timing: TimingParams, below: Option<Tick>) -> Option<Tick> {
    let p = problem(c, timing);
    let denom = lcm(*timing.delta_pi.denom(), *timing.delta_t.denom());
    let bound = below.map_or(i64::MAX, |b| {
        let scaled = b * denom;
        assert!(scaled.is_integer(), "bound must be on the timing grid");
        scaled.to_integer()
    });
    let mut best = bound;
    for order in mcz_orders(&p) {
        let choices: Vec<Vec<(Vec<usize>, usize)>> = order.iter().map(|&m| train_variants(&p.mcz_qubits[m])).collect();
        let mut idx = vec![0usize; order.len()];
        loop {
            let variants: Vec<(Vec<usize>, usize)> = idx.iter().zip(&choices).map(|(&i, c)| c[i].clone()).collect();
            let plan = build_plan(&p, &order, &variants);
            let raman_dep = p
                .raman
                .iter()
                .map(|&(q, prev)| match prev {
                    Prev::Mcz(m) => plan.last_pulse[m].iter().find(|&&(x, _)| x == q).map(|&(_, k)| k),
                    _ => None,
                })
                .collect();
            let mut search = Search { p: &p, plan: &plan, raman_dep, best };
            let start = State {
                placed: 0,
                raman_end: vec![0; p.raman.len()],
                raman_free: 0,
                raman_target: None,
                next_pulse: 0,
                pulse_end: vec![0; plan.pulses.len()],
                ryd_free: 0,
                ryd_target: None,
            };
            if search.lower_bound(&start) < best {
                search.dfs(start);
                best = search.best;
            }
            // next variant combination
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    (best < bound).then(|| Tick::new(best, denom))
}
