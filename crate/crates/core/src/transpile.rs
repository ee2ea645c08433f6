//! Placement on lattice sites, SWAP routing, decomposition into native gates
//! and the final clean-up passes.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::Serialize;

use crate::circuit::{layerize, optimize, Circuit, Gate};
use crate::device::ConnectivityGraph;
use crate::error::{Error, Result};

/// Logical qubit → lattice site.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Placement {
    pub logical_to_site: Vec<usize>,
}

impl Placement {
    pub fn site(&self, q: usize) -> usize {
        self.logical_to_site[q]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TranspileStats {
    pub swaps_added: usize,
    pub layers: usize,
    pub qubits: usize,
}

/// Circuit over site indices after routing.
#[derive(Debug, Clone, PartialEq)]
pub struct Routed {
    /// Gates act on sites; `n_qubits` is the number of sites.
    pub circuit: Circuit,
    pub final_placement: Placement,
    pub swaps_added: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transpiled {
    pub circuit: Circuit,
    pub stats: TranspileStats,
    pub initial_placement: Placement,
    pub final_placement: Placement,
    /// Site of each qubit of `circuit`.
    pub site_of: Vec<usize>,
}

fn partners(circuit: &Circuit) -> Vec<BTreeSet<usize>> {
    let mut out = vec![BTreeSet::new(); circuit.n_qubits];
    for g in circuit.gates.iter().filter(|g| !g.is_single_qubit()) {
        let qs = g.qubits();
        for &a in &qs {
            out[a].extend(qs.iter().copied().filter(|&b| b != a));
        }
    }
    out
}

/// Greedy placement: qubits in order of first multi-qubit gate, each on the
/// free site closest in total distance to its already placed partners.
pub fn place_initial(circuit: &Circuit, graph: &ConnectivityGraph) -> Result<Placement> {
    let n = circuit.n_qubits;
    if graph.len() < n {
        return Err(Error::Capacity { sites: graph.len(), needed: n });
    }
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for g in circuit.gates.iter().filter(|g| !g.is_single_qubit()) {
        for q in g.qubits() {
            if !order.contains(&q) {
                order.push(q);
            }
        }
    }
    order.extend((0..n).filter(|q| !order.contains(q)).collect::<Vec<_>>());

    let partners = partners(circuit);
    let mut site_of = vec![usize::MAX; n];
    let mut used = vec![false; graph.len()];
    for (k, &q) in order.iter().enumerate() {
        let anchors: Vec<usize> = {
            let placed: Vec<usize> = partners[q].iter().filter(|&&p| site_of[p] != usize::MAX).map(|&p| site_of[p]).collect();
            if placed.is_empty() {
                order[..k].iter().map(|&p| site_of[p]).collect()
            } else {
                placed
            }
        };
        let cost = |s: usize| anchors.iter().map(|&a| graph.distance(s, a)).sum::<f64>();
        let site = (0..graph.len())
            .filter(|&s| !used[s])
            .min_by(|&a, &b| cost(a).total_cmp(&cost(b)).then(a.cmp(&b)))
            .expect("enough sites");
        site_of[q] = site;
        used[site] = true;
    }
    Ok(Placement { logical_to_site: site_of })
}

struct Router<'a> {
    graph: &'a ConnectivityGraph,
    /// Logical qubit at each site, if any.
    at: Vec<Option<usize>>,
    site_of: Vec<usize>,
    out: Vec<Gate>,
    swaps: usize,
}

impl Router<'_> {
    fn swap(&mut self, a: usize, b: usize) {
        let (qa, qb) = (self.at[a], self.at[b]);
        // Occupied site first, so the idle one is never a control.
        let pair = if qa.is_some() { [a, b] } else { [b, a] };
        self.out.push(Gate::Swap { qubits: pair });
        self.at.swap(a, b);
        if let Some(q) = qa {
            self.site_of[q] = b;
        }
        if let Some(q) = qb {
            self.site_of[q] = a;
        }
        self.swaps += 1;
    }

    fn spread(&self, sites: &[usize]) -> f64 {
        let mut total = 0.0;
        for (i, &a) in sites.iter().enumerate() {
            for &b in &sites[i + 1..] {
                total += self.graph.distance(a, b);
            }
        }
        total
    }

    /// Swap one of the gate's sites with a neighbour if that strictly lowers
    /// the summed pairwise distance.
    fn greedy_step(&mut self, qubits: &[usize]) -> bool {
        let sites: Vec<usize> = qubits.iter().map(|&q| self.site_of[q]).collect();
        let current = self.spread(&sites);
        let mut best: Option<(f64, usize, usize)> = None;
        for (i, &s) in sites.iter().enumerate() {
            for &t in &self.graph.adjacency[s] {
                if sites.contains(&t) {
                    continue;
                }
                let mut moved = sites.clone();
                moved[i] = t;
                let cost = self.spread(&moved);
                let better = match best {
                    None => cost < current - 1e-12,
                    Some((c, bs, bt)) => cost < c - 1e-12 || ((cost - c).abs() <= 1e-12 && (s, t) < (bs, bt)),
                };
                if better {
                    best = Some((cost, s, t));
                }
            }
        }
        match best {
            Some((_, s, t)) => {
                self.swap(s, t);
                true
            }
            None => false,
        }
    }

    /// Move the gate's qubits onto the nearest clique of sites, one shortest
    /// path at a time, never disturbing qubits already in place.
    fn gather(&mut self, qubits: &[usize]) -> Result<()> {
        let k = qubits.len();
        let hops: Vec<Vec<usize>> = qubits.iter().map(|&q| self.graph.hops_from(self.site_of[q])).collect();
        let mut best: Option<(usize, Vec<usize>)> = None;
        for clique in cliques(self.graph, k) {
            for perm in permutations(k) {
                let targets: Vec<usize> = perm.iter().map(|&i| clique[i]).collect();
                let cost = (0..k).try_fold(0usize, |acc, j| {
                    let h = hops[j][targets[j]];
                    (h != usize::MAX).then_some(acc + h)
                });
                if let Some(cost) = cost {
                    if best.as_ref().is_none_or(|(c, t)| (cost, &targets) < (*c, t)) {
                        best = Some((cost, targets));
                    }
                }
            }
        }
        let (_, targets) = best.ok_or_else(|| Error::Routing(format!("no {k}-clique reachable on the lattice")))?;
        let mut settled: Vec<usize> = Vec::new();
        for (j, &q) in qubits.iter().enumerate() {
            let goal = targets[j];
            let path = self
                .path_avoiding(self.site_of[q], goal, &settled)
                .ok_or_else(|| Error::Routing(format!("no path for qubit {q} to site {goal}")))?;
            for w in path.windows(2) {
                self.swap(w[0], w[1]);
            }
            settled.push(goal);
        }
        Ok(())
    }

    fn path_avoiding(&self, from: usize, to: usize, blocked: &[usize]) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.graph.len()];
        let mut queue = std::collections::VecDeque::from([from]);
        prev[from] = from;
        while let Some(u) = queue.pop_front() {
            if u == to {
                let mut path = vec![to];
                while *path.last().expect("non-empty") != from {
                    path.push(prev[*path.last().expect("non-empty")]);
                }
                path.reverse();
                return Some(path);
            }
            for &v in &self.graph.adjacency[u] {
                if prev[v] == usize::MAX && !blocked.contains(&v) {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        None
    }
}

fn cliques(graph: &ConnectivityGraph, k: usize) -> Vec<Vec<usize>> {
    fn grow(graph: &ConnectivityGraph, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        let last = *current.last().expect("seeded");
        for &v in &graph.adjacency[last] {
            if v > last && current.iter().all(|&c| graph.adjacent(c, v)) {
                current.push(v);
                grow(graph, k, current, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    for s in 0..graph.len() {
        grow(graph, k, &mut vec![s], &mut out);
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Insert SWAPs so every multi-qubit gate acts on a clique of sites. The
/// result acts on site indices.
pub fn route(circuit: &Circuit, graph: &ConnectivityGraph, placement: &Placement) -> Result<Routed> {
    let n = circuit.n_qubits;
    if placement.logical_to_site.len() != n {
        return Err(Error::InvalidArgument("placement does not cover the circuit".into()));
    }
    let mut at = vec![None; graph.len()];
    for (q, &s) in placement.logical_to_site.iter().enumerate() {
        if s >= graph.len() || at[s].is_some() {
            return Err(Error::InvalidArgument(format!("invalid site {s} for qubit {q}")));
        }
        at[s] = Some(q);
    }
    let mut r = Router { graph, at, site_of: placement.logical_to_site.clone(), out: Vec::new(), swaps: 0 };
    let cap = 4 * graph.len() + 16;
    for gate in &circuit.gates {
        let qubits = gate.qubits();
        if qubits.len() > 1 {
            let mut steps = 0;
            while !graph.is_mutually_connected(&qubits.iter().map(|&q| r.site_of[q]).collect::<Vec<_>>()) {
                if steps >= cap || !r.greedy_step(&qubits) {
                    r.gather(&qubits)?;
                    break;
                }
                steps += 1;
            }
        }
        let relabeled = gate.relabel(&|q| r.site_of[q]);
        r.out.push(relabeled);
    }
    let final_placement = Placement { logical_to_site: r.site_of.clone() };
    let circuit = Circuit { n_qubits: graph.len(), gates: r.out, metadata: circuit.metadata.clone() };
    Ok(Routed { circuit, final_placement, swaps_added: r.swaps })
}

fn hadamard(q: usize) -> [Gate; 2] {
    [Gate::VirtualZ { qubit: q, angle: PI }, Gate::r(q, PI / 2.0, PI / 2.0)]
}

fn cnot(c: usize, t: usize, out: &mut Vec<Gate>) {
    out.extend(hadamard(t));
    out.push(Gate::mcz(vec![c, t]));
    out.extend(hadamard(t));
}

/// Rewrite H, X, CNOT, SWAP and CCZ into pulses, virtual Zs and MCZs.
pub fn decompose_nonnative(circuit: &Circuit) -> Circuit {
    let mut gates = Vec::with_capacity(circuit.gates.len());
    for g in &circuit.gates {
        match *g {
            Gate::H { qubit } => gates.extend(hadamard(qubit)),
            Gate::X { qubit } => gates.push(Gate::r(qubit, PI, 0.0)),
            Gate::Cnot { qubits: [c, t] } => cnot(c, t, &mut gates),
            Gate::Swap { qubits: [a, b] } => {
                cnot(a, b, &mut gates);
                cnot(b, a, &mut gates);
                cnot(a, b, &mut gates);
            }
            Gate::Ccz { qubits } => gates.push(Gate::mcz(qubits.to_vec())),
            _ => gates.push(g.clone()),
        }
    }
    Circuit { n_qubits: circuit.n_qubits, gates, metadata: circuit.metadata.clone() }
}

/// Place, route, decompose and optimize; the result is in practical form
/// with every MCZ on a clique of sites.
pub fn transpile(circuit: &Circuit, graph: &ConnectivityGraph) -> Result<Transpiled> {
    circuit.check_structure()?;
    let initial = place_initial(circuit, graph)?;
    let routed = route(circuit, graph, &initial)?;
    let native = decompose_nonnative(&routed.circuit);
    let (optimized, site_of) = optimize(&native);
    let layers = layerize(&optimized)?.layer_count();
    let stats = TranspileStats { swaps_added: routed.swaps_added, layers, qubits: optimized.n_qubits };
    Ok(Transpiled {
        circuit: optimized,
        stats,
        initial_placement: initial,
        final_placement: routed.final_placement,
        site_of,
    })
}
