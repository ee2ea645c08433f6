#![allow(dead_code)]

pub mod oracle;

use atomsched::circuit::{Circuit, Gate};

/// CCZ on q0..q2 with a gate before and after each qubit, and one more gate
/// on q3. Gate ids: a=0, b=1, c=2, d=3, CCZ=4, e=5, f=6, g=7.
pub fn absorption_circuit() -> Circuit {
    Circuit::with_gates(
        4,
        vec![
            Gate::r(0, 0.7, 0.1),
            Gate::r(1, 1.1, 0.2),
            Gate::r(2, 1.3, 0.3),
            Gate::r(3, 0.9, 0.4),
            Gate::mcz(vec![0, 1, 2]),
            Gate::r(0, 2.1, 0.5),
            Gate::r(1, 1.7, 0.6),
            Gate::r(2, 2.5, 0.7),
        ],
    )
}

/// Three CZs on three qubits where the final rotation on q1 (gate 8) rides
/// beside the last CZ and starts before it, as that block absorbs nothing
/// ahead of its train.
pub fn parallel_lead_circuit() -> Circuit {
    let r = |q: usize, k: f64| Gate::r(q, 0.9 + 0.2 * k, 0.4 * k);
    Circuit::with_gates(
        3,
        vec![
            r(0, 0.0),
            r(1, 1.0),
            r(2, 2.0),
            Gate::mcz(vec![0, 2]),
            r(0, 3.0),
            r(2, 4.0),
            Gate::mcz(vec![2, 1]),
            r(2, 5.0),
            r(1, 6.0),
            Gate::mcz(vec![2, 0]),
            r(2, 7.0),
            r(0, 8.0),
        ],
    )
}

/// Coefficient of determination of the least-squares line through `pts`.
pub fn r_squared(pts: &[(f64, f64)]) -> f64 {
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if syy == 0.0 {
        return 1.0;
    }
    sxy * sxy / (sxx * syy)
}

/// Every MCZ sequence of length 1..=`max_mcz` over subsets of size 2 or 3 of
/// `n` qubits, as circuits with a rotation on each qubit first and after
/// every MCZ on its qubits. With `finals = false` the rotations after each
/// qubit's last MCZ are left out.
pub fn mcz_family(n: usize, max_mcz: usize, finals: bool) -> Vec<Circuit> {
    let mut sets = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            sets.push(vec![a, b]);
            for c in b + 1..n {
                sets.push(vec![a, b, c]);
            }
        }
    }
    let mut seqs: Vec<Vec<usize>> = vec![vec![]];
    let mut out = Vec::new();
    for _ in 0..max_mcz {
        let mut next = Vec::new();
        for s in &seqs {
            for i in 0..sets.len() {
                let mut t = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        for s in &next {
            out.push(build(n, s.iter().map(|&i| sets[i].as_slice()), finals));
        }
        seqs = next;
    }
    out
}

fn build<'a>(n: usize, mczs: impl Iterator<Item = &'a [usize]> + Clone, finals: bool) -> Circuit {
    let mut last = vec![usize::MAX; n];
    for (k, m) in mczs.clone().enumerate() {
        for &q in m {
            last[q] = k;
        }
    }
    let mut c = Circuit::new(n);
    let mut angle = 0.3;
    let mut rot = |q: usize, c: &mut Circuit| {
        angle += 0.37;
        c.push(Gate::r(q, 0.8 + angle % 2.0, angle));
    };
    for q in 0..n {
        rot(q, &mut c);
    }
    for (k, m) in mczs.enumerate() {
        c.push(Gate::mcz(m.to_vec()));
        for &q in m {
            if finals || last[q] != k {
                rot(q, &mut c);
            }
        }
    }
    c
}
