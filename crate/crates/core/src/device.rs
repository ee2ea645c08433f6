//! Device model: triangular-lattice sites with next-to-nearest-neighbour
//! interaction, and the two channel timing parameters.

use std::collections::VecDeque;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tick::{serde_tick, ticks, Tick};

/// Next-to-nearest-neighbour distance on the unit triangular lattice.
pub const INTERACTION_RADIUS: f64 = 1.732_050_807_568_877_2;
const RADIUS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityGraph {
    pub sites: Vec<[f64; 2]>,
    /// Sorted neighbour lists.
    pub adjacency: Vec<Vec<usize>>,
}

impl ConnectivityGraph {
    /// Sites within `radius` of each other are adjacent.
    pub fn from_sites(sites: Vec<[f64; 2]>, radius: f64) -> Self {
        let n = sites.len();
        let mut adjacency = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                if dist(&sites[i], &sites[j]) <= radius + RADIUS_SLACK {
                    adjacency[i].push(j);
                    adjacency[j].push(i);
                }
            }
        }
        ConnectivityGraph { sites, adjacency }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn degree(&self, site: usize) -> usize {
        self.adjacency[site].len()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        dist(&self.sites[a], &self.sites[b])
    }

    /// True iff the sites form a clique.
    pub fn is_mutually_connected(&self, sites: &[usize]) -> bool {
        sites
            .iter()
            .enumerate()
            .all(|(i, &a)| sites[i + 1..].iter().all(|&b| a != b && self.adjacent(a, b)))
    }

    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut out = Vec::new();
        for (i, nbrs) in self.adjacency.iter().enumerate() {
            out.extend(nbrs.iter().filter(|&&j| j > i).map(|&j| [i, j]));
        }
        out
    }

    /// Hop distances from `from` to every site (`usize::MAX` if unreachable).
    pub fn hops_from(&self, from: usize) -> Vec<usize> {
        let mut d = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::from([from]);
        d[from] = 0;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if d[v] == usize::MAX {
                    d[v] = d[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        d
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "sites": self.sites, "edges": self.edges() })
    }
}

fn dist(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// `rows × cols` triangular lattice in the offset parallelogram embedding.
/// Site `r * cols + c` sits at `(c + r/2, r·√3/2)`.
pub fn triangular_lattice(rows: usize, cols: usize) -> Result<ConnectivityGraph> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument(format!("lattice dimensions must be positive, got {rows}x{cols}")));
    }
    let h = 3f64.sqrt() / 2.0;
    let sites = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| [c as f64 + r as f64 / 2.0, r as f64 * h]))
        .collect();
    Ok(ConnectivityGraph::from_sites(sites, INTERACTION_RADIUS))
}

/// Smallest near-square lattice with at least `n` sites.
pub fn auto_lattice_dims(n: usize) -> (usize, usize) {
    let n = n.max(1);
    let rows = (n as f64).sqrt().ceil() as usize;
    let cols = n.div_ceil(rows);
    (rows, cols)
}

/// Pulse and retarget durations shared by both channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimingParams {
    /// Duration of a π pulse and of any Raman pulse; a 2π pulse takes twice this.
    #[serde(with = "serde_tick")]
    pub delta_pi: Tick,
    /// Channel retargeting time.
    #[serde(with = "serde_tick")]
    pub delta_t: Tick,
}

impl TimingParams {
    pub fn new(delta_pi: Tick, delta_t: Tick) -> Result<Self> {
        if !delta_pi.is_positive() {
            return Err(Error::InvalidArgument("delta_pi must be positive".into()));
        }
        if delta_t.is_negative() {
            return Err(Error::InvalidArgument("delta_t must be non-negative".into()));
        }
        Ok(TimingParams { delta_pi, delta_t })
    }

    /// Retargeting as expensive as a π pulse.
    pub fn unit() -> Self {
        TimingParams { delta_pi: ticks(1), delta_t: ticks(1) }
    }

    pub fn is_balanced(&self) -> bool {
        self.delta_pi == self.delta_t
    }

    pub fn two_pi(&self) -> Tick {
        self.delta_pi * 2
    }

    pub fn retarget_is_free(&self) -> bool {
        self.delta_t.is_zero()
    }
}

impl Default for TimingParams {
    fn default() -> Self {
        Self::unit()
    }
}
