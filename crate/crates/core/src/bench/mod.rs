//! Random circuit generation, the gate-level versus pulse-level comparison
//! harness, and aggregation of its results.

mod report;
mod run;

use std::f64::consts::PI;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

pub use report::{aggregate, emit_csv, emit_per_qubit_csv, emit_plot_data, emit_records_csv, per_qubit, plot_svg, AggregateRow, PerQubitRow};
pub use run::{
    layer_targeted_configs, run_benchmark, run_circuit, BenchConfig, BenchOptions, BenchmarkRecord, LatticeSpec,
};

fn default_ccz_probability() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n_qubits: usize,
    pub min_mcz: usize,
    pub seed: u64,
    /// Chance that a drawn MCZ is a CCZ; the rest are CZs. Ignored below
    /// three qubits.
    #[serde(default = "default_ccz_probability")]
    pub ccz_probability: f64,
}

impl GenConfig {
    pub fn new(n_qubits: usize, min_mcz: usize, seed: u64) -> Self {
        GenConfig { n_qubits, min_mcz, seed, ccz_probability: default_ccz_probability() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 qubits, got {}", self.n_qubits)));
        }
        if !(0.0..=1.0).contains(&self.ccz_probability) {
            return Err(Error::InvalidArgument(format!("CCZ probability {} outside [0, 1]", self.ccz_probability)));
        }
        Ok(())
    }
}

fn random_rotation(rng: &mut ChaCha8Rng, qubit: usize) -> Gate {
    let theta = rng.gen_range(PI / 4.0..=PI);
    let phi = rng.gen_range(0.0..2.0 * PI);
    Gate::r(qubit, theta, phi)
}

/// Random circuit: a rotation on every qubit, then CZ/CCZ gates on random
/// qubits, each followed by rotations on its qubits, until every qubit has
/// met an MCZ and at least `min_mcz` MCZs were drawn.
///
/// Draw order: θ then φ per initial rotation; per MCZ the kind (only with
/// three or more qubits), the qubit sample, then θ and φ per qubit.
pub fn generate_circuit(cfg: &GenConfig) -> Result<Circuit> {
    cfg.validate()?;
    let n = cfg.n_qubits;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.push(random_rotation(&mut rng, q));
    }
    let mut involved = vec![false; n];
    let mut mczs = 0;
    while mczs < cfg.min_mcz || involved.iter().any(|i| !i) {
        let k = if n >= 3 && rng.gen_bool(cfg.ccz_probability) { 3 } else { 2 };
        let qubits = index::sample(&mut rng, n, k).into_vec();
        c.push(Gate::mcz(qubits.clone()));
        for &q in &qubits {
            involved[q] = true;
            c.push(random_rotation(&mut rng, q));
        }
        mczs += 1;
    }
    Ok(c)
}
