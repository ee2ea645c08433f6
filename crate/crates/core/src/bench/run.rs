use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{default_ccz_probability, generate_circuit, GenConfig};
use crate::circuit::layerize;
use crate::device::{auto_lattice_dims, triangular_lattice, ConnectivityGraph, TimingParams};
use crate::error::{Error, Result};
use crate::gate_level::{busy_violations, schedule_gate_level};
use crate::pulse::schedule_pulse_level;
use crate::sequence::check_wellformed;
use crate::tick::{serde_tick, tick_to_f64, Tick};
use crate::transpile::transpile;
use crate::verify::check_equivalence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LatticeSpec {
    /// Near-square lattice sized to each circuit.
    #[default]
    Auto,
    Fixed { rows: usize, cols: usize },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LatticeRepr {
    Name(String),
    Dims { rows: usize, cols: usize },
}

impl Serialize for LatticeSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            LatticeSpec::Auto => LatticeRepr::Name("auto".into()),
            LatticeSpec::Fixed { rows, cols } => LatticeRepr::Dims { rows, cols },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticeSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match LatticeRepr::deserialize(d)? {
            LatticeRepr::Name(n) if n == "auto" => Ok(LatticeSpec::Auto),
            LatticeRepr::Name(n) => Err(serde::de::Error::custom(format!("unknown lattice \"{n}\""))),
            LatticeRepr::Dims { rows, cols } => Ok(LatticeSpec::Fixed { rows, cols }),
        }
    }
}

impl LatticeSpec {
    pub fn graph(&self, n_qubits: usize) -> Result<ConnectivityGraph> {
        let (rows, cols) = match *self {
            LatticeSpec::Auto => auto_lattice_dims(n_qubits),
            LatticeSpec::Fixed { rows, cols } => (rows, cols),
        };
        triangular_lattice(rows, cols)
    }
}

fn default_per_point() -> usize {
    75
}

fn one() -> Tick {
    Tick::from_integer(1)
}

/// Benchmark configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub qubit_counts: Vec<usize>,
    #[serde(default)]
    pub min_mcz_counts: Vec<usize>,
    /// When non-empty, circuits are drawn until each (qubits, layers) point
    /// holds `circuits_per_point` circuits, and `min_mcz_counts` is ignored.
    #[serde(default)]
    pub layer_counts: Vec<usize>,
    #[serde(default = "default_per_point")]
    pub circuits_per_point: usize,
    pub seed: u64,
    #[serde(with = "serde_tick", default = "one")]
    pub delta_pi: Tick,
    #[serde(with = "serde_tick", default = "one")]
    pub delta_t: Tick,
    #[serde(default)]
    pub lattice: LatticeSpec,
    #[serde(default = "default_ccz_probability")]
    pub ccz_probability: f64,
}

impl BenchConfig {
    pub fn timing(&self) -> Result<TimingParams> {
        TimingParams::new(self.delta_pi, self.delta_t)
    }

    /// Circuit configurations in a fixed order; seeds come from one stream
    /// seeded with `seed`.
    pub fn jobs(&self) -> Result<Vec<GenConfig>> {
        if !self.layer_counts.is_empty() {
            let mut out = Vec::new();
            for (i, &n) in self.qubit_counts.iter().enumerate() {
                let seed = self.seed.wrapping_add(i as u64);
                out.extend(layer_targeted_configs(
                    n,
                    &self.layer_counts,
                    self.circuits_per_point,
                    seed,
                    self.lattice,
                    self.ccz_probability,
                )?);
            }
            return Ok(out);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::new();
        for &n in &self.qubit_counts {
            for &m in &self.min_mcz_counts {
                for _ in 0..self.circuits_per_point {
                    let cfg = GenConfig { n_qubits: n, min_mcz: m, seed: rng.next_u64(), ccz_probability: self.ccz_probability };
                    cfg.validate()?;
                    out.push(cfg);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchOptions {
    /// Simulate both schedules and compare with the circuit unitary.
    pub verify_equivalence: bool,
    /// Largest transpiled register that is simulated.
    pub max_verify_qubits: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions { verify_equivalence: true, max_verify_qubits: 6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    /// Logical qubits of the generated circuit.
    pub qubits: usize,
    pub layers: usize,
    pub min_mcz: usize,
    pub seed: u64,
    #[serde(with = "serde_tick")]
    pub dur_gate: Tick,
    #[serde(with = "serde_tick")]
    pub dur_pulse: Tick,
    /// (dur_gate − dur_pulse) / δπ.
    pub gained: f64,
    pub wellformed: bool,
    pub equivalent: Option<bool>,
    pub error: Option<String>,
}

impl BenchmarkRecord {
    pub fn ok(&self) -> bool {
        self.error.is_none() && self.wellformed && self.equivalent != Some(false)
    }
}

/// Generate, transpile and schedule one circuit both ways.
pub fn run_circuit(
    cfg: &GenConfig,
    lattice: LatticeSpec,
    timing: TimingParams,
    options: BenchOptions,
) -> BenchmarkRecord {
    let zero = Tick::from_integer(0);
    let mut record = BenchmarkRecord {
        qubits: cfg.n_qubits,
        layers: 0,
        min_mcz: cfg.min_mcz,
        seed: cfg.seed,
        dur_gate: zero,
        dur_pulse: zero,
        gained: 0.0,
        wellformed: false,
        equivalent: None,
        error: None,
    };
    if let Err(e) = fill(&mut record, cfg, lattice, timing, options) {
        record.error = Some(e.to_string());
    }
    record
}

fn fill(
    record: &mut BenchmarkRecord,
    cfg: &GenConfig,
    lattice: LatticeSpec,
    timing: TimingParams,
    options: BenchOptions,
) -> Result<()> {
    let circuit = generate_circuit(cfg)?;
    let graph = lattice.graph(cfg.n_qubits)?;
    let t = transpile(&circuit, &graph)?;
    let layered = layerize(&t.circuit)?;
    record.layers = layered.layer_count();
    let pulse = schedule_pulse_level(&t.circuit, timing)?;
    let gate = schedule_gate_level(&layered, timing)?;
    record.dur_pulse = pulse.duration();
    record.dur_gate = gate.duration();
    record.gained = tick_to_f64(&((record.dur_gate - record.dur_pulse) / timing.delta_pi));
    record.wellformed = check_wellformed(&pulse, &t.circuit).is_empty()
        && check_wellformed(&gate, &t.circuit).is_empty()
        && busy_violations(&gate).is_empty();
    if options.verify_equivalence && t.circuit.n_qubits <= options.max_verify_qubits {
        let a = check_equivalence(&t.circuit, &pulse)?;
        let b = check_equivalence(&t.circuit, &gate)?;
        record.equivalent = Some(a.equivalent && b.equivalent);
    }
    Ok(())
}

/// Run every configuration; records come back in input order.
pub fn run_benchmark(
    configs: &[GenConfig],
    lattice: LatticeSpec,
    timing: TimingParams,
    options: BenchOptions,
) -> Vec<BenchmarkRecord> {
    configs.par_iter().map(|cfg| run_circuit(cfg, lattice, timing, options)).collect()
}

/// Draw circuits until each requested layer count holds `per_point` of
/// them. The MCZ minimum cycles through `1..=2L` for target `L`; routing
/// inflates the layer count on larger registers, so the low end matters.
pub fn layer_targeted_configs(
    n_qubits: usize,
    layer_counts: &[usize],
    per_point: usize,
    seed: u64,
    lattice: LatticeSpec,
    ccz_probability: f64,
) -> Result<Vec<GenConfig>> {
    let graph = lattice.graph(n_qubits)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for &target in layer_counts {
        let span = 2 * target.max(1);
        let mut found = 0;
        let mut attempts = 0;
        while found < per_point {
            if attempts >= 400 * per_point.max(1) {
                return Err(Error::InvalidArgument(format!(
                    "could not draw {per_point} circuits with {target} layers on {n_qubits} qubits"
                )));
            }
            let cfg = GenConfig {
                n_qubits,
                min_mcz: 1 + attempts % span,
                seed: rng.next_u64(),
                ccz_probability,
            };
            attempts += 1;
            let circuit = generate_circuit(&cfg)?;
            let layers = layerize(&transpile(&circuit, &graph)?.circuit)?.layer_count();
            if layers == target {
                out.push(cfg);
                found += 1;
            }
        }
    }
    Ok(out)
}
