//! Command-line front end. Exit status: 0 success, 1 a check failed,
//! 2 the invocation or its inputs could not be used.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::bench::{self, BenchConfig, BenchOptions, LatticeSpec};
use crate::circuit::{layerize, validate_practical_form, validate_with_connectivity, Circuit};
use crate::device::TimingParams;
use crate::error::Error;
use crate::gate_level::{busy_violations, schedule_gate_level};
use crate::pulse::schedule_pulse_level;
use crate::render::render_timeline;
use crate::sequence::{check_wellformed, PulseSequence};
use crate::tick::{parse_tick, tick_to_f64};
use crate::transpile::transpile;
use crate::verify::check_equivalence;

pub const SEED_ENV: &str = "ATOMSCHED_SEED";

#[derive(Debug, Parser)]
#[command(name = "atomsched", version, about = "Gate- and pulse-level scheduling for neutral-atom devices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Strategy {
    Pulse,
    Gate,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Place, route and lower a circuit to practical form.
    Transpile {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// `rows,cols` or `auto`.
        #[arg(long, default_value = "auto")]
        lattice: String,
    },
    /// Schedule a practical-form circuit onto the two channels.
    Schedule {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "pulse")]
        strategy: Strategy,
        /// `delta_pi,delta_t`, each an integer or `p/q`.
        #[arg(long, default_value = "1,1")]
        timing: String,
        /// Transpile onto this lattice first.
        #[arg(long)]
        lattice: Option<String>,
    },
    /// Check a sequence against the timing rules and the circuit's unitary.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        sequence: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the random-circuit comparison.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Directory for records, aggregates and plots.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        timing: Option<String>,
        #[arg(long)]
        lattice: Option<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Skip the unitary comparison.
        #[arg(long)]
        no_verify: bool,
    },
    /// Draw a sequence as an SVG timeline.
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Report practical-form violations.
    Validate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also check connectivity, with qubit `q` on site `q`.
        #[arg(long)]
        lattice: Option<String>,
    },
}

/// A failed command and the status it maps to.
#[derive(Debug)]
struct Failure {
    status: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { status: 2, message: message.into() }
    }

    fn check(message: impl Into<String>) -> Self {
        Failure { status: 1, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_)
            | Error::InvalidArgument(_)
            | Error::TooLarge { .. }
            | Error::QubitOutOfRange { .. }
            | Error::MalformedGate { .. }
            | Error::Capacity { .. } => 2,
            _ => 1,
        };
        Failure { status, message: e.to_string() }
    }
}

type CmdResult = Result<(), Failure>;

/// Parse `args` (program name first), run the command, return the status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let status = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return status;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.status
        }
    }
}

fn dispatch(command: Command) -> CmdResult {
    match command {
        Command::Transpile { input, output, lattice } => cmd_transpile(&input, output.as_deref(), &lattice),
        Command::Schedule { input, output, strategy, timing, lattice } => {
            cmd_schedule(&input, output.as_deref(), strategy, &timing, lattice.as_deref())
        }
        Command::Verify { input, sequence, output } => cmd_verify(&input, &sequence, output.as_deref()),
        Command::Bench { config, output, seed, timing, lattice, format, no_verify } => {
            cmd_bench(&config, output.as_deref(), seed, timing.as_deref(), lattice.as_deref(), format, no_verify)
        }
        Command::Render { input, output } => {
            let seq = read_sequence(&input)?;
            emit(output.as_deref(), &render_timeline(&seq))
        }
        Command::Validate { input, output, lattice } => cmd_validate(&input, output.as_deref(), lattice.as_deref()),
    }
}

pub fn parse_timing(s: &str) -> Result<TimingParams, String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("timing \"{s}\" is not of the form delta_pi,delta_t"))?;
    let dp = parse_tick(a.trim()).map_err(|e| format!("bad delta_pi: {e}"))?;
    let dt = parse_tick(b.trim()).map_err(|e| format!("bad delta_t: {e}"))?;
    TimingParams::new(dp, dt).map_err(|e| e.to_string())
}

pub fn parse_lattice(s: &str) -> Result<LatticeSpec, String> {
    if s.trim() == "auto" {
        return Ok(LatticeSpec::Auto);
    }
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("lattice \"{s}\" is not rows,cols or auto"));
    let (r, c) = s.split_once(',').ok_or_else(|| format!("lattice \"{s}\" is not rows,cols or auto"))?;
    let (rows, cols) = (parse(r)?, parse(c)?);
    if rows == 0 || cols == 0 {
        return Err(format!("lattice dimensions must be positive, got {rows}x{cols}"));
    }
    Ok(LatticeSpec::Fixed { rows, cols })
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn read_circuit(path: &Path) -> Result<Circuit, Failure> {
    Circuit::from_json(&read(path)?).map_err(|e| match e {
        Error::Json(j) => Failure::usage(format!("malformed circuit JSON in {}: {j}", path.display())),
        other => other.into(),
    })
}

fn read_sequence(path: &Path) -> Result<PulseSequence, Failure> {
    PulseSequence::from_json(&read(path)?).map_err(|e| match e {
        Error::Json(j) => Failure::usage(format!("malformed sequence JSON in {}: {j}", path.display())),
        other => other.into(),
    })
}

/// Write to `path`, or to standard output without one.
fn emit(path: Option<&Path>, data: &str) -> CmdResult {
    match path {
        Some(p) => fs::write(p, data).map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(data.as_bytes()).map_err(|e| Failure::usage(e.to_string()))?;
            if !data.ends_with('\n') {
                let _ = out.write_all(b"\n");
            }
            Ok(())
        }
    }
}

fn cmd_transpile(input: &Path, output: Option<&Path>, lattice: &str) -> CmdResult {
    let circuit = read_circuit(input)?;
    let spec = parse_lattice(lattice).map_err(Failure::usage)?;
    let graph = spec.graph(circuit.n_qubits)?;
    let t = transpile(&circuit, &graph)?;
    eprintln!(
        "qubits={} layers={} swaps_added={} sites={:?}",
        t.stats.qubits, t.stats.layers, t.stats.swaps_added, t.site_of
    );
    emit(output, &t.circuit.to_json())
}

fn cmd_schedule(input: &Path, output: Option<&Path>, strategy: Strategy, timing: &str, lattice: Option<&str>) -> CmdResult {
    let timing = parse_timing(timing).map_err(Failure::usage)?;
    let mut circuit = read_circuit(input)?;
    if let Some(l) = lattice {
        let graph = parse_lattice(l).map_err(Failure::usage)?.graph(circuit.n_qubits)?;
        circuit = transpile(&circuit, &graph)?.circuit;
    } else {
        let report = validate_practical_form(&circuit)?;
        if report.violations.iter().any(|v| v.criterion != crate::circuit::Criterion::NoClassicalQubits) {
            return Err(Failure::check(format!("circuit is not in practical form: {report}")));
        }
    }
    if !timing.is_balanced() {
        eprintln!("note: delta_pi != delta_t");
    }
    let pulse = || schedule_pulse_level(&circuit, timing);
    let gate = || -> crate::error::Result<PulseSequence> { schedule_gate_level(&layerize(&circuit)?, timing) };
    match strategy {
        Strategy::Pulse => emit(output, &pulse()?.to_json()),
        Strategy::Gate => emit(output, &gate()?.to_json()),
        Strategy::Both => {
            let (p, g) = (pulse()?, gate()?);
            if let Some(path) = output {
                emit(Some(path), &p.to_json())?;
            }
            let gained = (g.duration() - p.duration()) / timing.delta_pi;
            println!(
                "gate={} pulse={} gained={} δπ ({:.3})",
                g.duration(),
                p.duration(),
                gained,
                tick_to_f64(&gained)
            );
            Ok(())
        }
    }
}

fn cmd_verify(input: &Path, sequence: &Path, output: Option<&Path>) -> CmdResult {
    let circuit = read_circuit(input)?;
    let seq = read_sequence(sequence)?;
    let wellformed = check_wellformed(&seq, &circuit);
    let equivalence = check_equivalence(&circuit, &seq).map_err(|e| match e {
        Error::TooLarge { max, got, .. } => {
            Failure::usage(format!("circuit too large to verify: {got} qubits, at most {max} supported"))
        }
        other => other.into(),
    })?;
    let report = serde_json::json!({
        "wellformed": wellformed.is_empty(),
        "violations": wellformed.violations,
        "busy_violations": busy_violations(&seq).len(),
        "equivalence": equivalence,
    });
    emit(output, &serde_json::to_string_pretty(&report).expect("report serializes"))?;
    if !wellformed.is_empty() {
        return Err(Failure::check(format!("sequence is ill-formed: {wellformed}")));
    }
    if !equivalence.equivalent {
        return Err(Failure::check(format!("sequence is not equivalent (leakage {:.3e})", equivalence.leakage)));
    }
    Ok(())
}

fn cmd_bench(
    config: &Path,
    output: Option<&Path>,
    seed: Option<u64>,
    timing: Option<&str>,
    lattice: Option<&str>,
    format: Format,
    no_verify: bool,
) -> CmdResult {
    let mut cfg: BenchConfig = serde_json::from_str(&read(config)?)
        .map_err(|e| Failure::usage(format!("malformed bench config in {}: {e}", config.display())))?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Ok(v) = std::env::var(SEED_ENV) {
        cfg.seed = v.trim().parse().map_err(|_| Failure::usage(format!("{SEED_ENV}=\"{v}\" is not an integer")))?;
    }
    if let Some(t) = timing {
        let t = parse_timing(t).map_err(Failure::usage)?;
        cfg.delta_pi = t.delta_pi;
        cfg.delta_t = t.delta_t;
    }
    if let Some(l) = lattice {
        cfg.lattice = parse_lattice(l).map_err(Failure::usage)?;
    }
    let timing = cfg.timing()?;
    if !timing.is_balanced() {
        eprintln!("note: delta_pi != delta_t");
    }
    let options = BenchOptions { verify_equivalence: !no_verify, ..BenchOptions::default() };
    let jobs = cfg.jobs()?;
    let records = bench::run_benchmark(&jobs, cfg.lattice, timing, options);
    let rows = bench::aggregate(&records);
    match output {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("cannot create {}: {e}", dir.display())))?;
            let file = |name: &str| -> Result<fs::File, Failure> {
                let p = dir.join(name);
                fs::File::create(&p).map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display())))
            };
            match format {
                Format::Csv => bench::emit_records_csv(&records, file("records.csv")?)?,
                Format::Json => serde_json::to_writer_pretty(file("records.json")?, &records).map_err(Error::from)?,
            }
            bench::emit_csv(&rows, file("aggregate.csv")?)?;
            bench::emit_per_qubit_csv(&bench::per_qubit(&rows), file("per_qubit.csv")?)?;
            let plot = serde_json::to_string_pretty(&bench::emit_plot_data(&rows)).expect("plot data serializes");
            emit(Some(&dir.join("plot.json")), &plot)?;
            emit(Some(&dir.join("plot.svg")), &bench::plot_svg(&rows))?;
        }
        None => {
            let mut buf = Vec::new();
            bench::emit_csv(&rows, &mut buf)?;
            emit(None, &String::from_utf8(buf).expect("CSV is UTF-8"))?;
        }
    }
    let failed = records.iter().filter(|r| !r.ok()).count();
    let negative = records.iter().filter(|r| r.gained < 0.0).count();
    eprintln!("circuits={} failed={failed} negative_gain={negative}", records.len());
    if failed + negative > 0 {
        return Err(Failure::check(format!("{failed} circuits failed and {negative} lost time")));
    }
    Ok(())
}

fn cmd_validate(input: &Path, output: Option<&Path>, lattice: Option<&str>) -> CmdResult {
    let circuit = read_circuit(input)?;
    let report = match lattice {
        Some(l) => {
            let graph = parse_lattice(l).map_err(Failure::usage)?.graph(circuit.n_qubits)?;
            if graph.len() < circuit.n_qubits {
                return Err(Error::Capacity { sites: graph.len(), needed: circuit.n_qubits }.into());
            }
            let site_of: Vec<usize> = (0..circuit.n_qubits).collect();
            validate_with_connectivity(&circuit, &graph, &site_of)?
        }
        None => validate_practical_form(&circuit)?,
    };
    emit(output, &serde_json::to_string_pretty(&report).expect("report serializes"))?;
    if !report.is_empty() {
        return Err(Failure::check(format!("{} violation(s): {report}", report.violations.len())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tick::ticks;

    #[test]
    fn timing_flag() {
        let t = parse_timing("1/2, 1").unwrap();
        assert_eq!((t.delta_pi, t.delta_t), (ticks(1) / 2, ticks(1)));
        assert!(parse_timing("1").is_err());
        assert!(parse_timing("0,1").is_err());
    }

    #[test]
    fn lattice_flag() {
        assert_eq!(parse_lattice("auto").unwrap(), LatticeSpec::Auto);
        assert_eq!(parse_lattice("3,4").unwrap(), LatticeSpec::Fixed { rows: 3, cols: 4 });
        assert!(parse_lattice("0,4").is_err());
        assert!(parse_lattice("x").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["atomsched", "frobnicate"]), 2);
        assert_eq!(run(["atomsched", "render", "--input", "/nonexistent/seq.json"]), 2);
    }
}
