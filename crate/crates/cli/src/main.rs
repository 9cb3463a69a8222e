use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use swapopt::bench::{
    bench_sweep, emit_report, improvement_model, BenchmarkName, ImprovementParams, Report,
};
use swapopt::circuit::parse_circuit;
use swapopt::decomp::{lower_swap, lower_to_native, SwapStrategy};
use swapopt::device::{circuit_metrics, device_speedups, DeviceModel};
use swapopt::noise::{run_irb_experiment, IrbConfig, NoiseModel};
use swapopt::passes::{optimize_pipeline, swap_ledger};
use swapopt::unitary::{circuit_unitary, equal_up_to_global_phase, gate_unitary, Unitary};
use swapopt::{Circuit, Gate};

#[derive(Parser)]
#[command(name = "swapopt", version, about = "Lower, optimize and benchmark SWAPs on cross-resonance hardware")]
struct Cli {
    /// Seed for every random choice; echoed in reports.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Equivalence tolerance on the normalized trace overlap.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Lower a SWAP on one edge, or a whole circuit, to native gates.
    Lower(LowerArgs),
    /// Run the rewrite pipeline on a circuit.
    Optimize {
        circuit: PathBuf,
        #[arg(long)]
        device: PathBuf,
    },
    /// Check a circuit against a target up to global phase (exit 0 equal, 1 not, 2 error).
    Verify {
        circuit: PathBuf,
        /// `cnot`, `notc`, `swap`, a unitary `.csv` file or another circuit file.
        #[arg(long)]
        target: String,
        /// Print the circuit's unitary as CSV.
        #[arg(long)]
        dump: bool,
    },
    /// Depth, duration and rotation of a native circuit.
    Metrics {
        circuit: PathBuf,
        #[arg(long)]
        device: PathBuf,
    },
    /// Per-edge orientation and optimized SWAP speedups.
    Speedups {
        #[arg(long)]
        device: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulated interleaved randomized benchmarking of one SWAP form.
    IrbSim(IrbArgs),
    /// Benchmark success for each SWAP strategy.
    Bench(BenchArgs),
    /// Improvement factor from per-SWAP errors and runtime savings.
    Model(ModelArgs),
    /// Stage-by-stage SWAP ledger for every edge of a device.
    Demo {
        #[arg(long)]
        device: PathBuf,
    },
}

#[derive(Args)]
struct LowerArgs {
    #[arg(long, default_value = "optimized")]
    strategy: SwapStrategy,
    /// `control,target` of a device edge.
    #[arg(long, value_parser = parse_edge)]
    edge: Option<(usize, usize)>,
    /// Lower this circuit instead of a lone SWAP.
    #[arg(long, conflicts_with = "edge")]
    circuit: Option<PathBuf>,
    #[arg(long)]
    device: PathBuf,
}

#[derive(Args)]
struct IrbArgs {
    #[arg(long)]
    device: PathBuf,
    #[arg(long)]
    noise: PathBuf,
    #[arg(long, default_value = "optimized")]
    swap: SwapStrategy,
    /// Edge to benchmark; the first device edge by default.
    #[arg(long, value_parser = parse_edge)]
    edge: Option<(usize, usize)>,
    #[arg(long, value_delimiter = ',')]
    lengths: Option<Vec<usize>>,
    #[arg(long)]
    sequences: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Survival table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    name: BenchmarkName,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long)]
    device: PathBuf,
    #[arg(long)]
    noise: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "slow,optimized")]
    strategies: Vec<SwapStrategy>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    error_opt: f64,
    #[arg(long)]
    error_std: f64,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    dt_us: f64,
    #[arg(long)]
    t1_us: f64,
    #[arg(long)]
    t2_us: f64,
    #[arg(long)]
    n: u32,
}

fn parse_edge(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected `control,target`")?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("`{x}`: {e}"));
    Ok((p(a)?, p(b)?))
}

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

enum Outcome {
    Ok,
    /// Semantic failure, exit 1.
    Failed,
}

fn read_circuit(path: &Path) -> CliResult<Circuit> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(parse_circuit(&text).map_err(|e| format!("{}: {e}", path.display()))?)
}

fn print_json(v: &serde_json::Value) -> CliResult<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn write_or_print(report: &Report, format: Format, csv: Option<&Path>, out: Option<&Path>) -> CliResult<()> {
    if csv.is_some() || out.is_some() {
        emit_report(report, csv, out)?;
    }
    match format {
        Format::Csv => print!("{}", report.to_csv()?),
        Format::Json => print!("{}", report.to_json()?),
        Format::Text => {
            println!("{}", report.columns.join("\t"));
            for r in &report.rows {
                let cells: Vec<String> = r
                    .iter()
                    .map(|v| match v {
                        serde_json::Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                println!("{}", cells.join("\t"));
            }
        }
    }
    Ok(())
}

fn target_unitary(target: &str, n_wires: usize) -> CliResult<Unitary<f64>> {
    let gate = match target.to_ascii_lowercase().as_str() {
        "cnot" => Some(Gate::Cnot(0, 1)),
        "notc" => Some(Gate::Notc(0, 1)),
        "swap" => Some(Gate::Swap(0, 1)),
        _ => None,
    };
    if let Some(g) = gate {
        return Ok(gate_unitary(&g, n_wires)?);
    }
    let path = Path::new(target);
    let text = std::fs::read_to_string(path).map_err(|e| format!("{target}: {e}"))?;
    if path.extension().is_some_and(|e| e == "csv") {
        Ok(Unitary::from_csv(&text)?)
    } else {
        Ok(circuit_unitary(&parse_circuit(&text)?)?)
    }
}

fn run(cli: Cli) -> CliResult<Outcome> {
    if cli.tol.is_nan() || cli.tol <= 0.0 {
        return Err("--tol must be positive".into());
    }
    match cli.cmd {
        Cmd::Lower(a) => {
            let device = DeviceModel::load(&a.device)?;
            let c = match (a.circuit, a.edge) {
                (Some(p), _) => lower_to_native(&read_circuit(&p)?, &device, a.strategy)?,
                (None, Some((c, t))) => lower_swap(c, t, a.strategy, &device)?,
                (None, None) => return Err("give --edge or --circuit".into()),
            };
            match cli.format {
                Format::Json => print_json(&json!({ "strategy": a.strategy, "circuit": c.to_string() }))?,
                _ => print!("{c}"),
            }
        }
        Cmd::Optimize { circuit, device } => {
            let device = DeviceModel::load(&device)?;
            let (out, reports) = optimize_pipeline(&read_circuit(&circuit)?, &device)?;
            match cli.format {
                Format::Json => print_json(&json!({ "circuit": out.to_string(), "passes": reports }))?,
                _ => {
                    print!("{out}");
                    for r in &reports {
                        eprintln!(
                            "# {}: {} -> {}, rotation {} -> {}, verified {}",
                            r.pass, r.depth_before, r.depth_after, r.rotation_before, r.rotation_after, r.verified
                        );
                    }
                }
            }
        }
        Cmd::Verify { circuit, target, dump } => {
            let c = read_circuit(&circuit)?;
            let u = circuit_unitary::<f64>(&c)?;
            let t = target_unitary(&target, c.n_wires())?;
            let eq = equal_up_to_global_phase(&t, &u, cli.tol)?;
            if dump {
                print!("{}", u.to_csv());
            }
            match cli.format {
                Format::Json => print_json(&json!({
                    "equal": eq.equal,
                    "phase": eq.phase,
                    "deficit": eq.deficit().max(0.0),
                    "tol": cli.tol,
                }))?,
                _ => println!(
                    "{} phase={:.12} deficit={:.3e}",
                    if eq.equal { "equivalent" } else { "not equivalent" },
                    eq.phase,
                    eq.deficit().max(0.0)
                ),
            }
            return Ok(if eq.equal { Outcome::Ok } else { Outcome::Failed });
        }
        Cmd::Metrics { circuit, device } => {
            let device = DeviceModel::load(&device)?;
            let m = circuit_metrics(&read_circuit(&circuit)?, &device)?;
            match cli.format {
                Format::Text => println!(
                    "depth {}\nduration {} dt ({:.3} ns)\nrotation {}+{}\ncr {}",
                    m.depth, m.duration_dt, m.duration_ns, m.external_rotation_deg, m.internal_rotation_deg, m.cr_count
                ),
                _ => print_json(&serde_json::to_value(&m)?)?,
            }
        }
        Cmd::Speedups { device, csv, out } => {
            let d = DeviceModel::load(&device)?;
            let (rows, mean) = device_speedups(&d)?;
            let config = json!({ "device": d.name, "mean_optimized_speedup": mean });
            let report = Report::from_records("speedups", cli.seed, config, &rows)?;
            write_or_print(&report, cli.format, csv.as_deref(), out.as_deref())?;
            if cli.format == Format::Text {
                println!("mean optimized speedup {mean:.4}");
            }
        }
        Cmd::IrbSim(a) => {
            let device = DeviceModel::load(&a.device)?;
            let noise = NoiseModel::load(&a.noise)?;
            let (c, t) = match a.edge {
                Some(e) => e,
                None => {
                    let e = device.edges.first().ok_or("device has no edges")?;
                    (e.control, e.target)
                }
            };
            let edge = device.cr_direction(c, t)?;
            let pair = device.pair(c, t)?;
            let mut config = IrbConfig {
                seed: cli.seed,
                ..IrbConfig::default()
            };
            if let Some(l) = a.lengths {
                config.lengths = l;
            }
            if let Some(k) = a.sequences {
                config.sequences_per_length = k;
            }
            let swap = lower_swap(0, 1, a.swap, &pair)?;
            let r = run_irb_experiment(&swap, &pair, &noise, &config)?;
            let doc = json!({
                "tool": "swapopt",
                "version": env!("CARGO_PKG_VERSION"),
                "seed": cli.seed,
                "device": device.name,
                "edge": [edge.0, edge.1],
                "swap": a.swap,
                "noise": noise,
                "config": config,
                "result": r,
            });
            let text = serde_json::to_string_pretty(&doc)? + "\n";
            if let Some(p) = &a.out {
                std::fs::write(p, &text)?;
            }
            if let Some(p) = &a.csv {
                let report = Report::from_records("irb-survival", cli.seed, doc["config"].clone(), &r.table)?;
                emit_report(&report, Some(p), None)?;
            }
            match cli.format {
                Format::Text => println!(
                    "{} swap: error {:.5} +- {:.5} (alpha_rb {:.6}, alpha_int {:.6})",
                    a.swap, r.gate_error, r.gate_error_sigma, r.alpha_rb.alpha, r.alpha_int.alpha
                ),
                _ => print!("{text}"),
            }
        }
        Cmd::Bench(a) => {
            let device = DeviceModel::load(&a.device)?;
            let noise = NoiseModel::load(&a.noise)?;
            let rows = bench_sweep(a.name, &a.n, &device, &noise, &a.strategies)?;
            let config = json!({
                "benchmark": a.name,
                "n": a.n,
                "device": device.name,
                "noise": noise,
                "strategies": a.strategies,
            });
            let report = Report::from_records("bench", cli.seed, config, &rows)?;
            write_or_print(&report, cli.format, a.csv.as_deref(), a.out.as_deref())?;
        }
        Cmd::Model(a) => {
            let p = ImprovementParams {
                error_opt: a.error_opt,
                error_std: a.error_std,
                k: a.k,
                delta_t_us: a.dt_us,
                t1_us: a.t1_us,
                t2_us: a.t2_us,
                n: a.n,
            };
            p.validate()?;
            let f = improvement_model(&p);
            match cli.format {
                Format::Text => println!("{f:.6}"),
                _ => print_json(&json!({ "params": p, "factor": f }))?,
            }
        }
        Cmd::Demo { device } => {
            let d = DeviceModel::load(&device)?;
            if d.edges.is_empty() {
                return Err("device has no edges".into());
            }
            let mut rows = Vec::new();
            for e in &d.edges {
                rows.extend(swap_ledger(&d, e.control, e.target)?);
            }
            let all_verified = rows.iter().all(|r| r.verified);
            match cli.format {
                Format::Text => {
                    for e in &d.edges {
                        println!("edge {} -> {}", e.control, e.target);
                        for r in rows.iter().filter(|r| (r.control, r.target) == (e.control, e.target)) {
                            println!(
                                "  {:<14} {:<10} {:>5} dt {:>8.2} ns  {}+{}  {}",
                                r.stage,
                                r.depth.to_string(),
                                r.duration_dt,
                                r.duration_ns,
                                r.external_rotation_deg,
                                r.internal_rotation_deg,
                                if r.verified { "verified" } else { "UNVERIFIED" }
                            );
                        }
                    }
                }
                _ => {
                    let report = Report::from_records("ledger", cli.seed, json!({ "device": d.name }), &rows)?;
                    write_or_print(&report, cli.format, None, None)?;
                }
            }
            if !all_verified {
                return Ok(Outcome::Failed);
            }
        }
    }
    Ok(Outcome::Ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
