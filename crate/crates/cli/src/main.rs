//! `strata` — inspect, schedule, evaluate and benchmark boolean circuits
//! over plaintext, latency-model and FHE gate backends.
//!
//! Exit codes: 0 success, 2 parse/validation failure, 3 evaluation failure,
//! 4 configuration error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use strata_core::backend::{Backend, GateCostModel, LatencyBackend, PlainBackend, SecurityParams};
use strata_core::bits::{bits_to_hex, hex_to_bits};
use strata_core::circuit::Circuit;
use strata_core::eval::{
    decrypt_outputs, encrypt_inputs, eval_parallel, predict_parallel_time, EvalReport,
    PhaseTimings,
};
use strata_core::netlist::{parse_bristol, parse_yosys_json};
use strata_core::schedule::{assign_depths, build_schedule, layer_histogram, topo_sort, Schedule};
use strata_tfhe::TfheBackend;

mod keyfile;

#[derive(Parser)]
#[command(name = "strata", version, about = "Layer-parallel boolean circuit evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print gate/wire counts, depth and layer-width summary.
    Stats(CircuitArgs),
    /// Emit the layer schedule as JSON.
    Schedule {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[arg(short = 'k', long = "threads", default_value_t = 1)]
        threads: usize,
        /// Write the JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a circuit and print an evaluation report as JSON.
    Eval(EvalArgs),
    /// Run the same evaluation across a list of worker counts and print a
    /// CSV speedup table.
    Bench(BenchArgs),
    /// Generate FHE keys and write the secret key to a file.
    Keygen {
        /// Parameter preset: `default` (128-bit) or `reduced` (NON-SECURE,
        /// fast; tests only).
        #[arg(long, default_value = "default")]
        preset: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encrypt a hex bit string under a key file.
    Enc {
        #[arg(long)]
        key: PathBuf,
        /// MSB-first hex; every digit contributes four bits.
        hex: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decrypt a ciphertext file and print the hex bit string.
    Dec {
        #[arg(long)]
        key: PathBuf,
        ct: PathBuf,
    },
}

#[derive(Args)]
struct CircuitArgs {
    /// Netlist path.
    #[arg(long)]
    circuit: PathBuf,
    /// `bristol` or `yosys-json`; inferred from the extension by default
    /// (`.json` means yosys-json).
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    /// `plain`, `latency` or `fhe`.
    #[arg(long, default_value = "plain")]
    backend: String,
    /// FHE parameter preset (`default` or `reduced`).
    #[arg(long, default_value = "default")]
    preset: String,
    #[arg(short = 'k', long = "threads", default_value_t = 1)]
    threads: usize,
    /// Input bits per group: `<group index>=<hex>`, MSB-first, repeatable.
    #[arg(long = "input", value_name = "GROUP=HEX")]
    inputs: Vec<String>,
    /// File with one `<group index>=<hex>` binding per line.
    #[arg(long)]
    inputs_file: Option<PathBuf>,
    /// Write the report JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for generated inputs when none are given.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-bootstrapped-gate latency for the latency backend, in
    /// milliseconds.
    #[arg(long, default_value_t = 11.1)]
    latency_ms: f64,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    /// `latency` or `fhe`.
    #[arg(long, default_value = "latency")]
    backend: String,
    #[arg(long, default_value = "default")]
    preset: String,
    /// Comma-separated worker counts, e.g. `1,16,20,50,100`.
    #[arg(long = "k-list", value_delimiter = ',', required = true)]
    k_list: Vec<usize>,
    #[arg(long = "input", value_name = "GROUP=HEX")]
    inputs: Vec<String>,
    #[arg(long)]
    inputs_file: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 11.1)]
    latency_ms: f64,
}

/// Error carrying the exit code.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn parse(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
    fn eval(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: message.into(),
        }
    }
    fn config(message: impl Into<String>) -> Self {
        CliError {
            code: 4,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Stats(args) => cmd_stats(&args),
        Command::Schedule {
            circuit,
            threads,
            out,
        } => cmd_schedule(&circuit, threads, out),
        Command::Eval(args) => cmd_eval(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Keygen { preset, out } => cmd_keygen(&preset, &out),
        Command::Enc { key, hex, out } => cmd_enc(&key, &hex, &out),
        Command::Dec { key, ct } => cmd_dec(&key, &ct),
    }
}

fn load_circuit(args: &CircuitArgs) -> Result<Circuit, CliError> {
    let source = fs::read_to_string(&args.circuit)
        .map_err(|e| CliError::config(format!("{}: {e}", args.circuit.display())))?;
    let format = match &args.format {
        Some(f) => f.clone(),
        None => match args.circuit.extension().and_then(|e| e.to_str()) {
            Some("json") => "yosys-json".into(),
            _ => "bristol".into(),
        },
    };
    let parsed = match format.as_str() {
        "bristol" => parse_bristol(&source),
        "yosys-json" => parse_yosys_json(&source),
        other => return Err(CliError::config(format!("unknown format `{other}`"))),
    }
    .map_err(|e| CliError::parse(format!("{}:\n{e}", args.circuit.display())))?;
    for w in &parsed.warnings {
        eprintln!("{}: {w}", args.circuit.display());
    }
    let report = parsed.circuit.validate();
    if !report.is_ok() {
        return Err(CliError::parse(format!(
            "{}: {report}",
            args.circuit.display()
        )));
    }
    let name = args
        .circuit
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("circuit")
        .to_string();
    Ok(Circuit::new(
        name,
        parsed.circuit.wire_count(),
        parsed.circuit.gates().to_vec(),
        parsed.circuit.inputs().to_vec(),
        parsed.circuit.outputs().to_vec(),
    ))
}

fn cmd_stats(args: &CircuitArgs) -> Result<(), CliError> {
    let circuit = load_circuit(args)?;
    let stats = circuit.stats();
    let order = topo_sort(&circuit).map_err(|e| CliError::parse(e.to_string()))?;
    let depths = assign_depths(&circuit, &order).map_err(|e| CliError::parse(e.to_string()))?;
    let hist = layer_histogram(&depths);

    println!("circuit: {}", circuit.name());
    println!("gates: {}", stats.gate_count);
    println!("wires: {}", stats.wire_count);
    let mut kinds: Vec<_> = stats.counts_by_kind.iter().collect();
    kinds.sort_by_key(|(k, _)| **k);
    for (kind, count) in kinds {
        println!("  {kind}: {count}");
    }
    println!(
        "inputs: {} bits in {} groups",
        stats.input_bits,
        circuit.inputs().len()
    );
    println!(
        "outputs: {} bits in {} groups",
        stats.output_bits,
        circuit.outputs().len()
    );
    println!("depth: {}", depths.circuit_depth());
    println!("max layer width: {}", hist.max_width());
    println!("median layer width: {}", hist.median_width());
    println!(
        "layers under 150 gates: {:.1}%",
        hist.fraction_below(150) * 100.0
    );
    Ok(())
}

fn cmd_schedule(args: &CircuitArgs, threads: usize, out: Option<PathBuf>) -> Result<(), CliError> {
    if threads < 1 {
        return Err(CliError::config("thread count must be at least 1"));
    }
    let circuit = load_circuit(args)?;
    let schedule = schedule_for(&circuit, threads)?;
    let json = serde_json::to_string_pretty(&schedule.to_json()).unwrap();
    emit(out.as_deref(), &json)
}

fn schedule_for(circuit: &Circuit, threads: usize) -> Result<Schedule, CliError> {
    let order = topo_sort(circuit).map_err(|e| CliError::parse(e.to_string()))?;
    let depths = assign_depths(circuit, &order).map_err(|e| CliError::parse(e.to_string()))?;
    build_schedule(&depths, threads).map_err(|e| CliError::config(e.to_string()))
}

fn parse_input_bindings(
    circuit: &Circuit,
    flags: &[String],
    file: Option<&Path>,
    seed: u64,
) -> Result<Vec<Vec<bool>>, CliError> {
    let mut bindings: Vec<String> = flags.to_vec();
    if let Some(path) = file {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        bindings.extend(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(String::from),
        );
    }
    if bindings.is_empty() {
        // deterministic generated inputs, for timing runs where values are
        // irrelevant
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        return Ok(circuit
            .inputs()
            .iter()
            .map(|g| (0..g.len()).map(|_| rng.gen()).collect())
            .collect());
    }
    let mut groups: Vec<Option<Vec<bool>>> = vec![None; circuit.inputs().len()];
    for binding in &bindings {
        let (index, hex) = binding.split_once('=').ok_or_else(|| {
            CliError::config(format!("input binding `{binding}` is not GROUP=HEX"))
        })?;
        let index: usize = index
            .trim()
            .parse()
            .map_err(|_| CliError::config(format!("input group `{index}` is not an index")))?;
        if index >= groups.len() {
            return Err(CliError::config(format!(
                "input group {index} out of range ({} groups)",
                groups.len()
            )));
        }
        let bits = hex_to_bits(hex.trim(), circuit.inputs()[index].len())
            .map_err(|e| CliError::config(format!("input group {index}: {e}")))?;
        groups[index] = Some(bits);
    }
    groups
        .into_iter()
        .enumerate()
        .map(|(i, g)| {
            g.ok_or_else(|| CliError::config(format!("input group {i} was not supplied")))
        })
        .collect()
}

fn latency_backend(latency_ms: f64) -> Result<LatencyBackend, CliError> {
    if !latency_ms.is_finite() || latency_ms < 0.0 {
        return Err(CliError::config("latency must be a non-negative number"));
    }
    let model = GateCostModel::bootstrap(Duration::from_secs_f64(latency_ms / 1e3));
    Ok(LatencyBackend::new(model))
}

fn run_plain_like<B: Backend>(
    circuit: &Circuit,
    backend: &B,
    preset: &str,
    schedule: &Schedule,
    input_bits: &[Vec<bool>],
) -> Result<EvalReport<bool>, CliError> {
    let keys = backend
        .keygen(&SecurityParams::named(preset))
        .map_err(|e| CliError::config(e.to_string()))?;
    let inputs =
        encrypt_inputs(backend, &keys, input_bits).map_err(|e| CliError::eval(e.to_string()))?;
    let report = eval_parallel(circuit, schedule, backend, &keys, &inputs)
        .map_err(|e| CliError::eval(e.to_string()))?;
    let mut report =
        decrypt_outputs(backend, &keys, report).map_err(|e| CliError::eval(e.to_string()))?;
    report.preset = preset.to_string();
    Ok(report)
}

fn run_fhe(
    circuit: &Circuit,
    preset: &str,
    schedule: &Schedule,
    input_bits: &[Vec<bool>],
) -> Result<(EvalReport<bool>, PhaseTimings), CliError> {
    let backend = TfheBackend;
    let t = Instant::now();
    let keys = backend
        .keygen(&SecurityParams::named(preset))
        .map_err(|e| CliError::config(e.to_string()))?;
    let keygen_ms = t.elapsed().as_secs_f64() * 1e3;

    let t = Instant::now();
    let inputs =
        encrypt_inputs(&backend, &keys, input_bits).map_err(|e| CliError::eval(e.to_string()))?;
    let enc_ms = t.elapsed().as_secs_f64() * 1e3;

    let report = eval_parallel(circuit, schedule, &backend, &keys, &inputs)
        .map_err(|e| CliError::eval(e.to_string()))?;
    let eval_ms = report.total_wall_time.as_secs_f64() * 1e3;

    let t = Instant::now();
    let mut report =
        decrypt_outputs(&backend, &keys, report).map_err(|e| CliError::eval(e.to_string()))?;
    let dec_ms = t.elapsed().as_secs_f64() * 1e3;
    report.preset = preset.to_string();

    Ok((
        report,
        PhaseTimings {
            keygen_ms,
            enc_ms,
            eval_ms,
            dec_ms,
        },
    ))
}

fn cmd_eval(args: &EvalArgs) -> Result<(), CliError> {
    if args.threads < 1 {
        return Err(CliError::config("thread count must be at least 1"));
    }
    let circuit = load_circuit(&args.circuit)?;
    let input_bits = parse_input_bindings(
        &circuit,
        &args.inputs,
        args.inputs_file.as_deref(),
        args.seed,
    )?;
    let schedule = schedule_for(&circuit, args.threads)?;

    let json = match args.backend.as_str() {
        "plain" => run_plain_like(&circuit, &PlainBackend, "plain", &schedule, &input_bits)?
            .to_json(),
        "latency" => {
            let backend = latency_backend(args.latency_ms)?;
            run_plain_like(&circuit, &backend, "latency", &schedule, &input_bits)?.to_json()
        }
        "fhe" => {
            let (report, phases) = run_fhe(&circuit, &args.preset, &schedule, &input_bits)?;
            let mut json = report.to_json();
            json.phases = Some(phases);
            json
        }
        other => return Err(CliError::config(format!("unknown backend `{other}`"))),
    };
    emit(
        args.out.as_deref(),
        &serde_json::to_string_pretty(&json).unwrap(),
    )
}

fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    if args.k_list.is_empty() || args.k_list.contains(&0) {
        return Err(CliError::config("k-list must name worker counts >= 1"));
    }
    let circuit = load_circuit(&args.circuit)?;
    let input_bits = parse_input_bindings(
        &circuit,
        &args.inputs,
        args.inputs_file.as_deref(),
        args.seed,
    )?;
    let order = topo_sort(&circuit).map_err(|e| CliError::parse(e.to_string()))?;
    let depths = assign_depths(&circuit, &order).map_err(|e| CliError::parse(e.to_string()))?;
    let hist = layer_histogram(&depths);

    // speedups are relative to k = 1; run it even when not requested
    let mut ks: Vec<usize> = args.k_list.clone();
    if !ks.contains(&1) {
        ks.insert(0, 1);
    }

    let model = GateCostModel::bootstrap(Duration::from_secs_f64(args.latency_ms / 1e3));
    let mut rows: Vec<(usize, f64, f64)> = Vec::new();
    for &k in &ks {
        let schedule = build_schedule(&depths, k).map_err(|e| CliError::config(e.to_string()))?;
        let report = match args.backend.as_str() {
            "latency" => {
                let backend = latency_backend(args.latency_ms)?;
                run_plain_like(&circuit, &backend, "latency", &schedule, &input_bits)?
            }
            "fhe" => run_fhe(&circuit, &args.preset, &schedule, &input_bits)?.0,
            other => {
                return Err(CliError::config(format!(
                    "bench supports latency or fhe backends, not `{other}`"
                )))
            }
        };
        let predicted = predict_parallel_time(&hist, &model, k).as_secs_f64() * 1e3;
        rows.push((k, report.total_wall_time.as_secs_f64() * 1e3, predicted));
    }

    let baseline = rows
        .iter()
        .find(|(k, _, _)| *k == 1)
        .map(|(_, ms, _)| *ms)
        .expect("k=1 is always measured");
    let mut csv = String::from("k,total_ms,speedup,predicted_ms\n");
    for (k, ms, predicted) in rows {
        csv.push_str(&format!(
            "{k},{ms:.3},{speedup:.3},{predicted:.3}\n",
            speedup = baseline / ms
        ));
    }
    emit(args.out.as_deref(), &csv)
}

fn cmd_keygen(preset: &str, out: &Path) -> Result<(), CliError> {
    let backend = TfheBackend;
    let keys = backend
        .keygen(&SecurityParams::named(preset))
        .map_err(|e| CliError::config(e.to_string()))?;
    keyfile::write_secret_key(out, &backend.export_secret_key(&keys)).map_err(CliError::config)?;
    eprintln!("wrote secret key ({preset}) to {}", out.display());
    Ok(())
}

fn cmd_enc(key: &Path, hex: &str, out: &Path) -> Result<(), CliError> {
    let exported = keyfile::read_secret_key(key).map_err(CliError::config)?;
    let n_bits = hex.trim().len() * 4;
    let bits = hex_to_bits(hex, n_bits).map_err(|e| CliError::config(e.to_string()))?;
    let cts: Vec<_> = bits.iter().map(|&b| exported.client.encrypt(b)).collect();
    keyfile::write_ciphertexts(out, &exported.preset, &cts).map_err(CliError::config)?;
    eprintln!("encrypted {n_bits} bits to {}", out.display());
    Ok(())
}

fn cmd_dec(key: &Path, ct: &Path) -> Result<(), CliError> {
    let exported = keyfile::read_secret_key(key).map_err(CliError::config)?;
    let (preset, cts) = keyfile::read_ciphertexts(ct).map_err(CliError::config)?;
    if preset != exported.preset {
        return Err(CliError::config(format!(
            "ciphertext preset `{preset}` does not match key preset `{}`",
            exported.preset
        )));
    }
    let bits: Vec<bool> = cts.iter().map(|c| exported.client.decrypt(c)).collect();
    println!("{}", bits_to_hex(&bits));
    Ok(())
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            fs::write(path, content).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
        }
        None => {
            println!("{content}");
            Ok(())
        }
    }
}
