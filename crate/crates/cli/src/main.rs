//! `fmzv`: finite multiple zeta value relations from the command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use fmzv_core::harmonic::{mod_harmonic_sums, parallel_horizontal_dp, Engine};
use fmzv_core::indices::bounded_weight_tree;
use fmzv_core::mitm::{nonzero_tuple, solve_bounded_relation};
use fmzv_core::modarith::parse_prime_list;
use fmzv_core::pipeline::{
    dimension_recursion, run_pipeline_on, vanishing_guard, verify_relation_with, GuardVerdict,
};
use fmzv_core::report::{
    format_coefficients, harmonic_rows, parse_basis, parse_config, verify_table,
    write_harmonic_csv, JsonReport, RelationTable, BUILTIN_W10,
};
use fmzv_core::{CoefficientArray, Cyclic, PipelineConfig, Prime};

const EXIT_HELP: &str = "\
Exit codes:
  0  success
  1  verification failure (some relation does not vanish)
  2  configuration or input error
  3  vanishing guard failed under --strict-guard";

#[derive(Parser)]
#[command(name = "fmzv", version, about = "Finite multiple zeta value relation search", after_help = EXIT_HELP)]
struct Cli {
    /// Worker threads for per-prime work.
    #[arg(long, global = true, env = "FMZV_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Auto,
    Naive,
    Horizontal,
    Vertical,
    Tree,
}

#[derive(Subcommand)]
enum Command {
    /// Dump mod-p harmonic sums for every index of one weight.
    Harmonic {
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        primes: String,
        #[arg(long, value_enum, default_value = "auto")]
        engine: EngineArg,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Find a bounded relation among elements of Z/NZ.
    Solve {
        #[arg(long)]
        modulus: u64,
        /// Comma-separated integers.
        #[arg(long, allow_hyphen_values = true)]
        elements: String,
        #[arg(long)]
        bound: u32,
    },
    /// Discover a basis and relation table for one weight.
    Pipeline {
        /// key = value config file (weight, primes, bound, safety_factor, workers, keys_only).
        config: Option<PathBuf>,
        #[arg(long)]
        weight: Option<u32>,
        #[arg(long)]
        primes: Option<String>,
        #[arg(long)]
        bound: Option<u32>,
        #[arg(long)]
        keys_only: bool,
        /// Exit with code 3 when the accidental-vanishing guard fails.
        #[arg(long)]
        strict_guard: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Writes the table in `--format`; the other format goes next to it.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check a relation table against fresh harmonic sums.
    Verify {
        /// `builtin-w10`, a JSON report, or a CSV table (needs --basis).
        table: String,
        #[arg(long)]
        primes: String,
        /// Basis for CSV tables, e.g. "(8,1,1);(7,2,1);(6,3,1)".
        #[arg(long)]
        basis: Option<String>,
        /// Per-row report as CSV.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Time the tree DP at two primes and compare with linear scaling.
    Bench {
        #[arg(long, default_value_t = 10)]
        weight: u32,
        #[arg(long, default_value = "10007,20011")]
        primes: String,
    },
}

/// Errors that carry their own exit code.
enum Failure {
    Config(anyhow::Error),
    Verification(String),
    Guard(String),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Config(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    let result = match cli.command {
        Command::Harmonic {
            weight,
            primes,
            engine,
            format,
            output,
        } => cmd_harmonic(weight, &primes, engine, format, output.as_deref(), workers),
        Command::Solve {
            modulus,
            elements,
            bound,
        } => cmd_solve(modulus, &elements, bound),
        Command::Pipeline {
            config,
            weight,
            primes,
            bound,
            keys_only,
            strict_guard,
            format,
            output,
        } => pipeline_config(
            config.as_deref(),
            weight,
            primes.as_deref(),
            bound,
            keys_only,
            workers,
        )
        .and_then(|cfg| cmd_pipeline(&cfg, strict_guard, format, output.as_deref())),
        Command::Verify {
            table,
            primes,
            basis,
            output,
        } => cmd_verify(
            &table,
            &primes,
            basis.as_deref(),
            output.as_deref(),
            workers,
        ),
        Command::Bench { weight, primes } => cmd_bench(weight, &primes),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Guard(msg)) => {
            eprintln!("guard failed: {msg}");
            ExitCode::from(3)
        }
    }
}

fn primes_arg(s: &str) -> anyhow::Result<Vec<Prime>> {
    parse_prime_list(s).with_context(|| format!("invalid --primes `{s}`"))
}

/// Writes to `path`, or stdout when absent.
fn emit(path: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().write_all(bytes)?),
    }
}

fn cmd_harmonic(
    weight: u32,
    primes: &str,
    engine: EngineArg,
    format: Format,
    output: Option<&Path>,
    workers: usize,
) -> Outcome {
    let primes = primes_arg(primes)?;
    let engine = match engine {
        EngineArg::Auto => None,
        EngineArg::Naive => Some(Engine::Naive),
        EngineArg::Horizontal => Some(Engine::Horizontal),
        EngineArg::Vertical => Some(Engine::Vertical),
        EngineArg::Tree => Some(Engine::Tree),
    };
    let rows = harmonic_rows(&primes, weight, engine, workers)?;
    let mut buf = Vec::new();
    match format {
        Format::Csv => write_harmonic_csv(&rows, &mut buf)?,
        Format::Json => {
            let items: Vec<_> = rows
                .iter()
                .map(|(k, p, v)| serde_json::json!({ "index": k, "prime": p, "value": v }))
                .collect();
            serde_json::to_writer_pretty(&mut buf, &items)?;
            buf.push(b'\n');
        }
    }
    emit(output, &buf)?;
    Ok(())
}

fn cmd_solve(modulus: u64, elements: &str, bound: u32) -> Outcome {
    let group = Cyclic::new(modulus)?;
    let xs = elements
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map(|v| group.elem(v))
                .with_context(|| format!("invalid element `{t}`"))
        })
        .collect::<anyhow::Result<Vec<u64>>>()?;
    let coeffs = CoefficientArray::new(bound);
    match solve_bounded_relation(&group, &xs, &coeffs, nonzero_tuple) {
        Some(sol) => println!("{}", format_coefficients(&sol.coefficients)),
        None => println!("none"),
    }
    Ok(())
}

fn pipeline_config(
    path: Option<&Path>,
    weight: Option<u32>,
    primes: Option<&str>,
    bound: Option<u32>,
    keys_only: bool,
    workers: usize,
) -> Result<PipelineConfig, Failure> {
    let mut cfg = match path {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            parse_config(&text)?
        }
        None => {
            let (Some(w), Some(ps), Some(b)) = (weight, primes, bound) else {
                return Err(Failure::Config(anyhow::anyhow!(
                    "give a config file or all of --weight, --primes and --bound"
                )));
            };
            let mut cfg = PipelineConfig::new(w, primes_arg(ps)?, b);
            cfg.workers = workers;
            cfg
        }
    };
    if let Some(w) = weight {
        cfg.weight = w;
    }
    if let Some(ps) = primes {
        cfg.primes = primes_arg(ps)?;
    }
    if let Some(b) = bound {
        cfg.bound = b;
    }
    cfg.keys_only |= keys_only;
    cfg.validate()?;
    Ok(cfg)
}

fn swap_extension(path: &Path, format: Format) -> PathBuf {
    path.with_extension(match format {
        Format::Csv => "json",
        Format::Json => "csv",
    })
}

fn cmd_pipeline(
    cfg: &PipelineConfig,
    strict_guard: bool,
    format: Format,
    output: Option<&Path>,
) -> Outcome {
    let d_w = dimension_recursion(cfg.weight);
    let guard = vanishing_guard(cfg, d_w as u32);
    let guard_line = match (&guard.verdict, &guard.short_verdict) {
        (GuardVerdict::Pass, _) => "pass".to_string(),
        (GuardVerdict::Warning(r), GuardVerdict::Pass) => {
            format!("warning (N/threshold = {r:.3e}; short threshold passes)")
        }
        (GuardVerdict::Warning(r), GuardVerdict::Warning(s)) => {
            format!("warning (N/threshold = {r:.3e}, N/short threshold = {s:.3e})")
        }
    };
    eprintln!(
        "weight {}  primes {}  bound {}",
        cfg.weight,
        cfg.primes.len(),
        cfg.bound
    );
    eprintln!(
        "N = {}  threshold = {}  safety factor = {}",
        guard.modulus, guard.threshold, guard.safety_factor
    );
    eprintln!("guard: {guard_line}");
    if strict_guard && guard.verdict != GuardVerdict::Pass {
        return Err(Failure::Guard(format!(
            "N = {} is below {} x {}",
            guard.modulus, guard.safety_factor, guard.threshold
        )));
    }

    let sums = mod_harmonic_sums(&cfg.primes, cfg.weight, cfg.workers)?;
    let out = run_pipeline_on(cfg, &sums)?;
    let reports = out
        .relations
        .iter()
        .map(|r| verify_relation_with(r, &sums))
        .collect::<fmzv_core::Result<Vec<_>>>()?;
    let basis: Vec<String> = out.basis.iter().map(|k| k.to_string()).collect();
    eprintln!(
        "basis ({}): {}   expected d_w = {}",
        basis.len(),
        basis.join(" "),
        d_w
    );
    let verified = reports.iter().filter(|r| r.holds()).count();
    eprintln!(
        "relations: {} found, {} verified",
        out.relations.len(),
        verified
    );

    let table = RelationTable::from_output(&out);
    let csv = table.to_csv_string().into_bytes();
    let mut json = JsonReport::new(cfg, &out, &guard, reports)
        .to_json()?
        .into_bytes();
    json.push(b'\n');
    let (main, other) = match format {
        Format::Csv => (csv, json),
        Format::Json => (json, csv),
    };
    emit(output, &main)?;
    if let Some(p) = output {
        emit(Some(&swap_extension(p, format)), &other)?;
    }
    if verified != out.relations.len() {
        return Err(Failure::Verification(format!(
            "{} of {} discovered relations do not vanish",
            out.relations.len() - verified,
            out.relations.len()
        )));
    }
    Ok(())
}

fn load_table(spec: &str, basis: Option<&str>) -> anyhow::Result<RelationTable> {
    if spec == BUILTIN_W10 {
        return Ok(RelationTable::builtin_w10());
    }
    let text = fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
    if spec.ends_with(".json") || text.trim_start().starts_with('{') {
        return Ok(JsonReport::from_json(&text)?.table());
    }
    let Some(basis) = basis else {
        bail!("a CSV table needs --basis");
    };
    Ok(RelationTable::read_csv(
        text.as_bytes(),
        parse_basis(basis)?,
    )?)
}

fn cmd_verify(
    spec: &str,
    primes: &str,
    basis: Option<&str>,
    output: Option<&Path>,
    workers: usize,
) -> Outcome {
    let table = load_table(spec, basis)?;
    let primes = primes_arg(primes)?;
    let verdicts = verify_table(&table, &primes, workers)?;
    let mut report = csv::Writer::from_writer(Vec::new());
    report.write_record(["target", "pass", "residues"])?;
    let mut failed = 0;
    for v in &verdicts {
        let pass = v.report.holds();
        if !pass {
            failed += 1;
            println!("FAIL {} residues {:?}", v.target, v.report.residues);
        }
        let residues: Vec<i64> = v.report.residues.iter().map(|&r| r as i64).collect();
        report.write_record([
            v.target.to_string(),
            pass.to_string(),
            format_coefficients(&residues),
        ])?;
    }
    if let Some(p) = output {
        emit(
            Some(p),
            &report.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?,
        )?;
    }
    let plist: Vec<String> = primes.iter().map(|p| p.to_string()).collect();
    println!(
        "{}/{} relations vanish mod every prime ({})",
        verdicts.len() - failed,
        verdicts.len(),
        plist.join(",")
    );
    if failed > 0 {
        return Err(Failure::Verification(format!("{failed} rows fail")));
    }
    Ok(())
}

fn cmd_bench(weight: u32, primes: &str) -> Outcome {
    let primes = primes_arg(primes)?;
    let tree = bounded_weight_tree(weight);
    let mut times = Vec::new();
    for &p in &primes {
        // best of three
        let best = (0..3)
            .map(|_| {
                let t = Instant::now();
                std::hint::black_box(parallel_horizontal_dp(p, &tree));
                t.elapsed().as_secs_f64()
            })
            .fold(f64::INFINITY, f64::min);
        println!("p = {p}  nodes = {}  time = {:.4}s", tree.len(), best);
        times.push(best);
    }
    if let [a, b] = times[..] {
        let ratio = b / a;
        let within = (1.4..=2.8).contains(&ratio);
        println!(
            "ratio = {ratio:.3}  expected 1.4..2.8 for p doubling: {}",
            if within { "ok" } else { "outside (non-fatal)" }
        );
    }
    Ok(())
}
