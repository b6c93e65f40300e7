//! `ffartin`: run primitive-root experiments from a config and check the
//! invariant battery.
//!
//! Exit codes: 0 ok, 1 invariant failure, 2 config error, 3 resource cap.

mod commands;
mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{CmdResult, Failure, Output, Run, VerifyRequest};
use config::{ExperimentConfig, Format, Settings};

#[derive(Parser)]
#[command(name = "ffartin", version, about = "Primitive-root counts for function fields over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Config file of `key = value` lines with optional `[section]` headers
    #[arg(long)]
    config: Option<PathBuf>,
    /// Shorthand such as "p=2; P1; g=t; n=1..6"
    #[arg(long)]
    spec: Option<String>,
    /// Extra KEY=VALUE setting, applied last (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Write results here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json
    #[arg(long)]
    format: Option<String>,
    /// Worker threads for the enumerations
    #[arg(long)]
    threads: Option<usize>,
    /// Maximum number of points or candidates to enumerate
    #[arg(long)]
    cap: Option<u64>,
    /// Fill the timing_ms column (makes output run-dependent)
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// N_X(g, n) with main term and normalized error, one row per n
    Count(Common),
    /// The correction factor rho_g(n) and its per-prime factors
    Rho(Common),
    /// Geometricity of g at each prime up to the search bound (option: ell=2,3)
    Geometric(Common),
    /// Character sums over R_g (options: delta=prime|all|LIST, hist, strict)
    Charsum(Common),
    /// Splitting probabilities and the density identity (option: empirical)
    Heuristic(Common),
    /// Degrees n with rho_g(n) > 0 (options: m_max, count)
    #[command(name = "generate-n")]
    GenerateN(Common),
    /// Run the invariant battery
    Verify(VerifyArgs),
    /// Gnuplot data files (option: what=count|charsum)
    Plotdata(Common),
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only this suite (repeatable)
    #[arg(long)]
    suite: Vec<String>,
    /// Corrupt the named suite's inputs to exercise failure reporting
    #[arg(long, hide = true)]
    inject_fault: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json; a text summary when absent
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = 1_000_000)]
    cap: u64,
}

fn settings(c: &Common) -> CmdResult<Settings> {
    let mut s = Settings::default();
    if let Some(path) = &c.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
        s.read_file(&text)?;
    }
    if let Some(spec) = &c.spec {
        s.read_spec(spec)?;
    }
    for kv in &c.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Failure::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        s.set(k, v)?;
    }
    if let Some(cap) = c.cap {
        s.set("cap", &cap.to_string())?;
    }
    if let Some(f) = &c.format {
        s.set("format", f)?;
    }
    if let Some(out) = &c.out {
        s.set("out", &out.to_string_lossy())?;
    }
    Ok(s)
}

fn threads(n: Option<usize>) -> CmdResult<()> {
    if let Some(n) = n {
        if n == 0 {
            return Err(Failure::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn emit(bytes: &[u8], out: Option<&PathBuf>) -> CmdResult<()> {
    let res = match out {
        Some(path) => std::fs::write(path, bytes),
        None => std::io::stdout().lock().write_all(bytes),
    };
    res.map_err(|e| Failure::Config(format!("cannot write output: {e}")))
}

type Cmd = fn(&Run) -> CmdResult<Output>;

fn experiment(c: &Common, allowed: &[&str], need_n: bool, cmd: Cmd) -> CmdResult<()> {
    threads(c.threads)?;
    let cfg = ExperimentConfig::from_settings(&settings(c)?, allowed, true, need_n)?;
    let format = cfg.format.unwrap_or(Format::Csv);
    let out = cfg.out.clone();
    let run = Run {
        cfg,
        timing: c.timing,
    };
    let mut buf = Vec::new();
    match cmd(&run)? {
        Output::Table(t) => t
            .write(format, &mut buf)
            .map_err(|e| Failure::Config(format!("cannot serialize output: {e}")))?,
        Output::Text(s) => buf.extend_from_slice(s.as_bytes()),
    }
    emit(&buf, out.as_ref())
}

fn verify(v: &VerifyArgs) -> CmdResult<()> {
    threads(v.threads)?;
    if v.cap == 0 {
        return Err(Failure::Config("cap must be positive".into()));
    }
    let format = v.format.as_deref().map(str::parse::<Format>).transpose()?;
    let (table, text, ok) = commands::cmd_verify(&VerifyRequest {
        suites: v.suite.clone(),
        faults: v.inject_fault.clone(),
        cap: v.cap,
    })?;
    let mut buf = Vec::new();
    match format {
        Some(f) => table
            .write(f, &mut buf)
            .map_err(|e| Failure::Config(format!("cannot serialize output: {e}")))?,
        None => buf.extend_from_slice(text.as_bytes()),
    }
    emit(&buf, v.out.as_ref())?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Invariant("invariant battery failed".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Count(c) => experiment(c, &[], true, commands::cmd_count),
        Command::Rho(c) => experiment(c, &[], true, commands::cmd_rho),
        Command::Geometric(c) => experiment(c, &["ell"], false, commands::cmd_geometric),
        Command::Charsum(c) => experiment(c, &["delta", "hist", "strict"], true, commands::cmd_charsum),
        Command::Heuristic(c) => experiment(c, &["empirical"], true, commands::cmd_heuristic),
        Command::GenerateN(c) => experiment(c, &["m_max", "count"], false, commands::cmd_generate_n),
        Command::Plotdata(c) => experiment(
            c,
            &["what", "delta", "hist", "strict"],
            true,
            commands::cmd_plotdata,
        ),
        Command::Verify(v) => verify(v),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ffartin: {}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
