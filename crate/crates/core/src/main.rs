use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dephasing::capacity::{is_asymptotic_regime, maximize_over_ansatz};
use dephasing::io::{
    format_number, write_csv, write_json, OutputFormat, Provenance, RawSweepConfig, ResultRecord,
    TOOL_VERSION,
};
use dephasing::validation::{run_validation, ValidationLevel, ValidationOptions};
use dephasing::{
    asymptotic_capacity, capacity_sweep, maximize_coherent_information, two_point_lower_bound,
    DephasingParams, Error, GradientMode, InputDistribution, OptimizerConfig,
};

const EXIT_USAGE: u8 = 1;
const EXIT_FAILED: u8 = 2;
const EXIT_IO: u8 = 3;
const THREADS_ENV: &str = "DEPHASING_THREADS";

#[derive(Parser)]
#[command(
    name = "dephasing",
    version,
    about = "Quantum capacity of the bosonic dephasing channel"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximize the coherent information for one (N, gamma) pair.
    Capacity {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        gamma: f64,
        #[command(flatten)]
        optimizer: OptimizerFlags,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run a capacity sweep described by a TOML file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `[output] path`.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Overrides `[output] format`.
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Overrides `[optimizer] seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; defaults to $DEPHASING_THREADS, then all cores.
        #[arg(long)]
        threads: Option<usize>,
        /// Record the wall-clock time in JSON provenance (breaks byte-identity).
        #[arg(long)]
        timestamp: bool,
    },
    /// Two-point lower bound 1 − H2((1 ± e^{−γj²/2})/2).
    LowerBound {
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 1)]
        j: usize,
    },
    /// Best discrete Gaussian input centred at N/2.
    Ansatz {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        gamma: f64,
    },
    /// Large-gamma capacity formula, for the optimal or a given distribution.
    Asymptotic {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        gamma: f64,
        /// Comma-separated weights p_0..p_N; defaults to the optimizer's p_opt.
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
    },
    /// Run the oracle cross-checks.
    Validate {
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, hide = true)]
        corrupt_gram: bool,
    },
}

#[derive(Args)]
struct OptimizerFlags {
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    #[arg(long, default_value_t = 20_000)]
    max_iterations: usize,
    #[arg(long, default_value_t = 3)]
    restarts: usize,
    #[arg(long, value_enum, default_value_t = Mode::Analytic)]
    gradient_mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl OptimizerFlags {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            objective_tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            restarts: self.restarts,
            gradient_mode: match self.gradient_mode {
                Mode::Analytic => GradientMode::Analytic,
                Mode::FiniteDifference => GradientMode::FiniteDifference,
            },
            seed: self.seed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Analytic,
    FiniteDifference,
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Quick,
    Full,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => EXIT_IO,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: e.to_string(),
        }
    }
}

fn params(gamma: f64) -> Result<DephasingParams, Failure> {
    DephasingParams::new(gamma).map_err(Failure::from)
}

fn print_rows(header: &[String], rows: &[Vec<String>]) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", header.join(","))?;
    for r in rows {
        writeln!(out, "{}", r.join(","))?;
    }
    Ok(())
}

fn p_columns(n: usize) -> impl Iterator<Item = String> {
    (0..=n).map(|k| format!("p_{k}"))
}

fn cmd_capacity(
    n: usize,
    gamma: f64,
    flags: &OptimizerFlags,
    format: Format,
) -> Result<u8, Failure> {
    let config = flags.config();
    config.validate()?;
    let result = maximize_coherent_information(n, params(gamma)?, &config)?;
    let record = ResultRecord::from_result(&result);
    let stdout = std::io::stdout().lock();
    match format {
        Format::Csv => write_csv(stdout, std::slice::from_ref(&record))?,
        Format::Json => {
            let mut stdout = stdout;
            serde_json::to_writer_pretty(&mut stdout, &record)
                .map_err(|e| Failure::from(Error::Io(e.to_string())))?;
            writeln!(stdout)?;
        }
    }
    if result.converged {
        Ok(0)
    } else {
        eprintln!(
            "warning: not converged after {} iterations (gradient residual {})",
            result.iterations,
            format_number(result.gradient_residual)
        );
        Ok(EXIT_FAILED)
    }
}

fn thread_count(flag: Option<usize>) -> Result<usize, Failure> {
    let from_env =
        match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| {
                Failure::usage(format!("{THREADS_ENV}='{v}' is not a thread count"))
            })?),
            Err(_) => None,
        };
    let n = flag
        .or(from_env)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if n == 0 {
        return Err(Failure::usage("thread count must be at least 1"));
    }
    Ok(n)
}

fn cmd_sweep(
    config: PathBuf,
    output: Option<PathBuf>,
    format: Option<Format>,
    seed: Option<u64>,
    threads: Option<usize>,
    timestamp: bool,
) -> Result<u8, Failure> {
    let raw = RawSweepConfig::load(&config)?;
    let sweep = raw.resolve(output, format.map(Into::into), seed)?;
    let file = File::create(&sweep.output_path).map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", sweep.output_path.display()),
    })?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count(threads)?)
        .build()
        .map_err(|e| Failure::usage(e.to_string()))?;
    let points = pool.install(|| capacity_sweep(&sweep.gammas, &sweep.ns, &sweep.optimizer))?;
    for p in &points {
        match &p.outcome {
            Err(e) => eprintln!(
                "warning: N={} gamma={} failed: {e}",
                p.n,
                format_number(p.gamma)
            ),
            Ok(r) if !r.converged => {
                eprintln!(
                    "warning: N={} gamma={} did not converge",
                    p.n,
                    format_number(p.gamma)
                )
            }
            Ok(_) => {}
        }
    }
    let records: Vec<ResultRecord> = points.iter().map(ResultRecord::from_point).collect();
    let out = BufWriter::new(file);
    match sweep.format {
        OutputFormat::Csv => write_csv(out, &records)?,
        OutputFormat::Json => {
            let provenance = Provenance {
                tool_version: TOOL_VERSION.into(),
                config_hash: sweep.hash(),
                timestamp: timestamp.then(unix_seconds),
            };
            write_json(out, &provenance, &records)?
        }
    }
    eprintln!(
        "wrote {} rows to {} (dephasing {TOOL_VERSION}, config sha256 {})",
        records.len(),
        sweep.output_path.display(),
        sweep.hash()
    );
    Ok(0)
}

fn unix_seconds() -> String {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
        .to_string()
}

fn cmd_lower_bound(gamma: f64, j: usize) -> Result<u8, Failure> {
    let b = two_point_lower_bound(params(gamma)?, j)?;
    let header = ["gamma", "j", "q_plus", "q_minus", "value_bits"].map(String::from);
    let row = vec![
        format_number(b.gamma),
        b.j.to_string(),
        format_number(b.q_plus),
        format_number(b.q_minus),
        format_number(b.value_bits),
    ];
    print_rows(&header, &[row])?;
    Ok(0)
}

fn cmd_ansatz(n: usize, gamma: f64) -> Result<u8, Failure> {
    let fit = maximize_over_ansatz(n, params(gamma)?)?;
    let mut header: Vec<String> = ["gamma", "N", "sigma", "q_bits", "mean_energy"]
        .map(String::from)
        .into();
    header.extend(p_columns(n));
    let mut row = vec![
        format_number(gamma),
        n.to_string(),
        format_number(fit.sigma),
        format_number(fit.q_bits),
        format_number(fit.distribution.mean_energy()),
    ];
    row.extend(fit.distribution.probs().iter().map(|&x| format_number(x)));
    print_rows(&header, &[row])?;
    Ok(0)
}

fn cmd_asymptotic(n: usize, gamma: f64, p: Option<Vec<f64>>) -> Result<u8, Failure> {
    let params = params(gamma)?;
    if !is_asymptotic_regime(params) {
        eprintln!(
            "warning: e^(-gamma/2) = {} is not small; the large-gamma formula is unreliable here",
            format_number(params.epsilon())
        );
    }
    let dist = match p {
        Some(w) => {
            if w.len() != n + 1 {
                return Err(Failure::usage(format!(
                    "--p needs {} weights for N={n}, got {}",
                    n + 1,
                    w.len()
                )));
            }
            InputDistribution::new(w)?
        }
        None => maximize_coherent_information(n, params, &OptimizerConfig::default())?.p_opt,
    };
    let mut header: Vec<String> = ["gamma", "N", "q_bits"].map(String::from).into();
    header.extend(p_columns(n));
    let mut row = vec![
        format_number(gamma),
        n.to_string(),
        format_number(asymptotic_capacity(&dist, params)),
    ];
    row.extend(dist.probs().iter().map(|&x| format_number(x)));
    print_rows(&header, &[row])?;
    Ok(0)
}

fn cmd_validate(level: Level, seed: u64, corrupt_gram: bool) -> Result<u8, Failure> {
    let options = ValidationOptions {
        level: match level {
            Level::Quick => ValidationLevel::Quick,
            Level::Full => ValidationLevel::Full,
        },
        seed,
        corrupt_gram_kernel: corrupt_gram,
    };
    let reports = run_validation(&options);
    let mut out = std::io::stdout().lock();
    for r in &reports {
        writeln!(
            out,
            "{} {} checks={} max_deviation={} tolerance={}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.checks,
            format_number(r.max_deviation),
            format_number(r.tolerance)
        )?;
        for e in &r.errors {
            writeln!(out, "  error: {e}")?;
        }
    }
    Ok(if reports.iter().all(|r| r.passed) {
        0
    } else {
        EXIT_FAILED
    })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Capacity {
            n,
            gamma,
            optimizer,
            format,
        } => cmd_capacity(n, gamma, &optimizer, format),
        Command::Sweep {
            config,
            output,
            format,
            seed,
            threads,
            timestamp,
        } => cmd_sweep(config, output, format, seed, threads, timestamp),
        Command::LowerBound { gamma, j } => cmd_lower_bound(gamma, j),
        Command::Ansatz { n, gamma } => cmd_ansatz(n, gamma),
        Command::Asymptotic { n, gamma, p } => cmd_asymptotic(n, gamma, p),
        Command::Validate {
            level,
            seed,
            corrupt_gram,
        } => cmd_validate(level, seed, corrupt_gram),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
