//! `opkernel`: JSON in, report JSON out. Exit code 0 when every check
//! passes, 1 when a mathematical check fails, 2 on malformed input or usage.

pub mod commands;
pub mod config;
pub mod format;
pub mod report;
pub mod selftest;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use opkernel_core::Result;

use commands::StarKind;
use config::Config;
use report::Report;

#[derive(Debug, Parser)]
#[command(name = "opkernel", version, about = "Operator-valued kernels, dilations and semigroups")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Write the report here instead of stdout.
    #[arg(short = 'o', long, global = true)]
    output: Option<PathBuf>,
    /// Relative tolerance, or REL,ABS (overrides OPKERNEL_TOL).
    #[arg(long, global = true)]
    tol: Option<String>,
    /// Cap on the number of kernel points.
    #[arg(long, global = true)]
    max_points: Option<usize>,
    /// Cap on the Gram size of a GNS construction.
    #[arg(long, global = true)]
    max_generators: Option<usize>,
    /// Cap on the occupation-number basis of the truncated Fock space.
    #[arg(long, global = true)]
    max_sym_basis: Option<usize>,
    /// PRNG seed for randomized probes and the selftest.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Run independent sections on separate threads.
    #[arg(long, global = true)]
    parallel: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    Pd,
    Cpd,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Positive definiteness of a kernel, or complete positive definiteness
    /// of a kernel of maps.
    Check { kind: CheckKind, file: PathBuf },
    /// Minimal Kolmogorov decomposition of a PD kernel.
    Kolmogorov { file: PathBuf },
    /// GNS correspondence of a CPD kernel.
    Gns { file: PathBuf },
    /// Schur composition L∘K and its embedding into GNS(K) ⊙ GNS(L).
    Compose {
        #[arg(short = 'l', long = "outer")]
        l: PathBuf,
        #[arg(short = 'k', long = "inner")]
        k: PathBuf,
    },
    /// Stinespring dilation of a CPD kernel.
    Stinespring { file: PathBuf },
    /// Sextuple (K₁, K₂, V, W, ρ, Ψ) of a φ-map.
    Phimap { file: PathBuf },
    /// E* ⊙ 𝔈 ⊙ E for a correspondence over the compacts of E.
    Sandwich { file: PathBuf },
    /// Schur semigroup exp(tℓ) of a conditionally PD generator.
    Schoenberg {
        file: PathBuf,
        /// Base point σ₀ (defaults to the first point).
        #[arg(long)]
        base: Option<String>,
        /// Comma-separated times (defaults to 2^-6, 2^-5, ..., 2^4).
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
        /// Fock space truncation level.
        #[arg(long = "fock-n")]
        fock_n: Option<usize>,
    },
    /// Product system structure of a CP or CPD semigroup at times s, t.
    Semigroup {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<f64>,
    },
    /// 𝒮-positivity over a *-algebra with a set of positive functionals.
    Star { kind: StarKind, file: PathBuf },
    /// Run the built-in acceptance suite.
    Selftest {
        /// Read fixtures from this directory instead of the built-in copies.
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

fn config(opts: &GlobalOpts) -> Result<Config> {
    let mut cfg = Config::default();
    if let Some(tol) = config::env_tolerance()? {
        cfg.tol = tol;
    }
    if let Some(t) = &opts.tol {
        cfg.tol = config::parse_tolerance(t)?;
    }
    cfg.max_points = opts.max_points.unwrap_or(cfg.max_points);
    cfg.max_generators = opts.max_generators.unwrap_or(cfg.max_generators);
    cfg.max_sym_basis = opts.max_sym_basis.unwrap_or(cfg.max_sym_basis);
    cfg.seed = opts.seed.unwrap_or(cfg.seed);
    cfg.output = opts.output.clone();
    cfg.parallel = opts.parallel;
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(cfg: &Config, command: &Command, r: &mut Report) -> Result<()> {
    match command {
        Command::Check { kind: CheckKind::Pd, file } => commands::check_pd(cfg, file, r),
        Command::Check { kind: CheckKind::Cpd, file } => commands::check_cpd(cfg, file, r),
        Command::Kolmogorov { file } => commands::kolmogorov(cfg, file, r),
        Command::Gns { file } => commands::gns_cmd(cfg, file, r),
        Command::Compose { l, k } => commands::compose(cfg, l, k, r),
        Command::Stinespring { file } => commands::stinespring_cmd(cfg, file, r),
        Command::Phimap { file } => commands::phimap(cfg, file, r),
        Command::Sandwich { file } => commands::sandwich(cfg, file, r),
        Command::Schoenberg {
            file,
            base,
            times,
            fock_n,
        } => commands::schoenberg(cfg, file, base.as_deref(), times.as_deref(), *fock_n, r),
        Command::Semigroup { file, times } => commands::semigroup(cfg, file, times, r),
        Command::Star { kind, file } => commands::star(cfg, *kind, file, r),
        Command::Selftest { fixtures } => {
            let loaded = selftest::load_fixtures(fixtures.as_deref());
            selftest::selftest(cfg, &loaded, r);
            Ok(())
        }
    }
}

fn emit(cfg: &Config, r: &Report) -> std::io::Result<()> {
    let text = format::to_string(r).map_err(std::io::Error::other)?;
    match &cfg.output {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            std::io::stdout().lock().write_all(text.as_bytes())
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            e.print().ok();
            return code;
        }
    };
    let cfg = match config(&cli.opts) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("opkernel: {e}");
            return 2;
        }
    };
    let echo = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let mut report = Report::new(echo);
    let start = Instant::now();
    if let Err(e) = dispatch(&cfg, &cli.command, &mut report) {
        if e.is_input_error() {
            eprintln!("opkernel: {e}");
            return 2;
        }
        report.fail_with(&e);
    }
    report.timing.seconds = start.elapsed().as_secs_f64();
    if let Err(e) = emit(&cfg, &report) {
        eprintln!("opkernel: cannot write report: {e}");
        return 2;
    }
    report.exit_code()
}
