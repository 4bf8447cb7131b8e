//! `sumprod`: exact sum-product computations from the command line.
//!
//! Exit codes: 0 success, 2 input error, 3 domain error, 4 an asserted
//! check failed, 5 a budget was exceeded.

mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sumprod::szt::ShiftKind;
use sumprod::Scalar;

use commands::{CertKind, Method, ModeArg, Output, Pipeline, ScanOp};
use config::RunConfig;
use error::CliError;

#[derive(Parser)]
#[command(name = "sumprod", version, about = "Exact sum-product computations")]
struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for JSON and CSV reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Add floating-point approximations, marked as such.
    #[arg(long, global = true)]
    decimal: bool,
    #[arg(long, global = true)]
    sigma_budget: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    gamma: Option<Scalar>,
    #[arg(long, global = true)]
    c_abs: Option<Scalar>,
    /// Random bipartitions per energy kind in the suite.
    #[arg(long, global = true)]
    bipartitions: Option<usize>,
    /// Drop the natural-log audit rows from the suite.
    #[arg(long, global = true)]
    no_log_audit: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One exact quantity of a set: sumset, productset, quotientset, e+,
    /// e×, e3×, sigma, sym, slice.
    Compute {
        quantity: String,
        /// Set file, or an inline family spec such as '{"kind":"ap","size":8}'.
        set: String,
        /// Second and third sets, where the quantity takes them.
        #[arg(long)]
        with: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Three comma-separated coefficients for sigma.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        /// Multiplicity threshold for sym.
        #[arg(long, default_value_t = 1)]
        t: u64,
        /// Print the JSON record instead of plain values.
        #[arg(long)]
        json: bool,
    },
    /// An upper-bound certificate for the Szemerédi–Trotter parameter.
    Certify {
        set: String,
        #[arg(long, value_enum, default_value = "search")]
        kind: CertKind,
        #[arg(long)]
        with: Option<String>,
    },
    /// Low-energy subsets and splits.
    Decompose {
        set: String,
        #[arg(long = "M", alias = "m", default_value = "auto")]
        m: String,
        #[arg(long, value_enum, default_value = "split")]
        method: Method,
    },
    /// Replays a proof pipeline step by step.
    Trace {
        #[arg(value_enum)]
        pipeline: Pipeline,
        set: String,
        #[arg(long, value_enum, default_value = "quotient")]
        mode: ModeArg,
        /// `auto` or a value in (0, 1].
        #[arg(long)]
        kappa: Option<String>,
    },
    /// Runs the inequality suite on a set or a family grid.
    Verify {
        set: Option<String>,
        #[arg(long, value_delimiter = ',')]
        family: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
    },
    /// Runs one operation over a batch of family specs.
    Scan {
        /// Batch file `{"op": ..., "specs": [...]}`.
        batch: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        family: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, value_enum, default_value = "sizes")]
        op: ScanOp,
    },
    /// Level-set scan against a `d` upper bound.
    Szt {
        set: String,
        #[arg(long, value_enum, default_value = "additive")]
        shift: ShiftArg,
        /// A value, or `search` for the best default certificate.
        #[arg(long)]
        d_upper: Option<String>,
    },
    /// Searches small arithmetic progressions for a slice configuration
    /// meeting both σ preconditions of the cubic slice bound.
    SliceSearch {
        #[arg(long, default_value_t = 24)]
        max_len: i64,
        #[arg(long, default_value_t = 6)]
        max_slice: usize,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ShiftArg {
    Additive,
    Multiplicative,
}

fn run(cli: Cli) -> Result<Output, CliError> {
    let flags = RunConfig {
        out: cli.out,
        threads: cli.threads,
        sigma_budget: cli.sigma_budget,
        gamma: cli.gamma,
        c_abs: cli.c_abs,
        decimal: cli.decimal.then_some(true),
        seed: cli.seed,
        bipartitions: cli.bipartitions,
        natural_log_audit: cli.no_log_audit.then_some(false),
    };
    let config = match &cli.config {
        Some(p) => RunConfig::load(p)?.overlay(flags),
        None => flags,
    };
    config.validate()?;
    if let Some(n) = config.threads {
        // fails only if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let seed = config.seed.unwrap_or(1);
    let mut out = match cli.command {
        Command::Compute {
            quantity,
            set,
            with,
            lambda,
            alpha,
            t,
            json,
        } => {
            let a = commands::load_set(&set)?;
            let with = with
                .iter()
                .map(|s| commands::load_set(s))
                .collect::<Result<Vec<_>, _>>()?;
            commands::compute(
                commands::ComputeArgs {
                    quantity: &quantity,
                    set: &a,
                    with: &with,
                    lambda: lambda.as_deref(),
                    alpha: alpha.as_deref(),
                    t,
                    json,
                },
                &config,
            )?
        }
        Command::Certify { set, kind, with } => {
            let a = commands::load_set(&set)?;
            let c = with.as_deref().map(commands::load_set).transpose()?;
            commands::certify(&a, kind, c.as_ref())?
        }
        Command::Decompose { set, m, method } => {
            commands::decompose(&commands::load_set(&set)?, method, &m)?
        }
        Command::Trace {
            pipeline,
            set,
            mode,
            kappa,
        } => commands::trace(
            &commands::load_set(&set)?,
            pipeline,
            mode,
            kappa.as_deref(),
            &config,
        )?,
        Command::Verify { set, family, sizes } => {
            let sets = match set {
                Some(s) => vec![(s.clone(), commands::load_set(&s)?)],
                None => commands::family_specs(&family, &sizes, seed)?
                    .iter()
                    .map(|spec| Ok((spec.label(), sumprod::generators::generate(spec)?)))
                    .collect::<Result<_, CliError>>()?,
            };
            commands::verify(&sets, &config)?
        }
        Command::Scan {
            batch,
            family,
            sizes,
            op,
        } => {
            let (specs, op) = match batch {
                Some(p) => {
                    let b = commands::load_batch(&p)?;
                    (b.specs, b.op)
                }
                None => (commands::family_specs(&family, &sizes, seed)?, op),
            };
            commands::scan(&specs, op, &config)?
        }
        Command::Szt {
            set,
            shift,
            d_upper,
        } => {
            let shift = match shift {
                ShiftArg::Additive => ShiftKind::Additive,
                ShiftArg::Multiplicative => ShiftKind::Multiplicative,
            };
            commands::szt(
                &commands::load_set(&set)?,
                shift,
                d_upper.as_deref(),
                &config,
            )?
        }
        Command::SliceSearch { max_len, max_slice } => {
            commands::slice_search(max_len, max_slice, &config)?
        }
    };
    if config.decimal() {
        out.json = out.json.map(|j| commands::json_with_decimals(&j));
    }
    emit(&out, &config)?;
    match (out.failure.take(), &config.out) {
        (Some(why), Some(dir)) => {
            let path = dir.join(format!("{}.json", out.stem));
            Err(CliError::Invariant(format!(
                "{why}; witness {}",
                path.display()
            )))
        }
        (Some(why), None) => Err(CliError::Invariant(why)),
        (None, _) => Ok(out),
    }
}

fn emit(out: &Output, config: &RunConfig) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    let body = out.text.as_ref().or(out.json.as_ref());
    if let Some(b) = body {
        stdout
            .write_all(b.as_bytes())
            .map_err(|e| CliError::Input(format!("stdout: {e}")))?;
    }
    if let Some(dir) = &config.out {
        for (ext, content) in [("json", &out.json), ("csv", &out.csv)] {
            if let Some(c) = content {
                let path = dir.join(format!("{}.{ext}", out.stem));
                std::fs::write(&path, c).map_err(|e| CliError::io(&path, e))?;
                eprintln!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
