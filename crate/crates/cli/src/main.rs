//! hypermass: mass, stability and flat-norm computations for asymptotically
//! hyperbolic graphs.
//!
//! Exit status: 0 when the computed check holds, 1 when it fails numerically,
//! 2 for configuration or usage errors.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Outcome;
use crate::config::{config_error, ConfigError, Format, LadderConfig, RunConfig, Tolerances};

#[derive(Parser)]
#[command(name = "hypermass", version, about = "Positive mass and its stability for asymptotically hyperbolic graphs")]
#[command(after_help = "HYPERMASS_THREADS caps the number of worker threads.")]
struct Cli {
    /// TOML run configuration; flags override its fields.
    #[arg(long, global = true, value_name = "TOML")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report atomically to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Seed for generated corpora.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct ProfileArgs {
    /// Profile family: ads, constant, exponential, sampled.
    #[arg(long)]
    family: Option<String>,
    /// JSON profile document; overrides --family.
    #[arg(long, value_name = "JSON")]
    profile: Option<PathBuf>,
    /// Dimension n ≥ 3.
    #[arg(long)]
    n: Option<usize>,
    /// Mass parameter of the ads family.
    #[arg(long)]
    m: Option<f64>,
    /// Value of the constant family.
    #[arg(long)]
    c: Option<f64>,
    /// Amplitude of the exponential family.
    #[arg(long, allow_negative_numbers = true)]
    amplitude: Option<f64>,
    /// Decay rate of the exponential family.
    #[arg(long)]
    rate: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Mass by the chosen method and the level-set identity at height h.
    #[command(after_help = "CSV columns: profile.family, profile.n, method, m_method, report.m_boundary, \
report.m_boundary_error, report.m_oracle, report.m_levelset_bulk, report.m_levelset_boundary, \
report.m_levelset_total, report.h_used, report.r_used, report.residual_identity, report.kappa, report.tolerances.*")]
    Mass {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        kappa: Option<f64>,
        /// Level-set height; defaults to the midpoint of the range of f.
        #[arg(long, allow_negative_numbers = true)]
        h: Option<f64>,
        /// boundary-limit, four-term or level-set.
        #[arg(long, default_value = "boundary-limit")]
        method: String,
        #[arg(long)]
        abs: Option<f64>,
        #[arg(long)]
        rel: Option<f64>,
        #[arg(long)]
        ladder_start: Option<f64>,
        #[arg(long)]
        ladder_rungs: Option<usize>,
    },
    /// Scalar curvature R_κ on a logarithmic radius grid, against the warped-product oracle.
    #[command(after_help = "CSV columns: r, R_kappa, curly_R, oracle, difference")]
    Scalar {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        kappa: Option<f64>,
        /// formula, warped-oracle or divergence.
        #[arg(long, default_value = "formula")]
        method: String,
        #[arg(long, default_value_t = 100)]
        points: usize,
        /// Grid spans r0 + 1e-3/κ to r0 + span/κ.
        #[arg(long, default_value_t = 20.0)]
        span: f64,
    },
    /// Penrose-like bound for a profile with a minimal boundary; fails when the ratio is below 1.
    #[command(after_help = "CSV columns: profile.family, profile.n, report.mass, report.bound, report.ratio, report.r0")]
    Penrose {
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Minkowski-like inequality on a sphere or on the seeded star-surface corpus.
    #[command(after_help = "CSV columns: surface, n, lhs, rhs, margin, min_mean_curvature")]
    Minkowski {
        /// Geodesic sphere radius; omit to use the corpus.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// Height bound 0 < sup f − h0 < C·m^(1/(n−2)) for a profile.
    #[command(after_help = "CSV columns: profile.family, profile.n, report.n, report.beta, report.m, report.h0, \
report.sup_f, report.C, report.bound, report.sup_minus_h0, report.ratio, report.verdict, report.degenerate, \
report.ode.blowup_numeric, report.ode.blowup_closed")]
    Height {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Comparison ODE integrated to its blow-up height.
    #[command(after_help = "CSV columns: h, Y, dY")]
    Ode {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        beta: Option<f64>,
        /// Value of Y at which integration stops.
        #[arg(long)]
        cap: Option<f64>,
    },
    /// Flat-norm upper bound over a strictly decreasing list of masses.
    #[command(after_help = "CSV columns: m, M_A, M_Bplus, M_Bminus, flat_upper, ratio")]
    Sweep {
        #[arg(long, value_delimiter = ',')]
        masses: Option<Vec<f64>>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Runs verification suites; JSON output is one line per check then one per criterion.
    #[command(after_help = "Suites: oracle, mass, scaling, ode, height, sweep, inequalities.\n\
CSV columns: criterion, name, passed, value, tolerance, detail")]
    Verify {
        /// Comma-separated suite names; all suites when omitted.
        #[arg(long, value_delimiter = ',')]
        suites: Option<Vec<String>>,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

impl ProfileArgs {
    fn into_config(self) -> RunConfig {
        RunConfig {
            family: self.family,
            profile: self.profile,
            n: self.n,
            m: self.m,
            c: self.c,
            amplitude: self.amplitude,
            rate: self.rate,
            ..RunConfig::default()
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("HYPERMASS_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&k| k > 0)
        .ok_or_else(|| config_error(format!("HYPERMASS_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| config_error(e.to_string()))
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    configure_threads()?;
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let global = RunConfig {
        format: cli.format,
        output: cli.output,
        seed: cli.seed,
        ..RunConfig::default()
    };
    let is_verify = matches!(cli.command, Command::Verify { .. });
    let (flags, action): (RunConfig, Box<dyn FnOnce(&RunConfig) -> anyhow::Result<Outcome>>) = match cli.command {
        Command::Mass { profile, kappa, h, method, abs, rel, ladder_start, ladder_rungs } => (
            RunConfig {
                kappa,
                h,
                tolerances: Tolerances { abs, rel, reg: None },
                ladder: LadderConfig { start: ladder_start, rungs: ladder_rungs },
                ..profile.into_config()
            },
            Box::new(move |c| commands::mass(c, &method)),
        ),
        Command::Scalar { profile, kappa, method, points, span } => (
            RunConfig { kappa, ..profile.into_config() },
            Box::new(move |c| commands::scalar(c, &method, points, span)),
        ),
        Command::Penrose { profile } => (profile.into_config(), Box::new(commands::penrose)),
        Command::Minkowski { radius, n, kappa, count } => (
            RunConfig { n, kappa, ..RunConfig::default() },
            Box::new(move |c| commands::minkowski(c, radius, count)),
        ),
        Command::Height { profile, beta } => (RunConfig { beta, ..profile.into_config() }, Box::new(commands::height)),
        Command::Ode { n, beta, cap } => (RunConfig { n, beta, ..RunConfig::default() }, Box::new(move |c| commands::ode(c, cap))),
        Command::Sweep { masses, n, rho, beta } => (RunConfig { masses, n, rho, beta, ..RunConfig::default() }, Box::new(commands::sweep)),
        Command::Verify { suites, inject_fault } => (
            RunConfig::default(),
            Box::new(move |c| commands::verify(c, suites.as_deref(), inject_fault)),
        ),
    };
    let cfg = file.overlay(global).overlay(flags);
    cfg.validate()?;
    let outcome = action(&cfg)?;
    let format = cfg.format.unwrap_or_default();
    let text = if is_verify && format == Format::Json {
        commands::verify_lines(&outcome.report.document)
    } else {
        outcome.report.render(format)?
    };
    output::emit(&text, cfg.output.as_deref())?;
    if let Some(msg) = &outcome.failure {
        eprintln!("hypermass: {msg}");
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("hypermass: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
