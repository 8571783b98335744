//! Experiment runner: builds bodies, sweeps random quotients for witnesses,
//! runs the lemma validators and evaluates parameter certificates. Every
//! output carries the tool version, the seed and the full configuration.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use commands::{
    cmd_check, cmd_construct, cmd_params, cmd_verify_lemma, quotient_for, quotient_stream, run_sweep, Lemma,
    LemmaOutcome, SweepOutcome, SweepRow, WitnessFrequency,
};
pub use config::ExperimentConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "satbody", version, about = "Random quotient bodies and saturation witnesses")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Overrides the seed of the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON configuration; missing fields take their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for result files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true, env = "SATBODY_THREADS")]
    pub threads: Option<usize>,
    /// Print the JSON document instead of the text summary.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Print the CSV table instead of the text summary.
    #[arg(long, global = true)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct BodyArg {
    /// Descriptor written by `construct`; must agree with the configuration.
    #[arg(long)]
    pub body: Option<PathBuf>,
    /// Overrides the witness threshold κ.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Also run the exact LP check on every block.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the body and write its descriptor.
    Construct,
    /// Witness search over random quotients of each rank.
    Sweep {
        #[command(flatten)]
        body: BodyArg,
        /// Comma-separated ranks.
        #[arg(long, value_delimiter = ',')]
        m: Option<Vec<usize>>,
    },
    /// Witness search for a single quotient of a sweep.
    Check {
        #[command(flatten)]
        body: BodyArg,
        /// Quotient rank; defaults to n (no quotient).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 0)]
        trial: usize,
    },
    /// Monte Carlo or exact validation of one estimate.
    VerifyLemma {
        #[arg(value_enum)]
        which: LemmaArg,
    },
    /// Parameter certificate.
    Params {
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        m0: Option<u64>,
        #[arg(long = "N")]
        blocks: Option<u64>,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        q: Option<f64>,
        /// Include the bound that rests on an unproven improvement.
        #[arg(long)]
        unproven: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LemmaArg {
    Turan,
    Svtail,
    Shrinking,
    Gamma,
    Meanwidth,
    Chevet,
}

impl From<LemmaArg> for Lemma {
    fn from(l: LemmaArg) -> Self {
        match l {
            LemmaArg::Turan => Lemma::Turan,
            LemmaArg::Svtail => Lemma::Svtail,
            LemmaArg::Shrinking => Lemma::Shrinking,
            LemmaArg::Gamma => Lemma::Gamma,
            LemmaArg::Meanwidth => Lemma::Meanwidth,
            LemmaArg::Chevet => Lemma::Chevet,
        }
    }
}

/// What a subcommand produced, before it is routed to stdout and files.
struct Produced {
    stem: String,
    text: String,
    json: String,
    csv: Option<String>,
    code: i32,
}

fn produced<T: Serialize>(
    cfg: &ExperimentConfig,
    stem: &str,
    text: String,
    result: &T,
    table: Option<&output::Table>,
    code: i32,
) -> Result<Produced, CliError> {
    Ok(Produced {
        stem: stem.to_string(),
        text,
        json: output::json_document(cfg, result)?,
        csv: table.map(|t| output::csv_document(cfg, t)).transpose()?,
        code,
    })
}

fn effective_config(g: &GlobalArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &g.config {
        Some(p) => ExperimentConfig::load(p)?.0,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn descriptor(path: &Option<PathBuf>) -> Result<Option<satbody_core::BodyDescriptor>, CliError> {
    path.as_deref().map(commands::load_descriptor).transpose()
}

fn apply_body_args(cfg: &mut ExperimentConfig, b: &BodyArg) {
    if b.kappa.is_some() {
        cfg.sweep.kappa = b.kappa;
    }
    cfg.sweep.exact |= b.exact;
}

fn execute(cli: &Cli) -> Result<Produced, CliError> {
    let g = &cli.global;
    let mut cfg = effective_config(g)?;
    match &cli.command {
        Command::Construct => {
            let s = cmd_construct(&cfg)?;
            produced(&cfg, "body", commands::construct_text(&s), &s, None, 0)
        }
        Command::Sweep { body, m } => {
            apply_body_args(&mut cfg, body);
            if let Some(m) = m {
                cfg.sweep.m = m.clone();
            }
            if let Some(t) = g.trials {
                cfg.trials = t;
            }
            let d = descriptor(&body.body)?;
            let o = run_sweep(&cfg, d.as_ref(), g.threads)?;
            let table = o.table();
            produced(&cfg, "sweep", commands::sweep_text(&o), &o.frequencies, Some(&table), 0)
        }
        Command::Check { body, m, trial } => {
            apply_body_args(&mut cfg, body);
            let d = descriptor(&body.body)?;
            let m = m.unwrap_or(cfg.body.n);
            let r = cmd_check(&cfg, d.as_ref(), m, *trial)?;
            let mut table = output::Table::new(commands::SWEEP_HEADER);
            table.push(SweepRow::from_report(*trial, &r).cells());
            let code = if r.witness.is_some() { 0 } else { 1 };
            produced(&cfg, "check", commands::check_text(&r), &r, Some(&table), code)
        }
        Command::VerifyLemma { which } => {
            let lemma = Lemma::from(*which);
            let o = cmd_verify_lemma(&cfg, lemma, g.trials)?;
            let code = if o.violations == 0 { 0 } else { 1 };
            produced(&cfg, lemma.name(), o.text(), &o, Some(&o.table), code)
        }
        Command::Params {
            n,
            m0,
            blocks,
            k,
            q,
            unproven,
        } => {
            let p = &mut cfg.params;
            if let Some(v) = n {
                p.n = *v;
            }
            if let Some(v) = m0 {
                p.m0 = *v;
            }
            if blocks.is_some() {
                p.blocks = *blocks;
            }
            if let Some(v) = k {
                p.k = *v;
            }
            if q.is_some() {
                p.q = *q;
            }
            p.unproven |= unproven;
            let c = cmd_params(&cfg)?;
            let code = if c.feasible { 0 } else { 1 };
            produced(&cfg, "params", commands::params_text(&c), &c, None, code)
        }
    }
}

fn write_outputs(p: &Produced, dir: &Path) -> Result<(), CliError> {
    output::write_file(dir, &format!("{}.json", p.stem), &p.json)?;
    if let Some(csv) = &p.csv {
        output::write_file(dir, &format!("{}.csv", p.stem), csv)?;
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code: 0 success, 1 violation / no witness / infeasible,
/// 2 usage or I/O error, 3 numerical failure.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    let result = execute(&cli).and_then(|p| {
        if let Some(dir) = &cli.global.out {
            write_outputs(&p, dir)?;
        }
        let shown = if cli.global.json {
            &p.json
        } else if cli.global.csv {
            p.csv.as_ref().unwrap_or(&p.json)
        } else {
            &p.text
        };
        stdout.write_all(shown.as_bytes())?;
        Ok(p.code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
