//! Command-line front end: argument parsing, run configuration and output
//! encoding (CSV or JSON, reals rounded to 12 significant digits).

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    analytic_thresholds, evaluate_point, linspace, round_sig, sweep, Model, SweepGrid, SweepRecord,
    DEFAULT_SWEEP_S,
};
use crate::dynamics::{
    chain_evolve, closed_form_system, collective_evolve, fokker_planck_evolve,
    purified_collective_evolve, ChainParams, ScenarioParams, COLLECTIVE, COLLECTIVE_PARTNER,
    DEFAULT_RK4_STEPS, SYSTEM_A1, SYSTEM_A2,
};
use crate::error::{Error, Result};
use crate::separability::{ppt_margin, Partition};
use crate::state::{reduce, GaussianState, ModeSelection};

/// Significant digits kept for every real in the output.
pub const OUTPUT_DIGITS: usize = 12;

/// Fixed CSV header of classify/sweep output.
pub const RECORD_CSV_HEADER: &str =
    "n_bar,t_sq,s,margin_a1a2,margin_a1c0,margin_a2c0,bip_a1,bip_a2,bip_c0,class";

#[derive(Debug, Parser)]
#[command(name = "cvdecohere", version, about = "Entanglement structure of a two-mode squeezed state decohering in a thermal bath")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,

    /// Output encoding.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,

    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Collective,
    Chain,
    ClosedForm,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// Two-mode squeezing parameter.
    #[arg(long, default_value_t = DEFAULT_SWEEP_S, allow_negative_numbers = true)]
    pub s: f64,
    /// Mean thermal photon number of the bath.
    #[arg(long, allow_negative_numbers = true)]
    pub nbar: f64,
    /// Transmittivity t² = exp(-γτ).
    #[arg(long, allow_negative_numbers = true)]
    pub tsq: f64,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Margins and tripartite class at one point.
    Classify {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, value_enum, default_value_t = ModelArg::Collective)]
        model: ModelArg,
        /// Number of beam splitters for the chain model.
        #[arg(long, default_value_t = 100)]
        chain: usize,
    },
    /// Margins and classes over an (n̄, t²) grid.
    Sweep {
        #[arg(long, default_value_t = DEFAULT_SWEEP_S, allow_negative_numbers = true)]
        s: f64,
        /// n̄ axis as `lo:hi:count` or a single value.
        #[arg(long, default_value = "0:4:20", allow_hyphen_values = true)]
        nbar: AxisSpec,
        /// t² axis as `lo:hi:count` or a single value.
        #[arg(long, default_value = "0:1:20", allow_hyphen_values = true)]
        tsq: AxisSpec,
        #[arg(long, value_enum, default_value_t = ModelArg::Collective)]
        model: ModelArg,
        #[arg(long, default_value_t = 100)]
        chain: usize,
    },
    /// Analytic separability thresholds in t².
    Thresholds {
        #[arg(long, allow_negative_numbers = true)]
        nbar: f64,
    },
    /// Maximum entrywise disagreement between the dynamical models.
    Crosscheck {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 100)]
        chain: usize,
        /// RK4 steps for the moment equation.
        #[arg(long, default_value_t = DEFAULT_RK4_STEPS)]
        steps: usize,
        /// Extra random points drawn from s∈[0.1,2], n̄∈[0,5], t²∈(0,1].
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Purity and hidden-mode entanglement of the purified bath model.
    Purify {
        #[command(flatten)]
        point: PointArgs,
    },
}

/// Grid axis: `lo:hi:count` or a single value.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec(pub Vec<f64>);

impl FromStr for AxisSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
        match parts.as_slice() {
            [v] => Ok(AxisSpec(vec![num(v)?])),
            [lo, hi, n] => {
                let n: usize = n.trim().parse().map_err(|e| format!("`{n}`: {e}"))?;
                if n == 0 {
                    return Err("axis needs at least one point".into());
                }
                Ok(AxisSpec(linspace(num(lo)?, num(hi)?, n)))
            }
            _ => Err(format!("expected `lo:hi:count` or a number, got `{s}`")),
        }
    }
}

/// Validated run request.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Classify { params: ScenarioParams, model: Model },
    Sweep { grid: SweepGrid },
    Thresholds { n_bar: f64 },
    Crosscheck {
        params: ScenarioParams,
        chain: usize,
        steps: usize,
        samples: usize,
        seed: u64,
    },
    Purify { params: ScenarioParams },
}

fn model(arg: ModelArg, chain: usize) -> Model {
    match arg {
        ModelArg::Collective => Model::Collective,
        ModelArg::Chain => Model::Chain(chain),
        ModelArg::ClosedForm => Model::ClosedForm,
    }
}

impl Cli {
    /// Validates parsed flags into a [`RunConfig`].
    pub fn into_config(self) -> Result<RunConfig> {
        let params = |p: &PointArgs| ScenarioParams::new(p.s, p.nbar, p.tsq);
        let command = match &self.command {
            CliCommand::Classify { point, model: m, chain } => {
                if *chain == 0 {
                    return Err(Error::InvalidArgument("--chain must be >= 1".into()));
                }
                Command::Classify {
                    params: params(point)?,
                    model: model(*m, *chain),
                }
            }
            CliCommand::Sweep { s, nbar, tsq, model: m, chain } => Command::Sweep {
                grid: SweepGrid::new(nbar.0.clone(), tsq.0.clone(), *s, model(*m, *chain))?,
            },
            CliCommand::Thresholds { nbar } => {
                analytic_thresholds(*nbar)?;
                Command::Thresholds { n_bar: *nbar }
            }
            CliCommand::Crosscheck {
                point,
                chain,
                steps,
                samples,
                seed,
            } => {
                ChainParams::new(params(point)?, *chain)?;
                if *steps == 0 {
                    return Err(Error::InvalidArgument("--steps must be >= 1".into()));
                }
                Command::Crosscheck {
                    params: params(point)?,
                    chain: *chain,
                    steps: *steps,
                    samples: *samples,
                    seed: *seed,
                }
            }
            CliCommand::Purify { point } => Command::Purify { params: params(point)? },
        };
        Ok(RunConfig {
            command,
            format: self.format,
            output: self.output,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub sys: f64,
    pub env: f64,
}

/// Model disagreement at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckRow {
    pub s: f64,
    pub n_bar: f64,
    pub t_sq: f64,
    /// Closed form vs reduced collective model.
    pub dev_collective: f64,
    /// Closed form vs reduced chain model.
    pub dev_chain: f64,
    /// Closed form vs RK4 moment equation; absent when `t² = 0`.
    pub dev_fokker_planck: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub chain: usize,
    pub steps: usize,
    /// Largest closed-form/collective/chain disagreement.
    pub max_deviation: f64,
    pub max_fokker_planck_deviation: f64,
    pub points: Vec<CrosscheckRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurifyReport {
    pub s: f64,
    pub n_bar: f64,
    pub t_sq: f64,
    /// `max |ν_k - 1|` of the four-mode state.
    pub purity_deviation: f64,
    /// Entrywise distance of its `(a1, a2, c0)` reduction to the thermal model.
    pub reduction_deviation: f64,
    pub margin_a1a2: f64,
    pub margin_a1c0: f64,
    pub margin_a2c0: f64,
    pub margin_a2c0p: f64,
    pub margin_c0c0p: f64,
    pub margin_a1c0p: f64,
}

fn max_abs_diff(a: &GaussianState, b: &GaussianState) -> f64 {
    (a.cov() - b.cov()).amax()
}

/// Closed form vs collective and chain (and RK4 when `t² > 0`).
pub fn crosscheck_point(p: &ScenarioParams, chain: usize, steps: usize) -> Result<CrosscheckRow> {
    let sys = ModeSelection::of(&[SYSTEM_A1, SYSTEM_A2]);
    let closed = closed_form_system(p)?;
    let col = reduce(&collective_evolve(p)?, &sys)?;
    let ch = reduce(&chain_evolve(&ChainParams::new(*p, chain)?)?, &sys)?;
    let fp = if p.t_sq() > 0.0 {
        Some(max_abs_diff(&fokker_planck_evolve(p, steps)?, &closed))
    } else {
        None
    };
    Ok(CrosscheckRow {
        s: p.s(),
        n_bar: p.n_bar(),
        t_sq: p.t_sq(),
        dev_collective: max_abs_diff(&col, &closed),
        dev_chain: max_abs_diff(&ch, &closed),
        dev_fokker_planck: fp,
    })
}

pub fn purify_report(p: &ScenarioParams) -> Result<PurifyReport> {
    let pure = purified_collective_evolve(p)?;
    let purity_deviation = pure
        .symplectic_eigenvalues()?
        .iter()
        .map(|nu| (nu - 1.0).abs())
        .fold(0.0, f64::max);
    let tri = reduce(&pure, &ModeSelection::of(&[SYSTEM_A1, SYSTEM_A2, COLLECTIVE]))?;
    let margin = |a: &str, b: &str| ppt_margin(&pure, &Partition::pair(a, b)?);
    Ok(PurifyReport {
        s: p.s(),
        n_bar: p.n_bar(),
        t_sq: p.t_sq(),
        purity_deviation,
        reduction_deviation: max_abs_diff(&tri, &collective_evolve(p)?),
        margin_a1a2: margin(SYSTEM_A1, SYSTEM_A2)?,
        margin_a1c0: margin(SYSTEM_A1, COLLECTIVE)?,
        margin_a2c0: margin(SYSTEM_A2, COLLECTIVE)?,
        margin_a2c0p: margin(SYSTEM_A2, COLLECTIVE_PARTNER)?,
        margin_c0c0p: margin(COLLECTIVE, COLLECTIVE_PARTNER)?,
        margin_a1c0p: margin(SYSTEM_A1, COLLECTIVE_PARTNER)?,
    })
}

fn r12(x: f64) -> f64 {
    round_sig(x, OUTPUT_DIGITS)
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidArgument(format!("JSON encoding failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| Error::InvalidArgument(format!("CSV encoding failed: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidArgument(format!("CSV encoding failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Records as emitted by `classify` and `sweep`.
pub fn encode_records(records: &[SweepRecord], format: OutputFormat) -> Result<String> {
    let rounded: Vec<SweepRecord> = records.iter().map(|r| r.rounded(OUTPUT_DIGITS)).collect();
    match format {
        OutputFormat::Json => to_json(&rounded),
        OutputFormat::Csv => to_csv(&rounded),
    }
}

/// Parses `classify`/`sweep` output back into records.
pub fn decode_records(text: &str, format: OutputFormat) -> Result<Vec<SweepRecord>> {
    let err = |e: String| Error::InvalidArgument(format!("cannot decode records: {e}"));
    match format {
        OutputFormat::Json => {
            let v: serde_json::Value = serde_json::from_str(text).map_err(|e| err(e.to_string()))?;
            if v.is_array() {
                serde_json::from_value(v).map_err(|e| err(e.to_string()))
            } else {
                Ok(vec![serde_json::from_value(v).map_err(|e| err(e.to_string()))?])
            }
        }
        OutputFormat::Csv => csv::Reader::from_reader(text.as_bytes())
            .deserialize()
            .collect::<std::result::Result<Vec<SweepRecord>, _>>()
            .map_err(|e| err(e.to_string())),
    }
}

/// Executes a validated configuration and returns the encoded output.
pub fn run(config: &RunConfig) -> Result<String> {
    let fmt = config.format;
    match &config.command {
        Command::Classify { params, model } => {
            let (rec, _) = evaluate_point(*model, params)?;
            match fmt {
                OutputFormat::Json => to_json(&rec.rounded(OUTPUT_DIGITS)),
                OutputFormat::Csv => encode_records(&[rec], fmt),
            }
        }
        Command::Sweep { grid } => encode_records(&sweep(grid)?, fmt),
        Command::Thresholds { n_bar } => {
            let (sys, env) = analytic_thresholds(*n_bar)?;
            let th = Thresholds { sys: r12(sys), env: r12(env) };
            match fmt {
                OutputFormat::Json => Ok(serde_json::to_string(&th)
                    .map_err(|e| Error::InvalidArgument(e.to_string()))?
                    + "\n"),
                OutputFormat::Csv => to_csv(&[th]),
            }
        }
        Command::Crosscheck {
            params,
            chain,
            steps,
            samples,
            seed,
        } => {
            let mut points = vec![*params];
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for _ in 0..*samples {
                points.push(ScenarioParams::new(
                    rng.gen_range(0.1..=2.0),
                    rng.gen_range(0.0..=5.0),
                    rng.gen_range(0.01..=1.0),
                )?);
            }
            let rows = points
                .iter()
                .map(|p| crosscheck_point(p, *chain, *steps))
                .collect::<Result<Vec<_>>>()?;
            let max_deviation = rows
                .iter()
                .map(|r| r.dev_collective.max(r.dev_chain))
                .fold(0.0, f64::max);
            let max_fp = rows
                .iter()
                .filter_map(|r| r.dev_fokker_planck)
                .fold(0.0, f64::max);
            let rows: Vec<CrosscheckRow> = rows
                .into_iter()
                .map(|r| CrosscheckRow {
                    s: r12(r.s),
                    n_bar: r12(r.n_bar),
                    t_sq: r12(r.t_sq),
                    dev_collective: r12(r.dev_collective),
                    dev_chain: r12(r.dev_chain),
                    dev_fokker_planck: r.dev_fokker_planck.map(r12),
                })
                .collect();
            match fmt {
                OutputFormat::Json => to_json(&CrosscheckReport {
                    chain: *chain,
                    steps: *steps,
                    max_deviation: r12(max_deviation),
                    max_fokker_planck_deviation: r12(max_fp),
                    points: rows,
                }),
                OutputFormat::Csv => to_csv(&rows),
            }
        }
        Command::Purify { params } => {
            let r = purify_report(params)?;
            let r = PurifyReport {
                s: r12(r.s),
                n_bar: r12(r.n_bar),
                t_sq: r12(r.t_sq),
                purity_deviation: r12(r.purity_deviation),
                reduction_deviation: r12(r.reduction_deviation),
                margin_a1a2: r12(r.margin_a1a2),
                margin_a1c0: r12(r.margin_a1c0),
                margin_a2c0: r12(r.margin_a2c0),
                margin_a2c0p: r12(r.margin_a2c0p),
                margin_c0c0p: r12(r.margin_c0c0p),
                margin_a1c0p: r12(r.margin_a1c0p),
            };
            match fmt {
                OutputFormat::Json => to_json(&r),
                OutputFormat::Csv => to_csv(&[r]),
            }
        }
    }
}
