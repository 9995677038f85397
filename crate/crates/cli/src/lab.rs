use std::path::PathBuf;

use addicone::decouplings::alpha_context;
use addicone::entropic::{formula, DensityMatrix, LinearEntropyFunctional as F};
use addicone::numlab::{
    additivity_spot_check, cq_criterion_check, informational_degradability_check, maximize_formula, IsometryChannel,
    OptimizerConfig,
};
use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Subcommand};
use serde_json::{json, Value};

use crate::manifest::RunManifest;

#[derive(Args, Clone, Debug, serde::Serialize)]
pub struct ChannelArgs {
    /// Channel JSON: an isometry or a Kraus list.
    #[arg(long, conflicts_with = "library")]
    pub channel: Option<PathBuf>,
    /// identity:D, swap:D, dephasing:D, erasure:D:P or damping:G.
    #[arg(long)]
    pub library: Option<String>,
}

#[derive(Args, Clone, Debug, serde::Serialize)]
pub struct FormulaArgs {
    /// Entropic formula over B, E and V (or V1, V2, ..), e.g. "H(BV) - H(EV)".
    #[arg(long, conflicts_with = "alpha")]
    pub formula: Option<String>,
    /// Linear functional JSON over [B, E, V..].
    #[arg(long)]
    pub alpha: Option<PathBuf>,
    /// Dimension of each auxiliary system; defaults to d_A^2 for one system.
    #[arg(long = "aux-dim")]
    pub aux_dims: Vec<usize>,
}

#[derive(Args, Clone, Debug, serde::Serialize)]
pub struct OptArgs {
    #[arg(long, default_value_t = 6)]
    pub restarts: usize,
    #[arg(long, default_value_t = 300)]
    pub iterations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub purifier_dim: Option<usize>,
}

impl OptArgs {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            restarts: self.restarts,
            iterations: self.iterations,
            seed: self.seed,
            purifier_dim: self.purifier_dim,
            ..Default::default()
        }
    }
}

#[derive(Subcommand, Clone, Debug, serde::Serialize)]
pub enum LabCommand {
    /// Lower bound on max over inputs of a formula.
    Maximize {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        formula: FormulaArgs,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Search for inputs with I(V;B) < I(V;E).
    Degradability {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// f(N ⊗ M) - f(N) - f(M) for a channel with itself or a second channel.
    SpotCheck {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Second channel from the library; defaults to the first.
        #[arg(long)]
        second: Option<String>,
        #[command(flatten)]
        formula: FormulaArgs,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Entropic c-q conditions on a state over R1 R2 R3 A.
    Cq {
        #[arg(long)]
        state: PathBuf,
    },
}

pub fn library_channel(spec: &str) -> Result<IsometryChannel> {
    let parts: Vec<&str> = spec.split(':').collect();
    let dim = |i: usize| -> Result<usize> { parts.get(i).unwrap_or(&"2").parse().map_err(|_| anyhow!("bad dimension in {spec:?}")) };
    let real = |i: usize| -> Result<f64> {
        parts.get(i).ok_or_else(|| anyhow!("{spec:?} needs a parameter"))?.parse().map_err(|_| anyhow!("bad parameter in {spec:?}"))
    };
    Ok(match parts[0] {
        "identity" => IsometryChannel::identity(dim(1)?)?,
        "swap" => IsometryChannel::swap_to_env(dim(1)?)?,
        "dephasing" => IsometryChannel::dephasing_copy(dim(1)?)?,
        "erasure" => IsometryChannel::erasure(dim(1)?, real(2)?)?,
        "damping" => IsometryChannel::amplitude_damping(real(1)?)?,
        other => bail!("unknown library channel {other:?}"),
    })
}

fn load_channel(args: &ChannelArgs, manifest: &mut RunManifest) -> Result<IsometryChannel> {
    match (&args.channel, &args.library) {
        (Some(path), _) => {
            let bytes = manifest.hash_input("channel", path)?;
            serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display()))
        }
        (None, Some(spec)) => library_channel(spec),
        (None, None) => bail!("give --channel FILE or --library NAME"),
    }
}

/// The formula and the auxiliary dimensions it is maximized with.
fn load_formula(args: &FormulaArgs, d_in: usize, manifest: &mut RunManifest) -> Result<(F, Vec<usize>)> {
    let alpha: F = match (&args.formula, &args.alpha) {
        (Some(s), _) => {
            let n = if args.aux_dims.is_empty() { usize::from(s.contains('V')) } else { args.aux_dims.len() };
            formula::parse(&alpha_context(n)?, s)?
        }
        (None, Some(path)) => {
            let bytes = manifest.hash_input("alpha", path)?;
            serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display()))?
        }
        (None, None) => bail!("give --formula or --alpha"),
    };
    let n = alpha.context().arity() - 2;
    let aux = if args.aux_dims.is_empty() && n == 1 { vec![d_in * d_in] } else { args.aux_dims.clone() };
    if aux.len() != n {
        bail!("formula has {n} auxiliary systems but {} dimensions were given", aux.len());
    }
    Ok((alpha, aux))
}

pub fn run(cmd: &LabCommand, manifest: &mut RunManifest) -> Result<Value> {
    Ok(match cmd {
        LabCommand::Maximize { channel, formula: f, opt } => {
            let ch = load_channel(channel, manifest)?;
            let (alpha, aux) = load_formula(f, ch.d_in(), manifest)?;
            manifest.seeds.push(opt.seed);
            let m = maximize_formula(&alpha, &ch, &aux, &opt.config())?;
            let argmax = m.input.as_ref().map(|w| w.amplitudes().iter().map(|c| [c.re, c.im]).collect::<Vec<_>>());
            json!({ "formula": formula::render_pretty(&alpha), "aux_dims": aux, "result": m, "input_amplitudes": argmax })
        }
        LabCommand::Degradability { channel, samples, opt } => {
            let ch = load_channel(channel, manifest)?;
            manifest.seeds.push(opt.seed);
            let r = informational_degradability_check(&ch, *samples, &opt.config())?;
            let witness = r.witness.as_ref().map(|w| w.amplitudes().iter().map(|c| [c.re, c.im]).collect::<Vec<_>>());
            json!({ "check": r, "witness_amplitudes": witness })
        }
        LabCommand::SpotCheck { channel, second, formula: f, opt } => {
            let first = load_channel(channel, manifest)?;
            let other = match second {
                Some(s) => library_channel(s)?,
                None => first.clone(),
            };
            let (alpha, aux) = load_formula(f, first.d_in().max(other.d_in()), manifest)?;
            let aux = if f.aux_dims.is_empty() && aux.len() == 1 { vec![2] } else { aux };
            manifest.seeds.push(opt.seed);
            let r = additivity_spot_check(&first, &other, &alpha, &aux, &opt.config())?;
            json!({ "formula": formula::render_pretty(&alpha), "aux_dims": aux, "result": r })
        }
        LabCommand::Cq { state } => {
            let bytes = manifest.hash_input("state", state)?;
            let rho: DensityMatrix = serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", state.display()))?;
            json!(cq_criterion_check(&rho)?)
        }
    })
}
