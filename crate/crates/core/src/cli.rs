//! Command-line front end.
//!
//! Every command reads its inputs from JSON files (or a built-in channel name),
//! runs one library pipeline and renders either `key=value` lines or JSON.
//! Exit status: 0 on success, 2 when input fails validation, 1 on a numerical
//! failure or an I/O error while writing the report.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::capacity::{self, CapacityMode, CapacityResult, SignalSet};
use crate::channel::{self, QuantumChannel};
use crate::dfs::{self, DfsSubspace, SystemOperatorSet};
use crate::error::Error;
use crate::linalg::{self, ComplexMatrix};
use crate::secrecy::{self, Ensemble, PrivacyReport, WiretapCode, WiretapVerdict};

pub const DEFAULT_LAMBDA: f64 = 1e-6;
pub const DEFAULT_MU: f64 = 1e-6;
pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Library(#[from] Error),

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error("no decoherence-free subspace: {0}")]
    NoDfs(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(e) if e.is_numerical() => 1,
            CliError::Io { .. } => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Table,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "dfs-secrecy",
    version,
    about = "Wiretap codes over decoherence-free subspaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Convergence tolerance for capacity optimisation.
    #[arg(long, global = true, default_value_t = capacity::DEFAULT_TOL)]
    pub tol: f64,

    #[arg(long, global = true, default_value_t = capacity::DEFAULT_MAX_ITER)]
    pub max_iter: usize,

    /// Bound on Bob's average decoding error.
    #[arg(long, global = true, default_value_t = DEFAULT_LAMBDA)]
    pub lambda: f64,

    /// Bound on Eve's leakage in bits per letter.
    #[arg(long, global = true, default_value_t = DEFAULT_MU)]
    pub mu: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Default)]
pub struct ChannelArgs {
    /// Channel JSON file.
    #[arg(long, conflicts_with = "builtin")]
    pub channel: Option<PathBuf>,

    /// Built-in channel: collective-dephasing:N, amplitude-damping:GAMMA or identity:D.
    #[arg(long)]
    pub builtin: Option<String>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Find decoherence-free subspaces of a channel.
    DfsFind {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Operator set JSON `{ "operators": [matrix] }`; defaults to the Kraus operators.
        #[arg(long)]
        operators: Option<PathBuf>,
    },
    /// Summarise a channel and its dilation.
    ChannelInfo {
        #[command(flatten)]
        channel: ChannelArgs,
    },
    /// Bob's and Eve's Holevo quantities for an ensemble.
    Privacy {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Ensemble JSON `{ "probs": [p], "states": [matrix] }`.
        #[arg(long)]
        ensemble: PathBuf,
    },
    /// Check a code against the wiretap error and leakage bounds.
    CodeVerify {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Code JSON `{ "codewords": [matrix], "povm": [matrix], "block_length": n }`.
        #[arg(long)]
        code: PathBuf,
    },
    /// Maximise over input priors.
    Capacity {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Signal states (ensemble JSON; probabilities ignored). Without this the
        /// basis states of every decoherence-free subspace are used.
        #[arg(long)]
        states: Option<PathBuf>,
        /// Maximise χ_Bob − χ_Eve instead of χ_Bob (lower bound only).
        #[arg(long, requires = "states")]
        difference: bool,
        /// Operator set JSON used to find the subspaces; defaults to the Kraus operators.
        #[arg(long)]
        operators: Option<PathBuf>,
    },
    /// Two-qubit collective dephasing walkthrough.
    DemoDephasing,
}

/// Fully resolved invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub tol: f64,
    pub max_iter: usize,
    pub lambda: f64,
    pub mu: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            tol: capacity::DEFAULT_TOL,
            max_iter: capacity::DEFAULT_MAX_ITER,
            lambda: DEFAULT_LAMBDA,
            mu: DEFAULT_MU,
            format: Format::Table,
            out: None,
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        for (name, v) in [("tol", self.tol), ("lambda", self.lambda), ("mu", self.mu)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Usage(format!(
                    "--{name} must be positive, got {v}"
                )));
            }
        }
        if self.max_iter == 0 {
            return Err(CliError::Usage("--max-iter must be positive".into()));
        }
        Ok(())
    }
}

impl From<Cli> for RunConfig {
    fn from(c: Cli) -> Self {
        RunConfig {
            command: c.command,
            tol: c.tol,
            max_iter: c.max_iter,
            lambda: c.lambda,
            mu: c.mu,
            format: c.format,
            out: c.out,
        }
    }
}

/// Report for one invocation: the JSON value plus a flat key=value rendering.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub rows: Vec<(String, String)>,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("serialisable report");
                s.push('\n');
                s
            }
            Format::Table => {
                let mut s = String::new();
                for (k, v) in &self.rows {
                    let _ = writeln!(s, "{k}={v}");
                }
                s
            }
        }
    }
}

// ---- wire formats ----

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SubspaceJson {
    pub basis: ComplexMatrix,
    pub eigenvalues: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DfsJson {
    pub ambient_dim: usize,
    pub dims: Vec<usize>,
    pub subspaces: Vec<SubspaceJson>,
}

impl DfsJson {
    pub fn from_subspaces(ambient_dim: usize, subs: &[DfsSubspace]) -> Self {
        DfsJson {
            ambient_dim,
            dims: subs.iter().map(DfsSubspace::dim).collect(),
            subspaces: subs
                .iter()
                .map(|s| SubspaceJson {
                    basis: s.basis().clone(),
                    eigenvalues: s.eigenvalues().iter().map(|z| [z.re, z.im]).collect(),
                })
                .collect(),
        }
    }

    /// Rebuilds certified subspaces against `ops`.
    pub fn to_subspaces(&self, ops: &SystemOperatorSet) -> crate::Result<Vec<DfsSubspace>> {
        self.subspaces
            .iter()
            .map(|s| DfsSubspace::certified(s.basis.clone(), ops))
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CapacityJson {
    pub value_bits: f64,
    pub probs: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub mode: CapacityMode,
    pub signal_set: SignalSet,
    pub gap: f64,
}

impl From<&CapacityResult> for CapacityJson {
    fn from(r: &CapacityResult) -> Self {
        CapacityJson {
            value_bits: r.value_bits,
            probs: r.optimal_probs.clone(),
            converged: r.converged,
            iterations: r.iterations,
            mode: r.mode,
            signal_set: r.signal_set,
            gap: r.gap,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorsJson {
    operators: Vec<ComplexMatrix>,
}

#[derive(Debug, Serialize)]
struct ChannelInfoJson<'a> {
    label: &'a str,
    dim_in: usize,
    kraus_count: usize,
    completeness_defect: f64,
    env_dim: usize,
    dilation_dim: usize,
    unitarity_defect: f64,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        message: format!("cannot read: {e}"),
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Parses `collective-dephasing:N`, `amplitude-damping:GAMMA` or `identity:D`.
pub fn builtin_channel(name_param: &str) -> Result<QuantumChannel, CliError> {
    let (name, arg) = name_param
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("built-in channel `{name_param}` needs NAME:PARAM")))?;
    let bad = || CliError::Usage(format!("bad parameter in built-in channel `{name_param}`"));
    let ch = match name {
        "collective-dephasing" => {
            channel::builtin_collective_dephasing(arg.parse().map_err(|_| bad())?)?
        }
        "amplitude-damping" => channel::builtin_amplitude_damping(arg.parse().map_err(|_| bad())?)?,
        "identity" => {
            let d: usize = arg.parse().map_err(|_| bad())?;
            if d == 0 || d > linalg::MAX_DIM {
                return Err(bad());
            }
            QuantumChannel::identity(d)
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown built-in channel `{other}`"
            )))
        }
    };
    Ok(ch)
}

fn load_channel(args: &ChannelArgs) -> Result<QuantumChannel, CliError> {
    match (&args.channel, &args.builtin) {
        (Some(path), None) => read_json(path),
        (None, Some(spec)) => builtin_channel(spec),
        _ => Err(CliError::Usage(
            "give exactly one of --channel or --builtin".into(),
        )),
    }
}

fn load_operators(
    path: Option<&PathBuf>,
    ch: &QuantumChannel,
) -> Result<SystemOperatorSet, CliError> {
    match path {
        Some(p) => {
            let raw: OperatorsJson = read_json(p)?;
            let ops = SystemOperatorSet::explicit(raw.operators)?;
            if ops.dim() != ch.dim_in() {
                return Err(Error::Shape(format!(
                    "operators act on dimension {}, channel on {}",
                    ops.dim(),
                    ch.dim_in()
                ))
                .into());
            }
            Ok(ops)
        }
        None => Ok(SystemOperatorSet::from_channel(ch)),
    }
}

fn fmt_f(x: f64) -> String {
    format!("{x:?}")
}

fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        fmt_f(z.re)
    } else {
        format!("{:?}{:+?}i", z.re, z.im)
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| fmt_f(*x)).collect();
    format!("[{}]", parts.join(","))
}

fn fmt_ket(v: &[Complex64]) -> String {
    let n = v.len();
    let bits = if n.is_power_of_two() && n > 1 {
        n.trailing_zeros() as usize
    } else {
        0
    };
    let terms: Vec<String> = v
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > 1e-12)
        .map(|(i, z)| {
            let label = if bits > 0 {
                format!("{i:0bits$b}")
            } else {
                i.to_string()
            };
            if (z - linalg::ONE).norm() < 1e-12 {
                format!("|{label}⟩")
            } else {
                format!("({})|{label}⟩", fmt_complex(*z))
            }
        })
        .collect();
    terms.join(" + ")
}

fn push_subspace_rows(rows: &mut Vec<(String, String)>, prefix: &str, s: &DfsSubspace) {
    rows.push((format!("{prefix}.dim"), s.dim().to_string()));
    let evs: Vec<String> = s.eigenvalues().iter().map(|z| fmt_complex(*z)).collect();
    rows.push((
        format!("{prefix}.eigenvalues"),
        format!("[{}]", evs.join(",")),
    ));
    let basis: Vec<String> = (0..s.dim()).map(|k| fmt_ket(&s.basis_vector(k))).collect();
    rows.push((format!("{prefix}.basis"), basis.join(" ; ")));
}

fn capacity_rows(rows: &mut Vec<(String, String)>, prefix: &str, r: &CapacityResult) {
    let mode = match r.mode {
        CapacityMode::HolevoMax => "holevo-max",
        CapacityMode::DifferenceLowerBound => "difference-lower-bound",
    };
    rows.push((format!("{prefix}value_bits"), fmt_f(r.value_bits)));
    rows.push((format!("{prefix}probs"), fmt_vec(&r.optimal_probs)));
    rows.push((format!("{prefix}converged"), r.converged.to_string()));
    rows.push((format!("{prefix}iterations"), r.iterations.to_string()));
    rows.push((format!("{prefix}gap"), fmt_f(r.gap)));
    rows.push((format!("{prefix}mode"), mode.to_string()));
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serialisable")
}

fn cmd_channel_info(args: &ChannelArgs) -> Result<Report, CliError> {
    let ch = load_channel(args)?;
    let d = channel::dilate(&ch)?;
    let info = ChannelInfoJson {
        label: ch.label(),
        dim_in: ch.dim_in(),
        kraus_count: ch.kraus().len(),
        completeness_defect: ch.completeness_defect(),
        env_dim: d.env_dim(),
        dilation_dim: d.unitary().rows(),
        unitarity_defect: linalg::unitarity_defect(d.unitary()),
    };
    let rows = vec![
        ("label".into(), info.label.to_string()),
        ("dim_in".into(), info.dim_in.to_string()),
        ("kraus_count".into(), info.kraus_count.to_string()),
        (
            "completeness_defect".into(),
            fmt_f(info.completeness_defect),
        ),
        ("env_dim".into(), info.env_dim.to_string()),
        ("dilation_dim".into(), info.dilation_dim.to_string()),
        ("unitarity_defect".into(), fmt_f(info.unitarity_defect)),
    ];
    Ok(Report {
        json: to_value(&info),
        rows,
    })
}

fn cmd_dfs_find(args: &ChannelArgs, operators: Option<&PathBuf>) -> Result<Report, CliError> {
    let ch = load_channel(args)?;
    let ops = load_operators(operators, &ch)?;
    let found = dfs::find_dfs(&ops)?;
    let mut rows = vec![
        ("ambient_dim".into(), ch.dim_in().to_string()),
        ("count".into(), found.len().to_string()),
    ];
    for (i, s) in found.iter().enumerate() {
        push_subspace_rows(&mut rows, &format!("subspace[{i}]"), s);
        let inv = dfs::verify_invariance(&ch, s, DEFAULT_TRIALS, DEFAULT_SEED)?;
        rows.push((
            format!("subspace[{i}].invariance_residual"),
            fmt_f(inv.max_residual),
        ));
        rows.push((format!("subspace[{i}].invariant"), inv.passes.to_string()));
    }
    Ok(Report {
        json: to_value(&DfsJson::from_subspaces(ch.dim_in(), &found)),
        rows,
    })
}

fn privacy_rows(r: &PrivacyReport) -> Vec<(String, String)> {
    vec![
        ("chi_bob".into(), fmt_f(r.chi_bob)),
        ("chi_eve".into(), fmt_f(r.chi_eve)),
        ("privacy".into(), fmt_f(r.privacy)),
    ]
}

fn verdict_rows(v: &WiretapVerdict) -> Vec<(String, String)> {
    vec![
        ("p_error".into(), fmt_f(v.p_error)),
        ("leakage_bits_per_letter".into(), fmt_f(v.leakage)),
        ("lambda".into(), fmt_f(v.lambda)),
        ("mu".into(), fmt_f(v.mu)),
        ("passes".into(), v.passes.to_string()),
    ]
}

fn cmd_privacy(args: &ChannelArgs, ensemble: &Path) -> Result<Report, CliError> {
    let ch = load_channel(args)?;
    let e: Ensemble = read_json(ensemble)?;
    let d = channel::dilate(&ch)?;
    let r = secrecy::privacy(&d, &e)?;
    Ok(Report {
        json: to_value(&r),
        rows: privacy_rows(&r),
    })
}

fn cmd_code_verify(cfg: &RunConfig, args: &ChannelArgs, code: &Path) -> Result<Report, CliError> {
    let ch = load_channel(args)?;
    let code: WiretapCode = read_json(code)?;
    let d = channel::dilate(&ch)?;
    let v = secrecy::verify_wiretap_code(&d, &code, cfg.lambda, cfg.mu)?;
    Ok(Report {
        json: to_value(&v),
        rows: verdict_rows(&v),
    })
}

fn cmd_capacity(
    cfg: &RunConfig,
    args: &ChannelArgs,
    states: Option<&PathBuf>,
    difference: bool,
    operators: Option<&PathBuf>,
) -> Result<Report, CliError> {
    let ch = load_channel(args)?;
    let d = channel::dilate(&ch)?;
    let result = match states {
        Some(path) => {
            let e: Ensemble = read_json(path)?;
            if difference {
                capacity::secrecy_rate_sweep(&d, e.states(), cfg.tol)?
            } else {
                let bob = e.map_states(|s| d.bob_state(s))?;
                capacity::maximize_holevo(bob.states(), cfg.tol, cfg.max_iter)?
            }
        }
        None => {
            let ops = load_operators(operators, &ch)?;
            let mut best: Option<CapacityResult> = None;
            for s in dfs::find_dfs(&ops)? {
                if dfs::invariance_residual(&ch, &s)? > dfs::INVARIANCE_TOL {
                    continue;
                }
                let r = capacity::secrecy_capacity_dfs(&d, &s, cfg.tol)?;
                if best.as_ref().is_none_or(|b| r.value_bits > b.value_bits) {
                    best = Some(r);
                }
            }
            best.ok_or_else(|| CliError::NoDfs(format!("channel `{}`", ch.label())))?
        }
    };
    let mut rows = Vec::new();
    capacity_rows(&mut rows, "", &result);
    Ok(Report {
        json: to_value(&CapacityJson::from(&result)),
        rows,
    })
}

#[derive(Serialize)]
struct QeacJson {
    codewords: Vec<Vec<[f64; 2]>>,
    messages: usize,
    length: usize,
    bits_per_block: f64,
    rate: f64,
}

fn cmd_demo(cfg: &RunConfig) -> Result<Report, CliError> {
    let ch = channel::builtin_collective_dephasing(2)?;
    let d = channel::dilate(&ch)?;
    let ops = SystemOperatorSet::explicit(vec![channel::collective_sz(2)?])?;
    let found = dfs::find_dfs(&ops)?;
    let logical = found
        .iter()
        .find(|s| s.dim() == 2)
        .ok_or_else(|| CliError::NoDfs("two-qubit dephasing lost its logical block".into()))?;
    let invariance = dfs::verify_invariance(&ch, logical, DEFAULT_TRIALS, DEFAULT_SEED)?;
    let code = dfs::build_qeac(logical, 2)?;
    let ensemble = Ensemble::uniform(code.codeword_states())?;
    let privacy = secrecy::privacy(&d, &ensemble)?;
    let verdict = secrecy::verify_wiretap_code(&d, &WiretapCode::from(&code), cfg.lambda, cfg.mu)?;
    let cap = capacity::secrecy_capacity_dfs(&d, logical, cfg.tol)?;

    let mut rows: Vec<(String, String)> = vec![
        ("channel".into(), ch.label().to_string()),
        ("kraus_count".into(), ch.kraus().len().to_string()),
        ("env_dim".into(), d.env_dim().to_string()),
        (
            "dfs.dims".into(),
            format!(
                "{:?}",
                found.iter().map(DfsSubspace::dim).collect::<Vec<_>>()
            ),
        ),
    ];
    push_subspace_rows(&mut rows, "dfs.logical", logical);
    rows.push((
        "dfs.logical.invariance_residual".into(),
        fmt_f(invariance.max_residual),
    ));
    let words: Vec<String> = (0..code.num_messages())
        .map(|u| fmt_ket(code.codeword(u)))
        .collect();
    rows.push(("qeac.codewords".into(), words.join(" ; ")));
    rows.push(("qeac.bits_per_block".into(), fmt_f(code.bits_per_block())));
    rows.push(("qeac.rate".into(), fmt_f(code.rate())));
    rows.extend(privacy_rows(&privacy));
    rows.extend(verdict_rows(&verdict));
    rows.push(("capacity".into(), fmt_f(cap.value_bits)));
    capacity_rows(&mut rows, "capacity.", &cap);

    let qeac = QeacJson {
        codewords: (0..code.num_messages())
            .map(|u| code.codeword(u).iter().map(|z| [z.re, z.im]).collect())
            .collect(),
        messages: code.num_messages(),
        length: code.length(),
        bits_per_block: code.bits_per_block(),
        rate: code.rate(),
    };
    let json = serde_json::json!({
        "channel": to_value(&ch),
        "dfs": to_value(&DfsJson::from_subspaces(ch.dim_in(), &found)),
        "invariance": to_value(&invariance),
        "qeac": to_value(&qeac),
        "privacy": to_value(&privacy),
        "verdict": to_value(&verdict),
        "capacity": to_value(&CapacityJson::from(&cap)),
    });
    Ok(Report { json, rows })
}

/// Runs one command and returns its report without writing anything.
pub fn execute(cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    match &cfg.command {
        Command::DfsFind { channel, operators } => cmd_dfs_find(channel, operators.as_ref()),
        Command::ChannelInfo { channel } => cmd_channel_info(channel),
        Command::Privacy { channel, ensemble } => cmd_privacy(channel, ensemble),
        Command::CodeVerify { channel, code } => cmd_code_verify(cfg, channel, code),
        Command::Capacity {
            channel,
            states,
            difference,
            operators,
        } => cmd_capacity(
            cfg,
            channel,
            states.as_ref(),
            *difference,
            operators.as_ref(),
        ),
        Command::DemoDephasing => cmd_demo(cfg),
    }
}

/// Runs one command, writes the report to stdout or `--out` and returns the exit status.
pub fn run(cfg: &RunConfig) -> i32 {
    let outcome = execute(cfg).and_then(|report| {
        let text = report.render(cfg.format);
        match &cfg.out {
            Some(path) => fs::write(path, text).map_err(|e| CliError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
