//! Command-line front end.
//!
//! ```text
//! complementarity prepare   --class ghz --alpha1 1.5707963
//! complementarity interfere --class w --alpha1 1.0 --mode locked
//! complementarity verify    --family ghz --sweep alpha1 --points 33
//! complementarity verify    --random --count 200 --seed 1
//! complementarity figure9   --family w
//! ```
//!
//! Options may also come from a `--config` file of `key = value` lines
//! (`#` starts a comment); flags given on the command line win.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde_json::json;

use crate::entanglement::preferred_basis;
use crate::error::{Error, Result};
use crate::harness::{
    family_sweep, linspace, summarize, verify_described, verify_inequality_described, BasisSource,
    ComplementarityRecord, StateDescriptor, Summary, SweepSpec, VerifyOptions,
};
use crate::interferometer::{
    sweep_interferogram, visibility_single, visibility_two_party, PhaseGrid, SweepMode,
    DEFAULT_PHASE_POINTS,
};
use crate::prep::{amplitudes_from_angles, family_state, random_pure_state, FamilyParams, StateClassTag};
use crate::quantum::PureState;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Interferogram CSV columns, in order.
pub const INTERFEROGRAM_COLUMNS: [&str; 16] = [
    "phi1", "phi2", "p00", "p01", "p02", "p03", "p10", "p11", "p12", "p13", "pa0", "pa1", "pbar00",
    "pbar01", "pbar10", "pbar11",
];
/// Schema tag written into JSON interferograms.
pub const INTERFEROGRAM_SCHEMA: &str = "interferogram/1";

const RECORD_COLUMNS: [&str; 14] = [
    "state",
    "class",
    "seed",
    "alpha1",
    "alpha2_0",
    "alpha3_00",
    "concurrence",
    "predictability",
    "v_single",
    "s",
    "v2",
    "residual_equality",
    "slack_inequality",
    "basis",
];

#[derive(Debug, Parser)]
#[command(name = "complementarity", version, about = "Four-way interferometer for three-qubit states")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
#[command(next_help_heading = "Global options")]
pub struct GlobalArgs {
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Pass threshold on |V² + S² − 1|.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tolerance: f64,
    /// Phase samples per swept axis.
    #[arg(long, global = true, default_value_t = DEFAULT_PHASE_POINTS)]
    pub phase_points: usize,
    /// `locked` (φ₁ = φ₂) or `independent`; defaults to locked for
    /// `interfere` and independent otherwise.
    #[arg(long, global = true)]
    pub mode: Option<SweepMode>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// File of `key = value` lines supplying defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Read angles in degrees.
    #[arg(long, global = true)]
    pub degrees: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the amplitudes of a state.
    #[command(args_override_self = true)]
    Prepare(StateArgs),
    /// Sweep the interferometer phases and write the detection probabilities.
    #[command(args_override_self = true)]
    Interfere(InterfereArgs),
    /// Check the complementarity relation and write one record per state.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
    /// (V2, S) pairs of a family sweep.
    #[command(args_override_self = true)]
    Figure9(Figure9Args),
}

/// State selection. Missing family angles default to α₁ = π/2, and for W
/// α₂⁽⁰⁾ = π/2, for intermediate α₂⁽⁰⁾ = π/3 and α₃⁽⁰⁰⁾ = π/4.
#[derive(Debug, Args, Clone, Default)]
pub struct StateArgs {
    /// ghz, w, intermediate or general.
    #[arg(long, alias = "family")]
    pub class: Option<StateClassTag>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha1: Option<f64>,
    #[arg(long = "alpha2-0", allow_hyphen_values = true)]
    pub alpha2_0: Option<f64>,
    #[arg(long = "alpha2-1", allow_hyphen_values = true)]
    pub alpha2_1: Option<f64>,
    #[arg(long = "alpha3-00", allow_hyphen_values = true)]
    pub alpha3_00: Option<f64>,
    #[arg(long = "alpha3-01", allow_hyphen_values = true)]
    pub alpha3_01: Option<f64>,
    #[arg(long = "alpha3-10", allow_hyphen_values = true)]
    pub alpha3_10: Option<f64>,
    #[arg(long = "alpha3-11", allow_hyphen_values = true)]
    pub alpha3_11: Option<f64>,
    /// Haar-random state drawn from `--seed`.
    #[arg(long)]
    pub random: bool,
    /// Amplitude file (`re im` per line).
    #[arg(long)]
    pub state: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InterfereArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// table or eigensolve.
    #[arg(long)]
    pub basis: Option<BasisSource>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Number of random states (with `--random`), seeds `seed, seed+1, …`.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Family angle to sweep, e.g. `alpha1`.
    #[arg(long)]
    pub sweep: Option<String>,
    #[arg(long, default_value_t = 33)]
    pub points: usize,
    /// Start of the swept range (default 0).
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    /// End of the swept range (default π).
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    /// Measurement direction `c0,c1,c2,c3` in the preferred basis; entries
    /// are `re` or `re:im`. Switches to the inequality check.
    #[arg(long, allow_hyphen_values = true)]
    pub basis_coeffs: Option<String>,
    /// table or eigensolve.
    #[arg(long)]
    pub basis: Option<BasisSource>,
    /// Summary JSON destination (default: standard error).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Figure9Args {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, default_value_t = 33)]
    pub points: usize,
}

/// Error raised while running a command, with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::usage(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Fixed float formatting: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Parses the process arguments (after merging any config file), runs the
/// command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let argv = match merge_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {}", e.message);
            return e.code;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

const COMMANDS: [&str; 4] = ["prepare", "interfere", "verify", "figure9"];

/// Inserts `--key value` pairs from the config file right after the
/// subcommand, so that later command-line flags override them.
fn merge_config(argv: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let mut path = None;
    for (k, a) in argv.iter().enumerate() {
        let a = a.to_string_lossy();
        if a == "--config" {
            path = argv.get(k + 1).map(PathBuf::from);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?;
    let extra = config_args(&text)?;
    let pos = argv
        .iter()
        .position(|a| COMMANDS.contains(&a.to_string_lossy().as_ref()))
        .map(|p| p + 1)
        .unwrap_or(argv.len());
    let mut out = argv[..pos].to_vec();
    out.extend(extra.into_iter().map(OsString::from));
    out.extend_from_slice(&argv[pos..]);
    Ok(out)
}

/// `key = value` lines to flags; `true`/`false` values toggle switches.
pub fn config_args(text: &str) -> CliResult<Vec<String>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected key = value", n + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key.is_empty() || key == "config" {
            return Err(CliError::usage(format!("config line {}: invalid key", n + 1)));
        }
        match value {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            v => {
                out.push(format!("--{key}"));
                out.push(v.to_string());
            }
        }
    }
    Ok(out)
}

fn execute(cli: &Cli) -> CliResult<i32> {
    let g = &cli.global;
    match &cli.command {
        Command::Prepare(s) => {
            let (psi, _) = resolve_state(s, g)?;
            let text = match g.format {
                Format::Csv => render_state(&psi),
                Format::Json => {
                    let amps: Vec<[f64; 2]> = psi.amplitudes().iter().map(|z| [z.re, z.im]).collect();
                    json_string(&json!({"n_qubits": psi.n_qubits(), "amplitudes": amps}))
                }
            };
            emit(g.output.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::Interfere(a) => cmd_interfere(a, g),
        Command::Verify(a) => cmd_verify(a, g),
        Command::Figure9(a) => cmd_figure9(a, g),
    }
}

fn angle(g: &GlobalArgs, v: f64) -> f64 {
    if g.degrees {
        v.to_radians()
    } else {
        v
    }
}

fn family_params(s: &StateArgs, class: StateClassTag, g: &GlobalArgs) -> CliResult<FamilyParams> {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};
    let (d2, d3) = match class {
        StateClassTag::W => (FRAC_PI_2, 0.0),
        StateClassTag::Intermediate => (FRAC_PI_3, FRAC_PI_4),
        _ => (0.0, 0.0),
    };
    let pick = |v: Option<f64>, default: f64| v.map(|x| angle(g, x)).unwrap_or(default);
    let p = FamilyParams {
        alpha1: pick(s.alpha1, FRAC_PI_2),
        alpha2_0: pick(s.alpha2_0, d2),
        alpha2_1: pick(s.alpha2_1, 0.0),
        alpha3_00: pick(s.alpha3_00, d3),
        alpha3_01: pick(s.alpha3_01, 0.0),
        alpha3_10: pick(s.alpha3_10, 0.0),
        alpha3_11: pick(s.alpha3_11, 0.0),
    }
    .constrained(class);
    if !p.is_finite() {
        return Err(CliError::usage("angles must be finite"));
    }
    Ok(p)
}

fn resolve_state(s: &StateArgs, g: &GlobalArgs) -> CliResult<(PureState, StateDescriptor)> {
    if let Some(path) = &s.state {
        return Ok((read_state(path)?, StateDescriptor::general()));
    }
    if s.random {
        return Ok((random_pure_state(g.seed, 3), StateDescriptor::random(g.seed)));
    }
    let class = s
        .class
        .ok_or_else(|| CliError::usage("no state given: use --class, --random or --state"))?;
    let p = family_params(s, class, g)?;
    let psi = match class {
        StateClassTag::General => amplitudes_from_angles(&p),
        c => family_state(c, &p),
    };
    Ok((psi, StateDescriptor::family(class, p)))
}

/// One `re im` line per amplitude, basis order `|000⟩ … |111⟩`.
pub fn render_state(psi: &PureState) -> String {
    let mut out = String::from("# re im\n");
    for z in psi.amplitudes() {
        let _ = writeln!(out, "{} {}", fmt_f64(z.re), fmt_f64(z.im));
    }
    out
}

/// Parses a state file; the amplitudes must already be normalized.
pub fn parse_state(text: &str) -> Result<PureState> {
    let mut amps = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let bad = || Error::InvalidParameter(format!("state line {}: expected 're im'", n + 1));
        let re: f64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let im: f64 = match it.next() {
            Some(t) => t.parse().map_err(|_| bad())?,
            None => 0.0,
        };
        if it.next().is_some() {
            return Err(bad());
        }
        amps.push(C64::new(re, im));
    }
    if amps.len() != 8 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            found: amps.len(),
        });
    }
    PureState::new(amps)
}

fn read_state(path: &Path) -> CliResult<PureState> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    Ok(parse_state(&text)?)
}

fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn json_string(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn basis_for(state: &StateDescriptor, chosen: Option<&BasisSource>) -> CliResult<BasisSource> {
    let source = chosen.cloned().unwrap_or_else(|| BasisSource::default_for(state.class));
    if source == BasisSource::Table && state.params.is_none() {
        return Err(CliError::usage("table basis needs a named family"));
    }
    Ok(source)
}

fn cmd_interfere(a: &InterfereArgs, g: &GlobalArgs) -> CliResult<i32> {
    let (psi, state) = resolve_state(&a.state, g)?;
    let source = basis_for(&state, a.basis.as_ref())?;
    let basis = match (&source, state.params) {
        (BasisSource::Table, Some(p)) => crate::entanglement::table_basis(&p, state.class)?,
        _ => preferred_basis(&psi)?,
    };
    let grid = PhaseGrid::new(g.mode.unwrap_or(SweepMode::Locked), g.phase_points)?;
    let ig = sweep_interferogram(&psi, &basis, &grid)?;
    let rows: Vec<[f64; 16]> = ig
        .samples()
        .iter()
        .map(|s| {
            let mut r = [0.0; 16];
            r[0] = s.phi1;
            r[1] = s.phi2;
            r[2..10].copy_from_slice(&s.joint);
            r[10..12].copy_from_slice(&s.single_a);
            r[12..16].copy_from_slice(&s.corrected);
            r
        })
        .collect();
    let text = match g.format {
        Format::Csv => {
            let mut out = INTERFEROGRAM_COLUMNS.join(",");
            out.push('\n');
            for r in &rows {
                out.push_str(&r.iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>().join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => json_string(&json!({
            "schema": INTERFEROGRAM_SCHEMA,
            "state": state.to_string(),
            "basis": source.name(),
            "mode": grid.mode().to_string(),
            "phase_points": g.phase_points,
            "columns": INTERFEROGRAM_COLUMNS,
            "rows": rows,
            "visibility_single": visibility_single(&ig, 0)?,
            "visibility_two_party": visibility_two_party(&ig, 0, 0)?,
        })),
    };
    emit(g.output.as_deref(), &text)?;
    Ok(EXIT_OK)
}

/// Parses `c0,c1,c2,c3` with entries `re` or `re:im`; the vector must have
/// unit norm within 1e-6 and is renormalized exactly.
pub fn parse_coeffs(s: &str) -> Result<[C64; 4]> {
    let bad = || Error::InvalidParameter(format!("basis coefficients '{s}'"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(bad());
    }
    let mut c = [C64::default(); 4];
    for (slot, p) in c.iter_mut().zip(parts) {
        let (re, im) = match p.split_once(':') {
            Some((r, i)) => (r.parse().map_err(|_| bad())?, i.parse().map_err(|_| bad())?),
            None => (p.parse().map_err(|_| bad())?, 0.0),
        };
        *slot = C64::new(re, im);
    }
    let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized(norm));
    }
    Ok(c.map(|z| z / norm))
}

fn sweep_states(
    a: &VerifyArgs,
    g: &GlobalArgs,
    param: &str,
) -> CliResult<Vec<(PureState, StateDescriptor)>> {
    let class = a
        .state
        .class
        .ok_or_else(|| CliError::usage("--sweep needs --family"))?;
    let fixed = family_params(&a.state, class, g)?;
    fixed.get(param)?;
    let from = a.from.map(|v| angle(g, v)).unwrap_or(0.0);
    let to = a.to.map(|v| angle(g, v)).unwrap_or(std::f64::consts::PI);
    if a.points == 0 {
        return Err(CliError::usage("--points must be positive"));
    }
    linspace(from, to, a.points)
        .into_iter()
        .map(|v| {
            let mut p = fixed;
            p.set(param, v)?;
            let p = p.constrained(class);
            Ok((family_state(class, &p), StateDescriptor::family(class, p)))
        })
        .collect()
}

fn cmd_verify(a: &VerifyArgs, g: &GlobalArgs) -> CliResult<i32> {
    let states: Vec<(PureState, StateDescriptor)> = if let Some(param) = &a.sweep {
        sweep_states(a, g, param)?
    } else if a.state.random && a.state.state.is_none() {
        (0..a.count as u64)
            .map(|k| {
                let seed = g.seed + k;
                (random_pure_state(seed, 3), StateDescriptor::random(seed))
            })
            .collect()
    } else {
        vec![resolve_state(&a.state, g)?]
    };
    let coeffs = a.basis_coeffs.as_deref().map(parse_coeffs).transpose()?;
    let mode = g.mode.unwrap_or(SweepMode::Independent);
    let mut sources = Vec::with_capacity(states.len());
    for (_, st) in &states {
        sources.push(basis_for(st, a.basis.as_ref())?);
    }
    let records: Vec<ComplementarityRecord> = states
        .par_iter()
        .zip(sources.par_iter())
        .map(|((psi, st), source)| {
            let options = VerifyOptions {
                mode,
                phase_points: g.phase_points,
                basis: source.clone(),
            };
            match &coeffs {
                Some(c) => verify_inequality_described(psi, st.clone(), c, &options),
                None => verify_described(psi, st.clone(), &options),
            }
        })
        .collect::<Result<_>>()?;
    let summary = summarize(&records, g.tolerance);
    let names: Vec<&str> = sources.iter().map(|s| s.name()).collect();
    let text = match g.format {
        Format::Csv => render_records(&records, &names),
        Format::Json => json_string(&json!({"records": records, "summary": summary})),
    };
    emit(g.output.as_deref(), &text)?;
    let summary_text = render_summary(&summary);
    match &a.summary {
        Some(p) => fs::write(p, &summary_text)?,
        None => eprint!("{summary_text}"),
    }
    Ok(if summary.pass { EXIT_OK } else { EXIT_FAIL })
}

/// Summary JSON with fixed float formatting.
pub fn render_summary(s: &Summary) -> String {
    let mut out = String::from("{\n");
    let _ = writeln!(out, "  \"max_residual\": {},", fmt_f64(s.max_residual));
    let _ = writeln!(out, "  \"mean_residual\": {},", fmt_f64(s.mean_residual));
    let _ = writeln!(out, "  \"n_states\": {},", s.n_states);
    if let Some(m) = s.min_slack {
        let _ = writeln!(out, "  \"min_slack\": {},", fmt_f64(m));
    }
    let _ = writeln!(out, "  \"pass\": {}", s.pass);
    out.push_str("}\n");
    out
}

/// Records CSV; `basis` names the measurement-basis source of each row.
pub fn render_records(records: &[ComplementarityRecord], basis: &[&str]) -> String {
    let mut out = RECORD_COLUMNS.join(",");
    out.push('\n');
    for (r, b) in records.iter().zip(basis) {
        let p = r.state.params;
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        let fields = [
            r.state.to_string(),
            r.state.class.to_string(),
            r.state.seed.map(|s| s.to_string()).unwrap_or_default(),
            opt(p.map(|p| p.alpha1)),
            opt(p.map(|p| p.alpha2_0)),
            opt(p.map(|p| p.alpha3_00)),
            fmt_f64(r.concurrence),
            fmt_f64(r.predictability),
            fmt_f64(r.v_single),
            fmt_f64(r.s),
            fmt_f64(r.v2),
            fmt_f64(r.residual_equality),
            opt(r.slack_inequality),
            b.to_string(),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn cmd_figure9(a: &Figure9Args, g: &GlobalArgs) -> CliResult<i32> {
    let class = a
        .state
        .class
        .ok_or_else(|| CliError::usage("figure9 needs --family"))?;
    if class == StateClassTag::General {
        return Err(CliError::usage("figure9 needs a named family"));
    }
    if a.points == 0 {
        return Err(CliError::usage("--points must be positive"));
    }
    let fixed = family_params(&a.state, class, g)?;
    let mut spec = SweepSpec::alpha1(class, fixed).with_points(a.points);
    spec.phase_points = g.phase_points;
    spec.mode = g.mode.unwrap_or(SweepMode::Independent);
    let records = family_sweep(&spec)?;
    let text = match g.format {
        Format::Csv => {
            let mut out = String::from("v_ab,s_a\n");
            for r in &records {
                let _ = writeln!(out, "{},{}", fmt_f64(r.v2), fmt_f64(r.s));
            }
            out
        }
        Format::Json => {
            let pts: Vec<[f64; 2]> = records.iter().map(|r| [r.v2, r.s]).collect();
            json_string(&json!({"family": class.to_string(), "points": pts}))
        }
    };
    emit(g.output.as_deref(), &text)?;
    Ok(EXIT_OK)
}
