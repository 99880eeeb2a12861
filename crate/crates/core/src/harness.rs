//! Verification runs: the complementarity equality for pure states, the
//! extended-basis inequality, family sweeps and the pseudopure check.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::entanglement::{
    concurrence_bipartition, predictability, preferred_basis, single_particle_character,
    table_basis, PreferredBasis,
};
use crate::error::{Error, Result};
use crate::interferometer::{
    extended_visibility_in, general_basis_rotation, sweep_interferogram, sweep_mixed,
    sweep_with_frame, visibility_single, visibility_two_party, PhaseGrid, SweepMode,
    DEFAULT_PHASE_POINTS,
};
use crate::prep::{family_state, pseudopure, random_pure_state, FamilyParams, StateClassTag};
use crate::quantum::{reduced_state, PureState};

/// Default number of points in a family sweep.
pub const DEFAULT_SWEEP_POINTS: usize = 33;
/// Default pass threshold on `|V² + S² − 1|`.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
/// Most negative inequality slack still counted as a pass.
pub const SLACK_TOLERANCE: f64 = 1e-8;

/// Where the BC measurement basis comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisSource {
    /// Closed-form basis of a named family.
    Table,
    /// Eigenbasis of `ρ_BC`.
    Eigensolve,
    Custom(PreferredBasis),
}

impl BasisSource {
    pub fn name(&self) -> &'static str {
        match self {
            BasisSource::Table => "table",
            BasisSource::Eigensolve => "eigensolve",
            BasisSource::Custom(_) => "custom",
        }
    }

    /// `table` for named families, `eigensolve` otherwise.
    pub fn default_for(class: StateClassTag) -> Self {
        match class {
            StateClassTag::General => BasisSource::Eigensolve,
            _ => BasisSource::Table,
        }
    }
}

impl FromStr for BasisSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(BasisSource::Table),
            "eigensolve" | "eigen" => Ok(BasisSource::Eigensolve),
            other => Err(Error::InvalidParameter(format!("unknown basis source '{other}'"))),
        }
    }
}

/// Identifies the state a record was computed for.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateDescriptor {
    pub class: StateClassTag,
    pub params: Option<FamilyParams>,
    pub seed: Option<u64>,
}

impl StateDescriptor {
    pub fn family(class: StateClassTag, params: FamilyParams) -> Self {
        Self {
            class,
            params: Some(params),
            seed: None,
        }
    }

    pub fn random(seed: u64) -> Self {
        Self {
            class: StateClassTag::General,
            params: None,
            seed: Some(seed),
        }
    }

    pub fn general() -> Self {
        Self {
            class: StateClassTag::General,
            params: None,
            seed: None,
        }
    }
}

impl fmt::Display for StateDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.params, self.seed) {
            (_, Some(seed)) => write!(f, "random:{seed}"),
            (Some(p), None) => write!(
                f,
                "{}:{:.6}/{:.6}/{:.6}",
                self.class, p.alpha1, p.alpha2_0, p.alpha3_00
            ),
            (None, None) => write!(f, "{}", self.class),
        }
    }
}

/// Quantifiers of one state.
///
/// `concurrence` and `predictability` are computed from reduced density
/// matrices; `v_single` and `v2` from the simulated interferometer;
/// `s = √(v_single² + predictability²)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplementarityRecord {
    pub state: StateDescriptor,
    pub concurrence: f64,
    pub predictability: f64,
    pub v_single: f64,
    pub s: f64,
    pub v2: f64,
    /// `|v2² + s² − 1|`
    pub residual_equality: f64,
    /// `1 − (v2² + s²)`, set for extended-basis runs.
    pub slack_inequality: Option<f64>,
}

/// Phase grid and basis choice for a verification run.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub mode: SweepMode,
    pub phase_points: usize,
    pub basis: BasisSource,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            mode: SweepMode::Independent,
            phase_points: DEFAULT_PHASE_POINTS,
            basis: BasisSource::Eigensolve,
        }
    }
}

impl VerifyOptions {
    pub fn grid(&self) -> Result<PhaseGrid> {
        PhaseGrid::new(self.mode, self.phase_points)
    }
}

fn resolve_basis(
    xi: &PureState,
    state: &StateDescriptor,
    source: &BasisSource,
) -> Result<PreferredBasis> {
    match source {
        BasisSource::Eigensolve => preferred_basis(xi),
        BasisSource::Custom(b) => Ok(b.clone()),
        BasisSource::Table => match state.params {
            Some(p) if state.class != StateClassTag::General => table_basis(&p, state.class),
            _ => Err(Error::UseEigenbasisRoute),
        },
    }
}

fn record(
    xi: &PureState,
    state: StateDescriptor,
    basis: &PreferredBasis,
    grid: &PhaseGrid,
) -> Result<ComplementarityRecord> {
    let ig = sweep_interferogram(xi, basis, grid)?;
    let v2 = visibility_two_party(&ig, 0, 0)?;
    let v_single = visibility_single(&ig, 0)?;
    let p = predictability(xi, 0)?;
    let s = v_single.hypot(p);
    Ok(ComplementarityRecord {
        state,
        concurrence: concurrence_bipartition(xi, 0)?,
        predictability: p,
        v_single,
        s,
        v2,
        residual_equality: (v2 * v2 + s * s - 1.0).abs(),
        slack_inequality: None,
    })
}

/// Interferometric check of `V² + S² = 1` for a pure state.
pub fn verify_equality(xi: &PureState, options: &VerifyOptions) -> Result<ComplementarityRecord> {
    verify_described(xi, StateDescriptor::general(), options)
}

/// As [`verify_equality`], tagging the record with `state`; a `Table` basis
/// needs a named family with parameters.
pub fn verify_described(
    xi: &PureState,
    state: StateDescriptor,
    options: &VerifyOptions,
) -> Result<ComplementarityRecord> {
    let basis = resolve_basis(xi, &state, &options.basis)?;
    record(xi, state, &basis, &options.grid()?)
}

/// Family member measured in the family's default basis.
pub fn verify_family(
    class: StateClassTag,
    params: &FamilyParams,
    options: &VerifyOptions,
) -> Result<ComplementarityRecord> {
    let p = params.constrained(class);
    verify_described(&family_state(class, &p), StateDescriptor::family(class, p), options)
}

/// Equality check for `count` Haar-random states with seeds
/// `first_seed, first_seed + 1, …`.
pub fn verify_random(
    first_seed: u64,
    count: usize,
    options: &VerifyOptions,
) -> Result<Vec<ComplementarityRecord>> {
    (0..count as u64)
        .into_par_iter()
        .map(|k| {
            let seed = first_seed + k;
            verify_described(&random_pure_state(seed, 3), StateDescriptor::random(seed), options)
        })
        .collect()
}

/// Visibility along `Σ cᵢ Φᵢ` (weighted over the ports of the basis chosen
/// by `options`) against the direct single-particle character.
pub fn verify_inequality(
    xi: &PureState,
    coeffs: &[C64; 4],
    options: &VerifyOptions,
) -> Result<ComplementarityRecord> {
    verify_inequality_described(xi, StateDescriptor::general(), coeffs, options)
}

pub fn verify_inequality_described(
    xi: &PureState,
    state: StateDescriptor,
    coeffs: &[C64; 4],
    options: &VerifyOptions,
) -> Result<ComplementarityRecord> {
    let basis = resolve_basis(xi, &state, &options.basis)?;
    let grid = options.grid()?;
    let ext = extended_visibility_in(xi, &basis, coeffs, &grid)?;
    let mut rec = record(xi, state, &basis, &grid)?;
    let v = ext.weighted;
    rec.v2 = v;
    rec.residual_equality = (v * v + rec.s * rec.s - 1.0).abs();
    rec.slack_inequality = Some(1.0 - (v * v + rec.s * rec.s));
    Ok(rec)
}

/// Parameter sweep over one family.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub family: StateClassTag,
    /// Name of the swept [`FamilyParams`] field.
    pub parameter: String,
    pub values: Vec<f64>,
    pub fixed: FamilyParams,
    pub phase_points: usize,
    pub mode: SweepMode,
    pub basis: BasisSource,
}

impl SweepSpec {
    /// `α₁` over `[0, π]` at [`DEFAULT_SWEEP_POINTS`] points, other angles
    /// from `fixed`.
    pub fn alpha1(family: StateClassTag, fixed: FamilyParams) -> Self {
        Self {
            family,
            parameter: "alpha1".into(),
            values: linspace(0.0, PI, DEFAULT_SWEEP_POINTS),
            fixed,
            phase_points: DEFAULT_PHASE_POINTS,
            mode: SweepMode::Independent,
            basis: BasisSource::default_for(family),
        }
    }

    pub fn with_points(mut self, n: usize) -> Self {
        self.values = linspace(0.0, PI, n);
        self
    }

    pub fn options(&self) -> VerifyOptions {
        VerifyOptions {
            mode: self.mode,
            phase_points: self.phase_points,
            basis: self.basis.clone(),
        }
    }
}

/// `n` evenly spaced values from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// One record per swept value, in grid order.
pub fn family_sweep(spec: &SweepSpec) -> Result<Vec<ComplementarityRecord>> {
    if spec.values.is_empty() {
        return Err(Error::InvalidParameter("empty sweep grid".into()));
    }
    if spec.values.iter().any(|v| !v.is_finite()) || !spec.fixed.is_finite() {
        return Err(Error::InvalidParameter("non-finite angle".into()));
    }
    spec.fixed.get(&spec.parameter)?;
    let options = spec.options();
    spec.values
        .par_iter()
        .map(|&v| {
            let mut p = spec.fixed;
            p.set(&spec.parameter, v)?;
            verify_family(spec.family, &p, &options)
        })
        .collect()
}

/// Summary statistics of a verification run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub max_residual: f64,
    pub mean_residual: f64,
    pub n_states: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_slack: Option<f64>,
    pub pass: bool,
}

/// Pass when every residual is below `tolerance`, or for inequality runs
/// when every slack is at least `−1e-8`.
pub fn summarize(records: &[ComplementarityRecord], tolerance: f64) -> Summary {
    let n = records.len();
    let max_residual = records.iter().map(|r| r.residual_equality).fold(0.0, f64::max);
    let mean_residual = if n == 0 {
        0.0
    } else {
        records.iter().map(|r| r.residual_equality).sum::<f64>() / n as f64
    };
    let min_slack = records
        .iter()
        .filter_map(|r| r.slack_inequality)
        .reduce(f64::min);
    let pass = match min_slack {
        Some(s) => s >= -SLACK_TOLERANCE,
        None => n > 0 && max_residual < tolerance,
    };
    Summary {
        max_residual,
        mean_residual,
        n_states: n,
        min_slack,
        pass,
    }
}

/// Comparison of a pseudopure interferogram with the pure one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudopureReport {
    pub epsilon: f64,
    pub n_points: usize,
    /// Largest pointwise difference between background-subtracted, rescaled
    /// mixed probabilities and the pure-state probabilities.
    pub max_deviation: f64,
    /// `(εC)² + S_ρ²`, with `S_ρ` from the reduced state of the mixture;
    /// an upper bound for `C(ρ)² + S(ρ)²` since `C(ρ) ≤ εC`.
    pub mixed_bound: f64,
}

/// Sweeps `pseudopure(ξ, ε)` and `ξ` in the preferred basis of `ξ` and
/// compares joint and single-particle probabilities after removing the flat
/// background and rescaling by `1/ε`.
pub fn pseudopure_check(xi: &PureState, epsilon: f64, grid: &PhaseGrid) -> Result<PseudopureReport> {
    let rho = pseudopure(xi, epsilon)?;
    let frame = general_basis_rotation(&preferred_basis(xi)?)?;
    let pure = sweep_with_frame(xi, &frame, grid)?;
    let mixed = sweep_mixed(&rho, &frame, grid)?;
    let joint_bg = (1.0 - epsilon) / 8.0;
    let single_bg = (1.0 - epsilon) / 2.0;
    let mut max_deviation: f64 = 0.0;
    for (p, m) in pure.samples().iter().zip(mixed.samples()) {
        for (a, b) in p.joint.iter().zip(m.joint.iter()) {
            max_deviation = max_deviation.max(((b - joint_bg) / epsilon - a).abs());
        }
        for (a, b) in p.single_a.iter().zip(m.single_a.iter()) {
            max_deviation = max_deviation.max(((b - single_bg) / epsilon - a).abs());
        }
    }

    let rho_a = crate::quantum::partial_trace(&rho, &[0])?;
    let e = rho_a.entries();
    let s_rho = (e[(0, 0)].re - e[(1, 1)].re).hypot(2.0 * e[(0, 1)].norm());
    let c = concurrence_bipartition(xi, 0)?;
    Ok(PseudopureReport {
        epsilon,
        n_points: grid.len(),
        max_deviation,
        mixed_bound: (epsilon * c).powi(2) + s_rho * s_rho,
    })
}

/// Direct route only: `|C² + S² − 1|` from reduced density matrices.
pub fn direct_residual(xi: &PureState) -> Result<f64> {
    let c = concurrence_bipartition(xi, 0)?;
    let s = single_particle_character(xi, 0)?;
    Ok((c * c + s * s - 1.0).abs())
}

/// Largest weight of `ρ_BC` outside the first two vectors of `basis`.
pub fn basis_leakage(xi: &PureState, basis: &PreferredBasis) -> Result<f64> {
    Ok(basis.leakage(reduced_state(xi, &[1, 2])?.entries()))
}
