//! Four-way interferometer: transducers, basis rotation, phase sweeps and
//! fringe visibilities.
//!
//! Ports: `i ∈ {0, 1}` are the two exits of particle A (K₁/L₁) and
//! `j ∈ {0, 1, 2, 3}` the exits of the pair BC, where `j` labels the basis
//! vector `Φⱼ` of the measurement frame. Ports 0 and 1 of BC (K₂/L₂) carry the
//! support of `ρ_BC` when the frame is a preferred basis.
//!
//! Joint probabilities are evaluated in the measurement frame: with a frame
//! rotation `M` (rows `Φⱼ†`) the probability of `(i, j)` is
//! `|⟨i|⟨j| (U_A(φ₁) ⊗ U_BC(φ₂)) (1 ⊗ M) |ξ⟩|²`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::{PreferredBasis, ThetaAngles};
use crate::error::{Error, Result};
use crate::extremum::{refine_max_1d, refine_max_2d};
use crate::quantum::{tensor_product, CMatrix, CVector, DensityMatrix, PureState, UnitaryMatrix};

/// Fewest phase samples accepted per swept axis.
pub const MIN_PHASE_POINTS: usize = 16;
/// Default number of phase samples per swept axis.
pub const DEFAULT_PHASE_POINTS: usize = 360;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Phase shifter followed by a symmetric beam splitter,
/// `(1/√2)[[e^{−iφ/2}, e^{iφ/2}], [−e^{−iφ/2}, e^{iφ/2}]]`.
pub fn transducer(phi: f64) -> UnitaryMatrix {
    UnitaryMatrix::from_matrix_unchecked(transducer_entries(phi))
}

fn transducer_entries(phi: f64) -> CMatrix {
    let m = C64::from_polar(FRAC_1_SQRT_2, -phi / 2.0);
    let p = C64::from_polar(FRAC_1_SQRT_2, phi / 2.0);
    CMatrix::from_row_slice(2, 2, &[m, p, -m, p])
}

/// Four-dimensional transducer with both 2×2 blocks equal to
/// [`transducer`], written in the measurement frame.
pub fn transducer_bc(phi: f64) -> UnitaryMatrix {
    let u = transducer_entries(phi);
    let mut m = CMatrix::zeros(4, 4);
    m.view_mut((0, 0), (2, 2)).copy_from(&u);
    m.view_mut((2, 2), (2, 2)).copy_from(&u);
    UnitaryMatrix::from_matrix_unchecked(m)
}

/// General four-dimensional transducer: [`transducer`] on the support block
/// and `[[cos(γ/2)e^{−iβ}, −sin(γ/2)e^{−iδ}], [sin(γ/2)e^{iδ}, cos(γ/2)e^{iβ}]]`
/// on the complement.
///
/// [`transducer_bc`] is recovered with `γ = π/2`, `β = φ/2`, `δ = π − φ/2`.
pub fn transducer_bc_general(phi: f64, beta: f64, gamma: f64, delta: f64) -> UnitaryMatrix {
    let (cg, sg) = ((gamma / 2.0).cos(), (gamma / 2.0).sin());
    let mut m = CMatrix::zeros(4, 4);
    m.view_mut((0, 0), (2, 2)).copy_from(&transducer_entries(phi));
    m[(2, 2)] = C64::from_polar(cg, -beta);
    m[(2, 3)] = -C64::from_polar(sg, -delta);
    m[(3, 2)] = C64::from_polar(sg, delta);
    m[(3, 3)] = C64::from_polar(cg, beta);
    UnitaryMatrix::from_matrix_unchecked(m)
}

/// Real orthogonal rotation taking `Φ₀(θ)` to `|00⟩`.
///
/// Row 0 is `Φ₀ = (c₁c₂, s₁s₃, s₁c₃, c₁s₂)` with `cₖ = cos(θₖ/2)`,
/// `sₖ = sin(θₖ/2)`. Writing `Φ₀ = c₁u + s₁v` with `u = c₂|00⟩ + s₂|11⟩` and
/// `v = s₃|01⟩ + c₃|10⟩`, the other rows are `c₁u⊥ + s₁v⊥`, `−s₁u + c₁v` and
/// `−s₁u⊥ + c₁v⊥`. At `θ = 0` the matrix is CNOT with control on the first
/// and target on the second qubit of the pair.
pub fn basis_rotation_r(t: &ThetaAngles) -> UnitaryMatrix {
    let (c1, s1) = ((t.theta1 / 2.0).cos(), (t.theta1 / 2.0).sin());
    let (c2, s2) = ((t.theta2 / 2.0).cos(), (t.theta2 / 2.0).sin());
    let (c3, s3) = ((t.theta3 / 2.0).cos(), (t.theta3 / 2.0).sin());
    #[rustfmt::skip]
    let rows = [
        c1 * c2,  s1 * s3,  s1 * c3,  c1 * s2,
        -c1 * s2, s1 * c3,  -s1 * s3, c1 * c2,
        -s1 * c2, c1 * s3,  c1 * c3,  -s1 * s2,
        s1 * s2,  c1 * c3,  -c1 * s3, -s1 * c2,
    ];
    let entries: Vec<C64> = rows.iter().map(|&x| c(x, 0.0)).collect();
    UnitaryMatrix::from_matrix_unchecked(CMatrix::from_row_slice(4, 4, &entries))
}

/// Frame rotation whose rows are `Φⱼ†`, so that `Φⱼ ↦ |j⟩`.
pub fn general_basis_rotation(basis: &PreferredBasis) -> Result<UnitaryMatrix> {
    let mut m = CMatrix::zeros(4, 4);
    for (j, v) in basis.vectors().iter().enumerate() {
        m.set_row(j, &v.adjoint());
    }
    UnitaryMatrix::new(m)
}

/// Permutation matrix with `P|k⟩ = |σ(k)⟩`.
pub fn permutation_matrix(sigma: &[usize]) -> Result<UnitaryMatrix> {
    let n = sigma.len();
    let mut seen = vec![false; n];
    for &s in sigma {
        if s >= n || seen[s] {
            return Err(Error::InvalidParameter(format!(
                "{sigma:?} is not a permutation"
            )));
        }
        seen[s] = true;
    }
    let mut m = CMatrix::zeros(n, n);
    for (k, &s) in sigma.iter().enumerate() {
        m[(s, k)] = c(1.0, 0.0);
    }
    Ok(UnitaryMatrix::from_matrix_unchecked(m))
}

fn check_dim(u: &UnitaryMatrix, d: usize) -> Result<()> {
    if u.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: u.dim(),
        });
    }
    Ok(())
}

fn check_three_qubits(psi: &PureState) -> Result<()> {
    if psi.n_qubits() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            found: psi.dim(),
        });
    }
    Ok(())
}

/// Full output state `U_A(φ₁) ⊗ R⁻¹P†U_BC(φ₂)PR |ξ⟩`, built from the dense
/// 8×8 operator.
pub fn output_state(
    xi: &PureState,
    phi1: f64,
    phi2: f64,
    r: &UnitaryMatrix,
    perm: &UnitaryMatrix,
) -> Result<PureState> {
    check_three_qubits(xi)?;
    check_dim(r, 4)?;
    check_dim(perm, 4)?;
    let pr = perm.entries() * r.entries();
    let bc = pr.adjoint() * transducer_bc(phi2).entries() * &pr;
    let full = tensor_product(transducer(phi1).entries(), &bc);
    Ok(PureState::from_vector_unchecked(full * xi.as_vector()))
}

fn check_ports(i: usize, j: usize) -> Result<()> {
    if i > 1 {
        return Err(Error::PortOutOfRange(i));
    }
    if j > 3 {
        return Err(Error::PortOutOfRange(j));
    }
    Ok(())
}

/// `|⟨i|⟨j| (1 ⊗ frame) |out⟩|²`; `frame` is the rotation into the
/// measurement basis (`P·R` or [`general_basis_rotation`]).
pub fn joint_probability(out: &PureState, i: usize, j: usize, frame: &UnitaryMatrix) -> Result<f64> {
    check_three_qubits(out)?;
    check_dim(frame, 4)?;
    check_ports(i, j)?;
    let amp: C64 = (0..4)
        .map(|k| frame.entries()[(j, k)] * out.amplitude(4 * i + k))
        .sum();
    Ok(amp.norm_sqr())
}

/// Detection probability of particle A at port `i`.
pub fn single_probability(out: &PureState, i: usize) -> Result<f64> {
    check_three_qubits(out)?;
    check_ports(i, 0)?;
    Ok((0..4).map(|k| out.amplitude(4 * i + k).norm_sqr()).sum())
}

/// How phases are swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    /// `φ₁ = φ₂`
    #[default]
    Locked,
    /// Full product grid over `(φ₁, φ₂)`.
    Independent,
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepMode::Locked => "locked",
            SweepMode::Independent => "independent",
        })
    }
}

impl FromStr for SweepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "locked" => Ok(SweepMode::Locked),
            "independent" => Ok(SweepMode::Independent),
            other => Err(Error::InvalidParameter(format!("unknown sweep mode '{other}'"))),
        }
    }
}

/// Uniform phase samples over `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseGrid {
    phi1_values: Vec<f64>,
    phi2_values: Vec<f64>,
    mode: SweepMode,
}

fn uniform(n: usize) -> Result<Vec<f64>> {
    if n < MIN_PHASE_POINTS {
        return Err(Error::InvalidGrid(format!(
            "{n} points per axis, at least {MIN_PHASE_POINTS} required"
        )));
    }
    Ok((0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect())
}

impl PhaseGrid {
    pub fn locked(n: usize) -> Result<Self> {
        let v = uniform(n)?;
        Ok(Self {
            phi1_values: v.clone(),
            phi2_values: v,
            mode: SweepMode::Locked,
        })
    }

    pub fn independent(n1: usize, n2: usize) -> Result<Self> {
        Ok(Self {
            phi1_values: uniform(n1)?,
            phi2_values: uniform(n2)?,
            mode: SweepMode::Independent,
        })
    }

    /// `n` points per axis in the given mode.
    pub fn new(mode: SweepMode, n: usize) -> Result<Self> {
        match mode {
            SweepMode::Locked => Self::locked(n),
            SweepMode::Independent => Self::independent(n, n),
        }
    }

    pub fn mode(&self) -> SweepMode {
        self.mode
    }

    pub fn phi1_values(&self) -> &[f64] {
        &self.phi1_values
    }

    pub fn phi2_values(&self) -> &[f64] {
        &self.phi2_values
    }

    pub fn spacing1(&self) -> f64 {
        2.0 * PI / self.phi1_values.len() as f64
    }

    pub fn spacing2(&self) -> f64 {
        2.0 * PI / self.phi2_values.len() as f64
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        match self.mode {
            SweepMode::Locked => self.phi1_values.len(),
            SweepMode::Independent => self.phi1_values.len() * self.phi2_values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point `k`; in independent mode `φ₁` is the slow index.
    pub fn point(&self, k: usize) -> (f64, f64) {
        match self.mode {
            SweepMode::Locked => (self.phi1_values[k], self.phi1_values[k]),
            SweepMode::Independent => {
                let n2 = self.phi2_values.len();
                (self.phi1_values[k / n2], self.phi2_values[k % n2])
            }
        }
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }
}

/// Detection probabilities at one phase setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSample {
    pub phi1: f64,
    pub phi2: f64,
    /// `p(i, j)` at index `4i + j`.
    pub joint: [f64; 8],
    pub single_a: [f64; 2],
    pub single_bc: [f64; 4],
    /// `p̄(i, j)` for the support ports, at index `2i + j`.
    pub corrected: [f64; 4],
}

impl GridSample {
    fn from_joint(phi1: f64, phi2: f64, joint: [f64; 8]) -> Self {
        let single_a = [
            joint[0..4].iter().sum::<f64>(),
            joint[4..8].iter().sum::<f64>(),
        ];
        let single_bc: [f64; 4] = std::array::from_fn(|j| joint[j] + joint[4 + j]);
        let corrected =
            std::array::from_fn(|k| joint[4 * (k / 2) + k % 2] - single_a[k / 2] * single_bc[k % 2] + 0.25);
        Self {
            phi1,
            phi2,
            joint,
            single_a,
            single_bc,
            corrected,
        }
    }

    pub fn joint(&self, i: usize, j: usize) -> f64 {
        self.joint[4 * i + j]
    }

    /// `p(i, j) − p_A(i) p_BC(j) + 1/4` for any BC port.
    pub fn corrected_port(&self, i: usize, j: usize) -> f64 {
        self.joint(i, j) - self.single_a[i] * self.single_bc[j] + 0.25
    }
}

/// Input already rotated into the measurement frame.
#[derive(Debug, Clone, PartialEq)]
enum Source {
    Pure(CVector),
    Mixed(CMatrix),
}

impl Source {
    fn sample(&self, phi1: f64, phi2: f64) -> GridSample {
        let joint = match self {
            Source::Pure(v) => pure_probabilities(v, phi1, phi2),
            Source::Mixed(rho) => mixed_probabilities(rho, phi1, phi2),
        };
        GridSample::from_joint(phi1, phi2, joint)
    }
}

/// Applies `U(φ₁)` to qubit A and `U(φ₂)` to the last qubit of a frame state;
/// this is `U_A ⊗ U_BC` for the block-equal transducer.
fn pure_probabilities(v: &CVector, phi1: f64, phi2: f64) -> [f64; 8] {
    let u1 = transducer_entries(phi1);
    let u2 = transducer_entries(phi2);
    let mut a = [C64::default(); 8];
    for k in 0..4 {
        let (x0, x1) = (v[k], v[4 + k]);
        a[k] = u1[(0, 0)] * x0 + u1[(0, 1)] * x1;
        a[4 + k] = u1[(1, 0)] * x0 + u1[(1, 1)] * x1;
    }
    let mut p = [0.0; 8];
    for base in [0, 2, 4, 6] {
        let (x0, x1) = (a[base], a[base + 1]);
        p[base] = (u2[(0, 0)] * x0 + u2[(0, 1)] * x1).norm_sqr();
        p[base + 1] = (u2[(1, 0)] * x0 + u2[(1, 1)] * x1).norm_sqr();
    }
    p
}

fn mixed_probabilities(rho: &CMatrix, phi1: f64, phi2: f64) -> [f64; 8] {
    let i2 = CMatrix::identity(2, 2);
    let w = tensor_product(
        &tensor_product(&transducer_entries(phi1), &i2),
        &transducer_entries(phi2),
    );
    let wr = &w * rho;
    std::array::from_fn(|k| {
        (0..8)
            .map(|b| wr[(k, b)] * w[(k, b)].conj())
            .sum::<C64>()
            .re
    })
}

fn frame_operator(frame: &UnitaryMatrix) -> Result<CMatrix> {
    check_dim(frame, 4)?;
    Ok(tensor_product(&CMatrix::identity(2, 2), frame.entries()))
}

/// `(1 ⊗ frame)|ξ⟩`
pub fn frame_state(xi: &PureState, frame: &UnitaryMatrix) -> Result<CVector> {
    check_three_qubits(xi)?;
    Ok(frame_operator(frame)? * xi.as_vector())
}

/// Sampled interferogram together with the frame-rotated input, so that the
/// pattern can be re-evaluated off the grid.
#[derive(Debug, Clone)]
pub struct Interferogram {
    grid: PhaseGrid,
    samples: Vec<GridSample>,
    source: Source,
}

impl Interferogram {
    fn build(grid: &PhaseGrid, source: Source) -> Self {
        let samples = (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let (p1, p2) = grid.point(k);
                source.sample(p1, p2)
            })
            .collect();
        Self {
            grid: grid.clone(),
            samples,
            source,
        }
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[GridSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Probabilities at an arbitrary phase setting.
    pub fn evaluate(&self, phi1: f64, phi2: f64) -> GridSample {
        self.source.sample(phi1, phi2)
    }

    pub fn joint(&self, k: usize, i: usize, j: usize) -> f64 {
        self.samples[k].joint(i, j)
    }

    pub fn single_a(&self, k: usize, i: usize) -> f64 {
        self.samples[k].single_a[i]
    }

    pub fn corrected(&self, k: usize, i: usize, j: usize) -> f64 {
        self.samples[k].corrected[2 * i + j]
    }

    /// Refined `(max, min)` of a signal over the swept phases.
    pub fn extrema(&self, signal: impl Fn(&GridSample) -> f64 + Sync) -> (f64, f64) {
        let values: Vec<f64> = self.samples.iter().map(&signal).collect();
        let negated: Vec<f64> = values.iter().map(|v| -v).collect();
        let g = &self.grid;
        match g.mode {
            SweepMode::Locked => {
                let f = |phi: f64| signal(&self.evaluate(phi, phi));
                let max = refine_max_1d(f, &g.phi1_values, &values, g.spacing1());
                let min = -refine_max_1d(|phi| -f(phi), &g.phi1_values, &negated, g.spacing1());
                (max, min)
            }
            SweepMode::Independent => {
                let f = |x: f64, y: f64| signal(&self.evaluate(x, y));
                let max = refine_max_2d(
                    f,
                    &g.phi1_values,
                    &g.phi2_values,
                    &values,
                    g.spacing1(),
                    g.spacing2(),
                );
                let min = -refine_max_2d(
                    |x, y| -f(x, y),
                    &g.phi1_values,
                    &g.phi2_values,
                    &negated,
                    g.spacing1(),
                    g.spacing2(),
                );
                (max, min)
            }
        }
    }

    /// `(max − min)/(max + min)` of a signal, 0 when the signal vanishes.
    pub fn contrast(&self, signal: impl Fn(&GridSample) -> f64 + Sync) -> f64 {
        let (max, min) = self.extrema(signal);
        fringe_contrast(max, min)
    }
}

pub(crate) fn fringe_contrast(max: f64, min: f64) -> f64 {
    if max + min <= 0.0 {
        0.0
    } else {
        ((max - min) / (max + min)).clamp(0.0, 1.0)
    }
}

/// Sweeps a pure state measured in `basis`.
pub fn sweep_interferogram(xi: &PureState, basis: &PreferredBasis, grid: &PhaseGrid) -> Result<Interferogram> {
    sweep_with_frame(xi, &general_basis_rotation(basis)?, grid)
}

/// Sweeps a pure state measured in the frame given by `frame` (for example
/// `P·R`).
pub fn sweep_with_frame(xi: &PureState, frame: &UnitaryMatrix, grid: &PhaseGrid) -> Result<Interferogram> {
    Ok(Interferogram::build(grid, Source::Pure(frame_state(xi, frame)?)))
}

/// Sweeps a three-qubit density matrix.
pub fn sweep_mixed(rho: &DensityMatrix, frame: &UnitaryMatrix, grid: &PhaseGrid) -> Result<Interferogram> {
    if rho.n_qubits() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            found: rho.dim(),
        });
    }
    let f = frame_operator(frame)?;
    let rotated = &f * rho.entries() * f.adjoint();
    Ok(Interferogram::build(grid, Source::Mixed(rotated)))
}

/// Visibility of the detection probability of particle A at port `i`.
pub fn visibility_single(ig: &Interferogram, i: usize) -> Result<f64> {
    check_ports(i, 0)?;
    Ok(ig.contrast(|s| s.single_a[i]))
}

/// Visibility of the corrected joint probability `p̄(i, j)`; `j` must be a
/// support port.
pub fn visibility_two_party(ig: &Interferogram, i: usize, j: usize) -> Result<f64> {
    check_ports(i, j)?;
    if j > 1 {
        return Err(Error::OutsideSupport(j));
    }
    Ok(ig.contrast(|s| s.corrected[2 * i + j]))
}

/// Visibility of `p̄(i, j)` for any BC port, including the two outside the
/// support.
pub fn port_visibility(ig: &Interferogram, i: usize, j: usize) -> Result<f64> {
    check_ports(i, j)?;
    Ok(ig.contrast(|s| s.corrected_port(i, j)))
}

/// Two-party visibility along a direction `m = Σ cᵢ Φᵢ` of the BC space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtendedVisibility {
    /// `Σ |cᵢ|² V⁽ⁱ⁾`
    pub weighted: f64,
    /// `V⁽ⁱ⁾` measured at BC port `i` of the preferred basis.
    pub per_port: [f64; 4],
    /// Visibility at port 0 of a frame whose first vector is `m` itself.
    pub coherent: f64,
}

const COEFF_NORM_TOL: f64 = 1e-10;

/// Extended-basis visibility of `xi` along `Σ cᵢ Φᵢ`, `Φ` being the
/// preferred basis of `xi`.
pub fn extended_basis_visibility(xi: &PureState, coeffs: &[C64; 4], grid: &PhaseGrid) -> Result<ExtendedVisibility> {
    let basis = crate::entanglement::preferred_basis(xi)?;
    extended_visibility_in(xi, &basis, coeffs, grid)
}

/// As [`extended_basis_visibility`] with an explicit basis `Φ`.
pub fn extended_visibility_in(
    xi: &PureState,
    basis: &PreferredBasis,
    coeffs: &[C64; 4],
    grid: &PhaseGrid,
) -> Result<ExtendedVisibility> {
    check_coeffs(coeffs)?;
    let per_port = port_visibilities(&sweep_interferogram(xi, basis, grid)?, 0)?;
    Ok(ExtendedVisibility {
        weighted: weighted_visibility(coeffs, &per_port),
        per_port,
        coherent: coherent_visibility(xi, basis, coeffs, grid)?,
    })
}

fn check_coeffs(coeffs: &[C64; 4]) -> Result<()> {
    let norm: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > COEFF_NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    Ok(())
}

/// `V⁽ʲ⁾` of `p̄(i, j)` for all four BC ports.
pub fn port_visibilities(ig: &Interferogram, i: usize) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (j, v) in out.iter_mut().enumerate() {
        *v = port_visibility(ig, i, j)?;
    }
    Ok(out)
}

/// `Σ |cᵢ|² V⁽ⁱ⁾`
pub fn weighted_visibility(coeffs: &[C64; 4], per_port: &[f64; 4]) -> f64 {
    coeffs
        .iter()
        .zip(per_port.iter())
        .map(|(c, v)| c.norm_sqr() * v)
        .sum()
}

/// Visibility of `p̄(0, 0)` in a frame whose first vector is `Σ cᵢ Φᵢ`,
/// completed by Gram–Schmidt over `Φ₀ … Φ₃`.
pub fn coherent_visibility(
    xi: &PureState,
    basis: &PreferredBasis,
    coeffs: &[C64; 4],
    grid: &PhaseGrid,
) -> Result<f64> {
    check_coeffs(coeffs)?;
    let m = basis
        .vectors()
        .iter()
        .zip(coeffs.iter())
        .fold(CVector::zeros(4), |acc, (v, c)| acc + v * *c);
    let frame = completed_basis(m, basis)?;
    visibility_two_party(&sweep_interferogram(xi, &frame, grid)?, 0, 0)
}

/// Gram–Schmidt over `m, Φ₀, Φ₁, Φ₂, Φ₃`, keeping the first four
/// independent vectors.
fn completed_basis(m: CVector, basis: &PreferredBasis) -> Result<PreferredBasis> {
    let mut out: Vec<CVector> = Vec::with_capacity(4);
    for v in std::iter::once(m).chain(basis.vectors().iter().cloned()) {
        let mut w = v;
        for u in &out {
            let proj = u.dotc(&w);
            w -= u * proj;
        }
        let n = w.norm();
        if n > 1e-6 && out.len() < 4 {
            out.push(w / c(n, 0.0));
        }
    }
    let vectors: [CVector; 4] = out
        .try_into()
        .map_err(|_| Error::InvalidParameter("could not complete basis".into()))?;
    PreferredBasis::from_vectors(vectors, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::{
        concurrence_bipartition, preferred_basis, single_visibility_direct, table_basis, theta_angles,
    };
    use crate::prep::{ghz_state, random_pure_state, w_state, FamilyParams};
    use crate::quantum::apply_full;
    use crate::StateClassTag;
    use proptest::prelude::*;

    fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn real(rows: usize, v: &[f64]) -> CMatrix {
        let e: Vec<C64> = v.iter().map(|&x| c(x, 0.0)).collect();
        CMatrix::from_row_slice(rows, rows, &e)
    }

    #[test]
    fn transducer_examples() {
        let h = FRAC_1_SQRT_2;
        assert!(max_diff(transducer(0.0).entries(), &real(2, &[h, h, -h, h])) < 1e-15);
        let expected = CMatrix::from_row_slice(2, 2, &[c(0.0, -h), c(0.0, h), c(0.0, h), c(0.0, h)]);
        assert!(max_diff(transducer(PI).entries(), &expected) < 1e-15);
        for k in 0..8 {
            let u = transducer(0.7 * k as f64 - 1.0);
            assert!((u.entries().determinant().norm() - 1.0).abs() < 1e-12);
            assert!(u.unitarity_deviation() < 1e-12);
        }
    }

    #[test]
    fn transducer_bc_blocks() {
        let h = FRAC_1_SQRT_2;
        let u0 = transducer_bc(0.0);
        #[rustfmt::skip]
        let expected = real(4, &[
            h, h, 0.0, 0.0,
            -h, h, 0.0, 0.0,
            0.0, 0.0, h, h,
            0.0, 0.0, -h, h,
        ]);
        assert!(max_diff(u0.entries(), &expected) < 1e-15);
        for k in 0..8 {
            let phi = 2.0 * PI * k as f64 / 8.0 + 0.1;
            let u = transducer_bc(phi);
            assert!(u.unitarity_deviation() < 1e-12);
            let block = u.entries().view((0, 0), (2, 2)).into_owned();
            assert!(max_diff(&block, transducer(phi).entries()) < 1e-15);
        }
    }

    #[test]
    fn general_transducer_reproduces_block_equal_form() {
        for k in 0..8 {
            let phi = 0.83 * k as f64 - 2.0;
            let g = transducer_bc_general(phi, phi / 2.0, PI / 2.0, PI - phi / 2.0);
            assert!(g.unitarity_deviation() < 1e-12);
            assert!(max_diff(g.entries(), transducer_bc(phi).entries()) < 1e-14);
        }
    }

    #[test]
    fn beta_equal_minus_delta_flips_lower_off_diagonal() {
        let phi = 0.9;
        let g = transducer_bc_general(phi, phi / 2.0, PI / 2.0, -phi / 2.0);
        let u = transducer_bc(phi);
        for (r, col) in [(2, 2), (3, 3)] {
            assert!((g.entries()[(r, col)] - u.entries()[(r, col)]).norm() < 1e-14);
        }
        for (r, col) in [(2, 3), (3, 2)] {
            assert!((g.entries()[(r, col)] + u.entries()[(r, col)]).norm() < 1e-14);
        }
    }

    #[test]
    fn rotation_at_zero_is_cnot() {
        let r = basis_rotation_r(&ThetaAngles::default());
        #[rustfmt::skip]
        let cnot = real(4, &[
            1.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
            0.0, 0.0, 1.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
        ]);
        assert_eq!(r.entries(), &cnot);
    }

    proptest! {
        #[test]
        fn rotation_is_orthogonal_and_maps_phi0(
            t1 in -7.0f64..7.0, t2 in -7.0f64..7.0, t3 in -7.0f64..7.0
        ) {
            let t = ThetaAngles::new(t1, t2, t3);
            let r = basis_rotation_r(&t);
            prop_assert!(r.unitarity_deviation() < 1e-12);
            let (c1, s1) = ((t1 / 2.0).cos(), (t1 / 2.0).sin());
            let (c2, s2) = ((t2 / 2.0).cos(), (t2 / 2.0).sin());
            let (c3, s3) = ((t3 / 2.0).cos(), (t3 / 2.0).sin());
            // cos(θ₁/2)(cos(θ₂/2)|00⟩ + sin(θ₂/2)|11⟩) + sin(θ₁/2)(sin(θ₃/2)|01⟩ + cos(θ₃/2)|10⟩)
            let phi0 = CVector::from_vec(
                [c1 * c2, s1 * s3, s1 * c3, c1 * s2].iter().map(|&x| c(x, 0.0)).collect(),
            );
            let image = r.entries() * phi0;
            prop_assert!((image[0] - c(1.0, 0.0)).norm() < 1e-12);
            for k in 1..4 {
                prop_assert!(image[k].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn last_row_sign_is_needed_for_orthogonality() {
        let (c1, s1) = (0.6f64, 0.8f64);
        // rows 1 and 3 with the sign of the s₁ entries of row 3 flipped back
        let row1 = [0.0, s1, 0.0, c1];
        let flipped = [0.0, c1, 0.0, s1];
        let dot: f64 = row1.iter().zip(flipped).map(|(a, b)| a * b).sum();
        assert!((dot - 2.0 * s1 * c1).abs() < 1e-15);
        let t = ThetaAngles::new(2.0 * s1.atan2(c1), 0.0, 0.0);
        assert!(basis_rotation_r(&t).unitarity_deviation() < 1e-15);
    }

    #[test]
    fn general_rotation_of_computational_basis_is_identity() {
        let m = general_basis_rotation(&PreferredBasis::computational()).unwrap();
        assert!(max_diff(m.entries(), &CMatrix::identity(4, 4)) < 1e-15);
    }

    #[test]
    fn ghz_general_rotation_matches_cnot_on_support() {
        let basis = preferred_basis(&ghz_state(PI / 2.0)).unwrap();
        let m = general_basis_rotation(&basis).unwrap();
        let r = basis_rotation_r(&ThetaAngles::default());
        let sigma = crate::entanglement::table_permutation(StateClassTag::Ghz).unwrap();
        let pr = permutation_matrix(&sigma).unwrap().entries() * r.entries();
        for k in [0usize, 3] {
            let mut e = CVector::zeros(4);
            e[k] = c(1.0, 0.0);
            let a = m.entries() * &e;
            let b = &pr * &e;
            assert!((a - b).norm() < 1e-12, "column {k}");
        }
    }

    #[test]
    fn general_rotation_agrees_with_closed_form_up_to_row_sign() {
        let cases = [
            (StateClassTag::Ghz, FamilyParams::ghz(1.1)),
            (StateClassTag::W, FamilyParams::w(1.1, 0.7)),
            (StateClassTag::Intermediate, FamilyParams::intermediate(PI / 3.0, PI / 2.0, PI / 3.0)),
        ];
        for (class, p) in cases {
            let table = general_basis_rotation(&table_basis(&p, class).unwrap()).unwrap();
            let r = basis_rotation_r(&theta_angles(&p, class).unwrap());
            let sigma = crate::entanglement::table_permutation(class).unwrap();
            let pr = permutation_matrix(&sigma).unwrap().entries() * r.entries();
            for row in 0..4 {
                let a = table.entries().row(row).into_owned();
                let b = pr.row(row).into_owned();
                let d = (&a - &b).norm().min((&a + &b).norm());
                assert!(d < 1e-12, "{class} row {row}");
            }
        }
    }

    #[test]
    fn permutation_validation() {
        assert!(permutation_matrix(&[0, 0, 1, 2]).is_err());
        assert!(permutation_matrix(&[0, 1, 2, 4]).is_err());
        let p = permutation_matrix(&[1, 2, 3, 0]).unwrap();
        assert_eq!(p.entries()[(1, 0)], c(1.0, 0.0));
        assert!(p.unitarity_deviation() < 1e-15);
    }

    #[test]
    fn output_state_of_ground_state() {
        let xi = PureState::basis(3, 0);
        let id = UnitaryMatrix::identity(4);
        let out = output_state(&xi, 0.0, 0.0, &id, &id).unwrap();
        // (|0⟩ − |1⟩)_A (|00⟩ − |01⟩)_BC / 2
        let expected = [0.5, -0.5, 0.0, 0.0, -0.5, 0.5, 0.0, 0.0];
        for (k, &e) in expected.iter().enumerate() {
            assert!((out.amplitude(k) - c(e, 0.0)).norm() < 1e-15, "amplitude {k}");
        }
    }

    #[test]
    fn output_state_rejects_bad_dimensions() {
        let xi = PureState::basis(3, 0);
        let id4 = UnitaryMatrix::identity(4);
        assert!(output_state(&xi, 0.0, 0.0, &UnitaryMatrix::identity(2), &id4).is_err());
        assert!(output_state(&PureState::basis(2, 0), 0.0, 0.0, &id4, &id4).is_err());
        let out = output_state(&xi, 0.0, 0.0, &id4, &id4).unwrap();
        assert!(matches!(joint_probability(&out, 2, 0, &id4), Err(Error::PortOutOfRange(2))));
        assert!(matches!(joint_probability(&out, 0, 4, &id4), Err(Error::PortOutOfRange(4))));
        assert!(single_probability(&out, 2).is_err());
    }

    // eigenbasis of a generic ρ_BC, an arbitrary 4×4 unitary for these checks
    fn random_unitary4(seed: u64) -> UnitaryMatrix {
        general_basis_rotation(&preferred_basis(&random_pure_state(seed, 3)).unwrap()).unwrap()
    }

    #[test]
    fn fast_path_matches_dense_pipeline() {
        for seed in 0..10u64 {
            let xi = random_pure_state(seed, 3);
            let r = random_unitary4(100 + seed);
            let perm = permutation_matrix(&[1, 3, 0, 2]).unwrap();
            let frame = perm.compose(&r).unwrap();
            let fs = frame_state(&xi, &frame).unwrap();
            for (phi1, phi2) in [(0.0, 0.0), (0.4, 2.1), (-1.3, 5.0)] {
                let out = output_state(&xi, phi1, phi2, &r, &perm).unwrap();
                assert!((out.norm() - 1.0).abs() < 1e-12);
                let fast = pure_probabilities(&fs, phi1, phi2);
                let mut total = 0.0;
                for i in 0..2 {
                    let mut marginal = 0.0;
                    for j in 0..4 {
                        let p = joint_probability(&out, i, j, &frame).unwrap();
                        assert!((p - fast[4 * i + j]).abs() < 1e-13);
                        marginal += p;
                        total += p;
                    }
                    assert!((single_probability(&out, i).unwrap() - marginal).abs() < 1e-12);
                }
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn block_swap_permutation_leaves_output_unchanged() {
        let swap = permutation_matrix(&[2, 3, 0, 1]).unwrap();
        let inner = permutation_matrix(&[1, 0, 2, 3]).unwrap();
        let id = UnitaryMatrix::identity(4);
        let mut inner_differs = false;
        for seed in 0..10u64 {
            let xi = random_pure_state(seed, 3);
            let r = random_unitary4(200 + seed);
            let a = output_state(&xi, 0.3, 1.7, &r, &id).unwrap();
            let b = output_state(&xi, 0.3, 1.7, &r, &swap).unwrap();
            assert!((a.as_vector() - b.as_vector()).norm() < 1e-12);
            let d = output_state(&xi, 0.3, 1.7, &r, &inner).unwrap();
            inner_differs |= (a.as_vector() - d.as_vector()).norm() > 1e-6;
        }
        assert!(inner_differs);
    }

    #[test]
    fn output_state_agrees_with_apply_full() {
        let xi = random_pure_state(5, 3);
        let r = random_unitary4(9);
        let id = UnitaryMatrix::identity(4);
        let out = output_state(&xi, 1.0, 2.0, &r, &id).unwrap();
        let bc = r.adjoint().compose(&transducer_bc(2.0)).unwrap().compose(&r).unwrap();
        let full = transducer(1.0).tensor(&bc);
        let other = apply_full(&xi, &full).unwrap();
        assert!((out.as_vector() - other.as_vector()).norm() < 1e-13);
    }

    #[test]
    fn single_probability_examples() {
        let id = UnitaryMatrix::identity(4);
        let out = output_state(&PureState::basis(3, 0), 0.0, 0.0, &id, &id).unwrap();
        assert!((single_probability(&out, 0).unwrap() - 0.5).abs() < 1e-15);
        assert!((single_probability(&out, 1).unwrap() - 0.5).abs() < 1e-15);
        let ghz = ghz_state(PI / 2.0);
        for k in 0..12 {
            let out = output_state(&ghz, 0.5 * k as f64, 0.0, &id, &id).unwrap();
            assert!((single_probability(&out, 0).unwrap() - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn grid_construction() {
        assert!(PhaseGrid::locked(15).is_err());
        let g = PhaseGrid::locked(16).unwrap();
        assert_eq!(g.len(), 16);
        assert!((g.spacing1() - PI / 8.0).abs() < 1e-15);
        assert!(g.phi1_values().windows(2).all(|w| w[1] > w[0]));
        assert!(*g.phi1_values().last().unwrap() < 2.0 * PI);
        let g2 = PhaseGrid::independent(16, 20).unwrap();
        assert_eq!(g2.len(), 320);
        assert_eq!(g2.point(21), (g2.phi1_values()[1], g2.phi2_values()[1]));
        assert_eq!("Independent".parse::<SweepMode>().unwrap(), SweepMode::Independent);
        assert!("diagonal".parse::<SweepMode>().is_err());
    }

    #[test]
    fn product_state_corrected_is_flat() {
        let xi = PureState::basis(3, 0);
        let grid = PhaseGrid::independent(24, 24).unwrap();
        let ig = sweep_interferogram(&xi, &PreferredBasis::computational(), &grid).unwrap();
        for s in ig.samples() {
            for v in s.corrected {
                assert!((v - 0.25).abs() < 1e-12);
            }
        }
        assert!(visibility_two_party(&ig, 0, 0).unwrap() < 1e-12);
    }

    #[test]
    fn interferogram_invariants_on_random_states() {
        let grid = PhaseGrid::independent(20, 20).unwrap();
        for seed in 0..5u64 {
            let xi = random_pure_state(seed, 3);
            let ig = sweep_interferogram(&xi, &preferred_basis(&xi).unwrap(), &grid).unwrap();
            assert_eq!(ig.len(), grid.len());
            for s in ig.samples() {
                assert!((s.joint.iter().sum::<f64>() - 1.0).abs() < 1e-10);
                for i in 0..2 {
                    let m: f64 = (0..4).map(|j| s.joint(i, j)).sum();
                    assert!((s.single_a[i] - m).abs() < 1e-12);
                }
                for v in s.corrected {
                    assert!((-1e-12..=0.5 + 1e-12).contains(&v));
                }
            }
        }
    }

    #[test]
    fn ghz_locked_fringe_spans_zero_to_half() {
        let xi = ghz_state(PI / 2.0);
        let grid = PhaseGrid::locked(360).unwrap();
        let ig = sweep_interferogram(&xi, &preferred_basis(&xi).unwrap(), &grid).unwrap();
        let (max, min) = ig.extrema(|s| s.corrected[0]);
        assert!((max - 0.5).abs() < 1e-12 && min.abs() < 1e-12, "{max} {min}");
        assert!((visibility_two_party(&ig, 0, 0).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn locked_sweep_is_phase_covariant() {
        let xi = random_pure_state(3, 3);
        let grid = PhaseGrid::locked(36).unwrap();
        let ig = sweep_interferogram(&xi, &preferred_basis(&xi).unwrap(), &grid).unwrap();
        let shift = grid.spacing1() * 5.0;
        for k in 0..grid.len() {
            let (p, _) = grid.point(k);
            let shifted = ig.evaluate(p + shift, p + shift);
            let expected = ig.samples()[(k + 5) % grid.len()];
            for (a, b) in shifted.joint.iter().zip(expected.joint.iter()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_visibility_examples() {
        let grid = PhaseGrid::locked(360).unwrap();
        let basis = PreferredBasis::computational();
        let t = PI / 8.0;
        let tilted = PureState::from_real(&[t.cos(), 0.0, 0.0, 0.0, t.sin(), 0.0, 0.0, 0.0]).unwrap();
        let ig = sweep_interferogram(&tilted, &basis, &grid).unwrap();
        assert!((visibility_single(&ig, 0).unwrap() - (PI / 4.0).sin()).abs() < 1e-9);
        let h = FRAC_1_SQRT_2;
        let plus = PureState::from_real(&[h, 0.0, 0.0, 0.0, h, 0.0, 0.0, 0.0]).unwrap();
        let ig = sweep_interferogram(&plus, &basis, &grid).unwrap();
        assert!((visibility_single(&ig, 0).unwrap() - 1.0).abs() < 1e-9);
        let ig = sweep_interferogram(&ghz_state(1.0), &basis, &grid).unwrap();
        assert!(visibility_single(&ig, 1).unwrap() < 1e-12);
    }

    #[test]
    fn two_party_visibility_rejects_non_support_ports() {
        let xi = ghz_state(PI / 2.0);
        let ig = sweep_interferogram(&xi, &preferred_basis(&xi).unwrap(), &PhaseGrid::locked(16).unwrap()).unwrap();
        assert!(matches!(visibility_two_party(&ig, 0, 2), Err(Error::OutsideSupport(2))));
        assert!(matches!(visibility_two_party(&ig, 0, 3), Err(Error::OutsideSupport(3))));
        assert!(matches!(visibility_two_party(&ig, 2, 0), Err(Error::PortOutOfRange(2))));
        assert!(port_visibility(&ig, 0, 2).unwrap() < 1e-12);
    }

    #[test]
    fn w_two_party_visibility_equals_concurrence() {
        let xi = w_state(PI / 3.0, PI / 2.0);
        let grid = PhaseGrid::independent(48, 48).unwrap();
        let ig = sweep_interferogram(&xi, &preferred_basis(&xi).unwrap(), &grid).unwrap();
        let v = visibility_two_party(&ig, 0, 0).unwrap();
        assert!((v - (PI / 3.0).sin()).abs() < 1e-9, "{v}");
    }

    #[test]
    fn random_states_match_oracles_in_independent_mode() {
        let grid = PhaseGrid::independent(32, 32).unwrap();
        for seed in 0..8u64 {
            let xi = random_pure_state(1000 + seed, 3);
            let ig = sweep_interferogram(&xi, &preferred_basis(&xi).unwrap(), &grid).unwrap();
            let c2 = concurrence_bipartition(&xi, 0).unwrap();
            let v2 = visibility_two_party(&ig, 0, 0).unwrap();
            assert!((v2 - c2).abs() < 1e-7, "seed {seed}: {v2} vs {c2}");
            let v1 = visibility_single(&ig, 0).unwrap();
            let direct = single_visibility_direct(&xi, 0).unwrap();
            assert!((v1 - direct).abs() < 1e-7, "seed {seed}: {v1} vs {direct}");
        }
    }

    #[test]
    fn extended_visibility_reduces_on_basis_vectors() {
        let xi = ghz_state(PI / 2.0);
        let grid = PhaseGrid::independent(24, 24).unwrap();
        let one = c(1.0, 0.0);
        let zero = C64::default();
        let e = extended_basis_visibility(&xi, &[one, zero, zero, zero], &grid).unwrap();
        assert!((e.weighted - 1.0).abs() < 1e-9);
        assert!((e.coherent - 1.0).abs() < 1e-9);
        let e = extended_basis_visibility(&xi, &[zero, zero, one, zero], &grid).unwrap();
        assert!(e.weighted.abs() < 1e-12);
        assert!(extended_basis_visibility(&xi, &[one, one, zero, zero], &grid).is_err());
    }

    #[test]
    fn mixed_source_matches_pure_source_for_projectors() {
        let xi = random_pure_state(77, 3);
        let basis = preferred_basis(&xi).unwrap();
        let frame = general_basis_rotation(&basis).unwrap();
        let grid = PhaseGrid::locked(20).unwrap();
        let pure = sweep_with_frame(&xi, &frame, &grid).unwrap();
        let mixed = sweep_mixed(&xi.density_matrix(), &frame, &grid).unwrap();
        for (a, b) in pure.samples().iter().zip(mixed.samples()) {
            for (x, y) in a.joint.iter().zip(b.joint.iter()) {
                assert!((x - y).abs() < 1e-14);
            }
        }
    }
}
