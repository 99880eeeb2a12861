//! Direct quantifiers computed from reduced density matrices.
//!
//! These are the reference values the interferometer is checked against:
//! concurrence of one qubit with the rest, predictability, single-particle
//! visibility and character, the preferred BC basis, the closed-form basis
//! angles of the three state families, and the Uhlmann fidelity.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::eig::hermitian_eig;
use crate::error::{Error, Result};
use crate::interferometer::basis_rotation_r;
use crate::prep::{FamilyParams, StateClassTag};
use crate::quantum::{pauli_y, reduced_state, tensor_product, CMatrix, CVector, DensityMatrix, PureState};

/// Eigenvalues above this count toward the support of `ρ_BC`.
pub const SUPPORT_TOL: f64 = 1e-10;
const ORTHONORMAL_TOL: f64 = 1e-10;
const SQRT_CLAMP: f64 = 1e-12;

fn check_qubit(psi: &PureState, k: usize) -> Result<()> {
    if k >= psi.n_qubits() {
        return Err(Error::QubitOutOfRange {
            index: k,
            n_qubits: psi.n_qubits(),
        });
    }
    Ok(())
}

fn single_qubit_marginal(psi: &PureState, k: usize) -> Result<CMatrix> {
    check_qubit(psi, k)?;
    Ok(reduced_state(psi, &[k])?.into_entries())
}

/// `√(2[1 − Tr ρ_k²])` for qubit `k` against the rest of a pure state.
pub fn concurrence_bipartition(psi: &PureState, k: usize) -> Result<f64> {
    check_qubit(psi, k)?;
    let purity = reduced_state(psi, &[k])?.purity();
    Ok((2.0 * (1.0 - purity)).max(0.0).sqrt().clamp(0.0, 1.0))
}

/// Wootters concurrence `|⟨ψ|σ_y⊗σ_y|ψ*⟩|` of a two-qubit pure state.
pub fn concurrence_two_qubit(psi: &PureState) -> Result<f64> {
    if psi.n_qubits() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: psi.dim(),
        });
    }
    let yy = tensor_product(&pauli_y(), &pauli_y());
    let conj = psi.as_vector().map(|z| z.conj());
    let value = psi.as_vector().dotc(&(yy * conj));
    Ok(value.norm().clamp(0.0, 1.0))
}

/// `|⟨σ_z⟩|` on qubit `k`.
pub fn predictability(psi: &PureState, k: usize) -> Result<f64> {
    let rho = single_qubit_marginal(psi, k)?;
    Ok((rho[(0, 0)].re - rho[(1, 1)].re).abs().min(1.0))
}

/// `2|ρ_k[0,1]|`, the fringe visibility a phase sweep on qubit `k` would show.
pub fn single_visibility_direct(psi: &PureState, k: usize) -> Result<f64> {
    let rho = single_qubit_marginal(psi, k)?;
    Ok((2.0 * rho[(0, 1)].norm()).min(1.0))
}

/// `√(V² + P²)`
pub fn single_particle_character(psi: &PureState, k: usize) -> Result<f64> {
    let v = single_visibility_direct(psi, k)?;
    let p = predictability(psi, k)?;
    Ok((v * v + p * p).sqrt().min(1.0))
}

/// Ordered orthonormal basis `{Φ₀, Φ₁, Φ₂, Φ₃}` of the BC pair, the first
/// `support_rank` vectors spanning the support of `ρ_BC`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferredBasis {
    vectors: [CVector; 4],
    support_rank: usize,
}

impl PreferredBasis {
    /// Validates orthonormality of a user-supplied basis.
    pub fn from_vectors(vectors: [CVector; 4], support_rank: usize) -> Result<Self> {
        if vectors.iter().any(|v| v.len() != 4) {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: vectors.iter().map(|v| v.len()).find(|&l| l != 4).unwrap_or(0),
            });
        }
        if !(1..=4).contains(&support_rank) {
            return Err(Error::InvalidParameter(format!(
                "support rank {support_rank} outside 1..=4"
            )));
        }
        let mut dev: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((vectors[i].dotc(&vectors[j]) - C64::new(expected, 0.0)).norm());
            }
        }
        if dev > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal(dev));
        }
        Ok(Self {
            vectors,
            support_rank,
        })
    }

    /// Computational basis `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub fn computational() -> Self {
        let e = |k: usize| {
            let mut v = CVector::zeros(4);
            v[k] = C64::new(1.0, 0.0);
            v
        };
        Self {
            vectors: [e(0), e(1), e(2), e(3)],
            support_rank: 2,
        }
    }

    pub fn phi(&self, i: usize) -> &CVector {
        &self.vectors[i]
    }

    pub fn vectors(&self) -> &[CVector; 4] {
        &self.vectors
    }

    pub fn support_rank(&self) -> usize {
        self.support_rank
    }

    /// Largest `⟨Φᵢ|ρ|Φᵢ⟩` over the two non-support vectors.
    pub fn leakage(&self, rho_bc: &CMatrix) -> f64 {
        (2..4)
            .map(|i| self.vectors[i].dotc(&(rho_bc * &self.vectors[i])).re)
            .fold(0.0, f64::max)
    }
}

/// Eigenbasis of `ρ_BC`, eigenvalues descending.
pub fn preferred_basis(psi: &PureState) -> Result<PreferredBasis> {
    if psi.n_qubits() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            found: psi.dim(),
        });
    }
    let rho_bc = reduced_state(psi, &[1, 2])?;
    let eig = hermitian_eig(rho_bc.entries())?;
    let support_rank = eig
        .eigenvalues
        .iter()
        .filter(|&&l| l > SUPPORT_TOL)
        .count()
        .clamp(1, 2);
    Ok(PreferredBasis {
        vectors: [eig.vector(0), eig.vector(1), eig.vector(2), eig.vector(3)],
        support_rank,
    })
}

/// Angles of the general two-qubit form of `Φ₀` used by the basis rotation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ThetaAngles {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl ThetaAngles {
    pub fn new(theta1: f64, theta2: f64, theta3: f64) -> Self {
        Self {
            theta1,
            theta2,
            theta3,
        }
    }
}

/// Nonzero eigenvalues of `ρ_BC` for the intermediate family and the
/// auxiliary quantity `A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntermediateSpectrum {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub a: f64,
}

/// `λ± = (1 ± √(1 − 4A sin²(α₁/2)))/2` with
/// `A = cos²(α₁/2)(cos²(α₂⁽⁰⁾/2) sin²(α₃⁽⁰⁰⁾/2) + sin²(α₂⁽⁰⁾/2))`.
pub fn intermediate_spectrum(p: &FamilyParams) -> IntermediateSpectrum {
    let (c1, s1) = half_angle(p.alpha1);
    let (c2, s2) = half_angle(p.alpha2_0);
    let (_, s3) = half_angle(p.alpha3_00);
    let a = c1 * c1 * (c2 * c2 * s3 * s3 + s2 * s2);
    let disc = (1.0 - 4.0 * a * s1 * s1).max(0.0).sqrt();
    IntermediateSpectrum {
        lambda_plus: 0.5 * (1.0 + disc),
        lambda_minus: 0.5 * (1.0 - disc),
        a,
    }
}

#[inline]
fn half_angle(angle: f64) -> (f64, f64) {
    ((angle / 2.0).cos(), (angle / 2.0).sin())
}

/// Closed-form basis angles for the three named families.
///
/// GHZ gives `(0, 0, 0)` and W gives `(0, 0, −α₂⁽⁰⁾)`. For the intermediate
/// family `tan²(θ₁/2) = (A − λ₋)/(λ₊ − A)`, `θ₂ = 0` and
/// `tan(θ₃/2) = cot(α₂⁽⁰⁾/2) sin(α₃⁽⁰⁰⁾/2)`; the branches are taken with
/// `atan2` so that `Φ₀` is the `λ₊` eigenvector with the sign of the state's
/// own amplitudes.
pub fn theta_angles(p: &FamilyParams, class: StateClassTag) -> Result<ThetaAngles> {
    match class {
        StateClassTag::Ghz => Ok(ThetaAngles::default()),
        StateClassTag::W => Ok(ThetaAngles::new(0.0, 0.0, -p.alpha2_0)),
        StateClassTag::Intermediate => {
            let spec = intermediate_spectrum(p);
            let (c2, s2) = half_angle(p.alpha2_0);
            let (c3, s3) = half_angle(p.alpha3_00);
            // branch amplitudes of |0⟩_A: x|00⟩ + y|01⟩ + z|10⟩
            let x = c2 * c3;
            let y = c2 * s3;
            let z = s2;
            let theta3 = 2.0 * y.atan2(z);
            let num = (spec.a - spec.lambda_minus).max(0.0).sqrt();
            let den = (spec.lambda_plus - spec.a).max(0.0).sqrt();
            let sign = if x < 0.0 { -1.0 } else { 1.0 };
            let theta1 = 2.0 * (sign * num).atan2(den);
            Ok(ThetaAngles::new(theta1, 0.0, theta3))
        }
        StateClassTag::General => Err(Error::UseEigenbasisRoute),
    }
}

/// Row of the basis rotation that the family's `Φ₁` occupies.
pub fn table_phi1_row(class: StateClassTag) -> Result<usize> {
    match class {
        StateClassTag::Ghz => Ok(1),
        StateClassTag::W => Ok(3),
        StateClassTag::Intermediate => Ok(2),
        StateClassTag::General => Err(Error::UseEigenbasisRoute),
    }
}

/// Support vectors `Φ₀, Φ₁` exactly as tabulated for each family.
pub fn table_support_vectors(p: &FamilyParams, class: StateClassTag) -> Result<[CVector; 2]> {
    let v = |a: [f64; 4]| CVector::from_iterator(4, a.iter().map(|&x| C64::new(x, 0.0)));
    match class {
        StateClassTag::Ghz => Ok([v([1.0, 0.0, 0.0, 0.0]), v([0.0, 0.0, 0.0, 1.0])]),
        StateClassTag::W => {
            let (c2, s2) = half_angle(p.alpha2_0);
            Ok([v([1.0, 0.0, 0.0, 0.0]), v([0.0, c2, s2, 0.0])])
        }
        StateClassTag::Intermediate => {
            let t = theta_angles(p, class)?;
            let (c1, s1) = half_angle(t.theta1);
            let (c3, s3) = half_angle(t.theta3);
            Ok([
                v([c1, s1 * s3, s1 * c3, 0.0]),
                v([-s1, c1 * s3, c1 * c3, 0.0]),
            ])
        }
        StateClassTag::General => Err(Error::UseEigenbasisRoute),
    }
}

/// Index permutation `σ` sending row `k` of the family's basis rotation to
/// measurement port `σ[k]`, so that `Φ₀ ↦ 0` and `Φ₁ ↦ 1`.
pub fn table_permutation(class: StateClassTag) -> Result<[usize; 4]> {
    let phi1 = table_phi1_row(class)?;
    let mut sigma = [0usize; 4];
    sigma[phi1] = 1;
    let mut next = 2;
    for (k, slot) in sigma.iter_mut().enumerate().skip(1) {
        if k != phi1 {
            *slot = next;
            next += 1;
        }
    }
    Ok(sigma)
}

/// Full basis from the closed-form rotation: rows of `R(θ)` reordered by
/// [`table_permutation`].
pub fn table_basis(p: &FamilyParams, class: StateClassTag) -> Result<PreferredBasis> {
    let r = basis_rotation_r(&theta_angles(p, class)?);
    let sigma = table_permutation(class)?;
    let mut vectors: [CVector; 4] = std::array::from_fn(|_| CVector::zeros(4));
    for (row, &port) in sigma.iter().enumerate() {
        vectors[port] = r.entries().row(row).adjoint();
    }
    let psi = crate::prep::family_state(class, p);
    let rho_bc = reduced_state(&psi, &[1, 2])?;
    let support_rank = if hermitian_eig(rho_bc.entries())?.eigenvalues[1] > SUPPORT_TOL {
        2
    } else {
        1
    };
    PreferredBasis::from_vectors(vectors, support_rank)
}

/// Uhlmann fidelity `Tr √(√ρ₁ ρ₂ √ρ₁)`.
pub fn fidelity(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho1.dim(),
            found: rho2.dim(),
        });
    }
    let clamp_sqrt = |l: f64| if l < SQRT_CLAMP { 0.0 } else { l.sqrt() };
    let sqrt1 = hermitian_eig(rho1.entries())?.map_spectrum(clamp_sqrt);
    let inner = &sqrt1 * rho2.entries() * &sqrt1;
    let inner = (&inner + inner.adjoint()).scale(0.5);
    let eig = hermitian_eig(&inner)?;
    let f: f64 = eig.eigenvalues.iter().map(|&l| clamp_sqrt(l)).sum();
    Ok(f.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prep::{ghz_state, intermediate_state, pseudopure, random_pure_state, w_state};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8, PI};

    fn product_a(t: f64) -> PureState {
        let mut amps = [0.0; 8];
        amps[0] = t.cos();
        amps[4] = t.sin();
        PureState::from_real(&amps).unwrap()
    }

    /// Equal up to a global phase.
    fn same_ray(a: &CVector, b: &CVector, tol: f64) -> bool {
        (a.dotc(b).norm() - 1.0).abs() < tol && (a.norm() - 1.0).abs() < tol
    }

    #[test]
    fn concurrence_examples() {
        let c = |psi: &PureState| concurrence_bipartition(psi, 0).unwrap();
        assert!(c(&PureState::basis(3, 0)).abs() < 1e-15);
        assert!((c(&ghz_state(FRAC_PI_2)) - 1.0).abs() < 1e-12);
        for a2 in [0.0, 0.7, FRAC_PI_2, 2.5] {
            assert!((c(&w_state(FRAC_PI_3, a2)) - FRAC_PI_3.sin()).abs() < 1e-12);
        }
        assert!(matches!(
            concurrence_bipartition(&PureState::basis(3, 0), 3),
            Err(Error::QubitOutOfRange { .. })
        ));
    }

    #[test]
    fn wootters_examples() {
        let bell = PureState::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap();
        assert!((concurrence_two_qubit(&bell).unwrap() - 1.0).abs() < 1e-15);
        assert!(concurrence_two_qubit(&PureState::basis(2, 1)).unwrap() < 1e-15);
        let t = FRAC_PI_6;
        let psi = PureState::from_real(&[t.cos(), 0.0, 0.0, t.sin()]).unwrap();
        assert!((concurrence_two_qubit(&psi).unwrap() - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!(concurrence_two_qubit(&PureState::basis(3, 0)).is_err());
    }

    #[test]
    fn predictability_examples() {
        assert_eq!(predictability(&PureState::basis(3, 0), 0).unwrap(), 1.0);
        assert!(predictability(&ghz_state(FRAC_PI_2), 0).unwrap() < 1e-15);
        assert!((predictability(&ghz_state(FRAC_PI_3), 0).unwrap() - 0.5).abs() < 1e-15);
        assert!(predictability(&ghz_state(1.0), 5).is_err());
    }

    #[test]
    fn single_visibility_examples() {
        assert!((single_visibility_direct(&product_a(FRAC_PI_4), 0).unwrap() - 1.0).abs() < 1e-15);
        for a1 in [0.3, FRAC_PI_2, 2.0] {
            assert_eq!(single_visibility_direct(&ghz_state(a1), 0).unwrap(), 0.0);
        }
        let v = single_visibility_direct(&product_a(FRAC_PI_8), 0).unwrap();
        assert!((v - FRAC_PI_4.sin()).abs() < 1e-15);
    }

    #[test]
    fn character_examples() {
        assert!((single_particle_character(&PureState::basis(3, 0), 0).unwrap() - 1.0).abs() < 1e-15);
        assert!(single_particle_character(&ghz_state(FRAC_PI_2), 0).unwrap() < 1e-15);
        assert!((single_particle_character(&ghz_state(FRAC_PI_3), 0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn preferred_basis_ghz_and_w() {
        let ghz = preferred_basis(&ghz_state(FRAC_PI_2)).unwrap();
        let [t0, t1] = table_support_vectors(&FamilyParams::ghz(FRAC_PI_2), StateClassTag::Ghz).unwrap();
        assert!(same_ray(ghz.phi(0), &t0, 1e-12));
        assert!(same_ray(ghz.phi(1), &t1, 1e-12));
        assert_eq!(ghz.support_rank(), 2);

        // W with α₁ = π/3: ρ_BC has eigenvalues (3/4, 1/4)
        let p = FamilyParams::w(FRAC_PI_3, FRAC_PI_2);
        let w = preferred_basis(&w_state(p.alpha1, p.alpha2_0)).unwrap();
        let [t0, t1] = table_support_vectors(&p, StateClassTag::W).unwrap();
        // the larger eigenvalue belongs to the W-like vector
        assert!(same_ray(w.phi(0), &t1, 1e-12));
        assert!(same_ray(w.phi(1), &t0, 1e-12));
    }

    #[test]
    fn w_spectrum() {
        let psi = w_state(FRAC_PI_3, FRAC_PI_2);
        let rho = reduced_state(&psi, &[1, 2]).unwrap();
        let eig = hermitian_eig(rho.entries()).unwrap();
        let expected = [0.75, 0.25, 0.0, 0.0];
        for (l, e) in eig.eigenvalues.iter().zip(expected) {
            assert!((l - e).abs() < 1e-12);
        }
        // cross-check with λ± at α₃⁽⁰⁰⁾ = π
        let spec = intermediate_spectrum(&FamilyParams::intermediate(FRAC_PI_3, FRAC_PI_2, PI));
        assert!((spec.lambda_plus - 0.75).abs() < 1e-12);
        assert!((spec.lambda_minus - 0.25).abs() < 1e-12);
    }

    #[test]
    fn rank_one_support() {
        // |1⟩_A ⊗ |01⟩
        let psi = PureState::basis(3, 0b101);
        let basis = preferred_basis(&psi).unwrap();
        assert_eq!(basis.support_rank(), 1);
        assert!(same_ray(basis.phi(0), &PureState::basis(2, 1).as_vector().clone(), 1e-15));
        assert!(same_ray(basis.phi(1), &PureState::basis(2, 0).as_vector().clone(), 1e-15));
    }

    #[test]
    fn theta_for_families() {
        assert_eq!(theta_angles(&FamilyParams::ghz(1.0), StateClassTag::Ghz).unwrap(), ThetaAngles::default());
        let t = theta_angles(&FamilyParams::w(1.0, FRAC_PI_2), StateClassTag::W).unwrap();
        assert_eq!(t, ThetaAngles::new(0.0, 0.0, -FRAC_PI_2));
        assert!(matches!(
            theta_angles(&FamilyParams::default(), StateClassTag::General),
            Err(Error::UseEigenbasisRoute)
        ));
    }

    #[test]
    fn theta_for_intermediate_matches_eigensolve() {
        let p = FamilyParams::intermediate(FRAC_PI_3, FRAC_PI_2, FRAC_PI_3);
        let psi = intermediate_state(p.alpha1, p.alpha2_0, p.alpha3_00);
        let basis = preferred_basis(&psi).unwrap();
        let [t0, t1] = table_support_vectors(&p, StateClassTag::Intermediate).unwrap();
        assert!(same_ray(basis.phi(0), &t0, 1e-9));
        assert!(same_ray(basis.phi(1), &t1, 1e-9));
        let t = theta_angles(&p, StateClassTag::Intermediate).unwrap();
        assert_eq!(t.theta2, 0.0);
    }

    #[test]
    fn table_basis_rows_match_table_vectors() {
        for (class, p) in [
            (StateClassTag::Ghz, FamilyParams::ghz(0.8)),
            (StateClassTag::W, FamilyParams::w(0.8, 1.1)),
            (StateClassTag::Intermediate, FamilyParams::intermediate(0.8, 1.1, 2.0)),
        ] {
            let basis = table_basis(&p, class).unwrap();
            let [t0, t1] = table_support_vectors(&p, class).unwrap();
            assert!(same_ray(basis.phi(0), &t0, 1e-12), "{class}");
            assert!(same_ray(basis.phi(1), &t1, 1e-12), "{class}");
            let psi = crate::prep::family_state(class, &p);
            let rho = reduced_state(&psi, &[1, 2]).unwrap();
            assert!(basis.leakage(rho.entries()) < 1e-12, "{class}");
        }
    }

    #[test]
    fn fidelity_examples() {
        let rho = pseudopure(&random_pure_state(3, 3), 0.4).unwrap();
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);
        let zero = PureState::basis(1, 0).density_matrix();
        let one = PureState::basis(1, 1).density_matrix();
        assert!(fidelity(&zero, &one).unwrap() < 1e-12);
        let t = FRAC_PI_4;
        let tilted = PureState::from_real(&[t.cos(), t.sin()]).unwrap().density_matrix();
        assert!((fidelity(&zero, &tilted).unwrap() - FRAC_1_SQRT_2).abs() < 1e-9);
        assert!(matches!(
            fidelity(&zero, &PureState::basis(2, 0).density_matrix()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fidelity_nonincreasing_under_mixing() {
        let psi = random_pure_state(11, 3);
        let pure = psi.density_matrix();
        let mut last = f64::INFINITY;
        for eps in [1.0, 0.8, 0.6, 0.4, 0.2] {
            let f = fidelity(&pure, &pseudopure(&psi, eps).unwrap()).unwrap();
            assert!(f <= last + 1e-12);
            last = f;
        }
    }

    #[test]
    fn fidelity_is_symmetric() {
        let a = pseudopure(&random_pure_state(1, 2), 0.7).unwrap();
        let b = pseudopure(&random_pure_state(2, 2), 0.3).unwrap();
        let f_ab = fidelity(&a, &b).unwrap();
        let f_ba = fidelity(&b, &a).unwrap();
        assert!((f_ab - f_ba).abs() < 1e-9);
        let pa = random_pure_state(5, 2);
        let pb = random_pure_state(6, 2);
        let f = fidelity(&pa.density_matrix(), &pb.density_matrix()).unwrap();
        assert!((f - pa.inner(&pb).norm()).abs() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn complementarity_direct(seed in any::<u64>()) {
            let psi = random_pure_state(seed, 3);
            let c = concurrence_bipartition(&psi, 0).unwrap();
            let s = single_particle_character(&psi, 0).unwrap();
            prop_assert!((c * c + s * s - 1.0).abs() < 1e-9);
        }

        #[test]
        fn wootters_matches_marginal_route(seed in any::<u64>()) {
            let psi = random_pure_state(seed, 2);
            let w = concurrence_two_qubit(&psi).unwrap();
            prop_assert!((w - concurrence_bipartition(&psi, 0).unwrap()).abs() < 1e-10);
            prop_assert!((w - concurrence_bipartition(&psi, 1).unwrap()).abs() < 1e-10);
        }

        #[test]
        fn preferred_basis_diagonalizes(seed in any::<u64>()) {
            let psi = random_pure_state(seed, 3);
            let basis = preferred_basis(&psi).unwrap();
            let rho = reduced_state(&psi, &[1, 2]).unwrap();
            let m = rho.entries();
            let off = basis.phi(0).dotc(&(m * basis.phi(1))).norm();
            prop_assert!(off < 1e-9);
            prop_assert!(basis.leakage(m) < 1e-9);
            prop_assert!(PreferredBasis::from_vectors(basis.vectors().clone(), 2).is_ok());
        }

        #[test]
        fn schmidt_spectra_agree(seed in any::<u64>()) {
            let psi = random_pure_state(seed, 3);
            let ea = hermitian_eig(reduced_state(&psi, &[0]).unwrap().entries()).unwrap();
            let ebc = hermitian_eig(reduced_state(&psi, &[1, 2]).unwrap().entries()).unwrap();
            for i in 0..2 {
                prop_assert!((ea.eigenvalues[i] - ebc.eigenvalues[i]).abs() < 1e-9);
            }
            prop_assert!(ebc.eigenvalues[2].abs() < 1e-9 && ebc.eigenvalues[3].abs() < 1e-9);
        }
    }
}
