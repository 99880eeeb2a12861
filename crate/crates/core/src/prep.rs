//! Three-qubit source states: the angle-parametrized family, its GHZ, W and
//! intermediate special cases, Haar-random states and pseudopure mixtures.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{CMatrix, DensityMatrix, PureState};

/// Rotation angles (radians) of the preparation network.
///
/// `alpha2[i]` is conditioned on qubit A being `i`, `alpha3[2i + j]` on
/// (A, B) being `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FamilyParams {
    pub alpha1: f64,
    pub alpha2_0: f64,
    pub alpha2_1: f64,
    pub alpha3_00: f64,
    pub alpha3_01: f64,
    pub alpha3_10: f64,
    pub alpha3_11: f64,
}

impl FamilyParams {
    pub fn ghz(alpha1: f64) -> Self {
        Self {
            alpha1,
            alpha2_1: std::f64::consts::PI,
            alpha3_11: std::f64::consts::PI,
            ..Self::default()
        }
    }

    pub fn w(alpha1: f64, alpha2_0: f64) -> Self {
        Self {
            alpha1,
            alpha2_0,
            alpha3_00: std::f64::consts::PI,
            ..Self::default()
        }
    }

    pub fn intermediate(alpha1: f64, alpha2_0: f64, alpha3_00: f64) -> Self {
        Self {
            alpha1,
            alpha2_0,
            alpha3_00,
            ..Self::default()
        }
    }

    /// Parameters of `class` taking the free angles from `self`.
    pub fn constrained(&self, class: StateClassTag) -> Self {
        match class {
            StateClassTag::Ghz => Self::ghz(self.alpha1),
            StateClassTag::W => Self::w(self.alpha1, self.alpha2_0),
            StateClassTag::Intermediate => {
                Self::intermediate(self.alpha1, self.alpha2_0, self.alpha3_00)
            }
            StateClassTag::General => *self,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|a| a.is_finite())
    }

    pub fn as_array(&self) -> [f64; 7] {
        [
            self.alpha1,
            self.alpha2_0,
            self.alpha2_1,
            self.alpha3_00,
            self.alpha3_01,
            self.alpha3_10,
            self.alpha3_11,
        ]
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        let mut copy = *self;
        Ok(*copy.field_mut(name)?)
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        *self.field_mut(name)? = value;
        Ok(())
    }

    fn field_mut(&mut self, name: &str) -> Result<&mut f64> {
        Ok(match name {
            "alpha1" => &mut self.alpha1,
            "alpha2_0" => &mut self.alpha2_0,
            "alpha2_1" => &mut self.alpha2_1,
            "alpha3_00" => &mut self.alpha3_00,
            "alpha3_01" => &mut self.alpha3_01,
            "alpha3_10" => &mut self.alpha3_10,
            "alpha3_11" => &mut self.alpha3_11,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown angle parameter '{other}'"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateClassTag {
    Ghz,
    W,
    Intermediate,
    General,
}

impl fmt::Display for StateClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ghz => "ghz",
            Self::W => "w",
            Self::Intermediate => "intermediate",
            Self::General => "general",
        })
    }
}

impl FromStr for StateClassTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ghz" => Ok(Self::Ghz),
            "w" => Ok(Self::W),
            "intermediate" | "int" => Ok(Self::Intermediate),
            "general" => Ok(Self::General),
            other => Err(Error::InvalidParameter(format!(
                "unknown state class '{other}'"
            ))),
        }
    }
}

/// `cos(α/2 − πb/2)`, i.e. `cos(α/2)` for `b = 0` and `sin(α/2)` for `b = 1`.
#[inline]
fn branch(angle: f64, bit: usize) -> f64 {
    if bit == 0 {
        (angle / 2.0).cos()
    } else {
        (angle / 2.0).sin()
    }
}

/// Product-of-cosines amplitudes
/// `a_ijk = cos(α₁/2 − πi/2) cos(α₂⁽ⁱ⁾/2 − πj/2) cos(α₃⁽ⁱʲ⁾/2 − πk/2)`.
pub fn amplitudes_from_angles(p: &FamilyParams) -> PureState {
    let alpha2 = [p.alpha2_0, p.alpha2_1];
    let alpha3 = [p.alpha3_00, p.alpha3_01, p.alpha3_10, p.alpha3_11];
    let amps = (0..8)
        .map(|idx| {
            let (i, j, k) = (idx >> 2, (idx >> 1) & 1, idx & 1);
            let a = branch(p.alpha1, i) * branch(alpha2[i], j) * branch(alpha3[2 * i + j], k);
            C64::new(a, 0.0)
        })
        .collect();
    PureState::from_vector_unchecked(crate::quantum::CVector::from_vec(amps))
}

/// `cos(α₁/2)|000⟩ + sin(α₁/2)|111⟩`
pub fn ghz_state(alpha1: f64) -> PureState {
    let mut amps = [0.0; 8];
    amps[0] = (alpha1 / 2.0).cos();
    amps[7] = (alpha1 / 2.0).sin();
    real_state(&amps)
}

/// `cos(α₁/2)cos(α₂/2)|001⟩ + cos(α₁/2)sin(α₂/2)|010⟩ + sin(α₁/2)|100⟩`
pub fn w_state(alpha1: f64, alpha2_0: f64) -> PureState {
    let (c1, s1) = ((alpha1 / 2.0).cos(), (alpha1 / 2.0).sin());
    let (c2, s2) = ((alpha2_0 / 2.0).cos(), (alpha2_0 / 2.0).sin());
    let mut amps = [0.0; 8];
    amps[0b001] = c1 * c2;
    amps[0b010] = c1 * s2;
    amps[0b100] = s1;
    real_state(&amps)
}

pub fn intermediate_state(alpha1: f64, alpha2_0: f64, alpha3_00: f64) -> PureState {
    let (c1, s1) = ((alpha1 / 2.0).cos(), (alpha1 / 2.0).sin());
    let (c2, s2) = ((alpha2_0 / 2.0).cos(), (alpha2_0 / 2.0).sin());
    let (c3, s3) = ((alpha3_00 / 2.0).cos(), (alpha3_00 / 2.0).sin());
    let mut amps = [0.0; 8];
    amps[0b000] = c1 * c2 * c3;
    amps[0b001] = c1 * c2 * s3;
    amps[0b010] = c1 * s2;
    amps[0b100] = s1;
    real_state(&amps)
}

/// Family member for `class`; `General` uses every angle.
pub fn family_state(class: StateClassTag, p: &FamilyParams) -> PureState {
    match class {
        StateClassTag::Ghz => ghz_state(p.alpha1),
        StateClassTag::W => w_state(p.alpha1, p.alpha2_0),
        StateClassTag::Intermediate => intermediate_state(p.alpha1, p.alpha2_0, p.alpha3_00),
        StateClassTag::General => amplitudes_from_angles(p),
    }
}

fn real_state(amps: &[f64]) -> PureState {
    PureState::from_vector_unchecked(crate::quantum::CVector::from_iterator(
        amps.len(),
        amps.iter().map(|&a| C64::new(a, 0.0)),
    ))
}

/// Haar-random pure state on `n_qubits`.
///
/// A `ChaCha20Rng` seeded with `seed_from_u64(seed)` draws, for each basis
/// index in order, the real then the imaginary part from a standard normal;
/// the vector is then normalized.
pub fn random_pure_state(seed: u64, n_qubits: usize) -> PureState {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let dim = 1usize << n_qubits;
    let amps: Vec<C64> = (0..dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        })
        .collect();
    // a zero vector has probability zero
    PureState::normalized(amps).expect("gaussian sample has nonzero norm")
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(epsilon))
    }
}

/// `((1−ε)/2ⁿ)·I + ε|ψ⟩⟨ψ|`
pub fn pseudopure(psi: &PureState, epsilon: f64) -> Result<DensityMatrix> {
    check_epsilon(epsilon)?;
    let dim = psi.dim();
    let background = (1.0 - epsilon) / dim as f64;
    let m = psi.projector().scale(epsilon) + CMatrix::identity(dim, dim).scale(background);
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// `(ρ − ((1−ε)/2ⁿ)·I) / ε`, the unit-trace deviation from the flat background.
///
/// Not necessarily positive semidefinite when `ρ` is not an exact pseudopure
/// state, so a bare matrix is returned.
pub fn relevant_pure_part(rho: &DensityMatrix, epsilon: f64) -> Result<CMatrix> {
    check_epsilon(epsilon)?;
    let dim = rho.dim();
    let background = (1.0 - epsilon) / dim as f64;
    Ok((rho.entries() - CMatrix::identity(dim, dim).scale(background)).unscale(epsilon))
}
