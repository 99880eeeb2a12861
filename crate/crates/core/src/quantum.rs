//! Dense states and operators for a handful of qubits.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::eig::hermitian_eig;
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const NORM_TOL: f64 = 1e-12;
pub(crate) const HERMITIAN_TOL: f64 = 1e-12;
pub(crate) const TRACE_TOL: f64 = 1e-12;
pub(crate) const PSD_TOL: f64 = 1e-10;
pub(crate) const UNITARY_TOL: f64 = 1e-10;

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::DimensionMismatch {
            expected: dim.next_power_of_two().max(1),
            found: dim,
        });
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Normalized amplitude vector over the computational basis of `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
    n_qubits: usize,
}

impl PureState {
    /// Builds a state from amplitudes that are already normalized.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        let amplitudes = CVector::from_vec(amplitudes);
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            amplitudes,
            n_qubits,
        })
    }

    /// Builds a state, dividing out the norm first.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        let mut amplitudes = CVector::from_vec(amplitudes);
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized(norm));
        }
        amplitudes.unscale_mut(norm);
        Ok(Self {
            amplitudes,
            n_qubits,
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let dim = 1 << n_qubits;
        assert!(index < dim, "basis index {index} out of range");
        let mut amplitudes = CVector::zeros(dim);
        amplitudes[index] = C64::new(1.0, 0.0);
        Self {
            amplitudes,
            n_qubits,
        }
    }

    /// Wraps a vector produced by norm-preserving operations.
    pub(crate) fn from_vector_unchecked(amplitudes: CVector) -> Self {
        let n_qubits = amplitudes.len().trailing_zeros() as usize;
        Self {
            amplitudes,
            n_qubits,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.amplitudes.as_slice()
    }

    pub fn as_vector(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        Self::from_vector_unchecked(self.amplitudes.kronecker(&other.amplitudes))
    }

    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        DensityMatrix {
            entries: self.projector(),
            n_qubits: self.n_qubits,
        }
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
    n_qubits: usize,
}

impl DensityMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        let n_qubits = qubits_for_dim(entries.nrows())?;
        let dev = hermitian_deviation(&entries);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {trace} differs from 1"
            )));
        }
        let eig = hermitian_eig(&entries)?;
        if let Some(&min) = eig.eigenvalues.last() {
            if min < -PSD_TOL {
                return Err(Error::InvalidDensityMatrix(format!(
                    "negative eigenvalue {min:e}"
                )));
            }
        }
        Ok(Self { entries, n_qubits })
    }

    pub(crate) fn from_matrix_unchecked(entries: CMatrix) -> Self {
        let n_qubits = entries.nrows().trailing_zeros() as usize;
        Self { entries, n_qubits }
    }

    /// `I / 2ⁿ`
    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        Self {
            entries: CMatrix::identity(dim, dim).unscale(dim as f64),
            n_qubits,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// `Tr ρ²`
    pub fn purity(&self) -> f64 {
        // Tr(ρρ) = Σ |ρ_ij|² for Hermitian ρ
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Square matrix with a checked unitarity certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    entries: CMatrix,
}

impl UnitaryMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        let dev = unitarity_deviation(&entries);
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { entries })
    }

    pub(crate) fn from_matrix_unchecked(entries: CMatrix) -> Self {
        Self { entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    /// `self · other`
    pub fn compose(&self, other: &UnitaryMatrix) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self {
            entries: &self.entries * &other.entries,
        })
    }

    pub fn tensor(&self, other: &UnitaryMatrix) -> Self {
        Self {
            entries: tensor_product(&self.entries, &other.entries),
        }
    }

    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.entries)
    }
}

pub(crate) fn hermitian_deviation(m: &CMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub(crate) fn unitarity_deviation(m: &CMatrix) -> f64 {
    let prod = m * m.adjoint();
    let id = CMatrix::identity(m.nrows(), m.ncols());
    (prod - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Kronecker product; the left operand indexes the most significant qubits.
/// Vectors are passed as single-column matrices.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Bit mask of qubit `q` in an `n`-qubit basis index (qubit 0 is the MSB).
#[inline]
fn qubit_bit(n_qubits: usize, q: usize) -> usize {
    1 << (n_qubits - 1 - q)
}

fn check_qubit_list(list: &[usize], n_qubits: usize) -> Result<()> {
    if list.is_empty() {
        return Err(Error::InvalidSubsystem("empty qubit list".into()));
    }
    for (pos, &q) in list.iter().enumerate() {
        if q >= n_qubits {
            return Err(Error::InvalidSubsystem(format!(
                "qubit {q} out of range for {n_qubits} qubits"
            )));
        }
        if list[..pos].contains(&q) {
            return Err(Error::InvalidSubsystem(format!("qubit {q} repeated")));
        }
    }
    Ok(())
}

/// Spreads the bits of `sub` (|list| bits, MSB first) onto the positions of `list`.
fn scatter_bits(sub: usize, list: &[usize], n_qubits: usize) -> usize {
    let k = list.len();
    list.iter().enumerate().fold(0, |acc, (pos, &q)| {
        if sub & (1 << (k - 1 - pos)) != 0 {
            acc | qubit_bit(n_qubits, q)
        } else {
            acc
        }
    })
}

/// Reduced density matrix over the qubits in `keep`, in the order given.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    check_qubit_list(keep, n)?;
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let dk = 1 << keep.len();
    let dt = 1 << traced.len();
    let keep_idx: Vec<usize> = (0..dk).map(|a| scatter_bits(a, keep, n)).collect();
    let traced_idx: Vec<usize> = (0..dt).map(|t| scatter_bits(t, &traced, n)).collect();
    let m = rho.entries();
    let reduced = CMatrix::from_fn(dk, dk, |a, b| {
        traced_idx
            .iter()
            .map(|&t| m[(keep_idx[a] | t, keep_idx[b] | t)])
            .sum()
    });
    Ok(DensityMatrix::from_matrix_unchecked(reduced))
}

/// Reduced density matrix of a pure state, without forming the full projector.
pub fn reduced_state(psi: &PureState, keep: &[usize]) -> Result<DensityMatrix> {
    let n = psi.n_qubits();
    check_qubit_list(keep, n)?;
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let dk = 1 << keep.len();
    let dt = 1 << traced.len();
    let keep_idx: Vec<usize> = (0..dk).map(|a| scatter_bits(a, keep, n)).collect();
    let traced_idx: Vec<usize> = (0..dt).map(|t| scatter_bits(t, &traced, n)).collect();
    let amps = psi.amplitudes();
    let reduced = CMatrix::from_fn(dk, dk, |a, b| {
        traced_idx
            .iter()
            .map(|&t| amps[keep_idx[a] | t] * amps[keep_idx[b] | t].conj())
            .sum()
    });
    Ok(DensityMatrix::from_matrix_unchecked(reduced))
}

/// Applies `u` to the qubits in `targets`; `targets[0]` is the most
/// significant qubit of `u`'s index.
pub fn apply_unitary(state: &PureState, u: &UnitaryMatrix, targets: &[usize]) -> Result<PureState> {
    let n = state.n_qubits();
    check_qubit_list(targets, n).map_err(|_| Error::InvalidSubsystem(format!("{targets:?}")))?;
    let k = targets.len();
    let sub_dim = 1 << k;
    if u.dim() != sub_dim {
        return Err(Error::DimensionMismatch {
            expected: sub_dim,
            found: u.dim(),
        });
    }
    let target_mask = targets.iter().fold(0, |m, &q| m | qubit_bit(n, q));
    let offsets: Vec<usize> = (0..sub_dim).map(|s| scatter_bits(s, targets, n)).collect();
    let m = u.entries();
    let amps = state.amplitudes();
    let mut out = CVector::zeros(state.dim());
    let mut gathered = vec![C64::new(0.0, 0.0); sub_dim];
    for base in (0..state.dim()).filter(|i| i & target_mask == 0) {
        for (s, g) in gathered.iter_mut().enumerate() {
            *g = amps[base | offsets[s]];
        }
        for r in 0..sub_dim {
            out[base | offsets[r]] = (0..sub_dim).map(|c| m[(r, c)] * gathered[c]).sum();
        }
    }
    Ok(PureState::from_vector_unchecked(out))
}

/// Applies a full-register operator.
pub fn apply_full(state: &PureState, u: &UnitaryMatrix) -> Result<PureState> {
    if u.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            found: u.dim(),
        });
    }
    Ok(PureState::from_vector_unchecked(
        u.entries() * state.as_vector(),
    ))
}

pub fn pauli_x() -> CMatrix {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    CMatrix::from_row_slice(2, 2, &[o, l, l, o])
}

pub fn pauli_y() -> CMatrix {
    let o = C64::new(0.0, 0.0);
    let i = C64::new(0.0, 1.0);
    CMatrix::from_row_slice(2, 2, &[o, -i, i, o])
}

pub fn pauli_z() -> CMatrix {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    CMatrix::from_row_slice(2, 2, &[l, o, o, -l])
}
