//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Eigenvalues come back in descending order. Eigenvectors are made
//! reproducible in two steps: inside a degenerate cluster the basis is
//! rebuilt by projecting computational basis vectors (ascending index) onto
//! the cluster subspace, and every vector is rotated so that its first
//! non-negligible component is real and positive.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::quantum::{hermitian_deviation, CMatrix, CVector, HERMITIAN_TOL};

const OFF_DIAGONAL_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;
/// Eigenvalues closer than this share a degenerate cluster.
pub const DEGENERACY_TOL: f64 = 1e-9;
const PHASE_TOL: f64 = 1e-9;
/// Residual norm below which a projected basis vector is skipped.
const PROJECTION_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Column `i` pairs with `eigenvalues[i]`.
    pub eigenvectors: CMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, i: usize) -> CVector {
        self.eigenvectors.column(i).into_owned()
    }

    /// `Σ λᵢ vᵢ vᵢ†`
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.eigenvalues.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, &lambda) in self.eigenvalues.iter().enumerate() {
            let v = self.eigenvectors.column(i);
            m += (v * v.adjoint()).scale(lambda);
        }
        m
    }

    /// Applies `f` to the spectrum: `Σ f(λᵢ) vᵢ vᵢ†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.eigenvalues.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, &lambda) in self.eigenvalues.iter().enumerate() {
            let v = self.eigenvectors.column(i);
            m += (v * v.adjoint()).scale(f(lambda));
        }
        m
    }
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn hermitian_eig(h: &CMatrix) -> Result<EigenDecomposition> {
    let n = h.nrows();
    if n != h.ncols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: h.ncols(),
        });
    }
    let dev = hermitian_deviation(h);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let mut a = (h + h.adjoint()).scale(0.5);
    let mut v = CMatrix::identity(n, n);
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1.0);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) < OFF_DIAGONAL_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) >= OFF_DIAGONAL_TOL * scale {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);

    canonicalize_clusters(&eigenvalues, &mut vectors);
    for c in 0..n {
        fix_phase(&mut vectors, c);
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: vectors,
    })
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let mut s = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi step zeroing `a[p,q]`; accumulates the rotation into `v`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag < f64::MIN_POSITIVE {
        return;
    }
    // Strip the phase of a[p,q], then do a real symmetric rotation.
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // G = diag(1, e^{-iα}) · [[c, s], [-s, c]]
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    let n = a.nrows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Replaces the vectors of each degenerate cluster with the sequential
/// projections of `e_0, e_1, …` onto the cluster subspace.
fn canonicalize_clusters(eigenvalues: &[f64], vectors: &mut CMatrix) {
    let n = eigenvalues.len();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eigenvalues[end - 1] - eigenvalues[end] < DEGENERACY_TOL {
            end += 1;
        }
        if end - start > 1 {
            rebuild_cluster(vectors, start, end);
        }
        start = end;
    }
}

fn rebuild_cluster(vectors: &mut CMatrix, start: usize, end: usize) {
    let n = vectors.nrows();
    let size = end - start;
    let cols = vectors.columns(start, size).into_owned();
    let projector = &cols * cols.adjoint();
    let mut chosen: Vec<CVector> = Vec::with_capacity(size);
    for k in 0..n {
        if chosen.len() == size {
            break;
        }
        let mut r: CVector = projector.column(k).into_owned();
        // two Gram-Schmidt passes
        for _ in 0..2 {
            for u in &chosen {
                let overlap = u.dotc(&r);
                r -= u * overlap;
            }
        }
        let norm = r.norm();
        if norm > PROJECTION_TOL {
            chosen.push(r.unscale(norm));
        }
    }
    if chosen.len() != size {
        return;
    }
    for (offset, u) in chosen.into_iter().enumerate() {
        vectors.set_column(start + offset, &u);
    }
}

fn fix_phase(vectors: &mut CMatrix, col: usize) {
    let n = vectors.nrows();
    if let Some(lead) = (0..n)
        .map(|r| vectors[(r, col)])
        .find(|z| z.norm() > PHASE_TOL)
    {
        let rot = lead.conj() / lead.norm();
        for r in 0..n {
            vectors[(r, col)] *= rot;
        }
        // make the leading entry exactly real
        if let Some(r) = (0..n).find(|&r| vectors[(r, col)].norm() > PHASE_TOL) {
            vectors[(r, col)].im = 0.0;
        }
    }
}
