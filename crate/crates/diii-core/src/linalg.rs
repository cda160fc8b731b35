//! Dense complex linear algebra specialized for sewing-matrix analysis:
//! spectral flattening, Pfaffians of skew-symmetric matrices, congruence
//! factorization of skew-symmetric unitaries and numerical kernel
//! dimensions.
//!
//! Standard decompositions (SVD, Hermitian eigendecomposition, QR, LU
//! determinants) are delegated to nalgebra; everything Pfaffian-flavoured
//! is implemented here because the sign conventions matter.

use crate::error::{Error, Result};
use crate::{CMatrix, CVector};
use nalgebra::linalg::{SymmetricEigen, SVD};
use num_complex::Complex64;

const MAX_ITER: usize = 2000;

/// The standard symplectic matrix `Q = [[0, -1_n], [1_n, 0]]` of size 2n.
pub fn symplectic_form(n: usize) -> CMatrix {
    let mut q = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        q[(i, n + i)] = Complex64::new(-1.0, 0.0);
        q[(n + i, i)] = Complex64::new(1.0, 0.0);
    }
    q
}

pub fn ensure_finite(a: &CMatrix) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn svd_of(a: &CMatrix, vectors: bool) -> Result<SVD<Complex64, nalgebra::Dyn, nalgebra::Dyn>> {
    SVD::try_new(a.clone(), vectors, vectors, f64::EPSILON, MAX_ITER)
        .ok_or_else(|| Error::NoConvergence("SVD".into()))
}

/// Operator (spectral) norm: the largest singular value.
///
/// Residual diagnostics throughout the crate use this norm; it makes
/// statements like "a unitary deviates from the identity by 2" hold at
/// every matrix size.
pub fn op_norm(a: &CMatrix) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    match svd_of(a, false) {
        Ok(svd) => svd.singular_values.iter().cloned().fold(0.0, f64::max),
        // a non-converged SVD still bounds the norm by the Frobenius norm
        Err(_) => a.norm(),
    }
}

/// `||A - A*||` in operator norm.
pub fn hermiticity_residual(a: &CMatrix) -> f64 {
    op_norm(&(a - a.adjoint()))
}

/// `||A + A^t||` in operator norm (plain transpose, no conjugation).
pub fn skewness_residual(a: &CMatrix) -> f64 {
    op_norm(&(a + a.transpose()))
}

/// `||A A* - 1||` in operator norm.
pub fn unitarity_residual(a: &CMatrix) -> f64 {
    let n = a.nrows();
    op_norm(&(a * a.adjoint() - CMatrix::identity(n, n)))
}

/// Spectral flattening `H -> H |H|^{-1}` of a Hermitian invertible matrix.
///
/// The result is the unitary involution with the same eigenvectors as `H`
/// and eigenvalues collapsed to their signs. Fails with
/// [`Error::SingularInput`] when the smallest eigenvalue magnitude is not
/// above `tol`, which signals a gapless Hamiltonian sample.
pub fn polar_flatten(h: &CMatrix, tol: f64) -> Result<CMatrix> {
    ensure_finite(h)?;
    let herm = hermiticity_residual(h);
    if herm > tol {
        return Err(Error::NotHermitian(herm));
    }
    let sym = (h + h.adjoint()).map(|z| z * 0.5);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, MAX_ITER)
        .ok_or_else(|| Error::NoConvergence("Hermitian eigendecomposition".into()))?;
    let min_abs = eig
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .fold(f64::INFINITY, f64::min);
    if min_abs <= tol {
        return Err(Error::SingularInput(min_abs));
    }
    let signs = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(l.signum(), 0.0)));
    Ok(&eig.eigenvectors * signs * eig.eigenvectors.adjoint())
}

/// Smallest achievable spectral gap of a Hermitian sample: min |eigenvalue|.
pub fn min_abs_eigenvalue(h: &CMatrix, tol: f64) -> Result<f64> {
    let herm = hermiticity_residual(h);
    if herm > tol {
        return Err(Error::NotHermitian(herm));
    }
    let sym = (h + h.adjoint()).map(|z| z * 0.5);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, MAX_ITER)
        .ok_or_else(|| Error::NoConvergence("Hermitian eigendecomposition".into()))?;
    Ok(eig
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .fold(f64::INFINITY, f64::min))
}

/// Pfaffian of an even-size skew-symmetric matrix.
///
/// The input is skew-symmetrized as `(A - A^t)/2` first; the discarded
/// symmetric part must stay below `tol`. The computation tridiagonalizes
/// by unitary Householder congruences `A -> P A P^t` and multiplies the
/// odd superdiagonal entries, correcting by the accumulated congruence
/// determinant. Sign convention: `Pf([[0, a], [-a, 0]]) = a`.
pub fn pfaffian(a: &CMatrix, tol: f64) -> Result<Complex64> {
    ensure_finite(a)?;
    let m = a.nrows();
    if m != a.ncols() || !m.is_multiple_of(2) {
        return Err(Error::OddDimension(m));
    }
    let skew = skewness_residual(a);
    if skew > tol {
        return Err(Error::NotSkewSymmetric(skew));
    }
    if m == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut t = (a - a.transpose()).map(|z| z * 0.5);
    let scale = t.norm().max(f64::MIN_POSITIVE);
    let mut det_p = 1.0f64;

    for col in 0..m.saturating_sub(2) {
        // Zero the entries below the subdiagonal of `col` with a
        // Householder acting on rows/columns col+1.. .
        let tail_norm: f64 = (col + 2..m).map(|r| t[(r, col)].norm_sqr()).sum::<f64>();
        if tail_norm.sqrt() <= scale * 1e-300 {
            continue;
        }
        let len = m - col - 1;
        let mut v = CVector::zeros(len);
        for r in 0..len {
            v[r] = t[(col + 1 + r, col)];
        }
        let norm = v.norm();
        if norm == 0.0 {
            continue;
        }
        let phase = if v[0].norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            v[0] / v[0].norm()
        };
        let alpha = -phase * norm;
        v[0] -= alpha;
        let vsq = v.norm_squared();
        if vsq == 0.0 {
            continue;
        }
        let beta = 2.0 / vsq;

        // rows: T <- (I - beta v v*) T on the trailing block
        let mut wt = CMatrix::zeros(1, m);
        for c in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..len {
                acc += v[r].conj() * t[(col + 1 + r, c)];
            }
            wt[(0, c)] = acc;
        }
        for r in 0..len {
            for c in 0..m {
                let delta = v[r] * wt[(0, c)] * beta;
                t[(col + 1 + r, c)] -= delta;
            }
        }
        // columns: T <- T (I - beta conj(v) v^t)
        let mut wc = CMatrix::zeros(m, 1);
        for r in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..len {
                acc += t[(r, col + 1 + c)] * v[c].conj();
            }
            wc[(r, 0)] = acc;
        }
        for r in 0..m {
            for c in 0..len {
                let delta = wc[(r, 0)] * v[c] * beta;
                t[(r, col + 1 + c)] -= delta;
            }
        }
        det_p = -det_p;
    }

    let mut pf = Complex64::new(det_p, 0.0);
    let mut j = 0;
    while j + 1 < m {
        pf *= t[(j, j + 1)];
        j += 2;
    }
    Ok(pf)
}

/// Numerical kernel dimension report.
#[derive(Debug, Clone, Copy)]
pub struct KernelDim {
    /// Number of singular values strictly below the tolerance.
    pub dim: usize,
    /// Smallest retained over largest discarded singular value; infinite
    /// when one of the groups is empty. Large is trustworthy.
    pub gap_ratio: f64,
}

/// A wide matrix padded with zero rows to square shape: singular values
/// are unchanged and the thin SVD then carries a full right-singular
/// basis.
fn pad_to_at_least_square(a: &CMatrix) -> CMatrix {
    if a.nrows() >= a.ncols() {
        return a.clone();
    }
    let mut out = CMatrix::zeros(a.ncols(), a.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out
}

/// Count singular values of `A` strictly below `tol`.
pub fn kernel_dimension(a: &CMatrix, tol: f64) -> Result<KernelDim> {
    ensure_finite(a)?;
    if a.ncols() == 0 || a.nrows() == 0 {
        return Ok(KernelDim {
            dim: a.ncols(),
            gap_ratio: f64::INFINITY,
        });
    }
    let padded = pad_to_at_least_square(a);
    let svd = svd_of(&padded, false)?;
    let mut sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let dim = sv.iter().filter(|&&s| s < tol).count();
    let retained = sv.len() - dim;
    let gap_ratio = if dim == 0 || retained == 0 {
        f64::INFINITY
    } else {
        let smallest_kept = sv[retained - 1];
        let largest_dropped = sv[retained];
        if largest_dropped == 0.0 {
            f64::INFINITY
        } else {
            smallest_kept / largest_dropped
        }
    };
    Ok(KernelDim { dim, gap_ratio })
}

/// Orthonormal basis of the numerical null space (right singular vectors
/// with singular value below `tol`).
pub fn kernel_basis(a: &CMatrix, tol: f64) -> Result<Vec<CVector>> {
    ensure_finite(a)?;
    let cols = a.ncols();
    if cols == 0 {
        return Ok(vec![]);
    }
    if a.nrows() == 0 {
        return Ok((0..cols)
            .map(|j| CVector::from_fn(cols, |i, _| Complex64::new((i == j) as u8 as f64, 0.0)))
            .collect());
    }
    let padded = pad_to_at_least_square(a);
    let svd = svd_of(&padded, true)?;
    let v_t = svd.v_t.as_ref().expect("requested");
    let mut out = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s < tol {
            out.push(v_t.row(i).transpose().map(|z| z.conj()));
        }
    }
    Ok(out)
}

/// Factor a skew-symmetric unitary `S` as `U^t Q U` with `U` unitary and
/// `Q` the standard symplectic matrix.
///
/// `theta(v) = S conj(v)` is an antiunitary squaring to -1, so a
/// quaternionic Gram-Schmidt run pairs an orthonormal basis into
/// `(v_j, theta v_j)` blocks; assembling those columns gives the factor.
pub fn skew_takagi(s: &CMatrix, tol: f64) -> Result<CMatrix> {
    ensure_finite(s)?;
    let m = s.nrows();
    if m != s.ncols() || !m.is_multiple_of(2) {
        return Err(Error::OddDimension(m));
    }
    let skew = skewness_residual(s);
    let unit = unitarity_residual(s);
    if skew > tol || unit > tol {
        return Err(Error::NotSkewUnitary {
            skew,
            unitary: unit,
        });
    }
    let n = m / 2;
    let theta = |v: &CVector| -> CVector { s * v.map(|z| z.conj()) };

    let mut basis: Vec<CVector> = Vec::with_capacity(m);
    let mut vs: Vec<CVector> = Vec::with_capacity(n);
    let mut ws: Vec<CVector> = Vec::with_capacity(n);
    let project_out = |x: &CVector, basis: &[CVector]| -> CVector {
        let mut y = x.clone();
        for b in basis {
            let coeff = b.dotc(&y);
            y -= b.map(|z| z * coeff);
        }
        y
    };

    for _ in 0..n {
        // best-conditioned canonical candidate orthogonal to the span so far
        let mut best: Option<(f64, CVector)> = None;
        for j in 0..m {
            let e = CVector::from_fn(m, |i, _| Complex64::new((i == j) as u8 as f64, 0.0));
            let r = project_out(&e, &basis);
            let norm = r.norm();
            if best.as_ref().is_none_or(|(bn, _)| norm > *bn) {
                best = Some((norm, r));
            }
        }
        let (norm, mut v) = best.expect("non-empty candidate set");
        if norm < 1e-8 {
            return Err(Error::NoConvergence(
                "quaternionic Gram-Schmidt lost rank".into(),
            ));
        }
        v /= Complex64::new(norm, 0.0);
        // second orthogonalization pass for numerical hygiene
        let v2 = project_out(&v, &basis);
        let v = &v2 / Complex64::new(v2.norm(), 0.0);

        let mut w = theta(&v);
        let w2 = project_out(&project_out(&w, &basis), std::slice::from_ref(&v));
        let wn = w2.norm();
        if wn < 0.5 {
            return Err(Error::NoConvergence(
                "theta-partner collapsed during pairing".into(),
            ));
        }
        w = &w2 / Complex64::new(wn, 0.0);

        basis.push(v.clone());
        basis.push(w.clone());
        vs.push(v);
        ws.push(w);
    }

    let mut v_mat = CMatrix::zeros(m, m);
    for (j, v) in vs.iter().enumerate() {
        v_mat.set_column(j, v);
    }
    for (j, w) in ws.iter().enumerate() {
        v_mat.set_column(n + j, w);
    }
    let u = v_mat.transpose();
    let q = symplectic_form(n);
    let residual = op_norm(&(u.transpose() * &q * &u - s));
    if residual > 100.0 * tol {
        return Err(Error::NoConvergence(format!(
            "skew Takagi residual {residual:.3e} above 100*tol"
        )));
    }
    Ok(u)
}
