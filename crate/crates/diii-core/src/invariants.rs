//! The Z2 invariants: the fixed-point Pfaffian formula on the circle, the
//! equivalent degree formula, determinant/base-point normalizations,
//! homotopy classification, the relative invariant of Hamiltonian pairs,
//! the gerbe-style sign, and the strong/weak invariants on the torus.

use crate::error::{Error, Result};
use crate::field::{MatrixField, ScalarField, SewingField};
use crate::grid::{CircleGrid, InvolutionGrid, TorusGrid};
use crate::linalg::pfaffian;
use crate::sewing::{
    check_sewing, det_field, sqrt_branch_1d, sqrt_branch_2d, unwrap_phase_1d, SewingReport,
};
use crate::symmetry::{extract_sewing, standard_form, SymmetryTriple};
use crate::z2::Z2;
use crate::{CMatrix, HamiltonianField, SIGN_ROUND_EPS};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Round a nominally exact sign to +/-1, reporting the deviation.
pub fn round_sign(z: Complex64, eps: f64) -> Result<(Z2, f64)> {
    let dp = (z - Complex64::new(1.0, 0.0)).norm();
    let dm = (z + Complex64::new(1.0, 0.0)).norm();
    let (sign, dist) = if dp <= dm {
        (Z2::Plus, dp)
    } else {
        (Z2::Minus, dm)
    };
    if dist > eps {
        return Err(Error::NotSignLike(dist));
    }
    Ok((sign, dist))
}

fn checked(q_rep: SewingReport) -> Result<SewingReport> {
    if q_rep.pass() {
        Ok(q_rep)
    } else {
        Err(Error::SewingViolation(q_rep.max_residual()))
    }
}

fn pf_tol(tol: f64) -> f64 {
    (10.0 * tol).max(1e-12)
}

/// Detailed outcome of the 1d fixed-point Pfaffian formula.
#[derive(Debug, Clone)]
pub struct Nu1dReport {
    pub nu: Z2,
    /// The value before sign rounding.
    pub raw: Complex64,
    pub sign_residual: f64,
    pub pf_zero: Complex64,
    pub pf_pi: Complex64,
    pub sewing: SewingReport,
}

/// The 1d invariant: `Pf[q(pi)]/Pf[q(0)]` against the continuous branch of
/// `det^{1/2}` tracked from k = 0 to pi.
pub fn teo_kane_report(q: &SewingField<CircleGrid>) -> Result<Nu1dReport> {
    let sewing = checked(check_sewing(q))?;
    let pf_zero = pfaffian(q.at(q.grid.index_zero()), pf_tol(q.tol))?;
    let pf_pi = pfaffian(q.at(q.grid.index_pi()), pf_tol(q.tol))?;
    let (d, _) = det_field(q);
    // the branch started at Pf[q(0)] makes the formula a single ratio at pi
    let s = sqrt_branch_1d(&d, pf_zero, q.tol)?;
    let raw = pf_pi / s.at(q.grid.index_pi());
    let (nu, sign_residual) = round_sign(raw, SIGN_ROUND_EPS)?;
    Ok(Nu1dReport {
        nu,
        raw,
        sign_residual,
        pf_zero,
        pf_pi,
        sewing,
    })
}

pub fn teo_kane_1d(q: &SewingField<CircleGrid>) -> Result<Z2> {
    Ok(teo_kane_report(q)?.nu)
}

/// Build a trivializing phase `p` with `det q(x) = p(tau x) p(x)` pointwise
/// and `p = Pf[q]` at the fixed points; its degree parity is the invariant.
///
/// On the arc [0, pi] the square-root branch started at `Pf[q(0)]` is
/// twisted by a linear phase chosen so that `p(pi) = Pf[q(pi)]`; the other
/// half is forced by the defining relation `p(k) = det q(k) / p(2pi - k)`.
pub fn construct_p_1d(q: &SewingField<CircleGrid>) -> Result<(ScalarField<CircleGrid>, i64)> {
    checked(check_sewing(q))?;
    let n = q.grid.n();
    let half = q.grid.index_pi();
    let pf_zero = pfaffian(q.at(0), pf_tol(q.tol))?;
    let pf_pi = pfaffian(q.at(half), pf_tol(q.tol))?;
    let (d, _) = det_field(q);
    let s = sqrt_branch_1d(&d, pf_zero, q.tol)?;

    let s_pi = s.at(half);
    let alpha_pi = if (s_pi - pf_pi).norm() <= (s_pi + pf_pi).norm() {
        0.0
    } else {
        PI
    };
    let mut values: Vec<Complex64> = (0..=half)
        .map(|j| {
            let alpha = alpha_pi * (j as f64) / (half as f64);
            s.at(j) * Complex64::from_polar(1.0, alpha)
        })
        .collect();
    values.resize(n, Complex64::new(0.0, 0.0));
    for j in half + 1..n {
        values[j] = d.at(j) / values[n - j];
    }
    let p = ScalarField {
        grid: q.grid,
        values,
    };

    let tol = (100.0 * q.tol).max(1e-10);
    let fp_dev = (p.at(0) - pf_zero).norm().max((p.at(half) - pf_pi).norm());
    let torsor_dev = (0..n)
        .map(|j| (d.at(j) - p.at(q.grid.pair(j)) * p.at(j)).norm())
        .fold(0.0, f64::max);
    if fp_dev > tol || torsor_dev > tol {
        return Err(Error::CrossCheckFailure(format!(
            "trivializing phase violates its defining relations \
             (fixed points {fp_dev:.3e}, torsor {torsor_dev:.3e})"
        )));
    }
    let (_, degree) = unwrap_phase_1d(&p)?;
    Ok((p, degree))
}

/// Congruence by `diag(g, 1, ..., 1)` with `g` an involution-invariant
/// continuous square root of `det q^{-1}`; the result has determinant 1
/// and the same invariant.
pub fn normalize_determinant(q: &SewingField<CircleGrid>) -> Result<SewingField<CircleGrid>> {
    checked(check_sewing(q))?;
    let (d, _) = det_field(q);
    let (phase, winding) = unwrap_phase_1d(&d)?;
    if winding != 0 {
        return Err(Error::NonzeroDetWinding(winding));
    }
    let n = q.grid.n();
    let half = q.grid.index_pi();
    let mut g: Vec<Complex64> = phase.theta[..=half]
        .iter()
        .map(|&t| Complex64::from_polar(1.0, -0.5 * t))
        .collect();
    g.resize(n, Complex64::new(0.0, 0.0));
    for j in half + 1..n {
        g[j] = g[n - j];
    }
    // mirroring makes g exactly invariant; continuity across pi holds
    // because the phase lift is continuous there
    let samples: Vec<CMatrix> = (0..n)
        .map(|j| {
            let mut out = q.samples[j].clone();
            let m = q.rank;
            for cidx in 0..m {
                out[(0, cidx)] *= g[j];
            }
            for ridx in 0..m {
                out[(ridx, 0)] *= g[j];
            }
            out
        })
        .collect();
    let out = SewingField::from_samples(q.grid, samples, q.tol)?;
    checked(check_sewing(&out))?;
    let (dn, _) = det_field(&out);
    let det_dev = dn
        .values
        .iter()
        .map(|z| (z - Complex64::new(1.0, 0.0)).norm())
        .fold(0.0, f64::max);
    if det_dev > (100.0 * q.tol).max(1e-10) {
        return Err(Error::CrossCheckFailure(format!(
            "determinant normalization left deviation {det_dev:.3e}"
        )));
    }
    Ok(out)
}

/// Congruence by the constant unitary sending `q(0)` to the standard
/// symplectic matrix; requires a determinant-normalized field.
pub fn normalize_basepoint(q: &SewingField<CircleGrid>) -> Result<SewingField<CircleGrid>> {
    checked(check_sewing(q))?;
    let (d, _) = det_field(q);
    let det_dev = d
        .values
        .iter()
        .map(|z| (z - Complex64::new(1.0, 0.0)).norm())
        .fold(0.0, f64::max);
    if det_dev > (10.0 * q.tol).max(1e-10) {
        return Err(Error::CrossCheckFailure(format!(
            "base-point normalization requires det = 1 (deviation {det_dev:.3e})"
        )));
    }
    let takagi = crate::linalg::skew_takagi(q.at(0), pf_tol(q.tol))?;
    let u = takagi.adjoint(); // the inverse of the factor
    let samples: Vec<CMatrix> = q.samples.iter().map(|qx| u.transpose() * qx * &u).collect();
    let out = SewingField::from_samples(q.grid, samples, q.tol)?;
    checked(check_sewing(&out))?;
    let target = crate::linalg::symplectic_form(q.rank / 2);
    let base_dev = crate::linalg::op_norm(&(out.at(0) - target));
    if base_dev > (100.0 * q.tol).max(1e-9) {
        return Err(Error::CrossCheckFailure(format!(
            "base point residual {base_dev:.3e} after normalization"
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Homotopy {
    Homotopic,
    NotHomotopic,
}

impl std::fmt::Display for Homotopy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Homotopy::Homotopic => write!(f, "Homotopic"),
            Homotopy::NotHomotopic => write!(f, "NotHomotopic"),
        }
    }
}

/// Two sewing fields on the circle are homotopic within sewing fields
/// exactly when their invariants agree.
pub fn classify_1d(q0: &SewingField<CircleGrid>, q1: &SewingField<CircleGrid>) -> Result<Homotopy> {
    if q0.rank != q1.rank {
        return Err(Error::RankMismatch {
            a: q0.rank,
            b: q1.rank,
        });
    }
    Ok(if teo_kane_1d(q0)? == teo_kane_1d(q1)? {
        Homotopy::Homotopic
    } else {
        Homotopy::NotHomotopic
    })
}

fn sewing_pair_with_same_identification<G: InvolutionGrid>(
    h0: &HamiltonianField<G>,
    h1: &HamiltonianField<G>,
    sym: &SymmetryTriple,
    tol: f64,
) -> Result<(SewingField<G>, SewingField<G>)> {
    if h0.grid != h1.grid {
        return Err(Error::GridMismatch);
    }
    if h0.dim != h1.dim || h0.dim != sym.dim() {
        return Err(Error::DimensionMismatch {
            expected: sym.dim(),
            found: h0.dim.max(h1.dim),
        });
    }
    // one standard-form identification, applied to both fields
    let (w, _) = standard_form(sym, tol)?;
    let q0 = extract_sewing(&h0.conjugated(&w)?, tol)?;
    let q1 = extract_sewing(&h1.conjugated(&w)?, tol)?;
    Ok((q0, q1))
}

/// Relative invariant of two circle Hamiltonians under the same
/// symmetries: the Z2 ratio of their sewing invariants, independent of
/// the chosen standard-form identification.
pub fn relative_invariant_1d(
    h0: &HamiltonianField<CircleGrid>,
    h1: &HamiltonianField<CircleGrid>,
    sym: &SymmetryTriple,
    tol: f64,
) -> Result<Z2> {
    let (q0, q1) = sewing_pair_with_same_identification(h0, h1, sym, tol)?;
    Ok(teo_kane_1d(&q0)? * teo_kane_1d(&q1)?)
}

/// Relative weak invariants of two torus Hamiltonians: componentwise Z2
/// ratio of the coordinate-circle invariants.
pub fn relative_invariant_2d(
    h0: &HamiltonianField<TorusGrid>,
    h1: &HamiltonianField<TorusGrid>,
    sym: &SymmetryTriple,
    tol: f64,
) -> Result<(Z2, Z2)> {
    let (q0, q1) = sewing_pair_with_same_identification(h0, h1, sym, tol)?;
    let w0 = weak_invariants_2d(&q0)?;
    let w1 = weak_invariants_2d(&q1)?;
    Ok((w0.0 * w1.0, w0.1 * w1.1))
}

/// Same-component test of the two fixed-point values inside the
/// det-normalized skew unitaries: the product of their Pfaffians.
pub fn gerbe_sign_1d(q: &SewingField<CircleGrid>) -> Result<Z2> {
    checked(check_sewing(q))?;
    let (d, _) = det_field(q);
    let det_dev = d
        .values
        .iter()
        .map(|z| (z - Complex64::new(1.0, 0.0)).norm())
        .fold(0.0, f64::max);
    if det_dev > (10.0 * q.tol).max(1e-10) {
        return Err(Error::CrossCheckFailure(format!(
            "gerbe sign requires det = 1 (deviation {det_dev:.3e}); \
             apply normalize_determinant first"
        )));
    }
    let pf_zero = pfaffian(q.at(q.grid.index_zero()), pf_tol(q.tol))?;
    let pf_pi = pfaffian(q.at(q.grid.index_pi()), pf_tol(q.tol))?;
    Ok(round_sign(pf_pi * pf_zero, SIGN_ROUND_EPS)?.0)
}

/// Detailed outcome of the torus fixed-point Pfaffian product.
#[derive(Debug, Clone)]
pub struct StrongReport {
    pub nu: Z2,
    pub raw: Complex64,
    pub sign_residual: f64,
    pub det_invariance: f64,
    pub sewing: SewingReport,
}

/// The strong invariant: product over the four fixed points of
/// `Pf[q(k)] / s(k)` with `s` the global continuous branch of
/// `det q^{1/2}`. The branch's overall sign cancels across the four
/// factors.
pub fn strong_invariant_report(q: &SewingField<TorusGrid>) -> Result<StrongReport> {
    let sewing = checked(check_sewing(q))?;
    let (d, det_invariance) = det_field(q);
    let pf00 = pfaffian(q.at(0), pf_tol(q.tol))?;
    let (s, _windings) = sqrt_branch_2d(&d, pf00, q.tol)?;
    let mut raw = Complex64::new(1.0, 0.0);
    for fp in q.grid.fixed_points() {
        raw *= pfaffian(q.at(fp), pf_tol(q.tol))? / s.at(fp);
    }
    let (nu, sign_residual) = round_sign(raw, SIGN_ROUND_EPS)?;
    Ok(StrongReport {
        nu,
        raw,
        sign_residual,
        det_invariance,
        sewing,
    })
}

pub fn strong_invariant_2d(q: &SewingField<TorusGrid>) -> Result<Z2> {
    Ok(strong_invariant_report(q)?.nu)
}

/// Weak invariants: the circle invariant of the two coordinate-circle
/// restrictions through the base point.
pub fn weak_invariants_2d(q: &SewingField<TorusGrid>) -> Result<(Z2, Z2)> {
    let w1 = teo_kane_1d(&q.restrict_to_circle(1))?;
    let w2 = teo_kane_1d(&q.restrict_to_circle(2))?;
    Ok((w1, w2))
}

/// The full torus classification triple `(nu_w1, nu_w2, nu_s)`, computed
/// from one and the same sewing field.
pub fn full_invariant_2d(q: &SewingField<TorusGrid>) -> Result<(Z2, Z2, Z2)> {
    let (w1, w2) = weak_invariants_2d(q)?;
    let s = strong_invariant_2d(q)?;
    Ok((w1, w2, s))
}

/// Blockwise direct sum of two sewing fields on the same grid.
pub fn direct_sum<G: InvolutionGrid>(
    a: &SewingField<G>,
    b: &SewingField<G>,
) -> Result<SewingField<G>> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let (ra, rb) = (a.rank, b.rank);
    let samples: Vec<CMatrix> = (0..a.grid.len())
        .map(|j| {
            let mut m = CMatrix::zeros(ra + rb, ra + rb);
            m.view_mut((0, 0), (ra, ra)).copy_from(&a.samples[j]);
            m.view_mut((ra, ra), (rb, rb)).copy_from(&b.samples[j]);
            m
        })
        .collect();
    SewingField::from_samples(a.grid.clone(), samples, a.tol.max(b.tol))
}

/// The congruence `q'(x) = h(tau x)^t q(x) h(x)` by a unitary field `h`.
/// On the circle the invariant transforms by the winding parity of
/// `det h`.
pub fn apply_intertwiner<G: InvolutionGrid>(
    q: &SewingField<G>,
    h: &MatrixField<G>,
) -> Result<SewingField<G>> {
    if q.grid != h.grid {
        return Err(Error::GridMismatch);
    }
    if q.rank != h.size {
        return Err(Error::DimensionMismatch {
            expected: q.rank,
            found: h.size,
        });
    }
    let samples: Vec<CMatrix> = (0..q.grid.len())
        .map(|j| {
            let p = q.grid.pair(j);
            h.samples[p].transpose() * &q.samples[j] * &h.samples[j]
        })
        .collect();
    let out = SewingField::from_samples(q.grid.clone(), samples, q.tol)?;
    let rep = check_sewing(&out);
    if !rep.pass() {
        return Err(Error::SewingViolation(rep.max_residual()));
    }
    Ok(out)
}

/// Residual summary embedded in reports.
#[derive(Debug, Clone, Copy)]
pub struct Diagnostics {
    pub unitarity: f64,
    pub sewing: f64,
    pub fixed_point_skewness: f64,
    pub det_invariance: f64,
    pub sign_residual: f64,
}

/// Invariants of a single field with their numeric health numbers.
#[derive(Debug, Clone)]
pub struct InvariantReport {
    pub space: crate::models::Space,
    pub nu_1d: Option<Z2>,
    pub nu_weak: Option<(Z2, Z2)>,
    pub nu_strong: Option<Z2>,
    pub diagnostics: Diagnostics,
}

pub fn invariant_report_circle(q: &SewingField<CircleGrid>) -> Result<InvariantReport> {
    let rep = teo_kane_report(q)?;
    let (_, det_invariance) = det_field(q);
    Ok(InvariantReport {
        space: crate::models::Space::Circle,
        nu_1d: Some(rep.nu),
        nu_weak: None,
        nu_strong: None,
        diagnostics: Diagnostics {
            unitarity: rep.sewing.unitarity,
            sewing: rep.sewing.sewing,
            fixed_point_skewness: rep.sewing.fixed_point_skewness,
            det_invariance,
            sign_residual: rep.sign_residual,
        },
    })
}

pub fn invariant_report_torus(q: &SewingField<TorusGrid>) -> Result<InvariantReport> {
    let weak = weak_invariants_2d(q)?;
    let strong = strong_invariant_report(q)?;
    Ok(InvariantReport {
        space: crate::models::Space::Torus,
        nu_1d: None,
        nu_weak: Some(weak),
        nu_strong: Some(strong.nu),
        diagnostics: Diagnostics {
            unitarity: strong.sewing.unitarity,
            sewing: strong.sewing.sewing,
            fixed_point_skewness: strong.sewing.fixed_point_skewness,
            det_invariance: strong.det_invariance,
            sign_residual: strong.sign_residual,
        },
    })
}
