//! Analysis of sewing-matrix fields: condition residuals, determinant
//! fields, phase unwrapping and continuous square-root branches on the
//! involutive circle and torus.

use crate::error::{Error, Result};
use crate::field::{PhaseField, ScalarField, SewingField};
use crate::grid::{CircleGrid, InvolutionGrid, TorusGrid};
use crate::linalg::{op_norm, skewness_residual, unitarity_residual};
use crate::z2::Z2;
use crate::SNAP_EPS;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Unwrap steps this close to pi are treated as unresolvable.
const COARSE_MARGIN: f64 = 1e-6;

/// Residual report of the three sewing-field invariants.
#[derive(Debug, Clone, Copy)]
pub struct SewingReport {
    /// max over the grid of ||q q* - 1||.
    pub unitarity: f64,
    /// max over involution pairs of ||q(tau x) + q(x)^t||.
    pub sewing: f64,
    /// max over fixed points of ||q + q^t||.
    pub fixed_point_skewness: f64,
    pub tol: f64,
}

impl SewingReport {
    pub fn pass(&self) -> bool {
        self.max_residual() <= self.tol
    }

    pub fn max_residual(&self) -> f64 {
        self.unitarity
            .max(self.sewing)
            .max(self.fixed_point_skewness)
    }
}

/// Max-norm residuals of unitarity, the sewing relation and fixed-point
/// skew-symmetry.
pub fn check_sewing<G: InvolutionGrid>(q: &SewingField<G>) -> SewingReport {
    let unitarity = q
        .samples
        .par_iter()
        .map(unitarity_residual)
        .reduce(|| 0.0, f64::max);
    let sewing = (0..q.grid.len())
        .into_par_iter()
        .map(|j| {
            let p = q.grid.pair(j);
            if p < j {
                0.0 // pair already covered
            } else {
                op_norm(&(&q.samples[p] + q.samples[j].transpose()))
            }
        })
        .reduce(|| 0.0, f64::max);
    let fixed_point_skewness = q
        .grid
        .fixed_points()
        .iter()
        .map(|&j| skewness_residual(&q.samples[j]))
        .fold(0.0, f64::max);
    SewingReport {
        unitarity,
        sewing,
        fixed_point_skewness,
        tol: q.tol,
    }
}

/// Pointwise determinants together with the max invariance residual
/// `|det q(tau x) - det q(x)|`.
pub fn det_field<G: InvolutionGrid>(q: &SewingField<G>) -> (ScalarField<G>, f64) {
    let field = q.as_matrix_field().det_field();
    let invariance = (0..q.grid.len())
        .map(|j| (field.values[q.grid.pair(j)] - field.values[j]).norm())
        .fold(0.0, f64::max);
    (field, invariance)
}

fn principal_arg(z: Complex64) -> f64 {
    z.arg()
}

/// Increment between consecutive unimodular samples, with coarseness guard.
fn step(prev: Complex64, next: Complex64, index: usize) -> Result<f64> {
    let d = principal_arg(next * prev.conj());
    if d.abs() >= PI - COARSE_MARGIN {
        return Err(Error::GridTooCoarse { index, step: d });
    }
    Ok(d)
}

/// Continuous phase lift of a unimodular field on the circle, plus its
/// winding number.
///
/// The lift starts in [0, 2pi) at index 0 and accumulates principal-value
/// increments; the closing increment makes the winding an exact integer.
pub fn unwrap_phase_1d(u: &ScalarField<CircleGrid>) -> Result<(PhaseField<CircleGrid>, i64)> {
    let n = u.grid.len();
    let mut theta = Vec::with_capacity(n);
    let mut t = principal_arg(u.values[0]);
    if t < 0.0 {
        t += 2.0 * PI;
    }
    let base = t;
    theta.push(t);
    for j in 1..n {
        t += step(u.values[j - 1], u.values[j], j - 1)?;
        theta.push(t);
    }
    let closing = step(u.values[n - 1], u.values[0], n - 1)?;
    let total = t + closing - base;
    let w = (total / (2.0 * PI)).round();
    if (total / (2.0 * PI) - w).abs() > 1e-6 {
        return Err(Error::InconsistentUnwrap((total / (2.0 * PI) - w).abs()));
    }
    Ok((
        PhaseField {
            grid: u.grid,
            theta,
            base_value: base,
        },
        w as i64,
    ))
}

fn snap_sign(z: Complex64) -> Complex64 {
    for s in [1.0f64, -1.0] {
        if (z - Complex64::new(s, 0.0)).norm() <= SNAP_EPS {
            return Complex64::new(s, 0.0);
        }
    }
    z
}

/// Continuous square-root branch of a unimodular field along the circle,
/// fixed by its value at k = 0.
///
/// The branch follows the phase lift over the whole index range; it
/// squares back to the input pointwise. Fixed-point values within 1e-6 of
/// +/-1 are snapped exactly.
pub fn sqrt_branch_1d(
    u: &ScalarField<CircleGrid>,
    start: Complex64,
    tol: f64,
) -> Result<ScalarField<CircleGrid>> {
    let start_res = (start * start - u.values[0]).norm();
    if start_res > 10.0 * tol.max(1e-12) {
        return Err(Error::BadStartValue(start_res));
    }
    let (phase, _w) = unwrap_phase_1d(u)?;
    let mut values: Vec<Complex64> = phase
        .theta
        .iter()
        .map(|&t| start * Complex64::from_polar(1.0, 0.5 * (t - phase.base_value)))
        .collect();
    for fp in u.grid.fixed_points() {
        values[fp] = snap_sign(values[fp]);
    }
    let s = ScalarField {
        grid: u.grid,
        values,
    };
    let residual = (0..u.grid.len())
        .map(|j| (s.values[j] * s.values[j] - u.values[j]).norm())
        .fold(0.0, f64::max);
    if residual > 100.0 * tol.max(1e-12) {
        return Err(Error::CrossCheckFailure(format!(
            "square-root branch residual {residual:.3e}"
        )));
    }
    Ok(s)
}

/// Globally continuous square-root branch of an involution-invariant
/// unimodular field on the torus.
///
/// Unwraps the row k2 = 0, then every column, verifies that both torus
/// windings vanish and that all plaquette phase sums close, and returns
/// the branch together with the measured winding pair (always (0, 0) on
/// success). The branch satisfies `s(-k) = s(k)` within tolerance.
pub fn sqrt_branch_2d(
    u: &ScalarField<TorusGrid>,
    start: Complex64,
    tol: f64,
) -> Result<(ScalarField<TorusGrid>, (i64, i64))> {
    let grid = u.grid;
    let (n1, n2) = (grid.n1(), grid.n2());
    let at = |j1: usize, j2: usize| u.values[grid.index(j1, j2)];

    let start_res = (start * start - at(0, 0)).norm();
    if start_res > 10.0 * tol.max(1e-12) {
        return Err(Error::BadStartValue(start_res));
    }

    // row j2 = 0
    let row0 = ScalarField {
        grid: grid.axis_grid(1),
        values: (0..n1).map(|j1| at(j1, 0)).collect(),
    };
    let (row_phase, w1) = unwrap_phase_1d(&row0)?;

    // columns, each seeded from the row lift
    let mut theta = vec![0.0f64; grid.len()];
    let mut column_windings = Vec::with_capacity(n1);
    for j1 in 0..n1 {
        let mut t = row_phase.theta[j1];
        theta[grid.index(j1, 0)] = t;
        for j2 in 1..n2 {
            t += step(at(j1, j2 - 1), at(j1, j2), grid.index(j1, j2 - 1))?;
            theta[grid.index(j1, j2)] = t;
        }
        let closing = step(at(j1, n2 - 1), at(j1, 0), grid.index(j1, n2 - 1))?;
        let total = t + closing - theta[grid.index(j1, 0)];
        column_windings.push((total / (2.0 * PI)).round() as i64);
    }
    let w2 = column_windings[0];
    if w1 != 0 || w2 != 0 {
        return Err(Error::NonzeroWinding { n1: w1, n2: w2 });
    }
    if column_windings.iter().any(|&w| w != 0) {
        return Err(Error::InconsistentUnwrap(
            column_windings.iter().map(|w| w.abs()).max().unwrap() as f64 * 2.0 * PI,
        ));
    }

    // loop closure: along every row j2 > 0 the column lifts must differ by
    // exactly the principal increments (including the wrap-around edge)
    let mut plaquette = 0.0f64;
    for j2 in 1..n2 {
        for j1 in 0..n1 {
            let next = (j1 + 1) % n1;
            let d = principal_arg(at(next, j2) * at(j1, j2).conj());
            let r = (theta[grid.index(next, j2)] - theta[grid.index(j1, j2)] - d).abs();
            plaquette = plaquette.max(r);
        }
    }
    if plaquette > 1e-6 {
        return Err(Error::InconsistentUnwrap(plaquette));
    }

    let base = theta[grid.index(0, 0)];
    let mut values: Vec<Complex64> = theta
        .iter()
        .map(|&t| start * Complex64::from_polar(1.0, 0.5 * (t - base)))
        .collect();
    for fp in grid.fixed_points() {
        values[fp] = snap_sign(values[fp]);
    }
    let s = ScalarField { grid, values };

    let equiv = (0..grid.len())
        .map(|j| (s.values[grid.pair(j)] - s.values[j]).norm())
        .fold(0.0, f64::max);
    if equiv > 100.0 * tol.max(1e-8) {
        return Err(Error::CrossCheckFailure(format!(
            "2d square-root branch is not involution-invariant (residual {equiv:.3e})"
        )));
    }
    Ok((s, (0, 0)))
}

/// Degree parity of an equivariant unimodular map `r(-k) = conj(r(k))` by
/// the fixed-point ratio `r(pi)/r(0)`, cross-checked against the winding
/// parity of the unwrapped phase.
pub fn equivariant_degree_parity(r: &ScalarField<CircleGrid>, tol: f64) -> Result<Z2> {
    let grid = r.grid;
    let equiv = (0..grid.len())
        .map(|j| (r.values[grid.pair(j)] - r.values[j].conj()).norm())
        .fold(0.0, f64::max);
    if equiv > tol {
        return Err(Error::NotEquivariant(equiv));
    }
    let r0 = r.values[grid.index_zero()];
    let rpi = r.values[grid.index_pi()];
    let mut signs = Vec::new();
    for v in [r0, rpi] {
        let dp = (v - Complex64::new(1.0, 0.0)).norm();
        let dm = (v + Complex64::new(1.0, 0.0)).norm();
        if dp.min(dm) > tol {
            return Err(Error::NotSignLike(dp.min(dm)));
        }
        signs.push(if dp <= dm { Z2::Plus } else { Z2::Minus });
    }
    let parity = signs[0] * signs[1];
    let (_, w) = unwrap_phase_1d(r)?;
    if Z2::from_parity(w) != parity {
        return Err(Error::CrossCheckFailure(format!(
            "fixed-point ratio {parity} disagrees with winding {w}"
        )));
    }
    Ok(parity)
}
