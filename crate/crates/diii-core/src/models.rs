//! Analytic model fields: the constant symplectic field, the winding field
//! `q_-`, its torus pullbacks along the coordinate projections, the
//! sphere-pullback field detecting the strong phase, and the intertwiner
//! fixtures used to separate weak from strong equivalence.

use crate::error::{Error, Result};
use crate::field::{MatrixField, SewingField};
use crate::grid::{CircleGrid, TorusGrid};
use crate::linalg::symplectic_form;
use crate::{CMatrix, CVector};
use num_complex::Complex64;
use std::fmt;

/// Validation tolerance carried by all zoo fields.
pub const MODEL_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The constant value `Q` of the trivial model, size 2n.
pub fn q_const_matrix(n: usize) -> CMatrix {
    symplectic_form(n)
}

/// Constant field `q(k) = Q` on the circle; nu = +1.
pub fn q_const_circle(n: usize, grid: CircleGrid) -> SewingField<CircleGrid> {
    let q = q_const_matrix(n);
    grid.sample_sewing(2 * n, MODEL_TOL, |_| q.clone())
        .expect("constant sample")
}

/// Constant field `q(k) = Q` on the torus; full triple (+1, +1, +1).
pub fn q_const_torus(n: usize, grid: TorusGrid) -> SewingField<TorusGrid> {
    let q = q_const_matrix(n);
    grid.sample_sewing(2 * n, MODEL_TOL, |_, _| q.clone())
        .expect("constant sample")
}

/// Sample of the nontrivial circle model at momentum `k`: a phase-winding
/// 2x2 corner block `[[0, e^{ik}], [-e^{-ik}, 0]]` padded by the symplectic
/// form on the remaining 2(n-1) directions.
pub fn q_minus_matrix(n: usize, k: f64) -> CMatrix {
    assert!(n >= 1);
    let m = 2 * n;
    let mut q = CMatrix::zeros(m, m);
    q[(0, 1)] = Complex64::from_polar(1.0, k);
    q[(1, 0)] = -Complex64::from_polar(1.0, -k);
    for i in 0..n - 1 {
        q[(2 + i, 2 + (n - 1) + i)] = c(-1.0, 0.0);
        q[(2 + (n - 1) + i, 2 + i)] = c(1.0, 0.0);
    }
    q
}

/// The nontrivial circle model; nu = -1 for every n.
///
/// Its Pfaffians at the fixed points are `(-1)^{n(n-1)/2}` at k = 0 and
/// the opposite sign at k = pi, and its determinant is constantly 1
/// (it must square to the Pfaffian values).
pub fn q_minus(n: usize, grid: CircleGrid) -> SewingField<CircleGrid> {
    grid.sample_sewing(2 * n, MODEL_TOL, |k| q_minus_matrix(n, k))
        .expect("analytic sample")
}

/// Pullback of `q_-` along a coordinate projection of the torus; the weak
/// model for that axis.
pub fn q_weak(axis: u8, n: usize, grid: TorusGrid) -> SewingField<TorusGrid> {
    grid.sample_sewing(2 * n, MODEL_TOL, |k1, k2| {
        q_minus_matrix(n, if axis == 1 { k1 } else { k2 })
    })
    .expect("analytic sample")
}

/// Sewing matrix on the sphere with unit FKMM invariant: unitary, det = 1,
/// equivariant for `(x0, x1, x2) -> (x0, -x1, -x2)`, with `q(+pole) = Q`
/// and `q(-pole) = -Q`.
pub fn sphere_sewing(x: [f64; 3]) -> CMatrix {
    let [x0, x1, x2] = x;
    CMatrix::from_row_slice(2, 2, &[c(0.0, x1), c(-x0, x2), c(x0, x2), c(0.0, -x1)])
}

/// Equivariant map from the torus onto the sphere carrying the fixed
/// points (0,0), (pi,0), (0,pi) to the north pole and (pi,pi) to the south
/// pole.
pub fn pi0_map(k1: f64, k2: f64) -> [f64; 3] {
    let a1 = 1.0 - k1.cos();
    let a2 = 1.0 - k2.cos();
    let s = a1 * a2 / 4.0;
    let x0 = 1.0 - 2.0 * s;
    let t1 = k1.sin() * a2;
    let t2 = k2.sin() * a1;
    let d = t1 * t1 + t2 * t2;
    let radial = (4.0 * s * (1.0 - s)).max(0.0);
    let (mut x1, mut x2) = (0.0, 0.0);
    if d > 1e-300 {
        let scale = (radial / d).sqrt();
        x1 = scale * t1;
        x2 = scale * t2;
    }
    let norm = (x0 * x0 + x1 * x1 + x2 * x2).sqrt();
    [x0 / norm, x1 / norm, x2 / norm]
}

/// The strong torus model `q_s = q_sphere . pi0`; full triple (+1, +1, -1).
pub fn q_strong_2d(grid: TorusGrid) -> SewingField<TorusGrid> {
    grid.sample_sewing(2, MODEL_TOL, |k1, k2| sphere_sewing(pi0_map(k1, k2)))
        .expect("analytic sample")
}

/// The intertwiner fixtures separating plain from strong equivalence:
/// `q0' = phi0(tau.)^t q0 phi0` with a constant (hence invariant) phi0,
/// while `q1_rot = phi1(tau.)^t q0 phi1` needs a non-invariant phi1.
pub struct EquivalenceFixtures {
    pub q0: SewingField<CircleGrid>,
    pub q0_prime: SewingField<CircleGrid>,
    pub phi0: MatrixField<CircleGrid>,
    pub q1_rot: SewingField<CircleGrid>,
    pub phi1: MatrixField<CircleGrid>,
}

pub fn equivalence_fixtures(grid: CircleGrid) -> EquivalenceFixtures {
    let q = q_const_matrix(1);
    let q0 = grid
        .sample_sewing(2, MODEL_TOL, |_| q.clone())
        .expect("constant");
    let q0_prime = grid
        .sample_sewing(2, MODEL_TOL, |_| q.map(|z| -z))
        .expect("constant");
    let phi0 = grid
        .sample_matrix(|_| {
            CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]))
        })
        .expect("constant");
    let q1_rot = grid
        .sample_sewing(2, MODEL_TOL, |k| {
            CMatrix::from_row_slice(
                2,
                2,
                &[
                    c(k.sin(), 0.0),
                    c(-k.cos(), 0.0),
                    c(k.cos(), 0.0),
                    c(k.sin(), 0.0),
                ],
            )
        })
        .expect("analytic sample");
    let phi1 = grid
        .sample_matrix(|k| {
            let h = k / 2.0;
            let rot = CMatrix::from_row_slice(
                2,
                2,
                &[
                    c(h.sin(), 0.0),
                    c(-h.cos(), 0.0),
                    c(h.cos(), 0.0),
                    c(h.sin(), 0.0),
                ],
            );
            rot.map(|z| z * Complex64::from_polar(1.0, h))
        })
        .expect("analytic sample");
    EquivalenceFixtures {
        q0,
        q0_prime,
        phi0,
        q1_rot,
        phi1,
    }
}

/// Base space of a model or sample file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Circle,
    Torus,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Circle => write!(f, "circle"),
            Space::Torus => write!(f, "torus"),
        }
    }
}

/// A model field on either space.
pub enum ModelField {
    Circle(SewingField<CircleGrid>),
    Torus(SewingField<TorusGrid>),
}

/// Named models addressable from the command line (all at n = 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelId {
    QPlus,
    QMinus,
    Q0,
    QW1,
    QW2,
    QS,
}

impl ModelId {
    pub const ALL: [ModelId; 6] = [
        ModelId::QPlus,
        ModelId::QMinus,
        ModelId::Q0,
        ModelId::QW1,
        ModelId::QW2,
        ModelId::QS,
    ];

    pub fn parse(name: &str) -> Result<ModelId> {
        Self::ALL
            .iter()
            .copied()
            .find(|m| m.name() == name)
            .ok_or_else(|| Error::UnknownModel(name.to_string()))
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelId::QPlus => "q_plus",
            ModelId::QMinus => "q_minus",
            ModelId::Q0 => "q_0",
            ModelId::QW1 => "q_w1",
            ModelId::QW2 => "q_w2",
            ModelId::QS => "q_s",
        }
    }

    pub fn space(self) -> Space {
        match self {
            ModelId::QPlus | ModelId::QMinus => Space::Circle,
            _ => Space::Torus,
        }
    }

    pub fn rank(self) -> usize {
        2
    }

    /// The invariant values the model is built to reproduce.
    pub fn expected_invariants(self) -> &'static str {
        match self {
            ModelId::QPlus => "nu=+1",
            ModelId::QMinus => "nu=-1",
            ModelId::Q0 => "triple=(+1,+1,+1)",
            ModelId::QW1 => "triple=(-1,+1,+1)",
            ModelId::QW2 => "triple=(+1,-1,+1)",
            ModelId::QS => "triple=(+1,+1,-1)",
        }
    }

    pub fn emit(self, grid: &[usize]) -> Result<ModelField> {
        match self.space() {
            Space::Circle => {
                let n = match grid {
                    [] => crate::grid::DEFAULT_N_1D,
                    [n] => *n,
                    _ => return Err(Error::GridMismatch),
                };
                let g = CircleGrid::new(n)?;
                Ok(ModelField::Circle(match self {
                    ModelId::QPlus => q_const_circle(1, g),
                    ModelId::QMinus => q_minus(1, g),
                    _ => unreachable!(),
                }))
            }
            Space::Torus => {
                let (n1, n2) = match grid {
                    [] => (crate::grid::DEFAULT_N_2D, crate::grid::DEFAULT_N_2D),
                    [n] => (*n, *n),
                    [n1, n2] => (*n1, *n2),
                    _ => return Err(Error::GridMismatch),
                };
                let g = TorusGrid::new(n1, n2)?;
                Ok(ModelField::Torus(match self {
                    ModelId::Q0 => q_const_torus(1, g),
                    ModelId::QW1 => q_weak(1, 1, g),
                    ModelId::QW2 => q_weak(2, 1, g),
                    ModelId::QS => q_strong_2d(g),
                    _ => unreachable!(),
                }))
            }
        }
    }
}
