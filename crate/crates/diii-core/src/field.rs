//! Grid-sampled fields: unimodular scalars, unitary matrix fields, sewing
//! fields and Hamiltonian fields, over either involutive grid.

use crate::error::{Error, Result};
use crate::grid::{CircleGrid, InvolutionGrid, TorusGrid};
use crate::linalg;
use crate::CMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

/// A complex scalar sample per grid point (determinant fields, square-root
/// branches, intertwiner determinants).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<G: InvolutionGrid> {
    pub grid: G,
    pub values: Vec<Complex64>,
}

impl<G: InvolutionGrid> ScalarField<G> {
    pub fn new(grid: G, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if !values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(ScalarField { grid, values })
    }

    pub fn at(&self, idx: usize) -> Complex64 {
        self.values[idx]
    }

    /// Max deviation of |value| from 1.
    pub fn unimodularity_residual(&self) -> f64 {
        self.values
            .iter()
            .map(|z| (z.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

impl ScalarField<TorusGrid> {
    /// Restriction to the coordinate circle through the base point (0, 0).
    pub fn restrict_to_circle(&self, axis: u8) -> ScalarField<CircleGrid> {
        let indices = self.grid.axis_circle_indices(axis);
        ScalarField {
            grid: self.grid.axis_grid(axis),
            values: indices.iter().map(|&i| self.values[i]).collect(),
        }
    }
}

/// A continuous phase lift: `e^{i theta(x)}` reproduces the source
/// unimodular field, with neighbouring increments below pi.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField<G: InvolutionGrid> {
    pub grid: G,
    pub theta: Vec<f64>,
    /// Lift value at the base index (k = 0).
    pub base_value: f64,
}

/// A square matrix sample per grid point, with no structural constraint
/// beyond a uniform size (intertwiner fields, commutant fields).
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField<G: InvolutionGrid> {
    pub grid: G,
    pub size: usize,
    pub samples: Vec<CMatrix>,
}

impl<G: InvolutionGrid> MatrixField<G> {
    pub fn new(grid: G, samples: Vec<CMatrix>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: samples.len(),
            });
        }
        let size = samples.first().map_or(0, |m| m.nrows());
        for s in &samples {
            if s.nrows() != size || s.ncols() != size {
                return Err(Error::DimensionMismatch {
                    expected: size,
                    found: s.nrows().max(s.ncols()),
                });
            }
            linalg::ensure_finite(s)?;
        }
        Ok(MatrixField {
            grid,
            size,
            samples,
        })
    }

    pub fn at(&self, idx: usize) -> &CMatrix {
        &self.samples[idx]
    }

    /// Pointwise determinants.
    pub fn det_field(&self) -> ScalarField<G> {
        let values = self
            .samples
            .par_iter()
            .map(|m| m.clone().determinant())
            .collect();
        ScalarField {
            grid: self.grid.clone(),
            values,
        }
    }

    /// Max unitarity residual over the grid (operator norm).
    pub fn unitarity_residual(&self) -> f64 {
        self.samples
            .par_iter()
            .map(linalg::unitarity_residual)
            .reduce(|| 0.0, f64::max)
    }
}

impl MatrixField<TorusGrid> {
    pub fn restrict_to_circle(&self, axis: u8) -> MatrixField<CircleGrid> {
        let indices = self.grid.axis_circle_indices(axis);
        MatrixField {
            grid: self.grid.axis_grid(axis),
            size: self.size,
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
        }
    }
}

/// A sewing-matrix field: unitary samples `q(x)` with
/// `q(tau x) = -q(x)^t` across involution pairs, hence skew-symmetric
/// values at the fixed points.
///
/// Construction checks sizes and finiteness only; [`crate::sewing::check_sewing`]
/// produces the residual report, and invariant computations insist on it.
#[derive(Debug, Clone, PartialEq)]
pub struct SewingField<G: InvolutionGrid> {
    pub grid: G,
    pub rank: usize,
    pub samples: Vec<CMatrix>,
    pub tol: f64,
}

impl<G: InvolutionGrid> SewingField<G> {
    pub fn from_samples(grid: G, samples: Vec<CMatrix>, tol: f64) -> Result<Self> {
        let field = MatrixField::new(grid, samples)?;
        Ok(SewingField {
            grid: field.grid,
            rank: field.size,
            samples: field.samples,
            tol,
        })
    }

    pub fn at(&self, idx: usize) -> &CMatrix {
        &self.samples[idx]
    }

    pub fn as_matrix_field(&self) -> MatrixField<G> {
        MatrixField {
            grid: self.grid.clone(),
            size: self.rank,
            samples: self.samples.clone(),
        }
    }
}

impl SewingField<TorusGrid> {
    /// Restriction along `phi_1(k) = (k, 0)` or `phi_2(k) = (0, k)`.
    pub fn restrict_to_circle(&self, axis: u8) -> SewingField<CircleGrid> {
        let indices = self.grid.axis_circle_indices(axis);
        SewingField {
            grid: self.grid.axis_grid(axis),
            rank: self.rank,
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
            tol: self.tol,
        }
    }
}

/// A gapped Hermitian field `H(x)` of even total dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianField<G: InvolutionGrid> {
    pub grid: G,
    /// Total dimension of each sample (2m).
    pub dim: usize,
    pub samples: Vec<CMatrix>,
    /// Smallest |eigenvalue| over all samples.
    pub gap: f64,
}

impl<G: InvolutionGrid> HamiltonianField<G> {
    /// Validates Hermiticity of every sample within `tol` and a spectral
    /// gap above `tol`.
    pub fn new(grid: G, samples: Vec<CMatrix>, tol: f64) -> Result<Self> {
        let field = MatrixField::new(grid, samples)?;
        if field.size % 2 != 0 {
            return Err(Error::OddTotalDimension(field.size));
        }
        let gaps: Result<Vec<f64>> = field
            .samples
            .par_iter()
            .map(|h| linalg::min_abs_eigenvalue(h, tol))
            .collect();
        let gap = gaps?.into_iter().fold(f64::INFINITY, f64::min);
        if gap <= tol {
            return Err(Error::SingularInput(gap));
        }
        Ok(HamiltonianField {
            grid: field.grid,
            dim: field.size,
            samples: field.samples,
            gap,
        })
    }

    pub fn at(&self, idx: usize) -> &CMatrix {
        &self.samples[idx]
    }

    /// Conjugate every sample by a constant unitary: `H'(x) = W H(x) W*`.
    pub fn conjugated(&self, w: &CMatrix) -> Result<Self> {
        if w.nrows() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: w.nrows(),
            });
        }
        let samples = self
            .samples
            .par_iter()
            .map(|h| w * h * w.adjoint())
            .collect();
        Ok(HamiltonianField {
            grid: self.grid.clone(),
            dim: self.dim,
            samples,
            gap: self.gap,
        })
    }
}

impl HamiltonianField<TorusGrid> {
    pub fn restrict_to_circle(&self, axis: u8) -> HamiltonianField<CircleGrid> {
        let indices = self.grid.axis_circle_indices(axis);
        HamiltonianField {
            grid: self.grid.axis_grid(axis),
            dim: self.dim,
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
            gap: self.gap,
        }
    }
}

// sampling entry points live on the grids, where the closure arity is
// fixed by the space

impl CircleGrid {
    pub fn sample_scalar(self, f: impl Fn(f64) -> Complex64 + Sync) -> ScalarField<CircleGrid> {
        let values = (0..self.len())
            .into_par_iter()
            .map(|j| f(self.point(j)))
            .collect();
        ScalarField { grid: self, values }
    }

    pub fn sample_matrix(
        self,
        f: impl Fn(f64) -> CMatrix + Sync,
    ) -> Result<MatrixField<CircleGrid>> {
        let samples: Vec<CMatrix> = (0..self.len())
            .into_par_iter()
            .map(|j| f(self.point(j)))
            .collect();
        MatrixField::new(self, samples)
    }

    pub fn sample_sewing(
        self,
        rank: usize,
        tol: f64,
        f: impl Fn(f64) -> CMatrix + Sync,
    ) -> Result<SewingField<CircleGrid>> {
        let mf = self.sample_matrix(f)?;
        if mf.size != rank {
            return Err(Error::DimensionMismatch {
                expected: rank,
                found: mf.size,
            });
        }
        Ok(SewingField {
            grid: mf.grid,
            rank,
            samples: mf.samples,
            tol,
        })
    }
}

impl TorusGrid {
    pub fn sample_scalar(self, f: impl Fn(f64, f64) -> Complex64 + Sync) -> ScalarField<TorusGrid> {
        let values = (0..self.len())
            .into_par_iter()
            .map(|idx| {
                let (k1, k2) = self.point(idx);
                f(k1, k2)
            })
            .collect();
        ScalarField { grid: self, values }
    }

    pub fn sample_matrix(
        self,
        f: impl Fn(f64, f64) -> CMatrix + Sync,
    ) -> Result<MatrixField<TorusGrid>> {
        let samples: Vec<CMatrix> = (0..self.len())
            .into_par_iter()
            .map(|idx| {
                let (k1, k2) = self.point(idx);
                f(k1, k2)
            })
            .collect();
        MatrixField::new(self, samples)
    }

    pub fn sample_sewing(
        self,
        rank: usize,
        tol: f64,
        f: impl Fn(f64, f64) -> CMatrix + Sync,
    ) -> Result<SewingField<TorusGrid>> {
        let mf = self.sample_matrix(f)?;
        if mf.size != rank {
            return Err(Error::DimensionMismatch {
                expected: rank,
                found: mf.size,
            });
        }
        Ok(SewingField {
            grid: mf.grid,
            rank,
            samples: mf.samples,
            tol,
        })
    }
}
