//! The on-disk sample format: grid-sampled complex matrix fields with
//! explicit [re, im] pairs, ordered index-lexicographically over grid
//! points and row-major within each matrix.

use diii_core::grid::{CircleGrid, TorusGrid};
use diii_core::{CMatrix, Error as CoreError, HamiltonianField, SewingField};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const SAMPLE_SCHEMA: &str = "diii-sample/1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleFile {
    pub schema: String,
    pub space: String,
    pub grid: Vec<usize>,
    pub rank: usize,
    pub kind: String,
    pub data: Vec<[f64; 2]>,
}

#[derive(Debug)]
pub enum SampleError {
    Schema(String),
    Core(CoreError),
}

impl std::fmt::Display for SampleError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SampleError::Schema(s) => write!(f, "invalid sample file: {s}"),
            SampleError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<CoreError> for SampleError {
    fn from(e: CoreError) -> Self {
        SampleError::Core(e)
    }
}

pub enum LoadedField {
    CircleSewing(SewingField<CircleGrid>),
    TorusSewing(SewingField<TorusGrid>),
    CircleHamiltonian(HamiltonianField<CircleGrid>),
    TorusHamiltonian(HamiltonianField<TorusGrid>),
}

impl SampleFile {
    /// Matrix dimension of each stored sample.
    pub fn matrix_dim(&self) -> Result<usize, SampleError> {
        match self.kind.as_str() {
            "sewing" => Ok(self.rank),
            "hamiltonian" => Ok(2 * self.rank),
            other => Err(SampleError::Schema(format!("unknown kind `{other}`"))),
        }
    }

    pub fn points(&self) -> usize {
        self.grid.iter().product()
    }

    pub fn validate_shape(&self) -> Result<(), SampleError> {
        if self.schema != SAMPLE_SCHEMA {
            return Err(SampleError::Schema(format!(
                "schema `{}`, expected `{SAMPLE_SCHEMA}`",
                self.schema
            )));
        }
        match (self.space.as_str(), self.grid.len()) {
            ("circle", 1) | ("torus", 2) => {}
            (space, n) => {
                return Err(SampleError::Schema(format!(
                    "space `{space}` with {n} grid sizes"
                )))
            }
        }
        let dim = self.matrix_dim()?;
        let expected = self.points() * dim * dim;
        if self.data.len() != expected {
            return Err(SampleError::Schema(format!(
                "data length {} does not match grid x dim^2 = {expected}",
                self.data.len()
            )));
        }
        if !self
            .data
            .iter()
            .all(|p| p[0].is_finite() && p[1].is_finite())
        {
            return Err(SampleError::Schema("non-finite entry".into()));
        }
        Ok(())
    }

    fn matrices(&self) -> Result<Vec<CMatrix>, SampleError> {
        let dim = self.matrix_dim()?;
        let per = dim * dim;
        Ok((0..self.points())
            .map(|p| {
                CMatrix::from_fn(dim, dim, |r, c| {
                    let [re, im] = self.data[p * per + r * dim + c];
                    Complex64::new(re, im)
                })
            })
            .collect())
    }

    pub fn load(&self, tol: f64) -> Result<LoadedField, SampleError> {
        self.validate_shape()?;
        let samples = self.matrices()?;
        match (self.space.as_str(), self.kind.as_str()) {
            ("circle", "sewing") => {
                let grid = CircleGrid::new(self.grid[0])?;
                Ok(LoadedField::CircleSewing(SewingField::from_samples(
                    grid, samples, tol,
                )?))
            }
            ("torus", "sewing") => {
                let grid = TorusGrid::new(self.grid[0], self.grid[1])?;
                Ok(LoadedField::TorusSewing(SewingField::from_samples(
                    grid, samples, tol,
                )?))
            }
            ("circle", "hamiltonian") => {
                let grid = CircleGrid::new(self.grid[0])?;
                Ok(LoadedField::CircleHamiltonian(HamiltonianField::new(
                    grid, samples, tol,
                )?))
            }
            ("torus", "hamiltonian") => {
                let grid = TorusGrid::new(self.grid[0], self.grid[1])?;
                Ok(LoadedField::TorusHamiltonian(HamiltonianField::new(
                    grid, samples, tol,
                )?))
            }
            _ => unreachable!("validated above"),
        }
    }

    pub fn from_circle_sewing(q: &SewingField<CircleGrid>) -> SampleFile {
        SampleFile {
            schema: SAMPLE_SCHEMA.into(),
            space: "circle".into(),
            grid: vec![q.grid.n()],
            rank: q.rank,
            kind: "sewing".into(),
            data: flatten(&q.samples),
        }
    }

    pub fn from_torus_sewing(q: &SewingField<TorusGrid>) -> SampleFile {
        SampleFile {
            schema: SAMPLE_SCHEMA.into(),
            space: "torus".into(),
            grid: vec![q.grid.n1(), q.grid.n2()],
            rank: q.rank,
            kind: "sewing".into(),
            data: flatten(&q.samples),
        }
    }
}

fn flatten(samples: &[CMatrix]) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    for m in samples {
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                out.push([m[(r, c)].re, m[(r, c)].im]);
            }
        }
    }
    out
}
