//! Uniform discretizations of the involutive circle and torus.
//!
//! The involution is momentum negation, `k -> -k` componentwise. Grids are
//! restricted to even sizes so that the fixed points (0 and pi per
//! coordinate) are grid points exactly; the Pfaffian formulas evaluate
//! there and must not be interpolated.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Default number of circle samples.
pub const DEFAULT_N_1D: usize = 256;
/// Default torus sampling per axis.
pub const DEFAULT_N_2D: usize = 64;

/// Common surface of the involutive grids: index count, involution pairing
/// and the self-paired (fixed-point) indices.
pub trait InvolutionGrid: Clone + PartialEq + std::fmt::Debug + Send + Sync {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// Index of the involution partner of `idx`.
    fn pair(&self, idx: usize) -> usize;
    /// Indices with `pair(idx) == idx`, in ascending order.
    fn fixed_points(&self) -> Vec<usize>;
}

/// The circle R/2piZ sampled at `k_j = 2 pi j / n`, with involution
/// `j <-> (n - j) mod n` and fixed points at indices 0 and n/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircleGrid {
    n: usize,
}

impl CircleGrid {
    pub fn new(n: usize) -> Result<Self> {
        if !n.is_multiple_of(2) {
            return Err(Error::OddN(n));
        }
        if n < 4 {
            return Err(Error::TooSmall(n));
        }
        Ok(CircleGrid { n })
    }

    pub fn default_grid() -> Self {
        CircleGrid { n: DEFAULT_N_1D }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Momentum of grid index `j`.
    pub fn point(&self, j: usize) -> f64 {
        2.0 * PI * (j as f64) / (self.n as f64)
    }

    /// Index of k = 0.
    pub fn index_zero(&self) -> usize {
        0
    }

    /// Index of k = pi.
    pub fn index_pi(&self) -> usize {
        self.n / 2
    }
}

impl InvolutionGrid for CircleGrid {
    fn len(&self) -> usize {
        self.n
    }

    fn pair(&self, idx: usize) -> usize {
        (self.n - idx) % self.n
    }

    fn fixed_points(&self) -> Vec<usize> {
        vec![0, self.n / 2]
    }
}

/// The torus sampled on an `n1 x n2` product lattice, flattened
/// lexicographically (`idx = j1 * n2 + j2`), with componentwise negation
/// and four fixed points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusGrid {
    n1: usize,
    n2: usize,
}

impl TorusGrid {
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        for n in [n1, n2] {
            if n % 2 != 0 {
                return Err(Error::OddN(n));
            }
            if n < 4 {
                return Err(Error::TooSmall(n));
            }
        }
        Ok(TorusGrid { n1, n2 })
    }

    pub fn default_grid() -> Self {
        TorusGrid {
            n1: DEFAULT_N_2D,
            n2: DEFAULT_N_2D,
        }
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    /// Flat index of lattice coordinates `(j1, j2)`.
    pub fn index(&self, j1: usize, j2: usize) -> usize {
        j1 * self.n2 + j2
    }

    /// Lattice coordinates of a flat index.
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx / self.n2, idx % self.n2)
    }

    /// Momentum pair of a flat index.
    pub fn point(&self, idx: usize) -> (f64, f64) {
        let (j1, j2) = self.coords(idx);
        (
            2.0 * PI * (j1 as f64) / (self.n1 as f64),
            2.0 * PI * (j2 as f64) / (self.n2 as f64),
        )
    }

    /// Flat indices of the coordinate circle through the base point (0, 0):
    /// `(k, 0)` for axis 1 and `(0, k)` for axis 2.
    pub fn axis_circle_indices(&self, axis: u8) -> Vec<usize> {
        match axis {
            1 => (0..self.n1).map(|j| self.index(j, 0)).collect(),
            2 => (0..self.n2).map(|j| self.index(0, j)).collect(),
            _ => panic!("axis must be 1 or 2"),
        }
    }

    /// The 1d grid matching a coordinate circle.
    pub fn axis_grid(&self, axis: u8) -> CircleGrid {
        let n = match axis {
            1 => self.n1,
            2 => self.n2,
            _ => panic!("axis must be 1 or 2"),
        };
        CircleGrid { n }
    }
}

impl InvolutionGrid for TorusGrid {
    fn len(&self) -> usize {
        self.n1 * self.n2
    }

    fn pair(&self, idx: usize) -> usize {
        let (j1, j2) = self.coords(idx);
        self.index((self.n1 - j1) % self.n1, (self.n2 - j2) % self.n2)
    }

    fn fixed_points(&self) -> Vec<usize> {
        let mut fps = vec![
            self.index(0, 0),
            self.index(0, self.n2 / 2),
            self.index(self.n1 / 2, 0),
            self.index(self.n1 / 2, self.n2 / 2),
        ];
        fps.sort_unstable();
        fps
    }
}
