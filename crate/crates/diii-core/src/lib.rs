//! Numerical Z2 invariants of class-DIII band insulators.
//!
//! The crate computes the Z2-valued topological invariants attached to
//! time-reversal/particle-hole symmetric gapped Hamiltonians (class DIII)
//! sampled on the involutive circle or torus, entirely from their sewing
//! matrices:
//!
//! * fixed-point Pfaffian formulas (Teo-Kane on the circle, Fu-Kane-Mele
//!   on the torus) with continuously tracked determinant square roots,
//! * the equivalent degree formula through an explicit trivialization of
//!   the determinant line,
//! * the Z2 index of the associated block Toeplitz operator (bulk-edge
//!   correspondence), computed exactly for banded unitary symbols,
//! * gerbe-style fixed-point sign products,
//! * strong/weak invariant triples for torus models.
//!
//! Everything is dense double-precision complex linear algebra; fields are
//! sampled on uniform grids that contain the involution fixed points
//! exactly.

pub mod error;
pub mod field;
pub mod grid;
pub mod invariants;
pub mod linalg;
pub mod models;
pub mod sewing;
pub mod symmetry;
pub mod toeplitz;
pub mod z2;

pub use error::{Error, Result};
pub use field::{HamiltonianField, MatrixField, PhaseField, ScalarField, SewingField};
pub use grid::{CircleGrid, InvolutionGrid, TorusGrid};
pub use z2::Z2;

use num_complex::Complex64;

/// Dense complex matrix, the universal numeric carrier of the crate.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex vector.
pub type CVector = nalgebra::DVector<Complex64>;

/// Threshold under which a nominally exact sign is rounded to +/-1.
///
/// All invariant formulas produce values that are exactly +/-1 in exact
/// arithmetic; the distance to the rounded sign is reported as a health
/// diagnostic.
pub const SIGN_ROUND_EPS: f64 = 1e-6;

/// Fixed-point branch values this close to +/-1 are snapped exactly.
pub const SNAP_EPS: f64 = 1e-6;

/// Default validation tolerance for sampled fields.
pub const DEFAULT_TOL: f64 = 1e-8;
