//! Shared generators for the randomized verification suites: Haar-ish
//! unitaries, banded unitary loop fields (products of projector factors),
//! involution-invariant unitary fields, and sewing-preserving
//! deformations.

#![allow(dead_code)]

use diii_core::field::{MatrixField, SewingField};
use diii_core::grid::CircleGrid;
use diii_core::sewing::unwrap_phase_1d;
use diii_core::{CMatrix, CVector};
use nalgebra::linalg::SymmetricEigen;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_complex_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    })
}

pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let a = random_complex_matrix(rng, n, n);
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for i in 0..n {
        let d = r[(i, i)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for row in 0..n {
                q[(row, i)] *= phase;
            }
        }
    }
    q
}

pub fn random_skew(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let a = random_complex_matrix(rng, n, n);
    (&a - a.transpose()).map(|z| z * 0.5)
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let a = random_complex_matrix(rng, n, n);
    (&a + a.adjoint()).map(|z| z * 0.5)
}

/// `exp(i s H)` for Hermitian `H`.
pub fn exp_i_hermitian(h: &CMatrix, s: f64) -> CMatrix {
    let eig = SymmetricEigen::new(h.clone());
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        h.nrows(),
        eig.eigenvalues
            .iter()
            .map(|&l| Complex64::from_polar(1.0, s * l)),
    ));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Orthogonal projector onto a random subspace of dimension 1..n-1.
pub fn random_projector(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let rank = 1 + rng.random_range(0..n - 1);
    let u = random_unitary(rng, n);
    let cols = u.view((0, 0), (n, rank)).into_owned();
    &cols * cols.adjoint()
}

/// A unitary trigonometric-polynomial loop: `U0 prod_j (P_j + e^{i e_j k}(1 - P_j))`
/// with `e_j = +/-1`. Bandwidth at most `factors`; the winding of its
/// determinant is `sum_j e_j (n - rank P_j)`.
pub fn random_poly_unitary_field(
    rng: &mut ChaCha8Rng,
    grid: CircleGrid,
    n: usize,
    factors: usize,
) -> MatrixField<CircleGrid> {
    let u0 = random_unitary(rng, n);
    let specs: Vec<(CMatrix, f64)> = (0..factors)
        .map(|_| {
            let p = random_projector(rng, n);
            let eps = if rng.random::<bool>() { 1.0 } else { -1.0 };
            (p, eps)
        })
        .collect();
    grid.sample_matrix(move |k| {
        let mut h = u0.clone();
        for (p, eps) in &specs {
            let z = Complex64::from_polar(1.0, eps * k);
            let factor = p + (CMatrix::identity(n, n) - p).map(|x| x * z);
            h *= factor;
        }
        h
    })
    .expect("poly unitary sample")
}

/// An involution-invariant unitary field `exp(i f(k) A)` with an even
/// trigonometric profile `f`.
pub fn random_invariant_unitary_field(
    rng: &mut ChaCha8Rng,
    grid: CircleGrid,
    n: usize,
) -> MatrixField<CircleGrid> {
    let a = random_hermitian(rng, n);
    let c0 = rng.random::<f64>() - 0.5;
    let c1 = rng.random::<f64>() - 0.5;
    let c2 = rng.random::<f64>() - 0.5;
    grid.sample_matrix(move |k| exp_i_hermitian(&a, c0 + c1 * k.cos() + c2 * (2.0 * k).cos()))
        .expect("invariant unitary sample")
}

/// A small sewing-preserving deformation of `q`: the congruence by
/// `exp(i eps A(k))` with a trigonometric Hermitian profile. The
/// determinant winding of such a factor vanishes, so the invariant is
/// unchanged along the path.
pub fn random_sewing_deformation(
    rng: &mut ChaCha8Rng,
    q: &SewingField<CircleGrid>,
    eps: f64,
) -> SewingField<CircleGrid> {
    let n = q.rank;
    let a0 = random_hermitian(rng, n);
    let a1 = random_hermitian(rng, n);
    let a2 = random_hermitian(rng, n);
    let h = q
        .grid
        .sample_matrix(move |k| {
            let prof = &a0 + a1.map(|z| z * k.cos()) + a2.map(|z| z * k.sin());
            exp_i_hermitian(&(&prof + prof.adjoint()).map(|z| z * 0.5), eps)
        })
        .expect("deformation sample");
    diii_core::invariants::apply_intertwiner(q, &h).expect("deformed field")
}

/// Winding number of `det h` around the circle.
pub fn det_winding(h: &MatrixField<CircleGrid>) -> i64 {
    let d = h.det_field();
    let unit =
        diii_core::field::ScalarField::new(d.grid, d.values.iter().map(|z| z / z.norm()).collect())
            .expect("unimodular det");
    unwrap_phase_1d(&unit).expect("unwrap det h").1
}
