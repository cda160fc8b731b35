//! Antiunitary symmetry algebra of class DIII: the defining relations,
//! reduction to the standard block form, passage between Hamiltonian
//! fields and their sewing matrices, and intertwiner verification.
//!
//! An antiunitary operator is stored as its unitary part `U`, acting as
//! `v -> U conj(v)`. Compositions then become plain matrix identities:
//! `(U_a K)(U_b K) = U_a conj(U_b)` as a linear map, and conjugating an
//! antiunitary by a unitary `W` maps its unitary part to `W U W^t`.

use crate::error::{Error, Result};
use crate::field::{HamiltonianField, MatrixField, SewingField};
use crate::grid::InvolutionGrid;
use crate::linalg::{self, op_norm};
use crate::{CMatrix, CVector};
use nalgebra::linalg::SymmetricEigen;
use num_complex::Complex64;
use rayon::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// An antiunitary map `v -> U conj(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiUnitaryOp {
    pub unitary_part: CMatrix,
}

impl AntiUnitaryOp {
    pub fn new(unitary_part: CMatrix, tol: f64) -> Result<Self> {
        linalg::ensure_finite(&unitary_part)?;
        let res = linalg::unitarity_residual(&unitary_part);
        if res > tol {
            return Err(Error::NotUnitary(res));
        }
        Ok(AntiUnitaryOp { unitary_part })
    }

    pub fn dim(&self) -> usize {
        self.unitary_part.nrows()
    }

    /// Linear part of the composition `self . other` of two antiunitaries.
    pub fn compose_linear(&self, other: &AntiUnitaryOp) -> CMatrix {
        &self.unitary_part * other.unitary_part.conjugate()
    }

    /// The square `self . self` as a linear map.
    pub fn square(&self) -> CMatrix {
        &self.unitary_part * self.unitary_part.conjugate()
    }

    /// Conjugation by a unitary: `W (U K) W* = (W U W^t) K`.
    pub fn conjugated(&self, w: &CMatrix) -> AntiUnitaryOp {
        AntiUnitaryOp {
            unitary_part: w * &self.unitary_part * w.transpose(),
        }
    }
}

/// The time-reversal/particle-hole/chiral triple with its defining algebra
/// verified at construction: `T^2 = -1`, `C^2 = +1`, `TC = -CT`, and the
/// induced chiral symmetry `chi = TC` with `chi^2 = 1`, `T chi = -chi T`,
/// `C chi = -chi C`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryTriple {
    pub t: AntiUnitaryOp,
    pub c: AntiUnitaryOp,
    pub chi: CMatrix,
}

impl SymmetryTriple {
    pub fn new(t: AntiUnitaryOp, c: AntiUnitaryOp, tol: f64) -> Result<Self> {
        let dim = t.dim();
        if c.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: c.dim(),
            });
        }
        if !dim.is_multiple_of(2) {
            return Err(Error::OddTotalDimension(dim));
        }
        let id = CMatrix::identity(dim, dim);
        let checks: [(&'static str, CMatrix); 5] = [
            ("T^2 = -1", t.square() + &id),
            ("C^2 = +1", c.square() - &id),
            ("TC = -CT", t.compose_linear(&c) + c.compose_linear(&t)),
            (
                "chi^2 = 1",
                t.compose_linear(&c) * t.compose_linear(&c) - &id,
            ),
            (
                "T chi = -chi T",
                // antiunitary T composed with linear chi on either side
                &t.unitary_part * t.compose_linear(&c).conjugate()
                    + t.compose_linear(&c) * &t.unitary_part,
            ),
        ];
        for (relation, dev) in checks {
            let residual = op_norm(&dev);
            if residual > tol {
                return Err(Error::SymmetryViolation { relation, residual });
            }
        }
        let chi = t.compose_linear(&c);
        Ok(SymmetryTriple { t, c, chi })
    }

    pub fn dim(&self) -> usize {
        self.t.dim()
    }

    /// The standard triple on C^{2m}: `chi = diag(1_m, -1_m)` and
    /// off-diagonal antiunitary blocks.
    pub fn standard(m: usize) -> Self {
        let mut ut = CMatrix::zeros(2 * m, 2 * m);
        let mut uc = CMatrix::zeros(2 * m, 2 * m);
        for i in 0..m {
            ut[(i, m + i)] = c(-1.0, 0.0);
            ut[(m + i, i)] = c(1.0, 0.0);
            uc[(i, m + i)] = c(-1.0, 0.0);
            uc[(m + i, i)] = c(-1.0, 0.0);
        }
        let mut chi = CMatrix::zeros(2 * m, 2 * m);
        for i in 0..m {
            chi[(i, i)] = c(1.0, 0.0);
            chi[(m + i, m + i)] = c(-1.0, 0.0);
        }
        SymmetryTriple {
            t: AntiUnitaryOp { unitary_part: ut },
            c: AntiUnitaryOp { unitary_part: uc },
            chi,
        }
    }

    /// Is this the standard triple, and how far from it.
    pub fn deviation_from_standard(&self) -> f64 {
        let std = SymmetryTriple::standard(self.dim() / 2);
        op_norm(&(&self.t.unitary_part - &std.t.unitary_part))
            .max(op_norm(&(&self.c.unitary_part - &std.c.unitary_part)))
            .max(op_norm(&(&self.chi - &std.chi)))
    }

    /// Conjugate the whole triple by a unitary `W`.
    pub fn conjugated(&self, w: &CMatrix) -> SymmetryTriple {
        SymmetryTriple {
            t: self.t.conjugated(w),
            c: self.c.conjugated(w),
            chi: w * &self.chi * w.adjoint(),
        }
    }
}

/// Residuals of the class-DIII commutation relations of a Hamiltonian
/// field with a symmetry triple.
#[derive(Debug, Clone, Copy)]
pub struct DiiiReport {
    /// max ||U_C conj(H(x)) + H(tau x) U_C||.
    pub c_residual: f64,
    /// max ||U_T conj(H(x)) - H(tau x) U_T||.
    pub t_residual: f64,
    /// max ||chi H(x) + H(x) chi||.
    pub chiral_residual: f64,
    pub tol: f64,
}

impl DiiiReport {
    pub fn pass(&self) -> bool {
        self.max_residual() <= self.tol
    }

    pub fn max_residual(&self) -> f64 {
        self.c_residual
            .max(self.t_residual)
            .max(self.chiral_residual)
    }
}

/// Check the class-DIII relations sample-wise across involution pairs.
pub fn verify_class_diii<G: InvolutionGrid>(
    h: &HamiltonianField<G>,
    sym: &SymmetryTriple,
    tol: f64,
) -> Result<DiiiReport> {
    if sym.dim() != h.dim {
        return Err(Error::DimensionMismatch {
            expected: h.dim,
            found: sym.dim(),
        });
    }
    let (uc, ut, chi) = (&sym.c.unitary_part, &sym.t.unitary_part, &sym.chi);
    let residuals: Vec<(f64, f64, f64)> = (0..h.grid.len())
        .into_par_iter()
        .map(|j| {
            let hx = &h.samples[j];
            let htx = &h.samples[h.grid.pair(j)];
            let conj_h = hx.conjugate();
            let rc = op_norm(&(uc * &conj_h + htx * uc));
            let rt = op_norm(&(ut * &conj_h - htx * ut));
            let rchi = op_norm(&(chi * hx + hx * chi));
            (rc, rt, rchi)
        })
        .collect();
    let fold = |pick: fn(&(f64, f64, f64)) -> f64| residuals.iter().map(pick).fold(0.0, f64::max);
    Ok(DiiiReport {
        c_residual: fold(|r| r.0),
        t_residual: fold(|r| r.1),
        chiral_residual: fold(|r| r.2),
        tol,
    })
}

fn qr_orthonormalize(cols: Vec<CVector>, dim: usize) -> CMatrix {
    let k = cols.len();
    let mut a = CMatrix::zeros(dim, k);
    for (j, v) in cols.iter().enumerate() {
        a.set_column(j, v);
    }
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for i in 0..k {
        let d = r[(i, i)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for row in 0..dim {
                q[(row, i)] *= phase;
            }
        }
    }
    q
}

/// Reduce a symmetry triple to the standard block form.
///
/// Returns `(W, standardized)` where conjugation by `W` carries the input
/// onto the exact standard triple within 100*tol. The construction
/// diagonalizes `chi` (positive eigenspace first, QR-orthonormalized with
/// positive diagonal), reads off the upper off-diagonal block of `T` in
/// that basis and absorbs it with a block-diagonal correction.
pub fn standard_form(sym: &SymmetryTriple, tol: f64) -> Result<(CMatrix, SymmetryTriple)> {
    let dim = sym.dim();
    let m = dim / 2;
    let herm_chi = (&sym.chi + sym.chi.adjoint()).map(|z| z * 0.5);
    let eig = SymmetricEigen::try_new(herm_chi, f64::EPSILON, 2000)
        .ok_or_else(|| Error::NoConvergence("chiral eigendecomposition".into()))?;
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(i).into_owned();
        if l > 0.0 {
            plus.push(v);
        } else {
            minus.push(v);
        }
    }
    if plus.len() != minus.len() {
        return Err(Error::UnequalChiralEigenspaces {
            plus: plus.len(),
            minus: minus.len(),
        });
    }
    let qp = qr_orthonormalize(plus, dim);
    let qm = qr_orthonormalize(minus, dim);
    let mut w1 = CMatrix::zeros(dim, dim);
    for j in 0..m {
        w1.set_column(j, &qp.column(j).into_owned());
        w1.set_column(m + j, &qm.column(j).into_owned());
    }
    // basis change to the chi-diagonal frame is conjugation by W1*
    let w1h = w1.adjoint();
    let t1 = sym.t.conjugated(&w1h);
    // in this frame T = [[0, U~ K], [-U~^t K, 0]] (any unitary U~ squares
    // this to -1); absorbing -conj(U~) into the lower block lands on the
    // standard T
    let u_tilde = t1.unitary_part.view((0, m), (m, m)).into_owned();
    let mut w2 = CMatrix::identity(dim, dim);
    w2.view_mut((m, m), (m, m))
        .copy_from(&(-u_tilde.conjugate()));
    let w = &w2 * &w1h;

    let standardized = SymmetryTriple::standard(m);
    let got = sym.conjugated(&w);
    let residual = op_norm(&(&got.t.unitary_part - &standardized.t.unitary_part))
        .max(op_norm(
            &(&got.c.unitary_part - &standardized.c.unitary_part),
        ))
        .max(op_norm(&(&got.chi - &standardized.chi)));
    if residual > 100.0 * tol {
        return Err(Error::NoConvergence(format!(
            "standard-form residual {residual:.3e} above 100*tol"
        )));
    }
    Ok((w, standardized))
}

/// Extract the half-size block of a unitary commuting with the standard
/// `chi` and `T`: such a `V` is `diag(phi, conj(phi))`.
pub fn commutant_phase(v: &CMatrix, tol: f64) -> Result<CMatrix> {
    let dim = v.nrows();
    if !dim.is_multiple_of(2) {
        return Err(Error::OddTotalDimension(dim));
    }
    let m = dim / 2;
    let std = SymmetryTriple::standard(m);
    let chi_res = op_norm(&(v * &std.chi - &std.chi * v));
    let t_res = op_norm(&(&std.t.unitary_part * v.conjugate() - v * &std.t.unitary_part));
    if chi_res > tol || t_res > tol {
        return Err(Error::NotInCommutant {
            chi: chi_res,
            t: t_res,
        });
    }
    let phi = v.view((0, 0), (m, m)).into_owned();
    let mut rebuilt = CMatrix::zeros(dim, dim);
    rebuilt.view_mut((0, 0), (m, m)).copy_from(&phi);
    rebuilt.view_mut((m, m), (m, m)).copy_from(&phi.conjugate());
    let res = op_norm(&(v - rebuilt));
    if res > 10.0 * tol {
        return Err(Error::NotInCommutant { chi: res, t: t_res });
    }
    Ok(phi)
}

/// The flat Hamiltonian field `H(x) = [[0, q(x)*], [q(x), 0]]` attached to
/// a sewing field. It squares to the identity (gap 1) and satisfies the
/// class-DIII relations with the standard triple.
pub fn hamiltonian_from_sewing<G: InvolutionGrid>(
    q: &SewingField<G>,
) -> Result<HamiltonianField<G>> {
    let m = q.rank;
    let samples: Vec<CMatrix> = q
        .samples
        .par_iter()
        .map(|qx| {
            let mut h = CMatrix::zeros(2 * m, 2 * m);
            h.view_mut((0, m), (m, m)).copy_from(&qx.adjoint());
            h.view_mut((m, 0), (m, m)).copy_from(qx);
            h
        })
        .collect();
    HamiltonianField::new(q.grid.clone(), samples, q.tol.max(1e-12))
}

/// Flatten a Hamiltonian field given in the standard representation and
/// read off its sewing matrix (the lower-left block), verifying the
/// sewing condition across involution pairs.
pub fn extract_sewing<G: InvolutionGrid>(
    h: &HamiltonianField<G>,
    tol: f64,
) -> Result<SewingField<G>> {
    let m = h.dim / 2;
    if !m.is_multiple_of(2) {
        return Err(Error::OddSewingRank(m));
    }
    let std = SymmetryTriple::standard(m);
    let rep = verify_class_diii(h, &std, tol)?;
    if !rep.pass() {
        return Err(Error::NotStandardForm(rep.max_residual()));
    }
    let blocks: Result<Vec<(CMatrix, f64)>> = h
        .samples
        .par_iter()
        .map(|hx| {
            let flat = linalg::polar_flatten(hx, tol)?;
            let diag_res = op_norm(&flat.view((0, 0), (m, m)).into_owned())
                .max(op_norm(&flat.view((m, m), (m, m)).into_owned()));
            let q = flat.view((m, 0), (m, m)).into_owned();
            Ok((q, diag_res))
        })
        .collect();
    let blocks = blocks?;
    let off_diag = blocks.iter().map(|b| b.1).fold(0.0, f64::max);
    if off_diag > 10.0 * tol {
        return Err(Error::NotStandardForm(off_diag));
    }
    let samples: Vec<CMatrix> = blocks.into_iter().map(|b| b.0).collect();
    let q = SewingField::from_samples(h.grid.clone(), samples, 10.0 * tol)?;
    let rep = crate::sewing::check_sewing(&q);
    if !rep.pass() {
        return Err(Error::SewingViolation(rep.max_residual()));
    }
    Ok(q)
}

/// Residuals of the intertwining relation `q'(x) = phi(tau x)^t q(x) phi(x)`
/// and of the strong (tau-invariance) condition on `phi`.
#[derive(Debug, Clone, Copy)]
pub struct IntertwinerReport {
    pub intertwining: f64,
    pub invariance: f64,
    pub strong: bool,
    pub tol: f64,
}

impl IntertwinerReport {
    pub fn pass(&self) -> bool {
        self.intertwining <= self.tol && (!self.strong || self.invariance <= self.tol)
    }
}

pub fn verify_intertwiner<G: InvolutionGrid>(
    q: &SewingField<G>,
    q_prime: &SewingField<G>,
    phi: &MatrixField<G>,
    strong: bool,
    tol: f64,
) -> Result<IntertwinerReport> {
    if q.grid != q_prime.grid || q.grid != phi.grid {
        return Err(Error::GridMismatch);
    }
    if q.rank != q_prime.rank || q.rank != phi.size {
        return Err(Error::DimensionMismatch {
            expected: q.rank,
            found: q_prime.rank.max(phi.size),
        });
    }
    let intertwining = (0..q.grid.len())
        .into_par_iter()
        .map(|j| {
            let p = q.grid.pair(j);
            op_norm(
                &(&q_prime.samples[j]
                    - phi.samples[p].transpose() * &q.samples[j] * &phi.samples[j]),
            )
        })
        .reduce(|| 0.0, f64::max);
    let invariance = (0..q.grid.len())
        .into_par_iter()
        .map(|j| op_norm(&(&phi.samples[q.grid.pair(j)] - &phi.samples[j])))
        .reduce(|| 0.0, f64::max);
    Ok(IntertwinerReport {
        intertwining,
        invariance,
        strong,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::CircleGrid;
    use crate::models;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        let a = CMatrix::from_fn(n, n, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
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

    #[test]
    fn standard_triple_satisfies_relations() {
        let std = SymmetryTriple::standard(2);
        let rebuilt =
            SymmetryTriple::new(std.t.clone(), std.c.clone(), 1e-14).expect("relations hold");
        assert!(op_norm(&(&rebuilt.chi - &std.chi)) < 1e-14);
    }

    #[test]
    fn model_hamiltonian_passes_class_diii() {
        let grid = CircleGrid::new(32).unwrap();
        let q = models::q_minus(1, grid);
        let h = hamiltonian_from_sewing(&q).unwrap();
        assert!((h.gap - 1.0).abs() < 1e-12);
        let std = SymmetryTriple::standard(2);
        let rep = verify_class_diii(&h, &std, 1e-12).unwrap();
        assert!(rep.max_residual() <= 1e-12, "{rep:?}");
    }

    #[test]
    fn identity_field_has_chiral_residual_two() {
        let grid = CircleGrid::new(8).unwrap();
        let samples = vec![CMatrix::identity(4, 4); 8];
        let h = HamiltonianField::new(grid, samples, 1e-10).unwrap();
        let std = SymmetryTriple::standard(2);
        let rep = verify_class_diii(&h, &std, 1e-8).unwrap();
        assert!((rep.chiral_residual - 2.0).abs() < 1e-12);
        assert!(!rep.pass());
    }

    #[test]
    fn epsilon_perturbation_scales_chiral_residual() {
        let grid = CircleGrid::new(8).unwrap();
        let q = models::q_const_circle(1, grid);
        let mut h = hamiltonian_from_sewing(&q).unwrap();
        let eps = 1e-3;
        let id = CMatrix::identity(4, 4).map(|z: Complex64| z * eps);
        h.samples[3] += id;
        let std = SymmetryTriple::standard(2);
        let rep = verify_class_diii(&h, &std, 1e-8).unwrap();
        assert!((rep.chiral_residual - 2.0 * eps).abs() < 1e-12, "{rep:?}");
    }

    #[test]
    fn standard_form_of_standard_triple_is_identity_like() {
        let std = SymmetryTriple::standard(2);
        let (_, out) = standard_form(&std, 1e-12).unwrap();
        assert!(out.deviation_from_standard() < 1e-12);
    }

    #[test]
    fn standard_form_round_trip_random_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let m = 2;
            let std = SymmetryTriple::standard(m);
            let v = random_unitary(&mut rng, 2 * m);
            let twisted = std.conjugated(&v);
            let twisted = SymmetryTriple::new(twisted.t.clone(), twisted.c.clone(), 1e-10).unwrap();
            let (w, _) = standard_form(&twisted, 1e-12).unwrap();
            let back = twisted.conjugated(&w);
            assert!(back.deviation_from_standard() <= 1e-10);
        }
    }

    #[test]
    fn standard_form_rejects_unequal_chiral_split() {
        // a fake triple on C^6 with chi eigenvalues (4, 2): feed chi directly
        // through the eigens-split path by constructing T with a 4/2 block chi
        let mut ut = CMatrix::zeros(6, 6);
        // T = antidiagonal-ish unitary; relations will not all hold, so build
        // the triple without validation to drive the dimension check
        for i in 0..6 {
            ut[(i, (i + 3) % 6)] = c(1.0, 0.0);
        }
        let t = AntiUnitaryOp {
            unitary_part: ut.clone(),
        };
        let c_op = AntiUnitaryOp { unitary_part: ut };
        let mut chi = CMatrix::identity(6, 6);
        chi[(4, 4)] = c(-1.0, 0.0);
        chi[(5, 5)] = c(-1.0, 0.0);
        let sym = SymmetryTriple { t, c: c_op, chi };
        assert!(matches!(
            standard_form(&sym, 1e-10),
            Err(Error::UnequalChiralEigenspaces { plus: 4, minus: 2 })
        ));
    }

    #[test]
    fn commutant_phase_examples() {
        let m = 3;
        let theta = 0.7;
        let mut v = CMatrix::zeros(2 * m, 2 * m);
        for i in 0..m {
            v[(i, i)] = Complex64::from_polar(1.0, theta);
            v[(m + i, m + i)] = Complex64::from_polar(1.0, -theta);
        }
        let phi = commutant_phase(&v, 1e-12).unwrap();
        for i in 0..m {
            assert!((phi[(i, i)] - Complex64::from_polar(1.0, theta)).norm() < 1e-14);
        }

        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let phi_rand = random_unitary(&mut rng, m);
        let mut v = CMatrix::zeros(2 * m, 2 * m);
        v.view_mut((0, 0), (m, m)).copy_from(&phi_rand);
        v.view_mut((m, m), (m, m)).copy_from(&phi_rand.conjugate());
        let got = commutant_phase(&v, 1e-12).unwrap();
        assert!(op_norm(&(got - phi_rand)) < 1e-13);

        // chi itself anticommutes with T, so it is rejected
        let std = SymmetryTriple::standard(m);
        assert!(matches!(
            commutant_phase(&std.chi, 1e-12),
            Err(Error::NotInCommutant { .. })
        ));
    }

    #[test]
    fn commutant_determinant_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let m = 3;
        let phi = random_unitary(&mut rng, m);
        let mut v = CMatrix::zeros(2 * m, 2 * m);
        v.view_mut((0, 0), (m, m)).copy_from(&phi);
        v.view_mut((m, m), (m, m)).copy_from(&phi.conjugate());
        let det_v = v.determinant();
        let det_phi = phi.clone().determinant();
        assert!((det_v - det_phi * det_phi.conj()).norm() < 1e-12);
    }

    #[test]
    fn sewing_round_trip() {
        let grid = CircleGrid::new(64).unwrap();
        for q in [models::q_const_circle(1, grid), models::q_minus(1, grid)] {
            let h = hamiltonian_from_sewing(&q).unwrap();
            let q2 = extract_sewing(&h, 1e-12).unwrap();
            let dev = (0..grid.len())
                .map(|j| op_norm(&(&q2.samples[j] - &q.samples[j])))
                .fold(0.0, f64::max);
            assert!(dev <= 1e-12, "round-trip deviation {dev:.3e}");
        }
    }

    #[test]
    fn extraction_removes_scale() {
        let grid = CircleGrid::new(32).unwrap();
        let q = models::q_minus(1, grid);
        let h = hamiltonian_from_sewing(&q).unwrap();
        let scaled = HamiltonianField::new(
            grid,
            h.samples.iter().map(|s| s.map(|z| z * 3.0)).collect(),
            1e-10,
        )
        .unwrap();
        let q2 = extract_sewing(&scaled, 1e-10).unwrap();
        let dev = (0..grid.len())
            .map(|j| op_norm(&(&q2.samples[j] - &q.samples[j])))
            .fold(0.0, f64::max);
        assert!(dev <= 1e-10);
    }

    #[test]
    fn extraction_of_generic_gapped_field() {
        // non-flat DIII field: H = [[0, b*], [b, 0]] with b = 2 q (gap 2)
        let grid = CircleGrid::new(64).unwrap();
        let q = models::q_minus(1, grid);
        let m = 2;
        let samples: Vec<CMatrix> = q
            .samples
            .iter()
            .map(|qx| {
                let b = qx.map(|z| z * 2.0);
                let mut h = CMatrix::zeros(2 * m, 2 * m);
                h.view_mut((0, m), (m, m)).copy_from(&b.adjoint());
                h.view_mut((m, 0), (m, m)).copy_from(&b);
                h
            })
            .collect();
        let h = HamiltonianField::new(grid, samples, 1e-10).unwrap();
        let q2 = extract_sewing(&h, 1e-10).unwrap();
        let rep = crate::sewing::check_sewing(&q2);
        assert!(rep.max_residual() <= 1e-10);
        let dev = (0..grid.len())
            .map(|j| op_norm(&(&q2.samples[j] - &q.samples[j])))
            .fold(0.0, f64::max);
        assert!(dev <= 1e-10);
    }

    #[test]
    fn unitary_equivalence_induces_intertwiner() {
        // conjugating H by a constant commutant unitary V intertwines the
        // extracted sewing fields through phi = phi_V*
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let grid = CircleGrid::new(32).unwrap();
        let q = models::q_minus(1, grid);
        let h = hamiltonian_from_sewing(&q).unwrap();
        let m = 2;
        let phi_v = random_unitary(&mut rng, m);
        let mut v = CMatrix::zeros(2 * m, 2 * m);
        v.view_mut((0, 0), (m, m)).copy_from(&phi_v);
        v.view_mut((m, m), (m, m)).copy_from(&phi_v.conjugate());
        let h2 = h.conjugated(&v).unwrap();
        let q2 = extract_sewing(&h2, 1e-10).unwrap();
        let phi_field = grid.sample_matrix(|_| phi_v.adjoint()).unwrap();
        let rep = verify_intertwiner(&q, &q2, &phi_field, true, 1e-10).unwrap();
        assert!(rep.pass(), "{rep:?}");
    }

    #[test]
    fn equivalence_fixture_intertwiners() {
        let grid = CircleGrid::new(64).unwrap();
        let fx = models::equivalence_fixtures(grid);
        // constant phi0 is invariant: strong isomorphism
        let rep = verify_intertwiner(&fx.q0, &fx.q0_prime, &fx.phi0, true, 1e-12).unwrap();
        assert!(rep.pass(), "{rep:?}");
        // phi1 intertwines q0 into the rotating field but is not invariant
        let weak = verify_intertwiner(&fx.q0, &fx.q1_rot, &fx.phi1, false, 1e-12).unwrap();
        assert!(weak.pass(), "{weak:?}");
        let strong = verify_intertwiner(&fx.q0, &fx.q1_rot, &fx.phi1, true, 1e-12).unwrap();
        assert!(!strong.pass());
        assert!(strong.invariance >= 1.0);
        // identity phi fixes any field
        let id = grid.sample_matrix(|_| CMatrix::identity(2, 2)).unwrap();
        let rep = verify_intertwiner(&fx.q0, &fx.q0, &id, true, 1e-14).unwrap();
        assert!(rep.pass());
    }
}
