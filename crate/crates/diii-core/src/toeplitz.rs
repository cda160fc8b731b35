//! The analytic side of the index theorem: block Toeplitz operators of
//! banded unitary symbols, their exact kernel dimension, the Z2 index and
//! its agreement with the circle invariant.
//!
//! The Hardy space is spanned by the Fourier modes `phi_m` with m >= 0.
//! A sewing symbol makes every finite section of the Toeplitz matrix
//! skew-symmetric, which forces even kernel dimensions on square
//! sections; kernel counting therefore goes through either the exact
//! banded elimination or rectangular finite sections.

use crate::error::{Error, Result};
use crate::field::SewingField;
use crate::grid::{CircleGrid, InvolutionGrid};
use crate::invariants::teo_kane_1d;
use crate::linalg::{kernel_basis, kernel_dimension, op_norm, unitarity_residual};
use crate::z2::Z2;
use crate::{CMatrix, CVector};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Fourier data of a banded symbol `q(k) = sum_{|m| <= W} c_m e^{imk}`
/// obeying the sewing relation `c_{-m} = -c_m^t` exactly.
#[derive(Debug, Clone)]
pub struct BandedSymbol {
    pub rank: usize,
    pub bandwidth: usize,
    /// Coefficient of mode m at index m + bandwidth.
    coeffs: Vec<CMatrix>,
    /// max_k of the reconstruction error against the sampled field.
    pub truncation_residual: f64,
    /// Size of the symmetrization that enforced the Fourier sewing relation.
    pub sewing_adjustment: f64,
}

impl BandedSymbol {
    pub fn coeff(&self, m: i64) -> CMatrix {
        let w = self.bandwidth as i64;
        if m.abs() > w {
            CMatrix::zeros(self.rank, self.rank)
        } else {
            self.coeffs[(m + w) as usize].clone()
        }
    }

    pub fn eval(&self, k: f64) -> CMatrix {
        let w = self.bandwidth as i64;
        let mut out = CMatrix::zeros(self.rank, self.rank);
        for m in -w..=w {
            let phase = Complex64::from_polar(1.0, m as f64 * k);
            out += self.coeffs[(m + w) as usize].map(|z| z * phase);
        }
        out
    }

    /// Coefficients of the adjoint symbol `q*`: mode m carries `c_{-m}^*`.
    pub fn adjoint_symbol(&self) -> BandedSymbol {
        let w = self.bandwidth as i64;
        let coeffs = (-w..=w).map(|m| self.coeff(-m).adjoint()).collect();
        BandedSymbol {
            rank: self.rank,
            bandwidth: self.bandwidth,
            coeffs,
            truncation_residual: self.truncation_residual,
            sewing_adjustment: self.sewing_adjustment,
        }
    }

    /// Max unitarity residual of the reconstructed symbol on a fine grid.
    pub fn unitarity_residual(&self) -> f64 {
        let n = (8 * (2 * self.bandwidth + 1)).max(64);
        (0..n)
            .map(|j| unitarity_residual(&self.eval(2.0 * PI * j as f64 / n as f64)))
            .fold(0.0, f64::max)
    }

    fn from_raw(rank: usize, bandwidth: usize, coeffs: Vec<CMatrix>) -> Self {
        BandedSymbol {
            rank,
            bandwidth,
            coeffs,
            truncation_residual: 0.0,
            sewing_adjustment: 0.0,
        }
    }
}

/// Discrete Fourier coefficients of a circle sewing field, band-limited to
/// `|m| <= w`, with the sewing relation enforced by averaging
/// `c_{-m}` against `-c_m^t` (the adjustment size is reported).
pub fn fourier_coefficients(q: &SewingField<CircleGrid>, w: usize) -> Result<BandedSymbol> {
    let n = q.grid.len();
    if 2 * w >= n {
        return Err(Error::BandwidthTooLarge { w, n });
    }
    let rank = q.rank;
    let wi = w as i64;
    let mut raw: Vec<CMatrix> = Vec::with_capacity(2 * w + 1);
    for m in -wi..=wi {
        let mut acc = CMatrix::zeros(rank, rank);
        for j in 0..n {
            let phase = Complex64::from_polar(1.0 / n as f64, -(m as f64) * q.grid.point(j));
            acc += q.samples[j].map(|z| z * phase);
        }
        raw.push(acc);
    }
    let get = |m: i64| -> &CMatrix { &raw[(m + wi) as usize] };
    let mut coeffs = vec![CMatrix::zeros(rank, rank); 2 * w + 1];
    let mut adjustment = 0.0f64;
    for m in 0..=wi {
        let avg = (get(m) - get(-m).transpose()).map(|z| z * 0.5);
        adjustment = adjustment
            .max(op_norm(&(get(m) - &avg)))
            .max(op_norm(&(get(-m) + avg.transpose())));
        coeffs[(m + wi) as usize] = avg.clone();
        coeffs[(-m + wi) as usize] = -avg.transpose();
    }
    let mut sym = BandedSymbol::from_raw(rank, w, coeffs);
    sym.sewing_adjustment = adjustment;
    sym.truncation_residual = (0..n)
        .map(|j| op_norm(&(&q.samples[j] - sym.eval(q.grid.point(j)))))
        .fold(0.0, f64::max);
    Ok(sym)
}

/// A square finite section of the Toeplitz matrix in the mode basis
/// `phi_0 .. phi_{N-1}`; block (i, j) holds coefficient `c_{i-j}`.
#[derive(Debug, Clone)]
pub struct ToeplitzTruncation {
    pub blocks: usize,
    pub matrix: CMatrix,
}

pub fn build_truncation(sym: &BandedSymbol, blocks: usize) -> ToeplitzTruncation {
    ToeplitzTruncation {
        blocks,
        matrix: toeplitz_block_matrix(sym, blocks, blocks),
    }
}

fn toeplitz_block_matrix(sym: &BandedSymbol, block_rows: usize, block_cols: usize) -> CMatrix {
    let r = sym.rank;
    let mut out = CMatrix::zeros(block_rows * r, block_cols * r);
    for i in 0..block_rows {
        for j in 0..block_cols {
            let m = i as i64 - j as i64;
            if m.abs() <= sym.bandwidth as i64 {
                out.view_mut((i * r, j * r), (r, r))
                    .copy_from(&sym.coeff(m));
            }
        }
    }
    out
}

/// A kernel vector of the semi-infinite operator: a finitely supported
/// polynomial, one coefficient vector per mode starting at mode 0.
#[derive(Debug, Clone)]
pub struct KernelWitness {
    pub modes: Vec<CVector>,
}

impl KernelWitness {
    /// Index of the lowest mode/channel carrying significant weight.
    pub fn leading_mode_channel(&self, eps: f64) -> Option<(usize, usize)> {
        for (m, v) in self.modes.iter().enumerate() {
            for ch in 0..v.len() {
                if v[ch].norm() > eps {
                    return Some((m, ch));
                }
            }
        }
        None
    }
}

#[derive(Debug, Clone)]
pub struct ExactKernel {
    pub dim: usize,
    pub witnesses: Vec<KernelWitness>,
    pub gap_ratio: f64,
}

/// Exact kernel dimension of the semi-infinite Toeplitz operator of a
/// banded unitary symbol.
///
/// A Hardy-space vector `a` lies in the kernel iff `q a` has only negative
/// modes; with `q` unitary, `a = q* b` for `b` supported on modes
/// [-W, -1], and the constraint is that the negative modes of `q* b`
/// vanish. The kernel is the null space of that finite linear map, and
/// kernel vectors come out as polynomials supported on modes [0, W-1].
pub fn exact_kernel_dim_banded(sym: &BandedSymbol, tol: f64) -> Result<ExactKernel> {
    let unit = sym.unitarity_residual();
    if unit > tol.max(1e-10) {
        return Err(Error::NotUnitary(unit));
    }
    let w = sym.bandwidth;
    let r = sym.rank;
    if w == 0 {
        // constant unitary symbol: the operator is invertible
        return Ok(ExactKernel {
            dim: 0,
            witnesses: vec![],
            gap_ratio: f64::INFINITY,
        });
    }
    let adj = sym.adjoint_symbol();
    // rows: target modes mu in [-2W, -1]; cols: source modes l in [-W, -1]
    let mut l_mat = CMatrix::zeros(2 * w * r, w * r);
    for (row_blk, mu) in (-(2 * w as i64)..=-1).enumerate() {
        for (col_blk, l) in (-(w as i64)..=-1).enumerate() {
            let m = mu - l;
            if m.abs() <= w as i64 {
                l_mat
                    .view_mut((row_blk * r, col_blk * r), (r, r))
                    .copy_from(&adj.coeff(m));
            }
        }
    }
    let kd = kernel_dimension(&l_mat, tol)?;
    let basis = kernel_basis(&l_mat, tol)?;
    let mut witnesses = Vec::with_capacity(basis.len());
    for b in &basis {
        // a_mu = sum_l (q*)_{mu - l} b_l for mu in [0, W-1]
        let mut modes = Vec::with_capacity(w);
        for mu in 0..w as i64 {
            let mut acc = CVector::zeros(r);
            for (col_blk, l) in (-(w as i64)..=-1).enumerate() {
                let m = mu - l;
                if m.abs() <= w as i64 {
                    let b_l = CVector::from_fn(r, |i, _| b[col_blk * r + i]);
                    acc += adj.coeff(m) * b_l;
                }
            }
            modes.push(acc);
        }
        let witness = KernelWitness { modes };
        verify_witness(sym, &witness)?;
        witnesses.push(witness);
    }
    Ok(ExactKernel {
        dim: kd.dim,
        witnesses,
        gap_ratio: kd.gap_ratio,
    })
}

/// Check that `q a` has negligible non-negative modes.
fn verify_witness(sym: &BandedSymbol, a: &KernelWitness) -> Result<()> {
    let w = sym.bandwidth as i64;
    let top = w + a.modes.len() as i64;
    let norm: f64 = a.modes.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
    let mut worst = 0.0f64;
    for mu in 0..top {
        let mut acc = CVector::zeros(sym.rank);
        for (l, v) in a.modes.iter().enumerate() {
            let m = mu - l as i64;
            if m.abs() <= w {
                acc += sym.coeff(m) * v;
            }
        }
        worst = worst.max(acc.norm());
    }
    if worst > 1e-7 * norm.max(1e-12) {
        return Err(Error::CrossCheckFailure(format!(
            "kernel witness maps to residual {worst:.3e} under the operator"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SvdKernelReport {
    /// (N, kernel count) per requested truncation size.
    pub counts: Vec<(usize, usize)>,
    pub stabilized: usize,
    pub gap_ratio: f64,
}

/// Kernel dimension through rectangular finite sections: domain modes
/// [0, N-1], codomain modes [0, N-1+W] (every constraint touching the
/// domain). Square sections are useless here: they are skew-symmetric, so
/// their kernel parity is forced even and cannot equal the Z2 index.
pub fn svd_kernel_dim(sym: &BandedSymbol, n_list: &[usize], tol: f64) -> Result<SvdKernelReport> {
    let w = sym.bandwidth;
    let mut counts = Vec::with_capacity(n_list.len());
    let mut gap_ratio = f64::INFINITY;
    for &n in n_list {
        if n <= 4 * w {
            return Err(Error::BandwidthTooLarge { w, n });
        }
        let mat = toeplitz_block_matrix(sym, n + w, n);
        let kd = kernel_dimension(&mat, tol)?;
        counts.push((n, kd.dim));
        gap_ratio = kd.gap_ratio;
    }
    let stabilized = match counts.len() {
        0 => 0,
        1 => counts[0].1,
        len => {
            if counts[len - 1].1 != counts[len - 2].1 {
                return Err(Error::Unstable(counts));
            }
            counts[len - 1].1
        }
    };
    Ok(SvdKernelReport {
        counts,
        stabilized,
        gap_ratio,
    })
}

/// `(-1)^{dim Ker}`, with the adjoint kernel dimension cross-checked (the
/// skew-complex symmetry pairs the two kernels by conjugation, so the
/// Noether index vanishes and only this secondary index survives).
pub fn z2_index(sym: &BandedSymbol, tol: f64) -> Result<Z2> {
    let kernel = exact_kernel_dim_banded(sym, tol)?;
    let adjoint = exact_kernel_dim_banded(&sym.adjoint_symbol(), tol)?;
    if kernel.dim != adjoint.dim {
        return Err(Error::CrossCheckFailure(format!(
            "kernel dimensions of T and T* differ ({} vs {})",
            kernel.dim, adjoint.dim
        )));
    }
    Ok(Z2::from_parity(kernel.dim as i64))
}

#[derive(Debug, Clone)]
pub struct IndexTheoremReport {
    pub nu: Z2,
    pub index: Z2,
    pub kernel_dim: usize,
    pub truncation_residual: f64,
    pub agree: bool,
}

/// Both sides of the index theorem on one field: the fixed-point Pfaffian
/// invariant and the Toeplitz Z2 index of the band-approximated symbol.
pub fn index_theorem_check(
    q: &SewingField<CircleGrid>,
    w: usize,
    tol: f64,
) -> Result<IndexTheoremReport> {
    let nu = teo_kane_1d(q)?;
    let sym = fourier_coefficients(q, w)?;
    let kernel = exact_kernel_dim_banded(&sym, tol)?;
    let index = z2_index(&sym, tol)?;
    Ok(IndexTheoremReport {
        nu,
        index,
        kernel_dim: kernel.dim,
        truncation_residual: sym.truncation_residual,
        agree: nu == index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn q_minus_symbol(n: usize) -> BandedSymbol {
        let grid = CircleGrid::new(256).unwrap();
        fourier_coefficients(&models::q_minus(n, grid), 1).unwrap()
    }

    #[test]
    fn fourier_coefficients_of_q_minus() {
        let sym = q_minus_symbol(1);
        assert!(sym.truncation_residual <= 1e-14);
        assert!(sym.sewing_adjustment <= 1e-14);
        let c1 = sym.coeff(1);
        let cm1 = sym.coeff(-1);
        let c0 = sym.coeff(0);
        assert!((c1[(0, 1)] - c(1.0, 0.0)).norm() < 1e-13);
        assert!((cm1[(1, 0)] + c(1.0, 0.0)).norm() < 1e-13);
        assert!(op_norm(&c0) < 1e-13);
        assert!(
            c1.iter().map(|z| z.norm()).sum::<f64>() - 1.0 < 1e-12,
            "single nonzero entry"
        );
    }

    #[test]
    fn fourier_of_constant_symbol() {
        let grid = CircleGrid::new(64).unwrap();
        let sym = fourier_coefficients(&models::q_const_circle(1, grid), 0).unwrap();
        assert!(op_norm(&(sym.coeff(0) - models::q_const_matrix(1))) < 1e-14);
        assert!(sym.truncation_residual < 1e-14);
    }

    #[test]
    fn undersized_bandwidth_reports_truncation_residual() {
        let grid = CircleGrid::new(64).unwrap();
        let sym = fourier_coefficients(&models::q_minus(1, grid), 0).unwrap();
        assert!(sym.truncation_residual > 0.5);
    }

    #[test]
    fn oversized_bandwidth_is_rejected() {
        let grid = CircleGrid::new(64).unwrap();
        let q = models::q_minus(1, grid);
        assert!(matches!(
            fourier_coefficients(&q, 32),
            Err(crate::Error::BandwidthTooLarge { w: 32, n: 64 })
        ));
    }

    #[test]
    fn non_unitary_symbol_is_rejected() {
        // scaling keeps the sewing structure but breaks unitarity
        let grid = CircleGrid::new(64).unwrap();
        let q = grid
            .sample_sewing(2, 1e-12, |k| models::q_minus_matrix(1, k).map(|z| z * 2.0))
            .unwrap();
        let sym = fourier_coefficients(&q, 1).unwrap();
        assert!(matches!(
            exact_kernel_dim_banded(&sym, 1e-8),
            Err(crate::Error::NotUnitary(_))
        ));
    }

    #[test]
    fn truncation_shapes_and_exact_skewness() {
        let grid = CircleGrid::new(64).unwrap();
        let sym = fourier_coefficients(&models::q_const_circle(1, grid), 0).unwrap();
        let t = build_truncation(&sym, 3);
        // block diagonal with three Q blocks
        for i in 0..3 {
            let blk = t.matrix.view((2 * i, 2 * i), (2, 2)).into_owned();
            assert!(op_norm(&(blk - models::q_const_matrix(1))) < 1e-14);
        }

        let sym = q_minus_symbol(1);
        let t = build_truncation(&sym, 4);
        assert_eq!(t.matrix.nrows(), 8);
        let skew = &t.matrix + t.matrix.transpose();
        assert!(skew.iter().all(|&z| z == c(0.0, 0.0)), "exact skewness");
    }

    #[test]
    fn exact_kernel_of_the_two_generators() {
        let sym = q_minus_symbol(1);
        let k = exact_kernel_dim_banded(&sym, 1e-8).unwrap();
        assert_eq!(k.dim, 1);
        assert_eq!(k.witnesses.len(), 1);
        let lead = k.witnesses[0].leading_mode_channel(1e-8).unwrap();
        assert_eq!(lead, (0, 0), "mode-0 vector in the first channel");

        let grid = CircleGrid::new(64).unwrap();
        let plus = fourier_coefficients(&models::q_const_circle(1, grid), 0).unwrap();
        assert_eq!(exact_kernel_dim_banded(&plus, 1e-8).unwrap().dim, 0);
    }

    #[test]
    fn kernels_of_direct_sums_add() {
        let grid = CircleGrid::new(256).unwrap();
        let qm = models::q_minus(1, grid);
        let qsum = crate::invariants::direct_sum(&qm, &qm).unwrap();
        let sym = fourier_coefficients(&qsum, 1).unwrap();
        assert_eq!(exact_kernel_dim_banded(&sym, 1e-8).unwrap().dim, 2);
        assert_eq!(z2_index(&sym, 1e-8).unwrap(), Z2::Plus);
    }

    #[test]
    fn svd_sections_stabilize() {
        let sym = q_minus_symbol(1);
        let rep = svd_kernel_dim(&sym, &[8, 16, 32], 1e-8).unwrap();
        assert_eq!(rep.stabilized, 1);
        assert!(rep.counts.iter().all(|&(_, k)| k == 1));

        let grid = CircleGrid::new(64).unwrap();
        let plus = fourier_coefficients(&models::q_const_circle(1, grid), 0).unwrap();
        let rep = svd_kernel_dim(&plus, &[8, 16], 1e-8).unwrap();
        assert_eq!(rep.stabilized, 0);
    }

    #[test]
    fn z2_index_values() {
        assert_eq!(z2_index(&q_minus_symbol(1), 1e-8).unwrap(), Z2::Minus);
        let grid = CircleGrid::new(64).unwrap();
        let plus = fourier_coefficients(&models::q_const_circle(1, grid), 0).unwrap();
        assert_eq!(z2_index(&plus, 1e-8).unwrap(), Z2::Plus);
    }

    #[test]
    fn index_theorem_on_generators() {
        let grid = CircleGrid::new(256).unwrap();
        for (q, expect) in [
            (models::q_minus(1, grid), Z2::Minus),
            (models::q_const_circle(1, grid), Z2::Plus),
        ] {
            let rep = index_theorem_check(&q, 1, 1e-8).unwrap();
            assert!(rep.agree);
            assert_eq!(rep.nu, expect);
            assert_eq!(rep.index, expect);
        }
    }

    #[test]
    fn noether_index_vanishes() {
        // winding of det q is zero for every sewing symbol
        let grid = CircleGrid::new(256).unwrap();
        for q in [
            models::q_minus(1, grid),
            models::q_minus(2, grid),
            models::q_const_circle(2, grid),
        ] {
            let (d, _) = crate::sewing::det_field(&q);
            let (_, w) = crate::sewing::unwrap_phase_1d(&d).unwrap();
            assert_eq!(w, 0);
        }
    }
}
