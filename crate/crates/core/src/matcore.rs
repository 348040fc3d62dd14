//! Dense complex linear-algebra kernel.
//!
//! Everything in the crate is expressed through [`CMat`], a dynamically sized
//! complex matrix. The routines here supply the polar unitary factor
//! `Φ(X) = √(XX†)⁻¹X`, Hermitian square roots, rank estimates, the solver for
//! `AQ + QA = S` and path-ordered exponentials of anti-Hermitian generators.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Scales a real matrix-valued quantity into the complex field.
#[inline]
pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Frobenius norm.
#[inline]
pub fn norm(m: &CMat) -> f64 {
    m.norm()
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn ensure_square(m: &CMat) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

/// `‖U†U − I‖` in Frobenius norm.
pub fn unitarity_defect(u: &CMat) -> f64 {
    let n = u.ncols();
    (u.adjoint() * u - eye(n)).norm()
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * real(0.5)
}

pub fn anti_hermitian_part(m: &CMat) -> CMat {
    (m - m.adjoint()) * real(0.5)
}

/// `‖M − M†‖ ≤ tol·‖M‖`.
pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.nrows() == m.ncols() && (m - m.adjoint()).norm() <= tol * m.norm()
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Only the Hermitian part of `m` is used.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values above `tol·σ_max`. The zero matrix has rank 0.
pub fn rank_estimate(m: &CMat, tol: f64) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        Some(&smax) if smax > f64::MIN_POSITIVE => sv.iter().filter(|&&s| s > tol * smax).count(),
        _ => 0,
    }
}

/// Polar decomposition `X = √(XX†)·Φ(X)` of a full-rank square matrix.
#[derive(Debug, Clone)]
pub struct PolarFactor {
    /// `Φ(X) = U V†` for `X = U Σ V†`.
    pub unitary: CMat,
    /// `√(XX†) = U Σ U†`.
    pub positive_part: CMat,
    /// Descending.
    pub singular_values: Vec<f64>,
}

/// Polar unitary factor via the full SVD.
///
/// Fails with [`Error::RankDeficient`] unless `σ_min > rank_tol·σ_max`.
pub fn polar_unitary(x: &CMat, rank_tol: f64) -> Result<PolarFactor> {
    let n = ensure_square(x)?;
    if !is_finite(x) {
        return Err(Error::NonFinite);
    }
    let svd = x.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma = &svd.singular_values;

    let mut sv: Vec<f64> = sigma.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let sigma_min = sv.last().copied().unwrap_or(0.0);
    if n == 0 || sigma_max <= f64::MIN_POSITIVE || sigma_min <= rank_tol * sigma_max {
        return Err(Error::RankDeficient { sigma_min, sigma_max });
    }

    let unitary = &u * &v_t;
    let scaled = CMat::from_fn(n, n, |r, c| u[(r, c)] * sigma[c]);
    let positive_part = hermitian_part(&(scaled * u.adjoint()));
    Ok(PolarFactor { unitary, positive_part, singular_values: sv })
}

/// `Φ(X)` with the default rank tolerance.
pub fn polar(x: &CMat) -> Result<CMat> {
    polar_unitary(x, tol::RANK_TOL).map(|p| p.unitary)
}

/// `z/|z|`.
pub fn polar_phase(z: C64) -> Result<C64> {
    let r = z.norm();
    if !(r > f64::MIN_POSITIVE) || !r.is_finite() {
        return Err(Error::ZeroInput);
    }
    Ok(z / r)
}

/// Principal square root of a Hermitian positive semidefinite matrix.
pub fn matrix_sqrt_posdef(m: &CMat) -> Result<CMat> {
    let n = ensure_square(m)?;
    let scale = m.norm().max(1.0);
    let residual = (m - m.adjoint()).norm();
    if residual > 1e-10 * scale {
        return Err(Error::NotHermitian { residual });
    }
    let (vals, vecs) = hermitian_eigen(m);
    if let Some(&lo) = vals.first() {
        if lo < -1e-10 * scale {
            return Err(Error::NegativeEigenvalue(lo));
        }
    }
    let roots: Vec<f64> = vals.iter().map(|&v| libm::sqrt(v.max(0.0))).collect();
    let scaled = CMat::from_fn(n, n, |r, c| vecs[(r, c)] * roots[c]);
    Ok(hermitian_part(&(scaled * vecs.adjoint())))
}

/// `exp(A)` for anti-Hermitian `A`, exactly unitary up to rounding.
///
/// `A` is replaced by its anti-Hermitian part before exponentiating.
pub fn exp_anti_hermitian(a: &CMat) -> CMat {
    let n = a.nrows();
    // A = -iH with H = iA Hermitian.
    let h = a * I;
    let (vals, vecs) = hermitian_eigen(&h);
    let phases: Vec<C64> = vals.iter().map(|&l| c64(libm::cos(l), -libm::sin(l))).collect();
    let scaled = CMat::from_fn(n, n, |r, c| vecs[(r, c)] * phases[c]);
    scaled * vecs.adjoint()
}

/// Unique anti-Hermitian solution of `AQ + QA = S` for `Q > 0`.
///
/// Solved in the eigenbasis of `Q`: `A'_{ij} = S'_{ij}/(q_i + q_j)`.
pub fn solve_gauge_equation(q: &CMat, s: &CMat, pos_tol: f64) -> Result<CMat> {
    let n = ensure_square(q)?;
    if s.nrows() != n || s.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: s.nrows() });
    }
    let herm = (q - q.adjoint()).norm();
    if herm > tol::ANTI_HERMITIAN_TOL * q.norm() {
        return Err(Error::NotHermitian { residual: herm });
    }
    let anti = (s + s.adjoint()).norm();
    if anti > tol::ANTI_HERMITIAN_TOL * s.norm() {
        return Err(Error::NotAntiHermitian { residual: anti });
    }
    let (vals, vecs) = hermitian_eigen(q);
    let lo = vals.first().copied().unwrap_or(0.0);
    if lo <= pos_tol {
        return Err(Error::NotPositive { min_eigenvalue: lo });
    }
    let s_eig = vecs.adjoint() * s * &vecs;
    let a_eig = CMat::from_fn(n, n, |i, j| s_eig[(i, j)] / (vals[i] + vals[j]));
    Ok(anti_hermitian_part(&(&vecs * a_eig * vecs.adjoint())))
}

/// `P exp(∫A ds)` from samples `(s_i, A(s_i))`, later factors on the left.
///
/// Each interval contributes `exp(Ā·δs)` where `Ā` is the average of the two
/// endpoint samples, the midpoint value to second order. A single sample
/// gives the identity.
pub fn path_ordered_exponential(samples: &[(f64, CMat)]) -> Result<CMat> {
    let (_, first) = samples.first().ok_or(Error::EmptyPath)?;
    let n = ensure_square(first)?;
    for (i, (_, a)) in samples.iter().enumerate() {
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: a.nrows() });
        }
        if !is_finite(a) {
            return Err(Error::NonFinite);
        }
        if i > 0 && !(samples[i].0 > samples[i - 1].0) {
            return Err(Error::NonMonotoneGrid { index: i });
        }
    }
    let mut acc = eye(n);
    for w in samples.windows(2) {
        let (s0, a0) = &w[0];
        let (s1, a1) = &w[1];
        let mid = (a0 + a1) * real(0.5 * (s1 - s0));
        acc = exp_anti_hermitian(&mid) * acc;
    }
    Ok(acc)
}

/// `P exp(∫_{s0}^{s1} A ds)` with `A` evaluated at interval midpoints.
pub fn path_ordered_exponential_fn<F>(mut generator: F, s0: f64, s1: f64, steps: usize) -> Result<CMat>
where
    F: FnMut(f64) -> Result<CMat>,
{
    if steps == 0 {
        return Err(Error::EmptyPath);
    }
    if !(s1 >= s0) {
        return Err(Error::NonMonotoneGrid { index: 1 });
    }
    let ds = (s1 - s0) / steps as f64;
    let mut acc: Option<CMat> = None;
    for i in 0..steps {
        let a = generator(s0 + (i as f64 + 0.5) * ds)?;
        let step = exp_anti_hermitian(&(a * real(ds)));
        acc = Some(match acc {
            None => step,
            Some(prev) => step * prev,
        });
    }
    Ok(acc.expect("steps > 0"))
}
