//! Seeded random matrices for fixtures: Ginibre, Haar unitaries, random generators.

use rand::Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::matcore::{c64, hermitian_part, real, CMat, CVec, C64};

pub type SeededRng = rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c64(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

/// Entries i.i.d. standard complex normal.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVec {
    CVec::from_fn(n, |_, _| gaussian(rng))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let qr = ginibre(n, n, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    CMat::from_fn(n, n, |i, j| {
        let d = r[(j, j)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { c64(1.0, 0.0) };
        q[(i, j)] * phase
    })
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    hermitian_part(&ginibre(n, n, rng))
}

pub fn random_anti_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let g = ginibre(n, n, rng);
    (&g - g.adjoint()) * real(0.5)
}

/// Full-rank density matrix `GG†/Tr(GG†)`.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let g = ginibre(n, n, rng);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    hermitian_part(&(rho / tr))
}

pub fn uniform<R: Rng + ?Sized>(lo: f64, hi: f64, rng: &mut R) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

pub fn uniform_index<R: Rng + ?Sized>(lo: usize, hi_inclusive: usize, rng: &mut R) -> usize {
    rng.random_range(lo..=hi_inclusive)
}
