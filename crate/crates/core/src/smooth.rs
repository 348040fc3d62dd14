//! Holonomy of smoothly parametrized channel families.
//!
//! With `Q_{kl} = Tr(E_k†E_l)` and `R_{kl} = Tr(Ė_k†E_l)` the gauge potential
//! `A` is the anti-Hermitian solution of `AQ + QA = R − R†`, and the holonomy
//! of a path on `[s0, s1]` is `Φ(T_{0,1}) P exp(∫A ds)` with
//! `[T_{0,1}]_{kl} = Tr(E_k(s0)† E_l(s1))`.

use alloc::vec::Vec;

use crate::discrete::{holonomy, overlap_polar, ChannelSequence};
use crate::error::{Error, Result};
use crate::kraus::KrausRep;
use crate::matcore::{
    c64, eye, exp_anti_hermitian, is_finite, polar, polar_phase, real, solve_gauge_equation,
    unitarity_defect, CMat, C64,
};
use crate::ops::{hs_inner, pauli_coordinates, paulis};
use crate::tol;

/// A smooth family `s ↦ {E_k(s)}` on a closed parameter interval.
pub trait ChannelPath {
    fn dim(&self) -> usize;

    fn kraus_number(&self) -> usize;

    fn kraus_at(&self, s: f64) -> Result<KrausRep>;

    /// `Ė_k(s)`. Defaults to fourth-order finite differences.
    fn derivative_at(&self, s: f64) -> Result<Vec<CMat>> {
        finite_difference(self, s, tol::FD_STEP)
    }

    fn domain(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
}

impl<P: ChannelPath + ?Sized> ChannelPath for &P {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn kraus_number(&self) -> usize {
        (**self).kraus_number()
    }
    fn kraus_at(&self, s: f64) -> Result<KrausRep> {
        (**self).kraus_at(s)
    }
    fn derivative_at(&self, s: f64) -> Result<Vec<CMat>> {
        (**self).derivative_at(s)
    }
    fn domain(&self) -> (f64, f64) {
        (**self).domain()
    }
}

/// Fourth-order difference quotient of the Kraus operators.
///
/// Central when `s ± 2h` stays inside the domain, one-sided otherwise.
pub fn finite_difference<P: ChannelPath + ?Sized>(path: &P, s: f64, h: f64) -> Result<Vec<CMat>> {
    let (lo, hi) = path.domain();
    if !(s >= lo && s <= hi) || !(h > 0.0) {
        return Err(Error::DerivativeUnavailable { s });
    }
    let (offsets, weights): (&[f64], &[f64]) = if s - 2.0 * h >= lo && s + 2.0 * h <= hi {
        (&[-2.0, -1.0, 1.0, 2.0], &[1.0, -8.0, 8.0, -1.0])
    } else if s + 4.0 * h <= hi {
        (&[0.0, 1.0, 2.0, 3.0, 4.0], &[-25.0, 48.0, -36.0, 16.0, -3.0])
    } else if s - 4.0 * h >= lo {
        (&[0.0, -1.0, -2.0, -3.0, -4.0], &[25.0, -48.0, 36.0, -16.0, 3.0])
    } else {
        return Err(Error::DerivativeUnavailable { s });
    };
    let (d, k) = (path.dim(), path.kraus_number());
    let mut acc = alloc::vec![CMat::zeros(d, d); k];
    for (&o, &w) in offsets.iter().zip(weights) {
        let rep = path.kraus_at(s + o * h).map_err(|_| Error::DerivativeUnavailable { s })?;
        for (a, e) in acc.iter_mut().zip(rep.ops()) {
            *a += e * real(w / (12.0 * h));
        }
    }
    Ok(acc)
}

/// `Q`, `R` and the departure `|Re Tr R|` from the trace-preservation identity.
#[derive(Debug, Clone, PartialEq)]
pub struct QrSample {
    pub s: f64,
    pub q: CMat,
    pub r: CMat,
    pub re_trace_r: f64,
}

pub fn qr_matrices<P: ChannelPath + ?Sized>(path: &P, s: f64) -> Result<QrSample> {
    let rep = path.kraus_at(s)?;
    let dot = path.derivative_at(s)?;
    Ok(qr_from_parts(s, rep.ops(), &dot))
}

fn qr_from_parts(s: f64, ops: &[CMat], dot: &[CMat]) -> QrSample {
    let k = ops.len();
    let q = CMat::from_fn(k, k, |a, b| hs_inner(&ops[a], &ops[b]));
    let r = CMat::from_fn(k, k, |a, b| hs_inner(&dot[a], &ops[b]));
    let re_trace_r = r.trace().re.abs();
    QrSample { s, q, r, re_trace_r }
}

/// `‖R − R†‖ ≤ tol·(1 + ‖R‖)` at every grid point. Evaluation failures count
/// as not parallel.
pub fn is_parallel_transported<P: ChannelPath + ?Sized>(path: &P, grid: &[f64], tol: f64) -> bool {
    grid.iter().all(|&s| {
        qr_matrices(path, s).is_ok_and(|qr| (&qr.r - qr.r.adjoint()).norm() <= tol * (1.0 + qr.r.norm()))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaugePotentialSample {
    pub s: f64,
    pub q: CMat,
    pub r: CMat,
    pub a: CMat,
}

impl GaugePotentialSample {
    /// `‖AQ + QA − (R − R†)‖`.
    pub fn residual(&self) -> f64 {
        (&self.a * &self.q + &self.q * &self.a - (&self.r - self.r.adjoint())).norm()
    }
}

pub fn gauge_potential<P: ChannelPath + ?Sized>(path: &P, s: f64) -> Result<GaugePotentialSample> {
    let QrSample { q, r, .. } = qr_matrices(path, s)?;
    let a = solve_gauge_equation(&q, &(&r - r.adjoint()), tol::RANK_TOL * q.norm())?;
    Ok(GaugePotentialSample { s, q, r, a })
}

/// Closed form of the potential for two Kraus operators.
///
/// Writes `Q = q0(I + x·σ)` and `R = iz₀I + (y + iz)·σ`, then
/// `A = i(z₀ − x·z)/(1 − |x|²) I + i(z − z₀x + x×(x×z))/(1 − |x|²)·σ`
/// with `z₀, z` divided by `q0`.
pub fn gauge_potential_k2_closed_form(q: &CMat, r: &CMat) -> Result<CMat> {
    if q.nrows() != 2 || q.ncols() != 2 || r.nrows() != 2 || r.ncols() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: q.nrows().max(r.nrows()) });
    }
    let (q0, qv) = pauli_coordinates(q);
    let q0 = q0.re;
    if !(q0 > 0.0) {
        return Err(Error::NotPositive { min_eigenvalue: q0 });
    }
    let x = [qv[0].re / q0, qv[1].re / q0, qv[2].re / q0];
    let (r0, rv) = pauli_coordinates(r);
    let z0 = r0.im / q0;
    let z = [rv[0].im / q0, rv[1].im / q0, rv[2].im / q0];

    let x2 = dot(&x, &x);
    if (libm::sqrt(x2) - 1.0).abs() < tol::RANK_TOL {
        return Err(Error::XNormOne);
    }
    let denom = 1.0 - x2;
    let a0 = (z0 - dot(&x, &z)) / denom;
    let xxz = cross(&x, &cross(&x, &z));
    let sigma = paulis();
    let mut a = eye(2) * c64(0.0, a0);
    for i in 0..3 {
        let ai = (z[i] - z0 * x[i] + xxz[i]) / denom;
        a += &sigma[i] * c64(0.0, ai);
    }
    Ok(a)
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Evenly spaced grid of `steps + 1` points over the path domain.
pub fn uniform_grid<P: ChannelPath + ?Sized>(path: &P, steps: usize) -> Vec<f64> {
    let (lo, hi) = path.domain();
    (0..=steps)
        .map(|j| if j == steps { hi } else { lo + (hi - lo) * j as f64 / steps as f64 })
        .collect()
}

/// Potential samples over a uniform grid.
pub fn gauge_potential_samples<P: ChannelPath + ?Sized>(path: &P, steps: usize) -> Result<Vec<GaugePotentialSample>> {
    uniform_grid(path, steps).into_iter().map(|s| gauge_potential(path, s)).collect()
}

/// `Φ(T_{0,1})` for the endpoints of the path.
pub fn endpoint_polar<P: ChannelPath + ?Sized>(path: &P) -> Result<CMat> {
    let (lo, hi) = path.domain();
    overlap_polar(&path.kraus_at(lo)?, &path.kraus_at(hi)?)
}

/// `Φ(T_{0,1}) P exp(∫A ds)` with `steps` intervals.
pub fn smooth_holonomy<P: ChannelPath + ?Sized>(path: &P, steps: usize) -> Result<CMat> {
    if steps == 0 {
        return Err(Error::EmptyPath);
    }
    let samples = gauge_potential_samples(path, steps)?;
    smooth_holonomy_from_samples(path, &samples)
}

/// Same as [`smooth_holonomy`] from precomputed potential samples.
pub fn smooth_holonomy_from_samples<P: ChannelPath + ?Sized>(
    path: &P,
    samples: &[GaugePotentialSample],
) -> Result<CMat> {
    let pairs: Vec<(f64, CMat)> = samples.iter().map(|g| (g.s, g.a.clone())).collect();
    let transport = crate::matcore::path_ordered_exponential(&pairs)?;
    Ok(endpoint_polar(path)? * transport)
}

/// `N` channels sampled at evenly spaced parameters, endpoints included.
pub fn discretize<P: ChannelPath + ?Sized>(path: &P, n: usize) -> Result<ChannelSequence> {
    if n < 2 {
        return Err(Error::EmptyPath);
    }
    let reps = uniform_grid(path, n - 1).into_iter().map(|s| path.kraus_at(s)).collect::<Result<Vec<_>>>()?;
    ChannelSequence::new(reps)
}

/// Distances `‖U_discrete(N) − U_smooth‖` for each `N` and the fitted
/// convergence order between consecutive entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Convergence {
    pub sizes: Vec<usize>,
    pub errors: Vec<f64>,
    pub orders: Vec<f64>,
}

pub fn convergence_study<P: ChannelPath + ?Sized>(path: &P, reference: &CMat, sizes: &[usize]) -> Result<Convergence> {
    let errors = sizes
        .iter()
        .map(|&n| Ok((holonomy(&discretize(path, n)?)? - reference).norm()))
        .collect::<Result<Vec<f64>>>()?;
    let orders = sizes
        .windows(2)
        .zip(errors.windows(2))
        .map(|(n, e)| libm::log(e[0] / e[1]) / libm::log(n[1] as f64 / n[0] as f64))
        .collect();
    Ok(Convergence { sizes: sizes.to_vec(), errors, orders })
}

/// Result of integrating `iU̇ = HU` over `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryFamilyHolonomy {
    pub gamma: C64,
    pub final_unitary: CMat,
    /// `∫ Tr H ds`.
    pub trace_integral: f64,
    /// Largest unitarity defect seen before a re-projection.
    pub max_defect: f64,
}

/// `γ = Φ(Tr U(0)†U(1)) exp((i/D)∫Tr H ds)` for `iU̇ = HU`, `U(0) = U0`.
///
/// Exponential midpoint stepping, re-projected onto the unitaries every
/// [`tol::REUNITARIZE_EVERY`] steps.
pub fn unitary_family_holonomy<H>(mut h: H, u0: &CMat, steps: usize) -> Result<UnitaryFamilyHolonomy>
where
    H: FnMut(f64) -> CMat,
{
    if steps == 0 {
        return Err(Error::EmptyPath);
    }
    let d = crate::matcore::ensure_square(u0)?;
    let dt = 1.0 / steps as f64;
    let mut u = u0.clone();
    let mut trace_integral = 0.0;
    let mut max_defect: f64 = 0.0;
    for j in 0..steps {
        let hm = h((j as f64 + 0.5) * dt);
        if hm.nrows() != d || hm.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: hm.nrows() });
        }
        if !is_finite(&hm) {
            return Err(Error::NonFinite);
        }
        trace_integral += hm.trace().re * dt;
        u = exp_anti_hermitian(&(hm * c64(0.0, -dt))) * u;
        if (j + 1) % tol::REUNITARIZE_EVERY == 0 || j + 1 == steps {
            let defect = unitarity_defect(&u);
            max_defect = max_defect.max(defect);
            if !(defect <= 1e-9) {
                return Err(Error::IntegratorFailure { defect });
            }
            u = polar(&u)?;
        }
    }
    let z = (u0.adjoint() * &u).trace();
    let theta = trace_integral / d as f64;
    let gamma = polar_phase(z).map_err(|_| Error::RankDeficient { sigma_min: z.norm(), sigma_max: z.norm() })?
        * c64(libm::cos(theta), libm::sin(theta));
    Ok(UnitaryFamilyHolonomy { gamma, final_unitary: u, trace_integral, max_defect })
}

/// Path given by closures for the operators and, optionally, their derivatives.
pub struct FnPath<F, G = fn(f64) -> Result<Vec<CMat>>> {
    dim: usize,
    k: usize,
    domain: (f64, f64),
    ops: F,
    derivative: Option<G>,
}

impl<F> FnPath<F>
where
    F: Fn(f64) -> Result<Vec<CMat>>,
{
    pub fn new(dim: usize, k: usize, ops: F) -> Self {
        Self { dim, k, domain: (0.0, 1.0), ops, derivative: None }
    }
}

impl<F, G> FnPath<F, G>
where
    F: Fn(f64) -> Result<Vec<CMat>>,
    G: Fn(f64) -> Result<Vec<CMat>>,
{
    pub fn with_derivative(dim: usize, k: usize, ops: F, derivative: G) -> Self {
        Self { dim, k, domain: (0.0, 1.0), ops, derivative: Some(derivative) }
    }

    pub fn on_domain(mut self, lo: f64, hi: f64) -> Self {
        self.domain = (lo, hi);
        self
    }
}

impl<F, G> ChannelPath for FnPath<F, G>
where
    F: Fn(f64) -> Result<Vec<CMat>>,
    G: Fn(f64) -> Result<Vec<CMat>>,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn kraus_number(&self) -> usize {
        self.k
    }

    fn kraus_at(&self, s: f64) -> Result<KrausRep> {
        let rep = KrausRep::new((self.ops)(s)?)?;
        if rep.dim() != self.dim || rep.len() != self.k {
            return Err(Error::BadArity { dim: rep.dim(), k: rep.len() });
        }
        Ok(rep)
    }

    fn derivative_at(&self, s: f64) -> Result<Vec<CMat>> {
        match &self.derivative {
            Some(g) => g(s),
            None => finite_difference(self, s, tol::FD_STEP),
        }
    }

    fn domain(&self) -> (f64, f64) {
        self.domain
    }
}

/// `E_k(s)` are the `D×D` blocks of the first `D` columns of `exp(sM)V0`,
/// with `M` anti-Hermitian and `V0` unitary of size `DK`.
///
/// Every member is trace preserving and the derivative is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometryPath {
    dim: usize,
    k: usize,
    generator: CMat,
    base: CMat,
}

impl IsometryPath {
    pub fn new(dim: usize, k: usize, generator: CMat, base: CMat) -> Result<Self> {
        let n = dim * k;
        for m in [&generator, &base] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.nrows() });
            }
        }
        let residual = (&generator + generator.adjoint()).norm();
        if residual > tol::ANTI_HERMITIAN_TOL * (1.0 + generator.norm()) {
            return Err(Error::NotAntiHermitian { residual });
        }
        let residual = unitarity_defect(&base);
        if residual > tol::UNITARY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self { dim, k, generator, base })
    }

    /// Haar `V0` and a Gaussian anti-Hermitian `M` scaled by `speed`.
    pub fn random<R: rand::Rng + ?Sized>(dim: usize, k: usize, speed: f64, rng: &mut R) -> Self {
        let n = dim * k;
        let generator = crate::random::random_anti_hermitian(n, rng) * real(speed);
        let base = crate::random::haar_unitary(n, rng);
        Self { dim, k, generator, base }
    }

    pub fn generator(&self) -> &CMat {
        &self.generator
    }

    fn isometry(&self, s: f64) -> CMat {
        exp_anti_hermitian(&(&self.generator * real(s))) * &self.base
    }

    fn blocks(&self, v: &CMat) -> Vec<CMat> {
        let d = self.dim;
        (0..self.k).map(|b| v.view((b * d, 0), (d, d)).into_owned()).collect()
    }
}

impl ChannelPath for IsometryPath {
    fn dim(&self) -> usize {
        self.dim
    }

    fn kraus_number(&self) -> usize {
        self.k
    }

    fn kraus_at(&self, s: f64) -> Result<KrausRep> {
        KrausRep::new(self.blocks(&self.isometry(s)))
    }

    fn derivative_at(&self, s: f64) -> Result<Vec<CMat>> {
        Ok(self.blocks(&(&self.generator * self.isometry(s))))
    }
}

/// `E'_k(s) = Σ_l E_l(s) V_{lk}(s)` with `V(s) = exp(sM)V0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugedPath<P> {
    inner: P,
    generator: CMat,
    base: CMat,
}

impl<P: ChannelPath> GaugedPath<P> {
    pub fn new(inner: P, generator: CMat, base: CMat) -> Result<Self> {
        let k = inner.kraus_number();
        for m in [&generator, &base] {
            if m.nrows() != k || m.ncols() != k {
                return Err(Error::DimensionMismatch { expected: k, found: m.nrows() });
            }
        }
        Ok(Self { inner, generator, base })
    }

    /// `V(s)`.
    pub fn gauge_at(&self, s: f64) -> CMat {
        exp_anti_hermitian(&(&self.generator * real(s))) * &self.base
    }

    pub fn generator(&self) -> &CMat {
        &self.generator
    }
}

fn mix(ops: &[CMat], v: &CMat) -> Vec<CMat> {
    let (d, k) = (ops[0].nrows(), ops.len());
    (0..k)
        .map(|col| (0..k).fold(CMat::zeros(d, d), |acc, l| acc + &ops[l] * v[(l, col)]))
        .collect()
}

impl<P: ChannelPath> ChannelPath for GaugedPath<P> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn kraus_number(&self) -> usize {
        self.inner.kraus_number()
    }

    fn kraus_at(&self, s: f64) -> Result<KrausRep> {
        let rep = self.inner.kraus_at(s)?;
        KrausRep::new(mix(rep.ops(), &self.gauge_at(s)))
    }

    fn derivative_at(&self, s: f64) -> Result<Vec<CMat>> {
        let rep = self.inner.kraus_at(s)?;
        let dot = self.inner.derivative_at(s)?;
        let v = self.gauge_at(s);
        let v_dot = &self.generator * &v;
        Ok(mix(&dot, &v).into_iter().zip(mix(rep.ops(), &v_dot)).map(|(a, b)| a + b).collect())
    }

    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }
}

/// Path through sampled Kraus lists, interpolated by Catmull–Rom cubics.
///
/// Tangents are centred differences of neighbouring samples and one-sided at
/// the two ends; derivatives come from the cubic itself.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    dim: usize,
    k: usize,
    grid: Vec<f64>,
    samples: Vec<Vec<CMat>>,
    tangents: Vec<Vec<CMat>>,
}

impl SampledPath {
    pub fn new(grid: Vec<f64>, reps: Vec<KrausRep>) -> Result<Self> {
        if grid.len() != reps.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: reps.len() });
        }
        if grid.len() < 2 {
            return Err(Error::EmptyPath);
        }
        for i in 1..grid.len() {
            if !(grid[i] > grid[i - 1]) {
                return Err(Error::NonMonotoneGrid { index: i });
            }
        }
        let (dim, k) = (reps[0].dim(), reps[0].len());
        for rep in &reps {
            if rep.dim() != dim || rep.len() != k {
                return Err(Error::BadArity { dim: rep.dim(), k: rep.len() });
            }
        }
        let samples: Vec<Vec<CMat>> = reps.into_iter().map(KrausRep::into_ops).collect();
        let n = grid.len();
        let tangents = (0..n)
            .map(|i| {
                let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
                let dt = grid[b] - grid[a];
                samples[a].iter().zip(&samples[b]).map(|(x, y)| (y - x) * real(1.0 / dt)).collect()
            })
            .collect();
        Ok(Self { dim, k, grid, samples, tangents })
    }

    /// Samples a path on an evenly spaced grid of `steps + 1` points.
    pub fn from_path<P: ChannelPath + ?Sized>(path: &P, steps: usize) -> Result<Self> {
        let grid = uniform_grid(path, steps);
        let reps = grid.iter().map(|&s| path.kraus_at(s)).collect::<Result<Vec<_>>>()?;
        Self::new(grid, reps)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    fn segment(&self, s: f64) -> Result<usize> {
        let (lo, hi) = self.domain();
        if !(s >= lo && s <= hi) {
            return Err(Error::ParamOutOfRange { name: "s", value: s });
        }
        let idx = self.grid.partition_point(|&g| g <= s);
        Ok(idx.saturating_sub(1).min(self.grid.len() - 2))
    }

    fn hermite(&self, s: f64, derivative: bool) -> Result<Vec<CMat>> {
        let i = self.segment(s)?;
        let (t0, t1) = (self.grid[i], self.grid[i + 1]);
        let dt = t1 - t0;
        let t = (s - t0) / dt;
        let (t2, t3) = (t * t, t * t * t);
        let w = if derivative {
            [(6.0 * t2 - 6.0 * t) / dt, 3.0 * t2 - 4.0 * t + 1.0, (-6.0 * t2 + 6.0 * t) / dt, 3.0 * t2 - 2.0 * t]
        } else {
            [2.0 * t3 - 3.0 * t2 + 1.0, (t3 - 2.0 * t2 + t) * dt, -2.0 * t3 + 3.0 * t2, (t3 - t2) * dt]
        };
        Ok((0..self.k)
            .map(|op| {
                &self.samples[i][op] * real(w[0])
                    + &self.tangents[i][op] * real(w[1])
                    + &self.samples[i + 1][op] * real(w[2])
                    + &self.tangents[i + 1][op] * real(w[3])
            })
            .collect())
    }
}

impl ChannelPath for SampledPath {
    fn dim(&self) -> usize {
        self.dim
    }

    fn kraus_number(&self) -> usize {
        self.k
    }

    fn kraus_at(&self, s: f64) -> Result<KrausRep> {
        KrausRep::new(self.hermite(s, false)?)
    }

    fn derivative_at(&self, s: f64) -> Result<Vec<CMat>> {
        self.hermite(s, true)
    }

    fn domain(&self) -> (f64, f64) {
        (self.grid[0], self.grid[self.grid.len() - 1])
    }
}

/// `U(s) = exp(−isφ n̂·σ/2)` as a one-operator path.
pub fn spin_rotation_path(phi: f64, axis: [f64; 3]) -> Result<FnPath<impl Fn(f64) -> Result<Vec<CMat>>, impl Fn(f64) -> Result<Vec<CMat>>>> {
    let norm = libm::sqrt(dot(&axis, &axis));
    if !(norm > 0.0) {
        return Err(Error::ZeroInput);
    }
    let n = [axis[0] / norm, axis[1] / norm, axis[2] / norm];
    let generator = crate::ops::pauli_dot(n) * c64(0.0, -phi / 2.0);
    let g2 = generator.clone();
    Ok(FnPath::with_derivative(
        2,
        1,
        move |s| Ok(alloc::vec![exp_anti_hermitian(&(&generator * real(s)))]),
        move |s| Ok(alloc::vec![&g2 * exp_anti_hermitian(&(&g2 * real(s)))]),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{anti_hermitian_part, I, ONE};
    use crate::ops::{pauli_dot, pauli_z};
    use crate::random::{haar_unitary, random_anti_hermitian, random_hermitian, seeded, uniform};
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn imag(x: f64) -> C64 {
        I * x
    }

    fn constant_path(rep: KrausRep) -> FnPath<impl Fn(f64) -> Result<Vec<CMat>>> {
        let (d, k) = (rep.dim(), rep.len());
        FnPath::new(d, k, move |_| Ok(rep.ops().to_vec()))
    }

    #[test]
    fn constant_path_has_hermitian_r_and_trivial_holonomy() {
        let rep = crate::kraus::random_channel(2, 3, 1).unwrap();
        let path = constant_path(rep);
        let qr = qr_matrices(&path, 0.4).unwrap();
        assert!((&qr.r + qr.r.adjoint()).norm() < 1e-9);
        assert!(is_parallel_transported(&path, &[0.0, 0.5, 1.0], 1e-8));
        assert!((smooth_holonomy(&path, 16).unwrap() - eye(3)).norm() < 1e-9);
    }

    #[test]
    fn spin_path_r_vanishes() {
        let path = spin_rotation_path(1.0, [0.0, 0.0, 1.0]).unwrap();
        let qr = qr_matrices(&path, 0.3).unwrap();
        assert!((qr.q[(0, 0)] - real(2.0)).norm() < 1e-12);
        assert!(qr.r[(0, 0)].norm() < 1e-12);
    }

    #[test]
    fn r_hermitian_part_is_half_q_dot() {
        let mut rng = seeded(3);
        let inner = IsometryPath::random(2, 3, 1.0, &mut rng);
        // A non-unitary re-gauging makes Q vary along the path.
        let stretch = random_hermitian(3, &mut rng) * real(0.3);
        let path = FnPath::new(2, 3, move |s| {
            let ops = inner.kraus_at(s)?.into_ops();
            Ok(mix(&ops, &(eye(3) + &stretch * real(s))))
        });
        let s = 0.37;
        let qr = qr_matrices(&path, s).unwrap();
        let h = 1e-4;
        let q_dot = (qr_matrices(&path, s + h).unwrap().q - qr_matrices(&path, s - h).unwrap().q) * real(1.0 / (2.0 * h));
        assert!((&qr.r + qr.r.adjoint() - q_dot).norm() < 1e-6);
    }

    #[test]
    fn phase_gauge_is_not_parallel() {
        let mut rng = seeded(4);
        let inner = IsometryPath::random(2, 2, 0.0, &mut rng);
        let omega = 0.7;
        let path = GaugedPath::new(inner, eye(2) * imag(omega), eye(2)).unwrap();
        assert!(!is_parallel_transported(&path, &[0.0, 0.5, 1.0], 1e-8));
        let g = gauge_potential(&path, 0.5).unwrap();
        // Ė = iωE gives R = −iωQ, so A = −iω.
        assert!((g.a + eye(2) * imag(omega)).norm() < 1e-8);
    }

    #[test]
    fn k2_closed_form_examples() {
        let q = eye(2) + pauli_dot([0.2, -0.1, 0.3]);
        let hermitian_r = pauli_dot([0.4, 0.1, 0.0]);
        assert!(gauge_potential_k2_closed_form(&q, &hermitian_r).unwrap().norm() < 1e-14);

        let r = eye(2) * imag(0.3) + pauli_dot([0.5, 0.2, -0.7]) * I;
        let a = gauge_potential_k2_closed_form(&eye(2), &r).unwrap();
        assert!((a - &r).norm() < 1e-14);

        let q = eye(2) + pauli_dot([1.0, 0.0, 0.0]);
        assert_eq!(gauge_potential_k2_closed_form(&q, &r), Err(Error::XNormOne));
    }

    #[test]
    fn k2_closed_form_matches_solver_on_a_path() {
        let mut rng = seeded(8);
        let path = IsometryPath::random(3, 2, 1.0, &mut rng);
        for s in [0.0, 0.3, 0.8] {
            let g = gauge_potential(&path, s).unwrap();
            let closed = gauge_potential_k2_closed_form(&g.q, &g.r).unwrap();
            assert!((closed - &g.a).norm() < 1e-10);
        }
    }

    #[test]
    fn random_k3_residuals() {
        let mut rng = seeded(9);
        let path = IsometryPath::random(2, 3, 1.5, &mut rng);
        for j in 0..10 {
            let g = gauge_potential(&path, j as f64 / 9.0).unwrap();
            assert!(g.residual() < 1e-9);
            assert!((&g.a + g.a.adjoint()).norm() < 1e-12);
        }
    }

    #[test]
    fn potential_transforms_as_gauge_field() {
        let mut rng = seeded(10);
        let inner = IsometryPath::random(2, 3, 1.0, &mut rng);
        let m = random_anti_hermitian(3, &mut rng);
        let v0 = haar_unitary(3, &mut rng);
        let moved = GaugedPath::new(inner.clone(), m.clone(), v0).unwrap();
        for s in [0.1, 0.5, 0.9] {
            let a = gauge_potential(&inner, s).unwrap().a;
            let v = moved.gauge_at(s);
            let expected = v.adjoint() * &a * &v - v.adjoint() * &m * &v;
            assert!((gauge_potential(&moved, s).unwrap().a - expected).norm() < 1e-10);
        }
    }

    #[test]
    fn potential_transform_with_finite_differences() {
        let mut rng = seeded(11);
        let inner = IsometryPath::random(2, 2, 1.0, &mut rng);
        let m = random_anti_hermitian(2, &mut rng);
        let v0 = haar_unitary(2, &mut rng);
        let moved = GaugedPath::new(inner.clone(), m.clone(), v0).unwrap();
        let numeric = FnPath::new(2, 2, |s| Ok(moved.kraus_at(s)?.into_ops()));
        let s = 0.42;
        let a = gauge_potential(&inner, s).unwrap().a;
        let v = moved.gauge_at(s);
        let expected = v.adjoint() * &a * &v - v.adjoint() * &m * &v;
        assert!((gauge_potential(&numeric, s).unwrap().a - expected).norm() < 1e-7);
    }

    #[test]
    fn holonomy_covariance_under_smooth_regauging() {
        let mut rng = seeded(12);
        let inner = IsometryPath::random(2, 2, 1.2, &mut rng);
        let v0 = haar_unitary(2, &mut rng);
        let moved = GaugedPath::new(inner.clone(), random_anti_hermitian(2, &mut rng), v0.clone()).unwrap();
        let u = smooth_holonomy(&inner, 512).unwrap();
        let u_moved = smooth_holonomy(&moved, 512).unwrap();
        assert!((u_moved - v0.adjoint() * u * &v0).norm() < 1e-5);
    }

    #[test]
    fn spin_rotation_signs() {
        let path = spin_rotation_path(2.0 * PI, [0.0, 0.0, 1.0]).unwrap();
        let u = smooth_holonomy(&path, 64).unwrap();
        assert!((u[(0, 0)] + ONE).norm() < 1e-9);
        let path = spin_rotation_path(4.0 * PI, [0.3, 0.1, 1.0]).unwrap();
        assert!((smooth_holonomy(&path, 64).unwrap()[(0, 0)] - ONE).norm() < 1e-9);
        // cos(3π/2) = 0: the endpoint overlap vanishes.
        let path = spin_rotation_path(3.0 * PI, [0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(smooth_holonomy(&path, 64), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn discrete_sequences_converge_to_smooth_holonomy() {
        let mut rng = seeded(13);
        let path = IsometryPath::random(2, 2, 1.0, &mut rng);
        let reference = smooth_holonomy(&path, 4096).unwrap();
        let study = convergence_study(&path, &reference, &[250, 500, 1000, 2000]).unwrap();
        assert!(study.errors[3] < 1e-3);
        for p in &study.orders {
            assert!(*p >= 1.0, "{study:?}");
        }
    }

    #[test]
    fn unitary_family_examples() {
        let u0 = eye(2);
        let r = unitary_family_holonomy(|_| CMat::zeros(2, 2), &u0, 64).unwrap();
        assert!((r.gamma - ONE).norm() < 1e-14);

        // H = (π/2)σ_z gives U(1) = e^{−iπσ_z/2} with zero trace.
        let r = unitary_family_holonomy(|_| pauli_z() * real(PI / 2.0), &u0, 256).unwrap();
        assert!((&r.final_unitary - pauli_z() * c64(0.0, -1.0)).norm() < 1e-9);

        let h0 = |s: f64| pauli_dot([libm::cos(s), 0.5, s]) * real(2.0);
        let a = unitary_family_holonomy(h0, &u0, 4096).unwrap();
        let b = unitary_family_holonomy(|s| h0(s) + eye(2) * real(3.0 * libm::sin(4.0 * s) + 1.3), &u0, 4096).unwrap();
        assert!((a.gamma - b.gamma).norm() < 1e-9);
    }

    #[test]
    fn unitary_family_matches_smooth_holonomy_of_induced_path() {
        let mut rng = seeded(14);
        let h = random_hermitian(3, &mut rng) + eye(3) * real(0.8);
        let u0 = haar_unitary(3, &mut rng);
        let gamma = unitary_family_holonomy(|_| h.clone(), &u0, 1024).unwrap().gamma;
        let gen = &h * c64(0.0, -1.0);
        let path = IsometryPath::new(3, 1, crate::ops::kron(&gen, &eye(1)), u0).unwrap();
        let u = smooth_holonomy(&path, 1024).unwrap();
        assert!((u[(0, 0)] - gamma).norm() < 1e-8);
    }

    #[test]
    fn sampled_path_reproduces_smooth_family() {
        let mut rng = seeded(15);
        let path = IsometryPath::random(2, 2, 0.8, &mut rng);
        let sampled = SampledPath::from_path(&path, 200).unwrap();
        let s = 0.333;
        let a = path.kraus_at(s).unwrap();
        let b = sampled.kraus_at(s).unwrap();
        for (x, y) in a.ops().iter().zip(b.ops()) {
            assert!((x - y).norm() < 1e-6);
        }
        let exact = smooth_holonomy(&path, 400).unwrap();
        let approx = smooth_holonomy(&sampled, 400).unwrap();
        assert!((exact - approx).norm() < 1e-4);
    }

    #[test]
    fn finite_differences_near_the_ends() {
        let mut rng = seeded(16);
        let path = IsometryPath::random(2, 2, 1.0, &mut rng);
        let numeric = FnPath::new(2, 2, |s| Ok(path.kraus_at(s)?.into_ops()));
        for s in [0.0, 1e-6, 0.5, 1.0] {
            let exact = path.derivative_at(s).unwrap();
            let approx = numeric.derivative_at(s).unwrap();
            for (x, y) in exact.iter().zip(&approx) {
                assert!((x - y).norm() < 1e-7, "s = {s}");
            }
        }
        assert!(matches!(numeric.derivative_at(1.5), Err(Error::DerivativeUnavailable { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn potential_is_anti_hermitian_and_solves_equation(seed in any::<u64>(), s in 0.0f64..1.0) {
            let mut rng = seeded(seed);
            let path = IsometryPath::random(2, 3, uniform(0.1, 2.0, &mut rng), &mut rng);
            let g = gauge_potential(&path, s).unwrap();
            prop_assert!((&g.a - anti_hermitian_part(&g.a)).norm() < 1e-12);
            prop_assert!(g.residual() < 1e-9);
            prop_assert!(qr_matrices(&path, s).unwrap().re_trace_r < 1e-9);
        }

        #[test]
        fn qubit_unitary_family_gamma_is_a_sign(seed in any::<u64>()) {
            let mut rng = seeded(seed);
            let h0 = random_hermitian(2, &mut rng);
            let h1 = random_hermitian(2, &mut rng);
            let u0 = haar_unitary(2, &mut rng);
            let r = unitary_family_holonomy(|s| &h0 + &h1 * real(s), &u0, 512);
            prop_assume!(r.is_ok());
            let g = r.unwrap().gamma;
            prop_assert!((g - ONE).norm() < 1e-9 || (g + ONE).norm() < 1e-9);
        }
    }
}
