//! Holonomic channels of smoothly moving subspace decompositions.
//!
//! For orthonormal frames `a_k(s)` (`D×D_k`) spanning `H_k(s)`, the
//! connection is `[A_k]_{ij} = ⟨ȧ_i|a_j⟩`, the Wilson line solves `Ẇ = A_k W`
//! and `Γ_k(s) = a_k(s) W_k(s) a_k(0)†`, the limit of the projector products
//! `P_k(s) ⋯ P_k(0)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kraus::KrausRep;
use crate::matcore::{
    c64, exp_anti_hermitian, eye, hermitian_eigen, path_ordered_exponential_fn, polar_phase, real, singular_values, unitarity_defect,
    CMat, C64, ZERO,
};
use crate::tol;

/// Orthonormal frames `s ↦ a_k(s)` for a decomposition `H = ⊕ H_k(s)`.
pub trait FrameFamily {
    fn dim(&self) -> usize;

    fn block_dims(&self) -> Vec<usize>;

    /// `D × D_k` frame of block `k`.
    fn frame_at(&self, k: usize, s: f64) -> Result<CMat>;

    /// Defaults to fourth-order central differences.
    fn frame_derivative_at(&self, k: usize, s: f64) -> Result<CMat> {
        let h = tol::FD_STEP;
        let f = |o: f64| self.frame_at(k, s + o * h);
        Ok((f(-2.0)? - f(2.0)? + (f(1.0)? - f(-1.0)?) * real(8.0)) * real(1.0 / (12.0 * h)))
    }

    fn blocks(&self) -> usize {
        self.block_dims().len()
    }

    /// `P_k(s) = a_k a_k†`.
    fn projector_at(&self, k: usize, s: f64) -> Result<CMat> {
        let a = self.frame_at(k, s)?;
        Ok(&a * a.adjoint())
    }
}

impl<F: FrameFamily + ?Sized> FrameFamily for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn block_dims(&self) -> Vec<usize> {
        (**self).block_dims()
    }
    fn frame_at(&self, k: usize, s: f64) -> Result<CMat> {
        (**self).frame_at(k, s)
    }
    fn frame_derivative_at(&self, k: usize, s: f64) -> Result<CMat> {
        (**self).frame_derivative_at(k, s)
    }
}

/// `‖[a_1 ⋯ a_K]†[a_1 ⋯ a_K] − I‖` at `s`, covering orthogonality across blocks.
pub fn frame_defect<F: FrameFamily + ?Sized>(fam: &F, s: f64) -> Result<f64> {
    let dims = fam.block_dims();
    let d = fam.dim();
    if dims.iter().sum::<usize>() != d {
        return Err(Error::DimensionMismatch { expected: d, found: dims.iter().sum() });
    }
    let mut full = CMat::from_element(d, d, ZERO);
    let mut col = 0;
    for (k, &dk) in dims.iter().enumerate() {
        let a = fam.frame_at(k, s)?;
        if a.nrows() != d || a.ncols() != dk {
            return Err(Error::DimensionMismatch { expected: dk, found: a.ncols() });
        }
        full.view_mut((0, col), (d, dk)).copy_from(&a);
        col += dk;
    }
    Ok(unitarity_defect(&full))
}

/// `[A_k(s)]_{ij} = ⟨ȧ_i|a_j⟩`, made exactly anti-Hermitian.
pub fn connection<F: FrameFamily + ?Sized>(fam: &F, k: usize, s: f64) -> Result<CMat> {
    let a = fam.frame_at(k, s)?;
    let a_dot = fam.frame_derivative_at(k, s)?;
    Ok(crate::matcore::anti_hermitian_part(&(a_dot.adjoint() * a)))
}

/// Wilson line `W_k(s) = P exp(∫_0^s A_k)` and `Tr(a_k(0)† a_k(s) W_k(s))`.
#[derive(Debug, Clone, PartialEq)]
pub struct WilsonLine {
    pub block: usize,
    pub matrix: CMat,
    pub overlap_factor: C64,
}

pub fn wilson_line<F: FrameFamily + ?Sized>(fam: &F, k: usize, s: f64, steps: usize) -> Result<WilsonLine> {
    if steps < 2 {
        return Err(Error::EmptyPath);
    }
    check_continuity(fam, k, s, steps)?;
    let matrix = path_ordered_exponential_fn(|t| connection(fam, k, t), 0.0, s, steps)?;
    let a0 = fam.frame_at(k, 0.0)?;
    let a1 = fam.frame_at(k, s)?;
    let overlap_factor = (a0.adjoint() * a1 * &matrix).trace();
    Ok(WilsonLine { block: k, matrix, overlap_factor })
}

fn check_continuity<F: FrameFamily + ?Sized>(fam: &F, k: usize, s: f64, steps: usize) -> Result<()> {
    let mut prev = fam.frame_at(k, 0.0)?;
    for j in 1..=steps {
        let t = s * j as f64 / steps as f64;
        let next = fam.frame_at(k, t)?;
        let sv = singular_values(&(next.adjoint() * &prev));
        if sv.last().is_none_or(|&lo| lo <= 0.5) {
            return Err(Error::FrameDiscontinuity { block: k, s: t });
        }
        prev = next;
    }
    Ok(())
}

/// `Γ_k(s) = a_k(s) W_k(s) a_k(0)†` for every block.
pub fn gamma_operators<F: FrameFamily + ?Sized>(fam: &F, s: f64, steps: usize) -> Result<Vec<CMat>> {
    (0..fam.blocks())
        .map(|k| {
            let w = wilson_line(fam, k, s, steps)?;
            Ok(fam.frame_at(k, s)? * w.matrix * fam.frame_at(k, 0.0)?.adjoint())
        })
        .collect()
}

pub fn holonomic_channel<F: FrameFamily + ?Sized>(fam: &F, s: f64, steps: usize) -> Result<KrausRep> {
    KrausRep::new(gamma_operators(fam, s, steps)?)
}

/// `Σ_k Γ_k ρ Γ_k†`.
pub fn holonomic_channel_output<F: FrameFamily + ?Sized>(fam: &F, s: f64, steps: usize, rho: &CMat) -> Result<CMat> {
    Ok(holonomic_channel(fam, s, steps)?.apply(rho))
}

/// `P_k(s) P_k(s − δ) ⋯ P_k(0)` with `δ = s/n`.
pub fn projector_product<F: FrameFamily + ?Sized>(fam: &F, k: usize, s: f64, n: usize) -> Result<CMat> {
    let mut acc = fam.projector_at(k, 0.0)?;
    for j in 1..=n {
        acc = fam.projector_at(k, s * j as f64 / n as f64)? * acc;
    }
    Ok(acc)
}

/// `max_{k,l} |Tr(Γ̇_k†(s) Γ_l(s))|`, with `Γ̇` from short transports either side of `s`.
pub fn parallel_transport_residual<F: FrameFamily + ?Sized>(fam: &F, s: f64, steps: usize) -> Result<f64> {
    let h = 1e-4;
    let sub = 8;
    let kb = fam.blocks();
    let mut gammas = Vec::with_capacity(kb);
    let mut derivs = Vec::with_capacity(kb);
    for k in 0..kb {
        let w = wilson_line(fam, k, s, steps)?.matrix;
        let a0 = fam.frame_at(k, 0.0)?.adjoint();
        let at = |t: f64| -> Result<CMat> {
            let step = if t >= s {
                path_ordered_exponential_fn(|x| connection(fam, k, x), s, t, sub)?
            } else {
                path_ordered_exponential_fn(|x| connection(fam, k, x), t, s, sub)?.adjoint()
            };
            Ok(fam.frame_at(k, t)? * step * &w * &a0)
        };
        let d = (at(s - 2.0 * h)? - at(s + 2.0 * h)? + (at(s + h)? - at(s - h)?) * real(8.0)) * real(1.0 / (12.0 * h));
        gammas.push(at(s)?);
        derivs.push(d);
    }
    let mut worst: f64 = 0.0;
    for dk in &derivs {
        for gl in &gammas {
            worst = worst.max((dk.adjoint() * gl).trace().norm());
        }
    }
    Ok(worst)
}

/// Diagonal holonomy of a loop of holonomic channels.
#[derive(Debug, Clone, PartialEq)]
pub struct HolonomicHolonomy {
    /// `diag(Φ(Tr U_g(C_1)), …)`.
    pub matrix: CMat,
    /// `Tr U_g(C_k)`, the diagonal of `T_{0,1}`.
    pub traces: Vec<C64>,
    /// `T_{0,1}` computed from `Tr(P_k(0) Γ_l(1))`.
    pub overlap: CMat,
}

pub fn holonomic_channel_holonomy<F: FrameFamily + ?Sized>(fam: &F, steps: usize) -> Result<HolonomicHolonomy> {
    let kb = fam.blocks();
    let gammas = gamma_operators(fam, 1.0, steps)?;
    let projectors = (0..kb).map(|k| fam.projector_at(k, 0.0)).collect::<Result<Vec<_>>>()?;
    let overlap = CMat::from_fn(kb, kb, |k, l| (&projectors[k] * &gammas[l]).trace());
    let dims = fam.block_dims();
    let mut traces = Vec::with_capacity(kb);
    let mut matrix = CMat::from_element(kb, kb, ZERO);
    for k in 0..kb {
        let t = overlap[(k, k)];
        if t.norm() <= tol::RANK_TOL * dims[k] as f64 {
            return Err(Error::VanishingTrace { block: k });
        }
        matrix[(k, k)] = polar_phase(t)?;
        traces.push(t);
    }
    Ok(HolonomicHolonomy { matrix, traces, overlap })
}

/// Output of `N + 1` successive non-selective projective measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementApproximation {
    pub output: CMat,
    /// `Σ_k P_k(s_N) ⋯ P_k(s_0) ρ P_k(s_0) ⋯ P_k(s_N)`.
    pub same_index: CMat,
    /// `Tr R(ρ) = Tr ρ − Tr(same_index)`.
    pub remainder_mass: f64,
}

/// Measurements `{P_k(s_j)}` at `s_j = j s / N`, `j = 0, …, N`.
///
/// The sum over outcome strings equals the composition of the `N + 1`
/// pinchings, which is what is computed.
pub fn measurement_approximation<F: FrameFamily + ?Sized>(
    fam: &F,
    s: f64,
    n: usize,
    rho: &CMat,
) -> Result<MeasurementApproximation> {
    let n = n.max(1);
    let kb = fam.blocks();
    let mut output = rho.clone();
    let mut chains: Vec<CMat> = alloc::vec![eye(fam.dim()); kb];
    for j in 0..=n {
        let t = s * j as f64 / n as f64;
        let projectors = (0..kb).map(|k| fam.projector_at(k, t)).collect::<Result<Vec<_>>>()?;
        output = projectors.iter().fold(CMat::zeros(rho.nrows(), rho.ncols()), |acc, p| acc + p * &output * p);
        for (c, p) in chains.iter_mut().zip(&projectors) {
            *c = p * &*c;
        }
    }
    let same_index = chains.iter().fold(CMat::zeros(rho.nrows(), rho.ncols()), |acc, c| acc + c * rho * c.adjoint());
    let remainder_mass = (rho.trace() - same_index.trace()).re;
    Ok(MeasurementApproximation { output, same_index, remainder_mass })
}

fn unit(v: [f64; 3]) -> Result<[f64; 3]> {
    let n = libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if !(n > 0.0) {
        return Err(Error::ZeroInput);
    }
    Ok([v[0] / n, v[1] / n, v[2] / n])
}

/// Spin-up state along `n` and its orthogonal partner, smooth away from `n = −z`.
fn bloch_frames(n: [f64; 3]) -> Result<[CMat; 2]> {
    let n = unit(n)?;
    let w = 2.0 * (1.0 + n[2]);
    if !(w > 1e-12) {
        return Err(Error::FrameDiscontinuity { block: 0, s: f64::NAN });
    }
    let r = libm::sqrt(w);
    let (alpha, beta) = (c64((1.0 + n[2]) / r, 0.0), c64(n[0] / r, n[1] / r));
    let up = CMat::from_column_slice(2, 1, &[alpha, beta]);
    let down = CMat::from_column_slice(2, 1, &[-beta.conj(), alpha.conj()]);
    Ok([up, down])
}

/// Frames along a Bloch-sphere curve `s ↦ n(s)`, with derivatives taken along
/// the curve's tangent so that corners of piecewise curves are respected.
fn bloch_frame_derivative(n: [f64; 3], n_dot: [f64; 3], k: usize) -> Result<CMat> {
    let h = 1e-5;
    let at = |o: f64| -> Result<CMat> {
        let m = [n[0] + o * h * n_dot[0], n[1] + o * h * n_dot[1], n[2] + o * h * n_dot[2]];
        Ok(bloch_frames(m)?[k].clone())
    };
    Ok((at(-2.0)? - at(2.0)? + (at(1.0)? - at(-1.0)?) * real(8.0)) * real(1.0 / (12.0 * h)))
}

/// Two one-dimensional blocks `(cos ωs, sin ωs)` and `(−sin ωs, cos ωs)`,
/// each carrying an extra phase `e^{iβs}` that cancels in `Γ_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatingPlane {
    pub omega: f64,
    pub beta: f64,
}

impl FrameFamily for RotatingPlane {
    fn dim(&self) -> usize {
        2
    }

    fn block_dims(&self) -> Vec<usize> {
        alloc::vec![1, 1]
    }

    fn frame_at(&self, k: usize, s: f64) -> Result<CMat> {
        let (c, sn) = (libm::cos(self.omega * s), libm::sin(self.omega * s));
        let ph = c64(libm::cos(self.beta * s), libm::sin(self.beta * s));
        let v = match k {
            0 => [real(c), real(sn)],
            1 => [real(-sn), real(c)],
            _ => return Err(Error::DimensionMismatch { expected: 2, found: k }),
        };
        Ok(CMat::from_column_slice(2, 1, &[v[0] * ph, v[1] * ph]))
    }

    fn frame_derivative_at(&self, k: usize, s: f64) -> Result<CMat> {
        let a = self.frame_at(k, s)?;
        let rot = CMat::from_row_slice(2, 2, &[ZERO, real(-self.omega), real(self.omega), ZERO]);
        Ok(&rot * &a + &a * c64(0.0, self.beta))
    }
}

/// Spin states along a circle of polar angle `θ`, azimuth `2πs`.
///
/// The loop encloses the solid angle `Ω = 2π(1 − cos θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochCircle {
    pub theta: f64,
}

impl BlochCircle {
    fn point(&self, s: f64) -> ([f64; 3], [f64; 3]) {
        let phi = 2.0 * core::f64::consts::PI * s;
        let (st, ct) = (libm::sin(self.theta), libm::cos(self.theta));
        let n = [st * libm::cos(phi), st * libm::sin(phi), ct];
        let tau = 2.0 * core::f64::consts::PI;
        (n, [-tau * st * libm::sin(phi), tau * st * libm::cos(phi), 0.0])
    }

    pub fn solid_angle(&self) -> f64 {
        2.0 * core::f64::consts::PI * (1.0 - libm::cos(self.theta))
    }
}

impl FrameFamily for BlochCircle {
    fn dim(&self) -> usize {
        2
    }

    fn block_dims(&self) -> Vec<usize> {
        alloc::vec![1, 1]
    }

    fn frame_at(&self, k: usize, s: f64) -> Result<CMat> {
        block_index(k)?;
        Ok(bloch_frames(self.point(s).0)?[k].clone())
    }

    fn frame_derivative_at(&self, k: usize, s: f64) -> Result<CMat> {
        block_index(k)?;
        let (n, n_dot) = self.point(s);
        bloch_frame_derivative(n, n_dot, k)
    }
}

fn block_index(k: usize) -> Result<()> {
    if k > 1 {
        return Err(Error::DimensionMismatch { expected: 2, found: k });
    }
    Ok(())
}

/// Spin states along the geodesic triangle `a → b → c → a`, with corners at
/// `s = 1/2` and `s = 3/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicTriangle {
    pub vertices: [[f64; 3]; 3],
}

impl GeodesicTriangle {
    pub fn new(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> Result<Self> {
        let vertices = [unit(a)?, unit(b)?, unit(c)?];
        for v in &vertices {
            if v[2] <= -0.5 {
                return Err(Error::ParamOutOfRange { name: "vertex_z", value: v[2] });
            }
        }
        Ok(Self { vertices })
    }

    /// Point and tangent on the arc that starts at `s` (right-continuous).
    fn point(&self, s: f64) -> ([f64; 3], [f64; 3]) {
        let s = s.clamp(0.0, 1.0);
        let (i, t0, len) = if s < 0.5 {
            (0, 0.0, 0.5)
        } else if s < 0.75 {
            (1, 0.5, 0.25)
        } else {
            (2, 0.75, 0.25)
        };
        let (p, q) = (self.vertices[i], self.vertices[(i + 1) % 3]);
        let u = (s - t0) / len;
        let cos_w = (p[0] * q[0] + p[1] * q[1] + p[2] * q[2]).clamp(-1.0, 1.0);
        let w = libm::acos(cos_w);
        let sw = libm::sin(w);
        if sw < 1e-12 {
            return (p, [0.0; 3]);
        }
        let (ca, cb) = (libm::sin((1.0 - u) * w) / sw, libm::sin(u * w) / sw);
        let (da, db) = (-w * libm::cos((1.0 - u) * w) / sw / len, w * libm::cos(u * w) / sw / len);
        let n = [ca * p[0] + cb * q[0], ca * p[1] + cb * q[1], ca * p[2] + cb * q[2]];
        let n_dot = [da * p[0] + db * q[0], da * p[1] + db * q[1], da * p[2] + db * q[2]];
        (n, n_dot)
    }
}

impl FrameFamily for GeodesicTriangle {
    fn dim(&self) -> usize {
        2
    }

    fn block_dims(&self) -> Vec<usize> {
        alloc::vec![1, 1]
    }

    fn frame_at(&self, k: usize, s: f64) -> Result<CMat> {
        block_index(k)?;
        Ok(bloch_frames(self.point(s).0)?[k].clone())
    }

    fn frame_derivative_at(&self, k: usize, s: f64) -> Result<CMat> {
        block_index(k)?;
        let (n, n_dot) = self.point(s);
        bloch_frame_derivative(n, n_dot, k)
    }
}

/// Frames recovered from projectors alone.
///
/// `[0, 1]` is cut into `segments` pieces. Anchor frames at the cuts are
/// continued from the eigenvectors of `P_k(0)`, and inside a piece the frame
/// is `P a_j (a_j† P a_j)^{-1/2}`, the polar alignment of the projected anchor.
/// Frames are continuous; their derivative may jump at the cuts.
pub struct ProjectorFrames<P> {
    dim: usize,
    dims: Vec<usize>,
    projectors: P,
    anchors: Vec<Vec<CMat>>,
}

impl<P> ProjectorFrames<P>
where
    P: Fn(f64) -> Result<Vec<CMat>>,
{
    pub fn new(projectors: P, segments: usize) -> Result<Self> {
        let segments = segments.max(1);
        let start = projectors(0.0)?;
        let dim = start.first().ok_or(Error::EmptyRep)?.nrows();
        let mut first = Vec::with_capacity(start.len());
        for p in &start {
            let (values, vectors) = hermitian_eigen(p);
            let cols: Vec<usize> = (0..dim).filter(|&i| values[i] > 0.5).collect();
            if cols.is_empty() {
                return Err(Error::ZeroInput);
            }
            first.push(CMat::from_fn(dim, cols.len(), |r, c| vectors[(r, cols[c])]));
        }
        let dims = first.iter().map(|a| a.ncols()).collect();
        let mut anchors = alloc::vec![first];
        for j in 1..segments {
            let s = j as f64 / segments as f64;
            let ps = projectors(s)?;
            let next = anchors[j - 1]
                .iter()
                .zip(&ps)
                .enumerate()
                .map(|(k, (a, p))| align(a, p).map_err(|_| Error::FrameDiscontinuity { block: k, s }))
                .collect::<Result<Vec<_>>>()?;
            anchors.push(next);
        }
        Ok(Self { dim, dims, projectors, anchors })
    }
}

/// `P a (a† P a)^{-1/2}`.
fn align(a: &CMat, p: &CMat) -> Result<CMat> {
    let x = p * a;
    let (values, vectors) = hermitian_eigen(&(x.adjoint() * &x));
    if !(values[0] > 1e-6) {
        return Err(Error::RankDeficient { sigma_min: values[0].max(0.0), sigma_max: values[values.len() - 1] });
    }
    let inv_sqrt = CMat::from_diagonal(&crate::matcore::CVec::from_iterator(
        values.len(),
        values.iter().map(|&v| real(1.0 / libm::sqrt(v))),
    ));
    Ok(x * &vectors * inv_sqrt * vectors.adjoint())
}

impl<P> FrameFamily for ProjectorFrames<P>
where
    P: Fn(f64) -> Result<Vec<CMat>>,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn block_dims(&self) -> Vec<usize> {
        self.dims.clone()
    }

    fn frame_at(&self, k: usize, s: f64) -> Result<CMat> {
        if k >= self.dims.len() {
            return Err(Error::DimensionMismatch { expected: self.dims.len(), found: k });
        }
        let n = self.anchors.len();
        let j = ((s * n as f64).floor().max(0.0) as usize).min(n - 1);
        let p = (self.projectors)(s)?;
        if p.len() != self.dims.len() {
            return Err(Error::DimensionMismatch { expected: self.dims.len(), found: p.len() });
        }
        align(&self.anchors[j][k], &p[k]).map_err(|_| Error::FrameDiscontinuity { block: k, s })
    }
}

/// A block of dimension `m` rotating inside `C^D` under `exp(sG)`,
/// `G` anti-Hermitian: frames are column groups of `exp(sG)V0`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryFrames {
    dims: Vec<usize>,
    generator: CMat,
    base: CMat,
}

impl UnitaryFrames {
    pub fn new(dims: Vec<usize>, generator: CMat, base: CMat) -> Result<Self> {
        let d: usize = dims.iter().sum();
        if generator.shape() != (d, d) || base.shape() != (d, d) {
            return Err(Error::DimensionMismatch { expected: d, found: generator.nrows() });
        }
        let residual = unitarity_defect(&base);
        if residual > tol::UNITARY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        let residual = (&generator + generator.adjoint()).norm();
        if residual > tol::ANTI_HERMITIAN_TOL * (1.0 + generator.norm()) {
            return Err(Error::NotAntiHermitian { residual });
        }
        Ok(Self { dims, generator, base })
    }

    pub fn random<R: rand::Rng + ?Sized>(dims: Vec<usize>, speed: f64, rng: &mut R) -> Self {
        let d: usize = dims.iter().sum();
        let generator = crate::random::random_anti_hermitian(d, rng) * real(speed);
        let base = crate::random::haar_unitary(d, rng);
        Self { dims, generator, base }
    }

    fn columns(&self, k: usize) -> Result<(usize, usize)> {
        let dk = *self.dims.get(k).ok_or(Error::DimensionMismatch { expected: self.dims.len(), found: k })?;
        Ok((self.dims[..k].iter().sum(), dk))
    }
}

impl FrameFamily for UnitaryFrames {
    fn dim(&self) -> usize {
        self.dims.iter().sum()
    }

    fn block_dims(&self) -> Vec<usize> {
        self.dims.clone()
    }

    fn frame_at(&self, k: usize, s: f64) -> Result<CMat> {
        let (c0, dk) = self.columns(k)?;
        let u = exp_anti_hermitian(&(&self.generator * real(s))) * &self.base;
        Ok(u.columns(c0, dk).into_owned())
    }

    fn frame_derivative_at(&self, k: usize, s: f64) -> Result<CMat> {
        Ok(&self.generator * self.frame_at(k, s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{hermitian_part, ONE};
    use crate::ops::trace_distance;
    use crate::random::{random_density, seeded};
    use core::f64::consts::PI;
    use proptest::prelude::*;

    struct Constant(UnitaryFrames);

    impl FrameFamily for Constant {
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn block_dims(&self) -> Vec<usize> {
            self.0.block_dims()
        }
        fn frame_at(&self, k: usize, _s: f64) -> Result<CMat> {
            self.0.frame_at(k, 0.0)
        }
    }

    fn solid_angle(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
        let dot = |x: [f64; 3], y: [f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
        let cross = [b[1] * c[2] - b[2] * c[1], b[2] * c[0] - b[0] * c[2], b[0] * c[1] - b[1] * c[0]];
        2.0 * libm::atan2(dot(a, cross), 1.0 + dot(a, b) + dot(b, c) + dot(c, a))
    }

    fn wrap(x: f64) -> f64 {
        let t = 2.0 * PI;
        x - t * libm::round(x / t)
    }

    #[test]
    fn constant_frames_give_projectors() {
        let fam = Constant(UnitaryFrames::random(alloc::vec![1, 2], 1.0, &mut seeded(1)));
        let gammas = gamma_operators(&fam, 0.7, 16).unwrap();
        for (k, g) in gammas.iter().enumerate() {
            assert!((g - fam.projector_at(k, 0.0).unwrap()).norm() < 1e-9);
        }
        let h = holonomic_channel_holonomy(&fam, 16).unwrap();
        assert!((h.matrix - eye(2)).norm() < 1e-9);
    }

    #[test]
    fn rotating_plane_gammas_are_frame_outer_products() {
        let fam = RotatingPlane { omega: 1.3, beta: 0.8 };
        let gammas = gamma_operators(&fam, 1.0, 256).unwrap();
        let plain = RotatingPlane { omega: 1.3, beta: 0.0 };
        for (k, g) in gammas.iter().enumerate() {
            let expected = plain.frame_at(k, 1.0).unwrap() * plain.frame_at(k, 0.0).unwrap().adjoint();
            assert!((g - expected).norm() < 1e-9);
        }
    }

    #[test]
    fn projector_products_approach_gammas() {
        let fam = UnitaryFrames::random(alloc::vec![2, 1], 1.0, &mut seeded(2));
        let gammas = gamma_operators(&fam, 1.0, 512).unwrap();
        let errs: Vec<f64> = [1024, 4096]
            .iter()
            .map(|&n| {
                (0..2)
                    .map(|k| (projector_product(&fam, k, 1.0, n).unwrap() - &gammas[k]).norm())
                    .fold(0.0, f64::max)
            })
            .collect();
        assert!(errs[1] < 2e-3, "{errs:?}");
        assert!(errs[1] < errs[0] / 2.0, "{errs:?}");
    }

    #[test]
    fn gammas_are_trace_preserving_and_parallel() {
        let fam = UnitaryFrames::random(alloc::vec![1, 2, 1], 1.5, &mut seeded(3));
        for s in [0.2, 0.6, 1.0] {
            let rep = holonomic_channel(&fam, s, 256).unwrap();
            assert!(rep.completeness_defect() < 1e-8);
            assert!(parallel_transport_residual(&fam, s, 256).unwrap() < 1e-6);
        }
    }

    #[test]
    fn bloch_circle_phases() {
        for theta in [0.3, 1.0, 2.0] {
            let fam = BlochCircle { theta };
            let h = holonomic_channel_holonomy(&fam, 2048).unwrap();
            let omega = fam.solid_angle();
            assert!(wrap(h.traces[0].arg() + omega / 2.0).abs() < 1e-6);
            assert!(wrap(h.traces[1].arg() - omega / 2.0).abs() < 1e-6);
            assert!((h.traces[0].norm() - 1.0).abs() < 1e-9);
            assert!(h.matrix[(0, 1)].norm() < 1e-9 && h.matrix[(1, 0)].norm() < 1e-9);
        }
    }

    #[test]
    fn geodesic_triangle_phases() {
        let (a, b, c) = ([1.0, 0.0, 0.3], [0.0, 1.0, 0.2], [0.1, 0.2, 1.0]);
        let fam = GeodesicTriangle::new(a, b, c).unwrap();
        let omega = solid_angle(fam.vertices[0], fam.vertices[1], fam.vertices[2]);
        let h = holonomic_channel_holonomy(&fam, 2048).unwrap();
        assert!(wrap(h.traces[0].arg() + omega / 2.0).abs() < 1e-6);
        assert!(wrap(h.traces[1].arg() - omega / 2.0).abs() < 1e-6);
    }

    #[test]
    fn vanishing_wilson_trace() {
        // A half turn of a real plane maps each line onto the other.
        let fam = RotatingPlane { omega: PI / 2.0, beta: 0.0 };
        assert_eq!(holonomic_channel_holonomy(&fam, 64), Err(Error::VanishingTrace { block: 0 }));
    }

    #[test]
    fn discontinuous_frame_is_reported() {
        struct Jump;
        impl FrameFamily for Jump {
            fn dim(&self) -> usize {
                2
            }
            fn block_dims(&self) -> Vec<usize> {
                alloc::vec![1, 1]
            }
            fn frame_at(&self, k: usize, s: f64) -> Result<CMat> {
                let flip = (s > 0.5) as usize;
                let mut v = CMat::zeros(2, 1);
                v[((k + flip) % 2, 0)] = ONE;
                Ok(v)
            }
        }
        assert!(matches!(gamma_operators(&Jump, 1.0, 8), Err(Error::FrameDiscontinuity { .. })));
    }

    #[test]
    fn measurement_with_constant_frames_is_pinching() {
        let fam = Constant(UnitaryFrames::random(alloc::vec![1, 1, 1], 1.0, &mut seeded(4)));
        let rho = random_density(3, &mut seeded(5));
        let pinched = (0..3).fold(CMat::zeros(3, 3), |acc, k| {
            let p = fam.projector_at(k, 0.0).unwrap();
            acc + &p * &rho * &p
        });
        for n in [1, 7, 64] {
            let m = measurement_approximation(&fam, 1.0, n, &rho).unwrap();
            assert!((m.output - &pinched).norm() < 1e-12);
            assert!(m.remainder_mass.abs() < 1e-12);
        }
    }

    #[test]
    fn measurement_sequence_converges() {
        let fam = RotatingPlane { omega: 1.0, beta: 0.0 };
        let rho = random_density(2, &mut seeded(6));
        let target = holonomic_channel_output(&fam, 1.0, 512, &rho).unwrap();
        let runs: Vec<MeasurementApproximation> =
            [64, 512].iter().map(|&n| measurement_approximation(&fam, 1.0, n, &rho).unwrap()).collect();
        let d64 = trace_distance(&hermitian_part(&runs[0].output), &target);
        let d512 = trace_distance(&hermitian_part(&runs[1].output), &target);
        assert!(d512 < d64);
        assert!(runs[1].remainder_mass < runs[0].remainder_mass);
        assert!(runs[1].remainder_mass > 0.0);
        assert!((runs[1].output.trace() - rho.trace()).norm() < 1e-12);
    }

    #[test]
    fn projector_input_reproduces_frame_input() {
        let fam = BlochCircle { theta: 1.0 };
        let from_projectors = ProjectorFrames::new(
            |s| Ok(alloc::vec![fam.projector_at(0, s)?, fam.projector_at(1, s)?]),
            16,
        )
        .unwrap();
        assert_eq!(from_projectors.block_dims(), alloc::vec![1, 1]);
        let a = holonomic_channel_holonomy(&fam, 1024).unwrap();
        let b = holonomic_channel_holonomy(&from_projectors, 1024).unwrap();
        assert!((&a.matrix - &b.matrix).norm() < 1e-5);
        let ga = gamma_operators(&fam, 0.6, 512).unwrap();
        let gb = gamma_operators(&from_projectors, 0.6, 512).unwrap();
        for (x, y) in ga.iter().zip(&gb) {
            assert!((x - y).norm() < 1e-5);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn random_frames_give_unitary_wilson_lines(seed in any::<u64>()) {
            let fam = UnitaryFrames::random(alloc::vec![2, 1], 1.0, &mut seeded(seed));
            for k in 0..2 {
                let w = wilson_line(&fam, k, 1.0, 64).unwrap();
                prop_assert!(unitarity_defect(&w.matrix) < 1e-9);
            }
            prop_assert!(frame_defect(&fam, 0.4).unwrap() < 1e-10);
            let rep = holonomic_channel(&fam, 1.0, 64).unwrap();
            prop_assert!(rep.completeness_defect() < 1e-8);
        }
    }
}
