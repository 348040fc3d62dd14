//! Channel holonomy of finite sequences.
//!
//! For reps `{E^1_k}, …, {E^N_k}` the overlap of link `n` is
//! `[T_{n+1,n}]_{kl} = Tr(E^{n+1}_k† E^n_l)`, and the holonomy is
//! `U_ch = Φ(T_{1,N}) Φ(T_{N,N−1}) ⋯ Φ(T_{2,1})`.
//!
//! Links are numbered from zero: link `i` joins channel `i` to channel
//! `i + 1`, and link `N − 1` is the closing overlap back to the first channel.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kraus::{gauge_transform, GaugeUnitary, KrausRep};
use crate::matcore::{eye, hermitian_eigen, polar_phase, polar_unitary, rank_estimate, singular_values, CMat, C64};
use crate::ops::hs_inner;
use crate::tol;

/// `K×K` matrix of Hilbert–Schmidt overlaps between two representations.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix(CMat);

impl OverlapMatrix {
    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }

    pub fn k(&self) -> usize {
        self.0.nrows()
    }

    pub fn rank(&self, tol: f64) -> usize {
        rank_estimate(&self.0, tol)
    }

    /// Hermitian within `tol·‖T‖` with smallest eigenvalue above `tol·‖T‖`.
    pub fn is_positive_definite(&self, tol: f64) -> bool {
        let t = &self.0;
        let scale = t.norm();
        if scale == 0.0 || (t - t.adjoint()).norm() > tol * scale {
            return false;
        }
        hermitian_eigen(t).0.first().is_some_and(|&lo| lo > tol * scale)
    }
}

/// Entry `(k, l)` is `Tr(later_k† earlier_l)`.
pub fn overlap(later: &KrausRep, earlier: &KrausRep) -> Result<OverlapMatrix> {
    if later.dim() != earlier.dim() {
        return Err(Error::DimensionMismatch { expected: earlier.dim(), found: later.dim() });
    }
    if later.len() != earlier.len() {
        return Err(Error::DimensionMismatch { expected: earlier.len(), found: later.len() });
    }
    let k = later.len();
    let (a, b) = (later.ops(), earlier.ops());
    Ok(OverlapMatrix(CMat::from_fn(k, k, |i, j| hs_inner(&a[i], &b[j]))))
}

/// `b` is parallel to `a` when `T = overlap(b, a)` is positive definite.
pub fn are_parallel(a: &KrausRep, b: &KrausRep, tol: f64) -> bool {
    overlap(b, a).is_ok_and(|t| t.is_positive_definite(tol))
}

/// Representations of channels sharing dimension and Kraus number.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSequence {
    reps: Vec<KrausRep>,
}

impl ChannelSequence {
    pub fn new(reps: Vec<KrausRep>) -> Result<Self> {
        let first = reps.first().ok_or(Error::EmptySequence)?;
        let (d, k) = (first.dim(), first.len());
        for rep in &reps {
            if rep.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: rep.dim() });
            }
            if rep.len() != k {
                return Err(Error::DimensionMismatch { expected: k, found: rep.len() });
            }
        }
        Ok(Self { reps })
    }

    pub fn reps(&self) -> &[KrausRep] {
        &self.reps
    }

    pub fn into_reps(self) -> Vec<KrausRep> {
        self.reps
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.reps[0].dim()
    }

    pub fn kraus_number(&self) -> usize {
        self.reps[0].len()
    }

    /// Overlap of link `i` (channel `i` to `i + 1`, cyclically).
    pub fn link_overlap(&self, link: usize) -> Result<OverlapMatrix> {
        let n = self.reps.len();
        overlap(&self.reps[(link + 1) % n], &self.reps[link % n])
    }

    /// `Φ` of every link overlap, closing link last.
    pub fn link_polars(&self) -> Result<Vec<CMat>> {
        (0..self.reps.len()).map(|link| self.link_polar(link)).collect()
    }

    fn link_polar(&self, link: usize) -> Result<CMat> {
        let n = self.reps.len();
        overlap_polar(&self.reps[(link + 1) % n], &self.reps[link % n]).map_err(|e| match e {
            Error::RankDeficient { .. } => Error::LinkRankDeficient {
                link,
                singular_values: self.link_overlap(link).map(|t| singular_values(t.matrix())).unwrap_or_default(),
            },
            other => other,
        })
    }
}

fn rep_norm(rep: &KrausRep) -> f64 {
    libm::sqrt(rep.ops().iter().map(|f| f.norm_squared()).sum())
}

/// `Φ(overlap(later, earlier))`.
///
/// Rank deficient when `σ_min ≤ rankTol·σ_max`, and also when `σ_min` is
/// below `rankTol` times the size of the operators themselves, so that a 1×1
/// overlap vanishing up to rounding is not taken for full rank.
pub fn overlap_polar(later: &KrausRep, earlier: &KrausRep) -> Result<CMat> {
    let t = overlap(later, earlier)?;
    let sv = singular_values(t.matrix());
    let (sigma_max, sigma_min) = (sv.first().copied().unwrap_or(0.0), sv.last().copied().unwrap_or(0.0));
    if sigma_min <= tol::RANK_TOL * rep_norm(later) * rep_norm(earlier) {
        return Err(Error::RankDeficient { sigma_min, sigma_max });
    }
    Ok(polar_unitary(t.matrix(), tol::RANK_TOL)?.unitary)
}

/// `U_ch = Φ(T_{1,N}) Φ(T_{N,N−1}) ⋯ Φ(T_{2,1})`.
pub fn holonomy(seq: &ChannelSequence) -> Result<CMat> {
    let polars = seq.link_polars()?;
    Ok(polars.iter().fold(eye(seq.kraus_number()), |acc, p| p * acc))
}

/// Gauges `U_1 = I`, `U_{n+1} = Φ(T_{n+1,n}) U_n` and the transformed
/// sequence, in which every consecutive overlap is positive definite.
pub fn parallel_gauge(seq: &ChannelSequence) -> Result<(ChannelSequence, Vec<GaugeUnitary>)> {
    let n = seq.len();
    let mut gauges = Vec::with_capacity(n);
    let mut current = eye(seq.kraus_number());
    gauges.push(GaugeUnitary::identity(seq.kraus_number()));
    for link in 0..n.saturating_sub(1) {
        current = seq.link_polar(link)? * current;
        gauges.push(GaugeUnitary::new(current.clone())?);
    }
    let reps = seq
        .reps
        .iter()
        .zip(&gauges)
        .map(|(rep, g)| gauge_transform(rep, g))
        .collect::<Result<Vec<_>>>()?;
    Ok((ChannelSequence::new(reps)?, gauges))
}

/// Holonomy through the parallel-transport gauge: `Φ(T̃_{1,N})`.
pub fn holonomy_parallel_gauge(seq: &ChannelSequence) -> Result<CMat> {
    let (parallel, _) = parallel_gauge(seq)?;
    parallel.link_polar(seq.len() - 1)
}

/// `‖U_ch(gauged) − V_1† U_ch V_1‖`.
pub fn gauge_covariance_check(seq: &ChannelSequence, gauges: &[GaugeUnitary]) -> Result<f64> {
    if gauges.len() != seq.len() {
        return Err(Error::DimensionMismatch { expected: seq.len(), found: gauges.len() });
    }
    let moved = seq
        .reps
        .iter()
        .zip(gauges)
        .map(|(rep, g)| gauge_transform(rep, g))
        .collect::<Result<Vec<_>>>()?;
    let lhs = holonomy(&ChannelSequence::new(moved)?)?;
    let v1 = gauges[0].matrix();
    let rhs = v1.adjoint() * holonomy(seq)? * v1;
    Ok((lhs - rhs).norm())
}

/// `γ_ch = Φ(Tr U_1†U_N) Φ(Tr U_N†U_{N−1}) ⋯ Φ(Tr U_2†U_1)` for unitary channels.
pub fn unitary_sequence_phase(unitaries: &[CMat]) -> Result<C64> {
    let n = unitaries.len();
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    (0..n).try_fold(C64::new(1.0, 0.0), |acc, i| {
        let (later, earlier) = (&unitaries[(i + 1) % n], &unitaries[i]);
        let z = (later.adjoint() * earlier).trace();
        let deficient = Error::LinkRankDeficient { link: i, singular_values: alloc::vec![z.norm()] };
        if z.norm() <= tol::RANK_TOL * later.norm() * earlier.norm() {
            return Err(deficient);
        }
        polar_phase(z).map(|p| p * acc).map_err(|_| deficient)
    })
}
