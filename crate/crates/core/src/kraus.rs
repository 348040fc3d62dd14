//! Kraus representations of quantum channels and their gauge freedom.
//!
//! A channel is the equivalence class of Kraus lists `{F_k}` under
//! `F_k ↦ Σ_l F_l U_{lk}` with `U` unitary. The Choi matrix is the invariant
//! used to compare representations.

use alloc::string::ToString;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::matcore::{
    c64, eye, hermitian_eigen, is_finite, rank_estimate, real, unitarity_defect, CMat, CVec, ZERO,
};
use crate::ops::{hs_inner, kron, pauli_dot, pauli_x, pauli_y, pauli_z, unvec_row_major, vec_row_major};
use crate::random::{haar_unitary, seeded};
use crate::tol;

/// Ordered list of `K` operators on a `D`-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausRep {
    dim: usize,
    ops: Vec<CMat>,
}

impl KrausRep {
    /// Checks shapes only; trace preservation and independence are reported
    /// by [`validate`].
    pub fn new(ops: Vec<CMat>) -> Result<Self> {
        let first = ops.first().ok_or(Error::EmptyRep)?;
        let dim = first.nrows();
        for op in &ops {
            if op.nrows() != op.ncols() {
                return Err(Error::NotSquare { rows: op.nrows(), cols: op.ncols() });
            }
            if op.nrows() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: op.nrows() });
            }
            if !is_finite(op) {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self { dim, ops })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of operators in the list.
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[CMat] {
        &self.ops
    }

    pub fn into_ops(self) -> Vec<CMat> {
        self.ops
    }

    /// `Q_{kl} = Tr(F_k† F_l)`.
    pub fn gram(&self) -> CMat {
        let k = self.ops.len();
        CMat::from_fn(k, k, |a, b| hs_inner(&self.ops[a], &self.ops[b]))
    }

    /// Rank of the Gram matrix.
    pub fn kraus_number(&self) -> usize {
        rank_estimate(&self.gram(), tol::RANK_TOL)
    }

    /// `‖Σ F_k†F_k − I‖`.
    pub fn completeness_defect(&self) -> f64 {
        let sum = self.ops.iter().fold(CMat::zeros(self.dim, self.dim), |acc, f| acc + f.adjoint() * f);
        (sum - eye(self.dim)).norm()
    }

    /// `ρ ↦ Σ F_k ρ F_k†`.
    pub fn apply(&self, rho: &CMat) -> CMat {
        self.ops.iter().fold(CMat::zeros(self.dim, self.dim), |acc, f| acc + f * rho * f.adjoint())
    }
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub trace_preserving: bool,
    pub kraus_number_ok: bool,
    pub completeness_defect: f64,
    pub rank: usize,
    pub gram: CMat,
}

pub fn validate(rep: &KrausRep) -> ValidationReport {
    let gram = rep.gram();
    let rank = rank_estimate(&gram, tol::RANK_TOL);
    let completeness_defect = rep.completeness_defect();
    ValidationReport {
        trace_preserving: completeness_defect <= tol::UNITARY_TOL,
        kraus_number_ok: rank == rep.len(),
        completeness_defect,
        rank,
        gram,
    }
}

/// A `K×K` unitary acting on the Kraus index.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeUnitary(CMat);

impl GaugeUnitary {
    pub fn new(matrix: CMat) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare { rows: matrix.nrows(), cols: matrix.ncols() });
        }
        let residual = unitarity_defect(&matrix);
        if residual > tol::UNITARY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self(matrix))
    }

    pub fn identity(k: usize) -> Self {
        Self(eye(k))
    }

    /// `e^{iα}` for single-operator representations.
    pub fn phase(alpha: f64) -> Self {
        Self(CMat::from_element(1, 1, c64(libm::cos(alpha), libm::sin(alpha))))
    }

    pub fn random<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Self {
        Self(haar_unitary(k, rng))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }
}

/// `F̃_k = Σ_l F_l U_{lk}`.
pub fn gauge_transform(rep: &KrausRep, u: &GaugeUnitary) -> Result<KrausRep> {
    if u.dim() != rep.len() {
        return Err(Error::DimensionMismatch { expected: rep.len(), found: u.dim() });
    }
    let m = u.matrix();
    let ops = (0..rep.len())
        .map(|k| {
            rep.ops
                .iter()
                .enumerate()
                .fold(CMat::zeros(rep.dim, rep.dim), |acc, (l, f)| acc + f * m[(l, k)])
        })
        .collect();
    KrausRep::new(ops)
}

/// Jamiołkowski state `ρ = (𝓔⊗𝓘)(|ψ⟩⟨ψ|)` with `|ψ⟩ = D^{-1/2} Σ|k⟩|k⟩`,
/// trace one.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    pub dim: usize,
    pub matrix: CMat,
}

impl ChoiMatrix {
    pub fn distance(&self, other: &ChoiMatrix) -> f64 {
        (&self.matrix - &other.matrix).norm()
    }

    pub fn rank(&self, tol: f64) -> usize {
        hermitian_eigen(&self.matrix).0.iter().filter(|&&l| l > tol).count()
    }
}

/// `D^{-1/2} Σ_k |k⟩⊗|k⟩`.
pub fn maximally_entangled(d: usize) -> CVec {
    let amp = real(1.0 / libm::sqrt(d as f64));
    CVec::from_fn(d * d, |idx, _| if idx / d == idx % d { amp } else { ZERO })
}

pub fn choi(rep: &KrausRep) -> ChoiMatrix {
    let d = rep.dim;
    let n = d * d;
    let scale = real(1.0 / d as f64);
    let matrix = rep.ops.iter().fold(CMat::zeros(n, n), |acc, f| {
        let v = vec_row_major(f);
        acc + &v * v.adjoint() * scale
    });
    ChoiMatrix { dim: d, matrix }
}

/// `Σ_k (F_k⊗1)|ψ⟩⟨ψ|(F_k⊗1)†` for an arbitrary vector `|ψ⟩` on `H⊗H`.
pub fn choi_with_state(rep: &KrausRep, psi: &CVec) -> Result<CMat> {
    let d = rep.dim;
    if psi.len() != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, found: psi.len() });
    }
    let id = eye(d);
    Ok(rep.ops.iter().fold(CMat::zeros(d * d, d * d), |acc, f| {
        let v = kron(f, &id) * psi;
        acc + &v * v.adjoint()
    }))
}

/// Linearly independent representation from the eigenvectors of a Choi matrix.
///
/// Operators come in order of decreasing eigenvalue; each is scaled so that
/// its largest-magnitude entry is real and positive.
pub fn canonical_rep(choi: &ChoiMatrix, tol: f64) -> Result<KrausRep> {
    let d = choi.dim;
    let (vals, vecs) = hermitian_eigen(&choi.matrix);
    let ops: Vec<CMat> = vals
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &l)| l > tol)
        .map(|(i, &l)| {
            let v = vecs.column(i).into_owned();
            let op = unvec_row_major(&v, d, d) * real(libm::sqrt(d as f64 * l));
            fix_phase(op)
        })
        .collect();
    KrausRep::new(ops)
}

fn fix_phase(op: CMat) -> CMat {
    let max = op.iter().map(|z| z.norm()).fold(0.0, f64::max);
    match op.iter().find(|z| z.norm() >= max * (1.0 - 1e-9)) {
        Some(&z) if max > 0.0 => {
            let phase = (z / z.norm()).conj();
            op * phase
        }
        _ => op,
    }
}

/// Channel with `K` Kraus operators cut from a Haar-random isometry `C^D → C^{DK}`.
pub fn random_channel(d: usize, k: usize, seed: u64) -> Result<KrausRep> {
    random_channel_with(d, k, &mut seeded(seed))
}

pub fn random_channel_with<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Result<KrausRep> {
    if d == 0 || k == 0 || k > d * d {
        return Err(Error::BadArity { dim: d, k });
    }
    loop {
        let u = haar_unitary(d * k, rng);
        let ops: Vec<CMat> = (0..k).map(|j| u.view((j * d, 0), (d, d)).into_owned()).collect();
        let rep = KrausRep::new(ops)?;
        if rep.kraus_number() == k {
            return Ok(rep);
        }
    }
}

/// Named channels.
#[derive(Debug, Clone, PartialEq)]
pub enum Zoo {
    Identity { dim: usize },
    Unitary(CMat),
    PhaseFlip(f64),
    BitFlip(f64),
    /// `G_0 = ½(1+√(1−p))I + ½(1−√(1−p))σ_z`, `G_1 = ½√p σ_+`, `σ_+ = σ_x + iσ_y`.
    AmplitudeDamping(f64),
    /// `ρ ↦ (1−p)ρ + p I/2` on a qubit.
    Depolarizing(f64),
}

impl Zoo {
    /// Kraus list with operators of norm below `1e-12` dropped.
    pub fn build(&self) -> Result<KrausRep> {
        let ops = match self {
            Zoo::Identity { dim } => {
                if *dim == 0 {
                    return Err(Error::BadArity { dim: 0, k: 1 });
                }
                alloc::vec![eye(*dim)]
            }
            Zoo::Unitary(u) => {
                let residual = unitarity_defect(u);
                if u.nrows() != u.ncols() || residual > tol::UNITARY_TOL {
                    return Err(Error::NotUnitary { residual });
                }
                alloc::vec![u.clone()]
            }
            Zoo::PhaseFlip(p) => {
                let p = probability("p_e", *p)?;
                pair(libm::sqrt(1.0 - p), eye(2), libm::sqrt(p), pauli_z())
            }
            Zoo::BitFlip(p) => {
                let p = probability("p_f", *p)?;
                pair(libm::sqrt(1.0 - p), eye(2), libm::sqrt(p), pauli_x())
            }
            Zoo::AmplitudeDamping(p) => {
                let p = probability("p_g", *p)?;
                let [g0, g1] = amplitude_damping_ops(p);
                alloc::vec![g0, g1]
            }
            Zoo::Depolarizing(p) => {
                let p = probability("p", *p)?;
                let w = real(libm::sqrt(p / 4.0));
                alloc::vec![
                    eye(2) * real(libm::sqrt(1.0 - 3.0 * p / 4.0)),
                    pauli_x() * w,
                    pauli_y() * w,
                    pauli_z() * w,
                ]
            }
        };
        let kept: Vec<CMat> = ops.into_iter().filter(|f| f.norm() >= tol::ZERO_OP_TOL).collect();
        KrausRep::new(kept)
    }
}

fn probability(name: &'static str, p: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::ParamOutOfRange { name, value: p })
    }
}

fn pair(a: f64, x: CMat, b: f64, y: CMat) -> Vec<CMat> {
    alloc::vec![x * real(a), y * real(b)]
}

fn amplitude_damping_ops(p: f64) -> [CMat; 2] {
    let r = libm::sqrt(1.0 - p);
    let sigma_plus = pauli_x() + pauli_y() * c64(0.0, 1.0);
    [
        eye(2) * real(0.5 * (1.0 + r)) + pauli_z() * real(0.5 * (1.0 - r)),
        sigma_plus * real(0.5 * libm::sqrt(p)),
    ]
}

/// Builds a zoo channel from a name and a parameter list.
///
/// `identity` takes `[]` (qubit) or `[D]`; `unitary` takes `[θ, n_x, n_y, n_z]`
/// for the qubit rotation `exp(−iθ n̂·σ/2)`; the noise channels take `[p]`.
pub fn zoo(name: &str, params: &[f64]) -> Result<KrausRep> {
    let want = |n: &'static str, expected: usize| -> Result<()> {
        if params.len() == expected {
            Ok(())
        } else {
            Err(Error::ParamCount { name: n, expected, found: params.len() })
        }
    };
    let channel = match name {
        "identity" => match params {
            [] => Zoo::Identity { dim: 2 },
            [d] if *d >= 1.0 && d.fract() == 0.0 => Zoo::Identity { dim: *d as usize },
            [d] => return Err(Error::ParamOutOfRange { name: "dim", value: *d }),
            _ => return Err(Error::ParamCount { name: "identity", expected: 1, found: params.len() }),
        },
        "unitary" => {
            want("unitary", 4)?;
            Zoo::Unitary(qubit_rotation(params[0], [params[1], params[2], params[3]])?)
        }
        "phase_flip" | "phase-flip" => {
            want("phase_flip", 1)?;
            Zoo::PhaseFlip(params[0])
        }
        "bit_flip" | "bit-flip" => {
            want("bit_flip", 1)?;
            Zoo::BitFlip(params[0])
        }
        "amplitude_damping" | "amplitude-damping" => {
            want("amplitude_damping", 1)?;
            Zoo::AmplitudeDamping(params[0])
        }
        "depolarizing" => {
            want("depolarizing", 1)?;
            Zoo::Depolarizing(params[0])
        }
        other => return Err(Error::UnknownName(other.to_string())),
    };
    channel.build()
}

/// `exp(−iθ n̂·σ/2)`.
pub fn qubit_rotation(theta: f64, axis: [f64; 3]) -> Result<CMat> {
    let len = libm::sqrt(axis.iter().map(|a| a * a).sum());
    if !(len > 0.0) {
        return Err(Error::ParamOutOfRange { name: "axis", value: len });
    }
    let n = [axis[0] / len, axis[1] / len, axis[2] / len];
    let (s, c) = (libm::sin(theta / 2.0), libm::cos(theta / 2.0));
    Ok(eye(2) * real(c) - pauli_dot(n) * c64(0.0, s))
}

/// Phase flip, bit flip and amplitude damping exactly as listed, with zero
/// operators kept so each list has two entries for every `p ∈ [0, 1]`.
pub fn fixture_reps(p_e: f64, p_f: f64, p_g: f64) -> Result<[KrausRep; 3]> {
    let p_e = probability("p_e", p_e)?;
    let p_f = probability("p_f", p_f)?;
    let p_g = probability("p_g", p_g)?;
    let e = KrausRep::new(pair(libm::sqrt(1.0 - p_e), eye(2), libm::sqrt(p_e), pauli_z()))?;
    let f = KrausRep::new(pair(libm::sqrt(1.0 - p_f), eye(2), libm::sqrt(p_f), pauli_x()))?;
    let g = KrausRep::new(amplitude_damping_ops(p_g).into())?;
    Ok([e, f, g])
}

/// Global phase of a one-operator representation: `F ↦ e^{iα}F`.
pub fn with_phase(rep: &KrausRep, alpha: f64) -> Result<KrausRep> {
    gauge_transform(rep, &GaugeUnitary::phase(alpha))
}
