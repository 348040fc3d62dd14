//! Two-path interferometer with a shared ancilla.
//!
//! Joint index on `H_q ⊗ H_a` is `q·K + a`; on `H_p ⊗ H_q ⊗ H_a` it is
//! `p·DK + q·K + a`. The ancilla starts in `|a_0⟩`, and beam splitters are
//! Hadamard gates on the path qubit.

use alloc::vec::Vec;

use rand::Rng;

use crate::discrete::{holonomy, overlap, ChannelSequence};
use crate::error::{Error, Result};
use crate::kraus::{gauge_transform, GaugeUnitary, KrausRep};
use crate::matcore::{
    exp_anti_hermitian, eye, hermitian_eigen, polar, polar_unitary, real, singular_values, solve_gauge_equation,
    unitarity_defect, CMat, CVec, ONE, ZERO,
};
use crate::ops::{kron, partial_trace_first, vec_row_major};
use crate::random::{random_anti_hermitian, seeded};
use crate::tol;

/// Unitary `𝓤` on `H_q ⊗ H_a` with `⟨a_k|𝓤|a_0⟩ = E_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dilation {
    dim_q: usize,
    dim_a: usize,
    unitary: CMat,
}

impl Dilation {
    pub fn new(dim_q: usize, dim_a: usize, unitary: CMat) -> Result<Self> {
        let n = dim_q * dim_a;
        if unitary.shape() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n, found: unitary.nrows() });
        }
        let residual = unitarity_defect(&unitary);
        if residual > tol::UNITARY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self { dim_q, dim_a, unitary })
    }

    pub fn dim_q(&self) -> usize {
        self.dim_q
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn unitary(&self) -> &CMat {
        &self.unitary
    }

    /// `E_k = ⟨a_k|𝓤|a_0⟩`.
    pub fn kraus(&self) -> KrausRep {
        let (d, k) = (self.dim_q, self.dim_a);
        let ops = (0..k)
            .map(|a| CMat::from_fn(d, d, |i, j| self.unitary[(i * k + a, j * k)]))
            .collect();
        KrausRep::new(ops).expect("blocks of a unitary are finite and square")
    }

    /// `(1 ⊗ U)𝓤`, the same channel.
    pub fn with_ancilla_unitary(&self, u: &CMat) -> Result<Self> {
        if u.shape() != (self.dim_a, self.dim_a) {
            return Err(Error::DimensionMismatch { expected: self.dim_a, found: u.nrows() });
        }
        Ok(Self { unitary: kron(&eye(self.dim_q), u) * &self.unitary, ..self.clone() })
    }

    /// `Tr_a[𝓤(ρ ⊗ |a_0⟩⟨a_0|)𝓤†]`.
    pub fn apply(&self, rho: &CMat) -> CMat {
        let joint = &self.unitary * kron(rho, &ancilla_projector(self.dim_a)) * self.unitary.adjoint();
        crate::ops::partial_trace_second(&joint, self.dim_q, self.dim_a)
    }
}

fn ancilla_projector(k: usize) -> CMat {
    let mut p = CMat::zeros(k, k);
    p[(0, 0)] = ONE;
    p
}

/// Stinespring dilation completed by Gram–Schmidt over standard basis vectors.
pub fn dilate(rep: &KrausRep) -> Result<Dilation> {
    let (d, k) = (rep.dim(), rep.len());
    let n = d * k;
    let mut u = CMat::zeros(n, n);
    for j in 0..d {
        for (a, e) in rep.ops().iter().enumerate() {
            for i in 0..d {
                u[(i * k + a, j * k)] = e[(i, j)];
            }
        }
    }
    let iso: Vec<usize> = (0..d).map(|j| j * k).collect();
    let block = CMat::from_fn(n, d, |r, c| u[(r, iso[c])]);
    if unitarity_defect(&block) > tol::UNITARY_TOL * (1.0 + d as f64) {
        return Err(Error::CompletionFailure);
    }
    let mut filled: Vec<CVec> = iso.iter().map(|&c| u.column(c).into_owned()).collect();
    let free: Vec<usize> = (0..n).filter(|c| c % k != 0).collect();
    let mut candidates = 0..n;
    for &col in &free {
        let v = loop {
            let e = candidates.next().ok_or(Error::CompletionFailure)?;
            let mut v = CVec::zeros(n);
            v[e] = ONE;
            // Twice for numerical orthogonality.
            for _ in 0..2 {
                for f in &filled {
                    let c = f.dotc(&v);
                    v -= f * c;
                }
            }
            let norm = v.norm();
            if norm > 1e-6 {
                break v / real(norm);
            }
        };
        u.set_column(col, &v);
        filled.push(v);
    }
    Dilation::new(d, k, u)
}

/// `M = Tr_q[𝒱⁰(ρ ⊗ |a⟩⟨a|)𝒱¹†]`.
pub fn cross_operator(dil0: &Dilation, dil1: &Dilation, rho: &CMat) -> Result<CMat> {
    check_pair(dil0, dil1)?;
    let (d, k) = (dil0.dim_q, dil0.dim_a);
    if rho.shape() != (d, d) {
        return Err(Error::DimensionMismatch { expected: d, found: rho.nrows() });
    }
    let joint = dil0.unitary() * kron(rho, &ancilla_projector(k)) * dil1.unitary().adjoint();
    Ok(partial_trace_first(&joint, d, k))
}

fn check_pair(dil0: &Dilation, dil1: &Dilation) -> Result<()> {
    if dil0.dim_q != dil1.dim_q {
        return Err(Error::DimensionMismatch { expected: dil0.dim_q, found: dil1.dim_q });
    }
    if dil0.dim_a != dil1.dim_a {
        return Err(Error::DimensionMismatch { expected: dil0.dim_a, found: dil1.dim_a });
    }
    Ok(())
}

/// `½ + ½ Re Tr(V0 M V1†)`.
pub fn detection_probability_closed_form(
    dil0: &Dilation,
    dil1: &Dilation,
    v0: &CMat,
    v1: &CMat,
    rho: &CMat,
) -> Result<f64> {
    let m = cross_operator(dil0, dil1, rho)?;
    let k = dil0.dim_a;
    for v in [v0, v1] {
        if v.shape() != (k, k) {
            return Err(Error::DimensionMismatch { expected: k, found: v.nrows() });
        }
    }
    Ok(0.5 + 0.5 * (v0 * m * v1.adjoint()).trace().re)
}

/// Probability of path 0 after beam splitter, `U_tot`, the ancilla
/// unitaries `F` and a second beam splitter, simulated on the full space.
pub fn detection_probability_circuit(
    dil0: &Dilation,
    dil1: &Dilation,
    v0: &CMat,
    v1: &CMat,
    rho: &CMat,
) -> Result<f64> {
    check_pair(dil0, dil1)?;
    let (d, k) = (dil0.dim_q, dil0.dim_a);
    let n = d * k;
    let p0 = CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
    let p1 = CMat::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, ONE]);
    let r = real(core::f64::consts::FRAC_1_SQRT_2);
    let hadamard = kron(&CMat::from_row_slice(2, 2, &[r, r, r, -r]), &eye(n));
    let u_tot = kron(&p0, dil0.unitary()) + kron(&p1, dil1.unitary());
    let f = kron(&p0, &kron(&eye(d), v0)) + kron(&p1, &kron(&eye(d), v1));
    let input = kron(&p0, &kron(rho, &ancilla_projector(k)));
    let circuit = &hadamard * f * u_tot * &hadamard;
    let out = &circuit * input * circuit.adjoint();
    Ok((0..n).map(|i| out[(i, i)].re).sum())
}

/// Closed form, after checking it against the circuit to 1e−10.
pub fn detection_probability(dil0: &Dilation, dil1: &Dilation, v0: &CMat, v1: &CMat, rho: &CMat) -> Result<f64> {
    let closed = detection_probability_closed_form(dil0, dil1, v0, v1, rho)?;
    let circuit = detection_probability_circuit(dil0, dil1, v0, v1, rho)?;
    let difference = (closed - circuit).abs();
    if difference > 1e-10 {
        return Err(Error::CircuitMismatch { difference });
    }
    Ok(closed)
}

fn maximally_mixed(d: usize) -> CMat {
    eye(d) * real(1.0 / d as f64)
}

/// `V1 = V0 Φ(M)` with `M` taken at the maximally mixed input.
pub fn optimal_ancilla_unitary(dil0: &Dilation, dil1: &Dilation, v0: &CMat) -> Result<CMat> {
    let m = cross_operator(dil0, dil1, &maximally_mixed(dil0.dim_q))?;
    Ok(v0 * polar_unitary(&m, tol::RANK_TOL)?.unitary)
}

/// How each ancilla unitary of the transport is found.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransportMode {
    /// `V1 = V0 Φ(M)`.
    ClosedForm,
    /// Derivative-free hill climbing on the detection probability.
    RandomSearch { samples: usize, seed: u64 },
}

/// One optimization of the transport procedure.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportStep {
    pub link: usize,
    pub singular_values: Vec<f64>,
    pub probability: f64,
    /// Largest probability the closed form allows.
    pub optimum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperationalTransport {
    pub dilations: Vec<Dilation>,
    /// `U_1 = I, …, U_N`.
    pub unitaries: Vec<CMat>,
    pub transcript: Vec<TransportStep>,
}

impl OperationalTransport {
    /// `(1 ⊗ U_n)𝓤_n`.
    pub fn transported(&self) -> Result<Vec<Dilation>> {
        self.dilations.iter().zip(&self.unitaries).map(|(d, u)| d.with_ancilla_unitary(u)).collect()
    }

    /// `Ẽ^n_k = ⟨a_k|(1 ⊗ U_n)𝓤_n|a_0⟩`.
    pub fn transported_reps(&self) -> Result<Vec<KrausRep>> {
        Ok(self.transported()?.iter().map(Dilation::kraus).collect())
    }

    /// `Tr_q[Ũ_n(1 ⊗ |a⟩⟨a|)Ũ_{n+1}†]` for consecutive pairs.
    pub fn link_operators(&self) -> Result<Vec<CMat>> {
        let t = self.transported()?;
        let one = eye(t[0].dim_q);
        t.windows(2).map(|w| cross_operator(&w[0], &w[1], &one)).collect()
    }
}

pub fn operational_parallel_transport(seq: &ChannelSequence, mode: TransportMode) -> Result<OperationalTransport> {
    let dilations = seq.reps().iter().map(dilate).collect::<Result<Vec<_>>>()?;
    let k = seq.kraus_number();
    let rho = maximally_mixed(seq.dim());
    let mut unitaries = alloc::vec![eye(k)];
    let mut transcript = Vec::new();
    for link in 0..dilations.len().saturating_sub(1) {
        let (d0, d1) = (&dilations[link], &dilations[link + 1]);
        let v0 = unitaries[link].clone();
        let m = cross_operator(d0, d1, &rho)?;
        let sv = singular_values(&m);
        let phi = polar_unitary(&m, tol::RANK_TOL).map_err(|e| match e {
            Error::RankDeficient { .. } => Error::LinkRankDeficient { link, singular_values: sv.clone() },
            other => other,
        })?;
        let best = &v0 * &phi.unitary;
        let optimum = detection_probability(d0, d1, &v0, &best, &rho)?;
        let v1 = match mode {
            TransportMode::ClosedForm => best,
            TransportMode::RandomSearch { samples, seed } => {
                random_search(d0, d1, &v0, &rho, samples, seed.wrapping_add(link as u64))?
            }
        };
        let probability = detection_probability(d0, d1, &v0, &v1, &rho)?;
        transcript.push(TransportStep { link, singular_values: sv, probability, optimum });
        unitaries.push(v1);
    }
    Ok(OperationalTransport { dilations, unitaries, transcript })
}

/// Maximizes the detection probability over `V1` by accepting random
/// unitary perturbations that increase it, shrinking the step on failure.
pub fn random_search(dil0: &Dilation, dil1: &Dilation, v0: &CMat, rho: &CMat, samples: usize, seed: u64) -> Result<CMat> {
    let mut rng = seeded(seed);
    let k = dil0.dim_a;
    let mut v1 = v0.clone();
    let mut best = detection_probability_closed_form(dil0, dil1, v0, &v1, rho)?;
    let mut step = 1.0;
    for _ in 0..samples {
        let kick = random_anti_hermitian(k, &mut rng) * real(step);
        let trial = &v1 * exp_anti_hermitian(&kick);
        let p = detection_probability_closed_form(dil0, dil1, v0, &trial, rho)?;
        if p > best {
            best = p;
            v1 = trial;
            step = (step * 1.2).min(1.0);
        } else if rng.random::<f64>() < 0.5 {
            step = (step * 0.9).max(1e-9);
        }
    }
    Ok(v1)
}

/// Gluing of `Λ0` (reps `V_n`) and `Λ1` (reps `W_m`) with cross term
/// `X ↦ Σ_{nm} C_{nm} V_n X W_m†`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gluing {
    rep0: KrausRep,
    rep1: KrausRep,
    c: CMat,
}

impl Gluing {
    /// Checks `CC† ≤ I` within 1e−9.
    pub fn new(rep0: KrausRep, rep1: KrausRep, c: CMat) -> Result<Self> {
        if rep0.dim() != rep1.dim() {
            return Err(Error::DimensionMismatch { expected: rep0.dim(), found: rep1.dim() });
        }
        if c.shape() != (rep0.len(), rep1.len()) {
            return Err(Error::DimensionMismatch { expected: rep0.len(), found: c.nrows() });
        }
        let max_eigenvalue = hermitian_eigen(&(&c * c.adjoint())).0.last().copied().unwrap_or(0.0);
        if max_eigenvalue > 1.0 + 1e-9 {
            return Err(Error::GluingBound { max_eigenvalue });
        }
        Ok(Self { rep0, rep1, c })
    }

    pub fn rep0(&self) -> &KrausRep {
        &self.rep0
    }

    pub fn rep1(&self) -> &KrausRep {
        &self.rep1
    }

    pub fn matrix(&self) -> &CMat {
        &self.c
    }

    /// The glued channel on `H_p ⊗ H_q`, path index major.
    pub fn apply(&self, sigma: &CMat) -> Result<CMat> {
        let d = self.rep0.dim();
        if sigma.shape() != (2 * d, 2 * d) {
            return Err(Error::DimensionMismatch { expected: 2 * d, found: sigma.nrows() });
        }
        let block = |p: usize, q: usize| sigma.view((p * d, q * d), (d, d)).into_owned();
        let (v, w) = (self.rep0.ops(), self.rep1.ops());
        let mut cross = CMat::zeros(d, d);
        let s01 = block(0, 1);
        for (n, vn) in v.iter().enumerate() {
            for (m, wm) in w.iter().enumerate() {
                cross += vn * &s01 * wm.adjoint() * self.c[(n, m)];
            }
        }
        let mut out = CMat::zeros(2 * d, 2 * d);
        out.view_mut((0, 0), (d, d)).copy_from(&self.rep0.apply(&block(0, 0)));
        out.view_mut((d, d), (d, d)).copy_from(&self.rep1.apply(&block(1, 1)));
        out.view_mut((d, 0), (d, d)).copy_from(&cross.adjoint());
        // Cross block for σ_10 uses C*, which is the adjoint map applied to σ_10.
        let s10 = block(1, 0);
        let mut lower = CMat::zeros(d, d);
        for (n, vn) in v.iter().enumerate() {
            for (m, wm) in w.iter().enumerate() {
                lower += wm * &s10 * vn.adjoint() * self.c[(n, m)].conj();
            }
        }
        out.view_mut((0, d), (d, d)).copy_from(&cross);
        out.view_mut((d, 0), (d, d)).copy_from(&lower);
        Ok(out)
    }
}

/// Reads the gluing matrix of a channel on `H_p ⊗ H_q` against the given
/// representations of its two diagonal blocks.
///
/// The cross-block map is probed on `|0⟩⟨1| ⊗ |i⟩⟨j|` and fitted by least
/// squares on the superoperators of `X ↦ V_n X W_m†`.
pub fn extract_gluing_matrix<F>(channel: F, rep0: &KrausRep, rep1: &KrausRep) -> Result<CMat>
where
    F: Fn(&CMat) -> CMat,
{
    let d = rep0.dim();
    let (kn, km) = (rep0.len(), rep1.len());
    let mut target = CMat::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let mut sigma = CMat::zeros(2 * d, 2 * d);
            sigma[(i, d + j)] = ONE;
            let out = channel(&sigma);
            let block = out.view((0, d), (d, d)).into_owned();
            target.set_column(i * d + j, &vec_row_major(&block));
        }
    }
    let mut design = CMat::zeros(d * d * d * d, kn * km);
    for (n, vn) in rep0.ops().iter().enumerate() {
        for (m, wm) in rep1.ops().iter().enumerate() {
            let sup = kron(vn, &wm.map(|z| z.conj()));
            design.set_column(n * km + m, &vec_row_major(&sup));
        }
    }
    let rhs = vec_row_major(&target);
    let svd = design.svd(true, true);
    let coef = svd.solve(&rhs, 1e-12).map_err(|_| Error::CompletionFailure)?;
    Ok(CMat::from_fn(kn, km, |n, m| coef[(n * km + m, 0)]))
}

/// The interferometric holonomy and the objects it was read from.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalGluing {
    pub transport: OperationalTransport,
    /// `Ē^N`, parallel to `E^1`.
    pub parallel_endpoint: KrausRep,
    pub gluing: Gluing,
    /// Direct product of polar factors, for comparison.
    pub holonomy: CMat,
    pub residual: f64,
}

impl FinalGluing {
    /// `Λ_final` with `𝒱⁰ = 𝓤_N`, `V⁰ = U_N`, `𝒱¹ = 𝓤_1`, `V¹ = U_1`.
    pub fn physical_channel(&self, sigma: &CMat) -> Result<CMat> {
        final_channel(&self.transport, sigma)
    }
}

/// `Λ_final(σ)` after the ancilla is discarded.
pub fn final_channel(transport: &OperationalTransport, sigma: &CMat) -> Result<CMat> {
    let n = transport.dilations.len();
    let last = transport.dilations[n - 1].with_ancilla_unitary(&transport.unitaries[n - 1])?;
    let first = transport.dilations[0].with_ancilla_unitary(&transport.unitaries[0])?;
    let (d, k) = (last.dim_q, last.dim_a);
    if sigma.shape() != (2 * d, 2 * d) {
        return Err(Error::DimensionMismatch { expected: 2 * d, found: sigma.nrows() });
    }
    // Kraus operators of the whole arrangement: ⟨a_k| F U_tot |a_0⟩.
    let (en, e1) = (last.kraus(), first.kraus());
    let mut out = CMat::zeros(2 * d, 2 * d);
    for a in 0..k {
        let mut op = CMat::zeros(2 * d, 2 * d);
        op.view_mut((0, 0), (d, d)).copy_from(&en.ops()[a]);
        op.view_mut((d, d), (d, d)).copy_from(&e1.ops()[a]);
        out += &op * sigma * op.adjoint();
    }
    Ok(out)
}

/// Runs the transport, builds `Λ_final` and reads its gluing matrix against
/// `Ē^N = E^N Φ(T_{1,N})†` and `E^1`.
pub fn final_gluing(seq: &ChannelSequence) -> Result<FinalGluing> {
    let transport = operational_parallel_transport(seq, TransportMode::ClosedForm)?;
    let reps = seq.reps();
    let (first, last) = (&reps[0], &reps[reps.len() - 1]);
    let t_1n = overlap(first, last)?;
    let phi = polar_unitary(t_1n.matrix(), tol::RANK_TOL).map_err(|e| match e {
        Error::RankDeficient { .. } => Error::LinkRankDeficient {
            link: reps.len() - 1,
            singular_values: singular_values(t_1n.matrix()),
        },
        other => other,
    })?;
    let parallel_endpoint = gauge_transform(last, &GaugeUnitary::new(phi.unitary.adjoint())?)?;
    let c = extract_gluing_matrix(
        |sigma| final_channel(&transport, sigma).expect("shape checked by construction"),
        &parallel_endpoint,
        first,
    )?;
    let gluing = Gluing::new(parallel_endpoint.clone(), first.clone(), c)?;
    let holonomy = holonomy(seq)?;
    let residual = (gluing.matrix() - &holonomy).norm();
    Ok(FinalGluing { transport, parallel_endpoint, gluing, holonomy, residual })
}

/// Ancilla unitaries `U(s)` along a smooth dilation family.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothAncillaTransport {
    pub grid: Vec<f64>,
    pub unitaries: Vec<CMat>,
    /// `max_i ‖X_i − X_i†‖ / (s_{i+1} − s_i)` for
    /// `X_i = Tr_q[Ũ(s_i)(1 ⊗ |a⟩⟨a|)Ũ(s_{i+1})†]`.
    pub residual: f64,
}

/// `𝒬 = Tr_q[𝒰(1 ⊗ P)𝒰†]` and `ℛ = Tr_q[𝒰(1 ⊗ P)𝒰̇†]`.
pub fn ancilla_qr(u: &CMat, u_dot: &CMat, dim_q: usize, dim_a: usize) -> (CMat, CMat) {
    let proj = kron(&eye(dim_q), &ancilla_projector(dim_a));
    let q = partial_trace_first(&(u * &proj * u.adjoint()), dim_q, dim_a);
    let r = partial_trace_first(&(u * &proj * u_dot.adjoint()), dim_q, dim_a);
    (q, r)
}

/// Solves `ℛ − ℛ† = 𝒜𝒬 + 𝒬𝒜` on the grid and integrates `U̇ = U𝒜`, `U(s_0) = I`.
///
/// `family` returns `𝒰(s)` and `𝒰̇(s)`.
pub fn smooth_ancilla_transport<F>(family: F, dim_q: usize, dim_a: usize, grid: &[f64]) -> Result<SmoothAncillaTransport>
where
    F: Fn(f64) -> Result<(CMat, CMat)>,
{
    if grid.len() < 2 {
        return Err(Error::EmptyPath);
    }
    for i in 1..grid.len() {
        if !(grid[i] > grid[i - 1]) {
            return Err(Error::NonMonotoneGrid { index: i });
        }
    }
    let mut frames = Vec::with_capacity(grid.len());
    let mut potentials = Vec::with_capacity(grid.len());
    for &s in grid {
        let (u, u_dot) = family(s)?;
        let (q, r) = ancilla_qr(&u, &u_dot, dim_q, dim_a);
        let a = solve_gauge_equation(&q, &(&r - r.adjoint()), tol::RANK_TOL * q.norm())?;
        frames.push(u);
        potentials.push(a);
    }
    let mut unitaries = alloc::vec![eye(dim_a)];
    for i in 0..grid.len() - 1 {
        let h = grid[i + 1] - grid[i];
        let mid = (&potentials[i] + &potentials[i + 1]) * real(0.5 * h);
        let next = &unitaries[i] * exp_anti_hermitian(&mid);
        unitaries.push(next);
    }
    let one = eye(dim_q);
    let mut residual: f64 = 0.0;
    let transported: Vec<CMat> = frames.iter().zip(&unitaries).map(|(f, u)| kron(&one, u) * f).collect();
    let proj = kron(&one, &ancilla_projector(dim_a));
    for i in 0..grid.len() - 1 {
        let x = partial_trace_first(&(&transported[i] * &proj * transported[i + 1].adjoint()), dim_q, dim_a);
        residual = residual.max((&x - x.adjoint()).norm() / (grid[i + 1] - grid[i]));
    }
    Ok(SmoothAncillaTransport { grid: grid.to_vec(), unitaries, residual })
}

/// Same procedure with `𝒰̇` from fourth-order central differences.
pub fn smooth_ancilla_transport_fd<F>(family: F, dim_q: usize, dim_a: usize, grid: &[f64]) -> Result<SmoothAncillaTransport>
where
    F: Fn(f64) -> CMat,
{
    let h = tol::FD_STEP;
    smooth_ancilla_transport(
        |s| {
            let d = (family(s - 2.0 * h) - family(s + 2.0 * h) + (family(s + h) - family(s - h)) * real(8.0))
                * real(1.0 / (12.0 * h));
            Ok((family(s), d))
        },
        dim_q,
        dim_a,
        grid,
    )
}

/// Unitary nearest to `m` in the polar sense, for callers that need to
/// project numerically drifted ancilla unitaries.
pub fn reunitarize(m: &CMat) -> Result<CMat> {
    polar(m)
}

/// The spin-rotation arrangement: arm 0 rotates a spin-½ about `z` by `phi`,
/// arm 1 is free, and the phase shifter adds `e^{iχ}` to arm 1. The input is
/// unpolarized.
pub fn spin_rotation_probability(phi: f64, chi: f64) -> Result<f64> {
    let rot = crate::kraus::qubit_rotation(phi, [0.0, 0.0, 1.0])?;
    let dil0 = Dilation::new(2, 1, rot)?;
    let dil1 = Dilation::new(2, 1, eye(2))?;
    let v1 = CMat::from_element(1, 1, crate::matcore::c64(libm::cos(chi), libm::sin(chi)));
    detection_probability(&dil0, &dil1, &eye(1), &v1, &maximally_mixed(2))
}
