//! Uhlmann amplitudes of Jamiołkowski states and the Uhlmann holonomy.
//!
//! A representation with `K = D²` operators gives the amplitude
//! `W = Σ_k (E_k ⊗ 1)|ψ⟩⟨f_k|` of its Choi state, and
//! `W_{n+1}†W_n = (1/D) Σ_{kl} |f_k⟩⟨f_l| [T_{n+1,n}]_{kl}`.

use alloc::vec::Vec;

use crate::discrete::{holonomy, ChannelSequence};
use crate::error::{Error, Result};
use crate::kraus::{choi_with_state, maximally_entangled, KrausRep};
use crate::matcore::{eye, hermitian_eigen, polar, polar_unitary, CMat, CVec, ZERO};
use crate::ops::kron;
use crate::tol;

/// `W` on `H ⊗ H` with `WW† = ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct UhlmannAmplitude(CMat);

impl UhlmannAmplitude {
    pub fn new(matrix: CMat) -> Result<Self> {
        crate::matcore::ensure_square(&matrix)?;
        Ok(Self(matrix))
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    /// `WW†`.
    pub fn density(&self) -> CMat {
        &self.0 * self.0.adjoint()
    }
}

/// Columns of `basis` must be orthonormal within [`tol::RANK_TOL`].
pub fn check_basis(basis: &CMat) -> Result<()> {
    let residual = (basis.adjoint() * basis - eye(basis.ncols())).norm();
    if basis.nrows() != basis.ncols() || !(residual <= tol::RANK_TOL) {
        return Err(Error::BadBasis { residual });
    }
    Ok(())
}

/// Amplitude against the maximally entangled state.
pub fn amplitude_from_rep(rep: &KrausRep, basis: &CMat) -> Result<UhlmannAmplitude> {
    amplitude_from_rep_with_state(rep, basis, &maximally_entangled(rep.dim()))
}

/// `W = Σ_k (E_k ⊗ 1)|ψ⟩⟨f_k|`, with `f_k` the columns of `basis`.
pub fn amplitude_from_rep_with_state(rep: &KrausRep, basis: &CMat, psi: &CVec) -> Result<UhlmannAmplitude> {
    let d = rep.dim();
    let n = d * d;
    if rep.len() != n {
        return Err(Error::NotMaximalKraus { dim: d, k: rep.len() });
    }
    if basis.nrows() != n || psi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: basis.nrows().max(psi.len()) });
    }
    check_basis(basis)?;
    let one = eye(d);
    let mut g = CMat::from_element(n, n, ZERO);
    for (k, e) in rep.ops().iter().enumerate() {
        g.set_column(k, &(kron(e, &one) * psi));
    }
    Ok(UhlmannAmplitude(g * basis.adjoint()))
}

/// Faithful density operators `ρ_1, …, ρ_N`, closed by `ρ_{N+1} = ρ_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySequence {
    states: Vec<CMat>,
}

impl DensitySequence {
    pub fn new(states: Vec<CMat>) -> Result<Self> {
        let n = states.first().ok_or(Error::EmptySequence)?.nrows();
        for (index, rho) in states.iter().enumerate() {
            if rho.nrows() != n || rho.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: rho.nrows() });
            }
            let residual = (rho - rho.adjoint()).norm();
            if residual > tol::ANTI_HERMITIAN_TOL {
                return Err(Error::NotHermitian { residual });
            }
            let min_eigenvalue = hermitian_eigen(rho).0[0];
            if !(min_eigenvalue > tol::FAITHFUL_TOL) {
                return Err(Error::NotFaithful { index, min_eigenvalue });
            }
        }
        Ok(Self { states })
    }

    /// Choi states of a channel sequence.
    pub fn from_channels(seq: &ChannelSequence, psi: &CVec) -> Result<Self> {
        Self::new(seq.reps().iter().map(|r| choi_with_state(r, psi)).collect::<Result<Vec<_>>>()?)
    }

    pub fn states(&self) -> &[CMat] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// `Φ(W_1) U_{N+1} Φ(W_1)†` with `U_1 = I`, `U_{n+1} = Φ(W_{n+1}†W_n) U_n`.
///
/// `amplitudes` holds either `N` entries, closed implicitly by `W_1`, or
/// `N + 1` entries whose last equals the first.
pub fn uhlmann_holonomy(seq: &DensitySequence, amplitudes: &[UhlmannAmplitude]) -> Result<CMat> {
    let n = seq.len();
    let amps = match amplitudes.len() {
        m if m == n => amplitudes,
        m if m == n + 1 => {
            let (first, last) = (amplitudes[0].matrix(), amplitudes[n].matrix());
            if (first - last).norm() > tol::RANK_TOL * (1.0 + first.norm()) {
                return Err(Error::NotCyclic);
            }
            &amplitudes[..n]
        }
        m => return Err(Error::DimensionMismatch { expected: n, found: m }),
    };
    for (index, (w, rho)) in amps.iter().zip(seq.states()).enumerate() {
        if w.matrix().shape() != rho.shape() {
            return Err(Error::DimensionMismatch { expected: rho.nrows(), found: w.matrix().nrows() });
        }
        let residual = (w.density() - rho).norm();
        if residual > tol::RANK_TOL * (1.0 + rho.norm()) {
            return Err(Error::AmplitudeMismatch { index, residual });
        }
    }
    let dim = amps[0].matrix().nrows();
    let mut u = eye(dim);
    for link in 0..n {
        let x = amps[(link + 1) % n].matrix().adjoint() * amps[link].matrix();
        let p = polar_unitary(&x, tol::RANK_TOL).map_err(|e| match e {
            Error::RankDeficient { .. } => {
                Error::LinkRankDeficient { link, singular_values: crate::matcore::singular_values(&x) }
            }
            other => other,
        })?;
        u = p.unitary * u;
    }
    let phi_w1 = polar(amps[0].matrix())?;
    Ok(&phi_w1 * u * phi_w1.adjoint())
}

/// Both holonomies of a maximal-rank channel sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct UhlmannComparison {
    pub channel: CMat,
    pub uhlmann: CMat,
    /// `⟨f_k| Φ(W_1†) U_Uhl Φ(W_1) |f_l⟩`.
    pub mapped: CMat,
    pub residual: f64,
}

pub fn channel_vs_uhlmann(seq: &ChannelSequence, basis: &CMat, psi: &CVec) -> Result<UhlmannComparison> {
    let d = seq.dim();
    if seq.kraus_number() != d * d {
        return Err(Error::NotMaximalKraus { dim: d, k: seq.kraus_number() });
    }
    let channel = holonomy(seq)?;
    let states = DensitySequence::from_channels(seq, psi)?;
    let amps = seq
        .reps()
        .iter()
        .map(|r| amplitude_from_rep_with_state(r, basis, psi))
        .collect::<Result<Vec<_>>>()?;
    let uhlmann = uhlmann_holonomy(&states, &amps)?;
    let phi_w1_dag = polar(&amps[0].matrix().adjoint())?;
    let phi_w1 = polar(amps[0].matrix())?;
    let mapped = basis.adjoint() * &phi_w1_dag * &uhlmann * &phi_w1 * basis;
    let residual = (&channel - &mapped).norm();
    Ok(UhlmannComparison { channel, uhlmann, mapped, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::{overlap, parallel_gauge};
    use crate::kraus::{choi, random_channel, zoo};
    use crate::matcore::{matrix_sqrt_posdef, real, unitarity_defect};
    use crate::random::{haar_unitary, random_density, seeded};
    use proptest::prelude::*;

    fn random_sequence(seed: u64, n: usize) -> ChannelSequence {
        ChannelSequence::new((0..n).map(|i| random_channel(2, 4, seed * 31 + i as u64).unwrap()).collect()).unwrap()
    }

    #[test]
    fn non_maximal_rep_is_rejected() {
        let rep = zoo("identity", &[]).unwrap();
        assert!(matches!(amplitude_from_rep(&rep, &eye(4)), Err(Error::NotMaximalKraus { .. })));
        let rep = random_channel(2, 4, 1).unwrap();
        let bad = eye(4) * real(2.0);
        assert!(matches!(amplitude_from_rep(&rep, &bad), Err(Error::BadBasis { .. })));
    }

    #[test]
    fn amplitude_reproduces_choi_state() {
        let rep = random_channel(2, 4, 2).unwrap();
        let basis = haar_unitary(4, &mut seeded(3));
        let w = amplitude_from_rep(&rep, &basis).unwrap();
        assert!((w.density() - choi(&rep).matrix).norm() < 1e-10);
    }

    #[test]
    fn amplitude_overlap_is_conjugated_channel_overlap() {
        let a = random_channel(2, 4, 4).unwrap();
        let b = random_channel(2, 4, 5).unwrap();
        let basis = haar_unitary(4, &mut seeded(6));
        let (wa, wb) = (amplitude_from_rep(&a, &basis).unwrap(), amplitude_from_rep(&b, &basis).unwrap());
        let t = overlap(&b, &a).unwrap().into_matrix();
        let expected = &basis * t * basis.adjoint() * real(0.5);
        assert!((wb.matrix().adjoint() * wa.matrix() - expected).norm() < 1e-12);
    }

    #[test]
    fn constant_amplitudes_have_trivial_holonomy() {
        let rho = random_density(4, &mut seeded(7));
        let w = UhlmannAmplitude::new(matrix_sqrt_posdef(&rho).unwrap()).unwrap();
        let seq = DensitySequence::new(alloc::vec![rho.clone(), rho.clone(), rho]).unwrap();
        let u = uhlmann_holonomy(&seq, &[w.clone(), w.clone(), w]).unwrap();
        assert!((u - eye(4)).norm() < 1e-10);
    }

    #[test]
    fn commuting_ping_pong_is_trivial() {
        let diag = |v: [f64; 4]| CMat::from_diagonal(&CVec::from_iterator(4, v.iter().map(|&x| real(x))));
        let (r1, r2) = (diag([0.4, 0.3, 0.2, 0.1]), diag([0.1, 0.2, 0.3, 0.4]));
        let w = |r: &CMat| UhlmannAmplitude::new(matrix_sqrt_posdef(r).unwrap()).unwrap();
        let seq = DensitySequence::new(alloc::vec![r1.clone(), r2.clone()]).unwrap();
        let u = uhlmann_holonomy(&seq, &[w(&r1), w(&r2), w(&r1)]).unwrap();
        assert!((u - eye(4)).norm() < 1e-12);
    }

    #[test]
    fn non_cyclic_and_unfaithful_inputs() {
        let mut rng = seeded(8);
        let (r1, r2) = (random_density(4, &mut rng), random_density(4, &mut rng));
        let w = |r: &CMat| UhlmannAmplitude::new(matrix_sqrt_posdef(r).unwrap()).unwrap();
        let seq = DensitySequence::new(alloc::vec![r1.clone(), r2.clone()]).unwrap();
        assert_eq!(uhlmann_holonomy(&seq, &[w(&r1), w(&r2), w(&r2)]), Err(Error::NotCyclic));
        let pure = crate::ops::outer(&maximally_entangled(2), &maximally_entangled(2));
        assert!(matches!(DensitySequence::new(alloc::vec![pure]), Err(Error::NotFaithful { index: 0, .. })));
    }

    #[test]
    fn random_sequence_holonomy_is_unitary_and_basis_free() {
        let seq = random_sequence(9, 4);
        let psi = maximally_entangled(2);
        let states = DensitySequence::from_channels(&seq, &psi).unwrap();
        let mut rng = seeded(10);
        let holonomies: Vec<CMat> = (0..2)
            .map(|_| {
                let basis = haar_unitary(4, &mut rng);
                let amps: Vec<_> = seq.reps().iter().map(|r| amplitude_from_rep(r, &basis).unwrap()).collect();
                uhlmann_holonomy(&states, &amps).unwrap()
            })
            .collect();
        assert!(unitarity_defect(&holonomies[0]) < 1e-10);
        assert!((&holonomies[0] - &holonomies[1]).norm() < 1e-10);
    }

    #[test]
    fn constant_sequence_bridge() {
        let rep = random_channel(2, 4, 11).unwrap();
        let seq = ChannelSequence::new(alloc::vec![rep.clone(), rep.clone(), rep]).unwrap();
        let cmp = channel_vs_uhlmann(&seq, &eye(4), &maximally_entangled(2)).unwrap();
        assert!((cmp.channel - eye(4)).norm() < 1e-12);
        assert!(cmp.residual < 1e-12);
    }

    #[test]
    fn three_channel_bridge_and_state_independence() {
        let seq = random_sequence(12, 3);
        let mut rng = seeded(13);
        let psi = maximally_entangled(2);
        let a = channel_vs_uhlmann(&seq, &haar_unitary(4, &mut rng), &psi).unwrap();
        assert!(a.residual < 1e-8);
        let psi2 = kron(&eye(2), &haar_unitary(2, &mut rng)) * &psi;
        let b = channel_vs_uhlmann(&seq, &haar_unitary(4, &mut rng), &psi2).unwrap();
        assert!(b.residual < 1e-8);
        assert!((a.channel - b.channel).norm() < 1e-8);
    }

    #[test]
    fn parallel_amplitudes_match_parallel_reps() {
        let seq = random_sequence(14, 3);
        let (par, _) = parallel_gauge(&seq).unwrap();
        let basis = haar_unitary(4, &mut seeded(15));
        let amps: Vec<_> = par.reps().iter().map(|r| amplitude_from_rep(r, &basis).unwrap()).collect();
        let positive = |x: &CMat| {
            (x - x.adjoint()).norm() < 1e-9 * x.norm() && hermitian_eigen(x).0[0] > 1e-9 * x.norm()
        };
        for n in 0..2 {
            let x = amps[n + 1].matrix().adjoint() * amps[n].matrix();
            assert!(positive(&x));
            let y = amps[n].matrix().adjoint() * amps[n + 1].matrix() * real(-1.0);
            assert!(!positive(&y));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn bridge_holds_for_random_bases_and_states(seed in any::<u64>()) {
            let seq = random_sequence(seed % 1_000_000, 3);
            let mut rng = seeded(seed);
            let psi = kron(&eye(2), &haar_unitary(2, &mut rng)) * maximally_entangled(2);
            let cmp = channel_vs_uhlmann(&seq, &haar_unitary(4, &mut rng), &psi).unwrap();
            prop_assert!(cmp.residual < 1e-8);
        }

        #[test]
        fn parallelity_is_equivalent(seed in any::<u64>(), mix in 0.0f64..1.0) {
            let mut rng = seeded(seed);
            let a = random_channel(2, 4, seed % 1_000_000).unwrap();
            let (b, _) = {
                let other = random_channel(2, 4, seed % 1_000_000 + 1).unwrap();
                let pair = ChannelSequence::new(alloc::vec![a.clone(), other]).unwrap();
                let (par, gauges) = parallel_gauge(&pair).unwrap();
                (par.reps()[1].clone(), gauges)
            };
            // Either the parallel partner or a random re-gauging of it.
            let b = if mix < 0.5 {
                b
            } else {
                crate::kraus::gauge_transform(&b, &crate::kraus::GaugeUnitary::random(4, &mut rng)).unwrap()
            };
            let basis = haar_unitary(4, &mut rng);
            let (wa, wb) = (amplitude_from_rep(&a, &basis).unwrap(), amplitude_from_rep(&b, &basis).unwrap());
            let x = wb.matrix().adjoint() * wa.matrix();
            let t = overlap(&b, &a).unwrap();
            let w_positive = (&x - x.adjoint()).norm() < 1e-9 && hermitian_eigen(&x).0[0] > 1e-9;
            prop_assert_eq!(w_positive, t.is_positive_definite(1e-9));
        }
    }
}
