use holo_core::discrete::{holonomy, holonomy_parallel_gauge, overlap, ChannelSequence};
use holo_core::interferometer::{final_gluing, operational_parallel_transport, TransportMode};
use holo_core::kraus::{gauge_transform, maximally_entangled, random_channel, GaugeUnitary};
use holo_core::matcore::{eye, CMat};
use holo_core::random::{haar_unitary, seeded};
use holo_core::smooth::{convergence_study, discretize, smooth_holonomy, IsometryPath};
use holo_core::uhlmann::channel_vs_uhlmann;

// Polar factor straight from the SVD, independent of the library routine.
fn polar_oracle(x: &CMat) -> CMat {
    let svd = x.clone().svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

fn sequence(n: usize, d: usize, k: usize, seed: u64) -> ChannelSequence {
    ChannelSequence::new((0..n as u64).map(|i| random_channel(d, k, seed * 100 + i).unwrap()).collect()).unwrap()
}

#[test]
fn three_routes_agree_end_to_end() {
    for seed in 0..5 {
        let seq = sequence(5, 2, 4, seed);
        let direct = holonomy(&seq).unwrap();

        let reps = seq.reps();
        let mut oracle = eye(4);
        for j in 1..reps.len() {
            let t: CMat = CMat::from_fn(4, 4, |a, b| (reps[j].ops()[a].adjoint() * &reps[j - 1].ops()[b]).trace());
            oracle = polar_oracle(&t) * oracle;
        }
        let t: CMat = CMat::from_fn(4, 4, |a, b| (reps[0].ops()[a].adjoint() * &reps[reps.len() - 1].ops()[b]).trace());
        oracle = polar_oracle(&t) * oracle;
        assert!((&direct - &oracle).norm() < 1e-10);

        let glued = final_gluing(&seq).unwrap();
        assert!((glued.gluing.matrix() - &direct).norm() < 1e-8, "seed {seed}");

        let mut rng = seeded(seed);
        let basis = haar_unitary(4, &mut rng);
        let cmp = channel_vs_uhlmann(&seq, &basis, &maximally_entangled(2)).unwrap();
        assert!(cmp.residual < 1e-8);
        assert!((&cmp.channel - &direct).norm() < 1e-12);
    }
}

#[test]
fn parallel_gauge_and_operational_transport_match() {
    let seq = sequence(6, 3, 2, 9);
    let direct = holonomy(&seq).unwrap();
    assert!((holonomy_parallel_gauge(&seq).unwrap() - &direct).norm() < 1e-10);

    let transport = operational_parallel_transport(&seq, TransportMode::ClosedForm).unwrap();
    let moved = transport.transported_reps().unwrap();
    // Consecutive transported representations have Hermitian positive overlaps.
    for w in moved.windows(2) {
        let t = overlap(&w[1], &w[0]).unwrap().into_matrix();
        assert!((&t - t.adjoint()).norm() < 1e-9);
        assert!(t.clone().symmetric_eigenvalues().iter().all(|&x| x > -1e-9));
    }
}

#[test]
fn gauge_change_of_first_channel_conjugates_holonomy() {
    let seq = sequence(4, 2, 3, 4);
    let mut rng = seeded(77);
    let g = GaugeUnitary::random(3, &mut rng);
    let mut reps = seq.reps().to_vec();
    reps[0] = gauge_transform(&reps[0], &g).unwrap();
    let moved = holonomy(&ChannelSequence::new(reps).unwrap()).unwrap();
    let direct = holonomy(&seq).unwrap();
    // With F̃ = F U the closing overlap picks up U† and the first link U,
    // so the new holonomy is U† H U.
    let back = g.matrix() * &moved * g.matrix().adjoint();
    assert!((&back - &direct).norm() < 1e-9);
}

#[test]
fn discretized_path_converges_to_smooth_holonomy() {
    let mut rng = seeded(13);
    let path = IsometryPath::random(2, 2, 1.0, &mut rng);
    let reference = smooth_holonomy(&path, 4096).unwrap();
    assert!((&reference * reference.adjoint() - eye(2)).norm() < 1e-10);
    let study = convergence_study(&path, &reference, &[100, 200, 400]).unwrap();
    assert!(study.errors.windows(2).all(|e| e[1] < e[0]));
    assert!(study.orders.iter().all(|&p| p > 0.8), "{:?}", study.orders);
    assert_eq!(discretize(&path, 7).unwrap().len(), 7);
}
