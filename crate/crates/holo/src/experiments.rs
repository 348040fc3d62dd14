//! Named experiments. Each returns a deterministic report for its inputs.

use std::f64::consts::PI;

use holo_core::discrete::{gauge_covariance_check, holonomy, holonomy_parallel_gauge, overlap, ChannelSequence};
use holo_core::holonomic::{
    gamma_operators, holonomic_channel_holonomy, holonomic_channel_output, measurement_approximation,
    parallel_transport_residual,
};
use holo_core::interferometer::{final_gluing, spin_rotation_probability};
use holo_core::kraus::{fixture_reps, maximally_entangled, random_channel_with, GaugeUnitary};
use holo_core::matcore::{eye, hermitian_part, singular_values, unitarity_defect};
use holo_core::ops::{pauli_z, trace_distance};
use holo_core::random::{random_density, seeded};
use holo_core::smooth::{
    convergence_study, discretize, gauge_potential_samples, smooth_holonomy, unitary_family_holonomy, ChannelPath,
};
use holo_core::tol::RANK_TOL;
use holo_core::uhlmann::channel_vs_uhlmann;
use holo_core::{CMat, C64};

use crate::config::Settings;
use crate::error::{HoloError, HoloResult};
use crate::registry::{named_family, named_path};
use crate::report::{ExperimentReport, ResidualClass};

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64).collect(),
    }
}

/// 512 points over `[0, 8π]`.
pub fn default_phi_grid() -> Vec<f64> {
    linspace(0.0, 8.0 * PI, 512)
}

fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

/// Structural checks that must hold exactly; a shortfall of zero passes.
const EXACT: f64 = 1e-12;

/// Spin rotation by `φ` in one arm of the interferometer.
///
/// The holonomy of `s ↦ exp(−isφσ_z/2)` is compared with `Φ(cos φ/2)`, the
/// detection probability with `½(1 + |Tr U|/2 · cos arg γ)`, and `p(φ + 4π)`
/// with `p(φ)`. With the phase shifter, the `χ` maximizing `p` is compared
/// with `arg γ`. Where `cos φ/2 = 0`, `γ` is undefined and reported as 0.
pub fn run_4pi(phi_grid: &[f64], with_phase_shift: bool, settings: &Settings) -> HoloResult<ExperimentReport> {
    if phi_grid.is_empty() || phi_grid.iter().any(|&p| !(-1e-12..=8.0 * PI + 1e-12).contains(&p)) {
        return Err(HoloError::Usage("phi grid must be non-empty and within [0, 8π]".into()));
    }
    let mut rep = ExperimentReport::new("4pi", settings.seed);
    rep.param("points", phi_grid.len())
        .param("phi_min", phi_grid[0])
        .param("phi_max", phi_grid[phi_grid.len() - 1])
        .param("phase_shift", with_phase_shift)
        .param("schrodinger_steps", settings.schrodinger_steps);
    rep.columns(&["phi", "p", "trace_abs", "gamma_re", "gamma_im"]);
    let sz = pauli_z();
    let (mut gamma_err, mut display_err, mut period_err, mut two_pi_gap) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut gammas = Vec::with_capacity(phi_grid.len());
    for &phi in phi_grid {
        let h = &sz * C64::new(phi / 2.0, 0.0);
        let c = (phi / 2.0).cos();
        let defined = c.abs() > 1e-8;
        let (gamma, trace_abs) = match unitary_family_holonomy(|_| h.clone(), &eye(2), settings.schrodinger_steps) {
            Ok(r) => (r.gamma, r.final_unitary.trace().norm()),
            Err(holo_core::Error::RankDeficient { .. }) if !defined => (C64::new(0.0, 0.0), 0.0),
            Err(e) => return Err(e.into()),
        };
        let p = spin_rotation_probability(phi, 0.0)?;
        if defined {
            gamma_err = gamma_err.max((gamma - C64::new(c.signum(), 0.0)).norm());
            let display = 0.5 * (1.0 + 0.5 * trace_abs * gamma.arg().cos());
            display_err = display_err.max((p - display).abs());
        }
        period_err = period_err.max((spin_rotation_probability(phi + 4.0 * PI, 0.0)? - p).abs());
        two_pi_gap = two_pi_gap.max((spin_rotation_probability(phi + 2.0 * PI, 0.0)? - p).abs());
        rep.row(phi, vec![p, trace_abs, gamma.re, gamma.im]);
        gammas.push((phi, gamma, trace_abs));
    }
    let tol = settings.threshold(1e-9);
    rep.scalar("max_p_2pi_difference", two_pi_gap);
    rep.residual("gamma_vs_polar_cos_half", gamma_err, tol, ResidualClass::CrossRoute)
        .residual("p_vs_display", display_err, tol, ResidualClass::CrossRoute)
        .residual("p_4pi_periodicity", period_err, tol, ResidualClass::Periodicity)
        // p must visibly change under φ → φ + 2π somewhere on the grid.
        .residual("p_2pi_shortfall", (1e-3 - two_pi_gap).max(0.0), EXACT, ResidualClass::Periodicity);
    if with_phase_shift {
        let n = settings.chi_points;
        let cell = 2.0 * PI / n as f64;
        let chis: Vec<f64> = (0..n).map(|j| -PI + cell * j as f64).collect();
        let usable: Vec<&(f64, C64, f64)> = gammas.iter().filter(|g| g.2 > 0.1).collect();
        let stride = usable.len().div_ceil(64).max(1);
        let mut worst = 0.0f64;
        for &&(phi, gamma, _) in usable.iter().step_by(stride) {
            let mut best = (f64::NEG_INFINITY, 0.0);
            for &chi in &chis {
                let p = spin_rotation_probability(phi, chi)?;
                if p > best.0 {
                    best = (p, chi);
                }
            }
            worst = worst.max(wrap(best.1 - gamma.arg()).abs() / cell);
        }
        rep.param("chi_points", n).scalar("chi_cell", cell);
        rep.residual("argmax_chi_cells", worst, 1.0, ResidualClass::CrossRoute);
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrosscheckParams {
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    /// Repeat one channel `n` times instead of drawing `n`.
    pub constant: bool,
}

impl Default for CrosscheckParams {
    fn default() -> Self {
        Self { seed: 42, n: 4, d: 2, k: 4, constant: false }
    }
}

pub fn crosscheck_sequence(p: &CrosscheckParams) -> HoloResult<ChannelSequence> {
    let mut rng = seeded(p.seed);
    let reps = if p.constant {
        vec![random_channel_with(p.d, p.k, &mut rng)?; p.n]
    } else {
        (0..p.n).map(|_| random_channel_with(p.d, p.k, &mut rng)).collect::<Result<Vec<_>, _>>()?
    };
    Ok(ChannelSequence::new(reps)?)
}

/// Direct product of polar factors, the Uhlmann route (only when `K = D²`)
/// and the interferometric gluing matrix, compared pairwise.
pub fn run_crosscheck(p: &CrosscheckParams, settings: &Settings) -> HoloResult<ExperimentReport> {
    if p.n < 2 || p.d == 0 || p.k == 0 || p.k > p.d * p.d {
        return Err(HoloError::Usage("need n ≥ 2 and 1 ≤ k ≤ d²".into()));
    }
    let seq = crosscheck_sequence(p)?;
    let mut rep = ExperimentReport::new("crosscheck", p.seed);
    rep.param("n", p.n).param("d", p.d).param("k", p.k).param("constant", p.constant);
    let tol = settings.threshold(1e-8);

    let direct = holonomy(&seq)?;
    let glued = final_gluing(&seq)?;
    let c = glued.gluing.matrix();
    rep.matrix("holonomy", &direct);
    rep.residual("holonomy_unitarity", unitarity_defect(&direct), tol, ResidualClass::Unitarity)
        .residual("direct_vs_gluing", (&direct - c).norm(), tol, ResidualClass::CrossRoute);
    if p.k == p.d * p.d {
        let cmp = channel_vs_uhlmann(&seq, &eye(p.k), &maximally_entangled(p.d))?;
        rep.param("uhlmann", "run");
        rep.residual("direct_vs_uhlmann", (&direct - &cmp.mapped).norm(), tol, ResidualClass::CrossRoute)
            .residual("uhlmann_vs_gluing", (&cmp.mapped - c).norm(), tol, ResidualClass::CrossRoute);
    } else {
        rep.param("uhlmann", "skipped: k != d^2");
    }

    let mut rng = seeded(p.seed ^ 0x9e37_79b9_7f4a_7c15);
    let gauges: Vec<GaugeUnitary> = (0..p.n).map(|_| GaugeUnitary::random(p.k, &mut rng)).collect();
    let moved = ChannelSequence::new(
        seq.reps().iter().zip(&gauges).map(|(r, g)| holo_core::kraus::gauge_transform(r, g)).collect::<Result<_, _>>()?,
    )?;
    let v1 = gauges[0].matrix();
    let moved_c = final_gluing(&moved)?.gluing.matrix().clone();
    rep.residual("gauge_covariance", gauge_covariance_check(&seq, &gauges)?, tol, ResidualClass::Covariance)
        .residual("gluing_covariance", (moved_c - v1.adjoint() * c * v1).norm(), tol, ResidualClass::Covariance);

    rep.columns(&["link", "probability", "optimum", "sigma_min", "sigma_max"]);
    for step in &glued.transport.transcript {
        let sv = &step.singular_values;
        rep.row(step.link as f64, vec![step.probability, step.optimum, sv[sv.len() - 1], sv[0]]);
    }
    Ok(rep)
}

/// Runs [`run_crosscheck`] for `count` consecutive seeds on up to `jobs`
/// threads; residuals are the worst over seeds.
pub fn run_crosscheck_batch(p: &CrosscheckParams, count: usize, settings: &Settings) -> HoloResult<ExperimentReport> {
    if count <= 1 {
        return run_crosscheck(p, settings);
    }
    let seeds: Vec<u64> = (0..count as u64).map(|i| p.seed.wrapping_add(i)).collect();
    let jobs = settings.jobs.clamp(1, count);
    let chunk = count.div_ceil(jobs);
    let results: Vec<HoloResult<ExperimentReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|&seed| run_crosscheck(&CrosscheckParams { seed, ..*p }, settings))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("crosscheck worker panicked")).collect()
    });
    let reports = results.into_iter().collect::<HoloResult<Vec<_>>>()?;
    let mut rep = ExperimentReport::new("crosscheck", p.seed);
    rep.param("n", p.n).param("d", p.d).param("k", p.k).param("constant", p.constant).param("seeds", count);
    let keys: Vec<String> = reports[0].residuals.keys().cloned().collect();
    let mut cols = vec!["seed"];
    cols.extend(keys.iter().map(String::as_str));
    rep.columns(&cols);
    for (seed, r) in seeds.iter().zip(&reports) {
        rep.row(*seed as f64, keys.iter().map(|k| r.residuals[k].value).collect());
    }
    for key in &keys {
        let first = reports[0].residuals[key];
        let worst = reports.iter().map(|r| r.residuals[key].value).fold(0.0, f64::max);
        rep.residual(key, worst, first.threshold, first.class);
    }
    Ok(rep)
}

/// Distance between the discretized holonomy and the smooth one as the
/// number of samples grows, with fitted orders between consecutive sizes.
pub fn run_convergence(name: &str, params: &[f64], sizes: &[usize], settings: &Settings) -> HoloResult<ExperimentReport> {
    let path = named_path(name, params)?;
    let mut rep = convergence_report(&*path, sizes, settings)?;
    rep.param("path", name).param("params", format!("{params:?}"));
    Ok(rep)
}

pub fn convergence_report(path: &dyn ChannelPath, sizes: &[usize], settings: &Settings) -> HoloResult<ExperimentReport> {
    if sizes.len() < 2 || sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(HoloError::Usage("need at least two increasing grid sizes".into()));
    }
    let reference = smooth_holonomy(path, settings.reference_steps)?;
    let study = convergence_study(path, &reference, sizes)?;
    let mut rep = ExperimentReport::new("convergence", settings.seed);
    rep.param("sizes", format!("{sizes:?}")).param("reference_steps", settings.reference_steps);
    rep.columns(&["n", "error"]);
    for (n, e) in study.sizes.iter().zip(&study.errors) {
        rep.row(*n as f64, vec![*e]);
    }
    // Pairs already at round-off carry no order information.
    let floor = 1e-12;
    let mut min_order = f64::INFINITY;
    for (i, o) in study.orders.iter().enumerate() {
        if study.errors[i] > floor && study.errors[i + 1] > floor {
            rep.scalar(&format!("order[{i}]"), *o);
            min_order = min_order.min(*o);
        }
    }
    rep.scalar("min_order", min_order);
    let shortfall = if min_order.is_finite() { (1.0 - min_order).max(0.0) } else { 0.0 };
    rep.residual("order_shortfall", shortfall, EXACT, ResidualClass::Convergence);
    rep.residual("reference_unitarity", unitarity_defect(&reference), settings.threshold(1e-8), ResidualClass::Unitarity);
    Ok(rep)
}

/// Smooth holonomy of a path with its gauge-potential residuals.
pub fn run_smooth(path: &dyn ChannelPath, label: &str, settings: &Settings) -> HoloResult<ExperimentReport> {
    let mut rep = ExperimentReport::new("smooth", settings.seed);
    rep.param("path", label).param("steps", settings.steps);
    let u = smooth_holonomy(path, settings.steps)?;
    let samples = gauge_potential_samples(path, settings.steps)?;
    rep.columns(&["s", "potential_norm", "equation_residual"]);
    let mut worst = 0.0f64;
    for smp in &samples {
        let scale = (&smp.r - smp.r.adjoint()).norm().max(smp.q.norm());
        let res = smp.residual() / scale;
        worst = worst.max(res);
        rep.row(smp.s, vec![smp.a.norm(), res]);
    }
    let discrete = holonomy(&discretize(path, settings.steps)?)?;
    rep.matrix("holonomy", &u).scalar("discrete_difference", (&discrete - &u).norm());
    rep.residual("holonomy_unitarity", unitarity_defect(&u), settings.threshold(1e-8), ResidualClass::Unitarity)
        .residual("potential_equation", worst, settings.threshold(1e-9), ResidualClass::Other);
    Ok(rep)
}

/// Holonomy of a sequence read from a file, with the checks that need no
/// extra input: unitarity, parallel-gauge agreement, gauge covariance under
/// seeded random gauges, and the interferometric gluing matrix.
pub fn run_sequence(seq: &ChannelSequence, label: &str, settings: &Settings) -> HoloResult<ExperimentReport> {
    for (i, r) in seq.reps().iter().enumerate() {
        let defect = r.completeness_defect();
        if defect > 1e-8 {
            return Err(HoloError::Format(format!("channel {i} is not trace preserving (defect {defect:e})")));
        }
    }
    let mut rep = ExperimentReport::new("seq", settings.seed);
    rep.param("source", label).param("n", seq.len()).param("d", seq.dim()).param("k", seq.kraus_number());
    let tol = settings.threshold(1e-9);
    let u = holonomy(seq)?;
    rep.matrix("holonomy", &u);
    let mut rng = seeded(settings.seed);
    let gauges: Vec<GaugeUnitary> = (0..seq.len()).map(|_| GaugeUnitary::random(seq.kraus_number(), &mut rng)).collect();
    rep.residual("holonomy_unitarity", unitarity_defect(&u), tol, ResidualClass::Unitarity)
        .residual("parallel_gauge", (holonomy_parallel_gauge(seq)? - &u).norm(), tol, ResidualClass::CrossRoute)
        .residual("gauge_covariance", gauge_covariance_check(seq, &gauges)?, tol, ResidualClass::Covariance)
        .residual("direct_vs_gluing", final_gluing(seq)?.residual, tol, ResidualClass::CrossRoute);
    rep.columns(&["link", "sigma_min", "sigma_max"]);
    for link in 0..seq.len() {
        let sv = singular_values(seq.link_overlap(link)?.matrix());
        rep.row(link as f64, vec![sv[sv.len() - 1], sv[0]]);
    }
    Ok(rep)
}

/// Overlap matrices of the phase-flip, bit-flip and amplitude-damping
/// representations against their closed forms, on every triple of `grid`.
///
/// The checked forms are exactly the listed ones; the bit-flip/amplitude
/// damping `(1,1)` entry is also compared with `√(p_f p_g)` and reported as
/// a scalar.
pub fn run_fixtures(grid: &[f64], settings: &Settings) -> HoloResult<ExperimentReport> {
    if grid.is_empty() || grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(HoloError::Usage("fixture grid values must lie in [0, 1]".into()));
    }
    let mut rep = ExperimentReport::new("fixtures", settings.seed);
    rep.param("grid", format!("{grid:?}"));
    rep.columns(&["index", "p_e", "p_f", "p_g", "dev_fe", "dev_eg", "dev_gf", "rank_fe", "rank_eg", "rank_gf"]);
    let r = |x: f64| C64::new(x, 0.0);
    let dev = |a: &CMat, b: &CMat| a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let (mut worst_fe, mut worst_eg, mut worst_gf, mut worst_corrected) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut mismatches = 0usize;
    let mut index = 0;
    for &pe in grid {
        for &pf in grid {
            for &pg in grid {
                let [e, f, g] = fixture_reps(pe, pf, pg)?;
                let t_fe = overlap(&f, &e)?;
                let t_eg = overlap(&e, &g)?;
                let t_gf = overlap(&g, &f)?;
                let (se, sf, sg) = ((1.0 - pe).sqrt(), (1.0 - pf).sqrt(), (1.0 - pg).sqrt());
                let printed_fe = CMat::from_row_slice(2, 2, &[r(2.0 * ((1.0 - pe) * (1.0 - pf)).sqrt()), r(0.0), r(0.0), r(0.0)]);
                let printed_eg =
                    CMat::from_row_slice(2, 2, &[r(se * (1.0 + sg)), r(0.0), r(pe.sqrt() * (1.0 - sg)), r(0.0)]);
                let printed_gf = CMat::from_row_slice(2, 2, &[r(sf * (1.0 + sg)), r(0.0), r(0.0), r(pg.sqrt() * sf)]);
                let mut corrected_gf = printed_gf.clone();
                corrected_gf[(1, 1)] = r((pf * pg).sqrt());
                let (d_fe, d_eg, d_gf) =
                    (dev(t_fe.matrix(), &printed_fe), dev(t_eg.matrix(), &printed_eg), dev(t_gf.matrix(), &printed_gf));
                worst_fe = worst_fe.max(d_fe);
                worst_eg = worst_eg.max(d_eg);
                worst_gf = worst_gf.max(d_gf);
                worst_corrected = worst_corrected.max(dev(t_gf.matrix(), &corrected_gf));

                let (rank_fe, rank_eg, rank_gf) = (t_fe.rank(RANK_TOL), t_eg.rank(RANK_TOL), t_gf.rank(RANK_TOL));
                let stated_fe = if pe != 1.0 && pf != 1.0 { 1 } else { 0 };
                let stated_eg = if pe == 1.0 && pg == 0.0 { 0 } else { 1 };
                mismatches += usize::from(rank_fe != stated_fe) + usize::from(rank_eg != stated_eg);
                if pf != 1.0 && pg != 0.0 {
                    mismatches += usize::from(rank_gf != 2);
                }
                rep.row(
                    index as f64,
                    vec![pe, pf, pg, d_fe, d_eg, d_gf, rank_fe as f64, rank_eg as f64, rank_gf as f64],
                );
                index += 1;
            }
        }
    }
    let tol = settings.threshold(1e-12);
    rep.scalar("t_gf_deviation_from_sqrt_pf_pg", worst_corrected);
    rep.residual("t_fe_deviation", worst_fe, tol, ResidualClass::Fixture)
        .residual("t_eg_deviation", worst_eg, tol, ResidualClass::Fixture)
        .residual("t_gf_deviation", worst_gf, tol, ResidualClass::Fixture)
        .residual("rank_mismatches", mismatches as f64, 0.5, ResidualClass::Fixture);
    Ok(rep)
}

/// `{0, 0.25, 0.5, 0.75, 1}`.
pub fn default_fixture_grid() -> Vec<f64> {
    linspace(0.0, 1.0, 5)
}

/// Holonomic channel of a named frame family: trace preservation, parallel
/// transport, the projective-measurement approximation for each `N`, and the
/// closed-path phases against the family's geometric prediction.
pub fn run_holonomic(name: &str, params: &[f64], ns: &[usize], settings: &Settings) -> HoloResult<ExperimentReport> {
    if ns.is_empty() {
        return Err(HoloError::Usage("need at least one measurement count".into()));
    }
    let named = named_family(name, params)?;
    let fam = named.as_family();
    let mut rep = ExperimentReport::new("holonomic", settings.seed);
    rep.param("family", name).param("params", format!("{params:?}")).param("steps", settings.steps);

    let mut completeness = 0.0f64;
    let mut transport = 0.0f64;
    // Sample points avoid the corners of piecewise paths at 1/2 and 3/4.
    for s in [0.2, 0.45, 0.6, 0.9, 1.0] {
        let gammas = gamma_operators(fam, s, settings.steps)?;
        let sum = gammas.iter().fold(CMat::zeros(fam.dim(), fam.dim()), |acc, g| acc + g.adjoint() * g);
        completeness = completeness.max((sum - eye(fam.dim())).norm());
        if s < 1.0 {
            transport = transport.max(parallel_transport_residual(fam, s, settings.steps)?);
        }
    }

    let rho = random_density(fam.dim(), &mut seeded(settings.seed));
    let target = holonomic_channel_output(fam, 1.0, settings.steps, &rho)?;
    rep.columns(&["n", "trace_distance", "remainder_mass"]);
    let mut distances = Vec::with_capacity(ns.len());
    for &n in ns {
        let m = measurement_approximation(fam, 1.0, n, &rho)?;
        let d = trace_distance(&hermitian_part(&m.output), &target);
        rep.row(n as f64, vec![d, m.remainder_mass]);
        distances.push(d);
    }
    let non_monotone = distances.windows(2).filter(|w| w[1] >= w[0]).count();

    let closed = holonomic_channel_holonomy(fam, 2048)?;
    let expected = named.expected_phases();
    let mut phase_err = 0.0f64;
    for (k, (t, e)) in closed.traces.iter().zip(&expected).enumerate() {
        rep.scalar(&format!("trace[{k}]"), *t).scalar(&format!("expected_phase[{k}]"), *e);
        phase_err = phase_err.max(wrap(t.arg() - e).abs());
    }
    rep.residual("completeness", completeness, settings.threshold(1e-8), ResidualClass::Unitarity)
        .residual("parallel_transport", transport, settings.threshold(1e-6), ResidualClass::Transport)
        .residual("measurement_non_monotone", non_monotone as f64, 0.5, ResidualClass::Convergence)
        .residual("closed_path_phase", phase_err, settings.threshold(1e-3), ResidualClass::CrossRoute);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints() {
        let g = linspace(0.0, 1.0, 5);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(default_phi_grid().len(), 512);
        assert_eq!(*default_phi_grid().last().unwrap(), 8.0 * PI);
    }

    #[test]
    fn four_pi_small_grid() {
        let s = Settings { schrodinger_steps: 64, chi_points: 90, ..Settings::default() };
        let rep = run_4pi(&[0.0, 2.0 * PI, PI, 5.0], true, &s).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.series[1].columns[0].abs() < 1e-12);
        assert!((rep.series[2].columns[0] - 0.5).abs() < 1e-12);
        assert_eq!(rep.series[1].columns[2], -1.0);
        assert!(run_4pi(&[9.0 * PI], false, &s).is_err());
    }

    #[test]
    fn constant_crosscheck_is_identity() {
        let p = CrosscheckParams { constant: true, ..CrosscheckParams::default() };
        let rep = run_crosscheck(&p, &Settings::default()).unwrap();
        assert!(rep.passed);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                let crate::report::Scalar::Complex([re, im]) = rep.scalars[&format!("holonomy[{i}][{j}]")] else {
                    panic!()
                };
                assert!((re - want).abs() < 1e-9 && im.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn crosscheck_skips_uhlmann_when_not_maximal() {
        let p = CrosscheckParams { k: 2, ..CrosscheckParams::default() };
        let rep = run_crosscheck(&p, &Settings::default()).unwrap();
        assert!(rep.passed);
        assert!(!rep.residuals.contains_key("direct_vs_uhlmann"));
    }

    #[test]
    fn batch_is_independent_of_jobs() {
        let p = CrosscheckParams { n: 3, k: 2, ..CrosscheckParams::default() };
        let one = run_crosscheck_batch(&p, 4, &Settings::default()).unwrap();
        let many = run_crosscheck_batch(&p, 4, &Settings { jobs: 3, ..Settings::default() }).unwrap();
        assert_eq!(one, many);
        assert!(one.passed);
        assert_eq!(one.series.len(), 4);
    }

    #[test]
    fn constant_path_converges_trivially() {
        let s = Settings { reference_steps: 64, ..Settings::default() };
        let rep = run_convergence("constant", &[2.0, 2.0, 5.0], &[8, 16, 32], &s).unwrap();
        assert!(rep.passed);
        for row in &rep.series {
            assert!(row.columns[0] < 1e-12);
        }
    }

    #[test]
    fn fixtures_at_one_half() {
        let rep = run_fixtures(&[0.5], &Settings::default()).unwrap();
        assert!(rep.passed, "{:?}", rep.residuals);
    }

    #[test]
    fn smooth_spin_rotation() {
        let path = named_path("spin-rotation", &[2.0 * PI]).unwrap();
        let s = Settings { steps: 128, ..Settings::default() };
        let rep = run_smooth(&*path, "spin-rotation", &s).unwrap();
        assert!(rep.passed, "{:?}", rep.residuals);
        let crate::report::Scalar::Complex([re, im]) = rep.scalars["holonomy[0][0]"] else { panic!() };
        assert!((re + 1.0).abs() < 1e-9 && im.abs() < 1e-9);
    }
}
