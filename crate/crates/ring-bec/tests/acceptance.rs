//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured values (visible with `--nocapture`).
//!
//! Criteria 5, 6, 7 and 10 share one multiplier sweep over the canonical
//! small-mass family; it runs once and is reused across those tests.

use ring_bec::audit;
use ring_bec::cli::{self, CommandKind};
use ring_bec::config::RunConfig;
use ring_bec::coupling::CouplingParams;
use ring_bec::field::FieldPair;
use ring_bec::grid::{GridConfig, RadialGrid};
use ring_bec::landscape::Landscape;
use ring_bec::normalize::{self, NormalizeConfig};
use ring_bec::potential::PotentialPair;
use ring_bec::profile::{ProfileConstants, ScalarProfile};
use ring_bec::solver::{Geometry, SolveConfig, System};
use ring_bec::sweep::{run_sweep, SweepConfig, SweepResult};
use std::sync::OnceLock;
use std::time::Instant;

fn canonical_coupling() -> CouplingParams {
    // alpha = gamma = 1, beta = 2e4 - 1, so the mass parameter is 1e-4
    CouplingParams::new(1.0, 1.0, 19999.0).unwrap()
}

fn shared_sweep() -> &'static SweepResult {
    static SWEEP: OnceLock<SweepResult> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let constants = ProfileConstants::compute(20.0, 1e-3);
        run_sweep(
            &canonical_coupling(),
            &PotentialPair::sin_sin(),
            &[50.0, 100.0, 200.0, 400.0],
            &constants,
            &SweepConfig::default(),
        )
        .expect("sweep over the canonical family")
    })
}

#[test]
fn criterion_01_profile_constants() {
    let start = Instant::now();
    let constants = ProfileConstants::compute(20.0, 1e-3);
    let (chain_quartic, chain_kinetic) = constants.identity_residuals();
    let profile = ScalarProfile::solve(1e-6).expect("shooting profile");
    let sup = profile.sup_error_vs_exact();
    let elapsed = start.elapsed();
    assert!(chain_quartic <= 1e-8, "3 i4 vs 4 i2 residual {chain_quartic}");
    assert!(chain_kinetic <= 1e-8, "4 i2 vs 12 a residual {chain_kinetic}");
    assert!(sup <= 1e-6, "shooting sup error {sup}");
    assert!(elapsed.as_secs_f64() < 1.0, "runtime {elapsed:?}");
    println!(
        "criterion 1 (profile constants): PASS - chain residuals ({chain_quartic:.2e}, \
         {chain_kinetic:.2e}), shooting sup error {sup:.2e}, runtime {elapsed:?}"
    );
}

#[test]
fn criterion_02_line_mode_exactness() {
    let start = Instant::now();
    // an arbitrary admissible coupling; constant potentials in line geometry
    let coupling = CouplingParams::new(1.0, 2.0, 0.5).unwrap();
    let sys = System::new(coupling, PotentialPair::zero(), 1.0, Geometry::Line);
    let grid = RadialGrid::with_extent(40.0, 4000);
    let clean = sys.ansatz(20.0, &grid);
    let reference = sys
        .newton(clean.clone(), &grid, &SolveConfig::default())
        .unwrap();

    // 1% multiplicative perturbation, orthogonal to the translation mode
    // that constant potentials leave free
    let tangent = sys.ansatz_tangent(20.0, &grid);
    let dot = |a: &FieldPair, b: &FieldPair| -> f64 {
        a.u.iter().zip(b.u.iter()).map(|(x, y)| x * y).sum::<f64>()
            + a.v.iter().zip(b.v.iter()).map(|(x, y)| x * y).sum::<f64>()
    };
    let mut noise = clean.clone();
    for (i, x) in noise.u.iter_mut().enumerate() {
        *x *= 0.01 * ((i as f64) * 0.61).sin();
    }
    for (i, x) in noise.v.iter_mut().enumerate() {
        *x *= 0.01 * ((i as f64) * 1.07).cos();
    }
    let mut perturbed = clean;
    perturbed.axpy(1.0, &noise);
    perturbed.axpy(-dot(&noise, &tangent) / dot(&tangent, &tangent), &tangent);

    let bundle = sys
        .newton(perturbed, &grid, &SolveConfig::default())
        .unwrap();
    // the converged state is a translate of the reference; measure the
    // distance to the translation family, aligned to second order in the
    // shift (span of the tangent and its radius derivative)
    let delta = 1e-4;
    let mut curvature = sys.ansatz_tangent(20.0 + delta, &grid);
    curvature.axpy(-1.0, &sys.ansatz_tangent(20.0 - delta, &grid));
    curvature.scale(1.0 / (2.0 * delta));
    let diff = bundle.fields.minus(&reference.fields);
    let (tt, tc, cc) = (
        dot(&tangent, &tangent),
        dot(&tangent, &curvature),
        dot(&curvature, &curvature),
    );
    let (dt, dc) = (dot(&diff, &tangent), dot(&diff, &curvature));
    let det = tt * cc - tc * tc;
    let a = (dt * cc - dc * tc) / det;
    let b = (dc * tt - dt * tc) / det;
    let mut aligned = diff;
    aligned.axpy(-a, &tangent);
    aligned.axpy(-b, &curvature);
    let rel = aligned.norm2() / reference.fields.norm2();
    let elapsed = start.elapsed();
    assert!(rel <= 1e-8, "relative field error {rel}");
    assert!(bundle.iterations <= 6, "iterations {}", bundle.iterations);
    assert!(elapsed.as_secs_f64() < 1.0, "runtime {elapsed:?}");
    println!(
        "criterion 2 (line-mode exactness): PASS - field error {rel:.2e} in {} iterations, \
         runtime {elapsed:?}",
        bundle.iterations
    );
}

#[test]
fn criterion_03_jacobian_consistency() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    let n = 512;
    let grid = RadialGrid::with_extent(16.0, n);
    let sys = System::new(
        CouplingParams::new(1.5, 1.0, 0.5).unwrap(),
        PotentialPair::sin_sin(),
        3.0,
        Geometry::Radial,
    );
    let fields = FieldPair {
        u: grid.nodes().map(|r| 0.8 * (0.4 * r).sin() + 1.0).collect(),
        v: grid.nodes().map(|r| 0.5 * (0.3 * r).cos() + 0.9).collect(),
    };
    let jac = sys.jacobian(&fields, &grid);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let d = FieldPair {
            u: (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
            v: (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
        };
        let eps = 1e-6;
        let mut xp = fields.clone();
        xp.axpy(eps, &d);
        let mut xm = fields.clone();
        xm.axpy(-eps, &d);
        let fd = sys.residual(&xp, &grid).minus(&sys.residual(&xm, &grid));
        let mut jd = vec![0.0; 2 * n];
        jac.matvec(&d.interleaved(), &mut jd);
        let fdv = fd.interleaved();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..2 * n {
            num += (fdv[i] / (2.0 * eps) - jd[i]).powi(2);
            den += jd[i].powi(2);
        }
        worst = worst.max((num / den).sqrt());
    }
    assert!(worst <= 1e-6, "worst relative error {worst}");
    println!(
        "criterion 3 (jacobian consistency): PASS - worst directional-derivative error \
         {worst:.2e} over 20 directions"
    );
}

#[test]
fn criterion_04_identity_audits_second_order() {
    let coupling = canonical_coupling();
    let pots = PotentialPair::sin_sin();
    let lambda = 100.0;
    let landscape = Landscape::new(pots.clone(), &coupling, lambda);
    let y = landscape.predicted_concentration((0.6, 1.5), 1e-3).unwrap().y;
    let constants = ProfileConstants::compute(20.0, 1e-3);
    let mut energy = Vec::new();
    let mut virial = Vec::new();
    for ppw in [16.0, 32.0, 64.0] {
        let start = Instant::now();
        let grid_cfg = GridConfig {
            points_per_width: ppw,
            ..GridConfig::default()
        };
        let grid = RadialGrid::build(lambda, y, &grid_cfg).unwrap();
        let sys = System::new(coupling, pots.clone(), lambda, Geometry::Radial);
        let bundle =
            ring_bec::reduction::solve_ring(&sys, &grid, y, &SolveConfig::default()).unwrap();
        let report = audit::audit(&bundle, &constants);
        let elapsed = start.elapsed();
        assert!(
            elapsed.as_secs_f64() < 30.0,
            "level ppw={ppw} runtime {elapsed:?}"
        );
        energy.push((grid.h, report.energy_residual));
        virial.push((grid.h, report.virial_residual));
    }
    assert!(energy[0].1 <= 1e-3, "energy residual {}", energy[0].1);
    assert!(virial[0].1 <= 1e-3, "virial residual {}", virial[0].1);
    let orders_energy = audit::refinement_orders(&energy, true);
    let orders_virial = audit::refinement_orders(&virial, true);
    for o in orders_energy.iter().chain(orders_virial.iter()) {
        assert!((o - 2.0).abs() <= 0.3, "observed order {o}");
    }
    println!(
        "criterion 4 (identity audits): PASS - energy {:.2e} / virial {:.2e} at base level, \
         orders {:?} {:?}",
        energy[0].1, virial[0].1, orders_energy, orders_virial
    );
}

#[test]
fn criterion_05_asymptotic_ratios() {
    let start = Instant::now();
    let sweep = shared_sweep();
    let elapsed = start.elapsed();
    let p_last = sweep.points.last().unwrap();
    assert!(
        (p_last.kinetic_ratio - 1.0).abs() <= 0.10,
        "kinetic ratio at 400: {}",
        p_last.kinetic_ratio
    );
    assert!(
        (p_last.quartic_over_kinetic - 4.0).abs() <= 0.40,
        "quartic/kinetic at 400: {}",
        p_last.quartic_over_kinetic
    );
    assert!(
        (p_last.mass_ratio - 1.0).abs() <= 0.15,
        "mass ratio at 400: {}",
        p_last.mass_ratio
    );
    // monotone approach to the targets across the sweep
    for w in sweep.points.windows(2) {
        assert!(
            (w[1].kinetic_ratio - 1.0).abs() <= (w[0].kinetic_ratio - 1.0).abs() + 1e-12,
            "kinetic ratio not monotone: {} -> {}",
            w[0].kinetic_ratio,
            w[1].kinetic_ratio
        );
        assert!(
            (w[1].quartic_over_kinetic - 4.0).abs()
                <= (w[0].quartic_over_kinetic - 4.0).abs() + 1e-12,
            "quartic/kinetic not monotone: {} -> {}",
            w[0].quartic_over_kinetic,
            w[1].quartic_over_kinetic
        );
        assert!(
            (w[1].mass_ratio - 1.0).abs() <= (w[0].mass_ratio - 1.0).abs() + 1e-12,
            "mass ratio not monotone: {} -> {}",
            w[0].mass_ratio,
            w[1].mass_ratio
        );
    }
    assert!(elapsed.as_secs_f64() < 300.0, "sweep runtime {elapsed:?}");
    println!(
        "criterion 5 (asymptotic ratios): PASS - kinetic {:.4}, quartic/kinetic {:.4}, \
         mass {:.4} at lambda = 400, all monotone, sweep in {elapsed:?}",
        p_last.kinetic_ratio, p_last.quartic_over_kinetic, p_last.mass_ratio
    );
}

#[test]
fn criterion_06_concentration_law() {
    let sweep = shared_sweep();
    let slope = sweep.slopes.m_prime_slope;
    assert!(slope <= -0.4, "landscape-slope decay exponent {slope}");
    println!(
        "criterion 6 (concentration law): PASS - log-log slope of |M'(r_peak)| vs lambda \
         = {slope:.3} (<= -0.4)"
    );
}

#[test]
fn criterion_07_reduction_diagnostics() {
    let sweep = shared_sweep();
    let l_slope = sweep.slopes.l_norm_slope;
    assert!(
        (-0.40..=-0.10).contains(&l_slope),
        "defect-norm slope {l_slope}"
    );
    let mut rho_min = f64::INFINITY;
    let mut rho_max: f64 = 0.0;
    for p in &sweep.points {
        assert!(
            p.max_contraction_ratio <= 0.5,
            "contraction ratio {} at lambda {}",
            p.max_contraction_ratio,
            p.lambda
        );
        assert!(
            p.cross_method_distance <= 1e-6,
            "cross-method distance {} at lambda {}",
            p.cross_method_distance,
            p.lambda
        );
        assert!(p.coercivity > 0.0, "coercivity {} at {}", p.coercivity, p.lambda);
        rho_min = rho_min.min(p.coercivity);
        rho_max = rho_max.max(p.coercivity);
    }
    assert!(
        rho_max / rho_min < 2.0,
        "coercivity drift {rho_min} .. {rho_max}"
    );
    println!(
        "criterion 7 (reduction diagnostics): PASS - defect slope {l_slope:.3}, contraction \
         ratios <= {:.1e}, cross-method <= {:.1e}, coercivity in [{rho_min:.4}, {rho_max:.4}]",
        sweep
            .points
            .iter()
            .map(|p| p.max_contraction_ratio)
            .fold(0.0f64, f64::max),
        sweep
            .points
            .iter()
            .map(|p| p.cross_method_distance)
            .fold(0.0f64, f64::max),
    );
}

#[test]
fn criterion_08_normalization() {
    let start = Instant::now();
    let coupling = CouplingParams::from_epsilon(1e-4).unwrap();
    let constants = ProfileConstants::compute(20.0, 1e-3);
    let theta = 0.1;
    let solution = normalize::normalize(
        &coupling,
        &PotentialPair::sin_sin(),
        theta,
        constants.a,
        &NormalizeConfig::default(),
    )
    .unwrap();
    let elapsed = start.elapsed();
    // bracket endpoints recomputed from the formulas
    let (lo, hi) = normalize::multiplier_bracket(1e-4, theta, constants.a);
    assert!((lo - 35.2).abs() < 0.1 && (hi - 96.1).abs() < 0.1, "bracket ({lo}, {hi})");
    assert!(
        solution.mass_error <= 1e-8,
        "mass error {}",
        solution.mass_error
    );
    assert!(
        solution.lambda > lo && solution.lambda < hi,
        "lambda {} outside ({lo}, {hi})",
        solution.lambda
    );
    let offset_bound = solution.lambda.powf(-0.4);
    assert!(
        solution.peak_offset <= offset_bound,
        "peak offset {} > {offset_bound}",
        solution.peak_offset
    );
    let omega_cap = 10.0 * solution.lambda.powf(-0.2);
    assert!(
        solution.omega_norm <= omega_cap,
        "correction norm {} > {omega_cap}",
        solution.omega_norm
    );
    assert!(elapsed.as_secs_f64() < 180.0, "runtime {elapsed:?}");
    println!(
        "criterion 8 (normalization): PASS - lambda {:.4} in ({lo:.2}, {hi:.2}), |mass - 1| \
         = {:.2e}, peak offset {:.2e} (bound {:.2e}), correction norm {:.2e} (cap {:.2e}), \
         runtime {elapsed:?}",
        solution.lambda,
        solution.mass_error,
        solution.peak_offset,
        offset_bound,
        solution.omega_norm,
        omega_cap
    );
}

#[test]
fn criterion_09_necessity_mirror() {
    // zero potentials leave no concentration target: the solve refuses for
    // lack of a radius and the normalization reports no critical point
    let dir = tempfile::tempdir().unwrap();
    let mut config = RunConfig::default();
    config.lambda = Some(50.0);
    config.out_dir = dir.path().join("solve");
    let code_solve = cli::execute(&config, CommandKind::Solve);
    assert_eq!(code_solve, cli::EXIT_CONFIG, "solve exit code {code_solve}");

    let mut config = RunConfig::default();
    config.out_dir = dir.path().join("normalize");
    let code_norm = cli::execute(&config, CommandKind::Normalize);
    assert_eq!(code_norm, cli::EXIT_SOLVER, "normalize exit code {code_norm}");
    println!(
        "criterion 9 (necessity mirror): PASS - flat-potential solve exits {code_solve}, \
         normalize exits {code_norm}"
    );
}

#[test]
fn criterion_10_branch_counting() {
    let sweep = shared_sweep();
    for w in sweep.points.windows(2) {
        assert!(
            w[1].branches >= w[0].branches,
            "branch count decreased: {} at {} -> {} at {}",
            w[0].branches,
            w[0].lambda,
            w[1].branches,
            w[1].lambda
        );
    }
    let counts: Vec<usize> = sweep.points.iter().map(|p| p.branches).collect();
    println!(
        "criterion 10 (branch counting): PASS - counts {counts:?} non-decreasing over \
         proportional windows"
    );
}
