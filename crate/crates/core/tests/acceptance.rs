//! Acceptance battery: one test per criterion, each printing a PASS line
//! with the measured margins (visible with `--nocapture`).
//!
//! Production defaults are n = 4096, R = 40. Sweep-based criteria run at
//! R = 30 with the same n: the rescaled profiles decay like e^{-r}, so the
//! truncation tail (~e^{-30}) sits ten orders below the tightest tolerance
//! here, while the finer spacing buys the Pohozaev margin at the lowest
//! admissible frequencies. Quadrature identities and the classical Pohozaev
//! check need finer grids than production (the midpoint rule's O(h²) origin
//! term); the grids used are stated per criterion.

use std::time::Instant;

use pointnls::{
    asymptotic_dmass, continue_sweep, domega_f0_ratio, linearized_report, mass_curve,
    pointop::{apply_resolvent, chi_alpha},
    selfcheck, solve_classic, solve_ground, GroundState, OperatorParams, Profile, RadialField,
    RadialGrid, StabilityClass, BETA_GUARD,
};

fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect()
}

fn sweep_states(alpha: f64, p: f64, omegas: &[f64], grid: &RadialGrid) -> Vec<GroundState> {
    continue_sweep(alpha, p, omegas, grid)
        .expect("sweep failed")
        .into_iter()
        .map(|pt| pt.state.unwrap_or_else(|e| panic!("omega {} failed: {e}", pt.omega)))
        .collect()
}

#[test]
fn criterion_01_identity_suite() {
    let t0 = Instant::now();
    let lines = selfcheck::run_suite(selfcheck::DEFAULT_N, selfcheck::DEFAULT_R, 0.0).unwrap();
    let elapsed = t0.elapsed().as_secs_f64();
    for l in &lines {
        assert!(l.pass, "{}: error {:.3e} > tol {:.1e}", l.name, l.error, l.tol);
    }
    // pinned tolerances of the criterion
    assert!(lines[0].tol <= 1e-10); // K0 vs oracle
    assert!(lines[1].tol <= 1e-6); // (G_l, G_m) vs quadrature
    assert!(lines[3].tol <= 1e-13); // beta formulas
    assert!(lines[5].tol <= 1e-4); // x·grad G1
    assert!(elapsed < 5.0, "selfcheck took {elapsed:.2} s");
    println!(
        "criterion 01 identity suite: PASS ({} checks, worst-case margins held, {elapsed:.2} s)",
        lines.len()
    );
}

#[test]
fn criterion_02_resolvent_eigenpair() {
    let t0 = Instant::now();
    let params = OperatorParams::new(0.0).unwrap();
    let lambda = 1.0 - params.e_alpha;
    let mut resid = [0.0f64; 2];
    for (k, n) in [4096usize, 8192].iter().enumerate() {
        let grid = RadialGrid::new(*n, 40.0).unwrap();
        let chi = chi_alpha(&params, &grid).unwrap();
        let out = apply_resolvent(&params, lambda, &chi, &grid).unwrap();
        let diff = RadialField {
            values: out.values.iter().zip(&chi.values).map(|(a, b)| a - b).collect(),
        };
        resid[k] = grid.lp_norm(&diff, 2.0).unwrap();
    }
    let elapsed = t0.elapsed().as_secs_f64();
    assert!(resid[0] <= 1e-3, "residual {:.3e}", resid[0]);
    let ratio = resid[0] / resid[1];
    assert!(ratio >= 3.0, "doubling improved only {ratio:.2}x");
    assert!(elapsed < 2.0, "took {elapsed:.2} s");
    println!(
        "criterion 02 resolvent eigenpair: PASS (residual {:.3e}, refinement {ratio:.2}x, {elapsed:.2} s)",
        resid[0]
    );
}

#[test]
fn criterion_03_classical_solver() {
    // u0 reproducibility against the doubled-resolution shooting oracle
    let t0 = Instant::now();
    let g1 = RadialGrid::new(4096, 40.0).unwrap();
    let g2 = RadialGrid::new(8192, 40.0).unwrap();
    let a = solve_classic(3.0, &g1).unwrap();
    let b = solve_classic(3.0, &g2).unwrap();
    assert!((a.u0 - b.u0).abs() <= 1e-4, "u0 drift {:.2e}", (a.u0 - b.u0).abs());
    assert!(a.u0 > 2.2059 && a.u0 < 2.2065);

    // classical Pohozaev at 1e-6 needs h below the production default: the
    // O(h²) midpoint boundary term alone is ~2e-5 at n = 4096
    let fine = RadialGrid::new(65536, 40.0).unwrap();
    let mut worst = 0.0f64;
    for p in [2.0, 3.0, 4.0] {
        let tp = Instant::now();
        let cp = solve_classic(p, &fine).unwrap();
        let lp1 = fine.lp_norm(&cp.u, p + 1.0).unwrap().powf(p + 1.0);
        let resid = (cp.mass - 2.0 / (p + 1.0) * lp1).abs() / cp.mass;
        assert!(resid <= 1e-6, "p={p}: Pohozaev {resid:.3e}");
        worst = worst.max(resid);
        let tsec = tp.elapsed().as_secs_f64();
        assert!(tsec < 5.0, "p={p} took {tsec:.2} s");
    }
    println!(
        "criterion 03 classical solver: PASS (u0 = {:.6}, worst Pohozaev {worst:.3e}, {:.2} s)",
        a.u0,
        t0.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_04_interacting_necessary_conditions() {
    let grid = RadialGrid::new(4096, 30.0).unwrap();
    let omegas = log_grid(10.0, 1e6, 20);
    let mut worst_nehari = 0.0f64;
    let mut worst_poho = 0.0f64;
    for p in [2.0, 3.0, 4.0] {
        let t0 = Instant::now();
        let classic = solve_classic(p, &grid).unwrap();
        let states = sweep_states(0.0, p, &omegas, &grid);
        for gs in &states {
            assert!(gs.converged, "p={p} omega={}", gs.profile.omega);
            assert!(gs.nehari_residual <= 1e-6, "p={p}: Nehari {:.2e}", gs.nehari_residual);
            assert!(
                gs.pohozaev_residual <= 1e-3,
                "p={p} omega={}: Pohozaev {:.2e}",
                gs.profile.omega,
                gs.pohozaev_residual
            );
            let phi = gs.profile.total_field().unwrap();
            assert!(phi.values.iter().all(|v| *v > 0.0));
            assert!(gs.profile.f.values.windows(2).all(|w| w[1] < w[0]));
            assert!(gs.profile.f0 > 0.0);
            assert!(gs.action < classic.action_infty);
            worst_nehari = worst_nehari.max(gs.nehari_residual);
            worst_poho = worst_poho.max(gs.pohozaev_residual);
        }
        let tsec = t0.elapsed().as_secs_f64();
        assert!(tsec < 60.0, "p={p} sweep took {tsec:.1} s");
    }
    println!(
        "criterion 04 interacting necessary conditions: PASS (worst Nehari {worst_nehari:.2e}, worst Pohozaev {worst_poho:.2e})"
    );
}

#[test]
fn criterion_05_rescaled_limit() {
    let grid = RadialGrid::new(4096, 30.0).unwrap();
    let classic = solve_classic(3.0, &grid).unwrap();
    let ncl = classic.mass.sqrt();
    let omegas = log_grid(10.0, 1e6, 6);
    let states = sweep_states(0.0, 3.0, &omegas, &grid);
    let dists: Vec<f64> = states
        .iter()
        .map(|gs| {
            let d2: f64 = gs
                .profile
                .f
                .values
                .iter()
                .zip(&classic.u.values)
                .zip(grid.weights())
                .map(|((a, b), w)| (a - b) * (a - b) * w)
                .sum();
            d2.sqrt() / ncl
        })
        .collect();
    for w in dists.windows(2) {
        assert!(w[1] < w[0], "distances not strictly decreasing: {dists:?}");
    }
    let ratio = dists[0] / dists[dists.len() - 1];
    assert!(ratio >= 2.0, "first/final = {ratio:.3}");
    println!(
        "criterion 05 rescaled limit: PASS (distances {:.4} -> {:.4}, ratio {ratio:.2})",
        dists[0],
        dists[dists.len() - 1]
    );
}

/// Thin a profile onto the half grid and re-evaluate its action there; the
/// Richardson gap |S - S_half|/3 estimates the quadrature error of S.
fn action_quadrature_estimate(gs: &GroundState) -> f64 {
    let grid = &gs.profile.grid;
    let half = RadialGrid::new(grid.n() / 2, grid.r_max()).unwrap();
    let values: Vec<f64> = (0..half.n())
        .map(|j| 0.5 * (gs.profile.f.values[2 * j] + gs.profile.f.values[2 * j + 1]))
        .collect();
    let coarse = Profile {
        grid: half,
        f: RadialField { values },
        f0: gs.profile.f0,
        beta: gs.profile.beta,
        c: gs.profile.c,
        omega: gs.profile.omega,
        p: gs.profile.p,
        alpha: gs.profile.alpha,
    };
    let (s_half, _) = coarse.functional_values().unwrap();
    (gs.action - s_half).abs() / 3.0
}

#[test]
fn criterion_06_action_monotonicity() {
    let grid = RadialGrid::new(4096, 30.0).unwrap();
    let classic = solve_classic(3.0, &grid).unwrap();
    let omegas = log_grid(1e2, 1e6, 40);
    let states = sweep_states(0.0, 3.0, &omegas, &grid);
    let ests: Vec<f64> = states.iter().map(action_quadrature_estimate).collect();
    let mut min_margin = f64::INFINITY;
    for i in 0..states.len() - 1 {
        let gap = states[i + 1].action - states[i].action;
        let bound = 10.0 * ests[i].max(ests[i + 1]);
        assert!(gap > bound, "omega {}: gap {gap:.3e} <= 10x estimate {bound:.3e}", omegas[i]);
        min_margin = min_margin.min(gap / bound);
    }
    for gs in &states {
        assert!(gs.action < classic.action_infty);
    }
    println!(
        "criterion 06 action monotonicity: PASS (min gap/bound {min_margin:.1}, all below d_inf = {:.6})",
        classic.action_infty
    );
}

#[test]
fn criterion_07_stability_signs() {
    let grid = RadialGrid::new(4096, 30.0).unwrap();
    let omegas = log_grid(1e2, 1e6, 40);
    for (p, want) in [
        (2.0, StabilityClass::Stable),
        (3.0, StabilityClass::Stable),
        (4.0, StabilityClass::Unstable),
        (5.0, StabilityClass::Unstable),
    ] {
        let t0 = Instant::now();
        let states = sweep_states(0.0, p, &omegas, &grid);
        let curve = mass_curve(&states).unwrap();
        for (i, c) in curve.classification.iter().enumerate() {
            assert_eq!(*c, want, "p={p} omega={}: got {c}", curve.omegas[i]);
        }
        let tsec = t0.elapsed().as_secs_f64();
        assert!(tsec < 60.0);
    }
    println!("criterion 07 stability signs: PASS (p in {{2,3}} all stable, p in {{4,5}} all unstable, 40 points, none inconclusive)");
}

#[test]
fn criterion_08_supercritical_sign_change() {
    let grid = RadialGrid::new(4096, 30.0).unwrap();
    // bottom at omega = 2: beta = 0.0367, below the 0.05 mark the criterion
    // asks the sweep to reach
    let params = OperatorParams::new(0.0).unwrap();
    assert!(params.beta(2.0).unwrap() < 0.05);
    let omegas = log_grid(2.0, 1e6, 40);
    let states = sweep_states(0.0, 4.0, &omegas, &grid);
    let curve = mass_curve(&states).unwrap();
    assert!(curve.dmass[0] > 0.0, "bottom slope {:.3e}", curve.dmass[0]);
    assert!(
        *curve.dmass.last().unwrap() < 0.0,
        "top slope {:.3e}",
        curve.dmass.last().unwrap()
    );
    let intervals = curve.sign_change_intervals();
    assert_eq!(intervals.len(), 1, "intervals: {intervals:?}");
    println!(
        "criterion 08 supercritical sign change: PASS (crossing in omega = ({:.3}, {:.3}))",
        intervals[0].0, intervals[0].1
    );
}

#[test]
fn criterion_09_asymptotic_expansion() {
    let grid = RadialGrid::new(4096, 30.0).unwrap();
    let omegas = log_grid(1e2, 1e6, 40);
    let mut worst_rel = 0.0f64;
    let mut worst_spread = 0.0f64;
    for p in [2.0, 3.0, 4.0] {
        let states = sweep_states(0.0, p, &omegas, &grid);
        let curve = mass_curve(&states).unwrap();
        for (i, gs) in states.iter().enumerate() {
            if gs.profile.omega < 1e4 {
                continue;
            }
            let asym = asymptotic_dmass(gs);
            let fd = curve.dmass[i];
            if (p - 3.0).abs() > 1e-9 {
                let rel = ((asym - fd) / fd).abs();
                assert!(rel <= 0.2, "p={p} omega={}: asym vs fd off {rel:.3}", gs.profile.omega);
                worst_rel = worst_rel.max(rel);
            } else {
                assert_eq!(asym.signum(), fd.signum(), "p=3 sign mismatch");
            }
        }
        let ratios = domega_f0_ratio(&states).unwrap();
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        let spread = max / min;
        assert!(spread <= 50.0, "p={p}: f0-ratio spread {spread:.1}");
        worst_spread = worst_spread.max(spread);
    }
    println!(
        "criterion 09 asymptotic expansion: PASS (worst asym/fd deviation {worst_rel:.3}, worst f0-ratio spread {worst_spread:.1})"
    );
}

#[test]
fn criterion_10_nondegeneracy_and_coercivity() {
    // regression floor frozen from the first verified run of this artifact:
    // min |eig| = 0.507 over the sweep at n = 1024 (it decreases toward the
    // classical limit), floor set at 0.45
    const FLOOR: f64 = 0.45;
    let grid = RadialGrid::new(1024, 40.0).unwrap();
    let mut min_eig = f64::INFINITY;
    for omega in log_grid(1e2, 1e6, 5) {
        let gs = solve_ground(0.0, 3.0, omega, &grid, None).unwrap();
        let rep = linearized_report(&gs).unwrap();
        assert!(rep.dims == grid.n() + 1);
        assert!(
            rep.smallest_abs_eig >= FLOOR,
            "omega={omega}: |eig| = {:.4} < {FLOOR}",
            rep.smallest_abs_eig
        );
        min_eig = min_eig.min(rep.smallest_abs_eig);
    }
    // coercivity at the smallest admissible beta (nudged one part in 1e9
    // above the guard so the recomputed beta cannot round below it)
    let params = OperatorParams::new(0.0).unwrap();
    let omega_bottom = params.omega_min(BETA_GUARD) * (1.0 + 1e-9);
    let mut min_coerc = f64::INFINITY;
    for p in [2.0, 3.0, 4.0] {
        let gs = solve_ground(0.0, p, omega_bottom, &grid, None).unwrap();
        let rep = linearized_report(&gs).unwrap();
        assert!(rep.coercivity_eig > 0.0, "p={p}: coercivity {:.4}", rep.coercivity_eig);
        min_coerc = min_coerc.min(rep.coercivity_eig);
    }
    println!(
        "criterion 10 nondegeneracy and coercivity: PASS (min |eig| {min_eig:.4} >= {FLOOR}, min coercivity {min_coerc:.4} at beta = {BETA_GUARD})"
    );
}

#[test]
fn criterion_11_performance() {
    let grid = RadialGrid::new(4096, 40.0).unwrap();
    let t0 = Instant::now();
    let gs = solve_ground(0.0, 3.0, 1e4, &grid, None).unwrap();
    let t_solve = t0.elapsed().as_secs_f64();
    assert!(gs.converged);
    assert!(t_solve < 1.0, "single solve took {t_solve:.3} s");

    let omegas = log_grid(1e2, 1e6, 40);
    let t1 = Instant::now();
    let pts = continue_sweep(0.0, 3.0, &omegas, &grid).unwrap();
    let t_sweep = t1.elapsed().as_secs_f64();
    assert_eq!(pts.len(), 40);
    assert!(t_sweep < 60.0, "40-point sweep took {t_sweep:.2} s");
    println!(
        "criterion 11 performance: PASS (single solve {t_solve:.3} s < 1 s, 40-point sweep {t_sweep:.2} s < 60 s)"
    );
}
