use std::f64::consts::{FRAC_PI_2, PI};

use nodal_core::asymptotics::{delta_asymptotic, mu_zero, node_series, psi_asymptotic, Mode};
use nodal_core::forward::{
    delta, eigenvalue_near, integral_residual, integrate, nodal_set, spectrum,
};
use nodal_core::numerics::loglog_slope;
use nodal_core::{validate_config, PotentialSpec, ProblemConfig, RawConfig, SolverOptions};

fn d() -> ProblemConfig {
    validate_config(&RawConfig::new(
        1.0,
        0.5,
        2.0,
        2.0,
        PotentialSpec::cos(-1.0),
    ))
    .unwrap()
}

fn t() -> ProblemConfig {
    validate_config(&RawConfig::new(1.0, 1.0, 1.0, 0.0, PotentialSpec::Zero)).unwrap()
}

fn fixed(steps: usize) -> SolverOptions {
    SolverOptions {
        steps_per_half: steps,
        max_phase_step: 0.0,
    }
}

/// Plain RK4 written out separately from the library, with the jump
/// applied between the halves; returns `psi(pi)`.
fn oracle_endpoint(
    theta: f64,
    sigma: f64,
    mass: f64,
    v: impl Fn(f64) -> f64,
    mu: f64,
    steps: usize,
) -> [f64; 2] {
    let f = |x: f64, y: [f64; 2]| {
        let (p, q) = (v(x) + mass, v(x) - mass);
        [(q - mu) * y[1], (mu - p) * y[0]]
    };
    let h = FRAC_PI_2 / steps as f64;
    let mut y = [theta.cos(), -theta.sin()];
    let mut x = 0.0;
    for half in 0..2 {
        for _ in 0..steps {
            let k1 = f(x, y);
            let k2 = f(
                x + h / 2.0,
                [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]],
            );
            let k3 = f(
                x + h / 2.0,
                [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]],
            );
            let k4 = f(x + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
            for i in 0..2 {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            x += h;
        }
        if half == 0 {
            y = [sigma * y[0], y[1] / sigma];
            x = FRAC_PI_2;
        }
    }
    y
}

fn oracle_delta_d(mu: f64) -> f64 {
    let y = oracle_endpoint(1.0, 2.0, 2.0, |x| -x.cos(), mu, 50_000);
    0.5f64.sin() * y[0] + 0.5f64.cos() * y[1]
}

#[test]
fn free_solution_matches_closed_form() {
    let traj = integrate(&t(), 3.0, &SolverOptions::default()).unwrap();
    for (x, y) in traj.grid.iter().zip(&traj.values) {
        assert!((y.y1 - (3.0 * x - 1.0).cos()).abs() < 1e-9);
        assert!((y.y2 - (3.0 * x - 1.0).sin()).abs() < 1e-9);
    }
}

#[test]
fn step_halving_order_is_four() {
    let c = d();
    let psi = |n| integrate(&c, 5.0, &fixed(n)).unwrap().at_pi().y1;
    let (a, b, e) = (psi(64), psi(128), psi(256));
    let order = ((a - b) / (b - e)).abs().log2();
    assert!(order >= 3.8, "observed order {order}");
}

#[test]
fn richardson_self_consistency_at_mu_5() {
    let c = d();
    let coarse = integrate(&c, 5.0, &SolverOptions::default())
        .unwrap()
        .at_pi()
        .y1;
    let fine = integrate(&c, 5.0, &SolverOptions::with_steps(8192))
        .unwrap()
        .at_pi()
        .y1;
    assert!((coarse - fine).abs() < 1e-8);
}

#[test]
fn delta_agrees_with_independent_integrator() {
    let c = d();
    for mu in [1.0, 4.25, 8.25, 17.3] {
        let got = delta(&c, mu, &SolverOptions::default()).unwrap();
        let want = oracle_delta_d(mu);
        assert!((got - want).abs() < 1e-8, "mu = {mu}: {got} vs {want}");
    }
}

#[test]
fn delta_sign_change_brackets_fourth_eigenvalue() {
    // mu_4^0 = 4.252 but the root sits 0.38 higher; [4.25, 4.45] holds none.
    let c = d();
    let o = SolverOptions::default();
    let lib = |mu| delta(&c, mu, &o).unwrap();
    assert!(lib(4.25) * lib(4.45) > 0.0);
    assert!(oracle_delta_d(4.25) * oracle_delta_d(4.45) > 0.0);
    assert!(lib(4.45) * lib(4.75) < 0.0);
    assert!(oracle_delta_d(4.45) * oracle_delta_d(4.75) < 0.0);
    let mu4 = eigenvalue_near(&c, 4, &o).unwrap();
    assert!(mu4 > 4.45 && mu4 < 4.75);
}

#[test]
fn eighth_eigenvalue_matches_oracle_root() {
    let c = d();
    let mu = eigenvalue_near(&c, 8, &SolverOptions::default()).unwrap();
    assert!((mu_zero(&c, 8) - 8.252031).abs() < 1e-6);
    assert!((mu - 8.252031).abs() < 0.5);
    let (mut lo, mut hi) = (mu - 0.05, mu + 0.05);
    let flo = oracle_delta_d(lo);
    assert!(flo * oracle_delta_d(hi) < 0.0);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if oracle_delta_d(mid) * flo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!(
        (mu - 0.5 * (lo + hi)).abs() < 1e-8,
        "{mu} vs {}",
        0.5 * (lo + hi)
    );
}

#[test]
fn spectrum_is_increasing_and_anchored() {
    let c = d();
    let s = spectrum(&c, 30, &SolverOptions::default()).unwrap();
    assert_eq!(s.len(), 30);
    assert!(s.windows(2).all(|w| w[0].1 < w[1].1));
    for (n, mu) in s {
        let scaled = n as f64 * (mu - mu_zero(&c, n)).abs();
        assert!(scaled < 4.0, "n = {n}: n |mu - mu0| = {scaled}");
    }
}

#[test]
fn node_counts_equal_index() {
    let e = validate_config(&RawConfig::new(
        0.7,
        1.2,
        0.6,
        -1.0,
        PotentialSpec::Poly {
            coefficients: vec![0.3, -0.5, 0.2],
        },
    ))
    .unwrap();
    for c in [d(), t(), e] {
        for n in 1..=40 {
            let s = nodal_set(&c, n, &SolverOptions::default()).unwrap();
            assert_eq!(s.nodes.len(), n as usize);
            assert!(s.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(s.nodes[0] > 0.0 && s.nodes[n as usize - 1] < PI);
        }
    }
}

#[test]
fn tenth_nodes_stable_under_step_halving() {
    let c = d();
    let a = nodal_set(&c, 10, &SolverOptions::default()).unwrap();
    let b = nodal_set(&c, 10, &SolverOptions::with_steps(8192)).unwrap();
    assert_eq!(a.nodes.len(), 10);
    for (x, y) in a.nodes.iter().zip(&b.nodes) {
        assert!((x - y).abs() < 1e-8);
    }
}

#[test]
fn integral_equation_residuals() {
    let c = d();
    for (mu, tol) in [(5.0, 1e-6), (20.0, 1e-5)] {
        let r = integral_residual(&c, &integrate(&c, mu, &SolverOptions::default()).unwrap());
        assert!(r.max() <= tol, "mu = {mu}: {r:?}");
    }
}

#[test]
fn psi_expansion_error_decays_like_inverse_mu() {
    let c = d();
    let mus = [30.0, 60.0, 120.0, 240.0];
    let errs: Vec<f64> = mus
        .iter()
        .map(|&mu| {
            let traj = integrate(&c, mu, &SolverOptions::default()).unwrap();
            let k = traj.grid.iter().position(|&x| x >= 2.0).unwrap();
            let a = psi_asymptotic(&c, traj.grid[k], mu);
            (a.y1 - traj.values[k].y1)
                .abs()
                .max((a.y2 - traj.values[k].y2).abs())
        })
        .collect();
    let cst = mus
        .iter()
        .zip(&errs)
        .map(|(m, e)| m * e)
        .fold(0.0, f64::max);
    assert!(cst < 10.0, "C = {cst}");
    let slope = loglog_slope(&mus, &errs).unwrap();
    assert!(slope <= -0.8, "slope {slope}");
}

#[test]
fn delta_expansion_error_bounded_by_c_over_mu() {
    let c = d();
    let o = SolverOptions::default();
    let sweep: Vec<f64> = (0..40).map(|k| 20.0 + 4.5 * k as f64).collect();
    let cst = sweep
        .iter()
        .map(|&mu| mu * (delta(&c, mu, &o).unwrap() - delta_asymptotic(&c, mu)).abs())
        .fold(0.0, f64::max);
    let at = (delta(&c, 50.3, &o).unwrap() - delta_asymptotic(&c, 50.3)).abs();
    assert!(cst < 5.0);
    assert!(at <= cst / 50.0, "{at} vs C = {cst}");
}

#[test]
fn paper_mode_series_offset_on_free_config() {
    // For V = 0, m = 0, sigma = 1 the paper-mode series misses the nodes by
    // (cot theta - (pi/2 - theta)) / n exactly.
    let c = t();
    let n = 64;
    let s = nodal_set(&c, n, &SolverOptions::default()).unwrap();
    let want = (1.0f64 / 1.0f64.tan() - (FRAC_PI_2 - 1.0)) / n as f64;
    for (r, z) in s.nodes.iter().enumerate() {
        let j = r as i64 + 1;
        let paper = node_series(&c, n, j, Mode::Paper).unwrap();
        let consistent = node_series(&c, n, j, Mode::Consistent).unwrap();
        assert!((z - paper - want).abs() < 1e-6, "j = {j}");
        assert!((z - consistent).abs() < 1e-9, "j = {j}");
    }
}
