use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use nodal_core::forward::nodal_set;
use nodal_core::inverse::{
    estimate_phi, index_nodes, reconstruct, FitOptions, ReconstructionOptions,
};
use nodal_core::pipeline::{even_range, forward_dataset};
use nodal_core::{
    validate_config, Mode, NodalDataset, PotentialSpec, ProblemConfig, RawConfig,
    ReconstructionResult, SolverOptions,
};

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

const N_MAX: i64 = 256;

fn d_data() -> &'static NodalDataset {
    static DATA: OnceLock<NodalDataset> = OnceLock::new();
    DATA.get_or_init(|| {
        forward_dataset(&d(), &even_range(8, N_MAX), &SolverOptions::default()).unwrap()
    })
}

fn d_full() -> &'static ReconstructionResult {
    static R: OnceLock<ReconstructionResult> = OnceLock::new();
    R.get_or_init(|| {
        reconstruct(
            d_data(),
            Mode::Consistent,
            &ReconstructionOptions::default(),
        )
        .unwrap()
    })
}

/// `V_hat` as a table on `[0, pi]`, with the excluded edges filled by
/// linear extrapolation of the nearest two samples.
fn table_from(r: &ReconstructionResult) -> PotentialSpec {
    let mut pts: Vec<[f64; 2]> = r.v_hat.iter().map(|(x, v)| [*x, *v]).collect();
    let k = pts.len() / 2;
    let ext = |a: [f64; 2], b: [f64; 2], x: f64| a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0]);
    let start = [0.0, ext(pts[0], pts[1], 0.0)];
    let end = [PI, ext(pts[2 * k - 2], pts[2 * k - 1], PI)];
    let mid = [
        FRAC_PI_2,
        0.5 * (ext(pts[k - 2], pts[k - 1], FRAC_PI_2) + ext(pts[k], pts[k + 1], FRAC_PI_2)),
    ];
    pts.insert(k, mid);
    pts.insert(0, start);
    pts.push(end);
    PotentialSpec::Table { points: pts }
}

/// Largest node discrepancy at `N_MAX` between the input data and the
/// forward solution of the reconstructed problem (true `beta`, `sigma`).
fn closed_loop_error(r: &ReconstructionResult) -> f64 {
    let rebuilt = validate_config(&RawConfig::new(
        r.theta_hat,
        0.5,
        2.0,
        r.m_hat,
        table_from(r),
    ))
    .unwrap();
    let again = nodal_set(&rebuilt, N_MAX, &SolverOptions::default()).unwrap();
    let input = d_data().entries.iter().find(|e| e.n == N_MAX).unwrap();
    again
        .nodes
        .iter()
        .zip(&input.nodes)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

#[test]
fn free_config_limits_are_exact() {
    let c = t();
    let data = forward_dataset(&c, &even_range(8, 64), &SolverOptions::default()).unwrap();
    let cal = index_nodes(&data).unwrap();
    assert_eq!(cal.shift_delta, 1);
    let phi = estimate_phi(&cal, 1.0, &FitOptions::default()).unwrap();
    assert!((phi.value - (1.0 - FRAC_PI_2)).abs() < 1e-6, "{phi:?}");

    let r = reconstruct(&data, Mode::Consistent, &ReconstructionOptions::default()).unwrap();
    assert!((r.theta_hat - 1.0).abs() < 1e-6, "{}", r.theta_hat);
    assert!(r.c_hat.abs() < 1e-6, "{}", r.c_hat);
    assert!(r.m_hat.abs() < 1e-3, "{}", r.m_hat);
    assert!(
        r.potential_error(|_| 0.0) < 1e-5,
        "{}",
        r.potential_error(|_| 0.0)
    );
    for e in &r.diagnostics.psi {
        assert!(e.value.abs() <= 2.0 * e.stderr + 1e-4, "{e:?}");
    }
}

#[test]
fn potential_error_decreases_with_n_max() {
    let errs: Vec<f64> = [32, 64, 128, 256]
        .iter()
        .map(|&m| {
            reconstruct(
                &d_data().truncated(m),
                Mode::Consistent,
                &ReconstructionOptions::default(),
            )
            .unwrap()
            .potential_error(|x| -x.cos())
        })
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(errs[3] < 5e-3);
}

#[test]
fn reconstruction_of_d_is_close() {
    let r = d_full();
    let c = d();
    assert!((r.theta_hat - 1.0).abs() < 1e-3, "{}", r.theta_hat);
    assert!(
        (r.c_hat - c.jump().c_even).abs() < 1e-4,
        "{} vs {}",
        r.c_hat,
        c.jump().c_even
    );
    assert!((r.m_hat - 2.0).abs() < 1e-2, "{}", r.m_hat);
    assert!(r.potential_error(|x| -x.cos()) < 5e-3);
}

#[test]
fn closed_loop_within_reconstruction_bias() {
    // A first-order error e in Phi moves the nodes by e / n. Phi_hat picks up
    // |theta_hat - theta| at the origin and up to pi sup|V_hat - V| through rho.
    let r = d_full();
    let err = closed_loop_error(r);
    let budget = ((r.theta_hat - 1.0).abs() + PI * r.potential_error(|x| -x.cos())) / N_MAX as f64;
    assert!(
        err <= 2.0 * budget,
        "closed-loop {err:.3e}, budget {budget:.3e}"
    );
}

#[test]
#[ignore = "fit stderr excludes the smoothing and edge-extrapolation bias of V_hat; misses by ~200x"]
fn closed_loop_within_fit_stderr() {
    let r = d_full();
    let stderr = r
        .diagnostics
        .phi
        .iter()
        .map(|e| e.stderr)
        .fold(0.0, f64::max);
    let err = closed_loop_error(r);
    assert!(
        err <= 5.0 * stderr / N_MAX as f64,
        "closed-loop {err:.3e}, stderr {stderr:.3e}"
    );
}
