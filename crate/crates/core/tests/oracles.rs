mod common;

use fsps_core::metrics::stat_residual;
use fsps_core::problems::sharp_ratio::make_sharp_ratio;
use fsps_core::problems::toy::make_toy_recovery;
use fsps_core::solvers::adaptive::adaptive_fsps_run;
use fsps_core::solvers::conceptual::fsps_run;
use fsps_core::solvers::nls::nls_run;
use fsps_core::solvers::{FspsConfig, Start};

#[test]
fn oracle_suite_passes_on_small_runs() {
    let toy = make_toy_recovery();
    let cfg = FspsConfig {
        max_iter: 300,
        ..FspsConfig::default()
    };
    let a = fsps_run(&toy.problem, &cfg, &toy.schedules, &toy.start).unwrap();
    let b = adaptive_fsps_run(&toy.problem, &cfg, &toy.start).unwrap();
    let sr = make_sharp_ratio(20, 4, 6, 3).unwrap();
    let c = nls_run(&sr.problem, &cfg, &Start::at(vec![0.05; 20])).unwrap();
    let failures = common::oracle_suite(&[&a.trace, &b.trace, &c.trace]);
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn grid_oracle_reproduces_the_augmented_reflected_example() {
    use fsps_core::function::{prox, LInfNorm, QuadraticAugmented, Reflected};
    use std::sync::Arc;
    let g = QuadraticAugmented {
        inner: Arc::new(Reflected {
            inner: Arc::new(LInfNorm),
            r: vec![1.0, 1.0],
        }),
        s: 0.01,
    };
    let p = prox(&g, &[0.3, 0.2], 1.0).unwrap();
    let want = common::grid_prox(&g, &[0.3, 0.2], 1.0);
    assert!((p[0] - want[0]).abs() <= 2e-3 && (p[1] - want[1]).abs() <= 2e-3, "{p:?} vs {want:?}");
}

#[test]
fn simplex_oracle_examples() {
    assert_eq!(common::simplex_oracle(&[0.3, 0.7]), vec![0.3, 0.7]);
    let p = common::simplex_oracle(&[1.0, 0.5, 0.5]);
    assert!((p[0] - 2.0 / 3.0).abs() < 1e-15 && (p[1] - 1.0 / 6.0).abs() < 1e-15);
}

#[test]
fn norm_estimates_bound_sampled_gains() {
    use fsps_core::operator::Operator;
    use fsps_core::problems::ct::{discrete_gradient, parallel_beam_projector};
    let mut r = common::rng(1);
    let ops = vec![
        Operator::dense(6, 4, common::random_vec(&mut r, 24, -1.0, 1.0)).unwrap(),
        discrete_gradient(8).unwrap(),
        parallel_beam_projector(12, &[0.0, 30.0, 60.0, 90.0], 21).unwrap(),
    ];
    for op in &ops {
        assert!(common::norm_bound_excess(op, 200, 2) <= 0.0);
    }
}

#[test]
fn stat_matches_the_quotient_rule_at_smooth_points() {
    let p = common::quadratic_over_norm(7);
    for x in common::smooth_points(&p, 20, 8) {
        let got = stat_residual(&p, &x).unwrap();
        let want = common::fd_stationarity(&p, &x);
        assert!(!got.upper_bound);
        assert!((got.value - want).abs() <= 1e-4 * want, "x={x:?}: {} vs {want}", got.value);
    }
}
