//! Rate function at the universal point, where every mode is critical.

use std::f64::consts::FRAC_PI_2;

use squeezed_dqpt::dqpt::{
    critical_momenta, critical_times, rate_function, CriticalTime, RateOptions,
};
use squeezed_dqpt::model::MomentumGrid;
use squeezed_dqpt::numeric::linspace;
use squeezed_dqpt::quench::QuenchSpec;
use squeezed_dqpt::squeeze::SqueezeSpec;

fn window() -> (QuenchSpec, f64, f64) {
    let q = QuenchSpec::ising(0.8, 0.2);
    let ex = q.post.energy_extrema();
    (q, FRAC_PI_2 / ex.max, FRAC_PI_2 / ex.min)
}

#[test]
fn window_edges_match_critical_times() {
    let (q, t_min, t_max) = window();
    let cs = critical_times(&critical_momenta(&q, &SqueezeSpec::universal()), &q, 0).unwrap();
    assert!(cs.all_modes_critical);
    match cs.times[0] {
        CriticalTime::Window {
            t_min: a, t_max: b, ..
        } => {
            assert!((a - t_min).abs() < 1e-12 && (b - t_max).abs() < 1e-12);
        }
        other => panic!("expected a window, got {other:?}"),
    }
}

#[test]
fn lower_edge_is_the_dominant_peak() {
    let (q, t_min, t_max) = window();
    let times = linspace(0.0, 1.2 * t_max, 4001);
    let grid = MomentumGrid::new(40_000).unwrap();
    let series = rate_function(
        &q,
        &SqueezeSpec::universal(),
        &grid,
        &times,
        &RateOptions::default(),
    )
    .unwrap();
    let top = series.dominant_peaks(1);
    assert!((top[0].time - t_min).abs() <= 2.0 * times[1]);
}

#[test]
fn upper_edge_is_a_one_sided_kink() {
    let (q, _, t_max) = window();
    let grid = MomentumGrid::new(40_000).unwrap();
    let h = 2e-3;
    let times: Vec<f64> = [-2.0, -1.0, 1.0, 2.0]
        .iter()
        .map(|x| t_max + x * h)
        .collect();
    let v = rate_function(
        &q,
        &SqueezeSpec::universal(),
        &grid,
        &times,
        &RateOptions::default(),
    )
    .unwrap()
    .values;
    let left = (v[1] - v[0]) / h;
    let right = (v[3] - v[2]) / h;
    // the rate keeps falling through t_max, so there is no maximum there
    assert!(left < 0.0 && right < 0.0);
    assert!(
        right.abs() > 10.0 * left.abs(),
        "left slope {left}, right slope {right}"
    );
}
