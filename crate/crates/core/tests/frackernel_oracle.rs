//! Weights and derivatives checked against values frozen from a 40-digit
//! reference evaluation, an independent gamma implementation, and the
//! closed forms of the telescoping sums.

use proptest::prelude::*;
use statrs::function::gamma::gamma as statrs_gamma;
use thicken_core::frackernel::{frac_deriv, gamma, weight_p0, FracWeights, VelocityHistory};
use thicken_core::Vector;

const ORDERS: [f64; 3] = [0.2, 0.5, 0.8];
const LAGS: [u64; 7] = [1, 2, 3, 10, 100, 1000, 10000];

/// Interior weight of lag k, rows by order.
const INTERIOR: [[f64; 7]; 3] = [
    [
        1.4822022531844965565,
        1.2602695494730830258,
        1.1585866735835289376,
        0.90876071986425872357,
        0.57327547217259395957,
        0.36171165337161415638,
        0.22822461976004526592,
    ],
    [
        0.8284271247461900976,
        0.53929817321425168538,
        0.43612227933292633644,
        0.23731949054181170029,
        0.075000468763672479281,
        0.023717083933580930537,
        0.0075000000046875000137,
    ],
    [
        0.2973967099940700136,
        0.14239939885841195071,
        0.10104271539254309529,
        0.038083244239925381008,
        0.0060285997805180885806,
        0.00095545732398329918553,
        0.00015142976285696209572,
    ],
];

/// Weight of the first sample at step n, rows by order.
const FIRST: [[f64; 7]; 3] = [
    [
        0.8,
        0.65177977468155034435,
        0.592332630847666101,
        0.45741296578174783755,
        0.28682883005065041173,
        0.18086788374226985593,
        0.11411307062875601848,
    ],
    [
        0.5,
        0.2928932188134524756,
        0.23035091339287415731,
        0.12063988856877567801,
        0.037562735553755187135,
        0.011860518390698650058,
        0.0037500625023438671943,
    ],
    [
        0.2,
        0.081041316002371994561,
        0.055081018686138826857,
        0.019550071580438398682,
        0.0030223381294071940927,
        0.00047785605631833008806,
        0.000075716900491988472518,
    ],
];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn interior_weights_match_reference() {
    for (row, &q) in ORDERS.iter().enumerate() {
        let w = FracWeights::new(q, 10_000, 0.01).unwrap();
        for (col, &k) in LAGS.iter().enumerate() {
            let got = w.interior()[k as usize];
            assert!(rel(got, INTERIOR[row][col]) < 1e-12, "q={q} k={k}: {got}");
        }
    }
}

#[test]
fn first_sample_weights_match_reference() {
    for (row, &q) in ORDERS.iter().enumerate() {
        for (col, &n) in LAGS.iter().enumerate() {
            let got = weight_p0(q, n);
            assert!(rel(got, FIRST[row][col]) < 1e-12, "q={q} n={n}: {got}");
        }
    }
}

#[test]
fn gamma_matches_independent_implementation() {
    for i in 1..400 {
        let x = 0.05 + i as f64 * 0.0125;
        let ours = gamma(x);
        let theirs = statrs_gamma(x);
        assert!(rel(ours, theirs) < 1e-13, "x={x}: {ours} vs {theirs}");
    }
    assert!(rel(gamma(2.5), 1.3293403881791370205) < 5e-15);
    assert!(rel(gamma(1.5), 0.88622692545275801365) < 5e-15);
    assert!(rel(gamma(2.8), 1.676490787764436858) < 5e-15);
    assert!(rel(gamma(2.2), 1.1018024908797127328) < 5e-15);
}

#[test]
fn prefactor_at_default_step() {
    let w = FracWeights::new(0.5, 100, 0.01).unwrap();
    assert!(rel(w.prefactor(), 0.075225277806367505) < 1e-14);
}

#[test]
fn full_history_sum_telescopes() {
    for &q in &ORDERS {
        let w = FracWeights::new(q, 10_000, 0.01).unwrap();
        for n in [1u64, 2, 5, 37, 100, 999, 4096, 10_000] {
            let expected = (2.0 - q) * (n as f64).powf(1.0 - q);
            assert!(rel(w.window_sum(n), expected) < 1e-12, "q={q} n={n}");
        }
    }
}

#[test]
fn steady_window_sum_telescopes() {
    for &q in &ORDERS {
        for d in [1usize, 7, 50, 100, 500] {
            let w = FracWeights::new(q, d, 0.01).unwrap();
            let a = 2.0 - q;
            let expected = (d as f64 + 1.0).powf(a) - (d as f64).powf(a);
            for n in [d as u64 + 1, d as u64 + 2, 10 * d as u64 + 3] {
                assert!(rel(w.window_sum(n), expected) < 1e-12, "q={q} d={d} n={n}");
            }
        }
    }
    let w = FracWeights::new(0.5, 100, 0.01).unwrap();
    assert!(rel(w.window_sum(101), 15.037437733209917) < 1e-13);
}

#[test]
fn constant_velocity_is_exact() {
    for &q in &ORDERS {
        let dt = 0.01;
        let n = 10_000u64;
        let w = FracWeights::new(q, n as usize, dt).unwrap();
        let v = Vector::<3>::new(0.6, -0.8, 0.0);
        let mut h = VelocityHistory::new(n as usize);
        for step in 0..=n {
            h.push(v);
            if [1, 10, 100, 1000, 10_000].contains(&step) {
                let t = step as f64 * dt;
                let expected = t.powf(1.0 - q) / statrs_gamma(2.0 - q);
                let got = frac_deriv(&h, &w, step).norm();
                assert!(rel(got, expected) < 1e-9, "q={q} n={step}: {got} vs {expected}");
            }
        }
    }
}

#[test]
fn unit_time_half_order() {
    let w = FracWeights::new(0.5, 100, 0.01).unwrap();
    let mut h = VelocityHistory::<3>::new(100);
    for _ in 0..=100 {
        h.push(Vector::<3>::new(1.0, 0.0, 0.0));
    }
    assert!(rel(frac_deriv(&h, &w, 100).x, 1.1283791670955126) < 1e-12);
}

#[test]
fn steady_window_plateau() {
    let w = FracWeights::new(0.5, 100, 0.01).unwrap();
    let mut h = VelocityHistory::<1>::new(100);
    for n in 0..400u64 {
        h.push(Vector::<1>::new(2.0));
        let s = frac_deriv(&h, &w, n).x;
        if n > 100 {
            assert!(rel(s, 2.0 * 1.1311954309766692) < 1e-12, "n={n}: {s}");
        }
    }
}

proptest! {
    #[test]
    fn interior_weights_positive_and_decreasing(q in 0.01f64..0.99, k in 1u64..50_000) {
        let w = FracWeights::new(q, k as usize + 1, 0.01).unwrap();
        let i = w.interior();
        prop_assert!(i[k as usize] > 0.0);
        prop_assert!(i[k as usize + 1] < i[k as usize]);
    }

    #[test]
    fn frac_deriv_is_linear(
        q in 0.05f64..0.95,
        d in 0usize..64,
        vs in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..120),
        c in -3.0f64..3.0,
    ) {
        let w = FracWeights::new(q, d, 0.01).unwrap();
        let mut a = VelocityHistory::<2>::new(d);
        let mut b = VelocityHistory::<2>::new(d);
        for (n, &(x, y)) in vs.iter().enumerate() {
            let v = Vector::<2>::new(x, y);
            a.push(v);
            b.push(v * c);
            let da = frac_deriv(&a, &w, n as u64) * c;
            let db = frac_deriv(&b, &w, n as u64);
            prop_assert!((da - db).norm() <= 1e-12 * (1.0 + da.norm()));
        }
    }

    #[test]
    fn history_length_is_bounded(d in 0usize..40, pushes in 0usize..120) {
        let mut h = VelocityHistory::<1>::new(d);
        for p in 0..pushes {
            h.push(Vector::<1>::new(p as f64));
        }
        prop_assert_eq!(h.len(), pushes.min(d + 1));
        if pushes > 0 {
            prop_assert_eq!(h.newest().unwrap().x, (pushes - 1) as f64);
            prop_assert_eq!(h.iter().next().unwrap().x, (pushes - h.len()) as f64);
        }
    }
}
