mod common;

use proptest::prelude::*;
use radii_lab::series::{
    binom_sqrt_series, binom_sqrt_series_wide, boas_khavinson_series, boas_khavinson_series_wide,
    polylog_neg_half, polylog_neg_half_in, solve_root, Precision,
};

fn assert_encloses(value: f64, tail: f64, truth: f64, slack: f64) {
    assert!(
        (value - truth).abs() <= tail + slack,
        "value {value}, tail {tail}, oracle {truth}"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polylog_matches_direct_sum(r in 0.01f64..0.8) {
        let s = polylog_neg_half(r, 1e-12).unwrap();
        // direct sum far past the point where terms drop below 1e-20
        let n = ((1e-20f64).ln() / r.ln()) as u64 + 200;
        let truth = common::direct_sum(n, |k| (k as f64).sqrt() * r.powi(k as i32));
        assert_encloses(s.value, s.tail_bound, truth, 1e-12 * truth.max(1.0));
        prop_assert!(s.tail_bound <= 1e-12);
    }

    #[test]
    fn binom_series_matches_direct_sum(d in 1u64..40, frac in 0.05f64..0.9) {
        let r = frac / (d as f64).sqrt();
        let s = binom_sqrt_series(d, r, 1e-12).unwrap();
        let truth = common::direct_sum(400, |k| r.powi(k as i32) * common::binom_f64(d + k - 2, k - 1).sqrt());
        assert_encloses(s.value, s.tail_bound, truth, 1e-10 * truth.max(1.0));
    }

    #[test]
    fn boas_khavinson_matches_direct_sum(d in 1u64..40, frac in 0.05f64..0.9) {
        let r = frac / (d as f64).sqrt();
        let s = boas_khavinson_series(d, r, 1e-12).unwrap();
        let truth = r + common::direct_sum(400, |k| {
            if k < 2 { 0.0 } else { r.powi(k as i32) * common::binom_f64(d + k - 1, k).sqrt() }
        });
        assert_encloses(s.value, s.tail_bound, truth, 1e-10 * truth.max(1.0));
    }

    #[test]
    fn wide_variants_agree_on_the_strict_domain(d in 1u64..60, frac in 0.05f64..0.95) {
        let r = frac / (d as f64).sqrt();
        let a = binom_sqrt_series(d, r, 1e-11).unwrap();
        let b = binom_sqrt_series_wide(d, r, 1e-11).unwrap();
        prop_assert!((a.value - b.value).abs() <= a.tail_bound + b.tail_bound + 1e-12 * a.value.max(1.0));
        let a = boas_khavinson_series(d, r, 1e-11).unwrap();
        let b = boas_khavinson_series_wide(d, r, 1e-11).unwrap();
        prop_assert!((a.value - b.value).abs() <= a.tail_bound + b.tail_bound + 1e-12 * a.value.max(1.0));
    }

    #[test]
    fn series_are_increasing(d in 1u64..200, r1 in 0.0f64..0.9, dr in 1e-4f64..0.05) {
        let r2 = (r1 + dr).min(0.95);
        let a = binom_sqrt_series_wide(d, r1, 1e-12).unwrap();
        let b = binom_sqrt_series_wide(d, r2, 1e-12).unwrap();
        prop_assert!(a.value - a.tail_bound <= b.value + b.tail_bound);
    }

    #[test]
    fn extended_and_double_agree(r in 0.01f64..0.9) {
        let a = polylog_neg_half_in(Precision::Double, r, 1e-12).unwrap();
        let b = polylog_neg_half_in(Precision::Extended, r, 1e-12).unwrap();
        prop_assert!((a.value - b.value).abs() <= a.tail_bound + b.tail_bound + 1e-13 * a.value.max(1.0));
    }

    #[test]
    fn solve_root_residual_and_bracket(target in 0.05f64..5.0, tol in 1e-12f64..1e-6) {
        let r = solve_root(polylog_neg_half, target, (0.0, 0.95), tol).unwrap();
        let v = polylog_neg_half(r, tol / 4.0).unwrap().value;
        prop_assert!((v - target).abs() <= tol * 50.0 + 1e-9, "residual {} at r = {r}", v - target);
        prop_assert!((0.0..0.95).contains(&r));
    }
}

#[test]
fn solve_root_rejects_bad_brackets() {
    assert!(solve_root(polylog_neg_half, 0.5, (0.5, 0.9), 1e-9).is_err());
    assert!(solve_root(polylog_neg_half, 0.5, (0.4, 0.4), 1e-9).is_err());
}

#[test]
fn strict_domain_is_enforced() {
    assert!(binom_sqrt_series(4, 0.5, 1e-9).is_err());
    assert!(binom_sqrt_series_wide(4, 0.5, 1e-9).is_ok());
    assert!(binom_sqrt_series_wide(4, 1.0, 1e-9).is_err());
}
