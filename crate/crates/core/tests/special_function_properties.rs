use proptest::prelude::*;
use skewcirc::special_functions::{bessel_i, bessel_ratio, check_recurrence, log_leading_term};

/// `(p, x, ln I_p(x), A_p(x))` from 40-digit arithmetic.
const ORACLE: [(u64, f64, f64, f64); 7] = [
    (0, 0.5, 0.061549719185481303941, 1.0),
    (3, 1.0, -3.8090863032394225, 0.017509693068810563429),
    (10, 2.0, -15.013844663226056769, 1.3234704909963089655e-7),
    (30, 5.0, -46.968531494124228511, 1.4676445605688463612e-22),
    (60, 0.5, -271.80481050916691841, 8.5102033518900188072e-119),
    (150, 40.0, -153.03382491034377495, 2.3185707662448694377e-83),
    (200, 100.0, -68.744367477716920474, 1.299561016612123681e-72),
];

#[test]
fn matches_high_precision_values() {
    for (p, x, log_i, ratio) in ORACLE {
        let v = bessel_i(p, x).unwrap();
        assert!((v.log_value - log_i).abs() <= 1e-13 * log_i.abs().max(1.0), "I_{p}({x})");
        let a = bessel_ratio(p, x).unwrap();
        assert!((a - ratio).abs() <= 1e-12 * ratio, "A_{p}({x}): {a}");
    }
}

#[test]
fn two_sided_series_bound() {
    for kappa in [0.5, 1.0, 2.0, 5.0] {
        let mut log_fact = 0.0;
        for p in 1..=30u64 {
            log_fact += (p as f64).ln();
            let lower = p as f64 * (kappa / 2.0_f64).ln() - log_fact;
            assert!((log_leading_term(p, kappa) - lower).abs() < 1e-12);
            let upper = lower + kappa * kappa / 4.0;
            let v = bessel_i(p, kappa).unwrap().log_value;
            assert!(lower <= v && v <= upper, "p = {p}, kappa = {kappa}");
        }
    }
}

#[test]
fn recurrence_on_a_grid() {
    for k in 0..20 {
        let x = 0.1 * (1000.0_f64).powf(k as f64 / 19.0);
        for p in 1..=30 {
            let r = check_recurrence(p, x).unwrap();
            assert!(r <= 1e-10, "p = {p}, x = {x}: {r}");
        }
    }
}

/// `ln A_p(x)`, which stays finite where `A_p` underflows.
fn log_ratio(p: u64, x: f64) -> f64 {
    bessel_i(p, x).unwrap().log_value - bessel_i(0, x).unwrap().log_value
}

proptest! {
    #[test]
    fn ratio_decreases_with_order(p in 0u64..199, x in 0.01f64..100.0) {
        prop_assert!(log_ratio(p + 1, x) < log_ratio(p, x));
    }

    #[test]
    fn ratio_increases_with_argument(p in 1u64..200, x in 0.01f64..90.0, dx in 0.01f64..10.0) {
        prop_assert!(log_ratio(p, x) < log_ratio(p, x + dx));
    }

    #[test]
    fn value_is_positive(p in 0u64..=200, x in 1e-3f64..=100.0) {
        let v = bessel_i(p, x).unwrap();
        prop_assert!(v.log_value.is_finite());
        prop_assert!(v.value >= 0.0);
        if v.value.is_normal() {
            prop_assert!((v.value.ln() - v.log_value).abs() < 1e-12 * v.log_value.abs().max(1.0));
        }
    }
}
