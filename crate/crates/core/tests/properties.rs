use std::f64::consts::E;
use std::sync::OnceLock;

use carleman_coeffs::carleman::{carleman_demo, gap_for, refinement_factor_exact};
use carleman_coeffs::coeffs::partial_sum;
use carleman_coeffs::integrand::{g_eval, h_eval, EndpointSafeFunction};
use carleman_coeffs::quadrature::{integrate, QuadratureConfig};
use carleman_coeffs::{b_recurrence, BigRational, CoefficientTable};
use proptest::prelude::*;

fn table() -> &'static CoefficientTable {
    static TABLE: OnceLock<CoefficientTable> = OnceLock::new();
    TABLE.get_or_init(|| b_recurrence(200).unwrap())
}

fn positive_rational() -> impl Strategy<Value = BigRational> {
    (1i64..5000, 1i64..500).prop_map(|(p, q)| BigRational::new(p, q).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shorter_tables_are_prefixes(n in 1usize..=200) {
        let short = b_recurrence(n).unwrap();
        prop_assert!(short.same_values(&table().prefix(n).unwrap()));
    }

    #[test]
    fn factor_shrinks_with_each_term(x in positive_rational(), m in 1usize..30) {
        let f_m = refinement_factor_exact(&x, m, table()).unwrap().exact_value;
        let f_next = refinement_factor_exact(&x, m + 1, table()).unwrap().exact_value;
        prop_assert!(f_next < f_m);
        prop_assert!(f_next.is_positive() && f_m < BigRational::one());
    }

    #[test]
    fn compound_sits_below_weighted_e(x in positive_rational(), m in 1usize..12) {
        let factor = refinement_factor_exact(&x, m, table()).unwrap();
        let gap = gap_for(&factor);
        prop_assert!(gap.gap > 0.0, "{:?}", gap);
        prop_assert!(gap.gap < gap.tail_bound, "{:?}", gap);
        prop_assert!(gap.weighted_e < E);
    }

    #[test]
    fn quadrature_integrates_polynomials(coeffs in prop::collection::vec(-5.0f64..5.0, 1..=11)) {
        let c = coeffs.clone();
        let poly = move |s: f64| c.iter().rev().fold(0.0, |acc, &ck| acc * s + ck);
        let at_one = poly(1.0);
        let at_zero = coeffs[0];
        let f = EndpointSafeFunction::new(poly, at_zero, at_one);
        let result = integrate(&f, &QuadratureConfig::default());
        let exact: f64 = coeffs.iter().enumerate().map(|(k, ck)| ck / (k as f64 + 1.0)).sum();
        prop_assert!(result.converged);
        prop_assert!((result.value - exact).abs() < 1e-12, "{} vs {}", result.value, exact);
    }

    #[test]
    fn g_nonnegative_h_bounded(s in 0.0f64..=1.0) {
        let g = g_eval(s).unwrap();
        prop_assert!((0.0..=0.5).contains(&g));
        let h = h_eval(s).unwrap();
        prop_assert!(h.is_finite() && h.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn refined_carleman_holds_on_finite_sequences(
        a in prop::collection::vec(0.0f64..10.0, 1..40),
        m in 1usize..=8,
    ) {
        prop_assume!(a.iter().any(|&v| v > 0.0));
        let report = carleman_demo(&a, m, table()).unwrap();
        prop_assert!(report.holds, "{:?}", report);
        // the classical weight (1+1/n)^n already dominates the left side
        let classical: f64 = a.iter().enumerate()
            .map(|(i, v)| (1.0 + 1.0 / (i as f64 + 1.0)).powf(i as f64 + 1.0) * v)
            .sum();
        prop_assert!(report.lhs <= classical * (1.0 + 1e-12));
        prop_assert!(classical < report.rhs);
    }
}

#[test]
fn partial_sums_increase_and_stay_below_limit() {
    let limit = 1.0 - (-1.0f64).exp();
    let mut previous = BigRational::zero();
    for n in 1..=200 {
        let s = partial_sum(table(), n).unwrap();
        assert!(s > previous);
        let gap = limit - s.to_f64();
        assert!(gap > 1e-12, "n = {n}");
        assert!(gap < 1.0 / (n as f64 + 1.0), "n = {n}");
        previous = s;
    }
}
