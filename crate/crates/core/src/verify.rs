//! The full verification sweep behind `carleman-coeffs verify`.

use std::f64::consts::E;

use rayon::prelude::*;

use crate::carleman::{factor_from_coefficients, gap_for, truncation_gap};
use crate::coeffs::{
    b_series_oracle, bound_check, monotonicity_check, partial_sum_check, published_first_six,
    published_fixture_report, CoefficientTable,
};
use crate::error::{Error, Result};
use crate::integrand::{f_closed, f_integral};
use crate::quadrature::{
    b_quad_g, b_quad_g_reflected, b_quad_h, lemma2_diagnostic, lemma2_from_table, remark_integrals,
    QuadratureConfig, QuadratureResult,
};
use crate::rational::BigRational;
use crate::report::{fmt_f64, Check, Status, VerificationReport};

pub const F_FORM_POINTS: [f64; 6] = [0.1, 0.5, 1.0, 2.0, 10.0, 100.0];
pub const H_LIMIT_POINTS: [usize; 3] = [10, 50, 200];
pub const PARTIAL_SUM_POINTS: [usize; 3] = [10, 50, 200];
pub const REFINEMENT_POINTS: [f64; 4] = [1.0, 2.0, 10.0, 100.0];

/// Per-check thresholds, all derived from one base tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub representation_g: f64,
    pub two_form: f64,
    pub representation_h: f64,
    pub moment: f64,
    pub reciprocal: f64,
    pub f_forms: f64,
    pub h_limit_oracle: f64,
    pub sum_guard: f64,
}

impl Tolerances {
    pub fn from_base(tol: f64) -> Self {
        Self {
            representation_g: tol,
            two_form: tol / 10.0,
            representation_h: tol * 10.0,
            moment: tol,
            reciprocal: tol * 10.0,
            f_forms: tol * 10.0,
            h_limit_oracle: 1e-8,
            sum_guard: 1e-12,
        }
    }

    /// Quadrature target that leaves two digits of headroom.
    pub fn quadrature(&self) -> QuadratureConfig {
        let target = (self.representation_g / 100.0).max(1e-14);
        QuadratureConfig { target_abs_tol: target, ..QuadratureConfig::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyConfig {
    pub max_n: usize,
    pub quad_max: usize,
    pub tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { max_n: 200, quad_max: 20, tol: 1e-10 }
    }
}

impl VerifyConfig {
    pub fn new(max_n: usize, quad_max: usize, tol: f64) -> Result<Self> {
        let config = Self { max_n, quad_max, tol };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_n < 2 {
            return Err(Error::Precondition("max_n must be at least 2".into()));
        }
        if self.quad_max < 2 || self.quad_max > self.max_n {
            return Err(Error::Precondition(format!(
                "quad_max must lie in 2..=max_n (got {} with max_n {})",
                self.quad_max, self.max_n
            )));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Precondition("tol must be positive".into()));
        }
        Ok(())
    }
}

/// Runs every check against `table` (truncated to `max_n`). Never stops at the
/// first failure.
pub fn run_verification(config: &VerifyConfig, table: &CoefficientTable) -> Result<VerificationReport> {
    config.validate()?;
    if table.max_n() < config.max_n {
        return Err(Error::Precondition(format!(
            "table has {} coefficients, max_n is {}",
            table.max_n(),
            config.max_n
        )));
    }
    let table = table.prefix(config.max_n)?;
    let tols = Tolerances::from_base(config.tol);
    let quad = tols.quadrature();

    let mut checks = Vec::new();
    if table.max_n() >= 6 {
        checks.push(published_fixture_report(&table));
    }
    checks.push(oracle_equivalence(&table)?);
    checks.push(bound_check(&table));
    checks.push(monotonicity_check(&table)?);
    checks.push(ratio_check(&table));
    checks.extend(representation_checks(&table, config.quad_max, &tols, &quad));
    checks.extend(remark_integrals(&quad, tols.moment, tols.reciprocal));
    checks.push(f_forms_check(&tols, &quad));
    checks.push(h_limit_check(&table, &tols, &quad));
    for upto in sum_points(table.max_n()) {
        checks.push(partial_sum_check(&table, upto, tols.sum_guard)?);
    }
    checks.push(refinement_check(&table)?);
    checks.push(published_refinement_check());
    Ok(VerificationReport::new(checks))
}

fn sum_points(max_n: usize) -> Vec<usize> {
    let mut points: Vec<usize> = PARTIAL_SUM_POINTS.iter().copied().filter(|&n| n <= max_n).collect();
    if !points.contains(&max_n) {
        points.push(max_n);
    }
    points
}

fn oracle_equivalence(table: &CoefficientTable) -> Result<Check> {
    let oracle = b_series_oracle(table.max_n())?;
    let mismatch = table
        .iter()
        .zip(oracle.values())
        .find(|((_, a), b)| a != b)
        .map(|((n, _), _)| n);
    let detail = match mismatch {
        None => format!("table equals the series-exponential oracle for n <= {}", table.max_n()),
        Some(n) => format!("first mismatch with the series-exponential oracle at n = {n}"),
    };
    let mut check = Check::pass_if("oracle_equivalence", "Eq. (1.1), Eq. (3.6)", mismatch.is_none(), detail)
        .with_value("max_n", table.max_n());
    if let Some(n) = mismatch {
        check = check
            .with_value("first_mismatch", n)
            .with_value("table_value", table.get(n).expect("in range"))
            .with_value("oracle_value", oracle.get(n).expect("in range"));
    }
    Ok(check)
}

/// Ratios `r_n = b_{n+1}/b_n`: positive, below one, and increasing
/// (`b_{n+2} b_n > b_{n+1}^2`), all checked exactly.
pub fn ratio_check(table: &CoefficientTable) -> Check {
    let b = table.values();
    let bad_range: Vec<usize> = b
        .windows(2)
        .enumerate()
        .filter(|(_, w)| !(w[0].is_positive() && w[1].is_positive() && w[1] < w[0]))
        .map(|(i, _)| i + 1)
        .collect();
    let not_increasing: Vec<usize> = b
        .windows(3)
        .enumerate()
        .filter(|(_, w)| &w[2] * &w[0] <= &w[1] * &w[1])
        .map(|(i, _)| i + 1)
        .collect();
    let ok = bad_range.is_empty() && not_increasing.is_empty();
    let detail = if ok {
        format!("0 < b_(n+1)/b_n < 1 and increasing for n < {}", table.max_n())
    } else {
        format!(
            "ratio outside (0,1) at n = {:?}; not increasing at n = {:?}",
            bad_range, not_increasing
        )
    };
    let mut check = Check::pass_if("ratio_limit", "Eq. (3.4)", ok, detail);
    let last = table.max_n().saturating_sub(1);
    for n in [1, 2, 5, 10, 100, 500, last] {
        if n >= 1 && n < table.max_n() {
            if let Ok(r) = b[n].checked_div(&b[n - 1]) {
                check = check.with_f64(&format!("ratio_{n}"), r.to_f64());
            }
        }
    }
    check
}

struct RepresentationRow {
    n: usize,
    exact: f64,
    g: QuadratureResult,
    g_reflected: QuadratureResult,
    h: QuadratureResult,
}

fn representation_checks(
    table: &CoefficientTable,
    quad_max: usize,
    tols: &Tolerances,
    quad: &QuadratureConfig,
) -> Vec<Check> {
    let rows: Vec<RepresentationRow> = (2..=quad_max)
        .into_par_iter()
        .map(|n| RepresentationRow {
            n,
            exact: table.get(n).expect("quad_max <= max_n").to_f64(),
            g: b_quad_g(n, quad).expect("n >= 2"),
            g_reflected: b_quad_g_reflected(n, quad).expect("n >= 2"),
            h: b_quad_h(n, quad).expect("n >= 2"),
        })
        .collect();

    let summarize = |name: &str, claim: &str, tol: f64, label: &str, f: &dyn Fn(&RepresentationRow) -> (f64, bool)| {
        let mut worst = (0.0f64, 0usize);
        let mut failures = Vec::new();
        for row in &rows {
            let (diff, converged) = f(row);
            if diff > worst.0 || diff.is_nan() {
                worst = (diff, row.n);
            }
            if !(converged && diff <= tol) {
                failures.push(row.n);
            }
        }
        let detail = if failures.is_empty() {
            format!("{label} within {tol:.1e} for n = 2..={quad_max}")
        } else {
            format!("{label} exceeds {tol:.1e} or did not converge at n = {failures:?}")
        };
        Check::pass_if(name, claim, failures.is_empty(), detail)
            .with_f64("max_abs_diff", worst.0)
            .with_value("worst_n", worst.1)
            .with_f64("tolerance", tol)
    };

    vec![
        summarize("integral_representation_g", "Eq. (3.1)", tols.representation_g, "|b_quad_g(n) - b_n|", &|r| {
            ((r.g.value - r.exact).abs(), r.g.converged)
        }),
        summarize("integral_representation_two_forms", "Eq. (3.1)", tols.two_form, "s^(n-2) vs (1-s)^(n-2) forms", &|r| {
            ((r.g.value - r.g_reflected.value).abs(), r.g.converged && r.g_reflected.converged)
        }),
        summarize("integral_representation_h", "Eq. (3.10)", tols.representation_h, "|b_quad_h(n) - b_n|", &|r| {
            ((r.h.value - r.exact).abs(), r.h.converged)
        }),
    ]
}

fn f_forms_check(tols: &Tolerances, quad: &QuadratureConfig) -> Check {
    let rows: Vec<(f64, Result<(f64, f64)>)> = F_FORM_POINTS
        .par_iter()
        .map(|&x| (x, f_closed(x).and_then(|c| Ok((c, f_integral(x, quad)?.value)))))
        .collect();
    let mut ok = true;
    let mut check = Check::new("f_integral_form", "Eq. (2.2)", Status::Pass, "");
    for (x, row) in rows {
        match row {
            Ok((closed, integral)) => {
                let diff = (closed - integral).abs();
                ok &= diff <= tols.f_forms;
                check = check.with_f64(&format!("abs_diff_at_{}", fmt_f64(x)), diff);
            }
            Err(e) => {
                ok = false;
                check = check.with_value(&format!("error_at_{}", fmt_f64(x)), e);
            }
        }
    }
    check.status = if ok { Status::Pass } else { Status::Fail };
    check.detail = format!("|f_closed(x) - f_integral(x)| <= {:e} on x in {:?}", tols.f_forms, F_FORM_POINTS);
    check
}

fn h_limit_check(table: &CoefficientTable, tols: &Tolerances, quad: &QuadratureConfig) -> Check {
    let results: Vec<(usize, QuadratureResult)> = H_LIMIT_POINTS
        .par_iter()
        .map(|&n| (n, lemma2_diagnostic(n, quad).expect("n >= 1")))
        .collect();
    let distances: Vec<f64> = results.iter().map(|(_, r)| (r.value + 1.0).abs()).collect();
    let mut ok = results.iter().all(|(_, r)| r.converged) && distances.windows(2).all(|w| w[1] < w[0]);
    let mut check = Check::new("h_moment_limit", "Eq. (2.3)", Status::Pass, "");
    for (n, r) in &results {
        check = check.with_f64(&format!("L_{n}"), r.value);
        if let Ok(oracle) = lemma2_from_table(table, *n) {
            let diff = (r.value - oracle).abs();
            ok &= diff <= tols.h_limit_oracle;
            check = check.with_f64(&format!("L_{n}_from_table"), oracle);
        }
    }
    check.status = if ok { Status::Pass } else { Status::Fail };
    check.detail = format!(
        "L(n) = n * int s^n h(s) ds approaches h(1) = -1; |L(n) + 1| strictly decreasing over n in {:?}",
        H_LIMIT_POINTS
    );
    check
}

fn refinement_check(table: &CoefficientTable) -> Result<Check> {
    let max_terms = table.max_n().min(6);
    let mut failures = Vec::new();
    let mut check = Check::new("refinement_factor_sandwich", "Sec. 1", Status::Pass, "");
    for &x in &REFINEMENT_POINTS {
        for m in 1..=max_terms {
            let gap = truncation_gap(x, m, table)?;
            if !gap.within_bounds() || gap.weighted_e.is_nan() || gap.weighted_e >= E {
                failures.push(format!("x={x},m={m}"));
            }
            if m == max_terms {
                check = check.with_f64(&format!("gap_x{}_m{m}", fmt_f64(x)), gap.gap);
            }
        }
    }
    check.status = if failures.is_empty() { Status::Pass } else { Status::Fail };
    check.detail = if failures.is_empty() {
        format!("(1+1/x)^x < e F_m(x) < e and gap below the tail bound for x in {REFINEMENT_POINTS:?}, m <= {max_terms}")
    } else {
        format!("sandwich violated at {}", failures.join("; "))
    };
    Ok(check)
}

/// `e F_6(1) > 2` using the six coefficients exactly as published.
fn published_refinement_check() -> Check {
    let factor = factor_from_coefficients(&BigRational::one(), &published_first_six()).expect("x = 1 > 0");
    let gap = gap_for(&factor);
    Check::pass_if(
        "published_refinement_at_one",
        "Sec. 1",
        gap.gap > 0.0,
        "e F_6(1) > (1 + 1/1)^1 = 2 with the published six coefficients",
    )
    .with_value("factor", &factor.exact_value)
    .with_f64("weighted_e", gap.weighted_e)
}
