//! Exact coefficients `b_n` of `(1 + 1/x)^x = e (1 - Σ b_n / (x+1)^n)`.
//!
//! Two independent routes produce the same table:
//!
//! * [`b_recurrence`]: `b_1 = 1/2`,
//!   `b_n = (1/n) (1/(n+1) - Σ_{k=0}^{n-2} b_{n-k-1} / (k+2))`.
//! * [`b_series_oracle`]: with `t = 1/(1+x)`,
//!   `(1+1/x)^x = (1-t)^{1-1/t} = exp((1 - 1/t) ln(1-t))`, and the exponent
//!   expands to `1 - Σ_{k≥1} t^k / (k(k+1))`. Hence
//!   `Σ b_n t^n = 1 - exp(-Σ t^k / (k(k+1)))`. The oracle builds the exponent
//!   by multiplying out the log series rather than hard-coding the weights.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};
use crate::rational::BigRational;
use crate::report::{Check, Status};
use crate::series::SeriesTruncation;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Recurrence,
    SeriesOracle,
    /// Loaded from outside (e.g. a CSV file); the ordering and bound
    /// invariants are not guaranteed and must be checked.
    External,
}

/// Immutable table `b_1 ..= b_max_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTable {
    values: Vec<BigRational>,
    source: Source,
}

impl CoefficientTable {
    pub fn from_values(values: Vec<BigRational>, source: Source) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Precondition("coefficient table must be nonempty".into()));
        }
        Ok(Self { values, source })
    }

    pub fn max_n(&self) -> usize {
        self.values.len()
    }

    pub fn source(&self) -> Source {
        self.source
    }

    /// `b_n`, 1-based.
    pub fn get(&self, n: usize) -> Result<&BigRational> {
        if n == 0 || n > self.values.len() {
            return Err(Error::OutOfRange { index: n, max: self.values.len() });
        }
        Ok(&self.values[n - 1])
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    /// `(n, b_n)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &BigRational)> {
        self.values.iter().enumerate().map(|(i, b)| (i + 1, b))
    }

    /// Same values regardless of which route produced them.
    pub fn same_values(&self, other: &Self) -> bool {
        self.values == other.values
    }

    /// First `n` entries.
    pub fn prefix(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.max_n() {
            return Err(Error::OutOfRange { index: n, max: self.max_n() });
        }
        Ok(Self { values: self.values[..n].to_vec(), source: self.source })
    }
}

fn require_positive(max_n: usize) -> Result<()> {
    if max_n == 0 {
        return Err(Error::Precondition("max_n must be at least 1".into()));
    }
    Ok(())
}

pub fn b_recurrence(max_n: usize) -> Result<CoefficientTable> {
    require_positive(max_n)?;
    let mut values: Vec<BigRational> = Vec::with_capacity(max_n);
    values.push(BigRational::new(1, 2)?);

    // b_j = scaled[j-1] / common, common = lcm of the denominators so far.
    // The inner sum is accumulated over common * lcm(2..=n) so each step
    // costs integer products and a single reduction.
    let mut common = BigInt::from(2);
    let mut scaled = vec![BigInt::one()];
    let mut small_lcm = BigInt::one();
    for n in 2..=max_n {
        small_lcm = small_lcm.lcm(&BigInt::from(n));
        // term k has divisor k + 2 and numerator b_{n-k-1}
        let inner: BigInt = (0..=n - 2)
            .map(|k| &scaled[n - k - 2] * (&small_lcm / BigInt::from(k + 2)))
            .sum();
        let full = &common * &small_lcm;
        // (1/n)(1/(n+1) - inner/full)
        let numer = &full - BigInt::from(n + 1) * inner;
        let bn = BigRational::new(numer, BigInt::from(n * (n + 1)) * full)?;

        let factor = bn.denom() / bn.denom().gcd(&common);
        if !factor.is_one() {
            common *= &factor;
            scaled.iter_mut().for_each(|s| *s *= &factor);
        }
        scaled.push(bn.numer() * (&common / bn.denom()));
        values.push(bn);
    }
    CoefficientTable::from_values(values, Source::Recurrence)
}

pub fn b_series_oracle(max_n: usize) -> Result<CoefficientTable> {
    require_positive(max_n)?;
    let order = max_n;
    // ln(1-t) one order deeper so that ln(1-t)/t is exact through `order`
    let log = SeriesTruncation::log_one_minus_t(order + 1);
    let log_over_t = SeriesTruncation::from_coeffs(log.shift_down()?.into_coeffs(), order);
    let log = SeriesTruncation::from_coeffs(log.into_coeffs(), order);
    // (1 - 1/t) ln(1-t)
    let exponent = log.add(&log_over_t.scale(&BigRational::from_integer(-1)));
    if exponent.coeff(0) != &BigRational::one() {
        return Err(Error::Precondition("exponent constant term should be 1".into()));
    }
    // split off the constant: (1-t)^{1-1/t} = e * exp(exponent - 1)
    let mut reduced = exponent.into_coeffs();
    reduced[0] = BigRational::zero();
    let scaled = SeriesTruncation::from_coeffs(reduced, order).exp()?;
    let values = scaled.coeffs()[1..].iter().map(|c| -c).collect();
    CoefficientTable::from_values(values, Source::SeriesOracle)
}

/// `1 / (n(n+1))`
pub fn coefficient_bound(n: usize) -> BigRational {
    BigRational::recip_of(n as u64 * (n as u64 + 1))
}

/// Exact sweep of `0 < b_n <= 1/(n(n+1))`; equality cases are listed.
pub fn bound_check(table: &CoefficientTable) -> Check {
    let mut violations = Vec::new();
    let mut equalities = Vec::new();
    for (n, b) in table.iter() {
        let bound = coefficient_bound(n);
        if !b.is_positive() || b > &bound {
            violations.push(n);
        } else if b == &bound {
            equalities.push(n);
        }
    }
    let detail = if violations.is_empty() {
        format!("0 < b_n <= 1/(n(n+1)) for all n <= {}", table.max_n())
    } else {
        format!("bound violated at n = {}", list(&violations))
    };
    Check::pass_if("coefficient_bounds", "Eq. (3.2)", violations.is_empty(), detail)
        .with_value("max_n", table.max_n())
        .with_value("equality_at", list(&equalities))
        .with_value("violations", list(&violations))
}

/// Exact sweep of `b_{n+1} < b_n`. Needs at least two entries.
pub fn monotonicity_check(table: &CoefficientTable) -> Result<Check> {
    if table.max_n() < 2 {
        return Err(Error::Precondition("monotonicity needs at least two coefficients".into()));
    }
    let violations: Vec<usize> = table
        .values()
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] >= w[0])
        .map(|(i, _)| i + 1)
        .collect();
    let detail = if violations.is_empty() {
        format!("b_(n+1) < b_n for all n < {}", table.max_n())
    } else {
        format!("b_(n+1) >= b_n at n = {}", list(&violations))
    };
    Ok(Check::pass_if("strict_decrease", "Eq. (3.3)", violations.is_empty(), detail)
        .with_value("max_n", table.max_n())
        .with_value("violations", list(&violations)))
}

/// Exact `Σ_{n=1}^{upto} b_n`.
pub fn partial_sum(table: &CoefficientTable, upto: usize) -> Result<BigRational> {
    if upto == 0 || upto > table.max_n() {
        return Err(Error::OutOfRange { index: upto, max: table.max_n() });
    }
    Ok(table.values()[..upto].iter().sum())
}

/// The sum `Σ b_n = 1 - 1/e` enclosure: `0 < (1 - 1/e) - S_N < 1/(N+1)`.
///
/// The comparison is done in floats; both sides must clear their bound by
/// `guard` to count as strict.
pub fn partial_sum_check(table: &CoefficientTable, upto: usize, guard: f64) -> Result<Check> {
    let sum = partial_sum(table, upto)?;
    let limit = 1.0 - (-1.0f64).exp();
    let gap = limit - sum.to_f64();
    let tail_bound = 1.0 / (upto as f64 + 1.0);
    let ok = gap > guard && gap < tail_bound - guard;
    Ok(Check::pass_if(
        &format!("partial_sum_sandwich_{upto}"),
        "Remark",
        ok,
        format!("0 < (1 - 1/e) - S_{upto} < 1/{}", upto + 1),
    )
    .with_value("partial_sum", &sum)
    .with_f64("gap", gap)
    .with_f64("tail_bound", tail_bound))
}

/// The six coefficients as printed in the published refinement of Carleman's
/// inequality.
pub fn published_first_six() -> Vec<BigRational> {
    [(1, 2), (1, 24), (1, 48), (73, 5760), (11, 1280), (1945, 580608)]
        .into_iter()
        .map(|(p, q)| BigRational::new(p, q).expect("nonzero denominator"))
        .collect()
}

/// Compares the table against [`published_first_six`]. Informational only.
pub fn published_fixture_report(table: &CoefficientTable) -> Check {
    let published = published_first_six();
    let mismatches: Vec<String> = published
        .iter()
        .enumerate()
        .filter_map(|(i, p)| {
            let computed = table.get(i + 1).ok()?;
            (computed != p).then(|| format!("b_{}: published {p}, computed {computed}", i + 1))
        })
        .collect();
    let detail = if mismatches.is_empty() {
        "computed b_1..b_6 match the published list".to_owned()
    } else {
        mismatches.join("; ")
    };
    let mut check = Check::new("published_first_six", "Sec. 1", Status::Reported, detail);
    for (n, b) in table.iter().take(6) {
        check = check.with_value(&format!("b_{n}"), b);
    }
    check
}

fn list(ns: &[usize]) -> String {
    ns.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}
