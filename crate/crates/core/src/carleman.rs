//! Refined Carleman weights `F_m(x) = 1 - Σ_{k=1}^{m} b_k / (x+1)^k` and a
//! finite-sequence demonstration of `Σ (a_1⋯a_n)^{1/n} < e Σ F_m(n) a_n`.
//!
//! Since every `b_k` is positive and the full series sums to
//! `1 - (1+1/x)^x / e`, truncating it always leaves
//! `(1+1/x)^x < e F_m(x) < e`. The gap between the two sides can be far below
//! double-precision resolution (about 1e-16 at `x = 100, m = 6`), so it is
//! evaluated in 384-bit fixed point.

use std::f64::consts::E;
use std::io::Read;
use std::path::Path;

use serde::Serialize;

use crate::coeffs::CoefficientTable;
use crate::error::{Error, Result};
use crate::fixed::Fixed;
use crate::rational::BigRational;

#[derive(Clone, Debug, PartialEq)]
pub struct RefinementFactor {
    pub x: BigRational,
    pub terms: usize,
    pub exact_value: BigRational,
    pub float_value: f64,
}

fn check_x(x: &BigRational) -> Result<()> {
    if !x.is_positive() {
        return Err(Error::Domain { name: "x", value: x.to_f64(), domain: "x > 0" });
    }
    Ok(())
}

fn leading_coefficients(table: &CoefficientTable, terms: usize) -> Result<&[BigRational]> {
    if terms == 0 {
        return Err(Error::Precondition("at least one term is needed".into()));
    }
    if terms > table.max_n() {
        return Err(Error::OutOfRange { index: terms, max: table.max_n() });
    }
    Ok(&table.values()[..terms])
}

/// `1 - Σ c_k t^k` with `t = 1/(x+1)` and `c` the given leading coefficients.
pub fn factor_from_coefficients(x: &BigRational, coeffs: &[BigRational]) -> Result<RefinementFactor> {
    check_x(x)?;
    let t = (x + &BigRational::one()).recip()?;
    // Horner: t (c_1 + t (c_2 + ...))
    let series = coeffs.iter().rev().fold(BigRational::zero(), |acc, c| &t * &(c + &acc));
    let exact_value = BigRational::one() - series;
    Ok(RefinementFactor {
        x: x.clone(),
        terms: coeffs.len(),
        float_value: exact_value.to_f64(),
        exact_value,
    })
}

pub fn refinement_factor_exact(x: &BigRational, terms: usize, table: &CoefficientTable) -> Result<RefinementFactor> {
    factor_from_coefficients(x, leading_coefficients(table, terms)?)
}

/// Same as [`refinement_factor_exact`], taking the exact value of the double `x`.
pub fn refinement_factor(x: f64, terms: usize, table: &CoefficientTable) -> Result<RefinementFactor> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain { name: "x", value: x, domain: "0 < x < inf" });
    }
    refinement_factor_exact(&BigRational::from_f64(x)?, terms, table)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TruncationGap {
    /// `(1 + 1/x)^x`
    pub compound: f64,
    /// `e F_m(x)`
    pub weighted_e: f64,
    /// `e F_m(x) - (1 + 1/x)^x`, computed before rounding either side.
    pub gap: f64,
    /// `e Σ_{k>m} 1/(k(k+1)(x+1)^k)`, the largest the gap can be given
    /// `b_k <= 1/(k(k+1))`.
    pub tail_bound: f64,
}

impl TruncationGap {
    pub fn within_bounds(&self) -> bool {
        self.gap > 0.0 && self.gap < self.tail_bound
    }
}

/// `e Σ_{k>m} t^k / (k(k+1))`, summed until terms stop mattering. After
/// `MAX_TERMS` the rest is bounded by `Σ_{k>K} 1/(k(k+1)) = 1/(K+1)`.
pub fn tail_bound(t: f64, terms: usize) -> f64 {
    const MAX_TERMS: usize = 1_000_000;
    let mut sum = 0.0;
    let mut power = t.powi(terms as i32);
    let mut k = terms;
    loop {
        k += 1;
        power *= t;
        let add = power / (k as f64 * (k as f64 + 1.0));
        sum += add;
        if add <= sum * 1e-17 || add == 0.0 {
            break;
        }
        if k >= MAX_TERMS {
            sum += power / (k as f64 + 1.0);
            break;
        }
    }
    E * sum
}

pub fn truncation_gap_exact(x: &BigRational, terms: usize, table: &CoefficientTable) -> Result<TruncationGap> {
    let factor = refinement_factor_exact(x, terms, table)?;
    Ok(gap_for(&factor))
}

pub fn truncation_gap(x: f64, terms: usize, table: &CoefficientTable) -> Result<TruncationGap> {
    let factor = refinement_factor(x, terms, table)?;
    Ok(gap_for(&factor))
}

/// Gap for an already built factor (e.g. one made from a published list).
pub fn gap_for(factor: &RefinementFactor) -> TruncationGap {
    let x = &factor.x;
    let one = BigRational::one();
    // (1+1/x)^x = exp(x (ln(x+1) - ln x))
    let log_ratio = &Fixed::ln(&(x + &one)) - &Fixed::ln(x);
    let compound = (&Fixed::from_rational(x) * &log_ratio).exp();
    let weighted_e = &Fixed::e() * &Fixed::from_rational(&factor.exact_value);
    let t = (x + &one).recip().expect("x + 1 > 0").to_f64();
    TruncationGap {
        compound: compound.to_f64(),
        weighted_e: weighted_e.to_f64(),
        gap: (&weighted_e - &compound).to_f64(),
        tail_bound: tail_bound(t, factor.terms),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DemoReport {
    pub length: usize,
    pub terms: usize,
    /// `Σ_{n≤N} (a_1⋯a_n)^{1/n}`
    pub lhs: f64,
    /// `e Σ_{n≤N} F_m(n) a_n`
    pub rhs: f64,
    pub ratio: f64,
    pub holds: bool,
    pub note: String,
}

/// Both sides of the refined inequality over a finite sequence.
///
/// Geometric means are `exp(mean of ln a_k)`; once a zero appears every later
/// mean is zero.
pub fn carleman_demo(a: &[f64], terms: usize, table: &CoefficientTable) -> Result<DemoReport> {
    if a.is_empty() {
        return Err(Error::Precondition("sequence is empty".into()));
    }
    if let Some(&bad) = a.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::Domain { name: "a_n", value: bad, domain: "finite and >= 0" });
    }
    if a.iter().all(|&v| v == 0.0) {
        return Err(Error::Precondition("sequence is identically zero".into()));
    }
    let coeffs = leading_coefficients(table, terms)?;

    let mut log_sum = 0.0;
    let mut hit_zero = false;
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for (i, &an) in a.iter().enumerate() {
        let n = i + 1;
        if an == 0.0 {
            hit_zero = true;
        }
        if !hit_zero {
            log_sum += an.ln();
            lhs += (log_sum / n as f64).exp();
        }
        if an > 0.0 {
            let weight = factor_from_coefficients(&BigRational::from_integer(n as i64), coeffs)?;
            rhs += weight.float_value * an;
        }
    }
    rhs *= E;
    Ok(DemoReport {
        length: a.len(),
        terms,
        lhs,
        rhs,
        ratio: lhs / rhs,
        holds: lhs < rhs,
        note: "finite truncation of both series; a demonstration, not a proof".into(),
    })
}

/// Single-column CSV, one nonnegative decimal per line, no header.
pub fn parse_sequence<R: Read>(reader: R) -> Result<Vec<f64>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut out = Vec::new();
    for (i, record) in csv.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
        if record.len() != 1 {
            return Err(Error::Parse(format!("line {line}: expected one column, found {}", record.len())));
        }
        let value: f64 = record[0]
            .parse()
            .map_err(|_| Error::Parse(format!("line {line}: not a number: {:?}", &record[0])))?;
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::Parse(format!("line {line}: expected a nonnegative value, got {value}")));
        }
        out.push(value);
    }
    if out.is_empty() {
        return Err(Error::Parse("sequence file has no rows".into()));
    }
    Ok(out)
}

pub fn read_sequence(path: &Path) -> Result<Vec<f64>> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_sequence(file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{b_recurrence, published_first_six, Source};

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p, d).unwrap()
    }

    fn table() -> CoefficientTable {
        b_recurrence(40).unwrap()
    }

    #[test]
    fn single_term_at_one() {
        let f = refinement_factor(1.0, 1, &table()).unwrap();
        assert_eq!(f.exact_value, q(3, 4));
        assert!(E * f.float_value > 2.0);
        assert!((E * f.float_value - 2.0387113713442839).abs() < 1e-15);
    }

    #[test]
    fn six_terms_at_one() {
        let f = refinement_factor(1.0, 6, &table()).unwrap();
        // 1 - Σ_{k≤6} b_k / 2^k with the computed b_6 = 3625/580608
        let expected = BigRational::one()
            - table().values()[..6]
                .iter()
                .enumerate()
                .map(|(i, b)| b.div_int(1 << (i + 1)))
                .sum::<BigRational>();
        assert_eq!(f.exact_value, expected);
        assert!(E * f.float_value > 2.0);
    }

    #[test]
    fn published_six_still_beat_two() {
        let f = factor_from_coefficients(&BigRational::one(), &published_first_six()).unwrap();
        assert_eq!(f.exact_value, q(136_719_931, 185_794_560));
        assert!(E * f.float_value > 2.0);
    }

    #[test]
    fn invalid_arguments() {
        let t = table();
        assert!(refinement_factor(0.0, 3, &t).is_err());
        assert!(refinement_factor(-1.0, 3, &t).is_err());
        assert!(refinement_factor(f64::NAN, 3, &t).is_err());
        assert!(refinement_factor(1.0, 0, &t).is_err());
        assert!(matches!(refinement_factor(1.0, 41, &t), Err(Error::OutOfRange { index: 41, max: 40 })));
    }

    #[test]
    fn factors_decrease_with_terms() {
        let t = table();
        for x in [q(1, 10), q(1, 1), q(7, 3), q(100, 1)] {
            let values: Vec<_> = (1..=10).map(|m| refinement_factor_exact(&x, m, &t).unwrap().exact_value).collect();
            assert!(values.windows(2).all(|w| w[1] < w[0]));
            assert!(values.iter().all(|v| v.is_positive() && v < &BigRational::one()));
        }
    }

    #[test]
    fn frozen_gaps() {
        // mpmath at 50 digits from exact F_m(x)
        let t = table();
        let cases = [
            (1.0, 1, 0.038711371344283927),
            (1.0, 6, 0.00016873722306748338),
            (2.0, 6, 8.0519810961207595e-6),
            (10.0, 6, 7.1510823861885082e-10),
            (100.0, 2, 5.5298666652670111e-8),
            (100.0, 6, 1.2158279151212131e-16),
        ];
        for (x, m, want) in cases {
            let gap = truncation_gap(x, m, &t).unwrap();
            assert!((gap.gap - want).abs() <= 1e-12, "x={x} m={m}: {} vs {want}", gap.gap);
            assert!((gap.gap - want).abs() <= want * 1e-12, "relative: x={x} m={m}");
            assert!(gap.within_bounds(), "{gap:?}");
        }
    }

    #[test]
    fn gap_shrinks_with_terms_toward_compound() {
        let t = table();
        let gaps: Vec<_> = [5, 10, 20, 40].iter().map(|&m| truncation_gap(1.0, m, &t).unwrap()).collect();
        for g in &gaps {
            assert!(g.within_bounds(), "{g:?}");
        }
        assert!(gaps.windows(2).all(|w| w[1].gap < w[0].gap));
        // mpmath: x = 1, m = 40
        assert!((gaps[3].gap - 4.4324642090557681e-16).abs() < 1e-28);
    }

    #[test]
    fn tail_bound_values() {
        // mpmath nsum
        assert!((tail_bound(0.5, 6) - 0.000627368).abs() < 1e-9);
        assert!((tail_bound(1.0 / 101.0, 2) - 2.21176e-7).abs() < 1e-12);
        assert!(tail_bound(0.999_999, 1) > 0.0);
    }

    #[test]
    fn demo_corpora() {
        let t = table();
        let unit = carleman_demo(&[1.0, 0.0, 0.0], 6, &t).unwrap();
        assert_eq!(unit.lhs, 1.0);
        assert!((unit.rhs - 2.0001687372230675).abs() < 1e-10);
        assert!(unit.holds);

        let geom: Vec<f64> = (1..=20).map(|n| 0.5f64.powi(n)).collect();
        let r = carleman_demo(&geom, 6, &t).unwrap();
        assert!((r.lhs - 1.705439684720545).abs() < 1e-10);
        assert!((r.rhs - 2.1686707680239197).abs() < 1e-10);
        assert!(r.holds);

        let inv_sq: Vec<f64> = (1..=50).map(|n| 1.0 / (n as f64 * n as f64)).collect();
        let r = carleman_demo(&inv_sq, 6, &t).unwrap();
        assert!((r.lhs - 2.9591364500360911).abs() < 1e-10);
        assert!((r.rhs - 3.497385871430299).abs() < 1e-10);
        assert!(r.holds);
    }

    #[test]
    fn demo_zero_handling() {
        let t = table();
        let r = carleman_demo(&[2.0, 0.0, 5.0], 3, &t).unwrap();
        // only the first geometric mean is nonzero
        assert_eq!(r.lhs, 2.0);
    }

    #[test]
    fn demo_rejects_bad_input() {
        let t = table();
        assert!(carleman_demo(&[], 6, &t).is_err());
        assert!(carleman_demo(&[0.0, 0.0], 6, &t).is_err());
        assert!(carleman_demo(&[1.0, -0.5], 6, &t).is_err());
        assert!(carleman_demo(&[1.0, f64::NAN], 6, &t).is_err());
        let short = CoefficientTable::from_values(vec![q(1, 2)], Source::External).unwrap();
        assert!(carleman_demo(&[1.0], 2, &short).is_err());
    }

    #[test]
    fn sequence_parsing() {
        assert_eq!(parse_sequence("1\n0.5\n 0.25 \n".as_bytes()).unwrap(), vec![1.0, 0.5, 0.25]);
        assert!(parse_sequence("".as_bytes()).is_err());
        assert!(parse_sequence("1\nabc\n".as_bytes()).is_err());
        assert!(parse_sequence("1,2\n".as_bytes()).is_err());
        assert!(parse_sequence("-1\n".as_bytes()).is_err());
        assert!(matches!(read_sequence(Path::new("/nonexistent/seq.csv")), Err(Error::Io(_))));
    }
}
