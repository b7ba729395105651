//! Truncated formal power series with exact rational coefficients.

use crate::error::{Error, Result};
use crate::rational::BigRational;

/// Coefficients of `t^0 ..= t^order`; everything above `order` is discarded.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesTruncation {
    coeffs: Vec<BigRational>,
}

impl SeriesTruncation {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![BigRational::zero(); order + 1],
        }
    }

    /// Pads or truncates `coeffs` to the requested order.
    pub fn from_coeffs(mut coeffs: Vec<BigRational>, order: usize) -> Self {
        coeffs.resize(order + 1, BigRational::zero());
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &BigRational {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigRational> {
        self.coeffs
    }

    /// `ln(1 - t) = -Σ_{k≥1} t^k / k`
    pub fn log_one_minus_t(order: usize) -> Self {
        let mut coeffs = vec![BigRational::zero()];
        coeffs.extend((1..=order as u64).map(|k| -BigRational::recip_of(k)));
        Self { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_order(other);
        Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Cauchy product, truncated at the common order.
    pub fn mul(&self, other: &Self) -> Self {
        self.check_order(other);
        let n = self.order();
        let coeffs = (0..=n)
            .map(|k| {
                (0..=k)
                    .filter(|&i| !self.coeffs[i].is_zero() && !other.coeffs[k - i].is_zero())
                    .map(|i| &self.coeffs[i] * &other.coeffs[k - i])
                    .sum()
            })
            .collect();
        Self { coeffs }
    }

    /// Divides by `t`, dropping the constant term, which must be zero.
    ///
    /// The top coefficient becomes unknown and is set to zero, so the result is
    /// exact only through `order - 1`.
    pub fn shift_down(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Precondition("shift_down needs a zero constant term".into()));
        }
        let mut coeffs: Vec<_> = self.coeffs[1..].to_vec();
        coeffs.push(BigRational::zero());
        Ok(Self { coeffs })
    }

    /// `exp(self)` for a series with zero constant term.
    ///
    /// With `E = exp(W)` we have `E' = W' E`, giving
    /// `k e_k = Σ_{j=1..k} j w_j e_{k-j}` and `e_0 = 1`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Precondition("exp needs a zero constant term".into()));
        }
        let n = self.order();
        let weighted: Vec<BigRational> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, w)| w.mul_int(j as u64))
            .collect();
        let mut out = Vec::with_capacity(n + 1);
        out.push(BigRational::one());
        for k in 1..=n {
            let acc: BigRational = (1..=k)
                .filter(|&j| !weighted[j].is_zero())
                .map(|j| &weighted[j] * &out[k - j])
                .sum();
            out.push(acc.div_int(k as u64));
        }
        Ok(Self { coeffs: out })
    }

    fn check_order(&self, other: &Self) {
        assert_eq!(self.order(), other.order(), "series orders differ");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p, d).unwrap()
    }

    /// exp via Σ W^j / j!, exact because W^j starts at t^j.
    fn exp_by_powers(w: &SeriesTruncation) -> SeriesTruncation {
        let n = w.order();
        let mut term = SeriesTruncation::from_coeffs(vec![BigRational::one()], n);
        let mut total = term.clone();
        for j in 1..=n as u64 {
            term = term.mul(w).scale(&BigRational::recip_of(j));
            total = total.add(&term);
        }
        total
    }

    #[test]
    fn exp_of_t_is_inverse_factorials() {
        let t = SeriesTruncation::from_coeffs(vec![q(0, 1), q(1, 1)], 6);
        let e = t.exp().unwrap();
        let mut fact = 1i64;
        for k in 0..=6 {
            if k > 0 {
                fact *= k;
            }
            assert_eq!(e.coeff(k as usize), &q(1, fact));
        }
    }

    #[test]
    fn exp_rejects_nonzero_constant() {
        let s = SeriesTruncation::from_coeffs(vec![q(1, 1)], 3);
        assert!(s.exp().is_err());
    }

    #[test]
    fn exp_matches_power_sum_on_log_series() {
        let w = SeriesTruncation::log_one_minus_t(12).scale(&q(-3, 7));
        assert_eq!(w.exp().unwrap(), exp_by_powers(&w));
    }

    #[test]
    fn exp_of_log_one_minus_t_is_one_minus_t() {
        let e = SeriesTruncation::log_one_minus_t(10).exp().unwrap();
        let expected = SeriesTruncation::from_coeffs(vec![q(1, 1), q(-1, 1)], 10);
        assert_eq!(e, expected);
    }

    #[test]
    fn shift_down_divides_by_t() {
        let s = SeriesTruncation::from_coeffs(vec![q(0, 1), q(2, 1), q(3, 1)], 2);
        assert_eq!(s.shift_down().unwrap().coeffs(), &[q(2, 1), q(3, 1), q(0, 1)]);
        assert!(SeriesTruncation::from_coeffs(vec![q(1, 1)], 2).shift_down().is_err());
    }
}
