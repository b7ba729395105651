//! Binary fixed-point reals with 384 fractional bits.
//!
//! Only what the refinement-gap computation needs: exact rational input,
//! `exp`, `ln` of a positive rational, and correctly rounded output.

use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::rational::BigRational;

const FRAC_BITS: usize = 384;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Fixed(BigInt);

impl Fixed {
    pub(crate) fn from_rational(r: &BigRational) -> Self {
        Fixed((r.numer() << FRAC_BITS) / r.denom())
    }

    pub(crate) fn from_int(n: i64) -> Self {
        Fixed(BigInt::from(n) << FRAC_BITS)
    }

    pub(crate) fn to_f64(&self) -> f64 {
        BigRational::new(self.0.clone(), BigInt::one() << FRAC_BITS)
            .expect("nonzero scale")
            .to_f64()
    }

    fn div_int(&self, d: u64) -> Self {
        Fixed(&self.0 / BigInt::from(d))
    }

    fn is_negligible(&self) -> bool {
        self.0.abs() <= BigInt::one()
    }

    /// Taylor series after halving the argument into `|x| < 1/2`.
    pub(crate) fn exp(&self) -> Self {
        let mut halvings = 0u32;
        let mut arg = self.clone();
        let half = Fixed::from_int(1).div_int(2);
        while arg.0.abs() > half.0 {
            arg = arg.div_int(2);
            halvings += 1;
        }
        let mut term = Fixed::from_int(1);
        let mut sum = term.clone();
        for k in 1u64.. {
            term = (&term * &arg).div_int(k);
            if term.is_negligible() {
                break;
            }
            sum = &sum + &term;
        }
        for _ in 0..halvings {
            sum = &sum * &sum;
        }
        sum
    }

    pub(crate) fn e() -> Self {
        Fixed::from_int(1).exp()
    }

    /// Natural log of a positive rational: `r = 2^k m` with `m` in `[2/3, 4/3]`,
    /// then `ln m = 2 atanh((m-1)/(m+1))`.
    pub(crate) fn ln(r: &BigRational) -> Self {
        assert!(r.is_positive(), "ln of a non-positive value");
        let mut k = r.numer().bits() as i64 - r.denom().bits() as i64;
        let pow2 = |k: i64| -> BigRational {
            let p = BigInt::one() << k.unsigned_abs() as usize;
            if k >= 0 {
                BigRational::new(p, 1).expect("nonzero")
            } else {
                BigRational::new(1, p).expect("nonzero")
            }
        };
        let mut m = r.checked_div(&pow2(k)).expect("nonzero power of two");
        let four_thirds = BigRational::new(4, 3).expect("nonzero");
        let two_thirds = BigRational::new(2, 3).expect("nonzero");
        while m > four_thirds {
            m = m.div_int(2);
            k += 1;
        }
        while m < two_thirds {
            m = m.mul_int(2);
            k -= 1;
        }
        let ln2 = atanh_twice(&BigRational::new(1, 3).expect("nonzero"));
        let z = (&m - &BigRational::one())
            .checked_div(&(&m + &BigRational::one()))
            .expect("m + 1 > 0");
        let k_ln2 = Fixed(&ln2.0 * BigInt::from(k));
        &atanh_twice(&z) + &k_ln2
    }
}

/// `2 atanh(z) = 2 Σ z^{2i+1} / (2i+1)` for `|z| <= 1/3`.
fn atanh_twice(z: &BigRational) -> Fixed {
    let z = Fixed::from_rational(z);
    let z2 = &z * &z;
    let mut power = z;
    let mut sum = Fixed(BigInt::zero());
    for i in 0u64.. {
        let term = power.div_int(2 * i + 1);
        if term.is_negligible() {
            break;
        }
        sum = &sum + &term;
        power = &power * &z2;
    }
    Fixed(sum.0 << 1)
}

impl Add for &Fixed {
    type Output = Fixed;
    fn add(self, rhs: &Fixed) -> Fixed {
        Fixed(&self.0 + &rhs.0)
    }
}

impl Sub for &Fixed {
    type Output = Fixed;
    fn sub(self, rhs: &Fixed) -> Fixed {
        Fixed(&self.0 - &rhs.0)
    }
}

impl Mul for &Fixed {
    type Output = Fixed;
    fn mul(self, rhs: &Fixed) -> Fixed {
        Fixed((&self.0 * &rhs.0) >> FRAC_BITS)
    }
}
