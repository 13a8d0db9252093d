//! Interval arithmetic with exact rational endpoints.
//!
//! Used to decide signs of tower elements: the interval always contains the
//! exact value, and shrinking it far enough separates any nonzero value from
//! zero. Endpoints are rounded outward to dyadic rationals after every
//! operation so that repeated refinement does not blow up coefficient sizes.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    // BigInt division truncates toward zero; we need floor.
    let (q, r) = num_integer::Integer::div_rem(a, b);
    if r.is_zero() || (r.is_negative() == b.is_negative()) {
        q
    } else {
        q - BigInt::one()
    }
}

/// Largest dyadic rational `k/2^bits <= q`.
pub fn dyadic_floor(q: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits;
    let num = q.numer() * &scale;
    let k = floor_div(&num, q.denom());
    BigRational::new(k, scale)
}

/// Smallest dyadic rational `k/2^bits >= q`.
pub fn dyadic_ceil(q: &BigRational, bits: u32) -> BigRational {
    -dyadic_floor(&-q.clone(), bits)
}

impl RatInterval {
    pub fn point(q: BigRational) -> Self {
        RatInterval { lo: q.clone(), hi: q }
    }

    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi, "inverted interval");
        RatInterval { lo, hi }
    }

    pub fn zero() -> Self {
        RatInterval::point(BigRational::zero())
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    /// Round endpoints outward to denominators `2^bits`.
    pub fn round_out(&self, bits: u32) -> Self {
        RatInterval {
            lo: dyadic_floor(&self.lo, bits),
            hi: dyadic_ceil(&self.hi, bits),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        RatInterval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn neg(&self) -> Self {
        RatInterval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if *c < lo {
                lo = c.clone();
            }
            if *c > hi {
                hi = c.clone();
            }
        }
        RatInterval { lo, hi }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_negative() {
            RatInterval {
                lo: &self.hi * q,
                hi: &self.lo * q,
            }
        } else {
            RatInterval {
                lo: &self.lo * q,
                hi: &self.hi * q,
            }
        }
    }

    /// Enclosure of the square root, assuming the true value is nonnegative.
    ///
    /// A negative lower endpoint (possible for a coarse enclosure of a
    /// nonnegative value) is clamped to zero.
    pub fn sqrt(&self, bits: u32) -> Self {
        let lo = if self.lo.is_negative() {
            BigRational::zero()
        } else {
            self.lo.clone()
        };
        let hi = self.hi.clone().max(lo.clone());
        let upper = sqrt_upper(&hi, bits);
        let lower = if upper.is_zero() {
            BigRational::zero()
        } else {
            // lo / upper <= sqrt(lo) because upper^2 >= hi >= lo.
            dyadic_floor(&(&lo / &upper), bits).max(BigRational::zero())
        };
        RatInterval { lo: lower, hi: upper }
    }
}

/// Dyadic upper bound for `sqrt(q)` with error below `2^-bits`; `q >= 0`.
pub fn sqrt_upper(q: &BigRational, bits: u32) -> BigRational {
    if q.is_zero() {
        return BigRational::zero();
    }
    debug_assert!(q.is_positive(), "sqrt of negative rational");
    let one = BigRational::one();
    let two = BigRational::from_integer(2.into());
    // Start above the root: max(1, q) works since sqrt(q) <= max(1, q).
    let mut u = if *q > one { q.clone() } else { one };
    let tol = BigRational::new(BigInt::one(), BigInt::one() << bits);
    loop {
        // Newton step, rounded up to stay an upper bound.
        let next = dyadic_ceil(&((&u + q / &u) / &two), bits + 4);
        // u - q/u bounds the gap between u and sqrt(q).
        if &next - q / &next < tol {
            return next;
        }
        if next >= u {
            // Rounding stalled; precision is as good as this grid allows.
            return u;
        }
        u = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn sqrt_upper_bounds_sqrt2() {
        let two = rat(2, 1);
        let u = sqrt_upper(&two, 64);
        assert!(&u * &u >= two);
        let approx = BigRational::from_f64(1.414_213_562_373_095).unwrap();
        assert!((&u - &approx).abs() < rat(1, 1_000_000_000));
    }

    #[test]
    fn interval_sqrt_contains_value() {
        let iv = RatInterval::new(rat(2, 1), rat(2, 1)).sqrt(50);
        assert!(&iv.lo * &iv.lo <= rat(2, 1));
        assert!(&iv.hi * &iv.hi >= rat(2, 1));
        assert!(iv.width() < rat(1, 1 << 30));
    }

    #[test]
    fn mul_signs() {
        let a = RatInterval::new(rat(-1, 1), rat(2, 1));
        let b = RatInterval::new(rat(-3, 1), rat(1, 2));
        let p = a.mul(&b);
        assert_eq!(p.lo, rat(-6, 1));
        assert_eq!(p.hi, rat(3, 1));
    }

    #[test]
    fn dyadic_rounding_brackets() {
        let q = rat(1, 3);
        let f = dyadic_floor(&q, 10);
        let c = dyadic_ceil(&q, 10);
        assert!(f <= q && q <= c);
        assert!(&c - &f <= rat(1, 512));
    }
}
