//! Dense univariate polynomials over an exact field.
//!
//! One implementation serves both coefficient fields used by the kernel:
//! plain rationals ([`RationalPoly`]) and tower elements
//! (`Poly<ConstructibleReal>`). Division, Euclidean gcd and resultants work
//! over any [`CoeffField`]; rational-root search, Sturm sequences and real
//! root isolation are specific to rational coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::field::{ConstructibleReal, FieldError};
use crate::interval::RatInterval;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum PolyError {
    #[error("polynomial division by zero")]
    DivisionByZero,
    #[error("gcd of two zero polynomials")]
    BothZero,
    #[error("resultant of polynomials with no dependence on the eliminated variable")]
    ResultantDegenerate,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Field operations a polynomial coefficient must support. Zero and one are
/// prototype-based so tower elements can stay tied to their tower.
pub trait CoeffField: Clone + PartialEq + std::fmt::Debug {
    fn czero(&self) -> Self;
    fn cone(&self) -> Self;
    fn cadd(&self, o: &Self) -> Result<Self, PolyError>;
    fn csub(&self, o: &Self) -> Result<Self, PolyError>;
    fn cmul(&self, o: &Self) -> Result<Self, PolyError>;
    fn cinv(&self) -> Result<Self, PolyError>;
    fn cneg(&self) -> Self;
    fn is_zero_c(&self) -> bool;
    fn cfrom_u32(&self, n: u32) -> Self;
}

impl CoeffField for BigRational {
    fn czero(&self) -> Self {
        BigRational::zero()
    }
    fn cone(&self) -> Self {
        BigRational::one()
    }
    fn cadd(&self, o: &Self) -> Result<Self, PolyError> {
        Ok(self + o)
    }
    fn csub(&self, o: &Self) -> Result<Self, PolyError> {
        Ok(self - o)
    }
    fn cmul(&self, o: &Self) -> Result<Self, PolyError> {
        Ok(self * o)
    }
    fn cinv(&self) -> Result<Self, PolyError> {
        if self.is_zero() {
            Err(PolyError::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }
    fn cneg(&self) -> Self {
        -self
    }
    fn is_zero_c(&self) -> bool {
        self.is_zero()
    }
    fn cfrom_u32(&self, n: u32) -> Self {
        BigRational::from_integer(n.into())
    }
}

impl CoeffField for ConstructibleReal {
    fn czero(&self) -> Self {
        ConstructibleReal::zero()
    }
    fn cone(&self) -> Self {
        ConstructibleReal::one()
    }
    fn cadd(&self, o: &Self) -> Result<Self, PolyError> {
        Ok(self.checked_add(o)?)
    }
    fn csub(&self, o: &Self) -> Result<Self, PolyError> {
        Ok(self.checked_sub(o)?)
    }
    fn cmul(&self, o: &Self) -> Result<Self, PolyError> {
        Ok(self.checked_mul(o)?)
    }
    fn cinv(&self) -> Result<Self, PolyError> {
        Ok(self.checked_inv()?)
    }
    fn cneg(&self) -> Self {
        -self
    }
    fn is_zero_c(&self) -> bool {
        self.is_zero()
    }
    fn cfrom_u32(&self, n: u32) -> Self {
        ConstructibleReal::from_integer(n as i64)
    }
}

/// Coefficients from the constant term up; the leading coefficient is nonzero
/// unless the polynomial is zero (empty vector).
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

pub type RationalPoly = Poly<BigRational>;
pub type TowerPoly = Poly<ConstructibleReal>;

impl<T: CoeffField> Poly<T> {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero_c()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn monomial(c: T, deg: usize) -> Self {
        if c.is_zero_c() {
            return Self::zero();
        }
        let mut coeffs = vec![c.czero(); deg];
        coeffs.push(c);
        Poly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Option<&T> {
        self.coeffs.get(i)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        let (long, short) = if self.coeffs.len() >= other.coeffs.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = long.coeffs.clone();
        for (i, c) in short.coeffs.iter().enumerate() {
            out[i] = out[i].cadd(c)?;
        }
        Ok(Self::from_coeffs(out))
    }

    pub fn neg(&self) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(|c| c.cneg()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let z = self.coeffs[0].czero();
        let mut out = vec![z; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero_c() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].cadd(&a.cmul(b)?)?;
            }
        }
        Ok(Self::from_coeffs(out))
    }

    pub fn scale(&self, c: &T) -> Result<Self, PolyError> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a.cmul(c)?);
        }
        Ok(Self::from_coeffs(out))
    }

    pub fn square(&self) -> Result<Self, PolyError> {
        self.mul(self)
    }

    pub fn eval(&self, x: &T) -> Result<T, PolyError> {
        let mut acc = x.czero();
        for c in self.coeffs.iter().rev() {
            acc = acc.cmul(x)?.cadd(c)?;
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Result<Self, PolyError> {
        if self.coeffs.len() <= 1 {
            return Ok(Self::zero());
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            out.push(c.cmul(&c.cfrom_u32(i as u32))?);
        }
        Ok(Self::from_coeffs(out))
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn divmod(&self, d: &Self) -> Result<(Self, Self), PolyError> {
        if d.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        if self.degree() < d.degree() {
            return Ok((Self::zero(), self.clone()));
        }
        let lead_inv = d.leading().unwrap().cinv()?;
        let mut rem = self.coeffs.clone();
        let dn = d.coeffs.len();
        let qn = rem.len() - dn + 1;
        let z = lead_inv.czero();
        let mut q = vec![z; qn];
        for k in (0..qn).rev() {
            let factor = rem[k + dn - 1].cmul(&lead_inv)?;
            if factor.is_zero_c() {
                continue;
            }
            for (i, dc) in d.coeffs.iter().enumerate() {
                rem[k + i] = rem[k + i].csub(&factor.cmul(dc)?)?;
            }
            q[k] = factor;
        }
        Ok((Self::from_coeffs(q), Self::from_coeffs(rem)))
    }

    pub fn rem(&self, d: &Self) -> Result<Self, PolyError> {
        Ok(self.divmod(d)?.1)
    }

    pub fn make_monic(&self) -> Result<Self, PolyError> {
        match self.leading() {
            None => Ok(Self::zero()),
            Some(l) => self.scale(&l.cinv()?),
        }
    }

    /// Monic greatest common divisor by the Euclidean algorithm.
    pub fn gcd(&self, other: &Self) -> Result<Self, PolyError> {
        if self.is_zero() && other.is_zero() {
            return Err(PolyError::BothZero);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        a.make_monic()
    }
}

/// Resultant in `y` of `a1·y² + b1·y + c1` and `a2·y² + b2·y + c2`, whose
/// coefficients are polynomials in another variable. Both inputs must
/// actually involve `y`.
pub fn resultant_quadratics<T: CoeffField>(
    q1: (&Poly<T>, &Poly<T>, &Poly<T>),
    q2: (&Poly<T>, &Poly<T>, &Poly<T>),
) -> Result<Poly<T>, PolyError> {
    let (a1, b1, c1) = q1;
    let (a2, b2, c2) = q2;
    let d1 = if !a1.is_zero() {
        2
    } else if !b1.is_zero() {
        1
    } else {
        0
    };
    let d2 = if !a2.is_zero() {
        2
    } else if !b2.is_zero() {
        1
    } else {
        0
    };
    match (d1, d2) {
        (2, 2) => {
            // (a1 c2 − a2 c1)² − (a1 b2 − a2 b1)(b1 c2 − b2 c1)
            let t1 = a1.mul(c2)?.sub(&a2.mul(c1)?)?;
            let t2 = a1.mul(b2)?.sub(&a2.mul(b1)?)?;
            let t3 = b1.mul(c2)?.sub(&b2.mul(c1)?)?;
            t1.square()?.sub(&t2.mul(&t3)?)
        }
        (2, 1) => res_quad_lin(a1, b1, c1, b2, c2),
        (1, 2) => res_quad_lin(a2, b2, c2, b1, c1),
        (1, 1) => b1.mul(c2)?.sub(&b2.mul(c1)?),
        _ => Err(PolyError::ResultantDegenerate),
    }
}

/// Res_y(a·y² + b·y + c, d·y + e) = a·e² − b·d·e + c·d².
fn res_quad_lin<T: CoeffField>(
    a: &Poly<T>,
    b: &Poly<T>,
    c: &Poly<T>,
    d: &Poly<T>,
    e: &Poly<T>,
) -> Result<Poly<T>, PolyError> {
    let t1 = a.mul(&e.square()?)?;
    let t2 = b.mul(d)?.mul(e)?;
    let t3 = c.mul(&d.square()?)?;
    t1.sub(&t2)?.add(&t3)
}

impl RationalPoly {
    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(
            coeffs
                .iter()
                .map(|&n| BigRational::from_integer(n.into()))
                .collect(),
        )
    }

    /// Scale to integer coefficients with content 1 (sign of the leading
    /// coefficient preserved).
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = den.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        if g.is_zero() || g.is_one() {
            ints
        } else {
            ints.iter().map(|c| c / &g).collect()
        }
    }

    /// All rational roots, found via the rational-root theorem on the
    /// primitive integer form.
    pub fn rational_roots(&self) -> Vec<BigRational> {
        assert!(!self.is_zero(), "rational roots of the zero polynomial");
        let mut roots = Vec::new();
        let mut ints = self.primitive_integer();
        // Strip x^k.
        let mut k = 0;
        while ints.first().is_some_and(|c| c.is_zero()) {
            ints.remove(0);
            k += 1;
        }
        if k > 0 {
            roots.push(BigRational::zero());
        }
        if ints.len() <= 1 {
            return roots;
        }
        let a0 = ints.first().unwrap().abs();
        let an = ints.last().unwrap().abs();
        for p in divisors(&a0) {
            for q in divisors(&an) {
                if p.gcd(&q) != BigInt::one() {
                    continue;
                }
                for cand in [
                    BigRational::new(p.clone(), q.clone()),
                    BigRational::new(-p.clone(), q.clone()),
                ] {
                    if self.eval(&cand).unwrap().is_zero() && !roots.contains(&cand) {
                        roots.push(cand);
                    }
                }
            }
        }
        roots.sort();
        roots
    }

    fn signum_at(&self, x: &BigRational) -> i8 {
        let v = self.eval(x).unwrap();
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    /// Sturm sequence of the squarefree part.
    fn sturm_sequence(&self) -> Vec<RationalPoly> {
        let d = self.derivative().unwrap();
        let sf = if d.is_zero() {
            self.clone()
        } else {
            let g = self.gcd(&d).unwrap();
            self.divmod(&g).unwrap().0
        };
        let mut seq = vec![sf.clone()];
        let d1 = sf.derivative().unwrap();
        if d1.is_zero() {
            return seq;
        }
        seq.push(d1);
        loop {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]).unwrap();
            if r.is_zero() {
                return seq;
            }
            seq.push(r.neg());
        }
    }

    fn sign_variations(seq: &[RationalPoly], x: &BigRational) -> usize {
        let mut vars = 0;
        let mut last = 0i8;
        for p in seq {
            let s = p.signum_at(x);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                vars += 1;
            }
            last = s;
        }
        vars
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_real_roots_between(&self, a: &BigRational, b: &BigRational) -> usize {
        let seq = self.sturm_sequence();
        Self::sign_variations(&seq, a).saturating_sub(Self::sign_variations(&seq, b))
    }

    /// A bound `M` with all real roots in `(-M, M)`.
    pub fn root_bound(&self) -> BigRational {
        let lead = self.leading().expect("root bound of zero polynomial").abs();
        let mut m = BigRational::zero();
        for c in &self.coeffs {
            let q = c.abs() / lead.clone();
            if q > m {
                m = q;
            }
        }
        m + BigRational::from_integer(2.into())
    }

    /// Disjoint isolating intervals for every distinct real root, sorted.
    /// Point intervals mark exact rational roots discovered on the way.
    pub fn isolate_real_roots(&self) -> Vec<RatInterval> {
        assert!(!self.is_zero());
        if self.degree() == Some(0) {
            return Vec::new();
        }
        let seq = self.sturm_sequence();
        let sf = &seq[0];
        let m = self.root_bound();
        let mut lo = -m.clone();
        let mut hi = m;
        // Endpoints must not be roots; the bound is strict so just in case.
        while sf.signum_at(&lo) == 0 {
            lo = &lo - BigRational::one();
        }
        while sf.signum_at(&hi) == 0 {
            hi = &hi + BigRational::one();
        }
        let mut out = Vec::new();
        isolate_rec(sf, &seq, lo, hi, &mut out);
        out
    }

    /// Shrink an isolating interval below `width` by bisection.
    pub fn refine_root(&self, iv: &RatInterval, width: &BigRational) -> RatInterval {
        let mut lo = iv.lo.clone();
        let mut hi = iv.hi.clone();
        let two = BigRational::from_integer(2.into());
        let s_lo = self.signum_at(&lo);
        let mut s_lo = if s_lo == 0 {
            return RatInterval::point(lo);
        } else {
            s_lo
        };
        if self.signum_at(&hi) == 0 {
            return RatInterval::point(hi);
        }
        while &hi - &lo > *width {
            let mid = (&lo + &hi) / &two;
            let s = self.signum_at(&mid);
            if s == 0 {
                return RatInterval::point(mid);
            }
            if s == s_lo {
                lo = mid;
            } else {
                hi = mid;
                let _ = &mut s_lo;
            }
        }
        RatInterval::new(lo, hi)
    }
}

fn isolate_rec(
    sf: &RationalPoly,
    seq: &[RationalPoly],
    lo: BigRational,
    hi: BigRational,
    out: &mut Vec<RatInterval>,
) {
    let n = RationalPoly::sign_variations(seq, &lo)
        .saturating_sub(RationalPoly::sign_variations(seq, &hi));
    match n {
        0 => {}
        1 => out.push(RatInterval::new(lo, hi)),
        _ => {
            let two = BigRational::from_integer(2.into());
            let mut mid = (&lo + &hi) / &two;
            if sf.signum_at(&mid) == 0 {
                // Exact root at the midpoint: register it and sidestep so the
                // endpoints used for counting are never roots.
                out.push(RatInterval::point(mid.clone()));
                let mut w = (&hi - &lo) / BigRational::from_integer(4.into());
                loop {
                    let l = &mid - &w;
                    let r = &mid + &w;
                    if sf.signum_at(&l) != 0
                        && sf.signum_at(&r) != 0
                        && sf.count_real_roots_between(&l, &r) == 1
                    {
                        isolate_rec(sf, seq, lo, l, out);
                        isolate_rec(sf, seq, r, hi, out);
                        out.sort_by(|a, b| a.lo.cmp(&b.lo));
                        return;
                    }
                    w = &w / &two;
                }
            }
            while sf.signum_at(&mid) == 0 {
                mid = (&lo + &mid) / &two;
            }
            isolate_rec(sf, seq, lo, mid.clone(), out);
            isolate_rec(sf, seq, mid, hi, out);
        }
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return vec![];
    }
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let q = &n / &d;
            if q != d {
                out.push(q);
            }
        }
        d += BigInt::one();
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rp(coeffs: &[i64]) -> RationalPoly {
        RationalPoly::from_i64(coeffs)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn tangency_cubic_has_no_rational_roots() {
        // t^3 - 4t^2 - 2t + 4: candidate integer roots divide 4.
        let p = rp(&[4, -2, -4, 1]);
        assert!(p.rational_roots().is_empty());
        for t in [1i64, -1, 2, -2, 4, -4] {
            assert!(!p.eval(&rat(t, 1)).unwrap().is_zero());
        }
    }

    #[test]
    fn roots_of_factored_cubic() {
        // (t-1)(t-2)(t-3) = t^3 - 6t^2 + 11t - 6, factored by hand.
        let p = rp(&[-6, 11, -6, 1]);
        assert_eq!(p.rational_roots(), vec![rat(1, 1), rat(2, 1), rat(3, 1)]);
    }

    #[test]
    fn roots_of_t2_minus_1() {
        let p = rp(&[-1, 0, 1]);
        assert_eq!(p.rational_roots(), vec![rat(-1, 1), rat(1, 1)]);
    }

    #[test]
    fn gcd_of_hand_factored_pair() {
        // gcd(t^2 - 1, t^2 - t) = t - 1.
        let g = rp(&[-1, 0, 1]).gcd(&rp(&[0, -1, 1])).unwrap();
        assert_eq!(g, rp(&[-1, 1]));
    }

    #[test]
    fn gcd_with_zero_is_monic_self() {
        let g = rp(&[2, 4]).gcd(&RationalPoly::zero()).unwrap();
        assert_eq!(g, rp(&[1, 2]).scale(&rat(1, 2)).unwrap());
    }

    #[test]
    fn gcd_divides_both() {
        let a = rp(&[-2, 1]).mul(&rp(&[3, 1])).unwrap().mul(&rp(&[1, 1])).unwrap();
        let b = rp(&[-2, 1]).mul(&rp(&[3, 1])).unwrap().mul(&rp(&[5, 7])).unwrap();
        let g = a.gcd(&b).unwrap();
        assert!(a.rem(&g).unwrap().is_zero());
        assert!(b.rem(&g).unwrap().is_zero());
        assert_eq!(g.degree(), Some(2));
    }

    #[test]
    fn tower_poly_gcd() {
        use crate::field::ConstructibleReal as C;
        let s2 = C::from_integer(2).sqrt_adjoin().unwrap();
        // (x - sqrt2)(x + 1) and (x - sqrt2)(x - 3) share x - sqrt2.
        let root = |r: &C| TowerPoly::from_coeffs(vec![-r, C::one()]);
        let a = root(&s2).mul(&root(&C::from_integer(-1))).unwrap();
        let b = root(&s2).mul(&root(&C::from_integer(3))).unwrap();
        let g = a.gcd(&b).unwrap();
        assert_eq!(g, root(&s2));
    }

    #[test]
    fn isolate_cubic_roots_near_reported_values() {
        let p = rp(&[4, -2, -4, 1]);
        let ivs = p.isolate_real_roots();
        assert_eq!(ivs.len(), 3);
        let approx = [rat(-110, 100), rat(85, 100), rat(425, 100)];
        for (iv, a) in ivs.iter().zip(&approx) {
            let r = p.refine_root(iv, &rat(1, 1 << 12));
            assert!((r.midpoint() - a).abs() <= rat(1, 100));
        }
    }

    #[test]
    fn sturm_counts_quartic_real_roots() {
        // x^4 - x^2 - 2x + 1 has exactly two real roots.
        let p = rp(&[1, -2, -1, 0, 1]);
        assert_eq!(p.isolate_real_roots().len(), 2);
    }

    #[test]
    fn resultant_of_two_unit_parabolas() {
        // Res_y(y - x^2, y - 2x^2) vanishes exactly where the curves share a
        // point, i.e. at x = 0 with multiplicity two.
        let zero = RationalPoly::zero();
        let one = rp(&[1]);
        let mx2 = rp(&[0, 0, -1]);
        let m2x2 = rp(&[0, 0, -2]);
        let r = resultant_quadratics((&zero, &one, &mx2), (&zero, &one, &m2x2)).unwrap();
        assert_eq!(r.make_monic().unwrap(), rp(&[0, 0, 1]));
    }
}
