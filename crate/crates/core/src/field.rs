//! Exact arithmetic in towers of quadratic extensions of the rationals.
//!
//! A [`Tower`] is a chain `Q = F_0 ⊂ F_1 ⊂ … ⊂ F_n` where each level adjoins
//! the square root of a radicand from the level below, verified to be a
//! non-square there before adjunction. An optional final level adjoins a
//! formal square root of −1, which is how complex coordinates are handled.
//! A [`ConstructibleReal`] is a coefficient vector of length `2^n` over the
//! multilinear basis of adjoined radicals, so equality of values in a common
//! tower is coefficient equality, and every adjoined radical denotes the
//! nonnegative real root.
//!
//! Signs of real values are decided by refining rational interval enclosures
//! of the radicals; a nonzero value separates from zero after finitely many
//! refinements because zero is already decided exactly on coefficients.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::interval::RatInterval;

/// Default cap on the tower degree: `2^10`.
pub const DEFAULT_MAX_LEVELS: usize = 10;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("tower degree cap 2^{cap_levels} exceeded (operation needs 2^{needed_levels})")]
    DegreeCapExceeded { cap_levels: usize, needed_levels: usize },
    #[error("negative radicand in a real tower; complexify to take this square root")]
    NegativeRadicand,
    #[error("sign or enclosure query on a value with nonzero imaginary part")]
    NonReal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

/// A tower of quadratic extensions.
///
/// `radicands[k]` is the element of level `k` whose square root generates
/// level `k + 1`, stored as its coefficient vector of length `2^k`. When
/// `complex` is set, one more level adjoining `sqrt(-1)` sits on top; no real
/// radicand is ever adjoined above it (the coefficient layout keeps the
/// imaginary unit as the highest basis bit).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tower {
    radicands: Vec<Vec<BigRational>>,
    complex: bool,
    max_levels: usize,
}

impl Tower {
    pub fn rationals() -> Arc<Tower> {
        Arc::new(Tower {
            radicands: Vec::new(),
            complex: false,
            max_levels: DEFAULT_MAX_LEVELS,
        })
    }

    pub fn rationals_with_cap(max_levels: usize) -> Arc<Tower> {
        Arc::new(Tower {
            radicands: Vec::new(),
            complex: false,
            max_levels: max_levels.min(32),
        })
    }

    /// Number of quadratic levels, counting the complex one.
    pub fn levels(&self) -> usize {
        self.radicands.len() + usize::from(self.complex)
    }

    pub fn real_levels(&self) -> usize {
        self.radicands.len()
    }

    pub fn is_real(&self) -> bool {
        !self.complex
    }

    pub fn max_levels(&self) -> usize {
        self.max_levels
    }

    /// Degree of the tower over the rationals: `2^levels`.
    pub fn degree(&self) -> u64 {
        1u64 << self.levels()
    }

    fn dim(&self) -> usize {
        1usize << self.levels()
    }

    /// The radicand generating level `k`, as an element of the prefix tower.
    pub fn radicand(&self, k: usize) -> ConstructibleReal {
        assert!(k < self.radicands.len());
        let sub = Arc::new(Tower {
            radicands: self.radicands[..k].to_vec(),
            complex: false,
            max_levels: self.max_levels,
        });
        ConstructibleReal {
            coeffs: self.radicands[k].clone(),
            tower: sub,
        }
    }

    fn real_prefix(&self, k: usize) -> Tower {
        Tower {
            radicands: self.radicands[..k].to_vec(),
            complex: false,
            max_levels: self.max_levels,
        }
    }

    /// Interval enclosures for the real radicals `sqrt(r_0), …, sqrt(r_{n-1})`.
    fn radical_enclosures(&self, bits: u32) -> Vec<RatInterval> {
        let mut rads: Vec<RatInterval> = Vec::with_capacity(self.radicands.len());
        for r in &self.radicands {
            let level = r.len().trailing_zeros() as usize;
            let iv = eval_enclosure(r, level, &rads, bits);
            rads.push(iv.sqrt(bits).round_out(bits));
        }
        rads
    }

    /// Floating approximations of the radicals, for prescreening only.
    fn radicals_f64(&self) -> Vec<f64> {
        let mut rads: Vec<f64> = Vec::with_capacity(self.radicands.len());
        for r in &self.radicands {
            let level = r.len().trailing_zeros() as usize;
            let v = eval_f64(r, level, &rads);
            rads.push(if v > 0.0 { v.sqrt() } else { 0.0 });
        }
        rads
    }
}

fn eval_f64(coeffs: &[BigRational], level: usize, rads: &[f64]) -> f64 {
    if level == 0 {
        return rational_to_f64(&coeffs[0]);
    }
    let h = 1usize << (level - 1);
    let (a0, a1) = coeffs.split_at(h);
    let lo = eval_f64(a0, level - 1, rads);
    if vec_is_zero(a1) {
        return lo;
    }
    lo + eval_f64(a1, level - 1, rads) * rads[level - 1]
}

fn rat_zero() -> BigRational {
    BigRational::zero()
}

fn level_of(len: usize) -> usize {
    debug_assert!(len.is_power_of_two());
    len.trailing_zeros() as usize
}

fn vec_is_zero(v: &[BigRational]) -> bool {
    v.iter().all(|c| c.is_zero())
}

fn vec_add(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn vec_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn vec_neg(a: &[BigRational]) -> Vec<BigRational> {
    a.iter().map(|x| -x).collect()
}

fn vec_scale(a: &[BigRational], q: &BigRational) -> Vec<BigRational> {
    a.iter().map(|x| x * q).collect()
}

/// Multiply a level-`k` vector by the level-`k` radicand of level `k` (the
/// generator of level `k + 1`). Above the last stored radicand the generator
/// is the imaginary unit, whose square is −1.
fn mul_by_radicand(tower: &Tower, k: usize, v: &[BigRational]) -> Vec<BigRational> {
    if k < tower.radicands.len() {
        vec_mul(tower, k, &tower.radicands[k], v)
    } else {
        vec_neg(v)
    }
}

/// Karatsuba-style product in `F_k`: `(a0 + a1·w)(b0 + b1·w)` with `w^2 = r`.
fn vec_mul(tower: &Tower, level: usize, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if level == 0 {
        return vec![&a[0] * &b[0]];
    }
    let h = 1usize << (level - 1);
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);
    if vec_is_zero(a1) && vec_is_zero(b1) {
        let mut out = vec_mul(tower, level - 1, a0, b0);
        out.extend(std::iter::repeat_with(rat_zero).take(h));
        return out;
    }
    let m1 = vec_mul(tower, level - 1, a0, b0);
    let m2 = vec_mul(tower, level - 1, a1, b1);
    let s1 = vec_add(a0, a1);
    let s2 = vec_add(b0, b1);
    let m3 = vec_mul(tower, level - 1, &s1, &s2);
    let mut lo = vec_add(&m1, &mul_by_radicand(tower, level - 1, &m2));
    let hi = vec_sub(&vec_sub(&m3, &m1), &m2);
    lo.extend(hi);
    lo
}

fn vec_inv(tower: &Tower, level: usize, a: &[BigRational]) -> Result<Vec<BigRational>, FieldError> {
    if level == 0 {
        if a[0].is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        return Ok(vec![a[0].recip()]);
    }
    let h = 1usize << (level - 1);
    let (x, y) = a.split_at(h);
    if vec_is_zero(y) {
        let mut out = vec_inv(tower, level - 1, x)?;
        out.extend(std::iter::repeat_with(rat_zero).take(h));
        return Ok(out);
    }
    // (x + y·w)^-1 = (x - y·w) / (x^2 - y^2·r); the denominator vanishes only
    // for the zero element because r is a non-square at its level (and the
    // complex level has r = -1, with x^2 + y^2 = 0 only at zero over a real
    // subfield).
    let x2 = vec_mul(tower, level - 1, x, x);
    let y2 = vec_mul(tower, level - 1, y, y);
    let d = vec_sub(&x2, &mul_by_radicand(tower, level - 1, &y2));
    let di = vec_inv(tower, level - 1, &d)?;
    let mut lo = vec_mul(tower, level - 1, x, &di);
    let hi = vec_neg(&vec_mul(tower, level - 1, y, &di));
    lo.extend(hi);
    Ok(lo)
}

/// Exact square root of a nonnegative rational, if it is a rational square.
fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    if q.is_zero() {
        return Some(BigRational::zero());
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

pub fn is_rational_square(q: &BigRational) -> bool {
    rational_sqrt(q).is_some()
}

/// Find an exact square root of `a` inside the level-`level` field, if one
/// exists. The returned root is not sign-normalized.
fn sqrt_in_level(tower: &Tower, level: usize, a: &[BigRational]) -> Option<Vec<BigRational>> {
    if level == 0 {
        return rational_sqrt(&a[0]).map(|s| vec![s]);
    }
    let h = 1usize << (level - 1);
    let (x, y) = a.split_at(h);
    if vec_is_zero(y) {
        if let Some(s) = sqrt_in_level(tower, level - 1, x) {
            let mut out = s;
            out.extend(std::iter::repeat_with(rat_zero).take(h));
            return Some(out);
        }
        // x may be r times a square: x = (v·w)^2 = v^2·r.
        let xr = if level - 1 < tower.radicands.len() {
            let rinv = vec_inv(tower, level - 1, &tower.radicands[level - 1]).ok()?;
            vec_mul(tower, level - 1, x, &rinv)
        } else {
            vec_neg(x)
        };
        if let Some(v) = sqrt_in_level(tower, level - 1, &xr) {
            let mut out = vec![rat_zero(); h];
            out.extend(v);
            return Some(out);
        }
        return None;
    }
    // a = x + y·w = (u + v·w)^2 needs n = u^2 - v^2·r with n^2 = x^2 - y^2·r,
    // and then u^2 = (x ± n)/2, v = y / (2u).
    let x2 = vec_mul(tower, level - 1, x, x);
    let y2 = vec_mul(tower, level - 1, y, y);
    let norm = vec_sub(&x2, &mul_by_radicand(tower, level - 1, &y2));
    let n = sqrt_in_level(tower, level - 1, &norm)?;
    let two = BigRational::from_integer(2.into());
    for cand in [n.clone(), vec_neg(&n)] {
        let half = vec_scale(&vec_add(x, &cand), &(BigRational::one() / &two));
        if let Some(u) = sqrt_in_level(tower, level - 1, &half) {
            if vec_is_zero(&u) {
                continue;
            }
            let uinv = vec_inv(tower, level - 1, &u).ok()?;
            let v = vec_scale(
                &vec_mul(tower, level - 1, y, &uinv),
                &(BigRational::one() / &two),
            );
            let mut out = u;
            out.extend(v);
            return Some(out);
        }
    }
    None
}

/// Evaluate a coefficient vector over the radical enclosures.
fn eval_enclosure(
    coeffs: &[BigRational],
    level: usize,
    rads: &[RatInterval],
    bits: u32,
) -> RatInterval {
    if level == 0 {
        return RatInterval::point(coeffs[0].clone());
    }
    let h = 1usize << (level - 1);
    let (a0, a1) = coeffs.split_at(h);
    let lo = eval_enclosure(a0, level - 1, rads, bits);
    if vec_is_zero(a1) {
        return lo;
    }
    let hi = eval_enclosure(a1, level - 1, rads, bits);
    lo.add(&hi.mul(&rads[level - 1])).round_out(bits)
}

/// An exact element of a quadratic tower.
///
/// Two elements of the same tower are equal iff their coefficient vectors are
/// equal; across towers, equality merges into a compositum first.
#[derive(Debug, Clone)]
pub struct ConstructibleReal {
    tower: Arc<Tower>,
    coeffs: Vec<BigRational>,
}

impl ConstructibleReal {
    pub fn from_rational(q: BigRational) -> Self {
        ConstructibleReal {
            tower: Tower::rationals(),
            coeffs: vec![q],
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()))
    }

    pub fn rational(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    /// The imaginary unit, in the complexified rational tower.
    pub fn i() -> Self {
        ConstructibleReal {
            tower: Arc::new(Tower {
                radicands: Vec::new(),
                complex: true,
                max_levels: DEFAULT_MAX_LEVELS,
            }),
            coeffs: vec![rat_zero(), BigRational::one()],
        }
    }

    pub fn in_tower(tower: &Arc<Tower>, q: BigRational) -> Self {
        let mut coeffs = vec![rat_zero(); tower.dim()];
        coeffs[0] = q;
        ConstructibleReal {
            tower: tower.clone(),
            coeffs,
        }
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        vec_is_zero(&self.coeffs)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.is_rational() {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// True when the imaginary part is exactly zero (always true in a real tower).
    pub fn is_real_valued(&self) -> bool {
        if self.tower.is_real() {
            return true;
        }
        let h = self.coeffs.len() / 2;
        vec_is_zero(&self.coeffs[h..])
    }

    /// Real part, as an element of the real subtower.
    pub fn re(&self) -> ConstructibleReal {
        if self.tower.is_real() {
            return self.clone();
        }
        let h = self.coeffs.len() / 2;
        ConstructibleReal {
            tower: Arc::new(self.tower.real_prefix(self.tower.real_levels())),
            coeffs: self.coeffs[..h].to_vec(),
        }
        .slim()
    }

    /// Imaginary part, as an element of the real subtower.
    pub fn im(&self) -> ConstructibleReal {
        if self.tower.is_real() {
            return ConstructibleReal::zero();
        }
        let h = self.coeffs.len() / 2;
        ConstructibleReal {
            tower: Arc::new(self.tower.real_prefix(self.tower.real_levels())),
            coeffs: self.coeffs[h..].to_vec(),
        }
        .slim()
    }

    /// Complex conjugate (identity on real towers).
    pub fn conj(&self) -> ConstructibleReal {
        if self.tower.is_real() {
            return self.clone();
        }
        let h = self.coeffs.len() / 2;
        let mut coeffs = self.coeffs[..h].to_vec();
        coeffs.extend(vec_neg(&self.coeffs[h..]));
        ConstructibleReal {
            tower: self.tower.clone(),
            coeffs,
        }
    }

    /// Drop unused top levels (and the complex flag when the imaginary part
    /// is zero), keeping the value identical.
    pub fn slim(mut self) -> Self {
        loop {
            let levels = self.tower.levels();
            if levels == 0 {
                return self;
            }
            let h = self.coeffs.len() / 2;
            if !vec_is_zero(&self.coeffs[h..]) {
                return self;
            }
            self.coeffs.truncate(h);
            let t = &*self.tower;
            self.tower = Arc::new(if t.complex {
                Tower {
                    radicands: t.radicands.clone(),
                    complex: false,
                    max_levels: t.max_levels,
                }
            } else {
                t.real_prefix(levels - 1)
            });
        }
    }

    fn lift_into(&self, target: &Arc<Tower>, images: &[Vec<BigRational>]) -> ConstructibleReal {
        let real_dim = 1usize << target.real_levels();
        let src_real_levels = self.tower.real_levels();
        let h = if self.tower.complex {
            self.coeffs.len() / 2
        } else {
            self.coeffs.len()
        };
        let re = embed_real(target, &self.coeffs[..h], src_real_levels, images, real_dim);
        let mut coeffs = re;
        if target.complex {
            let im = if self.tower.complex {
                embed_real(target, &self.coeffs[h..], src_real_levels, images, real_dim)
            } else {
                vec![rat_zero(); real_dim]
            };
            coeffs.extend(im);
        }
        ConstructibleReal {
            tower: target.clone(),
            coeffs,
        }
    }

    /// Interval enclosure of a real-valued element.
    pub fn enclosure(&self, bits: u32) -> Result<RatInterval, FieldError> {
        if !self.is_real_valued() {
            return Err(FieldError::NonReal);
        }
        let re = self.re();
        let rads = re.tower.radical_enclosures(bits);
        Ok(eval_enclosure(&re.coeffs, re.tower.levels(), &rads, bits))
    }

    /// Exact sign, decided by interval refinement.
    pub fn sign(&self) -> Result<Sign, FieldError> {
        if !self.is_real_valued() {
            return Err(FieldError::NonReal);
        }
        if self.is_zero() {
            return Ok(Sign::Zero);
        }
        let mut bits = 32u32;
        loop {
            let iv = self.enclosure(bits)?;
            if iv.lo.is_positive() {
                return Ok(Sign::Positive);
            }
            if iv.hi.is_negative() {
                return Ok(Sign::Negative);
            }
            bits *= 2;
            assert!(
                bits < (1 << 22),
                "interval refinement failed to separate a nonzero value from zero"
            );
        }
    }

    pub fn is_positive_val(&self) -> Result<bool, FieldError> {
        Ok(self.sign()? == Sign::Positive)
    }

    pub fn is_negative_val(&self) -> Result<bool, FieldError> {
        Ok(self.sign()? == Sign::Negative)
    }

    /// Floating approximation for display and figures only.
    pub fn approx_f64(&self) -> f64 {
        let iv = self.enclosure(64).expect("approx of non-real value");
        let m = iv.midpoint();
        rational_to_f64(&m)
    }

    /// Cheap floating approximation of the real part, used only to
    /// prescreen equality tests (an inconclusive screen falls back to
    /// exact arithmetic, so rounding can never flip an answer).
    pub fn approx_fast(&self) -> f64 {
        let rads = self.tower.radicals_f64();
        let h = if self.tower.complex {
            self.coeffs.len() / 2
        } else {
            self.coeffs.len()
        };
        eval_f64(&self.coeffs[..h], self.tower.real_levels(), &rads)
    }

    /// Floating approximation of the imaginary part.
    pub fn approx_fast_im(&self) -> f64 {
        if self.tower.is_real() {
            return 0.0;
        }
        let rads = self.tower.radicals_f64();
        let h = self.coeffs.len() / 2;
        eval_f64(&self.coeffs[h..], self.tower.real_levels(), &rads)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, FieldError> {
        let (a, b) = promote(self, other, true)?;
        Ok(ConstructibleReal {
            coeffs: vec_add(&a.coeffs, &b.coeffs),
            tower: a.tower,
        }
        .slim())
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, FieldError> {
        let (a, b) = promote(self, other, true)?;
        Ok(ConstructibleReal {
            coeffs: vec_sub(&a.coeffs, &b.coeffs),
            tower: a.tower,
        }
        .slim())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, FieldError> {
        let (a, b) = promote(self, other, true)?;
        let coeffs = vec_mul(&a.tower, a.tower.levels(), &a.coeffs, &b.coeffs);
        Ok(ConstructibleReal {
            coeffs,
            tower: a.tower,
        }
        .slim())
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, FieldError> {
        if other.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let (a, b) = promote(self, other, true)?;
        let binv = vec_inv(&b.tower, b.tower.levels(), &b.coeffs)?;
        let coeffs = vec_mul(&a.tower, a.tower.levels(), &a.coeffs, &binv);
        Ok(ConstructibleReal {
            coeffs,
            tower: a.tower,
        }
        .slim())
    }

    pub fn checked_inv(&self) -> Result<Self, FieldError> {
        Self::one().checked_div(self)
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Exact square root. If the value is already a square in its tower the
    /// existing root is returned and the tower does not grow; otherwise a new
    /// level is adjoined (of the real subtower when the value is real-valued).
    /// Negative real values in a real tower are rejected.
    pub fn sqrt_adjoin(&self) -> Result<Self, FieldError> {
        let complex_ctx = !self.tower.is_real();
        let a = self.clone().slim();
        if a.is_zero() {
            return Ok(ConstructibleReal::zero());
        }
        if a.tower.is_real() {
            if a.sign()? == Sign::Negative {
                if !complex_ctx {
                    return Err(FieldError::NegativeRadicand);
                }
                let root = (-&a).sqrt_adjoin()?;
                return Ok(normalize_root_sign(root.checked_mul(&ConstructibleReal::i())?));
            }
            if let Some(root) = sqrt_in_level(&a.tower, a.tower.levels(), &a.coeffs) {
                let r = ConstructibleReal {
                    tower: a.tower.clone(),
                    coeffs: root,
                }
                .slim();
                return Ok(normalize_root_sign(r));
            }
            let needed = a.tower.levels() + 1;
            if needed > a.tower.max_levels {
                return Err(FieldError::DegreeCapExceeded {
                    cap_levels: a.tower.max_levels,
                    needed_levels: needed,
                });
            }
            let mut radicands = a.tower.radicands.clone();
            radicands.push(a.coeffs.clone());
            let tower = Arc::new(Tower {
                radicands,
                complex: false,
                max_levels: a.tower.max_levels,
            });
            let mut coeffs = vec![rat_zero(); tower.dim()];
            coeffs[tower.dim() / 2] = BigRational::one();
            return Ok(ConstructibleReal { tower, coeffs });
        }
        if let Some(root) = sqrt_in_level(&a.tower, a.tower.levels(), &a.coeffs) {
            let r = ConstructibleReal {
                tower: a.tower.clone(),
                coeffs: root,
            };
            return Ok(normalize_root_sign(r));
        }
        // Genuinely complex value not a square in its own tower:
        // |a| = sqrt(re^2 + im^2); u = sqrt((re + |a|)/2) > 0; v = im/(2u).
        let re = a.re();
        let im = a.im();
        let norm = (&re * &re).checked_add(&(&im * &im))?;
        let m = norm.sqrt_adjoin()?;
        let half = ConstructibleReal::rational(1, 2);
        let hsum = re.checked_add(&m)?.checked_mul(&half)?;
        let u = hsum.sqrt_adjoin()?;
        let v = im.checked_div(&u.checked_mul(&ConstructibleReal::from_integer(2))?)?;
        let s = u.checked_add(&v.checked_mul(&ConstructibleReal::i())?)?;
        debug_assert!(s.square() == a);
        Ok(normalize_root_sign(s))
    }

    /// The same value inside the complexified version of its tower.
    pub fn complexified(&self) -> Self {
        if self.tower.complex {
            return self.clone();
        }
        let tower = Arc::new(Tower {
            radicands: self.tower.radicands.clone(),
            complex: true,
            max_levels: self.tower.max_levels,
        });
        let mut coeffs = self.coeffs.clone();
        coeffs.extend(std::iter::repeat_with(rat_zero).take(self.coeffs.len()));
        ConstructibleReal { tower, coeffs }
    }

    pub fn degree(&self) -> u64 {
        self.tower.degree()
    }

    /// Exact comparison of real-valued elements.
    pub fn cmp_exact(&self, other: &Self) -> Result<std::cmp::Ordering, FieldError> {
        let d = self.checked_sub(other).or_else(|_| sub_uncapped(self, other))?;
        Ok(match d.sign()? {
            Sign::Negative => std::cmp::Ordering::Less,
            Sign::Zero => std::cmp::Ordering::Equal,
            Sign::Positive => std::cmp::Ordering::Greater,
        })
    }
}

fn sub_uncapped(a: &ConstructibleReal, b: &ConstructibleReal) -> Result<ConstructibleReal, FieldError> {
    let (x, y) = promote(a, b, false)?;
    Ok(ConstructibleReal {
        coeffs: vec_sub(&x.coeffs, &y.coeffs),
        tower: x.tower,
    }
    .slim())
}

fn rational_to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// Pick the canonical sign for a square root: nonnegative when real-valued,
/// otherwise positive real part (or nonnegative imaginary part on the
/// imaginary axis).
fn normalize_root_sign(r: ConstructibleReal) -> ConstructibleReal {
    let flip = if r.is_real_valued() {
        matches!(r.sign(), Ok(Sign::Negative))
    } else {
        match r.re().sign() {
            Ok(Sign::Negative) => true,
            Ok(Sign::Zero) => matches!(r.im().sign(), Ok(Sign::Negative)),
            _ => false,
        }
    };
    if flip {
        -&r
    } else {
        r
    }
}

/// Embed a real coefficient vector through per-level radical images.
fn embed_real(
    target: &Tower,
    coeffs: &[BigRational],
    src_levels: usize,
    images: &[Vec<BigRational>],
    out_dim: usize,
) -> Vec<BigRational> {
    if src_levels == 0 {
        let mut out = vec![rat_zero(); out_dim];
        out[0] = coeffs[0].clone();
        return out;
    }
    let h = 1usize << (src_levels - 1);
    let (a0, a1) = coeffs.split_at(h);
    let lo = embed_real(target, a0, src_levels - 1, images, out_dim);
    if vec_is_zero(a1) {
        return lo;
    }
    let hi = embed_real(target, a1, src_levels - 1, images, out_dim);
    let t_levels = level_of(out_dim);
    let prod = vec_mul(target, t_levels, &hi, &images[src_levels - 1]);
    vec_add(&lo, &prod)
}

type RadImages = Vec<Vec<BigRational>>;

/// Merge two towers into a compositum. Returns the target and the images of
/// each source's real radicals inside the target's real subtower.
fn merge_towers(
    ta: &Arc<Tower>,
    tb: &Arc<Tower>,
    capped: bool,
) -> Result<(Arc<Tower>, RadImages, RadImages), FieldError> {
    let max_levels = ta.max_levels.max(tb.max_levels);
    let mut rads = ta.radicands.clone();

    // Identity images for A's radicals (padded later).
    let mut images_b: RadImages = Vec::with_capacity(tb.radicands.len());

    for (k, rb) in tb.radicands.iter().enumerate() {
        let cur = Tower {
            radicands: rads.clone(),
            complex: false,
            max_levels,
        };
        let cur_dim = cur.dim();
        let padded: RadImages = images_b
            .iter()
            .map(|img| {
                let mut v = img.clone();
                v.resize(cur_dim, rat_zero());
                v
            })
            .collect();
        let rb_t = embed_real(&cur, rb, k, &padded, cur_dim);
        if let Some(root) = sqrt_in_level(&cur, cur.levels(), &rb_t) {
            // Normalize to the nonnegative root so the embedding matches the
            // convention that every radical denotes the nonnegative root.
            let elem = ConstructibleReal {
                tower: Arc::new(cur),
                coeffs: root,
            };
            let elem = normalize_root_sign(elem);
            let mut v = elem.coeffs;
            v.resize(cur_dim, rat_zero());
            images_b.push(v);
        } else {
            let complex_extra = usize::from(ta.complex || tb.complex);
            let needed = rads.len() + 1 + complex_extra;
            if capped && needed > max_levels {
                return Err(FieldError::DegreeCapExceeded {
                    cap_levels: max_levels,
                    needed_levels: needed,
                });
            }
            rads.push(rb_t);
            let new_dim = cur_dim * 2;
            let mut basis = vec![rat_zero(); new_dim];
            basis[cur_dim] = BigRational::one();
            images_b.push(basis);
        }
    }

    let complex = ta.complex || tb.complex;
    let target = Arc::new(Tower {
        radicands: rads,
        complex,
        max_levels,
    });
    let real_dim = 1usize << target.real_levels();
    let pad = |imgs: RadImages| -> RadImages {
        imgs.into_iter()
            .map(|mut v| {
                v.resize(real_dim, rat_zero());
                v
            })
            .collect()
    };
    let images_a: RadImages = (0..ta.radicands.len())
        .map(|k| {
            let mut v = vec![rat_zero(); real_dim];
            v[1usize << k] = BigRational::one();
            v
        })
        .collect();
    Ok((target, images_a, pad(images_b)))
}

/// Bring two elements into a common tower.
pub fn promote(
    a: &ConstructibleReal,
    b: &ConstructibleReal,
    capped: bool,
) -> Result<(ConstructibleReal, ConstructibleReal), FieldError> {
    if Arc::ptr_eq(&a.tower, &b.tower) || a.tower == b.tower {
        return Ok((a.clone(), b.clone()));
    }
    // Fast path: one tower is a prefix of the other.
    if is_prefix(&b.tower, &a.tower) {
        let images: RadImages = (0..b.tower.radicands.len())
            .map(|k| {
                let mut v = vec![rat_zero(); 1usize << a.tower.real_levels()];
                v[1usize << k] = BigRational::one();
                v
            })
            .collect();
        return Ok((a.clone(), b.lift_into(&a.tower, &images)));
    }
    if is_prefix(&a.tower, &b.tower) {
        let images: RadImages = (0..a.tower.radicands.len())
            .map(|k| {
                let mut v = vec![rat_zero(); 1usize << b.tower.real_levels()];
                v[1usize << k] = BigRational::one();
                v
            })
            .collect();
        return Ok((a.lift_into(&b.tower, &images), b.clone()));
    }
    let (target, ia, ib) = merge_towers(&a.tower, &b.tower, capped)?;
    Ok((a.lift_into(&target, &ia), b.lift_into(&target, &ib)))
}

/// Bring a whole slice of elements into one common tower.
pub fn promote_all(
    values: &[ConstructibleReal],
    capped: bool,
) -> Result<Vec<ConstructibleReal>, FieldError> {
    if values.is_empty() {
        return Ok(Vec::new());
    }
    let mut probe = values[0].clone();
    for v in &values[1..] {
        let (p, _) = promote(&probe, v, capped)?;
        probe = p;
    }
    // A second pass against the accumulated tower cannot grow it further.
    let mut out = Vec::with_capacity(values.len());
    for v in values {
        let (_, lifted) = promote(&probe, v, capped)?;
        out.push(lifted);
    }
    Ok(out)
}

fn is_prefix(small: &Tower, big: &Tower) -> bool {
    small.radicands.len() <= big.radicands.len()
        && small.radicands[..] == big.radicands[..small.radicands.len()]
        && (!small.complex || big.complex)
}

impl PartialEq for ConstructibleReal {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.tower, &other.tower) || self.tower == other.tower {
            return self.coeffs == other.coeffs;
        }
        // Prescreen: clearly different floating values cannot be equal.
        let (ar, ai) = (self.approx_fast(), self.approx_fast_im());
        let (br, bi) = (other.approx_fast(), other.approx_fast_im());
        let scale = 1.0 + ar.abs().max(br.abs()).max(ai.abs()).max(bi.abs());
        let d = (ar - br).abs().max((ai - bi).abs());
        if d.is_finite() && scale.is_finite() && d > 1e-9 * scale {
            return false;
        }
        match promote(self, other, false) {
            Ok((a, b)) => a.coeffs == b.coeffs,
            Err(_) => false,
        }
    }
}

impl Eq for ConstructibleReal {}

impl PartialOrd for ConstructibleReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.cmp_exact(other).ok()
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident, $what:expr) => {
        impl std::ops::$trait for &ConstructibleReal {
            type Output = ConstructibleReal;
            fn $method(self, rhs: &ConstructibleReal) -> ConstructibleReal {
                self.$checked(rhs)
                    .unwrap_or_else(|e| panic!("field {}: {e}", $what))
            }
        }
        impl std::ops::$trait for ConstructibleReal {
            type Output = ConstructibleReal;
            fn $method(self, rhs: ConstructibleReal) -> ConstructibleReal {
                std::ops::$trait::$method(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add, "addition");
forward_binop!(Sub, sub, checked_sub, "subtraction");
forward_binop!(Mul, mul, checked_mul, "multiplication");
forward_binop!(Div, div, checked_div, "division");

impl std::ops::Neg for &ConstructibleReal {
    type Output = ConstructibleReal;
    fn neg(self) -> ConstructibleReal {
        ConstructibleReal {
            tower: self.tower.clone(),
            coeffs: vec_neg(&self.coeffs),
        }
    }
}

impl std::ops::Neg for ConstructibleReal {
    type Output = ConstructibleReal;
    fn neg(self) -> ConstructibleReal {
        -&self
    }
}

impl From<BigRational> for ConstructibleReal {
    fn from(q: BigRational) -> Self {
        ConstructibleReal::from_rational(q)
    }
}

impl From<i64> for ConstructibleReal {
    fn from(n: i64) -> Self {
        ConstructibleReal::from_integer(n)
    }
}

fn fmt_rational(q: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if q.denom().is_one() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

fn fmt_radical(tower: &Tower, k: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if k == tower.radicands.len() {
        return write!(f, "i");
    }
    write!(f, "sqrt(")?;
    fmt_vec(tower, k, &tower.radicands[k], f)?;
    write!(f, ")")
}

fn fmt_vec(
    tower: &Tower,
    level: usize,
    coeffs: &[BigRational],
    f: &mut fmt::Formatter<'_>,
) -> fmt::Result {
    let mut first = true;
    for (idx, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        if first {
            if neg {
                write!(f, "-")?;
            }
            first = false;
        } else if neg {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        let mag = c.abs();
        let mut printed = false;
        if !mag.is_one() || idx == 0 {
            fmt_rational(&mag, f)?;
            printed = true;
        }
        for k in 0..level {
            if idx & (1 << k) != 0 {
                if printed {
                    write!(f, "*")?;
                }
                fmt_radical(tower, k, f)?;
                printed = true;
            }
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for ConstructibleReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_vec(&self.tower, self.tower.levels(), &self.coeffs, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64) -> ConstructibleReal {
        ConstructibleReal::from_integer(n)
    }

    fn sqrt(n: i64) -> ConstructibleReal {
        c(n).sqrt_adjoin().unwrap()
    }

    #[test]
    fn sqrt2_times_sqrt8_is_4() {
        let p = &sqrt(2) * &sqrt(8);
        assert!(p.is_rational());
        assert_eq!(p, c(4));
    }

    #[test]
    fn add_zero_is_identity() {
        let a = &sqrt(2) + &c(3);
        let b = a.checked_add(&c(0)).unwrap();
        assert_eq!(a.coeffs(), b.coeffs());
        assert_eq!(a.tower(), b.tower());
    }

    #[test]
    fn conjugate_product() {
        // (1 + sqrt3)(1 - sqrt3) = -2, expanded by hand: 1 - 3.
        let s3 = sqrt(3);
        let p = &(&c(1) + &s3) * &(&c(1) - &s3);
        assert_eq!(p, c(-2));
    }

    #[test]
    fn sqrt_adjoin_squares_back() {
        let r = sqrt(2);
        assert_eq!(r.square(), c(2));
        assert_eq!(r.degree(), 2);
    }

    #[test]
    fn perfect_square_does_not_grow() {
        let r = sqrt(4);
        assert_eq!(r, c(2));
        assert_eq!(r.degree(), 1);
    }

    #[test]
    fn sqrt_two_thirds_succeeds_and_squares() {
        let q = ConstructibleReal::rational(2, 3);
        assert!(!is_rational_square(q.as_rational().unwrap()));
        let r = q.sqrt_adjoin().unwrap();
        assert!(!r.is_rational());
        assert_eq!(r.square(), q);
    }

    #[test]
    fn nested_root_recognized_as_square() {
        // (1 + sqrt2)^2 = 3 + 2*sqrt2 must be recognized without growth.
        let s2 = sqrt(2);
        let x = &c(3) + &(&c(2) * &s2);
        let r = x.sqrt_adjoin().unwrap();
        assert_eq!(r.degree(), 2);
        assert_eq!(&r * &r, x);
        assert_eq!(r, &c(1) + &s2);
    }

    #[test]
    fn signs_by_refinement() {
        assert_eq!(sqrt(2).sign().unwrap(), Sign::Positive);
        let x = &c(1) - &sqrt(3);
        assert_eq!(x.sign().unwrap(), Sign::Negative);
        let z = &sqrt(2) - &sqrt(2);
        assert_eq!(z.sign().unwrap(), Sign::Zero);
    }

    #[test]
    fn negative_radicand_rejected_in_real_tower() {
        assert_eq!(c(-2).sqrt_adjoin().unwrap_err(), FieldError::NegativeRadicand);
    }

    #[test]
    fn complex_sqrt_of_negative() {
        let m = c(-4).complexified();
        let r = m.sqrt_adjoin().unwrap();
        assert_eq!(r.square(), m);
        assert!(r.re().is_zero());
        assert_eq!(r.im(), c(2));
    }

    #[test]
    fn complex_sqrt_general() {
        // sqrt(3 + 4i) = 2 + i.
        let a = c(3).complexified().checked_add(&(&c(4) * &ConstructibleReal::i())).unwrap();
        let r = a.sqrt_adjoin().unwrap();
        assert_eq!(r.re(), c(2));
        assert_eq!(r.im(), c(1));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(c(1).checked_div(&c(0)).unwrap_err(), FieldError::DivisionByZero);
    }

    #[test]
    fn degree_cap_resource_error() {
        // Nested radicals x_{k+1} = sqrt(x_k + p_k) force a strictly deeper
        // tower each step; the 11th adjunction trips the 2^10 cap.
        let primes = [2i64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31];
        let mut x = ConstructibleReal::in_tower(
            &Tower::rationals_with_cap(10),
            BigRational::from_integer(1.into()),
        );
        let mut err = None;
        for (idx, p) in primes.iter().enumerate() {
            let radicand = x
                .checked_add(&ConstructibleReal::from_integer(*p))
                .unwrap();
            match radicand.sqrt_adjoin() {
                Ok(r) => {
                    assert_eq!(r.degree(), 1 << (idx + 1), "step {idx} should deepen");
                    x = r;
                }
                Err(e) => {
                    err = Some((idx, e));
                    break;
                }
            }
        }
        let (idx, e) = err.expect("cap should trigger");
        assert_eq!(idx, 10);
        assert!(matches!(e, FieldError::DegreeCapExceeded { .. }));
    }

    #[test]
    fn merge_shares_radicals() {
        // sqrt(18) built independently equals 3*sqrt(2) from another tower.
        let a = sqrt(18);
        let b = &c(3) * &sqrt(2);
        assert_eq!(a, b);
    }

    #[test]
    fn ordering_mixed_radicals() {
        assert!(sqrt(2) < sqrt(3));
        assert!(&sqrt(2) + &sqrt(3) > sqrt(5));
    }

    #[test]
    fn display_roundtrippable_shapes() {
        let x = &(&c(1) / &c(2)) + &(&sqrt(3) / &c(2));
        assert_eq!(x.to_string(), "1/2 + 1/2*sqrt(3)");
        let y = &c(0) - &sqrt(2);
        assert_eq!(y.to_string(), "-sqrt(2)");
    }
}
