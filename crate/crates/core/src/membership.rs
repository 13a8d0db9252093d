//! Witnesses that a number cannot lie in any quadratic tower.
//!
//! Straightedge-and-compass arithmetic lives in fields of degree `2^n` over
//! the rationals. A root of a rational cubic with no rational root therefore
//! generates a degree-3 subfield that no such field can contain — this is the
//! workhorse obstruction behind every impossibility certificate in the crate.
//! For degree-4 targets the analogous test is irreducibility of the quartic
//! together with irreducibility of its resolvent cubic (which pins the Galois
//! group to S4 or A4, whose orders are not powers of two).
//!
//! Positive membership is always shown constructively, by exhibiting a tower
//! element; the witnesses here only certify *non*-membership.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::field::is_rational_square;
use crate::poly::RationalPoly;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum MembershipError {
    #[error("expected a polynomial of degree {expected}, got degree {got:?}")]
    WrongDegree { expected: usize, got: Option<usize> },
    #[error("witness revalidation failed: {0}")]
    Invalid(String),
}

/// Outcome of the cubic certifier: either a reusable exclusion witness or a
/// refusal naming a rational root.
#[derive(Debug, Clone, PartialEq)]
pub enum CubicCertification {
    Excluded(ExclusionWitness),
    RationalRoot(BigRational),
}

/// A machine-checkable reason a target value is outside every quadratic tower
/// (or, for [`ExclusionWitness::NonSquareRational`], outside the rationals).
#[derive(Debug, Clone, PartialEq)]
pub enum ExclusionWitness {
    /// Roots of this rational cubic are irrational, so each generates a
    /// degree-3 extension; 3 does not divide any power of two.
    CubicNoRationalRoot {
        poly: RationalPoly,
        tested: Vec<BigRational>,
    },
    /// `sqrt(radicand)` is irrational because the radicand is not a rational
    /// square; used when a target coordinate is `q1 + q2*sqrt(radicand)` with
    /// `q2 != 0` but the ambient predicate only admits rationals.
    NonSquareRational { radicand: BigRational },
    /// The quartic is irreducible and its resolvent cubic has no rational
    /// root, so the Galois group is S4 or A4 and no root lies in a 2-tower.
    QuarticIrreducibleResolvent {
        quartic: RationalPoly,
        resolvent: RationalPoly,
    },
}

impl ExclusionWitness {
    /// Recompute the witness from scratch.
    pub fn revalidate(&self) -> Result<(), MembershipError> {
        match self {
            ExclusionWitness::CubicNoRationalRoot { poly, .. } => {
                if poly.degree() != Some(3) {
                    return Err(MembershipError::WrongDegree {
                        expected: 3,
                        got: poly.degree(),
                    });
                }
                if let Some(r) = poly.rational_roots().first() {
                    return Err(MembershipError::Invalid(format!(
                        "cubic has rational root {r}"
                    )));
                }
                Ok(())
            }
            ExclusionWitness::NonSquareRational { radicand } => {
                if is_rational_square(radicand) {
                    return Err(MembershipError::Invalid(format!(
                        "{radicand} is a rational square"
                    )));
                }
                Ok(())
            }
            ExclusionWitness::QuarticIrreducibleResolvent { quartic, resolvent } => {
                if quartic.degree() != Some(4) {
                    return Err(MembershipError::WrongDegree {
                        expected: 4,
                        got: quartic.degree(),
                    });
                }
                if !quartic_is_irreducible(quartic) {
                    return Err(MembershipError::Invalid(
                        "quartic is reducible over the rationals".into(),
                    ));
                }
                let expect = resolvent_cubic(quartic)?;
                if expect.make_monic().unwrap() != resolvent.make_monic().unwrap() {
                    return Err(MembershipError::Invalid(
                        "stored resolvent does not match the quartic".into(),
                    ));
                }
                if let Some(r) = resolvent.rational_roots().first() {
                    return Err(MembershipError::Invalid(format!(
                        "resolvent cubic has rational root {r}"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ExclusionWitness::CubicNoRationalRoot { tested, .. } => format!(
                "irreducible rational cubic: none of {} is a root, so every root has degree 3 over Q, \
                 and 3 divides no power of two",
                tested
                    .iter()
                    .map(|t| t.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            ExclusionWitness::NonSquareRational { radicand } => {
                format!("{radicand} is not a rational square, so its square root is irrational")
            }
            ExclusionWitness::QuarticIrreducibleResolvent { .. } => {
                "irreducible quartic with irreducible resolvent cubic: Galois group S4 or A4, \
                 whose order is not a power of two"
                    .to_string()
            }
        }
    }
}

/// Certify that the roots of a rational cubic lie in no quadratic tower.
///
/// Succeeds exactly when the cubic has no rational root (then it is
/// irreducible, its roots have degree 3, and a tower has degree `2^n`);
/// otherwise the refusal names a rational root.
pub fn certify_cubic_not_in_g(p: &RationalPoly) -> Result<CubicCertification, MembershipError> {
    if p.degree() != Some(3) {
        return Err(MembershipError::WrongDegree {
            expected: 3,
            got: p.degree(),
        });
    }
    let roots = p.rational_roots();
    if let Some(r) = roots.first() {
        return Ok(CubicCertification::RationalRoot(r.clone()));
    }
    // Record the candidates the rational-root theorem actually rules out.
    let ints = p.primitive_integer();
    let mut tested: Vec<BigRational> = Vec::new();
    let a0 = ints.first().unwrap().abs();
    let an = ints.last().unwrap().abs();
    if !a0.is_zero() {
        for d in int_divisors(&a0) {
            for q in int_divisors(&an) {
                if d.gcd(&q).is_one() {
                    tested.push(BigRational::new(d.clone(), q.clone()));
                    tested.push(BigRational::new(-d.clone(), q));
                }
            }
        }
    }
    tested.sort();
    tested.dedup();
    Ok(CubicCertification::Excluded(
        ExclusionWitness::CubicNoRationalRoot {
            poly: p.clone(),
            tested,
        },
    ))
}

/// Certify a quartic's roots lie in no quadratic tower via its resolvent.
pub fn certify_quartic_not_in_g(p: &RationalPoly) -> Result<ExclusionWitness, MembershipError> {
    if p.degree() != Some(4) {
        return Err(MembershipError::WrongDegree {
            expected: 4,
            got: p.degree(),
        });
    }
    if !quartic_is_irreducible(p) {
        return Err(MembershipError::Invalid(
            "quartic is reducible; the resolvent obstruction does not apply".into(),
        ));
    }
    let resolvent = resolvent_cubic(p)?;
    if let Some(r) = resolvent.rational_roots().first() {
        return Err(MembershipError::Invalid(format!(
            "resolvent cubic has rational root {r}; roots may be constructible"
        )));
    }
    Ok(ExclusionWitness::QuarticIrreducibleResolvent {
        quartic: p.clone(),
        resolvent,
    })
}

/// Resolvent cubic `y^3 - p y^2 - 4 r y + (4 p r - q^2)` of the depressed
/// quartic `x^4 + p x^2 + q x + r` (the input is depressed first; shifting
/// the variable changes neither reducibility nor the Galois group).
pub fn resolvent_cubic(quartic: &RationalPoly) -> Result<RationalPoly, MembershipError> {
    if quartic.degree() != Some(4) {
        return Err(MembershipError::WrongDegree {
            expected: 4,
            got: quartic.degree(),
        });
    }
    let monic = quartic.make_monic().unwrap();
    let c3 = monic.coeff(3).cloned().unwrap_or_else(BigRational::zero);
    let shift = -c3 / BigRational::from_integer(4.into());
    // Substitute x -> x + shift by synthetic evaluation.
    let shifted = taylor_shift(&monic, &shift);
    let p = shifted.coeff(2).cloned().unwrap_or_else(BigRational::zero);
    let q = shifted.coeff(1).cloned().unwrap_or_else(BigRational::zero);
    let r = shifted.coeff(0).cloned().unwrap_or_else(BigRational::zero);
    let four = BigRational::from_integer(4.into());
    Ok(RationalPoly::from_coeffs(vec![
        &four * &p * &r - &q * &q,
        -&four * &r,
        -p,
        BigRational::one(),
    ]))
}

/// `p(x + a)` by repeated synthetic division.
fn taylor_shift(p: &RationalPoly, a: &BigRational) -> RationalPoly {
    let mut src: Vec<BigRational> = p.coeffs().to_vec();
    let n = src.len();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        // Divide by (x - a): remainder is the next Taylor coefficient.
        let mut rem = BigRational::zero();
        for c in src.iter_mut().rev() {
            rem = &rem * a + &*c;
            *c = rem.clone();
        }
        // src now holds the quotient shifted by one; remainder = src[0].
        let head = src.remove(0);
        out.push(head);
    }
    RationalPoly::from_coeffs(out)
}

/// Exact irreducibility over the rationals for degree-4 polynomials: no
/// rational roots and no monic integer quadratic factorization.
pub fn quartic_is_irreducible(p: &RationalPoly) -> bool {
    if p.degree() != Some(4) {
        return false;
    }
    if !p.rational_roots().is_empty() {
        return false;
    }
    // Turn into a monic integer quartic with the same factorization pattern:
    // if p has leading coefficient a, then a^3 p(y/a) is monic integer in y.
    let ints = p.primitive_integer();
    let a = ints[4].clone();
    let monic: Vec<BigInt> = vec![
        &ints[0] * &a * &a * &a,
        &ints[1] * &a * &a,
        &ints[2] * &a,
        ints[3].clone(),
        BigInt::one(),
    ];
    // (x^2 + a1 x + b)(x^2 + c1 x + d) with integer coefficients.
    let p3 = &monic[3];
    let p2 = &monic[2];
    let p1 = &monic[1];
    let p0 = &monic[0];
    debug_assert!(!p0.is_zero(), "zero constant implies a rational root");
    for b in signed_divisors(p0) {
        let d = p0 / &b;
        // a1 + c1 = p3, a1*c1 = p2 - b - d.
        let s = p3.clone();
        let prod = p2 - &b - &d;
        let disc = &s * &s - BigInt::from(4) * &prod;
        if disc.is_negative() {
            continue;
        }
        let root = disc.sqrt();
        if &root * &root != disc {
            continue;
        }
        for r in [root.clone(), -root] {
            let two = BigInt::from(2);
            let num = &s + &r;
            if (&num % &two).is_zero() {
                let a1 = num / &two;
                let c1 = &s - &a1;
                if &a1 * &d + &c1 * &b == *p1 {
                    return false;
                }
            }
        }
    }
    true
}

fn int_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
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

fn signed_divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    for d in int_divisors(n) {
        out.push(d.clone());
        out.push(-d);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rp(coeffs: &[i64]) -> RationalPoly {
        RationalPoly::from_i64(coeffs)
    }

    #[test]
    fn tangency_cubic_excluded() {
        let p = rp(&[4, -2, -4, 1]);
        match certify_cubic_not_in_g(&p).unwrap() {
            CubicCertification::Excluded(w) => {
                w.revalidate().unwrap();
                // The ruled-out candidates are exactly ±1, ±2, ±4.
                if let ExclusionWitness::CubicNoRationalRoot { tested, .. } = &w {
                    let mut t: Vec<i64> = tested
                        .iter()
                        .map(|q| {
                            assert!(q.is_integer());
                            i64::try_from(q.to_integer()).unwrap()
                        })
                        .collect();
                    t.sort();
                    assert_eq!(t, vec![-4, -2, -1, 1, 2, 4]);
                }
            }
            CubicCertification::RationalRoot(r) => panic!("unexpected rational root {r}"),
        }
    }

    #[test]
    fn cube_root_of_two_excluded() {
        // t^3 - 2: candidates ±1, ±2 fail.
        let p = rp(&[-2, 0, 0, 1]);
        assert!(matches!(
            certify_cubic_not_in_g(&p).unwrap(),
            CubicCertification::Excluded(_)
        ));
    }

    #[test]
    fn t3_minus_1_refused_with_root() {
        let p = rp(&[-1, 0, 0, 1]);
        match certify_cubic_not_in_g(&p).unwrap() {
            CubicCertification::RationalRoot(r) => {
                assert_eq!(r, BigRational::one());
            }
            _ => panic!("expected refusal"),
        }
    }

    #[test]
    fn wrong_degree_rejected() {
        assert!(certify_cubic_not_in_g(&rp(&[1, 1])).is_err());
    }

    #[test]
    fn quartic_with_two_real_roots_excluded() {
        // x^4 - x^2 - 2x + 1: irreducible, resolvent y^3 + y^2 - 4y - 8.
        let q = rp(&[1, -2, -1, 0, 1]);
        let w = certify_quartic_not_in_g(&q).unwrap();
        w.revalidate().unwrap();
        if let ExclusionWitness::QuarticIrreducibleResolvent { resolvent, .. } = &w {
            assert_eq!(resolvent, &rp(&[-8, -4, 1, 1]));
        }
    }

    #[test]
    fn reducible_quartics_rejected() {
        // x^4 - 5x^2 + 4 = (x^2-1)(x^2-4): has rational roots.
        assert!(!quartic_is_irreducible(&rp(&[4, 0, -5, 0, 1])));
        // x^4 + 2x^2 + 1 = (x^2+1)^2: no rational roots, caught by the
        // quadratic-factor branch.
        assert!(!quartic_is_irreducible(&rp(&[1, 0, 2, 0, 1])));
        // x^4 - x^2 - 2x + 1 is irreducible.
        assert!(quartic_is_irreducible(&rp(&[1, -2, -1, 0, 1])));
    }

    #[test]
    fn constructible_quartic_rejected() {
        // x^4 - 2 is irreducible but its roots are constructible; the
        // resolvent y^3 + 8y = y(y^2+8) has the rational root 0.
        let q = rp(&[-2, 0, 0, 0, 1]);
        assert!(certify_quartic_not_in_g(&q).is_err());
    }

    #[test]
    fn non_square_witness() {
        let w = ExclusionWitness::NonSquareRational {
            radicand: BigRational::from_integer(2.into()),
        };
        w.revalidate().unwrap();
        let bad = ExclusionWitness::NonSquareRational {
            radicand: BigRational::from_integer(4.into()),
        };
        assert!(bad.revalidate().is_err());
    }

    #[test]
    fn taylor_shift_correct() {
        // (x+1)^2 = x^2 + 2x + 1 from shifting x^2 by 1.
        let p = rp(&[0, 0, 1]);
        let s = taylor_shift(&p, &BigRational::one());
        assert_eq!(s, rp(&[1, 2, 1]));
    }

    #[test]
    fn resolvent_of_depressed_quartic() {
        // x^4 + px^2 + qx + r with p=-1, q=-2, r=1 (verified by hand):
        // y^3 - p y^2 - 4 r y + 4 p r - q^2 = y^3 + y^2 - 4y - 8.
        let res = resolvent_cubic(&rp(&[1, -2, -1, 0, 1])).unwrap();
        assert_eq!(res, rp(&[-8, -4, 1, 1]));
    }
}
