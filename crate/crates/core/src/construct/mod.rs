//! Straightedge constructions.
//!
//! Each construction validates its preconditions exactly, emits a replayable
//! [`Trace`](crate::trace::Trace) when the result is produced by straightedge
//! moves alone, and returns the constructed objects exactly. The two
//! center-finding algorithms that lean on compass emulation (`gram_centers`
//! and `three_circle_centers`) return a constructibility note recording that
//! every arithmetic step stayed inside quadratic towers, instead of a raw
//! move trace.
//!
//! Free choices ("take any point …") are filled deterministically and
//! recorded as adversary moves, so traces replay byte-for-byte; when a choice
//! happens to be degenerate the construction retries with the next candidate.

use thiserror::Error;

use crate::field::{ConstructibleReal, FieldError, Sign};
use crate::geom::{GeomError, ProjPoint};
use crate::trace::TraceError;

mod circles;
mod gram;
mod parallel;
mod pascal;
mod poncelet;
mod three_circles;

pub use circles::{center_of_concentric, centers_of_intersecting_circles, tangents_from_point};
// pub use gram::{gram_centers, ConstructibilityNote};
pub use parallel::{midpoint_from_parallel, parallel_from_midpoint};
// pub use pascal::pascal_second_intersection;
// pub use poncelet::{poncelet_quad, PonceletReport};
// pub use three_circles::three_circle_centers;

type C = ConstructibleReal;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ConstructError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("construction degenerated after retries: {0}")]
    Degenerate(String),
}

pub(crate) fn precondition(msg: impl Into<String>) -> ConstructError {
    ConstructError::Precondition(msg.into())
}

/// Affine coordinates of a finite point.
pub(crate) fn affine(p: &ProjPoint) -> Result<(C, C), ConstructError> {
    Ok(p.affine()?)
}

/// Quarter-turn of a direction vector; used only to pick helper points off a
/// given line, never as a geometric primitive.
pub(crate) fn rot90(dx: &C, dy: &C) -> (C, C) {
    (-dy, dx.clone())
}

/// The exact midpoint `(a + b) / 2` of two finite points.
pub(crate) fn midpoint_of(a: &ProjPoint, b: &ProjPoint) -> Result<ProjPoint, ConstructError> {
    let (ax, ay) = affine(a)?;
    let (bx, by) = affine(b)?;
    let two = C::from_integer(2);
    Ok(ProjPoint::from_affine(
        (&ax + &bx).checked_div(&two)?,
        (&ay + &by).checked_div(&two)?,
    )?)
}

/// Exact roots of `a·t² + b·t + c` over a tower, with multiplicities.
/// `a` must be nonzero; the tower grows when the discriminant is not a
/// square, and complexifies when it is negative.
pub(crate) fn solve_quadratic(a: &C, b: &C, c: &C) -> Result<Vec<(C, u8)>, ConstructError> {
    assert!(!a.is_zero(), "solve_quadratic needs a quadratic");
    let four = C::from_integer(4);
    let two = C::from_integer(2);
    let disc = &(b * b) - &(&four * &(a * c));
    if disc.is_zero() {
        let r = (-b).checked_div(&(&two * a))?;
        return Ok(vec![(r, 2)]);
    }
    let disc = if disc.is_real_valued() && disc.sign()? == Sign::Negative {
        disc.complexified()
    } else {
        disc
    };
    let s = disc.sqrt_adjoin()?;
    let den = &two * a;
    Ok(vec![
        ((&-b + &s).checked_div(&den)?, 1),
        ((&-b - &s).checked_div(&den)?, 1),
    ])
}

/// Position of a point relative to a conic with an interior (same-sign test
/// against the value at the conic's center).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ConicSide {
    Inside,
    On,
    Outside,
}

pub(crate) fn side_of_conic(
    p: &ProjPoint,
    conic: &crate::geom::Conic,
) -> Result<ConicSide, ConstructError> {
    let v = conic.eval(p);
    if v.is_zero() {
        return Ok(ConicSide::On);
    }
    let center = conic.center()?;
    let at_center = conic.eval(&center);
    // Normalize against z so projective scaling cannot flip the sign.
    let z2 = p.z() * p.z();
    let cz2 = center.z() * center.z();
    let sp = v.checked_div(&z2)?.sign()?;
    let sc = at_center.checked_div(&cz2)?.sign()?;
    Ok(if sp == sc {
        ConicSide::Inside
    } else {
        ConicSide::Outside
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Conic;

    #[test]
    fn side_of_unit_circle() {
        let c = Conic::unit_circle();
        assert_eq!(
            side_of_conic(&ProjPoint::from_i64(0, 0), &c).unwrap(),
            ConicSide::Inside
        );
        assert_eq!(
            side_of_conic(&ProjPoint::from_i64(1, 0), &c).unwrap(),
            ConicSide::On
        );
        assert_eq!(
            side_of_conic(&ProjPoint::from_i64(0, 2), &c).unwrap(),
            ConicSide::Outside
        );
    }

    #[test]
    fn quadratic_roots_real_and_double() {
        let two = C::from_integer(2);
        // t² - 3t + 2 = 0 → {1, 2}.
        let roots = solve_quadratic(&C::one(), &C::from_integer(-3), &two).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().any(|(r, _)| *r == C::one()));
        assert!(roots.iter().any(|(r, _)| *r == two));
        // t² - 2t + 1 = 0 → double root 1.
        let roots = solve_quadratic(&C::one(), &C::from_integer(-2), &C::one()).unwrap();
        assert_eq!(roots, vec![(C::one(), 2)]);
        // t² + 1 = 0 → ±i.
        let roots = solve_quadratic(&C::one(), &C::zero(), &C::one()).unwrap();
        assert_eq!(roots.len(), 2);
        for (r, _) in &roots {
            assert!(!r.is_real_valued());
            assert_eq!(r.square(), C::from_integer(-1).complexified());
        }
    }
}
