//! Parallels and midpoints: the two directions of the classical equivalence.
//!
//! With the midpoint of a segment marked, the line through any external point
//! parallel to the segment is a complete-quadrilateral (harmonic) exercise;
//! with a parallel line given, the midpoint falls out of the trapezoid whose
//! legs meet at an apex. Both need one free point, which is requested from
//! the adversary and recorded in the trace.

use crate::field::ConstructibleReal;
use crate::geom::{incident, join, meet, ProjLine, ProjPoint};
use crate::trace::{PointId, Region, Trace, TraceBuilder, TraceScene};

use super::{affine, midpoint_of, precondition, rot90, ConstructError};

type C = ConstructibleReal;

/// Line through `p` parallel to `ab`, given the exact midpoint `m` of `ab`.
pub fn parallel_from_midpoint(
    a: &ProjPoint,
    b: &ProjPoint,
    m: &ProjPoint,
    p: &ProjPoint,
) -> Result<(ProjLine, Trace), ConstructError> {
    if a == b {
        return Err(precondition("segment endpoints coincide"));
    }
    if *m != midpoint_of(a, b)? {
        return Err(precondition("M is not the midpoint of AB"));
    }
    let ab = join(a, b)?;
    if incident(p, &ab) {
        return Err(precondition("P lies on line AB"));
    }

    let (ax, ay) = affine(a)?;
    let (px, py) = affine(p)?;
    let two = C::from_integer(2);

    // The free point S sits on line AP beyond P; S = A + k (P − A).
    let mut last_err = None;
    for k in 2i64..6 {
        let kk = C::from_integer(k);
        let sx = &ax + &(&kk * &(&px - &ax));
        let sy = &ay + &(&kk * &(&py - &ay));
        match attempt(a, b, m, p, sx, sy) {
            Ok(out) => return Ok(out),
            Err(e) => last_err = Some(e),
        }
    }
    let _ = two;
    Err(last_err.unwrap_or_else(|| ConstructError::Degenerate("no viable free point".into())))
}

fn attempt(
    a: &ProjPoint,
    b: &ProjPoint,
    m: &ProjPoint,
    p: &ProjPoint,
    sx: C,
    sy: C,
) -> Result<(ProjLine, Trace), ConstructError> {
    let scene = TraceScene {
        points: vec![a.clone(), b.clone(), m.clone(), p.clone()],
        lines: vec![],
        curves: vec![],
    };
    let (ia, ib, im, ip) = (PointId(0), PointId(1), PointId(2), PointId(3));
    let mut t = TraceBuilder::new(scene);
    let l_ab = t.draw_line(ia, ib)?;
    let l_ap = t.draw_line(ia, ip)?;
    let is = t.adversary(Region::OnLine(l_ap), sx, sy)?;
    // Harmonic-conjugate quadrilateral with apex S and P on line SA:
    // R = PB ∩ SM, T = AR ∩ SB; PT passes through the point at infinity of AB.
    let l_sb = t.draw_line(is, ib)?;
    let l_sm = t.draw_line(is, im)?;
    let l_pb = t.draw_line(ip, ib)?;
    let ir = t.mark_meet(l_pb, l_sm)?;
    let l_ar = t.draw_line(ia, ir)?;
    let it = t.mark_meet(l_ar, l_sb)?;
    let l_out = t.draw_line(ip, it)?;
    t.claim_line("parallel", l_out);

    let out = t.line(l_out).clone();
    if !meet(&out, t.line(l_ab))?.is_at_infinity() {
        return Err(ConstructError::Degenerate(
            "constructed line is not parallel to AB".into(),
        ));
    }
    Ok((out, t.finish()))
}

/// Midpoint of `ab` given a line `l` parallel to it.
pub fn midpoint_from_parallel(
    a: &ProjPoint,
    b: &ProjPoint,
    l: &ProjLine,
) -> Result<(ProjPoint, Trace), ConstructError> {
    if a == b {
        return Err(precondition("segment endpoints coincide"));
    }
    let ab = join(a, b)?;
    if *l == ab {
        return Err(precondition("the parallel line coincides with AB"));
    }
    if !meet(l, &ab)?.is_at_infinity() {
        return Err(precondition("the given line is not parallel to AB"));
    }

    let (ax, ay) = affine(a)?;
    let (bx, by) = affine(b)?;
    let (nx, ny) = rot90(&(&bx - &ax), &(&by - &ay));

    let mut last_err = None;
    for k in 1i64..5 {
        let kk = C::from_integer(k);
        let sx = &ax + &(&kk * &nx);
        let sy = &ay + &(&kk * &ny);
        let s = ProjPoint::from_affine(sx.clone(), sy.clone())?;
        if incident(&s, l) || incident(&s, &ab) {
            continue;
        }
        match attempt_midpoint(a, b, l, sx, sy) {
            Ok(out) => return Ok(out),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| ConstructError::Degenerate("no viable apex point".into())))
}

fn attempt_midpoint(
    a: &ProjPoint,
    b: &ProjPoint,
    l: &ProjLine,
    sx: C,
    sy: C,
) -> Result<(ProjPoint, Trace), ConstructError> {
    let scene = TraceScene {
        points: vec![a.clone(), b.clone()],
        lines: vec![l.clone()],
        curves: vec![],
    };
    let (ia, ib) = (PointId(0), PointId(1));
    let il = crate::trace::LineId(0);
    let mut t = TraceBuilder::new(scene);
    let l_ab = t.draw_line(ia, ib)?;
    let is = t.adversary(Region::OffLines(vec![l_ab, il]), sx, sy)?;
    // Trapezoid legs through the apex cut the parallel at C and D; the line
    // through the apex and the diagonal meet bisects both parallel sides.
    let l_sa = t.draw_line(is, ia)?;
    let l_sb = t.draw_line(is, ib)?;
    let ic = t.mark_meet(l_sa, il)?;
    let id = t.mark_meet(l_sb, il)?;
    let l_ad = t.draw_line(ia, id)?;
    let l_bc = t.draw_line(ib, ic)?;
    let io = t.mark_meet(l_ad, l_bc)?;
    let l_so = t.draw_line(is, io)?;
    let imid = t.mark_meet(l_so, l_ab)?;
    t.claim_point("midpoint", imid);

    let got = t.point(imid).clone();
    let expect = midpoint_of(a, b)?;
    if got != expect {
        return Err(ConstructError::Degenerate(
            "trapezoid construction missed the midpoint".into(),
        ));
    }
    Ok((got, t.finish()))
}

/// Trace fragment: midpoint of the segment `x1 x2` using a drawn line
/// parallel to it, inside an ongoing construction. Candidate apexes are
/// tried first from `apex_hints` (already-marked points), then from
/// adversary picks.
pub(crate) fn midpoint_on_trace(
    t: &mut TraceBuilder,
    x1: PointId,
    x2: PointId,
    parallel: crate::trace::LineId,
    apex_hints: &[PointId],
) -> Result<PointId, ConstructError> {
    let chord = t.draw_line(x1, x2)?;
    let expect = midpoint_of(t.point(x1), t.point(x2))?;

    let mut candidates: Vec<Result<PointId, (C, C)>> =
        apex_hints.iter().map(|&h| Ok(h)).collect();
    let (ax, ay) = affine(t.point(x1))?;
    let (bx, by) = affine(t.point(x2))?;
    let (nx, ny) = rot90(&(&bx - &ax), &(&by - &ay));
    for k in 1i64..4 {
        let kk = C::from_integer(k);
        candidates.push(Err((&ax + &(&kk * &nx), &ay + &(&kk * &ny))));
    }

    let mut last_err: Option<ConstructError> = None;
    for cand in candidates {
        let apex = match cand {
            Ok(id) => {
                let p = t.point(id).clone();
                if incident(&p, t.line(chord)) || incident(&p, t.line(parallel)) {
                    continue;
                }
                id
            }
            Err((sx, sy)) => {
                let p = ProjPoint::from_affine(sx.clone(), sy.clone())?;
                if incident(&p, t.line(chord)) || incident(&p, t.line(parallel)) {
                    continue;
                }
                t.adversary(Region::OffLines(vec![chord, parallel]), sx, sy)?
            }
        };
        match midpoint_with_apex(t, x1, x2, chord, parallel, apex, &expect) {
            Ok(id) => return Ok(id),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| ConstructError::Degenerate("no viable apex".into())))
}

fn midpoint_with_apex(
    t: &mut TraceBuilder,
    x1: PointId,
    x2: PointId,
    chord: crate::trace::LineId,
    parallel: crate::trace::LineId,
    apex: PointId,
    expect: &ProjPoint,
) -> Result<PointId, ConstructError> {
    let l_sa = t.draw_line(apex, x1)?;
    let l_sb = t.draw_line(apex, x2)?;
    let ic = t.mark_meet(l_sa, parallel)?;
    let id = t.mark_meet(l_sb, parallel)?;
    let l_ad = t.draw_line(x1, id)?;
    let l_bc = t.draw_line(x2, ic)?;
    let io = t.mark_meet(l_ad, l_bc)?;
    let l_so = t.draw_line(apex, io)?;
    let imid = t.mark_meet(l_so, chord)?;
    if t.point(imid) != expect {
        return Err(ConstructError::Degenerate(
            "midpoint fragment missed the exact midpoint".into(),
        ));
    }
    Ok(imid)
}

/// Trace fragment: line through `through` parallel to the chord `x1 x2`
/// whose midpoint `mid` is already marked.
pub(crate) fn parallel_on_trace(
    t: &mut TraceBuilder,
    x1: PointId,
    x2: PointId,
    mid: PointId,
    through: PointId,
) -> Result<crate::trace::LineId, ConstructError> {
    let chord = t.draw_line(x1, x2)?;
    if incident(t.point(through), t.line(chord)) {
        return Err(precondition("target point lies on the chord"));
    }
    let (ax, ay) = affine(t.point(x1))?;
    let (px, py) = affine(t.point(through))?;
    let mut last_err = None;
    for k in 2i64..6 {
        let kk = C::from_integer(k);
        let sx = &ax + &(&kk * &(&px - &ax));
        let sy = &ay + &(&kk * &(&py - &ay));
        let l_ap = t.draw_line(x1, through)?;
        let attempt = (|| -> Result<crate::trace::LineId, ConstructError> {
            let s = t.adversary(Region::OnLine(l_ap), sx.clone(), sy.clone())?;
            let l_sb = t.draw_line(s, x2)?;
            let l_sm = t.draw_line(s, mid)?;
            let l_pb = t.draw_line(through, x2)?;
            let ir = t.mark_meet(l_pb, l_sm)?;
            let l_ar = t.draw_line(x1, ir)?;
            let it = t.mark_meet(l_ar, l_sb)?;
            let l_out = t.draw_line(through, it)?;
            if !meet(t.line(l_out), t.line(chord))?.is_at_infinity() {
                return Err(ConstructError::Degenerate(
                    "parallel fragment produced a non-parallel line".into(),
                ));
            }
            Ok(l_out)
        })();
        match attempt {
            Ok(l) => return Ok(l),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| ConstructError::Degenerate("no viable free point".into())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: i64, y: i64) -> ProjPoint {
        ProjPoint::from_i64(x, y)
    }

    fn ptr(xn: i64, xd: i64, yn: i64, yd: i64) -> ProjPoint {
        ProjPoint::from_affine(C::rational(xn, xd), C::rational(yn, yd)).unwrap()
    }

    #[test]
    fn parallel_through_3_2_is_y_eq_2() {
        // Worked by hand: the quadrilateral yields T = (7/2, 2), so PT: y = 2.
        let (line, trace) =
            parallel_from_midpoint(&pt(0, 0), &pt(1, 0), &ptr(1, 2, 0, 1), &pt(3, 2)).unwrap();
        assert_eq!(line, ProjLine::from_i64(0, 1, -2));
        trace.replay().unwrap();
    }

    #[test]
    fn parallel_through_0_1_is_y_eq_1() {
        let (line, trace) =
            parallel_from_midpoint(&pt(0, 0), &pt(1, 0), &ptr(1, 2, 0, 1), &pt(0, 1)).unwrap();
        assert_eq!(line, ProjLine::from_i64(0, 1, -1));
        trace.replay().unwrap();
    }

    #[test]
    fn point_on_segment_rejected() {
        let err =
            parallel_from_midpoint(&pt(0, 0), &pt(1, 0), &ptr(1, 2, 0, 1), &pt(5, 0)).unwrap_err();
        assert!(matches!(err, ConstructError::Precondition(_)));
    }

    #[test]
    fn wrong_midpoint_rejected() {
        let err =
            parallel_from_midpoint(&pt(0, 0), &pt(1, 0), &ptr(1, 3, 0, 1), &pt(3, 2)).unwrap_err();
        assert!(matches!(err, ConstructError::Precondition(_)));
    }

    #[test]
    fn midpoint_of_unit_segment() {
        let l = ProjLine::from_i64(0, 1, -1); // y = 1
        let (m, trace) = midpoint_from_parallel(&pt(0, 0), &pt(1, 0), &l).unwrap();
        assert_eq!(m, ptr(1, 2, 0, 1));
        trace.replay().unwrap();
    }

    #[test]
    fn midpoint_of_diagonal_segment() {
        // A=(0,0), B=(2,2), l: y = x + 1 → midpoint (1,1).
        let l = ProjLine::from_i64(1, -1, 1);
        let (m, trace) = midpoint_from_parallel(&pt(0, 0), &pt(2, 2), &l).unwrap();
        assert_eq!(m, pt(1, 1));
        trace.replay().unwrap();
    }

    #[test]
    fn midpoint_replayed_from_trace() {
        // A=(1,3), B=(5,3), l: y = 0 → midpoint (3,3).
        let l = ProjLine::from_i64(0, 1, 0);
        let (m, trace) = midpoint_from_parallel(&pt(1, 3), &pt(5, 3), &l).unwrap();
        assert_eq!(m, pt(3, 3));
        trace.replay().unwrap();
        assert_eq!(trace.claimed_point("midpoint"), Some(&pt(3, 3)));
    }

    #[test]
    fn non_parallel_line_rejected() {
        let l = ProjLine::from_i64(1, -1, -1);
        let err = midpoint_from_parallel(&pt(0, 0), &pt(1, 0), &l).unwrap_err();
        assert!(matches!(err, ConstructError::Precondition(_)));
    }
}
