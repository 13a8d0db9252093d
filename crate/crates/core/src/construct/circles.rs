//! Center and tangent constructions on drawn circles.
//!
//! Tangents from a marked point come from the classical polar construction
//! (two secants, the cross-joint diagonal points span the polar); tangency at
//! an on-circle point falls back to a degenerate hexagon. Centers of two
//! intersecting circles use the parallel-chords figure: a line through each
//! common point cuts both circles, and the cross-chords are parallel, which
//! unlocks midpoints, then diameters, then the centers. Concentric circles
//! use chords of the outer circle tangent to the inner one.

use crate::field::{ConstructibleReal, Sign};
use crate::geom::{line_conic_intersect, meet, Conic, IntersectMode, ProjLine, ProjPoint};
use crate::trace::{CurveId, LineId, PointId, Region, Trace, TraceBuilder, TraceScene};

use super::parallel::{midpoint_on_trace, parallel_on_trace};
use super::{affine, precondition, rot90, side_of_conic, ConicSide, ConstructError};

type C = ConstructibleReal;

/// A tangent line together with its point of tangency.
#[derive(Debug, Clone, PartialEq)]
pub struct Tangency {
    pub line: ProjLine,
    pub touch: ProjPoint,
}

fn require_real_circle(conic: &Conic, name: &str) -> Result<(), ConstructError> {
    if !conic.is_real_conic() {
        return Err(precondition(format!("{name} must have real coefficients")));
    }
    if !conic.is_nondegenerate() {
        return Err(precondition(format!("{name} is degenerate")));
    }
    if !conic.is_circle() {
        return Err(precondition(format!("{name} is not a circle")));
    }
    Ok(())
}

/// Center and squared radius of a circle conic.
fn circle_center_r2(conic: &Conic) -> Result<(C, C, C), ConstructError> {
    let [a, _b, _c, d, e, f] = conic.coeffs();
    // For a circle a = c ≠ 0; normalize to x² + y² + d'x + e'y + f' = 0.
    let dn = d.checked_div(a)?;
    let en = e.checked_div(a)?;
    let fn_ = f.checked_div(a)?;
    let half = C::rational(-1, 2);
    let cx = &dn * &half;
    let cy = &en * &half;
    let r2 = &(&(&cx * &cx) + &(&cy * &cy)) - &fn_;
    Ok((cx, cy, r2))
}

/// A point strictly inside the circle, at `center + dir/n` for the first
/// `n` that lands inside; `dir` must be nonzero.
fn interior_point_toward(
    conic: &Conic,
    cx: &C,
    cy: &C,
    dir: (&C, &C),
) -> Result<(C, C), ConstructError> {
    let mut n = C::from_integer(1);
    for _ in 0..64 {
        let px = cx + &dir.0.checked_div(&n)?;
        let py = cy + &dir.1.checked_div(&n)?;
        let p = ProjPoint::from_affine(px.clone(), py.clone())?;
        if side_of_conic(&p, conic)? == ConicSide::Inside {
            return Ok((px, py));
        }
        n = &n * &C::from_integer(2);
    }
    Err(ConstructError::Degenerate(
        "could not land an adversary point inside the circle".into(),
    ))
}

/// Mark the intersection of a drawn line with a circle that is not the given
/// known point (or the known point itself when the line is tangent there).
fn second_intersection(
    t: &mut TraceBuilder,
    l: LineId,
    curve: CurveId,
    known: &ProjPoint,
) -> Result<PointId, ConstructError> {
    let hits = line_conic_intersect(t.line(l), t.curve(curve), IntersectMode::RealOnly)?;
    if let Some((p, _)) = hits.iter().find(|(p, _)| p != known && !p.is_at_infinity()) {
        let wanted = p.clone();
        return Ok(t.mark_on_curve_point(l, curve, &wanted)?);
    }
    if hits.len() == 1 && hits[0].1 == 2 && hits[0].0 == *known {
        let wanted = known.clone();
        return Ok(t.mark_on_curve_point(l, curve, &wanted)?);
    }
    Err(ConstructError::Degenerate(
        "line has no second real intersection with the circle".into(),
    ))
}

/// Polar-secant tangent construction from a strictly exterior marked point,
/// as a fragment of an ongoing trace. Returns the two tangents.
pub(crate) fn tangents_on_trace(
    t: &mut TraceBuilder,
    from: PointId,
    curve: CurveId,
) -> Result<Vec<(LineId, PointId)>, ConstructError> {
    let conic = t.curve(curve).clone();
    let (cx, cy, _r2) = circle_center_r2(&conic)?;
    let p = t.point(from).clone();
    let (px, py) = affine(&p)?;
    let d = (&px - &cx, &py - &cy);
    let (rx, ry) = rot90(&d.0, &d.1);

    let dirs: [(C, C); 4] = [
        (d.0.clone(), d.1.clone()),
        (rx.clone(), ry.clone()),
        (-&rx, -&ry),
        (&d.0 + &rx, &d.1 + &ry),
    ];
    let mut secants: Vec<(LineId, PointId, PointId)> = Vec::new();
    for dir in &dirs {
        if secants.len() == 2 {
            break;
        }
        if dir.0.is_zero() && dir.1.is_zero() {
            continue;
        }
        let (sx, sy) = interior_point_toward(&conic, &cx, &cy, (&dir.0, &dir.1))?;
        let s_pt = ProjPoint::from_affine(sx.clone(), sy.clone())?;
        if s_pt == p {
            continue;
        }
        let s = t.adversary(Region::Anywhere, sx, sy)?;
        let sec = t.draw_line(from, s)?;
        if secants.iter().any(|(l, _, _)| *l == sec) {
            continue;
        }
        let hits = line_conic_intersect(t.line(sec), t.curve(curve), IntersectMode::RealOnly)?;
        if hits.len() != 2 {
            continue;
        }
        let x1 = t.mark_on_curve_point(sec, curve, &hits[0].0.clone())?;
        let x2 = t.mark_on_curve_point(sec, curve, &hits[1].0.clone())?;
        secants.push((sec, x1, x2));
    }
    let [(_, x1, x2), (_, y1, y2)]: [(LineId, PointId, PointId); 2] =
        secants.try_into().map_err(|_| {
            ConstructError::Degenerate("could not draw two secants through the point".into())
        })?;

    // Diagonal points of the inscribed quadrilateral span the polar of p.
    let l_a = t.draw_line(x1, y2)?;
    let l_b = t.draw_line(x2, y1)?;
    let u = t.mark_meet(l_a, l_b)?;
    let l_c = t.draw_line(x1, y1)?;
    let l_d = t.draw_line(x2, y2)?;
    let v = t.mark_meet(l_c, l_d)?;
    let polar_line = t.draw_line(u, v)?;
    if *t.line(polar_line) != conic.polar(&p)? {
        return Err(ConstructError::Degenerate(
            "quadrilateral polar does not match the algebraic polar".into(),
        ));
    }

    let hits = line_conic_intersect(t.line(polar_line), &conic, IntersectMode::RealOnly)?;
    let mut out = Vec::new();
    for (touch, _) in hits {
        let ti = t.mark_on_curve_point(polar_line, curve, &touch)?;
        let tan = t.draw_line(from, ti)?;
        // Tangency is exact: multiplicity two at the touch point.
        let check = line_conic_intersect(t.line(tan), &conic, IntersectMode::RealOnly)?;
        if check != vec![(touch.clone(), 2)] {
            return Err(ConstructError::Degenerate(
                "constructed line is not tangent".into(),
            ));
        }
        out.push((tan, ti));
    }
    if out.len() != 2 {
        return Err(ConstructError::Degenerate(
            "polar did not meet the circle in two real points".into(),
        ));
    }
    Ok(out)
}

/// Tangent at a marked point of the circle via a degenerate hexagon: four
/// auxiliary points are marked through adversary secants, and the hexagon
/// with a repeated vertex makes the tangent its sixth side.
fn tangent_at_on_trace(
    t: &mut TraceBuilder,
    at: PointId,
    curve: CurveId,
) -> Result<(LineId, PointId), ConstructError> {
    let conic = t.curve(curve).clone();
    let (cx, cy, _r2) = circle_center_r2(&conic)?;
    let p = t.point(at).clone();
    let (px, py) = affine(&p)?;
    let d = (&cx - &px, &cy - &py);
    let (rx, ry) = rot90(&d.0, &d.1);
    let two = C::from_integer(2);

    let dirs: [(C, C); 4] = [
        (d.0.clone(), d.1.clone()),
        (&d.0 + &rx, &d.1 + &ry),
        (&d.0 - &rx, &d.1 - &ry),
        (&(&two * &d.0) + &rx, &(&two * &d.1) + &ry),
    ];
    let mut vs = Vec::new();
    for dir in &dirs {
        let (sx, sy) = interior_point_toward(&conic, &cx, &cy, (&dir.0, &dir.1))?;
        let s = t.adversary(Region::Anywhere, sx, sy)?;
        let sec = t.draw_line(at, s)?;
        let v = second_intersection(t, sec, curve, &p)?;
        if t.point(v) == &p || vs.contains(&v) {
            return Err(ConstructError::Degenerate(
                "auxiliary hexagon points collided".into(),
            ));
        }
        vs.push(v);
    }
    // Hexagon (p, v1, v2, v3, v4, p): the side between the repeated vertex
    // is the tangent; two of the three diagonal points are computable and
    // the third pins the tangent. Degenerate orderings (parallel sides) are
    // skipped by permuting the auxiliary vertices.
    let mut last_err: Option<ConstructError> = None;
    for perm in permutations4() {
        let (v1, v2, v3, v4) = (vs[perm[0]], vs[perm[1]], vs[perm[2]], vs[perm[3]]);
        let attempt = (|t: &mut TraceBuilder| -> Result<(LineId, PointId), ConstructError> {
            let s12 = t.draw_line(at, v1)?;
            let s23 = t.draw_line(v1, v2)?;
            let s34 = t.draw_line(v2, v3)?;
            let s45 = t.draw_line(v3, v4)?;
            let s56 = t.draw_line(v4, at)?;
            let alpha = t.mark_meet(s12, s45)?;
            let beta = t.mark_meet(s23, s56)?;
            let g = t.draw_line(alpha, beta)?;
            let gamma = t.mark_meet(g, s34)?;
            let tan = t.draw_line(at, gamma)?;
            if *t.line(tan) != conic.polar(&p)? {
                return Err(ConstructError::Degenerate(
                    "hexagon tangent does not match the polar".into(),
                ));
            }
            Ok((tan, at))
        })(t);
        match attempt {
            Ok(out) => return Ok(out),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| ConstructError::Degenerate("hexagon degenerated".into())))
}

/// All orderings of four indices.
pub(crate) fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            if b == a {
                continue;
            }
            for c in 0..4 {
                if c == a || c == b {
                    continue;
                }
                let d = 6 - a - b - c;
                out.push([a, b, c, d]);
            }
        }
    }
    out
}

/// Tangent lines to a circle from a point on or outside it, with a trace.
pub fn tangents_from_point(
    p: &ProjPoint,
    conic: &Conic,
) -> Result<(Vec<Tangency>, Trace), ConstructError> {
    require_real_circle(conic, "the circle")?;
    if !p.is_real_point() || p.is_at_infinity() {
        return Err(precondition("the point must be a finite real point"));
    }
    let side = side_of_conic(p, conic)?;
    if side == ConicSide::Inside {
        return Err(precondition(
            "the point is strictly inside the circle; no tangent exists",
        ));
    }
    let scene = TraceScene {
        points: vec![p.clone()],
        lines: vec![],
        curves: vec![conic.clone()],
    };
    let mut t = TraceBuilder::new(scene);
    let from = PointId(0);
    let curve = CurveId(0);
    let mut out = Vec::new();
    match side {
        ConicSide::On => {
            let (tan, touch) = tangent_at_on_trace(&mut t, from, curve)?;
            out.push(Tangency {
                line: t.line(tan).clone(),
                touch: t.point(touch).clone(),
            });
            t.claim_line("tangent1", tan);
        }
        ConicSide::Outside => {
            for (i, (tan, touch)) in tangents_on_trace(&mut t, from, curve)?
                .into_iter()
                .enumerate()
            {
                out.push(Tangency {
                    line: t.line(tan).clone(),
                    touch: t.point(touch).clone(),
                });
                t.claim_line(&format!("tangent{}", i + 1), tan);
            }
        }
        ConicSide::Inside => unreachable!(),
    }
    Ok((out, t.finish()))
}

/// Diameter line of a circle obtained from one chord: bisect the chord using
/// the parallel helper line, push a parallel chord through another marked
/// point of the circle, bisect that one too, and join the midpoints.
fn diameter_from_chord(
    t: &mut TraceBuilder,
    chord_a: PointId,
    chord_b: PointId,
    helper_parallel: LineId,
    curve: CurveId,
    through: PointId,
    apex_hints: &[PointId],
) -> Result<LineId, ConstructError> {
    let m1 = midpoint_on_trace(t, chord_a, chord_b, helper_parallel, apex_hints)?;
    let par = parallel_on_trace(t, chord_a, chord_b, m1, through)?;
    let e = second_intersection(t, par, curve, &t.point(through).clone())?;
    let chord_line = t.draw_line(chord_a, chord_b)?;
    let m2 = if e == through {
        // The parallel is tangent at `through`: the chord degenerates to the
        // touch point, which is its own midpoint.
        through
    } else {
        midpoint_on_trace(t, through, e, chord_line, apex_hints)?
    };
    if m1 == m2 {
        return Err(ConstructError::Degenerate(
            "parallel chords produced a single midpoint".into(),
        ));
    }
    Ok(t.draw_line(m1, m2)?)
}

/// Candidate direction vectors for helper lines, derived from a base
/// direction; all exact and deterministic.
fn direction_candidates(base: (&C, &C)) -> Vec<(C, C)> {
    let (bx, by) = (base.0.clone(), base.1.clone());
    let (rx, ry) = rot90(&bx, &by);
    let two = C::from_integer(2);
    let three = C::from_integer(3);
    vec![
        (rx.clone(), ry.clone()),
        (&bx + &rx, &by + &ry),
        (&bx - &rx, &by - &ry),
        (&(&two * &bx) + &rx, &(&two * &by) + &ry),
        (&rx - &(&two * &bx), &ry - &(&two * &by)),
        (&(&three * &bx) + &rx, &(&three * &by) + &ry),
        (&bx + &(&two * &rx), &by + &(&two * &ry)),
    ]
}

/// Centers of two circles drawn with their two (or one, when tangent) common
/// points marked.
pub fn centers_of_intersecting_circles(
    c1: &Conic,
    c2: &Conic,
    p: &ProjPoint,
    q: &ProjPoint,
) -> Result<(ProjPoint, ProjPoint, Trace), ConstructError> {
    require_real_circle(c1, "the first circle")?;
    require_real_circle(c2, "the second circle")?;
    if c1 == c2 {
        return Err(precondition("the two circles coincide"));
    }
    for (pt, name) in [(p, "p"), (q, "q")] {
        if !c1.contains(pt) || !c2.contains(pt) {
            return Err(precondition(format!(
                "point {name} does not lie on both circles"
            )));
        }
    }
    let tangent_case = p == q;
    if tangent_case && c1.polar(p)? != c2.polar(p)? {
        return Err(precondition(
            "coincident marked points but the circles are not tangent there",
        ));
    }

    let scene = TraceScene {
        points: if tangent_case {
            vec![p.clone()]
        } else {
            vec![p.clone(), q.clone()]
        },
        lines: vec![],
        curves: vec![c1.clone(), c2.clone()],
    };
    let mut t = TraceBuilder::new(scene);
    let ip = PointId(0);
    let iq = if tangent_case { ip } else { PointId(1) };
    let (k1, k2) = (CurveId(0), CurveId(1));

    let (px, py) = affine(p)?;
    let base = if tangent_case {
        let (c1x, c1y, _) = circle_center_r2(c1)?;
        let (c2x, c2y, _) = circle_center_r2(c2)?;
        (&c2x - &c1x, &c2y - &c1y)
    } else {
        let (qx, qy) = affine(q)?;
        (&qx - &px, &qy - &py)
    };
    let cands = direction_candidates((&base.0, &base.1));

    // One usable direction pair yields a pair of parallel chords, one in
    // each circle. Collect two such pairs with distinct chord directions,
    // otherwise the two diameters collapse onto a single line.
    type ChordPair = ((PointId, PointId), (PointId, PointId), LineId, LineId);
    let mut pairs: Vec<ChordPair> = Vec::new();
    'outer: for i in 0..cands.len() {
        for j in 0..cands.len() {
            if pairs.len() == 2 {
                break 'outer;
            }
            if tangent_case && j <= i {
                continue;
            }
            if !tangent_case && j != i {
                // A common direction through p and q is enough; distinct
                // chord slopes come from varying it.
                continue;
            }
            let dir = &cands[i];
            let dir2 = &cands[j];
            let attempt = (|t: &mut TraceBuilder| -> Result<ChordPair, ConstructError> {
                let (qx, qy) = affine(t.point(iq))?;
                let s1 = t.adversary(Region::Anywhere, &px + &dir.0, &py + &dir.1)?;
                let lp = t.draw_line(ip, s1)?;
                let a = second_intersection(t, lp, k1, p)?;
                let b = second_intersection(t, lp, k2, p)?;
                if t.point(a) == p || t.point(b) == p {
                    return Err(ConstructError::Degenerate("tangent helper line".into()));
                }
                let (lq, qpt) = if tangent_case {
                    let s2 = t.adversary(Region::Anywhere, &px + &dir2.0, &py + &dir2.1)?;
                    (t.draw_line(ip, s2)?, p.clone())
                } else {
                    let s2 = t.adversary(Region::Anywhere, &qx + &dir.0, &qy + &dir.1)?;
                    (t.draw_line(iq, s2)?, q.clone())
                };
                if lq == lp {
                    return Err(ConstructError::Degenerate("helper lines coincide".into()));
                }
                let c = second_intersection(t, lq, k1, &qpt)?;
                let d = second_intersection(t, lq, k2, &qpt)?;
                if c == a || d == b || t.point(c) == &qpt || t.point(d) == &qpt {
                    return Err(ConstructError::Degenerate("chord endpoints collided".into()));
                }
                let ch1 = t.draw_line(a, c)?;
                let ch2 = t.draw_line(b, d)?;
                if !meet(t.line(ch1), t.line(ch2))?.is_at_infinity() {
                    return Err(ConstructError::Degenerate(
                        "cross-chords are not parallel".into(),
                    ));
                }
                Ok(((a, c), (b, d), ch1, ch2))
            })(&mut t);
            if let Ok(pair) = attempt {
                // The second pair must slope differently from the first.
                if let Some(first) = pairs.first() {
                    if meet(t.line(first.2), t.line(pair.2))
                        .map(|m| m.is_at_infinity())
                        .unwrap_or(true)
                    {
                        continue;
                    }
                }
                pairs.push(pair);
            }
        }
    }
    let [pair1, pair2]: [_; 2] = pairs
        .try_into()
        .map_err(|_| ConstructError::Degenerate("could not build two chord pairs".into()))?;

    let hints = if tangent_case { vec![ip] } else { vec![ip, iq] };
    let mut diameters_c1 = Vec::new();
    let mut diameters_c2 = Vec::new();
    for ((a, c), (b, d), ch1, ch2) in [pair1, pair2] {
        // Another marked point of each circle, off the chord: a common point
        // of the two circles always qualifies.
        let through1 = if tangent_case { ip } else { iq };
        let through2 = ip;
        let through1 = if [a, c].contains(&through1) { ip } else { through1 };
        let through2 = if [b, d].contains(&through2) { iq } else { through2 };
        diameters_c1.push(diameter_from_chord(&mut t, a, c, ch2, k1, through1, &hints)?);
        diameters_c2.push(diameter_from_chord(&mut t, b, d, ch1, k2, through2, &hints)?);
    }
    let o1 = t.mark_meet(diameters_c1[0], diameters_c1[1])?;
    let o2 = t.mark_meet(diameters_c2[0], diameters_c2[1])?;
    t.claim_point("center1", o1);
    t.claim_point("center2", o2);

    let got1 = t.point(o1).clone();
    let got2 = t.point(o2).clone();
    if got1 != c1.center()? || got2 != c2.center()? {
        return Err(ConstructError::Degenerate(
            "constructed centers disagree with the pole of the line at infinity".into(),
        ));
    }
    Ok((got1, got2, t.finish()))
}

/// Common center of two concentric circles.
pub fn center_of_concentric(
    c1: &Conic,
    c2: &Conic,
) -> Result<(ProjPoint, Trace), ConstructError> {
    require_real_circle(c1, "the first circle")?;
    require_real_circle(c2, "the second circle")?;
    if c1 == c2 {
        return Err(precondition("the two circles coincide"));
    }
    let o = c1.center()?;
    if o != c2.center()? {
        return Err(precondition("the circles are not concentric"));
    }
    let (cx, cy, r2_1) = circle_center_r2(c1)?;
    let (_, _, r2_2) = circle_center_r2(c2)?;
    if r2_1 == r2_2 {
        return Err(precondition("concentric circles with equal radii coincide"));
    }
    // Work with the outer circle as the chord carrier.
    let (outer, inner) = if (&r2_1 - &r2_2).sign()? == Sign::Positive {
        (c1.clone(), c2.clone())
    } else {
        (c2.clone(), c1.clone())
    };

    let scene = TraceScene {
        points: vec![],
        lines: vec![],
        curves: vec![outer.clone(), inner.clone()],
    };
    let mut t = TraceBuilder::new(scene);
    let (k_out, k_in) = (CurveId(0), CurveId(1));

    // A first line through two interior points crosses the outer circle.
    let one = C::one();
    let (s1x, s1y) = interior_point_toward(&inner, &cx, &cy, (&one, &C::zero()))?;
    let (s2x, s2y) = interior_point_toward(&inner, &cx, &cy, (&C::zero(), &one))?;
    let s1 = t.adversary(Region::Anywhere, s1x, s1y)?;
    let s2 = t.adversary(Region::Anywhere, s2x, s2y)?;
    let l0 = t.draw_line(s1, s2)?;
    let hits = line_conic_intersect(t.line(l0), &outer, IntersectMode::RealOnly)?;
    if hits.len() != 2 {
        return Err(ConstructError::Degenerate(
            "helper line missed the outer circle".into(),
        ));
    }
    let a1 = t.mark_on_curve_point(l0, k_out, &hits[0].0.clone())?;
    let a2 = t.mark_on_curve_point(l0, k_out, &hits[1].0.clone())?;

    let mut axes = Vec::new();
    for a in [a1, a2] {
        let tangents = tangents_on_trace(&mut t, a, k_in)?;
        let [(tan1, m1), (tan2, m2)]: [(LineId, PointId); 2] = tangents
            .try_into()
            .map_err(|_| ConstructError::Degenerate("expected two tangents".into()))?;
        let a_pt = t.point(a).clone();
        let b1 = second_intersection(&mut t, tan1, k_out, &a_pt)?;
        let b2 = second_intersection(&mut t, tan2, k_out, &a_pt)?;
        // Chords b1b2 (outer) and m1m2 (tangency points) are parallel, both
        // perpendicular to the axis through a and the center.
        let chord_m = t.draw_line(m1, m2)?;
        let chord_b = t.draw_line(b1, b2)?;
        if !meet(t.line(chord_m), t.line(chord_b))?.is_at_infinity() {
            return Err(ConstructError::Degenerate(
                "tangency chord and outer chord are not parallel".into(),
            ));
        }
        let mid = midpoint_on_trace(&mut t, b1, b2, chord_m, &[a])?;
        axes.push(t.draw_line(a, mid)?);
    }
    let center = t.mark_meet(axes[0], axes[1])?;
    t.claim_point("center", center);

    let got = t.point(center).clone();
    if got != o {
        return Err(ConstructError::Degenerate(
            "constructed center disagrees with the pole of the line at infinity".into(),
        ));
    }
    Ok((got, t.finish()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ci(n: i64) -> C {
        C::from_integer(n)
    }

    #[test]
    fn tangents_from_external_point() {
        // From (0,2) to the unit circle: touch points (±√3/2, 1/2).
        let (tans, trace) =
            tangents_from_point(&ProjPoint::from_i64(0, 2), &Conic::unit_circle()).unwrap();
        assert_eq!(tans.len(), 2);
        let s3 = ci(3).sqrt_adjoin().unwrap();
        let half = C::rational(1, 2);
        let tp1 = ProjPoint::from_affine(s3.checked_div(&ci(2)).unwrap(), half.clone()).unwrap();
        let tp2 = ProjPoint::from_affine(-&s3.checked_div(&ci(2)).unwrap(), half).unwrap();
        assert!(tans.iter().any(|t| t.touch == tp1));
        assert!(tans.iter().any(|t| t.touch == tp2));
        trace.replay().unwrap();
    }

    #[test]
    fn tangent_at_on_circle_point() {
        let (tans, trace) =
            tangents_from_point(&ProjPoint::from_i64(1, 0), &Conic::unit_circle()).unwrap();
        assert_eq!(tans.len(), 1);
        assert_eq!(tans[0].line, ProjLine::from_i64(1, 0, -1)); // x = 1
        assert_eq!(tans[0].touch, ProjPoint::from_i64(1, 0));
        trace.replay().unwrap();
    }

    #[test]
    fn interior_point_rejected() {
        let err =
            tangents_from_point(&ProjPoint::from_i64(0, 0), &Conic::unit_circle()).unwrap_err();
        assert!(matches!(err, ConstructError::Precondition(_)));
    }

    #[test]
    fn intersecting_circles_centers() {
        // x²+y²=1 and (x−1)²+y²=1 meet at (1/2, ±√3/2).
        let c1 = Conic::unit_circle();
        let c2 = Conic::circle(&ci(1), &ci(0), &ci(1)).unwrap();
        let s3 = ci(3).sqrt_adjoin().unwrap();
        let half = C::rational(1, 2);
        let y = s3.checked_div(&ci(2)).unwrap();
        let p = ProjPoint::from_affine(half.clone(), y.clone()).unwrap();
        let q = ProjPoint::from_affine(half, -&y).unwrap();
        let (o1, o2, trace) = centers_of_intersecting_circles(&c1, &c2, &p, &q).unwrap();
        assert_eq!(o1, ProjPoint::from_i64(0, 0));
        assert_eq!(o2, ProjPoint::from_i64(1, 0));
        trace.replay().unwrap();
    }

    #[test]
    fn tangent_circles_centers() {
        // Unit circles tangent at (1,0): centers (0,0) and (2,0).
        let c1 = Conic::unit_circle();
        let c2 = Conic::circle(&ci(2), &ci(0), &ci(1)).unwrap();
        let p = ProjPoint::from_i64(1, 0);
        let (o1, o2, trace) = centers_of_intersecting_circles(&c1, &c2, &p, &p).unwrap();
        assert_eq!(o1, ProjPoint::from_i64(0, 0));
        assert_eq!(o2, ProjPoint::from_i64(2, 0));
        trace.replay().unwrap();
    }

    #[test]
    fn same_circle_twice_rejected() {
        let c1 = Conic::unit_circle();
        let p = ProjPoint::from_i64(1, 0);
        let err = centers_of_intersecting_circles(&c1, &c1, &p, &p).unwrap_err();
        assert!(matches!(err, ConstructError::Precondition(_)));
    }

    #[test]
    fn concentric_center_at_origin() {
        let c1 = Conic::unit_circle();
        let c2 = Conic::circle(&ci(0), &ci(0), &ci(2)).unwrap();
        let (o, trace) = center_of_concentric(&c1, &c2).unwrap();
        assert_eq!(o, ProjPoint::from_i64(0, 0));
        trace.replay().unwrap();
    }

    #[test]
    fn concentric_center_shifted() {
        let c1 = Conic::circle(&ci(2), &ci(1), &ci(1)).unwrap();
        let c2 = Conic::circle(&ci(2), &ci(1), &ci(3)).unwrap();
        let (o, trace) = center_of_concentric(&c1, &c2).unwrap();
        assert_eq!(o, ProjPoint::from_i64(2, 1));
        trace.replay().unwrap();
    }

    #[test]
    fn non_concentric_rejected() {
        let c1 = Conic::unit_circle();
        let c2 = Conic::circle(&ci(3), &ci(0), &ci(1)).unwrap();
        let err = center_of_concentric(&c1, &c2).unwrap_err();
        assert!(matches!(err, ConstructError::Precondition(_)));
    }
}
