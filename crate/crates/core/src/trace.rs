//! Replayable straightedge traces.
//!
//! A [`Trace`] is an ordered list of moves over an initial scene: drawing the
//! line through two marked points, marking the meet of two drawn lines,
//! marking an intersection of a drawn line with a fixed curve, or accepting
//! an adversary-chosen point from a stated region. Every move records the
//! exact object it produced; [`Trace::replay`] re-executes the moves from the
//! initial scene and demands exact agreement with every recorded binding and
//! claim.
//!
//! Two-valued curve marks are disambiguated by an exact lexicographic order
//! on the intersection points, so a selector (`first`/`second`/`tangent`)
//! replays deterministically.

use std::fmt;

use thiserror::Error;

use crate::field::ConstructibleReal;
use crate::geom::{
    cmp_points_lex, incident, join, line_conic_intersect, meet, Conic, GeomError, IntersectMode,
    ProjLine, ProjPoint,
};

type C = ConstructibleReal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LineId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurveId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    First,
    Second,
    Tangent,
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selector::First => write!(f, "first"),
            Selector::Second => write!(f, "second"),
            Selector::Tangent => write!(f, "tangent"),
        }
    }
}

/// Where an adversary point was requested from.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Anywhere,
    OnLine(LineId),
    OffLines(Vec<LineId>),
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Anywhere => write!(f, "anywhere"),
            Region::OnLine(l) => write!(f, "on-line L{}", l.0),
            Region::OffLines(ls) => {
                write!(f, "off-lines")?;
                for l in ls {
                    write!(f, " L{}", l.0)?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Move {
    DrawLine {
        id: LineId,
        p: PointId,
        q: PointId,
    },
    MarkMeet {
        id: PointId,
        l: LineId,
        m: LineId,
    },
    MarkOnCurve {
        id: PointId,
        l: LineId,
        curve: CurveId,
        sel: Selector,
    },
    AdversaryPoint {
        id: PointId,
        region: Region,
        chosen: (C, C),
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Binding {
    Point(ProjPoint),
    Line(ProjLine),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjRef {
    Point(PointId),
    Line(LineId),
}

#[derive(Debug, Clone)]
pub struct Claim {
    pub name: String,
    pub object: ObjRef,
    pub value: Binding,
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum TraceError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("unknown object id in move {0}")]
    UnknownId(usize),
    #[error("move {index}: {reason}")]
    BadMove { index: usize, reason: String },
    #[error("move {index} replayed to a different object")]
    Mismatch { index: usize },
    #[error("claim {name:?} does not match the replayed object")]
    ClaimMismatch { name: String },
    #[error("adversary point violates its region in move {0}")]
    RegionViolation(usize),
    #[error("selector {sel} cannot resolve: {reason}")]
    Selector { sel: Selector, reason: String },
}

/// Initial scene a trace starts from.
#[derive(Debug, Clone, Default)]
pub struct TraceScene {
    pub points: Vec<ProjPoint>,
    pub lines: Vec<ProjLine>,
    pub curves: Vec<Conic>,
}

/// An ordered, replayable record of straightedge moves with named outputs.
#[derive(Debug, Clone)]
pub struct Trace {
    pub scene: TraceScene,
    pub moves: Vec<Move>,
    pub bindings: Vec<Binding>,
    pub claims: Vec<Claim>,
}

/// Deterministic semantics of a single move against the current objects.
fn execute_move(
    mv: &Move,
    points: &[ProjPoint],
    lines: &[ProjLine],
    curves: &[Conic],
    index: usize,
) -> Result<Binding, TraceError> {
    let point = |id: PointId| points.get(id.0).ok_or(TraceError::UnknownId(index));
    let line = |id: LineId| lines.get(id.0).ok_or(TraceError::UnknownId(index));
    match mv {
        Move::DrawLine { p, q, .. } => Ok(Binding::Line(join(point(*p)?, point(*q)?)?)),
        Move::MarkMeet { l, m, .. } => {
            let pt = meet(line(*l)?, line(*m)?)?;
            if pt.is_at_infinity() {
                return Err(TraceError::BadMove {
                    index,
                    reason: "meet of parallel lines cannot be marked".into(),
                });
            }
            Ok(Binding::Point(pt))
        }
        Move::MarkOnCurve { l, curve, sel, .. } => {
            let conic = curves.get(curve.0).ok_or(TraceError::UnknownId(index))?;
            let pt = select_on_curve(line(*l)?, conic, *sel)?;
            Ok(Binding::Point(pt))
        }
        Move::AdversaryPoint { region, chosen, .. } => {
            let pt = ProjPoint::from_affine(chosen.0.clone(), chosen.1.clone())
                .map_err(TraceError::Geom)?;
            let ok = match region {
                Region::Anywhere => true,
                Region::OnLine(l) => incident(&pt, line(*l)?),
                Region::OffLines(ls) => {
                    let mut off = true;
                    for l in ls {
                        if incident(&pt, line(*l)?) {
                            off = false;
                            break;
                        }
                    }
                    off
                }
            };
            if !ok {
                return Err(TraceError::RegionViolation(index));
            }
            Ok(Binding::Point(pt))
        }
    }
}

/// Real finite intersections of a line and a curve, in exact lexicographic
/// order, resolved through a selector.
pub fn select_on_curve(
    l: &ProjLine,
    conic: &Conic,
    sel: Selector,
) -> Result<ProjPoint, TraceError> {
    let hits = line_conic_intersect(l, conic, IntersectMode::RealOnly)?;
    let mut finite: Vec<(ProjPoint, u8)> = hits
        .into_iter()
        .filter(|(p, _)| !p.is_at_infinity() && p.is_real_point())
        .collect();
    if finite.len() == 2 {
        let ord = cmp_points_lex(&finite[0].0, &finite[1].0).map_err(TraceError::Geom)?;
        if ord == std::cmp::Ordering::Greater {
            finite.swap(0, 1);
        }
    }
    match sel {
        Selector::Tangent => match finite.as_slice() {
            [(p, 2)] => Ok(p.clone()),
            _ => Err(TraceError::Selector {
                sel,
                reason: "line is not tangent to the curve".into(),
            }),
        },
        Selector::First => finite
            .first()
            .map(|(p, _)| p.clone())
            .ok_or(TraceError::Selector {
                sel,
                reason: "no real intersection".into(),
            }),
        Selector::Second => {
            if finite.len() < 2 {
                Err(TraceError::Selector {
                    sel,
                    reason: "fewer than two real intersections".into(),
                })
            } else {
                Ok(finite[1].0.clone())
            }
        }
    }
}

impl Trace {
    /// Re-run every move from the initial scene and verify each recorded
    /// binding and claim with exact equality.
    pub fn replay(&self) -> Result<(), TraceError> {
        let mut points = self.scene.points.clone();
        let mut lines = self.scene.lines.clone();
        for (index, (mv, expected)) in self.moves.iter().zip(&self.bindings).enumerate() {
            let got = execute_move(mv, &points, &lines, &self.scene.curves, index)?;
            if got != *expected {
                return Err(TraceError::Mismatch { index });
            }
            match got {
                Binding::Point(p) => points.push(p),
                Binding::Line(l) => lines.push(l),
            }
        }
        for claim in &self.claims {
            let ok = match (&claim.object, &claim.value) {
                (ObjRef::Point(id), Binding::Point(p)) => {
                    points.get(id.0).is_some_and(|q| q == p)
                }
                (ObjRef::Line(id), Binding::Line(l)) => lines.get(id.0).is_some_and(|m| m == l),
                _ => false,
            };
            if !ok {
                return Err(TraceError::ClaimMismatch {
                    name: claim.name.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn claimed_point(&self, name: &str) -> Option<&ProjPoint> {
        self.claims.iter().find(|c| c.name == name).and_then(|c| {
            if let Binding::Point(p) = &c.value {
                Some(p)
            } else {
                None
            }
        })
    }

    pub fn claimed_line(&self, name: &str) -> Option<&ProjLine> {
        self.claims.iter().find(|c| c.name == name).and_then(|c| {
            if let Binding::Line(l) = &c.value {
                Some(l)
            } else {
                None
            }
        })
    }
}

fn fmt_point_affine(p: &ProjPoint, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match p.affine() {
        Ok((x, y)) => write!(f, "({x}, {y})"),
        Err(_) => write!(f, "{p}"),
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.scene.points.iter().enumerate() {
            write!(f, "initial P{i} = ")?;
            fmt_point_affine(p, f)?;
            writeln!(f)?;
        }
        for (i, l) in self.scene.lines.iter().enumerate() {
            writeln!(f, "initial L{i} = {l}")?;
        }
        for (i, c) in self.scene.curves.iter().enumerate() {
            writeln!(f, "curve C{i} = {c}")?;
        }
        writeln!(f, "moves:")?;
        for mv in &self.moves {
            match mv {
                Move::DrawLine { id, p, q } => {
                    writeln!(f, "L L{} := line(P{},P{})", id.0, p.0, q.0)?;
                }
                Move::MarkMeet { id, l, m } => {
                    writeln!(f, "P P{} := meet(L{},L{})", id.0, l.0, m.0)?;
                }
                Move::MarkOnCurve { id, l, curve, sel } => {
                    writeln!(f, "P P{} := on(L{},C{},{})", id.0, l.0, curve.0, sel)?;
                }
                Move::AdversaryPoint { id, region, chosen } => {
                    writeln!(
                        f,
                        "P P{} := adversary({}; {}, {})",
                        id.0, region, chosen.0, chosen.1
                    )?;
                }
            }
        }
        writeln!(f, "claims:")?;
        for c in &self.claims {
            match (&c.object, &c.value) {
                (ObjRef::Point(id), Binding::Point(p)) => {
                    write!(f, "{} = P{} : point ", c.name, id.0)?;
                    fmt_point_affine(p, f)?;
                    writeln!(f)?;
                }
                (ObjRef::Line(id), Binding::Line(l)) => {
                    writeln!(f, "{} = L{} : line {}", c.name, id.0, l)?;
                }
                _ => writeln!(f, "{} = <inconsistent>", c.name)?,
            }
        }
        Ok(())
    }
}

/// Builder used by the constructions: assigns ids, deduplicates objects that
/// already exist, validates adversary regions, and records bindings.
pub struct TraceBuilder {
    scene: TraceScene,
    points: Vec<ProjPoint>,
    lines: Vec<ProjLine>,
    moves: Vec<Move>,
    bindings: Vec<Binding>,
    claims: Vec<Claim>,
}

impl TraceBuilder {
    pub fn new(scene: TraceScene) -> Self {
        TraceBuilder {
            points: scene.points.clone(),
            lines: scene.lines.clone(),
            moves: Vec::new(),
            bindings: Vec::new(),
            claims: Vec::new(),
            scene,
        }
    }

    pub fn point(&self, id: PointId) -> &ProjPoint {
        &self.points[id.0]
    }

    pub fn line(&self, id: LineId) -> &ProjLine {
        &self.lines[id.0]
    }

    pub fn curve(&self, id: CurveId) -> &Conic {
        &self.scene.curves[id.0]
    }

    pub fn find_point(&self, p: &ProjPoint) -> Option<PointId> {
        self.points.iter().position(|q| q == p).map(PointId)
    }

    fn find_line(&self, l: &ProjLine) -> Option<LineId> {
        self.lines.iter().position(|m| m == l).map(LineId)
    }

    /// Draw the line through two marked points (reusing an identical line).
    pub fn draw_line(&mut self, p: PointId, q: PointId) -> Result<LineId, TraceError> {
        let l = join(&self.points[p.0], &self.points[q.0])?;
        if let Some(id) = self.find_line(&l) {
            return Ok(id);
        }
        let id = LineId(self.lines.len());
        self.moves.push(Move::DrawLine { id, p, q });
        self.bindings.push(Binding::Line(l.clone()));
        self.lines.push(l);
        Ok(id)
    }

    /// Mark the meet of two drawn lines (it must be a finite point).
    pub fn mark_meet(&mut self, l: LineId, m: LineId) -> Result<PointId, TraceError> {
        let p = meet(&self.lines[l.0], &self.lines[m.0])?;
        if p.is_at_infinity() {
            return Err(TraceError::BadMove {
                index: self.moves.len(),
                reason: "meet of parallel lines cannot be marked".into(),
            });
        }
        if let Some(id) = self.find_point(&p) {
            return Ok(id);
        }
        let id = PointId(self.points.len());
        self.moves.push(Move::MarkMeet { id, l, m });
        self.bindings.push(Binding::Point(p.clone()));
        self.points.push(p);
        Ok(id)
    }

    /// Mark a chosen intersection point of a drawn line with a fixed curve.
    /// The builder works out which selector names the wanted point.
    pub fn mark_on_curve_point(
        &mut self,
        l: LineId,
        curve: CurveId,
        wanted: &ProjPoint,
    ) -> Result<PointId, TraceError> {
        if let Some(id) = self.find_point(wanted) {
            return Ok(id);
        }
        let sel = self.selector_for(l, curve, wanted)?;
        let id = PointId(self.points.len());
        self.moves.push(Move::MarkOnCurve { id, l, curve, sel });
        self.bindings.push(Binding::Point(wanted.clone()));
        self.points.push(wanted.clone());
        Ok(id)
    }

    fn selector_for(
        &self,
        l: LineId,
        curve: CurveId,
        wanted: &ProjPoint,
    ) -> Result<Selector, TraceError> {
        for sel in [Selector::Tangent, Selector::First, Selector::Second] {
            if let Ok(p) = select_on_curve(&self.lines[l.0], &self.scene.curves[curve.0], sel) {
                if p == *wanted {
                    return Ok(sel);
                }
            }
        }
        Err(TraceError::Selector {
            sel: Selector::First,
            reason: "wanted point is not an intersection of the line and curve".into(),
        })
    }

    /// Record an adversary-supplied point with its region.
    pub fn adversary(&mut self, region: Region, x: C, y: C) -> Result<PointId, TraceError> {
        let index = self.moves.len();
        let id = PointId(self.points.len());
        let mv = Move::AdversaryPoint {
            id,
            region,
            chosen: (x, y),
        };
        let binding = execute_move(&mv, &self.points, &self.lines, &self.scene.curves, index)?;
        let Binding::Point(p) = binding.clone() else {
            unreachable!()
        };
        self.moves.push(mv);
        self.bindings.push(binding);
        self.points.push(p);
        Ok(id)
    }

    pub fn claim_point(&mut self, name: &str, id: PointId) {
        self.claims.push(Claim {
            name: name.to_string(),
            object: ObjRef::Point(id),
            value: Binding::Point(self.points[id.0].clone()),
        });
    }

    pub fn claim_line(&mut self, name: &str, id: LineId) {
        self.claims.push(Claim {
            name: name.to_string(),
            object: ObjRef::Line(id),
            value: Binding::Line(self.lines[id.0].clone()),
        });
    }

    pub fn finish(self) -> Trace {
        Trace {
            scene: self.scene,
            moves: self.moves,
            bindings: self.bindings,
            claims: self.claims,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ci(n: i64) -> C {
        C::from_integer(n)
    }

    #[test]
    fn build_and_replay_a_meet() {
        let scene = TraceScene {
            points: vec![
                ProjPoint::from_i64(0, 0),
                ProjPoint::from_i64(2, 2),
                ProjPoint::from_i64(2, 0),
                ProjPoint::from_i64(0, 2),
            ],
            lines: vec![],
            curves: vec![],
        };
        let mut b = TraceBuilder::new(scene);
        let l1 = b.draw_line(PointId(0), PointId(1)).unwrap();
        let l2 = b.draw_line(PointId(2), PointId(3)).unwrap();
        let m = b.mark_meet(l1, l2).unwrap();
        assert_eq!(b.point(m), &ProjPoint::from_i64(1, 1));
        b.claim_point("cross", m);
        let trace = b.finish();
        trace.replay().unwrap();
        assert_eq!(trace.claimed_point("cross"), Some(&ProjPoint::from_i64(1, 1)));
    }

    #[test]
    fn tampered_binding_fails_replay() {
        let scene = TraceScene {
            points: vec![ProjPoint::from_i64(0, 0), ProjPoint::from_i64(1, 1)],
            lines: vec![],
            curves: vec![],
        };
        let mut b = TraceBuilder::new(scene);
        b.draw_line(PointId(0), PointId(1)).unwrap();
        let mut trace = b.finish();
        trace.bindings[0] = Binding::Line(ProjLine::from_i64(1, 0, 0));
        assert!(matches!(trace.replay(), Err(TraceError::Mismatch { index: 0 })));
    }

    #[test]
    fn on_curve_selector_replays() {
        // y = x - 1 meets the unit circle at (0,-1) and (1,0); lexicographic
        // order puts (0,-1) first.
        let scene = TraceScene {
            points: vec![ProjPoint::from_i64(1, 0), ProjPoint::from_i64(3, 2)],
            lines: vec![],
            curves: vec![Conic::unit_circle()],
        };
        let mut b = TraceBuilder::new(scene);
        let l = b.draw_line(PointId(0), PointId(1)).unwrap();
        let id = b
            .mark_on_curve_point(l, CurveId(0), &ProjPoint::from_i64(0, -1))
            .unwrap();
        assert_eq!(b.point(id), &ProjPoint::from_i64(0, -1));
        let trace = b.finish();
        assert!(matches!(
            trace.moves[1],
            Move::MarkOnCurve {
                sel: Selector::First,
                ..
            }
        ));
        trace.replay().unwrap();
    }

    #[test]
    fn adversary_region_checked() {
        let scene = TraceScene {
            points: vec![ProjPoint::from_i64(0, 0), ProjPoint::from_i64(1, 0)],
            lines: vec![],
            curves: vec![],
        };
        let mut b = TraceBuilder::new(scene);
        let l = b.draw_line(PointId(0), PointId(1)).unwrap();
        assert!(b.adversary(Region::OnLine(l), ci(5), ci(1)).is_err());
        let id = b.adversary(Region::OnLine(l), ci(5), ci(0)).unwrap();
        assert_eq!(b.point(id), &ProjPoint::from_i64(5, 0));
        b.finish().replay().unwrap();
    }

    #[test]
    fn trace_text_shape() {
        let scene = TraceScene {
            points: vec![ProjPoint::from_i64(0, 0), ProjPoint::from_i64(1, 2)],
            lines: vec![],
            curves: vec![],
        };
        let mut b = TraceBuilder::new(scene);
        let l = b.draw_line(PointId(0), PointId(1)).unwrap();
        b.claim_line("through", l);
        let text = b.finish().to_string();
        assert!(text.contains("L L0 := line(P0,P1)"));
        assert!(text.contains("claims:"));
        assert!(text.contains("through = L0 : line"));
    }
}
