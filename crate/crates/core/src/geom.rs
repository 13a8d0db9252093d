//! The exact projective plane over a quadratic tower.
//!
//! Points and lines are unnormalized homogeneous triples; equality is
//! cross-product vanishing, so no division (and no spurious tower growth)
//! happens on comparisons. Conics are stored as the six coefficients of
//! `a·x² + b·xy + c·y² + d·xz + e·yz + f·z²`; the associated symmetric
//! matrix is kept doubled so that polars and poles stay division-free.
//! Tangency and degeneracy are decided by exact zero tests, never by
//! thresholds.

use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

use crate::field::{promote_all, ConstructibleReal, FieldError, Sign};

type C = ConstructibleReal;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum GeomError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("homogeneous coordinates must not all vanish")]
    ZeroVector,
    #[error("join/meet of identical {0}")]
    Identical(&'static str),
    #[error("conic is degenerate")]
    DegenerateConic,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("line is contained in the conic")]
    LineInConic,
    #[error("symmetry axes undefined: conic is a circle concentric with the frame")]
    AxesUndefined,
    #[error("operation requires a real point")]
    NotReal,
    #[error("{0}")]
    Unsupported(&'static str),
}

/// Whether complex intersection points are materialized or dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntersectMode {
    RealOnly,
    Complexified,
}

fn cross3(a: &[C; 3], b: &[C; 3]) -> [C; 3] {
    [
        &(&a[1] * &b[2]) - &(&a[2] * &b[1]),
        &(&a[2] * &b[0]) - &(&a[0] * &b[2]),
        &(&a[0] * &b[1]) - &(&a[1] * &b[0]),
    ]
}

/// Floating prescreen for proportionality of homogeneous triples: when the
/// approximate cross product is clearly nonzero the triples cannot be
/// projectively equal, and the exact test is skipped. Inconclusive screens
/// (including any non-finite arithmetic) fall through to exact comparison.
fn clearly_not_proportional(a: &[C; 3], b: &[C; 3]) -> bool {
    let (mut ar, mut ai, mut br, mut bi) = ([0.0; 3], [0.0; 3], [0.0; 3], [0.0; 3]);
    for i in 0..3 {
        ar[i] = a[i].approx_fast();
        ai[i] = a[i].approx_fast_im();
        br[i] = b[i].approx_fast();
        bi[i] = b[i].approx_fast_im();
    }
    let na = ar.iter().chain(&ai).fold(0.0f64, |m, v| m.max(v.abs()));
    let nb = br.iter().chain(&bi).fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = na * nb;
    if !scale.is_finite() || scale == 0.0 {
        return false;
    }
    let mut worst = 0.0f64;
    for (i, j) in [(1, 2), (2, 0), (0, 1)] {
        // Complex cross-product component (ar + i·ai)[i]·(br + i·bi)[j] − …
        let re = ar[i] * br[j] - ai[i] * bi[j] - (ar[j] * br[i] - ai[j] * bi[i]);
        let im = ar[i] * bi[j] + ai[i] * br[j] - (ar[j] * bi[i] + ai[j] * br[i]);
        worst = worst.max(re.abs()).max(im.abs());
    }
    worst.is_finite() && worst > 1e-9 * scale
}

fn dot3(a: &[C; 3], b: &[C; 3]) -> C {
    &(&(&a[0] * &b[0]) + &(&a[1] * &b[1])) + &(&a[2] * &b[2])
}

fn triple_is_zero(a: &[C; 3]) -> bool {
    a.iter().all(|c| c.is_zero())
}

fn promote3(coords: [C; 3]) -> Result<[C; 3], GeomError> {
    let v = promote_all(&coords, true)?;
    let mut it = v.into_iter();
    Ok([
        it.next().unwrap(),
        it.next().unwrap(),
        it.next().unwrap(),
    ])
}

/// A projective point `(X : Y : Z)`.
#[derive(Debug, Clone)]
pub struct ProjPoint {
    coords: [C; 3],
}

/// A projective line `[u : v : w]`, the locus `uX + vY + wZ = 0`.
#[derive(Debug, Clone)]
pub struct ProjLine {
    coeffs: [C; 3],
}

impl ProjPoint {
    pub fn new(coords: [C; 3]) -> Result<Self, GeomError> {
        if triple_is_zero(&coords) {
            return Err(GeomError::ZeroVector);
        }
        Ok(ProjPoint {
            coords: promote3(coords)?,
        })
    }

    pub fn from_affine(x: C, y: C) -> Result<Self, GeomError> {
        ProjPoint::new([x, y, C::one()])
    }

    pub fn from_rationals(x: BigRational, y: BigRational) -> Self {
        ProjPoint {
            coords: [C::from_rational(x), C::from_rational(y), C::one()],
        }
    }

    pub fn from_i64(x: i64, y: i64) -> Self {
        ProjPoint {
            coords: [C::from_integer(x), C::from_integer(y), C::one()],
        }
    }

    pub fn at_infinity(dx: C, dy: C) -> Result<Self, GeomError> {
        ProjPoint::new([dx, dy, C::zero()])
    }

    pub fn coords(&self) -> &[C; 3] {
        &self.coords
    }

    pub fn x(&self) -> &C {
        &self.coords[0]
    }

    pub fn y(&self) -> &C {
        &self.coords[1]
    }

    pub fn z(&self) -> &C {
        &self.coords[2]
    }

    pub fn is_at_infinity(&self) -> bool {
        self.coords[2].is_zero()
    }

    /// Affine coordinates, when the point is finite.
    pub fn affine(&self) -> Result<(C, C), GeomError> {
        if self.is_at_infinity() {
            return Err(GeomError::Unsupported("affine coordinates of an infinite point"));
        }
        Ok((
            self.coords[0].checked_div(&self.coords[2])?,
            self.coords[1].checked_div(&self.coords[2])?,
        ))
    }

    /// True when the point equals a point with real coordinates (i.e. its
    /// coordinate ratios are real).
    pub fn is_real_point(&self) -> bool {
        let nz = match self.coords.iter().position(|c| !c.is_zero()) {
            Some(i) => i,
            None => return false,
        };
        self.coords.iter().all(|c| {
            match c.checked_div(&self.coords[nz]) {
                Ok(r) => r.is_real_valued(),
                Err(_) => false,
            }
        })
    }

    /// Divide out any common complex scale so the coordinates are literally
    /// real (requires `is_real_point`).
    pub fn realified(&self) -> Result<ProjPoint, GeomError> {
        let nz = self.coords.iter().position(|c| !c.is_zero()).unwrap();
        let mut out = Vec::with_capacity(3);
        for c in &self.coords {
            let r = c.checked_div(&self.coords[nz])?;
            if !r.is_real_valued() {
                return Err(GeomError::NotReal);
            }
            out.push(r.re());
        }
        ProjPoint::new([out[0].clone(), out[1].clone(), out[2].clone()])
    }

    pub fn conj(&self) -> ProjPoint {
        ProjPoint {
            coords: [
                self.coords[0].conj(),
                self.coords[1].conj(),
                self.coords[2].conj(),
            ],
        }
    }
}

impl PartialEq for ProjPoint {
    fn eq(&self, other: &Self) -> bool {
        if clearly_not_proportional(&self.coords, &other.coords) {
            return false;
        }
        triple_is_zero(&cross3(&self.coords, &other.coords))
    }
}

impl Eq for ProjPoint {}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} : {} : {})", self.coords[0], self.coords[1], self.coords[2])
    }
}

impl ProjLine {
    pub fn new(coeffs: [C; 3]) -> Result<Self, GeomError> {
        if triple_is_zero(&coeffs) {
            return Err(GeomError::ZeroVector);
        }
        Ok(ProjLine {
            coeffs: promote3(coeffs)?,
        })
    }

    pub fn from_i64(u: i64, v: i64, w: i64) -> Self {
        ProjLine {
            coeffs: [C::from_integer(u), C::from_integer(v), C::from_integer(w)],
        }
    }

    /// The line at infinity `z = 0`.
    pub fn at_infinity() -> Self {
        ProjLine::from_i64(0, 0, 1)
    }

    pub fn coeffs(&self) -> &[C; 3] {
        &self.coeffs
    }

    pub fn is_line_at_infinity(&self) -> bool {
        self.coeffs[0].is_zero() && self.coeffs[1].is_zero()
    }

    pub fn is_real_line(&self) -> bool {
        let nz = match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(i) => i,
            None => return false,
        };
        self.coeffs.iter().all(|c| {
            match c.checked_div(&self.coeffs[nz]) {
                Ok(r) => r.is_real_valued(),
                Err(_) => false,
            }
        })
    }

    pub fn realified(&self) -> Result<ProjLine, GeomError> {
        let nz = self.coeffs.iter().position(|c| !c.is_zero()).unwrap();
        let mut out = Vec::with_capacity(3);
        for c in &self.coeffs {
            let r = c.checked_div(&self.coeffs[nz])?;
            if !r.is_real_valued() {
                return Err(GeomError::NotReal);
            }
            out.push(r.re());
        }
        ProjLine::new([out[0].clone(), out[1].clone(), out[2].clone()])
    }

    /// Two distinct points spanning the line, chosen deterministically.
    pub fn span_points(&self) -> Result<(ProjPoint, ProjPoint), GeomError> {
        let [u, v, w] = &self.coeffs;
        if u.is_zero() && v.is_zero() {
            // The line at infinity.
            return Ok((
                ProjPoint::new([C::one(), C::zero(), C::zero()])?,
                ProjPoint::new([C::zero(), C::one(), C::zero()])?,
            ));
        }
        let dir = ProjPoint::new([v.clone(), -u, C::zero()])?;
        let base = if !u.is_zero() {
            ProjPoint::new([-w, C::zero(), u.clone()])?
        } else {
            ProjPoint::new([C::zero(), -w, v.clone()])?
        };
        Ok((base, dir))
    }
}

impl PartialEq for ProjLine {
    fn eq(&self, other: &Self) -> bool {
        if clearly_not_proportional(&self.coeffs, &other.coeffs) {
            return false;
        }
        triple_is_zero(&cross3(&self.coeffs, &other.coeffs))
    }
}

impl Eq for ProjLine {}

impl fmt::Display for ProjLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} : {} : {}]", self.coeffs[0], self.coeffs[1], self.coeffs[2])
    }
}

/// Line through two distinct points.
pub fn join(p: &ProjPoint, q: &ProjPoint) -> Result<ProjLine, GeomError> {
    let c = cross3(&p.coords, &q.coords);
    if triple_is_zero(&c) {
        return Err(GeomError::Identical("points"));
    }
    ProjLine::new(c)
}

/// Intersection of two distinct lines.
pub fn meet(l: &ProjLine, m: &ProjLine) -> Result<ProjPoint, GeomError> {
    let c = cross3(&l.coeffs, &m.coeffs);
    if triple_is_zero(&c) {
        return Err(GeomError::Identical("lines"));
    }
    ProjPoint::new(c)
}

pub fn incident(p: &ProjPoint, l: &ProjLine) -> bool {
    dot3(&p.coords, &l.coeffs).is_zero()
}

/// Exact cross-ratio of four distinct collinear points.
pub fn cross_ratio(
    a: &ProjPoint,
    b: &ProjPoint,
    c: &ProjPoint,
    d: &ProjPoint,
) -> Result<C, GeomError> {
    // Use a coordinate pair in which the four points remain distinct.
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let det = |p: &ProjPoint, q: &ProjPoint| -> C {
            &(&p.coords[i] * &q.coords[j]) - &(&p.coords[j] * &q.coords[i])
        };
        let ac = det(a, c);
        let bd = det(b, d);
        let ad = det(a, d);
        let bc = det(b, c);
        if ad.is_zero() || bc.is_zero() {
            continue;
        }
        if ac.is_zero() && bd.is_zero() {
            continue;
        }
        return Ok((&ac * &bd).checked_div(&(&ad * &bc))?);
    }
    Err(GeomError::Unsupported("cross-ratio of coincident points"))
}

/// A conic `a·x² + b·xy + c·y² + d·xz + e·yz + f·z² = 0`.
#[derive(Debug, Clone)]
pub struct Conic {
    coeffs: [C; 6],
}

impl Conic {
    pub fn new(coeffs: [C; 6]) -> Result<Self, GeomError> {
        if coeffs.iter().all(|c| c.is_zero()) {
            return Err(GeomError::ZeroVector);
        }
        let v = promote_all(&coeffs, true)?;
        let mut it = v.into_iter();
        Ok(Conic {
            coeffs: [
                it.next().unwrap(),
                it.next().unwrap(),
                it.next().unwrap(),
                it.next().unwrap(),
                it.next().unwrap(),
                it.next().unwrap(),
            ],
        })
    }

    pub fn from_i64(coeffs: [i64; 6]) -> Self {
        let [a, b, c, d, e, f] = coeffs;
        Conic {
            coeffs: [
                C::from_integer(a),
                C::from_integer(b),
                C::from_integer(c),
                C::from_integer(d),
                C::from_integer(e),
                C::from_integer(f),
            ],
        }
    }

    /// The circle `(x - cx)² + (y - cy)² = r²`.
    pub fn circle(cx: &C, cy: &C, r: &C) -> Result<Self, GeomError> {
        Self::circle_r2(cx, cy, &(r * r))
    }

    /// Circle from the squared radius.
    pub fn circle_r2(cx: &C, cy: &C, r2: &C) -> Result<Self, GeomError> {
        let two = C::from_integer(2);
        let f = &(&(cx * cx) + &(cy * cy)) - r2;
        Conic::new([
            C::one(),
            C::zero(),
            C::one(),
            -&(&two * cx),
            -&(&two * cy),
            f,
        ])
    }

    /// The unit circle `x² + y² = z²`.
    pub fn unit_circle() -> Self {
        Conic::from_i64([1, 0, 1, 0, 0, -1])
    }

    /// The parabola `y = x²`, i.e. `x² - yz = 0`.
    pub fn parabola_y_eq_x2() -> Self {
        Conic::from_i64([1, 0, 0, 0, -1, 0])
    }

    pub fn coeffs(&self) -> &[C; 6] {
        &self.coeffs
    }

    /// The doubled symmetric matrix `2M` of the quadratic form.
    pub fn doubled_matrix(&self) -> [[C; 3]; 3] {
        let [a, b, c, d, e, f] = &self.coeffs;
        let two = C::from_integer(2);
        [
            [&two * a, b.clone(), d.clone()],
            [b.clone(), &two * c, e.clone()],
            [d.clone(), e.clone(), &two * f],
        ]
    }

    /// Evaluate the quadratic form at a point.
    pub fn eval(&self, p: &ProjPoint) -> C {
        let [a, b, c, d, e, f] = &self.coeffs;
        let [x, y, z] = &p.coords;
        let mut acc = &(a * x) * x;
        acc = &acc + &(&(b * x) * y);
        acc = &acc + &(&(c * y) * y);
        acc = &acc + &(&(d * x) * z);
        acc = &acc + &(&(e * y) * z);
        &acc + &(&(f * z) * z)
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.eval(p).is_zero()
    }

    /// Determinant of the doubled matrix; zero exactly when degenerate.
    pub fn det(&self) -> C {
        det3(&self.doubled_matrix())
    }

    pub fn is_nondegenerate(&self) -> bool {
        !self.det().is_zero()
    }

    /// Polar line of a point (requires a nondegenerate conic).
    pub fn polar(&self, p: &ProjPoint) -> Result<ProjLine, GeomError> {
        if !self.is_nondegenerate() {
            return Err(GeomError::DegenerateConic);
        }
        let m = self.doubled_matrix();
        ProjLine::new(mat_vec(&m, &p.coords)).map_err(|_| GeomError::DegenerateConic)
    }

    /// Pole of a line (requires a nondegenerate conic).
    pub fn pole(&self, l: &ProjLine) -> Result<ProjPoint, GeomError> {
        if !self.is_nondegenerate() {
            return Err(GeomError::DegenerateConic);
        }
        let adj = adj3(&self.doubled_matrix());
        ProjPoint::new(mat_vec(&adj, &l.coeffs)).map_err(|_| GeomError::DegenerateConic)
    }

    /// Center: the pole of the line at infinity.
    pub fn center(&self) -> Result<ProjPoint, GeomError> {
        self.pole(&ProjLine::at_infinity())
    }

    /// A conic is a circle exactly when both cyclic points `(1 : ±i : 0)`
    /// satisfy its equation.
    pub fn is_circle(&self) -> bool {
        let i = C::i();
        for pt in [
            ProjPoint {
                coords: [C::one(), i.clone(), C::zero()],
            },
            ProjPoint {
                coords: [C::one(), -&i, C::zero()],
            },
        ] {
            if !self.contains(&pt) {
                return false;
            }
        }
        true
    }

    pub fn is_real_conic(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_real_valued())
    }

    /// Whether the conic carries any real point (definite forms do not).
    pub fn has_real_points(&self) -> Result<bool, GeomError> {
        if !self.is_real_conic() {
            return Err(GeomError::NotReal);
        }
        // The real conic q = 0 is empty iff the symmetric matrix is definite.
        // Test definiteness of 2M by checking the three leading principal
        // minors have a constant strict sign pattern (+,+,+ or -,+,-).
        let m = self.doubled_matrix();
        let m1 = m[0][0].clone();
        let m2 = &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]);
        let m3 = det3(&m);
        // Guard against zero minors (indefinite or semidefinite): those
        // conics always have real points unless the whole form vanishes.
        let s1 = m1.sign()?;
        let s2 = m2.sign()?;
        let s3 = m3.sign()?;
        let pos_def = s1 == Sign::Positive && s2 == Sign::Positive && s3 == Sign::Positive;
        let neg_def = s1 == Sign::Negative && s2 == Sign::Positive && s3 == Sign::Negative;
        Ok(!(pos_def || neg_def))
    }

    /// Scale so the coefficients are real, when the conic equals a real one.
    pub fn realified(&self) -> Result<Conic, GeomError> {
        let nz = self.coeffs.iter().position(|c| !c.is_zero()).unwrap();
        let mut out = Vec::with_capacity(6);
        for c in &self.coeffs {
            let r = c.checked_div(&self.coeffs[nz])?;
            if !r.is_real_valued() {
                return Err(GeomError::NotReal);
            }
            out.push(r.re());
        }
        Conic::new([
            out[0].clone(),
            out[1].clone(),
            out[2].clone(),
            out[3].clone(),
            out[4].clone(),
            out[5].clone(),
        ])
    }

    /// Restrict the quadratic form to a parametrized line `base + t·dir`,
    /// returning `(A, B, C)` with `q(base + t·dir) = A·t² + B·t + C`.
    fn restrict_to_line(&self, base: &ProjPoint, dir: &ProjPoint) -> (C, C, C) {
        let qa = self.eval(dir);
        let qc = self.eval(base);
        // B = q(base + dir) - q(base) - q(dir), the polarized cross term.
        let sum = ProjPoint {
            coords: [
                &base.coords[0] + &dir.coords[0],
                &base.coords[1] + &dir.coords[1],
                &base.coords[2] + &dir.coords[2],
            ],
        };
        let qb = &(&self.eval(&sum) - &qa) - &qc;
        (qa, qb, qc)
    }
}

impl PartialEq for Conic {
    fn eq(&self, other: &Self) -> bool {
        // Proportional coefficient vectors: all 2x2 minors vanish.
        for i in 0..6 {
            for j in (i + 1)..6 {
                let m = &(&self.coeffs[i] * &other.coeffs[j]) - &(&self.coeffs[j] * &other.coeffs[i]);
                if !m.is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

impl Eq for Conic {}

impl fmt::Display for Conic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d, e, g] = &self.coeffs;
        write!(f, "{{{a}, {b}, {c}, {d}, {e}, {g}}}")
    }
}

/// Exact intersection of a line with a conic: at most two points with
/// multiplicities summing to two (unless the linear case leaves one).
///
/// With [`IntersectMode::RealOnly`] a negative discriminant yields an empty
/// set; with [`IntersectMode::Complexified`] the conjugate pair is returned.
/// The tower grows by one level when the discriminant is not a square.
pub fn line_conic_intersect(
    l: &ProjLine,
    conic: &Conic,
    mode: IntersectMode,
) -> Result<Vec<(ProjPoint, u8)>, GeomError> {
    let (base, dir) = l.span_points()?;
    let (qa, qb, qc) = conic.restrict_to_line(&base, &dir);
    let comb = |t_num: &C, t_den: &C| -> Result<ProjPoint, GeomError> {
        // base·t_den + dir·t_num, projectively the point at parameter t.
        let coords = [
            &(&base.coords[0] * t_den) + &(&dir.coords[0] * t_num),
            &(&base.coords[1] * t_den) + &(&dir.coords[1] * t_num),
            &(&base.coords[2] * t_den) + &(&dir.coords[2] * t_num),
        ];
        Ok(ProjPoint::new(coords)?)
    };
    if qa.is_zero() {
        if qb.is_zero() {
            if qc.is_zero() {
                return Err(GeomError::LineInConic);
            }
            // Only the direction point lies on the conic; the line is tangent
            // there (the restriction has a double root at infinity).
            return Ok(vec![(dir, 2)]);
        }
        // Linear: root t = -qc/qb, plus the direction point itself.
        let pt = comb(&-&qc, &qb)?;
        return Ok(vec![(dir, 1), (pt, 1)]);
    }
    let four = C::from_integer(4);
    let disc = &(&qb * &qb) - &(&four * &(&qa * &qc));
    if disc.is_zero() {
        let two = C::from_integer(2);
        let pt = comb(&-&qb, &(&two * &qa))?;
        return Ok(vec![(pt, 2)]);
    }
    let disc_for_sqrt = match mode {
        IntersectMode::RealOnly => {
            if disc.is_real_valued() && disc.sign()? == Sign::Negative {
                return Ok(Vec::new());
            }
            if !disc.is_real_valued() {
                return Err(GeomError::NotReal);
            }
            disc.clone()
        }
        IntersectMode::Complexified => {
            if disc.is_real_valued() && disc.sign()? == Sign::Negative {
                disc.complexified()
            } else {
                disc.clone()
            }
        }
    };
    let s = disc_for_sqrt.sqrt_adjoin()?;
    let two_a = &C::from_integer(2) * &qa;
    let p1 = comb(&(&-&qb + &s), &two_a)?;
    let p2 = comb(&(&-&qb - &s), &two_a)?;
    Ok(vec![(p1, 1), (p2, 1)])
}

/// Order two real points lexicographically by affine coordinates (finite
/// points first, then by x, then y; infinite points by direction slope).
pub fn cmp_points_lex(p: &ProjPoint, q: &ProjPoint) -> Result<std::cmp::Ordering, GeomError> {
    use std::cmp::Ordering;
    match (p.is_at_infinity(), q.is_at_infinity()) {
        (true, false) => return Ok(Ordering::Greater),
        (false, true) => return Ok(Ordering::Less),
        (true, true) => {
            // Compare directions (x : y) as slopes y/x with vertical last.
            let pv = p.coords[0].is_zero();
            let qv = q.coords[0].is_zero();
            return Ok(match (pv, qv) {
                (true, true) => Ordering::Equal,
                (true, false) => Ordering::Greater,
                (false, true) => Ordering::Less,
                (false, false) => {
                    let ps = p.coords[1].checked_div(&p.coords[0])?;
                    let qs = q.coords[1].checked_div(&q.coords[0])?;
                    ps.cmp_exact(&qs)?
                }
            });
        }
        (false, false) => {}
    }
    let (px, py) = p.affine()?;
    let (qx, qy) = q.affine()?;
    let ord = px.cmp_exact(&qx)?;
    if ord != std::cmp::Ordering::Equal {
        return Ok(ord);
    }
    Ok(py.cmp_exact(&qy)?)
}

fn det2(a: &C, b: &C, c: &C, d: &C) -> C {
    &(a * d) - &(b * c)
}

pub(crate) fn det3(m: &[[C; 3]; 3]) -> C {
    let c0 = det2(&m[1][1], &m[1][2], &m[2][1], &m[2][2]);
    let c1 = det2(&m[1][0], &m[1][2], &m[2][0], &m[2][2]);
    let c2 = det2(&m[1][0], &m[1][1], &m[2][0], &m[2][1]);
    &(&(&m[0][0] * &c0) - &(&m[0][1] * &c1)) + &(&m[0][2] * &c2)
}

/// Adjugate: `adj(M) · M = det(M) · I`.
pub(crate) fn adj3(m: &[[C; 3]; 3]) -> [[C; 3]; 3] {
    let cof = |r: usize, c: usize| -> C {
        let rows: Vec<usize> = (0..3).filter(|&i| i != r).collect();
        let cols: Vec<usize> = (0..3).filter(|&j| j != c).collect();
        let d = det2(
            &m[rows[0]][cols[0]],
            &m[rows[0]][cols[1]],
            &m[rows[1]][cols[0]],
            &m[rows[1]][cols[1]],
        );
        if (r + c) % 2 == 0 {
            d
        } else {
            -&d
        }
    };
    // Adjugate is the transpose of the cofactor matrix.
    [
        [cof(0, 0), cof(1, 0), cof(2, 0)],
        [cof(0, 1), cof(1, 1), cof(2, 1)],
        [cof(0, 2), cof(1, 2), cof(2, 2)],
    ]
}

pub(crate) fn mat_vec(m: &[[C; 3]; 3], v: &[C; 3]) -> [C; 3] {
    [
        dot3(&m[0], v),
        dot3(&m[1], v),
        dot3(&m[2], v),
    ]
}

pub(crate) fn mat_mul(a: &[[C; 3]; 3], b: &[[C; 3]; 3]) -> [[C; 3]; 3] {
    let col = |j: usize| [b[0][j].clone(), b[1][j].clone(), b[2][j].clone()];
    let cols = [col(0), col(1), col(2)];
    let mut out: Vec<[C; 3]> = Vec::with_capacity(3);
    for row in a {
        out.push([
            dot3(row, &cols[0]),
            dot3(row, &cols[1]),
            dot3(row, &cols[2]),
        ]);
    }
    let mut it = out.into_iter();
    [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
}

pub(crate) fn transpose(m: &[[C; 3]; 3]) -> [[C; 3]; 3] {
    let g = |i: usize, j: usize| m[j][i].clone();
    [
        [g(0, 0), g(0, 1), g(0, 2)],
        [g(1, 0), g(1, 1), g(1, 2)],
        [g(2, 0), g(2, 1), g(2, 2)],
    ]
}

/// An invertible projective transformation.
#[derive(Debug, Clone)]
pub struct ProjMap {
    matrix: [[C; 3]; 3],
}

impl ProjMap {
    pub fn new(matrix: [[C; 3]; 3]) -> Result<Self, GeomError> {
        let flat: Vec<C> = matrix.iter().flatten().cloned().collect();
        let flat = promote_all(&flat, true)?;
        let mut it = flat.into_iter();
        let mut rows = Vec::with_capacity(3);
        for _ in 0..3 {
            rows.push([
                it.next().unwrap(),
                it.next().unwrap(),
                it.next().unwrap(),
            ]);
        }
        let mut mit = rows.into_iter();
        let matrix = [mit.next().unwrap(), mit.next().unwrap(), mit.next().unwrap()];
        if det3(&matrix).is_zero() {
            return Err(GeomError::SingularMatrix);
        }
        Ok(ProjMap { matrix })
    }

    pub fn from_i64(rows: [[i64; 3]; 3]) -> Result<Self, GeomError> {
        let conv = |r: [i64; 3]| r.map(C::from_integer);
        ProjMap::new([conv(rows[0]), conv(rows[1]), conv(rows[2])])
    }

    pub fn identity() -> Self {
        ProjMap::from_i64([[1, 0, 0], [0, 1, 0], [0, 0, 1]]).unwrap()
    }

    pub fn matrix(&self) -> &[[C; 3]; 3] {
        &self.matrix
    }

    pub fn det(&self) -> C {
        det3(&self.matrix)
    }

    /// The inverse transformation (as the adjugate, which is projectively
    /// the same map).
    pub fn inverse(&self) -> ProjMap {
        ProjMap {
            matrix: adj3(&self.matrix),
        }
    }

    /// Composition: `self` after `first`.
    pub fn compose_after(&self, first: &ProjMap) -> Result<ProjMap, GeomError> {
        ProjMap::new(mat_mul(&self.matrix, &first.matrix))
    }

    pub fn apply_point(&self, p: &ProjPoint) -> Result<ProjPoint, GeomError> {
        ProjPoint::new(mat_vec(&self.matrix, &p.coords))
    }

    /// Lines transform by the inverse transpose; the adjugate transpose is
    /// projectively identical.
    pub fn apply_line(&self, l: &ProjLine) -> Result<ProjLine, GeomError> {
        let adj_t = transpose(&adj3(&self.matrix));
        ProjLine::new(mat_vec(&adj_t, &l.coeffs))
    }

    /// Conics transform contravariantly: `M ↦ adj(A)ᵀ · M · adj(A)`.
    pub fn apply_conic(&self, c: &Conic) -> Result<Conic, GeomError> {
        let adj = adj3(&self.matrix);
        let m = mat_mul(&mat_mul(&transpose(&adj), &c.doubled_matrix()), &adj);
        // Read the (doubled) matrix back as coefficients, scaled by 2 to
        // avoid halves: [2a, 2b, 2c, 2d, 2e, 2f] is the same conic.
        let two = C::from_integer(2);
        Conic::new([
            m[0][0].clone(),
            &two * &m[0][1],
            m[1][1].clone(),
            &two * &m[0][2],
            &two * &m[1][2],
            m[2][2].clone(),
        ])
    }
}

impl PartialEq for ProjMap {
    fn eq(&self, other: &Self) -> bool {
        // Proportional matrices.
        let a: Vec<&C> = self.matrix.iter().flatten().collect();
        let b: Vec<&C> = other.matrix.iter().flatten().collect();
        for i in 0..9 {
            for j in (i + 1)..9 {
                if !(&(a[i] * b[j]) - &(a[j] * b[i])).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// Symmetry axes of a central conic, in a frame whose unit circle is given.
///
/// The axes are the eigen-directions of the upper-left 2×2 block through the
/// conic's center; solving the eigenvalue quadratic may grow the tower by one
/// level. A circle concentric with the frame has every diameter as an axis
/// and is rejected.
pub fn symmetry_axes(conic: &Conic, frame_circle: &Conic) -> Result<Vec<ProjLine>, GeomError> {
    if *frame_circle != Conic::unit_circle() {
        return Err(GeomError::Unsupported(
            "symmetry axes require the frame's unit circle",
        ));
    }
    if !conic.is_nondegenerate() {
        return Err(GeomError::DegenerateConic);
    }
    let center = conic.center()?;
    let [a, b, c, ..] = &conic.coeffs;
    if b.is_zero() && a == c {
        // A circle: concentric with the frame or not, every axis through its
        // center is a symmetry axis relative to the circle itself.
        return Err(GeomError::AxesUndefined);
    }
    let axis_through = |dx: C, dy: C| -> Result<ProjLine, GeomError> {
        let inf = ProjPoint::at_infinity(dx, dy)?;
        join(&center, &inf)
    };
    if b.is_zero() {
        return Ok(vec![
            axis_through(C::one(), C::zero())?,
            axis_through(C::zero(), C::one())?,
        ]);
    }
    // Eigenvalues of [[2a, b], [b, 2c]]: λ² − 2(a+c)λ + (4ac − b²) = 0.
    let two = C::from_integer(2);
    let tr = &two * &(a + c);
    let det = &(&(&two * a) * &(&two * c)) - &(b * b);
    let disc = &(&tr * &tr) - &(&C::from_integer(4) * &det);
    let s = disc.sqrt_adjoin()?;
    let mut axes = Vec::with_capacity(2);
    for lam in [(&tr + &s).checked_div(&two)?, (&tr - &s).checked_div(&two)?] {
        // Eigen-direction for λ: (b, λ − 2a) (nonzero because b ≠ 0).
        let dir_y = &lam - &(&two * a);
        axes.push(axis_through(b.clone(), dir_y)?);
    }
    Ok(axes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ci(n: i64) -> C {
        C::from_integer(n)
    }

    fn cr(n: i64, d: i64) -> C {
        C::rational(n, d)
    }

    #[test]
    fn join_of_axis_points() {
        let a = ProjPoint::from_i64(0, 0);
        let b = ProjPoint::from_i64(1, 0);
        let l = join(&a, &b).unwrap();
        assert_eq!(l, ProjLine::from_i64(0, 1, 0));
    }

    #[test]
    fn parallels_meet_at_infinity() {
        let l = ProjLine::from_i64(0, 1, 0);
        let m = ProjLine::from_i64(0, 1, -1);
        let p = meet(&l, &m).unwrap();
        assert_eq!(p, ProjPoint::new([ci(1), ci(0), ci(0)]).unwrap());
        assert!(p.is_at_infinity());
    }

    #[test]
    fn quadrilateral_diagonal_meet() {
        // meet(join(a,b), join(c,d)) for the hand-solved 2x2 system.
        let a = ProjPoint::from_i64(0, 0);
        let b = ProjPoint::from_i64(1, 1);
        let c = ProjPoint::from_i64(1, 0);
        let d = ProjPoint::from_i64(0, 1);
        let p = meet(&join(&a, &b).unwrap(), &join(&c, &d).unwrap()).unwrap();
        let expect = ProjPoint::new([cr(1, 2), cr(1, 2), ci(1)]).unwrap();
        assert_eq!(p, expect);
    }

    #[test]
    fn join_of_equal_points_is_error() {
        let a = ProjPoint::from_i64(2, 3);
        let b = ProjPoint::new([ci(4), ci(6), ci(2)]).unwrap();
        assert!(matches!(join(&a, &b), Err(GeomError::Identical(_))));
    }

    #[test]
    fn pole_of_infinity_is_center() {
        let circle = Conic::unit_circle();
        let center = circle.pole(&ProjLine::at_infinity()).unwrap();
        assert_eq!(center, ProjPoint::from_i64(0, 0));
        // Shifted circle: center recovered exactly.
        let c2 = Conic::circle(&ci(2), &ci(1), &ci(3)).unwrap();
        assert_eq!(c2.center().unwrap(), ProjPoint::from_i64(2, 1));
    }

    #[test]
    fn polar_of_external_point() {
        // polar((0,2), unit circle) is y = 1/2, dual triple [0 : 2 : -1].
        let circle = Conic::unit_circle();
        let p = ProjPoint::from_i64(0, 2);
        let l = circle.polar(&p).unwrap();
        assert_eq!(l, ProjLine::from_i64(0, 2, -1));
    }

    #[test]
    fn pole_polar_duality() {
        let conic = Conic::from_i64([5, 6, 5, 0, 0, -8]);
        let p = ProjPoint::from_i64(3, -7);
        let l = conic.polar(&p).unwrap();
        let q = conic.pole(&l).unwrap();
        assert_eq!(q, p);
    }

    #[test]
    fn polar_of_on_conic_point_is_tangent() {
        let circle = Conic::unit_circle();
        let p = ProjPoint::from_i64(1, 0);
        let t = circle.polar(&p).unwrap();
        let hits = line_conic_intersect(&t, &circle, IntersectMode::RealOnly).unwrap();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].1, 2);
        assert_eq!(hits[0].0, p);
    }

    #[test]
    fn diagonal_line_meets_unit_circle_in_sqrt2_points() {
        // y = x meets x² + y² = 1 at ±(√2/2, √2/2).
        let l = ProjLine::from_i64(1, -1, 0);
        let circle = Conic::unit_circle();
        let pts = line_conic_intersect(&l, &circle, IntersectMode::RealOnly).unwrap();
        assert_eq!(pts.len(), 2);
        let s2 = ci(2).sqrt_adjoin().unwrap();
        let h = s2.checked_div(&ci(2)).unwrap();
        let plus = ProjPoint::from_affine(h.clone(), h.clone()).unwrap();
        let minus = ProjPoint::from_affine(-&h, -&h).unwrap();
        assert!(pts.iter().any(|(p, _)| *p == plus));
        assert!(pts.iter().any(|(p, _)| *p == minus));
        for (p, _) in &pts {
            assert!(circle.contains(p));
            assert!(incident(p, &l));
        }
    }

    #[test]
    fn tangent_line_reports_multiplicity_two() {
        let l = ProjLine::from_i64(0, 1, -1); // y = 1
        let circle = Conic::unit_circle();
        let pts = line_conic_intersect(&l, &circle, IntersectMode::RealOnly).unwrap();
        assert_eq!(pts, vec![(ProjPoint::from_i64(0, 1), 2)]);
    }

    #[test]
    fn secant_with_rational_roots() {
        // y = x - 1 meets the unit circle where 2x² - 2x = 0.
        let l = ProjLine::from_i64(1, -1, -1);
        let circle = Conic::unit_circle();
        let pts = line_conic_intersect(&l, &circle, IntersectMode::RealOnly).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts.iter().any(|(p, _)| *p == ProjPoint::from_i64(1, 0)));
        assert!(pts.iter().any(|(p, _)| *p == ProjPoint::from_i64(0, -1)));
    }

    #[test]
    fn missing_circle_in_real_mode_complex_in_complexified() {
        let l = ProjLine::from_i64(0, 1, -3); // y = 3
        let circle = Conic::unit_circle();
        assert!(line_conic_intersect(&l, &circle, IntersectMode::RealOnly)
            .unwrap()
            .is_empty());
        let pts = line_conic_intersect(&l, &circle, IntersectMode::Complexified).unwrap();
        assert_eq!(pts.len(), 2);
        for (p, _) in &pts {
            assert!(circle.contains(p));
            assert!(!p.is_real_point());
        }
    }

    #[test]
    fn circle_detection_via_cyclic_points() {
        assert!(Conic::unit_circle().is_circle());
        assert!(!Conic::parabola_y_eq_x2().is_circle());
        // (x-1)² + (y+1)² = 1: a circle.
        let alpha = Conic::circle(&ci(1), &ci(-1), &ci(1)).unwrap();
        assert!(alpha.is_circle());
        // An ellipse is not.
        assert!(!Conic::from_i64([1, 0, 4, 0, 0, -4]).is_circle());
    }

    #[test]
    fn map_scales_circle() {
        // diag(1,1,2) sends the unit circle to x² + y² = z²/4 and the center
        // to the center (matrix congruence worked by hand).
        let map = ProjMap::from_i64([[1, 0, 0], [0, 1, 0], [0, 0, 2]]).unwrap();
        let c = map.apply_conic(&Conic::unit_circle()).unwrap();
        let expect = Conic::new([ci(4), ci(0), ci(4), ci(0), ci(0), ci(-1)]).unwrap();
        assert_eq!(c, expect);
        assert_eq!(
            map.apply_point(&ProjPoint::from_i64(0, 0)).unwrap(),
            ProjPoint::from_i64(0, 0)
        );
    }

    #[test]
    fn shear_map_sends_x_axis_to_diagonal() {
        // (x, y) ↦ (x, x + √3·y) maps y = 0 onto y = x (images of two points).
        let s3 = ci(3).sqrt_adjoin().unwrap();
        let map = ProjMap::new([
            [ci(1), ci(0), ci(0)],
            [ci(1), s3, ci(0)],
            [ci(0), ci(0), ci(1)],
        ])
        .unwrap();
        let x_axis = ProjLine::from_i64(0, 1, 0);
        let img = map.apply_line(&x_axis).unwrap();
        assert_eq!(img, ProjLine::from_i64(1, -1, 0));
    }

    #[test]
    fn identity_map_fixes_objects() {
        let id = ProjMap::identity();
        let p = ProjPoint::from_i64(3, 4);
        let c = Conic::circle(&ci(1), &ci(2), &ci(3)).unwrap();
        assert_eq!(id.apply_point(&p).unwrap(), p);
        assert_eq!(id.apply_conic(&c).unwrap(), c);
    }

    #[test]
    fn singular_matrix_rejected() {
        assert!(matches!(
            ProjMap::from_i64([[1, 2, 3], [2, 4, 6], [0, 0, 1]]),
            Err(GeomError::SingularMatrix)
        ));
    }

    #[test]
    fn map_commutes_with_incidence_and_intersection() {
        let map = ProjMap::from_i64([[2, 1, 0], [0, 1, -1], [1, 0, 3]]).unwrap();
        let l = ProjLine::from_i64(1, -1, -1);
        let circle = Conic::unit_circle();
        let before = line_conic_intersect(&l, &circle, IntersectMode::RealOnly).unwrap();
        let after = line_conic_intersect(
            &map.apply_line(&l).unwrap(),
            &map.apply_conic(&circle).unwrap(),
            IntersectMode::RealOnly,
        )
        .unwrap();
        assert_eq!(before.len(), after.len());
        for (p, _) in &before {
            let ip = map.apply_point(p).unwrap();
            assert!(after.iter().any(|(q, _)| *q == ip));
        }
    }

    #[test]
    fn cross_ratio_of_harmonic_points() {
        // (0, 1; 1/2, ∞) on the x-axis is harmonic: cross-ratio −1.
        let a = ProjPoint::from_i64(0, 0);
        let b = ProjPoint::from_i64(1, 0);
        let m = ProjPoint::from_affine(cr(1, 2), ci(0)).unwrap();
        let inf = ProjPoint::new([ci(1), ci(0), ci(0)]).unwrap();
        let r = cross_ratio(&a, &b, &m, &inf).unwrap();
        assert_eq!(r, ci(-1));
    }

    #[test]
    fn cross_ratio_invariant_under_maps() {
        let a = ProjPoint::from_i64(0, 0);
        let b = ProjPoint::from_i64(1, 1);
        let c = ProjPoint::from_i64(2, 2);
        let d = ProjPoint::from_i64(5, 5);
        let before = cross_ratio(&a, &b, &c, &d).unwrap();
        let map = ProjMap::from_i64([[1, 2, 1], [0, 3, -1], [2, 0, 5]]).unwrap();
        let after = cross_ratio(
            &map.apply_point(&a).unwrap(),
            &map.apply_point(&b).unwrap(),
            &map.apply_point(&c).unwrap(),
            &map.apply_point(&d).unwrap(),
        )
        .unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn axes_of_axis_aligned_ellipse() {
        // x²/4 + y² = 1 (as x² + 4y² - 4 = 0): axes along the coordinate axes.
        let e = Conic::from_i64([1, 0, 4, 0, 0, -4]);
        let axes = symmetry_axes(&e, &Conic::unit_circle()).unwrap();
        assert_eq!(axes.len(), 2);
        assert!(axes.contains(&ProjLine::from_i64(0, 1, 0)));
        assert!(axes.contains(&ProjLine::from_i64(1, 0, 0)));
    }

    #[test]
    fn axes_of_rotated_ellipse() {
        // 5x² + 6xy + 5y² = 8: axes along (1,1) and (1,−1).
        let e = Conic::from_i64([5, 6, 5, 0, 0, -8]);
        let axes = symmetry_axes(&e, &Conic::unit_circle()).unwrap();
        assert_eq!(axes.len(), 2);
        // Lines through the origin with those directions.
        assert!(axes.contains(&ProjLine::from_i64(1, -1, 0)));
        assert!(axes.contains(&ProjLine::from_i64(1, 1, 0)));
    }

    #[test]
    fn concentric_circle_axes_rejected() {
        let c = Conic::from_i64([1, 0, 1, 0, 0, -4]);
        assert!(matches!(
            symmetry_axes(&c, &Conic::unit_circle()),
            Err(GeomError::AxesUndefined)
        ));
    }

    #[test]
    fn definite_conic_has_no_real_points() {
        // x² + y² + z² = 0 only has complex points.
        let c = Conic::from_i64([1, 0, 1, 0, 0, 1]);
        assert!(!c.has_real_points().unwrap());
        assert!(Conic::unit_circle().has_real_points().unwrap());
    }
}
