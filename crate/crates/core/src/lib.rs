//! Exact kernel for straightedge constructions and impossibility certificates.
//!
//! Everything here is computed over towers of real quadratic extensions of the
//! rationals, so equality, incidence and tangency are decided exactly — there
//! is no floating point anywhere on a verification path. The crate provides:
//!
//! * [`field`] — arithmetic in iterated quadratic extensions ([`field::ConstructibleReal`]),
//!   square-root adjunction with canonical towers, and exact sign determination
//!   by rational interval refinement;
//! * [`poly`] — dense polynomials over the rationals or over a tower, Euclidean
//!   gcd, rational-root search, Sturm sequences and real-root isolation;
//! * [`membership`] — degree-obstruction witnesses for numbers that cannot lie
//!   in any quadratic tower (and hence cannot be produced by a construction);
//! * [`geom`] — the exact projective plane: points, lines, conics, maps,
//!   join/meet, pole/polar, line–conic intersection, circle detection;
//! * [`construct`] — straightedge constructions that emit replayable traces
//!   ([`trace::Trace`]) together with the exact objects they claim;
//! * [`closure`] — breadth-first closure of a configuration under straightedge
//!   moves with a seeded adversary;
//! * [`cert`] — Σ-set certificates of non-constructibility and their checker;
//! * [`scene`], [`svg`], [`expr`] — the text formats and the figure emitter.

pub mod cert;
pub mod closure;
pub mod construct;
pub mod expr;
pub mod field;
pub mod geom;
pub mod interval;
pub mod membership;
pub mod poly;
pub mod scene;
pub mod svg;
pub mod trace;

pub use field::{ConstructibleReal, FieldError, Sign, Tower};
pub use geom::{Conic, GeomError, ProjLine, ProjMap, ProjPoint};
