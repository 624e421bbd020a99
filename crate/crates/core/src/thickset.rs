//! Thick sets and their four-valued box classification.
//!
//! A thick set `[[X⊂, X⊃]]` is an interval of subsets: every set between a
//! lower bound `X⊂` and an upper bound `X⊃`. The difference `X⊃ \ X⊂` is
//! the penumbra. Thick sets are built from [`Atom`]s, parametric
//! inequalities `f(x, p) <= 0` with `p` ranging over a parameter box, and
//! combined by intersection, union, closed complement and boundary.
//!
//! Nothing is ever materialized: a [`SetExpr`] is only asked, box by box,
//! how a box relates to the thick set it denotes.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use crate::expr::{Env, Expr};
use crate::interval::{Interval, IntervalBox};

/// Verdict for a box `b` against a thick set `[[X⊂, X⊃]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoxClass {
    /// `b ⊆ X⊂`.
    In,
    /// `b ⊆ X⊃` and `b` misses the interior of `X⊂`: inside the penumbra.
    Pen,
    /// `b ∩ X⊃ = ∅`.
    Out,
    /// No claim.
    Unknown,
}

impl BoxClass {
    pub const ALL: [BoxClass; 4] = [
        BoxClass::In,
        BoxClass::Pen,
        BoxClass::Out,
        BoxClass::Unknown,
    ];

    pub fn intersect(self, other: BoxClass) -> BoxClass {
        use BoxClass::*;
        match (self, other) {
            (Out, _) | (_, Out) => Out,
            (In, In) => In,
            (In | Pen, In | Pen) => Pen,
            _ => Unknown,
        }
    }

    pub fn union(self, other: BoxClass) -> BoxClass {
        use BoxClass::*;
        match (self, other) {
            (In, _) | (_, In) => In,
            (Out, Out) => Out,
            (Out | Pen, Out | Pen) => Pen,
            _ => Unknown,
        }
    }

    /// Verdict against the closed complement `[[¬X⊃, ¬X⊂]]`.
    pub fn complement(self) -> BoxClass {
        match self {
            BoxClass::In => BoxClass::Out,
            BoxClass::Out => BoxClass::In,
            c => c,
        }
    }

    /// Verdict against `∂[[X]] = [[X]] ∩ ¬[[X]]`.
    pub fn boundary(self) -> BoxClass {
        self.intersect(self.complement())
    }

    /// Short label used in files: `IN`, `PEN`, `OUT`, `UNKNOWN`.
    pub fn label(self) -> &'static str {
        match self {
            BoxClass::In => "IN",
            BoxClass::Pen => "PEN",
            BoxClass::Out => "OUT",
            BoxClass::Unknown => "UNKNOWN",
        }
    }

    pub fn from_label(s: &str) -> Option<BoxClass> {
        BoxClass::ALL.into_iter().find(|c| c.label() == s)
    }
}

impl fmt::Display for BoxClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

// Above this many varying parameters the corner search is skipped.
const MAX_CORNER_PARAMS: usize = 16;

/// The thick set `{x | f(x,p) <= 0}` for `p` in a parameter box:
/// `X⊂ = {x | ∀p f(x,p) <= 0}`, `X⊃ = {x | ∃p f(x,p) <= 0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    constraint: Expr,
    params: IntervalBox,
    varying: Vec<usize>,
}

impl Atom {
    /// `params` is the full declared parameter box; only the parameters the
    /// constraint refers to take part in the quantification.
    pub fn new(constraint: Expr, params: IntervalBox) -> Atom {
        let varying = constraint.params_used();
        Atom {
            constraint,
            params,
            varying,
        }
    }

    pub fn constraint(&self) -> &Expr {
        &self.constraint
    }

    pub fn params(&self) -> &IntervalBox {
        &self.params
    }

    /// Classifies `bx`.
    ///
    /// The whole-range enclosure decides IN (strictly negative) and OUT
    /// (strictly positive). Otherwise the parameter corners are tried: one
    /// corner strictly negative over the box puts it in `X⊃` away from the
    /// boundary, one corner strictly positive keeps it out of `X⊂`.
    pub fn classify(&self, bx: &IntervalBox) -> BoxClass {
        let state = bx.as_slice();
        let whole = self
            .constraint
            .eval_interval(&Env::new(state, self.params.as_slice()));
        if whole.is_empty() {
            // f is undefined everywhere on the box: no x satisfies f <= 0.
            return BoxClass::Out;
        }
        if whole.hi() < 0.0 {
            return BoxClass::In;
        }
        if whole.lo() > 0.0 {
            return BoxClass::Out;
        }
        let m = self.varying.len();
        if m == 0 || m > MAX_CORNER_PARAMS {
            return BoxClass::Unknown;
        }
        let mut corner: Vec<Interval> = self.params.as_slice().to_vec();
        let mut some_negative = false;
        let mut some_positive = false;
        for mask in 0u32..(1u32 << m) {
            for (bit, &k) in self.varying.iter().enumerate() {
                let range = self.params[k];
                let v = if mask & (1 << bit) == 0 {
                    range.lo()
                } else {
                    range.hi()
                };
                corner[k] = Interval::point(v);
            }
            let r = self.constraint.eval_interval(&Env::new(state, &corner));
            if r.is_empty() {
                continue;
            }
            some_negative |= r.hi() < 0.0;
            some_positive |= r.lo() > 0.0;
            if some_negative && some_positive {
                return BoxClass::Pen;
            }
        }
        BoxClass::Unknown
    }
}

/// A thick set built from atoms.
#[derive(Clone, Debug, PartialEq)]
pub enum SetExpr {
    Atom(Atom),
    Intersect(Box<SetExpr>, Box<SetExpr>),
    Union(Box<SetExpr>, Box<SetExpr>),
    Complement(Box<SetExpr>),
    Boundary(Box<SetExpr>),
}

/// Membership of a point in a thin instance of a set expression, with an
/// explicit "on a constraint surface" value. Ordered so that intersection
/// is `min` and union is `max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointClass {
    Outside,
    OnConstraint,
    Inside,
}

impl PointClass {
    /// Membership in the closed set: inside or on its boundary.
    pub fn is_member(self) -> bool {
        self != PointClass::Outside
    }
}

/// Tolerance under which `|f|` counts as zero in thin point classification.
pub const ON_CONSTRAINT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThickError {
    DimensionMismatch { expected: usize, found: usize },
}

impl fmt::Display for ThickError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThickError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
        }
    }
}

impl core::error::Error for ThickError {}

impl SetExpr {
    pub fn atom(constraint: Expr, params: IntervalBox) -> SetExpr {
        SetExpr::Atom(Atom::new(constraint, params))
    }

    pub fn intersect(self, other: SetExpr) -> SetExpr {
        SetExpr::Intersect(Box::new(self), Box::new(other))
    }

    pub fn union(self, other: SetExpr) -> SetExpr {
        SetExpr::Union(Box::new(self), Box::new(other))
    }

    pub fn complement(self) -> SetExpr {
        SetExpr::Complement(Box::new(self))
    }

    pub fn boundary(self) -> SetExpr {
        SetExpr::Boundary(Box::new(self))
    }

    pub fn classify(&self, bx: &IntervalBox) -> BoxClass {
        match self {
            SetExpr::Atom(a) => a.classify(bx),
            SetExpr::Intersect(a, b) => {
                let ca = a.classify(bx);
                if ca == BoxClass::Out {
                    return BoxClass::Out;
                }
                ca.intersect(b.classify(bx))
            }
            SetExpr::Union(a, b) => {
                let ca = a.classify(bx);
                if ca == BoxClass::In {
                    return BoxClass::In;
                }
                ca.union(b.classify(bx))
            }
            SetExpr::Complement(a) => a.classify(bx).complement(),
            SetExpr::Boundary(a) => a.classify(bx).boundary(),
        }
    }

    /// Thin-instance membership of `x` with the parameters fixed to `p`.
    /// An oracle for testing, not a guaranteed computation.
    pub fn point_classify_thin(&self, x: &[f64], p: &[f64]) -> Result<PointClass, ThickError> {
        self.check_point_dims(x, p)?;
        Ok(self.point_rec(x, p))
    }

    fn check_point_dims(&self, x: &[f64], p: &[f64]) -> Result<(), ThickError> {
        let mut result = Ok(());
        self.for_each_atom(&mut |a| {
            if result.is_err() {
                return;
            }
            if a.params.dim() != p.len() {
                result = Err(ThickError::DimensionMismatch {
                    expected: a.params.dim(),
                    found: p.len(),
                });
            } else if a.constraint.state_arity() > x.len() {
                result = Err(ThickError::DimensionMismatch {
                    expected: a.constraint.state_arity(),
                    found: x.len(),
                });
            }
        });
        result
    }

    fn point_rec(&self, x: &[f64], p: &[f64]) -> PointClass {
        match self {
            SetExpr::Atom(a) => {
                let v = a.constraint.eval_point(x, p);
                if v.is_nan() {
                    PointClass::Outside
                } else if v.abs() <= ON_CONSTRAINT_TOL {
                    PointClass::OnConstraint
                } else if v < 0.0 {
                    PointClass::Inside
                } else {
                    PointClass::Outside
                }
            }
            SetExpr::Intersect(a, b) => a.point_rec(x, p).min(b.point_rec(x, p)),
            SetExpr::Union(a, b) => a.point_rec(x, p).max(b.point_rec(x, p)),
            SetExpr::Complement(a) => match a.point_rec(x, p) {
                PointClass::Inside => PointClass::Outside,
                PointClass::Outside => PointClass::Inside,
                PointClass::OnConstraint => PointClass::OnConstraint,
            },
            SetExpr::Boundary(a) => match a.point_rec(x, p) {
                PointClass::OnConstraint => PointClass::OnConstraint,
                _ => PointClass::Outside,
            },
        }
    }

    pub fn for_each_atom<'a>(&'a self, f: &mut impl FnMut(&'a Atom)) {
        match self {
            SetExpr::Atom(a) => f(a),
            SetExpr::Intersect(a, b) | SetExpr::Union(a, b) => {
                a.for_each_atom(f);
                b.for_each_atom(f);
            }
            SetExpr::Complement(a) | SetExpr::Boundary(a) => a.for_each_atom(f),
        }
    }
}
