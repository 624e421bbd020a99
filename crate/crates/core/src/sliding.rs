//! Thick enclosure of the sliding surface of a switched system.
//!
//! For `x' = f_a(x)` on a closed region `A = {c <= 0}` and `x' = f_b(x)` on
//! its closed complement, the sliding surface is
//!
//! ```text
//! S(A) = ∂A ∩ {L_a >= 0} ∩ {L_b <= 0}      L_i = dc/dx · f_i
//! ```
//!
//! and for composed regions
//!
//! ```text
//! S(A1 ∩ A2) = (S(A1) ∩ A2)  ∪ (S(A2) ∩ A1)
//! S(A1 ∪ A2) = (S(A1) ∩ ¬A2) ∪ (S(A2) ∩ ¬A1)
//! ```
//!
//! Replacing every set by its thick counterpart gives a [`SetExpr`] whose
//! upper bound contains the sliding surface of every parameter instance.

use alloc::vec::Vec;
use core::fmt;

use crate::expr::{lie_derivative, Expr, ExprError};
use crate::interval::IntervalBox;
use crate::thickset::SetExpr;

/// Boolean structure of the switching region. Leaves are closed sets
/// `{x | c(x, p) <= 0}`.
#[derive(Clone, Debug, PartialEq)]
pub enum RegionTree {
    Leaf {
        constraint: Expr,
        params: IntervalBox,
    },
    And(Vec<RegionTree>),
    Or(Vec<RegionTree>),
}

impl RegionTree {
    pub fn leaf(constraint: Expr, params: IntervalBox) -> RegionTree {
        RegionTree::Leaf { constraint, params }
    }

    /// The region as a thick set.
    pub fn to_set_expr(&self) -> Result<SetExpr, SlidingError> {
        match self {
            RegionTree::Leaf { constraint, params } => {
                Ok(SetExpr::atom(constraint.clone(), params.clone()))
            }
            RegionTree::And(children) => {
                fold_nonempty(children, |c| c.to_set_expr(), SetExpr::intersect)
            }
            RegionTree::Or(children) => {
                fold_nonempty(children, |c| c.to_set_expr(), SetExpr::union)
            }
        }
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<(&Expr, &IntervalBox)> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<(&'a Expr, &'a IntervalBox)>) {
        match self {
            RegionTree::Leaf { constraint, params } => out.push((constraint, params)),
            RegionTree::And(children) | RegionTree::Or(children) => {
                for c in children {
                    c.collect_leaves(out);
                }
            }
        }
    }
}

fn fold_nonempty<T>(
    children: &[RegionTree],
    mut build: impl FnMut(&RegionTree) -> Result<T, SlidingError>,
    combine: impl Fn(T, T) -> T,
) -> Result<T, SlidingError> {
    let (first, rest) = children.split_first().ok_or(SlidingError::EmptyRegion)?;
    rest.iter()
        .try_fold(build(first)?, |acc, c| Ok(combine(acc, build(c)?)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SlidingError {
    /// An `and`/`or` node without children.
    EmptyRegion,
    /// The two fields do not have the same number of components.
    FieldArity {
        field_a: usize,
        field_b: usize,
    },
    Expr(ExprError),
}

impl From<ExprError> for SlidingError {
    fn from(e: ExprError) -> Self {
        SlidingError::Expr(e)
    }
}

impl fmt::Display for SlidingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlidingError::EmptyRegion => f.write_str("region node without children"),
            SlidingError::FieldArity { field_a, field_b } => write!(
                f,
                "field a has {field_a} components but field b has {field_b}"
            ),
            SlidingError::Expr(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SlidingError {}

/// A switched system: `field_a` applies inside `region`, `field_b` outside.
#[derive(Clone, Debug, PartialEq)]
pub struct SlidingSpec {
    pub region: RegionTree,
    pub field_a: Vec<Expr>,
    pub field_b: Vec<Expr>,
}

/// Lie derivatives of one region leaf along both fields.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafLie {
    pub constraint: Expr,
    pub along_a: Expr,
    pub along_b: Expr,
}

impl SlidingSpec {
    pub fn new(
        region: RegionTree,
        field_a: Vec<Expr>,
        field_b: Vec<Expr>,
    ) -> Result<SlidingSpec, SlidingError> {
        if field_a.len() != field_b.len() {
            return Err(SlidingError::FieldArity {
                field_a: field_a.len(),
                field_b: field_b.len(),
            });
        }
        Ok(SlidingSpec {
            region,
            field_a,
            field_b,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.field_a.len()
    }

    pub fn leaf_lie(&self, constraint: &Expr) -> Result<LeafLie, SlidingError> {
        Ok(LeafLie {
            constraint: constraint.clone(),
            along_a: lie_derivative(constraint, &self.field_a, self.state_dim())?,
            along_b: lie_derivative(constraint, &self.field_b, self.state_dim())?,
        })
    }

    /// Lie derivatives of every leaf, in leaf order.
    pub fn leaf_lie_derivatives(&self) -> Result<Vec<LeafLie>, SlidingError> {
        self.region
            .leaves()
            .into_iter()
            .map(|(c, _)| self.leaf_lie(c))
            .collect()
    }
}

/// `∂[[A]] ∩ ¬[[L_a]] ∩ [[L_b]]` for the single leaf `c <= 0`.
pub fn build_leaf_sliding(
    c: &Expr,
    params: &IntervalBox,
    spec: &SlidingSpec,
) -> Result<SetExpr, SlidingError> {
    let lie = spec.leaf_lie(c)?;
    Ok(SetExpr::atom(c.clone(), params.clone())
        .boundary()
        .intersect(SetExpr::atom(lie.along_a, params.clone()).complement())
        .intersect(SetExpr::atom(lie.along_b, params.clone())))
}

/// The thick sliding set of the whole region. `and`/`or` nodes with more
/// than two children fold left.
pub fn build_sliding(spec: &SlidingSpec) -> Result<SetExpr, SlidingError> {
    build_rec(&spec.region, spec).map(|(sliding, _)| sliding)
}

// Returns (sliding set, region as thick set).
fn build_rec(region: &RegionTree, spec: &SlidingSpec) -> Result<(SetExpr, SetExpr), SlidingError> {
    match region {
        RegionTree::Leaf { constraint, params } => Ok((
            build_leaf_sliding(constraint, params, spec)?,
            SetExpr::atom(constraint.clone(), params.clone()),
        )),
        RegionTree::And(children) => fold_nonempty(
            children,
            |c| build_rec(c, spec),
            |(s1, r1), (s2, r2)| {
                let sliding = s1.intersect(r2.clone()).union(s2.intersect(r1.clone()));
                (sliding, r1.intersect(r2))
            },
        ),
        RegionTree::Or(children) => fold_nonempty(
            children,
            |c| build_rec(c, spec),
            |(s1, r1), (s2, r2)| {
                let sliding = s1
                    .intersect(r2.clone().complement())
                    .union(s2.intersect(r1.clone().complement()));
                (sliding, r1.union(r2))
            },
        ),
    }
}
