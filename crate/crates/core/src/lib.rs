//! Guaranteed enclosures of sliding surfaces for uncertain switched systems.
//!
//! A switched system `x' = f_a(x)` inside a closed region `A`, `x' = f_b(x)`
//! outside of it, may chatter on the part of `∂A` where `f_a` pushes out and
//! `f_b` pushes back in. When the region and the fields depend on bounded
//! parameters `p ∈ [p]`, that sliding set becomes a *thick set*: an interval
//! `[[S⊂, S⊃]]` of subsets of the state space. This crate computes a paving of
//! the state space that brackets it.
//!
//! The layers, bottom-up:
//!
//! * [`interval`]: outward-rounded interval and box arithmetic.
//! * [`expr`]: expression trees, a small text parser, interval evaluation and
//!   symbolic differentiation (used for Lie derivatives).
//! * [`thickset`]: parametric atoms and the four-valued thick-set algebra.
//! * [`sliding`]: builds the thick set expression of the sliding surface from
//!   a region tree and two vector fields.
//! * [`paver`]: branch-and-classify paving of a domain box.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, rendering and
//! the command-line front end live in the `thickslide` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod expr;
pub mod interval;
pub mod paver;
mod round;
pub mod sliding;
pub mod thickset;

pub use expr::{Env, Expr, ParseError, VarDecl};
pub use interval::{Interval, IntervalBox};
pub use paver::{pave, Paving, PavingEntry};
pub use sliding::{build_sliding, RegionTree, SlidingSpec};
pub use thickset::{Atom, BoxClass, SetExpr};
