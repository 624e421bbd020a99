//! Branch-and-classify paving.
//!
//! Boxes are classified against a [`SetExpr`]; definite verdicts are kept,
//! UNKNOWN boxes wider than `epsilon` are bisected, and narrower UNKNOWN
//! boxes are kept as they are. The worklist is processed one generation at
//! a time so that a caller can classify each generation in parallel; the
//! output is sorted canonically and does not depend on how a generation was
//! split up.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::time::Duration;

use crate::interval::IntervalBox;
use crate::thickset::{BoxClass, SetExpr};

pub const DEFAULT_BOX_BUDGET: usize = 10_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClassCounts {
    pub inside: usize,
    pub penumbra: usize,
    pub outside: usize,
    pub unknown: usize,
}

impl ClassCounts {
    pub fn add(&mut self, class: BoxClass) {
        *self.get_mut(class) += 1;
    }

    pub fn get(&self, class: BoxClass) -> usize {
        match class {
            BoxClass::In => self.inside,
            BoxClass::Pen => self.penumbra,
            BoxClass::Out => self.outside,
            BoxClass::Unknown => self.unknown,
        }
    }

    fn get_mut(&mut self, class: BoxClass) -> &mut usize {
        match class {
            BoxClass::In => &mut self.inside,
            BoxClass::Pen => &mut self.penumbra,
            BoxClass::Out => &mut self.outside,
            BoxClass::Unknown => &mut self.unknown,
        }
    }

    pub fn total(&self) -> usize {
        self.inside + self.penumbra + self.outside + self.unknown
    }

    pub fn from_entries(entries: &[PavingEntry]) -> ClassCounts {
        let mut counts = ClassCounts::default();
        for e in entries {
            counts.add(e.class);
        }
        counts
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PavingMeta {
    pub counts: ClassCounts,
    pub bisections: usize,
    /// Number of boxes that went through classification.
    pub classified: usize,
    /// Wall-clock time, when the driver measured it.
    pub elapsed: Option<Duration>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PavingEntry {
    pub cell: IntervalBox,
    pub class: BoxClass,
}

/// A partition of `domain` into classified boxes with disjoint interiors.
#[derive(Clone, Debug, PartialEq)]
pub struct Paving {
    pub domain: IntervalBox,
    pub epsilon: f64,
    pub entries: Vec<PavingEntry>,
    pub meta: PavingMeta,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PaveError {
    InvalidEpsilon(f64),
    /// The domain is empty or unbounded.
    InvalidDomain,
    BudgetExceeded {
        budget: usize,
        classified: usize,
        pending: usize,
        counts: ClassCounts,
    },
    OutsideDomain,
}

impl fmt::Display for PaveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PaveError::InvalidEpsilon(e) => {
                write!(f, "epsilon must be positive and finite, got {e}")
            }
            PaveError::InvalidDomain => f.write_str("domain must be a nonempty bounded box"),
            PaveError::BudgetExceeded {
                budget,
                classified,
                pending,
                counts,
            } => write!(
                f,
                "box budget of {budget} exceeded: {classified} classified, {pending} pending \
                 (IN {}, PEN {}, OUT {}, UNKNOWN {})",
                counts.inside, counts.penumbra, counts.outside, counts.unknown
            ),
            PaveError::OutsideDomain => f.write_str("point outside the paving domain"),
        }
    }
}

impl core::error::Error for PaveError {}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PaveConfig {
    pub epsilon: f64,
    pub budget: usize,
}

impl PaveConfig {
    pub fn new(epsilon: f64) -> PaveConfig {
        PaveConfig {
            epsilon,
            budget: DEFAULT_BOX_BUDGET,
        }
    }
}

/// Paves `domain` against `set`, classifying on the current thread.
pub fn pave(set: &SetExpr, domain: &IntervalBox, epsilon: f64) -> Result<Paving, PaveError> {
    pave_with(set, domain, PaveConfig::new(epsilon), |s, boxes| {
        boxes.iter().map(|b| s.classify(b)).collect()
    })
}

/// Paves with a caller-supplied batch classifier. `classify_batch` must
/// return one verdict per box, in order.
pub fn pave_with<F>(
    set: &SetExpr,
    domain: &IntervalBox,
    config: PaveConfig,
    mut classify_batch: F,
) -> Result<Paving, PaveError>
where
    F: FnMut(&SetExpr, &[IntervalBox]) -> Vec<BoxClass>,
{
    let epsilon = config.epsilon;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(PaveError::InvalidEpsilon(epsilon));
    }
    if domain.dim() == 0 || domain.is_empty() || !domain.width().is_finite() {
        return Err(PaveError::InvalidDomain);
    }

    let mut entries = Vec::new();
    let mut meta = PavingMeta::default();
    let mut frontier = alloc::vec![domain.clone()];
    while !frontier.is_empty() {
        if meta.classified + frontier.len() > config.budget {
            return Err(PaveError::BudgetExceeded {
                budget: config.budget,
                classified: meta.classified,
                pending: frontier.len(),
                counts: meta.counts,
            });
        }
        let classes = classify_batch(set, &frontier);
        assert_eq!(
            classes.len(),
            frontier.len(),
            "batch classifier dropped boxes"
        );
        meta.classified += frontier.len();
        let mut next = Vec::new();
        for (cell, class) in frontier.into_iter().zip(classes) {
            if class == BoxClass::Unknown && cell.width() > epsilon {
                if let Ok((left, right)) = cell.bisect() {
                    meta.bisections += 1;
                    next.push(left);
                    next.push(right);
                    continue;
                }
            }
            meta.counts.add(class);
            entries.push(PavingEntry { cell, class });
        }
        frontier = next;
    }
    entries.sort_by(|a, b| canonical_cmp(&a.cell, &b.cell));
    Ok(Paving {
        domain: domain.clone(),
        epsilon,
        entries,
        meta,
    })
}

/// Lexicographic order on lower corners, then upper corners.
pub fn canonical_cmp(a: &IntervalBox, b: &IntervalBox) -> Ordering {
    let lows = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| x.lo().total_cmp(&y.lo()));
    let highs = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| x.hi().total_cmp(&y.hi()));
    lows.chain(highs)
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.dim().cmp(&b.dim()))
}

impl Paving {
    /// Class of the first entry (in canonical order) whose box contains `x`.
    pub fn query(&self, x: &[f64]) -> Result<BoxClass, PaveError> {
        if !self.domain.contains_point(x) {
            return Err(PaveError::OutsideDomain);
        }
        self.entries
            .iter()
            .find(|e| e.cell.contains_point(x))
            .map(|e| e.class)
            .ok_or(PaveError::OutsideDomain)
    }

    /// Whether no box was proven to be inside the lower bound.
    pub fn inner_is_empty(&self) -> bool {
        self.entries.iter().all(|e| e.class != BoxClass::In)
    }

    /// Boxes of the outer approximation: everything not proven OUT.
    pub fn outer(&self) -> impl Iterator<Item = &PavingEntry> {
        self.entries.iter().filter(|e| e.class != BoxClass::Out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expr, VarDecl};
    use crate::interval::Interval;

    fn disk() -> SetExpr {
        let decl = VarDecl::new(["x1", "x2"], ["p1"]);
        SetExpr::atom(
            parse_expr("x1^2+x2^2-1", &decl).unwrap(),
            IntervalBox::new(alloc::vec![Interval::ZERO]),
        )
    }

    fn square(lo: f64, hi: f64) -> IntervalBox {
        IntervalBox::from_bounds(&[(lo, hi), (lo, hi)])
    }

    #[test]
    fn thin_disk_paving() {
        let p = pave(&disk(), &square(-2.0, 2.0), 0.5).unwrap();
        // Class of the entry that covers `b`.
        let find = |b: IntervalBox| {
            p.entries
                .iter()
                .find(|e| b.is_subset(&e.cell))
                .map(|e| e.class)
        };
        assert_eq!(
            find(IntervalBox::from_bounds(&[(-0.5, 0.0), (-0.5, 0.0)])),
            Some(BoxClass::In)
        );
        assert_eq!(
            find(IntervalBox::from_bounds(&[(1.5, 2.0), (1.5, 2.0)])),
            Some(BoxClass::Out)
        );
        assert_eq!(p.meta.counts, ClassCounts::from_entries(&p.entries));
        assert_eq!(p.meta.classified, 2 * p.meta.bisections + 1);
        assert!(p
            .entries
            .iter()
            .all(|e| e.class != BoxClass::Unknown || e.cell.width() <= 0.5));
    }

    #[test]
    fn entries_cover_domain() {
        let p = pave(&disk(), &square(-2.0, 2.0), 0.1).unwrap();
        let total: f64 = p.entries.iter().map(|e| e.cell.volume()).sum();
        assert!((total - 16.0).abs() <= 16.0 * 1e-9);
        assert!(p
            .entries
            .windows(2)
            .all(|w| canonical_cmp(&w[0].cell, &w[1].cell).is_lt()));
    }

    #[test]
    fn argument_errors() {
        assert_eq!(
            pave(&disk(), &square(-2.0, 2.0), 0.0),
            Err(PaveError::InvalidEpsilon(0.0))
        );
        assert!(matches!(
            pave(&disk(), &square(-2.0, 2.0), f64::NAN),
            Err(PaveError::InvalidEpsilon(_))
        ));
        let unbounded = IntervalBox::new(alloc::vec![Interval::ENTIRE, Interval::ZERO]);
        assert_eq!(
            pave(&disk(), &unbounded, 0.1),
            Err(PaveError::InvalidDomain)
        );
    }

    #[test]
    fn budget_is_enforced() {
        let err = pave_with(
            &disk(),
            &square(-2.0, 2.0),
            PaveConfig {
                epsilon: 1e-3,
                budget: 100,
            },
            |s, boxes| boxes.iter().map(|b| s.classify(b)).collect(),
        )
        .unwrap_err();
        match err {
            PaveError::BudgetExceeded {
                classified,
                pending,
                ..
            } => {
                assert!(classified <= 100 && classified + pending > 100);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn query_lookup() {
        let p = pave(&disk(), &square(-2.0, 2.0), 0.25).unwrap();
        assert_eq!(p.query(&[0.0, 0.0]), Ok(BoxClass::In));
        assert_eq!(p.query(&[1.9, -1.9]), Ok(BoxClass::Out));
        assert_eq!(p.query(&[5.0, 5.0]), Err(PaveError::OutsideDomain));
        assert_eq!(p.query(&[0.0]), Err(PaveError::OutsideDomain));
        assert!(!p.inner_is_empty());
    }

    #[test]
    fn degenerate_domain_is_classified_once() {
        let d = IntervalBox::from_bounds(&[(1.0, 1.0), (0.0, 0.0)]);
        let p = pave(&disk(), &d, 0.1).unwrap();
        assert_eq!(p.entries.len(), 1);
        assert_eq!(p.meta.bisections, 0);
    }
}
