//! Closed real intervals and axis-aligned boxes with outward rounding.
//!
//! Every operation returns an interval that contains the exact real image of
//! its operands. Bounds are rounded outward only when the nearest-rounded
//! result is inexact, so operations on small integers and dyadic rationals
//! stay tight.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Index, Mul, Neg, Sub};

use crate::round;

/// A closed interval `[lo, hi]` of the extended reals, or the empty set.
///
/// `lo` may be `-inf` and `hi` may be `+inf`; an interval never has a NaN
/// bound and the empty set has a single canonical representation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntervalError {
    /// `lo > hi`, a NaN bound, or a bound at the wrong infinity.
    InvalidBounds,
    /// Bisection of a box whose components all have zero width, or whose
    /// widest component has no representable midpoint.
    Unsplittable,
}

impl fmt::Display for IntervalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntervalError::InvalidBounds => f.write_str("invalid interval bounds"),
            IntervalError::Unsplittable => f.write_str("box cannot be bisected"),
        }
    }
}

impl core::error::Error for IntervalError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sqr,
    Sqrt,
    Sin,
    Cos,
    PowInt(i32),
}

pub fn binary_op(op: BinaryOp, a: Interval, b: Interval) -> Interval {
    match op {
        BinaryOp::Add => a + b,
        BinaryOp::Sub => a - b,
        BinaryOp::Mul => a * b,
        BinaryOp::Div => a / b,
    }
}

pub fn unary_op(op: UnaryOp, a: Interval) -> Interval {
    match op {
        UnaryOp::Neg => -a,
        UnaryOp::Sqr => a.sqr(),
        UnaryOp::Sqrt => a.sqrt(),
        UnaryOp::Sin => a.sin(),
        UnaryOp::Cos => a.cos(),
        UnaryOp::PowInt(n) => a.powi(n),
    }
}

impl Interval {
    pub const EMPTY: Interval = Interval {
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
    };
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };

    /// Builds `[lo, hi]`.
    ///
    /// # Panics
    ///
    /// Panics if the bounds do not describe a nonempty interval; use
    /// [`Interval::try_new`] for untrusted input.
    #[track_caller]
    pub fn new(lo: f64, hi: f64) -> Interval {
        match Interval::try_new(lo, hi) {
            Ok(i) => i,
            Err(_) => panic!("invalid interval [{lo}, {hi}]"),
        }
    }

    pub fn try_new(lo: f64, hi: f64) -> Result<Interval, IntervalError> {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(IntervalError::InvalidBounds);
        }
        Ok(Interval { lo, hi })
    }

    /// The degenerate interval `[x, x]`.
    #[track_caller]
    pub fn point(x: f64) -> Interval {
        Interval::new(x, x)
    }

    // Normalizes raw bounds coming out of arithmetic.
    #[inline]
    fn raw(lo: f64, hi: f64) -> Interval {
        let lo = if lo.is_nan() { f64::NEG_INFINITY } else { lo };
        let hi = if hi.is_nan() { f64::INFINITY } else { hi };
        if lo > hi {
            Interval::EMPTY
        } else {
            Interval { lo, hi }
        }
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.lo > self.hi
    }

    /// `hi - lo` rounded up; zero for the empty interval.
    pub fn width(self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            round::add_up(self.hi, -self.lo)
        }
    }

    /// A point inside the interval, exact midpoint when representable.
    pub fn mid(self) -> f64 {
        let (lo, hi) = (self.lo, self.hi);
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => {
                let m = 0.5 * (lo + hi);
                if m.is_finite() {
                    m
                } else {
                    0.5 * lo + 0.5 * hi
                }
            }
            (false, false) => 0.0,
            (false, true) => f64::MIN.min(hi),
            (true, false) => f64::MAX.max(lo),
        }
    }

    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `self ⊆ other`. The empty interval is a subset of everything.
    pub fn is_subset(self, other: Interval) -> bool {
        self.is_empty() || (other.lo <= self.lo && self.hi <= other.hi)
    }

    pub fn hull(self, other: Interval) -> Interval {
        if self.is_empty() {
            return other;
        }
        if other.is_empty() {
            return self;
        }
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn intersection(self, other: Interval) -> Interval {
        Interval::raw(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    pub fn sqr(self) -> Interval {
        if self.is_empty() {
            return self;
        }
        let (lo, hi) = (self.lo, self.hi);
        if lo >= 0.0 {
            Interval::raw(round::mul_down(lo, lo), round::mul_up(hi, hi))
        } else if hi <= 0.0 {
            Interval::raw(round::mul_down(hi, hi), round::mul_up(lo, lo))
        } else {
            let m = (-lo).max(hi);
            Interval::raw(0.0, round::mul_up(m, m))
        }
    }

    /// Square root; negative parts of the argument are cut off.
    pub fn sqrt(self) -> Interval {
        if self.is_empty() || self.hi < 0.0 {
            return Interval::EMPTY;
        }
        let lo = self.lo.max(0.0);
        Interval::raw(round::sqrt_down(lo), round::sqrt_up(self.hi))
    }

    /// Integer power by repeated squaring on the bound magnitudes.
    pub fn powi(self, n: i32) -> Interval {
        if self.is_empty() {
            return self;
        }
        if n == 0 {
            return Interval::point(1.0);
        }
        if n < 0 {
            return Interval::point(1.0) / self.powi_nonneg(n.unsigned_abs());
        }
        self.powi_nonneg(n as u32)
    }

    fn powi_nonneg(self, n: u32) -> Interval {
        let (lo, hi) = (self.lo, self.hi);
        if n % 2 == 1 {
            // Odd powers are increasing.
            let lower = if lo < 0.0 {
                -pow_mag_up(-lo, n)
            } else {
                pow_mag_down(lo, n)
            };
            let upper = if hi < 0.0 {
                -pow_mag_down(-hi, n)
            } else {
                pow_mag_up(hi, n)
            };
            Interval::raw(lower, upper)
        } else {
            let (mig, mag) = if lo >= 0.0 {
                (lo, hi)
            } else if hi <= 0.0 {
                (-hi, -lo)
            } else {
                (0.0, (-lo).max(hi))
            };
            Interval::raw(pow_mag_down(mig, n), pow_mag_up(mag, n))
        }
    }

    pub fn sin(self) -> Interval {
        self.trig(TrigKind::Sin)
    }

    pub fn cos(self) -> Interval {
        self.trig(TrigKind::Cos)
    }

    fn trig(self, kind: TrigKind) -> Interval {
        if self.is_empty() {
            return self;
        }
        let (lo, hi) = (self.lo, self.hi);
        // Beyond this the period test below is not trustworthy.
        if !lo.is_finite() || !hi.is_finite() || lo.abs() > 1e6 || hi.abs() > 1e6 || hi - lo >= 6.2
        {
            return Interval::new(-1.0, 1.0);
        }
        let eval = |x: f64| match kind {
            TrigKind::Sin => libm::sin(x),
            TrigKind::Cos => libm::cos(x),
        };
        let (ya, yb) = (eval(lo), eval(hi));
        let mut lower = round::trig_down(ya.min(yb));
        let mut upper = round::trig_up(ya.max(yb));
        // Phases (as a fraction of the period) of the maximum and minimum.
        let (max_phase, min_phase) = match kind {
            TrigKind::Sin => (0.25, 0.75),
            TrigKind::Cos => (0.0, 0.5),
        };
        if hits_phase(lo, hi, max_phase) {
            upper = 1.0;
        }
        if hits_phase(lo, hi, min_phase) {
            lower = -1.0;
        }
        Interval::raw(lower, upper)
    }
}

#[derive(Clone, Copy)]
enum TrigKind {
    Sin,
    Cos,
}

/// Whether `[lo, hi]` may contain a point `2π (k + phase)` for an integer
/// `k`. Errs toward `true` near the edges.
fn hits_phase(lo: f64, hi: f64, phase: f64) -> bool {
    const TWO_PI: f64 = 2.0 * core::f64::consts::PI;
    const SLACK: f64 = 1e-9;
    let t_lo = lo / TWO_PI - phase - SLACK;
    let t_hi = hi / TWO_PI - phase + SLACK;
    libm::ceil(t_lo) <= libm::floor(t_hi)
}

fn pow_mag_down(x: f64, n: u32) -> f64 {
    pow_mag(x, n, round::mul_down)
}

fn pow_mag_up(x: f64, n: u32) -> f64 {
    pow_mag(x, n, round::mul_up)
}

// x >= 0, so every partial product is monotone in its rounded factors.
fn pow_mag(x: f64, mut n: u32, mul: fn(f64, f64) -> f64) -> f64 {
    let mut base = x;
    let mut acc = 1.0;
    while n > 0 {
        if n & 1 == 1 {
            acc = mul(acc, base);
        }
        n >>= 1;
        if n > 0 {
            base = mul(base, base);
        }
    }
    acc
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        if self.is_empty() {
            return self;
        }
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        if self.is_empty() || rhs.is_empty() {
            return Interval::EMPTY;
        }
        Interval::raw(
            round::add_down(self.lo, rhs.lo),
            round::add_up(self.hi, rhs.hi),
        )
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: Interval) -> Interval {
        self + (-rhs)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        if self.is_empty() || rhs.is_empty() {
            return Interval::EMPTY;
        }
        let (a, b) = ([self.lo, self.hi], [rhs.lo, rhs.hi]);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for x in a {
            for y in b {
                lo = lo.min(round::mul_down(x, y));
                hi = hi.max(round::mul_up(x, y));
            }
        }
        Interval::raw(lo, hi)
    }
}

impl Div for Interval {
    type Output = Interval;

    /// Extended division. A divisor containing zero yields the hull of the
    /// two branches of the quotient, which is often the whole line.
    fn div(self, rhs: Interval) -> Interval {
        if self.is_empty() || rhs.is_empty() {
            return Interval::EMPTY;
        }
        let (a, b) = (self, rhs);
        if b.lo == 0.0 && b.hi == 0.0 {
            return Interval::EMPTY;
        }
        if b.contains(0.0) {
            if a.contains(0.0) || (b.lo < 0.0 && b.hi > 0.0) {
                return Interval::ENTIRE;
            }
            // One endpoint of b is zero: the quotient is a half-line.
            return if (a.lo > 0.0) == (b.lo == 0.0) {
                let d = if b.lo == 0.0 { b.hi } else { b.lo };
                let n = if a.lo > 0.0 { a.lo } else { a.hi };
                Interval::raw(round::div_down(n, d), f64::INFINITY)
            } else {
                let d = if b.lo == 0.0 { b.hi } else { b.lo };
                let n = if a.lo > 0.0 { a.lo } else { a.hi };
                Interval::raw(f64::NEG_INFINITY, round::div_up(n, d))
            };
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for x in [a.lo, a.hi] {
            for y in [b.lo, b.hi] {
                if x.is_infinite() && y.is_infinite() {
                    return Interval::ENTIRE;
                }
                lo = lo.min(round::div_down(x, y));
                hi = hi.max(round::div_up(x, y));
            }
        }
        Interval::raw(lo, hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("[empty]")
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

/// An axis-aligned box, one interval per dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalBox(Vec<Interval>);

impl IntervalBox {
    pub fn new(components: Vec<Interval>) -> IntervalBox {
        IntervalBox(components)
    }

    pub fn from_bounds(bounds: &[(f64, f64)]) -> IntervalBox {
        IntervalBox(
            bounds
                .iter()
                .map(|&(lo, hi)| Interval::new(lo, hi))
                .collect(),
        )
    }

    pub fn point(x: &[f64]) -> IntervalBox {
        IntervalBox(x.iter().map(|&v| Interval::point(v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.0
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Interval> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().any(|c| c.is_empty())
    }

    /// Largest component width; zero for an empty box.
    pub fn width(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.0.iter().map(|c| c.width()).fold(0.0, f64::max)
    }

    /// Product of component widths, in plain floating point.
    pub fn volume(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.0.iter().map(|c| c.hi - c.lo).product()
    }

    pub fn center(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.mid()).collect()
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        x.len() == self.0.len() && self.0.iter().zip(x).all(|(c, &v)| c.contains(v))
    }

    pub fn is_subset(&self, other: &IntervalBox) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, &b)| a.is_subset(b))
    }

    /// Splits along the widest component at its midpoint. Ties go to the
    /// lowest index. The halves share the splitting hyperplane.
    pub fn bisect(&self) -> Result<(IntervalBox, IntervalBox), IntervalError> {
        if self.is_empty() {
            return Err(IntervalError::Unsplittable);
        }
        let mut axis = 0;
        let mut widest = 0.0;
        for (i, c) in self.0.iter().enumerate() {
            let w = c.width();
            if w > widest {
                widest = w;
                axis = i;
            }
        }
        if widest == 0.0 {
            return Err(IntervalError::Unsplittable);
        }
        let c = self.0[axis];
        let m = c.mid();
        if !(c.lo < m && m < c.hi) {
            return Err(IntervalError::Unsplittable);
        }
        let mut left = self.clone();
        let mut right = self.clone();
        left.0[axis] = Interval { lo: c.lo, hi: m };
        right.0[axis] = Interval { lo: m, hi: c.hi };
        Ok((left, right))
    }
}

impl Index<usize> for IntervalBox {
    type Output = Interval;
    fn index(&self, i: usize) -> &Interval {
        &self.0[i]
    }
}

impl From<Vec<Interval>> for IntervalBox {
    fn from(v: Vec<Interval>) -> Self {
        IntervalBox(v)
    }
}

impl fmt::Display for IntervalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" x ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}
