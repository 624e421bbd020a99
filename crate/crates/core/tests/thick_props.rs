use proptest::prelude::*;
use thickslide_core::expr::Expr;
use thickslide_core::interval::{Interval, IntervalBox};
use thickslide_core::thickset::{BoxClass, SetExpr};
use BoxClass::*;

// Tables indexed by [In, Pen, Out, Unknown].
const ORDER: [BoxClass; 4] = [In, Pen, Out, Unknown];

const INTERSECT: [[BoxClass; 4]; 4] = [
    [In, Pen, Out, Unknown],
    [Pen, Pen, Out, Unknown],
    [Out, Out, Out, Out],
    [Unknown, Unknown, Out, Unknown],
];

const UNION: [[BoxClass; 4]; 4] = [
    [In, In, In, In],
    [In, Pen, Pen, Unknown],
    [In, Pen, Out, Unknown],
    [In, Unknown, Unknown, Unknown],
];

const COMPLEMENT: [BoxClass; 4] = [Out, Pen, In, Unknown];
const BOUNDARY: [BoxClass; 4] = [Out, Pen, Out, Unknown];

#[test]
fn tables_match_lattice() {
    for (i, a) in ORDER.into_iter().enumerate() {
        assert_eq!(a.complement(), COMPLEMENT[i]);
        assert_eq!(a.boundary(), BOUNDARY[i]);
        for (j, b) in ORDER.into_iter().enumerate() {
            assert_eq!(a.intersect(b), INTERSECT[i][j], "{a} ∩ {b}");
            assert_eq!(a.union(b), UNION[i][j], "{a} ∪ {b}");
        }
    }
}

#[test]
fn commutative_and_associative() {
    for a in ORDER {
        for b in ORDER {
            assert_eq!(a.intersect(b), b.intersect(a));
            assert_eq!(a.union(b), b.union(a));
            for c in ORDER {
                assert_eq!(a.intersect(b).intersect(c), a.intersect(b.intersect(c)));
                assert_eq!(a.union(b).union(c), a.union(b.union(c)));
            }
        }
    }
}

#[test]
fn de_morgan() {
    for a in ORDER {
        for b in ORDER {
            assert_eq!(
                a.intersect(b).complement(),
                a.complement().union(b.complement())
            );
            assert_eq!(
                a.union(b).complement(),
                a.complement().intersect(b.complement())
            );
        }
    }
}

// Random set expressions over x1, x2 and two parameters. Every constraint is
// affine in the parameters, so the parameter corners decide both bounds.
fn atom() -> impl Strategy<Value = SetExpr> {
    let b = Box::new;
    let disk = (-1.5f64..1.5, -1.5f64..1.5, 0.2f64..1.5).prop_map(move |(cx, cy, r)| {
        // (x1 - cx + p1)^2 + (x2 - cy + p2)^2 - r^2 is not affine in p, so
        // the shift goes on the radius instead.
        let dx = Expr::Sub(b(Expr::State(0)), b(Expr::Const(cx)));
        let dy = Expr::Sub(b(Expr::State(1)), b(Expr::Const(cy)));
        Expr::Sub(
            b(Expr::Add(b(Expr::Sqr(b(dx))), b(Expr::Sqr(b(dy))))),
            b(Expr::Add(b(Expr::Const(r * r)), b(Expr::Param(0)))),
        )
    });
    let plane = (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(move |(a, c, d)| {
        Expr::Add(
            b(Expr::Add(
                b(Expr::Mul(b(Expr::Const(a)), b(Expr::State(0)))),
                b(Expr::Mul(b(Expr::Const(c)), b(Expr::State(1)))),
            )),
            b(Expr::Add(b(Expr::Const(d)), b(Expr::Param(1)))),
        )
    });
    let wave = (-1.0f64..1.0).prop_map(move |d| {
        Expr::Add(
            b(Expr::Sub(
                b(Expr::State(1)),
                b(Expr::Sin(b(Expr::State(0)))),
            )),
            b(Expr::Mul(b(Expr::Const(d)), b(Expr::Param(0)))),
        )
    });
    (prop_oneof![disk, plane, wave], 0.0f64..0.3)
        .prop_map(|(c, w)| SetExpr::atom(c, IntervalBox::from_bounds(&[(-w, w), (-w, w)])))
}

fn set_expr() -> impl Strategy<Value = SetExpr> {
    atom().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.intersect(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.union(b)),
            inner.clone().prop_map(SetExpr::complement),
            inner.clone().prop_map(SetExpr::boundary),
        ]
    })
}

fn cell() -> impl Strategy<Value = IntervalBox> {
    (-2.0f64..2.0, -2.0f64..2.0, 0.0f64..0.5, 0.0f64..0.5)
        .prop_map(|(x, y, w, h)| IntervalBox::from_bounds(&[(x, x + w), (y, y + h)]))
}

// Membership of x in the sampled lower and upper bounds. Sampled parameter
// sets include the corners, so for parameter-affine atoms both bounds are
// exact away from constraint zeros.
fn bounds(s: &SetExpr, x: &[f64], samples: &[[f64; 2]]) -> (bool, bool) {
    match s {
        SetExpr::Atom(a) => {
            let scale = |p: &[f64; 2]| {
                let r = a.params();
                [
                    r[0].lo() + (p[0] + 1.0) / 2.0 * (r[0].hi() - r[0].lo()),
                    r[1].lo() + (p[1] + 1.0) / 2.0 * (r[1].hi() - r[1].lo()),
                ]
            };
            let vals: Vec<f64> = samples
                .iter()
                .map(|p| a.constraint().eval_point(x, &scale(p)))
                .collect();
            (
                vals.iter().all(|v| *v <= 0.0),
                vals.iter().any(|v| *v <= 0.0),
            )
        }
        SetExpr::Intersect(a, b) => {
            let (la, ua) = bounds(a, x, samples);
            let (lb, ub) = bounds(b, x, samples);
            (la && lb, ua && ub)
        }
        SetExpr::Union(a, b) => {
            let (la, ua) = bounds(a, x, samples);
            let (lb, ub) = bounds(b, x, samples);
            (la || lb, ua || ub)
        }
        SetExpr::Complement(a) => {
            let (l, u) = bounds(a, x, samples);
            (!u, !l)
        }
        SetExpr::Boundary(a) => {
            let (l, u) = bounds(a, x, samples);
            (l && !u, u && !l)
        }
    }
}

fn param_samples(rng_seed: u64) -> Vec<[f64; 2]> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(rng_seed);
    let mut out = vec![[-1.0, -1.0], [-1.0, 1.0], [1.0, -1.0], [1.0, 1.0]];
    out.extend((0..20).map(|_| [rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)]));
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn verdicts_are_sound(s in set_expr(), b in cell(), seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let verdict = s.classify(&b);
        if verdict == Unknown {
            return Ok(());
        }
        let samples = param_samples(seed);
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..300 {
            let x = [
                rng.gen_range(b[0].lo()..=b[0].hi()),
                rng.gen_range(b[1].lo()..=b[1].hi()),
            ];
            let (lower, upper) = bounds(&s, &x, &samples);
            match verdict {
                In => prop_assert!(lower, "IN box {b} has {x:?} outside the lower bound"),
                Out => prop_assert!(!upper, "OUT box {b} has {x:?} in the upper bound"),
                Pen => prop_assert!(upper && !lower, "PEN box {b}: {x:?} gives ({lower}, {upper})"),
                Unknown => unreachable!(),
            }
        }
    }

    #[test]
    fn refinement_never_contradicts(s in set_expr(), b in cell(), t in prop::array::uniform4(0.0f64..=1.0)) {
        let coarse = s.classify(&b);
        let lo = |i: usize, u: f64| b[i].lo() + u * (b[i].hi() - b[i].lo());
        let (x0, x1) = (lo(0, t[0].min(t[1])), lo(0, t[0].max(t[1])));
        let (y0, y1) = (lo(1, t[2].min(t[3])), lo(1, t[2].max(t[3])));
        let sub = IntervalBox::new(vec![Interval::new(x0, x1), Interval::new(y0, y1)]);
        let fine = s.classify(&sub);
        if coarse != Unknown && fine != Unknown {
            prop_assert_eq!(coarse, fine, "{} refined to {}", b, sub);
        }
    }
}
