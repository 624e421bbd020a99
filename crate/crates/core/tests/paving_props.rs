use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thickslide_core::expr::{parse_expr, Expr, VarDecl};
use thickslide_core::interval::{Interval, IntervalBox};
use thickslide_core::paver::{pave, pave_with, PaveConfig, Paving};
use thickslide_core::sliding::{build_sliding, RegionTree, SlidingSpec};
use thickslide_core::thickset::{BoxClass, SetExpr};

fn decl() -> VarDecl {
    VarDecl::new(["x1", "x2"], ["p1", "p2", "p3"])
}

fn e(s: &str) -> Expr {
    parse_expr(s, &decl()).unwrap()
}

fn swing_params() -> IntervalBox {
    IntervalBox::from_bounds(&[(-0.1, 0.1); 3])
}

fn swing_sliding() -> SetExpr {
    let region = RegionTree::leaf(e("(x1+p2)^2+(x2+p3)^2-1"), swing_params());
    let spec = SlidingSpec::new(
        region,
        vec![e("x2"), e("p1 - sin(x1)")],
        vec![e("x2"), e("p1 - sin(x1) - x2")],
    )
    .unwrap();
    build_sliding(&spec).unwrap()
}

fn thin_disk() -> SetExpr {
    SetExpr::atom(e("x1^2+x2^2-1"), IntervalBox::from_bounds(&[(0.0, 0.0); 3]))
}

fn domain() -> IntervalBox {
    IntervalBox::from_bounds(&[(-2.0, 2.0), (-2.0, 2.0)])
}

fn interiors_overlap(a: &IntervalBox, b: &IntervalBox) -> bool {
    a.iter()
        .zip(b.iter())
        .all(|(x, y)| x.lo() < y.hi() && y.lo() < x.hi())
}

fn random_point_in(rng: &mut StdRng, b: &IntervalBox) -> Vec<f64> {
    b.iter().map(|c| rng.gen_range(c.lo()..=c.hi())).collect()
}

fn check_partition(p: &Paving, rng: &mut StdRng) {
    let total: f64 = p.entries.iter().map(|e| e.cell.volume()).sum();
    let want = p.domain.volume();
    assert!(
        (total - want).abs() <= 1e-9 * want,
        "covered {total} of {want}"
    );
    let n = p.entries.len();
    for _ in 0..10_000 {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i != j {
            assert!(!interiors_overlap(&p.entries[i].cell, &p.entries[j].cell));
        }
    }
    for e in &p.entries {
        assert!(e.class != BoxClass::Unknown || e.cell.width() <= p.epsilon);
    }
}

#[test]
fn disk_paving_partitions_domain_and_is_sound() {
    let mut rng = StdRng::seed_from_u64(7);
    let p = pave(&thin_disk(), &domain(), 0.02).unwrap();
    check_partition(&p, &mut rng);
    let f = |x: &[f64]| x[0] * x[0] + x[1] * x[1] - 1.0;
    for class in [BoxClass::In, BoxClass::Out] {
        let cells: Vec<_> = p.entries.iter().filter(|e| e.class == class).collect();
        assert!(!cells.is_empty());
        for _ in 0..10_000 {
            let cell = &cells[rng.gen_range(0..cells.len())].cell;
            let x = random_point_in(&mut rng, cell);
            match class {
                BoxClass::In => assert!(f(&x) <= 0.0, "{x:?} in IN box {cell}"),
                _ => assert!(f(&x) > 0.0, "{x:?} in OUT box {cell}"),
            }
        }
    }
}

#[test]
fn halving_epsilon_never_contradicts() {
    let mut rng = StdRng::seed_from_u64(11);
    for set in [thin_disk(), swing_sliding()] {
        let coarse = pave(&set, &domain(), 0.1).unwrap();
        let fine = pave(&set, &domain(), 0.05).unwrap();
        for _ in 0..10_000 {
            let x = random_point_in(&mut rng, &domain());
            let (a, b) = (coarse.query(&x).unwrap(), fine.query(&x).unwrap());
            if a != BoxClass::Unknown && b != BoxClass::Unknown {
                assert_eq!(a, b, "at {x:?}");
            }
        }
    }
}

#[test]
fn swing_paving_has_empty_inner_bound() {
    let mut rng = StdRng::seed_from_u64(3);
    let p = pave(&swing_sliding(), &domain(), 0.05).unwrap();
    check_partition(&p, &mut rng);
    assert!(p.inner_is_empty());
    assert!(p.outer().count() > 0);
    for entry in p.outer() {
        let c = entry.cell.center();
        let r = c[0].hypot(c[1]);
        assert!(
            (0.8..=1.2 + 0.05 * 2f64.sqrt()).contains(&r),
            "{} at radius {r}",
            entry.cell
        );
    }
    assert_eq!(p.query(&[0.0, 0.0]), Ok(BoxClass::Out));
}

#[test]
fn nominal_sliding_points_are_never_out() {
    let p = pave(&swing_sliding(), &domain(), 0.05).unwrap();
    let mut rng = StdRng::seed_from_u64(5);
    let mut hits = 0;
    for _ in 0..10_000 {
        let t: f64 = rng.gen_range(0.0..core::f64::consts::TAU);
        let (x1, x2) = (t.cos(), t.sin());
        let la = 2.0 * x2 * (x1 - x1.sin());
        let lb = 2.0 * x2 * (x1 - x1.sin() - x2);
        if la >= 0.0 && lb <= 0.0 {
            hits += 1;
            assert_ne!(p.query(&[x1, x2]), Ok(BoxClass::Out), "sliding point {t}");
        }
    }
    assert!(hits > 1000);
}

#[test]
fn batch_split_does_not_change_result() {
    let set = swing_sliding();
    let serial = pave(&set, &domain(), 0.05).unwrap();
    // Classify each generation in reverse order and in small chunks.
    let shuffled = pave_with(&set, &domain(), PaveConfig::new(0.05), |s, boxes| {
        let mut out: Vec<BoxClass> = boxes.iter().rev().map(|b| s.classify(b)).collect();
        out.reverse();
        out
    })
    .unwrap();
    assert_eq!(serial.entries, shuffled.entries);
    assert_eq!(serial.meta, shuffled.meta);
}

#[test]
fn thin_point_domain_paves_to_a_single_entry() {
    let d = IntervalBox::new(vec![Interval::point(0.5), Interval::point(0.5)]);
    let p = pave(&thin_disk(), &d, 0.01).unwrap();
    assert_eq!(p.entries.len(), 1);
    assert_eq!(p.entries[0].class, BoxClass::In);
}
