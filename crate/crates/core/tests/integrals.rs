//! Negative-dimensional and formal Gaussian integrals against hand enumerations and each other.

mod common;

use common::*;
use jacobi::diagram::{canonicalize, strut};
use jacobi::integrals::{
    check_gaussian_identity, check_prop_main, closed_pairing_instances, fg_integrate, nd_integrate, o_reduce,
    reduce_mod_span,
};
use jacobi::linalg::{det_bareiss, rat, ratio, QuadraticForm};
use jacobi::random::random_diagram;
use jacobi::series::{exp_truncate, gaussian_part, PerturbedGaussian};
use jacobi::{Color, Diagram, DiagramSum, Error, Flavor, Truncation};
use num_traits::Zero;
use proptest::prelude::*;

fn worked_form() -> QuadraticForm {
    QuadraticForm::from_integers(&["x", "y"], &[&[0, 1], &[1, 1]]).unwrap()
}

#[test]
fn gaussian_identity_on_singular_patterns() {
    for m in 1..=2 {
        assert!(check_gaussian_identity(&QuadraticForm::zero(&["x"]), m).unwrap().equal);
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                for c in -3i64..=3 {
                    if a * c != b * b {
                        continue;
                    }
                    let f = QuadraticForm::from_integers(&["x", "y"], &[&[a, b], &[b, c]]).unwrap();
                    let r = check_gaussian_identity(&f, m).unwrap();
                    assert!(r.equal, "{a} {b} {c}, m = {m}");
                    assert!(r.lhs.is_empty());
                }
            }
        }
    }
}

#[test]
fn single_strut_integrals() {
    for l in [-3i64, 1, 2, 5] {
        let f = QuadraticForm::from_integers(&["x"], &[&[l]]).unwrap();
        let g = gaussian_part(&f, 1, Flavor::Plain, Some(Truncation::legs(2))).unwrap();
        assert_eq!(nd_integrate(&g, &[x()], 1, true).unwrap().without_truncation(), DiagramSum::one().scaled(&rat(-l)));
    }
    let f = QuadraticForm::from_integers(&["x", "y"], &[&[0, 1], &[1, 0]]).unwrap();
    let g = gaussian_part(&f, 1, Flavor::Plain, Some(Truncation::legs(2))).unwrap();
    let unreduced = nd_integrate(&g, &[x(), y()], 1, false).unwrap();
    assert_eq!(unreduced.without_truncation(), sum_of(&[(Diagram::circles_only(1), ratio(1, 2))]));
    assert_eq!(o_reduce(&unreduced, 1).constant_term(), rat(-1));
}

#[test]
fn circles_become_minus_two_m() {
    let s = sum_of(&[(Diagram::circles_only(1), rat(1))]);
    assert_eq!(o_reduce(&s, 2), DiagramSum::one().scaled(&rat(-4)));
}

#[test]
fn formal_integral_of_doubled_edge() {
    let f = QuadraticForm::from_integers(&["x"], &[&[1]]).unwrap();
    let c = ratio(3, 2);
    let g = PerturbedGaussian::new(f, sum_of(&[(Diagram::empty(), rat(1)), (doubled_edge(), c.clone())])).unwrap();
    let expected = sum_of(&[(Diagram::empty(), rat(1)), (closed_doubled_edge(), -c)]);
    assert_eq!(fg_integrate(&g, 1).unwrap().without_truncation(), expected);
}

#[test]
fn formal_integral_needs_invertible_form() {
    for entries in [&[&[0i64][..]][..], &[&[1, 2], &[2, 4]]] {
        let names = ["x", "y"];
        let f = QuadraticForm::from_integers(&names[..entries.len()], entries).unwrap();
        assert_eq!(fg_integrate(&PerturbedGaussian::pure(f), 2).unwrap_err(), Error::Singular);
    }
}

/// The three ways of closing a wheel with spokes `x, x, x, y`: the `y`-spoke meets one of the three
/// `x`-spokes and the other two meet each other.
fn closures_of_xxxy() -> [Diagram; 3] {
    let w = wheel(&[x(), x(), x(), y()]);
    [
        w.join_legs(&[(3, 0), (1, 2)]).unwrap(),
        w.join_legs(&[(3, 2), (0, 1)]).unwrap(),
        w.join_legs(&[(3, 1), (0, 2)]).unwrap(),
    ]
}

#[test]
fn worked_example_with_three_x_legs() {
    // The perturbation read off the worked example: a square wheel with three x-spokes and one y-spoke.
    let [a1, a2, b] = closures_of_xxxy();
    let (ka1, ka2, kb) =
        (canonicalize(&a1).unwrap().form().unwrap(), canonicalize(&a2).unwrap().form().unwrap(), canonicalize(&b).unwrap().form().unwrap());
    assert_eq!((ka1.key.clone(), ka1.sign), (ka2.key.clone(), ka2.sign));
    assert_ne!(ka1.key, kb.key);
    let expected = sum_of(&[(Diagram::empty(), rat(1)), (a1.clone(), rat(-2)), (b.clone(), rat(-1))]);

    let p = sum_of(&[(wheel(&[x(), x(), x(), y()]), rat(1))]);
    let g = PerturbedGaussian::new(worked_form(), exp_truncate(&p, Truncation::degree(4)).unwrap()).unwrap();
    assert_eq!(fg_integrate(&g, 2).unwrap().without_truncation(), expected);

    let r = check_prop_main(&g, 2).unwrap();
    assert!(r.equal, "{:?}", r.residual);
    assert_eq!(r.lhs, expected);

    // Before the circles are replaced: (1/24)(strut xy)^4 gives 3 two-circle and 6 one-circle
    // closures, and (1/2) p · strut(x,y) · strut(y,y) gives three groups of three closures.
    let xy4 = exp_truncate(&sum_of(&[(strut(x(), y()), rat(1))]), Truncation::legs(4)).unwrap();
    let quartic = xy4.filtered(|d| d.grade().legs_of(&x()) == 4);
    assert_eq!(quartic.len(), 1);
    let closed = nd_integrate(&quartic, &[x(), y()], 2, false).unwrap().without_truncation();
    let circles_expected =
        sum_of(&[(Diagram::circles_only(2), ratio(3, 24)), (Diagram::circles_only(1), ratio(6, 24))]);
    assert_eq!(closed, circles_expected);
    assert_eq!(o_reduce(&closed, 2).constant_term(), rat(1));

    let mixed = p.mul(&sum_of(&[(strut(x(), y()).disjoint_union(&strut(y(), y())), ratio(1, 2))])).unwrap();
    let closed = nd_integrate(&mixed, &[x(), y()], 2, false).unwrap().without_truncation();
    let with_circle = |d: &Diagram| d.with_circles(1);
    let pre = sum_of(&[(with_circle(&a1), rat(1)), (a1.clone(), rat(2)), (with_circle(&b), ratio(1, 2)), (b.clone(), rat(1))]);
    assert_eq!(closed, pre);
    assert_eq!(o_reduce(&closed, 2), sum_of(&[(a1, rat(-2)), (b, rat(-1))]));
}

/// Strutless connected perturbations over `x, y` with an even number of legs of each color.
fn curated_perturbations() -> Vec<Diagram> {
    vec![
        doubled_edge(),
        wheel(&[x(), y()]),
        wheel(&[y(), y()]),
        wheel(&[x(), x(), y(), y()]),
        wheel(&[x(), y(), x(), y()]),
        wheel(&[x(), x(), x(), x()]),
        wheel(&[x(), x(), x(), y()]),
        h_tree(),
    ]
}

/// Two trivalent vertices joined by an edge, each carrying an `x`-leg and a `y`-leg.
fn h_tree() -> Diagram {
    let mut b = Diagram::builder();
    let u = b.vertex();
    let v = b.vertex();
    b.edge(u[0], v[0]);
    for (h, c) in [(u[1], x()), (u[2], y()), (v[1], x()), (v[2], y())] {
        let l = b.leg(c);
        b.edge(h, l);
    }
    b.build().unwrap()
}

#[test]
fn prop_main_on_curated_corpus() {
    let forms = [
        QuadraticForm::from_integers(&["x"], &[&[1]]).unwrap(),
        QuadraticForm::from_integers(&["x"], &[&[-2]]).unwrap(),
        worked_form(),
        QuadraticForm::identity(&["x", "y"]),
        QuadraticForm::from_integers(&["x", "y"], &[&[2, 1], &[1, -1]]).unwrap(),
    ];
    let mut literal = 0;
    for f in &forms {
        for d in curated_perturbations() {
            if d.legs().iter().any(|l| f.index_of(&l.color.base).is_none()) {
                continue;
            }
            for m in 1..=2u32 {
                let p = sum_of(&[(d.clone(), ratio(-3, 2))]);
                let g = PerturbedGaussian::new(f.clone(), exp_truncate(&p, Truncation::degree(2 * m + 2)).unwrap()).unwrap();
                let r = check_prop_main(&g, m).unwrap();
                if r.equal {
                    literal += 1;
                    continue;
                }
                let trivalent = r.residual.terms().map(|t| t.diagram.grade().trivalent as usize).max().unwrap_or(0);
                let gens: Vec<DiagramSum> =
                    closed_pairing_instances(m + 1, trivalent).unwrap().into_iter().map(|g| g.expansion).collect();
                assert!(reduce_mod_span(&r.residual, &gens).unwrap().member, "{f:?} {d} m = {m}");
            }
        }
    }
    assert!(literal > 0);
}

fn nd_palette() -> Vec<Color> {
    vec![x(), y(), z()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn wrong_census_vanishes(seed in any::<u64>(), m in 1u32..=2) {
        let d = random_diagram(&mut jacobi::random::rng(seed), &nd_palette(), 2 * m as usize + 2, 10);
        let colors = [x(), y()];
        prop_assume!(colors.iter().any(|c| d.grade().legs_of(c) != 2 * m));
        let s = sum_of(&[(d, rat(1))]);
        prop_assert!(nd_integrate(&s, &colors, m, false).unwrap().is_empty());
    }

    #[test]
    fn o_reduce_is_multiplicative(seed in any::<u64>(), m in 1u32..=3) {
        let s = random_sum(seed, &nd_palette(), 3, 8, 4);
        let with_circle = sum_of(&s.terms().map(|t| (t.diagram.with_circles(t.diagram.circles() + 1), t.coeff.clone())).collect::<Vec<_>>());
        prop_assert_eq!(o_reduce(&with_circle, m), o_reduce(&s, m).scaled(&rat(-2 * i64::from(m))));
    }

    #[test]
    fn gaussian_identity_random(seed in any::<u64>(), n in 1usize..=2, m in 1u32..=2) {
        let f = jacobi::random::random_symmetric(&mut jacobi::random::rng(seed), n, -3, 3);
        let r = check_gaussian_identity(&f, m).unwrap();
        prop_assert!(r.equal);
        if det_bareiss(&f).is_zero() {
            prop_assert!(r.lhs.is_empty());
        }
    }
}

#[test]
fn prop_main_on_random_connected_perturbations() {
    use rand::Rng;
    let mut r = jacobi::random::rng(0x9a1);
    let forms = [worked_form(), QuadraticForm::from_integers(&["x", "y"], &[&[2, 1], &[1, -1]]).unwrap()];
    let mut tried = 0;
    while tried < 400 {
        let t = r.gen_range(1..=4usize);
        let (a, b) = (r.gen_range(0..=5usize), r.gen_range(0..=5usize));
        let Some(d) = jacobi::random::random_wiring(&mut r, &[(x(), a), (y(), b)], t) else { continue };
        if d.components().len() != 1 || !d.is_strutless() || d.legs().is_empty() {
            continue;
        }
        for m in 1..=2u32 {
            if d.grade().trivalent > 2 * m {
                continue;
            }
            for f in &forms {
                let p = sum_of(&[(Diagram::empty(), rat(1)), (d.clone(), rat(1))]);
                let g = PerturbedGaussian::new(f.clone(), p).unwrap();
                let rep = check_prop_main(&g, m).unwrap();
                assert!(rep.equal, "{d} m = {m}: {:?}", rep.residual);
                tried += 1;
            }
        }
    }
}
