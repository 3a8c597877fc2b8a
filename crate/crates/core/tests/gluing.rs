//! Pairing and translation: bilinearity, assignment counts, color locality, composition.

mod common;

use common::*;
use jacobi::gluing::{assignments, pair, translate, TranslationRule};
use jacobi::linalg::{rat, ratio};
use jacobi::random::{random_wiring, rng};
use jacobi::{Color, DiagramSum};
use proptest::prelude::*;

fn dx() -> Color {
    Color::dual("x")
}

fn left_colors() -> Vec<Color> {
    vec![dx(), y()]
}

fn right_colors() -> Vec<Color> {
    vec![x(), z()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn pair_is_bilinear(s1 in any::<u64>(), s2 in any::<u64>(), t in any::<u64>(), a in -3i64..=3, b in -3i64..=3) {
        let (a, b) = (rat(a), ratio(b, 2));
        let s = random_sum(s1, &left_colors(), 3, 6, 3);
        let s_prime = random_sum(s2, &left_colors(), 3, 6, 3);
        let t = random_sum(t, &right_colors(), 3, 6, 3);
        let colors = [x()];
        let lhs = pair(&DiagramSum::combine(&a, &s, &b, &s_prime), &t, &colors).unwrap();
        let rhs = DiagramSum::combine(&a, &pair(&s, &t, &colors).unwrap(), &b, &pair(&s_prime, &t, &colors).unwrap());
        prop_assert_eq!(lhs, rhs);
        let lhs = pair(&t.scaled(&a), &s, &[Color::plain("z")]).unwrap();
        prop_assert_eq!(lhs, pair(&t, &s, &[Color::plain("z")]).unwrap().scaled(&a));
    }

    #[test]
    fn assignments_number_k_factorial(seed in any::<u64>(), k in 0usize..=4, extra in 0usize..=2) {
        let mut r = rng(seed);
        let l = random_wiring(&mut r, &[(dx(), k), (y(), extra)], (k + extra) % 2);
        let rr = random_wiring(&mut r, &[(x(), k), (z(), extra)], (k + extra) % 2);
        if let (Some(l), Some(rr)) = (l, rr) {
            let expected: usize = (1..=k).product();
            prop_assert_eq!(assignments(&l, &rr, &[x()]).len(), expected);
        }
    }

    #[test]
    fn other_colors_survive_pairing(seed in any::<u64>(), k in 1usize..=3, a in 0usize..=2, b in 0usize..=2) {
        let mut r = rng(seed);
        let l = random_wiring(&mut r, &[(dx(), k), (y(), a)], (k + a) % 2);
        let rr = random_wiring(&mut r, &[(x(), k), (z(), b)], (k + b) % 2);
        if let (Some(l), Some(rr)) = (l, rr) {
            let out = pair(&sum_of(&[(l, rat(1))]), &sum_of(&[(rr, rat(1))]), &[x()]).unwrap();
            for t in out.terms() {
                let g = t.diagram.grade();
                prop_assert_eq!(g.legs_of(&y()), a as u32);
                prop_assert_eq!(g.legs_of(&z()), b as u32);
                prop_assert_eq!(g.legs_of(&x()) + g.legs_of(&dx()), 0);
            }
        }
    }

    #[test]
    fn translations_compose(seed in any::<u64>()) {
        // x ↦ x + t followed by t ↦ t + u, against x ↦ x + t + u in one step.
        let (t, u) = (Color::plain("t"), Color::plain("u"));
        let s = random_sum(seed, &[x(), y()], 3, 6, 3);
        let step1 = translate(&s, &[TranslationRule { source: x(), targets: vec![(t.clone(), rat(1))] }]).unwrap();
        let step2 = translate(&step1, &[TranslationRule { source: t.clone(), targets: vec![(u.clone(), rat(1))] }]).unwrap();
        let once = translate(&s, &[TranslationRule { source: x(), targets: vec![(t, rat(1)), (u, rat(1))] }]).unwrap();
        prop_assert_eq!(step2, once);
    }
}

#[test]
fn pairing_hand_traces() {
    let circle = jacobi::Diagram::circles_only(1);
    let left = sum_of(&[(struts(&[(dx(), dx())]), rat(1))]);
    let right = sum_of(&[(struts(&[(x(), x())]), rat(1))]);
    assert_eq!(pair(&left, &right, &[x()]).unwrap(), sum_of(&[(circle, rat(2))]));

    let left = sum_of(&[(struts(&[(dx(), y())]), rat(1))]);
    let right_xz = sum_of(&[(struts(&[(x(), z())]), rat(1))]);
    assert_eq!(pair(&left, &right_xz, &[x()]).unwrap(), sum_of(&[(struts(&[(y(), z())]), rat(1))]));
    // Leg counts of a paired color must agree.
    assert!(pair(&left, &right, &[x()]).unwrap().is_empty());

    assert_eq!(pair(&DiagramSum::one(), &DiagramSum::one(), &[x()]).unwrap(), DiagramSum::one());
}
