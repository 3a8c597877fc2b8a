//! Negative-dimensional and formal Gaussian integration, the relation calculus, and the checks
//! comparing them.

mod checks;
mod relations;
mod span;

pub use checks::{
    check_gaussian_identity, check_prop_main, check_translation_invariance, translation_certificate, Report,
};
pub use relations::{closed_pairing_instances, enumerate_contexts, Context, ContextShape, RelationInstance, RelationKind, STUB_A, STUB_B};
pub use span::{reduce_mod_span, reduce_mod_span_bounded, SpanReduction, DEFAULT_BASIS_BOUND};

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::diagram::{strut, Color, Diagram, DiagramSum, Flavor, Truncation};
use crate::error::{Error, Result};
use crate::gluing::pair;
use crate::linalg::{invert_exact, pow, rat, QuadraticForm, Rational};
use crate::series::{gaussian_part, PerturbedGaussian};

/// Default bound on `n·m` for [`diagrammatic_det`].
pub const DET_BOUND: usize = 8;

/// Which of the two equivalent descriptions of `∫^(m)` to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NdForm {
    /// Sum over all same-color pairings of the legs.
    Direct,
    /// Pairing against `∏_x (1/m!) (strut(∂x,∂x)/2)^m`.
    Pairing,
}

/// All perfect matchings of `items` (empty when the count is odd).
pub fn perfect_matchings(items: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if items.len() % 2 == 1 {
        return vec![];
    }
    if items.is_empty() {
        return vec![vec![]];
    }
    let first = items[0];
    let mut out = Vec::new();
    for k in 1..items.len() {
        let rest: Vec<usize> = items[1..].iter().enumerate().filter(|(i, _)| i + 1 != k).map(|(_, &v)| v).collect();
        for mut m in perfect_matchings(&rest) {
            m.insert(0, (first, items[k]));
            out.push(m);
        }
    }
    out
}

fn census_matches(d: &Diagram, colors: &[Color], m: u32) -> bool {
    let g = d.grade();
    colors.iter().all(|c| g.legs_of(c) == 2 * m)
}

/// `∫^(m) S dX` by the direct pairing description; with `reduce`, circles then become `-2m`.
pub fn nd_integrate(s: &DiagramSum, colors: &[Color], m: u32, reduce: bool) -> Result<DiagramSum> {
    nd_integrate_with(s, colors, m, reduce, NdForm::Direct)
}

pub fn nd_integrate_with(s: &DiagramSum, colors: &[Color], m: u32, reduce: bool, form: NdForm) -> Result<DiagramSum> {
    let projected = s.filtered(|d| census_matches(d, colors, m)).without_truncation();
    let out = match form {
        NdForm::Pairing => pair(&nd_pairing_operand(colors, m), &projected, colors)?,
        NdForm::Direct => {
            let terms: Vec<_> = projected.terms().collect();
            let partials: Vec<Result<DiagramSum>> = terms
                .par_iter()
                .map(|t| {
                    // One color at a time, merging identical intermediate diagrams.
                    let mut state = DiagramSum::from_diagram(&t.diagram, t.coeff.clone())?;
                    for c in colors {
                        let mut next = DiagramSum::new();
                        for u in state.terms() {
                            let legs: Vec<usize> = u.diagram.legs().iter().enumerate().filter(|(_, l)| &l.color == c).map(|(i, _)| i).collect();
                            for pairs in perfect_matchings(&legs) {
                                next.add_diagram(&u.diagram.join_legs(&pairs)?, u.coeff.clone())?;
                            }
                        }
                        state = next;
                    }
                    Ok(state)
                })
                .collect();
            let mut acc = DiagramSum::new();
            for p in partials {
                acc.add_scaled(&p?, &Rational::one());
            }
            acc
        }
    };
    Ok(if reduce { o_reduce(&out, m) } else { out })
}

/// `∏_x (1/m!) (strut(∂x,∂x)/2)^m` as a single weighted diagram.
pub fn nd_pairing_operand(colors: &[Color], m: u32) -> DiagramSum {
    let mut d = Diagram::empty();
    let mut coeff = Rational::one();
    let per_color = Rational::new(1.into(), num_bigint::BigInt::from(2).pow(m) * factorial(m));
    for c in colors {
        for _ in 0..m {
            d = d.disjoint_union(&strut(c.dual_color(), c.dual_color()));
        }
        coeff *= &per_color;
    }
    DiagramSum::from_diagram(&d, coeff).expect("struts canonicalize")
}

fn factorial(n: u32) -> num_bigint::BigInt {
    (1..=n).map(num_bigint::BigInt::from).product()
}

/// Replaces each circle by the scalar `-2m`.
pub fn o_reduce(s: &DiagramSum, m: u32) -> DiagramSum {
    let factor = rat(-2 * i64::from(m));
    let mut out = DiagramSum::with_truncation(s.truncation());
    for t in s.terms() {
        let c = t.diagram.circles();
        out.add_diagram(&t.diagram.with_circles(0), &t.coeff * pow(&factor, c)).expect("circle removal canonicalizes");
    }
    out
}

/// `∫^FG G dX = ⟨exp(-½ l^{xy} strut(∂x,∂y)), P⟩_X` through degree `degree_bound`.
pub fn fg_integrate(g: &PerturbedGaussian, degree_bound: u32) -> Result<DiagramSum> {
    let inv = invert_exact(g.form())?;
    let colors = g.colors();
    // A closed output's degree is half its trivalent count, all of which come from P.
    let p = g.perturbation().filtered(|d| d.grade().trivalent <= 2 * degree_bound).without_truncation();
    let max_legs = p.terms().map(|t| t.diagram.grade().max_legs()).max().unwrap_or(0);
    let gauss = if max_legs == 0 {
        DiagramSum::one()
    } else {
        gaussian_part(&inv, -1, Flavor::Dual, Some(Truncation::legs(max_legs)))?
    };
    let out = pair(&gauss.without_truncation(), &p, &colors)?;
    Ok(out.truncated(Truncation::degree(degree_bound)))
}

/// `(-1)^{nm} det(Λ)^m` evaluated as a sum of glued strut cycles over permutations of `X × A`,
/// `|A| = m`, each closed loop counting `-1`.
pub fn diagrammatic_det(form: &QuadraticForm, m: u32) -> Result<Rational> {
    diagrammatic_det_bounded(form, m, DET_BOUND)
}

pub fn diagrammatic_det_bounded(form: &QuadraticForm, m: u32, bound: usize) -> Result<Rational> {
    let n = form.dim();
    let size = n * m as usize;
    if size > bound {
        return Err(Error::BoundExceeded { size, bound });
    }
    // Index α = (x, a) ↦ x·m + a; color "x#a". The lower operand holds one strut (α, ∂α) per α.
    let alpha = |k: usize| format!("{}#{}", form.colors()[k / m as usize], k % m as usize);
    let mut lower = Diagram::empty();
    for k in 0..size {
        lower = lower.disjoint_union(&strut(Color::plain(alpha(k)), Color::dual(alpha(k))));
    }
    let weight = |k: usize, j: usize| -> Rational {
        if k % m as usize != j % m as usize {
            Rational::zero()
        } else {
            form.get(k / m as usize, j / m as usize).clone()
        }
    };
    let mut total = Rational::zero();
    let mut failure = None;
    crate::linalg::for_each_permutation(size, |perm| {
        if failure.is_some() {
            return;
        }
        let mut w = Rational::one();
        for (k, &j) in perm.iter().enumerate() {
            w *= weight(k, j);
            if w.is_zero() {
                return;
            }
        }
        // Upper operand: the struts (∂α, π(α)), glued α-to-∂α against the lower operand.
        let mut upper = Diagram::empty();
        for (k, &j) in perm.iter().enumerate() {
            upper = upper.disjoint_union(&strut(Color::dual(alpha(k)), Color::plain(alpha(j))));
        }
        let both = lower.disjoint_union(&upper);
        let off = lower.legs().len();
        let find = |from: usize, c: &Color| (from..both.legs().len()).find(|&i| &both.legs()[i].color == c).expect("leg present");
        let mut pairs = Vec::with_capacity(2 * size);
        for k in 0..size {
            pairs.push((find(0, &Color::plain(alpha(k))), find(off, &Color::dual(alpha(k)))));
            pairs.push((find(0, &Color::dual(alpha(k))), find(off, &Color::plain(alpha(k)))));
        }
        match both.join_legs(&pairs) {
            Ok(closed) => {
                if closed.circles() % 2 == 1 {
                    w = -w;
                }
                total += w;
            }
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{det_bareiss, ratio};
    use crate::series::quadratic_part;

    fn x() -> Color {
        Color::plain("x")
    }

    #[test]
    fn matchings_count() {
        assert_eq!(perfect_matchings(&[0, 1, 2, 3]).len(), 3);
        assert_eq!(perfect_matchings(&[0, 1, 2, 3, 4, 5]).len(), 15);
        assert!(perfect_matchings(&[0, 1, 2]).is_empty());
    }

    #[test]
    fn nd_single_color() {
        let f = QuadraticForm::from_integers(&["x"], &[&[5]]).unwrap();
        let g = gaussian_part(&f, 1, Flavor::Plain, Some(Truncation::legs(2))).unwrap();
        for form in [NdForm::Direct, NdForm::Pairing] {
            let r = nd_integrate_with(&g, &[x()], 1, true, form).unwrap();
            assert_eq!(r.constant_term(), rat(-5));
            assert_eq!(r.len(), 1);
        }
    }

    #[test]
    fn nd_two_colors() {
        let f = QuadraticForm::from_integers(&["x", "y"], &[&[0, 1], &[1, 0]]).unwrap();
        let g = gaussian_part(&f, 1, Flavor::Plain, Some(Truncation::legs(2))).unwrap();
        let colors = [x(), Color::plain("y")];
        let raw = nd_integrate(&g, &colors, 1, false).unwrap();
        assert_eq!(raw.coeff_of(&Diagram::circles_only(1)).unwrap(), ratio(1, 2));
        assert_eq!(nd_integrate(&g, &colors, 1, true).unwrap().constant_term(), rat(-1));
    }

    #[test]
    fn nd_wrong_census_vanishes() {
        let d = strut(x(), x()).disjoint_union(&strut(x(), Color::plain("y")));
        let s = DiagramSum::from_diagram(&d, rat(1)).unwrap();
        assert!(nd_integrate(&s, &[x()], 2, true).unwrap().is_empty());
    }

    #[test]
    fn o_reduce_examples() {
        let s = DiagramSum::from_diagram(&Diagram::circles_only(1), rat(1)).unwrap();
        assert_eq!(o_reduce(&s, 2).constant_term(), rat(-4));
        let s = DiagramSum::from_diagram(&Diagram::circles_only(3), rat(5)).unwrap();
        assert_eq!(o_reduce(&s, 2).constant_term(), rat(-320));
        let q = quadratic_part(&QuadraticForm::identity(&["x"]), &rat(1), Flavor::Plain);
        assert_eq!(o_reduce(&q, 3), q);
    }

    #[test]
    fn fg_pure_is_one() {
        let f = QuadraticForm::from_integers(&["x", "y"], &[&[0, 1], &[1, 1]]).unwrap();
        let r = fg_integrate(&PerturbedGaussian::pure(f), 3).unwrap();
        assert_eq!(r.without_truncation(), DiagramSum::one());
        let singular = QuadraticForm::zero(&["x"]);
        assert!(matches!(fg_integrate(&PerturbedGaussian::pure(singular), 1), Err(Error::Singular)));
    }

    #[test]
    fn diagrammatic_det_small() {
        let f = QuadraticForm::from_integers(&["x"], &[&[7]]).unwrap();
        assert_eq!(diagrammatic_det(&f, 1).unwrap(), rat(-7));
        let f = QuadraticForm::from_integers(&["x", "y"], &[&[0, 1], &[1, 1]]).unwrap();
        assert_eq!(diagrammatic_det(&f, 1).unwrap(), rat(-1));
        assert_eq!(diagrammatic_det(&QuadraticForm::identity(&["x", "y"]), 2).unwrap(), rat(1));
        let f = QuadraticForm::from_integers(&["x", "y"], &[&[2, 1], &[1, 3]]).unwrap();
        assert_eq!(diagrammatic_det(&f, 2).unwrap(), pow(&det_bareiss(&f), 2));
        assert!(diagrammatic_det(&QuadraticForm::identity(&["a", "b", "c"]), 3).is_err());
    }
}
