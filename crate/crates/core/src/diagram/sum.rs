use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::canon::union_of_keys;
use super::{canonicalize, Canonical, CanonicalKey, Diagram, Grade};
use crate::error::Result;
use crate::linalg::Rational;

/// Optional bounds on total degree and on legs of any single color.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_legs_per_color: Option<u32>,
}

impl Truncation {
    pub fn degree(d: u32) -> Self {
        Self { max_degree: Some(d), max_legs_per_color: None }
    }

    pub fn legs(l: u32) -> Self {
        Self { max_degree: None, max_legs_per_color: Some(l) }
    }

    pub fn is_unbounded(&self) -> bool {
        self.max_degree.is_none() && self.max_legs_per_color.is_none()
    }

    pub fn admits(&self, g: &Grade) -> bool {
        self.max_degree.is_none_or(|d| g.twice_degree <= 2 * d)
            && self.max_legs_per_color.is_none_or(|l| g.max_legs() <= l)
    }

    pub fn intersect(a: Option<Truncation>, b: Option<Truncation>) -> Option<Truncation> {
        fn min(a: Option<u32>, b: Option<u32>) -> Option<u32> {
            match (a, b) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, None) => x,
                (None, y) => y,
            }
        }
        match (a, b) {
            (None, None) => None,
            (Some(t), None) | (None, Some(t)) => Some(t),
            (Some(s), Some(t)) => Some(Truncation {
                max_degree: min(s.max_degree, t.max_degree),
                max_legs_per_color: min(s.max_legs_per_color, t.max_legs_per_color),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    /// Canonical representative.
    pub diagram: Diagram,
    pub coeff: Rational,
}

/// A finite rational linear combination of canonical diagrams.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiagramSum {
    terms: BTreeMap<CanonicalKey, Term>,
    truncation: Option<Truncation>,
}

impl DiagramSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_truncation(truncation: Option<Truncation>) -> Self {
        Self { terms: BTreeMap::new(), truncation }
    }

    /// The empty diagram with coefficient 1.
    pub fn one() -> Self {
        let mut s = Self::new();
        s.add_diagram(&Diagram::empty(), Rational::one()).expect("empty diagram canonicalizes");
        s
    }

    pub fn from_diagram(d: &Diagram, coeff: Rational) -> Result<Self> {
        let mut s = Self::new();
        s.add_diagram(d, coeff)?;
        Ok(s)
    }

    pub fn truncation(&self) -> Option<Truncation> {
        self.truncation
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CanonicalKey, &Term)> {
        self.terms.iter()
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.terms.values()
    }

    pub fn admits(&self, d: &Diagram) -> bool {
        self.truncation.is_none_or(|t| t.admits(&d.grade()))
    }

    /// Adds `coeff · d`. Zero-by-symmetry diagrams and out-of-bound diagrams are dropped.
    pub fn add_diagram(&mut self, d: &Diagram, coeff: Rational) -> Result<()> {
        if coeff.is_zero() || !self.admits(d) {
            return Ok(());
        }
        match canonicalize(d)? {
            Canonical::Zero => Ok(()),
            Canonical::Form(f) => {
                let c = if f.sign < 0 { -coeff } else { coeff };
                self.add_canonical(f.key, f.representative, c);
                Ok(())
            }
        }
    }

    /// Adds a term whose diagram is already the canonical representative of `key`.
    pub(crate) fn add_canonical(&mut self, key: CanonicalKey, diagram: Diagram, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(Term { diagram, coeff });
            }
            Entry::Occupied(mut e) => {
                e.get_mut().coeff += coeff;
                if e.get().coeff.is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += scale · other`; terms outside this sum's truncation are dropped.
    pub fn add_scaled(&mut self, other: &DiagramSum, scale: &Rational) {
        for (k, t) in &other.terms {
            if self.admits(&t.diagram) {
                self.add_canonical(k.clone(), t.diagram.clone(), &t.coeff * scale);
            }
        }
    }

    /// `a·s + b·t`, truncated to the intersection of both truncations.
    pub fn combine(a: &Rational, s: &DiagramSum, b: &Rational, t: &DiagramSum) -> DiagramSum {
        let mut out = DiagramSum::with_truncation(Truncation::intersect(s.truncation, t.truncation));
        out.add_scaled(s, a);
        out.add_scaled(t, b);
        out
    }

    pub fn scaled(&self, c: &Rational) -> DiagramSum {
        let mut out = DiagramSum::with_truncation(self.truncation);
        out.add_scaled(self, c);
        out
    }

    pub fn sub(&self, other: &DiagramSum) -> DiagramSum {
        Self::combine(&Rational::one(), self, &-Rational::one(), other)
    }

    pub fn add(&self, other: &DiagramSum) -> DiagramSum {
        Self::combine(&Rational::one(), self, &Rational::one(), other)
    }

    /// Keeps only the terms accepted by `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&Diagram) -> bool) -> DiagramSum {
        DiagramSum {
            terms: self.terms.iter().filter(|(_, t)| keep(&t.diagram)).map(|(k, t)| (k.clone(), t.clone())).collect(),
            truncation: self.truncation,
        }
    }

    /// Re-truncates: sets the truncation to the intersection and drops terms outside it.
    pub fn truncated(&self, t: Truncation) -> DiagramSum {
        let truncation = Truncation::intersect(self.truncation, Some(t));
        let bound = truncation.expect("non-empty");
        let mut out = self.filtered(|d| bound.admits(&d.grade()));
        out.truncation = truncation;
        out
    }

    pub fn without_truncation(&self) -> DiagramSum {
        DiagramSum { terms: self.terms.clone(), truncation: None }
    }

    /// Coefficient of the class of `d` (sign-adjusted when `d` is not the representative).
    pub fn coeff_of(&self, d: &Diagram) -> Result<Rational> {
        Ok(match canonicalize(d)? {
            Canonical::Zero => Rational::zero(),
            Canonical::Form(f) => {
                let c = self.terms.get(&f.key).map(|t| t.coeff.clone()).unwrap_or_else(Rational::zero);
                if f.sign < 0 {
                    -c
                } else {
                    c
                }
            }
        })
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff_of(&Diagram::empty()).expect("empty diagram canonicalizes")
    }

    /// Disjoint-union product, keeping only products accepted by `keep`.
    pub fn mul_filtered(&self, other: &DiagramSum, mut keep: impl FnMut(&Grade) -> bool) -> Result<DiagramSum> {
        let mut out = DiagramSum::with_truncation(Truncation::intersect(self.truncation, other.truncation));
        let others: Vec<(&CanonicalKey, &Term, Grade)> =
            other.terms.iter().map(|(k, t)| (k, t, t.diagram.grade())).collect();
        for (ka, a) in &self.terms {
            let ga = a.diagram.grade();
            for (kb, b, gb) in &others {
                let g = combined_grade(&ga, gb);
                if !keep(&g) || out.truncation.is_some_and(|t| !t.admits(&g)) {
                    continue;
                }
                // Both diagrams are representatives, so the product's key comes from the keys.
                let (key, rep) = union_of_keys(ka, kb);
                out.add_canonical(key, rep, &a.coeff * &b.coeff);
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &DiagramSum) -> Result<DiagramSum> {
        let bound = Truncation::intersect(self.truncation, other.truncation);
        self.mul_filtered(other, |g| bound.is_none_or(|t| t.admits(g)))
    }
}

pub(crate) fn combined_grade(a: &Grade, b: &Grade) -> Grade {
    let mut census = a.census.clone();
    for (c, n) in &b.census {
        *census.entry(c.clone()).or_insert(0) += n;
    }
    Grade {
        twice_degree: a.twice_degree + b.twice_degree,
        census,
        trivalent: a.trivalent + b.trivalent,
        circles: a.circles + b.circles,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{strut, Color};
    use crate::linalg::{rat, ratio};

    fn theta() -> Diagram {
        let mut b = Diagram::builder();
        let u = b.vertex();
        let v = b.vertex();
        for i in 0..3 {
            b.edge(u[i], v[i]);
        }
        b.build().unwrap()
    }

    #[test]
    fn additive_inverse() {
        let s = DiagramSum::from_diagram(&strut(Color::plain("x"), Color::plain("y")), rat(3)).unwrap();
        assert!(DiagramSum::combine(&rat(1), &s, &rat(-1), &s).is_empty());
    }

    #[test]
    fn as_cancellation() {
        let t = theta();
        let mut s = DiagramSum::new();
        s.add_diagram(&t, rat(1)).unwrap();
        s.add_diagram(&t.flip_vertex(1), rat(1)).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn coefficient_arithmetic() {
        let s = DiagramSum::from_diagram(&theta(), ratio(1, 2)).unwrap();
        let r = DiagramSum::combine(&rat(2), &s, &rat(1), &s);
        assert_eq!(r.len(), 1);
        assert_eq!(r.coeff_of(&theta()).unwrap(), ratio(3, 2));
        assert_eq!(r.coeff_of(&theta().flip_vertex(0)).unwrap(), ratio(-3, 2));
    }

    #[test]
    fn truncation_drops_terms() {
        let mut s = DiagramSum::with_truncation(Some(Truncation::legs(1)));
        s.add_diagram(&strut(Color::plain("x"), Color::plain("x")), rat(1)).unwrap();
        assert!(s.is_empty());
        s.add_diagram(&strut(Color::plain("x"), Color::plain("y")), rat(1)).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn intersect_truncations() {
        let a = Some(Truncation { max_degree: Some(3), max_legs_per_color: None });
        let b = Some(Truncation { max_degree: Some(2), max_legs_per_color: Some(4) });
        assert_eq!(
            Truncation::intersect(a, b),
            Some(Truncation { max_degree: Some(2), max_legs_per_color: Some(4) })
        );
    }

    #[test]
    fn product_matches_union_canonicalization() {
        let tripod = |c: [&str; 3]| {
            let mut b = Diagram::builder();
            let v = b.vertex();
            for (i, base) in c.into_iter().enumerate() {
                let l = b.leg(Color::plain(base));
                b.edge(v[i], l);
            }
            b.build().unwrap()
        };
        let parts = [theta(), theta().flip_vertex(0), tripod(["x", "y", "z"]), tripod(["y", "x", "z"]), strut(Color::plain("x"), Color::dual("y"))];
        for a in &parts {
            for b in &parts {
                let sa = DiagramSum::from_diagram(&a.with_circles(1), rat(2)).unwrap();
                let sb = DiagramSum::from_diagram(b, ratio(-1, 3)).unwrap();
                let direct = DiagramSum::from_diagram(&a.with_circles(1).disjoint_union(b), ratio(-2, 3)).unwrap();
                assert_eq!(sa.mul(&sb).unwrap(), direct);
            }
        }
    }
}
