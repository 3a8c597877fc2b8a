//! The pairing `⟨·,·⟩_X` by leg gluing, and linear recolorings of legs.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::diagram::{canonicalize, Canonical, CanonicalKey, Color, Diagram, DiagramSum, Truncation};
use crate::error::{Error, Result};
use crate::linalg::Rational;

/// For each color `x`, a bijection from the left diagram's `∂x`-legs to the right
/// diagram's `x`-legs, as `(left leg index, right leg index)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairingAssignment {
    pub matches: BTreeMap<Color, Vec<(usize, usize)>>,
}

fn legs_of(d: &Diagram, c: &Color) -> Vec<usize> {
    d.legs().iter().enumerate().filter(|(_, l)| &l.color == c).map(|(i, _)| i).collect()
}

/// Glues one assignment: matched legs disappear and their edges are concatenated.
pub fn glue_assignment(left: &Diagram, right: &Diagram, a: &PairingAssignment) -> Result<Diagram> {
    let off = left.legs().len();
    let mut pairs = Vec::new();
    for (c, matches) in &a.matches {
        let want_l: BTreeSet<usize> = legs_of(left, &c.dual_color()).into_iter().collect();
        let want_r: BTreeSet<usize> = legs_of(right, c).into_iter().collect();
        let got_l: BTreeSet<usize> = matches.iter().map(|m| m.0).collect();
        let got_r: BTreeSet<usize> = matches.iter().map(|m| m.1).collect();
        if got_l.len() != matches.len() || got_r.len() != matches.len() || got_l != want_l || got_r != want_r {
            return Err(Error::IncompleteAssignment(format!(
                "color {c}: left {} legs, right {} legs, {} matches",
                want_l.len(),
                want_r.len(),
                matches.len()
            )));
        }
        pairs.extend(matches.iter().map(|&(l, r)| (l, r + off)));
    }
    left.disjoint_union(right).join_legs(&pairs)
}

/// All lexicographic permutations of `0..n`.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// Every complete assignment between `left` and `right` over `colors`, or none when
/// some color's leg counts differ.
pub fn assignments(left: &Diagram, right: &Diagram, colors: &[Color]) -> Vec<PairingAssignment> {
    let mut per_color = Vec::new();
    for c in colors {
        let l = legs_of(left, &c.dual_color());
        let r = legs_of(right, c);
        if l.len() != r.len() {
            return vec![];
        }
        per_color.push((c.clone(), l, r));
    }
    let mut out = vec![PairingAssignment::default()];
    for (c, l, r) in per_color {
        let perms = permutations(l.len());
        let mut next = Vec::with_capacity(out.len() * perms.len());
        for a in &out {
            for p in &perms {
                let mut b = a.clone();
                b.matches.insert(c.clone(), l.iter().zip(p).map(|(&li, &pi)| (li, r[pi])).collect());
                next.push(b);
            }
        }
        out = next;
    }
    out
}

/// Marker colors keep track of which side a leg came from while colors are glued one at a time.
fn side_marker(side: char, c: &Color) -> Color {
    Color { base: format!("\u{1}{side}{}", c.base), flavor: c.flavor }
}

/// Gluings of a single pair of diagrams. Colors are glued one at a time and identical
/// intermediate diagrams are merged, which keeps the work far below the full product of `k!`s.
fn pair_diagrams(left: &Diagram, right: &Diagram, colors: &[Color], coeff: &Rational, out: &mut DiagramSum) -> Result<()> {
    let wanted: BTreeSet<&Color> = colors.iter().collect();
    for c in colors {
        if legs_of(left, &c.dual_color()).len() != legs_of(right, c).len() {
            return Ok(());
        }
    }
    let l = left.recolored(|_, c| if !c.flavor.is_dual() || !wanted.contains(&c.dual_color()) { c.clone() } else { side_marker('L', &c.dual_color()) });
    let r = right.recolored(|_, c| if !wanted.contains(c) { c.clone() } else { side_marker('R', c) });
    let mut state = DiagramSum::from_diagram(&l.disjoint_union(&r), coeff.clone())?;
    for c in colors {
        let (lc, rc) = (side_marker('L', c), side_marker('R', c));
        let mut next = DiagramSum::new();
        for t in state.terms() {
            let ls = legs_of(&t.diagram, &lc);
            let rs = legs_of(&t.diagram, &rc);
            for p in permutations(ls.len()) {
                let pairs: Vec<_> = ls.iter().zip(&p).map(|(&a, &j)| (a, rs[j])).collect();
                next.add_diagram(&t.diagram.join_legs(&pairs)?, t.coeff.clone())?;
            }
        }
        state = next;
    }
    out.add_scaled(&state, &Rational::one());
    Ok(())
}

/// Bilinear pairing: glue the `∂x`-legs of `left` to the `x`-legs of `right`, for each
/// `x` in `colors`, in all ways. Term pairs whose counts differ contribute nothing.
pub fn pair(left: &DiagramSum, right: &DiagramSum, colors: &[Color]) -> Result<DiagramSum> {
    let lt: Vec<_> = left.terms().collect();
    let rt: Vec<_> = right.terms().collect();
    let jobs: Vec<(usize, usize)> = (0..lt.len()).flat_map(|i| (0..rt.len()).map(move |j| (i, j))).collect();
    let partials: Vec<Result<DiagramSum>> = jobs
        .par_iter()
        .map(|&(i, j)| {
            let mut s = DiagramSum::new();
            pair_diagrams(&lt[i].diagram, &rt[j].diagram, colors, &(&lt[i].coeff * &rt[j].coeff), &mut s)?;
            Ok(s)
        })
        .collect();
    let mut out = DiagramSum::new();
    for p in partials {
        out.add_scaled(&p?, &Rational::one());
    }
    Ok(out)
}

/// `source ↦ source + Σ coeff · target`, applied independently to every leg colored `source`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranslationRule {
    pub source: Color,
    pub targets: Vec<(Color, Rational)>,
}

impl TranslationRule {
    /// The unit translation `x ↦ x + x̄`.
    pub fn unit(base: &str) -> Self {
        Self { source: Color::plain(base), targets: vec![(Color::translated(base), Rational::one())] }
    }
}

fn check_rules(s: &DiagramSum, rules: &[TranslationRule]) -> Result<()> {
    let mut sources = BTreeSet::new();
    for r in rules {
        if !sources.insert(r.source.clone()) {
            return Err(Error::BadTranslation(format!("two rules for {}", r.source)));
        }
    }
    let present: BTreeSet<Color> = s.terms().flat_map(|t| t.diagram.legs().iter().map(|l| l.color.clone())).collect();
    for r in rules {
        for (t, _) in &r.targets {
            if sources.contains(t) || present.contains(t) {
                return Err(Error::BadTranslation(format!("target {t} of rule for {} is not fresh", r.source)));
            }
        }
    }
    Ok(())
}

/// Translation keeping `s`'s truncation.
pub fn translate(s: &DiagramSum, rules: &[TranslationRule]) -> Result<DiagramSum> {
    translate_bounded(s, rules, s.truncation())
}

/// Expands every substitutable leg into its sum of recolorings, pruning anything outside `bound`.
///
/// Translation is multiplicative over components, so each distinct component is expanded once and
/// the results multiplied back together.
pub fn translate_bounded(s: &DiagramSum, rules: &[TranslationRule], bound: Option<Truncation>) -> Result<DiagramSum> {
    check_rules(s, rules)?;
    let table: HashMap<&Color, &TranslationRule> = rules.iter().map(|r| (&r.source, r)).collect();
    let keep = |g: &crate::diagram::Grade| bound.is_none_or(|t| t.admits(g));
    let mut cache: HashMap<CanonicalKey, DiagramSum> = HashMap::new();
    // Products of expanded components, keyed by the sorted component keys multiplied so far.
    let mut prefixes: HashMap<Vec<CanonicalKey>, DiagramSum> = HashMap::new();
    let mut out = DiagramSum::with_truncation(bound);
    for term in s.terms() {
        let d = &term.diagram;
        let mut keys = Vec::new();
        let mut sign = 1i8;
        let mut zero = false;
        for members in d.components() {
            let comp = d.induced(&members);
            let Canonical::Form(f) = canonicalize(&comp)? else {
                zero = true;
                break;
            };
            if !cache.contains_key(&f.key) {
                cache.insert(f.key.clone(), expand_component(&f.representative, &table)?);
            }
            sign *= f.sign;
            keys.push(f.key);
        }
        if zero {
            continue;
        }
        keys.sort();
        let mut start = keys.len();
        while start > 0 && !prefixes.contains_key(&keys[..start]) {
            start -= 1;
        }
        let mut acc = if start == 0 { DiagramSum::one() } else { prefixes[&keys[..start]].clone() };
        for n in start + 1..=keys.len() {
            if acc.is_empty() {
                break;
            }
            acc = acc.mul_filtered(&cache[&keys[n - 1]], keep)?;
            prefixes.insert(keys[..n].to_vec(), acc.clone());
        }
        let coeff = &term.coeff * Rational::from_integer(sign.into());
        if d.circles() == 0 {
            out.add_scaled(&acc, &coeff);
        } else {
            let circles = Diagram::circles_only(d.circles());
            for t in acc.terms() {
                out.add_diagram(&t.diagram.disjoint_union(&circles), &t.coeff * &coeff)?;
            }
        }
    }
    Ok(out)
}

fn expand_component(d: &Diagram, table: &HashMap<&Color, &TranslationRule>) -> Result<DiagramSum> {
    let choices: Vec<Vec<(Color, Rational)>> = d
        .legs()
        .iter()
        .map(|l| {
            let mut opts = vec![(l.color.clone(), Rational::one())];
            if let Some(r) = table.get(&l.color) {
                opts.extend(r.targets.iter().filter(|(_, c)| !c.is_zero()).cloned());
            }
            opts
        })
        .collect();
    let mut out = DiagramSum::new();
    let mut idx = vec![0usize; choices.len()];
    loop {
        let mut coeff = Rational::one();
        for (i, &k) in idx.iter().enumerate() {
            coeff *= &choices[i][k].1;
        }
        out.add_diagram(&d.recolored(|i, _| choices[i][idx[i]].0.clone()), coeff)?;
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(out);
            }
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}
