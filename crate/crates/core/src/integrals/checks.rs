//! Checks comparing the two integrals and the identities they satisfy, with JSON reports.

use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Value};

use super::relations::{Context, RelationInstance, RelationKind};
use super::{fg_integrate, nd_integrate, o_reduce, perfect_matchings};
use crate::diagram::{strut, Color, Diagram, DiagramSum, Flavor, Truncation};
use crate::error::Result;
use crate::gluing::{translate, TranslationRule};
use crate::linalg::{det_bareiss, pow, QuadraticForm, Rational};
use crate::series::{gaussian_part, PerturbedGaussian};

/// Outcome of a check: both sides, whether they agree, and what is left over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub check: String,
    pub m: u32,
    pub lhs: DiagramSum,
    pub rhs: DiagramSum,
    pub equal: bool,
    /// `lhs - rhs`, minus the relation certificate when one was used.
    pub residual: DiagramSum,
    /// Number of relation instances in the certificate, when equality needed relations.
    pub relations: Option<usize>,
}

impl Report {
    fn literal(check: &str, m: u32, lhs: DiagramSum, rhs: DiagramSum) -> Self {
        let (lhs, rhs) = (lhs.without_truncation(), rhs.without_truncation());
        let residual = lhs.sub(&rhs);
        Report { check: check.into(), m, equal: residual.is_empty(), lhs, rhs, residual, relations: None }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "check": self.check,
            "m": self.m,
            "lhs": self.lhs.terms_json(),
            "rhs": self.rhs.terms_json(),
            "equal": self.equal,
            "residual": self.residual.terms_json(),
        });
        if let Some(n) = self.relations {
            v["relations"] = json!(n);
        }
        v
    }
}

fn constant(c: Rational) -> DiagramSum {
    DiagramSum::one().scaled(&c)
}

fn sign_power(e: u32) -> Rational {
    if e.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// `∫^(m) exp(½ Σ l_xy strut(x,y)) dX` after `O_m`, against `(-1)^{nm} det(Λ)^m`.
pub fn check_gaussian_identity(form: &QuadraticForm, m: u32) -> Result<Report> {
    let colors: Vec<Color> = form.colors().iter().map(Color::plain).collect();
    let g = gaussian_part(form, 1, Flavor::Plain, Some(Truncation::legs(2 * m)))?;
    let lhs = nd_integrate(&g, &colors, m, true)?;
    let rhs = constant(sign_power(form.dim() as u32 * m) * pow(&det_bareiss(form), m));
    Ok(Report::literal("gaussian", m, lhs, rhs))
}

/// `∫^(m) D dX` against `∫^(m) D/(x ↦ x + x̄) dX`. When the sides differ literally (some color has
/// more than `2m` legs), equality is established by an explicit combination of `P_{m'}` instances
/// with `m' > m`, all consequences of `P_{m+1}`.
pub fn check_translation_invariance(d: &Diagram, colors: &[Color], m: u32) -> Result<Report> {
    let s = DiagramSum::from_diagram(d, Rational::one())?;
    let lhs = nd_integrate(&s, colors, m, false)?;
    let rules: Vec<TranslationRule> = colors.iter().map(|c| TranslationRule::unit(&c.base)).collect();
    let rhs = nd_integrate(&translate(&s, &rules)?, colors, m, false)?;
    let mut report = Report::literal("translation", m, lhs, rhs);
    if report.equal {
        return Ok(report);
    }
    if let Some(cert) = translation_certificate(d, colors, m)? {
        let mut combo = DiagramSum::new();
        for (c, r) in &cert {
            combo.add_scaled(&r.expansion, c);
        }
        // residual = lhs - rhs; the certificate sums to rhs - lhs.
        let rest = report.residual.add(&combo);
        report.equal = rest.is_empty();
        report.residual = rest;
        report.relations = Some(cert.len());
    }
    Ok(report)
}

fn legs_colored(d: &Diagram, c: &Color) -> Vec<usize> {
    d.legs().iter().enumerate().filter(|(_, l)| &l.color == c).map(|(i, _)| i).collect()
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut with: Vec<Vec<usize>> = subsets(&items[1..], k - 1);
    for s in &mut with {
        s.insert(0, items[0]);
    }
    with.extend(subsets(&items[1..], k));
    with
}

fn int(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

fn double_factorial_odd(j: u64) -> u64 {
    // (2j - 1)!!
    (1..=j).map(|i| 2 * i - 1).product()
}

fn binom(n: u64, k: u64) -> u64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Weighted `P_{m'}` instances (`m' ≥ m + 1`) summing to the translated integral of `d` when some
/// color has more than `2m` legs and none has fewer. `None` when the integral vanishes literally.
///
/// With `x` the first color carrying `2m + k` legs, `k > 0`, and every other color resolved, the
/// translated integral over `x` is `1/k!` times the pairing of all `2m + 2k` stubs obtained by
/// adding `k` struts ending in `x̄`, minus the terms in which `2j` of the added struts pair among
/// themselves. Those terms are `P_{m+j}` instances on the diagram with `k - 2j` legs recolored `x̄`.
pub fn translation_certificate(d: &Diagram, colors: &[Color], m: u32) -> Result<Option<Vec<(Rational, RelationInstance)>>> {
    let two_m = 2 * m as usize;
    let counts: Vec<usize> = colors.iter().map(|c| legs_colored(d, c).len()).collect();
    if counts.iter().any(|&c| c < two_m) {
        return Ok(None);
    }
    let Some(xi) = counts.iter().position(|&c| c > two_m) else {
        return Ok(None);
    };
    let x = &colors[xi];
    let xbar = Color::translated(&x.base);
    let k = counts[xi] - two_m;

    // Resolve every other color: keep 2m legs and pair them, translate the rest.
    let mut resolved = vec![d.clone()];
    for (zi, z) in colors.iter().enumerate() {
        if zi == xi {
            continue;
        }
        let zbar = Color::translated(&z.base);
        let mut next = Vec::new();
        for r in &resolved {
            let legs = legs_colored(r, z);
            for keep in subsets(&legs, two_m) {
                let moved = r.recolored(|i, c| if c == z && !keep.contains(&i) { zbar.clone() } else { c.clone() });
                for pairs in perfect_matchings(&keep) {
                    next.push(moved.join_legs(&pairs)?);
                }
            }
        }
        resolved = next;
    }

    let kf = int(factorial(k as u64));
    let mut cert = Vec::new();
    for r in &resolved {
        let xs = legs_colored(r, x);
        let mut extra = Diagram::empty();
        for _ in 0..k {
            extra = extra.disjoint_union(&strut(xbar.clone(), x.clone()));
        }
        let ctx = Context::new(r.clone(), xs.clone(), vec![])?;
        let stub_ends: Vec<usize> = (0..k).map(|i| 2 * i + 1).collect();
        let ctx0 = ctx.with_disjoint(&extra, &stub_ends, &[]);
        cert.push((Rational::one() / &kf, RelationInstance::new(RelationKind::P { m: m + k as u32 }, ctx0)?));
        for j in 1..=k / 2 {
            let mult = binom(k as u64, 2 * j as u64) * double_factorial_odd(j as u64) * factorial((k - 2 * j) as u64);
            let coeff = -int(mult) / &kf;
            let mut caps = Diagram::empty();
            for _ in 0..j {
                caps = caps.disjoint_union(&strut(xbar.clone(), xbar.clone()));
            }
            for u in subsets(&xs, k - 2 * j) {
                let moved = r.recolored(|i, c| if u.contains(&i) { xbar.clone() } else { c.clone() }).disjoint_union(&caps);
                let stubs: Vec<usize> = xs.iter().copied().filter(|i| !u.contains(i)).collect();
                let cj = Context::new(moved, stubs, vec![])?;
                cert.push((coeff.clone(), RelationInstance::new(RelationKind::P { m: m + j as u32 }, cj)?));
            }
        }
    }
    Ok(Some(cert))
}

/// `∫^(m) G dX` after `O_m` against `(-1)^{m|X|} det(Λ)^m ∫^FG G dX`, both through degree `m`.
pub fn check_prop_main(g: &PerturbedGaussian, m: u32) -> Result<Report> {
    let colors = g.colors();
    let n = colors.len() as u32;
    let legs = Truncation::legs(2 * m);
    // Output degree is half the trivalent count, all of which comes from the perturbation.
    let p = g
        .perturbation()
        .filtered(|d| d.grade().trivalent <= 2 * m && legs.admits(&d.grade()))
        .without_truncation();
    let integrand = p.mul(&gaussian_part(g.form(), 1, Flavor::Plain, Some(legs))?.without_truncation())?;
    let lhs = o_reduce(&nd_integrate(&integrand, &colors, m, false)?, m).truncated(Truncation::degree(m));
    let factor = sign_power(m * n) * pow(&det_bareiss(g.form()), m);
    let rhs = fg_integrate(g, m)?.scaled(&factor);
    Ok(Report::literal("prop-main", m, lhs, rhs))
}
