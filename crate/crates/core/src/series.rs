//! Truncated exponentials, Gaussian parts given by quadratic forms, and perturbed Gaussians.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use crate::diagram::strut;
use crate::diagram::{Color, DiagramSum, Flavor, Grade, SumJson, TermJson, Truncation};
use crate::error::{Error, Result};
use crate::gluing::{translate_bounded, TranslationRule};
use crate::linalg::{invert_exact, parse_rational, QuadraticForm, Rational};

/// `scale · ½ Σ_{x,y} l_xy strut(x,y)` with colors of the given flavor: off-diagonal struts carry
/// `scale · l_xy`, diagonal ones `scale · l_xx / 2`.
pub fn quadratic_part(form: &QuadraticForm, scale: &Rational, flavor: Flavor) -> DiagramSum {
    let color = |i: usize| Color { base: form.colors()[i].clone(), flavor };
    let half = Rational::new(1.into(), 2.into());
    let mut out = DiagramSum::new();
    for i in 0..form.dim() {
        for j in i..form.dim() {
            let c = if i == j { scale * form.get(i, i) * &half } else { scale * form.get(i, j) };
            out.add_diagram(&strut(color(i), color(j)), c).expect("struts canonicalize");
        }
    }
    out
}

/// `exp(sign · ½ Σ l_xy strut(x,y))`, expanded within `bound`.
pub fn gaussian_part(form: &QuadraticForm, sign: i32, flavor: Flavor, bound: Option<Truncation>) -> Result<DiagramSum> {
    let bound = bound.filter(|t| !t.is_unbounded()).ok_or_else(|| Error::MissingTruncation("Gaussian expansion".into()))?;
    exp_truncate(&quadratic_part(form, &Rational::from_integer(sign.into()), flavor), bound)
}

/// `Σ_{k ≤ max_power} S^k / k!`, keeping only products whose grade passes `keep`.
///
/// `keep` must be closed downwards under disjoint union (if a product passes, so do its factors),
/// which holds for every bound on degree, legs, or trivalent vertices.
pub fn exp_filtered(s: &DiagramSum, keep: impl Fn(&Grade) -> bool, max_power: u32) -> Result<DiagramSum> {
    if s.terms().any(|t| t.diagram.grade().twice_degree == 0) {
        return Err(Error::DegreeZeroExponent);
    }
    let s = s.filtered(|d| keep(&d.grade())).without_truncation();
    let mut out = DiagramSum::one();
    let mut power = DiagramSum::one();
    for k in 1..=max_power {
        power = power.mul_filtered(&s, &keep)?.scaled(&Rational::new(1.into(), k.into()));
        if power.is_empty() {
            break;
        }
        out.add_scaled(&power, &Rational::one());
    }
    Ok(out)
}

/// Truncated exponential. Fails when `S` has a degree-0 term or the bound cannot terminate the series.
pub fn exp_truncate(s: &DiagramSum, bound: Truncation) -> Result<DiagramSum> {
    let max_power = if let Some(d) = bound.max_degree {
        2 * d
    } else if let Some(l) = bound.max_legs_per_color {
        if s.terms().any(|t| t.diagram.legs().is_empty()) {
            return Err(Error::MissingTruncation("legless exponent needs a degree bound".into()));
        }
        let colors: BTreeSet<&Color> = s.terms().flat_map(|t| t.diagram.legs().iter().map(|x| &x.color)).collect();
        l * colors.len() as u32
    } else {
        return Err(Error::MissingTruncation("exponential".into()));
    };
    let mut out = exp_filtered(s, |g| bound.admits(g), max_power)?;
    out = out.truncated(bound);
    Ok(out)
}

/// `P · exp(½ Σ l_xy strut(x,y))` with `P` strutless and all its legs colored from the form's colors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerturbedGaussian {
    form: QuadraticForm,
    perturbation: DiagramSum,
}

impl PerturbedGaussian {
    pub fn new(form: QuadraticForm, perturbation: DiagramSum) -> Result<Self> {
        let allowed: BTreeSet<&String> = form.colors().iter().collect();
        for t in perturbation.terms() {
            let d = &t.diagram;
            let bare = d.legs().is_empty() && d.vertices().is_empty() && d.circles() == 0;
            if !bare && !d.is_strutless() {
                return Err(Error::NotGaussian(format!("perturbation term is not strutless: {d}")));
            }
            if let Some(l) = d.legs().iter().find(|l| l.color.flavor != Flavor::Plain || !allowed.contains(&l.color.base)) {
                return Err(Error::NotGaussian(format!("perturbation leg color {} is outside the form", l.color)));
            }
        }
        Ok(Self { form, perturbation })
    }

    /// The unperturbed Gaussian.
    pub fn pure(form: QuadraticForm) -> Self {
        Self { form, perturbation: DiagramSum::one() }
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn perturbation(&self) -> &DiagramSum {
        &self.perturbation
    }

    pub fn colors(&self) -> Vec<Color> {
        self.form.colors().iter().map(Color::plain).collect()
    }

    /// The full integrand `P · exp(quadratic)`, within `bound`.
    pub fn expand(&self, bound: Truncation) -> Result<DiagramSum> {
        let g = gaussian_part(&self.form, 1, Flavor::Plain, Some(bound))?;
        let p = self.perturbation.filtered(|d| bound.admits(&d.grade()));
        p.without_truncation().mul(&g)
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({ "form": self.form.to_json(), "perturbation": self.perturbation.to_json() })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| parse_err("", "expected an object"))?;
        if let Some(k) = obj.keys().find(|k| *k != "form" && *k != "perturbation") {
            return Err(parse_err(k, "unknown field"));
        }
        let form = QuadraticForm::from_json(obj.get("form").ok_or_else(|| parse_err("form", "missing field"))?)?;
        let perturbation = match obj.get("perturbation") {
            Some(p) => DiagramSum::from_json(p)?,
            None => DiagramSum::one(),
        };
        Self::new(form, perturbation)
    }
}

fn parse_err(path: &str, message: &str) -> Error {
    Error::Parse { path: path.into(), message: message.into() }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct StrutJson {
    pub a: String,
    pub b: String,
    pub coeff: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExpOfJson {
    #[serde(default)]
    pub struts: Vec<StrutJson>,
    #[serde(default)]
    pub perturbation: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IntegrandJson {
    pub exp_of: ExpOfJson,
    #[serde(default)]
    pub truncation: Option<Truncation>,
    /// Integration colors; defaults to every color named by a strut.
    #[serde(default)]
    pub colors: Option<Vec<String>>,
}

/// `exp(Σ c · strut(a,b) + p)`, given in factored form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Integrand {
    pub struts: Vec<(Color, Color, Rational)>,
    /// The strutless logarithm `p`.
    pub log_perturbation: DiagramSum,
    pub truncation: Option<Truncation>,
    pub colors: Vec<String>,
}

impl Integrand {
    pub fn from_json(v: &Value) -> Result<Self> {
        let raw: IntegrandJson =
            serde_json::from_value(v.clone()).map_err(|e| parse_err("integrand", &e.to_string()))?;
        let mut struts = Vec::new();
        for (i, s) in raw.exp_of.struts.iter().enumerate() {
            let c = parse_rational(&s.coeff)
                .ok_or_else(|| parse_err(&format!("exp_of.struts[{i}].coeff"), &format!("not a rational: {:?}", s.coeff)))?;
            struts.push((Color::plain(&s.a), Color::plain(&s.b), c));
        }
        let log_perturbation =
            DiagramSum::from_json_struct(&SumJson { truncation: None, terms: raw.exp_of.perturbation })
                .map_err(|e| parse_err("exp_of.perturbation", &e.to_string()))?;
        let colors = match raw.colors {
            Some(c) => c,
            None => {
                let set: BTreeSet<String> = struts.iter().flat_map(|(a, b, _)| [a.base.clone(), b.base.clone()]).collect();
                set.into_iter().collect()
            }
        };
        Ok(Self { struts, log_perturbation, truncation: raw.truncation, colors })
    }

    /// The strut part as a sum.
    pub fn strut_sum(&self) -> DiagramSum {
        let mut s = DiagramSum::new();
        for (a, b, c) in &self.struts {
            s.add_diagram(&strut(a.clone(), b.clone()), c.clone()).expect("struts canonicalize");
        }
        s
    }

    /// The full exponential within `bound` (defaults to the integrand's own truncation).
    pub fn expand(&self, bound: Option<Truncation>) -> Result<DiagramSum> {
        let bound = Truncation::intersect(self.truncation, bound)
            .ok_or_else(|| Error::MissingTruncation("integrand expansion".into()))?;
        exp_truncate(&self.strut_sum().add(&self.log_perturbation), bound)
    }
}

/// Reads off `Λ` from the strut coefficients and exponentiates the strutless part.
pub fn split_gaussian(s: &Integrand) -> Result<PerturbedGaussian> {
    let index: BTreeMap<&String, usize> = s.colors.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let n = s.colors.len();
    let mut m = vec![vec![Rational::zero(); n]; n];
    for (a, b, c) in &s.struts {
        let (Some(&i), Some(&j)) = (index.get(&a.base), index.get(&b.base)) else {
            return Err(Error::NotGaussian(format!("strut ({a},{b}) uses a color outside the integration set")));
        };
        if a.flavor != Flavor::Plain || b.flavor != Flavor::Plain {
            return Err(Error::NotGaussian(format!("strut ({a},{b}) is not plain-colored")));
        }
        if i == j {
            m[i][i] += c * Rational::from_integer(2.into());
        } else {
            m[i][j] += c;
            m[j][i] += c;
        }
    }
    let form = QuadraticForm::new(s.colors.clone(), m)?;
    let p = &s.log_perturbation;
    let perturbation = if p.is_empty() {
        DiagramSum::one()
    } else {
        if let Some(t) = p.terms().find(|t| !t.diagram.is_strutless()) {
            return Err(Error::NotGaussian(format!("perturbation exponent is not strutless: {}", t.diagram)));
        }
        let bound = s.truncation.ok_or_else(|| Error::MissingTruncation("perturbation exponential".into()))?;
        exp_truncate(p, bound)?.without_truncation()
    };
    PerturbedGaussian::new(form, perturbation)
}

/// Both sides of the completed square for `Λ`, with at most `legs` legs per color:
/// `exp(½ l_xy xy + Σ x x̄ + ½ l^{xy} x̄ȳ)` and `exp(½ l_xy xy) / (x ↦ x + Σ_y l^{xy} ȳ)`.
pub fn complete_square(form: &QuadraticForm, legs: u32) -> Result<(DiagramSum, DiagramSum)> {
    let inv = invert_exact(form)?;
    let bound = Truncation::legs(legs);
    let mut exponent = quadratic_part(form, &Rational::one(), Flavor::Plain);
    for c in form.colors() {
        exponent.add_diagram(&strut(Color::plain(c), Color::translated(c)), Rational::one())?;
    }
    exponent = exponent.add(&quadratic_part(&inv, &Rational::one(), Flavor::Translated));
    let lhs = exp_truncate(&exponent, bound)?;

    // An x-leg either stays or moves to one of the n translated colors, so anything landing within
    // the bound comes from at most legs·(n+1) legs per color and legs·n struts.
    let n = form.dim() as u32;
    let pre = Truncation { max_degree: Some(legs * n), max_legs_per_color: Some(legs * (n + 1)) };
    let gauss = exp_truncate(&quadratic_part(form, &Rational::one(), Flavor::Plain), pre)?;
    let rules: Vec<TranslationRule> = (0..form.dim())
        .map(|i| TranslationRule {
            source: Color::plain(&form.colors()[i]),
            targets: (0..form.dim())
                .filter(|&j| !inv.get(i, j).is_zero())
                .map(|j| (Color::translated(&form.colors()[j]), inv.get(i, j).clone()))
                .collect(),
        })
        .collect();
    let rhs = translate_bounded(&gauss, &rules, Some(bound))?;
    Ok((lhs, rhs))
}
