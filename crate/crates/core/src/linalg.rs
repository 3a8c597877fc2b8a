//! Exact rational scalars and symmetric matrices indexed by colors.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always normalized.
pub type Rational = BigRational;

/// Largest matrix accepted by [`det_leibniz`] unless a different bound is passed.
pub const LEIBNIZ_BOUND: usize = 6;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

pub fn pow(base: &Rational, exp: u32) -> Rational {
    num_traits::pow(base.clone(), exp as usize)
}

/// A symmetric matrix `(l_xy)` whose rows and columns are indexed by an ordered color list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    colors: Vec<String>,
    entries: Vec<Vec<Rational>>,
}

impl QuadraticForm {
    pub fn new(colors: Vec<String>, entries: Vec<Vec<Rational>>) -> Result<Self> {
        let n = entries.len();
        if colors.len() != n {
            return Err(Error::ColorMismatch { colors: colors.len(), rows: n });
        }
        let mut seen = BTreeSet::new();
        for c in &colors {
            if c.is_empty() {
                return Err(Error::EmptyColor);
            }
            if !seen.insert(c.as_str()) {
                return Err(Error::DuplicateColor(c.clone()));
            }
        }
        for (row, r) in entries.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { rows: n, row, len: r.len() });
            }
        }
        for i in 0..n {
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return Err(Error::NotSymmetric(i, j));
                }
            }
        }
        Ok(Self { colors, entries })
    }

    pub fn from_integers(colors: &[&str], entries: &[&[i64]]) -> Result<Self> {
        Self::new(
            colors.iter().map(|c| c.to_string()).collect(),
            entries.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect(),
        )
    }

    pub fn identity(colors: &[&str]) -> Self {
        let n = colors.len();
        let entries = (0..n).map(|i| (0..n).map(|j| rat((i == j) as i64)).collect()).collect();
        Self::new(colors.iter().map(|c| c.to_string()).collect(), entries)
            .expect("identity is symmetric")
    }

    pub fn zero(colors: &[&str]) -> Self {
        let n = colors.len();
        Self::new(colors.iter().map(|c| c.to_string()).collect(), vec![vec![rat(0); n]; n])
            .expect("zero is symmetric")
    }

    pub fn dim(&self) -> usize {
        self.colors.len()
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn entries(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }

    pub fn index_of(&self, color: &str) -> Option<usize> {
        self.colors.iter().position(|c| c == color)
    }

    pub fn scaled(&self, s: &Rational) -> Self {
        Self {
            colors: self.colors.clone(),
            entries: self.entries.iter().map(|r| r.iter().map(|v| v * s).collect()).collect(),
        }
    }

    /// Simultaneous row/column permutation: row `i` of the result is row `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            colors: perm.iter().map(|&p| self.colors[p].clone()).collect(),
            entries: perm
                .iter()
                .map(|&p| perm.iter().map(|&q| self.entries[p][q].clone()).collect())
                .collect(),
        }
    }

    /// Plain matrix product, ignoring colors of the right factor.
    pub fn mul(&self, other: &QuadraticForm) -> Vec<Vec<Rational>> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(rat(0), |acc, k| acc + &self.entries[i][k] * &other.entries[k][j]))
                    .collect()
            })
            .collect()
    }

    pub fn is_identity(m: &[Vec<Rational>]) -> bool {
        m.iter()
            .enumerate()
            .all(|(i, r)| r.iter().enumerate().all(|(j, v)| *v == rat((i == j) as i64)))
    }
}

/// Fraction-free (Bareiss) determinant.
///
/// Denominators are cleared first so the elimination runs over the integers; every
/// intermediate division is exact.
pub fn det_bareiss(m: &QuadraticForm) -> Rational {
    let n = m.dim();
    if n == 0 {
        return rat(1);
    }
    let mut scale = BigInt::one();
    for v in m.entries.iter().flatten() {
        scale = scale.lcm(v.denom());
    }
    let scale_r = Rational::from_integer(scale.clone());
    let mut a: Vec<Vec<BigInt>> = m
        .entries
        .iter()
        .map(|r| r.iter().map(|v| (v * &scale_r).to_integer()).collect())
        .collect();

    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return rat(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    
    Rational::new(a[n - 1][n - 1].clone() * BigInt::from(sign), num_traits::pow(scale, n))
}

/// Number of cycles of `perm` (fixed points included).
pub fn cycle_count(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut cycles = 0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
        }
    }
    cycles
}

/// Visits every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&p);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            f(&p);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Leibniz expansion `Σ_π sgn(π) ∏ m[i][π(i)]`, with `sgn(π) = (-1)^(n - cycles(π))`.
pub fn det_leibniz(m: &QuadraticForm) -> Result<Rational> {
    det_leibniz_bounded(m, LEIBNIZ_BOUND)
}

pub fn det_leibniz_bounded(m: &QuadraticForm, bound: usize) -> Result<Rational> {
    let n = m.dim();
    if n > bound {
        return Err(Error::BoundExceeded { size: n, bound });
    }
    let mut total = rat(0);
    for_each_permutation(n, |p| {
        let mut term = rat(1);
        for (i, &j) in p.iter().enumerate() {
            if m.entries[i][j].is_zero() {
                return;
            }
            term *= &m.entries[i][j];
        }
        if (n - cycle_count(p)) % 2 == 1 {
            term = -term;
        }
        total += term;
    });
    Ok(total)
}

/// Exact inverse by Gauss-Jordan elimination.
pub fn invert_exact(m: &QuadraticForm) -> Result<QuadraticForm> {
    let n = m.dim();
    let mut a = m.entries.clone();
    let mut inv: Vec<Vec<Rational>> =
        (0..n).map(|i| (0..n).map(|j| rat((i == j) as i64)).collect()).collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::Singular)?;
        a.swap(pivot, col);
        inv.swap(pivot, col);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= &p;
            inv[col][j] /= &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let (x, y) = (&a[col][j] * &f, &inv[col][j] * &f);
                a[r][j] -= x;
                inv[r][j] -= y;
            }
        }
    }
    QuadraticForm::new(m.colors.clone(), inv)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormJson {
    colors: Vec<String>,
    entries: Vec<Vec<String>>,
}

impl QuadraticForm {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(FormJson {
            colors: self.colors.clone(),
            entries: self.entries.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect(),
        })
        .expect("form serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: FormJson = serde_json::from_value(v.clone())
            .map_err(|e| Error::Parse { path: "form".into(), message: e.to_string() })?;
        let mut entries = Vec::with_capacity(raw.entries.len());
        for (i, row) in raw.entries.iter().enumerate() {
            let mut r = Vec::with_capacity(row.len());
            for (j, s) in row.iter().enumerate() {
                r.push(parse_rational(s).ok_or_else(|| Error::Parse {
                    path: format!("entries[{i}][{j}]"),
                    message: format!("not a rational: {s:?}"),
                })?);
            }
            entries.push(r);
        }
        Self::new(raw.colors, entries)
    }
}

pub fn is_negative(r: &Rational) -> bool {
    r.is_negative()
}
