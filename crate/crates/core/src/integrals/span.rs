//! Exact membership in the span of relation instances, by sparse row reduction over canonical keys.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::diagram::{CanonicalKey, Diagram, DiagramSum};
use crate::error::{Error, Result};
use crate::linalg::Rational;

/// Default cap on the number of distinct canonical keys in one reduction.
pub const DEFAULT_BASIS_BOUND: usize = 5000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanReduction {
    /// `S` minus its projection onto the span, in reduced form.
    pub residual: DiagramSum,
    pub member: bool,
    /// Rank of the generator span.
    pub rank: usize,
}

type Row = BTreeMap<CanonicalKey, Rational>;

fn row_of(s: &DiagramSum, reps: &mut BTreeMap<CanonicalKey, Diagram>) -> Row {
    s.iter()
        .map(|(k, t)| {
            reps.entry(k.clone()).or_insert_with(|| t.diagram.clone());
            (k.clone(), t.coeff.clone())
        })
        .collect()
}

/// Eliminates every pivot key from `row`; pivot rows are normalized to leading coefficient 1.
fn reduce(mut row: Row, pivots: &BTreeMap<CanonicalKey, Row>) -> Row {
    loop {
        let Some((key, c)) = row.iter().find(|(k, _)| pivots.contains_key(*k)).map(|(k, c)| (k.clone(), c.clone())) else {
            return row;
        };
        for (k, v) in &pivots[&key] {
            let e = row.entry(k.clone()).or_insert_with(Rational::zero);
            *e -= &c * v;
            if e.is_zero() {
                row.remove(k);
            }
        }
    }
}

pub fn reduce_mod_span(s: &DiagramSum, generators: &[DiagramSum]) -> Result<SpanReduction> {
    reduce_mod_span_bounded(s, generators, DEFAULT_BASIS_BOUND)
}

/// Row-reduces `s` against the generator sums; fails when more than `bound` distinct keys occur.
pub fn reduce_mod_span_bounded(s: &DiagramSum, generators: &[DiagramSum], bound: usize) -> Result<SpanReduction> {
    let keys: BTreeSet<&CanonicalKey> = generators.iter().chain([s]).flat_map(|g| g.iter().map(|(k, _)| k)).collect();
    if keys.len() > bound {
        return Err(Error::BasisBound { keys: keys.len(), bound });
    }
    let mut reps = BTreeMap::new();
    let mut pivots: BTreeMap<CanonicalKey, Row> = BTreeMap::new();
    for g in generators {
        let mut row = reduce(row_of(g, &mut reps), &pivots);
        let Some((lead, c)) = row.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            continue;
        };
        for v in row.values_mut() {
            *v /= &c;
        }
        // Keep pivot rows fully reduced so that `reduce` never reintroduces a pivot key.
        for other in pivots.values_mut() {
            if let Some(f) = other.get(&lead).cloned() {
                for (k, v) in &row {
                    let e = other.entry(k.clone()).or_insert_with(Rational::zero);
                    *e -= &f * v;
                    if e.is_zero() {
                        other.remove(k);
                    }
                }
            }
        }
        pivots.insert(lead, row);
    }
    let rest = reduce(row_of(s, &mut reps), &pivots);
    let mut residual = DiagramSum::new();
    for (k, c) in rest {
        residual.add_diagram(&reps[&k], c)?;
    }
    Ok(SpanReduction { member: residual.is_empty(), residual, rank: pivots.len() })
}
