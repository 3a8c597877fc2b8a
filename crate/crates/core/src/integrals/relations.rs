//! The relations `O_m`, `P_m`, `C_l` and `C^k_l` applied to contexts with marked stubs, and a
//! finite enumeration of small contexts.

use std::collections::BTreeSet;

use num_traits::One;

use super::perfect_matchings;
use crate::diagram::{canonicalize, Canonical, CanonicalKey, Color, Diagram, DiagramSum};
use crate::error::{Error, Result};
use crate::gluing::permutations;
use crate::linalg::{rat, Rational};

/// Placeholder color of the first (upper) group of stubs in enumerated contexts.
pub const STUB_A: &str = "@a";
/// Placeholder color of the second (lower) group of stubs.
pub const STUB_B: &str = "@b";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelationKind {
    /// A disjoint circle equals `-2m`.
    O { m: u32 },
    /// All pairings of `2m` stubs.
    P { m: u32 },
    /// All `l!` attachments of two groups of `l` stubs.
    C { l: usize },
    /// Attach `k` upper stubs injectively into `l` lower stubs, then pair the remaining lower ones.
    Ckl { k: usize, l: usize },
}

/// A diagram with two ordered lists of stub legs. Stubs are consumed by the relation; the color
/// on a stub leg is irrelevant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Context {
    pub diagram: Diagram,
    pub up: Vec<usize>,
    pub down: Vec<usize>,
}

impl Context {
    pub fn new(diagram: Diagram, up: Vec<usize>, down: Vec<usize>) -> Result<Self> {
        let all: BTreeSet<usize> = up.iter().chain(&down).copied().collect();
        if all.len() != up.len() + down.len() || all.iter().any(|&i| i >= diagram.legs().len()) {
            return Err(Error::RelationContext("stubs must be distinct leg indices".into()));
        }
        Ok(Self { diagram, up, down })
    }

    /// Stubs read off the placeholder colors: `STUB_A` legs go up, `STUB_B` legs go down.
    pub fn from_stub_colors(diagram: Diagram) -> Self {
        let pick = |base: &str| -> Vec<usize> {
            diagram.legs().iter().enumerate().filter(|(_, l)| l.color == Color::plain(base)).map(|(i, _)| i).collect()
        };
        let (up, down) = (pick(STUB_A), pick(STUB_B));
        Self { diagram, up, down }
    }

    pub fn stubs(&self) -> Vec<usize> {
        self.up.iter().chain(&self.down).copied().collect()
    }

    /// Joins two stubs to each other; the remaining stubs keep their order.
    pub fn join(&self, a: usize, b: usize) -> Result<Context> {
        let diagram = self.diagram.join_legs(&[(a, b)])?;
        let shift = |i: usize| i - usize::from(a < i) - usize::from(b < i);
        let keep = |v: &[usize]| v.iter().filter(|&&i| i != a && i != b).map(|&i| shift(i)).collect::<Vec<_>>();
        Ok(Context { up: keep(&self.up), down: keep(&self.down), diagram })
    }

    /// Adds a disjoint diagram; its legs become additional stubs in the given groups when listed.
    pub fn with_disjoint(&self, other: &Diagram, other_up: &[usize], other_down: &[usize]) -> Context {
        let off = self.diagram.legs().len();
        let mut up = self.up.clone();
        let mut down = self.down.clone();
        up.extend(other_up.iter().map(|i| i + off));
        down.extend(other_down.iter().map(|i| i + off));
        Context { diagram: self.diagram.disjoint_union(other), up, down }
    }

    /// The `C_{2n}` context for a `P_n` context: the stubs become the upper group and `n` caps
    /// (struts with two stub ends) supply the lower group.
    pub fn capped(&self) -> Result<Context> {
        let stubs = self.stubs();
        if stubs.len() % 2 == 1 {
            return Err(Error::RelationContext("odd number of stubs cannot be capped".into()));
        }
        let mut caps = Diagram::empty();
        for _ in 0..stubs.len() / 2 {
            caps = caps.disjoint_union(&crate::diagram::strut(Color::plain(STUB_B), Color::plain(STUB_B)));
        }
        let base = Context { diagram: self.diagram.clone(), up: stubs, down: vec![] };
        let lower: Vec<usize> = (0..caps.legs().len()).collect();
        Ok(base.with_disjoint(&caps, &[], &lower))
    }
}

/// A relation applied to a context, with its expansion (coefficient 1 per gluing, before cancellation).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationInstance {
    pub kind: RelationKind,
    pub context: Context,
    pub expansion: DiagramSum,
}

fn mismatch(kind: RelationKind, ctx: &Context) -> Error {
    Error::RelationContext(format!("{kind:?} does not fit {} upper and {} lower stubs", ctx.up.len(), ctx.down.len()))
}

impl RelationInstance {
    pub fn new(kind: RelationKind, context: Context) -> Result<Self> {
        let d = &context.diagram;
        let mut expansion = DiagramSum::new();
        let glue = |expansion: &mut DiagramSum, pairs: &[(usize, usize)]| -> Result<()> {
            expansion.add_diagram(&d.join_legs(pairs)?, Rational::one())
        };
        match kind {
            RelationKind::O { m } => {
                if !context.up.is_empty() || !context.down.is_empty() {
                    return Err(mismatch(kind, &context));
                }
                expansion.add_diagram(&d.disjoint_union(&Diagram::circles_only(1)), Rational::one())?;
                expansion.add_diagram(d, rat(2 * i64::from(m)))?;
            }
            RelationKind::P { m } => {
                let stubs = context.stubs();
                if stubs.len() != 2 * m as usize {
                    return Err(mismatch(kind, &context));
                }
                for pairs in perfect_matchings(&stubs) {
                    glue(&mut expansion, &pairs)?;
                }
            }
            RelationKind::C { l } => {
                if context.up.len() != l || context.down.len() != l {
                    return Err(mismatch(kind, &context));
                }
                for p in permutations(l) {
                    let pairs: Vec<_> = (0..l).map(|i| (context.up[i], context.down[p[i]])).collect();
                    glue(&mut expansion, &pairs)?;
                }
            }
            RelationKind::Ckl { k, l } => {
                if context.up.len() != k || context.down.len() != l || k > l {
                    return Err(mismatch(kind, &context));
                }
                if (l - k) % 2 == 1 {
                    return Err(Error::RelationContext(format!("C^{k}_{l} needs l - k even")));
                }
                for targets in injections(k, l) {
                    let pairs: Vec<_> = (0..k).map(|i| (context.up[i], context.down[targets[i]])).collect();
                    let rest: Vec<usize> = (0..l).filter(|j| !targets.contains(j)).map(|j| context.down[j]).collect();
                    for m in perfect_matchings(&rest) {
                        let mut all = pairs.clone();
                        all.extend(m);
                        glue(&mut expansion, &all)?;
                    }
                }
            }
        }
        Ok(Self { kind, context, expansion })
    }
}

/// Ordered selections of `k` distinct elements of `0..l`.
fn injections(k: usize, l: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, l: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in 0..l {
            if !cur.contains(&j) {
                cur.push(j);
                rec(k, l, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(k, l, &mut Vec::new(), &mut out);
    out
}

/// Stub layout of enumerated contexts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContextShape {
    /// `l` upper and `l` lower stubs.
    TwoGroups(usize),
    /// `s` stubs, all upper.
    OneGroup(usize),
}

impl ContextShape {
    fn sizes(self) -> (usize, usize) {
        match self {
            ContextShape::TwoGroups(l) => (l, l),
            ContextShape::OneGroup(s) => (s, 0),
        }
    }
}

/// Every context (up to isomorphism) made of the stubs, at most `max_trivalent` trivalent vertices
/// and some `x`-legs, with at most `max_internal` edges not touching a stub and at most
/// `max_vertices` vertices in all (stubs included). Stubs not attached to the rest are capped in
/// pairs. Every component contains a stub, and antisymmetric (zero) contexts are skipped.
pub fn enumerate_contexts(shape: ContextShape, max_trivalent: usize, max_internal: usize, max_vertices: usize) -> Result<Vec<Context>> {
    let (na, nb) = shape.sizes();
    let s = na + nb;
    let mut seen: BTreeSet<CanonicalKey> = BTreeSet::new();
    let mut out = Vec::new();
    for t in 0..=max_trivalent {
        for u in 0..=max_vertices.saturating_sub(s + t) {
            let h = 3 * t + u;
            // Half-edges 0..3t belong to trivalent vertices (vertex i owns 3i..3i+3); the rest are x-legs.
            for internal in partial_matchings(h, max_internal) {
                if internal.iter().any(|&(a, b)| (a < 3 * t && b < 3 * t && a / 3 == b / 3) || (a >= 3 * t && b >= 3 * t)) {
                    continue;
                }
                let used: BTreeSet<usize> = internal.iter().flat_map(|&(a, b)| [a, b]).collect();
                let free: Vec<usize> = (0..h).filter(|i| !used.contains(i)).collect();
                if free.len() > s || (s - free.len()) % 2 == 1 {
                    continue;
                }
                for mask in 0..(1u32 << free.len()) {
                    let a_count = mask.count_ones() as usize;
                    let b_count = free.len() - a_count;
                    if a_count > na || b_count > nb {
                        continue;
                    }
                    let (ra, rb) = (na - a_count, nb - b_count);
                    for ab in 0..=ra.min(rb) {
                        if (ra - ab) % 2 == 1 || (rb - ab) % 2 == 1 {
                            continue;
                        }
                        let d = build_context(t, u, &internal, &free, mask, [(ra - ab) / 2, ab, (rb - ab) / 2])?;
                        if d.components().iter().any(|c| c.iter().all(|&v| v >= d.legs().len() || !is_stub(&d, v))) {
                            continue;
                        }
                        if let Canonical::Form(f) = canonicalize(&d)? {
                            if seen.insert(f.key) {
                                out.push(Context::from_stub_colors(f.representative));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn is_stub(d: &Diagram, leg: usize) -> bool {
    let c = &d.legs()[leg].color;
    *c == Color::plain(STUB_A) || *c == Color::plain(STUB_B)
}

fn build_context(t: usize, u: usize, internal: &[(usize, usize)], free: &[usize], mask: u32, caps: [usize; 3]) -> Result<Diagram> {
    let (a, b, x) = (Color::plain(STUB_A), Color::plain(STUB_B), Color::plain("x"));
    let mut bld = Diagram::builder();
    let mut he = Vec::with_capacity(3 * t + u);
    for _ in 0..t {
        he.extend(bld.vertex());
    }
    for _ in 0..u {
        he.push(bld.leg(x.clone()));
    }
    for &(p, q) in internal {
        bld.edge(he[p], he[q]);
    }
    for (k, &f) in free.iter().enumerate() {
        let stub = bld.leg(if mask >> k & 1 == 1 { a.clone() } else { b.clone() });
        bld.edge(he[f], stub);
    }
    for (n, (c1, c2)) in caps.iter().zip([(&a, &a), (&a, &b), (&b, &b)]) {
        for _ in 0..*n {
            let p = bld.leg(c1.clone());
            let q = bld.leg(c2.clone());
            bld.edge(p, q);
        }
    }
    bld.build()
}

/// Matchings of at most `max` disjoint pairs among `0..n`.
fn partial_matchings(n: usize, max: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(n: usize, max: usize, start: usize, used: &mut Vec<bool>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        out.push(cur.clone());
        if cur.len() == max {
            return;
        }
        for a in start..n {
            if used[a] {
                continue;
            }
            for b in a + 1..n {
                if used[b] {
                    continue;
                }
                used[a] = true;
                used[b] = true;
                cur.push((a, b));
                rec(n, max, a + 1, used, cur, out);
                cur.pop();
                used[a] = false;
                used[b] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(n, max, 0, &mut vec![false; n], &mut Vec::new(), &mut out);
    out
}

/// `P_m` on every enumerated context whose only legs are its `2m` stubs and which has at most
/// `max_trivalent` trivalent vertices. Each expansion is a sum of closed diagrams.
pub fn closed_pairing_instances(m: u32, max_trivalent: usize) -> Result<Vec<RelationInstance>> {
    let stubs = 2 * m as usize;
    enumerate_contexts(ContextShape::OneGroup(stubs), max_trivalent, 2, max_trivalent + stubs)?
        .into_iter()
        .filter(|c| c.diagram.legs().len() == stubs)
        .map(|c| RelationInstance::new(RelationKind::P { m }, c))
        .collect()
}
