//! Canonical labeling of diagrams up to color-preserving isomorphism, tracking the
//! sign picked up from trivalent cyclic orders (AS).
//!
//! Each connected component is labeled separately by color refinement followed by an
//! exhaustive individualization search. Every leaf whose encoding equals the minimum
//! is an isomorphism onto the canonical component; two such leaves with different
//! orientation signs witness an orientation-reversing automorphism, and the diagram
//! is then zero. Components are recombined by sorting their encodings. Permuting
//! isomorphic components never changes the sign, so the diagram sign is the product
//! of the component signs.

use std::cmp::Ordering;
use std::sync::OnceLock;

use super::{Color, Diagram, Flavor, Leg};
use crate::error::{Error, Result};

pub const DEFAULT_VERTEX_BUDGET: usize = 20;

/// Largest connected component (in vertices) the search will label: `JACOBI_VERTEX_BUDGET` if
/// set, else [`DEFAULT_VERTEX_BUDGET`].
pub fn vertex_budget() -> usize {
    static BUDGET: OnceLock<usize> = OnceLock::new();
    *BUDGET.get_or_init(|| {
        std::env::var("JACOBI_VERTEX_BUDGET")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(DEFAULT_VERTEX_BUDGET)
    })
}

/// Byte string identifying an isomorphism class (colors and circle count included).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(pub Vec<u8>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub key: CanonicalKey,
    /// `input = sign · representative`.
    pub sign: i8,
    pub representative: Diagram,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Canonical {
    /// The diagram equals its own negative.
    Zero,
    Form(CanonicalForm),
}

impl Canonical {
    pub fn form(self) -> Option<CanonicalForm> {
        match self {
            Canonical::Zero => None,
            Canonical::Form(f) => Some(f),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Canonical::Zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    Leg(Color),
    Trivalent,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct ComponentCode {
    kinds: Vec<Kind>,
    /// `(lo, hi)` label pairs, sorted, with multiplicity.
    edges: Vec<(u16, u16)>,
}

struct Component {
    kinds: Vec<Kind>,
    adj: Vec<Vec<usize>>,
    /// Edges as `(half-edge, half-edge, local vertex, local vertex)`.
    edges: Vec<(usize, usize, usize, usize)>,
    /// Cyclic orders of the trivalent vertices, as global half-edge ids.
    cyclic: Vec<[usize; 3]>,
}

pub fn canonicalize(d: &Diagram) -> Result<Canonical> {
    canonicalize_with_budget(d, vertex_budget())
}

pub fn canonicalize_with_budget(d: &Diagram, budget: usize) -> Result<Canonical> {
    let n = d.vertex_count();
    let components = d.components();
    if let Some(big) = components.iter().map(Vec::len).find(|&c| c > budget) {
        return Err(Error::VertexBudget { vertices: big, budget });
    }
    let mut codes = Vec::new();
    let mut sign = 1i8;
    for members in components {
        match canonical_component(d, &members) {
            None => return Ok(Canonical::Zero),
            Some((code, s)) => {
                sign *= s;
                codes.push(code);
            }
        }
    }
    codes.sort();
    let key = encode_key(n as u32, d.circles(), &codes);
    let representative = assemble(&codes, d.circles());
    Ok(Canonical::Form(CanonicalForm { key, sign, representative }))
}

fn build_component(d: &Diagram, members: &[usize]) -> Option<Component> {
    let mut local = std::collections::HashMap::with_capacity(members.len());
    for (i, &v) in members.iter().enumerate() {
        local.insert(v, i);
    }
    let nlegs = d.legs().len();
    let mut kinds = Vec::with_capacity(members.len());
    let mut adj = vec![Vec::new(); members.len()];
    let mut edges = Vec::new();
    let mut cyclic = Vec::new();
    for (i, &v) in members.iter().enumerate() {
        if v < nlegs {
            kinds.push(Kind::Leg(d.legs()[v].color.clone()));
        } else {
            kinds.push(Kind::Trivalent);
            cyclic.push(d.vertices()[v - nlegs]);
        }
        for &he in d.half_edges_of(v) {
            let p = d.partner(he);
            let j = local[&d.vertex_of(p)];
            if j == i && v >= nlegs {
                // a loop at a trivalent vertex: swapping its ends reverses the orientation
                return None;
            }
            adj[i].push(j);
            if he < p {
                edges.push((he, p, i, j));
            }
        }
    }
    Some(Component { kinds, adj, edges, cyclic })
}

fn canonical_component(d: &Diagram, members: &[usize]) -> Option<(ComponentCode, i8)> {
    let comp = build_component(d, members)?;
    let mut sorted_kinds = comp.kinds.clone();
    sorted_kinds.sort();
    sorted_kinds.dedup();
    let mut col: Vec<u32> = comp
        .kinds
        .iter()
        .map(|k| sorted_kinds.binary_search(k).expect("kind present") as u32)
        .collect();
    refine(&mut col, &comp.adj);

    let mut search = Search { comp: &comp, best: None, zero: false };
    search.run(col);
    if search.zero {
        return None;
    }
    let (edges, sign) = search.best.expect("search reaches a leaf");
    let mut kinds = comp.kinds.clone();
    kinds.sort();
    Some((ComponentCode { kinds, edges }, sign))
}

/// Color refinement to the coarsest equitable partition. Colors stay ordered
/// consistently with the input colors.
fn refine(col: &mut [u32], adj: &[Vec<usize>]) {
    let n = col.len();
    let mut distinct = count_distinct(col);
    loop {
        let mut sigs: Vec<(u32, Vec<u32>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<u32> = adj[v].iter().map(|&w| col[w]).collect();
                nb.sort_unstable();
                (col[v], nb)
            })
            .collect();
        let mut uniq = sigs.clone();
        uniq.sort();
        uniq.dedup();
        for (v, s) in sigs.drain(..).enumerate() {
            col[v] = uniq.binary_search(&s).expect("signature present") as u32;
        }
        if uniq.len() == distinct {
            return;
        }
        distinct = uniq.len();
    }
}

fn count_distinct(col: &[u32]) -> usize {
    let mut c = col.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

struct Search<'a> {
    comp: &'a Component,
    best: Option<(Vec<(u16, u16)>, i8)>,
    zero: bool,
}

impl Search<'_> {
    fn run(&mut self, col: Vec<u32>) {
        if self.zero {
            return;
        }
        let n = col.len();
        // first non-singleton cell, by color
        let mut counts = vec![0u32; n];
        for &c in &col {
            counts[c as usize] += 1;
        }
        let target = match counts.iter().position(|&k| k > 1) {
            None => return self.leaf(&col),
            Some(c) => c as u32,
        };
        for v in 0..n {
            if col[v] != target {
                continue;
            }
            let mut next: Vec<u32> = col.iter().enumerate().map(|(w, &c)| 2 * c + (w != v) as u32).collect();
            let mut uniq = next.clone();
            uniq.sort_unstable();
            uniq.dedup();
            for c in next.iter_mut() {
                *c = uniq.binary_search(c).expect("present") as u32;
            }
            refine(&mut next, &self.comp.adj);
            self.run(next);
            if self.zero {
                return;
            }
        }
    }

    fn leaf(&mut self, lab: &[u32]) {
        let mut code: Vec<(u16, u16)> = self
            .comp
            .edges
            .iter()
            .map(|&(_, _, a, b)| {
                let (la, lb) = (lab[a] as u16, lab[b] as u16);
                (la.min(lb), la.max(lb))
            })
            .collect();
        code.sort_unstable();
        let ord = match &self.best {
            None => Ordering::Less,
            Some((b, _)) => code.cmp(b),
        };
        if ord == Ordering::Greater {
            return;
        }
        let sign = self.leaf_sign(lab, &code);
        match ord {
            Ordering::Less => self.best = Some((code, sign)),
            Ordering::Equal => {
                if self.best.as_ref().map(|b| b.1) != Some(sign) {
                    self.zero = true;
                }
            }
            Ordering::Greater => unreachable!(),
        }
    }

    /// Orientation sign of the isomorphism given by `lab` onto the canonical component.
    fn leaf_sign(&self, lab: &[u32], code: &[(u16, u16)]) -> i8 {
        let mut image = std::collections::HashMap::with_capacity(2 * code.len());
        let mut used = vec![false; code.len()];
        for &(h1, h2, a, b) in &self.comp.edges {
            let (la, lb) = (lab[a] as u16, lab[b] as u16);
            let key = (la.min(lb), la.max(lb));
            let start = code.partition_point(|e| *e < key);
            let e = (start..code.len()).find(|&i| !used[i]).expect("edge present");
            used[e] = true;
            let (lo, hi) = (2 * e, 2 * e + 1);
            if la <= lb {
                image.insert(h1, lo);
                image.insert(h2, hi);
            } else {
                image.insert(h1, hi);
                image.insert(h2, lo);
            }
        }
        let mut sign = 1i8;
        for cyc in &self.comp.cyclic {
            let t = cyc.map(|h| image[&h]);
            let inversions = (t[0] > t[1]) as u8 + (t[0] > t[2]) as u8 + (t[1] > t[2]) as u8;
            if inversions % 2 == 1 {
                sign = -sign;
            }
        }
        sign
    }
}

fn encode_key(twice_degree: u32, circles: u32, codes: &[ComponentCode]) -> CanonicalKey {
    let mut out = Vec::new();
    out.extend_from_slice(&(twice_degree as u16).to_be_bytes());
    out.extend_from_slice(&circles.to_be_bytes());
    out.extend_from_slice(&(codes.len() as u16).to_be_bytes());
    for c in codes {
        out.extend_from_slice(&(c.kinds.len() as u16).to_be_bytes());
        for k in &c.kinds {
            match k {
                Kind::Leg(color) => {
                    out.push(0);
                    out.extend_from_slice(&(color.base.len() as u16).to_be_bytes());
                    out.extend_from_slice(color.base.as_bytes());
                    out.push(color.flavor.code());
                }
                Kind::Trivalent => out.push(1),
            }
        }
        out.extend_from_slice(&(c.edges.len() as u16).to_be_bytes());
        for &(a, b) in &c.edges {
            out.extend_from_slice(&a.to_be_bytes());
            out.extend_from_slice(&b.to_be_bytes());
        }
    }
    CanonicalKey(out)
}

fn decode_key(key: &CanonicalKey) -> (u32, Vec<ComponentCode>) {
    let b = &key.0;
    let mut pos = 0usize;
    let mut take = |n: usize| {
        let out = &b[pos..pos + n];
        pos += n;
        out
    };
    let u16_at = |s: &[u8]| u16::from_be_bytes([s[0], s[1]]);
    let _ = take(2);
    let c = take(4);
    let circles = u32::from_be_bytes([c[0], c[1], c[2], c[3]]);
    let ncodes = u16_at(take(2));
    let mut codes = Vec::with_capacity(ncodes as usize);
    for _ in 0..ncodes {
        let nk = u16_at(take(2));
        let mut kinds = Vec::with_capacity(nk as usize);
        for _ in 0..nk {
            if take(1)[0] == 0 {
                let len = u16_at(take(2)) as usize;
                let base = String::from_utf8(take(len).to_vec()).expect("keys hold UTF-8 color names");
                let flavor = Flavor::from_code(take(1)[0]).expect("keys hold valid flavor codes");
                kinds.push(Kind::Leg(Color::new(base, flavor)));
            } else {
                kinds.push(Kind::Trivalent);
            }
        }
        let ne = u16_at(take(2));
        let edges = (0..ne).map(|_| (u16_at(take(2)), u16_at(take(2)))).collect();
        codes.push(ComponentCode { kinds, edges });
    }
    (circles, codes)
}

/// Key and representative of the disjoint union of two canonical representatives, read off
/// their keys. The union of representatives equals the returned representative with sign `+1`.
pub(crate) fn union_of_keys(a: &CanonicalKey, b: &CanonicalKey) -> (CanonicalKey, Diagram) {
    let (ca, mut codes) = decode_key(a);
    let (cb, more) = decode_key(b);
    codes.extend(more);
    codes.sort();
    let n: usize = codes.iter().map(|c| c.kinds.len()).sum();
    (encode_key(n as u32, ca + cb, &codes), assemble(&codes, ca + cb))
}

/// The canonical representative: component by component, half-edges `2e` and `2e + 1`
/// for edge `e`, cyclic orders ascending.
fn assemble(codes: &[ComponentCode], circles: u32) -> Diagram {
    let mut legs = Vec::new();
    let mut vertices = Vec::new();
    let mut partner = Vec::new();
    let mut offset = 0usize;
    for c in codes {
        let mut hes: Vec<Vec<usize>> = vec![Vec::new(); c.kinds.len()];
        for (e, &(a, b)) in c.edges.iter().enumerate() {
            hes[a as usize].push(offset + 2 * e);
            hes[b as usize].push(offset + 2 * e + 1);
            partner.push(offset + 2 * e + 1);
            partner.push(offset + 2 * e);
        }
        for (v, k) in c.kinds.iter().enumerate() {
            let mut hs = std::mem::take(&mut hes[v]);
            hs.sort_unstable();
            match k {
                Kind::Leg(color) => legs.push(Leg { he: hs[0], color: color.clone() }),
                Kind::Trivalent => vertices.push([hs[0], hs[1], hs[2]]),
            }
        }
        offset += 2 * c.edges.len();
    }
    Diagram::from_compact(legs, vertices, partner, circles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::strut;

    fn tripod(colors: [Color; 3]) -> Diagram {
        let mut b = Diagram::builder();
        let v = b.vertex();
        for (i, c) in colors.into_iter().enumerate() {
            let l = b.leg(c);
            b.edge(v[i], l);
        }
        b.build().unwrap()
    }

    pub(crate) fn theta() -> Diagram {
        let mut b = Diagram::builder();
        let u = b.vertex();
        let v = b.vertex();
        for i in 0..3 {
            b.edge(u[i], v[i]);
        }
        b.build().unwrap()
    }

    #[test]
    fn y_with_equal_legs_is_zero() {
        let x = Color::plain("x");
        assert!(canonicalize(&tripod([x.clone(), x.clone(), x])).unwrap().is_zero());
    }

    #[test]
    fn y_with_distinct_legs_is_not_zero() {
        let d = tripod([Color::plain("x"), Color::plain("y"), Color::plain("z")]);
        let f = canonicalize(&d).unwrap().form().unwrap();
        let g = canonicalize(&d.flip_vertex(0)).unwrap().form().unwrap();
        assert_eq!(f.key, g.key);
        assert_eq!(f.sign, -g.sign);
    }

    #[test]
    fn theta_is_not_zero() {
        let f = canonicalize(&theta()).unwrap();
        assert!(!f.is_zero());
        // flipping one vertex of theta gives -theta; flipping both gives theta again
        let t = f.form().unwrap();
        let one = canonicalize(&theta().flip_vertex(0)).unwrap().form().unwrap();
        let both = canonicalize(&theta().flip_vertex(0).flip_vertex(1)).unwrap().form().unwrap();
        assert_eq!(one.key, t.key);
        assert_eq!(one.sign, -t.sign);
        assert_eq!(both.sign, t.sign);
    }

    #[test]
    fn tadpole_is_zero() {
        let mut b = Diagram::builder();
        let v = b.vertex();
        let l = b.leg(Color::plain("x"));
        b.edge(v[0], v[1]).edge(v[2], l);
        assert!(canonicalize(&b.build().unwrap()).unwrap().is_zero());
    }

    #[test]
    fn representative_is_fixed_point() {
        for d in [theta(), strut(Color::plain("x"), Color::plain("y")), Diagram::circles_only(2)] {
            let f = canonicalize(&d).unwrap().form().unwrap();
            let g = canonicalize(&f.representative).unwrap().form().unwrap();
            assert_eq!(g.key, f.key);
            assert_eq!(g.sign, 1);
            assert_eq!(g.representative, f.representative);
        }
    }

    #[test]
    fn budget() {
        let d = theta();
        assert_eq!(
            canonicalize_with_budget(&d, 1),
            Err(Error::VertexBudget { vertices: 2, budget: 1 })
        );
    }

    #[test]
    fn circles_distinguish_keys() {
        let a = canonicalize(&Diagram::circles_only(1)).unwrap().form().unwrap();
        let b = canonicalize(&Diagram::circles_only(2)).unwrap().form().unwrap();
        assert_ne!(a.key, b.key);
    }
}
