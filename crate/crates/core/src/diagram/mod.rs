//! Uni-trivalent diagrams: legs carry colors, trivalent vertices carry a cyclic order
//! of their three half-edges, and vertex-free loops are kept as a bare counter.

mod canon;
mod color;
mod json;
mod sum;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;

pub use canon::{canonicalize, canonicalize_with_budget, vertex_budget, Canonical, CanonicalForm, CanonicalKey};
pub use color::{Color, Flavor};
pub use json::{DiagramJson, LegJson, SumJson, TermJson, VertexJson};
pub use sum::{DiagramSum, Term, Truncation};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leg {
    pub he: usize,
    pub color: Color,
}

/// Where a half-edge lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Owner {
    Leg(usize),
    Vertex(usize, u8),
}

/// A validated uni-trivalent diagram. Half-edges are numbered `0..half_edge_count()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    legs: Vec<Leg>,
    vertices: Vec<[usize; 3]>,
    partner: Vec<usize>,
    owner: Vec<Owner>,
    circles: u32,
}

/// Degree and leg census of a diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grade {
    /// Total vertex count, i.e. twice the degree.
    pub twice_degree: u32,
    pub census: BTreeMap<Color, u32>,
    pub trivalent: u32,
    pub circles: u32,
}

impl Grade {
    /// The degree, when it is an integer.
    pub fn degree(&self) -> Option<u32> {
        self.twice_degree.is_multiple_of(2).then_some(self.twice_degree / 2)
    }

    pub fn legs_of(&self, c: &Color) -> u32 {
        self.census.get(c).copied().unwrap_or(0)
    }

    pub fn max_legs(&self) -> u32 {
        self.census.values().copied().max().unwrap_or(0)
    }
}

impl Diagram {
    /// The empty diagram, the unit of disjoint union.
    pub fn empty() -> Self {
        Self::circles_only(0)
    }

    pub fn circles_only(n: u32) -> Self {
        Self { legs: vec![], vertices: vec![], partner: vec![], owner: vec![], circles: n }
    }

    /// Builds a diagram from arbitrary half-edge labels, checking every structural invariant.
    pub fn validate<L>(
        legs: &[(L, Color)],
        vertices: &[Vec<L>],
        edges: &[(L, L)],
        circles: i64,
    ) -> Result<Self>
    where
        L: Eq + Hash + Clone + fmt::Display,
    {
        if circles < 0 {
            return Err(Error::NegativeCircles(circles));
        }
        let mut ids: HashMap<L, usize> = HashMap::new();
        let mut owner = Vec::new();
        let mut claim = |label: &L, who: Owner, owner: &mut Vec<Owner>| -> Result<usize> {
            if ids.contains_key(label) {
                return Err(Error::HalfEdgeReused(label.to_string()));
            }
            let id = owner.len();
            ids.insert(label.clone(), id);
            owner.push(who);
            Ok(id)
        };
        let mut out_legs = Vec::with_capacity(legs.len());
        for (i, (label, color)) in legs.iter().enumerate() {
            if color.base.is_empty() {
                return Err(Error::EmptyColor);
            }
            let he = claim(label, Owner::Leg(i), &mut owner)?;
            out_legs.push(Leg { he, color: color.clone() });
        }
        let mut out_vertices = Vec::with_capacity(vertices.len());
        for (i, cyc) in vertices.iter().enumerate() {
            if cyc.len() != 3 {
                return Err(Error::BadValency { index: i, valency: cyc.len() });
            }
            let mut hs = [0usize; 3];
            for (k, label) in cyc.iter().enumerate() {
                hs[k] = claim(label, Owner::Vertex(i, k as u8), &mut owner)?;
            }
            out_vertices.push(hs);
        }
        let mut partner = vec![usize::MAX; owner.len()];
        for (a, b) in edges {
            let ia = *ids.get(a).ok_or_else(|| Error::UnknownHalfEdge(a.to_string()))?;
            let ib = *ids.get(b).ok_or_else(|| Error::UnknownHalfEdge(b.to_string()))?;
            if ia == ib {
                return Err(Error::SelfEdge(a.to_string()));
            }
            if partner[ia] != usize::MAX {
                return Err(Error::HalfEdgeReused(a.to_string()));
            }
            if partner[ib] != usize::MAX {
                return Err(Error::HalfEdgeReused(b.to_string()));
            }
            partner[ia] = ib;
            partner[ib] = ia;
        }
        if let Some(h) = partner.iter().position(|&p| p == usize::MAX) {
            let label = ids.iter().find(|(_, &v)| v == h).map(|(k, _)| k.to_string()).unwrap_or_default();
            return Err(Error::UnmatchedHalfEdge(label));
        }
        Ok(Self { legs: out_legs, vertices: out_vertices, partner, owner, circles: circles as u32 })
    }

    /// Internal constructor for already-consistent parts with compact half-edge ids.
    pub(crate) fn from_compact(legs: Vec<Leg>, vertices: Vec<[usize; 3]>, partner: Vec<usize>, circles: u32) -> Self {
        let mut owner = vec![Owner::Leg(usize::MAX); partner.len()];
        for (i, l) in legs.iter().enumerate() {
            owner[l.he] = Owner::Leg(i);
        }
        for (i, hs) in vertices.iter().enumerate() {
            for (k, &h) in hs.iter().enumerate() {
                owner[h] = Owner::Vertex(i, k as u8);
            }
        }
        debug_assert!(partner.iter().enumerate().all(|(h, &p)| p != h && partner[p] == h));
        Self { legs, vertices, partner, owner, circles }
    }

    pub fn builder() -> DiagramBuilder {
        DiagramBuilder::default()
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn vertices(&self) -> &[[usize; 3]] {
        &self.vertices
    }

    pub fn partner(&self, he: usize) -> usize {
        self.partner[he]
    }

    pub fn owner(&self, he: usize) -> Owner {
        self.owner[he]
    }

    pub fn circles(&self) -> u32 {
        self.circles
    }

    pub fn half_edge_count(&self) -> usize {
        self.partner.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.legs.len() + self.vertices.len()
    }

    /// Edges as `(a, b)` with `a < b`, ordered by `a`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.partner.len()).filter(|&h| h < self.partner[h]).map(|h| (h, self.partner[h])).collect()
    }

    pub fn grade(&self) -> Grade {
        let mut census = BTreeMap::new();
        for l in &self.legs {
            *census.entry(l.color.clone()).or_insert(0) += 1;
        }
        Grade {
            twice_degree: self.vertex_count() as u32,
            census,
            trivalent: self.vertices.len() as u32,
            circles: self.circles,
        }
    }

    pub fn with_circles(&self, circles: u32) -> Self {
        Self { circles, ..self.clone() }
    }

    /// Disjoint union; circles add.
    pub fn disjoint_union(&self, other: &Diagram) -> Diagram {
        let off = self.partner.len();
        let mut legs = self.legs.clone();
        legs.extend(other.legs.iter().map(|l| Leg { he: l.he + off, color: l.color.clone() }));
        let mut vertices = self.vertices.clone();
        vertices.extend(other.vertices.iter().map(|hs| hs.map(|h| h + off)));
        let mut partner = self.partner.clone();
        partner.extend(other.partner.iter().map(|p| p + off));
        Diagram::from_compact(legs, vertices, partner, self.circles + other.circles)
    }

    /// Recolors the legs for which `f` returns a new color.
    pub fn recolored(&self, mut f: impl FnMut(usize, &Color) -> Color) -> Diagram {
        let mut d = self.clone();
        for (i, l) in d.legs.iter_mut().enumerate() {
            l.color = f(i, &l.color);
        }
        d
    }

    /// Reverses the cyclic order at trivalent vertex `v`.
    pub fn flip_vertex(&self, v: usize) -> Diagram {
        let mut d = self.clone();
        d.vertices[v].swap(1, 2);
        Diagram::from_compact(d.legs, d.vertices, d.partner, d.circles)
    }

    /// Removes the listed pairs of legs (by leg index) and splices their edges together.
    ///
    /// A joined pair `(a, b)` deletes both legs and connects whatever was attached to
    /// them. Chains of joins are followed; chains that close up without meeting a
    /// surviving half-edge become circles.
    pub fn join_legs(&self, pairs: &[(usize, usize)]) -> Result<Diagram> {
        let h = self.partner.len();
        let mut glue = vec![usize::MAX; h];
        for &(a, b) in pairs {
            if a >= self.legs.len() || b >= self.legs.len() {
                return Err(Error::IncompleteAssignment(format!("leg index out of range in ({a}, {b})")));
            }
            let (ha, hb) = (self.legs[a].he, self.legs[b].he);
            if a == b || glue[ha] != usize::MAX || glue[hb] != usize::MAX {
                return Err(Error::IncompleteAssignment(format!("leg used twice in ({a}, {b})")));
            }
            glue[ha] = hb;
            glue[hb] = ha;
        }
        let removed = |x: usize| glue[x] != usize::MAX;

        let mut new_id = vec![usize::MAX; h];
        let mut next = 0;
        for (x, id) in new_id.iter_mut().enumerate() {
            if !removed(x) {
                *id = next;
                next += 1;
            }
        }
        let mut partner = vec![usize::MAX; next];
        let mut visited = vec![false; h];
        for x in 0..h {
            if removed(x) || partner[new_id[x]] != usize::MAX {
                continue;
            }
            let mut cur = self.partner[x];
            while removed(cur) {
                visited[cur] = true;
                let g = glue[cur];
                visited[g] = true;
                cur = self.partner[g];
            }
            partner[new_id[x]] = new_id[cur];
            partner[new_id[cur]] = new_id[x];
        }
        let mut circles = self.circles;
        for start in 0..h {
            if !removed(start) || visited[start] {
                continue;
            }
            circles += 1;
            let mut cur = start;
            loop {
                visited[cur] = true;
                let g = glue[cur];
                visited[g] = true;
                cur = self.partner[g];
                if cur == start {
                    break;
                }
            }
        }
        let legs = self
            .legs
            .iter()
            .filter(|l| !removed(l.he))
            .map(|l| Leg { he: new_id[l.he], color: l.color.clone() })
            .collect();
        let vertices = self.vertices.iter().map(|hs| hs.map(|x| new_id[x])).collect();
        Ok(Diagram::from_compact(legs, vertices, partner, circles))
    }

    /// Vertex index of a half-edge in the combined numbering: legs first, then trivalent vertices.
    pub(crate) fn vertex_of(&self, he: usize) -> usize {
        match self.owner[he] {
            Owner::Leg(i) => i,
            Owner::Vertex(v, _) => self.legs.len() + v,
        }
    }

    /// Connected components as lists of combined vertex indices (circles excluded).
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![s];
            comp[s] = id;
            let mut members = vec![];
            while let Some(v) = stack.pop() {
                members.push(v);
                for &he in self.half_edges_of(v) {
                    let w = self.vertex_of(self.partner[he]);
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub(crate) fn half_edges_of(&self, v: usize) -> &[usize] {
        if v < self.legs.len() {
            std::slice::from_ref(&self.legs[v].he)
        } else {
            &self.vertices[v - self.legs.len()]
        }
    }

    /// True when every vertex-bearing component contains a trivalent vertex and there are no circles.
    pub fn is_strutless(&self) -> bool {
        self.circles == 0
            && self.components().iter().all(|c| c.iter().any(|&v| v >= self.legs.len()))
    }

    /// Restriction to a set of combined vertex indices closed under adjacency.
    pub(crate) fn induced(&self, members: &[usize]) -> Diagram {
        let mut new_id = vec![usize::MAX; self.partner.len()];
        let mut next = 0;
        let mut legs = vec![];
        let mut vertices = vec![];
        for &v in members {
            for &he in self.half_edges_of(v) {
                new_id[he] = next;
                next += 1;
            }
        }
        for &v in members {
            if v < self.legs.len() {
                legs.push(Leg { he: new_id[self.legs[v].he], color: self.legs[v].color.clone() });
            } else {
                vertices.push(self.vertices[v - self.legs.len()].map(|h| new_id[h]));
            }
        }
        let mut partner = vec![0; next];
        for &v in members {
            for &he in self.half_edges_of(v) {
                partner[new_id[he]] = new_id[self.partner[he]];
            }
        }
        Diagram::from_compact(legs, vertices, partner, 0)
    }
}

/// Incremental construction with fresh half-edge ids.
#[derive(Default, Clone, Debug)]
pub struct DiagramBuilder {
    legs: Vec<(usize, Color)>,
    vertices: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    next: usize,
    circles: i64,
}

impl DiagramBuilder {
    /// Adds a leg and returns its half-edge.
    pub fn leg(&mut self, color: Color) -> usize {
        let h = self.next;
        self.next += 1;
        self.legs.push((h, color));
        h
    }

    /// Adds a trivalent vertex; the returned half-edges are in its cyclic order.
    pub fn vertex(&mut self) -> [usize; 3] {
        let hs = [self.next, self.next + 1, self.next + 2];
        self.next += 3;
        self.vertices.push(hs.to_vec());
        hs
    }

    pub fn edge(&mut self, a: usize, b: usize) -> &mut Self {
        self.edges.push((a, b));
        self
    }

    pub fn circles(&mut self, n: i64) -> &mut Self {
        self.circles = n;
        self
    }

    pub fn build(&self) -> Result<Diagram> {
        Diagram::validate(&self.legs, &self.vertices, &self.edges, self.circles)
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.grade();
        write!(f, "[v{} ", self.vertices.len())?;
        let legs: Vec<String> = g.census.iter().map(|(c, n)| format!("{c}^{n}")).collect();
        write!(f, "legs{{{}}}", legs.join(","))?;
        if self.circles > 0 {
            write!(f, " o^{}", self.circles)?;
        }
        write!(f, " e{:?}]", self.edges())
    }
}

/// A single edge between two legs.
pub fn strut(a: Color, b: Color) -> Diagram {
    let mut bld = Diagram::builder();
    let x = bld.leg(a);
    let y = bld.leg(b);
    bld.edge(x, y);
    bld.build().expect("strut is valid")
}
