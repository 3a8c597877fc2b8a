//! Shared corpus diagrams and independent oracles for the integration tests.
#![allow(dead_code)]

use jacobi::diagram::strut;
use jacobi::linalg::Rational;
use jacobi::{Color, Diagram, DiagramSum};

pub fn x() -> Color {
    Color::plain("x")
}

pub fn y() -> Color {
    Color::plain("y")
}

pub fn z() -> Color {
    Color::plain("z")
}

/// One trivalent vertex with three legs of the given colors, in cyclic order.
pub fn tripod(a: Color, b: Color, c: Color) -> Diagram {
    let mut bld = Diagram::builder();
    let v = bld.vertex();
    for (h, col) in v.into_iter().zip([a, b, c]) {
        let l = bld.leg(col);
        bld.edge(h, l);
    }
    bld.build().unwrap()
}

pub fn theta() -> Diagram {
    let mut b = Diagram::builder();
    let u = b.vertex();
    let v = b.vertex();
    for i in 0..3 {
        b.edge(u[i], v[i]);
    }
    b.build().unwrap()
}

/// Two trivalent vertices joined by a doubled edge, each carrying one `x`-leg.
pub fn doubled_edge() -> Diagram {
    let mut b = Diagram::builder();
    let u = b.vertex();
    let v = b.vertex();
    b.edge(u[1], v[1]);
    b.edge(u[2], v[2]);
    let l1 = b.leg(x());
    let l2 = b.leg(x());
    b.edge(u[0], l1);
    b.edge(v[0], l2);
    b.build().unwrap()
}

/// A cycle of trivalent vertices, each with one leg, colored in order around the cycle.
pub fn wheel(spokes: &[Color]) -> Diagram {
    let mut b = Diagram::builder();
    let vs: Vec<[usize; 3]> = spokes.iter().map(|_| b.vertex()).collect();
    let n = vs.len();
    for i in 0..n {
        b.edge(vs[i][2], vs[(i + 1) % n][1]);
        let l = b.leg(spokes[i].clone());
        b.edge(vs[i][0], l);
    }
    b.build().unwrap()
}

/// `θ` with its orientation as produced by joining the two legs of [`doubled_edge`].
pub fn closed_doubled_edge() -> Diagram {
    doubled_edge().join_legs(&[(0, 1)]).unwrap()
}

pub fn sum_of(terms: &[(Diagram, Rational)]) -> DiagramSum {
    let mut s = DiagramSum::new();
    for (d, c) in terms {
        s.add_diagram(d, c.clone()).unwrap();
    }
    s
}

pub fn struts(pairs: &[(Color, Color)]) -> Diagram {
    pairs.iter().fold(Diagram::empty(), |acc, (a, b)| acc.disjoint_union(&strut(a.clone(), b.clone())))
}

/// Searches for a color-preserving automorphism of `d` that reverses an odd number of cyclic
/// orders, by backtracking over vertex images and local half-edge arrangements.
pub fn has_odd_automorphism(d: &Diagram) -> bool {
    let nl = d.legs().len();
    let nv = nl + d.vertices().len();
    let half_edges = |v: usize| -> Vec<usize> {
        if v < nl {
            vec![d.legs()[v].he]
        } else {
            d.vertices()[v - nl].to_vec()
        }
    };
    let mut order: Vec<usize> = Vec::new();
    let mut seen = vec![false; nv];
    let vertex_of = |h: usize| -> usize {
        if let Some(i) = d.legs().iter().position(|l| l.he == h) {
            return i;
        }
        nl + d.vertices().iter().position(|hs| hs.contains(&h)).unwrap()
    };
    for s in 0..nv {
        if seen[s] {
            continue;
        }
        let mut queue = std::collections::VecDeque::from([s]);
        seen[s] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for h in half_edges(v) {
                let w = vertex_of(d.partner(h));
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let h = d.half_edge_count();
    let mut map = vec![usize::MAX; h];
    let mut used_v = vec![false; nv];
    let perms: [[usize; 3]; 6] = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 2, 1], [2, 1, 0], [1, 0, 2]];

    fn consistent(d: &Diagram, map: &[usize], hs: &[usize]) -> bool {
        hs.iter().all(|&a| {
            let p = d.partner(a);
            map[p] == usize::MAX || map[p] == d.partner(map[a])
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        d: &Diagram,
        k: usize,
        order: &[usize],
        nl: usize,
        map: &mut Vec<usize>,
        used_v: &mut Vec<bool>,
        perms: &[[usize; 3]; 6],
        odd: bool,
    ) -> bool {
        if k == order.len() {
            return odd;
        }
        let v = order[k];
        let nv = used_v.len();
        if v < nl {
            let src = d.legs()[v].he;
            for w in 0..nl {
                if used_v[w] || d.legs()[w].color != d.legs()[v].color {
                    continue;
                }
                map[src] = d.legs()[w].he;
                used_v[w] = true;
                if consistent(d, map, &[src]) && search(d, k + 1, order, nl, map, used_v, perms, odd) {
                    return true;
                }
                used_v[w] = false;
                map[src] = usize::MAX;
            }
        } else {
            let src = d.vertices()[v - nl];
            for w in nl..nv {
                if used_v[w] {
                    continue;
                }
                let dst = d.vertices()[w - nl];
                for (pi, p) in perms.iter().enumerate() {
                    for i in 0..3 {
                        map[src[i]] = dst[p[i]];
                    }
                    used_v[w] = true;
                    if consistent(d, map, &src) && search(d, k + 1, order, nl, map, used_v, perms, odd ^ (pi >= 3)) {
                        return true;
                    }
                    used_v[w] = false;
                    for i in 0..3 {
                        map[src[i]] = usize::MAX;
                    }
                }
            }
        }
        false
    }
    search(d, 0, &order, nl, &mut map, &mut used_v, &perms, false)
}

/// A sum of up to `terms` random diagrams with small nonzero rational coefficients.
pub fn random_sum(seed: u64, colors: &[Color], max_legs: usize, max_vertices: usize, terms: usize) -> DiagramSum {
    use rand::Rng;
    let mut r = jacobi::random::rng(seed);
    let mut s = DiagramSum::new();
    for _ in 0..terms {
        let d = jacobi::random::random_diagram(&mut r, colors, max_legs, max_vertices);
        let num: i64 = r.gen_range(1..=5) * if r.gen_bool(0.5) { 1 } else { -1 };
        s.add_diagram(&d, jacobi::linalg::ratio(num, r.gen_range(1..=3))).unwrap();
    }
    s
}
