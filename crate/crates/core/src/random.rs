//! Seeded random corpora: symmetric integer forms, random diagrams, and random re-encodings.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::diagram::{Color, Diagram, Leg};
use crate::linalg::{rat, QuadraticForm};

/// The generator used for every reproducible corpus.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Default color names `x, y, z, w, ...` for `n` colors.
pub fn color_names(n: usize) -> Vec<String> {
    const NAMES: [&str; 6] = ["x", "y", "z", "w", "u", "v"];
    (0..n).map(|i| NAMES.get(i).map(|s| s.to_string()).unwrap_or_else(|| format!("x{i}"))).collect()
}

/// A symmetric `n × n` integer form with entries drawn uniformly from `lo..=hi`.
pub fn random_symmetric(rng: &mut impl Rng, n: usize, lo: i64, hi: i64) -> QuadraticForm {
    let mut m = vec![vec![rat(0); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = rat(rng.gen_range(lo..=hi));
            m[i][j] = v.clone();
            m[j][i] = v;
        }
    }
    QuadraticForm::new(color_names(n), m).expect("symmetric by construction")
}

/// A random diagram with the given leg counts per color and `trivalent` trivalent vertices.
/// Returns `None` when the half-edge count is odd or no loop-free wiring turned up.
pub fn random_wiring(rng: &mut impl Rng, legs: &[(Color, usize)], trivalent: usize) -> Option<Diagram> {
    let leg_colors: Vec<Color> = legs.iter().flat_map(|(c, n)| std::iter::repeat_n(c.clone(), *n)).collect();
    let h = leg_colors.len() + 3 * trivalent;
    if h % 2 == 1 {
        return None;
    }
    let owner = |x: usize| if x < leg_colors.len() { None } else { Some((x - leg_colors.len()) / 3) };
    for _ in 0..64 {
        let mut order: Vec<usize> = (0..h).collect();
        order.shuffle(rng);
        let pairs: Vec<(usize, usize)> = order.chunks(2).map(|p| (p[0], p[1])).collect();
        if pairs.iter().any(|&(a, b)| owner(a).is_some() && owner(a) == owner(b)) {
            continue;
        }
        let mut partner = vec![0; h];
        for &(a, b) in &pairs {
            partner[a] = b;
            partner[b] = a;
        }
        let legs = leg_colors.iter().enumerate().map(|(i, c)| Leg { he: i, color: c.clone() }).collect();
        let base = leg_colors.len();
        let vertices = (0..trivalent).map(|v| [base + 3 * v, base + 3 * v + 1, base + 3 * v + 2]).collect();
        return Some(Diagram::from_compact(legs, vertices, partner, 0));
    }
    None
}

/// A random diagram over at most `max_colors` of `colors`, at most `max_legs` legs per color
/// and at most `max_vertices` vertices.
pub fn random_diagram(rng: &mut impl Rng, colors: &[Color], max_legs: usize, max_vertices: usize) -> Diagram {
    loop {
        let used = rng.gen_range(1..=colors.len());
        let mut legs = Vec::new();
        let mut total = 0;
        for c in &colors[..used] {
            let n = rng.gen_range(0..=max_legs.min(max_vertices - total));
            total += n;
            legs.push((c.clone(), n));
        }
        let room = max_vertices - total;
        let mut t = rng.gen_range(0..=room);
        if (total + 3 * t) % 2 == 1 {
            if t == 0 {
                continue;
            }
            t -= 1;
        }
        if total + t == 0 {
            continue;
        }
        if let Some(d) = random_wiring(rng, &legs, t) {
            return d;
        }
    }
}

/// The same diagram with shuffled half-edge ids, leg order, vertex order, and rotated (never
/// reflected) cyclic orders.
pub fn reencode(rng: &mut impl Rng, d: &Diagram) -> Diagram {
    let h = d.half_edge_count();
    let mut sigma: Vec<usize> = (0..h).collect();
    sigma.shuffle(rng);
    let mut legs: Vec<Leg> = d.legs().iter().map(|l| Leg { he: sigma[l.he], color: l.color.clone() }).collect();
    legs.shuffle(rng);
    let mut vertices: Vec<[usize; 3]> = d
        .vertices()
        .iter()
        .map(|hs| {
            let r = rng.gen_range(0..3);
            [sigma[hs[r]], sigma[hs[(r + 1) % 3]], sigma[hs[(r + 2) % 3]]]
        })
        .collect();
    vertices.shuffle(rng);
    let mut partner = vec![0; h];
    for x in 0..h {
        partner[sigma[x]] = sigma[d.partner(x)];
    }
    Diagram::from_compact(legs, vertices, partner, d.circles())
}
