//! Map constructors: named small examples, lattices, random rotation systems
//! and random planar straight-line graphs.

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{angle_cmp, CombMap, Point, VarTable, Weight};
use crate::error::Result;

/// Builds a map from an edge list; `order[v]` lists the (edge, end) pairs at
/// `v` counterclockwise, with `end` 0 for the first endpoint.
fn from_ends(order: Vec<Vec<(usize, usize)>>, weights: Vec<Weight>, vars: VarTable) -> Result<CombMap> {
    let rot = order.into_iter().map(|r| r.into_iter().map(|(e, end)| 2 * e + end).collect()).collect();
    CombMap::new(rot, weights, vars)
}

/// One variable `x1, x2, …` per edge.
pub fn edge_variables(n_edges: usize) -> (Vec<Weight>, VarTable) {
    let mut vars = VarTable::new();
    let w = (0..n_edges).map(|k| Weight::Var(vars.intern(&format!("x{}", k + 1)))).collect();
    (w, vars)
}

/// A single variable shared by every edge.
pub fn shared_variable(n_edges: usize, name: &str) -> (Vec<Weight>, VarTable) {
    let mut vars = VarTable::new();
    let v = vars.intern(name);
    (vec![Weight::Var(v); n_edges], vars)
}

/// One vertex with two loops. Planar: rotation `(h1, h1', h2, h2')`;
/// torus: `(h1, h2, h1', h2')`.
pub fn figure_eight(torus: bool) -> CombMap {
    let rot = if torus { vec![vec![0, 2, 1, 3]] } else { vec![vec![0, 1, 2, 3]] };
    let (w, vars) = edge_variables(2);
    CombMap::new(rot, w, vars).expect("figure-eight is a valid map")
}

/// One vertex with loops in the given rotation (half-edge ids).
pub fn bouquet(rotation: Vec<usize>) -> Result<CombMap> {
    let (w, vars) = edge_variables(rotation.len() / 2);
    CombMap::new(vec![rotation], w, vars)
}

/// The genus-2 bouquet with rotation `(a, b, a', b', c, d, c', d')`.
pub fn genus_two_bouquet() -> CombMap {
    bouquet(vec![0, 2, 1, 3, 4, 6, 5, 7]).expect("valid bouquet")
}

/// Planar `K4` with every edge weighted by the same variable `x`.
pub fn k4_planar() -> CombMap {
    let pts = [(0, 0), (4, 0), (2, 4), (2, 1)];
    let edges = [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)];
    let m = planar_from_points(&pts, &edges).expect("K4 is planar");
    let (w, vars) = shared_variable(6, "x");
    m.with_weights(w, vars).expect("same edge count")
}

pub fn triangle() -> CombMap {
    let order = vec![vec![(0, 0), (2, 1)], vec![(1, 0), (0, 1)], vec![(2, 0), (1, 1)]];
    let (w, vars) = edge_variables(3);
    from_ends(order, w, vars).expect("triangle")
}

/// Path with `n` vertices.
pub fn path(n: usize) -> CombMap {
    let ne = n.saturating_sub(1);
    let order = (0..n)
        .map(|v| {
            let mut r = Vec::new();
            if v > 0 {
                r.push((v - 1, 1));
            }
            if v + 1 < n {
                r.push((v, 0));
            }
            r
        })
        .collect();
    let (w, vars) = edge_variables(ne);
    from_ends(order, w, vars).expect("path")
}

/// A small tree: a star with three leaves plus a pendant edge.
pub fn small_tree() -> CombMap {
    // edges 0:(0,1) 1:(0,2) 2:(0,3) 3:(3,4)
    let order = vec![vec![(0, 0), (1, 0), (2, 0)], vec![(0, 1)], vec![(1, 1)], vec![(2, 1), (3, 0)], vec![(3, 1)]];
    let (w, vars) = edge_variables(4);
    from_ends(order, w, vars).expect("tree")
}

/// Row visiting order `0, n−1, 1, n−2, …`, which keeps torus neighbours close
/// in vertex numbering.
fn folded_rows(n: usize) -> Vec<usize> {
    let mut order = Vec::with_capacity(n);
    let (mut lo, mut hi) = (0usize, n);
    while lo < hi {
        order.push(lo);
        lo += 1;
        if lo < hi {
            hi -= 1;
            order.push(hi);
        }
    }
    order
}

/// The `n × n` square lattice on the torus, every edge weighted by `x`.
///
/// Vertex ids follow [`folded_rows`], so every edge joins vertices whose ids
/// differ by less than `3n`.
pub fn torus_lattice(n: usize) -> CombMap {
    assert!(n >= 1);
    let rows = folded_rows(n);
    let mut row_slot = vec![0; n];
    for (slot, &r) in rows.iter().enumerate() {
        row_slot[r] = slot;
    }
    let id = |r: usize, c: usize| row_slot[r % n] * n + c % n;
    let nv = n * n;
    // per vertex: [east, north, west, south] as (edge, end)
    let mut slots = vec![[(0usize, 0usize); 4]; nv];
    let mut ne = 0;
    for &r in &rows {
        for c in 0..n {
            let v = id(r, c);
            let east = ne;
            let north = ne + 1;
            ne += 2;
            slots[v][0] = (east, 0);
            slots[id(r, c + 1)][2] = (east, 1);
            slots[v][1] = (north, 0);
            slots[id(r + 1, c)][3] = (north, 1);
        }
    }
    let order = slots.into_iter().map(|s| s.to_vec()).collect();
    let (w, vars) = shared_variable(ne, "x");
    from_ends(order, w, vars).expect("torus lattice")
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

/// Builds a planar straight-line map from integer points and an edge list.
pub fn planar_from_points(points: &[(i64, i64)], edges: &[(usize, usize)]) -> Result<CombMap> {
    let coords: Vec<Point> = points.iter().map(|&(x, y)| (rat(x), rat(y))).collect();
    let mut at: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    for (k, &(u, v)) in edges.iter().enumerate() {
        at[u].push(2 * k);
        at[v].push(2 * k + 1);
    }
    let ends = |h: usize| {
        let (u, v) = edges[h / 2];
        if h % 2 == 0 {
            (u, v)
        } else {
            (v, u)
        }
    };
    for rot in at.iter_mut() {
        rot.sort_by(|&a, &b| {
            let dir = |h: usize| {
                let (s, t) = ends(h);
                (&coords[t].0 - &coords[s].0, &coords[t].1 - &coords[s].1)
            };
            angle_cmp(&dir(a), &dir(b))
        });
    }
    let (w, vars) = edge_variables(edges.len());
    CombMap::new(at, w, vars)?.with_coords(coords)
}

/// The `r × c` square grid in the plane with unit spacing.
pub fn planar_grid(r: usize, c: usize) -> CombMap {
    let pts: Vec<(i64, i64)> = (0..r).flat_map(|i| (0..c).map(move |j| (j as i64, i as i64))).collect();
    let id = |i: usize, j: usize| i * c + j;
    let mut edges = Vec::new();
    for i in 0..r {
        for j in 0..c {
            if j + 1 < c {
                edges.push((id(i, j), id(i, j + 1)));
            }
            if i + 1 < r {
                edges.push((id(i, j), id(i + 1, j)));
            }
        }
    }
    planar_from_points(&pts, &edges).expect("grid is planar")
}

fn orient(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> i64 {
    ((b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)).signum()
}

fn on_segment(a: (i64, i64), b: (i64, i64), p: (i64, i64)) -> bool {
    orient(a, b, p) == 0 && p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

/// Segments meet anywhere other than a shared endpoint.
fn segments_conflict(a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)) -> bool {
    let shared = [a, b].iter().filter(|p| **p == c || **p == d).count();
    if shared == 2 {
        return true;
    }
    if shared == 1 {
        // collinear overlap beyond the shared endpoint
        let (o, p, q) = if a == c || a == d {
            (a, b, if a == c { d } else { c })
        } else {
            (b, a, if b == c { d } else { c })
        };
        return orient(o, p, q) == 0 && ((p.0 - o.0) * (q.0 - o.0) + (p.1 - o.1) * (q.1 - o.1)) > 0;
    }
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    if o1 != o2 && o3 != o4 && o1 * o2 <= 0 && o3 * o4 <= 0 {
        return true;
    }
    on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b)
}

/// Random planar straight-line graph on `nv` distinct integer points with up
/// to `max_edges` non-crossing edges.
pub fn random_planar<R: Rng>(rng: &mut R, nv: usize, max_edges: usize) -> CombMap {
    let side = (4 * nv) as i64;
    let mut pts: Vec<(i64, i64)> = Vec::with_capacity(nv);
    while pts.len() < nv {
        let p = (rng.gen_range(0..side), rng.gen_range(0..side));
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    let mut cand: Vec<(usize, usize)> = (0..nv).flat_map(|i| (i + 1..nv).map(move |j| (i, j))).collect();
    cand.shuffle(rng);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (u, v) in cand {
        if edges.len() == max_edges {
            break;
        }
        let through_vertex = (0..nv).any(|w| w != u && w != v && on_segment(pts[u], pts[v], pts[w]));
        let crosses = edges.iter().any(|&(a, b)| segments_conflict(pts[u], pts[v], pts[a], pts[b]));
        if !through_vertex && !crosses {
            edges.push((u, v));
        }
    }
    planar_from_points(&pts, &edges).expect("non-crossing straight-line graph")
}

/// Random connected rotation system with `nv` vertices and `ne ≥ nv − 1`
/// edges (loops and multi-edges allowed), one variable per edge.
pub fn random_rotation_map<R: Rng>(rng: &mut R, nv: usize, ne: usize) -> CombMap {
    assert!(nv >= 1 && ne + 1 >= nv);
    let mut ends = Vec::with_capacity(ne);
    for v in 1..nv {
        ends.push((rng.gen_range(0..v), v));
    }
    while ends.len() < ne {
        ends.push((rng.gen_range(0..nv), rng.gen_range(0..nv)));
    }
    ends.shuffle(rng);
    let mut at: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (k, &(u, v)) in ends.iter().enumerate() {
        at[u].push(2 * k);
        at[v].push(2 * k + 1);
    }
    for rot in at.iter_mut() {
        rot.shuffle(rng);
    }
    let (w, vars) = edge_variables(ne);
    CombMap::new(at, w, vars).expect("random rotations always give a valid map")
}

/// Seeded corpus of random rotation maps with at most `max_edges` edges.
/// `quota[g]` maps of genus `g` are produced, in a fixed order.
pub fn random_corpus<R: Rng>(rng: &mut R, quota: &[usize], max_edges: usize) -> Vec<CombMap> {
    let mut out = Vec::new();
    for (g, &want) in quota.iter().enumerate() {
        let mut got = 0;
        let min_edges = (2 * g).max(1);
        while got < want {
            let ne = rng.gen_range(min_edges..=max_edges);
            let nv = rng.gen_range(1..=(ne + 1 - 2 * g).clamp(1, 5));
            let m = random_rotation_map(rng, nv, ne);
            if m.genus() == g {
                out.push(m);
                got += 1;
            }
        }
    }
    out
}
