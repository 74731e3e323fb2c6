//! Cycle space, mod-2 homology and intersection numbers of an embedded graph.

use std::collections::{HashMap, HashSet, VecDeque};

use super::CombMap;
use crate::error::{invariant, precondition, Result};
use crate::exactalg::{gf2_rank, gf2_solve_one, EchelonBasis, Gf2Vec};

/// A GF(2) chain over the edges of a map.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chain2(pub Gf2Vec);

impl Chain2 {
    pub fn zeros(n_edges: usize) -> Self {
        Chain2(Gf2Vec::zeros(n_edges))
    }

    pub fn from_edges(n_edges: usize, edges: impl IntoIterator<Item = usize>) -> Self {
        Chain2(Gf2Vec::from_indices(n_edges, edges))
    }

    pub fn contains(&self, e: usize) -> bool {
        self.0.get(e)
    }

    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn size(&self) -> usize {
        self.0.count_ones()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn xor(&self, o: &Chain2) -> Chain2 {
        Chain2(self.0.xor(&o.0))
    }

    pub fn xor_assign(&mut self, o: &Chain2) {
        self.0.xor_assign(&o.0);
    }

    pub fn flip(&mut self, e: usize) {
        self.0.flip(e);
    }

    /// Every vertex meets the chain an even number of times (loops count twice).
    pub fn is_even(&self, map: &CombMap) -> bool {
        let mut parity = vec![false; map.n_vertices()];
        for e in self.edges() {
            let (u, v) = map.endpoints(e);
            parity[u] ^= true;
            parity[v] ^= true;
        }
        parity.iter().all(|&p| !p)
    }
}

/// A vertex-simple closed walk, stored as its outgoing half-edges in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleWalk {
    pub halfedges: Vec<usize>,
}

impl CycleWalk {
    pub fn len(&self) -> usize {
        self.halfedges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.halfedges.is_empty()
    }

    /// Incoming half-edge at the vertex where step `t` starts.
    pub fn incoming(&self, t: usize) -> usize {
        let k = self.halfedges.len();
        self.halfedges[(t + k - 1) % k] ^ 1
    }

    pub fn chain(&self, n_edges: usize) -> Chain2 {
        Chain2::from_edges(n_edges, self.halfedges.iter().map(|&h| h >> 1))
    }
}

/// Walks a vertex-simple cycle starting along the lower half-edge of its
/// smallest edge.
pub fn cycle_walk(map: &CombMap, cycle: &Chain2) -> Result<CycleWalk> {
    let Some(first) = cycle.0.first_one() else {
        return Err(precondition("cannot walk an empty cycle"));
    };
    let mut at_vertex: HashMap<usize, Vec<usize>> = HashMap::new();
    for e in cycle.edges() {
        let (a, b) = CombMap::halves(e);
        at_vertex.entry(map.vertex(a)).or_default().push(a);
        at_vertex.entry(map.vertex(b)).or_default().push(b);
    }
    if at_vertex.values().any(|hs| hs.len() != 2) {
        return Err(precondition("cycle is not vertex-simple"));
    }
    let start = 2 * first;
    let mut walk = vec![start];
    let mut h = start;
    loop {
        let arrive = h ^ 1;
        let hs = &at_vertex[&map.vertex(arrive)];
        let out = if hs[0] == arrive { hs[1] } else { hs[0] };
        if out == start {
            break;
        }
        walk.push(out);
        h = out;
        if walk.len() > cycle.size() {
            return Err(precondition("cycle is not vertex-simple"));
        }
    }
    if walk.len() != cycle.size() {
        return Err(precondition("cycle is not connected"));
    }
    Ok(CycleWalk { halfedges: walk })
}

/// Mod-2 intersection number of two vertex-simple cycles, which may share
/// edges.
///
/// Each maximal stretch where `d` touches `c` is pushed off `c`: it is a
/// crossing exactly when `d` arrives and leaves on different sides of `c`.
/// The left side of `c` at a vertex is the open counterclockwise interval
/// from its outgoing to its incoming half-edge.
pub fn intersection_number(map: &CombMap, c: &CycleWalk, d: &CycleWalk) -> bool {
    let mut c_at: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut c_edges: HashSet<usize> = HashSet::new();
    for (t, &h) in c.halfedges.iter().enumerate() {
        c_at.insert(map.vertex(h), (h, c.incoming(t)));
        c_edges.insert(h >> 1);
    }
    let m = d.len();
    let on_c = |h: usize| c_edges.contains(&(h >> 1));
    let Some(t0) = (0..m).find(|&t| !on_c(d.halfedges[(t + m - 1) % m])) else {
        return false;
    };
    let left = |h: usize| -> bool {
        let (out, inc) = c_at[&map.vertex(h)];
        map.in_ccw_interval(out, inc, h)
    };
    let mut parity = false;
    let mut j = 0;
    while j < m {
        let t = (t0 + j) % m;
        let v = map.vertex(d.halfedges[t]);
        if !c_at.contains_key(&v) {
            j += 1;
            continue;
        }
        let entry = left(d.incoming(t));
        let mut s = t;
        while on_c(d.halfedges[s]) {
            j += 1;
            s = (s + 1) % m;
        }
        let exit = left(d.halfedges[s]);
        parity ^= entry != exit;
        j += 1;
    }
    parity
}

/// Interleaving parity of two edge-disjoint vertex-simple cycles.
pub fn intersect_mod2(map: &CombMap, c: &Chain2, d: &Chain2) -> Result<bool> {
    if !c.0.and(&d.0).is_zero() {
        return Err(precondition("intersect_mod2 needs cycles without common edges"));
    }
    if c.is_zero() || d.is_zero() {
        return Ok(false);
    }
    let (cw, dw) = (cycle_walk(map, c)?, cycle_walk(map, d)?);
    Ok(intersection_number(map, &cw, &dw))
}

/// Splits an even subgraph into edge-disjoint vertex-simple cycles.
///
/// The walk always continues along the smallest unused edge and cuts a cycle
/// off as soon as it revisits a vertex on the current path.
pub fn cycle_decompose(map: &CombMap, even: &Chain2) -> Result<Vec<Chain2>> {
    if !even.is_even(map) {
        return Err(precondition("cycle_decompose needs an even subgraph"));
    }
    let ne = map.n_edges();
    let mut incident: HashMap<usize, Vec<usize>> = HashMap::new();
    for e in even.edges() {
        let (a, b) = CombMap::halves(e);
        incident.entry(map.vertex(a)).or_default().push(a);
        incident.entry(map.vertex(b)).or_default().push(b);
    }
    for hs in incident.values_mut() {
        hs.sort_unstable();
    }
    let mut used = vec![false; ne];
    let mut out = Vec::new();
    for e0 in even.edges() {
        if used[e0] {
            continue;
        }
        let start = map.vertex(2 * e0);
        let mut path_vertices = vec![start];
        let mut path_edges: Vec<usize> = Vec::new();
        let mut on_path: HashMap<usize, usize> = HashMap::from([(start, 0)]);
        let mut step = Some(2 * e0);
        while let Some(h) = step {
            used[h >> 1] = true;
            path_edges.push(h >> 1);
            let w = map.vertex(h ^ 1);
            if let Some(&k) = on_path.get(&w) {
                let cyc: Vec<usize> = path_edges.drain(k..).collect();
                for v in path_vertices.drain(k + 1..) {
                    on_path.remove(&v);
                }
                out.push(Chain2::from_edges(ne, cyc));
            } else {
                on_path.insert(w, path_vertices.len());
                path_vertices.push(w);
            }
            if path_edges.is_empty() {
                break;
            }
            let cur = *path_vertices.last().expect("path is nonempty");
            step = incident[&cur].iter().copied().find(|&g| !used[g >> 1]);
            if step.is_none() {
                return Err(invariant("walk stuck at a vertex of an even subgraph"));
            }
        }
    }
    Ok(out)
}

/// Spanning forest (smallest edge ids first) with parent pointers.
struct Forest {
    in_tree: Vec<bool>,
    parent_half: Vec<Option<usize>>,
    depth: Vec<usize>,
}

impl Forest {
    fn new(map: &CombMap) -> Self {
        let nv = map.n_vertices();
        let mut uf: Vec<usize> = (0..nv).collect();
        let mut in_tree = vec![false; map.n_edges()];
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for e in 0..map.n_edges() {
            let (u, v) = map.endpoints(e);
            let (ru, rv) = (super::find(&mut uf, u), super::find(&mut uf, v));
            if ru != rv {
                uf[ru.max(rv)] = ru.min(rv);
                in_tree[e] = true;
                adj[u].push(2 * e);
                adj[v].push(2 * e + 1);
            }
        }
        let mut parent_half = vec![None; nv];
        let mut depth = vec![0; nv];
        let mut seen = vec![false; nv];
        for root in 0..nv {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut q = VecDeque::from([root]);
            while let Some(u) = q.pop_front() {
                for &h in &adj[u] {
                    let w = map.vertex(h ^ 1);
                    if !seen[w] {
                        seen[w] = true;
                        // half-edge at w pointing to its parent
                        parent_half[w] = Some(h ^ 1);
                        depth[w] = depth[u] + 1;
                        q.push_back(w);
                    }
                }
            }
        }
        Forest { in_tree, parent_half, depth }
    }

    fn path_edges(&self, map: &CombMap, mut u: usize, mut v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while u != v {
            if self.depth[u] >= self.depth[v] {
                let h = self.parent_half[u].expect("non-root has a parent");
                out.push(h >> 1);
                u = map.vertex(h ^ 1);
            } else {
                let h = self.parent_half[v].expect("non-root has a parent");
                out.push(h >> 1);
                v = map.vertex(h ^ 1);
            }
        }
        out
    }
}

/// Fundamental cycles of the smallest-id spanning forest, in edge order.
pub fn fundamental_cycles(map: &CombMap) -> Vec<Chain2> {
    let forest = Forest::new(map);
    let ne = map.n_edges();
    (0..ne)
        .filter(|&e| !forest.in_tree[e])
        .map(|e| {
            let (u, v) = map.endpoints(e);
            let mut c = Chain2::from_edges(ne, forest.path_edges(map, u, v));
            c.flip(e);
            c
        })
        .collect()
}

/// Boundary chain of each face (edges traversed an odd number of times).
pub fn face_chains(map: &CombMap) -> Vec<Chain2> {
    map.faces()
        .iter()
        .map(|f| Chain2::from_edges(map.n_edges(), f.iter().map(|&h| h >> 1)))
        .collect()
}

#[derive(Clone, Debug)]
pub struct HomologyBasis {
    pub basis: Vec<Chain2>,
    pub face_space: Vec<Chain2>,
    /// `cocycles[i]` vanishes on face boundaries and is dual to `basis`.
    cocycles: Vec<Gf2Vec>,
    pub intersection: Vec<Vec<bool>>,
    endpoints: Vec<(usize, usize)>,
    n_vertices: usize,
}

impl HomologyBasis {
    /// Uses the given cycles as basis; they must be vertex-simple and span
    /// homology modulo the face boundaries.
    pub fn from_cycles(map: &CombMap, basis: Vec<Chain2>) -> Result<Self> {
        let ne = map.n_edges();
        let face_space = face_chains(map);
        let mut ech = EchelonBasis::new();
        for f in &face_space {
            ech.insert(&f.0);
        }
        for b in &basis {
            if !b.is_even(map) || !ech.insert(&b.0) {
                return Err(precondition("homology basis cycles must be independent modulo faces"));
            }
        }
        if basis.len() != 2 * map.genus() {
            return Err(precondition(format!(
                "expected {} basis cycles, got {}",
                2 * map.genus(),
                basis.len()
            )));
        }
        let rows: Vec<Gf2Vec> = face_space.iter().chain(&basis).map(|c| c.0.clone()).collect();
        let nf = face_space.len();
        let mut cocycles = Vec::with_capacity(basis.len());
        for i in 0..basis.len() {
            let rhs = Gf2Vec::from_indices(rows.len(), [nf + i]);
            let w = gf2_solve_one(&rows, &rhs, ne).ok_or_else(|| invariant("no dual cocycle for basis cycle"))?;
            cocycles.push(w);
        }
        let walks: Vec<CycleWalk> = basis.iter().map(|b| cycle_walk(map, b)).collect::<Result<_>>()?;
        let n = basis.len();
        let mut intersection = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    intersection[i][j] = intersection_number(map, &walks[i], &walks[j]);
                }
            }
        }
        let hb = HomologyBasis {
            basis,
            face_space,
            cocycles,
            intersection,
            endpoints: (0..ne).map(|e| map.endpoints(e)).collect(),
            n_vertices: map.n_vertices(),
        };
        hb.check_intersection()?;
        Ok(hb)
    }

    fn check_intersection(&self) -> Result<()> {
        let n = self.basis.len();
        for i in 0..n {
            for j in 0..n {
                if self.intersection[i][j] != self.intersection[j][i] {
                    return Err(invariant(format!("intersection form not symmetric at ({i},{j})")));
                }
            }
        }
        let rows: Vec<Gf2Vec> = self.intersection.iter().map(|r| Gf2Vec::from_bools(r)).collect();
        if gf2_rank(&rows) != n {
            return Err(invariant("intersection form is degenerate"));
        }
        Ok(())
    }

    /// Number of basis classes, `2g`.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Class coordinates of a cycle (no evenness check).
    pub fn coords_unchecked(&self, cycle: &Chain2) -> Vec<bool> {
        self.cocycles.iter().map(|w| w.dot(&cycle.0)).collect()
    }

    /// Cocycles dual to the basis and vanishing on every face boundary.
    pub fn cocycles(&self) -> &[Gf2Vec] {
        &self.cocycles
    }

    pub fn coords_of_mask(&self, mask: usize) -> Vec<bool> {
        (0..self.rank()).map(|i| mask >> i & 1 == 1).collect()
    }

    /// The chain `Σ coords_i · basis_i`.
    pub fn combination(&self, coords: &[bool]) -> Chain2 {
        let mut c = Chain2::zeros(self.endpoints.len());
        for (b, &on) in self.basis.iter().zip(coords) {
            if on {
                c.xor_assign(b);
            }
        }
        c
    }

    /// The intersection pairing `a · b`.
    pub fn pairing(&self, a: &[bool], b: &[bool]) -> bool {
        let mut acc = false;
        for (i, &ai) in a.iter().enumerate() {
            if !ai {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                acc ^= bj && self.intersection[i][j];
            }
        }
        acc
    }

    fn is_even(&self, c: &Chain2) -> bool {
        let mut parity = vec![false; self.n_vertices];
        for e in c.edges() {
            let (u, v) = self.endpoints[e];
            parity[u] ^= true;
            parity[v] ^= true;
        }
        parity.iter().all(|&p| !p)
    }
}

/// Deterministic basis: fundamental cycles greedily kept when independent of
/// the face boundaries and earlier choices.
pub fn homology_basis(map: &CombMap) -> Result<HomologyBasis> {
    let target = 2 * map.genus();
    let mut ech = EchelonBasis::new();
    for f in face_chains(map) {
        ech.insert(&f.0);
    }
    let mut basis = Vec::with_capacity(target);
    for c in fundamental_cycles(map) {
        if basis.len() == target {
            break;
        }
        if ech.insert(&c.0) {
            basis.push(c);
        }
    }
    if basis.len() != target {
        return Err(invariant(format!("found {} independent cycles, expected {target}", basis.len())));
    }
    HomologyBasis::from_cycles(map, basis)
}

/// Coordinates of the class of an even subgraph in the basis.
pub fn homology_class(basis: &HomologyBasis, cycle: &Chain2) -> Result<Vec<bool>> {
    if !basis.is_even(cycle) {
        return Err(precondition("homology_class needs an even subgraph"));
    }
    Ok(basis.coords_unchecked(cycle))
}
