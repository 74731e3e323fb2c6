//! The Fisher blow-up `G ↦ Γ_G`, its preferred matching and the bijection
//! between perfect matchings of `Γ_G` and even subgraphs of `G`.
//!
//! A vertex of degree `n` becomes outer vertices `a_1..a_n` (one per incident
//! half-edge) and inner vertices `b_1..b_n`, joined by an open chain of
//! triangles: `a_i b_i`, `a_i b_{i+1}` and `b_i b_{i+1}`.

use std::collections::HashMap;

use crate::combmap::{Chain2, CombMap, HomologyBasis, Weight};
use crate::error::{invariant, precondition, Result};
use crate::exactalg::{GPoly, GaussRat, MatchingGraph};
use crate::ising::chain_weight;

/// Role of an edge of `Γ_G`. Indices are 0-based positions in the cluster.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    /// The edge of `G` with the same id.
    External,
    /// `a_i b_i`, stored with its first half-edge at `a_i`.
    AB { vertex: usize, i: usize },
    /// `b_{i+1} a_i`, first half-edge at `b_{i+1}`.
    BA { vertex: usize, i: usize },
    /// `b_{i+1} b_i`, first half-edge at `b_{i+1}`.
    BB { vertex: usize, i: usize },
}

#[derive(Clone, Debug)]
pub struct Cluster {
    /// Half-edges of `G` at this vertex in cluster order: the smallest id
    /// first, then in rotation order.
    pub halfedges: Vec<usize>,
    /// Id of `a_1`; `a_i = base + 2i`, `b_i = base + 2i + 1` (0-based `i`).
    pub base: usize,
    /// First internal edge id; `AB(i) = first + i`, `BA(i) = first + n + i`,
    /// `BB(i) = first + 2n − 1 + i`.
    pub first_edge: usize,
}

impl Cluster {
    pub fn degree(&self) -> usize {
        self.halfedges.len()
    }

    pub fn a(&self, i: usize) -> usize {
        self.base + 2 * i
    }

    pub fn b(&self, i: usize) -> usize {
        self.base + 2 * i + 1
    }

    pub fn ab(&self, i: usize) -> usize {
        self.first_edge + i
    }

    pub fn ba(&self, i: usize) -> usize {
        self.first_edge + self.degree() + i
    }

    pub fn bb(&self, i: usize) -> usize {
        self.first_edge + 2 * self.degree() - 1 + i
    }
}

#[derive(Clone, Debug)]
pub struct FisherGraph {
    pub gamma: CombMap,
    pub clusters: Vec<Cluster>,
    pub kinds: Vec<EdgeKind>,
    /// Position of each half-edge of `G` within its cluster.
    pub slot: Vec<usize>,
    pub m0: Chain2,
    n_g_edges: usize,
    n_g_vertices: usize,
}

/// Blows up every vertex into its cluster.
pub fn blowup(g: &CombMap) -> FisherGraph {
    let ne = g.n_edges();
    let mut clusters = Vec::with_capacity(g.n_vertices());
    let mut slot = vec![0; g.n_half_edges()];
    let mut base = 0;
    let mut first_edge = ne;
    for v in 0..g.n_vertices() {
        let n = g.degree(v);
        let mut hs = Vec::with_capacity(n);
        if let Some(&h0) = g.rotation(v).iter().min() {
            let mut h = h0;
            for _ in 0..n {
                slot[h] = hs.len();
                hs.push(h);
                h = g.rot_next(h);
            }
        }
        clusters.push(Cluster { halfedges: hs, base, first_edge });
        base += 2 * n;
        first_edge += (3 * n).saturating_sub(2);
    }
    let n_gamma_edges = first_edge;
    let mut kinds = vec![EdgeKind::External; n_gamma_edges];
    let mut rot: Vec<Vec<usize>> = vec![Vec::new(); base];
    let first = |e: usize| 2 * e;
    let second = |e: usize| 2 * e + 1;
    for (v, c) in clusters.iter().enumerate() {
        let n = c.degree();
        for i in 0..n {
            kinds[c.ab(i)] = EdgeKind::AB { vertex: v, i };
            if i + 1 < n {
                kinds[c.ba(i)] = EdgeKind::BA { vertex: v, i };
                kinds[c.bb(i)] = EdgeKind::BB { vertex: v, i };
            }
        }
        for i in 0..n {
            let mut ra = vec![c.halfedges[i], first(c.ab(i))];
            if i + 1 < n {
                ra.push(second(c.ba(i)));
            }
            rot[c.a(i)] = ra;
            let mut rb = Vec::with_capacity(4);
            if i > 0 {
                rb.push(first(c.ba(i - 1)));
                rb.push(first(c.bb(i - 1)));
            }
            if i + 1 < n {
                rb.push(second(c.bb(i)));
            }
            rb.push(second(c.ab(i)));
            rot[c.b(i)] = rb;
        }
    }
    let mut weights: Vec<Weight> = g.weights().to_vec();
    weights.resize(n_gamma_edges, Weight::Const(GaussRat::from_int(1)));
    let gamma = CombMap::new(rot, weights, g.vars().clone()).expect("blow-up of a valid map is valid");
    let m0 = Chain2::from_edges(n_gamma_edges, clusters.iter().flat_map(|c| (0..c.degree()).map(|i| c.ab(i))));
    FisherGraph { gamma, clusters, kinds, slot, m0, n_g_edges: ne, n_g_vertices: g.n_vertices() }
}

impl FisherGraph {
    pub fn n_g_edges(&self) -> usize {
        self.n_g_edges
    }

    pub fn n_g_vertices(&self) -> usize {
        self.n_g_vertices
    }

    /// The outer vertex `a` attached to a half-edge of `G`.
    pub fn a_of(&self, g: &CombMap, h: usize) -> usize {
        self.clusters[g.vertex(h)].a(self.slot[h])
    }

    /// `φ(M)`: the external edges of a matching, as a chain of `G`.
    pub fn restrict(&self, m: &Chain2) -> Chain2 {
        Chain2::from_edges(self.n_g_edges, m.edges().filter(|&e| e < self.n_g_edges))
    }

    /// Path inside the cluster of `v` from `a_i` to `a_j` via the `b` chain.
    pub fn cluster_path(&self, v: usize, i: usize, j: usize) -> Vec<usize> {
        let c = &self.clusters[v];
        let mut p = vec![c.ab(i)];
        let (lo, hi) = (i.min(j), i.max(j));
        p.extend((lo..hi).map(|k| c.bb(k)));
        p.push(c.ab(j));
        p
    }

    /// Lifts a vertex-simple cycle of `G` to a vertex-simple cycle of `Γ_G`.
    pub fn lift_cycle(&self, g: &CombMap, cycle: &Chain2) -> Result<Chain2> {
        let walk = crate::combmap::cycle_walk(g, cycle)?;
        let mut out = Chain2::zeros(self.gamma.n_edges());
        for (t, &h) in walk.halfedges.iter().enumerate() {
            let hin = walk.incoming(t);
            for e in self.cluster_path(g.vertex(h), self.slot[hin], self.slot[h]) {
                out.flip(e);
            }
            out.flip(h >> 1);
        }
        Ok(out)
    }

    /// Homology basis of `Γ_G` made of the lifts of `G`'s basis cycles, so
    /// class coordinates agree on both sides.
    pub fn lifted_basis(&self, g: &CombMap, basis: &HomologyBasis) -> Result<HomologyBasis> {
        let lifted = basis.basis.iter().map(|c| self.lift_cycle(g, c)).collect::<Result<Vec<_>>>()?;
        HomologyBasis::from_cycles(&self.gamma, lifted)
    }

    fn internal_pairs(&self, v: usize) -> Vec<(usize, usize, usize)> {
        let c = &self.clusters[v];
        let n = c.degree();
        let mut out = Vec::with_capacity(3 * n);
        for i in 0..n {
            out.push((c.ab(i), c.a(i), c.b(i)));
            if i + 1 < n {
                out.push((c.ba(i), c.b(i + 1), c.a(i)));
                out.push((c.bb(i), c.b(i + 1), c.b(i)));
            }
        }
        out
    }

    fn is_perfect(&self, m: &Chain2) -> bool {
        let mut deg = vec![0u8; self.gamma.n_vertices()];
        for e in m.edges() {
            let (u, v) = self.gamma.endpoints(e);
            deg[u] += 1;
            deg[v] += 1;
        }
        deg.iter().all(|&d| d == 1)
    }
}

/// The unique perfect matching `M_ξ` whose external edges are `ξ`.
pub fn cycle_to_matching(f: &FisherGraph, g: &CombMap, xi: &Chain2) -> Result<Chain2> {
    if !xi.is_even(g) {
        return Err(precondition("cycle_to_matching needs an even subgraph"));
    }
    let mut m = Chain2::zeros(f.gamma.n_edges());
    for e in xi.edges() {
        m.flip(e);
    }
    for (v, c) in f.clusters.iter().enumerate() {
        let taken: Vec<bool> = c.halfedges.iter().map(|&h| xi.contains(h >> 1)).collect();
        let mut local: HashMap<usize, usize> = HashMap::new();
        for i in 0..c.degree() {
            if !taken[i] {
                let k = local.len();
                local.insert(c.a(i), k);
            }
            let k = local.len();
            local.insert(c.b(i), k);
        }
        let pairs = f.internal_pairs(v);
        let usable: Vec<&(usize, usize, usize)> =
            pairs.iter().filter(|(_, x, y)| local.contains_key(x) && local.contains_key(y)).collect();
        let mg = MatchingGraph::new(local.len(), usable.iter().map(|&&(_, x, y)| (local[&x], local[&y])).collect());
        let mut found: Vec<Vec<usize>> = Vec::new();
        mg.for_each(2, |ks| found.push(ks.to_vec())).map_err(|_| invariant("cluster completion is not unique"))?;
        if found.len() != 1 {
            return Err(invariant(format!("cluster {v} has {} completions", found.len())));
        }
        for &k in &found[0] {
            m.flip(usable[k].0);
        }
    }
    Ok(m)
}

/// All perfect matchings of `Γ_G` as chains.
pub fn matchings(f: &FisherGraph, cap: usize) -> Result<Vec<Chain2>> {
    let ne = f.gamma.n_edges();
    let mg = MatchingGraph::new(f.gamma.n_vertices(), (0..ne).map(|e| f.gamma.endpoints(e)).collect());
    let mut out = Vec::new();
    mg.for_each(cap, |ks| out.push(Chain2::from_edges(ne, ks.iter().copied())))?;
    Ok(out)
}

/// `Z^D(Γ_G)`, or the partial sum over matchings with `[M + M_0] = α` when
/// `partial_by` is given (basis of `G`).
pub fn z_dimer(f: &FisherGraph, g: &CombMap, partial_by: Option<(&HomologyBasis, &[bool])>) -> Result<GPoly> {
    match partial_by {
        None => {
            let mut z = GPoly::zero();
            for m in matchings(f, crate::exactalg::DEFAULT_MATCHING_CAP)? {
                z.add_assign_ref(&chain_weight(&f.gamma, &m));
            }
            Ok(z)
        }
        Some((basis, alpha)) => {
            if alpha.len() != basis.rank() {
                return Err(precondition("class length does not match the basis"));
            }
            Ok(z_dimer_partials(f, g, basis)?.swap_remove(crate::ising::mask_of(alpha) as usize))
        }
    }
}

/// `Z^D_α(Γ_G)` for every class `α`, indexed by bitmask.
pub fn z_dimer_partials(f: &FisherGraph, g: &CombMap, basis: &HomologyBasis) -> Result<Vec<GPoly>> {
    let lifted = f.lifted_basis(g, basis)?;
    let mut out = vec![GPoly::zero(); 1 << basis.rank()];
    for m in matchings(f, crate::exactalg::DEFAULT_MATCHING_CAP)? {
        let cls = crate::ising::mask_of(&lifted.coords_unchecked(&m.xor(&f.m0)));
        out[cls as usize].add_assign_ref(&chain_weight(&f.gamma, &m));
    }
    Ok(out)
}

/// Checks that `M ↦ φ(M)` is a weight-preserving bijection onto the even
/// subgraphs of `G`, with `cycle_to_matching` as inverse.
pub fn check_bijection(f: &FisherGraph, g: &CombMap) -> Result<()> {
    let ms = matchings(f, crate::exactalg::DEFAULT_MATCHING_CAP)?;
    let mut seen = std::collections::HashSet::new();
    for m in &ms {
        if !f.is_perfect(m) {
            return Err(invariant("enumerated matching is not perfect"));
        }
        let xi = f.restrict(m);
        if chain_weight(g, &xi) != chain_weight(&f.gamma, m) {
            return Err(invariant("φ does not preserve weights"));
        }
        if &cycle_to_matching(f, g, &xi)? != m {
            return Err(invariant("cycle_to_matching is not inverse to φ"));
        }
        if !seen.insert(xi) {
            return Err(invariant("φ is not injective"));
        }
    }
    let dim = g.cycle_rank();
    if ms.len() != 1usize << dim {
        return Err(invariant(format!("{} matchings but 2^{dim} even subgraphs", ms.len())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combmap::generate::*;
    use crate::combmap::homology_basis;
    use crate::ising::{z_ising, z_ising_partials};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cluster_counts() {
        let m = k4_planar();
        let f = blowup(&m);
        assert_eq!(f.gamma.n_vertices(), 4 * m.n_edges());
        assert_eq!(f.gamma.n_edges(), m.n_edges() + 4 * 7);
        assert_eq!(f.gamma.genus(), 0);
    }

    #[test]
    fn genus_is_preserved() {
        assert_eq!(blowup(&figure_eight(true)).gamma.genus(), 1);
        assert_eq!(blowup(&genus_two_bouquet()).gamma.genus(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let g = random_rotation_map(&mut rng, 3, 6);
            assert_eq!(blowup(&g).gamma.genus(), g.genus());
        }
    }

    #[test]
    fn empty_cycle_gives_m0() {
        let g = figure_eight(false);
        let f = blowup(&g);
        assert_eq!(cycle_to_matching(&f, &g, &Chain2::zeros(2)).unwrap(), f.m0);
    }

    #[test]
    fn triangle_full_cycle() {
        let g = triangle();
        let f = blowup(&g);
        let m = cycle_to_matching(&f, &g, &Chain2::from_edges(3, [0, 1, 2])).unwrap();
        assert_eq!(f.restrict(&m), Chain2::from_edges(3, [0, 1, 2]));
    }

    #[test]
    fn odd_chain_rejected() {
        let g = triangle();
        let f = blowup(&g);
        assert!(cycle_to_matching(&f, &g, &Chain2::from_edges(3, [0])).is_err());
    }

    #[test]
    fn bijection_on_examples() {
        for g in [figure_eight(false), figure_eight(true), k4_planar(), triangle(), small_tree(), genus_two_bouquet()] {
            let f = blowup(&g);
            check_bijection(&f, &g).unwrap();
            assert_eq!(z_dimer(&f, &g, None).unwrap(), z_ising(&g).unwrap());
        }
    }

    #[test]
    fn single_edge() {
        let g = path(2);
        let f = blowup(&g);
        // Γ of K2: two clusters of one a-b pair each, plus the edge.
        assert_eq!(f.gamma.n_vertices(), 4);
        let z = z_dimer(&f, &g, None).unwrap();
        assert_eq!(z, GPoly::one());
    }

    #[test]
    fn partials_agree() {
        let g = figure_eight(true);
        let f = blowup(&g);
        let hb = homology_basis(&g).unwrap();
        let lifted = f.lifted_basis(&g, &hb).unwrap();
        assert_eq!(lifted.intersection, hb.intersection);
        assert_eq!(z_dimer_partials(&f, &g, &hb).unwrap(), z_ising_partials(&g, &hb).unwrap());
        let d = z_dimer(&f, &g, Some((&hb, &[true, true]))).unwrap();
        assert_eq!(d.display_with(&|v| g.var_name(v)).to_string(), "x1*x2");
    }

    #[test]
    fn matching_classes_match_cycle_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..15 {
            let g = random_rotation_map(&mut rng, 2, 5);
            let f = blowup(&g);
            let hb = homology_basis(&g).unwrap();
            let lifted = f.lifted_basis(&g, &hb).unwrap();
            crate::ising::EvenSubgraphSpace::new(&g)
                .for_each(20, |xi, _| {
                    let m = cycle_to_matching(&f, &g, xi).unwrap();
                    assert_eq!(lifted.coords_unchecked(&m.xor(&f.m0)), hb.coords_unchecked(xi));
                })
                .unwrap();
        }
    }
}
