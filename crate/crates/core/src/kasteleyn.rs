//! Kasteleyn orientations of the Fisher graph, their classes, matrices and
//! signs, the associated quadratic forms and the Pfaffian formula for `Z^D`.

use std::collections::VecDeque;

use crate::combmap::{cycle_decompose, cycle_walk, intersection_number, Chain2, CombMap, CycleWalk, HomologyBasis};
use crate::error::{invariant, precondition, Error, Result};
use crate::exactalg::{matching_sign, pfaffian_symbolic, GPoly, GaussRat, Gf2Vec, SkewMat, DEFAULT_MATCHING_CAP};
use crate::fisher::{EdgeKind, FisherGraph};

/// A direction per edge: bit set means oriented from the vertex of the edge's
/// first half-edge (`2e`) to that of its second.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KOrientation {
    pub bits: Gf2Vec,
    pub class_id: usize,
}

impl KOrientation {
    /// Whether the edge of `h` is oriented away from `vertex(h)`.
    pub fn along(&self, h: usize) -> bool {
        self.bits.get(h >> 1) == (h & 1 == 0)
    }

    /// `ε_{uv}` of the edge `e` seen from its endpoint `u`.
    pub fn sign_from(&self, map: &CombMap, e: usize, u: usize) -> i32 {
        let h = if map.vertex(2 * e) == u { 2 * e } else { 2 * e + 1 };
        if self.along(h) {
            1
        } else {
            -1
        }
    }

    /// Reverses every edge at vertex `v`.
    pub fn flip_vertex(&mut self, map: &CombMap, v: usize) {
        for &h in map.rotation(v) {
            self.bits.flip(h >> 1);
        }
    }
}

/// Number of steps of a walk that go against the orientation.
pub fn n_against(k: &KOrientation, walk: &[usize]) -> usize {
    walk.iter().filter(|&&h| !k.along(h)).count()
}

/// Every face has an odd number of edges oriented against its
/// counterclockwise boundary.
pub fn is_kasteleyn(map: &CombMap, k: &KOrientation) -> bool {
    // face orbits run clockwise, so "against ccw" is "along the orbit"
    map.faces().iter().all(|f| f.iter().filter(|&&h| k.along(h)).count() % 2 == 1)
}

/// Solves the face-parity system on any embedded graph.
pub fn kasteleyn_orientation(map: &CombMap) -> Result<KOrientation> {
    let mut comp_size = vec![0usize; map.n_components()];
    for v in 0..map.n_vertices() {
        comp_size[map.component(v)] += 1;
    }
    if let Some(c) = comp_size.iter().position(|&s| s % 2 == 1) {
        return Err(Error::NoOrientation(format!("component {c} has {} vertices", comp_size[c])));
    }
    let ne = map.n_edges();
    let rows: Vec<Gf2Vec> = map.faces().iter().map(|f| Gf2Vec::from_indices(ne, f.iter().map(|&h| h >> 1))).collect();
    let rhs: Vec<bool> = map.faces().iter().map(|f| (1 + f.iter().filter(|&&h| h & 1 == 1).count()) % 2 == 1).collect();
    let bits = crate::exactalg::gf2_solve_one(&rows, &Gf2Vec::from_bools(&rhs), ne)
        .ok_or_else(|| Error::NoOrientation("face-parity system is infeasible".into()))?;
    Ok(KOrientation { bits, class_id: 0 })
}

/// Internal edges are created with their first half-edge at the tail of the
/// normalized pattern `a_i→b_i, b_{i+1}→a_i, b_{i+1}→b_i`.
fn is_internal(kind: EdgeKind) -> bool {
    kind != EdgeKind::External
}

pub fn is_normalized(f: &FisherGraph, k: &KOrientation) -> bool {
    f.kinds.iter().enumerate().all(|(e, &kind)| !is_internal(kind) || k.bits.get(e))
}

/// Flips cluster vertices so the interior follows the normalized pattern.
pub fn normalize(f: &FisherGraph, k: &mut KOrientation) -> Result<()> {
    let g = &f.gamma;
    let mut flip = vec![false; g.n_vertices()];
    for c in &f.clusters {
        if c.degree() == 0 {
            continue;
        }
        let mut seen = vec![false; 2 * c.degree()];
        seen[0] = true;
        let mut q = VecDeque::from([c.a(0)]);
        while let Some(u) = q.pop_front() {
            for &h in g.rotation(u) {
                let e = h >> 1;
                if !is_internal(f.kinds[e]) {
                    continue;
                }
                let w = g.vertex(h ^ 1);
                if !seen[w - c.base] {
                    seen[w - c.base] = true;
                    flip[w] = flip[u] ^ !k.bits.get(e);
                    q.push_back(w);
                }
            }
        }
    }
    for (v, &fl) in flip.iter().enumerate() {
        if fl {
            k.flip_vertex(g, v);
        }
    }
    if !is_normalized(f, k) {
        return Err(invariant("cluster interior cannot be normalized"));
    }
    Ok(())
}

/// A cluster-normalized Kasteleyn orientation of `Γ_G`.
pub fn find_kasteleyn(f: &FisherGraph) -> Result<KOrientation> {
    let mut k = kasteleyn_orientation(&f.gamma)?;
    normalize(f, &mut k)?;
    if !is_kasteleyn(&f.gamma, &k) {
        return Err(invariant("normalization broke the face condition"));
    }
    Ok(k)
}

/// A mod-2 quadratic form on `H_1`, stored by its values on a basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadForm2 {
    pub values: Vec<bool>,
    pub intersection: Vec<Vec<bool>>,
}

impl QuadForm2 {
    pub fn new(values: Vec<bool>, intersection: Vec<Vec<bool>>) -> Self {
        QuadForm2 { values, intersection }
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    /// `q(Σ a_i b_i) = Σ a_i q(b_i) + Σ_{i<j} a_i a_j (b_i·b_j)`.
    pub fn eval(&self, a: &[bool]) -> bool {
        let mut acc = false;
        for i in 0..a.len() {
            if !a[i] {
                continue;
            }
            acc ^= self.values[i];
            for j in i + 1..a.len() {
                acc ^= a[j] && self.intersection[i][j];
            }
        }
        acc
    }

    pub fn eval_mask(&self, mask: usize) -> bool {
        let a: Vec<bool> = (0..self.rank()).map(|i| mask >> i & 1 == 1).collect();
        self.eval(&a)
    }

    fn pairing_mask(&self, x: usize, y: usize) -> bool {
        let mut acc = false;
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                acc ^= (x >> i & 1 == 1) && (y >> j & 1 == 1) && self.intersection[i][j];
            }
        }
        acc
    }

    /// `q(α+β) + q(α) + q(β) = α·β` for all pairs.
    pub fn is_refinement(&self) -> bool {
        let n = 1usize << self.rank();
        (0..n).all(|x| (0..n).all(|y| self.eval_mask(x ^ y) ^ self.eval_mask(x) ^ self.eval_mask(y) == self.pairing_mask(x, y)))
    }
}

/// Arf invariant from `Σ_α (−1)^{q(α)} = ±2^g`.
pub fn arf(q: &QuadForm2) -> Result<bool> {
    let n = 1usize << q.rank();
    let sum: i64 = (0..n).map(|m| if q.eval_mask(m) { -1 } else { 1 }).sum();
    let g = q.rank() / 2;
    if q.rank() % 2 == 1 || sum.unsigned_abs() != 1u64 << g {
        return Err(invariant(format!("character sum {sum} is not ±2^{g}")));
    }
    Ok(sum < 0)
}

/// `ℓ_M` at one step: the dimer at the vertex leaves the walk on its left.
fn dimer_on_left(gamma: &CombMap, m: &Chain2, out: usize, inc: usize) -> bool {
    let v = gamma.vertex(out);
    gamma
        .rotation(v)
        .iter()
        .any(|&h| m.contains(h >> 1) && h != out && h != inc && gamma.in_ccw_interval(out, inc, h))
}

/// `n^K(C) + ℓ_M(C) + 1` for a vertex-simple cycle of `Γ_G`.
pub fn q_of_walk(gamma: &CombMap, k: &KOrientation, m: &Chain2, walk: &CycleWalk) -> bool {
    let nk = n_against(k, &walk.halfedges);
    let ell = (0..walk.len()).filter(|&t| dimer_on_left(gamma, m, walk.halfedges[t], walk.incoming(t))).count();
    (nk + ell + 1) % 2 == 1
}

/// `q^K_M` on an arbitrary even subgraph of `Γ_G`, summing over an
/// edge-disjoint cycle decomposition plus pairwise intersections.
pub fn q_direct(gamma: &CombMap, k: &KOrientation, m: &Chain2, even: &Chain2) -> Result<bool> {
    let walks: Vec<CycleWalk> =
        cycle_decompose(gamma, even)?.iter().map(|c| cycle_walk(gamma, c)).collect::<Result<_>>()?;
    let mut acc = false;
    for (i, w) in walks.iter().enumerate() {
        acc ^= q_of_walk(gamma, k, m, w);
        for v in &walks[i + 1..] {
            acc ^= intersection_number(gamma, w, v);
        }
    }
    Ok(acc)
}

/// The form `q^K_{M_0}` in the basis of `G`, using the lifted basis of `Γ_G`.
pub fn quad_form(f: &FisherGraph, k: &KOrientation, lifted: &HomologyBasis) -> Result<QuadForm2> {
    let values = lifted
        .basis
        .iter()
        .map(|c| cycle_walk(&f.gamma, c).map(|w| q_of_walk(&f.gamma, k, &f.m0, &w)))
        .collect::<Result<Vec<_>>>()?;
    Ok(QuadForm2::new(values, lifted.intersection.clone()))
}

/// One representative per equivalence class, obtained from `k0` by flipping
/// the edge sets `Σ_{i ∈ id} flips[i]` (chains over the external edges).
pub fn enumerate_classes_with(f: &FisherGraph, k0: &KOrientation, flips: &[Gf2Vec]) -> Result<Vec<KOrientation>> {
    if flips.len() > 20 {
        return Err(Error::Capacity { what: "flip basis size", got: flips.len(), limit: 20, hint: "genus too large" });
    }
    let ne = f.gamma.n_edges();
    let mut out = Vec::with_capacity(1 << flips.len());
    for id in 0..1usize << flips.len() {
        let mut k = KOrientation { bits: k0.bits.clone(), class_id: id };
        for (i, w) in flips.iter().enumerate() {
            if id >> i & 1 == 1 {
                for e in w.ones() {
                    if e >= ne || is_internal(f.kinds[e]) {
                        return Err(precondition("flip sets must live on external edges"));
                    }
                    k.bits.flip(e);
                }
            }
        }
        normalize(f, &mut k)?;
        if !is_kasteleyn(&f.gamma, &k) {
            return Err(invariant("flip set broke the face condition"));
        }
        out.push(k);
    }
    Ok(out)
}

/// The `2^{2g}` classes, flipping along the cocycles dual to `basis`.
pub fn enumerate_classes(f: &FisherGraph, k0: &KOrientation, basis: &HomologyBasis) -> Result<Vec<KOrientation>> {
    enumerate_classes_with(f, k0, basis.cocycles())
}

/// `A^K(Γ)`: `A[u,v] = Σ_e ε^K_{uv}(e) x_e`.
pub fn kasteleyn_matrix(gamma: &CombMap, k: &KOrientation) -> SkewMat {
    let mut a = SkewMat::zeros(gamma.n_vertices());
    for e in 0..gamma.n_edges() {
        let (u, v) = gamma.endpoints(e);
        let w = gamma.weight_poly(e);
        if k.bits.get(e) {
            a.add(u, v, &w);
        } else {
            a.add(u, v, &-w);
        }
    }
    a
}

/// `ε^K(M) = sign(σ)·Π ε^K` over the dimers.
pub fn eps_sign(gamma: &CombMap, k: &KOrientation, m: &Chain2) -> Result<i32> {
    let mut pairs = Vec::with_capacity(gamma.n_vertices() / 2);
    let mut sign = 1;
    let mut covered = vec![false; gamma.n_vertices()];
    for e in m.edges() {
        let (u, v) = gamma.endpoints(e);
        if covered[u] || covered[v] || u == v {
            return Err(precondition("not a perfect matching"));
        }
        covered[u] = true;
        covered[v] = true;
        pairs.push((u, v));
        sign *= k.sign_from(gamma, e, u);
    }
    if covered.iter().any(|&c| !c) {
        return Err(precondition("not a perfect matching"));
    }
    Ok(sign * matching_sign(gamma.n_vertices(), &pairs))
}

/// `Π_C (−1)^{n^K(C)+1}` over the cycles of `M + M'`.
pub fn eps_ratio_by_cycles(gamma: &CombMap, k: &KOrientation, m: &Chain2, m2: &Chain2) -> Result<i32> {
    let mut sign = 1;
    for c in cycle_decompose(gamma, &m.xor(m2))? {
        let w = cycle_walk(gamma, &c)?;
        if n_against(k, &w.halfedges) % 2 == 0 {
            sign = -sign;
        }
    }
    Ok(sign)
}

/// Matrix of one isolated cluster of degree `n` with the normalized pattern,
/// in the order `a_1, b_1, …, a_n, b_n`.
pub fn cluster_block(n: usize) -> SkewMat {
    let one = GPoly::one();
    let mut a = SkewMat::zeros(2 * n);
    for i in 0..n {
        a.add(2 * i, 2 * i + 1, &one);
        if i + 1 < n {
            a.add(2 * i + 3, 2 * i, &one);
            a.add(2 * i + 3, 2 * i + 1, &one);
        }
    }
    a
}

/// Everything attached to one spin-structure class.
#[derive(Clone, Debug)]
pub struct SpinClass {
    pub orientation: KOrientation,
    pub form: QuadForm2,
    pub arf: bool,
    pub eps_m0: i32,
}

/// The classes of a Fisher graph with their forms, checked pairwise distinct.
pub fn spin_classes(
    f: &FisherGraph,
    lifted: &HomologyBasis,
    flips: &[Gf2Vec],
) -> Result<Vec<SpinClass>> {
    let k0 = find_kasteleyn(f)?;
    let ks = enumerate_classes_with(f, &k0, flips)?;
    let mut out: Vec<SpinClass> = Vec::with_capacity(ks.len());
    for k in ks {
        let form = quad_form(f, &k, lifted)?;
        if out.iter().any(|c| c.form == form) {
            return Err(invariant("two classes share a quadratic form"));
        }
        let arf_bit = arf(&form)?;
        let eps_m0 = eps_sign(&f.gamma, &k, &f.m0)?;
        out.push(SpinClass { orientation: k, form, arf: arf_bit, eps_m0 });
    }
    Ok(out)
}

/// `Z^D(Γ_G) = 2^{−g} Σ_[K] (−1)^{Arf} ε^K(M_0) Pf(A^K)`.
pub fn z_dimer_pfaffian(f: &FisherGraph, g: &CombMap, basis: &HomologyBasis) -> Result<GPoly> {
    let lifted = f.lifted_basis(g, basis)?;
    let classes = spin_classes(f, &lifted, basis.cocycles())?;
    let mut total = GPoly::zero();
    for c in &classes {
        let pf = pfaffian_symbolic(&kasteleyn_matrix(&f.gamma, &c.orientation), DEFAULT_MATCHING_CAP)?;
        if (c.eps_m0 < 0) != c.arf {
            total.sub_assign_ref(&pf);
        } else {
            total.add_assign_ref(&pf);
        }
    }
    Ok(total.scale(&GaussRat::from_frac(1, 1 << g.genus())))
}

/// The same sum with every Pfaffian evaluated at a point.
pub fn z_dimer_pfaffian_eval(
    f: &FisherGraph,
    g: &CombMap,
    basis: &HomologyBasis,
    point: &dyn Fn(crate::exactalg::VarId) -> GaussRat,
) -> Result<GaussRat> {
    let lifted = f.lifted_basis(g, basis)?;
    let classes = spin_classes(f, &lifted, basis.cocycles())?;
    let mut total = GaussRat::from_int(0);
    for c in &classes {
        let pf = crate::exactalg::pfaffian_field(kasteleyn_matrix(&f.gamma, &c.orientation).eval(point));
        if (c.eps_m0 < 0) != c.arf {
            total = &total - &pf;
        } else {
            total = &total + &pf;
        }
    }
    Ok(&total * &GaussRat::from_frac(1, 1 << g.genus()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combmap::generate::*;
    use crate::combmap::homology_basis;
    use crate::exactalg::pfaffian_symbolic;
    use crate::fisher::{blowup, cycle_to_matching, matchings, z_dimer_partials};
    use crate::ising::{z_ising, EvenSubgraphSpace};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(g: &CombMap) -> (FisherGraph, HomologyBasis, HomologyBasis, Vec<SpinClass>) {
        let f = blowup(g);
        let hb = homology_basis(g).unwrap();
        let lifted = f.lifted_basis(g, &hb).unwrap();
        let cl = spin_classes(&f, &lifted, hb.cocycles()).unwrap();
        (f, hb, lifted, cl)
    }

    #[test]
    fn cluster_pfaffian_is_one() {
        for n in 1..=8 {
            assert_eq!(pfaffian_symbolic(&cluster_block(n), 1000).unwrap(), GPoly::one(), "n = {n}");
        }
    }

    #[test]
    fn planar_figure_eight_orientation() {
        let g = figure_eight(false);
        let f = blowup(&g);
        let k = find_kasteleyn(&f).unwrap();
        assert!(is_kasteleyn(&f.gamma, &k));
        assert!(is_normalized(&f, &k));
        assert_eq!(eps_sign(&f.gamma, &k, &f.m0).unwrap(), 1);
        let pf = pfaffian_symbolic(&kasteleyn_matrix(&f.gamma, &k), 1000).unwrap();
        assert_eq!(pf.display_with(&|v| g.var_name(v)).to_string(), "1 + x1 + x2 + x1*x2");
    }

    #[test]
    fn odd_path_has_no_orientation() {
        assert!(matches!(kasteleyn_orientation(&path(3)), Err(Error::NoOrientation(_))));
        assert!(kasteleyn_orientation(&path(2)).is_ok());
    }

    #[test]
    fn class_counts() {
        assert_eq!(setup(&k4_planar()).3.len(), 1);
        assert_eq!(setup(&figure_eight(true)).3.len(), 4);
        assert_eq!(setup(&genus_two_bouquet()).3.len(), 16);
    }

    #[test]
    fn torus_forms_and_arf() {
        let (_, _, _, cl) = setup(&figure_eight(true));
        let mut forms: Vec<Vec<bool>> = cl.iter().map(|c| c.form.values.clone()).collect();
        forms.sort();
        assert_eq!(forms, vec![vec![false, false], vec![false, true], vec![true, false], vec![true, true]]);
        for c in &cl {
            assert!(c.form.is_refinement());
            assert_eq!(c.arf, c.form.values == vec![true, true]);
            assert_eq!(c.eps_m0, 1);
        }
    }

    #[test]
    fn pfaffian_formula() {
        for g in [figure_eight(false), figure_eight(true), k4_planar(), small_tree(), genus_two_bouquet()] {
            let f = blowup(&g);
            let hb = homology_basis(&g).unwrap();
            assert_eq!(z_dimer_pfaffian(&f, &g, &hb).unwrap(), z_ising(&g).unwrap());
        }
    }

    #[test]
    fn per_class_linear_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..12 {
            let g = random_rotation_map(&mut rng, 2, 5);
            let (f, hb, _, cl) = setup(&g);
            let parts = z_dimer_partials(&f, &g, &hb).unwrap();
            for c in &cl {
                let pf = pfaffian_symbolic(&kasteleyn_matrix(&f.gamma, &c.orientation), 100000).unwrap();
                let mut rhs = GPoly::zero();
                for (mask, p) in parts.iter().enumerate() {
                    if c.form.eval_mask(mask) {
                        rhs.sub_assign_ref(p);
                    } else {
                        rhs.add_assign_ref(p);
                    }
                }
                assert_eq!(pf.scale(&GaussRat::from_int(c.eps_m0 as i64)), rhs);
            }
        }
    }

    #[test]
    fn sign_ratio_matches_cycles() {
        let g = figure_eight(true);
        let (f, _, _, cl) = setup(&g);
        for c in &cl {
            let e0 = eps_sign(&f.gamma, &c.orientation, &f.m0).unwrap();
            for m in matchings(&f, 1000).unwrap() {
                let e = eps_sign(&f.gamma, &c.orientation, &m).unwrap();
                assert_eq!(e * e0, eps_ratio_by_cycles(&f.gamma, &c.orientation, &m, &f.m0).unwrap());
            }
        }
    }

    #[test]
    fn form_agrees_with_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..12 {
            let g = random_rotation_map(&mut rng, 2, 6);
            let (f, hb, _, cl) = setup(&g);
            for c in cl.iter().take(4) {
                EvenSubgraphSpace::new(&g)
                    .for_each(20, |xi, _| {
                        let m = cycle_to_matching(&f, &g, xi).unwrap();
                        let direct = q_direct(&f.gamma, &c.orientation, &f.m0, &m.xor(&f.m0)).unwrap();
                        assert_eq!(direct, c.form.eval(&hb.coords_unchecked(xi)));
                    })
                    .unwrap();
            }
        }
    }

    #[test]
    fn arf_of_small_forms() {
        assert!(!arf(&QuadForm2::new(vec![], vec![])).unwrap());
        let h = vec![vec![false, true], vec![true, false]];
        assert!(arf(&QuadForm2::new(vec![true, true], h.clone())).unwrap());
        assert!(!arf(&QuadForm2::new(vec![true, false], h)).unwrap());
    }
}
