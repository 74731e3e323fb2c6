//! Kac-Ward matrices: the combinatorial construction through Kasteleyn
//! orientations of the Fisher graph, the planar geometric construction, and
//! the alternating sum of determinant square roots.

use std::collections::{BTreeMap, VecDeque};

use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::combmap::{Chain2, CombMap, HomologyBasis, Weight};
use crate::error::{invariant, precondition, Error, Result};
use crate::exactalg::{
    det_field, det_symbolic, pfaffian_field, series_sqrt, GPoly, GaussRat, Gf2Vec, SquareMat, VarId,
};
use crate::fisher::{blowup, FisherGraph};
use crate::kasteleyn::{is_normalized, kasteleyn_matrix, spin_classes, KOrientation, SpinClass};

/// Where an edge of the preprocessed graph comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeOrigin {
    /// The edge itself, or for a loop the half that keeps its id and weight.
    Original(usize),
    /// Second half of a subdivided loop, weight 1.
    Subdivision(usize),
    /// Weight-0 parallel copy added to make degrees even.
    Double(usize),
}

#[derive(Clone, Debug)]
pub struct Preprocessed {
    pub map: CombMap,
    pub origin: Vec<EdgeOrigin>,
    /// Vertices added inside loops.
    pub subdivision_vertices: Vec<usize>,
    /// Half-edge of the preprocessed map standing for each half-edge of the
    /// input (as the start of an oriented edge).
    pub half_of: Vec<usize>,
}

impl Preprocessed {
    /// Projection to the input edges; `None` for weight-0 doubles.
    pub fn project(&self, e: usize) -> Option<usize> {
        match self.origin[e] {
            EdgeOrigin::Original(x) | EdgeOrigin::Subdivision(x) => Some(x),
            EdgeOrigin::Double(_) => None,
        }
    }

    /// Lifts a chain of the input graph.
    pub fn lift_chain(&self, c: &Chain2) -> Chain2 {
        let ne = self.map.n_edges();
        let mut out = Chain2::zeros(ne);
        for e in 0..ne {
            if let EdgeOrigin::Original(x) | EdgeOrigin::Subdivision(x) = self.origin[e] {
                if c.contains(x) {
                    out.flip(e);
                }
            }
        }
        out
    }

    /// Pulls back an edge set of the input: doubles copy their edge, loop
    /// subdivision halves get 0.
    pub fn pull_back(&self, w: &Gf2Vec) -> Gf2Vec {
        let ne = self.map.n_edges();
        Gf2Vec::from_indices(
            ne,
            (0..ne).filter(|&e| match self.origin[e] {
                EdgeOrigin::Original(x) | EdgeOrigin::Double(x) => w.get(x),
                EdgeOrigin::Subdivision(_) => false,
            }),
        )
    }
}

/// Subdivides loops and doubles a path system with weight-0 edges so the
/// result is loopless with all degrees even.
pub fn preprocess(g: &CombMap) -> Preprocessed {
    let mut rot: Vec<Vec<usize>> = g.rotations().to_vec();
    let mut weights: Vec<Weight> = g.weights().to_vec();
    let mut origin: Vec<EdgeOrigin> = (0..g.n_edges()).map(EdgeOrigin::Original).collect();
    let mut half_of: Vec<usize> = (0..g.n_half_edges()).collect();
    let mut subdivision_vertices = Vec::new();
    for e in 0..g.n_edges() {
        if !g.is_loop(e) {
            continue;
        }
        let v = g.vertex(2 * e);
        let nb = weights.len();
        weights.push(Weight::Const(GaussRat::one()));
        origin.push(EdgeOrigin::Subdivision(e));
        let slot = rot[v].iter().position(|&h| h == 2 * e + 1).expect("loop half in rotation");
        rot[v][slot] = 2 * nb + 1;
        half_of[2 * e + 1] = 2 * nb + 1;
        subdivision_vertices.push(rot.len());
        rot.push(vec![2 * e + 1, 2 * nb]);
    }
    let sub = CombMap::new(rot.clone(), weights.clone(), g.vars().clone()).expect("subdivision keeps validity");

    // T-join of the odd vertices, from shortest paths paired within components
    let mut odd: Vec<usize> = (0..sub.n_vertices()).filter(|&v| sub.degree(v) % 2 == 1).collect();
    odd.sort_by_key(|&v| (sub.component(v), v));
    let mut join = Chain2::zeros(sub.n_edges());
    for pair in odd.chunks(2) {
        for e in bfs_path(&sub, pair[0], pair[1]) {
            join.flip(e);
        }
    }
    for e in join.edges() {
        let (h, hm) = CombMap::halves(e);
        let d = weights.len();
        weights.push(Weight::Const(GaussRat::zero()));
        origin.push(EdgeOrigin::Double(match origin[e] {
            EdgeOrigin::Original(x) | EdgeOrigin::Subdivision(x) | EdgeOrigin::Double(x) => x,
        }));
        let (u, w) = (sub.vertex(h), sub.vertex(hm));
        let pu = rot[u].iter().position(|&x| x == h).expect("half in rotation");
        rot[u].insert(pu + 1, 2 * d);
        let pw = rot[w].iter().position(|&x| x == hm).expect("half in rotation");
        rot[w].insert(pw, 2 * d + 1);
    }
    let map = CombMap::new(rot, weights, g.vars().clone()).expect("doubling keeps validity");
    Preprocessed { map, origin, subdivision_vertices, half_of }
}

fn bfs_path(map: &CombMap, s: usize, t: usize) -> Vec<usize> {
    let mut via: Vec<Option<usize>> = vec![None; map.n_vertices()];
    let mut seen = vec![false; map.n_vertices()];
    seen[s] = true;
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        if u == t {
            break;
        }
        for &h in map.rotation(u) {
            let w = map.vertex(h ^ 1);
            if !seen[w] {
                seen[w] = true;
                via[w] = Some(h);
                q.push_back(w);
            }
        }
    }
    let mut path = Vec::new();
    let mut v = t;
    while v != s {
        let h = via[v].expect("odd vertices of a component are connected");
        path.push(h >> 1);
        v = map.vertex(h);
    }
    path
}

/// `I − T` indexed by oriented edges, each identified with its starting
/// half-edge.
#[derive(Clone, Debug)]
pub struct KwMatrix {
    pub mat: SquareMat,
    /// Half-edge (of the input graph) labelling each row.
    pub halfedges: Vec<usize>,
}

impl KwMatrix {
    pub fn size(&self) -> usize {
        self.mat.size()
    }

    /// `T = I − B`.
    pub fn transition(&self) -> SquareMat {
        let n = self.size();
        let mut t = SquareMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut p = -self.mat.get(i, j);
                if i == j {
                    p.add_assign_ref(&GPoly::one());
                }
                t.set(i, j, p);
            }
        }
        t
    }
}

/// `B^K` on the preprocessed graph: `B[e,e'] = (−i)^{K(a)+K(a')} ℓ_{a''a'} x_e`
/// for `f(e) = s(e')`, `e' ≠ −e`, where `a, a'` are the outer vertices where
/// `e, e'` start, `a''` the one where `e` ends, and `K(a) = 1` when the external
/// edge at `a` points towards `a`.
pub fn kw_matrix_full(gp: &CombMap, f: &FisherGraph, k: &KOrientation) -> Result<SquareMat> {
    if !is_normalized(f, k) {
        return Err(precondition("Kac-Ward matrix needs a cluster-normalized orientation"));
    }
    if (0..gp.n_edges()).any(|e| gp.is_loop(e)) || (0..gp.n_vertices()).any(|v| gp.degree(v) % 2 == 1) {
        return Err(precondition("Kac-Ward matrix needs a loopless graph with even degrees"));
    }
    let n = gp.n_half_edges();
    let mut b = SquareMat::identity(n);
    let towards = |h: usize| -> i64 { (!k.along(h)) as i64 };
    for h in 0..n {
        let x = gp.weight_poly(h >> 1);
        if x.is_zero() {
            continue;
        }
        let arrive = h ^ 1;
        for &h2 in gp.rotation(gp.vertex(arrive)) {
            if h2 == arrive {
                continue;
            }
            let ell = if f.slot[h2] < f.slot[arrive] { 1 } else { -1 };
            let unit = GaussRat::i_pow(-(towards(h) + towards(h2))).scale_int(ell);
            b.set(h, h2, x.scale(&unit));
        }
    }
    Ok(b)
}

/// Removes the rows of weight-0 doubles and eliminates the oriented edges
/// starting at subdivision vertices, leaving one row per input half-edge.
pub fn contract(pre: &Preprocessed, b: &SquareMat) -> Result<KwMatrix> {
    let gp = &pre.map;
    let mut keep: Vec<usize> = Vec::new();
    let mut eliminate: Vec<usize> = Vec::new();
    let is_sub: Vec<bool> = {
        let mut s = vec![false; gp.n_vertices()];
        for &v in &pre.subdivision_vertices {
            s[v] = true;
        }
        s
    };
    for h in 0..gp.n_half_edges() {
        if matches!(pre.origin[h >> 1], EdgeOrigin::Double(_)) {
            continue;
        }
        if is_sub[gp.vertex(h)] {
            eliminate.push(h);
        } else {
            keep.push(h);
        }
    }
    let mut idx: Vec<usize> = keep.clone();
    idx.extend(&eliminate);
    let mut a: Vec<Vec<GPoly>> = idx.iter().map(|&i| idx.iter().map(|&j| b.get(i, j).clone()).collect()).collect();
    let nk = keep.len();
    for d in (nk..idx.len()).rev() {
        if a[d][d] != GPoly::one() {
            return Err(invariant("subdivision pivot is not 1"));
        }
        let row: Vec<GPoly> = a[d].clone();
        for i in 0..d {
            if a[i][d].is_zero() {
                continue;
            }
            let s = a[i][d].clone();
            for j in 0..d {
                if !row[j].is_zero() {
                    let t = &s * &row[j];
                    a[i][j].sub_assign_ref(&t);
                }
            }
        }
        a.truncate(d);
        for r in a.iter_mut() {
            r.truncate(d);
        }
    }
    // reorder rows by input half-edge
    let mut input_of = vec![usize::MAX; gp.n_half_edges()];
    for (h, &hp) in pre.half_of.iter().enumerate() {
        input_of[hp] = h;
    }
    let mut order: Vec<usize> = (0..nk).collect();
    order.sort_by_key(|&r| input_of[keep[r]]);
    let rows = order.iter().map(|&i| order.iter().map(|&j| a[i][j].clone()).collect()).collect();
    Ok(KwMatrix { mat: SquareMat::from_rows(rows), halfedges: order.iter().map(|&r| input_of[keep[r]]).collect() })
}

/// `det(M)^{1/2}` with constant term +1, through the series square root.
pub fn kw_det_sqrt(m: &KwMatrix, n_edges: usize) -> Result<GPoly> {
    let d = det_symbolic(&m.mat)?;
    series_sqrt(&d, n_edges as u32)
}

/// All the data needed to evaluate the Kac-Ward side of a map.
#[derive(Clone, Debug)]
pub struct KacWard {
    pub g: CombMap,
    pub basis: HomologyBasis,
    pub pre: Preprocessed,
    pub fisher: FisherGraph,
    pub classes: Vec<SpinClass>,
}

impl KacWard {
    pub fn new(g: &CombMap) -> Result<Self> {
        let basis = crate::combmap::homology_basis(g)?;
        Self::with_basis(g, basis)
    }

    pub fn with_basis(g: &CombMap, basis: HomologyBasis) -> Result<Self> {
        let pre = preprocess(g);
        let fisher = blowup(&pre.map);
        let pre_basis = HomologyBasis::from_cycles(&pre.map, basis.basis.iter().map(|c| pre.lift_chain(c)).collect())?;
        let lifted = fisher.lifted_basis(&pre.map, &pre_basis)?;
        let flips: Vec<Gf2Vec> = basis.cocycles().iter().map(|w| pre.pull_back(w)).collect();
        let classes = spin_classes(&fisher, &lifted, &flips)?;
        Ok(KacWard { g: g.clone(), basis, pre, fisher, classes })
    }

    pub fn genus(&self) -> usize {
        self.g.genus()
    }

    pub fn full_matrix(&self, class: usize) -> Result<SquareMat> {
        kw_matrix_full(&self.pre.map, &self.fisher, &self.classes[class].orientation)
    }

    /// The Kac-Ward matrix of a class, one row per oriented input edge.
    pub fn kw_matrix(&self, class: usize) -> Result<KwMatrix> {
        contract(&self.pre, &self.full_matrix(class)?)
    }

    pub fn kasteleyn_matrix(&self, class: usize) -> crate::exactalg::SkewMat {
        kasteleyn_matrix(&self.fisher.gamma, &self.classes[class].orientation)
    }

    pub fn det_sqrt(&self, class: usize) -> Result<GPoly> {
        kw_det_sqrt(&self.kw_matrix(class)?, self.g.n_edges())
    }

    fn signed(&self, class: usize) -> bool {
        self.classes[class].arf
    }

    fn normalizer(&self) -> GaussRat {
        GaussRat::from_frac(1, 1 << self.genus())
    }

    /// `2^{−g} Σ (−1)^{Arf} det^{1/2}`.
    pub fn z_symbolic(&self) -> Result<GPoly> {
        let mut z = GPoly::zero();
        for c in 0..self.classes.len() {
            let s = self.det_sqrt(c)?;
            if self.signed(c) {
                z.sub_assign_ref(&s);
            } else {
                z.add_assign_ref(&s);
            }
        }
        Ok(z.scale(&self.normalizer()))
    }

    /// `ε^K(M_0)·Pf(A^K)` at a point.
    pub fn signed_pfaffian_at(&self, class: usize, point: &dyn Fn(VarId) -> GaussRat) -> GaussRat {
        let pf = pfaffian_field(self.kasteleyn_matrix(class).eval(point));
        pf.scale_int(self.classes[class].eps_m0 as i64)
    }

    pub fn z_evaluated(&self, point: &dyn Fn(VarId) -> GaussRat) -> GaussRat {
        let mut z = GaussRat::zero();
        for c in 0..self.classes.len() {
            let v = self.signed_pfaffian_at(c, point);
            if self.signed(c) {
                z = &z - &v;
            } else {
                z = &z + &v;
            }
        }
        &z * &self.normalizer()
    }

    /// Floating-point evaluation with every variable replaced through
    /// `value`; uses the sparse real Pfaffian.
    pub fn z_f64(&self, value: &dyn Fn(VarId) -> f64) -> Result<f64> {
        let gamma = &self.fisher.gamma;
        let weights: Vec<f64> = (0..gamma.n_edges())
            .map(|e| match gamma.weight(e) {
                Weight::Var(v) => Ok(value(*v)),
                Weight::Const(c) if c.is_real() => Ok(c.re.to_f64().unwrap_or(f64::NAN)),
                Weight::Const(_) => Err(precondition("numeric mode needs real weights")),
            })
            .collect::<Result<_>>()?;
        let mut z = 0.0;
        for c in &self.classes {
            let upper: Vec<(usize, usize, f64)> = (0..gamma.n_edges())
                .filter(|&e| weights[e] != 0.0)
                .map(|e| {
                    let (u, v) = gamma.endpoints(e);
                    let s = if c.orientation.bits.get(e) { 1.0 } else { -1.0 };
                    if u < v {
                        (u, v, s * weights[e])
                    } else {
                        (v, u, -s * weights[e])
                    }
                })
                .collect();
            let pf = crate::exactalg::pfaffian_f64(gamma.n_vertices(), &upper) * c.eps_m0 as f64;
            z += if c.arf { -pf } else { pf };
        }
        Ok(z / (1u64 << self.genus()) as f64)
    }
}

pub enum KwMode<'a> {
    Symbolic,
    Evaluated(&'a dyn Fn(VarId) -> GaussRat),
}

/// `Z^I(G) = 2^{−g} Σ_λ (−1)^{Arf(λ)} det(I − T^λ)^{1/2}`.
pub fn z_ising_kacward(g: &CombMap, mode: KwMode<'_>) -> Result<crate::exactalg::DetValue> {
    use crate::exactalg::DetValue;
    let kw = KacWard::new(g)?;
    match mode {
        KwMode::Symbolic => kw.z_symbolic().map(DetValue::Poly),
        KwMode::Evaluated(p) => Ok(DetValue::Scalar(kw.z_evaluated(p))),
    }
}

/// The planar Kac-Ward matrix from edge directions:
/// entry `−exp(i∠(e,e')/2)·x̂_e` with the turning angle in `(−π, π]`.
pub fn kw_matrix_planar_geometric(g: &CombMap, weights: &[f64]) -> Result<Vec<Vec<Complex64>>> {
    let coords = g.coords().ok_or_else(|| Error::GeometricInput("map has no coordinates".into()))?;
    if g.genus() != 0 {
        return Err(Error::GeometricInput("geometric matrix needs a planar map".into()));
    }
    if weights.len() != g.n_edges() {
        return Err(Error::GeometricInput(format!("{} weights for {} edges", weights.len(), g.n_edges())));
    }
    let pts: Vec<(f64, f64)> = coords
        .iter()
        .map(|(x, y)| (x.to_f64().unwrap_or(f64::NAN), y.to_f64().unwrap_or(f64::NAN)))
        .collect();
    let dir = |h: usize| {
        let (s, t) = (pts[g.vertex(h)], pts[g.vertex(h ^ 1)]);
        (t.0 - s.0, t.1 - s.1)
    };
    for h in 0..g.n_half_edges() {
        let d = dir(h);
        if d.0 == 0.0 && d.1 == 0.0 {
            return Err(Error::GeometricInput(format!("edge {} has zero length", h >> 1)));
        }
    }
    let n = g.n_half_edges();
    let mut m = vec![vec![Complex64::zero(); n]; n];
    for h in 0..n {
        m[h][h] = Complex64::one();
        let d1 = dir(h);
        let arrive = h ^ 1;
        for &h2 in g.rotation(g.vertex(arrive)) {
            if h2 == arrive {
                continue;
            }
            let d2 = dir(h2);
            let angle = (d1.0 * d2.1 - d1.1 * d2.0).atan2(d1.0 * d2.0 + d1.1 * d2.1);
            m[h][h2] -= Complex64::from_polar(1.0, angle / 2.0) * weights[h >> 1];
        }
    }
    Ok(m)
}

/// Complex determinant by partial-pivot elimination.
pub fn det_c64(mut a: Vec<Vec<Complex64>>) -> Complex64 {
    let n = a.len();
    let mut d = Complex64::one();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm())).expect("nonempty range");
        if a[p][k].norm() == 0.0 {
            return Complex64::zero();
        }
        if p != k {
            a.swap(p, k);
            d = -d;
        }
        d *= a[k][k];
        let inv = a[k][k].inv();
        for i in k + 1..n {
            let f = a[i][k] * inv;
            if f == Complex64::zero() {
                continue;
            }
            for j in k..n {
                let t = f * a[k][j];
                a[i][j] -= t;
            }
        }
    }
    d
}

/// Exact determinant of the combinatorial Kac-Ward matrix of a planar map at
/// the given edge weights.
pub fn planar_exact_det(g: &CombMap, weights: &[GaussRat]) -> Result<GaussRat> {
    if g.genus() != 0 {
        return Err(precondition("planar map expected"));
    }
    let kw = KacWard::new(g)?;
    let m = kw.kw_matrix(0)?;
    let mut by_var: BTreeMap<VarId, GaussRat> = BTreeMap::new();
    for e in 0..g.n_edges() {
        if let Weight::Var(v) = g.weight(e) {
            by_var.insert(*v, weights[e].clone());
        }
    }
    Ok(det_field(m.mat.eval(&|v| by_var.get(&v).cloned().unwrap_or_else(GaussRat::zero))))
}
