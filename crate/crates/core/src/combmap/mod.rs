//! Graphs embedded in closed orientable surfaces, as rotation systems.
//!
//! Edge `k` owns half-edges `2k` and `2k+1`; `mate(h) = h ^ 1`. A rotation lists
//! the half-edges at a vertex counterclockwise. Faces are the orbits of
//! `next(h) = rotation-successor of mate(h)`, which walks each face keeping it
//! on the right.

pub mod generate;
pub mod homology;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{GPoly, GaussRat, VarId};

pub use homology::{
    cycle_decompose, cycle_walk, homology_basis, homology_class, intersect_mod2, intersection_number, Chain2,
    CycleWalk, HomologyBasis,
};

/// Names of the formal edge variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarTable {
    names: Vec<String>,
}

impl VarTable {
    pub fn new() -> Self {
        VarTable { names: Vec::new() }
    }

    pub fn intern(&mut self, name: &str) -> VarId {
        match self.names.iter().position(|n| n == name) {
            Some(k) => k as VarId,
            None => {
                self.names.push(name.to_string());
                (self.names.len() - 1) as VarId
            }
        }
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.names.iter().position(|n| n == name).map(|k| k as VarId)
    }

    pub fn name(&self, v: VarId) -> String {
        self.names.get(v as usize).cloned().unwrap_or_else(|| format!("v{v}"))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// An edge weight: a formal variable or an exact constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Weight {
    Var(VarId),
    Const(GaussRat),
}

impl Weight {
    pub fn to_poly(&self) -> GPoly {
        match self {
            Weight::Var(v) => GPoly::var(*v),
            Weight::Const(c) => GPoly::constant(c.clone()),
        }
    }
}

pub type Point = (BigRational, BigRational);

#[derive(Clone, Debug)]
pub struct CombMap {
    rotations: Vec<Vec<usize>>,
    weights: Vec<Weight>,
    vars: VarTable,
    coords: Option<Vec<Point>>,
    vertex_of: Vec<usize>,
    pos_of: Vec<usize>,
    faces: Vec<Vec<usize>>,
    face_of: Vec<usize>,
    component_of: Vec<usize>,
    n_components: usize,
    genus: usize,
}

impl CombMap {
    /// Builds and validates a map. `rotations[v]` lists half-edge ids at `v`
    /// counterclockwise; `weights[k]` belongs to edge `k`.
    pub fn new(rotations: Vec<Vec<usize>>, weights: Vec<Weight>, vars: VarTable) -> Result<Self> {
        let nh = 2 * weights.len();
        let mut vertex_of = vec![usize::MAX; nh];
        let mut pos_of = vec![0; nh];
        for (v, rot) in rotations.iter().enumerate() {
            for (p, &h) in rot.iter().enumerate() {
                if h >= nh {
                    return Err(Error::Structural(format!("vertex {v} lists unknown half-edge {h}")));
                }
                if vertex_of[h] != usize::MAX {
                    return Err(Error::Structural(format!(
                        "half-edge {h} appears in the rotations of vertices {} and {v}",
                        vertex_of[h]
                    )));
                }
                vertex_of[h] = v;
                pos_of[h] = p;
            }
        }
        if let Some(h) = vertex_of.iter().position(|&v| v == usize::MAX) {
            return Err(Error::Structural(format!("half-edge {h} of edge {} is in no rotation", h / 2)));
        }
        for w in &weights {
            if let Weight::Var(v) = w {
                if *v as usize >= vars.len() {
                    return Err(Error::Structural(format!("weight refers to unknown variable {v}")));
                }
            }
        }
        let mut map = CombMap {
            rotations,
            weights,
            vars,
            coords: None,
            vertex_of,
            pos_of,
            faces: Vec::new(),
            face_of: Vec::new(),
            component_of: Vec::new(),
            n_components: 0,
            genus: 0,
        };
        map.trace();
        map.compute_genus()?;
        Ok(map)
    }

    /// Attaches planar coordinates, checking them against the rotation system.
    pub fn with_coords(mut self, coords: Vec<Point>) -> Result<Self> {
        if coords.len() != self.n_vertices() {
            return Err(Error::GeometricInput(format!(
                "{} coordinates for {} vertices",
                coords.len(),
                self.n_vertices()
            )));
        }
        for e in 0..self.n_edges() {
            let (u, v) = self.endpoints(e);
            if coords[u] == coords[v] {
                return Err(Error::GeometricInput(format!("edge {e} joins coincident points")));
            }
        }
        for v in 0..self.n_vertices() {
            let rot = &self.rotations[v];
            let dir = |h: usize| -> Point {
                let w = self.vertex_of[h ^ 1];
                (&coords[w].0 - &coords[v].0, &coords[w].1 - &coords[v].1)
            };
            let mut sorted = rot.clone();
            sorted.sort_by(|&a, &b| angle_cmp(&dir(a), &dir(b)));
            for pair in sorted.windows(2) {
                if angle_cmp(&dir(pair[0]), &dir(pair[1])) == Ordering::Equal {
                    return Err(Error::GeometricInput(format!("two edges leave vertex {v} in the same direction")));
                }
            }
            if !is_cyclic_shift(rot, &sorted) {
                return Err(Error::GeometricInput(format!(
                    "rotation at vertex {v} is not the counterclockwise order of its edge directions"
                )));
            }
        }
        self.coords = Some(coords);
        Ok(self)
    }

    fn trace(&mut self) {
        let nh = self.n_half_edges();
        let mut face_of = vec![usize::MAX; nh];
        let mut faces = Vec::new();
        for start in 0..nh {
            if face_of[start] != usize::MAX {
                continue;
            }
            let f = faces.len();
            let mut orbit = Vec::new();
            let mut h = start;
            loop {
                face_of[h] = f;
                orbit.push(h);
                h = self.next_in_face(h);
                if h == start {
                    break;
                }
            }
            faces.push(orbit);
        }
        self.faces = faces;
        self.face_of = face_of;
    }

    fn compute_genus(&mut self) -> Result<()> {
        let nv = self.n_vertices();
        let mut parent: Vec<usize> = (0..nv).collect();
        for e in 0..self.n_edges() {
            let (u, v) = self.endpoints(e);
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru.max(rv)] = ru.min(rv);
            }
        }
        let mut comp_id = BTreeMap::new();
        let mut component_of = vec![0; nv];
        for v in 0..nv {
            let r = find(&mut parent, v);
            let next = comp_id.len();
            component_of[v] = *comp_id.entry(r).or_insert(next);
        }
        let nc = comp_id.len();
        let mut vcount = vec![0i64; nc];
        let mut ecount = vec![0i64; nc];
        let mut fcount = vec![0i64; nc];
        for v in 0..nv {
            vcount[component_of[v]] += 1;
        }
        for e in 0..self.n_edges() {
            ecount[component_of[self.vertex_of[2 * e]]] += 1;
        }
        for f in &self.faces {
            fcount[component_of[self.vertex_of[f[0]]]] += 1;
        }
        let mut genus = 0;
        for c in 0..nc {
            // an isolated vertex is a sphere with one face
            let faces = if ecount[c] == 0 { 1 } else { fcount[c] };
            let twice = 2 - vcount[c] + ecount[c] - faces;
            if twice < 0 || twice % 2 != 0 {
                return Err(Error::Structural(format!(
                    "component {c} has odd or positive-excess Euler characteristic {}",
                    vcount[c] - ecount[c] + faces
                )));
            }
            genus += (twice / 2) as usize;
        }
        self.component_of = component_of;
        self.n_components = nc;
        self.genus = genus;
        Ok(())
    }

    pub fn n_vertices(&self) -> usize {
        self.rotations.len()
    }

    pub fn n_edges(&self) -> usize {
        self.weights.len()
    }

    pub fn n_half_edges(&self) -> usize {
        2 * self.weights.len()
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotations[v]
    }

    pub fn rotations(&self) -> &[Vec<usize>] {
        &self.rotations
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rotations[v].len()
    }

    #[inline]
    pub fn vertex(&self, h: usize) -> usize {
        self.vertex_of[h]
    }

    #[inline]
    pub fn mate(h: usize) -> usize {
        h ^ 1
    }

    #[inline]
    pub fn edge(h: usize) -> usize {
        h >> 1
    }

    #[inline]
    pub fn halves(e: usize) -> (usize, usize) {
        (2 * e, 2 * e + 1)
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        (self.vertex_of[2 * e], self.vertex_of[2 * e + 1])
    }

    pub fn is_loop(&self, e: usize) -> bool {
        let (u, v) = self.endpoints(e);
        u == v
    }

    /// Position of `h` in the rotation at its vertex.
    pub fn pos(&self, h: usize) -> usize {
        self.pos_of[h]
    }

    pub fn rot_next(&self, h: usize) -> usize {
        let rot = &self.rotations[self.vertex_of[h]];
        rot[(self.pos_of[h] + 1) % rot.len()]
    }

    pub fn rot_prev(&self, h: usize) -> usize {
        let rot = &self.rotations[self.vertex_of[h]];
        rot[(self.pos_of[h] + rot.len() - 1) % rot.len()]
    }

    #[inline]
    pub fn next_in_face(&self, h: usize) -> usize {
        self.rot_next(h ^ 1)
    }

    /// True when `x` lies strictly inside the counterclockwise rotation
    /// interval from `from` to `to` (all three at the same vertex).
    pub fn in_ccw_interval(&self, from: usize, to: usize, x: usize) -> bool {
        let d = self.degree(self.vertex_of[from]);
        let off = |h: usize| (self.pos_of[h] + d - self.pos_of[from]) % d;
        let (t, y) = (off(to), off(x));
        y > 0 && y < t
    }

    pub fn weight(&self, e: usize) -> &Weight {
        &self.weights[e]
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn weight_poly(&self, e: usize) -> GPoly {
        self.weights[e].to_poly()
    }

    pub fn vars(&self) -> &VarTable {
        &self.vars
    }

    pub fn var_name(&self, v: VarId) -> String {
        self.vars.name(v)
    }

    pub fn coords(&self) -> Option<&[Point]> {
        self.coords.as_deref()
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn face_of(&self, h: usize) -> usize {
        self.face_of[h]
    }

    /// Total genus, summed over connected components.
    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn component(&self, v: usize) -> usize {
        self.component_of[v]
    }

    pub fn n_components(&self) -> usize {
        self.n_components
    }

    /// Dimension of the cycle space, `E − V + #components`.
    pub fn cycle_rank(&self) -> usize {
        self.n_edges() + self.n_components - self.n_vertices()
    }

    /// Same map with different weights (same edge count).
    pub fn with_weights(&self, weights: Vec<Weight>, vars: VarTable) -> Result<Self> {
        let mut m = CombMap::new(self.rotations.clone(), weights, vars)?;
        m.coords = self.coords.clone();
        Ok(m)
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Faces and total genus of a map.
pub fn trace_faces(map: &CombMap) -> (Vec<Vec<usize>>, usize) {
    (map.faces.clone(), map.genus)
}

fn half_plane(p: &Point) -> u8 {
    if p.1.is_positive() || (p.1.is_zero() && p.0.is_positive()) {
        0
    } else {
        1
    }
}

/// Exact comparison of direction angles in `[0, 2π)`.
pub fn angle_cmp(a: &Point, b: &Point) -> Ordering {
    half_plane(a).cmp(&half_plane(b)).then_with(|| {
        let cross = &a.0 * &b.1 - &a.1 * &b.0;
        if cross.is_positive() {
            Ordering::Less
        } else if cross.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    })
}

fn is_cyclic_shift(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    match b.iter().position(|&x| x == a[0]) {
        Some(s) => (0..a.len()).all(|k| a[k] == b[(s + k) % b.len()]),
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_weights(n: usize) -> (Vec<Weight>, VarTable) {
        let mut vars = VarTable::new();
        let w = (0..n).map(|k| Weight::Var(vars.intern(&format!("x{}", k + 1)))).collect();
        (w, vars)
    }

    fn map(rot: Vec<Vec<usize>>, ne: usize) -> Result<CombMap> {
        let (w, vars) = unit_weights(ne);
        CombMap::new(rot, w, vars)
    }

    #[test]
    fn planar_figure_eight() {
        let m = map(vec![vec![0, 1, 2, 3]], 2).unwrap();
        assert_eq!(m.faces().len(), 3);
        assert_eq!(m.genus(), 0);
    }

    #[test]
    fn torus_figure_eight() {
        let m = map(vec![vec![0, 2, 1, 3]], 2).unwrap();
        assert_eq!(m.faces().len(), 1);
        assert_eq!(m.genus(), 1);
    }

    #[test]
    fn single_edge() {
        let m = map(vec![vec![0], vec![1]], 1).unwrap();
        assert_eq!(m.faces().len(), 1);
        assert_eq!(m.genus(), 0);
    }

    #[test]
    fn face_lengths_sum_to_half_edges() {
        let m = map(vec![vec![0, 2, 4, 1, 6, 3, 5, 7]], 4).unwrap();
        let total: usize = m.faces().iter().map(Vec::len).sum();
        assert_eq!(total, 8);
    }

    #[test]
    fn isolated_vertices_and_components() {
        let m = map(vec![vec![], vec![0, 2, 1, 3], vec![]], 2).unwrap();
        assert_eq!(m.n_components(), 3);
        assert_eq!(m.genus(), 1);
    }

    #[test]
    fn structural_errors() {
        assert!(map(vec![vec![0, 0, 1]], 1).is_err());
        assert!(map(vec![vec![0]], 1).is_err());
        assert!(map(vec![vec![0, 5]], 1).is_err());
    }

    #[test]
    fn ccw_interval() {
        let m = map(vec![vec![0, 2, 1, 3]], 2).unwrap();
        assert!(m.in_ccw_interval(0, 1, 2));
        assert!(!m.in_ccw_interval(0, 1, 3));
        assert!(m.in_ccw_interval(1, 0, 3));
    }

    fn pt(x: i64, y: i64) -> Point {
        (BigRational::from_integer(x.into()), BigRational::from_integer(y.into()))
    }

    #[test]
    fn coordinates_must_match_rotation() {
        // triangle 0-1-2 counterclockwise
        let good = vec![vec![0, 5], vec![2, 1], vec![4, 3]];
        let coords = vec![pt(0, 0), pt(1, 0), pt(0, 1)];
        assert!(map(good, 3).unwrap().with_coords(coords.clone()).is_ok());
        // a star with three edges: reversing the cyclic order is a mismatch
        let star = vec![vec![0, 2, 4], vec![1], vec![3], vec![5]];
        let c = vec![pt(0, 0), pt(1, 0), pt(0, 1), pt(-1, -1)];
        assert!(map(star, 3).unwrap().with_coords(c.clone()).is_ok());
        let rev = vec![vec![0, 4, 2], vec![1], vec![3], vec![5]];
        assert!(map(rev, 3).unwrap().with_coords(c).is_err());
        let zero = vec![vec![0], vec![1]];
        assert!(map(zero, 1).unwrap().with_coords(vec![pt(1, 1), pt(1, 1)]).is_err());
    }
}
