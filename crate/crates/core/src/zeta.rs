//! Prime reduced closed paths and the truncated product identity
//! `det(I − T) = Π_γ (1 − w(γ))` over oriented prime reduced paths.

use std::collections::HashMap;

use crate::combmap::CombMap;
use crate::error::{Error, Result};
use crate::exactalg::{det_truncated, GPoly, GaussRat};
use crate::kacward::KwMatrix;

/// Default cap on the path length.
pub const PATH_LENGTH_CAP: usize = 10;

/// A closed path as a cyclic sequence of oriented edges (half-edge ids).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClosedPath(pub Vec<usize>);

impl ClosedPath {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> ClosedPath {
        ClosedPath(self.0.iter().rev().map(|&h| h ^ 1).collect())
    }

    /// Least rotation.
    pub fn min_rotation(&self) -> ClosedPath {
        let n = self.0.len();
        (0..n)
            .map(|r| ClosedPath(self.0[r..].iter().chain(&self.0[..r]).copied().collect()))
            .min()
            .unwrap_or_else(|| self.clone())
    }

    /// Least rotation of the path or its reversal.
    pub fn canonical(&self) -> ClosedPath {
        self.min_rotation().min(self.reversed().min_rotation())
    }

    pub fn is_reduced(&self, map: &CombMap) -> bool {
        let n = self.0.len();
        (0..n).all(|t| {
            let (a, b) = (self.0[t], self.0[(t + 1) % n]);
            b != a ^ 1 && map.vertex(b) == map.vertex(a ^ 1)
        })
    }

    pub fn is_prime(&self) -> bool {
        let n = self.0.len();
        (1..n).filter(|d| n % d == 0).all(|d| (0..n).any(|t| self.0[t] != self.0[(t + d) % n]))
    }

    /// `x(γ)`: the product of the edge weights along the path.
    pub fn weight(&self, map: &CombMap) -> GPoly {
        self.0.iter().fold(GPoly::one(), |acc, &h| &acc * &map.weight_poly(h >> 1))
    }

    pub fn display(&self, map: &CombMap) -> String {
        self.0
            .iter()
            .map(|&h| {
                let name = format!("e{}", (h >> 1) + 1);
                let _ = map;
                if h & 1 == 0 {
                    name
                } else {
                    format!("-{name}")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn check_cap(len: usize) -> Result<()> {
    if len > PATH_LENGTH_CAP {
        return Err(Error::Capacity {
            what: "closed path length",
            got: len,
            limit: PATH_LENGTH_CAP,
            hint: "lower --max-len",
        });
    }
    Ok(())
}

/// Oriented prime reduced closed paths of length `≤ max_len`, each once in
/// least-rotation form, sorted by length then lexicographically.
pub fn oriented_prime_paths(map: &CombMap, max_len: usize) -> Result<Vec<ClosedPath>> {
    check_cap(max_len)?;
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    for start in 0..map.n_half_edges() {
        stack.clear();
        stack.push(start);
        extend(map, start, max_len, &mut stack, &mut out);
    }
    out.sort_by(|a: &ClosedPath, b| (a.len(), &a.0).cmp(&(b.len(), &b.0)));
    Ok(out)
}

fn extend(map: &CombMap, start: usize, max_len: usize, stack: &mut Vec<usize>, out: &mut Vec<ClosedPath>) {
    let last = *stack.last().expect("nonempty");
    let arrive = last ^ 1;
    if map.vertex(arrive) == map.vertex(start) && start != arrive {
        let p = ClosedPath(stack.clone());
        // keep only least rotations, so each cyclic class appears once
        if p.is_prime() && p.min_rotation() == p {
            out.push(p);
        }
    }
    if stack.len() == max_len {
        return;
    }
    for &h in map.rotation(map.vertex(arrive)) {
        // the least rotation starts with its smallest half-edge
        if h == arrive || h < start {
            continue;
        }
        stack.push(h);
        extend(map, start, max_len, stack, out);
        stack.pop();
    }
}

/// Prime reduced unoriented closed paths of length `≤ max_len`, in
/// canonical form.
pub fn prime_reduced_paths(map: &CombMap, max_len: usize) -> Result<Vec<ClosedPath>> {
    let mut out: Vec<ClosedPath> = oriented_prime_paths(map, max_len)?
        .into_iter()
        .filter(|p| p.canonical() == *p)
        .collect();
    out.dedup();
    Ok(out)
}

/// Outcome of a truncated product check.
#[derive(Clone, Debug)]
pub struct BassReport {
    pub max_len: usize,
    pub n_oriented_paths: usize,
    pub holds: bool,
    /// First monomial where the two sides differ, if any.
    pub first_mismatch: Option<String>,
    /// `w(γ)/x(γ)` per unoriented path, all `±1` when the check passes.
    pub path_signs: Vec<(ClosedPath, i32)>,
    pub signs_ok: bool,
    pub det: GPoly,
    pub product: GPoly,
}

/// Compares `det(I − T)` with `Π (1 − w(γ))` modulo total degree `> L`.
pub fn verify_bass(map: &CombMap, m: &KwMatrix, max_len: usize) -> Result<BassReport> {
    let cutoff = max_len as u32;
    let det = det_truncated(&m.mat, cutoff)?;
    let t = m.transition();
    let mut row: HashMap<usize, usize> = HashMap::new();
    for (i, &h) in m.halfedges.iter().enumerate() {
        row.insert(h, i);
    }
    let w = |p: &ClosedPath| -> GPoly {
        let n = p.len();
        let mut acc = GPoly::one();
        for k in 0..n {
            acc = acc.mul_trunc(t.get(row[&p.0[k]], row[&p.0[(k + 1) % n]]), Some(cutoff));
        }
        acc
    };
    let paths = oriented_prime_paths(map, max_len)?;
    let mut product = GPoly::one();
    for p in &paths {
        let factor = &GPoly::one() - &w(p);
        product = product.mul_trunc(&factor, Some(cutoff));
    }
    let diff = &det - &product;
    let first_mismatch = diff.terms().next().map(|(mono, c)| {
        let one = GPoly::monomial(mono.clone(), GaussRat::from_int(1));
        format!("{} (difference {c})", one.display_with(&|v| map.var_name(v)))
    });
    let mut path_signs = Vec::new();
    let mut signs_ok = true;
    for p in paths.iter().filter(|p| p.canonical() == **p) {
        let x = p.weight(map);
        let wp = w(p);
        let sign = if x.is_zero() || wp == x {
            1
        } else if wp == -&x {
            -1
        } else {
            signs_ok = false;
            0
        };
        path_signs.push((p.clone(), sign));
    }
    Ok(BassReport {
        max_len,
        n_oriented_paths: paths.len(),
        holds: diff.is_zero(),
        first_mismatch,
        path_signs,
        signs_ok,
        det,
        product,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combmap::generate::*;
    use crate::kacward::KacWard;

    #[test]
    fn figure_eight_short_paths() {
        let g = figure_eight(false);
        let ps = prime_reduced_paths(&g, 2).unwrap();
        let shown: Vec<String> = ps.iter().map(|p| p.display(&g)).collect();
        assert_eq!(shown, vec!["e1", "e2", "e1 e2", "e1 -e2"]);
    }

    #[test]
    fn tree_has_no_paths() {
        assert!(prime_reduced_paths(&small_tree(), 6).unwrap().is_empty());
    }

    #[test]
    fn powers_and_backtracks_excluded() {
        let g = figure_eight(false);
        assert!(!ClosedPath(vec![0, 0]).is_prime());
        assert!(!ClosedPath(vec![0, 1]).is_reduced(&g));
        assert!(ClosedPath(vec![0, 2]).is_reduced(&g));
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(prime_reduced_paths(&triangle(), 11), Err(Error::Capacity { .. })));
    }

    #[test]
    fn torus_classes_satisfy_identity() {
        let g = figure_eight(true);
        let kw = KacWard::new(&g).unwrap();
        for c in 0..4 {
            let r = verify_bass(&g, &kw.kw_matrix(c).unwrap(), 6).unwrap();
            assert!(r.holds, "{:?}", r.first_mismatch);
            assert!(r.signs_ok);
        }
    }

    #[test]
    fn loop_sign_matches_square_root() {
        let g = figure_eight(true);
        let kw = KacWard::new(&g).unwrap();
        for (c, class) in kw.classes.iter().enumerate() {
            let r = verify_bass(&g, &kw.kw_matrix(c).unwrap(), 2).unwrap();
            let root = kw.det_sqrt(c).unwrap();
            let (_, s) = r.path_signs.iter().find(|(p, _)| p.0 == vec![0]).unwrap();
            // coefficient of x1 in the root is −w(e1)/x1
            assert_eq!(root.coeff(&crate::exactalg::Monomial::var(0)), GaussRat::from_int(-*s as i64));
            let eps1 = if class.form.values[0] { 1 } else { -1 };
            assert_eq!(*s, eps1);
        }
    }

    #[test]
    fn tree_sides_are_one() {
        let g = small_tree();
        let kw = KacWard::new(&g).unwrap();
        let r = verify_bass(&g, &kw.kw_matrix(0).unwrap(), 6).unwrap();
        assert!(r.holds);
        assert_eq!(r.det, GPoly::one());
    }
}
