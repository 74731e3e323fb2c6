//! Perfect matching enumeration by backtracking with forced-edge propagation.

use crate::error::{Error, Result};

/// Default bound on the number of matchings any single enumeration may visit.
pub const DEFAULT_MATCHING_CAP: usize = 1 << 22;

/// Undirected multigraph given as an edge list; edge ids are positions in `edges`.
pub struct MatchingGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    incident: Vec<Vec<usize>>,
}

impl MatchingGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut incident = vec![Vec::new(); n];
        for (k, &(u, v)) in edges.iter().enumerate() {
            assert!(u != v, "self-loops never belong to a perfect matching");
            incident[u].push(k);
            incident[v].push(k);
        }
        MatchingGraph { n, edges, incident }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge(&self, k: usize) -> (usize, usize) {
        self.edges[k]
    }

    /// Calls `visit` with the edge ids of every perfect matching, in a fixed
    /// order. Fails once more than `cap` matchings have been produced.
    pub fn for_each(&self, cap: usize, mut visit: impl FnMut(&[usize])) -> Result<usize> {
        if self.n % 2 == 1 {
            return Ok(0);
        }
        let mut st = State {
            matched: vec![false; self.n],
            free_deg: self.incident.iter().map(Vec::len).collect(),
            chosen: Vec::with_capacity(self.n / 2),
            count: 0,
            cap,
        };
        self.search(&mut st, &mut visit)?;
        Ok(st.count)
    }

    pub fn count(&self, cap: usize) -> Result<usize> {
        self.for_each(cap, |_| {})
    }

    fn other(&self, k: usize, v: usize) -> usize {
        let (a, b) = self.edges[k];
        if a == v {
            b
        } else {
            a
        }
    }

    fn set_matched(&self, st: &mut State, v: usize, on: bool) {
        st.matched[v] = on;
        for &k in &self.incident[v] {
            let w = self.other(k, v);
            if on {
                st.free_deg[w] -= 1;
            } else {
                st.free_deg[w] += 1;
            }
        }
    }

    fn search(&self, st: &mut State, visit: &mut impl FnMut(&[usize])) -> Result<()> {
        // most constrained free vertex; degree 1 means the edge is forced
        let mut best: Option<usize> = None;
        for v in 0..self.n {
            if st.matched[v] {
                continue;
            }
            if best.map_or(true, |b| st.free_deg[v] < st.free_deg[b]) {
                best = Some(v);
                if st.free_deg[v] <= 1 {
                    break;
                }
            }
        }
        let Some(v) = best else {
            st.count += 1;
            if st.count > st.cap {
                return Err(Error::Capacity {
                    what: "perfect matchings",
                    got: st.count,
                    limit: st.cap,
                    hint: "use the evaluated Pfaffian instead",
                });
            }
            visit(&st.chosen);
            return Ok(());
        };
        if st.free_deg[v] == 0 {
            return Ok(());
        }
        for &k in &self.incident[v] {
            let w = self.other(k, v);
            if st.matched[w] {
                continue;
            }
            self.set_matched(st, v, true);
            self.set_matched(st, w, true);
            st.chosen.push(k);
            let r = self.search(st, visit);
            st.chosen.pop();
            self.set_matched(st, w, false);
            self.set_matched(st, v, false);
            r?;
        }
        Ok(())
    }
}

struct State {
    matched: Vec<bool>,
    free_deg: Vec<usize>,
    chosen: Vec<usize>,
    count: usize,
    cap: usize,
}

/// Sign of the permutation `(i1 j1 i2 j2 …)` for a perfect matching of
/// `0..n` given as vertex pairs. Independent of pair order and of the order
/// inside each pair when combined with the skew entry `A[i,j]` it multiplies.
pub fn matching_sign(n: usize, pairs: &[(usize, usize)]) -> i32 {
    let mut perm = Vec::with_capacity(n);
    for &(a, b) in pairs {
        perm.push(a);
        perm.push(b);
    }
    permutation_sign(&perm)
}

/// Sign of a permutation of `0..perm.len()`.
pub fn permutation_sign(perm: &[usize]) -> i32 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = perm[x];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_counts() {
        // K_{2m} has (2m−1)!! perfect matchings
        for (m, expect) in [(1, 1), (2, 3), (3, 15), (4, 105)] {
            let n = 2 * m;
            let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            assert_eq!(MatchingGraph::new(n, edges).count(usize::MAX).unwrap(), expect);
        }
    }

    #[test]
    fn path_has_one_matching_when_even() {
        let g = MatchingGraph::new(4, vec![(0, 1), (1, 2), (2, 3)]);
        let mut seen = Vec::new();
        g.for_each(10, |m| seen.push(m.to_vec())).unwrap();
        assert_eq!(seen.len(), 1);
        let mut m = seen[0].clone();
        m.sort();
        assert_eq!(m, vec![0, 2]);
        assert_eq!(MatchingGraph::new(3, vec![(0, 1), (1, 2)]).count(10).unwrap(), 0);
    }

    #[test]
    fn cap_is_enforced() {
        let edges = (0..6).flat_map(|i| (i + 1..6).map(move |j| (i, j))).collect();
        assert!(MatchingGraph::new(6, edges).count(10).is_err());
    }

    #[test]
    fn signs() {
        assert_eq!(matching_sign(4, &[(0, 1), (2, 3)]), 1);
        assert_eq!(matching_sign(4, &[(0, 2), (1, 3)]), -1);
        assert_eq!(matching_sign(4, &[(0, 3), (1, 2)]), 1);
        assert_eq!(matching_sign(4, &[(2, 3), (0, 1)]), 1);
    }
}
