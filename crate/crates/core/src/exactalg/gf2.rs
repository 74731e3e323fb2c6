//! Dense GF(2) vectors and linear solving.

use std::fmt;

/// A bit vector over GF(2), packed in 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Gf2Vec {
    words: Vec<u64>,
    len: usize,
}

impl Gf2Vec {
    pub fn zeros(len: usize) -> Self {
        Gf2Vec { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Gf2Vec::zeros(len);
        for i in idx {
            v.flip(i);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Gf2Vec::from_indices(bits.len(), bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        if self.get(i) != b {
            self.flip(i);
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] ^= 1 << (i & 63);
    }

    pub fn xor_assign(&mut self, o: &Gf2Vec) {
        debug_assert_eq!(self.len, o.len);
        for (a, b) in self.words.iter_mut().zip(&o.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, o: &Gf2Vec) -> Gf2Vec {
        let mut v = self.clone();
        v.xor_assign(o);
        v
    }

    /// Inner product over GF(2).
    pub fn dot(&self, o: &Gf2Vec) -> bool {
        self.words.iter().zip(&o.words).map(|(a, b)| (a & b).count_ones()).sum::<u32>() % 2 == 1
    }

    pub fn and(&self, o: &Gf2Vec) -> Gf2Vec {
        Gf2Vec { words: self.words.iter().zip(&o.words).map(|(a, b)| a & b).collect(), len: self.len }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + t)
            })
        })
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Debug for Gf2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "Gf2Vec({s})")
    }
}

/// Output of [`gf2_solve`].
#[derive(Clone, Debug)]
pub struct Gf2Solution {
    /// One solution of `A·x = b`, or `None` when the system is infeasible.
    pub solution: Option<Gf2Vec>,
    /// A basis of `{x : A·x = 0}`.
    pub kernel: Vec<Gf2Vec>,
}

/// Reduced row echelon form of `[A | b]` with the pivot column of each row.
struct Echelon {
    rows: Vec<Gf2Vec>,
    rhs: Vec<bool>,
    pivots: Vec<usize>,
    infeasible: bool,
}

fn echelon(a: &[Gf2Vec], b: &Gf2Vec, ncols: usize) -> Echelon {
    let mut rows: Vec<Gf2Vec> = a.to_vec();
    let mut rhs: Vec<bool> = (0..a.len()).map(|i| b.get(i)).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    let mut col = 0;
    while col < ncols && r < rows.len() {
        let Some(p) = (r..rows.len()).find(|&i| rows[i].get(col)) else {
            col += 1;
            continue;
        };
        rows.swap(r, p);
        rhs.swap(r, p);
        let prow = rows[r].clone();
        let prhs = rhs[r];
        for (k, row) in rows.iter_mut().enumerate() {
            if k != r && row.get(col) {
                row.xor_assign(&prow);
                rhs[k] ^= prhs;
            }
        }
        pivots.push(col);
        r += 1;
        col += 1;
    }
    let infeasible = rhs[r..].iter().any(|&x| x);
    rows.truncate(r);
    rhs.truncate(r);
    Echelon { rows, rhs, pivots, infeasible }
}

/// Solves `A·x = b` over GF(2); `a` holds the rows of `A`, each of length `ncols`.
pub fn gf2_solve(a: &[Gf2Vec], b: &Gf2Vec, ncols: usize) -> Gf2Solution {
    let e = echelon(a, b, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &e.pivots {
        is_pivot[p] = true;
    }
    let kernel = (0..ncols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut x = Gf2Vec::zeros(ncols);
            x.flip(f);
            for (row, &p) in e.rows.iter().zip(&e.pivots) {
                if row.get(f) {
                    x.flip(p);
                }
            }
            x
        })
        .collect();
    Gf2Solution { solution: particular(&e, ncols), kernel }
}

/// Like [`gf2_solve`] but skips the kernel.
pub fn gf2_solve_one(a: &[Gf2Vec], b: &Gf2Vec, ncols: usize) -> Option<Gf2Vec> {
    particular(&echelon(a, b, ncols), ncols)
}

fn particular(e: &Echelon, ncols: usize) -> Option<Gf2Vec> {
    if e.infeasible {
        return None;
    }
    let mut x = Gf2Vec::zeros(ncols);
    for (&p, &r) in e.pivots.iter().zip(&e.rhs) {
        if r {
            x.flip(p);
        }
    }
    Some(x)
}

/// Rank of a set of vectors.
pub fn gf2_rank(vs: &[Gf2Vec]) -> usize {
    let mut basis = EchelonBasis::new();
    vs.iter().filter(|v| basis.insert(v)).count()
}

/// Incrementally built echelon basis, used for independence tests.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    rows: Vec<(usize, Gf2Vec)>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        EchelonBasis { rows: Vec::new() }
    }

    pub fn reduce(&self, v: &Gf2Vec) -> Gf2Vec {
        let mut v = v.clone();
        for (p, row) in &self.rows {
            if v.get(*p) {
                v.xor_assign(row);
            }
        }
        v
    }

    /// Adds `v` if independent; returns whether it was added.
    pub fn insert(&mut self, v: &Gf2Vec) -> bool {
        let r = self.reduce(v);
        match r.first_one() {
            Some(p) => {
                self.rows.push((p, r));
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, v: &Gf2Vec) -> bool {
        self.reduce(v).is_zero()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&str]) -> Vec<Gf2Vec> {
        rows.iter()
            .map(|r| Gf2Vec::from_bools(&r.chars().map(|c| c == '1').collect::<Vec<_>>()))
            .collect()
    }

    fn apply(a: &[Gf2Vec], x: &Gf2Vec) -> Gf2Vec {
        Gf2Vec::from_bools(&a.iter().map(|r| r.dot(x)).collect::<Vec<_>>())
    }

    #[test]
    fn identity_system() {
        let a = mat(&["100", "010", "001"]);
        let b = Gf2Vec::from_bools(&[true, false, true]);
        let s = gf2_solve(&a, &b, 3);
        assert_eq!(s.solution, Some(b));
        assert!(s.kernel.is_empty());
    }

    #[test]
    fn single_equation_two_unknowns() {
        let a = mat(&["11"]);
        let b = Gf2Vec::from_bools(&[true]);
        let s = gf2_solve(&a, &b, 2);
        let x = s.solution.unwrap();
        assert_eq!(apply(&a, &x), b);
        assert_eq!(s.kernel.len(), 1);
        assert!(apply(&a, &s.kernel[0]).is_zero());
    }

    #[test]
    fn infeasible_is_reported() {
        let a = mat(&["11", "11"]);
        let b = Gf2Vec::from_bools(&[true, false]);
        assert!(gf2_solve(&a, &b, 2).solution.is_none());
    }

    #[test]
    fn ones_iterates_set_bits() {
        let v = Gf2Vec::from_indices(130, [0, 64, 129]);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(v.first_one(), Some(0));
        assert_eq!(v.count_ones(), 3);
    }

    #[test]
    fn rank_counts_independent_rows() {
        assert_eq!(gf2_rank(&mat(&["110", "011", "101"])), 2);
    }
}
