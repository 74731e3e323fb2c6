//! Square and skew-symmetric matrices with polynomial entries.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::gauss::GaussRat;
use super::poly::{GPoly, VarId};

/// Dense square matrix of polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareMat {
    n: usize,
    data: Vec<GPoly>,
}

impl SquareMat {
    pub fn zeros(n: usize) -> Self {
        SquareMat { n, data: vec![GPoly::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SquareMat::zeros(n);
        for i in 0..n {
            m.set(i, i, GPoly::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<GPoly>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix rows must have length {n}");
        SquareMat { n, data: rows.into_iter().flatten().collect() }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &GPoly {
        &self.data[i * self.n + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut GPoly {
        &mut self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: GPoly) {
        self.data[i * self.n + j] = p;
    }

    pub fn row(&self, i: usize) -> &[GPoly] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn nonzeros_in_row(&self, i: usize) -> usize {
        self.row(i).iter().filter(|p| !p.is_zero()).count()
    }

    /// Substitutes a value for every variable.
    pub fn eval(&self, point: &dyn Fn(VarId) -> GaussRat) -> Vec<Vec<GaussRat>> {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|p| p.eval_with(point)).collect())
            .collect()
    }

    pub fn map(&self, f: impl Fn(&GPoly) -> GPoly) -> SquareMat {
        SquareMat { n: self.n, data: self.data.iter().map(f).collect() }
    }

    pub fn substitute(&self, subs: &BTreeMap<VarId, GaussRat>) -> SquareMat {
        self.map(|p| p.substitute(subs))
    }

    /// Principal submatrix on `keep` (in the given order).
    pub fn submatrix(&self, keep: &[usize]) -> SquareMat {
        let mut m = SquareMat::zeros(keep.len());
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        m
    }

    /// Sorted list of variables occurring anywhere.
    pub fn vars(&self) -> Vec<VarId> {
        let mut v: Vec<VarId> = self.data.iter().flat_map(GPoly::vars).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn display_with<'a>(&'a self, names: &'a dyn Fn(VarId) -> String) -> MatDisplay<'a> {
        MatDisplay { rows: (0..self.n).map(|i| self.row(i).iter().collect()).collect(), names }
    }
}

/// Skew-symmetric matrix; only the strict upper triangle is stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewMat {
    n: usize,
    upper: BTreeMap<(usize, usize), GPoly>,
}

impl SkewMat {
    pub fn zeros(n: usize) -> Self {
        SkewMat { n, upper: BTreeMap::new() }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// `A[i,j]`, with `A[j,i] = −A[i,j]` and a zero diagonal.
    pub fn get(&self, i: usize, j: usize) -> GPoly {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.upper.get(&(i, j)).cloned().unwrap_or_else(GPoly::zero),
            std::cmp::Ordering::Greater => self.upper.get(&(j, i)).map(|p| -p).unwrap_or_else(GPoly::zero),
            std::cmp::Ordering::Equal => GPoly::zero(),
        }
    }

    /// Adds `p` to `A[i,j]` (and `−p` to `A[j,i]`).
    pub fn add(&mut self, i: usize, j: usize, p: &GPoly) {
        assert!(i != j, "skew matrices have a zero diagonal");
        let (key, p) = if i < j { ((i, j), p.clone()) } else { ((j, i), -p) };
        let entry = self.upper.entry(key).or_insert_with(GPoly::zero);
        entry.add_assign_ref(&p);
        if entry.is_zero() {
            self.upper.remove(&key);
        }
    }

    pub fn set(&mut self, i: usize, j: usize, p: GPoly) {
        let key = (i.min(j), i.max(j));
        self.upper.remove(&key);
        self.add(i, j, &p);
    }

    /// Nonzero upper-triangle entries `(i, j, A[i,j])` with `i < j`.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, &GPoly)> {
        self.upper.iter().map(|(&(i, j), p)| (i, j, p))
    }

    /// Neighbour lists of the sparsity pattern.
    pub fn pattern(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j) in self.upper.keys() {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }

    pub fn to_square(&self) -> SquareMat {
        let mut m = SquareMat::zeros(self.n);
        for (&(i, j), p) in &self.upper {
            m.set(i, j, p.clone());
            m.set(j, i, -p);
        }
        m
    }

    pub fn eval(&self, point: &dyn Fn(VarId) -> GaussRat) -> Vec<Vec<GaussRat>> {
        let mut a = vec![vec![GaussRat::zero(); self.n]; self.n];
        for (&(i, j), p) in &self.upper {
            let v = p.eval_with(point);
            a[j][i] = -&v;
            a[i][j] = v;
        }
        a
    }

    pub fn display_with<'a>(&'a self, names: &'a dyn Fn(VarId) -> String) -> SkewDisplay<'a> {
        SkewDisplay { m: self.to_square(), names }
    }
}

pub struct MatDisplay<'a> {
    rows: Vec<Vec<&'a GPoly>>,
    names: &'a dyn Fn(VarId) -> String,
}

fn write_grid(f: &mut fmt::Formatter<'_>, cells: Vec<Vec<String>>) -> fmt::Result {
    let width = cells.iter().flatten().map(|s| s.chars().count()).max().unwrap_or(1);
    for row in cells {
        let line: Vec<String> = row.iter().map(|s| format!("{s:>width$}")).collect();
        writeln!(f, "[ {} ]", line.join("  "))?;
    }
    Ok(())
}

impl fmt::Display for MatDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells = self
            .rows
            .iter()
            .map(|r| r.iter().map(|p| p.display_with(self.names).to_string()).collect())
            .collect();
        write_grid(f, cells)
    }
}

pub struct SkewDisplay<'a> {
    m: SquareMat,
    names: &'a dyn Fn(VarId) -> String,
}

impl fmt::Display for SkewDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.m.display_with(self.names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skew_storage_is_antisymmetric() {
        let mut a = SkewMat::zeros(3);
        a.add(2, 0, &GPoly::var(1));
        assert_eq!(a.get(0, 2), -GPoly::var(1));
        assert_eq!(a.get(2, 0), GPoly::var(1));
        a.add(0, 2, &GPoly::var(1));
        assert!(a.get(0, 2).is_zero());
        assert_eq!(a.upper_entries().count(), 0);
    }

    #[test]
    fn to_square_is_skew() {
        let mut a = SkewMat::zeros(4);
        a.set(0, 1, GPoly::var(0));
        a.set(3, 1, GPoly::from_int(2));
        let m = a.to_square();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m.get(i, j), &-m.get(j, i));
            }
        }
    }
}
