//! Pfaffians: matching expansion, exact skew elimination, and a sparse
//! floating-point elimination for large numeric instances.

use num_traits::{One, Zero};

use super::gauss::GaussRat;
use super::matching::{matching_sign, MatchingGraph, DEFAULT_MATCHING_CAP};
use super::matrix::SkewMat;
use super::poly::{GPoly, VarId};
use crate::error::{precondition, Result};

pub enum PfMode<'a> {
    Symbolic,
    Evaluated(&'a dyn Fn(VarId) -> GaussRat),
}

pub fn pfaffian(a: &SkewMat, mode: PfMode<'_>) -> Result<super::det::DetValue> {
    use super::det::DetValue;
    match mode {
        PfMode::Symbolic => pfaffian_symbolic(a, DEFAULT_MATCHING_CAP).map(DetValue::Poly),
        PfMode::Evaluated(point) => pfaffian_eval(a, point).map(DetValue::Scalar),
    }
}

fn check_even(a: &SkewMat) -> Result<()> {
    if a.size() % 2 == 1 {
        return Err(precondition(format!("Pfaffian of odd size {}", a.size())));
    }
    Ok(())
}

/// Signed sum over the perfect matchings of the sparsity pattern.
pub fn pfaffian_symbolic(a: &SkewMat, cap: usize) -> Result<GPoly> {
    check_even(a)?;
    let entries: Vec<(usize, usize, &GPoly)> = a.upper_entries().collect();
    let g = MatchingGraph::new(a.size(), entries.iter().map(|&(i, j, _)| (i, j)).collect());
    let mut total = GPoly::zero();
    let mut pairs = Vec::with_capacity(a.size() / 2);
    g.for_each(cap, |m| {
        pairs.clear();
        let mut term = GPoly::one();
        for &k in m {
            let (i, j, p) = entries[k];
            pairs.push((i, j));
            term = &term * p;
        }
        if matching_sign(a.size(), &pairs) < 0 {
            total.sub_assign_ref(&term);
        } else {
            total.add_assign_ref(&term);
        }
    })?;
    Ok(total)
}

pub fn pfaffian_eval(a: &SkewMat, point: &dyn Fn(VarId) -> GaussRat) -> Result<GaussRat> {
    check_even(a)?;
    Ok(pfaffian_field(a.eval(point)))
}

/// Pfaffian of a dense skew matrix over the Gaussian rationals.
///
/// Uses `Pf(A) = p·Pf(S)` with `p = A[k,k+1]` and
/// `S[i,j] = A[i,j] + (A[k+1,i]·A[k,j] − A[k,i]·A[k+1,j]) / p`.
pub fn pfaffian_field(mut a: Vec<Vec<GaussRat>>) -> GaussRat {
    let n = a.len();
    if n % 2 == 1 {
        return GaussRat::zero();
    }
    let mut pf = GaussRat::one();
    for k in (0..n).step_by(2) {
        let Some(p) = (k + 1..n).find(|&j| !a[k][j].is_zero()) else {
            return GaussRat::zero();
        };
        if p != k + 1 {
            swap_sym(&mut a, k + 1, p);
            pf = -pf;
        }
        let piv = a[k][k + 1].clone();
        pf = &pf * &piv;
        let inv = piv.inv().expect("nonzero pivot");
        let rk = a[k].clone();
        let rk1 = a[k + 1].clone();
        for i in k + 2..n {
            for j in i + 1..n {
                let t = &(&rk1[i] * &rk[j]) - &(&rk[i] * &rk1[j]);
                if t.is_zero() {
                    continue;
                }
                let v = &a[i][j] + &(&t * &inv);
                a[j][i] = -&v;
                a[i][j] = v;
            }
        }
    }
    pf
}

fn swap_sym<T>(a: &mut [Vec<T>], x: usize, y: usize) {
    a.swap(x, y);
    for row in a.iter_mut() {
        row.swap(x, y);
    }
}

/// Pfaffian of a real sparse skew matrix given by upper-triangle entries.
///
/// Dense storage, but each elimination step only touches the columns where the
/// two pivot rows are nonzero, so banded inputs cost about `n·w²`. Pivots use
/// threshold partial pivoting along the pivot row.
pub fn pfaffian_f64(n: usize, upper: &[(usize, usize, f64)]) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    let mut a = vec![0.0f64; n * n];
    for &(i, j, v) in upper {
        a[i * n + j] += v;
        a[j * n + i] -= v;
    }
    let mut pf = 1.0f64;
    let mut touched: Vec<usize> = Vec::new();
    for k in (0..n).step_by(2) {
        let row = &a[k * n..(k + 1) * n];
        let mut best = k + 1;
        let mut best_abs = 0.0f64;
        for (j, &v) in row.iter().enumerate().skip(k + 1) {
            if v.abs() > best_abs {
                best_abs = v.abs();
                best = j;
            }
        }
        if best_abs == 0.0 {
            return 0.0;
        }
        if row[k + 1].abs() >= 0.1 * best_abs {
            best = k + 1;
        }
        if best != k + 1 {
            swap_sym_flat(&mut a, n, k + 1, best);
            pf = -pf;
        }
        let piv = a[k * n + k + 1];
        pf *= piv;
        touched.clear();
        for j in k + 2..n {
            if a[k * n + j] != 0.0 || a[(k + 1) * n + j] != 0.0 {
                touched.push(j);
            }
        }
        let inv = 1.0 / piv;
        for (ti, &i) in touched.iter().enumerate() {
            let (aki, ak1i) = (a[k * n + i], a[(k + 1) * n + i]);
            for &j in &touched[ti + 1..] {
                let t = (ak1i * a[k * n + j] - aki * a[(k + 1) * n + j]) * inv;
                if t != 0.0 {
                    a[i * n + j] += t;
                    a[j * n + i] -= t;
                }
            }
        }
    }
    pf
}

fn swap_sym_flat(a: &mut [f64], n: usize, x: usize, y: usize) {
    for c in 0..n {
        a.swap(x * n + c, y * n + c);
    }
    for r in 0..n {
        a.swap(r * n + x, r * n + y);
    }
}
