//! Determinants of polynomial matrices.
//!
//! Symbolic determinants are recovered by evaluating at a tensor grid of small
//! integer points and interpolating one variable at a time. Each evaluation is
//! done in `F_p[i]` when the Hadamard bound certifies that the symmetric lift is
//! exact, and by exact rational elimination otherwise.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::gauss::GaussRat;
use super::matrix::SquareMat;
use super::modp::{self, Fp2};
use super::poly::{GPoly, Monomial, VarId};
use super::series::series_inverse;
use crate::error::{Error, Result};

/// Largest matrix handled in symbolic mode by default.
pub const SYMBOLIC_DET_LIMIT: usize = 16;

/// Largest interpolation grid accepted by the symbolic determinant.
pub const MAX_GRID_POINTS: usize = 1 << 22;

pub enum DetMode<'a> {
    Symbolic,
    Evaluated(&'a dyn Fn(VarId) -> GaussRat),
    Truncated(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DetValue {
    Poly(GPoly),
    Scalar(GaussRat),
}

impl DetValue {
    pub fn into_poly(self) -> GPoly {
        match self {
            DetValue::Poly(p) => p,
            DetValue::Scalar(c) => GPoly::constant(c),
        }
    }
}

pub fn det(m: &SquareMat, mode: DetMode<'_>) -> Result<DetValue> {
    match mode {
        DetMode::Symbolic => det_symbolic(m).map(DetValue::Poly),
        DetMode::Evaluated(point) => Ok(DetValue::Scalar(det_eval(m, point))),
        DetMode::Truncated(cutoff) => det_truncated(m, cutoff).map(DetValue::Poly),
    }
}

pub fn det_symbolic(m: &SquareMat) -> Result<GPoly> {
    det_symbolic_with_limit(m, SYMBOLIC_DET_LIMIT)
}

pub fn det_symbolic_with_limit(m: &SquareMat, limit: usize) -> Result<GPoly> {
    if m.size() > limit {
        return Err(Error::Capacity {
            what: "symbolic determinant size",
            got: m.size(),
            limit,
            hint: "use evaluated mode instead",
        });
    }
    let (m, unit_factor) = strip_unit_rows(m);
    if m.size() == 0 {
        return Ok(GPoly::constant(unit_factor));
    }
    let vars = m.vars();
    if vars.is_empty() {
        let a = m.eval(&|_| GaussRat::zero());
        return Ok(GPoly::constant(&det_field(a) * &unit_factor));
    }
    let bounds: Vec<u32> = vars.iter().map(|&v| degree_bound(&m, v)).collect();
    let grid: usize = bounds.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d as usize + 1)).unwrap_or(usize::MAX);
    if grid > MAX_GRID_POINTS {
        return Err(Error::Capacity {
            what: "interpolation grid",
            got: grid,
            limit: MAX_GRID_POINTS,
            hint: "use evaluated mode instead",
        });
    }

    let scaled = ScaledMatrix::new(&m, &vars);
    let values = sample_grid(&scaled, &m, &vars, &bounds);
    let coeffs = interpolate(values, &bounds);

    let scale = GaussRat::real(BigRational::new(BigInt::one(), scaled.row_scale_product.clone()));
    let factor = &scale * &unit_factor;
    let mut out = GPoly::zero();
    let mut idx = vec![0u32; bounds.len()];
    for c in coeffs {
        if !c.is_zero() {
            let mono = Monomial::from_pairs(vars.iter().zip(&idx).map(|(&v, &e)| (v, e)).collect());
            out.add_term(mono, &(&c * &factor));
        }
        advance(&mut idx, &bounds);
    }
    Ok(out)
}

/// Removes rows whose only nonzero entry is a constant on the diagonal.
fn strip_unit_rows(m: &SquareMat) -> (SquareMat, GaussRat) {
    let n = m.size();
    let mut factor = GaussRat::one();
    let mut keep = Vec::with_capacity(n);
    for i in 0..n {
        let diag_const = m.get(i, i).as_constant();
        let only_diag = (0..n).all(|j| j == i || m.get(i, j).is_zero());
        match diag_const {
            Some(c) if only_diag => factor = &factor * &c,
            _ => keep.push(i),
        }
    }
    if keep.len() == n {
        return (m.clone(), factor);
    }
    (m.submatrix(&keep), factor)
}

/// Per-variable degree bound: the smaller of the row-wise and column-wise sums
/// of the largest degree in each line.
fn degree_bound(m: &SquareMat, v: VarId) -> u32 {
    let n = m.size();
    let rows: u32 = (0..n).map(|i| (0..n).map(|j| m.get(i, j).degree_in(v)).max().unwrap_or(0)).sum();
    let cols: u32 = (0..n).map(|j| (0..n).map(|i| m.get(i, j).degree_in(v)).max().unwrap_or(0)).sum();
    rows.min(cols)
}

/// Interpolation nodes 0, 1, −1, 2, −2, …
fn node(k: u32) -> i64 {
    let k = k as i64;
    if k % 2 == 1 {
        (k + 1) / 2
    } else {
        -k / 2
    }
}

fn advance(idx: &mut [u32], bounds: &[u32]) {
    for (i, b) in idx.iter_mut().zip(bounds) {
        if *i < *b {
            *i += 1;
            return;
        }
        *i = 0;
    }
}

/// A single entry term with Gaussian-integer coefficient after row scaling.
struct IntTerm {
    re: i64,
    im: i64,
    vars: Vec<(usize, u32)>,
}

/// The matrix with each row multiplied by the common denominator of its
/// coefficients, so integer points evaluate to Gaussian integers.
struct ScaledMatrix {
    n: usize,
    /// `None` when some scaled coefficient does not fit in `i64`.
    entries: Option<Vec<Vec<IntTerm>>>,
    row_scales: Vec<BigInt>,
    row_scale_product: BigInt,
}

impl ScaledMatrix {
    fn new(m: &SquareMat, vars: &[VarId]) -> Self {
        let n = m.size();
        let pos: BTreeMap<VarId, usize> = vars.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let mut row_scales = Vec::with_capacity(n);
        let mut entries = Some(Vec::with_capacity(n * n));
        for i in 0..n {
            let mut s = BigInt::one();
            for p in m.row(i) {
                for (_, c) in p.terms() {
                    s = s.lcm(&c.denom_lcm());
                }
            }
            for p in m.row(i) {
                let mut terms = Vec::new();
                for (mono, c) in p.terms() {
                    let re = (c.re.numer() * (&s / c.re.denom())).to_i64();
                    let im = (c.im.numer() * (&s / c.im.denom())).to_i64();
                    match (re, im) {
                        (Some(re), Some(im)) => terms.push(IntTerm {
                            re,
                            im,
                            vars: mono.pairs().iter().map(|&(v, e)| (pos[&v], e)).collect(),
                        }),
                        _ => entries = None,
                    }
                }
                if let Some(e) = entries.as_mut() {
                    e.push(terms);
                }
            }
            row_scales.push(s);
        }
        let row_scale_product = row_scales.iter().fold(BigInt::one(), |a, b| a * b);
        ScaledMatrix { n, entries, row_scales, row_scale_product }
    }
}

/// Scaled determinants (Gaussian integers) at every grid point, in mixed-radix
/// order with the first variable varying fastest.
fn sample_grid(s: &ScaledMatrix, m: &SquareMat, vars: &[VarId], bounds: &[u32]) -> Vec<GaussRat> {
    let total: usize = bounds.iter().map(|&d| d as usize + 1).product();
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0u32; bounds.len()];
    for _ in 0..total {
        let point: Vec<i64> = idx.iter().map(|&k| node(k)).collect();
        let value = s
            .entries
            .as_ref()
            .and_then(|entries| modular_point(entries, s.n, &point))
            .unwrap_or_else(|| exact_point(s, m, vars, &point));
        out.push(value);
        advance(&mut idx, bounds);
    }
    out
}

/// Determinant of the scaled matrix at an integer point through `F_p[i]`, or
/// `None` when the Hadamard bound does not certify the lift. Rows that reduce
/// to a diagonal entry at this point are expanded away first.
fn modular_point(entries: &[Vec<IntTerm>], n: usize, point: &[i64]) -> Option<GaussRat> {
    let mut a = vec![Fp2::ZERO; n * n];
    let mut mag = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Fp2::ZERO;
            let mut m = 0.0f64;
            for t in &entries[i * n + j] {
                let mut val = 1i64;
                let mut mono_mag = 1.0f64;
                let mut small = true;
                for &(k, e) in &t.vars {
                    let x = point[k];
                    mono_mag *= (x.unsigned_abs() as f64).powi(e as i32);
                    match x.checked_pow(e).and_then(|p| val.checked_mul(p)) {
                        Some(v) => val = v,
                        None => small = false,
                    }
                }
                if mono_mag == 0.0 {
                    continue;
                }
                let mono = if small {
                    Fp2 { re: modp::from_i64(val), im: 0 }
                } else {
                    t.vars.iter().fold(Fp2::ONE, |acc, &(k, e)| {
                        acc * Fp2 { re: modp::pow(modp::from_i64(point[k]), e as u64), im: 0 }
                    })
                };
                acc = acc + Fp2::from_ints(t.re, t.im) * mono;
                m += ((t.re as f64).powi(2) + (t.im as f64).powi(2)).sqrt() * mono_mag;
            }
            a[i * n + j] = acc;
            mag[i * n + j] = m;
        }
    }
    let mut log2_h = 0.0f64;
    let mut factor = Fp2::ONE;
    let mut keep = Vec::with_capacity(n);
    for i in 0..n {
        let off_diag_zero = (0..n).all(|j| j == i || mag[i * n + j] == 0.0);
        if off_diag_zero {
            if mag[i * n + i] == 0.0 {
                return Some(GaussRat::zero());
            }
            factor = factor * a[i * n + i];
            log2_h += mag[i * n + i].log2();
        } else {
            keep.push(i);
        }
    }
    let mut reduced = Vec::with_capacity(keep.len());
    for &i in &keep {
        let row_norm2: f64 = keep.iter().map(|&j| mag[i * n + j].powi(2)).sum();
        if row_norm2 == 0.0 {
            return Some(GaussRat::zero());
        }
        log2_h += 0.5 * row_norm2.log2();
        reduced.push(keep.iter().map(|&j| a[i * n + j]).collect::<Vec<_>>());
    }
    // one bit of slack for float rounding in the bound itself
    if log2_h >= 58.0 {
        return None;
    }
    let d = factor * modp::det(reduced);
    Some(GaussRat::from_ints(modp::lift(d.re), modp::lift(d.im)))
}

fn exact_point(s: &ScaledMatrix, m: &SquareMat, vars: &[VarId], point: &[i64]) -> GaussRat {
    let pos: BTreeMap<VarId, i64> = vars.iter().copied().zip(point.iter().copied()).collect();
    let mut a = m.eval(&|v| GaussRat::from_int(pos[&v]));
    for (row, sc) in a.iter_mut().zip(&s.row_scales) {
        let sc = GaussRat::real(BigRational::from_integer(sc.clone()));
        for x in row.iter_mut() {
            *x = &*x * &sc;
        }
    }
    det_field(a)
}

/// Inverse Vandermonde matrix for the first `d+1` nodes: row `k` gives the
/// coefficient of `x^k` as a combination of sample values.
fn inverse_vandermonde(d: u32) -> Vec<Vec<BigRational>> {
    let n = d as usize + 1;
    let xs: Vec<BigRational> = (0..n as u32).map(|k| BigRational::from_integer(node(k).into())).collect();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..n).map(|k| pow_rat(&xs[i], k)).collect();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&r| !a[r][k].is_zero()).expect("Vandermonde nodes are distinct");
        a.swap(k, p);
        let inv = a[k][k].recip();
        for x in a[k].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != k && !a[r][k].is_zero() {
                let f = a[r][k].clone();
                let pivot_row = a[k].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x = &*x - &(&f * y);
                }
            }
        }
    }
    // rows of [I | V^{-1}], where V[i][k] = x_i^k maps coefficients to values
    a.into_iter().map(|row| row[n..].to_vec()).collect()
}

fn pow_rat(x: &BigRational, k: usize) -> BigRational {
    let mut r = BigRational::one();
    for _ in 0..k {
        r = &r * x;
    }
    r
}

/// Converts grid samples into monomial coefficients, axis by axis. Samples of
/// the scaled matrix are Gaussian integers, and so is every intermediate
/// array, which allows the fast path in `i128`.
fn interpolate(values: Vec<GaussRat>, bounds: &[u32]) -> Vec<GaussRat> {
    interpolate_int(&values, bounds)
        .map(|v| {
            v.into_iter()
                .map(|(re, im)| {
                    GaussRat::new(BigRational::from_integer(BigInt::from(re)), BigRational::from_integer(BigInt::from(im)))
                })
                .collect()
        })
        .unwrap_or_else(|| interpolate_rat(values, bounds))
}

/// Integer rows `N` and denominator `D` with `N / D` the inverse Vandermonde matrix.
fn inverse_vandermonde_int(d: u32) -> Option<(Vec<Vec<i128>>, i128)> {
    let vinv = inverse_vandermonde(d);
    let den = vinv.iter().flatten().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let rows = vinv
        .iter()
        .map(|row| row.iter().map(|c| (c.numer() * (&den / c.denom())).to_i128()).collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()?;
    Some((rows, den.to_i128()?))
}

fn interpolate_int(values: &[GaussRat], bounds: &[u32]) -> Option<Vec<(i128, i128)>> {
    let mut vals: Vec<(i128, i128)> = values
        .iter()
        .map(|v| {
            if !v.re.is_integer() || !v.im.is_integer() {
                return None;
            }
            Some((v.re.numer().to_i128()?, v.im.numer().to_i128()?))
        })
        .collect::<Option<_>>()?;
    let dims: Vec<usize> = bounds.iter().map(|&d| d as usize + 1).collect();
    let mut stride = 1usize;
    let mut fiber = Vec::new();
    for (axis, &len) in dims.iter().enumerate() {
        let (rows, den) = inverse_vandermonde_int(bounds[axis])?;
        let block = stride * len;
        for base in (0..vals.len()).step_by(block) {
            for off in 0..stride {
                fiber.clear();
                fiber.extend((0..len).map(|k| vals[base + off + k * stride]));
                for (k, row) in rows.iter().enumerate() {
                    let (mut re, mut im) = (0i128, 0i128);
                    for (&c, &(yr, yi)) in row.iter().zip(&fiber) {
                        re = re.checked_add(c.checked_mul(yr)?)?;
                        im = im.checked_add(c.checked_mul(yi)?)?;
                    }
                    if re % den != 0 || im % den != 0 {
                        return None;
                    }
                    vals[base + off + k * stride] = (re / den, im / den);
                }
            }
        }
        stride = block;
    }
    Some(vals)
}

fn interpolate_rat(mut values: Vec<GaussRat>, bounds: &[u32]) -> Vec<GaussRat> {
    let dims: Vec<usize> = bounds.iter().map(|&d| d as usize + 1).collect();
    let mut stride = 1usize;
    for (axis, &len) in dims.iter().enumerate() {
        let vinv = inverse_vandermonde(bounds[axis]);
        let block = stride * len;
        let mut fiber = vec![GaussRat::zero(); len];
        for base in (0..values.len()).step_by(block) {
            for off in 0..stride {
                for (k, f) in fiber.iter_mut().enumerate() {
                    *f = values[base + off + k * stride].clone();
                }
                for (k, row) in vinv.iter().enumerate() {
                    let mut acc = GaussRat::zero();
                    for (c, y) in row.iter().zip(&fiber) {
                        if !c.is_zero() && !y.is_zero() {
                            acc += &GaussRat { re: c * &y.re, im: c * &y.im };
                        }
                    }
                    values[base + off + k * stride] = acc;
                }
            }
        }
        stride = block;
    }
    values
}

/// Determinant of a matrix of Gaussian rationals by elimination over the field.
pub fn det_field(mut a: Vec<Vec<GaussRat>>) -> GaussRat {
    let n = a.len();
    let mut acc = GaussRat::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return GaussRat::zero();
        };
        if p != k {
            a.swap(p, k);
            acc = -acc;
        }
        let piv = a[k][k].clone();
        acc = &acc * &piv;
        let inv = piv.inv().expect("nonzero pivot");
        let (top, bottom) = a.split_at_mut(k + 1);
        let prow = &top[k];
        for row in bottom.iter_mut() {
            if row[k].is_zero() {
                continue;
            }
            let f = &row[k] * &inv;
            for j in k + 1..n {
                if !prow[j].is_zero() {
                    let t = &f * &prow[j];
                    row[j] -= &t;
                }
            }
            row[k] = GaussRat::zero();
        }
    }
    acc
}

/// Evaluated mode: substitute, then eliminate over the Gaussian rationals.
pub fn det_eval(m: &SquareMat, point: &dyn Fn(VarId) -> GaussRat) -> GaussRat {
    det_field(m.eval(point))
}

/// Truncated mode: elimination over power series, dropping every term above
/// total degree `cutoff`. Pivots must have a nonzero constant term.
pub fn det_truncated(m: &SquareMat, cutoff: u32) -> Result<GPoly> {
    let n = m.size();
    let mut a: Vec<Vec<GPoly>> = (0..n).map(|i| m.row(i).iter().map(|p| p.truncate(cutoff)).collect()).collect();
    let mut acc = GPoly::one();
    for k in 0..n {
        let pivot = (k..n).find(|&r| !a[r][k].constant_term().is_zero());
        let Some(p) = pivot else {
            if (k..n).all(|r| a[r][k].is_zero()) {
                return Ok(GPoly::zero());
            }
            return Err(Error::Precondition(
                "truncated elimination needs a pivot with nonzero constant term".into(),
            ));
        };
        if p != k {
            a.swap(p, k);
            acc = -acc;
        }
        acc = acc.mul_trunc(&a[k][k], Some(cutoff));
        let inv = series_inverse(&a[k][k], cutoff)?;
        let (top, bottom) = a.split_at_mut(k + 1);
        let prow = &top[k];
        for row in bottom.iter_mut() {
            if row[k].is_zero() {
                continue;
            }
            let f = row[k].mul_trunc(&inv, Some(cutoff));
            for j in k + 1..n {
                if !prow[j].is_zero() {
                    let t = f.mul_trunc(&prow[j], Some(cutoff));
                    row[j].sub_assign_ref(&t);
                }
            }
            row[k] = GPoly::zero();
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn x(v: VarId) -> GPoly {
        GPoly::var(v)
    }

    fn c(re: i64, im: i64) -> GPoly {
        GPoly::constant(GaussRat::from_ints(re, im))
    }

    #[test]
    fn identity_determinant() {
        assert_eq!(det_symbolic(&SquareMat::identity(5)).unwrap(), GPoly::one());
    }

    #[test]
    fn planar_figure_eight_matrix() {
        // oriented edges ordered e1, e2, −e1, −e2
        let one = GPoly::one();
        let m = SquareMat::from_rows(vec![
            vec![&one + &x(1), -x(1), GPoly::zero(), &c(0, -1) * &x(1)],
            vec![-x(2), &one + &x(2), &c(0, 1) * &x(2), GPoly::zero()],
            vec![GPoly::zero(), &c(0, 1) * &x(1), &one + &x(1), -x(1)],
            vec![&c(0, -1) * &x(2), GPoly::zero(), -x(2), &one + &x(2)],
        ]);
        let expect = &(&one + &x(1)).pow(2) * &(&one + &x(2)).pow(2);
        assert_eq!(det_symbolic(&m).unwrap(), expect);
        assert_eq!(det_truncated(&m, 8).unwrap(), expect);
    }

    fn random_poly(rng: &mut ChaCha8Rng, nvars: u32) -> GPoly {
        let mut p = GPoly::zero();
        for _ in 0..rng.gen_range(0..3) {
            let mono = if rng.gen_bool(0.3) { Monomial::one() } else { Monomial::var(rng.gen_range(0..nvars)) };
            let coef = GaussRat::new(
                BigRational::new(rng.gen_range(-3..4).into(), rng.gen_range(1..3).into()),
                BigRational::from_integer(rng.gen_range(-1..2).into()),
            );
            p.add_term(mono, &coef);
        }
        p
    }

    #[test]
    fn symbolic_agrees_with_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let rows: Vec<Vec<GPoly>> = (0..6).map(|_| (0..6).map(|_| random_poly(&mut rng, 3)).collect()).collect();
            let m = SquareMat::from_rows(rows);
            let d = det_symbolic(&m).unwrap();
            for _ in 0..3 {
                let pt: Vec<GaussRat> = (0..3)
                    .map(|_| GaussRat::new(BigRational::new(rng.gen_range(-5..6).into(), rng.gen_range(1..4).into()), BigRational::zero()))
                    .collect();
                assert_eq!(d.eval(&pt), det_eval(&m, &|v| pt[v as usize].clone()));
            }
        }
    }

    #[test]
    fn truncated_matches_symbolic_truncation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let mut m = SquareMat::identity(5);
            for i in 0..5 {
                for j in 0..5 {
                    let extra = GPoly::var(rng.gen_range(0..3)).scale(&GaussRat::from_int(rng.gen_range(-2..3)));
                    let e = m.get(i, j) + &extra;
                    m.set(i, j, e);
                }
            }
            let full = det_symbolic(&m).unwrap();
            for cut in [0, 1, 2, 4] {
                assert_eq!(det_truncated(&m, cut).unwrap(), full.truncate(cut));
            }
        }
    }

    #[test]
    fn capacity_error_beyond_limit() {
        let m = SquareMat::identity(SYMBOLIC_DET_LIMIT + 1);
        assert!(matches!(det_symbolic(&m), Err(Error::Capacity { .. })));
    }

    #[test]
    fn singular_matrix_gives_zero() {
        let m = SquareMat::from_rows(vec![vec![x(0), x(0)], vec![x(1), x(1)]]);
        assert!(det_symbolic(&m).unwrap().is_zero());
    }

    #[test]
    fn node_sequence() {
        let v: Vec<i64> = (0..5).map(node).collect();
        assert_eq!(v, vec![0, 1, -1, 2, -2]);
    }
}
