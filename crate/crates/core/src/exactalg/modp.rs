//! Arithmetic in `F_p[i]` for the Mersenne prime `p = 2^61 − 1`.
//!
//! Since `p ≡ 3 (mod 4)`, `−1` is not a square mod `p` and `F_p[i]` is the
//! field with `p²` elements. Gaussian-integer determinants whose Hadamard
//! bound stays below `p/2` are recovered exactly by a symmetric lift.

use std::ops::{Add, Mul, Neg, Sub};

pub const P: u64 = (1 << 61) - 1;

#[inline]
fn reduce(x: u128) -> u64 {
    let p = P as u128;
    let s = (x & p) + (x >> 61);
    let s = ((s & p) + (s >> 61)) as u64;
    if s >= P {
        s - P
    } else {
        s
    }
}

#[inline]
pub fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

#[inline]
pub fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

#[inline]
pub fn mul(a: u64, b: u64) -> u64 {
    reduce(a as u128 * b as u128)
}

pub fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    r
}

pub fn from_i64(x: i64) -> u64 {
    let r = x.rem_euclid(P as i64);
    r as u64
}

/// Symmetric representative in `(−p/2, p/2]`.
pub fn lift(x: u64) -> i64 {
    if x > P / 2 {
        -((P - x) as i64)
    } else {
        x as i64
    }
}

/// An element `re + im·i` of `F_p[i]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Fp2 {
    pub re: u64,
    pub im: u64,
}

impl Fp2 {
    pub const ZERO: Fp2 = Fp2 { re: 0, im: 0 };
    pub const ONE: Fp2 = Fp2 { re: 1, im: 0 };

    pub fn from_ints(re: i64, im: i64) -> Self {
        Fp2 { re: from_i64(re), im: from_i64(im) }
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn inv(self) -> Option<Fp2> {
        let n = add(mul(self.re, self.re), mul(self.im, self.im));
        if n == 0 {
            return None;
        }
        let ni = pow(n, P - 2);
        Some(Fp2 { re: mul(self.re, ni), im: mul(sub(0, self.im), ni) })
    }
}

impl Add for Fp2 {
    type Output = Fp2;
    fn add(self, o: Fp2) -> Fp2 {
        Fp2 { re: add(self.re, o.re), im: add(self.im, o.im) }
    }
}

impl Sub for Fp2 {
    type Output = Fp2;
    fn sub(self, o: Fp2) -> Fp2 {
        Fp2 { re: sub(self.re, o.re), im: sub(self.im, o.im) }
    }
}

impl Neg for Fp2 {
    type Output = Fp2;
    fn neg(self) -> Fp2 {
        Fp2 { re: sub(0, self.re), im: sub(0, self.im) }
    }
}

impl Mul for Fp2 {
    type Output = Fp2;
    fn mul(self, o: Fp2) -> Fp2 {
        let rr = self.re as u128 * o.re as u128;
        let ii = self.im as u128 * o.im as u128;
        let ri = self.re as u128 * o.im as u128 + self.im as u128 * o.re as u128;
        Fp2 { re: sub(reduce(rr), reduce(ii)), im: reduce(ri) }
    }
}

/// Determinant over `F_p[i]`; the matrix is consumed.
pub fn det(mut a: Vec<Vec<Fp2>>) -> Fp2 {
    let n = a.len();
    let mut acc = Fp2::ONE;
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return Fp2::ZERO;
        };
        if p != k {
            a.swap(p, k);
            acc = -acc;
        }
        let piv = a[k][k];
        acc = acc * piv;
        let inv = piv.inv().expect("nonzero pivot is invertible");
        let (top, bottom) = a.split_at_mut(k + 1);
        let prow = &top[k];
        for row in bottom.iter_mut() {
            if row[k].is_zero() {
                continue;
            }
            let f = row[k] * inv;
            for j in k + 1..n {
                if !prow[j].is_zero() {
                    row[j] = row[j] - f * prow[j];
                }
            }
            row[k] = Fp2::ZERO;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_inverse() {
        let z = Fp2::from_ints(3, -7);
        assert_eq!(z * z.inv().unwrap(), Fp2::ONE);
        let i = Fp2::from_ints(0, 1);
        assert_eq!(i * i, Fp2::from_ints(-1, 0));
    }

    #[test]
    fn reduce_handles_large_products() {
        let a = P - 1;
        assert_eq!(mul(a, a), 1);
        assert_eq!(lift(from_i64(-5)), -5);
    }

    #[test]
    fn small_determinant() {
        let m = vec![
            vec![Fp2::from_ints(1, 0), Fp2::from_ints(2, 0)],
            vec![Fp2::from_ints(3, 0), Fp2::from_ints(4, 1)],
        ];
        let d = det(m);
        assert_eq!((lift(d.re), lift(d.im)), (-2, 1));
    }
}
