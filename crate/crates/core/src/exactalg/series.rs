//! Square roots of multivariate power series with constant term 1.

use num_traits::One;

use super::gauss::GaussRat;
use super::poly::GPoly;
use crate::error::{Error, Result};

/// Square root `Q` of `p` with `Q(0) = 1`, computed up to total degree `cutoff`.
///
/// Homogeneous parts are solved in increasing degree from
/// `2·Q_d = P_d − Σ_{0<i<d} Q_i·Q_{d−i}`. When `2·cutoff ≥ deg p` the result
/// is only accepted if `Q² = p` exactly, so a non-square input is reported
/// instead of silently truncated.
pub fn series_sqrt(p: &GPoly, cutoff: u32) -> Result<GPoly> {
    if p.constant_term() != GaussRat::one() {
        return Err(Error::Precondition(format!(
            "series square root needs constant term 1, got {}",
            p.constant_term()
        )));
    }
    let half = GaussRat::from_frac(1, 2);
    let mut parts: Vec<GPoly> = vec![GPoly::one()];
    for d in 1..=cutoff {
        let mut rhs = p.homogeneous(d);
        for i in 1..d {
            let j = d - i;
            if i > j {
                break;
            }
            let prod = &parts[i as usize] * &parts[j as usize];
            if i == j {
                rhs.sub_assign_ref(&prod);
            } else {
                rhs.sub_assign_ref(&prod.scale(&GaussRat::from_int(2)));
            }
        }
        parts.push(rhs.scale(&half));
    }
    let q: GPoly = parts.into_iter().sum();
    let deg = p.total_degree();
    if 2 * cutoff >= deg {
        let residual = p - &(&q * &q);
        if !residual.is_zero() {
            let first = residual.terms().next().map(|(m, c)| format!("{c} at {m:?}")).unwrap_or_default();
            return Err(Error::NotASquare(format!("residual has {} terms, first {first}", residual.len())));
        }
    } else {
        debug_assert!((p - &(&q * &q)).truncate(cutoff).is_zero());
    }
    Ok(q)
}

/// Exact square root of a polynomial that is known to be a perfect square.
pub fn exact_sqrt(p: &GPoly) -> Result<GPoly> {
    series_sqrt(p, p.total_degree().div_ceil(2))
}

/// Product with every term above total degree `cutoff` dropped.
pub fn mul_truncated(p: &GPoly, q: &GPoly, cutoff: u32) -> GPoly {
    p.mul_trunc(q, Some(cutoff))
}

/// Inverse of a power series with invertible constant term, up to `cutoff`.
pub fn series_inverse(u: &GPoly, cutoff: u32) -> Result<GPoly> {
    let u0 = u.constant_term();
    let inv0 = u0
        .inv()
        .ok_or_else(|| Error::Precondition("series inverse needs a nonzero constant term".into()))?;
    // u = u0·(1 − t), 1/u = inv0·Σ t^k
    let mut t = u.clone();
    t.add_term(super::poly::Monomial::one(), &-u0);
    let t = t.scale(&-inv0.clone());
    let mut acc = GPoly::one();
    let mut power = GPoly::one();
    for _ in 0..cutoff {
        power = power.mul_trunc(&t, Some(cutoff));
        if power.is_zero() {
            break;
        }
        acc.add_assign_ref(&power);
    }
    Ok(acc.scale(&inv0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(v: u32) -> GPoly {
        GPoly::var(v)
    }

    #[test]
    fn square_of_binomial() {
        let p = (&GPoly::one() + &x(0)).pow(2);
        assert_eq!(series_sqrt(&p, 2).unwrap(), &GPoly::one() + &x(0));
    }

    #[test]
    fn torus_class_square() {
        let q = &(&(&GPoly::one() - &x(1)) - &x(2)) - &(&x(1) * &x(2));
        let p = &q * &q;
        assert_eq!(series_sqrt(&p, 2).unwrap(), q);
    }

    #[test]
    fn three_term_square() {
        let q = &(&GPoly::one() + &x(1)) + &x(2);
        assert_eq!(series_sqrt(&(&q * &q), 2).unwrap(), q);
    }

    #[test]
    fn non_square_is_rejected() {
        let p = &GPoly::one() + &x(0);
        assert!(matches!(series_sqrt(&p, 1), Err(Error::NotASquare(_))));
        // low cutoff only asks for agreement up to that degree
        let r = series_sqrt(&p, 0).unwrap();
        assert_eq!(r, GPoly::one());
    }

    #[test]
    fn constant_term_must_be_one() {
        assert!(series_sqrt(&GPoly::from_int(4), 3).is_err());
    }

    #[test]
    fn inverse_of_one_plus_x() {
        let u = &GPoly::one() + &x(0);
        let inv = series_inverse(&u, 4).unwrap();
        let prod = mul_truncated(&u, &inv, 4);
        assert_eq!(prod, GPoly::one());
    }
}
