//! Sparse multivariate polynomials over the Gaussian rationals.
//!
//! Variables are plain indices; naming lives with whoever owns the variable
//! table (see [`crate::combmap::VarTable`]).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::gauss::GaussRat;

pub type VarId = u32;

/// A monomial stored as `(var, exponent)` pairs sorted by variable, exponents > 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(VarId, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: VarId) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(VarId, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_unstable_by_key(|&(v, _)| v);
        let mut out: Vec<(VarId, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match out.last_mut() {
                Some((lv, le)) if *lv == v => *le += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    pub fn pairs(&self) -> &[(VarId, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.0.iter().find(|&&(w, _)| w == v).map_or(0, |&(_, e)| e)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_multilinear(&self) -> bool {
        self.0.iter().all(|&(_, e)| e <= 1)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &o.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Quotient `self / o` when `o` divides `self`.
    pub fn div(&self, o: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            let mut e = e;
            if j < o.0.len() && o.0[j].0 == v {
                if o.0[j].1 > e {
                    return None;
                }
                e -= o.0[j].1;
                j += 1;
            } else if j < o.0.len() && o.0[j].0 < v {
                return None;
            }
            if e > 0 {
                out.push((v, e));
            }
        }
        (j == o.0.len()).then_some(Monomial(out))
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.iter().map(|&(v, _)| v)
    }
}

impl Ord for Monomial {
    /// Graded order: lower total degree first; within a degree the monomial
    /// with the larger exponent on the lowest-indexed variable comes first.
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree().cmp(&o.degree()).then_with(|| {
            let (a, b) = (&self.0, &o.0);
            for k in 0..a.len().min(b.len()) {
                if a[k].0 != b[k].0 {
                    // the one mentioning the smaller variable has a larger exponent there
                    return a[k].0.cmp(&b[k].0);
                }
                if a[k].1 != b[k].1 {
                    return b[k].1.cmp(&a[k].1);
                }
            }
            a.len().cmp(&b.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// A polynomial with no stored zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GPoly {
    terms: BTreeMap<Monomial, GaussRat>,
}

impl GPoly {
    pub fn zero() -> Self {
        GPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        GPoly::constant(GaussRat::one())
    }

    pub fn constant(c: GaussRat) -> Self {
        GPoly::monomial(Monomial::one(), c)
    }

    pub fn from_int(n: i64) -> Self {
        GPoly::constant(GaussRat::from_int(n))
    }

    pub fn var(v: VarId) -> Self {
        GPoly::monomial(Monomial::var(v), GaussRat::one())
    }

    pub fn monomial(m: Monomial, c: GaussRat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        GPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussRat)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, GaussRat)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, m: &Monomial) -> GaussRat {
        self.terms.get(m).cloned().unwrap_or_else(GaussRat::zero)
    }

    pub fn constant_term(&self) -> GaussRat {
        self.coeff(&Monomial::one())
    }

    /// Returns the constant value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<GaussRat> {
        match self.terms.len() {
            0 => Some(GaussRat::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: &GaussRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, o: &GPoly) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn sub_assign_ref(&mut self, o: &GPoly) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), &-c);
        }
    }

    /// `self += a * b`, optionally dropping products above `cutoff` total degree.
    pub fn add_product(&mut self, a: &GPoly, b: &GPoly, cutoff: Option<u32>) {
        for (ma, ca) in &a.terms {
            let da = ma.degree();
            for (mb, cb) in &b.terms {
                if let Some(d) = cutoff {
                    if da + mb.degree() > d {
                        continue;
                    }
                }
                self.add_term(ma.mul(mb), &(ca * cb));
            }
        }
    }

    pub fn mul_trunc(&self, o: &GPoly, cutoff: Option<u32>) -> GPoly {
        let mut out = GPoly::zero();
        out.add_product(self, o, cutoff);
        out
    }

    pub fn scale(&self, c: &GaussRat) -> GPoly {
        if c.is_zero() {
            return GPoly::zero();
        }
        GPoly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn scale_int(&self, k: i64) -> GPoly {
        self.scale(&GaussRat::from_int(k))
    }

    pub fn pow(&self, e: u32) -> GPoly {
        let mut acc = GPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: VarId) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn is_multilinear(&self) -> bool {
        self.terms.keys().all(Monomial::is_multilinear)
    }

    /// Drops every term of total degree above `cutoff`.
    pub fn truncate(&self, cutoff: u32) -> GPoly {
        GPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= cutoff)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// The homogeneous component of degree `d`.
    pub fn homogeneous(&self, d: u32) -> GPoly {
        GPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Sorted list of variables that occur.
    pub fn vars(&self) -> Vec<VarId> {
        let mut v: Vec<VarId> = self.terms.keys().flat_map(|m| m.vars().collect::<Vec<_>>()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Evaluates at a point; `value(v)` supplies each variable.
    pub fn eval_with(&self, mut value: impl FnMut(VarId) -> GaussRat) -> GaussRat {
        let mut cache: BTreeMap<VarId, GaussRat> = BTreeMap::new();
        let mut acc = GaussRat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.pairs() {
                let x = cache.entry(v).or_insert_with(|| value(v));
                t = &t * &x.pow(e);
            }
            acc += &t;
        }
        acc
    }

    /// Evaluates with `point[v]` for each variable `v`.
    pub fn eval(&self, point: &[GaussRat]) -> GaussRat {
        self.eval_with(|v| point[v as usize].clone())
    }

    /// Substitutes constants for a subset of variables.
    pub fn substitute(&self, subs: &BTreeMap<VarId, GaussRat>) -> GPoly {
        let mut out = GPoly::zero();
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest = Vec::new();
            for &(v, e) in m.pairs() {
                match subs.get(&v) {
                    Some(x) => coef = &coef * &x.pow(e),
                    None => rest.push((v, e)),
                }
            }
            out.add_term(Monomial(rest), &coef);
        }
        out
    }

    /// Complex-float evaluation.
    pub fn eval_c64(&self, point: &[num_complex::Complex64]) -> num_complex::Complex64 {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_c64();
            for &(v, e) in m.pairs() {
                t *= point[v as usize].powu(e);
            }
            acc += t;
        }
        acc
    }

    pub fn display_with<'a>(&'a self, names: &'a dyn Fn(VarId) -> String) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }

    /// Sorted `(monomial string, coefficient string)` pairs for reports.
    pub fn term_strings(&self, names: &dyn Fn(VarId) -> String) -> Vec<(String, String)> {
        self.terms.iter().map(|(m, c)| (monomial_string(m, names), c.to_string())).collect()
    }
}

fn monomial_string(m: &Monomial, names: &dyn Fn(VarId) -> String) -> String {
    if m.is_one() {
        return "1".into();
    }
    m.pairs()
        .iter()
        .map(|&(v, e)| if e == 1 { names(v) } else { format!("{}^{}", names(v), e) })
        .collect::<Vec<_>>()
        .join("*")
}

pub struct PolyDisplay<'a> {
    poly: &'a GPoly,
    names: &'a dyn Fn(VarId) -> String,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.poly.terms.iter().enumerate() {
            let zero = num_rational::BigRational::zero();
            let negative = (c.im.is_zero() && c.re < zero) || (c.re.is_zero() && c.im < zero);
            let (sign, mag) = if negative { ("-", -c) } else { ("+", c.clone()) };
            if k == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let coef = if mag.is_real() || mag.re.is_zero() { mag.to_string() } else { format!("({mag})") };
            if m.is_one() {
                write!(f, "{coef}")?;
            } else if mag.is_one() {
                write!(f, "{}", monomial_string(m, self.names))?;
            } else {
                write!(f, "{coef}*{}", monomial_string(m, self.names))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for GPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |v: VarId| format!("x{v}");
        write!(f, "{}", self.display_with(&names))
    }
}

impl<'a> Add<&'a GPoly> for &'a GPoly {
    type Output = GPoly;
    fn add(self, o: &GPoly) -> GPoly {
        let mut out = self.clone();
        out.add_assign_ref(o);
        out
    }
}

impl<'a> Sub<&'a GPoly> for &'a GPoly {
    type Output = GPoly;
    fn sub(self, o: &GPoly) -> GPoly {
        let mut out = self.clone();
        out.sub_assign_ref(o);
        out
    }
}

impl<'a> Mul<&'a GPoly> for &'a GPoly {
    type Output = GPoly;
    fn mul(self, o: &GPoly) -> GPoly {
        self.mul_trunc(o, None)
    }
}

impl Add for GPoly {
    type Output = GPoly;
    fn add(mut self, o: GPoly) -> GPoly {
        self.add_assign_ref(&o);
        self
    }
}

impl Sub for GPoly {
    type Output = GPoly;
    fn sub(mut self, o: GPoly) -> GPoly {
        self.sub_assign_ref(&o);
        self
    }
}

impl Mul for GPoly {
    type Output = GPoly;
    fn mul(self, o: GPoly) -> GPoly {
        &self * &o
    }
}

impl Neg for GPoly {
    type Output = GPoly;
    fn neg(self) -> GPoly {
        GPoly { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl Neg for &GPoly {
    type Output = GPoly;
    fn neg(self) -> GPoly {
        self.clone().neg()
    }
}

impl std::iter::Sum for GPoly {
    fn sum<I: Iterator<Item = GPoly>>(iter: I) -> GPoly {
        iter.fold(GPoly::zero(), |acc, p| acc + p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(v: VarId) -> GPoly {
        GPoly::var(v)
    }

    #[test]
    fn expand_square() {
        let p = &GPoly::one() + &x(0);
        let sq = &p * &p;
        assert_eq!(sq.to_string(), "1 + 2*x0 + x0^2");
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let p = &x(0) - &x(0);
        assert!(p.is_zero());
        assert_eq!(p.len(), 0);
    }

    #[test]
    fn printing_order_is_graded() {
        let p = (&(&(&GPoly::one() + &x(1)) + &x(0)) + &(&x(0) * &x(1))) + x(0).pow(2);
        assert_eq!(p.to_string(), "1 + x0 + x1 + x0^2 + x0*x1");
    }

    #[test]
    fn monomial_division() {
        let a = Monomial::from_pairs(vec![(0, 2), (3, 1)]);
        let b = Monomial::from_pairs(vec![(0, 1)]);
        assert_eq!(a.div(&b), Some(Monomial::from_pairs(vec![(0, 1), (3, 1)])));
        assert_eq!(b.div(&a), None);
        assert_eq!(a.div(&Monomial::var(1)), None);
    }

    #[test]
    fn eval_and_substitute() {
        let p = &(&x(0) * &x(1)) + &GPoly::from_int(3);
        let v = p.eval(&[GaussRat::from_int(2), GaussRat::i()]);
        assert_eq!(v, GaussRat::from_ints(3, 2));
        let mut subs = BTreeMap::new();
        subs.insert(1, GaussRat::from_int(5));
        assert_eq!(p.substitute(&subs).to_string(), "3 + 5*x0");
    }

    #[test]
    fn complex_coefficients_display() {
        let p = GPoly::monomial(Monomial::var(2), GaussRat::from_ints(0, -1)) + GPoly::from_int(-2);
        assert_eq!(p.to_string(), "-2 - I*x2");
    }
}
