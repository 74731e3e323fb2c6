//! Exact Gaussian rationals `re + im·i` with `re, im ∈ Q`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat { re: BigRational::from_integer(n.into()), im: BigRational::zero() }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussRat {
            re: BigRational::from_integer(re.into()),
            im: BigRational::from_integer(im.into()),
        }
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        GaussRat {
            re: BigRational::new(num.into(), den.into()),
            im: BigRational::zero(),
        }
    }

    pub fn real(re: BigRational) -> Self {
        GaussRat { re, im: BigRational::zero() }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussRat::from_ints(0, 1)
    }

    /// `i^k` for any integer `k`.
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => GaussRat::from_ints(1, 0),
            1 => GaussRat::from_ints(0, 1),
            2 => GaussRat::from_ints(-1, 0),
            _ => GaussRat::from_ints(0, -1),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRat { re: self.re.clone(), im: -self.im.clone() }
    }

    /// `|z|²`, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussRat { re: &self.re / &n, im: -(&self.im / &n) })
    }

    /// True when both parts are integers.
    pub fn is_gauss_int(&self) -> bool {
        self.re.is_integer() && self.im.is_integer()
    }

    /// Least common multiple of the denominators of both parts.
    pub fn denom_lcm(&self) -> BigInt {
        num_integer::Integer::lcm(self.re.denom(), self.im.denom())
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Nearest exact value to a float (continued-fraction free: uses the binary expansion).
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(GaussRat::real)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = GaussRat::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self * &GaussRat::from_int(k)
    }
}

impl Zero for GaussRat {
    fn zero() -> Self {
        GaussRat { re: BigRational::zero(), im: BigRational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRat {
    fn one() -> Self {
        GaussRat::from_int(1)
    }
}

impl From<i64> for GaussRat {
    fn from(n: i64) -> Self {
        GaussRat::from_int(n)
    }
}

impl<'a> Add<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRat::real(&self.re * &o.re);
        }
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl<'a> Div<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn div(self, o: &GaussRat) -> GaussRat {
        let inv = o.inv().expect("division by zero Gaussian rational");
        self * &inv
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GaussRat {
            type Output = GaussRat;
            fn $m(self, o: GaussRat) -> GaussRat {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a GaussRat> for GaussRat {
            type Output = GaussRat;
            fn $m(self, o: &GaussRat) -> GaussRat {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -self.re, im: -self.im }
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -&self.re, im: -&self.im }
    }
}

impl AddAssign<&GaussRat> for GaussRat {
    fn add_assign(&mut self, o: &GaussRat) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&GaussRat> for GaussRat {
    fn sub_assign(&mut self, o: &GaussRat) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&GaussRat> for GaussRat {
    fn mul_assign(&mut self, o: &GaussRat) {
        *self = &*self * o;
    }
}

fn fmt_rat(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for GaussRat {
    /// Formats as `a`, `b*I` or `a+b*I`, the same syntax [`FromStr`] accepts.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rat(&self.re)),
            (true, false) if self.im.is_one() => write!(f, "I"),
            (true, false) if (-&self.im).is_one() => write!(f, "-I"),
            (true, false) => write!(f, "{}*I", fmt_rat(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                if self.im.abs().is_one() {
                    write!(f, "{}{}I", fmt_rat(&self.re), sign)
                } else {
                    write!(f, "{}{}{}*I", fmt_rat(&self.re), sign, fmt_rat(&self.im.abs()))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid Gaussian rational literal `{0}`")]
pub struct ParseGaussRatError(pub String);

fn parse_rat(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let ok = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    let q = match body.split_once('/') {
        Some((n, d)) if ok(n) && ok(d) => {
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            BigRational::new(n.parse().ok()?, d)
        }
        None if ok(body) => BigRational::from_integer(body.parse().ok()?),
        None => {
            // decimal literal such as 0.3
            let (ip, fp) = body.split_once('.')?;
            if !(ip.is_empty() || ok(ip)) || !ok(fp) {
                return None;
            }
            let digits = format!("{ip}{fp}");
            let den = BigInt::from(10u32).pow(fp.len() as u32);
            BigRational::new(digits.parse().ok()?, den)
        }
        _ => return None,
    };
    Some(if neg { -q } else { q })
}

impl FromStr for GaussRat {
    type Err = ParseGaussRatError;

    /// Accepts `p`, `p/q`, decimals, `b*I`, `a+b*I`, `a-b*I` and bare `I`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseGaussRatError(s.to_string());
        let mut t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.ends_with('I') && !t.ends_with("*I") {
            // a bare `I` has coefficient one
            t.insert_str(t.len() - 1, "1*");
        }
        if let Some(body) = t.strip_suffix("*I") {
            // split at the last sign that is not leading
            let split = body
                .char_indices()
                .filter(|&(k, c)| k > 0 && (c == '+' || c == '-'))
                .map(|(k, _)| k)
                .last();
            return match split {
                Some(k) => {
                    let re = parse_rat(&body[..k]).ok_or_else(err)?;
                    let im = parse_rat(&body[k..]).ok_or_else(err)?;
                    Ok(GaussRat { re, im })
                }
                None => Ok(GaussRat { re: BigRational::zero(), im: parse_rat(body).ok_or_else(err)? }),
            };
        }
        parse_rat(&t).map(GaussRat::real).ok_or_else(err)
    }
}
