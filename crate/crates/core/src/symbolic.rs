//! Exact reals of the shape `c * pi^(h/2) * sqrt(r)`.

use std::fmt;
use std::ops::{Div, Mul};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::squarefree_decomposition;
use crate::{Error, Result};

/// `coefficient * pi^(pi_half_exponent / 2) * sqrt(radicand)` with a
/// squarefree positive radicand.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolicReal {
    coefficient: BigRational,
    pi_half_exponent: i64,
    radicand: BigInt,
}

impl SymbolicReal {
    pub fn rational(c: BigRational) -> Self {
        Self { coefficient: c, pi_half_exponent: 0, radicand: BigInt::one() }
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    /// `pi^(h/2)`.
    pub fn pi_half_power(h: i64) -> Self {
        Self { coefficient: BigRational::one(), pi_half_exponent: h, radicand: BigInt::one() }
    }

    /// `sqrt(n)` with the square part pulled into the coefficient.
    pub fn sqrt(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("square root of zero".into()));
        }
        let (core, t) = squarefree_decomposition(n);
        Ok(Self {
            coefficient: BigRational::from_integer(BigInt::from(t)),
            pi_half_exponent: 0,
            radicand: BigInt::from(core),
        })
    }

    /// Assembles from parts, requiring the radicand to be squarefree.
    pub fn from_parts(coefficient: BigRational, pi_half_exponent: i64, radicand: BigInt) -> Result<Self> {
        if !radicand.is_positive() || !is_squarefree(&radicand) {
            return Err(Error::Precondition(format!("radicand {radicand} is not squarefree and positive")));
        }
        Ok(Self { coefficient, pi_half_exponent, radicand })
    }

    pub fn coefficient(&self) -> &BigRational {
        &self.coefficient
    }

    pub fn pi_half_exponent(&self) -> i64 {
        self.pi_half_exponent
    }

    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.coefficient.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.is_zero() || (self.pi_half_exponent == 0 && self.radicand.is_one())
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.coefficient.clone())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self { coefficient: &self.coefficient * c, ..self.clone() }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        let r = BigRational::from_integer(self.radicand.clone());
        Self {
            coefficient: (&self.coefficient * r).recip(),
            pi_half_exponent: -self.pi_half_exponent,
            radicand: self.radicand.clone(),
        }
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.recip() } else { self.clone() };
        (0..e.unsigned_abs()).fold(Self::one(), |acc, _| &acc * &base)
    }

    /// Decimal approximation with `digits` digits after the point.
    pub fn to_decimal(&self, digits: usize) -> String {
        let guard = digits + 20;
        let scale = BigInt::from(10).pow(guard as u32);
        let pi = pi_fixed(guard);
        // value * 10^guard, carried as a fixed-point integer
        let mut acc = scale.clone();
        let sqrt_pi = (&pi * &scale).sqrt();
        let h = self.pi_half_exponent;
        let (whole, half) = (h.div_euclid(2), h.rem_euclid(2));
        for _ in 0..whole.unsigned_abs() {
            acc = if whole > 0 { &acc * &pi / &scale } else { &acc * &scale / &pi };
        }
        if half == 1 {
            acc = &acc * &sqrt_pi / &scale;
        }
        let root = (&self.radicand * &scale * &scale).sqrt();
        acc = &acc * root / &scale;
        acc = acc * self.coefficient.numer() / self.coefficient.denom();
        format_fixed(&acc, guard, digits)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_decimal(20).parse().unwrap_or(f64::NAN)
    }
}

fn is_squarefree(n: &BigInt) -> bool {
    match u64::try_from(n.clone()) {
        Ok(v) => squarefree_decomposition(v).1 == 1,
        Err(_) => true,
    }
}

impl<'a> Mul<&'a SymbolicReal> for &'a SymbolicReal {
    type Output = SymbolicReal;

    fn mul(self, rhs: &'a SymbolicReal) -> SymbolicReal {
        // For squarefree a, b with g = gcd(a, b): sqrt(a) sqrt(b) = g sqrt(ab / g^2),
        // and ab / g^2 is again squarefree.
        let g = self.radicand.gcd(&rhs.radicand);
        let radicand = (&self.radicand / &g) * (&rhs.radicand / &g);
        SymbolicReal {
            coefficient: &self.coefficient * &rhs.coefficient * BigRational::from_integer(g),
            pi_half_exponent: self.pi_half_exponent + rhs.pi_half_exponent,
            radicand,
        }
    }
}

impl Mul for SymbolicReal {
    type Output = SymbolicReal;

    fn mul(self, rhs: SymbolicReal) -> SymbolicReal {
        &self * &rhs
    }
}

impl<'a> Div<&'a SymbolicReal> for &'a SymbolicReal {
    type Output = SymbolicReal;

    fn div(self, rhs: &'a SymbolicReal) -> SymbolicReal {
        self * &rhs.recip()
    }
}

impl Div for SymbolicReal {
    type Output = SymbolicReal;

    fn div(self, rhs: SymbolicReal) -> SymbolicReal {
        &self / &rhs
    }
}

impl fmt::Display for SymbolicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coefficient)?;
        if self.is_zero() {
            return Ok(());
        }
        match self.pi_half_exponent {
            0 => {}
            h if h % 2 == 0 => write!(f, " * pi^{}", h / 2)?,
            h => write!(f, " * pi^({h}/2)")?,
        }
        if !self.radicand.is_one() {
            write!(f, " * sqrt({})", self.radicand)?;
        }
        Ok(())
    }
}

/// `floor(pi * 10^digits)` by Machin's formula.
pub fn pi_fixed(digits: usize) -> BigInt {
    let guard = digits + 10;
    let scale = BigInt::from(10).pow(guard as u32);
    let arctan_inv = |x: u64| -> BigInt {
        let x = BigInt::from(x);
        let x2 = &x * &x;
        let mut term = &scale / &x;
        let mut sum = BigInt::zero();
        let mut k = 0u64;
        while !term.is_zero() {
            let t = &term / BigInt::from(2 * k + 1);
            if k % 2 == 0 {
                sum += t;
            } else {
                sum -= t;
            }
            term /= &x2;
            k += 1;
        }
        sum
    };
    let pi = (arctan_inv(5) * 16) - (arctan_inv(239) * 4);
    pi / BigInt::from(10).pow(10)
}

fn format_fixed(v: &BigInt, scale_digits: usize, digits: usize) -> String {
    let drop = BigInt::from(10).pow((scale_digits - digits) as u32);
    let half = &drop / 2;
    let neg = v.sign() == Sign::Minus;
    let rounded: BigInt = (v.abs() + half) / drop;
    let s = rounded.to_string();
    let s = format!("{s:0>width$}", width = digits + 1);
    let (int, frac) = s.split_at(s.len() - digits);
    let sign = if neg && !rounded.is_zero() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn surd_products() {
        let a = SymbolicReal::sqrt(6).unwrap();
        let b = SymbolicReal::sqrt(10).unwrap();
        let p = &a * &b;
        assert_eq!(p.coefficient(), &q(2, 1));
        assert_eq!(p.radicand(), &BigInt::from(15));
        let s = SymbolicReal::sqrt(12).unwrap();
        assert_eq!((s.coefficient().clone(), s.radicand().clone()), (q(2, 1), BigInt::from(3)));
        assert!((&s * &s).is_rational());
    }

    #[test]
    fn exhaustive_radicand_arithmetic() {
        for a in 1..=100u64 {
            for b in 1..=100u64 {
                let p = &SymbolicReal::sqrt(a).unwrap() * &SymbolicReal::sqrt(b).unwrap();
                let direct = SymbolicReal::sqrt(a * b).unwrap();
                assert_eq!(p, direct, "sqrt({a}) sqrt({b})");
            }
        }
    }

    #[test]
    fn reciprocal_and_powers() {
        let x = &SymbolicReal::pi_half_power(3) * &SymbolicReal::sqrt(5).unwrap().scale(&q(2, 7));
        assert_eq!(&x * &x.recip(), SymbolicReal::one());
        assert_eq!(x.pow(2), &x * &x);
        assert_eq!(x.pow(-1), x.recip());
        assert_eq!(x.pow(0), SymbolicReal::one());
    }

    #[test]
    fn decimals() {
        assert_eq!(SymbolicReal::pi_half_power(2).to_decimal(10), "3.1415926536");
        assert_eq!(SymbolicReal::sqrt(2).unwrap().to_decimal(6), "1.414214");
        assert_eq!(SymbolicReal::rational(q(-1, 3)).to_decimal(4), "-0.3333");
        assert_eq!(SymbolicReal::pi_half_power(-1).to_decimal(6), "0.564190");
    }

    #[test]
    fn rejects_square_radicand() {
        assert!(SymbolicReal::from_parts(q(1, 1), 0, BigInt::from(8)).is_err());
        assert!(SymbolicReal::from_parts(q(1, 1), 0, BigInt::from(30)).is_ok());
    }
}
