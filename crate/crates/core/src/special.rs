//! Bernoulli numbers, Kronecker symbols and closed forms of `zeta(2k)`,
//! `L(k, chi_D)` and products of `Gamma(k/2)`.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::squarefree_decomposition;
use crate::symbolic::SymbolicReal;
use crate::{Error, Result};

static BERNOULLI: Mutex<Vec<BigRational>> = Mutex::new(Vec::new());

fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `n!! = n (n - 2) (n - 4) ...`, ending at 1 or 2.
pub fn double_factorial(n: u64) -> BigInt {
    (1..=n).rev().step_by(2).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Bernoulli number `B_n` with `B_1 = -1/2`. Odd `n > 1` give zero.
pub fn bernoulli(n: usize) -> BigRational {
    let mut cache = BERNOULLI.lock().unwrap_or_else(|e| e.into_inner());
    while cache.len() <= n {
        let m = cache.len() as u64;
        let b = if m == 0 {
            BigRational::one()
        } else if m > 1 && m % 2 == 1 {
            BigRational::zero()
        } else {
            // sum_{k=0}^{m} C(m+1, k) B_k = 0
            let s = (0..m).fold(BigRational::zero(), |acc, k| {
                acc + BigRational::from_integer(binomial(m + 1, k)) * &cache[k as usize]
            });
            -s / BigRational::from_integer(BigInt::from(m + 1))
        };
        cache.push(b);
    }
    cache[n].clone()
}

/// Bernoulli polynomial `B_n(x)`.
pub fn bernoulli_poly(n: usize, x: &BigRational) -> BigRational {
    (0..=n).fold(BigRational::zero(), |acc, j| {
        acc + BigRational::from_integer(binomial(n as u64, j as u64))
            * bernoulli(j)
            * num_traits::pow(x.clone(), n - j)
    })
}

fn jacobi(mut a: BigInt, mut n: BigInt) -> i8 {
    debug_assert!(n.is_positive() && n.is_odd());
    a = a.mod_floor(&n);
    let mut t = 1i8;
    let (three, five) = (BigInt::from(3), BigInt::from(5));
    let eight = BigInt::from(8);
    while !a.is_zero() {
        while a.is_even() {
            a /= 2;
            let r = n.mod_floor(&eight);
            if r == three || r == five {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&BigInt::from(4)) == three && n.mod_floor(&BigInt::from(4)) == three {
            t = -t;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        t
    } else {
        0
    }
}

/// Kronecker symbol `(d / n)`.
pub fn kronecker(d: i64, n: i64) -> i8 {
    let (d, mut n) = (BigInt::from(d), BigInt::from(n));
    if n.is_zero() {
        return if d.abs().is_one() { 1 } else { 0 };
    }
    let mut t = 1i8;
    if n.is_negative() {
        n = -n;
        if d.is_negative() {
            t = -t;
        }
    }
    let mut v = 0u32;
    while n.is_even() {
        n /= 2;
        v += 1;
    }
    if v > 0 {
        if d.is_even() {
            return 0;
        }
        let r = d.mod_floor(&BigInt::from(8));
        if v % 2 == 1 && (r == BigInt::from(3) || r == BigInt::from(5)) {
            t = -t;
        }
    }
    if n.is_one() {
        return t;
    }
    t * jacobi(d, n)
}

/// Discriminant `D` of `Q(sqrt(m))` and `t` with `m = d0 t^2`, `d0`
/// squarefree. `m = 1` gives `(1, 1)`.
pub fn fundamental_discriminant(m: i64) -> Result<(i64, u64)> {
    if m == 0 {
        return Err(Error::Precondition("fundamental discriminant of zero".into()));
    }
    let (core, t) = squarefree_decomposition(m.unsigned_abs());
    let d0 = m.signum() * core as i64;
    let d = if d0.rem_euclid(4) == 1 { d0 } else { 4 * d0 };
    Ok((d, t))
}

/// `B_{k, chi_D} = f^{k-1} sum_{a=1}^{f} chi_D(a) B_k(a / f)` with `f = |D|`.
pub fn generalized_bernoulli(k: usize, d: i64) -> BigRational {
    if d == 1 {
        return bernoulli(k);
    }
    let f = d.abs();
    let fr = BigRational::from_integer(BigInt::from(f));
    let sum = (1..=f).fold(BigRational::zero(), |acc, a| match kronecker(d, a) {
        0 => acc,
        c => {
            let x = BigRational::new(BigInt::from(a), BigInt::from(f));
            acc + BigRational::from_integer(BigInt::from(c)) * bernoulli_poly(k, &x)
        }
    });
    num_traits::pow(fr, k - 1) * sum
}

/// `zeta(k2)` for even `k2 >= 2`.
pub fn zeta_closed(k2: usize) -> Result<SymbolicReal> {
    if k2 < 2 || k2 % 2 == 1 {
        return Err(Error::Precondition(format!("zeta closed form needs an even argument >= 2, got {k2}")));
    }
    let k = k2 / 2;
    let sign = if k % 2 == 1 { 1 } else { -1 };
    let c = bernoulli(k2)
        * BigRational::from_integer(BigInt::from(sign) * BigInt::from(2).pow((k2 - 1) as u32))
        / BigRational::from_integer(factorial(k2 as u64));
    Ok(SymbolicReal::pi_half_power(2 * k2 as i64).scale(&c))
}

/// `zeta(1 - 2k) = -B_{2k} / 2k`.
pub fn zeta_negative(k: usize) -> BigRational {
    -bernoulli(2 * k) / BigRational::from_integer(BigInt::from(2 * k))
}

/// `L(k, chi_D)` for a fundamental discriminant `D` with `chi_D(-1) = (-1)^k`.
pub fn l_closed(k: usize, d: i64) -> Result<SymbolicReal> {
    if d == 1 {
        return zeta_closed(k);
    }
    if k == 0 {
        return Err(Error::Precondition("L-value at 0 is not a closed form here".into()));
    }
    let a = if d > 0 { 0 } else { 1 };
    if (k + a) % 2 == 1 {
        return Err(Error::Precondition(format!(
            "parity mismatch: chi_{d}(-1) = {} but k = {k}",
            if d > 0 { 1 } else { -1 }
        )));
    }
    let f = d.unsigned_abs();
    let sign: i64 = if (1 + (k - a) / 2) % 2 == 0 { 1 } else { -1 };
    // (-1)^{1+(k-a)/2} (sqrt f / 2) (2 pi / f)^k B_{k,chi} / k!
    let c = BigRational::from_integer(BigInt::from(sign) * BigInt::from(2).pow(k as u32))
        * generalized_bernoulli(k, d)
        / BigRational::from_integer(BigInt::from(2) * BigInt::from(f).pow(k as u32) * factorial(k as u64));
    Ok(&SymbolicReal::pi_half_power(2 * k as i64) * &SymbolicReal::sqrt(f)?.scale(&c))
}

/// `L(1 - k, chi_D) = -B_{k, chi_D} / k`.
pub fn l_negative(k: usize, d: i64) -> BigRational {
    -generalized_bernoulli(k, d) / BigRational::from_integer(BigInt::from(k))
}

/// `Gamma(k/2)` for `k >= 1`.
pub fn gamma_half(k: u64) -> SymbolicReal {
    assert!(k >= 1, "Gamma(k/2) needs k >= 1");
    if k % 2 == 0 {
        SymbolicReal::rational(BigRational::from_integer(factorial(k / 2 - 1)))
    } else {
        // Gamma(j + 1/2) = (2j)! / (4^j j!) sqrt(pi)
        let j = (k - 1) / 2;
        let c = BigRational::new(factorial(2 * j), BigInt::from(4).pow(j as u32) * factorial(j));
        SymbolicReal::pi_half_power(1).scale(&c)
    }
}

/// `prod_{k=1}^{rho} pi^{-k/2} Gamma(k/2)`.
pub fn gamma_factor(rho: u64) -> SymbolicReal {
    (1..=rho).fold(SymbolicReal::one(), |acc, k| {
        &(&acc * &SymbolicReal::pi_half_power(-(k as i64))) * &gamma_half(k)
    })
}

/// `gamma_m = prod_{k=1}^{m} pi^{k/2} Gamma(k/2)^{-1}`.
pub fn gamma_m(m: u64) -> SymbolicReal {
    let mut acc = SymbolicReal::one();
    for k in 1..=m {
        acc = &(&acc * &SymbolicReal::pi_half_power(k as i64)) / &gamma_half(k);
    }
    acc
}
