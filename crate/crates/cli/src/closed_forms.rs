//! Closed-form volumes of the example families.
//!
//! Everything here is computed from scratch: Bernoulli numbers by the
//! Akiyama-Tanigawa algorithm, Kronecker symbols by Euler's criterion,
//! generalized Bernoulli numbers from Bernoulli polynomials. None of it
//! calls into the engine, so agreement with the Euler-product route is a
//! genuine cross-check.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn two_pow(e: i64) -> BigRational {
    let p = BigRational::from_integer(BigInt::one() << e.unsigned_abs());
    if e >= 0 { p } else { p.recip() }
}

fn int_pow(b: i64, e: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(b).pow(e))
}

/// `B_n` with `B_1 = +1/2`.
pub fn bernoulli(n: usize) -> BigRational {
    let mut a: Vec<BigRational> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        a.push(q(1, m as i64 + 1));
        for j in (1..=m).rev() {
            a[j - 1] = (&a[j - 1] - &a[j]) * BigRational::from_integer(BigInt::from(j));
        }
    }
    a[0].clone()
}

/// `B_2 B_4 ... B_{2k}`.
pub fn bernoulli_product(k: usize) -> BigRational {
    (1..=k).map(|i| bernoulli(2 * i)).fold(BigRational::one(), |acc, b| acc * b)
}

/// `(2k)!! = 2 * 4 * ... * 2k`.
pub fn even_double_factorial(k: u64) -> BigRational {
    BigRational::from_integer((1..=k).map(|i| BigInt::from(2 * i)).product())
}

pub fn factorial(n: u64) -> BigRational {
    BigRational::from_integer((1..=n).map(BigInt::from).product())
}

fn binomial(n: usize, k: usize) -> BigRational {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    BigRational::from_integer(c)
}

/// Bernoulli polynomial `B_k(x) = sum_j C(k, j) B_j x^(k-j)` with `B_1 = -1/2`.
fn bernoulli_polynomial(k: usize, x: &BigRational) -> BigRational {
    let mut s = BigRational::zero();
    for j in 0..=k {
        let b = if j == 1 { q(-1, 2) } else { bernoulli(j) };
        let mut xp = BigRational::one();
        for _ in 0..k - j {
            xp *= x;
        }
        s += binomial(k, j) * b * xp;
    }
    s
}

/// Distinct prime divisors by trial division.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut ps = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            ps.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        ps.push(n);
    }
    ps
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Kronecker symbol `(D / n)` for `n >= 1`, built from Legendre symbols at
/// each prime factor of `n`.
pub fn kronecker(d: i64, n: u64) -> i64 {
    let mut result = 1;
    let mut n = n;
    let mut p = 2;
    while n > 1 {
        if p * p > n {
            p = n;
        }
        while n % p == 0 {
            n /= p;
            result *= if p == 2 {
                match d.rem_euclid(8) {
                    1 | 7 => 1,
                    3 | 5 => -1,
                    _ => 0,
                }
            } else {
                let a = d.rem_euclid(p as i64) as u64;
                match pow_mod(a, (p - 1) / 2, p) {
                    0 => 0,
                    1 => 1,
                    _ => -1,
                }
            };
        }
        p += 1;
    }
    result
}

/// `B_{k,chi_D} = |D|^(k-1) sum_{a=1}^{|D|} chi_D(a) B_k(a/|D|)`.
pub fn generalized_bernoulli(k: usize, d: i64) -> BigRational {
    if d == 1 {
        return bernoulli(k);
    }
    let f = d.unsigned_abs();
    let mut s = BigRational::zero();
    for a in 1..=f {
        let c = kronecker(d, a);
        if c != 0 {
            s += bernoulli_polynomial(k, &q(a as i64, f as i64)) * BigRational::from_integer(BigInt::from(c));
        }
    }
    s * int_pow(f as i64, (k - 1) as u32)
}

/// Writes `d = d0 t^2` with `d0` squarefree; returns `(D, d0, t)` where `D`
/// is the discriminant of `Q(sqrt d)`.
pub fn real_quadratic_discriminant(d: u64) -> (i64, u64, u64) {
    let mut d0 = 1;
    let mut t = 1;
    let mut n = d;
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        t *= p.pow(e / 2);
        if e % 2 == 1 {
            d0 *= p;
        }
        p += 1;
    }
    d0 *= n;
    let disc = if d0 % 4 == 1 { d0 } else { 4 * d0 };
    (disc as i64, d0, t)
}

fn delta(a: u64, b: u64) -> i64 {
    i64::from(a == b)
}

/// Volume of `O+(II_{2,8m+2})`.
pub fn vol_ii(m: usize) -> BigRational {
    let k = 4 * m + 1;
    two_pow(-(k as i64)) * bernoulli_product(k) / even_double_factorial(k as u64) * bernoulli(k + 1)
        / q(k as i64 + 1, 1)
}

/// Volume of the stable group of `T_{2,8m+2}` from its ratio to `II_{2,8m+2}`.
pub fn vol_t(m: usize) -> BigRational {
    let a = (BigInt::one() << (4 * m + 1)) + 1;
    let b = (BigInt::one() << (4 * m + 2)) - 1;
    vol_ii(m) * BigRational::from_integer(a * b)
}

/// Volume of the stable group of `L_{2d}^{(m)}`.
pub fn vol_l(m: usize, d: u64) -> BigRational {
    let n = 8 * m + 3;
    let h = (n + 1) / 2;
    let mut v = q(d as i64, 2).pow(h as i32) * bernoulli_product(h).abs() / even_double_factorial(h as u64);
    for p in prime_divisors(d) {
        v *= BigRational::one() + q(1, p as i64).pow(h as i32);
    }
    if d == 1 {
        v *= q(2, 1);
    }
    v
}

/// Leading coefficient of the cusp form count for the K3 lattices `L_{2d}^{(2)}`.
pub fn k3_cusp_leading(d: u64) -> BigRational {
    let mut v = two_pow(-9) / factorial(19) * int_pow(d as i64, 10) * bernoulli_product(10).abs()
        / even_double_factorial(10);
    for p in prime_divisors(d) {
        v *= BigRational::one() + q(1, p as i64).pow(10);
    }
    if d == 1 {
        v *= q(2, 1);
    }
    v
}

/// Leading coefficient of the cusp form count for the paramodular group of level `d`.
pub fn paramodular_cusp_leading(d: u64) -> BigRational {
    let mut v = q((d * d) as i64, 48) * (bernoulli(2) * bernoulli(4)).abs();
    for p in prime_divisors(d) {
        v *= BigRational::one() + q(1, (p * p) as i64);
    }
    v
}

/// `(d^2 + 1) / 8640`, valid for prime `d`.
pub fn paramodular_prime_level(d: u64) -> BigRational {
    q((d * d + 1) as i64, 8640)
}

fn character_product(disc: i64, primes: &[u64], s: u32) -> BigRational {
    primes.iter().fold(BigRational::one(), |acc, &p| {
        acc * (BigRational::one() - BigRational::from_integer(BigInt::from(kronecker(disc, p))) / int_pow(p as i64, s))
    })
}

/// Exponent of the power of two in front of the K-family volume.
///
/// For `d` not divisible by 4 this is half the cusp constant `G_2(d)`. For
/// `4 | d` it comes from the `L(s, (4d/*))` form of the volume, taking the
/// 2-adic density exponent `v(d) = 7 + s` when `d = 4 mod 8` and `8 + s`
/// otherwise (`2^s || d`). The extra factor 2 at `d = 4 mod 8` cancels the
/// `2^(-1)` that the `d mod 8 = 4` case otherwise carries.
pub fn k_two_exponent(m: usize, d: u64) -> i64 {
    let m = m as i64;
    match d % 4 {
        1 => 4 * m + 1 + delta(d, 1),
        2 | 3 => -4 * m - 2,
        _ => {
            let (_, d0, _) = real_quadratic_discriminant(d);
            let n = 8 * m + 3;
            let shift = if d0 % 4 == 1 { 0 } else { -n };
            4 * m + 1 + shift
        }
    }
}

/// Volume of the stable group of `K_{2d}^{(m)} = U + m E8(-1) + <2> + <-2d>`.
pub fn vol_k(m: usize, d: u64) -> BigRational {
    let n = 8 * m + 3;
    let k = 4 * m + 2;
    let (disc, _, t) = real_quadratic_discriminant(d);
    let primes = prime_divisors(2 * t);
    two_pow(k_two_exponent(m, d)) * int_pow(t as i64, n as u32) * bernoulli_product(4 * m + 1)
        / even_double_factorial((4 * m + 1) as u64)
        * generalized_bernoulli(k, disc)
        / q(k as i64, 1)
        * character_product(disc, &primes, k as u32)
}

/// Volume of the stable group of `N_{2d}^{(m)}`, `d = 1 mod 4`.
pub fn vol_n(m: usize, d: u64) -> BigRational {
    let n = 8 * m + 3;
    let k = 4 * m + 2;
    let (disc, _, t) = real_quadratic_discriminant(d);
    let primes = prime_divisors(t);
    two_pow(delta(d, 1) - 4 * m as i64 - 2) * int_pow(t as i64, n as u32) * bernoulli_product(4 * m + 1)
        / even_double_factorial((4 * m + 1) as u64)
        * generalized_bernoulli(k, disc)
        / q(k as i64, 1)
        * character_product(disc, &primes, k as u32)
}
