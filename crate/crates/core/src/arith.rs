//! Integer helpers: primality, factorization, p-adic valuations and modular
//! inverses.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime(c) {
        c += 1;
    }
    c
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

// Brent's variant of Pollard rho; `n` is odd, composite and not a prime power
// of a tiny prime.
fn pollard_brent(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g, mut r, mut q) = (2u64, 2u64, 1u64, 1u64, 1u64);
        let mut ys = 0u64;
        const M: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..M.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += M;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    split_into(d, out);
    split_into(n / d, out);
}

/// Prime factorization as sorted `(prime, exponent)` pairs; `factorize(1)` is
/// empty.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut primes = Vec::new();
    let mut m = n;
    for p in 2..1000u64 {
        if p * p > m {
            break;
        }
        while m % p == 0 {
            primes.push(p);
            m /= p;
        }
    }
    split_into(m, &mut primes);
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Number of distinct prime divisors.
pub fn num_prime_divisors(d: u64) -> u32 {
    if d <= 1 {
        return 0;
    }
    factorize(d).len() as u32
}

/// Writes `m = core * t^2` with `core` squarefree.
pub fn squarefree_decomposition(m: u64) -> (u64, u64) {
    let mut core = 1u64;
    let mut t = 1u64;
    for (p, e) in factorize(m) {
        if e % 2 == 1 {
            core *= p;
        }
        t *= p.pow(e / 2);
    }
    (core, t)
}

/// Exponent of `p` in the nonzero integer `n`.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let p = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// Valuation capped at `cap`, with zero mapped to `cap`.
pub fn valuation_capped(n: &BigInt, p: u64, cap: u32) -> u32 {
    if n.is_zero() {
        cap
    } else {
        valuation(n, p).min(cap)
    }
}

/// Inverse of `a` modulo `m`, or `None` when they share a factor.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Converts to `u64` or reports the magnitude in a precondition error.
pub fn to_u64(n: &BigInt, what: &str) -> crate::Result<u64> {
    n.abs().to_u64().ok_or_else(|| {
        crate::Error::Precondition(format!("{what} = {n} exceeds the 64-bit factorization range"))
    })
}

/// Legendre symbol for an odd prime `p`.
pub fn legendre(a: &BigInt, p: u64) -> i8 {
    let r = a.mod_floor(&BigInt::from(p)).to_u64().unwrap();
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small_and_large() {
        let small: Vec<u64> = (0..50).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]);
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751));
        assert_eq!(next_prime(13), 17);
    }

    #[test]
    fn factorization_roundtrip() {
        for n in 1..2000u64 {
            let prod: u64 = factorize(n).iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, n);
        }
        assert_eq!(factorize(999_999_000_001 * 3), vec![(3, 1), (999_999_000_001, 1)]);
        assert_eq!(factorize(4_295_098_369), vec![(65_537, 2)]);
    }

    #[test]
    fn prime_divisor_counts() {
        assert_eq!(num_prime_divisors(1), 0);
        assert_eq!(num_prime_divisors(12), 2);
        assert_eq!(num_prime_divisors(30), 3);
    }

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree_decomposition(12), (3, 2));
        assert_eq!(squarefree_decomposition(1), (1, 1));
        assert_eq!(squarefree_decomposition(72), (2, 6));
    }

    #[test]
    fn valuations_and_inverses() {
        assert_eq!(valuation(&BigInt::from(-48), 2), 4);
        assert_eq!(valuation_capped(&BigInt::zero(), 3, 7), 7);
        let m = BigInt::from(64);
        let inv = mod_inverse(&BigInt::from(-5), &m).unwrap();
        assert_eq!((inv * BigInt::from(-5)).mod_floor(&m), BigInt::one());
        assert!(mod_inverse(&BigInt::from(6), &m).is_none());
        assert_eq!(legendre(&BigInt::from(2), 3), -1);
        assert_eq!(legendre(&BigInt::from(-1), 5), 1);
    }
}
