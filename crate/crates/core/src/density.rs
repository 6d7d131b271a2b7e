//! Local densities `alpha_p(L)`.
//!
//! Two independent routes: closed formulas read off the Jordan decomposition,
//! and a direct count of self-congruences `X^t S X = S (mod p^r)` for small
//! rank. Both are exposed through the [`DensityMethod`] registry.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;

use crate::arith::{factorize, is_prime, to_u64, valuation};
use crate::lattice::Lattice;
use crate::padic::{jordan_decompose, JordanBlock, JordanDecomposition};
use crate::{Error, Result};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn prime_power(p: u64, e: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(p));
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

/// `P_p(n) = prod_{i=1}^n (1 - p^{-2i})`.
pub fn p_series(p: u64, n: u64) -> BigRational {
    (1..=n as i64).fold(BigRational::one(), |acc, i| acc * (BigRational::one() - prime_power(p, -2 * i)))
}

/// `w = sum_j j n_j ((n_j + 1)/2 + sum_{k>j} n_k)`.
///
/// `n_j (n_j + 1) / 2` is always an integer, so `w` is computed as
/// `sum_j j * (n_j (n_j + 1) / 2 + n_j * sum_{k>j} n_k)`.
pub fn cross_rank_weight(decomp: &JordanDecomposition) -> u64 {
    let blocks = &decomp.blocks;
    blocks
        .iter()
        .enumerate()
        .map(|(idx, b)| {
            let nj = b.rank as u64;
            let above: u64 = blocks[idx + 1..].iter().map(|c| c.rank as u64).sum();
            b.level as u64 * (nj * (nj + 1) / 2 + nj * above)
        })
        .sum()
}

/// How the value of a density was assembled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityBreakdown {
    /// Number of nonzero Jordan blocks.
    pub s: usize,
    pub w: u64,
    /// `q = sum_j q_j`; zero for odd primes.
    pub q: u64,
    /// Exponent of the leading power of two: `s - 1` for odd `p`,
    /// `n - 1 + w - q` for `p = 2`.
    pub two_exponent: i64,
    pub p_factor: BigRational,
    /// Per level `j`: for odd `p` the factor `1 + chi(N_j) p^{-n_j/2}`, for
    /// `p = 2` the factor `E_j`. The density divides by their product.
    pub e_factors: Vec<(i64, BigRational)>,
}

impl DensityBreakdown {
    pub fn recombine(&self, p: u64) -> BigRational {
        let pw = if p == 2 { BigRational::one() } else { prime_power(p, self.w as i64) };
        let e: BigRational = self.e_factors.iter().fold(BigRational::one(), |acc, (_, f)| acc * f);
        prime_power(2, self.two_exponent) * pw * &self.p_factor / e
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDensity {
    pub prime: u64,
    pub value: BigRational,
    pub breakdown: DensityBreakdown,
}

fn odd_prime_density(decomp: &JordanDecomposition) -> LocalDensity {
    let p = decomp.prime;
    let s = decomp.blocks.len();
    let w = cross_rank_weight(decomp);
    let p_factor = decomp
        .blocks
        .iter()
        .fold(BigRational::one(), |acc, b| acc * p_series(p, (b.rank / 2) as u64));
    let e_factors: Vec<(i64, BigRational)> = decomp
        .blocks
        .iter()
        .map(|b| {
            let f = if b.rank % 2 == 0 {
                BigRational::one() + rat(b.chi as i64) * prime_power(p, -((b.rank / 2) as i64))
            } else {
                BigRational::one()
            };
            (b.level as i64, f)
        })
        .collect();
    let breakdown = DensityBreakdown {
        s,
        w,
        q: 0,
        two_exponent: s as i64 - 1,
        p_factor,
        e_factors,
    };
    LocalDensity { prime: p, value: breakdown.recombine(p), breakdown }
}

struct LevelView<'a> {
    blocks: BTreeMap<i64, &'a JordanBlock>,
}

impl<'a> LevelView<'a> {
    fn new(decomp: &'a JordanDecomposition) -> Self {
        Self { blocks: decomp.blocks.iter().map(|b| (b.level as i64, b)).collect() }
    }

    /// Trivial blocks count as even.
    fn is_even(&self, j: i64) -> bool {
        self.blocks.get(&j).map_or(true, |b| b.is_even())
    }

    fn rank(&self, j: i64) -> u64 {
        self.blocks.get(&j).map_or(0, |b| b.rank as u64)
    }
}

fn two_adic_density(decomp: &JordanDecomposition) -> LocalDensity {
    let view = LevelView::new(decomp);
    let n = decomp.total_rank() as i64;
    let w = cross_rank_weight(decomp);
    let lo = decomp.blocks.first().map_or(0, |b| b.level as i64) - 1;
    let hi = decomp.blocks.last().map_or(0, |b| b.level as i64) + 1;

    let mut q = 0u64;
    let mut p_factor = BigRational::one();
    let mut e_factors = Vec::new();
    for j in lo..=hi {
        let block = view.blocks.get(&j).copied();
        if !view.is_even(j) {
            q += if view.is_even(j + 1) { view.rank(j) } else { view.rank(j) + 1 };
        }
        let (even_rank, odd_units, chi) = match block {
            Some(b) => {
                let ta = b.two_adic.as_ref().expect("2-adic data present at p = 2");
                (ta.even_rank, ta.odd_units.clone(), b.chi)
            }
            None => (0, Vec::new(), 1),
        };
        p_factor *= p_series(2, (even_rank / 2) as u64);
        let paired_odd = odd_units.len() == 2 && (odd_units[0] % 4) == (odd_units[1] % 4);
        let e = if view.is_even(j - 1) && view.is_even(j + 1) && !paired_odd {
            (BigRational::one() + rat(chi as i64) * prime_power(2, -((even_rank / 2) as i64))) / rat(2)
        } else {
            BigRational::new(BigInt::one(), BigInt::from(2))
        };
        e_factors.push((j, e));
    }
    let breakdown = DensityBreakdown {
        s: decomp.blocks.len(),
        w,
        q,
        two_exponent: n - 1 + w as i64 - q as i64,
        p_factor,
        e_factors,
    };
    LocalDensity { prime: 2, value: breakdown.recombine(2), breakdown }
}

/// Density from an already computed (and, at `p = 2`, normalized)
/// decomposition.
pub fn density_from_decomposition(decomp: &JordanDecomposition) -> LocalDensity {
    if decomp.prime == 2 {
        two_adic_density(decomp)
    } else {
        odd_prime_density(decomp)
    }
}

/// `alpha_p(L)` from the Jordan decomposition of `L` over `Z_p`.
pub fn local_density(l: &Lattice, p: u64) -> Result<LocalDensity> {
    let decomp = jordan_decompose(l, p)?;
    let d = density_from_decomposition(&decomp);
    debug_assert!(d.value.is_positive());
    Ok(d)
}

/// Sorted primes dividing `2 det L`.
pub fn bad_primes(l: &Lattice) -> Result<Vec<u64>> {
    let d = to_u64(l.det(), "|det L|")?;
    let mut ps: Vec<u64> = factorize(d).into_iter().map(|(p, _)| p).collect();
    if !ps.contains(&2) {
        ps.insert(0, 2);
    }
    Ok(ps)
}

/// Reading of the congruence `X^t S X = S` at `p = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Convention {
    /// Every entry modulo `p^r`.
    Literal,
    /// Off-diagonal entries modulo `2^r`, diagonal entries modulo `2^(r+1)`;
    /// only meaningful for even Gram matrices.
    QuadraticDiagonal,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Convention::Literal => write!(f, "literal"),
            Convention::QuadraticDiagonal => write!(f, "quadratic-diagonal"),
        }
    }
}

pub const ORACLE_MAX_RANK: usize = 3;
/// Bound on the estimated work of one count.
pub const ORACLE_WORK_LIMIT: u128 = 1 << 30;

/// Work estimate of the column-pruned enumeration: the vector table has
/// `p^(rn)` entries and the pairwise filtering touches about `p^(2r(n-1))`
/// candidate pairs.
pub fn oracle_cost(n: usize, p: u64, r: u32) -> u128 {
    let pr = (p as u128).checked_pow(r).unwrap_or(u128::MAX);
    let table = pr.checked_pow(n as u32).unwrap_or(u128::MAX);
    let pairs = pr.checked_pow(2 * (n as u32).saturating_sub(1)).unwrap_or(u128::MAX);
    table.max(pairs)
}

fn check_guard(l: &Lattice, p: u64, r: u32) -> Result<()> {
    let n = l.rank();
    if n > ORACLE_MAX_RANK {
        return Err(Error::Guard {
            what: format!("counting oracle supports rank <= {ORACLE_MAX_RANK}, got {n}"),
            estimate: format!("{}", oracle_cost(n, p, r)),
            limit: format!("{ORACLE_WORK_LIMIT}"),
        });
    }
    let cost = oracle_cost(n, p, r);
    if cost > ORACLE_WORK_LIMIT {
        return Err(Error::Guard {
            what: format!("counting oracle at p = {p}, r = {r}, rank {n}"),
            estimate: format!("{cost}"),
            limit: format!("{ORACLE_WORK_LIMIT}"),
        });
    }
    Ok(())
}

/// Siegel's count `1/2 p^{-r n(n-1)/2} #{X mod p^r : X^t S X = S mod p^r}`
/// with every entry read modulo `p^r`.
pub fn siegel_count_oracle(l: &Lattice, p: u64, r: u32) -> Result<BigRational> {
    siegel_count(l, p, r, Convention::Literal)
}

/// Siegel's count under an explicit congruence convention.
pub fn siegel_count(l: &Lattice, p: u64, r: u32, convention: Convention) -> Result<BigRational> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if r == 0 {
        return Err(Error::Precondition("oracle depth r must be >= 1".into()));
    }
    if convention == Convention::QuadraticDiagonal && (p != 2 || !l.is_even()) {
        return Err(Error::Precondition(
            "quadratic-diagonal convention needs p = 2 and an even lattice".into(),
        ));
    }
    check_guard(l, p, r)?;
    let n = l.rank();
    let m = p.pow(r);
    let diag_mod = if convention == Convention::QuadraticDiagonal { 2 * m } else { m };
    let count = count_solutions(l.gram(), m, diag_mod);
    let norm = BigInt::from(p).pow(r * (n * (n - 1) / 2) as u32);
    Ok(BigRational::new(BigInt::from(count), norm * BigInt::from(2)))
}

#[derive(Clone, Copy)]
struct Cand {
    v: [u64; 3],
    sv: [u64; 3],
}

fn dot3(a: &[u64; 3], b: &[u64; 3], m: u64) -> u64 {
    ((a[0] as u128 * b[0] as u128 + a[1] as u128 * b[1] as u128 + a[2] as u128 * b[2] as u128) % m as u128) as u64
}

// Counts X column by column: column i ranges over vectors with the right
// quadratic value, filtered by the pairings with the columns already fixed.
fn count_solutions(gram: &[Vec<BigInt>], m: u64, diag_mod: u64) -> u64 {
    let n = gram.len();
    let red = |x: &BigInt, md: u64| x.mod_floor(&BigInt::from(md)).to_u64().unwrap();
    let mut s = [[0u64; 3]; 3];
    let mut t = [[0u64; 3]; 3];
    for i in 0..n {
        for j in 0..n {
            s[i][j] = red(&gram[i][j], diag_mod);
            t[i][j] = s[i][j] % m;
        }
    }
    let dm = diag_mod as u128;

    let total = m.pow(n as u32);
    let mut cands: Vec<Vec<Cand>> = vec![Vec::new(); n];
    for idx in 0..total {
        let mut v = [0u64; 3];
        let mut rest = idx;
        for c in v.iter_mut().take(n) {
            *c = rest % m;
            rest /= m;
        }
        let mut qv: u128 = 0;
        for i in 0..n {
            for j in 0..n {
                qv = (qv + s[i][j] as u128 * v[i] as u128 % dm * v[j] as u128) % dm;
            }
        }
        let qv = qv as u64;
        let mut sv = [0u64; 3];
        for i in 0..n {
            sv[i] = dot3(&t[i], &v, m);
        }
        for i in 0..n {
            if qv == s[i][i] {
                cands[i].push(Cand { v, sv });
            }
        }
    }

    match n {
        1 => cands[0].len() as u64,
        2 => cands[0]
            .par_iter()
            .map(|x| cands[1].iter().filter(|y| dot3(&x.sv, &y.v, m) == t[0][1]).count() as u64)
            .sum(),
        _ => cands[0]
            .par_iter()
            .map(|x| {
                let ys: Vec<[u64; 3]> =
                    cands[1].iter().filter(|y| dot3(&x.sv, &y.v, m) == t[0][1]).map(|y| y.sv).collect();
                if ys.is_empty() {
                    return 0;
                }
                let zs: Vec<[u64; 3]> =
                    cands[2].iter().filter(|z| dot3(&x.sv, &z.v, m) == t[0][2]).map(|z| z.v).collect();
                ys.iter()
                    .map(|sy| zs.iter().filter(|z| dot3(sy, z, m) == t[1][2]).count() as u64)
                    .sum::<u64>()
            })
            .sum(),
    }
}

/// Oracle values over increasing depth until two consecutive depths agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleRun {
    pub prime: u64,
    pub convention: Convention,
    pub values: Vec<(u32, BigRational)>,
    /// Depth `r` and value once `r` and `r + 1` agree.
    pub stable: Option<(u32, BigRational)>,
}

/// Runs the count from `r = v_p(2 det L) + 1` upward until consecutive
/// depths agree or the guard stops the search.
pub fn oracle_stabilize(l: &Lattice, p: u64, convention: Convention) -> Result<OracleRun> {
    let start = valuation(&(l.det() * BigInt::from(2)), p) + 1;
    oracle_stabilize_from(l, p, convention, start)
}

pub fn oracle_stabilize_from(l: &Lattice, p: u64, convention: Convention, start: u32) -> Result<OracleRun> {
    let mut run = OracleRun { prime: p, convention, values: Vec::new(), stable: None };
    let mut r = start.max(1);
    loop {
        let v = match siegel_count(l, p, r, convention) {
            Ok(v) => v,
            Err(e @ Error::Guard { .. }) if run.values.is_empty() => return Err(e),
            Err(Error::Guard { .. }) => return Ok(run),
            Err(e) => return Err(e),
        };
        if let Some((pr, pv)) = run.values.last() {
            if *pv == v {
                run.stable = Some((*pr, v.clone()));
                run.values.push((r, v));
                return Ok(run);
            }
        }
        run.values.push((r, v));
        r += 1;
    }
}

/// A way of computing `alpha_p(L)`.
pub trait DensityMethod: Send + Sync {
    fn name(&self) -> &'static str;
    fn density(&self, l: &Lattice, p: u64) -> Result<BigRational>;
}

/// Closed formulas on the Jordan decomposition.
pub struct JordanFormula;

impl DensityMethod for JordanFormula {
    fn name(&self) -> &'static str {
        "jordan"
    }

    fn density(&self, l: &Lattice, p: u64) -> Result<BigRational> {
        Ok(local_density(l, p)?.value)
    }
}

/// Stabilized congruence count (rank <= 3).
pub struct SiegelCount {
    pub convention: Convention,
}

impl DensityMethod for SiegelCount {
    fn name(&self) -> &'static str {
        "siegel-count"
    }

    fn density(&self, l: &Lattice, p: u64) -> Result<BigRational> {
        let run = oracle_stabilize(l, p, self.convention)?;
        run.stable.map(|(_, v)| v).ok_or_else(|| Error::Guard {
            what: format!("oracle at p = {p} did not stabilize within the work limit"),
            estimate: run.values.last().map_or(String::new(), |(r, _)| format!("r = {}", r + 1)),
            limit: format!("{ORACLE_WORK_LIMIT}"),
        })
    }
}

/// Density methods selectable by name.
pub struct DensityRegistry {
    methods: Vec<Box<dyn DensityMethod>>,
}

impl Default for DensityRegistry {
    fn default() -> Self {
        Self {
            methods: vec![
                Box::new(JordanFormula),
                Box::new(SiegelCount { convention: Convention::Literal }),
            ],
        }
    }
}

impl DensityRegistry {
    pub fn register(&mut self, method: Box<dyn DensityMethod>) {
        self.methods.retain(|m| m.name() != method.name());
        self.methods.push(method);
    }

    pub fn get(&self, name: &str) -> Option<&dyn DensityMethod> {
        self.methods.iter().find(|m| m.name() == name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.methods.iter().map(|m| m.name()).collect()
    }
}

/// Closed form of `alpha_p` at a prime not dividing `2 det L`.
pub fn good_prime_density(rank: usize, chi: i8, p: u64) -> BigRational {
    let t = (rank / 2) as u64;
    if rank % 2 == 1 {
        p_series(p, t)
    } else {
        p_series(p, t) / (BigRational::one() + rat(chi as i64) * prime_power(p, -(t as i64)))
    }
}

#[allow(dead_code)]
fn to_f64(x: &BigRational) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}
