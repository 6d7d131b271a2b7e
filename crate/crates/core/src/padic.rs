//! Jordan decompositions of lattices over the p-adic integers.
//!
//! Elimination runs modulo `p^K` with `K = v_p(det) + 3`. Every Schur
//! complement update is computed from pivot data divided by its scale `p^v`,
//! so no precision is lost in the complement; the extracted unimodular pieces
//! are known modulo `p^(K - level)`, which is at least `p^3`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{is_prime, legendre, mod_inverse, valuation, valuation_capped};
use crate::lattice::Lattice;
use crate::{Error, Result};

/// Rank-one or rank-two unimodular piece of a Jordan block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Component {
    /// `<u>` with `u` a p-adic unit.
    Unit(BigInt),
    /// Even unimodular binary `[[a, b], [b, c]]` over `Z_2` (`a`, `c` even, `b` odd).
    Binary(BigInt, BigInt, BigInt),
}

impl Component {
    pub fn rank(&self) -> usize {
        match self {
            Component::Unit(_) => 1,
            Component::Binary(..) => 2,
        }
    }
}

/// 2-adic classification of a unimodular block `N = N_even + N_odd`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoAdicData {
    pub even_rank: usize,
    /// Diagonal units of the odd part, reduced mod 8.
    pub odd_units: Vec<u8>,
    pub is_even: bool,
}

/// A `p^level`-modular orthogonal summand, stored through its unimodular
/// rescaling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JordanBlock {
    pub level: u32,
    pub rank: usize,
    pub components: Vec<Component>,
    /// `chi` of the block for odd `p`, of its even part for `p = 2`.
    pub chi: i8,
    pub two_adic: Option<TwoAdicData>,
}

impl JordanBlock {
    /// Block diagonal Gram matrix of the unimodular lattice `N_j`.
    pub fn unimodular_gram(&self) -> Vec<Vec<BigInt>> {
        let mut g = vec![vec![BigInt::zero(); self.rank]; self.rank];
        let mut at = 0;
        for c in &self.components {
            match c {
                Component::Unit(u) => g[at][at] = u.clone(),
                Component::Binary(a, b, cc) => {
                    g[at][at] = a.clone();
                    g[at][at + 1] = b.clone();
                    g[at + 1][at] = b.clone();
                    g[at + 1][at + 1] = cc.clone();
                }
            }
            at += c.rank();
        }
        g
    }

    pub fn is_even(&self) -> bool {
        self.components.iter().all(|c| matches!(c, Component::Binary(..)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JordanDecomposition {
    pub prime: u64,
    /// Nonzero blocks sorted by level.
    pub blocks: Vec<JordanBlock>,
    pub precision: u32,
}

impl JordanDecomposition {
    pub fn total_rank(&self) -> usize {
        self.blocks.iter().map(|b| b.rank).sum()
    }

    /// `sum_j j * n_j`, which equals `v_p(det L)`.
    pub fn det_valuation(&self) -> u64 {
        self.blocks.iter().map(|b| b.level as u64 * b.rank as u64).sum()
    }

    pub fn block_at(&self, level: u32) -> Option<&JordanBlock> {
        self.blocks.iter().find(|b| b.level == level)
    }
}

enum Split {
    Done(Vec<(u32, Component)>),
    OutOfPrecision,
}

fn reduce(x: &BigInt, m: &BigInt) -> BigInt {
    x.mod_floor(m)
}

fn split_mod(gram: &[Vec<BigInt>], p: u64, k: u32) -> Split {
    let n = gram.len();
    let pb = BigInt::from(p);
    let modulus = pb.pow(k);
    let mut a: Vec<Vec<BigInt>> = gram
        .iter()
        .map(|row| row.iter().map(|x| reduce(x, &modulus)).collect())
        .collect();
    let mut live: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();

    while !live.is_empty() {
        let mut best: Option<(u32, usize, usize)> = None;
        for (ii, &i) in live.iter().enumerate() {
            for &j in &live[ii..] {
                let v = valuation_capped(&a[i][j], p, k);
                let better = match best {
                    None => true,
                    // prefer diagonal entries on ties
                    Some((bv, bi, bj)) => v < bv || (v == bv && i == j && bi != bj),
                };
                if better {
                    best = Some((v, i, j));
                }
            }
        }
        let (v, i, j) = best.expect("live set is nonempty");
        if v >= k {
            return Split::OutOfPrecision;
        }
        let scale = pb.pow(v);
        let low = pb.pow(k - v);

        if i == j || p != 2 {
            let piv = if i == j {
                i
            } else {
                // row_i += row_j, col_i += col_j surfaces a diagonal entry of valuation v
                for c in 0..n {
                    let t = a[j][c].clone();
                    a[i][c] = reduce(&(&a[i][c] + t), &modulus);
                }
                for r in 0..n {
                    let t = a[r][j].clone();
                    a[r][i] = reduce(&(&a[r][i] + t), &modulus);
                }
                i
            };
            let unit = reduce(&(&a[piv][piv] / &scale), &low);
            let inv = mod_inverse(&unit, &low).expect("pivot is a unit");
            live.retain(|&x| x != piv);
            for &r in &live {
                let f = reduce(&((&a[r][piv] / &scale) * &inv), &low);
                if f.is_zero() {
                    continue;
                }
                for &c in &live {
                    let t = &f * &a[piv][c];
                    a[r][c] = reduce(&(&a[r][c] - t), &modulus);
                }
            }
            for &r in &live {
                a[r][piv] = BigInt::zero();
                a[piv][r] = BigInt::zero();
            }
            out.push((v, Component::Unit(unit)));
        } else {
            // 2-adic even binary block on rows i, j.
            let al = reduce(&(&a[i][i] / &scale), &low);
            let be = reduce(&(&a[i][j] / &scale), &low);
            let ga = reduce(&(&a[j][j] / &scale), &low);
            let det = reduce(&(&al * &ga - &be * &be), &low);
            let dinv = mod_inverse(&det, &low).expect("even binary has unit determinant");
            // M'^{-1} = dinv * [[ga, -be], [-be, al]]
            let m00 = reduce(&(&ga * &dinv), &low);
            let m01 = reduce(&(-&be * &dinv), &low);
            let m11 = reduce(&(&al * &dinv), &low);
            live.retain(|&x| x != i && x != j);
            for &r in &live {
                let x = &a[r][i] / &scale;
                let y = &a[r][j] / &scale;
                let f = reduce(&(&m00 * &x + &m01 * &y), &low);
                let g = reduce(&(&m01 * &x + &m11 * &y), &low);
                if f.is_zero() && g.is_zero() {
                    continue;
                }
                for &c in &live {
                    let t = &f * &a[i][c] + &g * &a[j][c];
                    a[r][c] = reduce(&(&a[r][c] - t), &modulus);
                }
            }
            out.push((v, Component::Binary(al, be, ga)));
        }
    }
    Split::Done(out)
}

fn odd_chi(rank: usize, components: &[Component], p: u64) -> i8 {
    if rank % 2 == 1 {
        return 0;
    }
    let mut disc: BigInt = if (rank / 2) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    for c in components {
        match c {
            Component::Unit(u) => disc *= u,
            Component::Binary(a, b, cc) => disc *= a * cc - b * b,
        }
    }
    legendre(&disc, p)
}

/// `+1` for the hyperbolic plane, `-1` for `[[2,1],[1,2]]` over `Z_2`.
fn binary_chi(a: &BigInt, c: &BigInt) -> i8 {
    let prod: BigInt = (a / 2) * (c / 2);
    if prod.is_even() {
        1
    } else {
        -1
    }
}

fn even_part_chi(components: &[Component]) -> i8 {
    components
        .iter()
        .map(|c| match c {
            Component::Binary(a, _, cc) => binary_chi(a, cc),
            Component::Unit(_) => 1,
        })
        .product()
}

/// `chi` invariant of a block: for odd `p`, `0` on odd rank and otherwise
/// `+1` exactly when `(-1)^(n/2) det N` is a square mod `p`; for `p = 2`, the
/// invariant of the even part, with the empty even part counted as
/// hyperbolic.
pub fn block_chi(block: &JordanBlock, p: u64) -> i8 {
    if p == 2 {
        even_part_chi(&block.components)
    } else {
        odd_chi(block.rank, &block.components, p)
    }
}

fn assemble(p: u64, pieces: Vec<(u32, Component)>, precision: u32) -> JordanDecomposition {
    let mut levels: Vec<u32> = pieces.iter().map(|(l, _)| *l).collect();
    levels.sort_unstable();
    levels.dedup();
    let blocks = levels
        .into_iter()
        .map(|level| {
            let components: Vec<Component> = pieces
                .iter()
                .filter(|(l, _)| *l == level)
                .map(|(_, c)| c.clone())
                .collect();
            make_block(p, level, components)
        })
        .collect();
    JordanDecomposition { prime: p, blocks, precision }
}

fn make_block(p: u64, level: u32, components: Vec<Component>) -> JordanBlock {
    let rank = components.iter().map(Component::rank).sum();
    let two_adic = (p == 2).then(|| {
        let odd_units: Vec<u8> = components
            .iter()
            .filter_map(|c| match c {
                Component::Unit(u) => Some(u.mod_floor(&BigInt::from(8)).to_u8().unwrap()),
                _ => None,
            })
            .collect();
        TwoAdicData {
            even_rank: rank - odd_units.len(),
            is_even: odd_units.is_empty(),
            odd_units,
        }
    });
    let mut block = JordanBlock { level, rank, components, chi: 0, two_adic };
    block.chi = block_chi(&block, p);
    block
}

/// Raw splitting: diagonal for odd `p`; rank-one odd and rank-two even pieces
/// for `p = 2`, without compressing the odd parts.
pub fn jordan_split(l: &Lattice, p: u64) -> Result<JordanDecomposition> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mut k = valuation(l.det(), p) + 3;
    for _ in 0..6 {
        match split_mod(l.gram(), p, k) {
            Split::Done(pieces) => return Ok(assemble(p, pieces, k)),
            Split::OutOfPrecision => k *= 2,
        }
    }
    Err(Error::PrecisionExhausted { prime: p, precision: k })
}

/// Jordan decomposition over `Z_p`; at `p = 2` the odd part of every block is
/// compressed to rank at most two.
pub fn jordan_decompose(l: &Lattice, p: u64) -> Result<JordanDecomposition> {
    let raw = jordan_split(l, p)?;
    Ok(if p == 2 { two_adic_normalize(raw) } else { raw })
}

fn unit_mod8(u: &BigInt) -> i64 {
    u.mod_floor(&BigInt::from(8)).to_i64().unwrap()
}

/// `<a> + <b> + <c>` over `Z_2` splits as an even binary spanned by
/// `e1 + e2`, `e2 + e3` plus the rank-one complement `<abc / (ab + bc + ca)>`.
fn compress_three(a: i64, b: i64, c: i64) -> (Component, i64) {
    let binary = if ((a + b) / 2 * ((b + c) / 2)) % 2 == 0 {
        Component::Binary(BigInt::zero(), BigInt::one(), BigInt::zero())
    } else {
        Component::Binary(BigInt::from(2), BigInt::one(), BigInt::from(2))
    };
    let sigma = (a * b + b * c + c * a).rem_euclid(8);
    // odd residues are their own inverses mod 8
    let unit = (a * b * c * sigma).rem_euclid(8);
    (binary, unit)
}

/// Rewrites each 2-adic block as `N_even + N_odd` with `rank N_odd <= 2`.
///
/// Units are tracked mod 8 and even binaries are replaced by the canonical
/// representatives `U` or `[[2,1],[1,2]]`, which is all the density formulas
/// read.
pub fn two_adic_normalize(decomp: JordanDecomposition) -> JordanDecomposition {
    assert_eq!(decomp.prime, 2, "two_adic_normalize applies to p = 2");
    let blocks = decomp
        .blocks
        .into_iter()
        .map(|block| {
            let mut even: Vec<Component> = Vec::new();
            let mut odd: Vec<i64> = Vec::new();
            for c in block.components {
                match c {
                    Component::Unit(u) => odd.push(unit_mod8(&u)),
                    Component::Binary(a, _, cc) => {
                        let canon = if binary_chi(&a, &cc) == 1 {
                            Component::Binary(BigInt::zero(), BigInt::one(), BigInt::zero())
                        } else {
                            Component::Binary(BigInt::from(2), BigInt::one(), BigInt::from(2))
                        };
                        even.push(canon);
                    }
                }
            }
            while odd.len() >= 3 {
                let c = odd.pop().unwrap();
                let b = odd.pop().unwrap();
                let a = odd.pop().unwrap();
                let (binary, unit) = compress_three(a, b, c);
                even.push(binary);
                odd.push(unit);
            }
            let mut components = even;
            components.extend(odd.into_iter().map(|u| Component::Unit(BigInt::from(u))));
            make_block(2, block.level, components)
        })
        .collect();
    JordanDecomposition { prime: 2, blocks, precision: decomp.precision }
}
