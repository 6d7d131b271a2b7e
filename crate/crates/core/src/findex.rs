//! Discriminant quadratic forms `(A_L, q_L)`, orders of their isometry
//! groups, and indices between the arithmetic groups attached to `L`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::lattice::Lattice;
use crate::{Error, Result};

pub use crate::arith::{factorize, num_prime_divisors};

/// Largest discriminant group enumerated by [`finite_isometry_order`].
pub const ISOMETRY_GUARD: u64 = 100_000;

/// Smith normal form `U A V = D` of a square integer matrix.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub left: Vec<Vec<BigInt>>,
    pub right: Vec<Vec<BigInt>>,
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn smith_normal_form(m: &[Vec<BigInt>]) -> SmithForm {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut u = identity(n);
    let mut v = identity(n);

    let row_axpy = |mat: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, k: &BigInt| {
        let s = mat[src].clone();
        for (d, x) in mat[dst].iter_mut().zip(s) {
            *d -= k * x;
        }
    };
    let col_axpy = |mat: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, k: &BigInt| {
        for row in mat.iter_mut() {
            let x = row[src].clone();
            row[dst] -= k * x;
        }
    };
    let col_swap = |mat: &mut Vec<Vec<BigInt>>, i: usize, j: usize| {
        for row in mat.iter_mut() {
            row.swap(i, j);
        }
    };

    for t in 0..n {
        loop {
            let pivot = (t..n)
                .flat_map(|i| (t..n).map(move |j| (i, j)))
                .filter(|&(i, j)| !a[i][j].is_zero())
                .min_by_key(|&(i, j)| a[i][j].abs());
            let Some((pi, pj)) = pivot else { break };
            a.swap(t, pi);
            u.swap(t, pi);
            col_swap(&mut a, t, pj);
            col_swap(&mut v, t, pj);

            let mut clean = true;
            for i in t + 1..n {
                let k = a[i][t].div_floor(&a[t][t]);
                if !k.is_zero() {
                    row_axpy(&mut a, i, t, &k);
                    row_axpy(&mut u, i, t, &k);
                }
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..n {
                let k = a[t][j].div_floor(&a[t][t]);
                if !k.is_zero() {
                    col_axpy(&mut a, j, t, &k);
                    col_axpy(&mut v, j, t, &k);
                }
                clean &= a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..n)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !a[i][j].is_multiple_of(&a[t][t]));
            match bad {
                Some((i, _)) => {
                    let minus_one = -BigInt::one();
                    row_axpy(&mut a, t, i, &minus_one);
                    row_axpy(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    SmithForm { diagonal: (0..n).map(|i| a[i][i].clone()).collect(), left: u, right: v }
}

/// A finite quadratic form on `Z/d_1 + ... + Z/d_k` with `d_1 | d_2 | ...`,
/// all `d_i > 1`.
///
/// Values are stored scaled by `S = 2 * exponent`: `q` in `Z / 2S` and the
/// bilinear form `b` in `Z / S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteQuadraticForm {
    orders: Vec<u64>,
    scale: u64,
    q_scaled: Vec<u64>,
    b_scaled: Vec<Vec<u64>>,
}

impl FiniteQuadraticForm {
    pub fn generator_orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.orders.last().copied().unwrap_or(1)
    }

    pub fn is_trivial(&self) -> bool {
        self.orders.is_empty()
    }

    /// `q(g_i)` in `Q / 2Z`, reduced to `[0, 2)`.
    pub fn q_value(&self, i: usize) -> BigRational {
        BigRational::new(BigInt::from(self.q_scaled[i]), BigInt::from(self.scale))
    }

    /// `b(g_i, g_j)` in `Q / Z`, reduced to `[0, 1)`.
    pub fn b_value(&self, i: usize, j: usize) -> BigRational {
        BigRational::new(BigInt::from(self.b_scaled[i][j]), BigInt::from(self.scale))
    }

    /// Every generator has order 1 or 2.
    pub fn is_two_elementary(&self) -> bool {
        self.orders.iter().all(|&d| d == 2)
    }

    pub fn is_two_group(&self) -> bool {
        self.orders.iter().all(|d| d.is_power_of_two())
    }

    fn q_of(&self, c: &[u64]) -> u64 {
        let m = 2 * self.scale as u128;
        let mut acc: u128 = 0;
        for i in 0..c.len() {
            acc += c[i] as u128 * c[i] as u128 % m * self.q_scaled[i] as u128 % m;
            for j in i + 1..c.len() {
                acc += 2 * (c[i] as u128 * c[j] as u128 % m) * self.b_scaled[i][j] as u128 % m;
            }
        }
        (acc % m) as u64
    }

    /// `(b(x, g_0), ..., b(x, g_{k-1}))`, scaled.
    fn b_row(&self, c: &[u64]) -> Vec<u64> {
        let s = self.scale as u128;
        (0..c.len())
            .map(|j| {
                let acc: u128 = (0..c.len()).map(|i| c[i] as u128 * self.b_scaled[i][j] as u128 % s).sum();
                (acc % s) as u64
            })
            .collect()
    }

    fn elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new()];
        for &d in &self.orders {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..d).map(move |x| {
                        let mut v = prefix.clone();
                        v.push(x);
                        v
                    })
                })
                .collect();
        }
        out
    }
}

impl fmt::Display for FiniteQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "trivial");
        }
        let parts: Vec<String> = self
            .orders
            .iter()
            .enumerate()
            .map(|(i, d)| format!("Z/{d} (q = {})", self.q_value(i)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `A_L = L^v / L` with the form `q_L(x) = (x, x) mod 2Z`.
pub fn discriminant_form(l: &Lattice) -> Result<FiniteQuadraticForm> {
    if !l.is_even() {
        return Err(Error::OddLattice("the discriminant quadratic form"));
    }
    let g = l.gram();
    let n = g.len();
    let snf = smith_normal_form(g);
    // Generators of the dual are V e_i / d_i.
    let keep: Vec<usize> = (0..n).filter(|&i| !snf.diagonal[i].is_one()).collect();
    let orders: Vec<u64> = keep
        .iter()
        .map(|&i| {
            snf.diagonal[i]
                .to_u64()
                .ok_or_else(|| Error::Precondition(format!("discriminant group factor {} too large", snf.diagonal[i])))
        })
        .collect::<Result<_>>()?;
    let exponent = orders.last().copied().unwrap_or(1);
    let scale = 2 * exponent;
    let gens: Vec<Vec<BigRational>> = keep
        .iter()
        .map(|&i| {
            (0..n)
                .map(|r| BigRational::new(snf.right[r][i].clone(), snf.diagonal[i].clone()))
                .collect()
        })
        .collect();
    let pair = |x: &[BigRational], y: &[BigRational]| -> BigRational {
        let mut acc = BigRational::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                acc += &x[i] * BigRational::from_integer(g[i][j].clone()) * &y[j];
            }
        }
        acc
    };
    let scaled_mod = |v: BigRational, modulus: u64| -> Result<u64> {
        let s = v * BigRational::from_integer(BigInt::from(scale));
        if !s.is_integer() {
            return Err(Error::Internal(format!("discriminant value {s} not integral after scaling")));
        }
        Ok(s.to_integer().mod_floor(&BigInt::from(modulus)).to_u64().unwrap())
    };
    let k = gens.len();
    let mut q_scaled = Vec::with_capacity(k);
    let mut b_scaled = vec![vec![0u64; k]; k];
    for i in 0..k {
        q_scaled.push(scaled_mod(pair(&gens[i], &gens[i]), 2 * scale)?);
        for j in 0..k {
            b_scaled[i][j] = scaled_mod(pair(&gens[i], &gens[j]), scale)?;
        }
    }
    Ok(FiniteQuadraticForm { orders, scale, q_scaled, b_scaled })
}

/// `|O(q)|`, by enumerating images of the generators with matching order
/// and `q` value and keeping the tuples that preserve `b`.
pub fn finite_isometry_order(q: &FiniteQuadraticForm) -> Result<u64> {
    let size = q.order();
    if size > ISOMETRY_GUARD {
        return Err(Error::Guard {
            what: "isometry enumeration of the discriminant form".into(),
            estimate: format!("|A| = {size}"),
            limit: format!("{ISOMETRY_GUARD}"),
        });
    }
    if q.is_trivial() {
        return Ok(1);
    }
    let k = q.orders.len();
    let elems = q.elements();
    let mut cands: Vec<Vec<(Vec<u64>, Vec<u64>)>> = vec![Vec::new(); k];
    for e in &elems {
        let qe = q.q_of(e);
        for (i, &d) in q.orders.iter().enumerate() {
            let killed = e.iter().zip(&q.orders).all(|(x, m)| (x * d) % m == 0);
            if killed && qe == q.q_scaled[i] {
                cands[i].push((e.clone(), q.b_row(e)));
            }
        }
    }
    let s = q.scale as u128;
    let b_between = |row: &[u64], y: &[u64]| -> u64 {
        let acc: u128 = row.iter().zip(y).map(|(a, b)| *a as u128 * *b as u128 % s).sum();
        (acc % s) as u64
    };

    fn extend(
        i: usize,
        chosen: &mut Vec<usize>,
        cands: &[Vec<(Vec<u64>, Vec<u64>)>],
        target: &[Vec<u64>],
        b_between: &(dyn Fn(&[u64], &[u64]) -> u64 + Sync),
    ) -> u64 {
        if i == cands.len() {
            return 1;
        }
        let mut total = 0;
        for (idx, (e, _)) in cands[i].iter().enumerate() {
            let ok = chosen
                .iter()
                .enumerate()
                .all(|(j, &cj)| b_between(&cands[j][cj].1, e) == target[j][i]);
            if ok {
                chosen.push(idx);
                total += extend(i + 1, chosen, cands, target, b_between);
                chosen.pop();
            }
        }
        total
    }

    let count = (0..cands[0].len())
        .into_par_iter()
        .map(|first| {
            let mut chosen = vec![first];
            extend(1, &mut chosen, &cands, &q.b_scaled, &b_between)
        })
        .sum();
    Ok(count)
}

/// Whether `-id` lies in the stable subgroup, i.e. acts trivially on `A_L`.
/// This happens exactly when `A_L` is 2-elementary.
pub fn minus_id_in_tilde(l: &Lattice) -> Result<bool> {
    Ok(discriminant_form(l)?.is_two_elementary())
}

/// The arithmetic subgroups of `O(L)` tracked here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupTag {
    O,
    OPlus,
    SOPlus,
    OTildePlus,
    SOTildePlus,
}

impl GroupTag {
    pub const ALL: [GroupTag; 5] =
        [GroupTag::O, GroupTag::OPlus, GroupTag::SOPlus, GroupTag::OTildePlus, GroupTag::SOTildePlus];

    pub fn symbol(self) -> &'static str {
        match self {
            GroupTag::O => "O",
            GroupTag::OPlus => "O+",
            GroupTag::SOPlus => "SO+",
            GroupTag::OTildePlus => "O~+",
            GroupTag::SOTildePlus => "SO~+",
        }
    }

    pub fn parse(s: &str) -> Option<GroupTag> {
        GroupTag::ALL.into_iter().find(|t| t.symbol().eq_ignore_ascii_case(s))
    }

    pub fn is_stable(self) -> bool {
        matches!(self, GroupTag::OTildePlus | GroupTag::SOTildePlus)
    }
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Index data of one group inside `O(L)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupIndex {
    pub tag: GroupTag,
    /// `[O(L) : Gamma]`.
    pub index: u64,
    pub contains_minus_id: bool,
    /// `[PO(L) : P Gamma]`.
    pub projective_index: u64,
}

/// `[PO(L) : P Gamma]` for the group named by `tag`.
///
/// `O+` has index 2 in `O`, `SO+` index 2 in `O+`, and the stable groups
/// index `N = |O(q_L)|` below their unstable counterparts.
pub fn projective_index(l: &Lattice, tag: GroupTag) -> Result<GroupIndex> {
    if tag != GroupTag::O && !l.has_hyperbolic_summand() {
        return Err(Error::Precondition(format!(
            "index of {tag} needs a hyperbolic plane summand in the lattice expression"
        )));
    }
    let rank_even = l.rank() % 2 == 0;
    let (index, contains_minus_id) = match tag {
        GroupTag::O => (1, true),
        GroupTag::OPlus => (2, true),
        GroupTag::SOPlus => (4, rank_even),
        GroupTag::OTildePlus | GroupTag::SOTildePlus => {
            let q = discriminant_form(l)?;
            let n = finite_isometry_order(&q)?;
            let stable = q.is_two_elementary();
            if tag == GroupTag::OTildePlus {
                (2 * n, stable)
            } else {
                (4 * n, stable && rank_even)
            }
        }
    };
    let projective_index = if contains_minus_id { index } else { index / 2 };
    Ok(GroupIndex { tag, index, contains_minus_id, projective_index })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::families::*;

    #[test]
    fn smith_form_reconstructs() {
        let m: Vec<Vec<BigInt>> = [[2i64, 4, 4], [-6, 6, 12], [10, -4, -16]]
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let s = smith_normal_form(&m);
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let mul = |a: &Vec<Vec<BigInt>>, b: &Vec<Vec<BigInt>>| -> Vec<Vec<BigInt>> {
            (0..3).map(|i| (0..3).map(|j| (0..3).map(|k| &a[i][k] * &b[k][j]).sum()).collect()).collect()
        };
        let d = mul(&mul(&s.left, &m), &s.right);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { s.diagonal[i].clone() } else { BigInt::zero() };
                assert_eq!(d[i][j], want);
            }
        }
    }

    #[test]
    fn unimodular_is_trivial() {
        let q = discriminant_form(&ii(1)).unwrap();
        assert!(q.is_trivial());
        assert_eq!(finite_isometry_order(&q).unwrap(), 1);
        assert!(minus_id_in_tilde(&ii(1)).unwrap());
    }

    #[test]
    fn rank_one_form() {
        let q = discriminant_form(&rank1(-12)).unwrap();
        assert_eq!(q.generator_orders(), &[12]);
        // q(g) = -1/12 mod 2
        assert_eq!(q.q_value(0), BigRational::new(BigInt::from(23), BigInt::from(12)));
        assert_eq!(finite_isometry_order(&q).unwrap(), 4);
    }

    #[test]
    fn odd_lattice_rejected() {
        assert!(matches!(discriminant_form(&rank1(3)), Err(Error::OddLattice(_))));
    }

    #[test]
    fn minus_id_cases() {
        assert!(minus_id_in_tilde(&l(0, 1)).unwrap());
        assert!(!minus_id_in_tilde(&l(0, 3)).unwrap());
        assert!(!minus_id_in_tilde(&l(0, 2)).unwrap());
    }

    #[test]
    fn indices() {
        let i = projective_index(&l(0, 6), GroupTag::OTildePlus).unwrap();
        assert_eq!(i.projective_index, 4);
        let i = projective_index(&l(0, 1), GroupTag::OTildePlus).unwrap();
        assert_eq!(i.projective_index, 2);
        let i = projective_index(&k(0, 3), GroupTag::OTildePlus).unwrap();
        assert_eq!(i.projective_index, 4);
        let i = projective_index(&n(0, 1), GroupTag::OTildePlus).unwrap();
        assert_eq!(i.projective_index, 2);
        assert_eq!(projective_index(&t(1), GroupTag::OTildePlus).unwrap().projective_index, 4);
        let g = Lattice::from_gram(hyperbolic().gram().to_vec()).unwrap();
        assert!(projective_index(&g, GroupTag::OPlus).is_err());
    }

    #[test]
    fn tags_roundtrip() {
        for t in GroupTag::ALL {
            assert_eq!(GroupTag::parse(t.symbol()), Some(t));
        }
        assert_eq!(GroupTag::parse("o~+"), Some(GroupTag::OTildePlus));
        assert_eq!(GroupTag::parse("X"), None);
    }
}
