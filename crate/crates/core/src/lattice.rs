//! Integral lattices given by Gram matrices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

pub const MAX_RANK: usize = 64;

/// Counts of positive and negative squares of the real form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
}

impl Signature {
    pub fn new(positive: usize, negative: usize) -> Self {
        Self { positive, negative }
    }

    pub fn rank(&self) -> usize {
        self.positive + self.negative
    }

    pub fn is_indefinite(&self) -> bool {
        self.positive > 0 && self.negative > 0
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.positive, self.negative)
    }
}

/// Building blocks accepted by [`construct`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constructor {
    /// Hyperbolic plane, Gram `[[0,1],[1,0]]`.
    Hyperbolic,
    /// Cartan matrix of the E8 root system (positive definite).
    E8,
    /// Rank-one lattice `<k>`.
    Rank1(BigInt),
    /// Literal Gram matrix.
    Gram(Vec<Vec<BigInt>>),
}

/// Nondegenerate integral lattice with cached invariants.
///
/// `hyperbolic_summand` records whether a hyperbolic plane was placed as an
/// orthogonal summand by one of the constructors; it is provenance, not a
/// computed invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    gram: Vec<Vec<BigInt>>,
    det: BigInt,
    signature: Signature,
    hyperbolic_summand: bool,
}

const E8_EDGES: [(usize, usize); 7] = [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)];

fn e8_cartan() -> Vec<Vec<BigInt>> {
    let mut g = vec![vec![BigInt::zero(); 8]; 8];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = BigInt::from(2);
    }
    for &(i, j) in &E8_EDGES {
        g[i][j] = BigInt::from(-1);
        g[j][i] = BigInt::from(-1);
    }
    g
}

/// Builds a lattice from a constructor tag, scaling every Gram entry by `scale`.
pub fn construct(kind: Constructor, scale: &BigInt) -> Result<Lattice> {
    if scale.is_zero() {
        return Err(Error::ZeroScale);
    }
    let (gram, hyperbolic) = match kind {
        Constructor::Hyperbolic => (
            vec![
                vec![BigInt::zero(), BigInt::one()],
                vec![BigInt::one(), BigInt::zero()],
            ],
            scale.abs().is_one(),
        ),
        Constructor::E8 => (e8_cartan(), false),
        Constructor::Rank1(k) => (vec![vec![k]], false),
        Constructor::Gram(rows) => (rows, false),
    };
    let scaled = gram
        .into_iter()
        .map(|row| row.into_iter().map(|x| x * scale).collect())
        .collect();
    Lattice::with_provenance(scaled, hyperbolic)
}

impl Lattice {
    /// Validates and caches invariants of a Gram matrix.
    pub fn from_gram(gram: Vec<Vec<BigInt>>) -> Result<Self> {
        Self::with_provenance(gram, false)
    }

    fn with_provenance(gram: Vec<Vec<BigInt>>, hyperbolic_summand: bool) -> Result<Self> {
        let n = gram.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        if n > MAX_RANK {
            return Err(Error::RankTooLarge { rank: n, max: MAX_RANK });
        }
        let bound = BigInt::one() << 63u32;
        for (i, row) in gram.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare { row: i, len: row.len(), expected: n });
            }
            for (j, x) in row.iter().enumerate() {
                if x.abs() >= bound {
                    return Err(Error::EntryTooLarge { entry: x.to_string() });
                }
                if *x != gram[j][i] {
                    return Err(Error::NotSymmetric { i, j });
                }
            }
        }
        let det = bareiss_det(&gram);
        if det.is_zero() {
            return Err(Error::Singular);
        }
        let signature = sylvester_signature(&gram)?;
        debug_assert_eq!(det.is_negative(), signature.negative % 2 == 1);
        Ok(Self { gram, det, signature, hyperbolic_summand })
    }

    pub fn gram(&self) -> &[Vec<BigInt>] {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn det(&self) -> &BigInt {
        &self.det
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn is_even(&self) -> bool {
        self.gram.iter().enumerate().all(|(i, row)| row[i].is_even())
    }

    pub fn is_indefinite(&self) -> bool {
        self.signature.is_indefinite()
    }

    pub fn has_hyperbolic_summand(&self) -> bool {
        self.hyperbolic_summand
    }

    /// Orthogonal direct sum; the Gram matrix is block diagonal.
    pub fn direct_sum(&self, other: &Lattice) -> Result<Lattice> {
        let (n, m) = (self.rank(), other.rank());
        if n + m > MAX_RANK {
            return Err(Error::RankTooLarge { rank: n + m, max: MAX_RANK });
        }
        let mut gram = vec![vec![BigInt::zero(); n + m]; n + m];
        for i in 0..n {
            gram[i][..n].clone_from_slice(&self.gram[i]);
        }
        for i in 0..m {
            gram[n + i][n..].clone_from_slice(&other.gram[i]);
        }
        Ok(Lattice {
            gram,
            det: &self.det * &other.det,
            signature: Signature::new(
                self.signature.positive + other.signature.positive,
                self.signature.negative + other.signature.negative,
            ),
            hyperbolic_summand: self.hyperbolic_summand || other.hyperbolic_summand,
        })
    }

    /// `k`-fold orthogonal sum of `self`.
    pub fn repeat(&self, k: usize) -> Result<Option<Lattice>> {
        let mut acc: Option<Lattice> = None;
        for _ in 0..k {
            acc = Some(match acc {
                None => self.clone(),
                Some(a) => a.direct_sum(self)?,
            });
        }
        Ok(acc)
    }

    /// The lattice `L(c)`: every Gram entry multiplied by `c`.
    pub fn rescale(&self, c: &BigInt) -> Result<Lattice> {
        if c.is_zero() {
            return Err(Error::ZeroScale);
        }
        let gram = self
            .gram
            .iter()
            .map(|row| row.iter().map(|x| x * c).collect())
            .collect();
        Lattice::with_provenance(gram, self.hyperbolic_summand && c.abs().is_one())
    }
}

/// Fraction-free Gaussian elimination.
pub fn bareiss_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * prev
}

/// Counts signs of a rational congruence diagonalization.
fn sylvester_signature(m: &[Vec<BigInt>]) -> Result<Signature> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|row| row.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let mut live: Vec<usize> = (0..n).collect();
    let (mut pos, mut neg) = (0, 0);
    while !live.is_empty() {
        let pivot = match live.iter().copied().find(|&i| !a[i][i].is_zero()) {
            Some(i) => i,
            None => {
                let (i, j) = live
                    .iter()
                    .flat_map(|&i| live.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| !a[i][j].is_zero())
                    .ok_or(Error::Singular)?;
                // row_i += row_j, col_i += col_j makes the diagonal 2 a_ij.
                for k in 0..n {
                    let t = a[j][k].clone();
                    a[i][k] += t;
                }
                for k in 0..n {
                    let t = a[k][j].clone();
                    a[k][i] += t;
                }
                i
            }
        };
        let d = a[pivot][pivot].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        live.retain(|&k| k != pivot);
        for &r in &live {
            if a[r][pivot].is_zero() {
                continue;
            }
            let f = &a[r][pivot] / &d;
            for &c in &live {
                let t = &f * &a[pivot][c];
                a[r][c] -= t;
            }
        }
    }
    Ok(Signature::new(pos, neg))
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gram[")?;
        for (i, row) in self.gram.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            write!(f, "{}", cells.join(","))?;
        }
        write!(f, "]")
    }
}

/// Named lattices used throughout the examples and tests.
pub mod families {
    use super::*;

    pub fn hyperbolic() -> Lattice {
        construct(Constructor::Hyperbolic, &BigInt::one()).unwrap()
    }

    pub fn e8_negative() -> Lattice {
        construct(Constructor::E8, &BigInt::from(-1)).unwrap()
    }

    pub fn rank1(k: i64) -> Lattice {
        construct(Constructor::Rank1(BigInt::from(k)), &BigInt::one()).unwrap()
    }

    fn sum(parts: Vec<Lattice>) -> Lattice {
        let mut it = parts.into_iter();
        let first = it.next().expect("at least one summand");
        it.fold(first, |acc, x| acc.direct_sum(&x).unwrap())
    }

    fn e8s(m: usize) -> Vec<Lattice> {
        vec![e8_negative(); m]
    }

    /// `2U + m E8(-1)`.
    pub fn ii(m: usize) -> Lattice {
        let mut parts = vec![hyperbolic(), hyperbolic()];
        parts.extend(e8s(m));
        sum(parts)
    }

    /// `U + U(2) + m E8(-1)`.
    pub fn t(m: usize) -> Lattice {
        let u2 = construct(Constructor::Hyperbolic, &BigInt::from(2)).unwrap();
        let mut parts = vec![hyperbolic(), u2];
        parts.extend(e8s(m));
        sum(parts)
    }

    /// `2U + m E8(-1) + <-2d>`.
    pub fn l(m: usize, d: i64) -> Lattice {
        let mut parts = vec![hyperbolic(), hyperbolic()];
        parts.extend(e8s(m));
        parts.push(rank1(-2 * d));
        sum(parts)
    }

    /// `U + m E8(-1) + <2> + <-2d>`.
    pub fn k(m: usize, d: i64) -> Lattice {
        let mut parts = vec![hyperbolic()];
        parts.extend(e8s(m));
        parts.push(rank1(2));
        parts.push(rank1(-2 * d));
        sum(parts)
    }

    /// The binary form `[[2,1],[1,(1-d)/2]]` for `d = 1 mod 4`.
    pub fn heegner_binary(d: i64) -> Lattice {
        assert_eq!(d.rem_euclid(4), 1, "binary form needs d = 1 mod 4");
        Lattice::from_gram(vec![
            vec![BigInt::from(2), BigInt::one()],
            vec![BigInt::one(), BigInt::from((1 - d) / 2)],
        ])
        .unwrap()
    }

    /// `U + m E8(-1) + [[2,1],[1,(1-d)/2]]`.
    pub fn n(m: usize, d: i64) -> Lattice {
        let mut parts = vec![hyperbolic()];
        parts.extend(e8s(m));
        parts.push(heegner_binary(d));
        sum(parts)
    }
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn hyperbolic_plane() {
        let u = construct(Constructor::Hyperbolic, &bi(1)).unwrap();
        assert_eq!(u.rank(), 2);
        assert_eq!(*u.det(), bi(-1));
        assert_eq!(u.signature(), Signature::new(1, 1));
        assert!(u.is_even());
        assert!(u.has_hyperbolic_summand());
    }

    #[test]
    fn e8_negative_definite() {
        let e = construct(Constructor::E8, &bi(-1)).unwrap();
        assert_eq!(e.rank(), 8);
        assert_eq!(*e.det(), bi(1));
        assert_eq!(e.signature(), Signature::new(0, 8));
        let pos = construct(Constructor::E8, &bi(1)).unwrap();
        assert_eq!(pos.signature(), Signature::new(8, 0));
    }

    #[test]
    fn rank_one() {
        let l = construct(Constructor::Rank1(bi(-6)), &bi(1)).unwrap();
        assert_eq!((l.rank(), l.det().clone()), (1, bi(-6)));
    }

    #[test]
    fn rejects_bad_literals() {
        let asym = vec![vec![bi(1), bi(2)], vec![bi(3), bi(1)]];
        assert_eq!(
            construct(Constructor::Gram(asym), &bi(1)),
            Err(Error::NotSymmetric { i: 0, j: 1 })
        );
        let sing = vec![vec![bi(1), bi(1)], vec![bi(1), bi(1)]];
        assert_eq!(Lattice::from_gram(sing), Err(Error::Singular));
        assert_eq!(construct(Constructor::E8, &bi(0)), Err(Error::ZeroScale));
        let big = vec![vec![BigInt::one() << 63u32]];
        assert!(matches!(Lattice::from_gram(big), Err(Error::EntryTooLarge { .. })));
    }

    #[test]
    fn direct_sums_from_the_families() {
        let k3 = l(2, 1);
        assert_eq!(k3.signature(), Signature::new(2, 19));
        assert_eq!(k3.det().abs(), bi(2));
        assert_eq!(t(1).det().abs(), bi(4));
        let two = ii(2);
        assert_eq!((two.det().clone(), two.signature()), (bi(1), Signature::new(2, 18)));
        let kk = k(2, 5);
        assert_eq!(*kk.det(), bi(20));
        let s = rank1(2).direct_sum(&rank1(-6)).unwrap();
        assert_eq!(s.signature(), Signature::new(1, 1));
        assert_eq!(*n(0, 5).det(), bi(5));
    }

    #[test]
    fn sum_is_symmetric_in_invariants() {
        let a = t(0);
        let b = rank1(-10);
        let ab = a.direct_sum(&b).unwrap();
        let ba = b.direct_sum(&a).unwrap();
        assert_eq!(ab.det(), ba.det());
        assert_eq!(ab.rank(), ba.rank());
        assert_eq!(ab.signature(), ba.signature());
    }

    #[test]
    fn cached_invariants_match_recomputation() {
        let k3 = l(2, 7);
        let fresh = Lattice::from_gram(k3.gram().to_vec()).unwrap();
        assert_eq!(fresh.det(), k3.det());
        assert_eq!(fresh.signature(), k3.signature());
    }

    #[test]
    fn signature_with_zero_diagonal() {
        let g = vec![
            vec![bi(0), bi(1), bi(0)],
            vec![bi(1), bi(0), bi(2)],
            vec![bi(0), bi(2), bi(0)],
        ];
        assert_eq!(Lattice::from_gram(g), Err(Error::Singular));
        let g = vec![vec![bi(2), bi(1)], vec![bi(1), bi(-2)]];
        let l = Lattice::from_gram(g).unwrap();
        assert_eq!((l.det().clone(), l.signature()), (bi(-5), Signature::new(1, 1)));
    }

    #[test]
    fn rescaling_flips_signature_for_negative_scale() {
        let a = k(0, 3);
        let r = a.rescale(&bi(-3)).unwrap();
        assert_eq!(*r.det(), a.det() * bi(81));
        assert_eq!(r.signature(), Signature::new(a.signature().negative, a.signature().positive));
    }
}
