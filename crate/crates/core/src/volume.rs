//! Hirzebruch-Mumford volumes of `O(L)` and its arithmetic subgroups, and
//! the leading coefficient of the dimension of spaces of cusp forms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;

use crate::arith::next_prime;
use crate::density::{bad_primes, local_density, p_series, LocalDensity};
use crate::findex::{projective_index, GroupIndex, GroupTag};
use crate::lattice::Lattice;
use crate::padic::jordan_decompose;
use crate::special::{factorial, fundamental_discriminant, gamma_factor, gamma_m, kronecker, l_closed, zeta_closed};
use crate::symbolic::SymbolicReal;
use crate::{Error, Result};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `prod_p alpha_p(L)^{-1}` together with what went into it.
#[derive(Debug, Clone)]
pub struct EulerProduct {
    pub value: SymbolicReal,
    pub densities: Vec<LocalDensity>,
    /// Fundamental discriminant of the genus character, for even rank.
    pub character: Option<i64>,
}

fn check_volume_hypotheses(l: &Lattice) -> Result<()> {
    if l.rank() < 3 {
        return Err(Error::Precondition(format!("volume formula needs rank >= 3, got {}", l.rank())));
    }
    if !l.is_indefinite() {
        return Err(Error::Precondition(format!("volume formula needs an indefinite lattice, got signature {}", l.signature())));
    }
    Ok(())
}

fn check_character(l: &Lattice, d: i64, bad: &[u64]) -> Result<()> {
    let mut p = 2;
    let mut checked = 0;
    while checked < 5 {
        p = next_prime(p);
        if bad.contains(&p) {
            continue;
        }
        let decomp = jordan_decompose(l, p)?;
        let chi = decomp.blocks[0].chi;
        if chi != kronecker(d, p as i64) {
            return Err(Error::Internal(format!(
                "genus character mismatch at p = {p}: block chi {chi}, kronecker({d}, {p}) = {}",
                kronecker(d, p as i64)
            )));
        }
        checked += 1;
    }
    Ok(())
}

/// `prod_p alpha_p(L)^{-1}`: exact densities at the primes dividing
/// `2 det L`, closed forms of zeta and L-values for the rest.
pub fn euler_alpha_product(l: &Lattice) -> Result<EulerProduct> {
    check_volume_hypotheses(l)?;
    let bad = bad_primes(l)?;
    let densities: Vec<LocalDensity> = bad.par_iter().map(|&p| local_density(l, p)).collect::<Result<_>>()?;
    let bad_part = densities.iter().fold(BigRational::one(), |acc, d| acc / &d.value);

    let rho = l.rank();
    let t = rho / 2;
    let (tail, character) = if rho % 2 == 1 {
        let zetas = (1..=t).map(|i| zeta_closed(2 * i)).collect::<Result<Vec<_>>>()?;
        let corr = bad.iter().fold(BigRational::one(), |acc, &p| acc * p_series(p, t as u64));
        let v = zetas.iter().fold(SymbolicReal::one(), |acc, z| &acc * z).scale(&corr);
        (v, None)
    } else {
        let det = l.det().to_i64().ok_or_else(|| Error::Precondition("determinant exceeds 64 bits".into()))?;
        let m = if t % 2 == 0 { det } else { -det };
        let (d, _) = fundamental_discriminant(m)?;
        let parity_ok = (d > 0) == (t % 2 == 0);
        if !parity_ok {
            return Err(Error::Precondition(format!(
                "even rank {rho} with det {det}: L({t}, chi_{d}) has no closed form of the required parity"
            )));
        }
        check_character(l, d, &bad)?;
        let zetas = (1..t).map(|i| zeta_closed(2 * i)).collect::<Result<Vec<_>>>()?;
        let lval = l_closed(t, d)?;
        let corr = bad.iter().fold(BigRational::one(), |acc, &p| {
            let chi = rat(kronecker(d, p as i64) as i64);
            let pt = num_traits::pow(BigRational::from_integer(BigInt::from(p)), t);
            acc * p_series(p, t as u64 - 1) * (BigRational::one() - chi / pt)
        });
        let v = zetas.iter().fold(lval, |acc, z| &acc * z).scale(&corr);
        (v, Some(d))
    };
    Ok(EulerProduct { value: tail.scale(&bad_part), densities, character })
}

fn det_power(l: &Lattice) -> Result<SymbolicReal> {
    // |det L|^{(rho + 1)/2}
    let det = l.det().abs();
    let rho = l.rank() as u32;
    let whole = SymbolicReal::rational(BigRational::from_integer(det.pow((rho + 1) / 2)));
    if rho % 2 == 1 {
        return Ok(whole);
    }
    let d = det.to_u64().ok_or_else(|| Error::Precondition("determinant exceeds 64 bits".into()))?;
    Ok(&whole * &SymbolicReal::sqrt(d)?)
}

fn check_gsp(g: u64) -> Result<()> {
    if g == 0 || !g.is_power_of_two() {
        return Err(Error::Precondition(format!("number of spinor genera must be a power of two, got {g}")));
    }
    Ok(())
}

/// `vol_HM(O(L)) = (2/g) |det L|^{(rho+1)/2} prod_{k<=rho} pi^{-k/2} Gamma(k/2) prod_p alpha_p^{-1}`.
pub fn vol_hm(l: &Lattice, g_sp_plus: u64) -> Result<SymbolicReal> {
    check_gsp(g_sp_plus)?;
    let e = euler_alpha_product(l)?;
    vol_hm_from(l, g_sp_plus, &e.value)
}

fn vol_hm_from(l: &Lattice, g_sp_plus: u64, euler: &SymbolicReal) -> Result<SymbolicReal> {
    let two_over_g = BigRational::new(BigInt::from(2), BigInt::from(g_sp_plus));
    let v = &(&det_power(l)? * &gamma_factor(l.rank() as u64)) * euler;
    Ok(v.scale(&two_over_g))
}

/// The volumes that combine into `vol_HM` as a quotient of Siegel volumes.
#[derive(Debug, Clone)]
pub struct SiegelIdentities {
    pub gamma_r: SymbolicReal,
    pub gamma_s: SymbolicReal,
    pub gamma_rs: SymbolicReal,
    /// Real Tamagawa measure `(2/g) prod_p alpha_p^{-1}`.
    pub alpha_infinity: SymbolicReal,
    pub vol_siegel: SymbolicReal,
    pub vol_compact_dual: SymbolicReal,
    pub ratio: SymbolicReal,
}

/// Computes `vol_S(O(L))` and `vol_S` of the compact dual from the `gamma_m`
/// and checks that their quotient is [`vol_hm`].
pub fn siegel_identities(l: &Lattice, g_sp_plus: u64) -> Result<SiegelIdentities> {
    check_gsp(g_sp_plus)?;
    let sig = l.signature();
    let e = euler_alpha_product(l)?;
    let gamma_r = gamma_m(sig.positive as u64);
    let gamma_s = gamma_m(sig.negative as u64);
    let gamma_rs = gamma_m(l.rank() as u64);
    let alpha_infinity = e.value.scale(&BigRational::new(BigInt::from(2), BigInt::from(g_sp_plus)));
    let two = SymbolicReal::integer(2);
    let vol_siegel = &(&(&two * &alpha_infinity) * &det_power(l)?) / &(&gamma_r * &gamma_s);
    let vol_compact_dual = &(&two * &gamma_rs) / &(&gamma_r * &gamma_s);
    let ratio = &vol_siegel / &vol_compact_dual;
    let direct = vol_hm_from(l, g_sp_plus, &e.value)?;
    if ratio != direct {
        return Err(Error::Internal(format!("Siegel volume ratio {ratio} differs from vol_HM {direct}")));
    }
    Ok(SiegelIdentities { gamma_r, gamma_s, gamma_rs, alpha_infinity, vol_siegel, vol_compact_dual, ratio })
}

/// How the number of spinor genera was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GspSource {
    /// Defaulted to 1 because the expression has a hyperbolic plane summand.
    HyperbolicSummand,
    Explicit,
}

fn resolve_gsp(l: &Lattice, g_sp_plus: Option<u64>) -> Result<(u64, GspSource)> {
    match g_sp_plus {
        Some(g) => {
            check_gsp(g)?;
            Ok((g, GspSource::Explicit))
        }
        None if l.has_hyperbolic_summand() => Ok((1, GspSource::HyperbolicSummand)),
        None => Err(Error::Precondition(
            "no hyperbolic plane summand: the number of spinor genera must be given explicitly".into(),
        )),
    }
}

fn check_signature_2n(l: &Lattice) -> Result<usize> {
    let sig = l.signature();
    if sig.positive != 2 || sig.negative < 1 {
        return Err(Error::Precondition(format!("group volumes need signature (2, n) with n >= 1, got {sig}")));
    }
    Ok(sig.negative)
}

fn rational_volume(v: &SymbolicReal) -> Result<BigRational> {
    v.to_rational()
        .ok_or_else(|| Error::Internal(format!("volume {v} of a signature (2, n) lattice is not rational")))
}

/// `vol_HM(Gamma) = [PO(L) : P Gamma] vol_HM(O(L))`.
pub fn group_volume(l: &Lattice, tag: GroupTag, g_sp_plus: Option<u64>) -> Result<BigRational> {
    check_signature_2n(l)?;
    let (g, _) = resolve_gsp(l, g_sp_plus)?;
    let idx = projective_index(l, tag)?;
    let v = rational_volume(&vol_hm(l, g)?)?;
    Ok(v * rat(idx.projective_index as i64))
}

/// Coefficient of `k^n` in `dim S_k(Gamma)`: `(2 / n!) vol_HM(Gamma)`.
pub fn cusp_dim_leading(l: &Lattice, tag: GroupTag, g_sp_plus: Option<u64>) -> Result<BigRational> {
    let n = check_signature_2n(l)?;
    let v = group_volume(l, tag, g_sp_plus)?;
    Ok(v * BigRational::new(BigInt::from(2), factorial(n as u64)))
}

/// Volume data of one group.
#[derive(Debug, Clone)]
pub struct GroupRow {
    pub index: GroupIndex,
    pub volume: BigRational,
    pub cusp_leading: BigRational,
}

/// Everything computed for one lattice.
#[derive(Debug, Clone)]
pub struct VolumeReport {
    pub lattice: Lattice,
    pub g_sp_plus: u64,
    pub gsp_source: GspSource,
    pub euler: EulerProduct,
    pub vol_hm_o: SymbolicReal,
    pub groups: Vec<GroupRow>,
    pub assumptions: Vec<String>,
}

/// Builds the report for the requested groups. Group rows need signature
/// `(2, n)`; other signatures get the bare `vol_HM(O(L))`.
pub fn volume_report(l: &Lattice, tags: &[GroupTag], g_sp_plus: Option<u64>) -> Result<VolumeReport> {
    check_volume_hypotheses(l)?;
    let (g, source) = resolve_gsp(l, g_sp_plus)?;
    let euler = euler_alpha_product(l)?;
    let vol_hm_o = vol_hm_from(l, g, &euler.value)?;
    let mut assumptions = Vec::new();
    match source {
        GspSource::HyperbolicSummand => assumptions.push(
            "g_sp^+ = 1: the lattice has a hyperbolic plane summand, so its genus has one class".to_string(),
        ),
        GspSource::Explicit => assumptions.push(format!("g_sp^+ = {g} supplied by the caller")),
    }
    let mut groups = Vec::new();
    if !tags.is_empty() {
        let n = check_signature_2n(l)?;
        let base = rational_volume(&vol_hm_o)?;
        for &tag in tags {
            let index = projective_index(l, tag)?;
            let volume = &base * rat(index.projective_index as i64);
            let cusp_leading = &volume * BigRational::new(BigInt::from(2), factorial(n as u64));
            if index.contains_minus_id {
                assumptions.push(format!(
                    "{tag}: -id lies in the group, so the cusp form count holds for weights k with (-1)^k = chi(-id)"
                ));
            }
            groups.push(GroupRow { index, volume, cusp_leading });
        }
    }
    Ok(VolumeReport { lattice: l.clone(), g_sp_plus: g, gsp_source: source, euler, vol_hm_o, groups, assumptions })
}
