//! The `analyze`, `catalog` and `oracle` subcommands as library calls.

use hmvol_core::density::{local_density, oracle_stabilize, siegel_count, Convention};
use hmvol_core::findex::GroupTag;
use hmvol_core::lattice::Lattice;
use hmvol_core::volume::{group_volume, volume_report, VolumeReport};
use hmvol_core::Error;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::expr::{lattice_from_text, ExprError};
use crate::families::FamilyRegistry;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ExprError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    /// 1 mismatch, 2 parse or usage, 3 precondition, 4 guard, 5 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Mismatch(_) => 1,
            CliError::Parse(_) | CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                Error::NotSquare { .. }
                | Error::NotSymmetric { .. }
                | Error::Singular
                | Error::Empty
                | Error::ZeroScale
                | Error::RankTooLarge { .. }
                | Error::EntryTooLarge { .. } => 2,
                Error::NotPrime(_) | Error::Precondition(_) | Error::OddLattice(_) => 3,
                Error::Guard { .. } | Error::PrecisionExhausted { .. } => 4,
                Error::Internal(_) => 5,
            },
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct AnalyzeOptions {
    /// Empty means every group the lattice supports.
    pub groups: Vec<GroupTag>,
    pub gsp: Option<u64>,
    pub oracle_check: bool,
}

/// Formula and stabilized oracle value at one prime.
#[derive(Debug, Clone)]
pub struct OracleCheck {
    pub prime: u64,
    pub formula: BigRational,
    pub oracle: BigRational,
    pub depth: u32,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub expression: String,
    pub report: VolumeReport,
    pub oracle: Option<Vec<OracleCheck>>,
    pub notes: Vec<String>,
}

fn default_groups(l: &Lattice) -> Vec<GroupTag> {
    let sig = l.signature();
    if sig.positive != 2 {
        Vec::new()
    } else if l.has_hyperbolic_summand() && l.is_even() {
        GroupTag::ALL.to_vec()
    } else if l.has_hyperbolic_summand() {
        GroupTag::ALL.into_iter().filter(|t| !t.is_stable()).collect()
    } else {
        vec![GroupTag::O]
    }
}

pub fn analyze(text: &str, opts: &AnalyzeOptions) -> Result<Analysis, CliError> {
    let l = lattice_from_text(text)?;
    if l.rank() < 3 {
        return Err(Error::Precondition(format!("volumes need rank >= 3, got {}", l.rank())).into());
    }
    let mut notes = Vec::new();
    let defaulted = opts.gsp.is_none() && !l.has_hyperbolic_summand();
    let gsp = if defaulted { Some(1) } else { opts.gsp };
    let groups = if opts.groups.is_empty() { default_groups(&l) } else { opts.groups.clone() };
    let mut report = volume_report(&l, &groups, gsp)?;
    if defaulted {
        report.assumptions.retain(|a| !a.starts_with("g_sp^+"));
        report
            .assumptions
            .insert(0, "g_sp^+ = 1 by default; no hyperbolic plane summand confirms it".to_string());
    }
    let oracle = if opts.oracle_check {
        if l.rank() > hmvol_core::density::ORACLE_MAX_RANK {
            notes.push(format!("oracle check skipped: rank {} exceeds 3", l.rank()));
            None
        } else {
            Some(oracle_checks(&report)?)
        }
    } else {
        None
    };
    Ok(Analysis { expression: text.to_string(), report, oracle, notes })
}

fn oracle_checks(report: &VolumeReport) -> Result<Vec<OracleCheck>, CliError> {
    let l = &report.lattice;
    report
        .euler
        .densities
        .iter()
        .map(|d| {
            let run = oracle_stabilize(l, d.prime, Convention::Literal)?;
            let (depth, oracle) = run.stable.ok_or_else(|| Error::Guard {
                what: format!("oracle at p = {} did not stabilize", d.prime),
                estimate: run.values.last().map_or(String::new(), |(r, _)| format!("r = {}", r + 1)),
                limit: hmvol_core::density::ORACLE_WORK_LIMIT.to_string(),
            })?;
            if oracle != d.value {
                return Err(Error::Internal(format!(
                    "alpha_{} formula {} differs from the stabilized count {oracle}",
                    d.prime, d.value
                ))
                .into());
            }
            Ok(OracleCheck { prime: d.prime, formula: d.value.clone(), oracle, depth })
        })
        .collect()
}

/// Parses `"0..3"`, `"1,2,5"` or mixtures such as `"1..3,7"`; ranges are inclusive.
pub fn parse_range(s: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Usage(format!("bad range '{s}': use forms like 3, 1..10 or 1,2,5"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((a, b)) => {
                let a: u64 = a.trim().parse().map_err(|_| bad())?;
                let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct CatalogRow {
    pub family: &'static str,
    pub m: usize,
    pub d: Option<u64>,
    pub expression: String,
    pub tag: GroupTag,
    pub engine: BigRational,
    pub closed_form: BigRational,
}

impl CatalogRow {
    pub fn matches(&self) -> bool {
        self.engine == self.closed_form
    }
}

/// Engine and closed-form volumes over a parameter grid, computed in parallel.
pub fn catalog(family: &str, ms: &[u64], ds: &[u64]) -> Result<Vec<CatalogRow>, CliError> {
    let registry = FamilyRegistry::default();
    let fam = registry.get(family).ok_or_else(|| {
        CliError::Usage(format!("unknown family '{family}', expected one of {}", registry.names().join(", ")))
    })?;
    let levels: Vec<Option<u64>> =
        if fam.uses_level() { ds.iter().map(|&d| Some(d)).collect() } else { vec![None] };
    let grid: Vec<(usize, Option<u64>)> = ms
        .iter()
        .flat_map(|&m| levels.iter().map(move |&d| (m as usize, d)))
        .filter(|&(m, d)| fam.admits(m, d.unwrap_or(1)))
        .collect();
    if grid.is_empty() {
        return Err(CliError::Usage(format!("no admissible parameters for family {}", fam.name())));
    }
    grid.into_par_iter()
        .map(|(m, d)| {
            let level = d.unwrap_or(1);
            let expression = fam.expression(m, level);
            let l = lattice_from_text(&expression)?;
            let engine = group_volume(&l, fam.tag(), None)?;
            Ok(CatalogRow {
                family: fam.name(),
                m,
                d,
                expression,
                tag: fam.tag(),
                engine,
                closed_form: fam.closed_form(m, level),
            })
        })
        .collect()
}

/// Formula against the raw count at depths `r` and `r + 1`.
#[derive(Debug, Clone)]
pub struct OracleRow {
    pub expression: String,
    pub prime: u64,
    pub convention: Convention,
    pub formula: BigRational,
    pub at_r: (u32, BigRational),
    pub at_r1: (u32, BigRational),
}

impl OracleRow {
    pub fn stable(&self) -> bool {
        self.at_r.1 == self.at_r1.1
    }

    pub fn matches(&self) -> bool {
        self.stable() && self.at_r.1 == self.formula
    }
}

pub fn oracle(text: &str, p: u64, r: u32, convention: Convention) -> Result<OracleRow, CliError> {
    let l = lattice_from_text(text)?;
    let formula = local_density(&l, p)?.value;
    let a = siegel_count(&l, p, r, convention)?;
    let b = siegel_count(&l, p, r + 1, convention)?;
    Ok(OracleRow {
        expression: text.to_string(),
        prime: p,
        convention,
        formula,
        at_r: (r, a),
        at_r1: (r + 1, b),
    })
}
