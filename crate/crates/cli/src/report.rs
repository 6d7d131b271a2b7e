//! Text and JSON rendering. Exact numbers are decimal strings in JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use hmvol_core::density::LocalDensity;
use hmvol_core::symbolic::SymbolicReal;
use num_rational::BigRational;
use serde::Serialize;

use crate::commands::{Analysis, CatalogRow, OracleRow};

#[derive(Debug, Serialize)]
pub struct Rational {
    pub num: String,
    pub den: String,
}

impl From<&BigRational> for Rational {
    fn from(r: &BigRational) -> Self {
        Rational { num: r.numer().to_string(), den: r.denom().to_string() }
    }
}

#[derive(Debug, Serialize)]
pub struct Symbolic {
    pub coeff_num: String,
    pub coeff_den: String,
    pub pi_half_exp: i64,
    pub radicand: String,
}

impl From<&SymbolicReal> for Symbolic {
    fn from(s: &SymbolicReal) -> Self {
        Symbolic {
            coeff_num: s.coefficient().numer().to_string(),
            coeff_den: s.coefficient().denom().to_string(),
            pi_half_exp: s.pi_half_exponent(),
            radicand: s.radicand().to_string(),
        }
    }
}

#[derive(Debug, Serialize)]
struct LatticeJson {
    expression: String,
    gram: Vec<Vec<String>>,
    rank: usize,
    signature: [usize; 2],
    det: String,
    even: bool,
}

#[derive(Debug, Serialize)]
struct EFactor {
    level: i64,
    value: Rational,
}

#[derive(Debug, Serialize)]
struct Breakdown {
    s: usize,
    w: u64,
    q: u64,
    two_exponent: i64,
    p_factor: Rational,
    e_factors: Vec<EFactor>,
}

#[derive(Debug, Serialize)]
struct DensityJson {
    p: u64,
    value_num: String,
    value_den: String,
    breakdown: Breakdown,
}

impl From<&LocalDensity> for DensityJson {
    fn from(d: &LocalDensity) -> Self {
        let b = &d.breakdown;
        DensityJson {
            p: d.prime,
            value_num: d.value.numer().to_string(),
            value_den: d.value.denom().to_string(),
            breakdown: Breakdown {
                s: b.s,
                w: b.w,
                q: b.q,
                two_exponent: b.two_exponent,
                p_factor: (&b.p_factor).into(),
                e_factors: b.e_factors.iter().map(|(j, v)| EFactor { level: *j, value: v.into() }).collect(),
            },
        }
    }
}

#[derive(Debug, Serialize)]
struct IndexJson {
    index: u64,
    projective_index: u64,
    contains_minus_id: bool,
}

#[derive(Debug, Serialize)]
struct OracleJson {
    p: u64,
    formula: Rational,
    oracle: Rational,
    depth: u32,
}

#[derive(Debug, Serialize)]
struct AnalysisJson {
    lattice: LatticeJson,
    bad_primes: Vec<u64>,
    g_sp_plus: u64,
    densities: Vec<DensityJson>,
    euler_product: Symbolic,
    character: Option<i64>,
    vol_hm_o: Symbolic,
    volumes: BTreeMap<String, Rational>,
    indices: BTreeMap<String, IndexJson>,
    cusp_leading: BTreeMap<String, Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_check: Option<Vec<OracleJson>>,
    numeric: BTreeMap<String, String>,
    assumptions: Vec<String>,
}

pub fn analysis_json(a: &Analysis, precision: usize) -> serde_json::Value {
    let r = &a.report;
    let l = &r.lattice;
    let sig = l.signature();
    let mut numeric = BTreeMap::new();
    numeric.insert("vol_hm_o".to_string(), r.vol_hm_o.to_decimal(precision));
    for g in &r.groups {
        numeric.insert(g.index.tag.to_string(), SymbolicReal::rational(g.volume.clone()).to_decimal(precision));
    }
    let doc = AnalysisJson {
        lattice: LatticeJson {
            expression: a.expression.clone(),
            gram: l.gram().iter().map(|row| row.iter().map(|x| x.to_string()).collect()).collect(),
            rank: l.rank(),
            signature: [sig.positive, sig.negative],
            det: l.det().to_string(),
            even: l.is_even(),
        },
        bad_primes: r.euler.densities.iter().map(|d| d.prime).collect(),
        g_sp_plus: r.g_sp_plus,
        densities: r.euler.densities.iter().map(DensityJson::from).collect(),
        euler_product: (&r.euler.value).into(),
        character: r.euler.character,
        vol_hm_o: (&r.vol_hm_o).into(),
        volumes: r.groups.iter().map(|g| (g.index.tag.to_string(), (&g.volume).into())).collect(),
        indices: r
            .groups
            .iter()
            .map(|g| {
                let i = &g.index;
                (
                    i.tag.to_string(),
                    IndexJson {
                        index: i.index,
                        projective_index: i.projective_index,
                        contains_minus_id: i.contains_minus_id,
                    },
                )
            })
            .collect(),
        cusp_leading: r.groups.iter().map(|g| (g.index.tag.to_string(), (&g.cusp_leading).into())).collect(),
        oracle_check: a.oracle.as_ref().map(|cs| {
            cs.iter()
                .map(|c| OracleJson { p: c.prime, formula: (&c.formula).into(), oracle: (&c.oracle).into(), depth: c.depth })
                .collect()
        }),
        numeric,
        assumptions: r.assumptions.iter().chain(&a.notes).cloned().collect(),
    };
    serde_json::to_value(doc).expect("report serializes")
}

pub fn analysis_text(a: &Analysis, precision: usize) -> String {
    let r = &a.report;
    let l = &r.lattice;
    let mut out = String::new();
    let _ = writeln!(out, "lattice     {}", a.expression);
    let _ = writeln!(out, "rank        {}", l.rank());
    let _ = writeln!(out, "signature   {}", l.signature());
    let _ = writeln!(out, "det         {}", l.det());
    let _ = writeln!(out, "g_sp^+      {}", r.g_sp_plus);
    let _ = writeln!(out);
    let _ = writeln!(out, "{:>5}  {:>24}  breakdown", "p", "alpha_p");
    for d in &r.euler.densities {
        let b = &d.breakdown;
        let _ = writeln!(out, "{:>5}  {:>24}  s={} w={} q={}", d.prime, d.value.to_string(), b.s, b.w, b.q);
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "euler product   {}", r.euler.value);
    if let Some(dc) = r.euler.character {
        let _ = writeln!(out, "character       chi_{dc}");
    }
    let _ = writeln!(out, "vol_HM(O(L))    {}  ~ {}", r.vol_hm_o, r.vol_hm_o.to_decimal(precision));
    if !r.groups.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<6} {:>6} {:>6} {:>5}  {:<28} {}", "group", "index", "proj", "-id", "volume", "cusp leading");
        for g in &r.groups {
            let i = &g.index;
            let _ = writeln!(
                out,
                "{:<6} {:>6} {:>6} {:>5}  {:<28} {}",
                i.tag.symbol(),
                i.index,
                i.projective_index,
                if i.contains_minus_id { "yes" } else { "no" },
                g.volume.to_string(),
                g.cusp_leading
            );
        }
    }
    if let Some(cs) = &a.oracle {
        let _ = writeln!(out);
        for c in cs {
            let _ = writeln!(out, "oracle p={} r={}: formula {} count {} ok", c.prime, c.depth, c.formula, c.oracle);
        }
    }
    let notes: Vec<&String> = r.assumptions.iter().chain(&a.notes).collect();
    if !notes.is_empty() {
        let _ = writeln!(out);
        for n in notes {
            let _ = writeln!(out, "note: {n}");
        }
    }
    out
}

#[derive(Debug, Serialize)]
struct CatalogJson {
    family: &'static str,
    m: usize,
    d: Option<u64>,
    expression: String,
    group: String,
    engine: Rational,
    closed_form: Rational,
    matches: bool,
}

pub fn catalog_json(rows: &[CatalogRow]) -> serde_json::Value {
    let rows: Vec<CatalogJson> = rows
        .iter()
        .map(|r| CatalogJson {
            family: r.family,
            m: r.m,
            d: r.d,
            expression: r.expression.clone(),
            group: r.tag.to_string(),
            engine: (&r.engine).into(),
            closed_form: (&r.closed_form).into(),
            matches: r.matches(),
        })
        .collect();
    serde_json::to_value(rows).expect("rows serialize")
}

pub fn catalog_text(rows: &[CatalogRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<3} {:>3} {:>5}  {:<5} {:<40} {:<40} match", "fam", "m", "d", "group", "engine", "closed form");
    for r in rows {
        let d = r.d.map_or("-".to_string(), |d| d.to_string());
        let _ = writeln!(
            out,
            "{:<3} {:>3} {:>5}  {:<5} {:<40} {:<40} {}",
            r.family,
            r.m,
            d,
            r.tag.symbol(),
            r.engine.to_string(),
            r.closed_form.to_string(),
            if r.matches() { "yes" } else { "NO" }
        );
    }
    out
}

#[derive(Debug, Serialize)]
struct OracleRowJson {
    expression: String,
    p: u64,
    convention: String,
    formula: Rational,
    values: Vec<(u32, Rational)>,
    stable: bool,
    matches: bool,
}

pub fn oracle_json(row: &OracleRow) -> serde_json::Value {
    let doc = OracleRowJson {
        expression: row.expression.clone(),
        p: row.prime,
        convention: row.convention.to_string(),
        formula: (&row.formula).into(),
        values: vec![(row.at_r.0, (&row.at_r.1).into()), (row.at_r1.0, (&row.at_r1.1).into())],
        stable: row.stable(),
        matches: row.matches(),
    };
    serde_json::to_value(doc).expect("row serializes")
}

pub fn oracle_text(row: &OracleRow) -> String {
    let verdict = match (row.stable(), row.matches()) {
        (true, true) => "stable, matches formula",
        (true, false) => "stable, DIFFERS from formula",
        (false, _) => "not yet stable",
    };
    format!(
        "{} at p = {} ({} convention)\nformula  {}\nr = {:<3}  {}\nr = {:<3}  {}\n{verdict}\n",
        row.expression, row.prime, row.convention, row.formula, row.at_r.0, row.at_r.1, row.at_r1.0, row.at_r1.1
    )
}
