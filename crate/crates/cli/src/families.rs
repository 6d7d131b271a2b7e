//! Named lattice families with independently coded volume formulas.

use hmvol_core::findex::GroupTag;
use num_rational::BigRational;

use crate::closed_forms::{vol_ii, vol_k, vol_l, vol_n, vol_t};

/// A family indexed by `m` (number of `E8(-1)` summands) and, for some
/// families, a level `d`.
pub trait LatticeFamily: Send + Sync {
    fn name(&self) -> &'static str;

    /// Group whose volume the closed form describes.
    fn tag(&self) -> GroupTag;

    fn uses_level(&self) -> bool {
        true
    }

    fn admits(&self, _m: usize, d: u64) -> bool {
        d >= 1
    }

    /// Lattice expression in the command-line syntax.
    fn expression(&self, m: usize, d: u64) -> String;

    fn closed_form(&self, m: usize, d: u64) -> BigRational;
}

fn e8_terms(m: usize) -> String {
    match m {
        0 => String::new(),
        1 => " + E8(-1)".into(),
        m => format!(" + {m}*E8(-1)"),
    }
}

pub struct EvenUnimodular;

impl LatticeFamily for EvenUnimodular {
    fn name(&self) -> &'static str {
        "II"
    }
    fn tag(&self) -> GroupTag {
        GroupTag::OPlus
    }
    fn uses_level(&self) -> bool {
        false
    }
    fn admits(&self, _m: usize, _d: u64) -> bool {
        true
    }
    fn expression(&self, m: usize, _d: u64) -> String {
        format!("2*U{}", e8_terms(m))
    }
    fn closed_form(&self, m: usize, _d: u64) -> BigRational {
        vol_ii(m)
    }
}

pub struct Discriminant4;

impl LatticeFamily for Discriminant4 {
    fn name(&self) -> &'static str {
        "T"
    }
    fn tag(&self) -> GroupTag {
        GroupTag::OTildePlus
    }
    fn uses_level(&self) -> bool {
        false
    }
    fn admits(&self, _m: usize, _d: u64) -> bool {
        true
    }
    fn expression(&self, m: usize, _d: u64) -> String {
        format!("U + U(2){}", e8_terms(m))
    }
    fn closed_form(&self, m: usize, _d: u64) -> BigRational {
        vol_t(m)
    }
}

pub struct Polarised;

impl LatticeFamily for Polarised {
    fn name(&self) -> &'static str {
        "L"
    }
    fn tag(&self) -> GroupTag {
        GroupTag::OTildePlus
    }
    fn expression(&self, m: usize, d: u64) -> String {
        format!("2*U{} + <-{}>", e8_terms(m), 2 * d)
    }
    fn closed_form(&self, m: usize, d: u64) -> BigRational {
        vol_l(m, d)
    }
}

pub struct SplitBinary;

impl LatticeFamily for SplitBinary {
    fn name(&self) -> &'static str {
        "K"
    }
    fn tag(&self) -> GroupTag {
        GroupTag::OTildePlus
    }
    fn expression(&self, m: usize, d: u64) -> String {
        format!("U{} + <2> + <-{}>", e8_terms(m), 2 * d)
    }
    fn closed_form(&self, m: usize, d: u64) -> BigRational {
        vol_k(m, d)
    }
}

pub struct OddDiscriminantBinary;

impl LatticeFamily for OddDiscriminantBinary {
    fn name(&self) -> &'static str {
        "N"
    }
    fn tag(&self) -> GroupTag {
        GroupTag::OTildePlus
    }
    fn admits(&self, _m: usize, d: u64) -> bool {
        d % 4 == 1
    }
    fn expression(&self, m: usize, d: u64) -> String {
        let c = (1 - d as i64) / 2;
        format!("U{} + gram[2,1;1,{c}]", e8_terms(m))
    }
    fn closed_form(&self, m: usize, d: u64) -> BigRational {
        vol_n(m, d)
    }
}

/// Families selectable by name (case-insensitive).
pub struct FamilyRegistry {
    families: Vec<Box<dyn LatticeFamily>>,
}

impl Default for FamilyRegistry {
    fn default() -> Self {
        Self {
            families: vec![
                Box::new(EvenUnimodular),
                Box::new(Discriminant4),
                Box::new(Polarised),
                Box::new(SplitBinary),
                Box::new(OddDiscriminantBinary),
            ],
        }
    }
}

impl FamilyRegistry {
    pub fn register(&mut self, family: Box<dyn LatticeFamily>) {
        self.families.retain(|f| !f.name().eq_ignore_ascii_case(family.name()));
        self.families.push(family);
    }

    pub fn get(&self, name: &str) -> Option<&dyn LatticeFamily> {
        self.families.iter().find(|f| f.name().eq_ignore_ascii_case(name)).map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.families.iter().map(|f| f.name()).collect()
    }
}
