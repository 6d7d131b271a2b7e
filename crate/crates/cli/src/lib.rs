//! Command-line front end: lattice expressions, volume reports, the family
//! catalog and the counting oracle.

pub mod closed_forms;
pub mod commands;
pub mod expr;
pub mod families;
pub mod report;

pub use commands::{analyze, catalog, oracle, AnalyzeOptions, CatalogRow, CliError, OracleRow};
pub use expr::{lattice_from_text, parse_expr, render, LatticeExpr};
pub use families::{FamilyRegistry, LatticeFamily};
