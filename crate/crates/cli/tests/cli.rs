//! Expression syntax, library entry points and the `hmvol` binary.

use std::process::{Command, Output};

use hmvol_cli::commands::{analyze, catalog, oracle, AnalyzeOptions};
use hmvol_cli::{lattice_from_text, parse_expr, render};
use hmvol_core::density::Convention;
use hmvol_core::findex::GroupTag;
use num_bigint::BigInt;
use num_rational::BigRational;

const CORPUS: [&str; 12] = [
    "U",
    "2*U + 2*E8(-1) + <-50>",
    "U + U(2) + E8(-1)",
    "gram[2,1;1,-2]",
    "<1> + <-1>",
    "U(3) + (E8(-1) + <4>)",
    "2*(U + <-2>)",
    "U + gram[ 2 , 1 ; 1 , -6 ]",
    "E8",
    "<-7>+<2>+U(-2)",
    "3 * ( 2 * U(5) )",
    "((U))",
];

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn render_round_trips() {
    for text in CORPUS {
        let ast = parse_expr(text).unwrap();
        let again = parse_expr(&render(&ast)).unwrap();
        assert_eq!(again, ast, "{text}");
        assert_eq!(render(&again), render(&ast));
        assert_eq!(lattice_from_text(&render(&ast)).unwrap(), lattice_from_text(text).unwrap());
    }
}

#[test]
fn documented_expressions() {
    let l = lattice_from_text("2*U + 2*E8(-1) + <-50>").unwrap();
    assert_eq!((l.rank(), l.signature().positive, l.signature().negative), (21, 2, 19));
    let t = lattice_from_text("U + U(2) + E8(-1)").unwrap();
    assert_eq!(t.det(), &BigInt::from(4));
    assert_eq!(t.rank(), 12);
    let g = lattice_from_text("gram[2,1;1,-2]").unwrap();
    assert_eq!((g.rank(), g.det()), (2, &BigInt::from(-5)));
}

#[test]
fn analyze_examples() {
    let only = |tag| AnalyzeOptions { groups: vec![tag], ..AnalyzeOptions::default() };
    let sp4 = analyze("2*U + <-2>", &only(GroupTag::OTildePlus)).unwrap();
    assert_eq!(sp4.report.groups[0].volume, q(1, 2880));

    let ii = analyze("2*U + 2*E8(-1)", &AnalyzeOptions::default()).unwrap();
    assert_eq!(ii.report.groups.len(), 5);
    let vol = |tag| ii.report.groups.iter().find(|g| g.index.tag == tag).unwrap().volume.clone();
    assert_eq!(vol(GroupTag::OPlus), vol(GroupTag::OTildePlus));
    assert_eq!(vol(GroupTag::OPlus), &vol(GroupTag::O) * q(2, 1));

    let checked = analyze("U + <-2>", &AnalyzeOptions { oracle_check: true, ..AnalyzeOptions::default() }).unwrap();
    let runs = checked.oracle.unwrap();
    assert_eq!(runs.len(), 1);
    assert_eq!(runs[0].formula, runs[0].oracle);
}

#[test]
fn defaulted_spinor_genera_are_flagged() {
    let a = analyze("<2> + <2> + <-2>", &AnalyzeOptions::default()).unwrap();
    assert_eq!(a.report.g_sp_plus, 1);
    assert!(a.report.assumptions[0].contains("by default"));
    let b = analyze("U + <-2>", &AnalyzeOptions::default()).unwrap();
    assert!(b.report.assumptions[0].contains("hyperbolic plane summand"));
}

#[test]
fn catalog_and_oracle_rows() {
    let rows = catalog("L", &[0], &(1..=10).collect::<Vec<_>>()).unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r.matches()));
    let k = catalog("k", &[0], &[1, 2, 3, 5, 6, 7]).unwrap();
    assert!(k.iter().all(|r| r.matches()));
    assert!(catalog("Z", &[0], &[1]).is_err());

    let u = oracle("U", 3, 1, Convention::Literal).unwrap();
    assert!(u.matches());
    assert_eq!(u.formula, q(2, 3));
    assert!(oracle("<1> + <-1>", 5, 1, Convention::Literal).unwrap().matches());
}

fn hmvol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hmvol")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    hmvol(args).status.code().expect("exit code")
}

#[test]
fn binary_exit_codes() {
    assert_eq!(code(&["analyze", "U"]), 3);
    assert_eq!(code(&["analyze", "2*U + <-2"]), 2);
    assert_eq!(code(&["analyze", "U(0) + U"]), 2);
    assert_eq!(code(&["oracle", "2*U + 2*E8(-1)", "2", "1"]), 4);
    assert_eq!(code(&["oracle", "<1>", "4", "1"]), 3);
    assert_eq!(code(&["catalog", "Q"]), 2);
    assert_eq!(code(&["catalog", "L", "--m", "0", "--d", "1..10"]), 0);
    assert_eq!(code(&["analyze", "2*U + <-2>", "--gsp", "3"]), 3);
}

#[test]
fn diagnostics_go_to_stderr() {
    let out = hmvol(&["analyze", "2*U + <-2"]);
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("syntax error at byte 9") && err.contains("expected '>'"), "{err}");
}

#[test]
fn json_carries_exact_rationals_as_strings() {
    let out = hmvol(&["analyze", "2*U + <-2>", "--group", "O~+", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["volumes"]["O~+"]["num"], "1");
    assert_eq!(v["volumes"]["O~+"]["den"], "2880");
    assert_eq!(v["lattice"]["signature"], serde_json::json!([2, 3]));
    assert_eq!(v["bad_primes"], serde_json::json!([2]));
    let d = &v["densities"][0];
    assert!(d["value_num"].is_string() && d["value_den"].is_string());
    assert!(v["euler_product"]["pi_half_exp"].is_i64());
    assert!(v["assumptions"].as_array().unwrap().len() >= 2);

    let cat = hmvol(&["catalog", "II", "--m", "0..2", "--json"]);
    assert!(cat.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&cat.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r["engine"] == r["closed_form"]));

    let orc = hmvol(&["oracle", "U", "3", "1", "--json"]);
    assert!(orc.status.success());
    let row: serde_json::Value = serde_json::from_slice(&orc.stdout).unwrap();
    assert_eq!(row["formula"], serde_json::json!({"num": "2", "den": "3"}));
    assert_eq!(row["stable"], true);
    assert_eq!(row["matches"], true);
}

#[test]
fn text_reports() {
    let out = hmvol(&["oracle", "U", "3", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("2/3"), "{text}");
    let out = hmvol(&["catalog", "T", "--m", "0..1"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().filter(|l| l.starts_with("T ")).count(), 2);
}
