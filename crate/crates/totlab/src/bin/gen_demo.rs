//! Regenerates the shipped demo assets under `crates/totlab/data/`:
//! the default reference pattern, its intact single-pattern matrix, and the
//! symmetry-breaking two-pattern configuration whose dead-input ensemble
//! contains a rare TOT class, together with that ensemble's golden report.
//!
//! Usage: `cargo run --release --bin gen-demo [out_dir]`

use std::fs;
use std::path::PathBuf;

use totlab::curvelab::demo::{demo_reference, search_demo_config, DemoSearch};
use totlab::netcore::{SynapticMatrix, TieRule};

fn main() {
    let out_dir: PathBuf = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "crates/totlab/data".into())
        .into();
    fs::create_dir_all(&out_dir).expect("create output directory");

    let reference = demo_reference();
    let matrix = SynapticMatrix::train_hebbian(&reference, false);
    fs::write(
        out_dir.join("demo_reference.json"),
        serde_json::to_string_pretty(&reference).unwrap(),
    )
    .unwrap();
    fs::write(
        out_dir.join("demo_matrix.json"),
        serde_json::to_string_pretty(&matrix).unwrap(),
    )
    .unwrap();

    let search = DemoSearch::default();
    let found = search_demo_config(&reference, &search, TieRule::RetainInput)
        .expect("search ran")
        .expect("a symmetry-breaking configuration exists in the candidate set");
    let (config, report) = found;
    eprintln!(
        "second pattern: {:?}",
        config.second_pattern.components()
    );
    eprintln!(
        "classes: {}, tot_probability: {}, tot_strength: {:.4}",
        report.classes.len(),
        report.tot_probability,
        report.tot_strength
    );
    fs::write(
        out_dir.join("demo_tot.json"),
        serde_json::to_string_pretty(&config).unwrap(),
    )
    .unwrap();
    fs::write(
        out_dir.join("demo_tot_matrix.json"),
        serde_json::to_string_pretty(&config.matrix).unwrap(),
    )
    .unwrap();
    fs::write(
        out_dir.join("demo_tot_report.json"),
        serde_json::to_string_pretty(&report).unwrap(),
    )
    .unwrap();
    println!("demo assets written to {}", out_dir.display());
}
