//! Generate the local benchmark fixtures: the planted-motif oracle dataset
//! plus shape-exact stand-ins for two benchmark rows (useful when the real
//! benchmark files are not on disk).
//!
//! Usage: cargo run --release -p synthcog --example make_fixtures [DIR]
//!
//! Each dataset lands in DIR/<name>/ as train.csv, test.csv, manifest.toml.

use std::path::Path;

use synthcog::datasets::{
    benchmark_standin, make_standin, make_synthetic, write_dataset_dir, SyntheticSpec, SYNTH_POS,
};

fn dir_name(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect()
}

fn main() -> synthcog::Result<()> {
    let base = std::env::args().nth(1).unwrap_or_else(|| "fixtures".into());
    let base = Path::new(&base);

    let spec = SyntheticSpec::default_planted();
    let (train, test) = make_synthetic(&spec)?;
    let manifest = write_dataset_dir(
        &base.join(dir_name(&spec.name)),
        &train,
        &test,
        Some(SYNTH_POS),
        None,
    )?;
    println!("{}", manifest.display());

    for name in ["Promoter B_amyloliquefaciens", "DNase_I Hypersensitive"] {
        let (train, test) = make_standin(&benchmark_standin(name)?)?;
        let manifest = write_dataset_dir(
            &base.join(dir_name(name)),
            &train,
            &test,
            Some(SYNTH_POS),
            None,
        )?;
        println!("{}", manifest.display());
    }
    Ok(())
}
