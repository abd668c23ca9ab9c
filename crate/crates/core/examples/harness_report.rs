//! Run a few registered checks and print their JSON reports.

use redint::harness::{run_check, ExperimentConfig};

fn main() -> redint::Result<()> {
    let cfg = ExperimentConfig { n: 3, seed: 42, samples: 20, ..Default::default() };
    for name in ["dpsi-rank", "reduced-const-span", "moment-equation"] {
        let report = run_check(name, &cfg)?;
        println!("{}", serde_json::to_string_pretty(&report).expect("plain data"));
    }
    Ok(())
}
