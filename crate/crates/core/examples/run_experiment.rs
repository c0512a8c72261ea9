//! Runs the decay experiment on a small configuration and prints its assertions.

use plap::lab::{self, ExperimentConfig};

pub fn main() -> plap::Result<()> {
    let cfg = ExperimentConfig::parse("p = 2\nM = 32\nseeds = 1\nr_min = 0.0625\nr_max = 0.25\n")?;
    let report = lab::exp_decay(&cfg)?;
    for a in &report.assertions {
        println!("{}: {} ({})", a.name, a.value, if a.pass { "pass" } else { "fail" });
    }
    Ok(())
}
