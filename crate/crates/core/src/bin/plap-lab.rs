use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use plap::lab::{self, table, ExperimentConfig, NormSpec, Report};
use plap::mesh::{Mesh, Rect};

#[derive(Parser)]
#[command(name = "plap-lab", about = "Run gradient-estimate experiments and write JSON/CSV reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for reports.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the base seed of the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Exit with a nonzero status if any assertion fails.
    #[arg(long)]
    assert: bool,
}

#[derive(Subcommand)]
enum Command {
    BasicEstimate(Common),
    Decay(Common),
    Oscillation(Common),
    Potential(Common),
    Example55(Common),
    Reduction(Common),
    /// Norms and seminorms of an element field read from an `elem,row,col,value` table.
    NormTable {
        #[arg(long)]
        field: PathBuf,
        /// Cells per side of the mesh the field lives on.
        #[arg(long)]
        mesh: usize,
        /// `x0,x1,y0,y1`, the unit square by default.
        #[arg(long, value_delimiter = ',', num_args = 4)]
        bounds: Option<Vec<f64>>,
        /// Repeatable, e.g. `lorentz:2,1` or `campanato:1:power:0.5`.
        #[arg(long)]
        norm: Vec<String>,
        /// Writes `norm_table.csv` here instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run_experiment(common: &Common, exp: fn(&ExperimentConfig) -> plap::Result<Report>) -> plap::Result<bool> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    cfg.assert |= common.assert;
    cfg.validate()?;
    let start = Instant::now();
    let report = exp(&cfg)?;
    report.save(&common.out)?;
    for a in &report.assertions {
        println!("[{}] {} ({}): {}", if a.pass { "pass" } else { "FAIL" }, a.name, a.tolerance, a.value);
    }
    println!(
        "{}: {} cases in {:.1} s, reports in {}",
        report.experiment,
        report.cases.len(),
        start.elapsed().as_secs_f64(),
        common.out.display()
    );
    Ok(!cfg.assert || report.passed())
}

fn run(cli: Cli) -> plap::Result<bool> {
    match cli.command {
        Command::BasicEstimate(c) => run_experiment(&c, lab::exp_basic_estimate),
        Command::Decay(c) => run_experiment(&c, lab::exp_decay),
        Command::Oscillation(c) => run_experiment(&c, lab::exp_oscillation_estimate),
        Command::Potential(c) => run_experiment(&c, lab::exp_potential),
        Command::Example55(c) => run_experiment(&c, lab::exp_example_5_5),
        Command::Reduction(c) => run_experiment(&c, lab::exp_reduction),
        Command::NormTable { field, mesh, bounds, norm, out } => {
            let rect = match bounds.as_deref() {
                Some(&[x0, x1, y0, y1]) => Rect::new(x0, x1, y0, y1)?,
                _ => Rect::unit(),
            };
            let mesh = Mesh::new(rect, mesh)?;
            let f = plap::io::read_elem_field(&mesh, std::fs::File::open(&field)?)?;
            let specs: Vec<NormSpec> = if norm.is_empty() {
                table::default_specs()
            } else {
                norm.iter().map(|s| s.parse()).collect::<plap::Result<_>>()?
            };
            let rows = lab::norm_table(&mesh, &f, &specs)?;
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)?;
                    table::write_table(&rows, std::fs::File::create(dir.join("norm_table.csv"))?)?;
                }
                None => table::write_table(&rows, std::io::stdout().lock())?,
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
