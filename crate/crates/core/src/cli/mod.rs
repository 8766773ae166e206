//! Batch front end: config files, analytic tables, sweeps, feasibility
//! searches and Monte Carlo validation.
//!
//! Exit codes: 0 ok, 1 usage, 2 model or config error, 3 validation failure.

mod file;
mod run;
mod table;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use file::{load_config, parse_config, Setup, Units};
pub use run::{
    analyze_tables, coverage_table, feasibility_table, find_crossovers, parse_grid, se_table,
    sweep_table, Output, SweepParam, SweepSpec,
};
pub use table::{Cell, Metadata, Table};

use crate::coverage::LinkType;
use crate::error::{Error, Result};
use crate::montecarlo::{run_validation, ValidationStatus};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_MODEL: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "hetnet",
    version,
    about = "Two-tier cellular network analysis with and without a control/data-plane split"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML configuration file; defaults are used when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    /// Simulation seed (overrides the config file).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Simulation realizations (overrides the config file).
    #[arg(long, global = true)]
    pub realizations: Option<usize>,

    /// Grid as start:step:stop or a comma list: SINR thresholds in dB for
    /// analyze/validate, parameter values for sweep, gamma values for
    /// feasibility.
    #[arg(long, global = true)]
    pub grid: Option<String>,

    /// Units of the grid and of output tables.
    #[arg(long, global = true, value_enum, default_value_t = Units::Paper)]
    pub units: Units,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic tables at the configured operating point.
    Analyze {
        #[arg(
            long,
            value_enum,
            value_delimiter = ',',
            default_value = "coverage,se,throughput,handover,feasibility"
        )]
        outputs: Vec<Output>,
    },
    /// Monte Carlo simulation compared against the analysis.
    Validate,
    /// Vary one parameter over the grid.
    Sweep {
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "throughput")]
        outputs: Vec<Output>,
        /// Annotate sign changes of the split-minus-conventional user throughput.
        #[arg(long)]
        crossover: bool,
    },
    /// Breaking small-cell density of the split per control-reduction factor.
    Feasibility,
}

const DEFAULT_DB_GRID: &str = "-10:1:20";

fn write_table(dir: &Path, stem: &str, table: &Table, meta: &Metadata) -> Result<PathBuf> {
    let path = dir.join(format!("{stem}.csv"));
    std::fs::write(&path, table.to_csv(meta))?;
    Ok(path)
}

/// Outcome of a successful command.
#[derive(Debug)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub validation: Option<ValidationStatus>,
    /// Text for stdout.
    pub summary: String,
}

/// Run a parsed command.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let setup = match &cli.config {
        Some(p) => load_config(p)?,
        None => Setup::default(),
    };
    let model = setup.model;
    std::fs::create_dir_all(&cli.out)?;
    let units = cli.units;
    let mut written = Vec::new();
    let mut summary = String::new();
    let mut validation = None;
    match &cli.command {
        Command::Analyze { outputs } => {
            let grid = parse_grid(cli.grid.as_deref().unwrap_or(DEFAULT_DB_GRID))?;
            let meta = Metadata::for_config(&model, units);
            for (stem, t) in analyze_tables(&model, outputs, &grid, units)? {
                written.push(write_table(&cli.out, &stem, &t, &meta)?);
            }
        }
        Command::Sweep {
            param,
            outputs,
            crossover,
        } => {
            let grid = parse_grid(
                cli.grid
                    .as_deref()
                    .ok_or_else(|| Error::Domain("sweep needs --grid".into()))?,
            )?;
            let spec = SweepSpec {
                parameter: *param,
                grid,
                outputs: outputs.clone(),
            };
            let t = sweep_table(&model, &spec, units, *crossover)?;
            let meta = Metadata::for_config(&model, units).with("sweep", param.name());
            written.push(write_table(
                &cli.out,
                &format!("sweep_{}", param.name()),
                &t,
                &meta,
            )?);
            for (k, v) in &t.notes {
                summary.push_str(&format!("{k}: {v}\n"));
            }
        }
        Command::Feasibility => {
            let gammas = parse_grid(cli.grid.as_deref().unwrap_or("1,3,5"))?;
            let t = feasibility_table(&model, &gammas, units)?;
            let meta = Metadata::for_config(&model, units);
            written.push(write_table(&cli.out, "feasibility_gamma", &t, &meta)?);
        }
        Command::Validate => {
            let mut spec = setup.validation.clone();
            if let Some(s) = cli.seed {
                spec.simulation.rng_seed = s;
                if let Some(t) = spec.transect.as_mut() {
                    t.rng_seed = s;
                }
            }
            if let Some(r) = cli.realizations {
                spec.simulation.realizations = r;
            }
            if let Some(g) = &cli.grid {
                spec.grid_db = parse_grid(g)?;
            }
            let report = run_validation(&model.network, &spec)?;
            let meta = Metadata::for_config(&(&model, &spec), units)
                .with(
                    "lambda2_per_km2",
                    crate::config::units::to_per_km2(model.network.lambda2),
                )
                .with("seed", spec.simulation.rng_seed)
                .with("realizations", spec.simulation.realizations);
            let json = cli.out.join("validation.json");
            std::fs::write(&json, report.to_json())?;
            let text = cli.out.join("validation.txt");
            std::fs::write(&text, report.to_text())?;
            written.extend([json, text]);
            let mut cols = vec!["theta_db".to_string()];
            for l in LinkType::ALL {
                cols.push(format!("{}_analytic", l.name()));
                cols.push(format!("{}_simulated", l.name()));
            }
            let mut t = Table::new(cols);
            for (k, th) in spec.grid_db.iter().enumerate() {
                let mut row = vec![Cell::Num(*th)];
                for c in &report.coverage {
                    row.push(Cell::Num(c.analytic[k]));
                    row.push(if c.samples == 0 {
                        Cell::Marker("na")
                    } else {
                        Cell::Num(c.empirical[k])
                    });
                }
                t.push(row);
            }
            for c in &report.coverage {
                t.notes
                    .push((format!("samples_{}", c.link), c.samples.to_string()));
            }
            written.push(write_table(&cli.out, "validation_ccdf", &t, &meta)?);
            summary.push_str(&report.to_text());
            validation = Some(report.status);
        }
    }
    Ok(Outcome {
        written,
        validation,
        summary,
    })
}

/// Parse arguments, run, print, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if matches!(cli.command, Command::Sweep { .. }) && cli.grid.is_none() {
        eprintln!("error: sweep needs --grid (start:step:stop or a comma list)");
        return EXIT_USAGE;
    }
    match execute(&cli) {
        Ok(o) => {
            print!("{}", o.summary);
            for p in &o.written {
                println!("wrote {}", p.display());
            }
            match o.validation {
                Some(ValidationStatus::Fail) => EXIT_VALIDATION,
                _ => EXIT_OK,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_MODEL
        }
    }
}
