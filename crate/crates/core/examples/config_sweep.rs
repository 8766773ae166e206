//! Load a TOML config and print a velocity sweep as CSV.

use hetnet_cpup::cli::{parse_config, sweep_table, Metadata, Output, SweepParam, SweepSpec, Units};

const CONFIG: &str = r#"
units = "paper"

[network]
lambda2 = 150.0

[split]
gamma = 1.0
"#;

fn main() -> hetnet_cpup::Result<()> {
    let setup = parse_config(CONFIG)?;
    let spec = SweepSpec {
        parameter: SweepParam::Velocity,
        grid: vec![0.0, 50.0, 108.0, 360.0],
        outputs: vec![Output::Throughput, Output::Handover],
    };
    let table = sweep_table(&setup.model, &spec, Units::Paper, true)?;
    print!(
        "{}",
        table.to_csv(&Metadata::for_config(&setup.model, Units::Paper))
    );
    Ok(())
}
