//! Simulated coverage against the analysis on a reduced run.

use hetnet_cpup::config::units::per_km2;
use hetnet_cpup::coverage::{coverage_curve, LinkType};
use hetnet_cpup::montecarlo::{simulate, SimulationSpec};
use hetnet_cpup::NetworkConfig;

fn main() -> hetnet_cpup::Result<()> {
    let cfg = NetworkConfig {
        lambda2: per_km2(50.0),
        ..NetworkConfig::default()
    };
    let spec = SimulationSpec {
        realizations: 100,
        rng_seed: 7,
        ..SimulationSpec::default()
    };
    let run = simulate(&cfg, &spec)?;
    let grid: Vec<f64> = (-10..=20).step_by(5).map(f64::from).collect();
    println!("{} realizations accepted", run.accepted);
    for link in LinkType::ALL {
        let sim = run.ccdf(link, &grid);
        let ana = coverage_curve(link, &grid, &cfg)?;
        println!(
            "{:<12} n={:<7} max gap {:.4}",
            link.name(),
            sim.sample_count,
            sim.max_deviation(&ana.probabilities)
        );
    }
    Ok(())
}
