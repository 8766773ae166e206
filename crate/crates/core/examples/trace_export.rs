//! Walk one trajectory and print it as CSV.

use hetnet_cpup::montecarlo::{realize_network, walk_trajectory, write_trace_csv, SimulationSpec};
use hetnet_cpup::NetworkConfig;

fn main() {
    let cfg = NetworkConfig::default();
    let spec = SimulationSpec {
        points_per_segment: 10,
        ..SimulationSpec::default()
    };
    let net = realize_network(&cfg, &spec, 0);
    eprintln!(
        "{} macro and {} small BSs",
        net.macros.len(),
        net.smalls.len()
    );
    match walk_trajectory(&net, &cfg, &spec, 0) {
        Ok(trace) => write_trace_csv(std::io::stdout().lock(), &trace).expect("stdout"),
        Err(d) => eprintln!("realization discarded: {d:?}"),
    }
}
