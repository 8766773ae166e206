//! Handover rates per km against small-cell density.

use hetnet_cpup::config::units::per_km2;
use hetnet_cpup::mobility::handover_rates;
use hetnet_cpup::NetworkConfig;

fn main() -> hetnet_cpup::Result<()> {
    println!(
        "{:>6} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}",
        "λ2", "HO11", "HO12", "HO21", "HO22", "MHO", "VHO"
    );
    for l2 in (0..=200).step_by(20) {
        let cfg = NetworkConfig {
            lambda2: per_km2(l2 as f64),
            ..NetworkConfig::default()
        };
        let r = handover_rates(&cfg)?;
        let km = |x: f64| x * 1e3;
        println!(
            "{l2:>6} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>9.4}",
            km(r.conv[0][0]),
            km(r.conv[0][1]),
            km(r.conv[1][0]),
            km(r.conv[1][1]),
            km(r.inter_anchor),
            km(r.intra_anchor)
        );
    }
    Ok(())
}
