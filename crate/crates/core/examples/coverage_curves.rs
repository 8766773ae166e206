//! Coverage CCDF of every link type, closed form next to direct integration.

use hetnet_cpup::config::units::{from_db, per_km2};
use hetnet_cpup::coverage::{coverage, coverage_integral, LinkType};
use hetnet_cpup::NetworkConfig;

fn main() -> hetnet_cpup::Result<()> {
    let cfg = NetworkConfig {
        lambda2: per_km2(50.0),
        ..NetworkConfig::default()
    };
    println!(
        "{:<12} {:>7} {:>10} {:>10}",
        "link", "θ (dB)", "closed", "integral"
    );
    for link in LinkType::ALL {
        for db in [-10.0, 0.0, 10.0, 20.0] {
            let t = from_db(db);
            println!(
                "{:<12} {:>7} {:>10.6} {:>10.6}",
                link.name(),
                db,
                coverage(link, t, &cfg)?,
                coverage_integral(link, t, &cfg)?
            );
        }
    }
    Ok(())
}
