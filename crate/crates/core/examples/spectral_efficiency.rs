//! Spectral efficiency E[ln(1+SINR)] of every link as the small tier densifies.

use hetnet_cpup::config::units::per_km2;
use hetnet_cpup::coverage::{spectral_efficiency, LinkType};
use hetnet_cpup::NetworkConfig;

fn main() -> hetnet_cpup::Result<()> {
    print!("{:>8}", "λ2/km²");
    for l in LinkType::ALL {
        print!(" {:>11}", l.name());
    }
    println!();
    for l2 in [1.0, 10.0, 50.0, 150.0] {
        let cfg = NetworkConfig {
            lambda2: per_km2(l2),
            ..NetworkConfig::default()
        };
        print!("{l2:>8}");
        for l in LinkType::ALL {
            print!(" {:>11.4}", spectral_efficiency(l, &cfg)?);
        }
        println!();
    }
    Ok(())
}
