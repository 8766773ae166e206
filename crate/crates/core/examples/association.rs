//! Association probabilities, load estimates and serving-distance densities.

use hetnet_cpup::association::{
    association_probabilities, distance_pdf, loads, AssociationSet, DistanceLink,
};
use hetnet_cpup::config::units::per_km2;
use hetnet_cpup::NetworkConfig;

fn main() -> hetnet_cpup::Result<()> {
    for bias in [1.0, 10.0, 30.0] {
        let cfg = NetworkConfig {
            lambda2: per_km2(50.0),
            bias,
            ..NetworkConfig::default()
        };
        let a = association_probabilities(&cfg)?;
        let n = loads(&cfg)?;
        println!("bias {bias}:");
        for s in AssociationSet::ALL {
            println!(
                "  {:<5} A = {:.4}  N = {:.3}",
                s.label(),
                a.get(s),
                n.get(s)
            );
        }
    }
    let cfg = NetworkConfig::default();
    println!("median serving distance at defaults:");
    for link in DistanceLink::ALL {
        let pdf = distance_pdf(link, &cfg)?;
        // bisection on the CDF
        let (mut lo, mut hi) = (0.0, 20.0 * pdf.scale());
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if pdf.cdf(mid)? < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        println!("  {link:?}: {:.1} m", 0.5 * (lo + hi));
    }
    Ok(())
}
