//! Handover cost of both architectures and how much of the anchoring gain
//! bound a deployment actually realizes.

use hetnet_cpup::config::units::{kmh, per_km2};
use hetnet_cpup::mobility::{asymptotic_gain, conventional_cost, realized_gain, split_cost};
use hetnet_cpup::ModelConfig;

fn main() -> hetnet_cpup::Result<()> {
    let mut cfg = ModelConfig::default();
    cfg.network.lambda2 = per_km2(150.0);
    for v in [0.0, 50.0, 108.0, 360.0] {
        cfg.mobility.velocity = kmh(v);
        println!(
            "{v:>5} km/h: D_conv = {:.4}  D_split = {:.4}",
            conventional_cost(&cfg)?.value,
            split_cost(&cfg)?.value
        );
    }
    cfg.mobility.d_intra_anchor = cfg.mobility.d_conv / 5.0;
    println!("bound 1 - d_v/d = {:.3}", asymptotic_gain(&cfg));
    for l2 in [10.0, 100.0, 1e3, 1e4, 2e4] {
        cfg.network.lambda2 = per_km2(l2);
        println!("  λ2 = {l2:>7}/km²: realized {:.4}", realized_gain(&cfg)?);
    }
    Ok(())
}
