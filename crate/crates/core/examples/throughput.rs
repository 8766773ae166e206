//! Mobility-aware user throughput of both architectures across speeds.

use hetnet_cpup::config::units::{kmh, per_km2};
use hetnet_cpup::throughput::evaluate;
use hetnet_cpup::ModelConfig;

fn main() -> hetnet_cpup::Result<()> {
    for l2 in [10.0, 150.0] {
        let mut cfg = ModelConfig::default();
        cfg.network.lambda2 = per_km2(l2);
        cfg.split.gamma = 1.0;
        println!("λ2 = {l2}/km²");
        for v in [0.0, 50.0, 108.0, 360.0] {
            cfg.mobility.velocity = kmh(v);
            let e = evaluate(&cfg)?;
            let show = |u: &hetnet_cpup::throughput::UserThroughput| {
                if u.saturated {
                    "saturated".to_string()
                } else {
                    format!("{:.3} Mnats/s", u.value / 1e6)
                }
            };
            println!(
                "  {v:>5} km/h  conventional {:>16}  split {:>16}",
                show(&e.user_conventional),
                show(&e.user_split)
            );
        }
    }
    Ok(())
}
