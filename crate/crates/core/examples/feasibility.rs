//! Control-plane feasibility of the split and the density where it breaks.

use hetnet_cpup::config::units::{per_km2, to_per_km2};
use hetnet_cpup::throughput::{breaking_density, feasibility};
use hetnet_cpup::ModelConfig;

fn main() -> hetnet_cpup::Result<()> {
    let mut cfg = ModelConfig::default();
    for l2 in [0.5, 1.0, 2.0, 5.0] {
        cfg.network.lambda2 = per_km2(l2);
        let f = feasibility(&cfg)?;
        println!(
            "λ2 = {l2:>4}/km²: lhs {:.3} rhs {:.3} feasible {}",
            f.lhs, f.rhs, f.feasible
        );
    }
    for gamma in [1.0, 3.0, 5.0, 10.0] {
        cfg.split.gamma = gamma;
        match breaking_density(&cfg, per_km2(0.01), per_km2(1e4), 0.01)? {
            Some(l) => println!("γ = {gamma:>4}: breaks at λ2 ≈ {:.3}/km²", to_per_km2(l)),
            None => println!("γ = {gamma:>4}: no breaking point in range"),
        }
    }
    Ok(())
}
