//! The hypergeometric interference factor, the ρ helper and the handover
//! geometry factor, checked against closed forms.

use hetnet_cpup::specialfns::{
    geometry_factor, hyp_geom_factor, integrate_semi_infinite, rho, QuadratureSpec,
};

fn main() -> hetnet_cpup::Result<()> {
    for z in [0.1f64, 1.0, 10.0, 1e4] {
        // for α = 4 the factor is atan(√z)/√z
        let exact = z.sqrt().atan() / z.sqrt();
        println!(
            "H(4, {z:>7}) = {:.12}  (closed {exact:.12})",
            hyp_geom_factor(4.0, z)?
        );
    }
    println!("ρ(1, 1) = {:.12}", rho(1.0, 1.0));
    println!("F(1) = {:.12}", geometry_factor(1.0)?);
    let gauss = integrate_semi_infinite(|x| (-x * x).exp(), &QuadratureSpec::default())?;
    println!(
        "∫₀^∞ e^(-x²) dx = {:.12} ± {:.1e}",
        gauss.value, gauss.error
    );
    Ok(())
}
