//! Numeric kernel: hypergeometric factor, ρ helper, handover geometry factor
//! and the adaptive integrators everything else is built on.

mod quadrature;

use std::f64::consts::PI;

pub use quadrature::{
    integrate, integrate_semi_infinite, integrate_semi_infinite_scaled, integrate_with_panels,
    Estimate, QuadratureSpec,
};

use crate::error::{Error, Result};

fn kernel_spec() -> QuadratureSpec {
    QuadratureSpec {
        rel_tol: 1e-13,
        abs_tol: 1e-300,
        max_subdivisions: 4000,
    }
}

/// ₂F₁(1, 1−2/α; 2−2/α; −z) for α > 2 and z ≥ 0.
///
/// Evaluated as ∫₀¹ du / (1 + z·u^p) with p = α/(α−2). For z > 1 the range
/// is split at the knee u₀ = z^{−1/p} and the tail is integrated in ln u,
/// so arbitrarily large arguments cost the same as small ones.
pub fn hyp_geom_factor(alpha: f64, z: f64) -> Result<f64> {
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must exceed 2 (got {alpha})")));
    }
    if !(z >= 0.0) {
        return Err(Error::Domain(format!(
            "argument must be non-negative (got {z})"
        )));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z.is_infinite() {
        return Ok(0.0);
    }
    let p = alpha / (alpha - 2.0);
    let spec = kernel_spec();
    if z <= 1.0 {
        return Ok(integrate(|u: f64| 1.0 / (1.0 + z * u.powf(p)), 0.0, 1.0, &spec)?.value);
    }
    let ln_u0 = -z.ln() / p;
    let u0 = ln_u0.exp();
    let head = integrate(|u: f64| 1.0 / (1.0 + z * u.powf(p)), 0.0, u0, &spec)?.value;
    let tail = integrate_with_panels(
        |s: f64| s.exp() / (1.0 + z * (p * s).exp()),
        ln_u0,
        0.0,
        (-ln_u0).ceil().clamp(1.0, 64.0) as usize,
        &spec,
    )?
    .value;
    Ok(head + tail)
}

/// ρ(a, b) = a + √b·arctan(√b).
pub fn rho(a: f64, b: f64) -> f64 {
    let s = b.sqrt();
    a + s * s.atan()
}

/// Handover geometry factor ℱ(x) = x⁻² ∫₀^π √(x² + 1 − 2x cos θ) dθ.
pub fn geometry_factor(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ratio must be positive (got {x})")));
    }
    let spec = QuadratureSpec::default().with_rel_tol(1e-12);
    let integral = integrate(
        |th: f64| (x * x + 1.0 - 2.0 * x * th.cos()).max(0.0).sqrt(),
        0.0,
        PI,
        &spec,
    )?;
    Ok(integral.value / (x * x))
}
