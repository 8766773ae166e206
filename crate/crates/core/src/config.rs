//! Model parameters.
//!
//! Everything in this module is stored in SI units: metres, seconds, watts,
//! hertz, and densities in BS/m². The file loader in [`crate::cli`] accepts
//! BS/km², km/h and MHz and converts once, through the helpers in [`units`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violations};

/// Unit conversion at the external boundary.
pub mod units {
    /// BS/km² to BS/m².
    pub fn per_km2(x: f64) -> f64 {
        x * 1e-6
    }

    /// BS/m² to BS/km².
    pub fn to_per_km2(x: f64) -> f64 {
        x * 1e6
    }

    pub fn kmh(x: f64) -> f64 {
        x / 3.6
    }

    pub fn to_kmh(x: f64) -> f64 {
        x * 3.6
    }

    pub fn mhz(x: f64) -> f64 {
        x * 1e6
    }

    pub fn to_mhz(x: f64) -> f64 {
        x * 1e-6
    }

    pub fn km(x: f64) -> f64 {
        x * 1e3
    }

    pub fn to_km(x: f64) -> f64 {
        x * 1e-3
    }

    /// Decibels to a linear ratio.
    pub fn from_db(db: f64) -> f64 {
        10f64.powf(db / 10.0)
    }

    pub fn to_db(x: f64) -> f64 {
        10.0 * x.log10()
    }
}

/// Two-tier deployment: tier 1 is the macro tier, tier 2 the small-cell tier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    /// Macro BS density (BS/m²).
    pub lambda1: f64,
    /// Small BS density (BS/m²).
    pub lambda2: f64,
    /// User density (users/m²).
    pub lambda_u: f64,
    /// Macro transmit power (W).
    pub p1: f64,
    /// Small-cell transmit power (W).
    pub p2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Linear association bias applied to the small-cell tier.
    pub bias: f64,
    /// Noise power (W). Only the simulator uses it.
    pub noise: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            lambda1: units::per_km2(2.0),
            lambda2: units::per_km2(50.0),
            lambda_u: units::per_km2(50.0),
            p1: 50.0,
            p2: 5.0,
            alpha1: 4.0,
            alpha2: 4.0,
            bias: 30.0,
            noise: 0.0,
        }
    }
}

impl NetworkConfig {
    pub fn validate_into(&self, v: &mut Violations) {
        for (name, x) in [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("lambda_u", self.lambda_u),
        ] {
            if !x.is_finite() || x < 0.0 {
                v.push(
                    name,
                    format!("{name} must be a finite non-negative density"),
                );
            } else if x == 0.0 && name != "lambda_u" {
                v.push(name, format!("{name} must be positive"));
            }
        }
        for (name, x) in [("p1", self.p1), ("p2", self.p2)] {
            if !(x.is_finite() && x > 0.0) {
                v.push(name, format!("{name} must be positive"));
            }
        }
        for (name, x) in [("alpha1", self.alpha1), ("alpha2", self.alpha2)] {
            if !(x.is_finite() && x > 2.0) {
                v.push(name, format!("{name} must exceed 2"));
            }
        }
        if !(self.bias.is_finite() && self.bias >= 1.0) {
            v.push("bias", "bias must be at least 1");
        }
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            v.push("noise", "noise must be non-negative");
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut v = Violations::default();
        self.validate_into(&mut v);
        finish(v)
    }

    /// Power ratios used throughout the association and coverage formulas.
    pub fn derived_ratios(&self) -> DerivedRatios {
        let p12 = self.p1 / self.p2;
        let p12_tilde = self.p1 / (self.bias * self.p2);
        DerivedRatios {
            p12,
            p21: self.p2 / self.p1,
            p12_tilde,
            p21_tilde: self.bias * self.p2 / self.p1,
        }
    }

    /// True when both tiers use the path-loss exponent 4, which unlocks the
    /// closed forms.
    pub fn is_alpha4(&self) -> bool {
        self.alpha1 == 4.0 && self.alpha2 == 4.0
    }
}

/// Spectrum and overhead parameters of the two architectures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    /// Total bandwidth W (Hz).
    pub w_total: f64,
    /// Macro-tier bandwidth under the split (Hz); the small tier gets the rest.
    pub w1: f64,
    /// Fraction of capacity consumed by control signalling.
    pub mu_c: f64,
    /// Control reduction factor for phantom-cell users.
    pub gamma: f64,
    /// Almost-blank-subframe time fraction reserved for biased users.
    pub eta: f64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            w_total: units::mhz(10.0),
            w1: units::mhz(2.0),
            mu_c: 0.3,
            gamma: 3.0,
            eta: 0.3,
        }
    }
}

impl SplitConfig {
    /// Small-tier bandwidth, always derived from the other two.
    pub fn w2(&self) -> f64 {
        self.w_total - self.w1
    }

    pub fn validate_into(&self, v: &mut Violations) {
        if !(self.w_total.is_finite() && self.w_total > 0.0) {
            v.push("w_total", "w_total must be positive");
        }
        if !(self.w1.is_finite() && self.w1 > 0.0) {
            v.push("w1", "w1 must be positive");
        } else if self.w1 >= self.w_total {
            v.push("w1", "w1 must be strictly less than w_total");
        }
        if !(self.mu_c >= 0.0 && self.mu_c <= 1.0) {
            v.push("mu_c", "mu_c must lie in [0, 1]");
        }
        if !(self.gamma.is_finite() && self.gamma >= 1.0) {
            v.push("gamma", "gamma must be at least 1");
        }
        if !(self.eta >= 0.0 && self.eta < 1.0) {
            v.push("eta", "eta must lie in [0, 1)");
        }
    }
}

/// User speed, handover delays and X2 availability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobilityConfig {
    /// Speed (m/s).
    pub velocity: f64,
    /// Conventional handover delay without X2 (s).
    pub d_conv: f64,
    /// Conventional handover delay over X2 (s).
    pub d_conv_x2: f64,
    /// Inter-anchor handover delay without X2 (s).
    pub d_inter_anchor: f64,
    /// Inter-anchor handover delay over X2 (s).
    pub d_inter_anchor_x2: f64,
    /// Intra-anchor handover delay (s).
    pub d_intra_anchor: f64,
    /// Probability that a conventional handover can use X2.
    pub prob_x2_conv: f64,
    /// Probability that an inter-anchor handover can use X2.
    pub prob_x2_split: f64,
}

impl Default for MobilityConfig {
    fn default() -> Self {
        Self::with_conventional_delay(0.7)
    }
}

impl MobilityConfig {
    /// Delays derived from `d_conv`: X2 and intra-anchor handovers take half
    /// as long, inter-anchor handovers reuse the conventional delays.
    pub fn with_conventional_delay(d_conv: f64) -> Self {
        let half = 0.5 * d_conv;
        Self {
            velocity: 0.0,
            d_conv,
            d_conv_x2: half,
            d_inter_anchor: d_conv,
            d_inter_anchor_x2: half,
            d_intra_anchor: half,
            prob_x2_conv: 0.0,
            prob_x2_split: 0.0,
        }
    }

    pub fn validate_into(&self, v: &mut Violations) {
        if !(self.velocity.is_finite() && self.velocity >= 0.0) {
            v.push("velocity", "velocity must be non-negative");
        }
        for (name, d) in [
            ("d_conv", self.d_conv),
            ("d_conv_x2", self.d_conv_x2),
            ("d_inter_anchor", self.d_inter_anchor),
            ("d_inter_anchor_x2", self.d_inter_anchor_x2),
            ("d_intra_anchor", self.d_intra_anchor),
        ] {
            if !(d.is_finite() && d >= 0.0) {
                v.push(name, format!("{name} must be non-negative"));
            }
        }
        for (name, p) in [
            ("prob_x2_conv", self.prob_x2_conv),
            ("prob_x2_split", self.prob_x2_split),
        ] {
            if !(0.0..=1.0).contains(&p) {
                v.push(name, format!("{name} must lie in [0, 1]"));
            }
        }
    }
}

/// Power ratios P12 = P1/P2, P̃12 = P1/(B P2) and their reciprocals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedRatios {
    pub p12: f64,
    pub p21: f64,
    pub p12_tilde: f64,
    pub p21_tilde: f64,
}

/// The full parameter snapshot consumed by the analytic modules.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub network: NetworkConfig,
    pub split: SplitConfig,
    pub mobility: MobilityConfig,
}

impl ModelConfig {
    /// Every violated invariant, or `Ok`. Nothing is clamped.
    pub fn validate(&self) -> Result<()> {
        let mut v = Violations::default();
        self.network.validate_into(&mut v);
        self.split.validate_into(&mut v);
        self.mobility.validate_into(&mut v);
        finish(v)
    }

    pub fn derived_ratios(&self) -> DerivedRatios {
        self.network.derived_ratios()
    }
}

fn finish(v: Violations) -> Result<()> {
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(v))
    }
}
