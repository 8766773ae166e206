//! Handover rates per unit length, handover costs and the anchoring gain bound.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::config::{ModelConfig, NetworkConfig};
use crate::error::{Error, Result};
use crate::specialfns::geometry_factor;

/// Which network architecture a figure refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Architecture {
    Conventional,
    Split,
}

impl Architecture {
    pub fn name(self) -> &'static str {
        match self {
            Self::Conventional => "conventional",
            Self::Split => "split",
        }
    }
}

/// Mean handovers per metre of trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HandoverRates {
    /// `conv[i][j]`: from tier i+1 to tier j+1 in the conventional network.
    pub conv: [[f64; 2]; 2],
    /// Crossings of the macro-only Voronoi tessellation.
    pub inter_anchor: f64,
    /// Data-plane handovers that stay under one anchor.
    pub intra_anchor: f64,
    /// True when the intra-anchor rate came out negative and was clamped.
    pub intra_clamped: bool,
}

impl HandoverRates {
    /// Total crossing rate of the weighted tessellation.
    pub fn total(&self) -> f64 {
        self.conv.iter().flatten().sum()
    }
}

/// Handover rates.
///
/// Cell boundaries of the biased two-tier network form a multiplicatively
/// weighted Voronoi tessellation with weights w_k = (P_k B_k)^{1/α}. The rate
/// from tier i to tier j is λᵢλⱼℱ(x_ij) / (π (Σ_k λ_k x_ki²)^{3/2}) with
/// x_ij = w_i/w_j, which is symmetric in (i, j) and reduces to the
/// single-tier value 4√λ₁/π when the small tier is empty.
pub fn handover_rates(cfg: &NetworkConfig) -> Result<HandoverRates> {
    // An empty small tier is meaningful here, so probe validity without it.
    let probe = NetworkConfig {
        lambda2: if cfg.lambda2 == 0.0 {
            cfg.lambda1
        } else {
            cfg.lambda2
        },
        ..*cfg
    };
    probe.validate()?;
    if cfg.alpha1 != cfg.alpha2 {
        return Err(Error::UnequalExponents {
            alpha1: cfg.alpha1,
            alpha2: cfg.alpha2,
        });
    }
    let alpha = cfg.alpha1;
    let lam = [cfg.lambda1, cfg.lambda2];
    let w = [
        cfg.p1.powf(1.0 / alpha),
        (cfg.p2 * cfg.bias).powf(1.0 / alpha),
    ];
    let x = |i: usize, j: usize| w[i] / w[j];
    let mut conv = [[0.0; 2]; 2];
    for i in 0..2 {
        let density: f64 = (0..2).map(|k| lam[k] * x(k, i).powi(2)).sum();
        for j in 0..2 {
            if lam[i] == 0.0 || lam[j] == 0.0 {
                continue;
            }
            conv[i][j] = lam[i] * lam[j] * geometry_factor(x(i, j))? / (PI * density.powf(1.5));
        }
    }
    let inter_anchor = 4.0 * cfg.lambda1.sqrt() / PI;
    let total: f64 = conv.iter().flatten().sum();
    let raw = total - inter_anchor;
    // Round-off around zero is not a clamp.
    let intra_clamped = raw < -1e-12 * inter_anchor;
    Ok(HandoverRates {
        conv,
        inter_anchor,
        intra_anchor: raw.max(0.0),
        intra_clamped,
    })
}

/// Fraction of time spent executing handovers. May exceed 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HandoverCost {
    pub value: f64,
    pub architecture: Architecture,
}

pub fn conventional_cost(cfg: &ModelConfig) -> Result<HandoverCost> {
    cfg.validate()?;
    let rates = handover_rates(&cfg.network)?;
    Ok(conventional_cost_from(cfg, &rates))
}

pub fn conventional_cost_from(cfg: &ModelConfig, rates: &HandoverRates) -> HandoverCost {
    let m = &cfg.mobility;
    let delay = (1.0 - m.prob_x2_conv) * m.d_conv + m.prob_x2_conv * m.d_conv_x2;
    HandoverCost {
        value: delay * m.velocity * rates.total(),
        architecture: Architecture::Conventional,
    }
}

pub fn split_cost(cfg: &ModelConfig) -> Result<HandoverCost> {
    cfg.validate()?;
    let rates = handover_rates(&cfg.network)?;
    Ok(split_cost_from(cfg, &rates))
}

pub fn split_cost_from(cfg: &ModelConfig, rates: &HandoverRates) -> HandoverCost {
    let m = &cfg.mobility;
    let anchor_delay =
        (1.0 - m.prob_x2_split) * m.d_inter_anchor + m.prob_x2_split * m.d_inter_anchor_x2;
    HandoverCost {
        value: m.velocity
            * (rates.inter_anchor * anchor_delay + rates.intra_anchor * m.d_intra_anchor),
        architecture: Architecture::Split,
    }
}

/// Upper bound 1 − d_v/d on the relative handover-cost saving of the split,
/// approached as the small tier densifies.
pub fn asymptotic_gain(cfg: &ModelConfig) -> f64 {
    1.0 - cfg.mobility.d_intra_anchor / cfg.mobility.d_conv
}

/// The saving (D_conv − D_split)/D_conv actually achieved by `cfg`.
///
/// Velocity cancels, so a stationary configuration is evaluated at unit speed.
pub fn realized_gain(cfg: &ModelConfig) -> Result<f64> {
    let mut cfg = *cfg;
    if cfg.mobility.velocity == 0.0 {
        cfg.mobility.velocity = 1.0;
    }
    let rates = handover_rates(&cfg.network)?;
    let dc = conventional_cost_from(&cfg, &rates).value;
    let ds = split_cost_from(&cfg, &rates).value;
    if dc == 0.0 {
        return Err(Error::Domain("conventional handover cost is zero".into()));
    }
    Ok((dc - ds) / dc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::units::{kmh, per_km2};
    use crate::config::MobilityConfig;

    fn net(l2: f64) -> NetworkConfig {
        NetworkConfig {
            lambda2: per_km2(l2),
            ..NetworkConfig::default()
        }
    }

    fn model(l2: f64, v_kmh: f64) -> ModelConfig {
        let mut cfg = ModelConfig {
            network: net(l2),
            ..ModelConfig::default()
        };
        cfg.mobility.velocity = kmh(v_kmh);
        cfg
    }

    #[test]
    fn inter_anchor_rate_at_default_macro_density() {
        let r = handover_rates(&net(50.0)).unwrap();
        assert!((r.inter_anchor * 1e3 - 4.0 * 2f64.sqrt() / PI).abs() < 1e-12);
        assert!((r.inter_anchor * 1e3 - 1.8006).abs() < 1e-4);
    }

    #[test]
    fn cross_tier_rates_are_symmetric() {
        for l2 in [1.0, 10.0, 150.0] {
            let r = handover_rates(&net(l2)).unwrap();
            assert!(((r.conv[0][1] - r.conv[1][0]) / r.conv[0][1]).abs() < 1e-10);
        }
    }

    #[test]
    fn empty_small_tier() {
        let r = handover_rates(&net(0.0)).unwrap();
        assert_eq!(r.conv[1][1], 0.0);
        assert_eq!(r.conv[0][1], 0.0);
        assert_eq!(r.conv[1][0], 0.0);
        assert!(((r.conv[0][0] - r.inter_anchor) / r.inter_anchor).abs() < 1e-9);
        assert!(!r.intra_clamped);
    }

    #[test]
    fn intra_plus_inter_is_total() {
        for l2 in [0.5, 5.0, 50.0, 500.0] {
            let r = handover_rates(&net(l2)).unwrap();
            assert!((r.intra_anchor + r.inter_anchor - r.total()).abs() < 1e-12 * r.total());
        }
    }

    #[test]
    fn unequal_exponents_rejected() {
        let cfg = NetworkConfig {
            alpha2: 3.5,
            ..net(10.0)
        };
        assert!(matches!(
            handover_rates(&cfg),
            Err(Error::UnequalExponents { .. })
        ));
    }

    #[test]
    fn costs_vanish_at_rest() {
        let cfg = model(50.0, 0.0);
        assert_eq!(conventional_cost(&cfg).unwrap().value, 0.0);
        assert_eq!(split_cost(&cfg).unwrap().value, 0.0);
    }

    #[test]
    fn full_x2_uses_x2_delay() {
        let mut cfg = model(50.0, 60.0);
        cfg.mobility.prob_x2_conv = 1.0;
        let r = handover_rates(&cfg.network).unwrap();
        let c = conventional_cost(&cfg).unwrap().value;
        let expected = cfg.mobility.d_conv_x2 * cfg.mobility.velocity * r.total();
        assert!((c - expected).abs() < 1e-15);
    }

    #[test]
    fn conventional_collapse_at_360_kmh() {
        let cfg = model(150.0, 360.0);
        let r = handover_rates(&cfg.network).unwrap();
        // spreadsheet arithmetic: 0.7 s × 100 m/s × Σ HO
        let by_hand = 0.7 * 100.0 * (r.conv[0][0] + r.conv[0][1] + r.conv[1][0] + r.conv[1][1]);
        let c = conventional_cost(&cfg).unwrap().value;
        assert!((c - by_hand).abs() < 1e-12);
        assert!(c >= 1.0, "{c}");
    }

    #[test]
    fn split_cost_without_small_cells() {
        let cfg = model(0.0, 90.0);
        let r = handover_rates(&cfg.network).unwrap();
        let m = &cfg.mobility;
        let direct = m.velocity
            * (m.d_intra_anchor * r.conv[0][0] + r.inter_anchor * (m.d_conv - m.d_intra_anchor));
        let s = split_cost_from(&cfg, &r).value;
        assert!((s - direct).abs() < 1e-12);
    }

    #[test]
    fn uniform_delays_collapse() {
        let mut cfg = model(50.0, 90.0);
        cfg.mobility = MobilityConfig {
            velocity: cfg.mobility.velocity,
            d_conv: 0.4,
            d_conv_x2: 0.4,
            d_inter_anchor: 0.4,
            d_inter_anchor_x2: 0.4,
            d_intra_anchor: 0.4,
            prob_x2_conv: 0.3,
            prob_x2_split: 0.6,
        };
        let c = conventional_cost(&cfg).unwrap().value;
        let s = split_cost(&cfg).unwrap().value;
        assert!(((c - s) / c).abs() < 1e-12);
    }

    #[test]
    fn gain_bound() {
        let mut cfg = ModelConfig::default();
        cfg.mobility.d_conv = 1.0;
        cfg.mobility.d_intra_anchor = 0.2;
        assert!((asymptotic_gain(&cfg) - 0.8).abs() < 1e-15);
        cfg.mobility.d_intra_anchor = 1.0;
        assert_eq!(asymptotic_gain(&cfg), 0.0);
    }

    #[test]
    fn small_tier_rates_follow_density() {
        let grid: Vec<f64> = (0..20).map(|k| 1.0 + k as f64 * 10.0).collect();
        let rates: Vec<_> = grid
            .iter()
            .map(|&l| handover_rates(&net(l)).unwrap())
            .collect();
        for w in rates.windows(2) {
            assert!(w[1].total() > w[0].total());
            assert!(w[1].conv[0][0] < w[0].conv[0][0]);
            assert_eq!(w[1].inter_anchor, w[0].inter_anchor);
        }
    }
}
