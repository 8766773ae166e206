//! Tier throughputs, split feasibility and mobility-aware per-user throughput.

use serde::{Deserialize, Serialize};

use crate::association::{
    association_probabilities, loads_from, AssociationProbabilities, LoadEstimates,
};
use crate::config::{ModelConfig, NetworkConfig};
use crate::coverage::{spectral_efficiency, LinkType};
use crate::error::{Error, Result};
use crate::mobility::{
    conventional_cost_from, handover_rates, split_cost_from, Architecture, HandoverCost,
    HandoverRates,
};

/// Spectral efficiency of every link (nats/s/Hz), indexed by [`LinkType`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralEfficiencies(pub [f64; 8]);

impl SpectralEfficiencies {
    pub fn compute(cfg: &NetworkConfig) -> Result<Self> {
        let mut out = [0.0; 8];
        for (slot, link) in out.iter_mut().zip(LinkType::ALL) {
            if link != LinkType::SplitDataB {
                *slot = spectral_efficiency(link, cfg)?;
            }
        }
        // the biased data link is the same link in both architectures
        out[6] = out[2];
        Ok(Self(out))
    }

    pub fn get(&self, link: LinkType) -> f64 {
        self.0[LinkType::ALL.iter().position(|&l| l == link).unwrap()]
    }
}

/// BS throughput per association state (nats/s).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TierThroughputs {
    pub t1: f64,
    pub t2: f64,
    pub t_b: f64,
    pub architecture: Architecture,
    /// Split only: the macro rate was clamped at 0 because control demand
    /// exceeds what the macro band can carry.
    pub t1_clamped: bool,
}

pub fn conventional_tier_throughputs(cfg: &ModelConfig) -> Result<TierThroughputs> {
    cfg.validate()?;
    let se = SpectralEfficiencies::compute(&cfg.network)?;
    Ok(conventional_from(cfg, &se))
}

fn conventional_from(cfg: &ModelConfig, se: &SpectralEfficiencies) -> TierThroughputs {
    let s = &cfg.split;
    let w = (1.0 - s.mu_c) * s.w_total;
    TierThroughputs {
        t1: w * (1.0 - s.eta) * se.get(LinkType::ConvMacro),
        t2: w * (1.0 - s.eta) * se.get(LinkType::ConvSmall),
        t_b: w * s.eta * se.get(LinkType::ConvBiased),
        architecture: Architecture::Conventional,
        t1_clamped: false,
    }
}

pub fn split_tier_throughputs(cfg: &ModelConfig) -> Result<TierThroughputs> {
    cfg.validate()?;
    let se = SpectralEfficiencies::compute(&cfg.network)?;
    Ok(split_from(cfg, &se))
}

fn split_from(cfg: &ModelConfig, se: &SpectralEfficiencies) -> TierThroughputs {
    let s = &cfg.split;
    let t2 = (1.0 - s.eta) * s.w2() * se.get(LinkType::SplitData2);
    let t_b = s.eta * s.w2() * se.get(LinkType::SplitDataB);
    let r1 = s.w1 * se.get(LinkType::SplitMacro);
    let bracket = 1.0 - control_load(cfg, se, t2, t_b);
    TierThroughputs {
        t1: (1.0 - s.mu_c) * r1 * bracket.max(0.0),
        t2,
        t_b,
        architecture: Architecture::Split,
        t1_clamped: bracket < 0.0,
    }
}

// λ₂μ/(λ₁γ)·(T₂/R_c2 + T_B/R_cB): share of macro resources taken by control.
fn control_load(cfg: &ModelConfig, se: &SpectralEfficiencies, t2: f64, t_b: f64) -> f64 {
    let n = &cfg.network;
    let s = &cfg.split;
    if s.mu_c == 0.0 {
        return 0.0;
    }
    n.lambda2 * s.mu_c / (n.lambda1 * s.gamma) * demand(cfg, se, t2, t_b)
}

fn demand(cfg: &ModelConfig, se: &SpectralEfficiencies, t2: f64, t_b: f64) -> f64 {
    let w1 = cfg.split.w1;
    t2 / (w1 * se.get(LinkType::SplitCtrl2)) + t_b / (w1 * se.get(LinkType::SplitCtrlB))
}

/// Whether the macro band can carry the phantom-cell control plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// T₂/R_c2 + T_B/R_cB.
    pub lhs: f64,
    /// λ₁γ/(λ₂μ_C); infinite without control traffic.
    pub rhs: f64,
    pub margin: f64,
}

pub fn feasibility(cfg: &ModelConfig) -> Result<FeasibilityReport> {
    cfg.validate()?;
    let se = SpectralEfficiencies::compute(&cfg.network)?;
    Ok(feasibility_from(cfg, &se))
}

fn feasibility_from(cfg: &ModelConfig, se: &SpectralEfficiencies) -> FeasibilityReport {
    let sp = split_from(cfg, se);
    let lhs = demand(cfg, se, sp.t2, sp.t_b);
    let n = &cfg.network;
    let rhs = if cfg.split.mu_c == 0.0 {
        f64::INFINITY
    } else {
        n.lambda1 * cfg.split.gamma / (n.lambda2 * cfg.split.mu_c)
    };
    let margin = rhs - lhs;
    FeasibilityReport {
        feasible: margin >= 0.0,
        lhs,
        rhs,
        margin,
    }
}

/// Mobility-aware per-user throughput.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UserThroughput {
    /// nats/s.
    pub value: f64,
    /// The stationary weighted sum before the handover penalty.
    pub stationary: f64,
    pub handover_cost: f64,
    /// The handover cost reached 1: the user gets nothing.
    pub saturated: bool,
}

pub fn average_user_throughput(
    cfg: &ModelConfig,
    architecture: Architecture,
) -> Result<UserThroughput> {
    let e = evaluate(cfg)?;
    Ok(match architecture {
        Architecture::Conventional => e.user_conventional,
        Architecture::Split => e.user_split,
    })
}

fn user_throughput(
    a: &AssociationProbabilities,
    n: &LoadEstimates,
    t: &TierThroughputs,
    cost: &HandoverCost,
) -> UserThroughput {
    let stationary = a.a1 * t.t1 / n.n1 + a.a2 * t.t2 / n.n2 + a.a_b * t.t_b / n.n_b;
    let saturated = cost.value >= 1.0;
    UserThroughput {
        value: if saturated {
            0.0
        } else {
            stationary * (1.0 - cost.value)
        },
        stationary,
        handover_cost: cost.value,
        saturated,
    }
}

/// Every analytic quantity of one configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub association: AssociationProbabilities,
    pub loads: LoadEstimates,
    pub spectral_efficiency: SpectralEfficiencies,
    pub conventional: TierThroughputs,
    pub split: TierThroughputs,
    pub feasibility: FeasibilityReport,
    /// `None` when the path-loss exponents differ.
    pub handover: Option<HandoverRates>,
    pub cost_conventional: HandoverCost,
    pub cost_split: HandoverCost,
    pub user_conventional: UserThroughput,
    pub user_split: UserThroughput,
}

impl Evaluation {
    /// Per-macro-user throughput A₁T₁/N₁ under the split.
    pub fn split_macro_user_rate(&self) -> f64 {
        self.association.a1 * self.split.t1 / self.loads.n1
    }
}

/// Evaluate everything at once, sharing the spectral efficiencies.
///
/// Handover rates need equal exponents; with unequal exponents the costs
/// are only defined at zero velocity, and a moving user yields
/// [`Error::UnequalExponents`].
pub fn evaluate(cfg: &ModelConfig) -> Result<Evaluation> {
    cfg.validate()?;
    let net = &cfg.network;
    let association = association_probabilities(net)?;
    let loads = loads_from(&association, net);
    let se = SpectralEfficiencies::compute(net)?;
    let conventional = conventional_from(cfg, &se);
    let split = split_from(cfg, &se);
    let feasibility = feasibility_from(cfg, &se);
    let handover = match handover_rates(net) {
        Ok(r) => Some(r),
        Err(Error::UnequalExponents { .. }) if cfg.mobility.velocity == 0.0 => None,
        Err(e) => return Err(e),
    };
    let (cost_conventional, cost_split) = match &handover {
        Some(r) => (conventional_cost_from(cfg, r), split_cost_from(cfg, r)),
        None => (
            HandoverCost {
                value: 0.0,
                architecture: Architecture::Conventional,
            },
            HandoverCost {
                value: 0.0,
                architecture: Architecture::Split,
            },
        ),
    };
    Ok(Evaluation {
        association,
        loads,
        spectral_efficiency: se,
        user_conventional: user_throughput(&association, &loads, &conventional, &cost_conventional),
        user_split: user_throughput(&association, &loads, &split, &cost_split),
        conventional,
        split,
        feasibility,
        handover,
        cost_conventional,
        cost_split,
    })
}

/// Smallest small-cell density in `[lo, hi]` (BS/m²) at which the split
/// stops being feasible, located to `rel_tol` relative precision.
///
/// The bracket is scanned on a log grid for the first feasible→infeasible
/// transition, then bisected (at most 60 halvings). `None` if the split is
/// feasible across the whole range or already infeasible at `lo`.
pub fn breaking_density(cfg: &ModelConfig, lo: f64, hi: f64, rel_tol: f64) -> Result<Option<f64>> {
    if !(lo > 0.0 && hi > lo && rel_tol > 0.0) {
        return Err(Error::Domain(
            "breaking-density bracket must satisfy 0 < lo < hi".into(),
        ));
    }
    let margin = |l2: f64| -> Result<f64> {
        let mut c = *cfg;
        c.network.lambda2 = l2;
        Ok(feasibility(&c)?.margin)
    };
    if margin(lo)? < 0.0 {
        return Ok(None);
    }
    const STEPS: usize = 64;
    let ratio = (hi / lo).powf(1.0 / STEPS as f64);
    let mut a = lo;
    let mut b = None;
    for k in 1..=STEPS {
        let x = if k == STEPS {
            hi
        } else {
            lo * ratio.powi(k as i32)
        };
        if margin(x)? < 0.0 {
            b = Some(x);
            break;
        }
        a = x;
    }
    let Some(mut b) = b else { return Ok(None) };
    for _ in 0..60 {
        if (b - a) <= rel_tol * a {
            break;
        }
        let mid = 0.5 * (a + b);
        if margin(mid)? < 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::units::{kmh, per_km2};

    fn at(l2: f64) -> ModelConfig {
        let mut cfg = ModelConfig::default();
        cfg.network.lambda2 = per_km2(l2);
        cfg
    }

    #[test]
    fn no_capacity_after_full_control() {
        let mut cfg = at(50.0);
        cfg.split.mu_c = 1.0;
        let t = conventional_tier_throughputs(&cfg).unwrap();
        assert_eq!((t.t1, t.t2, t.t_b), (0.0, 0.0, 0.0));
    }

    #[test]
    fn no_abs_means_no_biased_rate() {
        let mut cfg = at(50.0);
        cfg.split.eta = 0.0;
        let se = SpectralEfficiencies::compute(&cfg.network).unwrap();
        let t = conventional_tier_throughputs(&cfg).unwrap();
        assert_eq!(t.t_b, 0.0);
        assert!((t.t1 - 0.7 * 1e7 * se.get(LinkType::ConvMacro)).abs() < 1e-6);
        assert!((t.t2 - 0.7 * 1e7 * se.get(LinkType::ConvSmall)).abs() < 1e-6);
    }

    #[test]
    fn default_macro_rate() {
        let cfg = at(50.0);
        let se = SpectralEfficiencies::compute(&cfg.network).unwrap();
        let t = conventional_tier_throughputs(&cfg).unwrap();
        assert!((t.t1 - 0.7 * 0.7 * 1e7 * se.get(LinkType::ConvMacro)).abs() < 1e-6);
    }

    #[test]
    fn macro_rate_without_control_burden() {
        let full = |cfg: &ModelConfig| {
            let se = SpectralEfficiencies::compute(&cfg.network).unwrap();
            (1.0 - cfg.split.mu_c) * cfg.split.w1 * se.get(LinkType::SplitMacro)
        };
        let cfg = at(1e-6);
        let t = split_tier_throughputs(&cfg).unwrap();
        assert!(((t.t1 - full(&cfg)) / full(&cfg)).abs() < 1e-5);
        let mut cfg = at(50.0);
        cfg.split.gamma = 1e12;
        let t = split_tier_throughputs(&cfg).unwrap();
        assert!(((t.t1 - full(&cfg)) / full(&cfg)).abs() < 1e-9);
    }

    #[test]
    fn feasibility_cases() {
        let mut cfg = at(50.0);
        cfg.split.mu_c = 0.0;
        assert!(feasibility(&cfg).unwrap().feasible);
        let cfg = at(1.0);
        let f = feasibility(&cfg).unwrap();
        assert!(f.feasible && f.margin > 0.0);
    }

    #[test]
    fn margin_by_hand_at_equal_densities() {
        // λ₂ = λ₁: rhs = γ/μ = 10, lhs from the split rates; with 8 MHz of
        // phantom spectrum against 2 MHz of macro control the demand wins.
        let cfg = at(2.0);
        let se = SpectralEfficiencies::compute(&cfg.network).unwrap();
        let lhs = 4.0
            * (0.7 * se.get(LinkType::SplitData2) / se.get(LinkType::SplitCtrl2)
                + 0.3 * se.get(LinkType::SplitDataB) / se.get(LinkType::SplitCtrlB));
        let f = feasibility(&cfg).unwrap();
        assert!((f.rhs - 10.0).abs() < 1e-12);
        assert!((f.lhs - lhs).abs() < 1e-9 * lhs);
        assert!((f.margin - (10.0 - lhs)).abs() < 1e-9);
        assert!(!f.feasible);
    }

    #[test]
    fn bracket_sign_matches_margin() {
        for l2 in [0.5, 1.0, 1.5, 3.0, 50.0] {
            let cfg = at(l2);
            let f = feasibility(&cfg).unwrap();
            let t = split_tier_throughputs(&cfg).unwrap();
            assert_eq!(t.t1_clamped, f.margin < 0.0, "λ2 {l2}");
        }
    }

    #[test]
    fn macro_rate_hits_zero_at_breaking_point() {
        let cfg = ModelConfig::default();
        let star = breaking_density(&cfg, per_km2(0.1), per_km2(200.0), 1e-10)
            .unwrap()
            .unwrap();
        let mut c = cfg;
        c.network.lambda2 = star * (1.0 - 1e-6);
        let t = split_tier_throughputs(&c).unwrap();
        assert!(!t.t1_clamped && t.t1 < 1e-4 * split_tier_throughputs(&at(0.1)).unwrap().t1);
        c.network.lambda2 = star * (1.0 + 1e-6);
        let t = split_tier_throughputs(&c).unwrap();
        assert!(t.t1_clamped && t.t1 == 0.0);
    }

    #[test]
    fn stationary_user_ignores_delays() {
        let mut cfg = at(50.0);
        let base = average_user_throughput(&cfg, Architecture::Conventional).unwrap();
        assert!(!base.saturated && base.value == base.stationary);
        cfg.mobility.d_conv = 3.0;
        cfg.mobility.prob_x2_conv = 0.7;
        let other = average_user_throughput(&cfg, Architecture::Conventional).unwrap();
        assert_eq!(base.value, other.value);
    }

    #[test]
    fn saturation_zeroes_throughput() {
        let mut cfg = at(150.0);
        cfg.mobility.velocity = kmh(360.0);
        let u = average_user_throughput(&cfg, Architecture::Conventional).unwrap();
        assert!(u.saturated && u.value == 0.0 && u.handover_cost >= 1.0);
    }

    #[test]
    fn high_speed_favours_split() {
        let mut cfg = at(150.0);
        cfg.mobility.velocity = kmh(360.0);
        cfg.split.gamma = 1.0;
        let e = evaluate(&cfg).unwrap();
        assert!(e.user_conventional.value == 0.0);
        assert!(e.user_split.value > 0.0);
    }

    #[test]
    fn unequal_exponents_only_block_moving_users() {
        let mut cfg = at(50.0);
        cfg.network.alpha2 = 3.7;
        let e = evaluate(&cfg).unwrap();
        assert!(e.handover.is_none());
        cfg.mobility.velocity = 10.0;
        assert!(matches!(
            evaluate(&cfg),
            Err(Error::UnequalExponents { .. })
        ));
    }
}
