//! SINR coverage and spectral efficiency of the eight link types.

use std::cell::RefCell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::association::{
    association_probabilities, distance_pdf_with, AssociationProbabilities, DistanceLink,
};
use crate::config::{units, NetworkConfig};
use crate::error::{Error, Result};
use crate::specialfns::{
    hyp_geom_factor, integrate_semi_infinite, integrate_semi_infinite_scaled, rho, QuadratureSpec,
};

/// Downlink connections whose SINR the model tracks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LinkType {
    /// Conventional macro user, interfered by both tiers.
    ConvMacro,
    /// Conventional unbiased small-cell user, interfered by both tiers.
    ConvSmall,
    /// Conventional biased small-cell user, protected by almost-blank subframes.
    ConvBiased,
    /// Split-architecture macro user on the dedicated macro band.
    SplitMacro,
    /// Data link of an unbiased phantom-cell user.
    SplitData2,
    /// Control link (from the anchor MBS) of an unbiased phantom-cell user.
    SplitCtrl2,
    /// Data link of a biased phantom-cell user.
    SplitDataB,
    /// Control link of a biased phantom-cell user.
    SplitCtrlB,
}

impl LinkType {
    pub const ALL: [LinkType; 8] = [
        Self::ConvMacro,
        Self::ConvSmall,
        Self::ConvBiased,
        Self::SplitMacro,
        Self::SplitData2,
        Self::SplitCtrl2,
        Self::SplitDataB,
        Self::SplitCtrlB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::ConvMacro => "conv_macro",
            Self::ConvSmall => "conv_small",
            Self::ConvBiased => "conv_biased",
            Self::SplitMacro => "split_macro",
            Self::SplitData2 => "split_data2",
            Self::SplitCtrl2 => "split_ctrl2",
            Self::SplitDataB => "split_dataB",
            Self::SplitCtrlB => "split_ctrlB",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s))
    }

    /// The service distance the link is averaged over.
    pub fn distance(self) -> DistanceLink {
        match self {
            Self::ConvMacro | Self::SplitMacro => DistanceLink::R1,
            Self::ConvSmall | Self::SplitData2 => DistanceLink::R2,
            Self::ConvBiased | Self::SplitDataB => DistanceLink::RB,
            Self::SplitCtrl2 => DistanceLink::Rc2,
            Self::SplitCtrlB => DistanceLink::RcB,
        }
    }

    /// Serving tier (transmit power of the serving BS).
    pub fn serving_tier(self) -> usize {
        match self {
            Self::ConvMacro | Self::SplitMacro | Self::SplitCtrl2 | Self::SplitCtrlB => 1,
            _ => 2,
        }
    }

    // The biased data link is one link under two names.
    fn canonical(self) -> Self {
        match self {
            Self::SplitDataB => Self::ConvBiased,
            l => l,
        }
    }
}

impl std::fmt::Display for LinkType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A coverage CCDF sampled on a threshold grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageCurve {
    pub link: LinkType,
    /// Linear thresholds.
    pub thresholds: Vec<f64>,
    pub probabilities: Vec<f64>,
}

/// Coverage curves and spectral efficiencies of every link type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub grid_db: Vec<f64>,
    pub curves: Vec<CoverageCurve>,
    /// nats/s/Hz, in `LinkType::ALL` order.
    pub spectral_efficiency: Vec<(LinkType, f64)>,
}

/// Coverage probability P[SINR > θ]; closed form when both exponents are 4.
pub fn coverage(link: LinkType, theta: f64, cfg: &NetworkConfig) -> Result<f64> {
    check_theta(theta)?;
    let a = association_probabilities(cfg)?;
    if cfg.is_alpha4() {
        Ok(closed_coverage(link, theta, cfg, &a))
    } else {
        integral_coverage(link, theta, cfg, &a)
    }
}

/// The general-exponent coverage integral, regardless of the exponents.
pub fn coverage_integral(link: LinkType, theta: f64, cfg: &NetworkConfig) -> Result<f64> {
    check_theta(theta)?;
    let a = association_probabilities(cfg)?;
    integral_coverage(link, theta, cfg, &a)
}

/// Ergodic spectral efficiency E[ln(1 + SINR)] in nats/s/Hz.
pub fn spectral_efficiency(link: LinkType, cfg: &NetworkConfig) -> Result<f64> {
    let a = association_probabilities(cfg)?;
    if cfg.is_alpha4() {
        let link = link.canonical();
        let spec = QuadratureSpec::default().with_rel_tol(1e-11);
        let e = integrate_semi_infinite(|t| closed_coverage(link, t, cfg, &a) / (t + 1.0), &spec)?;
        Ok(e.value)
    } else {
        integral_se(link, cfg, &a)
    }
}

/// Spectral efficiency via the general double integral.
pub fn spectral_efficiency_integral(link: LinkType, cfg: &NetworkConfig) -> Result<f64> {
    let a = association_probabilities(cfg)?;
    integral_se(link, cfg, &a)
}

/// Coverage over a strictly increasing grid of thresholds in dB.
pub fn coverage_curve(
    link: LinkType,
    grid_db: &[f64],
    cfg: &NetworkConfig,
) -> Result<CoverageCurve> {
    check_grid(grid_db)?;
    let thresholds: Vec<f64> = grid_db.iter().map(|&d| units::from_db(d)).collect();
    let probabilities = thresholds
        .iter()
        .map(|&t| coverage(link, t, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoverageCurve {
        link,
        thresholds,
        probabilities,
    })
}

/// Curves for all eight links plus their spectral efficiencies.
pub fn coverage_report(grid_db: &[f64], cfg: &NetworkConfig) -> Result<CoverageReport> {
    let curves = LinkType::ALL
        .iter()
        .map(|&l| coverage_curve(l, grid_db, cfg))
        .collect::<Result<Vec<_>>>()?;
    let spectral_efficiency = LinkType::ALL
        .iter()
        .map(|&l| spectral_efficiency(l, cfg).map(|s| (l, s)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoverageReport {
        grid_db: grid_db.to_vec(),
        curves,
        spectral_efficiency,
    })
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "threshold must be positive (got {theta})"
        )))
    }
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Domain("threshold grid is empty".into()));
    }
    if grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(
            "threshold grid must be finite and strictly increasing".into(),
        ));
    }
    Ok(())
}

fn closed_coverage(
    link: LinkType,
    theta: f64,
    cfg: &NetworkConfig,
    a: &AssociationProbabilities,
) -> f64 {
    let r = cfg.derived_ratios();
    let (l1, l2) = (cfg.lambda1, cfg.lambda2);
    let rt = rho(1.0, theta);
    match link.canonical() {
        LinkType::ConvMacro => {
            let s = l2 * r.p21_tilde.sqrt();
            (l1 + s) / (l1 * rt + s * rho(1.0, theta / cfg.bias))
        }
        LinkType::ConvSmall => 1.0 / rt,
        LinkType::SplitMacro => {
            let s = l2 * r.p21_tilde.sqrt();
            (l1 + s) / (l1 * rt + s)
        }
        LinkType::SplitData2 => {
            let s = l1 * r.p12.sqrt();
            (l2 + s) / (l2 * rt + s)
        }
        LinkType::SplitCtrl2 => {
            // 1 − 1/(1+k) written as k/(1+k): k is tiny for sparse small cells
            let k = l2 / l1 * r.p21.sqrt() / rt;
            (1.0 + l1 / l2 * r.p12.sqrt()) * (k / (1.0 + k)) / rt
        }
        LinkType::ConvBiased => {
            let (s, st) = (r.p12.sqrt(), r.p12_tilde.sqrt());
            l2 / a.a_b * (l1 * (s - st) / ((l2 * rt + l1 * st) * (l2 * rt + l1 * s)))
        }
        LinkType::SplitCtrlB => {
            let (s, st) = (r.p21.sqrt(), r.p21_tilde.sqrt());
            l1 / a.a_b * (l2 * (st - s) / ((l1 * rt + l2 * s) * (l1 * rt + l2 * st)))
        }
        LinkType::SplitDataB => unreachable!(),
    }
}

/// Laplace exponent of the interference, c₂ r² + c_q r^q, at a fixed threshold.
#[derive(Clone, Copy, Debug)]
struct Exponent {
    c2: f64,
    cq: f64,
    q: f64,
}

// θ·₂F₁(1, 1−2/α; 2−2/α; −θ) scaled by λ̃ = 2πλ/(α−2).
fn tier_term(lambda: f64, alpha: f64, theta: f64) -> Result<f64> {
    Ok(2.0 * PI * lambda / (alpha - 2.0) * theta * hyp_geom_factor(alpha, theta)?)
}

fn exponent(link: LinkType, theta: f64, cfg: &NetworkConfig) -> Result<Exponent> {
    let r = cfg.derived_ratios();
    let (l1, l2, a1, a2) = (cfg.lambda1, cfg.lambda2, cfg.alpha1, cfg.alpha2);
    let e = match link.canonical() {
        LinkType::ConvMacro => Exponent {
            c2: tier_term(l1, a1, theta)?,
            cq: r.p21_tilde.powf(2.0 / a2) * tier_term(l2, a2, theta / cfg.bias)?,
            q: 2.0 * a1 / a2,
        },
        LinkType::ConvSmall => Exponent {
            c2: tier_term(l2, a2, theta)?,
            cq: r.p12.powf(2.0 / a1) * tier_term(l1, a1, theta)?,
            q: 2.0 * a2 / a1,
        },
        LinkType::ConvBiased | LinkType::SplitData2 => Exponent {
            c2: tier_term(l2, a2, theta)?,
            cq: 0.0,
            q: 2.0,
        },
        LinkType::SplitMacro | LinkType::SplitCtrl2 | LinkType::SplitCtrlB => Exponent {
            c2: tier_term(l1, a1, theta)?,
            cq: 0.0,
            q: 2.0,
        },
        LinkType::SplitDataB => unreachable!(),
    };
    Ok(e)
}

fn inner_spec() -> QuadratureSpec {
    QuadratureSpec::default()
        .with_rel_tol(1e-11)
        .with_abs_tol(1e-14)
}

fn integral_coverage(
    link: LinkType,
    theta: f64,
    cfg: &NetworkConfig,
    a: &AssociationProbabilities,
) -> Result<f64> {
    let pdf = distance_pdf_with(link.distance(), cfg, a);
    let e = exponent(link, theta, cfg)?;
    let f = |r: f64| {
        let x = e.c2 * r * r + if e.cq > 0.0 { e.cq * r.powf(e.q) } else { 0.0 };
        (-x).exp() * pdf.evaluate(r)
    };
    let v = integrate_semi_infinite_scaled(f, pdf.scale(), &inner_spec())?.value;
    Ok(v.clamp(0.0, 1.0))
}

fn integral_se(link: LinkType, cfg: &NetworkConfig, a: &AssociationProbabilities) -> Result<f64> {
    let link = link.canonical();
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let outer = |t: f64| {
        if failure.borrow().is_some() {
            return 0.0;
        }
        match integral_coverage(link, t, cfg, a) {
            Ok(c) => c / (t + 1.0),
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                0.0
            }
        }
    };
    let spec = QuadratureSpec::default();
    let r = integrate_semi_infinite(outer, &spec);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(r?.value)
}
