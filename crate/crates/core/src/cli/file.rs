//! TOML configuration files.
//!
//! ```toml
//! units = "paper"          # or "si"
//!
//! [network]
//! lambda1 = 2.0            # BS/km² (paper) or BS/m² (si)
//! lambda2 = 50.0
//! bias = 30.0              # linear
//!
//! [split]
//! w_total = 10.0           # MHz (paper) or Hz (si)
//! gamma = 3.0
//!
//! [mobility]
//! velocity = 50.0          # km/h (paper) or m/s (si)
//!
//! [simulation]
//! realizations = 1000
//! window_side = 90.0       # km (paper) or m (si)
//! ```
//!
//! Every key is optional; missing keys take the model defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::units::{km, kmh, mhz, per_km2};
use crate::config::ModelConfig;
use crate::error::{Error, Result};
use crate::montecarlo::{SegmentLength, TransectSpec, ValidationSpec};

/// Unit system of a config file, a CLI grid or an output table.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    /// m, s, W, Hz, BS/m².
    Si,
    /// km, km/h, MHz, BS/km²; powers in W and delays in s as in SI.
    #[default]
    Paper,
}

impl Units {
    pub fn name(self) -> &'static str {
        match self {
            Self::Si => "si",
            Self::Paper => "paper",
        }
    }

    pub fn density(self, x: f64) -> f64 {
        match self {
            Self::Si => x,
            Self::Paper => per_km2(x),
        }
    }

    pub fn speed(self, x: f64) -> f64 {
        match self {
            Self::Si => x,
            Self::Paper => kmh(x),
        }
    }

    pub fn bandwidth(self, x: f64) -> f64 {
        match self {
            Self::Si => x,
            Self::Paper => mhz(x),
        }
    }

    pub fn length(self, x: f64) -> f64 {
        match self {
            Self::Si => x,
            Self::Paper => km(x),
        }
    }

    /// Human-readable unit legend for output metadata.
    pub fn legend(self) -> &'static str {
        match self {
            Self::Si => "density BS/m2, velocity m/s, bandwidth Hz, rates per m, throughput nats/s",
            Self::Paper => {
                "density BS/km2, velocity km/h, bandwidth MHz, rates per km, throughput nats/s"
            }
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    units: Option<Units>,
    network: NetworkSection,
    split: SplitSection,
    mobility: MobilitySection,
    simulation: SimulationSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct NetworkSection {
    lambda1: Option<f64>,
    lambda2: Option<f64>,
    lambda_u: Option<f64>,
    p1: Option<f64>,
    p2: Option<f64>,
    alpha1: Option<f64>,
    alpha2: Option<f64>,
    bias: Option<f64>,
    noise: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SplitSection {
    w_total: Option<f64>,
    w1: Option<f64>,
    mu_c: Option<f64>,
    gamma: Option<f64>,
    eta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct MobilitySection {
    velocity: Option<f64>,
    d_conv: Option<f64>,
    d_conv_x2: Option<f64>,
    d_inter_anchor: Option<f64>,
    d_inter_anchor_x2: Option<f64>,
    d_intra_anchor: Option<f64>,
    prob_x2_conv: Option<f64>,
    prob_x2_split: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SimulationSection {
    window_side: Option<f64>,
    segments: Option<usize>,
    points_per_segment: Option<usize>,
    realizations: Option<usize>,
    seed: Option<u64>,
    segment_scale: Option<f64>,
    interaction_radius: Option<f64>,
    guard_margin: Option<f64>,
    grid_db: Option<Vec<f64>>,
    coverage_tolerance: Option<f64>,
    association_tolerance: Option<f64>,
    rate_tolerance: Option<f64>,
    min_walk_events: Option<u64>,
    transect: Option<bool>,
    transect_min_events: Option<u64>,
}

/// Everything a config file determines.
#[derive(Clone, Debug, PartialEq)]
pub struct Setup {
    pub model: ModelConfig,
    pub validation: ValidationSpec,
    /// Units the file was written in.
    pub file_units: Units,
}

impl Default for Setup {
    fn default() -> Self {
        Self {
            model: ModelConfig::default(),
            validation: ValidationSpec::default(),
            file_units: Units::Paper,
        }
    }
}

fn set(slot: &mut f64, value: Option<f64>, convert: impl Fn(f64) -> f64) {
    if let Some(v) = value {
        *slot = convert(v);
    }
}

/// Parse a config from TOML text. The result is validated.
pub fn parse_config(text: &str) -> Result<Setup> {
    let f: FileConfig =
        toml::from_str(text).map_err(|e| Error::ConfigFile(e.message().to_string()))?;
    let u = f.units.unwrap_or_default();
    let id = |x: f64| x;
    let mut m = ModelConfig::default();

    let n = &f.network;
    let net = &mut m.network;
    set(&mut net.lambda1, n.lambda1, |x| u.density(x));
    set(&mut net.lambda2, n.lambda2, |x| u.density(x));
    set(&mut net.lambda_u, n.lambda_u, |x| u.density(x));
    set(&mut net.p1, n.p1, id);
    set(&mut net.p2, n.p2, id);
    set(&mut net.alpha1, n.alpha1, id);
    set(&mut net.alpha2, n.alpha2, id);
    set(&mut net.bias, n.bias, id);
    set(&mut net.noise, n.noise, id);

    let s = &f.split;
    let sp = &mut m.split;
    set(&mut sp.w_total, s.w_total, |x| u.bandwidth(x));
    set(&mut sp.w1, s.w1, |x| u.bandwidth(x));
    set(&mut sp.mu_c, s.mu_c, id);
    set(&mut sp.gamma, s.gamma, id);
    set(&mut sp.eta, s.eta, id);

    let mo = &f.mobility;
    if let Some(d) = mo.d_conv {
        // the other delays default to fractions of d_conv
        let v = m.mobility.velocity;
        m.mobility = crate::config::MobilityConfig::with_conventional_delay(d);
        m.mobility.velocity = v;
    }
    let mb = &mut m.mobility;
    set(&mut mb.velocity, mo.velocity, |x| u.speed(x));
    set(&mut mb.d_conv_x2, mo.d_conv_x2, id);
    set(&mut mb.d_inter_anchor, mo.d_inter_anchor, id);
    set(&mut mb.d_inter_anchor_x2, mo.d_inter_anchor_x2, id);
    set(&mut mb.d_intra_anchor, mo.d_intra_anchor, id);
    set(&mut mb.prob_x2_conv, mo.prob_x2_conv, id);
    set(&mut mb.prob_x2_split, mo.prob_x2_split, id);
    m.validate()?;

    let si = &f.simulation;
    let mut v = ValidationSpec::default();
    let sim = &mut v.simulation;
    set(&mut sim.window_side, si.window_side, |x| u.length(x));
    set(&mut sim.interaction_radius, si.interaction_radius, |x| {
        u.length(x)
    });
    if let Some(g) = si.guard_margin {
        sim.guard_margin = Some(u.length(g));
    }
    if let Some(s) = si.segment_scale {
        sim.segment_length = SegmentLength::Rayleigh(Some(u.length(s)));
    }
    sim.segments = si.segments.unwrap_or(sim.segments);
    sim.points_per_segment = si.points_per_segment.unwrap_or(sim.points_per_segment);
    sim.realizations = si.realizations.unwrap_or(sim.realizations);
    sim.rng_seed = si.seed.unwrap_or(sim.rng_seed);
    if let Some(g) = &si.grid_db {
        v.grid_db = g.clone();
    }
    set(&mut v.coverage_tolerance, si.coverage_tolerance, id);
    set(&mut v.association_tolerance, si.association_tolerance, id);
    set(&mut v.rate_tolerance, si.rate_tolerance, id);
    v.min_walk_events = si.min_walk_events.unwrap_or(v.min_walk_events);
    if si.transect == Some(false) {
        v.transect = None;
    } else if let Some(k) = si.transect_min_events {
        v.transect = Some(TransectSpec {
            min_events: k,
            ..TransectSpec::default()
        });
    }
    if v.simulation.realizations == 0
        || v.simulation.segments == 0
        || v.simulation.points_per_segment == 0
    {
        return Err(Error::ConfigFile(
            "simulation counts must be at least 1".into(),
        ));
    }

    Ok(Setup {
        model: m,
        validation: v,
        file_units: u,
    })
}

/// Read and parse a config file.
pub fn load_config(path: &Path) -> Result<Setup> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ConfigFile(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::units::to_per_km2;

    #[test]
    fn empty_file_gives_defaults() {
        let s = parse_config("").unwrap();
        assert_eq!(s, Setup::default());
    }

    #[test]
    fn paper_units_convert_once() {
        let s = parse_config(
            "[network]\nlambda2 = 150.0\n[mobility]\nvelocity = 360.0\n[split]\nw1 = 3.0\n[simulation]\nwindow_side = 40.0\n",
        )
        .unwrap();
        assert!((to_per_km2(s.model.network.lambda2) - 150.0).abs() < 1e-9);
        assert!((s.model.mobility.velocity - 100.0).abs() < 1e-12);
        assert_eq!(s.model.split.w1, 3e6);
        assert_eq!(s.validation.simulation.window_side, 40e3);
    }

    #[test]
    fn si_units_pass_through() {
        let s = parse_config(
            "units = \"si\"\n[network]\nlambda2 = 1e-4\n[mobility]\nvelocity = 10.0\n",
        )
        .unwrap();
        assert_eq!(s.model.network.lambda2, 1e-4);
        assert_eq!(s.model.mobility.velocity, 10.0);
        assert_eq!(s.file_units, Units::Si);
    }

    #[test]
    fn conventional_delay_drives_defaults() {
        let s = parse_config("[mobility]\nd_conv = 1.0\nd_intra_anchor = 0.2\n").unwrap();
        let m = s.model.mobility;
        assert_eq!(
            (m.d_conv, m.d_inter_anchor, m.d_conv_x2, m.d_intra_anchor),
            (1.0, 1.0, 0.5, 0.2)
        );
    }

    #[test]
    fn unknown_keys_and_bad_values_rejected() {
        assert!(matches!(
            parse_config("[network]\nlamda2 = 3.0\n"),
            Err(Error::ConfigFile(_))
        ));
        assert!(matches!(
            parse_config("[network]\nalpha1 = 2.0\n"),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            parse_config("units = \"imperial\"\n"),
            Err(Error::ConfigFile(_))
        ));
    }

    #[test]
    fn missing_file_is_a_config_error() {
        assert!(matches!(
            load_config(Path::new("/nonexistent/x.toml")),
            Err(Error::ConfigFile(_))
        ));
    }
}
