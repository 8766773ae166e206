//! Monte Carlo oracle: PPP realizations, random-waypoint walks, per-point
//! SINR sampling and handover-event counting.

mod export;
mod network;
mod transect;
mod validate;
mod walk;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::association::AssociationSet;
use crate::config::units::{from_db, km};
use crate::config::NetworkConfig;
use crate::coverage::LinkType;
use crate::error::{Error, Result, Violations};

pub use export::{write_ccdf_csv, write_trace_csv};
pub use network::{realize_network, Network, Point};
pub use transect::{transect_survey, TransectSpec, TransectSurvey};
pub use validate::{
    run_validation, ClassCheck, CoverageCheck, SetCheck, ValidationReport, ValidationSpec,
    ValidationStatus,
};
pub use walk::{
    walk_trajectory, Discard, EventClass, HandoverEvent, ServingBs, TracePoint, TrajectoryTrace,
};

/// Samples per link below which an empirical CCDF is not trusted.
pub const MIN_SAMPLES: usize = 1000;

/// How segment lengths of the random walk are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentLength {
    /// Rayleigh with the given scale; `None` means 1/√(2πλ₁).
    Rayleigh(Option<f64>),
    /// Every segment has this length (m).
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    /// Side of the square window (m).
    pub window_side: f64,
    pub segments: usize,
    pub points_per_segment: usize,
    pub realizations: usize,
    pub rng_seed: u64,
    pub segment_length: SegmentLength,
    /// BSs within this distance of the trajectory's bounding box get
    /// individual fades; the rest contribute their mean power (m).
    pub interaction_radius: f64,
    /// Distance the trajectory must keep from the window edge; `None` means
    /// 5/√λ₁ (m).
    pub guard_margin: Option<f64>,
}

impl Default for SimulationSpec {
    fn default() -> Self {
        Self {
            window_side: km(90.0),
            segments: 5,
            points_per_segment: 100,
            realizations: 1000,
            rng_seed: 1,
            segment_length: SegmentLength::Rayleigh(None),
            interaction_radius: km(2.0),
            guard_margin: None,
        }
    }
}

impl SimulationSpec {
    pub fn segment_scale(&self, cfg: &NetworkConfig) -> f64 {
        match self.segment_length {
            SegmentLength::Rayleigh(Some(s)) => s,
            SegmentLength::Rayleigh(None) => {
                1.0 / (2.0 * std::f64::consts::PI * cfg.lambda1).sqrt()
            }
            SegmentLength::Fixed(l) => l,
        }
    }

    pub fn guard(&self, cfg: &NetworkConfig) -> f64 {
        self.guard_margin.unwrap_or(5.0 / cfg.lambda1.sqrt())
    }

    pub fn validate(&self, cfg: &NetworkConfig) -> Result<()> {
        let mut v = Violations::default();
        if self.segments < 1 {
            v.push("segments", "must be at least 1");
        }
        if self.points_per_segment < 1 {
            v.push("points_per_segment", "must be at least 1");
        }
        if self.realizations < 1 {
            v.push("realizations", "must be at least 1");
        }
        if !(self.interaction_radius > 0.0 && self.interaction_radius.is_finite()) {
            v.push("interaction_radius", "must be positive");
        }
        match self.segment_length {
            SegmentLength::Rayleigh(Some(s)) if !(s > 0.0 && s.is_finite()) => {
                v.push("segment_length", "Rayleigh scale must be positive")
            }
            SegmentLength::Fixed(l) if !(l >= 0.0 && l.is_finite()) => {
                v.push("segment_length", "fixed length must be non-negative")
            }
            _ => {}
        }
        if !(cfg.lambda1 > 0.0) {
            v.push("lambda1", "the simulator needs a macro tier");
        } else {
            // Six scale lengths per segment covers all but ~1e-8 of Rayleigh draws.
            let reach = match self.segment_length {
                SegmentLength::Fixed(l) => l * self.segments as f64,
                _ => 6.0 * self.segment_scale(cfg) * (self.segments as f64).sqrt(),
            };
            if reach + self.guard(cfg) >= 0.5 * self.window_side {
                v.push(
                    "window_side",
                    "too small for the trajectory extent plus guard margin",
                );
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(v))
        }
    }
}

#[derive(Clone, Copy)]
pub(crate) enum Stream {
    Network = 0,
    Walk = 1,
}

/// Independent generator for one (realization, purpose) pair.
pub(crate) fn stream_rng(seed: u64, index: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_mul(2).wrapping_add(stream as u64));
    rng
}

/// Fraction of samples strictly above each threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCcdf {
    pub thresholds_db: Vec<f64>,
    pub fractions: Vec<f64>,
    pub sample_count: usize,
}

impl EmpiricalCcdf {
    /// CCDF of linear SINR samples. An empty sample gives all-zero fractions.
    pub fn from_samples(samples: &[f64], grid_db: &[f64]) -> Self {
        let mut sorted: Vec<f64> = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let fractions = grid_db
            .iter()
            .map(|&t| {
                if n == 0 {
                    return 0.0;
                }
                let theta = from_db(t);
                let at_or_below = sorted.partition_point(|&s| s <= theta);
                (n - at_or_below) as f64 / n as f64
            })
            .collect();
        Self {
            thresholds_db: grid_db.to_vec(),
            fractions,
            sample_count: n,
        }
    }

    /// Largest absolute gap to `reference` on the shared grid.
    pub fn max_deviation(&self, reference: &[f64]) -> f64 {
        self.fractions
            .iter()
            .zip(reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Pooled CCDF of one link over a set of traces.
pub fn empirical_coverage(
    traces: &[TrajectoryTrace],
    link: LinkType,
    grid_db: &[f64],
) -> Result<EmpiricalCcdf> {
    crate::coverage::check_grid(grid_db)?;
    let samples: Vec<f64> = traces
        .iter()
        .flat_map(|t| t.points.iter().filter_map(move |p| p.sinr[link as usize]))
        .collect();
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            link: link.name().to_string(),
            count: samples.len(),
            required: MIN_SAMPLES,
        });
    }
    Ok(EmpiricalCcdf::from_samples(&samples, grid_db))
}

/// Event counts of each class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandoverCounts {
    /// `conv[i][j]`: serving changes from tier i+1 to tier j+1.
    pub conv: [[u64; 2]; 2],
    pub inter_anchor: u64,
    pub intra_anchor: u64,
}

impl HandoverCounts {
    pub fn add(&mut self, other: &Self) {
        for i in 0..2 {
            for j in 0..2 {
                self.conv[i][j] += other.conv[i][j];
            }
        }
        self.inter_anchor += other.inter_anchor;
        self.intra_anchor += other.intra_anchor;
    }

    pub fn record(&mut self, class: EventClass) {
        match class {
            EventClass::Conv(i, j) => self.conv[i as usize - 1][j as usize - 1] += 1,
            EventClass::InterAnchor => self.inter_anchor += 1,
            EventClass::IntraAnchor => self.intra_anchor += 1,
        }
    }

    pub fn get(&self, class: EventClass) -> u64 {
        match class {
            EventClass::Conv(i, j) => self.conv[i as usize - 1][j as usize - 1],
            EventClass::InterAnchor => self.inter_anchor,
            EventClass::IntraAnchor => self.intra_anchor,
        }
    }

    pub fn serving_changes(&self) -> u64 {
        self.conv.iter().flatten().sum()
    }
}

/// Everything the validator keeps from one walk.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WalkSummary {
    /// Linear SINR samples, indexed by `LinkType as usize`.
    pub samples: Vec<Vec<f64>>,
    /// Points spent in Set1, Set2, SetB.
    pub set_points: [u64; 3],
    pub counts: HandoverCounts,
    /// Sampled path length (m).
    pub length: f64,
}

impl WalkSummary {
    fn from_trace(trace: &TrajectoryTrace) -> Self {
        let mut samples = vec![Vec::new(); 8];
        let mut set_points = [0; 3];
        for p in &trace.points {
            set_points[set_index(p.tag)] += 1;
            for (k, s) in p.sinr.iter().enumerate() {
                if let Some(s) = s {
                    samples[k].push(*s);
                }
            }
        }
        let mut counts = HandoverCounts::default();
        for e in &trace.events {
            counts.record(e.class);
        }
        Self {
            samples,
            set_points,
            counts,
            length: trace.length,
        }
    }

    fn merge(mut self, other: &Self) -> Self {
        if self.samples.is_empty() {
            self.samples = vec![Vec::new(); 8];
        }
        for (a, b) in self.samples.iter_mut().zip(&other.samples) {
            a.extend_from_slice(b);
        }
        for k in 0..3 {
            self.set_points[k] += other.set_points[k];
        }
        self.counts.add(&other.counts);
        self.length += other.length;
        self
    }
}

fn set_index(s: AssociationSet) -> usize {
    match s {
        AssociationSet::Set1 => 0,
        AssociationSet::Set2 => 1,
        AssociationSet::SetB => 2,
    }
}

/// Pooled outcome of all realizations of a spec.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloRun {
    pub spec: SimulationSpec,
    pub pooled: WalkSummary,
    pub accepted: usize,
    pub discarded_empty: usize,
    pub discarded_escape: usize,
}

impl MonteCarloRun {
    pub fn ccdf(&self, link: LinkType, grid_db: &[f64]) -> EmpiricalCcdf {
        EmpiricalCcdf::from_samples(&self.pooled.samples[link as usize], grid_db)
    }

    /// Fraction of trajectory points in each association set.
    pub fn set_fraction(&self, set: AssociationSet) -> f64 {
        let total: u64 = self.pooled.set_points.iter().sum();
        if total == 0 {
            0.0
        } else {
            self.pooled.set_points[set_index(set)] as f64 / total as f64
        }
    }

    /// Events of `class` per metre of sampled path.
    pub fn rate(&self, class: EventClass) -> f64 {
        if self.pooled.length > 0.0 {
            self.pooled.counts.get(class) as f64 / self.pooled.length
        } else {
            0.0
        }
    }
}

/// Run every realization of `spec` in parallel and pool the results.
///
/// Each realization draws from its own substreams, and results are merged in
/// index order, so the output does not depend on the thread count.
pub fn simulate(cfg: &NetworkConfig, spec: &SimulationSpec) -> Result<MonteCarloRun> {
    cfg.validate()?;
    spec.validate(cfg)?;
    let outcomes: Vec<std::result::Result<WalkSummary, Discard>> = (0..spec.realizations as u64)
        .into_par_iter()
        .map(|i| {
            let net = realize_network(cfg, spec, i);
            walk_trajectory(&net, cfg, spec, i).map(|t| WalkSummary::from_trace(&t))
        })
        .collect();
    let mut pooled = WalkSummary {
        samples: vec![Vec::new(); 8],
        ..WalkSummary::default()
    };
    let (mut accepted, mut discarded_empty, mut discarded_escape) = (0, 0, 0);
    for o in &outcomes {
        match o {
            Ok(s) => {
                pooled = pooled.merge(s);
                accepted += 1;
            }
            Err(Discard::EmptyMacroTier) => discarded_empty += 1,
            Err(Discard::LeftGuardRegion) => discarded_escape += 1,
        }
    }
    Ok(MonteCarloRun {
        spec: *spec,
        pooled,
        accepted,
        discarded_empty,
        discarded_escape,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::units::per_km2;

    #[test]
    fn step_ccdf_at_zero_db() {
        let samples = vec![1.0; 2000];
        let grid = [-1.0, -0.01, 0.0, 0.01, 1.0];
        let c = EmpiricalCcdf::from_samples(&samples, &grid);
        assert_eq!(c.fractions, vec![1.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(c.sample_count, 2000);
    }

    #[test]
    fn ccdf_counts_strictly_above() {
        let samples = [0.5, 1.0, 2.0, 4.0];
        let c = EmpiricalCcdf::from_samples(&samples, &[0.0, 4.0]);
        assert_eq!(c.fractions, vec![0.5, 0.25]);
    }

    #[test]
    fn too_few_samples_is_an_error() {
        let trace = TrajectoryTrace {
            points: vec![],
            events: vec![],
            length: 0.0,
        };
        let err = empirical_coverage(&[trace], LinkType::ConvSmall, &[0.0]).unwrap_err();
        assert!(matches!(
            err,
            Error::InsufficientSamples {
                count: 0,
                required: 1000,
                ..
            }
        ));
    }

    #[test]
    fn default_spec_is_valid() {
        SimulationSpec::default()
            .validate(&NetworkConfig::default())
            .unwrap();
    }

    #[test]
    fn tiny_window_rejected() {
        let spec = SimulationSpec {
            window_side: km(5.0),
            ..SimulationSpec::default()
        };
        assert!(spec.validate(&NetworkConfig::default()).is_err());
        let spec = SimulationSpec {
            segments: 0,
            ..SimulationSpec::default()
        };
        assert!(spec.validate(&NetworkConfig::default()).is_err());
    }

    #[test]
    fn default_segment_scale() {
        let cfg = NetworkConfig::default();
        let s = SimulationSpec::default().segment_scale(&cfg);
        assert!((s - 1.0 / (2.0 * std::f64::consts::PI * per_km2(2.0)).sqrt()).abs() < 1e-9);
        assert!((s - 282.09).abs() < 0.01);
    }

    #[test]
    fn simulate_is_deterministic() {
        let cfg = NetworkConfig {
            lambda2: per_km2(20.0),
            ..NetworkConfig::default()
        };
        let spec = SimulationSpec {
            window_side: km(20.0),
            realizations: 6,
            rng_seed: 9,
            ..SimulationSpec::default()
        };
        let a = simulate(&cfg, &spec).unwrap();
        let b = simulate(&cfg, &spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.accepted, 6);
    }
}
