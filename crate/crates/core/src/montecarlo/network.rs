//! Poisson realizations of the two BS tiers.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::{stream_rng, SimulationSpec, Stream};
use crate::config::NetworkConfig;

pub type Point = [f64; 2];

/// BS positions of one realization in a square window centred at the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub half_side: f64,
    pub macros: Vec<Point>,
    pub smalls: Vec<Point>,
}

impl Network {
    pub fn tier(&self, tier: usize) -> &[Point] {
        match tier {
            1 => &self.macros,
            2 => &self.smalls,
            _ => panic!("tier must be 1 or 2"),
        }
    }

    /// Index and squared distance of the BS of `tier` closest to `p`.
    pub fn nearest(&self, tier: usize, p: Point) -> Option<(usize, f64)> {
        nearest_in(self.tier(tier), p)
    }
}

pub(crate) fn nearest_in(points: &[Point], p: Point) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, q) in points.iter().enumerate() {
        let d2 = dist2(*q, p);
        if best.is_none_or(|(_, b)| d2 < b) {
            best = Some((i, d2));
        }
    }
    best
}

#[inline]
pub(crate) fn dist2(a: Point, b: Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

/// Draw both tiers for realization number `index` of `spec`.
///
/// Counts are Poisson with mean λ·side², positions i.i.d. uniform. The same
/// (seed, index) pair always produces the same network.
pub fn realize_network(cfg: &NetworkConfig, spec: &SimulationSpec, index: u64) -> Network {
    let mut rng = stream_rng(spec.rng_seed, index, Stream::Network);
    let half = 0.5 * spec.window_side;
    let area = spec.window_side * spec.window_side;
    let mut tier = |lambda: f64| -> Vec<Point> {
        let mean = lambda * area;
        let n = if mean > 0.0 {
            Poisson::new(mean)
                .map(|d| d.sample(&mut rng) as usize)
                .unwrap_or(0)
        } else {
            0
        };
        (0..n)
            .map(|_| [rng.random_range(-half..half), rng.random_range(-half..half)])
            .collect()
    };
    let macros = tier(cfg.lambda1);
    let smalls = tier(cfg.lambda2);
    Network {
        half_side: half,
        macros,
        smalls,
    }
}
