//! Exact handover counting along long straight lines.
//!
//! Along the x-axis the squared distance to a BS at (a, b) is
//! t² − 2at + a² + b², so the nearest BS of a tier is the lower envelope of
//! the lines −2at + a² + b². Envelope breakpoints are anchor/tier changes;
//! tier switches are roots of the quadratic w₂²d₁² − w₁²d₂² inside each
//! piece. No spatial resolution limit applies.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::HandoverCounts;
use crate::config::units::km;
use crate::config::NetworkConfig;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransectSpec {
    /// Stop once every conventional class and the anchor class have this
    /// many events...
    pub min_events: u64,
    /// ...or once this much line has been surveyed (m).
    pub max_length: f64,
    /// Independent line pieces are this long (m).
    pub chunk_length: f64,
    pub rng_seed: u64,
}

impl Default for TransectSpec {
    fn default() -> Self {
        Self {
            min_events: 2500,
            max_length: km(5e6),
            chunk_length: km(50.0),
            rng_seed: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransectSurvey {
    pub counts: HandoverCounts,
    /// Surveyed length (m).
    pub length: f64,
    pub chunks: u64,
    /// Chunks whose strip had to be widened to keep queries exact.
    pub widened: u64,
}

impl TransectSurvey {
    pub fn rate(&self, class: super::EventClass) -> f64 {
        self.counts.get(class) as f64 / self.length
    }

    /// Smallest count among the classes the stopping rule watches.
    pub fn min_count(&self) -> u64 {
        stopping_count(&self.counts, self.counts.conv[1][1] > 0)
    }
}

// Without small cells only the macro classes can fire.
fn stopping_count(c: &HandoverCounts, two_tier: bool) -> u64 {
    if two_tier {
        c.conv
            .iter()
            .flatten()
            .copied()
            .chain([c.inter_anchor])
            .min()
            .unwrap_or(0)
    } else {
        c.conv[0][0].min(c.inter_anchor)
    }
}

/// Lower envelope restricted to [0, len]: (start, bs index) pieces.
fn envelope(bs: &[[f64; 2]], len: f64) -> Vec<(f64, usize)> {
    // slope −2a decreases with a; keep the stack of useful lines
    let mut order: Vec<usize> = (0..bs.len()).collect();
    order.sort_by(|&i, &j| bs[i][0].total_cmp(&bs[j][0]));
    let line = |i: usize| (-2.0 * bs[i][0], bs[i][0] * bs[i][0] + bs[i][1] * bs[i][1]);
    let cross = |i: usize, j: usize| {
        let (m1, c1) = line(i);
        let (m2, c2) = line(j);
        (c2 - c1) / (m1 - m2)
    };
    let mut hull: Vec<usize> = Vec::with_capacity(order.len());
    for &k in &order {
        if let Some(&last) = hull.last() {
            if bs[last][0] == bs[k][0] {
                if line(k).1 >= line(last).1 {
                    continue;
                }
                hull.pop();
            }
        }
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            if cross(a, k) <= cross(a, b) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    let mut pieces = Vec::new();
    for (n, &k) in hull.iter().enumerate() {
        let start = if n == 0 {
            f64::NEG_INFINITY
        } else {
            cross(hull[n - 1], k)
        };
        let end = if n + 1 == hull.len() {
            f64::INFINITY
        } else {
            cross(k, hull[n + 1])
        };
        if end <= 0.0 || start >= len {
            continue;
        }
        pieces.push((start.max(0.0), k));
    }
    pieces
}

fn d2(p: [f64; 2], t: f64) -> f64 {
    (t - p[0]) * (t - p[0]) + p[1] * p[1]
}

/// True when every envelope distance on [0, len] is at most `h`.
fn exact(bs: &[[f64; 2]], env: &[(f64, usize)], len: f64, h: f64) -> bool {
    if env.is_empty() {
        return false;
    }
    let h2 = h * h;
    env.iter().enumerate().all(|(n, &(s, k))| {
        let e = env.get(n + 1).map_or(len, |p| p.0);
        d2(bs[k], s) <= h2 && d2(bs[k], e) <= h2
    })
}

/// Points of a PPP of density λ in [lo, hi] × [−h, h].
fn strip<R: Rng>(lambda: f64, lo: f64, hi: f64, h: f64, rng: &mut R) -> Vec<[f64; 2]> {
    let rate = lambda * 2.0 * h;
    let mut out = Vec::with_capacity(((hi - lo) * rate * 1.1) as usize + 8);
    let mut x = lo;
    loop {
        let u: f64 = rng.random();
        x += -(1.0 - u).ln() / rate;
        if x > hi {
            return out;
        }
        out.push([x, rng.random_range(-h..h)]);
    }
}

/// Half-width at which a tier's nearest BS is almost surely inside the strip.
fn half_width(lambda: f64) -> f64 {
    (30.0 / (std::f64::consts::PI * lambda)).sqrt()
}

struct Chunk {
    counts: HandoverCounts,
    widened: bool,
}

fn tier_envelope<R: Rng>(
    lambda: f64,
    len: f64,
    rng: &mut R,
    widened: &mut bool,
) -> (Vec<[f64; 2]>, Vec<(f64, usize)>) {
    let mut h = half_width(lambda);
    loop {
        let bs = strip(lambda, -h, len + h, h, rng);
        let env = envelope(&bs, len);
        if exact(&bs, &env, len, h) {
            return (bs, env);
        }
        *widened = true;
        h *= 2.0;
    }
}

fn survey_chunk(cfg: &NetworkConfig, len: f64, seed: u64, index: u64) -> Chunk {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut widened = false;
    let (m, env1) = tier_envelope(cfg.lambda1, len, &mut rng, &mut widened);
    let (s, env2) = if cfg.lambda2 > 0.0 {
        tier_envelope(cfg.lambda2, len, &mut rng, &mut widened)
    } else {
        (Vec::new(), Vec::new())
    };
    let alpha = cfg.alpha1;
    let w1 = cfg.p1.powf(2.0 / alpha);
    let w2 = (cfg.p2 * cfg.bias).powf(2.0 / alpha);

    // Cut points: both envelopes' breakpoints plus tier-switch roots.
    let mut cuts: Vec<f64> = env1.iter().skip(1).map(|p| p.0).collect();
    cuts.extend(env2.iter().skip(1).map(|p| p.0));
    cuts.push(0.0);
    cuts.push(len);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut roots = Vec::new();
    {
        let (mut i, mut j) = (0, 0);
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            while i + 1 < env1.len() && env1[i + 1].0 <= mid {
                i += 1;
            }
            if env2.is_empty() {
                continue;
            }
            while j + 1 < env2.len() && env2[j + 1].0 <= mid {
                j += 1;
            }
            let (p, q) = (m[env1[i].1], s[env2[j].1]);
            // g(t) = w2·d1² − w1·d2²
            let a = w2 - w1;
            let b = -2.0 * (w2 * p[0] - w1 * q[0]);
            let c = w2 * (p[0] * p[0] + p[1] * p[1]) - w1 * (q[0] * q[0] + q[1] * q[1]);
            for r in quadratic_roots(a, b, c) {
                if r > w[0] && r < w[1] {
                    roots.push(r);
                }
            }
        }
    }
    cuts.extend(roots);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut counts = HandoverCounts::default();
    let (mut i, mut j) = (0, 0);
    let mut prev: Option<(usize, (u8, usize))> = None;
    for w in cuts.windows(2) {
        if w[1] - w[0] < 1e-9 {
            continue;
        }
        let mid = 0.5 * (w[0] + w[1]);
        while i + 1 < env1.len() && env1[i + 1].0 <= mid {
            i += 1;
        }
        let anchor = env1[i].1;
        let serving = if env2.is_empty() {
            (1, anchor)
        } else {
            while j + 1 < env2.len() && env2[j + 1].0 <= mid {
                j += 1;
            }
            let small = env2[j].1;
            // macro serves on ties, as in classify()
            if w2 * d2(m[anchor], mid) <= w1 * d2(s[small], mid) {
                (1, anchor)
            } else {
                (2, small)
            }
        };
        if let Some((pa, ps)) = prev {
            let served = ps != serving;
            if served {
                counts.conv[ps.0 as usize - 1][serving.0 as usize - 1] += 1;
            }
            if pa != anchor {
                counts.inter_anchor += 1;
            } else if served {
                counts.intra_anchor += 1;
            }
        }
        prev = Some((anchor, serving));
    }
    Chunk { counts, widened }
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return vec![];
    }
    if a.abs() <= 1e-14 * scale {
        return if b != 0.0 { vec![-c / b] } else { vec![] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// Survey independent line chunks until the stopping rule holds.
///
/// Chunks run in parallel batches whose composition depends only on the
/// spec, so the result is reproducible regardless of thread count.
pub fn transect_survey(cfg: &NetworkConfig, spec: &TransectSpec) -> Result<TransectSurvey> {
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
    if !(spec.chunk_length > 0.0 && spec.max_length >= spec.chunk_length) {
        return Err(Error::Domain(
            "transect chunk length must be positive and at most the maximum length".into(),
        ));
    }
    const BATCH: u64 = 64;
    let mut out = TransectSurvey {
        counts: HandoverCounts::default(),
        length: 0.0,
        chunks: 0,
        widened: 0,
    };
    let max_chunks = (spec.max_length / spec.chunk_length).floor() as u64;
    while out.chunks < max_chunks
        && stopping_count(&out.counts, cfg.lambda2 > 0.0) < spec.min_events
    {
        let end = (out.chunks + BATCH).min(max_chunks);
        let batch: Vec<Chunk> = (out.chunks..end)
            .into_par_iter()
            .map(|k| survey_chunk(cfg, spec.chunk_length, spec.rng_seed, k))
            .collect();
        for c in &batch {
            out.counts.add(&c.counts);
            out.widened += c.widened as u64;
        }
        out.length += (end - out.chunks) as f64 * spec.chunk_length;
        out.chunks = end;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::units::per_km2;
    use crate::mobility::handover_rates;
    use crate::montecarlo::EventClass;

    fn brute_nearest(bs: &[[f64; 2]], t: f64) -> usize {
        (0..bs.len())
            .min_by(|&i, &j| d2(bs[i], t).total_cmp(&d2(bs[j], t)))
            .unwrap()
    }

    #[test]
    fn envelope_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let bs = strip(1e-4, -300.0, 5300.0, 300.0, &mut rng);
        let env = envelope(&bs, 5000.0);
        let mut k = 0;
        for n in 0..5000 {
            let t = n as f64 + 0.5;
            while k + 1 < env.len() && env[k + 1].0 <= t {
                k += 1;
            }
            assert_eq!(d2(bs[env[k].1], t), d2(bs[brute_nearest(&bs, t)], t));
        }
    }

    #[test]
    fn roots_are_stable() {
        let r = quadratic_roots(1.0, -1e8, 1.0);
        assert!(r.iter().any(|x| (x - 1e-8).abs() < 1e-20));
        assert_eq!(quadratic_roots(0.0, 2.0, -4.0), vec![2.0]);
        assert!(quadratic_roots(1.0, 0.0, 1.0).is_empty());
    }

    #[test]
    fn single_tier_matches_voronoi_crossing_rate() {
        let cfg = NetworkConfig {
            lambda2: 0.0,
            ..NetworkConfig::default()
        };
        let spec = TransectSpec {
            min_events: 3000,
            ..TransectSpec::default()
        };
        let s = transect_survey(&cfg, &spec).unwrap();
        let expect = handover_rates(&cfg).unwrap().inter_anchor;
        assert_eq!(s.counts.inter_anchor, s.counts.conv[0][0]);
        assert_eq!(s.counts.intra_anchor, 0);
        let rel = (s.rate(EventClass::InterAnchor) / expect - 1.0).abs();
        assert!(rel < 0.05, "{rel}");
    }

    #[test]
    fn two_tier_crossings_match_rates() {
        let cfg = NetworkConfig {
            lambda2: per_km2(10.0),
            ..NetworkConfig::default()
        };
        let spec = TransectSpec {
            min_events: 1500,
            ..TransectSpec::default()
        };
        let s = transect_survey(&cfg, &spec).unwrap();
        let r = handover_rates(&cfg).unwrap();
        for (i, j) in [(1u8, 1u8), (1, 2), (2, 1), (2, 2)] {
            let want = r.conv[i as usize - 1][j as usize - 1];
            let got = s.rate(EventClass::Conv(i, j));
            assert!(
                (got / want - 1.0).abs() < 0.08,
                "conv_{i}{j}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn deterministic() {
        let cfg = NetworkConfig {
            lambda2: per_km2(50.0),
            ..NetworkConfig::default()
        };
        let spec = TransectSpec {
            min_events: 50,
            ..TransectSpec::default()
        };
        assert_eq!(
            transect_survey(&cfg, &spec).unwrap(),
            transect_survey(&cfg, &spec).unwrap()
        );
    }
}
