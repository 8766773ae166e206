//! Random-waypoint walk through one realization.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::network::{dist2, Network, Point};
use super::{stream_rng, SegmentLength, SimulationSpec, Stream};
use crate::association::{classify, AssociationSet};
use crate::config::NetworkConfig;
use crate::coverage::LinkType;

/// Identity of a serving BS.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ServingBs {
    pub tier: u8,
    pub index: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventClass {
    /// Conventional handover from tier i to tier j.
    Conv(u8, u8),
    /// Change of the nearest MBS.
    InterAnchor,
    /// Serving change under an unchanged anchor.
    IntraAnchor,
}

impl EventClass {
    pub const ALL: [EventClass; 6] = [
        Self::Conv(1, 1),
        Self::Conv(1, 2),
        Self::Conv(2, 1),
        Self::Conv(2, 2),
        Self::InterAnchor,
        Self::IntraAnchor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Conv(1, 1) => "conv_11",
            Self::Conv(1, 2) => "conv_12",
            Self::Conv(2, 1) => "conv_21",
            Self::Conv(2, 2) => "conv_22",
            Self::Conv(..) => "conv",
            Self::InterAnchor => "inter_anchor",
            Self::IntraAnchor => "intra_anchor",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandoverEvent {
    /// Index of the first point after the change.
    pub index: usize,
    pub class: EventClass,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub position: Point,
    pub tag: AssociationSet,
    /// Nearest MBS.
    pub anchor: usize,
    pub serving: ServingBs,
    /// Linear SINR per link (indexed by `LinkType as usize`), present for the
    /// links this point's set uses.
    pub sinr: [Option<f64>; 8],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryTrace {
    pub points: Vec<TracePoint>,
    pub events: Vec<HandoverEvent>,
    /// Length of the polyline through the sampled points (m).
    pub length: f64,
}

/// Why a realization was dropped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Discard {
    EmptyMacroTier,
    LeftGuardRegion,
}

struct Path {
    points: Vec<Point>,
    length: f64,
}

fn draw_path<R: Rng>(cfg: &NetworkConfig, spec: &SimulationSpec, rng: &mut R) -> Path {
    let scale = spec.segment_scale(cfg);
    let n = spec.points_per_segment;
    let mut points = Vec::with_capacity(spec.segments * n);
    let mut start = [0.0, 0.0];
    let mut length = 0.0;
    for k in 0..spec.segments {
        let len = match spec.segment_length {
            SegmentLength::Fixed(l) => l,
            SegmentLength::Rayleigh(_) => {
                let u: f64 = rng.random();
                scale * (-2.0 * (1.0 - u).ln()).sqrt()
            }
        };
        let angle = rng.random_range(0.0..std::f64::consts::TAU);
        let (dx, dy) = (len * angle.cos(), len * angle.sin());
        for j in 0..n {
            let f = j as f64 / n as f64;
            points.push([start[0] + f * dx, start[1] + f * dy]);
        }
        let last = k + 1 == spec.segments;
        length += if last {
            len * (n - 1) as f64 / n as f64
        } else {
            len
        };
        start = [start[0] + dx, start[1] + dy];
    }
    Path { points, length }
}

#[inline]
fn path_gain(d2: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        1.0 / (d2 * d2)
    } else {
        d2.powf(-0.5 * alpha)
    }
}

/// BSs of one tier near the path, plus the mean power of all the others at
/// the centre of the path.
struct Tier {
    near: Vec<(usize, Point)>,
    far: f64,
    power: f64,
    alpha: f64,
}

fn bbox(points: &[Point]) -> [f64; 4] {
    points
        .iter()
        .fold([f64::MAX, f64::MAX, f64::MIN, f64::MIN], |b, p| {
            [
                b[0].min(p[0]),
                b[1].min(p[1]),
                b[2].max(p[0]),
                b[3].max(p[1]),
            ]
        })
}

fn select(all: &[Point], b: [f64; 4], radius: f64, power: f64, alpha: f64) -> Tier {
    let centre = [0.5 * (b[0] + b[2]), 0.5 * (b[1] + b[3])];
    let mut near = Vec::new();
    let mut far = 0.0;
    for (i, p) in all.iter().enumerate() {
        if p[0] >= b[0] - radius
            && p[0] <= b[2] + radius
            && p[1] >= b[1] - radius
            && p[1] <= b[3] + radius
        {
            near.push((i, *p));
        } else {
            far += power * path_gain(dist2(*p, centre), alpha);
        }
    }
    Tier {
        near,
        far,
        power,
        alpha,
    }
}

fn nearest(tier: &Tier, p: Point) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (k, (_, q)) in tier.near.iter().enumerate() {
        let d2 = dist2(*q, p);
        if best.is_none_or(|(_, b)| d2 < b) {
            best = Some((k, d2));
        }
    }
    best
}

/// Near sets wide enough that every nearest-BS query along the path is
/// answered exactly; each failed check doubles the radius.
fn tiers(
    net: &Network,
    cfg: &NetworkConfig,
    spec: &SimulationSpec,
    path: &[Point],
) -> (Tier, Tier) {
    let b = bbox(path);
    let mut radius = spec.interaction_radius;
    loop {
        let t1 = select(&net.macros, b, radius, cfg.p1, cfg.alpha1);
        let t2 = select(&net.smalls, b, radius, cfg.p2, cfg.alpha2);
        let exact = |t: &Tier, total: usize| {
            total == 0
                || path
                    .iter()
                    .all(|p| nearest(t, *p).is_some_and(|(_, d2)| d2 <= radius * radius))
        };
        if exact(&t1, net.macros.len()) && exact(&t2, net.smalls.len()) {
            return (t1, t2);
        }
        radius *= 2.0;
    }
}

/// Faded powers from one tier: total over the tier except the BS at
/// `skip`, and the faded power of that BS.
fn faded<R: Rng>(tier: &Tier, p: Point, skip: Option<usize>, rng: &mut R) -> (f64, f64) {
    let mut others = tier.far;
    let mut own = 0.0;
    for (k, (_, q)) in tier.near.iter().enumerate() {
        let h: f64 = Exp1.sample(rng);
        let s = h * tier.power * path_gain(dist2(*q, p), tier.alpha);
        if Some(k) == skip {
            own = s;
        } else {
            others += s;
        }
    }
    (others, own)
}

/// Walk a random trajectory from the window centre through `net`.
///
/// At each point the nearest BS of each tier is found, the point is
/// classified, every nearby BS gets an independent unit-mean exponential
/// fade, and the SINR of each link the point's set uses is recorded.
pub fn walk_trajectory(
    net: &Network,
    cfg: &NetworkConfig,
    spec: &SimulationSpec,
    index: u64,
) -> Result<TrajectoryTrace, Discard> {
    let mut rng = stream_rng(spec.rng_seed, index, Stream::Walk);
    if net.macros.is_empty() {
        return Err(Discard::EmptyMacroTier);
    }
    let path = draw_path(cfg, spec, &mut rng);
    let limit = net.half_side - spec.guard(cfg);
    if path
        .points
        .iter()
        .any(|p| p[0].abs() > limit || p[1].abs() > limit)
    {
        return Err(Discard::LeftGuardRegion);
    }
    let (t1, t2) = tiers(net, cfg, spec, &path.points);
    let noise = cfg.noise;
    let mut points = Vec::with_capacity(path.points.len());
    for &p in &path.points {
        let (a, d1) = nearest(&t1, p).expect("macro tier is non-empty");
        let s = nearest(&t2, p);
        let r2 = s.map_or(f64::INFINITY, |(_, d2)| d2.sqrt());
        let tag = classify(d1.sqrt(), r2, cfg);
        let (i1, sa) = faded(&t1, p, Some(a), &mut rng);
        let (i2, ss) = faded(&t2, p, s.map(|(k, _)| k), &mut rng);
        let mut sinr = [None; 8];
        let mut put = |l: LinkType, v: f64| sinr[l as usize] = Some(v);
        match tag {
            AssociationSet::Set1 => {
                put(LinkType::ConvMacro, sa / (i1 + i2 + ss + noise));
                put(LinkType::SplitMacro, sa / (i1 + noise));
            }
            AssociationSet::Set2 => {
                put(LinkType::ConvSmall, ss / (i1 + sa + i2 + noise));
                put(LinkType::SplitData2, ss / (i2 + noise));
                put(LinkType::SplitCtrl2, sa / (i1 + noise));
            }
            AssociationSet::SetB => {
                let data = ss / (i2 + noise);
                put(LinkType::ConvBiased, data);
                put(LinkType::SplitDataB, data);
                put(LinkType::SplitCtrlB, sa / (i1 + noise));
            }
        }
        let anchor = t1.near[a].0;
        let serving = match tag {
            AssociationSet::Set1 => ServingBs {
                tier: 1,
                index: anchor,
            },
            _ => ServingBs {
                tier: 2,
                index: t2.near[s.expect("small cell serves").0].0,
            },
        };
        points.push(TracePoint {
            position: p,
            tag,
            anchor,
            serving,
            sinr,
        });
    }
    let events = detect_events(&points);
    Ok(TrajectoryTrace {
        points,
        events,
        length: path.length,
    })
}

/// Classify identity changes between consecutive points.
pub(crate) fn detect_events(points: &[TracePoint]) -> Vec<HandoverEvent> {
    let mut events = Vec::new();
    for (i, w) in points.windows(2).enumerate() {
        let (prev, next) = (&w[0], &w[1]);
        let served = prev.serving != next.serving;
        let anchored = prev.anchor != next.anchor;
        let index = i + 1;
        if served {
            events.push(HandoverEvent {
                index,
                class: EventClass::Conv(prev.serving.tier, next.serving.tier),
            });
        }
        if anchored {
            events.push(HandoverEvent {
                index,
                class: EventClass::InterAnchor,
            });
        } else if served {
            events.push(HandoverEvent {
                index,
                class: EventClass::IntraAnchor,
            });
        }
    }
    events
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::units::{km, per_km2};
    use crate::montecarlo::realize_network;

    fn cfg(l2: f64) -> NetworkConfig {
        NetworkConfig {
            lambda2: per_km2(l2),
            ..NetworkConfig::default()
        }
    }

    fn small_spec() -> SimulationSpec {
        SimulationSpec {
            window_side: km(20.0),
            realizations: 1,
            ..SimulationSpec::default()
        }
    }

    #[test]
    fn zero_length_walk_has_no_events() {
        let c = cfg(50.0);
        let spec = SimulationSpec {
            segments: 1,
            segment_length: SegmentLength::Fixed(0.0),
            ..small_spec()
        };
        let net = realize_network(&c, &spec, 0);
        let t = walk_trajectory(&net, &c, &spec, 0).unwrap();
        assert_eq!(t.points.len(), 100);
        assert!(t.events.is_empty());
        assert_eq!(t.length, 0.0);
    }

    #[test]
    fn single_tier_events() {
        let c = cfg(50.0);
        let spec = SimulationSpec {
            window_side: km(40.0),
            segment_length: SegmentLength::Rayleigh(Some(km(1.5))),
            ..small_spec()
        };
        let mut conv = 0;
        for i in 0..20 {
            let mut net = realize_network(&c, &spec, i);
            net.smalls.clear();
            let t = walk_trajectory(&net, &c, &spec, i).unwrap();
            let inter = t
                .events
                .iter()
                .filter(|e| e.class == EventClass::InterAnchor)
                .count();
            let c11 = t
                .events
                .iter()
                .filter(|e| e.class == EventClass::Conv(1, 1))
                .count();
            assert_eq!(inter, c11);
            assert_eq!(t.events.len(), inter + c11);
            assert!(t.points.iter().all(|p| p.tag == AssociationSet::Set1));
            conv += c11;
        }
        assert!(conv > 0);
    }

    #[test]
    fn tags_follow_nearest_distances() {
        let c = cfg(50.0);
        let spec = small_spec();
        let net = realize_network(&c, &spec, 2);
        let t = walk_trajectory(&net, &c, &spec, 2).unwrap();
        for p in &t.points {
            let (a, d1) = net.nearest(1, p.position).unwrap();
            let (s, d2) = net.nearest(2, p.position).unwrap();
            assert_eq!(p.anchor, a);
            assert_eq!(p.tag, classify(d1.sqrt(), d2.sqrt(), &c));
            let expect = if p.tag == AssociationSet::Set1 {
                (1, a)
            } else {
                (2, s)
            };
            assert_eq!((p.serving.tier, p.serving.index), expect);
            let links = p.sinr.iter().filter(|s| s.is_some()).count();
            assert_eq!(links, if p.tag == AssociationSet::Set1 { 2 } else { 3 });
        }
    }

    #[test]
    fn events_only_at_identity_changes() {
        let c = cfg(50.0);
        let spec = small_spec();
        let net = realize_network(&c, &spec, 5);
        let t = walk_trajectory(&net, &c, &spec, 5).unwrap();
        let mut serving_changes = 0;
        for (i, w) in t.points.windows(2).enumerate() {
            let here: Vec<_> = t.events.iter().filter(|e| e.index == i + 1).collect();
            let served = w[0].serving != w[1].serving;
            let anchored = w[0].anchor != w[1].anchor;
            serving_changes += served as usize;
            if !served && !anchored {
                assert!(here.is_empty());
            }
            let conv = here
                .iter()
                .filter(|e| matches!(e.class, EventClass::Conv(..)))
                .count();
            assert_eq!(conv, served as usize);
            let inter = here
                .iter()
                .filter(|e| e.class == EventClass::InterAnchor)
                .count();
            assert_eq!(inter, anchored as usize);
        }
        let conv_total = t
            .events
            .iter()
            .filter(|e| matches!(e.class, EventClass::Conv(..)))
            .count();
        assert_eq!(conv_total, serving_changes);
    }

    #[test]
    fn empty_macro_tier_discarded() {
        let c = cfg(50.0);
        let spec = small_spec();
        let mut net = realize_network(&c, &spec, 0);
        net.macros.clear();
        assert_eq!(
            walk_trajectory(&net, &c, &spec, 0),
            Err(Discard::EmptyMacroTier)
        );
    }

    #[test]
    fn escaping_walk_discarded() {
        let c = cfg(5.0);
        let spec = SimulationSpec {
            segments: 1,
            segment_length: SegmentLength::Fixed(km(9.0)),
            ..small_spec()
        };
        let net = realize_network(&c, &spec, 0);
        assert_eq!(
            walk_trajectory(&net, &c, &spec, 0),
            Err(Discard::LeftGuardRegion)
        );
    }

    #[test]
    fn sampled_length() {
        let c = cfg(5.0);
        let spec = SimulationSpec {
            segments: 3,
            points_per_segment: 4,
            segment_length: SegmentLength::Fixed(100.0),
            ..small_spec()
        };
        let mut rng = stream_rng(1, 0, Stream::Walk);
        let path = draw_path(&c, &spec, &mut rng);
        assert_eq!(path.points.len(), 12);
        assert!((path.length - 275.0).abs() < 1e-9);
        assert_eq!(path.points[0], [0.0, 0.0]);
    }

    #[test]
    fn noise_lowers_sinr() {
        let quiet = cfg(50.0);
        let loud = NetworkConfig {
            noise: 1e-9,
            ..quiet
        };
        let spec = small_spec();
        let net = realize_network(&quiet, &spec, 1);
        let a = walk_trajectory(&net, &quiet, &spec, 1).unwrap();
        let b = walk_trajectory(&net, &loud, &spec, 1).unwrap();
        for (p, q) in a.points.iter().zip(&b.points) {
            for (x, y) in p.sinr.iter().zip(&q.sinr) {
                if let (Some(x), Some(y)) = (x, y) {
                    assert!(y < x);
                }
            }
        }
    }
}
