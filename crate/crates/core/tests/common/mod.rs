#![allow(dead_code)]

use hetnet_cpup::association::{association_probabilities, distance_pdf, DistanceLink};
use hetnet_cpup::config::units::{kmh, per_km2};
use hetnet_cpup::coverage::{coverage, spectral_efficiency, LinkType};
use hetnet_cpup::mobility::{conventional_cost, split_cost};
use hetnet_cpup::montecarlo::{simulate, SimulationSpec};
use hetnet_cpup::specialfns::{
    hyp_geom_factor, integrate_semi_infinite, integrate_semi_infinite_scaled, QuadratureSpec,
};
use hetnet_cpup::{ModelConfig, NetworkConfig};
use rand::Rng;

/// Parameters drawn log-uniformly (densities, powers, bias) or uniformly
/// (exponents) over a broad but physical range.
pub fn network_from_unit(u: [f64; 7]) -> NetworkConfig {
    let log = |u: f64, lo: f64, hi: f64| (lo.ln() + u * (hi.ln() - lo.ln())).exp();
    NetworkConfig {
        lambda1: per_km2(log(u[0], 0.5, 10.0)),
        lambda2: per_km2(log(u[1], 0.1, 300.0)),
        p1: log(u[2], 10.0, 100.0),
        p2: log(u[3], 0.5, 10.0),
        alpha1: 3.0 + 2.0 * u[4],
        alpha2: 3.0 + 2.0 * u[5],
        bias: log(u[6], 1.0, 100.0),
        ..NetworkConfig::default()
    }
}

pub fn random_network<R: Rng>(rng: &mut R) -> NetworkConfig {
    network_from_unit(std::array::from_fn(|_| rng.random()))
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

pub fn association_sum_error(cfg: &NetworkConfig) -> f64 {
    (association_probabilities(cfg).unwrap().sum() - 1.0).abs()
}

/// Worst |∫f − 1| over the five distance densities.
pub fn pdf_mass_error(cfg: &NetworkConfig) -> f64 {
    let spec = QuadratureSpec::default();
    DistanceLink::ALL
        .iter()
        .map(|&link| {
            let pdf = distance_pdf(link, cfg).unwrap();
            if pdf.normalizer() == 0.0 {
                return 0.0;
            }
            let m = integrate_semi_infinite_scaled(|r| pdf.evaluate(r), pdf.scale(), &spec)
                .unwrap()
                .value;
            (m - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Whether every coverage curve is non-increasing over `grid_db`.
pub fn coverage_monotone(cfg: &NetworkConfig, grid_db: &[f64]) -> bool {
    LinkType::ALL.iter().all(|&l| {
        let p: Vec<f64> = grid_db
            .iter()
            .map(|&db| coverage(l, 10f64.powf(db / 10.0), cfg).unwrap())
            .collect();
        p.windows(2).all(|w| w[1] <= w[0] + 1e-12) && p.iter().all(|x| (0.0..=1.0).contains(x))
    })
}

/// Relative gap between the spectral efficiency and ∫ P[SINR > e^ζ − 1] dζ.
pub fn se_ccdf_error(cfg: &NetworkConfig, link: LinkType) -> f64 {
    let se = spectral_efficiency(link, cfg).unwrap();
    let by_ccdf = integrate_semi_infinite(
        |z| {
            if z > 700.0 {
                0.0
            } else {
                coverage(link, z.exp_m1().max(1e-300), cfg).unwrap()
            }
        },
        &QuadratureSpec::default(),
    )
    .unwrap()
    .value;
    rel(by_ccdf, se)
}

/// |H(4, z) − atan(√z)/√z|.
pub fn hyp_alpha4_error(z: f64) -> f64 {
    let exact = z.sqrt().atan() / z.sqrt();
    (hyp_geom_factor(4.0, z).unwrap() - exact).abs()
}

/// Both architectures' costs at speed `v` and `k·v`, as (D(kv), k·D(v)) pairs.
pub fn cost_pairs(cfg: &ModelConfig, v: f64, k: f64) -> [(f64, f64); 2] {
    let at = |s: f64| {
        let mut c = *cfg;
        c.mobility.velocity = s;
        (
            conventional_cost(&c).unwrap().value,
            split_cost(&c).unwrap().value,
        )
    };
    let (c1, s1) = at(v);
    let (ck, sk) = at(k * v);
    [(ck, k * c1), (sk, k * s1)]
}

pub fn moving(network: NetworkConfig, v_kmh: f64) -> ModelConfig {
    let mut c = ModelConfig {
        network,
        ..ModelConfig::default()
    };
    c.mobility.velocity = kmh(v_kmh);
    c
}

/// Two runs with the same seed agree bit for bit.
pub fn simulation_is_deterministic(cfg: &NetworkConfig, seed: u64) -> bool {
    let spec = SimulationSpec {
        window_side: 30e3,
        realizations: 6,
        points_per_segment: 40,
        rng_seed: seed,
        ..SimulationSpec::default()
    };
    let a = simulate(cfg, &spec).unwrap();
    let b = simulate(cfg, &spec).unwrap();
    let bits = |r: &hetnet_cpup::montecarlo::MonteCarloRun| -> Vec<u64> {
        r.pooled
            .samples
            .iter()
            .flatten()
            .map(|x| x.to_bits())
            .collect()
    };
    bits(&a) == bits(&b)
        && a.pooled.counts == b.pooled.counts
        && a.pooled.set_points == b.pooled.set_points
        && a.pooled.length.to_bits() == b.pooled.length.to_bits()
}
