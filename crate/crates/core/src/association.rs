//! Three-set association rule, association probabilities, loads and the
//! conditional service-distance densities.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::config::NetworkConfig;
use crate::error::Result;
use crate::specialfns::{integrate, integrate_semi_infinite_scaled, QuadratureSpec};

/// Users per BS scale factor of the load model.
pub const LOAD_FACTOR: f64 = 1.28;

/// Which set a location belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AssociationSet {
    /// Served by the macro tier.
    Set1,
    /// Served by a small cell without the help of the bias.
    Set2,
    /// Served by a small cell only because of the bias.
    SetB,
}

impl AssociationSet {
    pub const ALL: [AssociationSet; 3] = [Self::Set1, Self::Set2, Self::SetB];

    /// Serving tier, 1 or 2.
    pub fn tier(self) -> usize {
        match self {
            Self::Set1 => 1,
            Self::Set2 | Self::SetB => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Set1 => "set1",
            Self::Set2 => "set2",
            Self::SetB => "setB",
        }
    }
}

/// Classify a location from its distances to the nearest BS of each tier.
///
/// Ties on the biased boundary go to the macro tier. `r2 = ∞` (no small
/// cell at all) lands in `Set1`.
pub fn classify(r1: f64, r2: f64, cfg: &NetworkConfig) -> AssociationSet {
    let s1 = cfg.p1 * r1.powf(-cfg.alpha1);
    let s2 = cfg.p2 * r2.powf(-cfg.alpha2);
    if s1 >= cfg.bias * s2 {
        AssociationSet::Set1
    } else if s2 > s1 {
        AssociationSet::Set2
    } else {
        AssociationSet::SetB
    }
}

/// Fractions of the plane served by each set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssociationProbabilities {
    pub a1: f64,
    pub a2: f64,
    pub a_b: f64,
}

impl AssociationProbabilities {
    pub fn get(&self, set: AssociationSet) -> f64 {
        match set {
            AssociationSet::Set1 => self.a1,
            AssociationSet::Set2 => self.a2,
            AssociationSet::SetB => self.a_b,
        }
    }

    pub fn sum(&self) -> f64 {
        self.a1 + self.a2 + self.a_b
    }
}

/// Association probabilities; closed form when both exponents are 4.
pub fn association_probabilities(cfg: &NetworkConfig) -> Result<AssociationProbabilities> {
    cfg.validate()?;
    if cfg.is_alpha4() {
        Ok(closed_probabilities(cfg))
    } else {
        integral_probabilities(cfg)
    }
}

/// The general-exponent path, regardless of the exponents.
pub fn association_probabilities_integral(cfg: &NetworkConfig) -> Result<AssociationProbabilities> {
    cfg.validate()?;
    integral_probabilities(cfg)
}

fn closed_probabilities(cfg: &NetworkConfig) -> AssociationProbabilities {
    let r = cfg.derived_ratios();
    let (l1, l2) = (cfg.lambda1, cfg.lambda2);
    let a1 = l1 / (l1 + l2 * r.p21_tilde.sqrt());
    let a2 = l2 / (l1 * r.p12.sqrt() + l2);
    // difference of the two Set2-style fractions, combined to avoid cancellation
    let (s, st) = (r.p12.sqrt(), r.p12_tilde.sqrt());
    let a_b = l2 * l1 * (s - st) / ((l1 * st + l2) * (l1 * s + l2));
    AssociationProbabilities { a1, a2, a_b }
}

fn integral_probabilities(cfg: &NetworkConfig) -> Result<AssociationProbabilities> {
    let mass = |link| -> Result<f64> { Kernel::new(link, cfg).mass() };
    Ok(AssociationProbabilities {
        a1: mass(DistanceLink::R1)?,
        a2: mass(DistanceLink::R2)?,
        a_b: mass(DistanceLink::RB)?,
    })
}

/// Mean number of users sharing a serving BS, typical user included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoadEstimates {
    pub n1: f64,
    pub n2: f64,
    pub n_b: f64,
}

impl LoadEstimates {
    pub fn get(&self, set: AssociationSet) -> f64 {
        match set {
            AssociationSet::Set1 => self.n1,
            AssociationSet::Set2 => self.n2,
            AssociationSet::SetB => self.n_b,
        }
    }
}

pub fn loads(cfg: &NetworkConfig) -> Result<LoadEstimates> {
    let a = association_probabilities(cfg)?;
    Ok(loads_from(&a, cfg))
}

/// Loads for already computed association probabilities.
pub fn loads_from(a: &AssociationProbabilities, cfg: &NetworkConfig) -> LoadEstimates {
    let n = |aj: f64, lambda: f64| LOAD_FACTOR * cfg.lambda_u * aj / lambda + 1.0;
    LoadEstimates {
        n1: n(a.a1, cfg.lambda1),
        n2: n(a.a2, cfg.lambda2),
        n_b: n(a.a_b, cfg.lambda2),
    }
}

/// The five service distances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DistanceLink {
    /// Macro user to its MBS.
    R1,
    /// Unbiased small-cell user to its SBS.
    R2,
    /// Biased small-cell user to its SBS.
    RB,
    /// Unbiased small-cell user to the MBS carrying its control plane.
    Rc2,
    /// Biased small-cell user to the MBS carrying its control plane.
    RcB,
}

impl DistanceLink {
    pub const ALL: [DistanceLink; 5] = [Self::R1, Self::R2, Self::RB, Self::Rc2, Self::RcB];

    /// The association set the density is conditioned on.
    pub fn set(self) -> AssociationSet {
        match self {
            Self::R1 => AssociationSet::Set1,
            Self::R2 | Self::Rc2 => AssociationSet::Set2,
            Self::RB | Self::RcB => AssociationSet::SetB,
        }
    }
}

/// Unnormalized density 2πλ r (e^{−π(a r² + b⁺ rᵠ)} − e^{−π(a r² + b⁻ rᵠ)}),
/// the second exponential dropped when `b_minus` is `None`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Kernel {
    lambda: f64,
    a: f64,
    q: f64,
    b_plus: f64,
    b_minus: Option<f64>,
}

impl Kernel {
    fn new(link: DistanceLink, cfg: &NetworkConfig) -> Self {
        let r = cfg.derived_ratios();
        let (l1, l2, a1, a2) = (cfg.lambda1, cfg.lambda2, cfg.alpha1, cfg.alpha2);
        // Distances measured to a tier-1 BS see tier-2 boundaries at c·r^{α1/α2}
        // and vice versa.
        let q1 = 2.0 * a1 / a2;
        let q2 = 2.0 * a2 / a1;
        match link {
            DistanceLink::R1 => Kernel {
                lambda: l1,
                a: l1,
                q: q1,
                b_plus: l2 * r.p21_tilde.powf(2.0 / a2),
                b_minus: None,
            },
            DistanceLink::R2 => Kernel {
                lambda: l2,
                a: l2,
                q: q2,
                b_plus: l1 * r.p12.powf(2.0 / a1),
                b_minus: None,
            },
            DistanceLink::RB => Kernel {
                lambda: l2,
                a: l2,
                q: q2,
                b_plus: l1 * r.p12_tilde.powf(2.0 / a1),
                b_minus: Some(l1 * r.p12.powf(2.0 / a1)),
            },
            DistanceLink::Rc2 => Kernel {
                lambda: l1,
                a: l1,
                q: q1,
                b_plus: 0.0,
                b_minus: Some(l2 * r.p21.powf(2.0 / a2)),
            },
            DistanceLink::RcB => Kernel {
                lambda: l1,
                a: l1,
                q: q1,
                b_plus: l2 * r.p21.powf(2.0 / a2),
                b_minus: Some(l2 * r.p21_tilde.powf(2.0 / a2)),
            },
        }
    }

    fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 || !r.is_finite() {
            return 0.0;
        }
        let rq = r.powf(self.q);
        let base = self.a * r * r;
        // a zero weight must not meet an overflowed rᵠ
        let tail = |b: f64| if b == 0.0 { base } else { base + b * rq };
        let plus = (-PI * tail(self.b_plus)).exp();
        let minus = self.b_minus.map_or(0.0, |b| (-PI * tail(b)).exp());
        2.0 * PI * self.lambda * r * (plus - minus)
    }

    fn scale(&self) -> f64 {
        1.0 / (PI * self.a).sqrt()
    }

    // ∫₀^∞ eval. With q = 2 every term is a Rayleigh integral.
    fn mass(&self) -> Result<f64> {
        if self.q == 2.0 {
            let term = |b: f64| self.lambda / (self.a + b);
            return Ok(term(self.b_plus) - self.b_minus.map_or(0.0, term));
        }
        let spec = QuadratureSpec::default()
            .with_rel_tol(1e-12)
            .with_abs_tol(1e-15);
        Ok(integrate_semi_infinite_scaled(|r| self.eval(r), self.scale(), &spec)?.value)
    }

    fn partial_mass(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        if self.q == 2.0 {
            let term = |b: f64| self.lambda / (self.a + b) * -(-PI * (self.a + b) * x * x).exp_m1();
            return Ok(term(self.b_plus) - self.b_minus.map_or(0.0, term));
        }
        let spec = QuadratureSpec::default()
            .with_rel_tol(1e-12)
            .with_abs_tol(1e-15);
        Ok(integrate(|r| self.eval(r), 0.0, x, &spec)?.value)
    }
}

/// Conditional density of a service distance (per metre).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistancePdf {
    link: DistanceLink,
    kernel: Kernel,
    norm: f64,
}

impl DistancePdf {
    pub fn link(&self) -> DistanceLink {
        self.link
    }

    /// Density at distance `r` (metres); zero when the set is empty.
    pub fn evaluate(&self, r: f64) -> f64 {
        if self.norm == 0.0 {
            return 0.0;
        }
        self.kernel.eval(r) / self.norm
    }

    /// P[R ≤ x].
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if self.norm == 0.0 {
            return Ok(0.0);
        }
        Ok((self.kernel.partial_mass(x)? / self.norm).clamp(0.0, 1.0))
    }

    /// Characteristic length of the density, a hint for quadrature.
    pub fn scale(&self) -> f64 {
        self.kernel.scale()
    }

    /// The association probability the density is normalized by.
    pub fn normalizer(&self) -> f64 {
        self.norm
    }
}

pub fn distance_pdf(link: DistanceLink, cfg: &NetworkConfig) -> Result<DistancePdf> {
    let a = association_probabilities(cfg)?;
    Ok(distance_pdf_with(link, cfg, &a))
}

/// Density normalized by the supplied association probabilities.
pub fn distance_pdf_with(
    link: DistanceLink,
    cfg: &NetworkConfig,
    a: &AssociationProbabilities,
) -> DistancePdf {
    DistancePdf {
        link,
        kernel: Kernel::new(link, cfg),
        norm: a.get(link.set()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::units::per_km2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn defaults() -> NetworkConfig {
        NetworkConfig::default()
    }

    #[test]
    fn nearest_bs_under_symmetry() {
        let cfg = NetworkConfig {
            p2: 50.0,
            bias: 1.0,
            ..defaults()
        };
        assert_eq!(classify(10.0, 20.0, &cfg), AssociationSet::Set1);
        assert_eq!(classify(20.0, 10.0, &cfg), AssociationSet::Set2);
    }

    #[test]
    fn equal_distance_defaults_is_biased() {
        assert_eq!(classify(100.0, 100.0, &defaults()), AssociationSet::SetB);
    }

    #[test]
    fn biased_boundary_goes_to_macro() {
        let cfg = defaults();
        // P1 r1^-4 = B P2 r2^-4  ⇔  r1 = r2 (P1/(B P2))^{1/4}; pick values that are exact.
        let cfg = NetworkConfig {
            p1: 30.0,
            p2: 1.0,
            ..cfg
        };
        assert_eq!(classify(100.0, 100.0, &cfg), AssociationSet::Set1);
        assert_eq!(classify(100.0, 99.0, &cfg), AssociationSet::SetB);
    }

    #[test]
    fn no_small_cell_means_macro() {
        assert_eq!(
            classify(5e3, f64::INFINITY, &defaults()),
            AssociationSet::Set1
        );
    }

    #[test]
    fn closed_form_a1_at_defaults() {
        let a = association_probabilities(&defaults()).unwrap();
        let expected = 2.0 / (2.0 + 50.0 * 3f64.sqrt());
        assert!((a.a1 - expected).abs() < 1e-12);
        assert!((a.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unit_bias_empties_biased_set() {
        let cfg = NetworkConfig {
            bias: 1.0,
            ..defaults()
        };
        let a = association_probabilities(&cfg).unwrap();
        assert!(a.a_b.abs() < 1e-15);
        let a = association_probabilities_integral(&cfg).unwrap();
        assert!(a.a_b.abs() < 1e-12);
    }

    #[test]
    fn vanishing_small_tier() {
        let cfg = NetworkConfig {
            lambda2: per_km2(1e-9),
            ..defaults()
        };
        let a = association_probabilities(&cfg).unwrap();
        assert!((a.a1 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn closed_matches_integral() {
        for l2 in [1.0, 10.0, 50.0, 150.0] {
            let cfg = NetworkConfig {
                lambda2: per_km2(l2),
                ..defaults()
            };
            let c = closed_probabilities(&cfg);
            // force the quadrature path by nudging q away from 2 is not possible;
            // integrate the q = 2 kernels numerically instead
            let i = |link| {
                let k = Kernel::new(link, &cfg);
                let spec = QuadratureSpec::default()
                    .with_rel_tol(1e-12)
                    .with_abs_tol(1e-15);
                integrate_semi_infinite_scaled(|r| k.eval(r), k.scale(), &spec)
                    .unwrap()
                    .value
            };
            for (x, y) in [
                (c.a1, i(DistanceLink::R1)),
                (c.a2, i(DistanceLink::R2)),
                (c.a_b, i(DistanceLink::RB)),
            ] {
                assert!(((x - y) / x).abs() < 1e-6, "l2 {l2}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn general_alpha_sums_to_one() {
        let cfg = NetworkConfig {
            alpha1: 3.5,
            alpha2: 4.2,
            ..defaults()
        };
        let a = association_probabilities(&cfg).unwrap();
        assert!((a.sum() - 1.0).abs() < 1e-9, "{}", a.sum());
    }

    #[test]
    fn loads_lone_user() {
        let cfg = NetworkConfig {
            lambda_u: 0.0,
            ..defaults()
        };
        let n = loads(&cfg).unwrap();
        assert_eq!((n.n1, n.n2, n.n_b), (1.0, 1.0, 1.0));
    }

    #[test]
    fn loads_at_defaults() {
        let n = loads(&defaults()).unwrap();
        let expected = 1.28 * 50.0 / (2.0 + 50.0 * 3f64.sqrt()) + 1.0;
        assert!((n.n1 - expected).abs() < 1e-12);
    }

    #[test]
    fn loads_linear_in_user_density() {
        let cfg = defaults();
        let n = loads(&cfg).unwrap();
        let m = loads(&NetworkConfig {
            lambda_u: 2.0 * cfg.lambda_u,
            ..cfg
        })
        .unwrap();
        for (x, y) in [(n.n1, m.n1), (n.n2, m.n2), (n.n_b, m.n_b)] {
            assert!((2.0 * (x - 1.0) - (y - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn pdfs_normalize() {
        for cfg in [
            defaults(),
            NetworkConfig {
                alpha1: 3.2,
                alpha2: 3.8,
                ..defaults()
            },
        ] {
            for link in DistanceLink::ALL {
                let pdf = distance_pdf(link, &cfg).unwrap();
                let spec = QuadratureSpec::default();
                let m = integrate_semi_infinite_scaled(|r| pdf.evaluate(r), pdf.scale(), &spec)
                    .unwrap()
                    .value;
                assert!((m - 1.0).abs() < 1e-7, "{link:?}: {m}");
            }
        }
    }

    #[test]
    fn steep_macro_exponent_stays_finite() {
        let cfg = NetworkConfig {
            lambda1: per_km2(0.5),
            lambda2: per_km2(0.1),
            p1: 10.0,
            p2: 0.5,
            alpha1: 4.8,
            alpha2: 3.0,
            bias: 1.0,
            ..defaults()
        };
        for link in DistanceLink::ALL {
            let pdf = distance_pdf(link, &cfg).unwrap();
            assert_eq!(pdf.evaluate(f64::INFINITY), 0.0);
            assert!(pdf.evaluate(1e200).is_finite());
        }
    }

    #[test]
    fn r1_single_tier_limit_is_rayleigh() {
        let cfg = NetworkConfig {
            lambda2: per_km2(1e-12),
            ..defaults()
        };
        let pdf = distance_pdf(DistanceLink::R1, &cfg).unwrap();
        let l1 = cfg.lambda1;
        for r in [50.0, 200.0, 400.0, 900.0] {
            let ray = 2.0 * PI * l1 * r * (-PI * l1 * r * r).exp();
            assert!(((pdf.evaluate(r) - ray) / ray).abs() < 1e-6);
        }
    }

    #[test]
    fn control_distance_matches_sampling() {
        // Nearest-BS distances of independent PPPs are Rayleigh; condition on Set2.
        let cfg = defaults();
        let pdf = distance_pdf(DistanceLink::Rc2, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ray = |rng: &mut ChaCha8Rng, l: f64| {
            let u: f64 = rng.random();
            (-(1.0 - u).ln() / (PI * l)).sqrt()
        };
        let mut xs = Vec::new();
        while xs.len() < 100_000 {
            let r1 = ray(&mut rng, cfg.lambda1);
            let r2 = ray(&mut rng, cfg.lambda2);
            if classify(r1, r2, &cfg) == AssociationSet::Set2 {
                xs.push(r1);
            }
        }
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let mut ks: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let f = pdf.cdf(x).unwrap();
            ks = ks
                .max((f - i as f64 / n).abs())
                .max((f - (i + 1) as f64 / n).abs());
        }
        assert!(ks < 0.01, "KS distance {ks}");
    }

    #[test]
    fn cdf_general_alpha_reaches_one() {
        let cfg = NetworkConfig {
            alpha1: 3.6,
            ..defaults()
        };
        let pdf = distance_pdf(DistanceLink::RcB, &cfg).unwrap();
        assert!((pdf.cdf(2e4).unwrap() - 1.0).abs() < 1e-7);
    }
}
