//! Table builders behind the subcommands.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::file::Units;
use super::table::{Cell, Table};
use crate::config::units::to_per_km2;
use crate::config::ModelConfig;
use crate::coverage::{coverage, coverage_curve, LinkType};
use crate::error::{Error, Result};
use crate::mobility::{handover_rates, HandoverRates};
use crate::throughput::{breaking_density, evaluate, Evaluation};

/// Quantities a table can carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Coverage,
    Se,
    Throughput,
    Handover,
    Feasibility,
}

impl Output {
    pub const ALL: [Output; 5] = [
        Self::Coverage,
        Self::Se,
        Self::Throughput,
        Self::Handover,
        Self::Feasibility,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Coverage => "coverage",
            Self::Se => "se",
            Self::Throughput => "throughput",
            Self::Handover => "handover",
            Self::Feasibility => "feasibility",
        }
    }
}

/// Parameters a sweep can vary, in the CLI's external units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum SweepParam {
    /// Small-cell density.
    #[value(name = "lambda2")]
    Lambda2,
    #[value(name = "velocity")]
    Velocity,
    /// X2 availability, applied to conventional and inter-anchor handovers alike.
    #[value(name = "probX2", alias = "prob-x2")]
    ProbX2,
    #[value(name = "gamma")]
    Gamma,
    #[value(name = "bias")]
    Bias,
    #[value(name = "w1")]
    W1,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            Self::Lambda2 => "lambda2",
            Self::Velocity => "velocity",
            Self::ProbX2 => "probX2",
            Self::Gamma => "gamma",
            Self::Bias => "bias",
            Self::W1 => "w1",
        }
    }

    /// `base` with this parameter set to `x` (external units).
    pub fn apply(self, base: &ModelConfig, x: f64, units: Units) -> ModelConfig {
        let mut c = *base;
        match self {
            Self::Lambda2 => c.network.lambda2 = units.density(x),
            Self::Velocity => c.mobility.velocity = units.speed(x),
            Self::ProbX2 => {
                c.mobility.prob_x2_conv = x;
                c.mobility.prob_x2_split = x;
            }
            Self::Gamma => c.split.gamma = x,
            Self::Bias => c.network.bias = x,
            Self::W1 => c.split.w1 = units.bandwidth(x),
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweepParam,
    pub grid: Vec<f64>,
    pub outputs: Vec<Output>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Domain("sweep grid is empty".into()));
        }
        if self.grid.iter().any(|x| !x.is_finite()) || self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain(
                "sweep grid must be finite and strictly increasing".into(),
            ));
        }
        if self.outputs.is_empty() {
            return Err(Error::Domain("no outputs requested".into()));
        }
        Ok(())
    }
}

/// Parse `start:step:stop` (inclusive) or a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Domain(format!("cannot parse grid '{spec}'"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let grid = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [a, step, b] = parts.as_slice() else {
            return Err(bad());
        };
        let (a, step, b) = (num(a)?, num(step)?, num(b)?);
        if !(step > 0.0) || b < a {
            return Err(bad());
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        (0..=n).map(|k| a + k as f64 * step).collect()
    } else {
        spec.split(',').map(num).collect::<Result<Vec<_>>>()?
    };
    if grid.is_empty()
        || grid.iter().any(|x| !x.is_finite())
        || grid.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::Domain(format!(
            "grid '{spec}' must be finite and strictly increasing"
        )));
    }
    Ok(grid)
}

fn rate_scale(units: Units) -> f64 {
    match units {
        Units::Si => 1.0,
        Units::Paper => 1e3,
    }
}

fn handover_columns() -> Vec<String> {
    ["ho11", "ho12", "ho21", "ho22", "mho", "vho", "vho_clamped"]
        .map(String::from)
        .to_vec()
}

fn handover_cells(r: &HandoverRates, units: Units) -> Vec<Cell> {
    let s = rate_scale(units);
    vec![
        Cell::Num(r.conv[0][0] * s),
        Cell::Num(r.conv[0][1] * s),
        Cell::Num(r.conv[1][0] * s),
        Cell::Num(r.conv[1][1] * s),
        Cell::Num(r.inter_anchor * s),
        Cell::Num(r.intra_anchor * s),
        Cell::Bool(r.intra_clamped),
    ]
}

fn throughput_columns() -> Vec<String> {
    [
        "a1",
        "a2",
        "a_b",
        "n1",
        "n2",
        "n_b",
        "t1_conv",
        "t2_conv",
        "tb_conv",
        "t1_split",
        "t2_split",
        "tb_split",
        "cost_conv",
        "cost_split",
        "at_conv",
        "at_split",
        "macro_user_split",
    ]
    .map(String::from)
    .to_vec()
}

fn throughput_cells(e: &Evaluation) -> Vec<Cell> {
    let user = |u: &crate::throughput::UserThroughput| {
        if u.saturated {
            Cell::Marker("saturated")
        } else {
            Cell::Num(u.value)
        }
    };
    let t1_split = if e.split.t1_clamped {
        Cell::Marker("infeasible")
    } else {
        Cell::Num(e.split.t1)
    };
    vec![
        Cell::Num(e.association.a1),
        Cell::Num(e.association.a2),
        Cell::Num(e.association.a_b),
        Cell::Num(e.loads.n1),
        Cell::Num(e.loads.n2),
        Cell::Num(e.loads.n_b),
        Cell::Num(e.conventional.t1),
        Cell::Num(e.conventional.t2),
        Cell::Num(e.conventional.t_b),
        t1_split,
        Cell::Num(e.split.t2),
        Cell::Num(e.split.t_b),
        Cell::Num(e.cost_conventional.value),
        Cell::Num(e.cost_split.value),
        user(&e.user_conventional),
        user(&e.user_split),
        Cell::Num(e.split_macro_user_rate()),
    ]
}

fn feasibility_columns() -> Vec<String> {
    ["lhs", "rhs", "margin", "feasible"]
        .map(String::from)
        .to_vec()
}

fn feasibility_cells(e: &Evaluation) -> Vec<Cell> {
    let f = &e.feasibility;
    vec![
        Cell::Num(f.lhs),
        Cell::Num(f.rhs),
        Cell::Num(f.margin),
        Cell::Bool(f.feasible),
    ]
}

/// Columns and values of the scalar outputs at one configuration.
fn scalar_metrics(
    cfg: &ModelConfig,
    outputs: &[Output],
    units: Units,
) -> Result<(Vec<String>, Vec<Cell>)> {
    let mut cols = Vec::new();
    let mut cells = Vec::new();
    // Handover rates alone tolerate an empty small tier; the rest need a full evaluation.
    let needs_eval = outputs.iter().any(|o| !matches!(o, Output::Handover));
    let eval = if needs_eval {
        Some(evaluate(cfg)?)
    } else {
        None
    };
    for o in outputs {
        match o {
            Output::Coverage => {
                for l in LinkType::ALL {
                    cols.push(format!("cov0db_{}", l.name()));
                    cells.push(Cell::Num(coverage(l, 1.0, &cfg.network)?));
                }
            }
            Output::Se => {
                let e = eval.as_ref().expect("evaluated");
                for l in LinkType::ALL {
                    cols.push(format!("se_{}", l.name()));
                    cells.push(Cell::Num(e.spectral_efficiency.get(l)));
                }
            }
            Output::Throughput => {
                cols.extend(throughput_columns());
                cells.extend(throughput_cells(eval.as_ref().expect("evaluated")));
            }
            Output::Handover => {
                cols.extend(handover_columns());
                match eval.as_ref().map(|e| e.handover) {
                    Some(Some(r)) => cells.extend(handover_cells(&r, units)),
                    Some(None) => cells.extend(std::iter::repeat_n(Cell::Marker("undefined"), 7)),
                    None => cells.extend(handover_cells(&handover_rates(&cfg.network)?, units)),
                }
            }
            Output::Feasibility => {
                cols.extend(feasibility_columns());
                cells.extend(feasibility_cells(eval.as_ref().expect("evaluated")));
            }
        }
    }
    Ok((cols, cells))
}

/// Coverage CCDFs of every link on a dB grid.
pub fn coverage_table(cfg: &ModelConfig, grid_db: &[f64]) -> Result<Table> {
    let curves = LinkType::ALL
        .iter()
        .map(|&l| coverage_curve(l, grid_db, &cfg.network))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(
        std::iter::once("theta_db".to_string())
            .chain(LinkType::ALL.iter().map(|l| l.name().to_string())),
    );
    for (k, th) in grid_db.iter().enumerate() {
        let mut row = vec![Cell::Num(*th)];
        row.extend(curves.iter().map(|c| Cell::Num(c.probabilities[k])));
        t.push(row);
    }
    Ok(t)
}

pub fn se_table(cfg: &ModelConfig) -> Result<Table> {
    let e = evaluate(cfg)?;
    let mut t = Table::new(["link", "se_nats_per_hz"]);
    for l in LinkType::ALL {
        t.push(vec![
            Cell::Text(l.name().into()),
            Cell::Num(e.spectral_efficiency.get(l)),
        ]);
    }
    Ok(t)
}

/// `(file stem, table)` for each requested analytic output.
pub fn analyze_tables(
    cfg: &ModelConfig,
    outputs: &[Output],
    grid_db: &[f64],
    units: Units,
) -> Result<Vec<(String, Table)>> {
    let mut out = Vec::new();
    for &o in outputs {
        let table = match o {
            Output::Coverage => coverage_table(cfg, grid_db)?,
            Output::Se => se_table(cfg)?,
            _ => {
                let (cols, cells) = scalar_metrics(cfg, &[o], units)?;
                let mut t = Table::new(cols);
                t.push(cells);
                t
            }
        };
        out.push((o.name().to_string(), table));
    }
    Ok(out)
}

/// Gap AT⁽ˢ⁾ − AT⁽ᶜ⁾ of the mobility-aware user throughputs.
fn split_advantage(cfg: &ModelConfig) -> Result<f64> {
    let e = evaluate(cfg)?;
    Ok(e.user_split.value - e.user_conventional.value)
}

/// Parameter values in `grid` where AT⁽ˢ⁾ − AT⁽ᶜ⁾ changes sign, each
/// refined by bisection to 1% relative (at most 60 halvings).
pub fn find_crossovers(
    base: &ModelConfig,
    param: SweepParam,
    grid: &[f64],
    units: Units,
) -> Result<Vec<f64>> {
    let gaps = grid
        .par_iter()
        .map(|&x| split_advantage(&param.apply(base, x, units)))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for k in 1..grid.len() {
        // zero counts as non-negative
        let sa = gaps[k - 1] < 0.0;
        if sa == (gaps[k] < 0.0) {
            continue;
        }
        let (mut a, mut b) = (grid[k - 1], grid[k]);
        for _ in 0..60 {
            if (b - a).abs() <= 0.01 * a.abs().max(b.abs()) * 0.5 {
                break;
            }
            let mid = 0.5 * (a + b);
            if (split_advantage(&param.apply(base, mid, units))? < 0.0) == sa {
                a = mid;
            } else {
                b = mid;
            }
        }
        out.push(0.5 * (a + b));
    }
    Ok(out)
}

/// One row per grid value with every requested output.
pub fn sweep_table(
    base: &ModelConfig,
    spec: &SweepSpec,
    units: Units,
    crossover: bool,
) -> Result<Table> {
    spec.validate()?;
    let rows = spec
        .grid
        .par_iter()
        .map(|&x| scalar_metrics(&spec.parameter.apply(base, x, units), &spec.outputs, units))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(
        std::iter::once(spec.parameter.name().to_string()).chain(rows[0].0.iter().cloned()),
    );
    for (x, (_, cells)) in spec.grid.iter().zip(rows) {
        let mut row = vec![Cell::Num(*x)];
        row.extend(cells);
        t.push(row);
    }
    if crossover {
        let xs = find_crossovers(base, spec.parameter, &spec.grid, units)?;
        let text = if xs.is_empty() {
            "none".to_string()
        } else {
            xs.iter()
                .map(|x| format!("{x:.4}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        t.notes
            .push((format!("crossover_{}", spec.parameter.name()), text));
    }
    Ok(t)
}

/// Breaking small-cell density of the split for each control-reduction factor.
pub fn feasibility_table(base: &ModelConfig, gammas: &[f64], units: Units) -> Result<Table> {
    let (lo, hi) = (Units::Paper.density(1e-2), Units::Paper.density(1e4));
    let rows = gammas
        .par_iter()
        .map(|&g| {
            let mut c = *base;
            c.split.gamma = g;
            breaking_density(&c, lo, hi, 0.01)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(["gamma", "lambda2_star"]);
    for (g, r) in gammas.iter().zip(rows) {
        let cell = match r {
            Some(l) => Cell::Num(match units {
                Units::Si => l,
                Units::Paper => to_per_km2(l),
            }),
            None => Cell::Marker("none"),
        };
        t.push(vec![Cell::Num(*g), cell]);
    }
    t.notes
        .push(("bracket_lambda2_per_km2".into(), "0.01:10000".into()));
    Ok(t)
}
