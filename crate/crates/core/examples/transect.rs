//! Exact handover counting along long lines, compared with the rate formula.

use hetnet_cpup::config::units::per_km2;
use hetnet_cpup::mobility::handover_rates;
use hetnet_cpup::montecarlo::{transect_survey, EventClass, TransectSpec};
use hetnet_cpup::NetworkConfig;

fn main() -> hetnet_cpup::Result<()> {
    let cfg = NetworkConfig {
        lambda2: per_km2(10.0),
        ..NetworkConfig::default()
    };
    let survey = transect_survey(&cfg, &TransectSpec::default())?;
    let rates = handover_rates(&cfg)?;
    println!("surveyed {:.0} km", survey.length / 1e3);
    for class in EventClass::ALL {
        let analytic = match class {
            EventClass::Conv(i, j) => rates.conv[i as usize - 1][j as usize - 1],
            EventClass::InterAnchor => rates.inter_anchor,
            EventClass::IntraAnchor => rates.intra_anchor,
        };
        println!(
            "{:<12} {:>8} events  simulated {:.5}/km  analytic {:.5}/km",
            class.name(),
            survey.counts.get(class),
            survey.rate(class) * 1e3,
            analytic * 1e3
        );
    }
    Ok(())
}
