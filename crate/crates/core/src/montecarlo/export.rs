//! CSV export of traces and empirical CCDFs.

use std::io::Write;

use super::{EmpiricalCcdf, TrajectoryTrace};
use crate::config::units::to_db;
use crate::coverage::LinkType;

/// Written where a value does not exist for a row.
pub const MISSING: &str = "na";

/// One row per trajectory point: position, tag, identities, SINR per link
/// in dB and the events that fired on arrival at the point.
pub fn write_trace_csv<W: Write>(mut w: W, trace: &TrajectoryTrace) -> std::io::Result<()> {
    write!(w, "index,x_m,y_m,tag,anchor,serving_tier,serving_index")?;
    for l in LinkType::ALL {
        write!(w, ",{}_db", l.name())?;
    }
    writeln!(w, ",events")?;
    let mut e = trace.events.iter().peekable();
    for (i, p) in trace.points.iter().enumerate() {
        write!(
            w,
            "{i},{:.3},{:.3},{},{},{},{}",
            p.position[0],
            p.position[1],
            p.tag.label(),
            p.anchor,
            p.serving.tier,
            p.serving.index
        )?;
        for s in p.sinr {
            match s.map(to_db).filter(|x| x.is_finite()) {
                Some(db) => write!(w, ",{db:.4}")?,
                None => write!(w, ",{MISSING}")?,
            }
        }
        let mut names = Vec::new();
        while let Some(ev) = e.next_if(|ev| ev.index == i) {
            names.push(ev.class.name());
        }
        if names.is_empty() {
            writeln!(w, ",none")?;
        } else {
            writeln!(w, ",{}", names.join("|"))?;
        }
    }
    Ok(())
}

pub fn write_ccdf_csv<W: Write>(mut w: W, ccdf: &EmpiricalCcdf) -> std::io::Result<()> {
    writeln!(w, "theta_db,fraction,n")?;
    for (t, f) in ccdf.thresholds_db.iter().zip(&ccdf.fractions) {
        writeln!(w, "{t},{f:.6},{}", ccdf.sample_count)?;
    }
    Ok(())
}
