use std::fmt::Write;

use num_complex::Complex64;

use super::job::GridSpec;
use super::report::Report;
use crate::error::Result;
use crate::qpoly::QuasiWave;
use crate::sextic::RationalPotential;

enum Column {
    Potential { name: String, v: RationalPotential, poles: Vec<f64>, real: bool },
    Wave { name: String, f: QuasiWave, poles: Vec<f64> },
}

fn hole(x: f64, poles: &[f64], h: f64) -> bool {
    poles.iter().any(|t| (x - t.sqrt()).abs() <= 0.5 * h)
}

fn cell(value: Option<f64>) -> String {
    value.filter(|v| v.is_finite()).map_or(String::new(), |v| v.to_string())
}

/// CSV table of the report's potentials and states on the job grid.
///
/// Real potentials take one column, non-real potentials and all states take
/// a Re/Im pair. A cell within half a grid spacing of a pole is left empty.
pub fn sample_grid(grid: &GridSpec, report: &Report) -> Result<String> {
    let a = report.job.model.a;
    let mut columns = Vec::new();
    for p in &report.potentials {
        columns.push(Column::Potential {
            name: p.name.clone(),
            v: p.potential()?,
            poles: p.poles.clone(),
            real: p.real,
        });
    }
    for s in &report.states {
        let f = s.wave(a)?;
        let poles = f
            .den()
            .factors()
            .iter()
            .filter(|(r, _)| r.re > 1e-8 && r.im.abs() < 1e-8)
            .map(|(r, _)| r.re)
            .collect();
        columns.push(Column::Wave { name: s.name.clone(), f, poles });
    }

    let mut header = vec!["x".to_string()];
    for c in &columns {
        match c {
            Column::Potential { name, real: true, .. } => header.push(name.clone()),
            Column::Potential { name, .. } | Column::Wave { name, .. } => {
                header.push(format!("Re {name}"));
                header.push(format!("Im {name}"));
            }
        }
    }
    let mut out = header.join(",");
    out.push('\n');

    let h = grid.spacing();
    for x in grid.xs() {
        let mut row = vec![x.to_string()];
        for c in &columns {
            let (value, poles, split): (Option<Complex64>, &[f64], bool) = match c {
                Column::Potential { v, poles, real, .. } => (v.eval(x).ok(), poles, !real),
                Column::Wave { f, poles, .. } => (f.eval(x).ok(), poles, true),
            };
            let value = if hole(x, poles, h) { None } else { value };
            row.push(cell(value.map(|z| z.re)));
            if split {
                row.push(cell(value.map(|z| z.im)));
            }
        }
        let _ = writeln!(out, "{}", row.join(","));
    }
    Ok(out)
}
