//! Gnuplot scripts for the CSV reports. Nothing is rendered here.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use kgh_core::propagator::fit_slope;

use crate::CliError;

/// One curve: label, points, and whether both axes are logarithmic.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub label: String,
    pub xlabel: String,
    pub ylabel: String,
    pub points: Vec<(f64, f64)>,
    pub loglog: bool,
}

fn column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h == name)
}

fn number(rec: &csv::StringRecord, idx: usize, line: usize) -> Result<f64, CliError> {
    let raw = rec.get(idx).unwrap_or("");
    raw.trim()
        .parse()
        .map_err(|_| CliError::Config(format!("line {line}: `{raw}` is not a number")))
}

/// Grouping columns, x column (row index when absent), y column, log-log, axis labels.
type Layout<'a> = (Vec<usize>, Option<usize>, usize, bool, &'a str, &'a str);

/// Groups the rows of a report into sweeps according to its header.
pub fn parse_sweeps(text: &str) -> Result<Vec<Sweep>, CliError> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::Config(format!("malformed CSV header: {e}")))?
        .clone();
    let records = reader
        .records()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Config(format!("malformed CSV: {e}")))?;
    let (group_cols, x, y, loglog, xlabel, ylabel): Layout =
        if let (Some(p), Some(h), Some(r), Some(v)) = (
            column(&headers, "probe"),
            column(&headers, "h"),
            column(&headers, "r"),
            column(&headers, "value"),
        ) {
            let slope = records
                .iter()
                .any(|rec| rec.get(p) == Some("precise_strichartz"));
            if slope {
                (vec![p, r], Some(h), v, true, "h", "normalized norm")
            } else {
                (vec![p, r], column(&headers, "j"), v, false, "j", "value")
            }
        } else if let (Some(e), Some(q), Some(j), Some(v)) = (
            column(&headers, "experiment"),
            column(&headers, "quantity"),
            column(&headers, "J"),
            column(&headers, "value"),
        ) {
            (vec![e, q], Some(j), v, false, "J", "value")
        } else if let (Some(p), Some(r)) = (column(&headers, "probe"), column(&headers, "ratio")) {
            (vec![p], None, r, false, "sample", "ratio")
        } else if let (Some(j), Some(t), Some(h1)) = (
            column(&headers, "J"),
            column(&headers, "t"),
            column(&headers, "h1"),
        ) {
            (vec![j], Some(t), h1, false, "t", "H1 discrepancy")
        } else {
            return Err(CliError::Config(format!(
                "unrecognized report header: {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        };
    let mut groups: BTreeMap<Vec<String>, Vec<(f64, f64)>> = BTreeMap::new();
    let mut order: Vec<Vec<String>> = Vec::new();
    for (i, rec) in records.iter().enumerate() {
        let line = i + 2;
        if rec.len() != headers.len() {
            return Err(CliError::Config(format!(
                "line {line}: expected {} fields",
                headers.len()
            )));
        }
        let key: Vec<String> = group_cols.iter().map(|&c| rec[c].to_string()).collect();
        let entry = groups.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            Vec::new()
        });
        let xv = match x {
            Some(c) => number(rec, c, line)?,
            None => entry.len() as f64,
        };
        entry.push((xv, number(rec, y, line)?));
    }
    Ok(order
        .into_iter()
        .map(|key| {
            let mut points = groups.remove(&key).unwrap_or_default();
            if loglog {
                // average repeated trials at each x
                let mut acc: BTreeMap<u64, (f64, f64, usize)> = BTreeMap::new();
                for (xv, yv) in points {
                    let e = acc.entry(xv.to_bits()).or_insert((xv, 0.0, 0));
                    e.1 += yv.ln();
                    e.2 += 1;
                }
                points = acc
                    .into_values()
                    .map(|(xv, s, n)| (xv, (s / n as f64).exp()))
                    .collect();
            }
            Sweep {
                label: key.join(" "),
                xlabel: xlabel.into(),
                ylabel: ylabel.into(),
                points,
                loglog,
            }
        })
        .collect())
}

pub fn script(sweep: &Sweep, data_file: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set title \"{}\"", sweep.label);
    let _ = writeln!(s, "set xlabel \"{}\"", sweep.xlabel);
    let _ = writeln!(s, "set ylabel \"{}\"", sweep.ylabel);
    if sweep.loglog {
        let _ = writeln!(s, "set logscale xy");
        let logs: Vec<(f64, f64)> = sweep.points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
        match fit_slope(&logs) {
            Ok(fit) => {
                let _ = writeln!(
                    s,
                    "fit_line(x) = exp({}) * x**({})",
                    fit.intercept, fit.slope
                );
                let _ = writeln!(
                    s,
                    "plot \"{data_file}\" using 1:2 with points title \"measured\", \\\n     fit_line(x) title \"slope {:.4}\"",
                    fit.slope
                );
            }
            Err(_) => {
                let _ = writeln!(
                    s,
                    "plot \"{data_file}\" using 1:2 with points title \"measured\""
                );
            }
        }
    } else {
        let _ = writeln!(
            s,
            "plot \"{data_file}\" using 1:2 with linespoints title \"{}\"",
            sweep.label
        );
    }
    s
}

fn slug(label: &str) -> String {
    let s: String = label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect();
    s.trim_matches('_').to_string()
}

/// Writes one `.gp` script and one `.dat` file per sweep into `out`.
pub fn emit_plots(csv_path: &Path, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let text = std::fs::read_to_string(csv_path)
        .map_err(|e| CliError::Config(format!("{}: {e}", csv_path.display())))?;
    let stem = csv_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    std::fs::create_dir_all(out)?;
    if text.trim().is_empty() || text.trim().lines().count() < 2 {
        let path = out.join(format!("{stem}.gp"));
        std::fs::write(
            &path,
            format!(
                "# warning: {} holds no data rows; nothing to plot\n",
                csv_path.display()
            ),
        )?;
        return Ok(vec![path]);
    }
    let sweeps = parse_sweeps(&text)?;
    let mut written = Vec::new();
    for (i, sweep) in sweeps.iter().enumerate() {
        let name = format!("{stem}_{i:02}_{}", slug(&sweep.label));
        let dat = out.join(format!("{name}.dat"));
        let mut body = format!("# {} {}\n", sweep.xlabel, sweep.ylabel);
        for (x, y) in &sweep.points {
            let _ = writeln!(body, "{x} {y}");
        }
        std::fs::write(&dat, body)?;
        let gp = out.join(format!("{name}.gp"));
        std::fs::write(&gp, script(sweep, &format!("{name}.dat")))?;
        written.push(gp);
        written.push(dat);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_rows_average_trials_on_log_axes() {
        let text = "probe,j,q,r,theta,h,T,dt,seed,value\n\
                    precise_strichartz,3,4,4,0,0.25,1,0.1,1,2.0\n\
                    precise_strichartz,3,4,4,0,0.25,1,0.1,2,8.0\n\
                    precise_strichartz,3,4,4,0,0.5,1,0.1,1,8.0\n\
                    precise_strichartz,3,4,4,0,1,1,0.1,1,16.0\n";
        let sweeps = parse_sweeps(text).unwrap();
        assert_eq!(sweeps.len(), 1);
        assert!(sweeps[0].loglog);
        assert_eq!(sweeps[0].points[0], (0.25, 4.0));
        let gp = script(&sweeps[0], "x.dat");
        assert!(gp.contains("set logscale xy") && gp.contains("slope 1.0000"));
    }

    #[test]
    fn experiment_rows_split_by_quantity() {
        let text = "experiment,gamma,s,J,dt,T,quantity,value,seed\n\
                    e,2.5,0.7,2,0.1,1,a,1,0\n\
                    e,2.5,0.7,3,0.1,1,a,2,0\n\
                    e,2.5,0.7,2,0.1,1,b,3,0\n";
        let sweeps = parse_sweeps(text).unwrap();
        assert_eq!(sweeps.len(), 2);
        assert_eq!(sweeps[0].points, vec![(2.0, 1.0), (3.0, 2.0)]);
    }

    #[test]
    fn malformed_rows_rejected() {
        assert!(parse_sweeps(
            "experiment,gamma,s,J,dt,T,quantity,value,seed\ne,x,0.7,2,0.1,1,a,zz,0\n"
        )
        .is_err());
        assert!(parse_sweeps("foo,bar\n1,2\n").is_err());
    }
}
