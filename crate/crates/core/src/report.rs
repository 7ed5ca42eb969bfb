//! CSV rows for probe sweeps and experiments.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::probes::ProbeReport;

/// One measured value of a norm or probe at a single resolution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub probe: String,
    pub j: i32,
    pub q: f64,
    pub r: f64,
    pub theta: f64,
    pub h: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub dt: f64,
    pub seed: u64,
    pub value: f64,
}

/// One derived quantity of a dynamics experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub experiment: String,
    pub gamma: f64,
    pub s: f64,
    #[serde(rename = "J")]
    pub j: i32,
    pub dt: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub quantity: String,
    pub value: f64,
    pub seed: u64,
}

pub fn write_rows<W: Write, R: Serialize>(out: W, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per sample: `probe, <params>, ratio, max, min, maxmin_ratio, seed`.
pub fn write_probe_report<W: Write>(out: W, report: &ProbeReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["probe".to_string()];
    header.extend(report.params.iter().map(|(k, _)| k.clone()));
    header.extend(["ratio", "max", "min", "maxmin_ratio", "seed"].map(String::from));
    w.write_record(&header)?;
    for (ratio, seed) in report.ratios.iter().zip(&report.seeds) {
        let mut rec = vec![report.probe.clone()];
        rec.extend(report.params.iter().map(|(_, v)| v.to_string()));
        rec.extend([*ratio, report.max, report.min, report.maxmin_ratio].map(|x| x.to_string()));
        rec.push(seed.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probe_report_rows_roundtrip() {
        let rep =
            ProbeReport::new("hls", vec![("p".into(), 2.0)], vec![1.0, 2.0], vec![7, 8]).unwrap();
        let mut buf = Vec::new();
        write_probe_report(&mut buf, &rep).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "probe,p,ratio,max,min,maxmin_ratio,seed");
        assert_eq!(lines[2], "hls,2,2,2,1,2,8");
    }

    #[test]
    fn experiment_header() {
        let row = ExperimentRow {
            experiment: "recombine".into(),
            gamma: 2.5,
            s: 0.7,
            j: 3,
            dt: 0.01,
            horizon: 0.5,
            quantity: "h1".into(),
            value: 1e-3,
            seed: 1,
        };
        let mut buf = Vec::new();
        write_rows(&mut buf, &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("experiment,gamma,s,J,dt,T,quantity,value,seed\n"));
    }
}
