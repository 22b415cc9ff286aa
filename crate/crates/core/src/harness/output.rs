use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::bounds::BoundReport;
use crate::error::Result;
use crate::quadrature::QuadratureRule;
use crate::sampling::Strategy;

/// Prefix of the metadata line that differs between otherwise identical runs.
pub const TIMESTAMP_PREFIX: &str = "# timestamp:";

pub const VERSION: &str = concat!("quadsub ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub strategy: Strategy,
    pub m: usize,
    pub s: Option<usize>,
    pub err_inf: f64,
    pub err_l2: f64,
    pub success: bool,
    pub iterations: usize,
    pub converged: bool,
    /// Seed of the sample draw.
    pub seed: u64,
    /// Recovered quantity of interest, ODE study only.
    pub qoi: Option<f64>,
    pub qoi_err: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub strategy: Strategy,
    pub m: usize,
    pub s: Option<usize>,
    pub trials: usize,
    pub success_rate: f64,
    pub mean_err_inf: f64,
    pub mean_err_l2: f64,
    pub mean_iterations: f64,
    pub converged_rate: f64,
    pub mean_qoi: Option<f64>,
    pub mean_qoi_err: Option<f64>,
}

impl Aggregate {
    pub fn from_trials(records: &[TrialRecord]) -> Option<Self> {
        let first = records.first()?;
        let k = records.len() as f64;
        let mean = |f: &dyn Fn(&TrialRecord) -> f64| records.iter().map(f).sum::<f64>() / k;
        let mean_opt = |f: &dyn Fn(&TrialRecord) -> Option<f64>| {
            records.iter().map(f).sum::<Option<f64>>().map(|s| s / k)
        };
        Some(Self {
            strategy: first.strategy,
            m: first.m,
            s: first.s,
            trials: records.len(),
            success_rate: mean(&|r| r.success as u8 as f64),
            mean_err_inf: mean(&|r| r.err_inf),
            mean_err_l2: mean(&|r| r.err_l2),
            mean_iterations: mean(&|r| r.iterations as f64),
            converged_rate: mean(&|r| r.converged as u8 as f64),
            mean_qoi: mean_opt(&|r| r.qoi),
            mean_qoi_err: mean_opt(&|r| r.qoi_err),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Row {
    Trial(TrialRecord),
    Aggregate(Aggregate),
    /// A configuration that could not run, e.g. `M` larger than the grid.
    Error {
        strategy: Strategy,
        m: usize,
        s: Option<usize>,
        message: String,
    },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentOutput {
    /// Metadata lines without the leading `# `.
    pub metadata: Vec<String>,
    pub rows: Vec<Row>,
}

const COLUMNS: [&str; 14] = [
    "record",
    "strategy",
    "m",
    "s",
    "trial",
    "seed",
    "err_inf",
    "err_l2",
    "success",
    "iterations",
    "converged",
    "qoi",
    "qoi_err",
    "message",
];

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ExperimentOutput {
    pub fn trials(&self) -> impl Iterator<Item = &TrialRecord> {
        self.rows.iter().filter_map(|r| match r {
            Row::Trial(t) => Some(t),
            _ => None,
        })
    }

    pub fn aggregates(&self) -> impl Iterator<Item = &Aggregate> {
        self.rows.iter().filter_map(|r| match r {
            Row::Aggregate(a) => Some(a),
            _ => None,
        })
    }

    pub fn errors(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| matches!(r, Row::Error { .. }))
    }

    pub fn aggregate(&self, strategy: Strategy, m: usize, s: Option<usize>) -> Option<&Aggregate> {
        self.aggregates()
            .find(|a| a.strategy == strategy && a.m == m && a.s == s)
    }

    /// RFC 4180 CSV with `#` metadata lines and a timestamp line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        write_metadata(&mut out, &self.metadata)?;
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(COLUMNS)?;
        for row in &self.rows {
            let record: Vec<String> = match row {
                Row::Trial(t) => vec![
                    "trial".into(),
                    t.strategy.name().into(),
                    t.m.to_string(),
                    opt(t.s),
                    t.trial.to_string(),
                    t.seed.to_string(),
                    num(t.err_inf),
                    num(t.err_l2),
                    (t.success as u8).to_string(),
                    t.iterations.to_string(),
                    (t.converged as u8).to_string(),
                    opt(t.qoi.map(num)),
                    opt(t.qoi_err.map(num)),
                    String::new(),
                ],
                Row::Aggregate(a) => vec![
                    "aggregate".into(),
                    a.strategy.name().into(),
                    a.m.to_string(),
                    opt(a.s),
                    String::new(),
                    String::new(),
                    num(a.mean_err_inf),
                    num(a.mean_err_l2),
                    num(a.success_rate),
                    num(a.mean_iterations),
                    num(a.converged_rate),
                    opt(a.mean_qoi.map(num)),
                    opt(a.mean_qoi_err.map(num)),
                    format!("trials={}", a.trials),
                ],
                Row::Error {
                    strategy,
                    m,
                    s,
                    message,
                } => {
                    let mut r = vec![String::new(); COLUMNS.len()];
                    r[0] = "error".into();
                    r[1] = strategy.name().into();
                    r[2] = m.to_string();
                    r[3] = opt(*s);
                    r[13] = message.clone();
                    r
                }
            };
            writer.write_record(&record)?;
        }
        writer.flush()?;
        Ok(())
    }
}

fn write_metadata<W: Write>(out: &mut W, metadata: &[String]) -> Result<()> {
    writeln!(out, "# {VERSION}")?;
    for line in metadata {
        writeln!(out, "# {line}")?;
    }
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    writeln!(out, "{TIMESTAMP_PREFIX} {secs}")?;
    Ok(())
}

/// Drops the timestamp line so two CSV files can be compared byte for byte.
pub fn strip_timestamp(csv: &str) -> String {
    csv.lines()
        .filter(|l| !l.starts_with(TIMESTAMP_PREFIX))
        .map(|l| format!("{l}\n"))
        .collect()
}

/// `n,L,arg_k,arg_j` rows of a bound curve.
pub fn write_bound_csv<W: Write>(
    mut out: W,
    metadata: &[String],
    reports: &[BoundReport],
) -> Result<()> {
    write_metadata(&mut out, metadata)?;
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["n", "L", "arg_k", "arg_j"])?;
    for r in reports {
        writer.write_record([
            r.n.to_string(),
            format!("{:.16e}", r.value),
            r.arg_k.to_string(),
            r.arg_j.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// `k,node,weight` rows with 17 significant digits.
pub fn write_quad_csv<W: Write>(
    mut out: W,
    metadata: &[String],
    rule: &QuadratureRule,
) -> Result<()> {
    write_metadata(&mut out, metadata)?;
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["k", "node", "weight"])?;
    for (k, (z, w)) in rule.nodes().iter().zip(rule.weights()).enumerate() {
        writer.write_record([k.to_string(), format!("{z:.16e}"), format!("{w:.16e}")])?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(trial: usize, err: f64, success: bool) -> TrialRecord {
        TrialRecord {
            trial,
            strategy: Strategy::GaussSubsample,
            m: 10,
            s: Some(2),
            err_inf: err,
            err_l2: 2.0 * err,
            success,
            iterations: 10 * (trial + 1),
            converged: true,
            seed: 7,
            qoi: None,
            qoi_err: None,
        }
    }

    #[test]
    fn aggregate_recomputes_means() {
        let recs = [record(0, 1.0, true), record(1, 3.0, false)];
        let a = Aggregate::from_trials(&recs).unwrap();
        assert_eq!(a.success_rate, 0.5);
        assert_eq!(a.mean_err_inf, 2.0);
        assert_eq!(a.mean_err_l2, 4.0);
        assert_eq!(a.mean_iterations, 15.0);
        assert_eq!(a.mean_qoi, None);
        assert!(Aggregate::from_trials(&[]).is_none());
    }

    #[test]
    fn csv_layout() {
        let recs = vec![record(0, 0.5, true)];
        let out = ExperimentOutput {
            metadata: vec!["experiment=test".into()],
            rows: vec![
                Row::Trial(recs[0].clone()),
                Row::Aggregate(Aggregate::from_trials(&recs).unwrap()),
                Row::Error {
                    strategy: Strategy::UniformUnweighted,
                    m: 3,
                    s: None,
                    message: "M, too large".into(),
                },
            ],
        };
        let mut buf = Vec::new();
        out.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# quadsub"));
        assert_eq!(lines[1], "# experiment=test");
        assert!(lines[2].starts_with(TIMESTAMP_PREFIX));
        assert_eq!(lines[3], COLUMNS.join(","));
        assert!(lines[4].starts_with("trial,gauss,10,2,0,7,5e-1,1e0,1,10,1"));
        assert!(lines[5].starts_with("aggregate,gauss,10,2,,,"));
        assert!(lines[6].ends_with("\"M, too large\""));
        assert!(!strip_timestamp(&text).contains("timestamp"));
    }
}
