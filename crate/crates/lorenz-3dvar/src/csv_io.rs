//! CSV reading and writing.
//!
//! All output files share one layout: `#`-prefixed metadata lines of the
//! form `# key = value`, one header row, then comma-separated records of
//! full-precision decimal floats (shortest round-trip formatting). Nothing
//! here is timestamped or machine-dependent, so identical runs produce
//! byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::bounds::BoundReport;
use crate::dynamics::{StateVec, Trajectory};
use crate::error::{Error, Result};
use crate::filter_discrete::ErrorRecord;
use crate::observation::{ContinuousData, DiscreteData};

/// Render one float with full round-trip precision.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn push_meta(out: &mut String, meta: &[(String, String)]) {
    for (k, v) in meta {
        let _ = writeln!(out, "# {k} = {v}");
    }
}

/// Assemble a CSV document in memory.
pub fn render_csv(
    meta: &[(String, String)],
    header: &str,
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> String {
    let mut out = String::new();
    push_meta(&mut out, meta);
    let _ = writeln!(out, "{header}");
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            let _ = write!(out, "{}", fmt_f64(v));
            first = false;
        }
        out.push('\n');
    }
    out
}

/// A parsed CSV document.
#[derive(Debug, Clone)]
pub struct CsvFile {
    /// `(key, value)` pairs from `# key = value` comment lines.
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvFile {
    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// Parse a CSV document from text.
pub fn parse_csv(text: &str) -> Result<CsvFile> {
    let mut meta = Vec::new();
    let mut columns: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = comment.split_once('=') {
                meta.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        match &columns {
            None => {
                columns = Some(line.split(',').map(|c| c.trim().to_string()).collect());
            }
            Some(cols) => {
                let fields: Vec<&str> = line.split(',').collect();
                if fields.len() != cols.len() {
                    return Err(Error::InvalidConfig(format!(
                        "line {}: expected {} fields, found {}",
                        lineno + 1,
                        cols.len(),
                        fields.len()
                    )));
                }
                let mut row = Vec::with_capacity(fields.len());
                for f in fields {
                    row.push(f.trim().parse::<f64>().map_err(|_| {
                        Error::InvalidConfig(format!(
                            "line {}: `{f}` is not a number",
                            lineno + 1
                        ))
                    })?);
                }
                rows.push(row);
            }
        }
    }
    let columns = columns
        .ok_or_else(|| Error::InvalidConfig("CSV has no header row".to_string()))?;
    Ok(CsvFile { meta, columns, rows })
}

/// Read and parse a CSV file.
pub fn read_csv(path: &Path) -> Result<CsvFile> {
    parse_csv(&fs::read_to_string(path)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, text)?;
    Ok(())
}

/// `t,x,y,z` rows of a trajectory.
pub fn render_trajectory(truth: &Trajectory, meta: &[(String, String)]) -> String {
    render_csv(
        meta,
        "t,x,y,z",
        truth
            .states
            .iter()
            .enumerate()
            .map(|(k, s)| vec![truth.time(k), s.x, s.y, s.z]),
    )
}

/// `t,y` rows of a discrete data stream.
pub fn render_discrete_data(data: &DiscreteData, meta: &[(String, String)]) -> String {
    render_csv(
        meta,
        "t,y",
        data.times.iter().zip(&data.values).map(|(&t, &y)| vec![t, y]),
    )
}

/// Rebuild a discrete data stream from `t,y` rows.
pub fn discrete_data_from_csv(file: &CsvFile) -> Result<DiscreteData> {
    let times = file.column("t")?;
    let values = file.column("y")?;
    if times.is_empty() {
        return Err(Error::InvalidConfig("data CSV holds no records".to_string()));
    }
    Ok(DiscreteData { times, values })
}

/// `t,z` rows of the cumulative continuous stream.
pub fn render_continuous_data(data: &ContinuousData, meta: &[(String, String)]) -> String {
    let z = data.cumulative();
    render_csv(
        meta,
        "t,z",
        z.iter().enumerate().map(|(k, &zk)| vec![k as f64 * data.dt, zk]),
    )
}

/// Rebuild a continuous data stream from cumulative `t,z` rows.
pub fn continuous_data_from_csv(file: &CsvFile) -> Result<ContinuousData> {
    let times = file.column("t")?;
    let z = file.column("z")?;
    if times.len() < 2 {
        return Err(Error::InvalidConfig("continuous data needs at least two rows".to_string()));
    }
    let dt = times[1] - times[0];
    for (k, w) in times.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1.0) {
            return Err(Error::GridMismatch(format!("non-uniform time grid at row {}", k + 1)));
        }
    }
    let increments = z.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(ContinuousData { dt, increments })
}

/// `t,mx,my,mz` rows of a mean path.
pub fn render_means(times: &[f64], means: &[StateVec], meta: &[(String, String)]) -> String {
    render_csv(
        meta,
        "t,mx,my,mz",
        times.iter().zip(means).map(|(&t, m)| vec![t, m.x, m.y, m.z]),
    )
}

/// `t,delta_sq,p_delta_sq,norm_sq` rows of an error process.
pub fn render_errors(records: &[ErrorRecord], meta: &[(String, String)]) -> String {
    render_csv(
        meta,
        "t,delta_sq,p_delta_sq,norm_sq",
        records.iter().map(|r| vec![r.t, r.delta_sq, r.p_delta_sq, r.norm_sq]),
    )
}

/// `key,value` rows of a bound report.
pub fn render_bound_report_csv(report: &BoundReport) -> String {
    let mut out = String::from("key,value\n");
    for (k, v) in report.rows() {
        let _ = writeln!(out, "{k},{}", fmt_f64(v));
    }
    out
}

/// Aligned `key value` text of a bound report.
pub fn render_bound_report_text(report: &BoundReport) -> String {
    let rows = report.rows();
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<width$}  {}", fmt_f64(v));
    }
    out
}
