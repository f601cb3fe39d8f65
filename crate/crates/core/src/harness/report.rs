//! Result tables, log-log slope fits and CSV/JSON emission.

use std::io::Write;
use std::path::{Path, PathBuf};

use log::warn;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Version of the CSV column layout and metadata shape.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    /// Floats use 17 significant digits so the CSV round-trips exactly.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Float(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Config(format!("no column `{name}`")))
    }

    /// Numeric values of a column; non-numeric cells become NaN.
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[i].as_f64().unwrap_or(f64::NAN)).collect())
    }

    /// Rows whose text column `name` equals `value`.
    pub fn filter(&self, name: &str, value: &str) -> Result<Table> {
        let i = self.column_index(name)?;
        Ok(Table {
            columns: self.columns.clone(),
            rows: self
                .rows
                .iter()
                .filter(|r| r[i].as_str() == Some(value))
                .cloned()
                .collect(),
        })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Least-squares line through `(ln n, ln mean)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub rows_used: usize,
}

/// Fits `ln mean = intercept + slope · ln n`. Rows with a non-positive
/// mean are dropped with a warning; at least three usable rows are needed.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(n, m)| {
            let ok = *n > 0.0 && *m > 0.0 && m.is_finite();
            if !ok {
                warn!("dropping row n = {n}, mean = {m} from log-log fit");
            }
            ok
        })
        .map(|(n, m)| (n.ln(), m.ln()))
        .collect();
    if usable.len() < 3 {
        return Err(Error::TooFewRows(usable.len()));
    }
    let k = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / k;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::TooFewRows(1));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = usable.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(SlopeFit {
        slope,
        intercept,
        residual: (rss / k).sqrt(),
        rows_used: usable.len(),
    })
}

/// One `(n, mean excess, stderr, bound, lower bound)` row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
    pub bound: Option<f64>,
    pub lower: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCurve {
    pub label: String,
    pub rows: Vec<RateRow>,
}

impl RateCurve {
    pub fn fit_slope(&self) -> Result<SlopeFit> {
        let points: Vec<(f64, f64)> = self.rows.iter().map(|r| (r.n as f64, r.mean)).collect();
        fit_slope(&points)
    }

    /// Rebuilds a curve from emitted table rows.
    pub fn from_table(label: &str, table: &Table) -> Result<Self> {
        let n = table.column("n")?;
        let mean = table.column("mean_excess")?;
        let se = table.column("stderr")?;
        let bound = table.column("bound").ok();
        let lower = table.column("lower_bound").ok();
        let pick = |col: &Option<Vec<f64>>, i: usize| col.as_ref().map(|c| c[i]).filter(|v| !v.is_nan());
        Ok(Self {
            label: label.to_string(),
            rows: (0..n.len())
                .map(|i| RateRow {
                    n: n[i] as usize,
                    mean: mean[i],
                    stderr: se[i],
                    bound: pick(&bound, i),
                    lower: pick(&lower, i),
                })
                .collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSummary {
    pub label: String,
    pub fit: Option<SlopeFit>,
    pub error: Option<String>,
}

impl CurveSummary {
    pub fn of(curve: &RateCurve) -> Self {
        match curve.fit_slope() {
            Ok(fit) => Self {
                label: curve.label.clone(),
                fit: Some(fit),
                error: None,
            },
            Err(e) => Self {
                label: curve.label.clone(),
                fit: None,
                error: Some(e.to_string()),
            },
        }
    }
}

/// A named pass/fail condition evaluated from the emitted rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub experiment: String,
    pub table: Table,
    pub curves: Vec<CurveSummary>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl ExperimentOutput {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn curve(&self, label: &str) -> Option<&CurveSummary> {
        self.curves.iter().find(|c| c.label == label)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn metadata(&self, config: Value, wall_time_s: f64) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "crate_version": env!("CARGO_PKG_VERSION"),
            "config": config,
            "wall_time_s": wall_time_s,
            "columns": self.table.columns,
            "curves": self.curves,
            "checks": self.checks,
            "notes": self.notes,
        })
    }
}

/// `<out>.meta.json` next to the CSV.
pub fn metadata_path(csv_path: &Path) -> PathBuf {
    let mut name = csv_path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes the CSV and its metadata file.
pub fn emit(output: &ExperimentOutput, csv_path: &Path, config: Value, wall_time_s: f64) -> Result<()> {
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    output.table.write_csv(std::fs::File::create(csv_path)?)?;
    let meta = output.metadata(config, wall_time_s);
    std::fs::write(metadata_path(csv_path), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        [32.0, 64.0, 128.0, 256.0, 512.0].iter().map(|&n| (n, f(n))).collect()
    }

    #[test]
    fn slope_examples() {
        assert!((fit_slope(&curve(|n| 7.0 / n)).unwrap().slope + 1.0).abs() < 1e-12);
        assert!((fit_slope(&curve(|n| 3.0 / n.sqrt())).unwrap().slope + 0.5).abs() < 1e-12);
        assert!(fit_slope(&curve(|_| 2.0)).unwrap().slope.abs() < 1e-12);
        assert!(matches!(fit_slope(&[(10.0, 1.0)]), Err(Error::TooFewRows(1))));
    }

    #[test]
    fn slope_drops_nonpositive_rows() {
        let mut pts = curve(|n| 5.0 / n);
        pts.push((1024.0, 0.0));
        pts.push((2048.0, -1e-9));
        let fit = fit_slope(&pts).unwrap();
        assert_eq!(fit.rows_used, 5);
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!(fit_slope(&[(1.0, 1.0), (2.0, 0.0), (3.0, -1.0), (4.0, 2.0)]).is_err());
    }

    #[test]
    fn csv_rendering() {
        let mut t = Table::new(&["n", "mean", "label", "bound"]);
        t.push(vec![Cell::from(64usize), Cell::from(0.1), Cell::from("a"), Cell::Empty]);
        let s = t.to_csv_string().unwrap();
        assert_eq!(s, "n,mean,label,bound\n64,1.0000000000000001e-1,a,\n");
        let back: f64 = "1.0000000000000001e-1".parse().unwrap();
        assert_eq!(back, 0.1);
        assert_eq!(t.column("mean").unwrap(), vec![0.1]);
        assert!(t.column("bound").unwrap()[0].is_nan());
    }

    #[test]
    fn meta_path() {
        assert_eq!(metadata_path(Path::new("out/rate.csv")), PathBuf::from("out/rate.csv.meta.json"));
    }
}
