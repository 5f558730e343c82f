//! Configuration files, CSV and PGM writers, and the run manifest.
//!
//! Numbers are written as `{:.5e}` (six significant digits, `.` as decimal
//! point, no locale). Every file goes through one [`OutputDir`], which
//! records its size and SHA-256 for the manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::experiments::{TableRun, TableSpec};
use crate::field::Field2;
use crate::reference::ErrorReport;

/// Column order of per-run error files.
pub const REPORT_COLUMNS: [&str; 6] = [
    "method",
    "refinement",
    "incidence",
    "frequency",
    "linf_error",
    "runtime",
];

/// Scientific notation with six significant digits.
pub fn sci(v: f64) -> String {
    format!("{v:.5e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(sci).unwrap_or_default()
}

fn csv_string(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

/// One line per report, columns as in [`REPORT_COLUMNS`].
pub fn reports_csv(reports: &[ErrorReport]) -> String {
    let header: Vec<String> = REPORT_COLUMNS.iter().map(|s| s.to_string()).collect();
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.method.name().to_string(),
                r.refinement.to_string(),
                opt(r.incidence),
                opt(r.frequency),
                sci(r.linf_error),
                sci(r.runtime),
            ]
        })
        .collect();
    csv_string(&header, &rows)
}

/// The table as printed: one row per method, one column per direction and
/// refinement. Failed cells read `failed`.
pub fn table_csv(run: &TableRun) -> String {
    let groups = run.spec.groups();
    let mut header = vec!["method".to_string()];
    for g in &groups {
        for r in &run.spec.refinements {
            header.push(if groups.len() == 1 {
                format!("r{r}")
            } else {
                format!("{}_r{r}", g.label)
            });
        }
    }
    let rows: Vec<Vec<String>> = run
        .spec
        .methods
        .iter()
        .map(|&m| {
            let mut row = vec![m.name().to_string()];
            for g in 0..groups.len() {
                for &r in &run.spec.refinements {
                    row.push(run.value(m, g, r).map_or("failed".into(), sci));
                }
            }
            row
        })
        .collect();
    csv_string(&header, &rows)
}

/// Linear map from field values to gray levels: `min → 0`, `max → 255`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrayMapping {
    pub min: f64,
    pub max: f64,
}

/// Binary PGM (P5), x to the right and y upward. A constant field maps to 0.
pub fn pgm_bytes(field: &Field2) -> (Vec<u8>, GrayMapping) {
    let (w, h) = field.shape();
    let data = field.as_slice();
    let min = data.iter().copied().fold(f64::INFINITY, f64::min);
    let max = data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (min, max) = if data.is_empty() { (0.0, 0.0) } else { (min, max) };
    let span = max - min;
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    for j in (0..h).rev() {
        for i in 0..w {
            let v = field.get(i, j);
            let g = if span > 0.0 { (255.0 * (v - min) / span).round() } else { 0.0 };
            out.push(g.clamp(0.0, 255.0) as u8);
        }
    }
    (out, GrayMapping { min, max })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// An emitted file as listed in the manifest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    /// Relative to the output directory.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Sole writer of one output directory.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<OutputFile>,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
        Ok(OutputDir {
            root,
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(name);
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.files.retain(|f| f.path != name);
        self.files.push(OutputFile {
            path: name.to_string(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn files(&self) -> &[OutputFile] {
        &self.files
    }

    /// Writes the manifest with the inventory filled in. Call last.
    pub fn finish(mut self, mut manifest: RunManifest) -> Result<RunManifest> {
        manifest.files = std::mem::take(&mut self.files);
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        let path = self.root.join(MANIFEST_NAME);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(manifest)
    }
}

pub const MANIFEST_NAME: &str = "manifest.json";

/// Per-cell record of a table run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub method: String,
    pub column: String,
    pub refinement: u32,
    pub linf_error: Option<f64>,
    pub final_time_error: Option<f64>,
    pub growth: Option<f64>,
    pub steps: Option<usize>,
    pub runtime: Option<f64>,
    pub failure: Option<String>,
}

pub fn cell_records(run: &TableRun) -> Vec<CellRecord> {
    let groups = run.spec.groups();
    run.cells
        .iter()
        .map(|c| {
            let ok = c.outcome.as_ref().ok();
            CellRecord {
                method: c.method.name().into(),
                column: groups[c.group].label.into(),
                refinement: c.refinement,
                linf_error: ok.map(|m| m.errors.max_in_time),
                final_time_error: ok.map(|m| m.errors.final_time),
                growth: ok.map(|m| m.stats.growth),
                steps: ok.map(|m| m.stats.steps),
                runtime: ok.map(|m| m.stats.runtime),
                failure: c.outcome.as_ref().err().cloned(),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRecord {
    pub file: String,
    /// What the pixels show.
    pub quantity: String,
    pub mapping: GrayMapping,
}

/// Everything needed to reproduce a run: the job itself, the seeds, the
/// measured cells and the inventory of emitted files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// Re-executable description of the run.
    pub job: serde_json::Value,
    pub seeds: Vec<u64>,
    /// Whether runtimes are wall-clock measurements (otherwise written as 0).
    pub timings: bool,
    pub cells: Vec<CellRecord>,
    pub snapshots: Vec<SnapshotRecord>,
    pub checks: Vec<crate::experiments::CheckLine>,
    pub files: Vec<OutputFile>,
}

impl RunManifest {
    pub fn new(job: serde_json::Value, timings: bool) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            job,
            seeds: Vec::new(),
            timings,
            cells: Vec::new(),
            snapshots: Vec::new(),
            checks: Vec::new(),
            files: Vec::new(),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.into(),
            reason: e.to_string(),
        })
    }
}

/// A parsed configuration file.
#[derive(Clone, Debug, PartialEq)]
pub enum ParsedConfig {
    Sim(Box<SimConfig>),
    Table(TableSpec),
}

/// Reads a TOML file holding either one simulation (keys of [`SimConfig`])
/// or a table (`table_id` plus optional overrides), fully validated.
pub fn parse_config(path: &Path) -> Result<ParsedConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text).map_err(|e| match e {
        Error::Parse { reason, .. } => Error::Parse {
            path: path.into(),
            reason,
        },
        other => other,
    })
}

pub fn parse_config_str(text: &str) -> Result<ParsedConfig> {
    let parse_err = |reason: String| Error::Parse {
        path: PathBuf::from("<string>"),
        reason,
    };
    let doc: toml::Table = text.parse().map_err(|e: toml::de::Error| parse_err(e.to_string()))?;
    if doc.contains_key("table_id") {
        let spec: TableSpec = toml::from_str(text).map_err(|e| parse_err(e.to_string()))?;
        spec.validate()?;
        Ok(ParsedConfig::Table(spec))
    } else {
        Ok(ParsedConfig::Sim(Box::new(SimConfig::from_toml(text)?)))
    }
}

pub fn table_spec_toml(spec: &TableSpec) -> String {
    toml::to_string(spec).expect("table spec serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Method;
    use std::collections::BTreeMap;

    fn report() -> ErrorReport {
        ErrorReport {
            method: Method::HmlV3,
            refinement: 2,
            incidence: Some(45.0),
            frequency: Some(10.0),
            linf_error: 3.3612e-4,
            runtime: 1.5,
            metadata: BTreeMap::new(),
        }
    }

    #[test]
    fn empty_report_list_is_header_only() {
        assert_eq!(
            reports_csv(&[]),
            "method,refinement,incidence,frequency,linf_error,runtime\n"
        );
    }

    #[test]
    fn one_report_one_line_six_columns() {
        let text = reports_csv(&[report()]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], "hml_v3,2,4.50000e1,1.00000e1,3.36120e-4,1.50000e0");
        assert_eq!(lines[1].split(',').count(), 6);
    }

    #[test]
    fn missing_angles_are_empty_fields() {
        let mut r = report();
        r.incidence = None;
        r.frequency = None;
        let text = reports_csv(&[r]);
        assert!(text.lines().nth(1).unwrap().starts_with("hml_v3,2,,,"));
    }

    #[test]
    fn zero_field_pgm() {
        let (bytes, map) = pgm_bytes(&Field2::zeros(100, 100));
        let header = b"P5\n100 100\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(bytes.len(), header.len() + 100 * 100);
        assert!(bytes[header.len()..].iter().all(|&b| b == 0));
        assert_eq!(map, GrayMapping { min: 0.0, max: 0.0 });
    }

    #[test]
    fn pgm_is_linear_with_y_up() {
        let f = Field2::from_fn(2, 3, |i, j| (i + 2 * j) as f64);
        let (bytes, map) = pgm_bytes(&f);
        let px = &bytes[b"P5\n2 3\n255\n".len()..];
        // top row is j = 2: values 4, 5 of range [0, 5]
        assert_eq!(px, &[204, 255, 102, 153, 0, 51]);
        assert_eq!(map.max, 5.0);
    }

    #[test]
    fn output_dir_inventories_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path().join("o")).unwrap();
        out.write("a.csv", b"x\n").unwrap();
        out.write("a.csv", b"y\n").unwrap();
        let m = out.finish(RunManifest::new(serde_json::json!({"k": 1}), false)).unwrap();
        assert_eq!(m.files.len(), 1);
        assert_eq!(
            m.files[0].sha256,
            "3bb2abb69ebb27fbfe63c7639624c6ec5e331b841a5bc8c3ebc10b9285e90877"
        );
        let back = RunManifest::read(&dir.path().join("o").join(MANIFEST_NAME)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn table_config_round_trip() {
        let spec = TableSpec::published(4).unwrap().with_refinements(vec![0, 2]);
        let text = table_spec_toml(&spec);
        assert_eq!(parse_config_str(&text).unwrap(), ParsedConfig::Table(spec));
        let minimal = parse_config_str("table_id = 1\n").unwrap();
        assert_eq!(minimal, ParsedConfig::Table(TableSpec::published(1).unwrap()));
    }

    #[test]
    fn sim_config_round_trip() {
        let cfg = SimConfig::baseline(Method::Smart);
        let parsed = parse_config_str(&cfg.to_toml()).unwrap();
        assert_eq!(parsed, ParsedConfig::Sim(Box::new(cfg)));
        let minimal = parse_config_str("method = \"berenger\"\n").unwrap();
        assert_eq!(minimal, ParsedConfig::Sim(Box::new(SimConfig::baseline(Method::Berenger))));
    }

    #[test]
    fn bad_keys_are_named() {
        let e = parse_config_str("table_id = 12\n").unwrap_err();
        assert!(e.to_string().contains("table_id"));
        let e = parse_config_str("table_id = 1\nbogus = 2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { .. }) && e.to_string().contains("bogus"));
    }
}
