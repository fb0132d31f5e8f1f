use crate::config::Format;
use crate::CliError;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
        }
    }
}

/// One threshold comparison: `pass` iff `value <= threshold` unless noted in
/// `name`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.to_string(),
            value,
            threshold,
            pass: value <= threshold,
        }
    }

    pub fn holds(name: &str, ok: bool) -> Self {
        Check {
            name: name.to_string(),
            value: if ok { 1.0 } else { 0.0 },
            threshold: 1.0,
            pass: ok,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    /// The resolved configuration, TOML encoded.
    pub config: String,
    pub wall_time_s: f64,
    /// Set when the computation stopped on a numerical error.
    pub error: Option<String>,
    /// Experiment-specific scalars such as fitted constants.
    pub extra: Vec<(String, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    pub metadata: Metadata,
}

/// The JSON sidecar next to a CSV: everything except the rows.
#[derive(Serialize)]
struct Sidecar<'a> {
    experiment: &'a str,
    columns: &'a [String],
    row_count: usize,
    checks: &'a [Check],
    verdict: Verdict,
    metadata: &'a Metadata,
}

impl Report {
    pub fn verdict_from(checks: &[Check], error: &Option<String>) -> Verdict {
        if error.is_none() && checks.iter().all(|c| c.pass) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    fn sidecar(&self) -> Sidecar<'_> {
        Sidecar {
            experiment: &self.experiment,
            columns: &self.columns,
            row_count: self.rows.len(),
            checks: &self.checks,
            verdict: self.verdict,
            metadata: &self.metadata,
        }
    }

    pub fn sidecar_json(&self) -> Result<String, CliError> {
        Ok(serde_json::to_string_pretty(&self.sidecar())?)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Path of the JSON sidecar for a CSV report.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Write `report` to `path`. CSV writes the rows to `path` and the metadata
/// to [`sidecar_path`]; JSON writes a single document. Returns the files
/// written.
pub fn emit_report(report: &Report, format: Format, path: &Path) -> Result<Vec<PathBuf>, CliError> {
    let create = |p: &Path| File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())));
    match format {
        Format::Csv => {
            let side = sidecar_path(path);
            if side == path {
                return Err(CliError::Usage(format!("out: {} would be overwritten by the JSON sidecar", path.display())));
            }
            report.write_csv(create(path)?)?;
            let mut f = create(&side)?;
            writeln!(f, "{}", report.sidecar_json()?).map_err(|e| CliError::Io(e.to_string()))?;
            Ok(vec![path.to_path_buf(), side])
        }
        Format::Json => {
            let mut f = create(path)?;
            writeln!(f, "{}", report.to_json()?).map_err(|e| CliError::Io(e.to_string()))?;
            Ok(vec![path.to_path_buf()])
        }
    }
}
