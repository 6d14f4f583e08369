use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use fhc_core::certificates::Verdict;
use fhc_core::sets::DensityCurve;
use fhc_core::Dyadic;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    /// The mathematical statement the check instantiates.
    pub statement: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    pub fn from_verdict(statement: impl Into<String>, v: Verdict) -> Self {
        let status = if v.passed { Status::Pass } else { Status::Fail };
        Check { statement: statement.into(), status, witness: v.witness }
    }

    pub fn of(statement: impl Into<String>, ok: bool, witness: impl Into<String>) -> Self {
        let v = if ok { Verdict::pass() } else { Verdict::fail(witness) };
        Self::from_verdict(statement, v)
    }

    pub fn skipped(statement: impl Into<String>, why: impl Into<String>) -> Self {
        Check { statement: statement.into(), status: Status::Skipped, witness: Some(why.into()) }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
    pub version: &'static str,
}

impl Report {
    pub fn new(command: &str, config: Value) -> Self {
        Report {
            command: command.to_string(),
            config,
            checks: Vec::new(),
            result: Value::Null,
            timings: None,
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    pub fn failed(&self) -> Option<&Check> {
        self.checks.iter().find(|c| c.status == Status::Fail)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Writes through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = path.file_name().context("output path has no file name")?.to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp"));
    let mut f = fs::File::create(&tmp).with_context(|| format!("writing {}", tmp.display()))?;
    f.write_all(contents.as_bytes())?;
    f.sync_all()?;
    fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}

pub fn density_csv(curve: &DensityCurve) -> String {
    let mut out = String::from("N,count,density,density_approx\n");
    for n in 1..=curve.horizon {
        let count = curve.counts[n as usize - 1];
        let d = curve.density(n);
        out.push_str(&format!(
            "{n},{count},{}/{},{:.9e}\n",
            d.numer(),
            d.denom(),
            count as f64 / n as f64
        ));
    }
    out
}

pub fn norm_csv(norms: &[Dyadic]) -> String {
    let mut out = String::from("j,norm_mantissa,norm_exponent,norm_approx\n");
    for (j, v) in norms.iter().enumerate() {
        out.push_str(&format!("{j},{},{},{:.9e}\n", v.mantissa(), v.exponent(), v.to_f64()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use fhc_core::sets::prefix_density;

    #[test]
    fn even_numbers_rows() {
        let even: Vec<u64> = (0..10).step_by(2).collect();
        let csv = density_csv(&prefix_density(&even, 4));
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows[0], "N,count,density,density_approx");
        assert!(rows[2].starts_with("2,1,1/2,"));
    }

    #[test]
    fn empty_curve_is_header_only() {
        let csv = density_csv(&prefix_density(&[], 0));
        assert_eq!(csv, "N,count,density,density_approx\n");
        assert_eq!(norm_csv(&[]).lines().count(), 1);
    }
}
