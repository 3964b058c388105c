use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// One method × sequence × image measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkRecord {
    pub image: String,
    pub method: String,
    pub sequence: String,
    pub psnr_db: f64,
    pub ssim: f64,
    /// Mean reconstruction time per block in milliseconds.
    pub block_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchmarkReport {
    pub crop: usize,
    pub records: Vec<BenchmarkRecord>,
}

/// Means of one group of records.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Summary {
    pub count: usize,
    pub psnr_db: f64,
    pub ssim: f64,
    pub block_ms: f64,
}

const FSMR: &str = "fsmr";

fn summarize<'a>(records: impl Iterator<Item = &'a BenchmarkRecord>) -> Summary {
    let mut s = Summary::default();
    for r in records {
        s.count += 1;
        s.psnr_db += r.psnr_db;
        s.ssim += r.ssim;
        s.block_ms += r.block_ms;
    }
    if s.count > 0 {
        let n = s.count as f64;
        s.psnr_db /= n;
        s.ssim /= n;
        s.block_ms /= n;
    }
    s
}

/// Speed-up of `method_ms` relative to the FSMR time, one decimal.
pub fn format_speedup(fsmr_ms: f64, method_ms: f64) -> String {
    if method_ms > 0.0 && fsmr_ms.is_finite() && method_ms.is_finite() {
        format!("{:.1}", fsmr_ms / method_ms)
    } else {
        String::new()
    }
}

fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.4}")
    } else if v > 0.0 {
        "inf".into()
    } else if v < 0.0 {
        "-inf".into()
    } else {
        "nan".into()
    }
}

fn json_f64(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(fmt_f64(v))
    }
}

impl BenchmarkReport {
    pub fn new(crop: usize) -> Self {
        Self {
            crop,
            records: Vec::new(),
        }
    }

    /// Names in order of first appearance.
    fn distinct(&self, key: impl Fn(&BenchmarkRecord) -> &str) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.records {
            if !out.iter().any(|s| s == key(r)) {
                out.push(key(r).to_string());
            }
        }
        out
    }

    pub fn methods(&self) -> Vec<String> {
        self.distinct(|r| &r.method)
    }

    pub fn sequences(&self) -> Vec<String> {
        self.distinct(|r| &r.sequence)
    }

    pub fn summary(&self, method: &str, sequence: Option<&str>) -> Summary {
        summarize(
            self.records
                .iter()
                .filter(|r| r.method == method && sequence.is_none_or(|s| r.sequence == s)),
        )
    }

    /// Speed-up of a row against the FSMR row of the same image and sequence.
    pub fn speedup(&self, record: &BenchmarkRecord) -> Option<f64> {
        self.records
            .iter()
            .find(|r| r.method == FSMR && r.image == record.image && r.sequence == record.sequence)
            .map(|f| f.block_ms / record.block_ms)
            .filter(|v| v.is_finite())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = ["image", "method", "sequence", "psnr_db", "ssim", "block_ms", "speedup"];
        let err = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        w.write_record(header).map_err(err)?;
        for r in &self.records {
            let speedup = self
                .records
                .iter()
                .find(|f| f.method == FSMR && f.image == r.image && f.sequence == r.sequence)
                .map(|f| format_speedup(f.block_ms, r.block_ms))
                .unwrap_or_default();
            w.write_record([
                r.image.clone(),
                r.method.clone(),
                r.sequence.clone(),
                fmt_f64(r.psnr_db),
                format!("{:.6}", r.ssim),
                format!("{:.4}", r.block_ms),
                speedup,
            ])
            .map_err(err)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Value {
        let fsmr = self.summary(FSMR, None);
        let mut methods = BTreeMap::new();
        for m in self.methods() {
            let s = self.summary(&m, None);
            let mut per_sequence = BTreeMap::new();
            for seq in self.sequences() {
                let q = self.summary(&m, Some(&seq));
                if q.count > 0 {
                    per_sequence.insert(
                        seq,
                        json!({
                            "psnr_db": json_f64(q.psnr_db),
                            "ssim": json_f64(q.ssim),
                            "block_ms": json_f64(q.block_ms),
                        }),
                    );
                }
            }
            let speedup = if fsmr.count > 0 {
                Value::String(format_speedup(fsmr.block_ms, s.block_ms))
            } else {
                Value::Null
            };
            methods.insert(
                m,
                json!({
                    "count": s.count,
                    "psnr_db": json_f64(s.psnr_db),
                    "ssim": json_f64(s.ssim),
                    "block_ms": json_f64(s.block_ms),
                    "speedup": speedup,
                    "sequences": per_sequence,
                }),
            );
        }
        json!({
            "crop": self.crop,
            "images": self.distinct(|r| &r.image).len(),
            "sequences": self.sequences(),
            "methods": methods,
        })
    }

    /// Fixed-width table of mean PSNR, one row per sequence and one column
    /// per method.
    pub fn psnr_table(&self) -> String {
        let methods = self.methods();
        let mut out = format!("{:<12}", "sequence");
        for m in &methods {
            out.push_str(&format!("{m:>19}"));
        }
        out.push('\n');
        for seq in self.sequences() {
            out.push_str(&format!("{seq:<12}"));
            for m in &methods {
                let s = self.summary(m, Some(&seq));
                let cell = if s.count == 0 { "-".into() } else { format!("{:.2}", s.psnr_db) };
                out.push_str(&format!("{cell:>19}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Path of the JSON summary written next to a CSV report.
pub fn summary_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Writes the CSV report to `path` and the JSON summary beside it.
pub fn emit_report(report: &BenchmarkReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, report.to_csv()?).map_err(|e| Error::io(path, e))?;
    let json_path = summary_path(path);
    let text = serde_json::to_string_pretty(&report.to_json()).expect("json values serialize");
    fs::write(&json_path, text + "\n").map_err(|e| Error::io(&json_path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(method: &str, ms: f64) -> BenchmarkRecord {
        BenchmarkRecord {
            image: "a".into(),
            method: method.into(),
            sequence: "zoom15".into(),
            psnr_db: 40.0,
            ssim: 0.99,
            block_ms: ms,
        }
    }

    #[test]
    fn empty_report_is_header_only() {
        let csv = BenchmarkReport::new(24).to_csv().unwrap();
        assert_eq!(csv, "image,method,sequence,psnr_db,ssim,block_ms,speedup\n");
    }

    #[test]
    fn speedup_convention() {
        assert_eq!(format_speedup(555.8, 38.3), "14.5");
        let report = BenchmarkReport {
            crop: 24,
            records: vec![rec("fsmr", 555.8), rec("afsmr", 38.3)],
        };
        let csv = report.to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[1].ends_with(",1.0"));
        assert!(lines[2].ends_with(",14.5"), "{}", lines[2]);
        let json = report.to_json();
        assert_eq!(json["crop"], 24);
        assert_eq!(json["methods"]["afsmr"]["speedup"], "14.5");
    }

    #[test]
    fn single_method_has_empty_speedup() {
        let report = BenchmarkReport {
            crop: 24,
            records: vec![rec("afsmr", 3.0)],
        };
        assert!(report.to_csv().unwrap().lines().nth(1).unwrap().ends_with("3.0000,"));
        assert_eq!(report.to_json()["methods"]["afsmr"]["speedup"], Value::Null);
    }

    #[test]
    fn infinite_psnr_serializes() {
        let mut r = rec("bicubic", 1.0);
        r.psnr_db = f64::INFINITY;
        let report = BenchmarkReport { crop: 0, records: vec![r] };
        assert!(report.to_csv().unwrap().contains(",inf,"));
        assert_eq!(report.to_json()["methods"]["bicubic"]["psnr_db"], "inf");
    }

    #[test]
    fn writes_both_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out/report.csv");
        let report = BenchmarkReport { crop: 24, records: vec![rec("afsmr", 2.0)] };
        emit_report(&report, &path).unwrap();
        assert!(path.exists());
        let json: Value = serde_json::from_str(&fs::read_to_string(summary_path(&path)).unwrap()).unwrap();
        assert_eq!(json["images"], 1);
        assert!(report.psnr_table().contains("40.00"));
    }
}
