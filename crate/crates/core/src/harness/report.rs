use crate::forage::{Algorithm, TracePoint};
use crate::model::{ShopVariant, Time};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::path::Path;

/// One solver run, as emitted in CSV/JSON reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: String,
    pub shop: ShopVariant,
    pub algo: Algorithm,
    pub seed: u64,
    pub best_makespan: Time,
    pub evaluations: u64,
    /// Wall-clock time; only recorded when timing is requested, since it would
    /// otherwise break byte-identical reruns.
    pub seconds: Option<f64>,
    pub trace: Vec<TracePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub const CSV_HEADER: &str = "instance,shop,algo,seed,best_makespan,evaluations,seconds";

#[derive(Serialize)]
struct CsvRow<'a> {
    instance: &'a str,
    shop: ShopVariant,
    algo: Algorithm,
    seed: u64,
    best_makespan: Time,
    evaluations: u64,
    seconds: Option<f64>,
}

/// Orders names with embedded numbers numerically, so `rnd5x5` sorts before `rnd10x10`.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn chunks(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            if i == bytes.len() || bytes[i].is_ascii_digit() != bytes[start].is_ascii_digit() {
                out.push((bytes[start].is_ascii_digit(), &s[start..i]));
                start = i;
            }
        }
        out
    }
    let (ca, cb) = (chunks(a), chunks(b));
    for ((da, sa), (db, sb)) in ca.iter().zip(&cb) {
        let ord = if *da && *db {
            let (ta, tb) = (sa.trim_start_matches('0'), sb.trim_start_matches('0'));
            ta.len().cmp(&tb.len()).then_with(|| ta.cmp(tb))
        } else {
            sa.cmp(sb)
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    ca.len().cmp(&cb.len()).then_with(|| a.cmp(b))
}

pub fn sort_reports(reports: &mut [RunReport]) {
    reports.sort_by(|a, b| {
        natural_cmp(&a.instance, &b.instance)
            .then(a.shop.cmp(&b.shop))
            .then(a.algo.cmp(&b.algo))
            .then(a.seed.cmp(&b.seed))
    });
}

pub fn reports_to_csv(reports: &[RunReport]) -> Result<String, ReportError> {
    let mut sorted = reports.to_vec();
    sort_reports(&mut sorted);
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for r in &sorted {
        writer.serialize(CsvRow {
            instance: &r.instance,
            shop: r.shop,
            algo: r.algo,
            seed: r.seed,
            best_makespan: r.best_makespan,
            evaluations: r.evaluations,
            seconds: r.seconds,
        })?;
    }
    let bytes = writer.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    let body = String::from_utf8(bytes)
        .expect("csv output is utf-8");
    Ok(format!("{CSV_HEADER}\n{body}"))
}

pub fn reports_to_json(reports: &[RunReport]) -> Result<String, ReportError> {
    let mut sorted = reports.to_vec();
    sort_reports(&mut sorted);
    let mut out = serde_json::to_string_pretty(&sorted)?;
    out.push('\n');
    Ok(out)
}

pub fn render_reports(reports: &[RunReport], format: ReportFormat) -> Result<String, ReportError> {
    match format {
        ReportFormat::Csv => reports_to_csv(reports),
        ReportFormat::Json => reports_to_json(reports),
    }
}

/// Writes reports sorted by `(instance, shop, algo, seed)`.
pub fn write_report(reports: &[RunReport], format: ReportFormat, path: &Path) -> Result<(), ReportError> {
    let text = render_reports(reports, format)?;
    std::fs::write(path, text).map_err(|source| ReportError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_json_reports(text: &str) -> Result<Vec<RunReport>, ReportError> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(instance: &str, shop: ShopVariant, algo: Algorithm, seed: u64) -> RunReport {
        RunReport {
            instance: instance.to_string(),
            shop,
            algo,
            seed,
            best_makespan: 7,
            evaluations: 120,
            seconds: None,
            trace: vec![
                TracePoint { step: 0, makespan: 9 },
                TracePoint { step: 3, makespan: 7 },
            ],
        }
    }

    #[test]
    fn single_row_csv() {
        let csv = reports_to_csv(&[report("table1", ShopVariant::Mixed, Algorithm::Abfo, 42)]).unwrap();
        assert_eq!(csv, format!("{CSV_HEADER}\ntable1,mixed,abfo,42,7,120,\n"));
    }

    #[test]
    fn timed_row_has_seconds() {
        let mut r = report("t", ShopVariant::Open, Algorithm::Bfo, 1);
        r.seconds = Some(0.5);
        let csv = reports_to_csv(&[r]).unwrap();
        assert!(csv.ends_with("t,open,bfo,1,7,120,0.5\n"), "{csv}");
    }

    #[test]
    fn empty_csv_is_header_only() {
        assert_eq!(reports_to_csv(&[]).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn rows_are_sorted() {
        let reports = vec![
            report("rnd10x10", ShopVariant::Job, Algorithm::Abfo, 0),
            report("rnd5x5", ShopVariant::Mixed, Algorithm::Bfo, 2),
            report("rnd5x5", ShopVariant::Mixed, Algorithm::Abfo, 10),
            report("rnd5x5", ShopVariant::Mixed, Algorithm::Abfo, 2),
            report("rnd5x5", ShopVariant::Job, Algorithm::Bfo, 2),
        ];
        let csv = reports_to_csv(&reports).unwrap();
        let keys: Vec<&str> = csv.lines().skip(1).map(|l| l.rsplitn(4, ',').last().unwrap()).collect();
        assert_eq!(
            keys,
            [
                "rnd5x5,job,bfo,2",
                "rnd5x5,mixed,abfo,2",
                "rnd5x5,mixed,abfo,10",
                "rnd5x5,mixed,bfo,2",
                "rnd10x10,job,abfo,0"
            ]
        );
    }

    #[test]
    fn json_round_trip() {
        let reports = vec![
            report("a", ShopVariant::Flow, Algorithm::Abfo, 3),
            RunReport {
                seconds: Some(1.25),
                ..report("b", ShopVariant::Open, Algorithm::Bfo, 4)
            },
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        write_report(&reports, ReportFormat::Json, &path).unwrap();
        let back = read_json_reports(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(back, reports);
        assert!(std::fs::read_to_string(&path).unwrap().contains("\"trace\""));
    }

    #[test]
    fn unwritable_path_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("r.csv");
        assert!(matches!(
            write_report(&[], ReportFormat::Csv, &path),
            Err(ReportError::Io { .. })
        ));
    }

    #[test]
    fn natural_order() {
        assert_eq!(natural_cmp("rnd5x5", "rnd10x10"), Ordering::Less);
        assert_eq!(natural_cmp("rnd7x7", "rnd7x7"), Ordering::Equal);
        assert_eq!(natural_cmp("a", "b"), Ordering::Less);
    }
}
