//! Report documents and their table, CSV and JSON renderings.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::planar::SweepRow;
use crate::volume::TryStats;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub seed: u64,
    pub config: String,
    pub version: String,
}

impl ReportMeta {
    pub fn new(seed: u64, config: impl Into<String>) -> Self {
        Self {
            seed,
            config: config.into(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// One line of a trial table: the swept parameter and the try statistics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialRow {
    pub param: f64,
    pub mean: f64,
    pub sigma: f64,
    pub max: f64,
}

impl TrialRow {
    pub fn from_stats(param: f64, stats: &TryStats) -> Self {
        Self {
            param,
            mean: stats.mean,
            sigma: stats.sigma,
            max: stats.max,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReportBody {
    Trials {
        /// Column label of the swept parameter (`n` or `m`).
        param_name: String,
        rows: Vec<TrialRow>,
    },
    Sweep {
        rows: Vec<SweepRow>,
    },
    Scalar {
        result: Map<String, Value>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub meta: ReportMeta,
    #[serde(flatten)]
    pub body: ReportBody,
}

impl ReportDocument {
    pub fn trials(meta: ReportMeta, param_name: &str, rows: Vec<TrialRow>) -> Self {
        Self {
            meta,
            body: ReportBody::Trials {
                param_name: param_name.to_string(),
                rows,
            },
        }
    }

    pub fn scalar(meta: ReportMeta, result: Vec<(&str, Value)>) -> Self {
        Self {
            meta,
            body: ReportBody::Scalar {
                result: result.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// Formats like C's `%.{precision}g`.
pub fn format_g(x: f64, precision: usize) -> String {
    let p = precision.max(1);
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_fraction(mantissa), sign, exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn g7(x: f64) -> String {
    format_g(x, 7)
}

fn value_text(v: &Value) -> String {
    match v {
        Value::Number(n) => n.as_f64().map(g7).unwrap_or_else(|| n.to_string()),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join(" | ")
    };
    let mut out = line(header.to_vec());
    out.push('\n');
    out.push_str(
        &widths
            .iter()
            .map(|w| "-".repeat(*w))
            .collect::<Vec<_>>()
            .join("-+-"),
    );
    out.push('\n');
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

pub fn render_report(doc: &ReportDocument, format: Format) -> String {
    if format == Format::Json {
        let mut s = doc.to_json();
        s.push('\n');
        return s;
    }
    let (header, rows): (Vec<&str>, Vec<Vec<String>>) = match &doc.body {
        ReportBody::Trials { param_name, rows } => {
            let label = if format == Format::Table { param_name.as_str() } else { "param" };
            (
                vec![label, "mean", "sigma", "max"],
                rows.iter()
                    .map(|r| vec![g7(r.param), g7(r.mean), g7(r.sigma), g7(r.max)])
                    .collect(),
            )
        }
        ReportBody::Sweep { rows } => (
            vec!["spacing", "is_cover", "r_max", "once_density"],
            rows.iter()
                .map(|r| {
                    vec![
                        g7(r.spacing),
                        r.is_cover.to_string(),
                        g7(r.r_max),
                        g7(r.once_density),
                    ]
                })
                .collect(),
        ),
        ReportBody::Scalar { result } => (
            vec!["name", "value"],
            result
                .iter()
                .map(|(k, v)| vec![k.clone(), value_text(v)])
                .collect(),
        ),
    };
    match format {
        Format::Csv => csv(&header, &rows),
        _ => {
            let meta = &doc.meta;
            format!(
                "# config {} | seed {} | version {}\n{}",
                meta.config,
                meta.seed,
                meta.version,
                table(&header, &rows)
            )
        }
    }
}
