//! Deterministic JSON and CSV report serialization.
//!
//! JSON key order follows struct declaration order, floats are printed with
//! 17 significant digits (`{:.16e}`), which round-trips every finite `f64`
//! exactly, and nothing run-dependent is written unless `--timing` was
//! requested — identical configurations therefore serialize to identical
//! bytes. JSON is the lossless format (`parse(serialize(x)) = x`); CSV is a
//! plot-ready projection with the column orders documented on
//! [`to_csv_bytes`].

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::config::{Format, RunConfig};

/// Echo of the resolved configuration, embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub command: String,
    pub weights: Vec<f64>,
    pub norm: String,
    pub theorem: Option<String>,
    pub family: Option<String>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub q_dim: f64,
    pub big_r: f64,
    pub profile: Option<String>,
    pub eps: Option<Vec<f64>>,
    pub euclidean: bool,
    pub n: Option<usize>,
    pub function: Option<String>,
    pub mc_samples: Option<u64>,
    pub seed: Option<u64>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub tol_margin: f64,
    pub jobs: Option<usize>,
    pub format: String,
}

impl ConfigEcho {
    /// Captures the resolved configuration.
    pub fn from_config(config: &RunConfig) -> ConfigEcho {
        ConfigEcho {
            command: config.command.key().to_string(),
            weights: config.weights.clone(),
            norm: config.norm_name.clone(),
            theorem: config
                .chain
                .map(|c| c.key().to_string())
                .or_else(|| config.theorem.map(|t| t.key().to_string())),
            family: config.family.map(|f| f.key().to_string()),
            p: config.p,
            q: config.q,
            q_dim: config.q_dim,
            big_r: config.big_r,
            profile: config.profile.as_ref().map(|p| p.name()),
            eps: config.eps.clone(),
            euclidean: config.euclidean,
            n: config.n,
            function: config.function.as_ref().map(|f| f.name()),
            mc_samples: config.mc_samples,
            seed: config.seed,
            rel_tol: config.rel_tol,
            abs_tol: config.abs_tol,
            tol_margin: config.tol_margin,
            jobs: config.jobs,
            format: config.format.key().to_string(),
        }
    }
}

/// A named sub-quantity (factor of a product, summand, raw integral).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Part {
    pub name: String,
    pub value: f64,
}

/// One result row. `kind` discriminates which fields are populated:
/// `verify` rows carry the two-sided comparison, `chain` rows the Euclidean
/// three-member chain, `sweep` rows one family member, `remainder` rows the
/// exact-identity terms. Unpopulated fields serialize as `null` (JSON) or
/// empty (CSV); `error` is set when a member could not be evaluated.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub kind: String,
    pub case: String,
    pub theorem: String,
    pub pass: Option<bool>,
    pub eps: Option<f64>,
    pub lhs: Option<f64>,
    pub mid: Option<f64>,
    pub rhs: Option<f64>,
    pub constant: Option<f64>,
    pub ratio: Option<f64>,
    pub err_lhs: Option<f64>,
    pub err_mid: Option<f64>,
    pub err_rhs: Option<f64>,
    pub r_at_sup: Option<f64>,
    pub pass_lhs_mid: Option<bool>,
    pub pass_mid_rhs: Option<bool>,
    pub term_u: Option<f64>,
    pub term_v: Option<f64>,
    pub term_rem: Option<f64>,
    pub residual: Option<f64>,
    pub err_estimate: Option<f64>,
    pub p2_identity_rel_dev: Option<f64>,
    pub parts: Vec<Part>,
    pub error: Option<String>,
}

/// Aggregates over the result rows; sweep-only fields stay `null` elsewhere.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// Every row verified and passed.
    pub all_pass: bool,
    pub cases: usize,
    pub passes: usize,
    pub failures: usize,
    /// Rows that could not be evaluated at all.
    pub errors: usize,
    /// Constant under test (sweeps).
    pub constant: Option<f64>,
    /// Largest swept ratio.
    pub max_ratio: Option<f64>,
    /// Ratio of the smallest-ε member.
    pub final_ratio: Option<f64>,
    /// Every sweep member verified.
    pub complete: Option<bool>,
    /// Ratios over the last three grid entries are nondecreasing (within
    /// 1e-4); informational, not a pass criterion.
    pub tail_nondecreasing: Option<bool>,
}

/// A complete report: configuration echo, summary, rows, library version.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub version: String,
    pub command: String,
    pub config: ConfigEcho,
    pub summary: Summary,
    pub results: Vec<ResultRow>,
    /// Set when the command aborted before producing its rows.
    pub error: Option<String>,
    /// Elapsed milliseconds; present only with `--timing`.
    pub wall_time_ms: Option<u64>,
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

/// Compact JSON formatter printing floats with 17 significant digits.
/// Non-finite values (which no verifier emits) degrade to `null` so the
/// output stays valid JSON.
struct SciFloats;

impl serde_json::ser::Formatter for SciFloats {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes any report component to single-line JSON with a trailing
/// newline. An empty row list serializes to the literal `[]`.
pub fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFloats);
    value
        .serialize(&mut ser)
        .expect("in-memory JSON serialization cannot fail");
    out.push(b'\n');
    out
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// 17-significant-digit float rendering shared by both formats.
pub fn fmt_float(value: f64) -> String {
    format!("{value:.16e}")
}

fn csv_field(text: &str) -> String {
    if text.contains(',') || text.contains('"') || text.contains('\n') {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

fn float_cell(value: Option<f64>) -> String {
    value.map(fmt_float).unwrap_or_default()
}

fn bool_cell(value: Option<bool>) -> String {
    value.map(|b| b.to_string()).unwrap_or_default()
}

fn write_csv_line(out: &mut Vec<u8>, cells: &[String]) {
    let line = cells
        .iter()
        .map(|c| csv_field(c))
        .collect::<Vec<_>>()
        .join(",");
    out.extend_from_slice(line.as_bytes());
    out.push(b'\n');
}

/// Serializes the rows as CSV. Column orders, exactly:
///
/// - `verify` (radial):
///   `case,theorem,pass,lhs,rhs,constant,ratio,err_lhs,err_rhs,r_at_sup`
/// - `verify --euclidean`:
///   `case,theorem,pass,lhs,mid,rhs,constant,err_lhs,err_mid,err_rhs`
/// - `sweep`: `eps,ratio,lhs,rhs`
/// - `remainder`:
///   `case,term_u,term_v,term_rem,residual,err_estimate,p2_identity_rel_dev`
/// - `suite`: `kind,case,theorem,pass,lhs,rhs,constant,ratio,err_lhs,err_rhs,`
///   `r_at_sup,term_u,term_v,term_rem,residual,err_estimate,p2_identity_rel_dev`
///
/// Cells of unverified members are left empty. Fields containing commas,
/// quotes, or newlines are double-quoted with `""` escaping.
pub fn to_csv_bytes(record: &ReportRecord) -> Vec<u8> {
    let mut out = Vec::new();
    match (record.command.as_str(), record.config.euclidean) {
        ("verify", false) => {
            write_csv_line(
                &mut out,
                &"case,theorem,pass,lhs,rhs,constant,ratio,err_lhs,err_rhs,r_at_sup"
                    .split(',')
                    .map(String::from)
                    .collect::<Vec<_>>(),
            );
            for row in &record.results {
                write_csv_line(
                    &mut out,
                    &[
                        row.case.clone(),
                        row.theorem.clone(),
                        bool_cell(row.pass),
                        float_cell(row.lhs),
                        float_cell(row.rhs),
                        float_cell(row.constant),
                        float_cell(row.ratio),
                        float_cell(row.err_lhs),
                        float_cell(row.err_rhs),
                        float_cell(row.r_at_sup),
                    ],
                );
            }
        }
        ("verify", true) => {
            write_csv_line(
                &mut out,
                &"case,theorem,pass,lhs,mid,rhs,constant,err_lhs,err_mid,err_rhs"
                    .split(',')
                    .map(String::from)
                    .collect::<Vec<_>>(),
            );
            for row in &record.results {
                write_csv_line(
                    &mut out,
                    &[
                        row.case.clone(),
                        row.theorem.clone(),
                        bool_cell(row.pass),
                        float_cell(row.lhs),
                        float_cell(row.mid),
                        float_cell(row.rhs),
                        float_cell(row.constant),
                        float_cell(row.err_lhs),
                        float_cell(row.err_mid),
                        float_cell(row.err_rhs),
                    ],
                );
            }
        }
        ("sweep", _) => {
            write_csv_line(
                &mut out,
                &["eps".into(), "ratio".into(), "lhs".into(), "rhs".into()],
            );
            for row in &record.results {
                write_csv_line(
                    &mut out,
                    &[
                        float_cell(row.eps),
                        float_cell(row.ratio),
                        float_cell(row.lhs),
                        float_cell(row.rhs),
                    ],
                );
            }
        }
        ("remainder", _) => {
            write_csv_line(
                &mut out,
                &"case,term_u,term_v,term_rem,residual,err_estimate,p2_identity_rel_dev"
                    .split(',')
                    .map(String::from)
                    .collect::<Vec<_>>(),
            );
            for row in &record.results {
                write_csv_line(
                    &mut out,
                    &[
                        row.case.clone(),
                        float_cell(row.term_u),
                        float_cell(row.term_v),
                        float_cell(row.term_rem),
                        float_cell(row.residual),
                        float_cell(row.err_estimate),
                        float_cell(row.p2_identity_rel_dev),
                    ],
                );
            }
        }
        _ => {
            write_csv_line(
                &mut out,
                &"kind,case,theorem,pass,lhs,rhs,constant,ratio,err_lhs,err_rhs,r_at_sup,\
                  term_u,term_v,term_rem,residual,err_estimate,p2_identity_rel_dev"
                    .split(',')
                    .map(|c| c.trim().to_string())
                    .collect::<Vec<_>>(),
            );
            for row in &record.results {
                write_csv_line(
                    &mut out,
                    &[
                        row.kind.clone(),
                        row.case.clone(),
                        row.theorem.clone(),
                        bool_cell(row.pass),
                        float_cell(row.lhs),
                        float_cell(row.rhs),
                        float_cell(row.constant),
                        float_cell(row.ratio),
                        float_cell(row.err_lhs),
                        float_cell(row.err_rhs),
                        float_cell(row.r_at_sup),
                        float_cell(row.term_u),
                        float_cell(row.term_v),
                        float_cell(row.term_rem),
                        float_cell(row.residual),
                        float_cell(row.err_estimate),
                        float_cell(row.p2_identity_rel_dev),
                    ],
                );
            }
        }
    }
    out
}

/// Serializes a record in the requested format.
pub fn serialize(record: &ReportRecord, format: Format) -> Vec<u8> {
    match format {
        Format::Json => to_json_bytes(record),
        Format::Csv => to_csv_bytes(record),
    }
}

/// Writes the report to `path`, or to stdout when no path is given.
pub fn emit(bytes: &[u8], path: Option<&std::path::Path>) -> io::Result<()> {
    match path {
        Some(path) => std::fs::write(path, bytes),
        None => io::stdout().lock().write_all(bytes),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_print_seventeen_significant_digits() {
        assert_eq!(fmt_float(0.9411605366450894), "9.4116053664508940e-1");
        assert_eq!(fmt_float(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_float(-2.5e-300), "-2.5000000000000000e-300");
        // 17 digits round-trip every f64 exactly.
        for &v in &[std::f64::consts::PI, 2.0_f64.sqrt(), 1.0 / 3.0, 6.02e23] {
            let text = fmt_float(v);
            assert_eq!(text.parse::<f64>().unwrap(), v, "{text}");
        }
    }

    #[test]
    fn json_floats_use_the_same_rendering_and_stay_valid() {
        let bytes = to_json_bytes(&vec![0.9411605366450894_f64, 1.0]);
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(text, "[9.4116053664508940e-1,1.0000000000000000e0]\n");
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, vec![0.9411605366450894, 1.0]);
    }

    #[test]
    fn empty_rows_serialize_to_the_empty_json_array() {
        let rows: Vec<ResultRow> = Vec::new();
        assert_eq!(to_json_bytes(&rows), b"[]\n");
    }

    #[test]
    fn csv_fields_with_commas_are_quoted() {
        assert_eq!(csv_field("LH2|Q=4|p=2|R=1|bump:0.2,0.8"), "\"LH2|Q=4|p=2|R=1|bump:0.2,0.8\"");
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }
}
