//! Report serialization. Output depends only on the report, so two calls
//! give identical bytes.

use std::fmt::Write;

use serde_json::{json, Value};

use pinchlab::functional::QValue;
use pinchlab::Scalar;

use crate::{Format, RunReport};

pub fn q_value_json<T: Scalar>(q: &QValue<T>) -> Value {
    json!({
        "q1": q.q1.to_json(),
        "q2": q.q2.to_json(),
        "eps": q.eps.to_json(),
        "coeffs": q.coeffs.to_json(),
    })
}

pub fn emit(report: &RunReport, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.to_json()).expect("plain data");
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => csv(report).into_bytes(),
        Format::Text => text(report).into_bytes(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn csv(report: &RunReport) -> String {
    if report.config.table == Some(true) {
        if let Some(lit) = &report.literature {
            return literature_csv(lit);
        }
    }
    if let Some(gaps) = &report.gap_csv {
        return gaps.clone();
    }
    let mut out = String::from("check,passed,detail\n");
    for c in &report.checks {
        let _ = writeln!(out, "{},{},{}", csv_field(&c.name), c.passed, csv_field(&c.detail.to_string()));
    }
    out
}

fn constant_keys(lit: &Value) -> Vec<(String, String)> {
    lit["constants"]
        .as_array()
        .map(|cs| {
            cs.iter()
                .map(|c| (plain(&c["key"]), plain(&c["exact"])))
                .collect()
        })
        .unwrap_or_default()
}

fn literature_csv(lit: &Value) -> String {
    let keys = constant_keys(lit);
    let mut out = String::from("model,ratio,exact_ratio,einstein");
    for (k, _) in &keys {
        let _ = write!(out, ",meets_{k}");
    }
    out.push('\n');
    for row in lit["models"].as_array().into_iter().flatten() {
        let _ = write!(
            out,
            "{},{},{},{}",
            csv_field(&plain(&row["model"])),
            plain(&row["ratio"]),
            plain(&row["exactRatio"]),
            plain(&row["einstein"])
        );
        for (k, _) in &keys {
            let _ = write!(out, ",{}", plain(&row["meets"][k]));
        }
        out.push('\n');
    }
    out
}

fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s:<w$}", w = widths[c]))
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}

fn literature_text(lit: &Value) -> String {
    let keys = constant_keys(lit);
    let mut out = String::from("Pinching constants\n");
    let mut rows = vec![vec!["key".to_owned(), "exact".to_owned(), "value".to_owned()]];
    for c in lit["constants"].as_array().into_iter().flatten() {
        rows.push(vec![plain(&c["key"]), plain(&c["exact"]), format!("{:.6}", c["value"].as_f64().unwrap_or(f64::NAN))]);
    }
    out += &aligned(&rows);
    out.push('\n');
    let mut header = vec!["model".to_owned(), "minSec/R".to_owned(), "exact".to_owned(), "einstein".to_owned()];
    header.extend(keys.iter().map(|(k, _)| format!(">= {k}")));
    let mut rows = vec![header];
    for row in lit["models"].as_array().into_iter().flatten() {
        let ratio = row["ratio"].as_f64().map_or("-".to_owned(), |r| format!("{r:.6}"));
        let mut r = vec![plain(&row["model"]), ratio, plain(&row["exactRatio"]), plain(&row["einstein"])];
        r.extend(keys.iter().map(|(k, _)| match &row["meets"][k] {
            Value::Bool(true) => "yes".to_owned(),
            Value::Bool(false) => "no".to_owned(),
            _ => "-".to_owned(),
        }));
        rows.push(r);
    }
    out += &aligned(&rows);
    out
}

fn text(report: &RunReport) -> String {
    let mut out = String::new();
    let mut rows = Vec::new();
    for c in &report.checks {
        rows.push(vec![if c.passed { "PASS" } else { "FAIL" }.to_owned(), c.name.clone()]);
    }
    out += &aligned(&rows);

    let gap_rows: Vec<Vec<String>> = report
        .checks
        .iter()
        .filter(|c| c.detail.get("minGap1").is_some())
        .map(|c| {
            let d = &c.detail;
            vec![
                plain(&d["n"]),
                plain(&d["eps"]),
                plain(&d["samples"]),
                plain(&d["violations"]),
                plain(&d["minGap1"]),
                plain(&d["minGap2"]),
            ]
        })
        .collect();
    if !gap_rows.is_empty() {
        let mut rows = vec![["n", "eps", "samples", "violations", "minGap1", "minGap2"].map(String::from).to_vec()];
        rows.extend(gap_rows);
        out.push_str("\nGap summary\n");
        out += &aligned(&rows);
    }
    if let Some(lit) = &report.literature {
        out.push('\n');
        out += &literature_text(lit);
    }
    if !report.notes.is_empty() {
        out.push_str("\nNotes\n");
        for n in &report.notes {
            let _ = writeln!(out, "  {n}");
        }
    }
    let _ = writeln!(
        out,
        "\n{} checks, {} violations, exit {}, digest {}",
        report.checks.len(),
        report.violations.len(),
        report.exit_status,
        report.digest
    );
    out
}
