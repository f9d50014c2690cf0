use std::fmt::Write as _;

use crate::config::OutputFormat;
use crate::report::{PredictionPayload, Report, ReportRow};

pub fn render(report: &Report, format: OutputFormat) -> Result<String, String> {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(report)
            .map(|s| s + "\n")
            .map_err(|e| e.to_string()),
        OutputFormat::Csv => csv_text(report).map_err(|e| e.to_string()),
        OutputFormat::Text => Ok(text(report)),
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn key(row: &ReportRow) -> [String; 3] {
    [row.p.to_string(), opt(row.kind), opt(row.k)]
}

fn omega_cell(row: &ReportRow) -> String {
    row.omega
        .as_ref()
        .map(|o| {
            o.iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .unwrap_or_default()
}

fn csv_text(report: &Report) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match report.command.as_str() {
        "eval" => {
            w.write_record(["P", "kind", "k", "n", "value"])?;
            for r in &report.rows {
                let [p, kind, k] = key(r);
                w.write_record([p, kind, k, opt(r.n), opt(r.value.clone())])?;
            }
        }
        "valuation" => {
            w.write_record(["P", "kind", "n", "valuation", "valuation_oracle", "status"])?;
            for r in &report.rows {
                w.write_record([
                    r.p.to_string(),
                    opt(r.kind),
                    opt(r.n),
                    opt(r.valuation),
                    opt(r.valuation_oracle),
                    status(r),
                ])?;
            }
        }
        "period" => {
            w.write_record(["P", "kind", "k", "period", "source", "status"])?;
            for r in &report.rows {
                let [p, kind, k] = key(r);
                let source = r.period_source.map(|s| enum_name(&s)).unwrap_or_default();
                w.write_record([p, kind, k, opt(r.period), source, status(r)])?;
            }
        }
        "census" | "predict" => {
            w.write_record(["P", "kind", "k", "residue", "count"])?;
            for r in &report.rows {
                let [p, kind, k] = key(r);
                match &r.prediction {
                    Some(PredictionPayload::Residue {
                        residue,
                        prediction,
                    }) => {
                        w.write_record([
                            &p,
                            &kind,
                            &k,
                            &residue.to_string(),
                            &prediction.count.to_string(),
                        ])?;
                    }
                    Some(PredictionPayload::Histogram(h)) => {
                        for (b, c) in h.iter() {
                            w.write_record([&p, &kind, &k, &b.to_string(), &c.to_string()])?;
                        }
                    }
                    None => {
                        for (b, c) in r.histogram.iter().flat_map(|h| h.iter()) {
                            w.write_record([&p, &kind, &k, &b.to_string(), &c.to_string()])?;
                        }
                    }
                }
            }
        }
        "verify" => {
            w.write_record(["P", "kind", "k", "case", "period", "status", "diffs"])?;
            for r in &report.rows {
                let [p, kind, k] = key(r);
                let diffs = r.diffs.as_ref().map(|d| d.len());
                w.write_record([
                    p,
                    kind,
                    k,
                    opt(r.case),
                    opt(r.period),
                    status(r),
                    opt(diffs),
                ])?;
            }
        }
        "omega" | "stability" => {
            w.write_record(["P", "kind", "k", "period", "omega", "differs_from_previous"])?;
            for r in &report.rows {
                let [p, kind, k] = key(r);
                w.write_record([
                    p,
                    kind,
                    k,
                    opt(r.period),
                    omega_cell(r),
                    opt(r.differs_from_previous),
                ])?;
            }
        }
        _ => {
            w.write_record(["P", "identity", "checked", "failed"])?;
            for r in &report.rows {
                for t in r.identities.iter().flatten() {
                    w.write_record([
                        r.p.to_string(),
                        t.identity.to_string(),
                        t.checked.to_string(),
                        t.failed.to_string(),
                    ])?;
                }
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn enum_name<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_value(value)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn status(row: &ReportRow) -> String {
    enum_name(&row.status)
}

fn text(report: &Report) -> String {
    let mut out = String::new();
    for r in &report.rows {
        let _ = write!(
            out,
            "{} P={} delta={} branch={}",
            r.command,
            r.p,
            r.delta,
            r.branch.as_str()
        );
        if let Some(kind) = r.kind {
            let _ = write!(out, " kind={kind}");
        }
        if let Some(k) = r.k {
            let _ = write!(out, " k={k}");
        }
        if let Some(case) = r.case {
            let _ = write!(out, " case={case}");
        }
        if let Some(h) = r.period {
            let _ = write!(out, " period={h}");
        }
        if let Some(n) = r.n {
            let _ = write!(out, " n={n}");
        }
        if let Some(v) = &r.value {
            let _ = write!(out, " value={v}");
        }
        if let Some(v) = r.valuation {
            let _ = write!(out, " valuation={v}");
        }
        if let Some(v) = r.valuation_oracle {
            let _ = write!(out, " oracle={v}");
        }
        if r.omega.is_some() {
            let _ = write!(out, " omega={{{}}}", omega_cell(r).replace(' ', ", "));
        }
        if let Some(d) = r.differs_from_previous {
            let _ = write!(out, " changed={d}");
        }
        if let Some(diffs) = &r.diffs {
            let _ = write!(out, " diffs={}", diffs.len());
        }
        let _ = writeln!(out, " status={}", status(r));
        let histogram = match &r.prediction {
            Some(PredictionPayload::Histogram(h)) => Some(h),
            Some(PredictionPayload::Residue {
                residue,
                prediction,
            }) => {
                let _ = writeln!(
                    out,
                    "  b={residue} count={} line={}{}",
                    prediction.count,
                    prediction.line,
                    prediction.l.map(|l| format!(" l={l}")).unwrap_or_default()
                );
                None
            }
            None => r.histogram.as_ref(),
        };
        if let Some(h) = histogram {
            for (b, c) in h.iter() {
                let _ = writeln!(out, "  {b:>10} {c}");
            }
        }
        for t in r.identities.iter().flatten() {
            let _ = writeln!(
                out,
                "  {:<16} checked={} failed={}",
                t.identity, t.checked, t.failed
            );
        }
        for flag in &r.discrepancy_flags {
            let _ = writeln!(out, "  note[{flag}]: {}", flag.description());
        }
    }
    out
}
