use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::BenchmarkRecord;
use crate::error::Result;

/// Mean gain over the successful circuits sharing a (qubits, layers) point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub qubits: usize,
    pub layers: usize,
    pub mean_gained: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerQubitRow {
    pub qubits: usize,
    /// Unweighted mean of `mean_gained / layers` over the layer groups.
    pub gained_per_layer: f64,
    pub groups: usize,
}

/// Rows sorted by (qubits, layers); failed records are skipped.
pub fn aggregate(records: &[BenchmarkRecord]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<(usize, usize), (f64, usize)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.ok() && r.layers > 0) {
        let e = groups.entry((r.qubits, r.layers)).or_default();
        e.0 += r.gained;
        e.1 += 1;
    }
    groups
        .into_iter()
        .map(|((qubits, layers), (sum, count))| AggregateRow { qubits, layers, mean_gained: sum / count as f64, count })
        .collect()
}

pub fn per_qubit(rows: &[AggregateRow]) -> Vec<PerQubitRow> {
    let mut by_n: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in rows {
        by_n.entry(r.qubits).or_default().push(r.mean_gained / r.layers as f64);
    }
    by_n.into_iter()
        .map(|(qubits, v)| PerQubitRow { qubits, gained_per_layer: v.iter().sum::<f64>() / v.len() as f64, groups: v.len() })
        .collect()
}

fn write_rows<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_records_csv<W: Write>(records: &[BenchmarkRecord], out: W) -> Result<()> {
    write_rows(records, out)
}

pub fn emit_csv<W: Write>(rows: &[AggregateRow], out: W) -> Result<()> {
    write_rows(rows, out)
}

pub fn emit_per_qubit_csv<W: Write>(rows: &[PerQubitRow], out: W) -> Result<()> {
    write_rows(rows, out)
}

/// One series per qubit count, points as `[layers, mean_gained]`.
pub fn emit_plot_data(rows: &[AggregateRow]) -> serde_json::Value {
    let mut series: BTreeMap<usize, Vec<serde_json::Value>> = BTreeMap::new();
    for r in rows {
        series.entry(r.qubits).or_default().push(serde_json::json!([r.layers, r.mean_gained]));
    }
    serde_json::json!({
        "x": "layers",
        "y": "mean_gained",
        "series": series
            .into_iter()
            .map(|(n, pts)| serde_json::json!({ "qubits": n, "points": pts }))
            .collect::<Vec<_>>(),
    })
}

const PALETTE: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

/// Scatter of mean gain against layer count, one colour per qubit count.
pub fn plot_svg(rows: &[AggregateRow]) -> String {
    let (w, h, m) = (640.0, 420.0, 50.0);
    let x_max = rows.iter().map(|r| r.layers).max().unwrap_or(1).max(1) as f64;
    let y_max = rows.iter().map(|r| r.mean_gained).fold(1.0f64, f64::max).ceil();
    let px = |x: f64| m + x / x_max * (w - 2.0 * m);
    let py = |y: f64| h - m - y / y_max * (h - 2.0 * m);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{m} {m} V{b} H{r}" stroke="black" fill="none"/>"#,
        b = h - m,
        r = w - m
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">layers</text>"#, w / 2.0, h - 12.0);
    let _ = writeln!(s, r#"<text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">mean gain (δπ)</text>"#, h / 2.0, h / 2.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{y_max}</text>"#, m - 4.0, m + 4.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">0</text>"#, m - 4.0, h - m + 4.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{x_max}</text>"#, w - m, h - m + 16.0);
    let mut qubit_counts: Vec<usize> = rows.iter().map(|r| r.qubits).collect();
    qubit_counts.sort_unstable();
    qubit_counts.dedup();
    for (i, n) in qubit_counts.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        for r in rows.iter().filter(|r| r.qubits == *n) {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{colour}"/>"#,
                px(r.layers as f64),
                py(r.mean_gained)
            );
        }
        let ly = m + 14.0 * i as f64;
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{ly:.2}" r="3" fill="{colour}"/>"#, w - m - 60.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{n} qubits</text>"#, w - m - 52.0, ly + 4.0);
    }
    s.push_str("</svg>\n");
    s
}
