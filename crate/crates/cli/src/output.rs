//! Tables and their CSV, JSON and SVG renderings.

use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA: u32 = 1;

/// One table cell; exact values travel as text.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Num(x) => Some(*x),
            Cell::Text(s) => s.parse().ok(),
        }
    }

    /// The text written to a CSV field.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format!("{x:e}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    /// Non-finite values become text (`inf`, `NaN`) so JSON stays valid.
    fn from(x: f64) -> Self {
        if x.is_finite() {
            Cell::Num(x)
        } else {
            Cell::Text(x.to_string())
        }
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// Which columns to draw: `x` against each of `y`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PlotSpec {
    pub title: String,
    pub x: String,
    pub y: Vec<String>,
}

/// Command output: the echoed configuration, a table and a free-form summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub config: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Value,
    #[serde(skip)]
    pub plot: Option<PlotSpec>,
}

impl Report {
    pub fn new(command: &str, config: Value, columns: &[&str]) -> Self {
        Report {
            schema: SCHEMA,
            command: command.to_string(),
            config,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: Value::Null,
            plot: None,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// CSV with the schema, configuration and summary as leading `#` lines.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        writeln!(out, "# schema: {}", self.schema)?;
        writeln!(out, "# command: {}", self.command)?;
        writeln!(out, "# config: {}", serde_json::to_string(&self.config)?)?;
        if !self.summary.is_null() {
            writeln!(out, "# summary: {}", serde_json::to_string(&self.summary)?)?;
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        out.push_str(std::str::from_utf8(&w.into_inner()?)?);
        Ok(out)
    }

    pub fn to_svg(&self) -> Result<String> {
        let spec = self.plot.as_ref().ok_or_else(|| anyhow!("`{}` has no plot; use csv or json", self.command))?;
        let xi = self.column(&spec.x).ok_or_else(|| anyhow!("no column {}", spec.x))?;
        let series: Vec<(String, Vec<(f64, f64)>)> = spec
            .y
            .iter()
            .map(|name| {
                let yi = self.column(name).ok_or_else(|| anyhow!("no column {name}"))?;
                let pts = self
                    .rows
                    .iter()
                    .filter_map(|r| Some((r[xi].as_f64()?, r[yi].as_f64()?)))
                    .filter(|(x, y)| x.is_finite() && y.is_finite())
                    .collect();
                Ok((name.clone(), pts))
            })
            .collect::<Result<_>>()?;
        Ok(line_plot(&spec.title, &spec.x, &series))
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Axes, one polyline per series, tick labels and a legend.
pub fn line_plot(title: &str, x_label: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let (w, h, left, right, top, bottom) = (640.0, 420.0, 70.0, 20.0, 40.0, 50.0);
    let pts = series.iter().flat_map(|(_, p)| p.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-300 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-300 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * (w - left - right);
    let sy = |y: f64| h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" font-size="15" text-anchor="middle">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<path d="M{left} {top} V{} H{}" fill="none" stroke="black"/>"#,
        h - bottom,
        w - right
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{}" font-size="11" text-anchor="middle">{}</text>"#,
            sx(xv),
            h - bottom + 16.0,
            tick(xv)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.1}" font-size="11" text-anchor="end">{}</text>"#,
            left - 6.0,
            sy(yv) + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#, w / 2.0, h - 12.0, escape(x_label));
    for (k, (name, p)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let coords: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, coords.join(" "));
        let ly = top + 14.0 * k as f64 + 6.0;
        let _ = writeln!(s, r#"<text x="{}" y="{ly}" font-size="11" fill="{color}">{}</text>"#, left + 10.0, escape(name));
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

/// Reads CSV written by [`Report::to_csv`].
pub fn read_csv(text: &str) -> Result<Report> {
    let mut meta = std::collections::HashMap::new();
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        if let Some((k, v)) = line[1..].trim().split_once(": ") {
            meta.insert(k.to_string(), v.to_string());
        }
    }
    let schema: u32 = meta.get("schema").context("missing schema line")?.parse()?;
    if schema != SCHEMA {
        bail!("unsupported schema {schema}");
    }
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let columns: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(parse_cell).collect());
    }
    let json = |k: &str| -> Result<Value> {
        meta.get(k).map(|v| serde_json::from_str(v)).transpose().map(|v| v.unwrap_or(Value::Null)).map_err(Into::into)
    };
    Ok(Report {
        schema,
        command: meta.get("command").cloned().unwrap_or_default(),
        config: json("config")?,
        columns,
        rows,
        summary: json("summary")?,
        plot: None,
    })
}

fn parse_cell(s: &str) -> Cell {
    if let Ok(i) = s.parse::<i64>() {
        Cell::Int(i)
    } else if let Ok(x) = s.parse::<f64>() {
        Cell::Num(x)
    } else {
        Cell::Text(s.to_string())
    }
}

/// Reads JSON written by [`Report::to_json`].
pub fn read_json(text: &str) -> Result<Report> {
    let r: Report = serde_json::from_str(text)?;
    if r.schema != SCHEMA {
        bail!("unsupported schema {}", r.schema);
    }
    Ok(r)
}
