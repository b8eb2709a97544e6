//! Report rendering. Every format carries the full configuration and seed so
//! a report can be reproduced from the file alone; nothing time-dependent is
//! written.

use std::fmt::Write as _;

use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Aligned columns for reading in a terminal.
    Table,
    /// `key=value` lines under a versioned header.
    Text,
    /// `# key=value` comment lines, a header row, then one row per record.
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    /// `correctness`, `game` or `analyze`.
    pub kind: &'static str,
    pub config: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// `false` when a built-in check failed; the binary then exits with 1.
    pub passed: bool,
}

impl Report {
    pub fn new(kind: &'static str, columns: &[&str]) -> Self {
        Self {
            kind,
            config: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            passed: true,
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.config.push((key.to_owned(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn status(&self) -> &'static str {
        if self.passed {
            "pass"
        } else {
            "fail"
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Csv => self.render_csv(),
            Format::Table => self.render_table(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = format!("# qpke-lab {} report v1\n", self.kind);
        for (k, v) in &self.config {
            let _ = writeln!(out, "{k}={v}");
        }
        for row in &self.rows {
            let fields: Vec<String> = self.columns.iter().zip(row).map(|(c, v)| format!("{c}={v}")).collect();
            let _ = writeln!(out, "record {}", fields.join(" "));
        }
        let _ = writeln!(out, "status={}", self.status());
        out
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.config {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "# status={}", self.status());
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    fn render_table(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.config.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "{} | {}", self.kind, header.join(" "));
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|i| self.rows.iter().map(|r| r[i].len()).chain([self.columns[i].len()]).max().unwrap_or(0))
            .collect();
        let line = |cells: &[String]| {
            cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_owned()
        };
        let _ = writeln!(out, "{}", line(&self.columns));
        let _ = writeln!(out, "{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
        for row in &self.rows {
            let _ = writeln!(out, "{}", line(row));
        }
        let _ = writeln!(out, "status: {}", self.status());
        out
    }
}

/// Fixed-precision float formatting shared by every report.
pub fn num(x: f64) -> String {
    format!("{x:.6}")
}

pub fn sci(x: f64) -> String {
    format!("{x:.3e}")
}
