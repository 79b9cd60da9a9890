use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

/// Rows of one CSV artifact; the first row is the header.
pub struct CsvTable {
    pub name: String,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(name: &str, header: &[&str]) -> Self {
        CsvTable { name: name.to_string(), rows: vec![header.iter().map(|h| h.to_string()).collect()] }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// Everything a scenario produces.
pub struct Report {
    pub text: String,
    pub json: serde_json::Value,
    pub csv: Vec<CsvTable>,
}

impl Report {
    pub fn new(json: impl Serialize) -> Self {
        Report { text: String::new(), json: serde_json::to_value(json).expect("serializable"), csv: Vec::new() }
    }

    pub fn heading(&mut self, title: &str) {
        if !self.text.is_empty() {
            self.text.push('\n');
        }
        let _ = writeln!(self.text, "{title}");
    }

    pub fn line(&mut self, line: impl AsRef<str>) {
        self.text.push_str(line.as_ref());
        self.text.push('\n');
    }

    pub fn table(&mut self, header: &[&str], rows: &[Vec<String>]) {
        self.text.push_str(&render_table(header, rows));
    }

    pub fn write(&self, dir: &Path, csv: bool) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let json = serde_json::to_string_pretty(&self.json).expect("serializable");
        std::fs::write(dir.join("report.json"), json + "\n")?;
        if csv {
            for t in &self.csv {
                let mut w = csv::Writer::from_path(dir.join(format!("{}.csv", t.name)))?;
                for row in &t.rows {
                    w.write_record(row)?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }
}

pub fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let fmt_row = |cells: Vec<&str>, out: &mut String| {
        let line: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "  {}", line.join("  ").trim_end());
    };
    fmt_row(header.to_vec(), &mut out);
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    let _ = writeln!(out, "  {}", rule.join("  "));
    for row in rows {
        fmt_row(row.iter().map(String::as_str).collect(), &mut out);
    }
    out
}
