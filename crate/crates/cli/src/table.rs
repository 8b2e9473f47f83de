//! Report rows and their two renderings.
//!
//! Every analysis produces flat rows `(step, coordinate, branch, value,
//! flag)`. CSV mode emits them one per line under a fixed header; markdown
//! mode pivots branches into columns, one body row per step.

use std::collections::BTreeSet;
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Md,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub step: usize,
    pub coordinate: String,
    pub branch: String,
    pub value: String,
    pub flag: String,
}

impl Row {
    pub fn new(step: usize, coordinate: &str, branch: &str, value: String, flag: &str) -> Row {
        Row {
            step,
            coordinate: coordinate.to_string(),
            branch: branch.to_string(),
            value,
            flag: flag.to_string(),
        }
    }
}

pub fn render(rows: &[Row], format: Format) -> String {
    match format {
        Format::Csv => render_csv(rows),
        Format::Md => render_markdown(rows),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_csv(rows: &[Row]) -> String {
    let mut out = String::from("step,coordinate,branch,value,flag\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.step,
            csv_field(&r.coordinate),
            csv_field(&r.branch),
            csv_field(&r.value),
            csv_field(&r.flag)
        );
    }
    out
}

fn render_markdown(rows: &[Row]) -> String {
    if rows.is_empty() {
        return String::new();
    }
    let mut columns: Vec<(String, String)> = Vec::new();
    for r in rows {
        let key = (r.coordinate.clone(), r.branch.clone());
        if !columns.contains(&key) {
            columns.push(key);
        }
    }
    let coords: BTreeSet<&String> = rows.iter().map(|r| &r.coordinate).collect();
    let single_coord = coords.len() == 1;
    let labels: Vec<String> = columns
        .iter()
        .map(|(coord, branch)| {
            if branch.is_empty() {
                coord.clone()
            } else if single_coord {
                branch.clone()
            } else {
                format!("{} ({})", coord, branch)
            }
        })
        .collect();

    let mut steps: Vec<usize> = Vec::new();
    for r in rows {
        if !steps.contains(&r.step) {
            steps.push(r.step);
        }
    }
    let any_flag = rows.iter().any(|r| !r.flag.is_empty());

    let mut out = String::from("| n |");
    for l in &labels {
        let _ = write!(out, " {} |", l);
    }
    if any_flag {
        out.push_str(" flags |");
    }
    out.push('\n');
    out.push_str("|---|");
    for _ in &labels {
        out.push_str("---|");
    }
    if any_flag {
        out.push_str("---|");
    }
    out.push('\n');

    for step in steps {
        let _ = write!(out, "| {} |", step);
        for col in &columns {
            let cell = rows
                .iter()
                .find(|r| r.step == step && (&r.coordinate, &r.branch) == (&col.0, &col.1))
                .map(|r| r.value.as_str())
                .unwrap_or("");
            let _ = write!(out, " {} |", cell);
        }
        if any_flag {
            let mut flags: Vec<&str> = Vec::new();
            for r in rows.iter().filter(|r| r.step == step && !r.flag.is_empty()) {
                if !flags.contains(&r.flag.as_str()) {
                    flags.push(&r.flag);
                }
            }
            let _ = write!(out, " {} |", flags.join(", "));
        }
        out.push('\n');
    }
    out
}
