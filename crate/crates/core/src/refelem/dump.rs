//! Plain-text dump of reference-element tables for cross-language golden tests.
//!
//! Layout (version 1):
//!
//! ```text
//! tetdg-refelem 1
//! degree <p>
//! table <name> <rows> <cols>
//! <row 0, space separated, 17 significant digits>
//! ...
//! end
//! ```
//!
//! Tables appear in a fixed order; point sets have three columns.

use std::fmt::Write;

use nalgebra::DMatrix;

use crate::refelem::ReferenceElement;

pub const DUMP_VERSION: u32 = 1;

fn table_rows(out: &mut String, name: &str, rows: usize, cols: usize, at: impl Fn(usize, usize) -> f64) {
    writeln!(out, "table {name} {rows} {cols}").unwrap();
    for i in 0..rows {
        let line: Vec<String> = (0..cols).map(|j| format!("{:.16e}", at(i, j))).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
}

fn points(out: &mut String, name: &str, pts: &[[f64; 3]]) {
    table_rows(out, name, pts.len(), 3, |i, j| pts[i][j]);
}

fn vector(out: &mut String, name: &str, v: &[f64]) {
    table_rows(out, name, v.len(), 1, |i, _| v[i]);
}

fn matrix(out: &mut String, name: &str, m: &DMatrix<f64>) {
    table_rows(out, name, m.nrows(), m.ncols(), |i, j| m[(i, j)]);
}

/// Serialize every table of `re`.
pub fn dump(re: &ReferenceElement) -> String {
    let mut out = String::new();
    writeln!(out, "tetdg-refelem {DUMP_VERSION}").unwrap();
    writeln!(out, "degree {}", re.degree).unwrap();
    points(&mut out, "colloc_nodes", &re.colloc_nodes);
    points(&mut out, "cub_nodes", &re.cub_nodes);
    vector(&mut out, "cub_weights", &re.cub_weights);
    points(&mut out, "face_nodes", &re.face_nodes);
    vector(&mut out, "face_weights", &re.face_weights);
    matrix(&mut out, "vandermonde", &re.vandermonde);
    matrix(&mut out, "grad_vandermonde_r", &re.grad_vandermonde[0]);
    matrix(&mut out, "grad_vandermonde_s", &re.grad_vandermonde[1]);
    matrix(&mut out, "grad_vandermonde_t", &re.grad_vandermonde[2]);
    matrix(&mut out, "face_vandermonde", &re.face_vandermonde);
    writeln!(out, "end").unwrap();
    out
}

/// Parse a dump back into `(name, rows, cols, row-major data)` tables.
pub fn parse_dump(text: &str) -> Option<(usize, Vec<(String, usize, usize, Vec<f64>)>)> {
    let mut lines = text.lines();
    let header = lines.next()?;
    if header != format!("tetdg-refelem {DUMP_VERSION}") {
        return None;
    }
    let degree: usize = lines.next()?.strip_prefix("degree ")?.parse().ok()?;
    let mut tables = Vec::new();
    loop {
        let line = lines.next()?;
        if line == "end" {
            break;
        }
        let mut parts = line.split_whitespace();
        if parts.next()? != "table" {
            return None;
        }
        let name = parts.next()?.to_string();
        let rows: usize = parts.next()?.parse().ok()?;
        let cols: usize = parts.next()?.parse().ok()?;
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            for tok in lines.next()?.split_whitespace() {
                data.push(tok.parse().ok()?);
            }
        }
        if data.len() != rows * cols {
            return None;
        }
        tables.push((name, rows, cols, data));
    }
    Some((degree, tables))
}
