//! Field CSV files.
//!
//! Header `x,u` (1D) or `x,y,u` (2D), one row per interior node in
//! lexicographic order (x fastest). Numbers use the shortest decimal form
//! that round-trips.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::{Field, Mesh};

/// Shortest round-trip decimal representation.
pub fn fmt_num(v: f64) -> String {
    format!("{v:?}")
}

pub fn field_to_csv(field: &Field) -> String {
    let mesh = field.mesh();
    let mut out = String::new();
    out.push_str(if mesh.dim() == 1 { "x,u\n" } else { "x,y,u\n" });
    for (i, &v) in field.values().iter().enumerate() {
        let [x, y] = mesh.coords(i);
        if mesh.dim() == 1 {
            let _ = writeln!(out, "{},{}", fmt_num(x), fmt_num(v));
        } else {
            let _ = writeln!(out, "{},{},{}", fmt_num(x), fmt_num(y), fmt_num(v));
        }
    }
    out
}

pub fn write_field_csv(path: &Path, field: &Field) -> Result<()> {
    std::fs::write(path, field_to_csv(field)).map_err(|e| Error::io(path, e))
}

pub fn read_field_csv(path: &Path, mesh: &Mesh) -> Result<Field> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_field_csv(&text, mesh).map_err(|(line, msg)| Error::Csv {
        path: path.to_path_buf(),
        line,
        msg,
    })
}

/// Parses CSV text against `mesh`; node coordinates must match the mesh.
pub fn parse_field_csv(text: &str, mesh: &Mesh) -> std::result::Result<Field, (usize, String)> {
    let expected_header = if mesh.dim() == 1 { "x,u" } else { "x,y,u" };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == expected_header => {}
        Some((i, h)) => {
            return Err((i + 1, format!("expected header `{expected_header}`, found `{}`", h.trim())))
        }
        None => return Err((1, "empty file".into())),
    }
    let tol = 1e-9 * mesh.length().max(1.0);
    let mut values = Vec::with_capacity(mesh.dof());
    for (i, line) in lines {
        let lineno = i + 1;
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != mesh.dim() + 1 {
            return Err((lineno, format!("expected {} columns", mesh.dim() + 1)));
        }
        let nums: Vec<f64> = cols
            .iter()
            .map(|c| c.parse::<f64>().map_err(|e| (lineno, format!("`{c}`: {e}"))))
            .collect::<std::result::Result<_, _>>()?;
        let node = values.len();
        if node >= mesh.dof() {
            return Err((lineno, format!("more than {} rows", mesh.dof())));
        }
        let xy = mesh.coords(node);
        for d in 0..mesh.dim() {
            if (nums[d] - xy[d]).abs() > tol {
                return Err((lineno, format!("coordinate {} does not match node {node} at {}", nums[d], xy[d])));
            }
        }
        let v = nums[mesh.dim()];
        if !v.is_finite() {
            return Err((lineno, "non-finite value".into()));
        }
        values.push(v);
    }
    if values.len() != mesh.dof() {
        return Err((0, format!("expected {} rows, found {}", mesh.dof(), values.len())));
    }
    Ok(Field::from_raw(*mesh, values))
}
