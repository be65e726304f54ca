//! Instance files: a plain `matrix` format and a subset of TSPLIB.
//!
//! Matrix format: the first non-blank, non-`#` line holds `n`; the next `n`
//! such lines hold one row of `n` whitespace-separated reals each.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use aiaco_core::TspInstance;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

/// Largest tolerated `|w[i][j] - w[j][i]|`; smaller gaps are averaged away.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceFormat {
    Matrix,
    Tsplib,
}

impl FromStr for InstanceFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "matrix" => Ok(Self::Matrix),
            "tsplib" | "tsp" => Ok(Self::Tsplib),
            other => Err(BenchError::Config(format!(
                "unknown instance format '{other}' (expected matrix or tsplib)"
            ))),
        }
    }
}

impl InstanceFormat {
    /// `.tsp` files are TSPLIB, anything else is a matrix.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("tsp") => Self::Tsplib,
            _ => Self::Matrix,
        }
    }
}

pub fn load_instance(path: &Path, format: InstanceFormat) -> Result<TspInstance> {
    let text = fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    let instance = match format {
        InstanceFormat::Matrix => parse_matrix(&text, path)?,
        InstanceFormat::Tsplib => parse_tsplib(&text, path)?,
    };
    Ok(
        match (
            instance.name().is_none(),
            path.file_stem().and_then(|s| s.to_str()),
        ) {
            (true, Some(stem)) => instance.with_name(stem),
            _ => instance,
        },
    )
}

/// Content lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_real(token: &str, path: &Path, line: usize) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| BenchError::parse(path, line, format!("'{token}' is not a number")))?;
    if !v.is_finite() {
        return Err(BenchError::parse(
            path,
            line,
            format!("'{token}' is not finite"),
        ));
    }
    Ok(v)
}

pub fn parse_matrix(text: &str, path: &Path) -> Result<TspInstance> {
    let mut lines = content_lines(text);
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| BenchError::parse(path, 1, "empty file, expected the node count"))?;
    let n: usize = header.parse().map_err(|_| {
        BenchError::parse(
            path,
            header_line,
            format!("expected the node count, found '{header}'"),
        )
    })?;
    if n < 2 {
        return Err(BenchError::parse(
            path,
            header_line,
            format!("an instance needs at least 2 nodes, got {n}"),
        ));
    }

    let mut rows: Vec<(usize, Vec<f64>)> = Vec::with_capacity(n);
    for (line, content) in lines.by_ref().take(n) {
        let row = content
            .split_whitespace()
            .map(|t| parse_real(t, path, line))
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != n {
            return Err(BenchError::parse(
                path,
                line,
                format!("expected {n} values, found {}", row.len()),
            ));
        }
        rows.push((line, row));
    }
    if rows.len() < n {
        let last = text.lines().count().max(1);
        return Err(BenchError::parse(
            path,
            last,
            format!("expected {n} rows, found {}", rows.len()),
        ));
    }
    if let Some((line, _)) = lines.next() {
        return Err(BenchError::parse(
            path,
            line,
            format!("unexpected data after {n} rows"),
        ));
    }
    build_instance(rows, path)
}

/// Checks symmetry and the diagonal, then averages out sub-tolerance
/// asymmetry so the result is exactly symmetric.
fn build_instance(rows: Vec<(usize, Vec<f64>)>, path: &Path) -> Result<TspInstance> {
    let n = rows.len();
    for (i, (line, row)) in rows.iter().enumerate() {
        if row[i] != 0.0 {
            return Err(BenchError::parse(
                path,
                *line,
                format!("nonzero diagonal entry {} at node {i}", row[i]),
            ));
        }
        for j in 0..n {
            if row[j] < 0.0 {
                return Err(BenchError::parse(
                    path,
                    *line,
                    format!("negative weight {} at ({i}, {j})", row[j]),
                ));
            }
            let mirror = rows[j].1[i];
            if (row[j] - mirror).abs() > SYMMETRY_TOLERANCE {
                return Err(BenchError::parse(
                    path,
                    *line,
                    format!(
                        "asymmetric weights: w[{i}][{j}] = {} but w[{j}][{i}] = {mirror}",
                        row[j]
                    ),
                ));
            }
        }
    }
    let mut flat = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let w = 0.5 * (rows[i].1[j] + rows[j].1[i]);
            flat[i * n + j] = w;
            flat[j * n + i] = w;
        }
    }
    Ok(TspInstance::from_flat(n, flat)?)
}

/// Writes `instance` in matrix format with shortest round-trip float text.
pub fn write_matrix(instance: &TspInstance, path: &Path) -> Result<()> {
    let n = instance.n();
    let mut out = String::with_capacity(n * n * 8);
    if let Some(name) = instance.name() {
        let _ = writeln!(out, "# {name}");
    }
    let _ = writeln!(out, "{n}");
    for i in 0..n {
        let row: Vec<String> = instance.row(i).iter().map(|w| w.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| BenchError::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Header,
    Coords,
    Weights,
    Display,
}

/// TSPLIB subset: `TYPE: TSP` with `EDGE_WEIGHT_TYPE` `EUC_2D` (distances
/// rounded to the nearest integer) or `EXPLICIT` with `FULL_MATRIX`.
pub fn parse_tsplib(text: &str, path: &Path) -> Result<TspInstance> {
    let mut name = None;
    let mut dimension: Option<usize> = None;
    let mut weight_type: Option<String> = None;
    let mut weight_format: Option<String> = None;
    let mut coords: Vec<Option<(f64, f64)>> = Vec::new();
    let mut weights: Vec<(usize, f64)> = Vec::new();
    let mut section = Section::Header;

    for (line_no, raw) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = match line.split_once(':') {
            Some((k, v)) => (k.trim().to_ascii_uppercase(), v.trim()),
            None => (
                line.split_whitespace()
                    .next()
                    .unwrap_or("")
                    .to_ascii_uppercase(),
                "",
            ),
        };
        let starts_with_digit =
            line.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+' || c == '.');
        if section != Section::Header && starts_with_digit {
            match section {
                Section::Coords => {
                    let n = dimension.ok_or_else(|| {
                        BenchError::parse(path, line_no, "NODE_COORD_SECTION before DIMENSION")
                    })?;
                    let parts: Vec<&str> = line.split_whitespace().collect();
                    if parts.len() != 3 {
                        return Err(BenchError::parse(path, line_no, "expected '<id> <x> <y>'"));
                    }
                    let id: usize = parts[0].parse().map_err(|_| {
                        BenchError::parse(path, line_no, format!("bad node id '{}'", parts[0]))
                    })?;
                    if id == 0 || id > n {
                        return Err(BenchError::parse(
                            path,
                            line_no,
                            format!("node id {id} outside 1..={n}"),
                        ));
                    }
                    if coords[id - 1].is_some() {
                        return Err(BenchError::parse(
                            path,
                            line_no,
                            format!("node {id} listed twice"),
                        ));
                    }
                    coords[id - 1] = Some((
                        parse_real(parts[1], path, line_no)?,
                        parse_real(parts[2], path, line_no)?,
                    ));
                }
                Section::Weights => {
                    for t in line.split_whitespace() {
                        weights.push((line_no, parse_real(t, path, line_no)?));
                    }
                }
                Section::Display | Section::Header => {}
            }
            continue;
        }
        match key.as_str() {
            "NAME" => name = Some(value.to_string()),
            "COMMENT" | "DISPLAY_DATA_TYPE" => {}
            "TYPE" => {
                if !value.eq_ignore_ascii_case("TSP") {
                    return Err(BenchError::parse(
                        path,
                        line_no,
                        format!("unsupported TYPE '{value}' (only TSP)"),
                    ));
                }
            }
            "DIMENSION" => {
                let n: usize = value.parse().map_err(|_| {
                    BenchError::parse(path, line_no, format!("bad DIMENSION '{value}'"))
                })?;
                if n < 2 {
                    return Err(BenchError::parse(
                        path,
                        line_no,
                        format!("DIMENSION must be at least 2, got {n}"),
                    ));
                }
                dimension = Some(n);
                coords = vec![None; n];
            }
            "EDGE_WEIGHT_TYPE" => {
                let v = value.to_ascii_uppercase();
                if v != "EUC_2D" && v != "EXPLICIT" {
                    return Err(BenchError::parse(
                        path,
                        line_no,
                        format!("unsupported EDGE_WEIGHT_TYPE '{value}'"),
                    ));
                }
                weight_type = Some(v);
            }
            "EDGE_WEIGHT_FORMAT" => {
                let v = value.to_ascii_uppercase();
                if v != "FULL_MATRIX" {
                    return Err(BenchError::parse(
                        path,
                        line_no,
                        format!("unsupported EDGE_WEIGHT_FORMAT '{value}'"),
                    ));
                }
                weight_format = Some(v);
            }
            "NODE_COORD_SECTION" => section = Section::Coords,
            "EDGE_WEIGHT_SECTION" => section = Section::Weights,
            "DISPLAY_DATA_SECTION" => section = Section::Display,
            "EOF" => break,
            other => {
                return Err(BenchError::parse(
                    path,
                    line_no,
                    format!("unsupported keyword '{other}'"),
                ));
            }
        }
    }

    let n = dimension.ok_or_else(|| BenchError::parse(path, 1, "missing DIMENSION"))?;
    let last_line = text.lines().count().max(1);
    match weight_type.as_deref() {
        Some("EUC_2D") => {
            let points = coords
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    c.ok_or_else(|| {
                        BenchError::parse(
                            path,
                            last_line,
                            format!("missing coordinates for node {}", k + 1),
                        )
                    })
                })
                .collect::<Result<Vec<(f64, f64)>>>()?;
            let mut flat = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let (dx, dy) = (points[i].0 - points[j].0, points[i].1 - points[j].1);
                        flat[i * n + j] = nint(dx.hypot(dy));
                    }
                }
            }
            let instance = TspInstance::from_flat(n, flat)?;
            Ok(match name {
                Some(name) => instance.with_name(name),
                None => instance,
            })
        }
        Some(_) => {
            if weight_format.is_none() {
                return Err(BenchError::parse(
                    path,
                    last_line,
                    "EXPLICIT weights need EDGE_WEIGHT_FORMAT: FULL_MATRIX",
                ));
            }
            if weights.len() != n * n {
                return Err(BenchError::parse(
                    path,
                    weights.last().map_or(last_line, |w| w.0),
                    format!("expected {} edge weights, found {}", n * n, weights.len()),
                ));
            }
            let rows = weights
                .chunks(n)
                .map(|chunk| (chunk[0].0, chunk.iter().map(|w| w.1).collect()))
                .collect();
            let instance = build_instance(rows, path)?;
            Ok(match name {
                Some(name) => instance.with_name(name),
                None => instance,
            })
        }
        None => Err(BenchError::parse(
            path,
            last_line,
            "missing EDGE_WEIGHT_TYPE",
        )),
    }
}

/// TSPLIB rounding: `(int)(x + 0.5)`.
fn nint(x: f64) -> f64 {
    (x + 0.5).floor()
}
