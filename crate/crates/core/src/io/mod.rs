//! Scene files in, OBJ meshes and CSV tables out.

mod scene;

use std::io::{self, Write};

use crate::curve::{CurveError, FrenetApparatus};
use crate::projection::{SurfaceMesh, VolumeSample};
use crate::validator::ValidationReport;

pub use scene::{constant, load_scene, parse_fixed, OutputPaths, SceneError, Scene, SchemaError};

pub const OBJ_DIGITS: usize = 9;
pub const CSV_DIGITS: usize = 17;

/// Formats `x` with `digits` significant digits, switching to exponent
/// notation outside `[1e-5, 10^digits)` and trimming trailing zeros.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        return format!("{m}e{exp}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes a Wavefront OBJ with the marked polyline as an `l` element.
pub fn write_obj(mesh: &SurfaceMesh, sink: &mut impl Write) -> io::Result<()> {
    writeln!(
        sink,
        "# isogeo4 mesh: {} vertices, {} triangles",
        mesh.vertices.len(),
        mesh.triangles.len()
    )?;
    for v in &mesh.vertices {
        writeln!(
            sink,
            "v {} {} {}",
            format_sig(v[0], OBJ_DIGITS),
            format_sig(v[1], OBJ_DIGITS),
            format_sig(v[2], OBJ_DIGITS)
        )?;
    }
    for t in &mesh.triangles {
        writeln!(sink, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    if !mesh.marked_polyline.is_empty() {
        let idx: Vec<String> = mesh.marked_polyline.iter().map(|i| (i + 1).to_string()).collect();
        writeln!(sink, "l {}", idx.join(" "))?;
    }
    Ok(())
}

/// Reads back the `v`, `f` and `l` elements written by [`write_obj`].
pub fn read_obj(text: &str) -> Result<SurfaceMesh, String> {
    let mut mesh = SurfaceMesh::default();
    for (n, line) in text.lines().enumerate() {
        let mut parts = line.split_whitespace();
        let bad = |what: &str| format!("line {}: bad {what}", n + 1);
        match parts.next() {
            Some("v") => {
                let c: Vec<f64> = parts.map(str::parse).collect::<Result<_, _>>().map_err(|_| bad("vertex"))?;
                mesh.vertices.push(c.try_into().map_err(|_| bad("vertex"))?);
            }
            Some(kind @ ("f" | "l")) => {
                let idx: Vec<usize> = parts
                    .map(|p| p.parse::<usize>().ok().filter(|&i| i >= 1).map(|i| i - 1))
                    .collect::<Option<_>>()
                    .ok_or_else(|| bad("index"))?;
                if kind == "f" {
                    mesh.triangles.push(idx.try_into().map_err(|_| bad("face"))?);
                } else {
                    mesh.marked_polyline = idx;
                }
            }
            Some(c) if c.starts_with('#') => {}
            None => {}
            Some(other) => return Err(format!("line {}: unsupported element `{other}`", n + 1)),
        }
    }
    Ok(mesh)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn as_num(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_sig(*x, CSV_DIGITS),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Cell {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Cell {
        Cell::Text(s.to_string())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> CsvTable {
        CsvTable { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }
}

fn csv_error(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::new(io::ErrorKind::InvalidData, format!("{other:?}")),
    }
}

/// Writes a header row and the data rows; numbers keep 17 significant digits.
pub fn write_csv(table: &CsvTable, sink: &mut impl Write) -> io::Result<()> {
    if let Some(i) = table.rows.iter().position(|r| r.len() != table.header.len()) {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            format!("row {i} has {} cells, header has {}", table.rows[i].len(), table.header.len()),
        ));
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    w.write_record(&table.header).map_err(csv_error)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::render)).map_err(csv_error)?;
    }
    w.flush()
}

/// Reads a table written by [`write_csv`]; cells that parse as numbers become [`Cell::Num`].
pub fn read_csv(text: &str) -> io::Result<CsvTable> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = r.headers().map_err(csv_error)?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_error)?;
        rows.push(
            rec.iter()
                .map(|c| c.parse::<f64>().map(Cell::Num).unwrap_or_else(|_| Cell::Text(c.to_string())))
                .collect(),
        );
    }
    Ok(CsvTable { header, rows })
}

/// Frenet rows; a sample whose frame is undefined is kept with empty
/// numeric cells and the reason in the `status` column.
pub fn frenet_table(rows: &[(f64, Result<FrenetApparatus, CurveError>)]) -> CsvTable {
    let mut header = vec!["s".to_string()];
    for name in ["T", "N", "B1", "B2"] {
        header.extend((1..=4).map(|k| format!("{name}_{k}")));
    }
    header.extend(["k1", "k2", "k3", "k2_degenerate", "status"].map(String::from));
    let mut table = CsvTable::new(header);
    for (s, row) in rows {
        let mut cells = vec![Cell::Num(*s)];
        match row {
            Ok(a) => {
                for v in a.frame.vectors() {
                    cells.extend(v.to_array().map(Cell::Num));
                }
                cells.extend([a.k1, a.k2, a.k3].map(Cell::Num));
                cells.push(Cell::Text(a.k2_degenerate.to_string()));
                cells.push("ok".into());
            }
            Err(e) => {
                cells.extend((0..20).map(|_| Cell::Text(String::new())));
                cells.push(Cell::Text(e.to_string()));
            }
        }
        table.push(cells);
    }
    table
}

/// One row per sample followed by a `max` summary row (with `min|phi2|` in the phi2 column).
pub fn validation_table(report: &ValidationReport) -> CsvTable {
    let mut table = CsvTable::new([
        "row",
        "s",
        "isoparam_residual",
        "collinearity_defect",
        "tangential_accel",
        "phi2",
        "phi3",
        "phi4",
        "singular",
    ]);
    for r in &report.samples {
        table.push(vec![
            "sample".into(),
            r.s.into(),
            r.isoparam_residual.into(),
            r.collinearity_defect.into(),
            r.tangential_accel.into(),
            r.phi2.into(),
            r.phi3.into(),
            r.phi4.into(),
            Cell::Text(r.singular.to_string()),
        ]);
    }
    let verdict = if report.passed() { "pass".to_string() } else { "fail".to_string() };
    table.push(vec![
        "summary".into(),
        Cell::Text(verdict),
        report.max_isoparam_residual.into(),
        report.max_collinearity_defect.into(),
        report.max_tangential_accel.into(),
        report.min_abs_phi2.into(),
        report.max_abs_phi3.into(),
        report.max_abs_phi4.into(),
        Cell::Text(
            report
                .verdict
                .reasons()
                .iter()
                .map(|r| r.code())
                .collect::<Vec<_>>()
                .join(";"),
        ),
    ]);
    table
}

pub fn volume_table(rows: &[VolumeSample]) -> CsvTable {
    let mut table = CsvTable::new(["s", "t", "q", "p1", "p2", "p3"]);
    for r in rows {
        table.push(vec![
            r.s.into(),
            r.t.into(),
            r.q.into(),
            r.point[0].into(),
            r.point[1].into(),
            r.point[2].into(),
        ]);
    }
    table
}

#[cfg(test)]
mod tests;
