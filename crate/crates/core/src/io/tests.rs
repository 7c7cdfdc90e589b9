use super::*;
use crate::expr::Var;
use crate::family::builtin;
use crate::projection::{sample_volume, slice_to_mesh, Axis, GridSpec};
use crate::validator::validate_default;

const EXAMPLE1: &str = include_str!("../../../../scenes/example1.toml");
const EXAMPLE2: &str = include_str!("../../../../scenes/example2.toml");
const EXAMPLE3: &str = include_str!("../../../../scenes/example3.toml");
const GENERAL: &str = include_str!("../../../../scenes/general.toml");

#[test]
fn shipped_scenes_match_builtins() {
    for (text, name) in [(EXAMPLE1, "example1"), (EXAMPLE2, "example2"), (EXAMPLE3, "example3")] {
        let scene = load_scene(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let b = builtin(name).unwrap();
        assert_eq!(scene.curve(), b.curve(), "{name} curve");
        assert_eq!(scene.marching(), b.marching(), "{name} marching");
        assert_eq!(scene.params(), b.params(), "{name} params");
        assert_eq!(scene.family, b);
    }
    let s1 = load_scene(EXAMPLE1).unwrap();
    assert_eq!(s1.grid.fixed, Some((Var::Q, 0.125)));
    assert_eq!((s1.grid.n_s, s1.grid.n_t), (65, 17));
    assert_eq!(s1.axis, Axis::W);
    assert_eq!(s1.output.mesh.as_deref(), Some(std::path::Path::new("example1.obj")));
    assert_eq!(load_scene(EXAMPLE3).unwrap().axis, Axis::Z);
}

#[test]
fn general_scene_is_isogeodesic() {
    let scene = load_scene(GENERAL).unwrap();
    assert_eq!(scene.grid.fixed, None);
    assert!(validate_default(&scene.family).unwrap().passed());
}

fn replace(text: &str, from: &str, to: &str) -> String {
    assert!(text.contains(from), "{from}");
    text.replacen(from, to, 1)
}

#[test]
fn schema_errors_carry_key_paths() {
    let e = load_scene(&replace(EXAMPLE1, "s_range = [0, \"2*pi\"]", "s_range = [2, 1]")).unwrap_err();
    assert_eq!(e.to_string(), "curve.s_range: L1 < L2 required");

    let e = load_scene(&replace(EXAMPLE1, "U = \"(t - t0)*(q - q0)\"", "U = \"s*t\"")).unwrap_err();
    assert!(e.mentions("marching.U"));
    assert!(e.to_string().contains("`s`"), "{e}");

    let e = load_scene(&replace(EXAMPLE1, "x3 = \"0.5*s\"", "x3 = \"0.5*s +\"")).unwrap_err();
    assert!(e.mentions("curve.x3"), "{e}");

    let e = load_scene(&replace(EXAMPLE1, "t0 = 0.5", "t0 = 0.5\ncolour = \"red\"")).unwrap_err();
    assert!(e.mentions("anchor.colour"));

    let e = load_scene(&replace(EXAMPLE1, "W = \"t - t0\"\n", "")).unwrap_err();
    assert!(e.mentions("marching.W"));

    let e = load_scene(&replace(EXAMPLE1, "t0 = 0.5", "t0 = 1.5")).unwrap_err();
    assert!(e.mentions("anchor.t0"), "{e}");

    let e = load_scene(&replace(EXAMPLE1, "n_t = 17", "n_t = \"many\"")).unwrap_err();
    assert!(e.mentions("grid.n_t"));

    let e = load_scene(&replace(EXAMPLE1, "type = \"I\"", "type = \"IV\"")).unwrap_err();
    assert!(e.mentions("marching.type"));

    // Several problems are reported together.
    let text = replace(&replace(EXAMPLE1, "axis = \"w\"", "axis = \"v\""), "q0 = 0", "q0 = true");
    let e = load_scene(&text).unwrap_err();
    assert!(e.mentions("grid.axis") && e.mentions("anchor.q0"), "{e}");

    assert!(load_scene("not [ toml").is_err());
    assert!(load_scene("").unwrap_err().mentions("curve"));
}

#[test]
fn fixed_parameter_syntax() {
    assert_eq!(parse_fixed("q=0.125").unwrap(), (Var::Q, 0.125));
    assert_eq!(parse_fixed(" t = 1/2 ").unwrap(), (Var::T, 0.5));
    assert!(parse_fixed("r=1").is_err());
    assert!(parse_fixed("q").is_err());
    assert!(parse_fixed("q=s").is_err());
}

#[test]
fn significant_digits() {
    assert_eq!(format_sig(0.5, 9), "0.5");
    assert_eq!(format_sig(-0.0, 9), "-0");
    assert_eq!(format_sig(1.0 / 3.0, 9), "0.333333333");
    assert_eq!(format_sig(2.0 / 3.0 * 1e-7, 9), "6.66666667e-8");
    assert_eq!(format_sig(9.9999999999, 9), "10");
    assert_eq!(format_sig(123456.0, 9), "123456");
    assert_eq!(format_sig(1e20, 9), "1e20");
    assert_eq!(format_sig(0.1, 17), "0.10000000000000001");
}

fn small_mesh() -> SurfaceMesh {
    SurfaceMesh {
        vertices: vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.25]],
        triangles: vec![[0, 1, 2]],
        marked_polyline: vec![],
    }
}

fn obj_text(mesh: &SurfaceMesh) -> String {
    let mut out = Vec::new();
    write_obj(mesh, &mut out).unwrap();
    String::from_utf8(out).unwrap()
}

#[test]
fn obj_output() {
    let text = obj_text(&small_mesh());
    let content: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(content, ["v 0 0 0", "v 1 0 0", "v 0 1 0.25", "f 1 2 3"]);

    let empty = obj_text(&SurfaceMesh::default());
    assert_eq!(empty.lines().count(), 1);
    assert!(empty.starts_with('#'));
    assert_eq!(read_obj(&empty).unwrap(), SurfaceMesh::default());
}

#[test]
fn obj_round_trip_counts() {
    let f = builtin("example1").unwrap();
    let mesh = slice_to_mesh(&f, &GridSpec::slice(Var::Q, 0.125), Axis::W).unwrap();
    let text = obj_text(&mesh);
    let back = read_obj(&text).unwrap();
    assert_eq!(back.vertex_count(), mesh.vertex_count());
    assert_eq!(back.triangles, mesh.triangles);
    assert_eq!(back.marked_polyline, mesh.marked_polyline);
    for (a, b) in back.vertices.iter().zip(&mesh.vertices) {
        for k in 0..3 {
            // Nine significant digits: relative rounding error at most 5e-9.
            assert!((a[k] - b[k]).abs() <= 5e-9 * b[k].abs());
        }
    }
    assert_eq!(obj_text(&mesh), text);
}

fn csv_text(t: &CsvTable) -> String {
    let mut out = Vec::new();
    write_csv(t, &mut out).unwrap();
    String::from_utf8(out).unwrap()
}

#[test]
fn csv_volume_round_trip() {
    let f = builtin("example1").unwrap();
    let rows = sample_volume(&f, &GridSpec::volume().with_counts(3, 3, 3), Axis::W).unwrap();
    let table = volume_table(&rows);
    let text = csv_text(&table);
    assert_eq!(text.lines().count(), 28);
    assert!(!text.contains('\r'));
    assert_eq!(read_csv(&text).unwrap(), table);
}

#[test]
fn csv_validation_report() {
    let report = validate_default(&builtin("example2").unwrap()).unwrap();
    let table = validation_table(&report);
    assert_eq!(table.rows.len(), report.n_samples + 1);
    let text = csv_text(&table);
    let back = read_csv(&text).unwrap();
    assert_eq!(back, table);
    assert_eq!(back.rows.last().unwrap()[1], Cell::Text("pass".into()));
}

#[test]
fn csv_frenet_columns() {
    let f = builtin("example1").unwrap();
    let rows: Vec<_> = f
        .s_samples(5)
        .into_iter()
        .map(|s| (s, f.curve().frenet_apparatus(s)))
        .collect();
    let table = frenet_table(&rows);
    assert_eq!(table.header.len(), 1 + 16 + 5);
    assert!(table.column("k1").unwrap().iter().all(|c| c.as_num() == Some(0.5)));
    assert_eq!(read_csv(&csv_text(&table)).unwrap(), table);

    let line = crate::curve::Curve4::parse(["s", "0", "0", "0"], crate::curve::Interval::new(0.0, 1.0).unwrap()).unwrap();
    let table = frenet_table(&[(0.5, line.frenet_apparatus(0.5))]);
    let status = table.column("status").unwrap()[0].clone();
    assert!(matches!(status, Cell::Text(ref m) if m.starts_with("k1 = 0: frame undefined")));
    assert_eq!(table.rows[0].len(), table.header.len());
}

#[test]
fn csv_rejects_ragged_rows() {
    let mut t = CsvTable::new(["a", "b"]);
    t.push(vec![1.0.into()]);
    assert!(write_csv(&t, &mut Vec::new()).is_err());
}

#[test]
fn text_cells_are_quoted() {
    let mut t = CsvTable::new(["name", "value"]);
    t.push(vec!["a,b".into(), 1.5.into()]);
    let text = csv_text(&t);
    assert_eq!(text, "name,value\n\"a,b\",1.5\n");
    assert_eq!(read_csv(&text).unwrap(), t);
}
