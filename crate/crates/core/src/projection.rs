//! Parallel projection to R³, parameter slices and grid meshes.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::curve::Interval;
use crate::expr::Var;
use crate::family::{FamilyError, HypersurfaceFamily};
use crate::linalg4::Vec4;

/// Coordinate axis of R⁴, named as in `(x, y, z, w)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
    W,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::X, Axis::Y, Axis::Z, Axis::W];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        ["x", "y", "z", "w"][self.index()]
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown axis `{0}` (expected x, y, z or w)")]
pub struct UnknownAxis(pub String);

impl FromStr for Axis {
    type Err = UnknownAxis;

    fn from_str(s: &str) -> Result<Axis, UnknownAxis> {
        Axis::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| UnknownAxis(s.to_string()))
    }
}

/// Deletes one coordinate, keeping the other three in order.
pub fn project_drop_axis(p: Vec4, axis: Axis) -> [f64; 3] {
    let mut out = [0.0; 3];
    let mut k = 0;
    for (i, c) in p.to_array().into_iter().enumerate() {
        if i != axis.index() {
            out[k] = c;
            k += 1;
        }
    }
    out
}

pub const DEFAULT_SLICE_GRID: (usize, usize, usize) = (65, 17, 17);
pub const DEFAULT_VOLUME_GRID: (usize, usize, usize) = (33, 9, 9);

/// Sample counts per parameter and an optional fixed parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub n_s: usize,
    pub n_t: usize,
    pub n_q: usize,
    pub fixed: Option<(Var, f64)>,
}

impl GridSpec {
    pub fn slice(param: Var, value: f64) -> GridSpec {
        let (n_s, n_t, n_q) = DEFAULT_SLICE_GRID;
        GridSpec { n_s, n_t, n_q, fixed: Some((param, value)) }
    }

    pub fn volume() -> GridSpec {
        let (n_s, n_t, n_q) = DEFAULT_VOLUME_GRID;
        GridSpec { n_s, n_t, n_q, fixed: None }
    }

    pub fn with_counts(mut self, n_s: usize, n_t: usize, n_q: usize) -> GridSpec {
        (self.n_s, self.n_t, self.n_q) = (n_s, n_t, n_q);
        self
    }

    pub fn count(&self, v: Var) -> usize {
        match v {
            Var::S => self.n_s,
            Var::T => self.n_t,
            Var::Q => self.n_q,
        }
    }

    /// Free parameters in `(s, t, q)` order.
    pub fn free(&self) -> Vec<Var> {
        Var::ALL
            .into_iter()
            .filter(|v| self.fixed.map_or(true, |(f, _)| f != *v))
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum ProjectionError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("{param} = {value} is outside its domain {domain}")]
    Domain { param: Var, value: f64, domain: Interval },
    #[error("grid needs at least 2 samples along {param}, got {count}")]
    GridTooSmall { param: Var, count: usize },
    #[error("a slice needs one fixed parameter")]
    NotASlice,
    #[error("a volume has no fixed parameter, got {param} = {value}")]
    NotAVolume { param: Var, value: f64 },
}

/// Triangle mesh of a projected 2-parameter slice.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SurfaceMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    /// Vertex indices of the projected parameter curve along `s`.
    pub marked_polyline: Vec<usize>,
}

impl SurfaceMesh {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }
}

fn domain(f: &HypersurfaceFamily, v: Var) -> Interval {
    match v {
        Var::S => f.curve().domain(),
        Var::T => f.params().t_domain,
        Var::Q => f.params().q_domain,
    }
}

fn anchor(f: &HypersurfaceFamily, v: Var) -> Option<f64> {
    match v {
        Var::S => None,
        Var::T => Some(f.params().t0),
        Var::Q => Some(f.params().q0),
    }
}

fn check_counts(grid: &GridSpec, free: &[Var]) -> Result<(), ProjectionError> {
    for &v in free {
        if grid.count(v) < 2 {
            return Err(ProjectionError::GridTooSmall { param: v, count: grid.count(v) });
        }
    }
    Ok(())
}

/// Evaluates `P` at every `(s, a, b)` for the given parameter samples,
/// where `place` orders the three values into `(s, t, q)`.
fn eval_rows<F>(
    f: &HypersurfaceFamily,
    s_values: &[f64],
    inner: &[(f64, f64)],
    place: F,
) -> Result<Vec<Vec<Vec4>>, ProjectionError>
where
    F: Fn(f64, f64, f64) -> (f64, f64, f64) + Sync,
{
    Ok(s_values
        .par_iter()
        .map(|&s| {
            let at = f.curve_sample(s)?;
            inner
                .iter()
                .map(|&(a, b)| {
                    let (_, t, q) = place(s, a, b);
                    f.eval_point_at(&at, t, q)
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, FamilyError>>()?)
}

/// Meshes the slice of `f` with one parameter held fixed.
///
/// Vertex `(i, j)` sits at index `i·n_j + j`, `i` running over the first
/// free parameter and `j` over the second. Each grid quad becomes the two
/// triangles `(a, b, c)` and `(a, c, d)` with `a = (i, j)`, `b = (i+1, j)`,
/// `c = (i+1, j+1)`, `d = (i, j+1)`.
///
/// When `s` is free the marked polyline follows `s` with the other free
/// parameter at its anchor value; its vertices are shared with the mesh if
/// that value is a grid sample and appended otherwise. Slices at fixed `s`
/// carry no polyline.
pub fn slice_to_mesh(f: &HypersurfaceFamily, grid: &GridSpec, axis: Axis) -> Result<SurfaceMesh, ProjectionError> {
    let (fixed, value) = grid.fixed.ok_or(ProjectionError::NotASlice)?;
    let dom = domain(f, fixed);
    if !dom.contains(value) {
        return Err(ProjectionError::Domain { param: fixed, value, domain: dom });
    }
    let free = grid.free();
    check_counts(grid, &free)?;
    let (pi, pj) = (free[0], free[1]);
    let (ni, nj) = (grid.count(pi), grid.count(pj));
    let iv = domain(f, pi).samples(ni);
    let jv = domain(f, pj).samples(nj);

    let build = |vals: [(Var, f64); 3]| {
        let get = |v: Var| vals.iter().find(|(p, _)| *p == v).map(|x| x.1).expect("all params");
        (get(Var::S), get(Var::T), get(Var::Q))
    };

    let mut mesh = SurfaceMesh::default();
    if pi == Var::S {
        let inner: Vec<(f64, f64)> = jv.iter().map(|&b| (b, value)).collect();
        let rows = eval_rows(f, &iv, &inner, |s, b, c| build([(Var::S, s), (pj, b), (fixed, c)]))?;
        mesh.vertices = rows.iter().flatten().map(|&p| project_drop_axis(p, axis)).collect();

        let a = anchor(f, pj).expect("t or q");
        let width = domain(f, pj).width();
        match jv.iter().position(|&b| (b - a).abs() <= 1e-12 * width) {
            Some(j) => mesh.marked_polyline = (0..ni).map(|i| i * nj + j).collect(),
            None => {
                let extra = eval_rows(f, &iv, &[(a, value)], |s, b, c| build([(Var::S, s), (pj, b), (fixed, c)]))?;
                let start = mesh.vertices.len();
                mesh.vertices.extend(extra.iter().flatten().map(|&p| project_drop_axis(p, axis)));
                mesh.marked_polyline = (start..start + ni).collect();
            }
        }
    } else {
        let at = f.curve_sample(value)?;
        let points: Vec<Vec4> = iv
            .par_iter()
            .map(|&t| jv.iter().map(|&q| f.eval_point_at(&at, t, q)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .flatten()
            .collect();
        mesh.vertices = points.into_iter().map(|p| project_drop_axis(p, axis)).collect();
    }

    mesh.triangles.reserve(2 * (ni - 1) * (nj - 1));
    for i in 0..ni - 1 {
        for j in 0..nj - 1 {
            let a = i * nj + j;
            let b = (i + 1) * nj + j;
            let c = (i + 1) * nj + j + 1;
            let d = i * nj + j + 1;
            mesh.triangles.push([a, b, c]);
            mesh.triangles.push([a, c, d]);
        }
    }
    Ok(mesh)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeSample {
    pub s: f64,
    pub t: f64,
    pub q: f64,
    pub point: [f64; 3],
}

/// Projected samples of the full 3-parameter grid, `s` outermost and `q`
/// innermost.
pub fn sample_volume(f: &HypersurfaceFamily, grid: &GridSpec, axis: Axis) -> Result<Vec<VolumeSample>, ProjectionError> {
    if let Some((param, value)) = grid.fixed {
        return Err(ProjectionError::NotAVolume { param, value });
    }
    check_counts(grid, &Var::ALL)?;
    let sv = domain(f, Var::S).samples(grid.n_s);
    let tv = domain(f, Var::T).samples(grid.n_t);
    let qv = domain(f, Var::Q).samples(grid.n_q);
    let inner: Vec<(f64, f64)> = tv.iter().flat_map(|&t| qv.iter().map(move |&q| (t, q))).collect();
    let rows = eval_rows(f, &sv, &inner, |s, t, q| (s, t, q))?;
    Ok(sv
        .iter()
        .zip(rows)
        .flat_map(|(&s, row)| {
            inner.iter().zip(row).map(move |(&(t, q), p)| VolumeSample {
                s,
                t,
                q,
                point: project_drop_axis(p, axis),
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::builtin;
    use std::collections::HashMap;

    fn s3() -> f64 {
        3f64.sqrt()
    }

    #[test]
    fn drop_axis() {
        let p = Vec4::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(project_drop_axis(p, Axis::W), [1.0, 2.0, 3.0]);
        assert_eq!(project_drop_axis(p, Axis::Z), [1.0, 2.0, 4.0]);
        assert_eq!(project_drop_axis(p, Axis::X), [2.0, 3.0, 4.0]);
        assert_eq!("y".parse::<Axis>().unwrap(), Axis::Y);
        assert!("v".parse::<Axis>().is_err());
    }

    #[test]
    fn projection_is_linear() {
        let a = Vec4::new(0.1, -2.5, 3.25, 7.0);
        let b = Vec4::new(-1.0, 0.5, 1e-3, 2.0);
        for ax in Axis::ALL {
            let sum = project_drop_axis(a + b, ax);
            let pa = project_drop_axis(a, ax);
            let pb = project_drop_axis(b, ax);
            for k in 0..3 {
                assert_eq!(sum[k], pa[k] + pb[k]);
            }
        }
    }

    #[test]
    fn example1_slice_counts_and_closed_form() {
        let f = builtin("example1").unwrap();
        let mesh = slice_to_mesh(&f, &GridSpec::slice(Var::Q, 0.125), Axis::W).unwrap();
        assert_eq!(mesh.vertex_count(), 65 * 17);
        assert_eq!(mesh.triangle_count(), 2 * 64 * 16);
        assert_eq!(mesh.marked_polyline.len(), 65);

        let c = (1.0 + 8.0 * s3()) / 16.0;
        let ss = f.curve().domain().samples(65);
        let ts = f.params().t_domain.samples(17);
        for (i, &s) in ss.iter().enumerate() {
            for (j, &t) in ts.iter().enumerate() {
                let v = mesh.vertices[i * 17 + j];
                let want = [
                    0.5 * s.cos() - c * (t - 0.5) * s.sin(),
                    0.5 * s.sin() + c * (t - 0.5) * s.cos(),
                    0.5 * s + (t - 0.5) / 16.0 - s3() / 6.0 * (t - 0.5) + 6f64.sqrt() / 24.0,
                ];
                for k in 0..3 {
                    assert!((v[k] - want[k]).abs() < 1e-12, "({i},{j}) {k}: {} vs {}", v[k], want[k]);
                }
            }
        }
    }

    #[test]
    fn polyline_traces_slice_curve() {
        let f = builtin("example1").unwrap();
        // q0 = 0 is a grid sample of the fixed-t slice's free parameter.
        let mesh = slice_to_mesh(&f, &GridSpec::slice(Var::T, 0.5), Axis::W).unwrap();
        assert_eq!(mesh.vertex_count(), 65 * 17);
        for (i, &s) in f.curve().domain().samples(65).iter().enumerate() {
            let v = mesh.vertices[mesh.marked_polyline[i]];
            let r = project_drop_axis(f.curve().point(s).unwrap(), Axis::W);
            for k in 0..3 {
                assert!((v[k] - r[k]).abs() < 1e-14);
            }
        }
        // t0 = 1/2 is not a sample of a 4-point grid on [0, 1].
        let grid = GridSpec::slice(Var::Q, 0.125).with_counts(9, 4, 2);
        let mesh = slice_to_mesh(&f, &grid, Axis::W).unwrap();
        assert_eq!(mesh.vertex_count(), 9 * 4 + 9);
        assert_eq!(mesh.marked_polyline, (36..45).collect::<Vec<_>>());
    }

    #[test]
    fn example2_slice_matches_closed_form() {
        let f = builtin("example2").unwrap();
        let mesh = slice_to_mesh(&f, &GridSpec::slice(Var::Q, 1.0 / 500.0), Axis::W).unwrap();
        let ts = f.params().t_domain.samples(17);
        for (i, &s) in f.curve().domain().samples(65).iter().enumerate() {
            for (j, &t) in ts.iter().enumerate() {
                let v = mesh.vertices[i * 17 + j];
                let a = s3() / 1000.0 * (s + t + 1.0);
                let want = [0.5 * s.sin() + a * s.cos(), 0.5 * s.cos() - a * s.sin(), -(s + 1.0) * (t - 0.5)];
                for k in 0..3 {
                    assert!((v[k] - want[k]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn example3_drop_z_is_t_independent() {
        let f = builtin("example3").unwrap();
        let a = slice_to_mesh(&f, &GridSpec::slice(Var::T, 1.0), Axis::Z).unwrap();
        let b = slice_to_mesh(&f, &GridSpec::slice(Var::T, 0.2), Axis::Z).unwrap();
        let qs = f.params().q_domain.samples(17);
        for (i, &s) in f.curve().domain().samples(65).iter().enumerate() {
            for (j, &q) in qs.iter().enumerate() {
                let k = i * 17 + j;
                let g = (s * (q - 1.0)).sin();
                let want = [
                    0.5 * s.sin() + s3() / 2.0 * s.cos() * g,
                    0.5 * s.cos() - s3() / 2.0 * s.sin() * g,
                    s3() / 2.0 * s - 0.5 * g,
                ];
                for c in 0..3 {
                    assert!((a.vertices[k][c] - want[c]).abs() < 1e-12);
                    assert!((b.vertices[k][c] - want[c]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn triangulation_is_watertight() {
        let f = builtin("example1").unwrap();
        let grid = GridSpec::slice(Var::Q, 0.125).with_counts(7, 5, 2);
        let mesh = slice_to_mesh(&f, &grid, Axis::W).unwrap();
        let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &mesh.triangles {
            assert!(tri[0] != tri[1] && tri[1] != tri[2] && tri[0] != tri[2]);
            assert!(tri.iter().all(|&v| v < mesh.vertex_count()));
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let on_border = |v: usize| {
            let (i, j) = (v / 5, v % 5);
            i == 0 || i == 6 || j == 0 || j == 4
        };
        for (&(a, b), &n) in &edges {
            let border = on_border(a) && on_border(b) && (a / 5 == b / 5 || a % 5 == b % 5) && {
                let (ia, ja, ib, jb) = (a / 5, a % 5, b / 5, b % 5);
                (ia == ib && (ia == 0 || ia == 6)) || (ja == jb && (ja == 0 || ja == 4))
            };
            assert_eq!(n, if border { 1 } else { 2 }, "edge {a}-{b}");
        }
    }

    #[test]
    fn fixed_s_slice_has_no_polyline() {
        let f = builtin("example1").unwrap();
        let mesh = slice_to_mesh(&f, &GridSpec::slice(Var::S, 1.0), Axis::W).unwrap();
        assert_eq!(mesh.vertex_count(), 17 * 17);
        assert!(mesh.marked_polyline.is_empty());
    }

    #[test]
    fn errors() {
        let f = builtin("example1").unwrap();
        assert!(matches!(
            slice_to_mesh(&f, &GridSpec::slice(Var::Q, 2.0), Axis::W),
            Err(ProjectionError::Domain { param: Var::Q, .. })
        ));
        assert!(matches!(slice_to_mesh(&f, &GridSpec::volume(), Axis::W), Err(ProjectionError::NotASlice)));
        assert!(matches!(
            sample_volume(&f, &GridSpec::slice(Var::Q, 0.0), Axis::W),
            Err(ProjectionError::NotAVolume { .. })
        ));
        let thin = GridSpec::slice(Var::Q, 0.0).with_counts(1, 5, 5);
        assert!(matches!(slice_to_mesh(&f, &thin, Axis::W), Err(ProjectionError::GridTooSmall { .. })));
    }

    #[test]
    fn volume_ordering_and_consistency() {
        let f = builtin("example1").unwrap();
        let rows = sample_volume(&f, &GridSpec::volume().with_counts(3, 3, 3), Axis::W).unwrap();
        assert_eq!(rows.len(), 27);
        assert!(rows.windows(2).all(|w| (w[0].s, w[0].t, w[0].q) < (w[1].s, w[1].t, w[1].q)));
        for r in rows.iter().filter(|r| r.t == 0.5 && r.q == 0.0) {
            let want = project_drop_axis(f.curve().point(r.s).unwrap(), Axis::W);
            assert_eq!(r.point, want);
        }

        // q = 1/8 is a sample of a 9-point q grid on [0, 1].
        let vol = sample_volume(&f, &GridSpec::volume(), Axis::W).unwrap();
        let grid = GridSpec::slice(Var::Q, 0.125).with_counts(33, 9, 9);
        let mesh = slice_to_mesh(&f, &grid, Axis::W).unwrap();
        let plane: Vec<_> = vol.iter().filter(|r| r.q == 0.125).collect();
        assert_eq!(plane.len(), mesh.vertex_count());
        for (r, v) in plane.iter().zip(&mesh.vertices) {
            assert_eq!(&r.point, v);
        }
    }
}
