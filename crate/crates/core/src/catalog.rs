//! Named example surfaces with analytic evaluators and first-derivative jets,
//! and the JSON grid-file format for user-supplied samples.
//!
//! Expectation flags are documentation for humans. The test suite re-derives
//! each of them through the check pipeline.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::path::Path;
use std::sync::OnceLock;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::Quaternion;
use crate::error::{Error, Result};
use crate::gauss::Immersion;
use crate::gridcalc::{GridDomain, GridMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Expectations {
    pub conformal: bool,
    pub lagrangian: bool,
    pub special_lagrangian: bool,
    pub hsl: bool,
    pub cmc: bool,
    pub rho_harmonic: bool,
}

type PointFn = fn(f64, f64) -> DVector<f64>;

#[derive(Debug, Clone, Copy)]
pub enum Evaluator {
    /// Point and analytic `(X_x, X_y)`.
    Surface { point: PointFn, dx: PointFn, dy: PointFn },
    /// A map into the unit quaternions used as the rotation part of a frame.
    Rotor(fn(f64, f64) -> Quaternion),
}

#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub evaluator: Evaluator,
    /// `(x0, lx, y0, ly)`
    pub extent: (f64, f64, f64, f64),
    pub periodic: [bool; 2],
    pub expect: Expectations,
}

impl CatalogEntry {
    /// Grid with spacing `extent / grid` on every axis; open axes include the
    /// far end point, so they carry `grid + 1` samples.
    pub fn domain(&self, grid: usize) -> Result<GridDomain> {
        let (x0, lx, y0, ly) = self.extent;
        let n = |p: bool| if p { grid } else { grid + 1 };
        GridDomain::rectangle(n(self.periodic[0]), n(self.periodic[1]), x0, lx, y0, ly, self.periodic)
    }

    pub fn is_surface(&self) -> bool {
        matches!(self.evaluator, Evaluator::Surface { .. })
    }

    pub fn dim(&self) -> usize {
        match self.evaluator {
            Evaluator::Surface { point, .. } => point(0.0, 0.0).len(),
            Evaluator::Rotor(_) => 4,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> DVector<f64> {
        match self.evaluator {
            Evaluator::Surface { point, .. } => point(x, y),
            Evaluator::Rotor(f) => f(x, y).to_vector().as_slice().to_vec().into(),
        }
    }

    pub fn immersion(&self, grid: usize) -> Result<Immersion> {
        let d = self.domain(grid)?;
        match self.evaluator {
            Evaluator::Surface { point, dx, dy } => {
                Immersion::with_jets(GridMap::from_fn(d, point), GridMap::from_fn(d, dx), GridMap::from_fn(d, dy))
            }
            Evaluator::Rotor(_) => Err(Error::DimensionMismatch(format!("'{}' is a frame-only entry", self.name))),
        }
    }

    pub fn rotor(&self, grid: usize) -> Result<GridMap<Quaternion>> {
        match self.evaluator {
            Evaluator::Rotor(f) => Ok(GridMap::from_fn(self.domain(grid)?, f)),
            Evaluator::Surface { .. } => {
                Err(Error::DimensionMismatch(format!("'{}' is not a frame-only entry", self.name)))
            }
        }
    }
}

fn v(c: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(c)
}

fn c2(z1: Complex64, z2: Complex64) -> DVector<f64> {
    v(&[z1.re, z1.im, z2.re, z2.im])
}

fn ei(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, t)
}

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn clifford(x: f64, y: f64) -> DVector<f64> {
    c2(ei(x) * FRAC_1_SQRT_2, ei(y) * FRAC_1_SQRT_2)
}
fn clifford_x(x: f64, _: f64) -> DVector<f64> {
    c2(I * ei(x) * FRAC_1_SQRT_2, ZERO)
}
fn clifford_y(_: f64, y: f64) -> DVector<f64> {
    c2(ZERO, I * ei(y) * FRAC_1_SQRT_2)
}

fn pad8(p: DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(8);
    out.rows_mut(0, 4).copy_from(&p);
    out
}

// Lagrangian since γ₁γ₁′ − γ₂γ₂′ = cosh y sinh y − sinh y cosh y = 0.
fn catenoid(x: f64, y: f64) -> DVector<f64> {
    c2(ei(x) * y.cosh(), ei(-x) * y.sinh())
}
fn catenoid_x(x: f64, y: f64) -> DVector<f64> {
    c2(I * ei(x) * y.cosh(), -I * ei(-x) * y.sinh())
}
fn catenoid_y(x: f64, y: f64) -> DVector<f64> {
    c2(ei(x) * y.sinh(), ei(-x) * y.cosh())
}

fn sphere(x: f64, y: f64) -> DVector<f64> {
    let s = x * x + y * y + 1.0;
    v(&[2.0 * x / s, 2.0 * y / s, (s - 2.0) / s])
}
fn sphere_x(x: f64, y: f64) -> DVector<f64> {
    let s = x * x + y * y + 1.0;
    let s2 = s * s;
    v(&[2.0 * (s - 2.0 * x * x) / s2, -4.0 * x * y / s2, 4.0 * x / s2])
}
fn sphere_y(x: f64, y: f64) -> DVector<f64> {
    let s = x * x + y * y + 1.0;
    let s2 = s * s;
    v(&[-4.0 * x * y / s2, 2.0 * (s - 2.0 * y * y) / s2, 4.0 * y / s2])
}

pub const TORUS_R: f64 = 2.0;
pub const TORUS_SMALL_R: f64 = 1.0;
pub const TORUS_NODES: usize = 4096;

/// Period of the isothermal coordinate `w` over one turn of the tube.
pub fn torus_w_period() -> f64 {
    torus_table().period
}

struct TorusTable {
    period: f64,
    h: f64,
    /// `v` at `w = k·h`, `k = 0..=nodes`
    v: Vec<f64>,
}

fn torus_speed(v: f64) -> f64 {
    (TORUS_R + TORUS_SMALL_R * v.cos()) / TORUS_SMALL_R
}

fn torus_table() -> &'static TorusTable {
    static TABLE: OnceLock<TorusTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Period by composite Gauss–Legendre quadrature of r/(R + r cos v).
        let nodes = [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
        let weights = [
            0.236_926_885_056_189,
            0.478_628_670_499_366,
            0.568_888_888_888_889,
            0.478_628_670_499_366,
            0.236_926_885_056_189,
        ];
        let panels = 256;
        let dv = 2.0 * PI / panels as f64;
        let mut period = 0.0;
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * dv;
            for (t, w) in nodes.iter().zip(weights) {
                period += 0.5 * dv * w / torus_speed(mid + 0.5 * dv * t);
            }
        }
        // Invert w(v) by integrating dv/dw with RK4 on a uniform w grid.
        let h = period / TORUS_NODES as f64;
        let mut v = Vec::with_capacity(TORUS_NODES + 1);
        let mut cur = 0.0;
        v.push(cur);
        for _ in 0..TORUS_NODES {
            let k1 = torus_speed(cur);
            let k2 = torus_speed(cur + 0.5 * h * k1);
            let k3 = torus_speed(cur + 0.5 * h * k2);
            let k4 = torus_speed(cur + h * k3);
            cur += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            v.push(cur);
        }
        TorusTable { period, h, v }
    })
}

/// `v(w)` and `dv/dw` from the cubic Hermite interpolant of the table.
fn torus_v(w: f64) -> (f64, f64) {
    let t = torus_table();
    let turns = (w / t.period).floor();
    let local = w - turns * t.period;
    let k = ((local / t.h) as usize).min(TORUS_NODES - 1);
    let s = local / t.h - k as f64;
    let (p0, p1) = (t.v[k], t.v[k + 1]);
    let (m0, m1) = (torus_speed(p0) * t.h, torus_speed(p1) * t.h);
    let (s2, s3) = (s * s, s * s * s);
    let val =
        (2.0 * s3 - 3.0 * s2 + 1.0) * p0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * p1 + (s3 - s2) * m1;
    let der = (6.0 * s2 - 6.0 * s) * p0
        + (3.0 * s2 - 4.0 * s + 1.0) * m0
        + (-6.0 * s2 + 6.0 * s) * p1
        + (3.0 * s2 - 2.0 * s) * m1;
    (val + 2.0 * PI * turns, der / t.h)
}

fn torus_point_v(u: f64, v: f64) -> DVector<f64> {
    let rho = TORUS_R + TORUS_SMALL_R * v.cos();
    crate::catalog::v(&[rho * u.cos(), rho * u.sin(), TORUS_SMALL_R * v.sin()])
}
fn torus(u: f64, w: f64) -> DVector<f64> {
    torus_point_v(u, torus_v(w).0)
}
fn torus_x(u: f64, w: f64) -> DVector<f64> {
    let rho = TORUS_R + TORUS_SMALL_R * torus_v(w).0.cos();
    v(&[-rho * u.sin(), rho * u.cos(), 0.0])
}
fn torus_y(u: f64, w: f64) -> DVector<f64> {
    let (s, ds) = torus_v(w);
    let r = TORUS_SMALL_R;
    v(&[-r * s.sin() * u.cos() * ds, -r * s.sin() * u.sin() * ds, r * s.cos() * ds])
}

fn rotor(x: f64, _: f64) -> Quaternion {
    Quaternion::exp_axis(Quaternion::I, x * x)
}

const SURFACE: Expectations = Expectations {
    conformal: true,
    lagrangian: false,
    special_lagrangian: false,
    hsl: false,
    cmc: false,
    rho_harmonic: false,
};

fn entries() -> Vec<CatalogEntry> {
    let tau = 2.0 * PI;
    vec![
        CatalogEntry {
            name: "lagrangian_plane",
            description: "X = x + y j; ρ ≡ j so β ≡ 0",
            evaluator: Evaluator::Surface {
                point: |x, y| v(&[x, 0.0, y, 0.0]),
                dx: |_, _| v(&[1.0, 0.0, 0.0, 0.0]),
                dy: |_, _| v(&[0.0, 0.0, 1.0, 0.0]),
            },
            extent: (-1.0, 2.0, -1.0, 2.0),
            periodic: [false, false],
            expect: Expectations {
                lagrangian: true,
                special_lagrangian: true,
                hsl: true,
                rho_harmonic: true,
                ..SURFACE
            },
        },
        CatalogEntry {
            name: "clifford_torus",
            description: "X = (e^{ix}, e^{iy})/√2; β = x + y + π is linear, hence harmonic but not constant",
            evaluator: Evaluator::Surface { point: clifford, dx: clifford_x, dy: clifford_y },
            extent: (0.0, tau, 0.0, tau),
            periodic: [true, true],
            expect: Expectations { lagrangian: true, hsl: true, rho_harmonic: true, ..SURFACE },
        },
        CatalogEntry {
            name: "lagrangian_catenoid",
            description: "X = (cosh y e^{ix}, sinh y e^{-ix}); both speeds squared equal cosh 2y, β ≡ π/2",
            evaluator: Evaluator::Surface { point: catenoid, dx: catenoid_x, dy: catenoid_y },
            extent: (0.0, tau, -1.0, 2.0),
            periodic: [true, false],
            expect: Expectations {
                lagrangian: true,
                special_lagrangian: true,
                hsl: true,
                rho_harmonic: true,
                ..SURFACE
            },
        },
        CatalogEntry {
            name: "complex_line",
            description: "X = (x + iy, 0); ρ ≡ i, ω restricts to the area form",
            evaluator: Evaluator::Surface {
                point: |x, y| v(&[x, y, 0.0, 0.0]),
                dx: |_, _| v(&[1.0, 0.0, 0.0, 0.0]),
                dy: |_, _| v(&[0.0, 1.0, 0.0, 0.0]),
            },
            extent: (-1.0, 2.0, -1.0, 2.0),
            periodic: [false, false],
            expect: Expectations { rho_harmonic: true, ..SURFACE },
        },
        CatalogEntry {
            name: "cmc_cylinder",
            description: "X = (cos x, sin x, y) in Im H; Gauss map (cos x, sin x, 0) is harmonic, H = -1/2",
            evaluator: Evaluator::Surface {
                point: |x, y| v(&[x.cos(), x.sin(), y]),
                dx: |x, _| v(&[-x.sin(), x.cos(), 0.0]),
                dy: |_, _| v(&[0.0, 0.0, 1.0]),
            },
            extent: (0.0, tau, -1.0, 2.0),
            periodic: [true, false],
            expect: Expectations { cmc: true, rho_harmonic: true, ..SURFACE },
        },
        CatalogEntry {
            name: "round_sphere",
            description: "inverse stereographic projection; Gauss map is the identity of S², conformal hence harmonic",
            evaluator: Evaluator::Surface { point: sphere, dx: sphere_x, dy: sphere_y },
            extent: (-1.0, 2.0, -1.0, 2.0),
            periodic: [false, false],
            expect: Expectations { cmc: true, rho_harmonic: true, ..SURFACE },
        },
        CatalogEntry {
            name: "torus_of_revolution",
            description: "R = 2, r = 1 in isothermal coordinates (u, w), w = ∫ r dv/(R + r cos v); not CMC",
            evaluator: Evaluator::Surface { point: torus, dx: torus_x, dy: torus_y },
            extent: (0.0, tau, 0.0, tau / 3f64.sqrt()),
            periodic: [true, true],
            expect: SURFACE,
        },
        CatalogEntry {
            name: "octonion_clifford",
            description: "Clifford torus through H ⊂ O; its octonionic left Gauss map is harmonic into S⁶",
            evaluator: Evaluator::Surface {
                point: |x, y| pad8(clifford(x, y)),
                dx: |x, y| pad8(clifford_x(x, y)),
                dy: |x, y| pad8(clifford_y(x, y)),
            },
            extent: (0.0, tau, 0.0, tau),
            periodic: [true, true],
            expect: Expectations { lagrangian: true, hsl: true, rho_harmonic: true, ..SURFACE },
        },
        CatalogEntry {
            name: "nonharmonic_rotor",
            description: "frame p = e^{ix²}; its angle 2x² has Laplacian 4",
            evaluator: Evaluator::Rotor(rotor),
            extent: (-1.0, 2.0, -1.0, 2.0),
            periodic: [false, false],
            expect: Expectations::default(),
        },
    ]
}

pub fn names() -> Vec<&'static str> {
    entries().iter().map(|e| e.name).collect()
}

pub fn builtin(name: &str) -> Result<CatalogEntry> {
    entries()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownEntry { name: name.to_string(), available: names().join(", ") })
}

pub const GRID_SCHEMA: &str =
    "hsl-lab grid v1: values[i*ny + j] is the dim-tuple at (x0 + i*hx, y0 + j*hy); row-major, y fastest";

/// On-disk sample of a map `Ω → R^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFile {
    #[serde(default = "schema_string")]
    pub schema: String,
    pub dim: usize,
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub y0: f64,
    pub periodic: [bool; 2],
    pub values: Vec<Vec<f64>>,
    #[serde(default)]
    pub metadata: serde_json::Value,
}

fn schema_string() -> String {
    GRID_SCHEMA.to_string()
}

impl GridFile {
    pub fn from_map(map: &GridMap<DVector<f64>>, metadata: serde_json::Value) -> Self {
        let d = map.domain;
        Self {
            schema: schema_string(),
            dim: map.values.first().map(|v| v.len()).unwrap_or(0),
            nx: d.nx,
            ny: d.ny,
            hx: d.hx,
            hy: d.hy,
            x0: d.x0,
            y0: d.y0,
            periodic: d.periodic,
            values: map.values.iter().map(|v| v.as_slice().to_vec()).collect(),
            metadata,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if ![3, 4, 8].contains(&self.dim) {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        let expected = self.nx * self.ny * self.dim;
        let actual: usize = self.values.iter().map(Vec::len).sum();
        if actual != expected || self.values.iter().any(|t| t.len() != self.dim) {
            return Err(Error::ShapeMismatch { expected, actual });
        }
        if let Some(k) = self.values.iter().flatten().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        Ok(())
    }

    pub fn to_map(&self) -> Result<GridMap<DVector<f64>>> {
        self.validate()?;
        let d = GridDomain::new(self.nx, self.ny, self.hx, self.hy, self.x0, self.y0, self.periodic)?;
        GridMap::from_values(d, self.values.iter().map(|t| DVector::from_column_slice(t)).collect())
    }
}

pub fn load_grid(path: &Path) -> Result<Immersion> {
    let text = std::fs::read_to_string(path)?;
    let file: GridFile = serde_json::from_str(&text)?;
    Immersion::new(file.to_map()?)
}

pub fn save_grid(path: &Path, imm: &Immersion, metadata: serde_json::Value) -> Result<()> {
    let file = GridFile::from_map(&imm.x, metadata);
    file.validate()?;
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::conformality_residual;

    #[test]
    fn retrievals() {
        let c = builtin("clifford_torus").unwrap();
        let p = c.eval(0.0, 0.0);
        let q = crate::gauss::vec_to_quaternion(&p);
        assert!((q - (Quaternion::ONE + Quaternion::J) * FRAC_1_SQRT_2).norm() < 1e-15);
        let cat = builtin("lagrangian_catenoid").unwrap();
        for x in [0.0, 0.7, 2.0] {
            let p = cat.eval(x, 0.0);
            assert!((p - v(&[x.cos(), x.sin(), 0.0, 0.0])).norm() < 1e-15);
        }
        match builtin("moebius") {
            Err(Error::UnknownEntry { available, .. }) => assert!(available.contains("clifford_torus")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn jets_match_differences() {
        let h = 1e-5;
        for e in entries().iter().filter(|e| e.is_surface()) {
            let Evaluator::Surface { point, dx, dy } = e.evaluator else { unreachable!() };
            for &(x, y) in &[(0.3, 0.2), (1.1, -0.4), (2.5, 0.6)] {
                let fx = (point(x + h, y) - point(x - h, y)) / (2.0 * h);
                let fy = (point(x, y + h) - point(x, y - h)) / (2.0 * h);
                assert!((fx - dx(x, y)).norm() < 1e-7, "{} x", e.name);
                assert!((fy - dy(x, y)).norm() < 1e-7, "{} y", e.name);
            }
        }
    }

    #[test]
    fn torus_quadrature_against_closed_form() {
        // w(v) = (2/√3) atan(tan(v/2)/√3) on (−π, π)
        let s3 = 3f64.sqrt();
        assert!((torus_w_period() - 2.0 * PI / s3).abs() < 1e-13);
        for &vv in &[0.1f64, 0.9, 2.0, 3.0, -1.5] {
            let w = 2.0 / s3 * ((vv / 2.0).tan() / s3).atan();
            let w = w.rem_euclid(torus_w_period());
            let (back, _) = torus_v(w);
            let diff = (back - vv).rem_euclid(2.0 * PI);
            assert!(diff.min(2.0 * PI - diff) < 1e-11, "v={vv}");
        }
        let imm = builtin("torus_of_revolution").unwrap().immersion(128).unwrap();
        assert!(conformality_residual(&imm).unwrap() < 1e-6);
    }

    #[test]
    fn every_surface_is_conformal() {
        for e in entries().iter().filter(|e| e.is_surface()) {
            let imm = e.immersion(16).unwrap();
            assert!(conformality_residual(&imm).unwrap() < 1e-10, "{}", e.name);
        }
    }

    #[test]
    fn grid_file_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        let imm = builtin("clifford_torus").unwrap().immersion(8).unwrap();
        save_grid(&path, &imm, serde_json::json!({"source": "clifford_torus"})).unwrap();
        let back = load_grid(&path).unwrap();
        assert_eq!(back.x.values, imm.x.values);
        assert_eq!(back.x.domain, imm.x.domain);

        let mut f = GridFile::from_map(&imm.x, serde_json::Value::Null);
        f.values.pop();
        assert_eq!(f.to_map().unwrap_err(), Error::ShapeMismatch { expected: 256, actual: 252 });
        let mut g = GridFile::from_map(&imm.x, serde_json::Value::Null);
        g.dim = 5;
        assert_eq!(g.to_map().unwrap_err(), Error::UnsupportedDimension(5));
        let mut nan = GridFile::from_map(&imm.x, serde_json::Value::Null);
        nan.values[1][2] = f64::NAN;
        assert_eq!(nan.to_map().unwrap_err(), Error::NonFinite(6));
    }
}
