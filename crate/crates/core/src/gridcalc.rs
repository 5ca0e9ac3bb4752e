//! Second-order finite differences on rectangular parameter grids.
//!
//! Non-periodic axes lose one ring of points per derivative; a [`GridMap`]
//! carries the index [`Region`] on which its values are meaningful. All
//! residual norms are sup norms over that region.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{Octonion, Quaternion};
use crate::error::{Error, Result};

/// Residual floor below which a convergence study is reported as exact.
pub const EXACT_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridDomain {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub x0: f64,
    pub y0: f64,
    pub periodic: [bool; 2],
}

impl GridDomain {
    pub fn new(nx: usize, ny: usize, hx: f64, hy: f64, x0: f64, y0: f64, periodic: [bool; 2]) -> Result<Self> {
        if !(hx > 0.0 && hy > 0.0) {
            return Err(Error::BadSpacing(hx, hy));
        }
        if nx < 3 {
            return Err(Error::GridTooSmall { axis: 'x', n: nx });
        }
        if ny < 3 {
            return Err(Error::GridTooSmall { axis: 'y', n: ny });
        }
        Ok(Self { nx, ny, hx, hy, x0, y0, periodic })
    }

    /// `[x0, x0 + lx) × [y0, y0 + ly)` sampled with `nx × ny` points; periodic
    /// axes use `h = l / n`, open axes include both end points.
    pub fn rectangle(nx: usize, ny: usize, x0: f64, lx: f64, y0: f64, ly: f64, periodic: [bool; 2]) -> Result<Self> {
        let hx = if periodic[0] { lx / nx as f64 } else { lx / (nx.max(2) - 1) as f64 };
        let hy = if periodic[1] { ly / ny as f64 } else { ly / (ny.max(2) - 1) as f64 };
        Self::new(nx, ny, hx, hy, x0, y0, periodic)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major with `y` fastest.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x0 + i as f64 * self.hx, self.y0 + j as f64 * self.hy)
    }

    pub fn full_region(&self) -> Region {
        Region { i0: 0, i1: self.nx, j0: 0, j1: self.ny }
    }

    /// Same samples with both axes treated as open.
    pub fn opened(&self) -> Self {
        Self { periodic: [false, false], ..*self }
    }

    /// Representative spacing.
    pub fn h(&self) -> f64 {
        self.hx.max(self.hy)
    }
}

/// Half-open index rectangle `[i0, i1) × [j0, j1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub i0: usize,
    pub i1: usize,
    pub j0: usize,
    pub j1: usize,
}

impl Region {
    pub fn intersect(&self, o: &Region) -> Region {
        Region { i0: self.i0.max(o.i0), i1: self.i1.min(o.i1), j0: self.j0.max(o.j0), j1: self.j1.min(o.j1) }
    }

    pub fn shrink(&self, di: usize, dj: usize) -> Region {
        Region {
            i0: self.i0 + di,
            i1: self.i1.saturating_sub(di).max(self.i0 + di),
            j0: self.j0 + dj,
            j1: self.j1.saturating_sub(dj).max(self.j0 + dj),
        }
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i >= self.i0 && i < self.i1 && j >= self.j0 && j < self.j1
    }

    pub fn is_empty(&self) -> bool {
        self.i0 >= self.i1 || self.j0 >= self.j1
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.i0..self.i1).flat_map(move |i| (self.j0..self.j1).map(move |j| (i, j)))
    }
}

/// Values that finite-difference stencils can combine.
pub trait Field: Clone + Send + Sync {
    /// `a·self + b·other`
    fn lin(&self, a: f64, other: &Self, b: f64) -> Self;
    fn zero_like(&self) -> Self;
    /// Euclidean (Frobenius) norm.
    fn norm(&self) -> f64;

    fn scale(&self, a: f64) -> Self {
        self.lin(a, self, 0.0)
    }
}

/// Real fields with a complexification, used for `∂/∂z`.
pub trait Complexify: Field {
    type C: Field + TimesI;
    fn complexify(&self) -> Self::C;
}

pub trait TimesI {
    fn times_i(&self) -> Self;
}

impl Field for f64 {
    fn lin(&self, a: f64, o: &Self, b: f64) -> Self {
        a * self + b * o
    }
    fn zero_like(&self) -> Self {
        0.0
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
}

impl Field for Complex64 {
    fn lin(&self, a: f64, o: &Self, b: f64) -> Self {
        self * a + o * b
    }
    fn zero_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
}

impl TimesI for Complex64 {
    fn times_i(&self) -> Self {
        self * Complex64::i()
    }
}

impl Complexify for f64 {
    type C = Complex64;
    fn complexify(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
}

impl Complexify for Complex64 {
    type C = Complex64;
    fn complexify(&self) -> Complex64 {
        *self
    }
}

impl Field for Quaternion {
    fn lin(&self, a: f64, o: &Self, b: f64) -> Self {
        *self * a + *o * b
    }
    fn zero_like(&self) -> Self {
        Quaternion::ZERO
    }
    fn norm(&self) -> f64 {
        Quaternion::norm(*self)
    }
}

impl Field for Octonion {
    fn lin(&self, a: f64, o: &Self, b: f64) -> Self {
        *self * a + *o * b
    }
    fn zero_like(&self) -> Self {
        Octonion::ZERO
    }
    fn norm(&self) -> f64 {
        Octonion::norm(*self)
    }
}

impl Field for DVector<f64> {
    fn lin(&self, a: f64, o: &Self, b: f64) -> Self {
        self * a + o * b
    }
    fn zero_like(&self) -> Self {
        DVector::zeros(self.len())
    }
    fn norm(&self) -> f64 {
        nalgebra::Matrix::norm(self)
    }
}

impl Field for DVector<Complex64> {
    fn lin(&self, a: f64, o: &Self, b: f64) -> Self {
        self * Complex64::from(a) + o * Complex64::from(b)
    }
    fn zero_like(&self) -> Self {
        DVector::zeros(self.len())
    }
    fn norm(&self) -> f64 {
        nalgebra::Matrix::norm(self)
    }
}

impl TimesI for DVector<Complex64> {
    fn times_i(&self) -> Self {
        self * Complex64::i()
    }
}

impl Complexify for DVector<f64> {
    type C = DVector<Complex64>;
    fn complexify(&self) -> Self::C {
        self.map(Complex64::from)
    }
}

impl Field for DMatrix<f64> {
    fn lin(&self, a: f64, o: &Self, b: f64) -> Self {
        self * a + o * b
    }
    fn zero_like(&self) -> Self {
        DMatrix::zeros(self.nrows(), self.ncols())
    }
    fn norm(&self) -> f64 {
        nalgebra::Matrix::norm(self)
    }
}

impl Field for DMatrix<Complex64> {
    fn lin(&self, a: f64, o: &Self, b: f64) -> Self {
        self * Complex64::from(a) + o * Complex64::from(b)
    }
    fn zero_like(&self) -> Self {
        DMatrix::zeros(self.nrows(), self.ncols())
    }
    fn norm(&self) -> f64 {
        nalgebra::Matrix::norm(self)
    }
}

impl TimesI for DMatrix<Complex64> {
    fn times_i(&self) -> Self {
        self * Complex64::i()
    }
}

impl Complexify for DMatrix<f64> {
    type C = DMatrix<Complex64>;
    fn complexify(&self) -> Self::C {
        self.map(Complex64::from)
    }
}

impl Complexify for DMatrix<Complex64> {
    type C = DMatrix<Complex64>;
    fn complexify(&self) -> Self::C {
        self.clone()
    }
}

/// A sampled map `Ω → V`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMap<V> {
    pub domain: GridDomain,
    pub values: Vec<V>,
    pub valid: Region,
}

impl<V: Clone> GridMap<V> {
    pub fn from_fn(domain: GridDomain, f: impl Fn(f64, f64) -> V) -> Self {
        let mut values = Vec::with_capacity(domain.len());
        for i in 0..domain.nx {
            for j in 0..domain.ny {
                let (x, y) = domain.point(i, j);
                values.push(f(x, y));
            }
        }
        Self { domain, values, valid: domain.full_region() }
    }

    pub fn from_values(domain: GridDomain, values: Vec<V>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::ShapeMismatch { expected: domain.len(), actual: values.len() });
        }
        Ok(Self { domain, values, valid: domain.full_region() })
    }

    pub fn at(&self, i: usize, j: usize) -> &V {
        &self.values[self.domain.index(i, j)]
    }

    /// Pointwise map over all samples; the valid region is kept.
    pub fn map<W: Clone>(&self, f: impl Fn(&V) -> W) -> GridMap<W> {
        GridMap { domain: self.domain, values: self.values.iter().map(f).collect(), valid: self.valid }
    }

    /// Pointwise map with access to the grid indices.
    pub fn map_indexed<W: Clone>(&self, f: impl Fn(usize, usize, &V) -> W) -> GridMap<W> {
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.domain.nx {
            for j in 0..self.domain.ny {
                values.push(f(i, j, self.at(i, j)));
            }
        }
        GridMap { domain: self.domain, values, valid: self.valid }
    }

    pub fn zip_map<U: Clone, W: Clone>(&self, other: &GridMap<U>, f: impl Fn(&V, &U) -> W) -> GridMap<W> {
        debug_assert_eq!(self.domain, other.domain);
        GridMap {
            domain: self.domain,
            values: self.values.iter().zip(other.values.iter()).map(|(a, b)| f(a, b)).collect(),
            valid: self.valid.intersect(&other.valid),
        }
    }

    /// Same values on a domain whose axes are all open.
    pub fn opened(&self) -> Self {
        let domain = self.domain.opened();
        Self { domain, values: self.values.clone(), valid: self.valid }
    }

    pub fn restrict(&self, region: Region) -> Self {
        Self { valid: self.valid.intersect(&region), ..self.clone() }
    }

    pub fn valid_values(&self) -> impl Iterator<Item = &V> + '_ {
        self.valid.iter().map(move |(i, j)| self.at(i, j))
    }
}

impl<V: Field> GridMap<V> {
    /// Sup over the valid region of the pointwise norm.
    pub fn sup_norm(&self) -> f64 {
        self.valid_values().map(Field::norm).fold(0.0, f64::max)
    }

    pub fn lin(&self, a: f64, other: &Self, b: f64) -> Self {
        self.zip_map(other, |p, q| p.lin(a, q, b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.lin(1.0, other, -1.0)
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        let (n, name) =
            if axis == 0 { (self.valid.i1 - self.valid.i0, 'x') } else { (self.valid.j1 - self.valid.j0, 'y') };
        if n < 3 {
            return Err(Error::GridTooSmall { axis: name, n });
        }
        Ok(())
    }

    fn neighbor(&self, i: usize, j: usize, axis: usize, forward: bool) -> &V {
        let d = &self.domain;
        if axis == 0 {
            let ii = if forward { (i + 1) % d.nx } else { (i + d.nx - 1) % d.nx };
            self.at(ii, j)
        } else {
            let jj = if forward { (j + 1) % d.ny } else { (j + d.ny - 1) % d.ny };
            self.at(i, jj)
        }
    }

    fn shrunk(&self, axis: usize) -> Region {
        let periodic = self.domain.periodic[axis];
        match (axis, periodic) {
            (_, true) => self.valid,
            (0, false) => self.valid.shrink(1, 0),
            _ => self.valid.shrink(0, 1),
        }
    }

    fn stencil(&self, axis: usize, f: impl Fn(&V, &V, &V) -> V) -> Result<Self> {
        self.check_axis(axis)?;
        let valid = self.shrunk(axis);
        let zero = self.values[0].zero_like();
        let mut values = vec![zero; self.values.len()];
        for (i, j) in valid.iter() {
            let prev = self.neighbor(i, j, axis, false);
            let next = self.neighbor(i, j, axis, true);
            values[self.domain.index(i, j)] = f(prev, self.at(i, j), next);
        }
        Ok(Self { domain: self.domain, values, valid })
    }

    /// Central difference `∂/∂x`.
    pub fn d_dx(&self) -> Result<Self> {
        let s = 0.5 / self.domain.hx;
        self.stencil(0, |m, _, p| p.lin(s, m, -s))
    }

    /// Central difference `∂/∂y`.
    pub fn d_dy(&self) -> Result<Self> {
        let s = 0.5 / self.domain.hy;
        self.stencil(1, |m, _, p| p.lin(s, m, -s))
    }

    pub fn d_xx(&self) -> Result<Self> {
        let s = 1.0 / (self.domain.hx * self.domain.hx);
        self.stencil(0, |m, c, p| p.lin(s, m, s).lin(1.0, c, -2.0 * s))
    }

    pub fn d_yy(&self) -> Result<Self> {
        let s = 1.0 / (self.domain.hy * self.domain.hy);
        self.stencil(1, |m, c, p| p.lin(s, m, s).lin(1.0, c, -2.0 * s))
    }

    /// Five-point Laplacian.
    pub fn laplacian(&self) -> Result<Self> {
        Ok(self.d_xx()?.lin(1.0, &self.d_yy()?, 1.0))
    }
}

impl<V: Complexify> GridMap<V> {
    /// `∂/∂z = ½(∂x − i∂y)`.
    pub fn d_dz(&self) -> Result<GridMap<V::C>> {
        let dx = self.d_dx()?.map(Complexify::complexify);
        let dy = self.d_dy()?.map(|v| v.complexify().times_i());
        Ok(dx.lin(0.5, &dy, -0.5))
    }

    /// `∂/∂z̄ = ½(∂x + i∂y)`.
    pub fn d_dzbar(&self) -> Result<GridMap<V::C>> {
        let dx = self.d_dx()?.map(Complexify::complexify);
        let dy = self.d_dy()?.map(|v| v.complexify().times_i());
        Ok(dx.lin(0.5, &dy, 0.5))
    }
}

/// Harmonic-map tension `Δn + |dn|² n` of a sphere-valued map for the flat
/// domain metric, projected onto the tangent space of the sphere.
pub fn tension_sphere(n: &GridMap<DVector<f64>>) -> Result<GridMap<DVector<f64>>> {
    let off = n.valid_values().map(|v| (v.norm() - 1.0).abs()).fold(0.0, f64::max);
    if off > 1e-8 {
        return Err(Error::OffSphere(off));
    }
    let lap = n.laplacian()?;
    let nx = n.d_dx()?;
    let ny = n.d_dy()?;
    let energy = nx.zip_map(&ny, |a, b| a.norm_squared() + b.norm_squared());
    let mut out = lap.clone();
    out.valid = lap.valid.intersect(&energy.valid);
    for (i, j) in out.valid.iter() {
        let k = n.domain.index(i, j);
        let u = &n.values[k];
        let t = &lap.values[k] + u * energy.values[k];
        let normal = t.dot(u);
        out.values[k] = t - u * normal;
    }
    Ok(out)
}

/// `A = A_x dx + A_y dy` with matrix-valued coefficients.
#[derive(Debug, Clone)]
pub struct ConnectionGrid {
    pub ax: GridMap<DMatrix<Complex64>>,
    pub ay: GridMap<DMatrix<Complex64>>,
}

impl ConnectionGrid {
    pub fn new(ax: GridMap<DMatrix<Complex64>>, ay: GridMap<DMatrix<Complex64>>) -> Result<Self> {
        let (a, b) = (&ax.values[0], &ay.values[0]);
        if a.shape() != b.shape() || a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "connection coefficients {:?} and {:?}",
                a.shape(),
                b.shape()
            )));
        }
        Ok(Self { ax, ay })
    }

    /// From `dz` / `dz̄` components: `A_x = A_z + A_z̄`, `A_y = i(A_z − A_z̄)`.
    pub fn from_complex(az: &GridMap<DMatrix<Complex64>>, azbar: &GridMap<DMatrix<Complex64>>) -> Result<Self> {
        let ax = az.lin(1.0, azbar, 1.0);
        let ay = az.zip_map(azbar, |a, b| (a - b) * Complex64::i());
        Self::new(ax, ay)
    }
}

/// Coefficient of `dx∧dy` in `dA + ½[A∧A]`: `∂x A_y − ∂y A_x + [A_x, A_y]`.
pub fn curvature_residual(a: &ConnectionGrid) -> Result<GridMap<DMatrix<Complex64>>> {
    let dxy = a.ay.d_dx()?;
    let dyx = a.ax.d_dy()?;
    let bracket = a.ax.zip_map(&a.ay, |p, q| p * q - q * p);
    Ok(dxy.lin(1.0, &dyx, -1.0).lin(1.0, &bracket, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OrderEstimate {
    /// Every residual is below the exact floor.
    Exact,
    Order(f64),
}

impl OrderEstimate {
    pub fn value(&self) -> Option<f64> {
        match self {
            OrderEstimate::Exact => None,
            OrderEstimate::Order(p) => Some(*p),
        }
    }

    /// Exact, or an order of at least `min_order`.
    pub fn at_least(&self, min_order: f64) -> bool {
        match self {
            OrderEstimate::Exact => true,
            OrderEstimate::Order(p) => *p >= min_order,
        }
    }
}

/// Least-squares slope of `log(residual)` against `log(h)`.
pub fn convergence_order(levels: &[(f64, f64)]) -> Result<OrderEstimate> {
    convergence_order_with_floor(levels, EXACT_FLOOR)
}

pub fn convergence_order_with_floor(levels: &[(f64, f64)], floor: f64) -> Result<OrderEstimate> {
    if levels.len() < 2 {
        return Err(Error::TooFewLevels(levels.len()));
    }
    if levels.iter().all(|&(_, v)| v.abs() <= floor) {
        return Ok(OrderEstimate::Exact);
    }
    let pts: Vec<(f64, f64)> = levels.iter().map(|&(h, v)| (h.ln(), v.abs().max(f64::MIN_POSITIVE).ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(OrderEstimate::Order(sxy / sxx))
}
