//! Coefficient backends for Grassmann elements: constants, truncated Taylor
//! jets (exact derivatives at a point) and grid samples (finite differences).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gridcalc::GridMap;

pub trait Coefficient: Clone + std::fmt::Debug + Send + Sync {
    /// A constant with the same shape as `self`.
    fn constant(&self, c: Complex64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, c: Complex64) -> Self;
    fn conj(&self) -> Self;
    fn d_dz(&self) -> Result<Self>;
    fn d_dzbar(&self) -> Result<Self>;
    fn recip(&self) -> Result<Self>;
    /// Sup of the meaningful entries.
    fn max_abs(&self) -> f64;

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(Complex64::from(-1.0)))
    }
}

impl Coefficient for Complex64 {
    fn constant(&self, c: Complex64) -> Self {
        c
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, c: Complex64) -> Self {
        self * c
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn d_dz(&self) -> Result<Self> {
        Ok(Complex64::from(0.0))
    }
    fn d_dzbar(&self) -> Result<Self> {
        Ok(Complex64::from(0.0))
    }
    fn recip(&self) -> Result<Self> {
        if Coefficient::is_zero(self) {
            return Err(Error::NotInvertible);
        }
        Ok(self.inv())
    }
    fn max_abs(&self) -> f64 {
        self.norm()
    }
}

impl Coefficient for GridMap<Complex64> {
    fn constant(&self, c: Complex64) -> Self {
        self.map(|_| c)
    }
    fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self.zip_map(o, |a, b| a + b)
    }
    fn mul(&self, o: &Self) -> Self {
        self.zip_map(o, |a, b| a * b)
    }
    fn scale(&self, c: Complex64) -> Self {
        self.map(|a| a * c)
    }
    fn conj(&self) -> Self {
        self.map(|a| a.conj())
    }
    fn d_dz(&self) -> Result<Self> {
        GridMap::d_dz(self)
    }
    fn d_dzbar(&self) -> Result<Self> {
        GridMap::d_dzbar(self)
    }
    fn recip(&self) -> Result<Self> {
        if self.valid_values().any(|v| v.norm() == 0.0) {
            return Err(Error::NotInvertible);
        }
        Ok(self.map(|a| if a.norm() == 0.0 { *a } else { a.inv() }))
    }
    fn max_abs(&self) -> f64 {
        self.sup_norm()
    }
}

/// Bivariate Taylor polynomial in local coordinates `(X, Y) = (x − x0, y − y0)`
/// truncated at total degree `order`. `valid` is the degree up to which the
/// coefficients are exact; each derivative lowers it by one.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub order: usize,
    pub valid: i32,
    pub center: (f64, f64),
    c: Vec<Complex64>,
}

fn tri(a: usize, b: usize) -> usize {
    let d = a + b;
    d * (d + 1) / 2 + b
}

impl Jet {
    pub fn len_for(order: usize) -> usize {
        (order + 1) * (order + 2) / 2
    }

    pub fn constant_of(order: usize, c: Complex64) -> Self {
        let mut v = vec![Complex64::from(0.0); Self::len_for(order)];
        v[0] = c;
        Self { order, valid: order as i32, center: (0.0, 0.0), c: v }
    }

    /// Coefficients in graded order `1, X, Y, X², XY, Y², …`.
    pub fn from_coeffs(order: usize, center: (f64, f64), mut c: Vec<Complex64>) -> Self {
        c.resize(Self::len_for(order), Complex64::from(0.0));
        Self { order, valid: order as i32, center, c }
    }

    pub fn at(mut self, center: (f64, f64)) -> Self {
        self.center = center;
        self
    }

    /// `x0 + X`
    pub fn var_x(order: usize, x0: f64) -> Self {
        let mut j = Self::constant_of(order, Complex64::from(x0));
        j.center.0 = x0;
        if order >= 1 {
            j.c[tri(1, 0)] = Complex64::from(1.0);
        }
        j
    }

    /// `y0 + Y`
    pub fn var_y(order: usize, y0: f64) -> Self {
        let mut j = Self::constant_of(order, Complex64::from(y0));
        j.center.1 = y0;
        if order >= 1 {
            j.c[tri(0, 1)] = Complex64::from(1.0);
        }
        j
    }

    /// `z0 + X + iY`
    pub fn var_z(order: usize, x0: f64, y0: f64) -> Self {
        Jet::var_x(order, x0).add(&Jet::var_y(order, y0).scale(Complex64::i())).at((x0, y0))
    }

    pub fn coeff(&self, a: usize, b: usize) -> Complex64 {
        if a + b > self.order {
            Complex64::from(0.0)
        } else {
            self.c[tri(a, b)]
        }
    }

    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    /// `f ∘ self` from the derivatives `f^{(n)}(self(0))`, `n = 0..=order`.
    pub fn compose(&self, derivs: &[Complex64]) -> Self {
        let mut shifted = self.clone();
        shifted.c[0] = Complex64::from(0.0);
        let mut out = self.constant(derivs[0]);
        let mut power = self.constant(Complex64::from(1.0));
        let mut fact = 1.0;
        for (n, d) in derivs.iter().enumerate().take(self.order + 1).skip(1) {
            power = power.mul(&shifted);
            fact *= n as f64;
            out = out.add(&power.scale(d / fact));
        }
        out.valid = self.valid;
        out
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose(&vec![e; self.order + 1])
    }

    pub fn sin(&self) -> Self {
        let (s, c) = (self.value().sin(), self.value().cos());
        let d: Vec<Complex64> = (0..=self.order).map(|n| [s, c, -s, -c][n % 4]).collect();
        self.compose(&d)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = (self.value().sin(), self.value().cos());
        let d: Vec<Complex64> = (0..=self.order).map(|n| [c, -s, -c, s][n % 4]).collect();
        self.compose(&d)
    }

    /// `self^p` for real `p`, around a nonzero value.
    pub fn powf(&self, p: f64) -> Self {
        let v = self.value();
        let mut coef = 1.0;
        let d: Vec<Complex64> = (0..=self.order)
            .map(|n| {
                let out = v.powf(p - n as f64) * coef;
                coef *= p - n as f64;
                out
            })
            .collect();
        self.compose(&d)
    }

    fn d_axis(&self, axis: usize) -> Self {
        let mut c = vec![Complex64::from(0.0); self.c.len()];
        for d in 0..self.order {
            for b in 0..=d {
                let a = d - b;
                c[tri(a, b)] = if axis == 0 {
                    self.coeff(a + 1, b) * (a + 1) as f64
                } else {
                    self.coeff(a, b + 1) * (b + 1) as f64
                };
            }
        }
        Self { order: self.order, valid: self.valid - 1, center: self.center, c }
    }

    pub fn d_dx(&self) -> Self {
        self.d_axis(0)
    }

    pub fn d_dy(&self) -> Self {
        self.d_axis(1)
    }

    /// Largest coefficient difference up to the common valid degree.
    pub fn max_diff(&self, o: &Self) -> f64 {
        self.sub(o).max_abs()
    }
}

impl Coefficient for Jet {
    fn constant(&self, c: Complex64) -> Self {
        Jet::constant_of(self.order, c).at(self.center)
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        let c = self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect();
        Self { order: self.order, valid: self.valid.min(o.valid), center: self.center, c }
    }
    fn mul(&self, o: &Self) -> Self {
        let mut c = vec![Complex64::from(0.0); self.c.len()];
        for d1 in 0..=self.order {
            for b1 in 0..=d1 {
                let x = self.c[tri(d1 - b1, b1)];
                if x.re == 0.0 && x.im == 0.0 {
                    continue;
                }
                for d2 in 0..=(self.order - d1) {
                    for b2 in 0..=d2 {
                        c[tri(d1 - b1 + d2 - b2, b1 + b2)] += x * o.c[tri(d2 - b2, b2)];
                    }
                }
            }
        }
        Self { order: self.order, valid: self.valid.min(o.valid), center: self.center, c }
    }
    fn scale(&self, s: Complex64) -> Self {
        Self { c: self.c.iter().map(|a| a * s).collect(), ..self.clone() }
    }
    fn conj(&self) -> Self {
        Self { c: self.c.iter().map(|a| a.conj()).collect(), ..self.clone() }
    }
    fn d_dz(&self) -> Result<Self> {
        Ok(self.d_dx().add(&self.d_dy().scale(-Complex64::i())).scale(Complex64::from(0.5)))
    }
    fn d_dzbar(&self) -> Result<Self> {
        Ok(self.d_dx().add(&self.d_dy().scale(Complex64::i())).scale(Complex64::from(0.5)))
    }
    fn recip(&self) -> Result<Self> {
        if self.value().norm() == 0.0 {
            return Err(Error::NotInvertible);
        }
        Ok(self.powf(-1.0))
    }
    fn max_abs(&self) -> f64 {
        if self.valid < 0 {
            return f64::NAN;
        }
        let mut m: f64 = 0.0;
        for d in 0..=(self.valid as usize).min(self.order) {
            for b in 0..=d {
                m = m.max(self.c[tri(d - b, b)].norm());
            }
        }
        m
    }
}

/// Coefficient spaces that can sample the coordinate functions and the
/// elementary functions used by the example fields.
pub trait Sample: Coefficient {
    fn coord_x(&self) -> Self;
    fn coord_y(&self) -> Self;
    fn exp_of(&self) -> Self;
    fn sin_of(&self) -> Self;
    fn cos_of(&self) -> Self;

    fn coord_z(&self) -> Self {
        self.coord_x().add(&self.coord_y().scale(Complex64::i()))
    }
}

impl Sample for Jet {
    fn coord_x(&self) -> Self {
        Jet::var_x(self.order, self.center.0).at(self.center)
    }
    fn coord_y(&self) -> Self {
        Jet::var_y(self.order, self.center.1).at(self.center)
    }
    fn exp_of(&self) -> Self {
        self.exp()
    }
    fn sin_of(&self) -> Self {
        self.sin()
    }
    fn cos_of(&self) -> Self {
        self.cos()
    }
}

impl Sample for GridMap<Complex64> {
    fn coord_x(&self) -> Self {
        self.map_indexed(|i, j, _| Complex64::from(self.domain.point(i, j).0))
    }
    fn coord_y(&self) -> Self {
        self.map_indexed(|i, j, _| Complex64::from(self.domain.point(i, j).1))
    }
    fn exp_of(&self) -> Self {
        self.map(|v| v.exp())
    }
    fn sin_of(&self) -> Self {
        self.map(|v| v.sin())
    }
    fn cos_of(&self) -> Self {
        self.map(|v| v.cos())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_derivatives_of_products() {
        let x = Jet::var_x(6, 0.3);
        let y = Jet::var_y(6, -0.2);
        let f = x.mul(&x).mul(&y).add(&y.sin());
        // ∂x(x² y) = 2xy, ∂y(x² y + sin y) = x² + cos y
        assert!((f.d_dx().value() - Complex64::from(2.0 * 0.3 * -0.2)).norm() < 1e-15);
        assert!((f.d_dy().value() - Complex64::from(0.09 + (-0.2f64).cos())).norm() < 1e-15);
        assert_eq!(f.d_dx().valid, 5);
    }

    #[test]
    fn exp_of_z_is_holomorphic() {
        let z = Jet::var_z(8, 0.4, 0.7);
        let e = z.exp();
        assert!(e.d_dzbar().unwrap().max_abs() < 1e-14);
        assert!(e.d_dz().unwrap().max_diff(&e) < 1e-13);
        let r = e.recip().unwrap().mul(&e);
        assert!(r.max_diff(&Jet::constant_of(8, Complex64::from(1.0))) < 1e-11);
    }

    #[test]
    fn trig_identity() {
        let x = Jet::var_x(8, 1.1).add(&Jet::var_y(8, 0.0).scale(Complex64::from(0.5)));
        let one = x.cos().mul(&x.cos()).add(&x.sin().mul(&x.sin()));
        assert!(one.max_diff(&Jet::constant_of(8, Complex64::from(1.0))) < 1e-14);
        let s = x.mul(&x).add(&Jet::constant_of(8, Complex64::from(1.0)));
        let sq = s.powf(0.5);
        assert!(sq.mul(&sq).max_diff(&s) < 1e-13);
    }
}
