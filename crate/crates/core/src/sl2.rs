//! 2×2 matrices in SL(2,ℝ), the upper half-plane and Cartan coordinates.
//!
//! Conventions: `k_θ = [[cos θ, sin θ], [−sin θ, cos θ]]` and
//! `a_t = diag(e^{t/2}, e^{−t/2})`, so that `d(o, a_t·o) = t` for `o = i`.

use std::f64::consts::{PI, TAU};
use std::ops::{Mul, Neg};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::GaussLegendre;

pub const DET_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub const fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0)
    }

    /// Rotation `k_θ`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, s, -s, c)
    }

    /// Diagonal element `a_t`.
    pub fn diagonal(t: f64) -> Self {
        let e = (0.5 * t).exp();
        Self::new(e, 0.0, 0.0, 1.0 / e)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn is_sl2(&self) -> bool {
        (self.det() - 1.0).abs() <= DET_TOL
    }

    /// Checked constructor: finite entries with unit determinant.
    pub fn sl2(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let m = Self::new(a, b, c, d);
        if ![a, b, c, d].iter().all(|x| x.is_finite()) {
            return Err(Error::Argument(format!("non-finite matrix entries {m:?}")));
        }
        if !m.is_sl2() {
            return Err(Error::Argument(format!(
                "matrix {m:?} has determinant {} (expected 1)",
                m.det()
            )));
        }
        Ok(m)
    }

    /// Inverse assuming unit determinant.
    pub fn inverse(&self) -> Self {
        Self::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a, self.c, self.b, self.d)
    }

    /// Sum of squared entries, equal to `2 cosh t`.
    pub fn frobenius_sq(&self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    /// Largest singular value `|g| = e^{t/2}`.
    pub fn op_norm(&self) -> f64 {
        kak_decompose(self).gamma_abs()
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
            .max((self.d - other.d).abs())
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2::new(-self.a, -self.b, -self.c, -self.d)
    }
}

/// Integer matrix with determinant one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntMat2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IntMat2 {
    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self { a, b, c, d }
    }

    pub const fn identity() -> Self {
        Self::new(1, 0, 0, 1)
    }

    pub fn det(&self) -> i128 {
        self.a as i128 * self.d as i128 - self.b as i128 * self.c as i128
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn to_f64(&self) -> Mat2 {
        Mat2::new(self.a as f64, self.b as f64, self.c as f64, self.d as f64)
    }

    pub fn frobenius_sq(&self) -> i128 {
        [self.a, self.b, self.c, self.d]
            .iter()
            .map(|&x| x as i128 * x as i128)
            .sum()
    }
}

impl Mul for IntMat2 {
    type Output = IntMat2;
    fn mul(self, o: IntMat2) -> IntMat2 {
        IntMat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl Neg for IntMat2 {
    type Output = IntMat2;
    fn neg(self) -> IntMat2 {
        IntMat2::new(-self.a, -self.b, -self.c, -self.d)
    }
}

/// Point of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
}

impl HPoint {
    /// The base point `o = i`.
    pub const ORIGIN: HPoint = HPoint { x: 0.0, y: 1.0 };

    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && y > 0.0) {
            return Err(Error::Argument(format!("({x}, {y}) is not in the upper half-plane")));
        }
        Ok(Self { x, y })
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    /// Disc model coordinate `(z − i)/(z + i)`.
    pub fn to_disc(&self) -> DiscPoint {
        let z = self.as_complex();
        let i = Complex64::i();
        DiscPoint((z - i) / (z + i))
    }
}

/// Point of the open unit disc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscPoint(pub Complex64);

impl DiscPoint {
    pub fn new(w: Complex64) -> Result<Self> {
        if !(w.norm() < 1.0) {
            return Err(Error::Argument(format!("{w} is not in the unit disc")));
        }
        Ok(Self(w))
    }

    pub fn to_half_plane(&self) -> HPoint {
        let w = self.0;
        let z = Complex64::i() * (Complex64::new(1.0, 0.0) + w) / (Complex64::new(1.0, 0.0) - w);
        HPoint { x: z.re, y: z.im }
    }
}

pub fn mobius_act(g: &Mat2, z: &HPoint) -> Result<HPoint> {
    if !g.is_sl2() {
        return Err(Error::Argument(format!("det {} is not 1", g.det())));
    }
    let zc = z.as_complex();
    let den = g.c * zc + g.d;
    if den.norm() < 1e-300 {
        return Err(Error::NumericDomain("degenerate Möbius denominator".into()));
    }
    let w = (g.a * zc + g.b) / den;
    // Im(gz) = y/|cz+d|² avoids cancellation in the quotient
    let y = z.y / den.norm_sqr();
    HPoint::new(w.re, y).map_err(|_| Error::NumericDomain("image left the half-plane".into()))
}

pub fn hyp_dist(z: &HPoint, w: &HPoint) -> f64 {
    let dz = (z.as_complex() - w.as_complex()).norm();
    2.0 * (dz / (2.0 * (z.y * w.y).sqrt())).asinh()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CartanCoords {
    pub theta1: f64,
    pub t: f64,
    pub theta2: f64,
}

impl CartanCoords {
    pub fn new(theta1: f64, t: f64, theta2: f64) -> Self {
        Self { theta1, t, theta2 }
    }

    /// Disc-model radius of `g·o`.
    pub fn r(&self) -> f64 {
        (0.5 * self.t).tanh()
    }

    pub fn gamma_abs(&self) -> f64 {
        (0.5 * self.t).exp()
    }
}

/// Below this value of `sinh(t/2)` the element is treated as a rotation.
const ROTATION_EPS: f64 = 1e-13;

/// Cartan coordinates of `g = k_{θ₁} a_t k_{θ₂}`, with `θ₁ ∈ [0, π)` for
/// `t > 0` and `(θ, 0, 0)` for a rotation `k_θ`.
pub fn kak_decompose(g: &Mat2) -> CartanCoords {
    // closed-form 2×2 SVD: g = R(φ)·diag(σ₁,σ₂)·R(ψ) with R(x) = k_{−x}
    let e = 0.5 * (g.a + g.d);
    let f = 0.5 * (g.a - g.d);
    let gg = 0.5 * (g.c + g.b);
    let h = 0.5 * (g.c - g.b);
    let r = f.hypot(gg);
    let a2 = h.atan2(e);
    if r < ROTATION_EPS {
        return CartanCoords::new(wrap_tau(-a2), 0.0, 0.0);
    }
    let t = 2.0 * r.asinh();
    let a1 = gg.atan2(f);
    let mut theta1 = wrap_tau(-0.5 * (a2 + a1));
    let mut theta2 = -0.5 * (a2 - a1);
    if theta1 >= PI {
        theta1 -= PI;
        theta2 += PI;
    }
    CartanCoords::new(theta1, t, wrap_tau(theta2))
}

pub fn kak_compose(c: &CartanCoords) -> Mat2 {
    Mat2::rotation(c.theta1) * Mat2::diagonal(c.t) * Mat2::rotation(c.theta2)
}

pub(crate) fn wrap_tau(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y >= TAU {
        0.0
    } else {
        y
    }
}

/// Quadrature resolution for [`haar_integrate`].
#[derive(Clone, Copy, Debug)]
pub struct HaarGrid {
    /// Equispaced nodes per angle (periodic trapezoid rule).
    pub n_theta: usize,
    /// Gauss–Legendre nodes in `t`.
    pub n_t: usize,
}

impl Default for HaarGrid {
    fn default() -> Self {
        Self { n_theta: 64, n_t: 64 }
    }
}

/// `∫ f(k_{θ₁} a_t k_{θ₂}) sinh t dθ₁ dt dθ₂` over `[0,2π]×[0,t_max]×[0,2π]`.
pub fn haar_integrate<F>(f: F, t_max: f64, grid: HaarGrid) -> Result<f64>
where
    F: Fn(&CartanCoords) -> f64,
{
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::Argument(format!("t_max must be positive, got {t_max}")));
    }
    if grid.n_theta == 0 || grid.n_t == 0 {
        return Err(Error::Argument("empty quadrature grid".into()));
    }
    let rule = GaussLegendre::new(grid.n_t);
    let dth = TAU / grid.n_theta as f64;
    let mut total = 0.0;
    for (t, wt) in rule.on_interval(0.0, t_max) {
        let wt = wt * t.sinh();
        for i in 0..grid.n_theta {
            for j in 0..grid.n_theta {
                let c = CartanCoords::new(i as f64 * dth, t, j as f64 * dth);
                total += wt * f(&c);
            }
        }
    }
    Ok(total * dth * dth)
}
