//! Test functions on End(V).

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::rep::{op_norm, EndV, RepSpace};

pub type Evaluator = Arc<dyn Fn(&EndV) -> Complex64 + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Holder {
    pub alpha: f64,
    /// Hölder constant with respect to the operator norm.
    pub constant: f64,
}

#[derive(Clone)]
pub struct TestFunction {
    pub name: String,
    eval: Evaluator,
    /// `f(x) = 0` whenever `‖x‖ > support_radius`; `None` when unbounded.
    pub support_radius: Option<f64>,
    pub holder: Option<Holder>,
    /// `‖f‖_∞`.
    pub sup_norm: f64,
    /// `sup_{‖x‖ ≤ 1} |f(x)|`.
    pub sup_norm_unit: f64,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("support_radius", &self.support_radius)
            .field("holder", &self.holder)
            .field("sup_norm", &self.sup_norm)
            .field("sup_norm_unit", &self.sup_norm_unit)
            .finish()
    }
}

impl TestFunction {
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&EndV) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            eval: Arc::new(f),
            support_radius: None,
            holder: None,
            sup_norm: f64::INFINITY,
            sup_norm_unit: f64::INFINITY,
        }
    }

    pub fn with_support(mut self, radius: f64) -> Self {
        self.support_radius = Some(radius);
        self
    }

    pub fn with_holder(mut self, alpha: f64, constant: f64) -> Self {
        self.holder = Some(Holder { alpha, constant });
        self
    }

    pub fn with_sup_norms(mut self, sup: f64, sup_unit: f64) -> Self {
        self.sup_norm = sup;
        self.sup_norm_unit = sup_unit;
        self
    }

    pub fn eval(&self, x: &EndV) -> Complex64 {
        (self.eval)(x)
    }

    /// `x ↦ f(x / s)`, supported on the ball of radius `s·R`.
    pub fn scaled(&self, s: f64) -> TestFunction {
        let inner = self.eval.clone();
        TestFunction {
            name: format!("{}(x/{s})", self.name),
            eval: Arc::new(move |x| inner(&(x / s))),
            support_radius: self.support_radius.map(|r| r * s),
            holder: self.holder.map(|h| Holder {
                alpha: h.alpha,
                constant: h.constant * s.powf(-h.alpha),
            }),
            sup_norm: self.sup_norm,
            sup_norm_unit: f64::NAN,
        }
    }

    /// `x ↦ f(x)·1{‖x‖ ≤ radius}`.
    pub fn restricted(&self, radius: f64) -> TestFunction {
        let inner = self.eval.clone();
        TestFunction {
            name: format!("{}·1[|x|<={radius}]", self.name),
            eval: Arc::new(move |x| {
                if op_norm(x) <= radius {
                    inner(x)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
            support_radius: Some(self.support_radius.map_or(radius, |r| r.min(radius))),
            holder: None,
            sup_norm: self.sup_norm,
            sup_norm_unit: self.sup_norm_unit,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("const({c})"), move |_| Complex64::new(c, 0.0))
            .with_holder(1.0, 0.0)
            .with_sup_norms(c.abs(), c.abs())
    }

    /// Indicator of the closed operator-norm ball.
    pub fn ball_indicator(radius: f64) -> Self {
        Self::new(format!("ball({radius})"), move |x| {
            Complex64::new(if op_norm(x) <= radius { 1.0 } else { 0.0 }, 0.0)
        })
        .with_support(radius)
        .with_sup_norms(1.0, 1.0)
    }

    /// Indicator of the cone sector `{x_{ij} ≥ 0}` inside the ball.
    pub fn sector_indicator(radius: f64, i: usize, j: usize) -> Self {
        Self::new(format!("sector({radius},{i},{j})"), move |x| {
            let inside = x[(i, j)] >= 0.0 && op_norm(x) <= radius;
            Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
        })
        .with_support(radius)
        .with_sup_norms(1.0, 1.0)
    }

    /// Matrix entry `x_{ij}` (0-based).
    pub fn entry(i: usize, j: usize) -> Self {
        Self::new(format!("x[{i},{j}]"), move |x| Complex64::new(x[(i, j)], 0.0))
            .with_holder(1.0, 1.0)
            .with_sup_norms(f64::INFINITY, 1.0)
    }

    /// Product of two entries `x_{ij} x_{pq}`.
    pub fn entry_product(i: usize, j: usize, p: usize, q: usize) -> Self {
        Self::new(format!("x[{i},{j}]*x[{p},{q}]"), move |x| {
            Complex64::new(x[(i, j)] * x[(p, q)], 0.0)
        })
        .with_sup_norms(f64::INFINITY, 1.0)
    }

    /// Smooth radial bump `exp(1 − 1/(1 − (‖x‖/R)²))`.
    pub fn radial_bump(radius: f64) -> Self {
        Self::new(format!("bump({radius})"), move |x| {
            let s = op_norm(x) / radius;
            let v = if s < 1.0 { (1.0 - 1.0 / (1.0 - s * s)).exp() } else { 0.0 };
            Complex64::new(v, 0.0)
        })
        .with_support(radius)
        // max |d/ds exp(1 − 1/(1−s²))| ≈ 2.1704 at s ≈ 0.76
        .with_holder(1.0, 2.171 / radius)
        .with_sup_norms(1.0, 1.0)
    }

    /// Ball indicator with a linear ramp of the given width, Lipschitz.
    pub fn mollified_ball(radius: f64, width: f64) -> Self {
        Self::new(format!("soft_ball({radius},{width})"), move |x| {
            let r = op_norm(x);
            let v = ((radius + width - r) / width).clamp(0.0, 1.0);
            Complex64::new(v, 0.0)
        })
        .with_support(radius + width)
        .with_holder(1.0, 1.0 / width)
        .with_sup_norms(1.0, 1.0)
    }

    /// Oscillating function `e^{iω x_{ij}}` times a soft ball cutoff.
    pub fn oscillating_entry(i: usize, j: usize, omega: f64, radius: f64) -> Self {
        let cut = Self::mollified_ball(radius, 0.25 * radius);
        let cutoff = cut.eval.clone();
        Self::new(format!("exp(i{omega}x[{i},{j}])·soft_ball({radius})"), move |x| {
            cutoff(x) * Complex64::from_polar(1.0, omega * x[(i, j)])
        })
        .with_support(1.25 * radius)
        .with_holder(1.0, omega + 4.0 / radius)
        .with_sup_norms(1.0, 1.0)
    }
}

/// `x ↦ (f(x) + f(ρ(−1)x))/2`.
pub fn symmetrize(f: &TestFunction, rep: &RepSpace) -> TestFunction {
    let signs: Vec<f64> = rep.rho_minus_one().diagonal().iter().copied().collect();
    let inner = f.eval.clone();
    TestFunction {
        name: format!("sym({})", f.name),
        eval: Arc::new(move |x| {
            let mut y = x.clone();
            for (r, s) in signs.iter().enumerate() {
                if *s < 0.0 {
                    y.row_mut(r).neg_mut();
                }
            }
            (inner(x) + inner(&y)) * 0.5
        }),
        support_radius: f.support_radius,
        holder: f.holder,
        sup_norm: f.sup_norm,
        sup_norm_unit: f.sup_norm_unit,
    }
}

/// Fixed suite for convergence experiments, built for the representation
/// dimension `dim`.
pub fn builtin_suite(dim: usize) -> Vec<TestFunction> {
    let last = dim - 1;
    vec![
        TestFunction::ball_indicator(1.0),
        TestFunction::entry(0, 0).restricted(1.0),
        TestFunction::entry_product(0, 0, 0, 0).restricted(1.0),
        TestFunction::entry_product(0, last, last, 0).restricted(1.0),
        TestFunction::radial_bump(1.0),
        TestFunction::mollified_ball(0.75, 0.25),
        TestFunction::oscillating_entry(0, 0, 3.0, 0.8),
    ]
}

/// Looks up a suite member or parametrized family by name.
pub fn by_name(name: &str, dim: usize) -> Option<TestFunction> {
    let last = dim.saturating_sub(1);
    Some(match name {
        "one" => TestFunction::constant(1.0),
        "ball" => TestFunction::ball_indicator(1.0),
        "x11" => TestFunction::entry(0, 0).restricted(1.0),
        "x11_sq" => TestFunction::entry_product(0, 0, 0, 0).restricted(1.0),
        "corner" => TestFunction::entry_product(0, last, last, 0).restricted(1.0),
        "bump" => TestFunction::radial_bump(1.0),
        "soft_ball" => TestFunction::mollified_ball(0.75, 0.25),
        "oscillating" => TestFunction::oscillating_entry(0, 0, 3.0, 0.8),
        _ => return None,
    })
}
