//! The explicit limit integral over `K × [0, R] × K` and the constant `V_Γ`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::TestFunction;
use crate::boundary::BoundaryMeasure;
use crate::error::{Error, Result};
use crate::numeric::{ComplexSum, GaussLegendre};
use crate::rep::{EndV, RepSpace};
use crate::sl2::Mat2;

/// `V_Γ = 2√π Γ(δ − ½)/Γ(δ + 1)`.
pub fn v_gamma(delta: f64) -> Result<f64> {
    if !(delta.is_finite() && delta >= 0.5 + 1e-6) {
        return Err(Error::NumericDomain(format!(
            "V_Γ has a pole at δ = 1/2; got δ = {delta}"
        )));
    }
    Ok(2.0 * std::f64::consts::PI.sqrt() * gamma(delta - 0.5) / gamma(delta + 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "radius")]
pub enum RadialDomain {
    /// `t ∈ [0, 1]`, the normalized limit.
    Normalized,
    /// `t ∈ [0, R]` with `R` the test function's support radius.
    Compact,
}

#[derive(Clone, Debug)]
pub struct LimitSpec {
    pub mu: BoundaryMeasure,
    pub delta: f64,
    pub rep: RepSpace,
    pub mass_constant: f64,
    pub radial_domain: RadialDomain,
}

impl LimitSpec {
    pub fn exponent(&self) -> f64 {
        2.0 * self.delta / self.rep.k as f64
    }

    fn validate(&self) -> Result<()> {
        if self.rep.k == 0 {
            return Err(Error::NumericDomain("limit integral needs k ≥ 1".into()));
        }
        if !(self.delta > 0.5 && self.delta <= 1.0) {
            return Err(Error::NumericDomain(format!(
                "limit integral needs δ ∈ (1/2, 1], got {}",
                self.delta
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    /// Gauss–Legendre nodes in `u = t^{2δ/k}`.
    pub radial_nodes: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self { radial_nodes: 256 }
    }
}

/// `(δ/2k)·c·Σ_{θ₁,θ₂} w₁w₂ ∫₀^R f(ρ(k_{θ₁})·t P_k·ρ(k_{θ₂})) t^{2δ/k−1} dt`
/// with atoms of the lifted measure in both angle slots. The radial integral
/// is taken in `u = t^{2δ/k}`, where the weight becomes `du/(2δ/k)`.
pub fn limit_integral(spec: &LimitSpec, f: &TestFunction, quad: &Quadrature) -> Result<Complex64> {
    spec.validate()?;
    let e = spec.exponent();
    let radius = match spec.radial_domain {
        RadialDomain::Normalized => 1.0,
        RadialDomain::Compact => f.support_radius.ok_or_else(|| {
            Error::Argument(format!("{} has unbounded support", f.name))
        })?,
    };
    let rule = GaussLegendre::new(quad.radial_nodes.max(1));
    let nodes: Vec<(f64, f64)> = rule
        .on_interval(0.0, radius.powf(e))
        .into_iter()
        .map(|(u, w)| (u.powf(1.0 / e), w / e))
        .collect();
    let atoms = spec.mu.lifted_atoms();
    let rep = &spec.rep;
    let left: Vec<EndV> = atoms
        .iter()
        .map(|&(th, _)| rep.apply(&Mat2::rotation(th)) * &rep.p_k)
        .collect();
    let right: Vec<EndV> = atoms.iter().map(|&(th, _)| rep.apply(&Mat2::rotation(th))).collect();
    let partial: Vec<std::result::Result<ComplexSum, String>> = (0..atoms.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = ComplexSum::new();
            let mut scaled = EndV::zeros(rep.dim, rep.dim);
            for (j, r) in right.iter().enumerate() {
                let x = &left[i] * r;
                let w = atoms[i].1 * atoms[j].1;
                for &(t, wt) in &nodes {
                    scaled.zip_apply(&x, |s, v| *s = v * t);
                    let v = f.eval(&scaled);
                    if !(v.re.is_finite() && v.im.is_finite()) {
                        return Err(format!("{} is not finite at t = {t}", f.name));
                    }
                    acc.add(v * (w * wt));
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = ComplexSum::new();
    for p in partial {
        total.merge(&p.map_err(Error::Quadrature)?);
    }
    let k = rep.k as f64;
    Ok(total.value() * (spec.delta / (2.0 * k) * spec.mass_constant))
}

/// `(limit on the scaled set, scale^{2δ/k} × limit on the set)`, both on the
/// compact radial domain of the respective support.
pub fn homogeneity_check(spec: &LimitSpec, set: &TestFunction, scale: f64, quad: &Quadrature) -> Result<(f64, f64)> {
    if !(scale > 0.0) {
        return Err(Error::Argument("scale must be positive".into()));
    }
    let mut compact = spec.clone();
    compact.radial_domain = RadialDomain::Compact;
    let scaled = limit_integral(&compact, &set.scaled(scale), quad)?;
    let base = limit_integral(&compact, set, quad)?;
    Ok((scaled.re, scale.powf(spec.exponent()) * base.re))
}
