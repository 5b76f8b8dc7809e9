//! Critical exponent estimates from orbit counts.

use serde::{Deserialize, Serialize};

use super::{enumerate, t_radius, EnumerationOptions, GroupKind, GroupSpec, OrbitSet};
use crate::error::{Error, Result};
use crate::numeric::linear_fit;
use crate::rep::RepSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentMethod {
    /// Slope of `log N(T)` against `log T` over a dyadic ladder.
    GrowthFit,
    /// Zero of the shell-growth slope of the truncated Poincaré series.
    PoincareAbscissa,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentEstimate {
    /// Clamped into `(0, 1]`.
    pub delta_hat: f64,
    /// Unclamped fitted value.
    pub raw: f64,
    pub stderr: f64,
    pub method: ExponentMethod,
    pub data_range: [f64; 2],
    pub warnings: Vec<String>,
}

const SHELLS: usize = 16;

/// Estimate δ from an already enumerated orbit using norms in `[t_min, t_max]`.
pub fn estimate_from_orbit(
    orbit: &OrbitSet,
    method: ExponentMethod,
    t_min: f64,
    t_max: f64,
) -> Result<ExponentEstimate> {
    if !(t_min >= 1.0 && t_max >= 4.0 * t_min) {
        return Err(Error::Estimation(format!(
            "data range [{t_min}, {t_max}] must satisfy 1 ≤ T_min and T_max ≥ 4·T_min"
        )));
    }
    if t_max > orbit.t_cut * (1.0 + super::NORM_SLACK) {
        return Err(Error::Coverage {
            required: t_max,
            available: orbit.t_cut,
        });
    }
    let k = orbit.rep_k as f64;
    let (raw, stderr) = match method {
        ExponentMethod::GrowthFit => growth_fit(orbit, t_min, t_max)?,
        ExponentMethod::PoincareAbscissa => poincare_abscissa(orbit, t_min, t_max)?,
    };
    let raw = match method {
        ExponentMethod::GrowthFit => raw * k / 2.0,
        ExponentMethod::PoincareAbscissa => raw,
    };
    let stderr = match method {
        ExponentMethod::GrowthFit => stderr * k / 2.0,
        ExponentMethod::PoincareAbscissa => stderr,
    };
    let delta_hat = raw.clamp(1e-9, 1.0);
    let mut warnings = Vec::new();
    if delta_hat <= 0.5 {
        warnings.push(format!(
            "estimated exponent {delta_hat:.4} is at most 1/2; the limit theorems require δ > 1/2"
        ));
    }
    Ok(ExponentEstimate {
        delta_hat,
        raw,
        stderr,
        method,
        data_range: [t_min, t_max],
        warnings,
    })
}

fn growth_fit(orbit: &OrbitSet, t_min: f64, t_max: f64) -> Result<(f64, f64)> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut big_t = t_min;
    while big_t <= t_max * (1.0 + 1e-12) {
        let n = orbit.count_within(big_t)?;
        if n > 0 {
            xs.push(big_t.ln());
            ys.push((n as f64).ln());
        }
        big_t *= 2.0;
    }
    if xs.len() < 3 {
        return Err(Error::Estimation(format!(
            "growth fit needs at least 3 nonempty dyadic points, have {}",
            xs.len()
        )));
    }
    let fit = linear_fit(&xs, &ys).ok_or_else(|| Error::Estimation("degenerate fit".into()))?;
    Ok((fit.slope, fit.slope_stderr))
}

fn poincare_abscissa(orbit: &OrbitSet, t_min: f64, t_max: f64) -> Result<(f64, f64)> {
    let k = orbit.rep_k;
    let lo = t_radius(t_min, k);
    let hi = t_radius(t_max, k);
    let width = (hi - lo) / SHELLS as f64;
    let mut shells: Vec<Vec<f64>> = vec![Vec::new(); SHELLS];
    for p in orbit.ball(t_max)? {
        let t = p.coords.t;
        if t <= lo {
            continue;
        }
        let j = (((t - lo) / width) as usize).min(SHELLS - 1);
        shells[j].push(t);
    }
    let mids: Vec<f64> = (0..SHELLS).map(|j| lo + (j as f64 + 0.5) * width).collect();
    let filled: Vec<usize> = (0..SHELLS).filter(|&j| !shells[j].is_empty()).collect();
    if filled.len() < 3 {
        return Err(Error::Estimation("fewer than 3 nonempty shells".into()));
    }
    // slope of log Σ_shell e^{−s t} against t; zero at the abscissa
    let slope = |s: f64| {
        let xs: Vec<f64> = filled.iter().map(|&j| mids[j]).collect();
        let ys: Vec<f64> = filled
            .iter()
            .map(|&j| {
                let m = mids[j];
                shells[j].iter().map(|t| (-s * (t - m)).exp()).sum::<f64>().ln() - s * m
            })
            .collect();
        linear_fit(&xs, &ys).expect("distinct shell midpoints")
    };
    let (mut a, mut b) = (-1.0, 3.0);
    if slope(a).slope < 0.0 || slope(b).slope > 0.0 {
        return Err(Error::Estimation("shell growth slope has no zero in [-1, 3]".into()));
    }
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if slope(m).slope > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let s = 0.5 * (a + b);
    Ok((s, slope(s).slope_stderr))
}

/// Enumerate up to `t_max` and estimate the exponent.
pub fn estimate_exponent(
    spec: &GroupSpec,
    rep: &RepSpace,
    method: ExponentMethod,
    t_min: f64,
    t_max: f64,
    opts: &EnumerationOptions,
) -> Result<ExponentEstimate> {
    let orbit = enumerate(spec, rep, t_max, opts)?;
    let mut est = estimate_from_orbit(&orbit, method, t_min, t_max)?;
    if spec.kind != GroupKind::ArithmeticLattice && spec.rank() == 1 {
        est.warnings
            .push("cyclic group: elementary, not a valid instance for the limit theorems".into());
    }
    Ok(est)
}
