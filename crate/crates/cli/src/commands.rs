//! Subcommand implementations. Each writes its artifacts and returns a short
//! summary for the manifest.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use orbitlim::boundary::{ps_estimate, BoundaryMeasure, PsMode};
use orbitlim::limits::{
    by_name, compare_limit, empirical_avg, empirical_avg_annuli, fit_mass_constant, marginal_a_distribution,
    sector_sum, ComparisonReport, LimitSpec, Quadrature, RadialDomain, TestFunction,
};
use orbitlim::orbits::{
    enumerate, estimate_from_orbit, partition_annuli, t_radius, EnumerationOptions, ExponentEstimate, GroupKind,
    GroupSpec, OrbitSet,
};
use orbitlim::trig::{holder_rate_fit, RateOptions};
use orbitlim::{build_rep, RepSpace};

use crate::config::{DomainChoice, ExperimentConfig, MeasureChoice};
use crate::output::{fmt_f64, Artifacts};
use crate::Failure;

pub struct Context<'a> {
    pub cfg: &'a ExperimentConfig,
    pub budget: usize,
    pub out: &'a mut Artifacts,
}

struct Setup {
    spec: GroupSpec,
    rep: RepSpace,
    orbit: OrbitSet,
}

impl Context<'_> {
    fn setup(&self, big_t: f64) -> Result<Setup, Failure> {
        let spec = self.cfg.group_spec()?;
        let rep = build_rep(&self.cfg.rep.weights).map_err(|e| Failure::config(e.to_string()))?;
        let orbit = enumerate(&spec, &rep, big_t, &EnumerationOptions { budget: self.budget })?;
        Ok(Setup { spec, rep, orbit })
    }

    fn top(&self) -> Result<f64, Failure> {
        Ok(*self.cfg.ladder()?.last().expect("nonempty"))
    }

    fn quadrature(&self) -> Quadrature {
        Quadrature {
            radial_nodes: self.cfg.quadrature.radial_nodes,
        }
    }

    fn exponent_estimate(&self, orbit: &OrbitSet) -> Result<ExponentEstimate, Failure> {
        let e = &self.cfg.exponent;
        let t_max = e.t_max.unwrap_or(orbit.t_cut);
        let t_min = e.t_min.unwrap_or((t_max / 64.0).max(1.0));
        Ok(estimate_from_orbit(orbit, e.method, t_min, t_max)?)
    }

    /// Override, then δ = 1 for lattices, then the estimate.
    fn delta(&self, s: &Setup) -> Result<f64, Failure> {
        if let Some(d) = self.cfg.delta_override {
            return Ok(d);
        }
        if s.spec.kind == GroupKind::ArithmeticLattice {
            return Ok(1.0);
        }
        Ok(self.exponent_estimate(&s.orbit)?.delta_hat)
    }

    fn test_function(&self, name: &str, rep: &RepSpace) -> Result<TestFunction, Failure> {
        by_name(name, rep.dim).ok_or_else(|| Failure::config(format!("unknown test function {name:?}")))
    }
}

fn c(z: Complex64) -> [String; 2] {
    [fmt_f64(z.re), fmt_f64(z.im)]
}

pub fn enumerate_cmd(ctx: &mut Context) -> Result<Value, Failure> {
    let s = ctx.setup(ctx.top()?)?;
    let k = s.rep.k;
    let rows = s.orbit.elements.iter().map(|p| {
        let m = p.elem.mat;
        vec![
            p.elem.word().to_string(),
            fmt_f64(m.a),
            fmt_f64(m.b),
            fmt_f64(m.c),
            fmt_f64(m.d),
            fmt_f64(p.coords.theta1),
            fmt_f64(p.coords.t),
            fmt_f64(p.coords.theta2),
            fmt_f64(p.norm(k)),
        ]
    });
    ctx.out.csv("orbit.csv", &["word", "a", "b", "c", "d", "theta1", "t", "theta2", "norm"], rows)?;

    // products of two elements in the half-radius ball stay inside the ball
    let half = t_radius(s.orbit.t_cut, k) / 2.0;
    let small = s.orbit.elements.partition_point(|p| p.coords.t <= half);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
    let pairs: Vec<(usize, usize)> = if small == 0 {
        Vec::new()
    } else {
        (0..ctx.cfg.enumerate.closure_samples)
            .map(|_| (rng.random_range(0..small), rng.random_range(0..small)))
            .collect()
    };
    let closure = s.orbit.closure_check(&pairs);
    let summary = json!({
        "count": s.orbit.len(),
        "T": s.orbit.t_cut,
        "k": k,
        "kind": s.orbit.kind,
        "contains_minus_one": s.orbit.contains_minus_one,
        "dedup_count": s.orbit.dedup_count,
        "certificate_min_gap": s.spec.certificate.as_ref().map(|c| c.min_gap),
        "closure": closure,
    });
    ctx.out.json("enumerate.json", &summary)?;
    if !closure.missing.is_empty() {
        return Err(Failure::other(format!("closure spot-check found {} missing products", closure.missing.len())));
    }
    Ok(summary)
}

pub fn exponent_cmd(ctx: &mut Context) -> Result<Value, Failure> {
    let top = ctx.cfg.exponent.t_max.unwrap_or(ctx.top()?);
    let s = ctx.setup(top)?;
    let mut est = ctx.exponent_estimate(&s.orbit)?;
    if s.spec.kind != GroupKind::ArithmeticLattice && s.spec.rank() == 1 {
        est.warnings.push("cyclic group: not a valid instance, δ > 1/2 fails".into());
    }
    ctx.out.json("exponent.json", &est)?;
    Ok(json!({ "delta_hat": est.delta_hat, "stderr": est.stderr }))
}

fn fourier_rows(mu: &BoundaryMeasure, n_max: i64) -> Vec<Vec<String>> {
    (-n_max..=n_max)
        .map(|n| {
            let [re, im] = c(mu.fourier_coeff(n));
            vec![n.to_string(), re, im]
        })
        .collect()
}

pub fn ps_cmd(ctx: &mut Context) -> Result<Value, Failure> {
    let s = ctx.setup(ctx.top()?)?;
    let delta = ctx.delta(&s)?;
    let p = &ctx.cfg.ps;
    let exponent = p.s.unwrap_or(delta + p.s_offset);
    let mu = ps_estimate(&s.orbit, exponent, p.mode, Some(delta))?;
    ctx.out.csv(
        "measure.csv",
        &["theta", "weight"],
        mu.base_atoms().iter().map(|&(t, w)| vec![fmt_f64(t), fmt_f64(w)]),
    )?;
    ctx.out.csv("fourier.csv", &["n", "re", "im"], fourier_rows(&mu, p.fourier_max))?;
    let summary = json!({
        "s": exponent,
        "delta": delta,
        "mode": p.mode,
        "atoms": mu.base_atoms().len(),
        "total_mass": mu.total_mass,
        "degenerate": mu.degenerate,
        "divergence_warning": mu.divergence_warning,
    });
    ctx.out.json("ps.json", &summary)?;
    Ok(summary)
}

/// Boundary measure for the limit integral, binned to keep the atom count
/// bounded.
fn limit_measure(ctx: &Context, s: &Setup, delta: f64) -> Result<BoundaryMeasure, Failure> {
    let choice = ctx.cfg.compare.measure.unwrap_or(if s.spec.kind == GroupKind::ArithmeticLattice {
        MeasureChoice::Lebesgue
    } else {
        MeasureChoice::PattersonLimit
    });
    let bins = ctx.cfg.quadrature.boundary_bins.max(1);
    let (mode, exponent) = match choice {
        MeasureChoice::Lebesgue => return Ok(BoundaryMeasure::lebesgue(bins)),
        MeasureChoice::PattersonLimit => (PsMode::PattersonLimit, ctx.cfg.ps.s.unwrap_or(delta + ctx.cfg.ps.s_offset)),
        MeasureChoice::EmpiricalAngular => (PsMode::EmpiricalAngular, delta),
    };
    let mu = ps_estimate(&s.orbit, exponent, mode, Some(delta))?;
    let atoms: Vec<(f64, f64)> = mu.histogram(bins).into_iter().filter(|a| a.1 > 0.0).collect();
    Ok(BoundaryMeasure::from_atoms(atoms, mu.provenance)?.normalize()?)
}

fn report_rows(r: &ComparisonReport) -> Vec<Vec<String>> {
    r.t_ladder
        .iter()
        .zip(&r.empirical)
        .zip(&r.rel_error)
        .map(|((t, e), err)| {
            let [er, ei] = c(*e);
            let [lr, li] = c(r.limit);
            vec![fmt_f64(*t), er, ei, lr, li, fmt_f64(*err)]
        })
        .collect()
}

const REPORT_HEADER: [&str; 6] = ["T", "empirical_re", "empirical_im", "limit_re", "limit_im", "rel_error"];

pub fn compare_cmd(ctx: &mut Context) -> Result<Value, Failure> {
    let ladder = ctx.cfg.ladder()?.to_vec();
    let cc = &ctx.cfg.compare;
    let f0 = ctx.test_function(&cc.test_function, &build_rep(&ctx.cfg.rep.weights).map_err(|e| Failure::config(e.to_string()))?)?;
    let domain = match cc.radial_domain {
        DomainChoice::Normalized => RadialDomain::Normalized,
        DomainChoice::Compact => RadialDomain::Compact,
    };
    // the compact domain sums over the ball of the support radius
    let reach = if domain == RadialDomain::Compact {
        f0.support_radius
            .ok_or_else(|| Failure::config(format!("{} has unbounded support", f0.name)))?
            .max(1.0)
    } else {
        1.0
    };
    let s = ctx.setup(ctx.top()? * reach)?;
    let delta = ctx.delta(&s)?;
    let spec = LimitSpec {
        mu: limit_measure(ctx, &s, delta)?,
        delta,
        rep: s.rep.clone(),
        mass_constant: fit_mass_constant(&s.orbit, delta),
        radial_domain: domain,
    };
    let report = compare_limit(&s.orbit, &spec, &f0, &ladder, cc.self_normalized, &ctx.quadrature())?;
    ctx.out.json("compare.json", &report)?;
    ctx.out.csv("compare.csv", &REPORT_HEADER, report_rows(&report))?;
    Ok(json!({ "rel_error": report.rel_error, "limit": report.limit }))
}

pub fn marginal_cmd(ctx: &mut Context) -> Result<Value, Failure> {
    let ladder = ctx.cfg.ladder()?.to_vec();
    let s = ctx.setup(ctx.top()?)?;
    let delta = ctx.delta(&s)?;
    let mu = limit_measure(ctx, &s, delta)?;
    let power = ctx.cfg.marginal.power;
    let report = marginal_a_distribution(&s.orbit, &ladder, |r| r.powi(power), &mu, delta, &ctx.quadrature())?;
    ctx.out.json("marginal.json", &report)?;
    ctx.out.csv("marginal.csv", &REPORT_HEADER, report_rows(&report))?;
    Ok(json!({ "empirical": report.empirical, "limit": report.limit }))
}

pub fn sectors_cmd(ctx: &mut Context) -> Result<Value, Failure> {
    let ladder = ctx.cfg.ladder()?.to_vec();
    let s = ctx.setup(ctx.top()?)?;
    let k = s.rep.k as f64;
    let sc = &ctx.cfg.sectors;
    let mut rows = Vec::new();
    for &big_t in &ladder {
        // ladder values are norm cutoffs ‖ρ(γ)‖ ≤ T, i.e. |γ| ≤ T^{1/k}
        let g = big_t.powf(1.0 / k);
        for n in -sc.n_max..=sc.n_max {
            for m in -sc.m_max..=sc.m_max {
                let [re, im] = c(sector_sum(&s.orbit, n, m, g)?);
                rows.push(vec![n.to_string(), m.to_string(), fmt_f64(big_t), re, im]);
            }
        }
    }
    let count = rows.len();
    ctx.out.csv("sectors.csv", &["n", "m", "T", "re", "im"], rows)?;
    Ok(json!({ "rows": count }))
}

pub fn fejer_cmd(ctx: &mut Context) -> Result<Value, Failure> {
    let fc = &ctx.cfg.fejer;
    let psi = fc.psi;
    let opts = RateOptions {
        base_grid: fc.base_grid,
        refine: fc.refine,
        method: fc.method,
    };
    let fit = holder_rate_fit(
        |a, b| psi.eval(a, b),
        fc.alpha.unwrap_or(psi.alpha()),
        fc.holder_constant.unwrap_or(psi.holder_constant()),
        &fc.r_ladder,
        &opts,
    )?;
    let rows = fit
        .r_ladder
        .iter()
        .zip(&fit.sup_errors)
        .zip(&fit.bounds)
        .map(|((r, e), b)| vec![r.to_string(), fmt_f64(*e), fmt_f64(*b)]);
    ctx.out.csv("fejer.csv", &["R", "sup_error", "bound"], rows)?;
    ctx.out.json("fejer.json", &fit)?;
    Ok(json!({ "slope": fit.slope, "slope_stderr": fit.slope_stderr }))
}

#[derive(Serialize)]
struct AnnuliSummary {
    n: usize,
    #[serde(rename = "T")]
    big_t: f64,
    delta: f64,
    test_function: String,
    direct: Complex64,
    partitioned: Complex64,
    bit_equal: bool,
    count: usize,
    cell_total: usize,
}

pub fn annuli_cmd(ctx: &mut Context) -> Result<Value, Failure> {
    let s = ctx.setup(ctx.top()?)?;
    let delta = ctx.delta(&s)?;
    let name = ctx.cfg.annuli.test_function.clone().unwrap_or_else(|| ctx.cfg.compare.test_function.clone());
    let f = ctx.test_function(&name, &s.rep)?;
    let part = partition_annuli(&s.orbit, ctx.cfg.annuli.n, delta)?;
    let big_t = part.big_t;
    let direct = empirical_avg(&s.orbit, &s.rep, &f, big_t, true, delta)?;
    let (total, cells) = empirical_avg_annuli(&s.orbit, &s.rep, &f, &part, delta)?;
    let sizes = part.sizes();
    let nf = part.n as f64;
    let rows = (0..part.n).map(|j| {
        let [re, im] = c(cells[j]);
        vec![
            j.to_string(),
            fmt_f64(j as f64 * big_t / nf),
            fmt_f64((j + 1) as f64 * big_t / nf),
            sizes[j].to_string(),
            fmt_f64(part.m_values[j]),
            re,
            im,
        ]
    });
    ctx.out.csv("annuli.csv", &["j", "lower", "upper", "size", "m_value", "partial_re", "partial_im"], rows)?;
    let summary = AnnuliSummary {
        n: part.n,
        big_t,
        delta,
        test_function: f.name.clone(),
        direct,
        partitioned: total,
        bit_equal: direct.re.to_bits() == total.re.to_bits() && direct.im.to_bits() == total.im.to_bits(),
        count: s.orbit.len(),
        cell_total: sizes.iter().sum(),
    };
    ctx.out.json("annuli.json", &summary)?;
    serde_json::to_value(&summary).map_err(|e| Failure::other(e.to_string()))
}
