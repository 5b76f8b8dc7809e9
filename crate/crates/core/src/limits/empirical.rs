//! Empirical sums over norm balls and their comparison with the limit
//! integral.

use num_complex::Complex64;
use serde::Serialize;

use super::{limit_integral, v_gamma, LimitSpec, Quadrature, RadialDomain, TestFunction};
use crate::boundary::BoundaryMeasure;
use crate::error::{Error, Result};
use crate::numeric::{par_sum, ComplexSum, GaussLegendre};
use crate::orbits::{AnnuliPartition, OrbitPoint, OrbitSet};
use crate::rep::{op_norm, RepSpace};
use crate::sl2::Mat2;

fn check_rep(orbit: &OrbitSet, rep: &RepSpace) -> Result<()> {
    if rep.k != orbit.rep_k {
        return Err(Error::Argument(format!(
            "orbit was enumerated for k = {}, representation has k = {}",
            orbit.rep_k, rep.k
        )));
    }
    Ok(())
}

/// Elements entering the sum and the radius they cover.
fn summation_ball<'a>(
    orbit: &'a OrbitSet,
    f: &TestFunction,
    big_t: f64,
    normalized: bool,
) -> Result<&'a [OrbitPoint]> {
    if normalized {
        orbit.ball(big_t)
    } else {
        let r = f.support_radius.ok_or_else(|| {
            Error::Argument(format!("{} needs compact support for the unnormalized sum", f.name))
        })?;
        orbit.ball(big_t * r)
    }
}

/// Exact sum `Σ f(ρ(γ)/T)` over the given points.
fn raw_sum(points: &[OrbitPoint], rep: &RepSpace, f: &TestFunction, big_t: f64) -> ComplexSum {
    par_sum(points, |p| f.eval(&(rep.apply(&p.elem.mat) / big_t)))
}

/// `T^{−2δ/k} Σ f(ρ(γ)/T)`, over `Γ_T` when `normalized` and over `Γ_{T·R}`
/// for `f` supported in the ball of radius `R` otherwise.
pub fn empirical_avg(
    orbit: &OrbitSet,
    rep: &RepSpace,
    f: &TestFunction,
    big_t: f64,
    normalized: bool,
    delta: f64,
) -> Result<Complex64> {
    check_rep(orbit, rep)?;
    let points = summation_ball(orbit, f, big_t, normalized)?;
    let scale = big_t.powf(2.0 * delta / rep.k as f64);
    Ok(raw_sum(points, rep, f, big_t).value() / scale)
}

/// Same quantity with the sum split over the annuli of `partition` (built on an
/// orbit whose cutoff is `T`); also returns the per-cell contributions.
pub fn empirical_avg_annuli(
    orbit: &OrbitSet,
    rep: &RepSpace,
    f: &TestFunction,
    partition: &AnnuliPartition,
    delta: f64,
) -> Result<(Complex64, Vec<Complex64>)> {
    check_rep(orbit, rep)?;
    let big_t = partition.big_t;
    let scale = big_t.powf(2.0 * delta / rep.k as f64);
    let mut total = ComplexSum::new();
    let mut cells = Vec::with_capacity(partition.n);
    for cell in &partition.cells {
        let points: Vec<&OrbitPoint> = cell.iter().map(|&i| &orbit.elements[i]).collect();
        let s = par_sum(&points, |p| f.eval(&(rep.apply(&p.elem.mat) / big_t)));
        cells.push(s.value() / scale);
        total.merge(&s);
    }
    Ok((total.value() / scale, cells))
}

fn cis_exact(phase: f64) -> Complex64 {
    // evaluate at |phase| so that conjugate phases give exact conjugates
    let a = phase.abs();
    let s = a.sin();
    Complex64::new(a.cos(), if phase < 0.0 { -s } else { s })
}

/// `Σ e^{2inθ₁(γ)} e^{2imθ₂(γ)}` over `|γ| ≤ T`, one representative per `±γ`.
pub fn sector_sum(orbit: &OrbitSet, n: i64, m: i64, big_t: f64) -> Result<Complex64> {
    let ball = orbit.ball(big_t.powi(orbit.rep_k as i32))?;
    let mut acc = ComplexSum::new();
    for p in ball {
        if orbit.contains_minus_one && !p.elem.is_psl_representative() {
            continue;
        }
        let phase = 2.0 * (n as f64 * p.coords.theta1 + m as f64 * p.coords.theta2);
        acc.add(cis_exact(phase));
    }
    Ok(acc.value())
}

/// `c_Γ = |Γ_T| / T^{2δ/k}` at the orbit cutoff.
pub fn fit_mass_constant(orbit: &OrbitSet, delta: f64) -> f64 {
    orbit.len() as f64 / orbit.t_cut.powf(2.0 * delta / orbit.rep_k as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    #[serde(rename = "T_ladder")]
    pub t_ladder: Vec<f64>,
    pub empirical: Vec<Complex64>,
    pub limit: Complex64,
    pub self_normalized: bool,
    pub rel_error: Vec<f64>,
    pub mass_constant: f64,
    pub delta: f64,
    pub k: usize,
    pub test_function: String,
    /// `V_Γ(δ)` for reference, when defined.
    pub v_gamma: Option<f64>,
}

fn rel_error(e: Complex64, l: Complex64) -> f64 {
    (e - l).norm() / l.norm().max(1e-12)
}

/// Compares `f` with the limit integral along a ladder of `T`. With
/// `self_normalized`, both sides are divided by their value on the indicator
/// of the unit ball so that global constants cancel.
pub fn compare_limit(
    orbit: &OrbitSet,
    spec: &LimitSpec,
    f: &TestFunction,
    ladder: &[f64],
    self_normalized: bool,
    quad: &Quadrature,
) -> Result<ComparisonReport> {
    let normalized = spec.radial_domain == RadialDomain::Normalized;
    let reference = TestFunction::ball_indicator(1.0);
    let limit_f = limit_integral(spec, f, quad)?;
    let limit = if self_normalized {
        let mut ref_spec = spec.clone();
        ref_spec.radial_domain = RadialDomain::Compact;
        limit_f / limit_integral(&ref_spec, &reference, quad)?
    } else {
        limit_f
    };
    let mut empirical = Vec::with_capacity(ladder.len());
    for &big_t in ladder {
        let v = empirical_avg(orbit, &spec.rep, f, big_t, normalized, spec.delta)?;
        let v = if self_normalized {
            let r = empirical_avg(orbit, &spec.rep, &reference, big_t, true, spec.delta)?;
            v / r
        } else {
            v
        };
        empirical.push(v);
    }
    Ok(ComparisonReport {
        t_ladder: ladder.to_vec(),
        rel_error: empirical.iter().map(|&e| rel_error(e, limit)).collect(),
        empirical,
        limit,
        self_normalized,
        mass_constant: spec.mass_constant,
        delta: spec.delta,
        k: spec.rep.k,
        test_function: f.name.clone(),
        v_gamma: v_gamma(spec.delta).ok(),
    })
}

/// Distribution of the top-left entry: `(1/|Γ_T|) Σ f(a/T)` against the
/// self-normalized limit `∫ f(t cos θ₁ cos θ₂) t^{2δ−1} / ∫ t^{2δ−1}` over the
/// lifted measure in both angles.
pub fn marginal_a_distribution<F>(
    orbit: &OrbitSet,
    ladder: &[f64],
    f: F,
    mu: &BoundaryMeasure,
    delta: f64,
    quad: &Quadrature,
) -> Result<ComparisonReport>
where
    F: Fn(f64) -> f64 + Sync,
{
    if orbit.rep_k != 1 {
        return Err(Error::Argument("the a/T marginal needs the standard representation".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::NumericDomain(format!("δ must be positive, got {delta}")));
    }
    let e = 2.0 * delta;
    let rule = GaussLegendre::new(quad.radial_nodes.max(1));
    // u = t^{2δ} turns t^{2δ−1} dt into du/(2δ); the factor cancels
    let nodes: Vec<(f64, f64)> = rule
        .on_interval(0.0, 1.0)
        .into_iter()
        .map(|(u, w)| (u.powf(1.0 / e), w))
        .collect();
    let atoms = mu.lifted_atoms();
    let mut num = ComplexSum::new();
    let mut den = ComplexSum::new();
    for &(t1, w1) in &atoms {
        let c1 = t1.cos();
        let inner = par_sum(&atoms, |&(t2, w2)| {
            let c = c1 * t2.cos();
            let s: f64 = nodes.iter().map(|&(t, wt)| wt * f(t * c)).sum();
            Complex64::new(w1 * w2 * s, 0.0)
        });
        num.merge(&inner);
        for &(_, w2) in &atoms {
            den.add(Complex64::new(w1 * w2, 0.0));
        }
    }
    let limit = num.value() / den.value();
    if !(limit.re.is_finite()) {
        return Err(Error::Quadrature("marginal limit is not finite".into()));
    }
    let mut empirical = Vec::with_capacity(ladder.len());
    for &big_t in ladder {
        let ball = orbit.ball(big_t)?;
        if ball.is_empty() {
            return Err(Error::Argument(format!("Γ_T is empty at T = {big_t}")));
        }
        let s = par_sum(ball, |p| Complex64::new(f(p.elem.mat.a / big_t), 0.0));
        empirical.push(s.value() / ball.len() as f64);
    }
    Ok(ComparisonReport {
        t_ladder: ladder.to_vec(),
        rel_error: empirical.iter().map(|&v| rel_error(v, limit)).collect(),
        empirical,
        limit,
        self_normalized: true,
        mass_constant: fit_mass_constant(orbit, delta),
        delta,
        k: 1,
        test_function: "a/T marginal".into(),
        v_gamma: v_gamma(delta).ok(),
    })
}

/// `(f(s·ρ(γ)/‖ρ(γ)‖), f(ρ(k₁)·s P_k·ρ(k₂)))` for the Cartan coordinates of `γ`.
pub fn boundary_pair(rep: &RepSpace, f: &TestFunction, g: &Mat2, s: f64) -> (Complex64, Complex64) {
    let c = crate::sl2::kak_decompose(g);
    let x = rep.apply(g);
    let norm = op_norm(&x);
    let near = f.eval(&(x * (s / norm)));
    let limit = rep.apply(&Mat2::rotation(c.theta1)) * &rep.p_k * rep.apply(&Mat2::rotation(c.theta2)) * s;
    (near, f.eval(&limit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::{enumerate, partition_annuli, GroupSpec};
    use crate::rep::build_rep;

    #[test]
    fn cis_matches_polar() {
        for p in [-7.0, -4.0, -3.5, -1.0, 0.0, 0.5, 3.3, 4.0, 12.0] {
            let z = cis_exact(p);
            assert!((z - Complex64::from_polar(1.0, p)).norm() < 1e-15, "{p}");
            assert_eq!(z.conj(), cis_exact(-p));
        }
    }

    fn lattice(big_t: f64) -> (OrbitSet, RepSpace) {
        let rep = build_rep(&[1]).unwrap();
        let o = enumerate(&GroupSpec::sl2z(), &rep, big_t, &Default::default()).unwrap();
        (o, rep)
    }

    #[test]
    fn counting_examples() {
        let (o, rep) = lattice(30.0);
        let one = TestFunction::ball_indicator(1.0);
        let v = empirical_avg(&o, &rep, &one, 30.0, true, 1.0).unwrap();
        assert_eq!(v.re, o.len() as f64 / 900.0);
        let zero = TestFunction::constant(0.0);
        assert_eq!(empirical_avg(&o, &rep, &zero, 20.0, true, 1.0).unwrap(), Complex64::new(0.0, 0.0));
        // unnormalized sums need support and coverage
        assert!(empirical_avg(&o, &rep, &TestFunction::constant(1.0), 10.0, false, 1.0).is_err());
        let wide = TestFunction::ball_indicator(2.0);
        assert!(matches!(
            empirical_avg(&o, &rep, &wide, 20.0, false, 1.0),
            Err(Error::Coverage { .. })
        ));
        assert!(empirical_avg(&o, &rep, &wide, 15.0, false, 1.0).is_ok());
    }

    #[test]
    fn odd_sum_is_exactly_zero() {
        let (o, rep) = lattice(40.0);
        let v = empirical_avg(&o, &rep, &TestFunction::entry(0, 0), 40.0, true, 1.0).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn annuli_sum_is_bit_identical() {
        let (o, rep) = lattice(25.0);
        let f = TestFunction::oscillating_entry(0, 1, 2.3, 0.9);
        let direct = empirical_avg(&o, &rep, &f, 25.0, true, 1.0).unwrap();
        for n in [1, 4, 16] {
            let part = partition_annuli(&o, n, 1.0).unwrap();
            let (v, cells) = empirical_avg_annuli(&o, &rep, &f, &part, 1.0).unwrap();
            assert_eq!(v.re.to_bits(), direct.re.to_bits());
            assert_eq!(v.im.to_bits(), direct.im.to_bits());
            assert_eq!(cells.len(), n);
        }
    }

    #[test]
    fn sector_sum_identities() {
        let (o, _) = lattice(30.0);
        let count = sector_sum(&o, 0, 0, 30.0).unwrap();
        assert_eq!(count.im, 0.0);
        assert_eq!(count.re, (o.len() / 2) as f64);
        let a = sector_sum(&o, 2, -1, 30.0).unwrap();
        let b = sector_sum(&o, -2, 1, 30.0).unwrap();
        assert_eq!(a, b.conj());
    }

    #[test]
    fn boundary_pair_converges() {
        let rep = build_rep(&[2, 1]).unwrap();
        let f = TestFunction::mollified_ball(0.5, 0.5);
        let g = crate::sl2::kak_compose(&crate::sl2::CartanCoords::new(0.4, 9.0, 1.1));
        let (a, b) = boundary_pair(&rep, &f, &g, 0.8);
        assert!((a - b).norm() <= 2.0 * (-4.5f64).exp());
    }

    #[test]
    fn marginal_identities() {
        let (o, _) = lattice(60.0);
        let leb = BoundaryMeasure::lebesgue(64);
        let q = Quadrature { radial_nodes: 32 };
        let one = marginal_a_distribution(&o, &[30.0, 60.0], |_| 1.0, &leb, 1.0, &q).unwrap();
        assert!((one.limit.re - 1.0).abs() < 1e-14);
        assert!(one.empirical.iter().all(|v| (v.re - 1.0).abs() < 1e-14));
        let lin = marginal_a_distribution(&o, &[60.0], |r| r, &leb, 1.0, &q).unwrap();
        assert!(lin.limit.norm() < 1e-14);
        assert_eq!(lin.empirical[0].re, 0.0);
        let sq = marginal_a_distribution(&o, &[60.0], |r| r * r, &leb, 1.0, &q).unwrap();
        assert!((sq.limit.re - 0.125).abs() < 1e-12);
    }
}
