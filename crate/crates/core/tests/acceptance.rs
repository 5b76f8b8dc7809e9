//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use orbitlim::boundary::{ps_estimate, BoundaryMeasure, PsMode};
use orbitlim::limits::{
    empirical_avg, empirical_avg_annuli, homogeneity_check, limit_integral, marginal_a_distribution,
    sector_sum, LimitSpec, Quadrature, RadialDomain, TestFunction,
};
use orbitlim::numeric::linear_fit;
use orbitlim::orbits::{enumerate, estimate_from_orbit, partition_annuli, ExponentMethod, GroupSpec};
use orbitlim::trig::{holder_rate_fit, RateOptions};
use orbitlim::{build_rep, hyp_dist, kak_compose, kak_decompose, mobius_act, op_norm, HPoint, IntMat2, Mat2};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

type Check = fn() -> Vec<(String, Outcome)>;

fn max_abs(m: &nalgebra::DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

fn c1_representations() -> Vec<(String, Outcome)> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = [0.0f64; 5];
    let mut rank_ok = true;
    for w in [vec![1], vec![2], vec![3], vec![2, 1]] {
        let rep = build_rep(&w).unwrap();
        for _ in 0..1000 {
            let th = rng.random_range(0.0..2.0 * PI);
            let k = rep.apply(&Mat2::rotation(th));
            let id = nalgebra::DMatrix::identity(rep.dim, rep.dim);
            worst[0] = worst[0].max(max_abs(&(k.transpose() * &k - id)));
        }
        let (e, f) = (rep.lie_e(), rep.lie_f());
        worst[1] = worst[1].max(max_abs(&(e.transpose() - &f)));
        let x = &e - &f;
        worst[2] = worst[2].max(max_abs(&(x.transpose() + &x)));
        for t in [0.1, 1.0, 5.0] {
            let n = op_norm(&rep.apply(&Mat2::diagonal(t)));
            let want = (0.5 * rep.k as f64 * t).exp();
            worst[3] = worst[3].max((n - want).abs() / want);
        }
        let p = &rep.p_k;
        worst[4] = worst[4].max(max_abs(&(p * p - p))).max(max_abs(&(p.transpose() - p)));
        let rank = p.singular_values().iter().filter(|s| **s > 0.5).count();
        rank_ok &= rank == rep.m;
    }
    let pass = worst[0] <= 1e-9 && worst[1] == 0.0 && worst[2] <= 1e-12 && worst[3] <= 1e-10 && worst[4] == 0.0 && rank_ok;
    vec![(
        "representation algebra".into(),
        outcome(
            pass,
            format!(
                "K-orth {:.1e}, e^T-f {:.1e}, antisym {:.1e}, norm rel {:.1e}, P_k {:.1e}, ranks {}",
                worst[0], worst[1], worst[2], worst[3], worst[4], rank_ok
            ),
        ),
    )]
}

fn c2_kak() -> Vec<(String, Outcome)> {
    let gens = [
        Mat2::new(0.0, -1.0, 1.0, 0.0),
        Mat2::new(1.0, 1.0, 0.0, 1.0),
        Mat2::diagonal(0.7),
        Mat2::rotation(0.9),
        kak_compose(&orbitlim::CartanCoords::new(0.3, 1.1, 2.0)),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut round, mut norm_id, mut dist) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let len = rng.random_range(1..=10);
        let mut g = Mat2::identity();
        for _ in 0..len {
            let x = gens[rng.random_range(0..gens.len())];
            g = g * if rng.random_bool(0.5) { x } else { x.inverse() };
        }
        let c = kak_decompose(&g);
        round = round.max(kak_compose(&c).max_abs_diff(&g));
        let f = g.frobenius_sq();
        norm_id = norm_id.max((2.0 * c.t.cosh() - f).abs() / f.max(1.0));
        let z = mobius_act(&g, &HPoint::ORIGIN).unwrap();
        dist = dist.max((hyp_dist(&HPoint::ORIGIN, &z) - c.t).abs());
    }
    vec![(
        "KAK roundtrip and identities on 10^4 random words".into(),
        outcome(
            round <= 1e-8 && norm_id <= 1e-9 && dist <= 1e-8,
            format!("roundtrip {round:.1e}, 2cosh t {norm_id:.1e}, distance {dist:.1e}"),
        ),
    )]
}

fn brute_force(big_t: f64) -> BTreeSet<IntMat2> {
    let bound = big_t.floor() as i64;
    let x = big_t * big_t + 1.0 / (big_t * big_t);
    let mut out = BTreeSet::new();
    for a in -bound..=bound {
        for b in -bound..=bound {
            for c in -bound..=bound {
                for d in -bound..=bound {
                    if a * d - b * c == 1 && ((a * a + b * b + c * c + d * d) as f64) <= x {
                        out.insert(IntMat2::new(a, b, c, d));
                    }
                }
            }
        }
    }
    out
}

fn c3_enumeration() -> Vec<(String, Outcome)> {
    let rep = build_rep(&[1]).unwrap();
    let mut details = Vec::new();
    let mut pass = true;
    for big_t in [2f64.sqrt(), 3.0, 10.0, 30.0] {
        let orbit = enumerate(&GroupSpec::sl2z(), &rep, big_t, &Default::default()).unwrap();
        let got: BTreeSet<IntMat2> = orbit.elements.iter().map(|p| p.elem.exact.unwrap()).collect();
        let want = brute_force(big_t);
        let ok = got == want && got.len() == orbit.len();
        pass &= ok;
        details.push(format!("T={big_t:.3}: {} vs {}", orbit.len(), want.len()));
    }
    pass &= details[0].ends_with("4 vs 4");
    vec![("SL(2,Z) enumeration against brute force".into(), outcome(pass, details.join(", ")))]
}

fn c4_growth() -> Vec<(String, Outcome)> {
    let rep = build_rep(&[1]).unwrap();
    let orbit = enumerate(&GroupSpec::sl2z(), &rep, 400.0, &Default::default()).unwrap();
    let est = estimate_from_orbit(&orbit, ExponentMethod::GrowthFit, 50.0, 400.0).unwrap();
    let mut ratios = Vec::new();
    for big_t in [100.0, 200.0] {
        let r = orbit.count_within(2.0 * big_t).unwrap() as f64 / orbit.count_within(big_t).unwrap() as f64;
        ratios.push(r);
    }
    vec![
        (
            "growth fit delta over T in [50, 400]".into(),
            outcome(
                (est.delta_hat - 1.0).abs() <= 0.03,
                format!("delta_hat {:.4} ± {:.4} (raw {:.4})", est.delta_hat, est.stderr, est.raw),
            ),
        ),
        (
            "doubling ratio N(2T)/N(T) for T >= 100".into(),
            outcome(
                ratios.iter().all(|r| (3.6..=4.4).contains(r)),
                format!("T=100: {:.4}, T=200: {:.4}", ratios[0], ratios[1]),
            ),
        ),
    ]
}

fn c5_lattice_angular() -> Vec<(String, Outcome)> {
    let rep = build_rep(&[1]).unwrap();
    let orbit = enumerate(&GroupSpec::sl2z(), &rep, 400.0, &Default::default()).unwrap();
    let mu = ps_estimate(&orbit, 1.0, PsMode::EmpiricalAngular, None).unwrap();
    let coeffs: Vec<f64> = (1..=4).map(|n| mu.fourier_coeff(n).norm()).collect();
    let m0 = mu.fourier_coeff(0);
    let ps = ps_estimate(&orbit, 1.05, PsMode::PattersonLimit, Some(1.0)).unwrap();
    let ps_coeffs: Vec<String> = (1..=4).map(|n| format!("{:.3}", ps.fourier_coeff(n).norm())).collect();
    vec![(
        "lattice angular measure is Lebesgue".into(),
        outcome(
            coeffs.iter().all(|c| *c <= 0.05) && (m0.re - 1.0).abs() < 1e-12 && m0.im.abs() < 1e-12,
            format!(
                "empirical-angular |mu(2n)| n=1..4: {:.4} {:.4} {:.4} {:.4}, mu(0) = {:.15}; patterson s=1.05: {}",
                coeffs[0],
                coeffs[1],
                coeffs[2],
                coeffs[3],
                m0.re,
                ps_coeffs.join(" ")
            ),
        ),
    )]
}

fn c6_marginal() -> Vec<(String, Outcome)> {
    let rep = build_rep(&[1]).unwrap();
    let orbit = enumerate(&GroupSpec::sl2z(), &rep, 200.0, &Default::default()).unwrap();
    let leb = BoundaryMeasure::lebesgue(256);
    let q = Quadrature::default();
    let sq = marginal_a_distribution(&orbit, &[200.0], |r| r * r, &leb, 1.0, &q).unwrap();
    let lin = marginal_a_distribution(&orbit, &[200.0], |r| r, &leb, 1.0, &q).unwrap();
    let (e2, e1) = (sq.empirical[0].re, lin.empirical[0].re);
    vec![
        (
            "marginal E[(a/T)^2] at T = 200".into(),
            outcome(
                (e2 - 0.125).abs() <= 0.01,
                format!("empirical {e2:.5}, limit integral {:.5}, oracle 0.125", sq.limit.re),
            ),
        ),
        (
            "marginal E[a/T] at T = 200".into(),
            outcome(e1.abs() <= 0.01, format!("empirical {e1:.3e}, limit integral {:.1e}", lin.limit.re)),
        ),
    ]
}

fn c7_homogeneity() -> Vec<(String, Outcome)> {
    let q = Quadrature::default();
    let mut out = Vec::new();
    for (delta, w) in [(1.0, vec![1]), (0.75, vec![1]), (1.0, vec![2])] {
        let spec = LimitSpec {
            mu: BoundaryMeasure::lebesgue(16),
            delta,
            rep: build_rep(&w).unwrap(),
            mass_constant: 1.0,
            radial_domain: RadialDomain::Compact,
        };
        let e = spec.exponent();
        let base = TestFunction::ball_indicator(1.0);
        let full = limit_integral(&spec, &base, &q).unwrap().re;
        // (δ/2k)·c·(lifted mass 2)²·r^e/e by direct integration of t^{e−1}
        let closed = delta / (2.0 * w[0] as f64) * 4.0 / e;
        let mut worst = (full - closed).abs() / closed;
        let mut parts = Vec::new();
        for r in [0.5, 0.25] {
            let (lhs, rhs) = homogeneity_check(&spec, &base, r, &q).unwrap();
            let ratio = lhs / full;
            worst = worst.max((ratio - r.powf(e)).abs() / r.powf(e)).max((lhs - rhs).abs() / rhs);
            parts.push(format!("r={r}: {ratio:.10} vs {:.10}", r.powf(e)));
        }
        out.push((
            format!("ball homogeneity delta={delta} k={}", w[0]),
            outcome(worst <= 1e-6, format!("{} (max rel dev {worst:.1e})", parts.join(", "))),
        ));
    }
    out
}

fn c8_annuli() -> Vec<(String, Outcome)> {
    let rep = build_rep(&[1]).unwrap();
    let orbit = enumerate(&GroupSpec::sl2z(), &rep, 100.0, &Default::default()).unwrap();
    let fs = [
        TestFunction::oscillating_entry(0, 1, 2.7, 0.9),
        TestFunction::entry_product(0, 0, 1, 1).restricted(1.0),
        TestFunction::radial_bump(1.0),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for f in &fs {
        let direct = empirical_avg(&orbit, &rep, f, 100.0, true, 1.0).unwrap();
        for n in [1, 4, 16, 64] {
            let part = partition_annuli(&orbit, n, 1.0).unwrap();
            let (v, _) = empirical_avg_annuli(&orbit, &rep, f, &part, 1.0).unwrap();
            let sizes: usize = part.sizes().iter().sum();
            pass &= v.re.to_bits() == direct.re.to_bits() && v.im.to_bits() == direct.im.to_bits() && sizes == orbit.len();
        }
        detail.push(format!("{} = {:.12}", f.name, direct));
    }
    vec![("annuli bookkeeping is bit-identical".into(), outcome(pass, detail.join("; ")))]
}

fn c9_odd() -> Vec<(String, Outcome)> {
    let rep = build_rep(&[1]).unwrap();
    let f = TestFunction::entry(0, 0);
    let lattice = enumerate(&GroupSpec::sl2z(), &rep, 100.0, &Default::default()).unwrap();
    let schottky = enumerate(&GroupSpec::reference_schottky(), &rep, 200.0, &Default::default()).unwrap();
    let a = empirical_avg(&lattice, &rep, &f, 100.0, true, 1.0).unwrap();
    let b = empirical_avg(&schottky, &rep, &f, 200.0, true, 0.75).unwrap();
    let zero = Complex64::new(0.0, 0.0);
    vec![(
        "odd function sums vanish exactly".into(),
        outcome(a == zero && b == zero, format!("SL(2,Z) T=100: {a}, Schottky T=200: {b}")),
    )]
}

fn c10_fejer() -> Vec<(String, Outcome)> {
    let ladder = [8, 16, 32, 64, 128, 256];
    let opts = RateOptions::default();
    let lip = holder_rate_fit(|a, _| a.sin().abs(), 1.0, 1.0, &ladder, &opts).unwrap();
    let half = holder_rate_fit(|a, _| a.sin().abs().sqrt(), 0.5, 1.0, &ladder, &opts).unwrap();
    let fmt_errs = |e: &[f64]| e.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ");
    vec![
        (
            "Fejer rate alpha=1 (slope of log(err/log R))".into(),
            outcome(
                (lip.slope + 1.0).abs() <= 0.15,
                format!(
                    "slope {:.3}, plain {:.3}, C0 {:.2}, errors {}",
                    lip.slope,
                    lip.slope_plain,
                    lip.c0,
                    fmt_errs(&lip.sup_errors)
                ),
            ),
        ),
        (
            "Fejer rate alpha=1/2 (slope of log(err/log R))".into(),
            outcome(
                (half.slope + 0.5).abs() <= 0.15,
                format!(
                    "slope {:.3}, plain {:.3}, rate-matched {:.3}, C0 {:.2}, errors {}",
                    half.slope,
                    half.slope_plain,
                    half.slope_rate_matched,
                    half.c0,
                    fmt_errs(&half.sup_errors)
                ),
            ),
        ),
        (
            "Fejer mean never overshoots".into(),
            outcome(
                lip.sigma_sup <= lip.psi_sup + 1e-12 && half.sigma_sup <= half.psi_sup + 1e-12,
                format!(
                    "sup sigma {:.6} <= {:.6}, {:.6} <= {:.6}",
                    lip.sigma_sup, lip.psi_sup, half.sigma_sup, half.psi_sup
                ),
            ),
        ),
    ]
}

fn c11_schottky() -> Vec<(String, Outcome)> {
    let rep = build_rep(&[1]).unwrap();
    let spec = GroupSpec::reference_schottky();
    let big_t = 7.5f64.exp();
    let orbit = enumerate(&spec, &rep, big_t, &Default::default()).unwrap();
    let est = estimate_from_orbit(&orbit, ExponentMethod::PoincareAbscissa, big_t / 64.0, big_t).unwrap();
    let growth = estimate_from_orbit(&orbit, ExponentMethod::GrowthFit, big_t / 64.0, big_t).unwrap();
    let s = est.delta_hat + 0.05;
    let mu = ps_estimate(&orbit, s, PsMode::PattersonLimit, Some(est.delta_hat)).unwrap();
    let count = sector_sum(&orbit, 0, 0, big_t).unwrap();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for n in -3i64..=3 {
        let ratio = sector_sum(&orbit, n, 0, big_t).unwrap() / count;
        let ps = mu.fourier_coeff(n) / mu.fourier_coeff(0);
        worst = worst.max((ratio - ps).norm());
        if n > 0 {
            parts.push(format!("n={n}: {:.3} vs {:.3}", ratio.re, ps.re));
        }
    }
    // error rates along T are logged only
    let ts: Vec<f64> = [big_t / 8.0, big_t / 4.0, big_t / 2.0, big_t].to_vec();
    let devs: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let c = sector_sum(&orbit, 0, 0, t).unwrap();
            (sector_sum(&orbit, 1, 0, t).unwrap() / c - mu.fourier_coeff(1)).norm()
        })
        .collect();
    let lx: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = devs.iter().map(|d| d.max(1e-300).ln()).collect();
    let rate = linear_fit(&lx, &ly).map_or(f64::NAN, |f| f.slope);
    vec![(
        "Schottky sector ratios match Patterson coefficients".into(),
        outcome(
            worst <= 0.1 && est.delta_hat > 0.5,
            format!(
                "|Gamma_T| = {}, delta_hat {:.4} ± {:.4} (growth fit {:.4}), s = {s:.4}, {}, max dev {worst:.4}, n=1 deviation slope {rate:.2} (logged only)",
                orbit.len(),
                est.delta_hat,
                est.stderr,
                growth.delta_hat,
                parts.join(", ")
            ),
        ),
    )]
}

fn main() {
    let checks: [(u32, Duration, Check); 11] = [
        (1, Duration::from_secs(1), c1_representations),
        (2, Duration::from_secs(5), c2_kak),
        (3, Duration::from_secs(30), c3_enumeration),
        (4, Duration::from_secs(120), c4_growth),
        (5, Duration::from_secs(120), c5_lattice_angular),
        (6, Duration::from_secs(180), c6_marginal),
        (7, Duration::from_secs(10), c7_homogeneity),
        (8, Duration::from_secs(600), c8_annuli),
        (9, Duration::from_secs(600), c9_odd),
        (10, Duration::from_secs(60), c10_fejer),
        (11, Duration::from_secs(600), c11_schottky),
    ];
    let mut failures = 0;
    for (id, limit, check) in checks {
        let start = Instant::now();
        let results = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= limit;
        for (name, o) in results {
            let pass = o.pass && in_time;
            if !pass {
                failures += 1;
            }
            println!(
                "{} [{id:>2}] {name} ({:.2} s{}) {}",
                if pass { "PASS" } else { "FAIL" },
                elapsed.as_secs_f64(),
                if in_time { String::new() } else { format!(", limit {} s", limit.as_secs()) },
                o.detail
            );
        }
    }
    println!("acceptance: {failures} failing");
    if failures > 0 {
        std::process::exit(1);
    }
}
