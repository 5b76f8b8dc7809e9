//! Dirichlet and Fejér kernels on the torus, Fejér means of gridded
//! functions, and measured approximation rates for Hölder functions.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{linear_fit, GaussLegendre};

/// `D_N(u) = Σ_{|j|≤N} e^{iju} = sin((N+½)u)/sin(u/2)`.
pub fn dirichlet_kernel(n: usize, u: f64) -> f64 {
    let s = (0.5 * u).sin();
    if s.abs() < 1e-12 {
        // removable singularity at multiples of 2π
        return (2 * n + 1) as f64 * ((n as f64 + 0.5) * u).cos() / (0.5 * u).cos();
    }
    ((n as f64 + 0.5) * u).sin() / s
}

/// `F_R(u) = (1/R)(sin(Ru/2)/sin(u/2))² = (1/R) Σ_{N<R} D_N(u)`.
pub fn fejer_kernel(r: usize, u: f64) -> Result<f64> {
    if r == 0 {
        return Err(Error::Argument("Fejér kernel needs R ≥ 1".into()));
    }
    let rf = r as f64;
    let s = (0.5 * u).sin();
    if s.abs() < 1e-8 {
        // Taylor expansion around u ≡ 0 (mod 2π)
        let v = u - TAU * (u / TAU).round();
        return Ok(rf * (1.0 - (rf * rf - 1.0) * v * v / 12.0));
    }
    let q = (0.5 * rf * u).sin() / s;
    Ok(q * q / rf)
}

/// Samples `ψ(2πi/n, 2πj/n)` on an `n × n` grid, row-major in `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid2D {
    pub n: usize,
    pub values: Vec<f64>,
}

impl Grid2D {
    pub fn sample<F: Fn(f64, f64) -> f64 + Sync>(n: usize, psi: F) -> Self {
        let h = TAU / n as f64;
        let values = (0..n * n)
            .into_par_iter()
            .map(|idx| psi((idx / n) as f64 * h, (idx % n) as f64 * h))
            .collect();
        Self { n, values }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// Whether the samples are invariant under a shift by π in the given axis,
    /// up to rounding in the sampled function.
    pub fn pi_symmetric(&self, axis: usize) -> bool {
        let n = self.n;
        if !n.is_multiple_of(2) {
            return false;
        }
        let tol = 1e-12 * self.sup_norm().max(1.0);
        (0..n).all(|i| {
            (0..n).all(|j| {
                let (i2, j2) = if axis == 0 { ((i + n / 2) % n, j) } else { (i, (j + n / 2) % n) };
                (self.at(i, j) - self.at(i2, j2)).abs() <= tol
            })
        })
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Trigonometric polynomial `Σ_{|n|,|m|<R} c_{n,m} e^{i(nθ₁+mθ₂)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly2D {
    pub r: usize,
    coeffs: Vec<Complex64>,
    /// Odd frequencies vanish in axis 0 / axis 1.
    pub even_only: [bool; 2],
}

impl TrigPoly2D {
    fn width(&self) -> usize {
        2 * self.r - 1
    }

    fn index(&self, n: i64, m: i64) -> Option<usize> {
        let r = self.r as i64;
        if n.abs() >= r || m.abs() >= r {
            return None;
        }
        Some(((n + r - 1) as usize) * self.width() + (m + r - 1) as usize)
    }

    pub fn coeff(&self, n: i64, m: i64) -> Complex64 {
        self.index(n, m).map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    pub fn eval(&self, t1: f64, t2: f64) -> Complex64 {
        let r = self.r as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 1 - r..r {
            for m in 1 - r..r {
                acc += self.coeff(n, m) * Complex64::from_polar(1.0, n as f64 * t1 + m as f64 * t2);
            }
        }
        acc
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DftMethod {
    /// Direct separable discrete Fourier sums.
    #[default]
    Dense,
    /// Two-dimensional FFT.
    Fast,
}

fn twiddles(n: usize, sign: f64) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::from_polar(1.0, sign * TAU * k as f64 / n as f64))
        .collect()
}

/// Fourier coefficients `ψ̂(n, m)` for `|n|, |m| < r` from grid samples.
fn grid_coefficients(samples: &Grid2D, r: usize, method: DftMethod) -> Vec<Complex64> {
    let n = samples.n;
    let w = 2 * r - 1;
    let freq = |idx: usize| idx as i64 - (r as i64 - 1);
    let norm = 1.0 / (n * n) as f64;
    match method {
        DftMethod::Dense => {
            let tw = twiddles(n, -1.0);
            // partial transform along axis 1: b[i][m] = Σ_j ψ_ij e^{−imθ_j}
            let b: Vec<Vec<Complex64>> = (0..n)
                .into_par_iter()
                .map(|i| {
                    (0..w)
                        .map(|mi| {
                            let m = freq(mi).rem_euclid(n as i64) as usize;
                            let mut acc = Complex64::new(0.0, 0.0);
                            for j in 0..n {
                                acc += tw[(m * j) % n] * samples.at(i, j);
                            }
                            acc
                        })
                        .collect()
                })
                .collect();
            (0..w * w)
                .into_par_iter()
                .map(|idx| {
                    let (ni, mi) = (idx / w, idx % w);
                    let k = freq(ni).rem_euclid(n as i64) as usize;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (i, row) in b.iter().enumerate() {
                        acc += tw[(k * i) % n] * row[mi];
                    }
                    acc * norm
                })
                .collect()
        }
        DftMethod::Fast => {
            let mut planner = FftPlanner::new();
            let fft = planner.plan_fft_forward(n);
            let mut data: Vec<Complex64> = samples.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            data.par_chunks_mut(n).for_each(|row| fft.process(row));
            let mut cols = vec![Complex64::new(0.0, 0.0); n * n];
            for i in 0..n {
                for j in 0..n {
                    cols[j * n + i] = data[i * n + j];
                }
            }
            cols.par_chunks_mut(n).for_each(|col| fft.process(col));
            (0..w * w)
                .map(|idx| {
                    let k = freq(idx / w).rem_euclid(n as i64) as usize;
                    let m = freq(idx % w).rem_euclid(n as i64) as usize;
                    cols[m * n + k] * norm
                })
                .collect()
        }
    }
}

/// Fejér mean `σ_R`: grid Fourier coefficients with Cesàro weights
/// `(1 − |n|/R)(1 − |m|/R)`. Odd frequencies are set to zero exactly along an
/// axis in which the samples are π-periodic.
pub fn fejer_mean(samples: &Grid2D, r: usize, method: DftMethod) -> Result<TrigPoly2D> {
    if r == 0 {
        return Err(Error::Argument("Fejér mean needs R ≥ 1".into()));
    }
    if samples.n < 4 * r {
        return Err(Error::Aliasing {
            grid: samples.n,
            degree: r,
            needed: 4 * r,
        });
    }
    let even_only = [samples.pi_symmetric(0), samples.pi_symmetric(1)];
    let raw = grid_coefficients(samples, r, method);
    let w = 2 * r - 1;
    let rf = r as f64;
    let coeffs = raw
        .into_iter()
        .enumerate()
        .map(|(idx, c)| {
            let n = (idx / w) as i64 - (r as i64 - 1);
            let m = (idx % w) as i64 - (r as i64 - 1);
            if (even_only[0] && n % 2 != 0) || (even_only[1] && m % 2 != 0) {
                return Complex64::new(0.0, 0.0);
            }
            c * ((1.0 - n.abs() as f64 / rf) * (1.0 - m.abs() as f64 / rf))
        })
        .collect();
    Ok(TrigPoly2D { r, coeffs, even_only })
}

/// `(sup |σ − ψ|, sup |σ|)` on an `m × m` grid, evaluated by inverse FFTs.
pub fn sup_error<F: Fn(f64, f64) -> f64 + Sync>(poly: &TrigPoly2D, psi: F, m: usize) -> (f64, f64) {
    let r = poly.r as i64;
    let w = poly.width();
    let mut planner = FftPlanner::new();
    let ifft: Arc<dyn Fft<f64>> = planner.plan_fft_inverse(m);
    // c[n][j₂] = Σ_m c_{n,m} e^{imφ_{j₂}}
    let partial: Vec<Vec<Complex64>> = (0..w)
        .into_par_iter()
        .map(|ni| {
            let mut buf = vec![Complex64::new(0.0, 0.0); m];
            for mi in 0..w {
                let freq = mi as i64 - (r - 1);
                buf[freq.rem_euclid(m as i64) as usize] += poly.coeffs[ni * w + mi];
            }
            ifft.process(&mut buf);
            buf
        })
        .collect();
    let h = TAU / m as f64;
    (0..m)
        .into_par_iter()
        .map(|j2| {
            let mut buf = vec![Complex64::new(0.0, 0.0); m];
            for (ni, row) in partial.iter().enumerate() {
                let freq = ni as i64 - (r - 1);
                buf[freq.rem_euclid(m as i64) as usize] += row[j2];
            }
            ifft.process(&mut buf);
            let mut err: f64 = 0.0;
            let mut sup: f64 = 0.0;
            for (j1, v) in buf.iter().enumerate() {
                let val = v.re;
                err = err.max((val - psi(j1 as f64 * h, j2 as f64 * h)).abs());
                sup = sup.max(val.abs());
            }
            (err, sup)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)))
}

/// `(1/π) ∫₀^π u^α F_R(u) du`, the mean Hölder modulus under the kernel.
pub fn kernel_holder_moment(r: usize, alpha: f64) -> f64 {
    let rule = GaussLegendre::new(32);
    let pieces = 4 * r.max(1);
    let h = PI / pieces as f64;
    let mut total = 0.0;
    for p in 0..pieces {
        total += rule.integrate(p as f64 * h, (p + 1) as f64 * h, |u| {
            u.powf(alpha) * fejer_kernel(r, u).expect("r ≥ 1")
        });
    }
    total / PI
}

/// Errors below this are treated as having hit the floating-point floor.
pub const ERROR_FLOOR: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub alpha: f64,
    pub holder_constant: f64,
    pub r_ladder: Vec<usize>,
    pub grids: Vec<usize>,
    pub sup_errors: Vec<f64>,
    /// `2·C_ψ·(1/π)∫₀^π u^α F_R(u) du`, valid for `|ψ(x) − ψ(y)| ≤ C_ψ Σ|x_i − y_i|^α`.
    pub bounds: Vec<f64>,
    /// Slope of `log(err / log R)` against `log R`.
    pub slope: f64,
    pub slope_stderr: f64,
    /// Slope of `log err` against `log R`.
    pub slope_plain: f64,
    /// Slope with the `log R` factor removed only for α = 1.
    pub slope_rate_matched: f64,
    /// `max_R err / (C_ψ R^{−α} log R)`.
    pub c0: f64,
    /// Largest `‖σ_R‖_∞` seen and `‖ψ‖_∞`.
    pub sigma_sup: f64,
    pub psi_sup: f64,
    /// Some ladder points hit the error floor and were excluded from the fit.
    pub truncated: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct RateOptions {
    /// Minimum sample grid; raised to `4R` where needed.
    pub base_grid: usize,
    /// Ratio of the error grid to the sample grid.
    pub refine: usize,
    pub method: DftMethod,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self {
            base_grid: 512,
            refine: 4,
            method: DftMethod::Dense,
        }
    }
}

pub fn holder_rate_fit<F>(
    psi: F,
    alpha: f64,
    holder_constant: f64,
    r_ladder: &[usize],
    opts: &RateOptions,
) -> Result<RateFit>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    if r_ladder.len() < 2 || r_ladder.windows(2).any(|w| w[1] <= w[0]) || r_ladder[0] < 2 {
        return Err(Error::Argument("R ladder must be increasing, start at R ≥ 2 and have ≥ 2 entries".into()));
    }
    if (*r_ladder.last().unwrap() as f64 / r_ladder[0] as f64) < 8.0 {
        return Err(Error::Argument("R ladder must span at least 3 octaves".into()));
    }
    let mut sup_errors = Vec::new();
    let mut bounds = Vec::new();
    let mut grids = Vec::new();
    let mut sigma_sup: f64 = 0.0;
    let mut psi_sup: f64 = 0.0;
    for &r in r_ladder {
        let grid = opts.base_grid.max(4 * r);
        let samples = Grid2D::sample(grid, &psi);
        let poly = fejer_mean(&samples, r, opts.method)?;
        let (err, sup) = sup_error(&poly, &psi, opts.refine.max(1) * grid);
        let fine_psi = Grid2D::sample(opts.refine.max(1) * grid, &psi).sup_norm();
        sigma_sup = sigma_sup.max(sup);
        psi_sup = psi_sup.max(fine_psi);
        sup_errors.push(err);
        bounds.push(2.0 * holder_constant * kernel_holder_moment(r, alpha));
        grids.push(grid);
    }
    let kept: Vec<usize> = (0..r_ladder.len()).filter(|&i| sup_errors[i] >= ERROR_FLOOR).collect();
    let truncated = kept.len() < r_ladder.len();
    if kept.len() < 2 {
        return Err(Error::Estimation("sup errors are at the floating-point floor".into()));
    }
    let lr: Vec<f64> = kept.iter().map(|&i| (r_ladder[i] as f64).ln()).collect();
    let le: Vec<f64> = kept.iter().map(|&i| sup_errors[i].ln()).collect();
    let corrected: Vec<f64> = le.iter().zip(&lr).map(|(e, l)| e - l.ln()).collect();
    let fit = linear_fit(&lr, &corrected).expect("distinct R");
    let plain = linear_fit(&lr, &le).expect("distinct R");
    let slope_rate_matched = if (alpha - 1.0).abs() < 1e-12 { fit.slope } else { plain.slope };
    let c0 = kept
        .iter()
        .map(|&i| {
            let r = r_ladder[i] as f64;
            sup_errors[i] / (holder_constant * r.powf(-alpha) * r.ln())
        })
        .fold(0.0, f64::max);
    Ok(RateFit {
        alpha,
        holder_constant,
        r_ladder: r_ladder.to_vec(),
        grids,
        sup_errors,
        bounds,
        slope: fit.slope,
        slope_stderr: fit.slope_stderr,
        slope_plain: plain.slope,
        slope_rate_matched,
        c0,
        sigma_sup,
        psi_sup,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_examples() {
        assert_eq!(fejer_kernel(7, 0.0).unwrap(), 7.0);
        for u in [0.0, 0.3, 2.0, 5.5] {
            assert!((fejer_kernel(1, u).unwrap() - 1.0).abs() < 1e-14);
        }
        assert!(fejer_kernel(2, PI).unwrap().abs() < 1e-15);
        assert!(fejer_kernel(0, 1.0).is_err());
        assert!((dirichlet_kernel(3, 0.0) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_matches_defining_sum() {
        for n in [0, 1, 4, 9] {
            for u in [0.1, 1.7, 3.0, -2.2] {
                let direct: f64 = (-(n as i64)..=n as i64).map(|j| (j as f64 * u).cos()).sum();
                assert!((dirichlet_kernel(n, u) - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fejer_is_average_of_dirichlet() {
        for r in [1, 3, 8] {
            for u in [0.2, 1.0, 2.9] {
                let avg: f64 = (0..r).map(|n| dirichlet_kernel(n, u)).sum::<f64>() / r as f64;
                assert!((fejer_kernel(r, u).unwrap() - avg).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unit_mass_and_positivity() {
        for r in 1..=64 {
            // trapezoid rule with more than 2R nodes is exact for degree < R
            let n = 4 * r + 4;
            let mean: f64 = (0..n).map(|i| fejer_kernel(r, TAU * i as f64 / n as f64).unwrap()).sum::<f64>() / n as f64;
            assert!((mean - 1.0).abs() < 1e-12, "R={r}");
        }
        for i in 0..10_000 {
            let u = -PI + TAU * i as f64 / 10_000.0;
            assert!(fejer_kernel(17, u).unwrap() >= 0.0);
        }
    }

    #[test]
    fn constant_and_single_mode() {
        let g = Grid2D::sample(32, |_, _| 2.5);
        let p = fejer_mean(&g, 5, DftMethod::Dense).unwrap();
        assert!((p.eval(0.3, 1.2).re - 2.5).abs() < 1e-13);
        let g = Grid2D::sample(64, |a, _| (2.0 * a).cos());
        let r = 16;
        let p = fejer_mean(&g, r, DftMethod::Dense).unwrap();
        // cos 2θ = (e^{2iθ} + e^{−2iθ})/2 and the Cesàro factor is 1 − 2/R
        let want = 0.5 * (1.0 - 2.0 / r as f64);
        assert!((p.coeff(2, 0).re - want).abs() < 1e-13);
        assert!(p.coeff(1, 0).norm() < 1e-13 && p.coeff(2, 1).norm() < 1e-13);
        assert!(matches!(fejer_mean(&g, 17, DftMethod::Dense), Err(Error::Aliasing { .. })));
    }

    #[test]
    fn pi_symmetric_input_has_even_frequencies() {
        let g = Grid2D::sample(64, |a, b| a.sin().abs() + (2.0 * b).cos().powi(3));
        let p = fejer_mean(&g, 16, DftMethod::Dense).unwrap();
        assert_eq!(p.even_only, [true, true]);
        for n in -15..16 {
            for m in -15..16 {
                if n % 2 != 0 || m % 2 != 0 {
                    assert_eq!(p.coeff(n, m), Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn fast_path_agrees() {
        let g = Grid2D::sample(64, |a, b| (a.sin().abs()).sqrt() * (1.0 + 0.3 * (b - 0.2).cos()));
        let d = fejer_mean(&g, 16, DftMethod::Dense).unwrap();
        let f = fejer_mean(&g, 16, DftMethod::Fast).unwrap();
        for n in -15..16 {
            for m in -15..16 {
                assert!((d.coeff(n, m) - f.coeff(n, m)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn sup_error_matches_direct_evaluation() {
        let psi = |a: f64, b: f64| a.sin().abs() * (1.0 + 0.5 * b.sin());
        let g = Grid2D::sample(32, psi);
        let p = fejer_mean(&g, 8, DftMethod::Dense).unwrap();
        let (err, sup) = sup_error(&p, psi, 64);
        let mut e2: f64 = 0.0;
        let mut s2: f64 = 0.0;
        for i in 0..64 {
            for j in 0..64 {
                let (a, b) = (TAU * i as f64 / 64.0, TAU * j as f64 / 64.0);
                let v = p.eval(a, b).re;
                e2 = e2.max((v - psi(a, b)).abs());
                s2 = s2.max(v.abs());
            }
        }
        assert!((err - e2).abs() < 1e-12 && (sup - s2).abs() < 1e-12);
    }

    #[test]
    fn smooth_input_converges_like_cesaro() {
        let fit = holder_rate_fit(
            |a, _| (2.0 * a).cos(),
            1.0,
            2.0,
            &[4, 8, 16, 32],
            &RateOptions { base_grid: 64, ..Default::default() },
        )
        .unwrap();
        // error is exactly (2/R)·|cos 2θ|, slope −1
        assert!((fit.slope_plain + 1.0).abs() < 1e-9);
        assert!(fit.sigma_sup <= fit.psi_sup + 1e-12);
    }
}
