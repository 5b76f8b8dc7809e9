//! Boundary measures on `[0, π)` built from orbit data, their symmetric lift
//! to `[0, 2π)`, Fourier coefficients and the Poisson-type eigenfunction φ₀.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{ComplexSum, ExactSum};
use crate::orbits::{t_radius, OrbitSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    PattersonLimit,
    EmpiricalAngular,
    Lebesgue,
    Dirac,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsMode {
    /// Weights `e^{−s t(γ)}` on the boundary angles `θ₁(γ)`.
    PattersonLimit,
    /// Uniform weights on the outer tenth of the `t` range.
    EmpiricalAngular,
}

/// Fraction of the cutoff `t` above which `EmpiricalAngular` keeps elements.
pub const ANGULAR_SHELL: f64 = 0.9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryMeasure {
    /// Atoms `(θ, w)` with `θ ∈ [0, π)`; the lift adds `(θ + π, w)`.
    atoms: Vec<(f64, f64)>,
    /// Mass on `[0, π)`.
    pub total_mass: f64,
    pub normalized: bool,
    pub provenance: Provenance,
    /// True when the data carried no boundary direction.
    pub degenerate: bool,
    /// Set when `s` does not exceed the supplied exponent estimate.
    pub divergence_warning: Option<String>,
}

fn fold(theta: f64) -> f64 {
    let x = theta.rem_euclid(PI);
    if x >= PI {
        0.0
    } else {
        x
    }
}

impl BoundaryMeasure {
    /// Measure from arbitrary atoms; angles are folded into `[0, π)`.
    pub fn from_atoms(atoms: Vec<(f64, f64)>, provenance: Provenance) -> Result<Self> {
        if atoms.iter().any(|&(t, w)| !(t.is_finite() && w.is_finite() && w >= 0.0)) {
            return Err(Error::Argument("atoms need finite angles and nonnegative weights".into()));
        }
        let atoms: Vec<(f64, f64)> = atoms.into_iter().map(|(t, w)| (fold(t), w)).collect();
        let total_mass = atoms.iter().map(|a| a.1).collect::<ExactSum>().value();
        Ok(Self {
            atoms,
            total_mass,
            normalized: false,
            provenance,
            degenerate: false,
            divergence_warning: None,
        })
    }

    /// Rescale to unit mass on `[0, π)`.
    pub fn normalize(mut self) -> Result<Self> {
        if !(self.total_mass > 0.0) {
            return Err(Error::NumericDomain("cannot normalize a zero measure".into()));
        }
        let m = self.total_mass;
        for a in &mut self.atoms {
            a.1 /= m;
        }
        self.total_mass = self.atoms.iter().map(|a| a.1).collect::<ExactSum>().value();
        self.normalized = true;
        Ok(self)
    }

    /// Normalized uniform measure on `n` equally spaced atoms, which
    /// integrates `e^{2imθ}` exactly for `0 < |m| < n`.
    pub fn lebesgue(n: usize) -> Self {
        let n = n.max(1);
        let atoms = (0..n).map(|j| (PI * j as f64 / n as f64, 1.0 / n as f64)).collect();
        Self {
            atoms,
            total_mass: 1.0,
            normalized: true,
            provenance: Provenance::Lebesgue,
            degenerate: false,
            divergence_warning: None,
        }
    }

    pub fn dirac(theta: f64) -> Self {
        Self {
            atoms: vec![(fold(theta), 1.0)],
            total_mass: 1.0,
            normalized: true,
            provenance: Provenance::Dirac,
            degenerate: false,
            divergence_warning: None,
        }
    }

    pub fn base_atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Atoms of the lift to `[0, 2π)`, symmetric under `θ ↦ θ + π`.
    pub fn lifted_atoms(&self) -> Vec<(f64, f64)> {
        self.atoms
            .iter()
            .copied()
            .chain(self.atoms.iter().map(|&(t, w)| (t + PI, w)))
            .collect()
    }

    /// `μ̂(2n) = Σ_{θ ∈ [0,π)} w e^{2inθ}`.
    pub fn fourier_coeff(&self, n: i64) -> Complex64 {
        let mut acc = ComplexSum::new();
        for &(t, w) in &self.atoms {
            acc.add(w * Complex64::from_polar(1.0, 2.0 * n as f64 * t));
        }
        acc.value()
    }

    /// `∫_{[0,2π)} e^{imθ}` against the lifted measure.
    pub fn lifted_moment(&self, m: i64) -> Complex64 {
        let mut acc = ComplexSum::new();
        for (t, w) in self.lifted_atoms() {
            acc.add(w * Complex64::from_polar(1.0, m as f64 * t));
        }
        acc.value()
    }

    /// `φ₀(r, θ) = ∫ ((1 − r²)/|r e^{2iθ} − e^{2iα}|²)^δ dμ(α)`.
    pub fn phi0(&self, r: f64, theta: f64, delta: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::NumericDomain(format!("phi0 needs 0 ≤ r < 1, got {r}")));
        }
        let z = Complex64::from_polar(r, 2.0 * theta);
        let mut acc = ExactSum::new();
        for &(a, w) in &self.atoms {
            let den = (z - Complex64::from_polar(1.0, 2.0 * a)).norm_sqr();
            acc.add(w * ((1.0 - r * r) / den).powf(delta));
        }
        Ok(acc.value())
    }

    /// Binned form for plotting: `(bin centre, mass)` over `[0, π)`.
    pub fn histogram(&self, bins: usize) -> Vec<(f64, f64)> {
        let bins = bins.max(1);
        let width = PI / bins as f64;
        let mut mass = vec![ExactSum::new(); bins];
        for &(t, w) in &self.atoms {
            mass[((t / width) as usize).min(bins - 1)].add(w);
        }
        mass.iter()
            .enumerate()
            .map(|(j, m)| ((j as f64 + 0.5) * width, m.value()))
            .collect()
    }
}

/// Patterson–Sullivan style estimate from orbit data. Elements with `t = 0`
/// fix the base point and carry no boundary direction, so they are skipped;
/// if nothing remains the result is a Dirac mass at 0 flagged degenerate.
pub fn ps_estimate(
    orbit: &OrbitSet,
    s: f64,
    mode: PsMode,
    delta_hat: Option<f64>,
) -> Result<BoundaryMeasure> {
    if orbit.is_empty() {
        return Err(Error::Argument("boundary estimate needs a nonempty orbit".into()));
    }
    let t_top = t_radius(orbit.t_cut, orbit.rep_k);
    let atoms: Vec<(f64, f64)> = match mode {
        PsMode::PattersonLimit => orbit
            .elements
            .iter()
            .filter(|p| p.coords.t > 0.0)
            .map(|p| (p.coords.theta1, (-s * p.coords.t).exp()))
            .collect(),
        PsMode::EmpiricalAngular => orbit
            .elements
            .iter()
            .filter(|p| p.coords.t > 0.0 && p.coords.t >= ANGULAR_SHELL * t_top)
            .map(|p| (p.coords.theta1, 1.0))
            .collect(),
    };
    let provenance = match mode {
        PsMode::PattersonLimit => Provenance::PattersonLimit,
        PsMode::EmpiricalAngular => Provenance::EmpiricalAngular,
    };
    let mut mu = if atoms.is_empty() {
        let mut d = BoundaryMeasure::dirac(0.0);
        d.provenance = provenance;
        d.degenerate = true;
        d
    } else {
        BoundaryMeasure::from_atoms(atoms, provenance)?.normalize()?
    };
    if mode == PsMode::PattersonLimit {
        if let Some(d) = delta_hat {
            if s <= d {
                mu.divergence_warning = Some(format!(
                    "s = {s} does not exceed the exponent estimate {d}; the series diverges"
                ));
            }
        }
    }
    Ok(mu)
}

/// Total variation distance between the histograms of two measures.
pub fn histogram_distance(a: &BoundaryMeasure, b: &BoundaryMeasure, bins: usize) -> f64 {
    let (ha, hb) = (a.histogram(bins), b.histogram(bins));
    let (ma, mb) = (a.total_mass.max(f64::MIN_POSITIVE), b.total_mass.max(f64::MIN_POSITIVE));
    0.5 * ha.iter().zip(&hb).map(|(x, y)| (x.1 / ma - y.1 / mb).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::GaussLegendre;
    use crate::orbits::{enumerate, GroupSpec};
    use crate::rep::build_rep;

    #[test]
    fn lebesgue_coefficients() {
        let mu = BoundaryMeasure::lebesgue(1024);
        assert!((mu.fourier_coeff(0) - 1.0).norm() < 1e-15);
        for n in 1..10 {
            assert!(mu.fourier_coeff(n).norm() < 1e-13);
        }
    }

    #[test]
    fn dirac_coefficient() {
        let mu = BoundaryMeasure::dirac(PI / 4.0);
        assert!((mu.fourier_coeff(1) - Complex64::i()).norm() < 1e-15);
        assert!((mu.fourier_coeff(-1) - mu.fourier_coeff(1).conj()).norm() < 1e-15);
    }

    #[test]
    fn lift_identities() {
        let mu = BoundaryMeasure::from_atoms(vec![(0.3, 0.2), (2.9, 0.5), (4.0, 0.3)], Provenance::Custom)
            .unwrap();
        assert!(mu.base_atoms().iter().all(|a| (0.0..PI).contains(&a.0)));
        for n in -4..=4 {
            assert!((mu.lifted_moment(2 * n) - 2.0 * mu.fourier_coeff(n)).norm() < 1e-14);
            assert!(mu.lifted_moment(2 * n + 1).norm() < 1e-12);
        }
        assert!(BoundaryMeasure::from_atoms(vec![(0.0, -1.0)], Provenance::Custom).is_err());
    }

    #[test]
    fn phi0_examples() {
        let leb = BoundaryMeasure::lebesgue(4096);
        assert!((leb.phi0(0.0, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((leb.phi0(0.6, 0.4, 1.0).unwrap() - 1.0).abs() < 1e-12);
        let d = BoundaryMeasure::dirac(0.0);
        assert!((d.phi0(0.5, 0.0, 1.0).unwrap() - 3.0).abs() < 1e-14);
        assert!(d.phi0(1.0, 0.0, 1.0).is_err());
        // quadrature oracle: ∫₀^π P(r,θ;α)^δ dα/π by Gauss–Legendre
        let (r, th, delta) = (0.5, 0.7, 0.75);
        let rule = GaussLegendre::new(200);
        let z = Complex64::from_polar(r, 2.0 * th);
        let oracle = rule.integrate(0.0, PI, |a| {
            ((1.0 - r * r) / (z - Complex64::from_polar(1.0, 2.0 * a)).norm_sqr()).powf(delta)
        }) / PI;
        assert!((leb.phi0(r, th, delta).unwrap() - oracle).abs() < 1e-10);
    }

    #[test]
    fn degenerate_orbit_gives_dirac() {
        let rep = build_rep(&[1]).unwrap();
        let orbit = enumerate(&GroupSpec::sl2z(), &rep, 1.2, &Default::default()).unwrap();
        // SL(2,ℤ) ∩ {‖γ‖ ≤ 1.2} = {±I, ±S}, all rotations
        assert_eq!(orbit.len(), 4);
        let mu = ps_estimate(&orbit, 1.1, PsMode::PattersonLimit, None).unwrap();
        assert!(mu.degenerate);
        assert_eq!(mu.base_atoms(), &[(0.0, 1.0)]);
    }

    #[test]
    fn patterson_is_normalized_and_flags_divergence() {
        let rep = build_rep(&[1]).unwrap();
        let orbit = enumerate(&GroupSpec::sl2z(), &rep, 20.0, &Default::default()).unwrap();
        let mu = ps_estimate(&orbit, 1.05, PsMode::PattersonLimit, Some(1.0)).unwrap();
        assert!((mu.fourier_coeff(0).re - 1.0).abs() < 1e-15);
        assert!(mu.divergence_warning.is_none());
        let mu = ps_estimate(&orbit, 0.9, PsMode::PattersonLimit, Some(1.0)).unwrap();
        assert!(mu.divergence_warning.is_some());
    }

    #[test]
    fn histogram_mass() {
        let atoms = (0..100).map(|j| ((j as f64 + 0.5) * PI / 100.0, 0.01)).collect();
        let mu = BoundaryMeasure::from_atoms(atoms, Provenance::Custom).unwrap();
        let h = mu.histogram(10);
        assert!(h.iter().all(|b| (b.1 - 0.1).abs() < 1e-12));
        assert_eq!(histogram_distance(&mu, &mu, 10), 0.0);
    }
}
