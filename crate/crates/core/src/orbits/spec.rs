//! Group specifications and the ping-pong certificate for free groups.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sl2::{IntMat2, Mat2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupKind {
    /// SL(2,ℤ) or the congruence subgroup Γ₀(N).
    ArithmeticLattice,
    FreeGroup,
    Schottky,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub mat: Mat2,
    pub exact: Option<IntMat2>,
}

impl Generator {
    pub fn real(mat: Mat2) -> Self {
        Self { mat, exact: None }
    }

    pub fn integer(m: IntMat2) -> Self {
        Self {
            mat: m.to_f64(),
            exact: Some(m),
        }
    }
}

/// Isometric-circle disc of a free generator in the disc model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsometricDisc {
    pub center: Complex64,
    pub radius: f64,
}

impl IsometricDisc {
    /// Boundary angles (in the disc) where the circle meets the unit circle.
    pub fn endpoint_angles(&self) -> (f64, f64) {
        let c = self.center.norm();
        let phi = (1.0 / c).clamp(-1.0, 1.0).acos();
        let arg = self.center.arg();
        (arg - phi, arg + phi)
    }
}

/// Ping-pong data for a free generating set: the discs of each generator
/// and its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct PingPongCertificate {
    /// `discs[2i]` belongs to generator `i`, `discs[2i+1]` to its inverse.
    pub discs: Vec<IsometricDisc>,
    /// Smallest Euclidean gap between two distinct discs.
    pub min_gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupSpec {
    pub kind: GroupKind,
    pub generators: Vec<Generator>,
    pub include_minus_one: bool,
    /// Congruence level `N` for Γ₀(N) (1 for SL(2,ℤ)); ignored for free groups.
    pub level: u64,
    pub certificate: Option<PingPongCertificate>,
}

/// `S = [[0,−1],[1,0]]` and `T = [[1,1],[0,1]]`.
pub fn sl2z_generators() -> Vec<Generator> {
    vec![
        Generator::integer(IntMat2::new(0, -1, 1, 0)),
        Generator::integer(IntMat2::new(1, 1, 0, 1)),
    ]
}

impl GroupSpec {
    pub fn sl2z() -> Self {
        Self::congruence(1).expect("level 1 is valid")
    }

    /// Γ₀(N) = {c ≡ 0 mod N} inside SL(2,ℤ). Words are written in the
    /// SL(2,ℤ) generators S, T.
    pub fn congruence(level: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::Spec("congruence level must be positive".into()));
        }
        Ok(Self {
            kind: GroupKind::ArithmeticLattice,
            generators: sl2z_generators(),
            include_minus_one: true,
            level,
            certificate: None,
        })
    }

    /// Free group on the given generators, validated by the ping-pong
    /// certificate.
    pub fn free(kind: GroupKind, generators: Vec<Generator>, include_minus_one: bool) -> Result<Self> {
        if kind == GroupKind::ArithmeticLattice {
            return Err(Error::Spec("use GroupSpec::congruence for lattices".into()));
        }
        if generators.is_empty() {
            return Err(Error::Spec("a free group needs at least one generator".into()));
        }
        for (i, g) in generators.iter().enumerate() {
            if !g.mat.is_sl2() {
                return Err(Error::Spec(format!(
                    "generator {} has determinant {}",
                    i + 1,
                    g.mat.det()
                )));
            }
        }
        let certificate = ping_pong_certificate(&generators)?;
        Ok(Self {
            kind,
            generators,
            include_minus_one,
            level: 1,
            certificate: Some(certificate),
        })
    }

    /// Two-generator Schottky group with critical exponent ≈ 0.75 used as
    /// the fixed test instance: `a = diag(3, 1/3)` and `b = h·k·diag(5/2, 2/5)·k⁻¹·h⁻¹`
    /// with `k = k_{π/4}`, `h = a_{0.15}`.
    pub fn reference_schottky() -> Self {
        let a = Mat2::new(3.0, 0.0, 0.0, 1.0 / 3.0);
        let k = Mat2::rotation(std::f64::consts::FRAC_PI_4);
        let h = Mat2::diagonal(0.15);
        let b = h * k * Mat2::new(2.5, 0.0, 0.0, 0.4) * k.inverse() * h.inverse();
        Self::free(GroupKind::Schottky, vec![Generator::real(a), Generator::real(b)], true)
            .expect("reference instance satisfies the ping-pong certificate")
    }

    /// Letter `l` (±1-based generator index) as a matrix.
    pub fn letter(&self, l: i32) -> Mat2 {
        let g = self.generators[l.unsigned_abs() as usize - 1].mat;
        if l > 0 {
            g
        } else {
            g.inverse()
        }
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }
}

/// Conjugate of `g` by the Cayley map `z ↦ (z−i)/(z+i)`, as a complex 2×2
/// matrix `[[p, q], [r, s]]` acting on the unit disc.
pub fn disc_matrix(g: &Mat2) -> [[Complex64; 2]; 2] {
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let c = [[one, -i], [one, i]];
    // C⁻¹ = (1/2i)·[[i, i], [−1, 1]]
    let half = one / (2.0 * i);
    let cinv = [[half * i, half * i], [-half, half]];
    let gm = [
        [Complex64::new(g.a, 0.0), Complex64::new(g.b, 0.0)],
        [Complex64::new(g.c, 0.0), Complex64::new(g.d, 0.0)],
    ];
    mul2(&mul2(&c, &gm), &cinv)
}

fn mul2(x: &[[Complex64; 2]; 2], y: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

/// Disc bounded by the isometric circle `|r w + s| = 1` of `g`.
pub fn isometric_disc(g: &Mat2) -> Result<IsometricDisc> {
    let [[_, _], [r, s]] = disc_matrix(g);
    if r.norm() < 1e-12 {
        return Err(Error::Spec(format!("generator {g:?} fixes the base point")));
    }
    Ok(IsometricDisc {
        center: -s / r,
        radius: 1.0 / r.norm(),
    })
}

pub fn ping_pong_certificate(generators: &[Generator]) -> Result<PingPongCertificate> {
    let mut discs = Vec::with_capacity(2 * generators.len());
    for g in generators {
        discs.push(isometric_disc(&g.mat)?);
        discs.push(isometric_disc(&g.mat.inverse())?);
    }
    let mut min_gap = f64::INFINITY;
    for i in 0..discs.len() {
        for j in i + 1..discs.len() {
            let gap = (discs[i].center - discs[j].center).norm() - discs[i].radius - discs[j].radius;
            if gap <= 0.0 {
                return Err(Error::Spec(format!(
                    "ping-pong certificate failed: discs {} and {} overlap (gap {gap:.3e})",
                    disc_label(i),
                    disc_label(j)
                )));
            }
            min_gap = min_gap.min(gap);
        }
    }
    Ok(PingPongCertificate { discs, min_gap })
}

fn disc_label(i: usize) -> String {
    let g = i / 2 + 1;
    if i.is_multiple_of(2) {
        format!("{g}")
    } else {
        format!("{g}^-1")
    }
}
