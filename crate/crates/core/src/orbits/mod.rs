//! Discrete subgroups of SL(2,ℝ) and their norm balls
//! `Γ_T = {γ : ‖ρ(γ)‖ ≤ T}`.

mod annuli;
mod enumerate;
mod exponent;
mod spec;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sl2::{CartanCoords, IntMat2, Mat2};

pub use annuli::{partition_annuli, AnnuliPartition};
pub use enumerate::{enumerate, lattice_word, EnumerationOptions};
pub use exponent::{estimate_exponent, estimate_from_orbit, ExponentEstimate, ExponentMethod};
pub use spec::{
    disc_matrix, isometric_disc, ping_pong_certificate, sl2z_generators, Generator, GroupKind,
    GroupSpec, IsometricDisc, PingPongCertificate,
};

/// Relative slack in norm comparisons so boundary elements are classified
/// the same way everywhere.
pub const NORM_SLACK: f64 = 1e-12;

/// Word in the generators: letters are ±(1-based generator index), and
/// `negated` marks a leading factor −I.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    pub negated: bool,
    pub letters: Vec<i32>,
}

impl Word {
    pub fn evaluate(&self, spec: &GroupSpec) -> Mat2 {
        let m = self
            .letters
            .iter()
            .fold(Mat2::identity(), |acc, &l| acc * spec.letter(l));
        if self.negated {
            -m
        } else {
            m
        }
    }
}

impl fmt::Display for Word {
    /// Comma-separated indices; −I is written as a leading `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::with_capacity(self.letters.len() + 1);
        if self.negated {
            parts.push("0".into());
        }
        parts.extend(self.letters.iter().map(|l| l.to_string()));
        write!(f, "{}", parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    pub mat: Mat2,
    pub exact: Option<IntMat2>,
    /// Stored for free groups; lattice words are recovered on demand.
    pub word: Option<Word>,
}

impl GroupElement {
    pub fn word(&self) -> Word {
        match (&self.word, &self.exact) {
            (Some(w), _) => w.clone(),
            (None, Some(m)) => lattice_word(m),
            (None, None) => Word::default(),
        }
    }

    /// True for the representative of `{γ, −γ}` whose first nonzero entry is
    /// positive.
    pub fn is_psl_representative(&self) -> bool {
        if let Some(m) = self.exact {
            let first = [m.a, m.b, m.c, m.d].into_iter().find(|&x| x != 0).unwrap_or(1);
            return first > 0;
        }
        let first = self.mat.entries().into_iter().find(|&x| x != 0.0).unwrap_or(1.0);
        first > 0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitPoint {
    pub elem: GroupElement,
    pub coords: CartanCoords,
}

impl OrbitPoint {
    pub fn new(elem: GroupElement) -> Self {
        let coords = crate::sl2::kak_decompose(&elem.mat);
        Self { elem, coords }
    }

    /// `‖ρ(γ)‖ = e^{kt/2}`.
    pub fn norm(&self, k: usize) -> f64 {
        (0.5 * k as f64 * self.coords.t).exp()
    }
}

/// Norm ball of a group, sorted by Cartan `t` (ties broken by entries).
#[derive(Clone, Debug)]
pub struct OrbitSet {
    pub elements: Vec<OrbitPoint>,
    /// Cutoff on `‖ρ(γ)‖`.
    pub t_cut: f64,
    pub rep_k: usize,
    pub dedup_count: usize,
    /// Whether −I belongs to the group.
    pub contains_minus_one: bool,
    pub kind: GroupKind,
}

/// Largest Cartan `t` with `e^{kt/2} ≤ big_t`, including the comparison slack.
pub fn t_radius(big_t: f64, k: usize) -> f64 {
    2.0 * (big_t * (1.0 + NORM_SLACK)).ln() / k as f64
}

impl OrbitSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements with `‖ρ(γ)‖ ≤ big_t`, which must not exceed the cutoff.
    pub fn ball(&self, big_t: f64) -> Result<&[OrbitPoint]> {
        if big_t > self.t_cut * (1.0 + NORM_SLACK) {
            return Err(Error::Coverage {
                required: big_t,
                available: self.t_cut,
            });
        }
        if big_t < 1.0 {
            return Ok(&self.elements[..0]);
        }
        let tr = t_radius(big_t, self.rep_k);
        let n = self.elements.partition_point(|p| p.coords.t <= tr);
        Ok(&self.elements[..n])
    }

    pub fn count_within(&self, big_t: f64) -> Result<usize> {
        self.ball(big_t).map(|b| b.len())
    }

    /// Index of the element equal to `g` (up to 1e−8 relative), if present.
    pub fn find(&self, g: &Mat2) -> Option<usize> {
        let t = crate::sl2::kak_decompose(g).t;
        let lo = self.elements.partition_point(|p| p.coords.t < t - 1e-7);
        let scale = g.op_norm().max(1.0);
        self.elements[lo..]
            .iter()
            .take_while(|p| p.coords.t <= t + 1e-7)
            .position(|p| p.elem.mat.max_abs_diff(g) <= 1e-8 * scale)
            .map(|i| i + lo)
    }

    /// For each index pair whose product stays in the ball, checks that the
    /// product was enumerated.
    pub fn closure_check(&self, pairs: &[(usize, usize)]) -> ClosureReport {
        let tr = t_radius(self.t_cut, self.rep_k);
        let mut report = ClosureReport::default();
        for &(i, j) in pairs {
            let (x, y) = (&self.elements[i].elem, &self.elements[j].elem);
            let prod = x.mat * y.mat;
            let t = crate::sl2::kak_decompose(&prod).t;
            // skip products straddling the boundary within rounding
            if t > tr - 1e-9 {
                continue;
            }
            report.tested += 1;
            let found = match (x.exact, y.exact) {
                (Some(a), Some(b)) => {
                    let p = a * b;
                    self.find(&prod)
                        .is_some_and(|k| self.elements[k].elem.exact == Some(p))
                }
                _ => self.find(&prod).is_some(),
            };
            if !found {
                report.missing.push((i, j));
            }
        }
        report
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ClosureReport {
    pub tested: usize,
    pub missing: Vec<(usize, usize)>,
}

pub(crate) fn sort_points(points: &mut [OrbitPoint]) {
    points.sort_by(|p, q| {
        p.coords
            .t
            .total_cmp(&q.coords.t)
            .then_with(|| {
                let (x, y) = (p.elem.mat.entries(), q.elem.mat.entries());
                x.iter()
                    .zip(&y)
                    .map(|(a, b)| a.total_cmp(b))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    });
}
