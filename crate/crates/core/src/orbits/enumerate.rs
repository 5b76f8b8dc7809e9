//! Enumeration of norm balls.
//!
//! Lattices are enumerated exhaustively over integer matrices with bounded
//! Frobenius norm. Free groups are enumerated breadth-first over reduced
//! words: every extension of a reduced word `w = x₁⋯x_L` maps the base point
//! into the half-plane `x₁⋯x_{L−1}(D(x_L⁻¹))` cut out by an isometric circle,
//! so the hyperbolic distance from `o` to that half-plane is a lower bound
//! for `t` along the whole subtree and is used to prune it.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use super::{sort_points, t_radius, GroupElement, GroupKind, GroupSpec, OrbitPoint, OrbitSet, Word};
use crate::error::{Error, Result};
use crate::rep::RepSpace;
use crate::sl2::{IntMat2, Mat2};

#[derive(Clone, Copy, Debug)]
pub struct EnumerationOptions {
    /// Maximum number of stored elements plus frontier words.
    pub budget: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self { budget: 20_000_000 }
    }
}

/// All `γ ∈ Γ` with `‖ρ(γ)‖ ≤ big_t`.
pub fn enumerate(
    spec: &GroupSpec,
    rep: &RepSpace,
    big_t: f64,
    opts: &EnumerationOptions,
) -> Result<OrbitSet> {
    if rep.k == 0 {
        return Err(Error::Argument("enumeration needs a representation with k ≥ 1".into()));
    }
    if !(big_t.is_finite() && big_t > 0.0) {
        return Err(Error::Argument(format!("cutoff must be positive, got {big_t}")));
    }
    let k = rep.k;
    let (mut elements, dedup_count) = if big_t < 1.0 {
        (Vec::new(), 0)
    } else {
        match spec.kind {
            GroupKind::ArithmeticLattice => (enumerate_lattice(spec.level, big_t, k, opts.budget)?, 0),
            GroupKind::FreeGroup | GroupKind::Schottky => enumerate_free(spec, big_t, k, opts.budget)?,
        }
    };
    sort_points(&mut elements);
    Ok(OrbitSet {
        elements,
        t_cut: big_t,
        rep_k: k,
        dedup_count,
        contains_minus_one: spec.kind == GroupKind::ArithmeticLattice || spec.include_minus_one,
        kind: spec.kind,
    })
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.signum() * a, a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        // a = q b + r with q = div_euclid
        (g, y, x - a.div_euclid(b) * y)
    }
}

fn enumerate_lattice(level: u64, big_t: f64, k: usize, budget: usize) -> Result<Vec<OrbitPoint>> {
    // |γ| ≤ s  ⇔  a²+b²+c²+d² = |γ|² + |γ|⁻² ≤ s² + s⁻²
    let s = big_t.powf(1.0 / k as f64);
    let x = s * s + 1.0 / (s * s);
    let xi = (x + 1e-9 * x.max(1.0)).floor() as i128;
    let amax = (xi as f64).sqrt().floor() as i64;
    let level = level as i64;
    let count = AtomicUsize::new(0);
    let rows: Vec<Vec<IntMat2>> = (-amax..=amax)
        .into_par_iter()
        .map(|a| {
            let mut row = Vec::new();
            if count.load(Ordering::Relaxed) > budget {
                return row;
            }
            let rem_a = xi - (a as i128) * (a as i128);
            let bmax = (rem_a as f64).sqrt().floor() as i64 + 1;
            for b in -bmax..=bmax {
                let ab = (a as i128).pow(2) + (b as i128).pow(2);
                if ab > xi {
                    continue;
                }
                let (g, x0, y0) = ext_gcd(a, b);
                if g != 1 {
                    continue;
                }
                // a·d − b·c = 1 along (c, d) = (c₀ + j a, d₀ + j b)
                let (c0, d0) = (-y0, x0);
                let y_rem = xi - ab;
                let aa = ab as f64;
                let bb = (a * c0 + b * d0) as f64;
                let cc = ((c0 as i128).pow(2) + (d0 as i128).pow(2) - y_rem) as f64;
                let centre = -bb / aa;
                let half = (bb * bb - aa * cc).max(0.0).sqrt() / aa;
                let lo = (centre - half).floor() as i64 - 1;
                let hi = (centre + half).ceil() as i64 + 1;
                for j in lo..=hi {
                    let c = c0 + j * a;
                    let d = d0 + j * b;
                    if (c as i128).pow(2) + (d as i128).pow(2) <= y_rem && c % level == 0 {
                        row.push(IntMat2::new(a, b, c, d));
                    }
                }
            }
            count.fetch_add(row.len(), Ordering::Relaxed);
            row
        })
        .collect();
    let produced = count.load(Ordering::Relaxed);
    if produced > budget {
        return Err(Error::Budget {
            budget,
            produced,
            progress: format!("lattice search over |a| ≤ {amax}"),
        });
    }
    let tr = t_radius(big_t, k);
    let points = rows
        .into_iter()
        .flatten()
        .map(|m| {
            OrbitPoint::new(GroupElement {
                mat: m.to_f64(),
                exact: Some(m),
                word: None,
            })
        })
        .filter(|p| p.coords.t <= tr)
        .collect();
    Ok(points)
}

/// Word in `S = [[0,−1],[1,0]]` (letter 1) and `T = [[1,1],[0,1]]`
/// (letter 2) representing an element of SL(2,ℤ).
pub fn lattice_word(m: &IntMat2) -> Word {
    let mut g = *m;
    let mut letters = Vec::new();
    loop {
        if g.c == 0 {
            // g = ±T^j
            let sign = g.a;
            let j = g.b * sign;
            letters.extend(std::iter::repeat_n(2 * j.signum() as i32, j.unsigned_abs() as usize));
            return Word {
                negated: sign < 0,
                letters,
            };
        }
        // g = T^q·S·g' with |c'| < |c|
        let q = g.a / g.c;
        letters.extend(std::iter::repeat_n(2 * q.signum() as i32, q.unsigned_abs() as usize));
        let (a1, b1) = (g.a - q * g.c, g.b - q * g.d);
        letters.push(1);
        g = IntMat2::new(g.c, g.d, -a1, -b1);
    }
}

struct Node {
    letters: Vec<i32>,
    mat: Mat2,
}

/// Boundary endpoints of `D(l⁻¹)` as projective vectors in the half-plane
/// picture: disc angle `φ` corresponds to the real line point with
/// homogeneous coordinates `(cos(φ/2), −sin(φ/2))`.
struct LetterRegion {
    letter: i32,
    mat: Mat2,
    v1: (f64, f64),
    v2: (f64, f64),
    cross: f64,
}

impl LetterRegion {
    /// Distance from `o` to `prefix(D(l⁻¹))`. The angle between the two image
    /// lines satisfies `sin φ = |v₁ × v₂| / (|P v₁| |P v₂|)` because `det P = 1`.
    fn distance_through(&self, prefix: &Mat2) -> f64 {
        let apply = |(x, y): (f64, f64)| (prefix.a * x + prefix.b * y, prefix.c * x + prefix.d * y);
        let (p1, p2) = (apply(self.v1), apply(self.v2));
        let ratio = p1.0.hypot(p1.1) * p2.0.hypot(p2.1) / self.cross;
        if ratio <= 1.0 {
            0.0
        } else {
            ratio.acosh()
        }
    }
}

fn letter_regions(spec: &GroupSpec) -> Result<Vec<LetterRegion>> {
    let mut out = Vec::new();
    for gi in 1..=spec.rank() as i32 {
        for l in [gi, -gi] {
            let mat = spec.letter(l);
            let disc = super::isometric_disc(&mat.inverse())?;
            let (b1, b2) = disc.endpoint_angles();
            let v = |phi: f64| ((0.5 * phi).cos(), -(0.5 * phi).sin());
            let (v1, v2) = (v(b1), v(b2));
            let cross = (v1.0 * v2.1 - v1.1 * v2.0).abs();
            out.push(LetterRegion {
                letter: l,
                mat,
                v1,
                v2,
                cross,
            });
        }
    }
    Ok(out)
}

fn enumerate_free(spec: &GroupSpec, big_t: f64, k: usize, budget: usize) -> Result<(Vec<OrbitPoint>, usize)> {
    if spec.certificate.is_none() {
        super::ping_pong_certificate(&spec.generators)?;
    }
    let regions = letter_regions(spec)?;
    let tr = t_radius(big_t, k);
    let prune_at = tr + 1e-7;
    let mut points = Vec::new();
    let mut dedup = 0usize;
    let mut frontier = vec![Node {
        letters: Vec::new(),
        mat: Mat2::identity(),
    }];
    let mut depth = 0usize;
    let push = |points: &mut Vec<OrbitPoint>, node: &Node| {
        let word = Word {
            negated: false,
            letters: node.letters.clone(),
        };
        let p = OrbitPoint::new(GroupElement {
            mat: node.mat,
            exact: None,
            word: Some(word.clone()),
        });
        if p.coords.t > tr {
            return;
        }
        if spec.include_minus_one {
            let neg = OrbitPoint::new(GroupElement {
                mat: -node.mat,
                exact: None,
                word: Some(Word {
                    negated: true,
                    letters: word.letters,
                }),
            });
            points.push(p);
            points.push(neg);
        } else {
            points.push(p);
        }
    };
    push(&mut points, &frontier[0]);
    while !frontier.is_empty() {
        depth += 1;
        let children: Vec<(Vec<Node>, usize)> = frontier
            .par_iter()
            .map(|node| {
                let last = node.letters.last().copied();
                let mut kids = Vec::new();
                let mut skipped = 0;
                for r in &regions {
                    if last == Some(-r.letter) {
                        skipped += 1;
                        continue;
                    }
                    if r.distance_through(&node.mat) > prune_at {
                        continue;
                    }
                    let mut letters = node.letters.clone();
                    letters.push(r.letter);
                    kids.push(Node {
                        letters,
                        mat: node.mat * r.mat,
                    });
                }
                (kids, skipped)
            })
            .collect();
        frontier = Vec::with_capacity(children.iter().map(|c| c.0.len()).sum());
        for (kids, skipped) in children {
            dedup += skipped;
            frontier.extend(kids);
        }
        for node in &frontier {
            push(&mut points, node);
        }
        if points.len() + frontier.len() > budget {
            return Err(Error::Budget {
                budget,
                produced: points.len(),
                progress: format!("word length {depth}, frontier {}", frontier.len()),
            });
        }
    }
    Ok((points, dedup))
}
