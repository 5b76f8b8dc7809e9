//! Finite-dimensional real representations of SL(2,ℝ).
//!
//! The irreducible of highest weight `n` is realized on degree-`n`
//! polynomials in `e₁, e₂` with `g` acting by `e₁ ↦ a e₁ + c e₂`,
//! `e₂ ↦ b e₁ + d e₂`. The standard basis is `v_i = √C(n,i)·e₁^{n−i}e₂^i`:
//! it is orthonormal for the K-invariant inner product, `v₀` is the
//! highest-weight vector and lowering acts by `f·v_i = c_i v_{i+1}` with
//! `c_i = √((n−i)(i+1))`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::sl2::Mat2;

/// Endomorphism of the representation space in the standard basis.
pub type EndV = DMatrix<f64>;

#[derive(Clone, Debug, PartialEq)]
pub struct Irrep {
    pub n: usize,
    /// Diagonal of the change of basis from monomials to the standard basis,
    /// `m_i = v_i / √C(n,i)`.
    pub basis_scale: Vec<f64>,
}

impl Irrep {
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn weights(&self) -> Vec<i64> {
        (0..=self.n).map(|i| self.n as i64 - 2 * i as i64).collect()
    }

    /// Change of basis as a full matrix.
    pub fn basis_transform(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.basis_scale.clone()))
    }

    /// Lowering coefficient `c_i = √((n−i)(i+1))`.
    pub fn lowering_coeff(&self, i: usize) -> f64 {
        (((self.n - i) * (i + 1)) as f64).sqrt()
    }

    /// Raising coefficient `d_i = √(i(n−i+1))`.
    pub fn raising_coeff(&self, i: usize) -> f64 {
        ((i * (self.n + 1 - i)) as f64).sqrt()
    }

    /// Writes ρ_n(g) into `out` (a `(n+1)×(n+1)` block).
    fn write_action(&self, g: &Mat2, out: &mut nalgebra::DMatrixViewMut<f64>) {
        let n = self.n;
        // powers of the images of e₁ and e₂ as coefficient vectors in e₁^{n−j}e₂^j
        let col1 = power_table(g.a, g.c, n);
        let col2 = power_table(g.b, g.d, n);
        for i in 0..=n {
            let p = &col1[n - i];
            let q = &col2[i];
            let mut prod = vec![0.0; n + 1];
            for (u, pu) in p.iter().enumerate() {
                for (v, qv) in q.iter().enumerate() {
                    prod[u + v] += pu * qv;
                }
            }
            for (j, m) in prod.iter().enumerate() {
                out[(j, i)] = m * self.basis_scale[i] / self.basis_scale[j];
            }
        }
    }
}

// table[p][j] = coefficient of e₁^{p−j}e₂^j in (x e₁ + y e₂)^p
fn power_table(x: f64, y: f64, n: usize) -> Vec<Vec<f64>> {
    let mut table = vec![vec![1.0]];
    for p in 1..=n {
        let prev = &table[p - 1];
        let mut next = vec![0.0; p + 1];
        for (j, c) in prev.iter().enumerate() {
            next[j] += c * x;
            next[j + 1] += c * y;
        }
        table.push(next);
    }
    table
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

pub fn build_irrep(n: usize) -> Irrep {
    Irrep {
        n,
        basis_scale: (0..=n).map(|i| binomial(n, i).sqrt()).collect(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RepSpace {
    pub parts: Vec<Irrep>,
    /// Highest weight.
    pub k: usize,
    /// Multiplicity of the weight-`k` summand.
    pub m: usize,
    pub dim: usize,
    offsets: Vec<usize>,
    pub p_k: EndV,
}

pub fn build_rep(weights: &[usize]) -> Result<RepSpace> {
    if weights.is_empty() {
        return Err(Error::Argument("representation needs at least one weight".into()));
    }
    let parts: Vec<Irrep> = weights.iter().map(|&n| build_irrep(n)).collect();
    let k = *weights.iter().max().unwrap();
    let m = weights.iter().filter(|&&n| n == k).count();
    let mut offsets = Vec::with_capacity(parts.len());
    let mut dim = 0;
    for p in &parts {
        offsets.push(dim);
        dim += p.dim();
    }
    let mut p_k = DMatrix::zeros(dim, dim);
    for (p, &off) in parts.iter().zip(&offsets) {
        // highest-weight line of each copy of V_k
        if p.n == k {
            p_k[(off, off)] = 1.0;
        }
    }
    Ok(RepSpace {
        parts,
        k,
        m,
        dim,
        offsets,
        p_k,
    })
}

impl RepSpace {
    pub fn weights(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.n).collect()
    }

    /// ρ(g) in the standard basis.
    pub fn apply(&self, g: &Mat2) -> EndV {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for (p, &off) in self.parts.iter().zip(&self.offsets) {
            let d = p.dim();
            let mut block = out.view_mut((off, off), (d, d));
            p.write_action(g, &mut block);
        }
        out
    }

    /// ρ(−1): `±1` on each summand by the parity of its weight.
    pub fn rho_minus_one(&self) -> EndV {
        let mut diag = Vec::with_capacity(self.dim);
        for p in &self.parts {
            let s = if p.n % 2 == 0 { 1.0 } else { -1.0 };
            diag.extend(std::iter::repeat_n(s, p.dim()));
        }
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag))
    }

    /// Operator norm of ρ(g); equals `|g|^k`.
    pub fn norm_of(&self, g_abs: f64) -> f64 {
        g_abs.powi(self.k as i32)
    }

    fn lie_blocks<F: Fn(&Irrep, &mut nalgebra::DMatrixViewMut<f64>)>(&self, fill: F) -> EndV {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for (p, &off) in self.parts.iter().zip(&self.offsets) {
            let d = p.dim();
            fill(p, &mut out.view_mut((off, off), (d, d)));
        }
        out
    }

    /// dρ(h) for `h = diag(1, −1)`.
    pub fn lie_h(&self) -> EndV {
        self.lie_blocks(|p, b| {
            for i in 0..=p.n {
                b[(i, i)] = p.n as f64 - 2.0 * i as f64;
            }
        })
    }

    /// dρ(e) for `e = [[0,1],[0,0]]`: `e·v_i = d_i v_{i−1}`.
    pub fn lie_e(&self) -> EndV {
        self.lie_blocks(|p, b| {
            for i in 1..=p.n {
                b[(i - 1, i)] = p.raising_coeff(i);
            }
        })
    }

    /// dρ(f) for `f = [[0,0],[1,0]]`: `f·v_i = c_i v_{i+1}`.
    pub fn lie_f(&self) -> EndV {
        self.lie_blocks(|p, b| {
            for i in 0..p.n {
                b[(i + 1, i)] = p.lowering_coeff(i);
            }
        })
    }

    /// Whether weight `k−1` occurs, which controls the rate at which
    /// `ρ(a_t)/‖ρ(a_t)‖` approaches `P_k`.
    pub fn has_subleading_weight(&self) -> bool {
        self.k >= 1 && self.parts.iter().any(|p| p.n + 1 == self.k)
    }

    /// Bound on `‖ρ(a_t)/‖ρ(a_t)‖ − P_k‖`.
    pub fn gap_bound(&self, t: f64) -> f64 {
        if self.has_subleading_weight() {
            (-0.5 * t).exp()
        } else {
            (-t).exp()
        }
    }
}

/// Largest singular value.
pub fn op_norm(m: &EndV) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.shape() == (2, 2) {
        let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        return 0.5 * ((a + d).hypot(b - c) + (a - d).hypot(b + c));
    }
    m.singular_values().max()
}
