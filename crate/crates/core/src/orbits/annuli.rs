//! Radial partition of a norm ball into annuli
//! `S_{T,j} = {γ : (j/N)T < ‖ρ(γ)‖ ≤ ((j+1)/N)T}`.

use serde::Serialize;

use super::OrbitSet;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnnuliPartition {
    pub n: usize,
    pub big_t: f64,
    /// Orbit indices in each cell, in orbit order.
    pub cells: Vec<Vec<usize>>,
    /// `M_{T,j} = (T/N)^{2δ/k}((j+1)^{2δ/k} − j^{2δ/k})`.
    pub m_values: Vec<f64>,
}

impl AnnuliPartition {
    pub fn sizes(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }
}

/// Partition of the whole orbit (cutoff `T = orbit.t_cut`).
pub fn partition_annuli(orbit: &OrbitSet, n: usize, delta: f64) -> Result<AnnuliPartition> {
    if n == 0 {
        return Err(Error::Argument("annuli partition needs N ≥ 1".into()));
    }
    let big_t = orbit.t_cut;
    let k = orbit.rep_k;
    let nf = n as f64;
    let mut cells = vec![Vec::new(); n];
    for (idx, p) in orbit.elements.iter().enumerate() {
        let x = p.norm(k);
        let mut j = ((nf * x / big_t).ceil() as usize).saturating_sub(1).min(n - 1);
        // settle rounding at cell boundaries against the defining inequality
        while j > 0 && x <= j as f64 * big_t / nf {
            j -= 1;
        }
        while j + 1 < n && x > (j + 1) as f64 * big_t / nf {
            j += 1;
        }
        cells[j].push(idx);
    }
    let e = 2.0 * delta / k as f64;
    let m_values = (0..n)
        .map(|j| (big_t / nf).powf(e) * ((j + 1) as f64).powf(e) - (big_t / nf).powf(e) * (j as f64).powf(e))
        .collect();
    Ok(AnnuliPartition {
        n,
        big_t,
        cells,
        m_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::{enumerate, GroupSpec};
    use crate::rep::build_rep;

    #[test]
    fn cells_partition_the_ball() {
        let rep = build_rep(&[1]).unwrap();
        let orbit = enumerate(&GroupSpec::sl2z(), &rep, 10.0, &Default::default()).unwrap();
        for n in [1, 3, 10, 64] {
            let part = partition_annuli(&orbit, n, 1.0).unwrap();
            assert_eq!(part.sizes().iter().sum::<usize>(), orbit.len());
            for (j, cell) in part.cells.iter().enumerate() {
                for &i in cell {
                    let x = orbit.elements[i].norm(1);
                    assert!(x > j as f64 * 10.0 / n as f64 && x <= (j + 1) as f64 * 10.0 / n as f64 + 1e-12);
                }
            }
        }
        assert!(partition_annuli(&orbit, 0, 1.0).is_err());
    }

    #[test]
    fn m_values_formula() {
        let rep = build_rep(&[1]).unwrap();
        let orbit = enumerate(&GroupSpec::sl2z(), &rep, 16.0, &Default::default()).unwrap();
        let part = partition_annuli(&orbit, 4, 1.0).unwrap();
        for (j, m) in part.m_values.iter().enumerate() {
            assert!((m - 16.0 * (2 * j + 1) as f64).abs() < 1e-10);
        }
    }
}
