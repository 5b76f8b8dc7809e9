//! Exact floating-point accumulation.
//!
//! Sums are kept as a list of non-overlapping partials (Shewchuk's
//! algorithm) and rounded once on read-out, so the result is the correctly
//! rounded value of the exact sum. It does not depend on the order in which
//! terms were added or on how partial accumulators were merged, which is what
//! makes parallel reductions and annulus-by-annulus sums bit-identical.

use num_complex::Complex64;
use rayon::prelude::*;

#[derive(Clone, Debug, Default)]
pub struct ExactSum {
    partials: Vec<f64>,
    // inf/nan terms bypass the partials
    special: f64,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        if !value.is_finite() {
            self.special += value;
            return;
        }
        let mut x = value;
        let mut kept = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        self.partials.truncate(kept);
        self.partials.push(x);
    }

    pub fn merge(&mut self, other: &ExactSum) {
        for &p in &other.partials {
            self.add(p);
        }
        self.special += other.special;
    }

    /// Correctly rounded value of the accumulated sum.
    pub fn value(&self) -> f64 {
        if self.special != 0.0 || self.special.is_nan() {
            return self.special;
        }
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            let y = p[n - 1];
            n -= 1;
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        // half-way case: the remaining partials decide the rounding direction
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            let yr = x - hi;
            if y == yr {
                hi = x;
            }
        }
        hi
    }
}

impl Extend<f64> for ExactSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

impl FromIterator<f64> for ExactSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = ExactSum::new();
        s.extend(iter);
        s
    }
}

#[derive(Clone, Debug, Default)]
pub struct ComplexSum {
    pub re: ExactSum,
    pub im: ExactSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn merge(&mut self, other: &ComplexSum) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Parallel exact sum of `f` over `items`. The result is independent of the
/// number of worker threads.
pub fn par_sum<T, F>(items: &[T], f: F) -> ComplexSum
where
    T: Sync,
    F: Fn(&T) -> Complex64 + Sync,
{
    items
        .par_chunks(4096)
        .map(|chunk| {
            let mut acc = ComplexSum::new();
            for item in chunk {
                acc.add(f(item));
            }
            acc
        })
        .reduce(ComplexSum::new, |mut a, b| {
            a.merge(&b);
            a
        })
}
