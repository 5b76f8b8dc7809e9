//! Empirical matrix-point sums and the limit integrals they converge to.

mod empirical;
mod integral;
mod test_fn;

pub use empirical::{
    boundary_pair, compare_limit, empirical_avg, empirical_avg_annuli, fit_mass_constant,
    marginal_a_distribution, sector_sum, ComparisonReport,
};
pub use integral::{homogeneity_check, limit_integral, v_gamma, LimitSpec, Quadrature, RadialDomain};
pub use test_fn::{builtin_suite, by_name, symmetrize, Evaluator, Holder, TestFunction};
