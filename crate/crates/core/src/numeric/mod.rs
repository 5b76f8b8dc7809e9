//! Small numerical building blocks shared by the higher level modules.

pub mod fit;
pub mod quad;
pub mod sum;

pub use fit::{linear_fit, LinearFit};
pub use quad::GaussLegendre;
pub use sum::{par_sum, ComplexSum, ExactSum};
