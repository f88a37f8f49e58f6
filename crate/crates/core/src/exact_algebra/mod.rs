//! Exact rationals, polynomials, rational functions and truncated series.

pub mod fracexp;
pub mod logseries;
pub mod mp;
pub mod poly;
pub mod ratfunc;
pub mod rational;
pub mod series;

pub use fracexp::{FracExpSeries, QExpansion};
pub use logseries::LogSeries;
pub use mp::MpComplex;
pub use poly::Poly;
pub use ratfunc::RatFunc;
pub use rational::BigQ;
pub use series::{Coeff, PowerSeries};
