pub mod connections;
pub mod dsl;
pub mod error;
pub mod exact_algebra;
pub mod frobenius;
pub mod hodge_bundle;
pub mod mirror_bridge;
pub mod numeric;
pub mod pf_operator;
pub mod presets;
pub mod qforms;

pub use error::{Error, Result};
