//! Bundled operator documents.

use crate::error::{Error, Result};
use crate::pf_operator::{OperatorDocument, PFOperator};

const DOCS: [(&str, &str); 5] = [
    ("quartic", include_str!("../presets/quartic.toml")),
    ("legendre", include_str!("../presets/legendre.toml")),
    ("cubic", include_str!("../presets/cubic.toml")),
    ("quintic", include_str!("../presets/quintic.toml")),
    ("vhs14", include_str!("../presets/vhs14.toml")),
];

pub fn names() -> Vec<&'static str> {
    DOCS.iter().map(|(n, _)| *n).collect()
}

pub fn source(name: &str) -> Result<&'static str> {
    DOCS.iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| Error::Invalid(format!("unknown preset '{name}'; available: {}", names().join(", "))))
}

pub fn document(name: &str) -> Result<OperatorDocument> {
    OperatorDocument::from_str_auto(source(name)?)
}

pub fn operator(name: &str) -> Result<PFOperator> {
    document(name)?.to_operator()
}
