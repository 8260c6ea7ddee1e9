//! Model files shipped with the crate.

use super::{parse_model, RationalMatrix};

/// `(name, file contents)`: the 2x2 pair `h1`/`h2` and the 3x3 pair `h3`/`h4`.
pub const BUNDLED_MODELS: [(&str, &str); 4] = [
    ("h1", include_str!("../../models/h1.tf")),
    ("h2", include_str!("../../models/h2.tf")),
    ("h3", include_str!("../../models/h3.tf")),
    ("h4", include_str!("../../models/h4.tf")),
];

/// Parsed bundled model by name.
pub fn bundled_model(name: &str) -> Option<RationalMatrix> {
    BUNDLED_MODELS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| parse_model(text).expect("bundled models parse"))
}
