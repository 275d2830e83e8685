//! Documents compiled into the binary, available through `--fixture NAME`.

use crate::error::{Error, Result};

pub const FIXTURES: &[(&str, &str)] = &[
    ("anosov", include_str!("../../fixtures/anosov.json")),
    ("cz_pair", include_str!("../../fixtures/cz_pair.json")),
    (
        "cz_rotation",
        include_str!("../../fixtures/cz_rotation.json"),
    ),
    ("gradings", include_str!("../../fixtures/gradings.json")),
    ("klein", include_str!("../../fixtures/klein.json")),
    ("s2xs2", include_str!("../../fixtures/s2xs2.json")),
    ("separating", include_str!("../../fixtures/separating.json")),
    (
        "sphere_identity",
        include_str!("../../fixtures/sphere_identity.json"),
    ),
    ("torus", include_str!("../../fixtures/torus.json")),
];

pub fn names() -> Vec<&'static str> {
    FIXTURES.iter().map(|(n, _)| *n).collect()
}

pub fn get(name: &str) -> Result<&'static str> {
    FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| Error::UnknownExample {
            name: name.to_string(),
            available: names().join(", "),
        })
}
