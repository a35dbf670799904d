//! Category data shipped with the crate.

use crate::error::{Error, Result};
use crate::fusion::{parse_spec, CategorySpec};

pub const NAMES: [&str; 6] = ["vec_z2", "vec_z2_twisted", "vec_z3", "vec_s3", "fib", "ising"];

/// Raw JSON of a bundled category.
pub fn source(name: &str) -> Option<&'static str> {
    let name = name.strip_suffix(".json").unwrap_or(name);
    Some(match name {
        "vec_z2" => include_str!("../data/vec_z2.json"),
        "vec_z2_twisted" => include_str!("../data/vec_z2_twisted.json"),
        "vec_z3" => include_str!("../data/vec_z3.json"),
        "vec_s3" => include_str!("../data/vec_s3.json"),
        "fib" => include_str!("../data/fib.json"),
        "ising" => include_str!("../data/ising.json"),
        _ => return None,
    })
}

pub fn load(name: &str) -> Result<CategorySpec> {
    let text = source(name).ok_or_else(|| Error::Config(format!("no bundled category named {name}")))?;
    parse_spec(text)
}

pub fn all() -> Vec<CategorySpec> {
    NAMES.iter().map(|n| load(n).expect("bundled data is valid")).collect()
}
