//! Built-in signatures used by the verification harness.

use crate::group::{close_group, DEFAULT_GROUP_CAP};
use crate::word::Signature;

/// Names of the built-in signatures, in harness order.
pub const NAMES: [&str; 6] = ["z2z2", "z2z3", "z2z2z2", "s3z2", "z2z3f1", "z2f2"];

fn cyclic(name: &str, m: u32) -> crate::group::FiniteGroup {
    let perm = (0..m).map(|i| (i + 1) % m).collect();
    close_group(name, m as usize, &[perm], DEFAULT_GROUP_CAP).expect("cyclic group")
}

fn s3(name: &str) -> crate::group::FiniteGroup {
    close_group(name, 3, &[vec![1, 0, 2], vec![0, 2, 1]], DEFAULT_GROUP_CAP).expect("S3")
}

pub fn by_name(name: &str) -> Option<Signature> {
    let (factors, r) = match name {
        "z2z2" => (vec![cyclic("A", 2), cyclic("B", 2)], 0),
        "z2z3" => (vec![cyclic("A", 2), cyclic("B", 3)], 0),
        "z2z2z2" => (vec![cyclic("A", 2), cyclic("B", 2), cyclic("C", 2)], 0),
        "s3z2" => (vec![s3("A"), cyclic("B", 2)], 0),
        "z2z3f1" => (vec![cyclic("A", 2), cyclic("B", 3)], 1),
        "z2f2" => (vec![cyclic("A", 2)], 2),
        _ => return None,
    };
    Some(Signature::new(factors, r).expect("catalog signature"))
}

/// All built-in signatures with their names.
pub fn all() -> Vec<(&'static str, Signature)> {
    NAMES
        .iter()
        .map(|&n| (n, by_name(n).expect("known name")))
        .collect()
}
