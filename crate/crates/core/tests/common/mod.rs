//! Shared test helpers: an independent dense expansion of the finite
//! identity, and the randomized structural properties.

#![allow(dead_code)]

pub mod oracle;
pub mod props;

use superdenom::{build_spec, AlgebraSpec, FamilyId};

/// The h∨ ≠ 0 instances named by the acceptance list, at depth 8.
pub fn nonzero_dual_cases() -> Vec<AlgebraSpec> {
    [
        (FamilyId::A2k2lm1, 1, 1),
        (FamilyId::A2km12lm1, 2, 1),
        (FamilyId::A2l2km1, 2, 1),
        (FamilyId::A2k2l4, 2, 1),
        (FamilyId::Dk1l, 2, 1),
        (FamilyId::Cl1, 0, 1),
        (FamilyId::G3, 0, 0),
    ]
    .into_iter()
    .map(|(f, k, l)| build_spec(f, k, l).unwrap())
    .collect()
}

/// The three h∨ = 0 instances at k = 2.
pub fn zero_dual_cases(k: u32) -> Vec<AlgebraSpec> {
    [FamilyId::A2km12km1, FamilyId::A2k2k4, FamilyId::Dk1k]
        .into_iter()
        .map(|f| build_spec(f, k, k).unwrap())
        .collect()
}

/// D = ceil(3·ht δ + 2): enough for q-degree 3.
pub fn q3_depth(spec: &AlgebraSpec) -> u32 {
    let d = spec.delta_height() * superdenom::scalar::qi(3) + superdenom::scalar::qi(2);
    u32::try_from(d.ceil().to_integer()).unwrap()
}
