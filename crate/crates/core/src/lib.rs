//! Exact verification of denominator identities for twisted affine Lie
//! superalgebras.
//!
//! Weights and root data are exact rationals. Series are generic over a
//! coefficient ring ([`scalar::Coeff`]); verification runs over `BigInt`.

pub mod algebra;
pub mod cli;
pub mod denominator;
pub mod lattice;
pub mod linalg;
pub mod scalar;
pub mod series;
pub mod weylgroup;

pub use algebra::{build_spec, AlgebraSpec, FamilyId, Parity};
pub use lattice::{BasisSymbol, BilinearForm, Weight};

/// Exact rational scalar used for weights.
pub type Q = scalar::Q;
/// Coefficient ring used by verification.
pub type Coefficient = num_bigint::BigInt;
/// Truncated series over the verification ring.
pub type Series = series::TruncatedSeries<Coefficient>;
