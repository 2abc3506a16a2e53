//! Numerical thresholds shared across the checks.
//!
//! Lattice-side logic is exact; these apply only where embeddings enter.

/// Default residual / separation tolerance for embedding tables.
pub const EMBEDDING: f64 = 1e-9;

/// `|Im z| < REAL_SPLIT * (1 + |z|)` classifies a root as real.
pub const REAL_SPLIT: f64 = 1e-8;

/// Roots with `REAL_SPLIT <= |Im z| / (1 + |z|) < REAL_GUARD` are rejected
/// as ambiguous rather than classified.
pub const REAL_GUARD: f64 = 1e-7;

/// Entries of a phi-matrix row below this in absolute value count as zero
/// and disqualify the row from Q_b.
pub const SIGN_ZERO: f64 = 1e-9;

/// Homomorphism, realness, and block-structure comparisons.
pub const LINEAR: f64 = 1e-9;

/// Minimum separation for injectivity of lattice projections.
pub const SEPARATION: f64 = 1e-6;

/// Largest accepted condition number of the embedded integral basis.
pub const MAX_CONDITION: f64 = 1e8;

/// Slack for cone and simplex membership.
pub const MEMBERSHIP: f64 = 1e-9;

/// Slack absorbing the difference between D and its closure.
pub const CLOSURE: f64 = 1e-7;

/// `|det|` threshold for full rank of projected log vectors.
pub const OT_DET: f64 = 1e-9;

/// Modulus-one tolerance used when recognising Salem root patterns.
pub const UNIT_CIRCLE: f64 = 1e-9;
