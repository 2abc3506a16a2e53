//! Exact number-field arithmetic, unit lattices, quotient fans and
//! fundamental domains for compact non-Kähler manifolds built from number
//! fields, with a machine-readable certificate of the checks performed.

pub mod ambient;
pub mod certificate;
pub mod config;
pub mod domain;
pub mod fan;
pub mod field;
pub mod pipeline;
pub mod plot;
pub mod poly;
pub mod qmat;
pub mod roots;
pub mod salem;
pub mod tol;
pub mod units;
pub mod words;
