#![forbid(unsafe_code)]
//! Exact conjugacy-class products in GL(n,q) and SL(n,q) over small finite
//! fields, with a constructive trace-set engine that certifies lower bounds
//! on the number of classes in a product without enumerating the group.

pub mod bounds;
pub mod canonical;
pub mod classgroup;
pub mod cli;
pub mod field;
pub mod matrices;
pub mod polyring;
pub mod verify;

pub use bounds::{certified_lower_bound, BoundsError, CertifiedBound, TraceSetReport};
pub use canonical::{ClassId, RcfArrangement, Tail};
pub use classgroup::{
    ClassKey, EtaReport, Group, GroupData, GroupError, GroupFamily, MinScanReport, DEFAULT_BUDGET,
};
pub use field::{Felt, Field, FieldError};
pub use matrices::{Conjugator, Mat, MatError};
pub use polyring::{Poly, PolyError};

/// CLI entry point for the `classprod` binary.
pub fn run_cli() -> i32 {
    cli::run_from_env()
}
