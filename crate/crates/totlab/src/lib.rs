//! totlab: exact generalized totients and the analytic machinery around their
//! value distribution.
//!
//! The central object is `Phi_k(n)`, the number of k-tuples over `Z/nZ` whose
//! sum of squares is coprime to n (`Phi_1` is Euler's phi). The crate computes
//! it exactly (explicit formula, definition-level brute force, and bulk range
//! scans), counts `#{n <= x : Phi_k(n)/n^beta <= y}` with exact boundary
//! handling, evaluates the Euler products and Mertens-type quantities that
//! appear in the asymptotics with certified truncation tails, and ships
//! verification harnesses (numerical Perron integration, distribution main
//! terms, extremal orders) that compare the asymptotic predictions against
//! exact counts at desk scale.

// Reference constants keep more digits than f64 retains, and the `!(x > a)`
// validation style must reject NaN.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod arith;
pub mod counting;
pub mod error;
pub mod rational;
pub mod totient;
pub mod verify;

pub(crate) mod scan;

pub use error::{Error, Result};
