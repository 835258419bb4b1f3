//! Exact formal calculus for vertex algebras: delta-function identities, vertex algebra
//! and module axiom checking, opposite and contragredient modules, rationality and
//! associativity of matrix coefficients, and the finite-dimensional Lie algebra analogue.

pub mod action;
pub mod algebra;
pub mod duality;
pub mod error;
pub mod examples;
pub mod expr;
pub mod grading;
pub mod kernel;
pub mod lie;
pub mod linalg;
pub mod modules;
pub mod par;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use kernel::{Monomial, Series, Window};
pub use report::{CheckReport, Status, Witness};
pub use scalar::{Exponent, Scalar};
