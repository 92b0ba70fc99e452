//! Statevector laboratory for quantum summation and integration.
//!
//! The crate implements mean-estimation quantum algorithms over bit-query
//! oracles — Boolean and real summation, multivariate integration and
//! Gaussian path integration — in two query models: deterministic queries
//! over a full table, and randomized queries over subsampled points. Exact
//! measurement laws, classical baselines and error/resource accounting sit
//! alongside so that query and qubit budgets can be measured and checked
//! against closed-form lower bounds.

pub mod acceptance;
pub mod baselines;
pub mod catalog;
pub mod error;
pub mod metrics;
pub mod oracles;
pub mod qae;
pub mod reductions;
pub mod statevector;

pub use error::{Error, Result};
