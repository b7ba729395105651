//! Coefficients of the expansion `(1 + 1/x)^x = e (1 - Σ b_n / (x+1)^n)` and
//! the tools to check their properties: exact recurrence and series routes,
//! tanh-sinh quadrature of their integral representations, the refined
//! Carleman weights they produce, and a verification report runner.

pub mod carleman;
pub mod cli;
pub mod coeffs;
pub mod error;
mod fixed;
pub mod integrand;
pub mod quadrature;
pub mod rational;
pub mod report;
pub mod series;
pub mod verify;

pub use coeffs::{b_recurrence, b_series_oracle, CoefficientTable, Source};
pub use error::{Error, Result};
pub use quadrature::{QuadratureConfig, QuadratureResult};
pub use rational::BigRational;
pub use report::{Check, Status, VerificationReport};
