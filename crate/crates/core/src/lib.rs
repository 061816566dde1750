//! Pricing engine for European puts under two volatility modifications of the
//! Black-Scholes model.
//!
//! The standard model drives the underlying with local volatility σS. This
//! crate prices the put under two alternatives:
//!
//! - **sub** model: volatility σ√S, giving the PDE
//!   `V_t + rS V_S + ½σ²S V_SS − rV = 0`;
//! - **supra** model: volatility σS^{3/2}, giving
//!   `V_t + rS V_S + ½σ²S³ V_SS − rV = 0`.
//!
//! Both PDEs separate: the ansatz `V = e^{−λt} F(S)` reduces each to an
//! associated-Laguerre equation, so the price is a series over eigenfunctions
//! built from `L_n^1`. The crate provides
//!
//! - [`specfun`]: Laguerre polynomials and the terminating hypergeometric
//!   sums the coefficient formulas need;
//! - [`quadrature`]: adaptive Gauss-Kronrod integration on finite and
//!   semi-infinite intervals;
//! - [`models`]: eigenvalues/eigenfunctions of the two reduced ODEs;
//! - [`coefficients`]: series coefficients by closed form and by projection
//!   quadrature, cross-checked against each other;
//! - [`pricing`]: truncated series evaluation plus the standard Black-Scholes
//!   closed forms used as the baseline;
//! - [`oracle_fd`]: an independent Crank-Nicolson finite-difference solver
//!   used to validate the series;
//! - [`figures`]: the four standard figure datasets (CSV-ready);
//! - [`validate`]: the self-check suite behind `lagbs validate`.

pub mod coefficients;
mod error;
pub mod figures;
mod kahan;
pub mod models;
pub mod oracle_fd;
pub mod pricing;
pub mod quadrature;
pub mod specfun;
pub mod validate;

pub use error::{Error, Result};
pub use kahan::NeumaierSum;
pub use models::{EvalPoint, ModelParams, ModelVariant};
