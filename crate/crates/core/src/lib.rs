//! Numerical laboratory for truncated Wiener-Hopf operators
//! W_α(a; Λ) = χ_Λ Op_α(a) χ_Λ, the regularized trace
//! tr D_α(a, Λ; f) = tr f(W_α(a; Λ)) − tr W_α(f∘a; Λ),
//! the asymptotic coefficients that govern its growth, and free-fermion
//! entropy scaling at low temperature.

pub mod coeffs;
pub mod entropy;
pub mod error;
pub mod lab;
pub mod quad;
pub mod regions;
pub mod special;
pub mod specfun;
pub mod symbols;
pub mod whop;

pub use error::{Error, Result};
