//! Numerical routes to the solution of the elliptic Kepler equation
//! `M = ψ − ε sin ψ`.
//!
//! The eccentric anomaly is written as `ψ = M + S(ε; M)`, where `S` is the
//! imaginary part of the complex Kapteyn series
//!
//! ```text
//! 𝕊(ε; M) = Σ_{n≥1} (2/n) J_n(nε) exp(inM)
//! ```
//!
//! The crate evaluates `S` (and `𝕊`) along several independent routes so
//! they can be checked against each other:
//!
//! - [`orbit`]: orbit parameters `(ε, χ, λ)` and a safeguarded Newton
//!   root-finder used as the reference solution.
//! - [`watson`]: Watson's phase function and the scaled Bessel values
//!   `J_n(nε)·exp(−λn)` obtained by quadrature, plus a power-series oracle.
//! - [`stieltjes`]: the Stieltjes density `ρ(t) = 2θ(t)/π`, its moments and
//!   the Stieltjes integral `z ∫ ρ(t)/(1 − zt) dt`; the polylogarithm as a
//!   second, closed-form Stieltjes example.
//! - [`integral`]: the integral representation of `S(ε; M)` over θ ∈ [0, π]
//!   and the analytic continuation of `Σ z^m J_m(mε)/m` to the cut plane.
//! - [`accel`]: Kapteyn partial sums, Wynn's ε algorithm and the Weniger
//!   δ-transformation.
//! - [`quadrature`]: the shared adaptive Gauss–Kronrod integrator.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Test fixtures keep every digit of their high-precision source.
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod accel;
mod dd;
pub mod error;
pub mod integral;
pub mod orbit;
pub mod quadrature;
mod roots;
pub mod stieltjes;
pub mod watson;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use orbit::{
    make_orbit, s_from_psi, solve_kepler_oracle, DecayExponent, EccentricAnomaly, MeanAnomaly,
    OrbitParams,
};
pub use quadrature::{QuadSettings, QuadratureResult};
