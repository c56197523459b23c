//! Numerical toolkit for decay rates of functions with slowly growing
//! Laplace transforms.
//!
//! The crate is organised around a small calculus of monotone *rate
//! functions* `M`, `K` on `[0, ∞)` and the composite
//! `M_K(s) = M(s)·log(e ∨ K(s))` whose generalized inverse governs how fast
//! `f(t)` can decay when `‖z·f̂(z)‖ ≤ C·K(|Im z|)` on the domain
//! `Ω_M = { -1/M(|Im z|) < Re z ≤ 0 }`.
//!
//! Modules:
//!
//! * [`rate`] — expression trees for rate functions, dual value/log-value
//!   evaluation, the `K_m` / `K_{m,log}` / `M_K` transforms, right-continuous
//!   right-inversion and positive-increase estimation.
//! * [`catalog`] — closed-form decay rates for ten standard `(M, K)` pairs
//!   and numerical verification that the generic inverse reproduces them.
//! * [`measure`] — roots-of-unity atomic measures whose Laplace and Cauchy
//!   transforms realise near-optimal decay, with cancellation-safe series
//!   evaluation and quantitative bound checks.
//! * [`counterexample`] — assembly of `f = Σ_n Lμ_n` from a sequence of such
//!   measures, plus verification of the optimality lower bounds.
//! * [`fudge`] — doubly exponential analytic mollifiers vanishing rapidly at
//!   `±i`, and the quantitative lemma describing that decay.
//! * [`contour`] — the contour family used for Laplace inversion and its
//!   quadrature parametrizations.
//! * [`reconstruct`] — numerical reconstruction `f(t) = I₁ + I₂ + I₃` by
//!   contour integration, the Taylor correction for logarithmic
//!   singularities, and decay-envelope checks.
//! * [`semigroup`] — concrete generator spectra (atomic, curve, Jordan) with
//!   resolvent/orbit norms and the `M_log⁻¹(ct)` boundedness experiments.
//!
//! All operations are pure: given the same inputs they return the same
//! outputs, and shared references can be used concurrently.

pub mod catalog;
pub mod contour;
pub mod counterexample;
pub mod fudge;
pub mod grid;
pub mod logdom;
pub mod measure;
pub mod quad;
pub mod rate;
pub mod reconstruct;
pub mod report;
pub mod semigroup;

pub use rate::{HypothesisProfile, PositiveIncreaseWitness, RateSpec, RateValue};
pub use report::{Check, Report};

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed input: bad parameters, non-monotone composition, etc.
    #[error("validation: {0}")]
    Validation(String),
    /// A bracketing search exhausted its doubling budget.
    #[error("unbounded search: {0}")]
    UnboundedSearch(String),
    /// Evaluation requested at (or too close to) a pole.
    #[error("pole: {0}")]
    Pole(String),
    /// Evaluation requested at an essential singularity.
    #[error("singularity: {0}")]
    Singularity(String),
    /// Contour construction needs a larger radius.
    #[error("R too small: need R >= {required:.6e}, got {got:.6e}")]
    RadiusTooSmall { required: f64, got: f64 },
    /// Optimality threshold violated: `c1` must exceed the computed constant.
    #[error("c1 = {c1} does not exceed the threshold c_alpha_beta = {threshold:.6} (alpha = {alpha:.4}, beta = {beta:.4})")]
    Threshold {
        c1: f64,
        threshold: f64,
        alpha: f64,
        beta: f64,
    },
    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: worst panel [{a:.6e}, {b:.6e}], error {err:.3e}")]
    Quadrature { a: f64, b: f64, err: f64 },
    /// Argument outside the mathematical domain of the operation.
    #[error("domain: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
