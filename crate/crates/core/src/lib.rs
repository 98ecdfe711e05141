//! Martingale model of weakly cancelling operators.
//!
//! The library works over an `m`-uniform filtration: every atom of generation
//! `n` splits into `m` atoms of generation `n + 1` with equal probability.
//! Martingale differences restricted to an atom are identified with elements
//! of `V ⊗ ℝ^ℓ`, where `V` is the mean-zero hyperplane of `ℝ^m`. Given a
//! subspace `W` of admissible differences and a linear map `φ: W → V`, the
//! crate decides the cancellation and weak-cancellation conditions exactly,
//! constructs the extension `Φ` of `φ` that kills the spike directions,
//! produces blow-up counterexamples when weak cancellation fails, computes
//! the exact finite-depth operator norm of the associated transform, and
//! cross-checks everything against the Fourier picture over a finite abelian
//! group structure on the digit alphabet.
//!
//! All algebraic verdicts are computed in exact rational arithmetic; floating
//! point is confined to norms involving square roots and to the Fourier side.

pub mod cancellation;
pub mod fourier;
pub mod linalg;
pub mod martingale;
pub mod rational;
pub mod sampling;
pub mod tensor;
pub mod tree;
pub mod witness;

pub use rational::Rational;
