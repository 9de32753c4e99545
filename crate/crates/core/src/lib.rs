//! Exact Szlenk-index calculus and an exact ε-derivation engine for fan sets.
//!
//! * [`ordinal`]: Cantor-normal-form ordinals below ε₀.
//! * [`rational`]: exact rationals, q-th power magnitudes, root enclosures.
//! * [`calculus`]: Szlenk indices of direct sums and the accompanying bounds.
//! * [`engine`]: exact derivations of fan sets and finite containment checks.

pub mod calculus;
pub mod engine;
pub mod ordinal;
pub mod rational;

pub use ordinal::{Ordinal, OrdFamily};
pub use rational::{QPow, Rational};
