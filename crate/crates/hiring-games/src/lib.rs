//! Complete-information hiring-market games, equilibrium analysis, and
//! computational fairness audits in exact rational arithmetic.
//!
//! The crate has three layers:
//!
//! * [`game`] and [`equilibrium`]: finite extensive-form games with explicit
//!   information sets, Nash and self-confirming equilibrium checks backed by
//!   explicit belief structures, and exhaustive equilibrium enumeration.
//! * [`market`]: constructors for bilateral and simultaneous hiring games
//!   (with optional job caps), the belief spaces used by the self-confirming
//!   witness search, and discrimination diagnostics.
//! * [`fairness`], [`blatant`], [`construct`]: group / individual /
//!   counterfactual fairness checks over weighted candidate populations,
//!   blatant-unfairness detection for equilibrium sets, and constructors
//!   that turn fair classifiers into blatantly unfair market scenarios.
//!
//! Everything is exact: probabilities and payoffs are
//! [`Rational`](rational::Rational) throughout, and every verdict is either
//! decided by exhaustive enumeration or returned with a finite witness that
//! can be replayed.

pub mod blatant;
pub mod construct;
pub mod dist;
pub mod equilibrium;
pub mod fairness;
pub mod game;
pub mod market;
pub mod rational;
