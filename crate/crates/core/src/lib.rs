//! Nonlocal boxes over finite alphabets.
//!
//! The crate is organised around [`Behavior`], an exact conditional
//! probability table `P(outputs | inputs)` for any number of parties.
//! On top of it sit:
//!
//! * [`bell`]: correlators, CHSH, local bounds by vertex enumeration and
//!   exact local-polytope membership backed by [`lp`];
//! * [`singlet`]: Monte Carlo simulation of singlet correlations using
//!   shared random vectors and one PR-box use per shot;
//! * [`protocols`]: oblivious transfer and the one-bit inner-product
//!   protocol built on single-use boxes;
//! * [`multiparty`]: parity-constraint correlations, LHV refutation by
//!   enumeration and the exhaustive wiring search;
//! * [`cloning`]: the perfect-clone signalling witness and the monogamy LP.

pub mod behavior;
pub mod bell;
pub mod cloning;
pub mod error;
pub mod format;
pub mod lp;
pub mod multiparty;
pub mod protocols;
pub mod rational;
pub mod singlet;

pub use behavior::{Behavior, NoSignallingReport, Scenario, SignallingViolation};
pub use bell::{BellFunctional, LocalityCertificate};
pub use error::{Error, Result};
pub use lp::{LpProblem, LpSolution, LpStatus, Relation};
pub use rational::Rational;
pub use singlet::{CorrelationEstimate, SimShot, UnitVector3};
