//! Exact-arithmetic toolkit for interdependent-choice equilibria (ICE).
//!
//! A finite environment fixes players, actions and payoffs but says nothing
//! about timing or information. A mediator that draws an intended profile and
//! a move order, recommends actions one player at a time and recommends a
//! worst-case punishment after an observed deviation can support any
//! distribution satisfying a finite set of affine incentive constraints; this
//! crate builds those constraints, solves them with an exact rational simplex,
//! and cross-checks every verdict against the explicitly constructed
//! recommendation game.
//!
//! Module map:
//!
//! * [`env`]: environments, profiles, distributions and action subspaces.
//! * [`lp`]: exact simplex with Farkas certificates.
//! * [`ice`]: punishment values, incentive systems, membership and regions.
//! * [`elimination`]: strict, absolute and future-looking dominance.
//! * [`refinement`]: the threat-restricting operator and the classifier.
//! * [`mediated`]: the explicit recommendation game used as an oracle.
//! * [`random`]: seeded generators for test corpora and benchmarks.

pub mod catalog;
pub mod elimination;
pub mod env;
pub mod error;
pub mod ice;
pub mod lp;
pub mod mediated;
pub mod random;
pub mod refinement;
pub mod rational;

pub use env::{ActionProfile, ActionSubspace, Environment, JointDistribution, ThreatSpace};
pub use error::{Error, Result};
pub use ice::{IceCertificate, OrderingDistribution, PunishmentMode};
pub use lp::{LinearSystem, LpOutcome, Relation, Sense};
pub use rational::Rational;
pub use refinement::Classification;
