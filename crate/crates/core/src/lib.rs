//! Logic negation for propositional deductive databases, computed three
//! independent ways that must agree:
//!
//! * [`semantics`] — direct fixpoint iteration of the failure operator
//!   (and of the immediate-consequence operator for the positive side);
//! * [`sld`] — SLD resolution with finite-failed-tree detection;
//! * [`compile`] + [`snp`] — translation into a spiking neural P system
//!   whose synchronous computation carries out the failure operator, one
//!   application every two steps after a one-step warm-up.
//!
//! The two inference readings are negation as finite failure (the least
//! fixpoint, equivalently the failure set of the resolution engine) and the
//! closed world assumption (the greatest fixpoint, the complement of the
//! least model).

pub mod compile;
pub mod gen;
pub mod kb;
pub mod semantics;
pub mod sld;
pub mod snp;
#[cfg(test)]
pub(crate) mod testkit;
pub mod text;
