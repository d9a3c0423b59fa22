//! Finite-instance engine for quantum resource theories.
//!
//! A theory is declared as a roster of states per level (n copies of a base
//! system) and a set of generators for the free operations. From that the crate
//! computes the resourcefulness preorder, finite-horizon conversion rates with
//! replayable witnesses, and resource measures together with checkers for
//! their structural properties.

pub mod channels;
pub mod linalg;
pub mod measures;
pub mod model;
pub mod preorder;
pub mod rates;
pub mod synth;


