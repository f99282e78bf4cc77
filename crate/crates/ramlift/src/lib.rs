//! Certified rational ramified covers of the circle and ramified lifts of
//! affine Baumslag-Solitar actions.
//!
//! The crate is organized bottom-up:
//! - [`ratfunc`]: exact polynomial / rational-map arithmetic and Sturm
//!   root counting;
//! - [`sig`]: signature vectors, dihedral actions, stabilizers;
//! - [`bs`]: BS(1,n) normal forms and the standard affine action;
//! - [`cover`]: construction and certification of rational ramified covers;
//! - [`lift`]: numerical evaluation and verification of ramified lifts;
//! - [`classify`]: enumeration of conjugacy-class descriptors.

pub mod bs;
pub mod cover;
pub mod classify;
pub mod lift;
pub mod ratfunc;
pub mod sig;
