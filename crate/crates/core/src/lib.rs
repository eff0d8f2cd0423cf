//! Access Hoare logic over a small While language.
//!
//! Programs and assertions are checked by exhaustive enumeration of a finite
//! state space. The crate provides an interpreter, semantic and syntactic
//! precondition transformers, a derivation checker for the access Hoare
//! calculus and a verification-condition generator driven by loop invariants.

pub mod assertions;
pub mod calculus;
pub mod semantics;
pub mod transformers;
pub mod vcgen;
pub mod syntax;

#[cfg(feature = "arbitrary")]
pub mod arbitrary;
