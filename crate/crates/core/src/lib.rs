//! Core model: a chemical-abstract-machine pi-calculus, finite presheaves
//! over the base category of string diagrams, trace cospans with their
//! correctness criterion, rational behaviour systems with translation and
//! back-translation, and the testing-equivalence machinery (poles, fair
//! testing, bisimulation, expansion) tying them together.
//!
//! The crate is `no_std` + `alloc`; everything in here is pure value
//! manipulation. IO, file formats and the CLI live in the `pipg` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod behaviour;
pub mod pi;
pub mod presheaf;
pub mod testing;
pub mod trace;

pub use pi::SigmaLabel;
