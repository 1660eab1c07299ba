//! Isometry-invariant permutation codes under the Hamming metric.
//!
//! The crate covers one pipeline end to end: permutation arrays whose
//! within-class distance is `n` and cross-class distance is `n - 1`
//! ("separable" arrays), their isometry groups inside `S_2n`, the
//! equivalence with difference matrices over abelian groups, and the
//! extraction of mutually orthogonal Latin squares (MOLS).  Bundled
//! datasets reproduce published constructions that establish
//! `N(35) >= 6`, `N(48) >= 10`, `N(63) >= 8` and `N(96) >= 8`.

pub mod code;
pub mod data;
pub mod dm;
pub mod error;
pub mod group;
pub mod iso;
pub mod latin;
pub mod perm;
pub mod search;

pub use error::{Error, Result};
pub use perm::Permutation;
