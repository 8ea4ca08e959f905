//! Finite combinatorics around the density Carlson-Simpson theorem.
//!
//! Words and variable words live in [`words`], level-indexed word sets in
//! [`wordset`], Carlson-Simpson trees in [`cs_tree`]. The remaining modules
//! build on those: exact densities and probability estimates ([`prob`]),
//! energy and regularity ([`regularity`]), convolution operations
//! ([`convolution`]), Ramsey-type searches ([`partition`], [`extremal`]),
//! pattern restrictions and product codings ([`patterns`]), the bound
//! recursions ([`bounds`]) and the identity suites that tie them together
//! ([`verify`]).

pub mod bitset;
pub mod bounds;
pub mod convolution;
pub mod cs_tree;
pub mod error;
pub mod extremal;
pub mod partition;
pub mod patterns;
pub mod prob;
pub mod rational;
pub mod regularity;
pub mod verify;
pub mod words;
pub mod wordset;

pub use bitset::BitSet;
pub use cs_tree::{CsTree, Wedge};
pub use error::{Error, Result};
pub use rational::Rational;
pub use words::{CombSubspace, Letter, LocatedWord, Sym, VariableWord, Word};
pub use wordset::WordSet;
