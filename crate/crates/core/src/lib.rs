//! Language inclusion `L(G) ⊆ M` for a context-free grammar `G` and a regular
//! language `M` given by a finite automaton.
//!
//! The decision procedures compute Kleene iterates of the grammar's fixpoint
//! function and stop as soon as a well-quasiorder on words says no new word
//! can matter. Membership of the finitely many representatives then decides
//! inclusion.
//!
//! Three engines are provided:
//!
//! * [`engine::decide_inclusion_word`] iterates over sets of words and can be
//!   driven by any of the four quasiorders in [`quasiorders`].
//! * [`engine::decide_inclusion_antichain`] replaces words by their automaton
//!   profiles and keeps antichains of profiles.
//! * [`saturation::decide_slp_inclusion`] handles straight-line programs in
//!   polynomial time through pre* saturation.
//!
//! [`oracle`] holds brute-force reference implementations used by the tests.

pub mod automata;
pub mod bits;
pub mod cli;
pub mod engine;
mod error;
pub mod foundations;
pub mod grammar;
pub mod oracle;
pub mod quasiorders;
pub mod saturation;

pub use error::{Error, Result};
