//! The tree-building procedures: actions, parser states, and derivations.
//!
//! Pass 1 tags each word, pass 2 assigns chunk tags and groups
//! `Start X, Join X...` runs into flat constituents, and pass 3 alternates
//! `BUILD` (annotate the leftmost unannotated tree with `Start X` or
//! `Join X`) and `CHECK` (accept or reject the rightmost annotated run as a
//! finished constituent). The parse ends when `CHECK` accepts a constituent
//! spanning the sentence, or directly after pass 2 if a single chunk covers it.

mod action;
mod derive;
mod state;

pub use self::action::{Action, Annotation, ChunkTag, Label, Procedure};
pub use self::derive::{derive, Derivation};
pub use self::state::{ForestTree, Grammar, Node, ParserState, Phase, Proposal, MAX_UNARY_DEPTH};

use crate::error::Result;

/// Starting state for `tokens`; fails on an empty sentence.
pub fn initial_state<S: AsRef<str>>(tokens: &[S]) -> Result<ParserState> {
    ParserState::initial(tokens)
}
