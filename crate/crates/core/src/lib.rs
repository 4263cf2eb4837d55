//! A history-based maximum-entropy constituency parser.
//!
//! Parse trees are built by four procedures applied in three left-to-right
//! passes over a sentence: `TAG` assigns part-of-speech tags, `CHUNK` groups
//! tagged words into flat chunks, and `BUILD`/`CHECK` alternate to assemble
//! the remaining constituents. Every complete tree has exactly one action
//! sequence (its [`Derivation`]). Each procedure is scored by a conditional
//! maximum-entropy model trained with Generalized Iterative Scaling, and a
//! top-K breadth-first search returns several scored parses per sentence.
//!
//! The numeric core ([`maxent`], [`search`]) is generic over the floating
//! point type through [`Scalar`]; the aliases below fix it to `f64`, which is
//! what the command-line tool and the model files use.
//!
//! ```
//! use mxparse::treebank::read_bracketed;
//! use mxparse::derivation::{derive, Grammar};
//!
//! let tree = read_bracketed("(S (NP (PRP I)) (VP (VBD saw) (NP (DT a) (NN dog))))")
//!     .unwrap()
//!     .remove(0);
//! let grammar = Grammar::from_trees([&tree]);
//! let derivation = derive(&tree, &grammar).unwrap();
//! assert_eq!(derivation.replay(&grammar).unwrap(), tree);
//! ```

pub mod context;
pub mod derivation;
pub mod error;
pub mod eval;
pub mod maxent;
pub mod parser;
mod scalar;
pub mod search;
pub mod synth;
pub mod treebank;

pub use crate::derivation::{Action, Derivation, Grammar, ParserState};
pub use crate::error::{Error, Result};
pub use crate::scalar::Scalar;
pub use crate::treebank::{Corpus, ParseTree, Span};


/// Maximum-entropy model over `f64`.
pub type MaxentModel = maxent::MaxentModel<f64>;
/// The four procedure models over `f64`.
pub type ModelSet = maxent::ModelSet<f64>;
pub type ScoredParse = search::ScoredParse<f64>;
pub type SearchConfig = search::SearchConfig<f64>;
pub type SearchOutcome = search::SearchOutcome<f64>;
pub type Parser = parser::Parser<f64>;
