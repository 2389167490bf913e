//! Presentation-level handle calculus for compact 4-manifolds.
//!
//! Handle structures are modelled by their relators and dual relators. The
//! crate provides the Andrews-Curtis moves, single and double 2-handle
//! slides, AC-structure recognition, multicork and pinwheel constructions,
//! the encasement rewriting, invariant oracles and a bounded move search.

pub mod cli;
pub mod corkcalc;
pub mod error;
pub mod format;
pub mod presentation;
pub mod search;
pub mod words;

pub use error::{Error, ParseError, Result};
pub use presentation::{BiPresentation, HandlePair, Movable, MoveScript, MoveToken, Presentation, Side, SlidePath};
pub use words::{Alphabet, Letter, Word};
