//! Cost LTL on finite words: evaluation, translation to B and S automata, boundedness,
//! stabilization semigroups and syntactic minimization.

pub mod actions;
pub mod automata;
pub mod bounded;
pub mod cli;
pub mod cost;
pub mod error;
pub mod eval;
pub mod format;
pub mod formula;
pub mod minimize;
pub mod semigroup;
pub mod translate;
pub mod word;

pub use cost::CostValue;
pub use error::{Error, Result};
pub use formula::{Formula, Logic, Node};
pub use word::{Alphabet, Word};
