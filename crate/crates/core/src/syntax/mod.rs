//! Terms, concrete syntax, positions and α-equivalence.

mod parse;
mod path;
mod print;
mod term;

pub use parse::{parse, SyntaxError};
pub use path::{Path, PathError};
pub use print::{print, print_unicode, print_with};
pub use term::{fresh_name, KeyTok, Name, Term, TermKey, TermSet};
