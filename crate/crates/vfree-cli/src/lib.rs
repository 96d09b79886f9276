//! Library surface of the CLI: the GFG file format and the built-in corpus.

pub mod corpus;
pub mod gfg;
