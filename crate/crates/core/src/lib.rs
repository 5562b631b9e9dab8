//! First-order connection prover that encodes proof search as SAT.

pub mod driver;
pub mod encoding;
pub mod matrix;
pub mod parse;
pub mod problem;
pub mod proof;
pub mod tableau;
pub mod term;
pub mod unify;
