//! Team semantics for dependence, independence and inclusion logic.

pub mod entailment;
pub mod eso;
pub mod formula;
pub mod genatom;
pub mod model;
pub mod negation;
pub mod parser;
pub mod proofkernel;
pub mod props;
pub mod random;
pub mod semantics;
pub mod team;
