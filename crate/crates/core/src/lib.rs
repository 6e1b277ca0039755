//! Exact computations with integral module representations over finite
//! fields: average kernel sizes, rank strata, the class-two groups and
//! abelian actions they define, graph loci of symmetric matrices, and
//! q-adic congruence checks between them.

pub mod budget;
pub mod error;
pub mod exactcore;
pub mod graphloci;
pub mod grouplab;
pub mod modrep;
pub mod num_json;
pub mod qseries;
pub mod shell;

pub use budget::Budget;
pub use error::{Error, Result};
