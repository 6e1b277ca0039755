//! Module representations over the integers and their per-field
//! invariants: average kernel size and rank histograms.

pub mod ask;
pub mod io;
pub mod rep;

pub use ask::{
    ask, ask_from_histogram, ask_naive, ask_power, q_pow, rank_histogram, vmax_count, AskValue,
    RankHistogram,
};
pub use io::{rep_from_json, rep_from_value, rep_to_json, rep_to_value};
pub use rep::ModuleRep;
