//! Exact arithmetic: prime powers, finite fields, rank over F_q and
//! integer normal forms.

pub mod field;
pub mod fqmatrix;
pub mod intmatrix;
pub mod prime;

pub use field::{make_field, make_field_with_budget, Elem, FiniteField};
pub use fqmatrix::{fq_rank, rank_in_place, FqMatrix};
pub use intmatrix::{hermite_rows, rational_rank, saturation_basis, smith_invariants, IntMatrix};
pub use prime::{is_prime, PrimePower};
