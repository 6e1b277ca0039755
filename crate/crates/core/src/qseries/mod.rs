//! Laurent polynomials in q, the localised ring with `(1 - q^n)^{-1}`
//! adjoined, truncated q-adic expansions and exact congruences mod q^n.

pub mod congruence;
pub mod fit;
pub mod laurent;
pub mod sring;

pub use congruence::{congruent_mod_qn, has_q_power_denominator, p_valuation, q_valuation};
pub use fit::{laurent_fit, read_samples};
pub use laurent::{eval_laurent, LaurentPoly};
pub use sring::{eval_sring, expand_sring, QAdicTruncation, SRingElem};
