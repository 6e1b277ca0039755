//! Point counts of affine schemes, the graph-decomposition pipeline, the
//! identity battery and verification reports.

pub mod battery;
pub mod pipeline;
pub mod report;
pub mod scheme;

pub use battery::{verify_battery, BatteryConfig};
pub use pipeline::{hm_combination, hm_truncated, mth_power_identities, theorem_a_check, BBDecomposition};
pub use report::{CheckRecord, QValue, Status, VerificationReport};
pub use scheme::{affine_count, AffineScheme, Term};
