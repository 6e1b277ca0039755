use crate::error::{Error, Result};

/// Resource limits for exhaustive enumeration. All limits are counts of
/// enumerated objects, never wall time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Points enumerated by a single brute-force call (q^ℓ for ask).
    pub points: u128,
    /// Largest group on which naive conjugacy counting is attempted.
    pub group_order: u128,
    /// Element cap for breadth-first matrix group closure.
    pub closure: u128,
    /// Largest field order for which arithmetic tables are built.
    pub field_order: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            points: 10_000_000,
            group_order: 1 << 14,
            closure: 1_000_000,
            field_order: 1 << 10,
        }
    }
}

impl Budget {
    pub fn with_points(points: u128) -> Self {
        Budget {
            points,
            ..Budget::default()
        }
    }

    pub fn check_points(&self, what: &'static str, needed: u128) -> Result<()> {
        check(what, needed, self.points)
    }

    pub fn check_group(&self, what: &'static str, needed: u128) -> Result<()> {
        check(what, needed, self.group_order)
    }
}

fn check(what: &'static str, needed: u128, budget: u128) -> Result<()> {
    if needed > budget {
        Err(Error::BudgetExceeded {
            what,
            needed,
            budget,
        })
    } else {
        Ok(())
    }
}

/// `base^exp` as u128, saturating at `u128::MAX` so that budget checks
/// reject rather than wrap.
pub fn pow_saturating(base: u64, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}
