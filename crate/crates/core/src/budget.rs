use crate::error::{Error, Result};

/// Default limit on the number of elements any computation may materialize.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Upper bound on materialized universes, candidate-map counts and clone sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

impl Budget {
    pub fn limit(self) -> u64 {
        self.0
    }

    /// Fails with [`Error::BudgetExceeded`] when `count` is above the limit.
    pub fn check(self, what: &str, count: u128) -> Result<()> {
        self.check_with_hint(what, count, None)
    }

    pub fn check_with_hint(self, what: &str, count: u128, hint: Option<&str>) -> Result<()> {
        if count > self.0 as u128 {
            Err(Error::BudgetExceeded {
                what: what.to_string(),
                count,
                limit: self.0,
                hint: hint.map(str::to_string),
            })
        } else {
            Ok(())
        }
    }
}

/// `base^exp` saturating at `u128::MAX`.
pub fn checked_pow(base: u128, exp: u128) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = match acc.checked_mul(base) {
            Some(v) => v,
            None => return u128::MAX,
        };
        if acc == 0 {
            return 0;
        }
    }
    acc
}
