//! Search and size budgets shared by every operation that enumerates.
//!
//! Defaults are desk scale. The `STABK1_BUDGET` environment variable, when set
//! to a JSON object, overrides individual fields; command line flags override
//! both.

use serde_json::Value;

/// Limits applied to searches and intermediate object sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of candidate elements visited by one exhaustive search.
    pub element_steps: u64,
    /// Maximum number of letters a produced word may carry.
    pub word_length: usize,
    /// Degree gate for polynomial inputs and for dilation's cleared numerator.
    pub degree_cap: usize,
    /// Upper bound for the dilation power search.
    pub dilation_bound: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            element_steps: 5_000_000,
            word_length: 100_000,
            degree_cap: 12,
            dilation_bound: 8,
        }
    }
}

impl Budget {
    /// Default budget with `STABK1_BUDGET` overrides applied when present.
    pub fn from_env() -> Self {
        let mut b = Budget::default();
        if let Ok(raw) = std::env::var("STABK1_BUDGET") {
            if let Ok(Value::Object(map)) = serde_json::from_str::<Value>(&raw) {
                if let Some(v) = map.get("element_steps").and_then(Value::as_u64) {
                    b.element_steps = v;
                }
                if let Some(v) = map.get("word_length").and_then(Value::as_u64) {
                    b.word_length = v as usize;
                }
                if let Some(v) = map.get("degree_cap").and_then(Value::as_u64) {
                    b.degree_cap = v as usize;
                }
                if let Some(v) = map.get("dilation_bound").and_then(Value::as_u64) {
                    b.dilation_bound = v as u32;
                }
            }
        }
        b
    }

    /// Copy with a raised degree cap, used by operations that can compute the
    /// degree they legitimately need ahead of time.
    pub fn with_degree_cap_at_least(&self, need: usize) -> Self {
        let mut b = self.clone();
        if b.degree_cap < need {
            b.degree_cap = need;
        }
        b
    }
}
