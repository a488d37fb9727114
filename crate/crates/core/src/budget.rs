/// Step counter shared by the search procedures. Exhaustion is reported to
/// callers as an explicit "unknown" outcome, never as a negative answer.
#[derive(Debug, Clone)]
pub struct Budget {
    remaining: u64,
    limit: u64,
}

pub const DEFAULT_STEPS: u64 = 1_000_000;

impl Budget {
    pub fn new(steps: u64) -> Self {
        Budget {
            remaining: steps,
            limit: steps,
        }
    }

    /// Returns false once the budget is exhausted.
    pub fn spend(&mut self, steps: u64) -> bool {
        if self.remaining >= steps {
            self.remaining -= steps;
            true
        } else {
            self.remaining = 0;
            false
        }
    }

    pub fn exhausted(&self) -> bool {
        self.remaining == 0
    }

    pub fn used(&self) -> u64 {
        self.limit - self.remaining
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_STEPS)
    }
}
