//! Budgets and knobs shared by the oracle, enumeration, and refutation layers.
//!
//! Everything bounded flows through one [`Budgets`] value so that a run's
//! search horizons are stated in a single place and can be serialised into
//! reports.

use serde::{Deserialize, Serialize};

/// Global search bounds.  All results derived under these bounds carry
/// "within budget" semantics: positive findings are certified, negative ones
/// only say the bounded search found nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    /// Radius of metric balls built by the oracle.
    pub ball_radius: usize,
    /// Region cap for diagram enumeration.
    pub max_regions: usize,
    /// Longest word fed to refutation / normal-form search.
    pub max_word_len: usize,
    /// Hard cap on breadth-first expansions in the word-equality search.
    pub equality_steps: usize,
    /// Require matching inner labels when testing domino stability
    /// (the isomorphism-faithful reading); when false only the bias type
    /// must agree.
    pub strict_stability: bool,
}

impl Default for Budgets {
    fn default() -> Budgets {
        Budgets {
            ball_radius: 4,
            max_regions: 4,
            max_word_len: 4,
            equality_steps: 20_000,
            strict_stability: true,
        }
    }
}

impl Budgets {
    pub fn with_ball_radius(mut self, r: usize) -> Budgets {
        self.ball_radius = r;
        self
    }

    pub fn with_max_regions(mut self, n: usize) -> Budgets {
        self.max_regions = n;
        self
    }

    pub fn with_max_word_len(mut self, n: usize) -> Budgets {
        self.max_word_len = n;
        self
    }

    pub fn with_strict_stability(mut self, b: bool) -> Budgets {
        self.strict_stability = b;
        self
    }
}
