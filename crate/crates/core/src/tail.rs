//! Geometric tail estimate shared by every truncated series in the crate.
//!
//! A series is truncated once the observed term ratio has stayed below
//! [`MAX_RATIO`] over the last [`WINDOW`] terms; the remainder is then bounded
//! by `|t_last| r / (1 - r)` with `r` the largest ratio in the window.

use std::collections::VecDeque;

pub const WINDOW: usize = 5;
pub const MAX_RATIO: f64 = 0.9;

/// Tracks `ln |t_j|` of the most recent terms.
#[derive(Debug, Clone, Default)]
pub struct GeometricTail {
    logs: VecDeque<f64>,
    window: usize,
}

impl GeometricTail {
    pub fn new() -> Self {
        Self::with_window(WINDOW)
    }

    pub fn with_window(window: usize) -> Self {
        GeometricTail { logs: VecDeque::with_capacity(window + 1), window }
    }

    /// Records a term given its natural log magnitude (`-inf` for zero).
    pub fn push_ln(&mut self, ln_abs: f64) {
        self.logs.push_back(ln_abs);
        if self.logs.len() > self.window + 1 {
            self.logs.pop_front();
        }
    }

    pub fn push(&mut self, magnitude: f64) {
        self.push_ln(magnitude.ln());
    }

    /// Largest ratio of consecutive magnitudes over the window, once full.
    pub fn ratio(&self) -> Option<f64> {
        if self.logs.len() < self.window + 1 {
            return None;
        }
        let mut worst = 0.0f64;
        for (a, b) in self.logs.iter().zip(self.logs.iter().skip(1)) {
            let r = if *b == f64::NEG_INFINITY {
                0.0
            } else if *a == f64::NEG_INFINITY {
                f64::INFINITY
            } else {
                (b - a).exp()
            };
            worst = worst.max(r);
        }
        Some(worst)
    }

    /// `ln` of the geometric tail bound, or `None` while the ratio is not
    /// stable below [`MAX_RATIO`].
    pub fn ln_bound(&self) -> Option<f64> {
        let r = self.ratio()?;
        if r >= MAX_RATIO {
            return None;
        }
        let last = *self.logs.back()?;
        if r == 0.0 || last == f64::NEG_INFINITY {
            return Some(f64::NEG_INFINITY);
        }
        Some(last + r.ln() - (1.0 - r).ln())
    }

    pub fn bound(&self) -> Option<f64> {
        self.ln_bound().map(f64::exp)
    }
}
