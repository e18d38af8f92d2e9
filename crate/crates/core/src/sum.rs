//! Compensated summation and order-fixed reductions.
//!
//! Every spectral sum in the crate goes through [`NeumaierSum`], and parallel
//! evaluation only ever maps terms into a `Vec` that is then reduced in index
//! order, so results do not depend on the number of worker threads.

use rayon::prelude::*;
use std::ops::AddAssign;

/// Kahan–Babuška–Neumaier accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().collect::<NeumaierSum>().value()
}

/// Terms below this count are evaluated on the calling thread.
const PARALLEL_THRESHOLD: usize = 4096;

/// Map `f` over `items` (possibly in parallel) and return the results in input order.
pub fn ordered_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    if items.len() < PARALLEL_THRESHOLD {
        items.iter().map(f).collect()
    } else {
        items.par_iter().map(f).collect()
    }
}

/// A logarithm split into its real part and an integer multiple of `i*pi`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LogValue {
    pub re: f64,
    pub phase: i64,
}

impl std::ops::Neg for LogValue {
    type Output = Self;

    fn neg(self) -> Self {
        Self { re: -self.re, phase: -self.phase }
    }
}

impl LogValue {
    pub fn new(re: f64, phase: i64) -> Self {
        Self { re, phase }
    }

    /// `ln x` for a nonzero real `x`.
    pub fn ln(x: f64) -> Self {
        Self {
            re: x.abs().ln(),
            phase: i64::from(x < 0.0),
        }
    }

    /// `ln(1 + y)` keeping precision for small `y`.
    pub fn ln_1p(y: f64) -> Self {
        if y > -1.0 {
            Self { re: y.ln_1p(), phase: 0 }
        } else {
            Self { re: (-(1.0 + y)).ln(), phase: 1 }
        }
    }

    pub fn plus(self, other: Self) -> Self {
        Self {
            re: self.re + other.re,
            phase: self.phase + other.phase,
        }
    }

    pub fn minus(self, other: Self) -> Self {
        self.plus(-other)
    }
}

/// Accumulates a sum of logarithms, compensated in the real part.
#[derive(Debug, Clone, Copy, Default)]
pub struct LogSum {
    re: NeumaierSum,
    phase: i64,
}

impl LogSum {
    pub fn add(&mut self, v: LogValue) {
        self.re.add(v.re);
        self.phase += v.phase;
    }

    pub fn value(&self) -> LogValue {
        LogValue::new(self.re.value(), self.phase)
    }
}

/// Phases are multiples of `pi`; two logs agree modulo `2*pi*i` when their
/// phase counts have the same parity.
pub fn phases_match(a: i64, b: i64) -> bool {
    (a - b).rem_euclid(2) == 0
}
