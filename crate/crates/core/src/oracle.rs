//! Brute-force check of the segment determinants: eigenvalues of `-d²/du²`
//! on `[0, L]` from the secular equation, regularized against an exactly
//! solvable model spectrum.
//!
//! With `u = cos(ku - θ_0)` at the left end and the mirror form at the right,
//! the eigenvalue condition is `kL - θ_0(k) - θ_L(k) = nπ`, where
//! `θ = π/2` (Dirichlet), `0` (Neumann), `arctan(α/k)` (Robin, `α ≥ 0`).
//! Eigenvalues with quantum number `q = n + c`, `c = (θ_0(∞) + θ_L(∞))/π`, are
//! compared with the model `(qπ/L)²`, whose log-determinant is a Hurwitz value.

use crate::cylinder::BoundaryCondition;
use crate::error::{Error, Result};
use crate::sum::{ordered_map, NeumaierSum};
use crate::zreg::special::{log_gamma, HALF_LN_2PI};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecularProblem {
    pub length: f64,
    pub left: BoundaryCondition,
    pub right: BoundaryCondition,
}

impl SecularProblem {
    pub fn new(length: f64, left: BoundaryCondition, right: BoundaryCondition) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::invalid(format!("length must be positive, got {length}")));
        }
        for bc in [left, right] {
            if let BoundaryCondition::Robin(a) = bc {
                if !(a >= 0.0) || !a.is_finite() {
                    return Err(Error::Domain(format!("the oracle needs a Robin parameter α ≥ 0, got {a}")));
                }
            }
        }
        Ok(Self {
            length,
            left: left.normalized(),
            right: right.normalized(),
        })
    }

    fn has_zero_mode(&self) -> bool {
        self.left == BoundaryCondition::Neumann && self.right == BoundaryCondition::Neumann
    }

    fn secular(&self, k: f64) -> f64 {
        k * self.length - theta(self.left, k) - theta(self.right, k)
    }

    /// `c` in `q = n + c`, doubled so it is an integer.
    fn twice_offset(&self) -> i64 {
        theta_inf_halves(self.left) + theta_inf_halves(self.right)
    }

    /// Smallest `n` with a root `k > 0`.
    fn n_min(&self) -> i64 {
        let f0 = -(theta(self.left, 0.0) + theta(self.right, 0.0));
        (f0 / PI).floor() as i64 + 1
    }

    fn root(&self, n: i64) -> Result<f64> {
        let target = n as f64 * PI;
        // roots may sit on either end; pad against rounding
        let mut lo = (target / self.length * (1.0 - 1e-12)).max(0.0);
        let mut hi = (target + PI) / self.length * (1.0 + 1e-12) + 1e-300;
        let f = |k: f64| self.secular(k) - target;
        if f(lo) > 0.0 || f(hi) < 0.0 {
            return Err(Error::Bracketing { lo, hi });
        }
        while hi - lo > 1e-13 * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Positive roots `k` for `n = n_min, …, n_min + count - 1`.
    fn roots(&self, count: usize) -> Result<Vec<f64>> {
        let n0 = self.n_min();
        let ns: Vec<i64> = (0..count as i64).map(|i| n0 + i).collect();
        ordered_map(&ns, |&n| self.root(n)).into_iter().collect()
    }
}

fn theta(bc: BoundaryCondition, k: f64) -> f64 {
    match bc {
        BoundaryCondition::Dirichlet => PI / 2.0,
        BoundaryCondition::Neumann => 0.0,
        BoundaryCondition::Robin(a) => (a / k).atan(),
    }
}

fn theta_inf_halves(bc: BoundaryCondition) -> i64 {
    match bc {
        BoundaryCondition::Dirichlet => 1,
        _ => 0,
    }
}

/// The first `n` eigenvalues, zero mode included.
pub fn segment_eigenvalues(p: &SecularProblem, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("need at least one eigenvalue"));
    }
    let zero = usize::from(p.has_zero_mode());
    let mut out = vec![0.0; zero];
    out.extend(p.roots(n - zero)?.into_iter().map(|k| k * k));
    out.truncate(n);
    Ok(out)
}

/// `ln Det` of `{(π/L)² (j + b)²}_{j ≥ 0}`.
fn model_log_det(length: f64, b: f64) -> Result<f64> {
    Ok((1.0 - 2.0 * b) * (PI / length).ln() - 2.0 * log_gamma(b)? + 2.0 * HALF_LN_2PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleDet {
    pub log_det: f64,
    /// Last Richardson correction.
    pub error_estimate: f64,
    pub zero_modes: u64,
    pub eigenvalues_used: usize,
}

/// `ln Det*` from `n` eigenvalues, with the tail extrapolated.
pub fn oracle_log_det(p: &SecularProblem, n: usize) -> Result<OracleDet> {
    if n < 16 {
        return Err(Error::invalid("the oracle needs at least 16 eigenvalues"));
    }
    let roots = p.roots(n)?;
    let n0 = p.n_min();
    let c2 = p.twice_offset();
    let step = PI / p.length;
    let mut unpaired = NeumaierSum::new();
    let mut logs = Vec::with_capacity(n);
    let mut b = None;
    for (i, &k) in roots.iter().enumerate() {
        let q2 = 2 * (n0 + i as i64) + c2;
        if q2 <= 0 {
            unpaired.add(2.0 * k.ln());
            continue;
        }
        let q = q2 as f64 / 2.0;
        b.get_or_insert(q);
        logs.push(2.0 * (k / (q * step)).ln());
    }
    let b = b.ok_or_else(|| Error::invalid("no paired eigenvalues"))?;
    let partial = |m: usize| logs[..m].iter().copied().collect::<NeumaierSum>().value();
    let m = logs.len() - logs.len() % 4;
    let (s1, s2, s4) = (partial(m), partial(m / 2), partial(m / 4));
    let r1 = 2.0 * s1 - s2;
    let r1_half = 2.0 * s2 - s4;
    let r2 = (4.0 * r1 - r1_half) / 3.0;
    let value = [model_log_det(p.length, b)?, unpaired.value(), r2]
        .into_iter()
        .collect::<NeumaierSum>()
        .value();
    Ok(OracleDet {
        log_det: value,
        error_estimate: (r2 - r1).abs(),
        zero_modes: u64::from(p.has_zero_mode()),
        eigenvalues_used: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeDet {
    pub value: f64,
    pub error_estimate: f64,
    /// Zero modes excluded from `p` and from the reference.
    pub zero_modes: (u64, u64),
}

/// `ln Det(p) - ln Det(reference)`; zero modes are excluded and counted.
pub fn relative_log_det(p: &SecularProblem, reference: &SecularProblem, n: usize) -> Result<RelativeDet> {
    if p.length != reference.length {
        return Err(Error::invalid("relative determinants need a common length"));
    }
    let a = oracle_log_det(p, n)?;
    let b = oracle_log_det(reference, n)?;
    Ok(RelativeDet {
        value: a.log_det - b.log_det,
        error_estimate: a.error_estimate + b.error_estimate,
        zero_modes: (a.zero_modes, b.zero_modes),
    })
}
