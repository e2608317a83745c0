//! Bernoulli splitting: one pmf of "sticks" such that each of `m` Bernoulli
//! parameters is the total length of a subset of the sticks.
//!
//! Each round emits the longest stick compatible with every remaining
//! parameter, `γ = min_i max(ρ_i, c - ρ_i)` where `c` is the length still to
//! be covered, and assigns it to every `ρ_i >= c/2`. Since `γ >= c/2` the
//! uncovered length at least halves per round.

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

/// Uncovered length below which exact mode stops.
pub const STOP_TOL: f64 = 1e-12;
/// Slack on the `ρ_i >= c/2` test.
pub const TIE_TOL: f64 = 1e-12;

/// When to stop splitting.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SplitLimits {
    /// Emit at most this many sticks.
    pub max_steps: Option<usize>,
    /// Stop once the uncovered length is at most this (never below [`STOP_TOL`]).
    pub eps: Option<f64>,
}

impl SplitLimits {
    pub const EXACT: SplitLimits = SplitLimits {
        max_steps: None,
        eps: None,
    };

    pub fn steps(max_steps: usize) -> Self {
        Self {
            max_steps: Some(max_steps),
            eps: None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.max_steps.is_none() && self.eps.is_none_or(|e| e <= STOP_TOL)
    }

    /// Upper bound on the total variation error this truncation can introduce.
    pub fn error_bound(&self) -> f64 {
        let by_steps = self
            .max_steps
            .map_or(0.0, |l| (-(l as f64)).exp2());
        let by_eps = self.eps.unwrap_or(0.0);
        match (self.max_steps, self.eps) {
            (None, None) => 0.0,
            (Some(_), None) => by_steps,
            (None, Some(_)) => by_eps,
            (Some(_), Some(_)) => by_steps.min(by_eps),
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.max_steps == Some(0) {
            return Err(Error::BadParameter("step limit must be at least 1".into()));
        }
        if let Some(e) = self.eps {
            if !(0.0..1.0).contains(&e) {
                return Err(Error::BadParameter(format!(
                    "residual limit must lie in [0, 1), got {e}"
                )));
            }
        }
        Ok(())
    }
}

/// Output of [`bernoulli_splitting`].
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliSplit {
    sticks: Vec<f64>,
    /// Column-major: `assign[x * m + i]` tells whether stick `x` counts toward `ρ_i`.
    assign: Vec<bool>,
    m: usize,
    folded_residual: f64,
    residuals: Vec<f64>,
    degenerate_counts: Vec<usize>,
}

impl BernoulliSplit {
    /// Stick lengths, non-increasing, summing to one.
    pub fn sticks(&self) -> &[f64] {
        &self.sticks
    }

    pub fn num_sticks(&self) -> usize {
        self.sticks.len()
    }

    pub fn num_params(&self) -> usize {
        self.m
    }

    /// Whether stick `x` is part of the subset forming `ρ_i`.
    pub fn uses(&self, i: usize, x: usize) -> bool {
        self.assign[x * self.m + i]
    }

    /// Row `i` of the assignment matrix.
    pub fn row(&self, i: usize) -> Vec<bool> {
        (0..self.sticks.len()).map(|x| self.uses(i, x)).collect()
    }

    /// The parameter actually realized for `i`: the total length of its sticks.
    pub fn aggregated(&self, i: usize) -> f64 {
        compensated_sum(
            self.sticks
                .iter()
                .enumerate()
                .filter(|(x, _)| self.uses(i, *x))
                .map(|(_, &s)| s),
        )
    }

    /// Number of rounds run.
    pub fn iterations(&self) -> usize {
        self.residuals.len()
    }

    /// Uncovered length left when the loop stopped; folded into the last stick.
    pub fn folded_residual(&self) -> f64 {
        self.folded_residual
    }

    /// Uncovered length after each round.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    /// After each round, how many parameters sit at `0` or at the uncovered length.
    pub fn degenerate_counts(&self) -> &[usize] {
        &self.degenerate_counts
    }
}

/// Splits the unit interval into sticks covering each `rhos[i]` exactly (or
/// up to the truncation error allowed by `limits`).
pub fn bernoulli_splitting(rhos: &[f64], limits: SplitLimits) -> Result<BernoulliSplit> {
    limits.validate()?;
    let m = rhos.len();
    let mut rho = Vec::with_capacity(m);
    for (index, &value) in rhos.iter().enumerate() {
        if !(-TIE_TOL..=1.0 + TIE_TOL).contains(&value) {
            return Err(Error::BadProbability { index, value });
        }
        rho.push(value.clamp(0.0, 1.0));
    }

    let stop = limits.eps.unwrap_or(0.0).max(STOP_TOL);
    let mut sticks = Vec::new();
    let mut assign = Vec::new();
    let mut residuals = Vec::new();
    let mut degenerate_counts = Vec::new();
    let mut c = 1.0f64;

    while c > stop && limits.max_steps.is_none_or(|l| sticks.len() < l) {
        let gamma = rho
            .iter()
            .map(|&r| r.max(c - r))
            .fold(c, f64::min);
        let half = 0.5 * c - TIE_TOL;
        let next_c = (c - gamma).max(0.0);
        for r in rho.iter_mut() {
            if *r >= half {
                assign.push(true);
                *r = (*r - gamma).clamp(0.0, next_c);
            } else {
                assign.push(false);
                *r = r.min(next_c);
            }
        }
        sticks.push(gamma);
        c = next_c;
        residuals.push(c);
        degenerate_counts.push(
            rho.iter()
                .filter(|&&r| r <= TIE_TOL || r >= c - TIE_TOL)
                .count(),
        );
    }

    let folded_residual = c;
    if let Some(last) = sticks.last_mut() {
        *last += c;
    }
    let total = compensated_sum(sticks.iter().copied());
    if total != 1.0 {
        for s in sticks.iter_mut() {
            *s /= total;
        }
    }
    Ok(BernoulliSplit {
        sticks,
        assign,
        m,
        folded_residual,
        residuals,
        degenerate_counts,
    })
}
