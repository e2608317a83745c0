//! Majorized alias decomposition.
//!
//! For descending pmfs `q ⪯ p` over the same ranks, every cell `x >= 1` keeps
//! `q(x) - r[x]` of its mass and sends its excess `r[x]` to a strictly smaller
//! rank `a[x]`, so that
//!
//! ```text
//! p(x) = q(x) - r[x] + Σ_{y : a[y] = x} r[y]
//! ```
//!
//! With `q` uniform this is Walker's alias table.

use crate::error::{Error, Result};
use crate::majorization::majorization_violation;
use crate::pmf::{first_unsorted, SortedPmf};

/// Rounding slack on excess masses.
pub const EXCESS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct AliasDecomposition {
    p: Vec<f64>,
    q: Vec<f64>,
    alias: Vec<Option<usize>>,
    excess: Vec<f64>,
    transfer_steps: usize,
}

impl AliasDecomposition {
    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// The target distribution (sorted).
    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// The source distribution (sorted).
    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// Alias targets; `None` only at rank 0.
    pub fn alias(&self) -> &[Option<usize>] {
        &self.alias
    }

    /// Excess masses; `excess()[0]` is always zero.
    pub fn excess(&self) -> &[f64] {
        &self.excess
    }

    /// Fraction of cell `x` that is moved to its alias.
    pub fn ratio(&self, x: usize) -> f64 {
        if self.q[x] > 0.0 {
            (self.excess[x] / self.q[x]).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }

    /// Number of transfers performed by the inner loop (at most `len()`).
    pub fn transfer_steps(&self) -> usize {
        self.transfer_steps
    }

    /// Rebuilds `p` from `q` and the transfers.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.q.iter().zip(&self.excess).map(|(q, r)| q - r).collect();
        for (y, target) in self.alias.iter().enumerate() {
            if let Some(t) = target {
                out[*t] += self.excess[y];
            }
        }
        out
    }

    pub fn as_transition(&self) -> Transition {
        as_transition(self)
    }
}

/// Decomposes the majorized pair `q ⪯ p` (both descending, same length).
pub fn majorized_alias(p: &SortedPmf, q: &SortedPmf) -> Result<AliasDecomposition> {
    majorized_alias_masses(p.masses(), q.masses())
}

pub(crate) fn majorized_alias_masses(p: &[f64], q: &[f64]) -> Result<AliasDecomposition> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    if let Some(index) = first_unsorted(p).or_else(|| first_unsorted(q)) {
        return Err(Error::NotSorted { index });
    }
    if let Some(v) = majorization_violation(p, q) {
        return Err(Error::NotMajorized {
            prefix: v.prefix,
            deficit: v.deficit,
        });
    }

    let n = q.len();
    let mut excess = vec![0.0; n];
    let mut alias = vec![None; n];
    let mut steps = 0;
    if n >= 2 {
        // ranks b+1..n are finished; x..=b carry excess not yet assigned
        let mut b = n - 1;
        for x in (1..n).rev() {
            let mut r = q[x] - p[x];
            while r < -EXCESS_TOL {
                if b <= x {
                    return Err(Error::NotMajorized {
                        prefix: x,
                        deficit: -r,
                    });
                }
                r += excess[b];
                alias[b] = Some(x);
                b -= 1;
                steps += 1;
            }
            excess[x] = r.clamp(0.0, q[x]);
        }
        // leftover excess flows to the top rank
        for slot in alias.iter_mut().take(b + 1).skip(1) {
            *slot = Some(0);
        }
    }
    Ok(AliasDecomposition {
        p: p.to_vec(),
        q: q.to_vec(),
        alias,
        excess,
        transfer_steps: steps,
    })
}

/// One row of the lower-triangular stochastic matrix `M` with `p = q M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionRow {
    pub stay: f64,
    pub target: Option<usize>,
    pub moved: f64,
}

/// Sparse row-stochastic map equivalent to an [`AliasDecomposition`].
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    rows: Vec<TransitionRow>,
}

impl Transition {
    pub fn rows(&self) -> &[TransitionRow] {
        &self.rows
    }

    /// Positive entries of row `x` as `(column, weight)`.
    pub fn entries(&self, x: usize) -> Vec<(usize, f64)> {
        let row = &self.rows[x];
        let mut out = Vec::with_capacity(2);
        if row.stay > 0.0 {
            out.push((x, row.stay));
        }
        if let Some(t) = row.target {
            if row.moved > 0.0 {
                out.push((t, row.moved));
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows.len()];
        for (x, (row, &mass)) in self.rows.iter().zip(v).enumerate() {
            out[x] += mass * row.stay;
            if let Some(t) = row.target {
                out[t] += mass * row.moved;
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.rows.len();
        (0..n)
            .map(|x| {
                let mut row = vec![0.0; n];
                for (c, w) in self.entries(x) {
                    row[c] += w;
                }
                row
            })
            .collect()
    }
}

pub fn as_transition(dec: &AliasDecomposition) -> Transition {
    let rows = (0..dec.len())
        .map(|x| {
            let moved = dec.ratio(x);
            TransitionRow {
                stay: 1.0 - moved,
                target: dec.alias[x],
                moved,
            }
        })
        .collect();
    Transition { rows }
}
