//! Entropic causal direction scoring with the greatest lower bound as a
//! proxy for the minimum noise entropy.
//!
//! For a joint table with rows indexed by `X` and columns by `Y`, the noise
//! needed to write `Y = g(X, Z)` is at least `H(∧_x p(Y|X=x))` and at most two
//! bits more, so the score of `X -> Y` is `H(X) + H(∧_x p(Y|X=x))`.

use crate::error::{Error, Result};
use crate::majorization::greatest_lower_bound;
use crate::numeric::compensated_sum;
use crate::pmf::{entropy_of, Pmf, RenyiOrder, NEGATIVE_CLAMP, NORMALIZATION_TOL};

/// Scores closer than this are reported as a tie.
pub const TIE_TOL: f64 = 1e-9;

fn validate(joint: &[Vec<f64>]) -> Result<usize> {
    let rows = joint.len();
    if rows == 0 {
        return Err(Error::Empty);
    }
    let cols = joint[0].len();
    if cols == 0 {
        return Err(Error::Empty);
    }
    let mut total = 0.0;
    for row in joint {
        if row.len() != cols {
            return Err(Error::LengthMismatch {
                left: row.len(),
                right: cols,
            });
        }
        for (index, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if v < -NEGATIVE_CLAMP {
                return Err(Error::NegativeMass { index, value: v });
            }
        }
        total += compensated_sum(row.iter().map(|v| v.max(0.0)));
    }
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { sum: total });
    }
    Ok(cols)
}

fn conditionals(joint: &[Vec<f64>]) -> Result<Vec<Pmf>> {
    joint
        .iter()
        .enumerate()
        .map(|(index, row)| {
            let s = compensated_sum(row.iter().map(|v| v.max(0.0)));
            if s <= 0.0 {
                return Err(Error::ZeroRow { index });
            }
            Pmf::new(row.iter().map(|v| v.max(0.0) / s).collect())
        })
        .collect()
}

fn transpose(joint: &[Vec<f64>], cols: usize) -> Vec<Vec<f64>> {
    (0..cols)
        .map(|j| joint.iter().map(|row| row[j]).collect())
        .collect()
}

/// `H(∧_x p(Y|X=x))` in bits for a joint table `joint[x][y]`.
pub fn glb_entropy_score(joint: &[Vec<f64>]) -> Result<f64> {
    validate(joint)?;
    let conds = conditionals(joint)?;
    Ok(greatest_lower_bound(&conds)?.glb.entropy(RenyiOrder::SHANNON))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    XToY,
    YToX,
    Tie,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CausalReport {
    pub h_x: f64,
    pub h_y: f64,
    /// `H(∧_x p(Y|X=x))`.
    pub noise_forward: f64,
    /// `H(∧_y p(X|Y=y))`.
    pub noise_backward: f64,
    pub score_forward: f64,
    pub score_backward: f64,
    pub direction: Direction,
}

/// Compares `H(X) + H(∧ p(Y|X))` against `H(Y) + H(∧ p(X|Y))`; the smaller
/// score wins.
pub fn causal_direction(joint: &[Vec<f64>]) -> Result<CausalReport> {
    let cols = validate(joint)?;
    let forward = conditionals(joint)?;
    let t = transpose(joint, cols);
    let backward = conditionals(&t).map_err(|e| match e {
        Error::ZeroRow { index } => Error::ZeroColumn { index },
        other => other,
    })?;

    let px: Vec<f64> = joint.iter().map(|r| compensated_sum(r.iter().copied())).collect();
    let py: Vec<f64> = t.iter().map(|r| compensated_sum(r.iter().copied())).collect();
    let h_x = entropy_of(&px, RenyiOrder::SHANNON);
    let h_y = entropy_of(&py, RenyiOrder::SHANNON);
    let noise_forward = greatest_lower_bound(&forward)?.glb.entropy(RenyiOrder::SHANNON);
    let noise_backward = greatest_lower_bound(&backward)?.glb.entropy(RenyiOrder::SHANNON);
    let score_forward = h_x + noise_forward;
    let score_backward = h_y + noise_backward;
    let direction = if (score_forward - score_backward).abs() <= TIE_TOL {
        Direction::Tie
    } else if score_forward < score_backward {
        Direction::XToY
    } else {
        Direction::YToX
    };
    Ok(CausalReport {
        h_x,
        h_y,
        noise_forward,
        noise_backward,
        score_forward,
        score_backward,
        direction,
    })
}
