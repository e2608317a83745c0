//! Majorization order on pmfs and the greatest lower bound of a finite collection.

use crate::error::{Error, Result};
use crate::numeric::prefix_sums;
use crate::pmf::{sort_descending, Pmf, SortedPmf};

/// Slack allowed on prefix-sum comparisons.
pub const MAJORIZATION_TOL: f64 = 1e-12;
/// Largest support the subset-enumeration oracle will accept.
pub const ORACLE_MAX_SUPPORT: usize = 14;

/// The first prefix length at which `q` fails to be majorized by `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    /// Prefix length `k` (1-based: the `k` largest masses).
    pub prefix: usize,
    /// How far the prefix sum of `q` exceeds that of `p`.
    pub deficit: f64,
}

fn sorted_desc(masses: &[f64]) -> Vec<f64> {
    let mut v = masses.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Checks `q ⪯ p` on raw mass vectors (any order, any lengths).
pub fn majorization_violation(p: &[f64], q: &[f64]) -> Option<Violation> {
    let n = p.len().max(q.len());
    let mut ps = sorted_desc(p);
    let mut qs = sorted_desc(q);
    ps.resize(n, 0.0);
    qs.resize(n, 0.0);
    let pp = prefix_sums(&ps);
    let qp = prefix_sums(&qs);
    pp.iter()
        .zip(&qp)
        .enumerate()
        .find(|(_, (a, b))| **b > **a + MAJORIZATION_TOL)
        .map(|(k, (a, b))| Violation {
            prefix: k + 1,
            deficit: b - a,
        })
}

/// `true` iff `q ⪯ p`: every sum of the `k` largest masses of `q` is at most
/// the corresponding sum for `p` (up to `1e-12`).
pub fn majorizes(p: &Pmf, q: &Pmf) -> bool {
    majorization_violation(p.masses(), q.masses()).is_none()
}

/// Greatest lower bound of a collection under majorization.
#[derive(Debug, Clone, PartialEq)]
pub struct GlbResult {
    /// The bound, in rank space: position `k` is the `k`-th largest atom.
    pub glb: SortedPmf,
    /// `prefix[k]` is the minimum over the collection of the sum of the
    /// `k+1` largest masses.
    pub prefix: Vec<f64>,
}

impl GlbResult {
    pub fn masses(&self) -> &[f64] {
        self.glb.masses()
    }

    pub fn to_pmf(&self) -> Pmf {
        self.glb.to_pmf()
    }
}

/// Greatest lower bound of `ps` with respect to majorization.
///
/// Sorts every pmf, takes the pointwise minimum of the prefix sums and
/// differences it. Pmfs of different lengths are zero-padded.
pub fn greatest_lower_bound(ps: &[Pmf]) -> Result<GlbResult> {
    let sorted: Vec<SortedPmf> = ps.iter().map(sort_descending).collect();
    glb_of_sorted(&sorted)
}

/// Same as [`greatest_lower_bound`] for inputs that are already sorted.
pub fn glb_of_sorted(sorted: &[SortedPmf]) -> Result<GlbResult> {
    if sorted.is_empty() {
        return Err(Error::EmptyCollection);
    }
    let n = sorted.iter().map(SortedPmf::len).max().unwrap_or(0);
    let sums: Vec<Vec<f64>> = sorted.iter().map(|s| prefix_sums(s.masses())).collect();
    let at = |i: usize, k: usize| -> f64 {
        let ps = &sums[i];
        ps.get(k).copied().unwrap_or_else(|| ps.last().copied().unwrap_or(0.0))
    };

    let mut prefix = Vec::with_capacity(n);
    let mut masses = Vec::with_capacity(n);
    let mut prev_arg = usize::MAX;
    let mut prev = 0.0;
    for k in 0..n {
        // argmin, preferring the previous minimizer on ties
        let mut arg = if prev_arg == usize::MAX { 0 } else { prev_arg };
        let mut best = at(arg, k);
        for i in 0..sorted.len() {
            let v = at(i, k);
            if v < best {
                best = v;
                arg = i;
            }
        }
        // same minimizer as the previous rank: its own mass is exact
        let mass = if arg == prev_arg {
            sorted[arg].masses().get(k).copied().unwrap_or(0.0)
        } else {
            best - prev
        };
        masses.push(mass.max(0.0));
        prefix.push(best);
        prev = best;
        prev_arg = arg;
    }
    let pmf = Pmf::new(masses)?;
    let identity = (0..n).collect();
    Ok(GlbResult {
        glb: SortedPmf::from_parts_unchecked(pmf.into_masses(), identity),
        prefix,
    })
}

/// Independent oracle for the greatest lower bound that evaluates
/// `max_{|A| <= k} p(A)` by enumerating every subset of each support.
pub fn glb_oracle(ps: &[Pmf]) -> Result<Pmf> {
    if ps.is_empty() {
        return Err(Error::EmptyCollection);
    }
    let n = ps.iter().map(Pmf::len).max().unwrap_or(0);
    let mut inf = vec![f64::INFINITY; n + 1];
    for p in ps {
        let support: Vec<f64> = p.masses().iter().copied().filter(|&m| m > 0.0).collect();
        if support.len() > ORACLE_MAX_SUPPORT {
            return Err(Error::TooLarge {
                support: support.len(),
                max: ORACLE_MAX_SUPPORT,
            });
        }
        // best[s] = max mass over subsets of size exactly s
        let mut best = vec![0.0f64; support.len() + 1];
        for mask in 0u32..(1u32 << support.len()) {
            let size = mask.count_ones() as usize;
            let mass: f64 = (0..support.len())
                .filter(|&j| mask & (1 << j) != 0)
                .map(|j| support[j])
                .sum();
            if mass > best[size] {
                best[size] = mass;
            }
        }
        let mut running = 0.0f64;
        for (k, slot) in inf.iter_mut().enumerate() {
            if let Some(&b) = best.get(k) {
                running = running.max(b);
            }
            *slot = slot.min(running);
        }
    }
    let masses = (1..=n).map(|k| (inf[k] - inf[k - 1]).max(0.0)).collect();
    Pmf::new(masses)
}
