//! Geometric splitting.
//!
//! Given `q ⪯ p`, split every atom `q(x)` into `q(x)/2, q(x)/4, ...` and send
//! level `i` of row `x` either to `x` or to its alias `a[x]` according to the
//! `i`-th binary digit of `r[x]/q(x)`. The split pmf `q × Geom(1/2)` then
//! aggregates exactly onto `p`. Only the first `digit_cap` levels are kept
//! distinct; deeper levels stay at `x`, costing at most `2^-digit_cap` in
//! total variation.

use crate::alias::{majorized_alias, AliasDecomposition};
use crate::error::{Error, Result};
use crate::majorization::{glb_of_sorted, GlbResult};
use crate::numeric::CompensatedSum;
use crate::pmf::{entropy_of, geometric_entropy, sort_descending, Pmf, RenyiOrder, SortedPmf};

pub const DEFAULT_DIGIT_CAP: u32 = 60;
pub const MAX_DIGIT_CAP: u32 = 127;

/// Aggregation map `(rank, level) -> rank` realizing `q × Geom(1/2) ⊑ p`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeomSplitMap {
    dec: AliasDecomposition,
    digit_cap: u32,
    /// `floor(ratio * 2^digit_cap)` per row.
    digits: Vec<u128>,
    /// Rows whose whole mass moves to the alias.
    full: Vec<bool>,
}

impl GeomSplitMap {
    pub fn decomposition(&self) -> &AliasDecomposition {
        &self.dec
    }

    pub fn digit_cap(&self) -> u32 {
        self.digit_cap
    }

    pub fn is_full(&self, x: usize) -> bool {
        self.full[x]
    }

    pub fn len(&self) -> usize {
        self.dec.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dec.is_empty()
    }

    /// Destination rank of level `level` (1-based) of row `x`.
    pub fn map(&self, x: usize, level: u32) -> usize {
        debug_assert!(level >= 1);
        let Some(alias) = self.dec.alias()[x] else {
            return x;
        };
        if self.dec.q()[x] <= 0.0 {
            return x;
        }
        if self.full[x] {
            return alias;
        }
        if level > self.digit_cap {
            return x;
        }
        let bit = (self.digits[x] >> (self.digit_cap - level)) & 1;
        if bit == 1 {
            alias
        } else {
            x
        }
    }

    /// The moved fraction actually realized for row `x`: the ratio truncated
    /// to `digit_cap` binary digits.
    pub fn realized_ratio(&self, x: usize) -> f64 {
        if self.full[x] {
            1.0
        } else {
            self.digits[x] as f64 * (-(self.digit_cap as f64)).exp2()
        }
    }
}

pub fn geom_split(p: &SortedPmf, q: &SortedPmf, digit_cap: u32) -> Result<GeomSplitMap> {
    let dec = majorized_alias(p, q)?;
    split_decomposition(dec, digit_cap)
}

pub(crate) fn split_decomposition(dec: AliasDecomposition, digit_cap: u32) -> Result<GeomSplitMap> {
    if digit_cap == 0 || digit_cap > MAX_DIGIT_CAP {
        return Err(Error::BadParameter(format!(
            "digit cap must lie in 1..={MAX_DIGIT_CAP}, got {digit_cap}"
        )));
    }
    let scale = (digit_cap as f64).exp2();
    let mut digits = Vec::with_capacity(dec.len());
    let mut full = Vec::with_capacity(dec.len());
    for x in 0..dec.len() {
        let ratio = dec.ratio(x);
        // exact: scaling by a power of two, then a single float -> int floor
        let scaled = (ratio * scale).floor() as u128;
        if ratio >= 1.0 {
            full.push(true);
            digits.push(0);
        } else {
            full.push(false);
            digits.push(scaled);
        }
    }
    Ok(GeomSplitMap {
        dec,
        digit_cap,
        digits,
        full,
    })
}

/// Distribution of `map(X, min(Z, digit_cap + 1))` for `X ~ q` and `Z ~ Geom(1/2)`.
pub fn truncated_pushforward(map: &GeomSplitMap) -> Pmf {
    let n = map.len();
    let q = map.dec.q();
    let mut out = vec![CompensatedSum::new(); n];
    for (x, &mass) in q.iter().enumerate() {
        if mass <= 0.0 {
            continue;
        }
        let mut level_mass = mass;
        for level in 1..=map.digit_cap {
            level_mass *= 0.5;
            out[map.map(x, level)].add(level_mass);
        }
        out[map.map(x, map.digit_cap + 1)].add(level_mass);
    }
    Pmf::new(out.iter().map(CompensatedSum::value).collect()).expect("pushforward of a pmf is a pmf")
}

/// One cell of the geometric coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeomCell {
    pub rank: usize,
    /// `1..=digit_cap`, or `digit_cap + 1` for the residual tail.
    pub level: u32,
    pub mass: f64,
}

/// Coupling whose underlying pmf is `(∧S) × CGeom(1/2, digit_cap + 1)`.
#[derive(Debug, Clone)]
pub struct GeometricCoupling {
    pub glb: GlbResult,
    pub sorted: Vec<SortedPmf>,
    pub maps: Vec<GeomSplitMap>,
    pub digit_cap: u32,
}

impl GeometricCoupling {
    pub fn cells(&self) -> Vec<GeomCell> {
        let mut cells = Vec::new();
        for (rank, &mass) in self.glb.masses().iter().enumerate() {
            if mass <= 0.0 {
                continue;
            }
            let mut level_mass = mass;
            for level in 1..=self.digit_cap {
                level_mass *= 0.5;
                cells.push(GeomCell {
                    rank,
                    level,
                    mass: level_mass,
                });
            }
            cells.push(GeomCell {
                rank,
                level: self.digit_cap + 1,
                mass: level_mass,
            });
        }
        cells
    }

    pub fn underlying_pmf(&self) -> Pmf {
        Pmf::new(self.cells().iter().map(|c| c.mass).collect()).expect("cells form a pmf")
    }

    /// Original label of distribution `i` assigned to `cell`.
    pub fn label(&self, i: usize, cell: &GeomCell) -> usize {
        self.sorted[i].original_label(self.maps[i].map(cell.rank, cell.level))
    }

    /// Pushforward of the underlying pmf through distribution `i`'s map, in
    /// original labels.
    pub fn marginal(&self, i: usize) -> Pmf {
        let mut out = vec![CompensatedSum::new(); self.sorted[i].len()];
        for cell in self.cells() {
            out[self.label(i, &cell)].add(cell.mass);
        }
        Pmf::new(out.iter().map(CompensatedSum::value).collect()).expect("pushforward of a pmf is a pmf")
    }

    /// Rényi entropy of the untruncated underlying pmf `(∧S) × Geom(1/2)`.
    pub fn analytic_entropy(&self, order: RenyiOrder) -> f64 {
        entropy_of(self.glb.masses(), order) + geometric_entropy(order)
    }
}

/// Couples every pmf in `ps` through `(∧S) × Geom(1/2)`, truncated after
/// `digit_cap` levels.
pub fn couple_geometric(ps: &[Pmf], digit_cap: u32) -> Result<GeometricCoupling> {
    if ps.is_empty() {
        return Err(Error::EmptyCollection);
    }
    let n = ps.iter().map(Pmf::len).max().unwrap_or(0);
    let sorted: Vec<SortedPmf> = ps.iter().map(|p| sort_descending(&p.padded(n))).collect();
    let glb = glb_of_sorted(&sorted)?;
    let maps = sorted
        .iter()
        .map(|s| geom_split(s, &glb.glb, digit_cap))
        .collect::<Result<Vec<_>>>()?;
    Ok(GeometricCoupling {
        glb,
        sorted,
        maps,
        digit_cap,
    })
}
