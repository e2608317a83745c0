//! Coupling of finitely many pmfs with entropy within `2 - 2^(2-m)` bits of
//! the greatest lower bound.
//!
//! The construction sorts every input, takes `q̄ = ∧S`, decomposes each
//! `q̄ ⪯ p_i` into alias transfers, and at every rank splits `q̄(x)` into sticks
//! with [`bernoulli_splitting`] so that every distribution's excess ratio at
//! that rank is a union of sticks. Each cell `(x, y)` then maps to either `x`
//! or `a_i[x]` for distribution `i`.

use crate::alias::{majorized_alias_masses, AliasDecomposition};
use crate::bernoulli::{bernoulli_splitting, SplitLimits};
use crate::error::{Error, Result};
use crate::majorization::{glb_of_sorted, majorization_violation, GlbResult};
use crate::numeric::CompensatedSum;
use crate::pmf::{capped_geometric, entropy_of, sort_descending, total_variation, Pmf, RenyiOrder, SortedPmf};

/// Tolerance used by [`verify_coupling`].
pub const VERIFY_TOL: f64 = 1e-9;

/// Which rank of `∧S` and which stick of its split produced a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellOrigin {
    pub rank: usize,
    pub stick: usize,
}

/// Underlying pmf over cells plus one aggregation map per input distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    q: Pmf,
    maps: Vec<Vec<usize>>,
    provenance: Vec<CellOrigin>,
    n: usize,
    limits: SplitLimits,
}

impl Coupling {
    /// Assembles a coupling from stored parts, checking shapes only.
    pub fn from_parts(
        q: Vec<f64>,
        maps: Vec<Vec<usize>>,
        provenance: Vec<CellOrigin>,
        n: usize,
        limits: SplitLimits,
    ) -> Result<Self> {
        let q = Pmf::new(q)?;
        for map in &maps {
            if map.len() != q.len() {
                return Err(Error::LengthMismatch {
                    left: map.len(),
                    right: q.len(),
                });
            }
            if let Some(&bad) = map.iter().find(|&&l| l >= n) {
                return Err(Error::BadParameter(format!(
                    "label {bad} out of range for ground set of size {n}"
                )));
            }
        }
        if !provenance.is_empty() && provenance.len() != q.len() {
            return Err(Error::LengthMismatch {
                left: provenance.len(),
                right: q.len(),
            });
        }
        limits.validate()?;
        Ok(Self {
            q,
            maps,
            provenance,
            n,
            limits,
        })
    }

    /// The underlying pmf over cells.
    pub fn q(&self) -> &Pmf {
        &self.q
    }

    /// `maps()[i][cell]` is the original label of distribution `i` at `cell`.
    pub fn maps(&self) -> &[Vec<usize>] {
        &self.maps
    }

    pub fn provenance(&self) -> &[CellOrigin] {
        &self.provenance
    }

    /// Number of coupled distributions.
    pub fn m(&self) -> usize {
        self.maps.len()
    }

    /// Size of the common label set.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_cells(&self) -> usize {
        self.q.len()
    }

    pub fn limits(&self) -> SplitLimits {
        self.limits
    }

    pub fn labels(&self, cell: usize) -> Vec<usize> {
        self.maps.iter().map(|m| m[cell]).collect()
    }

    /// Distribution of `g_i(Z)` for `Z ~ q`, over `0..n`.
    pub fn pushforward(&self, i: usize) -> Vec<f64> {
        let mut out = vec![CompensatedSum::new(); self.n];
        for (&mass, &label) in self.q.masses().iter().zip(&self.maps[i]) {
            out[label].add(mass);
        }
        out.iter().map(CompensatedSum::value).collect()
    }

    pub fn support_size(&self) -> usize {
        self.q.masses().iter().filter(|&&m| m > 0.0).count()
    }

    pub fn entropy(&self, order: RenyiOrder) -> f64 {
        self.q.entropy(order)
    }
}

/// By-products of [`compute_coupling_detailed`].
#[derive(Debug, Clone)]
pub struct Construction {
    pub coupling: Coupling,
    pub glb: GlbResult,
    pub sorted: Vec<SortedPmf>,
    pub decompositions: Vec<AliasDecomposition>,
    /// Largest over ranks `x >= 1` of `min_i r_i[x]`; zero up to rounding.
    pub max_min_excess: f64,
}

pub fn compute_coupling(ps: &[Pmf], limits: SplitLimits) -> Result<Coupling> {
    compute_coupling_detailed(ps, limits).map(|c| c.coupling)
}

pub fn compute_coupling_detailed(ps: &[Pmf], limits: SplitLimits) -> Result<Construction> {
    if ps.is_empty() {
        return Err(Error::EmptyCollection);
    }
    limits.validate()?;
    let m = ps.len();
    let n = ps.iter().map(Pmf::len).max().unwrap_or(0);
    let sorted: Vec<SortedPmf> = ps.iter().map(|p| sort_descending(&p.padded(n))).collect();
    let glb = glb_of_sorted(&sorted)?;
    let decompositions = sorted
        .iter()
        .map(|s| majorized_alias_masses(s.masses(), glb.masses()))
        .collect::<Result<Vec<_>>>()?;

    let mut masses = Vec::new();
    let mut maps = vec![Vec::new(); m];
    let mut provenance = Vec::new();
    let mut max_min_excess = 0.0f64;
    let mut ratios = vec![0.0; m];

    for (rank, &qbar) in glb.masses().iter().enumerate() {
        if qbar <= 0.0 {
            continue;
        }
        let mut min_excess = f64::INFINITY;
        let mut argmin = 0;
        for (i, (ratio, dec)) in ratios.iter_mut().zip(&decompositions).enumerate() {
            *ratio = dec.ratio(rank);
            if dec.excess()[rank] < min_excess {
                min_excess = dec.excess()[rank];
                argmin = i;
            }
        }
        if rank > 0 {
            max_min_excess = max_min_excess.max(min_excess);
            // the smallest excess is zero; anything left is cancellation noise
            // and would cost an extra stick
            ratios[argmin] = 0.0;
        }
        let split = bernoulli_splitting(&ratios, limits)?;
        for (stick, &len) in split.sticks().iter().enumerate() {
            let mass = qbar * len;
            if mass <= 0.0 {
                continue;
            }
            masses.push(mass);
            provenance.push(CellOrigin { rank, stick });
            for (i, map) in maps.iter_mut().enumerate() {
                let target = if split.uses(i, stick) {
                    decompositions[i].alias()[rank].unwrap_or(rank)
                } else {
                    rank
                };
                map.push(sorted[i].original_label(target));
            }
        }
    }
    debug_assert!(max_min_excess <= VERIFY_TOL, "min excess {max_min_excess}");

    let coupling = Coupling {
        q: Pmf::new(masses)?,
        maps,
        provenance,
        n,
        limits,
    };
    Ok(Construction {
        coupling,
        glb,
        sorted,
        decompositions,
        max_min_excess,
    })
}

/// One named check of a [`VerificationReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub m: usize,
    pub n: usize,
    pub order: RenyiOrder,
    /// Total variation between each pushforward and its target.
    pub tv: Vec<f64>,
    pub tv_tolerance: f64,
    pub entropy_q: f64,
    pub entropy_glb: f64,
    pub gap: f64,
    /// `2 - 2^(2-m)`.
    pub gap_bound: f64,
    pub renyi_q: f64,
    pub renyi_glb: f64,
    /// Rényi entropy of the capped geometric distribution over `m` atoms.
    pub renyi_bound: f64,
    pub support: usize,
    pub support_bound: usize,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn max_tv(&self) -> f64 {
        self.tv.iter().copied().fold(0.0, f64::max)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Re-checks every guarantee of the construction against the inputs `ps`.
///
/// Never fails: problems are reported as failed checks.
pub fn verify_coupling(c: &Coupling, ps: &[Pmf], order: RenyiOrder) -> VerificationReport {
    let m = ps.len();
    let n = ps.iter().map(Pmf::len).max().unwrap_or(0);
    let mut checks = Vec::new();

    let shape_ok = m == c.m() && m > 0 && c.n() >= n;
    checks.push(Check {
        name: "shape",
        passed: shape_ok,
        detail: format!(
            "coupling has {} maps over {} labels; input has {m} pmfs over {n} labels",
            c.m(),
            c.n()
        ),
    });

    let tv_tolerance = VERIFY_TOL + c.limits().error_bound();
    let tv: Vec<f64> = if shape_ok {
        ps.iter()
            .enumerate()
            .map(|(i, p)| total_variation(&c.pushforward(i), p.masses()))
            .collect()
    } else {
        Vec::new()
    };
    for (i, &d) in tv.iter().enumerate() {
        if d > tv_tolerance {
            checks.push(Check {
                name: "marginal",
                passed: false,
                detail: format!("distribution {i}: total variation {d:e} exceeds {tv_tolerance:e}"),
            });
        }
    }
    if shape_ok && tv.iter().all(|&d| d <= tv_tolerance) {
        checks.push(Check {
            name: "marginal",
            passed: true,
            detail: format!("all {m} marginals within {tv_tolerance:e}"),
        });
    }

    let sorted: Vec<SortedPmf> = ps.iter().map(|p| sort_descending(&p.padded(n))).collect();
    let glb_masses = glb_of_sorted(&sorted)
        .map(|g| g.masses().to_vec())
        .unwrap_or_default();
    let entropy_q = c.entropy(RenyiOrder::SHANNON);
    let entropy_glb = entropy_of(&glb_masses, RenyiOrder::SHANNON);
    let gap = entropy_q - entropy_glb;
    let mm = m.max(1);
    let gap_bound = 2.0 - (2.0 - mm as f64).exp2();

    if c.limits().is_exact() {
        checks.push(Check {
            name: "entropy lower bound",
            passed: gap >= -VERIFY_TOL,
            detail: format!("H(q) - H(glb) = {gap:.6} >= 0"),
        });
    }
    checks.push(Check {
        name: "entropy upper bound",
        passed: gap <= gap_bound + VERIFY_TOL,
        detail: format!("H(q) - H(glb) = {gap:.6} <= {gap_bound:.6}"),
    });

    let cgeom = capped_geometric(0.5, mm).expect("m >= 1");
    let renyi_q = c.entropy(order);
    let renyi_glb = entropy_of(&glb_masses, order);
    let renyi_bound = cgeom.entropy(order);
    checks.push(Check {
        name: "renyi upper bound",
        passed: renyi_q <= renyi_glb + renyi_bound + VERIFY_TOL,
        detail: format!(
            "H_{order}(q) = {renyi_q:.6} <= H_{order}(glb) + H_{order}(CGeom) = {:.6}",
            renyi_glb + renyi_bound
        ),
    });

    let support = c.support_size();
    let support_bound = mm * n.saturating_sub(1) + 1;
    checks.push(Check {
        name: "support",
        passed: support <= support_bound,
        detail: format!("{support} cells <= m(n-1)+1 = {support_bound}"),
    });

    let product: Vec<f64> = glb_masses
        .iter()
        .flat_map(|&g| cgeom.masses().iter().map(move |&w| g * w))
        .collect();
    let violation = majorization_violation(c.q().masses(), &product);
    checks.push(Check {
        name: "majorization",
        passed: violation.is_none(),
        detail: match violation {
            None => "glb x CGeom is majorized by q".to_string(),
            Some(v) => format!("fails at prefix {} by {:e}", v.prefix, v.deficit),
        },
    });

    VerificationReport {
        m,
        n,
        order,
        tv,
        tv_tolerance,
        entropy_q,
        entropy_glb,
        gap,
        gap_bound,
        renyi_q,
        renyi_glb,
        renyi_bound,
        support,
        support_bound,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::make_pmf;

    fn pmf(v: &[f64]) -> Pmf {
        make_pmf(v).unwrap()
    }

    fn golden() -> Vec<Pmf> {
        vec![pmf(&[0.5, 0.5]), pmf(&[0.75, 0.25])]
    }

    #[test]
    fn golden_pair() {
        let c = compute_coupling(&golden(), SplitLimits::EXACT).unwrap();
        assert_eq!(c.q().masses(), &[0.5, 0.25, 0.25]);
        assert_eq!(c.maps()[0], vec![0, 1, 1]);
        assert_eq!(c.maps()[1], vec![0, 0, 1]);
        assert_eq!(
            c.provenance(),
            &[
                CellOrigin { rank: 0, stick: 0 },
                CellOrigin { rank: 1, stick: 0 },
                CellOrigin { rank: 1, stick: 1 },
            ]
        );
        assert!((c.entropy(RenyiOrder::SHANNON) - 1.5).abs() < 1e-15);

        let report = verify_coupling(&c, &golden(), RenyiOrder::SHANNON);
        assert!(report.passed(), "{report:?}");
        assert!((report.gap - 0.5).abs() < 1e-15);
        assert_eq!(report.gap_bound, 1.0);
        assert_eq!(report.tv, vec![0.0, 0.0]);
        assert_eq!((report.support, report.support_bound), (3, 3));
    }

    #[test]
    fn single_distribution_is_identity() {
        let p = pmf(&[0.2, 0.5, 0.3]);
        let c = compute_coupling(std::slice::from_ref(&p), SplitLimits::EXACT).unwrap();
        assert_eq!(c.q().masses(), &[0.5, 0.3, 0.2]);
        assert_eq!(c.maps()[0], vec![1, 2, 0]);
        let report = verify_coupling(&c, &[p], RenyiOrder::SHANNON);
        assert!(report.passed());
        assert_eq!(report.gap, 0.0);
    }

    #[test]
    fn identical_pair_needs_no_split() {
        let p = pmf(&[0.1, 0.6, 0.3]);
        let c = compute_coupling(&[p.clone(), p.clone()], SplitLimits::EXACT).unwrap();
        assert_eq!(c.q().masses(), &[0.6, 0.3, 0.1]);
        assert_eq!(c.maps()[0], vec![1, 2, 0]);
        assert_eq!(c.maps()[1], c.maps()[0]);
    }

    #[test]
    fn zero_glb_ranks_are_skipped() {
        let c = compute_coupling(&[pmf(&[1.0, 0.0, 0.0]), pmf(&[0.0, 1.0])], SplitLimits::EXACT)
            .unwrap();
        assert_eq!(c.q().masses(), &[1.0]);
        assert_eq!(c.labels(0), vec![0, 1]);
        assert_eq!(c.n(), 3);
    }

    #[test]
    fn corrupted_map_fails_verification() {
        let c = compute_coupling(&golden(), SplitLimits::EXACT).unwrap();
        let mut maps = c.maps().to_vec();
        maps[1][1] = 1;
        let bad = Coupling::from_parts(
            c.q().masses().to_vec(),
            maps,
            c.provenance().to_vec(),
            c.n(),
            c.limits(),
        )
        .unwrap();
        let report = verify_coupling(&bad, &golden(), RenyiOrder::SHANNON);
        assert!(!report.passed());
        assert!(report.max_tv() > 0.2);
        assert!(report.failures().any(|f| f.name == "marginal"));
    }

    #[test]
    fn shape_mismatch_fails_verification() {
        let c = compute_coupling(&golden(), SplitLimits::EXACT).unwrap();
        let report = verify_coupling(&c, &golden()[..1], RenyiOrder::SHANNON);
        assert!(!report.passed());
        assert!(report.failures().any(|f| f.name == "shape"));
    }

    #[test]
    fn from_parts_validation() {
        assert!(Coupling::from_parts(vec![1.0], vec![vec![3]], vec![], 2, SplitLimits::EXACT).is_err());
        assert!(Coupling::from_parts(vec![0.5, 0.5], vec![vec![0]], vec![], 2, SplitLimits::EXACT).is_err());
        assert!(Coupling::from_parts(vec![0.5, 0.6], vec![], vec![], 2, SplitLimits::EXACT).is_err());
    }

    #[test]
    fn empty_collection() {
        assert_eq!(
            compute_coupling(&[], SplitLimits::EXACT),
            Err(Error::EmptyCollection)
        );
    }

    #[test]
    fn truncated_mode_tolerance() {
        let ps = vec![pmf(&[0.4, 0.35, 0.25]), pmf(&[0.5, 0.3, 0.2]), pmf(&[0.6, 0.3, 0.1])];
        let c = compute_coupling(&ps, SplitLimits::steps(2)).unwrap();
        let report = verify_coupling(&c, &ps, RenyiOrder::SHANNON);
        assert_eq!(report.tv_tolerance, 0.25 + VERIFY_TOL);
        assert!(report.passed(), "{report:?}");
    }
}
