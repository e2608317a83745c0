//! Validated probability mass functions and their entropies.
//!
//! All entropies are in bits. Labels are zero-based indices into the mass
//! vector.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

/// Entries in `[-NEGATIVE_CLAMP, 0)` are treated as rounding noise and clamped to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-12;
/// Allowed deviation of the input sum from one.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Orders within this distance of 1 use the Shannon formula.
pub const SHANNON_WINDOW: f64 = 1e-6;

/// A finite probability mass function over `0..len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    masses: Vec<f64>,
}

impl Pmf {
    /// Validates and renormalizes `masses`.
    ///
    /// Negative entries of magnitude at most `1e-12` are clamped to zero; the
    /// input must sum to one within `1e-9`, after which it is divided by its
    /// own (compensated) sum.
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::Empty);
        }
        let mut masses = masses;
        for (index, m) in masses.iter_mut().enumerate() {
            if !m.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if *m < 0.0 {
                if *m < -NEGATIVE_CLAMP {
                    return Err(Error::NegativeMass { index, value: *m });
                }
                *m = 0.0;
            }
        }
        let sum = compensated_sum(masses.iter().copied());
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum });
        }
        if sum != 1.0 {
            for m in masses.iter_mut() {
                *m /= sum;
            }
        }
        Ok(Self { masses })
    }

    /// The point mass at `label` over `0..len`.
    pub fn point(label: usize, len: usize) -> Self {
        let mut masses = vec![0.0; len.max(label + 1)];
        masses[label] = 1.0;
        Self { masses }
    }

    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::Empty);
        }
        Ok(Self {
            masses: vec![1.0 / len as f64; len],
        })
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn into_masses(self) -> Vec<f64> {
        self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Labels with strictly positive mass.
    pub fn support(&self) -> Vec<usize> {
        self.masses
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn max_mass(&self) -> f64 {
        self.masses.iter().copied().fold(0.0, f64::max)
    }

    /// Zero-pads to length `len` (no-op if already at least that long).
    pub fn padded(&self, len: usize) -> Self {
        let mut masses = self.masses.clone();
        if masses.len() < len {
            masses.resize(len, 0.0);
        }
        Self { masses }
    }

    pub fn sort_descending(&self) -> SortedPmf {
        sort_descending(self)
    }

    pub fn entropy(&self, order: RenyiOrder) -> f64 {
        entropy_of(&self.masses, order)
    }

    pub fn shannon_entropy(&self) -> f64 {
        entropy_of(&self.masses, RenyiOrder::SHANNON)
    }
}

impl AsRef<[f64]> for Pmf {
    fn as_ref(&self) -> &[f64] {
        &self.masses
    }
}

/// Validating constructor; see [`Pmf::new`].
pub fn make_pmf(masses: &[f64]) -> Result<Pmf> {
    Pmf::new(masses.to_vec())
}

/// A pmf sorted in descending order, remembering where each mass came from.
///
/// `perm()[k]` is the original label of the `k`-th largest mass.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedPmf {
    masses: Vec<f64>,
    perm: Vec<usize>,
}

impl SortedPmf {
    /// Wraps masses that are already non-increasing, with the identity permutation.
    pub fn from_sorted(pmf: Pmf) -> Result<Self> {
        let masses = pmf.into_masses();
        if let Some(index) = first_unsorted(&masses) {
            return Err(Error::NotSorted { index });
        }
        let perm = (0..masses.len()).collect();
        Ok(Self { masses, perm })
    }

    pub(crate) fn from_parts_unchecked(masses: Vec<f64>, perm: Vec<usize>) -> Self {
        debug_assert_eq!(masses.len(), perm.len());
        Self { masses, perm }
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Original label of sorted position `rank`.
    pub fn original_label(&self, rank: usize) -> usize {
        self.perm[rank]
    }

    /// Appends zero masses; the new positions map to the labels `len()..len`.
    pub fn padded(&self, len: usize) -> Self {
        let mut out = self.clone();
        for label in out.masses.len()..len {
            out.masses.push(0.0);
            out.perm.push(label);
        }
        out
    }

    /// The masses as a pmf in sorted label space.
    pub fn to_pmf(&self) -> Pmf {
        Pmf {
            masses: self.masses.clone(),
        }
    }

    /// Undo the sort: the pmf in original label space.
    pub fn unsorted(&self) -> Pmf {
        let mut masses = vec![0.0; self.masses.len()];
        for (&label, &m) in self.perm.iter().zip(&self.masses) {
            masses[label] = m;
        }
        Pmf { masses }
    }

    pub fn entropy(&self, order: RenyiOrder) -> f64 {
        entropy_of(&self.masses, order)
    }
}

pub(crate) fn first_unsorted(masses: &[f64]) -> Option<usize> {
    masses
        .windows(2)
        .position(|w| w[1] > w[0] + NEGATIVE_CLAMP)
        .map(|i| i + 1)
}

/// Stable descending sort; ties keep ascending original label order.
pub fn sort_descending(p: &Pmf) -> SortedPmf {
    let mut perm: Vec<usize> = (0..p.len()).collect();
    perm.sort_by(|&a, &b| {
        p.masses[b]
            .partial_cmp(&p.masses[a])
            .unwrap_or(Ordering::Equal)
    });
    let masses = perm.iter().map(|&i| p.masses[i]).collect();
    SortedPmf { masses, perm }
}

/// Order of a Rényi entropy, `alpha` in `[0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenyiOrder(f64);

impl RenyiOrder {
    pub const HARTLEY: RenyiOrder = RenyiOrder(0.0);
    pub const SHANNON: RenyiOrder = RenyiOrder(1.0);
    pub const MIN_ENTROPY: RenyiOrder = RenyiOrder(f64::INFINITY);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha < 0.0 {
            return Err(Error::BadParameter(format!(
                "Rényi order must lie in [0, ∞], got {alpha}"
            )));
        }
        Ok(Self(alpha))
    }

    pub fn alpha(self) -> f64 {
        self.0
    }

    pub fn is_shannon(self) -> bool {
        (self.0 - 1.0).abs() < SHANNON_WINDOW
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl std::str::FromStr for RenyiOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let alpha = match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" | "min" => f64::INFINITY,
            "shannon" => 1.0,
            _ => t
                .parse::<f64>()
                .map_err(|_| Error::BadParameter(format!("cannot parse Rényi order {s:?}")))?,
        };
        RenyiOrder::new(alpha)
    }
}

impl std::fmt::Display for RenyiOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Rényi entropy of `p` in bits; `f64::INFINITY` stands for an infinite value.
pub fn entropy(p: &Pmf, order: RenyiOrder) -> f64 {
    entropy_of(p.masses(), order)
}

/// Rényi entropy of a nonnegative mass vector (assumed normalized), summing
/// over strictly positive entries only.
pub fn entropy_of(masses: &[f64], order: RenyiOrder) -> f64 {
    let support = masses.iter().copied().filter(|&m| m > 0.0);
    let h = if order.is_shannon() {
        -compensated_sum(support.map(|m| m * m.log2()))
    } else if order.is_infinite() {
        -masses.iter().copied().fold(0.0, f64::max).log2()
    } else if order.alpha() == 0.0 {
        (support.count() as f64).log2()
    } else {
        let alpha = order.alpha();
        compensated_sum(support.map(|m| m.powf(alpha))).log2() / (1.0 - alpha)
    };
    h.max(0.0)
}

/// Capped geometric pmf over `k` atoms: `gamma (1-gamma)^(x-1)` for the first
/// `k-1` atoms and the tail `(1-gamma)^(k-1)` folded into the last.
pub fn capped_geometric(gamma: f64, k: usize) -> Result<Pmf> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::BadParameter(format!(
            "geometric parameter must lie in (0, 1], got {gamma}"
        )));
    }
    if k == 0 {
        return Err(Error::BadParameter("capped geometric needs k >= 1".into()));
    }
    let mut masses = Vec::with_capacity(k);
    let mut tail = 1.0;
    for _ in 1..k {
        masses.push(gamma * tail);
        tail *= 1.0 - gamma;
    }
    masses.push(tail);
    Pmf::new(masses)
}

/// Closed-form Rényi entropy of the geometric distribution with parameter 1/2.
pub fn geometric_entropy(order: RenyiOrder) -> f64 {
    if order.is_shannon() {
        2.0
    } else if order.is_infinite() {
        1.0
    } else if order.alpha() == 0.0 {
        f64::INFINITY
    } else {
        let alpha = order.alpha();
        (-alpha - (1.0 - (-alpha).exp2()).log2()) / (1.0 - alpha)
    }
}

/// Total variation distance, zero-padding the shorter vector.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * compensated_sum((0..n).map(|i| (get(p, i) - get(q, i)).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn order(a: f64) -> RenyiOrder {
        RenyiOrder::new(a).unwrap()
    }

    #[test]
    fn make_pmf_examples() {
        assert!(make_pmf(&[0.5, 0.5]).is_ok());
        let p = make_pmf(&[0.3, 0.3, 0.2, 0.1, 0.1]).unwrap();
        assert_eq!(p.len(), 5);
        assert!(matches!(
            make_pmf(&[0.6, 0.6]),
            Err(Error::NotNormalized { .. })
        ));
        assert_eq!(make_pmf(&[]), Err(Error::Empty));
    }

    #[test]
    fn make_pmf_negative_handling() {
        let p = make_pmf(&[1.0, -1e-13]).unwrap();
        assert_eq!(p.masses(), &[1.0, 0.0]);
        assert!(matches!(
            make_pmf(&[1.1, -0.1]),
            Err(Error::NegativeMass { index: 1, .. })
        ));
        assert!(matches!(
            make_pmf(&[f64::NAN, 1.0]),
            Err(Error::NonFinite { index: 0 })
        ));
    }

    #[test]
    fn make_pmf_keeps_zeros_and_reports_support() {
        let p = make_pmf(&[0.0, 0.7, 0.0, 0.3]).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.support(), vec![1, 3]);
    }

    #[test]
    fn make_pmf_renormalizes() {
        let p = make_pmf(&[0.5 + 4e-10, 0.5]).unwrap();
        assert!((compensated_sum(p.masses().iter().copied()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sort_examples() {
        let s = sort_descending(&make_pmf(&[0.2, 0.5, 0.3]).unwrap());
        assert_eq!(s.masses(), &[0.5, 0.3, 0.2]);
        assert_eq!(s.perm(), &[1, 2, 0]);

        let p = make_pmf(&[0.37, 0.36, 0.25, 0.02, 0.0]).unwrap();
        let s = sort_descending(&p);
        assert_eq!(s.masses(), p.masses());
        assert_eq!(s.perm(), &[0, 1, 2, 3, 4]);

        let s = sort_descending(&make_pmf(&[0.25, 0.25, 0.5]).unwrap());
        assert_eq!(s.masses(), &[0.5, 0.25, 0.25]);
        assert_eq!(s.perm(), &[2, 0, 1]);
    }

    #[test]
    fn entropy_examples() {
        let fair = make_pmf(&[0.5, 0.5]).unwrap();
        assert_eq!(entropy(&fair, RenyiOrder::SHANNON), 1.0);
        let cg = make_pmf(&[0.5, 0.25, 0.25]).unwrap();
        assert!((entropy(&cg, RenyiOrder::SHANNON) - 1.5).abs() < 1e-15);
        let p = make_pmf(&[0.6, 0.225, 0.1, 0.05, 0.025]).unwrap();
        let h = entropy(&p, RenyiOrder::MIN_ENTROPY);
        assert!((h - 0.736_965_594_166_206).abs() < 1e-12);
    }

    #[test]
    fn entropy_special_orders() {
        let p = make_pmf(&[0.5, 0.25, 0.25, 0.0]).unwrap();
        assert_eq!(entropy(&p, RenyiOrder::HARTLEY), 3f64.log2());
        // near-1 orders take the Shannon branch
        assert_eq!(entropy(&p, order(1.0 + 1e-7)), entropy(&p, RenyiOrder::SHANNON));
        // order 2 is the collision entropy
        let collision = -(0.25f64 + 0.0625 + 0.0625).log2();
        assert!((entropy(&p, order(2.0)) - collision).abs() < 1e-14);
        assert_eq!(entropy(&Pmf::point(0, 3), RenyiOrder::SHANNON), 0.0);
    }

    #[test]
    fn renyi_order_parsing() {
        assert_eq!("inf".parse::<RenyiOrder>().unwrap(), RenyiOrder::MIN_ENTROPY);
        assert_eq!("0.5".parse::<RenyiOrder>().unwrap().alpha(), 0.5);
        assert!("-1".parse::<RenyiOrder>().is_err());
        assert!("abc".parse::<RenyiOrder>().is_err());
    }

    #[test]
    fn capped_geometric_examples() {
        assert_eq!(capped_geometric(0.5, 3).unwrap().masses(), &[0.5, 0.25, 0.25]);
        assert_eq!(capped_geometric(0.5, 1).unwrap().masses(), &[1.0]);
        assert_eq!(
            capped_geometric(0.5, 5).unwrap().masses(),
            &[0.5, 0.25, 0.125, 0.0625, 0.0625]
        );
        assert!(capped_geometric(0.0, 3).is_err());
        assert!(capped_geometric(1.5, 3).is_err());
        assert!(capped_geometric(0.5, 0).is_err());
        assert_eq!(capped_geometric(1.0, 3).unwrap().masses(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn capped_geometric_entropy_closed_form() {
        for m in 1..=60 {
            let h = entropy(&capped_geometric(0.5, m).unwrap(), RenyiOrder::SHANNON);
            let expected = 2.0 - (2.0 - m as f64).exp2();
            assert!((h - expected).abs() < 1e-12, "m={m}: {h} vs {expected}");
        }
    }

    #[test]
    fn geometric_entropy_examples() {
        assert_eq!(geometric_entropy(RenyiOrder::SHANNON), 2.0);
        assert_eq!(geometric_entropy(RenyiOrder::MIN_ENTROPY), 1.0);
        assert_eq!(geometric_entropy(RenyiOrder::HARTLEY), f64::INFINITY);
        let expected = 2.0 - (4.0f64 / 3.0).log2();
        assert!((geometric_entropy(order(2.0)) - expected).abs() < 1e-14);
    }

    #[test]
    fn geometric_entropy_matches_series() {
        // sum the first 200 atoms of Geom(1/2) directly
        for &alpha in &[0.25, 0.5, 0.9, 1.5, 2.0, 3.0, 10.0] {
            let s: f64 = (1..=200).map(|i| (-(i as f64) * alpha).exp2()).sum();
            let series = s.log2() / (1.0 - alpha);
            assert!((geometric_entropy(order(alpha)) - series).abs() < 1e-12);
        }
    }

    #[test]
    fn total_variation_pads() {
        assert_eq!(total_variation(&[1.0], &[0.5, 0.5]), 0.5);
        assert_eq!(total_variation(&[0.5, 0.5], &[0.5, 0.5, 0.0]), 0.0);
    }

    fn arb_pmf() -> impl Strategy<Value = Pmf> {
        prop::collection::vec(0.0f64..1.0, 1..12).prop_filter_map("all zero", |w| {
            let s: f64 = w.iter().sum();
            (s > 1e-6).then(|| Pmf::new(w.iter().map(|x| x / s).collect()).unwrap())
        })
    }

    proptest! {
        #[test]
        fn renyi_monotone_in_order(p in arb_pmf(), a in 0.0f64..6.0, d in 0.01f64..6.0) {
            let lo = entropy(&p, order(a));
            let hi = entropy(&p, order(a + d));
            prop_assert!(hi <= lo + 1e-12);
            prop_assert!(entropy(&p, RenyiOrder::MIN_ENTROPY) <= hi + 1e-12);
        }

        #[test]
        fn sort_is_permutation_invariant(p in arb_pmf(), a in 0.0f64..5.0) {
            let s = sort_descending(&p);
            prop_assert_eq!(s.unsorted(), p.clone());
            prop_assert!(s.masses().windows(2).all(|w| w[0] >= w[1]));
            let o = order(a);
            prop_assert!((s.entropy(o) - p.entropy(o)).abs() < 1e-12);
        }

        #[test]
        fn capped_geometric_sums_to_one(g in 0.001f64..=1.0, k in 1usize..200) {
            let p = capped_geometric(g, k).unwrap();
            prop_assert!((p.masses().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
