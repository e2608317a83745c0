//! Near-minimum-entropy couplings of finite collections of discrete
//! distributions.
//!
//! Given pmfs `p_1, ..., p_m` over `n` labels, [`compute_coupling`] returns a
//! single pmf `q` over at most `m(n-1)+1` cells together with one map per
//! input such that pushing `q` through map `i` gives `p_i`. Its entropy lies
//! between `H(∧S)` and `H(∧S) + 2 - 2^(2-m)`, where `∧S` is the greatest lower
//! bound of the inputs under majorization; no coupling can go below `H(∧S)`.
//!
//! ```
//! use mincouple_core::{compute_coupling, make_pmf, SplitLimits, RenyiOrder};
//!
//! let ps = [make_pmf(&[0.5, 0.5])?, make_pmf(&[0.75, 0.25])?];
//! let c = compute_coupling(&ps, SplitLimits::EXACT)?;
//! assert_eq!(c.q().masses(), &[0.5, 0.25, 0.25]);
//! assert_eq!(c.maps()[1], vec![0, 0, 1]);
//! assert!((c.entropy(RenyiOrder::SHANNON) - 1.5).abs() < 1e-12);
//! # Ok::<(), mincouple_core::Error>(())
//! ```

pub mod alias;
pub mod bernoulli;
pub mod causal;
pub mod coupling;
pub mod error;
pub mod geom_split;
pub mod majorization;
pub mod numeric;
pub mod pmf;
pub mod sampler;

pub use alias::{as_transition, majorized_alias, AliasDecomposition, Transition, TransitionRow};
pub use bernoulli::{bernoulli_splitting, BernoulliSplit, SplitLimits};
pub use causal::{causal_direction, glb_entropy_score, CausalReport, Direction};
pub use coupling::{
    compute_coupling, compute_coupling_detailed, verify_coupling, CellOrigin, Check, Construction,
    Coupling, VerificationReport,
};
pub use error::{Error, Result};
pub use geom_split::{
    couple_geometric, geom_split, truncated_pushforward, GeomCell, GeomSplitMap,
    GeometricCoupling, DEFAULT_DIGIT_CAP,
};
pub use majorization::{glb_oracle, greatest_lower_bound, majorizes, GlbResult};
pub use pmf::{
    capped_geometric, entropy, entropy_of, geometric_entropy, make_pmf, sort_descending,
    total_variation, Pmf, RenyiOrder, SortedPmf,
};
pub use sampler::{
    sample_alias, sample_coupling, write_tsv, AliasSampler, CouplingSampler, Draw, Layout,
    SampleStream, StreamRng,
};
