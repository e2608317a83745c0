//! Seeded sampling from alias decompositions and from couplings.
//!
//! The generator is ChaCha8 keyed by a SplitMix64 expansion of the 64-bit
//! seed, with the ChaCha stream id selecting independent sub-streams.
//! Uniform doubles take the top 53 bits of each 64-bit output. A fixed seed
//! therefore yields the same stream on every platform.

use std::io::{self, Write};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alias::AliasDecomposition;
use crate::coupling::Coupling;
use crate::numeric::prefix_sums;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic counter-based generator.
#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: ChaCha8Rng,
}

impl StreamRng {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Independent sub-stream `stream` of `seed`.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut state = seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(stream);
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Inverse-CDF sampler over a finite mass vector.
#[derive(Debug, Clone)]
struct InverseCdf {
    cdf: Vec<f64>,
    last_positive: usize,
}

impl InverseCdf {
    fn new(masses: &[f64]) -> Self {
        let cdf = prefix_sums(masses);
        let last_positive = masses.iter().rposition(|&m| m > 0.0).unwrap_or(0);
        Self { cdf, last_positive }
    }

    fn draw(&self, u: f64) -> usize {
        let total = self.cdf.last().copied().unwrap_or(1.0);
        let idx = self.cdf.partition_point(|&c| c <= u * total);
        idx.min(self.last_positive)
    }
}

/// Draws cells from a coupling's underlying pmf.
#[derive(Debug, Clone)]
pub struct CouplingSampler<'a> {
    coupling: &'a Coupling,
    cells: InverseCdf,
}

impl<'a> CouplingSampler<'a> {
    pub fn new(coupling: &'a Coupling) -> Self {
        Self {
            coupling,
            cells: InverseCdf::new(coupling.q().masses()),
        }
    }

    pub fn draw_cell(&self, rng: &mut StreamRng) -> usize {
        self.cells.draw(rng.uniform())
    }

    pub fn draw(&self, rng: &mut StreamRng) -> Draw {
        let cell = self.draw_cell(rng);
        Draw {
            cell,
            labels: self.coupling.labels(cell),
        }
    }
}

/// One correlated draw: the cell and every distribution's label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Draw {
    pub cell: usize,
    pub labels: Vec<usize>,
}

/// `count` draws from a coupling under a fixed seed.
#[derive(Debug, Clone)]
pub struct SampleStream<'a> {
    sampler: CouplingSampler<'a>,
    rng: StreamRng,
    seed: u64,
    remaining: usize,
}

impl SampleStream<'_> {
    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl Iterator for SampleStream<'_> {
    type Item = Draw;

    fn next(&mut self) -> Option<Draw> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        Some(self.sampler.draw(&mut self.rng))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

impl ExactSizeIterator for SampleStream<'_> {}

pub fn sample_coupling(c: &Coupling, seed: u64, count: usize) -> SampleStream<'_> {
    SampleStream {
        sampler: CouplingSampler::new(c),
        rng: StreamRng::new(seed),
        seed,
        remaining: count,
    }
}

/// Columns written by [`write_tsv`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Layout {
    Cell,
    Labels,
    #[default]
    Both,
}

/// Writes one tab-separated line per draw.
pub fn write_tsv<W: Write>(
    draws: impl Iterator<Item = Draw>,
    layout: Layout,
    out: &mut W,
) -> io::Result<()> {
    let mut line = String::new();
    for d in draws {
        line.clear();
        if layout != Layout::Labels {
            line.push_str(&d.cell.to_string());
        }
        if layout != Layout::Cell {
            for (j, l) in d.labels.iter().enumerate() {
                if j > 0 || layout == Layout::Both {
                    line.push('\t');
                }
                line.push_str(&l.to_string());
            }
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Alias-method sampler: draw `y ~ q`, then move to `a[y]` with probability
/// `r[y] / q(y)`. Output labels are ranks of the sorted target.
#[derive(Debug, Clone)]
pub struct AliasSampler {
    source: Option<InverseCdf>,
    n: usize,
    ratios: Vec<f64>,
    alias: Vec<usize>,
}

impl AliasSampler {
    pub fn new(dec: &AliasDecomposition) -> Self {
        let q = dec.q();
        let n = q.len();
        let uniform = q.iter().all(|&m| m == q[0]);
        Self {
            source: (!uniform).then(|| InverseCdf::new(q)),
            n,
            ratios: (0..n).map(|x| dec.ratio(x)).collect(),
            alias: dec
                .alias()
                .iter()
                .enumerate()
                .map(|(x, a)| a.unwrap_or(x))
                .collect(),
        }
    }

    pub fn draw(&self, rng: &mut StreamRng) -> usize {
        let u = rng.uniform();
        let y = match &self.source {
            // classic Walker table: constant work per draw
            None => ((u * self.n as f64) as usize).min(self.n - 1),
            Some(cdf) => cdf.draw(u),
        };
        let z = rng.uniform();
        if z < self.ratios[y] {
            self.alias[y]
        } else {
            y
        }
    }
}

pub fn sample_alias(dec: &AliasDecomposition, seed: u64, count: usize) -> Vec<usize> {
    let sampler = AliasSampler::new(dec);
    let mut rng = StreamRng::new(seed);
    (0..count).map(|_| sampler.draw(&mut rng)).collect()
}
