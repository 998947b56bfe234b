//! Generators of finite ultrametric spaces over a fixed distance alphabet:
//! exhaustive enumeration and seeded dendrogram sampling.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::space::FiniteMetricSpace;

pub const MAX_EXHAUSTIVE_N: usize = 5;
pub const MAX_EXHAUSTIVE_ALPHABET: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorMode {
    Exhaustive,
    Dendrogram,
}

impl FromStr for GeneratorMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exhaustive" => Ok(GeneratorMode::Exhaustive),
            "dendrogram" | "sampled" => Ok(GeneratorMode::Dendrogram),
            other => Err(format!("unknown generator mode `{other}` (expected exhaustive or dendrogram)")),
        }
    }
}

impl fmt::Display for GeneratorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorMode::Exhaustive => "exhaustive",
            GeneratorMode::Dendrogram => "dendrogram",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorSpec {
    pub n: usize,
    pub alphabet: Vec<Rational>,
    pub mode: GeneratorMode,
    pub seed: u64,
    /// Sample budget; for exhaustive mode an optional cap on emitted spaces.
    pub count: Option<u64>,
    /// Lifts the exhaustive-mode size caps.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub unbounded: bool,
}

impl GeneratorSpec {
    pub fn exhaustive(n: usize, alphabet: Vec<Rational>) -> Self {
        GeneratorSpec { n, alphabet, mode: GeneratorMode::Exhaustive, seed: 0, count: None, unbounded: false }
    }

    pub fn dendrogram(n: usize, alphabet: Vec<Rational>, seed: u64, count: u64) -> Self {
        GeneratorSpec { n, alphabet, mode: GeneratorMode::Dendrogram, seed, count: Some(count), unbounded: false }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptySpace);
        }
        if self.alphabet.iter().any(|a| !a.is_positive()) {
            return Err(Error::InvalidAlphabet("entries must be positive".into()));
        }
        if self.alphabet.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidAlphabet("entries must be strictly increasing".into()));
        }
        if self.n >= 2 && self.alphabet.is_empty() {
            return Err(Error::AlphabetTooSmall(format!("{} points need at least one distance value", self.n)));
        }
        if self.mode == GeneratorMode::Exhaustive && !self.unbounded {
            if self.n > MAX_EXHAUSTIVE_N {
                return Err(Error::GeneratorCap(format!("n = {} exceeds {MAX_EXHAUSTIVE_N}", self.n)));
            }
            if self.alphabet.len() > MAX_EXHAUSTIVE_ALPHABET {
                return Err(Error::GeneratorCap(format!(
                    "alphabet of {} values exceeds {MAX_EXHAUSTIVE_ALPHABET}",
                    self.alphabet.len()
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn point_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("p{i}")).collect()
}

/// Every ultrametric matrix over the alphabet, in lexicographic order of
/// the upper triangle read row by row.
pub struct UltrametricEnumerator {
    n: usize,
    alphabet: Vec<Rational>,
    digits: Vec<usize>,
    done: bool,
    remaining: Option<u64>,
}

pub fn enumerate_ultrametrics(spec: &GeneratorSpec) -> Result<UltrametricEnumerator> {
    spec.validate()?;
    let n = spec.n;
    Ok(UltrametricEnumerator {
        n,
        alphabet: spec.alphabet.clone(),
        digits: vec![0; n * (n - 1) / 2],
        done: false,
        remaining: spec.count,
    })
}

impl UltrametricEnumerator {
    fn rank(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        // position of (a, b) in row-major upper-triangle order
        let pos = a * (2 * self.n - a - 1) / 2 + (b - a - 1);
        self.digits[pos]
    }

    /// Ultrametric iff in every triangle the two largest values coincide;
    /// comparing alphabet indices is enough since the alphabet is sorted.
    fn current_is_ultrametric(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let mut t = [self.rank(i, j), self.rank(j, k), self.rank(i, k)];
                    t.sort_unstable();
                    if t[1] != t[2] {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn advance(&mut self) {
        let k = self.alphabet.len();
        for pos in (0..self.digits.len()).rev() {
            self.digits[pos] += 1;
            if self.digits[pos] < k {
                return;
            }
            self.digits[pos] = 0;
        }
        self.done = true;
    }

    fn build(&self) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn(point_labels(self.n), |i, j| self.alphabet[self.rank(i, j)].clone())
            .expect("enumerated matrices are valid")
    }
}

impl Iterator for UltrametricEnumerator {
    type Item = FiniteMetricSpace;

    fn next(&mut self) -> Option<FiniteMetricSpace> {
        if self.remaining == Some(0) {
            return None;
        }
        while !self.done {
            let hit = self.current_is_ultrametric();
            let space = hit.then(|| self.build());
            self.advance();
            if let Some(space) = space {
                if let Some(r) = self.remaining.as_mut() {
                    *r -= 1;
                }
                return Some(space);
            }
        }
        None
    }
}

/// The first dendrogram sample of `spec`.
pub fn sample_dendrogram(spec: &GeneratorSpec) -> Result<FiniteMetricSpace> {
    sample_dendrogram_at(spec, 0)
}

/// Sample number `index` of `spec`; each index has its own ChaCha stream,
/// so samples can be drawn in any order or in parallel.
pub fn sample_dendrogram_at(spec: &GeneratorSpec, index: u64) -> Result<FiniteMetricSpace> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index);
    let n = spec.n;
    let mut levels = vec![0usize; n * n];
    let points: Vec<usize> = (0..n).collect();
    split(&points, spec.alphabet.len(), &mut rng, &mut levels, n);
    FiniteMetricSpace::from_fn(point_labels(n), |i, j| spec.alphabet[levels[i * n + j]].clone())
}

/// Separates `points` at a level drawn below `upper`, then recurses into the
/// blocks with strictly smaller levels. At the lowest level the only
/// consistent split is into singletons.
fn split(points: &[usize], upper: usize, rng: &mut ChaCha8Rng, levels: &mut [usize], n: usize) {
    if points.len() < 2 {
        return;
    }
    debug_assert!(upper > 0);
    let level = rng.gen_range(0..upper);
    let blocks: Vec<Vec<usize>> = if level == 0 {
        points.iter().map(|&p| vec![p]).collect()
    } else {
        random_partition(points, rng)
    };
    for (bi, a) in blocks.iter().enumerate() {
        for b in &blocks[bi + 1..] {
            for &x in a {
                for &y in b {
                    levels[x * n + y] = level;
                    levels[y * n + x] = level;
                }
            }
        }
    }
    for block in &blocks {
        split(block, level, rng, levels, n);
    }
}

/// A random partition into at least two non-empty blocks, ordered by first
/// element.
fn random_partition(points: &[usize], rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let s = points.len();
    let k = rng.gen_range(2..=s);
    loop {
        let assignment: Vec<usize> = points.iter().map(|_| rng.gen_range(0..k)).collect();
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (&p, &b) in points.iter().zip(&assignment) {
            blocks[b].push(p);
        }
        blocks.retain(|b| !b.is_empty());
        if blocks.len() >= 2 {
            blocks.sort_by_key(|b| b[0]);
            return blocks;
        }
    }
}
