//! Desk-scale checks of the equidistance characterization and the two
//! four-point conjectures, plus campaigns driving them over generated
//! spaces.
//!
//! Every check has a fast primary path and a separate reference path built
//! on restricted subspaces and brute force. A campaign reports a
//! counterexample only after it survives a JSON round trip and the
//! reference path.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::decision::{embeds_in_dplus, find_center_unchecked, forbidden_scan_unchecked, DplusEmbedding};
use crate::diametrical::{classify_four_point, classify_quad_unchecked, quads, FourPointClass};
use crate::error::{Error, Result};
use crate::generate::{enumerate_ultrametrics, sample_dendrogram_at, GeneratorMode, GeneratorSpec};
use crate::models;
use crate::space::FiniteMetricSpace;
use crate::weak::{rank_matrix, weakly_similar};

pub const INTERPRETATION: &str =
    "\"weakly isometric\" is read as weak similarity: a point bijection composed with a strictly increasing bijection of distance sets";

pub const DEFAULT_SAMPLE_COUNT: u64 = 1000;
const BATCH: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConjectureId {
    /// Equidistant iff every four-point subspace is K1111.
    Equidistant,
    K112,
    K13,
    /// Center criterion against the forbidden-quad scan.
    Agreement,
}

impl ConjectureId {
    pub const ALL: [ConjectureId; 4] =
        [ConjectureId::Equidistant, ConjectureId::K112, ConjectureId::K13, ConjectureId::Agreement];

    pub fn as_str(self) -> &'static str {
        match self {
            ConjectureId::Equidistant => "equidistant",
            ConjectureId::K112 => "k112",
            ConjectureId::K13 => "k13",
            ConjectureId::Agreement => "agreement",
        }
    }

    fn min_points(self) -> usize {
        match self {
            ConjectureId::Agreement => 1,
            _ => 4,
        }
    }
}

impl fmt::Display for ConjectureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConjectureId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ConjectureId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::UnknownConjecture(s.to_string()))
    }
}

/// A statement that may be undefined for the given input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Truth {
    True,
    False,
    NotEvaluable,
}

impl From<bool> for Truth {
    fn from(b: bool) -> Self {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }
}

impl Truth {
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Truth::True => Some(true),
            Truth::False => Some(false),
            Truth::NotEvaluable => None,
        }
    }
}

impl Serialize for Truth {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self.as_bool() {
            Some(b) => serializer.serialize_bool(b),
            None => serializer.serialize_str("NOT_EVALUABLE"),
        }
    }
}

fn require_quads(space: &FiniteMetricSpace) -> Result<()> {
    if space.len() < 4 {
        return Err(Error::TooFewPoints { needed: 4, found: space.len() });
    }
    space.require_ultrametric()
}

fn quad_labels(space: &FiniteMetricSpace, q: [usize; 4]) -> [String; 4] {
    q.map(|i| space.label(i).to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquidistantCheck {
    pub equidistant: bool,
    pub all_k1111: bool,
    pub agree: bool,
}

pub fn check_equidistant(space: &FiniteMetricSpace) -> Result<EquidistantCheck> {
    require_quads(space)?;
    let equidistant = space.spectrum().positive().len() == 1;
    let all_k1111 = quads(space.len()).all(|q| classify_quad_unchecked(space, q) == FourPointClass::K1111);
    Ok(EquidistantCheck { equidistant, all_k1111, agree: equidistant == all_k1111 })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct K112Check {
    /// Every four-point subspace has diametrical graph K112.
    pub all_k112: bool,
    /// Every four-point subspace is weakly similar to W4.
    pub all_w4: bool,
    /// The whole space is weakly similar to W4; only defined for four points.
    pub whole_w4: Truth,
    /// Subsets where exactly one of the two per-subset properties holds.
    pub violations: Vec<[String; 4]>,
}

impl K112Check {
    pub fn consistent(&self) -> bool {
        self.violations.is_empty()
            && self.all_k112 == self.all_w4
            && self.whole_w4.as_bool().is_none_or(|w| w == self.all_w4)
    }
}

pub fn check_k112_conjecture(space: &FiniteMetricSpace) -> Result<K112Check> {
    require_quads(space)?;
    let w4 = models::w4();
    let (mut all_k112, mut all_w4) = (true, true);
    let mut violations = Vec::new();
    for q in quads(space.len()) {
        let is_k112 = classify_quad_unchecked(space, q) == FourPointClass::K112;
        let is_w4 = weakly_similar(&space.restrict_indices(&q)?, &w4)?.is_some();
        all_k112 &= is_k112;
        all_w4 &= is_w4;
        if is_k112 != is_w4 {
            violations.push(quad_labels(space, q));
        }
    }
    let whole_w4 = if space.len() == 4 { Truth::from(weakly_similar(space, &w4)?.is_some()) } else { Truth::NotEvaluable };
    Ok(K112Check { all_k112, all_w4, whole_w4, violations })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct K13Check {
    /// (i) all subsets K13 and none weakly similar to Z4; (ii) all weakly
    /// similar to S4; (iii) embeds into `d+`.
    pub statements: [bool; 3],
    /// Pairs of statements (1-based) with different truth values.
    pub disagreements: Vec<(u8, u8)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_non_k13: Option<[String; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_z4_like: Option<[String; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_non_s4: Option<[String; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embedding: Option<DplusEmbedding>,
}

impl K13Check {
    pub fn consistent(&self) -> bool {
        self.disagreements.is_empty()
    }
}

fn disagreements(statements: &[bool; 3]) -> Vec<(u8, u8)> {
    [(0, 1), (0, 2), (1, 2)]
        .into_iter()
        .filter(|&(a, b)| statements[a] != statements[b])
        .map(|(a, b)| (a as u8 + 1, b as u8 + 1))
        .collect()
}

pub fn check_k13_conjecture(space: &FiniteMetricSpace) -> Result<K13Check> {
    require_quads(space)?;
    let (z4, s4) = (models::z4(), models::s4());
    let (mut first_non_k13, mut first_z4_like, mut first_non_s4) = (None, None, None);
    for q in quads(space.len()) {
        if first_non_k13.is_none() && classify_quad_unchecked(space, q) != FourPointClass::K13 {
            first_non_k13 = Some(quad_labels(space, q));
        }
        let sub = space.restrict_indices(&q)?;
        if first_z4_like.is_none() && weakly_similar(&sub, &z4)?.is_some() {
            first_z4_like = Some(quad_labels(space, q));
        }
        if first_non_s4.is_none() && weakly_similar(&sub, &s4)?.is_none() {
            first_non_s4 = Some(quad_labels(space, q));
        }
    }
    let embedding = embeds_in_dplus(space);
    let statements = [
        first_non_k13.is_none() && first_z4_like.is_none(),
        first_non_s4.is_none(),
        embedding.is_some(),
    ];
    Ok(K13Check {
        disagreements: disagreements(&statements),
        statements,
        first_non_k13,
        first_z4_like,
        first_non_s4,
        embedding,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgreementCheck {
    pub center: Option<String>,
    pub forbidden_quad: Option<[String; 4]>,
    pub agree: bool,
}

pub fn check_agreement(space: &FiniteMetricSpace) -> Result<AgreementCheck> {
    space.require_ultrametric()?;
    let center = find_center_unchecked(space).map(|c| c.center);
    let forbidden_quad = forbidden_scan_unchecked(space)?.map(|w| w.quad);
    let agree = center.is_some() != forbidden_quad.is_some();
    Ok(AgreementCheck { center, forbidden_quad, agree })
}

/// Runs one check; `Some` carries the details when the instance violates
/// the statement under test.
fn primary(which: ConjectureId, space: &FiniteMetricSpace) -> Result<Option<serde_json::Value>> {
    fn flag<T: Serialize>(bad: bool, value: &T) -> Option<serde_json::Value> {
        bad.then(|| serde_json::to_value(value).expect("check results serialize"))
    }
    Ok(match which {
        ConjectureId::Equidistant => {
            let c = check_equidistant(space)?;
            flag(!c.agree, &c)
        }
        ConjectureId::K112 => {
            let c = check_k112_conjecture(space)?;
            flag(!c.consistent(), &c)
        }
        ConjectureId::K13 => {
            let c = check_k13_conjecture(space)?;
            flag(!c.consistent(), &c)
        }
        ConjectureId::Agreement => {
            let c = check_agreement(space)?;
            flag(!c.agree, &c)
        }
    })
}

/// Reference weak similarity: every point permutation against rank matrices.
fn brute_weakly_similar(a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> bool {
    let n = a.len();
    if n != b.len() || a.spectrum().values.len() != b.spectrum().values.len() {
        return false;
    }
    let (ra, rb) = (rank_matrix(a), rank_matrix(b));
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        if (0..n).all(|i| (0..n).all(|j| ra.get(i, j) == rb.get(perm[i], perm[j]))) {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else { return false };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("pivot has a successor");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Reference `d+` test: the heaviest point of an embedding is the only one
/// whose row is constant at the diameter, so peel such points off.
fn peel_embeds(space: &FiniteMetricSpace) -> bool {
    let mut alive: Vec<usize> = (0..space.len()).collect();
    let mut previous: Option<crate::rational::Rational> = None;
    while alive.len() >= 2 {
        let diam = alive.iter().flat_map(|&i| alive.iter().map(move |&j| space.d(i, j))).max().expect("non-empty").clone();
        // weights strictly decrease down the peel
        if previous.as_ref().is_some_and(|p| diam >= *p) {
            return false;
        }
        if alive.len() == 2 {
            return true;
        }
        let top = alive.iter().position(|&x| alive.iter().all(|&y| y == x || *space.d(x, y) == diam));
        match top {
            Some(pos) => {
                alive.remove(pos);
            }
            None => return false,
        }
        previous = Some(diam);
    }
    true
}

fn reference_quads(space: &FiniteMetricSpace) -> Result<Vec<(FiniteMetricSpace, FourPointClass)>> {
    quads(space.len())
        .map(|q| {
            let sub = space.restrict_indices(&q)?;
            let class = classify_four_point(&sub)?;
            Ok((sub, class))
        })
        .collect()
}

/// Re-checks an instance through the reference path; true when the
/// violation is confirmed.
fn reference_violates(which: ConjectureId, space: &FiniteMetricSpace) -> Result<bool> {
    let diag = space.validate();
    if !diag.is_ultrametric {
        return Err(Error::CounterexampleNotReproduced("reloaded space is not ultrametric".into()));
    }
    Ok(match which {
        ConjectureId::Equidistant => {
            let first = space.d(0, 1);
            let equidistant = (0..space.len()).all(|i| (0..space.len()).all(|j| i == j || space.d(i, j) == first));
            let all_k1111 = reference_quads(space)?.iter().all(|(_, c)| *c == FourPointClass::K1111);
            equidistant != all_k1111
        }
        ConjectureId::K112 => {
            let w4 = models::w4();
            let subs = reference_quads(space)?;
            let per: Vec<(bool, bool)> =
                subs.iter().map(|(s, c)| (*c == FourPointClass::K112, brute_weakly_similar(s, &w4))).collect();
            let all_k112 = per.iter().all(|p| p.0);
            let all_w4 = per.iter().all(|p| p.1);
            let whole = (space.len() == 4).then(|| brute_weakly_similar(space, &w4));
            per.iter().any(|p| p.0 != p.1) || all_k112 != all_w4 || whole.is_some_and(|w| w != all_w4)
        }
        ConjectureId::K13 => {
            let (z4, s4) = (models::z4(), models::s4());
            let subs = reference_quads(space)?;
            let i = subs.iter().all(|(s, c)| *c == FourPointClass::K13 && !brute_weakly_similar(s, &z4));
            let ii = subs.iter().all(|(s, _)| brute_weakly_similar(s, &s4));
            let iii = peel_embeds(space);
            !(i == ii && ii == iii)
        }
        ConjectureId::Agreement => {
            let n = space.len();
            let has_center = (0..n).any(|c| {
                (0..n).all(|x| x == c || (0..n).all(|y| y == x || y == c || space.d(c, x) <= space.d(y, x)))
            });
            let has_cycle = reference_quads(space)?.iter().any(|(_, c)| *c == FourPointClass::K22);
            has_center == has_cycle
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CampaignStatus {
    #[serde(rename = "HOLDS_ON_SAMPLE")]
    HoldsOnSample,
    #[serde(rename = "COUNTEREXAMPLE")]
    Counterexample,
    #[serde(rename = "EXHAUSTED_HOLDS")]
    ExhaustedHolds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    /// Position in the generator stream (enumeration rank or sample index).
    pub index: u64,
    pub space: FiniteMetricSpace,
    pub explanation: String,
    pub details: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub conjecture: ConjectureId,
    pub seed: u64,
    pub spec: GeneratorSpec,
    pub instances_tested: u64,
    pub status: CampaignStatus,
    pub counterexample: Option<Counterexample>,
    pub interpretation: &'static str,
    pub notes: Vec<String>,
    /// Kept out of the JSON so reports stay byte-identical across runs.
    #[serde(skip)]
    pub wall_time: Duration,
}

fn explanation(which: ConjectureId) -> &'static str {
    match which {
        ConjectureId::Equidistant => "equidistance and the all-K1111 property disagree",
        ConjectureId::K112 => "statements of the K112 conjecture disagree",
        ConjectureId::K13 => "statements of the K13 conjecture disagree",
        ConjectureId::Agreement => "center criterion and forbidden-quad scan disagree",
    }
}

fn notes(which: ConjectureId, spec: &GeneratorSpec) -> Vec<String> {
    let mut notes = Vec::new();
    if which == ConjectureId::K112 && spec.n > 4 {
        notes.push("statement (iii) is NOT_EVALUABLE for more than four points: weak similarity needs a bijection".into());
    }
    if spec.mode == GeneratorMode::Dendrogram {
        notes.push("sample i is drawn from ChaCha8 seeded with `seed` on stream i".into());
    }
    notes
}

/// Confirms a candidate through serialization and the reference path.
fn reproduce(which: ConjectureId, space: &FiniteMetricSpace) -> Result<FiniteMetricSpace> {
    let json = serde_json::to_string(space).map_err(|e| Error::Internal(e.to_string()))?;
    let reloaded: FiniteMetricSpace =
        serde_json::from_str(&json).map_err(|e| Error::CounterexampleNotReproduced(e.to_string()))?;
    if reloaded != *space {
        return Err(Error::CounterexampleNotReproduced("round trip changed the space".into()));
    }
    if !reference_violates(which, &reloaded)? {
        return Err(Error::CounterexampleNotReproduced(format!(
            "{}: reference check finds no violation",
            which.as_str()
        )));
    }
    Ok(reloaded)
}

/// Streams generated spaces through a check until the first violation,
/// the budget or the end of the enumeration.
///
/// `jobs` sets the worker count; batches are evaluated in parallel but
/// scanned in stream order, so the report does not depend on it.
pub fn run_campaign(spec: &GeneratorSpec, which: ConjectureId, jobs: usize) -> Result<ConjectureReport> {
    spec.validate()?;
    if spec.n < which.min_points() {
        return Err(Error::TooFewPoints { needed: which.min_points(), found: spec.n });
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    let start = Instant::now();

    let mut tested = 0u64;
    let mut found: Option<(u64, FiniteMetricSpace, serde_json::Value)> = None;
    let mut exhausted = false;

    let mut process = |batch: Vec<(u64, FiniteMetricSpace)>| -> Result<bool> {
        let results: Vec<Result<Option<serde_json::Value>>> =
            pool.install(|| batch.par_iter().map(|(_, s)| primary(which, s)).collect());
        for ((index, space), result) in batch.into_iter().zip(results) {
            tested += 1;
            if let Some(details) = result? {
                found = Some((index, space, details));
                return Ok(true);
            }
        }
        Ok(false)
    };

    match spec.mode {
        GeneratorMode::Exhaustive => {
            let limit = spec.count.unwrap_or(u64::MAX);
            let unlimited = GeneratorSpec { count: None, ..spec.clone() };
            let mut stream = enumerate_ultrametrics(&unlimited)?.zip(0u64..).map(|(s, i)| (i, s)).peekable();
            let mut taken = 0u64;
            loop {
                let want = (limit - taken).min(BATCH as u64) as usize;
                let batch: Vec<_> = stream.by_ref().take(want).collect();
                if batch.is_empty() {
                    exhausted = stream.peek().is_none();
                    break;
                }
                taken += batch.len() as u64;
                if process(batch)? {
                    break;
                }
            }
        }
        GeneratorMode::Dendrogram => {
            let budget = spec.count.unwrap_or(DEFAULT_SAMPLE_COUNT);
            let mut next = 0u64;
            while next < budget {
                let end = (next + BATCH as u64).min(budget);
                let batch: Vec<(u64, FiniteMetricSpace)> = pool.install(|| {
                    (next..end).into_par_iter().map(|i| sample_dendrogram_at(spec, i).map(|s| (i, s))).collect::<Result<_>>()
                })?;
                next = end;
                if process(batch)? {
                    break;
                }
            }
        }
    }

    let (status, counterexample) = match found {
        Some((index, space, details)) => {
            let space = reproduce(which, &space)?;
            let cx = Counterexample { index, space, explanation: explanation(which).to_string(), details };
            (CampaignStatus::Counterexample, Some(cx))
        }
        None if exhausted => (CampaignStatus::ExhaustedHolds, None),
        None => (CampaignStatus::HoldsOnSample, None),
    };

    let mut spec_out = spec.clone();
    if spec.mode == GeneratorMode::Dendrogram && spec.count.is_none() {
        spec_out.count = Some(DEFAULT_SAMPLE_COUNT);
    }
    Ok(ConjectureReport {
        conjecture: which,
        seed: spec.seed,
        spec: spec_out,
        instances_tested: tested,
        status,
        counterexample,
        interpretation: INTERPRETATION,
        notes: notes(which, spec),
        wall_time: start.elapsed(),
    })
}
