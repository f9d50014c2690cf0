//! Brute-force residue frequencies over one shortest period.
//!
//! `Census::counts[b]` is the number of `n` in `[0, h)` with `x_n ≡ b (mod 3^k)`.
//! Nothing in this module consults the closed-form frequency formulas; the
//! period comes from the brute-force search.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::RangeInclusive;
use std::sync::atomic::{AtomicU32, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LucasError, Result};
use crate::modulus::Modulus3Pow;
use crate::period::{excess_power, period_bruteforce_with, period_closed, SearchOptions};
use crate::sequence::{LucasParams, ResidueStream, SequenceKind};
use crate::valuation::{delta_of, Branch};

/// Moduli up to this size are tallied in a dense array.
const DENSE_LIMIT: u64 = 1 << 24;

/// Sparse residue histogram. Zero counts are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HistogramRepr", into = "HistogramRepr")]
pub struct Histogram {
    counts: BTreeMap<u64, u64>,
    total: u64,
}

#[derive(Serialize, Deserialize)]
struct HistogramRepr {
    total: u64,
    counts: BTreeMap<u64, u64>,
}

impl TryFrom<HistogramRepr> for Histogram {
    type Error = LucasError;

    fn try_from(repr: HistogramRepr) -> Result<Self> {
        let hist = Histogram::from_counts(repr.counts);
        if hist.total != repr.total {
            return Err(LucasError::Precondition(format!(
                "histogram total {} does not match the sum of counts {}",
                repr.total, hist.total
            )));
        }
        Ok(hist)
    }
}

impl From<Histogram> for HistogramRepr {
    fn from(hist: Histogram) -> Self {
        HistogramRepr {
            total: hist.total,
            counts: hist.counts,
        }
    }
}

impl Histogram {
    /// Builds a histogram, dropping zero entries.
    pub fn from_counts<I: IntoIterator<Item = (u64, u64)>>(counts: I) -> Self {
        let counts: BTreeMap<u64, u64> = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        let total = counts.values().sum();
        Histogram { counts, total }
    }

    pub fn get(&self, residue: u64) -> u64 {
        self.counts.get(&residue).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of residues with a nonzero count.
    pub fn support(&self) -> usize {
        self.counts.len()
    }

    /// Nonzero `(residue, count)` pairs in ascending residue order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&b, &c)| (b, c))
    }

    /// Residues where the two histograms disagree, as `(residue, self, other)`.
    pub fn diff(&self, other: &Histogram) -> Vec<(u64, u64, u64)> {
        let keys: BTreeSet<u64> = self
            .counts
            .keys()
            .chain(other.counts.keys())
            .copied()
            .collect();
        keys.into_iter()
            .filter_map(|b| {
                let (a, c) = (self.get(b), other.get(b));
                (a != c).then_some((b, a, c))
            })
            .collect()
    }
}

/// Restriction on the indices `n` counted by [`class_counts`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IndexClass {
    All,
    Even,
    Odd,
    /// `n ≡ r (mod 4)`
    Mod4(u8),
    /// `n ≢ r (mod 4)`
    NotMod4(u8),
}

impl IndexClass {
    #[inline]
    pub fn contains(&self, n: u64) -> bool {
        match *self {
            IndexClass::All => true,
            IndexClass::Even => n.is_multiple_of(2),
            IndexClass::Odd => n % 2 == 1,
            IndexClass::Mod4(r) => n % 4 == r as u64,
            IndexClass::NotMod4(r) => n % 4 != r as u64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CensusRepr", into = "CensusRepr")]
pub struct Census {
    params: LucasParams,
    kind: SequenceKind,
    modulus: Modulus3Pow,
    period: u64,
    histogram: Histogram,
}

#[derive(Serialize, Deserialize)]
struct CensusRepr {
    #[serde(rename = "P")]
    p: LucasParams,
    kind: SequenceKind,
    k: u32,
    period: u64,
    histogram: Histogram,
}

impl TryFrom<CensusRepr> for Census {
    type Error = LucasError;

    fn try_from(repr: CensusRepr) -> Result<Self> {
        let modulus = Modulus3Pow::new(repr.k)?;
        if repr.histogram.total() != repr.period {
            return Err(LucasError::Precondition(format!(
                "census total {} differs from period {}",
                repr.histogram.total(),
                repr.period
            )));
        }
        if let Some((&b, _)) = repr.histogram.counts.range(modulus.value()..).next() {
            return Err(LucasError::Precondition(format!(
                "residue {b} is not below {}",
                modulus.value()
            )));
        }
        Ok(Census {
            params: repr.p,
            kind: repr.kind,
            modulus,
            period: repr.period,
            histogram: repr.histogram,
        })
    }
}

impl From<Census> for CensusRepr {
    fn from(c: Census) -> Self {
        CensusRepr {
            p: c.params,
            kind: c.kind,
            k: c.modulus.k(),
            period: c.period,
            histogram: c.histogram,
        }
    }
}

impl Census {
    pub fn params(&self) -> LucasParams {
        self.params
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn modulus(&self) -> Modulus3Pow {
        self.modulus
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn histogram(&self) -> &Histogram {
        &self.histogram
    }

    pub fn count(&self, residue: u64) -> u64 {
        self.histogram.get(residue)
    }
}

pub fn census(params: LucasParams, kind: SequenceKind, modulus: &Modulus3Pow) -> Result<Census> {
    census_with(params, kind, modulus, SearchOptions::default())
}

/// Census with an explicit budget and optional chunking. Chunks are seeded by
/// jump-ahead and merged by addition, so the result does not depend on them.
pub fn census_with(
    params: LucasParams,
    kind: SequenceKind,
    modulus: &Modulus3Pow,
    options: SearchOptions,
) -> Result<Census> {
    let period = period_bruteforce_with(params, kind, modulus, options)?.h;
    let histogram = tally(
        params,
        kind,
        *modulus,
        period,
        IndexClass::All,
        options.chunk_len,
    );
    Ok(Census {
        params,
        kind,
        modulus: *modulus,
        period,
        histogram,
    })
}

/// Frequencies over one shortest period counting only indices in `class`.
pub fn class_counts(
    params: LucasParams,
    kind: SequenceKind,
    modulus: &Modulus3Pow,
    class: IndexClass,
    options: SearchOptions,
) -> Result<Histogram> {
    let period = period_bruteforce_with(params, kind, modulus, options)?.h;
    Ok(tally(
        params,
        kind,
        *modulus,
        period,
        class,
        options.chunk_len,
    ))
}

fn tally(
    params: LucasParams,
    kind: SequenceKind,
    m: Modulus3Pow,
    period: u64,
    class: IndexClass,
    chunk_len: Option<u64>,
) -> Histogram {
    let chunks: Vec<(u64, u64)> = match chunk_len {
        None => vec![(0, period)],
        Some(len) => (0..period)
            .step_by(len as usize)
            .map(|s| (s, (s + len).min(period)))
            .collect(),
    };
    let walk = |(start, end): (u64, u64)| {
        let stream = if start == 0 {
            ResidueStream::from_start(params, kind, m)
        } else {
            ResidueStream::from_index(params, kind, m, start)
        };
        (start..end)
            .zip(stream)
            .filter(move |&(n, _)| class.contains(n))
            .map(|(_, x)| x)
    };

    if m.value() <= DENSE_LIMIT {
        let dense: Vec<AtomicU32> = (0..m.value()).map(|_| AtomicU32::new(0)).collect();
        chunks.par_iter().for_each(|&chunk| {
            for x in walk(chunk) {
                dense[x as usize].fetch_add(1, Ordering::Relaxed);
            }
        });
        Histogram::from_counts(
            dense
                .into_iter()
                .enumerate()
                .map(|(b, c)| (b as u64, c.into_inner() as u64)),
        )
    } else {
        let merged = chunks
            .par_iter()
            .map(|&chunk| {
                let mut local: HashMap<u64, u64> = HashMap::new();
                for x in walk(chunk) {
                    *local.entry(x).or_default() += 1;
                }
                local
            })
            .reduce(HashMap::new, |mut a, b| {
                for (x, c) in b {
                    *a.entry(x).or_default() += c;
                }
                a
            });
        Histogram::from_counts(merged)
    }
}

/// The set of distinct frequencies over all residues `0..3^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OmegaSet(pub BTreeSet<u64>);

impl OmegaSet {
    pub fn contains(&self, count: u64) -> bool {
        self.0.contains(&count)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().copied()
    }
}

impl<const N: usize> From<[u64; N]> for OmegaSet {
    fn from(values: [u64; N]) -> Self {
        OmegaSet(values.into_iter().collect())
    }
}

/// Zero is a member exactly when some residue is never hit.
pub fn omega(census: &Census) -> OmegaSet {
    let mut set: BTreeSet<u64> = census.histogram.iter().map(|(_, c)| c).collect();
    if (census.histogram.support() as u64) < census.modulus.value() {
        set.insert(0);
    }
    OmegaSet(set)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityEntry {
    pub k: u32,
    pub period: u64,
    pub omega: OmegaSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaTransition {
    pub from_k: u32,
    pub to_k: u32,
    pub differs: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityReport {
    #[serde(rename = "P")]
    pub p: i64,
    pub kind: SequenceKind,
    pub entries: Vec<StabilityEntry>,
    pub transitions: Vec<OmegaTransition>,
}

impl StabilityReport {
    /// True when every consecutive pair of frequency sets differs. Requires
    /// at least one pair.
    pub fn all_adjacent_differ(&self) -> bool {
        !self.transitions.is_empty() && self.transitions.iter().all(|t| t.differs)
    }

    /// No change observed across the range (vacuous for a single `k`).
    pub fn stable_so_far(&self) -> bool {
        self.transitions.iter().all(|t| !t.differs)
    }
}

pub fn stability_report(
    params: LucasParams,
    kind: SequenceKind,
    k_range: RangeInclusive<u32>,
    options: SearchOptions,
) -> Result<StabilityReport> {
    let mut entries = Vec::new();
    for k in k_range {
        let c = census_with(params, kind, &Modulus3Pow::new(k)?, options)?;
        entries.push(StabilityEntry {
            k,
            period: c.period,
            omega: omega(&c),
        });
    }
    let transitions = entries
        .windows(2)
        .map(|w| OmegaTransition {
            from_k: w[0].k,
            to_k: w[1].k,
            differs: w[0].omega != w[1].omega,
        })
        .collect();
    Ok(StabilityReport {
        p: params.p(),
        kind,
        entries,
        transitions,
    })
}

/// The index class on which each lifted triple `x_{n + j h}`, `j = 0, 1, 2`,
/// covers `b, b + 3^k, b + 2·3^k (mod 3^{k+1})`.
pub fn lift_class(params: LucasParams, kind: SequenceKind) -> IndexClass {
    match (delta_of(params).branch, kind) {
        (Branch::NotDivisible3, SequenceKind::U) => IndexClass::NotMod4(2),
        (Branch::NotDivisible3, SequenceKind::V) => IndexClass::NotMod4(0),
        (Branch::Divisible3, SequenceKind::U) => IndexClass::Even,
        (Branch::Divisible3, SequenceKind::V) => IndexClass::Odd,
    }
}

/// Which indices [`check_lift_refinement`] inspects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexSelection {
    /// Every index of the lift class in `[0, h)` that hits `b`.
    Qualifying,
    /// These indices; each must lie in `[0, h)`, belong to the lift class,
    /// and hit `b`.
    Explicit(Vec<u64>),
}

/// For each selected `n` with `x_n ≡ b (mod 3^k)`, checks that
/// `x_n, x_{n+h}, x_{n+2h}` are `b + λ·3^k`, `λ = 0, 1, 2`, modulo `3^{k+1}`
/// in some order, where `h` is the period modulo `3^k`.
pub fn check_lift_refinement(
    params: LucasParams,
    kind: SequenceKind,
    modulus: &Modulus3Pow,
    b: u64,
    selection: IndexSelection,
) -> Result<bool> {
    excess_power(delta_of(params), modulus)?;
    if b >= modulus.value() {
        return Err(LucasError::Precondition(format!(
            "residue {b} is not below {}",
            modulus.value()
        )));
    }
    let fine = modulus.lift()?;
    let h = period_closed(params, kind, modulus)?.h;
    let class = lift_class(params, kind);
    let lifted: Vec<u64> = ResidueStream::from_start(params, kind, fine)
        .take(3 * h as usize)
        .collect();
    let hits = |n: u64| lifted[n as usize] % modulus.value() == b;

    let indices: Vec<u64> = match selection {
        IndexSelection::Qualifying => (0..h).filter(|&n| class.contains(n) && hits(n)).collect(),
        IndexSelection::Explicit(list) => {
            for &n in &list {
                if n >= h {
                    return Err(LucasError::Precondition(format!(
                        "index {n} is outside one period [0, {h})"
                    )));
                }
                if !class.contains(n) {
                    return Err(LucasError::Precondition(format!(
                        "index {n} is outside the lift class {class:?}"
                    )));
                }
                if !hits(n) {
                    return Err(LucasError::Precondition(format!(
                        "index {n} does not hit residue {b}"
                    )));
                }
            }
            list
        }
    };

    let step = modulus.value();
    let expected: BTreeSet<u64> = (0..3).map(|lambda| b + lambda * step).collect();
    Ok(indices.iter().all(|&n| {
        let got: BTreeSet<u64> = (0..3).map(|j| lifted[(n + j * h) as usize]).collect();
        got == expected
    }))
}

/// [`check_lift_refinement`] for every residue at once: each index of the lift
/// class in `[0, h)` is checked against its own residue. Returns the first
/// failing index, if any.
pub fn lift_refinement_counterexample(
    params: LucasParams,
    kind: SequenceKind,
    modulus: &Modulus3Pow,
) -> Result<Option<u64>> {
    excess_power(delta_of(params), modulus)?;
    let fine = modulus.lift()?;
    let h = period_closed(params, kind, modulus)?.h;
    let class = lift_class(params, kind);
    let lifted: Vec<u64> = ResidueStream::from_start(params, kind, fine)
        .take(3 * h as usize)
        .collect();
    let step = modulus.value();
    Ok((0..h).filter(|&n| class.contains(n)).find(|&n| {
        let b = lifted[n as usize] % step;
        let mut got = [0, 1, 2].map(|j| lifted[(n + j * h) as usize]);
        got.sort_unstable();
        got != [b, b + step, b + 2 * step]
    }))
}

/// `Σ_λ fine[b + λ·3^k] = 3 · coarse[b]` for every residue `b` modulo `3^k`.
pub fn aggregate_lift_holds(coarse: &Census, fine: &Census) -> bool {
    let m = coarse.modulus.value();
    if fine.modulus.k() != coarse.modulus.k() + 1 {
        return false;
    }
    let mut folded: BTreeMap<u64, u64> = BTreeMap::new();
    for (b, c) in fine.histogram.iter() {
        *folded.entry(b % m).or_default() += c;
    }
    let tripled: BTreeMap<u64, u64> = coarse.histogram.iter().map(|(b, c)| (b, 3 * c)).collect();
    folded == tripled
}
