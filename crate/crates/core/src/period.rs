//! Shortest periods modulo `3^k`.
//!
//! For `k >= delta` the period of both sequences is `8 * 3^{k-delta}` when
//! `3 ∤ P` and `2 * 3^{k-delta}` when `3 | P`. Below `delta` only the
//! brute-force search applies.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LucasError, Result};
use crate::modulus::Modulus3Pow;
use crate::sequence::{eval_mod, eval_pair_mod, seed_state, LucasParams, SequenceKind};
use crate::valuation::{delta_of, Branch, DeltaProfile};

/// Default step budget for brute-force walks.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeriodSource {
    ClosedForm,
    BruteForce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeriodResult {
    pub h: u64,
    pub source: PeriodSource,
}

/// Options for brute-force walks over `[0, budget)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub budget: u64,
    /// Indices per chunk; `None` walks sequentially from the seed.
    pub chunk_len: Option<u64>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: DEFAULT_BUDGET,
            chunk_len: None,
        }
    }
}

impl SearchOptions {
    pub fn with_budget(budget: u64) -> Self {
        SearchOptions {
            budget,
            chunk_len: None,
        }
    }

    pub fn chunked(mut self, chunk_len: u64) -> Self {
        self.chunk_len = Some(chunk_len.max(1));
        self
    }
}

/// `3^{k - delta}`, or an error when `k < delta`.
pub(crate) fn excess_power(profile: DeltaProfile, modulus: &Modulus3Pow) -> Result<u64> {
    if modulus.k() < profile.delta {
        return Err(LucasError::UnsupportedRange {
            k: modulus.k(),
            delta: profile.delta,
        });
    }
    Ok(3u64.pow(modulus.k() - profile.delta))
}

/// Closed-form shortest period. Identical for both kinds.
pub fn period_closed(
    params: LucasParams,
    _kind: SequenceKind,
    modulus: &Modulus3Pow,
) -> Result<PeriodResult> {
    let profile = delta_of(params);
    let scale = excess_power(profile, modulus)?;
    let h = match profile.branch {
        Branch::NotDivisible3 => 8 * scale,
        Branch::Divisible3 => 2 * scale,
    };
    Ok(PeriodResult {
        h,
        source: PeriodSource::ClosedForm,
    })
}

pub fn period_bruteforce(
    params: LucasParams,
    kind: SequenceKind,
    modulus: &Modulus3Pow,
) -> Result<PeriodResult> {
    period_bruteforce_with(params, kind, modulus, SearchOptions::default())
}

/// Smallest `h > 0` with `(x_h, x_{h+1}) = (x_0, x_1) mod 3^k`.
pub fn period_bruteforce_with(
    params: LucasParams,
    kind: SequenceKind,
    modulus: &Modulus3Pow,
    options: SearchOptions,
) -> Result<PeriodResult> {
    let seed = seed_state(params, kind, modulus);
    let found = match options.chunk_len {
        None => first_return(params, modulus, seed, seed, 1, options.budget),
        Some(len) => chunked_first_return(params, kind, modulus, seed, options.budget, len),
    };
    found
        .map(|h| PeriodResult {
            h,
            source: PeriodSource::BruteForce,
        })
        .ok_or(LucasError::BudgetExceeded {
            budget: options.budget,
        })
}

/// Walks on from `state_before = (x_{start-1}, x_start)` and returns the
/// first `n` in `[start, end]` with `(x_n, x_{n+1}) == target`.
fn first_return(
    params: LucasParams,
    m: &Modulus3Pow,
    target: (u64, u64),
    state_before: (u64, u64),
    start: u64,
    end: u64,
) -> Option<u64> {
    let p = m.reduce_i64(params.p());
    let (mut a, mut b) = state_before;
    let c = m.add(m.mul(p, b), a);
    a = b;
    b = c;
    for n in start..=end {
        if (a, b) == target {
            return Some(n);
        }
        let c = m.add(m.mul(p, b), a);
        a = b;
        b = c;
    }
    None
}

fn chunked_first_return(
    params: LucasParams,
    kind: SequenceKind,
    m: &Modulus3Pow,
    seed: (u64, u64),
    budget: u64,
    chunk_len: u64,
) -> Option<u64> {
    let wave = rayon::current_num_threads().max(1) as u64;
    let mut lo = 1u64;
    while lo <= budget {
        let starts: Vec<u64> = (0..wave)
            .map(|i| lo + i * chunk_len)
            .filter(|&s| s <= budget)
            .collect();
        let hit = starts
            .par_iter()
            .filter_map(|&s| {
                let end = (s + chunk_len - 1).min(budget);
                // state at s - 1, so first_return's initial advance lands on s
                let prev = eval_pair_mod(params, s as i128 - 1, m).state(kind, params, m);
                first_return(params, m, seed, prev, s, end)
            })
            .min();
        if hit.is_some() {
            return hit;
        }
        lo += wave * chunk_len;
    }
    None
}

fn require_not_divisible(params: LucasParams, modulus: &Modulus3Pow) -> Result<u64> {
    let profile = delta_of(params);
    if profile.branch != Branch::NotDivisible3 {
        return Err(LucasError::WrongBranch {
            expected: Branch::NotDivisible3,
            actual: profile.branch,
        });
    }
    excess_power(profile, modulus)
}

/// `u_{n + 4·3^{k-δ}} ≡ -u_n` and `v_{n + 4·3^{k-δ}} ≡ -v_n (mod 3^k)` at
/// every sampled `n`. Only meaningful when `3 ∤ P`.
pub fn check_sign_shift(
    params: LucasParams,
    modulus: &Modulus3Pow,
    sample_indices: &[i128],
) -> Result<bool> {
    let shift = 4 * require_not_divisible(params, modulus)? as i128;
    Ok(sample_indices.iter().all(|&n| {
        let here = eval_pair_mod(params, n, modulus);
        let there = eval_pair_mod(params, n + shift, modulus);
        there.u == modulus.neg(here.u) && there.v == modulus.neg(here.v)
    }))
}

/// `u_{3^{k-δ}} v_n ≡ v_{3^{k-δ}} u_{n - 2·3^{k-δ}} (mod 3^k)` at every
/// sampled `n`. Only meaningful when `3 ∤ P`.
pub fn check_cross_congruence(
    params: LucasParams,
    modulus: &Modulus3Pow,
    sample_indices: &[i128],
) -> Result<bool> {
    let base = require_not_divisible(params, modulus)? as i128;
    let anchor = eval_pair_mod(params, base, modulus);
    Ok(sample_indices.iter().all(|&n| {
        let lhs = modulus.mul(anchor.u, eval_mod(params, SequenceKind::V, n, modulus));
        let rhs = modulus.mul(
            anchor.v,
            eval_mod(params, SequenceKind::U, n - 2 * base, modulus),
        );
        lhs == rhs
    }))
}
