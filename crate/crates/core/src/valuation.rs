//! 3-adic valuations of `u_n` and `v_n`.
//!
//! Writing `delta` for `ord_3(P^2 + 2)` when `3 ∤ P` and for `ord_3(P)` when
//! `3 | P`, the valuations are
//!
//! ```text
//! 3 ∤ P:  ord_3 u_n = ord_3 n + delta   if 4 | n, else 0
//!         ord_3 v_n = ord_3 n + delta   if n ≡ 2 (mod 4), else 0
//! 3 | P:  ord_3 u_n = ord_3 n + delta   if 2 | n, else 0
//!         ord_3 v_n = ord_3 n + delta   if 2 ∤ n, else 0
//! ```

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{LucasError, Result};
use crate::sequence::{eval_exact_bounded, LucasParams, SequenceKind, DEFAULT_EXACT_BOUND};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `3 ∤ P`
    NotDivisible3,
    /// `3 | P`
    Divisible3,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::NotDivisible3 => "not_divisible3",
            Branch::Divisible3 => "divisible3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeltaProfile {
    pub branch: Branch,
    pub delta: u32,
}

impl DeltaProfile {
    /// Exponent `x = 2 delta - 1` that separates the small-`k` regime.
    pub fn threshold(&self) -> u32 {
        2 * self.delta - 1
    }
}

/// Exponent of 3 in a 3-adic valuation; `0` means not divisible by 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Valuation(pub u32);

/// `ord_3` of a nonzero machine integer.
pub fn ord3_int(x: i128) -> u32 {
    assert!(x != 0, "ord_3(0) is infinite");
    let mut x = x.unsigned_abs();
    let mut e = 0;
    while x.is_multiple_of(3) {
        x /= 3;
        e += 1;
    }
    e
}

fn ord3_big(x: &BigInt) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let three = BigInt::from(3);
    let mut x = x.clone();
    let mut e = 0;
    loop {
        let (q, r) = x.div_rem(&three);
        if !r.is_zero() {
            return Some(e);
        }
        x = q;
        e += 1;
    }
}

pub fn delta_of(params: LucasParams) -> DeltaProfile {
    let p = params.p() as i128;
    if p % 3 == 0 {
        DeltaProfile {
            branch: Branch::Divisible3,
            delta: ord3_int(p),
        }
    } else {
        // P^2 ≡ 1 (mod 3), so 3 | P^2 + 2
        DeltaProfile {
            branch: Branch::NotDivisible3,
            delta: ord3_int(p * p + 2),
        }
    }
}

/// Closed-form `ord_3(u_n)` for `n >= 1`.
pub fn ord3_u(params: LucasParams, n: u64) -> Result<Valuation> {
    if n == 0 {
        return Err(LucasError::ZeroTermValuation);
    }
    let profile = delta_of(params);
    let hit = match profile.branch {
        Branch::NotDivisible3 => n.is_multiple_of(4),
        Branch::Divisible3 => n.is_multiple_of(2),
    };
    Ok(if hit {
        Valuation(ord3_int(n as i128) + profile.delta)
    } else {
        Valuation(0)
    })
}

/// Closed-form `ord_3(v_n)` for `n >= 0`.
pub fn ord3_v(params: LucasParams, n: u64) -> Valuation {
    let profile = delta_of(params);
    let hit = match profile.branch {
        Branch::NotDivisible3 => n % 4 == 2,
        Branch::Divisible3 => n % 2 == 1,
    };
    if hit {
        Valuation(ord3_int(n as i128) + profile.delta)
    } else {
        Valuation(0)
    }
}

/// Closed form for either kind.
pub fn ord3(params: LucasParams, kind: SequenceKind, n: u64) -> Result<Valuation> {
    match kind {
        SequenceKind::U => ord3_u(params, n),
        SequenceKind::V => Ok(ord3_v(params, n)),
    }
}

/// Valuation by exact evaluation and repeated division by 3.
pub fn ord3_exact_oracle(params: LucasParams, kind: SequenceKind, n: i64) -> Result<Valuation> {
    ord3_exact_oracle_bounded(params, kind, n, DEFAULT_EXACT_BOUND)
}

pub fn ord3_exact_oracle_bounded(
    params: LucasParams,
    kind: SequenceKind,
    n: i64,
    bound: u64,
) -> Result<Valuation> {
    let value = eval_exact_bounded(params, kind, n, bound)?;
    ord3_big(&value)
        .map(Valuation)
        .ok_or(LucasError::ZeroTermValuation)
}
