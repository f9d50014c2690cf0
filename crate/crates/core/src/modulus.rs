//! Residue arithmetic modulo `3^k`.
//!
//! Residues are stored as `u64` in `[0, 3^k)`. Products are formed in `u128`,
//! so any two residues multiply exactly for every `k <= K_MAX`.

use serde::{Deserialize, Serialize};

use crate::error::{LucasError, Result};

/// Default (and largest accepted) exponent cap.
pub const K_MAX: u32 = 24;

/// The modulus `3^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "ModulusRepr", into = "ModulusRepr")]
pub struct Modulus3Pow {
    k: u32,
    m: u64,
}

#[derive(Serialize, Deserialize)]
struct ModulusRepr {
    k: u32,
}

impl TryFrom<ModulusRepr> for Modulus3Pow {
    type Error = LucasError;

    fn try_from(repr: ModulusRepr) -> Result<Self> {
        Modulus3Pow::new(repr.k)
    }
}

impl From<Modulus3Pow> for ModulusRepr {
    fn from(m: Modulus3Pow) -> Self {
        ModulusRepr { k: m.k }
    }
}

impl Modulus3Pow {
    pub fn new(k: u32) -> Result<Self> {
        Self::with_cap(k, K_MAX)
    }

    /// Like [`Modulus3Pow::new`] with a caller-lowered cap. `cap` itself may
    /// not exceed [`K_MAX`].
    pub fn with_cap(k: u32, cap: u32) -> Result<Self> {
        let cap = cap.min(K_MAX);
        if k > cap {
            return Err(LucasError::ExponentTooLarge { k, cap });
        }
        Ok(Modulus3Pow { k, m: 3u64.pow(k) })
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.m
    }

    #[inline]
    pub fn reduce_u64(&self, x: u64) -> u64 {
        x % self.m
    }

    #[inline]
    pub fn reduce_i64(&self, x: i64) -> u64 {
        (x as i128).rem_euclid(self.m as i128) as u64
    }

    #[inline]
    pub fn reduce_i128(&self, x: i128) -> u64 {
        x.rem_euclid(self.m as i128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.m as u128) as u64
    }

    /// `a / 2`, i.e. `a * 2^{-1}`. Always defined because `3^k` is odd.
    #[inline]
    pub fn half(&self, a: u64) -> u64 {
        if a.is_multiple_of(2) {
            a / 2
        } else {
            // a and m are both odd
            (a + self.m) / 2
        }
    }

    /// The coarser modulus `3^j` for `j <= k`.
    pub fn coarsen(&self, j: u32) -> Modulus3Pow {
        debug_assert!(j <= self.k);
        Modulus3Pow {
            k: j,
            m: 3u64.pow(j),
        }
    }

    /// The next finer modulus `3^{k+1}`.
    pub fn lift(&self) -> Result<Modulus3Pow> {
        Modulus3Pow::new(self.k + 1)
    }
}

impl std::fmt::Display for Modulus3Pow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "3^{}", self.k)
    }
}
