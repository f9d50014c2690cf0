//! Evaluation of the Lucas pair `u_n`, `v_n` for `x_n = P x_{n-1} + x_{n-2}`.
//!
//! `u_0 = 0, u_1 = 1` and `v_0 = 2, v_1 = P`. Negative indices follow from
//! running the recurrence backwards, which gives the reflections
//! `u_{-n} = (-1)^{n+1} u_n` and `v_{-n} = (-1)^n v_n`.
//!
//! The modular path is index doubling on the pair `(u_n, v_n)`:
//!
//! ```text
//! u_{2n}   = u_n v_n
//! v_{2n}   = v_n^2 - 2(-1)^n
//! u_{n+1}  = (P u_n + v_n) / 2
//! v_{n+1}  = (D u_n + P v_n) / 2,      D = P^2 + 4
//! ```

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{LucasError, Result};
use crate::modulus::Modulus3Pow;

/// Arbitrary-precision integer used on every exact path.
pub type ExactInt = BigInt;

/// Default bound on `|n|` for [`eval_exact`].
pub const DEFAULT_EXACT_BOUND: u64 = 4096;

/// The coefficient `P` of the recurrence. `Q = -1` is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct LucasParams {
    p: i64,
}

impl LucasParams {
    pub fn new(p: i64) -> Result<Self> {
        if p == 0 {
            return Err(LucasError::ZeroParameter);
        }
        Ok(LucasParams { p })
    }

    #[inline]
    pub fn p(&self) -> i64 {
        self.p
    }

    /// `D = P^2 + 4`, the discriminant for `Q = -1`.
    pub fn discriminant(&self) -> i128 {
        let p = self.p as i128;
        p * p + 4
    }

    pub(crate) fn p_mod(&self, modulus: &Modulus3Pow) -> u64 {
        modulus.reduce_i64(self.p)
    }

    pub(crate) fn d_mod(&self, modulus: &Modulus3Pow) -> u64 {
        modulus.reduce_i128(self.discriminant())
    }
}

impl TryFrom<i64> for LucasParams {
    type Error = LucasError;

    fn try_from(p: i64) -> Result<Self> {
        LucasParams::new(p)
    }
}

impl From<LucasParams> for i64 {
    fn from(params: LucasParams) -> i64 {
        params.p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SequenceKind {
    /// `u_0 = 0, u_1 = 1`
    U,
    /// `v_0 = 2, v_1 = P`
    V,
}

impl SequenceKind {
    pub const BOTH: [SequenceKind; 2] = [SequenceKind::U, SequenceKind::V];

    pub fn as_str(&self) -> &'static str {
        match self {
            SequenceKind::U => "u",
            SequenceKind::V => "v",
        }
    }

    /// Sign picked up by `x_{-n}` relative to `x_n`.
    fn reflection_negates(&self, n_is_odd: bool) -> bool {
        match self {
            // (-1)^{n+1}
            SequenceKind::U => !n_is_odd,
            // (-1)^n
            SequenceKind::V => n_is_odd,
        }
    }
}

impl std::fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SequenceKind {
    type Err = LucasError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "u" | "U" => Ok(SequenceKind::U),
            "v" | "V" => Ok(SequenceKind::V),
            other => Err(LucasError::Precondition(format!(
                "unknown sequence kind {other:?}"
            ))),
        }
    }
}

/// `(u_n mod m, v_n mod m)` at index `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LucasPair {
    pub u: u64,
    pub v: u64,
    pub n: i128,
}

impl LucasPair {
    pub fn get(&self, kind: SequenceKind) -> u64 {
        match kind {
            SequenceKind::U => self.u,
            SequenceKind::V => self.v,
        }
    }

    /// The pair at index `n + 1`.
    pub fn next(&self, params: LucasParams, modulus: &Modulus3Pow) -> LucasPair {
        let p = params.p_mod(modulus);
        let d = params.d_mod(modulus);
        self.step(p, d, modulus)
    }

    #[inline]
    fn step(&self, p: u64, d: u64, m: &Modulus3Pow) -> LucasPair {
        LucasPair {
            u: m.half(m.add(m.mul(p, self.u), self.v)),
            v: m.half(m.add(m.mul(d, self.u), m.mul(p, self.v))),
            n: self.n + 1,
        }
    }

    #[inline]
    fn double(&self, m: &Modulus3Pow) -> LucasPair {
        let two = m.reduce_u64(2);
        let vv = m.mul(self.v, self.v);
        LucasPair {
            u: m.mul(self.u, self.v),
            // (-1)^n from the parity of n
            v: if self.n % 2 == 0 {
                m.sub(vv, two)
            } else {
                m.add(vv, two)
            },
            n: 2 * self.n,
        }
    }

    /// The consecutive state `(x_n, x_{n+1})` that seeds a plain recurrence walk.
    pub fn state(&self, kind: SequenceKind, params: LucasParams, m: &Modulus3Pow) -> (u64, u64) {
        let next = self.next(params, m);
        (self.get(kind), next.get(kind))
    }
}

/// `(u_n, v_n) mod 3^k` in `O(log |n|)` steps.
pub fn eval_pair_mod(params: LucasParams, n: i128, modulus: &Modulus3Pow) -> LucasPair {
    let mag = n.unsigned_abs();
    let p = params.p_mod(modulus);
    let d = params.d_mod(modulus);
    let mut pair = LucasPair {
        u: 0,
        v: modulus.reduce_u64(2),
        n: 0,
    };
    if mag != 0 {
        let top = 127 - mag.leading_zeros();
        for bit in (0..=top).rev() {
            pair = pair.double(modulus);
            if (mag >> bit) & 1 == 1 {
                pair = pair.step(p, d, modulus);
            }
        }
    }
    if n < 0 {
        let odd = mag % 2 == 1;
        LucasPair {
            u: if SequenceKind::U.reflection_negates(odd) {
                modulus.neg(pair.u)
            } else {
                pair.u
            },
            v: if SequenceKind::V.reflection_negates(odd) {
                modulus.neg(pair.v)
            } else {
                pair.v
            },
            n,
        }
    } else {
        pair
    }
}

/// `u_n mod 3^k` or `v_n mod 3^k`.
pub fn eval_mod(params: LucasParams, kind: SequenceKind, n: i128, modulus: &Modulus3Pow) -> u64 {
    eval_pair_mod(params, n, modulus).get(kind)
}

/// Exact `u_n` or `v_n` for `|n| <= DEFAULT_EXACT_BOUND`.
pub fn eval_exact(params: LucasParams, kind: SequenceKind, n: i64) -> Result<ExactInt> {
    eval_exact_bounded(params, kind, n, DEFAULT_EXACT_BOUND)
}

pub fn eval_exact_bounded(
    params: LucasParams,
    kind: SequenceKind,
    n: i64,
    bound: u64,
) -> Result<ExactInt> {
    let (u, v) = eval_pair_exact_bounded(params, n, bound)?;
    Ok(match kind {
        SequenceKind::U => u,
        SequenceKind::V => v,
    })
}

/// Exact `(u_n, v_n)`.
pub fn eval_pair_exact_bounded(
    params: LucasParams,
    n: i64,
    bound: u64,
) -> Result<(ExactInt, ExactInt)> {
    let mag = n.unsigned_abs();
    if mag > bound {
        return Err(LucasError::IndexOutOfRange { n, bound });
    }
    let p = BigInt::from(params.p());
    let d = BigInt::from(params.discriminant());
    let two = BigInt::from(2);
    let mut u = BigInt::zero();
    let mut v = two.clone();
    let mut idx: u64 = 0;
    if mag != 0 {
        let top = 63 - mag.leading_zeros();
        for bit in (0..=top).rev() {
            let vv = &v * &v;
            let u2 = &u * &v;
            v = if idx.is_multiple_of(2) {
                vv - &two
            } else {
                vv + &two
            };
            u = u2;
            idx *= 2;
            if (mag >> bit) & 1 == 1 {
                // P u + v = 2 u_{n+1} and D u + P v = 2 v_{n+1}
                let nu: BigInt = (&p * &u + &v) >> 1;
                let nv: BigInt = (&d * &u + &p * &v) >> 1;
                u = nu;
                v = nv;
                idx += 1;
            }
        }
    }
    if n < 0 {
        let odd = mag % 2 == 1;
        if SequenceKind::U.reflection_negates(odd) {
            u = -u;
        }
        if SequenceKind::V.reflection_negates(odd) {
            v = -v;
        }
    }
    Ok((u, v))
}

/// Naive `O(n)` iteration of the recurrence modulo an arbitrary `m >= 1`.
///
/// Independent of the doubling kernel; intended as an oracle.
pub fn iterate_mod(params: LucasParams, kind: SequenceKind, n: u64, m: u64) -> u64 {
    assert!(m >= 1);
    let m = m as i128;
    let p = (params.p() as i128).rem_euclid(m);
    let (mut a, mut b) = match kind {
        SequenceKind::U => (0i128, 1i128.rem_euclid(m)),
        SequenceKind::V => (2i128.rem_euclid(m), p),
    };
    for _ in 0..n {
        let c = (p * b + a) % m;
        a = b;
        b = c;
    }
    a as u64
}

/// Naive exact iteration, forwards for `n >= 0` and backwards
/// (`x_{n-2} = x_n - P x_{n-1}`) for `n < 0`.
pub fn iterate_exact(params: LucasParams, kind: SequenceKind, n: i64) -> ExactInt {
    let p = BigInt::from(params.p());
    let (x0, x1) = match kind {
        SequenceKind::U => (BigInt::zero(), BigInt::one()),
        SequenceKind::V => (BigInt::from(2), p.clone()),
    };
    if n >= 0 {
        let (mut a, mut b) = (x0, x1);
        for _ in 0..n {
            let c = &p * &b + &a;
            a = std::mem::replace(&mut b, c);
        }
        a
    } else {
        // (a, b) = (x_j, x_{j+1}), walking j downwards
        let (mut a, mut b) = (x0, x1);
        for _ in 0..n.unsigned_abs() {
            let prev = &b - &p * &a;
            b = std::mem::replace(&mut a, prev);
        }
        a
    }
}

/// Streams `x_n mod 3^k` starting from a state `(x_n, x_{n+1})`.
#[derive(Debug, Clone)]
pub struct ResidueStream {
    p: u64,
    a: u64,
    b: u64,
    m: Modulus3Pow,
}

impl ResidueStream {
    pub fn from_start(params: LucasParams, kind: SequenceKind, m: Modulus3Pow) -> Self {
        let (a, b) = seed_state(params, kind, &m);
        ResidueStream {
            p: params.p_mod(&m),
            a,
            b,
            m,
        }
    }

    /// Jump ahead to index `n` with the doubling kernel.
    pub fn from_index(params: LucasParams, kind: SequenceKind, m: Modulus3Pow, n: u64) -> Self {
        let (a, b) = eval_pair_mod(params, n as i128, &m).state(kind, params, &m);
        ResidueStream {
            p: params.p_mod(&m),
            a,
            b,
            m,
        }
    }

    /// Current state `(x_n, x_{n+1})`.
    pub fn state(&self) -> (u64, u64) {
        (self.a, self.b)
    }
}

impl Iterator for ResidueStream {
    type Item = u64;

    #[inline]
    fn next(&mut self) -> Option<u64> {
        let out = self.a;
        let c = self.m.add(self.m.mul(self.p, self.b), self.a);
        self.a = self.b;
        self.b = c;
        Some(out)
    }
}

/// `(x_0, x_1) mod 3^k`.
pub fn seed_state(params: LucasParams, kind: SequenceKind, m: &Modulus3Pow) -> (u64, u64) {
    match kind {
        SequenceKind::U => (0, m.reduce_u64(1)),
        SequenceKind::V => (m.reduce_u64(2), params.p_mod(m)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;
    use proptest::prelude::*;

    fn params(p: i64) -> LucasParams {
        LucasParams::new(p).unwrap()
    }

    fn modk(k: u32) -> Modulus3Pow {
        Modulus3Pow::new(k).unwrap()
    }

    #[test]
    fn zero_parameter_rejected() {
        assert_eq!(LucasParams::new(0), Err(LucasError::ZeroParameter));
    }

    #[test]
    fn exact_examples() {
        assert_eq!(eval_exact(params(1), SequenceKind::U, 0).unwrap(), 0.into());
        assert_eq!(
            eval_exact(params(5), SequenceKind::U, 4).unwrap(),
            135.into()
        );
        assert_eq!(
            eval_exact(params(1), SequenceKind::U, -4).unwrap(),
            (-3).into()
        );
        assert_eq!(iterate_exact(params(1), SequenceKind::U, -4), (-3).into());
    }

    #[test]
    fn exact_bound() {
        let err = eval_exact(params(1), SequenceKind::U, 4097).unwrap_err();
        assert_eq!(
            err,
            LucasError::IndexOutOfRange {
                n: 4097,
                bound: 4096
            }
        );
        assert!(eval_exact(params(1), SequenceKind::V, -4096).is_ok());
    }

    #[test]
    fn modular_examples() {
        assert_eq!(eval_mod(params(1), SequenceKind::U, 10, &modk(3)), 1);
        assert_eq!(eval_mod(params(1), SequenceKind::V, 0, &modk(2)), 2);
        assert_eq!(eval_mod(params(5), SequenceKind::V, 2, &modk(3)), 0);
    }

    #[test]
    fn pair_examples() {
        let pair = eval_pair_mod(params(1), 6, &modk(1));
        assert_eq!((pair.u, pair.v), (2, 0));
        let pair = eval_pair_mod(params(3), 1, &modk(1));
        assert_eq!((pair.u, pair.v), (1, 0));
    }

    #[test]
    fn deep_index_two_paths() {
        // 2^40 reached directly and as the double of 2^39
        let m = modk(2);
        let direct = eval_pair_mod(params(1), 1 << 40, &m);
        let half = eval_pair_mod(params(1), 1 << 39, &m);
        let two = m.reduce_u64(2);
        assert_eq!(direct.u, m.mul(half.u, half.v));
        assert_eq!(direct.v, m.sub(m.mul(half.v, half.v), two));
        // the Fibonacci period mod 9 is 24
        let r = (1u64 << 40) % 24;
        assert_eq!(direct.u, iterate_mod(params(1), SequenceKind::U, r, 9));
    }

    #[test]
    fn astronomically_large_index() {
        // 2 * 3^40 is a multiple of the period 2 * 3^{k-1} of P = 3 for k <= 41,
        // so u_n = u_0 and v_{n+1} = v_1.
        let n = 2 * 3i128.pow(40);
        let m = modk(10);
        assert_eq!(eval_mod(params(3), SequenceKind::U, n, &m), m.reduce_u64(0));
        assert_eq!(eval_mod(params(3), SequenceKind::V, n + 1, &m), 3);
    }

    #[test]
    fn negative_p_matches_iteration() {
        for p in [-1, -4, -9] {
            for n in 0..200u64 {
                for k in [1, 3, 6] {
                    let m = modk(k);
                    for kind in SequenceKind::BOTH {
                        assert_eq!(
                            eval_mod(params(p), kind, n as i128, &m),
                            iterate_mod(params(p), kind, n, m.value())
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn doubling_matches_iteration_on_grid() {
        for p in [1, -1, 2, -2, 3, 5, 9] {
            for k in 1..=10 {
                let m = modk(k);
                for kind in SequenceKind::BOTH {
                    let mut stream = ResidueStream::from_start(params(p), kind, m);
                    for n in 0..=20_000u64 {
                        let x = stream.next().unwrap();
                        if n % 97 == 0 || n < 300 {
                            assert_eq!(eval_mod(params(p), kind, n as i128, &m), x);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn recurrence_consistency() {
        for p in [1, 2, 3, 5, 9, -4] {
            let m = modk(7);
            let pm = m.reduce_i64(p);
            for kind in SequenceKind::BOTH {
                for n in 2..=10_000i128 {
                    let lhs = eval_mod(params(p), kind, n, &m);
                    let rhs = m.add(
                        m.mul(pm, eval_mod(params(p), kind, n - 1, &m)),
                        eval_mod(params(p), kind, n - 2, &m),
                    );
                    assert_eq!(lhs, rhs, "P={p} {kind} n={n}");
                }
            }
        }
    }

    #[test]
    fn reflection_exact() {
        for p in [1, 2, 3, -2, 7] {
            for n in 0..=200i64 {
                let u = eval_exact(params(p), SequenceKind::U, n).unwrap();
                let v = eval_exact(params(p), SequenceKind::V, n).unwrap();
                let su = if n % 2 == 1 { 1 } else { -1 };
                let sv = if n % 2 == 1 { -1 } else { 1 };
                assert_eq!(eval_exact(params(p), SequenceKind::U, -n).unwrap(), u * su);
                assert_eq!(eval_exact(params(p), SequenceKind::V, -n).unwrap(), v * sv);
            }
        }
    }

    #[test]
    fn jump_ahead_stream_matches_start_stream() {
        let m = modk(5);
        let p = params(7);
        let from_zero: Vec<u64> = ResidueStream::from_start(p, SequenceKind::V, m)
            .skip(1000)
            .take(50)
            .collect();
        let jumped: Vec<u64> = ResidueStream::from_index(p, SequenceKind::V, m, 1000)
            .take(50)
            .collect();
        assert_eq!(from_zero, jumped);
    }

    proptest! {
        #[test]
        fn exact_matches_iteration(p in -20i64..=20, n in -300i64..=300) {
            prop_assume!(p != 0);
            for kind in SequenceKind::BOTH {
                prop_assert_eq!(
                    eval_exact(params(p), kind, n).unwrap(),
                    iterate_exact(params(p), kind, n)
                );
            }
        }

        #[test]
        fn modular_matches_exact(p in -50i64..=50, n in -2000i64..=2000, k in 0u32..=24) {
            prop_assume!(p != 0);
            let m = modk(k);
            for kind in SequenceKind::BOTH {
                let exact = eval_exact(params(p), kind, n).unwrap();
                let reduced = exact.mod_floor(&BigInt::from(m.value()));
                prop_assert_eq!(BigInt::from(eval_mod(params(p), kind, n as i128, &m)), reduced);
            }
        }

        #[test]
        fn pair_doubles(p in 1i64..=100, n in 0i128..(1i128 << 60), k in 1u32..=24) {
            let m = modk(k);
            let pair = eval_pair_mod(params(p), n, &m);
            let twice = eval_pair_mod(params(p), 2 * n, &m);
            prop_assert_eq!(twice.u, m.mul(pair.u, pair.v));
        }
    }
}
