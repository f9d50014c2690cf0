//! Classical identities of the Lucas pair, checked with exact arithmetic.
//!
//! For all integers `n` (and `s ≡ t (mod 2)` for the half-sum family, with
//! `ε = (-1)^{(s-t)/2}`):
//!
//! ```text
//! double_u        u_{2n} = u_n v_n
//! double_v        v_{2n} = v_n^2 - 2(-1)^n
//! double_v_mixed  v_{2n} = u_n v_{n+1} + u_{n-1} v_n
//! triple_u        u_{3n} = u_n (D u_n^2 + 3(-1)^n)
//! gcd_shift       gcd(u_{qn+r}, u_n) = gcd(u_n, u_r)        (n, q not both 0)
//! sum_u           u_s + ε u_t = u_{(s+t)/2} v_{(s-t)/2}
//! diff_u          u_s - ε u_t = u_{(s-t)/2} v_{(s+t)/2}
//! sum_v           v_s + ε v_t = v_{(s+t)/2} v_{(s-t)/2}
//! diff_v          v_s - ε v_t = D u_{(s+t)/2} u_{(s-t)/2}
//! ```

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{LucasError, Result};
use crate::sequence::{eval_exact, eval_pair_exact_bounded, ExactInt, LucasParams, SequenceKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityName {
    DoubleU,
    DoubleV,
    DoubleVMixed,
    TripleU,
    GcdShift,
    SumU,
    DiffU,
    SumV,
    DiffV,
}

impl IdentityName {
    pub const ALL: [IdentityName; 9] = [
        IdentityName::DoubleU,
        IdentityName::DoubleV,
        IdentityName::DoubleVMixed,
        IdentityName::TripleU,
        IdentityName::GcdShift,
        IdentityName::SumU,
        IdentityName::DiffU,
        IdentityName::SumV,
        IdentityName::DiffV,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            IdentityName::DoubleU => "double_u",
            IdentityName::DoubleV => "double_v",
            IdentityName::DoubleVMixed => "double_v_mixed",
            IdentityName::TripleU => "triple_u",
            IdentityName::GcdShift => "gcd_shift",
            IdentityName::SumU => "sum_u",
            IdentityName::DiffU => "diff_u",
            IdentityName::SumV => "sum_v",
            IdentityName::DiffV => "diff_v",
        }
    }

    /// Number of integer inputs: `n`, `(n, q, r)` or `(s, t)`.
    pub fn arity(&self) -> usize {
        match self {
            IdentityName::DoubleU
            | IdentityName::DoubleV
            | IdentityName::DoubleVMixed
            | IdentityName::TripleU => 1,
            IdentityName::GcdShift => 3,
            IdentityName::SumU | IdentityName::DiffU | IdentityName::SumV | IdentityName::DiffV => {
                2
            }
        }
    }
}

impl std::fmt::Display for IdentityName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Anything that can produce exact terms.
pub trait TermSource {
    fn term(&self, kind: SequenceKind, n: i64) -> Result<ExactInt>;
}

/// Evaluates every term afresh with exact doubling.
#[derive(Debug, Clone, Copy)]
pub struct DirectTerms(pub LucasParams);

impl TermSource for DirectTerms {
    fn term(&self, kind: SequenceKind, n: i64) -> Result<ExactInt> {
        eval_exact(self.0, kind, n)
    }
}

/// Precomputed exact terms for `|n| <= radius`.
#[derive(Debug, Clone)]
pub struct TermTable {
    radius: i64,
    u: Vec<ExactInt>,
    v: Vec<ExactInt>,
    params: LucasParams,
}

impl TermTable {
    pub fn new(params: LucasParams, radius: u64) -> Result<Self> {
        let radius = radius as i64;
        let mut u = Vec::with_capacity(2 * radius as usize + 1);
        let mut v = Vec::with_capacity(2 * radius as usize + 1);
        for n in -radius..=radius {
            let (un, vn) = eval_pair_exact_bounded(params, n, radius as u64)?;
            u.push(un);
            v.push(vn);
        }
        Ok(TermTable {
            radius,
            u,
            v,
            params,
        })
    }
}

impl TermSource for TermTable {
    fn term(&self, kind: SequenceKind, n: i64) -> Result<ExactInt> {
        if n.abs() > self.radius {
            return eval_exact(self.params, kind, n);
        }
        let idx = (n + self.radius) as usize;
        Ok(match kind {
            SequenceKind::U => self.u[idx].clone(),
            SequenceKind::V => self.v[idx].clone(),
        })
    }
}

fn sign(negative: bool) -> BigInt {
    if negative {
        BigInt::from(-1)
    } else {
        BigInt::from(1)
    }
}

/// Checks one identity at one input tuple with exact arithmetic.
pub fn check_identity(params: LucasParams, id: IdentityName, inputs: &[i64]) -> Result<bool> {
    check_identity_with(&DirectTerms(params), params, id, inputs)
}

pub fn check_identity_with<S: TermSource>(
    terms: &S,
    params: LucasParams,
    id: IdentityName,
    inputs: &[i64],
) -> Result<bool> {
    use SequenceKind::{U, V};

    if inputs.len() != id.arity() {
        return Err(LucasError::Arity {
            identity: id.as_str(),
            expected: id.arity(),
            actual: inputs.len(),
        });
    }
    let d = BigInt::from(params.discriminant());
    let u = |n: i64| terms.term(U, n);
    let v = |n: i64| terms.term(V, n);

    match id {
        IdentityName::DoubleU => {
            let n = inputs[0];
            Ok(u(2 * n)? == u(n)? * v(n)?)
        }
        IdentityName::DoubleV => {
            let n = inputs[0];
            let vn = v(n)?;
            Ok(v(2 * n)? == &vn * &vn - 2 * sign(n.is_odd()))
        }
        IdentityName::DoubleVMixed => {
            let n = inputs[0];
            Ok(v(2 * n)? == u(n)? * v(n + 1)? + u(n - 1)? * v(n)?)
        }
        IdentityName::TripleU => {
            let n = inputs[0];
            let un = u(n)?;
            let rhs = &un * (&d * &un * &un + 3 * sign(n.is_odd()));
            Ok(u(3 * n)? == rhs)
        }
        IdentityName::GcdShift => {
            let (n, q, r) = (inputs[0], inputs[1], inputs[2]);
            if n == 0 && q == 0 {
                return Err(LucasError::Precondition(
                    "gcd_shift needs n and q not both zero".into(),
                ));
            }
            let un = u(n)?;
            Ok(u(q * n + r)?.gcd(&un) == un.gcd(&u(r)?))
        }
        IdentityName::SumU | IdentityName::DiffU | IdentityName::SumV | IdentityName::DiffV => {
            let (s, t) = (inputs[0], inputs[1]);
            if (s - t).is_odd() {
                return Err(LucasError::ParityMismatch { s, t });
            }
            let half_sum = (s + t) / 2;
            let half_diff = (s - t) / 2;
            let eps = sign(half_diff.is_odd());
            Ok(match id {
                IdentityName::SumU => u(s)? + eps * u(t)? == u(half_sum)? * v(half_diff)?,
                IdentityName::DiffU => u(s)? - eps * u(t)? == u(half_diff)? * v(half_sum)?,
                IdentityName::SumV => v(s)? + eps * v(t)? == v(half_sum)? * v(half_diff)?,
                _ => v(s)? - eps * v(t)? == &d * u(half_sum)? * u(half_diff)?,
            })
        }
    }
}

/// Input grid for [`run_identity_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityGrid {
    /// Bound on `|n|`, `|r|`, `|s|`, `|t|`.
    pub radius: i64,
    /// Bound on `|q|` for `gcd_shift`.
    pub q_radius: i64,
}

impl Default for IdentityGrid {
    fn default() -> Self {
        IdentityGrid {
            radius: 50,
            q_radius: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityTally {
    pub identity: IdentityName,
    pub checked: u64,
    pub failed: u64,
    pub first_failure: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentitySuiteReport {
    #[serde(rename = "P")]
    pub p: i64,
    pub grid: IdentityGrid,
    pub tallies: Vec<IdentityTally>,
}

impl IdentitySuiteReport {
    pub fn all_hold(&self) -> bool {
        self.tallies.iter().all(|t| t.failed == 0 && t.checked > 0)
    }
}

/// Runs every identity over the grid. The half-sum identities only see
/// same-parity `(s, t)`.
pub fn run_identity_suite(params: LucasParams, grid: IdentityGrid) -> Result<IdentitySuiteReport> {
    let r = grid.radius;
    let reach = (3 * r).max(grid.q_radius * r + r) as u64;
    let table = TermTable::new(params, reach)?;

    let mut tallies = Vec::with_capacity(IdentityName::ALL.len());
    for id in IdentityName::ALL {
        let inputs: Vec<Vec<i64>> = match id.arity() {
            1 => (-r..=r).map(|n| vec![n]).collect(),
            2 => (-r..=r)
                .flat_map(|s| {
                    (-r..=r)
                        .filter(move |t| (s - t) % 2 == 0)
                        .map(move |t| vec![s, t])
                })
                .collect(),
            _ => {
                let q_r = grid.q_radius;
                (-r..=r)
                    .flat_map(|n| {
                        (-q_r..=q_r)
                            .filter(move |&q| !(n == 0 && q == 0))
                            .flat_map(move |q| (-r..=r).map(move |rr| vec![n, q, rr]))
                    })
                    .collect()
            }
        };
        let mut tally = IdentityTally {
            identity: id,
            checked: 0,
            failed: 0,
            first_failure: None,
        };
        for input in inputs {
            tally.checked += 1;
            if !check_identity_with(&table, params, id, &input)? {
                tally.failed += 1;
                tally.first_failure.get_or_insert(input);
            }
        }
        tallies.push(tally);
    }
    Ok(IdentitySuiteReport {
        p: params.p(),
        grid,
        tallies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: i64) -> LucasParams {
        LucasParams::new(p).unwrap()
    }

    #[test]
    fn examples() {
        assert!(check_identity(params(1), IdentityName::DoubleU, &[6]).unwrap());
        assert!(check_identity(params(1), IdentityName::DiffV, &[0, 0]).unwrap());
        assert!(check_identity(params(2), IdentityName::GcdShift, &[6, 3, 2]).unwrap());
    }

    #[test]
    fn parity_violation_is_an_error_not_false() {
        assert_eq!(
            check_identity(params(1), IdentityName::SumU, &[3, 0]),
            Err(LucasError::ParityMismatch { s: 3, t: 0 })
        );
    }

    #[test]
    fn arity_and_gcd_preconditions() {
        assert!(matches!(
            check_identity(params(1), IdentityName::TripleU, &[1, 2]),
            Err(LucasError::Arity {
                expected: 1,
                actual: 2,
                ..
            })
        ));
        assert!(matches!(
            check_identity(params(1), IdentityName::GcdShift, &[0, 0, 5]),
            Err(LucasError::Precondition(_))
        ));
    }

    #[test]
    fn a_false_identity_is_detected() {
        // perturb a single term
        struct Off(TermTable);
        impl TermSource for Off {
            fn term(&self, kind: SequenceKind, n: i64) -> Result<ExactInt> {
                let x = self.0.term(kind, n)?;
                Ok(if kind == SequenceKind::V && n == 12 {
                    x + 1
                } else {
                    x
                })
            }
        }
        let off = Off(TermTable::new(params(1), 20).unwrap());
        assert!(!check_identity_with(&off, params(1), IdentityName::DoubleV, &[6]).unwrap());
    }

    #[test]
    fn table_agrees_with_direct() {
        let p = params(-4);
        let table = TermTable::new(p, 30).unwrap();
        for n in -30..=30 {
            for kind in SequenceKind::BOTH {
                let direct = DirectTerms(p).term(kind, n).unwrap();
                assert_eq!(table.term(kind, n).unwrap(), direct);
            }
        }
    }

    #[test]
    fn small_suite_holds() {
        let grid = IdentityGrid {
            radius: 12,
            q_radius: 3,
        };
        for p in [1, 3, -1] {
            let report = run_identity_suite(params(p), grid).unwrap();
            assert!(report.all_hold(), "{report:?}");
        }
    }
}
