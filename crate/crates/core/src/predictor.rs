//! Closed-form residue frequencies, evaluated line by line.
//!
//! Each case is a piecewise formula. Lines are tried top to bottom and the
//! first match wins; the `l`-indexed lines run from `l = ⌊(k-1)/2⌋` down to
//! the case's lower bound. Every reference residue is computed with
//! [`eval_mod`] at the modulus of its own line.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::census::{census_with, Histogram};
use crate::discrepancy::DiscrepancyFlag;
use crate::error::{LucasError, Result};
use crate::modulus::Modulus3Pow;
use crate::period::{period_closed, SearchOptions};
use crate::sequence::{eval_mod, LucasParams, SequenceKind};
use crate::valuation::{delta_of, Branch, DeltaProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremCase {
    /// `3 ∤ P`, `δ = 1`
    Thm1Case1,
    /// `3 ∤ P`, `δ ≥ 2`, `k ≥ 2δ - 1`
    Thm1Case2,
    /// `3 ∤ P`, `δ ≥ 2`, `δ ≤ k < 2δ - 1`
    Thm1Case3,
    /// `3 | P`, `k ≥ 2δ - 1`
    Thm2Case1,
    /// `3 | P`, `δ ≤ k < 2δ - 1`
    Thm2Case2,
    /// `k < δ`
    Unsupported,
}

impl TheoremCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremCase::Thm1Case1 => "Thm1Case1",
            TheoremCase::Thm1Case2 => "Thm1Case2",
            TheoremCase::Thm1Case3 => "Thm1Case3",
            TheoremCase::Thm2Case1 => "Thm2Case1",
            TheoremCase::Thm2Case2 => "Thm2Case2",
            TheoremCase::Unsupported => "Unsupported",
        }
    }
}

impl fmt::Display for TheoremCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which exponent the `l`-lines of the `3 ∤ P` cases use in their reference
/// index. Both agree when `δ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentReading {
    /// `2·3^{l-δ}` / `4·3^{l-δ}`; agrees with enumeration.
    #[default]
    LMinusDelta,
    /// `2·3^{l-1}` / `4·3^{l-1}`; kept for comparison.
    LMinusOne,
}

/// The special index `J(k)`: `2·3^e` when `3 ∤ P` and `3^e` when `3 | P`,
/// with `e = 2⌊(k - x)/4⌋ + 1` and `x = 2δ - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JIndex {
    pub exponent: u32,
    pub value: u64,
}

impl JIndex {
    /// `None` when `k < 2δ - 1`.
    pub fn for_k(profile: DeltaProfile, k: u32) -> Option<JIndex> {
        let x = profile.threshold();
        if k < x {
            return None;
        }
        let exponent = 2 * ((k - x) / 4) + 1;
        let base = 3u64.pow(exponent);
        let value = match profile.branch {
            Branch::NotDivisible3 => 2 * base,
            Branch::Divisible3 => base,
        };
        Some(JIndex { exponent, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub case: TheoremCase,
    /// 1-based index of the line that fired. All `l`-lines share one index.
    pub line: u8,
    /// The `l` of the firing line, for `l`-indexed lines.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<u32>,
    pub count: u64,
}

pub fn classify(params: LucasParams, modulus: &Modulus3Pow) -> Result<TheoremCase> {
    if params.p() <= 0 {
        return Err(LucasError::UnsupportedParameter { p: params.p() });
    }
    let profile = delta_of(params);
    let (k, delta) = (modulus.k(), profile.delta);
    Ok(if k < delta {
        TheoremCase::Unsupported
    } else {
        let wide = k >= profile.threshold();
        match (profile.branch, delta, wide) {
            (Branch::NotDivisible3, 1, _) => TheoremCase::Thm1Case1,
            (Branch::NotDivisible3, _, true) => TheoremCase::Thm1Case2,
            (Branch::NotDivisible3, _, false) => TheoremCase::Thm1Case3,
            (Branch::Divisible3, _, true) => TheoremCase::Thm2Case1,
            (Branch::Divisible3, _, false) => TheoremCase::Thm2Case2,
        }
    })
}

/// One congruence line: `b ≡ r (mod 3^j)` for some `r` in `residues`.
#[derive(Debug, Clone)]
struct Line {
    modulus: Modulus3Pow,
    residues: Vec<u64>,
    count: u64,
    l: Option<u32>,
}

impl Line {
    fn new(modulus: Modulus3Pow, refs: &[u64], signed: bool, count: u64, l: Option<u32>) -> Self {
        let mut residues: Vec<u64> = refs.to_vec();
        if signed {
            residues.extend(refs.iter().map(|&r| modulus.neg(r)));
        }
        residues.sort_unstable();
        residues.dedup();
        Line {
            modulus,
            residues,
            count,
            l,
        }
    }

    #[inline]
    fn matches(&self, b: u64) -> bool {
        let r = b % self.modulus.value();
        self.residues.contains(&r)
    }
}

/// Precomputed lines for one `(P, kind, k)`.
#[derive(Debug, Clone)]
pub struct Predictor {
    params: LucasParams,
    kind: SequenceKind,
    modulus: Modulus3Pow,
    case: TheoremCase,
    reading: ExponentReading,
    lines: Vec<(u8, Line)>,
    fallback: (u8, u64),
}

impl Predictor {
    pub fn new(params: LucasParams, kind: SequenceKind, modulus: &Modulus3Pow) -> Result<Self> {
        Self::with_reading(params, kind, modulus, ExponentReading::default())
    }

    pub fn with_reading(
        params: LucasParams,
        kind: SequenceKind,
        modulus: &Modulus3Pow,
        reading: ExponentReading,
    ) -> Result<Self> {
        let case = classify(params, modulus)?;
        let profile = delta_of(params);
        if case == TheoremCase::Unsupported {
            return Err(LucasError::UnsupportedRange {
                k: modulus.k(),
                delta: profile.delta,
            });
        }
        let m = *modulus;
        let k = m.k();
        let delta = profile.delta;
        let at = |kind, n: u64, modulus: &Modulus3Pow| eval_mod(params, kind, n as i128, modulus);
        let u = SequenceKind::U;
        let v = SequenceKind::V;
        let coarse = Modulus3Pow::new(delta)?;
        let excess = 3u64.pow(k - delta);

        let mut lines: Vec<(u8, Line)> = Vec::new();
        let fallback;
        match case {
            TheoremCase::Thm1Case1 | TheoremCase::Thm1Case2 => {
                let bonus = if case == TheoremCase::Thm1Case1 { 2 } else { 0 };
                let j = JIndex::for_k(profile, k)
                    .expect("k is past the threshold")
                    .value;
                let top = match kind {
                    SequenceKind::U => at(u, j, &m),
                    SequenceKind::V => at(v, 0, &m),
                };
                lines.push((1, Line::new(m, &[top], true, 3u64.pow(k / 2) + bonus, None)));
                let lower = if case == TheoremCase::Thm1Case1 {
                    1
                } else {
                    delta
                };
                for l in (lower..=(k.saturating_sub(1) / 2)).rev() {
                    let lm = Modulus3Pow::new(2 * l + 1)?;
                    let e = match reading {
                        ExponentReading::LMinusDelta => l - delta,
                        ExponentReading::LMinusOne => l - 1,
                    };
                    let r = match kind {
                        SequenceKind::U => at(u, 2 * 3u64.pow(e), &lm),
                        SequenceKind::V => at(v, 4 * 3u64.pow(e), &lm),
                    };
                    lines.push((
                        2,
                        Line::new(lm, &[r], true, 2 * 3u64.pow(l) + bonus, Some(l)),
                    ));
                }
                if case == TheoremCase::Thm1Case1 {
                    fallback = (3, 2);
                } else {
                    lines.push((
                        3,
                        Line::new(
                            coarse,
                            &Self::base_class(params, kind, &coarse),
                            true,
                            2,
                            None,
                        ),
                    ));
                    fallback = (4, 0);
                }
            }
            TheoremCase::Thm1Case3 => {
                let top = match kind {
                    SequenceKind::U => at(u, 2, &m),
                    SequenceKind::V => at(v, 0, &m),
                };
                lines.push((1, Line::new(m, &[top], true, excess, None)));
                lines.push((
                    2,
                    Line::new(
                        coarse,
                        &Self::base_class(params, kind, &coarse),
                        true,
                        2,
                        None,
                    ),
                ));
                fallback = (3, 0);
            }
            TheoremCase::Thm2Case1 => {
                let j = JIndex::for_k(profile, k)
                    .expect("k is past the threshold")
                    .value;
                let top = match kind {
                    SequenceKind::U => at(u, j, &m),
                    SequenceKind::V => at(v, 0, &m),
                };
                lines.push((1, Line::new(m, &[top], false, 3u64.pow(k / 2), None)));
                for l in (delta..=(k.saturating_sub(1) / 2)).rev() {
                    let lm = Modulus3Pow::new(2 * l + 1)?;
                    let e = 3u64.pow(l - delta);
                    let r = match kind {
                        SequenceKind::U => at(u, e, &lm),
                        SequenceKind::V => at(v, 2 * e, &lm),
                    };
                    lines.push((2, Line::new(lm, &[r], false, 2 * 3u64.pow(l), Some(l))));
                }
                lines.push((3, Line::new(coarse, &[0], false, 1, None)));
                fallback = (4, 0);
            }
            TheoremCase::Thm2Case2 => {
                let top = match kind {
                    SequenceKind::U => at(u, 1, &m),
                    SequenceKind::V => at(v, 0, &m),
                };
                lines.push((1, Line::new(m, &[top], false, excess, None)));
                lines.push((2, Line::new(coarse, &[0], false, 1, None)));
                fallback = (3, 0);
            }
            TheoremCase::Unsupported => unreachable!(),
        }

        Ok(Predictor {
            params,
            kind,
            modulus: m,
            case,
            reading,
            lines,
            fallback,
        })
    }

    /// `{0, u_1}` or `{0, v_1}` modulo `3^δ`, before the `±`.
    fn base_class(params: LucasParams, kind: SequenceKind, coarse: &Modulus3Pow) -> [u64; 2] {
        [0, eval_mod(params, kind, 1, coarse)]
    }

    pub fn case(&self) -> TheoremCase {
        self.case
    }

    pub fn reading(&self) -> ExponentReading {
        self.reading
    }

    pub fn params(&self) -> LucasParams {
        self.params
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn modulus(&self) -> Modulus3Pow {
        self.modulus
    }

    /// Requires `b < 3^k`.
    pub fn predict(&self, b: u64) -> Result<Prediction> {
        if b >= self.modulus.value() {
            return Err(LucasError::Precondition(format!(
                "residue {b} is not below {}",
                self.modulus.value()
            )));
        }
        Ok(self.predict_reduced(b))
    }

    fn predict_reduced(&self, b: u64) -> Prediction {
        let (line, l, count) = self
            .lines
            .iter()
            .find(|(_, line)| line.matches(b))
            .map(|(no, line)| (*no, line.l, line.count))
            .unwrap_or((self.fallback.0, None, self.fallback.1));
        Prediction {
            case: self.case,
            line,
            l,
            count,
        }
    }

    /// Predicted counts for every residue in `[0, 3^k)`.
    pub fn histogram(&self) -> Histogram {
        let counts: Vec<(u64, u64)> = (0..self.modulus.value())
            .into_par_iter()
            .filter_map(|b| {
                let c = self.predict_reduced(b).count;
                (c > 0).then_some((b, c))
            })
            .collect();
        Histogram::from_counts(counts)
    }
}

pub fn predicted_freq(
    params: LucasParams,
    kind: SequenceKind,
    modulus: &Modulus3Pow,
    b: u64,
) -> Result<Prediction> {
    Predictor::new(params, kind, modulus)?.predict(b)
}

pub fn predicted_histogram(
    params: LucasParams,
    kind: SequenceKind,
    modulus: &Modulus3Pow,
) -> Result<Histogram> {
    Ok(Predictor::new(params, kind, modulus)?.histogram())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueDiff {
    pub residue: u64,
    pub predicted: u64,
    pub observed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    #[serde(rename = "P")]
    pub p: i64,
    pub kind: SequenceKind,
    pub k: u32,
    pub case: TheoremCase,
    /// Brute-force period.
    pub period: u64,
    pub closed_period: u64,
    pub diffs: Vec<ResidueDiff>,
    /// Residues where the `l - 1` exponent reading disagrees with the census,
    /// reported for `Thm1Case2` only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alternate_reading_mismatches: Option<u64>,
    pub discrepancy_flags: Vec<DiscrepancyFlag>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.diffs.is_empty() && self.period == self.closed_period
    }
}

/// Flags relevant to a case, independent of the outcome.
pub fn flags_for_case(case: TheoremCase) -> Vec<DiscrepancyFlag> {
    let mut flags = Vec::new();
    match case {
        TheoremCase::Thm1Case1 | TheoremCase::Thm1Case2 | TheoremCase::Thm1Case3 => {
            flags.push(DiscrepancyFlag::PeriodConstant);
            if matches!(case, TheoremCase::Thm1Case1 | TheoremCase::Thm1Case2) {
                flags.push(DiscrepancyFlag::ClassIndexExponent);
            }
        }
        TheoremCase::Thm2Case1 | TheoremCase::Thm2Case2 => {
            flags.push(DiscrepancyFlag::ZeroClassCount);
        }
        TheoremCase::Unsupported => {}
    }
    flags
}

pub fn verify(
    params: LucasParams,
    kind: SequenceKind,
    modulus: &Modulus3Pow,
) -> Result<VerificationReport> {
    verify_with(params, kind, modulus, SearchOptions::default())
}

/// Compares the closed form against a brute-force census.
pub fn verify_with(
    params: LucasParams,
    kind: SequenceKind,
    modulus: &Modulus3Pow,
    options: SearchOptions,
) -> Result<VerificationReport> {
    let predictor = Predictor::new(params, kind, modulus)?;
    let closed_period = period_closed(params, kind, modulus)?.h;
    let census = census_with(params, kind, modulus, options)?;
    let predicted = predictor.histogram();
    let diffs = predicted
        .diff(census.histogram())
        .into_iter()
        .map(|(residue, predicted, observed)| ResidueDiff {
            residue,
            predicted,
            observed,
        })
        .collect();
    let alternate_reading_mismatches = if predictor.case() == TheoremCase::Thm1Case2 {
        let alt = Predictor::with_reading(params, kind, modulus, ExponentReading::LMinusOne)?;
        Some(alt.histogram().diff(census.histogram()).len() as u64)
    } else {
        None
    };
    Ok(VerificationReport {
        p: params.p(),
        kind,
        k: modulus.k(),
        case: predictor.case(),
        period: census.period(),
        closed_period,
        diffs,
        alternate_reading_mismatches,
        discrepancy_flags: flags_for_case(predictor.case()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::census;
    use proptest::prelude::*;

    fn params(p: i64) -> LucasParams {
        LucasParams::new(p).unwrap()
    }

    fn modk(k: u32) -> Modulus3Pow {
        Modulus3Pow::new(k).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify(params(1), &modk(5)).unwrap(),
            TheoremCase::Thm1Case1
        );
        assert_eq!(
            classify(params(5), &modk(3)).unwrap(),
            TheoremCase::Thm1Case3
        );
        assert_eq!(
            classify(params(5), &modk(5)).unwrap(),
            TheoremCase::Thm1Case2
        );
        assert_eq!(
            classify(params(9), &modk(1)).unwrap(),
            TheoremCase::Unsupported
        );
        assert_eq!(
            classify(params(9), &modk(2)).unwrap(),
            TheoremCase::Thm2Case2
        );
        assert_eq!(
            classify(params(9), &modk(3)).unwrap(),
            TheoremCase::Thm2Case1
        );
        assert_eq!(
            classify(params(3), &modk(1)).unwrap(),
            TheoremCase::Thm2Case1
        );
        assert_eq!(
            classify(params(-1), &modk(1)),
            Err(LucasError::UnsupportedParameter { p: -1 })
        );
    }

    #[test]
    fn j_index_examples() {
        let j = |p, k| JIndex::for_k(delta_of(params(p)), k).map(|j| j.value);
        assert_eq!(j(1, 1), Some(6));
        assert_eq!(j(1, 2), Some(6));
        assert_eq!(j(1, 5), Some(54));
        assert_eq!(j(3, 1), Some(3));
        assert_eq!(j(5, 4), None);
        assert_eq!(j(5, 5), Some(6));
    }

    #[test]
    fn predicted_freq_examples() {
        let p = predicted_freq(params(1), SequenceKind::U, &modk(2), 8).unwrap();
        assert_eq!((p.case, p.line, p.count), (TheoremCase::Thm1Case1, 1, 5));
        let p = predicted_freq(params(1), SequenceKind::U, &modk(1), 0).unwrap();
        assert_eq!((p.line, p.count), (3, 2));
        let p = predicted_freq(params(5), SequenceKind::U, &modk(3), 22).unwrap();
        assert_eq!((p.case, p.line, p.count), (TheoremCase::Thm1Case3, 1, 1));
    }

    #[test]
    fn predicted_freq_errors() {
        assert!(matches!(
            predicted_freq(params(9), SequenceKind::U, &modk(1), 0),
            Err(LucasError::UnsupportedRange { k: 1, delta: 2 })
        ));
        assert!(matches!(
            predicted_freq(params(-2), SequenceKind::U, &modk(2), 0),
            Err(LucasError::UnsupportedParameter { p: -2 })
        ));
        assert!(matches!(
            predicted_freq(params(1), SequenceKind::U, &modk(2), 9),
            Err(LucasError::Precondition(_))
        ));
    }

    #[test]
    fn predicted_histogram_examples() {
        let h = |p, kind, k| predicted_histogram(params(p), kind, &modk(k)).unwrap();
        let expect = |pairs: &[(u64, u64)]| Histogram::from_counts(pairs.iter().copied());
        assert_eq!(h(3, SequenceKind::U, 1), expect(&[(0, 1), (1, 1)]));
        assert_eq!(h(1, SequenceKind::V, 1), expect(&[(2, 3), (1, 3), (0, 2)]));
        assert_eq!(h(9, SequenceKind::U, 2), expect(&[(1, 1), (0, 1)]));
    }

    #[test]
    fn verify_examples() {
        for k in 1..=6 {
            let r = verify(params(1), SequenceKind::U, &modk(k)).unwrap();
            assert!(r.passed(), "k={k}: {:?}", r.diffs);
        }
        let r = verify(params(5), SequenceKind::U, &modk(3)).unwrap();
        assert!(r.passed());
        assert_eq!(r.case, TheoremCase::Thm1Case3);
        let r = verify(params(5), SequenceKind::U, &modk(5)).unwrap();
        assert!(r.passed());
        assert!(r
            .discrepancy_flags
            .contains(&DiscrepancyFlag::ClassIndexExponent));
        let r = verify(params(3), SequenceKind::U, &modk(2)).unwrap();
        assert!(r
            .discrepancy_flags
            .contains(&DiscrepancyFlag::ZeroClassCount));
        assert_eq!(r.alternate_reading_mismatches, None);
    }

    #[test]
    fn alternate_reading_fails_for_large_delta() {
        // P = 4 has delta 2; the l - 1 exponent first differs once an l-line exists
        let r = verify(params(4), SequenceKind::U, &modk(5)).unwrap();
        assert!(r.passed());
        assert!(r.alternate_reading_mismatches.unwrap() > 0);
        // with delta 1 the two readings coincide
        let r = verify(params(1), SequenceKind::U, &modk(5)).unwrap();
        assert_eq!(r.alternate_reading_mismatches, None);
        let a = Predictor::with_reading(
            params(1),
            SequenceKind::V,
            &modk(7),
            ExponentReading::LMinusOne,
        )
        .unwrap()
        .histogram();
        assert_eq!(
            a,
            predicted_histogram(params(1), SequenceKind::V, &modk(7)).unwrap()
        );
    }

    #[test]
    fn verify_refuses_unsupported() {
        assert!(matches!(
            verify(params(27), SequenceKind::V, &modk(2)),
            Err(LucasError::UnsupportedRange { .. })
        ));
    }

    #[test]
    fn line_classes_are_disjoint_in_case_two() {
        // lines 1-2 sit on ±P mod 3^δ, line 3 on 0, ±1 mod 3^δ
        for p in [4, 5, 14] {
            let delta = delta_of(params(p)).delta;
            let coarse = modk(delta);
            for k in (2 * delta - 1)..(2 * delta + 3) {
                let pred = Predictor::new(params(p), SequenceKind::U, &modk(k)).unwrap();
                assert_eq!(pred.case(), TheoremCase::Thm1Case2);
                let pm = [coarse.reduce_i64(p), coarse.reduce_i64(-p)];
                for b in 0..modk(k).value() {
                    let hit = pred.predict(b).unwrap();
                    let r = b % coarse.value();
                    match hit.line {
                        1 | 2 => assert!(pm.contains(&r), "P={p} k={k} b={b}"),
                        3 => assert!(!pm.contains(&r)),
                        _ => {}
                    }
                }
            }
        }
    }

    fn supported() -> impl Strategy<Value = (i64, SequenceKind, u32)> {
        (
            prop::sample::select(vec![1i64, 2, 4, 5, 7, 8, 11, 14, 3, 6, 9, 12, 18, 27]),
            prop::sample::select(SequenceKind::BOTH.to_vec()),
            0u32..6,
        )
            .prop_map(|(p, kind, extra)| {
                let delta = delta_of(LucasParams::new(p).unwrap()).delta;
                (p, kind, delta.max(1) + extra)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn mass_is_conserved((p, kind, k) in supported()) {
            let m = modk(k);
            let hist = predicted_histogram(params(p), kind, &m).unwrap();
            prop_assert_eq!(hist.total(), period_closed(params(p), kind, &m).unwrap().h);
        }

        #[test]
        fn predictions_are_symmetric_when_three_does_not_divide_p((p, kind, k) in supported()) {
            prop_assume!(p % 3 != 0);
            let m = modk(k);
            let pred = Predictor::new(params(p), kind, &m).unwrap();
            for b in 0..m.value().min(2000) {
                prop_assert_eq!(pred.predict(b).unwrap().count, pred.predict(m.neg(b)).unwrap().count);
            }
        }

        #[test]
        fn prediction_matches_census_on_small_moduli((p, kind, k) in supported()) {
            let m = modk(k);
            prop_assume!(period_closed(params(p), kind, &m).unwrap().h <= 20_000);
            let c = census(params(p), kind, &m).unwrap();
            prop_assert_eq!(&predicted_histogram(params(p), kind, &m).unwrap(), c.histogram());
        }
    }
}
