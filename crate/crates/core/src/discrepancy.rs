//! Tags for known disagreements between printed formulas and enumeration.
//!
//! A flag is attached whenever the code path it concerns runs, whether or not
//! the run itself finds a mismatch.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscrepancyFlag {
    /// Period for `3 ∤ P` is `8·3^{k-δ}`; a leading constant of 4 is wrong.
    PeriodConstant,
    /// Valuation is `ord_3(n) + δ` on the hit class, not `ord_3 δ`.
    ValuationFormula,
    /// `l`-line reference index uses exponent `l - δ`, not `l - 1`.
    ClassIndexExponent,
    /// Residues `b ≡ 0 (mod 3^δ)` off the special lines occur once per period
    /// when `3 | P`, not twice.
    ZeroClassCount,
}

impl DiscrepancyFlag {
    pub const ALL: [DiscrepancyFlag; 4] = [
        DiscrepancyFlag::PeriodConstant,
        DiscrepancyFlag::ValuationFormula,
        DiscrepancyFlag::ClassIndexExponent,
        DiscrepancyFlag::ZeroClassCount,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            DiscrepancyFlag::PeriodConstant => "period_constant",
            DiscrepancyFlag::ValuationFormula => "valuation_formula",
            DiscrepancyFlag::ClassIndexExponent => "class_index_exponent",
            DiscrepancyFlag::ZeroClassCount => "zero_class_count",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            DiscrepancyFlag::PeriodConstant => {
                "shortest period for 3 ∤ P is 8·3^(k-δ); the constant 4 disagrees with enumeration"
            }
            DiscrepancyFlag::ValuationFormula => {
                "valuation on the hit class is ord_3(n) + δ; the literal ord_3 δ disagrees"
            }
            DiscrepancyFlag::ClassIndexExponent => {
                "class reference indices use 3^(l-δ); the 3^(l-1) reading fails for δ ≥ 2"
            }
            DiscrepancyFlag::ZeroClassCount => {
                "for 3 | P the residues b ≡ 0 mod 3^δ off the special lines have count 1, not 2"
            }
        }
    }
}

impl fmt::Display for DiscrepancyFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
