use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ExplainError;

/// Verbal probability scale, from most to least likely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertaintyWord {
    Certain,
    AlmostCertain,
    Probable,
    ChancesAreEven,
    ProbablyNot,
    AlmostCertainlyNot,
    Impossible,
}

impl CertaintyWord {
    pub const ALL: [CertaintyWord; 7] = [
        CertaintyWord::Certain,
        CertaintyWord::AlmostCertain,
        CertaintyWord::Probable,
        CertaintyWord::ChancesAreEven,
        CertaintyWord::ProbablyNot,
        CertaintyWord::AlmostCertainlyNot,
        CertaintyWord::Impossible,
    ];

    pub fn text(self) -> &'static str {
        match self {
            CertaintyWord::Certain => "certain",
            CertaintyWord::AlmostCertain => "almost certain",
            CertaintyWord::Probable => "probable",
            CertaintyWord::ChancesAreEven => "changes are even",
            CertaintyWord::ProbablyNot => "probably not",
            CertaintyWord::AlmostCertainlyNot => "almost certainly not",
            CertaintyWord::Impossible => "impossible",
        }
    }
}

impl fmt::Display for CertaintyWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.text())
    }
}

/// Lower bounds (exclusive) of each word's range; the last range is closed at 0.
const THRESHOLDS: [(f64, CertaintyWord); 6] = [
    (0.9, CertaintyWord::Certain),
    (0.75, CertaintyWord::AlmostCertain),
    (0.55, CertaintyWord::Probable),
    (0.45, CertaintyWord::ChancesAreEven),
    (0.25, CertaintyWord::ProbablyNot),
    (0.10, CertaintyWord::AlmostCertainlyNot),
];

pub fn dynamics_words(p: f64) -> Result<CertaintyWord, ExplainError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ExplainError::BadProbability(p));
    }
    Ok(THRESHOLDS.iter().find(|(lo, _)| p > *lo).map_or(CertaintyWord::Impossible, |(_, w)| *w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use CertaintyWord::*;

    #[test]
    fn boundaries_belong_to_the_lower_word() {
        let cases = [
            (1.0, Certain),
            (0.95, Certain),
            (0.9, AlmostCertain),
            (0.75, Probable),
            (0.55, ChancesAreEven),
            (0.45, ProbablyNot),
            (0.25, AlmostCertainlyNot),
            (0.10, Impossible),
            (0.0, Impossible),
        ];
        for (p, w) in cases {
            assert_eq!(dynamics_words(p).unwrap(), w, "p = {p}");
        }
    }

    #[test]
    fn out_of_range() {
        assert!(dynamics_words(-1e-12).is_err());
        assert!(dynamics_words(1.0 + 1e-12).is_err());
        assert!(dynamics_words(f64::NAN).is_err());
    }
}
