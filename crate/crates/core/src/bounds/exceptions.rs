//! Known non-identifiable three-factor cases, kept as versioned data.
//!
//! Rows are matched against sorted `(a, b, c, k)`. New rows go at the end and
//! bump [`EXCEPTIONS_VERSION`]; row ids are never reused.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::binomial;

pub const EXCEPTIONS_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExceptionKind {
    /// The secant variety has less than the expected dimension.
    Defective,
    /// Expected dimension, but the tangential contact locus is positive-dimensional.
    WeaklyDefective,
    /// Weakly defective with exactly two decompositions.
    TwoDecompositions,
}

/// Shape of the formats and ranks a row covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    /// `c >= (a-1)(b-1) + 3` and `(a-1)(b-1) + 2 <= k < min(c, ab)`.
    UnbalancedDefective,
    /// `a >= 3`, `c >= (a-1)(b-1) + 2`, `k = (a-1)(b-1) + 1`.
    UnbalancedBorder,
    /// `(3, b, b)` with `b` odd and `k = (3b - 1) / 2`.
    ThreeOddSquare,
    /// A single `(a, b, c, k)`.
    Exact(u64, u64, u64, u64),
}

impl Pattern {
    fn matches(self, a: u64, b: u64, c: u64, k: u64) -> bool {
        let t = (a - 1) * (b - 1);
        match self {
            Pattern::UnbalancedDefective => c >= t + 3 && k >= t + 2 && k < c.min(a * b),
            Pattern::UnbalancedBorder => a >= 3 && c >= t + 2 && k == t + 1,
            Pattern::ThreeOddSquare => a == 3 && b == c && b % 2 == 1 && 2 * k == 3 * b - 1,
            Pattern::Exact(x, y, z, r) => (a, b, c, k) == (x, y, z, r),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decompositions {
    Unstated,
    Exact(u64),
    /// `C(d, (a-1)(b-1)+1)` with `d = C(a+b-2, a-1)`.
    UnbalancedCount,
}

#[derive(Debug, Clone, Copy)]
pub struct ExceptionRow {
    pub id: &'static str,
    pub kind: ExceptionKind,
    pub pattern: Pattern,
    pub decompositions: Decompositions,
    pub note: &'static str,
}

pub static EXCEPTIONS: &[ExceptionRow] = &[
    ExceptionRow {
        id: "unbalanced-defective",
        kind: ExceptionKind::Defective,
        pattern: Pattern::UnbalancedDefective,
        decompositions: Decompositions::Unstated,
        note: "unbalanced format, defective for (a-1)(b-1)+2 <= k < min(c, ab)",
    },
    ExceptionRow {
        id: "344-5",
        kind: ExceptionKind::Defective,
        pattern: Pattern::Exact(3, 4, 4, 5),
        decompositions: Decompositions::Unstated,
        note: "(3,4,4) is 5-defective",
    },
    ExceptionRow {
        id: "3bb-odd",
        kind: ExceptionKind::Defective,
        pattern: Pattern::ThreeOddSquare,
        decompositions: Decompositions::Unstated,
        note: "(3,b,b) with b odd is defective at k = (3b-1)/2",
    },
    ExceptionRow {
        id: "unbalanced-border",
        kind: ExceptionKind::WeaklyDefective,
        pattern: Pattern::UnbalancedBorder,
        decompositions: Decompositions::UnbalancedCount,
        note: "unbalanced format at k = (a-1)(b-1)+1: finitely many decompositions",
    },
    ExceptionRow {
        id: "444-6",
        kind: ExceptionKind::TwoDecompositions,
        pattern: Pattern::Exact(4, 4, 4, 6),
        decompositions: Decompositions::Exact(2),
        note: "the general 4x4x4 tensor of rank 6 has exactly two decompositions",
    },
    ExceptionRow {
        id: "366-8",
        kind: ExceptionKind::WeaklyDefective,
        pattern: Pattern::Exact(3, 6, 6, 8),
        decompositions: Decompositions::Unstated,
        note: "(3,6,6) is 8-weakly defective; contact locus is a 4-fold of degree 108",
    },
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionMatch {
    pub row: String,
    pub kind: ExceptionKind,
    pub k: u64,
    /// Exact decomposition count when the row states one.
    #[serde(with = "super::decimal::option")]
    pub decompositions: Option<BigUint>,
    pub note: String,
}

/// Every row covering `(a, b, c, k)`; dims are sorted internally.
pub fn known_exceptions(a: u64, b: u64, c: u64, k: u64) -> Vec<ExceptionMatch> {
    let mut d = [a, b, c];
    d.sort_unstable();
    let [a, b, c] = d;
    if a < 2 || k == 0 {
        return Vec::new();
    }
    EXCEPTIONS
        .iter()
        .filter(|row| row.pattern.matches(a, b, c, k))
        .map(|row| ExceptionMatch {
            row: row.id.to_string(),
            kind: row.kind,
            k,
            decompositions: match row.decompositions {
                Decompositions::Unstated => None,
                Decompositions::Exact(n) => Some(BigUint::from(n)),
                Decompositions::UnbalancedCount => {
                    let t = (a - 1) * (b - 1);
                    let d = binomial(a + b - 2, a - 1);
                    let d = u64::try_from(d).expect("degree fits");
                    Some(binomial(d, t + 1))
                }
            },
            note: row.note.to_string(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(a: u64, b: u64, c: u64, k: u64) -> Vec<ExceptionKind> {
        known_exceptions(a, b, c, k).into_iter().map(|m| m.kind).collect()
    }

    #[test]
    fn printed_rows() {
        assert_eq!(kinds(4, 4, 4, 6), vec![ExceptionKind::TwoDecompositions]);
        assert_eq!(kinds(3, 6, 6, 8), vec![ExceptionKind::WeaklyDefective]);
        assert_eq!(kinds(3, 5, 5, 7), vec![ExceptionKind::Defective]);
        assert_eq!(kinds(5, 5, 3, 7), vec![ExceptionKind::Defective]);
        assert_eq!(kinds(3, 4, 4, 5), vec![ExceptionKind::Defective]);
        assert!(kinds(4, 4, 4, 5).is_empty());
        assert!(kinds(3, 6, 6, 7).is_empty());
    }

    #[test]
    fn unbalanced_rows() {
        let m = known_exceptions(3, 3, 6, 5);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].decompositions, Some(BigUint::from(6u32)));
        assert_eq!(kinds(3, 3, 8, 6), vec![ExceptionKind::Defective]);
        assert!(kinds(3, 3, 8, 8).is_empty());
        // a = 2 has a unique decomposition at the border
        assert!(kinds(2, 3, 4, 3).is_empty());
    }

    #[test]
    fn row_ids_unique() {
        let mut ids: Vec<&str> = EXCEPTIONS.iter().map(|r| r.id).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), EXCEPTIONS.len());
    }
}
