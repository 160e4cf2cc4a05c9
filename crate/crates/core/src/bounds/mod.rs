//! Closed-form identifiability bounds and the table of known exceptions.
//!
//! Factor dimensions are sorted ascending on entry everywhere.

mod exceptions;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::segre::Format;
pub use exceptions::{known_exceptions, ExceptionKind, ExceptionMatch, ExceptionRow, EXCEPTIONS, EXCEPTIONS_VERSION};

fn sorted(format: &Format) -> Vec<u64> {
    let mut d: Vec<u64> = format.dims().iter().map(|&x| x as u64).collect();
    d.sort_unstable();
    d
}

/// Largest `k` for which `k`-identifiability can hold:
/// `⌊ ∏_{i<n} a_i / (1 + (Σ_{i<n} a_i - (n-1)) / a_n) ⌋` with `a_n` the largest factor.
pub fn k_max(format: &Format) -> u64 {
    let d = sorted(format);
    let n = d.len() as u64;
    let an = *d.last().unwrap();
    let head = &d[..d.len() - 1];
    let prod: BigUint = head.iter().fold(BigUint::one(), |acc, &x| acc * x);
    let head_sum: u64 = head.iter().sum();
    // multiply numerator and denominator by a_n
    let num = prod * an;
    let den = an + head_sum - (n - 1);
    (num / den).to_u64().expect("k_max fits in 64 bits")
}

/// `2k + n - 1 <= Σ min(k, a_i)`.
pub fn kruskal_holds(format: &Format, k: u64) -> bool {
    let n = format.n() as u64;
    let rhs: u64 = format.dims().iter().map(|&a| k.min(a as u64)).sum();
    2 * k + n - 1 <= rhs
}

/// Largest `k` satisfying [`kruskal_holds`] (0 if none).
pub fn kruskal_max(format: &Format) -> u64 {
    let total: u64 = format.dims().iter().map(|&a| a as u64).sum();
    (1..=total).rev().find(|&k| kruskal_holds(format, k)).unwrap_or(0)
}

/// Cubic convenience form `⌊(3a - 2) / 2⌋`.
pub fn kruskal_cubic(a: u64) -> u64 {
    (3 * a - 2) / 2
}

/// Largest `α` with `base^α <= a`.
pub fn log_floor(a: u64, base: u64) -> u32 {
    assert!(base >= 2);
    let mut alpha = 0;
    let mut p = base;
    while p <= a {
        alpha += 1;
        p = match p.checked_mul(base) {
            Some(q) => q,
            None => break,
        };
    }
    alpha
}

/// `base^(α_1 + ... + α_{n-1} - (n-1))` over the `n - 1` smallest factors, where
/// `α_i` is maximal with `base^α_i <= a_i`; 0 when some factor is below `base`.
pub fn co_bound(format: &Format, base: u64) -> u64 {
    let d = sorted(format);
    let alphas: Vec<u32> = d.iter().map(|&a| log_floor(a, base)).collect();
    if alphas.contains(&0) {
        return 0;
    }
    let n = d.len() as u32;
    let e: u32 = alphas[..d.len() - 1].iter().sum::<u32>() - (n - 1);
    base.saturating_pow(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenericRank {
    Known(u64),
    Unknown,
}

/// `⌈a³ / (3a - 2)⌉`, the balanced value before the `a = 3` correction.
pub fn cubic_rank_formula(a: u64) -> u64 {
    (a * a * a).div_ceil(3 * a - 2)
}

/// Generic rank of a three-factor format in the regimes with a closed form.
pub fn generic_rank(format: &Format) -> GenericRank {
    if format.n() != 3 {
        return GenericRank::Unknown;
    }
    let d = sorted(format);
    let (a, b, c) = (d[0], d[1], d[2]);
    if a == b && b == c {
        return GenericRank::Known(if a == 3 { 5 } else { cubic_rank_formula(a) });
    }
    let border = (a - 1) * (b - 1);
    if c == border {
        GenericRank::Known(a * b - a - b + 2)
    } else if c > border {
        GenericRank::Known(c.min(a * b))
    } else {
        GenericRank::Unknown
    }
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Big counts travel through JSON as decimal strings.
pub(crate) mod decimal {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(|_| D::Error::custom(format!("'{text}' is not a decimal integer")))
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
            match x {
                Some(x) => super::serialize(x, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|t| t.parse().map_err(|_| D::Error::custom(format!("'{t}' is not a decimal integer"))))
                .transpose()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum UnbalancedVerdict {
    Identifiable,
    /// Exactly `count` decompositions; `count == 1` is still unique.
    FiniteDecompositions {
        #[serde(with = "decimal")]
        count: BigUint,
    },
    NotIdentifiable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnbalancedReport {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub k: u64,
    /// `(a-1)(b-1)`.
    pub threshold: u64,
    pub verdict: UnbalancedVerdict,
}

impl UnbalancedReport {
    pub fn is_identifiable(&self) -> bool {
        match &self.verdict {
            UnbalancedVerdict::Identifiable => true,
            UnbalancedVerdict::FiniteDecompositions { count } => count.is_one(),
            UnbalancedVerdict::NotIdentifiable => false,
        }
    }
}

/// Identifiability in the unbalanced regime `c >= (a-1)(b-1) + 2`, `a <= b`.
///
/// Also accepts the border format `(3,3,5)` at `k = 5`, where the same count
/// (six decompositions) holds.
pub fn unbalanced_report(a: u64, b: u64, c: u64, k: u64) -> Result<UnbalancedReport> {
    let (a, b) = (a.min(b), a.max(b));
    if a < 2 || k == 0 {
        return Err(Error::InvalidProblem("need a, b >= 2 and k >= 1".into()));
    }
    let threshold = (a - 1) * (b - 1);
    let border_case = (a, b, c, k) == (3, 3, 5, 5);
    if c < threshold + 2 && !border_case {
        return Err(Error::OutOfRegime(format!(
            "unbalanced formulas need c >= (a-1)(b-1)+2 = {}, got c = {c}",
            threshold + 2
        )));
    }
    let verdict = if k <= threshold {
        UnbalancedVerdict::Identifiable
    } else if k == threshold + 1 {
        let d = binomial(a + b - 2, a - 1).to_u64().expect("degree fits");
        UnbalancedVerdict::FiniteDecompositions {
            count: binomial(d, threshold + 1),
        }
    } else {
        UnbalancedVerdict::NotIdentifiable
    };
    Ok(UnbalancedReport {
        a,
        b,
        c,
        k,
        threshold,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub format: Format,
    pub k_max: u64,
    pub kruskal_max: u64,
    /// `(base, bound)` for bases 2 and 3.
    pub co_bounds: Vec<(u64, u64)>,
    pub generic_rank: GenericRank,
    /// Known non-identifiable ranks below `k_max`.
    pub exceptions: Vec<ExceptionMatch>,
    pub exceptions_version: u32,
}

pub fn bound_report(format: &Format) -> BoundReport {
    let km = k_max(format);
    let exceptions = if format.n() == 3 {
        let d = sorted(format);
        (1..=km)
            .flat_map(|k| known_exceptions(d[0], d[1], d[2], k))
            .collect()
    } else {
        Vec::new()
    };
    BoundReport {
        format: format.clone(),
        k_max: km,
        kruskal_max: kruskal_max(format),
        co_bounds: vec![(2, co_bound(format, 2)), (3, co_bound(format, 3))],
        generic_rank: generic_rank(format),
        exceptions,
        exceptions_version: EXCEPTIONS_VERSION,
    }
}
