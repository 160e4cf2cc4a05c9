//! Cited base lemmas and their machine-checked side conditions.

use serde::{Deserialize, Serialize};

use crate::segre::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaTag {
    /// `(2,2,2)` is `(1,0,0,0)`- and `(0,1,1,1)`-not weakly defective.
    Start,
    /// Three factors `2^{a_i}`, claim `(0, 2^{u_1}, 2^{u_2}, 2^{u_3})`, `u_i <= a_j + a_k - 2`.
    Zero,
    /// Three factors `2^{a_i}`, claim `(1, 2^{u_i} - 1, ...)`, same side condition.
    Uno,
    /// `n` factors `2^{α_i}`, claim `(0, 2^{u_i})` or `(1, 2^{u_i} - 1)`,
    /// `u_i <= Σ_{j != i} α_j - (n - 1)`.
    ZeroStep,
    /// Three factors `base^{α_i}`, claim `(k, 0, 0, 0)` with `k <= base^{α_1 + α_2 - 2}`
    /// over the two smallest exponents.
    Premain,
    /// `n` factors `base^{α_i}`, claim `(k, 0, ..., 0)` with
    /// `k <= base^{α_1 + ... + α_{n-1} - (n - 1)}` over the `n - 1` smallest.
    Pren,
}

impl LemmaTag {
    pub fn name(self) -> &'static str {
        match self {
            LemmaTag::Start => "start",
            LemmaTag::Zero => "zero",
            LemmaTag::Uno => "uno",
            LemmaTag::ZeroStep => "zerostep",
            LemmaTag::Premain => "premain",
            LemmaTag::Pren => "pren",
        }
    }

    pub fn parse(s: &str) -> Option<LemmaTag> {
        [
            LemmaTag::Start,
            LemmaTag::Zero,
            LemmaTag::Uno,
            LemmaTag::ZeroStep,
            LemmaTag::Premain,
            LemmaTag::Pren,
        ]
        .into_iter()
        .find(|t| t.name() == s)
    }

    /// Tags whose statement is about powers of 2 only.
    fn binary_only(self) -> bool {
        matches!(self, LemmaTag::Start | LemmaTag::Zero | LemmaTag::Uno | LemmaTag::ZeroStep)
    }
}

/// A lemma citation on a leaf. `u` is the exponent vector of the claim (empty
/// for tags without one); validation recomputes it from the node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LemmaCert {
    pub tag: LemmaTag,
    pub base: usize,
    pub u: Vec<u32>,
}

/// `Some(α)` with `base^α == x`.
fn exact_log(x: usize, base: usize) -> Option<u32> {
    let mut p = 1usize;
    let mut e = 0;
    while p < x {
        p = p.checked_mul(base)?;
        e += 1;
    }
    (p == x).then_some(e)
}

fn pow(base: usize, e: u32) -> Option<usize> {
    base.checked_pow(e)
}

fn exponents(problem: &Problem, base: usize) -> Result<Vec<u32>, String> {
    problem
        .dims
        .dims()
        .iter()
        .map(|&d| {
            exact_log(d, base)
                .filter(|&a| a >= 1)
                .ok_or_else(|| format!("factor {d} is not a positive power of {base}"))
        })
        .collect()
}

/// Exponents `u_i` with `p_i = 2^{u_i} + shift` (shift 0 or -1).
fn aux_exponents(aux: &[usize], minus_one: bool) -> Result<Vec<u32>, String> {
    aux.iter()
        .map(|&p| {
            let target = if minus_one { p + 1 } else { p };
            exact_log(target, 2).ok_or_else(|| {
                if minus_one {
                    format!("aux count {p} is not of the form 2^u - 1")
                } else {
                    format!("aux count {p} is not a power of 2")
                }
            })
        })
        .collect()
}

/// Checks that `problem` is exactly the claim of the cited lemma and returns
/// its exponent vector.
pub fn check_lemma(tag: LemmaTag, base: usize, problem: &Problem) -> Result<Vec<u32>, String> {
    if base < 2 {
        return Err(format!("base {base} < 2"));
    }
    if tag.binary_only() && base != 2 {
        return Err(format!("lemma {} is stated for base 2 only", tag.name()));
    }
    let n = problem.n();
    let dims = problem.dims.dims();
    let (k, aux) = (problem.k, &problem.aux);
    match tag {
        LemmaTag::Start => {
            if n != 3 || dims != [2, 2, 2] {
                return Err("start needs dims (2,2,2)".into());
            }
            match (k, aux.as_slice()) {
                (1, [0, 0, 0]) | (0, [1, 1, 1]) => Ok(Vec::new()),
                _ => Err("start covers only (1,0,0,0) and (0,1,1,1)".into()),
            }
        }
        LemmaTag::Zero | LemmaTag::Uno | LemmaTag::ZeroStep => {
            if tag != LemmaTag::ZeroStep && n != 3 {
                return Err(format!("{} needs three factors", tag.name()));
            }
            let k_ok = match tag {
                LemmaTag::Zero => k == 0,
                LemmaTag::Uno => k == 1,
                _ => k <= 1,
            };
            if !k_ok {
                return Err(format!("{} does not cover k = {k}", tag.name()));
            }
            let alpha = exponents(problem, 2)?;
            let u = aux_exponents(aux, k == 1)?;
            let total: u32 = alpha.iter().sum();
            for i in 0..n {
                let limit = (total - alpha[i]) as i64 - (n as i64 - 1);
                if u[i] as i64 > limit {
                    return Err(format!("u_{} = {} exceeds {limit}", i + 1, u[i]));
                }
            }
            Ok(u)
        }
        LemmaTag::Premain | LemmaTag::Pren => {
            if tag == LemmaTag::Premain && n != 3 {
                return Err("premain needs three factors".into());
            }
            if !problem.is_plain() {
                return Err(format!("{} needs p = 0", tag.name()));
            }
            let mut alpha = exponents(problem, base)?;
            alpha.sort_unstable();
            let e = alpha[..n - 1].iter().sum::<u32>() - (n as u32 - 1);
            let bound = pow(base, e).unwrap_or(usize::MAX);
            if k > bound {
                return Err(format!("k = {k} exceeds {base}^{e} = {bound}"));
            }
            Ok(Vec::new())
        }
    }
}

fn ceil_log2(x: usize) -> u32 {
    if x <= 1 {
        0
    } else {
        usize::BITS - (x - 1).leading_zeros()
    }
}

/// Smallest claim of the given tag dominating `problem` in `(k, p)`, if its side
/// conditions hold. Dims must already match.
pub fn dominating_claim(tag: LemmaTag, base: usize, problem: &Problem) -> Option<(Problem, LemmaCert)> {
    let n = problem.n();
    let claim = |k: usize, aux: Vec<usize>| Problem::new(problem.dims.dims().to_vec(), k, aux).ok();
    let candidate = match tag {
        LemmaTag::Start => {
            if problem.params_le(&claim(1, vec![0; 3])?) {
                claim(1, vec![0; 3])
            } else {
                claim(0, vec![1; 3])
            }
        }
        LemmaTag::Zero => (problem.k == 0)
            .then(|| claim(0, problem.aux.iter().map(|&p| 1 << ceil_log2(p.max(1))).collect()))
            .flatten(),
        LemmaTag::Uno => (problem.k <= 1)
            .then(|| claim(1, problem.aux.iter().map(|&p| (1 << ceil_log2(p + 1)) - 1).collect()))
            .flatten(),
        LemmaTag::ZeroStep => {
            if problem.k == 0 {
                claim(0, problem.aux.iter().map(|&p| 1 << ceil_log2(p.max(1))).collect())
            } else if problem.k == 1 {
                claim(1, problem.aux.iter().map(|&p| (1 << ceil_log2(p + 1)) - 1).collect())
            } else {
                None
            }
        }
        LemmaTag::Premain | LemmaTag::Pren => problem.is_plain().then(|| problem.clone()),
    }?;
    debug_assert_eq!(candidate.n(), n);
    if !problem.params_le(&candidate) {
        return None;
    }
    let u = check_lemma(tag, base, &candidate).ok()?;
    Some((candidate, LemmaCert { tag, base, u }))
}
