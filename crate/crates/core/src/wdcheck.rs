//! Randomized first-order check for `(k, p_1, ..., p_n)`-not-weak-defectivity,
//! and Terracini secant-dimension computation.
//!
//! The span `T` is built from random points over Z_p. At every contact point
//! `x = v_1 ⊗ ... ⊗ v_n` the tangency scheme `{x : T_x X ⊆ T}` is linearized in
//! the chart `(e_1, ..., e_n) ∈ ⊕ A_i`. Its kernel always contains the `n`
//! per-factor rescalings `e_i = λ_i v_i`; a kernel of exactly `n` means the
//! contact locus is zero-dimensional at that point.
//!
//! Passing from Z_p back to the integers can only raise ranks, so a PASS at a
//! prime is a PASS over the rationals for the same integer points. A FAIL is
//! only evidence: unlucky points or primes can hurt the check, never help it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{Matrix, PrimeField, RngState, RNG_ALGORITHM};
use crate::segre::{sample_span, DecomposablePoint, Format, Problem, SpanMatrix};

pub const DEFAULT_TRIALS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum FirstOrderVerdict {
    Pass,
    Fail,
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub span_rank: usize,
    pub kernel_dims: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstOrderReport {
    pub problem: Problem,
    pub prime: u32,
    pub seed: u64,
    pub rng: String,
    pub trials_requested: usize,
    pub ambient: usize,
    pub expected_rank: usize,
    /// Span rank of the deciding trial (the passing one, else the last).
    pub span_rank: usize,
    pub kernel_dims: Vec<usize>,
    pub passing_trial: Option<usize>,
    pub trials: Vec<TrialRecord>,
    pub verdict: FirstOrderVerdict,
}

impl FirstOrderReport {
    pub fn passed(&self) -> bool {
        self.verdict == FirstOrderVerdict::Pass
    }
}

/// Linear system in `(e_1, ..., e_n)` (`sum a_i` columns) whose kernel is the
/// tangent space at `x` of the scheme `{y : T_y X ⊆ span}`.
///
/// One equation per functional `ℓ` cutting the span, factor `j` and basis
/// vector `b` of `A_j`:
/// `sum_{i != j} ℓ(v_1 ⊗ .. e_i (slot i) .. b (slot j) .. ⊗ v_n) = 0`.
pub fn contact_linearization(span: &SpanMatrix, x: &DecomposablePoint) -> Result<Matrix> {
    let format = span.format();
    if span.rank() >= span.ambient() {
        return Err(Error::SpanFillsAmbient {
            ambient: span.ambient(),
        });
    }
    let field = span.field();
    let functionals = span.annihilator();
    let dims = format.dims();
    let n = format.n();
    let offsets = block_offsets(dims);
    let total = offsets[n];
    let indices: Vec<Vec<usize>> = (0..format.ambient()).map(|f| format.multi_index(f)).collect();

    let mut system = Matrix::zeros(field, 0, total);
    for l in 0..functionals.rows() {
        let ell = functionals.row(l);
        // contraction[i][j][c * a_j + b] = ℓ(.. e_c at i .. e_b at j ..), other slots v_m
        let mut contraction: Vec<Vec<Vec<u32>>> = (0..n)
            .map(|i| (0..n).map(|j| vec![0u32; dims[i] * dims[j]]).collect())
            .collect();
        for (flat, idx) in indices.iter().enumerate() {
            let coeff = ell[flat];
            if coeff == 0 {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let mut w = coeff;
                    for m in 0..n {
                        if m != i && m != j {
                            w = field.mul(w, x.vectors[m][idx[m]]);
                            if w == 0 {
                                break;
                            }
                        }
                    }
                    if w != 0 {
                        let slot = &mut contraction[i][j][idx[i] * dims[j] + idx[j]];
                        *slot = field.add(*slot, w);
                    }
                }
            }
        }
        for j in 0..n {
            for b in 0..dims[j] {
                let mut row = vec![0u32; total];
                for i in (0..n).filter(|&i| i != j) {
                    for c in 0..dims[i] {
                        row[offsets[i] + c] = contraction[i][j][c * dims[j] + b];
                    }
                }
                system.push_row(&row);
            }
        }
    }
    Ok(system)
}

pub(crate) fn block_offsets(dims: &[usize]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(dims.len() + 1);
    let mut acc = 0;
    offsets.push(0);
    for &d in dims {
        acc += d;
        offsets.push(acc);
    }
    offsets
}

/// Dimension of the kernel of [`contact_linearization`].
pub fn contact_kernel_dim(span: &SpanMatrix, x: &DecomposablePoint) -> Result<usize> {
    let system = contact_linearization(span, x)?;
    Ok(system.cols() - system.rank())
}

fn validate_problem(problem: &Problem) -> Result<()> {
    if problem.k == 0 {
        return Err(Error::InvalidProblem(
            "the first-order check needs k >= 1; use the contact computation or a base lemma for k = 0"
                .into(),
        ));
    }
    Ok(())
}

/// Runs up to `trials` independent random trials; PASS on the first trial with
/// full expected span rank and kernel dimension `n` at every contact point.
pub fn check_not_wdef(
    problem: &Problem,
    field: PrimeField,
    trials: usize,
    rng: &mut RngState,
) -> Result<FirstOrderReport> {
    validate_problem(problem)?;
    let trials = trials.max(1);
    let format = problem.format();
    let n = format.n();
    let ambient = format.ambient();
    let expected = problem.expected_span_dim();
    let mut report = FirstOrderReport {
        problem: problem.clone(),
        prime: field.modulus(),
        seed: rng.seed(),
        rng: RNG_ALGORITHM.to_string(),
        trials_requested: trials,
        ambient,
        expected_rank: expected,
        span_rank: 0,
        kernel_dims: Vec::new(),
        passing_trial: None,
        trials: Vec::new(),
        verdict: FirstOrderVerdict::Vacuous,
    };
    if expected >= ambient {
        return Ok(report);
    }
    for t in 0..trials {
        let (span, points) = sample_span(problem, field, rng);
        let kernel_dims = points
            .iter()
            .map(|x| contact_kernel_dim(&span, x))
            .collect::<Result<Vec<_>>>()?;
        let pass = span.rank() == expected && kernel_dims.iter().all(|&d| d == n);
        report.span_rank = span.rank();
        report.kernel_dims = kernel_dims.clone();
        report.trials.push(TrialRecord {
            span_rank: span.rank(),
            kernel_dims,
        });
        if pass {
            report.passing_trial = Some(t);
            report.verdict = FirstOrderVerdict::Pass;
            return Ok(report);
        }
    }
    report.verdict = FirstOrderVerdict::Fail;
    Ok(report)
}

/// Terracini dimension of the k-th secant variety at random points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecantDimension {
    /// Largest span rank observed over the trials.
    pub actual: usize,
    /// `min(D, k (sum a_i - n + 1))`.
    pub expected: usize,
}

impl SecantDimension {
    pub fn is_defective(&self) -> bool {
        self.actual < self.expected
    }
}

pub fn secant_dimension(
    format: &Format,
    k: usize,
    field: PrimeField,
    trials: usize,
    rng: &mut RngState,
) -> Result<SecantDimension> {
    if k == 0 {
        return Err(Error::InvalidProblem("secant dimension needs k >= 1".into()));
    }
    let problem = Problem::plain(format.dims().to_vec(), k)?;
    let expected = problem.expected_span_dim();
    let mut actual = 0;
    for _ in 0..trials.max(1) {
        let (span, _) = sample_span(&problem, field, rng);
        actual = actual.max(span.rank());
        if actual == expected {
            break;
        }
    }
    Ok(SecantDimension { actual, expected })
}
