use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lemma::LemmaCert;
use super::tree::{format_path, CheckMode, ReductionTree, Rule, ValidationReport};
use crate::contact::{contact_check, Budget, ContactReport, ContactVerdict};
use crate::error::Error;
use crate::exactlin::{derive_seed, PrimeField, RngState};
use crate::segre::Problem;
use crate::wdcheck::{check_not_wdef, FirstOrderReport, FirstOrderVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecConfig {
    pub prime: u32,
    pub seed: u64,
    pub trials: usize,
    pub budget: Budget,
    /// Also run the Gröbner check on first-order leaves; both must pass.
    pub both: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum LeafVerdict {
    Pass,
    Fail,
    Aborted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LeafEvidence {
    Lemma { cert: LemmaCert },
    FirstOrder { report: FirstOrderReport },
    Contact { report: ContactReport },
    Error { message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafOutcome {
    pub node: usize,
    pub path: String,
    pub problem: Problem,
    pub seed: u64,
    pub verdict: LeafVerdict,
    pub evidence: Vec<LeafEvidence>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum RootVerdict {
    Pass,
    Fail,
    Incomplete,
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Execution {
    pub validation: ValidationReport,
    pub leaves: Vec<LeafOutcome>,
    pub verdict: RootVerdict,
}

impl Execution {
    pub fn failing_leaves(&self) -> impl Iterator<Item = &LeafOutcome> {
        self.leaves.iter().filter(|l| l.verdict != LeafVerdict::Pass)
    }
}

fn first_order(problem: &Problem, field: PrimeField, cfg: &ExecConfig, rng: &mut RngState) -> (LeafVerdict, LeafEvidence) {
    match check_not_wdef(problem, field, cfg.trials, rng) {
        // a span filling the ambient space is tangent everywhere: the claim is false
        Ok(report) => {
            let v = match report.verdict {
                FirstOrderVerdict::Pass => LeafVerdict::Pass,
                FirstOrderVerdict::Fail | FirstOrderVerdict::Vacuous => LeafVerdict::Fail,
            };
            (v, LeafEvidence::FirstOrder { report })
        }
        Err(e) => error_outcome(e),
    }
}

fn groebner(problem: &Problem, field: PrimeField, cfg: &ExecConfig, rng: &mut RngState) -> (LeafVerdict, LeafEvidence) {
    match contact_check(problem, field, rng, cfg.budget) {
        Ok(report) => {
            let v = if report.verdict == ContactVerdict::Pass {
                LeafVerdict::Pass
            } else {
                LeafVerdict::Fail
            };
            (v, LeafEvidence::Contact { report })
        }
        Err(e) => error_outcome(e),
    }
}

fn error_outcome(e: Error) -> (LeafVerdict, LeafEvidence) {
    let v = if matches!(e, Error::Aborted(_)) {
        LeafVerdict::Aborted
    } else {
        LeafVerdict::Fail
    };
    (v, LeafEvidence::Error { message: e.to_string() })
}

/// Validates, then runs every leaf (in parallel, seeded by node id) and folds
/// the verdicts. Lemma leaves pass by citation.
pub fn execute(tree: &ReductionTree, cfg: &ExecConfig) -> crate::Result<Execution> {
    let field = PrimeField::new(cfg.prime)?;
    let validation = tree.validate();
    if !validation.is_valid() {
        return Ok(Execution {
            validation,
            leaves: Vec::new(),
            verdict: RootVerdict::Invalid,
        });
    }
    let paths = tree.paths();
    let leaves: Vec<LeafOutcome> = tree
        .leaves()
        .into_par_iter()
        .map(|id| {
            let node = tree.node(id);
            let seed = derive_seed(cfg.seed, id as u64);
            let mut evidence = Vec::new();
            let mut verdicts = Vec::new();
            match &node.rule {
                Rule::BaseLemma { cert } => {
                    verdicts.push(LeafVerdict::Pass);
                    evidence.push(LeafEvidence::Lemma { cert: cert.clone() });
                }
                Rule::DirectCheck { mode } => {
                    let mut rng = RngState::new(seed);
                    let run_fo = *mode == CheckMode::FirstOrder;
                    let run_gb = *mode == CheckMode::Groebner || cfg.both;
                    if run_fo {
                        let (v, e) = first_order(&node.problem, field, cfg, &mut rng);
                        verdicts.push(v);
                        evidence.push(e);
                    }
                    if run_gb {
                        let mut rng = RngState::new(derive_seed(seed, 1));
                        let (v, e) = groebner(&node.problem, field, cfg, &mut rng);
                        verdicts.push(v);
                        evidence.push(e);
                    }
                }
                _ => unreachable!("leaves() yields only leaf rules"),
            }
            let verdict = if verdicts.contains(&LeafVerdict::Fail) {
                LeafVerdict::Fail
            } else if verdicts.contains(&LeafVerdict::Aborted) {
                LeafVerdict::Aborted
            } else {
                LeafVerdict::Pass
            };
            LeafOutcome {
                node: id,
                path: format_path(&paths[&id]),
                problem: node.problem.clone(),
                seed,
                verdict,
                evidence,
            }
        })
        .collect();
    let verdict = if leaves.iter().any(|l| l.verdict == LeafVerdict::Fail) {
        RootVerdict::Fail
    } else if leaves.iter().any(|l| l.verdict == LeafVerdict::Aborted) {
        RootVerdict::Incomplete
    } else {
        RootVerdict::Pass
    };
    Ok(Execution {
        validation,
        leaves,
        verdict,
    })
}
