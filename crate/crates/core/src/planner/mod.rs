//! Reduction trees: splitting a claim into smaller claims, discharged by cited
//! base lemmas or direct checks at the leaves.
//!
//! A node claims that its problem `(dims; k; p)` is not weakly defective. A
//! split of factor `i` into parts with `k = Σ k_t` holds when each part holds
//! with the other parts' points turned into aux blocks on factor `i`.

mod execute;
mod lemma;
mod power;
mod script;
mod tree;

pub use execute::{execute, ExecConfig, Execution, LeafEvidence, LeafOutcome, LeafVerdict, RootVerdict};
pub use lemma::{check_lemma, dominating_claim, LemmaCert, LemmaTag};
pub use power::DEFAULT_DIRECT_THRESHOLD;
pub use script::{bundled_script, parse_script, BUNDLED};
pub use tree::{format_path, CheckMode, Node, NodeId, ReductionTree, Rule, TreeBuilder, ValidationReport, Violation};

use crate::error::{Error, Result};
use crate::segre::Problem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    PowerSplit { base: usize },
    Script(String),
}

/// Builds a validated tree for `problem`. Scripts must be rooted at `problem`.
pub fn plan(problem: &Problem, strategy: &Strategy) -> Result<ReductionTree> {
    plan_with_threshold(problem, strategy, DEFAULT_DIRECT_THRESHOLD)
}

pub fn plan_with_threshold(problem: &Problem, strategy: &Strategy, threshold: usize) -> Result<ReductionTree> {
    let tree = match strategy {
        Strategy::PowerSplit { base } => {
            if *base < 2 {
                return Err(Error::InvalidProblem(format!("base {base} < 2")));
            }
            let mut planner = power::PowerPlanner::new(*base, threshold);
            let root = planner.node(problem).ok_or_else(|| {
                Error::NoPlan(format!(
                    "{problem} has no base-{base} reduction ending in lemmas or direct checks with D <= {threshold}"
                ))
            })?;
            planner.finish(root)
        }
        Strategy::Script(text) => {
            let tree = parse_script(text)?;
            if tree.root_problem() != problem {
                return Err(Error::NoPlan(format!(
                    "script is rooted at {}, not {problem}",
                    tree.root_problem()
                )));
            }
            tree
        }
    };
    let report = tree.validate();
    match report.first() {
        None => Ok(tree),
        Some(v) => Err(Error::NoPlan(format!("invalid plan {v}"))),
    }
}

/// The tree of a script, with its root taken from the script itself.
pub fn plan_script(text: &str) -> Result<ReductionTree> {
    let tree = parse_script(text)?;
    let root = tree.root_problem().clone();
    plan(&root, &Strategy::Script(text.to_string()))
}
