//! Automatic reduction by splitting factors into `base` equal parts.

use std::collections::HashMap;

use super::lemma::{dominating_claim, LemmaTag};
use super::tree::{CheckMode, NodeId, Rule, TreeBuilder};
use crate::bounds::log_floor;
use crate::segre::Problem;

/// Largest ambient dimension for a direct-check leaf.
pub const DEFAULT_DIRECT_THRESHOLD: usize = 4096;

pub(crate) struct PowerPlanner {
    base: usize,
    threshold: usize,
    builder: TreeBuilder,
    memo: HashMap<Problem, Option<NodeId>>,
}

/// `x` split into `parts` near-equal shares, larger shares first.
fn shares(x: usize, parts: usize) -> Vec<usize> {
    (0..parts).map(|t| x / parts + usize::from(t < x % parts)).collect()
}

fn is_power(x: usize, base: usize) -> bool {
    let mut p = 1;
    while p < x {
        p *= base;
    }
    p == x
}

impl PowerPlanner {
    pub fn new(base: usize, threshold: usize) -> Self {
        PowerPlanner {
            base,
            threshold,
            builder: TreeBuilder::new(),
            memo: HashMap::new(),
        }
    }

    pub fn finish(self, root: NodeId) -> super::ReductionTree {
        self.builder.finish(root)
    }

    pub fn node(&mut self, p: &Problem) -> Option<NodeId> {
        if let Some(&hit) = self.memo.get(p) {
            return hit;
        }
        let id = self.expand(p);
        self.memo.insert(p.clone(), id);
        id
    }

    fn expand(&mut self, p: &Problem) -> Option<NodeId> {
        let base = self.base;
        let dims = p.dims.dims();
        if dims.iter().any(|&d| d < base) {
            return None;
        }
        if !dims.iter().all(|&d| is_power(d, base)) {
            let down: Vec<usize> = dims.iter().map(|&d| base.pow(log_floor(d as u64, base as u64))).collect();
            let child = Problem::new(down, p.k, p.aux.clone()).ok()?;
            let c = self.node(&child)?;
            return Some(self.builder.push(p.clone(), Rule::MonotoneDims, vec![c]));
        }
        if let Some(id) = self.lemma_leaf(p) {
            return Some(id);
        }
        if let Some(id) = self.split(p) {
            return Some(id);
        }
        let ambient = p.dims.ambient();
        if ambient <= self.threshold && p.expected_span_dim() < ambient {
            let mode = if p.k == 0 {
                CheckMode::Groebner
            } else {
                CheckMode::FirstOrder
            };
            return Some(self.builder.push(p.clone(), Rule::DirectCheck { mode }, vec![]));
        }
        if p.n() >= 4 {
            return self.cite(p, LemmaTag::Pren);
        }
        None
    }

    /// Lemma leaf for `p`, through a monotone-params edge when the claim is larger.
    fn lemma_leaf(&mut self, p: &Problem) -> Option<NodeId> {
        let tags: &[LemmaTag] = match (self.base, p.n()) {
            (2, 3) => &[LemmaTag::Start, LemmaTag::Zero, LemmaTag::Uno, LemmaTag::Premain],
            (2, _) => &[LemmaTag::ZeroStep],
            (_, 3) => &[LemmaTag::Premain],
            _ => &[],
        };
        tags.iter().find_map(|&tag| self.cite(p, tag))
    }

    fn cite(&mut self, p: &Problem, tag: LemmaTag) -> Option<NodeId> {
        let (claim, cert) = dominating_claim(tag, self.base, p)?;
        let leaf = self.builder.push(claim.clone(), Rule::BaseLemma { cert }, vec![]);
        if claim == *p {
            Some(leaf)
        } else {
            Some(self.builder.push(p.clone(), Rule::MonotoneParams, vec![leaf]))
        }
    }

    /// Splits the largest factor (lowest index on ties) into `base` parts.
    fn split(&mut self, p: &Problem) -> Option<NodeId> {
        let base = self.base;
        let dims = p.dims.dims();
        let (i, &d) = dims
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > base)
            .max_by(|(i, a), (j, b)| a.cmp(b).then(j.cmp(i)))?;
        let ks = shares(p.k, base);
        let aux_shares: Vec<Vec<usize>> = p.aux.iter().map(|&x| shares(x, base)).collect();
        let mut children = Vec::with_capacity(base);
        for t in 0..base {
            let mut cd = dims.to_vec();
            cd[i] = d / base;
            let aux: Vec<usize> = (0..p.n())
                .map(|j| if j == i { p.aux[i] + p.k - ks[t] } else { aux_shares[j][t] })
                .collect();
            let child = Problem::new(cd, ks[t], aux).ok()?;
            children.push(self.node(&child)?);
        }
        Some(self.builder.push(p.clone(), Rule::Split { factor: i }, children))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shares_are_balanced() {
        assert_eq!(shares(11, 2), vec![6, 5]);
        assert_eq!(shares(27, 3), vec![9, 9, 9]);
        assert_eq!(shares(1, 3), vec![1, 0, 0]);
    }

    #[test]
    fn powers() {
        assert!(is_power(16, 2));
        assert!(is_power(27, 3));
        assert!(!is_power(10, 2));
        assert!(is_power(1, 5));
    }
}
