use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::lemma::{check_lemma, LemmaCert};
use crate::segre::Problem;

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckMode {
    FirstOrder,
    Groebner,
}

impl CheckMode {
    pub fn name(self) -> &'static str {
        match self {
            CheckMode::FirstOrder => "first-order",
            CheckMode::Groebner => "groebner",
        }
    }
}

/// How a node is discharged. Children are listed on the [`Node`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Rule {
    /// Factor `factor` (0-based) is a direct sum of the children's factors.
    /// Child `t` carries `k_t` points, `p_factor + (k - k_t)` aux blocks on the
    /// split factor, and a share of every other aux count.
    Split { factor: usize },
    /// One child with componentwise smaller dims and the same `(k, p)`.
    MonotoneDims,
    /// One child with the same dims and componentwise larger `(k, p)`.
    MonotoneParams,
    /// One child equal to this node with factors reordered:
    /// child factor `j` is this node's factor `perm[j]`.
    Permute { perm: Vec<usize> },
    BaseLemma { cert: LemmaCert },
    DirectCheck { mode: CheckMode },
}

impl Rule {
    pub fn is_leaf(&self) -> bool {
        matches!(self, Rule::BaseLemma { .. } | Rule::DirectCheck { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub problem: Problem,
    pub rule: Rule,
    /// Repeats allowed: a split into identical parts lists the same child twice.
    pub children: Vec<NodeId>,
}

/// Arena-backed reduction DAG; identical subproblems may share a node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTree {
    pub root: NodeId,
    pub nodes: Vec<Node>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Child positions from the root.
    pub path: Vec<usize>,
    pub node: NodeId,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {}: {}", format_path(&self.path), self.message)
    }
}

pub fn format_path(path: &[usize]) -> String {
    let mut s = String::from("root");
    for p in path {
        s.push('/');
        s.push_str(&p.to_string());
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

/// Hash-consing builder: structurally equal nodes are stored once.
#[derive(Debug, Default)]
pub struct TreeBuilder {
    nodes: Vec<Node>,
    index: HashMap<(Problem, Rule, Vec<NodeId>), NodeId>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        TreeBuilder::default()
    }

    pub fn push(&mut self, problem: Problem, rule: Rule, children: Vec<NodeId>) -> NodeId {
        let key = (problem, rule, children);
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            problem: key.0.clone(),
            rule: key.1.clone(),
            children: key.2.clone(),
        });
        self.index.insert(key, id);
        id
    }

    pub fn finish(self, root: NodeId) -> ReductionTree {
        ReductionTree {
            root,
            nodes: self.nodes,
        }
    }
}

fn same_except(a: &[usize], b: &[usize], skip: usize) -> bool {
    a.len() == b.len() && a.iter().zip(b).enumerate().all(|(j, (x, y))| j == skip || x == y)
}

/// Arithmetic of one edge; `children` are resolved node problems.
fn check_rule(node: &Node, children: &[&Problem]) -> Result<(), String> {
    let p = &node.problem;
    let n = p.n();
    let arity = |want: usize| -> Result<(), String> {
        if children.len() == want {
            Ok(())
        } else {
            Err(format!("rule takes {want} children, found {}", children.len()))
        }
    };
    if let Some(c) = children.iter().find(|c| c.n() != n) {
        return Err(format!("child {c} has {} factors, parent has {n}", c.n()));
    }
    match &node.rule {
        Rule::Split { factor } => {
            let i = *factor;
            if i >= n {
                return Err(format!("split factor {} out of range", i + 1));
            }
            if children.len() < 2 {
                return Err("split needs at least two children".into());
            }
            let d = p.dims.dims();
            for c in children {
                if !same_except(c.dims.dims(), d, i) {
                    return Err(format!("child {c} changes a factor other than {}", i + 1));
                }
            }
            let dim_sum: usize = children.iter().map(|c| c.dims.dims()[i]).sum();
            if dim_sum != d[i] {
                return Err(format!("factor {} splits as {dim_sum}, expected {}", i + 1, d[i]));
            }
            let k_sum: usize = children.iter().map(|c| c.k).sum();
            if k_sum != p.k {
                return Err(format!("k splits as {k_sum}, expected {}", p.k));
            }
            for c in children {
                let want = p.aux[i] + (p.k - c.k);
                if c.aux[i] != want {
                    return Err(format!(
                        "child {c} has p_{} = {}, expected p_{} + k - k_t = {want}",
                        i + 1,
                        c.aux[i],
                        i + 1
                    ));
                }
            }
            for j in (0..n).filter(|&j| j != i) {
                let s: usize = children.iter().map(|c| c.aux[j]).sum();
                if s != p.aux[j] {
                    return Err(format!("p_{} splits as {s}, expected {}", j + 1, p.aux[j]));
                }
            }
            Ok(())
        }
        Rule::MonotoneDims => {
            arity(1)?;
            let c = children[0];
            if c.k != p.k || c.aux != p.aux {
                return Err("monotone dims must keep (k, p)".into());
            }
            let (cd, pd) = (c.dims.dims(), p.dims.dims());
            if cd.iter().zip(pd).any(|(x, y)| x > y) || cd == pd {
                return Err(format!("child dims {} not strictly below {}", c.dims, p.dims));
            }
            Ok(())
        }
        Rule::MonotoneParams => {
            arity(1)?;
            let c = children[0];
            if c.dims != p.dims {
                return Err("monotone params must keep dims".into());
            }
            if !p.params_le(c) || c.k == p.k && c.aux == p.aux {
                return Err(format!("child {c} does not strictly dominate {p} in (k, p)"));
            }
            Ok(())
        }
        Rule::Permute { perm } => {
            arity(1)?;
            let mut seen = vec![false; n];
            if perm.len() != n || perm.iter().any(|&s| s >= n || std::mem::replace(&mut seen[s], true)) {
                return Err(format!("{perm:?} is not a permutation of {n} factors"));
            }
            let c = children[0];
            let (cd, pd) = (c.dims.dims(), p.dims.dims());
            let ok = c.k == p.k && (0..n).all(|j| cd[j] == pd[perm[j]] && c.aux[j] == p.aux[perm[j]]);
            if ok {
                Ok(())
            } else {
                Err(format!("child {c} is not {p} permuted by {perm:?}"))
            }
        }
        Rule::BaseLemma { cert } => {
            arity(0)?;
            let u = check_lemma(cert.tag, cert.base, p)
                .map_err(|e| format!("lemma {}: {e}", cert.tag.name()))?;
            if u != cert.u {
                return Err(format!("lemma {}: recorded u {:?}, derived {:?}", cert.tag.name(), cert.u, u));
            }
            Ok(())
        }
        Rule::DirectCheck { mode } => {
            arity(0)?;
            if *mode == CheckMode::FirstOrder && p.k == 0 {
                return Err("first-order check needs k >= 1".into());
            }
            Ok(())
        }
    }
}

impl ReductionTree {
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn root_problem(&self) -> &Problem {
        &self.nodes[self.root].problem
    }

    /// Checks every reachable edge and lemma leaf; never panics on malformed input.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.root >= self.nodes.len() {
            report.violations.push(Violation {
                path: vec![],
                node: self.root,
                message: format!("root {} out of range", self.root),
            });
            return report;
        }
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; self.nodes.len()];
        let mut path = Vec::new();
        self.visit(self.root, &mut path, &mut state, &mut report);
        report
    }

    fn visit(&self, id: NodeId, path: &mut Vec<usize>, state: &mut [u8], report: &mut ValidationReport) {
        state[id] = 1;
        let node = &self.nodes[id];
        let mut children = Vec::with_capacity(node.children.len());
        let mut broken = false;
        for &c in &node.children {
            match self.nodes.get(c) {
                Some(child) => children.push(&child.problem),
                None => {
                    broken = true;
                    report.violations.push(Violation {
                        path: path.clone(),
                        node: id,
                        message: format!("child index {c} out of range"),
                    });
                }
            }
        }
        if !broken {
            if let Err(message) = check_rule(node, &children) {
                report.violations.push(Violation {
                    path: path.clone(),
                    node: id,
                    message: format!("{}: {message}", node.problem),
                });
            }
        }
        for (pos, &c) in node.children.iter().enumerate() {
            if c >= self.nodes.len() {
                continue;
            }
            match state[c] {
                0 => {
                    path.push(pos);
                    self.visit(c, path, state, report);
                    path.pop();
                }
                1 => {
                    path.push(pos);
                    report.violations.push(Violation {
                        path: path.clone(),
                        node: c,
                        message: "cycle in reduction graph".into(),
                    });
                    path.pop();
                }
                _ => {}
            }
        }
        state[id] = 2;
    }

    /// Reachable nodes in first-visit preorder from the root.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut order = Vec::new();
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            if id >= self.nodes.len() || seen[id] {
                continue;
            }
            seen[id] = true;
            order.push(id);
            for &c in self.nodes[id].children.iter().rev() {
                stack.push(c);
            }
        }
        order
    }

    /// Reachable leaves in preorder.
    pub fn leaves(&self) -> Vec<NodeId> {
        self.preorder().into_iter().filter(|&id| self.nodes[id].rule.is_leaf()).collect()
    }

    /// One path from the root to each reachable node (the first found in preorder).
    pub fn paths(&self) -> HashMap<NodeId, Vec<usize>> {
        let mut out = HashMap::new();
        let mut stack = vec![(self.root, Vec::new())];
        while let Some((id, path)) = stack.pop() {
            if id >= self.nodes.len() || out.contains_key(&id) {
                continue;
            }
            for (pos, &c) in self.nodes[id].children.iter().enumerate().rev() {
                let mut p = path.clone();
                p.push(pos);
                stack.push((c, p));
            }
            out.insert(id, path);
        }
        out
    }

    /// Plan-script rendering of the reachable nodes in preorder; parses back to
    /// an equivalent tree.
    pub fn to_script(&self) -> String {
        let order = self.preorder();
        let row: HashMap<NodeId, usize> = order.iter().enumerate().map(|(r, &id)| (id, r + 1)).collect();
        let mut out = String::new();
        for &id in &order {
            let node = &self.nodes[id];
            let p = &node.problem;
            let rule = match &node.rule {
                Rule::Split { factor } => format!("split {} -> {}", factor + 1, child_list(&node.children, &row)),
                Rule::MonotoneDims => format!("dims -> {}", row[&node.children[0]]),
                Rule::MonotoneParams => format!("params -> {}", row[&node.children[0]]),
                Rule::Permute { perm } => format!(
                    "permute {} -> {}",
                    perm.iter().map(|s| (s + 1).to_string()).collect::<Vec<_>>().join(","),
                    row[&node.children[0]]
                ),
                Rule::BaseLemma { cert } if cert.base != 2 => {
                    format!("lemma {} base {}", cert.tag.name(), cert.base)
                }
                Rule::BaseLemma { cert } => format!("lemma {}", cert.tag.name()),
                Rule::DirectCheck { mode } => format!("check {}", mode.name()),
            };
            out.push_str(&format!(
                "{} | {} | {} | {}\n",
                join(p.dims.dims()),
                p.k,
                join(&p.aux),
                rule
            ));
        }
        out
    }
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// `2*2, 3` style list, run-length encoding consecutive repeats.
fn child_list(children: &[NodeId], row: &HashMap<NodeId, usize>) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < children.len() {
        let mut j = i;
        while j + 1 < children.len() && children[j + 1] == children[i] {
            j += 1;
        }
        let r = row[&children[i]];
        parts.push(if j > i { format!("{r}*{}", j - i + 1) } else { r.to_string() });
        i = j + 1;
    }
    parts.join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::lemma::LemmaTag;

    fn pb(d: &[usize], k: usize, aux: &[usize]) -> Problem {
        Problem::new(d.to_vec(), k, aux.to_vec()).unwrap()
    }

    fn check(mode: CheckMode) -> Rule {
        Rule::DirectCheck { mode }
    }

    /// (4,4,8; 5; 7,6,0) split on factor 3 into the two (4,4,4) leaves.
    fn small_split() -> ReductionTree {
        let mut b = TreeBuilder::new();
        let l1 = b.push(pb(&[4, 4, 4], 3, &[3, 3, 2]), check(CheckMode::FirstOrder), vec![]);
        let l2 = b.push(pb(&[4, 4, 4], 2, &[4, 3, 3]), check(CheckMode::FirstOrder), vec![]);
        let root = b.push(pb(&[4, 4, 8], 5, &[7, 6, 0]), Rule::Split { factor: 2 }, vec![l1, l2]);
        b.finish(root)
    }

    #[test]
    fn valid_split() {
        let t = small_split();
        assert!(t.validate().is_valid(), "{:?}", t.validate());
        assert_eq!(t.leaves().len(), 2);
    }

    #[test]
    fn split_arithmetic_violation_is_located() {
        let mut t = small_split();
        t.nodes[1].problem.aux[1] = 2;
        let r = t.validate();
        assert!(!r.is_valid());
        assert_eq!(r.first().unwrap().path, Vec::<usize>::new());
        assert!(r.first().unwrap().message.contains("p_2"));
    }

    #[test]
    fn malformed_indices_do_not_panic() {
        let mut t = small_split();
        t.nodes[2].children.push(17);
        assert!(!t.validate().is_valid());
        t.root = 99;
        assert!(!t.validate().is_valid());
    }

    #[test]
    fn cycles_reported() {
        let mut t = small_split();
        t.nodes[0].rule = Rule::MonotoneParams;
        t.nodes[0].children = vec![2];
        let r = t.validate();
        assert!(r.violations.iter().any(|v| v.message.contains("cycle")));
    }

    #[test]
    fn monotone_and_permute_edges() {
        let mut b = TreeBuilder::new();
        let leaf = b.push(pb(&[4, 4, 4], 3, &[3, 3, 2]), check(CheckMode::FirstOrder), vec![]);
        let perm = b.push(pb(&[4, 4, 4], 3, &[2, 3, 3]), Rule::Permute { perm: vec![1, 2, 0] }, vec![leaf]);
        let params = b.push(pb(&[4, 4, 4], 3, &[2, 2, 3]), Rule::MonotoneParams, vec![perm]);
        let dims = b.push(pb(&[4, 5, 4], 3, &[2, 2, 3]), Rule::MonotoneDims, vec![params]);
        let t = b.finish(dims);
        assert!(t.validate().is_valid(), "{:?}", t.validate());

        let mut bad = t.clone();
        bad.nodes[perm].rule = Rule::Permute { perm: vec![2, 0, 1] };
        assert!(!bad.validate().is_valid());
        let mut bad = t.clone();
        bad.nodes[dims].problem = pb(&[4, 4, 4], 3, &[2, 2, 3]);
        assert!(!bad.validate().is_valid());
    }

    #[test]
    fn lemma_leaf_validation() {
        let mut b = TreeBuilder::new();
        let cert = LemmaCert {
            tag: LemmaTag::Start,
            base: 2,
            u: vec![],
        };
        let leaf = b.push(pb(&[2, 2, 2], 0, &[1, 1, 1]), Rule::BaseLemma { cert }, vec![]);
        let t = b.finish(leaf);
        assert!(t.validate().is_valid());
        let mut bad = t.clone();
        bad.nodes[0].problem.k = 1;
        assert!(!bad.validate().is_valid());
    }

    #[test]
    fn hash_consing_shares_nodes() {
        let mut b = TreeBuilder::new();
        let a = b.push(pb(&[3, 3, 3], 1, &[2, 2, 2]), check(CheckMode::FirstOrder), vec![]);
        let a2 = b.push(pb(&[3, 3, 3], 1, &[2, 2, 2]), check(CheckMode::FirstOrder), vec![]);
        assert_eq!(a, a2);
    }
}
