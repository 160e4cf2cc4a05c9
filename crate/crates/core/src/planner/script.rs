//! Line-oriented plan scripts, one table row per line:
//!
//! ```text
//! # comment
//! 9,9,9 | 27 | 0,0,0 | split 1 -> 2*3
//! 3,9,9 |  9 | 18,0,0 | split 2 -> 3*3
//! 3,3,9 |  3 | 6,6,0  | split 3 -> 4*3
//! 3,3,3 |  1 | 2,2,2  | check first-order
//! ```
//!
//! Rows are numbered from 1 in order of appearance; row 1 is the root. Rules:
//! `split <factor> -> <row>[*<mult>], ...`, `dims -> <row>`, `params -> <row>`,
//! `permute <s_1>,...,<s_n> -> <row>`, `lemma <tag> [base <b>]`,
//! `check first-order|groebner`. Factors are 1-based.

use super::lemma::{check_lemma, LemmaCert, LemmaTag};
use super::tree::{CheckMode, Node, ReductionTree, Rule};
use crate::error::{Error, Result};
use crate::segre::Problem;

pub const BUNDLED: &[(&str, &str)] = &[
    ("paper-a8", include_str!("../../scripts/paper-a8.plan")),
    ("paper-a9", include_str!("../../scripts/paper-a9.plan")),
    ("paper-a10", include_str!("../../scripts/paper-a10.plan")),
    ("paper-16x5", include_str!("../../scripts/paper-16x5.plan")),
];

pub fn bundled_script(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Script {
        line,
        message: message.into(),
    }
}

fn parse_list(line: usize, s: &str, what: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| err(line, format!("bad {what} entry '{}'", x.trim())))
        })
        .collect()
}

fn parse_row_ref(line: usize, s: &str) -> Result<usize> {
    s.trim()
        .parse::<usize>()
        .ok()
        .filter(|&r| r >= 1)
        .ok_or_else(|| err(line, format!("bad row reference '{}'", s.trim())))
}

struct RawRow {
    line: usize,
    problem: Problem,
    rule: Rule,
    /// 1-based row references.
    children: Vec<usize>,
}

fn parse_rule<'a>(line: usize, text: &'a str, problem: &Problem) -> Result<(Rule, Vec<usize>)> {
    let (head, target) = match text.split_once("->") {
        Some((h, t)) => (h.trim(), Some(t.trim())),
        None => (text.trim(), None),
    };
    let mut words = head.split_whitespace();
    let verb = words.next().ok_or_else(|| err(line, "missing rule"))?;
    let args: Vec<&str> = words.collect();
    let need_target = |t: Option<&'a str>| t.ok_or_else(|| err(line, format!("rule '{verb}' needs '-> row'")));
    let no_target = || match target {
        Some(_) => Err(err(line, format!("rule '{verb}' takes no children"))),
        None => Ok(()),
    };
    match verb {
        "split" => {
            let factor = match args.as_slice() {
                [f] => f.parse::<usize>().ok().filter(|&f| f >= 1),
                _ => None,
            }
            .ok_or_else(|| err(line, "split needs a 1-based factor index"))?;
            let mut children = Vec::new();
            for part in need_target(target)?.split(',') {
                let (r, mult) = match part.split_once('*') {
                    Some((r, m)) => (
                        parse_row_ref(line, r)?,
                        m.trim()
                            .parse::<usize>()
                            .ok()
                            .filter(|&m| m >= 1)
                            .ok_or_else(|| err(line, format!("bad multiplicity '{}'", m.trim())))?,
                    ),
                    None => (parse_row_ref(line, part)?, 1),
                };
                children.extend(std::iter::repeat_n(r, mult));
            }
            Ok((Rule::Split { factor: factor - 1 }, children))
        }
        "dims" | "params" => {
            if !args.is_empty() {
                return Err(err(line, format!("rule '{verb}' takes no arguments")));
            }
            let rule = if verb == "dims" {
                Rule::MonotoneDims
            } else {
                Rule::MonotoneParams
            };
            Ok((rule, vec![parse_row_ref(line, need_target(target)?)?]))
        }
        "permute" => {
            let perm = match args.as_slice() {
                [p] => parse_list(line, p, "permutation")?,
                _ => return Err(err(line, "permute needs a comma-separated permutation")),
            };
            if perm.contains(&0) {
                return Err(err(line, "permutation entries are 1-based"));
            }
            let perm = perm.into_iter().map(|s| s - 1).collect();
            Ok((Rule::Permute { perm }, vec![parse_row_ref(line, need_target(target)?)?]))
        }
        "lemma" => {
            no_target()?;
            let (tag, base) = match args.as_slice() {
                [t] => (*t, 2),
                [t, "base", b] => (*t, b.parse::<usize>().map_err(|_| err(line, format!("bad base '{b}'")))?),
                _ => return Err(err(line, "usage: lemma <tag> [base <b>]")),
            };
            let tag = LemmaTag::parse(tag).ok_or_else(|| err(line, format!("unknown lemma '{tag}'")))?;
            // u is recorded as derived; an inapplicable lemma surfaces in validation
            let u = check_lemma(tag, base, problem).unwrap_or_default();
            Ok((Rule::BaseLemma { cert: LemmaCert { tag, base, u } }, vec![]))
        }
        "check" => {
            no_target()?;
            let mode = match args.as_slice() {
                ["first-order"] => CheckMode::FirstOrder,
                ["groebner"] => CheckMode::Groebner,
                _ => return Err(err(line, "usage: check first-order|groebner")),
            };
            Ok((Rule::DirectCheck { mode }, vec![]))
        }
        other => Err(err(line, format!("unknown rule '{other}'"))),
    }
}

/// Parses a script into an unvalidated tree (node `r - 1` is row `r`).
pub fn parse_script(text: &str) -> Result<ReductionTree> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let cols: Vec<&str> = content.split('|').map(str::trim).collect();
        let [dims, k, aux, rule] = cols.as_slice() else {
            return Err(err(line, format!("expected 4 '|'-separated columns, found {}", cols.len())));
        };
        let dims = parse_list(line, dims, "dims")?;
        let k = k.parse::<usize>().map_err(|_| err(line, format!("bad k '{k}'")))?;
        let aux = parse_list(line, aux, "p-vector")?;
        let problem = Problem::new(dims, k, aux).map_err(|e| err(line, e.to_string()))?;
        let (rule, children) = parse_rule(line, rule, &problem)?;
        rows.push(RawRow {
            line,
            problem,
            rule,
            children,
        });
    }
    if rows.is_empty() {
        return Err(err(0, "script has no rows"));
    }
    let count = rows.len();
    let mut nodes = Vec::with_capacity(count);
    for row in rows {
        if let Some(&bad) = row.children.iter().find(|&&r| r > count) {
            return Err(err(row.line, format!("row {bad} does not exist ({count} rows)")));
        }
        nodes.push(Node {
            problem: row.problem,
            rule: row.rule,
            children: row.children.into_iter().map(|r| r - 1).collect(),
        });
    }
    Ok(ReductionTree { root: 0, nodes })
}
