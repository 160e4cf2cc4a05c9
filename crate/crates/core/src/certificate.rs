//! The certify pipeline and its JSON certificate.
//!
//! Order of evidence: the `k_max` guard and the known-exception table (no
//! computation), the unbalanced closed forms, the certificate cache, then a
//! direct check (small ambient) or a reduction plan, and finally Kruskal's
//! inequality when computation gave no answer.

use serde::{Deserialize, Serialize};

use crate::bounds::{self, ExceptionMatch, UnbalancedVerdict};
use crate::contact::{contact_check, Budget, ContactReport, ContactVerdict};
use crate::error::{Error, Result};
use crate::exactlin::{PrimeField, RngState, DEFAULT_PRIME, RNG_ALGORITHM};
use crate::planner::{self, ExecConfig, Execution, ReductionTree, RootVerdict, Strategy};
use crate::segre::{Format, Problem};
use crate::store::CertStore;
use crate::wdcheck::{check_not_wdef, FirstOrderReport, FirstOrderVerdict, DEFAULT_TRIALS};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 1;
pub const TOOL: &str = concat!("tensorid ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    FirstOrder,
    Groebner,
    Both,
}

/// Every knob of a run; all of it is echoed into the certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub prime: u32,
    pub seed: u64,
    pub trials: usize,
    pub mode: Mode,
    /// Gröbner work limit in term operations.
    pub budget: u64,
    pub rng: String,
    /// Largest ambient dimension checked directly rather than planned.
    pub direct_threshold: usize,
    pub cache: Option<String>,
    pub output: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            prime: DEFAULT_PRIME,
            seed: DEFAULT_SEED,
            trials: DEFAULT_TRIALS,
            mode: Mode::FirstOrder,
            budget: Budget::default().max_term_ops,
            rng: RNG_ALGORITHM.to_string(),
            direct_threshold: planner::DEFAULT_DIRECT_THRESHOLD,
            cache: None,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn budget(&self) -> Budget {
        Budget::with_term_ops(self.budget)
    }

    pub fn exec_config(&self) -> ExecConfig {
        ExecConfig {
            prime: self.prime,
            seed: self.seed,
            trials: self.trials,
            budget: self.budget(),
            both: self.mode == Mode::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Verdict {
    Pass,
    Fail,
    KnownException,
    Incomplete,
}

impl Verdict {
    /// Process exit status for this verdict.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail | Verdict::KnownException => 1,
            Verdict::Incomplete => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::KnownException => "KNOWN-EXCEPTION",
            Verdict::Incomplete => "INCOMPLETE",
        }
    }
}

/// What the verdict rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// `k > k_max`: proved impossible.
    KMax,
    /// Listed in the known-exception table.
    KnownException,
    /// Closed-form unbalanced result.
    Unbalanced,
    /// A stored certificate answers the query.
    Cache,
    DirectFirstOrder,
    DirectGroebner,
    DirectBoth,
    Plan,
    Kruskal,
    /// No method reached a conclusion.
    None,
}

impl Basis {
    /// Bases whose PASS is a not-weakly-defective claim, closed under the
    /// monotone rules and so usable for dominated cache queries.
    pub fn is_monotone(self) -> bool {
        matches!(
            self,
            Basis::DirectFirstOrder | Basis::DirectGroebner | Basis::DirectBoth | Basis::Plan
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsSummary {
    pub k_max: u64,
    pub kruskal_holds: bool,
    pub co_bound_base2: u64,
    pub co_bound_base3: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanRecord {
    pub strategy: String,
    pub tree: ReductionTree,
    pub execution: Execution,
}

/// The certificate a cache hit rests on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Citation {
    pub problem: Problem,
    pub basis: Basis,
    pub prime: u32,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub tool: String,
    pub problem: Problem,
    pub config: RunConfig,
    pub verdict: Verdict,
    pub basis: Basis,
    pub message: String,
    pub bounds: BoundsSummary,
    pub exceptions: Vec<ExceptionMatch>,
    pub first_order: Option<FirstOrderReport>,
    pub contact: Option<ContactReport>,
    pub plan: Option<PlanRecord>,
    pub cited: Option<Citation>,
}

impl Certificate {
    fn new(problem: &Problem, config: &RunConfig) -> Self {
        let f = problem.format();
        Certificate {
            schema_version: SCHEMA_VERSION,
            tool: TOOL.to_string(),
            problem: problem.clone(),
            config: config.clone(),
            verdict: Verdict::Incomplete,
            basis: Basis::None,
            message: String::new(),
            bounds: BoundsSummary {
                k_max: bounds::k_max(f),
                kruskal_holds: bounds::kruskal_holds(f, problem.k as u64),
                co_bound_base2: bounds::co_bound(f, 2),
                co_bound_base3: bounds::co_bound(f, 3),
            },
            exceptions: Vec::new(),
            first_order: None,
            contact: None,
            plan: None,
            cited: None,
        }
    }

    fn conclude(mut self, verdict: Verdict, basis: Basis, message: impl Into<String>) -> Self {
        self.verdict = verdict;
        self.basis = basis;
        self.message = message.into();
        self
    }

    /// Canonical serialization: fixed field order, pretty-printed, trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Certificate> {
        let cert: Certificate = serde_json::from_str(text)?;
        if cert.schema_version != SCHEMA_VERSION {
            return Err(Error::Certificate(format!(
                "schema version {} (expected {SCHEMA_VERSION})",
                cert.schema_version
            )));
        }
        Ok(cert)
    }
}

/// Options beyond [`RunConfig`] that pick the method.
#[derive(Debug, Clone, Default)]
pub struct CertifyOptions {
    /// Plan with this script instead of the automatic choice.
    pub script: Option<String>,
    /// Skip the closed-form shortcuts and the cache (used to replay and verify).
    pub compute_only: bool,
}

fn direct(problem: &Problem, config: &RunConfig, cert: &mut Certificate) -> Result<Option<(Verdict, Basis, String)>> {
    let field = PrimeField::new(config.prime)?;
    let mut rng = RngState::new(config.seed);
    if matches!(config.mode, Mode::FirstOrder | Mode::Both) {
        if problem.k == 0 {
            return Err(Error::InvalidProblem("the first-order check needs k >= 1; use --mode groebner".into()));
        }
        let report = check_not_wdef(problem, field, config.trials, &mut rng)?;
        let verdict = report.verdict;
        cert.first_order = Some(report);
        match verdict {
            FirstOrderVerdict::Pass => {}
            FirstOrderVerdict::Vacuous => return Ok(None),
            FirstOrderVerdict::Fail => {
                let r = cert.first_order.as_ref().unwrap();
                return Ok(Some((
                    Verdict::Fail,
                    Basis::DirectFirstOrder,
                    format!(
                        "probable failure (randomized evidence): span rank {} of expected {}, contact kernel dims {:?} (n = {}) in every one of {} trials",
                        r.span_rank,
                        r.expected_rank,
                        r.kernel_dims,
                        problem.n(),
                        r.trials.len()
                    ),
                )));
            }
        }
    }
    if matches!(config.mode, Mode::Groebner | Mode::Both) {
        if problem.expected_span_dim() >= problem.format().ambient() {
            return Ok(None);
        }
        let mut grng = rng.child(1);
        match contact_check(problem, field, &mut grng, config.budget()) {
            Ok(report) => {
                let pass = report.verdict == ContactVerdict::Pass;
                let locus = (report.locus.dim, report.locus.degree);
                cert.contact = Some(report);
                if !pass {
                    return Ok(Some((
                        Verdict::Fail,
                        Basis::DirectGroebner,
                        format!(
                            "probable failure (randomized evidence): contact locus has dim {} and degree {}",
                            locus.0, locus.1
                        ),
                    )));
                }
            }
            Err(Error::Aborted(why)) => {
                return Ok(Some((Verdict::Incomplete, Basis::None, format!("Gröbner check aborted: {why}"))));
            }
            Err(e) => return Err(e),
        }
    }
    let basis = match config.mode {
        Mode::FirstOrder => Basis::DirectFirstOrder,
        Mode::Groebner => Basis::DirectGroebner,
        Mode::Both => Basis::DirectBoth,
    };
    Ok(Some((Verdict::Pass, basis, "not weakly defective at random points over F_p".into())))
}

fn run_plan(tree: ReductionTree, strategy: String, config: &RunConfig, cert: &mut Certificate) -> Result<RootVerdict> {
    let execution = planner::execute(&tree, &config.exec_config())?;
    let verdict = execution.verdict;
    cert.plan = Some(PlanRecord {
        strategy,
        tree,
        execution,
    });
    Ok(verdict)
}

fn plan_message(cert: &Certificate) -> String {
    let Some(plan) = &cert.plan else {
        return String::new();
    };
    let leaves = plan.execution.leaves.len();
    match plan.execution.verdict {
        RootVerdict::Pass => format!("reduction ({}) discharged all {leaves} leaves", plan.strategy),
        _ => {
            let bad: Vec<String> = plan
                .execution
                .failing_leaves()
                .map(|l| format!("{} {} {:?}", l.path, l.problem, l.verdict))
                .collect();
            format!(
                "reduction ({}) inconclusive: a failing leaf refutes only the specialization, not the claim; leaves: {}",
                plan.strategy,
                bad.join("; ")
            )
        }
    }
}

/// Runs the full pipeline on `problem`, consulting and updating `store` when given.
pub fn certify(
    problem: &Problem,
    config: &RunConfig,
    options: &CertifyOptions,
    store: Option<&mut CertStore>,
) -> Result<Certificate> {
    PrimeField::new(config.prime)?;
    let mut cert = Certificate::new(problem, config);
    let f = problem.format();
    let plain3 = problem.is_plain() && problem.n() == 3;
    if !options.compute_only {
        if problem.is_plain() && problem.k as u64 > cert.bounds.k_max {
            let msg = format!(
                "proved impossible: k = {} exceeds k_max = {} for format {f}",
                problem.k, cert.bounds.k_max
            );
            return Ok(cert.conclude(Verdict::Fail, Basis::KMax, msg));
        }
        if plain3 && problem.k >= 1 {
            let d = f.dims();
            cert.exceptions = bounds::known_exceptions(d[0] as u64, d[1] as u64, d[2] as u64, problem.k as u64);
            if let Some(m) = cert.exceptions.first() {
                let msg = match &m.decompositions {
                    Some(count) if !m.note.contains("exactly") => {
                        format!("known exception (cited): {}; exactly {count} decompositions", m.note)
                    }
                    _ => format!("known exception (cited): {}", m.note),
                };
                return Ok(cert.conclude(Verdict::KnownException, Basis::KnownException, msg));
            }
            let mut d = d.to_vec();
            d.sort_unstable();
            if let Ok(r) = bounds::unbalanced_report(d[0] as u64, d[1] as u64, d[2] as u64, problem.k as u64) {
                let (verdict, msg) = match &r.verdict {
                    UnbalancedVerdict::Identifiable => (Verdict::Pass, format!("unbalanced format: identifiable for k <= {}", r.threshold)),
                    UnbalancedVerdict::FiniteDecompositions { count } if r.is_identifiable() => {
                        (Verdict::Pass, format!("unbalanced format: exactly {count} decomposition at k = {}", problem.k))
                    }
                    UnbalancedVerdict::FiniteDecompositions { count } => (
                        Verdict::KnownException,
                        format!("known exception (cited): unbalanced format has exactly {count} decompositions at k = {}", problem.k),
                    ),
                    UnbalancedVerdict::NotIdentifiable => (
                        Verdict::KnownException,
                        format!("known exception (cited): unbalanced format is not identifiable for k > {}", r.threshold + 1),
                    ),
                };
                return Ok(cert.conclude(verdict, Basis::Unbalanced, msg));
            }
        }
        if let Some(store) = store.as_deref() {
            if let Some(hit) = store.lookup(problem, config.mode) {
                cert.cited = Some(Citation {
                    problem: hit.problem.clone(),
                    basis: hit.basis,
                    prime: hit.config.prime,
                    seed: hit.config.seed,
                });
                let msg = format!("answered by stored certificate for {}", hit.problem);
                return Ok(cert.conclude(Verdict::Pass, Basis::Cache, msg));
            }
        }
    }

    let mut outcome: Option<(Verdict, Basis, String)> = None;
    if let Some(script) = &options.script {
        let tree = planner::plan(problem, &Strategy::Script(script.clone()))?;
        let v = run_plan(tree, "script".into(), config, &mut cert)?;
        outcome = Some(plan_outcome(v, &cert));
    } else if f.ambient() <= config.direct_threshold {
        outcome = direct(problem, config, &mut cert)?;
    } else {
        for base in [2usize, 3] {
            match planner::plan_with_threshold(problem, &Strategy::PowerSplit { base }, config.direct_threshold) {
                Ok(tree) => {
                    let v = run_plan(tree, format!("power-split base {base}"), config, &mut cert)?;
                    outcome = Some(plan_outcome(v, &cert));
                    if v == RootVerdict::Pass {
                        break;
                    }
                }
                Err(Error::NoPlan(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }

    let settled = matches!(outcome, Some((Verdict::Pass | Verdict::Fail, _, _)));
    if !settled && !options.compute_only && problem.is_plain() && cert.bounds.kruskal_holds {
        let msg = format!("Kruskal's inequality 2k + n - 1 <= Σ min(k, a_i) holds for k = {}", problem.k);
        cert = cert.conclude(Verdict::Pass, Basis::Kruskal, msg);
    } else {
        let (v, b, m) = outcome.unwrap_or((
            Verdict::Incomplete,
            Basis::None,
            if f.ambient() <= config.direct_threshold {
                "no evidence: the span fills the ambient space, so the check is vacuous".to_string()
            } else {
                format!("no reduction plan reaches lemmas or direct checks with D <= {}", config.direct_threshold)
            },
        ));
        cert = cert.conclude(v, b, m);
    }
    if let Some(store) = store {
        store.insert(cert.clone())?;
    }
    Ok(cert)
}

fn plan_outcome(v: RootVerdict, cert: &Certificate) -> (Verdict, Basis, String) {
    let msg = plan_message(cert);
    match v {
        RootVerdict::Pass => (Verdict::Pass, Basis::Plan, msg),
        _ => (Verdict::Incomplete, Basis::Plan, msg),
    }
}

/// Re-runs the computation a certificate records with its own config.
pub fn replay(cert: &Certificate) -> Result<Certificate> {
    let options = CertifyOptions {
        script: match (&cert.plan, cert.basis) {
            (Some(p), Basis::Plan) if p.strategy == "script" => Some(p.tree.to_script()),
            _ => None,
        },
        compute_only: false,
    };
    let mut config = cert.config.clone();
    config.cache = None;
    certify(&cert.problem, &config, &options, None)
}

/// `certify` for a plain format.
pub fn certify_format(format: &Format, k: usize, config: &RunConfig) -> Result<Certificate> {
    let problem = Problem::plain(format.dims().to_vec(), k)?;
    certify(&problem, config, &CertifyOptions::default(), None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(dims: &[usize], k: usize) -> Certificate {
        certify_format(&Format::new(dims.to_vec()).unwrap(), k, &RunConfig::default()).unwrap()
    }

    #[test]
    fn four_cube_boundary() {
        let c = run(&[4, 4, 4], 5);
        assert_eq!((c.verdict, c.basis), (Verdict::Pass, Basis::DirectFirstOrder));
        let c = run(&[4, 4, 4], 6);
        assert_eq!(c.verdict, Verdict::KnownException);
        assert!(c.message.contains("exactly two decompositions"));
        assert!(c.first_order.is_none(), "exceptions short-circuit computation");
        let c = run(&[4, 4, 4], 7);
        assert_eq!((c.verdict, c.basis), (Verdict::Fail, Basis::KMax));
        assert!(c.message.contains("k_max = 6"));
    }

    #[test]
    fn vacuous_span_falls_back_to_kruskal() {
        let c = run(&[2, 2, 2], 2);
        assert_eq!((c.verdict, c.basis), (Verdict::Pass, Basis::Kruskal));
        assert_eq!(c.first_order.unwrap().verdict, FirstOrderVerdict::Vacuous);
    }

    #[test]
    fn unbalanced_shortcut() {
        let c = run(&[3, 3, 6], 5);
        assert_eq!(c.verdict, Verdict::KnownException);
        assert!(c.message.contains("exactly 6 decompositions"));
        let c = run(&[2, 2, 3], 2);
        assert_eq!((c.verdict, c.basis), (Verdict::Pass, Basis::Unbalanced));
    }

    #[test]
    fn large_formats_are_planned() {
        let config = RunConfig {
            direct_threshold: 1000,
            ..RunConfig::default()
        };
        let c = certify_format(&Format::new(vec![16, 16, 16]).unwrap(), 64, &config).unwrap();
        assert_eq!((c.verdict, c.basis), (Verdict::Pass, Basis::Plan));
    }

    #[test]
    fn json_round_trip_is_canonical() {
        let c = run(&[3, 3, 3], 3);
        let text = c.to_json();
        let back = Certificate::from_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), text);
        assert_eq!(run(&[3, 3, 3], 3).to_json(), text);
    }

    #[test]
    fn replay_reproduces() {
        let c = run(&[5, 5, 5], 9);
        assert_eq!(replay(&c).unwrap().to_json(), c.to_json());
    }

    #[test]
    fn shipped_schema_matches_serialization() {
        let schema: serde_json::Value = serde_json::from_str(include_str!("../schema/certificate.schema.json")).unwrap();
        let c = run(&[4, 4, 4], 6);
        let v = serde_json::to_value(&c).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        let mut required: Vec<&str> = schema["required"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
        keys.sort_unstable();
        required.sort_unstable();
        assert_eq!(keys, required);
        let allowed = |field: &str, value: serde_json::Value| {
            schema["properties"][field]["enum"].as_array().unwrap().contains(&value)
        };
        for verdict in [Verdict::Pass, Verdict::Fail, Verdict::KnownException, Verdict::Incomplete] {
            assert!(allowed("verdict", serde_json::to_value(verdict).unwrap()));
        }
        for basis in [
            Basis::KMax,
            Basis::KnownException,
            Basis::Unbalanced,
            Basis::Cache,
            Basis::DirectFirstOrder,
            Basis::DirectGroebner,
            Basis::DirectBoth,
            Basis::Plan,
            Basis::Kruskal,
            Basis::None,
        ] {
            assert!(allowed("basis", serde_json::to_value(basis).unwrap()));
        }
        assert_eq!(schema["properties"]["schema_version"]["const"], SCHEMA_VERSION);
    }
}
