use proptest::prelude::*;

use tensorid::bounds;
use tensorid::certificate::{certify, Certificate, CertifyOptions, RunConfig, Verdict};
use tensorid::exactlin::{PrimeField, RngState};
use tensorid::planner::{parse_script, plan, Rule, Strategy as Plan, BUNDLED};
use tensorid::segre::{Format, Problem};
use tensorid::store::dominates;
use tensorid::wdcheck::check_not_wdef;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn format_strategy(max_n: usize, max_a: usize) -> impl Strategy<Value = Vec<usize>> {
    (3..=max_n).prop_flat_map(move |n| prop::collection::vec(2..=max_a, n))
}

fn problem_strategy() -> impl Strategy<Value = Problem> {
    format_strategy(4, 4).prop_flat_map(|dims| {
        let n = dims.len();
        (Just(dims), 0usize..=4, prop::collection::vec(0usize..=2, n))
            .prop_map(|(d, k, aux)| Problem::new(d, k, aux).unwrap())
    })
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn k_max_is_largest_fitting_k(dims in format_strategy(5, 12)) {
        let f = Format::new(dims).unwrap();
        let km = bounds::k_max(&f) as usize;
        prop_assert!(km * f.tangent_dim() <= f.ambient());
        prop_assert!((km + 1) * f.tangent_dim() > f.ambient());
    }

    #[test]
    fn kruskal_max_is_the_threshold(dims in format_strategy(5, 12)) {
        let f = Format::new(dims).unwrap();
        let m = bounds::kruskal_max(&f);
        prop_assert!(m == 0 || bounds::kruskal_holds(&f, m));
        prop_assert!(!bounds::kruskal_holds(&f, m + 1));
        prop_assert!(m <= bounds::k_max(&f));
    }

    #[test]
    fn co_bound_never_exceeds_k_max(dims in format_strategy(5, 40), base in 2u64..=3) {
        let f = Format::new(dims).unwrap();
        prop_assert!(bounds::co_bound(&f, base) <= bounds::k_max(&f));
    }

    #[test]
    fn binomial_is_symmetric(n in 0u64..60, k in 0u64..60) {
        prop_assume!(k <= n);
        prop_assert_eq!(bounds::binomial(n, k), bounds::binomial(n, n - k));
    }

    #[test]
    fn dominance_is_a_preorder(a in problem_strategy(), b in problem_strategy(), c in problem_strategy()) {
        prop_assert!(dominates(&a, &a));
        if dominates(&a, &b) && dominates(&b, &c) {
            prop_assert!(dominates(&a, &c));
        }
    }

    #[test]
    fn field_inverse(p in prop::sample::select(vec![32003u32, 65537, 104729]), x in 1u32..32003) {
        let f = PrimeField::new(p).unwrap();
        prop_assert_eq!(f.mul(x, f.inv(x)), 1);
    }

    #[test]
    fn power_plans_validate_and_round_trip(a in 2usize..=20, k in 1usize..=40, base in 2usize..=3) {
        let p = Problem::plain(vec![a; 3], k).unwrap();
        if let Ok(tree) = plan(&p, &Plan::PowerSplit { base }) {
            prop_assert!(tree.validate().is_valid());
            let again = parse_script(&tree.to_script()).unwrap();
            prop_assert_eq!(again.to_script(), tree.to_script());
            prop_assert!(again.validate().is_valid());
        }
    }

    #[test]
    fn plans_exist_up_to_the_base_two_bound(e in 1u32..=5) {
        let a = 1usize << e;
        let f = Format::new(vec![a; 3]).unwrap();
        let k = bounds::co_bound(&f, 2) as usize;
        prop_assume!(k >= 1);
        let tree = plan(&Problem::plain(vec![a; 3], k).unwrap(), &Plan::PowerSplit { base: 2 });
        prop_assert!(tree.is_ok(), "{:?}", tree.err());
    }

    #[test]
    fn corrupted_split_child_is_rejected(
        script in prop::sample::select(BUNDLED.iter().map(|(_, s)| *s).collect::<Vec<_>>()),
        pick in any::<prop::sample::Index>(),
        delta in prop::sample::select(vec![-1i64, 1]),
    ) {
        let tree = parse_script(script).unwrap();
        let children: Vec<usize> = tree.nodes.iter()
            .filter(|n| matches!(n.rule, Rule::Split { .. }))
            .flat_map(|n| n.children.iter().copied())
            .collect();
        prop_assume!(!children.is_empty());
        let child = *pick.get(&children);
        let p = tree.nodes[child].problem.clone();
        let entry = pick.index(p.n() + 1);
        let mut k = p.k as i64;
        let mut aux: Vec<i64> = p.aux.iter().map(|&x| x as i64).collect();
        if entry == 0 { k += delta } else { aux[entry - 1] += delta }
        prop_assume!(k >= 0 && aux.iter().all(|&x| x >= 0));
        let mut m = tree.clone();
        m.nodes[child].problem = Problem::new(p.dims.dims().to_vec(), k as usize, aux.iter().map(|&x| x as usize).collect()).unwrap();
        prop_assert!(!m.validate().is_valid());
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn contact_kernel_contains_the_scalings(p in problem_strategy(), seed in any::<u64>()) {
        prop_assume!(p.k >= 1);
        let r = check_not_wdef(&p, PrimeField::new(32003).unwrap(), 1, &mut RngState::new(seed)).unwrap();
        for t in &r.trials {
            prop_assert!(t.kernel_dims.iter().all(|&d| d >= p.n()), "{:?}", t.kernel_dims);
        }
    }

    #[test]
    fn certificates_round_trip_and_repeat(p in problem_strategy(), seed in 0u64..1000) {
        prop_assume!(p.k >= 1);
        let config = RunConfig { seed, ..RunConfig::default() };
        let c = certify(&p, &config, &CertifyOptions::default(), None).unwrap();
        let text = c.to_json();
        prop_assert_eq!(Certificate::from_json(&text).unwrap(), c.clone());
        let again = certify(&p, &config, &CertifyOptions::default(), None).unwrap();
        prop_assert_eq!(again.to_json(), text);
    }

    #[test]
    fn pass_is_prime_stable(a in 2usize..=4, b in 2usize..=4, c in 2usize..=5, k in 1usize..=4) {
        let p = Problem::plain(vec![a, b, c], k).unwrap();
        let run = |prime| {
            let config = RunConfig { prime, ..RunConfig::default() };
            certify(&p, &config, &CertifyOptions { script: None, compute_only: true }, None).unwrap().verdict
        };
        let v = run(32003);
        if v == Verdict::Pass {
            prop_assert_eq!(run(65537), Verdict::Pass);
            prop_assert_eq!(run(104729), Verdict::Pass);
        }
    }
}
