use std::cmp::Ordering;

use approxsets::expr::{self, Expr};
use approxsets::set_rep::SetError;
use approxsets::topology::{
    cb_rank_degree, classify_point, contains_perfect_subtree, derived_set, lex_element_compare, neighborhood_filter,
    path_count, path_total, Classification, LexOrder, PathCount, TopologyError,
};
use approxsets::{Hf, Mode, Truth, Universe};
use proptest::prelude::*;

fn set(u: &Universe, src: &str) -> approxsets::SetRef {
    expr::parse(src).unwrap().build(u).unwrap()
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::Empty),
        Just(Expr::Inf),
        Just(Expr::Nat),
        Just(Expr::Omega),
        Just(Expr::PPN),
        (1u32..5).prop_map(Expr::A),
        (0u64..4).prop_map(Expr::Neumann),
    ]
}

fn expr_strategy() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(2, 6, 2, |inner| {
        let b = |e: Expr| Box::new(e);
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Union(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Diff(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Prod(b(x), b(y))),
            (1u64..4, inner).prop_map(move |(n, x)| Expr::Times(n, b(x))),
        ]
    })
}

fn skip_budget(e: TopologyError) -> Result<(), TestCaseError> {
    match e {
        TopologyError::Set(SetError::DepthBudgetExceeded { .. } | SetError::StateBudgetExceeded { .. }) => {
            Err(TestCaseError::reject(e.to_string()))
        }
        e => Err(TestCaseError::fail(e.to_string())),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derived_sets_are_closed_and_shrink(e in expr_strategy()) {
        let u = Universe::default();
        let a = e.build(&u).unwrap();
        let run = || -> Result<(), TopologyError> {
            let d = derived_set(&u, a)?;
            assert!(u.subset_of(d, a)?, "{e}: derived set escapes");
            let dd = derived_set(&u, d)?;
            assert!(u.subset_of(dd, d)?, "{e}: second derivative escapes");
            if contains_perfect_subtree(&u, a)? {
                assert!(!u.quotient(d)?.is_empty());
                assert!(matches!(cb_rank_degree(&u, a, 64), Err(TopologyError::NotWellOrderable(_))));
            } else {
                let (rank, degree) = cb_rank_degree(&u, a, 64)?;
                assert!(rank > 0 || u.quotient(d)?.is_empty());
                assert!(degree > 0 || u.quotient(a)?.is_empty());
            }
            Ok(())
        };
        if let Err(err) = run() {
            return skip_budget(err);
        }
    }

    #[test]
    fn finite_sets_have_rank_zero(words in prop::collection::vec(0u64..6, 0..5)) {
        let u = Universe::default();
        let h = Hf::from_elems(words.iter().map(|&k| approxsets::ZNat::new(k).value().clone()));
        let a = u.literal(h.clone());
        prop_assert_eq!(path_total(&u, a, 100).unwrap(), Some(h.len() as u64));
        prop_assert_eq!(cb_rank_degree(&u, a, 64).unwrap(), (0, h.len() as u64));
        let want = match h.len() { 0 => PathCount::Empty, 1 => PathCount::Thin, _ => PathCount::Wide };
        prop_assert_eq!(path_count(&u, a).unwrap(), want);
    }

    #[test]
    fn isolated_points_have_separating_neighbourhoods(k in 0u64..8, extra in 0u64..8) {
        let u = Universe::default();
        let a = set(&u, &format!("union(N,z({extra}))"));
        let x = set(&u, &format!("z({k})"));
        let p = classify_point(&u, a, x).unwrap();
        prop_assert_eq!(p.classification, Classification::Isolated);
        let w = p.witness_depth.unwrap();
        let v = neighborhood_filter(&u, a, x, w).unwrap();
        prop_assert_eq!(path_count(&u, v).unwrap(), PathCount::Thin);
        if w > 0 {
            let wider = neighborhood_filter(&u, a, x, w - 1).unwrap();
            prop_assert_eq!(path_count(&u, wider).unwrap(), PathCount::Wide);
        }
    }

    #[test]
    fn lex_order_of_numerals(j in 0u64..10, k in 0u64..10) {
        let u = Universe::default();
        let (x, y) = (set(&u, &format!("z({j})")), set(&u, &format!("z({k})")));
        let o = lex_element_compare(&u, x, y, 16).unwrap();
        let want = if j == k { LexOrder::UnresolvedUpTo(16) } else { LexOrder::Ordered(j.cmp(&k)) };
        prop_assert_eq!(o, want);
    }
}

#[test]
fn limit_points() {
    let u = Universe::default();
    let (n, inf, omega) = (set(&u, "N"), set(&u, "inf"), set(&u, "omega"));
    assert_eq!(classify_point(&u, n, inf).unwrap().classification, Classification::Accumulation);
    assert_eq!(classify_point(&u, omega, omega).unwrap().classification, Classification::Accumulation);
    assert!(matches!(classify_point(&u, n, omega), Err(TopologyError::NotAMember { .. })));
    assert_eq!(lex_element_compare(&u, inf, set(&u, "z(3)"), 10).unwrap(), LexOrder::Ordered(Ordering::Greater));
}

#[test]
fn perfect_sets() {
    let u = Universe::default();
    let ppn = set(&u, "PPN");
    let d = derived_set(&u, ppn).unwrap();
    assert_eq!(u.equal_sets(ppn, d, Mode::Exact).unwrap(), Truth::True);
    assert_eq!(path_total(&u, d, 100).unwrap(), None);
    assert!(contains_perfect_subtree(&u, set(&u, "PN")).unwrap());
    assert!(contains_perfect_subtree(&u, set(&u, "union(N,PPN)")).unwrap());
    assert!(!contains_perfect_subtree(&u, set(&u, "prod(omega,omega)")).unwrap());
}

#[test]
fn derived_sets_of_pairs_sets() {
    let u = Universe::default();
    for i in 1..=4u64 {
        let d = derived_set(&u, set(&u, &format!("A({i})"))).unwrap();
        assert_eq!(path_total(&u, d, 100).unwrap(), Some(i));
        assert!(u.quotient(derived_set(&u, d).unwrap()).unwrap().is_empty());
    }
}

#[test]
fn neighbourhood_outside_the_set() {
    let u = Universe::default();
    let a = set(&u, "A(1)");
    let x = set(&u, "z(1)");
    assert!(matches!(neighborhood_filter(&u, a, x, 5), Err(TopologyError::NodeAbsent { .. })));
}
