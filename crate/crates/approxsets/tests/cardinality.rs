use approxsets::cardinality::{
    classify_cardinal, compare_cardinality, counting_compare, nordinal_arith_with_omega, product_laws_check, size_of,
    sum_cardinality_law, CardError, Class, Evidence, OrdOp, OrdVal, Relation, Size,
};
use approxsets::topology::cb_rank_degree;
use approxsets::{expr, Hf, SetRef, Universe};
use proptest::prelude::*;

fn set(u: &Universe, src: &str) -> SetRef {
    expr::parse(src).unwrap().build(u).unwrap()
}

const SAMPLE: &[&str] = &[
    "empty", "v(1)", "v(2)", "hf\"{{}{{}}{{{}}}}\"", "N", "omega", "A(1)", "A(2)", "A(3)", "A(4)",
    "times(1,omega)", "times(2,omega)", "times(3,omega)", "times(4,omega)", "prod(omega,omega)", "PN", "PPN",
];

fn relations(u: &Universe) -> Vec<Vec<Relation>> {
    let refs: Vec<SetRef> = SAMPLE.iter().map(|s| set(u, s)).collect();
    refs.iter().map(|&a| refs.iter().map(|&b| compare_cardinality(u, a, b).unwrap().relation).collect()).collect()
}

#[test]
fn trichotomy_is_a_total_preorder() {
    let u = Universe::default();
    let r = relations(&u);
    let n = SAMPLE.len();
    for i in 0..n {
        assert_eq!(r[i][i], Relation::Equal);
        for j in 0..n {
            assert_eq!(r[i][j], r[j][i].reverse(), "{} vs {}", SAMPLE[i], SAMPLE[j]);
            for k in 0..n {
                let le = |x: Relation| x != Relation::Greater;
                if le(r[i][j]) && le(r[j][k]) {
                    assert!(le(r[i][k]), "{} <= {} <= {}", SAMPLE[i], SAMPLE[j], SAMPLE[k]);
                }
            }
        }
    }
}

#[test]
fn equal_verdicts_match_rank_and_degree() {
    let u = Universe::default();
    for a in SAMPLE {
        for b in SAMPLE {
            let v = compare_cardinality(&u, set(&u, a), set(&u, b)).unwrap();
            if let Evidence::RankDegree { rank_a, deg_a, rank_b, deg_b } = v.evidence {
                assert_eq!(v.relation == Relation::Equal, (rank_a, deg_a) == (rank_b, deg_b));
                assert_eq!(cb_rank_degree(&u, set(&u, a), 64).unwrap(), (rank_a, deg_a));
            }
        }
    }
}

#[test]
fn chain_and_multiples() {
    let u = Universe::default();
    let rel = |a: &str, b: &str| compare_cardinality(&u, set(&u, a), set(&u, b)).unwrap().relation;
    for (a, b) in [("A(1)", "A(2)"), ("A(2)", "A(3)"), ("A(3)", "A(4)"), ("A(4)", "PN")] {
        assert_eq!(rel(a, b), Relation::Less);
    }
    assert_eq!(rel("N", "A(1)"), Relation::Equal);
    assert_eq!(rel("PN", "PPN"), Relation::Equal);
    for n in 1..=4 {
        assert_eq!(rel(&format!("times({n},omega)"), &format!("times({},omega)", n + 1)), Relation::Less);
    }
    // adding a point to a set changes nothing once it is infinite
    assert_eq!(rel("union(PPN,pair(N,N))", "PPN"), Relation::Equal);
    assert_eq!(rel("union(omega,hf\"{{{{{}}}}}\")", "omega"), Relation::Equal);
}

#[test]
fn sum_law_dichotomy() {
    let u = Universe::default();
    let pool = ["v(3)", "omega", "times(2,omega)", "prod(omega,omega)"];
    let mut checked = 0;
    for a in pool {
        for b in pool {
            let (sa, sb) = (set(&u, a), set(&u, b));
            match sum_cardinality_law(&u, sa, sb) {
                Ok(law) => {
                    assert!(law.holds(), "{a} + {b}: {law:?}");
                    checked += 1;
                }
                Err(CardError::PreconditionViolated(_)) => {
                    assert_eq!(compare_cardinality(&u, sa, sb).unwrap().relation, Relation::Greater);
                }
                Err(e) => panic!("{a} + {b}: {e}"),
            }
        }
    }
    assert_eq!(checked, 10);
    assert!(matches!(
        sum_cardinality_law(&u, set(&u, "PN"), set(&u, "omega")),
        Err(CardError::PreconditionViolated(_))
    ));
}

#[test]
fn product_laws() {
    let u = Universe::default();
    for (a, b) in [("omega", "omega"), ("omega", "times(2,omega)"), ("A(2)", "A(3)")] {
        let r = product_laws_check(&u, set(&u, a), set(&u, b)).unwrap();
        assert!(r.check.holds(), "{a} x {b}: {r:?}");
    }
    assert!(product_laws_check(&u, set(&u, "v(3)"), set(&u, "omega")).is_err());
}

#[test]
fn counting_collapse() {
    let u = Universe::default();
    let infinite = ["N", "omega", "A(2)", "prod(omega,omega)", "PN", "PPN"];
    for a in infinite {
        assert_eq!(size_of(&u, set(&u, a)).unwrap(), Size::OmegaSize);
        for b in infinite {
            assert_eq!(counting_compare(&u, set(&u, a), set(&u, b), 6).unwrap(), Relation::Equal);
        }
        assert_eq!(counting_compare(&u, set(&u, "v(4)"), set(&u, a), 6).unwrap(), Relation::Less);
    }
}

#[test]
fn counting_on_opaque_streams() {
    let u = Universe::default();
    let nat = u.opaque_stream("nat", |n| Hf::from_elems((0..n as u64).map(|k| approxsets::ZNat::new(k).value().clone())));
    let one = u.opaque_stream("one", |n| if n == 0 { Hf::empty() } else { Hf::singleton(Hf::empty()) });
    assert_eq!(counting_compare(&u, nat, set(&u, "omega"), 6).unwrap(), Relation::Equal);
    assert_eq!(counting_compare(&u, one, nat, 6).unwrap(), Relation::Less);
}

#[test]
fn ordinal_arithmetic_table() {
    use OrdVal::*;
    let f = |op, a, b| nordinal_arith_with_omega(op, a, b).unwrap();
    for n in 0..6 {
        assert_eq!(f(OrdOp::Add, Fin(n), Omega), Omega);
        assert_eq!(f(OrdOp::Add, Omega, Fin(n)), Omega);
        if n > 0 {
            assert_eq!(f(OrdOp::Mul, Fin(n), Omega), Omega);
            assert_eq!(f(OrdOp::Pow, Omega, Fin(n)), Omega);
        }
        if n > 1 {
            assert_eq!(f(OrdOp::Pow, Fin(n), Omega), Omega);
        }
    }
    assert_eq!(f(OrdOp::Mul, Omega, Omega), Omega);
    assert_eq!(f(OrdOp::Pow, Fin(2), Fin(10)), Fin(1024));
    assert!(matches!(nordinal_arith_with_omega(OrdOp::Pow, Fin(2), Fin(64)), Err(CardError::Overflow(_))));
}

proptest! {
    #[test]
    fn finite_literals_count_elements(ks in prop::collection::vec(0u64..8, 0..6), js in prop::collection::vec(0u64..8, 0..6)) {
        let u = Universe::default();
        let mk = |ks: &[u64]| Hf::from_elems(ks.iter().map(|&k| approxsets::ZNat::new(k).value().clone()));
        let (x, y) = (mk(&ks), mk(&js));
        let (a, b) = (u.literal(x.clone()), u.literal(y.clone()));
        prop_assert_eq!(size_of(&u, a).unwrap(), Size::Finite(x.len() as u64));
        prop_assert_eq!(classify_cardinal(&u, a).unwrap().class, Class::Finite(x.len() as u64));
        let want = Relation::from_ordering(x.len().cmp(&y.len()));
        prop_assert_eq!(counting_compare(&u, a, b, 4).unwrap(), want);
        prop_assert_eq!(compare_cardinality(&u, a, b).unwrap().relation, want);
    }

    #[test]
    fn finite_arithmetic_matches_integers(a in 0u64..1000, b in 0u64..1000, e in 0u64..3) {
        use OrdVal::Fin;
        prop_assert_eq!(nordinal_arith_with_omega(OrdOp::Add, Fin(a), Fin(b)).unwrap(), Fin(a + b));
        prop_assert_eq!(nordinal_arith_with_omega(OrdOp::Mul, Fin(a), Fin(b)).unwrap(), Fin(a * b));
        prop_assert_eq!(nordinal_arith_with_omega(OrdOp::Pow, Fin(a), Fin(e)).unwrap(), Fin(a.pow(e as u32)));
    }
}
