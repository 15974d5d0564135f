use std::cmp::Ordering;

use approxsets::hf_kernel::{
    approx, lex_compare, member, neumann_to_zermelo, parse, rank, zermelo_to_neumann, znat_arith, Hf, ZArith, ZOp,
};
use approxsets::{NOrdinal, ZNat};
use proptest::prelude::*;

fn hf_strategy() -> impl Strategy<Value = Hf> {
    let leaf = Just(Hf::empty());
    leaf.prop_recursive(5, 64, 4, |inner| prop::collection::vec(inner, 0..4).prop_map(Hf::from_elems))
}

proptest! {
    #[test]
    fn word_round_trips(a in hf_strategy()) {
        prop_assert_eq!(parse(&a.to_string()).unwrap(), a.clone());
        prop_assert_eq!(parse(&a.pretty()).unwrap(), a);
    }

    #[test]
    fn approximation_laws(a in hf_strategy(), n in 0u32..7, m in 0u32..4) {
        let fa = approx(n, &a);
        prop_assert!(rank(&fa) <= n);
        prop_assert_eq!(approx(n, &approx(n + m, &a)), fa.clone());
        prop_assert_eq!(approx(n + m, &fa), fa.clone());
        if rank(&fa) < n {
            prop_assert_eq!(fa, a.clone());
        }
        prop_assert_eq!(approx(rank(&a) + m, &a), a);
    }

    #[test]
    fn approximation_of_elements(a in hf_strategy(), n in 0u32..6) {
        let want = Hf::from_elems(a.elems().iter().map(|x| approx(n, x)));
        prop_assert_eq!(approx(n + 1, &a), want);
    }

    #[test]
    fn extensionality(a in hf_strategy(), b in hf_strategy()) {
        let top = rank(&a).max(rank(&b)) + 1;
        let agree = (0..=top).all(|n| approx(n, &a) == approx(n, &b));
        prop_assert_eq!(agree, a == b);
    }

    #[test]
    fn lex_order_is_total(a in hf_strategy(), b in hf_strategy()) {
        let o = lex_compare(&a, &b);
        prop_assert_eq!(o == Ordering::Equal, a == b);
        prop_assert_eq!(lex_compare(&b, &a), o.reverse());
    }

    #[test]
    fn membership_and_union(a in hf_strategy(), b in hf_strategy()) {
        let u = a.union(&b);
        for x in a.elems().iter().chain(b.elems()) {
            prop_assert!(member(x, &u));
        }
        prop_assert!(a.is_subset(&u) && b.is_subset(&u));
        prop_assert_eq!(u.len(), u.elems().len());
    }

    #[test]
    fn ordered_pairs_decode(a in hf_strategy(), b in hf_strategy()) {
        let p = Hf::ordered_pair(a.clone(), b.clone());
        prop_assert_eq!(p.decode_ordered_pair(), Some((a, b)));
    }

    #[test]
    fn numerals(j in 0u64..14, k in 0u64..14) {
        let (zj, zk) = (ZNat::new(j), ZNat::new(k));
        prop_assert_eq!(zermelo_to_neumann(&zj).magnitude(), j);
        prop_assert_eq!(neumann_to_zermelo(&NOrdinal::new(j)).magnitude(), j);
        prop_assert_eq!(znat_arith(ZOp::Sum, &zj, &zk).unwrap(), ZArith::Nat(ZNat::new(j + k)));
        prop_assert_eq!(znat_arith(ZOp::Cmp, &zj, &zk).unwrap(), ZArith::Order(j.cmp(&k)));
        prop_assert_eq!(znat_arith(ZOp::Diff, &zj, &zk).is_ok(), j >= k);
        prop_assert_eq!(ZNat::from_hf(zj.value()).unwrap().magnitude(), j);
    }
}

#[test]
fn malformed_words() {
    for w in ["", "{", "}", "{}}", "{{}", "x", "{}{}"] {
        assert!(parse(w).is_err(), "{w:?} should be rejected");
    }
}
