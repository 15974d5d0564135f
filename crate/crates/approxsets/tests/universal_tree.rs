use approxsets::hf_kernel::approx;
use approxsets::universal_tree::{is_successor, level_count, successors, Enumerator, Node, TreeError};
use approxsets::Hf;
use num_bigint::BigUint;
use proptest::prelude::*;
use std::sync::OnceLock;

fn level3() -> Vec<Node> {
    Enumerator::default().level(3).unwrap()
}

fn level4() -> &'static [Node] {
    static LEVEL: OnceLock<Vec<Node>> = OnceLock::new();
    LEVEL.get_or_init(|| Enumerator::default().level(4).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn successors_extend_their_parent(i in 0usize..16) {
        let v = level3()[i].clone();
        let kids = successors(&v).unwrap();
        prop_assert!(!kids.is_empty());
        for w in &kids {
            prop_assert!(is_successor(&v, w));
            prop_assert_eq!(w.predecessor(), Some(v.clone()));
            prop_assert!(w.approx.rank() <= w.level);
        }
        let words: Vec<&Hf> = kids.iter().map(|w| &w.approx).collect();
        let mut sorted = words.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), words.len());
    }

    #[test]
    fn level_four_partitions_by_predecessor(i in 0usize..16) {
        let v = level3()[i].clone();
        let mine = level4().iter().filter(|w| approx(3, &w.approx) == v.approx).count();
        prop_assert_eq!(mine, successors(&v).unwrap().len());
    }
}

#[test]
fn level_sizes() {
    assert_eq!(level4().len(), 65536);
    assert_eq!(level_count(4), BigUint::from(65536u32));
    assert!(matches!(Enumerator::new(1000).level(4), Err(TreeError::EnumerationTooLarge { budget: 1000 })));
}
