//! The finite fragment of the universal tree: nodes `(level, A)` with
//! `rank(A) <= level`, where `(n+1, B)` succeeds `(n, A)` iff `F(n, B) = A`.

use std::collections::HashMap;

use num_bigint::BigUint;
use thiserror::Error;

use crate::hf_kernel::{approx, Hf};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("rank of {approx} exceeds level {level}")]
    BadNode { level: u32, approx: String },
    #[error("enumeration would exceed the budget of {budget} nodes")]
    EnumerationTooLarge { budget: u64 },
}

pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Node {
    pub level: u32,
    pub approx: Hf,
}

impl Node {
    pub fn new(level: u32, approx: Hf) -> Result<Node, TreeError> {
        if approx.rank() > level {
            return Err(TreeError::BadNode { level, approx: approx.to_string() });
        }
        Ok(Node { level, approx })
    }

    pub fn root() -> Node {
        Node { level: 0, approx: Hf::empty() }
    }

    /// The unique predecessor of a non-root node.
    pub fn predecessor(&self) -> Option<Node> {
        let level = self.level.checked_sub(1)?;
        Some(Node { level, approx: approx(level, &self.approx) })
    }
}

pub fn is_successor(v: &Node, w: &Node) -> bool {
    w.level == v.level + 1 && w.approx.rank() <= w.level && approx(v.level, &w.approx) == v.approx
}

/// Memoizing successor enumerator.
pub struct Enumerator {
    budget: u64,
    memo: HashMap<Node, Vec<Hf>>,
}

impl Default for Enumerator {
    fn default() -> Self {
        Enumerator::new(DEFAULT_BUDGET)
    }
}

impl Enumerator {
    pub fn new(budget: u64) -> Enumerator {
        Enumerator { budget, memo: HashMap::new() }
    }

    pub fn successors(&mut self, v: &Node) -> Result<Vec<Node>, TreeError> {
        let level = v.level + 1;
        Ok(self
            .extensions(v)?
            .into_iter()
            .map(|approx| Node { level, approx })
            .collect())
    }

    fn extensions(&mut self, v: &Node) -> Result<Vec<Hf>, TreeError> {
        if let Some(e) = self.memo.get(v) {
            return Ok(e.clone());
        }
        let out = if v.level == 0 {
            // F(0, ·) = {} regardless of the argument.
            vec![Hf::empty(), Hf::singleton(Hf::empty())]
        } else {
            let mut per_elem = Vec::with_capacity(v.approx.len());
            let mut total: u64 = 1;
            for a in v.approx.elems() {
                let ext = self.extensions(&Node { level: v.level - 1, approx: a.clone() })?;
                let choices = nonempty_subset_count(ext.len(), self.budget);
                total = total.saturating_mul(choices);
                if total > self.budget {
                    return Err(TreeError::EnumerationTooLarge { budget: self.budget });
                }
                per_elem.push(ext);
            }
            let mut acc: Vec<Vec<Hf>> = vec![Vec::new()];
            for ext in &per_elem {
                let mut next = Vec::with_capacity(acc.len() * ((1usize << ext.len().min(20)) - 1));
                for mask in 1u64..(1u64 << ext.len()) {
                    for base in &acc {
                        let mut b = base.clone();
                        b.extend((0..ext.len()).filter(|i| mask >> i & 1 == 1).map(|i| ext[i].clone()));
                        next.push(b);
                    }
                }
                acc = next;
            }
            let mut out: Vec<Hf> = acc.into_iter().map(Hf::from_elems).collect();
            out.sort();
            out
        };
        self.memo.insert(v.clone(), out.clone());
        Ok(out)
    }

    /// All nodes of level `n`, in lexicographic order.
    pub fn level(&mut self, n: u32) -> Result<Vec<Node>, TreeError> {
        let mut cur = vec![Node::root()];
        for _ in 0..n {
            let mut next = Vec::new();
            for v in &cur {
                next.extend(self.successors(v)?);
                if next.len() as u64 > self.budget {
                    return Err(TreeError::EnumerationTooLarge { budget: self.budget });
                }
            }
            cur = next;
        }
        cur.sort_by(|a, b| a.approx.cmp(&b.approx));
        Ok(cur)
    }
}

fn nonempty_subset_count(k: usize, cap: u64) -> u64 {
    if k >= 63 {
        cap.saturating_add(1)
    } else {
        (1u64 << k) - 1
    }
}

pub fn successors(v: &Node) -> Result<Vec<Node>, TreeError> {
    Enumerator::default().successors(v)
}

/// Number of HF sets of rank at most `n`: t(0) = 1, t(n+1) = 2^t(n).
pub fn level_count(n: u32) -> BigUint {
    let mut t = BigUint::from(1u32);
    for _ in 0..n {
        let e = u64::try_from(&t).expect("level count exponent overflows u64");
        t = BigUint::from(1u32) << e;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hf_kernel::parse;

    fn node(l: u32, s: &str) -> Node {
        Node::new(l, parse(s).unwrap()).unwrap()
    }

    #[test]
    fn successor_predicate() {
        assert!(is_successor(&node(0, "{}"), &node(1, "{{}}")));
        assert!(is_successor(&node(1, "{{}}"), &node(2, "{{}{{}}}")));
        assert!(!is_successor(&node(1, "{}"), &node(2, "{{}}")));
    }

    #[test]
    fn enumerated_successors() {
        let words = |v: Vec<Node>| v.into_iter().map(|n| n.approx.to_string()).collect::<Vec<_>>();
        assert_eq!(words(successors(&node(0, "{}")).unwrap()), ["{}", "{{}}"]);
        assert_eq!(words(successors(&node(1, "{}")).unwrap()), ["{}"]);
        assert_eq!(
            words(successors(&node(1, "{{}}")).unwrap()),
            ["{{}}", "{{{}}}", "{{}{{}}}"]
        );
    }

    #[test]
    fn counts() {
        let mut e = Enumerator::default();
        for (n, want) in [1u32, 2, 4, 16].into_iter().enumerate() {
            assert_eq!(e.level(n as u32).unwrap().len() as u32, want);
            assert_eq!(level_count(n as u32), BigUint::from(want));
        }
        assert_eq!(level_count(4), BigUint::from(65536u32));
        assert_eq!(level_count(5).bits(), 65537);
    }

    #[test]
    fn budget_guard() {
        let mut e = Enumerator::new(10);
        assert!(matches!(e.level(4), Err(TreeError::EnumerationTooLarge { .. })));
    }

    #[test]
    fn bad_node_rejected() {
        assert!(Node::new(0, parse("{{}}").unwrap()).is_err());
    }
}
