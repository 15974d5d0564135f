//! Topology of approximations on quotient-backed sets.
//!
//! A neighbourhood `V(n, x)` is everything sharing `x`'s depth-`n`
//! approximation. Points, derived sets, perfect parts and Cantor–Bendixson
//! rank/degree are all read off the tree quotient.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};

use thiserror::Error;

use crate::hf_kernel::lex_compare;
use crate::set_rep::{Mode, Quotient, SetError, SetRef, Truth, Universe};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error(transparent)]
    Set(#[from] SetError),
    #[error("no element of {set} shares the depth-{depth} approximation of the given point")]
    NodeAbsent { set: String, depth: u32 },
    #[error("{x} is not an element of {set}")]
    NotAMember { x: String, set: String },
    #[error("{0} contains a perfect subset; it has no Cantor-Bendixson rank")]
    NotWellOrderable(String),
    #[error("derivatives of {set} did not vanish within {cap} steps")]
    RankCapExceeded { set: String, cap: u32 },
    #[error("more than {cap} paths in the final derivative of {set}")]
    PathCapExceeded { set: String, cap: u64 },
}

pub type Result<T> = std::result::Result<T, TopologyError>;

pub const DEFAULT_RANK_CAP: u32 = 64;
pub const PATH_CAP: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Isolated,
    Accumulation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PointClass {
    pub classification: Classification,
    /// For isolated points: least `n` with `V(n, x) ∩ A = {x}`.
    pub witness_depth: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathCount {
    Empty,
    Thin,
    Wide,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LexOrder {
    Ordered(Ordering),
    UnresolvedUpTo(u32),
}

/// Path class of the whole set: no, exactly one, or several elements.
pub fn path_count(u: &Universe, a: SetRef) -> Result<PathCount> {
    let q = u.quotient(a)?;
    Ok(match q.root {
        None => PathCount::Empty,
        Some(r) if q.states[r].thin => PathCount::Thin,
        Some(_) => PathCount::Wide,
    })
}

/// The elements of `a` whose depth-`n` approximation equals that of `x`.
pub fn neighborhood_filter(u: &Universe, a: SetRef, x: SetRef, n: u32) -> Result<SetRef> {
    u.require_exact(a)?;
    let labels = (0..=n).map(|m| u.approx_of(x, m)).collect::<std::result::Result<Vec<_>, _>>()?;
    let s = u.along(a, labels, &u.description(x));
    if u.quotient(s)?.is_empty() {
        return Err(TopologyError::NodeAbsent { set: u.description(a), depth: n });
    }
    Ok(s)
}

/// Walks `x`'s path through `a`'s quotient until the node becomes thin or
/// the walk repeats a state pair.
pub fn classify_point(u: &Universe, a: SetRef, x: SetRef) -> Result<PointClass> {
    if u.member_in(x, a, Mode::Exact)? != Truth::True {
        return Err(TopologyError::NotAMember { x: u.description(x), set: u.description(a) });
    }
    let single = u.pair(x, x);
    let (qx, qa) = (u.quotient(single)?, u.quotient(a)?);
    let horizon = u.horizon(u.resolve(single)).max(u.horizon(u.resolve(a))) + 2;
    let (rx, ra) = (qx.root.expect("singleton is nonempty"), qa.root.expect("a has an element"));
    let (mut dx, mut da) = (qx.states[rx].desc.clone(), qa.states[ra].desc.clone());
    let (mut sx, mut sa) = (rx, ra);
    let mut label = crate::Hf::empty();
    let mut seen = HashSet::new();
    let mut level = 0u32;
    loop {
        if qa.states[sa].thin {
            return Ok(PointClass { classification: Classification::Isolated, witness_depth: Some(level) });
        }
        if !seen.insert((sx, sa, level.min(horizon))) {
            return Ok(PointClass { classification: Classification::Accumulation, witness_depth: None });
        }
        let (l, cx) = u
            .kids_in(single, &dx, level, &label)?
            .into_iter()
            .next()
            .expect("a singleton has one child per node");
        let ca = u
            .kids_in(a, &da, level, &label)?
            .into_iter()
            .find(|(m, _)| *m == l)
            .map(|(_, c)| c)
            .expect("members follow a path of the tree");
        level += 1;
        sx = lookup(u, &qx, single, &cx, level)?;
        sa = lookup(u, &qa, a, &ca, level)?;
        dx = cx;
        da = ca;
        label = l;
    }
}

fn lookup(u: &Universe, q: &Quotient, s: SetRef, d: &crate::set_rep::Desc, level: u32) -> Result<usize> {
    q.lookup(d, level).ok_or_else(|| SetError::QuotientMismatch(u.description(s)).into())
}

/// The set of accumulation points of `a`.
pub fn derived_set(u: &Universe, a: SetRef) -> Result<SetRef> {
    u.require_exact(a)?;
    Ok(u.derived(a))
}

/// States lying below a perfect binary subtree: the greatest set `X` of
/// live states each of which reaches a state with two child edges into `X`.
fn perfect_core(q: &Quotient) -> Vec<bool> {
    let n = q.states.len();
    let mut x: Vec<bool> = q.states.iter().map(|s| s.alive).collect();
    loop {
        let branching: Vec<usize> = (0..n)
            .filter(|&s| x[s] && q.states[s].kids.iter().filter(|&&k| x[k]).count() >= 2)
            .collect();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for s in 0..n {
            if x[s] {
                for &k in &q.states[s].kids {
                    if x[k] {
                        preds[k].push(s);
                    }
                }
            }
        }
        let mut reach = vec![false; n];
        let mut queue: VecDeque<usize> = branching.into_iter().collect();
        for &s in &queue {
            reach[s] = true;
        }
        while let Some(s) = queue.pop_front() {
            for &p in &preds[s] {
                if !reach[p] {
                    reach[p] = true;
                    queue.push_back(p);
                }
            }
        }
        if reach == x {
            return x;
        }
        x = reach;
    }
}

pub fn contains_perfect_subtree(u: &Universe, a: SetRef) -> Result<bool> {
    let q = u.quotient(a)?;
    let core = perfect_core(&q);
    Ok(q.root.is_some_and(|r| core[r]))
}

pub fn is_well_orderable(u: &Universe, a: SetRef) -> Result<bool> {
    Ok(!contains_perfect_subtree(u, a)?)
}

/// Number of elements, when finite.
pub fn path_total(u: &Universe, a: SetRef, cap: u64) -> Result<Option<u64>> {
    let q = u.quotient(a)?;
    let Some(root) = q.root else { return Ok(Some(0)) };
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; q.states.len()];
    let mut count = vec![0u64; q.states.len()];
    fn go(q: &Quotient, s: usize, state: &mut [u8], count: &mut [u64], cap: u64) -> Option<u64> {
        match state[s] {
            2 => return Some(count[s]),
            1 => return None,
            _ => {}
        }
        if q.states[s].thin {
            state[s] = 2;
            count[s] = 1;
            return Some(1);
        }
        state[s] = 1;
        let mut total = 0u64;
        for &k in &q.states[s].kids {
            total = total.saturating_add(go(q, k, state, count, cap)?);
        }
        state[s] = 2;
        count[s] = total.min(cap.saturating_add(1));
        Some(count[s])
    }
    match go(&q, root, &mut state, &mut count, cap) {
        Some(c) if c > cap => Err(TopologyError::PathCapExceeded { set: u.description(a), cap }),
        r => Ok(r),
    }
}

/// Cantor–Bendixson rank and degree.
pub fn cb_rank_degree(u: &Universe, a: SetRef, rank_cap: u32) -> Result<(u32, u64)> {
    if contains_perfect_subtree(u, a)? {
        return Err(TopologyError::NotWellOrderable(u.description(a)));
    }
    let mut cur = a;
    let mut rank = 0u32;
    loop {
        let d = derived_set(u, cur)?;
        if u.quotient(d)?.is_empty() {
            break;
        }
        rank += 1;
        if rank > rank_cap {
            return Err(TopologyError::RankCapExceeded { set: u.description(a), cap: rank_cap });
        }
        cur = d;
    }
    let degree = path_total(u, cur, PATH_CAP)?.ok_or_else(|| SetError::QuotientMismatch(u.description(cur)))?;
    Ok((rank, degree))
}

/// Compares two elements by their first differing approximation.
pub fn lex_element_compare(u: &Universe, x: SetRef, y: SetRef, depth_cap: u32) -> Result<LexOrder> {
    for n in 0..=depth_cap {
        let (ax, ay) = (u.approx_of(x, n)?, u.approx_of(y, n)?);
        if ax != ay {
            return Ok(LexOrder::Ordered(lex_compare(&ax, &ay)));
        }
    }
    Ok(LexOrder::UnresolvedUpTo(depth_cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set_rep::Builtin;
    use crate::ZNat;

    #[test]
    fn nat_topology() {
        let u = Universe::default();
        let n = u.builtin(Builtin::N).unwrap();
        let inf = u.builtin(Builtin::Infinity).unwrap();
        let seven = u.literal(ZNat::new(7).value().clone());
        assert_eq!(classify_point(&u, n, inf).unwrap().classification, Classification::Accumulation);
        assert_eq!(
            classify_point(&u, n, seven).unwrap(),
            PointClass { classification: Classification::Isolated, witness_depth: Some(8) }
        );
        let d = derived_set(&u, n).unwrap();
        assert_eq!(path_total(&u, d, 10).unwrap(), Some(1));
        assert_eq!(cb_rank_degree(&u, n, 64).unwrap(), (1, 1));
        assert!(!contains_perfect_subtree(&u, n).unwrap());
    }

    #[test]
    fn lex_elements() {
        let u = Universe::default();
        let z = |k| u.literal(ZNat::new(k).value().clone());
        let inf = u.builtin(Builtin::Infinity).unwrap();
        assert_eq!(lex_element_compare(&u, z(2), z(3), 10).unwrap(), LexOrder::Ordered(Ordering::Less));
        assert_eq!(lex_element_compare(&u, inf, z(5), 10).unwrap(), LexOrder::Ordered(Ordering::Greater));
        assert_eq!(lex_element_compare(&u, inf, inf, 10).unwrap(), LexOrder::UnresolvedUpTo(10));
    }
}
