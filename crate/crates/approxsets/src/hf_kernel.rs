//! Hereditarily finite sets as canonical brace words.
//!
//! Every distinct set is interned once; handles compare by identity. The
//! canonical word lists children in increasing order (shorter words first,
//! equal lengths byte-wise with `{` < `}`) without duplicates.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, LazyLock, Mutex};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HfError {
    #[error("malformed word at byte {pos}: {reason}")]
    MalformedWord { pos: usize, reason: &'static str },
    #[error("difference {a} - {b} is negative")]
    NegativeDifference { a: u64, b: u64 },
    #[error("{0} is not a Zermelo numeral")]
    NotZermeloShape(String),
    #[error("{0} is not a von Neumann numeral")]
    NotNeumannShape(String),
}

struct Node {
    word: Arc<str>,
    elems: Box<[Hf]>,
    rank: u32,
}

/// An interned hereditarily finite set.
#[derive(Clone)]
pub struct Hf(Arc<Node>);

struct Interner {
    table: HashMap<Arc<str>, Hf>,
    approx_memo: HashMap<(u32, usize), Hf>,
}

static INTERNER: LazyLock<Mutex<Interner>> = LazyLock::new(|| {
    Mutex::new(Interner {
        table: HashMap::new(),
        approx_memo: HashMap::new(),
    })
});

static EMPTY: LazyLock<Hf> = LazyLock::new(|| intern_sorted(Vec::new()));

// `elems` must already be sorted and deduplicated.
fn intern_sorted(elems: Vec<Hf>) -> Hf {
    let mut word = String::with_capacity(2 + elems.iter().map(|e| e.0.word.len()).sum::<usize>());
    word.push('{');
    for e in &elems {
        word.push_str(&e.0.word);
    }
    word.push('}');
    let mut guard = INTERNER.lock().expect("intern table poisoned");
    if let Some(h) = guard.table.get(word.as_str()) {
        return h.clone();
    }
    let rank = elems.iter().map(|e| e.rank() + 1).max().unwrap_or(0);
    let word: Arc<str> = Arc::from(word);
    let h = Hf(Arc::new(Node {
        word: word.clone(),
        elems: elems.into_boxed_slice(),
        rank,
    }));
    guard.table.insert(word, h.clone());
    h
}

impl Hf {
    pub fn empty() -> Hf {
        EMPTY.clone()
    }

    /// Builds `{e1, e2, ...}`, normalizing order and duplicates.
    pub fn from_elems<I: IntoIterator<Item = Hf>>(elems: I) -> Hf {
        let mut v: Vec<Hf> = elems.into_iter().collect();
        v.sort();
        v.dedup();
        intern_sorted(v)
    }

    pub fn singleton(x: Hf) -> Hf {
        intern_sorted(vec![x])
    }

    pub fn pair(a: Hf, b: Hf) -> Hf {
        Hf::from_elems([a, b])
    }

    /// Kuratowski pair `{{a}, {a, b}}`.
    pub fn ordered_pair(a: Hf, b: Hf) -> Hf {
        Hf::pair(Hf::singleton(a.clone()), Hf::pair(a, b))
    }

    /// Inverse of [`Hf::ordered_pair`].
    pub fn decode_ordered_pair(&self) -> Option<(Hf, Hf)> {
        match self.elems() {
            [s] if s.len() == 1 => {
                let a = s.elems()[0].clone();
                Some((a.clone(), a))
            }
            [s, t] if s.len() == 1 && t.len() == 2 => {
                let a = s.elems()[0].clone();
                let b = if t.elems()[0] == a {
                    t.elems()[1].clone()
                } else if t.elems()[1] == a {
                    t.elems()[0].clone()
                } else {
                    return None;
                };
                Some((a, b))
            }
            _ => None,
        }
    }

    pub fn elems(&self) -> &[Hf] {
        &self.0.elems
    }

    pub fn len(&self) -> usize {
        self.0.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.elems.is_empty()
    }

    pub fn rank(&self) -> u32 {
        self.0.rank
    }

    pub fn word(&self) -> &str {
        &self.0.word
    }

    pub fn contains(&self, x: &Hf) -> bool {
        self.elems().binary_search(x).is_ok()
    }

    pub fn union(&self, other: &Hf) -> Hf {
        Hf::from_elems(self.elems().iter().chain(other.elems()).cloned())
    }

    pub fn is_subset(&self, other: &Hf) -> bool {
        self.elems().iter().all(|e| other.contains(e))
    }

    /// Comma-separated rendering, e.g. `{{}, {{}}}`.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        self.pretty_into(&mut out);
        out
    }

    fn pretty_into(&self, out: &mut String) {
        out.push('{');
        for (i, e) in self.elems().iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            e.pretty_into(out);
        }
        out.push('}');
    }

    fn addr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }
}

impl PartialEq for Hf {
    fn eq(&self, other: &Hf) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Eq for Hf {}

impl Hash for Hf {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.addr().hash(state)
    }
}

impl Ord for Hf {
    fn cmp(&self, other: &Hf) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        lex_compare(self, other)
    }
}

impl PartialOrd for Hf {
    fn partial_cmp(&self, other: &Hf) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Hf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.word())
    }
}

impl fmt::Debug for Hf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hf({})", self.word())
    }
}

/// Parses a brace word. Commas and whitespace are ignored.
pub fn parse(text: &str) -> Result<Hf, HfError> {
    let mut stack: Vec<Vec<Hf>> = Vec::new();
    let mut done: Option<Hf> = None;
    for (pos, b) in text.bytes().enumerate() {
        match b {
            b'{' => {
                if done.is_some() {
                    return Err(HfError::MalformedWord { pos, reason: "trailing input after set" });
                }
                stack.push(Vec::new());
            }
            b'}' => {
                let elems = stack.pop().ok_or(HfError::MalformedWord { pos, reason: "unbalanced '}'" })?;
                let h = Hf::from_elems(elems);
                match stack.last_mut() {
                    Some(parent) => parent.push(h),
                    None => done = Some(h),
                }
            }
            b',' | b' ' | b'\t' | b'\n' | b'\r' => {}
            _ => return Err(HfError::MalformedWord { pos, reason: "illegal character" }),
        }
    }
    if !stack.is_empty() {
        return Err(HfError::MalformedWord { pos: text.len(), reason: "unclosed '{'" });
    }
    done.ok_or(HfError::MalformedWord { pos: 0, reason: "empty input" })
}

pub fn rank(a: &Hf) -> u32 {
    a.rank()
}

pub fn member(x: &Hf, a: &Hf) -> bool {
    a.contains(x)
}

/// Shorter words are smaller; equal lengths compare byte-wise.
pub fn lex_compare(a: &Hf, b: &Hf) -> Ordering {
    let (x, y) = (a.word(), b.word());
    x.len().cmp(&y.len()).then_with(|| x.as_bytes().cmp(y.as_bytes()))
}

/// The approximation F(n, a).
pub fn approx(n: u32, a: &Hf) -> Hf {
    if n >= a.rank() {
        return a.clone();
    }
    if n == 0 {
        return Hf::empty();
    }
    let key = (n, a.addr());
    if let Some(h) = INTERNER.lock().expect("intern table poisoned").approx_memo.get(&key) {
        return h.clone();
    }
    let h = Hf::from_elems(a.elems().iter().map(|e| approx(n - 1, e)));
    INTERNER
        .lock()
        .expect("intern table poisoned")
        .approx_memo
        .insert(key, h.clone());
    h
}

/// Zermelo numeral: 0 = {}, n+1 = {n}.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ZNat {
    value: Hf,
    magnitude: u64,
}

impl ZNat {
    pub fn new(k: u64) -> ZNat {
        let mut value = Hf::empty();
        for _ in 0..k {
            value = Hf::singleton(value);
        }
        ZNat { value, magnitude: k }
    }

    pub fn from_hf(h: &Hf) -> Result<ZNat, HfError> {
        let mut cur = h.clone();
        let mut k = 0;
        loop {
            match cur.elems() {
                [] => return Ok(ZNat { value: h.clone(), magnitude: k }),
                [x] => {
                    cur = x.clone();
                    k += 1;
                }
                _ => return Err(HfError::NotZermeloShape(h.to_string())),
            }
        }
    }

    pub fn value(&self) -> &Hf {
        &self.value
    }

    pub fn magnitude(&self) -> u64 {
        self.magnitude
    }

    pub fn succ(&self) -> ZNat {
        ZNat {
            value: Hf::singleton(self.value.clone()),
            magnitude: self.magnitude + 1,
        }
    }
}

/// Von Neumann numeral: 0 = {}, n+1 = n ∪ {n}.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct NOrdinal {
    value: Hf,
    magnitude: u64,
}

impl NOrdinal {
    pub fn new(k: u64) -> NOrdinal {
        let mut elems = Vec::new();
        let mut value = Hf::empty();
        for _ in 0..k {
            elems.push(value);
            value = Hf::from_elems(elems.iter().cloned());
        }
        NOrdinal { value, magnitude: k }
    }

    pub fn from_hf(h: &Hf) -> Result<NOrdinal, HfError> {
        let k = h.len() as u64;
        let expect = NOrdinal::new(k);
        if expect.value == *h {
            Ok(expect)
        } else {
            Err(HfError::NotNeumannShape(h.to_string()))
        }
    }

    pub fn value(&self) -> &Hf {
        &self.value
    }

    pub fn magnitude(&self) -> u64 {
        self.magnitude
    }
}

pub fn zermelo_to_neumann(z: &ZNat) -> NOrdinal {
    NOrdinal::new(z.magnitude)
}

pub fn neumann_to_zermelo(o: &NOrdinal) -> ZNat {
    ZNat::new(o.magnitude)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZOp {
    Sum,
    Diff,
    Cmp,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZArith {
    Nat(ZNat),
    Order(Ordering),
}

pub fn znat_arith(op: ZOp, a: &ZNat, b: &ZNat) -> Result<ZArith, HfError> {
    let (x, y) = (a.magnitude, b.magnitude);
    Ok(match op {
        ZOp::Sum => ZArith::Nat(ZNat::new(x + y)),
        ZOp::Diff => {
            let d = x.checked_sub(y).ok_or(HfError::NegativeDifference { a: x, b: y })?;
            ZArith::Nat(ZNat::new(d))
        }
        ZOp::Cmp => ZArith::Order(x.cmp(&y)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Hf {
        parse(s).unwrap()
    }

    #[test]
    fn parse_normalizes() {
        assert_eq!(p("{}").word(), "{}");
        assert_eq!(p("{{{}}{}}").word(), "{{}{{}}}");
        assert_eq!(p("{{},{}}").word(), "{{}}");
        assert_eq!(p(" { {}, { {} } } ").word(), "{{}{{}}}");
    }

    #[test]
    fn parse_rejects() {
        assert!(parse("{").is_err());
        assert!(parse("}").is_err());
        assert!(parse("{}{}").is_err());
        assert!(parse("{a}").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn interning_is_identity() {
        assert!(Arc::ptr_eq(&p("{{}}").0, &Hf::singleton(Hf::empty()).0));
    }

    #[test]
    fn ranks_and_members() {
        assert_eq!(rank(&p("{}")), 0);
        assert_eq!(rank(&p("{{}}")), 1);
        assert_eq!(rank(ZNat::new(9).value()), 9);
        assert!(member(&p("{}"), &p("{{}}")));
        assert!(!member(&p("{}"), &p("{}")));
        assert!(member(&p("{{}}"), &p("{{},{{}}}")));
    }

    #[test]
    fn worked_approximations() {
        assert_eq!(approx(2, &p("{{},{{}},{{{}}},{{{{}}}}}")), p("{{},{{}}}"));
        assert_eq!(approx(1, &p("{{},{{}}}")), p("{{}}"));
        for n in 0..=8u32 {
            for m in 0..=8u64 {
                let k = m.min(n as u64);
                assert_eq!(approx(n, ZNat::new(m).value()), *ZNat::new(k).value());
                assert_eq!(approx(n, NOrdinal::new(m).value()), *NOrdinal::new(k).value());
            }
        }
    }

    #[test]
    fn numerals() {
        assert_eq!(NOrdinal::new(2).value().word(), "{{}{{}}}");
        let z = ZNat::from_hf(&p("{{{}}}")).unwrap();
        assert_eq!(zermelo_to_neumann(&z), NOrdinal::new(2));
        assert_eq!(neumann_to_zermelo(&NOrdinal::new(5)), ZNat::new(5));
        assert!(ZNat::from_hf(&p("{{}{{}}}")).is_err());
        assert!(NOrdinal::from_hf(&p("{{{}}}")).is_err());
    }

    #[test]
    fn arithmetic() {
        let z = ZNat::new;
        assert_eq!(znat_arith(ZOp::Sum, &z(2), &z(3)).unwrap(), ZArith::Nat(z(5)));
        assert_eq!(znat_arith(ZOp::Diff, &z(5), &z(2)).unwrap(), ZArith::Nat(z(3)));
        assert_eq!(znat_arith(ZOp::Cmp, &z(2), &z(7)).unwrap(), ZArith::Order(Ordering::Less));
        assert!(matches!(
            znat_arith(ZOp::Diff, &z(2), &z(5)),
            Err(HfError::NegativeDifference { .. })
        ));
    }

    #[test]
    fn lex_order() {
        assert_eq!(lex_compare(&p("{}"), &p("{{}}")), Ordering::Less);
        assert_eq!(lex_compare(&p("{{}}"), &p("{{{}}}")), Ordering::Less);
        assert_eq!(lex_compare(&p("{{}{{}}}"), &p("{{}{{}}}")), Ordering::Equal);
    }

    #[test]
    fn pair_coding_round_trips() {
        let a = ZNat::new(2).value().clone();
        let b = NOrdinal::new(3).value().clone();
        assert_eq!(Hf::ordered_pair(a.clone(), b.clone()).decode_ordered_pair(), Some((a.clone(), b)));
        assert_eq!(Hf::ordered_pair(a.clone(), a.clone()).decode_ordered_pair(), Some((a.clone(), a)));
    }
}
