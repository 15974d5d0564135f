//! Sets given by their approximation streams.
//!
//! A set lives in a [`Universe`] and is addressed by a [`SetRef`]. Sets built
//! from builtins and combinators carry a *tree quotient*: the developing tree
//! of the set (level-`n` nodes are the elements of `F(n+1, A)`) folded into
//! finitely many states. Each node is described by a [`Desc`] that determines
//! the part of the set living below that node; a quotient state is a
//! descriptor together with the node level clamped at a per-set horizon past
//! which the descriptor's behaviour no longer depends on the level.
//!
//! Opaque streams wrap a user generator and only support depth-bounded
//! questions.

use std::cell::{OnceCell, RefCell};
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::rc::Rc;

use thiserror::Error;

use crate::hf_kernel::{approx, Hf, NOrdinal, ZNat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("approximation of {set} at depth {depth} exceeds the budget")]
    DepthBudgetExceeded { set: String, depth: u32 },
    #[error("tree quotient of {set} exceeds the budget of {budget} states")]
    StateBudgetExceeded { set: String, budget: u64 },
    #[error("{0} is an opaque stream; this operation needs a tree quotient")]
    UnsupportedOnOpaque(String),
    #[error("incoherent stream at depth {n}: F({n}, approx({next})) = {got}, expected {want}", next = n + 1)]
    CoherenceViolation { n: u32, got: String, want: String },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("tree quotient of {0} is not uniform past its horizon")]
    QuotientMismatch(String),
}

pub type Result<T> = std::result::Result<T, SetError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetRef(u32);

impl SetRef {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    Empty,
    Infinity,
    N,
    Omega,
    PowerN,
    PerfectPN,
    PairsA(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RepKind {
    HfLiteral,
    Builtin,
    Combinator,
    OpaqueStream,
}

/// Three-valued answer of membership/equality questions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    True,
    /// `witness` is the first depth at which the approximations disagree.
    False { witness: Option<u32> },
    ConsistentUpTo(u32),
}

impl Truth {
    pub fn is_true(self) -> bool {
        self == Truth::True
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Bounded(u32),
}

#[derive(Clone, Copy, Debug)]
pub struct Config {
    /// Cap on quotient states and on nodes per unfolded level.
    pub budget: u64,
    /// Cap on the element count of a single power-set approximation.
    pub power_budget: u64,
    /// Depth searched for a first disagreement once an exact answer is `False`.
    pub witness_cap: u32,
}

impl Default for Config {
    fn default() -> Self {
        Config { budget: 1_000_000, power_budget: 1 << 16, witness_cap: 64 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Hf(Hf),
    Set(SetRef),
}

/// A node of a power-set tree remembers the base-tree nodes it covers. The
/// label is context, not identity.
#[derive(Clone, Debug)]
pub struct Part {
    label: Hf,
    desc: Desc,
}

impl PartialEq for Part {
    fn eq(&self, o: &Part) -> bool {
        self.desc == o.desc
    }
}
impl Eq for Part {}
impl Hash for Part {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.desc.hash(h)
    }
}
impl PartialOrd for Part {
    fn partial_cmp(&self, o: &Part) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Part {
    fn cmp(&self, o: &Part) -> Ordering {
        self.desc.cmp(&o.desc)
    }
}

/// Describes the elements of a set that sit below one node of its
/// developing tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Desc {
    /// A single HF point whose approximations have stopped changing.
    Settled,
    Pt(Point),
    /// Several HF points sharing the current label.
    Points(Vec<Hf>),
    InfTail,
    NatTail,
    OrdTail,
    PerfRoot,
    PerfTail,
    ARoot(u32),
    ACollapsed(u32),
    ASplit(u32),
    PrePair { owner: SetRef, step: u8 },
    OPairs { owner: SetRef, a: Box<Desc>, b: Box<Desc> },
    PowRoot { owner: SetRef },
    Cover { owner: SetRef, parts: Vec<Part> },
    /// `bool` marks the right operand.
    Union { owner: SetRef, comps: Vec<(bool, Desc)> },
    Inter { owner: SetRef, a: Box<Desc>, b: Box<Desc> },
    Diff { owner: SetRef, b: Box<Desc>, a: Option<Box<Desc>> },
    Filter { owner: SetRef, inner: Box<Desc> },
    Along { owner: SetRef, inner: Box<Desc> },
}

impl Desc {
    fn obligated(&self) -> bool {
        matches!(self, Desc::Diff { a: Some(_), .. })
    }

    pub(crate) fn name(&self) -> String {
        match self {
            Desc::Settled => "settled".into(),
            Desc::Pt(Point::Hf(p)) => format!("point {p}"),
            Desc::Pt(Point::Set(s)) => format!("point #{}", s.0),
            Desc::Points(ps) => format!("points x{}", ps.len()),
            Desc::InfTail => "inf-tail".into(),
            Desc::NatTail => "nat-tail".into(),
            Desc::OrdTail => "ord-tail".into(),
            Desc::PerfRoot => "perfect-root".into(),
            Desc::PerfTail => "perfect-tail".into(),
            Desc::ARoot(i) => format!("pairs-root {i}"),
            Desc::ACollapsed(r) => format!("pairs-collapsed {r}"),
            Desc::ASplit(g) => format!("pairs-split {g}"),
            Desc::PrePair { step, .. } => format!("pair-prefix {step}"),
            Desc::OPairs { a, b, .. } => format!("({}, {})", a.name(), b.name()),
            Desc::PowRoot { .. } => "subsets-root".into(),
            Desc::Cover { parts, .. } => format!("subsets x{}", parts.len()),
            Desc::Union { comps, .. } => {
                let v: Vec<String> = comps.iter().map(|(_, d)| d.name()).collect();
                format!("union[{}]", v.join(" | "))
            }
            Desc::Inter { a, b, .. } => format!("inter[{} & {}]", a.name(), b.name()),
            Desc::Diff { b, a: Some(a), .. } => format!("diff[{} - {}]", b.name(), a.name()),
            Desc::Diff { b, a: None, .. } => format!("diff[{}]", b.name()),
            Desc::Filter { inner, .. } => format!("derived[{}]", inner.name()),
            Desc::Along { inner, .. } => format!("near[{}]", inner.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Kind {
    Literal(Hf),
    Empty,
    Infinity,
    Nat,
    Omega,
    PerfectPN,
    PairsA(u32),
    Union(SetRef, SetRef),
    Inter(SetRef, SetRef),
    Diff { b: SetRef, a: SetRef },
    Pair(SetRef, SetRef),
    Cartesian(SetRef, SetRef),
    Power(SetRef),
    Derived(SetRef),
    Along(SetRef, Vec<Hf>),
    /// A named composite (sum, multiple, ordered pair, `PN`).
    Alias(SetRef, String),
    Opaque(usize),
}

type Generator = Rc<dyn Fn(u32) -> Hf>;

struct Entry {
    kind: Kind,
    description: String,
    horizon: u32,
    exact: bool,
    gen: Option<Generator>,
    memo: RefCell<HashMap<u32, Hf>>,
    quotient: OnceCell<Result<Rc<Quotient>>>,
    levels: RefCell<Vec<Vec<(Hf, Desc)>>>,
}

/// One state of a tree quotient, with the context it was first reached in.
#[derive(Clone, Debug)]
pub struct QState {
    pub(crate) desc: Desc,
    pub level: u32,
    pub label: Hf,
    raw: Vec<usize>,
    /// Child edges into live states; repeated targets are distinct children.
    pub kids: Vec<usize>,
    pub alive: bool,
    /// Exactly one infinite path below.
    pub thin: bool,
    /// On an infinite path of states with at least two paths below.
    pub accumulating: bool,
}

impl QState {
    pub fn name(&self) -> String {
        self.desc.name()
    }
}

/// Finite-state form of a developing tree.
#[derive(Clone, Debug, Default)]
pub struct Quotient {
    pub states: Vec<QState>,
    pub root: Option<usize>,
    index: HashMap<(Desc, u32), usize>,
    horizon: u32,
}

impl Quotient {
    pub(crate) fn lookup(&self, d: &Desc, level: u32) -> Option<usize> {
        self.index.get(&(d.clone(), level.min(self.horizon))).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    /// States reachable from the root through live edges.
    pub fn live_states(&self) -> Vec<usize> {
        let mut seen = vec![false; self.states.len()];
        let mut out = Vec::new();
        let mut stack: Vec<usize> = self.root.into_iter().collect();
        while let Some(s) = stack.pop() {
            if std::mem::replace(&mut seen[s], true) {
                continue;
            }
            out.push(s);
            stack.extend(self.states[s].kids.iter().copied());
        }
        out.sort_unstable();
        out
    }

    fn finish(&mut self) {
        let n = self.states.len();
        let mut alive = vec![true; n];
        loop {
            loop {
                let mut changed = false;
                for s in 0..n {
                    if alive[s] && !self.states[s].raw.iter().any(|&k| alive[k]) {
                        alive[s] = false;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            // Relative complements must eventually leave the removed set.
            let mut good: Vec<bool> = (0..n).map(|s| alive[s] && !self.states[s].desc.obligated()).collect();
            loop {
                let mut changed = false;
                for s in 0..n {
                    if alive[s] && !good[s] && self.states[s].raw.iter().any(|&k| good[k]) {
                        good[s] = true;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            let mut changed = false;
            for s in 0..n {
                if alive[s] && !good[s] {
                    alive[s] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for s in 0..n {
            let kids: Vec<usize> = self.states[s].raw.iter().copied().filter(|&k| alive[k]).collect();
            let st = &mut self.states[s];
            st.alive = alive[s];
            st.kids = kids;
        }
        let mut thin: Vec<bool> = self.states.iter().map(|s| s.alive && s.kids.len() == 1).collect();
        loop {
            let mut changed = false;
            for s in 0..n {
                if thin[s] && !thin[self.states[s].kids[0]] {
                    thin[s] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut acc: Vec<bool> = (0..n).map(|s| alive[s] && !thin[s]).collect();
        loop {
            let mut changed = false;
            for s in 0..n {
                if acc[s] && !self.states[s].kids.iter().any(|&k| acc[k]) {
                    acc[s] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for s in 0..n {
            self.states[s].thin = thin[s];
            self.states[s].accumulating = acc[s];
        }
        if let Some(r) = self.root {
            if !alive[r] {
                self.root = None;
            }
        }
    }
}

/// Arena of sets. Single-threaded: caches use interior mutability.
pub struct Universe {
    entries: RefCell<Vec<Rc<Entry>>>,
    dedup: RefCell<HashMap<Kind, SetRef>>,
    cfg: Config,
}

impl Default for Universe {
    fn default() -> Self {
        Universe::new(Config::default())
    }
}

fn zermelo(k: u64) -> Hf {
    ZNat::new(k).value().clone()
}

fn pt_desc(p: Point, level: u32) -> Desc {
    match p {
        Point::Hf(h) if h.rank() <= level => Desc::Settled,
        p => Desc::Pt(p),
    }
}

fn points_desc(mut ps: Vec<Hf>, level: u32) -> Option<Desc> {
    ps.sort();
    ps.dedup();
    match ps.len() {
        0 => None,
        1 => Some(pt_desc(Point::Hf(ps.pop().unwrap()), level)),
        _ => Some(Desc::Points(ps)),
    }
}

fn mk_union(owner: SetRef, mut comps: Vec<(bool, Desc)>) -> Desc {
    comps.sort_by(|x, y| x.1.cmp(&y.1).then(x.0.cmp(&y.0)));
    comps.dedup_by(|x, y| x.1 == y.1);
    if comps.len() == 1 {
        return comps.pop().unwrap().1;
    }
    Desc::Union { owner, comps }
}

fn mk_inter(owner: SetRef, a: Desc, b: Desc) -> Desc {
    if a == b && matches!(a, Desc::Settled) {
        return a;
    }
    Desc::Inter { owner, a: Box::new(a), b: Box::new(b) }
}

fn mk_diff(owner: SetRef, b: Desc, a: Option<Desc>) -> Desc {
    match a {
        None => b,
        Some(a) => Desc::Diff { owner, b: Box::new(b), a: Some(Box::new(a)) },
    }
}

fn mk_cover(owner: SetRef, mut parts: Vec<Part>) -> Desc {
    if parts.is_empty() {
        return Desc::Settled;
    }
    parts.sort();
    Desc::Cover { owner, parts }
}

impl Universe {
    pub fn new(cfg: Config) -> Universe {
        Universe { entries: RefCell::new(Vec::new()), dedup: RefCell::new(HashMap::new()), cfg }
    }

    pub fn config(&self) -> Config {
        self.cfg
    }

    fn entry(&self, s: SetRef) -> Rc<Entry> {
        self.entries.borrow()[s.index()].clone()
    }

    fn add(&self, kind: Kind, description: String, horizon: u32, exact: bool, gen: Option<Generator>) -> SetRef {
        if gen.is_none() {
            if let Some(&s) = self.dedup.borrow().get(&kind) {
                return s;
            }
        }
        let mut entries = self.entries.borrow_mut();
        let s = SetRef(entries.len() as u32);
        entries.push(Rc::new(Entry {
            kind: kind.clone(),
            description,
            horizon,
            exact,
            gen,
            memo: RefCell::new(HashMap::new()),
            quotient: OnceCell::new(),
            levels: RefCell::new(Vec::new()),
        }));
        drop(entries);
        if !matches!(kind, Kind::Opaque(_)) {
            self.dedup.borrow_mut().insert(kind, s);
        }
        s
    }

    pub fn description(&self, s: SetRef) -> String {
        self.entry(s).description.clone()
    }

    pub fn is_exact(&self, s: SetRef) -> bool {
        self.entry(s).exact
    }

    pub fn rep_kind(&self, s: SetRef) -> RepKind {
        match self.entry(s).kind {
            Kind::Literal(_) => RepKind::HfLiteral,
            Kind::Empty | Kind::Infinity | Kind::Nat | Kind::Omega | Kind::PerfectPN | Kind::PairsA(_) => {
                RepKind::Builtin
            }
            Kind::Alias(_, ref d) if d == "PN" => RepKind::Builtin,
            Kind::Opaque(_) => RepKind::OpaqueStream,
            _ => RepKind::Combinator,
        }
    }

    pub(crate) fn resolve(&self, mut s: SetRef) -> SetRef {
        while let Kind::Alias(t, _) = self.entry(s).kind {
            s = t;
        }
        s
    }

    /// `Some(x)` when `s` is (an alias of) `pow(x)`.
    pub fn power_base(&self, s: SetRef) -> Option<SetRef> {
        match self.entry(self.resolve(s)).kind {
            Kind::Power(x) => Some(x),
            _ => None,
        }
    }

    pub(crate) fn horizon(&self, s: SetRef) -> u32 {
        self.entry(s).horizon
    }

    pub(crate) fn require_exact(&self, s: SetRef) -> Result<()> {
        if self.is_exact(s) {
            Ok(())
        } else {
            Err(SetError::UnsupportedOnOpaque(self.description(s)))
        }
    }

    // ---- constructors -------------------------------------------------

    pub fn literal(&self, h: Hf) -> SetRef {
        let horizon = h.rank() + 2;
        self.add(Kind::Literal(h.clone()), format!("hf\"{h}\""), horizon, true, None)
    }

    pub fn builtin(&self, b: Builtin) -> Result<SetRef> {
        Ok(match b {
            Builtin::Empty => self.add(Kind::Empty, "empty".into(), 1, true, None),
            Builtin::Infinity => self.add(Kind::Infinity, "inf".into(), 3, true, None),
            Builtin::N => self.add(Kind::Nat, "N".into(), 3, true, None),
            Builtin::Omega => self.add(Kind::Omega, "omega".into(), 3, true, None),
            Builtin::PerfectPN => self.add(Kind::PerfectPN, "PPN".into(), 3, true, None),
            Builtin::PowerN => {
                let n = self.builtin(Builtin::N)?;
                let p = self.power(n);
                self.alias(p, "PN")
            }
            Builtin::PairsA(0) => return Err(SetError::BadParameter("A(i) needs i >= 1".into())),
            Builtin::PairsA(i) => self.add(Kind::PairsA(i), format!("A({i})"), i + 3, true, None),
        })
    }

    fn alias(&self, target: SetRef, description: &str) -> SetRef {
        let e = self.entry(target);
        self.add(Kind::Alias(target, description.to_string()), description.to_string(), e.horizon, e.exact, None)
    }

    fn binary(&self, kind: Kind, name: &str, a: SetRef, b: SetRef, extra: u32) -> SetRef {
        let (ea, eb) = (self.entry(a), self.entry(b));
        let desc = format!("{name}({},{})", ea.description, eb.description);
        let horizon = ea.horizon.max(eb.horizon) + extra;
        self.add(kind, desc, horizon, ea.exact && eb.exact, None)
    }

    pub fn union(&self, a: SetRef, b: SetRef) -> SetRef {
        self.binary(Kind::Union(a, b), "union", a, b, 1)
    }

    pub fn intersection(&self, a: SetRef, b: SetRef) -> SetRef {
        self.binary(Kind::Inter(a, b), "inter", a, b, 1)
    }

    /// Closure of the elements of `b` that are not elements of `a`.
    pub fn rel_complement(&self, b: SetRef, a: SetRef) -> SetRef {
        self.binary(Kind::Diff { b, a }, "diff", b, a, 1)
    }

    pub fn pair(&self, a: SetRef, b: SetRef) -> SetRef {
        self.binary(Kind::Pair(a, b), "pair", a, b, 2)
    }

    pub fn ordered_pair(&self, a: SetRef, b: SetRef) -> SetRef {
        let inner = self.pair(self.pair(a, a), self.pair(a, b));
        let d = format!("opair({},{})", self.description(a), self.description(b));
        self.alias(inner, &d)
    }

    pub fn cartesian(&self, a: SetRef, b: SetRef) -> SetRef {
        self.binary(Kind::Cartesian(a, b), "prod", a, b, 3)
    }

    pub fn power(&self, a: SetRef) -> SetRef {
        let e = self.entry(a);
        self.add(Kind::Power(a), format!("pow({})", e.description), e.horizon + 2, e.exact, None)
    }

    /// `{1} × A_1 ∪ {2} × A_2 ∪ …` with Zermelo tags.
    pub fn sum_indexed(&self, parts: &[SetRef]) -> SetRef {
        let mut acc: Option<SetRef> = None;
        for (j, &a) in parts.iter().enumerate() {
            let tag = self.literal(Hf::singleton(zermelo(j as u64 + 1)));
            let term = self.cartesian(tag, a);
            acc = Some(match acc {
                None => term,
                Some(prev) => self.union(prev, term),
            });
        }
        let target = acc.unwrap_or_else(|| self.builtin(Builtin::Empty).expect("empty builtin"));
        let names: Vec<String> = parts.iter().map(|&p| self.description(p)).collect();
        self.alias(target, &format!("sum({})", names.join(",")))
    }

    /// `n × A`, with `n` the von Neumann numeral `{0, …, n−1}`.
    pub fn n_times(&self, n: u64, a: SetRef) -> SetRef {
        let lit = self.literal(NOrdinal::new(n).value().clone());
        let p = self.cartesian(lit, a);
        let d = format!("times({n},{})", self.description(a));
        self.alias(p, &d)
    }

    /// Wraps a generator `n ↦ F(n, A)`; coherence is checked lazily.
    pub fn opaque_stream<F: Fn(u32) -> Hf + 'static>(&self, name: &str, gen: F) -> SetRef {
        let id = self.entries.borrow().len();
        self.add(Kind::Opaque(id), name.to_string(), 0, false, Some(Rc::new(gen)))
    }

    pub(crate) fn derived(&self, a: SetRef) -> SetRef {
        let a = self.resolve(a);
        let e = self.entry(a);
        self.add(Kind::Derived(a), format!("derived({})", e.description), e.horizon + 1, e.exact, None)
    }

    pub(crate) fn along(&self, a: SetRef, labels: Vec<Hf>, what: &str) -> SetRef {
        let a = self.resolve(a);
        let e = self.entry(a);
        let n = labels.len() as u32;
        let d = format!("near({}, {what}, {})", e.description, n.saturating_sub(1));
        self.add(Kind::Along(a, labels), d, e.horizon + n + 2, e.exact, None)
    }

    // ---- approximations -----------------------------------------------

    /// `F(n, s)`.
    pub fn approx_of(&self, s: SetRef, n: u32) -> Result<Hf> {
        let e = self.entry(s);
        if let Some(h) = e.memo.borrow().get(&n) {
            return Ok(h.clone());
        }
        let h = if n == 0 {
            if let Some(g) = &e.gen {
                self.check_stream(s, g, 0)?;
            }
            Hf::empty()
        } else if let Some(g) = e.gen.clone() {
            self.check_stream(s, &g, n)?
        } else {
            match self.approx_formula(s, n)? {
                Some(h) => h,
                None => self.approx_tree(s, n)?,
            }
        };
        e.memo.borrow_mut().insert(n, h.clone());
        Ok(h)
    }

    fn check_stream(&self, s: SetRef, g: &Generator, n: u32) -> Result<Hf> {
        let e = self.entry(s);
        let h = g(n);
        if n == 0 {
            if !h.is_empty() {
                return Err(SetError::CoherenceViolation { n: 0, got: h.to_string(), want: "{}".into() });
            }
            return Ok(h);
        }
        let cached = e.memo.borrow().get(&(n - 1)).cloned();
        let prev = match cached {
            Some(p) => p,
            None => self.approx_of(s, n - 1)?,
        };
        let back = approx(n - 1, &h);
        if back != prev || h.rank() > n {
            return Err(SetError::CoherenceViolation { n: n - 1, got: back.to_string(), want: prev.to_string() });
        }
        Ok(h)
    }

    /// Closed-form rule when one applies to the set's outermost constructor.
    fn approx_formula(&self, s: SetRef, n: u32) -> Result<Option<Hf>> {
        let e = self.entry(s);
        let nonempty = |x: SetRef| -> Result<bool> { Ok(!self.approx_of(x, 1)?.is_empty()) };
        Ok(Some(match &e.kind {
            Kind::Literal(h) => approx(n, h),
            Kind::Empty => Hf::empty(),
            Kind::Infinity => zermelo(n as u64),
            Kind::Nat => Hf::from_elems((0..n as u64).map(zermelo)),
            Kind::Omega => NOrdinal::new(n as u64).value().clone(),
            Kind::PerfectPN => perfect_pn_approx(n),
            Kind::Alias(t, _) => self.approx_of(*t, n)?,
            Kind::Union(a, b) => self.approx_of(*a, n)?.union(&self.approx_of(*b, n)?),
            Kind::Pair(a, b) => Hf::pair(self.approx_of(*a, n - 1)?, self.approx_of(*b, n - 1)?),
            Kind::Cartesian(a, b) => {
                if !nonempty(*a)? || !nonempty(*b)? {
                    Hf::empty()
                } else if n == 1 {
                    Hf::singleton(Hf::empty())
                } else if n == 2 {
                    Hf::singleton(Hf::singleton(Hf::empty()))
                } else {
                    let (fa, fb) = (self.approx_of(*a, n - 2)?, self.approx_of(*b, n - 2)?);
                    if fa.len() as u64 * fb.len() as u64 > self.cfg.budget {
                        return Err(SetError::DepthBudgetExceeded { set: e.description.clone(), depth: n });
                    }
                    Hf::from_elems(
                        fa.elems()
                            .iter()
                            .flat_map(|u| fb.elems().iter().map(move |v| Hf::ordered_pair(u.clone(), v.clone()))),
                    )
                }
            }
            Kind::Power(a) => {
                let base = self.approx_of(*a, n - 1)?;
                if base.len() >= 63 || (1u64 << base.len()) > self.cfg.power_budget {
                    return Err(SetError::DepthBudgetExceeded { set: e.description.clone(), depth: n });
                }
                power_set(&base)
            }
            _ => return Ok(None),
        }))
    }

    /// `F(n, s)` read off the unfolded tree quotient: the labels of the
    /// level-`n−1` nodes.
    pub fn approx_tree(&self, s: SetRef, n: u32) -> Result<Hf> {
        let s = self.resolve(s);
        if n == 0 {
            return Ok(Hf::empty());
        }
        let level = self.level_nodes(s, n - 1)?;
        Ok(Hf::from_elems(level.into_iter().map(|(l, _)| l)))
    }

    fn level_nodes(&self, s: SetRef, n: u32) -> Result<Vec<(Hf, Desc)>> {
        let q = self.quotient(s)?;
        let e = self.entry(s);
        let Some(root) = q.root else { return Ok(Vec::new()) };
        {
            let mut lv = e.levels.borrow_mut();
            if lv.is_empty() {
                lv.push(vec![(Hf::empty(), q.states[root].desc.clone())]);
            }
        }
        loop {
            let have = e.levels.borrow().len() as u32;
            if have > n {
                return Ok(e.levels.borrow()[n as usize].clone());
            }
            let prev = e.levels.borrow()[(have - 1) as usize].clone();
            let mut next = Vec::new();
            for (label, d) in &prev {
                for (l, c) in self.children(d, have - 1, label)? {
                    let st = q
                        .lookup(&c, have)
                        .ok_or_else(|| SetError::QuotientMismatch(e.description.clone()))?;
                    if q.states[st].alive {
                        next.push((l, c));
                    }
                }
                if next.len() as u64 > self.cfg.budget {
                    return Err(SetError::DepthBudgetExceeded { set: e.description.clone(), depth: have + 1 });
                }
            }
            e.levels.borrow_mut().push(next);
        }
    }

    /// Detects an HF set. Opaque streams answer within `cap` levels only.
    pub fn is_hf(&self, s: SetRef) -> Result<bool> {
        let s = self.resolve(s);
        if let Kind::Literal(_) = self.entry(s).kind {
            return Ok(true);
        }
        self.require_exact(s)?;
        let q = self.quotient(s)?;
        // HF iff every infinite path eventually stays in settled states,
        // i.e. the live non-settled states carry no cycle.
        let live = q.live_states();
        let mut color = vec![0u8; q.states.len()];
        fn cyclic(q: &Quotient, s: usize, color: &mut [u8]) -> bool {
            if matches!(q.states[s].desc, Desc::Settled) {
                return false;
            }
            color[s] = 1;
            for &k in &q.states[s].kids {
                if color[k] == 1 || (color[k] == 0 && cyclic(q, k, color)) {
                    return true;
                }
            }
            color[s] = 2;
            false
        }
        Ok(!live.iter().any(|&st| color[st] == 0 && cyclic(&q, st, &mut color)))
    }

    /// The HF value of a set detected as HF.
    pub fn hf_value(&self, s: SetRef) -> Result<Option<Hf>> {
        let s = self.resolve(s);
        if let Kind::Literal(h) = &self.entry(s).kind {
            return Ok(Some(h.clone()));
        }
        if !self.is_hf(s)? {
            return Ok(None);
        }
        let mut n = 0;
        let mut cur = self.approx_of(s, 0)?;
        loop {
            let next = self.approx_of(s, n + 1)?;
            if next == cur {
                return Ok(Some(cur));
            }
            cur = next;
            n += 1;
        }
    }

    fn point_of(&self, x: SetRef) -> Result<Point> {
        if self.is_exact(x) {
            if let Some(h) = self.hf_value(x)? {
                return Ok(Point::Hf(h));
            }
        }
        Ok(Point::Set(self.resolve(x)))
    }

    // ---- quotients -----------------------------------------------------

    pub fn quotient(&self, s: SetRef) -> Result<Rc<Quotient>> {
        let s = self.resolve(s);
        let e = self.entry(s);
        self.require_exact(s)?;
        if let Some(q) = e.quotient.get() {
            return q.clone();
        }
        let built = self.build_quotient(s).map(Rc::new);
        let _ = e.quotient.set(built.clone());
        built
    }

    fn root_of(&self, s: SetRef) -> Result<Option<Desc>> {
        let q = self.quotient(s)?;
        Ok(q.root.map(|r| q.states[r].desc.clone()))
    }

    fn root_desc(&self, s: SetRef) -> Result<Option<Desc>> {
        let e = self.entry(s);
        Ok(match &e.kind {
            Kind::Literal(h) => points_desc(h.elems().to_vec(), 0),
            Kind::Empty => None,
            Kind::Infinity => Some(Desc::InfTail),
            Kind::Nat => Some(Desc::NatTail),
            Kind::Omega => Some(Desc::OrdTail),
            Kind::PerfectPN => Some(Desc::PerfRoot),
            Kind::PairsA(i) => Some(Desc::ARoot(*i)),
            Kind::Union(a, b) => {
                let comps: Vec<(bool, Desc)> = [(false, self.root_of(*a)?), (true, self.root_of(*b)?)]
                    .into_iter()
                    .filter_map(|(side, d)| d.map(|d| (side, d)))
                    .collect();
                if comps.is_empty() {
                    None
                } else {
                    Some(mk_union(s, comps))
                }
            }
            Kind::Inter(a, b) => match (self.root_of(*a)?, self.root_of(*b)?) {
                (Some(x), Some(y)) => Some(mk_inter(s, x, y)),
                _ => None,
            },
            Kind::Diff { b, a } => match self.root_of(*b)? {
                Some(rb) => Some(mk_diff(s, rb, self.root_of(*a)?)),
                None => None,
            },
            Kind::Pair(a, b) => {
                let comps = vec![
                    (false, pt_desc(self.point_of(*a)?, 0)),
                    (true, pt_desc(self.point_of(*b)?, 0)),
                ];
                Some(mk_union(s, comps))
            }
            Kind::Cartesian(a, b) => match (self.root_of(*a)?, self.root_of(*b)?) {
                (Some(_), Some(_)) => Some(Desc::PrePair { owner: s, step: 0 }),
                _ => None,
            },
            Kind::Power(_) => Some(Desc::PowRoot { owner: s }),
            Kind::Derived(a) => {
                let q = self.quotient(*a)?;
                q.root.filter(|&r| q.states[r].accumulating).map(|r| Desc::Filter {
                    owner: s,
                    inner: Box::new(q.states[r].desc.clone()),
                })
            }
            Kind::Along(a, _) => self.root_of(*a)?.map(|d| Desc::Along { owner: s, inner: Box::new(d) }),
            Kind::Alias(t, _) => self.root_desc(*t)?,
            Kind::Opaque(_) => return Err(SetError::UnsupportedOnOpaque(e.description.clone())),
        })
    }

    fn build_quotient(&self, s: SetRef) -> Result<Quotient> {
        let e = self.entry(s);
        let horizon = e.horizon;
        let mut q = Quotient { horizon, ..Default::default() };
        let Some(root) = self.root_desc(s)? else { return Ok(q) };
        let mut queue = VecDeque::new();
        let add = |q: &mut Quotient, d: Desc, level: u32, label: Hf, queue: &mut VecDeque<usize>| -> Result<usize> {
            let key = (d, level.min(horizon));
            if let Some(&i) = q.index.get(&key) {
                return Ok(i);
            }
            if q.states.len() as u64 >= self.cfg.budget {
                return Err(SetError::StateBudgetExceeded { set: e.description.clone(), budget: self.cfg.budget });
            }
            let i = q.states.len();
            q.states.push(QState {
                desc: key.0.clone(),
                level,
                label,
                raw: Vec::new(),
                kids: Vec::new(),
                alive: false,
                thin: false,
                accumulating: false,
            });
            q.index.insert(key, i);
            queue.push_back(i);
            Ok(i)
        };
        let r = add(&mut q, root, 0, Hf::empty(), &mut queue)?;
        q.root = Some(r);
        while let Some(i) = queue.pop_front() {
            let (d, level, label) = {
                let st = &q.states[i];
                (st.desc.clone(), st.level, st.label.clone())
            };
            let mut raw = Vec::new();
            for (l, c) in self.children(&d, level, &label)? {
                raw.push(add(&mut q, c, level + 1, l, &mut queue)?);
            }
            q.states[i].raw = raw;
        }
        q.finish();
        Ok(q)
    }

    fn alive_in(&self, s: SetRef, d: &Desc, level: u32) -> Result<bool> {
        match self.entry(s).kind {
            Kind::Literal(_)
            | Kind::Empty
            | Kind::Infinity
            | Kind::Nat
            | Kind::Omega
            | Kind::PerfectPN
            | Kind::PairsA(_) => Ok(true),
            _ => {
                let q = self.quotient(s)?;
                let st = q.lookup(d, level).ok_or_else(|| SetError::QuotientMismatch(self.description(s)))?;
                Ok(q.states[st].alive)
            }
        }
    }

    /// Children of `d` taken as a node of `s`'s tree, dead ones removed.
    pub(crate) fn kids_in(&self, s: SetRef, d: &Desc, n: u32, label: &Hf) -> Result<Vec<(Hf, Desc)>> {
        let s = self.resolve(s);
        let mut out = Vec::new();
        for (l, c) in self.children(d, n, label)? {
            if self.alive_in(s, &c, n + 1)? {
                out.push((l, c));
            }
        }
        Ok(out)
    }

    fn operands(&self, owner: SetRef) -> (SetRef, SetRef) {
        match self.entry(owner).kind {
            Kind::Union(a, b)
            | Kind::Inter(a, b)
            | Kind::Pair(a, b)
            | Kind::Cartesian(a, b)
            | Kind::Diff { a: b, b: a } => (a, b),
            Kind::Power(a) | Kind::Derived(a) | Kind::Along(a, _) => (a, a),
            _ => unreachable!("descriptor owner without operands"),
        }
    }

    /// Children of node `(n, label)` described by `d`, at level `n+1`.
    pub(crate) fn children(&self, d: &Desc, n: u32, label: &Hf) -> Result<Vec<(Hf, Desc)>> {
        Ok(match d {
            Desc::Settled => vec![(label.clone(), Desc::Settled)],
            Desc::Pt(Point::Hf(p)) => vec![(approx(n + 1, p), pt_desc(Point::Hf(p.clone()), n + 1))],
            Desc::Pt(Point::Set(x)) => vec![(self.approx_of(*x, n + 1)?, d.clone())],
            Desc::Points(ps) => {
                let mut groups: BTreeMap<Hf, Vec<Hf>> = BTreeMap::new();
                for p in ps {
                    groups.entry(approx(n + 1, p)).or_default().push(p.clone());
                }
                groups
                    .into_iter()
                    .map(|(l, g)| (l, points_desc(g, n + 1).expect("nonempty group")))
                    .collect()
            }
            Desc::InfTail => vec![(Hf::singleton(label.clone()), Desc::InfTail)],
            Desc::NatTail => vec![(label.clone(), Desc::Settled), (Hf::singleton(label.clone()), Desc::NatTail)],
            Desc::OrdTail => vec![
                (label.clone(), Desc::Settled),
                (label.union(&Hf::singleton(label.clone())), Desc::OrdTail),
            ],
            Desc::PerfRoot => vec![(Hf::singleton(Hf::empty()), Desc::PerfTail)],
            Desc::PerfTail => {
                let top = label.elems().last().expect("perfect-tail label is nonempty").clone();
                let next = Hf::singleton(top.clone());
                let keep = Hf::from_elems(label.elems().iter().cloned().chain([next.clone()]));
                let drop = Hf::from_elems(label.elems().iter().filter(|&e| *e != top).cloned().chain([next]));
                vec![(drop, Desc::PerfTail), (keep, Desc::PerfTail)]
            }
            Desc::ARoot(i) => vec![(Hf::singleton(Hf::empty()), Desc::ACollapsed(i - 1))],
            Desc::ACollapsed(rem) => {
                let zm = label.elems()[0].clone();
                let zn = Hf::singleton(zm.clone());
                let mut v = vec![(Hf::pair(zm, zn.clone()), Desc::ASplit(*rem))];
                if *rem >= 1 {
                    v.push((Hf::singleton(zn), Desc::ACollapsed(rem - 1)));
                }
                v
            }
            Desc::ASplit(gap) => {
                let (zj, top) = (label.elems()[0].clone(), label.elems()[1].clone());
                let mut v = Vec::new();
                if *gap == 0 {
                    v.push((label.clone(), Desc::Settled));
                }
                v.push((Hf::pair(zj, Hf::singleton(top)), Desc::ASplit(gap.saturating_sub(1))));
                v
            }
            Desc::PrePair { owner, step: 0 } => {
                vec![(Hf::singleton(Hf::empty()), Desc::PrePair { owner: *owner, step: 1 })]
            }
            Desc::PrePair { owner, .. } => {
                let (a, b) = self.operands(*owner);
                let (ra, rb) = (self.root_of(a)?, self.root_of(b)?);
                let (Some(ra), Some(rb)) = (ra, rb) else { return Ok(Vec::new()) };
                let l = Hf::ordered_pair(Hf::empty(), Hf::empty());
                vec![(l, Desc::OPairs { owner: *owner, a: Box::new(ra), b: Box::new(rb) })]
            }
            Desc::OPairs { owner, a: da, b: db } => {
                let (a, b) = self.operands(*owner);
                let (u, v) = label.decode_ordered_pair().expect("product label is a pair");
                let ka = self.kids_in(a, da, n - 2, &u)?;
                let kb = self.kids_in(b, db, n - 2, &v)?;
                if ka.len() as u64 * kb.len() as u64 > self.cfg.budget {
                    return Err(SetError::DepthBudgetExceeded { set: self.description(*owner), depth: n + 1 });
                }
                let mut out = Vec::with_capacity(ka.len() * kb.len());
                for (lu, cu) in &ka {
                    for (lv, cv) in &kb {
                        let l = Hf::ordered_pair(lu.clone(), lv.clone());
                        let c = if matches!((cu, cv), (Desc::Settled, Desc::Settled)) {
                            Desc::Settled
                        } else {
                            Desc::OPairs { owner: *owner, a: Box::new(cu.clone()), b: Box::new(cv.clone()) }
                        };
                        out.push((l, c));
                    }
                }
                out
            }
            Desc::PowRoot { owner } => {
                let (base, _) = self.operands(*owner);
                let mut v = vec![(Hf::empty(), Desc::Settled)];
                if let Some(r) = self.root_of(base)? {
                    let parts = if matches!(r, Desc::Settled) {
                        Vec::new()
                    } else {
                        vec![Part { label: Hf::empty(), desc: r }]
                    };
                    v.push((Hf::singleton(Hf::empty()), mk_cover(*owner, parts)));
                }
                v
            }
            Desc::Cover { owner, parts } => self.cover_children(*owner, parts, n, label)?,
            Desc::Union { owner, comps } => {
                let (a, b) = self.operands(*owner);
                let pair = matches!(self.entry(*owner).kind, Kind::Pair(..));
                let mut groups: BTreeMap<Hf, Vec<(bool, Desc)>> = BTreeMap::new();
                for (side, c) in comps {
                    let ks = if pair {
                        self.children(c, n, label)?
                    } else {
                        self.kids_in(if *side { b } else { a }, c, n, label)?
                    };
                    for (l, k) in ks {
                        groups.entry(l).or_default().push((*side, k));
                    }
                }
                groups.into_iter().map(|(l, g)| (l, mk_union(*owner, g))).collect()
            }
            Desc::Inter { owner, a: da, b: db } => {
                let (a, b) = self.operands(*owner);
                let kb: HashMap<Hf, Desc> = self.kids_in(b, db, n, label)?.into_iter().collect();
                self.kids_in(a, da, n, label)?
                    .into_iter()
                    .filter_map(|(l, ca)| kb.get(&l).map(|cb| (l, mk_inter(*owner, ca, cb.clone()))))
                    .collect()
            }
            Desc::Diff { owner, b: db, a: da } => {
                let (b, a) = self.operands(*owner);
                let ka: HashMap<Hf, Desc> = match da {
                    Some(da) => self.kids_in(a, da, n, label)?.into_iter().collect(),
                    None => HashMap::new(),
                };
                self.kids_in(b, db, n, label)?
                    .into_iter()
                    .map(|(l, cb)| {
                        let ca = ka.get(&l).cloned();
                        (l, mk_diff(*owner, cb, ca))
                    })
                    .collect()
            }
            Desc::Filter { owner, inner } => {
                let (a, _) = self.operands(*owner);
                let q = self.quotient(a)?;
                let mut out = Vec::new();
                for (l, c) in self.children(inner, n, label)? {
                    let st = q.lookup(&c, n + 1).ok_or_else(|| SetError::QuotientMismatch(self.description(a)))?;
                    if q.states[st].accumulating {
                        out.push((l, Desc::Filter { owner: *owner, inner: Box::new(c) }));
                    }
                }
                out
            }
            Desc::Along { owner, inner } => {
                let (a, _) = self.operands(*owner);
                let Kind::Along(_, labels) = &self.entry(*owner).kind else { unreachable!() };
                let target = labels.get(n as usize + 1).cloned();
                self.kids_in(a, inner, n, label)?
                    .into_iter()
                    .filter(|(l, _)| target.as_ref().map_or(true, |t| t == l))
                    .map(|(l, c)| (l, Desc::Along { owner: *owner, inner: Box::new(c) }))
                    .collect()
            }
        })
    }

    fn cover_children(&self, owner: SetRef, parts: &[Part], n: u32, label: &Hf) -> Result<Vec<(Hf, Desc)>> {
        let (base, _) = self.operands(owner);
        let part_labels: Vec<&Hf> = parts.iter().map(|p| &p.label).collect();
        let settled: Vec<Hf> = label.elems().iter().filter(|e| !part_labels.contains(e)).cloned().collect();
        let mut options: Vec<Vec<(Hf, Desc)>> = Vec::with_capacity(parts.len());
        let mut total: u64 = 1;
        for p in parts {
            let ks = self.kids_in(base, &p.desc, n - 1, &p.label)?;
            let c = if ks.len() >= 63 { u64::MAX } else { (1u64 << ks.len()) - 1 };
            total = total.saturating_mul(c);
            if total > self.cfg.budget {
                return Err(SetError::DepthBudgetExceeded { set: self.description(owner), depth: n + 1 });
            }
            options.push(ks);
        }
        let mut acc: Vec<(Vec<Hf>, Vec<Part>)> = vec![(settled, Vec::new())];
        for ks in &options {
            let mut next = Vec::new();
            for mask in 1u64..(1u64 << ks.len()) {
                for (labels, ps) in &acc {
                    let (mut labels, mut ps) = (labels.clone(), ps.clone());
                    for (i, (l, c)) in ks.iter().enumerate() {
                        if mask >> i & 1 == 1 {
                            labels.push(l.clone());
                            if !matches!(c, Desc::Settled) {
                                ps.push(Part { label: l.clone(), desc: c.clone() });
                            }
                        }
                    }
                    next.push((labels, ps));
                }
            }
            acc = next;
        }
        Ok(acc
            .into_iter()
            .map(|(labels, ps)| (Hf::from_elems(labels), mk_cover(owner, ps)))
            .collect())
    }

    // ---- relations -----------------------------------------------------

    /// Is every element of `x` an element of `y`? Greatest-fixpoint
    /// simulation over pairs of quotient states.
    fn simulates(&self, x: SetRef, y: SetRef) -> Result<bool> {
        let (x, y) = (self.resolve(x), self.resolve(y));
        let (qx, qy) = (self.quotient(x)?, self.quotient(y)?);
        let (Some(rx), ry) = (qx.root, qy.root) else { return Ok(true) };
        let Some(ry) = ry else { return Ok(false) };
        let horizon = self.horizon(x).max(self.horizon(y)) + 2;
        struct P {
            dx: Desc,
            dy: Desc,
            level: u32,
            label: Hf,
            next: Vec<Option<usize>>,
        }
        let mut pairs: Vec<P> = Vec::new();
        let mut index: HashMap<(usize, usize, u32), usize> = HashMap::new();
        let mut queue = VecDeque::new();
        index.insert((rx, ry, 0), 0);
        pairs.push(P {
            dx: qx.states[rx].desc.clone(),
            dy: qy.states[ry].desc.clone(),
            level: 0,
            label: Hf::empty(),
            next: Vec::new(),
        });
        queue.push_back(0);
        while let Some(i) = queue.pop_front() {
            let (dx, dy, level, label) = {
                let p = &pairs[i];
                (p.dx.clone(), p.dy.clone(), p.level, p.label.clone())
            };
            let ky: HashMap<Hf, Desc> = self.kids_in(y, &dy, level, &label)?.into_iter().collect();
            let mut next = Vec::new();
            for (l, cx) in self.kids_in(x, &dx, level, &label)? {
                let Some(cy) = ky.get(&l) else {
                    next.push(None);
                    continue;
                };
                let sx = qx.lookup(&cx, level + 1).ok_or_else(|| SetError::QuotientMismatch(self.description(x)))?;
                let sy = qy.lookup(cy, level + 1).ok_or_else(|| SetError::QuotientMismatch(self.description(y)))?;
                let key = (sx, sy, (level + 1).min(horizon));
                let j = match index.get(&key) {
                    Some(&j) => j,
                    None => {
                        if pairs.len() as u64 >= self.cfg.budget {
                            return Err(SetError::StateBudgetExceeded {
                                set: format!("{} vs {}", self.description(x), self.description(y)),
                                budget: self.cfg.budget,
                            });
                        }
                        let j = pairs.len();
                        pairs.push(P { dx: cx, dy: cy.clone(), level: level + 1, label: l, next: Vec::new() });
                        index.insert(key, j);
                        queue.push_back(j);
                        j
                    }
                };
                next.push(Some(j));
            }
            pairs[i].next = next;
        }
        let mut good = vec![true; pairs.len()];
        loop {
            let mut changed = false;
            for i in 0..pairs.len() {
                if good[i] && pairs[i].next.iter().any(|j| j.map_or(true, |j| !good[j])) {
                    good[i] = false;
                    changed = true;
                }
            }
            if !changed {
                return Ok(good[0]);
            }
        }
    }

    fn first_divergence<P>(&self, mut differs: P) -> Result<Option<u32>>
    where
        P: FnMut(u32) -> Result<bool>,
    {
        for n in 0..=self.cfg.witness_cap {
            match differs(n) {
                Ok(true) => return Ok(Some(n)),
                Ok(false) => {}
                Err(SetError::DepthBudgetExceeded { .. }) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
        Ok(None)
    }

    fn member_fails_at(&self, x: SetRef, a: SetRef, n: u32) -> Result<bool> {
        Ok(!self.approx_of(a, n + 1)?.contains(&self.approx_of(x, n)?))
    }

    /// `x ∈ a`.
    pub fn member_in(&self, x: SetRef, a: SetRef, mode: Mode) -> Result<Truth> {
        match mode {
            Mode::Exact => {
                self.require_exact(x)?;
                self.require_exact(a)?;
                let single = self.pair(x, x);
                if self.simulates(single, a)? {
                    Ok(Truth::True)
                } else {
                    let w = self.first_divergence(|n| self.member_fails_at(x, a, n))?;
                    Ok(Truth::False { witness: w })
                }
            }
            Mode::Bounded(depth) => {
                for n in 0..=depth {
                    if self.member_fails_at(x, a, n)? {
                        return Ok(Truth::False { witness: Some(n) });
                    }
                }
                Ok(Truth::ConsistentUpTo(depth))
            }
        }
    }

    pub fn equal_sets(&self, a: SetRef, b: SetRef, mode: Mode) -> Result<Truth> {
        let differs = |n| Ok(self.approx_of(a, n)? != self.approx_of(b, n)?);
        match mode {
            Mode::Exact => {
                self.require_exact(a)?;
                self.require_exact(b)?;
                if self.simulates(a, b)? && self.simulates(b, a)? {
                    Ok(Truth::True)
                } else {
                    Ok(Truth::False { witness: self.first_divergence(differs)? })
                }
            }
            Mode::Bounded(depth) => {
                for n in 0..=depth {
                    if differs(n)? {
                        return Ok(Truth::False { witness: Some(n) });
                    }
                }
                Ok(Truth::ConsistentUpTo(depth))
            }
        }
    }

    /// `a ⊆ b`, decided exactly.
    pub fn subset_of(&self, a: SetRef, b: SetRef) -> Result<bool> {
        self.require_exact(a)?;
        self.require_exact(b)?;
        self.simulates(a, b)
    }

    /// Equality of the sets at the limit depth: with `F(∞, A) = A` the
    /// infinite-depth approximation is the set itself.
    pub fn approx_at_infinity(&self, s: SetRef) -> SetRef {
        s
    }
}

impl fmt::Debug for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Universe").field("sets", &self.entries.borrow().len()).finish()
    }
}

fn perfect_pn_approx(n: u32) -> Hf {
    // Level-(n−1) labels: subsets of {0..n−2} containing n−2.
    match n {
        0 => Hf::empty(),
        1 => Hf::singleton(Hf::empty()),
        _ => {
            let top = zermelo(n as u64 - 2);
            let rest: Vec<Hf> = (0..n as u64 - 2).map(zermelo).collect();
            let sub = power_set(&Hf::from_elems(rest));
            Hf::from_elems(sub.elems().iter().map(|s| Hf::from_elems(s.elems().iter().cloned().chain([top.clone()]))))
        }
    }
}

pub(crate) fn power_set(a: &Hf) -> Hf {
    let el = a.elems();
    Hf::from_elems(
        (0u64..(1u64 << el.len())).map(|m| Hf::from_elems((0..el.len()).filter(|i| m >> i & 1 == 1).map(|i| el[i].clone()))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hf_kernel::parse;

    #[test]
    fn nat_approximations() {
        let u = Universe::default();
        let n = u.builtin(Builtin::N).unwrap();
        assert_eq!(u.approx_of(n, 3).unwrap(), parse("{{}{{}}{{{}}}}").unwrap());
        for k in 0..8 {
            assert_eq!(u.approx_tree(n, k).unwrap(), u.approx_of(n, k).unwrap());
        }
    }

    #[test]
    fn inf_is_its_own_element() {
        let u = Universe::default();
        let inf = u.builtin(Builtin::Infinity).unwrap();
        assert_eq!(u.member_in(inf, inf, Mode::Exact).unwrap(), Truth::True);
        let n = u.builtin(Builtin::N).unwrap();
        assert_eq!(u.member_in(inf, n, Mode::Exact).unwrap(), Truth::True);
    }

    #[test]
    fn n_differs_from_omega_at_three() {
        let u = Universe::default();
        let n = u.builtin(Builtin::N).unwrap();
        let w = u.builtin(Builtin::Omega).unwrap();
        assert_eq!(u.equal_sets(n, w, Mode::Exact).unwrap(), Truth::False { witness: Some(3) });
    }

    #[test]
    fn pairs_a1_tree_matches_closed_set() {
        let u = Universe::default();
        let a1 = u.builtin(Builtin::PairsA(1)).unwrap();
        let z = |k| zermelo(k);
        // F(4, A_1) = {F(3, {0,k})} = {{0,1}, {0,2}}.
        let want = Hf::from_elems([Hf::pair(z(0), z(1)), Hf::pair(z(0), z(2))]);
        assert_eq!(u.approx_of(a1, 4).unwrap(), want);
        assert_eq!(u.approx_of(a1, 3).unwrap(), Hf::singleton(Hf::pair(z(0), z(1))));
        assert!(u.builtin(Builtin::PairsA(0)).is_err());
    }

    #[test]
    fn opaque_coherence() {
        let u = Universe::default();
        let s = u.opaque_stream("bad", |n| match n {
            0 => Hf::empty(),
            1 | 2 => parse("{{}}").unwrap(),
            _ => parse("{{{{}}}}").unwrap(),
        });
        assert!(u.approx_of(s, 2).is_ok());
        assert!(matches!(u.approx_of(s, 3), Err(SetError::CoherenceViolation { n: 2, .. })));
        assert!(matches!(u.subset_of(s, s), Err(SetError::UnsupportedOnOpaque(_))));
    }
}
