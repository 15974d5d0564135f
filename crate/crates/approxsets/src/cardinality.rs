//! Cardinality of quotient-backed sets.
//!
//! Sets with a perfect subset all have the cardinality of `P(ω)`; the others
//! are well-orderable and compare by Cantor–Bendixson `(rank, degree)`,
//! lexicographically. The counting measure `≤_q` is coarser: every infinite
//! set has size ω.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::set_rep::{SetRef, Universe};
use crate::topology::{self, TopologyError, DEFAULT_RANK_CAP, PATH_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CardError {
    #[error(transparent)]
    Topo(#[from] TopologyError),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("no relation certified within horizon {horizon}")]
    HorizonInconclusive { horizon: u32 },
    #[error("undefined case: {0}")]
    UndefinedCase(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(String),
}

impl From<crate::set_rep::SetError> for CardError {
    fn from(e: crate::set_rep::SetError) -> Self {
        CardError::Topo(e.into())
    }
}

pub type Result<T> = std::result::Result<T, CardError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Less,
    Equal,
    Greater,
}

impl Relation {
    pub fn from_ordering(o: Ordering) -> Relation {
        match o {
            Ordering::Less => Relation::Less,
            Ordering::Equal => Relation::Equal,
            Ordering::Greater => Relation::Greater,
        }
    }

    pub fn reverse(self) -> Relation {
        match self {
            Relation::Less => Relation::Greater,
            Relation::Equal => Relation::Equal,
            Relation::Greater => Relation::Less,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Less => "Less",
            Relation::Equal => "Equal",
            Relation::Greater => "Greater",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evidence {
    BothContinuum,
    PerfectVsWellOrdered,
    RankDegree { rank_a: u32, deg_a: u64, rank_b: u32, deg_b: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CardinalityVerdict {
    pub relation: Relation,
    pub evidence: Evidence,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    Finite(u64),
    WellOrderedInfinite { rank: u32, degree: u64 },
    Continuum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cofinality {
    None,
    Two,
    Omega,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CardinalClass {
    pub class: Class,
    /// Every set here is a cardinal under a suitable arrangement, or is not
    /// well-orderable at all.
    pub is_cardinal: bool,
    pub is_limit: bool,
    pub cofinality: Cofinality,
    pub regular: bool,
    pub strong_limit: bool,
    pub inaccessible: bool,
    /// Always false: such cardinals do not exist.
    pub strongly_inaccessible: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Size {
    Finite(u64),
    OmegaSize,
}

/// Cardinal invariant of one set: `None` for the continuum class.
fn invariant(u: &Universe, a: SetRef, rank_cap: u32) -> Result<Option<(u32, u64)>> {
    if topology::contains_perfect_subtree(u, a)? {
        return Ok(None);
    }
    Ok(Some(topology::cb_rank_degree(u, a, rank_cap)?))
}

pub fn compare_cardinality(u: &Universe, a: SetRef, b: SetRef) -> Result<CardinalityVerdict> {
    compare_with_cap(u, a, b, DEFAULT_RANK_CAP)
}

pub fn compare_with_cap(u: &Universe, a: SetRef, b: SetRef, rank_cap: u32) -> Result<CardinalityVerdict> {
    let (ia, ib) = (invariant(u, a, rank_cap)?, invariant(u, b, rank_cap)?);
    Ok(match (ia, ib) {
        (None, None) => CardinalityVerdict { relation: Relation::Equal, evidence: Evidence::BothContinuum },
        (None, Some(_)) => {
            CardinalityVerdict { relation: Relation::Greater, evidence: Evidence::PerfectVsWellOrdered }
        }
        (Some(_), None) => CardinalityVerdict { relation: Relation::Less, evidence: Evidence::PerfectVsWellOrdered },
        (Some((rank_a, deg_a)), Some((rank_b, deg_b))) => CardinalityVerdict {
            relation: Relation::from_ordering((rank_a, deg_a).cmp(&(rank_b, deg_b))),
            evidence: Evidence::RankDegree { rank_a, deg_a, rank_b, deg_b },
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LawCheck {
    pub observed: Relation,
    pub expected: Relation,
}

impl LawCheck {
    pub fn holds(&self) -> bool {
        self.observed == self.expected
    }
}

/// Relation of `a + b` to `b`, given `a ≤_c b`: equal when `a` has smaller
/// rank, greater when the ranks agree.
pub fn sum_cardinality_law(u: &Universe, a: SetRef, b: SetRef) -> Result<LawCheck> {
    let (Some((ra, _)), Some((rb, _))) = (invariant(u, a, DEFAULT_RANK_CAP)?, invariant(u, b, DEFAULT_RANK_CAP)?)
    else {
        return Err(CardError::PreconditionViolated("both sets must be well-orderable".into()));
    };
    if compare_cardinality(u, a, b)?.relation == Relation::Greater {
        return Err(CardError::PreconditionViolated(format!(
            "{} is of greater cardinality than {}",
            u.description(a),
            u.description(b)
        )));
    }
    let s = u.sum_indexed(&[a, b]);
    let observed = compare_cardinality(u, s, b)?.relation;
    let expected = if ra < rb { Relation::Equal } else { Relation::Greater };
    Ok(LawCheck { observed, expected })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProductReport {
    pub sum: CardinalityVerdict,
    pub check: LawCheck,
}

/// `a + b <_c a × b` for infinite well-orderable `a`, `b`.
pub fn product_laws_check(u: &Universe, a: SetRef, b: SetRef) -> Result<ProductReport> {
    for s in [a, b] {
        match invariant(u, s, DEFAULT_RANK_CAP)? {
            Some((r, _)) if r > 0 => {}
            _ => {
                return Err(CardError::PreconditionViolated(format!(
                    "{} must be infinite and well-orderable",
                    u.description(s)
                )))
            }
        }
    }
    let sum = u.sum_indexed(&[a, b]);
    let prod = u.cartesian(a, b);
    let v = compare_cardinality(u, sum, prod)?;
    Ok(ProductReport { sum: v, check: LawCheck { observed: v.relation, expected: Relation::Less } })
}

/// Symbolic classifier for products with infinitely many factors: `pow(x)`
/// (that is `2^x`) with `x` infinite has the cardinality of `P(ω)`.
pub fn infinite_product_is_continuum(u: &Universe, s: SetRef) -> Result<bool> {
    match u.power_base(s) {
        Some(x) => Ok(size_of(u, x)? == Size::OmegaSize),
        None => Ok(false),
    }
}

pub fn classify_cardinal(u: &Universe, a: SetRef) -> Result<CardinalClass> {
    classify_with_cap(u, a, DEFAULT_RANK_CAP)
}

pub fn classify_with_cap(u: &Universe, a: SetRef, rank_cap: u32) -> Result<CardinalClass> {
    let class = match invariant(u, a, rank_cap)? {
        None => Class::Continuum,
        Some((0, n)) => Class::Finite(n),
        Some((rank, degree)) => Class::WellOrderedInfinite { rank, degree },
    };
    Ok(flags(class))
}

fn flags(class: Class) -> CardinalClass {
    let base = CardinalClass {
        class,
        is_cardinal: true,
        is_limit: false,
        cofinality: Cofinality::None,
        regular: false,
        strong_limit: false,
        inaccessible: false,
        strongly_inaccessible: false,
    };
    match class {
        Class::Finite(n) => CardinalClass {
            cofinality: if n >= 2 { Cofinality::Two } else { Cofinality::None },
            regular: n <= 2,
            ..base
        },
        Class::WellOrderedInfinite { rank, degree } => {
            let omega = (rank, degree) == (1, 1);
            CardinalClass {
                is_limit: degree == 1,
                cofinality: if degree == 1 { Cofinality::Omega } else { Cofinality::Two },
                regular: omega,
                strong_limit: omega,
                ..base
            }
        }
        Class::Continuum => CardinalClass { is_limit: true, regular: true, inaccessible: true, ..base },
    }
}

/// A finite N-ordinal or ω.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrdVal {
    Fin(u64),
    Omega,
}

impl fmt::Display for OrdVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrdVal::Fin(n) => write!(f, "{n}"),
            OrdVal::Omega => f.write_str("omega"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrdOp {
    Add,
    Mul,
    Pow,
}

/// Ordinal arithmetic on `ω + 1`, where ω absorbs everything it touches.
pub fn nordinal_arith_with_omega(op: OrdOp, a: OrdVal, b: OrdVal) -> Result<OrdVal> {
    use OrdVal::*;
    let overflow = || CardError::Overflow(format!("{a} {op:?} {b}"));
    Ok(match (op, a, b) {
        (OrdOp::Add, Fin(x), Fin(y)) => Fin(x.checked_add(y).ok_or_else(overflow)?),
        (OrdOp::Add, _, _) => Omega,
        (OrdOp::Mul, Fin(x), Fin(y)) => Fin(x.checked_mul(y).ok_or_else(overflow)?),
        (OrdOp::Mul, _, Fin(0)) | (OrdOp::Mul, Fin(0), _) => Fin(0),
        (OrdOp::Mul, _, _) => Omega,
        (OrdOp::Pow, Fin(x), Fin(y)) => {
            let e = u32::try_from(y).map_err(|_| overflow())?;
            Fin(x.checked_pow(e).ok_or_else(overflow)?)
        }
        (OrdOp::Pow, _, Fin(0)) => Fin(1),
        (OrdOp::Pow, Omega, _) => Omega,
        (OrdOp::Pow, Fin(1), Omega) => Fin(1),
        (OrdOp::Pow, Fin(0), Omega) => {
            return Err(CardError::UndefinedCase(
                "0^omega: the supremum rule gives 1 (from 0^0) while the usual convention gives 0".into(),
            ))
        }
        (OrdOp::Pow, Fin(_), Omega) => Omega,
    })
}

/// Size under the counting measure: the stabilised element count of the
/// approximations, or ω when they grow without bound.
pub fn size_of(u: &Universe, a: SetRef) -> Result<Size> {
    let d = topology::derived_set(u, a)?;
    if !u.quotient(d)?.is_empty() {
        return Ok(Size::OmegaSize);
    }
    Ok(match topology::path_total(u, a, PATH_CAP)? {
        Some(n) => Size::Finite(n),
        None => Size::OmegaSize,
    })
}

/// Counting-measure comparison. Exact sets are decided from [`size_of`];
/// opaque streams fall back to comparing element counts of `F(i, ·)` for
/// `i ≤ horizon` against `F(j, ·)` for `j ≤ 2·horizon`.
pub fn counting_compare(u: &Universe, a: SetRef, b: SetRef, horizon: u32) -> Result<Relation> {
    if u.is_exact(a) && u.is_exact(b) {
        return Ok(match (size_of(u, a)?, size_of(u, b)?) {
            (Size::Finite(x), Size::Finite(y)) => Relation::from_ordering(x.cmp(&y)),
            (Size::Finite(_), Size::OmegaSize) => Relation::Less,
            (Size::OmegaSize, Size::Finite(_)) => Relation::Greater,
            (Size::OmegaSize, Size::OmegaSize) => Relation::Equal,
        });
    }
    let counts = |s: SetRef, top: u32| -> Result<Vec<usize>> {
        (0..=top).map(|i| Ok(u.approx_of(s, i)?.len())).collect()
    };
    let slack = horizon;
    let (ca, cb) = (counts(a, horizon + slack)?, counts(b, horizon + slack)?);
    // x ≤_q y within the horizon: every early count of x is met by some count of y
    let le = |x: &[usize], y: &[usize]| {
        let best = y.iter().copied().max().unwrap_or(0);
        x[..=horizon as usize].iter().all(|&c| c <= best)
    };
    match (le(&ca, &cb), le(&cb, &ca)) {
        (true, true) => Ok(Relation::Equal),
        (true, false) => Ok(Relation::Less),
        (false, true) => Ok(Relation::Greater),
        (false, false) => Err(CardError::HorizonInconclusive { horizon }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set_rep::Builtin;
    use crate::NOrdinal;

    #[test]
    fn omega_and_multiples() {
        let u = Universe::default();
        let w = u.builtin(Builtin::Omega).unwrap();
        let c = classify_cardinal(&u, w).unwrap();
        assert_eq!(c.class, Class::WellOrderedInfinite { rank: 1, degree: 1 });
        assert!(c.is_limit && c.regular && c.strong_limit && !c.inaccessible);
        assert_eq!(c.cofinality, Cofinality::Omega);
        let w2 = u.n_times(2, w);
        let c2 = classify_cardinal(&u, w2).unwrap();
        assert_eq!(c2.class, Class::WellOrderedInfinite { rank: 1, degree: 2 });
        assert!(!c2.is_limit && !c2.regular);
        assert_eq!(c2.cofinality, Cofinality::Two);
        let w3 = u.n_times(3, w);
        assert_eq!(compare_cardinality(&u, w2, w3).unwrap().relation, Relation::Less);
    }

    #[test]
    fn continuum() {
        let u = Universe::default();
        let p = u.builtin(Builtin::PowerN).unwrap();
        let pp = u.builtin(Builtin::PerfectPN).unwrap();
        let c = classify_cardinal(&u, p).unwrap();
        assert_eq!(c.class, Class::Continuum);
        assert!(c.regular && c.inaccessible && !c.strongly_inaccessible);
        let v = compare_cardinality(&u, p, pp).unwrap();
        assert_eq!(v, CardinalityVerdict { relation: Relation::Equal, evidence: Evidence::BothContinuum });
    }

    #[test]
    fn finite_sets() {
        let u = Universe::default();
        let three = u.literal(NOrdinal::new(3).value().clone());
        assert_eq!(size_of(&u, three).unwrap(), Size::Finite(3));
        assert_eq!(classify_cardinal(&u, three).unwrap().class, Class::Finite(3));
        let inf = u.builtin(Builtin::Infinity).unwrap();
        assert_eq!(size_of(&u, inf).unwrap(), Size::Finite(1));
    }

    #[test]
    fn arithmetic() {
        use OrdVal::*;
        let f = nordinal_arith_with_omega;
        assert_eq!(f(OrdOp::Add, Fin(3), Omega).unwrap(), Omega);
        assert_eq!(f(OrdOp::Mul, Omega, Fin(2)).unwrap(), Omega);
        assert_eq!(f(OrdOp::Add, Fin(2), Fin(3)).unwrap(), Fin(5));
        assert_eq!(f(OrdOp::Mul, Fin(0), Omega).unwrap(), Fin(0));
        assert_eq!(f(OrdOp::Pow, Fin(1), Omega).unwrap(), Fin(1));
        assert_eq!(f(OrdOp::Pow, Omega, Fin(0)).unwrap(), Fin(1));
        assert!(f(OrdOp::Pow, Fin(0), Omega).is_err());
    }
}
