//! Named scenarios checking the laws of approximations end to end.

use std::time::{Duration, Instant};

use approxsets::cardinality::{self, Class, Cofinality, Relation, Size};
use approxsets::hf_kernel::{approx, Hf};
use approxsets::set_rep::SetRef;
use approxsets::topology;
use approxsets::universal_tree::{is_successor, level_count, Enumerator};
use approxsets::{expr, Mode, NOrdinal, Truth, Universe, ZNat};
use serde_json::json;

use crate::Out;

type Check = Result<(), String>;

struct Scenario {
    name: &'static str,
    topic: &'static str,
    run: fn() -> Check,
}

const SCENARIOS: &[Scenario] = &[
    Scenario { name: "worked-approximations", topic: "approximations of small HF sets and numerals", run: worked },
    Scenario { name: "builtin-approximations", topic: "closed forms for N, P(N) and inf", run: builtins },
    Scenario { name: "f-laws", topic: "idempotence, rank bound and extensionality of F", run: f_laws },
    Scenario { name: "universal-tree", topic: "level sizes and edges of the universal tree", run: universal },
    Scenario { name: "coherence", topic: "F(n, F(n+1, A)) = F(n, A) and tree/formula agreement", run: coherence },
    Scenario { name: "accumulation-points", topic: "derived sets and perfect subsets", run: accumulation },
    Scenario { name: "cantor-bendixson", topic: "rank and degree of n x omega and omega^n", run: cantor_bendixson },
    Scenario { name: "continuum-chain", topic: "A(1) < A(2) < A(3) < A(4) < P(N)", run: chain },
    Scenario { name: "cardinal-arithmetic", topic: "sums, multiples and products of cardinals", run: arithmetic },
    Scenario { name: "cardinal-classification", topic: "limit, cofinality, regular, inaccessible", run: classification },
    Scenario { name: "counting-measure", topic: "sizes by element counts of approximations", run: counting },
    Scenario { name: "self-membership", topic: "inf in inf, N differs from omega", run: paradoxes },
];

pub fn run(filter: Option<&str>) -> Out {
    let wanted: Vec<&Scenario> = SCENARIOS
        .iter()
        .filter(|s| {
            filter.map_or(true, |f| {
                let f = f.to_lowercase();
                s.name.contains(&f) || s.topic.to_lowercase().contains(&f)
            })
        })
        .collect();
    if wanted.is_empty() {
        eprintln!("warning: no scenario matches {:?}", filter.unwrap_or(""));
    }
    let results: Vec<(&Scenario, Check, Duration)> = std::thread::scope(|sc| {
        let handles: Vec<_> = wanted
            .iter()
            .map(|&s| {
                sc.spawn(move || {
                    let t = Instant::now();
                    let r = (s.run)();
                    (s, r, t.elapsed())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("scenario panicked")).collect()
    });
    let failed = results.iter().filter(|r| r.1.is_err()).count();
    let mut text = format!("{:<26} {:<52} {:<6} {:>10}", "name", "topic", "status", "elapsed");
    let mut rows = Vec::new();
    for (s, r, t) in &results {
        let status = if r.is_ok() { "PASS" } else { "FAIL" };
        text.push_str(&format!("\n{:<26} {:<52} {:<6} {:>8.1}ms", s.name, s.topic, status, t.as_secs_f64() * 1e3));
        if let Err(msg) = r {
            text.push_str(&format!("\n    {msg}"));
        }
        rows.push(json!({
            "name": s.name,
            "topic": s.topic,
            "pass": r.is_ok(),
            "elapsed_ms": t.as_secs_f64() * 1e3,
            "detail": r.as_ref().err(),
        }));
    }
    let v = json!({ "scenarios": rows, "passed": results.len() - failed, "failed": failed });
    Out::Code(text, v, if failed == 0 { 0 } else { 1 })
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn set(u: &Universe, src: &str) -> SetRef {
    expr::parse(src).expect("scenario expression").build(u).expect("scenario set")
}

fn hf(word: &str) -> Hf {
    approxsets::hf_kernel::parse(word).expect("scenario word")
}

fn z(k: u64) -> Hf {
    ZNat::new(k).value().clone()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn worked() -> Check {
    ensure(approx(2, &hf("{{}{{}}{{{}}}{{{{}}}}}")) == hf("{{}{{}}}"), || "F(2, Z-list) wrong".into())?;
    ensure(approx(1, &hf("{{}{{}}}")) == hf("{{}}"), || "F(1, {0,1}) wrong".into())?;
    for n in 0..=8u32 {
        for m in 0..=8u64 {
            let k = m.min(n as u64);
            ensure(approx(n, &z(m)) == z(k), || format!("F({n}, Z{m})"))?;
            let v = |j| NOrdinal::new(j).value().clone();
            ensure(approx(n, &v(m)) == v(k), || format!("F({n}, v{m})"))?;
        }
    }
    Ok(())
}

fn power(a: &Hf) -> Hf {
    let xs = a.elems();
    Hf::from_elems((0u64..1 << xs.len()).map(|m| Hf::from_elems((0..xs.len()).filter(|i| m >> i & 1 == 1).map(|i| xs[i].clone()))))
}

fn builtins() -> Check {
    let u = Universe::default();
    let (n, pn, inf) = (set(&u, "N"), set(&u, "PN"), set(&u, "inf"));
    for k in 0..=8u32 {
        let want = Hf::from_elems((0..k as u64).map(z));
        ensure(u.approx_of(n, k).map_err(err)? == want, || format!("F({k}, N)"))?;
        ensure(u.approx_of(inf, k).map_err(err)? == z(k as u64), || format!("F({k}, inf)"))?;
    }
    for k in 2..=5u32 {
        let want = power(&Hf::from_elems((0..k as u64 - 1).map(z)));
        ensure(u.approx_of(pn, k).map_err(err)? == want, || format!("F({k}, P(N))"))?;
    }
    Ok(())
}

fn f_laws() -> Check {
    let mut en = Enumerator::default();
    let mut sample: Vec<Hf> = en.level(3).map_err(err)?.into_iter().map(|n| n.approx).collect();
    sample.extend(en.level(4).map_err(err)?.into_iter().step_by(97).map(|n| n.approx));
    for a in &sample {
        let r = a.rank();
        if !a.is_empty() {
            let top = a.elems().iter().map(Hf::rank).max().unwrap_or(0) + 1;
            ensure(r == top, || format!("rank of {a}"))?;
        }
        for n in 0..=5u32 {
            let fa = approx(n, a);
            ensure(fa.rank() <= n, || format!("rank bound F({n}, {a})"))?;
            if fa.rank() < n {
                ensure(fa == *a, || format!("F({n}, {a}) should be {a}"))?;
            }
            for m in 0..=3u32 {
                ensure(approx(n, &approx(n + m, a)) == fa, || format!("F(n, F(n+m)) for {a}"))?;
                ensure(approx(n + m, &fa) == fa, || format!("F(n+m, F(n)) for {a}"))?;
            }
        }
    }
    for a in sample.iter().take(40) {
        for b in sample.iter().take(40) {
            let same = (0..=5).all(|n| approx(n, a) == approx(n, b));
            ensure(same == (a == b), || format!("extensionality {a} vs {b}"))?;
        }
    }
    Ok(())
}

fn universal() -> Check {
    let mut en = Enumerator::default();
    for (k, want) in [1usize, 2, 4, 16].into_iter().enumerate() {
        let level = en.level(k as u32).map_err(err)?;
        ensure(level.len() == want, || format!("level {k} has {}", level.len()))?;
        for v in &level {
            for w in en.successors(v).map_err(err)? {
                ensure(is_successor(v, &w) && w.predecessor().as_ref() == Some(v), || format!("edge {v:?} -> {w:?}"))?;
            }
        }
    }
    ensure(level_count(4) == 65536u32.into(), || "level 4 count".into())
}

const COMBINATIONS: &[&str] = &[
    "empty", "inf", "N", "omega", "PN", "PPN", "A(1)", "A(2)", "A(3)",
    "union(N,omega)", "inter(A(1),A(2))", "diff(N,omega)", "pair(N,inf)", "opair(N,omega)",
    "prod(omega,omega)", "pow(N)", "sum(N,omega)", "times(2,omega)",
];

fn coherence() -> Check {
    let u = Universe::default();
    for src in COMBINATIONS {
        let s = set(&u, src);
        for n in 0..=6u32 {
            let next = u.approx_of(s, n + 1).map_err(err)?;
            ensure(approx(n, &next) == u.approx_of(s, n).map_err(err)?, || format!("{src} incoherent at {n}"))?;
        }
        for n in 0..=4u32 {
            ensure(u.approx_tree(s, n).map_err(err)? == u.approx_of(s, n).map_err(err)?, || format!("{src} tree at {n}"))?;
        }
    }
    Ok(())
}

fn accumulation() -> Check {
    let u = Universe::default();
    let paths = |src: &str| -> Result<Option<u64>, String> {
        let d = topology::derived_set(&u, set(&u, src)).map_err(err)?;
        topology::path_total(&u, d, 100).map_err(err)
    };
    ensure(paths("N")? == Some(1), || "derived(N)".into())?;
    for i in 1..=4u64 {
        ensure(paths(&format!("A({i})"))? == Some(i), || format!("derived(A({i}))"))?;
    }
    let ppn = set(&u, "PPN");
    let d = topology::derived_set(&u, ppn).map_err(err)?;
    ensure(u.equal_sets(ppn, d, Mode::Exact).map_err(err)? == Truth::True, || "PPN is its own derived set".into())?;
    for (src, want) in [("PPN", true), ("PN", true), ("N", false), ("omega", false), ("A(3)", false), ("prod(omega,omega)", false)] {
        let got = topology::contains_perfect_subtree(&u, set(&u, src)).map_err(err)?;
        ensure(got == want, || format!("perfect({src}) = {got}"))?;
    }
    Ok(())
}

fn omega_power(n: u32) -> String {
    (1..n).fold("omega".to_string(), |acc, _| format!("prod(omega,{acc})"))
}

fn cantor_bendixson() -> Check {
    let u = Universe::default();
    let cb = |src: &str| topology::cb_rank_degree(&u, set(&u, src), 64).map_err(err);
    ensure(cb("N")? == (1, 1) && cb("omega")? == (1, 1), || "N, omega".into())?;
    for n in 1..=5u64 {
        ensure(cb(&format!("times({n},omega)"))? == (1, n), || format!("times({n},omega)"))?;
    }
    for n in 1..=3u32 {
        ensure(cb(&omega_power(n))? == (n, 1), || format!("omega^{n}"))?;
    }
    Ok(())
}

fn rel(u: &Universe, a: &str, b: &str) -> Result<Relation, String> {
    Ok(cardinality::compare_cardinality(u, set(u, a), set(u, b)).map_err(err)?.relation)
}

fn chain() -> Check {
    let u = Universe::default();
    for (a, b) in [("A(1)", "A(2)"), ("A(2)", "A(3)"), ("A(3)", "A(4)"), ("A(4)", "PN")] {
        ensure(rel(&u, a, b)? == Relation::Less, || format!("{a} < {b}"))?;
    }
    ensure(rel(&u, "N", "A(1)")? == Relation::Equal, || "N = A(1)".into())
}

fn arithmetic() -> Check {
    let u = Universe::default();
    for n in 1..=4 {
        ensure(rel(&u, &format!("times({n},omega)"), &format!("times({},omega)", n + 1))? == Relation::Less, || {
            format!("times({n},omega)")
        })?;
    }
    let w = set(&u, "omega");
    let ww = set(&u, "prod(omega,omega)");
    let s = cardinality::sum_cardinality_law(&u, w, w).map_err(err)?;
    ensure(s.observed == Relation::Greater && s.holds(), || "omega + omega > omega".into())?;
    let s = cardinality::sum_cardinality_law(&u, w, ww).map_err(err)?;
    ensure(s.observed == Relation::Equal && s.holds(), || "omega + omega^2 = omega^2".into())?;
    ensure(rel(&u, "sum(omega,omega)", "prod(omega,omega)")? == Relation::Less, || "sum < product".into())?;
    ensure(cardinality::infinite_product_is_continuum(&u, set(&u, "pow(omega)")).map_err(err)?, || "pow(omega)".into())?;
    ensure(
        cardinality::classify_cardinal(&u, set(&u, "pow(omega)")).map_err(err)?.class == Class::Continuum,
        || "pow(omega) class".into(),
    )
}

fn classification() -> Check {
    let u = Universe::default();
    let c = |src: &str| cardinality::classify_cardinal(&u, set(&u, src)).map_err(err);
    let w = c("omega")?;
    ensure(w.regular && w.strong_limit && w.is_limit && w.cofinality == Cofinality::Omega, || "omega".into())?;
    let w2 = c("times(2,omega)")?;
    ensure(!w2.regular && w2.cofinality == Cofinality::Two, || "2 x omega".into())?;
    let p = c("PN")?;
    ensure(p.regular && p.inaccessible && !p.strongly_inaccessible, || "P(N)".into())?;
    for src in COMBINATIONS {
        ensure(!c(src)?.strongly_inaccessible, || format!("{src} strongly inaccessible"))?;
    }
    Ok(())
}

fn counting() -> Check {
    let u = Universe::default();
    let infinite = ["N", "omega", "PN", "A(1)", "A(2)", "prod(omega,omega)"];
    for a in infinite {
        ensure(cardinality::size_of(&u, set(&u, a)).map_err(err)? == Size::OmegaSize, || format!("size({a})"))?;
        for b in infinite {
            let r = cardinality::counting_compare(&u, set(&u, a), set(&u, b), 6).map_err(err)?;
            ensure(r == Relation::Equal, || format!("{a} =q {b}"))?;
        }
    }
    for k in 0..=5u64 {
        let lit = set(&u, &format!("v({k})"));
        ensure(cardinality::size_of(&u, lit).map_err(err)? == Size::Finite(k), || format!("size(v({k}))"))?;
        let r = cardinality::counting_compare(&u, lit, set(&u, "N"), 6).map_err(err)?;
        ensure(r == Relation::Less, || format!("v({k}) <q N"))?;
    }
    Ok(())
}

fn paradoxes() -> Check {
    let u = Universe::default();
    let inf = set(&u, "inf");
    ensure(u.member_in(inf, inf, Mode::Exact).map_err(err)? == Truth::True, || "inf in inf".into())?;
    let t = u.equal_sets(set(&u, "N"), set(&u, "omega"), Mode::Exact).map_err(err)?;
    ensure(t == Truth::False { witness: Some(3) }, || format!("N vs omega: {t:?}"))
}
