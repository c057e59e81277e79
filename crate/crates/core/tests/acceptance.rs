//! Acceptance run: one PASS/FAIL line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use common::*;
use thl_core::gram::{element_gram_with_cap, tangle_gram};
use thl_core::homfly::{delta_sym, evaluate};
use thl_core::signs::{
    check_functorial, enumerate_oriented, is_oriented, propagate, propagate_insertions, Sign,
};
use thl_core::tangle::{build_link, build_unoriented_link, conjugate_by_crossing, shade, Move};
use thl_core::{
    Convention, EvalParams, Forest, GeneratorWord, GroupElement, HomflyEngine, LaurentPoly,
    LinkDiagram, SignSeq, Tree,
};

const PARAMS: [(u32, u32); 4] = [(4, 1), (5, 1), (6, 2), (7, 2)];
const CONVENTIONS: [Convention; 2] = [Convention::Standard, Convention::Mirror];

fn params() -> Vec<EvalParams> {
    PARAMS
        .iter()
        .map(|&(r, k)| EvalParams::new(r, k).unwrap())
        .collect()
}

fn seq(s: &str) -> SignSeq {
    s.parse().unwrap()
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Sign propagation on the worked 4-root example.
fn c1() -> Result<String, String> {
    let (input, output) = (seq("+-+-"), seq("+--+-+--++"));
    // every insertion schedule of six carets on four roots
    let mut hits = Vec::new();
    let mut sched = [1usize; 6];
    loop {
        let row = propagate_insertions(&sched, input.signs()).unwrap();
        if row == output.signs() {
            hits.push(Forest::from_insertions(4, &sched).unwrap());
        }
        let mut i = 5;
        loop {
            sched[i] += 1;
            if sched[i] <= 4 + i {
                break;
            }
            sched[i] = 1;
            if i == 0 {
                break;
            }
            i -= 1;
        }
        if sched == [1; 6] {
            break;
        }
    }
    hits.sort_by_key(|f| f.to_string());
    hits.dedup();
    check(!hits.is_empty(), "no forest reproduces the example")?;
    let f = Forest::from_insertions(4, &[4, 5, 6, 6, 5, 1]).unwrap();
    let t = Instant::now();
    let got = propagate(&f, &input).unwrap();
    let dt = t.elapsed();
    check(got == output, format!("fixture gives {got}"))?;
    check(
        dt < Duration::from_millis(1),
        format!("fixture took {dt:?}"),
    )?;
    Ok(format!(
        "{} distinct forests reproduce it; fixture {f} in {dt:?}",
        hits.len()
    ))
}

fn random_sign(r: &mut impl Rng, n: usize) -> SignSeq {
    let mut v = vec![Sign::Plus];
    if n > 1 {
        v.push(Sign::Minus);
    }
    while v.len() < n {
        v.push(if r.gen() { Sign::Plus } else { Sign::Minus });
    }
    SignSeq::new(v).unwrap()
}

/// Functoriality on 1000 seeded triples.
fn c2() -> Result<String, String> {
    let mut r = rng(2);
    let t = Instant::now();
    for i in 0..1000 {
        let n = r.gen_range(1..5);
        let sigma = random_sign(&mut r, n);
        let (e1, e2) = (r.gen_range(0..6), r.gen_range(0..6));
        let g = random_forest(&mut r, n, e1);
        let f = random_forest(&mut r, g.leaf_count(), e2);
        check(
            check_functorial(&f, &g, &sigma).unwrap(),
            format!("triple {i} fails"),
        )?;
    }
    let dt = t.elapsed();
    check(dt < Duration::from_secs(1), format!("took {dt:?}"))?;
    Ok(format!("1000 triples in {dt:?}"))
}

/// Group laws and relators on 500 seeded words.
fn c3() -> Result<String, String> {
    let word = |s: &str| s.parse::<GeneratorWord>().unwrap().eval();
    let e = GroupElement::identity();
    let a = word("x0 x1^-1");
    for b in [word("x0^-1 x1 x0"), word("x0^-1 x0^-1 x1 x0 x0")] {
        let comm = a.invert().multiply(&b.invert()).multiply(&a).multiply(&b);
        check(comm == e, format!("relator gives {comm}"))?;
    }
    let mut r = rng(3);
    let words: Vec<GroupElement> = (0..500).map(|_| random_word(&mut r, 10).eval()).collect();
    for (i, w) in words.iter().enumerate() {
        let (b, c) = (&words[(i + 1) % 500], &words[(i + 7) % 500]);
        check(
            w.multiply(b).multiply(c) == w.multiply(&b.multiply(c)),
            format!("associativity at {i}"),
        )?;
        check(w.multiply(&w.invert()) == e, format!("inverse at {i}"))?;
        check(
            e.multiply(w) == *w && w.multiply(&e) == *w,
            format!("identity at {i}"),
        )?;
    }
    Ok("500 words, both relators".into())
}

/// Membership coherence on every reduced pair with at most six leaves.
fn c4() -> Result<String, String> {
    check(!is_oriented(&GroupElement::x0()), "x0 oriented")?;
    check(!is_oriented(&GroupElement::x1()), "x1 oriented")?;
    let (mut pairs, mut members) = (0, 0);
    for n in 1..=6 {
        let trees = Tree::all_with_leaves(n);
        for p in &trees {
            for m in &trees {
                let g = GroupElement::new(p.clone(), m.clone()).unwrap();
                if !g.is_reduced() {
                    continue;
                }
                pairs += 1;
                let oriented = is_oriented(&g);
                members += oriented as usize;
                let d = build_unoriented_link(&g, Convention::Standard).unwrap();
                check(
                    shade(&d).orientable == oriented,
                    format!("shading disagrees at {g}"),
                )?;
            }
        }
    }
    Ok(format!("{pairs} reduced pairs, {members} oriented"))
}

fn lp(terms: &[(i32, i32, i64)]) -> LaurentPoly {
    LaurentPoly::from_terms(terms.iter().copied())
}

fn sample_links(r: &mut impl Rng, count: usize) -> Vec<LinkDiagram> {
    let pool = oriented(7);
    let mut out = vec![hopf(true), trefoil(true), figure_eight(), unlink(2)];
    while out.len() < count {
        let conv = *CONVENTIONS.choose(r).unwrap();
        out.push(build_link(pool.choose(r).unwrap(), conv).unwrap());
    }
    out
}

/// HOMFLYPT hand values, skein relation, Reidemeister invariance, timing.
fn c5() -> Result<String, String> {
    let e = HomflyEngine::new();
    let d = delta_sym();
    let hopf_p = &d.shift(-2, 0) + &LaurentPoly::monomial(1, -1, 1);
    let fixtures = [
        ("unknot", LinkDiagram::unknot(), LaurentPoly::one()),
        ("2-unlink", unlink(2), d.clone()),
        ("positive Hopf", hopf(true), hopf_p),
        (
            "right trefoil",
            trefoil(true),
            lp(&[(-2, 0, 2), (-4, 0, -1), (-2, 2, 1)]),
        ),
    ];
    for (name, diag, want) in fixtures {
        let got = e.homfly(&diag).unwrap();
        check(got == want, format!("{name}: {got}"))?;
    }
    let a = |k| LaurentPoly::monomial(1, k, 0);
    let z = LaurentPoly::monomial(1, 0, 1);
    let mut r = rng(5);
    let (mut skein, mut moves) = (0, 0);
    for diag in sample_links(&mut r, 200) {
        let p = e.homfly(&diag).unwrap();
        if diag.crossing_count() > 0 {
            let c = r.gen_range(0..diag.crossing_count());
            let sw = diag.switch_crossing(c).unwrap();
            let positive = diag.tangle().crossing_signs().unwrap()[c] > 0;
            let (dp, dm) = if positive {
                (p.clone(), e.homfly(&sw).unwrap())
            } else {
                (e.homfly(&sw).unwrap(), p.clone())
            };
            let d0 = e.homfly(&diag.smooth_crossing(c).unwrap()).unwrap();
            check(
                &(&a(1) * &dp) - &(&a(-1) * &dm) == &z * &d0,
                "skein relation fails",
            )?;
            skein += 1;
        }
        let mut cur = diag;
        for _ in 0..4 {
            let all = cur.available_moves();
            let small = cur.crossing_count() < 9;
            let pool: Vec<&Move> = all
                .iter()
                .filter(|m| small || m.crossing_delta() <= 0)
                .collect();
            let rare: Vec<&Move> = pool
                .iter()
                .copied()
                .filter(|m| !matches!(m, Move::R1Add { .. } | Move::R2Add { .. }))
                .collect();
            let mv = if !rare.is_empty() && r.gen_bool(0.6) {
                rare.choose(&mut r)
            } else {
                pool.choose(&mut r)
            };
            let Some(&&mv) = mv else { break };
            let before = cur.crossing_count() as i64;
            cur = cur.apply(&mv).map_err(|err| format!("{mv:?}: {err}"))?;
            cur.validate()
                .map_err(|err| format!("{mv:?} broke the diagram: {err}"))?;
            check(
                cur.crossing_count() as i64 - before == mv.crossing_delta(),
                format!("{mv:?} crossing count"),
            )?;
            check(
                e.homfly(&cur).unwrap() == p,
                format!("{mv:?} changed the polynomial"),
            )?;
            moves += 1;
        }
    }
    let plain = HomflyEngine::without_memo();
    let big: Vec<GroupElement> = oriented(8)
        .into_iter()
        .filter(|g| g.caret_count() >= 12)
        .collect();
    let mut worst = Duration::ZERO;
    for g in big.choose_multiple(&mut r, 4) {
        let mut diag = build_link(g, Convention::Standard).unwrap();
        while diag.crossing_count() < 14 {
            let adds: Vec<Move> = diag
                .available_moves()
                .into_iter()
                .filter(|m| matches!(m, Move::R2Add { .. }))
                .collect();
            diag = diag.apply(adds.choose(&mut r).unwrap()).unwrap();
        }
        let t = Instant::now();
        plain.homfly(&diag).unwrap();
        worst = worst.max(t.elapsed());
    }
    check(
        worst < Duration::from_secs(5),
        format!("14-crossing diagram took {worst:?}"),
    )?;
    Ok(format!(
        "4 hand values, {skein} skein cases, {moves} moves, 14 crossings in at most {worst:?}"
    ))
}

/// φ is well defined on stabilized representatives.
fn c6() -> Result<String, String> {
    let e = HomflyEngine::new();
    let id = GroupElement::identity();
    for p in params() {
        let v = e.phi(&id, p, Convention::Standard).unwrap();
        check(
            (v - Complex64::new(1.0, 0.0)).norm() < 1e-12,
            format!("phi(e) = {v}"),
        )?;
    }
    let pool = enumerate_oriented(6).unwrap();
    let mut r = rng(6);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let g = pool.choose(&mut r).unwrap();
        let mut s = g.clone();
        let extra = r.gen_range(1..3);
        for _ in 0..extra {
            let i = r.gen_range(0..s.leaf_count());
            s = s.stabilize(i).unwrap();
        }
        let want = &delta_sym().pow(extra) * &e.link_poly(g, Convention::Standard).unwrap();
        check(
            e.link_poly(&s, Convention::Standard).unwrap() == want,
            format!("stabilized {g} changes P"),
        )?;
        for p in params() {
            let raw = evaluate(&e.link_poly(&s, Convention::Standard).unwrap(), p);
            let phi_s = raw / p.delta().powi(s.leaf_count() as i32 - 1);
            let dv = (phi_s - e.phi(g, p, Convention::Standard).unwrap()).norm();
            worst = worst.max(dv);
        }
    }
    check(worst <= 1e-9, format!("numeric drift {worst:e}"))?;
    Ok(format!("100 stabilizations, max drift {worst:.1e}"))
}

/// Gram matrices of oriented elements are positive semidefinite.
fn c7() -> Result<String, String> {
    let e = HomflyEngine::new();
    let all = enumerate_oriented(6).unwrap();
    let mut r = rng(7);
    let (mut min_eig, mut max_herm, mut max_phi) = (f64::INFINITY, 0.0f64, 0.0f64);
    let mut grams = 0;
    for conv in CONVENTIONS {
        for p in params() {
            // the full matrix: PSD here means PSD for every sub-family
            let mut fams = vec![all.clone()];
            for _ in 0..40 {
                let size = r.gen_range(1..=8);
                fams.push(all.choose_multiple(&mut r, size).cloned().collect());
            }
            for fam in fams {
                let m = element_gram_with_cap(&e, &fam, p, conv, all.len()).unwrap();
                let s = m.spectrum(1e-8).map_err(|err| err.to_string())?;
                max_herm = max_herm.max(m.hermitian_defect());
                min_eig = min_eig.min(s.min_eig);
                grams += 1;
                check(
                    m.hermitian_defect() <= 1e-8,
                    format!("{p:?}: not Hermitian"),
                )?;
                check(
                    s.min_eig >= -1e-8,
                    format!("{p:?} {conv:?}: min eig {}", s.min_eig),
                )?;
            }
            for g in &all {
                max_phi = max_phi.max(e.phi(g, p, conv).unwrap().norm());
            }
        }
    }
    check(max_phi <= 1.0 + 1e-9, format!("|phi| reaches {max_phi}"))?;
    Ok(format!(
        "{grams} Gram matrices over {} elements, min eig {min_eig:.4}, Hermitian defect {max_herm:.1e}, max |phi| {max_phi:.6}",
        all.len()
    ))
}

/// Tangle Gram matrices and conjugation by a crossing.
fn c8() -> Result<String, String> {
    let e = HomflyEngine::new();
    let p = EvalParams::new(5, 1).unwrap();
    let target = thl_core::signs::parse_signs("+++---").unwrap();
    let swapped = thl_core::signs::parse_signs("++-+--").unwrap();
    let mut r = rng(8);
    let (mut min_eig, mut pairs) = (f64::INFINITY, 0);
    for round in 0..40 {
        let size = r.gen_range(1..=4);
        let mut fam: Vec<_> = (0..size)
            .map(|_| random_tangle(&mut r, &target, 4))
            .collect();
        if round % 2 == 1 {
            fam = fam.iter().map(|t| t.mirror()).collect();
        }
        let s = tangle_gram(&e, &fam, p)
            .unwrap()
            .spectrum(1e-8)
            .map_err(|err| err.to_string())?;
        min_eig = min_eig.min(s.min_eig);
        check(
            s.min_eig >= -1e-8,
            format!("round {round}: min eig {}", s.min_eig),
        )?;
        let left_over = r.gen();
        let conj: Vec<_> = fam
            .iter()
            .map(|t| conjugate_by_crossing(t, 3, left_over).unwrap())
            .collect();
        check(
            conj[0].boundary().unwrap().top == swapped,
            "conjugate has the wrong boundary",
        )?;
        for i in 0..size {
            for j in 0..size {
                let before = e.tangle_inner(&fam[i], &fam[j]).unwrap();
                let after = e.tangle_inner(&conj[i], &conj[j]).unwrap();
                check(
                    before == after,
                    format!("round {round}: pairing ({i},{j}) changed"),
                )?;
                pairs += 1;
            }
        }
    }
    Ok(format!(
        "40 families, min eig {min_eig:.2e}, {pairs} pairings preserved exactly"
    ))
}

/// Mirror images and the two crossing conventions.
fn c9() -> Result<String, String> {
    let e = HomflyEngine::new();
    let mut fixtures = vec![
        LinkDiagram::unknot(),
        unlink(2),
        hopf(true),
        hopf(false),
        trefoil(true),
        figure_eight(),
    ];
    let mut r = rng(9);
    fixtures.extend(sample_links(&mut r, 30));
    for d in &fixtures {
        check(
            e.homfly(&d.mirror()).unwrap() == e.homfly(d).unwrap().mirror(),
            "mirror rule fails",
        )?;
    }
    let all = enumerate_oriented(6).unwrap();
    for g in &all {
        let std = e.link_poly(g, Convention::Standard).unwrap();
        let mir = e.link_poly(g, Convention::Mirror).unwrap();
        check(mir == std.mirror(), format!("conventions disagree at {g}"))?;
    }
    Ok(format!(
        "{} fixtures, {} elements under both conventions",
        fixtures.len(),
        all.len()
    ))
}

fn main() {
    type Criterion = (&'static str, fn() -> Result<String, String>, Duration);
    let criteria: [Criterion; 9] = [
        (
            "sign propagation worked example",
            c1,
            Duration::from_secs(10),
        ),
        ("functoriality", c2, Duration::from_secs(1)),
        ("group laws and relators", c3, Duration::from_secs(5)),
        ("membership coherence", c4, Duration::from_secs(30)),
        ("HOMFLYPT engine", c5, Duration::from_secs(60)),
        (
            "normalization well-definedness",
            c6,
            Duration::from_secs(60),
        ),
        (
            "positivity of element Gram matrices",
            c7,
            Duration::from_secs(600),
        ),
        (
            "positivity of tangle Gram matrices",
            c8,
            Duration::from_secs(60),
        ),
        ("mirror consistency", c9, Duration::from_secs(60)),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or(e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let dt = t.elapsed();
        let res = res.and_then(|msg| {
            if dt <= *limit {
                Ok(msg)
            } else {
                Err(format!("{msg}; over the {limit:?} budget"))
            }
        });
        match res {
            Ok(msg) => println!("criterion {} PASS [{dt:.2?}] {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} FAIL [{dt:.2?}] {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
