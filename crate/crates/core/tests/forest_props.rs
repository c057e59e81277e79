mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng;

use common::*;
use thl_core::signs::{enumerate_oriented, propagate_tree, Sign};
use thl_core::{common_refinement, Forest, GeneratorWord, GroupElement, Tree};

fn t(s: &str) -> Tree {
    s.parse().unwrap()
}

fn word(s: &str) -> GroupElement {
    s.parse::<GeneratorWord>().unwrap().eval()
}

#[test]
fn associativity_and_axioms() {
    let mut r = rng(1);
    let e = GroupElement::identity();
    for _ in 0..500 {
        let a = random_word(&mut r, 10).eval();
        let b = random_word(&mut r, 10).eval();
        let c = random_word(&mut r, 10).eval();
        assert_eq!(a.multiply(&b).multiply(&c), a.multiply(&b.multiply(&c)));
        assert_eq!(e.multiply(&a), a);
        assert_eq!(a.multiply(&e), a);
        assert_eq!(a.multiply(&a.invert()), e);
        assert_eq!(a.invert().invert(), a);
        assert!(a.is_reduced());
    }
}

#[test]
fn word_evaluation_is_a_homomorphism() {
    let mut r = rng(2);
    for _ in 0..200 {
        let u = random_word(&mut r, 8);
        let v = random_word(&mut r, 8);
        assert_eq!(u.concat(&v).eval(), u.eval().multiply(&v.eval()));
        assert_eq!(u.inverse().eval(), u.eval().invert());
    }
}

#[test]
fn presentation_relators() {
    let e = GroupElement::identity();
    let a = word("x0 x1^-1");
    for b in [word("x0^-1 x1 x0"), word("x0^-1 x0^-1 x1 x0 x0")] {
        let comm = a.invert().multiply(&b.invert()).multiply(&a).multiply(&b);
        assert_eq!(comm, e);
    }
    // the relators really use the group structure: x0 and x1 do not commute
    assert_ne!(word("x0 x1"), word("x1 x0"));
}

#[test]
fn generator_normal_forms() {
    assert_eq!(GroupElement::x0().to_string(), "(((ll)l), (l(ll)))");
    assert_eq!(GroupElement::x1().to_string(), "((l((ll)l)), (l(l(ll))))");
    assert_eq!(*GroupElement::x0().invert().plus(), t("(l(ll))"));
    assert!(word("").is_identity());
    assert!(word("x0 x0^-1").is_identity());
    assert_eq!(word("x0 x1").leaf_count(), 4);
    assert_eq!(word("x1 x0").leaf_count(), 5);
}

#[test]
fn reduce_is_confluent() {
    let mut r = rng(3);
    for _ in 0..300 {
        let k0 = r.gen_range(1..8);
        let mut g = random_pair(&mut r, k0);
        for _ in 0..r.gen_range(0..4) {
            g = g.stabilize(r.gen_range(0..g.leaf_count())).unwrap();
        }
        let mut r1 = rng(r.gen());
        let mut r2 = rng(r.gen());
        let x = g.reduce_by(|c| c[r1.gen_range(0..c.len())]);
        let y = g.reduce_by(|c| c[r2.gen_range(0..c.len())]);
        assert_eq!(x, y);
        assert_eq!(x, g.reduce());
        assert!(x.is_reduced());
        assert_eq!(x.reduce(), x);
    }
}

#[test]
fn stabilization_is_undone_by_reduce() {
    let mut r = rng(4);
    for _ in 0..300 {
        let g = random_word(&mut r, 8).eval();
        let k = r.gen_range(0..g.leaf_count());
        let s = g.stabilize(k).unwrap();
        assert_eq!(s.leaf_count(), g.leaf_count() + 1);
        assert_eq!(s.reduce(), g);
    }
    let tt = t("((ll)(l(ll)))");
    assert!(GroupElement::new(tt.clone(), tt)
        .unwrap()
        .reduce()
        .is_identity());
}

fn carets_of(f: &Forest) -> usize {
    f.caret_count()
}

#[test]
fn common_refinement_examples() {
    let s = t("((ll)l)");
    let u = t("(l(ll))");
    let (p, q) = common_refinement(&s, &u);
    let ps = p.compose(&Forest::from_tree(s.clone())).unwrap();
    let qu = q.compose(&Forest::from_tree(u.clone())).unwrap();
    assert_eq!(ps, qu);
    assert_eq!(ps.trees()[0], t("((ll)(ll))"));
    assert_eq!(p, Forest::new(vec![Tree::Leaf, Tree::Leaf, t("(ll)")]));
    assert_eq!(q, Forest::new(vec![t("(ll)"), Tree::Leaf, Tree::Leaf]));
    let (p, q) = common_refinement(&s, &s);
    assert_eq!((carets_of(&p), carets_of(&q)), (0, 0));
}

#[test]
fn common_refinement_is_minimal() {
    let mut r = rng(5);
    for _ in 0..300 {
        let k0 = r.gen_range(1..9);
        let s = random_tree(&mut r, k0);
        let k0 = r.gen_range(1..9);
        let u = random_tree(&mut r, k0);
        let (p, q) = common_refinement(&s, &u);
        let ps = p.compose(&Forest::from_tree(s.clone())).unwrap();
        assert_eq!(ps, q.compose(&Forest::from_tree(u.clone())).unwrap());
        assert_eq!(ps.leaf_count(), s.leaf_count() + p.caret_count());
        // least upper bound: exactly the union of the caret sets
        let union: BTreeSet<_> = s.carets().union(&u.carets()).cloned().collect();
        assert_eq!(ps.trees()[0].carets(), union);
    }
}

#[test]
fn forest_composition() {
    let f = Forest::new(vec![t("(ll)"), Tree::Leaf]);
    let g = Forest::from_tree(t("(ll)"));
    assert_eq!(f.compose(&g).unwrap().trees()[0], t("((ll)l)"));
    let mut r = rng(6);
    for _ in 0..200 {
        let k0 = r.gen_range(1..4);
        let k1 = r.gen_range(0..5);
        let g = random_forest(&mut r, k0, k1);
        let k0 = r.gen_range(0..5);
        let f = random_forest(&mut r, g.leaf_count(), k0);
        let fg = f.compose(&g).unwrap();
        assert_eq!(fg.caret_count(), f.caret_count() + g.caret_count());
        assert_eq!(fg.root_count(), g.root_count());
        assert_eq!(fg.leaf_count(), f.leaf_count());
        assert_eq!(Forest::identity(f.leaf_count()).compose(&f).unwrap(), f);
        assert_eq!(f.compose(&Forest::identity(f.root_count())).unwrap(), f);
    }
    assert!(f.compose(&Forest::identity(3)).is_err());
}

#[test]
fn enumeration_matches_unreduced_brute_force() {
    let mut seen = BTreeSet::new();
    for n in 1..=5 {
        for p in Tree::all_with_leaves(n) {
            for m in Tree::all_with_leaves(n) {
                if propagate_tree(&p, Sign::Plus) == propagate_tree(&m, Sign::Plus) {
                    seen.insert(
                        GroupElement::new(p.clone(), m)
                            .unwrap()
                            .reduce()
                            .to_string(),
                    );
                }
            }
        }
    }
    let listed = enumerate_oriented(5).unwrap();
    assert_eq!(listed.len(), seen.len());
    assert!(listed.iter().all(|g| seen.contains(&g.to_string())));
    assert_eq!(
        enumerate_oriented(1).unwrap(),
        vec![GroupElement::identity()]
    );
    assert_eq!(
        enumerate_oriented(2).unwrap(),
        vec![GroupElement::identity()]
    );
    assert!(enumerate_oriented(9).is_err());
}

fn arb_tree(max: usize) -> impl Strategy<Value = Tree> {
    (1..=max, any::<u64>()).prop_map(|(n, seed)| random_tree(&mut rng(seed), n))
}

proptest! {
    #[test]
    fn tree_text_round_trips(tr in arb_tree(12)) {
        let back: Tree = tr.to_string().parse().unwrap();
        prop_assert_eq!(back, tr);
    }

    #[test]
    fn element_text_round_trips(seed in any::<u64>()) {
        let g = random_word(&mut rng(seed), 10).eval();
        let json = serde_json::to_string(&thl_core::forest::ElementJson::from(&g)).unwrap();
        let back: thl_core::forest::ElementJson = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(GroupElement::try_from(&back).unwrap(), g);
    }

    #[test]
    fn insertion_schedule_round_trips(roots in 1usize..4, seed in any::<u64>()) {
        let f = random_forest(&mut rng(seed), roots, 6);
        prop_assert_eq!(Forest::from_insertions(roots, &f.insertions()).unwrap(), f);
    }
}
