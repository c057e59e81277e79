#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thl_core::forest::Generator;
use thl_core::signs::enumerate_oriented;
use thl_core::{Forest, GeneratorWord, GroupElement, Tree};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_word(rng: &mut impl Rng, max_len: usize) -> GeneratorWord {
    let gens = [
        Generator::X0,
        Generator::X0Inv,
        Generator::X1,
        Generator::X1Inv,
    ];
    let n = rng.gen_range(0..=max_len);
    GeneratorWord((0..n).map(|_| *gens.choose(rng).unwrap()).collect())
}

pub fn random_tree(rng: &mut impl Rng, leaves: usize) -> Tree {
    let mut t = Tree::Leaf;
    while t.leaf_count() < leaves {
        let i = rng.gen_range(0..t.leaf_count());
        t = t.attach(i);
    }
    t
}

pub fn random_forest(rng: &mut impl Rng, roots: usize, extra: usize) -> Forest {
    let mut sizes = vec![1; roots];
    for _ in 0..extra {
        sizes[rng.gen_range(0..roots)] += 1;
    }
    Forest::new(sizes.into_iter().map(|n| random_tree(rng, n)).collect())
}

pub fn random_pair(rng: &mut impl Rng, leaves: usize) -> GroupElement {
    GroupElement::new(random_tree(rng, leaves), random_tree(rng, leaves)).unwrap()
}

/// Non-identity oriented elements with at most `leaves` leaves.
pub fn oriented(leaves: usize) -> Vec<GroupElement> {
    enumerate_oriented(leaves)
        .unwrap()
        .into_iter()
        .filter(|g| !g.is_identity())
        .collect()
}

use thl_core::signs::Sign;
use thl_core::tangle::crossing_piece;
use thl_core::{LinkDiagram, Tangle};

/// Closure of an upward braid on `n` strands; each letter is
/// `(position, positive)` with 1-based positions.
pub fn braid_closure(n: usize, word: &[(usize, bool)]) -> LinkDiagram {
    let up = vec![Sign::Plus; n];
    let mut t = Tangle::identity(&up);
    for &(i, positive) in word {
        let mut x = crossing_piece(Some(&up), n, i, true).unwrap();
        if (x.writhe().unwrap() > 0) != positive {
            x = crossing_piece(Some(&up), n, i, false).unwrap();
        }
        t = Tangle::stack(&x, &t).unwrap();
    }
    t.closure().unwrap()
}

pub fn hopf(positive: bool) -> LinkDiagram {
    braid_closure(2, &[(1, positive), (1, positive)])
}

pub fn trefoil(right: bool) -> LinkDiagram {
    braid_closure(2, &[(1, right); 3])
}

pub fn figure_eight() -> LinkDiagram {
    braid_closure(3, &[(1, true), (2, false), (1, true), (2, false)])
}

pub fn unlink(n: usize) -> LinkDiagram {
    braid_closure(n, &[])
}

use thl_core::tangle::{cap_piece, cup_piece};

/// Random oriented tangle from the empty row to `target`, built from
/// turn-backs and at most `max_crossings` crossings.
pub fn random_tangle(rng: &mut impl Rng, target: &[Sign], max_crossings: usize) -> Tangle {
    loop {
        let mut t = Tangle::identity(&[]);
        let mut crossings = 0;
        for _ in 0..12 {
            let top = t.boundary().unwrap().top.clone();
            let n = top.len();
            if top == target && rng.gen_bool(0.3) {
                break;
            }
            let roll = rng.gen_range(0..10);
            let piece = if n < 2 || (roll < 4 && n < target.len() + 2) {
                cap_piece(Some(&top), n, rng.gen_range(0..=n), rng.gen())
            } else if roll < 8 && crossings < max_crossings {
                crossings += 1;
                crossing_piece(Some(&top), n, rng.gen_range(1..n), rng.gen())
            } else {
                let i = rng.gen_range(0..n - 1);
                if top[i] == top[i + 1] {
                    continue;
                }
                cup_piece(Some(&top), n, i)
            };
            t = Tangle::stack(&piece.unwrap(), &t).unwrap();
        }
        if t.boundary().unwrap().top == target {
            return t;
        }
    }
}
