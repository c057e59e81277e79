//! n-signs and the colouring propagation through binary forests.
//!
//! An n-sign colours the regions to the left of n points on a line, the
//! leftmost region being `+`. A caret splitting point `i` keeps the colour of
//! the region left of the split and gives the new region between the two
//! children the opposite colour, so `(…, a, …)` becomes `(…, a, ¬a, …)`.

use std::collections::HashMap;
use std::fmt;
use std::ops::Not;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::forest::{Forest, GroupElement, Tree};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn from_char(c: char) -> Option<Sign> {
        match c {
            '+' => Some(Sign::Plus),
            '-' | '−' => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl Not for Sign {
    type Output = Sign;

    fn not(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Parse a run of `+`/`-` characters with no separators.
pub fn parse_signs(s: &str) -> Result<Vec<Sign>> {
    s.trim()
        .chars()
        .enumerate()
        .map(|(i, c)| {
            Sign::from_char(c).ok_or_else(|| Error::Parse {
                pos: i,
                msg: format!("expected '+' or '-', found '{c}'"),
            })
        })
        .collect()
}

pub fn format_signs(signs: &[Sign]) -> String {
    signs.iter().map(|s| s.as_char()).collect()
}

/// An n-sign: first entry `+`, second entry (if any) `-`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignSeq(Vec<Sign>);

impl SignSeq {
    pub fn new(signs: Vec<Sign>) -> Result<SignSeq> {
        match signs.as_slice() {
            [] => Err(Error::InvalidSigns("empty sequence".into())),
            [Sign::Minus, ..] => Err(Error::InvalidSigns("first sign must be '+'".into())),
            [_, Sign::Plus, ..] => Err(Error::InvalidSigns("second sign must be '-'".into())),
            _ => Ok(SignSeq(signs)),
        }
    }

    /// The unique 1-sign `(+)`.
    pub fn vacuum() -> SignSeq {
        SignSeq(vec![Sign::Plus])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }
}

impl fmt::Display for SignSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_signs(&self.0))
    }
}

impl fmt::Debug for SignSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignSeq({self})")
    }
}

impl FromStr for SignSeq {
    type Err = Error;

    fn from_str(s: &str) -> Result<SignSeq> {
        SignSeq::new(parse_signs(s)?)
    }
}

fn tree_signs(t: &Tree, root: Sign, out: &mut Vec<Sign>) {
    match t {
        Tree::Leaf => out.push(root),
        Tree::Caret(l, r) => {
            tree_signs(l, root, out);
            tree_signs(r, !root, out);
        }
    }
}

/// Leaf colouring of a single tree whose root carries `root`.
pub fn propagate_tree(t: &Tree, root: Sign) -> Vec<Sign> {
    let mut out = Vec::with_capacity(t.leaf_count());
    tree_signs(t, root, &mut out);
    out
}

/// The sign sequence `f(σ)` read off the leaves of `f`.
pub fn propagate(f: &Forest, sigma: &SignSeq) -> Result<SignSeq> {
    if f.root_count() != sigma.len() {
        return Err(Error::DimensionMismatch {
            expected: f.root_count(),
            found: sigma.len(),
        });
    }
    let mut out = Vec::with_capacity(f.leaf_count());
    for (t, &s) in f.trees().iter().zip(sigma.signs()) {
        tree_signs(t, s, &mut out);
    }
    Ok(SignSeq(out))
}

/// Row-rewriting form of [`propagate`]: apply caret insertions (1-based
/// positions) one at a time to a raw sign row.
pub fn propagate_insertions(positions: &[usize], row: &[Sign]) -> Result<Vec<Sign>> {
    let mut row = row.to_vec();
    for &p in positions {
        if p == 0 || p > row.len() {
            return Err(Error::IndexOutOfRange {
                index: p,
                len: row.len(),
            });
        }
        let a = row[p - 1];
        row.insert(p, !a);
    }
    Ok(row)
}

/// `f(g(σ)) == (f∘g)(σ)`.
pub fn check_functorial(f: &Forest, g: &Forest, sigma: &SignSeq) -> Result<bool> {
    let stepwise = propagate(f, &propagate(g, sigma)?)?;
    let composed = propagate(&f.compose(g)?, sigma)?;
    Ok(stepwise == composed)
}

/// Membership in the oriented subgroup: both trees carry `(+)` to the same
/// n-sign. Invariant under adding opposing carets, so no reduction needed.
pub fn is_oriented(g: &GroupElement) -> bool {
    propagate_tree(g.plus(), Sign::Plus) == propagate_tree(g.minus(), Sign::Plus)
}

/// Common leaf object of an oriented element, or `None` outside the subgroup.
pub fn oriented_object(g: &GroupElement) -> Option<SignSeq> {
    let p = propagate_tree(g.plus(), Sign::Plus);
    (p == propagate_tree(g.minus(), Sign::Plus)).then_some(SignSeq(p))
}

pub const MAX_ENUMERATION_LEAVES: usize = 8;

/// All reduced oriented elements with at most `max_leaves` leaves, ordered by
/// leaf count then by the text of `(plus, minus)`.
pub fn enumerate_oriented(max_leaves: usize) -> Result<Vec<GroupElement>> {
    if max_leaves > MAX_ENUMERATION_LEAVES {
        return Err(Error::Guard(max_leaves, MAX_ENUMERATION_LEAVES));
    }
    let mut out = Vec::new();
    for n in 1..=max_leaves {
        let trees = Tree::all_with_leaves(n);
        let signs: Vec<Vec<Sign>> = trees
            .iter()
            .map(|t| propagate_tree(t, Sign::Plus))
            .collect();
        let mut by_sign: HashMap<&[Sign], Vec<usize>> = HashMap::new();
        for (i, s) in signs.iter().enumerate() {
            by_sign.entry(s.as_slice()).or_default().push(i);
        }
        for (i, p) in trees.iter().enumerate() {
            for &j in &by_sign[signs[i].as_slice()] {
                let g = GroupElement::new(p.clone(), trees[j].clone()).unwrap();
                if g.is_reduced() {
                    out.push(g);
                }
            }
        }
    }
    Ok(out)
}
