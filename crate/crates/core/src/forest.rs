//! Planar rooted binary trees, binary forests and Thompson's group F as
//! reduced pairs of trees.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Root-to-node address of a caret: `false` = left, `true` = right.
pub type Address = Vec<bool>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tree {
    Leaf,
    Caret(Box<Tree>, Box<Tree>),
}

impl Tree {
    pub fn caret(left: Tree, right: Tree) -> Tree {
        Tree::Caret(Box::new(left), Box::new(right))
    }

    /// The tree with exactly one caret.
    pub fn single() -> Tree {
        Tree::caret(Tree::Leaf, Tree::Leaf)
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Tree::Leaf)
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Tree::Leaf => 1,
            Tree::Caret(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    pub fn caret_count(&self) -> usize {
        self.leaf_count() - 1
    }

    /// Set of caret addresses. Prefix-closed.
    pub fn carets(&self) -> BTreeSet<Address> {
        fn walk(t: &Tree, path: &mut Address, out: &mut BTreeSet<Address>) {
            if let Tree::Caret(l, r) = t {
                out.insert(path.clone());
                path.push(false);
                walk(l, path, out);
                path.pop();
                path.push(true);
                walk(r, path, out);
                path.pop();
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// Rebuild the subtree rooted at `at` from a prefix-closed caret set.
    pub fn from_carets(carets: &BTreeSet<Address>, at: &[bool]) -> Tree {
        if !carets.contains(at) {
            return Tree::Leaf;
        }
        let mut left = at.to_vec();
        left.push(false);
        let mut right = at.to_vec();
        right.push(true);
        Tree::caret(
            Tree::from_carets(carets, &left),
            Tree::from_carets(carets, &right),
        )
    }

    /// Addresses of the leaves, left to right.
    pub fn leaf_addresses(&self) -> Vec<Address> {
        fn walk(t: &Tree, path: &mut Address, out: &mut Vec<Address>) {
            match t {
                Tree::Leaf => out.push(path.clone()),
                Tree::Caret(l, r) => {
                    path.push(false);
                    walk(l, path, out);
                    path.pop();
                    path.push(true);
                    walk(r, path, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// Replace the leaves, in order, by the trees yielded from `subs`.
    fn graft<I: Iterator<Item = Tree>>(&self, subs: &mut I) -> Tree {
        match self {
            Tree::Leaf => subs.next().expect("graft: too few trees"),
            Tree::Caret(l, r) => {
                let l = l.graft(subs);
                let r = r.graft(subs);
                Tree::caret(l, r)
            }
        }
    }

    /// 0-based leaf indices `i` such that leaves `i` and `i+1` hang from a
    /// common caret.
    pub fn exposed_carets(&self) -> Vec<usize> {
        fn walk(t: &Tree, offset: usize, out: &mut Vec<usize>) -> usize {
            match t {
                Tree::Leaf => 1,
                Tree::Caret(l, r) => {
                    if l.is_leaf() && r.is_leaf() {
                        out.push(offset);
                        return 2;
                    }
                    let nl = walk(l, offset, out);
                    let nr = walk(r, offset + nl, out);
                    nl + nr
                }
            }
        }
        let mut out = Vec::new();
        walk(self, 0, &mut out);
        out
    }

    /// Collapse the exposed caret whose left leaf is leaf `i` (0-based).
    fn collapse(&self, i: usize) -> Tree {
        fn walk(t: &Tree, offset: usize, i: usize) -> Tree {
            match t {
                Tree::Leaf => Tree::Leaf,
                Tree::Caret(l, r) => {
                    if offset == i && l.is_leaf() && r.is_leaf() {
                        return Tree::Leaf;
                    }
                    let nl = l.leaf_count();
                    Tree::caret(walk(l, offset, i), walk(r, offset + nl, i))
                }
            }
        }
        walk(self, 0, i)
    }

    /// Attach a caret to leaf `i` (0-based).
    pub fn attach(&self, i: usize) -> Tree {
        let mut subs =
            (0..self.leaf_count()).map(|j| if j == i { Tree::single() } else { Tree::Leaf });
        self.graft(&mut subs)
    }

    /// All trees with exactly `n` leaves, in increasing text order.
    pub fn all_with_leaves(n: usize) -> Vec<Tree> {
        fn build(n: usize) -> Vec<Tree> {
            if n == 1 {
                return vec![Tree::Leaf];
            }
            let mut out = Vec::new();
            for k in 1..n {
                let lefts = build(k);
                let rights = build(n - k);
                for l in &lefts {
                    for r in &rights {
                        out.push(Tree::caret(l.clone(), r.clone()));
                    }
                }
            }
            out
        }
        assert!(n >= 1);
        let mut out = build(n);
        out.sort_by_cached_key(|t| t.to_string());
        out
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Leaf => write!(f, "l"),
            Tree::Caret(l, r) => write!(f, "({l}{r})"),
        }
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Tree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Tree> {
        let bytes: Vec<(usize, u8)> = s
            .bytes()
            .enumerate()
            .filter(|(_, b)| !b.is_ascii_whitespace())
            .collect();
        let mut pos = 0;
        let tree = parse_tree(&bytes, &mut pos)?;
        if pos != bytes.len() {
            return Err(Error::Parse {
                pos: bytes[pos].0,
                msg: "trailing input after tree".into(),
            });
        }
        Ok(tree)
    }
}

fn parse_tree(bytes: &[(usize, u8)], pos: &mut usize) -> Result<Tree> {
    let end = bytes.last().map_or(0, |(i, _)| i + 1);
    let Some(&(at, b)) = bytes.get(*pos) else {
        return Err(Error::Parse {
            pos: end,
            msg: "unexpected end of tree".into(),
        });
    };
    *pos += 1;
    match b {
        b'l' => Ok(Tree::Leaf),
        b'(' => {
            let l = parse_tree(bytes, pos)?;
            let r = parse_tree(bytes, pos)?;
            match bytes.get(*pos) {
                Some(&(_, b')')) => {
                    *pos += 1;
                    Ok(Tree::caret(l, r))
                }
                Some(&(p, _)) => Err(Error::Parse {
                    pos: p,
                    msg: "expected ')'".into(),
                }),
                None => Err(Error::Parse {
                    pos: end,
                    msg: "expected ')'".into(),
                }),
            }
        }
        _ => Err(Error::Parse {
            pos: at,
            msg: format!("unexpected character '{}'", b as char),
        }),
    }
}

/// An ordered sequence of trees: a morphism from `root_count` to `leaf_count`
/// in the category of binary planar forests.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Forest {
    trees: Vec<Tree>,
}

impl Forest {
    pub fn new(trees: Vec<Tree>) -> Forest {
        Forest { trees }
    }

    pub fn identity(n: usize) -> Forest {
        Forest {
            trees: vec![Tree::Leaf; n],
        }
    }

    pub fn from_tree(t: Tree) -> Forest {
        Forest { trees: vec![t] }
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn root_count(&self) -> usize {
        self.trees.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.trees.iter().map(Tree::leaf_count).sum()
    }

    pub fn caret_count(&self) -> usize {
        self.leaf_count() - self.root_count()
    }

    /// Build a forest on `roots` roots from caret insertions, each a 1-based
    /// position in the current leaf row, applied in order.
    pub fn from_insertions(roots: usize, positions: &[usize]) -> Result<Forest> {
        let mut carets: Vec<BTreeSet<Address>> = vec![BTreeSet::new(); roots];
        let mut row: Vec<(usize, Address)> = (0..roots).map(|r| (r, Vec::new())).collect();
        for &p in positions {
            if p == 0 || p > row.len() {
                return Err(Error::IndexOutOfRange {
                    index: p,
                    len: row.len(),
                });
            }
            let (root, addr) = row[p - 1].clone();
            carets[root].insert(addr.clone());
            let mut left = addr.clone();
            left.push(false);
            let mut right = addr;
            right.push(true);
            row.splice(p - 1..p, [(root, left), (root, right)]);
        }
        Ok(Forest {
            trees: carets.iter().map(|c| Tree::from_carets(c, &[])).collect(),
        })
    }

    /// Canonical insertion schedule: carets in depth-first, left-to-right
    /// order, each at its 1-based position in the row at insertion time.
    pub fn insertions(&self) -> Vec<usize> {
        fn walk(t: &Tree, first_leaf: usize, out: &mut Vec<usize>) {
            if let Tree::Caret(l, r) = t {
                out.push(first_leaf);
                walk(l, first_leaf, out);
                walk(r, first_leaf + l.leaf_count(), out);
            }
        }
        let mut out = Vec::new();
        let mut first = 1;
        for t in &self.trees {
            walk(t, first, &mut out);
            first += t.leaf_count();
        }
        out
    }

    /// `self ∘ lower`: `lower` is applied first and `self` grows on its leaves.
    pub fn compose(&self, lower: &Forest) -> Result<Forest> {
        if self.root_count() != lower.leaf_count() {
            return Err(Error::DimensionMismatch {
                expected: lower.leaf_count(),
                found: self.root_count(),
            });
        }
        let mut subs = self.trees.iter().cloned();
        let trees = lower.trees.iter().map(|t| t.graft(&mut subs)).collect();
        Ok(Forest { trees })
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, t) in self.trees.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "]")
    }
}

/// Least common upper bound of two trees: forests `p`, `q` with
/// `p ∘ s = q ∘ t`, the common tree being the union of caret sets.
pub fn common_refinement(s: &Tree, t: &Tree) -> (Forest, Forest) {
    let union: BTreeSet<Address> = s.carets().union(&t.carets()).cloned().collect();
    let grow = |tree: &Tree| {
        Forest::new(
            tree.leaf_addresses()
                .iter()
                .map(|a| Tree::from_carets(&union, a))
                .collect(),
        )
    };
    (grow(s), grow(t))
}

/// An element of Thompson's group F as a pair of trees with equal leaf count.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GroupElement {
    plus: Tree,
    minus: Tree,
}

impl GroupElement {
    pub fn new(plus: Tree, minus: Tree) -> Result<GroupElement> {
        if plus.leaf_count() != minus.leaf_count() {
            return Err(Error::DimensionMismatch {
                expected: plus.leaf_count(),
                found: minus.leaf_count(),
            });
        }
        Ok(GroupElement { plus, minus })
    }

    pub fn identity() -> GroupElement {
        GroupElement {
            plus: Tree::Leaf,
            minus: Tree::Leaf,
        }
    }

    pub fn x0() -> GroupElement {
        GroupElement {
            plus: "((ll)l)".parse().unwrap(),
            minus: "(l(ll))".parse().unwrap(),
        }
    }

    pub fn x1() -> GroupElement {
        GroupElement {
            plus: "(l((ll)l))".parse().unwrap(),
            minus: "(l(l(ll)))".parse().unwrap(),
        }
    }

    pub fn plus(&self) -> &Tree {
        &self.plus
    }

    pub fn minus(&self) -> &Tree {
        &self.minus
    }

    pub fn leaf_count(&self) -> usize {
        self.plus.leaf_count()
    }

    pub fn caret_count(&self) -> usize {
        self.plus.caret_count() + self.minus.caret_count()
    }

    /// Leaf indices of carets that are exposed in both trees at once.
    pub fn cancellable(&self) -> Vec<usize> {
        let theirs = self.minus.exposed_carets();
        self.plus
            .exposed_carets()
            .into_iter()
            .filter(|i| theirs.contains(i))
            .collect()
    }

    pub fn is_reduced(&self) -> bool {
        self.cancellable().is_empty()
    }

    /// Remove the common caret at leaf `i` from both trees.
    pub fn cancel(&self, i: usize) -> Result<GroupElement> {
        if !self.cancellable().contains(&i) {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.leaf_count(),
            });
        }
        Ok(GroupElement {
            plus: self.plus.collapse(i),
            minus: self.minus.collapse(i),
        })
    }

    /// Add a pair of opposing carets at leaf `i` (0-based).
    pub fn stabilize(&self, i: usize) -> Result<GroupElement> {
        if i >= self.leaf_count() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.leaf_count(),
            });
        }
        Ok(GroupElement {
            plus: self.plus.attach(i),
            minus: self.minus.attach(i),
        })
    }

    /// Cancel common carets until none is left.
    pub fn reduce(&self) -> GroupElement {
        self.reduce_by(|c| c[0])
    }

    /// Like [`reduce`](Self::reduce), with `pick` choosing which cancellable
    /// caret goes next.
    pub fn reduce_by(&self, mut pick: impl FnMut(&[usize]) -> usize) -> GroupElement {
        let mut g = self.clone();
        loop {
            let c = g.cancellable();
            if c.is_empty() {
                return g;
            }
            let i = pick(&c);
            g = GroupElement {
                plus: g.plus.collapse(i),
                minus: g.minus.collapse(i),
            };
        }
    }

    pub fn invert(&self) -> GroupElement {
        GroupElement {
            plus: self.minus.clone(),
            minus: self.plus.clone(),
        }
    }

    /// `(A⁺, A⁻)·(B⁺, B⁻)`: align `A⁻` with `B⁺` over their common refinement.
    pub fn multiply(&self, other: &GroupElement) -> GroupElement {
        self.multiply_unreduced(other).reduce()
    }

    pub fn multiply_unreduced(&self, other: &GroupElement) -> GroupElement {
        let (p, q) = common_refinement(&self.minus, &other.plus);
        let plus = p.compose(&Forest::from_tree(self.plus.clone())).unwrap();
        let minus = q.compose(&Forest::from_tree(other.minus.clone())).unwrap();
        GroupElement {
            plus: plus.trees[0].clone(),
            minus: minus.trees[0].clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.reduce().plus.is_leaf()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.plus, self.minus)
    }
}

/// JSON form `{"plus":"((ll)l)","minus":"(l(ll))"}`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ElementJson {
    pub plus: String,
    pub minus: String,
}

impl From<&GroupElement> for ElementJson {
    fn from(g: &GroupElement) -> Self {
        ElementJson {
            plus: g.plus.to_string(),
            minus: g.minus.to_string(),
        }
    }
}

impl TryFrom<&ElementJson> for GroupElement {
    type Error = Error;

    fn try_from(j: &ElementJson) -> Result<Self> {
        GroupElement::new(j.plus.parse()?, j.minus.parse()?)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Generator {
    X0,
    X0Inv,
    X1,
    X1Inv,
}

impl Generator {
    pub fn element(self) -> GroupElement {
        match self {
            Generator::X0 => GroupElement::x0(),
            Generator::X0Inv => GroupElement::x0().invert(),
            Generator::X1 => GroupElement::x1(),
            Generator::X1Inv => GroupElement::x1().invert(),
        }
    }

    pub fn inverse(self) -> Generator {
        match self {
            Generator::X0 => Generator::X0Inv,
            Generator::X0Inv => Generator::X0,
            Generator::X1 => Generator::X1Inv,
            Generator::X1Inv => Generator::X1,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::X0 => "x0",
            Generator::X0Inv => "x0^-1",
            Generator::X1 => "x1",
            Generator::X1Inv => "x1^-1",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct GeneratorWord(pub Vec<Generator>);

impl GeneratorWord {
    pub fn eval(&self) -> GroupElement {
        self.0.iter().fold(GroupElement::identity(), |acc, g| {
            acc.multiply(&g.element())
        })
    }

    pub fn inverse(&self) -> GeneratorWord {
        GeneratorWord(self.0.iter().rev().map(|g| g.inverse()).collect())
    }

    pub fn concat(&self, other: &GeneratorWord) -> GeneratorWord {
        GeneratorWord(self.0.iter().chain(&other.0).copied().collect())
    }
}

impl FromStr for GeneratorWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<GeneratorWord> {
        let mut out = Vec::new();
        let mut offset = 0;
        for tok in s.split_whitespace() {
            let pos = offset + s[offset..].find(tok).unwrap_or(0);
            offset = pos + tok.len();
            let g = match tok {
                "x0" => Generator::X0,
                "x1" => Generator::X1,
                "x0^-1" | "x0⁻¹" => Generator::X0Inv,
                "x1^-1" | "x1⁻¹" => Generator::X1Inv,
                _ => {
                    return Err(Error::Parse {
                        pos,
                        msg: format!("unknown generator '{tok}'"),
                    })
                }
            };
            out.push(g);
        }
        Ok(GeneratorWord(out))
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}
