//! Exact HOMFLYPT polynomials by descending-diagram skein recursion.
//!
//! Convention: `a·P(L₊) − a⁻¹·P(L₋) = z·P(L₀)`, `P(unknot) = 1`, so a distant
//! unknot multiplies by `δ = (a − a⁻¹)/z`. A crossing is positive when
//! `over × under > 0` for the strand directions.
//!
//! Diagrams are reduced to signed Gauss codes. Greedy Reidemeister I/II
//! cancellation runs first, split pieces factor off, and every remaining
//! piece is memoized under a relabelling-invariant code.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use dashmap::DashMap;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::GroupElement;
use crate::laurent::{LaurentJson, LaurentPoly};
use crate::tangle::{build_link, Convention, GaussCode, LinkDiagram, Tangle};

pub type ComplexValue = Complex64;

/// Root-of-unity evaluation point `s = e^{iπ/r}`, `a = s^{−2k}`, `z = s − s⁻¹`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct EvalParams {
    pub r: u32,
    pub k: u32,
}

impl EvalParams {
    pub fn new(r: u32, k: u32) -> Result<EvalParams> {
        if r < 3 {
            return Err(Error::InvalidParams(format!(
                "r must be at least 3, got {r}"
            )));
        }
        if k < 1 {
            return Err(Error::InvalidParams("k must be positive".into()));
        }
        Ok(EvalParams { r, k })
    }

    /// Range where positivity is guaranteed.
    pub fn in_range(&self) -> bool {
        self.r >= self.k + 2
    }

    pub fn s(&self) -> Complex64 {
        Complex64::from_polar(1.0, PI / self.r as f64)
    }

    pub fn a(&self) -> Complex64 {
        Complex64::from_polar(1.0, -2.0 * self.k as f64 * PI / self.r as f64)
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(0.0, 2.0 * (PI / self.r as f64).sin())
    }

    /// `δ = −sin(2kπ/r)/sin(π/r)`.
    pub fn delta(&self) -> f64 {
        let (r, k) = (self.r as f64, self.k as f64);
        -(2.0 * k * PI / r).sin() / (PI / r).sin()
    }

    pub fn delta_is_zero(&self) -> bool {
        (2 * self.k).is_multiple_of(self.r)
    }

    pub fn nonzero_delta(&self) -> Result<f64> {
        if self.delta_is_zero() {
            return Err(Error::DegenerateDelta {
                r: self.r,
                k: self.k,
            });
        }
        Ok(self.delta())
    }
}

/// Symbolic loop value.
pub fn delta_sym() -> LaurentPoly {
    LaurentPoly::delta()
}

pub fn delta_num(p: EvalParams) -> f64 {
    p.delta()
}

/// Substitute `a = e^{−2kiπ/r}`, `z = 2i·sin(π/r)` with compensated summation.
pub fn evaluate(q: &LaurentPoly, p: EvalParams) -> Complex64 {
    let theta = -2.0 * p.k as f64 * PI / p.r as f64;
    let zmod = 2.0 * (PI / p.r as f64).sin();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    for (i, j, c) in q.float_terms() {
        // a^i z^j = zmod^j · e^{i(iθ + jπ/2)}
        let angle = i as f64 * theta + j as f64 * PI / 2.0;
        let term = Complex64::from_polar(c * zmod.powi(j), angle);
        // Neumaier summation, componentwise
        let t = sum + term;
        for (s, x, tt, cc) in [
            (sum.re, term.re, t.re, &mut comp.re),
            (sum.im, term.im, t.im, &mut comp.im),
        ] {
            if s.abs() >= x.abs() {
                *cc += (s - tt) + x;
            } else {
                *cc += (x - tt) + s;
            }
        }
        sum = t;
    }
    sum + comp
}

/// Output scaling: `Std` has unknot ↦ 1, `Loop` has unknot ↦ δ.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    #[default]
    Std,
    Loop,
}

impl std::str::FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "std" => Ok(Normalization::Std),
            "loop" => Ok(Normalization::Loop),
            _ => Err(Error::Parse {
                pos: 0,
                msg: format!("unknown normalization '{s}'"),
            }),
        }
    }
}

impl Normalization {
    pub fn apply(&self, p: LaurentPoly) -> LaurentPoly {
        match self {
            Normalization::Std => p,
            Normalization::Loop => &p * &LaurentPoly::delta(),
        }
    }
}

// ---------------------------------------------------------------------------
// Gauss diagrams

/// Visit `2·crossing + over`.
type Visit = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Gauss {
    comps: Vec<Vec<Visit>>,
    signs: Vec<i8>,
    loops: usize,
}

fn crossing(v: Visit) -> usize {
    (v >> 1) as usize
}

fn is_over(v: Visit) -> bool {
    v & 1 == 1
}

impl From<&GaussCode> for Gauss {
    fn from(g: &GaussCode) -> Gauss {
        Gauss {
            comps: g
                .comps
                .iter()
                .map(|c| c.iter().map(|&(x, o)| (x as u32) << 1 | o as u32).collect())
                .collect(),
            signs: g.signs.clone(),
            loops: g.loops,
        }
    }
}

impl Gauss {
    /// Drop empty components into the loop count and renumber crossings
    /// densely in order of appearance.
    fn compact(mut self) -> Gauss {
        let before = self.comps.len();
        self.comps.retain(|c| !c.is_empty());
        self.loops += before - self.comps.len();
        let mut relabel = vec![u32::MAX; self.signs.len()];
        let mut signs = Vec::new();
        for comp in &mut self.comps {
            for v in comp.iter_mut() {
                let c = crossing(*v);
                if relabel[c] == u32::MAX {
                    relabel[c] = signs.len() as u32;
                    signs.push(self.signs[c]);
                }
                *v = relabel[c] << 1 | (*v & 1);
            }
        }
        self.signs = signs;
        self
    }

    fn crossing_count(&self) -> usize {
        self.signs.len()
    }

    /// Positions `(comp, index)` of the two visits of every crossing.
    fn positions(&self) -> Vec<[(usize, usize); 2]> {
        let mut pos = vec![[(usize::MAX, 0); 2]; self.signs.len()];
        for (ci, comp) in self.comps.iter().enumerate() {
            for (i, &v) in comp.iter().enumerate() {
                let slot = &mut pos[crossing(v)];
                if slot[0].0 == usize::MAX {
                    slot[0] = (ci, i);
                } else {
                    slot[1] = (ci, i);
                }
            }
        }
        pos
    }

    fn remove_crossings(&mut self, dead: &[usize]) {
        for comp in &mut self.comps {
            comp.retain(|v| !dead.contains(&crossing(*v)));
        }
    }

    /// One greedy Reidemeister I or II cancellation; `false` if none applies.
    fn simplify_once(&mut self) -> bool {
        // R1: a crossing visited twice in a row
        for comp in &self.comps {
            let n = comp.len();
            for i in 0..n {
                let j = (i + 1) % n;
                if i != j && crossing(comp[i]) == crossing(comp[j]) {
                    let c = crossing(comp[i]);
                    self.remove_crossings(&[c]);
                    return true;
                }
            }
        }
        // R2: two crossings joined by an over-over segment and an under-under
        // segment
        let mut over_pairs: Vec<(usize, usize)> = Vec::new();
        let mut under_pairs: Vec<(usize, usize)> = Vec::new();
        for comp in &self.comps {
            let n = comp.len();
            if n < 2 {
                continue;
            }
            for i in 0..n {
                let (u, v) = (comp[i], comp[(i + 1) % n]);
                let (cu, cv) = (crossing(u), crossing(v));
                if cu == cv || is_over(u) != is_over(v) {
                    continue;
                }
                let key = (cu.min(cv), cu.max(cv));
                if is_over(u) {
                    over_pairs.push(key);
                } else {
                    under_pairs.push(key);
                }
            }
        }
        for p in &over_pairs {
            if under_pairs.contains(p) && self.signs[p.0] != self.signs[p.1] {
                self.remove_crossings(&[p.0, p.1]);
                return true;
            }
        }
        false
    }

    fn simplify(mut self) -> Gauss {
        while self.simplify_once() {}
        self.compact()
    }

    /// Split into pieces that share no crossing.
    fn pieces(&self) -> Vec<Gauss> {
        let n = self.comps.len();
        let mut owner = vec![usize::MAX; self.signs.len()];
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for (ci, comp) in self.comps.iter().enumerate() {
            for &v in comp {
                let c = crossing(v);
                if owner[c] == usize::MAX {
                    owner[c] = ci;
                } else {
                    let (a, b) = (find(&mut parent, owner[c]), find(&mut parent, ci));
                    parent[a] = b;
                }
            }
        }
        let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
        for ci in 0..n {
            let r = find(&mut parent, ci);
            match groups.iter_mut().find(|g| g.0 == r) {
                Some(g) => g.1.push(ci),
                None => groups.push((r, vec![ci])),
            }
        }
        groups
            .into_iter()
            .map(|(_, members)| {
                Gauss {
                    comps: members.iter().map(|&i| self.comps[i].clone()).collect(),
                    signs: self.signs.clone(),
                    loops: 0,
                }
                .compact()
            })
            .collect()
    }

    /// Serialization of one traversal: first component from `start` in the
    /// given direction, later components starting at their visit of the
    /// lowest already-labelled crossing. Returns the code and the traversal
    /// as `(component, start, forward)` triples.
    fn traversal_code(
        &self,
        first: usize,
        start: usize,
        forward: bool,
    ) -> (Vec<u32>, Vec<(usize, usize)>) {
        let nc = self.signs.len();
        let mut label = vec![u32::MAX; nc];
        let mut next = 0u32;
        let mut code = Vec::with_capacity(2 * nc + self.comps.len());
        let mut done = vec![false; self.comps.len()];
        let mut order = Vec::with_capacity(self.comps.len());
        let mut cur = (first, start);
        loop {
            let (ci, s) = cur;
            done[ci] = true;
            order.push((ci, s));
            let comp = &self.comps[ci];
            let n = comp.len();
            for t in 0..n {
                let idx = if forward {
                    (s + t) % n
                } else {
                    (s + n - t) % n
                };
                let v = comp[idx];
                let c = crossing(v);
                if label[c] == u32::MAX {
                    label[c] = next;
                    next += 1;
                }
                code.push(label[c] << 2 | (v & 1) << 1 | (self.signs[c] > 0) as u32);
            }
            code.push(u32::MAX);
            // next component: the lowest labelled crossing on an unfinished one
            let mut best: Option<(u32, usize, usize)> = None;
            for (cj, comp) in self.comps.iter().enumerate() {
                if done[cj] {
                    continue;
                }
                for (i, &v) in comp.iter().enumerate() {
                    let l = label[crossing(v)];
                    if l != u32::MAX && best.is_none_or(|b| l < b.0) {
                        best = Some((l, cj, i));
                    }
                }
            }
            match best {
                Some((_, cj, i)) => cur = (cj, i),
                None => break,
            }
        }
        (code, order)
    }

    /// Minimal traversal code over every first component, start and global
    /// direction. Only meaningful for a connected piece.
    fn canonical(&self) -> (Vec<u32>, bool, Vec<(usize, usize)>) {
        let mut best: Option<(Vec<u32>, bool, Vec<(usize, usize)>)> = None;
        for (ci, comp) in self.comps.iter().enumerate() {
            for s in 0..comp.len() {
                for fwd in [true, false] {
                    let (code, order) = self.traversal_code(ci, s, fwd);
                    if best.as_ref().is_none_or(|b| code < b.0) {
                        best = Some((code, fwd, order));
                    }
                }
            }
        }
        best.unwrap()
    }

    fn reversed(&self) -> Gauss {
        Gauss {
            comps: self
                .comps
                .iter()
                .map(|c| c.iter().rev().copied().collect())
                .collect(),
            signs: self.signs.clone(),
            loops: self.loops,
        }
    }

    fn switch(&mut self, c: usize) {
        for comp in &mut self.comps {
            for v in comp.iter_mut() {
                if crossing(*v) == c {
                    *v ^= 1;
                }
            }
        }
        self.signs[c] = -self.signs[c];
    }

    /// Oriented smoothing at `c`: splits a component or merges two.
    fn smooth(&self, c: usize) -> Gauss {
        let pos = self.positions()[c];
        let [(ci, p), (cj, q)] = pos;
        let mut comps: Vec<Vec<Visit>> = Vec::with_capacity(self.comps.len() + 1);
        for (i, comp) in self.comps.iter().enumerate() {
            if i != ci && i != cj {
                comps.push(comp.clone());
            }
        }
        if ci == cj {
            let comp = &self.comps[ci];
            let (p, q) = (p.min(q), p.max(q));
            comps.push(comp[p + 1..q].to_vec());
            let mut rest = comp[q + 1..].to_vec();
            rest.extend_from_slice(&comp[..p]);
            comps.push(rest);
        } else {
            let (a, b) = (&self.comps[ci], &self.comps[cj]);
            let mut merged = a[p + 1..].to_vec();
            merged.extend_from_slice(&a[..p]);
            merged.extend_from_slice(&b[q + 1..]);
            merged.extend_from_slice(&b[..q]);
            comps.push(merged);
        }
        let mut signs = self.signs.clone();
        signs[c] = 0;
        Gauss {
            comps,
            signs,
            loops: self.loops,
        }
        .compact()
    }
}

// ---------------------------------------------------------------------------
// Engine

#[derive(Serialize, Deserialize)]
struct SpillEntry {
    code: Vec<u32>,
    poly: LaurentJson,
}

/// HOMFLYPT evaluator with a memo table that is safe to share across threads.
pub struct HomflyEngine {
    memo: Option<DashMap<Vec<u32>, LaurentPoly>>,
    spill: Option<PathBuf>,
}

impl Default for HomflyEngine {
    fn default() -> Self {
        Self::new()
    }
}

impl HomflyEngine {
    pub fn new() -> Self {
        HomflyEngine {
            memo: Some(DashMap::new()),
            spill: None,
        }
    }

    /// No memo table; every piece is recomputed.
    pub fn without_memo() -> Self {
        HomflyEngine {
            memo: None,
            spill: None,
        }
    }

    /// Memo table seeded from, and saved to, `dir/homfly-memo.jsonl`.
    pub fn with_spill_dir(dir: impl Into<PathBuf>) -> Result<Self> {
        let path = dir.into().join("homfly-memo.jsonl");
        let memo = DashMap::new();
        if path.exists() {
            for line in fs::read_to_string(&path)?
                .lines()
                .filter(|l| !l.trim().is_empty())
            {
                let e: SpillEntry = serde_json::from_str(line)?;
                memo.insert(e.code, LaurentPoly::from_json(&e.poly)?);
            }
        }
        Ok(HomflyEngine {
            memo: Some(memo),
            spill: Some(path),
        })
    }

    /// Engine honouring `THL_CACHE_DIR` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os("THL_CACHE_DIR") {
            Some(d) if !d.is_empty() => Self::with_spill_dir(PathBuf::from(d)),
            _ => Ok(Self::new()),
        }
    }

    /// Write the memo table to the spill file, entries sorted by code.
    pub fn save(&self) -> Result<()> {
        let (Some(memo), Some(path)) = (&self.memo, &self.spill) else {
            return Ok(());
        };
        let mut entries: Vec<(Vec<u32>, LaurentPoly)> = memo
            .iter()
            .map(|e| (e.key().clone(), e.value().clone()))
            .collect();
        entries.sort_by(|x, y| x.0.cmp(&y.0));
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let tmp = path.with_extension("tmp");
        let mut f = fs::File::create(&tmp)?;
        for (code, poly) in entries {
            let line = serde_json::to_string(&SpillEntry {
                code,
                poly: poly.to_json(),
            })?;
            writeln!(f, "{line}")?;
        }
        fs::rename(tmp, path)?;
        Ok(())
    }

    pub fn memo_len(&self) -> usize {
        self.memo.as_ref().map_or(0, |m| m.len())
    }

    /// HOMFLYPT polynomial of a closed oriented diagram.
    pub fn homfly(&self, d: &LinkDiagram) -> Result<LaurentPoly> {
        let g = d.gauss()?;
        Ok(self.of_gauss(Gauss::from(&g)))
    }

    pub fn homfly_tangle(&self, t: &Tangle) -> Result<LaurentPoly> {
        if t.bottom_count() + t.top_count() > 0 {
            return Err(Error::OpenBoundary(t.bottom_count() + t.top_count()));
        }
        self.homfly(&LinkDiagram::from_tangle(t.clone())?)
    }

    fn of_gauss(&self, g: Gauss) -> LaurentPoly {
        let g = g.compact().simplify();
        let pieces = g.pieces();
        let factors = pieces.len() + g.loops;
        let mut out = if factors == 0 {
            LaurentPoly::one()
        } else {
            LaurentPoly::delta().pow(factors as u32 - 1)
        };
        for piece in pieces {
            out = &out * &self.of_piece(&piece);
        }
        out
    }

    fn of_piece(&self, g: &Gauss) -> LaurentPoly {
        let (code, forward, order) = g.canonical();
        if let Some(memo) = &self.memo {
            if let Some(v) = memo.get(&code) {
                return v.clone();
            }
        }
        // follow the canonical traversal so the result is a function of the code
        let mut cur = if forward { g.clone() } else { g.reversed() };
        let order: Vec<(usize, usize)> = if forward {
            order
        } else {
            order
                .into_iter()
                .map(|(ci, s)| (ci, g.comps[ci].len() - 1 - s))
                .collect()
        };
        let mut walk: Vec<(usize, usize)> = Vec::new();
        for &(ci, s) in &order {
            let n = cur.comps[ci].len();
            walk.extend((0..n).map(|t| (ci, (s + t) % n)));
        }
        let z = LaurentPoly::monomial(1, 0, 1);
        let mut m = LaurentPoly::one();
        let mut acc = LaurentPoly::zero();
        let mut seen = vec![false; cur.crossing_count()];
        for (ci, i) in walk {
            let v = cur.comps[ci][i];
            let c = crossing(v);
            if seen[c] {
                continue;
            }
            seen[c] = true;
            if is_over(v) {
                continue;
            }
            let eps = cur.signs[c] as i32;
            let smoothed = self.of_gauss(cur.smooth(c));
            let coeff = LaurentPoly::monomial(eps, -eps, 0);
            acc += &(&(&m * &coeff) * &(&z * &smoothed));
            m = m.shift(-2 * eps, 0);
            cur.switch(c);
        }
        let k = cur.comps.len() as u32;
        acc += &(&m * &LaurentPoly::delta().pow(k - 1));
        if let Some(memo) = &self.memo {
            memo.insert(code, acc.clone());
        }
        acc
    }

    /// `φ(g) = P(L(g))/δ^{n−1}` at `p`, with `n` the leaf count of the reduced
    /// representative.
    pub fn phi(&self, g: &GroupElement, p: EvalParams, conv: Convention) -> Result<Complex64> {
        let r = g.reduce();
        let d = build_link(&r, conv)?;
        let poly = self.homfly(&d)?;
        let n = r.leaf_count();
        let val = evaluate(&poly, p);
        if n == 1 {
            return Ok(val);
        }
        let delta = p.nonzero_delta()?;
        Ok(val / delta.powi(n as i32 - 1))
    }

    /// HOMFLYPT of `L(g)` for the given representative, not reduced.
    pub fn link_poly(&self, g: &GroupElement, conv: Convention) -> Result<LaurentPoly> {
        self.homfly(&build_link(g, conv)?)
    }

    /// Pairing of two tangles with equal boundary: the closure of `t2* ∘ t1`.
    pub fn tangle_inner(&self, t1: &Tangle, t2: &Tangle) -> Result<LaurentPoly> {
        let b1 = t1.boundary().ok_or(Error::Unoriented)?;
        let b2 = t2.boundary().ok_or(Error::Unoriented)?;
        for (x, y) in [(&b1.bottom, &b2.bottom), (&b1.top, &b2.top)] {
            if x.len() != y.len() {
                return Err(Error::BoundaryMismatch {
                    index: x.len().min(y.len()),
                    msg: "tangles have different boundary sizes".into(),
                });
            }
            if let Some(i) = (0..x.len()).find(|&i| x[i] != y[i]) {
                return Err(Error::BoundaryMismatch {
                    index: i,
                    msg: "boundary signs differ".into(),
                });
            }
        }
        let s = Tangle::stack(&t2.star(), t1)?;
        let d = s.closure()?;
        self.homfly(&d)
    }
}
