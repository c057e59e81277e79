//! Conway tangles in a rectangle, closed link diagrams and the tree-pair
//! link construction.
//!
//! A tangle is a 4-valent planar map. Every crossing has four ports numbered
//! counterclockwise (south, east, north, west when drawn upright); ports `0–2`
//! and `1–3` carry the two strands. Arcs join ports and boundary points.
//! Boundary points sit on the bottom and top edges, numbered left to right.
//!
//! In an oriented tangle a boundary sign `+` means the strand runs upward
//! through that point, `-` downward. With this reading stacking glues equal
//! signs, and the object of an n-sign is the boundary orientation of its
//! shaded surface: leaf strand `i` carries `σ(i)` and the gap strand to its
//! left carries `¬σ(i)`.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::{Forest, GroupElement, Tree};
use crate::signs::{self, format_signs, parse_signs, Sign, SignSeq};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum End {
    Port(usize, u8),
    Bottom(usize),
    Top(usize),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Arc {
    pub tail: End,
    pub head: End,
}

impl Arc {
    fn reversed(self) -> Arc {
        Arc {
            tail: self.head,
            head: self.tail,
        }
    }

    fn other(&self, e: End) -> End {
        if self.tail == e {
            self.head
        } else {
            self.tail
        }
    }
}

/// Which strand passes over: ports `1–3` when `over_odd`, else ports `0–2`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Crossing {
    pub over_odd: bool,
}

impl Crossing {
    fn is_over_port(&self, port: u8) -> bool {
        (port % 2 == 1) == self.over_odd
    }
}

/// Handedness of the elementary caret crossing.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// The turn-back passes over the through-strand.
    #[default]
    Standard,
    /// The through-strand passes over the turn-back.
    Mirror,
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Convention::Standard),
            "mirror" => Ok(Convention::Mirror),
            _ => Err(Error::Parse {
                pos: 0,
                msg: format!("unknown convention '{s}'"),
            }),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BoundarySigns {
    pub bottom: Vec<Sign>,
    pub top: Vec<Sign>,
}

/// Odd-length boundary object of an n-sign: `(σ1, ¬σ2, σ2, ¬σ3, σ3, …)`.
pub fn object_signs(sigma: &SignSeq) -> Vec<Sign> {
    let s = sigma.signs();
    let mut out = Vec::with_capacity(2 * s.len() - 1);
    out.push(s[0]);
    for &x in &s[1..] {
        out.push(!x);
        out.push(x);
    }
    out
}

/// An endpoint while rebuilding a tangle; `Glue` points are fused away.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum RawEnd {
    Port(usize, u8),
    Bottom(usize),
    Top(usize),
    Glue(usize),
}

impl From<End> for RawEnd {
    fn from(e: End) -> RawEnd {
        match e {
            End::Port(c, p) => RawEnd::Port(c, p),
            End::Bottom(i) => RawEnd::Bottom(i),
            End::Top(i) => RawEnd::Top(i),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct RawSeg {
    tail: RawEnd,
    head: RawEnd,
}

fn seg(tail: RawEnd, head: RawEnd) -> RawSeg {
    RawSeg { tail, head }
}

/// Fuse segments at glue points into arcs; cycles through glue points only
/// become crossing-free loops. Returns the arcs and the number of new loops.
fn fuse(segs: &[RawSeg], oriented: bool) -> Result<(Vec<Arc>, usize)> {
    // glue id -> attachments (segment, is_head)
    let mut glue: HashMap<usize, Vec<(usize, bool)>> = HashMap::new();
    for (i, s) in segs.iter().enumerate() {
        if let RawEnd::Glue(g) = s.tail {
            glue.entry(g).or_default().push((i, false));
        }
        if let RawEnd::Glue(g) = s.head {
            glue.entry(g).or_default().push((i, true));
        }
    }
    for (g, at) in &glue {
        if at.len() != 2 {
            return Err(Error::BoundaryMismatch {
                index: *g,
                msg: format!("glue point used {} times", at.len()),
            });
        }
        if oriented && at[0].1 == at[1].1 {
            return Err(Error::BoundaryMismatch {
                index: *g,
                msg: "orientations do not match across the gluing".into(),
            });
        }
    }
    let real = |e: RawEnd| -> End {
        match e {
            RawEnd::Port(c, p) => End::Port(c, p),
            RawEnd::Bottom(i) => End::Bottom(i),
            RawEnd::Top(i) => End::Top(i),
            RawEnd::Glue(_) => unreachable!(),
        }
    };
    let mut used = vec![false; segs.len()];
    let mut arcs = Vec::new();
    // walk from a non-glue end: (segment, entering at head?)
    let mut starts: Vec<(usize, bool)> = Vec::new();
    for (i, s) in segs.iter().enumerate() {
        if !matches!(s.tail, RawEnd::Glue(_)) {
            starts.push((i, false));
        }
        if !matches!(s.head, RawEnd::Glue(_)) && (oriented || matches!(s.tail, RawEnd::Glue(_))) {
            starts.push((i, true));
        }
    }
    for (first, from_head) in starts {
        if used[first] {
            continue;
        }
        let start_end = if from_head {
            segs[first].head
        } else {
            segs[first].tail
        };
        let mut cur = first;
        let mut entered_at_head = from_head;
        loop {
            used[cur] = true;
            let exit = if entered_at_head {
                segs[cur].tail
            } else {
                segs[cur].head
            };
            match exit {
                RawEnd::Glue(g) => {
                    let att = &glue[&g];
                    let (next, at_head) = if att[0] == (cur, !entered_at_head) {
                        att[1]
                    } else {
                        att[0]
                    };
                    cur = next;
                    entered_at_head = at_head;
                }
                e => {
                    let arc = Arc {
                        tail: real(start_end),
                        head: real(e),
                    };
                    // when oriented, a walk entered at a head runs backwards
                    arcs.push(if oriented && from_head {
                        arc.reversed()
                    } else {
                        arc
                    });
                    break;
                }
            }
        }
    }
    let mut loops = 0;
    for i in 0..segs.len() {
        if used[i] {
            continue;
        }
        loops += 1;
        let mut cur = i;
        let mut entered_at_head = false;
        while !used[cur] {
            used[cur] = true;
            let exit = if entered_at_head {
                segs[cur].tail
            } else {
                segs[cur].head
            };
            let RawEnd::Glue(g) = exit else {
                unreachable!()
            };
            let att = &glue[&g];
            let (next, at_head) = if att[0] == (cur, !entered_at_head) {
                att[1]
            } else {
                att[0]
            };
            cur = next;
            entered_at_head = at_head;
        }
    }
    Ok((arcs, loops))
}

/// An (optionally oriented) tangle diagram.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Tangle {
    crossings: Vec<Crossing>,
    arcs: Vec<Arc>,
    n_bottom: usize,
    n_top: usize,
    signs: Option<BoundarySigns>,
    loops: usize,
}

/// Side of the face on the left of an arc traversed in a given direction.
pub type Dart = (usize, bool);

/// Corner of a crossing between port `k` and port `k+1`.
pub type Corner = (usize, u8);

impl Tangle {
    fn build(
        crossings: Vec<Crossing>,
        segs: &[RawSeg],
        n_bottom: usize,
        n_top: usize,
        signs: Option<BoundarySigns>,
        loops: usize,
    ) -> Result<Tangle> {
        let (arcs, extra) = fuse(segs, signs.is_some())?;
        Ok(Tangle {
            crossings,
            arcs,
            n_bottom,
            n_top,
            signs,
            loops: loops + extra,
        })
    }

    /// Vertical strands carrying `signs`.
    pub fn identity(signs: &[Sign]) -> Tangle {
        let arcs = signs
            .iter()
            .enumerate()
            .map(|(i, s)| match s {
                Sign::Plus => Arc {
                    tail: End::Bottom(i),
                    head: End::Top(i),
                },
                Sign::Minus => Arc {
                    tail: End::Top(i),
                    head: End::Bottom(i),
                },
            })
            .collect();
        Tangle {
            crossings: Vec::new(),
            arcs,
            n_bottom: signs.len(),
            n_top: signs.len(),
            signs: Some(BoundarySigns {
                bottom: signs.to_vec(),
                top: signs.to_vec(),
            }),
            loops: 0,
        }
    }

    pub fn identity_unoriented(n: usize) -> Tangle {
        Tangle {
            crossings: Vec::new(),
            arcs: (0..n)
                .map(|i| Arc {
                    tail: End::Bottom(i),
                    head: End::Top(i),
                })
                .collect(),
            n_bottom: n,
            n_top: n,
            signs: None,
            loops: 0,
        }
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    /// Closed components without crossings.
    pub fn free_loops(&self) -> usize {
        self.loops
    }

    pub fn bottom_count(&self) -> usize {
        self.n_bottom
    }

    pub fn top_count(&self) -> usize {
        self.n_top
    }

    pub fn boundary(&self) -> Option<&BoundarySigns> {
        self.signs.as_ref()
    }

    pub fn is_oriented(&self) -> bool {
        self.signs.is_some()
    }

    /// The first boundary point: leftmost bottom point, or leftmost top point
    /// when the bottom is empty.
    pub fn basepoint(&self) -> Option<End> {
        if self.n_bottom > 0 {
            Some(End::Bottom(0))
        } else if self.n_top > 0 {
            Some(End::Top(0))
        } else {
            None
        }
    }

    /// Forget orientations.
    pub fn unoriented(&self) -> Tangle {
        Tangle {
            signs: None,
            ..self.clone()
        }
    }

    /// Arcs with one end on the boundary and the other end on the top edge
    /// only, i.e. turn-backs on the top.
    pub fn top_turnbacks(&self) -> usize {
        self.arcs
            .iter()
            .filter(|a| matches!((a.tail, a.head), (End::Top(_), End::Top(_))))
            .count()
    }

    /// Arcs running straight from bottom to top.
    pub fn through_strands(&self) -> usize {
        self.arcs
            .iter()
            .filter(|a| {
                matches!(
                    (a.tail, a.head),
                    (End::Bottom(_), End::Top(_)) | (End::Top(_), End::Bottom(_))
                )
            })
            .count()
    }

    /// `port_arc[c][p]` = arc incident to port `p` of crossing `c`.
    fn port_arcs(&self) -> Vec<[usize; 4]> {
        let mut out = vec![[usize::MAX; 4]; self.crossings.len()];
        for (i, a) in self.arcs.iter().enumerate() {
            for e in [a.tail, a.head] {
                if let End::Port(c, p) = e {
                    out[c][p as usize] = i;
                }
            }
        }
        out
    }

    fn boundary_arcs(&self) -> (Vec<usize>, Vec<usize>) {
        let mut bottom = vec![usize::MAX; self.n_bottom];
        let mut top = vec![usize::MAX; self.n_top];
        for (i, a) in self.arcs.iter().enumerate() {
            for e in [a.tail, a.head] {
                match e {
                    End::Bottom(j) => bottom[j] = i,
                    End::Top(j) => top[j] = i,
                    End::Port(..) => {}
                }
            }
        }
        (bottom, top)
    }

    /// Check port degrees, boundary incidences, planarity (Euler count on the
    /// map with the boundary contracted to one vertex) and, when oriented,
    /// two-in/two-out at every crossing and agreement with the boundary signs.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InapplicableMove(msg));
        let mut seen: HashSet<End> = HashSet::new();
        for a in &self.arcs {
            for e in [a.tail, a.head] {
                match e {
                    End::Port(c, p) if c >= self.crossings.len() || p > 3 => {
                        return bad(format!("dangling port {e:?}"))
                    }
                    End::Bottom(i) if i >= self.n_bottom => return bad(format!("bad end {e:?}")),
                    End::Top(i) if i >= self.n_top => return bad(format!("bad end {e:?}")),
                    _ => {}
                }
                if !seen.insert(e) {
                    return bad(format!("end {e:?} used twice"));
                }
            }
        }
        if seen.len() != 4 * self.crossings.len() + self.n_bottom + self.n_top {
            return bad("some port or boundary point has no arc".into());
        }
        if !self.is_planar() {
            return bad("combinatorial map is not planar".into());
        }
        if let Some(signs) = &self.signs {
            if signs.bottom.len() != self.n_bottom || signs.top.len() != self.n_top {
                return bad("boundary sign lengths differ from endpoint counts".into());
            }
            let mut incoming = vec![[false; 4]; self.crossings.len()];
            for a in &self.arcs {
                if let End::Port(c, p) = a.head {
                    incoming[c][p as usize] = true;
                }
                match a.tail {
                    End::Bottom(i) if signs.bottom[i] != Sign::Plus => {
                        return bad(format!("bottom {i} should be incoming"))
                    }
                    End::Top(i) if signs.top[i] != Sign::Minus => {
                        return bad(format!("top {i} should be incoming"))
                    }
                    _ => {}
                }
                match a.head {
                    End::Bottom(i) if signs.bottom[i] != Sign::Minus => {
                        return bad(format!("bottom {i} should be outgoing"))
                    }
                    End::Top(i) if signs.top[i] != Sign::Plus => {
                        return bad(format!("top {i} should be outgoing"))
                    }
                    _ => {}
                }
            }
            for (c, inc) in incoming.iter().enumerate() {
                if inc[0] == inc[2] || inc[1] == inc[3] {
                    return bad(format!("crossing {c} is not two-in/two-out"));
                }
            }
        }
        Ok(())
    }

    /// Face orbits of the map. Boundary points are contracted to one outer
    /// vertex whose rotation runs `T0…T(m−1), B(k−1)…B0`.
    fn face_orbits(&self) -> Vec<Vec<Dart>> {
        // vertex rotation lists of half-edges (arc, is_head)
        let nc = self.crossings.len();
        let mut rot: Vec<Vec<(usize, bool)>> = vec![Vec::new(); nc + 1];
        for r in rot.iter_mut().take(nc) {
            r.resize(4, (usize::MAX, false));
        }
        let (bottom, top) = self.boundary_arcs();
        let mut slot_of: HashMap<(usize, bool), (usize, usize)> = HashMap::new();
        for (i, a) in self.arcs.iter().enumerate() {
            for (e, is_head) in [(a.tail, false), (a.head, true)] {
                if let End::Port(c, p) = e {
                    rot[c][p as usize] = (i, is_head);
                    slot_of.insert((i, is_head), (c, p as usize));
                }
            }
        }
        let outer: Vec<End> = (0..self.n_top)
            .map(End::Top)
            .chain((0..self.n_bottom).rev().map(End::Bottom))
            .collect();
        for e in outer {
            let i = match e {
                End::Top(j) => top[j],
                End::Bottom(j) => bottom[j],
                _ => unreachable!(),
            };
            let is_head = self.arcs[i].head == e;
            slot_of.insert((i, is_head), (nc, rot[nc].len()));
            rot[nc].push((i, is_head));
        }
        let mut visited: HashSet<(usize, bool)> = HashSet::new();
        let mut faces = Vec::new();
        for i in 0..self.arcs.len() {
            for fwd in [true, false] {
                if visited.contains(&(i, fwd)) {
                    continue;
                }
                let mut face = Vec::new();
                let (mut arc, mut dir) = (i, fwd);
                while visited.insert((arc, dir)) {
                    face.push((arc, dir));
                    // arrive at the far end of the arc
                    let (v, s) = slot_of[&(arc, dir)];
                    let deg = rot[v].len();
                    let (na, at_head) = rot[v][(s + deg - 1) % deg];
                    arc = na;
                    dir = !at_head;
                }
                faces.push(face);
            }
        }
        faces
    }

    fn graph_components(&self) -> usize {
        // crossings plus one outer vertex, joined by arcs
        let nc = self.crossings.len();
        let mut uf = UnionFind::new(nc + 1);
        let has_boundary = self.n_bottom + self.n_top > 0;
        let vertex = |e: End| match e {
            End::Port(c, _) => c,
            _ => nc,
        };
        for a in &self.arcs {
            uf.union(vertex(a.tail), vertex(a.head));
        }
        let mut roots: HashSet<usize> = (0..nc).map(|c| uf.find(c)).collect();
        if has_boundary {
            roots.insert(uf.find(nc));
        }
        roots.len()
    }

    pub fn is_planar(&self) -> bool {
        let has_boundary = self.n_bottom + self.n_top > 0;
        let v = self.crossings.len() + usize::from(has_boundary);
        let e = self.arcs.len();
        let comps = self.graph_components();
        if v == 0 {
            return true;
        }
        // each component of a plane map satisfies V − E + F = 2 when its faces
        // are traced separately
        let f = self.face_orbits().len();
        v + f == e + 2 * comps
    }

    pub fn star(&self) -> Tangle {
        const REFLECT: [u8; 4] = [2, 1, 0, 3];
        let flip = |e: End| match e {
            End::Port(c, p) => End::Port(c, REFLECT[p as usize]),
            End::Bottom(i) => End::Top(i),
            End::Top(i) => End::Bottom(i),
        };
        Tangle {
            crossings: self.crossings.clone(),
            arcs: self
                .arcs
                .iter()
                .map(|a| Arc {
                    tail: flip(a.head),
                    head: flip(a.tail),
                })
                .collect(),
            n_bottom: self.n_top,
            n_top: self.n_bottom,
            signs: self.signs.as_ref().map(|s| BoundarySigns {
                bottom: s.top.clone(),
                top: s.bottom.clone(),
            }),
            loops: self.loops,
        }
    }

    /// Switch every crossing.
    pub fn mirror(&self) -> Tangle {
        let mut out = self.clone();
        for c in &mut out.crossings {
            c.over_odd = !c.over_odd;
        }
        out
    }

    /// Reverse every strand.
    pub fn reverse(&self) -> Tangle {
        let mut out = self.clone();
        for a in &mut out.arcs {
            *a = a.reversed();
        }
        if let Some(s) = &mut out.signs {
            for x in s.bottom.iter_mut().chain(s.top.iter_mut()) {
                *x = !*x;
            }
        }
        out
    }

    /// Glue `upper` on top of `lower`. Crossings of `lower` come first.
    pub fn stack(upper: &Tangle, lower: &Tangle) -> Result<Tangle> {
        if lower.n_top != upper.n_bottom {
            return Err(Error::BoundaryMismatch {
                index: lower.n_top.min(upper.n_bottom),
                msg: format!(
                    "lower tangle has {} top points, upper has {} bottom points",
                    lower.n_top, upper.n_bottom
                ),
            });
        }
        let signs = match (&lower.signs, &upper.signs) {
            (Some(l), Some(u)) => {
                if let Some(i) = (0..l.top.len()).find(|&i| l.top[i] != u.bottom[i]) {
                    return Err(Error::BoundaryMismatch {
                        index: i,
                        msg: format!(
                            "lower top '{}' does not meet upper bottom '{}'",
                            format_signs(&l.top),
                            format_signs(&u.bottom)
                        ),
                    });
                }
                Some(BoundarySigns {
                    bottom: l.bottom.clone(),
                    top: u.top.clone(),
                })
            }
            (None, None) => None,
            _ => return Err(Error::Unoriented),
        };
        let off = lower.crossings.len();
        let map_lower = |e: End| match e {
            End::Top(i) => RawEnd::Glue(i),
            e => e.into(),
        };
        let map_upper = |e: End| match e {
            End::Port(c, p) => RawEnd::Port(c + off, p),
            End::Bottom(i) => RawEnd::Glue(i),
            e => e.into(),
        };
        let mut segs: Vec<RawSeg> = lower
            .arcs
            .iter()
            .map(|a| seg(map_lower(a.tail), map_lower(a.head)))
            .collect();
        segs.extend(
            upper
                .arcs
                .iter()
                .map(|a| seg(map_upper(a.tail), map_upper(a.head))),
        );
        let mut crossings = lower.crossings.clone();
        crossings.extend_from_slice(&upper.crossings);
        Tangle::build(
            crossings,
            &segs,
            lower.n_bottom,
            upper.n_top,
            signs,
            lower.loops + upper.loops,
        )
    }

    /// Join top point `i` to bottom point `i` for every `i`, passing around
    /// the left side.
    pub fn closure(&self) -> Result<LinkDiagram> {
        if self.n_bottom != self.n_top {
            return Err(Error::BoundaryMismatch {
                index: self.n_bottom.min(self.n_top),
                msg: "closure needs equal bottom and top counts".into(),
            });
        }
        if let Some(s) = &self.signs {
            if let Some(i) = (0..s.top.len()).find(|&i| s.top[i] != s.bottom[i]) {
                return Err(Error::BoundaryMismatch {
                    index: i,
                    msg: "closure joins points of different orientation".into(),
                });
            }
        }
        let map = |e: End| match e {
            End::Top(i) | End::Bottom(i) => RawEnd::Glue(i),
            e => e.into(),
        };
        let segs: Vec<RawSeg> = self
            .arcs
            .iter()
            .map(|a| seg(map(a.tail), map(a.head)))
            .collect();
        let signs = self.signs.as_ref().map(|_| BoundarySigns {
            bottom: vec![],
            top: vec![],
        });
        let t = Tangle::build(self.crossings.clone(), &segs, 0, 0, signs, self.loops)?;
        Ok(LinkDiagram {
            tangle: t,
            anchor: None,
        })
    }

    /// Strand-following map: at a crossing a strand enters port `p` and
    /// leaves port `p+2`.
    fn strand_successor(
        &self,
        port_arcs: &[[usize; 4]],
        arc: usize,
        forward: bool,
    ) -> Option<(usize, bool)> {
        let a = self.arcs[arc];
        let end = if forward { a.head } else { a.tail };
        let End::Port(c, p) = end else { return None };
        let q = (p + 2) % 4;
        let next = port_arcs[c][q as usize];
        let n = self.arcs[next];
        Some((next, n.tail == End::Port(c, q)))
    }

    /// Components by strand following; free loops included.
    pub fn component_count(&self) -> usize {
        let pa = self.port_arcs();
        let mut seen = vec![false; self.arcs.len()];
        let mut count = self.loops;
        // open strands first: start from boundary ends
        for start in 0..self.arcs.len() {
            if seen[start] {
                continue;
            }
            count += 1;
            // walk both directions
            for fwd in [true, false] {
                let (mut arc, mut dir) = (start, fwd);
                seen[arc] = true;
                while let Some((n, d)) = self.strand_successor(&pa, arc, dir) {
                    if seen[n] {
                        break;
                    }
                    seen[n] = true;
                    arc = n;
                    dir = d;
                }
            }
        }
        count
    }

    /// Component count by union-find on arcs joined through opposite ports.
    pub fn component_count_union_find(&self) -> usize {
        let pa = self.port_arcs();
        let mut uf = UnionFind::new(self.arcs.len());
        for ports in &pa {
            uf.union(ports[0], ports[2]);
            uf.union(ports[1], ports[3]);
        }
        let roots: HashSet<usize> = (0..self.arcs.len()).map(|i| uf.find(i)).collect();
        roots.len() + self.loops
    }

    /// Sign (`+1`/`-1`) of every crossing; `None` when unoriented.
    pub fn crossing_signs(&self) -> Option<Vec<i8>> {
        self.signs.as_ref()?;
        let mut incoming = vec![[false; 4]; self.crossings.len()];
        for a in &self.arcs {
            if let End::Port(c, p) = a.head {
                incoming[c][p as usize] = true;
            }
        }
        Some(
            self.crossings
                .iter()
                .enumerate()
                .map(|(c, x)| {
                    let under: [u8; 2] = if x.over_odd { [0, 2] } else { [1, 3] };
                    let under_in = if incoming[c][under[0] as usize] {
                        under[0]
                    } else {
                        under[1]
                    };
                    let over_out = (0..4u8)
                        .find(|&p| x.is_over_port(p) && !incoming[c][p as usize])
                        .unwrap();
                    if over_out == (under_in + 1) % 4 {
                        1
                    } else {
                        -1
                    }
                })
                .collect(),
        )
    }

    pub fn writhe(&self) -> Option<i64> {
        Some(self.crossing_signs()?.iter().map(|&s| s as i64).sum())
    }

    /// Canonical code: equal codes iff the diagrams are the same planar map
    /// up to relabelling of crossings and arcs.
    pub fn canonical_code(&self) -> Vec<i64> {
        let pa = self.port_arcs();
        let (bottom, top) = self.boundary_arcs();
        let nc = self.crossings.len();
        let oriented = self.signs.is_some();
        let mut code = vec![
            self.n_bottom as i64,
            self.n_top as i64,
            self.loops as i64,
            oriented as i64,
        ];
        if let Some(s) = &self.signs {
            code.extend(
                s.bottom
                    .iter()
                    .chain(&s.top)
                    .map(|&x| (x == Sign::Plus) as i64),
            );
        }
        // boundary-anchored part
        let mut label: Vec<Option<(usize, u8)>> = vec![None; nc];
        let mut order: Vec<usize> = Vec::new();
        let mut queue = VecDeque::new();
        let discover = |e: End,
                        label: &mut Vec<Option<(usize, u8)>>,
                        order: &mut Vec<usize>,
                        queue: &mut VecDeque<usize>| {
            if let End::Port(c, p) = e {
                if label[c].is_none() {
                    label[c] = Some((order.len(), p));
                    order.push(c);
                    queue.push_back(c);
                }
            }
        };
        let boundary_ends: Vec<(End, usize)> = (0..self.n_bottom)
            .map(|i| (End::Bottom(i), bottom[i]))
            .chain((0..self.n_top).map(|i| (End::Top(i), top[i])))
            .collect();
        for &(e, a) in &boundary_ends {
            discover(self.arcs[a].other(e), &mut label, &mut order, &mut queue);
            while let Some(c) = queue.pop_front() {
                let (_, r) = label[c].unwrap();
                for k in 0..4u8 {
                    let p = (r + k) % 4;
                    let arc = self.arcs[pa[c][p as usize]];
                    discover(
                        arc.other(End::Port(c, p)),
                        &mut label,
                        &mut order,
                        &mut queue,
                    );
                }
            }
        }
        let describe = |e: End, label: &Vec<Option<(usize, u8)>>| -> i64 {
            match e {
                End::Port(c, p) => {
                    let (l, r) = label[c].unwrap();
                    (l as i64) * 4 + ((p + 4 - r) % 4) as i64
                }
                End::Bottom(i) => -1 - 2 * i as i64,
                End::Top(i) => -2 - 2 * i as i64,
            }
        };
        let emit = |order: &[usize], label: &Vec<Option<(usize, u8)>>, out: &mut Vec<i64>| {
            for &c in order {
                let (_, r) = label[c].unwrap();
                out.push(self.crossings[c].is_over_port(r) as i64);
                for k in 0..4u8 {
                    let p = (r + k) % 4;
                    let arc = self.arcs[pa[c][p as usize]];
                    let here = End::Port(c, p);
                    out.push(describe(arc.other(here), label));
                    if oriented {
                        out.push((arc.head == here) as i64);
                    }
                }
            }
        };
        for &(e, a) in &boundary_ends {
            let arc = self.arcs[a];
            code.push(describe(arc.other(e), &label));
            if oriented {
                code.push((arc.head == e) as i64);
            }
        }
        emit(&order, &label, &mut code);
        // closed pieces not reachable from the boundary
        let mut pieces: Vec<Vec<i64>> = Vec::new();
        let mut done: Vec<bool> = label.iter().map(Option::is_some).collect();
        for c0 in 0..nc {
            if done[c0] {
                continue;
            }
            let mut best: Option<(Vec<i64>, Vec<usize>)> = None;
            // collect the piece
            let mut piece = vec![c0];
            let mut in_piece = HashSet::from([c0]);
            let mut i = 0;
            while i < piece.len() {
                let c = piece[i];
                for p in 0..4u8 {
                    if let End::Port(d, _) = self.arcs[pa[c][p as usize]].other(End::Port(c, p)) {
                        if in_piece.insert(d) {
                            piece.push(d);
                        }
                    }
                }
                i += 1;
            }
            for &s in &piece {
                for r in 0..4u8 {
                    let mut lab: Vec<Option<(usize, u8)>> = label.clone();
                    let mut ord = Vec::new();
                    let mut q = VecDeque::new();
                    let base = order.len();
                    // local labels start at 0 for comparability
                    lab[s] = Some((0, r));
                    ord.push(s);
                    q.push_back(s);
                    while let Some(c) = q.pop_front() {
                        let (_, rr) = lab[c].unwrap();
                        for k in 0..4u8 {
                            let p = (rr + k) % 4;
                            let e = self.arcs[pa[c][p as usize]].other(End::Port(c, p));
                            if let End::Port(d, dp) = e {
                                if lab[d].is_none() {
                                    lab[d] = Some((ord.len(), dp));
                                    ord.push(d);
                                    q.push_back(d);
                                }
                            }
                        }
                    }
                    let _ = base;
                    let mut out = Vec::new();
                    emit(&ord, &lab, &mut out);
                    if best.as_ref().is_none_or(|(b, _)| out < *b) {
                        best = Some((out, ord));
                    }
                }
            }
            let (best_code, ord) = best.unwrap();
            for c in ord {
                done[c] = true;
            }
            pieces.push(best_code);
        }
        pieces.sort();
        for p in pieces {
            code.push(i64::MIN);
            code.extend(p);
        }
        code
    }

    /// PD-style JSON form.
    pub fn to_pd(&self) -> PdJson {
        let pa = self.port_arcs();
        let end_json = |e: End| match e {
            End::Port(c, p) => EndJson::Port {
                crossing: c,
                port: p,
            },
            End::Bottom(i) => EndJson::Bottom { bottom: i },
            End::Top(i) => EndJson::Top { top: i },
        };
        PdJson {
            crossings: self
                .crossings
                .iter()
                .enumerate()
                .map(|(k, x)| {
                    let ports = pa[k];
                    let over = if x.over_odd {
                        [ports[1], ports[3]]
                    } else {
                        [ports[0], ports[2]]
                    };
                    CrossingJson { id: k, ports, over }
                })
                .collect(),
            edges: self
                .arcs
                .iter()
                .enumerate()
                .map(|(i, a)| EdgeJson {
                    id: i,
                    from: end_json(a.tail),
                    to: end_json(a.head),
                })
                .collect(),
            closures: (0..self.loops).map(|i| LoopJson { r#loop: i }).collect(),
            orient: self
                .signs
                .as_ref()
                .map(|_| (0..self.arcs.len()).map(|i| (i.to_string(), 1)).collect()),
            boundary: BoundaryJson {
                bottom: self
                    .signs
                    .as_ref()
                    .map_or_else(|| ".".repeat(self.n_bottom), |s| format_signs(&s.bottom)),
                top: self
                    .signs
                    .as_ref()
                    .map_or_else(|| ".".repeat(self.n_top), |s| format_signs(&s.top)),
            },
        }
    }

    pub fn from_pd(pd: &PdJson) -> Result<Tangle> {
        let end = |e: &EndJson| match *e {
            EndJson::Port { crossing, port } => End::Port(crossing, port),
            EndJson::Bottom { bottom } => End::Bottom(bottom),
            EndJson::Top { top } => End::Top(top),
        };
        let mut crossings = vec![Crossing { over_odd: false }; pd.crossings.len()];
        for (k, c) in pd.crossings.iter().enumerate() {
            if c.id != k {
                return Err(Error::Parse {
                    pos: k,
                    msg: "crossing ids must be 0..n in order".into(),
                });
            }
            let odd = [c.ports[1], c.ports[3]];
            let even = [c.ports[0], c.ports[2]];
            crossings[k].over_odd = if c.over == odd || c.over == [odd[1], odd[0]] {
                true
            } else if c.over == even || c.over == [even[1], even[0]] {
                false
            } else {
                return Err(Error::Parse {
                    pos: k,
                    msg: "over edges are not opposite ports".into(),
                });
            };
        }
        let oriented = pd.orient.is_some();
        let mut arcs = Vec::with_capacity(pd.edges.len());
        for (i, e) in pd.edges.iter().enumerate() {
            if e.id != i {
                return Err(Error::Parse {
                    pos: i,
                    msg: "edge ids must be 0..n in order".into(),
                });
            }
            let mut a = Arc {
                tail: end(&e.from),
                head: end(&e.to),
            };
            if let Some(o) = &pd.orient {
                match o.get(&i.to_string()) {
                    Some(1) => {}
                    Some(-1) => a = a.reversed(),
                    _ => {
                        return Err(Error::Parse {
                            pos: i,
                            msg: "orient must be ±1 per edge".into(),
                        })
                    }
                }
            }
            arcs.push(a);
        }
        let parse_b = |s: &str| -> Result<(usize, Option<Vec<Sign>>)> {
            if s.chars().all(|c| c == '.') {
                Ok((s.len(), None))
            } else {
                let v = parse_signs(s)?;
                Ok((v.len(), Some(v)))
            }
        };
        let (n_bottom, sb) = parse_b(&pd.boundary.bottom)?;
        let (n_top, st) = parse_b(&pd.boundary.top)?;
        let signs = if oriented {
            Some(BoundarySigns {
                bottom: sb.unwrap_or_default(),
                top: st.unwrap_or_default(),
            })
        } else {
            None
        };
        let t = Tangle {
            crossings,
            arcs,
            n_bottom,
            n_top,
            signs,
            loops: pd.closures.len(),
        };
        t.validate()?;
        Ok(t)
    }
}

/// PD-style JSON:
/// `{"crossings":[{"id":k,"ports":[e0,e1,e2,e3],"over":[e0,e2]}],"edges":[…],
///   "closures":[…],"orient":{edge:±1},"boundary":{"bottom":"+","top":"+"}}`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct PdJson {
    pub crossings: Vec<CrossingJson>,
    pub edges: Vec<EdgeJson>,
    pub closures: Vec<LoopJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orient: Option<BTreeMap<String, i8>>,
    pub boundary: BoundaryJson,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct CrossingJson {
    pub id: usize,
    pub ports: [usize; 4],
    pub over: [usize; 2],
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct EdgeJson {
    pub id: usize,
    pub from: EndJson,
    pub to: EndJson,
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(untagged)]
pub enum EndJson {
    Port { crossing: usize, port: u8 },
    Bottom { bottom: usize },
    Top { top: usize },
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct LoopJson {
    pub r#loop: usize,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct BoundaryJson {
    pub bottom: String,
    pub top: String,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut x = x;
        while self.0[x] != r {
            let n = self.0[x];
            self.0[x] = r;
            x = n;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

// ---------------------------------------------------------------------------
// Elementary pieces and the tree functor

/// Elementary tangle of a caret on leaf `i` (1-based) of `m` leaves: `2m−1`
/// bottom points to `2m+1` top points. The leaf strand rises into the crossing
/// and leaves as the new gap strand; the two child leaf strands form a
/// turn-back on top that crosses it once.
pub fn caret_piece(
    m: usize,
    i: usize,
    bottom: Option<&[Sign]>,
    conv: Convention,
) -> Result<Tangle> {
    if i == 0 || i > m {
        return Err(Error::IndexOutOfRange { index: i, len: m });
    }
    let nb = 2 * m - 1;
    if let Some(s) = bottom {
        if s.len() != nb {
            return Err(Error::DimensionMismatch {
                expected: nb,
                found: s.len(),
            });
        }
    }
    let b = 2 * (i - 1);
    let sign_at = |j: usize| bottom.map_or(Sign::Plus, |s| s[j]);
    let mut arcs = Vec::with_capacity(nb + 2);
    for j in 0..nb {
        if j == b {
            continue;
        }
        let t = if j < b { j } else { j + 2 };
        arcs.push(match sign_at(j) {
            Sign::Plus => Arc {
                tail: End::Bottom(j),
                head: End::Top(t),
            },
            Sign::Minus => Arc {
                tail: End::Top(t),
                head: End::Bottom(j),
            },
        });
    }
    let through = [
        Arc {
            tail: End::Bottom(b),
            head: End::Port(0, 0),
        },
        Arc {
            tail: End::Port(0, 2),
            head: End::Top(b + 1),
        },
    ];
    // turn-back from the right child leaf to the left child leaf, which exits
    // upward when the parent sign is `+`
    let turnback = [
        Arc {
            tail: End::Top(b + 2),
            head: End::Port(0, 1),
        },
        Arc {
            tail: End::Port(0, 3),
            head: End::Top(b),
        },
    ];
    let a = sign_at(b);
    for arc in through.into_iter().chain(turnback) {
        arcs.push(if a == Sign::Plus { arc } else { arc.reversed() });
    }
    let signs = bottom.map(|s| {
        let mut top = s[..b].to_vec();
        top.extend([a, a, !a]);
        top.extend_from_slice(&s[b + 1..]);
        BoundarySigns {
            bottom: s.to_vec(),
            top,
        }
    });
    let crossing = Crossing {
        over_odd: conv == Convention::Standard,
    };
    Ok(Tangle {
        crossings: vec![crossing],
        arcs,
        n_bottom: nb,
        n_top: nb + 2,
        signs,
        loops: 0,
    })
}

/// One crossing swapping boundary points `i` and `i+1` (1-based) of a row
/// carrying `signs`. `left_over`: the strand starting at the bottom left
/// passes over.
pub fn crossing_piece(
    signs: Option<&[Sign]>,
    n: usize,
    i: usize,
    left_over: bool,
) -> Result<Tangle> {
    if i == 0 || i >= n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    if let Some(s) = signs {
        if s.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: s.len(),
            });
        }
    }
    let sign_at = |j: usize| signs.map_or(Sign::Plus, |s| s[j]);
    let (l, r) = (i - 1, i);
    let mut arcs = Vec::with_capacity(n + 2);
    for j in 0..n {
        if j == l || j == r {
            continue;
        }
        arcs.push(match sign_at(j) {
            Sign::Plus => Arc {
                tail: End::Bottom(j),
                head: End::Top(j),
            },
            Sign::Minus => Arc {
                tail: End::Top(j),
                head: End::Bottom(j),
            },
        });
    }
    // ports: 0 south-west, 1 south-east, 2 north-east, 3 north-west
    let left = [
        Arc {
            tail: End::Bottom(l),
            head: End::Port(0, 0),
        },
        Arc {
            tail: End::Port(0, 2),
            head: End::Top(r),
        },
    ];
    let right = [
        Arc {
            tail: End::Bottom(r),
            head: End::Port(0, 1),
        },
        Arc {
            tail: End::Port(0, 3),
            head: End::Top(l),
        },
    ];
    for a in left {
        arcs.push(if sign_at(l) == Sign::Plus {
            a
        } else {
            a.reversed()
        });
    }
    for a in right {
        arcs.push(if sign_at(r) == Sign::Plus {
            a
        } else {
            a.reversed()
        });
    }
    let out_signs = signs.map(|s| {
        let mut top = s.to_vec();
        top.swap(l, r);
        BoundarySigns {
            bottom: s.to_vec(),
            top,
        }
    });
    Ok(Tangle {
        crossings: vec![Crossing {
            over_odd: !left_over,
        }],
        arcs,
        n_bottom: n,
        n_top: n,
        signs: out_signs,
        loops: 0,
    })
}

/// A turn-back inserted on top between points `i−1` and `i` (0-based `i`):
/// `n` bottom points to `n+2` top points. `first_up`: the new left point
/// carries `+`.
pub fn cap_piece(signs: Option<&[Sign]>, n: usize, i: usize, first_up: bool) -> Result<Tangle> {
    if i > n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    let sign_at = |j: usize| signs.map_or(Sign::Plus, |s| s[j]);
    let mut arcs = Vec::with_capacity(n + 1);
    for j in 0..n {
        let t = if j < i { j } else { j + 2 };
        arcs.push(match sign_at(j) {
            Sign::Plus => Arc {
                tail: End::Bottom(j),
                head: End::Top(t),
            },
            Sign::Minus => Arc {
                tail: End::Top(t),
                head: End::Bottom(j),
            },
        });
    }
    arcs.push(if first_up {
        Arc {
            tail: End::Top(i + 1),
            head: End::Top(i),
        }
    } else {
        Arc {
            tail: End::Top(i),
            head: End::Top(i + 1),
        }
    });
    let out_signs = signs.map(|s| {
        let mut top = s[..i].to_vec();
        let f = if first_up { Sign::Plus } else { Sign::Minus };
        top.extend([f, !f]);
        top.extend_from_slice(&s[i..]);
        BoundarySigns {
            bottom: s.to_vec(),
            top,
        }
    });
    Ok(Tangle {
        crossings: vec![],
        arcs,
        n_bottom: n,
        n_top: n + 2,
        signs: out_signs,
        loops: 0,
    })
}

/// Join bottom points `i` and `i+1` (0-based) with a turn-back: `n` bottom
/// points to `n−2` top points.
pub fn cup_piece(signs: Option<&[Sign]>, n: usize, i: usize) -> Result<Tangle> {
    if n < 2 || i + 1 >= n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    let sign_at = |j: usize| signs.map_or(Sign::Plus, |s| s[j]);
    if signs.is_some() && sign_at(i) == sign_at(i + 1) {
        return Err(Error::BoundaryMismatch {
            index: i,
            msg: "a turn-back needs opposite orientations".into(),
        });
    }
    let mut arcs = Vec::with_capacity(n - 1);
    for j in 0..n {
        if j == i || j == i + 1 {
            continue;
        }
        let t = if j < i { j } else { j - 2 };
        arcs.push(match sign_at(j) {
            Sign::Plus => Arc {
                tail: End::Bottom(j),
                head: End::Top(t),
            },
            Sign::Minus => Arc {
                tail: End::Top(t),
                head: End::Bottom(j),
            },
        });
    }
    arcs.push(if sign_at(i) == Sign::Plus {
        Arc {
            tail: End::Bottom(i),
            head: End::Bottom(i + 1),
        }
    } else {
        Arc {
            tail: End::Bottom(i + 1),
            head: End::Bottom(i),
        }
    });
    let out_signs = signs.map(|s| {
        let mut top = s[..i].to_vec();
        top.extend_from_slice(&s[i + 2..]);
        BoundarySigns {
            bottom: s.to_vec(),
            top,
        }
    });
    Ok(Tangle {
        crossings: vec![],
        arcs,
        n_bottom: n,
        n_top: n - 2,
        signs: out_signs,
        loops: 0,
    })
}

/// The tangle of a forest applied to an n-sign, stacking one caret piece per
/// caret in the order of `schedule` (1-based leaf positions). The result does
/// not depend on the linearization.
pub fn phi_of_forest_with(schedule: &[usize], sigma: &SignSeq, conv: Convention) -> Result<Tangle> {
    let mut t = Tangle::identity(&object_signs(sigma));
    let mut m = sigma.len();
    for &p in schedule {
        let top = t.boundary().unwrap().top.clone();
        let piece = caret_piece(m, p, Some(&top), conv)?;
        t = Tangle::stack(&piece, &t)?;
        m += 1;
    }
    Ok(t)
}

pub fn phi_of_forest(f: &Forest, sigma: &SignSeq, conv: Convention) -> Result<Tangle> {
    if f.root_count() != sigma.len() {
        return Err(Error::DimensionMismatch {
            expected: f.root_count(),
            found: sigma.len(),
        });
    }
    phi_of_forest_with(&f.insertions(), sigma, conv)
}

fn tree_piece_unoriented(t: &Tree, conv: Convention) -> Result<Tangle> {
    let mut out = Tangle::identity_unoriented(1);
    let mut m = 1;
    for p in Forest::from_tree(t.clone()).insertions() {
        out = Tangle::stack(&caret_piece(m, p, None, conv)?, &out)?;
        m += 1;
    }
    Ok(out)
}

/// A closed diagram. `anchor` names a crossing whose south-west corner lies in
/// the leftmost region and whose south-east corner lies in the unbounded face.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinkDiagram {
    tangle: Tangle,
    anchor: Option<usize>,
}

impl LinkDiagram {
    pub fn from_tangle(t: Tangle) -> Result<LinkDiagram> {
        if t.n_bottom + t.n_top > 0 {
            return Err(Error::OpenBoundary(t.n_bottom + t.n_top));
        }
        Ok(LinkDiagram {
            tangle: t,
            anchor: None,
        })
    }

    pub fn unknot() -> LinkDiagram {
        Tangle::identity(&[Sign::Plus]).closure().unwrap()
    }

    pub fn tangle(&self) -> &Tangle {
        &self.tangle
    }

    pub fn crossing_count(&self) -> usize {
        self.tangle.crossing_count()
    }

    pub fn is_oriented(&self) -> bool {
        self.tangle.is_oriented()
    }

    pub fn component_count(&self) -> usize {
        self.tangle.component_count()
    }

    pub fn anchor(&self) -> Option<usize> {
        self.anchor
    }

    pub fn mirror(&self) -> LinkDiagram {
        LinkDiagram {
            tangle: self.tangle.mirror(),
            anchor: self.anchor,
        }
    }

    pub fn reverse(&self) -> LinkDiagram {
        LinkDiagram {
            tangle: self.tangle.reverse(),
            anchor: self.anchor,
        }
    }

    pub fn unoriented(&self) -> LinkDiagram {
        LinkDiagram {
            tangle: self.tangle.unoriented(),
            anchor: self.anchor,
        }
    }

    /// Side-by-side union.
    pub fn disjoint_union(&self, other: &LinkDiagram) -> Result<LinkDiagram> {
        let t = Tangle::stack(&other.tangle, &self.tangle)?;
        Ok(LinkDiagram {
            tangle: t,
            anchor: self.anchor,
        })
    }

    pub fn canonical_code(&self) -> Vec<i64> {
        self.tangle.canonical_code()
    }

    pub fn validate(&self) -> Result<()> {
        self.tangle.validate()
    }

    /// Faces as dart cycles, each traversed with the face on the left.
    pub fn faces(&self) -> Vec<Vec<Dart>> {
        self.tangle.face_orbits()
    }

    /// Signed Gauss code: one cyclic list of `(crossing, over)` visits per
    /// component with crossings, plus the crossing signs and the number of
    /// crossing-free loops.
    pub fn gauss(&self) -> Result<GaussCode> {
        let signs = self.tangle.crossing_signs().ok_or(Error::Unoriented)?;
        let t = &self.tangle;
        let pa = t.port_arcs();
        let mut seen = vec![false; t.arcs.len()];
        let mut comps = Vec::new();
        for start in 0..t.arcs.len() {
            if seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut arc = start;
            while !seen[arc] {
                seen[arc] = true;
                let End::Port(c, p) = t.arcs[arc].head else {
                    return Err(Error::OpenBoundary(1));
                };
                comp.push((c, t.crossings[c].is_over_port(p)));
                arc = pa[c][((p + 2) % 4) as usize];
            }
            comps.push(comp);
        }
        Ok(GaussCode {
            comps,
            signs,
            loops: t.loops,
        })
    }

    // --- Reidemeister moves ------------------------------------------------

    /// Rebuild after removing crossings and arcs. Ends at removed crossings
    /// are looked up in `remap`; `Port(usize::MAX - k, p)` in `remap` values
    /// and in `new_segs` refers to new crossing `k`.
    fn rewrite(
        &self,
        remove_crossings: &[usize],
        remove_arcs: &[usize],
        new_crossings: Vec<Crossing>,
        remap: &HashMap<End, RawEnd>,
        new_segs: Vec<RawSeg>,
    ) -> Result<LinkDiagram> {
        let t = &self.tangle;
        let mut index = vec![usize::MAX; t.crossings.len()];
        let mut crossings = Vec::new();
        for (c, x) in t.crossings.iter().enumerate() {
            if !remove_crossings.contains(&c) {
                index[c] = crossings.len();
                crossings.push(*x);
            }
        }
        let base = crossings.len();
        crossings.extend(new_crossings);
        let fix = |e: RawEnd| -> RawEnd {
            match e {
                RawEnd::Port(c, p) if c > usize::MAX / 2 => {
                    RawEnd::Port(base + (usize::MAX - c), p)
                }
                RawEnd::Port(c, p) => RawEnd::Port(index[c], p),
                e => e,
            }
        };
        let map_end = |e: End| -> RawEnd {
            match remap.get(&e) {
                Some(&r) => fix(r),
                None => fix(e.into()),
            }
        };
        let mut segs = Vec::new();
        for (i, a) in t.arcs.iter().enumerate() {
            if remove_arcs.contains(&i) {
                continue;
            }
            segs.push(seg(map_end(a.tail), map_end(a.head)));
        }
        segs.extend(new_segs.into_iter().map(|s| seg(fix(s.tail), fix(s.head))));
        let out = Tangle::build(crossings, &segs, 0, 0, t.signs.clone(), t.loops)?;
        let anchor = self
            .anchor
            .and_then(|a| (index[a] != usize::MAX).then_some(index[a]));
        Ok(LinkDiagram {
            tangle: out,
            anchor,
        })
    }

    pub fn apply(&self, mv: &Move) -> Result<LinkDiagram> {
        match *mv {
            Move::R1Add {
                arc,
                positive,
                left,
            } => self.r1_add(arc, positive, left),
            Move::R1Remove { crossing } => self.r1_remove(crossing),
            Move::R2Add {
                face,
                first,
                second,
                first_over,
            } => self.r2_add(face, first, second, first_over),
            Move::R2Remove { a, b } => self.r2_remove(a, b),
            Move::R3 { face } => self.r3(face),
        }
    }

    fn r1_add(&self, arc: usize, positive: bool, left: bool) -> Result<LinkDiagram> {
        let t = &self.tangle;
        let Some(a) = t.arcs.get(arc) else {
            return Err(Error::InapplicableMove(format!("no arc {arc}")));
        };
        let n = usize::MAX; // new crossing 0
        let (loop_end, out_port, over_odd) = if left {
            (2u8, 0u8, !positive)
        } else {
            (0u8, 2u8, positive)
        };
        let segs = vec![
            seg(a.tail.into(), RawEnd::Port(n, 3)),
            seg(RawEnd::Port(n, 1), RawEnd::Port(n, loop_end)),
            seg(RawEnd::Port(n, out_port), a.head.into()),
        ];
        self.rewrite(
            &[],
            &[arc],
            vec![Crossing { over_odd }],
            &HashMap::new(),
            segs,
        )
    }

    fn r1_remove(&self, c: usize) -> Result<LinkDiagram> {
        let t = &self.tangle;
        if c >= t.crossings.len() {
            return Err(Error::InapplicableMove(format!("no crossing {c}")));
        }
        let pa = t.port_arcs();
        let Some(p) = (0..4u8).find(|&p| {
            let a = t.arcs[pa[c][p as usize]];
            a.other(End::Port(c, p)) == End::Port(c, (p + 1) % 4)
        }) else {
            return Err(Error::InapplicableMove(format!("crossing {c} has no kink")));
        };
        let kink = pa[c][p as usize];
        let mut remap = HashMap::new();
        remap.insert(End::Port(c, (p + 2) % 4), RawEnd::Glue(0));
        remap.insert(End::Port(c, (p + 3) % 4), RawEnd::Glue(0));
        self.rewrite(&[c], &[kink], vec![], &remap, vec![])
    }

    /// Exchange over and under at crossing `c`.
    pub fn switch_crossing(&self, c: usize) -> Result<LinkDiagram> {
        if c >= self.tangle.crossings.len() {
            return Err(Error::IndexOutOfRange {
                index: c,
                len: self.tangle.crossings.len(),
            });
        }
        let mut out = self.clone();
        out.tangle.crossings[c].over_odd ^= true;
        Ok(out)
    }

    /// Oriented smoothing of crossing `c`: each incoming strand leaves along
    /// the other strand's outgoing port.
    pub fn smooth_crossing(&self, c: usize) -> Result<LinkDiagram> {
        let t = &self.tangle;
        if !t.is_oriented() {
            return Err(Error::Unoriented);
        }
        if c >= t.crossings.len() {
            return Err(Error::IndexOutOfRange {
                index: c,
                len: t.crossings.len(),
            });
        }
        let pa = t.port_arcs();
        let incoming: Vec<u8> = (0..4u8)
            .filter(|&p| t.arcs[pa[c][p as usize]].head == End::Port(c, p))
            .collect();
        let (a, b) = (incoming[0], incoming[1]);
        let mut remap = HashMap::new();
        remap.insert(End::Port(c, a), RawEnd::Glue(0));
        remap.insert(End::Port(c, (b + 2) % 4), RawEnd::Glue(0));
        remap.insert(End::Port(c, b), RawEnd::Glue(1));
        remap.insert(End::Port(c, (a + 2) % 4), RawEnd::Glue(1));
        self.rewrite(&[c], &[], vec![], &remap, vec![])
    }

    fn r2_add(
        &self,
        face: usize,
        first: usize,
        second: usize,
        first_over: bool,
    ) -> Result<LinkDiagram> {
        let faces = self.faces();
        let f = faces
            .get(face)
            .ok_or_else(|| Error::InapplicableMove(format!("no face {face}")))?;
        let (Some(&(a, da)), Some(&(b, db))) = (f.get(first), f.get(second)) else {
            return Err(Error::InapplicableMove("dart index outside face".into()));
        };
        if a == b {
            return Err(Error::InapplicableMove(
                "both sides of the move on one arc".into(),
            ));
        }
        let t = &self.tangle;
        let (aa, ab) = (t.arcs[a], t.arcs[b]);
        // walk order of each arc
        let (x0, x1) = if da {
            (aa.tail, aa.head)
        } else {
            (aa.head, aa.tail)
        };
        let (p0, q0) = if db {
            (ab.tail, ab.head)
        } else {
            (ab.head, ab.tail)
        };
        let (c1, c2) = (usize::MAX, usize::MAX - 1);
        let orient = |s: RawSeg, fwd: bool| if fwd { s } else { seg(s.head, s.tail) };
        let segs = vec![
            orient(seg(x0.into(), RawEnd::Port(c1, 0)), da),
            orient(seg(RawEnd::Port(c1, 2), RawEnd::Port(c2, 2)), da),
            orient(seg(RawEnd::Port(c2, 0), x1.into()), da),
            orient(seg(p0.into(), RawEnd::Port(c2, 1)), db),
            orient(seg(RawEnd::Port(c2, 3), RawEnd::Port(c1, 1)), db),
            orient(seg(RawEnd::Port(c1, 3), q0.into()), db),
        ];
        let x = Crossing {
            over_odd: !first_over,
        };
        self.rewrite(&[], &[a, b], vec![x, x], &HashMap::new(), segs)
    }

    fn r2_remove(&self, c1: usize, c2: usize) -> Result<LinkDiagram> {
        let t = &self.tangle;
        let nc = t.crossings.len();
        if c1 >= nc || c2 >= nc || c1 == c2 {
            return Err(Error::InapplicableMove(format!("bad crossings {c1}, {c2}")));
        }
        let pa = t.port_arcs();
        let faces = self.faces();
        let ends_at = |arc: usize, c: usize| -> Option<u8> {
            let a = t.arcs[arc];
            [a.tail, a.head].into_iter().find_map(|e| match e {
                End::Port(x, p) if x == c => Some(p),
                _ => None,
            })
        };
        for f in faces.iter().filter(|f| f.len() == 2) {
            let (e1, e2) = (f[0].0, f[1].0);
            let (Some(p1), Some(q1), Some(p2), Some(q2)) = (
                ends_at(e1, c1),
                ends_at(e1, c2),
                ends_at(e2, c1),
                ends_at(e2, c2),
            ) else {
                continue;
            };
            if e1 == e2 {
                continue;
            }
            let over1 = t.crossings[c1].is_over_port(p1);
            if over1 != t.crossings[c2].is_over_port(q1) {
                return Err(Error::InapplicableMove(
                    "bigon strands are not layered".into(),
                ));
            }
            let _ = (pa[c1][0], p2, q2);
            let mut remap = HashMap::new();
            remap.insert(End::Port(c1, (p1 + 2) % 4), RawEnd::Glue(0));
            remap.insert(End::Port(c2, (q1 + 2) % 4), RawEnd::Glue(0));
            remap.insert(End::Port(c1, (p2 + 2) % 4), RawEnd::Glue(1));
            remap.insert(End::Port(c2, (q2 + 2) % 4), RawEnd::Glue(1));
            return self.rewrite(&[c1, c2], &[e1, e2], vec![], &remap, vec![]);
        }
        Err(Error::InapplicableMove(format!(
            "crossings {c1}, {c2} do not bound a bigon"
        )))
    }

    fn r3(&self, face: usize) -> Result<LinkDiagram> {
        let faces = self.faces();
        let f = faces
            .get(face)
            .ok_or_else(|| Error::InapplicableMove(format!("no face {face}")))?;
        if f.len() != 3 {
            return Err(Error::InapplicableMove("R3 needs a triangular face".into()));
        }
        let t = &self.tangle;
        // crossing at the far end of each dart
        let far = |&(arc, fwd): &Dart| -> (usize, u8) {
            let a = t.arcs[arc];
            let End::Port(c, p) = (if fwd { a.head } else { a.tail }) else {
                unreachable!()
            };
            (c, p)
        };
        let near = |&(arc, fwd): &Dart| -> (usize, u8) {
            let a = t.arcs[arc];
            let End::Port(c, p) = (if fwd { a.tail } else { a.head }) else {
                unreachable!()
            };
            (c, p)
        };
        let arcs_f: HashSet<usize> = f.iter().map(|d| d.0).collect();
        let cross_f: HashSet<usize> = f.iter().map(|d| near(d).0).collect();
        if arcs_f.len() != 3 || cross_f.len() != 3 {
            return Err(Error::InapplicableMove("triangle is degenerate".into()));
        }
        for rot in 0..3 {
            // edge e12 leaves c1 and arrives at c2
            let e12 = f[rot];
            let e23 = f[(rot + 1) % 3];
            let (c1, p) = near(&e12);
            let (c2, r) = far(&e12);
            let (c3, tt) = far(&e23);
            let over_c1 = t.crossings[c1].is_over_port(p);
            let over_c2 = t.crossings[c2].is_over_port(r);
            if over_c1 != over_c2 {
                continue;
            }
            let pa = t.port_arcs();
            let (xab, xag, xbg) = (usize::MAX, usize::MAX - 1, usize::MAX - 2);
            let at = |c: usize, q: u8| End::Port(c, q % 4);
            let mut remap = HashMap::new();
            remap.insert(at(c1, p + 2), RawEnd::Port(xab, 2));
            remap.insert(at(c1, p + 3), RawEnd::Port(xbg, 2));
            remap.insert(at(c2, r + 2), RawEnd::Port(xag, 0));
            remap.insert(at(c2, r + 1), RawEnd::Port(xbg, 3));
            remap.insert(at(c3, tt + 1), RawEnd::Port(xag, 1));
            remap.insert(at(c3, tt + 2), RawEnd::Port(xab, 1));
            let gamma_over_c3 = t.crossings[c3].is_over_port((tt + 1) % 4);
            let new = vec![
                Crossing { over_odd: !over_c2 },
                Crossing { over_odd: !over_c1 },
                Crossing {
                    over_odd: !gamma_over_c3,
                },
            ];
            let head_at = |c: usize, q: u8| t.arcs[pa[c][(q % 4) as usize]].head == at(c, q);
            let mut segs = vec![
                seg(RawEnd::Port(xab, 0), RawEnd::Port(xag, 2)),
                seg(RawEnd::Port(xbg, 1), RawEnd::Port(xab, 3)),
                seg(RawEnd::Port(xbg, 0), RawEnd::Port(xag, 3)),
            ];
            if t.is_oriented() {
                let dirs = [head_at(c1, p + 2), head_at(c2, r + 1), head_at(c1, p + 3)];
                for (s, fwd) in segs.iter_mut().zip(dirs) {
                    if !fwd {
                        *s = seg(s.head, s.tail);
                    }
                }
            }
            let remove: Vec<usize> = arcs_f.iter().copied().collect();
            return self.rewrite(&[c1, c2, c3], &remove, new, &remap, segs);
        }
        Err(Error::InapplicableMove(
            "no strand lies above or below both others".into(),
        ))
    }

    /// Every move applicable at this diagram, in a deterministic order.
    pub fn available_moves(&self) -> Vec<Move> {
        let mut out = Vec::new();
        let t = &self.tangle;
        for arc in 0..t.arcs.len() {
            for positive in [true, false] {
                for left in [true, false] {
                    out.push(Move::R1Add {
                        arc,
                        positive,
                        left,
                    });
                }
            }
        }
        let faces = self.faces();
        for c in 0..t.crossings.len() {
            if self.r1_remove(c).is_ok() {
                out.push(Move::R1Remove { crossing: c });
            }
        }
        for (fi, f) in faces.iter().enumerate() {
            for i in 0..f.len() {
                for j in 0..f.len() {
                    if i != j && f[i].0 != f[j].0 {
                        out.push(Move::R2Add {
                            face: fi,
                            first: i,
                            second: j,
                            first_over: true,
                        });
                        out.push(Move::R2Add {
                            face: fi,
                            first: i,
                            second: j,
                            first_over: false,
                        });
                    }
                }
            }
            if f.len() == 2 {
                let pa: Vec<usize> = f
                    .iter()
                    .filter_map(|&(arc, fwd)| {
                        match if fwd {
                            t.arcs[arc].head
                        } else {
                            t.arcs[arc].tail
                        } {
                            End::Port(c, _) => Some(c),
                            _ => None,
                        }
                    })
                    .collect();
                if pa.len() == 2 && pa[0] != pa[1] && self.r2_remove(pa[0], pa[1]).is_ok() {
                    out.push(Move::R2Remove { a: pa[0], b: pa[1] });
                }
            }
            if f.len() == 3 && self.r3(fi).is_ok() {
                out.push(Move::R3 { face: fi });
            }
        }
        out
    }
}

/// Reidemeister moves with their sites.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Move {
    /// Add a kink on `arc` (left or right of its stored direction).
    R1Add {
        arc: usize,
        positive: bool,
        left: bool,
    },
    /// Remove the kink at `crossing`.
    R1Remove { crossing: usize },
    /// Push the `first` dart of face `face` across the `second` one.
    R2Add {
        face: usize,
        first: usize,
        second: usize,
        first_over: bool,
    },
    /// Remove the bigon between crossings `a` and `b`.
    R2Remove { a: usize, b: usize },
    /// Slide a strand across the triangular face `face`.
    R3 { face: usize },
}

impl Move {
    pub fn crossing_delta(&self) -> i64 {
        match self {
            Move::R1Add { .. } => 1,
            Move::R1Remove { .. } => -1,
            Move::R2Add { .. } => 2,
            Move::R2Remove { .. } => -2,
            Move::R3 { .. } => 0,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaussCode {
    pub comps: Vec<Vec<(usize, bool)>>,
    pub signs: Vec<i8>,
    pub loops: usize,
}

// ---------------------------------------------------------------------------
// Links of tree pairs

/// Oriented link of an element of the oriented subgroup: the plus-tree
/// tangle capped by the star of the minus-tree tangle, closed on the vacuum
/// strand.
pub fn build_link(g: &GroupElement, conv: Convention) -> Result<LinkDiagram> {
    if !signs::is_oriented(g) {
        return Err(Error::NotOriented(g.to_string()));
    }
    let vac = SignSeq::vacuum();
    let lower = phi_of_forest(&Forest::from_tree(g.plus().clone()), &vac, conv)?;
    let upper = phi_of_forest(&Forest::from_tree(g.minus().clone()), &vac, conv)?.star();
    let mut d = Tangle::stack(&upper, &lower)?.closure()?;
    d.anchor = (d.crossing_count() > 0).then_some(0);
    Ok(d)
}

/// The same construction without orientations, defined on all of F.
pub fn build_unoriented_link(g: &GroupElement, conv: Convention) -> Result<LinkDiagram> {
    let lower = tree_piece_unoriented(g.plus(), conv)?;
    let upper = tree_piece_unoriented(g.minus(), conv)?.star();
    let mut d = Tangle::stack(&upper, &lower)?.closure()?;
    d.anchor = (d.crossing_count() > 0).then_some(0);
    Ok(d)
}

// ---------------------------------------------------------------------------
// Shading

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum FaceShade {
    Unshaded,
    ShadedPlus,
    ShadedMinus,
}

#[derive(Clone, Debug)]
pub struct Shading {
    /// Faces as dart cycles (face on the left).
    pub faces: Vec<Vec<Dart>>,
    pub shades: Vec<FaceShade>,
    /// Extra shaded discs bounded by crossing-free loops.
    pub loop_discs: usize,
    pub orientable: bool,
}

impl Shading {
    pub fn shaded_count(&self) -> usize {
        self.loop_discs
            + self
                .shades
                .iter()
                .filter(|s| **s != FaceShade::Unshaded)
                .count()
    }
}

/// Chequerboard shading with the unbounded face unshaded and the leftmost
/// region shaded `+`, then a `±` labelling of shaded faces that flips across
/// every crossing. Disconnected pieces are shaded as if drawn side by side.
pub fn shade(d: &LinkDiagram) -> Shading {
    let t = &d.tangle;
    let faces = d.faces();
    let mut face_of: HashMap<Dart, usize> = HashMap::new();
    for (i, f) in faces.iter().enumerate() {
        for &dart in f {
            face_of.insert(dart, i);
        }
    }
    // corner (k, k+1) lies left of the dart leaving port k
    let pa = t.port_arcs();
    let corner_face = |c: usize, k: u8| -> usize {
        let arc = pa[c][k as usize];
        let fwd = t.arcs[arc].tail == End::Port(c, k);
        face_of[&(arc, fwd)]
    };
    let nf = faces.len();
    let mut colour: Vec<Option<bool>> = vec![None; nf]; // true = shaded
    let mut sign: Vec<Option<Sign>> = vec![None; nf];
    // adjacency across arcs
    let mut across: Vec<Vec<usize>> = vec![Vec::new(); nf];
    for arc in 0..t.arcs.len() {
        let (l, r) = (face_of[&(arc, true)], face_of[&(arc, false)]);
        across[l].push(r);
        across[r].push(l);
    }
    let mut orientable = true;
    let mut seeds: Vec<(usize, usize)> = Vec::new(); // (unbounded, leftmost)
    if let Some(c) = d.anchor {
        // south-west corner is (3, 0), south-east corner is (0, 1)
        seeds.push((corner_face(c, 0), corner_face(c, 3)));
    }
    for start in 0..nf {
        if colour[start].is_some() {
            continue;
        }
        let (outer, left) = match seeds.pop() {
            Some(s) if colour[s.0].is_none() => s,
            _ => (start, across[start].first().copied().unwrap_or(start)),
        };
        // two-colour the piece
        let mut queue = VecDeque::from([outer]);
        colour[outer] = Some(false);
        while let Some(f) = queue.pop_front() {
            for &g in &across[f] {
                match colour[g] {
                    None => {
                        colour[g] = Some(!colour[f].unwrap());
                        queue.push_back(g);
                    }
                    Some(x) if x == colour[f].unwrap() => orientable = false,
                    _ => {}
                }
            }
        }
        if colour[left] != Some(true) {
            continue;
        }
        sign[left] = Some(Sign::Plus);
        let mut queue = VecDeque::from([left]);
        while let Some(f) = queue.pop_front() {
            let s = sign[f].unwrap();
            // the opposite shaded corner at every crossing on this face
            for &(arc, fwd) in &faces[f] {
                let a = t.arcs[arc];
                let End::Port(c, p) = (if fwd { a.head } else { a.tail }) else {
                    continue;
                };
                // the face meets c in corner (p−1, p); the opposite one is (p+1, p+2)
                let opp = corner_face(c, (p + 1) % 4);
                match sign[opp] {
                    None => {
                        sign[opp] = Some(!s);
                        queue.push_back(opp);
                    }
                    Some(x) if x == s => orientable = false,
                    _ => {}
                }
            }
        }
    }
    let shades = (0..nf)
        .map(|f| match (colour[f], sign[f]) {
            (Some(true), Some(Sign::Plus)) => FaceShade::ShadedPlus,
            (Some(true), Some(Sign::Minus)) => FaceShade::ShadedMinus,
            (Some(true), None) => FaceShade::ShadedPlus,
            _ => FaceShade::Unshaded,
        })
        .collect();
    Shading {
        faces,
        shades,
        loop_discs: t.loops,
        orientable,
    }
}

/// Append one crossing on top of `t` transposing boundary points `i` and
/// `i+1` (1-based). Pairing the result against another conjugated tangle
/// meets the inverse crossing through the star, which cancels by R-II.
pub fn conjugate_by_crossing(t: &Tangle, i: usize, left_over: bool) -> Result<Tangle> {
    let signs = t.boundary().map(|s| s.top.clone());
    let x = crossing_piece(signs.as_deref(), t.top_count(), i, left_over)?;
    Tangle::stack(&x, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> SignSeq {
        s.parse().unwrap()
    }

    #[test]
    fn object_sign_map() {
        assert_eq!(format_signs(&object_signs(&seq("+"))), "+");
        assert_eq!(format_signs(&object_signs(&seq("+-"))), "++-");
        for s in ["+", "+-", "+--+", "+-+-+"] {
            assert_eq!(object_signs(&seq(s)).len() % 2, 1);
        }
    }

    #[test]
    fn caret_piece_counts() {
        let t = caret_piece(1, 1, Some(&[Sign::Plus]), Convention::Standard).unwrap();
        assert_eq!((t.bottom_count(), t.top_count()), (1, 3));
        assert_eq!(t.crossing_count(), 1);
        t.validate().unwrap();
        for m in 1..5 {
            for i in 1..=m {
                let t = caret_piece(m, i, None, Convention::Standard).unwrap();
                let pass = t.arcs().iter().filter(|a| {
                    matches!(
                        (a.tail, a.head),
                        (End::Bottom(_), End::Top(_)) | (End::Top(_), End::Bottom(_))
                    )
                });
                assert_eq!(pass.count(), 2 * m - 2);
                t.validate().unwrap();
            }
        }
        assert!(caret_piece(2, 3, None, Convention::Standard).is_err());
        assert!(caret_piece(2, 0, None, Convention::Standard).is_err());
    }

    #[test]
    fn caret_against_its_star_is_strand_plus_loop() {
        let t = caret_piece(1, 1, Some(&[Sign::Plus]), Convention::Standard).unwrap();
        let s = Tangle::stack(&t.star(), &t).unwrap();
        s.validate().unwrap();
        assert_eq!((s.bottom_count(), s.top_count()), (1, 1));
        let d = s.closure().unwrap();
        assert_eq!(d.component_count(), 2);
        let faces = d.faces();
        let bigon = faces.iter().position(|f| f.len() == 2).unwrap();
        let _ = bigon;
        let crossings: Vec<usize> = (0..2).collect();
        let reduced = d
            .apply(&Move::R2Remove {
                a: crossings[0],
                b: crossings[1],
            })
            .unwrap();
        assert_eq!(reduced.crossing_count(), 0);
        assert_eq!(reduced.tangle().free_loops(), 2);
    }

    #[test]
    fn star_involution_and_identity() {
        let t = caret_piece(
            2,
            1,
            Some(&[Sign::Plus, Sign::Minus, Sign::Plus]),
            Convention::Standard,
        );
        let t = t.unwrap();
        assert_eq!(t.star().star(), t);
        let id = Tangle::identity(&[Sign::Plus, Sign::Minus]);
        assert_eq!(id.star(), id);
        let s = caret_piece(1, 1, Some(&[Sign::Plus]), Convention::Standard)
            .unwrap()
            .star();
        assert_eq!((s.bottom_count(), s.top_count()), (3, 1));
        assert_eq!(format_signs(&s.boundary().unwrap().bottom), "++-");
        s.validate().unwrap();
    }

    #[test]
    fn stack_identity_and_mismatch() {
        let t = caret_piece(1, 1, Some(&[Sign::Plus]), Convention::Standard).unwrap();
        let id = Tangle::identity(&[Sign::Plus]);
        assert_eq!(
            Tangle::stack(&t, &id).unwrap().canonical_code(),
            t.canonical_code()
        );
        let x0 = GroupElement::x0();
        let vac = SignSeq::vacuum();
        let lower = phi_of_forest(
            &Forest::from_tree(x0.plus().clone()),
            &vac,
            Convention::Standard,
        )
        .unwrap();
        let upper = phi_of_forest(
            &Forest::from_tree(x0.minus().clone()),
            &vac,
            Convention::Standard,
        )
        .unwrap()
        .star();
        // (+,-,-) and (+,-,+) differ at the third leaf: object index 3 (0-based)
        match Tangle::stack(&upper, &lower) {
            Err(Error::BoundaryMismatch { index, .. }) => assert_eq!(index, 3),
            other => panic!("expected mismatch, got {other:?}"),
        }
    }

    #[test]
    fn phi_identity_and_single_caret() {
        let id = phi_of_forest(&Forest::identity(3), &seq("+--"), Convention::Standard).unwrap();
        assert_eq!(id, Tangle::identity(&object_signs(&seq("+--"))));
        let one = phi_of_forest(
            &Forest::from_tree(Tree::single()),
            &SignSeq::vacuum(),
            Convention::Standard,
        )
        .unwrap();
        let piece = caret_piece(1, 1, Some(&[Sign::Plus]), Convention::Standard).unwrap();
        assert_eq!(one.canonical_code(), piece.canonical_code());
    }

    #[test]
    fn unknot_and_trivial_pair() {
        let d = build_link(&GroupElement::identity(), Convention::Standard).unwrap();
        assert_eq!(d.crossing_count(), 0);
        assert_eq!(d.component_count(), 1);
        let cc = GroupElement::new(Tree::single(), Tree::single()).unwrap();
        let d = build_link(&cc, Convention::Standard).unwrap();
        assert_eq!(d.crossing_count(), 2);
        assert_eq!(d.component_count(), 2);
        d.validate().unwrap();
        assert!(matches!(
            build_link(&GroupElement::x0(), Convention::Standard),
            Err(Error::NotOriented(_))
        ));
        let u = build_unoriented_link(&GroupElement::x0(), Convention::Standard).unwrap();
        assert_eq!(u.crossing_count(), 4);
        u.validate().unwrap();
    }

    #[test]
    fn shading_verdicts() {
        let s = shade(&LinkDiagram::unknot());
        assert!(s.orientable);
        assert_eq!(s.shaded_count(), 1);
        let x0 = build_unoriented_link(&GroupElement::x0(), Convention::Standard).unwrap();
        assert!(!shade(&x0).orientable);
        let cc = GroupElement::new(Tree::single(), Tree::single()).unwrap();
        assert!(shade(&build_link(&cc, Convention::Standard).unwrap()).orientable);
    }

    #[test]
    fn pd_round_trip() {
        let cc = GroupElement::new(Tree::single(), Tree::single()).unwrap();
        for d in [
            build_link(&cc, Convention::Standard).unwrap(),
            build_unoriented_link(&GroupElement::x1(), Convention::Mirror).unwrap(),
        ] {
            let pd = d.tangle().to_pd();
            let text = serde_json::to_string(&pd).unwrap();
            let back: PdJson = serde_json::from_str(&text).unwrap();
            assert_eq!(back, pd);
            assert_eq!(&Tangle::from_pd(&back).unwrap(), d.tangle());
        }
    }

    #[test]
    fn component_counts_agree() {
        for g in crate::signs::enumerate_oriented(5).unwrap() {
            let d = build_link(&g, Convention::Standard).unwrap();
            assert_eq!(d.component_count(), d.tangle().component_count_union_find());
        }
    }

    #[test]
    fn r1_round_trip() {
        let cc = GroupElement::new(Tree::single(), Tree::single()).unwrap();
        let d = build_link(&cc, Convention::Standard).unwrap();
        for arc in 0..d.tangle().arcs().len() {
            for positive in [true, false] {
                for left in [true, false] {
                    let k = d
                        .apply(&Move::R1Add {
                            arc,
                            positive,
                            left,
                        })
                        .unwrap();
                    k.validate().unwrap();
                    assert_eq!(k.crossing_count(), 3);
                    let back = k.apply(&Move::R1Remove { crossing: 2 }).unwrap();
                    assert_eq!(back.canonical_code(), d.canonical_code());
                    let signs = k.tangle().crossing_signs().unwrap();
                    assert_eq!(signs[2], if positive { 1 } else { -1 });
                }
            }
        }
    }

    #[test]
    fn conjugation_swaps_boundary() {
        let s = parse_signs("+++---").unwrap();
        let mut t = Tangle {
            crossings: vec![],
            arcs: vec![],
            n_bottom: 0,
            n_top: 0,
            signs: Some(BoundarySigns {
                bottom: vec![],
                top: vec![],
            }),
            loops: 0,
        };
        for (i, up) in [(0, true), (2, true), (4, true)] {
            let top = t.boundary().unwrap().top.clone();
            t = Tangle::stack(&cap_piece(Some(&top), top.len(), i, up).unwrap(), &t).unwrap();
        }
        assert_eq!(format_signs(&t.boundary().unwrap().top), "+-+-+-");
        let _ = s;
        let c = conjugate_by_crossing(&t, 2, true).unwrap();
        assert_eq!(format_signs(&c.boundary().unwrap().top), "++--+-");
        c.validate().unwrap();
        assert!(conjugate_by_crossing(&t, 6, true).is_err());
    }
}
