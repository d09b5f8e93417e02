//! Admissible paths: open, closed and periodic left-turning lattice paths
//! parametrized by tangent angle.
//!
//! Internally the edges of a closed or periodic path of rotation number `n`
//! are stored in increasing angle inside the half-open domain
//! `(0+, 2 pi n + 0+)`, so an edge pointing along `(1,0)` at lap 0 is stored
//! at lap `n`. The anchor is the value of the path at the cut `0+`. For open
//! paths the anchor is the left endpoint.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::lattice::{
    cross, dot, hull_chain, lattice_points_in_triangle, primitive_of, twice_x_dy, v, AngleKey, Direction,
    ExtendedAngle, GenericAngle, LatticeVector,
};

/// The three kinds of admissible path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    Open { lo: GenericAngle, hi: GenericAngle },
    Closed { n: i64 },
    Periodic { n: i64, gamma: LatticeVector },
}

impl PathKind {
    /// Rotation number for closed and periodic paths.
    pub fn rotation(&self) -> Option<i64> {
        match *self {
            PathKind::Open { .. } => None,
            PathKind::Closed { n } | PathKind::Periodic { n, .. } => Some(n),
        }
    }

    pub fn gamma(&self) -> LatticeVector {
        match *self {
            PathKind::Periodic { gamma, .. } => gamma,
            _ => LatticeVector::ZERO,
        }
    }

    pub fn is_open(&self) -> bool {
        matches!(self, PathKind::Open { .. })
    }
}

/// One edge: an angle with a positive multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub angle: ExtendedAngle,
    pub mult: i64,
}

impl Edge {
    pub fn new(angle: ExtendedAngle, mult: i64) -> Edge {
        Edge { angle, mult }
    }

    pub fn vector(&self) -> LatticeVector {
        self.angle.dir.vector() * self.mult
    }
}

/// A corner: the parameter interval between two consecutive edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Corner {
    /// Index of the edge following this corner (for closed paths, modulo the edge count).
    pub index: usize,
    pub prev: Option<ExtendedAngle>,
    pub next: Option<ExtendedAngle>,
    pub at: LatticeVector,
    pub is_kink: bool,
}

impl Corner {
    /// Whether the corner sits between two edges and is not a kink.
    pub fn roundable(&self) -> bool {
        self.prev.is_some() && self.next.is_some() && !self.is_kink
    }
}

/// An admissible path.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmissiblePath {
    pub(crate) kind: PathKind,
    pub(crate) edges: Vec<Edge>,
    pub(crate) anchor: LatticeVector,
}

/// Result of rounding a corner, with the bookkeeping needed for labels.
#[derive(Clone, Debug)]
pub struct Rounding {
    pub path: AdmissiblePath,
    /// Old edge index to new edge index; `None` when the edge vanished.
    pub edge_map: Vec<Option<usize>>,
    /// Old indices of the edges before and after the corner.
    pub prev_edge: usize,
    pub next_edge: usize,
    /// New edges lying in the closed interval between the two old edges,
    /// with their angle in the corner's local frame, increasing.
    pub affected: Vec<(usize, ExtendedAngle)>,
}

fn normalize_closed_angle(a: ExtendedAngle, n: i64) -> (ExtendedAngle, i64) {
    let l0 = if a.dir == Direction::EAST { a.lap - 1 } else { a.lap };
    let q = l0.div_euclid(n);
    (a.add_laps(-q * n), q)
}

fn in_closed_domain(a: ExtendedAngle, n: i64) -> bool {
    normalize_closed_angle(a, n).1 == 0
}

impl AdmissiblePath {
    /// Validating constructor.
    ///
    /// For closed and periodic paths the edges may be given with laps in
    /// `0..n`, in any order; they are normalized and sorted.
    pub fn new(kind: PathKind, edges: Vec<(ExtendedAngle, i64)>, anchor: LatticeVector) -> Result<AdmissiblePath> {
        let mut es: Vec<Edge> = Vec::with_capacity(edges.len());
        match kind {
            PathKind::Open { lo, hi } => {
                if lo.key() >= hi.key() {
                    return domain("open path needs lo < hi");
                }
                for (a, m) in edges {
                    if !(lo.key() < a.key() && a.key() < hi.key()) {
                        return Err(Error::InvalidPath(format!("edge {a} outside ({lo}, {hi})")));
                    }
                    es.push(Edge::new(a, m));
                }
            }
            PathKind::Closed { n } | PathKind::Periodic { n, .. } => {
                if n < 1 {
                    return domain("rotation number must be positive");
                }
                for (a, m) in edges {
                    if (a.lap < 0 || a.lap >= n) && !in_closed_domain(a, n) {
                        return Err(Error::InvalidPath(format!("edge {a} outside laps 0..{n}")));
                    }
                    es.push(Edge::new(normalize_closed_angle(a, n).0, m));
                }
            }
        }
        es.sort();
        Self::from_sorted(kind, es, anchor)
    }

    pub(crate) fn from_sorted(kind: PathKind, edges: Vec<Edge>, anchor: LatticeVector) -> Result<AdmissiblePath> {
        for w in edges.windows(2) {
            if w[0].angle >= w[1].angle {
                return Err(Error::InvalidPath(format!("duplicate or unsorted angle {}", w[1].angle)));
            }
        }
        for e in &edges {
            if e.mult < 1 {
                return Err(Error::InvalidPath(format!("multiplicity {} at {}", e.mult, e.angle)));
            }
        }
        if edges.len() > 64 {
            return Err(Error::Unsupported("more than 64 edges".into()));
        }
        let mut sum = LatticeVector::ZERO;
        for e in &edges {
            sum = sum
                .checked_add(e.angle.dir.vector().checked_scale(e.mult).ok_or(Error::Overflow("edge vector"))?)
                .ok_or(Error::Overflow("edge sum"))?;
        }
        match kind {
            PathKind::Open { lo, hi } => {
                if lo.key() >= hi.key() {
                    return domain("open path needs lo < hi");
                }
                if let (Some(f), Some(l)) = (edges.first(), edges.last()) {
                    if f.angle.key() <= lo.key() || l.angle.key() >= hi.key() {
                        return Err(Error::InvalidPath("edge outside the open interval".into()));
                    }
                }
            }
            PathKind::Closed { n } => {
                if n < 1 {
                    return domain("rotation number must be positive");
                }
                if !sum.is_zero() {
                    return Err(Error::InvalidPath(format!("closed path edges sum to {sum}")));
                }
                if edges.iter().any(|e| !in_closed_domain(e.angle, n)) {
                    return Err(Error::InvalidPath("edge outside the fundamental domain".into()));
                }
            }
            PathKind::Periodic { n, gamma } => {
                if n < 1 {
                    return domain("rotation number must be positive");
                }
                if gamma.is_zero() {
                    return domain("periodic path needs a nonzero period");
                }
                if sum != gamma {
                    return Err(Error::InvalidPath(format!("edges sum to {sum}, period is {gamma}")));
                }
                if edges.iter().any(|e| !in_closed_domain(e.angle, n)) {
                    return Err(Error::InvalidPath("edge outside the fundamental domain".into()));
                }
            }
        }
        Ok(AdmissiblePath { kind, edges, anchor })
    }

    /// Builds a path from edges given in one period `(cut, cut + 2 pi n]`
    /// together with the value of the path at `cut`.
    pub fn from_unrolled(
        kind: PathKind,
        cut: GenericAngle,
        value: LatticeVector,
        edges: Vec<Edge>,
    ) -> Result<AdmissiblePath> {
        match kind {
            PathKind::Open { .. } => {
                let mut es = edges;
                es.sort();
                Self::from_sorted(kind, es, value)
            }
            PathKind::Closed { n } | PathKind::Periodic { n, .. } => {
                let q0 = cut.lap.div_euclid(n) + 1;
                let zero_copy = GenericAngle::new(q0 * n, Direction::EAST).key();
                let mut anchor = value - kind.gamma() * q0;
                let mut es = Vec::with_capacity(edges.len());
                for e in edges {
                    if e.angle.key() <= cut.key() || e.angle.key() > cut.add_laps(n).key() {
                        return Err(Error::InvalidPath(format!("edge {} outside one period after {cut}", e.angle)));
                    }
                    if e.angle.key() < zero_copy {
                        anchor += e.vector();
                    }
                    es.push(Edge::new(normalize_closed_angle(e.angle, n).0, e.mult));
                }
                es.sort();
                Self::from_sorted(kind, es, anchor)
            }
        }
    }

    /// The constant closed path at `p`.
    pub fn point(p: LatticeVector, n: i64) -> Result<AdmissiblePath> {
        Self::from_sorted(PathKind::Closed { n }, Vec::new(), p)
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn anchor(&self) -> LatticeVector {
        self.anchor
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn rotation(&self) -> Option<i64> {
        self.kind.rotation()
    }

    /// Total edge multiplicity.
    pub fn total_mult(&self) -> i64 {
        self.edges.iter().map(|e| e.mult).sum()
    }

    /// The end point of an open path (the start plus all edges).
    pub fn end_point(&self) -> LatticeVector {
        self.edges.iter().fold(self.anchor, |p, e| p + e.vector())
    }

    /// Value at the start of edge `i`: the anchor plus all earlier edges.
    pub fn vertex(&self, i: usize) -> LatticeVector {
        self.edges[..i].iter().fold(self.anchor, |p, e| p + e.vector())
    }

    /// Start and end point of each edge.
    pub fn segments(&self) -> Vec<(LatticeVector, LatticeVector)> {
        let mut p = self.anchor;
        self.edges
            .iter()
            .map(|e| {
                let q = p + e.vector();
                let s = (p, q);
                p = q;
                s
            })
            .collect()
    }

    /// Value of the path at a cut.
    pub fn value_at(&self, cut: GenericAngle) -> LatticeVector {
        self.value_at_key(cut.key())
    }

    /// Value at any sort key that is not an edge angle of this path.
    pub(crate) fn value_at_key(&self, key: AngleKey) -> LatticeVector {
        match self.kind {
            PathKind::Open { .. } => {
                self.edges.iter().take_while(|e| e.angle.key() < key).fold(self.anchor, |p, e| p + e.vector())
            }
            PathKind::Closed { n } | PathKind::Periodic { n, .. } => {
                let zero = GenericAngle::new(0, Direction::EAST).key();
                let mut q = key.lap.div_euclid(n);
                let mut k = key.add_laps(-q * n);
                if k < zero {
                    k = k.add_laps(n);
                    q -= 1;
                }
                let base = self.anchor + self.kind.gamma() * q;
                self.edges.iter().take_while(|e| e.angle.key() < k).fold(base, |p, e| p + e.vector())
            }
        }
    }

    /// All corners, in parameter order.
    pub fn corners(&self) -> Vec<Corner> {
        let n_e = self.edges.len();
        let mut out = Vec::new();
        match self.kind {
            PathKind::Open { .. } => {
                let mut p = self.anchor;
                for i in 0..=n_e {
                    let prev = if i > 0 { Some(self.edges[i - 1].angle) } else { None };
                    let next = self.edges.get(i).map(|e| e.angle);
                    let is_kink = match (prev, next) {
                        (Some(a), Some(b)) => b > a.add_pi(),
                        _ => false,
                    };
                    out.push(Corner { index: i, prev, next, at: p, is_kink });
                    if i < n_e {
                        p += self.edges[i].vector();
                    }
                }
            }
            PathKind::Closed { n } | PathKind::Periodic { n, .. } => {
                if n_e == 0 {
                    out.push(Corner { index: 0, prev: None, next: None, at: self.anchor, is_kink: true });
                    return out;
                }
                let mut p = self.anchor;
                for i in 0..n_e {
                    let prev = if i == 0 { self.edges[n_e - 1].angle.add_laps(-n) } else { self.edges[i - 1].angle };
                    let next = self.edges[i].angle;
                    out.push(Corner {
                        index: i,
                        prev: Some(prev),
                        next: Some(next),
                        at: p,
                        is_kink: next > prev.add_pi(),
                    });
                    p += self.edges[i].vector();
                }
            }
        }
        out
    }

    pub fn corner(&self, i: usize) -> Result<Corner> {
        self.corners().get(i).copied().ok_or_else(|| Error::Domain(format!("no corner {i}")))
    }

    /// Index of the corner whose parameter interval contains the cut.
    pub fn corner_containing(&self, cut: GenericAngle) -> Option<usize> {
        let key = cut.key();
        match self.kind {
            PathKind::Open { lo, hi } => {
                if key <= lo.key() || key >= hi.key() {
                    return None;
                }
                Some(self.edges.iter().take_while(|e| e.angle.key() < key).count())
            }
            PathKind::Closed { n } | PathKind::Periodic { n, .. } => {
                let zero = GenericAngle::new(0, Direction::EAST).key();
                let mut k = key.add_laps(-key.lap.div_euclid(n) * n);
                if k < zero {
                    k = k.add_laps(n);
                }
                Some(self.edges.iter().position(|e| e.angle.key() > k).unwrap_or(0))
            }
        }
    }

    /// `Lambda \ c`: rounds corner `i`.
    pub fn round_corner(&self, i: usize) -> Result<AdmissiblePath> {
        Ok(self.round_detail(i)?.path)
    }

    /// Rounds corner `i` and reports how edges moved.
    pub fn round_detail(&self, i: usize) -> Result<Rounding> {
        let c = self.corner(i)?;
        if c.is_kink {
            return Err(Error::Kink(i));
        }
        let (Some(t1), Some(t2)) = (c.prev, c.next) else {
            return domain(format!("corner {i} is an end corner"));
        };
        let n_e = self.edges.len();
        let ia = if i == 0 { n_e - 1 } else { i - 1 };
        let ib = i;
        let d1 = t1.dir.vector();
        let d2 = t2.dir.vector();
        let p = c.at;

        // New edges between the two old ones, in local angles.
        let mut fresh: Vec<Edge> = Vec::new();
        if t2 != t1.add_pi() {
            let mut pts = lattice_points_in_triangle(p - d1, p, p + d2);
            pts.retain(|&q| q != p);
            let chain = hull_chain(&pts, p - d1, p + d2)?;
            for w in chain.windows(2) {
                let (d, m) = primitive_of(w[1] - w[0])?;
                match fresh.last_mut() {
                    Some(last) if last.angle.dir == d => last.mult += m,
                    _ => fresh.push(Edge::new(t1.next_with_dir(d), m)),
                }
            }
        }

        let rem_a = self.edges[ia].mult - 1;
        let rem_b = self.edges[ib].mult - 1;
        let wrap = !self.kind.is_open() && i == 0;

        let mut new_edges: Vec<Edge> = Vec::with_capacity(n_e + fresh.len());
        let mut edge_map: Vec<Option<usize>> = vec![None; n_e];
        let mut affected: Vec<(usize, ExtendedAngle)> = Vec::new();
        let mut anchor = self.anchor;

        if !wrap {
            for (k, e) in self.edges[..ia].iter().enumerate() {
                edge_map[k] = Some(new_edges.len());
                new_edges.push(*e);
            }
            if rem_a > 0 {
                edge_map[ia] = Some(new_edges.len());
                affected.push((new_edges.len(), t1));
                new_edges.push(Edge::new(t1, rem_a));
            }
            for e in &fresh {
                affected.push((new_edges.len(), e.angle));
                new_edges.push(*e);
            }
            if rem_b > 0 {
                edge_map[ib] = Some(new_edges.len());
                affected.push((new_edges.len(), t2));
                new_edges.push(Edge::new(t2, rem_b));
            }
            for (k, e) in self.edges.iter().enumerate().skip(ib + 1) {
                edge_map[k] = Some(new_edges.len());
                new_edges.push(*e);
            }
        } else {
            let n = self.kind.rotation().unwrap();
            let zero = GenericAngle::new(0, Direction::EAST).key();
            let (low, high): (Vec<Edge>, Vec<Edge>) = fresh.iter().partition(|e| e.angle.key() < zero);
            anchor = p - d1;
            for e in &low {
                anchor += e.vector();
            }
            // Local positions: remnant a, low, high, remnant b.
            let mut local: Vec<(Option<usize>, ExtendedAngle)> = Vec::new();
            for e in &high {
                local.push((Some(new_edges.len()), e.angle));
                new_edges.push(*e);
            }
            if rem_b > 0 {
                edge_map[ib] = Some(new_edges.len());
                local.push((Some(new_edges.len()), t2));
                new_edges.push(Edge::new(t2, rem_b));
            }
            for k in 1..n_e - 1 {
                edge_map[k] = Some(new_edges.len());
                new_edges.push(self.edges[k]);
            }
            if n_e >= 2 && ia != ib && rem_a > 0 {
                edge_map[ia] = Some(new_edges.len());
                local.push((Some(new_edges.len()), t1));
                new_edges.push(Edge::new(self.edges[ia].angle, rem_a));
            }
            for e in &low {
                local.push((Some(new_edges.len()), e.angle));
                new_edges.push(Edge::new(e.angle.add_laps(n), e.mult));
            }
            local.sort_by_key(|&(_, a)| a);
            affected = local.into_iter().map(|(k, a)| (k.unwrap(), a)).collect();
        }
        let path = Self::from_sorted(self.kind, new_edges, anchor)?;
        Ok(Rounding { path, edge_map, prev_edge: ia, next_edge: ib, affected })
    }

    /// Whether two paths are of the same type.
    pub fn same_type(&self, other: &AdmissiblePath) -> bool {
        match (self.kind, other.kind) {
            (PathKind::Open { lo: a, hi: b }, PathKind::Open { lo: c, hi: d }) => {
                a == c && b == d && self.anchor == other.anchor && self.end_point() == other.end_point()
            }
            (PathKind::Closed { n }, PathKind::Closed { n: m }) => n == m,
            (PathKind::Periodic { n, gamma }, PathKind::Periodic { n: m, gamma: g }) => n == m && gamma == g,
            _ => false,
        }
    }

    /// `self <= other`: `self` is weakly to the left of every tangent line of `other`.
    pub fn leq(&self, other: &AdmissiblePath) -> Result<bool> {
        if !self.same_type(other) {
            return Err(Error::TypeMismatch);
        }
        // Interval endpoints: exact edge angles or generic cuts.
        #[derive(Clone, Copy)]
        enum End {
            Exact(ExtendedAngle),
            Cut(GenericAngle),
        }
        impl End {
            fn key(self) -> AngleKey {
                match self {
                    End::Exact(a) => a.key(),
                    End::Cut(g) => g.key(),
                }
            }
        }
        let mut angles: Vec<ExtendedAngle> = self.edges.iter().chain(other.edges.iter()).map(|e| e.angle).collect();
        angles.sort();
        angles.dedup();
        let mut intervals: Vec<(End, End)> = Vec::new();
        match self.kind {
            PathKind::Open { lo, hi } => {
                let mut ends = vec![End::Cut(lo)];
                ends.extend(angles.iter().map(|&a| End::Exact(a)));
                ends.push(End::Cut(hi));
                for w in ends.windows(2) {
                    intervals.push((w[0], w[1]));
                }
            }
            PathKind::Closed { n } | PathKind::Periodic { n, .. } => {
                if angles.is_empty() {
                    return Ok(self.anchor == other.anchor);
                }
                for w in angles.windows(2) {
                    intervals.push((End::Exact(w[0]), End::Exact(w[1])));
                }
                intervals.push((End::Exact(*angles.last().unwrap()), End::Exact(angles[0].add_laps(n))));
            }
        }
        let sign_after = |d: Direction, dv: LatticeVector| {
            let c = cross(d.vector(), dv);
            if c != 0 {
                c
            } else {
                -dot(d.vector(), dv)
            }
        };
        let sign_before = |d: Direction, dv: LatticeVector| {
            let c = cross(d.vector(), dv);
            if c != 0 {
                c
            } else {
                dot(d.vector(), dv)
            }
        };
        for (a, b) in intervals {
            let sample = match a {
                End::Exact(x) => x.after().key(),
                End::Cut(g) => g.key(),
            };
            let dv = self.value_at_key(sample) - other.value_at_key(sample);
            if dv.is_zero() {
                continue;
            }
            if b.key() > a.key().add_pi() {
                return Ok(false);
            }
            let sa = match a {
                End::Exact(x) => sign_after(x.dir, dv),
                End::Cut(g) => sign_after(g.dir, dv),
            };
            let sb = match b {
                End::Exact(x) => sign_before(x.dir, dv),
                End::Cut(g) => sign_after(g.dir, dv),
            };
            if sa <= 0 || sb <= 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Everything at or below this path, sorted.
    pub fn enumerate_below(&self) -> Result<Vec<AdmissiblePath>> {
        let mut seen: HashSet<AdmissiblePath> = HashSet::new();
        let mut queue: VecDeque<AdmissiblePath> = VecDeque::new();
        seen.insert(self.clone());
        queue.push_back(self.clone());
        while let Some(p) = queue.pop_front() {
            for c in p.corners() {
                if !c.roundable() {
                    continue;
                }
                let q = p.round_corner(c.index)?;
                if seen.insert(q.clone()) {
                    queue.push_back(q);
                }
            }
        }
        let mut out: Vec<AdmissiblePath> = seen.into_iter().collect();
        out.sort();
        Ok(out)
    }

    pub fn translate(&self, w: LatticeVector) -> AdmissiblePath {
        AdmissiblePath { kind: self.kind, edges: self.edges.clone(), anchor: self.anchor + w }
    }

    /// `Lambda1 Lambda2`: joins two open paths whose intervals and endpoints meet.
    pub fn concat(&self, other: &AdmissiblePath) -> Result<AdmissiblePath> {
        let (PathKind::Open { lo, hi }, PathKind::Open { lo: lo2, hi: hi2 }) = (self.kind, other.kind) else {
            return domain("concatenation needs open paths");
        };
        if hi != lo2 || self.end_point() != other.anchor {
            return domain("paths do not meet");
        }
        let edges = self.edges.iter().chain(&other.edges).copied().collect();
        Self::from_sorted(PathKind::Open { lo, hi: hi2 }, edges, self.anchor)
    }

    /// Lexicographically smallest vertex over one period.
    pub fn min_vertex(&self) -> LatticeVector {
        let count = if self.kind.is_open() { self.edges.len() } else { self.edges.len().saturating_sub(1) };
        let mut best = self.anchor;
        let mut p = self.anchor;
        for e in &self.edges[..count] {
            p += e.vector();
            best = best.min(p);
        }
        best
    }

    /// The translate whose smallest vertex is the origin.
    pub fn canonical_translation(&self) -> AdmissiblePath {
        self.translate(-self.min_vertex())
    }

    /// Image under `(A, f)` where `f` lifts the circle map of `A` with
    /// `f(0)` in lap `lift`.
    pub fn act_symmetry(&self, a: [[i64; 2]; 2], lift: i64) -> Result<AdmissiblePath> {
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if det != 1 {
            return domain(format!("matrix has determinant {det}"));
        }
        let apply = |w: LatticeVector| v(a[0][0] * w.x + a[0][1] * w.y, a[1][0] * w.x + a[1][1] * w.y);
        let ae1 = Direction::EAST.transform(a);
        let f = |t: ExtendedAngle| {
            let d = t.dir.transform(a);
            let w = if d < ae1 { 1 } else { 0 };
            ExtendedAngle::new(t.lap + lift + w, d)
        };
        let fg = |g: GenericAngle| {
            let e = f(g.base());
            GenericAngle::new(e.lap, e.dir)
        };
        let edges: Vec<Edge> = self.edges.iter().map(|e| Edge::new(f(e.angle), e.mult)).collect();
        match self.kind {
            PathKind::Open { lo, hi } => {
                let kind = PathKind::Open { lo: fg(lo), hi: fg(hi) };
                Self::from_unrolled(kind, fg(lo), apply(self.anchor), edges)
            }
            PathKind::Closed { n } => Self::from_unrolled(
                PathKind::Closed { n },
                fg(GenericAngle::new(0, Direction::EAST)),
                apply(self.anchor),
                edges,
            ),
            PathKind::Periodic { n, gamma } => Self::from_unrolled(
                PathKind::Periodic { n, gamma: apply(gamma) },
                fg(GenericAngle::new(0, Direction::EAST)),
                apply(self.anchor),
                edges,
            ),
        }
    }

    /// Twice the signed area term: the sum of `(p.x + q.x)(q.y - p.y)` over edges.
    pub fn twice_area_term(&self) -> i128 {
        self.segments().iter().map(|&(p, q)| twice_x_dy(p, q)).sum()
    }

    pub fn has_kink(&self) -> bool {
        self.corners().iter().any(|c| c.is_kink)
    }

    /// Index of the edge at angle `a`, reducing laps modulo `n` for closed and periodic paths.
    pub fn find_edge(&self, a: ExtendedAngle) -> Option<usize> {
        let a = match self.kind.rotation() {
            Some(n) => normalize_closed_angle(a, n).0,
            None => a,
        };
        self.edges.binary_search_by_key(&a, |e| e.angle).ok()
    }

    /// Whether the path lies on the x-axis.
    pub fn on_x_axis(&self) -> bool {
        self.anchor.y == 0 && self.edges.iter().all(|e| e.angle.dir.y() == 0)
    }

    /// Lattice points of the convex polygon spanned by the vertices.
    pub fn hull_lattice_points(&self) -> Vec<LatticeVector> {
        let mut verts = vec![self.anchor];
        verts.extend(self.segments().iter().map(|s| s.1));
        lattice_points_in_polygon(&verts)
    }

    /// Compares lengths `sum m |dir|` exactly.
    pub fn length_cmp(&self, other: &AdmissiblePath) -> Ordering {
        let mut terms: BTreeMap<u64, i128> = BTreeMap::new();
        for (sgn, p) in [(1i128, self), (-1, other)] {
            for e in &p.edges {
                let n2 = (e.angle.dir.x() * e.angle.dir.x() + e.angle.dir.y() * e.angle.dir.y()) as u64;
                let (c, s) = split_square(n2);
                *terms.entry(s).or_default() += sgn * e.mult as i128 * c as i128;
            }
        }
        terms.retain(|_, c| *c != 0);
        if terms.is_empty() {
            return Ordering::Equal;
        }
        let mut prec: u32 = 8;
        loop {
            let scale = BigUint::from(10u32).pow(prec);
            let (mut lo, mut hi) = (num_bigint::BigInt::from(0), num_bigint::BigInt::from(0));
            for (&s, &c) in &terms {
                let r = (BigUint::from(s) * &scale * &scale).sqrt();
                let exact = &r * &r == BigUint::from(s) * &scale * &scale;
                let rl = num_bigint::BigInt::from(r.clone());
                let rh = if exact { rl.clone() } else { rl.clone() + 1 };
                if c > 0 {
                    lo += &rl * c;
                    hi += &rh * c;
                } else {
                    lo += &rh * c;
                    hi += &rl * c;
                }
            }
            if lo > num_bigint::BigInt::from(0) {
                return Ordering::Greater;
            }
            if hi < num_bigint::BigInt::from(0) {
                return Ordering::Less;
            }
            prec *= 2;
        }
    }
}

// n = c^2 s with s squarefree.
fn split_square(mut n: u64) -> (u64, u64) {
    let mut c = 1;
    let mut f = 2;
    while f * f <= n {
        while n.is_multiple_of(f * f) {
            n /= f * f;
            c *= f;
        }
        f += 1;
    }
    (c, n)
}

/// Lattice points in the convex hull of `verts`.
pub fn lattice_points_in_polygon(verts: &[LatticeVector]) -> Vec<LatticeVector> {
    let hull = crate::lattice::convex_hull(verts);
    let (x0, x1) = (hull.iter().map(|p| p.x).min().unwrap(), hull.iter().map(|p| p.x).max().unwrap());
    let (y0, y1) = (hull.iter().map(|p| p.y).min().unwrap(), hull.iter().map(|p| p.y).max().unwrap());
    let mut out = Vec::new();
    for x in x0..=x1 {
        for y in y0..=y1 {
            let q = v(x, y);
            let inside = match hull.len() {
                1 => q == hull[0],
                2 => {
                    let (a, b) = (hull[0], hull[1]);
                    cross(b - a, q - a) == 0 && dot(q - a, b - a) >= 0 && dot(b - q, b - a) >= 0
                }
                _ => (0..hull.len()).all(|i| cross(hull[(i + 1) % hull.len()] - hull[i], q - hull[i]) >= 0),
            };
            if inside {
                out.push(q);
            }
        }
    }
    out
}

/// The `n`-fold cover of the boundary of the convex hull of `points`.
pub fn n_convex(points: &[LatticeVector], n: i64) -> Result<AdmissiblePath> {
    if points.is_empty() {
        return domain("n_convex needs at least one point");
    }
    if n < 1 {
        return domain("rotation number must be positive");
    }
    let hull = crate::lattice::convex_hull(points);
    if hull.len() == 1 {
        return AdmissiblePath::point(hull[0], n);
    }
    let mut base: Vec<(ExtendedAngle, i64, LatticeVector)> = Vec::new();
    for i in 0..hull.len() {
        let (p, q) = (hull[i], hull[(i + 1) % hull.len()]);
        let (d, m) = primitive_of(q - p)?;
        let a = if d == Direction::EAST { ExtendedAngle::new(1, d) } else { ExtendedAngle::new(0, d) };
        base.push((a, m, p));
    }
    base.sort_by_key(|b| b.0);
    let anchor = base[0].2;
    let mut edges = Vec::new();
    for l in 0..n {
        for &(a, m, _) in &base {
            edges.push(Edge::new(a.add_laps(l), m));
        }
    }
    edges.sort();
    AdmissiblePath::from_sorted(PathKind::Closed { n }, edges, anchor)
}

/// The periodic box path wrapping `n` times around `[0,a-1] x [0,b-1]`
/// with the edge at `2 pi n` lengthened by `k`.
pub fn box_path(a: i64, b: i64, k: i64, n: i64) -> Result<AdmissiblePath> {
    if a < 1 || b < 1 || k < 1 || n < 1 {
        return domain("box_path needs a, b, k, n >= 1");
    }
    let mut edges = Vec::new();
    for l in 0..n {
        for (d, m) in [(Direction::NORTH, b - 1), (Direction::WEST, a - 1), (Direction::SOUTH, b - 1)] {
            if m > 0 {
                edges.push(Edge::new(ExtendedAngle::new(l, d), m));
            }
        }
        let m = if l == n - 1 { a - 1 + k } else { a - 1 };
        if m > 0 {
            edges.push(Edge::new(ExtendedAngle::new(l + 1, Direction::EAST), m));
        }
    }
    edges.sort();
    AdmissiblePath::from_sorted(PathKind::Periodic { n, gamma: v(k, 0) }, edges, v(a - 1, 0))
}

/// Slot `i` of an x-axis path covers `(pi/2 + i pi, pi/2 + (i+1) pi)`.
pub(crate) fn x_slot_angle(i: usize) -> ExtendedAngle {
    if i.is_multiple_of(2) {
        ExtendedAngle::new((i / 2) as i64, Direction::WEST)
    } else {
        ExtendedAngle::new(i.div_ceil(2) as i64, Direction::EAST)
    }
}

/// The closed x-axis path with corner sequence `a_0 >= a_1 <= a_2 >= ...`.
///
/// The sequence has `2n` entries, or `2n + 1` with the last equal to the first.
pub fn x_axis_path(seq: &[i64], n: i64) -> Result<AdmissiblePath> {
    let len = 2 * n as usize;
    let s: Vec<i64> = if seq.len() == len + 1 {
        if seq[len] != seq[0] {
            return domain("corner sequence must close up");
        }
        seq[..len].to_vec()
    } else if seq.len() == len {
        seq.to_vec()
    } else {
        return domain(format!("corner sequence of length {} for n = {n}", seq.len()));
    };
    let mut edges = Vec::new();
    for i in 0..len {
        let (p, q) = (s[i], s[(i + 1) % len]);
        let m = if i % 2 == 0 { p - q } else { q - p };
        if m < 0 {
            return domain(format!("corner sequence does not alternate at position {i}"));
        }
        if m > 0 {
            edges.push(Edge::new(x_slot_angle(i), m));
        }
    }
    edges.sort();
    AdmissiblePath::from_sorted(PathKind::Closed { n }, edges, v(s[0], 0))
}

impl fmt::Display for AdmissiblePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PathKind::Open { lo, hi } => write!(f, "open({lo},{hi})")?,
            PathKind::Closed { n } => write!(f, "closed({n})")?,
            PathKind::Periodic { n, gamma } => write!(f, "periodic({n},{gamma})")?,
        }
        write!(f, " {}", self.anchor)?;
        for e in &self.edges {
            write!(f, " {}x{}", e.angle, e.mult)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    dir: Direction,
    lap: i64,
    mult: i64,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct PathJson {
    kind: PathKind,
    edges: Vec<EdgeJson>,
    anchor: LatticeVector,
}

impl AdmissiblePath {
    /// Edges as they appear in the serialized form: laps in `0..n`, increasing.
    pub fn display_edges(&self) -> Vec<Edge> {
        let mut es: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| match self.kind.rotation() {
                Some(n) if e.angle.lap == n => Edge::new(e.angle.add_laps(-n), e.mult),
                _ => *e,
            })
            .collect();
        es.sort();
        es
    }
}

impl Serialize for AdmissiblePath {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PathJson {
            kind: self.kind,
            edges: self
                .display_edges()
                .into_iter()
                .map(|e| EdgeJson { dir: e.angle.dir, lap: e.angle.lap, mult: e.mult })
                .collect(),
            anchor: self.anchor,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AdmissiblePath {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PathJson::deserialize(d)?;
        AdmissiblePath::new(
            j.kind,
            j.edges.into_iter().map(|e| (ExtendedAngle::new(e.lap, e.dir), e.mult)).collect(),
            j.anchor,
        )
        .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(x: i64, y: i64) -> Direction {
        Direction::new(x, y).unwrap()
    }

    fn polygon(pts: &[(i64, i64)]) -> AdmissiblePath {
        n_convex(&pts.iter().map(|&(x, y)| v(x, y)).collect::<Vec<_>>(), 1).unwrap()
    }

    fn vertices(p: &AdmissiblePath) -> Vec<LatticeVector> {
        let mut vs: Vec<LatticeVector> = p.segments().iter().map(|s| s.0).collect();
        vs.sort();
        vs
    }

    #[test]
    fn unit_square_corners() {
        let sq = polygon(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        assert_eq!(sq.num_edges(), 4);
        assert_eq!(sq.anchor(), v(1, 0));
        let cs = sq.corners();
        assert_eq!(cs.len(), 4);
        assert!(cs.iter().all(|c| !c.is_kink));
    }

    #[test]
    fn closing_condition() {
        let e = ExtendedAngle::new(0, Direction::EAST);
        assert!(AdmissiblePath::new(PathKind::Closed { n: 1 }, vec![(e, 2)], v(0, 0)).is_err());
        let p = AdmissiblePath::new(
            PathKind::Periodic { n: 1, gamma: v(2, 1) },
            vec![
                (ExtendedAngle::new(0, d(-1, 1)), 1),
                (ExtendedAngle::new(0, d(0, -1)), 1),
                (ExtendedAngle::new(0, d(3, 1)), 1),
            ],
            v(0, 0),
        );
        assert!(p.is_ok());
    }

    #[test]
    fn pentagon_roundings() {
        let pent = polygon(&[(0, 0), (2, 0), (3, 2), (1, 3), (0, 1)]);
        let at = |p: &AdmissiblePath, q: LatticeVector| p.corners().iter().find(|c| c.at == q).unwrap().index;
        let r0 = pent.round_corner(at(&pent, v(0, 0))).unwrap();
        assert_eq!(vertices(&r0), {
            let mut w = vec![v(1, 0), v(2, 0), v(3, 2), v(1, 3), v(0, 1)];
            w.sort();
            w
        });
        let r1 = pent.round_corner(at(&pent, v(2, 0))).unwrap();
        assert_eq!(vertices(&r1), {
            let mut w = vec![v(0, 0), v(1, 0), v(3, 2), v(1, 3), v(0, 1)];
            w.sort();
            w
        });
        assert!(r1.edges().iter().any(|e| e.angle.dir == d(1, 1) && e.mult == 2));
        assert!(r0.leq(&pent).unwrap() && r1.leq(&pent).unwrap());
        assert!(!pent.leq(&r0).unwrap());
    }

    #[test]
    fn degenerate_rounding() {
        let g = polygon(&[(0, 0), (2, 0)]);
        let c = g.corners().into_iter().find(|c| c.at == v(2, 0)).unwrap();
        let r = g.round_corner(c.index).unwrap();
        assert_eq!(r, polygon(&[(0, 0), (1, 0)]));
    }

    #[test]
    fn below_counts() {
        let sq = polygon(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        assert_eq!(sq.enumerate_below().unwrap().len(), 15);
        let seg = polygon(&[(0, 0), (1, 0)]);
        assert_eq!(seg.enumerate_below().unwrap().len(), 3);
        let pt = AdmissiblePath::point(v(0, 0), 1).unwrap();
        assert_eq!(pt.enumerate_below().unwrap(), vec![pt]);
    }

    #[test]
    fn kink_example() {
        // Rotation number two, kink at the bottom corner (2,0).
        let e = |l, x, y, m| (ExtendedAngle::new(l, d(x, y)), m);
        let p = AdmissiblePath::new(
            PathKind::Closed { n: 2 },
            vec![e(0, -1, 1, 2), e(0, 0, -1, 1), e(1, 3, 2, 1), e(1, -1, 0, 1), e(1, 0, -1, 3)],
            v(2, 0),
        )
        .unwrap();
        let cs = p.corners();
        assert_eq!(cs.len(), 5);
        let kinks: Vec<_> = cs.iter().filter(|c| c.is_kink).collect();
        assert_eq!(kinks.len(), 1);
        assert_eq!(kinks[0].at, v(2, 0));
    }

    #[test]
    fn json_round_trip() {
        let sq = polygon(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        let s = serde_json::to_string(&sq).unwrap();
        let back: AdmissiblePath = serde_json::from_str(&s).unwrap();
        assert_eq!(back, sq);
        assert!(s.contains("\"lap\":0"));
    }

    #[test]
    fn symmetry_rotates_square() {
        let sq = polygon(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        let r = sq.act_symmetry([[0, -1], [1, 0]], 0).unwrap();
        assert_eq!(r.canonical_translation(), sq.canonical_translation());
        assert_eq!(sq.act_symmetry([[1, 0], [0, 1]], 0).unwrap(), sq);
    }

    #[test]
    fn box_path_shape() {
        let b = box_path(1, 1, 2, 1).unwrap();
        assert_eq!(b.num_edges(), 1);
        assert_eq!(b.edges()[0].mult, 2);
        assert!(b.corners()[0].is_kink);
    }

    #[test]
    fn length_decreases() {
        let pent = polygon(&[(0, 0), (2, 0), (3, 2), (1, 3), (0, 1)]);
        for c in pent.corners() {
            let r = pent.round_corner(c.index).unwrap();
            assert_eq!(r.length_cmp(&pent), Ordering::Less);
        }
    }
}
