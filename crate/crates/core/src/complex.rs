//! Finite graded complexes built from the combinatorics.
//!
//! A complex holds a generator basis per degree and the boundary matrices
//! assembled from `differential`. Truncated families keep every generator
//! whose degree lies in `[lo, hi]`; homology is reliable strictly inside.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::Chain;
use crate::differential::differential;
use crate::error::{domain, Error, Result};
use crate::generator::Generator;
use crate::lattice::{cross, primitive_of, Direction, ExtendedAngle, LatticeVector};
use crate::linalg::SparseIntMatrix;
use crate::path::{AdmissiblePath, Edge, PathKind};
use crate::xaxis::x_axis_generators;

/// What to build.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ComplexSpec {
    /// All generators whose path lies to the left of `path`.
    Below { path: AdmissiblePath },
    /// The summand of `Below` where index minus `#h` equals `j`.
    BelowComponent { path: AdmissiblePath, j: i64 },
    /// Rotation-`n` closed paths modulo translation with bounding box at most
    /// `diameter` in each direction.
    Bar { n: i64, diameter: i64, degrees: [i64; 2] },
    /// Closed x-axis paths with corners in `[0, m]`.
    Xaxis {
        n: i64,
        m: i64,
        degrees: [i64; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        j: Option<i64>,
    },
    /// Periodic paths modulo translation along the period, with vertex heights
    /// `cross(g, p)` in `heights` (where `g` is the primitive period direction)
    /// and L1 length at most `length`.
    Periodic { n: i64, gamma: LatticeVector, heights: [i64; 2], length: i64, degrees: [i64; 2] },
}

/// How differential terms are identified with basis elements.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Normal {
    Identity,
    Translation,
    AlongPeriod { g: LatticeVector, u: LatticeVector },
}

impl Normal {
    fn apply(&self, g: &Generator) -> Generator {
        match *self {
            Normal::Identity => g.clone(),
            Normal::Translation => {
                let p = g.path();
                g.translate(-p.min_vertex())
            }
            Normal::AlongPeriod { g: dir, u } => {
                let a = g.path().anchor();
                let s = cross(a, u) as i64;
                g.translate(-(dir * s))
            }
        }
    }
}

/// A finite graded chain complex.
#[derive(Clone, Debug)]
pub struct GradedComplex {
    pub spec: Option<ComplexSpec>,
    /// Generator window: every generator with degree in `[lo, hi]` is present.
    pub lo: i64,
    pub hi: i64,
    /// Whether the complex is complete (no generators outside the window).
    pub exact: bool,
    basis: BTreeMap<i64, Vec<Generator>>,
    boundary: BTreeMap<i64, SparseIntMatrix>,
    lookup: HashMap<Generator, (i64, usize)>,
    normal: Normal,
    grading: Grading,
}

#[derive(Clone, Debug)]
enum Grading {
    Index,
    Chord,
    Relative(Generator),
}

impl Grading {
    fn degree(&self, g: &Generator) -> Result<i64> {
        match self {
            Grading::Index => g.index(),
            Grading::Chord => g.chord_index(),
            Grading::Relative(r) => g.relative_index(r),
        }
    }
}

fn all_labelings(paths: &[AdmissiblePath]) -> Result<Vec<Generator>> {
    let mut out = Vec::new();
    for p in paths {
        if p.num_edges() > 20 {
            return Err(Error::Unsupported(format!("{} edges is too many to label exhaustively", p.num_edges())));
        }
        for h in 0..1u64 << p.num_edges() {
            out.push(Generator::new(p.clone(), h)?);
        }
    }
    Ok(out)
}

fn grading_for(p: &AdmissiblePath) -> Grading {
    match p.kind() {
        PathKind::Closed { .. } => Grading::Index,
        PathKind::Open { .. } => Grading::Chord,
        PathKind::Periodic { .. } => Grading::Relative(Generator::all_e(p.clone())),
    }
}

impl GradedComplex {
    pub fn build(spec: &ComplexSpec) -> Result<GradedComplex> {
        let mut c = match spec {
            ComplexSpec::Below { path } => {
                let gens = all_labelings(&path.enumerate_below()?)?;
                Self::assemble(gens, grading_for(path), Normal::Identity, None, None)?
            }
            ComplexSpec::BelowComponent { path, j } => {
                let grading = grading_for(path);
                let mut gens = Vec::new();
                for g in all_labelings(&path.enumerate_below()?)? {
                    if grading.degree(&g)? - g.num_h() == *j {
                        gens.push(g);
                    }
                }
                Self::assemble(gens, grading, Normal::Identity, None, None)?
            }
            ComplexSpec::Bar { n, diameter, degrees } => {
                if *n != 1 {
                    return Err(Error::Unsupported("bar truncations are implemented for rotation number 1".into()));
                }
                let paths = convex_polygons(*diameter)?;
                let gens = window(all_labelings(&paths)?, &Grading::Index, *degrees)?;
                Self::assemble(gens, Grading::Index, Normal::Translation, Some(*degrees), None)?
            }
            ComplexSpec::Xaxis { n, m, degrees, j } => {
                if *n < 1 || *m < 0 {
                    return domain("xaxis needs n >= 1 and m >= 0");
                }
                let max_len = degrees[1] + 1 + 2 * n;
                let gens = window(x_axis_generators(*n as usize, *m, max_len)?, &Grading::Index, *degrees)?;
                Self::assemble(gens, Grading::Index, Normal::Identity, Some(*degrees), *j)?
            }
            ComplexSpec::Periodic { n, gamma, heights, length, degrees } => {
                let (gens, normal, reference) = periodic_generators(*n, *gamma, *heights, *length)?;
                let grading = Grading::Relative(reference);
                let gens = window(gens, &grading, *degrees)?;
                Self::assemble(gens, grading, normal, Some(*degrees), None)?
            }
        };
        c.spec = Some(spec.clone());
        Ok(c)
    }

    /// Builds a complex from generators closed under the differential
    /// (within the degree window, if any).
    fn assemble(
        gens: Vec<Generator>,
        grading: Grading,
        normal: Normal,
        degrees: Option<[i64; 2]>,
        j: Option<i64>,
    ) -> Result<GradedComplex> {
        let mut basis: BTreeMap<i64, Vec<Generator>> = BTreeMap::new();
        for g in gens {
            let d = grading.degree(&g)?;
            if j.is_some_and(|j| d - g.num_h() != j) {
                continue;
            }
            basis.entry(d).or_default().push(g);
        }
        for b in basis.values_mut() {
            b.sort();
            b.dedup();
        }
        let (lo, hi, exact) = match degrees {
            Some([a, b]) => (a - 1, b + 1, false),
            None => (basis.keys().next().copied().unwrap_or(0), basis.keys().next_back().copied().unwrap_or(0), true),
        };
        let mut lookup = HashMap::new();
        for (&d, b) in &basis {
            for (i, g) in b.iter().enumerate() {
                lookup.insert(g.clone(), (d, i));
            }
        }
        let mut c =
            GradedComplex { spec: None, lo, hi, exact, basis, boundary: BTreeMap::new(), lookup, normal, grading };
        let degs: Vec<i64> = c.basis.keys().copied().collect();
        for d in degs {
            if !c.exact && d <= lo {
                continue;
            }
            let cols: Vec<Vec<(usize, i64)>> = c.basis[&d].par_iter().map(|g| c.column(g, d)).collect::<Result<_>>()?;
            let rows = c.basis.get(&(d - 1)).map_or(0, |b| b.len());
            c.boundary.insert(d, SparseIntMatrix::from_columns(rows, cols)?);
        }
        Ok(c)
    }

    fn column(&self, g: &Generator, d: i64) -> Result<Vec<(usize, i64)>> {
        let dg = self.boundary_chain(&Chain::single(g.clone(), 1))?;
        let mut col = Vec::with_capacity(dg.len());
        for (x, &c) in dg.iter() {
            match self.lookup.get(x) {
                Some(&(dx, i)) if dx == d - 1 => col.push((i, c)),
                Some(&(dx, _)) => {
                    return Err(Error::NotClosed(format!(
                        "term {x} of the boundary of {g} has degree {dx}, expected {}",
                        d - 1
                    )))
                }
                None => return Err(Error::NotClosed(format!("term {x} of the boundary of {g} is outside the basis"))),
            }
        }
        Ok(col)
    }

    /// The differential on chains, with terms identified with basis representatives.
    pub fn boundary_chain(&self, x: &Chain) -> Result<Chain> {
        let mut out = Chain::zero();
        for (g, &c) in x.iter() {
            for (y, &k) in differential(g)?.iter() {
                out.add_term(self.normal.apply(y), c * k);
            }
        }
        Ok(out)
    }

    /// Representative of a generator in this complex's identification.
    pub fn normalize(&self, g: &Generator) -> Generator {
        self.normal.apply(g)
    }

    pub fn normalize_chain(&self, x: &Chain) -> Chain {
        x.iter().map(|(g, &c)| (self.normal.apply(g), c)).collect()
    }

    pub fn degree_of(&self, g: &Generator) -> Result<i64> {
        self.grading.degree(g)
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.basis.keys().copied().collect()
    }

    pub fn basis(&self, d: i64) -> &[Generator] {
        self.basis.get(&d).map_or(&[], |b| b.as_slice())
    }

    pub fn rank(&self, d: i64) -> usize {
        self.basis(d).len()
    }

    pub fn total_rank(&self) -> usize {
        self.basis.values().map(|b| b.len()).sum()
    }

    pub fn locate(&self, g: &Generator) -> Option<(i64, usize)> {
        self.lookup.get(&self.normal.apply(g)).copied()
    }

    /// Boundary matrix `C_d -> C_{d-1}`; `None` where the window cuts it off.
    pub fn boundary(&self, d: i64) -> Option<&SparseIntMatrix> {
        self.boundary.get(&d)
    }

    /// Whether homology in degree `d` is computed from complete data.
    pub fn reliable(&self, d: i64) -> bool {
        self.exact || (d > self.lo && d < self.hi)
    }

    /// Coordinates of a homogeneous chain of degree `d`.
    pub fn coords(&self, x: &Chain, d: i64) -> Result<Vec<i64>> {
        let mut v = vec![0i64; self.rank(d)];
        for (g, &c) in x.iter() {
            match self.locate(g) {
                Some((dg, i)) if dg == d => v[i] += c,
                _ => return Err(Error::OutsideBasis(format!("{g} is not a degree-{d} basis element"))),
            }
        }
        Ok(v)
    }

    /// The chain with coordinates `v` in degree `d`.
    pub fn chain(&self, v: &[i64], d: i64) -> Chain {
        self.basis(d).iter().zip(v).filter(|(_, &c)| c != 0).map(|(g, &c)| (g.clone(), c)).collect()
    }

    /// Degree of a homogeneous nonzero chain.
    pub fn chain_degree(&self, x: &Chain) -> Result<Option<i64>> {
        let mut d = None;
        for (g, _) in x.iter() {
            let e = self.degree_of(&self.normal.apply(g))?;
            if d.is_some_and(|d| d != e) {
                return domain("chain is not homogeneous");
            }
            d = Some(e);
        }
        Ok(d)
    }
}

fn window(gens: Vec<Generator>, grading: &Grading, [lo, hi]: [i64; 2]) -> Result<Vec<Generator>> {
    let mut out = Vec::new();
    for g in gens {
        let d = grading.degree(&g)?;
        if d >= lo - 1 && d <= hi + 1 {
            out.push(g);
        }
    }
    Ok(out)
}

/// Convex lattice polygons (as rotation-1 closed paths, including points)
/// with width and height at most `d`, one per translation class.
pub fn convex_polygons(d: i64) -> Result<Vec<AdmissiblePath>> {
    if d < 0 {
        return domain("diameter must be nonnegative");
    }
    let mut dirs: Vec<Direction> = Vec::new();
    for x in -d..=d {
        for y in -d..=d {
            if let Ok(dir) = Direction::new(x, y) {
                if !dirs.contains(&dir) {
                    dirs.push(dir);
                }
            }
        }
    }
    dirs.sort();
    let mut out = vec![AdmissiblePath::point(LatticeVector::ZERO, 1)?];
    let lex_pos = |p: LatticeVector| p.x > 0 || (p.x == 0 && p.y > 0);
    struct St {
        pos: LatticeVector,
        lo: LatticeVector,
        hi: LatticeVector,
        edges: Vec<(Direction, i64)>,
    }
    fn rec(
        st: &mut St,
        k: usize,
        order: &[Direction],
        d: i64,
        lex_pos: &dyn Fn(LatticeVector) -> bool,
        found: &mut Vec<Vec<(Direction, i64)>>,
    ) {
        for (idx, &dir) in order.iter().enumerate().skip(k) {
            for m in 1..=d {
                let q = st.pos + dir.vector() * m;
                let lo = LatticeVector { x: st.lo.x.min(q.x), y: st.lo.y.min(q.y) };
                let hi = LatticeVector { x: st.hi.x.max(q.x), y: st.hi.y.max(q.y) };
                if hi.x - lo.x > d || hi.y - lo.y > d {
                    break;
                }
                if q.is_zero() {
                    if !st.edges.is_empty() {
                        let mut es = st.edges.clone();
                        es.push((dir, m));
                        found.push(es);
                    }
                    break;
                }
                if !lex_pos(q) {
                    break;
                }
                let saved = (st.pos, st.lo, st.hi);
                st.pos = q;
                st.lo = lo;
                st.hi = hi;
                st.edges.push((dir, m));
                rec(st, idx + 1, order, d, lex_pos, found);
                st.edges.pop();
                (st.pos, st.lo, st.hi) = saved;
            }
        }
    }
    let mut found = Vec::new();
    for (i, &first) in dirs.iter().enumerate() {
        if !lex_pos(first.vector()) {
            continue;
        }
        // Directions after `first`, going once around.
        let order: Vec<Direction> = dirs[i..].iter().chain(dirs[..i].iter()).copied().collect();
        let mut st =
            St { pos: LatticeVector::ZERO, lo: LatticeVector::ZERO, hi: LatticeVector::ZERO, edges: Vec::new() };
        for m in 1..=d {
            let q = first.vector() * m;
            if q.x.abs() > d || q.y.abs() > d {
                break;
            }
            st.pos = q;
            st.lo = LatticeVector { x: 0.min(q.x), y: 0.min(q.y) };
            st.hi = LatticeVector { x: 0.max(q.x), y: 0.max(q.y) };
            st.edges = vec![(first, m)];
            rec(&mut st, 1, &order, d, &lex_pos, &mut found);
        }
    }
    for es in found {
        let pts: Vec<LatticeVector> = es
            .iter()
            .scan(LatticeVector::ZERO, |p, &(dir, m)| {
                *p += dir.vector() * m;
                Some(*p)
            })
            .collect();
        let p = crate::path::n_convex(&pts, 1)?;
        // Collinear consecutive edges merge in the hull; those polygons are
        // produced elsewhere with a single edge.
        if p.num_edges() == es.len() {
            out.push(p.canonical_translation());
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Solves `cross(g, u) = 1` for primitive `g`.
fn complement(g: LatticeVector) -> LatticeVector {
    // Extended Euclid on (g.x, g.y): a g.x + b g.y = 1, then u = (-b, a).
    fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
        if b == 0 {
            (a, 1, 0)
        } else {
            let (d, x, y) = egcd(b, a.rem_euclid(b));
            (d, y, x - a.div_euclid(b) * y)
        }
    }
    let (d, a, b) = egcd(g.x, g.y);
    let (a, b) = if d < 0 { (-a, -b) } else { (a, b) };
    LatticeVector { x: -b, y: a }
}

type PeriodicBasis = (Vec<Generator>, Normal, Generator);

fn periodic_generators(n: i64, gamma: LatticeVector, heights: [i64; 2], length: i64) -> Result<PeriodicBasis> {
    if n < 1 || gamma.is_zero() || length < 1 {
        return domain("periodic region needs n >= 1, gamma != 0, length >= 1");
    }
    let (g, _) = primitive_of(gamma)?;
    let g = g.vector();
    let u = complement(g);
    debug_assert_eq!(cross(g, u), 1);
    let kind = PathKind::Periodic { n, gamma };
    // Candidate angles in the fundamental domain.
    let mut cands: Vec<(ExtendedAngle, i64)> = Vec::new();
    for x in -length..=length {
        for y in -length..=length {
            if x.abs() + y.abs() > length {
                continue;
            }
            if let Ok(dir) = Direction::new(x, y) {
                for lap in 0..n {
                    let l = if dir == Direction::EAST { lap + 1 } else { lap };
                    cands.push((ExtendedAngle::new(l, dir), x.abs() + y.abs()));
                }
            }
        }
    }
    cands.sort();
    cands.dedup();
    let mut sets: Vec<Vec<Edge>> = Vec::new();
    fn rec(
        cands: &[(ExtendedAngle, i64)],
        k: usize,
        rem: LatticeVector,
        budget: i64,
        cur: &mut Vec<Edge>,
        out: &mut Vec<Vec<Edge>>,
    ) {
        if rem.l1() > budget {
            return;
        }
        if rem.is_zero() && !cur.is_empty() {
            out.push(cur.clone());
        }
        for i in k..cands.len() {
            let (a, c) = cands[i];
            let mut m = 1;
            while m * c <= budget {
                cur.push(Edge::new(a, m));
                rec(cands, i + 1, rem - a.dir.vector() * m, budget - m * c, cur, out);
                cur.pop();
                m += 1;
            }
        }
    }
    rec(&cands, 0, gamma, length, &mut Vec::new(), &mut sets);
    let mut gens = Vec::new();
    for es in sets {
        let base = AdmissiblePath::from_sorted(kind, es, LatticeVector::ZERO)?;
        let mut hs = vec![0i64];
        let mut p = LatticeVector::ZERO;
        for e in base.edges() {
            p += e.vector();
            hs.push(cross(g, p) as i64);
        }
        let (mn, mx) = (*hs.iter().min().unwrap(), *hs.iter().max().unwrap());
        for t in heights[0] - mn..=heights[1] - mx {
            let path = base.translate(u * t);
            for h in 0..1u64 << path.num_edges() {
                gens.push(Generator::new(path.clone(), h)?);
            }
        }
    }
    let (dir, m) = primitive_of(gamma)?;
    let a = if dir == Direction::EAST { ExtendedAngle::new(1, dir) } else { ExtendedAngle::new(0, dir) };
    let reference = Generator::all_e(AdmissiblePath::from_sorted(kind, vec![Edge::new(a, m)], LatticeVector::ZERO)?);
    Ok((gens, Normal::AlongPeriod { g, u }, reference))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::v;
    use crate::path::n_convex;

    #[test]
    fn unit_square_counts() {
        let sq = n_convex(&[v(0, 0), v(1, 0), v(1, 1), v(0, 1)], 1).unwrap();
        let c = GradedComplex::build(&ComplexSpec::Below { path: sq }).unwrap();
        assert_eq!(c.total_rank(), 76);
        for d in c.degrees() {
            if let (Some(a), Some(b)) = (c.boundary(d), c.boundary(d - 1)) {
                assert!(b.mul(a).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn small_polygon_counts() {
        // Point, two horizontal/vertical/diagonal 2-gons, and so on.
        let ps = convex_polygons(1).unwrap();
        // point, 4 primitive 2-gons, 4 triangles, 1 square
        assert_eq!(ps.len(), 10);
        assert!(ps.iter().all(|p| p.min_vertex() == LatticeVector::ZERO));
    }

    #[test]
    fn complement_solves() {
        for g in [v(1, 0), v(0, 1), v(2, 3), v(-3, 5), v(1, -1)] {
            assert_eq!(cross(g, complement(g)), 1);
        }
    }
}
