//! Integer homology of graded complexes, boundary membership, induced maps
//! and stabilization over growing truncations.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::Chain;
use crate::complex::{ComplexSpec, GradedComplex};
use crate::error::{domain, Error, Result};
use crate::generator::Generator;
use crate::linalg::{smith_dense, solve, Solve, SparseIntMatrix};
use crate::reduce::Reduction;

/// `Z^rank ⊕ ⊕ Z/t_i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub rank: usize,
    pub torsion: Vec<u64>,
}

impl HomologyGroup {
    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }
}

impl std::fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if self.rank > 0 {
            parts.push(if self.rank == 1 { "Z".to_string() } else { format!("Z^{}", self.rank) });
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// One degree of a homology computation, as serialized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub degree: i64,
    pub rank: usize,
    pub torsion: Vec<u64>,
    pub partial: bool,
    pub spec: Option<ComplexSpec>,
}

type Dense = Vec<Vec<BigInt>>;

/// Homology coordinates in one degree of the reduced complex.
///
/// Classes are written as `rank` free coordinates followed by one
/// coordinate per torsion summand, reduced modulo its order.
struct Basis {
    rank: usize,
    torsion: Vec<u64>,
    /// Rows mapping a critical cycle to its free, then torsion, coordinates.
    coords: Dense,
    /// Columns: critical cycles representing the free, then torsion, generators.
    reps: Dense,
}

fn mat_vec(m: &Dense, x: &[BigInt]) -> Vec<BigInt> {
    m.iter().map(|row| row.iter().zip(x).filter(|(a, _)| !a.is_zero()).map(|(a, b)| a * b).sum()).collect()
}

fn small(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or(Error::Overflow("homology coordinates"))
}

/// Homology computations over one complex, sharing a single reduction.
pub struct Homology<'a> {
    complex: &'a GradedComplex,
    red: Reduction,
}

impl<'a> Homology<'a> {
    pub fn new(complex: &'a GradedComplex) -> Result<Homology<'a>> {
        Ok(Homology { complex, red: Reduction::new(complex)? })
    }

    pub fn complex(&self) -> &GradedComplex {
        self.complex
    }

    fn basis(&self, d: i64) -> Result<Basis> {
        let m = self.red.critical(d).len();
        let (a, cols_a) = match self.red.residual_matrix(d + 1) {
            Some(a) => (a, self.red.critical(d + 1).len()),
            None => (vec![Vec::new(); m], 0),
        };
        // U A V = D; boundaries are spanned by d_i e_i in y = U z.
        let sa = smith_dense(&a, cols_a);
        let s = sa.rank();
        let mut torsion = Vec::new();
        let mut tors_idx = Vec::new();
        for (i, t) in sa.divisors.iter().enumerate() {
            if !t.is_one() {
                torsion.push(t.to_u64().ok_or(Error::Overflow("torsion"))?);
                tors_idx.push(i);
            }
        }
        // Cycles: y[..s] free, y[s..] in the kernel of W = B U^{-1}[:, s..].
        let b = self.red.residual_matrix(d).unwrap_or_default();
        let tail: Dense = sa.u_inv.iter().map(|row| row[s..].to_vec()).collect();
        let w: Dense = b
            .iter()
            .map(|row| (0..m - s).map(|j| row.iter().zip(&tail).map(|(x, t)| x * &t[j]).sum()).collect())
            .collect();
        let sw = smith_dense(&w, m - s);
        let r = sw.rank();
        let rank = m - s - r;
        let mut coords: Dense = sw.v_inv[r..]
            .iter()
            .map(|vrow| (0..m).map(|k| vrow.iter().enumerate().map(|(i, x)| x * &sa.u[s + i][k]).sum()).collect())
            .collect();
        coords.extend(tors_idx.iter().map(|&i| sa.u[i].clone()));
        let mut reps: Dense = tail
            .iter()
            .map(|trow| (r..m - s).map(|j| trow.iter().enumerate().map(|(i, x)| x * &sw.v[i][j]).sum()).collect())
            .collect();
        for (row, urow) in reps.iter_mut().zip(&sa.u_inv) {
            row.extend(tors_idx.iter().map(|&i| urow[i].clone()));
        }
        Ok(Basis { rank, torsion, coords, reps })
    }

    pub fn group(&self, d: i64) -> Result<HomologyGroup> {
        let b = self.basis(d)?;
        Ok(HomologyGroup { rank: b.rank, torsion: b.torsion })
    }

    pub fn report(&self, d: i64) -> Result<HomologyReport> {
        let g = self.group(d)?;
        Ok(HomologyReport {
            degree: d,
            rank: g.rank,
            torsion: g.torsion,
            partial: !self.complex.reliable(d),
            spec: self.complex.spec.clone(),
        })
    }

    /// Coordinates of the class of a degree-`d` cycle: free coordinates,
    /// then torsion coordinates reduced modulo their orders.
    pub fn class_of(&self, x: &Chain, d: i64) -> Result<Vec<i64>> {
        let basis = self.basis(d)?;
        self.class_in(&basis, x, d)
    }

    fn class_in(&self, basis: &Basis, x: &Chain, d: i64) -> Result<Vec<i64>> {
        let v = self.complex.coords(x, d)?;
        let p = self.red.project(&v, d)?;
        let pb: Vec<BigInt> = p.iter().map(|&c| BigInt::from(c)).collect();
        let mut out: Vec<i64> = mat_vec(&basis.coords, &pb).iter().map(small).collect::<Result<_>>()?;
        for (c, &t) in out[basis.rank..].iter_mut().zip(&basis.torsion) {
            *c = c.rem_euclid(t as i64);
        }
        Ok(out)
    }

    /// Cycles representing the free generators, then the torsion generators.
    pub fn representatives(&self, d: i64) -> Result<Vec<Chain>> {
        let b = self.basis(d)?;
        let crit = self.red.critical(d);
        let uppers = self.red.upper_pivots(d);
        let bd = self.complex.boundary(d);
        let count = b.rank + b.torsion.len();
        let sub = match (bd, uppers.is_empty()) {
            (Some(bd), false) => {
                Some(SparseIntMatrix::from_columns(bd.rows(), uppers.iter().map(|&a| bd.column(a).to_vec()).collect())?)
            }
            _ => None,
        };
        (0..count)
            .map(|k| {
                let mut z = vec![0i64; self.complex.rank(d)];
                for (i, &c) in crit.iter().enumerate() {
                    z[c] = small(&b.reps[i][k])?;
                }
                // Complete by the paired cells so the lift is a cycle.
                if let (Some(bd), Some(sub)) = (bd, &sub) {
                    let rhs: Vec<i64> = boundary_of_vec(bd, &z)?.iter().map(|&x| -x).collect();
                    match solve(sub, &rhs)? {
                        Solve::Solution(t) => {
                            for (&a, &c) in uppers.iter().zip(&t) {
                                z[a] = c;
                            }
                        }
                        Solve::Unsolvable { .. } => return domain("representative does not lift"),
                    }
                }
                Ok(self.complex.chain(&z, d))
            })
            .collect()
    }
}

fn boundary_of_vec(m: &SparseIntMatrix, z: &[i64]) -> Result<Vec<i64>> {
    let mut out = vec![0i64; m.rows()];
    for (j, &c) in z.iter().enumerate() {
        if c == 0 {
            continue;
        }
        for &(i, v) in m.column(j) {
            let t = v.checked_mul(c).ok_or(Error::Overflow("boundary"))?;
            out[i] = out[i].checked_add(t).ok_or(Error::Overflow("boundary"))?;
        }
    }
    Ok(out)
}

/// `H_d(C)`.
pub fn homology(c: &GradedComplex, d: i64) -> Result<HomologyGroup> {
    Homology::new(c)?.group(d)
}

/// Reports for each degree in `degrees`, sharing one reduction.
pub fn homology_reports(c: &GradedComplex, degrees: impl IntoIterator<Item = i64>) -> Result<Vec<HomologyReport>> {
    let h = Homology::new(c)?;
    let ds: Vec<i64> = degrees.into_iter().collect();
    ds.par_iter().map(|&d| h.report(d)).collect()
}

/// Whether `x` is a cycle; its support must lie in the basis.
pub fn is_cycle(x: &Chain, c: &GradedComplex) -> Result<bool> {
    if x.is_zero() {
        return Ok(true);
    }
    let d = c.chain_degree(x)?.unwrap();
    c.coords(x, d)?;
    Ok(c.boundary_chain(x)?.is_zero())
}

/// Outcome of a boundary membership test.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryTest {
    /// `dy = x`.
    Witness(Chain),
    /// No integer preimage; `residue` is nonzero in the given Smith coordinate.
    NotBoundary { coordinate: usize, residue: BigInt },
}

impl BoundaryTest {
    pub fn witness(&self) -> Option<&Chain> {
        match self {
            BoundaryTest::Witness(y) => Some(y),
            BoundaryTest::NotBoundary { .. } => None,
        }
    }
}

/// Solves `dy = x` exactly.
pub fn is_boundary(x: &Chain, c: &GradedComplex) -> Result<BoundaryTest> {
    let Some(d) = c.chain_degree(x)? else {
        return Ok(BoundaryTest::Witness(Chain::zero()));
    };
    let b = c.coords(x, d)?;
    let empty;
    let m = match c.boundary(d + 1) {
        Some(m) => m,
        None if c.rank(d + 1) == 0 && c.reliable(d + 1) => {
            empty = SparseIntMatrix::zeros(c.rank(d), 0);
            &empty
        }
        None => return domain(format!("degree {} lies outside the window", d + 1)),
    };
    match solve(m, &b)? {
        Solve::Solution(y) => Ok(BoundaryTest::Witness(c.chain(&y, d + 1))),
        Solve::Unsolvable { coordinate, residue } => Ok(BoundaryTest::NotBoundary { coordinate, residue }),
    }
}

/// A homomorphism on homology in class coordinates (free, then torsion).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InducedMap {
    pub source: HomologyGroup,
    pub target: HomologyGroup,
    /// One row per target coordinate, one column per source generator.
    pub matrix: Vec<Vec<i64>>,
    pub iso: bool,
}

impl InducedMap {
    /// Rank of the map on free parts.
    pub fn free_rank(&self) -> usize {
        let rows = &self.matrix[..self.target.rank];
        let dense: Dense =
            rows.iter().map(|r| r[..self.source.rank].iter().map(|&x| BigInt::from(x)).collect()).collect();
        smith_dense(&dense, self.source.rank).rank()
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(|&x| x == 0)
    }
}

/// Whether the map `Z^a + T_A -> Z^b + T_B` given by `m` is surjective.
fn is_surjective(m: &[Vec<i64>], target: &HomologyGroup, cols: usize) -> bool {
    let rows = target.rank + target.torsion.len();
    let extra = target.torsion.len();
    let dense: Dense = (0..rows)
        .map(|i| {
            let mut row: Vec<BigInt> = m[i].iter().map(|&x| BigInt::from(x)).collect();
            for (k, &t) in target.torsion.iter().enumerate() {
                row.push(if i == target.rank + k { BigInt::from(t) } else { BigInt::zero() });
            }
            row
        })
        .collect();
    let sf = smith_dense(&dense, cols + extra);
    sf.rank() == rows && sf.divisors.iter().all(|d| d.abs().is_one())
}

/// Checks `f d = d f` on every source generator in `degrees`.
pub fn check_chain_map<F>(f: &F, source: &GradedComplex, target: &GradedComplex, degrees: &[i64]) -> Result<()>
where
    F: Fn(&Generator) -> Result<Chain> + Sync,
{
    for &d in degrees {
        if source.boundary(d).is_none() {
            continue;
        }
        source.basis(d).par_iter().try_for_each(|g| {
            let fg = target.normalize_chain(&f(g)?);
            let lhs = target.boundary_chain(&fg)?;
            let mut rhs = Chain::zero();
            for (y, &c) in source.boundary_chain(&Chain::single(g.clone(), 1))?.iter() {
                rhs.add_scaled(&target.normalize_chain(&f(y)?), &c);
            }
            if lhs != rhs {
                return Err(Error::NotChainMap(g.to_string()));
            }
            Ok(())
        })?;
    }
    Ok(())
}

/// The map `H_d(source) -> H_e(target)` induced by a chain map `f`.
/// It is an isomorphism iff the groups agree and the map is onto.
pub fn induced_map<F>(f: &F, source: &Homology, target: &Homology, d: i64, e: i64) -> Result<InducedMap>
where
    F: Fn(&Generator) -> Result<Chain> + Sync,
{
    let (sc, tc) = (source.complex(), target.complex());
    check_chain_map(f, sc, tc, &[d, d + 1])?;
    let (gs, gt) = (source.group(d)?, target.group(e)?);
    let tb = target.basis(e)?;
    let dim = gt.rank + gt.torsion.len();
    let reps = source.representatives(d)?;
    let cols: Vec<Vec<i64>> = reps
        .par_iter()
        .map(|z| {
            let mut fz = Chain::zero();
            for (g, &c) in z.iter() {
                fz.add_scaled(&tc.normalize_chain(&f(g)?), &c);
            }
            if fz.is_zero() {
                return Ok(vec![0; dim]);
            }
            target.class_in(&tb, &fz, e)
        })
        .collect::<Result<_>>()?;
    let matrix: Vec<Vec<i64>> = (0..dim).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    let iso = gs == gt && is_surjective(&matrix, &gt, cols.len());
    Ok(InducedMap { source: gs, target: gt, matrix, iso })
}

/// One stage of a stabilization run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub stage: usize,
    pub generators: usize,
    pub group: HomologyGroup,
    /// Rank of the image of the previous stage under inclusion (at least 1
    /// for a nonzero map on torsion).
    pub image_rank: Option<usize>,
    /// Whether that inclusion is an isomorphism.
    pub iso: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stabilization {
    /// The limit group: the stable group after consecutive isomorphisms, or
    /// zero after consecutive zero maps.
    pub group: HomologyGroup,
    pub stage: usize,
    pub stabilized: bool,
    pub trend: Vec<Stage>,
}

/// Builds `family(0), family(1), ...` and compares consecutive stages through
/// the inclusion on `H_d`. Stops once `window` consecutive inclusions are all
/// isomorphisms or all zero, or when the stage limit or time budget is hit.
pub fn stabilize<F>(family: F, d: i64, window: usize, max_stages: usize, budget: Duration) -> Result<Stabilization>
where
    F: Fn(usize) -> ComplexSpec,
{
    Ok(stabilize_degrees(family, &[d], window, max_stages, budget)?.remove(0))
}

struct Tracker {
    trend: Vec<Stage>,
    isos: usize,
    zeros: usize,
    done: Option<Stabilization>,
}

/// [`stabilize`] for several degrees over the same truncations.
pub fn stabilize_degrees<F>(
    family: F,
    degrees: &[i64],
    window: usize,
    max_stages: usize,
    budget: Duration,
) -> Result<Vec<Stabilization>>
where
    F: Fn(usize) -> ComplexSpec,
{
    let start = Instant::now();
    let mut tr: Vec<Tracker> =
        degrees.iter().map(|_| Tracker { trend: Vec::new(), isos: 0, zeros: 0, done: None }).collect();
    let mut prev: Option<(GradedComplex, Reduction)> = None;
    for k in 0..max_stages {
        if start.elapsed() > budget || tr.iter().all(|t| t.done.is_some()) {
            break;
        }
        let c = GradedComplex::build(&family(k))?;
        let h = Homology::new(&c)?;
        let (old_c, old_red) = match prev.take() {
            Some((pc, red)) => (Some(pc), Some(red)),
            None => (None, None),
        };
        let hp = match (&old_c, old_red) {
            (Some(pc), Some(red)) => Some(Homology { complex: pc, red }),
            _ => None,
        };
        for (t, &d) in tr.iter_mut().zip(degrees) {
            if t.done.is_some() {
                continue;
            }
            let group = h.group(d)?;
            let (image_rank, iso) = match &hp {
                None => (None, None),
                Some(hp) => {
                    let incl = |g: &Generator| Ok(Chain::single(g.clone(), 1));
                    let m = induced_map(&incl, hp, &h, d, d)?;
                    let image = if m.is_zero() { 0 } else { m.free_rank().max(1) };
                    (Some(image), Some(m.iso))
                }
            };
            t.isos = if iso == Some(true) { t.isos + 1 } else { 0 };
            t.zeros = if image_rank == Some(0) { t.zeros + 1 } else { 0 };
            t.trend.push(Stage { stage: k, generators: c.total_rank(), group: group.clone(), image_rank, iso });
            if t.isos >= window || t.zeros >= window {
                let group = if t.isos >= window { group } else { HomologyGroup::default() };
                t.done = Some(Stabilization { group, stage: k, stabilized: true, trend: std::mem::take(&mut t.trend) });
            }
        }
        drop(hp);
        let red = h.red;
        prev = Some((c, red));
    }
    Ok(tr
        .into_iter()
        .map(|t| {
            t.done.unwrap_or_else(|| {
                let last = t.trend.last().cloned();
                Stabilization {
                    group: last.as_ref().map(|s| s.group.clone()).unwrap_or_default(),
                    stage: last.map_or(0, |s| s.stage),
                    stabilized: false,
                    trend: t.trend,
                }
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::v;
    use crate::path::n_convex;

    #[test]
    fn unit_square_homology() {
        let sq = n_convex(&[v(0, 0), v(1, 0), v(1, 1), v(0, 1)], 1).unwrap();
        let c = GradedComplex::build(&ComplexSpec::Below { path: sq }).unwrap();
        let h = Homology::new(&c).unwrap();
        let ranks: Vec<usize> = (0..=7).map(|d| h.group(d).unwrap().rank).collect();
        assert_eq!(ranks, vec![4, 1, 1, 1, 1, 1, 1, 0]);
        for d in 0..=6 {
            assert!(h.group(d).unwrap().is_free());
            for z in h.representatives(d).unwrap() {
                assert!(is_cycle(&z, &c).unwrap());
            }
        }
        let id = |g: &Generator| Ok(Chain::single(g.clone(), 1));
        let m = induced_map(&id, &h, &h, 0, 0).unwrap();
        assert!(m.iso);
        let eye: Vec<Vec<i64>> = (0..4).map(|i| (0..4).map(|j| (i == j) as i64).collect()).collect();
        assert_eq!(m.matrix, eye);
    }
}
