//! Seeded random paths and generators for the randomized suites.
//!
//! Polygons are convex hulls of random point sets in `[0,B]^2`, wrapped to
//! rotation number `n`. Open paths are arcs of such wrappings; general
//! closed paths come from random corner roundings.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::generator::Generator;
use crate::lattice::{convex_hull, v, Direction, ExtendedAngle, GenericAngle, LatticeVector};
use crate::path::{lattice_points_in_polygon, n_convex, AdmissiblePath, Edge, PathKind};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random convex lattice polygon vertices in `[0,b]^2` with at most `max_k` lattice points.
pub fn convex_polygon(rng: &mut SampleRng, b: i64, max_k: usize) -> Vec<LatticeVector> {
    loop {
        let count = rng.gen_range(1..=4);
        let pts: Vec<LatticeVector> = (0..count).map(|_| v(rng.gen_range(0..=b), rng.gen_range(0..=b))).collect();
        let hull = convex_hull(&pts);
        if lattice_points_in_polygon(&hull).len() <= max_k {
            return hull;
        }
    }
}

/// Random nonconstant convex polygon with between 2 and `max_k` lattice points.
pub fn nonconstant_polygon(rng: &mut SampleRng, b: i64, max_k: usize) -> Vec<LatticeVector> {
    loop {
        let p = convex_polygon(rng, b, max_k);
        if p.len() >= 2 {
            return p;
        }
    }
}

/// Applies up to `steps` random roundings.
pub fn random_roundings(rng: &mut SampleRng, p: &AdmissiblePath, steps: usize) -> Result<AdmissiblePath> {
    let mut cur = p.clone();
    for _ in 0..steps {
        let cs: Vec<usize> = cur.corners().iter().filter(|c| c.roundable()).map(|c| c.index).collect();
        let Some(&c) = cs.choose(rng) else { break };
        cur = cur.round_corner(c)?;
    }
    Ok(cur)
}

/// Random closed path: an n-convex path, possibly rounded a few times.
pub fn closed_path(rng: &mut SampleRng, b: i64, max_k: usize, max_n: i64) -> Result<AdmissiblePath> {
    let n = rng.gen_range(1..=max_n);
    let poly = convex_polygon(rng, b, max_k);
    let base = n_convex(&poly, n)?;
    let steps = rng.gen_range(0..=3);
    random_roundings(rng, &base, steps)
}

/// Random cut `Gen(lap, dir)` with `lap` in `0..n` and a small direction.
pub fn random_cut(rng: &mut SampleRng, n: i64) -> GenericAngle {
    GenericAngle::new(rng.gen_range(0..n), random_direction(rng, 2))
}

pub fn random_direction(rng: &mut SampleRng, r: i64) -> Direction {
    loop {
        if let Ok(d) = Direction::new(rng.gen_range(-r..=r), rng.gen_range(-r..=r)) {
            return d;
        }
    }
}

/// Arc of a closed path between two cuts, as an open path.
pub fn open_arc(base: &AdmissiblePath, lo: GenericAngle, hi: GenericAngle) -> Result<AdmissiblePath> {
    let n = base.rotation().unwrap_or(1);
    let mut edges = Vec::new();
    let mut shift = (lo.lap.div_euclid(n) - 1) * n;
    while shift <= hi.lap + n {
        for e in base.edges() {
            let x = e.angle.add_laps(shift);
            if lo.key() < x.key() && x.key() < hi.key() {
                edges.push(Edge::new(x, e.mult));
            }
        }
        shift += n;
    }
    AdmissiblePath::from_unrolled(PathKind::Open { lo, hi }, lo, base.value_at(lo), edges)
}

/// Random convex open path with distinct endpoints (less than a full turn).
pub fn open_distinct(rng: &mut SampleRng, b: i64, max_k: usize) -> Result<AdmissiblePath> {
    loop {
        let base = n_convex(&nonconstant_polygon(rng, b, max_k), 1)?;
        let lo = random_cut(rng, 1);
        let hi = GenericAngle::new(lo.lap, random_direction(rng, 2));
        let hi = if hi.key() <= lo.key() { hi.add_laps(1) } else { hi };
        let p = open_arc(&base, lo, hi)?;
        if p.anchor() != p.end_point() {
            return Ok(p);
        }
    }
}

/// Random nonconstant convex open path with equal endpoints (one full turn).
pub fn open_equal(rng: &mut SampleRng, b: i64, max_k: usize) -> Result<AdmissiblePath> {
    let base = n_convex(&nonconstant_polygon(rng, b, max_k), 1)?;
    let lo = random_cut(rng, 1);
    open_arc(&base, lo, lo.add_laps(1))
}

/// Random periodic path of rotation number `n`.
pub fn periodic_path(rng: &mut SampleRng, n: i64) -> Result<AdmissiblePath> {
    loop {
        let mut edges = Vec::new();
        for lap in 0..n {
            for _ in 0..rng.gen_range(1..=3) {
                let d = random_direction(rng, 2);
                let a = if d == Direction::EAST { ExtendedAngle::new(lap + 1, d) } else { ExtendedAngle::new(lap, d) };
                if !edges.iter().any(|e: &Edge| e.angle == a) {
                    edges.push(Edge::new(a, rng.gen_range(1..=2)));
                }
            }
        }
        let gamma = edges.iter().fold(LatticeVector::ZERO, |s, e| s + e.vector());
        if gamma.is_zero() {
            continue;
        }
        edges.sort();
        let anchor = v(rng.gen_range(-2..=2), rng.gen_range(-2..=2));
        return AdmissiblePath::from_sorted(PathKind::Periodic { n, gamma }, edges, anchor);
    }
}

/// Random labeling of a path.
pub fn random_generator(rng: &mut SampleRng, p: &AdmissiblePath) -> Generator {
    let n = p.num_edges();
    let mask = if n == 0 { 0 } else { rng.gen::<u64>() & (u64::MAX >> (64 - n)) };
    Generator { path: p.clone(), h: mask }
}

/// Mixed sample: closed, open and periodic generators.
pub fn mixed_generator(rng: &mut SampleRng) -> Result<Generator> {
    let p = match rng.gen_range(0..4) {
        0 | 1 => closed_path(rng, 4, 10, 3)?,
        2 => {
            if rng.gen_bool(0.5) {
                open_distinct(rng, 4, 10)?
            } else {
                open_equal(rng, 4, 10)?
            }
        }
        _ => {
            let n = rng.gen_range(1..=2);
            periodic_path(rng, n)?
        }
    };
    Ok(random_generator(rng, &p))
}
