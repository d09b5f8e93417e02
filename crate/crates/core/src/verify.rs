//! Named verification suites.
//!
//! Every check is a deterministic function of the seed (and, for the
//! stabilization checks, the time budget). Checks run in parallel and the
//! report lists them sorted by id.

use std::collections::BTreeMap;
use std::time::Duration;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::axioms::{check_generator, Axiom};
use crate::chain::Chain;
use crate::complex::{convex_polygons, ComplexSpec, GradedComplex};
use crate::cycles::{e_cycle, e_gen, h_cycle, p_gen, q_cycle, z_cycle};
use crate::differential::{
    apply, delta_prime, delta_twisted, delta_twisted_chain, differential, differential_chain, k_homotopy, u_map,
};
use crate::error::{Error, Result};
use crate::flatten::Flattening;
use crate::generator::Generator;
use crate::homology::{
    check_chain_map, induced_map, is_boundary, is_cycle, stabilize_degrees, Homology, HomologyGroup,
};
use crate::lattice::{cross, v, Direction, ExtendedAngle, GenericAngle, LatticeVector};
use crate::path::{n_convex, AdmissiblePath};
use crate::sample::{self, SampleRng};
use crate::xaxis::{splice, x_axis_generators};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Flagged,
}

/// Result of one check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub status: Status,
    pub data: Value,
}

impl Outcome {
    fn new(ok: bool, data: Value) -> Outcome {
        Outcome { status: if ok { Status::Pass } else { Status::Fail }, data }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub description: String,
    pub status: Status,
    pub data: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    pub failed: usize,
    pub flagged: usize,
    pub exit_status: i32,
}

#[derive(Clone, Copy, Debug)]
pub struct Config {
    pub seed: u64,
    pub budget: Duration,
    /// Treat flagged checks as failures.
    pub strict: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config { seed: 0, budget: Duration::from_secs(300), strict: false }
    }
}

pub const SUITES: [&str; 11] = [
    "delta-squared",
    "axioms",
    "rounding-commute",
    "u-chainmap",
    "homotopy",
    "cycles",
    "theorem-5",
    "flattening",
    "splicing",
    "vanishing",
    "hbar",
];

type CheckFn = fn(&Config) -> Result<Outcome>;

fn checks(suite: &str) -> Option<Vec<(&'static str, &'static str, CheckFn)>> {
    let list: Vec<(&'static str, &'static str, CheckFn)> = match suite {
        "delta-squared" => vec![
            ("below", "delta^2 = 0 on every generator below 100 random paths", |c| delta_squared_below(c.seed, 100)),
            ("bar", "delta^2 = 0 on every generator of the bar truncation D = 3", |_| delta_squared_bar(3)),
            ("degree", "nonzero coefficients have relative index 1; single roundings obey the Pick rule", |c| {
                degree_rule(c.seed, 100)
            }),
            ("twisted", "delta' delta + delta delta' = 0, delta'^2 = 0, twisted delta^2 = 0", |c| {
                twisted_identities(c.seed, 200)
            }),
        ],
        "axioms" => vec![("all", "axioms on every nonzero coefficient below 50 random paths", |c| axioms(c.seed, 50))],
        "rounding-commute" => {
            vec![("pairs", "roundings at two corners commute on 200 random paths", |c| rounding_commute(c.seed, 200))]
        }
        "u-chainmap" => vec![("u", "U drops index by 2, commutes with delta and translations, maps E and H", |c| {
            u_properties(c.seed, 200)
        })],
        "homotopy" => vec![("k", "delta K + K delta = U1 - U2", |c| homotopy(c.seed, 200))],
        "cycles" => vec![
            ("identities", "E, H, Z, q are cycles; delta e = p - p; Z antisymmetry", |c| cycle_identities(c.seed, 100)),
            ("triangles", "Z(a,b) + Z(b,c) + Z(c,a) is a boundary for simple triangles", |c| {
                triangle_relation(c.seed, 12)
            }),
            ("boundaries", "p(u) - p(v) is a boundary and Z_1(a,b) is not", |c| point_boundaries(c.seed, 10)),
        ],
        "theorem-5" => vec![
            ("open-distinct", "convex open paths with distinct endpoints: free rank 2 on E and H", |c| {
                open_distinct_homology(c.seed, 20)
            }),
            ("open-equal", "convex open paths with equal endpoints: free rank 3", |c| open_equal_homology(c.seed, 10)),
            ("closed", "closed rotation-1 paths with k points: H_0 = Z^k, H_i = Z up to 2(k-1)", |_| {
                closed_homology(6)
            }),
        ],
        "flattening" => {
            vec![("iso", "flattening is a chain map and an isomorphism in every (i, j)", |_| flattening(5))]
        }
        "splicing" => vec![
            ("chain", "delta S = S delta and S U = U S on x-axis generators", |_| splice_chain_level(3)),
            ("pattern", "stabilized x-axis ranks follow the (2k, 2k+1; 2k-2n+2) pattern", |c| xaxis_pattern(c.budget)),
            ("iso", "S induces isomorphisms HX(1) -> HX(2) with j shifted by 2", |_| splice_iso(6)),
        ],
        "vanishing" => {
            vec![("periodic", "growing periodic windows: inclusions vanish in degrees 0..1", |c| vanishing(c.budget))]
        }
        "hbar" => {
            vec![("bar", "bar truncations stabilize to Z^3 and U is an isomorphism H2 -> H0", |c| hbar(c.budget))]
        }
        _ => return None,
    };
    Some(list)
}

/// Runs one suite, or all of them for `"all"`.
pub fn run_suite(suite: &str, cfg: &Config) -> Result<SuiteReport> {
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let mut jobs = Vec::new();
    for name in names {
        let list = checks(name).ok_or_else(|| Error::Domain(format!("unknown suite {name}")))?;
        for (id, desc, f) in list {
            jobs.push((format!("{name}/{id}"), desc, f));
        }
    }
    let mut records: Vec<CheckRecord> = jobs
        .into_par_iter()
        .map(|(id, desc, f)| {
            let out =
                f(cfg).unwrap_or_else(|e| Outcome { status: Status::Fail, data: json!({ "error": e.to_string() }) });
            CheckRecord { id, description: desc.to_string(), status: out.status, data: out.data }
        })
        .collect();
    records.sort_by(|a, b| a.id.cmp(&b.id));
    let failed = records.iter().filter(|r| r.status == Status::Fail).count();
    let flagged = records.iter().filter(|r| r.status == Status::Flagged).count();
    let bad = failed + if cfg.strict { flagged } else { 0 };
    Ok(SuiteReport {
        suite: suite.to_string(),
        seed: cfg.seed,
        checks: records,
        failed,
        flagged,
        exit_status: i32::from(bad > 0),
    })
}

// ---- samples ----

const LABEL_BUDGET: usize = 1 << 13;

/// Every labeling of every path below `p`.
pub fn below_generators(p: &AdmissiblePath) -> Result<Vec<Generator>> {
    let mut out = Vec::new();
    for q in p.enumerate_below()? {
        labelings(&q, &mut out)?;
    }
    Ok(out)
}

fn labelings(q: &AdmissiblePath, out: &mut Vec<Generator>) -> Result<()> {
    if q.num_edges() > 24 {
        return Err(Error::Unsupported("too many edges to label".into()));
    }
    for h in 0..1u64 << q.num_edges() {
        out.push(Generator::new(q.clone(), h)?);
    }
    Ok(())
}

fn labeling_count(p: &AdmissiblePath) -> Result<usize> {
    Ok(p.enumerate_below()?.iter().map(|q| 1usize << q.num_edges().min(40)).sum())
}

/// Random closed (rotation at most 3) and open paths with at most 10
/// enclosed lattice points, keeping those whose complexes stay small.
pub fn sample_paths(seed: u64, count: usize, budget: usize) -> Result<Vec<AdmissiblePath>> {
    let mut rng = sample::rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let p = match out.len() % 3 {
            0 | 1 => sample::closed_path(&mut rng, 3, 10, 3)?,
            _ if rng.gen_bool(0.5) => sample::open_distinct(&mut rng, 3, 10)?,
            _ => sample::open_equal(&mut rng, 3, 10)?,
        };
        if labeling_count(&p)? <= budget {
            out.push(p);
        }
    }
    Ok(out)
}

fn sample_generators(seed: u64, count: usize) -> Result<(Vec<AdmissiblePath>, Vec<Generator>)> {
    let paths = sample_paths(seed, count, LABEL_BUDGET)?;
    let mut gens: Vec<Generator> = Vec::new();
    for p in &paths {
        gens.extend(below_generators(p)?);
    }
    gens.sort();
    gens.dedup();
    Ok((paths, gens))
}

fn sample_summary(paths: &[AdmissiblePath]) -> Value {
    let closed = paths.iter().filter(|p| !p.kind().is_open()).count();
    json!({
        "paths": paths.len(),
        "closed": closed,
        "open": paths.len() - closed,
        "max_rotation": paths.iter().filter_map(|p| p.rotation()).max(),
        "max_points": paths.iter().map(|p| p.hull_lattice_points().len()).max(),
    })
}

fn count_failures<T: Sync, F>(items: &[T], f: F) -> Result<(usize, Vec<String>)>
where
    F: Fn(&T) -> Result<Option<String>> + Sync,
{
    let bad: Vec<String> = items.par_iter().map(&f).collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
    let n = bad.len();
    Ok((n, bad.into_iter().take(5).collect()))
}

fn merge(a: Value, b: Value) -> Value {
    let (Value::Object(mut a), Value::Object(b)) = (a, b) else { return Value::Null };
    a.extend(b);
    Value::Object(a)
}

// ---- delta-squared ----

pub fn delta_squared_below(seed: u64, count: usize) -> Result<Outcome> {
    let (paths, gens) = sample_generators(seed, count)?;
    let (bad, ex) = count_failures(&gens, |g| {
        let dd = differential_chain(&differential(g)?)?;
        Ok((!dd.is_zero()).then(|| g.to_string()))
    })?;
    Ok(Outcome::new(
        bad == 0,
        merge(sample_summary(&paths), json!({ "generators": gens.len(), "failures": bad, "examples": ex })),
    ))
}

pub fn delta_squared_bar(d: i64) -> Result<Outcome> {
    let mut gens = Vec::new();
    for p in convex_polygons(d)? {
        labelings(&p, &mut gens)?;
    }
    let (bad, ex) = count_failures(&gens, |g| {
        let dd = differential_chain(&differential(g)?)?;
        Ok((!dd.is_zero()).then(|| g.to_string()))
    })?;
    Ok(Outcome::new(bad == 0, json!({ "diameter": d, "generators": gens.len(), "failures": bad, "examples": ex })))
}

pub fn degree_rule(seed: u64, count: usize) -> Result<Outcome> {
    let (paths, gens) = sample_generators(seed, count)?;
    let terms = std::sync::atomic::AtomicUsize::new(0);
    let pairs = std::sync::atomic::AtomicUsize::new(0);
    let (bad, ex) = count_failures(&gens, |g| {
        for (b, _) in differential(g)?.iter() {
            terms.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            if g.relative_index(b)? != 1 {
                return Ok(Some(format!("{g} -> {b}")));
            }
        }
        for c in g.path().corners().iter().filter(|c| c.roundable()) {
            let q = g.path().round_corner(c.index)?;
            let ne = q.num_edges();
            let mut masks: Vec<u64> = vec![0, (1u64 << ne) - 1];
            masks.extend((0..ne).map(|i| 1u64 << i));
            for m in masks {
                let b = Generator::new(q.clone(), m)?;
                pairs.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if g.relative_index(&b)? != 2 - g.num_h() + b.num_h() {
                    return Ok(Some(format!("pick rule {g} -> {b}")));
                }
            }
        }
        Ok(None)
    })?;
    Ok(Outcome::new(
        bad == 0,
        merge(
            sample_summary(&paths),
            json!({
                "generators": gens.len(),
                "terms": terms.into_inner(),
                "rounding_pairs": pairs.into_inner(),
                "failures": bad,
                "examples": ex,
            }),
        ),
    ))
}

fn mixed(seed: u64, count: usize) -> Result<Vec<(Generator, GenericAngle, GenericAngle)>> {
    let mut rng = sample::rng(seed);
    (0..count)
        .map(|_| {
            let g = sample::mixed_generator(&mut rng)?;
            let n = g.path().rotation().unwrap_or(1);
            Ok((g, sample::random_cut(&mut rng, n), sample::random_cut(&mut rng, n)))
        })
        .collect()
}

pub fn twisted_identities(seed: u64, count: usize) -> Result<Outcome> {
    let gens = mixed(seed, count)?;
    let (bad, ex) = count_failures(&gens, |(g, _, _)| {
        let mut anti = apply(&differential(g)?, |x| Ok(delta_prime(x)))?;
        anti.add_chain(&differential_chain(&delta_prime(g))?);
        let pp = apply(&delta_prime(g), |x| Ok(delta_prime(x)))?;
        let tt = delta_twisted_chain(&delta_twisted(g)?)?;
        Ok((!anti.is_zero() || !pp.is_zero() || !tt.is_zero()).then(|| g.to_string()))
    })?;
    Ok(Outcome::new(bad == 0, json!({ "samples": gens.len(), "failures": bad, "examples": ex })))
}

// ---- axioms ----

type Tally = BTreeMap<Axiom, usize>;

pub fn axioms(seed: u64, count: usize) -> Result<Outcome> {
    let mut rng = sample::rng(seed);
    let mut paths = Vec::new();
    while paths.len() < count {
        let p = if paths.len() % 3 == 2 {
            sample::open_distinct(&mut rng, 3, 6)?
        } else {
            sample::closed_path(&mut rng, 3, 6, 2)?
        };
        if labeling_count(&p)? <= 1 << 12 {
            paths.push(p);
        }
    }
    let mut gens = Vec::new();
    for p in &paths {
        gens.extend(below_generators(p)?);
    }
    gens.sort();
    gens.dedup();
    let per: Vec<(Tally, Tally, Vec<String>)> = gens
        .par_iter()
        .map(|g| {
            let mut checked = BTreeMap::new();
            let mut failed = BTreeMap::new();
            let mut ex = Vec::new();
            for (b, o) in check_generator(g)? {
                for a in o.checked {
                    *checked.entry(a).or_insert(0) += 1;
                }
                for a in &o.failed {
                    *failed.entry(*a).or_insert(0) += 1;
                }
                if !o.failed.is_empty() && ex.len() < 2 {
                    ex.push(format!("{g} -> {b}: {:?}", o.failed));
                }
            }
            Ok((checked, failed, ex))
        })
        .collect::<Result<_>>()?;
    let mut checked: BTreeMap<Axiom, usize> = BTreeMap::new();
    let mut failed: BTreeMap<Axiom, usize> = BTreeMap::new();
    let mut ex = Vec::new();
    for (c, f, e) in per {
        for (a, k) in c {
            *checked.entry(a).or_insert(0) += k;
        }
        for (a, k) in f {
            *failed.entry(a).or_insert(0) += k;
        }
        ex.extend(e);
    }
    ex.truncate(5);
    let all_seen = [
        Axiom::Nesting,
        Axiom::LabelMatching,
        Axiom::Connectedness,
        Axiom::NoDoubleRounding,
        Axiom::Locality,
        Axiom::SimpleRounding,
        Axiom::DegenerateRounding,
    ]
    .iter()
    .all(|a| checked.get(a).copied().unwrap_or(0) > 0);
    let show = |m: &BTreeMap<Axiom, usize>| m.iter().map(|(a, k)| (a.to_string(), *k)).collect::<BTreeMap<_, _>>();
    Ok(Outcome::new(
        failed.is_empty() && all_seen,
        json!({
            "paths": paths.len(),
            "generators": gens.len(),
            "checked": show(&checked),
            "failed": show(&failed),
            "examples": ex,
        }),
    ))
}

// ---- rounding-commute ----

fn interior_cut(p: &AdmissiblePath, i: usize) -> Result<Option<GenericAngle>> {
    Ok(p.corner(i)?.prev.map(|a| a.after()))
}

pub fn rounding_commute(seed: u64, count: usize) -> Result<Outcome> {
    let mut rng = sample::rng(seed);
    let mut paths = Vec::new();
    for k in 0..count {
        paths.push(match k % 4 {
            0 | 1 => sample::closed_path(&mut rng, 4, 10, 3)?,
            2 => sample::open_distinct(&mut rng, 4, 10)?,
            _ => {
                let n = rng.gen_range(1..=2);
                sample::periodic_path(&mut rng, n)?
            }
        });
    }
    let counts: Vec<(usize, Option<String>)> = paths
        .par_iter()
        .map(|p| {
            let mut pairs = 0;
            let cs = p.corners();
            for a in cs.iter().filter(|c| c.roundable()) {
                let pa = p.round_corner(a.index)?;
                for b in cs.iter().filter(|b| b.index != a.index) {
                    let Some(cut_b) = interior_cut(p, b.index)? else { continue };
                    let Some(b2) = pa.corner_containing(cut_b) else { continue };
                    if !pa.corner(b2)?.roundable() {
                        continue;
                    }
                    pairs += 1;
                    let ab = pa.round_corner(b2)?;
                    let cut_a = interior_cut(p, a.index)?.expect("roundable corner has a previous edge");
                    let ok = b.roundable() && {
                        let pb = p.round_corner(b.index)?;
                        match pb.corner_containing(cut_a) {
                            Some(a2) if pb.corner(a2)?.roundable() => pb.round_corner(a2)? == ab,
                            _ => false,
                        }
                    };
                    if !ok {
                        return Ok((pairs, Some(format!("{p} corners {} {}", a.index, b.index))));
                    }
                }
            }
            Ok((pairs, None))
        })
        .collect::<Result<_>>()?;
    let pairs: usize = counts.iter().map(|c| c.0).sum();
    let ex: Vec<String> = counts.into_iter().filter_map(|c| c.1).collect();
    Ok(Outcome::new(
        ex.is_empty() && pairs > 0,
        json!({ "paths": paths.len(), "pairs": pairs, "failures": ex.len(), "examples": ex.iter().take(5).collect::<Vec<_>>() }),
    ))
}

// ---- U and K ----

fn translate_chain(x: &Chain, w: LatticeVector) -> Chain {
    x.map(|g| Chain::single(g.translate(w), 1))
}

pub fn u_properties(seed: u64, count: usize) -> Result<Outcome> {
    let gens = mixed(seed, count)?;
    let applicable = std::sync::atomic::AtomicUsize::new(0);
    let (bad, ex) = count_failures(&gens, |(g, cut, _)| {
        let ug = u_map(g, *cut)?;
        for (b, _) in ug.iter() {
            if g.relative_index(b)? != 2 {
                return Ok(Some(format!("index {g} -> {b}")));
            }
        }
        let du = differential_chain(&ug)?;
        let ud = apply(&differential(g)?, |x| u_map(x, *cut))?;
        if du != ud {
            return Ok(Some(format!("chain map {g} at {cut}")));
        }
        let w = v(2, -1);
        if u_map(&g.translate(w), *cut)? != translate_chain(&ug, w) {
            return Ok(Some(format!("translation {g}")));
        }
        let p = g.path();
        if let Some(c) = p.corner_containing(*cut) {
            if p.corner(c)?.roundable() {
                applicable.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                let q = p.round_corner(c)?;
                let ue = apply(&e_cycle(p), |x| u_map(x, *cut))?;
                let uh = apply(&h_cycle(p), |x| u_map(x, *cut))?;
                if ue != e_cycle(&q) || uh != h_cycle(&q) {
                    return Ok(Some(format!("E/H {p} at {cut}")));
                }
            }
        }
        Ok(None)
    })?;
    Ok(Outcome::new(
        bad == 0,
        json!({ "samples": gens.len(), "eh_applicable": applicable.into_inner(), "failures": bad, "examples": ex }),
    ))
}

pub fn homotopy(seed: u64, count: usize) -> Result<Outcome> {
    let gens = mixed(seed, count)?;
    let (bad, ex) = count_failures(&gens, |(g, c1, c2)| {
        let mut lhs = differential_chain(&k_homotopy(g, *c1, *c2)?)?;
        lhs.add_chain(&apply(&differential(g)?, |x| k_homotopy(x, *c1, *c2))?);
        let rhs = u_map(g, *c1)?.sub(&u_map(g, *c2)?);
        Ok((lhs != rhs).then(|| format!("{g} cuts {c1} {c2}")))
    })?;
    Ok(Outcome::new(bad == 0, json!({ "samples": gens.len(), "failures": bad, "examples": ex })))
}

// ---- explicit cycles ----

fn random_point(rng: &mut SampleRng, r: i64) -> LatticeVector {
    v(rng.gen_range(-r..=r), rng.gen_range(-r..=r))
}

pub fn cycle_identities(seed: u64, count: usize) -> Result<Outcome> {
    let mut rng = sample::rng(seed);
    let mut bad = Vec::new();
    let mut checked = 0;
    for k in 0..count {
        let p = match k % 3 {
            0 => sample::closed_path(&mut rng, 4, 10, 3)?,
            1 => sample::open_distinct(&mut rng, 4, 10)?,
            _ => {
                let n = rng.gen_range(1..=2);
                sample::periodic_path(&mut rng, n)?
            }
        };
        if !differential_chain(&e_cycle(&p))?.is_zero() || !differential_chain(&h_cycle(&p))?.is_zero() {
            bad.push(format!("E/H {p}"));
        }
        let n = rng.gen_range(1..=3);
        let a = random_point(&mut rng, 3);
        let b = random_point(&mut rng, 3);
        let z = z_cycle(n, a, b)?;
        let mut anti = z.clone();
        anti.add_chain(&z_cycle(n, b, a)?);
        if !differential_chain(&z)?.is_zero() || !anti.is_zero() {
            bad.push(format!("Z_{n}({a}, {b})"));
        }
        let d = sample::random_direction(&mut rng, 3);
        let theta = ExtendedAngle::new(rng.gen_range(0..n), d);
        let b = a + d.vector();
        if !differential_chain(&q_cycle(a, b, n)?)?.is_zero() {
            bad.push(format!("q({a}, {b})"));
        }
        let de = differential_chain(&e_gen(a, theta, n)?)?;
        if de != p_gen(b, theta.add_pi(), n)?.sub(&p_gen(a, theta, n)?) {
            bad.push(format!("e({a}, {theta})"));
        }
        checked += 1;
    }
    Ok(Outcome::new(
        bad.is_empty(),
        json!({ "samples": checked, "failures": bad.len(), "examples": bad.iter().take(5).collect::<Vec<_>>() }),
    ))
}

/// A random counterclockwise simple triangle near the origin.
pub fn simple_triangle(rng: &mut SampleRng) -> [LatticeVector; 3] {
    loop {
        let a = random_point(rng, 2);
        let u = random_point(rng, 2);
        let w = random_point(rng, 2);
        if cross(u, w) == 1 {
            return [a, a + u, a + w];
        }
    }
}

pub fn triangle_relation(seed: u64, count: usize) -> Result<Outcome> {
    let mut rng = sample::rng(seed);
    let tris: Vec<(i64, [LatticeVector; 3])> =
        (0..count).map(|k| (1 + (k % 2) as i64, simple_triangle(&mut rng))).collect();
    let (bad, ex) = count_failures(&tris, |&(n, [a, b, c])| {
        let lam = n_convex(&[a, b, c], n)?;
        let cx = GradedComplex::build(&ComplexSpec::Below { path: lam })?;
        let mut x = z_cycle(n, a, b)?;
        x.add_chain(&z_cycle(n, b, c)?);
        x.add_chain(&z_cycle(n, c, a)?);
        if !is_cycle(&x, &cx)? {
            return Ok(Some(format!("not a cycle n={n} {a} {b} {c}")));
        }
        let ok = match is_boundary(&x, &cx)?.witness() {
            Some(y) => cx.boundary_chain(y)? == x,
            None => false,
        };
        Ok((!ok).then(|| format!("n={n} {a} {b} {c}")))
    })?;
    Ok(Outcome::new(bad == 0, json!({ "triangles": tris.len(), "failures": bad, "examples": ex })))
}

pub fn point_boundaries(seed: u64, count: usize) -> Result<Outcome> {
    let mut rng = sample::rng(seed);
    let mut polys = Vec::new();
    while polys.len() < count {
        let poly = sample::convex_polygon(&mut rng, 3, 6);
        if poly.len() >= 3 {
            polys.push(poly);
        }
    }
    let (bad, ex) = count_failures(&polys, |poly| {
        let lam = n_convex(poly, 1)?;
        let pts = lam.hull_lattice_points();
        let cx = GradedComplex::build(&ComplexSpec::Below { path: lam })?;
        let p = |u: LatticeVector| p_gen(u, ExtendedAngle::new(0, Direction::EAST), 1);
        let (u, w) = (pts[0], pts[pts.len() - 1]);
        let x = p(u)?.sub(&p(w)?);
        let ok_points = matches!(is_boundary(&x, &cx)?.witness(), Some(y) if cx.boundary_chain(y)? == x);
        let (a, b) = (poly[0], poly[1]);
        let step = {
            let (d, _) = crate::lattice::primitive_of(b - a)?;
            a + d.vector()
        };
        let z = z_cycle(1, a, step)?;
        let ok_z = is_boundary(&z, &cx)?.witness().is_none();
        Ok((!(ok_points && ok_z)).then(|| format!("{poly:?}")))
    })?;
    Ok(Outcome::new(bad == 0, json!({ "polygons": polys.len(), "failures": bad, "examples": ex })))
}

// ---- finite homology ----

fn all_groups(h: &Homology) -> Result<BTreeMap<i64, HomologyGroup>> {
    h.complex().degrees().into_iter().map(|d| Ok((d, h.group(d)?))).collect()
}

fn show_groups(g: &BTreeMap<i64, HomologyGroup>) -> Value {
    json!(g
        .iter()
        .filter(|(_, x)| !x.is_zero())
        .map(|(d, x)| (d.to_string(), x.to_string()))
        .collect::<BTreeMap<_, _>>())
}

/// Whether `x` represents a generator of the rank-one free group `H_d`.
fn generates(h: &Homology, x: &Chain) -> Result<bool> {
    let cx = h.complex();
    let Some(d) = cx.chain_degree(x)? else { return Ok(false) };
    let g = h.group(d)?;
    Ok(g.rank == 1 && g.torsion.is_empty() && h.class_of(x, d)?.iter().map(|c| c.abs()).collect::<Vec<_>>() == vec![1])
}

pub fn open_distinct_homology(seed: u64, count: usize) -> Result<Outcome> {
    let mut rng = sample::rng(seed);
    let paths: Vec<AdmissiblePath> =
        (0..count).map(|_| sample::open_distinct(&mut rng, 3, 8)).collect::<Result<_>>()?;
    let (bad, ex) = count_failures(&paths, |p| {
        let cx = GradedComplex::build(&ComplexSpec::Below { path: p.clone() })?;
        let h = Homology::new(&cx)?;
        let groups = all_groups(&h)?;
        let total: usize = groups.values().map(|g| g.rank).sum();
        let free = groups.values().all(|g| g.is_free());
        let e = e_cycle(p);
        let hh = h_cycle(p);
        let ok = total == 2
            && free
            && generates(&h, &e)?
            && generates(&h, &hh)?
            && is_boundary(&e, &cx)?.witness().is_none()
            && is_boundary(&hh, &cx)?.witness().is_none();
        Ok((!ok).then(|| format!("{p}: {}", show_groups(&groups))))
    })?;
    Ok(Outcome::new(bad == 0, json!({ "paths": paths.len(), "failures": bad, "examples": ex })))
}

pub fn open_equal_homology(seed: u64, count: usize) -> Result<Outcome> {
    let mut rng = sample::rng(seed);
    let paths: Vec<AdmissiblePath> = (0..count).map(|_| sample::open_equal(&mut rng, 3, 8)).collect::<Result<_>>()?;
    let (bad, ex) = count_failures(&paths, |p| {
        let cx = GradedComplex::build(&ComplexSpec::Below { path: p.clone() })?;
        let h = Homology::new(&cx)?;
        let groups = all_groups(&h)?;
        let total: usize = groups.values().map(|g| g.rank).sum();
        let ok = total == 3 && groups.values().all(|g| g.is_free());
        Ok((!ok).then(|| format!("{p}: {}", show_groups(&groups))))
    })?;
    Ok(Outcome::new(bad == 0, json!({ "paths": paths.len(), "failures": bad, "examples": ex })))
}

/// Convex polygons with exactly `k` lattice points, `k = 2..=6`.
pub fn polygon_with_points(k: usize) -> Option<Vec<LatticeVector>> {
    Some(match k {
        2 => vec![v(0, 0), v(1, 0)],
        3 => vec![v(0, 0), v(1, 0), v(0, 1)],
        4 => vec![v(0, 0), v(1, 0), v(1, 1), v(0, 1)],
        5 => vec![v(0, 0), v(2, 0), v(1, 1), v(0, 1)],
        6 => vec![v(0, 0), v(2, 0), v(0, 2)],
        _ => return None,
    })
}

/// Closed rotation-1 homology for `k = 2..=max_k` lattice points.
pub fn closed_homology(max_k: usize) -> Result<Outcome> {
    let ks: Vec<usize> = (2..=max_k).collect();
    let rows: Vec<(usize, bool, Value)> = ks
        .par_iter()
        .map(|&k| {
            let poly = polygon_with_points(k).ok_or_else(|| Error::Domain(format!("no polygon with {k} points")))?;
            let lam = n_convex(&poly, 1)?;
            let cx = GradedComplex::build(&ComplexSpec::Below { path: lam.clone() })?;
            let h = Homology::new(&cx)?;
            let groups = all_groups(&h)?;
            let top = 2 * (k as i64 - 1);
            let ranks_ok = groups.iter().all(|(&d, g)| {
                let want = if d == 0 {
                    k
                } else if (1..=top).contains(&d) {
                    1
                } else {
                    0
                };
                g.rank == want && g.torsion.is_empty()
            }) && (0..=top).all(|d| groups.contains_key(&d));
            let comp = GradedComplex::build(&ComplexSpec::BelowComponent { path: lam, j: -2 })?;
            let h0 = Homology::new(&comp)?.group(0)?;
            let ok = ranks_ok && h0.rank == k - 1 && h0.is_free();
            Ok((
                k,
                ok,
                json!({ "generators": cx.total_rank(), "groups": show_groups(&groups), "h0_j-2": h0.to_string() }),
            ))
        })
        .collect::<Result<_>>()?;
    let ok = rows.iter().all(|r| r.1);
    let data: BTreeMap<String, Value> = rows.into_iter().map(|(k, _, v)| (format!("k={k}"), v)).collect();
    Ok(Outcome::new(ok, json!(data)))
}

// ---- flattening ----

/// Polygons with at most `max_k` lattice points used by the flattening check.
fn flattening_polygons(max_k: usize) -> Vec<Vec<LatticeVector>> {
    let mut out: Vec<Vec<LatticeVector>> = (2..=max_k).filter_map(polygon_with_points).collect();
    out.push(vec![v(0, 0), v(2, 1), v(1, 2)]);
    out.push(vec![v(0, 0), v(2, 0), v(1, 1)]);
    out.retain(|p| crate::path::lattice_points_in_polygon(p).len() <= max_k);
    out
}

pub fn flattening(max_k: usize) -> Result<Outcome> {
    let cut = GenericAngle::new(0, Direction::new(1, 3)?);
    let mut cases = Vec::new();
    for n in 1..=2 {
        for poly in flattening_polygons(max_k) {
            cases.push((n, poly));
        }
    }
    let rows: Vec<(bool, Value)> = cases
        .par_iter()
        .map(|(n, poly)| {
            let lam = n_convex(poly, *n)?;
            let k = lam.hull_lattice_points().len() as i64;
            let lam0 = n_convex(&[v(0, 0), v(k - 1, 0)], *n)?;
            let f = Flattening::new(&lam0, &lam, cut)?;
            let fmap = |g: &Generator| f.apply(g);
            let src = GradedComplex::build(&ComplexSpec::Below { path: lam0.clone() })?;
            let tgt = GradedComplex::build(&ComplexSpec::Below { path: lam.clone() })?;
            check_chain_map(&fmap, &src, &tgt, &src.degrees())?;
            let js: std::collections::BTreeSet<i64> =
                src.degrees().iter().flat_map(|&d| src.basis(d).iter().map(move |g| d - g.num_h())).collect();
            let mut pieces = 0;
            let mut non_iso = Vec::new();
            for &j in &js {
                let a = GradedComplex::build(&ComplexSpec::BelowComponent { path: lam0.clone(), j })?;
                let b = GradedComplex::build(&ComplexSpec::BelowComponent { path: lam.clone(), j })?;
                let (ha, hb) = (Homology::new(&a)?, Homology::new(&b)?);
                let degs: std::collections::BTreeSet<i64> = a.degrees().into_iter().chain(b.degrees()).collect();
                for &d in &degs {
                    let m = induced_map(&fmap, &ha, &hb, d, d)?;
                    pieces += 1;
                    if !m.iso {
                        non_iso.push(format!("({d}, {j}): {} -> {}", m.source, m.target));
                    }
                }
            }
            Ok((
                non_iso.is_empty(),
                json!({ "n": n, "k": k, "polygon": format!("{poly:?}"), "pieces": pieces, "non_iso": non_iso }),
            ))
        })
        .collect::<Result<_>>()?;
    let ok = rows.iter().all(|r| r.0);
    Ok(Outcome::new(ok, json!(rows.into_iter().map(|r| r.1).collect::<Vec<_>>())))
}

// ---- splicing ----

/// Cut used for `U` on both sides of `S U = U S`.
pub fn splice_cut(n: i64) -> GenericAngle {
    GenericAngle::new(n - 1, Direction::SOUTH)
}

pub fn splice_chain_level(m: i64) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut ok = true;
    for n in 1..=2usize {
        let gens = x_axis_generators(n, m, 6)?;
        let cut = splice_cut(n as i64);
        let (bad, ex) = count_failures(&gens, |g| {
            let sd = apply(&differential(g)?, splice)?;
            let ds = differential_chain(&splice(g)?)?;
            let su = apply(&u_map(g, cut)?, splice)?;
            let us = apply(&splice(g)?, |x| u_map(x, cut))?;
            Ok((sd != ds || su != us).then(|| g.to_string()))
        })?;
        ok &= bad == 0;
        rows.push(json!({ "n": n, "generators": gens.len(), "failures": bad, "examples": ex }));
    }
    Ok(Outcome::new(ok, json!(rows)))
}

/// Expected rank of the stabilized x-axis group, or `None` where the
/// truncations never stabilize.
pub fn xaxis_expected(n: i64, i: i64, j: i64) -> Option<usize> {
    if (i, j) == (0, -2 * n) {
        return None;
    }
    let k = i.div_euclid(2);
    Some(usize::from(i >= 0 && j == 2 * k - 2 * n + 2))
}

pub fn xaxis_pattern(budget: Duration) -> Result<Outcome> {
    let mut cases = Vec::new();
    for n in 1..=2i64 {
        for j in -2 * n..=4 {
            cases.push((n, j));
        }
    }
    let degrees: Vec<i64> = (0..=4).collect();
    let rows: Vec<(usize, usize, Vec<Value>)> = cases
        .par_iter()
        .map(|&(n, j)| {
            let fam = |s: usize| ComplexSpec::Xaxis { n, m: 2 + 2 * s as i64, degrees: [0, 4], j: Some(j) };
            let st = stabilize_degrees(fam, &degrees, 2, 4, budget)?;
            let mut fails = 0;
            let mut flags = 0;
            let mut out = Vec::new();
            for (&i, s) in degrees.iter().zip(&st) {
                let Some(want) = xaxis_expected(n, i, j) else { continue };
                let status = if !s.stabilized {
                    flags += 1;
                    "flagged"
                } else if s.group.rank == want && s.group.torsion.is_empty() {
                    "pass"
                } else {
                    fails += 1;
                    "fail"
                };
                if status != "pass" || want == 1 {
                    out.push(json!({ "n": n, "i": i, "j": j, "group": s.group.to_string(), "m": 2 + 2 * s.stage, "status": status }));
                }
            }
            Ok((fails, flags, out))
        })
        .collect::<Result<_>>()?;
    let fails: usize = rows.iter().map(|r| r.0).sum();
    let flags: usize = rows.iter().map(|r| r.1).sum();
    let data: Vec<Value> = rows.into_iter().flat_map(|r| r.2).collect();
    let status = if fails > 0 {
        Status::Fail
    } else if flags > 0 {
        Status::Flagged
    } else {
        Status::Pass
    };
    Ok(Outcome { status, data: json!({ "failures": fails, "flagged": flags, "pieces": data }) })
}

pub fn splice_iso(m: i64) -> Result<Outcome> {
    let js: Vec<i64> = (-2..=4).collect();
    let rows: Vec<(usize, Vec<String>)> = js
        .par_iter()
        .map(|&j| {
            let a = GradedComplex::build(&ComplexSpec::Xaxis { n: 1, m, degrees: [0, 4], j: Some(j) })?;
            let b = GradedComplex::build(&ComplexSpec::Xaxis { n: 2, m: 2 * m + 1, degrees: [0, 4], j: Some(j - 2) })?;
            let (ha, hb) = (Homology::new(&a)?, Homology::new(&b)?);
            let mut count = 0;
            let mut bad = Vec::new();
            for i in 0..=4 {
                if (i, j) == (0, -2) {
                    continue;
                }
                let f = induced_map(&splice, &ha, &hb, i, i)?;
                count += 1;
                if !f.iso {
                    bad.push(format!("({i}, {j}): {} -> {}", f.source, f.target));
                }
            }
            Ok((count, bad))
        })
        .collect::<Result<_>>()?;
    let pieces: usize = rows.iter().map(|r| r.0).sum();
    let bad: Vec<String> = rows.into_iter().flat_map(|r| r.1).collect();
    Ok(Outcome::new(bad.is_empty(), json!({ "m": m, "pieces": pieces, "non_iso": bad })))
}

// ---- stabilization ----

pub const VANISHING_PERIODS: [(i64, i64); 3] = [(1, 0), (2, 0), (1, 1)];

pub fn periodic_stage(gamma: LatticeVector, stage: usize) -> ComplexSpec {
    let base = gamma.l1() + 2;
    ComplexSpec::Periodic { n: 1, gamma, heights: [-30, 30], length: base + 2 * stage as i64, degrees: [0, 1] }
}

pub fn vanishing(budget: Duration) -> Result<Outcome> {
    let rows: Vec<(Status, Value)> = VANISHING_PERIODS
        .par_iter()
        .map(|&(x, y)| {
            let gamma = v(x, y);
            let st = stabilize_degrees(|s| periodic_stage(gamma, s), &[0, 1], 2, 4, budget)?;
            // Classes of the first stage die in the second.
            let c0 = GradedComplex::build(&periodic_stage(gamma, 0))?;
            let c1 = GradedComplex::build(&periodic_stage(gamma, 1))?;
            let h0 = Homology::new(&c0)?;
            let mut killed = true;
            let mut reps = 0;
            for d in 0..=1 {
                for z in h0.representatives(d)? {
                    reps += 1;
                    let z1 = c1.normalize_chain(&z);
                    killed &= matches!(is_boundary(&z1, &c1)?.witness(), Some(w) if c1.boundary_chain(w)? == z1);
                }
            }
            let zero = st.iter().all(|s| s.stabilized && s.group.is_zero());
            let status = if !killed || st.iter().any(|s| s.stabilized && !s.group.is_zero()) {
                Status::Fail
            } else if zero {
                Status::Pass
            } else {
                Status::Flagged
            };
            let trend: Vec<Value> = st
                .iter()
                .zip([0, 1])
                .map(|(s, d)| {
                    json!({
                        "degree": d,
                        "stabilized": s.stabilized,
                        "limit": s.group.to_string(),
                        "stage": s.stage,
                        "ranks": s.trend.iter().map(|t| t.group.rank).collect::<Vec<_>>(),
                        "image_ranks": s.trend.iter().map(|t| t.image_rank).collect::<Vec<_>>(),
                    })
                })
                .collect();
            Ok((
                status,
                json!({ "gamma": [x, y], "first_stage_classes": reps, "killed_next_stage": killed, "degrees": trend }),
            ))
        })
        .collect::<Result<_>>()?;
    Ok(combine(rows))
}

fn combine(rows: Vec<(Status, Value)>) -> Outcome {
    let status = if rows.iter().any(|r| r.0 == Status::Fail) {
        Status::Fail
    } else if rows.iter().any(|r| r.0 == Status::Flagged) {
        Status::Flagged
    } else {
        Status::Pass
    };
    Outcome { status, data: json!(rows.into_iter().map(|r| r.1).collect::<Vec<_>>()) }
}

pub fn bar_stage(stage: usize) -> ComplexSpec {
    ComplexSpec::Bar { n: 1, diameter: stage as i64 + 1, degrees: [0, 3] }
}

pub fn hbar(budget: Duration) -> Result<Outcome> {
    let st = stabilize_degrees(bar_stage, &[0, 1, 2, 3], 2, 5, budget)?;
    let z3 = HomologyGroup { rank: 3, torsion: vec![] };
    let core_ok = st[..3].iter().all(|s| !s.stabilized || s.group == z3);
    let core_done = st[..3].iter().all(|s| s.stabilized);
    let stage = st[..3].iter().map(|s| s.stage).max().unwrap_or(0);
    let cx = GradedComplex::build(&bar_stage(stage))?;
    let h = Homology::new(&cx)?;
    let cut = GenericAngle::new(0, Direction::EAST);
    let u = |g: &Generator| u_map(g, cut);
    let u20 = induced_map(&u, &h, &h, 2, 0)?;
    let u31 = induced_map(&u, &h, &h, 3, 1)?;
    let status = if !core_ok || !u20.iso {
        Status::Fail
    } else if core_done {
        Status::Pass
    } else {
        Status::Flagged
    };
    let degrees: Vec<Value> = st
        .iter()
        .enumerate()
        .map(|(d, s)| {
            json!({
                "degree": d,
                "stabilized": s.stabilized,
                "limit": s.group.to_string(),
                "diameter": s.stage + 1,
                "generators": s.trend.iter().map(|t| t.generators).collect::<Vec<_>>(),
                "groups": s.trend.iter().map(|t| t.group.to_string()).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(Outcome {
        status,
        data: json!({ "degrees": degrees, "u_diameter": stage + 1, "u_h2_h0_iso": u20.iso, "u_h3_h1_iso": u31.iso }),
    })
}
