//! Property checks of the axioms against nonzero differential coefficients.
//!
//! For a pair `(alpha, beta)` with `<d alpha, beta> != 0` the checks cover
//! index, nesting, label matching, connectedness of the difference set,
//! no double rounding, locality, and the unit coefficients of simple and
//! degenerate roundings. Closed and open paths are supported.

use std::fmt;

use serde::Serialize;

use crate::differential::differential;
use crate::error::{domain, Error, Result};
use crate::generator::{perm_sign, Generator};
use crate::lattice::{cross, ExtendedAngle, GenericAngle, LatticeVector};
use crate::path::{AdmissiblePath, PathKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    Index,
    Nesting,
    LabelMatching,
    Connectedness,
    NoDoubleRounding,
    Locality,
    SimpleRounding,
    DegenerateRounding,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Index => "index",
            Axiom::Nesting => "nesting",
            Axiom::LabelMatching => "label-matching",
            Axiom::Connectedness => "connectedness",
            Axiom::NoDoubleRounding => "no-double-rounding",
            Axiom::Locality => "locality",
            Axiom::SimpleRounding => "simple-rounding",
            Axiom::DegenerateRounding => "degenerate-rounding",
        };
        f.write_str(s)
    }
}

/// Outcome for one pair: the axioms that applied and those that failed.
#[derive(Clone, Debug, Default, Serialize)]
pub struct PairOutcome {
    pub checked: Vec<Axiom>,
    pub failed: Vec<Axiom>,
}

impl PairOutcome {
    fn record(&mut self, a: Axiom, ok: bool) {
        self.checked.push(a);
        if !ok {
            self.failed.push(a);
        }
    }
}

/// Merged edge angles of two paths with the values of both on every gap.
struct Layout {
    angles: Vec<ExtendedAngle>,
    cyclic: bool,
    /// Rotation number; zero for open paths.
    n: i64,
    /// Values on the gap after each angle.
    lam: Vec<LatticeVector>,
    mu: Vec<LatticeVector>,
    /// Values on the gap before the first angle.
    lam0: LatticeVector,
    mu0: LatticeVector,
}

impl Layout {
    fn new(a: &AdmissiblePath, b: &AdmissiblePath) -> Result<Layout> {
        let (cyclic, n) = match (a.kind(), b.kind()) {
            (PathKind::Closed { n }, PathKind::Closed { n: m }) if n == m => (true, n),
            (PathKind::Open { .. }, PathKind::Open { .. }) if a.same_type(b) => (false, 0),
            (PathKind::Periodic { .. }, _) | (_, PathKind::Periodic { .. }) => {
                return Err(Error::Unsupported("axiom checks on periodic paths".into()))
            }
            _ => return Err(Error::TypeMismatch),
        };
        let mut angles: Vec<ExtendedAngle> = a.edges().iter().chain(b.edges()).map(|e| e.angle).collect();
        angles.sort();
        angles.dedup();
        let lam: Vec<_> = angles.iter().map(|x| a.value_at(x.after())).collect();
        let mu: Vec<_> = angles.iter().map(|x| b.value_at(x.after())).collect();
        let (lam0, mu0) = if cyclic && !angles.is_empty() {
            (*lam.last().unwrap(), *mu.last().unwrap())
        } else {
            (a.anchor(), b.anchor())
        };
        Ok(Layout { angles, cyclic, n, lam, mu, lam0, mu0 })
    }

    fn before(&self, i: usize) -> (LatticeVector, LatticeVector) {
        if i == 0 {
            (self.lam0, self.mu0)
        } else {
            (self.lam[i - 1], self.mu[i - 1])
        }
    }

    fn after(&self, i: usize) -> (LatticeVector, LatticeVector) {
        (self.lam[i], self.mu[i])
    }

    /// Differing flags over the gaps: for open paths the gap before the
    /// first angle comes first, for closed paths gap `i` follows angle `i`.
    fn gaps(&self) -> Vec<bool> {
        let mut g: Vec<bool> = self.lam.iter().zip(&self.mu).map(|(p, q)| p != q).collect();
        if !self.cyclic {
            g.insert(0, self.lam0 != self.mu0);
        }
        g
    }

    fn in_d(&self, i: usize) -> bool {
        let (b, b2) = self.before(i);
        let (a, a2) = self.after(i);
        b != b2 || a != a2
    }

    fn agree(&self, i: usize) -> bool {
        let (p, q) = self.before(i);
        let (r, s) = self.after(i);
        p == q && r == s
    }

    fn partially_agree(&self, i: usize) -> bool {
        let (p, q) = self.before(i);
        cross(self.angles[i].dir.vector(), q - p) == 0
    }

    /// The difference set as a run of angle indices, in order, with lap
    /// offsets for cyclic wrap-around; `None` if empty or everything.
    fn run(&self) -> Option<Vec<(usize, i64)>> {
        let g = self.gaps();
        let k = self.angles.len();
        if g.iter().all(|&x| x) || !g.iter().any(|&x| x) {
            return None;
        }
        if self.cyclic {
            let n = self.n;
            let start = (0..k).find(|&i| g[i] && !g[(i + k - 1) % k])?;
            let mut out = vec![(start, 0)];
            let mut i = start;
            while g[i] {
                let j = (i + 1) % k;
                let lap = if j <= start { n } else { 0 };
                out.push((j, lap));
                i = j;
            }
            Some(out)
        } else {
            let j0 = g.iter().position(|&x| x)?;
            let j1 = g.iter().rposition(|&x| x)?;
            if j0 == 0 || j1 == k {
                return None;
            }
            Some((j0 - 1..=j1).map(|i| (i, 0)).collect())
        }
    }
}

fn connected(g: &[bool], cyclic: bool) -> bool {
    let k = g.len();
    let starts = if cyclic {
        (0..k).filter(|&i| g[i] && !g[(i + k - 1) % k]).count()
    } else {
        (0..k).filter(|&i| g[i] && (i == 0 || !g[i - 1])).count()
    };
    starts <= 1
}

/// Checks every applicable axiom for one nonzero coefficient `<d alpha, beta> = coeff`.
pub fn check_pair(alpha: &Generator, beta: &Generator, coeff: i64) -> Result<PairOutcome> {
    if coeff == 0 {
        return domain("axioms concern nonzero coefficients");
    }
    let mut out = PairOutcome::default();
    let (lam, mu) = (alpha.path(), beta.path());
    out.record(Axiom::Index, alpha.relative_index(beta)? == 1);
    out.record(Axiom::Nesting, mu.leq(lam)?);
    let lay = Layout::new(lam, mu)?;

    let mut labels_ok = true;
    for (i, &a) in lay.angles.iter().enumerate() {
        if let (Some(ia), Some(ib)) = (lam.find_edge(a), mu.find_edge(a)) {
            if lay.agree(i) {
                labels_ok &= alpha.is_h(ia) == beta.is_h(ib);
            } else if lay.partially_agree(i) && beta.is_h(ib) {
                labels_ok &= alpha.is_h(ia);
            }
        }
    }
    out.record(Axiom::LabelMatching, labels_ok);
    out.record(Axiom::Connectedness, connected(&lay.gaps(), lay.cyclic));
    let in_d = (0..lay.angles.len()).filter(|&i| lay.in_d(i) && lam.find_edge(lay.angles[i]).is_some()).count();
    out.record(Axiom::NoDoubleRounding, in_d < 3);

    if let Some(local) = localize(alpha, beta, &lay)? {
        let (a2, b2, s) = local;
        let c2 = differential(&a2)?.coeff(&b2);
        out.record(Axiom::Locality, s * coeff == c2);
    }

    if alpha.num_h() - beta.num_h() == 1 {
        for c in lam.corners().iter().filter(|c| c.roundable()) {
            let r = lam.round_detail(c.index)?;
            if &r.path != mu {
                continue;
            }
            let fresh: Vec<usize> = (0..r.path.num_edges()).filter(|j| !r.edge_map.contains(&Some(*j))).collect();
            if fresh.is_empty() {
                out.record(Axiom::DegenerateRounding, coeff.abs() == 1);
            } else if fresh.len() == 1 && r.path.edges()[fresh[0]].mult == 1 {
                out.record(Axiom::SimpleRounding, coeff.abs() == 1);
            }
        }
    }
    Ok(out)
}

/// Strips matching edges. Returns `(alpha', beta', s)` where `s` is the sign
/// turning the canonical coefficient into the one for the reordered pair.
fn localize(alpha: &Generator, beta: &Generator, lay: &Layout) -> Result<Option<(Generator, Generator, i64)>> {
    let (lam, mu) = (alpha.path(), beta.path());
    let Some(run) = lay.run() else { return Ok(None) };
    let in_run: Vec<bool> = {
        let mut v = vec![false; lay.angles.len()];
        for &(i, _) in &run {
            v[i] = true;
        }
        v
    };
    let mut matched_a = Vec::new();
    let mut matched_b = Vec::new();
    for (i, &a) in lay.angles.iter().enumerate() {
        if in_run[i] {
            continue;
        }
        match (lam.find_edge(a), mu.find_edge(a)) {
            (Some(ia), Some(ib)) if lay.agree(i) => {
                if alpha.is_h(ia) && beta.is_h(ib) {
                    matched_a.push((a, ia));
                    matched_b.push((a, ib));
                }
            }
            (None, None) => {}
            _ => return Ok(None),
        }
    }
    let mut ea = Vec::new();
    let mut eb = Vec::new();
    let mut ha = Vec::new();
    let mut hb = Vec::new();
    for &(i, lap) in &run {
        let a = lay.angles[i];
        let u = a.add_laps(lap);
        match (lam.find_edge(a), mu.find_edge(a)) {
            (Some(ia), Some(ib)) if lay.agree(i) => {
                if alpha.is_h(ia) && beta.is_h(ib) {
                    matched_a.push((a, ia));
                    matched_b.push((a, ib));
                }
            }
            (Some(ia), Some(ib)) if lay.partially_agree(i) => {
                let m = lam.edges()[ia].mult - mu.edges()[ib].mult;
                if m <= 0 {
                    return Ok(None);
                }
                let (h1, h2) = (alpha.is_h(ia), beta.is_h(ib));
                if h1 && h2 {
                    matched_a.push((a, ia));
                    matched_b.push((a, ib));
                }
                if h1 && !h2 {
                    ha.push((ea.len(), ia));
                }
                ea.push((u, m));
            }
            (ia, ib) => {
                if let Some(ia) = ia {
                    if alpha.is_h(ia) {
                        ha.push((ea.len(), ia));
                    }
                    ea.push((u, lam.edges()[ia].mult));
                }
                if let Some(ib) = ib {
                    if beta.is_h(ib) {
                        hb.push((eb.len(), ib));
                    }
                    eb.push((u, mu.edges()[ib].mult));
                }
            }
        }
    }
    matched_a.sort();
    matched_b.sort();
    let order_a: Vec<usize> = matched_a.iter().map(|x| x.1).chain(ha.iter().map(|x| x.1)).collect();
    let order_b: Vec<usize> = matched_b.iter().map(|x| x.1).chain(hb.iter().map(|x| x.1)).collect();
    if order_a.len() as i64 != alpha.num_h() || order_b.len() as i64 != beta.num_h() {
        return Ok(None);
    }
    let s = perm_sign(&order_a) * perm_sign(&order_b);

    let (first, first_lap) = run[0];
    let (last, last_lap) = *run.last().unwrap();
    let lo = if lay.cyclic {
        let k = lay.angles.len();
        let p = (first + k - 1) % k;
        let shift = if p >= first { -lay.n } else { 0 };
        lay.angles[p].add_laps(shift + first_lap).after()
    } else if first > 0 {
        lay.angles[first - 1].after()
    } else {
        match lam.kind() {
            PathKind::Open { lo, .. } => lo,
            _ => unreachable!(),
        }
    };
    let hi: GenericAngle = lay.angles[last].add_laps(last_lap).after();
    let anchor = lay.before(first).0;
    let kind = PathKind::Open { lo, hi };
    let pa = AdmissiblePath::new(kind, ea, anchor)?;
    let pb = AdmissiblePath::new(kind, eb, anchor)?;
    let mask = |hs: &[(usize, usize)]| hs.iter().fold(0u64, |m, &(j, _)| m | (1 << j));
    let a2 = Generator::new(pa, mask(&ha))?;
    let b2 = Generator::new(pb, mask(&hb))?;
    Ok(Some((a2, b2, s)))
}

/// Checks every nonzero coefficient of `d alpha`.
pub fn check_generator(alpha: &Generator) -> Result<Vec<(Generator, PairOutcome)>> {
    differential(alpha)?.iter().map(|(b, &c)| Ok((b.clone(), check_pair(alpha, b, c)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;

    fn pairs(seed: u64, open: bool) -> Vec<(Generator, Generator, i64)> {
        let mut rng = sample::rng(seed);
        let mut out = Vec::new();
        while out.len() < 300 {
            let p = if open {
                sample::open_distinct(&mut rng, 3, 6).unwrap()
            } else {
                sample::closed_path(&mut rng, 3, 6, 2).unwrap()
            };
            let g = sample::random_generator(&mut rng, &p);
            for (b, &c) in differential(&g).unwrap().iter() {
                out.push((g.clone(), b.clone(), c));
            }
        }
        out
    }

    #[test]
    fn differential_satisfies_axioms() {
        for open in [false, true] {
            for (a, b, c) in pairs(3, open) {
                let o = check_pair(&a, &b, c).unwrap();
                assert!(o.failed.is_empty(), "{a} -> {b}: {:?}", o.failed);
                assert!(o.checked.contains(&Axiom::Locality), "{a} -> {b}");
            }
        }
    }

    #[test]
    fn wrong_sign_breaks_locality() {
        for (a, b, c) in pairs(4, false).into_iter().take(50) {
            let o = check_pair(&a, &b, -c).unwrap();
            assert!(o.failed.contains(&Axiom::Locality), "{a} -> {b}");
        }
    }

    #[test]
    fn reversed_pair_breaks_nesting() {
        for (a, b, c) in pairs(5, false).into_iter().take(50) {
            let o = check_pair(&b, &a, c).unwrap();
            assert!(o.failed.contains(&Axiom::Nesting) && o.failed.contains(&Axiom::Index));
        }
    }
}
