//! The differential and the maps built from the same corner moves:
//! `U`, the homotopy `K`, `delta'` and the twisted differential.

use crate::chain::{Chain, Coefficient, Laurent};
use crate::error::Result;
use crate::generator::{perm_sign, Generator};
use crate::lattice::{AngleKey, Direction, GenericAngle};
use crate::path::PathKind;

fn mask_of(order: &[usize]) -> u64 {
    order.iter().fold(0u64, |m, &i| m | (1u64 << i))
}

fn sign_to_last(hs: &[usize], theta: usize) -> i64 {
    let pos = hs.iter().position(|&k| k == theta).unwrap();
    if (hs.len() - 1 - pos).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Which adjacent h edge plays the distinguished role when both are h.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwoHChoice {
    Following,
    Preceding,
}

/// Contribution of a single corner to the differential.
pub fn differential_at(g: &Generator, corner: usize, choice: TwoHChoice) -> Result<Chain> {
    let mut out = Chain::zero();
    let c = g.path.corner(corner)?;
    if !c.roundable() {
        return Ok(out);
    }
    let n_e = g.path.num_edges();
    let ia = if corner == 0 { n_e - 1 } else { corner - 1 };
    let ib = corner;
    let (ha, hb) = (g.is_h(ia), g.is_h(ib));
    if !ha && !hb {
        return Ok(out);
    }
    let r = g.path.round_detail(corner)?;
    let hs = g.h_edges();
    if ha != hb {
        let theta = if ha { ia } else { ib };
        let s = sign_to_last(&hs, theta) * if theta == ib { 1 } else { -1 };
        let order: Vec<usize> = hs.iter().filter(|&&k| k != theta).map(|&k| r.edge_map[k].unwrap()).collect();
        let beta = Generator { path: r.path, h: mask_of(&order) };
        out.add_term(beta, s * perm_sign(&order));
    } else {
        let (theta, other, s2) = match choice {
            TwoHChoice::Following => (ib, ia, 1),
            TwoHChoice::Preceding => (ia, ib, -1),
        };
        let s = sign_to_last(&hs, theta) * s2;
        for &(eta, _) in &r.affected {
            let order: Vec<usize> = hs
                .iter()
                .filter(|&&k| k != theta)
                .map(|&k| if k == other { eta } else { r.edge_map[k].unwrap() })
                .collect();
            let beta = Generator { path: r.path.clone(), h: mask_of(&order) };
            out.add_term(beta, s * perm_sign(&order));
        }
    }
    Ok(out)
}

/// `delta(alpha)`.
pub fn differential(g: &Generator) -> Result<Chain> {
    differential_with(g, TwoHChoice::Following)
}

/// `delta(alpha)` with an explicit choice in the two-h case.
pub fn differential_with(g: &Generator, choice: TwoHChoice) -> Result<Chain> {
    let mut out = Chain::zero();
    for c in g.path.corners() {
        if c.roundable() {
            out.add_chain(&differential_at(g, c.index, choice)?);
        }
    }
    Ok(out)
}

/// Linear extension of a fallible generator map.
pub fn apply<C, F>(x: &Chain<C>, f: F) -> Result<Chain<C>>
where
    C: Coefficient,
    F: Fn(&Generator) -> Result<Chain<C>>,
{
    let mut out = Chain::zero();
    for (g, c) in x.iter() {
        out.add_scaled(&f(g)?, c);
    }
    Ok(out)
}

pub fn differential_chain(x: &Chain) -> Result<Chain> {
    apply(x, differential)
}

/// Locates a cut: the corner containing it and the cut in that corner's local frame.
fn locate_cut(g: &Generator, cut: GenericAngle) -> Option<(usize, AngleKey)> {
    let p = &g.path;
    let key = cut.key();
    match p.kind() {
        PathKind::Open { lo, hi } => {
            if key <= lo.key() || key >= hi.key() {
                return None;
            }
            let i = p.edges().iter().take_while(|e| e.angle.key() < key).count();
            if i == 0 || i == p.num_edges() {
                None
            } else {
                Some((i, key))
            }
        }
        PathKind::Closed { n } | PathKind::Periodic { n, .. } => {
            let zero = GenericAngle::new(0, Direction::EAST).key();
            let mut k = key.add_laps(-key.lap.div_euclid(n) * n);
            if k < zero {
                k = k.add_laps(n);
            }
            if p.num_edges() == 0 {
                return Some((0, k));
            }
            match p.edges().iter().position(|e| e.angle.key() > k) {
                Some(i) => Some((i, k)),
                None => Some((0, k.add_laps(-n))),
            }
        }
    }
}

/// `U_theta(alpha)`: rounds the corner containing the cut, keeping the h count.
pub fn u_map(g: &Generator, cut: GenericAngle) -> Result<Chain> {
    let mut out = Chain::zero();
    let Some((corner, local)) = locate_cut(g, cut) else {
        return Ok(out);
    };
    let c = g.path.corner(corner)?;
    if !c.roundable() {
        return Ok(out);
    }
    let n_e = g.path.num_edges();
    let ia = if corner == 0 { n_e - 1 } else { corner - 1 };
    let ib = corner;
    let r = g.path.round_detail(corner)?;
    let before: Vec<usize> = r.affected.iter().filter(|(_, a)| a.key() < local).map(|&(k, _)| k).collect();
    let after: Vec<usize> = r.affected.iter().filter(|(_, a)| a.key() > local).map(|&(k, _)| k).collect();
    let choices_a: Vec<Option<usize>> = if g.is_h(ia) { before.iter().map(|&k| Some(k)).collect() } else { vec![None] };
    let choices_b: Vec<Option<usize>> = if g.is_h(ib) { after.iter().map(|&k| Some(k)).collect() } else { vec![None] };
    let hs = g.h_edges();
    for &ca in &choices_a {
        for &cb in &choices_b {
            let order: Vec<usize> = hs
                .iter()
                .map(|&k| {
                    if k == ia {
                        ca.unwrap()
                    } else if k == ib {
                        cb.unwrap()
                    } else {
                        r.edge_map[k].unwrap()
                    }
                })
                .collect();
            out.add_term(Generator { path: r.path.clone(), h: mask_of(&order) }, perm_sign(&order));
        }
    }
    Ok(out)
}

/// Relabels the e edge `x` as h, placed last in the ordering.
fn relabel_last(g: &Generator, x: usize) -> (Generator, i64) {
    let mut order = g.h_edges();
    order.push(x);
    (g.with_mask(g.h | 1 << x), perm_sign(&order))
}

/// `K_{cut1,cut2}(alpha)`.
pub fn k_homotopy(g: &Generator, cut1: GenericAngle, cut2: GenericAngle) -> Result<Chain> {
    let p = &g.path;
    let (k1, k2) = (cut1.key(), cut2.key());
    let in_arc: Box<dyn Fn(AngleKey) -> bool> = match p.kind() {
        PathKind::Open { .. } => {
            if k1 <= k2 {
                Box::new(move |x| k1 < x && x < k2)
            } else {
                Box::new(move |x| x > k1 || x < k2)
            }
        }
        PathKind::Closed { n } | PathKind::Periodic { n, .. } => {
            let zero = GenericAngle::new(0, Direction::EAST).key();
            let mut q = k1.lap.div_euclid(n);
            if k1.add_laps(-q * n) < zero {
                q -= 1;
            }
            let c1 = k1.add_laps(-q * n);
            let mut c2 = k2.add_laps(-q * n);
            while c2 < c1 {
                c2 = c2.add_laps(n);
            }
            while c2 > c1.add_laps(n) {
                c2 = c2.add_laps(-n);
            }
            Box::new(move |x| (c1 < x && x < c2) || (c1 < x.add_laps(n) && x.add_laps(n) < c2))
        }
    };
    let mut out = Chain::zero();
    for (i, e) in p.edges().iter().enumerate() {
        if !g.is_h(i) && in_arc(e.angle.key()) {
            let (b, s) = relabel_last(g, i);
            out.add_term(b, s);
        }
    }
    Ok(out)
}

/// `delta'(alpha)`: relabel any e edge as h, placed last.
pub fn delta_prime(g: &Generator) -> Chain {
    let mut out = Chain::zero();
    for i in 0..g.path.num_edges() {
        if !g.is_h(i) {
            let (b, s) = relabel_last(g, i);
            out.add_term(b, s);
        }
    }
    out
}

/// Twisted differential `delta + (1 - t) delta'` with Laurent coefficients.
pub fn delta_twisted(g: &Generator) -> Result<Chain<Laurent>> {
    let mut out = differential(g)?.to_laurent();
    out.add_scaled(&delta_prime(g).to_laurent(), &Laurent::one_minus_t());
    Ok(out)
}

pub fn delta_twisted_chain(x: &Chain<Laurent>) -> Result<Chain<Laurent>> {
    apply(x, delta_twisted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::v;
    use crate::path::{n_convex, AdmissiblePath};

    fn poly(pts: &[(i64, i64)]) -> AdmissiblePath {
        n_convex(&pts.iter().map(|&(x, y)| v(x, y)).collect::<Vec<_>>(), 1).unwrap()
    }

    fn point(x: i64, y: i64) -> Generator {
        Generator::all_e(AdmissiblePath::point(v(x, y), 1).unwrap())
    }

    fn edge_index(p: &AdmissiblePath, from: (i64, i64)) -> usize {
        p.segments().iter().position(|s| s.0 == v(from.0, from.1)).unwrap()
    }

    #[test]
    fn two_gon_differentials() {
        let p = poly(&[(0, 0), (1, 0)]);
        // e(u,v): the edge from u to v is e, the other h.
        let u_to_v = edge_index(&p, (0, 0));
        let v_to_u = edge_index(&p, (1, 0));
        let e_uv = Generator::new(p.clone(), 1 << v_to_u).unwrap();
        let d = differential(&e_uv).unwrap();
        let mut want = Chain::single(point(0, 0), 1);
        want.add_term(point(1, 0), -1);
        assert_eq!(d, want);
        let h_uv = Generator::all_h(p);
        assert!(differential(&h_uv).unwrap().is_zero());
        let _ = u_to_v;
    }

    #[test]
    fn triangle_differential() {
        let p = poly(&[(0, 0), (1, 0), (0, 1)]);
        let (h3, s) = Generator::from_ordered(
            p.clone(),
            &[edge_index(&p, (0, 0)), edge_index(&p, (1, 0)), edge_index(&p, (0, 1))],
        )
        .unwrap();
        let d = differential(&h3).unwrap().scaled(&s);
        // h(u,v) for u -> v counterclockwise, u's edge first.
        let h2 = |a: (i64, i64), b: (i64, i64)| {
            let q = poly(&[a, b]);
            let (g, s) = Generator::from_ordered(q.clone(), &[edge_index(&q, a), edge_index(&q, b)]).unwrap();
            Chain::single(g, s)
        };
        let mut want = h2((0, 0), (1, 0));
        want.add_chain(&h2((1, 0), (0, 1)));
        want.add_chain(&h2((0, 1), (0, 0)));
        assert_eq!(d, want);
    }

    #[test]
    fn pentagon_example_signs() {
        let p = poly(&[(0, 0), (2, 0), (3, 2), (1, 3), (0, 1)]);
        let bottom = edge_index(&p, (0, 0));
        let right = edge_index(&p, (2, 0));
        let (alpha, s) = Generator::from_ordered(p.clone(), &[bottom, right]).unwrap();
        let d = differential(&alpha).unwrap().scaled(&s);
        assert_eq!(d.len(), 4);
        let term = |pts: &[(i64, i64)], h_from: (i64, i64)| {
            let q = poly(pts);
            Generator::new(q.clone(), 1 << edge_index(&q, h_from)).unwrap()
        };
        assert_eq!(d.coeff(&term(&[(1, 0), (2, 0), (3, 2), (1, 3), (0, 1)], (2, 0))), -1);
        assert_eq!(d.coeff(&term(&[(0, 0), (1, 0), (3, 2), (1, 3), (0, 1)], (0, 0))), 1);
        assert_eq!(d.coeff(&term(&[(0, 0), (1, 0), (3, 2), (1, 3), (0, 1)], (1, 0))), 1);
        assert_eq!(d.coeff(&term(&[(0, 0), (2, 0), (2, 2), (1, 3), (0, 1)], (0, 0))), -1);
    }

    #[test]
    fn twisted_square_vanishes() {
        let p = poly(&[(0, 0), (2, 0), (2, 1), (0, 1)]);
        let g = Generator::new(p, 0b0101).unwrap();
        let dd = delta_twisted_chain(&delta_twisted(&g).unwrap()).unwrap();
        assert!(dd.is_zero());
    }
}
