//! Theta-corner sequences and the flattening map from x-axis complexes to
//! n-convex complexes.

use crate::chain::Chain;
use crate::error::{domain, Error, Result};
use crate::generator::{Generator, Label};
use crate::lattice::{hull_chain, primitive_of, theta_order_less, GenericAngle, LatticeVector};
use crate::path::{AdmissiblePath, Edge, PathKind};
use crate::xaxis::{corner_sequence, slot_labels};

/// Values of `lambda` at `cut + i pi` for `i = 0..=2n`.
pub fn theta_corner_sequence(lambda: &AdmissiblePath, cut: GenericAngle) -> Result<Vec<LatticeVector>> {
    let Some(n) = lambda.rotation() else {
        return domain("theta-corner sequences need a closed path");
    };
    let mut c = cut;
    let mut out = Vec::with_capacity(2 * n as usize + 1);
    for _ in 0..=2 * n {
        out.push(lambda.value_at(c));
        c = c.add_pi();
    }
    Ok(out)
}

/// Lattice points of `P_Lambda` sorted by the theta-order of `cut`.
pub fn theta_sorted_points(lambda: &AdmissiblePath, cut: GenericAngle) -> Vec<LatticeVector> {
    let mut pts = lambda.hull_lattice_points();
    pts.sort_by(|&p, &q| {
        if theta_order_less(p, q, cut) {
            std::cmp::Ordering::Less
        } else if theta_order_less(q, p, cut) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
    pts
}

/// The flattening chain map `F_theta: C(Lambda_0) -> C(Lambda)`.
///
/// The cut must lie in `(0, pi)` so that slot `i` of an x-axis path matches the
/// interval `(theta + i pi, theta + (i+1) pi)`.
pub struct Flattening {
    n: i64,
    cut: GenericAngle,
    x0: i64,
    points: Vec<LatticeVector>,
}

impl Flattening {
    pub fn new(lambda0: &AdmissiblePath, lambda: &AdmissiblePath, cut: GenericAngle) -> Result<Flattening> {
        let (Some(n), Some(n0)) = (lambda.rotation(), lambda0.rotation()) else {
            return domain("flattening needs closed paths");
        };
        if n != n0 || !lambda0.on_x_axis() || lambda.kind() != (PathKind::Closed { n }) {
            return Err(Error::TypeMismatch);
        }
        if cut.lap != 0 || cut.dir.half() != 0 {
            return domain("flattening cut must lie in (0, pi)");
        }
        let pts0 = lambda0.hull_lattice_points();
        let points = theta_sorted_points(lambda, cut);
        if pts0.len() != points.len() {
            return domain(format!("lattice point counts differ: {} vs {}", pts0.len(), points.len()));
        }
        let x0 = pts0.iter().map(|p| p.x).min().unwrap();
        Ok(Flattening { n, cut, x0, points })
    }

    /// The block `Lambda^i_{p,q}` as edges in the interval `I_i`.
    fn block(&self, i: usize, p: usize, q: usize) -> Result<Vec<Edge>> {
        if p == q {
            return Ok(Vec::new());
        }
        let (lo, hi) = (p.min(q), p.max(q));
        let pts = &self.points[lo..=hi];
        let chain = hull_chain(pts, self.points[p], self.points[q])?;
        let mut c = self.cut;
        for _ in 0..i {
            c = c.add_pi();
        }
        let mut edges: Vec<Edge> = Vec::new();
        for w in chain.windows(2) {
            let (d, m) = primitive_of(w[1] - w[0])?;
            match edges.last_mut() {
                Some(last) if last.angle.dir == d => last.mult += m,
                _ => edges.push(Edge::new(c.next_with_dir(d), m)),
            }
        }
        Ok(edges)
    }

    /// `F_theta` on one generator of the x-axis complex.
    pub fn apply(&self, g: &Generator) -> Result<Chain> {
        let seq = corner_sequence(g.path())?;
        let labels = slot_labels(g)?;
        let k = self.points.len() as i64;
        let idx: Vec<usize> = seq
            .iter()
            .map(|&x| {
                let j = x - self.x0;
                if (0..k).contains(&j) {
                    Ok(j as usize)
                } else {
                    domain(format!("corner {x} outside the source region"))
                }
            })
            .collect::<Result<_>>()?;
        let len = 2 * self.n as usize;
        let mut blocks = Vec::with_capacity(len);
        for i in 0..len {
            blocks.push(self.block(i, idx[i], idx[(i + 1) % len])?);
        }
        let edges: Vec<Edge> = blocks.iter().flatten().copied().collect();
        let path = AdmissiblePath::from_unrolled(PathKind::Closed { n: self.n }, self.cut, self.points[idx[0]], edges)?;
        // Edge indices of each h block, in slot order.
        let mut h_blocks: Vec<Vec<usize>> = Vec::new();
        for i in 0..len {
            if labels[i] == Label::H {
                let ks = blocks[i]
                    .iter()
                    .map(|e| path.find_edge(e.angle).ok_or_else(|| Error::Domain("lost block edge".into())))
                    .collect::<Result<Vec<_>>>()?;
                h_blocks.push(ks);
            }
        }
        let mut out = Chain::zero();
        let mut pick = vec![0usize; h_blocks.len()];
        if h_blocks.iter().any(|b| b.is_empty()) {
            return Ok(out);
        }
        loop {
            let order: Vec<usize> = pick.iter().zip(&h_blocks).map(|(&p, b)| b[p]).collect();
            let (x, s) = Generator::from_ordered(path.clone(), &order)?;
            out.add_term(x, s);
            let mut t = 0;
            while t < pick.len() {
                pick[t] += 1;
                if pick[t] < h_blocks[t].len() {
                    break;
                }
                pick[t] = 0;
                t += 1;
            }
            if t == pick.len() {
                break;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{v, Direction};
    use crate::path::n_convex;

    #[test]
    fn pentagon_block() {
        // k = 10 pentagon, cut just after angle zero.
        let lam = n_convex(&[v(0, 0), v(2, 0), v(3, 2), v(1, 3), v(0, 1)], 1).unwrap();
        let cut = GenericAngle::new(0, Direction::EAST);
        let lam0 = n_convex(&[v(0, 0), v(9, 0)], 1).unwrap();
        let f = Flattening::new(&lam0, &lam, cut).unwrap();
        assert_eq!(f.points.len(), 10);
        // Points numbered 1..10 from the top; point 8 is (0,0), point 3 is (2,2).
        let num = |p: LatticeVector| f.points.iter().position(|&q| q == p).unwrap() + 1;
        assert_eq!(num(v(1, 3)), 1);
        assert_eq!(num(v(0, 0)), 8);
        assert_eq!(num(v(2, 2)), 3);
        assert_eq!(num(v(2, 0)), 10);
        let b = f.block(0, 7, 2).unwrap();
        let dirs: Vec<(i64, i64, i64)> = b.iter().map(|e| (e.angle.dir.x(), e.angle.dir.y(), e.mult)).collect();
        assert_eq!(dirs, vec![(2, 1, 1), (1, 1, 1), (-1, 0, 1)]);
    }
}
