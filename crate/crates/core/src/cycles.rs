//! Distinguished cycles and chains: `E`, `H`, `Z_n`, `p`, `e` and `q`.

use crate::chain::Chain;
use crate::error::{domain, Error, Result};
use crate::generator::Generator;
use crate::lattice::{primitive_of, ExtendedAngle, LatticeVector};
use crate::path::{AdmissiblePath, Edge, PathKind};

/// All edges labeled e.
pub fn e_cycle(p: &AdmissiblePath) -> Chain {
    Chain::single(Generator::all_e(p.clone()), 1)
}

/// Sum over the ways of labeling exactly one edge h.
pub fn h_cycle(p: &AdmissiblePath) -> Chain {
    (0..p.num_edges()).map(|i| (Generator { path: p.clone(), h: 1 << i }, 1)).collect()
}

fn edge_index(p: &AdmissiblePath, a: ExtendedAngle) -> Result<usize> {
    p.find_edge(a).ok_or_else(|| Error::Domain(format!("no edge at {a}")))
}

/// Closed path of rotation `n` with unit edges at `theta + k pi`,
/// `k = 0..count`, taking the value `a` just after its last edge.
fn two_gon_wrap(a: LatticeVector, theta: ExtendedAngle, count: usize, n: i64) -> Result<(AdmissiblePath, Vec<usize>)> {
    let mut angles = vec![theta];
    for _ in 1..count {
        angles.push(angles.last().unwrap().add_pi());
    }
    let cut = angles.last().unwrap().add_laps(-n).after();
    let edges = angles.iter().map(|&x| Edge::new(x, 1)).collect();
    let p = AdmissiblePath::from_unrolled(PathKind::Closed { n }, cut, a, edges)?;
    let idx = angles.iter().map(|&x| edge_index(&p, x)).collect::<Result<Vec<_>>>()?;
    Ok((p, idx))
}

fn signed(p: AdmissiblePath, order: &[usize]) -> Result<Chain> {
    let (g, s) = Generator::from_ordered(p, order)?;
    Ok(Chain::single(g, s))
}

/// `Z_n(a,b)`: the `n`-fold 2-gon on `a, b`, all edges h, ordered
/// counterclockwise from an edge `a -> b`. Subdivided when `b - a` is
/// not primitive; zero when `a = b`.
pub fn z_cycle(n: i64, a: LatticeVector, b: LatticeVector) -> Result<Chain> {
    check_rotation(n)?;
    if a == b {
        return Ok(Chain::zero());
    }
    let (d, m) = primitive_of(b - a)?;
    let mut out = Chain::zero();
    for i in 0..m {
        let s = a + d.vector() * i;
        let (p, idx) = two_gon_wrap(s, ExtendedAngle::new(0, d), 2 * n as usize, n)?;
        out.add_chain(&signed(p, &idx)?);
    }
    Ok(out)
}

fn check_rotation(n: i64) -> Result<()> {
    if n < 1 {
        return domain("rotation number must be positive");
    }
    Ok(())
}

/// `p(a, theta)`: wraps `n - 1` times around the 2-gon from `a` to
/// `a + dir(theta)`, edges at `theta, theta + pi, ...`, all h in that order.
pub fn p_gen(a: LatticeVector, theta: ExtendedAngle, n: i64) -> Result<Chain> {
    check_rotation(n)?;
    if n == 1 {
        return Ok(Chain::single(Generator::all_e(AdmissiblePath::point(a, 1)?), 1));
    }
    let (p, idx) = two_gon_wrap(a, theta, 2 * n as usize - 2, n)?;
    signed(p, &idx)
}

/// `e(a, theta)`: `Z_n(a, b)` with the edge from `b` to `a` at `theta - pi`
/// relabeled e, remaining h edges counterclockwise.
pub fn e_gen(a: LatticeVector, theta: ExtendedAngle, n: i64) -> Result<Chain> {
    check_rotation(n)?;
    let (p, idx) = two_gon_wrap(a, theta, 2 * n as usize, n)?;
    signed(p, &idx[..idx.len() - 1])
}

/// `q(a, b)`: the sum of the `2n` generators with one e edge on the
/// `n`-fold 2-gon between `a` and `b`.
pub fn q_cycle(a: LatticeVector, b: LatticeVector, n: i64) -> Result<Chain> {
    let (d, m) = primitive_of(b - a)?;
    if m != 1 {
        return domain("q needs b - a primitive");
    }
    let theta = ExtendedAngle::new(0, d);
    let mut out = Chain::zero();
    let mut t = theta;
    for _ in 0..n {
        out.add_chain(&e_gen(a, t, n)?);
        out.add_chain(&e_gen(b, t.add_pi(), n)?);
        t = t.add_laps(1);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::differential::differential_chain;
    use crate::lattice::{v, Direction};

    #[test]
    fn z_antisymmetry_and_closed() {
        for n in 1..=3 {
            let z = z_cycle(n, v(0, 0), v(1, 2)).unwrap();
            let zr = z_cycle(n, v(1, 2), v(0, 0)).unwrap();
            let mut s = z.clone();
            s.add_chain(&zr);
            assert!(s.is_zero());
            assert!(differential_chain(&z).unwrap().is_zero());
        }
        assert!(z_cycle(1, v(3, 3), v(3, 3)).unwrap().is_zero());
        assert_eq!(z_cycle(1, v(0, 0), v(2, 0)).unwrap().len(), 2);
    }

    #[test]
    fn e_boundary_identity() {
        let d = Direction::new(1, 1).unwrap();
        for n in 1..=3 {
            for lap in 0..n {
                let th = ExtendedAngle::new(lap, d);
                let a = v(0, 0);
                let b = a + d.vector();
                let lhs = differential_chain(&e_gen(a, th, n).unwrap()).unwrap();
                let rhs = p_gen(b, th.add_pi(), n).unwrap().sub(&p_gen(a, th, n).unwrap());
                assert_eq!(lhs, rhs, "n = {n}, lap = {lap}");
                assert!(differential_chain(&p_gen(a, th, n).unwrap()).unwrap().is_zero());
            }
            assert!(differential_chain(&q_cycle(v(0, 0), v(1, 1), n).unwrap()).unwrap().is_zero());
        }
    }
}
