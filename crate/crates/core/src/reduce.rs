//! Algebraic reduction of a graded complex along unit entries.
//!
//! Each pivot `(a, b, u)` with `<da, b> = u = ±1` removes the acyclic pair
//! `a -> b`. What remains is a small complex on the critical cells that is
//! chain homotopy equivalent to the original; the projection onto it is
//! recorded as a log so that chains of the big complex can be pushed down.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::complex::GradedComplex;
use crate::error::{Error, Result};

type Col = BTreeMap<usize, i64>;

#[derive(Clone, Debug)]
enum Step {
    /// `x -= x[b] * u * col`, then drop `b`.
    Substitute {
        b: usize,
        u: i64,
        col: Vec<(usize, i64)>,
    },
    Drop(usize),
}

#[derive(Default)]
struct Level {
    cols: Vec<Col>,
    rows: Vec<BTreeSet<usize>>,
}

impl Level {
    fn remove_col(&mut self, a: usize) -> Col {
        let col = std::mem::take(&mut self.cols[a]);
        for r in col.keys() {
            self.rows[*r].remove(&a);
        }
        col
    }

    fn remove_row(&mut self, b: usize) {
        for x in std::mem::take(&mut self.rows[b]) {
            self.cols[x].remove(&b);
        }
    }

    /// `col[x] -= f * src`.
    fn axpy(&mut self, x: usize, src: &Col, f: i64) -> Result<()> {
        for (&r, &v) in src {
            let t = f.checked_mul(v).ok_or(Error::Overflow("reduction"))?;
            let e = self.cols[x].entry(r).or_insert(0);
            *e = e.checked_sub(t).ok_or(Error::Overflow("reduction"))?;
            if *e == 0 {
                self.cols[x].remove(&r);
                self.rows[r].remove(&x);
            } else {
                self.rows[r].insert(x);
            }
        }
        Ok(())
    }
}

/// The reduced complex and the projection log.
pub struct Reduction {
    /// Surviving basis indices per degree, ascending.
    critical: BTreeMap<i64, Vec<usize>>,
    /// Residual boundary columns per degree, keyed by critical index.
    residual: BTreeMap<i64, BTreeMap<usize, Col>>,
    log: BTreeMap<i64, Vec<Step>>,
    pivots: BTreeMap<i64, Vec<usize>>,
}

impl Reduction {
    pub fn new(c: &GradedComplex) -> Result<Reduction> {
        let degs = c.degrees();
        let mut levels: BTreeMap<i64, Level> = BTreeMap::new();
        let mut alive: BTreeMap<i64, Vec<bool>> = degs.iter().map(|&d| (d, vec![true; c.rank(d)])).collect();
        for &d in &degs {
            let Some(m) = c.boundary(d) else { continue };
            let mut lv = Level { cols: vec![Col::new(); m.cols()], rows: vec![BTreeSet::new(); m.rows()] };
            for j in 0..m.cols() {
                for &(i, v) in m.column(j) {
                    lv.cols[j].insert(i, v);
                    lv.rows[i].insert(j);
                }
            }
            levels.insert(d, lv);
        }
        let mut log: BTreeMap<i64, Vec<Step>> = BTreeMap::new();
        let mut pivots: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for &d in &degs {
            if !levels.contains_key(&d) {
                continue;
            }
            let mut heap: BinaryHeap<Reverse<(usize, usize)>> = {
                let lv = &levels[&d];
                (0..lv.cols.len()).filter(|&a| !lv.cols[a].is_empty()).map(|a| Reverse((lv.cols[a].len(), a))).collect()
            };
            while let Some(Reverse((cnt, a))) = heap.pop() {
                let lv = levels.get_mut(&d).unwrap();
                if lv.cols[a].len() != cnt || cnt == 0 {
                    continue;
                }
                let best =
                    lv.cols[a].iter().filter(|(_, v)| v.abs() == 1).map(|(&b, &u)| (lv.rows[b].len(), b, u)).min();
                let Some((_, b, u)) = best else { continue };
                let col_a = lv.remove_col(a);
                let others: Vec<usize> = lv.rows[b].iter().copied().collect();
                for x in others {
                    let f = lv.cols[x][&b] * u;
                    lv.axpy(x, &col_a, f)?;
                    heap.push(Reverse((lv.cols[x].len(), x)));
                }
                debug_assert!(lv.rows[b].is_empty());
                alive.get_mut(&d).unwrap()[a] = false;
                alive.get_mut(&(d - 1)).unwrap()[b] = false;
                if let Some(up) = levels.get_mut(&(d + 1)) {
                    up.remove_row(a);
                }
                if let Some(down) = levels.get_mut(&(d - 1)) {
                    down.remove_col(b);
                }
                let col = col_a.into_iter().filter(|&(r, _)| r != b).collect();
                log.entry(d - 1).or_default().push(Step::Substitute { b, u, col });
                log.entry(d).or_default().push(Step::Drop(a));
                pivots.entry(d).or_default().push(a);
            }
        }
        let critical: BTreeMap<i64, Vec<usize>> =
            alive.iter().map(|(&d, al)| (d, (0..al.len()).filter(|&i| al[i]).collect())).collect();
        let residual = levels
            .into_iter()
            .map(|(d, lv)| {
                let cols = critical[&d].iter().map(|&a| (a, lv.cols[a].clone())).collect();
                (d, cols)
            })
            .collect();
        Ok(Reduction { critical, residual, log, pivots })
    }

    pub fn critical(&self, d: i64) -> &[usize] {
        self.critical.get(&d).map_or(&[], |v| v.as_slice())
    }

    /// Cells of degree `d` removed as the upper member of a pivot pair.
    pub fn upper_pivots(&self, d: i64) -> &[usize] {
        self.pivots.get(&d).map_or(&[], |v| v.as_slice())
    }

    /// Residual boundary `C'_d -> C'_{d-1}` as a dense matrix in critical order,
    /// or `None` if the complex has no boundary in degree `d`.
    pub fn residual_matrix(&self, d: i64) -> Option<Vec<Vec<BigInt>>> {
        let cols = self.residual.get(&d)?;
        let src = self.critical(d);
        let dst = self.critical(d - 1);
        let pos: BTreeMap<usize, usize> = dst.iter().enumerate().map(|(k, &r)| (r, k)).collect();
        let mut m = vec![vec![BigInt::zero(); src.len()]; dst.len()];
        for (j, a) in src.iter().enumerate() {
            for (r, &v) in &cols[a] {
                m[pos[r]][j] = BigInt::from(v);
            }
        }
        Some(m)
    }

    /// Projects a degree-`d` chain, given as a coefficient vector over the basis,
    /// onto the critical cells. Returns coordinates in critical order.
    pub fn project(&self, x: &[i64], d: i64) -> Result<Vec<i64>> {
        let mut m: Col = x.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i, c)).collect();
        for step in self.log.get(&d).map_or(&[][..], |v| v.as_slice()) {
            match step {
                Step::Drop(a) => {
                    m.remove(a);
                }
                Step::Substitute { b, u, col } => {
                    let Some(c) = m.remove(b) else { continue };
                    let f = c.checked_mul(*u).ok_or(Error::Overflow("projection"))?;
                    for &(r, v) in col {
                        let t = f.checked_mul(v).ok_or(Error::Overflow("projection"))?;
                        let e = m.entry(r).or_insert(0);
                        *e = e.checked_sub(t).ok_or(Error::Overflow("projection"))?;
                        if *e == 0 {
                            m.remove(&r);
                        }
                    }
                }
            }
        }
        Ok(self.critical(d).iter().map(|i| m.get(i).copied().unwrap_or(0)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::ComplexSpec;
    use crate::lattice::v;
    use crate::path::n_convex;

    #[test]
    fn square_reduces_small() {
        let sq = n_convex(&[v(0, 0), v(1, 0), v(1, 1), v(0, 1)], 1).unwrap();
        let c = GradedComplex::build(&ComplexSpec::Below { path: sq }).unwrap();
        let r = Reduction::new(&c).unwrap();
        let total: usize = c.degrees().iter().map(|&d| r.critical(d).len()).sum();
        // Euler characteristic is preserved.
        let chi = |f: &dyn Fn(i64) -> usize| {
            c.degrees().iter().map(|&d| if d % 2 == 0 { f(d) as i64 } else { -(f(d) as i64) }).sum::<i64>()
        };
        assert_eq!(chi(&|d| c.rank(d)), chi(&|d| r.critical(d).len()));
        assert!(total <= 10);
    }
}
