//! Exact integer linear algebra: sparse matrices, Smith normal form, and
//! integer linear solves.
//!
//! Sparse work uses `i64` with checked arithmetic; dense work uses `BigInt`.
//! Sparse elimination pivots only on unit entries, which leaves the Smith
//! form unchanged up to a block of ones; the residual goes to the dense solver.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};

/// Column-major sparse integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: usize,
    /// Per column, `(row, value)` sorted by row, no zeros.
    data: Vec<Vec<(usize, i64)>>,
}

impl SparseIntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseIntMatrix { rows, cols, data: vec![Vec::new(); cols] }
    }

    /// Builds from columns; entries are summed and zeros dropped.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, i64)>>) -> Result<Self> {
        let cols = columns.len();
        let mut data = Vec::with_capacity(cols);
        for c in columns {
            let mut m: BTreeMap<usize, i64> = BTreeMap::new();
            for (r, v) in c {
                if r >= rows {
                    return domain(format!("row {r} out of range {rows}"));
                }
                let e = m.entry(r).or_insert(0);
                *e = e.checked_add(v).ok_or(Error::Overflow("matrix entry"))?;
            }
            data.push(m.into_iter().filter(|&(_, v)| v != 0).collect());
        }
        Ok(SparseIntMatrix { rows, cols, data })
    }

    pub fn from_dense(m: &[Vec<i64>]) -> Self {
        let rows = m.len();
        let cols = m.first().map_or(0, |r| r.len());
        let data = (0..cols).map(|j| (0..rows).filter(|&i| m[i][j] != 0).map(|i| (i, m[i][j])).collect()).collect();
        SparseIntMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|c| c.len()).sum()
    }

    pub fn column(&self, j: usize) -> &[(usize, i64)] {
        &self.data[j]
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[j].binary_search_by_key(&i, |e| e.0).map_or(0, |k| self.data[j][k].1)
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut m = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (j, c) in self.data.iter().enumerate() {
            for &(i, v) in c {
                m[i][j] = BigInt::from(v);
            }
        }
        m
    }

    /// Product `self * other`, checked.
    pub fn mul(&self, other: &SparseIntMatrix) -> Result<SparseIntMatrix> {
        if self.cols != other.rows {
            return domain("dimension mismatch in product");
        }
        let mut out = Vec::with_capacity(other.cols);
        for c in &other.data {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for &(k, b) in c {
                for &(i, a) in &self.data[k] {
                    let t = a.checked_mul(b).ok_or(Error::Overflow("matrix product"))?;
                    let e = acc.entry(i).or_insert(0);
                    *e = e.checked_add(t).ok_or(Error::Overflow("matrix product"))?;
                }
            }
            out.push(acc.into_iter().filter(|&(_, v)| v != 0).collect());
        }
        Ok(SparseIntMatrix { rows: self.rows, cols: other.cols, data: out })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_empty())
    }

    /// Triplet text: header `rows cols nnz`, then `row col value` per line.
    pub fn to_triplets(&self) -> String {
        let mut s = format!("{} {} {}\n", self.rows, self.cols, self.nnz());
        for (j, c) in self.data.iter().enumerate() {
            for &(i, v) in c {
                let _ = writeln!(s, "{i} {j} {v}");
            }
        }
        s
    }

    pub fn from_triplets(text: &str) -> Result<SparseIntMatrix> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let parse = |l: &str| -> Result<Vec<i64>> {
            l.split_whitespace()
                .map(|t| t.parse::<i64>().map_err(|e| Error::Domain(format!("bad triplet field {t}: {e}"))))
                .collect()
        };
        let head = parse(lines.next().ok_or_else(|| Error::Domain("empty triplet file".into()))?)?;
        if head.len() != 3 || head.iter().any(|&x| x < 0) {
            return domain("triplet header must be `rows cols nnz`");
        }
        let (rows, cols) = (head[0] as usize, head[1] as usize);
        let mut columns = vec![Vec::new(); cols];
        let mut count = 0;
        for l in lines {
            let t = parse(l)?;
            if t.len() != 3 || t[0] < 0 || t[1] < 0 || t[1] as usize >= cols {
                return domain(format!("bad triplet line `{l}`"));
            }
            columns[t[1] as usize].push((t[0] as usize, t[2]));
            count += 1;
        }
        if count != head[2] {
            return domain(format!("expected {} entries, found {count}", head[2]));
        }
        Self::from_columns(rows, columns)
    }
}

/// Smith normal form `U M V = D` with divisors `d_1 | d_2 | ... | d_r`,
/// together with the inverses of both transforms.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub divisors: Vec<BigInt>,
    pub u: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
    pub u_inv: Vec<Vec<BigInt>>,
    pub v_inv: Vec<Vec<BigInt>>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.divisors.len()
    }
}

pub(crate) fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

#[cfg(test)]
pub(crate) fn dense_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for (k, x) in row.iter().enumerate() {
                        if !x.is_zero() && !b[k][j].is_zero() {
                            s += x * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

fn row_axpy(m: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (a, b) = if dst < src {
        let (x, y) = m.split_at_mut(src);
        (&mut x[dst], &y[0])
    } else {
        let (x, y) = m.split_at_mut(dst);
        (&mut y[0], &x[src])
    };
    for (d, s) in a.iter_mut().zip(b.iter()) {
        if !s.is_zero() {
            *d -= q * s;
        }
    }
}

fn col_axpy(m: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        if !row[src].is_zero() {
            let t = q * &row[src];
            row[dst] -= t;
        }
    }
}

fn col_swap(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// Working state: the matrix plus both transforms and their inverses.
struct Smith {
    a: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    u_inv: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
    v_inv: Vec<Vec<BigInt>>,
}

impl Smith {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
        col_swap(&mut self.u_inv, i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        col_swap(&mut self.a, i, j);
        col_swap(&mut self.v, i, j);
        self.v_inv.swap(i, j);
    }

    /// `row[dst] -= q row[src]`.
    fn row_op(&mut self, dst: usize, src: usize, q: &BigInt) {
        row_axpy(&mut self.a, dst, src, q);
        row_axpy(&mut self.u, dst, src, q);
        col_axpy(&mut self.u_inv, src, dst, &-q);
    }

    /// `col[dst] -= q col[src]`.
    fn col_op(&mut self, dst: usize, src: usize, q: &BigInt) {
        col_axpy(&mut self.a, dst, src, q);
        col_axpy(&mut self.v, dst, src, q);
        row_axpy(&mut self.v_inv, src, dst, &-q);
    }

    fn negate_row(&mut self, t: usize) {
        for x in self.a[t].iter_mut().chain(self.u[t].iter_mut()) {
            *x = -&*x;
        }
        for row in self.u_inv.iter_mut() {
            row[t] = -&row[t];
        }
    }
}

/// Dense Smith normal form with transforms.
pub fn smith_dense(m: &[Vec<BigInt>], cols: usize) -> SmithForm {
    let rows = m.len();
    let mut s =
        Smith { a: m.to_vec(), u: identity(rows), u_inv: identity(rows), v: identity(cols), v_inv: identity(cols) };
    let mut divisors = Vec::new();
    let mut t = 0;
    while t < rows && t < cols {
        loop {
            // Smallest nonzero entry of the trailing block becomes the pivot.
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = &s.a[i][j];
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.magnitude() < s.a[bi][bj].magnitude()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            if pi != t {
                s.swap_rows(t, pi);
            }
            if pj != t {
                s.swap_cols(t, pj);
            }
            let mut clean = true;
            for i in t + 1..rows {
                if !s.a[i][t].is_zero() {
                    let q = s.a[i][t].div_floor(&s.a[t][t]);
                    s.row_op(i, t, &q);
                    clean &= s.a[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !s.a[t][j].is_zero() {
                    let q = s.a[t][j].div_floor(&s.a[t][t]);
                    s.col_op(j, t, &q);
                    clean &= s.a[t][j].is_zero();
                }
            }
            if !clean {
                continue;
            }
            // Divisibility: fold a non-multiple row into the pivot row.
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&s.a[i][j] % &s.a[t][t]).is_zero()));
            match bad {
                Some(i) => s.row_op(t, i, &-BigInt::one()),
                None => break,
            }
        }
        if s.a[t][t].is_zero() {
            break;
        }
        if s.a[t][t].is_negative() {
            s.negate_row(t);
        }
        divisors.push(s.a[t][t].clone());
        t += 1;
    }
    SmithForm { divisors, u: s.u, v: s.v, u_inv: s.u_inv, v_inv: s.v_inv }
}

/// Smith normal form of a sparse matrix (dense algorithm).
pub fn smith_normal_form(m: &SparseIntMatrix) -> SmithForm {
    smith_dense(&m.to_dense(), m.cols())
}

/// Row-major working copy used by the unit-pivot eliminations.
struct RowWork {
    rows: Vec<BTreeMap<usize, i64>>,
    col_rows: Vec<BTreeSet<usize>>,
    row_alive: Vec<bool>,
    col_alive: Vec<bool>,
}

impl RowWork {
    fn new(m: &SparseIntMatrix) -> Self {
        let mut rows = vec![BTreeMap::new(); m.rows()];
        let mut col_rows = vec![BTreeSet::new(); m.cols()];
        for j in 0..m.cols() {
            for &(i, v) in m.column(j) {
                rows[i].insert(j, v);
                col_rows[j].insert(i);
            }
        }
        RowWork { rows, col_rows, row_alive: vec![true; m.rows()], col_alive: vec![true; m.cols()] }
    }

    /// Best unit pivot in column `c`, by the Markowitz count.
    fn unit_in_col(&self, c: usize) -> Option<(usize, usize)> {
        self.col_rows[c]
            .iter()
            .filter(|&&r| self.rows[r][&c].abs() == 1)
            .map(|&r| (r, (self.rows[r].len() - 1) * (self.col_rows[c].len() - 1)))
            .min_by_key(|&(r, cost)| (cost, r))
    }

    /// `row[dst] -= f * row[src]`; returns the touched columns.
    fn row_axpy(&mut self, dst: usize, src: usize, f: i64) -> Result<Vec<usize>> {
        let src_row: Vec<(usize, i64)> = self.rows[src].iter().map(|(&c, &v)| (c, v)).collect();
        let mut touched = Vec::with_capacity(src_row.len());
        for (c, v) in src_row {
            let t = f.checked_mul(v).ok_or(Error::Overflow("elimination"))?;
            let e = self.rows[dst].entry(c).or_insert(0);
            *e = e.checked_sub(t).ok_or(Error::Overflow("elimination"))?;
            if *e == 0 {
                self.rows[dst].remove(&c);
                self.col_rows[c].remove(&dst);
            } else {
                self.col_rows[c].insert(dst);
            }
            touched.push(c);
        }
        Ok(touched)
    }

    fn kill_row(&mut self, r: usize) {
        for &c in self.rows[r].keys() {
            self.col_rows[c].remove(&r);
        }
        self.row_alive[r] = false;
    }
}

/// One recorded unit pivot: the pivot row as it was, and its right-hand side.
struct Pivot {
    col: usize,
    unit: i64,
    row: Vec<(usize, i64)>,
    rhs: i64,
}

/// Runs unit-pivot elimination; each pivot clears its column from all
/// other rows (and from `rhs` when given).
fn eliminate(w: &mut RowWork, mut rhs: Option<&mut Vec<i64>>) -> Result<Vec<Pivot>> {
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..w.col_alive.len())
        .filter(|&c| !w.col_rows[c].is_empty())
        .map(|c| Reverse((w.col_rows[c].len(), c)))
        .collect();
    let mut pivots = Vec::new();
    while let Some(Reverse((cnt, c))) = heap.pop() {
        if !w.col_alive[c] || w.col_rows[c].len() != cnt || cnt == 0 {
            continue;
        }
        let Some((r, _)) = w.unit_in_col(c) else { continue };
        let unit = w.rows[r][&c];
        let others: Vec<usize> = w.col_rows[c].iter().copied().filter(|&i| i != r).collect();
        let mut touched = BTreeSet::new();
        for i in others {
            let f = w.rows[i][&c] * unit;
            touched.extend(w.row_axpy(i, r, f)?);
            if let Some(b) = rhs.as_deref_mut() {
                let t = f.checked_mul(b[r]).ok_or(Error::Overflow("elimination"))?;
                b[i] = b[i].checked_sub(t).ok_or(Error::Overflow("elimination"))?;
            }
        }
        let row: Vec<(usize, i64)> = w.rows[r].iter().map(|(&k, &v)| (k, v)).collect();
        let b = rhs.as_deref().map_or(0, |b| b[r]);
        w.kill_row(r);
        w.col_alive[c] = false;
        for t in touched {
            if w.col_alive[t] && !w.col_rows[t].is_empty() {
                heap.push(Reverse((w.col_rows[t].len(), t)));
            }
        }
        pivots.push(Pivot { col: c, unit, row, rhs: b });
    }
    Ok(pivots)
}

/// Residual block after elimination, as dense BigInt, with its row and column labels.
fn residual(w: &RowWork) -> (Vec<usize>, Vec<usize>, Vec<Vec<BigInt>>) {
    let rows: Vec<usize> = (0..w.rows.len()).filter(|&r| w.row_alive[r] && !w.rows[r].is_empty()).collect();
    let cols: Vec<usize> = (0..w.col_alive.len()).filter(|&c| w.col_alive[c] && !w.col_rows[c].is_empty()).collect();
    let pos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let dense = rows
        .iter()
        .map(|&r| {
            let mut v = vec![BigInt::zero(); cols.len()];
            for (&c, &x) in &w.rows[r] {
                v[pos[&c]] = BigInt::from(x);
            }
            v
        })
        .collect();
    (rows, cols, dense)
}

/// Invariant factors of `m` (nonzero divisors only), via sparse unit elimination
/// followed by dense Smith form on what remains.
pub fn invariant_factors(m: &SparseIntMatrix) -> Result<Vec<BigInt>> {
    let mut w = RowWork::new(m);
    let pivots = match eliminate(&mut w, None) {
        Ok(p) => p,
        Err(Error::Overflow(_)) => return Ok(smith_normal_form(m).divisors),
        Err(e) => return Err(e),
    };
    let (_, cols, dense) = residual(&w);
    let mut out = vec![BigInt::one(); pivots.len()];
    out.extend(smith_dense(&dense, cols.len()).divisors);
    Ok(out)
}

pub fn rank(m: &SparseIntMatrix) -> Result<usize> {
    Ok(invariant_factors(m)?.len())
}

/// Outcome of solving `M y = b` over the integers.
#[derive(Clone, Debug, PartialEq)]
pub enum Solve {
    Solution(Vec<i64>),
    /// No integer solution; `residue` is the offending Smith coordinate.
    Unsolvable {
        coordinate: usize,
        residue: BigInt,
    },
}

/// Solves `M y = b` over the integers.
pub fn solve(m: &SparseIntMatrix, b: &[i64]) -> Result<Solve> {
    if b.len() != m.rows() {
        return domain("right-hand side has the wrong length");
    }
    let mut w = RowWork::new(m);
    let mut rhs = b.to_vec();
    let pivots = eliminate(&mut w, Some(&mut rhs))?;
    // Rows emptied by elimination must have a zero right-hand side.
    for r in 0..w.rows.len() {
        if w.row_alive[r] && w.rows[r].is_empty() && rhs[r] != 0 {
            return Ok(Solve::Unsolvable { coordinate: r, residue: BigInt::from(rhs[r]) });
        }
    }
    let (rrows, rcols, dense) = residual(&w);
    let sf = smith_dense(&dense, rcols.len());
    let rb: Vec<BigInt> = rrows.iter().map(|&r| BigInt::from(rhs[r])).collect();
    let ub: Vec<BigInt> =
        sf.u.iter().map(|row| row.iter().zip(&rb).fold(BigInt::zero(), |s, (x, y)| s + x * y)).collect();
    let mut z = vec![BigInt::zero(); rcols.len()];
    for (i, c) in ub.iter().enumerate() {
        if i < sf.rank() {
            let (q, rem) = c.div_rem(&sf.divisors[i]);
            if !rem.is_zero() {
                return Ok(Solve::Unsolvable { coordinate: i, residue: rem });
            }
            z[i] = q;
        } else if !c.is_zero() {
            return Ok(Solve::Unsolvable { coordinate: i, residue: c.clone() });
        }
    }
    let mut y = vec![0i64; m.cols()];
    for (k, &c) in rcols.iter().enumerate() {
        let val = sf.v[k].iter().zip(&z).fold(BigInt::zero(), |s, (a, b)| s + a * b);
        y[c] = val.to_i64().ok_or(Error::Overflow("solution"))?;
    }
    for p in pivots.iter().rev() {
        let mut s = p.rhs;
        for &(c, v) in &p.row {
            if c != p.col {
                let t = v.checked_mul(y[c]).ok_or(Error::Overflow("solution"))?;
                s = s.checked_sub(t).ok_or(Error::Overflow("solution"))?;
            }
        }
        y[p.col] = s * p.unit;
    }
    Ok(Solve::Solution(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn divs(m: &[Vec<i64>]) -> Vec<i64> {
        smith_normal_form(&SparseIntMatrix::from_dense(m)).divisors.iter().map(|d| d.to_i64().unwrap()).collect()
    }

    #[test]
    fn small_smith_forms() {
        assert_eq!(divs(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]), vec![1, 1, 1]);
        assert_eq!(divs(&[vec![2, 0], vec![0, 3]]), vec![1, 6]);
        assert_eq!(divs(&[vec![2, 4], vec![6, 8]]), vec![2, 4]);
    }

    #[test]
    fn transforms_diagonalize() {
        let m = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let sm = SparseIntMatrix::from_dense(&m);
        let sf = smith_normal_form(&sm);
        let d = dense_mul(&dense_mul(&sf.u, &sm.to_dense()), &sf.v);
        for (i, row) in d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let want = if i == j && i < sf.rank() { sf.divisors[i].clone() } else { BigInt::zero() };
                assert_eq!(*x, want);
            }
        }
        assert_eq!(dense_mul(&sf.u, &sf.u_inv), identity(3));
        assert_eq!(dense_mul(&sf.v_inv, &sf.v), identity(3));
        let f: Vec<i64> = invariant_factors(&sm).unwrap().iter().map(|d| d.to_i64().unwrap()).collect();
        assert_eq!(f, vec![2, 6, 12]);
    }

    #[test]
    fn solve_and_certify() {
        let m = SparseIntMatrix::from_dense(&[vec![1, 1], vec![0, 2], vec![1, 3]]);
        match solve(&m, &[3, 4, 7]).unwrap() {
            Solve::Solution(y) => assert_eq!(y, vec![1, 2]),
            s => panic!("{s:?}"),
        }
        assert!(matches!(solve(&m, &[1, 1, 2]).unwrap(), Solve::Unsolvable { .. }));
    }

    #[test]
    fn triplet_round_trip() {
        let m = SparseIntMatrix::from_dense(&[vec![0, -2], vec![5, 0]]);
        assert_eq!(SparseIntMatrix::from_triplets(&m.to_triplets()).unwrap(), m);
    }
}
