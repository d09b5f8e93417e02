//! Generators: admissible paths with e/h edge labels in canonical h-order.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::lattice::{twice_x_dy, Direction, ExtendedAngle, LatticeVector};
use crate::path::{AdmissiblePath, PathKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    E,
    H,
}

/// A labeled path. The h edges are ordered by increasing edge index, which
/// is increasing angle from the cut just after `(1,0)` at lap 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub(crate) path: AdmissiblePath,
    pub(crate) h: u64,
}

/// Sign of the permutation that sorts `order`. Entries must be distinct.
pub fn perm_sign(order: &[usize]) -> i64 {
    let mut inv = 0usize;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if order[i] > order[j] {
                inv += 1;
            }
        }
    }
    if inv.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn mask_of(order: &[usize]) -> u64 {
    order.iter().fold(0u64, |m, &i| m | (1u64 << i))
}

impl Generator {
    /// Generator from a bitmask of h edges.
    pub fn new(path: AdmissiblePath, h: u64) -> Result<Generator> {
        let n = path.num_edges();
        if n < 64 && h >> n != 0 {
            return domain("h mask refers to a missing edge");
        }
        Ok(Generator { path, h })
    }

    /// All edges labeled e.
    pub fn all_e(path: AdmissiblePath) -> Generator {
        Generator { path, h: 0 }
    }

    /// All edges labeled h.
    pub fn all_h(path: AdmissiblePath) -> Generator {
        let n = path.num_edges();
        let h = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Generator { path, h }
    }

    /// Labels plus an ordering of the h edges; returns the canonical
    /// generator and the sign relating the given ordering to it.
    pub fn make(path: AdmissiblePath, labels: &[Label], ordering: &[usize]) -> Result<(Generator, i64)> {
        if labels.len() != path.num_edges() {
            return domain(format!("{} labels for {} edges", labels.len(), path.num_edges()));
        }
        let hs: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == Label::H).collect();
        let mut sorted = ordering.to_vec();
        sorted.sort_unstable();
        if sorted != hs {
            return domain("ordering is not a permutation of the h edges");
        }
        Ok((Generator { path, h: mask_of(ordering) }, perm_sign(ordering)))
    }

    /// Generator whose h edges are exactly `ordering`, with the sign of that ordering.
    pub fn from_ordered(path: AdmissiblePath, ordering: &[usize]) -> Result<(Generator, i64)> {
        let mut s = ordering.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.len() != ordering.len() || s.last().is_some_and(|&i| i >= path.num_edges()) {
            return domain("ordering must list distinct edges");
        }
        Ok((Generator { path, h: mask_of(ordering) }, perm_sign(ordering)))
    }

    pub fn path(&self) -> &AdmissiblePath {
        &self.path
    }

    pub fn h_mask(&self) -> u64 {
        self.h
    }

    pub fn is_h(&self, i: usize) -> bool {
        self.h >> i & 1 == 1
    }

    pub fn num_h(&self) -> i64 {
        self.h.count_ones() as i64
    }

    /// Indices of the h edges in canonical order.
    pub fn h_edges(&self) -> Vec<usize> {
        (0..self.path.num_edges()).filter(|&i| self.is_h(i)).collect()
    }

    pub fn labels(&self) -> Vec<Label> {
        (0..self.path.num_edges()).map(|i| if self.is_h(i) { Label::H } else { Label::E }).collect()
    }

    pub fn with_mask(&self, h: u64) -> Generator {
        Generator { path: self.path.clone(), h }
    }

    /// Juxtaposition `alpha beta` of open generators; h edges of `alpha` come first.
    pub fn concat(&self, other: &Generator) -> Result<Generator> {
        let path = self.path.concat(&other.path)?;
        Ok(Generator { path, h: self.h | (other.h << self.path.num_edges()) })
    }

    pub fn translate(&self, w: LatticeVector) -> Generator {
        Generator { path: self.path.translate(w), h: self.h }
    }

    fn ell_minus_h(&self) -> i128 {
        self.path.total_mult() as i128 - self.num_h() as i128
    }

    /// Absolute index, for closed paths and open paths with equal endpoints.
    pub fn index(&self) -> Result<i64> {
        match self.path.kind() {
            PathKind::Closed { .. } => {}
            PathKind::Open { .. } if self.path.anchor() == self.path.end_point() => {}
            _ => return domain("absolute index needs a closed path"),
        }
        to_i64(self.path.twice_area_term() + self.ell_minus_h())
    }

    /// Index of the open path closed up by the chord from its end to its start.
    pub fn chord_index(&self) -> Result<i64> {
        let chord = match self.path.kind() {
            PathKind::Open { .. } => twice_x_dy(self.path.end_point(), self.path.anchor()),
            _ => 0,
        };
        to_i64(self.path.twice_area_term() + chord + self.ell_minus_h())
    }

    /// Relative index `I(self, other)`.
    pub fn relative_index(&self, other: &Generator) -> Result<i64> {
        let (p, q) = (&self.path, &other.path);
        match (p.kind(), q.kind()) {
            (PathKind::Closed { n }, PathKind::Closed { n: m }) if n == m => {}
            (PathKind::Periodic { n, gamma }, PathKind::Periodic { n: m, gamma: g }) if n == m && gamma == g => {}
            (PathKind::Open { lo, hi }, PathKind::Open { lo: l2, hi: h2 }) if lo == l2 && hi == h2 => {}
            _ => return Err(Error::TypeMismatch),
        }
        let (sa, sb) = (p.anchor(), q.anchor());
        let (ea, eb) = match p.kind() {
            PathKind::Open { .. } => (p.end_point(), q.end_point()),
            k => (sa + k.gamma(), sb + k.gamma()),
        };
        let w = p.twice_area_term() + twice_x_dy(ea, eb) - q.twice_area_term() - twice_x_dy(sa, sb);
        to_i64(w + self.ell_minus_h() - other.ell_minus_h())
    }

    /// Permutation from display (serialized) edge order to internal order.
    pub(crate) fn display_to_internal(path: &AdmissiblePath) -> Vec<usize> {
        let n = path.num_edges();
        match path.rotation() {
            Some(r) if n > 0 && path.edges()[n - 1].angle == ExtendedAngle::new(r, Direction::EAST) => {
                std::iter::once(n - 1).chain(0..n - 1).collect()
            }
            _ => (0..n).collect(),
        }
    }
}

fn to_i64(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Overflow("index"))
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [", self.path)?;
        for l in self.labels() {
            write!(f, "{}", if l == Label::H { 'h' } else { 'e' })?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct GeneratorJson {
    #[serde(flatten)]
    path: serde_json::Value,
    labels: Vec<Label>,
}

impl Serialize for Generator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let perm = Generator::display_to_internal(&self.path);
        let labels = perm.iter().map(|&i| if self.is_h(i) { Label::H } else { Label::E }).collect();
        let path = serde_json::to_value(&self.path).map_err(serde::ser::Error::custom)?;
        GeneratorJson { path, labels }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Generator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = GeneratorJson::deserialize(d)?;
        let path: AdmissiblePath = serde_json::from_value(j.path).map_err(serde::de::Error::custom)?;
        let perm = Generator::display_to_internal(&path);
        if j.labels.len() != perm.len() {
            return Err(serde::de::Error::custom("label count does not match edge count"));
        }
        let mut h = 0u64;
        for (k, &i) in perm.iter().enumerate() {
            if j.labels[k] == Label::H {
                h |= 1 << i;
            }
        }
        Generator::new(path, h).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::v;
    use crate::path::n_convex;

    #[test]
    fn ordering_signs() {
        let g = n_convex(&[v(0, 0), v(1, 0)], 1).unwrap();
        let (_, s) = Generator::from_ordered(g.clone(), &[0, 1]).unwrap();
        assert_eq!(s, 1);
        let (_, s) = Generator::from_ordered(g, &[1, 0]).unwrap();
        assert_eq!(s, -1);
        assert_eq!(perm_sign(&[2, 1, 0]), -1);
        assert_eq!(perm_sign(&[]), 1);
    }

    #[test]
    fn index_examples() {
        let pt = Generator::all_e(AdmissiblePath::point(v(0, 0), 1).unwrap());
        assert_eq!(pt.index().unwrap(), 0);
        let sq = Generator::all_e(n_convex(&[v(0, 0), v(1, 0), v(1, 1), v(0, 1)], 1).unwrap());
        assert_eq!(sq.index().unwrap(), 6);
        let two = Generator::all_h(n_convex(&[v(0, 0), v(1, 0)], 1).unwrap());
        assert_eq!(two.index().unwrap(), 0);
    }

    #[test]
    fn json_labels_follow_display_order() {
        let sq = n_convex(&[v(0, 0), v(1, 0), v(1, 1), v(0, 1)], 1).unwrap();
        // Internal last edge is the (1,0) edge; it is serialized first.
        let g = Generator::new(sq, 1 << 3).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("\"labels\":[\"h\",\"e\",\"e\",\"e\"]"));
        let back: Generator = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }
}
