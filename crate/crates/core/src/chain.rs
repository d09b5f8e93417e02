//! Finitely supported combinations of generators.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt::Debug;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize};

use crate::generator::Generator;

/// Coefficient ring for chains.
pub trait Coefficient: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn from_i64(x: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl Coefficient for i64 {
    fn zero() -> Self {
        0
    }
    fn from_i64(x: i64) -> Self {
        x
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add_assign(&mut self, other: &Self) {
        *self = self.checked_add(*other).expect("chain coefficient overflow");
    }
    fn mul(&self, other: &Self) -> Self {
        self.checked_mul(*other).expect("chain coefficient overflow")
    }
    fn neg(&self) -> Self {
        -*self
    }
}

/// Integer Laurent polynomial in one variable `t`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Laurent {
    pub laurent: BTreeMap<i32, i64>,
}

impl Laurent {
    /// `c * t^e`.
    pub fn monomial(c: i64, e: i32) -> Laurent {
        let mut l = Laurent::default();
        if c != 0 {
            l.laurent.insert(e, c);
        }
        l
    }

    /// `1 - t`.
    pub fn one_minus_t() -> Laurent {
        let mut l = Laurent::monomial(1, 0);
        l.laurent.insert(1, -1);
        l
    }
}

impl Coefficient for Laurent {
    fn zero() -> Self {
        Laurent::default()
    }
    fn from_i64(x: i64) -> Self {
        Laurent::monomial(x, 0)
    }
    fn is_zero(&self) -> bool {
        self.laurent.is_empty()
    }
    fn add_assign(&mut self, other: &Self) {
        for (&e, &c) in &other.laurent {
            let slot = self.laurent.entry(e).or_insert(0);
            *slot = slot.checked_add(c).expect("laurent coefficient overflow");
            if *slot == 0 {
                self.laurent.remove(&e);
            }
        }
    }
    fn mul(&self, other: &Self) -> Self {
        let mut out = Laurent::default();
        for (&e1, &c1) in &self.laurent {
            for (&e2, &c2) in &other.laurent {
                out.add_assign(&Laurent::monomial(c1.checked_mul(c2).expect("laurent coefficient overflow"), e1 + e2));
            }
        }
        out
    }
    fn neg(&self) -> Self {
        Laurent { laurent: self.laurent.iter().map(|(&e, &c)| (e, -c)).collect() }
    }
}

/// A chain with coefficients in `C`; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain<C: Coefficient = i64> {
    terms: BTreeMap<Generator, C>,
}

impl<C: Coefficient> Default for Chain<C> {
    fn default() -> Self {
        Chain { terms: BTreeMap::new() }
    }
}

impl<C: Coefficient> Chain<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(g: Generator, c: C) -> Self {
        let mut ch = Self::zero();
        ch.add_term(g, c);
        ch
    }

    pub fn add_term(&mut self, g: Generator, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(g) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_assign(&c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_chain(&mut self, other: &Chain<C>) {
        for (g, c) in &other.terms {
            self.add_term(g.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Chain<C>, k: &C) {
        for (g, c) in &other.terms {
            self.add_term(g.clone(), c.mul(k));
        }
    }

    pub fn scaled(&self, k: &C) -> Chain<C> {
        let mut out = Chain::zero();
        out.add_scaled(self, k);
        out
    }

    pub fn neg(&self) -> Chain<C> {
        Chain { terms: self.terms.iter().map(|(g, c)| (g.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, other: &Chain<C>) -> Chain<C> {
        let mut out = self.clone();
        out.add_chain(&other.neg());
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, g: &Generator) -> C {
        self.terms.get(g).cloned().unwrap_or_else(C::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Generator, &C)> {
        self.terms.iter()
    }

    /// Linear extension of a map defined on generators.
    pub fn map<F>(&self, f: F) -> Chain<C>
    where
        F: Fn(&Generator) -> Chain<C>,
    {
        let mut out = Chain::zero();
        for (g, c) in &self.terms {
            out.add_scaled(&f(g), c);
        }
        out
    }
}

impl Chain<i64> {
    /// Linear extension of an integer map into Laurent chains.
    pub fn to_laurent(&self) -> Chain<Laurent> {
        let mut out = Chain::zero();
        for (g, &c) in &self.terms {
            out.add_term(g.clone(), Laurent::from_i64(c));
        }
        out
    }
}

impl<C: Coefficient> FromIterator<(Generator, C)> for Chain<C> {
    fn from_iter<I: IntoIterator<Item = (Generator, C)>>(iter: I) -> Self {
        let mut ch = Chain::zero();
        for (g, c) in iter {
            ch.add_term(g, c);
        }
        ch
    }
}

#[derive(Serialize, Deserialize)]
struct Term<C, G> {
    coefficient: C,
    generator: G,
}

impl<C: Coefficient + Serialize> Serialize for Chain<C> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (g, c) in &self.terms {
            seq.serialize_element(&Term { coefficient: c, generator: g })?;
        }
        seq.end()
    }
}

impl<'de, C: Coefficient + Deserialize<'de>> Deserialize<'de> for Chain<C> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let terms: Vec<Term<C, Generator>> = Vec::deserialize(d)?;
        Ok(terms.into_iter().map(|t| (t.generator, t.coefficient)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::v;
    use crate::path::AdmissiblePath;

    #[test]
    fn cancellation_removes_terms() {
        let g = Generator::all_e(AdmissiblePath::point(v(0, 0), 1).unwrap());
        let mut c = Chain::single(g.clone(), 2i64);
        c.add_term(g.clone(), -2);
        assert!(c.is_zero());
        let mut l = Chain::single(g.clone(), Laurent::one_minus_t());
        l.add_term(g, Laurent::monomial(-1, 0));
        assert_eq!(l.len(), 1);
    }

    #[test]
    fn chain_json_round_trip() {
        let g = Generator::all_e(AdmissiblePath::point(v(1, 2), 1).unwrap());
        let c = Chain::single(g.clone(), 3i64);
        let back: Chain<i64> = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        let l = Chain::single(g, Laurent::one_minus_t());
        let s = serde_json::to_string(&l).unwrap();
        assert!(s.contains("\"laurent\""));
        let back: Chain<Laurent> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, l);
    }
}
