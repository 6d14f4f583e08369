//! Finitely supported vectors of ℓ¹(ℕ) with dyadic coefficients.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dyadic::Dyadic;

/// Sorted sparse vector. Indices are strictly increasing and no stored
/// coefficient is zero.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct FinVec {
    entries: Vec<(u64, Dyadic)>,
}

impl FinVec {
    pub fn zero() -> Self {
        FinVec { entries: Vec::new() }
    }

    /// Canonical basis vector `e_k`.
    pub fn basis(k: u64) -> Self {
        FinVec { entries: vec![(k, Dyadic::one())] }
    }

    pub fn single(k: u64, c: Dyadic) -> Self {
        Self::from_entries(vec![(k, c)])
    }

    /// Builds a vector from arbitrary `(index, coefficient)` pairs: sorts,
    /// merges repeated indices by summing, and drops zeros.
    pub fn from_entries(mut raw: Vec<(u64, Dyadic)>) -> Self {
        raw.sort_by_key(|(i, _)| *i);
        let mut entries: Vec<(u64, Dyadic)> = Vec::with_capacity(raw.len());
        for (i, c) in raw {
            match entries.last_mut() {
                Some((j, acc)) if *j == i => *acc = &*acc + &c,
                _ => entries.push((i, c)),
            }
        }
        entries.retain(|(_, c)| !c.is_zero());
        FinVec { entries }
    }

    /// Wraps entries that already satisfy the invariants.
    pub fn entries(&self) -> &[(u64, Dyadic)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(u64, Dyadic)> {
        self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Dyadic)> {
        self.entries.iter().map(|(i, c)| (*i, c))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, k: u64) -> Dyadic {
        match self.entries.binary_search_by_key(&k, |(i, _)| *i) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => Dyadic::zero(),
        }
    }

    pub fn support_max(&self) -> Option<u64> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn support_min(&self) -> Option<u64> {
        self.entries.first().map(|(i, _)| *i)
    }

    pub fn norm_l1(&self) -> Dyadic {
        self.entries.iter().map(|(_, c)| c.abs()).sum()
    }

    pub fn dist_l1(&self, other: &FinVec) -> Dyadic {
        self.sub(other).norm_l1()
    }

    pub fn add(&self, other: &FinVec) -> FinVec {
        self.merge(other, false)
    }

    /// Subtraction; coefficients that cancel are dropped immediately.
    pub fn sub(&self, other: &FinVec) -> FinVec {
        self.merge(other, true)
    }

    fn merge(&self, other: &FinVec, negate: bool) -> FinVec {
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut p, mut q) = (0, 0);
        let rhs = |c: &Dyadic| if negate { -c } else { c.clone() };
        while p < a.len() || q < b.len() {
            if q == b.len() || (p < a.len() && a[p].0 < b[q].0) {
                out.push(a[p].clone());
                p += 1;
            } else if p == a.len() || b[q].0 < a[p].0 {
                out.push((b[q].0, rhs(&b[q].1)));
                q += 1;
            } else {
                let s = if negate { &a[p].1 - &b[q].1 } else { &a[p].1 + &b[q].1 };
                if !s.is_zero() {
                    out.push((a[p].0, s));
                }
                p += 1;
                q += 1;
            }
        }
        FinVec { entries: out }
    }

    pub fn scale(&self, s: &Dyadic) -> FinVec {
        if s.is_zero() {
            return FinVec::zero();
        }
        FinVec { entries: self.entries.iter().map(|(i, c)| (*i, c * s)).collect() }
    }

    pub fn neg(&self) -> FinVec {
        FinVec { entries: self.entries.iter().map(|(i, c)| (*i, -c)).collect() }
    }

    /// Keeps the coordinates whose index satisfies `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(u64) -> bool) -> FinVec {
        FinVec { entries: self.entries.iter().filter(|(i, _)| keep(*i)).cloned().collect() }
    }

    /// Coordinates in `[lo, hi)`.
    pub fn restrict_range(&self, lo: u64, hi: u64) -> FinVec {
        let start = self.entries.partition_point(|(i, _)| *i < lo);
        let end = self.entries.partition_point(|(i, _)| *i < hi);
        FinVec { entries: self.entries[start..end].to_vec() }
    }

    /// Index shift `e_k ↦ e_{k+offset}`.
    pub fn shift(&self, offset: u64) -> FinVec {
        FinVec { entries: self.entries.iter().map(|(i, c)| (i + offset, c.clone())).collect() }
    }
}

impl fmt::Debug for FinVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (n, (i, c)) in self.entries.iter().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}·e{i}")?;
        }
        f.write_str("]")
    }
}

#[derive(Serialize, Deserialize)]
struct EntryRepr {
    i: u64,
    m: String,
    e: i64,
}

impl Serialize for FinVec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let reprs: Vec<EntryRepr> = self
            .entries
            .iter()
            .map(|(i, c)| EntryRepr { i: *i, m: c.mantissa().to_string(), e: c.exponent() })
            .collect();
        reprs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let reprs = Vec::<EntryRepr>::deserialize(d)?;
        let mut raw = Vec::with_capacity(reprs.len());
        for r in reprs {
            let m: num_bigint::BigInt = r.m.parse().map_err(serde::de::Error::custom)?;
            let c = Dyadic::try_new(m, r.e).map_err(serde::de::Error::custom)?;
            raw.push((r.i, c));
        }
        Ok(FinVec::from_entries(raw))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_examples() {
        assert_eq!(FinVec::zero().norm_l1(), Dyadic::zero());
        let x = FinVec::from_entries(vec![(0, Dyadic::one()), (5, Dyadic::new(-1, -2))]);
        assert_eq!(x.norm_l1(), Dyadic::new(5, -2));
        let eighths = FinVec::from_entries((0..8).map(|k| (k, Dyadic::new(1, -3))).collect());
        assert_eq!(eighths.norm_l1(), Dyadic::one());
    }

    #[test]
    fn distance_examples() {
        let x = FinVec::from_entries(vec![(3, Dyadic::new(7, -1)), (9, Dyadic::one())]);
        assert!(x.dist_l1(&x).is_zero());
        assert_eq!(FinVec::basis(0).dist_l1(&FinVec::basis(1)), Dyadic::from_i64(2));
        let half = FinVec::single(0, Dyadic::new(1, -1));
        assert_eq!(FinVec::basis(0).dist_l1(&half), Dyadic::new(1, -1));
    }

    #[test]
    fn subtraction_prunes_zeros() {
        let x = FinVec::from_entries(vec![(1, Dyadic::one()), (4, Dyadic::new(3, 0))]);
        let y = FinVec::from_entries(vec![(1, Dyadic::one())]);
        let d = x.sub(&y);
        assert_eq!(d.len(), 1);
        assert_eq!(d.get(4), Dyadic::new(3, 0));
        assert!(x.sub(&x).is_zero());
    }

    #[test]
    fn from_entries_merges_and_drops() {
        let v = FinVec::from_entries(vec![
            (5, Dyadic::one()),
            (2, Dyadic::new(1, -1)),
            (5, Dyadic::from_i64(-1)),
            (2, Dyadic::new(1, -1)),
        ]);
        assert_eq!(v.entries(), &[(2, Dyadic::one())]);
        assert_eq!(v.support_max(), Some(2));
    }

    #[test]
    fn json_form() {
        let v = FinVec::from_entries(vec![(0, Dyadic::one()), (5, Dyadic::new(-1, -2))]);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"[{"i":0,"m":"1","e":0},{"i":5,"m":"-1","e":-2}]"#);
        let back: FinVec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
