//! Pairwise separated sets `A(s, l)` of positive lower density.
//!
//! Interval ladder: `I_i = [c_i, 2c_i)` for `i ≥ 1`, with `c_{i+1} = 2c_i + G_{i+1}`
//! and guard gap `G_i = 2·max{s_j : j ≤ i registered}`. Interval `i` belongs to
//! parameter `j = 1 + tz(i)` (so `i ≡ 2^{j−1} mod 2^j`); inside an owned
//! interval the members form the progression `c_i + t·d_j` with
//! `d_j = next_pow2(2s_j)`.
//!
//! Separation inside an interval is `d_j ≥ 2s_j`, across intervals at least
//! the guard gap, and `c_1 ≥ max l_j` gives the floor. Since `c_{i+1} ≤ 3c_i`
//! and set `j` owns one interval in every `2^j`, the prefix density of set `j`
//! is at least `1/(2·d_j·3^{2^j})` once `N ≥ 2c_{2^{j−1}}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::certificates::Verdict;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparatedFamily {
    /// Registered `(s_j, l_j)`, `j = 1, 2, …`.
    pub pairs: Vec<(u64, u64)>,
    /// `p_j = max(s_j, l_j, p_{j−1} + 1)`.
    pub governing: Vec<u64>,
    pub strides: Vec<u64>,
    /// `c_1, c_2, …` for every interval starting below the horizon.
    pub starts: Vec<u64>,
    pub horizon: u64,
}

impl SeparatedFamily {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Owner of interval `i ≥ 1`, if registered.
    pub fn owner(&self, i: usize) -> Option<usize> {
        let j = 1 + i.trailing_zeros() as usize;
        (j <= self.pairs.len()).then_some(j)
    }

    fn check_j(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.pairs.len() {
            return Err(Error::UnknownSet(j));
        }
        Ok(())
    }

    /// `A(s_j, l_j) ∩ [0, H)`, sorted.
    pub fn members(&self, j: usize, h: u64) -> Result<Vec<u64>> {
        self.check_j(j)?;
        let d = self.strides[j - 1];
        let mut out = Vec::new();
        for (idx, &c) in self.starts.iter().enumerate() {
            if c >= h {
                break;
            }
            if self.owner(idx + 1) != Some(j) {
                continue;
            }
            let mut m = c;
            while m < 2 * c && m < h {
                out.push(m);
                m += d;
            }
        }
        Ok(out)
    }

    /// Certified lower bound `1/(2·d_j·3^{2^j})` on the prefix density.
    pub fn certified_bound(&self, j: usize) -> Result<BigRational> {
        self.check_j(j)?;
        let three_pow = num_traits::pow(BigInt::from(3), 1usize << j);
        Ok(BigRational::new(BigInt::one(), BigInt::from(2 * self.strides[j - 1]) * three_pow))
    }

    /// `N` from which the certified bound applies: `2c_{2^{j−1}}`.
    pub fn burn_in(&self, j: usize) -> Result<u64> {
        self.check_j(j)?;
        let first = 1usize << (j - 1);
        self.starts.get(first - 1).map(|c| 2 * c).ok_or_else(|| {
            Error::HorizonExhausted(format!("first interval of set {j} within the horizon"))
        })
    }
}

/// Builds the family for the given `(s, l)` pairs on `[0, H)`.
pub fn build_family(pairs: &[(u64, u64)], h: u64) -> Result<SeparatedFamily> {
    if pairs.iter().any(|&(s, _)| s == 0) {
        return Err(Error::Precondition("separation parameters s must be positive".into()));
    }
    let mut governing = Vec::with_capacity(pairs.len());
    let mut prev = 0u64;
    for &(s, l) in pairs {
        prev = s.max(l).max(prev + 1);
        governing.push(prev);
    }
    let strides: Vec<u64> = pairs.iter().map(|&(s, _)| (2 * s).next_power_of_two()).collect();
    let s_max = pairs.iter().map(|&(s, _)| s).max().unwrap_or(0);
    let mut starts = Vec::new();
    if !pairs.is_empty() {
        let mut c = governing.iter().copied().max().unwrap().max(2 * s_max).max(1);
        let mut i = 1usize;
        while c < h {
            starts.push(c);
            i += 1;
            let gap = 2 * pairs.iter().take(i).map(|&(s, _)| s).max().unwrap();
            c = c
                .checked_mul(2)
                .and_then(|v| v.checked_add(gap))
                .ok_or_else(|| Error::BudgetExceeded("interval start overflows u64".into()))?;
        }
    }
    let fam = SeparatedFamily { pairs: pairs.to_vec(), governing, strides, starts, horizon: h };
    for j in 1..=fam.len() {
        let first = 1usize << (j - 1);
        if fam.starts.len() < first {
            return Err(Error::HorizonExhausted(format!(
                "horizon {h} too small to place any member of set {j}"
            )));
        }
    }
    Ok(fam)
}

/// Checks disjointness, pairwise separation `|n − n'| ≥ s_j + s_{j'}` and the
/// floor `min A(s_j, l_j) ≥ l_j` over every pair of members below `H`. Pairs
/// farther apart than `2·max s` cannot violate separation, so each member is
/// compared with all later members inside that window.
pub fn verify_family(fam: &SeparatedFamily, h: u64) -> Result<Verdict> {
    let mut all: Vec<(u64, usize)> = Vec::new();
    for j in 1..=fam.len() {
        let m = fam.members(j, h)?;
        if let Some(&first) = m.first() {
            if first < fam.pairs[j - 1].1 {
                return Ok(Verdict::fail(format!("min A_{j} = {first} < l_{j}")));
            }
        }
        all.extend(m.into_iter().map(|n| (n, j)));
    }
    all.sort_unstable();
    let reach = 2 * fam.pairs.iter().map(|&(s, _)| s).max().unwrap_or(0);
    for (a, &(n, j)) in all.iter().enumerate() {
        for &(n2, j2) in &all[a + 1..] {
            if n2 - n >= reach {
                break;
            }
            let need = fam.pairs[j - 1].0 + fam.pairs[j2 - 1].0;
            if n2 - n < need {
                let what = if n == n2 { "shared member" } else { "separation" };
                return Ok(Verdict::fail(format!(
                    "{what}: {n} ∈ A_{j}, {n2} ∈ A_{j2}, distance {} < {need}",
                    n2 - n
                )));
            }
        }
    }
    Ok(Verdict::pass())
}

/// Prefix counts `#(A ∩ [0, N))` for `N = 1..=H`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityCurve {
    pub horizon: u64,
    pub counts: Vec<u64>,
}

impl DensityCurve {
    /// Exact density `#(A ∩ [0, N)) / N`.
    pub fn density(&self, n: u64) -> BigRational {
        BigRational::new(BigInt::from(self.counts[n as usize - 1]), BigInt::from(n))
    }

    /// Minimum density over `N ∈ [from, H]`, with the `N` attaining it.
    pub fn min_density_from(&self, from: u64) -> Option<(u64, BigRational)> {
        let mut best: Option<(u64, BigRational)> = None;
        for n in from.max(1)..=self.horizon {
            let d = self.density(n);
            if best.as_ref().is_none_or(|(_, b)| d < *b) {
                best = Some((n, d));
            }
        }
        best
    }

    /// `count/N ≥ bound` for every `N ∈ [from, H]`.
    pub fn dominates(&self, bound: &BigRational, from: u64) -> bool {
        match self.min_density_from(from) {
            Some((_, d)) => d >= *bound,
            None => true,
        }
    }
}

/// Prefix densities of a sorted set of naturals.
pub fn prefix_density(set: &[u64], h: u64) -> DensityCurve {
    let mut counts = Vec::with_capacity(h as usize);
    let mut idx = 0;
    for n in 1..=h {
        while idx < set.len() && set[idx] < n {
            idx += 1;
        }
        counts.push(idx as u64);
    }
    DensityCurve { horizon: h, counts }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pair() {
        let fam = build_family(&[(1, 1)], 10_000).unwrap();
        let m = fam.members(1, 10_000).unwrap();
        assert!(!m.is_empty());
        assert!(m[0] >= 1);
        assert_eq!(fam.strides[0], 2);
        assert!(verify_family(&fam, 10_000).unwrap().passed);
    }

    #[test]
    fn two_pairs_are_separated() {
        let fam = build_family(&[(2, 3), (2, 5)], 20_000).unwrap();
        let a = fam.members(1, 20_000).unwrap();
        let b = fam.members(2, 20_000).unwrap();
        for &x in &a {
            for &y in &b {
                assert!(x.abs_diff(y) >= 4);
            }
        }
        assert!(verify_family(&fam, 20_000).unwrap().passed);
    }

    #[test]
    fn empty_and_unknown() {
        let fam = build_family(&[], 100).unwrap();
        assert!(fam.is_empty());
        assert!(matches!(fam.members(1, 100), Err(Error::UnknownSet(1))));
        let fam = build_family(&[(3, 4)], 1000).unwrap();
        assert!(fam.members(1, 0).unwrap().is_empty());
    }

    #[test]
    fn progression_inside_interval() {
        let fam = build_family(&[(3, 2)], 5000).unwrap();
        let m = fam.members(1, 5000).unwrap();
        let c1 = fam.starts[0];
        let first: Vec<u64> = m.iter().copied().filter(|&x| x < 2 * c1).collect();
        assert!(first.windows(2).all(|w| w[1] - w[0] == 8));
    }

    #[test]
    fn horizon_too_small() {
        assert!(matches!(build_family(&[(4, 50)], 10), Err(Error::HorizonExhausted(_))));
    }

    #[test]
    fn density_examples() {
        let all: Vec<u64> = (0..100).collect();
        let c = prefix_density(&all, 100);
        assert!((1..=100).all(|n| c.density(n) == BigRational::one()));
        let even: Vec<u64> = (0..100).step_by(2).collect();
        let c = prefix_density(&even, 20);
        assert_eq!(c.density(10), BigRational::new(5.into(), 10.into()));
        assert_eq!(c.counts[1], 1);
    }

    #[test]
    fn certified_bound_holds() {
        let fam = build_family(&[(2, 2), (3, 5)], 50_000).unwrap();
        for j in 1..=2 {
            let m = fam.members(j, 50_000).unwrap();
            let curve = prefix_density(&m, 50_000);
            let bound = fam.certified_bound(j).unwrap();
            assert!(curve.dominates(&bound, fam.burn_in(j).unwrap()), "j={j}");
        }
    }
}
