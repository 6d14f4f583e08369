//! Gain thresholds, τ synthesis, and return scarcity of inverse orbits.

use serde::Serialize;

use crate::certificates::GainTable;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::finvec::FinVec;
use crate::operator::OperatorSpec;
use crate::schedule::{phi, BlockStructure};

pub use crate::certificates::{inverse_orbit_growth, GrowthCurve};

/// Upper limit on the gain scan length of one block.
const GAIN_SCAN_LIMIT: u64 = 1 << 32;

/// `S_l = Σ_{l'≤l} (2(b_{l'+1} − b_{l'}) + l')`.
pub fn compute_s(blocks: &BlockStructure, l: usize) -> i64 {
    (0..=l).map(|k| 2 * blocks.big_delta_n(k) as i64 + k as i64).sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GainCertificate {
    pub block: usize,
    pub s: i64,
    /// Smallest `J ≥ 1` with `g(j) ≥ 2^{S_l}` for every `j ≥ J`.
    pub j: u64,
    /// Window `[lo, hi)` checked exhaustively after the last failure.
    pub window_checked: (u64, u64),
    pub period: u64,
    pub period_factor_log2: i64,
}

/// Certifies `J_l`. Gains are scanned until `2Δ` consecutive values clear
/// `2^{S_l}`; since `g(j + 2Δ) = 2^{2η} g(j)` every later value clears it too.
/// The map `P_l T^{−j} P_l` only involves the weights of block `l` and the
/// recurrent coefficient `−1`, so `J_l` does not depend on `τ`.
pub fn certify_j(blocks: &BlockStructure, l: usize) -> Result<GainCertificate> {
    let s = compute_s(blocks, l);
    let table = GainTable::new(blocks, l);
    let period = 2 * table.len();
    let mut last_fail: Option<u64> = None;
    let mut j = 0u64;
    loop {
        if table.min_gain(j) < s {
            last_fail = Some(j);
        }
        let clear_from = last_fail.map_or(0, |f| f + 1);
        if j + 1 - clear_from >= period {
            let jl = clear_from.max(1);
            return Ok(GainCertificate {
                block: l,
                s,
                j: jl,
                window_checked: (clear_from, clear_from + period),
                period,
                period_factor_log2: 2 * blocks.eta_n(l) as i64,
            });
        }
        j += 1;
        if j > GAIN_SCAN_LIMIT {
            return Err(Error::BudgetExceeded(format!("gain scan for block {l}")));
        }
    }
}

/// Which lower bound fixed a synthesized `τ_l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Binding {
    /// `τ_l ≥ S_l + 2η_l + δ_l + 2l + 3`.
    Interior,
    /// `J_l / (τ_l − l − S_l − δ_l − 3) ≤ 2^{−l}`.
    GainRatio,
    /// `τ_l ≥ τ_{l−1} + 1`.
    Monotone,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TauEntry {
    pub l: usize,
    pub tau: i64,
    pub s: i64,
    pub j: u64,
    pub binding: Binding,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TauSchedule {
    pub entries: Vec<TauEntry>,
}

impl TauSchedule {
    pub fn values(&self) -> Vec<i64> {
        self.entries.iter().map(|e| e.tau).collect()
    }

    /// Substitutes every value back into both inequalities and monotonicity.
    pub fn verify(&self, blocks: &BlockStructure) -> bool {
        self.entries.iter().enumerate().all(|(i, e)| {
            let l = e.l as i64;
            let delta = blocks.delta_n(e.l) as i64;
            let eta = blocks.eta_n(e.l) as i64;
            let interior = e.tau >= e.s + 2 * eta + delta + 2 * l + 3;
            let denom = e.tau - l - e.s - delta - 3;
            // J / denom ≤ 2^{-l}  ⇔  2^l J ≤ denom
            let ratio = denom > 0
                && (e.j as i128) << e.l <= denom as i128;
            let monotone = i == 0 || e.tau > self.entries[i - 1].tau;
            interior && ratio && monotone && e.tau > 0
        })
    }
}

fn to_i64(v: i128) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::BudgetExceeded("τ overflows i64".into()))
}

/// Smallest strictly increasing positive `(τ_l)_{l≤L}` satisfying both lower
/// bounds, each value tagged with the constraint that fixed it.
pub fn synthesize_tau(blocks: &BlockStructure, l_max: usize) -> Result<TauSchedule> {
    if l_max >= blocks.nblocks() {
        return Err(Error::HorizonExceeded { index: l_max as u64, limit: blocks.nblocks() as u64 });
    }
    let mut entries: Vec<TauEntry> = Vec::with_capacity(l_max + 1);
    for l in 0..=l_max {
        let cert = certify_j(blocks, l)?;
        let s = cert.s as i128;
        let (delta, eta, li) = (blocks.delta_n(l) as i128, blocks.eta_n(l) as i128, l as i128);
        let interior = s + 2 * eta + delta + 2 * li + 3;
        let shift = u32::try_from(l).ok().filter(|&b| b < 100).ok_or_else(|| {
            Error::BudgetExceeded(format!("2^{l} J_l overflows"))
        })?;
        let gain = (cert.j as i128)
            .checked_shl(shift)
            .filter(|v| v >> shift == cert.j as i128)
            .ok_or_else(|| Error::BudgetExceeded(format!("2^{l} J_l overflows")))?
            + li
            + s
            + delta
            + 3;
        let monotone = entries.last().map_or(1, |e| e.tau as i128 + 1);
        let (tau, binding) = [
            (interior, Binding::Interior),
            (gain, Binding::GainRatio),
            (monotone, Binding::Monotone),
        ]
        .into_iter()
        .fold((i128::MIN, Binding::Interior), |best, c| if c.0 > best.0 { c } else { best });
        entries.push(TauEntry { l, tau: to_i64(tau)?, s: cert.s, j: cert.j, binding });
    }
    Ok(TauSchedule { entries })
}

/// One step of the descent through `φ`-preimages used to bound return
/// frequencies of inverse orbits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainRecord {
    pub l: usize,
    pub j: u64,
    pub s: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScarcityTrace {
    pub anchor_block: usize,
    pub horizon: u64,
    /// `‖P_{l₀} x‖`.
    pub anchor_norm: Dyadic,
    /// Number of `j < H` with `‖T^{−j}x‖ ≥ ¾‖P_{l₀}x‖`.
    pub count: u64,
    pub fraction: f64,
    pub chain: Vec<ChainRecord>,
    /// `‖T^{−j}x‖` for `j < H`.
    #[serde(skip)]
    pub norms: Vec<Dyadic>,
}

/// Smallest `l ≥ 1` with `‖P_l x‖ ≥ 2^{−l} ‖x − P_0 x‖`.
pub fn anchor_block(spec: &OperatorSpec, x: &FinVec) -> Result<usize> {
    let rest = x.restrict_range(spec.b(1), u64::MAX);
    if rest.is_zero() {
        return Err(Error::AnchorUndefined);
    }
    let total = rest.norm_l1();
    let top = spec.blocks().block_of(rest.support_max().unwrap())?;
    for l in 1..=top {
        let pl = spec.proj_block(x, l).norm_l1();
        if pl >= total.checked_mul_pow2(-(l as i64))? {
            return Ok(l);
        }
    }
    unreachable!("the block norms of x − P_0 x sum to its norm")
}

/// Blocks `n ≠ 0` with `φ^s(n) = l`, grouped by `s ≥ 1`.
fn descendants(nblocks: usize, l: usize) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for n in 1..nblocks {
        let (mut cur, mut s) = (n, 0usize);
        while cur > l {
            cur = phi(cur);
            s += 1;
        }
        if cur == l && s >= 1 {
            if groups.len() < s {
                groups.resize(s, Vec::new());
            }
            groups[s - 1].push(n);
        }
    }
    groups
}

/// Exact return statistics of the inverse orbit of `x` over `j < H`.
///
/// The chain `(l_m, j_m, s_m)` is extracted greedily while `j_m < H`:
/// `j_m` is the first `j` at which the inflow from the `φ`-descendants of
/// `l_{m−1}` exceeds a quarter of `‖P_{l_{m−1}} T^{−j} P_{l_{m−1}} x‖`, `s_m`
/// the smallest depth carrying more than `2^{−(s+2)}` of it, and `l_m` the
/// smallest block of that depth carrying more than `2^{−(l+s+3)}`.
pub fn scarcity_profile(
    spec: &OperatorSpec,
    x: &FinVec,
    horizon: u64,
    max_chain: usize,
) -> Result<ScarcityTrace> {
    spec.inverse_supported()?;
    let l0 = anchor_block(spec, x)?;
    let anchor_norm = spec.proj_block(x, l0).norm_l1();
    let threshold = anchor_norm.checked_mul(&Dyadic::new(3, -2))?;
    let mut norms = Vec::with_capacity(horizon as usize);
    let mut count = 0u64;
    let mut cur = x.clone();
    for j in 0..horizon {
        let v = cur.norm_l1();
        if v >= threshold {
            count += 1;
        }
        norms.push(v);
        if j + 1 < horizon {
            cur = spec.apply_t_inv(&cur)?;
        }
    }
    let chain = extract_chain(spec, x, l0, horizon, max_chain)?;
    let fraction = if horizon == 0 { 0.0 } else { count as f64 / horizon as f64 };
    Ok(ScarcityTrace { anchor_block: l0, horizon, anchor_norm, count, fraction, chain, norms })
}

fn extract_chain(
    spec: &OperatorSpec,
    x: &FinVec,
    l0: usize,
    horizon: u64,
    max_chain: usize,
) -> Result<Vec<ChainRecord>> {
    let mut chain = Vec::new();
    let mut l = l0;
    while chain.len() < max_chain {
        let groups = descendants(spec.nblocks(), l);
        if groups.is_empty() {
            break;
        }
        let mut own = spec.proj_block(x, l);
        let mut inflow: Vec<Vec<FinVec>> = groups
            .iter()
            .map(|g| g.iter().map(|&n| spec.proj_block(x, n)).collect())
            .collect();
        let mut found = None;
        for j in 0..horizon {
            let own_norm = spec.proj_block(&own, l).norm_l1();
            let per_block: Vec<Vec<Dyadic>> = inflow
                .iter()
                .map(|g| g.iter().map(|v| spec.proj_block(v, l).norm_l1()).collect())
                .collect();
            let total: Dyadic = per_block.iter().flatten().cloned().sum();
            if total > own_norm.checked_mul_pow2(-2)? {
                found = Some((j, own_norm, per_block));
                break;
            }
            own = spec.apply_t_inv(&own)?;
            for g in inflow.iter_mut() {
                for v in g.iter_mut() {
                    *v = spec.apply_t_inv(v)?;
                }
            }
        }
        let Some((j, own_norm, per_block)) = found else {
            break;
        };
        let mut next = None;
        for (si, blocks_norms) in per_block.iter().enumerate() {
            let s = si as i64 + 1;
            let depth_total: Dyadic = blocks_norms.iter().cloned().sum();
            if depth_total > own_norm.checked_mul_pow2(-(s + 2))? {
                let pick = groups[si].iter().zip(blocks_norms).find_map(|(&n, v)| {
                    let bound = own_norm.checked_mul_pow2(-(n as i64 + s + 3)).ok()?;
                    (*v > bound).then_some(n)
                });
                if let Some(n) = pick {
                    next = Some((n, s as u32));
                    break;
                }
            }
        }
        let Some((n, s)) = next else {
            break;
        };
        chain.push(ChainRecord { l: n, j, s });
        l = n;
    }
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::gain_profile;
    use crate::schedule::{derive_structure, Schedule, TauSpec};

    fn canonical_blocks() -> BlockStructure {
        derive_structure(&Schedule::canonical(TauSpec::affine(1, 22), 2)).unwrap().blocks().clone()
    }

    #[test]
    fn s_values() {
        let b = canonical_blocks();
        assert_eq!(compute_s(&b, 0), 16);
        assert_eq!(compute_s(&b, 1), 145);
        assert!(compute_s(&b, 2) > compute_s(&b, 1));
    }

    #[test]
    fn j_zero_matches_scan() {
        let b = canonical_blocks();
        let cert = certify_j(&b, 0).unwrap();
        assert!(cert.j <= 136);
        let p = gain_profile(&b, 0, 160);
        let last_fail = p.gains_log2.iter().rposition(|&g| g < 16).unwrap() as u64;
        assert_eq!(cert.j, last_fail + 1);
    }

    #[test]
    fn tau_synthesis_first_value() {
        let b = canonical_blocks();
        let t = synthesize_tau(&b, 2).unwrap();
        let j0 = certify_j(&b, 0).unwrap().j as i64;
        assert_eq!(t.entries[0].tau, 22.max(j0 + 20));
        assert!(t.verify(&b));
        assert!(t.values().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn anchor_requires_mass_outside_first_block() {
        let t = derive_structure(&Schedule::canonical(TauSpec::affine(1, 22), 2)).unwrap();
        assert!(matches!(anchor_block(&t, &FinVec::zero()), Err(Error::AnchorUndefined)));
        assert!(matches!(anchor_block(&t, &FinVec::basis(3)), Err(Error::AnchorUndefined)));
        assert_eq!(anchor_block(&t, &FinVec::basis(8)).unwrap(), 1);
    }

    #[test]
    fn descendant_groups() {
        let g = descendants(8, 1);
        assert_eq!(g, vec![vec![3, 5], vec![7]]);
        let g0 = descendants(4, 0);
        assert_eq!(g0, vec![vec![1, 2], vec![3]]);
    }
}
