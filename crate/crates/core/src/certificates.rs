//! Exact verifiers and finite certificates for the operator's quantitative
//! properties: eigen-periodicity of blocks, section periodicity,
//! invertibility hypotheses, orbit decay, and inverse-orbit bounds.
//!
//! Every "for all k" claim is reduced to one exhaustive period window plus an
//! exact per-period scalar.

use rayon::prelude::*;
use serde::Serialize;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::finvec::FinVec;
use crate::operator::{OperatorSpec, RMode};
use crate::schedule::{gen_start, m_depth, phi, validate_tau, BlockStructure};

/// Outcome of a single exact check, with a witness on failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict { passed: true, witness: None }
    }

    pub fn fail(witness: impl Into<String>) -> Self {
        Verdict { passed: false, witness: Some(witness.into()) }
    }
}

/// The decay exponent `η^(0) / (3Δ^(0))` as an unreduced fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct Slope {
    pub num: i64,
    pub den: u64,
}

impl Slope {
    pub fn of(blocks: &BlockStructure) -> Self {
        let g = blocks.generations()[0];
        Slope { num: g.eta as i64, den: 3 * g.big_delta }
    }

    /// Whether `v ≤ 2^{−slope·k}`, exactly.
    pub fn bound_holds(&self, v: &Dyadic, k: u64) -> bool {
        v.le_pow2_ratio(-self.num * k as i64, self.den)
    }

    pub fn reduced(&self) -> (i64, u64) {
        let g = num_integer::gcd(self.num.unsigned_abs(), self.den);
        (self.num / g as i64, self.den / g)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// `T^{2Δ_n} e_k = (R_n⁻¹W_n)² e_k` for the given coordinates `k` of block
/// `n`, computed by single steps. The compatibility relation was already
/// enforced when the operator was built.
pub fn check_eigen_period(spec: &OperatorSpec, n: usize, ks: &[u64]) -> Result<Verdict> {
    let (lo, hi) = (spec.b(n), spec.b(n + 1));
    let period = 2 * spec.blocks().big_delta_n(n) as i64;
    let base = spec.period_base(n);
    let scalar = base.checked_mul(&base)?;
    let failures: Vec<String> = ks
        .par_iter()
        .map(|&k| -> Result<Option<String>> {
            if k < lo || k >= hi {
                return Err(Error::Precondition(format!("e_{k} is not in block {n}")));
            }
            let e = FinVec::basis(k);
            let got = spec.apply_t_iter(&e, period)?;
            let want = e.scale(&scalar);
            Ok((got != want).then(|| format!("T^{period} e_{k} = {got:?}, expected {want:?}")))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(match failures.into_iter().next() {
        None => Verdict::pass(),
        Some(w) => Verdict::fail(w),
    })
}

/// `T^{2Δ_n} x = 2^{−2η_n} x` for `x ∈ span{e_k : k < b_{n+1}}`, by single steps.
pub fn check_section_period(spec: &OperatorSpec, x: &FinVec, n: usize) -> Result<Verdict> {
    if *spec.r_mode() != RMode::Unit {
        return Err(Error::Precondition("section periodicity is stated for R = 1".into()));
    }
    if let Some(top) = x.support_max() {
        if top >= spec.b(n + 1) {
            return Err(Error::Precondition(format!(
                "support index {top} outside [0, b_{}) = [0, {})",
                n + 1,
                spec.b(n + 1)
            )));
        }
    }
    let period = 2 * spec.blocks().big_delta_n(n) as i64;
    let got = spec.apply_t_iter(x, period)?;
    let want = x.scale(&Dyadic::pow2(-2 * spec.blocks().eta_n(n) as i64));
    Ok(if got == want {
        Verdict::pass()
    } else {
        Verdict::fail(format!("T^{period} x = {got:?}, expected {want:?}"))
    })
}

/// Invertibility hypotheses up to index `l_max`: `τ` strictly increasing and
/// positive, `R = 1`, `sup_{n∈φ⁻¹(m)} |v_n| = 2^{−τ_m} ≤ 2^{−m}`, and
/// `Σ_{m<m_l} Π_{s≤m} |v_{φ^s(l)}| ≤ 2`.
pub fn check_invertibility(spec: &OperatorSpec, l_max: usize) -> Result<Verdict> {
    let upto = (l_max + 1).min(spec.nblocks());
    if let Err(e) = validate_tau(&spec.taus()[..upto]) {
        return Ok(Verdict::fail(e.to_string()));
    }
    if *spec.r_mode() != RMode::Unit {
        return Ok(Verdict::fail("R_n = 1 fails"));
    }
    for m in 0..upto {
        if spec.tau(m) < m as i64 {
            return Ok(Verdict::fail(format!("2^-τ_{m} ≤ 2^-{m} fails: τ_{m} = {}", spec.tau(m))));
        }
    }
    let two = Dyadic::from_i64(2);
    for l in 0..upto {
        let sum = chain_sum(spec, l)?;
        if sum > two {
            return Ok(Verdict::fail(format!("chain sum at l={l} is {sum} > 2")));
        }
    }
    Ok(Verdict::pass())
}

/// `Σ_{m=0}^{m_l−1} Π_{s=0}^{m} |v_{φ^s(l)}|`.
pub fn chain_sum(spec: &OperatorSpec, l: usize) -> Result<Dyadic> {
    let mut sum = Dyadic::zero();
    let mut prod = 0i64;
    let mut cur = l;
    for _ in 0..m_depth(l) {
        prod += spec.v_log2(cur);
        sum = sum.checked_add(&Dyadic::pow2(prod))?;
        cur = phi(cur);
    }
    Ok(sum)
}

/// Norms `‖T^k y‖` for `k ∈ [start, start + len)`.
pub fn orbit_norms(spec: &OperatorSpec, y: &FinVec, start: u64, len: u64) -> Result<Vec<Dyadic>> {
    let mut cur = spec.apply_t_power(y, start as i64)?;
    let mut out = Vec::with_capacity(len as usize);
    for step in 0..len {
        out.push(cur.norm_l1());
        if step + 1 < len {
            cur = spec.apply_t(&cur)?;
        }
    }
    Ok(out)
}

/// Certificate that `‖T^k y‖ ≤ 2^{−slope·k}` for every `k ≥ k0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecayCertificate {
    pub rate_num: i64,
    pub rate_den: u64,
    pub k0: u64,
    /// Exhaustively checked steps `[k0, k0 + period)`.
    pub window_checked: (u64, u64),
    pub period: u64,
    /// `log2` of the scalar `T^period` acts by on the section holding `y`.
    pub period_scalar_log2: i64,
}

fn section_period(spec: &OperatorSpec, y: &FinVec) -> Result<(u64, i64)> {
    if *spec.r_mode() != RMode::Unit {
        return Err(Error::Precondition("decay certificates are stated for R = 1".into()));
    }
    let n = match y.support_max() {
        Some(top) => spec.blocks().block_of(top)?,
        None => 0,
    };
    Ok((2 * spec.blocks().big_delta_n(n), -2 * spec.blocks().eta_n(n) as i64))
}

/// Smallest `k0` with the decay bound holding from `k0` on.
///
/// Along each residue class `r + tP` the ratio of `‖T^k y‖` to the bound is
/// multiplied by `2^{−2η + slope·P} < 1` per period, so the failing steps of a
/// class form an initial run whose length is found exactly. The resulting
/// `k0` is then re-verified on the window `[k0, k0 + P)` from a fresh orbit.
pub fn decay_certificate_vec(spec: &OperatorSpec, y: &FinVec) -> Result<DecayCertificate> {
    let slope = Slope::of(spec.blocks());
    let (period, scalar_log2) = section_period(spec, y)?;
    let cert = |k0| DecayCertificate {
        rate_num: slope.num,
        rate_den: slope.den,
        k0,
        window_checked: (k0, k0 + period),
        period,
        period_scalar_log2: scalar_log2,
    };
    if y.is_zero() {
        return Ok(cert(0));
    }
    // per-period gain of the bound relative to the orbit, in units of 1/den
    let margin = -scalar_log2 * slope.den as i64 - slope.num * period as i64;
    if margin <= 0 {
        return Err(Error::Precondition("per-period factor does not beat the decay rate".into()));
    }
    let norms = orbit_norms(spec, y, 0, period)?;
    let fails = |r: u64, t: u64| -> Result<bool> {
        let v = norms[r as usize].checked_mul_pow2(scalar_log2 * t as i64)?;
        Ok(!slope.bound_holds(&v, r + t * period))
    };
    let mut k0 = 0u64;
    for r in 0..period {
        if !fails(r, 0)? {
            continue;
        }
        // estimate the crossing, then settle it exactly
        let lhs = norms[r as usize].magnitude_bits() as f64 * slope.den as f64
            + (slope.num * r as i64) as f64;
        let mut t = (lhs / margin as f64).floor().max(1.0) as u64;
        while t > 1 && fails(r, t - 1)? {
            t -= 1;
        }
        while fails(r, t)? {
            t += 1;
        }
        k0 = k0.max(r + (t - 1) * period + 1);
    }
    let window = orbit_norms(spec, y, k0, period)?;
    for (off, v) in window.iter().enumerate() {
        let k = k0 + off as u64;
        if !slope.bound_holds(v, k) {
            return Err(Error::Precondition(format!("decay window re-check failed at k={k}")));
        }
    }
    Ok(cert(k0))
}

/// Whether `‖T^k y‖ ≤ 2^{−slope·k}` holds for every `k ≥ 0`: one period
/// checked step by step, stopping at the first failure.
pub fn decays_from_zero(spec: &OperatorSpec, y: &FinVec) -> Result<bool> {
    let slope = Slope::of(spec.blocks());
    let (period, scalar_log2) = section_period(spec, y)?;
    if -scalar_log2 * (slope.den as i64) <= slope.num * period as i64 {
        return Err(Error::Precondition("per-period factor does not beat the decay rate".into()));
    }
    let mut cur = y.clone();
    for k in 0..period {
        if !slope.bound_holds(&cur.norm_l1(), k) {
            return Ok(false);
        }
        cur = spec.apply_t(&cur)?;
    }
    Ok(true)
}

/// Recomputes `‖T^k y‖ ≤ 2^{−slope·k}` from scratch.
pub fn decay_holds_at(spec: &OperatorSpec, y: &FinVec, k: u64) -> Result<bool> {
    let v = spec.apply_t_power(y, k as i64)?.norm_l1();
    Ok(Slope::of(spec.blocks()).bound_holds(&v, k))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BasisDecayCertificate {
    /// Generation `K` found by the search.
    pub generation: usize,
    /// Blocks `[n_K, n_K + N)` whose first basis vectors decay from step 0.
    pub blocks: (usize, usize),
    /// `C = sup_{m≤N} sup_{j<2Δ_m} ‖T^j e_{b_m}‖`.
    pub c_sup: Dyadic,
    /// Whether `2^{η^(K)/3} > C + 1`, the sufficient condition used in the
    /// existence argument; reported, not required.
    pub growth_condition: bool,
}

/// Smallest generation `K ≥ K0` with `n_{K+1} − n_K > N` such that
/// `‖T^k e_{b_n}‖ ≤ 2^{−slope·k}` for every `k ≥ 0` and every
/// `n ∈ [n_K, n_K + N)`.
pub fn decay_certificate_basis(
    spec: &OperatorSpec,
    k_start: usize,
    n_count: usize,
) -> Result<BasisDecayCertificate> {
    let blocks = spec.blocks();
    let mut c_sup = Dyadic::zero();
    for m in 0..=n_count.min(spec.nblocks() - 1) {
        let len = 2 * blocks.big_delta_n(m);
        for v in orbit_norms(spec, &FinVec::basis(spec.b(m)), 0, len)? {
            c_sup = c_sup.max(v);
        }
    }
    for k in k_start..=blocks.k_max() {
        let first = gen_start(k);
        if gen_start(k + 1) - first <= n_count || first + n_count > spec.nblocks() {
            continue;
        }
        let all = (first..first + n_count)
            .into_par_iter()
            .map(|n| decays_from_zero(spec, &FinVec::basis(spec.b(n))))
            .collect::<Result<Vec<bool>>>()?;
        if all.into_iter().all(|ok| ok) {
            let c1 = c_sup.checked_add(&Dyadic::one())?;
            let cube = c1.checked_pow(3)?;
            let growth_condition = cube < Dyadic::pow2(blocks.generations()[k].eta as i64);
            return Ok(BasisDecayCertificate {
                generation: k,
                blocks: (first, first + n_count),
                c_sup,
                growth_condition,
            });
        }
    }
    Err(Error::HorizonExhausted(format!(
        "a generation K ≥ {k_start} whose first {n_count} blocks decay from step 0"
    )))
}

/// `‖T⁻¹x‖ ≤ 2‖x‖`.
pub fn check_inv_contraction(spec: &OperatorSpec, x: &FinVec) -> Result<Verdict> {
    let lhs = spec.apply_t_inv(x)?.norm_l1();
    let rhs = x.norm_l1().checked_mul_pow2(1)?;
    Ok(if lhs <= rhs {
        Verdict::pass()
    } else {
        Verdict::fail(format!("‖T⁻¹x‖ = {lhs} > 2‖x‖ = {rhs}"))
    })
}

/// `‖P_l T^{−j} P_n x‖ ≤ 2^{j − τ_{l+s−1}} ‖P_n x‖` for `n ∈ φ^{−s}(l) \ {0}`.
pub fn cross_block_bound(
    spec: &OperatorSpec,
    l: usize,
    s: u32,
    n: usize,
    j: u64,
    x: &FinVec,
) -> Result<Verdict> {
    let mut anc = n;
    for _ in 0..s {
        anc = phi(anc);
    }
    if s == 0 || n == 0 || anc != l || n >= spec.nblocks() {
        return Err(Error::Precondition(format!("block {n} is not in φ^-{s}({l}) \\ {{0}}")));
    }
    let idx = l + s as usize - 1;
    if idx >= spec.nblocks() {
        return Err(Error::HorizonExceeded { index: idx as u64, limit: spec.nblocks() as u64 });
    }
    let pn = spec.proj_block(x, n);
    let lhs = spec.proj_block(&spec.apply_t_power(&pn, -(j as i64))?, l).norm_l1();
    let rhs = pn.norm_l1().checked_mul_pow2(j as i64 - spec.tau(idx))?;
    Ok(if lhs <= rhs {
        Verdict::pass()
    } else {
        Verdict::fail(format!("j={j}: ‖P_{l} T^-j P_{n} x‖ = {lhs} > {rhs}"))
    })
}

/// Minimum gains of the monomial map `P_l T^{−j} P_l` for `j ≤ j_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GainProfile {
    pub block: usize,
    pub period: u64,
    pub period_factor_log2: i64,
    /// `log2 g(j)` for `j = 0..=j_max`.
    pub gains_log2: Vec<i64>,
    /// `g(j) ≥ 2^{η⌊j/Δ⌋ − δ}` for every computed `j`.
    pub floor_holds: bool,
    /// `g(j + 2Δ) = 2^{2η} g(j)` wherever both sides were computed.
    pub period_relation_holds: bool,
}

/// Per-start-offset gain table for block `l`.
///
/// On block `l` the map `P_l T^{−1} P_l` sends `e_{b_l+q}` to
/// `w_{b_l+q}⁻¹ e_{b_l+q−1}` for `q ≥ 1` and `e_{b_l}` to `−e_{b_{l+1}−1}`; the
/// remaining terms of `T⁻¹ e_{b_l}` land in earlier blocks and never return.
/// With `A[q] = −Σ_{t≤q} log2 w_{b_l+t}`, starting from offset `o`:
/// `G_o(j) = A[o] − A[o−j]` for `j ≤ o`, and otherwise, with `j' = j − o − 1`,
/// `G_o(j) = A[o] + ⌊j'/Δ⌋η + A[Δ−1] − A[Δ−1−(j' mod Δ)]`.
pub struct GainTable {
    prefix: Vec<i64>,
    eta: i64,
}

impl GainTable {
    pub fn new(blocks: &BlockStructure, l: usize) -> Self {
        let len = blocks.big_delta_n(l);
        let prefix = (0..len).map(|q| -blocks.weight_prefix_log2(l, q)).collect();
        GainTable { prefix, eta: blocks.eta_n(l) as i64 }
    }

    pub fn len(&self) -> u64 {
        self.prefix.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty()
    }

    /// `log2` of the coefficient magnitude of `P_l T^{−j} e_{b_l+o}`.
    pub fn gain_from(&self, o: u64, j: u64) -> i64 {
        let a = &self.prefix;
        let o_i = o as usize;
        if j <= o {
            return a[o_i] - a[(o - j) as usize];
        }
        let len = self.len();
        let rest = j - o - 1;
        let r = (rest % len) as usize;
        let last = a.len() - 1;
        a[o_i] + (rest / len) as i64 * self.eta + a[last] - a[last - r]
    }

    /// `log2 g(j)`, the minimum over all start offsets.
    pub fn min_gain(&self, j: u64) -> i64 {
        (0..self.len()).map(|o| self.gain_from(o, j)).min().unwrap()
    }
}

pub fn gain_profile(blocks: &BlockStructure, l: usize, j_max: u64) -> GainProfile {
    let table = GainTable::new(blocks, l);
    let g = blocks.generation(l);
    let gains: Vec<i64> = (0..=j_max).into_par_iter().map(|j| table.min_gain(j)).collect();
    let floor_holds = gains
        .iter()
        .enumerate()
        .all(|(j, &v)| v >= g.eta as i64 * (j as u64 / g.big_delta) as i64 - g.delta as i64);
    let period = 2 * g.big_delta;
    let factor = 2 * g.eta as i64;
    let period_relation_holds = (0..gains.len())
        .filter(|&j| j + (period as usize) < gains.len())
        .all(|j| gains[j + period as usize] == gains[j] + factor);
    GainProfile {
        block: l,
        period,
        period_factor_log2: factor,
        gains_log2: gains,
        floor_holds,
        period_relation_holds,
    }
}

/// Brute-force gain: applies `T⁻¹` `j` times to every basis vector of block
/// `l`, projects back, and checks each image is a single coefficient.
/// Returns `log2 g(j)`.
pub fn gain_bruteforce(spec: &OperatorSpec, l: usize, j: u64) -> Result<i64> {
    let mut best: Option<i64> = None;
    for k in spec.b(l)..spec.b(l + 1) {
        let img = spec.proj_block(&spec.apply_t_iter(&FinVec::basis(k), -(j as i64))?, l);
        if img.len() != 1 {
            return Err(Error::Precondition(format!(
                "P_{l} T^-{j} e_{k} has {} coefficients",
                img.len()
            )));
        }
        let e = img.entries()[0].1.abs().log2_exact().ok_or_else(|| {
            Error::Precondition(format!("P_{l} T^-{j} e_{k} is not a power of two"))
        })?;
        best = Some(best.map_or(e, |b| b.min(e)));
    }
    Ok(best.unwrap_or(0))
}

/// `‖T^{−j} e_{b_l}‖` for `j < horizon`, with the lower bound
/// `2^{η⌊j/Δ⌋−δ}` checked at every step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthCurve {
    pub block: usize,
    pub norms: Vec<Dyadic>,
    pub floor_holds: bool,
}

pub fn inverse_orbit_growth(spec: &OperatorSpec, l: usize, horizon: u64) -> Result<GrowthCurve> {
    spec.inverse_supported()?;
    let g = *spec.blocks().generation(l);
    let mut cur = FinVec::basis(spec.b(l));
    let mut norms = Vec::with_capacity(horizon as usize);
    let mut floor_holds = true;
    for j in 0..horizon {
        let v = cur.norm_l1();
        let floor = g.eta as i64 * (j / g.big_delta) as i64 - g.delta as i64;
        if v < Dyadic::pow2(floor) {
            floor_holds = false;
        }
        norms.push(v);
        if j + 1 < horizon {
            cur = spec.apply_t_inv(&cur)?;
        }
    }
    Ok(GrowthCurve { block: l, norms, floor_holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{derive_structure, RSpec, RSpecName, Schedule, TauSpec};

    fn canonical() -> OperatorSpec {
        derive_structure(&Schedule::canonical(TauSpec::affine(1, 22), 2)).unwrap()
    }

    #[test]
    fn eigen_period_first_block() {
        let t = canonical();
        assert!(check_eigen_period(&t, 0, &[3]).unwrap().passed);
        let ks: Vec<u64> = (8..72).collect();
        assert!(check_eigen_period(&t, 1, &ks).unwrap().passed);
        assert_eq!(
            t.apply_t_iter(&FinVec::basis(3), 16).unwrap(),
            FinVec::single(3, Dyadic::new(1, -2))
        );
        let c = derive_structure(
            &Schedule::canonical(TauSpec::affine(1, 22), 2).with_r(RSpec::Named(RSpecName::Ctype)),
        )
        .unwrap();
        assert!(check_eigen_period(&c, 2, &[72, 300, 583]).unwrap().passed);
        assert_eq!(c.period_base(2), Dyadic::one());
    }

    #[test]
    fn invertibility_examples() {
        let t = canonical();
        assert!(check_invertibility(&t, 3).unwrap().passed);
        let chain = chain_sum(&t, 3).unwrap();
        assert_eq!(chain, Dyadic::pow2(-23) + Dyadic::pow2(-45));
        let flat = OperatorSpec::new(t.blocks().clone(), vec![0; 4], RMode::Unit).unwrap();
        let v = check_invertibility(&flat, 3).unwrap();
        assert!(!v.passed);
        assert!(v.witness.unwrap().contains("positive"));
    }

    #[test]
    fn decay_of_first_basis_vectors() {
        let t = canonical();
        assert_eq!(decay_certificate_vec(&t, &FinVec::zero()).unwrap().k0, 0);
        let c0 = decay_certificate_vec(&t, &FinVec::basis(0)).unwrap();
        assert_eq!(Slope { num: c0.rate_num, den: c0.rate_den }.reduced(), (1, 24));
        assert_eq!(c0.period, 16);
        let c8 = decay_certificate_vec(&t, &FinVec::basis(8)).unwrap();
        assert_eq!(c8.period, 128);
        for k in [c8.k0, c8.k0 + 1, c8.k0 + 500, c8.k0 + 1001] {
            assert!(decay_holds_at(&t, &FinVec::basis(8), k).unwrap());
        }
        if c8.k0 > 0 {
            assert!(!decay_holds_at(&t, &FinVec::basis(8), c8.k0 - 1).unwrap());
        }
    }

    #[test]
    fn contraction_examples() {
        let t = canonical();
        assert!(check_inv_contraction(&t, &FinVec::basis(5)).unwrap().passed);
        assert!(check_inv_contraction(&t, &FinVec::zero()).unwrap().passed);
        let img = t.apply_t_inv(&FinVec::basis(8)).unwrap();
        assert_eq!(img.norm_l1(), Dyadic::pow2(-22) + Dyadic::one());
    }

    #[test]
    fn cross_block_examples() {
        let t = canonical();
        for j in 0..=64 {
            assert!(cross_block_bound(&t, 0, 1, 1, j, &FinVec::basis(8)).unwrap().passed);
        }
        for k in 8..72u64 {
            for j in 0..=(k - 8) {
                let img = t.apply_t_power(&FinVec::basis(k), -(j as i64)).unwrap();
                assert!(t.proj_block(&img, 0).is_zero());
            }
        }
        assert!(cross_block_bound(&t, 1, 1, 2, 3, &FinVec::basis(80)).is_err());
    }

    #[test]
    fn gain_examples() {
        let t = canonical();
        let p = gain_profile(t.blocks(), 0, 64);
        assert_eq!(p.gains_log2[0], 0);
        assert_eq!(p.gains_log2[8], 1);
        assert_eq!(p.gains_log2[16], 2);
        assert!(p.floor_holds && p.period_relation_holds);
        assert_eq!(
            t.apply_t_iter(&FinVec::basis(3), -8).unwrap(),
            FinVec::single(3, Dyadic::from_i64(-2))
        );
        for j in 0..40 {
            assert_eq!(gain_bruteforce(&t, 0, j).unwrap(), p.gains_log2[j as usize], "j={j}");
        }
    }
}
