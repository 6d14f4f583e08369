//! Frequently hypercyclic vectors built from a dense sequence of targets.
//!
//! For target `y^(j)` the plan fixes `N_j`, `s_j`, `l_j` and a separated set
//! `A_j = A(s_j, l_j)`. Each `m ∈ A_j` contributes a block vector `x^(m)`
//! parked near the end of blocks of a far generation `k_m`, scaled so that
//! `T^m x^(m)` reproduces `y^(j)` on the low section exactly.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificates::{decay_certificate_vec, decays_from_zero, Slope, Verdict};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::finvec::FinVec;
use crate::operator::OperatorSpec;
use crate::schedule::{gen_start, Generation};
use crate::sets::{build_family, prefix_density, DensityCurve, SeparatedFamily};

/// Deterministic enumeration of finitely supported dyadic vectors.
///
/// Level `L` lists every vector supported in `[0, L)` whose coordinates lie
/// in `{0} ∪ {±a·2^{−p} : a ≤ L odd, p < L}`, coordinate 0 varying fastest,
/// skipping vectors already listed at level `L − 1`. The union over all
/// levels is dense in ℓ¹. The sequence starts `0, e0, −e0, ½e0, −½e0, e1, …`.
#[derive(Debug, Clone)]
pub struct DenseEnumerator {
    level: u32,
    counter: u64,
    alphabet: Vec<Dyadic>,
}

impl Default for DenseEnumerator {
    fn default() -> Self {
        Self::new()
    }
}

impl DenseEnumerator {
    pub fn new() -> Self {
        DenseEnumerator { level: 1, counter: 0, alphabet: alphabet(1) }
    }

    fn level_size(&self) -> u64 {
        (self.alphabet.len() as u64).saturating_pow(self.level)
    }
}

fn alphabet(level: u32) -> Vec<Dyadic> {
    let mut out = vec![Dyadic::zero()];
    for p in 0..level as i64 {
        for a in (1..=level as i64).step_by(2) {
            out.push(Dyadic::new(a, -p));
            out.push(Dyadic::new(-a, -p));
        }
    }
    out
}

fn in_alphabet(v: &Dyadic, level: u32) -> bool {
    if v.is_zero() {
        return true;
    }
    let a = v.mantissa().magnitude();
    a <= &num_bigint::BigUint::from(level) && v.exponent() <= 0 && -v.exponent() < level as i64
}

impl Iterator for DenseEnumerator {
    type Item = FinVec;

    fn next(&mut self) -> Option<FinVec> {
        loop {
            if self.counter == self.level_size() {
                self.level += 1;
                self.counter = 0;
                self.alphabet = alphabet(self.level);
            }
            let base = self.alphabet.len() as u64;
            let mut rest = self.counter;
            self.counter += 1;
            let mut digits = Vec::with_capacity(self.level as usize);
            for _ in 0..self.level {
                digits.push((rest % base) as usize);
                rest /= base;
            }
            let coords: Vec<&Dyadic> = digits.iter().map(|&d| &self.alphabet[d]).collect();
            let prev = self.level - 1;
            if prev > 0
                && coords.last().is_some_and(|c| c.is_zero())
                && coords.iter().all(|c| in_alphabet(c, prev))
            {
                continue;
            }
            return Some(FinVec::from_entries(
                coords.into_iter().enumerate().map(|(i, c)| (i as u64, c.clone())).collect(),
            ));
        }
    }
}

/// The first `count` targets of the dense sequence, reindexed so that
/// `deg y^(j) < b_{n_{j+1}}`: a vector that does not fit slot `j` waits for
/// the first later slot it fits.
pub fn gen_dense_corpus(spec: &OperatorSpec, count: usize) -> Result<Vec<FinVec>> {
    let mut source = DenseEnumerator::new();
    let mut pending: VecDeque<FinVec> = VecDeque::new();
    let mut out = Vec::with_capacity(count);
    for j in 1..=count {
        let bound = low_section(spec, j)?;
        let fits = |y: &FinVec| y.support_max().is_none_or(|d| d < bound);
        if let Some(pos) = pending.iter().position(fits) {
            out.push(pending.remove(pos).unwrap());
            continue;
        }
        loop {
            let y = source.next().expect("enumeration is infinite");
            if fits(&y) {
                out.push(y);
                break;
            }
            pending.push_back(y);
        }
    }
    Ok(out)
}

/// `b_{n_{j+1}}`, the end of the section a level-`j` target lives in.
pub fn low_section(spec: &OperatorSpec, j: usize) -> Result<u64> {
    let n = gen_start(j + 1);
    if j == 0 || j > spec.blocks().k_max() || n > spec.nblocks() {
        return Err(Error::HorizonExceeded { index: n as u64, limit: spec.nblocks() as u64 });
    }
    Ok(spec.b(n))
}

/// `−log2 inf{|v_{n'}| : φ(n') = n, n < n_{j+1}} = max{τ_n : n < n_{j+1}}`.
pub fn tau_star(spec: &OperatorSpec, j: usize) -> Result<i64> {
    low_section(spec, j)?;
    Ok(spec.taus()[..gen_start(j + 1)].iter().copied().max().unwrap())
}

/// Constants chosen for one target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub j: usize,
    pub target: FinVec,
    /// `(δ, η, Δ)` of generation `j`.
    pub generation: Generation,
    pub tau_star: i64,
    #[serde(rename = "N")]
    pub big_n: u64,
    pub s: u64,
    pub l: u64,
    /// Largest decay onset over `e_{b_r}`, `r < n_{j+1}`.
    pub decay_k0: u64,
    /// `A_j ∩ [0, H)`.
    pub members: Vec<u64>,
    /// Generation `k_m` hosting `x^(m)`, aligned with `members`.
    pub hosts: Vec<usize>,
}

impl PlanEntry {
    /// `(2N+1)Δ^(j)` and `(2N+1)η^(j)`.
    fn spans(&self) -> (i64, i64) {
        let f = 2 * self.big_n as i64 + 1;
        (f * self.generation.big_delta as i64, f * self.generation.eta as i64)
    }

    /// Upper bound `‖y‖·2^{τ*}·2^{−(m − (2N+1)Δ − (2N+1)η − 1)}` for `‖x^(m)‖`.
    pub fn term_bound(&self, m: u64) -> Result<Dyadic> {
        let (sd, se) = self.spans();
        Ok(self.target.norm_l1().checked_mul_pow2(self.tau_star - (m as i64 - sd - se - 1))?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FhcPlan {
    pub horizon: u64,
    pub slope: Slope,
    pub entries: Vec<PlanEntry>,
}

impl FhcPlan {
    pub fn pairs(&self) -> Vec<(u64, u64)> {
        self.entries.iter().map(|e| (e.s, e.l)).collect()
    }

    pub fn family(&self) -> Result<SeparatedFamily> {
        build_family(&self.pairs(), self.horizon)
    }

    fn entry(&self, j: usize) -> Result<&PlanEntry> {
        j.checked_sub(1).and_then(|i| self.entries.get(i)).ok_or(Error::UnknownSet(j))
    }
}

fn fits(norm: &Dyadic, e: i64) -> bool {
    norm.le_pow2_ratio(e, 1)
}

/// `‖y‖·2^{τ*}·2^{−(2NΔ − (2N+1)η)} ≤ 2^{−j}`.
fn cond_n(norm: &Dyadic, g: &Generation, tau: i64, j: usize, n: u64) -> bool {
    let n = n as i64;
    fits(norm, 2 * n * g.big_delta as i64 - (2 * n + 1) * g.eta as i64 - tau - j as i64)
}

/// Both norm conditions on `s`.
fn cond_s(norm: &Dyadic, g: &Generation, tau: i64, j: usize, n: u64, s: u64, a: Slope) -> bool {
    let f = 2 * n as i64 + 1;
    let (sd, se) = (f * g.big_delta as i64, f * g.eta as i64);
    let s = s as i64;
    fits(norm, s - sd - se - 1 - tau - j as i64)
        && norm.le_pow2_ratio(a.num * s - a.den as i64 * (se + 1 + tau + j as i64), a.den)
}

/// `‖y‖·2^{τ*}·2^{−(l − (2N+1)Δ − (2N+1)η − 2)} ≤ 2^{−j}`.
fn cond_l(norm: &Dyadic, g: &Generation, tau: i64, j: usize, n: u64, l: u64) -> bool {
    let f = 2 * n as i64 + 1;
    fits(norm, l as i64 - f * g.big_delta as i64 - f * g.eta as i64 - 2 - tau - j as i64)
}

const SEARCH_CAP: u64 = 1 << 32;

fn search(from: u64, what: &str, mut ok: impl FnMut(u64) -> bool) -> Result<u64> {
    let mut v = from;
    while !ok(v) {
        v += 1;
        if v - from > SEARCH_CAP {
            return Err(Error::BudgetExceeded(format!("no admissible {what} found")));
        }
    }
    Ok(v)
}

/// Cache of "`e_{b_n}` decays from step 0" per block.
type DecayCache = HashMap<usize, bool>;

fn blocks_decay(spec: &OperatorSpec, blocks: std::ops::Range<usize>, cache: &mut DecayCache) -> Result<bool> {
    let todo: Vec<usize> = blocks.clone().filter(|n| !cache.contains_key(n)).collect();
    let fresh: Vec<(usize, bool)> = todo
        .par_iter()
        .map(|&n| decays_from_zero(spec, &FinVec::basis(spec.b(n))).map(|ok| (n, ok)))
        .collect::<Result<_>>()?;
    cache.extend(fresh);
    Ok(blocks.into_iter().all(|n| cache[&n]))
}

/// Smallest generation `k` able to host `x^(m)` for target `j`.
fn host_generation(
    spec: &OperatorSpec,
    e: &PlanEntry,
    m: u64,
    cache: &mut DecayCache,
) -> Result<usize> {
    let width = gen_start(e.j + 1);
    let (sd, _) = e.spans();
    let gens = spec.blocks().generations();
    for k in 1..gens.len() {
        let g = &gens[k];
        if gen_start(k) + width >= gen_start(k + 1) || (g.eta as i64) < sd || g.delta < m {
            continue;
        }
        if blocks_decay(spec, gen_start(k)..gen_start(k) + width, cache)? {
            return Ok(k);
        }
    }
    Err(Error::HorizonExhausted(format!(
        "no generation up to K_max = {} can host the block vector for m = {m} (j = {})",
        spec.blocks().k_max(),
        e.j
    )))
}

/// Chooses `N_j`, `s_j`, `l_j` smallest-first for each target and places
/// the members of `A_j ∩ [0, H)`.
pub fn choose_plan(spec: &OperatorSpec, targets: &[FinVec], h: u64) -> Result<FhcPlan> {
    let slope = Slope::of(spec.blocks());
    let mut entries = Vec::with_capacity(targets.len());
    for (idx, y) in targets.iter().enumerate() {
        let j = idx + 1;
        let bound = low_section(spec, j)?;
        if y.support_max().is_some_and(|d| d >= bound) {
            return Err(Error::Precondition(format!(
                "target {j} has degree ≥ b_(n_{}) = {bound}",
                j + 1
            )));
        }
        let g = spec.blocks().generations()[j];
        let tau = tau_star(spec, j)?;
        let norm = y.norm_l1();
        let big_n = search(1, "N", |n| cond_n(&norm, &g, tau, j, n))?;
        let sd = (2 * big_n + 1) * g.big_delta;
        let decay_k0 = (0..gen_start(j + 1))
            .into_par_iter()
            .map(|r| decay_certificate_vec(spec, &FinVec::basis(spec.b(r))).map(|c| c.k0))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .max()
            .unwrap_or(0);
        let s = search((sd + 1).max(sd + decay_k0), "s", |s| {
            cond_s(&norm, &g, tau, j, big_n, s, slope)
        })?;
        let l = search(sd + 1, "l", |l| cond_l(&norm, &g, tau, j, big_n, l))?;
        entries.push(PlanEntry {
            j,
            target: y.clone(),
            generation: g,
            tau_star: tau,
            big_n,
            s,
            l,
            decay_k0,
            members: Vec::new(),
            hosts: Vec::new(),
        });
    }
    let mut plan = FhcPlan { horizon: h, slope, entries };
    let fam = plan.family()?;
    let mut cache = DecayCache::new();
    for idx in 0..plan.entries.len() {
        let members = fam.members(idx + 1, h)?;
        let hosts = members
            .iter()
            .map(|&m| host_generation(spec, &plan.entries[idx], m, &mut cache))
            .collect::<Result<Vec<_>>>()?;
        plan.entries[idx].members = members;
        plan.entries[idx].hosts = hosts;
    }
    Ok(plan)
}

/// Rechecks every plan condition, minimality included, and the placement of
/// members and host generations.
pub fn validate_plan(spec: &OperatorSpec, plan: &FhcPlan) -> Result<Verdict> {
    if plan.slope != Slope::of(spec.blocks()) {
        return Ok(Verdict::fail("decay slope does not match the operator"));
    }
    let fam = match plan.family() {
        Ok(f) => f,
        Err(e) => return Ok(Verdict::fail(format!("family: {e}"))),
    };
    let mut cache = DecayCache::new();
    for e in &plan.entries {
        let j = e.j;
        let g = spec.blocks().generations().get(j).copied();
        if g != Some(e.generation) {
            return Ok(Verdict::fail(format!("j={j}: generation parameters differ")));
        }
        let g = e.generation;
        if e.tau_star != tau_star(spec, j)? {
            return Ok(Verdict::fail(format!("j={j}: τ* differs")));
        }
        let norm = e.target.norm_l1();
        let n = e.big_n;
        if n == 0 || !cond_n(&norm, &g, e.tau_star, j, n) {
            return Ok(Verdict::fail(format!("j={j}: N = {n} violates the target-accuracy bound")));
        }
        if n > 1 && cond_n(&norm, &g, e.tau_star, j, n - 1) {
            return Ok(Verdict::fail(format!("j={j}: N = {n} is not minimal")));
        }
        let sd = (2 * n + 1) * g.big_delta;
        let s_lo = (sd + 1).max(sd + e.decay_k0);
        if e.s < s_lo || !cond_s(&norm, &g, e.tau_star, j, n, e.s, plan.slope) {
            return Ok(Verdict::fail(format!("j={j}: s = {} violates its conditions", e.s)));
        }
        if e.l <= sd || !cond_l(&norm, &g, e.tau_star, j, n, e.l) {
            return Ok(Verdict::fail(format!("j={j}: l = {} violates its condition", e.l)));
        }
        for r in 0..gen_start(j + 1) {
            let k0 = decay_certificate_vec(spec, &FinVec::basis(spec.b(r)))?.k0;
            if k0 > e.decay_k0 {
                return Ok(Verdict::fail(format!("j={j}: e_b({r}) decays only from {k0}")));
            }
        }
        if fam.members(j, plan.horizon)? != e.members || e.hosts.len() != e.members.len() {
            return Ok(Verdict::fail(format!("j={j}: members differ from the separated family")));
        }
        for (&m, &k) in e.members.iter().zip(&e.hosts) {
            let want = host_generation(spec, e, m, &mut cache)?;
            if want != k {
                return Ok(Verdict::fail(format!("j={j}, m={m}: host generation {k}, expected {want}")));
            }
        }
    }
    Ok(Verdict::pass())
}

/// `x^(m)` for target `j` hosted in generation `k`.
///
/// Coordinate `y_i`, `i ∈ [b_n, b_{n+1})`, goes to `e_{b_{N'+1} − d}` with
/// `N' = n_k + n`, `d = m − (i − b_n) − 2NΔ^(j)`, and coefficient
/// `y_i·2^{−(d − 2Nη^(j) − 1)}·2^{τ_n} / Π_{t=b_n+1}^{i} w_t`.
pub fn block_vector(spec: &OperatorSpec, e: &PlanEntry, m: u64, k: usize) -> Result<FinVec> {
    let blocks = spec.blocks();
    if k > blocks.k_max() {
        return Err(Error::HorizonExceeded { index: k as u64, limit: blocks.k_max() as u64 });
    }
    let host = blocks.generations()[k];
    let two_n_len = 2 * e.big_n as i128 * e.generation.big_delta as i128;
    let two_n_eta = 2 * e.big_n as i64 * e.generation.eta as i64;
    let mut out = Vec::with_capacity(e.target.len());
    for n in 0..gen_start(e.j + 1) {
        for (i, y) in e.target.restrict_range(spec.b(n), spec.b(n + 1)).iter() {
            let q = i - spec.b(n);
            let d = m as i128 - q as i128 - two_n_len;
            if d < 1 || d > host.delta as i128 {
                return Err(Error::Constraint(format!(
                    "offset d = {d} outside [1, δ^({k})] for m = {m}, i = {i}"
                )));
            }
            let d = d as i64;
            let np = gen_start(k) + n;
            let idx = spec.b(np + 1) - d as u64;
            let exp = -(d - two_n_eta - 1) + spec.tau(n) - blocks.weight_prefix_log2(n, q);
            out.push((idx, y.checked_mul_pow2(exp)?));
        }
    }
    Ok(FinVec::from_entries(out))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Term {
    pub j: usize,
    pub m: u64,
    pub host: usize,
    pub vector: FinVec,
}

/// The truncated vector `x = Σ_{j ≤ J} Σ_{m ∈ A_j, m < H} x^(m)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assembly {
    pub x: FinVec,
    #[serde(skip)]
    pub terms: Vec<Term>,
    pub norm: Dyadic,
    /// Bound on the omitted terms `m ≥ H`.
    pub tail_bound: Dyadic,
    /// Every term obeys its norm bound.
    pub term_bounds_hold: bool,
}

pub fn assemble_fhc(spec: &OperatorSpec, plan: &FhcPlan) -> Result<Assembly> {
    let mut terms = Vec::new();
    let mut x = FinVec::zero();
    let mut bounds_ok = true;
    for e in &plan.entries {
        for (&m, &k) in e.members.iter().zip(&e.hosts) {
            let v = block_vector(spec, e, m, k)?;
            bounds_ok &= v.norm_l1() <= e.term_bound(m)?;
            x = x.add(&v);
            terms.push(Term { j: e.j, m, host: k, vector: v });
        }
    }
    let norm = x.norm_l1();
    Ok(Assembly { x, terms, norm, tail_bound: tail_bound(plan)?, term_bounds_hold: bounds_ok })
}

/// `Σ_j ‖y^(j)‖·2^{τ*}·2^{−(H − (2N+1)Δ − (2N+1)η − 2)}`, a geometric bound on
/// the terms with `m ≥ H`.
pub fn tail_bound(plan: &FhcPlan) -> Result<Dyadic> {
    let mut acc = Dyadic::zero();
    for e in &plan.entries {
        acc = acc.checked_add(&e.term_bound(plan.horizon)?.checked_mul_pow2(1)?)?;
    }
    Ok(acc)
}

/// `⌈2^bits / r⌉·2^{−bits}`-style dyadic upper bound for `1/r`, `r > 0`.
fn recip_upper(r: &Dyadic, bits: u64) -> Dyadic {
    let num = BigInt::from(1) << bits;
    let q = num.div_ceil(r.mantissa());
    Dyadic::new(q, -(bits as i64) - r.exponent())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Epsilon {
    /// `2^{−J}`.
    pub target: Dyadic,
    /// `2^{−(s_J − 1)}`, later terms.
    pub later: Dyadic,
    /// Upper bound of `2^{−a·s_J}/(1 − 2^{−a})`, earlier terms.
    pub earlier: Dyadic,
    pub tail: Dyadic,
    pub total: Dyadic,
}

/// The visit radius for level `J`, every piece rounded up.
pub fn epsilon(plan: &FhcPlan, big_j: usize) -> Result<Epsilon> {
    let e = plan.entry(big_j)?;
    let a = plan.slope;
    let target = Dyadic::pow2(-(big_j as i64));
    let later = Dyadic::pow2(1 - e.s as i64);
    let head = Dyadic::pow2_ratio_upper(-a.num * e.s as i64, a.den, 40);
    let ratio = Dyadic::pow2_ratio_upper(-a.num, a.den, 40);
    let gap = &Dyadic::one() - &ratio;
    if !gap.is_positive() {
        return Err(Error::Precondition("decay slope too small to bound earlier terms".into()));
    }
    let earlier = head.checked_mul(&recip_upper(&gap, 64))?;
    let tail = tail_bound(plan)?;
    let total = target.checked_add(&later)?.checked_add(&earlier)?.checked_add(&tail)?;
    Ok(Epsilon { target, later, earlier, tail, total })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VisitEntry {
    #[serde(rename = "M")]
    pub big_m: u64,
    pub distance: Dyadic,
    /// `‖T^M x^(M) − y^(J)‖`.
    pub own_residual: Dyadic,
    /// `T^M x^(M)` restricted to `[0, b_{n_{J+1}})` equals `y^(J)`.
    pub own_exact: bool,
    pub later_norm: Dyadic,
    /// `T^M x^(m) = 2^M·shift_M(x^(m))` for every `m > M`.
    pub later_shift_ok: bool,
    pub earlier_norm: Dyadic,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VisitReport {
    #[serde(rename = "J")]
    pub big_j: usize,
    pub epsilon: Epsilon,
    pub visits: Vec<VisitEntry>,
    pub all_passed: bool,
}

impl VisitReport {
    pub fn first_failure(&self) -> Option<&VisitEntry> {
        self.visits.iter().find(|v| !v.passed)
    }
}

/// Checks `‖T^M x − y^(J)‖ ≤ ε_J` for every `M ∈ A_J ∩ [0, H)`, together with
/// the per-term identities behind the bound.
pub fn visit_check(spec: &OperatorSpec, plan: &FhcPlan, asm: &Assembly, big_j: usize) -> Result<VisitReport> {
    let e = plan.entry(big_j)?;
    let eps = epsilon(plan, big_j)?;
    let low = low_section(spec, big_j)?;
    let visits = e
        .members
        .par_iter()
        .map(|&big_m| -> Result<VisitEntry> {
            let k = big_m as i64;
            let distance = spec.apply_t_power(&asm.x, k)?.dist_l1(&e.target);
            let mut own = FinVec::zero();
            let mut later = FinVec::zero();
            let mut earlier = FinVec::zero();
            let mut shift_ok = true;
            for t in &asm.terms {
                let img = spec.apply_t_power(&t.vector, k)?;
                if t.j == big_j && t.m == big_m {
                    own = own.add(&img);
                } else if t.m > big_m {
                    shift_ok &= img == t.vector.shift(big_m).scale(&Dyadic::pow2(k));
                    later = later.add(&img);
                } else {
                    earlier = earlier.add(&img);
                }
            }
            let own_exact = own.restrict_range(0, low) == e.target;
            let passed = distance <= eps.total;
            Ok(VisitEntry {
                big_m,
                distance,
                own_residual: own.dist_l1(&e.target),
                own_exact,
                later_norm: later.norm_l1(),
                later_shift_ok: shift_ok,
                earlier_norm: earlier.norm_l1(),
                passed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let all_passed = visits.iter().all(|v| v.passed);
    Ok(VisitReport { big_j, epsilon: eps, visits, all_passed })
}

/// Forward visits `{n < H : ‖T^n x − y‖ ≤ radius}` and their prefix densities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VisitProfile {
    pub radius: Dyadic,
    pub visits: Vec<u64>,
    #[serde(skip)]
    pub curve: DensityCurve,
}

pub fn visit_profile(spec: &OperatorSpec, x: &FinVec, y: &FinVec, radius: &Dyadic, h: u64) -> Result<VisitProfile> {
    let mut cur = x.clone();
    let mut visits = Vec::new();
    for n in 0..h {
        if cur.dist_l1(y) <= *radius {
            visits.push(n);
        }
        if n + 1 < h {
            cur = spec.apply_t(&cur)?;
        }
    }
    let curve = prefix_density(&visits, h);
    Ok(VisitProfile { radius: radius.clone(), visits, curve })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{derive_structure, Schedule, TauSpec};

    fn toy() -> OperatorSpec {
        derive_structure(&Schedule::geometric(4, TauSpec::synth(2), 9)).unwrap()
    }

    #[test]
    fn enumeration_prefix() {
        let got: Vec<FinVec> = DenseEnumerator::new().take(6).collect();
        let half = Dyadic::new(1, -1);
        assert_eq!(got[0], FinVec::zero());
        assert_eq!(got[1], FinVec::basis(0));
        assert_eq!(got[2], FinVec::basis(0).neg());
        assert_eq!(got[3], FinVec::single(0, half.clone()));
        assert_eq!(got[4], FinVec::single(0, -half));
        assert_eq!(got[5], FinVec::basis(1));
    }

    #[test]
    fn enumeration_has_no_repeats() {
        let got: Vec<FinVec> = DenseEnumerator::new().take(3000).collect();
        let set: std::collections::HashSet<_> = got.iter().collect();
        assert_eq!(set.len(), got.len());
    }

    #[test]
    fn reciprocal_bound() {
        let r = Dyadic::new(3, -2);
        let u = recip_upper(&r, 20);
        assert!(u.checked_mul(&r).unwrap() >= Dyadic::one());
        assert!(u.checked_mul(&r).unwrap() <= &Dyadic::one() + &Dyadic::pow2(-17));
    }

    #[test]
    fn toy_plan_constants() {
        let spec = toy();
        let y = FinVec::from_entries(vec![(0, Dyadic::one()), (5, Dyadic::new(-1, -1))]);
        let plan = choose_plan(&spec, &[y], 120_000).unwrap();
        let e = &plan.entries[0];
        assert!(e.big_n >= 1 && e.s > (2 * e.big_n + 1) * 16 && e.l > (2 * e.big_n + 1) * 16);
        assert!(!e.members.is_empty());
        assert!(validate_plan(&spec, &plan).unwrap().passed);
    }
}
