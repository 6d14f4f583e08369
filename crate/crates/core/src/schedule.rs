//! Parameter schedules and the block structure they generate.
//!
//! Blocks are grouped into generations: generation `k` holds the blocks
//! `n ∈ [n_k, n_{k+1})` with `n_0 = 0` and `n_k = 2^{k-1}`, all of length
//! `Δ^(k)`. A schedule with horizon `K_max` materializes generations
//! `0..=K_max`, i.e. `2^K_max` blocks and the coordinates `[0, b_{2^K_max})`.

use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::operator::{OperatorSpec, RMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Canonical,
    Geometric,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
pub enum TauRule {
    Affine { slope: i64, offset: i64 },
    Synth {
        #[serde(rename = "L")]
        l: usize,
    },
}

/// How `(τ_m)` is produced. Values past the end of a table (or past `L` for
/// synthesized schedules) continue with step `+1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TauSpec {
    Table { table: Vec<i64> },
    Rule(TauRule),
}

impl TauSpec {
    pub fn affine(slope: i64, offset: i64) -> Self {
        TauSpec::Rule(TauRule::Affine { slope, offset })
    }

    pub fn synth(l: usize) -> Self {
        TauSpec::Rule(TauRule::Synth { l })
    }

    pub fn table(values: Vec<i64>) -> Self {
        TauSpec::Table { table: values }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RSpecName {
    #[default]
    Unit,
    Ctype,
}

/// Recurrence coefficients: `R_n = 1`, `R_n = W_n`, or an explicit table of
/// signed powers of two (one per block).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RSpec {
    Named(RSpecName),
    Table(Vec<Dyadic>),
}

impl Default for RSpec {
    fn default() -> Self {
        RSpec::Named(RSpecName::Unit)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<u64>,
    pub tau: TauSpec,
    #[serde(rename = "K_max")]
    pub k_max: u32,
    #[serde(default)]
    pub r: RSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<u64>>,
    #[serde(rename = "Delta", default, skip_serializing_if = "Option::is_none")]
    pub big_delta: Option<Vec<u64>>,
}

impl Schedule {
    pub fn canonical(tau: TauSpec, k_max: u32) -> Self {
        Schedule {
            kind: Kind::Canonical,
            beta: None,
            tau,
            k_max,
            r: RSpec::default(),
            delta: None,
            eta: None,
            big_delta: None,
        }
    }

    pub fn geometric(beta: u64, tau: TauSpec, k_max: u32) -> Self {
        Schedule { kind: Kind::Geometric, beta: Some(beta), ..Schedule::canonical(tau, k_max) }
    }

    pub fn explicit(delta: Vec<u64>, eta: Vec<u64>, big_delta: Vec<u64>, tau: TauSpec) -> Self {
        let k_max = big_delta.len().saturating_sub(1) as u32;
        Schedule {
            kind: Kind::Explicit,
            beta: None,
            tau,
            k_max,
            r: RSpec::default(),
            delta: Some(delta),
            eta: Some(eta),
            big_delta: Some(big_delta),
        }
    }

    pub fn with_r(mut self, r: RSpec) -> Self {
        self.r = r;
        self
    }

    /// Per-generation `(δ, η, Δ)` for `k ≤ K_max`, validated.
    pub fn generations(&self) -> Result<Vec<Generation>> {
        if self.k_max > 40 {
            return Err(Error::BudgetExceeded(format!("K_max = {} exceeds 40", self.k_max)));
        }
        let count = self.k_max as usize + 1;
        let gens = match self.kind {
            Kind::Canonical => geometric_generations(8, count)?,
            Kind::Geometric => {
                let beta = self.beta.ok_or_else(|| {
                    Error::Constraint("geometric schedule needs a beta".into())
                })?;
                geometric_generations(beta, count)?
            }
            Kind::Explicit => {
                let (Some(d), Some(e), Some(bd)) = (&self.delta, &self.eta, &self.big_delta) else {
                    return Err(Error::Constraint(
                        "explicit schedule needs delta, eta and Delta tables".into(),
                    ));
                };
                if d.len() < count || e.len() < count || bd.len() < count {
                    return Err(Error::Constraint(format!(
                        "explicit tables must cover generations 0..={}",
                        self.k_max
                    )));
                }
                (0..count)
                    .map(|k| Generation { delta: d[k], eta: e[k], big_delta: bd[k] })
                    .collect()
            }
        };
        validate_generations(&gens)?;
        Ok(gens)
    }
}

fn geometric_generations(beta: u64, count: usize) -> Result<Vec<Generation>> {
    let mut gens = Vec::with_capacity(count);
    let mut p: u64 = 1;
    for _ in 0..count {
        let next = p.checked_mul(beta).ok_or_else(|| {
            Error::BudgetExceeded("block length overflows u64".into())
        })?;
        gens.push(Generation { delta: p, eta: p, big_delta: next });
        p = next;
    }
    Ok(gens)
}

/// Checks positivity and monotonicity of the three sequences, the interior
/// inequality `2δ + η < Δ`, divisibility `2Δ^(k) | Δ^(k+1)`, and constancy of
/// `η^(k)/Δ^(k)`.
pub fn validate_generations(gens: &[Generation]) -> Result<()> {
    if gens.is_empty() {
        return Err(Error::Constraint("at least one generation is required".into()));
    }
    for (k, g) in gens.iter().enumerate() {
        if g.delta == 0 || g.eta == 0 || g.big_delta == 0 {
            return Err(Error::Constraint(format!("δ, η, Δ positive fails at k={k}")));
        }
        if 2 * g.delta + g.eta >= g.big_delta {
            return Err(Error::Constraint(format!(
                "2δ^(k) + η^(k) < Δ^(k) fails at k={k}: 2·{} + {} ≥ {}",
                g.delta, g.eta, g.big_delta
            )));
        }
        if k == 0 {
            continue;
        }
        let prev = &gens[k - 1];
        if g.delta <= prev.delta || g.eta <= prev.eta || g.big_delta <= prev.big_delta {
            return Err(Error::Constraint(format!(
                "δ^(k), η^(k), Δ^(k) strictly increasing fails at k={k}"
            )));
        }
        if g.big_delta % (2 * prev.big_delta) != 0 {
            return Err(Error::Constraint(format!(
                "Δ^(k+1) multiple of 2Δ^(k) fails at k={}: {} vs {}",
                k - 1,
                g.big_delta,
                prev.big_delta
            )));
        }
        if (g.eta as u128) * (gens[0].big_delta as u128)
            != (gens[0].eta as u128) * (g.big_delta as u128)
        {
            return Err(Error::Constraint(format!(
                "η^(k)/Δ^(k) = η^(0)/Δ^(0) fails at k={k}"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generation {
    pub delta: u64,
    pub eta: u64,
    #[serde(rename = "Delta")]
    pub big_delta: u64,
}

/// `n_k`: first block of generation `k`.
pub fn gen_start(k: usize) -> usize {
    if k == 0 {
        0
    } else {
        1 << (k - 1)
    }
}

/// Generation containing block `n`.
pub fn gen_of(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        (usize::BITS - n.leading_zeros()) as usize
    }
}

/// `φ(n) = n − n_k` for `n ∈ [n_k, n_{k+1})`.
pub fn phi(n: usize) -> usize {
    n - gen_start(gen_of(n))
}

/// `m_l = min{s ≥ 0 : φ^s(l) = 0}`.
pub fn m_depth(l: usize) -> u32 {
    let mut cur = l;
    let mut s = 0;
    while cur != 0 {
        cur = phi(cur);
        s += 1;
    }
    s
}

/// The τ-independent part of an operator: block boundaries and weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockStructure {
    gens: Vec<Generation>,
    b: Vec<u64>,
}

impl BlockStructure {
    pub fn new(gens: Vec<Generation>) -> Result<Self> {
        validate_generations(&gens)?;
        let nblocks = gen_start(gens.len());
        let nblocks = nblocks.max(1);
        let mut b = Vec::with_capacity(nblocks + 1);
        b.push(0u64);
        for n in 0..nblocks {
            let len = gens[gen_of(n)].big_delta;
            let next = b[n].checked_add(len).ok_or_else(|| {
                Error::BudgetExceeded("block boundary overflows u64".into())
            })?;
            b.push(next);
        }
        Ok(BlockStructure { gens, b })
    }

    pub fn generations(&self) -> &[Generation] {
        &self.gens
    }

    pub fn k_max(&self) -> usize {
        self.gens.len() - 1
    }

    pub fn nblocks(&self) -> usize {
        self.b.len() - 1
    }

    /// First coordinate outside the materialized section.
    pub fn horizon(&self) -> u64 {
        *self.b.last().unwrap()
    }

    pub fn b(&self, n: usize) -> u64 {
        self.b[n]
    }

    pub fn boundaries(&self) -> &[u64] {
        &self.b
    }

    pub fn generation(&self, n: usize) -> &Generation {
        &self.gens[gen_of(n)]
    }

    pub fn delta_n(&self, n: usize) -> u64 {
        self.generation(n).delta
    }

    pub fn eta_n(&self, n: usize) -> u64 {
        self.generation(n).eta
    }

    pub fn big_delta_n(&self, n: usize) -> u64 {
        self.generation(n).big_delta
    }

    /// Block containing coordinate `i`.
    pub fn block_of(&self, i: u64) -> Result<usize> {
        if i >= self.horizon() {
            return Err(Error::HorizonExceeded { index: i, limit: self.horizon() });
        }
        Ok(self.b.partition_point(|&x| x <= i) - 1)
    }

    /// `log2 w_i`, one of `−1, 0, 1`, for an interior index `i ∈ (b_n, b_{n+1})`.
    pub fn weight_log2(&self, i: u64) -> Result<i64> {
        let n = self.block_of(i)?;
        let q = i - self.b[n];
        if q == 0 {
            return Err(Error::InvalidWeightIndex(i));
        }
        let g = self.generation(n);
        Ok(weight_log2_at(g, q))
    }

    pub fn weight(&self, i: u64) -> Result<Dyadic> {
        Ok(Dyadic::pow2(self.weight_log2(i)?))
    }

    /// `Σ_{t=1}^{q} log2 w_{b_n+t}` for an in-block offset `q < Δ_n`.
    pub fn weight_prefix_log2(&self, n: usize, q: u64) -> i64 {
        weight_prefix_log2(self.generation(n), q)
    }
}

pub(crate) fn weight_log2_at(g: &Generation, q: u64) -> i64 {
    if q <= g.eta {
        -1
    } else if q < g.big_delta - 2 * g.delta {
        0
    } else if q < g.big_delta - g.delta {
        -1
    } else {
        1
    }
}

pub(crate) fn weight_prefix_log2(g: &Generation, q: u64) -> i64 {
    let (eta, delta, len) = (g.eta as i64, g.delta as i64, g.big_delta as i64);
    let q = q as i64;
    if q <= eta {
        -q
    } else if q < len - 2 * delta {
        -eta
    } else if q < len - delta {
        -eta - (q - (len - 2 * delta) + 1)
    } else {
        -eta - delta + (q - (len - delta) + 1)
    }
}

/// Expands a τ rule into `count` values. Synthesized rules are resolved by
/// the caller.
pub fn expand_tau(rule: &TauSpec, count: usize) -> Result<Vec<i64>> {
    match rule {
        TauSpec::Table { table } => Ok(extend_by_one(table.clone(), count)),
        TauSpec::Rule(TauRule::Affine { slope, offset }) => (0..count as i64)
            .map(|m| {
                slope
                    .checked_mul(m)
                    .and_then(|v| v.checked_add(*offset))
                    .ok_or_else(|| Error::BudgetExceeded("τ overflows i64".into()))
            })
            .collect(),
        TauSpec::Rule(TauRule::Synth { .. }) => {
            Err(Error::Precondition("synthesized τ needs the block structure".into()))
        }
    }
}

pub(crate) fn extend_by_one(mut values: Vec<i64>, count: usize) -> Vec<i64> {
    values.truncate(count);
    while values.len() < count {
        let next = values.last().map_or(1, |v| v + 1);
        values.push(next);
    }
    values
}

/// `τ` must be a strictly increasing sequence of positive integers.
pub fn validate_tau(tau: &[i64]) -> Result<()> {
    for (m, &t) in tau.iter().enumerate() {
        if t <= 0 {
            return Err(Error::Constraint(format!("τ_m positive fails at m={m}: τ_m = {t}")));
        }
        if m > 0 && t <= tau[m - 1] {
            return Err(Error::Constraint(format!(
                "τ strictly increasing fails at m={m}: {} then {t}",
                tau[m - 1]
            )));
        }
    }
    Ok(())
}

/// Builds the full operator data from a schedule, validating every
/// structural constraint.
pub fn derive_structure(s: &Schedule) -> Result<OperatorSpec> {
    let blocks = BlockStructure::new(s.generations()?)?;
    let count = blocks.nblocks();
    let tau = match &s.tau {
        TauSpec::Rule(TauRule::Synth { l }) => {
            let synth = crate::inverse::synthesize_tau(&blocks, (*l).min(count - 1))?;
            extend_by_one(synth.values(), count)
        }
        other => expand_tau(other, count)?,
    };
    validate_tau(&tau)?;
    let r = match &s.r {
        RSpec::Named(RSpecName::Unit) => RMode::Unit,
        RSpec::Named(RSpecName::Ctype) => RMode::CType,
        RSpec::Table(t) => {
            if t.len() < count {
                return Err(Error::Constraint(format!("R table must have {count} entries")));
            }
            RMode::Explicit(t[..count].to_vec())
        }
    };
    OperatorSpec::new(blocks, tau, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canonical() -> BlockStructure {
        BlockStructure::new(Schedule::canonical(TauSpec::affine(1, 22), 2).generations().unwrap())
            .unwrap()
    }

    #[test]
    fn canonical_boundaries() {
        let s = canonical();
        assert_eq!(s.boundaries(), &[0, 8, 72, 584, 1096]);
        let s4 = BlockStructure::new(geometric_generations(4, 4).unwrap()).unwrap();
        assert_eq!(&s4.boundaries()[..5], &[0, 4, 20, 84, 148]);
    }

    #[test]
    fn phi_and_depth() {
        assert_eq!(phi(0), 0);
        assert_eq!(phi(1), 0);
        assert_eq!(phi(3), 1);
        assert_eq!(phi(6), 2);
        assert_eq!(m_depth(0), 0);
        assert_eq!(m_depth(1), 1);
        assert_eq!(m_depth(3), 2);
        assert_eq!(m_depth(7), 3);
    }

    #[test]
    fn weight_branches() {
        let s = canonical();
        assert_eq!(s.weight(1).unwrap(), Dyadic::new(1, -1));
        assert_eq!(s.weight(5).unwrap(), Dyadic::one());
        assert_eq!(s.weight(7).unwrap(), Dyadic::from_i64(2));
        assert!(matches!(s.weight(0), Err(Error::InvalidWeightIndex(0))));
        assert!(matches!(s.weight(8), Err(Error::InvalidWeightIndex(8))));
        assert!(matches!(s.weight(1096), Err(Error::HorizonExceeded { .. })));
    }

    #[test]
    fn prefix_matches_direct_sum() {
        let s = canonical();
        for n in 0..s.nblocks() {
            let mut acc = 0;
            for q in 1..s.big_delta_n(n) {
                acc += s.weight_log2(s.b(n) + q).unwrap();
                assert_eq!(s.weight_prefix_log2(n, q), acc, "n={n} q={q}");
            }
            assert_eq!(acc, -(s.eta_n(n) as i64));
        }
    }

    #[test]
    fn constraint_violations_are_named() {
        let err = Schedule::geometric(3, TauSpec::affine(1, 1), 2).generations().unwrap_err();
        assert!(err.to_string().contains("2δ^(k) + η^(k) < Δ^(k)"), "{err}");
        let err = Schedule::geometric(5, TauSpec::affine(1, 1), 2).generations().unwrap_err();
        assert!(err.to_string().contains("multiple of 2Δ^(k)"), "{err}");
        let err = Schedule::explicit(vec![1, 2], vec![1, 3], vec![8, 16], TauSpec::affine(1, 1))
            .generations()
            .unwrap_err();
        assert!(err.to_string().contains("η^(k)/Δ^(k)"), "{err}");
    }

    #[test]
    fn canonical_first_generation_passes_interior_inequality() {
        let g = Schedule::canonical(TauSpec::affine(1, 1), 0).generations().unwrap();
        assert_eq!(g[0], Generation { delta: 1, eta: 1, big_delta: 8 });
    }

    #[test]
    fn tau_rules() {
        assert_eq!(expand_tau(&TauSpec::affine(2, 3), 4).unwrap(), vec![3, 5, 7, 9]);
        assert_eq!(expand_tau(&TauSpec::table(vec![5, 9]), 4).unwrap(), vec![5, 9, 10, 11]);
        assert!(validate_tau(&[0, 0, 0]).is_err());
        assert!(validate_tau(&[3, 3]).is_err());
        assert!(validate_tau(&[1, 2, 5]).is_ok());
    }

    #[test]
    fn schedule_json() {
        let s: Schedule = serde_json::from_str(
            r#"{"kind":"geometric","beta":4,"tau":{"rule":"synth","L":2},"K_max":3}"#,
        )
        .unwrap();
        assert_eq!(s.tau, TauSpec::synth(2));
        assert_eq!(s.r, RSpec::Named(RSpecName::Unit));
        let t: Schedule = serde_json::from_str(
            r#"{"kind":"canonical","tau":{"table":[22,23]},"K_max":2,"r":"ctype"}"#,
        )
        .unwrap();
        assert_eq!(t.tau, TauSpec::table(vec![22, 23]));
        assert_eq!(t.r, RSpec::Named(RSpecName::Ctype));
        let back: Schedule = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(back, t);
    }
}
