//! Exact action of `T = T_{v,w,φ,b,R}` and its inverse on finitely supported
//! vectors.
//!
//! On basis vectors:
//! - `T e_k = w_{k+1} e_{k+1}` for `k ∈ [b_n, b_{n+1} − 1)`,
//! - `T e_{b_{n+1}−1} = v_n e_{b_{φ(n)}} − R_n⁻¹ e_{b_n}` for `n ≥ 1`,
//! - `T e_{b_1−1} = −R_0⁻¹ e_0`.
//!
//! With `R = 1` the inverse is
//! - `T⁻¹ e_k = w_k⁻¹ e_{k−1}` for `k ∈ (b_n, b_{n+1})`,
//! - `T⁻¹ e_{b_n} = −e_{b_{n+1}−1} − Σ_{m<m_n} (Π_{l≤m} v_{φ^l(n)}) e_{b_{φ^{m+1}(n)+1}−1}`,
//! - `T⁻¹ e_0 = −e_{b_1−1}`.

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::finvec::FinVec;
use crate::schedule::{phi, BlockStructure};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RMode {
    /// `R_n = 1`.
    Unit,
    /// `R_n = W_n`, the classical C-type operator.
    CType,
    /// Explicit signed powers of two.
    Explicit(Vec<Dyadic>),
}

#[derive(Debug, Clone)]
pub struct OperatorSpec {
    blocks: BlockStructure,
    tau: Vec<i64>,
    r: RMode,
    r_inv: Vec<Dyadic>,
    /// `R_n⁻¹ W_n = ±2^{c_log2[n]}`.
    c_log2: Vec<i64>,
    c_neg: Vec<bool>,
    inverse_blocker: Option<String>,
}

impl OperatorSpec {
    /// Assembles an operator. The `R` compatibility relation
    /// `R_n⁻¹W_n = (R_{φ(n)}⁻¹W_{φ(n)})^{Δ_n/Δ_{φ(n)}}` is checked exactly for
    /// `n ≥ 1`; `τ` is taken as given (see [`crate::schedule::validate_tau`]).
    pub fn new(blocks: BlockStructure, tau: Vec<i64>, r: RMode) -> Result<Self> {
        let count = blocks.nblocks();
        if tau.len() < count {
            return Err(Error::Constraint(format!("τ needs {count} values, got {}", tau.len())));
        }
        let mut r_inv = Vec::with_capacity(count);
        let mut c_log2 = Vec::with_capacity(count);
        let mut c_neg = Vec::with_capacity(count);
        for n in 0..count {
            let eta = blocks.eta_n(n) as i64;
            let (inv, c_exp, neg) = match &r {
                RMode::Unit => (Dyadic::one(), -eta, false),
                RMode::CType => (Dyadic::pow2(eta), 0, false),
                RMode::Explicit(t) => {
                    let e = t[n].abs().log2_exact().ok_or_else(|| {
                        Error::Constraint(format!("R_{n} must be a signed power of two"))
                    })?;
                    let mut inv = Dyadic::pow2(-e);
                    if t[n].is_negative() {
                        inv.neg_assign();
                    }
                    (inv, -e - eta, t[n].is_negative())
                }
            };
            r_inv.push(inv);
            c_log2.push(c_exp);
            c_neg.push(neg);
        }
        for n in 1..count {
            let p = phi(n);
            let ratio = (blocks.big_delta_n(n) / blocks.big_delta_n(p)) as i64;
            if c_neg[n] || c_log2[n] != c_log2[p] * ratio {
                return Err(Error::Constraint(format!(
                    "R compatibility R_n⁻¹W_n = (R_φ(n)⁻¹W_φ(n))^(Δ_n/Δ_φ(n)) fails at n={n}"
                )));
            }
        }
        let tau = tau[..count].to_vec();
        let inverse_blocker = if r != RMode::Unit {
            Some("inverse formula needs R_n = 1".to_string())
        } else {
            tau.iter().enumerate().find(|&(m, &t)| t < m as i64).map(|(m, &t)| {
                format!("sup |v_n| over φ⁻¹({m}) is 2^-{t} > 2^-{m}")
            })
        };
        Ok(OperatorSpec { blocks, tau, r, r_inv, c_log2, c_neg, inverse_blocker })
    }

    pub fn blocks(&self) -> &BlockStructure {
        &self.blocks
    }

    pub fn nblocks(&self) -> usize {
        self.blocks.nblocks()
    }

    pub fn horizon(&self) -> u64 {
        self.blocks.horizon()
    }

    pub fn b(&self, n: usize) -> u64 {
        self.blocks.b(n)
    }

    pub fn tau(&self, m: usize) -> i64 {
        self.tau[m]
    }

    pub fn taus(&self) -> &[i64] {
        &self.tau
    }

    pub fn r_mode(&self) -> &RMode {
        &self.r
    }

    /// `log2 v_n = −τ_{φ(n)}` for `n ≥ 1`.
    pub fn v_log2(&self, n: usize) -> i64 {
        -self.tau[phi(n)]
    }

    pub fn v(&self, n: usize) -> Dyadic {
        Dyadic::pow2(self.v_log2(n))
    }

    pub fn r_inv(&self, n: usize) -> &Dyadic {
        &self.r_inv[n]
    }

    /// The eigen-period scalar base `R_n⁻¹ W_n`.
    pub fn period_base(&self, n: usize) -> Dyadic {
        let mut c = Dyadic::pow2(self.c_log2[n]);
        if self.c_neg[n] {
            c.neg_assign();
        }
        c
    }

    pub fn weight(&self, i: u64) -> Result<Dyadic> {
        self.blocks.weight(i)
    }

    /// `W_n = Π_{b_n<j<b_{n+1}} w_j`, multiplied out term by term.
    pub fn block_product_w(&self, n: usize) -> Result<Dyadic> {
        let mut acc = Dyadic::one();
        for j in self.b(n) + 1..self.b(n + 1) {
            acc = acc.checked_mul(&self.weight(j)?)?;
        }
        Ok(acc)
    }

    /// The hypotheses under which the inverse formula is used: `R = 1` and
    /// `sup_{n∈φ⁻¹(m)} |v_n| = 2^{−τ_m} ≤ 2^{−m}` for every materialized `m`.
    pub fn inverse_supported(&self) -> Result<()> {
        match &self.inverse_blocker {
            Some(why) => Err(Error::InvertibilityUnsupported(why.clone())),
            None => Ok(()),
        }
    }

    fn check_support(&self, x: &FinVec) -> Result<()> {
        match x.support_max() {
            Some(k) if k >= self.horizon() => {
                Err(Error::HorizonExceeded { index: k, limit: self.horizon() })
            }
            _ => Ok(()),
        }
    }

    fn push_image_t(&self, k: u64, c: &Dyadic, out: &mut Vec<(u64, Dyadic)>) -> Result<()> {
        let n = self.blocks.block_of(k)?;
        if k + 1 < self.b(n + 1) {
            out.push((k + 1, c.checked_mul_pow2(self.blocks.weight_log2(k + 1)?)?));
        } else {
            if n > 0 {
                out.push((self.b(phi(n)), c.checked_mul_pow2(self.v_log2(n))?));
            }
            out.push((self.b(n), -c.checked_mul(&self.r_inv[n])?));
        }
        Ok(())
    }

    fn push_image_t_inv(&self, k: u64, c: &Dyadic, out: &mut Vec<(u64, Dyadic)>) -> Result<()> {
        let n = self.blocks.block_of(k)?;
        if k > self.b(n) {
            out.push((k - 1, c.checked_mul_pow2(-self.blocks.weight_log2(k)?)?));
            return Ok(());
        }
        out.push((self.b(n + 1) - 1, -c));
        let mut cur = n;
        let mut prod = 0i64;
        while cur != 0 {
            prod = checked_exp_add(prod, self.v_log2(cur))?;
            let next = phi(cur);
            out.push((self.b(next + 1) - 1, -c.checked_mul_pow2(prod)?));
            cur = next;
        }
        Ok(())
    }

    pub fn apply_t(&self, x: &FinVec) -> Result<FinVec> {
        self.check_support(x)?;
        let mut out = Vec::with_capacity(x.len() + 2);
        for (k, c) in x.iter() {
            self.push_image_t(k, c, &mut out)?;
        }
        Ok(FinVec::from_entries(out))
    }

    pub fn apply_t_inv(&self, x: &FinVec) -> Result<FinVec> {
        self.inverse_supported()?;
        self.check_support(x)?;
        let mut out = Vec::with_capacity(x.len() + 2);
        for (k, c) in x.iter() {
            self.push_image_t_inv(k, c, &mut out)?;
        }
        Ok(FinVec::from_entries(out))
    }

    /// `T^k x` by `|k|` single steps.
    pub fn apply_t_iter(&self, x: &FinVec, k: i64) -> Result<FinVec> {
        let mut y = x.clone();
        for _ in 0..k.unsigned_abs() {
            y = if k > 0 { self.apply_t(&y)? } else { self.apply_t_inv(&y)? };
        }
        Ok(y)
    }

    /// Exact `T^k x` for any signed `k`.
    ///
    /// With `N` the block holding the largest support index and
    /// `P = 2(b_{N+1} − b_N)`, `T^P` acts on every block `m ≤ N` as the scalar
    /// `(R_m⁻¹W_m)^{P/Δ_m}`, so `⌊|k|/P⌋` periods collapse to one scaling. The
    /// remainder is applied coordinate by coordinate, jumping over runs of
    /// in-block shifts and reducing each spawned coordinate by its own
    /// block period.
    pub fn apply_t_power(&self, x: &FinVec, k: i64) -> Result<FinVec> {
        if k < 0 {
            self.inverse_supported()?;
        }
        self.check_support(x)?;
        let Some(top) = x.support_max() else {
            return Ok(FinVec::zero());
        };
        if k == 0 {
            return Ok(x.clone());
        }
        let n_top = self.blocks.block_of(top)?;
        let period = 2 * self.blocks.big_delta_n(n_top);
        let steps = k.unsigned_abs();
        let (q, r) = (steps / period, steps % period);
        let mut out = Vec::with_capacity(x.len() * 4);
        for (i, c) in x.iter() {
            let mut c = c.clone();
            if q > 0 {
                let m = self.blocks.block_of(i)?;
                let reps = q
                    .checked_mul(period / self.blocks.big_delta_n(m))
                    .ok_or_else(|| Error::BudgetExceeded("power too large".into()))?;
                let e = mul_exp(self.c_log2[m], reps)?;
                c.mul_pow2_assign(if k > 0 { e } else { -e })?;
            }
            if k > 0 {
                self.advance_forward(i, c, r, &mut out)?;
            } else {
                self.advance_backward(i, c, r, &mut out)?;
            }
        }
        Ok(FinVec::from_entries(out))
    }

    /// Pushes `T^steps (c e_k)` onto `out`.
    fn advance_forward(
        &self,
        mut k: u64,
        mut c: Dyadic,
        mut steps: u64,
        out: &mut Vec<(u64, Dyadic)>,
    ) -> Result<()> {
        loop {
            let n = self.blocks.block_of(k)?;
            let len = self.blocks.big_delta_n(n);
            if steps >= 2 * len {
                let e = mul_exp(self.c_log2[n], 2 * (steps / (2 * len)))?;
                c.mul_pow2_assign(e)?;
                steps %= 2 * len;
            }
            let off = k - self.b(n);
            let to_end = len - 1 - off;
            if steps <= to_end {
                let gain = self.blocks.weight_prefix_log2(n, off + steps)
                    - self.blocks.weight_prefix_log2(n, off);
                c.mul_pow2_assign(gain)?;
                out.push((k + steps, c));
                return Ok(());
            }
            let gain = self.blocks.weight_prefix_log2(n, len - 1)
                - self.blocks.weight_prefix_log2(n, off);
            c.mul_pow2_assign(gain)?;
            steps -= to_end + 1;
            if n > 0 {
                let spawned = c.checked_mul_pow2(self.v_log2(n))?;
                self.advance_forward(self.b(phi(n)), spawned, steps, out)?;
            }
            c = -c.checked_mul(&self.r_inv[n])?;
            k = self.b(n);
        }
    }

    /// Pushes `T^{−steps} (c e_k)` onto `out`. Requires `R = 1`.
    fn advance_backward(
        &self,
        mut k: u64,
        mut c: Dyadic,
        mut steps: u64,
        out: &mut Vec<(u64, Dyadic)>,
    ) -> Result<()> {
        loop {
            let n = self.blocks.block_of(k)?;
            let len = self.blocks.big_delta_n(n);
            if steps >= 2 * len {
                let e = mul_exp(self.c_log2[n], 2 * (steps / (2 * len)))?;
                c.mul_pow2_assign(-e)?;
                steps %= 2 * len;
            }
            let off = k - self.b(n);
            if steps <= off {
                let gain = self.blocks.weight_prefix_log2(n, off - steps)
                    - self.blocks.weight_prefix_log2(n, off);
                c.mul_pow2_assign(gain)?;
                out.push((k - steps, c));
                return Ok(());
            }
            c.mul_pow2_assign(-self.blocks.weight_prefix_log2(n, off))?;
            steps -= off + 1;
            c.neg_assign();
            let mut cur = n;
            let mut prod = 0i64;
            while cur != 0 {
                prod = checked_exp_add(prod, self.v_log2(cur))?;
                let next = phi(cur);
                let spawned = c.checked_mul_pow2(prod)?;
                self.advance_backward(self.b(next + 1) - 1, spawned, steps, out)?;
                cur = next;
            }
            k = self.b(n + 1) - 1;
        }
    }

    /// `P_n x`: the coordinates of block `n`.
    pub fn proj_block(&self, x: &FinVec, n: usize) -> FinVec {
        x.restrict_range(self.b(n), self.b(n + 1))
    }

    /// `P_I x = Σ_{n∈I} P_n x`.
    pub fn proj_set(&self, x: &FinVec, set: &[usize]) -> FinVec {
        let mut keep: Vec<(u64, u64)> =
            set.iter().map(|&n| (self.b(n), self.b(n + 1))).collect();
        keep.sort_unstable();
        x.restrict(|i| {
            let pos = keep.partition_point(|&(lo, _)| lo <= i);
            pos > 0 && i < keep[pos - 1].1
        })
    }
}

fn checked_exp_add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or_else(|| Error::BudgetExceeded("exponent overflows i64".into()))
}

fn mul_exp(e: i64, reps: u64) -> Result<i64> {
    i64::try_from(reps)
        .ok()
        .and_then(|r| e.checked_mul(r))
        .ok_or_else(|| Error::BudgetExceeded("exponent overflows i64".into()))
}
