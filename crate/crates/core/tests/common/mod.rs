//! Test-side oracles written straight from the operator definition, sharing
//! no code with the library beyond the schedule parameters.

#![allow(dead_code)]

use std::collections::BTreeMap;

use fhc_core::schedule::Generation;
use fhc_core::{derive_structure, Dyadic, FinVec, OperatorSpec, Schedule, TauSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Q = BigRational;
pub type QVec = BTreeMap<u64, Q>;

pub fn canonical(k_max: u32) -> OperatorSpec {
    derive_structure(&Schedule::canonical(TauSpec::synth(2), k_max)).unwrap()
}

pub fn toy() -> OperatorSpec {
    derive_structure(&Schedule::geometric(4, TauSpec::synth(2), 9)).unwrap()
}

pub fn pow2q(e: i64) -> Q {
    let one = BigInt::one();
    if e >= 0 {
        Q::from_integer(one << e as u64)
    } else {
        Q::new(one.clone(), one << (-e) as u64)
    }
}

pub fn to_q(v: &FinVec) -> QVec {
    v.iter().map(|(i, c)| (i, c.to_rational())).collect()
}

pub fn from_q(v: &QVec) -> FinVec {
    FinVec::from_entries(
        v.iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(&i, c)| (i, Dyadic::from_fraction(c.numer(), c.denom()).unwrap()))
            .collect(),
    )
}

pub fn norm_q(v: &QVec) -> Q {
    v.values().map(|c| c.abs()).fold(Q::zero(), |a, b| a + b)
}

fn add_into(acc: &mut QVec, i: u64, c: Q) {
    let slot = acc.entry(i).or_insert_with(Q::zero);
    *slot += c;
    if slot.is_zero() {
        acc.remove(&i);
    }
}

/// Block layout and weights recomputed from `(δ, η, Δ)` per generation.
pub struct Layout {
    pub gens: Vec<Generation>,
    pub taus: Vec<i64>,
    pub bounds: Vec<u64>,
}

fn generation_of(n: usize) -> usize {
    let mut k = 0;
    while (1usize << k) <= n {
        k += 1;
    }
    k
}

fn parent(n: usize) -> usize {
    let k = generation_of(n);
    if k == 0 {
        0
    } else {
        n - (1 << (k - 1))
    }
}

impl Layout {
    pub fn of(spec: &OperatorSpec, nblocks: usize) -> Self {
        let gens = spec.blocks().generations().to_vec();
        let mut bounds = vec![0u64];
        for n in 0..nblocks {
            bounds.push(bounds[n] + gens[generation_of(n)].big_delta);
        }
        Layout { gens, taus: spec.taus().to_vec(), bounds }
    }

    pub fn dim(&self) -> u64 {
        *self.bounds.last().unwrap()
    }

    pub fn block(&self, i: u64) -> usize {
        self.bounds.iter().rposition(|&b| b <= i).unwrap()
    }

    pub fn weight(&self, i: u64) -> Q {
        let n = self.block(i);
        let g = &self.gens[generation_of(n)];
        let q = i - self.bounds[n];
        assert!(q > 0);
        let half = Q::new(BigInt::one(), BigInt::from(2));
        if q <= g.eta {
            half
        } else if q + 2 * g.delta < g.big_delta {
            Q::one()
        } else if q + g.delta < g.big_delta {
            half
        } else {
            Q::from_integer(BigInt::from(2))
        }
    }

    pub fn v(&self, n: usize) -> Q {
        pow2q(-self.taus[parent(n)])
    }

    pub fn t_basis(&self, i: u64) -> QVec {
        let n = self.block(i);
        let mut out = QVec::new();
        if i + 1 < self.bounds[n + 1] {
            add_into(&mut out, i + 1, self.weight(i + 1));
        } else {
            if n > 0 {
                add_into(&mut out, self.bounds[parent(n)], self.v(n));
            }
            add_into(&mut out, self.bounds[n], -Q::one());
        }
        out
    }

    /// `T⁻¹ e_{b_n} = −e_{b_{n+1}−1} + v_n T⁻¹ e_{b_{φ(n)}}`.
    fn t_inv_start(&self, n: usize) -> QVec {
        let mut out = QVec::new();
        add_into(&mut out, self.bounds[n + 1] - 1, -Q::one());
        if n > 0 {
            let v = self.v(n);
            for (i, c) in self.t_inv_start(parent(n)) {
                add_into(&mut out, i, c * &v);
            }
        }
        out
    }

    pub fn t_inv_basis(&self, i: u64) -> QVec {
        let n = self.block(i);
        if i > self.bounds[n] {
            let mut out = QVec::new();
            add_into(&mut out, i - 1, self.weight(i).recip());
            out
        } else {
            self.t_inv_start(n)
        }
    }

    pub fn apply(&self, x: &QVec, inverse: bool) -> QVec {
        let mut out = QVec::new();
        for (&i, c) in x {
            let img = if inverse { self.t_inv_basis(i) } else { self.t_basis(i) };
            for (k, a) in img {
                add_into(&mut out, k, a * c);
            }
        }
        out
    }

    pub fn power(&self, x: &QVec, k: i64) -> QVec {
        let mut cur = x.clone();
        for _ in 0..k.unsigned_abs() {
            cur = self.apply(&cur, k < 0);
        }
        cur
    }

    /// Dense matrix of `T` on the section, column `k` = `T e_k`.
    pub fn matrix(&self) -> Vec<Vec<Q>> {
        let d = self.dim() as usize;
        let mut m = vec![vec![Q::zero(); d]; d];
        for k in 0..d {
            for (r, c) in self.t_basis(k as u64) {
                m[r as usize][k] = c;
            }
        }
        m
    }
}

/// Gauss–Jordan inverse over the rationals.
pub fn invert(m: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let d = m.len();
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let mut inv: Vec<Vec<Q>> =
        (0..d).map(|i| (0..d).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect();
    for col in 0..d {
        let piv = (col..d).find(|&r| !a[r][col].is_zero()).expect("singular section");
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].clone();
        for j in 0..d {
            a[col][j] = &a[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..d {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..d {
                    let (x, y) = (&f * &a[col][j], &f * &inv[col][j]);
                    a[r][j] -= x;
                    inv[r][j] -= y;
                }
            }
        }
    }
    inv
}

pub fn matvec(m: &[Vec<Q>], x: &QVec) -> QVec {
    let mut out = QVec::new();
    for (&k, c) in x {
        for (r, row) in m.iter().enumerate() {
            if !row[k as usize].is_zero() {
                add_into(&mut out, r as u64, &row[k as usize] * c);
            }
        }
    }
    out
}

pub fn random_dyadic(rng: &mut ChaCha8Rng) -> Dyadic {
    let m: i64 = rng.gen_range(-64..=64);
    let m = if m == 0 { 1 } else { m };
    Dyadic::new(m, rng.gen_range(-12..=4))
}

/// Random vector with up to `nnz` coordinates in `[lo, hi)`.
pub fn random_vec(rng: &mut ChaCha8Rng, lo: u64, hi: u64, nnz: usize) -> FinVec {
    let count = rng.gen_range(1..=nnz);
    FinVec::from_entries((0..count).map(|_| (rng.gen_range(lo..hi), random_dyadic(rng))).collect())
}
