//! Dense matrices of `T` and `T⁻¹` restricted to `span{e_k : k < b_N}`.
//!
//! The section is invariant under both maps, so these matrices are an exact
//! oracle for the sparse formulas.

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::finvec::FinVec;
use crate::operator::OperatorSpec;

/// Largest section dimension materialized densely.
pub const MAX_SECTION_DIM: u64 = 2048;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<Dyadic>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        DenseMatrix { dim, data: vec![Dyadic::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Dyadic::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &Dyadic {
        &self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Dyadic) {
        self.data[row * self.dim + col] = v;
    }

    /// Column `col` as a sparse vector.
    pub fn column(&self, col: usize) -> FinVec {
        FinVec::from_entries(
            (0..self.dim)
                .filter(|&r| !self.get(r, col).is_zero())
                .map(|r| (r as u64, self.get(r, col).clone()))
                .collect(),
        )
    }

    pub fn matvec(&self, x: &FinVec) -> FinVec {
        let mut acc = vec![Dyadic::zero(); self.dim];
        for (k, c) in x.iter() {
            let col = k as usize;
            for (r, slot) in acc.iter_mut().enumerate() {
                let a = self.get(r, col);
                if !a.is_zero() {
                    *slot = &*slot + &(a * c);
                }
            }
        }
        FinVec::from_entries(acc.into_iter().enumerate().map(|(i, c)| (i as u64, c)).collect())
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let s = out.get(i, j) + &(a * b);
                        out.set(i, j, s);
                    }
                }
            }
        }
        out
    }
}

fn section_dim(spec: &OperatorSpec, n: usize) -> Result<usize> {
    if n > spec.nblocks() {
        return Err(Error::HorizonExceeded { index: n as u64, limit: spec.nblocks() as u64 });
    }
    let dim = spec.b(n);
    if dim > MAX_SECTION_DIM {
        return Err(Error::BudgetExceeded(format!(
            "section dimension {dim} exceeds {MAX_SECTION_DIM}"
        )));
    }
    Ok(dim as usize)
}

fn from_columns(dim: usize, mut col: impl FnMut(u64) -> Result<FinVec>) -> Result<DenseMatrix> {
    let mut m = DenseMatrix::zeros(dim);
    for k in 0..dim {
        for (r, c) in col(k as u64)?.iter() {
            m.set(r as usize, k, c.clone());
        }
    }
    Ok(m)
}

/// The `b_N × b_N` matrix whose column `k` holds `T e_k`.
pub fn finite_section_matrix(spec: &OperatorSpec, n: usize) -> Result<DenseMatrix> {
    let dim = section_dim(spec, n)?;
    from_columns(dim, |k| spec.apply_t(&FinVec::basis(k)))
}

/// The `b_N × b_N` matrix whose column `k` holds `T⁻¹ e_k`.
pub fn finite_section_inverse(spec: &OperatorSpec, n: usize) -> Result<DenseMatrix> {
    let dim = section_dim(spec, n)?;
    from_columns(dim, |k| spec.apply_t_inv(&FinVec::basis(k)))
}
