//! Dense covariant tensors of small rank.
//!
//! Applying an almost complex operator to a single slot of an alternating
//! form generally breaks the alternation, so those operations live on a
//! general `(0, s)`-tensor type rather than on [`Form`].

use super::multi_index::Subsets;
use super::Form;
use crate::error::{GeomError, Result};

/// A `(0, s)`-tensor on R^n, stored densely in row-major slot order.
#[derive(Debug, Clone, PartialEq)]
pub struct CovTensor {
    dim: usize,
    rank: usize,
    data: Vec<f64>,
}

impl CovTensor {
    pub fn zero(dim: usize, rank: usize) -> Self {
        CovTensor {
            dim,
            rank,
            data: vec![0.0; dim.pow(rank as u32)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn offset(&self, idx: &[usize]) -> usize {
        let mut o = 0;
        for &i in idx {
            o = o * self.dim + i;
        }
        o
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn add_assign(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] += v;
    }

    /// Full antisymmetric extension of a form to a dense tensor.
    pub fn from_form(f: &Form) -> Self {
        let mut t = CovTensor::zero(f.dim(), f.degree());
        let mut idx = vec![0usize; f.degree()];
        fill_from_form(&mut t, f, &mut idx, 0);
        t
    }

    /// Reinterpret an already-alternating tensor as a form; fails when the
    /// alternation defect exceeds `tol`.
    pub fn to_form(&self, tol: f64) -> Result<Form> {
        let alt = self.alternate();
        let defect = self
            .data
            .iter()
            .zip(&alt.data)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        if defect > tol {
            return Err(GeomError::invariant("tensor is not alternating", defect));
        }
        Ok(alt.alternating_part_as_form())
    }

    /// Antisymmetrization `Alt(T)` with the projector normalization `1/s!`.
    pub fn alternate(&self) -> CovTensor {
        let s = self.rank;
        let mut out = CovTensor::zero(self.dim, s);
        let perms = permutations(s);
        let fact = perms.len() as f64;
        let mut idx = vec![0usize; s];
        let mut pidx = vec![0usize; s];
        loop {
            let mut total = 0.0;
            for (perm, sign) in &perms {
                for (k, &pk) in perm.iter().enumerate() {
                    pidx[k] = idx[pk];
                }
                total += sign * self.get(&pidx);
            }
            out.set(&idx, total / fact);
            if !advance(&mut idx, self.dim) {
                break;
            }
        }
        out
    }

    /// Read the coefficients of an alternating tensor off its increasing
    /// multi-indices.
    fn alternating_part_as_form(&self) -> Form {
        let mut f = Form::zero(self.dim, self.rank);
        for (r, idx) in Subsets::new(self.dim, self.rank).enumerate() {
            f.coeffs_mut()[r] = self.get(&idx);
        }
        f
    }

    /// Apply an operator to one slot with a sign flip:
    /// `(J_(slot) B)(.., X, ..) = -B(.., J X, ..)`. Slots are 0-based.
    pub fn apply_j_slot(&self, j: &[Vec<f64>], slot: usize) -> Result<CovTensor> {
        if slot >= self.rank {
            return Err(GeomError::InvalidArgument(format!(
                "slot {} out of range for rank {}",
                slot, self.rank
            )));
        }
        let n = self.dim;
        let mut out = CovTensor::zero(n, self.rank);
        let mut idx = vec![0usize; self.rank];
        let mut src = vec![0usize; self.rank];
        loop {
            let mut total = 0.0;
            src.copy_from_slice(&idx);
            let i = idx[slot];
            for (m, jm) in j.iter().enumerate() {
                // J e_i = sum_m J[m][i] e_m
                let c = jm[i];
                if c != 0.0 {
                    src[slot] = m;
                    total -= c * self.get(&src);
                }
            }
            out.set(&idx, total);
            if !advance(&mut idx, n) {
                break;
            }
        }
        Ok(out)
    }

    /// `(J B)(X_1, .., X_s) = (-1)^s B(J X_1, .., J X_s)`, which equals the
    /// composition of the single-slot action over every slot.
    pub fn apply_j_all(&self, j: &[Vec<f64>]) -> Result<CovTensor> {
        let mut t = self.clone();
        for slot in 0..self.rank {
            t = t.apply_j_slot(j, slot)?;
        }
        Ok(t)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |a, x| a.max(x.abs()))
    }

    pub fn sub(&self, other: &CovTensor) -> CovTensor {
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        CovTensor {
            dim: self.dim,
            rank: self.rank,
            data,
        }
    }
}

fn fill_from_form(t: &mut CovTensor, f: &Form, idx: &mut Vec<usize>, slot: usize) {
    if slot == idx.len() {
        let v = f.coeff_dense(idx);
        t.set(idx, v);
        return;
    }
    for i in 0..t.dim {
        idx[slot] = i;
        fill_from_form(t, f, idx, slot + 1);
    }
}

impl Form {
    /// Evaluation on basis vectors with arbitrary (possibly repeating) index
    /// order; the antisymmetric extension of the stored coefficients.
    pub fn coeff_dense(&self, indices: &[usize]) -> f64 {
        self.coeff(indices)
    }
}

fn advance(idx: &mut [usize], dim: usize) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < dim {
            return true;
        }
        idx[k] = 0;
    }
    false
}

/// All permutations of `{0..s}` with their signs; `s` never exceeds 4 here.
fn permutations(s: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..s).collect();
    permute_rec(&mut items, 0, &mut out);
    out
}

fn permute_rec(items: &mut Vec<usize>, k: usize, out: &mut Vec<(Vec<usize>, f64)>) {
    let s = items.len();
    if k == s {
        let mut inv = 0;
        for i in 0..s {
            for j in (i + 1)..s {
                if items[i] > items[j] {
                    inv += 1;
                }
            }
        }
        out.push((items.clone(), if inv % 2 == 0 { 1.0 } else { -1.0 }));
        return;
    }
    for i in k..s {
        items.swap(k, i);
        permute_rec(items, k + 1, out);
        items.swap(k, i);
    }
}
