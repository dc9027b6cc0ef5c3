//! Dense exterior algebra over R^n for n <= 8.
//!
//! A [`Form`] is a degree-`p` alternating tensor stored as one coefficient
//! per strictly increasing multi-index, in lexicographic order. The metric
//! enters only through a [`Gram`] matrix of the working basis, so the same
//! kernels serve orthonormal frames and chart-coordinate frames alike. All
//! values are immutable after construction and every operation is a pure
//! function, so fields of forms can be evaluated concurrently over sample
//! grids without shared state.
//!
//! ```
//! use spin7lab::forms::{hodge, inner, Form, Gram, Orientation};
//!
//! let g = Gram::identity(4);
//! let o = Orientation::positive();
//! let a = Form::basis(4, &[0, 1])?;
//! // the star of a coordinate plane is the complementary plane
//! assert_eq!(hodge(&a, &g, o)?.coeff(&[2, 3]), 1.0);
//! // and pairing a form with its star recovers the norm
//! assert_eq!(inner(&a, &a, &g), 1.0);
//! # Ok::<(), spin7lab::GeomError>(())
//! ```

pub mod fd;
pub mod multi_index;
pub mod tensor;

use crate::error::{GeomError, Result};
use crate::linalg;
use multi_index::{binomial, complement_sign, merge_sign, rank, sort_sign, Subsets};

/// Symmetric positive-definite matrix of inner products of the working basis.
#[derive(Debug, Clone)]
pub struct Gram {
    dim: usize,
    kind: GramKind,
    mat: Vec<f64>,
    inv: Vec<f64>,
    det: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum GramKind {
    Identity,
    /// c * identity
    Scalar(f64),
    General,
}

impl Gram {
    pub fn identity(dim: usize) -> Self {
        let mut mat = vec![0.0; dim * dim];
        for i in 0..dim {
            mat[i * dim + i] = 1.0;
        }
        Gram {
            dim,
            kind: GramKind::Identity,
            inv: mat.clone(),
            mat,
            det: 1.0,
        }
    }

    /// `c * identity`; the conformally flat case.
    pub fn scalar(dim: usize, c: f64) -> Result<Self> {
        if c <= 0.0 {
            return Err(GeomError::NotPositiveDefinite);
        }
        let mut mat = vec![0.0; dim * dim];
        let mut inv = vec![0.0; dim * dim];
        for i in 0..dim {
            mat[i * dim + i] = c;
            inv[i * dim + i] = 1.0 / c;
        }
        Ok(Gram {
            dim,
            kind: GramKind::Scalar(c),
            mat,
            inv,
            det: c.powi(dim as i32),
        })
    }

    /// General symmetric positive-definite Gram matrix (row-major).
    pub fn new(dim: usize, mat: Vec<f64>) -> Result<Self> {
        if mat.len() != dim * dim {
            return Err(GeomError::DimensionMismatch(format!(
                "Gram matrix needs {}x{} entries",
                dim, dim
            )));
        }
        let scale = mat.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        for i in 0..dim {
            for j in 0..i {
                if (mat[i * dim + j] - mat[j * dim + i]).abs() > 1e-10 * (1.0 + scale) {
                    return Err(GeomError::InvalidArgument(
                        "Gram matrix must be symmetric".into(),
                    ));
                }
            }
        }
        linalg::cholesky(dim, &mat)?;
        let det = linalg::det(dim, &mat);
        let inv = linalg::inverse(dim, &mat)?;
        Ok(Gram {
            dim,
            kind: GramKind::General,
            mat,
            inv,
            det,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.mat[i * self.dim + j]
    }

    pub fn inv_entry(&self, i: usize, j: usize) -> f64 {
        self.inv[i * self.dim + j]
    }

    pub fn inner_vec(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.kind {
            GramKind::Identity => linalg::dot(x, y),
            GramKind::Scalar(c) => c * linalg::dot(x, y),
            GramKind::General => {
                let mut s = 0.0;
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        s += x[i] * self.mat[i * self.dim + j] * y[j];
                    }
                }
                s
            }
        }
    }

    /// Raise the index of a covector: `v = G^{-1} mu`.
    pub fn raise(&self, mu: &[f64]) -> Vec<f64> {
        match self.kind {
            GramKind::Identity => mu.to_vec(),
            GramKind::Scalar(c) => linalg::scale(mu, 1.0 / c),
            GramKind::General => (0..self.dim)
                .map(|i| (0..self.dim).map(|j| self.inv[i * self.dim + j] * mu[j]).sum())
                .collect(),
        }
    }

    /// Lower the index of a vector: `mu = G v`.
    pub fn lower(&self, v: &[f64]) -> Vec<f64> {
        match self.kind {
            GramKind::Identity => v.to_vec(),
            GramKind::Scalar(c) => linalg::scale(v, c),
            GramKind::General => (0..self.dim)
                .map(|i| (0..self.dim).map(|j| self.mat[i * self.dim + j] * v[j]).sum())
                .collect(),
        }
    }

    /// Minor of the inverse Gram selected by rows `i_set` and columns `j_set`;
    /// this is the inner product of basis p-covectors `e^I` and `e^J`.
    fn inv_minor(&self, i_set: &[usize], j_set: &[usize]) -> f64 {
        match self.kind {
            GramKind::Identity => {
                if i_set == j_set {
                    1.0
                } else {
                    0.0
                }
            }
            GramKind::Scalar(c) => {
                if i_set == j_set {
                    (1.0 / c).powi(i_set.len() as i32)
                } else {
                    0.0
                }
            }
            GramKind::General => {
                let p = i_set.len();
                match p {
                    0 => 1.0,
                    1 => self.inv[i_set[0] * self.dim + j_set[0]],
                    _ => {
                        let mut m = vec![0.0; p * p];
                        for (a, &i) in i_set.iter().enumerate() {
                            for (b, &j) in j_set.iter().enumerate() {
                                m[a * p + b] = self.inv[i * self.dim + j];
                            }
                        }
                        linalg::det(p, &m)
                    }
                }
            }
        }
    }

    fn is_orthogonal_kind(&self) -> bool {
        !matches!(self.kind, GramKind::General)
    }
}

/// Orientation relative to the lexicographic top form of the working basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation {
    sign: f64,
}

impl Orientation {
    pub fn positive() -> Self {
        Orientation { sign: 1.0 }
    }

    pub fn negative() -> Self {
        Orientation { sign: -1.0 }
    }

    pub fn from_sign(s: f64) -> Result<Self> {
        if s == 1.0 || s == -1.0 {
            Ok(Orientation { sign: s })
        } else {
            Err(GeomError::InvalidArgument("orientation sign must be +-1".into()))
        }
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }
}

/// Metric volume form `sign * sqrt(det G) e^{0...n-1}`.
pub fn volume_form(g: &Gram, o: Orientation) -> Form {
    let mut v = Form::zero(g.dim(), g.dim());
    v.coeffs[0] = o.sign() * g.det().sqrt();
    v
}

/// A degree-`p` alternating tensor on R^n in dense lexicographic storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Form {
    dim: usize,
    degree: usize,
    coeffs: Vec<f64>,
}

impl Form {
    pub fn zero(dim: usize, degree: usize) -> Self {
        debug_assert!(degree <= dim && dim <= 8);
        Form {
            dim,
            degree,
            coeffs: vec![0.0; binomial(dim, degree)],
        }
    }

    pub fn new(dim: usize, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        if dim == 0 || dim > 8 {
            return Err(GeomError::DimensionMismatch(format!(
                "form dimension {} outside 1..=8",
                dim
            )));
        }
        if degree > dim {
            return Err(GeomError::DegreeOverflow(format!(
                "degree {} exceeds dimension {}",
                degree, dim
            )));
        }
        if coeffs.len() != binomial(dim, degree) {
            return Err(GeomError::DimensionMismatch(format!(
                "expected {} coefficients, got {}",
                binomial(dim, degree),
                coeffs.len()
            )));
        }
        Ok(Form { dim, degree, coeffs })
    }

    pub fn scalar(dim: usize, value: f64) -> Self {
        Form {
            dim,
            degree: 0,
            coeffs: vec![value],
        }
    }

    /// Wedge of basis covectors `e^{i1} ^ ... ^ e^{ip}`; indices need not be
    /// sorted, the sign of sorting is absorbed.
    pub fn basis(dim: usize, indices: &[usize]) -> Result<Self> {
        let mut idx = indices.to_vec();
        let sign = sort_sign(&mut idx);
        if sign == 0.0 {
            return Ok(Form::zero(dim, indices.len()));
        }
        if idx.iter().any(|&i| i >= dim) {
            return Err(GeomError::DimensionMismatch(format!(
                "basis index out of range for dimension {}",
                dim
            )));
        }
        let mut f = Form::zero(dim, indices.len());
        f.coeffs[rank(dim, &idx)] = sign;
        Ok(f)
    }

    /// The covector with the given components.
    pub fn one_form(components: &[f64]) -> Self {
        Form {
            dim: components.len(),
            degree: 1,
            coeffs: components.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// Coefficient on a (not necessarily sorted) multi-index.
    pub fn coeff(&self, indices: &[usize]) -> f64 {
        debug_assert_eq!(indices.len(), self.degree);
        let mut idx = indices.to_vec();
        let sign = sort_sign(&mut idx);
        if sign == 0.0 {
            0.0
        } else {
            sign * self.coeffs[rank(self.dim, &idx)]
        }
    }

    pub fn set_coeff(&mut self, indices: &[usize], value: f64) {
        let mut idx = indices.to_vec();
        let sign = sort_sign(&mut idx);
        assert!(sign != 0.0, "repeated index in multi-index");
        self.coeffs[rank(self.dim, &idx)] = sign * value;
    }

    /// Evaluate on `p` vectors: `sum_I a_I det V[I, :]`.
    pub fn eval(&self, vectors: &[&[f64]]) -> f64 {
        debug_assert_eq!(vectors.len(), self.degree);
        let p = self.degree;
        if p == 0 {
            return self.coeffs[0];
        }
        let mut total = 0.0;
        let mut minor = vec![0.0; p * p];
        for (r, idx) in Subsets::new(self.dim, p).enumerate() {
            let a = self.coeffs[r];
            if a == 0.0 {
                continue;
            }
            for (row, &i) in idx.iter().enumerate() {
                for (col, v) in vectors.iter().enumerate() {
                    minor[row * p + col] = v[i];
                }
            }
            total += a * linalg::det(p, &minor);
        }
        total
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.abs() <= tol)
    }

    /// Max-norm of the raw coefficients (frame-dependent).
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()))
    }

    /// Metric norm `sqrt(<a, a>_g)`.
    pub fn norm(&self, g: &Gram) -> f64 {
        inner(self, self, g).max(0.0).sqrt()
    }

    /// Exterior product.
    pub fn wedge(&self, other: &Form) -> Result<Form> {
        if self.dim != other.dim {
            return Err(GeomError::DimensionMismatch(format!(
                "wedge of forms on R^{} and R^{}",
                self.dim, other.dim
            )));
        }
        let degree = self.degree + other.degree;
        if degree > self.dim {
            return Err(GeomError::DegreeOverflow(format!(
                "wedge degree {} exceeds dimension {}",
                degree, self.dim
            )));
        }
        let mut out = Form::zero(self.dim, degree);
        let mut merged = Vec::with_capacity(degree);
        let a_sets: Vec<Vec<usize>> = Subsets::new(self.dim, self.degree).collect();
        let b_sets: Vec<Vec<usize>> = Subsets::new(self.dim, other.degree).collect();
        for (ra, ia) in a_sets.iter().enumerate() {
            let ca = self.coeffs[ra];
            if ca == 0.0 {
                continue;
            }
            for (rb, ib) in b_sets.iter().enumerate() {
                let cb = other.coeffs[rb];
                if cb == 0.0 {
                    continue;
                }
                let sign = merge_sign(ia, ib, &mut merged);
                if sign != 0.0 {
                    out.coeffs[rank(self.dim, &merged)] += sign * ca * cb;
                }
            }
        }
        Ok(out)
    }

    /// Interior product with a vector (metric-free contraction on the first
    /// slot): `(x . a)(v1,..) = a(x, v1, ..)`.
    pub fn interior(&self, x: &[f64]) -> Result<Form> {
        if x.len() != self.dim {
            return Err(GeomError::DimensionMismatch(
                "vector dimension differs from form dimension".into(),
            ));
        }
        if self.degree == 0 {
            return Err(GeomError::DegreeOverflow(
                "interior product of a 0-form".into(),
            ));
        }
        let p = self.degree;
        let mut out = Form::zero(self.dim, p - 1);
        let mut reduced = Vec::with_capacity(p - 1);
        for (r, idx) in Subsets::new(self.dim, p).enumerate() {
            let a = self.coeffs[r];
            if a == 0.0 {
                continue;
            }
            for (pos, &i) in idx.iter().enumerate() {
                let xi = x[i];
                if xi == 0.0 {
                    continue;
                }
                reduced.clear();
                reduced.extend(idx.iter().filter(|&&j| j != i));
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                out.coeffs[rank(self.dim, &reduced)] += sign * xi * a;
            }
        }
        Ok(out)
    }

    /// Pullback along a linear map; see [`LinearMap`].
    pub fn pullback(&self, l: &LinearMap) -> Result<Form> {
        if l.out_dim != self.dim {
            return Err(GeomError::DimensionMismatch(format!(
                "pullback of a form on R^{} along a map into R^{}",
                self.dim, l.out_dim
            )));
        }
        let p = self.degree;
        if p > l.in_dim {
            return Err(GeomError::DegreeOverflow(format!(
                "degree {} form cannot pull back to R^{}",
                p, l.in_dim
            )));
        }
        let mut out = Form::zero(l.in_dim, p);
        if p == 0 {
            out.coeffs[0] = self.coeffs[0];
            return Ok(out);
        }
        let i_sets: Vec<Vec<usize>> = Subsets::new(self.dim, p).collect();
        let mut minor = vec![0.0; p * p];
        for (rj, j_set) in Subsets::new(l.in_dim, p).enumerate() {
            let mut total = 0.0;
            for (ri, i_set) in i_sets.iter().enumerate() {
                let a = self.coeffs[ri];
                if a == 0.0 {
                    continue;
                }
                for (row, &i) in i_set.iter().enumerate() {
                    for (col, &j) in j_set.iter().enumerate() {
                        minor[row * p + col] = l.entry(i, j);
                    }
                }
                total += a * linalg::det(p, &minor);
            }
            out.coeffs[rj] = total;
        }
        Ok(out)
    }
}

impl std::ops::Add for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        assert_eq!(self.dim, rhs.dim);
        assert_eq!(self.degree, rhs.degree);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Form {
            dim: self.dim,
            degree: self.degree,
            coeffs,
        }
    }
}

impl std::ops::Sub for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        assert_eq!(self.dim, rhs.dim);
        assert_eq!(self.degree, rhs.degree);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Form {
            dim: self.dim,
            degree: self.degree,
            coeffs,
        }
    }
}

impl std::ops::Mul<f64> for &Form {
    type Output = Form;
    fn mul(self, s: f64) -> Form {
        Form {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }
}

impl std::ops::Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self * -1.0
    }
}

/// A linear map `R^in -> R^out` stored row-major (`out x in`). Forms pull
/// back contravariantly: a form on the target becomes a form on the source.
#[derive(Debug, Clone)]
pub struct LinearMap {
    out_dim: usize,
    in_dim: usize,
    a: Vec<f64>,
}

impl LinearMap {
    pub fn new(out_dim: usize, in_dim: usize, a: Vec<f64>) -> Result<Self> {
        if a.len() != out_dim * in_dim {
            return Err(GeomError::DimensionMismatch(format!(
                "linear map needs {}x{} entries",
                out_dim, in_dim
            )));
        }
        Ok(LinearMap { out_dim, in_dim, a })
    }

    pub fn identity(dim: usize) -> Self {
        let mut a = vec![0.0; dim * dim];
        for i in 0..dim {
            a[i * dim + i] = 1.0;
        }
        LinearMap {
            out_dim: dim,
            in_dim: dim,
            a,
        }
    }

    /// Columns are the images of the source basis vectors.
    pub fn from_columns(columns: &[Vec<f64>]) -> Self {
        let in_dim = columns.len();
        let out_dim = columns[0].len();
        let mut a = vec![0.0; out_dim * in_dim];
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                a[i * in_dim + j] = v;
            }
        }
        LinearMap { out_dim, in_dim, a }
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.in_dim + j]
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.out_dim)
            .map(|i| (0..self.in_dim).map(|j| self.entry(i, j) * x[j]).sum())
            .collect()
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap> {
        if self.in_dim != other.out_dim {
            return Err(GeomError::DimensionMismatch(
                "linear map composition shape mismatch".into(),
            ));
        }
        let mut a = vec![0.0; self.out_dim * other.in_dim];
        for i in 0..self.out_dim {
            for j in 0..other.in_dim {
                let mut s = 0.0;
                for k in 0..self.in_dim {
                    s += self.entry(i, k) * other.entry(k, j);
                }
                a[i * other.in_dim + j] = s;
            }
        }
        LinearMap::new(self.out_dim, other.in_dim, a)
    }
}

/// Inner product of two p-forms with respect to a Gram metric.
pub fn inner(a: &Form, b: &Form, g: &Gram) -> f64 {
    assert_eq!(a.dim, b.dim, "inner product dimension mismatch");
    assert_eq!(a.degree, b.degree, "inner product degree mismatch");
    assert_eq!(a.dim, g.dim(), "Gram dimension mismatch");
    if g.is_orthogonal_kind() {
        let c = match g.kind {
            GramKind::Identity => 1.0,
            GramKind::Scalar(c) => (1.0 / c).powi(a.degree as i32),
            GramKind::General => unreachable!(),
        };
        return c * linalg::dot(&a.coeffs, &b.coeffs);
    }
    let sets: Vec<Vec<usize>> = Subsets::new(a.dim, a.degree).collect();
    let mut total = 0.0;
    for (ri, i_set) in sets.iter().enumerate() {
        let ai = a.coeffs[ri];
        if ai == 0.0 {
            continue;
        }
        for (rj, j_set) in sets.iter().enumerate() {
            let bj = b.coeffs[rj];
            if bj == 0.0 {
                continue;
            }
            total += ai * bj * g.inv_minor(i_set, j_set);
        }
    }
    total
}

/// Hodge star with respect to a Gram metric and an orientation, defined by
/// `a ^ star(b) = <a, b> Vol`.
pub fn hodge(a: &Form, g: &Gram, o: Orientation) -> Result<Form> {
    if a.dim != g.dim() {
        return Err(GeomError::DimensionMismatch(
            "Hodge star Gram dimension mismatch".into(),
        ));
    }
    let n = a.dim;
    let p = a.degree;
    let sqrt_det = g.det().sqrt();
    let mut out = Form::zero(n, n - p);
    let sets: Vec<Vec<usize>> = Subsets::new(n, p).collect();
    let mut comp = Vec::with_capacity(n - p);
    for (ri, i_set) in sets.iter().enumerate() {
        // raise the multi-index with the inverse Gram
        let raised = if g.is_orthogonal_kind() {
            a.coeffs[ri]
                * match g.kind {
                    GramKind::Identity => 1.0,
                    GramKind::Scalar(c) => (1.0 / c).powi(p as i32),
                    GramKind::General => unreachable!(),
                }
        } else {
            let mut s = 0.0;
            for (rj, j_set) in sets.iter().enumerate() {
                let c = a.coeffs[rj];
                if c != 0.0 {
                    s += c * g.inv_minor(i_set, j_set);
                }
            }
            s
        };
        if raised == 0.0 {
            continue;
        }
        let sign = complement_sign(n, i_set, &mut comp);
        out.coeffs[rank(n, &comp)] += o.sign() * sqrt_det * sign * raised;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(dim: usize, indices: &[usize]) -> Form {
        Form::basis(dim, indices).unwrap()
    }

    #[test]
    fn wedge_of_basis_covectors() {
        let a = e(4, &[0]);
        let b = e(4, &[1]);
        let ab = a.wedge(&b).unwrap();
        assert_eq!(ab.coeff(&[0, 1]), 1.0);
        let ba = b.wedge(&a).unwrap();
        assert_eq!(ba.coeff(&[0, 1]), -1.0);
    }

    #[test]
    fn interior_of_basis() {
        let f = e(4, &[0, 1]);
        let x = [1.0, 0.0, 0.0, 0.0];
        let out = f.interior(&x).unwrap();
        assert_eq!(out.coeff(&[1]), 1.0);
        assert!(f.interior(&[0.0; 3]).is_err());
        assert!(Form::scalar(4, 1.0).interior(&x).is_err());
    }

    #[test]
    fn hodge_identity_metric_r4() {
        let g = Gram::identity(4);
        let st = hodge(&e(4, &[0, 1]), &g, Orientation::positive()).unwrap();
        assert_eq!(st.coeff(&[2, 3]), 1.0);
        let st2 = hodge(&e(4, &[1, 2]), &g, Orientation::positive()).unwrap();
        assert_eq!(st2.coeff(&[0, 3]), 1.0);
    }

    #[test]
    fn pullback_identity_and_inclusion() {
        let f = e(4, &[1, 2]);
        let id = LinearMap::identity(4);
        assert_eq!(f.pullback(&id).unwrap(), f);
        // inclusion of the (1,2)-plane into R^4
        let incl = LinearMap::from_columns(&[vec![0.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0]]);
        let pb = f.pullback(&incl).unwrap();
        assert_eq!(pb.coeff(&[0, 1]), 1.0);
    }

    #[test]
    fn eval_matches_coefficients() {
        let f = e(5, &[1, 3]);
        let v1 = [0.0, 1.0, 0.0, 0.0, 0.0];
        let v2 = [0.0, 0.0, 0.0, 1.0, 0.0];
        assert_eq!(f.eval(&[&v1, &v2]), 1.0);
        assert_eq!(f.eval(&[&v2, &v1]), -1.0);
        assert_eq!(f.eval(&[&v1, &v1]), 0.0);
    }

    #[test]
    fn degree_overflow_rejected() {
        let a = e(4, &[0, 1, 2]);
        let b = e(4, &[1, 3]);
        assert!(a.wedge(&b).is_err());
    }

    fn arb_form(dim: usize, degree: usize) -> impl Strategy<Value = Form> {
        prop::collection::vec(-2.0f64..2.0, binomial(dim, degree))
            .prop_map(move |c| Form::new(dim, degree, c).unwrap())
    }

    fn arb_gram(dim: usize) -> impl Strategy<Value = Gram> {
        prop::collection::vec(-1.0f64..1.0, dim * dim).prop_map(move |a| {
            // A^T A + dim/2 * I is symmetric positive definite and well conditioned
            let mut m = vec![0.0; dim * dim];
            for i in 0..dim {
                for j in 0..dim {
                    let mut s = if i == j { dim as f64 / 2.0 } else { 0.0 };
                    for k in 0..dim {
                        s += a[k * dim + i] * a[k * dim + j];
                    }
                    m[i * dim + j] = s;
                }
            }
            Gram::new(dim, m).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]

        #[test]
        fn graded_commutativity(a in arb_form(6, 2), b in arb_form(6, 3)) {
            let ab = a.wedge(&b).unwrap();
            let ba = b.wedge(&a).unwrap();
            // p*q = 6, even: a^b = b^a
            let diff = &ab - &ba;
            prop_assert!(diff.max_abs() < 1e-12);
        }

        #[test]
        fn wedge_associativity(a in arb_form(8, 1), b in arb_form(8, 2), c in arb_form(8, 1)) {
            let left = a.wedge(&b).unwrap().wedge(&c).unwrap();
            let right = a.wedge(&b.wedge(&c).unwrap()).unwrap();
            prop_assert!((&left - &right).max_abs() < 1e-12);
        }

        #[test]
        fn interior_antiderivation(
            a in arb_form(6, 2),
            b in arb_form(6, 2),
            x in prop::collection::vec(-1.0f64..1.0, 6),
        ) {
            let lhs = a.wedge(&b).unwrap().interior(&x).unwrap();
            let t1 = a.interior(&x).unwrap().wedge(&b).unwrap();
            let t2 = a.wedge(&b.interior(&x).unwrap()).unwrap();
            // deg a = 2, so the sign on the second term is +1
            let rhs = &t1 + &t2;
            prop_assert!((&lhs - &rhs).max_abs() < 1e-12);
        }

        #[test]
        fn hodge_involution_random_gram(g in arb_gram(5), a in arb_form(5, 2)) {
            let o = Orientation::positive();
            let ss = hodge(&hodge(&a, &g, o).unwrap(), &g, o).unwrap();
            // (-1)^{p(n-p)} = (-1)^{2*3} = +1
            prop_assert!((&ss - &a).max_abs() < 1e-9);
        }

        #[test]
        fn hodge_adjunction(g in arb_gram(6), a in arb_form(6, 2), b in arb_form(6, 2)) {
            let o = Orientation::positive();
            let lhs = a.wedge(&hodge(&b, &g, o).unwrap()).unwrap();
            let expected = inner(&a, &b, &g) * volume_form(&g, o).coeffs()[0];
            prop_assert!((lhs.coeffs()[0] - expected).abs() < 1e-9 * (1.0 + expected.abs()));
        }

        #[test]
        fn pullback_functorial(a in arb_form(6, 2),
                               l1 in prop::collection::vec(-1.0f64..1.0, 6 * 5),
                               l2 in prop::collection::vec(-1.0f64..1.0, 5 * 4)) {
            let l1 = LinearMap::new(6, 5, l1).unwrap();
            let l2 = LinearMap::new(5, 4, l2).unwrap();
            let composed = l1.compose(&l2).unwrap();
            let lhs = a.pullback(&composed).unwrap();
            let rhs = a.pullback(&l1).unwrap().pullback(&l2).unwrap();
            prop_assert!((&lhs - &rhs).max_abs() < 1e-10);
        }

        #[test]
        fn pullback_commutes_with_wedge(a in arb_form(6, 1), b in arb_form(6, 2),
                                        l in prop::collection::vec(-1.0f64..1.0, 6 * 6)) {
            let l = LinearMap::new(6, 6, l).unwrap();
            let lhs = a.wedge(&b).unwrap().pullback(&l).unwrap();
            let rhs = a.pullback(&l).unwrap().wedge(&b.pullback(&l).unwrap()).unwrap();
            prop_assert!((&lhs - &rhs).max_abs() < 1e-10);
        }
    }

    #[test]
    fn hodge_sign_law_all_degrees() {
        for n in [4usize, 6, 8] {
            // a fixed non-diagonal positive definite Gram
            let mut m = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    m[i * n + j] = if i == j {
                        1.5 + 0.1 * i as f64
                    } else {
                        0.2 / (1.0 + (i as f64 - j as f64).abs())
                    };
                }
            }
            let g = Gram::new(n, m).unwrap();
            for o in [Orientation::positive(), Orientation::negative()] {
                for p in 0..=n {
                    let mut a = Form::zero(n, p);
                    for (i, c) in a.coeffs_mut().iter_mut().enumerate() {
                        *c = (i as f64 * 0.37).sin() + 0.1;
                    }
                    let ss = hodge(&hodge(&a, &g, o).unwrap(), &g, o).unwrap();
                    let sign = if (p * (n - p)) % 2 == 0 { 1.0 } else { -1.0 };
                    assert!((&ss - &(&a * sign)).max_abs() < 1e-10, "n={} p={}", n, p);
                }
            }
        }
    }
}
