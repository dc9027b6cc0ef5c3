//! Spin(7)-structures on R^8.
//!
//! The fundamental 4-form is built on the basis `e, e0, .., e6` with the
//! cyclic index table over Z_7 and a sign `sigma = +-1`. Internally basis
//! slot 0 is `e` and slots `1..=7` are `e0..e6`, so the volume form of the
//! frame is the lexicographic top form. The module provides the triple cross
//! product, the splitting of 2-forms into the spin(7) eigenspaces, the Lee
//! form, the intrinsic-torsion 3-tensor together with the minimal-connection
//! difference it generates, the Fernandez classes, and evaluators for the two
//! ambient families used downstream: flat and conformally flat.
//!
//! ```
//! use spin7lab::cayley::{triple_cross, CayleyForm};
//! use spin7lab::forms::Gram;
//!
//! let cayley = CayleyForm::new(1.0)?;
//! let g = Gram::identity(8);
//! // the cross product of the first three frame directions
//! let e = |i: usize| {
//!     let mut v = vec![0.0; 8];
//!     v[i] = 1.0;
//!     v
//! };
//! let p = triple_cross(cayley.phi(), &g, &e(0), &e(1), &e(2));
//! assert!((p[4] - 1.0).abs() < 1e-14);
//! # Ok::<(), spin7lab::GeomError>(())
//! ```

use crate::error::{GeomError, Result};
use crate::forms::{hodge, inner, Form, Gram, Orientation};
use crate::linalg;

pub const DIM: usize = 8;

/// Map a cyclic index of the seven imaginary directions to its basis slot.
#[inline]
fn imag(i: usize) -> usize {
    1 + (i % 7)
}

/// The fundamental 4-form with its sign convention.
#[derive(Debug, Clone)]
pub struct CayleyForm {
    sigma: f64,
    phi: Form,
}

impl CayleyForm {
    pub fn new(sigma: f64) -> Result<Self> {
        if sigma != 1.0 && sigma != -1.0 {
            return Err(GeomError::InvalidArgument("sigma must be +-1".into()));
        }
        let mut phi = Form::zero(DIM, 4);
        for i in 0..7 {
            phi.set_coeff(&[0, imag(i), imag(i + 1), imag(i + 3)], 1.0);
        }
        for i in 0..7 {
            let idx = [imag(i + 2), imag(i + 4), imag(i + 5), imag(i + 6)];
            let prev = phi.coeff(&idx);
            phi.set_coeff(&idx, prev - sigma);
        }
        Ok(CayleyForm { sigma, phi })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn phi(&self) -> &Form {
        &self.phi
    }
}

/// The seven 2-forms spanning the orthogonal complement of spin(7) in so(8).
pub fn beta_forms(sigma: f64) -> Vec<Form> {
    (0..7)
        .map(|i| {
            let mut b = Form::zero(DIM, 2);
            b.set_coeff(&[imag(i), 0], sigma);
            b.set_coeff(&[imag(i + 1), imag(i + 3)], 1.0);
            b.set_coeff(&[imag(i + 4), imag(i + 5)], 1.0);
            b.set_coeff(&[imag(i + 2), imag(i + 6)], 1.0);
            b
        })
        .collect()
}

/// Triple cross product: the vector with `<P(x,y,z), w>_g = Phi(x,y,z,w)`.
pub fn triple_cross(phi: &Form, g: &Gram, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
    let contracted = phi
        .interior(x)
        .and_then(|f| f.interior(y))
        .and_then(|f| f.interior(z))
        .expect("triple cross contraction");
    g.raise(contracted.coeffs())
}

/// Evaluate the metric the 4-form induces:
/// `<x,y> = -(1/7) * star(star(x . Phi) ^ (y . Phi))`.
///
/// The star binds to the first factor; with the odd-degree commutation of a
/// 5-form past a 3-form this makes Cayley frames come out orthonormal. The
/// Hodge stars are taken with respect to `g`, so this is a consistency
/// identity for a Gram matrix already known to belong to `phi`, not a
/// metric-recovery solver.
pub fn metric_from_phi(phi: &Form, g: &Gram, o: Orientation, x: &[f64], y: &[f64]) -> Result<f64> {
    let xp = phi.interior(x)?;
    let yp = phi.interior(y)?;
    let w = hodge(&xp, g, o)?.wedge(&yp)?;
    let starred = hodge(&w, g, o)?;
    Ok(-starred.coeffs()[0] / 7.0)
}

/// Split a 2-form into its spin(7) part (eigenvalue +1 of `psi -> star(psi ^ Phi)`)
/// and its complement part (eigenvalue -3).
pub fn spin7_split(psi: &Form, phi: &Form, g: &Gram, o: Orientation) -> Result<(Form, Form)> {
    let l = hodge(&psi.wedge(phi)?, g, o)?;
    let part21 = &(&(psi * 3.0) + &l) * 0.25;
    let part7 = &(psi - &l) * 0.25;
    Ok((part21, part7))
}

/// Lee form of a Spin(7)-structure: `theta = -(1/7) star(star(dPhi) ^ Phi)`.
pub fn lee_form(phi: &Form, dphi: &Form, g: &Gram, o: &Orientation) -> Result<Form> {
    let sd = hodge(dphi, g, *o)?;
    let w = sd.wedge(phi)?;
    Ok(&hodge(&w, g, *o)? * (-1.0 / 7.0))
}

/// Fernandez classes of a Spin(7)-structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum FernandezClass {
    /// `dPhi = 0`
    Parallel,
    /// zero Lee form
    Balanced,
    /// `dPhi = theta ^ Phi`
    LocallyConformalParallel,
    /// no constraint
    Generic,
}

impl std::fmt::Display for FernandezClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FernandezClass::Parallel => "W0",
            FernandezClass::Balanced => "W1",
            FernandezClass::LocallyConformalParallel => "W2",
            FernandezClass::Generic => "W",
        };
        write!(f, "{}", s)
    }
}

/// Classify by the norms of `dPhi`, `theta`, and the conformal residual.
/// A norm counts as zero below `tol * (1 + |dPhi|)`.
pub fn fernandez_class(
    phi: &Form,
    dphi: &Form,
    theta: &Form,
    g: &Gram,
    o: Orientation,
    tol: f64,
) -> Result<FernandezClass> {
    let scale = 1.0 + dphi.norm(g);
    let cut = tol * scale;
    if dphi.norm(g) < cut {
        return Ok(FernandezClass::Parallel);
    }
    if theta.norm(g) < cut {
        return Ok(FernandezClass::Balanced);
    }
    let residual = (dphi - &theta.wedge(phi)?).norm(g);
    if residual < cut {
        return Ok(FernandezClass::LocallyConformalParallel);
    }
    let _ = o;
    Ok(FernandezClass::Generic)
}

/// The intrinsic-torsion 3-tensor of a Spin(7)-structure, stored on the
/// coordinate basis; antisymmetric in its last two slots, and each slice
/// `values[x]` lies in the (-3)-eigenspace of `psi -> star(psi ^ Phi)`.
#[derive(Debug, Clone)]
pub struct Spin7Torsion {
    values: Vec<f64>, // 8 x 8 x 8
}

impl Spin7Torsion {
    pub fn zero() -> Self {
        Spin7Torsion {
            values: vec![0.0; DIM * DIM * DIM],
        }
    }

    #[inline]
    pub fn entry(&self, x: usize, y: usize, z: usize) -> f64 {
        self.values[(x * DIM + y) * DIM + z]
    }

    #[inline]
    fn entry_mut(&mut self, x: usize, y: usize, z: usize) -> &mut f64 {
        &mut self.values[(x * DIM + y) * DIM + z]
    }

    /// Trilinear contraction with arbitrary vectors.
    pub fn at(&self, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..DIM {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..DIM {
                if y[j] == 0.0 {
                    continue;
                }
                for k in 0..DIM {
                    let v = self.entry(i, j, k);
                    if v != 0.0 {
                        s += x[i] * y[j] * z[k] * v;
                    }
                }
            }
        }
        s
    }

    /// Build from the exterior derivative. In the `(1/p!)` inner-product
    /// normalization used throughout,
    /// `rbar(X,Y,Z) = (1/2) <X . dPhi, Y_flat ^ (Z . Phi) - Z_flat ^ (Y . Phi)> - 7 L(X,Y,Z)`,
    /// where `L` is the tensor of a structure whose whole torsion is the Lee
    /// form `theta`. The constants are pinned on both irreducible summands of
    /// the torsion space by the defining contraction of `nabla Phi`.
    pub fn from_dphi(phi: &Form, dphi: &Form, theta: &Form, g: &Gram, sigma: f64) -> Result<Self> {
        let lee_part = Spin7Torsion::from_lee_only(theta, phi, g, sigma)?;
        let mut t = Spin7Torsion::zero();
        let mut basis = [[0.0; DIM]; DIM];
        for (i, b) in basis.iter_mut().enumerate() {
            b[i] = 1.0;
        }
        let contracted_phi: Vec<Form> = (0..DIM)
            .map(|k| phi.interior(&basis[k]))
            .collect::<Result<_>>()?;
        let contracted_dphi: Vec<Form> = (0..DIM)
            .map(|k| dphi.interior(&basis[k]))
            .collect::<Result<_>>()?;
        // y_flat ^ (z . Phi) over metric duals of the basis, as 4-forms
        let mut wedges: Vec<Vec<Form>> = Vec::with_capacity(DIM);
        for y in 0..DIM {
            let ey = Form::one_form(&g.lower(&basis[y]));
            wedges.push(
                (0..DIM)
                    .map(|z| ey.wedge(&contracted_phi[z]))
                    .collect::<Result<_>>()?,
            );
        }
        for x in 0..DIM {
            for y in 0..DIM {
                for z in (y + 1)..DIM {
                    let pair = &wedges[y][z] - &wedges[z][y];
                    let quad = inner(&contracted_dphi[x], &pair, g) / 2.0;
                    let v = quad - 7.0 * lee_part.entry(x, y, z);
                    *t.entry_mut(x, y, z) = v;
                    *t.entry_mut(x, z, y) = -v;
                }
            }
        }
        Ok(t)
    }

    /// The torsion of a structure whose only component is the Lee form:
    /// `4 rbar(X,Y,Z) = g(X,Y) theta(Z) - g(X,Z) theta(Y) + sigma Phi(theta_sharp, X, Y, Z)`.
    pub fn from_lee_only(theta: &Form, phi: &Form, g: &Gram, sigma: f64) -> Result<Self> {
        let sharp = g.raise(theta.coeffs());
        let contracted = phi.interior(&sharp)?;
        let mut t = Spin7Torsion::zero();
        let mut basis = [[0.0; DIM]; DIM];
        for (i, b) in basis.iter_mut().enumerate() {
            b[i] = 1.0;
        }
        for x in 0..DIM {
            let xflat = g.lower(&basis[x]);
            for y in 0..DIM {
                for z in (y + 1)..DIM {
                    let metric_part = xflat[y] * theta.coeffs()[z] - xflat[z] * theta.coeffs()[y];
                    let phi_part = sigma * contracted.coeff(&[x, y, z]);
                    let v = (metric_part + phi_part) / 4.0;
                    *t.entry_mut(x, y, z) = v;
                    *t.entry_mut(x, z, y) = -v;
                }
            }
        }
        Ok(t)
    }

    /// Assemble from coefficients against the basis `e_i (x) beta_j` of the
    /// torsion space; row 0 of `a` is the `e` direction.
    pub fn from_coefficients(a: &[[f64; 7]; 8], sigma: f64) -> Self {
        let betas = beta_forms(sigma);
        let mut t = Spin7Torsion::zero();
        for (x, row) in a.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                for y in 0..DIM {
                    for z in (y + 1)..DIM {
                        let v = c * betas[j].coeff(&[y, z]);
                        *t.entry_mut(x, y, z) += v;
                        *t.entry_mut(x, z, y) -= v;
                    }
                }
            }
        }
        t
    }

    /// Extract the conformal (Lee) component by orthogonal projection onto
    /// the image of `theta -> from_lee_only(theta)`; for a structure of pure
    /// conformal type this recovers the Lee form exactly.
    pub fn lee_component(&self, phi: &Form, g: &Gram, sigma: f64) -> Result<Form> {
        let mut gram = vec![0.0; DIM * DIM];
        let mut rhs = vec![0.0; DIM];
        let mut images: Vec<Spin7Torsion> = Vec::with_capacity(DIM);
        for k in 0..DIM {
            let mut theta = Form::zero(DIM, 1);
            theta.coeffs_mut()[k] = 1.0;
            images.push(Spin7Torsion::from_lee_only(&theta, phi, g, sigma)?);
        }
        for k in 0..DIM {
            rhs[k] = frob(&images[k], self);
            for l in 0..DIM {
                gram[k * DIM + l] = frob(&images[k], &images[l]);
            }
        }
        let coeffs = linalg::solve(DIM, &gram, &rhs)?;
        Form::new(DIM, 1, coeffs)
    }

    /// Rebuild the exterior derivative this torsion induces: the covariant
    /// derivative acts on the 4-form through `xi` slot by slot, and `dPhi`
    /// is its alternation.
    pub fn reconstruct_dphi(&self, phi: &Form, g: &Gram) -> Result<Form> {
        use crate::forms::multi_index::Subsets;
        let mut basis = [[0.0; DIM]; DIM];
        for (i, b) in basis.iter_mut().enumerate() {
            b[i] = 1.0;
        }
        let mut nablas: Vec<Form> = Vec::with_capacity(DIM);
        for x in 0..DIM {
            let mut f = Form::zero(DIM, 4);
            for (r, idx) in Subsets::new(DIM, 4).enumerate() {
                let mut total = 0.0;
                for slot in 0..4 {
                    let xi = self.xi(g, &basis[x], &basis[idx[slot]]);
                    let mut args: Vec<&[f64]> = idx.iter().map(|&k| &basis[k][..]).collect();
                    args[slot] = &xi;
                    total += phi.eval(&args);
                }
                f.coeffs_mut()[r] = total;
            }
            nablas.push(f);
        }
        let mut dphi = Form::zero(DIM, 5);
        for (r, idx) in Subsets::new(DIM, 5).enumerate() {
            let mut total = 0.0;
            for a in 0..5 {
                let rest: Vec<usize> = idx
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != a)
                    .map(|(_, &v)| v)
                    .collect();
                let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
                total += sign * nablas[idx[a]].coeff(&rest);
            }
            dphi.coeffs_mut()[r] = total;
        }
        Ok(dphi)
    }

    pub fn subtract(&self, other: &Spin7Torsion) -> Spin7Torsion {
        Spin7Torsion {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// Largest norm of the spin(7)-eigenspace component over all slices; a
    /// valid torsion tensor keeps every slice in the complement.
    pub fn spin7_residual(&self, phi: &Form, g: &Gram, o: Orientation) -> Result<f64> {
        let mut worst = 0.0f64;
        for x in 0..DIM {
            let mut slice = Form::zero(DIM, 2);
            for y in 0..DIM {
                for z in (y + 1)..DIM {
                    slice.set_coeff(&[y, z], self.entry(x, y, z));
                }
            }
            let (part21, _) = spin7_split(&slice, phi, g, o)?;
            worst = worst.max(part21.norm(g));
        }
        Ok(worst)
    }

    /// Minimal-connection difference: the vector `xi_X Y` with
    /// `<xi_X Y, Z>_g = (1/4) rbar(X,Y,Z)`.
    pub fn xi(&self, g: &Gram, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut covec = vec![0.0; DIM];
        for (k, c) in covec.iter_mut().enumerate() {
            let mut basis = [0.0; DIM];
            basis[k] = 1.0;
            *c = self.at(x, y, &basis) / 4.0;
        }
        g.raise(&covec)
    }

    /// The same vector through the cross-product expression
    /// `xi_X Y = -(sigma/24) sum_ij rbar(X, f_i, f_j) P(f_i, f_j, Y)`
    /// over an orthonormal frame `f`.
    pub fn xi_via_cross(
        &self,
        phi: &Form,
        g: &Gram,
        sigma: f64,
        frame: &[Vec<f64>],
        x: &[f64],
        y: &[f64],
    ) -> Vec<f64> {
        let mut out = vec![0.0; DIM];
        for fi in frame {
            for fj in frame {
                let r = self.at(x, fi, fj);
                if r == 0.0 {
                    continue;
                }
                let p = triple_cross(phi, g, fi, fj, y);
                linalg::axpy(&mut out, -sigma / 24.0 * r, &p);
            }
        }
        out
    }
}

fn frob(a: &Spin7Torsion, b: &Spin7Torsion) -> f64 {
    a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum()
}

/// A scalar field with analytic gradient; linear fields cover the conformal
/// generators used here.
#[derive(Debug, Clone)]
pub struct ScalarField {
    gradient: [f64; DIM],
    offset: f64,
}

impl ScalarField {
    pub fn linear(gradient: [f64; DIM], offset: f64) -> Self {
        ScalarField { gradient, offset }
    }

    pub fn value(&self, p: &[f64]) -> f64 {
        self.offset + linalg::dot(&self.gradient, p)
    }

    pub fn gradient(&self, _p: &[f64]) -> [f64; DIM] {
        self.gradient
    }
}

/// Ambient Spin(7) geometries with closed-form structure data.
#[derive(Debug, Clone)]
pub enum AmbientKind {
    Flat,
    /// `Phi(p) = exp(4 f(p)) Phi_0`, `g(p) = exp(2 f(p)) I`.
    Conformal(ScalarField),
}

#[derive(Debug, Clone)]
pub struct Ambient {
    kind: AmbientKind,
    cayley: CayleyForm,
}

impl Ambient {
    pub fn flat(sigma: f64) -> Result<Self> {
        Ok(Ambient {
            kind: AmbientKind::Flat,
            cayley: CayleyForm::new(sigma)?,
        })
    }

    pub fn conformal(sigma: f64, field: ScalarField) -> Result<Self> {
        Ok(Ambient {
            kind: AmbientKind::Conformal(field),
            cayley: CayleyForm::new(sigma)?,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.cayley.sigma()
    }

    pub fn is_flat(&self) -> bool {
        matches!(self.kind, AmbientKind::Flat)
    }

    pub fn model(&self) -> &CayleyForm {
        &self.cayley
    }

    pub fn orientation(&self) -> Orientation {
        Orientation::positive()
    }

    pub fn phi_at(&self, p: &[f64]) -> Form {
        match &self.kind {
            AmbientKind::Flat => self.cayley.phi().clone(),
            AmbientKind::Conformal(f) => self.cayley.phi() * (4.0 * f.value(p)).exp(),
        }
    }

    pub fn dphi_at(&self, p: &[f64]) -> Form {
        match &self.kind {
            AmbientKind::Flat => Form::zero(DIM, 5),
            AmbientKind::Conformal(f) => {
                let df = Form::one_form(&f.gradient(p));
                let phi = self.phi_at(p);
                &df.wedge(&phi).expect("df ^ Phi") * 4.0
            }
        }
    }

    pub fn gram_at(&self, p: &[f64]) -> Gram {
        match &self.kind {
            AmbientKind::Flat => Gram::identity(DIM),
            AmbientKind::Conformal(f) => {
                Gram::scalar(DIM, (2.0 * f.value(p)).exp()).expect("conformal factor")
            }
        }
    }

    /// Lee form; `4 df` in the conformal case.
    pub fn lee_at(&self, p: &[f64]) -> Form {
        match &self.kind {
            AmbientKind::Flat => Form::zero(DIM, 1),
            AmbientKind::Conformal(f) => &Form::one_form(&f.gradient(p)) * 4.0,
        }
    }

    /// Intrinsic torsion tensor at a point.
    pub fn torsion_at(&self, p: &[f64]) -> Result<Spin7Torsion> {
        match &self.kind {
            AmbientKind::Flat => Ok(Spin7Torsion::zero()),
            AmbientKind::Conformal(_) => {
                let phi = self.phi_at(p);
                let g = self.gram_at(p);
                Spin7Torsion::from_lee_only(&self.lee_at(p), &phi, &g, self.sigma())
            }
        }
    }

    /// Levi-Civita Christoffel vector `Gamma(u, v)` of the ambient metric.
    pub fn christoffel(&self, p: &[f64], u: &[f64], v: &[f64]) -> Vec<f64> {
        match &self.kind {
            AmbientKind::Flat => vec![0.0; DIM],
            AmbientKind::Conformal(f) => {
                let grad = f.gradient(p);
                let du = linalg::dot(&grad, u);
                let dv = linalg::dot(&grad, v);
                let uv = linalg::dot(u, v);
                let mut out = vec![0.0; DIM];
                linalg::axpy(&mut out, dv, u);
                linalg::axpy(&mut out, du, v);
                linalg::axpy(&mut out, -uv, &grad);
                out
            }
        }
    }

    /// Covariant derivative of the 4-form field on constant vector arguments:
    /// `(nabla_X Phi)(A,B,C,D)` at `p`.
    pub fn covariant_dphi(&self, p: &[f64], x: &[f64], args: [&[f64]; 4]) -> f64 {
        match &self.kind {
            AmbientKind::Flat => 0.0,
            AmbientKind::Conformal(f) => {
                let phi = self.phi_at(p);
                let grad = f.gradient(p);
                let mut total = 4.0 * linalg::dot(&grad, x) * phi.eval(&args);
                for slot in 0..4 {
                    let gamma = self.christoffel(p, x, args[slot]);
                    let mut replaced = args;
                    replaced[slot] = &gamma;
                    total -= phi.eval(&replaced);
                }
                total
            }
        }
    }

    /// Fernandez class at a point with the scale-aware tolerance rule.
    pub fn fernandez_at(&self, p: &[f64], tol: f64) -> Result<FernandezClass> {
        let phi = self.phi_at(p);
        let dphi = self.dphi_at(p);
        let g = self.gram_at(p);
        let o = self.orientation();
        let theta = lee_form(&phi, &dphi, &g, &o)?;
        fernandez_class(&phi, &dphi, &theta, &g, o, tol)
    }

    /// An orthonormal Cayley frame at `p`, as columns.
    pub fn cayley_frame_at(&self, p: &[f64]) -> Vec<Vec<f64>> {
        let scale = match &self.kind {
            AmbientKind::Flat => 1.0,
            AmbientKind::Conformal(f) => (-f.value(p)).exp(),
        };
        (0..DIM)
            .map(|i| {
                let mut v = vec![0.0; DIM];
                v[i] = scale;
                v
            })
            .collect()
    }
}
