//! SU(3)-structures on a six-dimensional vector space.
//!
//! A point structure is the tuple `(g, J, omega, Psi+, Psi-)` together with
//! the frame phase `gamma` that selected the complex volume form. The
//! covariant derivative of the Kaehler form is encoded by a 6x6 `r`-matrix;
//! its six-way matrix decomposition measures the torsion classes W1..W4,
//! the Lee form measures W4 explicitly, and the 1-form `eta` extracted from
//! `d Psi` measures W5. Working frames may be orthonormal or general chart
//! frames; operations that require an orthonormal frame say so.

use crate::error::{GeomError, Result};
use crate::forms::tensor::CovTensor;
use crate::forms::{hodge, inner, volume_form, Form, Gram, Orientation};
use crate::linalg;
use serde::Serialize;
use std::collections::BTreeMap;

pub const DIM: usize = 6;

pub type Mat6 = [[f64; 6]; 6];

fn mat_vec(m: &Mat6, x: &[f64]) -> Vec<f64> {
    (0..DIM)
        .map(|i| (0..DIM).map(|k| m[i][k] * x[k]).sum())
        .collect()
}

fn frobenius(m: &Mat6) -> f64 {
    m.iter()
        .flat_map(|row| row.iter())
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
}

fn mat_sub(a: &Mat6, b: &Mat6) -> Mat6 {
    let mut out = [[0.0; 6]; 6];
    for i in 0..DIM {
        for j in 0..DIM {
            out[i][j] = a[i][j] - b[i][j];
        }
    }
    out
}

/// A pointwise SU(3)-structure.
#[derive(Debug, Clone)]
pub struct Su3Point {
    gram: Gram,
    orient: Orientation,
    j: Mat6,
    omega: Form,
    psi_plus: Form,
    psi_minus: Form,
    gamma: f64,
}

impl Su3Point {
    /// Validate and wrap the structure tensors. The orientation is fixed by
    /// `omega^3 = 6 Vol`; degenerate inputs are rejected with a diagnostic.
    pub fn new(
        gram: Gram,
        j: Mat6,
        omega: Form,
        psi_plus: Form,
        psi_minus: Form,
        gamma: f64,
    ) -> Result<Self> {
        let tol = 1e-8;
        // J^2 = -I
        let mut worst = 0.0f64;
        for a in 0..DIM {
            for b in 0..DIM {
                let mut s = 0.0;
                for k in 0..DIM {
                    s += j[a][k] * j[k][b];
                }
                let expect = if a == b { -1.0 } else { 0.0 };
                worst = worst.max((s - expect).abs());
            }
        }
        if worst > tol {
            return Err(GeomError::invariant("J^2 = -I", worst));
        }
        // J orthogonal: g(Jx, Jy) = g(x, y)
        let mut worst = 0.0f64;
        for a in 0..DIM {
            for b in 0..DIM {
                let mut s = 0.0;
                for k in 0..DIM {
                    for l in 0..DIM {
                        s += j[k][a] * gram.entry(k, l) * j[l][b];
                    }
                }
                worst = worst.max((s - gram.entry(a, b)).abs());
            }
        }
        if worst > tol {
            return Err(GeomError::invariant("J compatible with the metric", worst));
        }
        // omega(x, y) = <x, J y>
        let mut worst = 0.0f64;
        for a in 0..DIM {
            for b in 0..DIM {
                let mut s = 0.0;
                for k in 0..DIM {
                    s += gram.entry(a, k) * j[k][b];
                }
                worst = worst.max((omega.coeff_dense(&[a, b]) - s).abs());
            }
        }
        if worst > tol {
            return Err(GeomError::invariant("omega = <., J .>", worst));
        }
        // orientation from omega^3 = 6 Vol
        let cube = omega.wedge(&omega)?.wedge(&omega)?;
        let top = cube.coeffs()[0] / 6.0;
        let sqrt_det = gram.det().sqrt();
        if (top.abs() - sqrt_det).abs() > tol * (1.0 + sqrt_det) {
            return Err(GeomError::invariant(
                "omega^3 = 6 Vol",
                (top.abs() - sqrt_det).abs(),
            ));
        }
        let orient = if top > 0.0 {
            Orientation::positive()
        } else {
            Orientation::negative()
        };
        let point = Su3Point {
            gram,
            orient,
            j,
            omega,
            psi_plus,
            psi_minus,
            gamma,
        };
        point.validate(1e-8)?;
        Ok(point)
    }

    /// The flat model structure on R^6 with basis `(e1, e2, e3, Je1, Je2, Je3)`.
    pub fn canonical(gamma: f64) -> Self {
        let mut j = [[0.0; 6]; 6];
        for k in 0..3 {
            j[k + 3][k] = 1.0;
            j[k][k + 3] = -1.0;
        }
        let mut omega = Form::zero(DIM, 2);
        omega.set_coeff(&[0, 3], -1.0);
        omega.set_coeff(&[1, 4], -1.0);
        omega.set_coeff(&[2, 5], -1.0);
        let mut psi_plus = Form::zero(DIM, 3);
        psi_plus.set_coeff(&[0, 1, 2], 1.0);
        psi_plus.set_coeff(&[2, 3, 4], -1.0);
        psi_plus.set_coeff(&[1, 3, 5], 1.0);
        psi_plus.set_coeff(&[0, 4, 5], -1.0);
        let mut psi_minus = Form::zero(DIM, 3);
        psi_minus.set_coeff(&[3, 4, 5], -1.0);
        psi_minus.set_coeff(&[1, 2, 3], 1.0);
        psi_minus.set_coeff(&[0, 2, 4], -1.0);
        psi_minus.set_coeff(&[0, 1, 5], 1.0);
        Su3Point {
            gram: Gram::identity(DIM),
            orient: Orientation::positive(),
            j,
            omega,
            psi_plus,
            psi_minus,
            gamma,
        }
    }

    pub fn gram(&self) -> &Gram {
        &self.gram
    }

    pub fn orientation(&self) -> Orientation {
        self.orient
    }

    pub fn j_matrix(&self) -> &Mat6 {
        &self.j
    }

    pub fn omega(&self) -> &Form {
        &self.omega
    }

    pub fn psi_plus(&self) -> &Form {
        &self.psi_plus
    }

    pub fn psi_minus(&self) -> &Form {
        &self.psi_minus
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn volume(&self) -> Form {
        volume_form(&self.gram, self.orient)
    }

    pub fn j_vec(&self, x: &[f64]) -> Vec<f64> {
        mat_vec(&self.j, x)
    }

    /// `(J mu)(x) = -mu(J x)` for a 1-form.
    pub fn j_one_form(&self, mu: &Form) -> Form {
        let comps: Vec<f64> = (0..DIM)
            .map(|i| {
                let mut s = 0.0;
                for k in 0..DIM {
                    s -= mu.coeffs()[k] * self.j[k][i];
                }
                s
            })
            .collect();
        Form::one_form(&comps)
    }

    pub fn star(&self, f: &Form) -> Result<Form> {
        hodge(f, &self.gram, self.orient)
    }

    /// Check the defining wedge relations and the star identities.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let vol = self.volume();
        let checks: Vec<(&str, f64)> = vec![
            (
                "Psi+ ^ omega = 0",
                self.psi_plus.wedge(&self.omega)?.max_abs(),
            ),
            (
                "Psi- ^ omega = 0",
                self.psi_minus.wedge(&self.omega)?.max_abs(),
            ),
            (
                "Psi+ ^ Psi- = -4 Vol",
                (&self.psi_plus.wedge(&self.psi_minus)? - &(&vol * -4.0)).max_abs(),
            ),
            (
                "Psi+ ^ Psi+ = 0",
                self.psi_plus.wedge(&self.psi_plus)?.max_abs(),
            ),
            (
                "Psi- ^ Psi- = 0",
                self.psi_minus.wedge(&self.psi_minus)?.max_abs(),
            ),
        ];
        for (what, residual) in checks {
            if residual > tol {
                return Err(GeomError::invariant(what, residual));
            }
        }
        // x . Psi+ = Jx . Psi- on the basis
        for k in 0..DIM {
            let mut x = vec![0.0; DIM];
            x[k] = 1.0;
            let jx = self.j_vec(&x);
            let lhs = self.psi_plus.interior(&x)?;
            let rhs = self.psi_minus.interior(&jx)?;
            let residual = (&lhs - &rhs).max_abs();
            if residual > tol {
                return Err(GeomError::invariant("x . Psi+ = Jx . Psi-", residual));
            }
        }
        // star relations on a pair of probe covectors
        for k in [0usize, 4] {
            let mut mu = Form::zero(DIM, 1);
            mu.coeffs_mut()[k] = 1.0;
            let e1 = self.star(&self.star(&mu.wedge(&self.psi_plus)?)?.wedge(&self.psi_plus)?)?;
            let r1 = (&e1 - &(&mu * -2.0)).max_abs();
            if r1 > tol {
                return Err(GeomError::invariant(
                    "star(star(mu ^ Psi+) ^ Psi+) = -2 mu",
                    r1,
                ));
            }
            let e2 = self.star(&self.star(&mu.wedge(&self.psi_minus)?)?.wedge(&self.psi_plus)?)?;
            let r2 = (&e2 - &(&self.j_one_form(&mu) * 2.0)).max_abs();
            if r2 > tol {
                return Err(GeomError::invariant(
                    "star(star(mu ^ Psi-) ^ Psi+) = 2 J mu",
                    r2,
                ));
            }
        }
        Ok(())
    }

    /// An adapted frame `(e1, e2, e3, Je1, Je2, Je3)`: orthonormal, with
    /// `Psi+(e1,e2,e3) = 1` and `Psi-(e1,e2,e3) = 0`. Candidates are scanned
    /// in working-frame order, so the result is deterministic. Frame vectors
    /// are returned in working-frame components.
    pub fn adapted_frame(&self) -> Result<[Vec<f64>; 6]> {
        let g = &self.gram;
        let ip = |a: &[f64], b: &[f64]| g.inner_vec(a, b);
        // e1: first basis vector, normalized
        let mut e1 = vec![0.0; DIM];
        e1[0] = 1.0;
        let n = ip(&e1, &e1).sqrt();
        for v in e1.iter_mut() {
            *v /= n;
        }
        let je1 = self.j_vec(&e1);
        // e2: first candidate with a usable component orthogonal to {e1, Je1}
        let mut e2 = None;
        for k in 1..DIM {
            let mut cand = vec![0.0; DIM];
            cand[k] = 1.0;
            let c1 = ip(&cand, &e1);
            let c2 = ip(&cand, &je1);
            linalg::axpy(&mut cand, -c1, &e1);
            linalg::axpy(&mut cand, -c2, &je1);
            let n = ip(&cand, &cand).sqrt();
            if n > 1e-6 {
                for v in cand.iter_mut() {
                    *v /= n;
                }
                e2 = Some(cand);
                break;
            }
        }
        let e2 =
            e2.ok_or_else(|| GeomError::invariant("no candidate orthogonal to {e1, Je1}", 0.0))?;
        // e3 is forced: <e3, x> = Psi+(e1, e2, x)
        let two_form = self.psi_plus.interior(&e1)?.interior(&e2)?;
        let e3 = g.raise(two_form.coeffs());
        let n3 = ip(&e3, &e3).sqrt();
        if (n3 - 1.0).abs() > 1e-6 {
            return Err(GeomError::invariant(
                "forced third frame vector is unit",
                (n3 - 1.0).abs(),
            ));
        }
        let je2 = self.j_vec(&e2);
        let je3 = self.j_vec(&e3);
        let frame = [e1, e2, e3, je1, je2, je3];
        // defining evaluations
        let plus = self.psi_plus.eval(&[&frame[0], &frame[1], &frame[2]]);
        let minus = self.psi_minus.eval(&[&frame[0], &frame[1], &frame[2]]);
        if (plus - 1.0).abs() > 1e-8 || minus.abs() > 1e-8 {
            return Err(GeomError::invariant(
                "adapted frame evaluations",
                (plus - 1.0).abs().max(minus.abs()),
            ));
        }
        Ok(frame)
    }
}

/// The 6x6 matrix encoding of a `u(3)`-complement valued covariant tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct RMatrix(pub Mat6);

impl RMatrix {
    pub fn zero() -> Self {
        RMatrix([[0.0; 6]; 6])
    }

    pub fn at(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                s += x[i] * self.0[i][j] * y[j];
            }
        }
        s
    }

    pub fn trace(&self) -> f64 {
        (0..DIM).map(|i| self.0[i][i]).sum()
    }

    pub fn frobenius(&self) -> f64 {
        frobenius(&self.0)
    }

    pub fn sub(&self, other: &RMatrix) -> RMatrix {
        RMatrix(mat_sub(&self.0, &other.0))
    }

    /// Inner product with a 2-form viewed as a bilinear form, in the `1/p!`
    /// convention: `(1/2) sum_jk r_jk f_jk`.
    pub fn form_inner(&self, f: &Form) -> f64 {
        let mut s = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                s += self.0[i][j] * f.coeff_dense(&[i, j]);
            }
        }
        s / 2.0
    }
}

/// Encode a `u(3)`-complement valued tensor (such as `grad omega`) as the
/// matrix `r(X,Y) = (1/2) <X . B, Y . Psi+>`. Requires an orthonormal
/// working frame; each slice `B(x,.,.)` must be J-anti-invariant.
pub fn r_map(b: &CovTensor, su3: &Su3Point) -> Result<RMatrix> {
    if b.rank() != 3 || b.dim() != DIM {
        return Err(GeomError::DimensionMismatch(
            "expected a (0,3)-tensor on R^6".into(),
        ));
    }
    // slices must be 2-forms in the complement of u(3): antisymmetric and
    // J-anti-invariant
    let mut worst = 0.0f64;
    for x in 0..DIM {
        for y in 0..DIM {
            for z in 0..DIM {
                let v = b.get(&[x, y, z]);
                worst = worst.max((v + b.get(&[x, z, y])).abs());
                // B(x, Jy, Jz) = -B(x, y, z)
                let mut jj = 0.0;
                for m in 0..DIM {
                    for l in 0..DIM {
                        jj += su3.j[m][y] * su3.j[l][z] * b.get(&[x, m, l]);
                    }
                }
                worst = worst.max((jj + v).abs());
            }
        }
    }
    let scale = 1.0 + b.max_abs();
    if worst > 1e-8 * scale {
        return Err(GeomError::InconsistentInput {
            what: "tensor slices are not u(3)-complement valued".into(),
            residual: worst,
            allowed: 1e-8 * scale,
        });
    }
    let mut r = [[0.0; 6]; 6];
    let mut basis = [[0.0; DIM]; DIM];
    for (i, e) in basis.iter_mut().enumerate() {
        e[i] = 1.0;
    }
    let contracted_psi: Vec<Form> = (0..DIM)
        .map(|k| su3.psi_plus.interior(&basis[k]))
        .collect::<Result<_>>()?;
    for x in 0..DIM {
        // slice as a 2-form
        let mut slice = Form::zero(DIM, 2);
        for y in 0..DIM {
            for z in (y + 1)..DIM {
                slice.set_coeff(&[y, z], b.get(&[x, y, z]));
            }
        }
        for (y, cp) in contracted_psi.iter().enumerate() {
            r[x][y] = inner(&slice, cp, &su3.gram) / 2.0;
        }
    }
    Ok(RMatrix(r))
}

/// Inverse of [`r_map`]: `B = sum_jk r_jk e_j (x) (e_k . Psi+)`.
pub fn r_inverse(r: &RMatrix, su3: &Su3Point) -> Result<CovTensor> {
    let mut basis = [[0.0; DIM]; DIM];
    for (i, e) in basis.iter_mut().enumerate() {
        e[i] = 1.0;
    }
    let contracted_psi: Vec<Form> = (0..DIM)
        .map(|k| su3.psi_plus.interior(&basis[k]))
        .collect::<Result<_>>()?;
    let mut out = CovTensor::zero(DIM, 3);
    for j in 0..DIM {
        for k in 0..DIM {
            let c = r.0[j][k];
            if c == 0.0 {
                continue;
            }
            for y in 0..DIM {
                for z in 0..DIM {
                    let v = c * contracted_psi[k].coeff_dense(&[y, z]);
                    if v != 0.0 {
                        out.add_assign(&[j, y, z], v);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The six-way matrix split of an r-matrix: symmetric/skew crossed with
/// J-invariant/J-anti-invariant, with the trace and omega lines separated.
#[derive(Debug, Clone)]
pub struct RSplit {
    /// multiple of the metric (symmetric, J-invariant trace line)
    pub trace_part: Mat6,
    /// multiple of omega (skew, J-invariant line)
    pub omega_part: Mat6,
    /// symmetric, J-invariant, traceless (8-dim)
    pub sym_j_inv: Mat6,
    /// skew, J-invariant, orthogonal to omega (8-dim)
    pub skew_j_inv: Mat6,
    /// symmetric, J-anti-invariant (12-dim)
    pub sym_j_anti: Mat6,
    /// skew, J-anti-invariant (6-dim)
    pub skew_j_anti: Mat6,
}

impl RSplit {
    pub fn parts(&self) -> [(&'static str, &Mat6); 6] {
        [
            ("trace", &self.trace_part),
            ("omega", &self.omega_part),
            ("sym_j_inv", &self.sym_j_inv),
            ("skew_j_inv", &self.skew_j_inv),
            ("sym_j_anti", &self.sym_j_anti),
            ("skew_j_anti", &self.skew_j_anti),
        ]
    }

    pub fn reassemble(&self) -> RMatrix {
        let mut m = [[0.0; 6]; 6];
        for (_, part) in self.parts() {
            for i in 0..DIM {
                for j in 0..DIM {
                    m[i][j] += part[i][j];
                }
            }
        }
        RMatrix(m)
    }
}

/// Decompose an r-matrix in an orthonormal working frame.
pub fn decompose_r(r: &RMatrix, su3: &Su3Point) -> RSplit {
    let j = &su3.j;
    let m = &r.0;
    let mut sym = [[0.0; 6]; 6];
    let mut skew = [[0.0; 6]; 6];
    for i in 0..DIM {
        for k in 0..DIM {
            sym[i][k] = 0.5 * (m[i][k] + m[k][i]);
            skew[i][k] = 0.5 * (m[i][k] - m[k][i]);
        }
    }
    // (J B)(x,y) = B(Jx, Jy): matrix J^T B J
    let jbj = |b: &Mat6| -> Mat6 {
        let mut out = [[0.0; 6]; 6];
        for x in 0..DIM {
            for y in 0..DIM {
                let mut s = 0.0;
                for k in 0..DIM {
                    for l in 0..DIM {
                        s += j[k][x] * b[k][l] * j[l][y];
                    }
                }
                out[x][y] = s;
            }
        }
        out
    };
    let split_inv = |b: &Mat6| -> (Mat6, Mat6) {
        let jb = jbj(b);
        let mut inv = [[0.0; 6]; 6];
        let mut anti = [[0.0; 6]; 6];
        for x in 0..DIM {
            for y in 0..DIM {
                inv[x][y] = 0.5 * (b[x][y] + jb[x][y]);
                anti[x][y] = 0.5 * (b[x][y] - jb[x][y]);
            }
        }
        (inv, anti)
    };
    let (sym_inv, sym_anti) = split_inv(&sym);
    let (skew_inv, skew_anti) = split_inv(&skew);
    // trace line inside the symmetric J-invariant part
    let tr = (0..DIM).map(|i| sym_inv[i][i]).sum::<f64>() / DIM as f64;
    let mut trace_part = [[0.0; 6]; 6];
    let mut sym_traceless = sym_inv;
    for i in 0..DIM {
        trace_part[i][i] = tr;
        sym_traceless[i][i] -= tr;
    }
    // omega line inside the skew J-invariant part
    let mut omega_mat = [[0.0; 6]; 6];
    for x in 0..DIM {
        for y in 0..DIM {
            omega_mat[x][y] = su3.omega.coeff_dense(&[x, y]);
        }
    }
    let ip: f64 = (0..DIM)
        .flat_map(|x| (0..DIM).map(move |y| (x, y)))
        .map(|(x, y)| skew_inv[x][y] * omega_mat[x][y])
        .sum();
    let norm_sq: f64 = (0..DIM)
        .flat_map(|x| (0..DIM).map(move |y| (x, y)))
        .map(|(x, y)| omega_mat[x][y] * omega_mat[x][y])
        .sum();
    let c = ip / norm_sq;
    let mut omega_part = [[0.0; 6]; 6];
    let mut skew_perp = skew_inv;
    for x in 0..DIM {
        for y in 0..DIM {
            omega_part[x][y] = c * omega_mat[x][y];
            skew_perp[x][y] -= omega_part[x][y];
        }
    }
    RSplit {
        trace_part,
        omega_part,
        sym_j_inv: sym_traceless,
        skew_j_inv: skew_perp,
        sym_j_anti: sym_anti,
        skew_j_anti: skew_anti,
    }
}

/// Torsion class components in the intrinsic-torsion labelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ClassComponent {
    #[serde(rename = "W1+")]
    W1Plus,
    #[serde(rename = "W1-")]
    W1Minus,
    #[serde(rename = "W2+")]
    W2Plus,
    #[serde(rename = "W2-")]
    W2Minus,
    #[serde(rename = "W3")]
    W3,
    #[serde(rename = "W4")]
    W4,
    #[serde(rename = "W5")]
    W5,
}

impl std::fmt::Display for ClassComponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ClassComponent::W1Plus => "W1+",
            ClassComponent::W1Minus => "W1-",
            ClassComponent::W2Plus => "W2+",
            ClassComponent::W2Minus => "W2-",
            ClassComponent::W3 => "W3",
            ClassComponent::W4 => "W4",
            ClassComponent::W5 => "W5",
        };
        write!(f, "{}", s)
    }
}

/// Norms of the class components measured by an r-matrix split. The plus
/// classes of the intrinsic torsion are measured by the skew matrix parts
/// and the minus classes by the symmetric ones; the trace line feeds W1-,
/// the omega line W1+.
pub fn class_norms_from_split(split: &RSplit) -> BTreeMap<ClassComponent, f64> {
    let mut map = BTreeMap::new();
    map.insert(ClassComponent::W1Plus, frobenius(&split.omega_part));
    map.insert(ClassComponent::W1Minus, frobenius(&split.trace_part));
    map.insert(ClassComponent::W2Plus, frobenius(&split.skew_j_inv));
    map.insert(ClassComponent::W2Minus, frobenius(&split.sym_j_inv));
    map.insert(ClassComponent::W3, frobenius(&split.sym_j_anti));
    map.insert(ClassComponent::W4, frobenius(&split.skew_j_anti));
    map
}

/// The Lee form from an r-matrix in an orthonormal frame: the coderivative
/// of the Kaehler form is assembled over the adapted frame and rotated by J.
/// Only the skew J-anti-invariant part contributes.
pub fn lee_form_from_r(r: &RMatrix, su3: &Su3Point) -> Result<Form> {
    let frame = su3.adapted_frame()?;
    // r in adapted components
    let mut r_ad = [[0.0; 6]; 6];
    for a in 0..DIM {
        for b in 0..DIM {
            r_ad[a][b] = r.at(&frame[a], &frame[b]);
        }
    }
    let mut cod = vec![0.0; DIM]; // components of d* omega on the working frame
    for j in 0..DIM {
        let mut c = 0.0;
        for k in 0..DIM {
            for l in 0..DIM {
                if k == j || l == j || k == l {
                    continue;
                }
                let val = su3.psi_plus.eval(&[&frame[j], &frame[k], &frame[l]]);
                if val > 0.5 {
                    c += r_ad[k][l] - r_ad[l][k];
                }
            }
        }
        let flat = su3.gram.lower(&frame[j]);
        // the coderivative convention matching theta = J d* omega here is
        // star-d-star with a positive sign, hence the flip
        linalg::axpy(&mut cod, -c, &flat);
    }
    let cod_form = Form::one_form(&cod);
    Ok(su3.j_one_form(&cod_form))
}

/// Extract the W5 1-form from the exterior derivatives of the complex
/// volume form. All four star expressions of `6 eta - theta` are computed
/// (in the `(1/p!)` normalization the Lee form enters with a minus); their
/// max pairwise deviation is returned as a residual and checked against
/// `100 * expected_err`.
pub fn eta_from_dpsi(
    dpsi_plus: &Form,
    dpsi_minus: &Form,
    su3: &Su3Point,
    theta: &Form,
    expected_err: f64,
) -> Result<(Form, f64)> {
    let e1 = su3.star(&su3.star(dpsi_plus)?.wedge(&su3.psi_plus)?)?;
    let e2 = su3.star(&su3.star(dpsi_minus)?.wedge(&su3.psi_minus)?)?;
    let e3 = &su3.j_one_form(&su3.star(&su3.star(dpsi_plus)?.wedge(&su3.psi_minus)?)?) * -1.0;
    let e4 = su3.j_one_form(&su3.star(&su3.star(dpsi_minus)?.wedge(&su3.psi_plus)?)?);
    let exprs = [&e1, &e2, &e3, &e4];
    let mut residual = 0.0f64;
    for a in 0..4 {
        for b in (a + 1)..4 {
            residual = residual.max((exprs[a] - exprs[b]).max_abs());
        }
    }
    let allowed = 100.0 * expected_err;
    if residual > allowed {
        return Err(GeomError::InconsistentInput {
            what: "the four star expressions for 6 eta + theta disagree".into(),
            residual,
            allowed,
        });
    }
    let mut mean = Form::zero(DIM, 1);
    for e in exprs {
        mean = &mean + e;
    }
    let eta = &(&(&mean * 0.25) + theta) * (1.0 / 6.0);
    Ok((eta, residual))
}

/// The torsion endomorphism generated by the r-matrix:
/// `xi_X Y = -(1/2) sum_jk r(X, e_j) Psi+(e_j, e_k, Y) J e_k`
/// over an adapted frame.
pub fn xi_u3(r: &RMatrix, su3: &Su3Point, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let frame = su3.adapted_frame()?;
    let mut out = vec![0.0; DIM];
    for j in 0..DIM {
        let rj = r.at(x, &frame[j]);
        if rj == 0.0 {
            continue;
        }
        for k in 0..DIM {
            let p = su3.psi_plus.eval(&[&frame[j], &frame[k], y]);
            if p != 0.0 {
                let jek = su3.j_vec(&frame[k]);
                linalg::axpy(&mut out, -0.5 * rj * p, &jek);
            }
        }
    }
    Ok(out)
}

/// Recover the r-matrix from exterior derivatives:
/// `2 r(X,Y) = <X . d omega, Y . Psi+> + <(JX ^ Y) . (dPsi-)_xi - (X ^ Y) . (dPsi+)_xi, omega>`
/// with `(dPsi)_xi = dPsi + 3 eta ^ Psi`, followed by a rescale of the two
/// W1 lines: in the `(1/p!)` normalization the raw combination responds with
/// a factor 7 on the metric and omega multiples and with 1 elsewhere (pinned
/// against the covariant derivative of the Kaehler form). Fully tensorial,
/// so any working frame (orthonormal or chart) is fine.
pub fn r_from_exterior(
    su3: &Su3Point,
    domega: &Form,
    dpsi_plus: &Form,
    dpsi_minus: &Form,
    eta: &Form,
) -> Result<RMatrix> {
    let g = &su3.gram;
    let dp_xi = dpsi_plus + &(&eta.wedge(&su3.psi_plus)? * 3.0);
    let dm_xi = dpsi_minus + &(&eta.wedge(&su3.psi_minus)? * 3.0);
    let mut basis = [[0.0; DIM]; DIM];
    for (i, e) in basis.iter_mut().enumerate() {
        e[i] = 1.0;
    }
    let mut r = [[0.0; 6]; 6];
    for x in 0..DIM {
        let xdo = domega.interior(&basis[x])?;
        let jx = su3.j_vec(&basis[x]);
        for y in 0..DIM {
            let ydp = su3.psi_plus.interior(&basis[y])?;
            let first = inner(&xdo, &ydp, g);
            // (JX ^ Y) . beta is the 2-form beta(JX, Y, ., .)
            let minus_slice = dm_xi.interior(&jx)?.interior(&basis[y])?;
            let plus_slice = dp_xi.interior(&basis[x])?.interior(&basis[y])?;
            let second = inner(&(&minus_slice - &plus_slice), &su3.omega, g);
            r[x][y] = (first + second) / 2.0;
        }
    }
    // metric-aware projection coefficients of the two W1 lines
    let pair = |a: &Mat6, b: &Mat6| -> f64 {
        let mut s = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    for l in 0..DIM {
                        s += a[i][j] * b[k][l] * g.inv_entry(i, k) * g.inv_entry(j, l);
                    }
                }
            }
        }
        s
    };
    let mut g_mat = [[0.0; 6]; 6];
    let mut omega_mat = [[0.0; 6]; 6];
    for i in 0..DIM {
        for j in 0..DIM {
            g_mat[i][j] = g.entry(i, j);
            omega_mat[i][j] = su3.omega.coeff_dense(&[i, j]);
        }
    }
    let c_g = pair(&r, &g_mat) / pair(&g_mat, &g_mat);
    let c_o = pair(&r, &omega_mat) / pair(&omega_mat, &omega_mat);
    let shrink = 6.0 / 7.0;
    for i in 0..DIM {
        for j in 0..DIM {
            r[i][j] -= shrink * (c_g * g_mat[i][j] + c_o * omega_mat[i][j]);
        }
    }
    Ok(RMatrix(r))
}

/// A classified torsion report.
#[derive(Debug, Clone, Serialize)]
pub struct Su3TorsionReport {
    #[serde(skip)]
    pub r: RMatrix,
    #[serde(skip)]
    pub theta: Form,
    #[serde(skip)]
    pub eta: Option<Form>,
    pub norms: BTreeMap<ClassComponent, f64>,
    pub theta_norm: f64,
    pub eta_norm: Option<f64>,
    pub label: Vec<ClassComponent>,
    pub half_flat: Option<bool>,
    pub kahler: bool,
    pub almost_kahler: bool,
    pub nearly_kahler: bool,
    pub locally_conformal_kahler: bool,
}

/// Assemble the report from the computed torsion data. `tol` is scaled by
/// `1 + total torsion norm`; a component enters the label when its norm
/// clears the scaled cut. Requires an orthonormal working frame.
pub fn classify(
    su3: &Su3Point,
    r: &RMatrix,
    theta: &Form,
    eta: Option<&Form>,
    tol: f64,
) -> Result<Su3TorsionReport> {
    let split = decompose_r(r, su3);
    let mut norms = class_norms_from_split(&split);
    let theta_norm = theta.norm(&su3.gram);
    let eta_norm = eta.map(|e| e.norm(&su3.gram));
    if let Some(en) = eta_norm {
        norms.insert(ClassComponent::W5, en);
    }
    let total: f64 = norms.values().map(|v| v * v).sum::<f64>().sqrt();
    let cut = tol * (1.0 + total);
    let label: Vec<ClassComponent> = norms
        .iter()
        .filter(|(_, &v)| v >= cut)
        .map(|(&k, _)| k)
        .collect();
    // d omega from the reconstructed covariant derivative
    let nabla = r_inverse(r, su3)?;
    let mut domega = Form::zero(DIM, 3);
    {
        use crate::forms::multi_index::Subsets;
        for (rk, idx) in Subsets::new(DIM, 3).enumerate() {
            let (x, y, z) = (idx[0], idx[1], idx[2]);
            domega.coeffs_mut()[rk] =
                nabla.get(&[x, y, z]) + nabla.get(&[y, z, x]) + nabla.get(&[z, x, y]);
        }
    }
    let g = &su3.gram;
    let domega_norm = domega.norm(g);
    let almost_kahler = domega_norm < cut;
    // projection onto the span of Psi+ and Psi-
    let cp = inner(&domega, &su3.psi_plus, g) / inner(&su3.psi_plus, &su3.psi_plus, g);
    let cm = inner(&domega, &su3.psi_minus, g) / inner(&su3.psi_minus, &su3.psi_minus, g);
    let nk_res = (&(&domega - &(&su3.psi_plus * cp)) - &(&su3.psi_minus * cm)).norm(g);
    let nearly_kahler = nk_res < cut;
    let lck_res = (&(&domega * 2.0) - &theta.wedge(&su3.omega)?).norm(g);
    let locally_conformal_kahler = lck_res < cut;
    let kahler = r.frobenius() < cut;
    // dPsi+ vanishes iff the plus classes and the W4/W5 line do (the W4/W5
    // part of dPsi+ is -(3 eta - theta/2) ^ Psi+); a phase rotation can turn
    // a closed imaginary part into a closed real part, so the mirror branch
    // with the minus classes counts as half flat as well
    let half_flat = eta.map(|e| {
        let w45 = (&(e * 3.0) - &(theta * 0.5)).norm(g);
        let plus_closes =
            norms[&ClassComponent::W1Plus] < cut && norms[&ClassComponent::W2Plus] < cut;
        let minus_closes =
            norms[&ClassComponent::W1Minus] < cut && norms[&ClassComponent::W2Minus] < cut;
        theta_norm < cut && w45 < cut && (plus_closes || minus_closes)
    });
    Ok(Su3TorsionReport {
        r: r.clone(),
        theta: theta.clone(),
        eta: eta.cloned(),
        norms,
        theta_norm,
        eta_norm,
        label,
        half_flat,
        kahler,
        almost_kahler,
        nearly_kahler,
        locally_conformal_kahler,
    })
}

/// Nijenhuis tensor of an almost complex structure field by central
/// differences, lowered with the metric at the evaluation point:
/// `N(x, y, z) = <[x,y] + J[Jx,y] + J[x,Jy] - [Jx,Jy], z>_g`
/// on coordinate fields. The overall sign is the one that pairs positively
/// with the imaginary part of the volume form on the quasi-integrable
/// product-of-spheres structure.
pub fn nijenhuis_fd(
    j_field: &dyn Fn(&[f64]) -> Result<Mat6>,
    gram: &Gram,
    u: &[f64],
    h: f64,
) -> Result<CovTensor> {
    let j0 = j_field(u)?;
    // dj[m][k][l] = d J[k][l] / d u_m
    let mut dj = vec![[[0.0; 6]; 6]; DIM];
    for (m, slot) in dj.iter_mut().enumerate() {
        let mut up = u.to_vec();
        up[m] = u[m] + h;
        let plus = j_field(&up)?;
        up[m] = u[m] - h;
        let minus = j_field(&up)?;
        for k in 0..DIM {
            for l in 0..DIM {
                slot[k][l] = (plus[k][l] - minus[k][l]) / (2.0 * h);
            }
        }
    }
    let mut raised = [[[0.0; 6]; 6]; 6]; // raised[k][i][j] = components of N(e_i, e_j)
    for i in 0..DIM {
        for jx in 0..DIM {
            for k in 0..DIM {
                let mut s = 0.0;
                for m in 0..DIM {
                    s += j0[m][i] * dj[m][k][jx] - j0[m][jx] * dj[m][k][i];
                    s += dj[jx][m][i] * j0[k][m] - dj[i][m][jx] * j0[k][m];
                }
                raised[k][i][jx] = -s;
            }
        }
    }
    let mut out = CovTensor::zero(DIM, 3);
    for i in 0..DIM {
        for jx in 0..DIM {
            for z in 0..DIM {
                let mut s = 0.0;
                for k in 0..DIM {
                    s += gram.entry(z, k) * raised[k][i][jx];
                }
                out.set(&[i, jx, z], s);
            }
        }
    }
    Ok(out)
}
