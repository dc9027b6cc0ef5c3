//! Finite-difference exterior derivative of form fields on chart domains.

use super::Form;
use crate::error::{GeomError, Result};

/// Central-difference stencil order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdScheme {
    /// O(h^2) three-point stencil.
    Central2,
    /// O(h^4) five-point stencil.
    Central4,
}

impl Default for FdScheme {
    fn default() -> Self {
        FdScheme::Central2
    }
}

/// Default step relative to the local coordinate scale.
pub const DEFAULT_STEP: f64 = 1e-4;

pub type FormField<'a> = dyn Fn(&[f64]) -> Result<Form> + 'a;

/// Partial derivative of a form field in coordinate direction `j`.
pub fn partial_fd(field: &FormField, u: &[f64], j: usize, h: f64, scheme: FdScheme) -> Result<Form> {
    let mut up = u.to_vec();
    match scheme {
        FdScheme::Central2 => {
            up[j] = u[j] + h;
            let plus = field(&up)?;
            up[j] = u[j] - h;
            let minus = field(&up)?;
            Ok(&(&plus - &minus) * (0.5 / h))
        }
        FdScheme::Central4 => {
            up[j] = u[j] + 2.0 * h;
            let p2 = field(&up)?;
            up[j] = u[j] + h;
            let p1 = field(&up)?;
            up[j] = u[j] - h;
            let m1 = field(&up)?;
            up[j] = u[j] - 2.0 * h;
            let m2 = field(&up)?;
            let num = &(&(&p1 - &m1) * 8.0) - &(&p2 - &m2);
            Ok(&num * (1.0 / (12.0 * h)))
        }
    }
}

/// Exterior derivative `d(alpha)` of a form field at `u` by central
/// differences of the coefficients: `d alpha = sum_j du^j ^ (d alpha / du_j)`.
///
/// The error is O(h^2) for C^3 fields with the default scheme; linear and
/// quadratic coefficient fields differentiate exactly.
pub fn exterior_derivative_fd(
    field: &FormField,
    u: &[f64],
    h: f64,
    scheme: FdScheme,
) -> Result<Form> {
    let m = u.len();
    if h <= 0.0 {
        return Err(GeomError::InvalidArgument("FD step must be positive".into()));
    }
    let probe = field(u)?;
    if probe.dim() != m {
        return Err(GeomError::DimensionMismatch(format!(
            "field produces forms on R^{} but the chart domain is R^{}",
            probe.dim(),
            m
        )));
    }
    let mut out = Form::zero(m, probe.degree() + 1);
    for j in 0..m {
        let dj = partial_fd(field, u, j, h, scheme)?;
        let du_j = Form::basis(m, &[j])?;
        out = &out + &du_j.wedge(&dj)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field_has_zero_derivative() {
        let field = |_: &[f64]| Form::basis(3, &[0, 1]);
        let d = exterior_derivative_fd(&field, &[0.2, 0.3, -0.1], 1e-4, FdScheme::Central2).unwrap();
        assert!(d.is_zero(1e-12));
    }

    #[test]
    fn linear_field_is_exact() {
        // u1 * du2 has d = du1 ^ du2 exactly under central differences
        let field = |u: &[f64]| {
            let mut f = Form::zero(3, 1);
            f.coeffs_mut()[1] = u[0];
            Ok(f)
        };
        let d = exterior_derivative_fd(&field, &[0.7, -0.2, 0.4], 1e-4, FdScheme::Central2).unwrap();
        assert!((d.coeff(&[0, 1]) - 1.0).abs() < 1e-12);
        assert!(d.coeff(&[0, 2]).abs() < 1e-12);
        assert!(d.coeff(&[1, 2]).abs() < 1e-12);
    }

    #[test]
    fn second_order_convergence() {
        // coefficient sin(u1) cos(u2): truncation error scales like h^2
        let field = |u: &[f64]| {
            let mut f = Form::zero(2, 1);
            f.coeffs_mut()[1] = u[0].sin() * u[1].cos();
            Ok(f)
        };
        let u = [0.5f64, 0.8];
        let exact = u[0].cos() * u[1].cos();
        let err = |h: f64| {
            let d = exterior_derivative_fd(&field, &u, h, FdScheme::Central2).unwrap();
            (d.coeff(&[0, 1]) - exact).abs()
        };
        let e1 = err(1e-2);
        let e2 = err(5e-3);
        let ratio = e1 / e2;
        assert!((ratio - 4.0).abs() < 0.8, "ratio = {}", ratio);
    }

    #[test]
    fn d_after_d_is_small() {
        let field = |u: &[f64]| {
            let mut f = Form::zero(3, 1);
            f.coeffs_mut()[0] = (u[1] * u[2]).sin();
            f.coeffs_mut()[2] = u[0].exp() * u[1];
            Ok(f)
        };
        let h = 1e-4;
        let d_field = move |u: &[f64]| exterior_derivative_fd(&field, u, h, FdScheme::Central2);
        let dd = exterior_derivative_fd(&d_field, &[0.3, 0.1, 0.6], h, FdScheme::Central2).unwrap();
        assert!(dd.max_abs() < 1e-6);
    }

    #[test]
    fn fourth_order_beats_second_order() {
        let field = |u: &[f64]| {
            let mut f = Form::zero(2, 0);
            f.coeffs_mut()[0] = (3.0 * u[0]).sin() * (2.0 * u[1]).cos();
            Ok(f)
        };
        let u = [0.4f64, 0.9];
        let h = 1e-2;
        let exact_d0 = 3.0 * (3.0 * u[0]).cos() * (2.0 * u[1]).cos();
        let d2 = exterior_derivative_fd(&field, &u, h, FdScheme::Central2).unwrap();
        let d4 = exterior_derivative_fd(&field, &u, h, FdScheme::Central4).unwrap();
        let e2 = (d2.coeff(&[0]) - exact_d0).abs();
        let e4 = (d4.coeff(&[0]) - exact_d0).abs();
        assert!(e4 < e2 / 10.0, "e2={:.3e} e4={:.3e}", e2, e4);
    }
}
