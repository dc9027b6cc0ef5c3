//! Invariant suites behind the `verify` subcommand: each suite exercises one
//! layer of the engine on seeded random data and reports its worst residual.

use crate::cayley::{
    beta_forms, lee_form, metric_from_phi, spin7_split, triple_cross, Ambient, CayleyForm,
    ScalarField, Spin7Torsion,
};
use crate::error::Result;
use crate::forms::fd::{exterior_derivative_fd, FdScheme};
use crate::forms::{hodge, inner, volume_form, Form, Gram, LinearMap, Orientation};
use crate::lab::examples::{build_example, random_points, ExampleName, ExampleSpec};
use crate::linalg;
use crate::subman::{
    closedness_check, frames_at, fundamental_data, induced_su3, lee_form_fd,
    structure_derivatives, torsion_from_derivatives, torsion_from_shape, GammaField,
};
use crate::su3::{decompose_r, r_inverse, r_map, ClassComponent, RMatrix, Su3Point};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub checks: usize,
}

impl SuiteResult {
    fn new(name: &str, max_residual: f64, tolerance: f64, checks: usize) -> Self {
        SuiteResult {
            name: name.into(),
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
            checks,
        }
    }
}

struct Recorder {
    worst: f64,
    count: usize,
}

impl Recorder {
    fn new() -> Self {
        Recorder {
            worst: 0.0,
            count: 0,
        }
    }

    fn push(&mut self, residual: f64) {
        self.worst = self.worst.max(residual);
        self.count += 1;
    }
}

fn random_form(rng: &mut StdRng, dim: usize, degree: usize) -> Form {
    let mut f = Form::zero(dim, degree);
    for c in f.coeffs_mut() {
        *c = rng.gen_range(-1.0..1.0);
    }
    f
}

fn random_gram(rng: &mut StdRng, dim: usize) -> Gram {
    let a: Vec<f64> = (0..dim * dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
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
    Gram::new(dim, m).expect("random Gram")
}

/// Graded commutativity, associativity, the antiderivation law, the star
/// involution, and the adjunction against random Gram metrics.
pub fn suite_exterior_algebra(tol: f64, seed: u64) -> Result<SuiteResult> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut rec = Recorder::new();
    let o = Orientation::positive();
    for n in [4usize, 6, 8] {
        for _ in 0..34 {
            let p = rng.gen_range(1..=2usize);
            let q = rng.gen_range(1..=(n - p).min(3));
            let a = random_form(&mut rng, n, p);
            let b = random_form(&mut rng, n, q);
            let ab = a.wedge(&b)?;
            let ba = b.wedge(&a)?;
            let sign = if (p * q) % 2 == 0 { 1.0 } else { -1.0 };
            rec.push((&ab - &(&ba * sign)).max_abs());
            let c = random_form(&mut rng, n, (n - p - q).min(2));
            let left = ab.wedge(&c)?;
            let right = a.wedge(&b.wedge(&c)?)?;
            rec.push((&left - &right).max_abs());
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let lhs = a.wedge(&b)?.interior(&x)?;
            let t1 = a.interior(&x)?.wedge(&b)?;
            let t2 = a.wedge(&b.interior(&x)?)?;
            let s = if p % 2 == 0 { 1.0 } else { -1.0 };
            rec.push((&lhs - &(&t1 + &(&t2 * s))).max_abs());
            // involution and adjunction for a random metric
            let g = random_gram(&mut rng, n);
            let ss = hodge(&hodge(&a, &g, o)?, &g, o)?;
            let sign = if (p * (n - p)) % 2 == 0 { 1.0 } else { -1.0 };
            rec.push((&ss - &(&a * sign)).max_abs());
            let b2 = random_form(&mut rng, n, p);
            let lhs = a.wedge(&hodge(&b2, &g, o)?)?.coeffs()[0];
            let rhs = inner(&a, &b2, &g) * volume_form(&g, o).coeffs()[0];
            rec.push((lhs - rhs).abs() / (1.0 + rhs.abs()));
            // pullback functoriality
            let l1 = LinearMap::new(
                n,
                4,
                (0..n * 4).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            )?;
            let l2 = LinearMap::new(
                4,
                4,
                (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            )?;
            if p <= 4 {
                let lhs = a.pullback(&l1.compose(&l2)?)?;
                let rhs = a.pullback(&l1)?.pullback(&l2)?;
                rec.push((&lhs - &rhs).max_abs());
            }
        }
    }
    Ok(SuiteResult::new("exterior-algebra", rec.worst, tol, rec.count))
}

/// Central differences reproduce analytic derivatives at second order.
pub fn suite_fd_derivative(seed: u64) -> Result<SuiteResult> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut rec = Recorder::new();
    for _ in 0..10 {
        let a = rng.gen_range(0.5..1.5);
        let b = rng.gen_range(0.5..1.5);
        let field = move |u: &[f64]| {
            let mut f = Form::zero(3, 1);
            f.coeffs_mut()[0] = (a * u[1]).sin() * (b * u[2]).cos();
            f.coeffs_mut()[2] = (u[0] * u[1]).exp() * 0.1;
            Ok(f)
        };
        let u = [
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
        ];
        let err = |h: f64| -> Result<f64> {
            let d = exterior_derivative_fd(&field, &u, h, FdScheme::Central2)?;
            // analytic exterior derivative
            let mut exact = Form::zero(3, 2);
            exact.set_coeff(&[0, 1], -a * (a * u[1]).cos() * (b * u[2]).cos());
            exact.set_coeff(
                &[0, 2],
                0.1 * u[1] * (u[0] * u[1]).exp() + b * (a * u[1]).sin() * (b * u[2]).sin(),
            );
            exact.set_coeff(&[1, 2], 0.1 * u[0] * (u[0] * u[1]).exp());
            Ok((&d - &exact).max_abs())
        };
        let e1 = err(4e-3)?;
        let e2 = err(2e-3)?;
        // skip points where the truncation term nearly vanishes and roundoff
        // would dominate the ratio
        if e1 > 1e-8 {
            let ratio = e1 / e2;
            rec.push((ratio - 4.0).abs() / 4.0);
        }
    }
    // second-order stencils must stay within 20 percent of fourth-order decay
    Ok(SuiteResult::new("fd-derivative-order", rec.worst, 0.2, rec.count))
}

/// The fundamental form, its eigenspaces, the cross product, and the
/// recovered metric.
pub fn suite_spin7_model(tol: f64, seed: u64) -> Result<SuiteResult> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut rec = Recorder::new();
    let g = Gram::identity(8);
    let o = Orientation::positive();
    for sigma in [1.0, -1.0] {
        let c = CayleyForm::new(sigma)?;
        let vol = volume_form(&g, o);
        rec.push((&c.phi().wedge(c.phi())? - &(&vol * (14.0 * sigma))).max_abs());
        rec.push((&hodge(c.phi(), &g, o)? - &(c.phi() * sigma)).max_abs());
        rec.push((inner(c.phi(), c.phi(), &g) - 14.0).abs());
        let betas = beta_forms(sigma);
        for (i, bi) in betas.iter().enumerate() {
            rec.push((&hodge(&bi.wedge(c.phi())?, &g, o)? - &(bi * -3.0)).max_abs());
            for (j, bj) in betas.iter().enumerate() {
                let expect = if i == j { 4.0 } else { 0.0 };
                rec.push((inner(bi, bj, &g) - expect).abs());
            }
        }
        // projector traces give the eigenspace dimensions
        let mut tr21 = 0.0;
        let mut tr7 = 0.0;
        for r in 0..28 {
            let mut psi = Form::zero(8, 2);
            psi.coeffs_mut()[r] = 1.0;
            let (p21, p7) = spin7_split(&psi, c.phi(), &g, o)?;
            tr21 += p21.coeffs()[r];
            tr7 += p7.coeffs()[r];
        }
        rec.push((tr21 - 21.0).abs());
        rec.push((tr7 - 7.0).abs());
        // the cross product reproduces the 4-form on random quadruples
        for _ in 0..500 {
            let vs: Vec<Vec<f64>> = (0..4)
                .map(|_| (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let p = triple_cross(c.phi(), &g, &vs[0], &vs[1], &vs[2]);
            let lhs = linalg::dot(&p, &vs[3]);
            let rhs = c.phi().eval(&[&vs[0], &vs[1], &vs[2], &vs[3]]);
            rec.push((lhs - rhs).abs() / 8.0);
        }
        // recovered metric on the frame
        for i in 0..8 {
            for j in 0..8 {
                let mut x = vec![0.0; 8];
                let mut y = vec![0.0; 8];
                x[i] = 1.0;
                y[j] = 1.0;
                let expect = if i == j { 1.0 } else { 0.0 };
                rec.push((metric_from_phi(c.phi(), &g, o, &x, &y)? - expect).abs());
            }
        }
    }
    Ok(SuiteResult::new("spin7-model", rec.worst, tol, rec.count))
}

/// Conformally flat ambient: the Lee identity, the torsion tensor, and the
/// two expressions for the minimal-connection difference.
pub fn suite_spin7_conformal(seed: u64) -> Result<SuiteResult> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut rec = Recorder::new();
    let field = ScalarField::linear([0.1, -0.05, 0.2, 0.0, 0.1, -0.15, 0.0, 0.05], 0.0);
    for sigma in [1.0, -1.0] {
        let ambient = Ambient::conformal(sigma, field.clone())?;
        for _ in 0..5 {
            let p: Vec<f64> = (0..8).map(|_| rng.gen_range(-0.4..0.4)).collect();
            let phi = ambient.phi_at(&p);
            let gp = ambient.gram_at(&p);
            let o = ambient.orientation();
            let theta = lee_form(&phi, &ambient.dphi_at(&p), &gp, &o)?;
            rec.push((&theta - &ambient.lee_at(&p)).max_abs());
            rec.push((&ambient.dphi_at(&p) - &theta.wedge(&phi)?).norm(&gp));
            let t = Spin7Torsion::from_dphi(&phi, &ambient.dphi_at(&p), &theta, &gp, sigma)?;
            let closed = Spin7Torsion::from_lee_only(&theta, &phi, &gp, sigma)?;
            rec.push(t.subtract(&closed).max_abs());
            rec.push(t.spin7_residual(&phi, &gp, o)?);
            let frame = ambient.cayley_frame_at(&p);
            let x: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let a = t.xi(&gp, &x, &y);
            let b = t.xi_via_cross(&phi, &gp, sigma, &frame, &x, &y);
            rec.push(linalg::norm(&linalg::sub(&a, &b)));
        }
    }
    Ok(SuiteResult::new("spin7-conformal", rec.worst, 1e-9, rec.count))
}

/// The flat SU(3) model identities and the r-matrix machinery.
pub fn suite_su3_model(tol: f64, seed: u64) -> Result<SuiteResult> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut rec = Recorder::new();
    let su3 = Su3Point::canonical(0.0);
    let vol = su3.volume();
    rec.push((&su3.psi_plus().wedge(su3.psi_minus())? - &(&vol * -4.0)).max_abs());
    rec.push(su3.psi_plus().wedge(su3.omega())?.max_abs());
    rec.push(su3.psi_minus().wedge(su3.omega())?.max_abs());
    let cube = su3.omega().wedge(su3.omega())?.wedge(su3.omega())?;
    rec.push((&cube - &(&vol * 6.0)).max_abs());
    for _ in 0..100 {
        let mu = random_form(&mut rng, 6, 1);
        let e1 = su3.star(&su3.star(&mu.wedge(su3.psi_plus())?)?.wedge(su3.psi_plus())?)?;
        rec.push((&e1 - &(&mu * -2.0)).max_abs());
        let e2 = su3.star(&su3.star(&mu.wedge(su3.psi_minus())?)?.wedge(su3.psi_plus())?)?;
        rec.push((&e2 - &(&su3.j_one_form(&mu) * 2.0)).max_abs());
        let x: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let jx = su3.j_vec(&x);
        rec.push((&su3.psi_plus().interior(&x)? - &su3.psi_minus().interior(&jx)?).max_abs());
        // r-matrix roundtrip
        let mut r = RMatrix::zero();
        for i in 0..6 {
            for j in 0..6 {
                r.0[i][j] = rng.gen_range(-1.0..1.0);
            }
        }
        let b = r_inverse(&r, &su3)?;
        rec.push(r_map(&b, &su3)?.sub(&r).frobenius());
    }
    // decomposition dimensions by projector traces
    let mut dims = [0.0f64; 6];
    for a in 0..6 {
        for b in 0..6 {
            let mut r = RMatrix::zero();
            r.0[a][b] = 1.0;
            let split = decompose_r(&r, &su3);
            for (k, (_, part)) in split.parts().iter().enumerate() {
                dims[k] += part[a][b];
            }
        }
    }
    for (got, want) in dims.iter().zip([1.0, 1.0, 8.0, 8.0, 12.0, 6.0]) {
        rec.push((got - want).abs());
    }
    Ok(SuiteResult::new("su3-model", rec.worst, tol, rec.count))
}

/// Frames, the Gauss equation, gauge invariance of J, and the three routes
/// to the Lee form on a curved graph.
pub fn suite_submanifold(seed: u64) -> Result<SuiteResult> {
    let mut rec = Recorder::new();
    let mut spec = ExampleSpec::new(ExampleName::Graph);
    spec.seed = seed;
    let ex = build_example(&spec)?;
    let gamma = GammaField::Constant(0.4);
    for u in random_points(&ex.chart, 3, seed.wrapping_add(1)) {
        let geom = fundamental_data(&ex.chart, &ex.ambient, &u)?;
        rec.push(crate::subman::gauss_residual(&ex.chart, &ex.ambient, &geom)?);
        let su3 = induced_su3(&geom, &ex.ambient, gamma.value(&u))?;
        let shape = torsion_from_shape(&geom, &ex.ambient, &su3, &gamma.gradient(&u), None, 1e-5)?;
        // flat ambient: the Lee form vanishes
        rec.push(shape.report.theta_norm);
        // three routes to the Lee form agree
        let theta_fd = lee_form_fd(&ex.chart, &ex.ambient, &gamma, &u, 1e-4, FdScheme::Central2)?;
        let theta_fd_on = frames_at(&ex.chart, &ex.ambient, &u)?.chart_form_to_frame(&theta_fd)?;
        rec.push((&theta_fd_on - &shape.report.theta).max_abs());
        let theta_r = crate::su3::lee_form_from_r(&shape.report.r, &su3)?;
        rec.push((&theta_r - &shape.report.theta).max_abs());
        // both torsion routes agree
        let fd = torsion_from_derivatives(
            &ex.chart,
            &ex.ambient,
            &gamma,
            &u,
            1e-4,
            FdScheme::Central2,
            1e-6,
        )?;
        rec.push(fd.r.sub(&shape.report.r).frobenius());
        rec.push((&fd.eta - shape.report.eta.as_ref().unwrap()).max_abs());
        rec.push(shape.trace_residuals.0);
        rec.push(shape.trace_residuals.1);
    }
    Ok(SuiteResult::new("submanifold-routes", rec.worst, 1e-5, rec.count))
}

/// The classification landmarks of the built-in examples.
pub fn suite_examples(seed: u64) -> Result<SuiteResult> {
    let mut rec = Recorder::new();
    // product of spheres: half flat with the advertised labels
    for (sigma, want_minus) in [(1.0, true), (-1.0, false)] {
        let mut spec = ExampleSpec::new(ExampleName::S3xS3);
        spec.sigma = sigma;
        spec.gamma = GammaField::Constant(std::f64::consts::FRAC_PI_4);
        let ex = build_example(&spec)?;
        let u = random_points(&ex.chart, 1, seed)[0];
        let geom = fundamental_data(&ex.chart, &ex.ambient, &u)?;
        let su3 = induced_su3(&geom, &ex.ambient, std::f64::consts::FRAC_PI_4)?;
        let shape = torsion_from_shape(&geom, &ex.ambient, &su3, &[0.0; 6], None, 1e-6)?;
        let expect = if want_minus {
            vec![ClassComponent::W1Minus, ClassComponent::W3]
        } else {
            vec![ClassComponent::W1Plus, ClassComponent::W3]
        };
        rec.push(if shape.report.label == expect { 0.0 } else { 1.0 });
        rec.push(if shape.report.half_flat == Some(true) { 0.0 } else { 1.0 });
    }
    // round sphere: umbilic and nearly Kaehler
    {
        let spec = ExampleSpec::new(ExampleName::S6);
        let ex = build_example(&spec)?;
        let u = random_points(&ex.chart, 1, seed)[0];
        let geom = fundamental_data(&ex.chart, &ex.ambient, &u)?;
        rec.push(geom.umbilic_residual());
        let su3 = induced_su3(&geom, &ex.ambient, 0.0)?;
        let shape = torsion_from_shape(&geom, &ex.ambient, &su3, &[0.0; 6], None, 1e-6)?;
        rec.push(if shape.report.nearly_kahler { 0.0 } else { 1.0 });
        rec.push(shape.report.theta_norm);
    }
    // ellipsoid: the real volume form closes at phase zero
    {
        let spec = ExampleSpec::new(ExampleName::Ellipsoid7);
        let ex = build_example(&spec)?;
        let u = random_points(&ex.chart, 1, seed)[0];
        let gamma = GammaField::Constant(0.0);
        let (_, dp, dm) =
            structure_derivatives(&ex.chart, &ex.ambient, &gamma, &u, 1e-4, FdScheme::Central2)?;
        rec.push(dp.max_abs());
        rec.push(if dm.max_abs() > 1e-3 { 0.0 } else { 1.0 });
    }
    // helicoid times the flat plane: holomorphic; the rotating minimal
    // surface: not closed, yet minimal and balanced
    {
        let spec = ExampleSpec::new(ExampleName::HelicoidR3Q4);
        let ex = build_example(&spec)?;
        let u = random_points(&ex.chart, 1, seed)[0];
        let geom = fundamental_data(&ex.chart, &ex.ambient, &u)?;
        let closed = closedness_check(&geom, &ex.ambient, 1e-8)?;
        rec.push(closed.residual_n1);
        rec.push(closed.residual_n2);
    }
    {
        let spec = ExampleSpec::new(ExampleName::MinimalR4Q4);
        let ex = build_example(&spec)?;
        let u = random_points(&ex.chart, 1, seed)[0];
        let geom = fundamental_data(&ex.chart, &ex.ambient, &u)?;
        rec.push(geom.mean_curvature_l1());
        let closed = closedness_check(&geom, &ex.ambient, 1e-3)?;
        rec.push(if closed.closed { 1.0 } else { 0.0 });
        let su3 = induced_su3(&geom, &ex.ambient, 0.0)?;
        let shape = torsion_from_shape(&geom, &ex.ambient, &su3, &[0.0; 6], None, 1e-6)?;
        rec.push(shape.report.theta_norm);
    }
    Ok(SuiteResult::new("examples-landmarks", rec.worst, 1e-6, rec.count))
}

/// Run every suite; `algebraic_tol` drives the exact identities, the
/// finite-difference suites keep their own documented tolerances.
pub fn run_all_suites(algebraic_tol: f64, seed: u64) -> Result<Vec<SuiteResult>> {
    Ok(vec![
        suite_exterior_algebra(algebraic_tol, seed)?,
        suite_fd_derivative(seed)?,
        suite_spin7_model(algebraic_tol, seed)?,
        suite_spin7_conformal(seed)?,
        suite_su3_model(algebraic_tol, seed)?,
        suite_submanifold(seed)?,
        suite_examples(seed)?,
    ])
}
