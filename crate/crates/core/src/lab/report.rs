//! JSON classification reports over sample grids.

use crate::error::{GeomError, Result};
use crate::forms::fd::FdScheme;
use crate::lab::examples::{grid_points, Example, ExampleSpec};
use crate::subman::{
    closedness_check, fundamental_data, induced_su3, table_match, torsion_from_derivatives,
    torsion_from_shape, RowMatch, TableKind,
};
use crate::su3::ClassComponent;
use serde::Serialize;
use std::collections::BTreeMap;

/// Per-point record of the sweep.
#[derive(Debug, Clone, Serialize)]
pub struct PointRecord {
    pub u: Vec<f64>,
    pub class: Vec<ClassComponent>,
    pub half_flat: Option<bool>,
    pub kahler: bool,
    pub nearly_kahler: bool,
    pub almost_kahler: bool,
    pub locally_conformal_kahler: bool,
    pub norms: BTreeMap<ClassComponent, f64>,
    pub theta_norm: f64,
    pub eta_norm: Option<f64>,
    pub residuals: BTreeMap<String, f64>,
    pub table: TableKind,
    pub table_rows: Vec<RowMatch>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    pub max_residuals: BTreeMap<String, f64>,
    pub mean_residuals: BTreeMap<String, f64>,
    pub consensus_class: Vec<ClassComponent>,
    pub class_unanimous: bool,
    pub all_rows_consistent: bool,
    pub max_mean_curvature: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub example: String,
    pub sigma: f64,
    pub gamma: f64,
    pub grid: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub fd_step: f64,
    pub points: Vec<PointRecord>,
    pub aggregate: Aggregate,
}

/// Options of a report run.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub tol: f64,
    pub fd_step: f64,
    /// cross-check the shape-operator route against the exterior-derivative
    /// route at every point
    pub fd_cross_check: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            tol: 1e-6,
            fd_step: 1e-4,
            fd_cross_check: true,
        }
    }
}

/// Sweep the grid, classify every point, and aggregate.
pub fn run_report(spec: &ExampleSpec, example: &Example, opts: &RunOptions) -> Result<Report> {
    let points_u = grid_points(&example.chart, spec.grid);
    let mut points = Vec::with_capacity(points_u.len());
    for u in &points_u {
        let record = analyze_point(example, u, opts).map_err(|e| e.at_point(u))?;
        points.push(record);
    }
    // aggregates
    let mut max_residuals: BTreeMap<String, f64> = BTreeMap::new();
    let mut mean_residuals: BTreeMap<String, f64> = BTreeMap::new();
    for p in &points {
        for (k, &v) in &p.residuals {
            let slot = max_residuals.entry(k.clone()).or_insert(0.0);
            *slot = slot.max(v);
            *mean_residuals.entry(k.clone()).or_insert(0.0) += v / points.len() as f64;
        }
    }
    let consensus_class = majority_class(&points);
    let class_unanimous = points.iter().all(|p| p.class == consensus_class);
    let all_rows_consistent = points
        .iter()
        .all(|p| p.table_rows.iter().all(|r| r.consistent));
    let max_mean_curvature = points
        .iter()
        .map(|p| p.residuals.get("mean_curvature").copied().unwrap_or(0.0))
        .fold(0.0f64, f64::max);
    Ok(Report {
        example: spec.name.as_str().to_string(),
        sigma: spec.sigma,
        gamma: spec.gamma.value(&example.chart.center()),
        grid: spec.grid,
        seed: spec.seed,
        tolerance: opts.tol,
        fd_step: opts.fd_step,
        points,
        aggregate: Aggregate {
            max_residuals,
            mean_residuals,
            consensus_class,
            class_unanimous,
            all_rows_consistent,
            max_mean_curvature,
        },
    })
}

fn majority_class(points: &[PointRecord]) -> Vec<ClassComponent> {
    let mut counts: BTreeMap<Vec<ClassComponent>, usize> = BTreeMap::new();
    for p in points {
        *counts.entry(p.class.clone()).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .max_by_key(|(_, n)| *n)
        .map(|(c, _)| c)
        .unwrap_or_default()
}

fn analyze_point(example: &Example, u: &[f64; 6], opts: &RunOptions) -> Result<PointRecord> {
    let chart = &example.chart;
    let ambient = &example.ambient;
    let gamma_value = example.gamma.value(u);
    let dgamma = example.gamma.gradient(u);
    let geom = fundamental_data(chart, ambient, u)?;
    let su3 = induced_su3(&geom, ambient, gamma_value)?;
    let shape = torsion_from_shape(&geom, ambient, &su3, &dgamma, None, opts.tol)?;
    let closed = closedness_check(&geom, ambient, opts.tol)?;
    let table = table_match(&shape.report, &geom, ambient, &su3, &dgamma, None, opts.tol)?;

    let mut residuals: BTreeMap<String, f64> = BTreeMap::new();
    residuals.insert("trace_identity_1".into(), shape.trace_residuals.0);
    residuals.insert("trace_identity_2".into(), shape.trace_residuals.1);
    if let Some(r) = shape.eta_residual {
        residuals.insert("eta_route_agreement".into(), r);
    }
    residuals.insert("closedness_n1".into(), closed.residual_n1);
    residuals.insert("closedness_n2".into(), closed.residual_n2);
    residuals.insert("theta_norm".into(), shape.report.theta_norm);
    residuals.insert("mean_curvature".into(), geom.mean_curvature_l1());
    residuals.insert("umbilic_defect".into(), geom.umbilic_residual());

    if opts.fd_cross_check {
        let fd = torsion_from_derivatives(
            chart,
            ambient,
            &example.gamma,
            u,
            opts.fd_step,
            FdScheme::Central2,
            opts.fd_step * opts.fd_step * 100.0,
        )?;
        residuals.insert(
            "r_route_agreement".into(),
            fd.r.sub(&shape.report.r).frobenius(),
        );
        if let Some(eta) = &shape.report.eta {
            residuals.insert("eta_fd_agreement".into(), (&fd.eta - eta).max_abs());
        }
        residuals.insert(
            "theta_fd_agreement".into(),
            (&fd.theta - &shape.report.theta).max_abs(),
        );
        residuals.insert("dpsi_plus_norm".into(), fd.dpsi_plus_norm);
        residuals.insert("dpsi_minus_norm".into(), fd.dpsi_minus_norm);
        residuals.insert("domega_norm".into(), fd.domega_norm);
        residuals.insert("eta_star_consistency".into(), fd.eta_consistency);
    }
    Ok(PointRecord {
        u: u.to_vec(),
        class: shape.report.label.clone(),
        half_flat: shape.report.half_flat,
        kahler: shape.report.kahler,
        nearly_kahler: shape.report.nearly_kahler,
        almost_kahler: shape.report.almost_kahler,
        locally_conformal_kahler: shape.report.locally_conformal_kahler,
        norms: shape.report.norms.clone(),
        theta_norm: shape.report.theta_norm,
        eta_norm: shape.report.eta_norm,
        residuals,
        table: table.table,
        table_rows: table.rows,
    })
}

/// Serialize a report deterministically.
pub fn to_json(report: &Report) -> Result<String> {
    serde_json::to_string_pretty(report)
        .map_err(|e| GeomError::InvalidArgument(format!("serialization failed: {}", e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::examples::{build_example, ExampleName};

    #[test]
    fn plane_report_is_kahler_everywhere() {
        let spec = ExampleSpec::new(ExampleName::Plane);
        let example = build_example(&spec).unwrap();
        let report = run_report(&spec, &example, &RunOptions::default()).unwrap();
        assert_eq!(report.points.len(), 9);
        assert!(report.aggregate.consensus_class.is_empty());
        assert!(report.aggregate.class_unanimous);
        assert!(report.aggregate.all_rows_consistent);
        for p in &report.points {
            assert!(p.kahler);
            assert!(p.residuals["closedness_n1"] < 1e-10);
        }
    }

    #[test]
    fn reports_serialize_deterministically() {
        let mut spec = ExampleSpec::new(ExampleName::S3xS3);
        spec.grid = 2;
        spec.gamma = crate::subman::GammaField::Constant(std::f64::consts::FRAC_PI_4);
        let example = build_example(&spec).unwrap();
        let a = to_json(&run_report(&spec, &example, &RunOptions::default()).unwrap()).unwrap();
        let b = to_json(&run_report(&spec, &example, &RunOptions::default()).unwrap()).unwrap();
        assert_eq!(a, b);
        // required schema fields are present
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        for key in ["example", "sigma", "gamma", "points", "aggregate"] {
            assert!(v.get(key).is_some(), "missing {}", key);
        }
        let p0 = &v["points"][0];
        for key in ["u", "class", "norms", "residuals", "table_rows"] {
            assert!(p0.get(key).is_some(), "missing point field {}", key);
        }
    }
}
