//! Built-in example geometries.

use crate::cayley::Ambient;
use crate::error::{GeomError, Result};
use crate::subman::{Chart, GammaField, Polynomial6};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use std::sync::Arc;

/// Names of the built-in examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleName {
    /// totally geodesic coordinate six-plane
    Plane,
    /// random polynomial graph over the six-plane
    Graph,
    /// product of two unit three-spheres in orthogonal quaternionic planes
    S3xS3,
    /// round six-sphere inside the imaginary seven-space
    S6,
    /// generic ellipsoid hypersurface of the imaginary seven-space
    Ellipsoid7,
    /// helicoid in a three-plane times a flat four-plane
    HelicoidR3Q4,
    /// minimal surface with non-flat normal bundle times a flat four-plane
    MinimalR4Q4,
}

impl ExampleName {
    pub const ALL: [ExampleName; 7] = [
        ExampleName::Plane,
        ExampleName::Graph,
        ExampleName::S3xS3,
        ExampleName::S6,
        ExampleName::Ellipsoid7,
        ExampleName::HelicoidR3Q4,
        ExampleName::MinimalR4Q4,
    ];

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "plane" => Ok(ExampleName::Plane),
            "graph" => Ok(ExampleName::Graph),
            "s3xs3" => Ok(ExampleName::S3xS3),
            "s6" => Ok(ExampleName::S6),
            "ellipsoid7" => Ok(ExampleName::Ellipsoid7),
            "helicoid_r3_q4" => Ok(ExampleName::HelicoidR3Q4),
            "minimal_r4_q4" => Ok(ExampleName::MinimalR4Q4),
            other => Err(GeomError::UnknownExample(other.into())),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ExampleName::Plane => "plane",
            ExampleName::Graph => "graph",
            ExampleName::S3xS3 => "s3xs3",
            ExampleName::S6 => "s6",
            ExampleName::Ellipsoid7 => "ellipsoid7",
            ExampleName::HelicoidR3Q4 => "helicoid_r3_q4",
            ExampleName::MinimalR4Q4 => "minimal_r4_q4",
        }
    }
}

/// Construction parameters for [`build_example`].
#[derive(Debug, Clone, Serialize)]
pub struct ExampleSpec {
    pub name: ExampleName,
    pub sigma: f64,
    pub gamma: GammaField,
    /// side length of the sample grid
    pub grid: usize,
    pub seed: u64,
    /// semi-axes of the ellipsoid hypersurface (first entry is the solved axis)
    pub ellipsoid_axes: [f64; 7],
    pub helicoid_pitch: f64,
}

impl ExampleSpec {
    pub fn new(name: ExampleName) -> Self {
        ExampleSpec {
            name,
            sigma: 1.0,
            gamma: GammaField::Constant(0.0),
            grid: 3,
            seed: 42,
            ellipsoid_axes: [1.0, 1.15, 0.9, 1.2, 0.85, 1.1, 0.95],
            helicoid_pitch: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma != 1.0 && self.sigma != -1.0 {
            return Err(GeomError::InvalidArgument("sigma must be +-1".into()));
        }
        if self.grid == 0 {
            return Err(GeomError::InvalidArgument("grid size must be >= 1".into()));
        }
        if self.ellipsoid_axes.iter().any(|&a| a <= 0.0) {
            return Err(GeomError::InvalidArgument(
                "ellipsoid semi-axes must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A built example: chart, ambient, and the phase field.
pub struct Example {
    pub chart: Chart,
    pub ambient: Ambient,
    pub gamma: GammaField,
}

/// Position and the two derivative jets of the unit three-sphere in polar
/// angles.
fn sphere3_jets(a: f64, b: f64, c: f64) -> ([f64; 4], [[f64; 4]; 3], [[[f64; 4]; 3]; 3]) {
    let (sa, ca) = a.sin_cos();
    let (sb, cb) = b.sin_cos();
    let (sc, cc) = c.sin_cos();
    let p = [ca, sa * cb, sa * sb * cc, sa * sb * sc];
    let d = [
        [-sa, ca * cb, ca * sb * cc, ca * sb * sc],
        [0.0, -sa * sb, sa * cb * cc, sa * cb * sc],
        [0.0, 0.0, -sa * sb * sc, sa * sb * cc],
    ];
    let daa = [-ca, -sa * cb, -sa * sb * cc, -sa * sb * sc];
    let dab = [0.0, -ca * sb, ca * cb * cc, ca * cb * sc];
    let dac = [0.0, 0.0, -ca * sb * sc, ca * sb * cc];
    let dbb = [0.0, -sa * cb, -sa * sb * cc, -sa * sb * sc];
    let dbc = [0.0, 0.0, -sa * cb * sc, sa * cb * cc];
    let dcc = [0.0, 0.0, -sa * sb * cc, -sa * sb * sc];
    let dd = [[daa, dab, dac], [dab, dbb, dbc], [dac, dbc, dcc]];
    (p, d, dd)
}

/// ambient slots of the two quaternionic planes: the first sphere spans
/// `{e, e0, e1, e3}`, the second `{e2, e4, e5, e6}`
const SPHERE1_SLOTS: [usize; 4] = [0, 1, 2, 4];
const SPHERE2_SLOTS: [usize; 4] = [3, 5, 6, 7];

fn s3xs3_chart() -> Chart {
    let map = Arc::new(|u: &[f64]| {
        let (p1, _, _) = sphere3_jets(u[0], u[1], u[2]);
        let (p2, _, _) = sphere3_jets(u[3], u[4], u[5]);
        let mut out = [0.0; 8];
        for (k, &slot) in SPHERE1_SLOTS.iter().enumerate() {
            out[slot] = p1[k];
        }
        for (k, &slot) in SPHERE2_SLOTS.iter().enumerate() {
            out[slot] = p2[k];
        }
        out
    });
    let jet1 = Arc::new(|u: &[f64]| {
        let (_, d1, _) = sphere3_jets(u[0], u[1], u[2]);
        let (_, d2, _) = sphere3_jets(u[3], u[4], u[5]);
        let mut out = [[0.0; 8]; 6];
        for col in 0..3 {
            for (k, &slot) in SPHERE1_SLOTS.iter().enumerate() {
                out[col][slot] = d1[col][k];
            }
            for (k, &slot) in SPHERE2_SLOTS.iter().enumerate() {
                out[3 + col][slot] = d2[col][k];
            }
        }
        out
    });
    let jet2 = Arc::new(|u: &[f64]| {
        let (_, _, dd1) = sphere3_jets(u[0], u[1], u[2]);
        let (_, _, dd2) = sphere3_jets(u[3], u[4], u[5]);
        let mut out = [[[0.0; 8]; 6]; 6];
        for i in 0..3 {
            for j in 0..3 {
                for (k, &slot) in SPHERE1_SLOTS.iter().enumerate() {
                    out[i][j][slot] = dd1[i][j][k];
                }
                for (k, &slot) in SPHERE2_SLOTS.iter().enumerate() {
                    out[3 + i][3 + j][slot] = dd2[i][j][k];
                }
            }
        }
        out
    });
    let domain = [
        (0.4, 1.2),
        (0.4, 1.2),
        (0.2, 1.0),
        (0.4, 1.2),
        (0.4, 1.2),
        (0.2, 1.0),
    ];
    Chart::with_jets(domain, map, jet1, jet2)
}

/// Graph of `x0 = sqrt(1 - |u|^2)` over six coordinates: a spherical cap on
/// slots `first..first+7`.
fn sphere_cap_chart(radius_axes: Option<[f64; 7]>, half_width: f64) -> Chart {
    let axes = radius_axes.unwrap_or([1.0; 7]);
    let w = move |u: &[f64]| -> f64 {
        let mut s = 1.0;
        for k in 0..6 {
            s -= (u[k] / axes[k + 1]).powi(2);
        }
        s.sqrt()
    };
    let map = Arc::new(move |u: &[f64]| {
        let mut out = [0.0; 8];
        out[1] = axes[0] * w(u);
        out[2..8].copy_from_slice(&u[..6]);
        out
    });
    let jet1 = Arc::new(move |u: &[f64]| {
        let wv = w(u);
        let mut out = [[0.0; 8]; 6];
        for k in 0..6 {
            out[k][1] = -axes[0] * u[k] / (axes[k + 1] * axes[k + 1] * wv);
            out[k][2 + k] = 1.0;
        }
        out
    });
    let jet2 = Arc::new(move |u: &[f64]| {
        let wv = w(u);
        let mut out = [[[0.0; 8]; 6]; 6];
        for k in 0..6 {
            for l in 0..6 {
                let ak = axes[k + 1] * axes[k + 1];
                let al = axes[l + 1] * axes[l + 1];
                let mut v = -axes[0] * u[k] * u[l] / (ak * al * wv * wv * wv);
                if k == l {
                    v -= axes[0] / (ak * wv);
                }
                out[k][l][1] = v;
            }
        }
        out
    });
    let domain = [(-half_width, half_width); 6];
    Chart::with_jets(domain, map, jet1, jet2)
}

fn helicoid_chart(pitch: f64) -> Chart {
    let map = Arc::new(move |u: &[f64]| {
        let mut out = [0.0; 8];
        out[1] = u[0].sinh() * u[1].cos();
        out[2] = u[0].sinh() * u[1].sin();
        out[4] = pitch * u[1];
        out[3] = u[2];
        out[5] = u[3];
        out[6] = u[4];
        out[7] = u[5];
        out
    });
    let jet1 = Arc::new(move |u: &[f64]| {
        let (sh, ch) = (u[0].sinh(), u[0].cosh());
        let (sv, cv) = u[1].sin_cos();
        let mut out = [[0.0; 8]; 6];
        out[0][1] = ch * cv;
        out[0][2] = ch * sv;
        out[1][1] = -sh * sv;
        out[1][2] = sh * cv;
        out[1][4] = pitch;
        out[2][3] = 1.0;
        out[3][5] = 1.0;
        out[4][6] = 1.0;
        out[5][7] = 1.0;
        out
    });
    let jet2 = Arc::new(move |u: &[f64]| {
        let (sh, ch) = (u[0].sinh(), u[0].cosh());
        let (sv, cv) = u[1].sin_cos();
        let mut out = [[[0.0; 8]; 6]; 6];
        out[0][0][1] = sh * cv;
        out[0][0][2] = sh * sv;
        out[0][1][1] = -ch * sv;
        out[0][1][2] = ch * cv;
        out[1][0][1] = -ch * sv;
        out[1][0][2] = ch * cv;
        out[1][1][1] = -sh * cv;
        out[1][1][2] = -sh * sv;
        out
    });
    let domain = [
        (-0.8, 0.8),
        (-0.6, 0.6),
        (-0.5, 0.5),
        (-0.5, 0.5),
        (-0.5, 0.5),
        (-0.5, 0.5),
    ];
    Chart::with_jets(domain, map, jet1, jet2)
}

/// The surface `(u, v, u^2 - v^2, 2uv)` inside the first quaternionic plane,
/// times the orthogonal plane: conformal and harmonic, hence minimal, with a
/// rotating normal bundle.
fn minimal_surface_chart() -> Chart {
    let map = Arc::new(|u: &[f64]| {
        let mut out = [0.0; 8];
        out[0] = u[0];
        out[1] = u[1];
        out[2] = u[0] * u[0] - u[1] * u[1];
        out[4] = 2.0 * u[0] * u[1];
        out[3] = u[2];
        out[5] = u[3];
        out[6] = u[4];
        out[7] = u[5];
        out
    });
    let jet1 = Arc::new(|u: &[f64]| {
        let mut out = [[0.0; 8]; 6];
        out[0][0] = 1.0;
        out[0][2] = 2.0 * u[0];
        out[0][4] = 2.0 * u[1];
        out[1][1] = 1.0;
        out[1][2] = -2.0 * u[1];
        out[1][4] = 2.0 * u[0];
        out[2][3] = 1.0;
        out[3][5] = 1.0;
        out[4][6] = 1.0;
        out[5][7] = 1.0;
        out
    });
    let jet2 = Arc::new(|_: &[f64]| {
        let mut out = [[[0.0; 8]; 6]; 6];
        out[0][0][2] = 2.0;
        out[1][1][2] = -2.0;
        out[0][1][4] = 2.0;
        out[1][0][4] = 2.0;
        out
    });
    let domain = [
        (0.3, 1.0),
        (0.3, 1.0),
        (-0.5, 0.5),
        (-0.5, 0.5),
        (-0.5, 0.5),
        (-0.5, 0.5),
    ];
    Chart::with_jets(domain, map, jet1, jet2)
}

/// Random polynomial graph with quadratic and cubic terms.
fn random_graph_chart(seed: u64) -> Chart {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut terms = |n: usize| -> Vec<(f64, [u8; 6])> {
        (0..n)
            .map(|_| {
                let mut exps = [0u8; 6];
                let degree = rng.gen_range(2..=3);
                for _ in 0..degree {
                    exps[rng.gen_range(0..6)] += 1;
                }
                (rng.gen_range(-0.3..0.3), exps)
            })
            .collect()
    };
    let g1 = Polynomial6::new(terms(4));
    let g2 = Polynomial6::new(terms(4));
    Chart::graph([(-0.4, 0.4); 6], g1, g2)
}

/// Build the chart, ambient structure and phase field of an example.
pub fn build_example(spec: &ExampleSpec) -> Result<Example> {
    spec.validate()?;
    let ambient = Ambient::flat(spec.sigma)?;
    let chart = match spec.name {
        ExampleName::Plane => Chart::graph(
            [(-1.0, 1.0); 6],
            Polynomial6::new(vec![]),
            Polynomial6::new(vec![]),
        ),
        ExampleName::Graph => random_graph_chart(spec.seed),
        ExampleName::S3xS3 => s3xs3_chart(),
        ExampleName::S6 => sphere_cap_chart(None, 0.25),
        ExampleName::Ellipsoid7 => {
            let axes = spec.ellipsoid_axes;
            sphere_cap_chart(Some(axes), 0.2)
        }
        ExampleName::HelicoidR3Q4 => helicoid_chart(spec.helicoid_pitch),
        ExampleName::MinimalR4Q4 => minimal_surface_chart(),
    };
    Ok(Example {
        chart,
        ambient,
        gamma: spec.gamma.clone(),
    })
}

/// Deterministic sample points: an `n x n` grid over the first two chart
/// coordinates with the remaining coordinates at the domain center.
pub fn grid_points(chart: &Chart, n: usize) -> Vec<[f64; 6]> {
    let center = chart.center();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut u = center;
            let (lo0, hi0) = chart.domain()[0];
            let (lo1, hi1) = chart.domain()[1];
            u[0] = lo0 + (i as f64 + 0.5) * (hi0 - lo0) / n as f64;
            u[1] = lo1 + (j as f64 + 0.5) * (hi1 - lo1) / n as f64;
            out.push(u);
        }
    }
    out
}

/// Seeded uniform sample points in the interior of the domain box.
pub fn random_points(chart: &Chart, n: usize, seed: u64) -> Vec<[f64; 6]> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut u = [0.0; 6];
            for (k, &(lo, hi)) in chart.domain().iter().enumerate() {
                let margin = 0.05 * (hi - lo);
                u[k] = rng.gen_range((lo + margin)..(hi - margin));
            }
            u
        })
        .collect()
}
