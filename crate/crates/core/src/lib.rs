//! Numerical engine for Spin(7)- and SU(3)-structures.
//!
//! ```
//! use spin7lab::lab::{build_example, ExampleName, ExampleSpec};
//! use spin7lab::subman::{fundamental_data, induced_su3, torsion_from_shape};
//!
//! // classify one point of the product of two unit three-spheres at the
//! // phase where the real part of the complex volume form closes
//! let mut spec = ExampleSpec::new(ExampleName::S3xS3);
//! spec.gamma = spin7lab::subman::GammaField::Constant(std::f64::consts::FRAC_PI_4);
//! let ex = build_example(&spec)?;
//! let u = [0.8, 0.7, 0.5, 0.6, 0.9, 0.3];
//! let geom = fundamental_data(&ex.chart, &ex.ambient, &u)?;
//! let su3 = induced_su3(&geom, &ex.ambient, std::f64::consts::FRAC_PI_4)?;
//! let torsion = torsion_from_shape(&geom, &ex.ambient, &su3, &[0.0; 6], None, 1e-6)?;
//! assert_eq!(
//!     torsion.report.label.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
//!     ["W1-", "W3"],
//! );
//! assert_eq!(torsion.report.half_flat, Some(true));
//! # Ok::<(), spin7lab::GeomError>(())
//! ```
//!
//! The crate is organized around one currency type, the dense exterior-algebra
//! [`forms::Form`], and builds up from it:
//!
//! - [`forms`]: wedge, interior product, Hodge star, pullbacks, and
//!   finite-difference exterior derivatives over general Gram metrics.
//! - [`cayley`]: the octonionic fundamental 4-form on R^8, the triple cross
//!   product, the spin(7) splitting of 2-forms, Lee form, intrinsic torsion
//!   and the Fernandez classes, with flat and conformally flat ambients.
//! - [`su3`]: pointwise SU(3)-structures in dimension six, the r-matrix
//!   encoding of `grad omega`, the W1..W5 torsion decomposition, Lee form,
//!   and the Nijenhuis tensor.
//! - [`subman`]: charts, frames, second fundamental form, the induced
//!   SU(3)-structures on 6-submanifolds of a Spin(7) ambient, torsion from
//!   the shape operator, closedness checks, and the classification tables.
//! - [`lab`]: built-in example geometries, verification suites, and the JSON
//!   reporting used by the CLI.

pub mod cayley;
pub mod error;
pub mod forms;
pub mod lab;
mod linalg;
pub mod su3;
pub mod subman;

pub use error::{GeomError, Result};
