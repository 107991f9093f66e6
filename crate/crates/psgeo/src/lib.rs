//! Differential geometry of 2-surfaces embedded in a Riemannian manifold,
//! computed two independent ways: once through textbook Gauss/Weingarten
//! formulas (the `classical` module) and once through a Poisson-bracket
//! algebra on the surface (`poissongeo` and `znormals`). Every bracket-side
//! quantity can be cross-checked against the classical route at sampled
//! points.
//!
//! The building blocks are a small expression language (`expr`), second-order
//! jet arithmetic (`jet`), dense desk-scale linear algebra (`tensor`) and a
//! symbolic ambient-metric layer (`ambient`). The `surfspec` and `report`
//! modules provide the batch harness behind the `psgeo` binary.

pub mod ambient;
pub mod classical;

pub mod expr;
pub mod jet;
pub mod poissongeo;
pub mod report;

pub mod surfspec;
pub mod tensor;
pub mod znormals;


pub use ambient::AmbientManifold;
pub use classical::{Density, FramePoint, SurfaceSpec};

pub use expr::Expr;
pub use jet::{Jet2, Scalar};

pub use tensor::{DVec, Mat};
