//! Exactly-once coverage ("1-density") of unit disk and unit ball covers.
//!
//! * [`planar`]: the sector function and its optimum, the Voronoi cover
//!   criterion, and sampled multiplicity histograms for lattice covers.
//! * [`dodeca`]: the dodecahedral cell of a unit ball, its reference
//!   tetrahedra and the once-covered region `S`.
//! * [`volume`]: three estimators of `vol(S)` and a seeded trial runner.
//! * [`hull`]: the incremental 3D convex hull behind the patch estimator.
//! * [`report`] and [`cli`]: output documents and the `onecover` binary.

pub mod cli;
pub mod dodeca;
pub mod error;
pub mod geom;
pub mod hull;
pub mod planar;
pub mod report;
pub mod sampling;
pub mod volume;

pub use error::{Error, Result};
pub use geom::{Point2, Point3, Tetrahedron};
pub use sampling::RandomStream;
