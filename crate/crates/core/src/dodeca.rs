//! The dodecahedral cell of a unit ball and the once-covered region `S` in it.
//!
//! The cell around the ball at `o` is a dodecahedron with circumradius 1.
//! One face sits on the plane `z = H`, shared with the neighbor at
//! `p0 = (0, 0, 2H)`. By symmetry the once-covered volume is 60 copies of
//! the part of `T = [p0, p1, p2, p3]` lying outside the unit ball at `o`,
//! where `p2` is the face center and `p1`, `p3` are adjacent face vertices.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Plane3, Point3, Tetrahedron, CONTAINMENT_EPS};

/// Edge length reported for the cell by the original computation.
pub const PAPER_EDGE: f64 = 0.763934;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DodecaConfig {
    /// Edge 0.763934 with `R` and `H` derived from it.
    Paper,
    /// The regular dodecahedron inscribed in the unit sphere.
    Regular,
}

impl DodecaConfig {
    pub fn name(self) -> &'static str {
        match self {
            DodecaConfig::Paper => "paper",
            DodecaConfig::Regular => "regular",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DodecaParams {
    pub config: DodecaConfig,
    /// Edge length `a`.
    pub edge: f64,
    /// Circumradius `R` of a pentagonal face.
    pub face_circumradius: f64,
    /// Distance `H` from the cell center to a face plane.
    pub face_distance: f64,
    pub circumradius: f64,
    /// Cell volume over unit ball volume.
    pub alpha1: f64,
}

pub fn dodeca_params(config: DodecaConfig) -> DodecaParams {
    let edge = match config {
        DodecaConfig::Paper => PAPER_EDGE,
        DodecaConfig::Regular => 4.0 / (3f64.sqrt() * (1.0 + 5f64.sqrt())),
    };
    let circumradius = 1.0;
    let r = edge / (2.0 * (36f64).to_radians().sin());
    let h = (circumradius * circumradius - r * r).sqrt();
    // twelve pentagonal pyramids of base area 5 * (a R sin 54 / 2) and height H
    let pentagon = 5.0 * 0.5 * edge * r * (54f64).to_radians().sin();
    let alpha1 = 12.0 * pentagon * h / 3.0 / (4.0 * PI / 3.0);
    DodecaParams {
        config,
        edge,
        face_circumradius: r,
        face_distance: h,
        circumradius,
        alpha1,
    }
}

/// Reference points and tetrahedra of one cell sector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellFrame {
    pub o: Point3,
    pub p0: Point3,
    pub p1: Point3,
    pub p2: Point3,
    pub p3: Point3,
    pub p4: Point3,
    /// `[p0, p1, p2, p3]`.
    pub t: Tetrahedron,
    /// `t` cut by the half-space `z >= 1`.
    pub t_prime: Tetrahedron,
    /// `[p0, p1, p3, p4]`, an upper bound for `S`.
    pub big: Tetrahedron,
    pub vol_t: f64,
    pub vol_t_prime: f64,
    pub vol_big: f64,
}

pub fn cell_frame(params: &DodecaParams) -> CellFrame {
    let (r, h) = (params.face_circumradius, params.face_distance);
    let o = Point3::ORIGIN;
    let p0 = Point3::new(0.0, 0.0, 2.0 * h);
    let p1 = Point3::new(0.0, r, h);
    let p2 = Point3::new(0.0, 0.0, h);
    let p3 = Point3::new(r * (72f64).to_radians().sin(), r * (72f64).to_radians().cos(), h);
    let p4 = Point3::new(0.0, 0.0, params.circumradius);
    let t = Tetrahedron::new(p0, p1, p2, p3);
    let t_prime = t.scaled_about(p0, (2.0 * h - 1.0) / h);
    let big = Tetrahedron::new(p0, p1, p3, p4);
    CellFrame {
        o,
        p0,
        p1,
        p2,
        p3,
        p4,
        t,
        t_prime,
        big,
        vol_t: t.volume(),
        vol_t_prime: t_prime.volume(),
        vol_big: big.volume(),
    }
}

/// A body exposing the queries the volume estimators need.
pub trait Region: Sync {
    /// A tetrahedron containing the body, used for rejection sampling.
    fn envelope(&self) -> &Tetrahedron;

    fn contains(&self, q: Point3) -> bool;

    /// True when the closed ball lies entirely inside the body.
    fn contains_ball(&self, center: Point3, radius: f64) -> Result<bool>;
}

/// Part of `T` outside the open unit ball at the origin.
#[derive(Clone, Debug)]
pub struct RegionS {
    frame: CellFrame,
    planes: [Plane3; 4],
}

impl RegionS {
    pub fn new(frame: CellFrame) -> Result<Self> {
        let planes = frame.t.inward_planes()?;
        Ok(Self { frame, planes })
    }

    pub fn frame(&self) -> &CellFrame {
        &self.frame
    }

    /// Inward face planes of `T`.
    pub fn planes(&self) -> &[Plane3; 4] {
        &self.planes
    }
}

impl Region for RegionS {
    fn envelope(&self) -> &Tetrahedron {
        &self.frame.t
    }

    #[inline]
    fn contains(&self, q: Point3) -> bool {
        self.planes
            .iter()
            .all(|p| p.signed_distance(q) >= -CONTAINMENT_EPS)
            && q.norm() >= 1.0 - CONTAINMENT_EPS
    }

    fn contains_ball(&self, center: Point3, radius: f64) -> Result<bool> {
        if !(radius >= 0.0) {
            return Err(Error::domain(format!("radius {radius} must be non-negative")));
        }
        if radius == 0.0 {
            return Ok(self.contains(center));
        }
        Ok(self
            .planes
            .iter()
            .all(|p| p.signed_distance(center) >= radius)
            && center.norm() >= 1.0 + radius)
    }
}

/// A solid tetrahedron, used to sanity-check the estimators on a known volume.
#[derive(Clone, Debug)]
pub struct TetraRegion {
    tetra: Tetrahedron,
    planes: [Plane3; 4],
}

impl TetraRegion {
    pub fn new(tetra: Tetrahedron) -> Result<Self> {
        Ok(Self {
            planes: tetra.inward_planes()?,
            tetra,
        })
    }
}

impl Region for TetraRegion {
    fn envelope(&self) -> &Tetrahedron {
        &self.tetra
    }

    fn contains(&self, q: Point3) -> bool {
        self.planes
            .iter()
            .all(|p| p.signed_distance(q) >= -CONTAINMENT_EPS)
    }

    fn contains_ball(&self, center: Point3, radius: f64) -> Result<bool> {
        if !(radius >= 0.0) {
            return Err(Error::domain(format!("radius {radius} must be non-negative")));
        }
        if radius == 0.0 {
            return Ok(self.contains(center));
        }
        Ok(self.planes.iter().all(|p| p.signed_distance(center) >= radius))
    }
}
