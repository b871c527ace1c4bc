//! Points, half-spaces, tetrahedra and convex polygons.
//!
//! Everything here is dimensionless: the unit ball radius sets the scale.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for closed containment tests.
pub const CONTAINMENT_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    #[inline]
    pub fn distance(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    #[inline]
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// A point or displacement in 3-space.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn dot(self, o: Point3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Point3) -> Point3 {
        Point3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    #[inline]
    pub fn distance(self, o: Point3) -> f64 {
        (self - o).norm()
    }

    pub fn normalized(self) -> Option<Point3> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Add for Point3 {
    type Output = Point3;
    #[inline]
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Point3 {
    #[inline]
    fn add_assign(&mut self, o: Point3) {
        self.x += o.x;
        self.y += o.y;
        self.z += o.z;
    }
}

impl Sub for Point3 {
    type Output = Point3;
    #[inline]
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    #[inline]
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    #[inline]
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

/// Closed half-plane `normal · x <= offset` with a unit normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlane {
    normal: Point2,
    offset: f64,
}

impl HalfPlane {
    /// Builds the half-plane `normal · x <= offset`, rescaling to a unit normal.
    pub fn new(normal: Point2, offset: f64) -> Result<Self> {
        let len = normal.norm();
        if !(len > 0.0 && len.is_finite() && offset.is_finite()) {
            return Err(Error::domain("half-plane normal must be finite and non-zero"));
        }
        Ok(Self {
            normal: normal * (1.0 / len),
            offset: offset / len,
        })
    }

    /// Points at least as close to `site` as to `other`.
    pub fn bisector(site: Point2, other: Point2) -> Result<Self> {
        let d = other - site;
        HalfPlane::new(d, (other.norm_squared() - site.norm_squared()) * 0.5)
    }

    pub fn normal(&self) -> Point2 {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Positive outside, negative inside.
    #[inline]
    pub fn signed_distance(&self, p: Point2) -> f64 {
        self.normal.dot(p) - self.offset
    }

    pub fn contains(&self, p: Point2) -> bool {
        self.signed_distance(p) <= CONTAINMENT_EPS
    }
}

/// Oriented plane `normal · x = offset` with a unit normal.
///
/// `signed_distance` is positive on the side the normal points to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plane3 {
    normal: Point3,
    offset: f64,
}

impl Plane3 {
    pub fn new(normal: Point3, offset: f64) -> Result<Self> {
        let len = normal.norm();
        if !(len > 0.0 && len.is_finite() && offset.is_finite()) {
            return Err(Error::domain("plane normal must be finite and non-zero"));
        }
        Ok(Self {
            normal: normal * (1.0 / len),
            offset: offset / len,
        })
    }

    /// Plane through `a, b, c` whose normal points toward `toward`.
    pub fn through_facing(a: Point3, b: Point3, c: Point3, toward: Point3) -> Result<Self> {
        let n = (b - a).cross(c - a);
        let plane = Plane3::new(n, n.dot(a)).map_err(|_| Error::DegenerateSimplex)?;
        Ok(if plane.signed_distance(toward) < 0.0 {
            plane.flipped()
        } else {
            plane
        })
    }

    pub fn flipped(&self) -> Self {
        Self {
            normal: -self.normal,
            offset: -self.offset,
        }
    }

    pub fn normal(&self) -> Point3 {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    #[inline]
    pub fn signed_distance(&self, p: Point3) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tetrahedron {
    pub vertices: [Point3; 4],
}

impl Tetrahedron {
    pub const fn new(a: Point3, b: Point3, c: Point3, d: Point3) -> Self {
        Self {
            vertices: [a, b, c, d],
        }
    }

    /// `det(v1 - v0, v2 - v0, v3 - v0) / 6`.
    pub fn signed_volume(&self) -> f64 {
        let [a, b, c, d] = self.vertices;
        (b - a).dot((c - a).cross(d - a)) / 6.0
    }

    pub fn volume(&self) -> f64 {
        tetra_volume(self)
    }

    pub fn centroid(&self) -> Point3 {
        let [a, b, c, d] = self.vertices;
        (a + b + c + d) * 0.25
    }

    /// True when the volume is negligible against the cube of the longest edge.
    pub fn is_degenerate(&self) -> bool {
        let v = &self.vertices;
        let mut longest: f64 = 0.0;
        for i in 0..4 {
            for j in i + 1..4 {
                longest = longest.max(v[i].distance(v[j]));
            }
        }
        !(longest > 0.0) || self.volume() <= 1e-12 * longest.powi(3)
    }

    /// The four face planes with normals pointing into the solid.
    ///
    /// Plane `i` is the face opposite vertex `i`.
    pub fn inward_planes(&self) -> Result<[Plane3; 4]> {
        if self.is_degenerate() {
            return Err(Error::DegenerateSimplex);
        }
        let v = &self.vertices;
        let face = |i: usize| {
            let others: Vec<Point3> = (0..4).filter(|&j| j != i).map(|j| v[j]).collect();
            Plane3::through_facing(others[0], others[1], others[2], v[i])
        };
        Ok([face(0)?, face(1)?, face(2)?, face(3)?])
    }

    /// Closed containment with absolute tolerance [`CONTAINMENT_EPS`].
    pub fn contains(&self, q: Point3) -> bool {
        match self.inward_planes() {
            Ok(planes) => planes
                .iter()
                .all(|p| p.signed_distance(q) >= -CONTAINMENT_EPS),
            Err(_) => false,
        }
    }

    pub fn scaled_about(&self, center: Point3, factor: f64) -> Tetrahedron {
        let mut out = *self;
        for v in &mut out.vertices {
            *v = center + (*v - center) * factor;
        }
        out
    }
}

/// Unsigned tetrahedron volume; zero for coplanar input.
pub fn tetra_volume(t: &Tetrahedron) -> f64 {
    t.signed_volume().abs()
}

/// Counterclockwise convex polygon; may be empty.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvexPolygon2 {
    vertices: Vec<Point2>,
}

impl ConvexPolygon2 {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Accepts vertices in either orientation; stores them counterclockwise.
    pub fn new(mut vertices: Vec<Point2>) -> Result<Self> {
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::domain("polygon vertices must be finite"));
        }
        if vertices.len() < 3 {
            return Ok(Self::empty());
        }
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        let poly = Self { vertices };
        if !poly.is_convex() {
            return Err(Error::domain("polygon is not convex"));
        }
        Ok(poly)
    }

    pub fn rectangle(min: Point2, max: Point2) -> Self {
        Self {
            vertices: vec![
                min,
                Point2::new(max.x, min.y),
                max,
                Point2::new(min.x, max.y),
            ],
        }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 3
    }

    pub fn area(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            signed_area(&self.vertices)
        }
    }

    fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let c = self.vertices[(i + 2) % n];
            (b - a).cross(c - b) >= -1e-12
        })
    }
}

fn signed_area(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| vertices[i].cross(vertices[(i + 1) % n]))
        .sum::<f64>()
        * 0.5
}

/// Intersection of a convex polygon with a closed half-plane.
pub fn clip_convex_polygon(p: &ConvexPolygon2, h: &HalfPlane) -> ConvexPolygon2 {
    if p.is_empty() {
        return ConvexPolygon2::empty();
    }
    let verts = &p.vertices;
    let dist: Vec<f64> = verts.iter().map(|&v| h.signed_distance(v)).collect();
    if dist.iter().all(|&d| d <= 0.0) {
        return p.clone();
    }
    let n = verts.len();
    let mut out: Vec<Point2> = Vec::with_capacity(n + 1);
    for i in 0..n {
        let j = (i + 1) % n;
        let (a, b) = (verts[i], verts[j]);
        let (da, db) = (dist[i], dist[j]);
        if da <= 0.0 {
            out.push(a);
        }
        if (da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0) {
            let t = da / (da - db);
            out.push(a + (b - a) * t);
        }
    }
    out.dedup_by(|a, b| a.distance(*b) <= 1e-14);
    if out.len() > 1 && out[0].distance(out[out.len() - 1]) <= 1e-14 {
        out.pop();
    }
    if out.len() < 3 || signed_area(&out) <= 0.0 {
        return ConvexPolygon2::empty();
    }
    ConvexPolygon2 { vertices: out }
}

/// Overlap area of two unit disks whose centers are `d` apart.
pub fn lens_area_unit_circles(d: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&d) {
        return Err(Error::domain(format!("center distance {d} outside [0, 2]")));
    }
    let h = 0.5 * d;
    Ok(2.0 * h.acos() - h * (4.0 - d * d).max(0.0).sqrt())
}
