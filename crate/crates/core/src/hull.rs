//! Incremental 3D convex hull.
//!
//! Points are inserted one at a time, each into the face it sees farthest
//! beyond (quickhull order). Visible faces are found by a flood fill over
//! face adjacency, the horizon is re-triangulated as a fan to the new
//! point, and the outside sets of the removed faces are redistributed to
//! the new faces. A point counts as beyond a face only if its signed
//! distance exceeds the tolerance `tau`, so points on or near the current
//! hull are discarded.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geom::{Plane3, Point3};

const TAU_SCALE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HullFace {
    /// Indices into [`HullMesh::vertices`], counterclockwise seen from outside.
    pub vertices: [usize; 3],
    /// Outward unit normal and offset.
    pub plane: Plane3,
}

/// Triangulated convex polytope.
#[derive(Clone, Debug)]
pub struct HullMesh {
    pub vertices: Vec<Point3>,
    /// Position of each hull vertex in the caller's input slice.
    pub source_indices: Vec<usize>,
    pub faces: Vec<HullFace>,
    /// `neighbors[f][k]` is the face across edge `(v[k], v[k+1])` of face `f`.
    pub neighbors: Vec<[usize; 3]>,
    /// Absolute tolerance used during construction.
    pub tau: f64,
}

impl HullMesh {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edge_count(&self) -> usize {
        let mut edges: Vec<(usize, usize)> = self
            .faces
            .iter()
            .flat_map(|f| {
                let v = f.vertices;
                (0..3).map(move |k| {
                    let (a, b) = (v[k], v[(k + 1) % 3]);
                    (a.min(b), a.max(b))
                })
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges.len()
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    /// Mean of the hull vertices, interior for any non-degenerate hull.
    pub fn interior_point(&self) -> Point3 {
        let mut sum = Point3::ORIGIN;
        for &v in &self.vertices {
            sum += v;
        }
        sum * (1.0 / self.vertices.len() as f64)
    }

    /// Largest signed distance of any point beyond any face plane.
    pub fn max_violation(&self, points: &[Point3]) -> f64 {
        points
            .iter()
            .flat_map(|&p| self.faces.iter().map(move |f| f.plane.signed_distance(p)))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Checks that every directed edge is used once and matched by its twin
    /// through `neighbors`.
    pub fn is_closed_manifold(&self) -> bool {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (fi, f) in self.faces.iter().enumerate() {
            let v = f.vertices;
            for k in 0..3 {
                if directed.insert((v[k], v[(k + 1) % 3]), fi).is_some() {
                    return false;
                }
            }
        }
        self.faces.iter().enumerate().all(|(fi, f)| {
            let v = f.vertices;
            (0..3).all(|k| {
                let twin = directed.get(&(v[(k + 1) % 3], v[k]));
                twin.is_some_and(|&t| t != fi && self.neighbors[fi][k] == t)
            })
        })
    }

    /// Face whose three vertices are exactly the given input indices.
    pub fn face_with_sources(&self, sources: [usize; 3]) -> Option<usize> {
        let mut want = sources;
        want.sort_unstable();
        self.faces.iter().position(|f| {
            let mut got = f.vertices.map(|v| self.source_indices[v]);
            got.sort_unstable();
            got == want
        })
    }
}

/// Volume as a fan of tetrahedra from the interior centroid.
pub fn mesh_volume(mesh: &HullMesh) -> f64 {
    let c = mesh.interior_point();
    mesh.faces
        .iter()
        .map(|f| {
            let [a, b, d] = f.vertices.map(|i| mesh.vertices[i]);
            (a - c).dot((b - c).cross(d - c)) / 6.0
        })
        .sum()
}

/// Volume from the divergence theorem, `sum a . (b x c) / 6` over faces.
pub fn surface_volume(mesh: &HullMesh) -> f64 {
    mesh.faces
        .iter()
        .map(|f| {
            let [a, b, c] = f.vertices.map(|i| mesh.vertices[i]);
            a.dot(b.cross(c)) / 6.0
        })
        .sum()
}

#[derive(Clone, Debug)]
struct Face {
    v: [usize; 3],
    plane: Plane3,
    nb: [usize; 3],
    alive: bool,
    outside: Vec<usize>,
    visited: u32,
}

struct Builder<'a> {
    pts: &'a [Point3],
    tau: f64,
    faces: Vec<Face>,
    stamp: u32,
}

fn face_plane(a: Point3, b: Point3, c: Point3) -> Option<Plane3> {
    let n = (b - a).cross(c - a);
    Plane3::new(n, n.dot(a)).ok()
}

pub fn convex_hull(points: &[Point3]) -> Result<HullMesh> {
    if points.len() < 4 || points.iter().any(|p| !p.is_finite()) {
        return Err(Error::DegenerateHull);
    }
    let (lo, hi) = points.iter().fold(
        (points[0], points[0]),
        |(lo, hi), p| {
            (
                Point3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z)),
                Point3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z)),
            )
        },
    );
    let diag = (hi - lo).norm();
    if !(diag > 0.0) {
        return Err(Error::DegenerateHull);
    }
    let tau = TAU_SCALE * diag;
    let simplex = initial_simplex(points, tau)?;
    let mut b = Builder {
        pts: points,
        tau,
        faces: Vec::new(),
        stamp: 0,
    };
    b.seed(simplex);
    b.run();
    Ok(b.finish())
}

fn initial_simplex(pts: &[Point3], tau: f64) -> Result<[usize; 4]> {
    let mut extremes = [0usize; 6];
    for (i, p) in pts.iter().enumerate() {
        let c = p.to_array();
        for axis in 0..3 {
            if c[axis] < pts[extremes[2 * axis]].to_array()[axis] {
                extremes[2 * axis] = i;
            }
            if c[axis] > pts[extremes[2 * axis + 1]].to_array()[axis] {
                extremes[2 * axis + 1] = i;
            }
        }
    }
    let mut cand: Vec<usize> = extremes.to_vec();
    cand.sort_unstable();
    cand.dedup();
    let vol6 = |q: [usize; 4]| {
        let [a, b, c, d] = q.map(|i| pts[i]);
        (b - a).dot((c - a).cross(d - a)).abs()
    };
    let mut best: Option<([usize; 4], f64)> = None;
    for i in 0..cand.len() {
        for j in i + 1..cand.len() {
            for k in j + 1..cand.len() {
                for l in k + 1..cand.len() {
                    let q = [cand[i], cand[j], cand[k], cand[l]];
                    let v = vol6(q);
                    if best.is_none_or(|(_, bv)| v > bv) {
                        best = Some((q, v));
                    }
                }
            }
        }
    }
    let scale = pts
        .iter()
        .map(|p| (*p - pts[extremes[0]]).norm())
        .fold(0.0, f64::max);
    if let Some((q, v)) = best {
        if v > tau * scale * scale {
            return Ok(q);
        }
    }
    // extremes are coplanar: fall back to a farthest-point search
    let a = extremes[0];
    let b = (0..pts.len())
        .max_by(|&i, &j| pts[i].distance(pts[a]).total_cmp(&pts[j].distance(pts[a])))
        .unwrap();
    let ab = pts[b] - pts[a];
    if ab.norm() <= tau {
        return Err(Error::DegenerateHull);
    }
    let line_dist = |i: usize| ab.cross(pts[i] - pts[a]).norm() / ab.norm();
    let c = (0..pts.len())
        .max_by(|&i, &j| line_dist(i).total_cmp(&line_dist(j)))
        .unwrap();
    if line_dist(c) <= tau {
        return Err(Error::DegenerateHull);
    }
    let plane = face_plane(pts[a], pts[b], pts[c]).ok_or(Error::DegenerateHull)?;
    let d = (0..pts.len())
        .max_by(|&i, &j| {
            plane
                .signed_distance(pts[i])
                .abs()
                .total_cmp(&plane.signed_distance(pts[j]).abs())
        })
        .unwrap();
    if plane.signed_distance(pts[d]).abs() <= tau {
        return Err(Error::DegenerateHull);
    }
    Ok([a, b, c, d])
}

impl Builder<'_> {
    fn seed(&mut self, s: [usize; 4]) {
        let [a, b, c, d] = s;
        let p = |i: usize| self.pts[i];
        // orient so that (a, b, c) faces away from d
        let (b, c) = if (p(b) - p(a)).dot((p(c) - p(a)).cross(p(d) - p(a))) > 0.0 {
            (c, b)
        } else {
            (b, c)
        };
        let tris = [[a, b, c], [a, d, b], [b, d, c], [c, d, a]];
        for v in tris {
            let plane = face_plane(p(v[0]), p(v[1]), p(v[2])).expect("non-degenerate simplex");
            self.faces.push(Face {
                v,
                plane,
                nb: [usize::MAX; 3],
                alive: true,
                outside: Vec::new(),
                visited: 0,
            });
        }
        self.link_all();
        let outside: Vec<usize> = (0..self.pts.len()).filter(|i| !s.contains(i)).collect();
        self.distribute(&outside, &[0, 1, 2, 3]);
    }

    fn link_all(&mut self) {
        let mut by_edge: HashMap<(usize, usize), usize> = HashMap::new();
        for (fi, f) in self.faces.iter().enumerate() {
            for k in 0..3 {
                by_edge.insert((f.v[k], f.v[(k + 1) % 3]), fi);
            }
        }
        for fi in 0..self.faces.len() {
            for k in 0..3 {
                let v = self.faces[fi].v;
                self.faces[fi].nb[k] = by_edge[&(v[(k + 1) % 3], v[k])];
            }
        }
    }

    /// Moves each point to the first candidate face it lies beyond.
    fn distribute(&mut self, points: &[usize], candidates: &[usize]) {
        for &i in points {
            let q = self.pts[i];
            if let Some(&f) = candidates
                .iter()
                .find(|&&f| self.faces[f].plane.signed_distance(q) > self.tau)
            {
                self.faces[f].outside.push(i);
            }
        }
    }

    fn run(&mut self) {
        let mut stack: Vec<usize> = (0..self.faces.len()).rev().collect();
        while let Some(fi) = stack.pop() {
            if !self.faces[fi].alive || self.faces[fi].outside.is_empty() {
                continue;
            }
            let plane = self.faces[fi].plane;
            let eye = *self.faces[fi]
                .outside
                .iter()
                .max_by(|&&i, &&j| {
                    plane
                        .signed_distance(self.pts[i])
                        .total_cmp(&plane.signed_distance(self.pts[j]))
                })
                .unwrap();
            let new_faces = self.insert(fi, eye);
            stack.extend(new_faces.into_iter().rev());
        }
    }

    fn insert(&mut self, start: usize, eye: usize) -> Vec<usize> {
        let q = self.pts[eye];
        self.stamp += 1;
        let stamp = self.stamp;

        // flood fill the visible region
        let mut visible = vec![start];
        self.faces[start].visited = stamp;
        let mut head = 0;
        while head < visible.len() {
            let f = visible[head];
            head += 1;
            for k in 0..3 {
                let n = self.faces[f].nb[k];
                if self.faces[n].visited != stamp
                    && self.faces[n].plane.signed_distance(q) > self.tau
                {
                    self.faces[n].visited = stamp;
                    visible.push(n);
                }
            }
        }

        // horizon edges keep the orientation of the visible face they came from
        let mut horizon: Vec<(usize, usize, usize)> = Vec::new();
        for &f in &visible {
            for k in 0..3 {
                let n = self.faces[f].nb[k];
                if self.faces[n].visited != stamp {
                    let v = self.faces[f].v;
                    horizon.push((v[k], v[(k + 1) % 3], n));
                }
            }
        }

        let mut orphans: Vec<usize> = Vec::new();
        for &f in &visible {
            self.faces[f].alive = false;
            orphans.append(&mut self.faces[f].outside);
        }

        let mut created = Vec::with_capacity(horizon.len());
        let mut by_start: HashMap<usize, usize> = HashMap::with_capacity(horizon.len());
        for &(a, b, outer) in &horizon {
            let plane = face_plane(self.pts[a], self.pts[b], q)
                .unwrap_or_else(|| self.faces[outer].plane);
            let id = self.faces.len();
            self.faces.push(Face {
                v: [a, b, eye],
                plane,
                nb: [outer, usize::MAX, usize::MAX],
                alive: true,
                outside: Vec::new(),
                visited: 0,
            });
            let of = &mut self.faces[outer];
            let k = (0..3)
                .find(|&k| of.v[k] == b && of.v[(k + 1) % 3] == a)
                .expect("horizon edge has a twin");
            of.nb[k] = id;
            by_start.insert(a, id);
            created.push(id);
        }
        for &id in &created {
            let b = self.faces[id].v[1];
            // edge (b, eye) borders the new face starting at b
            let next = by_start[&b];
            self.faces[id].nb[1] = next;
            self.faces[next].nb[2] = id;
        }

        orphans.retain(|&i| i != eye);
        self.distribute(&orphans, &created);
        created
    }

    fn finish(self) -> HullMesh {
        let mut remap = vec![usize::MAX; self.pts.len()];
        let mut face_remap = vec![usize::MAX; self.faces.len()];
        let mut vertices = Vec::new();
        let mut source_indices = Vec::new();
        let mut faces = Vec::new();
        for (fi, f) in self.faces.iter().enumerate() {
            if !f.alive {
                continue;
            }
            face_remap[fi] = faces.len();
            let v = f.v.map(|i| {
                if remap[i] == usize::MAX {
                    remap[i] = vertices.len();
                    vertices.push(self.pts[i]);
                    source_indices.push(i);
                }
                remap[i]
            });
            faces.push(HullFace {
                vertices: v,
                plane: f.plane,
            });
        }
        let neighbors = self
            .faces
            .iter()
            .filter(|f| f.alive)
            .map(|f| f.nb.map(|n| face_remap[n]))
            .collect();
        HullMesh {
            vertices,
            source_indices,
            faces,
            neighbors,
            tau: self.tau,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{tetra_volume, Tetrahedron};
    use crate::sampling::{sample_uniform_sphere_direction, RandomStream};
    use rand::Rng;

    fn cube() -> Vec<Point3> {
        let mut v = Vec::new();
        for i in 0..8 {
            v.push(Point3::new(
                (i & 1) as f64,
                ((i >> 1) & 1) as f64,
                ((i >> 2) & 1) as f64,
            ));
        }
        v
    }

    fn check_mesh(mesh: &HullMesh, input: &[Point3]) {
        assert_eq!(mesh.euler_characteristic(), 2);
        assert!(mesh.is_closed_manifold());
        assert!(mesh.max_violation(input) <= mesh.tau);
        let c = mesh.interior_point();
        for f in &mesh.faces {
            assert!(f.plane.signed_distance(c) < 0.0);
            assert!((f.plane.normal().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn simplex_hull() {
        let pts = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ];
        let h = convex_hull(&pts).unwrap();
        assert_eq!((h.vertex_count(), h.face_count(), h.edge_count()), (4, 4, 6));
        check_mesh(&h, &pts);
        let t = Tetrahedron::new(pts[0], pts[1], pts[2], pts[3]);
        assert!((mesh_volume(&h) - tetra_volume(&t)).abs() < 1e-12);
    }

    #[test]
    fn cube_hull() {
        let pts = cube();
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.face_count(), 12);
        assert_eq!(h.vertex_count(), 8);
        check_mesh(&h, &pts);
        assert!((mesh_volume(&h) - 1.0).abs() < 1e-12);
        assert!((surface_volume(&h) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cube_with_interior_and_face_points() {
        let mut pts = cube();
        pts.push(Point3::new(0.5, 0.5, 0.5));
        pts.push(Point3::new(0.5, 0.5, 1.0));
        pts.push(Point3::new(0.25, 0.0, 0.75));
        let h = convex_hull(&pts).unwrap();
        check_mesh(&h, &pts);
        assert!((mesh_volume(&h) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        let three = vec![Point3::ORIGIN, Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0)];
        assert_eq!(convex_hull(&three).unwrap_err(), Error::DegenerateHull);
        let flat: Vec<Point3> = (0..20)
            .map(|i| Point3::new((i % 5) as f64, (i / 5) as f64, 2.0))
            .collect();
        assert_eq!(convex_hull(&flat).unwrap_err(), Error::DegenerateHull);
        let line: Vec<Point3> = (0..6).map(|i| Point3::new(i as f64, 0.0, 0.0)).collect();
        assert_eq!(convex_hull(&line).unwrap_err(), Error::DegenerateHull);
        let same = vec![Point3::new(1.0, 1.0, 1.0); 5];
        assert_eq!(convex_hull(&same).unwrap_err(), Error::DegenerateHull);
    }

    #[test]
    fn coplanar_extremes_fall_back() {
        // all six axis extremes lie on the plane z = x; the apex is not extreme
        let mut pts = vec![
            Point3::new(-1.0, 0.0, -1.0),
            Point3::new(1.0, 0.0, 1.0),
            Point3::new(0.0, -1.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.2, 0.1, 0.2),
        ];
        assert_eq!(convex_hull(&pts).unwrap_err(), Error::DegenerateHull);
        pts.push(Point3::new(0.5, 0.0, 0.0));
        let h = convex_hull(&pts).unwrap();
        check_mesh(&h, &pts);
        assert_eq!(h.vertex_count(), 5);
        // diamond of area 2 sqrt 2, apex at distance 0.5 / sqrt 2
        assert!((mesh_volume(&h) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_points_all_extreme() {
        let mut s = RandomStream::new(17, 0);
        let pts: Vec<Point3> = (0..1000).map(|_| sample_uniform_sphere_direction(&mut s)).collect();
        // oracle: the tangent plane at p separates it from every other point
        let extreme = pts
            .iter()
            .enumerate()
            .filter(|&(i, p)| pts.iter().enumerate().all(|(j, q)| i == j || p.dot(*q) < 1.0))
            .count();
        assert_eq!(extreme, 1000);
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.vertex_count(), extreme);
        assert_eq!(h.face_count(), 2 * 1000 - 4);
        check_mesh(&h, &pts);
    }

    #[test]
    fn sphere_hull_volume_converges_from_below() {
        let ball = 4.0 * std::f64::consts::PI / 3.0;
        let mut prev = 0.0;
        for (k, seed) in [(100usize, 1u64), (1000, 2), (10_000, 3)] {
            let mut s = RandomStream::new(seed, 0);
            let pts: Vec<Point3> =
                (0..k).map(|_| sample_uniform_sphere_direction(&mut s)).collect();
            let h = convex_hull(&pts).unwrap();
            let v = mesh_volume(&h);
            assert!(v > prev && v < ball, "k = {k}: {v}");
            prev = v;
            // rejection-sampling oracle over the bounding cube
            let n = 400_000;
            let hits = (0..n)
                .filter(|_| {
                    let q = Point3::new(
                        s.gen::<f64>() * 2.0 - 1.0,
                        s.gen::<f64>() * 2.0 - 1.0,
                        s.gen::<f64>() * 2.0 - 1.0,
                    );
                    h.faces.iter().all(|f| f.plane.signed_distance(q) <= 0.0)
                })
                .count();
            let p = hits as f64 / n as f64;
            let se = 8.0 * (p * (1.0 - p) / n as f64).sqrt();
            assert!((8.0 * p - v).abs() < 3.0 * se, "k = {k}: {v} vs {}", 8.0 * p);
        }
    }

    #[test]
    fn source_index_lookup() {
        let pts = cube();
        let h = convex_hull(&pts).unwrap();
        let f = h.faces[0].vertices.map(|v| h.source_indices[v]);
        assert_eq!(h.face_with_sources([f[2], f[0], f[1]]), Some(0));
        assert_eq!(h.face_with_sources([0, 7, 3]), None);
    }
}
