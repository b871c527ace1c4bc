//! Exactly-once coverage in the plane.
//!
//! Covers the sector function of a unit disk against one neighbor, its
//! maximizer, the farthest-Voronoi-vertex cover criterion for periodic
//! unit-disk arrangements, and sampled coverage multiplicities.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{clip_convex_polygon, ConvexPolygon2, HalfPlane, Point2, CONTAINMENT_EPS};
use crate::sampling::RandomStream;

/// Area of the disk sector between the farthest Voronoi vertex and the
/// neighbor direction that no other disk covers, with the neighbor at
/// distance `2x`.
pub fn sector_once_area(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("x = {x} outside [0, 1]")));
    }
    Ok(x * (1.0 - x * x).sqrt() - 0.5 * x.acos())
}

/// d/dx of [`sector_once_area`], `(3/2 - 2x^2) / sqrt(1 - x^2)`.
fn sector_once_slope(x: f64) -> f64 {
    (1.5 - 2.0 * x * x) / (1.0 - x * x).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorOptimum {
    pub x_star: f64,
    pub f_star: f64,
    /// `f_star` over the full sector area `arccos(x_star) / 2`.
    pub ratio_star: f64,
}

pub fn maximize_sector_once_area() -> SectorOptimum {
    maximize_sector_once_area_from(0.5).expect("0.5 is a valid start")
}

/// Safeguarded Newton iteration on the stationarity condition, started at `init`.
///
/// The slope is positive left of the maximizer and negative right of it, so
/// a bracket `[0, 1)` is kept and any Newton step leaving it falls back to
/// bisection.
pub fn maximize_sector_once_area_from(init: f64) -> Result<SectorOptimum> {
    if !(init > 0.0 && init < 1.0) {
        return Err(Error::domain(format!("start {init} outside (0, 1)")));
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut x = init;
    for _ in 0..200 {
        let g = sector_once_slope(x);
        if g > 0.0 {
            lo = x;
        } else if g < 0.0 {
            hi = x;
        } else {
            break;
        }
        // g'(x) = x (2x^2 - 5/2) / (1 - x^2)^{3/2}
        let one_minus = 1.0 - x * x;
        let dg = x * (2.0 * x * x - 2.5) / (one_minus * one_minus.sqrt());
        let newton = x - g / dg;
        let next = if dg < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 1e-16 || hi - lo <= 1e-16 {
            x = next;
            break;
        }
        x = next;
    }
    let f_star = sector_once_area(x)?;
    Ok(SectorOptimum {
        x_star: x,
        f_star,
        ratio_star: f_star / (0.5 * x.acos()),
    })
}

/// Periodic unit-disk arrangement with centers on the lattice spanned by `u`, `w`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeCover {
    u: Point2,
    w: Point2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeFamily {
    Hex,
    Square,
}

impl LatticeCover {
    pub fn new(u: Point2, w: Point2) -> Result<Self> {
        if !(u.is_finite() && w.is_finite()) {
            return Err(Error::domain("lattice basis must be finite"));
        }
        if u.cross(w).abs() <= 1e-12 * u.norm() * w.norm() || u.cross(w) == 0.0 {
            return Err(Error::domain("lattice basis is degenerate"));
        }
        Ok(Self { u, w })
    }

    /// Triangular lattice with nearest-neighbor distance `spacing`.
    pub fn hexagonal(spacing: f64) -> Result<Self> {
        check_spacing(spacing)?;
        Self::new(
            Point2::new(spacing, 0.0),
            Point2::new(0.5 * spacing, 0.5 * 3f64.sqrt() * spacing),
        )
    }

    pub fn square(spacing: f64) -> Result<Self> {
        check_spacing(spacing)?;
        Self::new(Point2::new(spacing, 0.0), Point2::new(0.0, spacing))
    }

    pub fn of_family(family: LatticeFamily, spacing: f64) -> Result<Self> {
        match family {
            LatticeFamily::Hex => Self::hexagonal(spacing),
            LatticeFamily::Square => Self::square(spacing),
        }
    }

    pub fn basis(&self) -> (Point2, Point2) {
        (self.u, self.w)
    }

    /// Area of the fundamental domain.
    pub fn cell_area(&self) -> f64 {
        self.u.cross(self.w).abs()
    }

    pub fn center(&self, i: i64, j: i64) -> Point2 {
        self.u * i as f64 + self.w * j as f64
    }

    /// Lagrange-Gauss reduced basis spanning the same lattice.
    pub fn reduced(&self) -> LatticeCover {
        let (mut a, mut b) = (self.u, self.w);
        if a.norm_squared() > b.norm_squared() {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            let mu = (a.dot(b) / a.norm_squared()).round();
            b = b - a * mu;
            if b.norm_squared() >= a.norm_squared() {
                break;
            }
            std::mem::swap(&mut a, &mut b);
        }
        LatticeCover { u: a, w: b }
    }

    /// Number of disk centers within distance 1 (closed) of `p`.
    pub fn multiplicity(&self, p: Point2) -> usize {
        let det = self.u.cross(self.w);
        // lattice coordinates of p
        let a = p.cross(self.w) / det;
        let b = self.u.cross(p) / det;
        // |i - a| <= |w| / |det| and |j - b| <= |u| / |det| for any center within 1
        let bi = self.w.norm() / det.abs();
        let bj = self.u.norm() / det.abs();
        let (i0, i1) = ((a - bi).floor() as i64, (a + bi).ceil() as i64);
        let (j0, j1) = ((b - bj).floor() as i64, (b + bj).ceil() as i64);
        let mut count = 0;
        for i in i0..=i1 {
            for j in j0..=j1 {
                if (self.center(i, j) - p).norm_squared() <= 1.0 {
                    count += 1;
                }
            }
        }
        count
    }
}

fn check_spacing(spacing: f64) -> Result<()> {
    if spacing.is_finite() && spacing > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("spacing {spacing} must be positive and finite")))
    }
}

/// Voronoi cell of `site` against `neighbors`, built by bisector clipping.
pub fn voronoi_cell(site: Point2, neighbors: &[Point2]) -> Result<ConvexPolygon2> {
    if !site.is_finite() || neighbors.iter().any(|p| !p.is_finite()) {
        return Err(Error::domain("points must be finite"));
    }
    if neighbors.contains(&site) {
        return Err(Error::domain("neighbor coincides with site"));
    }
    let reach = neighbors
        .iter()
        .map(|p| p.distance(site))
        .fold(1.0_f64, f64::max);
    let half = 1e4 * reach;
    let mut cell = ConvexPolygon2::rectangle(
        site + Point2::new(-half, -half),
        site + Point2::new(half, half),
    );
    for &n in neighbors {
        cell = clip_convex_polygon(&cell, &HalfPlane::bisector(site, n)?);
    }
    let on_box = |v: &Point2| {
        let d = *v - site;
        d.x.abs().max(d.y.abs()) >= half * (1.0 - 1e-9)
    };
    if cell.is_empty() || cell.vertices().iter().any(on_box) {
        return Err(Error::UnboundedCell);
    }
    Ok(cell)
}

/// Result of the farthest-Voronoi-vertex cover test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverVerdict {
    pub is_cover: bool,
    /// Distance from the site to its farthest Voronoi vertex.
    pub r_max: f64,
    /// Lattice index of the cell attaining `r_max`.
    pub witness_cell: (i64, i64),
    pub witness_vertex: Point2,
}

/// Decides whether the lattice of unit disks covers the plane.
///
/// A unit-disk arrangement covers the plane exactly when every cell's
/// farthest Voronoi vertex lies in that cell's disk. All lattice cells are
/// translates, so the cell at the origin is checked against `window` shells
/// of neighbors in a reduced basis.
pub fn check_cover_lemma2(cover: &LatticeCover, window: u32) -> Result<CoverVerdict> {
    if window < 2 {
        return Err(Error::domain(format!("window {window} must be at least 2")));
    }
    let lat = cover.reduced();
    let k = window as i64;
    let neighbors: Vec<Point2> = (-k..=k)
        .flat_map(|i| (-k..=k).map(move |j| (i, j)))
        .filter(|&(i, j)| (i, j) != (0, 0))
        .map(|(i, j)| lat.center(i, j))
        .collect();
    let cell = voronoi_cell(Point2::ORIGIN, &neighbors)?;
    let (r_max, witness_vertex) = cell
        .vertices()
        .iter()
        .map(|v| (v.norm(), *v))
        .fold((0.0, Point2::ORIGIN), |acc, c| if c.0 > acc.0 { c } else { acc });
    Ok(CoverVerdict {
        is_cover: r_max <= 1.0 + CONTAINMENT_EPS,
        r_max,
        witness_cell: (0, 0),
        witness_vertex,
    })
}

/// Sampled distribution of how many disks cover a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityHistogram {
    /// `fractions[k]` is the share of samples covered by exactly `k` disks.
    pub fractions: Vec<f64>,
    pub samples: u64,
    pub mean_multiplicity: f64,
    /// Standard error of `mean_multiplicity`.
    pub mean_std_error: f64,
}

impl MultiplicityHistogram {
    fn from_counts(counts: &[u64], samples: u64) -> Self {
        let n = samples as f64;
        let fractions: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
        let mean: f64 = fractions.iter().enumerate().map(|(k, f)| k as f64 * f).sum();
        let second: f64 = fractions
            .iter()
            .enumerate()
            .map(|(k, f)| (k * k) as f64 * f)
            .sum();
        let var = (second - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
        Self {
            fractions,
            samples,
            mean_multiplicity: mean,
            mean_std_error: (var / n).sqrt(),
        }
    }

    pub fn fraction(&self, k: usize) -> f64 {
        self.fractions.get(k).copied().unwrap_or(0.0)
    }

    /// Empirical exactly-once density.
    pub fn once_density(&self) -> f64 {
        self.fraction(1)
    }
}

const CHUNK: u64 = 1 << 16;

/// Samples `n` points in the fundamental domain and tallies their multiplicities.
///
/// The sample count is cut into fixed chunks, each drawn from its own
/// substream of `s`, so the histogram does not depend on the thread count.
pub fn coverage_multiplicity_histogram(
    cover: &LatticeCover,
    n: u64,
    s: &RandomStream,
) -> Result<MultiplicityHistogram> {
    if n == 0 {
        return Err(Error::domain("sample count must be at least 1"));
    }
    let lat = cover.reduced();
    let (u, w) = cover.basis();
    let chunks = n.div_ceil(CHUNK);
    let partials: Vec<Vec<u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = s.substream(c);
            let len = CHUNK.min(n - c * CHUNK);
            let mut counts = vec![0u64; 8];
            for _ in 0..len {
                let (a, b): (f64, f64) = (rng.gen(), rng.gen());
                let m = lat.multiplicity(u * a + w * b);
                if m >= counts.len() {
                    counts.resize(m + 1, 0);
                }
                counts[m] += 1;
            }
            counts
        })
        .collect();
    let width = partials.iter().map(Vec::len).max().unwrap_or(0);
    let mut counts = vec![0u64; width];
    for p in &partials {
        for (k, c) in p.iter().enumerate() {
            counts[k] += c;
        }
    }
    while counts.len() > 1 && counts.last() == Some(&0) {
        counts.pop();
    }
    Ok(MultiplicityHistogram::from_counts(&counts, n))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub spacing: f64,
    pub is_cover: bool,
    pub r_max: f64,
    pub once_density: f64,
}

/// Cover verdict and sampled once-density over evenly spaced lattice spacings.
pub fn sweep_lattice(
    family: LatticeFamily,
    spacing_min: f64,
    spacing_max: f64,
    steps: u32,
    n: u64,
    s: &RandomStream,
) -> Result<Vec<SweepRow>> {
    if !(spacing_min > 0.0 && spacing_min < spacing_max && spacing_max.is_finite()) {
        return Err(Error::domain("need 0 < spacing_min < spacing_max"));
    }
    if steps < 2 {
        return Err(Error::domain("steps must be at least 2"));
    }
    (0..steps)
        .map(|i| {
            let t = i as f64 / (steps - 1) as f64;
            let spacing = if i == steps - 1 {
                spacing_max
            } else {
                spacing_min + t * (spacing_max - spacing_min)
            };
            let cover = LatticeCover::of_family(family, spacing)?;
            let verdict = check_cover_lemma2(&cover, 3)?;
            let hist = coverage_multiplicity_histogram(&cover, n, &s.substream(i as u64))?;
            Ok(SweepRow {
                spacing,
                is_cover: verdict.is_cover,
                r_max: verdict.r_max,
                once_density: hist.once_density(),
            })
        })
        .collect()
}

/// Exactly-once plane fraction of the hexagonal cover at spacing `sqrt(3)`.
pub fn hexagonal_once_fraction() -> f64 {
    2.0 * (3.0 * 3f64.sqrt() - PI) / (3.0 * 3f64.sqrt())
}
