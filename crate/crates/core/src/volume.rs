//! Volume estimators for the once-covered region `S` and the trial runner.
//!
//! Three independent routes are provided:
//!
//! * generate-and-probe: scatter `n` points in the body, measure their
//!   density inside small probing balls that fit in the body, and report
//!   `n / density`;
//! * hull patch: approximate the spherical patch bounding `S` by the convex
//!   hull of random patch points plus the three patch corners, and sum the
//!   tetrahedra from `p0` over the non-base hull faces;
//! * rejection: the fraction of uniform points of `T` outside the unit ball.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dodeca::{CellFrame, DodecaParams, Region, RegionS};
use crate::error::{Error, Result};
use crate::geom::{Plane3, Point3, Tetrahedron, CONTAINMENT_EPS};
use crate::hull::convex_hull;
use crate::sampling::{sample_uniform_sphere_direction, RandomStream, TetraSampler};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GnPConfig {
    /// Number of points generated in the body.
    pub n: usize,
    pub probes: usize,
    /// Placement attempts per probe before giving up.
    pub max_retries: usize,
}

impl GnPConfig {
    pub const DEFAULT_PROBES: usize = 1024;
    pub const DEFAULT_RETRIES: usize = 100;

    pub fn new(n: usize) -> Result<Self> {
        Self::with_probes(n, Self::DEFAULT_PROBES)
    }

    pub fn with_probes(n: usize, probes: usize) -> Result<Self> {
        let cfg = Self {
            n,
            probes,
            max_retries: Self::DEFAULT_RETRIES,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1000 {
            return Err(Error::domain(format!("n = {} must be at least 1000", self.n)));
        }
        if self.probes == 0 || self.max_retries == 0 {
            return Err(Error::domain("probes and retries must be positive"));
        }
        Ok(())
    }

    /// `0.25 ((ln n) / n)^(1/3)`: about `log n` expected points per probe.
    pub fn probe_radius(&self) -> f64 {
        let n = self.n as f64;
        0.25 * (n.ln() / n).cbrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HullPatchConfig {
    pub m: usize,
}

impl HullPatchConfig {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("m must be at least 1"));
        }
        Ok(Self { m })
    }
}

/// Points drawn uniformly from a region by rejection from its envelope.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionSample {
    pub points: Vec<Point3>,
    /// Accepted over drawn; `None` when nothing was requested.
    pub acceptance_ratio: Option<f64>,
}

const MIN_ACCEPTANCE: f64 = 0.01;
const ACCEPTANCE_PROBE: u64 = 10_000;

pub fn sample_points_in<R: Region + ?Sized>(
    region: &R,
    n: usize,
    s: &mut RandomStream,
) -> Result<RegionSample> {
    if n == 0 {
        return Ok(RegionSample {
            points: Vec::new(),
            acceptance_ratio: None,
        });
    }
    let sampler = TetraSampler::new(region.envelope())?;
    let mut points = Vec::with_capacity(n);
    let mut drawn: u64 = 0;
    while points.len() < n {
        let q = sampler.sample(s);
        drawn += 1;
        if region.contains(q) {
            points.push(q);
        }
        if drawn == ACCEPTANCE_PROBE && (points.len() as f64) < MIN_ACCEPTANCE * drawn as f64 {
            return Err(Error::DegenerateRegion);
        }
    }
    Ok(RegionSample {
        acceptance_ratio: Some(n as f64 / drawn as f64),
        points,
    })
}

/// Uniform points of `S`; the acceptance ratio estimates `vol(S) / vol(T)`.
pub fn sample_points_in_s(
    frame: &CellFrame,
    n: usize,
    s: &mut RandomStream,
) -> Result<RegionSample> {
    sample_points_in(&RegionS::new(*frame)?, n, s)
}

/// Uniform grid of cubic cells holding point indices in CSR layout.
struct PointGrid {
    origin: Point3,
    cell: f64,
    dims: [usize; 3],
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl PointGrid {
    fn build(points: &[Point3], cell: f64) -> Self {
        let mut lo = points[0];
        let mut hi = points[0];
        for p in points {
            lo = Point3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
            hi = Point3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
        }
        let ext = hi - lo;
        let dims = [ext.x, ext.y, ext.z].map(|e| (e / cell).floor() as usize + 1);
        let mut grid = Self {
            origin: lo,
            cell,
            dims,
            starts: vec![0; dims[0] * dims[1] * dims[2] + 1],
            items: vec![0; points.len()],
        };
        let keys: Vec<usize> = points.iter().map(|&p| grid.key(grid.coords(p))).collect();
        for &k in &keys {
            grid.starts[k + 1] += 1;
        }
        for i in 1..grid.starts.len() {
            grid.starts[i] += grid.starts[i - 1];
        }
        let mut fill = grid.starts.clone();
        for (i, &k) in keys.iter().enumerate() {
            grid.items[fill[k] as usize] = i as u32;
            fill[k] += 1;
        }
        grid
    }

    fn coords(&self, p: Point3) -> [usize; 3] {
        let d = p - self.origin;
        let c = [d.x, d.y, d.z];
        let mut out = [0usize; 3];
        for a in 0..3 {
            out[a] = ((c[a] / self.cell).floor().max(0.0) as usize).min(self.dims[a] - 1);
        }
        out
    }

    fn key(&self, c: [usize; 3]) -> usize {
        (c[2] * self.dims[1] + c[1]) * self.dims[0] + c[0]
    }

    /// Points strictly within `radius <= cell` of `points[seed]`, excluding the seed.
    fn count_near(&self, points: &[Point3], seed: usize, radius: f64) -> u64 {
        let center = points[seed];
        let c = self.coords(center);
        let r2 = radius * radius;
        let mut count = 0;
        let range = |a: usize| c[a].saturating_sub(1)..=(c[a] + 1).min(self.dims[a] - 1);
        for z in range(2) {
            for y in range(1) {
                for x in range(0) {
                    let k = self.key([x, y, z]);
                    for &i in &self.items[self.starts[k] as usize..self.starts[k + 1] as usize] {
                        let i = i as usize;
                        if i != seed && (points[i] - center).norm_squared() < r2 {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }
}

/// Generate-and-probe volume estimate of an arbitrary region.
pub fn generate_and_probe_in<R: Region + ?Sized>(
    region: &R,
    cfg: &GnPConfig,
    s: &mut RandomStream,
) -> Result<f64> {
    cfg.validate()?;
    let radius = cfg.probe_radius();
    let points = sample_points_in(region, cfg.n, s)?.points;
    let grid = PointGrid::build(&points, radius);
    let mut total: u64 = 0;
    for _ in 0..cfg.probes {
        let mut placed = None;
        for _ in 0..cfg.max_retries {
            let j = s.gen_range(0..points.len());
            if region.contains_ball(points[j], radius)? {
                placed = Some(j);
                break;
            }
        }
        let seed = placed.ok_or(Error::ProbeTooLarge)?;
        total += grid.count_near(&points, seed, radius);
    }
    if total == 0 {
        return Err(Error::ProbeTooSmall);
    }
    let probe_volume = 4.0 / 3.0 * std::f64::consts::PI * radius.powi(3);
    let density = total as f64 / (cfg.probes as f64 * probe_volume);
    Ok(cfg.n as f64 / density)
}

pub fn generate_and_probe(frame: &CellFrame, cfg: &GnPConfig, s: &mut RandomStream) -> Result<f64> {
    generate_and_probe_in(&RegionS::new(*frame)?, cfg, s)
}

/// Inward planes of `[p0, p1, p3, p4]` and the base plane through `p1, p3, p4`
/// oriented toward `p0`.
fn patch_planes(frame: &CellFrame) -> Result<([Plane3; 4], Plane3)> {
    let big = frame.big.inward_planes()?;
    // plane i is opposite vertex i, so plane 0 is the base opposite p0
    Ok((big, big[0]))
}

/// Draws `m` unit vectors whose sphere points lie in `[p0, p1, p3, p4]`
/// strictly beyond the anchor plane.
pub fn sample_patch(frame: &CellFrame, m: usize, s: &mut RandomStream) -> Result<Vec<Point3>> {
    let (planes, base) = patch_planes(frame)?;
    let mut out = Vec::with_capacity(m);
    while out.len() < m {
        let u = sample_uniform_sphere_direction(s);
        if base.signed_distance(u) > 0.0
            && planes.iter().all(|p| p.signed_distance(u) >= -CONTAINMENT_EPS)
        {
            out.push(u);
        }
    }
    Ok(out)
}

/// Tetra fan from `p0` over the hull of `samples` plus the patch corners.
pub fn hull_patch_volume_from_samples(frame: &CellFrame, samples: &[Point3]) -> Result<f64> {
    let (_, base) = patch_planes(frame)?;
    if samples.iter().any(|&q| !(base.signed_distance(q) > 0.0)) {
        return Err(Error::PatchOrientation);
    }
    let m = samples.len();
    let mut pts = Vec::with_capacity(m + 3);
    pts.extend_from_slice(samples);
    pts.extend([frame.p1, frame.p3, frame.p4]);
    let mesh = convex_hull(&pts)?;
    let base_face = mesh
        .face_with_sources([m, m + 1, m + 2])
        .ok_or(Error::PatchOrientation)?;
    Ok(mesh
        .faces
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != base_face)
        .map(|(_, f)| {
            let [u, v, w] = f.vertices.map(|k| mesh.vertices[k]);
            Tetrahedron::new(frame.p0, u, v, w).volume()
        })
        .sum())
}

pub fn hull_patch_volume(
    frame: &CellFrame,
    cfg: &HullPatchConfig,
    s: &mut RandomStream,
) -> Result<f64> {
    if cfg.m == 0 {
        return Err(Error::domain("m must be at least 1"));
    }
    let samples = sample_patch(frame, cfg.m, s)?;
    hull_patch_volume_from_samples(frame, &samples)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RejectionEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

fn rejection_count(frame: &CellFrame, n: u64, s: &mut RandomStream, outside: bool) -> Result<u64> {
    let sampler = TetraSampler::new(&frame.t)?;
    let mut hits = 0u64;
    for _ in 0..n {
        let q = sampler.sample(s);
        if (q.norm_squared() >= 1.0) == outside {
            hits += 1;
        }
    }
    Ok(hits)
}

fn rejection_from_hits(vol_t: f64, hits: u64, n: u64) -> RejectionEstimate {
    let p = hits as f64 / n as f64;
    RejectionEstimate {
        estimate: vol_t * p,
        std_error: vol_t * (p * (1.0 - p) / n as f64).sqrt(),
    }
}

/// `vol(T)` times the fraction of uniform points of `T` with norm at least 1.
pub fn rejection_volume(frame: &CellFrame, n: u64, s: &mut RandomStream) -> Result<RejectionEstimate> {
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    let hits = rejection_count(frame, n, s, true)?;
    Ok(rejection_from_hits(frame.vol_t, hits, n))
}

/// Same as [`rejection_volume`] with the sphere test inverted: the part of `T` inside the ball.
pub fn rejection_volume_complement(
    frame: &CellFrame,
    n: u64,
    s: &mut RandomStream,
) -> Result<RejectionEstimate> {
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    let hits = rejection_count(frame, n, s, false)?;
    Ok(rejection_from_hits(frame.vol_t, hits, n))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Gnp(GnPConfig),
    Hull(HullPatchConfig),
    Rejection { n: u64 },
}

impl Estimator {
    pub fn estimate(&self, frame: &CellFrame, s: &mut RandomStream) -> Result<f64> {
        match self {
            Estimator::Gnp(cfg) => generate_and_probe(frame, cfg, s),
            Estimator::Hull(cfg) => hull_patch_volume(frame, cfg, s),
            Estimator::Rejection { n } => Ok(rejection_volume(frame, *n, s)?.estimate),
        }
    }
}

/// Per-try estimates and their summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TryStats {
    pub estimates: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation of the per-try estimates.
    pub sigma: f64,
    pub max: f64,
    pub tries: usize,
}

impl TryStats {
    pub fn from_estimates(estimates: Vec<f64>) -> Self {
        let tries = estimates.len();
        let n = tries as f64;
        let mean = estimates.iter().sum::<f64>() / n;
        let sigma = if tries > 1 {
            (estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let max = estimates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self {
            estimates,
            mean,
            sigma,
            max,
            tries,
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        self.sigma / (self.tries as f64).sqrt()
    }

    pub fn min(&self) -> f64 {
        self.estimates.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Runs `tries` independent tries; try `i` draws from `RandomStream(seed, i)`.
///
/// Tries run on the rayon pool and are collected in index order.
pub fn run_trials_with<F>(tries: usize, seed: u64, f: F) -> Result<TryStats>
where
    F: Fn(&mut RandomStream) -> Result<f64> + Sync,
{
    if tries == 0 {
        return Err(Error::domain("tries must be at least 1"));
    }
    let estimates = (0..tries)
        .into_par_iter()
        .map(|i| f(&mut RandomStream::new(seed, i as u64)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(TryStats::from_estimates(estimates))
}

pub fn run_trials(
    estimator: &Estimator,
    frame: &CellFrame,
    tries: usize,
    seed: u64,
) -> Result<TryStats> {
    run_trials_with(tries, seed, |s| estimator.estimate(frame, s))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaEstimate {
    /// Once-covered share of the cell.
    pub alpha2: f64,
    pub delta: f64,
}

/// `alpha2 = vol_s / vol(T)` and `delta = alpha1 * alpha2`.
pub fn delta3_dc(params: &DodecaParams, vol_s: f64) -> Result<DeltaEstimate> {
    let vol_t = crate::dodeca::cell_frame(params).vol_t;
    if !(0.0..=vol_t).contains(&vol_s) {
        return Err(Error::domain(format!("vol_s = {vol_s} outside [0, {vol_t}]")));
    }
    let alpha2 = vol_s / vol_t;
    Ok(DeltaEstimate {
        alpha2,
        delta: params.alpha1 * alpha2,
    })
}
