//! Seeded random streams and uniform samplers for tetrahedra and the unit sphere.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geom::{Point3, Tetrahedron};

/// A reproducible random stream keyed by `(seed, index)`.
///
/// Streams with the same key yield identical sequences; different indices
/// select independent ChaCha streams under the same key.
#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    index: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self { seed, index, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Child stream `k`, independent of this stream and of its other children.
    pub fn substream(&self, k: u64) -> RandomStream {
        RandomStream::new(splitmix64(self.seed ^ splitmix64(self.index)), k)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

/// Uniform sampler over a validated, non-degenerate tetrahedron.
///
/// Uses sorted-uniform spacings as barycentric weights, which are exactly
/// Dirichlet(1,1,1,1) and therefore uniform over the solid.
#[derive(Clone, Copy, Debug)]
pub struct TetraSampler {
    origin: Point3,
    edges: [Point3; 3],
}

impl TetraSampler {
    pub fn new(t: &Tetrahedron) -> Result<Self> {
        if t.is_degenerate() {
            return Err(Error::DegenerateSimplex);
        }
        let [a, b, c, d] = t.vertices;
        Ok(Self {
            origin: a,
            edges: [b - a, c - a, d - a],
        })
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point3 {
        let mut u: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
        if u[0] > u[1] {
            u.swap(0, 1);
        }
        if u[1] > u[2] {
            u.swap(1, 2);
        }
        if u[0] > u[1] {
            u.swap(0, 1);
        }
        // weights: u0, u1-u0, u2-u1, 1-u2 for vertices a, b, c, d
        let wb = u[1] - u[0];
        let wc = u[2] - u[1];
        let wd = 1.0 - u[2];
        self.origin + self.edges[0] * wb + self.edges[1] * wc + self.edges[2] * wd
    }
}

pub fn sample_uniform_tetra(t: &Tetrahedron, s: &mut RandomStream) -> Result<Point3> {
    Ok(TetraSampler::new(t)?.sample(s))
}

/// Uniform direction on the unit sphere from a normalized Gaussian triple.
#[inline]
pub fn sample_uniform_sphere_direction<R: Rng + ?Sized>(s: &mut R) -> Point3 {
    loop {
        let g = Point3::new(
            s.sample(StandardNormal),
            s.sample(StandardNormal),
            s.sample(StandardNormal),
        );
        if let Some(u) = g.normalized() {
            return u;
        }
    }
}
