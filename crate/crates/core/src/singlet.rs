//! Singlet correlations from shared random vectors and one PR-box use per
//! shot.
//!
//! Each shot draws a fresh pair of uniformly distributed unit vectors
//! `(λ0, λ1)`. Alice feeds `x = 0` into the box when `|â·λ0| >= |â·λ1|`
//! and `x = 1` otherwise, then answers `sign(â·(-1)^a λx)`. Bob feeds
//! `y = 0` when `b̂·λ0` and `b̂·λ1` have equal signs, and answers
//! `-sign(b̂·(-1)^b λ0)`. Over many shots `<rA> = <rB> = 0` and
//! `<rA rB> = -â·b̂`.
//!
//! Shot `i` of a run with seed `s` draws from ChaCha8 stream `i` of key
//! `s`, so results do not depend on how shots are scheduled across
//! threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitVector3([f64; 3]);

impl UnitVector3 {
    /// Accepts only vectors whose norm is within `1e-12` of one.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::domain(format!(
                "({x}, {y}, {z}) has norm {norm}, not 1"
            )));
        }
        Ok(UnitVector3([x, y, z]))
    }

    /// Scales a nonzero vector to unit length.
    pub fn normalize(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::domain(format!("cannot normalize ({x}, {y}, {z})")));
        }
        Ok(UnitVector3([x / norm, y / norm, z / norm]))
    }

    /// Unit vector at angle `theta` from +z towards +x.
    pub fn in_xz_plane(theta: f64) -> Self {
        UnitVector3([theta.sin(), 0.0, theta.cos()])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, other: &UnitVector3) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    fn flipped(self, bit: u8) -> Self {
        if bit == 0 {
            self
        } else {
            UnitVector3(self.0.map(|c| -c))
        }
    }
}

/// Uniform on the sphere: three independent standard normals, normalized.
/// The Gaussian density is rotation invariant, so the direction is uniform.
pub fn sample_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> UnitVector3 {
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        let z: f64 = rng.sample(StandardNormal);
        if let Ok(v) = UnitVector3::normalize(x, y, z) {
            return v;
        }
    }
}

/// Random stream for shot `index` of a run seeded with `seed`.
pub fn shot_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `sign(0) = +1`.
fn sign(v: f64) -> i8 {
    if v >= 0.0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimShot {
    pub lambda0: UnitVector3,
    pub lambda1: UnitVector3,
    pub x: u8,
    pub y: u8,
    pub a: u8,
    pub b: u8,
    pub r_a: i8,
    pub r_b: i8,
}

/// One shot with the PR-box's internal bit supplied: Alice's box output is
/// `box_bit` and Bob's is `box_bit + xy`.
pub fn simulate_shot_with_box_bit(
    a_dir: &UnitVector3,
    b_dir: &UnitVector3,
    lambdas: (UnitVector3, UnitVector3),
    box_bit: u8,
) -> SimShot {
    let (lambda0, lambda1) = lambdas;

    let x = if a_dir.dot(&lambda0).abs() >= a_dir.dot(&lambda1).abs() {
        0
    } else {
        1
    };
    let y = if sign(b_dir.dot(&lambda0)) == sign(b_dir.dot(&lambda1)) {
        0
    } else {
        1
    };

    let a = box_bit & 1;
    let b = a ^ (x & y);

    let lambda_x = if x == 0 { lambda0 } else { lambda1 };
    let r_a = sign(a_dir.dot(&lambda_x.flipped(a)));
    let r_b = -sign(b_dir.dot(&lambda0.flipped(b)));

    SimShot {
        lambda0,
        lambda1,
        x,
        y,
        a,
        b,
        r_a,
        r_b,
    }
}

/// One shot; the PR-box's internal bit is a fair coin from `rng`.
pub fn simulate_shot<R: Rng + ?Sized>(
    a_dir: &UnitVector3,
    b_dir: &UnitVector3,
    lambdas: (UnitVector3, UnitVector3),
    rng: &mut R,
) -> SimShot {
    let bit = rng.random::<bool>() as u8;
    simulate_shot_with_box_bit(a_dir, b_dir, lambdas, bit)
}

/// Shot `index` of the run seeded with `seed`.
pub fn run_shot(a_dir: &UnitVector3, b_dir: &UnitVector3, seed: u64, index: u64) -> SimShot {
    let mut rng = shot_rng(seed, index);
    let lambda0 = sample_unit_vector(&mut rng);
    let lambda1 = sample_unit_vector(&mut rng);
    simulate_shot(a_dir, b_dir, (lambda0, lambda1), &mut rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    pub mean_ra: f64,
    pub mean_rb: f64,
    pub mean_ra_rb: f64,
    pub shots: u64,
    /// `sqrt((1 - mean_ra_rb²) / shots)`.
    pub standard_error: f64,
}

#[derive(Default, Clone, Copy)]
struct Sums {
    ra: i64,
    rb: i64,
    ra_rb: i64,
}

impl Sums {
    fn add(self, o: Sums) -> Sums {
        Sums {
            ra: self.ra + o.ra,
            rb: self.rb + o.rb,
            ra_rb: self.ra_rb + o.ra_rb,
        }
    }
}

fn estimate_streams(
    a_dir: &UnitVector3,
    b_dir: &UnitVector3,
    shots: u64,
    seed: u64,
    first_stream: u64,
) -> Result<CorrelationEstimate> {
    if shots == 0 {
        return Err(Error::domain("at least one shot is required"));
    }
    // Integer sums are order independent, so the parallel reduction is
    // bit-identical to a serial loop.
    let sums = (0..shots)
        .into_par_iter()
        .map(|i| {
            let shot = run_shot(a_dir, b_dir, seed, first_stream + i);
            Sums {
                ra: shot.r_a as i64,
                rb: shot.r_b as i64,
                ra_rb: (shot.r_a * shot.r_b) as i64,
            }
        })
        .reduce(Sums::default, Sums::add);
    let n = shots as f64;
    let mean_ra_rb = sums.ra_rb as f64 / n;
    Ok(CorrelationEstimate {
        mean_ra: sums.ra as f64 / n,
        mean_rb: sums.rb as f64 / n,
        mean_ra_rb,
        shots,
        standard_error: ((1.0 - mean_ra_rb * mean_ra_rb).max(0.0) / n).sqrt(),
    })
}

pub fn estimate_correlation(
    a_dir: &UnitVector3,
    b_dir: &UnitVector3,
    shots: u64,
    seed: u64,
) -> Result<CorrelationEstimate> {
    estimate_streams(a_dir, b_dir, shots, seed, 0)
}

/// Measurement directions for a CHSH experiment: `alice[x]`, `bob[y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChshSettings {
    pub alice: [UnitVector3; 2],
    pub bob: [UnitVector3; 2],
}

impl ChshSettings {
    /// Coplanar settings maximizing `E00 + E01 + E10 - E11` for
    /// `E = -â·b̂`: Alice at 0° and 90°, Bob at 225° and 135°.
    pub fn optimal() -> Self {
        let deg = |d: f64| UnitVector3::in_xz_plane(d.to_radians());
        ChshSettings {
            alice: [deg(0.0), deg(90.0)],
            bob: [deg(225.0), deg(135.0)],
        }
    }

    pub fn uniform(a: UnitVector3, b: UnitVector3) -> Self {
        ChshSettings {
            alice: [a, a],
            bob: [b, b],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChshEstimate {
    /// Correlators in the order (0,0), (0,1), (1,0), (1,1).
    pub correlators: [CorrelationEstimate; 4],
    pub value: f64,
    /// Combined standard error of the four independent correlators.
    pub standard_error: f64,
}

/// Estimates `E(0,0) + E(0,1) + E(1,0) - E(1,1)` with `shots` shots per
/// setting. Settings use disjoint stream ranges of the same seed.
pub fn chsh_from_simulation(
    settings: &ChshSettings,
    shots: u64,
    seed: u64,
) -> Result<ChshEstimate> {
    let mut correlators = Vec::with_capacity(4);
    for (k, (x, y)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
        correlators.push(estimate_streams(
            &settings.alice[x],
            &settings.bob[y],
            shots,
            seed,
            k as u64 * shots,
        )?);
    }
    let correlators: [CorrelationEstimate; 4] = correlators.try_into().expect("four settings");
    let e: Vec<f64> = correlators.iter().map(|c| c.mean_ra_rb).collect();
    let value = e[0] + e[1] + e[2] - e[3];
    let standard_error = correlators
        .iter()
        .map(|c| c.standard_error * c.standard_error)
        .sum::<f64>()
        .sqrt();
    Ok(ChshEstimate {
        correlators,
        value,
        standard_error,
    })
}
