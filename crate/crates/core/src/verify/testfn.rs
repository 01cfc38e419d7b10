//! Seeded test functions.
//!
//! Every function is defined by its formula on `R^d`, not by atom values,
//! so the same function can be evaluated on a refined measure.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cubes::Cube;
use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure, MuFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    CubeIndicator,
    StepSum,
    ExpProfile,
    Noise,
}

impl Kind {
    pub fn tag(&self) -> &'static str {
        match self {
            Kind::CubeIndicator => "indicator",
            Kind::StepSum => "steps",
            Kind::ExpProfile => "exp",
            Kind::Noise => "noise",
        }
    }

    const ALL: [Kind; 4] = [Kind::CubeIndicator, Kind::StepSum, Kind::ExpProfile, Kind::Noise];
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Steps(Vec<(f64, Cube)>),
    /// `exp(θ |x - c|^2)`.
    Exp { theta: f64, center: Vec<f64> },
    /// `|Σ a_j cos(2π <ω_j, x> + φ_j)|`.
    Noise(Vec<(f64, Vec<f64>, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub case_id: String,
    pub kind: Kind,
    shape: Shape,
}

impl TestFunction {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Steps(parts) => parts
                .iter()
                .filter(|(_, q)| q.contains_point(x))
                .map(|(c, _)| c)
                .sum(),
            Shape::Exp { theta, center } => {
                let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                (theta * r2).exp()
            }
            Shape::Noise(modes) => modes
                .iter()
                .map(|(a, w, ph)| {
                    let dot: f64 = x.iter().zip(w).map(|(xi, wi)| xi * wi).sum();
                    a * (std::f64::consts::TAU * dot + ph).cos()
                })
                .sum::<f64>()
                .abs(),
        }
    }

    pub fn on(&self, measure: &Arc<AtomicMeasure>) -> MuFunction {
        MuFunction::from_fn(measure, |x| self.eval(x))
    }
}

/// FNV-1a, used to derive per-experiment seeds.
pub fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn rng_for(seed: u64, stream: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a(stream))
}

fn random_subcube(rng: &mut ChaCha8Rng, bbox: &Cube) -> Cube {
    let side = bbox.side() * 2f64.powf(-rng.gen_range(1.0..4.0));
    let corner = bbox
        .corner()
        .iter()
        .map(|&c| c + rng.gen_range(0.0..1.0) * (bbox.side() - side))
        .collect();
    Cube::new(corner, side).expect("positive side")
}

fn draw(rng: &mut ChaCha8Rng, kind: Kind, bbox: &Cube) -> Shape {
    let d = bbox.dim();
    match kind {
        Kind::CubeIndicator => Shape::Steps(vec![(1.0, random_subcube(rng, bbox))]),
        Kind::StepSum => Shape::Steps(
            (0..3)
                .map(|_| (rng.gen_range(0.5..2.0), random_subcube(rng, bbox)))
                .collect(),
        ),
        Kind::ExpProfile => {
            // Keep θ|x - c|^2 of order one over the box.
            let scale = bbox.side() * bbox.side() * d as f64;
            Shape::Exp {
                theta: rng.gen_range(-2.0..2.0) / scale,
                center: bbox.center(),
            }
        }
        Kind::Noise => Shape::Noise(
            (0..4)
                .map(|_| {
                    let a = rng.gen_range(0.2..1.0);
                    let w = (0..d).map(|_| rng.gen_range(-4.0..4.0) / bbox.side()).collect();
                    (a, w, rng.gen_range(0.0..std::f64::consts::TAU))
                })
                .collect(),
        ),
    }
}

/// `count` functions cycling through the kinds, each redrawn until it is
/// nonzero on `measure`.
pub fn generate(
    seed: u64,
    stream: &str,
    measure: &Arc<AtomicMeasure>,
    count: usize,
) -> Result<Vec<TestFunction>> {
    let mut rng = rng_for(seed, stream);
    let bbox = measure.bbox().clone();
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let kind = Kind::ALL[i % Kind::ALL.len()];
        let mut attempt = 0;
        let f = loop {
            let f = TestFunction {
                case_id: format!("f{i:02}_{}", kind.tag()),
                kind,
                shape: draw(&mut rng, kind, &bbox),
            };
            if (0..measure.len()).any(|j| f.eval(measure.point(j)) != 0.0) {
                break f;
            }
            attempt += 1;
            if attempt >= 200 {
                return Err(Error::Degenerate(format!(
                    "could not draw a {} test function that is nonzero on {}",
                    kind.tag(),
                    measure.label()
                )));
            }
        };
        out.push(f);
    }
    Ok(out)
}
