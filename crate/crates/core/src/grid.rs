//! Geometric sampling grids used by the Young-function checks.

use crate::error::{Error, Result};

/// `nodes` points spaced geometrically over `[lo, hi]`, both ends included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeomGrid {
    pub lo: f64,
    pub hi: f64,
    pub nodes: usize,
}

impl GeomGrid {
    pub fn new(lo: f64, hi: f64, nodes: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::Config(format!(
                "geometric grid needs 0 < lo < hi < inf, got [{lo}, {hi}]"
            )));
        }
        if nodes < 2 {
            return Err(Error::Config(format!(
                "geometric grid needs at least 2 nodes, got {nodes}"
            )));
        }
        Ok(GeomGrid { lo, hi, nodes })
    }

    /// Grid over `[2^lo_exp, 2^hi_exp]`.
    pub fn pow2(lo_exp: i32, hi_exp: i32, nodes: usize) -> Result<Self> {
        Self::new(2f64.powi(lo_exp), 2f64.powi(hi_exp), nodes)
    }

    pub fn point(&self, i: usize) -> f64 {
        if i == 0 {
            return self.lo;
        }
        if i + 1 == self.nodes {
            return self.hi;
        }
        let frac = i as f64 / (self.nodes - 1) as f64;
        (self.lo.ln() + frac * (self.hi.ln() - self.lo.ln())).exp()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.nodes).map(|i| self.point(i)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.nodes).map(move |i| self.point(i))
    }
}
