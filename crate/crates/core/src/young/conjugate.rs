//! Numerical Legendre transform on a geometric grid.

use super::YoungFunction;
use crate::error::Result;
use crate::grid::GeomGrid;

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const BRACKET_START: f64 = 1.0 / (1u64 << 60) as f64;
const BRACKET_CAP: f64 = 1e150;

/// Tabulated complementary function.
///
/// Values at the nodes come from golden-section maximization of the concave
/// map `s ↦ st − B(s)`. Between positive nodes the table interpolates
/// log-log (piecewise power law); segments touching a zero value are linear.
/// Outside the grid the nearest power-law segment is extended.
#[derive(Debug, Clone)]
pub struct ConjugateTable {
    nodes: Vec<f64>,
    values: Vec<f64>,
    /// `B̃(t) = 0` for `t ≤ zero_until` (the right derivative of `B` at 0).
    zero_until: f64,
}

/// `sup_{s ≥ 0} (st − B(s))`.
pub(crate) fn legendre_at(b: &YoungFunction, t: f64) -> f64 {
    let g = |s: f64| s * t - b.value(s);
    // Bracket the maximizer: double S until the objective starts decreasing.
    let mut s = BRACKET_START;
    let mut g_s = g(s);
    let mut lower = 0.0;
    let upper;
    loop {
        let next = 2.0 * s;
        let g_next = g(next);
        if g_next < g_s {
            upper = next;
            break;
        }
        if next > BRACKET_CAP {
            return f64::INFINITY;
        }
        lower = 0.5 * s;
        s = next;
        g_s = g_next;
    }
    let lower = lower.max(BRACKET_START * 0.5);
    // Golden section in log s; unimodality is preserved by the monotone
    // change of variables.
    let mut a = lower.ln();
    let mut d = upper.ln();
    let mut b_ = d - GOLDEN * (d - a);
    let mut c = a + GOLDEN * (d - a);
    let mut gb = g(b_.exp());
    let mut gc = g(c.exp());
    let mut best = g_s.max(gb).max(gc);
    for _ in 0..120 {
        if gb >= gc {
            d = c;
            c = b_;
            gc = gb;
            b_ = d - GOLDEN * (d - a);
            gb = g(b_.exp());
            best = best.max(gb);
        } else {
            a = b_;
            b_ = c;
            gb = gc;
            c = a + GOLDEN * (d - a);
            gc = g(c.exp());
            best = best.max(gc);
        }
        if (d - a).abs() < 1e-15 {
            break;
        }
    }
    best.max(0.0)
}

impl ConjugateTable {
    pub fn build(b: &YoungFunction, grid: &GeomGrid) -> Result<Self> {
        let eps = 2f64.powi(-60);
        let zero_until = b.value(eps) / eps;
        let mut nodes = Vec::with_capacity(grid.nodes + 1);
        let mut values = Vec::with_capacity(grid.nodes + 1);
        let mut inserted = false;
        for t in grid.iter() {
            if t <= zero_until {
                continue;
            }
            if !inserted && zero_until > 0.0 && zero_until > grid.lo {
                nodes.push(zero_until);
                values.push(0.0);
                inserted = true;
            }
            nodes.push(t);
            values.push(legendre_at(b, t));
        }
        if nodes.len() < 2 {
            return Err(crate::error::Error::Construction(format!(
                "complementary of {b} vanishes on the whole grid"
            )));
        }
        Ok(ConjugateTable {
            nodes,
            values,
            zero_until,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn segment(&self, i: usize, t: f64) -> f64 {
        let (t0, t1) = (self.nodes[i], self.nodes[i + 1]);
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        if v0 > 0.0 && v1 > 0.0 && v1.is_finite() {
            let slope = (v1 / v0).ln() / (t1 / t0).ln();
            v0 * (t / t0).powf(slope)
        } else if v1.is_finite() {
            v0 + (v1 - v0) * (t - t0) / (t1 - t0)
        } else if i > 0 {
            // Overflowed node: continue the previous power law.
            self.segment(i - 1, t)
        } else {
            f64::INFINITY
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= self.zero_until || t <= 0.0 {
            return 0.0;
        }
        let n = self.nodes.len();
        if t <= self.nodes[0] {
            return self.segment(0, t).max(0.0);
        }
        if t >= self.nodes[n - 1] {
            return self.segment(n - 2, t);
        }
        let i = self.nodes.partition_point(|&x| x <= t) - 1;
        self.segment(i.min(n - 2), t)
    }
}
