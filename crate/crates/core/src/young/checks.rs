//! Numerical checks on Young functions: `h_B`, `φ₁`, the `B_p` tail
//! condition, submultiplicativity and inverse comparisons.

use super::YoungFunction;
use crate::error::{Error, Result};
use crate::grid::GeomGrid;
use crate::quadrature;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Supremum estimate for `h_B(s) = sup_{t>0} B(st)/B(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HbEstimate {
    pub value: f64,
    /// Maximizing `t` (NaN for closed forms).
    pub argmax_t: f64,
    /// The sup was taken over a truncated `t`-range.
    pub truncated: bool,
}

fn hb_grid() -> GeomGrid {
    GeomGrid::pow2(-40, 40, 641).expect("static grid")
}

/// `h_B(s)`; see [`h_b_detail`].
pub fn h_b(b: &YoungFunction, s: f64) -> f64 {
    h_b_detail(b, s).value
}

/// `h_B(s)`: closed form `s^p` for monomials, otherwise a lower bound from a
/// geometric scan of `t ∈ [2^-40, 2^40]` polished by a local golden-section
/// search around the best node.
pub fn h_b_detail(b: &YoungFunction, s: f64) -> HbEstimate {
    if s <= 0.0 {
        return HbEstimate {
            value: 0.0,
            argmax_t: f64::NAN,
            truncated: false,
        };
    }
    if let Some((_, p)) = b.monomial() {
        return HbEstimate {
            value: s.powf(p),
            argmax_t: f64::NAN,
            truncated: false,
        };
    }
    let ratio = |t: f64| {
        let den = b.value(t);
        if den > 0.0 && den.is_finite() {
            Some(b.value(s * t) / den)
        } else {
            None
        }
    };
    let grid = hb_grid();
    let pts = grid.points();
    let mut best = f64::NEG_INFINITY;
    let mut best_i = 0usize;
    for (i, &t) in pts.iter().enumerate() {
        if let Some(r) = ratio(t) {
            if r > best {
                best = r;
                best_i = i;
            }
        }
    }
    if best == f64::NEG_INFINITY {
        return HbEstimate {
            value: f64::NAN,
            argmax_t: f64::NAN,
            truncated: true,
        };
    }
    let mut argmax = pts[best_i];
    let lo = pts[best_i.saturating_sub(1)].ln();
    let hi = pts[(best_i + 1).min(pts.len() - 1)].ln();
    let (mut a, mut d) = (lo, hi);
    for _ in 0..60 {
        let x1 = d - GOLDEN * (d - a);
        let x2 = a + GOLDEN * (d - a);
        let r1 = ratio(x1.exp()).unwrap_or(f64::NEG_INFINITY);
        let r2 = ratio(x2.exp()).unwrap_or(f64::NEG_INFINITY);
        if r1 > best {
            best = r1;
            argmax = x1.exp();
        }
        if r2 > best {
            best = r2;
            argmax = x2.exp();
        }
        if r1 >= r2 {
            d = x2;
        } else {
            a = x1;
        }
    }
    HbEstimate {
        value: best,
        argmax_t: argmax,
        truncated: true,
    }
}

/// `φ₁(s) = s / h_B(s^{α/n})`, with `φ₁(0) = 0`.
pub fn phi1(b: &YoungFunction, alpha: f64, n: f64, s: f64) -> Result<f64> {
    if !(0.0 <= alpha && alpha < n) {
        return Err(Error::Domain(format!("phi1 needs 0 <= alpha < n, got alpha={alpha}, n={n}")));
    }
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("phi1 evaluated at s = {s}")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    if alpha == 0.0 {
        return Ok(s);
    }
    Ok(s / h_b(b, s.powf(alpha / n)))
}

/// Outcome of the numerical `B_p` classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BpStatus {
    Converges,
    Diverges,
    Inconclusive,
}

impl BpStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            BpStatus::Converges => "converges",
            BpStatus::Diverges => "diverges",
            BpStatus::Inconclusive => "inconclusive",
        }
    }
}

/// Verdict on `∫_c^∞ B(t) t^{-p} dt/t < ∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct BpVerdict {
    pub p: f64,
    pub cutoff_c: f64,
    /// Partial sum plus a geometric tail bound when converging; `inf` when
    /// diverging; the partial sum otherwise.
    pub tail_estimate: f64,
    pub status: BpStatus,
    pub diagnostic: String,
    /// Octave contributions `∫_{2^j c}^{2^{j+1} c}`.
    pub octaves: Vec<f64>,
}

impl BpVerdict {
    pub fn converges(&self) -> bool {
        self.status == BpStatus::Converges
    }
}

const BP_WINDOW: usize = 5;
const BP_DECAY: f64 = 0.95;
const BP_MAX_OCTAVES: usize = 160;

/// Integral of `B(t) t^{-p-1}` over one octave, evaluated in log space so
/// large `t` cannot overflow the denominator.
fn octave_integral(b: &YoungFunction, p: f64, a: f64) -> f64 {
    let integrand = |t: f64| {
        let v = b.value(t);
        if v <= 0.0 {
            0.0
        } else if !v.is_finite() {
            f64::INFINITY
        } else {
            (v.ln() - (p + 1.0) * t.ln()).exp()
        }
    };
    quadrature::integrate(integrand, a, 2.0 * a, 0.0, 1e-11).value
}

/// Three-state `B_p` classification from octave contributions: converges
/// when the last five octave ratios are all `≤ 0.95`, diverges when they
/// are all `≥ 1`, inconclusive if neither happens within 160 octaves.
pub fn check_bp(b: &YoungFunction, p: f64, cutoff_c: f64) -> Result<BpVerdict> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("B_p check needs p > 1, got {p}")));
    }
    if !(cutoff_c >= 1.0 && cutoff_c.is_finite()) {
        return Err(Error::Domain(format!("B_p check needs cutoff c >= 1, got {cutoff_c}")));
    }
    let mut octaves = Vec::new();
    let mut sum = 0.0;
    let mut a = cutoff_c;
    for _ in 0..BP_MAX_OCTAVES {
        let contribution = octave_integral(b, p, a);
        octaves.push(contribution);
        sum += contribution;
        a *= 2.0;
        if !contribution.is_finite() {
            return Ok(BpVerdict {
                p,
                cutoff_c,
                tail_estimate: f64::INFINITY,
                status: BpStatus::Diverges,
                diagnostic: format!("octave contribution overflowed at t = {}", a / 2.0),
                octaves,
            });
        }
        let m = octaves.len();
        if m <= BP_WINDOW {
            continue;
        }
        let window = &octaves[m - BP_WINDOW - 1..];
        if window.iter().any(|&v| v <= 0.0) {
            continue;
        }
        let ratios: Vec<f64> = window.windows(2).map(|w| w[1] / w[0]).collect();
        let max_ratio = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min_ratio = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        if max_ratio <= BP_DECAY {
            let last = octaves[m - 1];
            let tail = last * max_ratio / (1.0 - max_ratio);
            return Ok(BpVerdict {
                p,
                cutoff_c,
                tail_estimate: sum + tail,
                status: BpStatus::Converges,
                diagnostic: format!(
                    "octave ratios in [{min_ratio:.4}, {max_ratio:.4}] over the last {BP_WINDOW} octaves after {m} octaves"
                ),
                octaves,
            });
        }
        if min_ratio >= 1.0 - 1e-9 {
            return Ok(BpVerdict {
                p,
                cutoff_c,
                tail_estimate: f64::INFINITY,
                status: BpStatus::Diverges,
                diagnostic: format!(
                    "octave contributions non-decreasing (ratios >= {min_ratio:.6}) after {m} octaves"
                ),
                octaves,
            });
        }
    }
    let m = octaves.len();
    let last_ratio = octaves[m - 1] / octaves[m - 2];
    Ok(BpVerdict {
        p,
        cutoff_c,
        tail_estimate: sum,
        status: BpStatus::Inconclusive,
        diagnostic: format!(
            "no decision after {m} octaves; last octave ratio {last_ratio:.6} lies in (0.95, 1)"
        ),
        octaves,
    })
}

/// Worst `B(st)/(B(s)B(t))` over a grid of pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubmultiplicativeReport {
    pub worst_ratio: f64,
    pub s: f64,
    pub t: f64,
}

impl SubmultiplicativeReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.worst_ratio <= 1.0 + tol
    }
}

pub fn check_submultiplicative(b: &YoungFunction, grid: &GeomGrid) -> SubmultiplicativeReport {
    let pts = grid.points();
    let vals: Vec<f64> = pts.iter().map(|&t| b.value(t)).collect();
    let mut worst = SubmultiplicativeReport {
        worst_ratio: f64::NEG_INFINITY,
        s: f64::NAN,
        t: f64::NAN,
    };
    for (i, &s) in pts.iter().enumerate() {
        for (j, &t) in pts.iter().enumerate().skip(i) {
            let den = vals[i] * vals[j];
            if !(den > 0.0) || !den.is_finite() {
                continue;
            }
            let r = b.value(s * t) / den;
            let r = if r.is_nan() { f64::INFINITY } else { r };
            if r > worst.worst_ratio {
                worst = SubmultiplicativeReport { worst_ratio: r, s, t };
            }
        }
    }
    worst
}

/// Range of `num(t)/den(t)` over a grid, with the tail behaviour at both
/// ends. Used for the inverse-comparison hypotheses (`φ^{-1}(t) t^{α/n}`
/// against `B^{-1}(t)`, `A^{-1}C^{-1}` against `B^{-1}`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridComparison {
    pub min_ratio: f64,
    pub argmin_t: f64,
    pub max_ratio: f64,
    pub argmax_t: f64,
    /// `ratio(hi) / ratio(hi / 2^8)`.
    pub upper_tail_trend: f64,
    /// `ratio(lo) / ratio(lo · 2^8)`.
    pub lower_tail_trend: f64,
}

/// Tail trends farther than this from 1 signal a ratio that keeps drifting
/// outside the sampled range.
pub const TAIL_TREND_LIMIT: f64 = 1.25;

impl GridComparison {
    /// `num ≤ c·den` on the grid with a finite constant, and the ratio is not
    /// climbing at either end of the sampled range.
    pub fn bounded_above(&self) -> bool {
        self.max_ratio.is_finite()
            && self.upper_tail_trend <= TAIL_TREND_LIMIT
            && self.lower_tail_trend <= TAIL_TREND_LIMIT
    }

    /// `num ≥ c·den` on the grid with a positive constant, and the ratio is
    /// not collapsing at either end of the sampled range.
    pub fn bounded_below(&self) -> bool {
        self.min_ratio > 0.0
            && self.upper_tail_trend >= 1.0 / TAIL_TREND_LIMIT
            && self.lower_tail_trend >= 1.0 / TAIL_TREND_LIMIT
    }
}

pub fn compare_on_grid<N, D>(num: N, den: D, grid: &GeomGrid) -> GridComparison
where
    N: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let ratio = |t: f64| num(t) / den(t);
    let mut cmp = GridComparison {
        min_ratio: f64::INFINITY,
        argmin_t: f64::NAN,
        max_ratio: f64::NEG_INFINITY,
        argmax_t: f64::NAN,
        upper_tail_trend: f64::NAN,
        lower_tail_trend: f64::NAN,
    };
    for t in grid.iter() {
        let r = ratio(t);
        if r.is_nan() {
            continue;
        }
        if r < cmp.min_ratio {
            cmp.min_ratio = r;
            cmp.argmin_t = t;
        }
        if r > cmp.max_ratio {
            cmp.max_ratio = r;
            cmp.argmax_t = t;
        }
    }
    let span = 256.0;
    cmp.upper_tail_trend = ratio(grid.hi) / ratio(grid.hi / span);
    cmp.lower_tail_trend = ratio(grid.lo) / ratio(grid.lo * span);
    cmp
}
