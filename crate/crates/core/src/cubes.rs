//! Axis-parallel cubes, the dyadic lattice and the dyadic majorant
//! construction used by the covering argument.
//!
//! Cubes are half-open, `[a, a+l)^d`, so dyadic children partition their
//! parent exactly. The dyadic lattice is anchored at the origin and
//! generation `k` has side `2^{-k}`, `k ∈ [-30, 30]`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::luxemburg;
use crate::measure::MuFunction;
use crate::young::YoungFunction;

pub const MIN_GENERATION: i32 = -30;
pub const MAX_GENERATION: i32 = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct Cube {
    corner: Vec<f64>,
    side: f64,
}

impl Cube {
    pub fn new(corner: Vec<f64>, side: f64) -> Result<Self> {
        if corner.is_empty() {
            return Err(Error::Domain("cube needs at least one dimension".into()));
        }
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::Domain(format!("cube side must be positive, got {side}")));
        }
        if corner.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("cube corner must be finite, got {corner:?}")));
        }
        Ok(Cube { corner, side })
    }

    /// Dyadic cube of generation `k` with integer lattice index `idx`.
    pub fn dyadic(k: i32, idx: &[i64]) -> Self {
        let side = generation_side(k);
        Cube {
            corner: idx.iter().map(|&i| i as f64 * side).collect(),
            side,
        }
    }

    pub fn dim(&self) -> usize {
        self.corner.len()
    }

    pub fn corner(&self) -> &[f64] {
        &self.corner
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn center(&self) -> Vec<f64> {
        self.corner.iter().map(|c| c + 0.5 * self.side).collect()
    }

    /// `rQ`: same center, side `r·l(Q)`.
    pub fn dilate(&self, r: f64) -> Result<Cube> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("dilation factor must be positive, got {r}")));
        }
        if r == 1.0 {
            return Ok(self.clone());
        }
        // corner - (r-1)/2·side keeps integer dilations of dyadic cubes exact.
        let shift = 0.5 * (r - 1.0) * self.side;
        Cube::new(
            self.corner.iter().map(|c| c - shift).collect(),
            r * self.side,
        )
    }

    /// Half-open membership.
    #[inline]
    pub fn contains_point(&self, x: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.dim());
        self.corner
            .iter()
            .zip(x)
            .all(|(&a, &xi)| a <= xi && xi < a + self.side)
    }

    /// Set containment `other ⊆ self`.
    pub fn contains_cube(&self, other: &Cube) -> bool {
        self.corner.iter().zip(&other.corner).all(|(&a, &b)| {
            a <= b && b + other.side <= a + self.side
        })
    }

    /// The open interiors intersect.
    pub fn interiors_meet(&self, other: &Cube) -> bool {
        self.corner.iter().zip(&other.corner).all(|(&a, &b)| {
            a < b + other.side && b < a + self.side
        })
    }

    /// The `2^d` dyadic-style children (halving every axis).
    pub fn children(&self) -> Vec<Cube> {
        let d = self.dim();
        let half = 0.5 * self.side;
        (0..(1usize << d))
            .map(|mask| Cube {
                corner: (0..d)
                    .map(|i| self.corner[i] + if mask >> i & 1 == 1 { half } else { 0.0 })
                    .collect(),
                side: half,
            })
            .collect()
    }

    /// Parse `c1 ... cd @ side`.
    pub fn parse(s: &str) -> Result<Cube> {
        let (corner, side) = s
            .split_once('@')
            .ok_or_else(|| Error::Config(format!("cube `{s}` must look like `c1 ... cd @ side`")))?;
        let corner = corner
            .split_whitespace()
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad cube coordinate `{c}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let side = side
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("bad cube side in `{s}`")))?;
        Cube::new(corner, side).map_err(|e| Error::Config(e.to_string()))
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.corner {
            write!(f, "{c} ")?;
        }
        write!(f, "@ {}", self.side)
    }
}

impl FromStr for Cube {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Cube::parse(s)
    }
}

pub fn generation_side(k: i32) -> f64 {
    2f64.powi(-k)
}

/// The unique `k` with `2^{-(k+1)} < side ≤ 2^{-k}`.
pub fn generation_of(side: f64) -> Result<i32> {
    if !(side > 0.0 && side.is_finite()) {
        return Err(Error::Domain(format!("side must be positive, got {side}")));
    }
    let mut k = (-side.log2()).floor() as i32;
    while generation_side(k) < side {
        k -= 1;
    }
    while generation_side(k + 1) >= side {
        k += 1;
    }
    if !(MIN_GENERATION..=MAX_GENERATION).contains(&k) {
        return Err(Error::Domain(format!(
            "side {side} is outside the dyadic generations [{MIN_GENERATION}, {MAX_GENERATION}]"
        )));
    }
    Ok(k)
}

/// Dyadic cubes of generation `k` whose interiors meet the interior of `q`,
/// in lexicographic corner order. Requires `2^{-(k+1)} < l(q) ≤ 2^{-k}`.
pub fn dyadic_cubes_meeting(q: &Cube, k: i32) -> Result<Vec<Cube>> {
    if !(MIN_GENERATION..=MAX_GENERATION).contains(&k) {
        return Err(Error::Precondition(format!("generation {k} out of range")));
    }
    let h = generation_side(k);
    if !(0.5 * h < q.side && q.side <= h) {
        return Err(Error::Precondition(format!(
            "cube side {} is not in (2^-(k+1), 2^-k] for k = {k}",
            q.side
        )));
    }
    let ranges: Vec<(i64, i64)> = q
        .corner
        .iter()
        .map(|&a| {
            let first = (a / h).floor() as i64;
            let last = ((a + q.side) / h).ceil() as i64 - 1;
            (first, last.max(first))
        })
        .collect();
    let mut out = Vec::new();
    let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        let cube = Cube::dyadic(k, &idx);
        if cube.interiors_meet(q) {
            out.push(cube);
        }
        // Odometer, last axis fastest, gives lexicographic corner order.
        let mut axis = idx.len();
        loop {
            if axis == 0 {
                return Ok(out);
            }
            axis -= 1;
            if idx[axis] < ranges[axis].1 {
                idx[axis] += 1;
                for (j, r) in ranges.iter().enumerate().skip(axis + 1) {
                    idx[j] = r.0;
                }
                break;
            }
        }
    }
}

/// Output of [`find_dyadic_majorant`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoverResult {
    /// Dyadic cube with `Q ⊂ 3P`.
    pub p: Cube,
    /// `2^{-(d+n)}`.
    pub beta: f64,
    /// `l(P)^α ‖f‖_{B,P}`.
    pub witness_value: f64,
}

/// Constructive dyadic majorant: given `l(Q)^α‖f‖_{B,Q} > t`, return a
/// dyadic `P` of the generation of `Q` with `Q ⊂ 3P` and
/// `l(P)^α‖f‖_{B,P} > 2^{-(d+n)} t`. Among the (at most `2^d`) dyadic cubes
/// meeting `Q` it picks the first maximizer of `l(Q)^α‖χ_J f‖_{B,Q}`.
pub fn find_dyadic_majorant(
    q: &Cube,
    f: &MuFunction,
    b: &YoungFunction,
    alpha: f64,
    t: f64,
) -> Result<CoverResult> {
    let measure = f.measure();
    let n = measure.ahlfors_n();
    let d = measure.dim() as f64;
    if !(t > 0.0) {
        return Err(Error::Precondition(format!("threshold t must be positive, got {t}")));
    }
    if measure.mu_of(q) == 0.0 {
        return Err(Error::Degenerate(format!("mu(Q) = 0 for Q = {q}")));
    }
    let tol = luxemburg::DEFAULT_TOL;
    let lq_alpha = q.side.powf(alpha);
    let norm_q = luxemburg::luxemburg_norm(f, b, q, tol)?;
    if !(lq_alpha * norm_q > t) {
        return Err(Error::Precondition(format!(
            "l(Q)^alpha ||f||_(B,Q) = {} does not exceed t = {t}",
            lq_alpha * norm_q
        )));
    }
    let k = generation_of(q.side)?;
    let candidates = dyadic_cubes_meeting(q, k)?;
    let mut best: Option<(f64, Cube)> = None;
    for j in candidates {
        let restricted = f.restricted_to(&j);
        let v = lq_alpha * luxemburg::luxemburg_norm(&restricted, b, q, tol)?;
        if best.as_ref().map_or(true, |(bv, _)| v > *bv) {
            best = Some((v, j));
        }
    }
    let (_, p) = best.expect("at least one dyadic cube meets Q");
    let witness_value = p.side.powf(alpha) * luxemburg::luxemburg_norm(f, b, &p, tol)?;
    Ok(CoverResult {
        p,
        beta: 2f64.powf(-(d + n)),
        witness_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(c: &[f64], s: f64) -> Cube {
        Cube::new(c.to_vec(), s).unwrap()
    }

    #[test]
    fn dilation_examples() {
        let q = cube(&[0.0, 0.0], 1.0);
        assert_eq!(q.dilate(1.0).unwrap(), q);
        assert_eq!(q.dilate(3.0).unwrap(), cube(&[-1.0, -1.0], 3.0));
        let back = q.dilate(3.0).unwrap().dilate(1.0 / 3.0).unwrap();
        for (a, b) in back.corner().iter().zip(q.corner()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((back.side() - 1.0).abs() < 1e-15);
        assert!(q.dilate(0.0).is_err());
    }

    #[test]
    fn triple_of_dyadic_is_exact() {
        let p = Cube::dyadic(7, &[13, -4]);
        let t = p.dilate(3.0).unwrap();
        assert_eq!(t.corner(), &[12.0 / 128.0, -5.0 / 128.0]);
        assert_eq!(t.side(), 3.0 / 128.0);
    }

    #[test]
    fn generation_boundaries() {
        assert_eq!(generation_of(1.0).unwrap(), 0);
        assert_eq!(generation_of(0.5).unwrap(), 1);
        assert_eq!(generation_of(0.75).unwrap(), 0);
        assert_eq!(generation_of(0.5000001).unwrap(), 0);
        assert_eq!(generation_of(4.0).unwrap(), -2);
        assert_eq!(generation_of(3.0).unwrap(), -2);
        assert!(generation_of(2f64.powi(40)).is_err());
    }

    #[test]
    fn meeting_dyadic_itself() {
        let q = Cube::dyadic(3, &[5, 2]);
        assert_eq!(dyadic_cubes_meeting(&q, 3).unwrap(), vec![q]);
    }

    #[test]
    fn meeting_unit_interval() {
        let q = cube(&[0.3], 0.6);
        assert_eq!(dyadic_cubes_meeting(&q, 0).unwrap(), vec![cube(&[0.0], 1.0)]);
    }

    #[test]
    fn meeting_dyadic_corner_gives_four() {
        // Centered on the dyadic corner (1/4, 1/4) at generation 2.
        let h = 0.25;
        let q = cube(&[0.25 - 0.5 * h, 0.25 - 0.5 * h], h);
        let got = dyadic_cubes_meeting(&q, 2).unwrap();
        // Brute force: every generation-2 cube in a window whose interior meets q.
        let mut expected = Vec::new();
        for i in -4..8 {
            for j in -4..8 {
                let c = Cube::dyadic(2, &[i, j]);
                if c.interiors_meet(&q) {
                    expected.push(c);
                }
            }
        }
        assert_eq!(got.len(), 4);
        assert_eq!(got, expected);
    }

    #[test]
    fn meeting_rejects_mismatched_generation() {
        let q = cube(&[0.0], 0.3);
        assert!(matches!(dyadic_cubes_meeting(&q, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn children_partition_and_nesting() {
        let q = Cube::dyadic(1, &[1, 0, 1]);
        let kids = q.children();
        assert_eq!(kids.len(), 8);
        for (i, a) in kids.iter().enumerate() {
            assert!(q.contains_cube(a));
            for b in &kids[i + 1..] {
                assert!(!a.interiors_meet(b));
            }
        }
    }

    #[test]
    fn cube_text_round_trip() {
        let q = cube(&[-1.5, 0.25], 3.0);
        let s = q.to_string();
        assert_eq!(s, "-1.5 0.25 @ 3");
        assert_eq!(s.parse::<Cube>().unwrap(), q);
        assert!("1 2 3".parse::<Cube>().is_err());
    }
}
