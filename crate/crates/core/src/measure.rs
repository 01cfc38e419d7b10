//! Atomic discretizations of upper Ahlfors measures and functions defined
//! on their atoms.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use crate::cubes::Cube;
use crate::error::{Error, Result};

/// Finest resolution any builder accepts.
pub const MIN_RESOLUTION: f64 = 1.0 / (1u64 << 30) as f64;
/// Upper bound on the number of atoms a builder will create.
pub const MAX_ATOMS: usize = 1 << 22;

/// Finite weighted point set in `ℝ^d`.
///
/// Atoms are stored sorted by their first coordinate so cube queries can
/// binary-search the first axis.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    dim: usize,
    ahlfors_n: f64,
    points: Vec<f64>,
    masses: Vec<f64>,
    bbox: Cube,
    resolution: f64,
    label: String,
}

impl AtomicMeasure {
    /// Build from raw atoms. `points` is flat, `d` coordinates per atom.
    /// Atoms are re-sorted by position.
    pub fn from_atoms(
        dim: usize,
        ahlfors_n: f64,
        points: Vec<f64>,
        masses: Vec<f64>,
        bbox: Cube,
        resolution: f64,
        label: &str,
    ) -> Result<Self> {
        let (m, _) = Self::from_atoms_with_order(dim, ahlfors_n, points, masses, bbox, resolution, label)?;
        Ok(m)
    }

    /// As [`AtomicMeasure::from_atoms`], also returning for each stored atom
    /// its index in the input.
    pub fn from_atoms_with_order(
        dim: usize,
        ahlfors_n: f64,
        points: Vec<f64>,
        masses: Vec<f64>,
        bbox: Cube,
        resolution: f64,
        label: &str,
    ) -> Result<(Self, Vec<usize>)> {
        if dim == 0 {
            return Err(Error::Config("measure dimension must be positive".into()));
        }
        if !(ahlfors_n > 0.0 && ahlfors_n <= dim as f64) {
            return Err(Error::Config(format!(
                "ahlfors_n must lie in (0, {dim}], got {ahlfors_n}"
            )));
        }
        if points.len() != dim * masses.len() {
            return Err(Error::Config(format!(
                "{} coordinates do not match {} atoms in dimension {dim}",
                points.len(),
                masses.len()
            )));
        }
        if bbox.dim() != dim {
            return Err(Error::Config("bounding box dimension mismatch".into()));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::Config(format!("resolution must be positive, got {resolution}")));
        }
        for (i, m) in masses.iter().enumerate() {
            if !(*m > 0.0 && m.is_finite()) {
                return Err(Error::Config(format!("atom {i} has invalid mass {m}")));
            }
            let x = &points[i * dim..(i + 1) * dim];
            if x.iter().any(|c| !c.is_finite()) || !bbox.contains_point(x) {
                return Err(Error::Config(format!(
                    "atom {i} at {x:?} lies outside the bounding box {bbox}"
                )));
            }
        }
        let mut order: Vec<usize> = (0..masses.len()).collect();
        order.sort_by(|&a, &b| {
            let pa = &points[a * dim..(a + 1) * dim];
            let pb = &points[b * dim..(b + 1) * dim];
            pa.partial_cmp(pb).expect("finite coordinates")
        });
        let mut sorted_points = Vec::with_capacity(points.len());
        let mut sorted_masses = Vec::with_capacity(masses.len());
        for &i in &order {
            sorted_points.extend_from_slice(&points[i * dim..(i + 1) * dim]);
            sorted_masses.push(masses[i]);
        }
        Ok((
            AtomicMeasure {
                dim,
                ahlfors_n,
                points: sorted_points,
                masses: sorted_masses,
                bbox,
                resolution,
                label: label.to_string(),
            },
            order,
        ))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ahlfors_n(&self) -> f64 {
        self.ahlfors_n
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn mass(&self, i: usize) -> f64 {
        self.masses[i]
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn bbox(&self) -> &Cube {
        &self.bbox
    }

    /// Atom spacing scale; cubes finer than this hold at most one atom.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Same atoms with a different growth exponent, e.g. to test Cantor
    /// measure against `n = 1`.
    pub fn with_ahlfors_n(&self, n: f64) -> Result<Self> {
        if !(n > 0.0 && n <= self.dim as f64) {
            return Err(Error::Config(format!("ahlfors_n must lie in (0, {}], got {n}", self.dim)));
        }
        let mut m = self.clone();
        m.ahlfors_n = n;
        Ok(m)
    }

    /// Index range of atoms whose first coordinate lies in `[lo, hi)`.
    fn first_axis_range(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let d = self.dim;
        let n = self.len();
        let start = partition(n, |i| self.points[i * d] < lo);
        let end = start + partition(n - start, |i| self.points[(start + i) * d] < hi);
        start..end
    }

    /// Indices of atoms in `q` (half-open), in storage order.
    pub fn atoms_in<'a>(&'a self, q: &'a Cube) -> impl Iterator<Item = usize> + 'a {
        let a = q.corner()[0];
        self.first_axis_range(a, a + q.side())
            .filter(move |&i| q.contains_point(self.point(i)))
    }

    /// `μ(Q)`.
    pub fn mu_of(&self, q: &Cube) -> f64 {
        self.atoms_in(q).map(|i| self.masses[i]).sum()
    }

    /// Worst `μ(Q)/l(Q)^n` over `family`.
    pub fn check_upper_ahlfors(&self, family: &[Cube]) -> Result<AhlforsReport> {
        let mut best: Option<AhlforsReport> = None;
        for q in family {
            let r = self.mu_of(q) / q.side().powf(self.ahlfors_n);
            if best.as_ref().map_or(true, |b| r > b.ratio) {
                best = Some(AhlforsReport { ratio: r, cube: q.clone() });
            }
        }
        best.ok_or_else(|| Error::Config("empty cube family".into()))
    }

    /// `sup l(Q)^n/μ(Q)` over cubes of `family` with `μ(Q) > 0`.
    pub fn ahlfors_gap(&self, family: &[Cube]) -> Result<AhlforsReport> {
        if family.is_empty() {
            return Err(Error::Config("empty cube family".into()));
        }
        let mut best: Option<AhlforsReport> = None;
        for q in family {
            let mu = self.mu_of(q);
            if mu <= 0.0 {
                continue;
            }
            let r = q.side().powf(self.ahlfors_n) / mu;
            if best.as_ref().map_or(true, |b| r > b.ratio) {
                best = Some(AhlforsReport { ratio: r, cube: q.clone() });
            }
        }
        best.ok_or_else(|| Error::Degenerate("every cube of the family has mu(Q) = 0".into()))
    }

    /// Dyadic cubes of generations `k_min..=k_max` that contain at least one
    /// atom, generation by generation in lexicographic order.
    pub fn occupied_dyadic_cubes(&self, k_min: i32, k_max: i32) -> Vec<Cube> {
        let mut out = Vec::new();
        for k in k_min..=k_max {
            let h = crate::cubes::generation_side(k);
            let mut keys: Vec<Vec<i64>> = (0..self.len())
                .map(|i| self.point(i).iter().map(|&x| (x / h).floor() as i64).collect())
                .collect();
            keys.sort();
            keys.dedup();
            out.extend(keys.iter().map(|idx| Cube::dyadic(k, idx)));
        }
        out
    }

    /// Write the atom file: header `d n_atoms ahlfors_n`, then
    /// `x1 ... xd mass [value]` per atom.
    pub fn to_atom_text(&self, values: Option<&[f64]>) -> Result<String> {
        if let Some(v) = values {
            if v.len() != self.len() {
                return Err(Error::Config("value column length mismatch".into()));
            }
        }
        let mut s = String::new();
        writeln!(s, "{} {} {}", self.dim, self.len(), self.ahlfors_n).unwrap();
        for i in 0..self.len() {
            for x in self.point(i) {
                write!(s, "{x:?} ").unwrap();
            }
            write!(s, "{:?}", self.masses[i]).unwrap();
            if let Some(v) = values {
                write!(s, " {:?}", v[i]).unwrap();
            }
            s.push('\n');
        }
        Ok(s)
    }

    pub fn write_atoms(&self, path: &Path, values: Option<&[f64]>) -> Result<()> {
        fs::write(path, self.to_atom_text(values)?)?;
        Ok(())
    }

    /// Parse the atom file format. The bounding box is the smallest cube
    /// holding every atom with half a resolution step of margin, where the
    /// resolution is the smallest positive coordinate gap.
    pub fn from_atom_text(text: &str, label: &str) -> Result<(Self, Option<Vec<f64>>)> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (hl, header) = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, column: 1, message: "empty atom file".into() })?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 {
            return Err(Error::Parse {
                line: hl + 1,
                column: 1,
                message: "header must be `d n_atoms ahlfors_n`".into(),
            });
        }
        let perr = |line: usize, message: String| Error::Parse { line: line + 1, column: 1, message };
        let dim: usize = h[0].parse().map_err(|_| perr(hl, format!("bad dimension `{}`", h[0])))?;
        let count: usize = h[1].parse().map_err(|_| perr(hl, format!("bad atom count `{}`", h[1])))?;
        let n: f64 = h[2].parse().map_err(|_| perr(hl, format!("bad ahlfors_n `{}`", h[2])))?;
        let mut points = Vec::with_capacity(count * dim);
        let mut masses = Vec::with_capacity(count);
        let mut values = Vec::new();
        let mut with_values = None;
        for (ln, line) in lines {
            let fields: Vec<f64> = line
                .split_whitespace()
                .map(|f| f.parse::<f64>().map_err(|_| perr(ln, format!("bad number `{f}`"))))
                .collect::<Result<_>>()?;
            let has_value = match fields.len() {
                l if l == dim + 1 => false,
                l if l == dim + 2 => true,
                l => return Err(perr(ln, format!("expected {} or {} fields, got {l}", dim + 1, dim + 2))),
            };
            if *with_values.get_or_insert(has_value) != has_value {
                return Err(perr(ln, "value column present on some lines only".into()));
            }
            points.extend_from_slice(&fields[..dim]);
            masses.push(fields[dim]);
            if has_value {
                values.push(fields[dim + 1]);
            }
        }
        if masses.len() != count {
            return Err(Error::Parse {
                line: hl + 1,
                column: 1,
                message: format!("header announces {count} atoms, file has {}", masses.len()),
            });
        }
        if count == 0 {
            return Err(Error::Config("atom file has no atoms".into()));
        }
        let mut resolution = f64::INFINITY;
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for axis in 0..dim {
            let mut coords: Vec<f64> = (0..count).map(|i| points[i * dim + axis]).collect();
            coords.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            lo[axis] = coords[0];
            hi[axis] = coords[count - 1];
            for w in coords.windows(2) {
                if w[1] > w[0] {
                    resolution = resolution.min(w[1] - w[0]);
                }
            }
        }
        if !resolution.is_finite() {
            resolution = 1.0;
        }
        let extent = (0..dim).map(|a| hi[a] - lo[a]).fold(0.0, f64::max);
        let corner = lo.iter().map(|x| x - 0.5 * resolution).collect();
        let bbox = Cube::new(corner, extent + resolution)?;
        let (m, order) =
            Self::from_atoms_with_order(dim, n, points, masses, bbox, resolution, label)?;
        let values = with_values
            .filter(|&v| v)
            .map(|_| order.iter().map(|&i| values[i]).collect());
        Ok((m, values))
    }

    pub fn read_atoms(path: &Path) -> Result<(Self, Option<Vec<f64>>)> {
        let text = fs::read_to_string(path)?;
        Self::from_atom_text(&text, &format!("file:{}", path.display()))
    }
}

fn partition(n: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Extremal cube of a growth-condition scan.
#[derive(Debug, Clone, PartialEq)]
pub struct AhlforsReport {
    pub ratio: f64,
    pub cube: Cube,
}

fn cells_per_axis(bbox: &Cube, h: f64) -> Result<usize> {
    if !(h > 0.0) || h < MIN_RESOLUTION {
        return Err(Error::Config(format!(
            "resolution {h} is finer than the limit 2^-30"
        )));
    }
    let cells = (bbox.side() / h).round();
    if cells < 1.0 || ((cells * h) - bbox.side()).abs() > 1e-9 * bbox.side() {
        return Err(Error::Config(format!(
            "box side {} is not a whole number of resolution steps {h}",
            bbox.side()
        )));
    }
    Ok(cells as usize)
}

/// Lebesgue measure on `bbox` discretized by the midpoints of an `h`-grid,
/// each carrying mass `h^d`; `ahlfors_n = d`.
pub fn build_lebesgue(d: usize, bbox: &Cube, h: f64) -> Result<AtomicMeasure> {
    if bbox.dim() != d {
        return Err(Error::Config(format!("box {bbox} is not {d}-dimensional")));
    }
    let cells = cells_per_axis(bbox, h)?;
    let total = cells
        .checked_pow(d as u32)
        .filter(|&t| t <= MAX_ATOMS)
        .ok_or_else(|| Error::Config(format!("{cells}^{d} atoms exceed the limit {MAX_ATOMS}")))?;
    let mass = h.powi(d as i32);
    let mut points = Vec::with_capacity(total * d);
    let mut idx = vec![0usize; d];
    for _ in 0..total {
        for axis in 0..d {
            points.push(bbox.corner()[axis] + (idx[axis] as f64 + 0.5) * h);
        }
        for axis in (0..d).rev() {
            idx[axis] += 1;
            if idx[axis] < cells {
                break;
            }
            idx[axis] = 0;
        }
    }
    AtomicMeasure::from_atoms(d, d as f64, points, vec![mass; total], bbox.clone(), h, "lebesgue")
}

/// `dμ = e^{-t²} dt` on a 1-d box, atoms at cell midpoints with mass
/// `e^{-t²} h`.
pub fn build_gaussian_1d(bbox: &Cube, h: f64) -> Result<AtomicMeasure> {
    if bbox.dim() != 1 {
        return Err(Error::Config("gaussian measure is one-dimensional".into()));
    }
    let cells = cells_per_axis(bbox, h)?;
    if cells > MAX_ATOMS {
        return Err(Error::Config(format!("{cells} atoms exceed the limit {MAX_ATOMS}")));
    }
    let a = bbox.corner()[0];
    let points: Vec<f64> = (0..cells).map(|i| a + (i as f64 + 0.5) * h).collect();
    let masses: Vec<f64> = points.iter().map(|t| (-t * t).exp() * h).collect();
    let keep: Vec<usize> = (0..cells).filter(|&i| masses[i] > 0.0).collect();
    AtomicMeasure::from_atoms(
        1,
        1.0,
        keep.iter().map(|&i| points[i]).collect(),
        keep.iter().map(|&i| masses[i]).collect(),
        bbox.clone(),
        h,
        "gaussian",
    )
}

/// Middle-thirds Cantor measure at level `L`: mass `2^{-L}` at the midpoint
/// of each of the `2^L` surviving intervals; `ahlfors_n = log 2 / log 3`.
pub fn build_cantor(levels: u32) -> Result<AtomicMeasure> {
    if levels == 0 {
        return Err(Error::Config("cantor measure needs levels >= 1".into()));
    }
    let resolution = 3f64.powi(-(levels as i32));
    if resolution < MIN_RESOLUTION {
        return Err(Error::Config(format!(
            "cantor level {levels} has resolution 3^-{levels}, finer than 2^-30"
        )));
    }
    let count = 1usize << levels;
    let denom = 2.0 * 3f64.powi(levels as i32);
    let mut points = Vec::with_capacity(count);
    for word in 0..count {
        // Left endpoint numerator over 3^L from the ternary digits {0, 2}.
        let mut num: u64 = 0;
        for j in 0..levels {
            let bit = (word >> (levels - 1 - j)) & 1;
            num = 3 * num + 2 * bit as u64;
        }
        points.push((2 * num + 1) as f64 / denom);
    }
    let mass = 0.5f64.powi(levels as i32);
    AtomicMeasure::from_atoms(
        1,
        cantor_dimension(),
        points,
        vec![mass; count],
        Cube::new(vec![0.0], 1.0)?,
        resolution,
        "cantor",
    )
}

pub fn cantor_dimension() -> f64 {
    2f64.ln() / 3f64.ln()
}

/// All `3^j` triadic intervals `[i 3^{-j}, (i+1) 3^{-j})` of `[0, 1)`.
pub fn triadic_intervals(j: u32) -> Vec<Cube> {
    let count = 3usize.pow(j);
    let side = 3f64.powi(-(j as i32));
    (0..count)
        .map(|i| Cube::new(vec![i as f64 / count as f64], side).expect("valid"))
        .collect()
}

/// The `2^j` generation-`j` intervals of the Cantor construction.
pub fn cantor_intervals(j: u32) -> Vec<Cube> {
    let count = 1usize << j;
    let side = 3f64.powi(-(j as i32));
    (0..count)
        .map(|word| {
            let mut num: u64 = 0;
            for b in 0..j {
                num = 3 * num + 2 * ((word >> (j - 1 - b)) & 1) as u64;
            }
            Cube::new(vec![num as f64 * side], side).expect("valid")
        })
        .collect()
}

/// Real values attached to the atoms of a measure.
#[derive(Debug, Clone)]
pub struct MuFunction {
    measure: Arc<AtomicMeasure>,
    values: Vec<f64>,
}

impl MuFunction {
    pub fn new(measure: Arc<AtomicMeasure>, values: Vec<f64>) -> Result<Self> {
        if values.len() != measure.len() {
            return Err(Error::Config(format!(
                "{} values for a measure with {} atoms",
                values.len(),
                measure.len()
            )));
        }
        Ok(MuFunction { measure, values })
    }

    pub fn constant(measure: &Arc<AtomicMeasure>, c: f64) -> Self {
        MuFunction {
            values: vec![c; measure.len()],
            measure: Arc::clone(measure),
        }
    }

    pub fn zero(measure: &Arc<AtomicMeasure>) -> Self {
        Self::constant(measure, 0.0)
    }

    /// Values from a function of the atom position.
    pub fn from_fn(measure: &Arc<AtomicMeasure>, f: impl Fn(&[f64]) -> f64) -> Self {
        MuFunction {
            values: (0..measure.len()).map(|i| f(measure.point(i))).collect(),
            measure: Arc::clone(measure),
        }
    }

    pub fn measure(&self) -> &Arc<AtomicMeasure> {
        &self.measure
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        MuFunction {
            measure: Arc::clone(&self.measure),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn powf(&self, p: f64) -> Self {
        self.map(|v| v.powf(p))
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    fn zip(&self, other: &MuFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !Arc::ptr_eq(&self.measure, &other.measure) && self.measure != other.measure {
            return Err(Error::Config("functions live on different measures".into()));
        }
        Ok(MuFunction {
            measure: Arc::clone(&self.measure),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &MuFunction) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn mul(&self, other: &MuFunction) -> Result<Self> {
        self.zip(other, |a, b| a * b)
    }

    /// `χ_J f`.
    pub fn restricted_to(&self, j: &Cube) -> Self {
        let mut values = vec![0.0; self.len()];
        for i in self.measure.atoms_in(j) {
            values[i] = self.values[i];
        }
        MuFunction {
            measure: Arc::clone(&self.measure),
            values,
        }
    }

    /// `∫_Q f dμ`.
    pub fn integrate(&self, q: &Cube) -> f64 {
        self.measure
            .atoms_in(q)
            .map(|i| self.values[i] * self.measure.mass(i))
            .sum()
    }

    /// `∫ f dμ` over the whole support.
    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .zip(self.measure.masses())
            .map(|(v, m)| v * m)
            .sum()
    }

    /// `(Σ |f(x_i)|^p w(x_i) m_i)^{1/p}`, `w ≡ 1` when absent.
    pub fn lp_norm(&self, p: f64, weight: Option<&MuFunction>) -> Result<f64> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Domain(format!("L^p exponent must be positive and finite, got {p}")));
        }
        let masses = self.measure.masses();
        let sum: f64 = match weight {
            Some(w) => {
                if w.len() != self.len() {
                    return Err(Error::Config("weight lives on a different measure".into()));
                }
                (0..self.len())
                    .map(|i| self.values[i].abs().powf(p) * w.values[i] * masses[i])
                    .sum()
            }
            None => (0..self.len()).map(|i| self.values[i].abs().powf(p) * masses[i]).sum(),
        };
        Ok(sum.powf(1.0 / p))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `μ({x : f(x) > t})`.
    pub fn superlevel_mass(&self, t: f64) -> f64 {
        self.values
            .iter()
            .zip(self.measure.masses())
            .filter(|(v, _)| **v > t)
            .map(|(_, m)| m)
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}
