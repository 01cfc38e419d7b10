//! Maximal operators as suprema over an explicit finite cube family.
//!
//! The family holds, for every generation `k ∈ [k_min, k_max]`, the
//! `shifts_per_axis^d` translates of the dyadic lattice of side `2^{-k}` by
//! offsets `(j_1, ..., j_d)/S · 2^{-k}`. Only cubes that contain atoms
//! matter, so evaluation groups atoms by cell. Every computed value is a
//! lower bound of the true supremum and grows when the family is enlarged.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::cubes::{generation_side, Cube, MAX_GENERATION, MIN_GENERATION};
use crate::error::{Error, Result};
use crate::luxemburg::{norm_from_parts, DEFAULT_TOL};
use crate::measure::{AtomicMeasure, MuFunction};
use crate::young::YoungFunction;

#[derive(Debug, Clone, PartialEq)]
pub struct CubeFamilySpec {
    pub k_min: i32,
    pub k_max: i32,
    pub shifts_per_axis: u32,
    pub clip_box: Cube,
}

impl CubeFamilySpec {
    pub fn new(k_min: i32, k_max: i32, shifts_per_axis: u32, clip_box: Cube) -> Result<Self> {
        if k_min > k_max {
            return Err(Error::Config(format!("k_min = {k_min} exceeds k_max = {k_max}")));
        }
        if k_min < MIN_GENERATION || k_max > MAX_GENERATION {
            return Err(Error::Config(format!(
                "generations must lie in [{MIN_GENERATION}, {MAX_GENERATION}]"
            )));
        }
        if shifts_per_axis == 0 {
            return Err(Error::Config("shifts_per_axis must be at least 1".into()));
        }
        Ok(CubeFamilySpec {
            k_min,
            k_max,
            shifts_per_axis,
            clip_box,
        })
    }

    /// From the bounding-box scale down to the atom-spacing scale, three
    /// shifts per axis.
    pub fn default_for(measure: &AtomicMeasure) -> Self {
        let bbox = measure.bbox().clone();
        let k_min = (-bbox.side().log2().ceil() as i32).clamp(MIN_GENERATION, MAX_GENERATION);
        let k_max = ((1.0 / measure.resolution()).log2().floor() as i32).clamp(k_min, MAX_GENERATION);
        CubeFamilySpec {
            k_min,
            k_max,
            shifts_per_axis: 3,
            clip_box: bbox,
        }
    }

    /// One refinement step: one more generation.
    pub fn refined(&self) -> Self {
        let mut f = self.clone();
        f.k_max = (f.k_max + 1).min(MAX_GENERATION);
        f
    }

    fn offset(&self, k: i32, shift: &[u32]) -> Vec<f64> {
        let h = generation_side(k);
        shift
            .iter()
            .map(|&j| j as f64 / self.shifts_per_axis as f64 * h)
            .collect()
    }

    fn shift_vectors(&self, d: usize) -> Vec<Vec<u32>> {
        let s = self.shifts_per_axis;
        let total = (s as usize).pow(d as u32);
        (0..total)
            .map(|mut code| {
                let mut v = vec![0u32; d];
                for axis in (0..d).rev() {
                    v[axis] = (code % s as usize) as u32;
                    code /= s as usize;
                }
                v
            })
            .collect()
    }

    /// Family cubes containing atoms, with the atoms they contain, in the
    /// deterministic order generation, shift, lattice index.
    pub fn occupied_cells(&self, measure: &AtomicMeasure) -> Result<Vec<Cell>> {
        let d = measure.dim();
        if self.clip_box.dim() != d {
            return Err(Error::Config("clip box dimension does not match the measure".into()));
        }
        for i in 0..measure.len() {
            if !self.clip_box.contains_point(measure.point(i)) {
                return Err(Error::Coverage(format!(
                    "atom {:?} lies outside the clip box {}; no family cube contains it",
                    measure.point(i),
                    self.clip_box
                )));
            }
        }
        let mut cells = Vec::new();
        for k in self.k_min..=self.k_max {
            let h = generation_side(k);
            for shift in self.shift_vectors(d) {
                let off = self.offset(k, &shift);
                let mut groups: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
                for i in 0..measure.len() {
                    let x = measure.point(i);
                    let key: Vec<i64> = (0..d).map(|a| cell_index(x[a], off[a], h)).collect();
                    groups.entry(key).or_default().push(i);
                }
                for (key, atoms) in groups {
                    let corner = (0..d).map(|a| off[a] + key[a] as f64 * h).collect();
                    cells.push(Cell {
                        cube: Cube::new(corner, h)?,
                        atoms,
                    });
                }
            }
        }
        Ok(cells)
    }
}

/// Lattice index `j` with `off + j h <= x < off + (j+1) h` as evaluated in
/// floating point, so the cell built from `j` really contains `x`.
fn cell_index(x: f64, off: f64, h: f64) -> i64 {
    let mut j = ((x - off) / h).floor() as i64;
    while off + j as f64 * h > x {
        j -= 1;
    }
    while off + j as f64 * h + h <= x {
        j += 1;
    }
    j
}

impl fmt::Display for CubeFamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k={}..{} shifts={} clip={}",
            self.k_min, self.k_max, self.shifts_per_axis, self.clip_box
        )
    }
}

/// A family cube and the atoms it contains.
#[derive(Debug, Clone)]
pub struct Cell {
    pub cube: Cube,
    pub atoms: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    /// `M_B`
    MB,
    /// `M_{α,B}`
    MalphaB,
    /// `sup l(Q)^{α-n} ∫_Q |f|`
    MalphaRadial,
    /// `sup μ(Q)^{-1} ∫_Q |f|`
    Mmu,
    /// `sup μ(5Q)^{α-1} ∫_Q |f|`
    MalphaWTL,
}

impl Operator {
    pub fn as_str(&self) -> &'static str {
        match self {
            Operator::MB => "MB",
            Operator::MalphaB => "MalphaB",
            Operator::MalphaRadial => "MalphaRadial",
            Operator::Mmu => "Mmu",
            Operator::MalphaWTL => "MalphaWTL",
        }
    }
}

/// A computed maximal function.
#[derive(Debug, Clone)]
pub struct MaximalField {
    pub operator: Operator,
    pub alpha: f64,
    pub young: Option<YoungFunction>,
    pub values: MuFunction,
    pub family: CubeFamilySpec,
    /// Index into `cubes` of the maximizing cube for each atom.
    argmax: Vec<usize>,
    cubes: Vec<Cube>,
}

impl MaximalField {
    pub fn value(&self, i: usize) -> f64 {
        self.values.value(i)
    }

    pub fn argmax_cube(&self, i: usize) -> &Cube {
        &self.cubes[self.argmax[i]]
    }

    /// CSV sidecar: atom index, value, maximizing cube.
    pub fn cubes_csv(&self) -> String {
        let mut s = String::from("atom,value,argmax_cube\n");
        for i in 0..self.values.len() {
            writeln!(s, "{i},{:.11e},{}", self.value(i), self.argmax_cube(i)).unwrap();
        }
        s
    }
}

fn evaluate<F>(
    f: &MuFunction,
    family: &CubeFamilySpec,
    operator: Operator,
    alpha: f64,
    young: Option<YoungFunction>,
    per_cube: F,
) -> Result<MaximalField>
where
    F: Fn(&Cell) -> Result<Option<f64>> + Sync,
{
    let measure = f.measure();
    let cells = family.occupied_cells(measure)?;
    let values: Vec<Option<f64>> = cells
        .par_iter()
        .map(&per_cube)
        .collect::<Result<Vec<_>>>()?;
    let n = measure.len();
    let mut best = vec![f64::NEG_INFINITY; n];
    let mut argmax = vec![usize::MAX; n];
    for (c, (cell, v)) in cells.iter().zip(&values).enumerate() {
        let Some(v) = *v else { continue };
        for &i in &cell.atoms {
            if v > best[i] {
                best[i] = v;
                argmax[i] = c;
            }
        }
    }
    if let Some(i) = argmax.iter().position(|&a| a == usize::MAX) {
        return Err(Error::Degenerate(format!(
            "no admissible family cube contains the atom at {:?}",
            measure.point(i)
        )));
    }
    Ok(MaximalField {
        operator,
        alpha,
        young,
        values: MuFunction::new(std::sync::Arc::clone(measure), best)?,
        family: family.clone(),
        argmax,
        cubes: cells.into_iter().map(|c| c.cube).collect(),
    })
}

fn check_alpha(alpha: f64, upper: f64, what: &str) -> Result<()> {
    if (0.0..upper).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{what} needs 0 <= alpha < {upper}, got {alpha}")))
    }
}

/// `M_{α,B} f(x) = sup_{Q ∋ x} l(Q)^α ‖f‖_{B,Q}`; `M_B` when `α = 0`.
pub fn m_alpha_b(
    f: &MuFunction,
    alpha: f64,
    b: &YoungFunction,
    family: &CubeFamilySpec,
) -> Result<MaximalField> {
    let measure = f.measure();
    let n = measure.ahlfors_n();
    check_alpha(alpha, n, "M_alpha,B")?;
    let op = if alpha == 0.0 { Operator::MB } else { Operator::MalphaB };
    evaluate(f, family, op, alpha, Some(b.clone()), |cell| {
        let l = cell.cube.side();
        let vals: Vec<f64> = cell.atoms.iter().map(|&i| f.value(i).abs()).collect();
        let masses: Vec<f64> = cell.atoms.iter().map(|&i| measure.mass(i)).collect();
        let norm = norm_from_parts(&vals, &masses, l.powf(n), b, DEFAULT_TOL)?;
        Ok(Some(l.powf(alpha) * norm))
    })
}

/// `sup_{Q ∋ x} l(Q)^{α-n} ∫_Q |f| dμ`.
pub fn m_radial_alpha(f: &MuFunction, alpha: f64, family: &CubeFamilySpec) -> Result<MaximalField> {
    let measure = f.measure();
    let n = measure.ahlfors_n();
    check_alpha(alpha, n, "M_alpha")?;
    evaluate(f, family, Operator::MalphaRadial, alpha, None, |cell| {
        let s: f64 = cell.atoms.iter().map(|&i| f.value(i).abs() * measure.mass(i)).sum();
        Ok(Some(cell.cube.side().powf(alpha - n) * s))
    })
}

/// `sup_{Q ∋ x} μ(Q)^{-1} ∫_Q |f| dμ`.
pub fn m_mu(f: &MuFunction, family: &CubeFamilySpec) -> Result<MaximalField> {
    let measure = f.measure();
    evaluate(f, family, Operator::Mmu, 0.0, None, |cell| {
        let mut s = 0.0;
        let mut mu = 0.0;
        for &i in &cell.atoms {
            s += f.value(i).abs() * measure.mass(i);
            mu += measure.mass(i);
        }
        Ok((mu > 0.0).then(|| s / mu))
    })
}

/// `sup_{Q ∋ x} μ(5Q)^{α-1} ∫_Q |f| dμ`, `0 ≤ α < 1`.
pub fn m_wtl_alpha(f: &MuFunction, alpha: f64, family: &CubeFamilySpec) -> Result<MaximalField> {
    let measure = f.measure();
    check_alpha(alpha, 1.0, "M_alpha with mu(5Q)")?;
    evaluate(f, family, Operator::MalphaWTL, alpha, None, |cell| {
        let mu5 = measure.mu_of(&cell.cube.dilate(5.0)?);
        if mu5 <= 0.0 {
            return Ok(None);
        }
        let s: f64 = cell.atoms.iter().map(|&i| f.value(i).abs() * measure.mass(i)).sum();
        Ok(Some(mu5.powf(alpha - 1.0) * s))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::build_lebesgue;
    use std::sync::Arc;

    fn lebesgue(h: f64) -> Arc<AtomicMeasure> {
        Arc::new(build_lebesgue(1, &Cube::new(vec![0.0], 1.0).unwrap(), h).unwrap())
    }

    #[test]
    fn default_family_spans_box_to_resolution() {
        let m = lebesgue(2f64.powi(-6));
        let fam = CubeFamilySpec::default_for(&m);
        assert_eq!((fam.k_min, fam.k_max, fam.shifts_per_axis), (0, 6, 3));
        assert_eq!(fam.refined().k_max, 7);
    }

    #[test]
    fn every_atom_in_one_cell_per_lattice() {
        let m = Arc::new(build_lebesgue(2, &Cube::new(vec![0.0, 0.0], 1.0).unwrap(), 0.125).unwrap());
        let fam = CubeFamilySpec::new(0, 3, 2, m.bbox().clone()).unwrap();
        let cells = fam.occupied_cells(&m).unwrap();
        let mut count = vec![0usize; m.len()];
        for c in &cells {
            for &i in &c.atoms {
                count[i] += 1;
            }
        }
        // 4 generations times 2^2 shifted lattices.
        assert!(count.iter().all(|&c| c == 16));
    }

    #[test]
    fn zero_function_zero_field() {
        let m = lebesgue(2f64.powi(-5));
        let fam = CubeFamilySpec::default_for(&m);
        let b = YoungFunction::linear_log(1.0).unwrap();
        let field = m_alpha_b(&MuFunction::zero(&m), 0.25, &b, &fam).unwrap();
        assert!(field.values.is_zero());
        assert!(m_wtl_alpha(&MuFunction::zero(&m), 0.5, &fam).unwrap().values.is_zero());
    }

    #[test]
    fn indicator_of_unit_interval() {
        let m = lebesgue(2f64.powi(-6));
        let fam = CubeFamilySpec::default_for(&m);
        let f = MuFunction::constant(&m, 1.0);
        let field = m_alpha_b(&f, 0.0, &YoungFunction::power(1.0).unwrap(), &fam).unwrap();
        let mid = (0..m.len()).find(|&i| (m.point(i)[0] - 0.5).abs() < 0.01).unwrap();
        assert!((field.value(mid) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn mu_average_of_constant() {
        let m = lebesgue(2f64.powi(-5));
        let fam = CubeFamilySpec::default_for(&m);
        let field = m_mu(&MuFunction::constant(&m, -2.5), &fam).unwrap();
        assert!(field.values.values().iter().all(|&v| (v - 2.5).abs() < 1e-12));
    }

    #[test]
    fn wtl_single_cube_closed_form() {
        let m = lebesgue(2f64.powi(-5));
        // k_min = k_max = 2, one shift: cubes [j/4, (j+1)/4).
        let fam = CubeFamilySpec::new(2, 2, 1, m.bbox().clone()).unwrap();
        let f = MuFunction::constant(&m, 1.0);
        let field = m_wtl_alpha(&f, 0.0, &fam).unwrap();
        // [1/4, 1/2): 5Q = [-1/4, 1) has μ = 1, ∫_Q = 1/4.
        let i = (0..m.len()).find(|&i| m.point(i)[0] > 0.3 && m.point(i)[0] < 0.45).unwrap();
        assert!((field.value(i) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn coverage_error_outside_clip_box() {
        let m = lebesgue(0.25);
        let fam = CubeFamilySpec::new(0, 2, 1, Cube::new(vec![0.5], 0.5).unwrap()).unwrap();
        assert!(matches!(
            m_mu(&MuFunction::constant(&m, 1.0), &fam),
            Err(Error::Coverage(_))
        ));
    }

    #[test]
    fn alpha_range_enforced() {
        let m = lebesgue(0.25);
        let fam = CubeFamilySpec::default_for(&m);
        let f = MuFunction::constant(&m, 1.0);
        assert!(matches!(m_radial_alpha(&f, 1.0, &fam), Err(Error::Precondition(_))));
        assert!(matches!(m_wtl_alpha(&f, 1.0, &fam), Err(Error::Precondition(_))));
    }

    #[test]
    fn argmax_cube_contains_atom() {
        let m = lebesgue(2f64.powi(-5));
        let fam = CubeFamilySpec::default_for(&m);
        let f = MuFunction::from_fn(&m, |x| (x[0] - 0.3).abs());
        let field = m_radial_alpha(&f, 0.5, &fam).unwrap();
        for i in 0..m.len() {
            assert!(field.argmax_cube(i).contains_point(m.point(i)));
        }
        assert!(field.cubes_csv().starts_with("atom,value,argmax_cube\n"));
    }
}
