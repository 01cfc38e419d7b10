//! Norm-ratio experiments: `two_weight` and `lp_bounds`.

use rayon::prelude::*;

use crate::cubes::Cube;
use crate::error::{Error, Result};
use crate::grid::GeomGrid;
use crate::luxemburg::{generalized_holder_constant, inverse_grid, norm_from_parts, DEFAULT_TOL};
use crate::maximal::{m_alpha_b, Cell, CubeFamilySpec};
use crate::measure::{AtomicMeasure, MuFunction};
use crate::young::{check_bp, check_submultiplicative, compare_on_grid, Family, YoungFunction};

use super::weights::WeightSpec;
use super::{dump_of, hypothesis_ok, two_levels, Context, ExperimentReport, ReportParts, SampleSet};

/// Largest per-cube value over the occupied cells of `fam`, with its cube.
/// Cells for which `per_cell` returns `None` are skipped.
pub(crate) fn sup_over_cells<F>(m: &AtomicMeasure, fam: &CubeFamilySpec, per_cell: F) -> Result<Option<(f64, Cube)>>
where
    F: Fn(&Cell) -> Result<Option<f64>> + Sync,
{
    let cells = fam.occupied_cells(m)?;
    let vals = cells.par_iter().map(&per_cell).collect::<Result<Vec<_>>>()?;
    let mut best: Option<(f64, usize)> = None;
    for (i, v) in vals.into_iter().enumerate() {
        if let Some(v) = v {
            if best.map_or(true, |(b, _)| v > b) {
                best = Some((v, i));
            }
        }
    }
    Ok(best.map(|(v, i)| (v, cells[i].cube.clone())))
}

/// `‖w‖_{A,Q}` for the atoms of a cell.
pub(crate) fn cell_norm(w: &MuFunction, a: &YoungFunction, cell: &Cell, n: f64) -> Result<f64> {
    let m = w.measure();
    let vals: Vec<f64> = cell.atoms.iter().map(|&i| w.value(i).abs()).collect();
    let masses: Vec<f64> = cell.atoms.iter().map(|&i| m.mass(i)).collect();
    norm_from_parts(&vals, &masses, cell.cube.side().powf(n), a, DEFAULT_TOL)
}

/// `∫_{rQ} w dμ`.
pub(crate) fn weight_of_dilate(w: &MuFunction, q: &Cube, r: f64) -> Result<f64> {
    Ok(w.integrate(&q.dilate(r)?))
}

fn submultiplicative(b: &YoungFunction) -> Result<()> {
    let grid = GeomGrid::pow2(-10, 10, 41)?;
    let rep = check_submultiplicative(b, &grid);
    hypothesis_ok(rep.holds(1e-9), "check_submultiplicative", || {
        format!(
            "B(st) / (B(s)B(t)) = {} at s = {}, t = {} for B = {b}",
            rep.worst_ratio, rep.s, rep.t
        )
    })
}

fn bp(b: &YoungFunction, p: f64, what: &str) -> Result<f64> {
    let v = check_bp(b, p, 1.0)?;
    hypothesis_ok(v.converges(), "check_bp", || {
        format!("{what} = {b} is not in B_{p}: {} ({})", v.status.as_str(), v.diagnostic)
    })?;
    Ok(v.tail_estimate)
}

/// `B^r`, or `B` itself when `r = 1`.
fn power_of(b: &YoungFunction, r: f64) -> Result<YoungFunction> {
    if (r - 1.0).abs() < 1e-15 {
        Ok(b.clone())
    } else {
        YoungFunction::power_scaled(b, r)
    }
}

fn phi_for(ctx: &Context, b: &YoungFunction, a: f64) -> Result<YoungFunction> {
    match ctx.text("phi", "default").as_str() {
        "default" => YoungFunction::default_phi(b, a),
        spec => YoungFunction::parse_spec(spec).map_err(|e| Error::Config(format!("phi: {e}"))),
    }
}

/// `B^{-1}(t) / (φ^{-1}(t) t^a)` on the inverse grid; `both` also demands
/// a positive lower bound.
fn phi_bounds(b: &YoungFunction, phi: &YoungFunction, a: f64, both: bool) -> Result<(f64, f64)> {
    let cmp = compare_on_grid(
        |t| b.inverse_value(t),
        |t| phi.inverse_value(t) * t.powf(a),
        &inverse_grid(),
    );
    let check = if both { "inverse_sandwich" } else { "phi_inverse_lower_bound" };
    hypothesis_ok(cmp.bounded_above() && (!both || cmp.bounded_below()), check, || {
        format!(
            "B^-1(t) / (phi^-1(t) t^(alpha/n)) ranges over [{}, {}] (at t = {}, {}) with B = {b}, phi = {phi}",
            cmp.min_ratio, cmp.max_ratio, cmp.argmin_t, cmp.argmax_t
        )
    })?;
    Ok((cmp.min_ratio, cmp.max_ratio))
}

fn log_power(b: &YoungFunction) -> f64 {
    match b.family() {
        Family::LinearLog { k } | Family::PowerLog { k, .. } => *k,
        _ => 0.0,
    }
}

pub fn two_weight(ctx: &Context) -> Result<ExperimentReport> {
    let p = ctx.num("p", 2.0)?;
    let a = ctx.num("alpha_over_n", 0.25)?;
    if !(0.0..1.0).contains(&a) || p * a >= 1.0 || p <= 1.0 {
        return Err(Error::Config(format!("need 1 < p < n/alpha, got p={p}, alpha/n={a}")));
    }
    let q = ctx.num("q", 1.0 / (1.0 / p - a))?;
    if !(q > p && q.is_finite()) {
        return Err(Error::Config(format!("need 1 < p < q < inf, got p={p}, q={q}")));
    }
    let p0 = ctx.num("p0", p)?;
    if !(p0 > 1.0 && p0 * a < 1.0) {
        return Err(Error::Config(format!("p0 must satisfy 1 < p0 < n/alpha, got {p0}")));
    }
    let q0 = 1.0 / (1.0 / p0 - a);
    let r = ctx.num("r", 1.5)?;
    let b = ctx.young("B", "linlog:k=1")?;
    let a_fn = match ctx.text("A", "default").as_str() {
        "default" => YoungFunction::weight_pair_a(r, p)?,
        spec => YoungFunction::parse_spec(spec).map_err(|e| Error::Config(format!("A: {e}")))?,
    };
    let c_fn = match ctx.text("C", "default").as_str() {
        "default" => YoungFunction::weight_pair_c(r, p, log_power(&b))?,
        spec => YoungFunction::parse_spec(spec).map_err(|e| Error::Config(format!("C: {e}")))?,
    };

    submultiplicative(&b)?;
    bp(&power_of(&b, q0 / p0)?, q0, "B^(q0/p0)")?;
    let phi = phi_for(ctx, &b, a)?;
    let (c1, c2) = phi_bounds(&b, &phi, a, true)?;
    // A^{-1} C^{-1} ⪯ B^{-1}: the Hölder-type constant with B in the role of the product.
    let holder_k = generalized_holder_constant(&b, &a_fn, &c_fn)?;
    bp(&c_fn, p, "C")?;

    let u_spec = WeightSpec::parse(&ctx.text("u", "one"))?;
    let v_spec = WeightSpec::parse(&ctx.text("v", "one"))?;
    let k_values = std::sync::Mutex::new(Vec::new());
    let dump = std::sync::Mutex::new(None);
    let (base, refined) = two_levels(ctx, 10, |level, m, fam, fns| {
        let n = m.ahlfors_n();
        let alpha = a * n;
        let u = u_spec.build(m, fam, None)?;
        let v = v_spec.build(m, fam, Some((&u, p / q)))?;
        let v_neg = v.map(|x| if x > 0.0 { x.powf(-1.0 / p) } else { 0.0 });
        let k = sup_over_cells(m, fam, |cell| {
            let l = cell.cube.side();
            let u3 = weight_of_dilate(&u, &cell.cube, 3.0)?;
            let norm = cell_norm(&v_neg, &a_fn, cell, n)?;
            Ok(Some(l.powf(alpha - n / p) * u3.powf(1.0 / q) * norm))
        })?
        .map_or(0.0, |(k, _)| k);
        k_values.lock().unwrap().push(k);
        let mut set = SampleSet::default();
        for f in fns {
            let fv = f.on(m);
            let field = m_alpha_b(&fv, alpha, &b, fam)?;
            if level == 0 && ctx.dump_fields && dump.lock().unwrap().is_none() {
                *dump.lock().unwrap() = Some(dump_of(&field)?);
            }
            set.main(
                f.case_id.clone(),
                field.values.lp_norm(q, Some(&u))?,
                fv.lp_norm(p, Some(&v))?,
            );
        }
        Ok(set)
    })?;
    let ks = k_values.into_inner().unwrap();
    let mut parts = ReportParts::standard(base, refined);
    parts.criterion = format!(
        "hypotheses hold; empirical_C finite and refinement_drift <= {}; K reported",
        super::DRIFT_LIMIT
    );
    parts.extras = vec![
        ("K".into(), ks[0]),
        ("K_refined".into(), ks[1]),
        ("q0".into(), q0),
        ("sandwich_C1".into(), c1),
        ("sandwich_C2".into(), c2),
        ("inverse_product_constant".into(), holder_k),
    ];
    parts.dump = dump.into_inner().unwrap();
    Ok(ctx.report(parts))
}

fn parse_sweep(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            crate::config::parse_number(s).and_then(|p| {
                if p > 1.0 {
                    Ok(p)
                } else {
                    Err(Error::Config(format!("p_sweep entries must exceed 1, got {p}")))
                }
            })
        })
        .collect()
}

pub fn lp_bounds(ctx: &Context) -> Result<ExperimentReport> {
    let p = ctx.num("p", 2.0)?;
    let a = ctx.num("alpha_over_n", 0.0)?;
    if !(0.0..1.0).contains(&a) || p <= 1.0 {
        return Err(Error::Config(format!("need p > 1 and 0 <= alpha/n < 1, got p={p}, alpha/n={a}")));
    }
    let b = ctx.young("B", "power:p=1.5")?;
    let endpoint = a > 0.0 && (p * a - 1.0).abs() < 1e-12;
    if a > 0.0 && p * a > 1.0 + 1e-12 {
        return Err(Error::Config(format!("p = {p} exceeds n/alpha = {}", 1.0 / a)));
    }
    let q = if endpoint { f64::INFINITY } else { 1.0 / (1.0 / p - a) };
    let mut extras = vec![("q".into(), q)];
    if a == 0.0 {
        extras.push(("bp_tail".into(), bp(&b, p, "B")?));
    } else {
        submultiplicative(&b)?;
        if !endpoint {
            extras.push(("bp_tail".into(), bp(&power_of(&b, q / p)?, q, "B^(q/p)")?));
        }
        let phi = phi_for(ctx, &b, a)?;
        extras.push(("phi_inverse_ratio_max".into(), phi_bounds(&b, &phi, a, false)?.1));
    }
    let sweep = parse_sweep(&ctx.text("p_sweep", "1.05,1.25,1.5,2"))?;

    let dump = std::sync::Mutex::new(None);
    let (base, refined) = two_levels(ctx, 10, |level, m, fam, fns| {
        let alpha = a * m.ahlfors_n();
        let mut set = SampleSet::default();
        let mut fields = Vec::with_capacity(fns.len());
        for f in fns {
            let fv = f.on(m);
            let field = m_alpha_b(&fv, alpha, &b, fam)?;
            if level == 0 && ctx.dump_fields && dump.lock().unwrap().is_none() {
                *dump.lock().unwrap() = Some(dump_of(&field)?);
            }
            if endpoint {
                set.main(f.case_id.clone(), field.values.max_abs(), fv.lp_norm(p, None)?);
            } else {
                set.main(f.case_id.clone(), field.values.lp_norm(q, None)?, fv.lp_norm(p, None)?);
            }
            fields.push((fv, field));
        }
        if level == 0 {
            for &ps in &sweep {
                if a > 0.0 && ps * a >= 1.0 {
                    continue;
                }
                let qs = 1.0 / (1.0 / ps - a);
                let mut worst: Option<(f64, f64, f64)> = None;
                for (fv, field) in &fields {
                    let (l, r) = (field.values.lp_norm(qs, None)?, fv.lp_norm(ps, None)?);
                    if let Some(ratio) = super::report::ratio_of(l, r) {
                        if worst.map_or(true, |(w, _, _)| ratio > w) {
                            worst = Some((ratio, l, r));
                        }
                    }
                }
                if let Some((_, l, r)) = worst {
                    set.info(format!("p={ps}"), l, r);
                }
            }
        }
        Ok(set)
    })?;
    let mut parts = ReportParts::standard(base, refined);
    if endpoint {
        parts.criterion = format!(
            "pointwise M_(alpha,B) f <= C ||f||_(n/alpha): empirical_C finite and refinement_drift <= {}",
            super::DRIFT_LIMIT
        );
    }
    parts.extras = extras;
    parts.dump = dump.into_inner().unwrap();
    Ok(ctx.report(parts))
}
