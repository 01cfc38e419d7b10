//! Level-set and pointwise experiments: `weak_modular`,
//! `pointwise_control` and `a1`.

use crate::error::{Error, Result};
use crate::grid::GeomGrid;
use crate::luxemburg::inverse_grid;
use crate::maximal::{m_alpha_b, m_mu, m_radial_alpha};
use crate::measure::MuFunction;
use crate::young::{compare_on_grid, conjugate_exponent, phi1, Family, YoungFunction};

use super::{dump_of, hypothesis_ok, two_levels, worst_atom, Context, ExperimentReport, ReportParts, SampleSet};

/// Number of thresholds in the level-set sweep.
pub const T_GRID: usize = 32;

/// `32` log-spaced thresholds in `[0.01, 1]·max`.
pub fn threshold_grid(max: f64) -> Vec<f64> {
    GeomGrid::new(0.01 * max, max, T_GRID).expect("positive max").points()
}

fn ratio_param(ctx: &Context, default: f64) -> Result<f64> {
    let a = ctx.num("alpha_over_n", default)?;
    if !(0.0..1.0).contains(&a) {
        return Err(Error::Config(format!("alpha_over_n must lie in [0, 1), got {a}")));
    }
    Ok(a)
}

/// `B(t)/t^{n/α}` nonincreasing on a wide grid.
fn check_decreasing_ratio(b: &YoungFunction, a: f64) -> Result<()> {
    let grid = GeomGrid::pow2(-20, 20, 161)?;
    let g = |t: f64| (b.value(t).ln() - t.ln() / a).exp();
    let pts = grid.points();
    for w in pts.windows(2) {
        let (g0, g1) = (g(w[0]), g(w[1]));
        hypothesis_ok(g1 <= g0 * (1.0 + 1e-9), "decreasing_ratio", || {
            format!("B(t)/t^(n/alpha) increases from {g0} at t={} to {g1} at t={} for B={b}", w[0], w[1])
        })?;
    }
    Ok(())
}

fn is_plain_linear_log(b: &YoungFunction) -> bool {
    matches!(b.family(), Family::LinearLog { k } if *k == 1.0) && b.coef() == 1.0
}

pub fn weak_modular(ctx: &Context) -> Result<ExperimentReport> {
    let a = ratio_param(ctx, 0.25)?;
    let b = ctx.young("B", "linlog:k=1")?;
    if a > 0.0 {
        check_decreasing_ratio(&b, a)?;
    }
    let remark = a > 0.0 && is_plain_linear_log(&b);
    // Inverted form: μ(E_t) ≤ C ψ(∫B(|f|/t)) with ψ = (s log(e + s^a))^{1/(1-a)}.
    let psi = |s: f64| (s * (std::f64::consts::E + s.powf(a)).ln()).powf(1.0 / (1.0 - a));
    let dump = std::sync::Mutex::new(None);
    let (base, refined) = two_levels(ctx, 10, |level, m, fam, fns| {
        let n = m.ahlfors_n();
        let alpha = a * n;
        let mut s = SampleSet::default();
        for f in fns {
            let fv = f.on(m);
            let field = m_alpha_b(&fv, alpha, &b, fam)?;
            if level == 0 && ctx.dump_fields && dump.lock().unwrap().is_none() {
                *dump.lock().unwrap() = Some(dump_of(&field)?);
            }
            let max = field.values.max_abs();
            if max == 0.0 {
                continue;
            }
            for (j, t) in threshold_grid(max).into_iter().enumerate() {
                let mu_e = field.values.superlevel_mass(t);
                let lhs = phi1(&b, alpha, n, mu_e)?;
                let rhs: f64 = (0..m.len()).map(|i| b.value(fv.value(i).abs() / t) * m.mass(i)).sum();
                let case = format!("{}/t{j:02}", f.case_id);
                s.main(case.clone(), lhs, rhs);
                if remark {
                    s.info(format!("{case}/inverted"), mu_e, psi(rhs));
                }
            }
        }
        Ok(s)
    })?;
    let mut parts = ReportParts::standard(base, refined);
    parts.dump = dump.into_inner().unwrap();
    Ok(ctx.report(parts))
}

/// `(q, s)` from `1/q = 1/p - a` and `s = 1 + q/p'`.
pub fn pointwise_exponents(p: f64, a: f64) -> Result<(f64, f64)> {
    if !(p > 1.0 && p * a < 1.0 && a >= 0.0) {
        return Err(Error::Config(format!("need 1 < p < n/alpha, got p={p}, alpha/n={a}")));
    }
    let q = 1.0 / (1.0 / p - a);
    Ok((q, 1.0 + q / conjugate_exponent(p)))
}

pub fn pointwise_control(ctx: &Context) -> Result<ExperimentReport> {
    let p = ctx.num("p", 2.0)?;
    let a = ratio_param(ctx, 0.25)?;
    let (q, s) = pointwise_exponents(p, a)?;
    let identity_error = (s - q * (1.0 - a)).abs();
    hypothesis_ok(identity_error <= 1e-12 * s, "exponent_identity", || {
        format!("1 + q/p' = {s} but q(1 - alpha/n) = {}", q * (1.0 - a))
    })?;
    let b = ctx.young("B", "linlog:k=1")?;
    let phi = match ctx.text("phi", "default").as_str() {
        "default" => YoungFunction::default_phi(&b, a)?,
        spec => YoungFunction::parse_spec(spec).map_err(|e| Error::Config(format!("phi: {e}")))?,
    };
    let cmp = compare_on_grid(
        |t| b.inverse_value(t),
        |t| phi.inverse_value(t) * t.powf(a),
        &inverse_grid(),
    );
    hypothesis_ok(cmp.bounded_above(), "phi_inverse_lower_bound", || {
        format!(
            "B^-1(t) / (phi^-1(t) t^(alpha/n)) reaches {} at t = {} and keeps growing",
            cmp.max_ratio, cmp.argmax_t
        )
    })?;
    let psi = YoungFunction::psi_from_phi(&phi, a)?;
    let dump = std::sync::Mutex::new(None);
    let (base, refined) = two_levels(ctx, 20, |level, m, fam, fns| {
        let alpha = a * m.ahlfors_n();
        let mut set = SampleSet::default();
        for f in fns {
            let fv = f.on(m).abs();
            let lhs = m_alpha_b(&fv, alpha, &b, fam)?;
            if level == 0 && ctx.dump_fields && dump.lock().unwrap().is_none() {
                *dump.lock().unwrap() = Some(dump_of(&lhs)?);
            }
            let mpsi = m_alpha_b(&fv.powf(p / s), 0.0, &psi, fam)?;
            let norm_term = fv.powf(p).integral().powf(a);
            let rhs: Vec<f64> = mpsi.values.values().iter().map(|v| v.powf(1.0 - a) * norm_term).collect();
            if let Some((i, l, r)) = worst_atom(lhs.values.values(), &rhs) {
                set.main(format!("{}@{i}", f.case_id), l, r);
            }
        }
        Ok(set)
    })?;
    let mut parts = ReportParts::standard(base, refined);
    parts.extras = vec![
        ("q".into(), q),
        ("s".into(), s),
        ("exponent_identity_error".into(), identity_error),
        ("phi_inverse_ratio_max".into(), cmp.max_ratio),
    ];
    parts.dump = dump.into_inner().unwrap();
    Ok(ctx.report(parts))
}

pub fn a1(ctx: &Context) -> Result<ExperimentReport> {
    let a = ratio_param(ctx, 0.5)?;
    if a == 0.0 {
        return Err(Error::Config("a1 needs alpha_over_n > 0".into()));
    }
    let dump = std::sync::Mutex::new(None);
    let (base, refined) = two_levels(ctx, 10, |level, m, fam, fns| {
        let alpha = a * m.ahlfors_n();
        let mut set = SampleSet::default();
        for f in fns {
            let fv = f.on(m).abs();
            let ratios = a1_ratio(&fv, alpha, fam)?;
            if level == 0 && ctx.dump_fields && dump.lock().unwrap().is_none() {
                *dump.lock().unwrap() = Some(dump_of(&ratios.0)?);
            }
            if let Some((i, l, r)) = worst_atom(ratios.1.values(), ratios.0.values.values()) {
                set.main(format!("{}@{i}", f.case_id), l, r);
            }
        }
        Ok(set)
    })?;
    let mut parts = ReportParts::standard(base, refined);
    parts.dump = dump.into_inner().unwrap();
    Ok(ctx.report(parts))
}

/// `(M_α f, M_μ(M_α f))`; a zero `f` is degenerate.
pub fn a1_ratio(
    f: &MuFunction,
    alpha: f64,
    fam: &crate::maximal::CubeFamilySpec,
) -> Result<(crate::maximal::MaximalField, MuFunction)> {
    if f.is_zero() {
        return Err(Error::Degenerate("f vanishes on every atom".into()));
    }
    let g = m_radial_alpha(f, alpha, fam)?;
    let mg = m_mu(&g.values, fam)?.values;
    Ok((g, mg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents() {
        let (q, s) = pointwise_exponents(2.0, 0.25).unwrap();
        assert_eq!((q, s), (4.0, 3.0));
        let (q, s) = pointwise_exponents(3.0, 0.0).unwrap();
        assert_eq!((q, s), (3.0, 3.0));
        assert!(pointwise_exponents(4.0, 0.25).is_err());
    }

    #[test]
    fn threshold_grid_spans_two_decades() {
        let g = threshold_grid(5.0);
        assert_eq!(g.len(), 32);
        assert!((g[0] - 0.05).abs() < 1e-15 && (g[31] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn decreasing_ratio_hypothesis() {
        let b = YoungFunction::linear_log(1.0).unwrap();
        check_decreasing_ratio(&b, 0.25).unwrap();
        let p5 = YoungFunction::power(5.0).unwrap();
        let err = check_decreasing_ratio(&p5, 0.25).unwrap_err();
        assert!(matches!(err, Error::Hypothesis { ref check, .. } if check == "decreasing_ratio"));
    }
}
