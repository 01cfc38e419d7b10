//! Experiments on scalar quantities: `bp_inheritance` and
//! `gaussian_failure`.

use std::sync::Arc;

use crate::cubes::Cube;
use crate::error::{Error, Result};
use crate::luxemburg::radial_average;
use crate::measure::{build_gaussian_1d, MuFunction};
use crate::quadrature;
use crate::young::{check_bp, YoungFunction};

use super::{hypothesis_ok, Context, ExperimentReport, ReportParts, SampleSet, Verdict};

const OCTAVE_LIMIT: usize = 2000;

/// `∫_1^∞ B(t) t^{-e} dt/t` summed octave by octave until three
/// consecutive octaves add less than `1e-13` of the running sum; `inf` if
/// that never happens.
pub fn tail_integral(b: &YoungFunction, e: f64) -> f64 {
    let integrand = |t: f64| {
        let v = b.value(t);
        if v <= 0.0 {
            0.0
        } else {
            (v.ln() - (e + 1.0) * t.ln()).exp()
        }
    };
    let mut sum = 0.0;
    let mut quiet = 0;
    let mut a = 1.0f64;
    for _ in 0..OCTAVE_LIMIT {
        let c = quadrature::integrate(integrand, a, 2.0 * a, 0.0, 1e-12).value;
        if !c.is_finite() {
            return f64::INFINITY;
        }
        sum += c;
        quiet = if c <= 1e-13 * sum { quiet + 1 } else { 0 };
        if quiet >= 3 {
            return sum;
        }
        a *= 2.0;
    }
    f64::INFINITY
}

pub fn bp_inheritance(ctx: &Context) -> Result<ExperimentReport> {
    let b = ctx.young("B", "linlog:k=1")?;
    let p = ctx.num("p", 2.0)?;
    let a = ctx.num("alpha_over_n", 0.25)?;
    if !(0.0..1.0).contains(&a) || p <= 1.0 || p * a >= 1.0 {
        return Err(Error::Config(format!("need 1 < p < n/alpha, got p={p}, alpha/n={a}")));
    }
    let q = 1.0 / (1.0 / p - a);
    let s = q * (1.0 - a);
    let bq = if a == 0.0 { b.clone() } else { YoungFunction::power_scaled(&b, q / p)? };
    let hyp = check_bp(&bq, q, 1.0)?;
    hypothesis_ok(hyp.converges(), "check_bp", || {
        format!("B^(q/p) = {bq} is not in B_{q}: {}", hyp.diagnostic)
    })?;
    let phi = match ctx.text("phi", "default").as_str() {
        "default" => YoungFunction::default_phi(&b, a)?,
        spec => YoungFunction::parse_spec(spec).map_err(|e| Error::Config(format!("phi: {e}")))?,
    };
    let cmp = crate::young::compare_on_grid(
        |t| b.inverse_value(t),
        |t| phi.inverse_value(t) * t.powf(a),
        &crate::luxemburg::inverse_grid(),
    );
    hypothesis_ok(cmp.bounded_above() && cmp.bounded_below(), "inverse_sandwich", || {
        format!(
            "B^-1(t) / (phi^-1(t) t^(alpha/n)) ranges over [{}, {}]",
            cmp.min_ratio, cmp.max_ratio
        )
    })?;
    let psi = YoungFunction::psi_from_phi(&phi, a)?;
    let verdict = check_bp(&psi, s, 1.0)?;
    // t = r^{1/(1-a)} turns the ψ-integral into a φ-integral.
    let lhs = tail_integral(&psi, s);
    let rhs = tail_integral(&phi, s / (1.0 - a)) / (1.0 - a);
    let mut set = SampleSet::default();
    set.main("change_of_variables", lhs, rhs);
    set.info("psi_tail_vs_octave_estimate", lhs, verdict.tail_estimate);
    let rel = (lhs / rhs - 1.0).abs();
    ctx.record("refinement", "none");
    let ok = verdict.converges() && rel <= 0.01;
    Ok(ctx.report(ReportParts {
        base: set,
        refined: None,
        criterion: format!("psi in B_{s} (octave verdict converges) and change of variables identity within 1%"),
        verdict: Some(Verdict::from_bool(ok)),
        extras: vec![
            ("q".into(), q),
            ("s".into(), s),
            ("psi_converges".into(), if verdict.converges() { 1.0 } else { 0.0 }),
            ("psi_tail_estimate".into(), verdict.tail_estimate),
            ("identity_rel_error".into(), rel),
        ],
        dump: None,
    }))
}

/// `(2r)^{-1} ∫_{x-r}^{x+r} e^{θt²} e^{-t²} dt` on the discretized measure.
pub fn gaussian_average(f: &MuFunction, x: f64, r: f64) -> Result<f64> {
    Ok(radial_average(f, &Cube::new(vec![x - r], 2.0 * r)?))
}

pub fn gaussian_failure(ctx: &Context) -> Result<ExperimentReport> {
    let theta = ctx.num("theta", 2.0)?;
    let x = ctx.num("x", 1.0)?;
    let h = ctx.num("resolution", 2f64.powi(-12))?;
    let bbox = Cube::parse("-8 @ 16")?;
    let r_floor = 8.0 * h;
    let r_min = ctx.num("r_min", r_floor)?;
    if r_min < r_floor * (1.0 - 1e-12) {
        return Err(Error::Config(format!(
            "r_min = {r_min} is below 8 atom spacings ({r_floor}) at resolution {h}"
        )));
    }
    if !(x - 0.5 > -8.0 && x + 0.5 < 8.0) {
        return Err(Error::Config(format!("x = {x} is too close to the edge of [-8, 8)")));
    }
    let limit = ((theta - 1.0) * x * x).exp();
    let f_x = (theta * x * x).exp();
    let mut radii = Vec::new();
    let mut r = 0.5;
    while r >= r_min * (1.0 - 1e-12) {
        radii.push(r);
        r *= 0.5;
    }
    if radii.is_empty() {
        return Err(Error::Config(format!("r_min = {r_min} leaves no radius 2^-j <= 1/2")));
    }
    let at_level = |hh: f64| -> Result<(SampleSet, f64)> {
        let m = Arc::new(build_gaussian_1d(&bbox, hh)?);
        let f = MuFunction::from_fn(&m, |t| (theta * t[0] * t[0]).exp());
        let mut set = SampleSet::default();
        let mut last = 0.0;
        for (j, &r) in radii.iter().enumerate() {
            last = gaussian_average(&f, x, r)?;
            if j + 1 == radii.len() {
                set.main(format!("r={r:e}"), last, limit);
            } else {
                set.info(format!("r={r:e}"), last, limit);
            }
        }
        set.info("f(x)", f_x, limit);
        Ok((set, last))
    };
    ctx.record("measure", format!("gaussian box=-8@16 h={h}"));
    let (base, avg) = at_level(h)?;
    let (refined, _) = at_level(h / 2.0)?;
    let ok = (avg / limit - 1.0).abs() <= 0.01;
    Ok(ctx.report(ReportParts {
        base,
        refined: Some(refined),
        criterion: "average at the smallest radius within 1% of exp((theta-1) x^2)".into(),
        verdict: Some(Verdict::from_bool(ok)),
        extras: vec![
            ("limit".into(), limit),
            ("f_x".into(), f_x),
            ("average_at_r_min".into(), avg),
            ("r_min".into(), *radii.last().unwrap()),
            ("f_over_average".into(), f_x / avg),
        ],
        dump: None,
    }))
}
