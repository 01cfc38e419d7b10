//! Radial Luxemburg averages, normalized by `l(Q)^n` rather than `μ(Q)`,
//! and the Hölder-type inequalities between them.

use crate::cubes::Cube;
use crate::error::{Error, Result};
use crate::grid::GeomGrid;
use crate::measure::MuFunction;
use crate::young::{compare_on_grid, GridComparison, YoungFunction};

pub const DEFAULT_TOL: f64 = 1e-9;

/// `l(Q)^{-n} ∫_Q |f| dμ`.
pub fn radial_average(f: &MuFunction, q: &Cube) -> f64 {
    let m = f.measure();
    let s: f64 = m.atoms_in(q).map(|i| f.value(i).abs() * m.mass(i)).sum();
    s / q.side().powf(m.ahlfors_n())
}

/// `‖f‖_{B,Q} = inf{λ > 0 : l(Q)^{-n} ∫_Q B(|f|/λ) dμ ≤ 1}`.
pub fn luxemburg_norm(f: &MuFunction, b: &YoungFunction, q: &Cube, tol: f64) -> Result<f64> {
    let m = f.measure();
    let mut vals = Vec::new();
    let mut masses = Vec::new();
    for i in m.atoms_in(q) {
        vals.push(f.value(i).abs());
        masses.push(m.mass(i));
    }
    norm_from_parts(&vals, &masses, q.side().powf(m.ahlfors_n()), b, tol)
}

/// Luxemburg norm of the atoms `(|f_i|, m_i)` with normalizer `l(Q)^n`.
///
/// Bisection on the nonincreasing map `G(λ) = Σ B(|f_i|/λ) m_i / normalizer`.
/// The returned `λ` always satisfies `G(λ) ≤ 1` and is within `tol·λ` of
/// the infimum.
pub fn norm_from_parts(
    abs_values: &[f64],
    masses: &[f64],
    normalizer: f64,
    b: &YoungFunction,
    tol: f64,
) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if let Some(v) = abs_values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("function value {v} is not finite")));
    }
    let mut sum_f = 0.0;
    let mut max_f: f64 = 0.0;
    let mut mu_support = 0.0;
    let mut mu = 0.0;
    for (&v, &w) in abs_values.iter().zip(masses) {
        sum_f += v * w;
        max_f = max_f.max(v);
        mu += w;
        if v != 0.0 {
            mu_support += w;
        }
    }
    if mu_support == 0.0 {
        return Ok(0.0);
    }
    let g = |lambda: f64| -> f64 {
        abs_values
            .iter()
            .zip(masses)
            .filter(|(v, _)| **v != 0.0)
            .map(|(&v, &w)| b.value(v / lambda) * w)
            .sum::<f64>()
            / normalizer
    };
    let lambda0 = sum_f / normalizer + max_f * mu / normalizer;
    let (mut lo, mut hi) = (lambda0, lambda0);
    let mut g_hi = g(hi);
    while g_hi > 1.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Degenerate("Luxemburg bracket overflowed".into()));
        }
        g_hi = g(hi);
    }
    let mut g_lo = g(lo);
    while g_lo <= 1.0 {
        hi = lo;
        g_hi = g_lo;
        lo *= 0.5;
        if lo == 0.0 {
            return Ok(hi);
        }
        g_lo = g(lo);
    }
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid > g_lo * (1.0 + 1e-12) || g_mid < g_hi * (1.0 - 1e-12) {
            return Err(Error::NonMonotone(format!(
                "G({mid}) = {g_mid} is outside [G({hi}), G({lo})] = [{g_hi}, {g_lo}] for {b}"
            )));
        }
        if g_mid > 1.0 {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }
    Ok(hi)
}

/// `(l(Q)^{-n}∫_Q |fg| dμ, 2‖f‖_{B,Q}‖g‖_{B̃,Q})`.
pub fn holder_pair(
    f: &MuFunction,
    g: &MuFunction,
    b: &YoungFunction,
    q: &Cube,
) -> Result<(f64, f64)> {
    let fg = f.mul(g)?;
    let lhs = radial_average(&fg, q);
    let b_tilde = b.complementary()?;
    let rhs = 2.0
        * luxemburg_norm(f, b, q, DEFAULT_TOL)?
        * luxemburg_norm(g, &b_tilde, q, DEFAULT_TOL)?;
    Ok((lhs, rhs))
}

/// Grid used for inverse-product conditions.
pub fn inverse_grid() -> GeomGrid {
    GeomGrid::pow2(-20, 20, 81).expect("static grid")
}

/// Scan of `B^{-1}(t)C^{-1}(t) / A^{-1}(t)` on [`inverse_grid`].
pub fn inverse_product_ratio(
    a: &YoungFunction,
    b: &YoungFunction,
    c: &YoungFunction,
) -> GridComparison {
    compare_on_grid(
        |t| b.inverse_value(t) * c.inverse_value(t),
        |t| a.inverse_value(t),
        &inverse_grid(),
    )
}

/// Constant `K = 2c` for `‖fg‖_{A,Q} ≤ K‖f‖_{B,Q}‖g‖_{C,Q}`, where `c`
/// bounds `B^{-1}C^{-1}/A^{-1}` on the grid.
pub fn generalized_holder_constant(
    a: &YoungFunction,
    b: &YoungFunction,
    c: &YoungFunction,
) -> Result<f64> {
    let cmp = inverse_product_ratio(a, b, c);
    if !cmp.bounded_above() {
        return Err(Error::hypothesis(
            "inverse_product",
            format!(
                "B^-1 C^-1 / A^-1 is not bounded on the grid: ratio {} at t = {} (tails {} / {})",
                cmp.max_ratio, cmp.argmax_t, cmp.upper_tail_trend, cmp.lower_tail_trend
            ),
        ));
    }
    Ok(2.0 * cmp.max_ratio)
}

/// `(‖fg‖_{A,Q}, K‖f‖_{B,Q}‖g‖_{C,Q})`, after checking the inverse-product
/// condition `B^{-1}C^{-1} ≤ c A^{-1}` on the grid.
pub fn generalized_holder(
    f: &MuFunction,
    g: &MuFunction,
    a: &YoungFunction,
    b: &YoungFunction,
    c: &YoungFunction,
    q: &Cube,
    k: f64,
) -> Result<(f64, f64)> {
    generalized_holder_constant(a, b, c)?;
    let fg = f.mul(g)?;
    let lhs = luxemburg_norm(&fg, a, q, DEFAULT_TOL)?;
    let rhs = k * luxemburg_norm(f, b, q, DEFAULT_TOL)? * luxemburg_norm(g, c, q, DEFAULT_TOL)?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{build_cantor, build_lebesgue};
    use std::sync::Arc;

    fn lebesgue() -> Arc<crate::measure::AtomicMeasure> {
        Arc::new(build_lebesgue(1, &Cube::new(vec![0.0], 1.0).unwrap(), 2f64.powi(-8)).unwrap())
    }

    #[test]
    fn radial_average_examples() {
        let m = lebesgue();
        let box_ = Cube::new(vec![0.0], 1.0).unwrap();
        assert_eq!(radial_average(&MuFunction::constant(&m, 3.0), &box_), 3.0);
        assert_eq!(radial_average(&MuFunction::zero(&m), &box_), 0.0);
    }

    #[test]
    fn constant_indicator_closed_form() {
        // f = c χ_Q with μ(Q) = l(Q)^n gives G(λ) = B(c/λ), so ‖f‖ = c/B^{-1}(1).
        let m = lebesgue();
        let q = Cube::new(vec![0.25], 0.5).unwrap();
        let f = MuFunction::constant(&m, 2.0);
        for b in [
            YoungFunction::power(3.0).unwrap(),
            YoungFunction::linear_log(1.0).unwrap(),
            YoungFunction::power_log(1.5, 2.0).unwrap(),
        ] {
            let got = luxemburg_norm(&f, &b, &q, 1e-12).unwrap();
            let want = 2.0 / b.inverse(1.0).unwrap();
            assert!((got - want).abs() <= 1e-10 * want, "{b}: {got} vs {want}");
        }
    }

    #[test]
    fn zero_function_has_zero_norm() {
        let m = lebesgue();
        let q = Cube::new(vec![0.0], 1.0).unwrap();
        let b = YoungFunction::power(2.0).unwrap();
        assert_eq!(luxemburg_norm(&MuFunction::zero(&m), &b, &q, 1e-9).unwrap(), 0.0);
        let empty = Cube::new(vec![3.0], 1.0).unwrap();
        assert_eq!(luxemburg_norm(&MuFunction::constant(&m, 1.0), &b, &empty, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let m = lebesgue();
        let mut v = vec![1.0; m.len()];
        v[3] = f64::NAN;
        let f = MuFunction::new(Arc::clone(&m), v).unwrap();
        let q = Cube::new(vec![0.0], 1.0).unwrap();
        let b = YoungFunction::power(2.0).unwrap();
        assert!(matches!(luxemburg_norm(&f, &b, &q, 1e-9), Err(Error::Domain(_))));
    }

    #[test]
    fn result_satisfies_modular_bound() {
        let m = Arc::new(build_cantor(6).unwrap());
        let f = MuFunction::from_fn(&m, |x| 1.0 + 10.0 * x[0]);
        let q = Cube::new(vec![0.0], 1.0).unwrap();
        let b = YoungFunction::linear_log(1.0).unwrap();
        let lam = luxemburg_norm(&f, &b, &q, 1e-9).unwrap();
        let g: f64 = (0..m.len()).map(|i| b.value(f.value(i) / lam) * m.mass(i)).sum();
        assert!(g <= 1.0);
        let g_below: f64 =
            (0..m.len()).map(|i| b.value(f.value(i) / (lam * (1.0 - 2e-9))) * m.mass(i)).sum();
        assert!(g_below > 1.0);
    }

    #[test]
    fn holder_zero_and_quadratic() {
        let m = lebesgue();
        let q = Cube::new(vec![0.0], 1.0).unwrap();
        let b = YoungFunction::power(2.0).unwrap().with_coef(0.5).unwrap();
        let f = MuFunction::from_fn(&m, |x| x[0]);
        let (l, r) = holder_pair(&f, &MuFunction::zero(&m), &b, &q).unwrap();
        assert_eq!((l, r), (0.0, 0.0));
        let g = MuFunction::from_fn(&m, |x| 1.0 - x[0] * x[0]);
        let (l, r) = holder_pair(&f, &g, &b, &q).unwrap();
        assert!(l <= r);
    }

    #[test]
    fn generalized_holder_rejects_bad_triple() {
        // B^-1 C^-1 = t outgrows A^-1 = t^(1/3).
        let a = YoungFunction::power(3.0).unwrap();
        let b = YoungFunction::power(2.0).unwrap();
        let m = lebesgue();
        let q = Cube::new(vec![0.0], 1.0).unwrap();
        let f = MuFunction::constant(&m, 1.0);
        let err = generalized_holder(&f, &f, &a, &b, &b, &q, 1.0).unwrap_err();
        assert!(matches!(err, Error::Hypothesis { ref check, .. } if check == "inverse_product"));
    }
}
