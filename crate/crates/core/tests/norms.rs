use std::sync::Arc;

use proptest::prelude::*;

use radfrac::cubes::Cube;
use radfrac::luxemburg::{luxemburg_norm, radial_average};
use radfrac::measure::{build_cantor, build_lebesgue, AtomicMeasure, MuFunction};
use radfrac::young::YoungFunction;

fn line(corner: f64, side: f64, h: f64) -> Arc<AtomicMeasure> {
    Arc::new(build_lebesgue(1, &Cube::new(vec![corner], side).unwrap(), h).unwrap())
}

fn young_for(which: u8) -> YoungFunction {
    match which % 4 {
        0 => YoungFunction::power(1.0).unwrap(),
        1 => YoungFunction::power(3.0).unwrap(),
        2 => YoungFunction::linear_log(1.0).unwrap(),
        _ => YoungFunction::power_log(1.5, 1.0).unwrap(),
    }
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-4.0f64..4.0, 64)
}

const TOL: f64 = 1e-11;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn homogeneous(v in values(), c in -5.0f64..5.0, yb in 0u8..4, k in 0i32..4, i in 0i64..4) {
        let m = line(0.0, 1.0, 2f64.powi(-6));
        let f = MuFunction::new(Arc::clone(&m), v).unwrap();
        let q = Cube::dyadic(k, &[i.min((1 << k) - 1)]);
        let b = young_for(yb);
        let base = luxemburg_norm(&f, &b, &q, TOL).unwrap();
        let scaled = luxemburg_norm(&f.scale(c), &b, &q, TOL).unwrap();
        prop_assert!((scaled - c.abs() * base).abs() <= 1e-8 * (1.0 + c.abs() * base));
    }

    #[test]
    fn monotone(v in values(), w in values(), yb in 0u8..4) {
        let m = line(0.0, 1.0, 2f64.powi(-6));
        let f = MuFunction::new(Arc::clone(&m), v).unwrap();
        let g = f.abs().add(&MuFunction::new(Arc::clone(&m), w).unwrap().abs()).unwrap();
        let q = Cube::new(vec![0.0], 1.0).unwrap();
        let b = young_for(yb);
        let nf = luxemburg_norm(&f, &b, &q, TOL).unwrap();
        let ng = luxemburg_norm(&g, &b, &q, TOL).unwrap();
        prop_assert!(nf <= ng * (1.0 + 1e-9));
    }

    #[test]
    fn between_average_and_sup_for_powers(v in values(), p in 1.0f64..6.0) {
        let m = line(0.0, 1.0, 2f64.powi(-6));
        let f = MuFunction::new(Arc::clone(&m), v).unwrap();
        let q = Cube::new(vec![0.0], 1.0).unwrap();
        let b = YoungFunction::power(p).unwrap();
        let n = luxemburg_norm(&f, &b, &q, TOL).unwrap();
        prop_assert!(radial_average(&f, &q) <= n * (1.0 + 1e-9));
        prop_assert!(n <= f.max_abs() * (1.0 + 1e-9));
    }

    /// Moving the picture by a dyadic translation and dilation leaves the
    /// norm unchanged when `B` is a power.
    #[test]
    fn invariant_under_dyadic_similarity(v in values(), p in 1.0f64..4.0, shift in -3i32..3, zoom in -2i32..3) {
        let s = 2f64.powi(zoom);
        let a = line(0.0, 1.0, 2f64.powi(-6));
        let b_m = line(shift as f64, s, s * 2f64.powi(-6));
        let f = MuFunction::new(Arc::clone(&a), v.clone()).unwrap();
        let g = MuFunction::new(Arc::clone(&b_m), v).unwrap();
        let y = YoungFunction::power(p).unwrap();
        let na = luxemburg_norm(&f, &y, &Cube::new(vec![0.25], 0.5).unwrap(), TOL).unwrap();
        let nb = luxemburg_norm(&g, &y, &Cube::new(vec![shift as f64 + 0.25 * s], 0.5 * s).unwrap(), TOL).unwrap();
        prop_assert!((na - nb).abs() <= 1e-9 * (1.0 + na));
    }

    /// A larger Young function gives a larger norm.
    #[test]
    fn ordered_by_young_function(v in values(), p in 1.0f64..3.0, dp in 0.1f64..3.0) {
        let m = line(0.0, 1.0, 2f64.powi(-6));
        let f = MuFunction::new(Arc::clone(&m), v).unwrap();
        let q = Cube::dyadic(1, &[0]);
        let lo = luxemburg_norm(&f, &YoungFunction::power(p).unwrap(), &q, TOL).unwrap();
        let hi = luxemburg_norm(&f, &YoungFunction::power(p + dp).unwrap(), &q, TOL).unwrap();
        prop_assert!(lo <= hi * (1.0 + 1e-9));
    }
}

#[test]
fn indicator_on_cantor_interval() {
    // On a Cantor interval μ(Q) = l(Q)^n, so ‖1‖_{B,Q} = 1 / B^{-1}(1).
    let m = Arc::new(build_cantor(8).unwrap());
    let one = MuFunction::constant(&m, 1.0);
    for q in radfrac::measure::cantor_intervals(3) {
        for yb in 0..4 {
            let b = young_for(yb);
            let n = luxemburg_norm(&one, &b, &q, TOL).unwrap();
            let want = 1.0 / b.inverse(1.0).unwrap();
            assert!((n - want).abs() < 1e-9 * want, "{q} {b}: {n} vs {want}");
        }
    }
}

#[test]
fn zero_function_has_zero_norm() {
    let m = line(0.0, 1.0, 2f64.powi(-5));
    let z = MuFunction::zero(&m);
    let q = Cube::new(vec![0.0], 1.0).unwrap();
    assert_eq!(luxemburg_norm(&z, &YoungFunction::power(2.0).unwrap(), &q, TOL).unwrap(), 0.0);
}
