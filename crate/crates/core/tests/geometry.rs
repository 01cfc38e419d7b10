use std::sync::Arc;

use proptest::prelude::*;

use radfrac::cubes::{find_dyadic_majorant, generation_of, Cube};
use radfrac::luxemburg::luxemburg_norm;
use radfrac::measure::{build_cantor, build_lebesgue, AtomicMeasure, MuFunction};
use radfrac::young::YoungFunction;

fn lebesgue(d: usize, h_exp: i32) -> Arc<AtomicMeasure> {
    let bbox = Cube::new(vec![0.0; d], 1.0).unwrap();
    Arc::new(build_lebesgue(d, &bbox, 2f64.powi(-h_exp)).unwrap())
}

fn measure_for(which: u8) -> Arc<AtomicMeasure> {
    match which % 3 {
        0 => lebesgue(1, 7),
        1 => lebesgue(2, 4),
        _ => Arc::new(build_cantor(6).unwrap()),
    }
}

fn young_for(which: u8) -> YoungFunction {
    match which % 3 {
        0 => YoungFunction::power(1.0).unwrap(),
        1 => YoungFunction::power(2.5).unwrap(),
        _ => YoungFunction::linear_log(1.0).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn majorant_replays(
        which in 0u8..3,
        yb in 0u8..3,
        seed in proptest::collection::vec(-2.0f64..2.0, 128),
        corner in 0.0f64..1.0,
        corner2 in 0.0f64..1.0,
        side_exp in 0.0f64..4.0,
        alpha_frac in 0.0f64..0.99,
        t_frac in 0.05f64..0.999,
    ) {
        let m = measure_for(which);
        let b = young_for(yb);
        let values: Vec<f64> = (0..m.len()).map(|i| seed[i % seed.len()]).collect();
        let f = MuFunction::new(Arc::clone(&m), values).unwrap();
        let side = 2f64.powf(-side_exp);
        let c: Vec<f64> = [corner, corner2][..m.dim()].iter().map(|&u| u * (1.0 - side)).collect();
        let q = Cube::new(c, side).unwrap();
        prop_assume!(m.mu_of(&q) > 0.0);
        let alpha = alpha_frac * m.ahlfors_n();
        let val = side.powf(alpha) * luxemburg_norm(&f, &b, &q, 1e-10).unwrap();
        prop_assume!(val > 0.0);
        let t = t_frac * val;
        let cover = find_dyadic_majorant(&q, &f, &b, alpha, t).unwrap();
        prop_assert_eq!(generation_of(cover.p.side()).unwrap(), generation_of(q.side()).unwrap());
        prop_assert!(cover.p.dilate(3.0).unwrap().contains_cube(&q));
        prop_assert!(cover.witness_value > cover.beta * t);
        let again = find_dyadic_majorant(&q, &f, &b, alpha, t).unwrap();
        prop_assert_eq!(again, cover);
    }

    #[test]
    fn dyadic_parent_contains_children(k in -3i32..12, i in -50i64..50, j in -50i64..50) {
        let p = Cube::dyadic(k, &[i, j]);
        let kids = p.children();
        prop_assert_eq!(kids.len(), 4);
        for c in &kids {
            prop_assert!(p.contains_cube(c));
            prop_assert_eq!(generation_of(c.side()).unwrap(), k + 1);
        }
        for a in 0..4 {
            for b in (a + 1)..4 {
                prop_assert!(!kids[a].interiors_meet(&kids[b]));
            }
        }
    }
}

#[test]
fn majorant_rejects_small_value() {
    let m = lebesgue(1, 6);
    let f = MuFunction::constant(&m, 1.0);
    let q = Cube::new(vec![0.25], 0.25).unwrap();
    let b = YoungFunction::power(1.0).unwrap();
    assert!(find_dyadic_majorant(&q, &f, &b, 0.0, 2.0).is_err());
    assert!(find_dyadic_majorant(&q, &f, &b, 0.0, 0.0).is_err());
}

#[test]
fn dyadic_input_is_its_own_majorant() {
    let m = lebesgue(1, 6);
    let f = MuFunction::from_fn(&m, |x| 1.0 + x[0]);
    let q = Cube::dyadic(2, &[1]);
    let b = YoungFunction::power(2.0).unwrap();
    let cover = find_dyadic_majorant(&q, &f, &b, 0.5, 0.1).unwrap();
    assert_eq!(cover.p, q);
    assert_eq!(cover.beta, 0.25);
}
