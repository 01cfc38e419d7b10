use std::sync::Arc;

use proptest::prelude::*;

use radfrac::cubes::Cube;
use radfrac::measure::{
    build_cantor, build_gaussian_1d, build_lebesgue, cantor_dimension, cantor_intervals, triadic_intervals,
    AtomicMeasure, MuFunction,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lebesgue_mass_of_aligned_cubes(d in 1usize..3, h_exp in 2i32..6, k in 0i32..3, seed in 0u64..1000) {
        let h = 2f64.powi(-h_exp);
        let m = build_lebesgue(d, &Cube::new(vec![0.0; d], 1.0).unwrap(), h).unwrap();
        prop_assert!((m.total_mass() - 1.0).abs() < 1e-12);
        let k = k.min(h_exp);
        let idx: Vec<i64> = (0..d).map(|a| ((seed >> (4 * a)) % (1 << k)) as i64).collect();
        let q = Cube::dyadic(k, &idx);
        prop_assert!((m.mu_of(&q) - q.side().powi(d as i32)).abs() < 1e-12);
        prop_assert_eq!(m.ahlfors_n(), d as f64);
    }

    #[test]
    fn atom_text_round_trip(levels in 1u32..6, v in proptest::collection::vec(-1e3f64..1e3, 64)) {
        let m = build_cantor(levels).unwrap();
        let vals: Vec<f64> = (0..m.len()).map(|i| v[i % v.len()]).collect();
        let text = m.to_atom_text(Some(&vals)).unwrap();
        let (back, got) = AtomicMeasure::from_atom_text(&text, "cantor").unwrap();
        prop_assert_eq!(back.len(), m.len());
        prop_assert_eq!(back.masses(), m.masses());
        prop_assert_eq!(back.points(), m.points());
        prop_assert_eq!(got.unwrap(), vals);
    }

    #[test]
    fn integral_is_additive_over_children(k in 0i32..4, i in 0i64..8) {
        let m = Arc::new(build_lebesgue(1, &Cube::new(vec![0.0], 1.0).unwrap(), 2f64.powi(-7)).unwrap());
        let f = MuFunction::from_fn(&m, |x| (3.0 * x[0]).cos());
        let q = Cube::dyadic(k, &[i % (1 << k)]);
        let parts: f64 = q.children().iter().map(|c| f.integrate(c)).sum();
        prop_assert!((parts - f.integrate(&q)).abs() < 1e-13);
    }
}

#[test]
fn cantor_masses_and_growth() {
    let m = build_cantor(9).unwrap();
    assert_eq!(m.len(), 512);
    assert_eq!(m.total_mass(), 1.0);
    assert!((m.ahlfors_n() - cantor_dimension()).abs() < 1e-15);
    for j in 0..=6 {
        let ints = cantor_intervals(j);
        assert_eq!(ints.len(), 1 << j);
        for q in &ints {
            assert_eq!(m.mu_of(q), 2f64.powi(-(j as i32)));
        }
    }
    let upper = m.check_upper_ahlfors(&triadic_intervals(6)).unwrap();
    assert!(upper.ratio <= 1.0 + 1e-9);
    // Lower gap: exact on Cantor intervals, large on dyadic cubes.
    let gap = m.ahlfors_gap(&cantor_intervals(5)).unwrap();
    assert!((gap.ratio - 1.0).abs() < 1e-9);
    let dyadic = m.ahlfors_gap(&m.occupied_dyadic_cubes(0, 8)).unwrap();
    assert!(dyadic.ratio > 2.0);
}

#[test]
fn gaussian_weights() {
    let h = 2f64.powi(-8);
    let m = build_gaussian_1d(&Cube::new(vec![-8.0], 16.0).unwrap(), h).unwrap();
    assert!((m.total_mass() - std::f64::consts::PI.sqrt()).abs() < 1e-6);
    for i in [0, m.len() / 2, m.len() - 1] {
        let x = m.point(i)[0];
        assert!((m.mass(i) - (-x * x).exp() * h).abs() <= 1e-15 * (1.0 + m.mass(i)));
    }
}

#[test]
fn bad_constructions_are_rejected() {
    assert!(build_lebesgue(2, &Cube::new(vec![0.0], 1.0).unwrap(), 0.1).is_err());
    assert!(build_lebesgue(1, &Cube::new(vec![0.0], 1.0).unwrap(), 0.0).is_err());
    assert!(AtomicMeasure::from_atom_text("not an atom file", "x").is_err());
}
