use radfrac::cubes::Cube;
use radfrac::measure::AtomicMeasure;
use radfrac::verify::{self, pointwise_exponents, ExperimentReport, Group, Verdict};
use radfrac::{Config, Error};

fn cfg(text: &str) -> Config {
    Config::parse(text).unwrap()
}

fn run(id: &str, text: &str) -> radfrac::Result<ExperimentReport> {
    verify::run_experiment(id, &cfg(text), 3, false)
}

const SMALL_LINE: &str = "measure.kind=lebesgue\nmeasure.d=1\nmeasure.resolution=2^-7\n";

fn check_consistent(rep: &ExperimentReport) {
    let main: Vec<_> = rep.samples.iter().filter(|s| s.group == Group::Main).collect();
    assert_eq!(rep.n_main(), main.len());
    let worst = main.iter().map(|s| s.ratio).fold(0.0f64, f64::max);
    assert_eq!(rep.empirical_c, worst, "{}", rep.id);
    for s in &rep.samples {
        assert!(s.lhs != 0.0 || s.rhs != 0.0, "0/0 samples are dropped");
        if s.rhs > 0.0 {
            assert!((s.ratio - s.lhs / s.rhs).abs() <= 1e-12 * s.ratio.abs().max(1.0));
        } else {
            assert!(s.ratio.is_infinite());
        }
    }
    if let (Some(c1), Some(d)) = (rep.empirical_c_refined, rep.refinement_drift) {
        assert!((d - (c1 - rep.empirical_c).abs() / rep.empirical_c).abs() <= 1e-12);
    }
}

#[test]
fn every_experiment_passes_on_a_small_line() {
    for info in verify::registry() {
        let text = match info.id {
            "gaussian_failure" => String::from("gaussian_failure.resolution=2^-10\n"),
            _ => SMALL_LINE.to_string(),
        };
        let rep = run(info.id, &text).unwrap_or_else(|e| panic!("{}: {e}", info.id));
        check_consistent(&rep);
        assert_eq!(rep.verdict, Verdict::Pass, "{}: {:?}", info.id, rep.extras);
    }
}

#[test]
fn cantor_is_not_ahlfors_regular_for_the_wtl_condition() {
    let text = "measure.kind=cantor\nmeasure.levels=6\n";
    for id in ["condition_wtl", "ahlfors_gap"] {
        let rep = run(id, text).unwrap();
        check_consistent(&rep);
        assert_eq!(rep.verdict, Verdict::Pass, "{id}");
        assert_eq!(rep.extra("observed_ahlfors"), Some(0.0));
        assert!(rep.extra("ahlfors_gap_refined").unwrap() > rep.extra("ahlfors_gap").unwrap());
    }
    // Claiming the Cantor measure is regular is refuted.
    let rep = run("condition_wtl", &format!("{text}condition_wtl.expect=ahlfors\n")).unwrap();
    assert_eq!(rep.verdict, Verdict::Fail);
}

#[test]
fn non_submultiplicative_b_is_a_hypothesis_failure() {
    let err = run("two_weight", &format!("{SMALL_LINE}young.B=power:p=2,c=0.5\n")).unwrap_err();
    match err {
        Error::Hypothesis { check, .. } => assert_eq!(check, "check_submultiplicative"),
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn b_outside_bp_is_a_hypothesis_failure() {
    let err = run("lp_bounds", &format!("{SMALL_LINE}young.B=power:p=2\nlp_bounds.p=2\n")).unwrap_err();
    assert!(matches!(err, Error::Hypothesis { ref check, .. } if check == "check_bp"), "{err}");
}

#[test]
fn gaussian_radius_below_atom_spacing_is_a_config_error() {
    let err = run("gaussian_failure", "gaussian_failure.resolution=2^-10\ngaussian_failure.r_min=2^-9\n").unwrap_err();
    assert!(matches!(err, Error::Config(_)), "{err}");
}

#[test]
fn gaussian_at_origin_has_no_gap() {
    let rep = run("gaussian_failure", "gaussian_failure.x=0\ngaussian_failure.resolution=2^-10\n").unwrap();
    assert_eq!(rep.extra("limit"), Some(1.0));
    assert!((rep.extra("f_over_average").unwrap() - 1.0).abs() < 0.01);
    assert_eq!(rep.verdict, Verdict::Pass);
}

#[test]
fn alpha_zero_collapses_exponents() {
    for p in [1.1, 2.0, 7.5] {
        let (q, s) = pointwise_exponents(p, 0.0).unwrap();
        assert!((q - p).abs() < 1e-12 && (s - p).abs() < 1e-12);
    }
    assert!(pointwise_exponents(2.0, 0.5).is_err());
    let rep = run("weak_modular", &format!("{SMALL_LINE}weak_modular.alpha_over_n=0\n")).unwrap();
    assert!(rep.empirical_c.is_finite());
    let err = run("a1", &format!("{SMALL_LINE}a1.alpha_over_n=0\n")).unwrap_err();
    assert!(matches!(err, Error::Config(_)));
}

#[test]
fn single_atom_gives_ratio_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.atoms");
    let m = AtomicMeasure::from_atoms(1, 1.0, vec![0.3], vec![0.25], Cube::new(vec![0.0], 1.0).unwrap(), 2f64.powi(-4), "one")
        .unwrap();
    m.write_atoms(&path, None).unwrap();
    let text = format!("measure.kind=file\nmeasure.path={}\nexp.functions=3\n", path.display());
    let rep = run("a1", &text).unwrap();
    assert!((rep.empirical_c - 1.0).abs() < 1e-12, "{}", rep.empirical_c);
}

#[test]
fn unknown_id_and_stray_keys_are_rejected() {
    assert!(matches!(
        verify::validate_config(&cfg("exp.id=weak_modular,nonsense\n")),
        Err(Error::UnknownExperiment(id)) if id == "nonsense"
    ));
    assert!(matches!(verify::validate_config(&cfg("colour=blue\n")), Err(Error::Config(_))));
    assert!(verify::validate_config(&cfg("exp.id=a1\na1.alpha_over_n=0.5\n")).is_ok());
}

#[test]
fn reports_are_deterministic_in_the_seed() {
    let a = verify::run_experiment("weak_modular", &cfg(SMALL_LINE), 5, false).unwrap();
    let b = verify::run_experiment("weak_modular", &cfg(SMALL_LINE), 5, false).unwrap();
    let c = verify::run_experiment("weak_modular", &cfg(SMALL_LINE), 6, false).unwrap();
    assert_eq!(a.samples, b.samples);
    assert_ne!(a.samples, c.samples);
}

#[test]
fn dump_carries_atoms_and_cubes() {
    let rep = verify::run_experiment("a1", &cfg(SMALL_LINE), 1, true).unwrap();
    let dump = rep.dump.expect("dump requested");
    assert!(dump.cubes_csv.starts_with("atom,value,argmax_cube\n"));
    assert_eq!(dump.cubes_csv.lines().count(), 129);
    assert!(!dump.atoms_text.is_empty());
}
