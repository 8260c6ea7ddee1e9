use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use srg_cert::linalg::CMatrix;
use srg_cert::oracle::{
    closed_loop, closed_loop_poles, equivalence_experiment, is_closed_loop_stable, soundness_experiment, Agreement,
    Ensemble, ExperimentConfig,
};
use srg_cert::ratfun::{bundled_model, realize, StateSpaceModel};
use srg_cert::separation::Method;

fn gain(k: f64) -> StateSpaceModel {
    StateSpaceModel::gain(DMatrix::from_element(1, 1, k)).unwrap()
}

fn lag(a: f64) -> StateSpaceModel {
    // 1 / (s + a)
    StateSpaceModel::new(
        DMatrix::from_element(1, 1, -a),
        DMatrix::from_element(1, 1, 1.0),
        DMatrix::from_element(1, 1, 1.0),
        DMatrix::zeros(1, 1),
    )
    .unwrap()
}

#[test]
fn bundled_pair_is_closed_loop_stable() {
    let h1 = realize(&bundled_model("h1").unwrap());
    let h2 = realize(&bundled_model("h2").unwrap());
    let v = is_closed_loop_stable(&h1, &h2).unwrap();
    assert!(v.stable);
    assert!(v.abscissa < 0.0);
    assert_eq!(closed_loop_poles(&h1, &h2).unwrap().len(), h1.order() + h2.order());
}

#[test]
fn first_order_loop_poles_are_exact() {
    for k in [-0.5, 0.5, 1.0, 2.0] {
        let poles = closed_loop_poles(&lag(1.0), &gain(k)).unwrap();
        assert_eq!(poles.len(), 1);
        assert!((poles[0] - C::new(-1.0 - k, 0.0)).norm() < 1e-12);
    }
    assert!(!is_closed_loop_stable(&lag(1.0), &gain(-2.0)).unwrap().stable);
}

#[test]
fn closed_loop_response_is_the_feedback_formula() {
    let gen = Ensemble::new(31, 20, 2, 5);
    for (h1, h2) in gen.pairs() {
        let Ok(cl) = closed_loop(&h1, &h2) else { continue };
        for w in [0.0, 0.3, 7.0] {
            let (r1, r2) = (h1.response(w).unwrap(), h2.response(w).unwrap());
            let expected = &r1 * (CMatrix::identity(2, 2) + &r2 * &r1).try_inverse().unwrap();
            let got = cl.response(w).unwrap();
            assert!((got - &expected).norm() <= 1e-8 * expected.norm().max(1.0));
        }
    }
}

#[test]
fn soundness_holds_for_every_method() {
    for method in Method::ALL {
        let mut cfg = ExperimentConfig::screening();
        cfg.sweep.method = method;
        let r = soundness_experiment(&Ensemble::new(32, 30, 2, 5), &cfg).unwrap();
        assert_eq!(r.violations, 0, "{method}: {:?}", r.violating_indices);
        assert_eq!(r.certified + r.missed + (r.count - r.oracle_stable) - r.violations, r.count);
    }
}

#[test]
fn equivalence_report_accounts_for_every_pair() {
    let gen = Ensemble::new(33, 12, 2, 4);
    let cfg = ExperimentConfig::screening();
    let r = equivalence_experiment(&gen, &cfg).unwrap();
    assert_eq!(r.count, 12);
    assert_eq!(r.agree + r.disagree + r.dead_band + r.skipped_noninvertible, r.count);
    assert_eq!(r.records.len(), r.count);
    assert_eq!(r.unsound, 0);
    for rec in &r.worst_cases {
        assert!(matches!(rec.class, Agreement::Disagree | Agreement::DeadBand));
    }
    let json: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
    for key in ["seed", "count", "agree", "disagree", "dead_band", "skipped_noninvertible", "worst_cases"] {
        assert!(json.get(key).is_some(), "{key}");
    }
    // pairs are independent of scheduling and of the ensemble size
    let again = equivalence_experiment(&gen, &cfg).unwrap();
    assert_eq!(again, r);
    let longer = equivalence_experiment(&Ensemble { count: 14, ..gen.clone() }, &cfg).unwrap();
    assert_eq!(&longer.records[..12], &r.records[..]);
}
