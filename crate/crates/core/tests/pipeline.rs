use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use chsh_core::expose::{certify_exposed, Verdict};
use chsh_core::extremality::{extremality_report, realizations_from_point, Method};
use chsh_core::families::{
    double_tilted_functional, double_tilted_solve, wolfe_yelin_extended_point, wolfe_yelin_solve, DoubleTiltedParams,
    WolfeYelinParams,
};
use chsh_core::polytope::{local_value, max_chsh};
use chsh_core::scan::compare;
use chsh_core::spectrum::maximize_quantum_value;
use chsh_core::{Functional, ProbabilityPoint, Realization};

#[test]
fn double_tilted_point_is_self_consistent() {
    let p = DoubleTiltedParams::new(0.8, 0.6).unwrap();
    let sol = double_tilted_solve(&p).unwrap();
    assert!(sol.admissible);
    let r = sol.realization.unwrap();
    let f = double_tilted_functional(&p);
    assert!((f.value(&r.point()) - sol.beta_q).abs() < 1e-9);
    assert!((local_value(&f).beta_l - sol.beta_l).abs() < 1e-12);
    let m = maximize_quantum_value(&f, 64, 1e-10).unwrap();
    assert!((m.beta_max - sol.beta_q).abs() < 1e-9);
    assert!(m.point.distance(&r.point()) < 1e-6);

    let report = extremality_report(&r, Method::Both);
    assert!(report.extremal());
    assert_eq!(report.agreement, Some(true));
    assert_eq!(certify_exposed(&r).verdict, Verdict::ProvenExposed);
}

#[test]
fn reconstructed_realisations_get_the_same_verdicts() {
    let r = Realization::new(1.2, 0.3, 1.9, -0.4, 1.1).unwrap();
    let base = extremality_report(&r, Method::Both);
    for q in realizations_from_point(&r.point()).unwrap() {
        assert!(q.point().distance(&r.point()) < 1e-9);
        assert_eq!(extremality_report(&q, Method::Both).extremal(), base.extremal());
    }
}

#[test]
fn wolfe_yelin_extended_points_beyond_the_local_bound() {
    let p = WolfeYelinParams::new(0.3, 0.9).unwrap();
    let sol = wolfe_yelin_solve(&p).unwrap();
    let point = wolfe_yelin_extended_point(&p).unwrap();
    if sol.admissible {
        assert!(sol.point.unwrap().distance(&point) < 1e-12);
    }
    assert!(max_chsh(&point) > 2.0);
}

#[test]
fn proven_exposed_samples_are_judged_extremal() {
    let (rows, summary) = compare(5, 300, true);
    assert_eq!(summary.samples, rows.len());
    assert_eq!(summary.disagreements, 0);
    assert_eq!(summary.proven_exposed, summary.proven_exposed_extremal);
    assert!(summary.proven_exposed > 0);
    for r in rows.iter().filter(|r| r.certificate == "PROVEN-EXPOSED") {
        assert!(r.nonlocal && r.i_max > 1.0);
    }
}

#[test]
fn json_shapes() {
    let p = Realization::new(FRAC_PI_2, 0.0, FRAC_PI_2, FRAC_PI_4, -FRAC_PI_4)
        .unwrap()
        .point();
    let v: serde_json::Value = serde_json::to_value(p).unwrap();
    assert_eq!(v["marginals"].as_array().unwrap().len(), 4);
    assert_eq!(v["correlators"].as_array().unwrap().len(), 4);
    let back: ProbabilityPoint = serde_json::from_value(v).unwrap();
    assert!(back.distance(&p) < 1e-15);

    let f: Functional = serde_json::from_str(r#"{"coeffs":[0,0,0,0,1,1,1,-1]}"#).unwrap();
    assert_eq!(f, Functional::chsh());
    assert!(serde_json::from_str::<Realization>(r#"{"theta":2.0,"a0":0,"a1":0,"b0":0,"b1":0}"#).is_err());

    let cert = serde_json::to_value(certify_exposed(
        &Realization::new(FRAC_PI_2, 0.0, FRAC_PI_2, FRAC_PI_4, -FRAC_PI_4).unwrap(),
    ))
    .unwrap();
    assert_eq!(cert["verdict"], "PROVEN-EXPOSED");
    assert_eq!(cert["status"], "exposed-candidate");
    assert!(cert["round_trip_distance"].as_f64().unwrap() < 1e-6);
    assert_eq!(cert["unique"], true);
}
