mod common;

use extremaldep::dependence::{
    coefficient_report, df_bounds, extremal_coefficient, pair_coefficient, test_independence,
    test_total_dependence, theta_bounds, DEFAULT_TOL,
};
use extremaldep::models::{iid_product_model, max_ar_model, three_dependent_gamma, three_dependent_model};
use extremaldep::{Error, Margin, ModelSpec, PartitionSpec, TauVector, Verdict};

fn tau(v: &[f64]) -> TauVector {
    TauVector::new(v.to_vec()).unwrap()
}

fn part(s: &str) -> PartitionSpec {
    s.parse().unwrap()
}

fn assert_close(got: f64, want: f64) {
    assert!((got - want).abs() <= 1e-12, "got {got}, want {want}");
}

/// γ from the limit of n(1 − T(u_n)) with `H(u_{n,j}) = 1 − τ_j/n`, done
/// numerically at a large n.
fn gamma_from_t(t: &[f64]) -> f64 {
    let n = 1e9;
    let h: Vec<f64> = t.iter().map(|v| 1.0 - v / n).collect();
    n * (1.0 - common::t_df(h[0], h[1], h[2]))
}

#[test]
fn gamma_matches_joint_df_limit() {
    let points = [
        [1.0, 1.0, 1.0],
        [2.0, 1.0, 0.5],
        [0.5, 2.0, 1.0],
        [0.3, 0.2, 1.7],
        [1.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [4.0, 0.1, 4.0],
    ];
    for p in points {
        let direct = gamma_from_t(&p);
        assert!(
            (three_dependent_gamma(&p) - direct).abs() < 1e-6,
            "{p:?}: {direct}"
        );
    }
}

#[test]
fn gamma_examples() {
    assert_close(
        three_dependent_model().gamma(&tau(&[1.0, 1.0, 1.0])).unwrap(),
        2.5,
    );
    assert_close(
        max_ar_model(2, 1).unwrap().gamma(&tau(&[1.0, 2.0, 1.0])).unwrap(),
        3.0,
    );
    for m in [
        three_dependent_model(),
        max_ar_model(2, 1).unwrap(),
        iid_product_model(3).unwrap(),
    ] {
        assert_close(m.gamma(&tau(&[0.7, 0.0, 0.0])).unwrap(), 0.7);
        assert_eq!(m.gamma(&tau(&[0.0, 0.0, 0.0])).unwrap(), 0.0);
    }
    let err = three_dependent_model().gamma(&tau(&[1.0, 1.0])).unwrap_err();
    assert!(matches!(err, Error::DimensionMismatch { expected: 3, got: 2 }));
}

#[test]
fn theta_examples() {
    let m = three_dependent_model();
    assert_close(m.theta(&tau(&[1.0, 1.0, 1.0])).unwrap(), 0.3);
    assert_close(m.theta(&tau(&[5.0, 5.0, 5.0])).unwrap(), 0.3);
    assert!(m
        .theta(&tau(&[1.0, 2.0, 3.0]))
        .unwrap_err()
        .is_insufficient_data());
    assert!(!m
        .theta(&tau(&[0.0, 0.0, 0.0]))
        .unwrap_err()
        .is_insufficient_data());
    assert_close(
        iid_product_model(3)
            .unwrap()
            .theta(&tau(&[0.2, 3.0, 1.0]))
            .unwrap(),
        1.0,
    );
    assert_close(
        max_ar_model(1, 1).unwrap().theta(&tau(&[1.0, 1.0])).unwrap(),
        0.75,
    );
}

#[test]
fn distribution_function_examples() {
    let m = three_dependent_model();
    let ones = TauVector::ones(3);
    assert!((m.attractor_df(&ones).unwrap() - 0.082085).abs() < 1e-6);
    assert!((m.limit_df(&ones).unwrap() - 0.472367).abs() < 1e-6);
    assert_close(m.attractor_df(&tau(&[1.0, 0.0, 0.0])).unwrap(), (-1.0f64).exp());
    let ar = max_ar_model(1, 1).unwrap();
    assert!((ar.attractor_df(&TauVector::ones(2)).unwrap() - 0.135335).abs() < 1e-6);
    assert!((ar.limit_df(&TauVector::ones(2)).unwrap() - 0.223130).abs() < 1e-6);
    let iid = iid_product_model(3).unwrap();
    let t = tau(&[0.4, 1.2, 0.1]);
    assert_eq!(iid.limit_df(&t).unwrap(), iid.attractor_df(&t).unwrap());
}

#[test]
fn marginalize_examples() {
    let m = three_dependent_model();
    let m12 = m.marginalize(&[0, 1]).unwrap();
    assert_close(m12.gamma(&tau(&[1.0, 1.0])).unwrap(), 2.0);
    assert_close(m12.gamma(&tau(&[0.3, 1.1])).unwrap(), 1.4);
    assert_close(m12.theta(&tau(&[1.0, 1.0])).unwrap(), 0.375);
    let m3 = m.marginalize(&[2]).unwrap();
    assert_close(m3.theta(&tau(&[1.0])).unwrap(), 0.75);
    let same = m.marginalize(&[0, 1, 2]).unwrap();
    assert_eq!(
        same.gamma(&tau(&[0.3, 0.2, 1.7])).unwrap(),
        m.gamma(&tau(&[0.3, 0.2, 1.7])).unwrap()
    );
    assert!(m.marginalize(&[]).is_err());
}

#[test]
fn stability_and_homogeneity_examples() {
    let e1 = (-1.0f64).exp();
    assert!(three_dependent_model()
        .check_stability(2.0, &[e1, e1, e1], 1e-12)
        .unwrap());
    assert!(max_ar_model(2, 1)
        .unwrap()
        .check_stability(0.5, &[0.9, 0.8, 0.7], 1e-12)
        .unwrap());
    assert!(iid_product_model(2)
        .unwrap()
        .check_stability(3.7, &[0.2, 0.99], 1e-12)
        .unwrap());
    assert!(three_dependent_model()
        .check_stability(0.0, &[0.5, 0.5, 0.5], 1e-12)
        .is_err());
    assert!(three_dependent_model()
        .check_stability(1.0, &[0.0, 0.5, 0.5], 1e-12)
        .is_err());

    let h = three_dependent_model()
        .check_homogeneity(3.0, &TauVector::ones(3), 1e-12)
        .unwrap();
    assert!(h.gamma_order_one && h.theta_order_zero == Some(true));
    let h = max_ar_model(1, 1)
        .unwrap()
        .check_homogeneity(0.25, &tau(&[2.0, 2.0]), 1e-12)
        .unwrap();
    assert!(h.gamma_order_one && h.theta_order_zero == Some(true));
    let h = three_dependent_model()
        .check_homogeneity(2.0, &tau(&[1.0, 2.0, 3.0]), 1e-12)
        .unwrap();
    assert!(h.gamma_order_one && h.theta_order_zero.is_none());
}

#[test]
fn coefficient_examples() {
    let m = three_dependent_model();
    assert_close(extremal_coefficient(&m).unwrap(), 0.75);
    assert_close(extremal_coefficient(&m.associated_iid()).unwrap(), 2.5);
    assert_close(extremal_coefficient(&iid_product_model(4).unwrap()).unwrap(), 4.0);
    assert_close(pair_coefficient(&m, &part("1,2|3")).unwrap(), 0.5);
    assert_close(
        pair_coefficient(&m.associated_iid(), &part("1,2|3")).unwrap(),
        5.0 / 6.0,
    );
    for (p, q) in [(1, 1), (2, 3), (4, 1)] {
        let ar = max_ar_model(p, q).unwrap();
        assert_close(
            pair_coefficient(&ar, &PartitionSpec::canonical(p, q).unwrap()).unwrap(),
            1.0,
        );
    }
}

#[test]
fn bound_examples() {
    let e = std::f64::consts::E;
    let iid = iid_product_model(2).unwrap();
    let ones2 = TauVector::ones(2);
    let (lo, hi) = df_bounds(&iid, &part("1|2"), &ones2).unwrap();
    assert_close(lo, e.powi(-2));
    assert_close(hi, e.powi(-1));
    assert_close(iid.limit_df(&ones2).unwrap(), lo);
    let (lo, hi) = theta_bounds(&iid, &part("1|2"), &ones2).unwrap();
    assert_close(lo, 0.5);
    assert_close(hi, 1.0);

    let m = three_dependent_model();
    let ones3 = TauVector::ones(3);
    let (lo, hi) = df_bounds(&m, &part("1,2|3"), &ones3).unwrap();
    assert_close(lo, (-1.5f64).exp());
    assert_close(hi, (-0.75f64).exp());
    assert_close(m.limit_df(&ones3).unwrap(), hi);
    let (lo, hi) = theta_bounds(&m, &part("1,2|3"), &ones3).unwrap();
    assert_close(lo, 0.3);
    assert_close(hi, 0.6);

    let ar = max_ar_model(2, 1).unwrap();
    let (_, hi) = theta_bounds(&ar, &part("1,2|3"), &ones3).unwrap();
    assert_close(hi, 0.75);
    assert_close(ar.theta(&ones3).unwrap(), 0.75);
}

#[test]
fn verdict_examples() {
    let m = three_dependent_model();
    assert_eq!(test_independence(&m, &part("1,2|3"), DEFAULT_TOL), Verdict::No);
    let t = test_total_dependence(&m, &part("1,2|3"), DEFAULT_TOL);
    assert_eq!(t.verdict, Verdict::Yes);
    assert_eq!(t.witness_tau.unwrap().as_slice(), &[1.0, 1.0, 1.0]);
    assert_close(t.d.unwrap(), 0.75);

    let ar = max_ar_model(2, 2).unwrap();
    assert_eq!(
        test_independence(&ar, &part("1,2|3,4"), DEFAULT_TOL),
        Verdict::Yes
    );
    let ar = max_ar_model(1, 1).unwrap();
    assert_eq!(
        test_total_dependence(&ar, &part("1|2"), DEFAULT_TOL).verdict,
        Verdict::No
    );

    let iid = iid_product_model(4).unwrap();
    for split in ["1|2,3,4", "1,3|2,4", "1,2,3|4"] {
        assert_eq!(test_independence(&iid, &part(split), DEFAULT_TOL), Verdict::Yes);
    }
    assert_eq!(
        test_total_dependence(&iid_product_model(2).unwrap(), &part("1|2"), DEFAULT_TOL).verdict,
        Verdict::No
    );
}

#[test]
fn report_for_three_dependent() {
    let m = three_dependent_model();
    let r = coefficient_report(&m, &part("1,2|3"), &TauVector::ones(3), DEFAULT_TOL).unwrap();
    assert!(r.is_fully_determined());
    assert_eq!(r.verdict_independent, Verdict::No);
    assert_eq!(r.verdict_total_dep, Verdict::Yes);
    assert_close(r.pair_epsilon.unwrap(), 0.5);
    assert_close(r.pair_epsilon_hat, 5.0 / 6.0);
    let (ep, eq) = (r.epsilon_p.unwrap(), r.epsilon_q.unwrap());
    // pair ε lies in [max/sum, 1]
    assert!(r.pair_epsilon.unwrap() >= ep.max(eq) / (ep + eq) - 1e-12);
    let json = serde_json::to_value(&r).unwrap();
    assert_eq!(json["verdict_independent"], "no");
    assert_eq!(json["verdict_total_dep"], "yes");
    assert_eq!(json["partition"], "1,2|3");
}

#[test]
fn model_spec_joint_cdf_matches_t() {
    let margin = Margin::StandardUniform;
    for h in [
        [0.9, 0.9, 0.9],
        [0.9, 0.8, 0.95],
        [0.2, 0.99, 0.5],
        [1.0, 0.3, 0.3],
    ] {
        let q = ModelSpec::ThreeDependent.joint_cdf(margin, &h).unwrap();
        assert!((q - common::t_df(h[0], h[1], h[2])).abs() < 1e-15, "{h:?}");
    }
}
