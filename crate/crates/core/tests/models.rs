use pinchlab::models::{
    comparison_table, literature_constants, model, pinching_threshold, shipped_models,
    soliton_identity_check,
};
use pinchlab::{Error, Rational, Scalar};

#[test]
fn aliases_resolve_to_the_same_geometry() {
    for (a, b) in [
        ("cp2", "fubini_study_cp2"),
        ("s3xr", "round_cylinder_s3xr(1)"),
        ("s2xs2", "product_spheres(1,1)"),
        ("sphere", "sphere(4,1)"),
        ("flat", "flat(4,0.5)"),
    ] {
        assert_eq!(model(a).unwrap().rm, model(b).unwrap().rm, "{a} vs {b}");
    }
}

#[test]
fn unknown_names_are_rejected() {
    assert!(matches!(model("k3"), Err(Error::UnknownModel(_))));
    assert!(model("sphere(4,1,2)").is_err());
}

#[test]
fn higher_dimensional_spheres() {
    for n in 3..=7 {
        let m = model(&format!("sphere({n},1/2)")).unwrap();
        let t = pinching_threshold(&m, None).unwrap();
        let expected = Rational::from_ratio(1, (n * (n - 1)) as i64);
        assert_eq!(t.exact_ratio, Some(expected.to_string()));
        for c in soliton_identity_check(&m).unwrap() {
            assert!(c.holds(), "{n}: {c:?}");
        }
    }
}

#[test]
fn sampling_oracle_brackets_the_optimizer() {
    let m = model("cp2").unwrap();
    let t = pinching_threshold(&m, Some(200_000)).unwrap();
    let (opt, sampled) = (t.ratio.unwrap(), t.oracle_ratio.unwrap());
    assert!(sampled >= opt - 1e-12);
    assert!(sampled - opt < 1e-3);
}

#[test]
fn table_flags_only_einstein_models_above_the_soliton_constant() {
    let mut models = shipped_models();
    models.push(model("product_spheres(1,3)").unwrap());
    let doc = comparison_table(&models).unwrap();
    for row in doc["models"].as_array().unwrap() {
        if row["meets"]["soliton"] == serde_json::json!(true) {
            assert_eq!(row["einstein"], serde_json::json!(true), "{row}");
        }
    }
    let soliton = literature_constants().iter().find(|c| c.key == "soliton").unwrap().value;
    assert_eq!(soliton, 1.0 / 24.0);
}

#[test]
fn uneven_products_have_no_closed_form_potential() {
    let m = model("product_spheres(1,3)").unwrap();
    assert!(!m.einstein);
    assert!(matches!(soliton_identity_check(&m), Err(Error::NoClosedFormPotential(_))));
    assert_eq!(Scalar::to_f64(&m.scalar()), 8.0);
}
