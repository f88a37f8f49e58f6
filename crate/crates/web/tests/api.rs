use pfhodge_web::{analyze_operator, explore_tau, preset_list, q_expansions};

#[test]
fn lists_presets() {
    let v = preset_list();
    assert!(v["operators"].as_array().unwrap().len() >= 4);
    assert_eq!(v["geometry"], serde_json::json!(["quartic", "legendre", "cubic"]));
}

#[test]
fn analyze_cubic_from_dsl() {
    let v = analyze_operator("theta^2 - z*(theta+1/3)*(theta+2/3)", "z").unwrap();
    assert_eq!(v["splitting"], serde_json::json!([0, -1]));
    assert_eq!(v["bundle"]["parabolic_degrees"], serde_json::json!(["1/3", "-1/3"]));
}

#[test]
fn analyze_rejects_garbage() {
    assert!(analyze_operator("theta^2 +* z", "z").is_err());
}

#[test]
fn qexp_with_expression() {
    let v = q_expansions("4", 6, "A^2 - B^2").unwrap();
    assert_eq!(v["r"], 2);
    assert!(!v["expression"]["terms"].as_array().unwrap().is_empty());
}

#[test]
fn explore_legendre() {
    let v = explore_tau("legendre", "2i", "1", 30, 128).unwrap();
    assert!(v["max_residual"].as_f64().unwrap() < 1e-8);
}
