use rectmix_wasm::{basis_json, kernel_json, solve_json};
use serde_json::Value;

fn parse(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.expect("call failed")).expect("invalid json")
}

#[test]
fn solve_returns_sampled_fields() {
    let v = parse(solve_json(1, 4, 2, "full", 8));
    assert_eq!(v["n"], 4);
    let fields = v["fields"].as_array().unwrap();
    assert_eq!(fields.len(), 5);
    assert!(fields.iter().all(|f| f["values"].as_array().unwrap().len() == 64));
    let e = v["errors"]["displacement"].as_f64().unwrap();
    assert!(e > 0.0 && e < 0.1, "{e}");
}

#[test]
fn traction_problem_solves() {
    let v = parse(solve_json(2, 4, 1, "reduced", 4));
    assert_eq!(v["problem"], 2);
    assert!(v["errors"]["stress"].as_f64().unwrap().is_finite());
}

#[test]
fn basis_function_samples_every_component() {
    let v = parse(basis_json("stress", 1, "full", 0, 6));
    assert_eq!(v["dim"], 10);
    assert_eq!(v["components"].as_array().unwrap().len(), 3);
    assert!(!v["label"].as_str().unwrap().is_empty());
}

#[test]
fn kernel_modes_are_three() {
    let v = parse(kernel_json(2, "full", 4));
    assert_eq!(v["dimension"], 3);
    assert_eq!(v["modes"].as_array().unwrap().len(), 3);
    assert!(v["rigid_motion_angle"].as_f64().unwrap() < 1e-8);
}

#[test]
fn bad_input_is_an_error() {
    assert!(solve_json(3, 4, 2, "full", 8).is_err());
    assert!(solve_json(1, 0, 2, "full", 8).is_err());
    assert!(solve_json(1, 4, 2, "mixed", 8).is_err());
    assert!(solve_json(1, 4, 7, "full", 8).is_err());
    assert!(basis_json("stress", 1, "full", 10, 6).is_err());
    assert!(basis_json("bubble", 1, "full", 0, 6).is_err());
    assert!(kernel_json(1, "full", 0).is_err());
}
