use qutrit_qrg_web::{example_tensor, flow, invariants, scan};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn d14_scan_matches_core_boundaries() {
    let v = parse(&scan(1.4, 0.0, 3.0, 200, vec![15, 16]).unwrap());
    let b = v["boundaries"].as_array().unwrap();
    assert_eq!(b.len(), 3);
    for (got, want) in b.iter().zip([0.52535, 1.6495, 2.1325]) {
        assert!((got["delta_c"].as_f64().unwrap() - want).abs() < 0.02);
    }
    let curve = v["curves"][0]["abs_i6"].as_array().unwrap();
    assert_eq!(curve.len(), 200);
}

#[test]
fn flow_reaches_requested_depth() {
    let v = parse(&flow(0.5, 0.3, 16).unwrap());
    let steps = v["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 17);
    assert!(steps.iter().all(|s| s["j"].as_f64().unwrap() > 0.0));
}

#[test]
fn invariants_round_trip_example_json() {
    let text = example_tensor("psi0", 0).unwrap();
    let v = parse(&invariants(&text, 1e-12).unwrap());
    assert_eq!(v["genuine"], false);
    assert!((v["scale"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(invariants("{\"re\": [0, 0", 1e-12).is_err());
}
