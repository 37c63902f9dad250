use hermitian_grassmann_web::{invariants_json, round_trip_json, stratify_json};
use serde_json::Value;

const LORENTZ: &str = r#"{
  "field": "R",
  "gram": [[1, 0, 0], [0, 1, 0], [0, 0, -1]],
  "points": {
    "p1": [[0], [0], [1]],
    "p2": [[1.1752011936438014], [0], [1.5430806348152437]],
    "q": [[0], [1], [1]]
  },
  "tangents": {
    "h": { "base": "p1", "matrix": [[1], [0], [0]] },
    "v": { "base": "p1", "matrix": [[0], [1], [0]] }
  }
}"#;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn round_trip_scales_the_parts() {
    let cosh2 = 1f64.cosh().powi(2);
    for (t, want) in [("h", cosh2 * cosh2), ("v", cosh2)] {
        let r = parse(round_trip_json(LORENTZ, t, "p2").unwrap());
        assert!((r["tance"].as_f64().unwrap() - cosh2).abs() < 1e-12);
        assert!(r["residual"].as_f64().unwrap() < 1e-12);
        let x = &r["round_trip"];
        let got = (0..3)
            .map(|i| {
                x[i][0][0]
                    .as_f64()
                    .unwrap()
                    .hypot(x[i][0][1].as_f64().unwrap())
            })
            .fold(0.0, f64::max);
        assert!((got - want).abs() < 1e-10, "{t}: {got} vs {want}");
    }
}

#[test]
fn errors_are_messages() {
    assert!(round_trip_json(LORENTZ, "nope", "p2")
        .unwrap_err()
        .contains("nope"));
    assert!(round_trip_json(LORENTZ, "h", "q").is_err());
    assert!(invariants_json("{").is_err());
}

#[test]
fn invariants_and_strata() {
    let inv = parse(invariants_json(LORENTZ).unwrap());
    assert_eq!(inv["command"], "invariants");
    let st = parse(stratify_json(LORENTZ).unwrap());
    let q = st["points"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["name"] == "q")
        .unwrap();
    assert_eq!(q["record"]["degeneracy"], 1);
}
