use serde_json::Value;
use subnet_web::{alpha_curve_json, consolidated_view_json, multicolor_json};

#[test]
fn line_clique_curve() {
    let v: Value = serde_json::from_str(&alpha_curve_json("line_clique", 20, 0.0, 3, 5, 0).unwrap()).unwrap();
    let ratio: Vec<f64> = v.as_array().unwrap().iter().map(|p| p["aggressive_ratio"].as_f64().unwrap()).collect();
    let want = [0.25, 0.4, 3.0 / 7.0, 4.0 / 9.0];
    for (a, b) in ratio.iter().zip(want) {
        assert!((a - b).abs() < 1e-12);
    }
    assert_eq!(v[0]["graphs"], 1);
}

#[test]
fn view_has_layout_for_every_user() {
    let v: Value = serde_json::from_str(&consolidated_view_json("geometric", 12, 0.3, 4, 1, "aggressive").unwrap()).unwrap();
    assert_eq!(v["positions"].as_array().unwrap().len(), 12);
    let members: usize = v["vertices"].as_array().unwrap().iter().map(|m| m.as_array().unwrap().len()).sum();
    assert!(members >= 12);
}

#[test]
fn slot_strip_is_proper() {
    let args = ("erdos_renyi", 10, 0.3, 2, 1, "aggressive");
    let view: Value = serde_json::from_str(&consolidated_view_json(args.0, args.1, args.2, args.3, args.4, args.5).unwrap()).unwrap();
    let slots: Value = serde_json::from_str(
        &multicolor_json(args.0, args.1, args.2, args.3, args.4, args.5, 400, 0.3, true, 60).unwrap(),
    )
    .unwrap();
    let strip: Vec<Vec<u64>> = slots["strip"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect())
        .collect();
    assert_eq!(strip.len(), view["vertices"].as_array().unwrap().len());
    assert!(strip.iter().flatten().all(|&x| x < 60));
    for e in view["vertex_edges"].as_array().unwrap() {
        let (a, b) = (e[0].as_u64().unwrap() as usize, e[1].as_u64().unwrap() as usize);
        assert!(strip[a].iter().all(|x| !strip[b].contains(x)));
    }
}

#[test]
fn bad_arguments_are_reported() {
    assert!(alpha_curve_json("hexagon", 5, 0.0, 1, 1, 0).unwrap_err().contains("unknown family"));
    assert!(consolidated_view_json("erdos_renyi", 5, 2.0, 0, 1, "aggressive").is_err());
    assert!(consolidated_view_json("line_star", 8, 0.0, 0, 1, "greedy").is_err());
}
