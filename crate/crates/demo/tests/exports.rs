use nkcert_demo::{fan_svg, locate_point, salem_quartics};
use serde_json::Value;

#[test]
fn quartic_list() {
    let v: Value = serde_json::from_str(&salem_quartics(-1, -1)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
    let v: Value = serde_json::from_str(&salem_quartics(-100, 100)).unwrap();
    assert!(v.get("error").is_some());
}

#[test]
fn svg_for_smallest_salem() {
    let svg = fan_svg(-1, -1, 4);
    assert_eq!(svg.matches("class=\"ray\"").count(), 18);
    // X^4 + 1 has no real roots
    assert!(fan_svg(0, 0, 4).contains("<text"));
}

#[test]
fn locate() {
    let v: Value = serde_json::from_str(&locate_point(-1, -1, 1.2, 1.2)).unwrap();
    assert_eq!(v["domain"]["part"], "D1");
    assert_eq!(v["domain"]["word"], serde_json::json!([0]));
    let v: Value = serde_json::from_str(&locate_point(-1, -1, 5.0, 0.1)).unwrap();
    assert_eq!(v["strip_word"], serde_json::json!([2]));
    let v: Value = serde_json::from_str(&locate_point(-1, -1, 0.5, 0.1)).unwrap();
    assert!(v["domain"].is_null());
}
