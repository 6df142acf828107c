use wcp::geometry::{triangulate, PolygonalRegion};
use wcp::tv::{tv_1d, tv_2d_box, tv_mesh};

fn exp_rate(rate: f64) -> impl Fn(f64) -> f64 {
    move |x| if x >= 0.0 { rate * (-rate * x).exp() } else { 0.0 }
}

#[test]
fn exponentials_cross_once() {
    // Densities cross at ln 2; ½∫|e^{−x} − 2e^{−2x}| = (1 − ¼) − (1 − ½).
    let tv = tv_1d(exp_rate(1.0), exp_rate(2.0), 0.0, f64::INFINITY, &[]).unwrap();
    assert!((tv - 0.25).abs() < 1e-9, "{tv}");
}

#[test]
fn identical_densities() {
    let tv = tv_1d(exp_rate(1.0), exp_rate(1.0), 0.0, f64::INFINITY, &[]).unwrap();
    assert_eq!(tv, 0.0);
    let f = |x: f64, y: f64| (-(x * x + y * y) / 2.0).exp() / (2.0 * std::f64::consts::PI);
    assert_eq!(tv_2d_box(f, f, [-5.0, -5.0], [5.0, 5.0], 1e-4), 0.0);
}

#[test]
fn disjoint_supports() {
    let a = |x: f64| if (0.0..1.0).contains(&x) { 1.0 } else { 0.0 };
    let b = |x: f64| if (2.0..3.0).contains(&x) { 1.0 } else { 0.0 };
    let tv = tv_1d(a, b, 0.0, 3.0, &[1.0, 2.0]).unwrap();
    assert!((tv - 1.0).abs() < 1e-9);
    let a2 = |x: f64, y: f64| a(x) * a(y);
    let b2 = |x: f64, y: f64| b(x) * b(y);
    let tv2 = tv_2d_box(a2, b2, [0.0, 0.0], [4.0, 4.0], 1e-4);
    assert!((tv2 - 1.0).abs() < 1e-4, "{tv2}");
}

#[test]
fn box_rule_on_product_exponentials() {
    // Independent coordinates: 1 − TV of the product is not simple, so compare
    // to the one-dimensional value for a product with one identical factor.
    let f = |x: f64, y: f64| exp_rate(1.0)(x) * exp_rate(1.0)(y);
    let g = |x: f64, y: f64| exp_rate(2.0)(x) * exp_rate(1.0)(y);
    let tv = tv_2d_box(f, g, [0.0, 0.0], [30.0, 30.0], 1e-5);
    assert!((tv - 0.25).abs() < 1e-3, "{tv}");
}

#[test]
fn mesh_rule_counts_mass_off_the_mesh() {
    // Uniform on the unit square against a uniform density on [0, 2] × [0, 1].
    let region = PolygonalRegion::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], vec![]).unwrap();
    let mesh = triangulate(&region, 0.1).unwrap();
    let g = |x: f64, y: f64| if (0.0..=2.0).contains(&x) && (0.0..=1.0).contains(&y) { 0.5 } else { 0.0 };
    let tv = tv_mesh(&mesh, |_, _| 1.0, g, 1e-6);
    assert!((tv - 0.5).abs() < 1e-9, "{tv}");
    let tv0 = tv_mesh(&mesh, |_, _| 1.0, |_, _| 1.0, 1e-6);
    assert!(tv0.abs() < 1e-12);
}
