use std::path::PathBuf;

use dessins::belyi::{critical_data, verify, vertex_positions, MapFile, Place, Verdict, APPROXIMATE_TOL, DEFAULT_TOL};
use dessins::{Dessin, Mode, Passport};
use num_complex::Complex64;

fn fixture(name: &str) -> MapFile {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/maps").join(name);
    MapFile::parse(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn passport_of(n: usize, a: &str, b: &str) -> Passport {
    Dessin::from_cycles(n, a, b, Mode::Hypermap).unwrap().passport()
}

fn has(points: &[(Complex64, usize)], z: Complex64, mult: usize, tol: f64) -> bool {
    points.iter().any(|&(w, m)| m == mult && (w - z).norm() < tol)
}

fn finite(v: &[dessins::belyi::Vertex]) -> Vec<(Complex64, usize)> {
    v.iter().filter_map(|x| x.position.as_complex().map(|z| (z, x.multiplicity))).collect()
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn square_dessins_pass_against_their_generators() {
    // the passports printed alongside the functions must agree with the generators
    let cases = [
        ("b1.map", "(2,3)", "(1,2)(3,4)"),
        ("b2.map", "(1,2)(3,4)", "(2,3)"),
        ("b3.map", "(1,2,4,3)", "(1,2)(3,4)"),
        ("b4.map", "(1,2,4,3)", "(2,3)"),
    ];
    for (file, a, b) in cases {
        let m = fixture(file);
        let printed = m.passport.clone().unwrap();
        assert_eq!(printed, passport_of(4, a, b), "{file}");
        let r = verify(&m.map, &printed, DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{file}: {:?}", r.diagnostics);
        assert_eq!(r.branching, 2 * 4 - 2);
    }
}

#[test]
fn b1_vertex_positions() {
    let v = vertex_positions(&fixture("b1.map").map);
    let s2 = 2f64.sqrt();
    let black = finite(&v.black);
    assert!(has(&black, re(0.0), 2, 1e-9));
    assert!(has(&black, re(s2), 1, 1e-9) && has(&black, re(-s2), 1, 1e-9));
    let white = finite(&v.white);
    assert!(has(&white, re(1.0), 2, 1e-9) && has(&white, re(-1.0), 2, 1e-9));
}

#[test]
fn b4_white_vertices() {
    let v = vertex_positions(&fixture("b4.map").map);
    let white = finite(&v.white);
    let s8 = 8f64.sqrt();
    assert_eq!(white.len(), 3);
    assert!(has(&white, re(-1.0), 2, 1e-6));
    assert!(has(&white, re(3.0 + s8), 1, 1e-6));
    assert!(has(&white, re(3.0 - s8), 1, 1e-6));
    assert_eq!(finite(&v.black), vec![(re(1.0), 4)]);
}

#[test]
fn octahedron_vertices() {
    let m = fixture("octahedron.map");
    let r = verify(&m.map, m.passport.as_ref().unwrap(), DEFAULT_TOL).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.diagnostics);
    let black = finite(&r.vertices.black);
    let s2 = 2f64.sqrt();
    for z in [0.0, s2, -s2] {
        assert!(has(&black, re(z), 2, 1e-6));
    }
    let white = finite(&r.vertices.white);
    let (a, b) = ((2.0f64 / 3.0).sqrt(), (8.0f64 / 3.0).sqrt());
    assert!(has(&white, re(a), 2, 1e-6) && has(&white, re(-a), 2, 1e-6));
    assert!(has(&white, re(b), 1, 1e-6) && has(&white, re(-b), 1, 1e-6));
}

#[test]
fn k33_vertices() {
    let m = fixture("k33.map");
    let r = verify(&m.map, m.passport.as_ref().unwrap(), DEFAULT_TOL).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.diagnostics);
    // critical points 0, 1, 2/3
    let crit: Vec<Complex64> = critical_data(&m.map).iter().filter_map(|c| c.point.as_complex()).collect();
    for z in [0.0, 1.0, 2.0 / 3.0] {
        assert!(crit.iter().any(|w| (w - re(z)).norm() < 1e-9));
    }
    let white = finite(&r.vertices.white);
    assert!(has(&white, re(-1.0 / 3.0), 1, 1e-6));
    assert!(has(&white, re(2.0 / 3.0), 2, 1e-6));
    // printed to three or four digits
    assert!(has(&white, re(1.118), 1, 1e-3));
    let phi = 99.4f64.to_radians();
    assert!(has(&white, Complex64::from_polar(0.36, phi), 1, 5e-3));
    assert!(has(&white, Complex64::from_polar(0.36, -phi), 1, 5e-3));
}

#[test]
fn fano_function_as_printed_is_not_belyi() {
    let m = fixture("fano.map");
    let p = m.passport.clone().unwrap();
    assert_eq!(p, passport_of(7, "(2,7,6,5)(3,4)", "(1,2)(3,5)"));
    let r = verify(&m.map, &p, DEFAULT_TOL).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    // black fiber is right; the two remaining critical values are neither 0 nor 1
    assert!(r.fiber_matches[0] && r.fiber_matches[2]);
    assert_eq!(r.stray_critical_values.len(), 2);
    for c in &r.stray_critical_values {
        let v = c.value.as_complex().unwrap();
        assert!((v.norm() - 0.0705).abs() < 1e-3, "{v}");
    }
    let black = finite(&r.vertices.black);
    let a = Complex64::new(-0.25, -7f64.sqrt() / 4.0);
    assert!(has(&black, re(0.0), 4, 1e-9) && has(&black, re(1.0), 2, 1e-9) && has(&black, a, 1, 1e-9));
}

#[test]
fn fano_with_corrected_constant_passes() {
    // the unique constant putting both remaining critical values at 1
    let m = MapFile::parse(
        "f = (16807 - 4459 i sqrt(7))/512 * x^4 (x-1)^2 (x + (1 + i sqrt(7))/4)\npassport = [4^1 2^1 1^1, 2^2 1^3, 7^1]\n",
    )
    .unwrap();
    let r = verify(&m.map, m.passport.as_ref().unwrap(), DEFAULT_TOL).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.diagnostics);
}

#[test]
fn completed_cube_realizes_the_generators_passport() {
    let m = fixture("completed_cube.map");
    assert!(m.map.is_approximate());
    let printed = m.passport.clone().unwrap();
    let generated = passport_of(8, "(1,2,4,3)(5,7,6,8)", "(2,5)(3,7)");
    assert_eq!(generated, "[4^2, 2^2 1^4, 5^1 3^1]".parse().unwrap());
    let good = verify(&m.map, &generated, APPROXIMATE_TOL).unwrap();
    assert_eq!(good.verdict, Verdict::Pass, "{:?}", good.diagnostics);
    let bad = verify(&m.map, &printed, APPROXIMATE_TOL).unwrap();
    assert_eq!(bad.verdict, Verdict::Fail);
    assert_eq!(bad.fiber_matches, [true, true, false]);
    // printed white vertex positions, given to three or four digits
    let white = finite(&good.vertices.white);
    assert!(has(&white, Complex64::new(0.0566, 0.506), 2, 2e-3));
    assert!(has(&white, Complex64::new(0.0566, -0.506), 2, 2e-3));
    assert!(has(&white, re(-1.069), 1, 2e-3));
    assert!(has(&white, re(-0.162), 1, 2e-3));
    assert!(has(&white, Complex64::new(1.634, 0.6109), 1, 2e-3));
    assert!(has(&white, Complex64::new(1.634, -0.6109), 1, 2e-3));
    // the approximate constant is not good enough for the strict tolerance
    assert_ne!(verify(&m.map, &generated, DEFAULT_TOL).unwrap().verdict, Verdict::Pass);
}

#[test]
fn sixteen_cell_degree_mismatch() {
    let m = fixture("sixteen_cell.map");
    let r = verify(&m.map, m.passport.as_ref().unwrap(), DEFAULT_TOL).unwrap();
    assert_eq!(r.verdict, Verdict::DegreeMismatch);
    assert_eq!((r.degree, r.expected_degree), (7, 8));
    // the printed critical points 0, ±√2 are roots of this polynomial, not of its derivative
    let crit: Vec<Complex64> = r.critical_points.iter().filter_map(|c| c.point.as_complex()).collect();
    assert_eq!(crit.len(), 6);
    let s2 = 2f64.sqrt();
    for z in [0.0, s2, -s2] {
        assert!(crit.iter().all(|w| (w - re(z)).norm() > 1e-3));
    }
}

#[test]
fn chebyshev_degree_eight_is_the_sixteen_cell_shape() {
    // T = x -> x^2 - 2 iterated three times has degree 8 and critical values ±2;
    // f = (2 - T)/4 realizes the signature (5,4,1,0), and the printed degree-7
    // polynomial is exactly T'
    let t = "(((x^2-2)^2-2)^2-2)";
    let m = MapFile::parse(&format!("f = (2 - {t})/4\n")).unwrap();
    let r = verify(&m.map, &"[2^3 1^2, 2^4, 8^1]".parse().unwrap(), DEFAULT_TOL).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.diagnostics);
    let crit: Vec<Complex64> = r.critical_points.iter().filter_map(|c| c.point.as_complex()).collect();
    let s2 = 2f64.sqrt();
    for z in [0.0, s2, -s2, (2.0 + s2).sqrt(), (2.0 - s2).sqrt()] {
        assert!(crit.iter().any(|w| (w - re(z)).norm() < 1e-9));
    }
    let printed = fixture("sixteen_cell.map").map;
    let derivative = m.map.numerator().derivative().scale(&dessins::field::Mq::integer(-4));
    assert_eq!(printed.numerator(), &derivative);
}

#[test]
fn star_map() {
    let m = fixture("star5.map");
    let r = verify(&m.map, m.passport.as_ref().unwrap(), DEFAULT_TOL).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.vertices.black.len(), 1);
    assert_eq!(r.vertices.white.len(), 5);
    assert_eq!(r.vertices.faces[0].position, Place::INFINITY);
}

#[test]
fn multiplicity_conservation_and_riemann_hurwitz_on_passing_fixtures() {
    for file in ["b1.map", "b2.map", "b3.map", "b4.map", "octahedron.map", "k33.map", "star5.map"] {
        let m = fixture(file);
        let r = verify(&m.map, m.passport.as_ref().unwrap(), DEFAULT_TOL).unwrap();
        assert!(r.passed(), "{file}");
        let n = r.degree;
        for fiber in [&r.vertices.black, &r.vertices.white, &r.vertices.faces] {
            assert_eq!(fiber.iter().map(|v| v.multiplicity).sum::<usize>(), n, "{file}");
        }
        assert_eq!(r.branching, 2 * n - 2, "{file}");
        assert!(r.max_residual <= DEFAULT_TOL, "{file}");
    }
}

#[test]
fn reports_are_reproducible() {
    let m = fixture("k33.map");
    let p = m.passport.clone().unwrap();
    let a = serde_json::to_string(&verify(&m.map, &p, DEFAULT_TOL).unwrap()).unwrap();
    let b = serde_json::to_string(&verify(&m.map, &p, DEFAULT_TOL).unwrap()).unwrap();
    assert_eq!(a, b);
}
