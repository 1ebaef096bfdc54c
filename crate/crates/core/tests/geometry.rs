use dessins::catalog::{self, catalog, recognize, MatchTier};
use dessins::enumerate::find_by_passport;
use dessins::geometry::{disjoint_lines, induce, remove_lines, union_geometry, Geometry};
use dessins::spectrum::expansion_error;
use dessins::{Dessin, Mode, PassportPattern};

fn dessin(n: usize, a: &str, b: &str) -> Dessin {
    Dessin::from_cycles(n, a, b, Mode::Preclean).unwrap()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-22 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
    ev
}

fn dense(g: &Geometry) -> Vec<Vec<f64>> {
    let n = g.point_count();
    (0..n)
        .map(|u| (0..n).map(|v| if g.graph().adjacent(u, v) { 1.0 } else { 0.0 }).collect())
        .collect()
}

#[test]
fn references_reproduce_their_rows() {
    for e in catalog() {
        let Some(g) = e.reference_geometry() else { continue };
        let row = g.invariants().row();
        if e.known_discrepancy.is_some() && e.spectrum.is_none() {
            assert_ne!(row, e.row, "{} was listed as discrepant", e.name);
            continue;
        }
        if e.name.starts_with("Clebsch") || e.name.starts_with("Kneser") {
            continue;
        }
        assert_eq!(row, e.row, "{}", e.name);
    }
}

#[test]
fn discrepant_rows_are_what_the_graphs_say() {
    let row = |name: &str| catalog::find_entry(name).unwrap().reference_geometry().unwrap().invariants();
    assert_eq!(row("bipartite graph K(6,6)").s_chordless, 225);
    assert_eq!(row("fourpartite graph K(3,3,3,3)").t_plain, 108);
    let clebsch = row("Clebsch graph");
    assert_eq!((clebsch.e, clebsch.t_plain, clebsch.s_chordless), (80, 160, 60));
    let kneser = row("Kneser graph KG(7,2)");
    assert_eq!((kneser.e, kneser.t_plain, kneser.s_chordless), (105, 105, 630));
}

#[test]
fn tabulated_spectra_of_references() {
    for e in catalog() {
        let (Some(want), Some(g)) = (e.spectrum.as_ref(), e.reference_geometry()) else { continue };
        let s = g.spectrum().unwrap();
        assert_eq!(s.total_multiplicity(), g.point_count());
        assert!(expansion_error(&s) < 1e-6, "{}", e.name);
        if e.name.starts_with("Kneser") {
            assert!(!s.matches(want, catalog::SPECTRUM_TOL));
            assert!(s.matches(&[(10.0, 1), (1.0, 14), (-4.0, 6)], catalog::SPECTRUM_TOL));
        } else {
            assert!(s.matches(want, catalog::SPECTRUM_TOL), "{}: {}", e.name, s.notation());
        }
    }
}

#[test]
fn spectra_agree_with_jacobi_oracle() {
    for e in catalog() {
        let Some(g) = e.reference_geometry() else { continue };
        let exact = g.spectrum().unwrap();
        let mut flat: Vec<f64> = exact
            .eigenvalues
            .iter()
            .flat_map(|ev| std::iter::repeat(ev.value).take(ev.multiplicity))
            .collect();
        flat.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let oracle = jacobi_eigenvalues(dense(&g));
        for (a, b) in flat.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8, "{}: {a} vs {b}", e.name);
        }
    }
}

#[test]
fn regular_graphs_have_degree_as_top_eigenvalue() {
    for g in [catalog::gq24(), catalog::schlafli(), catalog::clebsch(), catalog::shrikhande()] {
        let d = g.graph().degree(0);
        let s = g.spectrum().unwrap();
        assert_eq!(s.eigenvalues[0].value, d as f64);
        assert_eq!(s.eigenvalues[0].multiplicity, 1);
    }
}

#[test]
fn irrational_spectra_have_closed_forms() {
    let s = catalog::biplane11_incidence().spectrum().unwrap();
    let forms: Vec<String> = s.eigenvalues.iter().map(|e| e.exact.clone().unwrap()).collect();
    assert_eq!(forms, vec!["5", "sqrt(3)", "-sqrt(3)", "-5"]);
    let s = catalog::heawood_line_graph().spectrum().unwrap();
    assert!(s.notation().contains("1+sqrt(2)^6"), "{}", s.notation());
}

#[test]
fn every_reference_recognizes_as_itself() {
    for e in catalog() {
        let Some(g) = e.reference_geometry() else { continue };
        let matches = recognize(&g);
        assert!(
            matches.iter().any(|m| m.name == e.name && m.tier == MatchTier::Isomorphism),
            "{}",
            e.name
        );
    }
}

fn rows(d: &Dessin) -> Vec<((usize, usize, u64, u64), String, bool)> {
    induce(d)
        .unwrap()
        .iter()
        .map(|ig| (ig.geometry.invariants().row(), ig.class.fingerprint.order.clone(), ig.is_proper()))
        .collect()
}

#[test]
fn stellated_octahedron_and_completed_cube_from_one_dessin() {
    let d = dessin(8, "(1,2,4,3)(5,7,6,8)", "(2,5)(3,6)");
    assert_eq!(d.group().order(), 16u32.into());
    assert_eq!(
        rows(&d),
        vec![((8, 16, 0, 36), "1".into(), true), ((8, 12, 8, 0), "2".into(), false)]
    );
}

#[test]
fn mermin_square_grid_and_hesse_union() {
    let d = dessin(9, "(1,2,4,8,7,3)(5,9,6)", "(2,5)(3,6)(4,7)(8,9)");
    let gs = induce(&d).unwrap();
    let m2 = &gs[0].geometry;
    let m1 = &gs[1].geometry;
    assert_eq!(gs[1].class.fingerprint.order, "2");
    assert_eq!(m1.invariants().row(), (9, 18, 6, 9));
    assert!(recognize(m1).iter().any(|m| m.name == "(3x3)-grid" && m.tier == MatchTier::Isomorphism));
    let hesse = union_geometry(m1, m2).unwrap();
    assert_eq!(hesse.invariants().row(), (9, 36, 12, 0));
    assert_eq!(hesse.lines().len(), 12);
    assert!(recognize(&hesse).iter().any(|m| m.name == "Hesse (9_4 12_3)" && m.tier == MatchTier::Isomorphism));
    let skew = disjoint_lines(&hesse, 3).unwrap();
    let pappus = remove_lines(&hesse, &skew).unwrap();
    assert_eq!(pappus.invariants().row(), (9, 27, 9, 27));
    assert!(recognize(&pappus).iter().any(|m| m.name == "Pappus (9_3)" && m.tier == MatchTier::Isomorphism));
}

#[test]
fn pentagram_and_petersen_from_a5_dessin() {
    let p: PassportPattern = "[*, 2^4 1^2, 5^2]".parse().unwrap();
    let found = find_by_passport(10, &p, Some(60u32.into())).unwrap();
    let planar: Vec<_> = found.iter().filter(|d| d.signature().genus == 0).collect();
    assert_eq!(planar.len(), 1);
    let d = planar[0];
    assert_eq!(d.passport().to_string(), "[3^3 1^1, 2^4 1^2, 5^2]");
    assert_eq!(d.signature().to_string(), "(4,6,2,0)");
    assert_eq!(
        rows(d),
        vec![((10, 30, 30, 15), "1".into(), true), ((10, 15, 0, 0), "2".into(), true)]
    );
}

#[test]
fn desargues_and_petersen() {
    let d = dessin(10, "(2,3,4)(5,7,10,6,9,8)", "(1,2)(3,5)(4,6)(8,9)");
    assert_eq!(d.group().order(), 120u32.into());
    let gs = induce(&d).unwrap();
    assert_eq!(gs[0].geometry.invariants().row(), (10, 30, 10, 15));
    assert_eq!(gs[1].geometry.invariants().row(), (10, 15, 0, 0));
    assert_eq!(gs[1].class.fingerprint.to_string(), "order 4 [1:1 2:3]");
    let names: Vec<_> = gs.iter().map(|g| recognize(&g.geometry)[0].name).collect();
    assert_eq!(names, vec!["Desargues (10_3)", "Petersen graph"]);
}

#[test]
fn same_graph_different_counts() {
    // identical 30-edge graph, separated only by stabilizer equality
    let pent = dessin(10, "(2,3,4)(5,7,8)(6,9,10)", "(1,2)(3,5)(4,6)(7,10)");
    let des = dessin(10, "(2,3,4)(5,7,10,6,9,8)", "(1,2)(3,5)(4,6)(8,9)");
    let a = &induce(&pent).unwrap()[0].geometry;
    let b = &induce(&des).unwrap()[0].geometry;
    assert!(a.graph().isomorphic_to(b.graph()));
    assert_eq!((a.invariants().t_line, b.invariants().t_line), (30, 10));
}

#[test]
fn gq22_from_passport_search() {
    let p: PassportPattern = "[6^1 3^2 2^1 1^1, 2^6 1^3, 6^2 3^1]".parse().unwrap();
    let found = find_by_passport(15, &p, Some(720u32.into())).unwrap();
    assert!(!found.is_empty());
    for d in &found {
        assert_eq!(d.signature().to_string(), "(5,9,3,0)");
        let gq = induce(d)
            .unwrap()
            .into_iter()
            .find(|ig| ig.geometry.invariants().row() == (15, 45, 15, 90))
            .expect("GQ(2,2) class");
        assert_eq!(gq.geometry.lines().len(), 15);
        assert!(gq.geometry.lines().iter().all(|l| l.len() == 3));
        assert!(recognize(&gq.geometry)
            .iter()
            .any(|m| m.name.contains("GQ(2,2)") && m.tier == MatchTier::Isomorphism));
    }
}

#[test]
fn index_six_geometries() {
    let oct = dessin(6, "(1,2)(3,4)(5,6)", "(2,3)(4,5)");
    let g = &induce(&oct).unwrap()[0].geometry;
    assert_eq!(recognize(g)[0].name, "3-orthoplex (octahedron)");
    let k33 = dessin(6, "(1,2)(3,4,6,5)", "(2,3)");
    let g = &induce(&k33).unwrap()[0].geometry;
    assert_eq!(g.invariants().row(), (6, 9, 0, 9));
    assert_eq!(recognize(g)[0].name, "bipartite graph K(3,3)");
}

#[test]
fn lines_are_maximal_on_every_index_seven_dessin() {
    use dessins::enumerate::{enumerate, EnumerationTask};
    for d in enumerate(&EnumerationTask::new(7, Mode::Preclean)).unwrap() {
        let gs = induce(&d).unwrap();
        let total: usize = gs.iter().map(|g| g.class.pairs.len()).sum();
        assert_eq!(total, 21);
        for ig in gs {
            for line in ig.geometry.lines() {
                assert!(line.len() >= 2);
                assert_eq!(ig.geometry.line_extension(line), None);
            }
        }
    }
}
