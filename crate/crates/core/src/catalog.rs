//! Tabulated dessin-induced geometries, reference constructions for each, and
//! a recognizer that matches a geometry against them.

use serde::Serialize;

use crate::geometry::{Geometry, GeometryInvariants};
use crate::spectrum::Spectrum;

/// `(V, E, T, S)` as tabulated.
pub type Row = (usize, usize, u64, u64);

/// Eigenvalue tolerance for spectrum matches.
pub const SPECTRUM_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    /// Which of the two tables the row comes from.
    pub table: u8,
    pub index: usize,
    pub row: Row,
    pub spectrum: Option<Vec<(f64, usize)>>,
    pub reference: Option<fn() -> Geometry>,
    /// Why the reference may disagree with the tabulated row.
    pub known_discrepancy: Option<&'static str>,
}

impl CatalogEntry {
    pub fn reference_geometry(&self) -> Option<Geometry> {
        self.reference.map(|f| f())
    }
}

fn pairs_of(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect()
}

pub fn simplex(n: usize) -> Geometry {
    Geometry::uniform(n, &pairs_of(n))
}

/// Complete multipartite graph with the given part sizes, one label.
pub fn complete_multipartite(parts: &[usize]) -> Geometry {
    let part: Vec<usize> = parts.iter().enumerate().flat_map(|(k, &s)| std::iter::repeat(k).take(s)).collect();
    let n = part.len();
    let edges: Vec<_> = pairs_of(n).into_iter().filter(|&(u, v)| part[u] != part[v]).collect();
    Geometry::uniform(n, &edges)
}

pub fn orthoplex(dim: usize) -> Geometry {
    complete_multipartite(&vec![2; dim])
}

fn fano_lines() -> Vec<Vec<usize>> {
    (0..7).map(|t| vec![t, (t + 1) % 7, (t + 3) % 7]).collect()
}

pub fn fano() -> Geometry {
    Geometry::from_lines(7, &fano_lines())
}

/// Lines of AG(2,3) on `(x, y) ↦ 3x + y`, grouped into the four parallel classes.
fn ag23_parallel_classes() -> Vec<Vec<Vec<usize>>> {
    let pt = |x: usize, y: usize| 3 * (x % 3) + (y % 3);
    let directions = [(0, 1), (1, 0), (1, 1), (1, 2)];
    directions
        .iter()
        .map(|&(dx, dy)| {
            let mut lines: Vec<Vec<usize>> = Vec::new();
            for x in 0..3 {
                for y in 0..3 {
                    let mut l: Vec<usize> = (0..3).map(|t| pt(x + t * dx, y + t * dy)).collect();
                    l.sort_unstable();
                    if !lines.contains(&l) {
                        lines.push(l);
                    }
                }
            }
            lines
        })
        .collect()
}

fn ag23_with_classes(k: usize) -> Geometry {
    let lines: Vec<Vec<usize>> = ag23_parallel_classes().into_iter().take(k).flatten().collect();
    Geometry::from_lines(9, &lines)
}

pub fn grid3() -> Geometry {
    ag23_with_classes(2)
}

pub fn pappus() -> Geometry {
    ag23_with_classes(3)
}

pub fn hesse() -> Geometry {
    ag23_with_classes(4)
}

fn two_subsets(m: usize) -> Vec<(usize, usize)> {
    pairs_of(m)
}

fn disjoint(a: (usize, usize), b: (usize, usize)) -> bool {
    a.0 != b.0 && a.0 != b.1 && a.1 != b.0 && a.1 != b.1
}

/// Pairs of `0..m` adjacent when disjoint.
pub fn kneser2(m: usize) -> Geometry {
    let pts = two_subsets(m);
    let edges: Vec<_> = pairs_of(pts.len())
        .into_iter()
        .filter(|&(i, j)| disjoint(pts[i], pts[j]))
        .collect();
    Geometry::uniform(pts.len(), &edges)
}

/// Pairs of `0..m` adjacent when they meet.
pub fn triangular(m: usize) -> Geometry {
    let pts = two_subsets(m);
    let edges: Vec<_> = pairs_of(pts.len())
        .into_iter()
        .filter(|&(i, j)| !disjoint(pts[i], pts[j]))
        .collect();
    Geometry::uniform(pts.len(), &edges)
}

pub fn petersen() -> Geometry {
    kneser2(5)
}

/// Pentagram: the five lines `{ab, ac, ad, ae}` on pairs of a 5-set, one label.
pub fn pentagram() -> Geometry {
    triangular(5)
}

/// Desargues `10_3`: points are pairs of a 5-set, lines are triples.
pub fn desargues() -> Geometry {
    let pts = two_subsets(5);
    let idx = |a: usize, b: usize| pts.iter().position(|&p| p == (a.min(b), a.max(b))).unwrap();
    let mut lines = Vec::new();
    for a in 0..5 {
        for b in (a + 1)..5 {
            for c in (b + 1)..5 {
                lines.push(vec![idx(a, b), idx(a, c), idx(b, c)]);
            }
        }
    }
    Geometry::from_lines(10, &lines)
}

/// GQ(2,2): pairs of a 6-set, lines are the 15 synthemes.
pub fn gq22() -> Geometry {
    let pts = two_subsets(6);
    let idx = |p: (usize, usize)| pts.iter().position(|&q| q == p).unwrap();
    let mut lines = Vec::new();
    for (i, &a) in pts.iter().enumerate() {
        for (j, &b) in pts.iter().enumerate().skip(i + 1) {
            for &c in pts.iter().skip(j + 1) {
                if disjoint(a, b) && disjoint(a, c) && disjoint(b, c) {
                    lines.push(vec![idx(a), idx(b), idx(c)]);
                }
            }
        }
    }
    Geometry::from_lines(15, &lines)
}

/// GQ(2,4) as the 27 lines of a cubic surface (`a_i, b_i, c_ij`), lines of the
/// quadrangle being the 45 tritangent planes.
pub fn gq24() -> Geometry {
    let a = |i: usize| i;
    let b = |i: usize| 6 + i;
    let cs = two_subsets(6);
    let c = |i: usize, j: usize| 12 + cs.iter().position(|&p| p == (i.min(j), i.max(j))).unwrap();
    let mut lines = Vec::new();
    for i in 0..6 {
        for j in 0..6 {
            if i != j {
                lines.push(vec![a(i), b(j), c(i, j)]);
            }
        }
    }
    for (x, &p) in cs.iter().enumerate() {
        for (y, &q) in cs.iter().enumerate().skip(x + 1) {
            for &r in cs.iter().skip(y + 1) {
                if disjoint(p, q) && disjoint(p, r) && disjoint(q, r) {
                    lines.push(vec![c(p.0, p.1), c(q.0, q.1), c(r.0, r.1)]);
                }
            }
        }
    }
    Geometry::from_lines(27, &lines)
}

pub fn schlafli() -> Geometry {
    let g = gq24();
    Geometry::uniform(27, &g.graph().complement().plain_edges())
}

/// Halved 5-cube: even-weight words of length 5 at Hamming distance 2.
pub fn clebsch() -> Geometry {
    let words: Vec<u32> = (0u32..32).filter(|w| w.count_ones() % 2 == 0).collect();
    let edges: Vec<_> = pairs_of(words.len())
        .into_iter()
        .filter(|&(i, j)| (words[i] ^ words[j]).count_ones() == 2)
        .collect();
    Geometry::uniform(16, &edges)
}

/// Cayley graph of Z4² with connection set ±(1,0), ±(0,1), ±(1,1).
pub fn shrikhande() -> Geometry {
    let conn = [(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)];
    let edges: Vec<_> = pairs_of(16)
        .into_iter()
        .filter(|&(u, v)| {
            let d = ((v / 4 + 4 - u / 4) % 4, (v % 4 + 4 - u % 4) % 4);
            conn.contains(&d)
        })
        .collect();
    Geometry::uniform(16, &edges)
}

/// Line graph of the Heawood graph (point-line incidences of the Fano plane).
pub fn heawood_line_graph() -> Geometry {
    let flags: Vec<(usize, usize)> = fano_lines()
        .iter()
        .enumerate()
        .flat_map(|(l, pts)| pts.iter().map(move |&p| (p, l)))
        .collect();
    let edges: Vec<_> = pairs_of(flags.len())
        .into_iter()
        .filter(|&(i, j)| flags[i].0 == flags[j].0 || flags[i].1 == flags[j].1)
        .collect();
    Geometry::uniform(flags.len(), &edges)
}

/// Incidence graph of the biplane on Z11 with blocks `{1,3,4,5,9} + t`.
pub fn biplane11_incidence() -> Geometry {
    let qr = [1, 3, 4, 5, 9];
    let mut edges = Vec::new();
    for t in 0..11 {
        for &r in &qr {
            edges.push(((r + t) % 11, 11 + t));
        }
    }
    Geometry::uniform(22, &edges)
}

pub fn square() -> Geometry {
    Geometry::from_lines(4, &[vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]])
}

pub fn stellated_octahedron() -> Geometry {
    let mut edges = pairs_of(4);
    edges.extend(pairs_of(4).into_iter().map(|(u, v)| (u + 4, v + 4)));
    Geometry::uniform(8, &edges)
}

macro_rules! entry {
    ($name:expr, $table:expr, $index:expr, $row:expr, $spec:expr, $reference:expr, $note:expr) => {
        CatalogEntry {
            name: $name,
            table: $table,
            index: $index,
            row: $row,
            spectrum: $spec,
            reference: $reference,
            known_discrepancy: $note,
        }
    };
}

/// Every tabulated row, in table order.
pub fn catalog() -> Vec<CatalogEntry> {
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    vec![
        entry!("2-simplex (triangle)", 1, 3, (3, 3, 1, 0), None, Some(|| simplex(3)), None),
        entry!("3-simplex (tetrahedron)", 1, 4, (4, 6, 4, 0), None, Some(|| simplex(4)), None),
        entry!("square/quadrangle", 1, 4, (4, 4, 0, 1), None, Some(square), None),
        entry!("4-simplex (5-cell)", 1, 5, (5, 10, 10, 0), None, Some(|| simplex(5)), None),
        entry!("5-simplex", 1, 6, (6, 15, 20, 0), None, Some(|| simplex(6)), None),
        entry!("3-orthoplex (octahedron)", 1, 6, (6, 12, 8, 3), None, Some(|| orthoplex(3)), None),
        entry!("bipartite graph K(3,3)", 1, 6, (6, 9, 0, 9), None, Some(|| complete_multipartite(&[3, 3])), None),
        entry!("6-simplex", 1, 7, (7, 21, 35, 0), None, Some(|| simplex(7)), None),
        entry!("Fano plane (7_3)", 1, 7, (7, 21, 7, 0), None, Some(fano), None),
        entry!("7-simplex", 1, 8, (8, 28, 56, 0), None, Some(|| simplex(8)), None),
        entry!("4-orthoplex (16-cell)", 1, 8, (8, 24, 32, 6), None, Some(|| orthoplex(4)), None),
        entry!("completed cube K(4,4)", 1, 8, (8, 16, 0, 36), None, Some(|| complete_multipartite(&[4, 4])), None),
        entry!("stellated octahedron", 1, 8, (8, 12, 8, 0), None, Some(stellated_octahedron), None),
        entry!("8-simplex", 1, 9, (9, 36, 84, 0), None, Some(|| simplex(9)), None),
        entry!("Hesse (9_4 12_3)", 1, 9, (9, 36, 12, 0), None, Some(hesse), None),
        entry!("K(3)^3", 1, 9, (9, 27, 27, 27), None, Some(|| complete_multipartite(&[3, 3, 3])), None),
        entry!("Pappus (9_3)", 1, 9, (9, 27, 9, 27), None, Some(pappus), None),
        entry!("(3x3)-grid", 1, 9, (9, 18, 6, 9), None, Some(grid3), None),
        entry!("9-simplex", 1, 10, (10, 45, 120, 0), None, Some(|| simplex(10)), None),
        entry!("5-orthoplex", 1, 10, (10, 40, 80, 10), None, Some(|| orthoplex(5)), None),
        entry!("bipartite graph K(5,5)", 1, 10, (10, 25, 0, 100), None, Some(|| complete_multipartite(&[5, 5])), None),
        entry!("Mermin's pentagram", 1, 10, (10, 30, 30, 15), None, Some(pentagram), None),
        entry!("Petersen graph", 1, 10, (10, 15, 0, 0), None, Some(petersen), None),
        entry!("Desargues (10_3)", 1, 10, (10, 30, 10, 15), None, Some(desargues), None),
        entry!("10-simplex", 1, 11, (11, 55, 165, 0), None, Some(|| simplex(11)), None),
        entry!("11-simplex", 1, 12, (12, 66, 220, 0), None, Some(|| simplex(12)), None),
        entry!("6-orthoplex", 1, 12, (12, 60, 160, 15), None, Some(|| orthoplex(6)), None),
        entry!(
            "bipartite graph K(6,6)",
            1,
            12,
            (12, 36, 0, 255),
            None,
            Some(|| complete_multipartite(&[6, 6])),
            Some("tabulated 255 squares; K(6,6) has C(6,2)^2 = 225 chordless 4-cycles")
        ),
        entry!("threepartite graph K(4,4,4)", 1, 12, (12, 48, 64, 108), None, Some(|| complete_multipartite(&[4, 4, 4])), None),
        entry!(
            "fourpartite graph K(3,3,3,3)",
            1,
            12,
            (12, 54, 0, 54),
            None,
            Some(|| complete_multipartite(&[3, 3, 3, 3])),
            Some("tabulated 0 triangles; the graph has 108, so 0 needs a labeling with no equally labeled triangle")
        ),
        entry!("Cremona-Richmond (15_3), GQ(2,2)", 2, 15, (15, 45, 15, 90), None, Some(gq22), None),
        entry!(
            "Clebsch graph",
            2,
            16,
            (16, 80, 0, 60),
            Some(vec![(10.0, 1), (2.0, 5), (-2.0, 10)]),
            Some(clebsch),
            Some("tabulated 0 triangles; the Clebsch graph srg(16,10,6,6) has 160")
        ),
        entry!("Shrikhande graph", 2, 16, (16, 48, 32, 12), Some(vec![(6.0, 1), (2.0, 6), (-2.0, 9)]), Some(shrikhande), None),
        entry!("unnamed, index 18", 2, 18, (18, 72, 48, 306), Some(vec![(8.0, 1), (0.0, 9), (-4.0, 4), (2.0, 4)]), None, None),
        entry!(
            "unnamed, index 20",
            2,
            20,
            (20, 80, 0, 740),
            Some(vec![(0.0, 10), (-8.0, 1), (8.0, 1), (-2.0, 4), (2.0, 4)]),
            None,
            None
        ),
        entry!(
            "Kneser graph KG(7,2)",
            2,
            21,
            (21, 105, 35, 630),
            Some(vec![(10.0, 1), (3.0, 6), (-2.0, 14)]),
            Some(|| kneser2(7)),
            Some("tabulated spectrum is that of the triangular graph T(7); KG(7,2) has sp(10^1, 1^14, -4^6) and 105 triangles")
        ),
        entry!(
            "line graph of IG(7,3,1)",
            2,
            21,
            (21, 42, 14, 0),
            Some(vec![(4.0, 1), (-2.0, 8), (1.0 + s2, 6), (1.0 - s2, 6)]),
            Some(heawood_line_graph),
            None
        ),
        entry!(
            "IG(11,5,2)",
            2,
            22,
            (22, 55, 0, 55),
            Some(vec![(5.0, 1), (-5.0, 1), (s3, 10), (-s3, 10)]),
            Some(biplane11_incidence),
            None
        ),
        entry!("GQ(2,4)", 2, 27, (27, 135, 45, 1080), Some(vec![(10.0, 1), (1.0, 20), (-5.0, 6)]), Some(gq24), None),
        entry!("Schlafli graph", 2, 27, (27, 216, 720, 270), Some(vec![(16.0, 1), (4.0, 6), (-2.0, 20)]), Some(schlafli), None),
        entry!(
            "unnamed, index 27 (a)",
            2,
            27,
            (27, 216, 504, 3024),
            Some(vec![(16.0, 1), (1.0, 16), (-2.0, 8), (-8.0, 2)]),
            None,
            None
        ),
        entry!(
            "unnamed, index 27 (b)",
            2,
            27,
            (27, 216, 612, 1674),
            Some(vec![(16.0, 1), (4.0, 2), (1.0, 12), (-2.0, 8), (-5.0, 4)]),
            None,
            None
        ),
    ]
}

pub fn find_entry(name: &str) -> Option<CatalogEntry> {
    let lower = name.to_lowercase();
    catalog().into_iter().find(|e| e.name.to_lowercase() == lower)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchTier {
    /// `(V, E, T_line, S_chordless)` equal the tabulated row.
    Invariants,
    /// ... and the tabulated spectrum.
    Spectrum,
    /// Isomorphic to the reference graph, whose own labeled counts agree.
    Isomorphism,
}

#[derive(Clone, Debug, Serialize)]
pub struct Match {
    pub name: &'static str,
    pub table: u8,
    pub index: usize,
    pub tier: MatchTier,
    pub tabulated: Row,
    pub computed: Row,
    pub row_matches: bool,
    pub spectrum_matches: Option<bool>,
    pub isomorphic: bool,
    pub discrepancy: Option<String>,
}

/// Catalog entries this geometry matches, best tier first.
pub fn recognize(g: &Geometry) -> Vec<Match> {
    recognize_with(g, &g.invariants(), None)
}

/// As [`recognize`], reusing already computed invariants and spectrum.
pub fn recognize_with(g: &Geometry, inv: &GeometryInvariants, spectrum: Option<&Spectrum>) -> Vec<Match> {
    Recognizer::for_points(inv.v).recognize(g, inv, spectrum)
}

/// Catalog with reference geometries built once, for recognizing many geometries.
pub struct Recognizer {
    entries: Vec<(CatalogEntry, Option<(Geometry, Row)>)>,
}

impl Default for Recognizer {
    fn default() -> Self {
        Self::from_entries(catalog())
    }
}

impl Recognizer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Only the entries on `v` points.
    pub fn for_points(v: usize) -> Self {
        Self::from_entries(catalog().into_iter().filter(|e| e.row.0 == v).collect())
    }

    fn from_entries(entries: Vec<CatalogEntry>) -> Self {
        let entries = entries
            .into_iter()
            .map(|e| {
                let r = e.reference_geometry().map(|g| {
                    let row = g.invariants().row();
                    (g, row)
                });
                (e, r)
            })
            .collect();
        Recognizer { entries }
    }

    pub fn entries(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.iter().map(|(e, _)| e)
    }

    pub fn recognize(&self, g: &Geometry, inv: &GeometryInvariants, spectrum: Option<&Spectrum>) -> Vec<Match> {
        let computed = inv.row();
        let mut owned: Option<Spectrum> = None;
        let mut out = Vec::new();
        for (e, reference) in &self.entries {
            if e.row.0 != computed.0 {
                continue;
            }
            let row_matches = e.row == computed;
            let isomorphic = reference
                .as_ref()
                .is_some_and(|(r, rrow)| *rrow == computed && r.graph().isomorphic_to(g.graph()));
            if !row_matches && !isomorphic {
                continue;
            }
            let spectrum_matches = e.spectrum.as_ref().map(|want| {
                let sp = match spectrum {
                    Some(s) => Some(s),
                    None => {
                        if owned.is_none() {
                            owned = g.spectrum().ok();
                        }
                        owned.as_ref()
                    }
                };
                sp.is_some_and(|s| s.matches(want, SPECTRUM_TOL))
            });
            let tier = if isomorphic {
                MatchTier::Isomorphism
            } else if spectrum_matches == Some(true) {
                MatchTier::Spectrum
            } else {
                MatchTier::Invariants
            };
            let note = e.known_discrepancy.map(|d| format!(" ({d})")).unwrap_or_default();
            let discrepancy = if !row_matches {
                Some(format!("tabulated {:?}, computed {:?}{note}", e.row, computed))
            } else if spectrum_matches == Some(false) {
                Some(format!("tabulated spectrum differs{note}"))
            } else {
                None
            };
            out.push(Match {
                name: e.name,
                table: e.table,
                index: e.index,
                tier,
                tabulated: e.row,
                computed,
                row_matches,
                spectrum_matches,
                isomorphic,
                discrepancy,
            });
        }
        out.sort_by(|a, b| b.tier.cmp(&a.tier).then(b.row_matches.cmp(&a.row_matches)));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ag23_classes_partition_pairs() {
        let classes = ag23_parallel_classes();
        assert_eq!(classes.len(), 4);
        assert!(classes.iter().all(|c| c.len() == 3));
        assert_eq!(hesse().invariants().row(), (9, 36, 12, 0));
    }

    #[test]
    fn gq24_parameters() {
        let g = gq24();
        assert_eq!(g.lines().len(), 45);
        assert!((0..27).all(|u| g.graph().degree(u) == 10));
    }

    #[test]
    fn kneser_and_triangular_are_complements() {
        assert!(kneser2(7).graph().complement().isomorphic_to(triangular(7).graph()));
    }

    #[test]
    fn square_recognized() {
        let m = recognize(&square());
        assert_eq!(m[0].name, "square/quadrangle");
        assert_eq!(m[0].tier, MatchTier::Isomorphism);
    }

    #[test]
    fn pentagram_and_desargues_separate_by_labels() {
        let names = |g: &Geometry| -> Vec<&str> {
            recognize(g)
                .into_iter()
                .filter(|m| m.tier == MatchTier::Isomorphism)
                .map(|m| m.name)
                .collect()
        };
        assert_eq!(names(&pentagram()), vec!["Mermin's pentagram"]);
        assert_eq!(names(&desargues()), vec!["Desargues (10_3)"]);
    }
}
