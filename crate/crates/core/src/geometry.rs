//! Point-line geometries induced by pair stabilizers of a dessin's group.
//!
//! Points are the dessin's edge labels. Every unordered pair `{i, j}` has the
//! pointwise stabilizer `S_ij` in `P = ⟨α, β⟩`. Pairs are grouped into classes
//! by the fingerprint of `S_ij`; inside a class, edges are labeled by the exact
//! subgroup and lines are the maximal cliques of equally labeled edges.
//!
//! `S_ij` is the pointwise stabilizer of its own fixed-point set, so two pair
//! stabilizers are equal exactly when their fixed-point sets are; the set is
//! used as the subgroup's identity.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::dessin::Dessin;
use crate::graph::LabeledGraph;
use crate::group::{Fingerprint, GroupError, PermGroup, Subgroup};
use crate::perm::Permutation;
use crate::spectrum::{graph_spectrum, Spectrum, SpectrumError, DEFAULT_SPECTRUM_BOUND};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("geometries have {0} and {1} points")]
    PointSetMismatch(usize, usize),
    #[error("line {0:?} is not a line of the geometry")]
    UnknownLine(Vec<usize>),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Edge-labeled collinearity graph with its lines.
#[derive(Clone, Debug)]
pub struct Geometry {
    graph: LabeledGraph,
    /// Identity of each label's subgroup (its fixed-point set for induced
    /// geometries, the line's points for reference ones).
    label_keys: Vec<Vec<usize>>,
    lines: Vec<Vec<usize>>,
    fingerprint: Option<Fingerprint>,
}

impl Geometry {
    /// Builds from labeled edges; `keys[l]` identifies label `l`.
    pub fn from_labeled(graph: LabeledGraph, label_keys: Vec<Vec<usize>>, fingerprint: Option<Fingerprint>) -> Self {
        let lines = graph.lines().into_values().flatten().collect::<Vec<_>>();
        let mut lines = lines;
        lines.sort();
        Geometry {
            graph,
            label_keys,
            lines,
            fingerprint,
        }
    }

    /// Every edge carries the same label.
    pub fn uniform(n: usize, edges: &[(usize, usize)]) -> Self {
        Geometry::from_labeled(LabeledGraph::uniform(n, edges), vec![(0..n).collect()], None)
    }

    /// Edges are the pairs inside the given lines, each labeled by its line.
    pub fn from_lines(n: usize, lines: &[Vec<usize>]) -> Self {
        let mut g = LabeledGraph::new(n);
        for (l, line) in lines.iter().enumerate() {
            for (a, &u) in line.iter().enumerate() {
                for &v in &line[a + 1..] {
                    g.set(u, v, Some(l));
                }
            }
        }
        let keys = lines
            .iter()
            .map(|l| {
                let mut l = l.clone();
                l.sort_unstable();
                l
            })
            .collect();
        Geometry::from_labeled(g, keys, None)
    }

    pub fn point_count(&self) -> usize {
        self.graph.order()
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn lines(&self) -> &[Vec<usize>] {
        &self.lines
    }

    pub fn label_keys(&self) -> &[Vec<usize>] {
        &self.label_keys
    }

    pub fn fingerprint(&self) -> Option<&Fingerprint> {
        self.fingerprint.as_ref()
    }

    pub fn invariants(&self) -> GeometryInvariants {
        let g = &self.graph;
        GeometryInvariants {
            v: g.order(),
            e: g.edge_count(),
            t_plain: g.triangles(),
            t_line: g.monochromatic_triangles(),
            s_chordless: g.chordless_squares(),
            s_line: g.monochromatic_squares(),
            connected: g.is_connected(),
            spanning: g.is_spanning(),
            lines: self.lines.len(),
        }
    }

    pub fn spectrum(&self) -> Result<Spectrum, SpectrumError> {
        self.spectrum_with_bound(DEFAULT_SPECTRUM_BOUND)
    }

    pub fn spectrum_with_bound(&self, bound: usize) -> Result<Spectrum, SpectrumError> {
        graph_spectrum(self.graph.order(), &self.graph.plain_edges(), bound)
    }

    /// A point outside `line` adjacent with the line's label to all of it, if any.
    pub fn line_extension(&self, line: &[usize]) -> Option<usize> {
        let l = self.graph.label(line[0], line[1])?;
        (0..self.point_count())
            .filter(|p| !line.contains(p))
            .find(|&p| line.iter().all(|&q| self.graph.label(p, q) == Some(l)))
    }

    /// Graphviz rendering; edges of one line share a colour.
    pub fn to_dot(&self, name: &str) -> String {
        const PALETTE: [&str; 12] = [
            "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
            "#17becf", "#393b79", "#637939",
        ];
        let mut out = String::new();
        let _ = writeln!(out, "graph \"{}\" {{", name.replace('"', "'"));
        let _ = writeln!(out, "  node [shape=circle];");
        for p in 0..self.point_count() {
            let _ = writeln!(out, "  {};", p + 1);
        }
        let mut drawn = std::collections::HashSet::new();
        for (k, line) in self.lines.iter().enumerate() {
            let colour = PALETTE[k % PALETTE.len()];
            for (a, &u) in line.iter().enumerate() {
                for &v in &line[a + 1..] {
                    if drawn.insert((u, v)) {
                        let _ = writeln!(out, "  {} -- {} [color=\"{colour}\", label=\"L{}\"];", u + 1, v + 1, k + 1);
                    }
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GeometryInvariants {
    #[serde(rename = "V")]
    pub v: usize,
    #[serde(rename = "E")]
    pub e: usize,
    #[serde(rename = "T_plain")]
    pub t_plain: u64,
    #[serde(rename = "T_line")]
    pub t_line: u64,
    #[serde(rename = "S_chordless")]
    pub s_chordless: u64,
    /// Chordless squares whose four sides share one stabilizer.
    #[serde(rename = "S_line")]
    pub s_line: u64,
    pub connected: bool,
    pub spanning: bool,
    pub lines: usize,
}

impl GeometryInvariants {
    /// `(V, E, T_line, S_chordless)`, the tuple tabulated for each geometry.
    pub fn row(&self) -> (usize, usize, u64, u64) {
        (self.v, self.e, self.t_line, self.s_chordless)
    }
}

/// One exact pair stabilizer inside a class.
#[derive(Clone, Debug, Serialize)]
pub struct LabelSubgroup {
    /// Points fixed by the subgroup, 0-based.
    pub fixed_points: Vec<usize>,
    #[serde(skip)]
    pub generators: Vec<Permutation>,
}

/// Pairs whose stabilizers share one fingerprint.
#[derive(Clone, Debug)]
pub struct StabilizerClass {
    pub fingerprint: Fingerprint,
    pub pairs: Vec<(usize, usize)>,
    pub subgroups: Vec<LabelSubgroup>,
}

#[derive(Clone, Debug)]
pub struct InducedGeometry {
    pub class: StabilizerClass,
    pub geometry: Geometry,
}

impl InducedGeometry {
    /// Connected and spanning, i.e. a geometry on all points.
    pub fn is_proper(&self) -> bool {
        let g = self.geometry.graph();
        g.is_connected() && g.is_spanning()
    }
}

fn pair(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

/// Orbits of `gens` on unordered pairs, with an element carrying each orbit's
/// first pair to every member.
fn pair_orbits(n: usize, gens: &[Permutation]) -> Vec<Vec<((usize, usize), Permutation)>> {
    let mut seen: HashMap<(usize, usize), ()> = HashMap::new();
    let mut orbits = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if seen.contains_key(&(i, j)) {
                continue;
            }
            seen.insert((i, j), ());
            let mut orbit = vec![((i, j), Permutation::identity(n))];
            let mut k = 0;
            while k < orbit.len() {
                let ((a, b), g) = orbit[k].clone();
                for s in gens {
                    let q = pair(s.apply(a), s.apply(b));
                    if seen.insert(q, ()).is_none() {
                        orbit.push((q, g.then(s)));
                    }
                }
                k += 1;
            }
            orbits.push(orbit);
        }
    }
    orbits
}

fn order_key(f: &Fingerprint) -> (usize, String, Option<Vec<(u64, u64)>>) {
    (f.order.len(), f.order.clone(), f.element_orders.clone())
}

/// All stabilizer classes of `d`, ordered by ascending stabilizer order.
pub fn induce(d: &Dessin) -> Result<Vec<InducedGeometry>, GeometryError> {
    let n = d.n();
    let gens = vec![d.alpha().clone(), d.beta().clone()];
    let group = Arc::new(PermGroup::new(n, &gens)?);
    let orbits = pair_orbits(n, &gens);
    // stabilizers in one orbit are conjugate: compute one, transport the rest
    let mut by_fp: BTreeMap<(usize, String, Option<Vec<(u64, u64)>>), (Fingerprint, Vec<((usize, usize), LabelSubgroup)>)> =
        BTreeMap::new();
    for orbit in &orbits {
        let ((i, j), _) = orbit[0];
        let stab: Subgroup = group.pointwise_stabilizer(&[i, j])?;
        let fixed = stab.fixed_points();
        let fp = stab.fingerprint().clone();
        let entry = by_fp
            .entry(order_key(&fp))
            .or_insert_with(|| (fp.clone(), Vec::new()));
        for (q, g) in orbit {
            let ginv = g.inverse();
            let mut fp_set: Vec<usize> = fixed.iter().map(|&p| g.apply(p)).collect();
            fp_set.sort_unstable();
            let generators = stab
                .generators()
                .iter()
                .map(|h| ginv.then(h).then(g))
                .collect();
            entry.1.push((
                *q,
                LabelSubgroup {
                    fixed_points: fp_set,
                    generators,
                },
            ));
        }
    }
    let mut out = Vec::new();
    for (_, (fingerprint, members)) in by_fp {
        let mut key_ids: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for (_, s) in &members {
            let next = key_ids.len();
            key_ids.entry(s.fixed_points.clone()).or_insert(next);
        }
        // renumber labels by key order for determinism
        let ordered: Vec<Vec<usize>> = key_ids.keys().cloned().collect();
        let id_of: BTreeMap<&Vec<usize>, usize> = ordered.iter().enumerate().map(|(k, v)| (v, k)).collect();
        let mut graph = LabeledGraph::new(n);
        let mut subgroups: Vec<Option<LabelSubgroup>> = vec![None; ordered.len()];
        let mut pairs = Vec::new();
        for ((u, v), s) in members {
            let l = id_of[&s.fixed_points];
            graph.set(u, v, Some(l));
            pairs.push((u, v));
            subgroups[l].get_or_insert(s);
        }
        pairs.sort_unstable();
        let geometry = Geometry::from_labeled(graph, ordered, Some(fingerprint.clone()));
        out.push(InducedGeometry {
            class: StabilizerClass {
                fingerprint,
                pairs,
                subgroups: subgroups.into_iter().map(|s| s.expect("every label has a pair")).collect(),
            },
            geometry,
        });
    }
    Ok(out)
}

/// Edge and line union on a common point set. Labels with the same key are
/// identified; on an edge present in both, `g1`'s label is kept.
pub fn union_geometry(g1: &Geometry, g2: &Geometry) -> Result<Geometry, GeometryError> {
    let n = g1.point_count();
    if n != g2.point_count() {
        return Err(GeometryError::PointSetMismatch(n, g2.point_count()));
    }
    let mut keys: Vec<Vec<usize>> = Vec::new();
    let mut id_of: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut intern = |k: &Vec<usize>| -> usize {
        *id_of.entry(k.clone()).or_insert_with(|| {
            keys.push(k.clone());
            keys.len() - 1
        })
    };
    let mut graph = LabeledGraph::new(n);
    for (u, v, l) in g1.graph.edges() {
        graph.set(u, v, Some(intern(&g1.label_keys[l])));
    }
    for (u, v, l) in g2.graph.edges() {
        if !graph.adjacent(u, v) {
            graph.set(u, v, Some(intern(&g2.label_keys[l])));
        }
    }
    let fingerprint = if g1.fingerprint == g2.fingerprint { g1.fingerprint.clone() } else { None };
    Ok(Geometry::from_labeled(graph, keys, fingerprint))
}

/// Removes the edges of the given lines (each must be a line of `g`).
pub fn remove_lines(g: &Geometry, lines: &[Vec<usize>]) -> Result<Geometry, GeometryError> {
    let mut graph = g.graph.clone();
    for line in lines {
        let mut sorted = line.clone();
        sorted.sort_unstable();
        if !g.lines.contains(&sorted) {
            return Err(GeometryError::UnknownLine(line.clone()));
        }
        for (a, &u) in sorted.iter().enumerate() {
            for &v in &sorted[a + 1..] {
                graph.set(u, v, None);
            }
        }
    }
    Ok(Geometry::from_labeled(graph, g.label_keys.clone(), g.fingerprint.clone()))
}

/// First `k` pairwise disjoint lines in lexicographic search order.
pub fn disjoint_lines(g: &Geometry, k: usize) -> Option<Vec<Vec<usize>>> {
    fn go(lines: &[Vec<usize>], start: usize, k: usize, chosen: &mut Vec<usize>) -> bool {
        if chosen.len() == k {
            return true;
        }
        for i in start..lines.len() {
            if chosen.iter().all(|&c| lines[c].iter().all(|p| !lines[i].contains(p))) {
                chosen.push(i);
                if go(lines, i + 1, k, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::new();
    go(&g.lines, 0, k, &mut chosen).then(|| chosen.into_iter().map(|i| g.lines[i].clone()).collect())
}
