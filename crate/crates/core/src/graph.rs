//! Small simple graphs with labeled edges: triangle and chordless-square
//! counts, maximal cliques, connectivity and isomorphism.

use std::collections::BTreeMap;

use petgraph::graph::UnGraph;

/// Simple undirected graph on `0..n`, each edge carrying a label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    n: usize,
    /// `label[u][v]`, `None` for non-edges.
    label: Vec<Vec<Option<usize>>>,
}

impl LabeledGraph {
    pub fn new(n: usize) -> Self {
        LabeledGraph {
            n,
            label: vec![vec![None; n]; n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, usize)>) -> Self {
        let mut g = LabeledGraph::new(n);
        for (u, v, l) in edges {
            g.set(u, v, Some(l));
        }
        g
    }

    pub fn uniform(n: usize, edges: &[(usize, usize)]) -> Self {
        LabeledGraph::from_edges(n, edges.iter().map(|&(u, v)| (u, v, 0)))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, u: usize, v: usize, l: Option<usize>) {
        assert!(u != v && u < self.n && v < self.n, "bad edge ({u}, {v})");
        self.label[u][v] = l;
        self.label[v][u] = l;
    }

    pub fn label(&self, u: usize, v: usize) -> Option<usize> {
        self.label[u][v]
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.label[u][v].is_some()
    }

    pub fn neighbours(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.label[u][v].is_some())
    }

    pub fn degree(&self, u: usize) -> usize {
        self.neighbours(u).count()
    }

    /// Edges `(u, v, label)` with `u < v`, lexicographic.
    pub fn edges(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if let Some(l) = self.label[u][v] {
                    out.push((u, v, l));
                }
            }
        }
        out
    }

    pub fn plain_edges(&self) -> Vec<(usize, usize)> {
        self.edges().into_iter().map(|(u, v, _)| (u, v)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn labels(&self) -> Vec<usize> {
        let mut ls: Vec<usize> = self.edges().into_iter().map(|e| e.2).collect();
        ls.sort_unstable();
        ls.dedup();
        ls
    }

    pub fn triangles(&self) -> u64 {
        self.count_triangles(false)
    }

    /// Triangles whose three sides carry the same label.
    pub fn monochromatic_triangles(&self) -> u64 {
        self.count_triangles(true)
    }

    fn count_triangles(&self, same_label: bool) -> u64 {
        let mut t = 0;
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                let Some(luv) = self.label[u][v] else { continue };
                for w in (v + 1)..self.n {
                    if let (Some(a), Some(b)) = (self.label[u][w], self.label[v][w]) {
                        if !same_label || (a == luv && b == luv) {
                            t += 1;
                        }
                    }
                }
            }
        }
        t
    }

    /// Chordless 4-cycles: every one has exactly two non-adjacent diagonals,
    /// so summing over non-adjacent pairs `{u, w}` the non-adjacent pairs in
    /// their common neighbourhood counts each twice.
    pub fn chordless_squares(&self) -> u64 {
        self.count_squares(false)
    }

    /// Chordless 4-cycles whose four sides carry the same label.
    pub fn monochromatic_squares(&self) -> u64 {
        self.count_squares(true)
    }

    fn count_squares(&self, same_label: bool) -> u64 {
        let mut total = 0;
        for u in 0..self.n {
            for w in (u + 1)..self.n {
                if self.adjacent(u, w) {
                    continue;
                }
                let common: Vec<usize> = (0..self.n)
                    .filter(|&x| self.adjacent(u, x) && self.adjacent(w, x))
                    .collect();
                for (i, &v) in common.iter().enumerate() {
                    for &x in &common[i + 1..] {
                        if self.adjacent(v, x) {
                            continue;
                        }
                        if same_label {
                            let l = self.label[u][v];
                            if [self.label[v][w], self.label[w][x], self.label[x][u]]
                                .iter()
                                .any(|&m| m != l)
                            {
                                continue;
                            }
                        }
                        total += 1;
                    }
                }
            }
        }
        total / 2
    }

    /// Whether every vertex is in one component (vacuously true for `n ≤ 1`).
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in self.neighbours(u) {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// No isolated vertices.
    pub fn is_spanning(&self) -> bool {
        (0..self.n).all(|u| self.degree(u) > 0)
    }

    /// Maximal cliques of the subgraph of edges labeled `l`, each sorted, in
    /// lexicographic order. Isolated vertices of that subgraph are skipped.
    pub fn maximal_cliques_with_label(&self, l: usize) -> Vec<Vec<usize>> {
        let adj: Vec<Vec<bool>> = (0..self.n)
            .map(|u| (0..self.n).map(|v| self.label[u][v] == Some(l)).collect())
            .collect();
        let candidates: Vec<usize> = (0..self.n).filter(|&u| adj[u].iter().any(|&b| b)).collect();
        let mut out = Vec::new();
        bron_kerbosch(&adj, &mut Vec::new(), candidates, Vec::new(), &mut out);
        for c in out.iter_mut() {
            c.sort_unstable();
        }
        out.sort();
        out
    }

    /// Maximal cliques of each label class, grouped by label.
    pub fn lines(&self) -> BTreeMap<usize, Vec<Vec<usize>>> {
        self.labels()
            .into_iter()
            .map(|l| (l, self.maximal_cliques_with_label(l)))
            .collect()
    }

    pub fn to_petgraph(&self) -> UnGraph<(), ()> {
        let mut g = UnGraph::<(), ()>::with_capacity(self.n, 0);
        let nodes: Vec<_> = (0..self.n).map(|_| g.add_node(())).collect();
        for (u, v, _) in self.edges() {
            g.add_edge(nodes[u], nodes[v], ());
        }
        g
    }

    /// Isomorphism of the underlying unlabeled graphs.
    pub fn isomorphic_to(&self, other: &LabeledGraph) -> bool {
        if self.n != other.n || self.edge_count() != other.edge_count() {
            return false;
        }
        let mut a: Vec<usize> = (0..self.n).map(|u| self.degree(u)).collect();
        let mut b: Vec<usize> = (0..other.n).map(|u| other.degree(u)).collect();
        a.sort_unstable();
        b.sort_unstable();
        a == b && petgraph::algo::is_isomorphic(&self.to_petgraph(), &other.to_petgraph())
    }

    pub fn complement(&self) -> LabeledGraph {
        let mut g = LabeledGraph::new(self.n);
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if !self.adjacent(u, v) {
                    g.set(u, v, Some(0));
                }
            }
        }
        g
    }
}

fn bron_kerbosch(
    adj: &[Vec<bool>],
    r: &mut Vec<usize>,
    p: Vec<usize>,
    x: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() {
        if x.is_empty() && r.len() >= 2 {
            out.push(r.clone());
        }
        return;
    }
    // Tomita pivot: most neighbours in P
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
        .unwrap();
    let mut p = p;
    let mut x = x;
    let branch: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    for v in branch {
        r.push(v);
        let np = p.iter().copied().filter(|&w| adj[v][w]).collect();
        let nx = x.iter().copied().filter(|&w| adj[v][w]).collect();
        bron_kerbosch(adj, r, np, nx, out);
        r.pop();
        p.retain(|&w| w != v);
        x.push(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> LabeledGraph {
        let e: Vec<_> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
        LabeledGraph::uniform(n, &e)
    }

    fn brute_force_squares(g: &LabeledGraph) -> u64 {
        // ordered 4-tuples forming a chordless cycle, divided by 8 symmetries
        let n = g.order();
        let mut k = 0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let vs = [a, b, c, d];
                        if (0..4).any(|i| (i + 1..4).any(|j| vs[i] == vs[j])) {
                            continue;
                        }
                        if g.adjacent(a, b)
                            && g.adjacent(b, c)
                            && g.adjacent(c, d)
                            && g.adjacent(d, a)
                            && !g.adjacent(a, c)
                            && !g.adjacent(b, d)
                        {
                            k += 1;
                        }
                    }
                }
            }
        }
        k / 8
    }

    #[test]
    fn square_and_triangle_counts() {
        let c4 = LabeledGraph::uniform(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!((c4.triangles(), c4.chordless_squares()), (0, 1));
        let k6 = complete(6);
        assert_eq!((k6.triangles(), k6.chordless_squares()), (20, 0));
    }

    #[test]
    fn square_count_agrees_with_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let n = rng.gen_range(4..10);
            let mut g = LabeledGraph::new(n);
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(0.5) {
                        g.set(u, v, Some(0));
                    }
                }
            }
            assert_eq!(g.chordless_squares(), brute_force_squares(&g));
        }
    }

    #[test]
    fn cliques_of_two_triangles_sharing_a_vertex() {
        let g = LabeledGraph::uniform(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]);
        assert_eq!(g.maximal_cliques_with_label(0), vec![vec![0, 1, 2], vec![2, 3, 4]]);
    }

    #[test]
    fn labels_split_cliques() {
        let mut g = complete(4);
        g.set(0, 1, Some(1));
        assert_eq!(g.monochromatic_triangles(), 2);
        assert_eq!(g.maximal_cliques_with_label(1), vec![vec![0, 1]]);
        assert_eq!(g.maximal_cliques_with_label(0), vec![vec![0, 2, 3], vec![1, 2, 3]]);
    }

    #[test]
    fn connectivity() {
        let two_triangles = LabeledGraph::uniform(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        assert!(!two_triangles.is_connected());
        assert!(two_triangles.is_spanning());
        assert!(complete(3).is_connected());
    }

    #[test]
    fn petersen_is_complement_of_triangular_five() {
        let pairs: Vec<(usize, usize)> = (0..5).flat_map(|a| ((a + 1)..5).map(move |b| (a, b))).collect();
        let mut kneser = Vec::new();
        let mut triangular = Vec::new();
        for i in 0..10 {
            for j in (i + 1)..10 {
                let (a, b) = (pairs[i], pairs[j]);
                let meet = a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1;
                if meet {
                    triangular.push((i, j));
                } else {
                    kneser.push((i, j));
                }
            }
        }
        let p = LabeledGraph::uniform(10, &kneser);
        let t = LabeledGraph::uniform(10, &triangular);
        assert!(p.complement().isomorphic_to(&t));
        assert!(!p.isomorphic_to(&t));
        assert_eq!((p.triangles(), p.chordless_squares()), (0, 0));
    }
}
