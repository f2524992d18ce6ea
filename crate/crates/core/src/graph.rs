//! Simple undirected graphs with a contiguous 0-based vertex set,
//! standard generators, blow-up/padding operations and file I/O.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::wl;
use crate::GraphsimError;

/// Sentinel distance for disconnected vertex pairs: `2 * |G|`, strictly
/// larger than any true shortest-path length, so distortion arithmetic
/// stays finite.
pub fn disconnected_sentinel(order: usize) -> usize {
    2 * order
}

/// An immutable simple undirected graph on vertices `0..order`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges)
    }
}

impl Graph {
    /// Builds a graph from an edge list; duplicate edges collapse, loops
    /// and out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphsimError> {
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            if u == v {
                return Err(GraphsimError::InvalidGraph(format!("loop edge {u} {v}")));
            }
            if u >= n || v >= n {
                return Err(GraphsimError::InvalidGraph(format!(
                    "edge {u} {v} out of range for order {n}"
                )));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Graph { n, edges: set })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&w| self.has_edge(v, w)).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        (0..self.n).filter(|&w| self.has_edge(v, w)).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.n];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    /// Parses the edge-list text format: first line `n m`, then `m` lines `u v`.
    pub fn from_edge_list(text: &str) -> Result<Self, GraphsimError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| GraphsimError::Parse("empty document".into(), 1))?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| GraphsimError::Parse("expected vertex count".into(), 1))?;
        let m: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| GraphsimError::Parse("expected edge count".into(), 1))?;
        if it.next().is_some() {
            return Err(GraphsimError::Parse("trailing tokens in header".into(), 1));
        }
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let (idx, line) = lines
                .next()
                .ok_or_else(|| GraphsimError::Parse("missing edge line".into(), m + 1))?;
            let lineno = idx + 1;
            let mut it = line.split_whitespace();
            let u: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| GraphsimError::Parse("expected vertex".into(), lineno))?;
            let v: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| GraphsimError::Parse("expected vertex".into(), lineno))?;
            if it.next().is_some() {
                return Err(GraphsimError::Parse("trailing tokens".into(), lineno));
            }
            if u == v {
                return Err(GraphsimError::Parse(format!("loop edge {u} {v}"), lineno));
            }
            if u >= n || v >= n {
                return Err(GraphsimError::Parse(
                    format!("vertex out of range in edge {u} {v}"),
                    lineno,
                ));
            }
            edges.push((u, v));
        }
        Graph::new(n, &edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    /// Parses the JSON format `{"n": int, "edges": [[u,v],...]}`.
    pub fn from_json(text: &str) -> Result<Self, GraphsimError> {
        #[derive(Deserialize)]
        struct Doc {
            n: usize,
            edges: Vec<(usize, usize)>,
        }
        let doc: Doc = serde_json::from_str(text)
            .map_err(|e| GraphsimError::Parse(format!("bad graph JSON: {e}"), 1))?;
        Graph::new(doc.n, &doc.edges)
    }

    pub fn to_json(&self) -> String {
        let edges: Vec<[usize; 2]> = self.edges.iter().map(|&(u, v)| [u, v]).collect();
        serde_json::to_string(&serde_json::json!({"n": self.n, "edges": edges})).unwrap()
    }

    pub fn adjacency(&self) -> Matrix {
        let mut a = Matrix::zeros(self.n, self.n);
        for &(u, v) in &self.edges {
            a.set(u, v, 1.0);
            a.set(v, u, 1.0);
        }
        a
    }

    /// Rebuilds a graph from a symmetric 0/1 adjacency matrix.
    pub fn from_adjacency(a: &Matrix) -> Result<Self, GraphsimError> {
        if a.rows() != a.cols() {
            return Err(GraphsimError::InvalidGraph("non-square adjacency".into()));
        }
        let n = a.rows();
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                let x = a.get(u, v);
                if x != a.get(v, u) {
                    return Err(GraphsimError::InvalidGraph("asymmetric adjacency".into()));
                }
                if x == 1.0 {
                    edges.push((u, v));
                } else if x != 0.0 {
                    return Err(GraphsimError::InvalidGraph("non-0/1 adjacency".into()));
                }
            }
        }
        for u in 0..n {
            if a.get(u, u) != 0.0 {
                return Err(GraphsimError::InvalidGraph("nonzero diagonal".into()));
            }
        }
        Graph::new(n, &edges)
    }

    /// Blow-up `G^{⊙k}`: vertex `(v,i)` at index `v*k + i` (v-major, so the
    /// adjacency of the blow-up equals the tensor blow-up of `A_G`).
    pub fn blow_up(&self, k: usize) -> Result<Self, GraphsimError> {
        if k == 0 {
            return Err(GraphsimError::InvalidArgument("blow-up factor 0".into()));
        }
        let mut edges = Vec::with_capacity(self.edges.len() * k * k);
        for &(u, v) in &self.edges {
            for i in 0..k {
                for j in 0..k {
                    edges.push((u * k + i, v * k + j));
                }
            }
        }
        Graph::new(self.n * k, &edges)
    }

    /// Adds `k` isolated vertices.
    pub fn pad(&self, k: usize) -> Self {
        Graph {
            n: self.n + k,
            edges: self.edges.clone(),
        }
    }

    /// All-pairs BFS shortest-path matrix; disconnected pairs get the
    /// sentinel `2*|G|`.
    pub fn distance_matrix(&self) -> Matrix {
        let n = self.n;
        let sentinel = disconnected_sentinel(n) as f64;
        let mut d = Matrix::zeros(n, n);
        let adj: Vec<Vec<usize>> = (0..n).map(|v| self.neighbors(v)).collect();
        for s in 0..n {
            let mut dist = vec![usize::MAX; n];
            dist[s] = 0;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
            for t in 0..n {
                let val = if dist[t] == usize::MAX {
                    sentinel
                } else {
                    dist[t] as f64
                };
                d.set(s, t, val);
            }
        }
        d
    }

    /// True if some distance entry used the disconnected sentinel.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Relabels vertices through the permutation `perm` (`perm[v]` is the
    /// new name of `v`).
    pub fn relabel(&self, perm: &[usize]) -> Result<Self, GraphsimError> {
        if perm.len() != self.n {
            return Err(GraphsimError::InvalidArgument("permutation length".into()));
        }
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        Graph::new(self.n, &edges)
    }

    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let mut edges: Vec<(usize, usize)> = self.edges.iter().copied().collect();
        edges.extend(other.edges.iter().map(|&(u, v)| (u + self.n, v + self.n)));
        Graph::new(self.n + other.n, &edges).unwrap()
    }
}

pub fn complete(n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .collect();
    Graph::new(n, &edges).unwrap()
}

pub fn edgeless(n: usize) -> Graph {
    Graph::new(n, &[]).unwrap()
}

pub fn path(n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
    Graph::new(n, &edges).unwrap()
}

pub fn cycle(n: usize) -> Result<Graph, GraphsimError> {
    if n < 3 {
        return Err(GraphsimError::InvalidArgument(format!(
            "cycle needs at least 3 vertices, got {n}"
        )));
    }
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
    edges.push((n - 1, 0));
    Graph::new(n, &edges)
}

pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (0..a)
        .flat_map(|u| (0..b).map(move |v| (u, a + v)))
        .collect();
    Graph::new(a + b, &edges).unwrap()
}

/// G(n, p) with edges drawn independently; deterministic for a fixed seed.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph, GraphsimError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphsimError::InvalidArgument(format!(
            "edge probability {p} outside [0,1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, &edges)
}

/// Two disjoint triangles on 6 vertices; WL-equivalent to `cycle(6)`.
pub fn two_triangles() -> Graph {
    Graph::new(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap()
}

/// Exact isomorphism test via backtracking with WL-coloring pruning.
/// Returns a witnessing bijection (`witness[v]` in H for `v` in G) when true.
pub fn isomorphic(g: &Graph, h: &Graph) -> Option<Vec<usize>> {
    if g.order() != h.order() || g.num_edges() != h.num_edges() {
        return None;
    }
    let n = g.order();
    if n == 0 {
        return Some(vec![]);
    }
    // Stable WL colors on the disjoint union restrict candidate images.
    let (gc, hc) = wl::joint_stable_colors(g, h);
    {
        let mut gh = std::collections::HashMap::new();
        let mut hh = std::collections::HashMap::new();
        for &c in &gc {
            *gh.entry(c).or_insert(0usize) += 1;
        }
        for &c in &hc {
            *hh.entry(c).or_insert(0usize) += 1;
        }
        if gh != hh {
            return None;
        }
    }
    let mut mapping = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn extend(
        g: &Graph,
        h: &Graph,
        gc: &[usize],
        hc: &[usize],
        mapping: &mut Vec<usize>,
        used: &mut Vec<bool>,
        v: usize,
    ) -> bool {
        let n = g.order();
        if v == n {
            return true;
        }
        for w in 0..n {
            if used[w] || gc[v] != hc[w] {
                continue;
            }
            let consistent = (0..v).all(|u| g.has_edge(u, v) == h.has_edge(mapping[u], w));
            if !consistent {
                continue;
            }
            mapping[v] = w;
            used[w] = true;
            if extend(g, h, gc, hc, mapping, used, v + 1) {
                return true;
            }
            mapping[v] = usize::MAX;
            used[w] = false;
        }
        false
    }
    if extend(g, h, &gc, &hc, &mut mapping, &mut used, 0) {
        Some(mapping)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::from_edge_list("3 3\n0 1\n1 2\n2 0").unwrap();
        assert_eq!(g.order(), 3);
        assert_eq!(g.num_edges(), 3);
        let again = Graph::from_edge_list(&g.to_edge_list()).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn edge_list_edgeless() {
        let g = Graph::from_edge_list("4 0").unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.num_edges(), 0);
    }

    #[test]
    fn edge_list_rejects_loop_with_line_number() {
        let err = Graph::from_edge_list("2 1\n0 0").unwrap_err();
        match err {
            GraphsimError::Parse(msg, line) => {
                assert_eq!(line, 2);
                assert!(msg.contains("loop"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn edge_list_rejects_out_of_range() {
        assert!(Graph::from_edge_list("2 1\n0 5").is_err());
    }

    #[test]
    fn json_round_trip_bit_exact() {
        let g = complete_bipartite(2, 3);
        let j = g.to_json();
        let g2 = Graph::from_json(&j).unwrap();
        assert_eq!(g, g2);
        assert_eq!(j, g2.to_json());
    }

    #[test]
    fn adjacency_k2() {
        let a = complete(2).adjacency();
        assert_eq!(a.row_major(), &[0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn adjacency_edgeless_is_zero() {
        assert!(edgeless(3).adjacency().row_major().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn adjacency_round_trip() {
        let g = erdos_renyi(7, 0.5, 11).unwrap();
        assert_eq!(Graph::from_adjacency(&g.adjacency()).unwrap(), g);
    }

    #[test]
    fn blow_up_counts() {
        // 4-vertex, 5-edge graph blown up by 6: 24 vertices, 180 edges.
        let g = Graph::new(4, &[(0, 1), (0, 2), (0, 3), (2, 1), (2, 3)]).unwrap();
        let b = g.blow_up(6).unwrap();
        assert_eq!(b.order(), 24);
        assert_eq!(b.num_edges(), 180);
    }

    #[test]
    fn blow_up_identity_and_zero() {
        let g = cycle(5).unwrap();
        assert!(isomorphic(&g.blow_up(1).unwrap(), &g).is_some());
        assert!(g.blow_up(0).is_err());
    }

    #[test]
    fn blow_up_k2_is_c4() {
        let b = complete(2).blow_up(2).unwrap();
        assert!(isomorphic(&b, &cycle(4).unwrap()).is_some());
    }

    #[test]
    fn blow_up_composes() {
        for seed in 0..4u64 {
            let g = erdos_renyi(4, 0.5, seed).unwrap();
            for k in 1..=3usize {
                for l in 1..=3usize {
                    let a = g.blow_up(k).unwrap().blow_up(l).unwrap();
                    let b = g.blow_up(k * l).unwrap();
                    assert!(isomorphic(&a, &b).is_some(), "k={k} l={l}");
                    assert_eq!(a.num_edges(), k * k * l * l * g.num_edges());
                }
            }
        }
    }

    #[test]
    fn pad_preserves_edges() {
        let g = complete(3).pad(2);
        assert_eq!(g.order(), 5);
        assert_eq!(g.num_edges(), 3);
        let h = complete(3).pad(0);
        assert_eq!(h, complete(3));
    }

    #[test]
    fn pad_adjacency_is_zero_bordered() {
        let g = cycle(4).unwrap();
        let a = g.adjacency();
        let ap = g.pad(2).adjacency();
        for u in 0..6 {
            for v in 0..6 {
                let expect = if u < 4 && v < 4 { a.get(u, v) } else { 0.0 };
                assert_eq!(ap.get(u, v), expect);
            }
        }
    }

    #[test]
    fn distance_matrix_basics() {
        let d = path(3).distance_matrix();
        assert_eq!(d.get(0, 2), 2.0);
        let k4 = complete(4).distance_matrix();
        for u in 0..4 {
            for v in 0..4 {
                assert_eq!(k4.get(u, v), if u == v { 0.0 } else { 1.0 });
            }
        }
    }

    #[test]
    fn distance_matrix_sentinel() {
        let g = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        let d = g.distance_matrix();
        assert_eq!(d.get(0, 2), 8.0); // sentinel 2n with n=4
        assert_eq!(d.get(1, 3), 8.0);
        assert_eq!(d.get(0, 1), 1.0);
    }

    #[test]
    fn distance_matrix_triangle_inequality_connected() {
        for seed in 0..10u64 {
            let g = erdos_renyi(8, 0.5, seed).unwrap();
            if !g.is_connected() {
                continue;
            }
            let d = g.distance_matrix();
            for a in 0..8 {
                for b in 0..8 {
                    for c in 0..8 {
                        assert!(d.get(a, b) <= d.get(a, c) + d.get(c, b));
                    }
                }
            }
        }
    }

    #[test]
    fn generators() {
        assert_eq!(complete(4).num_edges(), 6);
        assert!(isomorphic(&complete_bipartite(2, 2), &cycle(4).unwrap()).is_some());
        assert!(cycle(2).is_err());
        let a = erdos_renyi(10, 0.5, 42).unwrap();
        let b = erdos_renyi(10, 0.5, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn isomorphic_c6_vs_triangles() {
        assert!(isomorphic(&cycle(6).unwrap(), &two_triangles()).is_none());
    }

    #[test]
    fn isomorphic_relabeled() {
        let g = erdos_renyi(7, 0.4, 3).unwrap();
        let perm = vec![3, 5, 0, 6, 1, 4, 2];
        let h = g.relabel(&perm).unwrap();
        let w = isomorphic(&g, &h).expect("relabeled graph must be isomorphic");
        for u in 0..7 {
            for v in 0..7 {
                assert_eq!(g.has_edge(u, v), h.has_edge(w[u], w[v]));
            }
        }
    }
}
