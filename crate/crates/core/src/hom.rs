//! Homomorphism, embedding and strong-embedding counting, exact rational
//! densities, the inclusion-exclusion conversions between the three
//! counts, density metrics over graph classes, and homomorphism
//! indistinguishability.

use num_rational::Rational64;
use num_traits::Zero;

use crate::graph::{self, cycle, path, Graph};
use crate::GraphsimError;

/// Number of maps V_F → V_G preserving edges (backtracking with
/// adjacency pruning; exact).
pub fn hom(f: &Graph, g: &Graph) -> i64 {
    count_maps(f, g, false, false)
}

/// Number of injective edge-preserving maps.
pub fn emb(f: &Graph, g: &Graph) -> i64 {
    count_maps(f, g, true, false)
}

/// Number of injective maps preserving edges and non-edges (induced
/// copies, counted with labels).
pub fn semb(f: &Graph, g: &Graph) -> i64 {
    count_maps(f, g, true, true)
}

fn count_maps(f: &Graph, g: &Graph, injective: bool, strong: bool) -> i64 {
    let k = f.order();
    let n = g.order();
    if k == 0 {
        return 1;
    }
    let mut image = vec![usize::MAX; k];
    let mut used = vec![false; n];
    let mut count = 0i64;
    fn rec(
        f: &Graph,
        g: &Graph,
        injective: bool,
        strong: bool,
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        u: usize,
        count: &mut i64,
    ) {
        let k = f.order();
        if u == k {
            *count += 1;
            return;
        }
        for x in 0..g.order() {
            if injective && used[x] {
                continue;
            }
            let ok = (0..u).all(|up| {
                let fe = f.has_edge(u, up);
                let ge = g.has_edge(x, image[up]);
                if strong {
                    fe == ge
                } else {
                    !fe || ge
                }
            });
            if !ok {
                continue;
            }
            image[u] = x;
            if injective {
                used[x] = true;
            }
            rec(f, g, injective, strong, image, used, u + 1, count);
            if injective {
                used[x] = false;
            }
        }
    }
    rec(f, g, injective, strong, &mut image, &mut used, 0, &mut count);
    count
}

/// hom(T, G) for a tree T by root-down dynamic programming in
/// O(|T|·n²); cross-checked against the backtracking counter.
pub fn hom_tree(t: &Graph, g: &Graph) -> Result<i64, GraphsimError> {
    let k = t.order();
    if k == 0 {
        return Ok(1);
    }
    if !t.is_connected() || t.num_edges() != k - 1 {
        return Err(GraphsimError::InvalidArgument(
            "tree homomorphism counting needs a connected acyclic pattern".into(),
        ));
    }
    let n = g.order();
    // BFS order from root 0; children processed before parents below
    let mut parent = vec![usize::MAX; k];
    let mut order = vec![0usize];
    let mut seen = vec![false; k];
    seen[0] = true;
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for w in t.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = u;
                order.push(w);
            }
        }
    }
    // cnt[u][x] = #homs of the subtree rooted at u with u ↦ x
    let mut cnt = vec![vec![1i64; n]; k];
    for &u in order.iter().rev() {
        if u == 0 {
            continue;
        }
        let p = parent[u];
        for x in 0..n {
            let s: i64 = g.neighbors(x).iter().map(|&y| cnt[u][y]).sum();
            cnt[p][x] *= s;
        }
    }
    Ok(cnt[0].iter().sum())
}

fn falling_factorial(n: usize, k: usize) -> i64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64)
}

/// Homomorphism density hom(F,G) / n^k as an exact rational.
pub fn hd(f: &Graph, g: &Graph) -> Rational64 {
    let n = g.order() as i64;
    let denom = n.pow(f.order() as u32);
    Rational64::new(hom(f, g), denom)
}

/// Embedding density emb(F,G) / (n)_k; zero by convention when k > n.
pub fn ed_density(f: &Graph, g: &Graph) -> Rational64 {
    let denom = falling_factorial(g.order(), f.order());
    if denom == 0 {
        return Rational64::zero();
    }
    Rational64::new(emb(f, g), denom)
}

/// Strong-embedding (induced) density semb(F,G) / (n)_k; zero when k > n.
pub fn sd(f: &Graph, g: &Graph) -> Rational64 {
    let denom = falling_factorial(g.order(), f.order());
    if denom == 0 {
        return Rational64::zero();
    }
    Rational64::new(semb(f, g), denom)
}

// ---------------------------------------------------------------------
// Conversions between the three counts
// ---------------------------------------------------------------------

fn vertex_pairs(k: usize) -> Vec<(usize, usize)> {
    (0..k).flat_map(|u| ((u + 1)..k).map(move |v| (u, v))).collect()
}

fn edge_mask(f: &Graph, pairs: &[(usize, usize)]) -> usize {
    let mut mask = 0usize;
    for (i, &(u, v)) in pairs.iter().enumerate() {
        if f.has_edge(u, v) {
            mask |= 1 << i;
        }
    }
    mask
}

fn graph_from_mask(k: usize, pairs: &[(usize, usize)], mask: usize) -> Graph {
    let edges: Vec<(usize, usize)> = pairs
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &e)| e)
        .collect();
    Graph::new(k, &edges).unwrap()
}

/// emb(F,G) as a sum of induced counts over all supergraphs of F on the
/// same vertex set.
pub fn emb_via_semb(f: &Graph, g: &Graph) -> i64 {
    let pairs = vertex_pairs(f.order());
    let base = edge_mask(f, &pairs);
    let full = (1usize << pairs.len()) - 1;
    let free = full & !base;
    let mut total = 0i64;
    let mut extra = free;
    loop {
        total += semb(&graph_from_mask(f.order(), &pairs, base | extra), g);
        if extra == 0 {
            break;
        }
        extra = (extra - 1) & free;
    }
    total
}

/// All set partitions of 0..k as block-index vectors.
fn partitions(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut assign = vec![0usize; k];
    fn rec(assign: &mut Vec<usize>, i: usize, max_block: usize, out: &mut Vec<Vec<usize>>) {
        if i == assign.len() {
            out.push(assign.clone());
            return;
        }
        for b in 0..=max_block + 1 {
            assign[i] = b;
            rec(assign, i + 1, max_block.max(b), out);
        }
    }
    if k == 0 {
        return vec![vec![]];
    }
    assign[0] = 0;
    rec(&mut assign, 1, 0, &mut out);
    out
}

/// Quotient F/P; `None` when contracting an edge creates a loop.
fn quotient(f: &Graph, part: &[usize]) -> Option<Graph> {
    let blocks = part.iter().max().map_or(0, |m| m + 1);
    let mut edges = Vec::new();
    for (u, v) in f.edges() {
        if part[u] == part[v] {
            return None; // loop
        }
        edges.push((part[u], part[v]));
    }
    Some(Graph::new(blocks, &edges).unwrap())
}

/// hom(F,G) = Σ_P emb(F/P, G) over set partitions (loopy quotients
/// contribute nothing).
pub fn hom_via_emb(f: &Graph, g: &Graph) -> i64 {
    partitions(f.order())
        .iter()
        .filter_map(|p| quotient(f, p))
        .map(|q| emb(&q, g))
        .sum()
}

/// hom(F,G) through induced counts: the partition expansion with each
/// emb expanded by supergraph summation.
pub fn hom_via_semb(f: &Graph, g: &Graph) -> i64 {
    partitions(f.order())
        .iter()
        .filter_map(|p| quotient(f, p))
        .map(|q| emb_via_semb(&q, g))
        .sum()
}

/// Möbius weight μ_P = (−1)^{k−|P|} Π_blocks (|block|−1)!.
fn mobius_weight(part: &[usize]) -> i64 {
    let blocks = part.iter().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0usize; blocks];
    for &b in part {
        sizes[b] += 1;
    }
    let sign = if (part.len() - blocks) % 2 == 0 { 1 } else { -1 };
    sign * sizes
        .iter()
        .map(|&s| (1..s).fold(1i64, |a, i| a * i as i64))
        .product::<i64>()
}

/// emb(F,G) = Σ_P μ_P hom(F/P, G) (homs from loopy quotients into loop-
/// free targets vanish, so those partitions drop out).
pub fn emb_via_hom(f: &Graph, g: &Graph) -> i64 {
    partitions(f.order())
        .iter()
        .map(|p| match quotient(f, p) {
            Some(q) => mobius_weight(p) * hom(&q, g),
            None => 0,
        })
        .sum()
}

/// semb(F,G) = Σ_{E' ⊇ E_F} (−1)^{|E'|−|E_F|} emb((V,E'), G).
pub fn semb_via_emb(f: &Graph, g: &Graph) -> i64 {
    let pairs = vertex_pairs(f.order());
    let base = edge_mask(f, &pairs);
    let full = (1usize << pairs.len()) - 1;
    let free = full & !base;
    let mut total = 0i64;
    let mut extra = free;
    loop {
        let sign = if (extra.count_ones() % 2) == 0 { 1 } else { -1 };
        total += sign * emb(&graph_from_mask(f.order(), &pairs, base | extra), g);
        if extra == 0 {
            break;
        }
        extra = (extra - 1) & free;
    }
    total
}

// ---------------------------------------------------------------------
// Graph classes and density metrics
// ---------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphClass {
    /// All labeled graphs on [k]: 2^{k(k-1)/2} patterns per size.
    AllGraphsLabeled,
    /// One representative per isomorphism class of trees.
    Trees,
    Cycles,
    Paths,
}

/// Deterministic enumeration of the size-k members of a class.
pub fn class_members(class: GraphClass, k: usize) -> Vec<Graph> {
    match class {
        GraphClass::AllGraphsLabeled => {
            let pairs = vertex_pairs(k);
            (0..(1usize << pairs.len()))
                .map(|mask| graph_from_mask(k, &pairs, mask))
                .collect()
        }
        GraphClass::Trees => trees_of_order(k),
        GraphClass::Cycles => {
            if k >= 3 {
                vec![cycle(k).unwrap()]
            } else {
                vec![]
            }
        }
        GraphClass::Paths => {
            if k >= 1 {
                vec![path(k)]
            } else {
                vec![]
            }
        }
    }
}

/// Trees on k vertices, one per isomorphism class, via Prüfer sequences
/// with isomorphism deduplication.
pub fn trees_of_order(k: usize) -> Vec<Graph> {
    match k {
        0 => return vec![],
        1 => return vec![Graph::new(1, &[]).unwrap()],
        2 => return vec![Graph::new(2, &[(0, 1)]).unwrap()],
        _ => {}
    }
    let mut reps: Vec<Graph> = Vec::new();
    let len = k - 2;
    let mut seq = vec![0usize; len];
    loop {
        let t = tree_from_pruefer(k, &seq);
        if !reps.iter().any(|r| graph::isomorphic(r, &t).is_some()) {
            reps.push(t);
        }
        // next sequence in base-k counting
        let mut i = 0;
        while i < len {
            seq[i] += 1;
            if seq[i] < k {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
        if i == len {
            break;
        }
    }
    reps
}

fn tree_from_pruefer(k: usize, seq: &[usize]) -> Graph {
    let mut degree = vec![1usize; k];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(k - 1);
    let mut leaf_heap: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = (0..k)
        .filter(|&v| degree[v] == 1)
        .map(std::cmp::Reverse)
        .collect();
    for &s in seq {
        let std::cmp::Reverse(leaf) = leaf_heap.pop().unwrap();
        edges.push((leaf, s));
        degree[s] -= 1;
        if degree[s] == 1 {
            leaf_heap.push(std::cmp::Reverse(s));
        }
    }
    let std::cmp::Reverse(a) = leaf_heap.pop().unwrap();
    let std::cmp::Reverse(b) = leaf_heap.pop().unwrap();
    edges.push((a, b));
    Graph::new(k, &edges).unwrap()
}

#[derive(Clone, Debug)]
pub struct DensityMetric {
    pub value: f64,
    /// Exact rational value of the squared truncated sum.
    pub squared_sum: Rational64,
    /// The omitted tail is at most this (each squared difference ≤ 1).
    pub tail_bound: f64,
}

/// Truncated density metric
/// sqrt(Σ_{k≤k_max} 1/(2^k |ℱ_k|) Σ_{F∈ℱ_k} (hd(F,G) − hd(F,H))²),
/// computed exactly in rationals before the square root.
pub fn delta_class(
    g: &Graph,
    h: &Graph,
    class: GraphClass,
    k_max: usize,
) -> Result<DensityMetric, GraphsimError> {
    if class == GraphClass::AllGraphsLabeled && k_max > 5 {
        return Err(GraphsimError::BudgetExceeded(
            "labeled-graph enumeration above size 5".into(),
        ));
    }
    let mut total = Rational64::zero();
    for k in 1..=k_max {
        let members = class_members(class, k);
        if members.is_empty() {
            continue;
        }
        let weight = Rational64::new(1, (1i64 << k) * members.len() as i64);
        let mut inner = Rational64::zero();
        for f in &members {
            let d = hd(f, g) - hd(f, h);
            inner += d * d;
        }
        total += weight * inner;
    }
    let value = rational_to_f64(total).sqrt();
    Ok(DensityMetric {
        value,
        squared_sum: total,
        tail_bound: (0.5f64).powi(k_max as i32),
    })
}

pub fn rational_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// True when G and H have equal homomorphism counts from every member of
/// the class up to size k_max. Different orders are compared through the
/// blow-up scaling hom(F, G^{⊙c}) = c^{|F|}·hom(F, G).
pub fn hom_indistinguishable(
    g: &Graph,
    h: &Graph,
    class: GraphClass,
    k_max: usize,
) -> Result<bool, GraphsimError> {
    let (m, n) = (g.order() as i128, h.order() as i128);
    for k in 1..=k_max {
        for f in class_members(class, k) {
            let a = hom(&f, g) as i128;
            let b = hom(&f, h) as i128;
            let (a, b) = if m == n {
                (a, b)
            } else {
                // compare on the order-mn blow-ups
                (a * n.pow(k as u32), b * m.pow(k as u32))
            };
            if a != b {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, edgeless, erdos_renyi, two_triangles};
    use crate::matrix::Matrix;

    fn trace_power(g: &Graph, k: u32) -> i64 {
        let a = g.adjacency();
        let mut p = Matrix::identity(g.order());
        for _ in 0..k {
            p = p.matmul(&a);
        }
        (0..g.order()).map(|i| p.get(i, i) as i64).sum()
    }

    #[test]
    fn hom_base_cases() {
        for seed in 0..5u64 {
            let g = erdos_renyi(6, 0.5, seed).unwrap();
            assert_eq!(hom(&complete(1), &g), g.order() as i64);
            assert_eq!(hom(&complete(2), &g), 2 * g.num_edges() as i64);
        }
    }

    #[test]
    fn cycle_homs_are_traces() {
        for seed in 0..10u64 {
            let g = erdos_renyi(6, 0.5, seed).unwrap();
            for k in 3..=6usize {
                assert_eq!(hom(&cycle(k).unwrap(), &g), trace_power(&g, k as u32), "k={k}");
            }
        }
    }

    #[test]
    fn tree_dp_matches_backtracking() {
        for seed in 0..5u64 {
            let g = erdos_renyi(6, 0.5, seed).unwrap();
            for k in 1..=5usize {
                for t in trees_of_order(k) {
                    assert_eq!(hom_tree(&t, &g).unwrap(), hom(&t, &g));
                }
            }
        }
        assert_eq!(hom_tree(&path(2), &complete(3)).unwrap(), 6);
        assert!(hom_tree(&cycle(3).unwrap(), &complete(3)).is_err());
        assert!(hom_tree(&edgeless(2), &complete(3)).is_err());
    }

    #[test]
    fn count_inequalities() {
        assert_eq!(emb(&complete(2), &complete(3)), 6);
        assert_eq!(semb(&edgeless(2), &complete(3)), 0);
        for seed in 0..5u64 {
            let f = erdos_renyi(3, 0.5, seed).unwrap();
            let g = erdos_renyi(6, 0.5, seed + 500).unwrap();
            let (s, e, h) = (semb(&f, &g), emb(&f, &g), hom(&f, &g));
            assert!(s <= e && e <= h, "seed {seed}");
        }
    }

    #[test]
    fn density_examples() {
        // complete patterns in complete targets
        for (k, n) in [(2usize, 3usize), (3, 4), (2, 5)] {
            let f = complete(k);
            let g = complete(n);
            assert!(hd(&f, &g) < Rational64::new(1, 1));
            assert_eq!(ed_density(&f, &g), Rational64::new(1, 1));
            assert_eq!(sd(&f, &g), Rational64::new(1, 1));
        }
        assert_eq!(sd(&edgeless(2), &complete(4)), Rational64::zero());
        assert_eq!(ed_density(&edgeless(2), &complete(4)), Rational64::new(1, 1));
        assert_eq!(hd(&edgeless(2), &complete(4)), Rational64::new(1, 1));
        // k > n convention
        assert_eq!(sd(&complete(4), &complete(3)), Rational64::zero());
        assert_eq!(ed_density(&complete(4), &complete(3)), Rational64::zero());
    }

    #[test]
    fn blow_up_preserves_hom_density() {
        for seed in 0..4u64 {
            let g = erdos_renyi(4, 0.5, seed).unwrap();
            for f in class_members(GraphClass::AllGraphsLabeled, 3) {
                for k in 2..=3usize {
                    assert_eq!(hd(&f, &g), hd(&f, &g.blow_up(k).unwrap()));
                }
            }
        }
    }

    #[test]
    fn conversion_round_trips() {
        for seed in 0..4u64 {
            let g = erdos_renyi(5, 0.5, seed + 900).unwrap();
            for k in 1..=4usize {
                for f in class_members(GraphClass::AllGraphsLabeled, k) {
                    assert_eq!(emb_via_semb(&f, &g), emb(&f, &g), "(23)");
                    assert_eq!(hom_via_emb(&f, &g), hom(&f, &g), "(24)");
                    assert_eq!(hom_via_semb(&f, &g), hom(&f, &g), "(25)");
                    assert_eq!(emb_via_hom(&f, &g), emb(&f, &g), "(30)");
                    assert_eq!(semb_via_emb(&f, &g), semb(&f, &g), "(31)");
                }
            }
        }
    }

    #[test]
    fn edgeless_pair_partition_expansion() {
        // two partitions of a 2-set: discrete gives emb, merged gives |V|
        let f = edgeless(2);
        for seed in 0..3u64 {
            let g = erdos_renyi(5, 0.5, seed).unwrap();
            assert_eq!(hom(&f, &g), emb(&f, &g) + g.order() as i64);
        }
    }

    #[test]
    fn tree_census() {
        assert_eq!(trees_of_order(1).len(), 1);
        assert_eq!(trees_of_order(2).len(), 1);
        assert_eq!(trees_of_order(3).len(), 1);
        assert_eq!(trees_of_order(4).len(), 2);
        assert_eq!(trees_of_order(5).len(), 3);
        for t in trees_of_order(5) {
            assert_eq!(t.num_edges(), 4);
            assert!(t.is_connected());
        }
    }

    #[test]
    fn refinement_equivalent_pair_agrees_on_trees() {
        let c6 = cycle(6).unwrap();
        let tt = two_triangles();
        for k in 1..=5usize {
            for t in trees_of_order(k) {
                assert_eq!(hom(&t, &c6), hom(&t, &tt), "tree of order {k}");
            }
        }
        // but triangle counts differ
        assert_eq!(hom(&cycle(3).unwrap(), &c6), 0);
        assert_eq!(hom(&cycle(3).unwrap(), &tt), 12);
    }

    #[test]
    fn indistinguishability_calls() {
        let c6 = cycle(6).unwrap();
        let tt = two_triangles();
        assert!(!hom_indistinguishable(&c6, &tt, GraphClass::Cycles, 6).unwrap());
        assert!(hom_indistinguishable(&c6, &tt, GraphClass::Trees, 5).unwrap());
        let g = erdos_renyi(6, 0.5, 5).unwrap();
        let h = g.relabel(&[5, 3, 1, 0, 2, 4]).unwrap();
        assert!(hom_indistinguishable(&g, &h, GraphClass::AllGraphsLabeled, 3).unwrap());
        // blow-up comparison across orders
        let b = g.blow_up(2).unwrap();
        assert!(hom_indistinguishable(&g, &b, GraphClass::Trees, 4).unwrap());
    }

    #[test]
    fn delta_class_cases() {
        let g = erdos_renyi(4, 0.5, 3).unwrap();
        let d = delta_class(&g, &g.blow_up(2).unwrap(), GraphClass::AllGraphsLabeled, 4).unwrap();
        assert!(d.squared_sum.is_zero());
        assert_eq!(d.value, 0.0);
        let d = delta_class(&g, &g, GraphClass::AllGraphsLabeled, 3).unwrap();
        assert!(d.squared_sum.is_zero());
        let d = delta_class(&path(3), &complete(3), GraphClass::Trees, 3).unwrap();
        assert!(d.value > 0.0);
        assert_eq!(d.tail_bound, 0.125);
    }

    #[test]
    fn multiplicative_over_pattern_unions() {
        for seed in 0..4u64 {
            let f1 = erdos_renyi(3, 0.5, seed).unwrap();
            let f2 = erdos_renyi(2, 0.7, seed + 600).unwrap();
            let g = erdos_renyi(5, 0.5, seed + 700).unwrap();
            assert_eq!(hom(&f1.disjoint_union(&f2), &g), hom(&f1, &g) * hom(&f2, &g));
        }
    }

    #[test]
    fn density_sandwich_for_large_targets() {
        // sd ≤ ed ≤ hd + ε for n ≥ k(k−1)/(2ε), here k=3, ε=0.1, n=30
        let eps = Rational64::new(1, 10);
        for seed in 0..3u64 {
            let g = erdos_renyi(30, 0.5, seed).unwrap();
            for f in class_members(GraphClass::AllGraphsLabeled, 3) {
                let (s, e, h) = (sd(&f, &g), ed_density(&f, &g), hd(&f, &g));
                assert!(s <= e);
                assert!(e <= h + eps);
            }
        }
    }
}
