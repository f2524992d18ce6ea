//! Weisfeiler-Leman color refinement, the per-iteration color histograms,
//! the WL kernel (geometric and truncated) and the metrics derived from it.
//!
//! Colors are canonical codes: the iteration-(i+1) color of a vertex is the
//! pair (own iteration-i color, sorted multiset of neighbor iteration-i
//! colors), interned to dense integer ids. Cross-graph comparability comes
//! from refining on the disjoint union.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::graph::Graph;

/// Per-iteration color counts. Color ids are only meaningful within the
/// refinement run that produced them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorHistogram {
    /// `counts[i]` maps color id -> number of vertices at iteration i.
    pub counts: Vec<HashMap<usize, usize>>,
}

#[derive(Clone, Debug)]
pub struct Refinement {
    /// `colors[i][v]` is the color of vertex v at iteration i.
    pub colors: Vec<Vec<usize>>,
    /// Iteration at which the partition became stable.
    pub stable_at: usize,
}

impl Refinement {
    pub fn histogram(&self) -> ColorHistogram {
        let counts = self
            .colors
            .iter()
            .map(|row| {
                let mut h = HashMap::new();
                for &c in row {
                    *h.entry(c).or_insert(0) += 1;
                }
                h
            })
            .collect();
        ColorHistogram { counts }
    }
}

fn refine_rounds(g: &Graph, cap: Option<usize>) -> Refinement {
    let n = g.order();
    let adj: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v)).collect();
    let mut colors: Vec<Vec<usize>> = vec![vec![0; n]];
    let mut stable_at = None;
    let mut iter = 0usize;
    loop {
        if let Some(cap) = cap {
            if iter >= cap {
                break;
            }
        }
        let prev = colors.last().unwrap();
        let mut intern: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut next = vec![0usize; n];
        for v in 0..n {
            let mut key: Vec<usize> = adj[v].iter().map(|&w| prev[w]).collect();
            key.sort_unstable();
            let id = intern.len();
            next[v] = *intern.entry((prev[v], key)).or_insert(id);
        }
        let classes_prev = prev.iter().copied().max().map_or(0, |m| m + 1);
        let classes_next = intern.len();
        let was_stable = classes_next == classes_prev;
        colors.push(next);
        iter += 1;
        if was_stable {
            if stable_at.is_none() {
                stable_at = Some(iter - 1);
            }
            if cap.is_none() {
                break;
            }
        }
    }
    Refinement {
        stable_at: stable_at.unwrap_or(colors.len() - 1),
        colors,
    }
}

/// Runs color refinement; `iterations = None` refines to the stable
/// coloring (reached within |G|-1 iterations), otherwise exactly that
/// many rounds are recorded.
pub fn refine(g: &Graph, iterations: Option<usize>) -> Refinement {
    refine_rounds(g, iterations)
}

/// Stable colors of G and H in a shared palette (refined on the disjoint
/// union), split back per graph.
pub fn joint_stable_colors(g: &Graph, h: &Graph) -> (Vec<usize>, Vec<usize>) {
    let u = g.disjoint_union(h);
    let r = refine_rounds(&u, None);
    let last = &r.colors[r.stable_at];
    (
        last[..g.order()].to_vec(),
        last[g.order()..].to_vec(),
    )
}

fn joint_refinement(g: &Graph, h: &Graph, cap: Option<usize>) -> (Refinement, usize) {
    let u = g.disjoint_union(h);
    (refine_rounds(&u, cap), g.order())
}

fn split_histograms(r: &Refinement, ng: usize) -> (Vec<HashMap<usize, usize>>, Vec<HashMap<usize, usize>>) {
    let mut hg = Vec::new();
    let mut hh = Vec::new();
    for row in &r.colors {
        let mut a = HashMap::new();
        let mut b = HashMap::new();
        for (v, &c) in row.iter().enumerate() {
            if v < ng {
                *a.entry(c).or_insert(0usize) += 1;
            } else {
                *b.entry(c).or_insert(0usize) += 1;
            }
        }
        hg.push(a);
        hh.push(b);
    }
    (hg, hh)
}

/// Least iteration at which some color count differs between G and H
/// (refined jointly), or `None` when the stable colorings agree.
pub fn wl_distinguishes(g: &Graph, h: &Graph) -> Option<usize> {
    let (r, ng) = joint_refinement(g, h, None);
    let (hg, hh) = split_histograms(&r, ng);
    (0..r.colors.len()).find(|&i| hg[i] != hh[i])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelMode {
    /// Eq-style geometrically weighted sum over all iterations, with the
    /// post-stabilization tail summed in closed form.
    Geometric,
    /// Unweighted sum over iterations 0..=l.
    Truncated(usize),
}

/// WL kernel `K(G,H) = Σ_i w_i Σ_c wl_G(c)·wl_H(c)` over the joint
/// refinement.
pub fn wl_kernel(g: &Graph, h: &Graph, mode: KernelMode) -> f64 {
    match mode {
        KernelMode::Geometric => {
            let (r, ng) = joint_refinement(g, h, None);
            let (hg, hh) = split_histograms(&r, ng);
            let contrib = |i: usize| -> f64 {
                hg[i]
                    .iter()
                    .map(|(c, &a)| a as f64 * *hh[i].get(c).unwrap_or(&0) as f64)
                    .sum()
            };
            let i0 = r.stable_at;
            let mut total = 0.0;
            for i in 0..=i0 {
                total += contrib(i) / (1u64 << i) as f64;
            }
            // After joint stabilization the per-iteration contribution is
            // constant, so the tail Σ_{i>i0} 2^{-i} c = 2^{-i0} c.
            total += contrib(i0) / (1u64 << i0) as f64;
            total
        }
        KernelMode::Truncated(l) => {
            let (r, ng) = joint_refinement(g, h, Some(l));
            let (hg, hh) = split_histograms(&r, ng);
            (0..=l.min(r.colors.len() - 1))
                .map(|i| {
                    hg[i]
                        .iter()
                        .map(|(c, &a)| a as f64 * *hh[i].get(c).unwrap_or(&0) as f64)
                        .sum::<f64>()
                })
                .sum()
        }
    }
}

/// WL metric `sqrt(K(G,G) - 2K(G,H) + K(H,H))`, clamped at 0 against
/// round-off.
pub fn wl_metric(g: &Graph, h: &Graph, mode: KernelMode) -> f64 {
    let v = wl_kernel(g, g, mode) - 2.0 * wl_kernel(g, h, mode) + wl_kernel(h, h, mode);
    v.max(0.0).sqrt()
}

/// WL-depth ultrametric: 0 when WL never distinguishes, else 1/k for the
/// least distinguishing iteration k.
pub fn wl_depth_metric(g: &Graph, h: &Graph) -> f64 {
    match wl_distinguishes(g, h) {
        None => 0.0,
        Some(k) => 1.0 / k.max(1) as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, erdos_renyi, path, two_triangles, Graph};

    #[test]
    fn k3_stays_monochromatic() {
        let r = refine(&complete(3), None);
        for row in &r.colors {
            assert!(row.iter().all(|&c| c == row[0]));
        }
    }

    #[test]
    fn p3_splits_at_iteration_one() {
        let r = refine(&path(3), None);
        let h = r.histogram();
        let mut counts: Vec<usize> = h.counts[1].values().copied().collect();
        counts.sort_unstable();
        assert_eq!(counts, vec![1, 2]);
    }

    #[test]
    fn paw_graph_splits_by_degree_and_keeps_the_twins() {
        // 4 vertices, edges {ab, ac, ad, cd}: degrees 3,1,2,2 and the
        // two degree-2 vertices are swapped by an automorphism, so the
        // stable partition has exactly three classes.
        let g = Graph::new(4, &[(0, 1), (0, 2), (0, 3), (2, 3)]).unwrap();
        let r = refine(&g, Some(2));
        let h = r.histogram();
        assert_eq!(h.counts[2].len(), 3);
        let stable = refine(&g, None);
        let colors = stable.colors.last().unwrap();
        assert_eq!(colors[2], colors[3]);
        assert_ne!(colors[0], colors[1]);
        assert_ne!(colors[0], colors[2]);
    }

    #[test]
    fn refinement_refines_and_stabilizes_fast() {
        for seed in 0..15u64 {
            let g = erdos_renyi(8, 0.4, seed).unwrap();
            let r = refine(&g, None);
            assert!(r.stable_at <= g.order().saturating_sub(1));
            // iteration i+1 refines iteration i
            for i in 0..r.colors.len() - 1 {
                let mut map: HashMap<usize, usize> = HashMap::new();
                for v in 0..g.order() {
                    let e = map.entry(r.colors[i + 1][v]).or_insert(r.colors[i][v]);
                    assert_eq!(*e, r.colors[i][v], "coarser class split across finer");
                }
            }
        }
    }

    #[test]
    fn distinguishes_cases() {
        assert_eq!(wl_distinguishes(&path(3), &complete(3)), Some(1));
        assert_eq!(wl_distinguishes(&cycle(6).unwrap(), &two_triangles()), None);
        let g = erdos_renyi(6, 0.5, 2).unwrap();
        assert_eq!(wl_distinguishes(&g, &g), None);
    }

    #[test]
    fn kernel_closed_form_on_k1() {
        // contribution 1 at every iteration; geometric series sums to 2
        let k1 = complete(1);
        assert!((wl_kernel(&k1, &k1, KernelMode::Geometric) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_symmetric() {
        let g = erdos_renyi(6, 0.5, 5).unwrap();
        let h = erdos_renyi(6, 0.5, 6).unwrap();
        for mode in [KernelMode::Geometric, KernelMode::Truncated(5)] {
            assert_eq!(wl_kernel(&g, &h, mode), wl_kernel(&h, &g, mode));
        }
    }

    #[test]
    fn metric_zero_on_wl_equivalent() {
        assert_eq!(
            wl_metric(&cycle(6).unwrap(), &two_triangles(), KernelMode::Geometric),
            0.0
        );
        let g = erdos_renyi(7, 0.5, 9).unwrap();
        assert_eq!(wl_metric(&g, &g, KernelMode::Geometric), 0.0);
        assert!(wl_metric(&path(3), &complete(3), KernelMode::Geometric) > 0.0);
    }

    #[test]
    fn depth_metric_and_ultrametric() {
        assert_eq!(wl_depth_metric(&path(3), &complete(3)), 1.0);
        assert_eq!(wl_depth_metric(&cycle(6).unwrap(), &two_triangles()), 0.0);
        let graphs: Vec<Graph> = (0..6).map(|s| erdos_renyi(6, 0.5, s).unwrap()).collect();
        for f in &graphs {
            for g in &graphs {
                for h in &graphs {
                    let d = wl_depth_metric(f, h);
                    assert!(
                        d <= wl_depth_metric(f, g).max(wl_depth_metric(g, h)) + 1e-12,
                        "ultrametric inequality"
                    );
                }
            }
        }
    }
}
