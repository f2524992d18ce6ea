//! Induced-subgraph sampling distributions, total variation distance,
//! and the sampling distance Σ_k 2^{−k}·TV(p_{G,k}, p_{H,k}) in exact
//! and Monte-Carlo (Hoeffding-certified) modes.

use num_rational::Rational64;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::GraphsimError;

/// Distribution over labeled k-vertex graphs; `probs[mask]` indexes by
/// the edge bitmask over vertex pairs in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct SubgraphDistribution {
    pub k: usize,
    pub probs: Vec<Rational64>,
}

fn pair_count(k: usize) -> usize {
    k * (k.saturating_sub(1)) / 2
}

fn induced_mask(g: &Graph, tuple: &[usize]) -> usize {
    let k = tuple.len();
    let mut mask = 0usize;
    let mut bit = 0;
    for u in 0..k {
        for v in (u + 1)..k {
            if g.has_edge(tuple[u], tuple[v]) {
                mask |= 1 << bit;
            }
            bit += 1;
        }
    }
    mask
}

/// p_{G,k}: the induced-subgraph distribution of a uniform injective
/// k-sample; a point mass on the edgeless graph when |G| < k.
pub fn exact_distribution(g: &Graph, k: usize) -> Result<SubgraphDistribution, GraphsimError> {
    if k == 0 || k > 5 {
        return Err(GraphsimError::InvalidArgument(
            "subgraph distributions supported for 1 <= k <= 5".into(),
        ));
    }
    if g.order() > 10 {
        return Err(GraphsimError::BudgetExceeded(
            "exact distribution enumerates injective tuples; order capped at 10".into(),
        ));
    }
    let size = 1usize << pair_count(k);
    let mut probs = vec![Rational64::zero(); size];
    let n = g.order();
    if n < k {
        probs[0] = Rational64::new(1, 1);
        return Ok(SubgraphDistribution { k, probs });
    }
    let mut counts = vec![0i64; size];
    let mut total = 0i64;
    let mut tuple = Vec::with_capacity(k);
    let mut used = vec![false; n];
    fn rec(
        g: &Graph,
        k: usize,
        tuple: &mut Vec<usize>,
        used: &mut Vec<bool>,
        counts: &mut [i64],
        total: &mut i64,
    ) {
        if tuple.len() == k {
            counts[induced_mask(g, tuple)] += 1;
            *total += 1;
            return;
        }
        for v in 0..g.order() {
            if !used[v] {
                used[v] = true;
                tuple.push(v);
                rec(g, k, tuple, used, counts, total);
                tuple.pop();
                used[v] = false;
            }
        }
    }
    rec(g, k, &mut tuple, &mut used, &mut counts, &mut total);
    for (mask, &c) in counts.iter().enumerate() {
        probs[mask] = Rational64::new(c, total);
    }
    Ok(SubgraphDistribution { k, probs })
}

/// Total variation distance ½·Σ|p − q| (exact).
pub fn tv_distance(
    p: &SubgraphDistribution,
    q: &SubgraphDistribution,
) -> Result<Rational64, GraphsimError> {
    if p.k != q.k {
        return Err(GraphsimError::InvalidArgument(
            "total variation needs distributions over the same size".into(),
        ));
    }
    let sum: Rational64 = p
        .probs
        .iter()
        .zip(&q.probs)
        .map(|(a, b)| if a >= b { *a - *b } else { *b - *a })
        .sum();
    Ok(sum / Rational64::new(2, 1))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct McCertificate {
    /// Injective samples drawn per graph and size.
    pub samples: usize,
    pub confidence: f64,
    /// Per-entry Hoeffding radius ε.
    pub entry_radius: f64,
    /// Implied radius on the truncated sampling distance.
    pub distance_radius: f64,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub enum SampleMode {
    Exact,
    Mc { eps: f64, delta: f64, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct SamplingOutcome {
    pub value: f64,
    /// Truncation tail: the omitted sizes contribute at most this.
    pub tail_bound: f64,
    pub certificate: Option<McCertificate>,
}

/// Hoeffding sample count for `entries` simultaneous [0,1]-mean
/// estimates, each within ε with overall confidence 1 − δ.
pub fn hoeffding_samples(eps: f64, delta: f64, entries: usize) -> usize {
    ((2.0 * entries as f64 / delta).ln() / (2.0 * eps * eps)).ceil() as usize
}

fn mc_distribution(g: &Graph, k: usize, samples: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let size = 1usize << pair_count(k);
    let n = g.order();
    let mut probs = vec![0.0f64; size];
    if n < k {
        probs[0] = 1.0;
        return probs;
    }
    let mut tuple = vec![0usize; k];
    for _ in 0..samples {
        // rejection sampling of an injective tuple
        'draw: loop {
            for slot in tuple.iter_mut() {
                *slot = rng.gen_range(0..n);
            }
            for i in 0..k {
                for j in (i + 1)..k {
                    if tuple[i] == tuple[j] {
                        continue 'draw;
                    }
                }
            }
            break;
        }
        probs[induced_mask(g, &tuple)] += 1.0;
    }
    for p in &mut probs {
        *p /= samples as f64;
    }
    probs
}

/// Truncated sampling distance Σ_{k≤k_max} 2^{−k}·TV(p_{G,k}, p_{H,k}).
/// Exact mode computes every distribution in rationals; Monte-Carlo mode
/// estimates them from seeded injective samples and reports a
/// union-bounded Hoeffding certificate.
pub fn sampling_distance(
    g: &Graph,
    h: &Graph,
    k_max: usize,
    mode: SampleMode,
) -> Result<SamplingOutcome, GraphsimError> {
    if k_max == 0 || k_max > 5 {
        return Err(GraphsimError::InvalidArgument(
            "sampling distance supported for 1 <= k_max <= 5".into(),
        ));
    }
    let tail_bound = (0.5f64).powi(k_max as i32);
    match mode {
        SampleMode::Exact => {
            let mut total = Rational64::zero();
            for k in 1..=k_max {
                let pg = exact_distribution(g, k)?;
                let ph = exact_distribution(h, k)?;
                total += tv_distance(&pg, &ph)? / Rational64::from_integer(1i64 << k);
            }
            Ok(SamplingOutcome {
                value: *total.numer() as f64 / *total.denom() as f64,
                tail_bound,
                certificate: None,
            })
        }
        SampleMode::Mc { eps, delta, seed } => {
            if !(0.0..1.0).contains(&delta) || eps <= 0.0 || delta <= 0.0 {
                return Err(GraphsimError::InvalidArgument(
                    "Monte-Carlo mode needs eps > 0 and 0 < delta < 1".into(),
                ));
            }
            // union bound over every estimated entry: both graphs, all sizes
            let entries: usize = 2 * (1..=k_max).map(|k| 1usize << pair_count(k)).sum::<usize>();
            let samples = hoeffding_samples(eps, delta, entries);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut value = 0.0f64;
            let mut distance_radius = 0.0f64;
            for k in 1..=k_max {
                let pg = mc_distribution(g, k, samples, &mut rng);
                let ph = mc_distribution(h, k, samples, &mut rng);
                let tv: f64 =
                    pg.iter().zip(&ph).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0;
                let w = (0.5f64).powi(k as i32);
                value += w * tv;
                // |TV(p̂,q̂) − TV(p,q)| ≤ ½(Σ|p̂−p| + Σ|q̂−q|) ≤ |support|·ε
                distance_radius += w * (1usize << pair_count(k)) as f64 * eps;
            }
            Ok(SamplingOutcome {
                value,
                tail_bound,
                certificate: Some(McCertificate {
                    samples,
                    confidence: 1.0 - delta,
                    entry_radius: eps,
                    distance_radius,
                    seed,
                }),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, edgeless, erdos_renyi};
    use num_traits::One;

    #[test]
    fn distributions_sum_to_one_exactly() {
        for seed in 0..5u64 {
            let g = erdos_renyi(8, 0.5, seed).unwrap();
            for k in 1..=4usize {
                let p = exact_distribution(&g, k).unwrap();
                let total: Rational64 = p.probs.iter().copied().sum();
                assert!(total.is_one(), "seed {seed} k {k}");
            }
        }
    }

    #[test]
    fn complete_graph_is_a_point_mass_on_cliques() {
        for (n, k) in [(5usize, 3usize), (6, 4)] {
            let p = exact_distribution(&complete(n), k).unwrap();
            let full = (1usize << pair_count(k)) - 1;
            assert!(p.probs[full].is_one());
        }
    }

    #[test]
    fn small_graph_degenerates_to_edgeless_mass() {
        let p = exact_distribution(&complete(2), 4).unwrap();
        assert!(p.probs[0].is_one());
        assert!(p.probs[1..].iter().all(|x| x.is_zero()));
    }

    #[test]
    fn tv_basics() {
        let g = erdos_renyi(7, 0.5, 1).unwrap();
        let p = exact_distribution(&g, 3).unwrap();
        assert!(tv_distance(&p, &p).unwrap().is_zero());
        // point masses at distance 1
        let a = exact_distribution(&complete(4), 3).unwrap();
        let b = exact_distribution(&edgeless(4), 3).unwrap();
        assert!(tv_distance(&a, &b).unwrap().is_one());
        let q = exact_distribution(&g, 2).unwrap();
        assert!(tv_distance(&p, &q).is_err());
    }

    #[test]
    fn tv_equals_event_supremum() {
        // ½‖p−q‖₁ = max_A |p(A) − q(A)| by enumerating all events
        let g = erdos_renyi(6, 0.4, 3).unwrap();
        let h = erdos_renyi(6, 0.7, 4).unwrap();
        let p = exact_distribution(&g, 3).unwrap();
        let q = exact_distribution(&h, 3).unwrap();
        let tv = tv_distance(&p, &q).unwrap();
        let support = p.probs.len();
        let mut sup = Rational64::zero();
        for event in 0usize..(1 << support) {
            let mut diff = Rational64::zero();
            for f in 0..support {
                if event >> f & 1 == 1 {
                    diff += p.probs[f] - q.probs[f];
                }
            }
            let abs = if diff < Rational64::zero() { -diff } else { diff };
            sup = sup.max(abs);
        }
        assert_eq!(tv, sup);
    }

    #[test]
    fn clique_sizes_saturate_tv() {
        // m < k <= n: p_{K_m,k} is the edgeless point mass, p_{K_n,k}
        // the clique point mass
        let p = exact_distribution(&complete(3), 4).unwrap();
        let q = exact_distribution(&complete(6), 4).unwrap();
        assert!(tv_distance(&p, &q).unwrap().is_one());
    }

    #[test]
    fn exact_distance_identity_and_symmetry() {
        let g = erdos_renyi(7, 0.5, 5).unwrap();
        let h = erdos_renyi(7, 0.5, 6).unwrap();
        let gg = sampling_distance(&g, &g, 4, SampleMode::Exact).unwrap();
        assert_eq!(gg.value, 0.0);
        let gh = sampling_distance(&g, &h, 4, SampleMode::Exact).unwrap();
        let hg = sampling_distance(&h, &g, 4, SampleMode::Exact).unwrap();
        assert_eq!(gh.value, hg.value);
        assert_eq!(gh.tail_bound, 1.0 / 16.0);
    }

    #[test]
    fn exact_distance_triangle_inequality() {
        let graphs: Vec<Graph> = (0..4).map(|s| erdos_renyi(6, 0.5, s).unwrap()).collect();
        let d = |a: &Graph, b: &Graph| sampling_distance(a, b, 3, SampleMode::Exact).unwrap().value;
        for a in &graphs {
            for b in &graphs {
                for c in &graphs {
                    assert!(d(a, c) <= d(a, b) + d(b, c) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn hoeffding_count_matches_formula() {
        let n = hoeffding_samples(0.05, 0.05, 150);
        assert_eq!(n, ((2.0 * 150.0 / 0.05f64).ln() / 0.005).ceil() as usize);
        assert!(n >= 1600 && n <= 1800);
    }

    #[test]
    fn mc_deterministic_and_near_exact() {
        let g = erdos_renyi(8, 0.5, 7).unwrap();
        let h = erdos_renyi(8, 0.5, 8).unwrap();
        let mode = SampleMode::Mc {
            eps: 0.05,
            delta: 0.05,
            seed: 42,
        };
        let a = sampling_distance(&g, &h, 4, mode.clone()).unwrap();
        let b = sampling_distance(&g, &h, 4, mode).unwrap();
        assert_eq!(a.value, b.value);
        let exact = sampling_distance(&g, &h, 4, SampleMode::Exact).unwrap();
        let cert = a.certificate.unwrap();
        assert!(
            (a.value - exact.value).abs() <= cert.distance_radius,
            "estimate {} exact {} radius {}",
            a.value,
            exact.value,
            cert.distance_radius
        );
        assert!(cert.samples >= hoeffding_samples(0.05, 0.05, 150));
    }
}
