//! Ensemble experiments and small feature extractors.

use serde::{Deserialize, Serialize};

use crate::graph::{complete, cycle, erdos_renyi, Graph};
use crate::hom::{emb, hom};
use crate::matrix::cut_norm_exact;
use crate::GraphsimError;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RandomCutStats {
    pub n: usize,
    pub pairs: usize,
    pub seed: u64,
    pub values: Vec<f64>,
    pub max: f64,
    pub mean: f64,
    /// max / n^{3/2}
    pub max_ratio: f64,
}

/// Identity-alignment cut norm ‖A_G − A_H‖_□ over independent
/// 𝒢(n, 1/2) pairs; concentration keeps the ratio to n^{3/2} bounded.
pub fn random_cut_experiment(
    n: usize,
    pairs: usize,
    seed: u64,
) -> Result<RandomCutStats, GraphsimError> {
    if n > 12 {
        return Err(GraphsimError::BudgetExceeded(
            "cut-norm enumeration capped at order 12".into(),
        ));
    }
    if pairs == 0 {
        return Err(GraphsimError::InvalidArgument("need at least one pair".into()));
    }
    let mut values = Vec::with_capacity(pairs);
    for i in 0..pairs {
        let g = erdos_renyi(n, 0.5, seed.wrapping_add(2 * i as u64))?;
        let h = erdos_renyi(n, 0.5, seed.wrapping_add(2 * i as u64 + 1))?;
        let d = g.adjacency().sub(&h.adjacency());
        values.push(cut_norm_exact(&d)?.value);
    }
    let max = values.iter().cloned().fold(0.0f64, f64::max);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(RandomCutStats {
        n,
        pairs,
        seed,
        max,
        mean,
        max_ratio: max / (n as f64).powf(1.5),
        values,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Features {
    pub order: usize,
    pub edges: usize,
    pub triangles: i64,
    pub four_cycles: i64,
    /// [ |E|/n², triangles/n³, 4-cycles/n⁴ ]
    pub normalized: Vec<f64>,
}

/// Counting features: triangles as hom(K3,G)/6 and 4-cycle subgraphs as
/// emb(C4,G)/8 (each 4-cycle has 8 injective occurrences).
pub fn features(g: &Graph) -> Result<Features, GraphsimError> {
    let n = g.order();
    let triangles = hom(&complete(3), g) / 6;
    let four_cycles = if n >= 4 { emb(&cycle(4)?, g) / 8 } else { 0 };
    let nf = n as f64;
    let normalized = if n == 0 {
        vec![0.0, 0.0, 0.0]
    } else {
        vec![
            g.num_edges() as f64 / (nf * nf),
            triangles as f64 / nf.powi(3),
            four_cycles as f64 / nf.powi(4),
        ]
    };
    Ok(Features {
        order: n,
        edges: g.num_edges(),
        triangles,
        four_cycles,
        normalized,
    })
}
