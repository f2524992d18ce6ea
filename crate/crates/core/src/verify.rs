//! Self-check suite: definitional identities and worked micro-examples.
//! Shared by the `verify` subcommand and the acceptance tests; every
//! check runs even after earlier failures.

use num_rational::Rational64;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::align::{align_metric, AlignmentMetricKind};
use crate::frac::{frac_metric, fractional_isomorphism, FracNorm};
use crate::graph::{cycle, erdos_renyi, two_triangles, Graph};
use crate::hom::{hom, hom_tree, trees_of_order};
use crate::matrix::{cut_norm_exact, entrywise_norm, operator_norm, tensor_blow_up, Matrix};
use crate::ot::{ot_bracket, OtKind};
use crate::wl::wl_distinguishes;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BudgetProfile {
    Tiny,
    Desk,
    Extended,
}

impl BudgetProfile {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "tiny" => Some(BudgetProfile::Tiny),
            "desk" => Some(BudgetProfile::Desk),
            "extended" => Some(BudgetProfile::Extended),
            _ => None,
        }
    }

    fn pairs(self) -> usize {
        match self {
            BudgetProfile::Tiny => 5,
            BudgetProfile::Desk => 15,
            BudgetProfile::Extended => 50,
        }
    }

    fn order(self) -> usize {
        match self {
            BudgetProfile::Tiny => 5,
            BudgetProfile::Desk => 6,
            BudgetProfile::Extended => 7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub details: String,
}

fn worked_example_pair() -> (Graph, Graph) {
    let g = Graph::new(4, &[(0, 1), (0, 2), (1, 2)]).unwrap();
    let h = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
    (g, h)
}

fn check_worked_example() -> Result<String, String> {
    let (g, h) = worked_example_pair();
    let ed = align_metric(&g, &h, AlignmentMetricKind::EditEntrywise1).map_err(|e| e.to_string())?;
    if ed.value != 6.0 {
        return Err(format!("entrywise-1 value {} expected 6", ed.value));
    }
    if (ed.normalized_value - 6.0 / 16.0).abs() > 1e-15 {
        return Err(format!("normalized {} expected 6/16", ed.normalized_value));
    }
    let g2 = g.blow_up(2).map_err(|e| e.to_string())?;
    let h2 = h.blow_up(2).map_err(|e| e.to_string())?;
    let blown = align_metric(&g2, &h2, AlignmentMetricKind::EditEntrywise1)
        .map_err(|e| e.to_string())?;
    if blown.value > 20.0 {
        return Err(format!("blow-up alignment {} exceeds 20", blown.value));
    }
    if blown.normalized_value >= ed.normalized_value {
        return Err("blow-up failed to improve the normalized value".into());
    }
    Ok(format!(
        "edit 3, entrywise-1 {} (norm {}), blow-up {} (norm {})",
        ed.value, ed.normalized_value, blown.value, blown.normalized_value
    ))
}

fn random_pair(rng: &mut ChaCha8Rng, n: usize) -> (Graph, Graph) {
    let g = erdos_renyi(n, 0.5, rng.gen()).unwrap();
    let h = erdos_renyi(n, 0.5, rng.gen()).unwrap();
    (g, h)
}

/// Entrywise-1 equals the squared-Frobenius minimum on 0/1 matrices.
fn check_frobenius_identity(profile: BudgetProfile) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..profile.pairs() {
        let (g, h) = random_pair(&mut rng, profile.order());
        let l1 = align_metric(&g, &h, AlignmentMetricKind::EditEntrywise1)
            .map_err(|e| e.to_string())?;
        let fro = align_metric(&g, &h, AlignmentMetricKind::EntrywiseP(2.0))
            .map_err(|e| e.to_string())?;
        if (l1.value - fro.value * fro.value).abs() > 1e-9 {
            return Err(format!(
                "pair {i}: entrywise-1 {} vs Frobenius² {}",
                l1.value,
                fro.value * fro.value
            ));
        }
    }
    Ok(format!("{} random pairs", profile.pairs()))
}

/// The local metric's operator-∞ and operator-1 forms agree (difference
/// matrices are symmetric), and the reported witness re-evaluates.
fn check_local_operator_identity(profile: BudgetProfile) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..profile.pairs() {
        let (g, h) = random_pair(&mut rng, profile.order());
        let local = align_metric(&g, &h, AlignmentMetricKind::LocalOperator)
            .map_err(|e| e.to_string())?;
        let pi = local.witness.clone().ok_or("missing witness")?;
        let n = g.order();
        let mut d = Matrix::zeros(n, n);
        for u in 0..n {
            for v in 0..n {
                d.set(u, v, g.has_edge(u, v) as i64 as f64 - h.has_edge(pi[u], pi[v]) as i64 as f64);
            }
        }
        let inf = operator_norm(&d, f64::INFINITY).map_err(|e| e.to_string())?;
        let one = operator_norm(&d, 1.0).map_err(|e| e.to_string())?;
        if inf != one || inf != local.value {
            return Err(format!("pair {i}: op-∞ {inf}, op-1 {one}, reported {}", local.value));
        }
    }
    Ok(format!("{} random pairs", profile.pairs()))
}

fn check_cut_below_edit(profile: BudgetProfile) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for i in 0..profile.pairs() {
        let (g, h) = random_pair(&mut rng, profile.order().min(6));
        let cut =
            align_metric(&g, &h, AlignmentMetricKind::CutDistance).map_err(|e| e.to_string())?;
        let ed = align_metric(&g, &h, AlignmentMetricKind::EditEntrywise1)
            .map_err(|e| e.to_string())?;
        if cut.value > ed.value + 1e-9 {
            return Err(format!("pair {i}: cut {} > entrywise-1 {}", cut.value, ed.value));
        }
    }
    Ok(format!("{} random pairs", profile.pairs()))
}

/// Norms of the ℓ-fold tensor blow-up scale by ℓ² (entrywise-1, cut)
/// and ℓ (operator-∞).
fn check_blowup_norm_identities() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for i in 0..20 {
        let k = rng.gen_range(2..=5usize);
        let mut b = Matrix::zeros(k, k);
        for r in 0..k {
            for c in 0..k {
                b.set(r, c, rng.gen_range(-3i64..=3) as f64);
            }
        }
        for l in [2usize, 3] {
            let bl = tensor_blow_up(&b, l).map_err(|e| e.to_string())?;
            let s = (l * l) as f64;
            let e1 = entrywise_norm(&b, 1.0).map_err(|e| e.to_string())?;
            let e1l = entrywise_norm(&bl, 1.0).map_err(|e| e.to_string())?;
            if (e1l - s * e1).abs() > 1e-9 {
                return Err(format!("matrix {i} l {l}: entrywise-1 {e1l} vs {}", s * e1));
            }
            let op = operator_norm(&b, f64::INFINITY).map_err(|e| e.to_string())?;
            let opl = operator_norm(&bl, f64::INFINITY).map_err(|e| e.to_string())?;
            if (opl - l as f64 * op).abs() > 1e-9 {
                return Err(format!("matrix {i} l {l}: operator {opl} vs {}", l as f64 * op));
            }
            let cu = cut_norm_exact(&b).map_err(|e| e.to_string())?.value;
            let cul = cut_norm_exact(&bl).map_err(|e| e.to_string())?.value;
            if (cul - s * cu).abs() > 1e-9 {
                return Err(format!("matrix {i} l {l}: cut {cul} vs {}", s * cu));
            }
        }
    }
    Ok("20 random integer matrices, l in {2,3}".into())
}

/// C6 vs two disjoint triangles: fractionally isomorphic (flat rational
/// witness), positive alignment distance, and a transport upper bound no
/// smaller than a third of it.
fn check_relaxation_sandwich() -> Result<String, String> {
    let g = cycle(6).map_err(|e| e.to_string())?;
    let h = two_triangles();
    let fr = frac_metric(&g, &h, FracNorm::Entrywise1, 1e-7).map_err(|e| e.to_string())?;
    if fr.report.value > 1e-6 {
        return Err(format!("fractional value {} above 1e-6", fr.report.value));
    }
    let witness = fractional_isomorphism(&g, &h)
        .map_err(|e| e.to_string())?
        .ok_or("no fractional isomorphism found")?;
    let flat = Rational64::new(1, 6);
    if witness.iter().flatten().any(|&x| x != flat) {
        return Err("witness is not the flat 1/6 coupling".into());
    }
    let edit = align_metric(&g, &h, AlignmentMetricKind::EditEntrywise1)
        .map_err(|e| e.to_string())?;
    if edit.normalized_value <= 0.0 {
        return Err("alignment distance unexpectedly zero".into());
    }
    let bracket = ot_bracket(&g, &h, OtKind::OtL1, 2, 1e-7).map_err(|e| e.to_string())?;
    if !bracket.is_consistent(1e-9) {
        return Err(format!("bracket [{}, {}] inconsistent", bracket.lower, bracket.upper));
    }
    if bracket.upper < edit.normalized_value / 3.0 - 1e-9 {
        return Err(format!(
            "transport upper {} below a third of alignment {}",
            bracket.upper, edit.normalized_value
        ));
    }
    if bracket.upper > edit.normalized_value + 1e-9 {
        return Err(format!(
            "transport upper {} above alignment {}",
            bracket.upper, edit.normalized_value
        ));
    }
    Ok(format!(
        "fractional {:.2e}, alignment {}, transport in [{}, {}]",
        fr.report.value, edit.normalized_value, bracket.lower, bracket.upper
    ))
}

/// Fractional isomorphism exists iff color refinement never separates
/// the histograms.
fn check_refinement_equivalence(profile: BudgetProfile) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut agree_true = 0usize;
    for i in 0..profile.pairs() * 2 {
        // regular sparse pairs are likelier to be WL-equivalent
        let n = profile.order();
        let g = erdos_renyi(n, 0.3, rng.gen()).unwrap();
        let h = if i % 3 == 0 {
            g.relabel(&random_permutation(&mut rng, n)).map_err(|e| e.to_string())?
        } else {
            erdos_renyi(n, 0.3, rng.gen()).unwrap()
        };
        let iso = fractional_isomorphism(&g, &h).map_err(|e| e.to_string())?;
        let wl_same = wl_distinguishes(&g, &h).is_none();
        if iso.is_some() != wl_same {
            return Err(format!("pair {i}: witness {} vs refinement {}", iso.is_some(), wl_same));
        }
        if iso.is_some() {
            agree_true += 1;
        }
    }
    if agree_true == 0 {
        return Err("no equivalent pair exercised the witness path".into());
    }
    Ok(format!("{} pairs, {agree_true} with verified witnesses", profile.pairs() * 2))
}

fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, rng.gen_range(0..=i));
    }
    p
}

/// Tree counts cannot separate C6 from two triangles, but the triangle
/// count does.
fn check_tree_counts() -> Result<String, String> {
    let g = cycle(6).map_err(|e| e.to_string())?;
    let h = two_triangles();
    let mut trees = 0usize;
    for k in 1..=5usize {
        for t in trees_of_order(k) {
            let a = hom(&t, &g);
            let b = hom(&t, &h);
            if a != b {
                return Err(format!("tree of order {k}: {a} vs {b}"));
            }
            let dp = hom_tree(&t, &g).map_err(|e| e.to_string())?;
            if dp != a {
                return Err(format!("tree DP {dp} vs backtracking {a}"));
            }
            trees += 1;
        }
    }
    let c3 = cycle(3).map_err(|e| e.to_string())?;
    let (a, b) = (hom(&c3, &g), hom(&c3, &h));
    if a != 0 || b != 12 {
        return Err(format!("triangle counts {a}, {b} expected 0, 12"));
    }
    Ok(format!("{trees} trees agree; triangle counts 0 vs 12"))
}

/// hom(C_k, G) = trace(A_G^k), exact integers.
fn check_cycle_trace(profile: BudgetProfile) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for i in 0..profile.pairs() {
        let g = erdos_renyi(profile.order(), 0.5, rng.gen()).unwrap();
        let n = g.order();
        let a: Vec<Vec<i64>> = (0..n)
            .map(|u| (0..n).map(|v| g.has_edge(u, v) as i64).collect())
            .collect();
        let mut power = a.clone();
        for k in 2..=6usize {
            let mut next = vec![vec![0i64; n]; n];
            for r in 0..n {
                for t in 0..n {
                    if power[r][t] != 0 {
                        for c in 0..n {
                            next[r][c] += power[r][t] * a[t][c];
                        }
                    }
                }
            }
            power = next;
            if k >= 3 {
                let trace: i64 = (0..n).map(|v| power[v][v]).sum();
                let count = hom(&cycle(k).unwrap(), &g);
                if trace != count {
                    return Err(format!("graph {i} k {k}: trace {trace} vs hom {count}"));
                }
            }
        }
    }
    Ok(format!("{} random graphs, cycle lengths 3..6", profile.pairs()))
}

/// Exact distributions are probability vectors; identical graphs are at
/// sampling distance zero.
fn check_sampling_basics() -> Result<String, String> {
    use crate::sampling::{exact_distribution, sampling_distance, SampleMode};
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..5 {
        let g = erdos_renyi(8, 0.5, rng.gen()).unwrap();
        for k in 1..=4usize {
            let p = exact_distribution(&g, k).map_err(|e| e.to_string())?;
            let total: Rational64 = p.probs.iter().copied().sum();
            if total != Rational64::new(1, 1) {
                return Err(format!("k {k}: mass {total}"));
            }
        }
        let d = sampling_distance(&g, &g, 4, SampleMode::Exact).map_err(|e| e.to_string())?;
        if !d.value.is_zero() {
            return Err(format!("self-distance {}", d.value));
        }
    }
    Ok("5 random graphs, k ≤ 4".into())
}

fn run_check(name: &str, body: impl FnOnce() -> Result<String, String>) -> CheckResult {
    match body() {
        Ok(details) => CheckResult { name: name.into(), passed: true, details },
        Err(details) => CheckResult { name: name.into(), passed: false, details },
    }
}

pub fn run_suite(profile: BudgetProfile) -> Vec<CheckResult> {
    vec![
        run_check("worked-example", check_worked_example),
        run_check("frobenius-identity", || check_frobenius_identity(profile)),
        run_check("local-operator-identity", || check_local_operator_identity(profile)),
        run_check("cut-below-edit", || check_cut_below_edit(profile)),
        run_check("blowup-norm-identities", check_blowup_norm_identities),
        run_check("relaxation-sandwich", check_relaxation_sandwich),
        run_check("refinement-equivalence", || check_refinement_equivalence(profile)),
        run_check("tree-counts", check_tree_counts),
        run_check("cycle-trace", || check_cycle_trace(profile)),
        run_check("sampling-basics", check_sampling_basics),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_at_tiny_budget() {
        for r in run_suite(BudgetProfile::Tiny) {
            assert!(r.passed, "{}: {}", r.name, r.details);
        }
    }
}
