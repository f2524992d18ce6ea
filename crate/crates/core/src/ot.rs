//! Optimal-transport graph distances (quadratic objectives over
//! couplings), blow-up distance sequences, and the bracket machinery
//! that encloses the transport distances between certified bounds.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::align::{align_metric, AlignmentMetricKind};
use crate::frac::{
    frac_metric_seeded, is_feasible_coupling, linear_minimization_oracle, permutation_coupling,
    transport_lmo_integer, uniform_coupling, FracNorm,
};
use crate::graph::{self, Graph};
use crate::matrix::Matrix;
use crate::report::{Bracket, MetricReport};
use crate::wl;
use crate::GraphsimError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OtKind {
    /// Σ |A_G(v,v') − A_H(w,w')| Q(v,w) Q(v',w')
    OtL1,
    /// |Σ (A_G(v,v') − A_H(w,w')) Q(v,w) Q(v',w')|
    OtCut,
    /// Σ |D_G(v,v') − D_H(w,w')| Q(v,w) Q(v',w') (Gromov-Wasserstein)
    GwDist,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlowupKind {
    L1,
    Local,
    Cut,
}

#[derive(Clone, Debug)]
pub struct OtResult {
    pub report: MetricReport,
    pub coupling: Matrix,
}

/// Dense 4-index cost tensor K(v,v',w,w') with v,v' over G and w,w'
/// over H; symmetric under swapping the primed pair with the unprimed.
struct QuadCost {
    m: usize,
    n: usize,
    k: Vec<f64>,
}

impl QuadCost {
    fn build(mg: &Matrix, mh: &Matrix, signed: bool) -> Self {
        let (m, n) = (mg.rows(), mh.rows());
        let mut k = vec![0.0; m * m * n * n];
        for v in 0..m {
            for vp in 0..m {
                for w in 0..n {
                    for wp in 0..n {
                        let d = mg.get(v, vp) - mh.get(w, wp);
                        k[((v * m + vp) * n + w) * n + wp] = if signed { d } else { d.abs() };
                    }
                }
            }
        }
        QuadCost { m, n, k }
    }

    /// L(Q)(v,w) = Σ_{v',w'} K(v,v',w,w') Q(v',w')
    fn apply(&self, q: &Matrix) -> Matrix {
        let (m, n) = (self.m, self.n);
        let mut out = Matrix::zeros(m, n);
        for v in 0..m {
            for w in 0..n {
                let mut s = 0.0;
                for vp in 0..m {
                    let base = ((v * m + vp) * n + w) * n;
                    for wp in 0..n {
                        let qv = q.get(vp, wp);
                        if qv != 0.0 {
                            s += self.k[base + wp] * qv;
                        }
                    }
                }
                out.set(v, w, s);
            }
        }
        out
    }

    fn value(&self, q: &Matrix) -> f64 {
        let l = self.apply(q);
        inner(q, &l)
    }
}

fn inner(a: &Matrix, b: &Matrix) -> f64 {
    a.row_major().iter().zip(b.row_major()).map(|(x, y)| x * y).sum()
}

/// Conditional-gradient descent on the quadratic form from a given
/// start; the objective is evaluated exactly along each segment (it is a
/// univariate quadratic), so the iterate value never increases.
fn quad_descend(cost: &QuadCost, pg: &[f64], ph: &[f64], start: &Matrix, maximize: bool) -> (f64, Matrix) {
    let sign = if maximize { -1.0 } else { 1.0 };
    let mut q = start.clone();
    let mut lq = cost.apply(&q);
    let mut val = inner(&q, &lq);
    for _ in 0..500 {
        // grad of sign·F is 2·sign·L(Q)
        let grad = lq.scale(2.0 * sign);
        let v = lmo_weighted(&grad, pg, ph);
        let d = v.sub(&q);
        let ld = cost.apply(&d);
        let a = sign * inner(&d, &ld);
        let b = 2.0 * sign * inner(&d, &lq);
        if b >= -1e-14 {
            break; // no descent direction
        }
        let gamma = if a > 0.0 {
            (-b / (2.0 * a)).clamp(0.0, 1.0)
        } else {
            1.0
        };
        if gamma <= 0.0 {
            break;
        }
        let improvement = -(b * gamma + a * gamma * gamma);
        q = q.add(&d.scale(gamma));
        lq = cost.apply(&q);
        val = inner(&q, &lq);
        if improvement < 1e-14 {
            break;
        }
    }
    (val, q)
}

/// LMO for general marginals; uniform marginals take the exact integer
/// path, others are rationalized with denominator 10^6 (largest
/// remainder), which is flagged by the callers that allow weights.
fn lmo_weighted(costm: &Matrix, pg: &[f64], ph: &[f64]) -> Matrix {
    let (m, n) = (costm.rows(), costm.cols());
    let uni = |p: &[f64], k: usize| p.iter().all(|&x| (x - 1.0 / k as f64).abs() < 1e-12);
    if uni(pg, m) && uni(ph, n) {
        return linear_minimization_oracle(costm);
    }
    const D: i64 = 1_000_000;
    let quantize = |p: &[f64]| -> Vec<i64> {
        let mut v: Vec<i64> = p.iter().map(|&x| (x * D as f64).floor() as i64).collect();
        let mut rem: Vec<(f64, usize)> = p
            .iter()
            .enumerate()
            .map(|(i, &x)| (x * D as f64 - (x * D as f64).floor(), i))
            .collect();
        rem.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        let mut deficit = D - v.iter().sum::<i64>();
        for &(_, i) in &rem {
            if deficit == 0 {
                break;
            }
            v[i] += 1;
            deficit -= 1;
        }
        v
    };
    let x = transport_lmo_integer(costm, &quantize(pg), &quantize(ph));
    x.scale(1.0 / D as f64)
}

fn validate_weights(p: &[f64], len: usize) -> Result<(), GraphsimError> {
    if p.len() != len {
        return Err(GraphsimError::InvalidArgument("weight vector length".into()));
    }
    if p.iter().any(|&x| x < 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(GraphsimError::InvalidArgument(
            "weights must be nonnegative and sum to 1".into(),
        ));
    }
    Ok(())
}

fn start_couplings(
    g: &Graph,
    h: &Graph,
    uniform: bool,
    restarts: usize,
    seed: u64,
) -> Vec<Matrix> {
    let (m, n) = (g.order(), h.order());
    let mut starts = vec![uniform_coupling(m, n)];
    if uniform {
        if m == n && m <= 8 {
            if let Ok(rep) = align_metric(g, h, AlignmentMetricKind::EditEntrywise1) {
                starts.push(permutation_coupling(&rep.witness.unwrap()));
            }
        }
        // copy-splitting coupling when one graph is a blow-up of the other
        if n > m && n % m == 0 {
            if let Some(q) = blow_up_coupling(g, h, n / m) {
                starts.push(q);
            }
        }
        if m > n && m % n == 0 {
            if let Some(q) = blow_up_coupling(h, g, m / n) {
                starts.push(q.transpose());
            }
        }
        if m == n {
            let (gc, hc) = wl::joint_stable_colors(g, h);
            let mut counts = std::collections::HashMap::new();
            for &c in &hc {
                *counts.entry(c).or_insert(0usize) += 1;
            }
            if gc.iter().all(|c| counts.contains_key(c)) {
                let mut q = Matrix::zeros(m, n);
                for (v, &cv) in gc.iter().enumerate() {
                    for (w, &cw) in hc.iter().enumerate() {
                        if cv == cw {
                            q.set(v, w, 1.0 / (n as f64 * counts[&cv] as f64));
                        }
                    }
                }
                if is_feasible_coupling(&q, 1e-9) {
                    starts.push(q);
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while starts.len() < restarts.max(1) + 1 {
        let mut c = Matrix::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                c.set(i, j, rng.gen_range(-1.0..1.0));
            }
        }
        starts.push(linear_minimization_oracle(&c));
    }
    starts
}

/// Coupling splitting each vertex of `small` across the copies of a
/// blow-up image in `big`; objective value 0 when `big ≅ small^{⊙k}`.
fn blow_up_coupling(small: &Graph, big: &Graph, k: usize) -> Option<Matrix> {
    let blown = small.blow_up(k).ok()?;
    let sigma = graph::isomorphic(&blown, big)?;
    let m = small.order();
    let mut q = Matrix::zeros(m, big.order());
    for v in 0..m {
        for i in 0..k {
            q.set(v, sigma[v * k + i], 1.0 / (k * m) as f64);
        }
    }
    Some(q)
}

/// Best local optimum of the transport objective over the restart set;
/// an upper bound on the true infimum (the objective is an indefinite
/// quadratic, so only bounds are reported).
pub fn ot_metric(
    g: &Graph,
    h: &Graph,
    kind: OtKind,
    p_g: Option<&[f64]>,
    p_h: Option<&[f64]>,
    restarts: usize,
    seed: u64,
) -> Result<OtResult, GraphsimError> {
    let (m, n) = (g.order(), h.order());
    if m == 0 || n == 0 {
        return Err(GraphsimError::InvalidGraph("empty graph in transport metric".into()));
    }
    if restarts == 0 {
        return Err(GraphsimError::InvalidArgument("restarts must be at least 1".into()));
    }
    let pg: Vec<f64> = match p_g {
        Some(p) => {
            validate_weights(p, m)?;
            p.to_vec()
        }
        None => vec![1.0 / m as f64; m],
    };
    let ph: Vec<f64> = match p_h {
        Some(p) => {
            validate_weights(p, n)?;
            p.to_vec()
        }
        None => vec![1.0 / n as f64; n],
    };
    let uniform = p_g.is_none() && p_h.is_none();

    let (mg, mh, signed, sentinel_note) = match kind {
        OtKind::OtL1 => (g.adjacency(), h.adjacency(), false, false),
        OtKind::OtCut => (g.adjacency(), h.adjacency(), true, false),
        OtKind::GwDist => (
            g.distance_matrix(),
            h.distance_matrix(),
            false,
            !g.is_connected() || !h.is_connected(),
        ),
    };
    let cost = QuadCost::build(&mg, &mh, signed);
    let starts = start_couplings(g, h, uniform, restarts, seed);

    let (value, coupling) = if signed {
        // minimize |F|: descend F and ascend F; if the signs straddle 0
        // the quadratic along the connecting segment has an exact root
        let mut lo = (f64::INFINITY, starts[0].clone());
        let mut hi = (f64::NEG_INFINITY, starts[0].clone());
        for s in &starts {
            let (v, q) = quad_descend(&cost, &pg, &ph, s, false);
            if v < lo.0 {
                lo = (v, q);
            }
            let (v, q) = quad_descend(&cost, &pg, &ph, s, true);
            if v > hi.0 {
                hi = (v, q);
            }
        }
        if lo.0 <= 0.0 && hi.0 >= 0.0 {
            let q = signed_root_on_segment(&cost, &lo.1, &hi.1);
            let v = cost.value(&q).abs();
            (v, q)
        } else if lo.0 > 0.0 {
            lo
        } else {
            (hi.0.abs(), hi.1)
        }
    } else {
        let mut best = (f64::INFINITY, starts[0].clone());
        for s in &starts {
            let (v, q) = quad_descend(&cost, &pg, &ph, s, false);
            if v < best.0 {
                best = (v, q);
            }
        }
        (best.0.max(0.0), best.1)
    };

    let mut report = MetricReport::plain(value, value, false)
        .with_note("upper bound from conditional-gradient local optima over restarts");
    if sentinel_note {
        report = report.with_note("distance matrix uses the disconnected-pair sentinel 2n");
    }
    Ok(OtResult { report, coupling })
}

/// F is quadratic along the segment; picks a point where the signed form
/// vanishes (exists because the endpoint values straddle zero).
fn signed_root_on_segment(cost: &QuadCost, q_neg: &Matrix, q_pos: &Matrix) -> Matrix {
    let d = q_pos.sub(q_neg);
    let f0 = cost.value(q_neg);
    let ld = cost.apply(&d);
    let lq = cost.apply(q_neg);
    let a = inner(&d, &ld);
    let b = 2.0 * inner(&d, &lq);
    // roots of a t² + b t + f0 = 0 in [0,1]
    let mut root = None;
    if a.abs() < 1e-15 {
        if b.abs() > 1e-15 {
            let t = -f0 / b;
            if (0.0..=1.0).contains(&t) {
                root = Some(t);
            }
        }
    } else {
        let disc = b * b - 4.0 * a * f0;
        if disc >= 0.0 {
            let s = disc.sqrt();
            for t in [(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)] {
                if (0.0..=1.0).contains(&t) {
                    root = Some(t);
                    break;
                }
            }
        }
    }
    // fall back to bisection against round-off
    let t = root.unwrap_or_else(|| {
        let f = |t: f64| cost.value(&q_neg.add(&d.scale(t)));
        let (mut a, mut b) = (0.0f64, 1.0f64);
        let (fa, _fb) = (f(a), f(b));
        for _ in 0..80 {
            let mid = 0.5 * (a + b);
            if (f(mid) <= 0.0) == (fa <= 0.0) {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    });
    q_neg.add(&d.scale(t))
}

/// Normalized exact alignment values on matched blow-ups for
/// ℓ = 1..ℓ_max: equal orders use the ℓ-fold blow-up of both sides,
/// unequal orders blow up to the ℓ-fold common order lcm(m,n). Each
/// value is an upper bound on the limiting blow-up distance; the
/// sequence is non-increasing along divisibility chains. The second
/// return is true when the budget truncated the sequence.
pub fn blowup_metric(
    g: &Graph,
    h: &Graph,
    kind: BlowupKind,
    l_max: usize,
) -> Result<(Vec<f64>, bool), GraphsimError> {
    if l_max == 0 {
        return Err(GraphsimError::InvalidArgument("l_max must be at least 1".into()));
    }
    let (m, n) = (g.order(), h.order());
    if m == 0 || n == 0 {
        return Err(GraphsimError::InvalidGraph("empty graph in blow-up metric".into()));
    }
    let akind = match kind {
        BlowupKind::L1 => AlignmentMetricKind::EditEntrywise1,
        BlowupKind::Local => AlignmentMetricKind::LocalOperator,
        BlowupKind::Cut => AlignmentMetricKind::CutDistance,
    };
    let lcm = m / gcd(m, n) * n;
    let mut values = Vec::new();
    let mut truncated = false;
    for l in 1..=l_max {
        let order = l * lcm;
        if order > 9 {
            truncated = true;
            break;
        }
        let gb = g.blow_up(l * lcm / m)?;
        let hb = h.blow_up(l * lcm / n)?;
        let rep = align_metric(&gb, &hb, akind)?;
        values.push(rep.normalized_value);
    }
    if values.is_empty() {
        return Err(GraphsimError::BudgetExceeded(format!(
            "smallest common blow-up has order {lcm}, above the exact-alignment budget"
        )));
    }
    Ok((values, truncated))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Two-sided enclosure of the transport distance: the upper side is the
/// best of the conditional-gradient value and the blow-up alignment
/// values; the lower side combines the one-third alignment bound (L1,
/// same order) with the fractional relaxation seeded at the transport
/// coupling.
pub fn ot_bracket(
    g: &Graph,
    h: &Graph,
    kind: OtKind,
    l_max: usize,
    tol: f64,
) -> Result<Bracket, GraphsimError> {
    if kind == OtKind::GwDist {
        return Err(GraphsimError::InvalidArgument(
            "brackets are defined for the adjacency-based transport metrics".into(),
        ));
    }
    let ot = ot_metric(g, h, kind, None, None, 4, 0)?;
    let mut upper = ot.report.value;
    let mut upper_method = String::from("conditional gradient");
    let bkind = match kind {
        OtKind::OtL1 => BlowupKind::L1,
        OtKind::OtCut => BlowupKind::Cut,
        OtKind::GwDist => unreachable!(),
    };
    if let Ok((vals, _)) = blowup_metric(g, h, bkind, l_max) {
        for (i, &v) in vals.iter().enumerate() {
            if v < upper {
                upper = v;
                upper_method = format!("blow-up alignment at level {}", i + 1);
            }
        }
    }

    let mut lower = 0.0f64;
    let mut lower_method = String::from("trivial");
    if kind == OtKind::OtL1 && g.order() == h.order() && g.order() <= 8 {
        let exact = align_metric(g, h, AlignmentMetricKind::EditEntrywise1)?;
        let third = exact.normalized_value / 3.0;
        if third > lower {
            lower = third;
            lower_method = "one third of the normalized alignment value".into();
        }
    }
    let fnorm = match kind {
        OtKind::OtL1 => FracNorm::Entrywise1,
        _ => FracNorm::Cut,
    };
    let frac = frac_metric_seeded(g, h, fnorm, tol, std::slice::from_ref(&ot.coupling))?;
    let frac_lower = frac.report.value - tol;
    if frac_lower > lower {
        lower = frac_lower;
        lower_method = "fractional relaxation minus tolerance".into();
    }
    Ok(Bracket {
        lower: lower.max(0.0),
        upper,
        lower_method,
        upper_method,
    })
}

/// exp(−c·δ) similarity transform.
pub fn similarity(delta: f64, c: f64) -> Result<f64, GraphsimError> {
    if c <= 0.0 || delta < 0.0 {
        return Err(GraphsimError::InvalidArgument(
            "similarity needs c > 0 and delta >= 0".into(),
        ));
    }
    Ok((-c * delta).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, edgeless, erdos_renyi, two_triangles};

    #[test]
    fn identical_graphs_transport_to_zero() {
        let g = erdos_renyi(5, 0.5, 1).unwrap();
        for kind in [OtKind::OtL1, OtKind::OtCut, OtKind::GwDist] {
            let r = ot_metric(&g, &g, kind, None, None, 2, 0).unwrap();
            assert!(r.report.value <= 1e-12, "{kind:?}: {}", r.report.value);
        }
    }

    #[test]
    fn blow_up_pairs_transport_to_zero_exactly() {
        for seed in 0..4u64 {
            let g = erdos_renyi(4, 0.5, seed).unwrap();
            for k in 2..=3usize {
                let b = g.blow_up(k).unwrap();
                let r = ot_metric(&g, &b, OtKind::OtL1, None, None, 1, 0).unwrap();
                assert_eq!(r.report.value, 0.0, "seed {seed} k {k}");
                let r = ot_metric(&b, &g, OtKind::OtL1, None, None, 1, 0).unwrap();
                assert_eq!(r.report.value, 0.0, "reversed seed {seed} k {k}");
            }
        }
    }

    #[test]
    fn c6_vs_triangles_positive_transport() {
        let b = ot_bracket(&cycle(6).unwrap(), &two_triangles(), OtKind::OtL1, 1, 1e-6).unwrap();
        assert!(b.lower > 0.0, "lower side {}", b.lower);
        assert!(b.is_consistent(1e-9));
    }

    #[test]
    fn permutation_seed_caps_l1_value() {
        for seed in 0..6u64 {
            let g = erdos_renyi(5, 0.5, seed).unwrap();
            let h = erdos_renyi(5, 0.5, seed + 200).unwrap();
            let exact = align_metric(&g, &h, AlignmentMetricKind::EditEntrywise1).unwrap();
            let r = ot_metric(&g, &h, OtKind::OtL1, None, None, 2, seed).unwrap();
            assert!(
                r.report.value <= exact.normalized_value + 1e-12,
                "seed {seed}: {} vs {}",
                r.report.value,
                exact.normalized_value
            );
            assert!(r.report.value >= exact.normalized_value / 3.0 - 1e-9, "one-third bound");
        }
    }

    #[test]
    fn blowup_sequence_and_monotonicity() {
        let g = Graph::new(4, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let h = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        let (vals, _) = blowup_metric(&g, &h, BlowupKind::L1, 2).unwrap();
        assert_eq!(vals[0], 6.0 / 16.0);
        assert!(vals[1] <= 20.0 / 64.0 + 1e-12);
        assert!(vals[1] <= vals[0]);
        let (same, _) = blowup_metric(&g, &g, BlowupKind::L1, 2).unwrap();
        assert!(same.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn blowup_unequal_orders_uses_common_order() {
        let g = complete(2);
        let h = complete(3);
        let (vals, _) = blowup_metric(&g, &h, BlowupKind::L1, 1).unwrap();
        assert_eq!(vals.len(), 1); // order-6 common blow-up
        assert!(vals[0] > 0.0);
    }

    use crate::graph::Graph;

    #[test]
    fn bracket_identical_graphs() {
        let g = erdos_renyi(5, 0.4, 7).unwrap();
        let b = ot_bracket(&g, &g, OtKind::OtL1, 1, 1e-6).unwrap();
        assert!(b.upper <= 1e-9);
        assert!(b.lower <= b.upper + 1e-9);
    }

    #[test]
    fn bracket_consistency_random_pairs() {
        for seed in 0..6u64 {
            let g = erdos_renyi(4, 0.5, seed).unwrap();
            let h = erdos_renyi(4, 0.5, seed + 300).unwrap();
            for kind in [OtKind::OtL1, OtKind::OtCut] {
                let b = ot_bracket(&g, &h, kind, 2, 1e-6).unwrap();
                assert!(b.is_consistent(1e-9), "{kind:?} seed {seed}: {b:?}");
            }
        }
    }

    #[test]
    fn cut_transport_straddles_to_zero_on_equivalent_pair() {
        // C6 and two triangles have equal edge counts, so the flat
        // coupling already zeroes the signed form
        let r = ot_metric(&cycle(6).unwrap(), &two_triangles(), OtKind::OtCut, None, None, 2, 0)
            .unwrap();
        assert!(r.report.value <= 1e-9);
    }

    #[test]
    fn weighted_marginals_accepted() {
        let g = erdos_renyi(4, 0.5, 11).unwrap();
        let h = erdos_renyi(4, 0.5, 12).unwrap();
        let w = vec![0.4, 0.3, 0.2, 0.1];
        let r = ot_metric(&g, &h, OtKind::OtL1, Some(&w), Some(&w), 2, 0).unwrap();
        assert!(r.report.value >= 0.0);
        assert!(ot_metric(&g, &h, OtKind::OtL1, Some(&[0.5, 0.5]), None, 1, 0).is_err());
    }

    #[test]
    fn similarity_transform() {
        assert_eq!(similarity(0.0, 2.0).unwrap(), 1.0);
        assert!((similarity(std::f64::consts::LN_2, 1.0).unwrap() - 0.5).abs() < 1e-12);
        assert!(similarity(1.0, 0.0).is_err());
        let a = similarity(0.2, 1.5).unwrap();
        let b = similarity(0.3, 1.5).unwrap();
        assert!(a > b);
    }

    #[test]
    fn blowup_values_shrink_along_divisibility() {
        // d_l / l^2 is non-increasing when the level doubles
        for seed in 0..3u64 {
            let g = erdos_renyi(3, 0.6, seed).unwrap();
            let h = erdos_renyi(3, 0.6, seed + 400).unwrap();
            let d = |l: usize| {
                align_metric(
                    &g.blow_up(l).unwrap(),
                    &h.blow_up(l).unwrap(),
                    AlignmentMetricKind::EditEntrywise1,
                )
                .unwrap()
                .normalized_value
            };
            assert!(d(2) <= d(1) + 1e-9);
            let (g, h) = (complete(2), edgeless(2));
            let dd = |l: usize| {
                align_metric(
                    &g.blow_up(l).unwrap(),
                    &h.blow_up(l).unwrap(),
                    AlignmentMetricKind::EditEntrywise1,
                )
                .unwrap()
                .normalized_value
            };
            assert!(dd(4) <= dd(2) + 1e-12 && dd(2) <= dd(1) + 1e-12);
        }
    }
}
