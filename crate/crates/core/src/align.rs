//! Exact alignment-based distances: the minimum over vertex bijections of
//! a matrix norm of `A_G^π − A_H`, computed by branch-and-bound with
//! admissible lower bounds, plus padded variants and the correspondence
//! (Gromov-Hausdorff style) distance on shortest-path matrices.

use crate::graph::Graph;
use crate::matrix::{cut_norm_exact, Matrix};
use crate::report::MetricReport;
use crate::GraphsimError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlignmentMetricKind {
    /// Entrywise 1-norm of the adjacency difference (twice the edit distance).
    EditEntrywise1,
    /// Entrywise p-norm of the adjacency difference; p = ∞ is max entry.
    EntrywiseP(f64),
    /// Operator-∞ norm (max row sum); equals the operator-1 value on
    /// symmetric differences, and the "local edit" max edited degree.
    LocalOperator,
    /// Cut norm of the adjacency difference.
    CutDistance,
    /// Entrywise-∞ norm of the shortest-path matrix difference.
    Distortion,
    /// 0/1 indicator: 0 iff some bijection aligns the graphs exactly.
    IsomorphismDistance,
}

/// Internal cost shape evaluated on partial alignments. All four are
/// monotone under extending the aligned principal block, which makes the
/// block cost an admissible lower bound.
#[derive(Clone, Copy)]
enum Cost {
    SumPow(f64),
    MaxAbs,
    MaxRowSum,
    Cut,
}

fn block_cost(mg: &Matrix, mh: &Matrix, pi: &[usize], cost: Cost) -> f64 {
    let k = pi.len();
    let d = |u: usize, up: usize| mg.get(u, up) - mh.get(pi[u], pi[up]);
    match cost {
        Cost::SumPow(p) => {
            let mut s = 0.0;
            for u in 0..k {
                for up in 0..k {
                    let a = d(u, up).abs();
                    s += if p == 1.0 { a } else { a.powf(p) };
                }
            }
            s
        }
        Cost::MaxAbs => {
            let mut m = 0.0f64;
            for u in 0..k {
                for up in 0..k {
                    m = m.max(d(u, up).abs());
                }
            }
            m
        }
        Cost::MaxRowSum => {
            let mut m = 0.0f64;
            for u in 0..k {
                let s: f64 = (0..k).map(|up| d(u, up).abs()).sum();
                m = m.max(s);
            }
            m
        }
        Cost::Cut => {
            let mut b = Matrix::zeros(k, k);
            for u in 0..k {
                for up in 0..k {
                    b.set(u, up, d(u, up));
                }
            }
            cut_norm_exact(&b).expect("block within cut budget").value
        }
    }
}

/// For 0/1 matrices and sum-type costs: any alignment row contributes at
/// least |row sum difference|, and the cheapest matching of unassigned
/// rows to unused columns is the sorted one.
fn row_sum_bound(rg: &[f64], rh: &[f64], pi: &[usize], used: &[bool]) -> f64 {
    let mut a: Vec<f64> = (pi.len()..rg.len()).map(|u| rg[u]).collect();
    let mut b: Vec<f64> = (0..rh.len()).filter(|&w| !used[w]).map(|w| rh[w]).collect();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum()
}

struct Search<'a> {
    mg: &'a Matrix,
    mh: &'a Matrix,
    cost: Cost,
    rg: Vec<f64>,
    rh: Vec<f64>,
    use_row_bound: bool,
    best: f64,
    best_pi: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self, pi: &mut Vec<usize>, used: &mut Vec<bool>) {
        let n = self.mg.rows();
        if pi.len() == n {
            let c = block_cost(self.mg, self.mh, pi, self.cost);
            if c < self.best {
                self.best = c;
                self.best_pi = pi.clone();
            }
            return;
        }
        for w in 0..n {
            if used[w] {
                continue;
            }
            pi.push(w);
            used[w] = true;
            let mut lb = block_cost(self.mg, self.mh, pi, self.cost);
            if self.use_row_bound {
                lb += row_sum_bound(&self.rg, &self.rh, pi, used);
            }
            if lb < self.best {
                self.run(pi, used);
            }
            pi.pop();
            used[w] = false;
        }
    }
}

/// Exact minimum of `cost` over all bijections; the returned witness is
/// the lexicographically smallest optimal one (candidates are explored in
/// lexicographic order and replaced only on strict improvement).
fn minimize(mg: &Matrix, mh: &Matrix, cost: Cost) -> (f64, Vec<usize>) {
    let n = mg.rows();
    let zero_one = |m: &Matrix| m.row_major().iter().all(|&x| x == 0.0 || x == 1.0);
    let use_row_bound =
        matches!(cost, Cost::SumPow(_)) && zero_one(mg) && zero_one(mh);
    let row_sums = |m: &Matrix| {
        (0..n)
            .map(|u| (0..n).map(|up| m.get(u, up)).sum())
            .collect::<Vec<f64>>()
    };
    let mut s = Search {
        mg,
        mh,
        cost,
        rg: row_sums(mg),
        rh: row_sums(mh),
        use_row_bound,
        best: f64::INFINITY,
        best_pi: (0..n).collect(),
    };
    if n == 0 {
        return (0.0, vec![]);
    }
    s.run(&mut Vec::with_capacity(n), &mut vec![false; n]);
    (s.best, s.best_pi)
}

/// Exhaustive n!-enumeration used as the oracle mode; same tie-breaking
/// contract as `minimize`.
fn minimize_exhaustive(mg: &Matrix, mh: &Matrix, cost: Cost) -> (f64, Vec<usize>) {
    let n = mg.rows();
    let mut best = f64::INFINITY;
    let mut best_pi: Vec<usize> = (0..n).collect();
    let mut pi: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(
        mg: &Matrix,
        mh: &Matrix,
        cost: Cost,
        pi: &mut Vec<usize>,
        used: &mut Vec<bool>,
        best: &mut f64,
        best_pi: &mut Vec<usize>,
    ) {
        let n = mg.rows();
        if pi.len() == n {
            let c = block_cost(mg, mh, pi, cost);
            if c < *best {
                *best = c;
                *best_pi = pi.clone();
            }
            return;
        }
        for w in 0..n {
            if !used[w] {
                pi.push(w);
                used[w] = true;
                rec(mg, mh, cost, pi, used, best, best_pi);
                pi.pop();
                used[w] = false;
            }
        }
    }
    if n > 0 {
        rec(mg, mh, cost, &mut pi, &mut used, &mut best, &mut best_pi);
    } else {
        best = 0.0;
    }
    (best, best_pi)
}

fn kind_setup(g: &Graph, h: &Graph, kind: AlignmentMetricKind) -> Result<(Matrix, Matrix, Cost), GraphsimError> {
    let (mg, mh, cost) = match kind {
        AlignmentMetricKind::EditEntrywise1 => (g.adjacency(), h.adjacency(), Cost::SumPow(1.0)),
        AlignmentMetricKind::EntrywiseP(p) => {
            if p < 1.0 {
                return Err(GraphsimError::InvalidArgument(format!(
                    "entrywise norm needs p >= 1, got {p}"
                )));
            }
            let c = if p.is_infinite() { Cost::MaxAbs } else { Cost::SumPow(p) };
            (g.adjacency(), h.adjacency(), c)
        }
        AlignmentMetricKind::LocalOperator => (g.adjacency(), h.adjacency(), Cost::MaxRowSum),
        AlignmentMetricKind::CutDistance => (g.adjacency(), h.adjacency(), Cost::Cut),
        AlignmentMetricKind::Distortion => (g.distance_matrix(), h.distance_matrix(), Cost::MaxAbs),
        AlignmentMetricKind::IsomorphismDistance => (g.adjacency(), h.adjacency(), Cost::MaxAbs),
    };
    Ok((mg, mh, cost))
}

fn finish(
    g: &Graph,
    h: &Graph,
    kind: AlignmentMetricKind,
    raw: f64,
    pi: Vec<usize>,
) -> MetricReport {
    let n = g.order() as f64;
    let value = match kind {
        AlignmentMetricKind::EntrywiseP(p) if p.is_finite() && p != 1.0 => raw.powf(1.0 / p),
        AlignmentMetricKind::IsomorphismDistance => {
            if raw == 0.0 {
                0.0
            } else {
                1.0
            }
        }
        _ => raw,
    };
    let normalized = match kind {
        AlignmentMetricKind::EditEntrywise1 | AlignmentMetricKind::CutDistance => value / (n * n),
        AlignmentMetricKind::LocalOperator => value / n,
        _ => value,
    };
    let mut rep = MetricReport::exact_with_witness(value, normalized, pi);
    if kind == AlignmentMetricKind::Distortion && (!g.is_connected() || !h.is_connected()) {
        rep = rep.with_note("distance matrix uses the disconnected-pair sentinel 2n");
    }
    rep
}

/// Minimum over vertex bijections π of the chosen norm of `A_G^π − A_H`
/// (shortest-path matrices for `Distortion`). Exact; witness is the
/// lexicographically smallest optimal bijection.
pub fn align_metric(g: &Graph, h: &Graph, kind: AlignmentMetricKind) -> Result<MetricReport, GraphsimError> {
    align_with(g, h, kind, false)
}

/// Exhaustive-enumeration variant for cross-checking (n ≤ 8).
pub fn align_metric_exhaustive(
    g: &Graph,
    h: &Graph,
    kind: AlignmentMetricKind,
) -> Result<MetricReport, GraphsimError> {
    align_with(g, h, kind, true)
}

fn align_with(
    g: &Graph,
    h: &Graph,
    kind: AlignmentMetricKind,
    exhaustive: bool,
) -> Result<MetricReport, GraphsimError> {
    if g.order() != h.order() {
        return Err(GraphsimError::OrderMismatch(g.order(), h.order()));
    }
    let limit = if exhaustive { 8 } else { 9 };
    if g.order() > limit {
        return Err(GraphsimError::BudgetExceeded(format!(
            "alignment over {}! bijections exceeds the order-{limit} budget",
            g.order()
        )));
    }
    let (mg, mh, cost) = kind_setup(g, h, kind)?;
    let (raw, pi) = if exhaustive {
        minimize_exhaustive(&mg, &mh, cost)
    } else {
        minimize(&mg, &mh, cost)
    };
    Ok(finish(g, h, kind, raw, pi))
}

/// Minimum number of edge insertions/deletions turning G into an
/// isomorph of H: half the entrywise-1 alignment value.
pub fn edit_distance(g: &Graph, h: &Graph) -> Result<MetricReport, GraphsimError> {
    let rep = align_metric(g, h, AlignmentMetricKind::EditEntrywise1)?;
    Ok(MetricReport {
        value: rep.value / 2.0,
        normalized_value: rep.value / 2.0 / (g.order() as f64).powi(2),
        ..rep
    })
}

/// Minimum over edit sets D of the maximum number of edited edges at a
/// single vertex; equals the operator-∞ (and operator-1) alignment value.
pub fn local_edit_distance(g: &Graph, h: &Graph) -> Result<MetricReport, GraphsimError> {
    align_metric(g, h, AlignmentMetricKind::LocalOperator)
}

/// Cut distance straight from its combinatorial form: the minimum over
/// bijections of the maximum over vertex-set pairs (X, X′) of
/// |e_G(X,X′) − e_H(π(X),π(X′))|, where e counts edges with both ends in
/// X ∩ X′ twice. Cross-check target for the cut-norm alignment.
pub fn cut_distance_graph_form(g: &Graph, h: &Graph) -> Result<MetricReport, GraphsimError> {
    if g.order() != h.order() {
        return Err(GraphsimError::OrderMismatch(g.order(), h.order()));
    }
    let n = g.order();
    if n > 7 {
        return Err(GraphsimError::BudgetExceeded(format!(
            "cut distance in graph form enumerates {}!·4^{} terms",
            n, n
        )));
    }
    // e(X, X') tables indexed by bitmask pairs.
    let table = |gr: &Graph| -> Vec<Vec<f64>> {
        let a = gr.adjacency();
        let mut t = vec![vec![0.0; 1 << n]; 1 << n];
        for x in 0..(1usize << n) {
            for xp in 0..(1usize << n) {
                let mut s = 0.0;
                for u in 0..n {
                    if x >> u & 1 == 0 {
                        continue;
                    }
                    for v in 0..n {
                        if xp >> v & 1 == 1 {
                            s += a.get(u, v);
                        }
                    }
                }
                t[x][xp] = s;
            }
        }
        t
    };
    let eg = table(g);
    let eh = table(h);
    let mut best = f64::INFINITY;
    let mut best_pi: Vec<usize> = (0..n).collect();
    let mut pi: Vec<usize> = (0..n).collect();
    permute_lex(&mut pi, &mut |pi: &[usize]| {
        let map = |x: usize| -> usize {
            (0..n).filter(|&u| x >> u & 1 == 1).map(|u| 1usize << pi[u]).sum()
        };
        let mut worst = 0.0f64;
        'outer: for x in 0..(1usize << n) {
            let mx = map(x);
            for xp in 0..(1usize << n) {
                let d = (eg[x][xp] - eh[mx][map(xp)]).abs();
                if d > worst {
                    worst = d;
                    if worst >= best {
                        break 'outer;
                    }
                }
            }
        }
        if worst < best {
            best = worst;
            best_pi = pi.to_vec();
        }
    });
    Ok(MetricReport::exact_with_witness(
        best,
        best / (n as f64 * n as f64),
        best_pi,
    ))
}

/// Calls `f` with every permutation of 0..n in lexicographic order.
fn permute_lex(buf: &mut [usize], f: &mut impl FnMut(&[usize])) {
    let n = buf.len();
    let mut pi: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(
        n: usize,
        pi: &mut Vec<usize>,
        used: &mut Vec<bool>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if pi.len() == n {
            f(pi);
            return;
        }
        for w in 0..n {
            if !used[w] {
                pi.push(w);
                used[w] = true;
                rec(n, pi, used, f);
                pi.pop();
                used[w] = false;
            }
        }
    }
    rec(n, &mut pi, &mut used, f);
}

/// Pads the smaller graph with k = ||G|−|H|| isolated vertices, then
/// reports `α·k + β·(alignment value)`.
pub fn padded_metric(
    g: &Graph,
    h: &Graph,
    kind: AlignmentMetricKind,
    alpha: f64,
    beta: f64,
) -> Result<MetricReport, GraphsimError> {
    let k = g.order().abs_diff(h.order());
    let (gp, hp) = if g.order() < h.order() {
        (g.pad(k), h.clone())
    } else {
        (g.clone(), h.pad(k))
    };
    let rep = align_metric(&gp, &hp, kind)?;
    let value = alpha * k as f64 + beta * rep.value;
    let n = gp.order() as f64;
    let normalized = match kind {
        AlignmentMetricKind::EditEntrywise1 | AlignmentMetricKind::CutDistance => value / (n * n),
        AlignmentMetricKind::LocalOperator => value / n,
        _ => value,
    };
    Ok(MetricReport {
        value,
        normalized_value: normalized,
        ..rep
    })
}

/// Minimum over correspondences R ⊆ V×W (total on both sides) of the
/// maximum metric distortion |D_G(v,v′) − D_H(w,w′)| over pairs in R.
/// Reported in the un-halved convention.
pub fn gromov_hausdorff(g: &Graph, h: &Graph) -> Result<MetricReport, GraphsimError> {
    let (n, m) = (g.order(), h.order());
    if n * m > 20 {
        return Err(GraphsimError::BudgetExceeded(format!(
            "correspondence search over {n}x{m} pairs exceeds the 20-cell budget"
        )));
    }
    if n == 0 || m == 0 {
        return Err(GraphsimError::InvalidGraph("empty graph in correspondence distance".into()));
    }
    let dg = g.distance_matrix();
    let dh = h.distance_matrix();
    // Assign every v ∈ V a nonempty image set; branch-and-bound on the
    // running max distortion, then require the images to cover W.
    let mut best = f64::INFINITY;
    fn rec(
        dg: &Matrix,
        dh: &Matrix,
        images: &mut Vec<usize>,
        covered: usize,
        so_far: f64,
        best: &mut f64,
    ) {
        let n = dg.rows();
        let m = dh.rows();
        let v = images.len();
        if v == n {
            if covered == (1usize << m) - 1 && so_far < *best {
                *best = so_far;
            }
            return;
        }
        for set in 1usize..(1 << m) {
            // distortion added by pairing vertex v (image set `set`)
            // against everything already placed, and within itself
            let mut local = so_far;
            for w in 0..m {
                if set >> w & 1 == 0 {
                    continue;
                }
                for wp in 0..m {
                    if set >> wp & 1 == 1 {
                        local = local.max((dg.get(v, v) - dh.get(w, wp)).abs());
                    }
                }
                for (vp, &setp) in images.iter().enumerate() {
                    for wp in 0..m {
                        if setp >> wp & 1 == 1 {
                            local = local.max((dg.get(v, vp) - dh.get(w, wp)).abs());
                        }
                    }
                }
            }
            if local >= *best {
                continue;
            }
            images.push(set);
            rec(dg, dh, images, covered | set, local, best);
            images.pop();
        }
    }
    rec(&dg, &dh, &mut Vec::with_capacity(n), 0, 0.0, &mut best);
    let mut rep = MetricReport::plain(best, best, true);
    if !g.is_connected() || !h.is_connected() {
        rep = rep.with_note("distance matrix uses the disconnected-pair sentinel 2n");
    }
    Ok(rep)
}

/// Re-evaluates the norm at a given bijection; used to validate witnesses.
pub fn objective_at(
    g: &Graph,
    h: &Graph,
    kind: AlignmentMetricKind,
    pi: &[usize],
) -> Result<f64, GraphsimError> {
    if pi.len() != g.order() || g.order() != h.order() {
        return Err(GraphsimError::InvalidArgument("bijection length".into()));
    }
    let (mg, mh, cost) = kind_setup(g, h, kind)?;
    let raw = block_cost(&mg, &mh, pi, cost);
    Ok(match kind {
        AlignmentMetricKind::EntrywiseP(p) if p.is_finite() && p != 1.0 => raw.powf(1.0 / p),
        AlignmentMetricKind::IsomorphismDistance => {
            if raw == 0.0 {
                0.0
            } else {
                1.0
            }
        }
        _ => raw,
    })
}
