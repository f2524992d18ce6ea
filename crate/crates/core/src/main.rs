//! Command-line surface. Every command emits a deterministic JSON
//! report on stdout (timings, when measured, go to stderr so reruns are
//! byte-identical). Exit codes: 0 success, 1 check failure, 2 usage
//! error, 3 budget exceeded.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use graphsim::align::{
    align_metric, align_metric_exhaustive, gromov_hausdorff, padded_metric, AlignmentMetricKind,
};
use graphsim::experiments::{features, random_cut_experiment};
use graphsim::frac::{frac_metric, fractional_isomorphism, FracNorm};
use graphsim::graph::{
    complete, complete_bipartite, cycle, edgeless, erdos_renyi, path, two_triangles, Graph,
};
use graphsim::hom::{
    delta_class, ed_density, emb, hd, hom, hom_tree, rational_to_f64, sd, semb, GraphClass,
};
use graphsim::matrix::{cut_norm_exact, entrywise_norm, operator_norm, spectral_norm};
use graphsim::ot::{blowup_metric, ot_bracket, ot_metric, similarity, BlowupKind, OtKind};
use graphsim::sampling::{sampling_distance, SampleMode};
use graphsim::verify::{run_suite, BudgetProfile};
use graphsim::wl::{refine, wl_distinguishes, wl_kernel, wl_metric, KernelMode};
use graphsim::GraphsimError;

#[derive(Parser)]
#[command(name = "graphsim", version, about = "Graph distance and similarity toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a graph and print it as JSON.
    Gen {
        /// complete | edgeless | path | cycle | bipartite | er | two-triangles
        kind: String,
        #[arg(default_value_t = 0)]
        n: usize,
        /// Second part size for bipartite graphs.
        #[arg(long, default_value_t = 0)]
        b: usize,
        /// Edge probability for er.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Matrix norms of a graph's adjacency matrix or of A_G − A_H.
    Norm {
        g1: PathBuf,
        g2: Option<PathBuf>,
        /// entrywise1 | operator-inf | spectral | cut | frobenius
        #[arg(long, default_value = "cut")]
        kind: String,
    },
    /// Distances between two graphs.
    Dist {
        g1: PathBuf,
        g2: PathBuf,
        /// ed | l1 | local | cut | dist | iso | gh | frac-l1 | frac-cut |
        /// ot-l1 | ot-cut | gw | blowup-l1 | blowup-local | blowup-cut |
        /// hom-class
        #[arg(long, default_value = "ed")]
        metric: String,
        /// raw | hat — which value leads the report.
        #[arg(long, default_value = "raw")]
        normalize: String,
        /// "alpha,beta" padding for unequal orders on alignment metrics.
        #[arg(long)]
        pad: Option<String>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = false)]
        witness: bool,
        #[arg(long, default_value_t = 2)]
        lmax: usize,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// all | trees | cycles | paths (hom-class metric)
        #[arg(long, default_value = "all")]
        class: String,
        #[arg(long, default_value_t = 4)]
        kmax: usize,
        /// Map the distance to exp(−c·d).
        #[arg(long)]
        similarity: Option<f64>,
        /// Cross-check against the exhaustive algorithm where one exists.
        #[arg(long, default_value_t = false)]
        oracle: bool,
    },
    /// Color-refinement kernel between two graphs.
    Kernel {
        g1: PathBuf,
        g2: PathBuf,
        /// geometric | truncated
        #[arg(long, default_value = "geometric")]
        mode: String,
        #[arg(long, default_value_t = 5)]
        level: usize,
    },
    /// Color refinement of one graph, or the distinguishing depth of two.
    Wl {
        g1: PathBuf,
        g2: Option<PathBuf>,
        #[arg(long)]
        iterations: Option<usize>,
    },
    /// Homomorphism-type counts of a pattern in a target.
    Hom {
        pattern: PathBuf,
        target: PathBuf,
        /// hom | emb | semb | tree | hd | ed | sd
        #[arg(long, default_value = "hom")]
        count: String,
    },
    /// Sampling distance between two graphs.
    Sample {
        g1: PathBuf,
        g2: PathBuf,
        #[arg(long, default_value_t = 4)]
        kmax: usize,
        /// exact | mc
        #[arg(long, default_value = "exact")]
        mode: String,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Counting features of one graph.
    Features { g1: PathBuf },
    /// Run the identity self-check suite.
    Verify {
        /// tiny | desk | extended
        #[arg(long, default_value = "desk")]
        budget: String,
    },
    /// Ensemble experiment: random-pair cut-norm concentration.
    Bench {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct Ctx {
    digest: Sha256,
}

impl Ctx {
    fn new() -> Self {
        Ctx { digest: Sha256::new() }
    }

    fn load(&mut self, path: &PathBuf) -> Result<Graph, GraphsimError> {
        let text = if path.as_os_str() == "-" {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| GraphsimError::Parse(e.to_string(), 0))?;
            s
        } else {
            std::fs::read_to_string(path)
                .map_err(|e| GraphsimError::Parse(format!("{}: {e}", path.display()), 0))?
        };
        self.digest.update(text.as_bytes());
        if text.trim_start().starts_with('{') {
            Graph::from_json(&text)
        } else {
            Graph::from_edge_list(&text)
        }
    }
}

fn usage(msg: &str) -> GraphsimError {
    GraphsimError::InvalidArgument(msg.into())
}

fn align_kind(metric: &str) -> Option<AlignmentMetricKind> {
    match metric {
        "ed" | "l1" => Some(AlignmentMetricKind::EditEntrywise1),
        "local" => Some(AlignmentMetricKind::LocalOperator),
        "cut" => Some(AlignmentMetricKind::CutDistance),
        "dist" => Some(AlignmentMetricKind::Distortion),
        "iso" => Some(AlignmentMetricKind::IsomorphismDistance),
        _ => None,
    }
}

fn report_value(rep: &graphsim::MetricReport, normalize: &str, witness: bool) -> Value {
    let mut v = json!({
        "value": if normalize == "hat" { rep.normalized_value } else { rep.value },
        "raw": rep.value,
        "normalized": rep.normalized_value,
        "exact": rep.exact,
        "notes": rep.notes,
    });
    if witness {
        v["witness"] = json!(rep.witness);
    }
    v
}

/// Ok(true) = success, Ok(false) = a check failed (exit 1).
fn run(cmd: &Cmd, ctx: &mut Ctx) -> Result<(Value, bool), GraphsimError> {
    match cmd {
        Cmd::Gen { kind, n, b, p, seed } => {
            let g = match kind.as_str() {
                "complete" => complete(*n),
                "edgeless" => edgeless(*n),
                "path" => path(*n),
                "cycle" => cycle(*n)?,
                "bipartite" => complete_bipartite(*n, *b),
                "er" => erdos_renyi(*n, *p, *seed)?,
                "two-triangles" => two_triangles(),
                other => return Err(usage(&format!("unknown generator '{other}'"))),
            };
            Ok((serde_json::from_str(&g.to_json()).unwrap(), true))
        }
        Cmd::Norm { g1, g2, kind } => {
            let a = ctx.load(g1)?.adjacency();
            let m = match g2 {
                Some(p2) => a.sub(&ctx.load(p2)?.adjacency()),
                None => a,
            };
            let value = match kind.as_str() {
                "entrywise1" => entrywise_norm(&m, 1.0)?,
                "operator-inf" => operator_norm(&m, f64::INFINITY)?,
                "spectral" => spectral_norm(&m, 1e-9)?,
                "cut" => cut_norm_exact(&m)?.value,
                "frobenius" => entrywise_norm(&m, 2.0)?,
                other => return Err(usage(&format!("unknown norm '{other}'"))),
            };
            Ok((json!({ "norm": kind, "value": value }), true))
        }
        Cmd::Dist {
            g1,
            g2,
            metric,
            normalize,
            pad,
            tol,
            witness,
            lmax,
            restarts,
            seed,
            class,
            kmax,
            similarity: sim,
            oracle,
        } => {
            let g = ctx.load(g1)?;
            let h = ctx.load(g2)?;
            let mut ok = true;
            let mut payload = if let Some(kind) = align_kind(metric) {
                let rep = match pad {
                    Some(pad_arg) if g.order() != h.order() => {
                        let parts: Vec<&str> = pad_arg.split(',').collect();
                        if parts.len() != 2 {
                            return Err(usage("--pad expects 'alpha,beta'"));
                        }
                        let alpha: f64 =
                            parts[0].trim().parse().map_err(|_| usage("bad --pad alpha"))?;
                        let beta: f64 =
                            parts[1].trim().parse().map_err(|_| usage("bad --pad beta"))?;
                        padded_metric(&g, &h, kind, alpha, beta)?
                    }
                    _ => align_metric(&g, &h, kind)?,
                };
                if *oracle && g.order() == h.order() {
                    let brute = align_metric_exhaustive(&g, &h, kind)?;
                    if (brute.value - rep.value).abs() > 1e-9 {
                        ok = false;
                    }
                }
                let mut rep = rep;
                if *metric == "ed" {
                    // edit distance is half the entrywise-1 value
                    rep.value /= 2.0;
                    rep.normalized_value = rep.value / (g.order().max(h.order()).pow(2)) as f64;
                }
                report_value(&rep, normalize, *witness)
            } else {
                match metric.as_str() {
                    "gh" => report_value(&gromov_hausdorff(&g, &h)?, normalize, *witness),
                    "frac-l1" | "frac-cut" => {
                        let norm = if metric.ends_with("cut") {
                            FracNorm::Cut
                        } else {
                            FracNorm::Entrywise1
                        };
                        let res = frac_metric(&g, &h, norm, *tol)?;
                        let mut v = report_value(&res.report, normalize, false);
                        v["iterations"] = json!(res.trace.iterations);
                        if norm == FracNorm::Entrywise1 && g.order() == h.order() {
                            v["fractionally_isomorphic"] =
                                json!(fractional_isomorphism(&g, &h)?.is_some());
                        }
                        v
                    }
                    "ot-l1" | "ot-cut" | "gw" => {
                        let kind = match metric.as_str() {
                            "ot-l1" => OtKind::OtL1,
                            "ot-cut" => OtKind::OtCut,
                            _ => OtKind::GwDist,
                        };
                        let res = ot_metric(&g, &h, kind, None, None, *restarts, *seed)?;
                        let mut v = report_value(&res.report, normalize, false);
                        if kind != OtKind::GwDist {
                            let b = ot_bracket(&g, &h, kind, *lmax, *tol)?;
                            v["bracket"] = serde_json::to_value(&b).unwrap();
                        }
                        v
                    }
                    "blowup-l1" | "blowup-local" | "blowup-cut" => {
                        let kind = match metric.as_str() {
                            "blowup-l1" => BlowupKind::L1,
                            "blowup-local" => BlowupKind::Local,
                            _ => BlowupKind::Cut,
                        };
                        let (values, truncated) = blowup_metric(&g, &h, kind, *lmax)?;
                        let best = values.iter().cloned().fold(f64::INFINITY, f64::min);
                        json!({
                            "value": best,
                            "levels": values,
                            "truncated": truncated,
                            "exact": false,
                        })
                    }
                    "hom-class" => {
                        let class = match class.as_str() {
                            "all" => GraphClass::AllGraphsLabeled,
                            "trees" => GraphClass::Trees,
                            "cycles" => GraphClass::Cycles,
                            "paths" => GraphClass::Paths,
                            other => return Err(usage(&format!("unknown class '{other}'"))),
                        };
                        let dm = delta_class(&g, &h, class, *kmax)?;
                        json!({
                            "value": dm.value,
                            "squared_sum": dm.squared_sum.to_string(),
                            "tail_bound": dm.tail_bound,
                            "exact": true,
                        })
                    }
                    other => return Err(usage(&format!("unknown metric '{other}'"))),
                }
            };
            if let Some(c) = sim {
                let d = payload["value"].as_f64().unwrap_or(0.0);
                payload["similarity"] = json!(similarity(d, *c)?);
            }
            payload["metric"] = json!(metric);
            Ok((payload, ok))
        }
        Cmd::Kernel { g1, g2, mode, level } => {
            let g = ctx.load(g1)?;
            let h = ctx.load(g2)?;
            let m = match mode.as_str() {
                "geometric" => KernelMode::Geometric,
                "truncated" => KernelMode::Truncated(*level),
                other => return Err(usage(&format!("unknown kernel mode '{other}'"))),
            };
            Ok((
                json!({
                    "kernel": wl_kernel(&g, &h, m),
                    "metric": wl_metric(&g, &h, m),
                    "mode": mode,
                }),
                true,
            ))
        }
        Cmd::Wl { g1, g2, iterations } => {
            let g = ctx.load(g1)?;
            match g2 {
                Some(p2) => {
                    let h = ctx.load(p2)?;
                    let depth = wl_distinguishes(&g, &h);
                    Ok((
                        json!({
                            "distinguished_at": depth,
                            "equivalent": depth.is_none(),
                        }),
                        true,
                    ))
                }
                None => {
                    let r = refine(&g, *iterations);
                    let last = r.colors.last().cloned().unwrap_or_default();
                    let classes = last.iter().copied().max().map_or(0, |m| m + 1);
                    Ok((
                        json!({
                            "stable_at": r.stable_at,
                            "classes": classes,
                            "colors": last,
                        }),
                        true,
                    ))
                }
            }
        }
        Cmd::Hom { pattern, target, count } => {
            let f = ctx.load(pattern)?;
            let g = ctx.load(target)?;
            let value = match count.as_str() {
                "hom" => json!(hom(&f, &g)),
                "emb" => json!(emb(&f, &g)),
                "semb" => json!(semb(&f, &g)),
                "tree" => json!(hom_tree(&f, &g)?),
                "hd" => json!(rational_to_f64(hd(&f, &g))),
                "ed" => json!(rational_to_f64(ed_density(&f, &g))),
                "sd" => json!(rational_to_f64(sd(&f, &g))),
                other => return Err(usage(&format!("unknown count '{other}'"))),
            };
            Ok((json!({ "count": count, "value": value }), true))
        }
        Cmd::Sample { g1, g2, kmax, mode, eps, delta, seed } => {
            let g = ctx.load(g1)?;
            let h = ctx.load(g2)?;
            let m = match mode.as_str() {
                "exact" => SampleMode::Exact,
                "mc" => SampleMode::Mc { eps: *eps, delta: *delta, seed: *seed },
                other => return Err(usage(&format!("unknown sample mode '{other}'"))),
            };
            let out = sampling_distance(&g, &h, *kmax, m)?;
            Ok((
                json!({
                    "value": out.value,
                    "tail_bound": out.tail_bound,
                    "certificate": out.certificate,
                }),
                true,
            ))
        }
        Cmd::Features { g1 } => {
            let g = ctx.load(g1)?;
            Ok((serde_json::to_value(features(&g)?).unwrap(), true))
        }
        Cmd::Verify { budget } => {
            let profile = BudgetProfile::parse(budget)
                .ok_or_else(|| usage(&format!("unknown budget '{budget}'")))?;
            let results = run_suite(profile);
            let ok = results.iter().all(|r| r.passed);
            let checks: Vec<Value> = results
                .iter()
                .map(|r| json!({ "name": r.name, "passed": r.passed, "details": r.details }))
                .collect();
            Ok((json!({ "checks": checks, "passed": ok }), ok))
        }
        Cmd::Bench { n, pairs, seed } => {
            let start = std::time::Instant::now();
            let stats = random_cut_experiment(*n, *pairs, *seed)?;
            eprintln!("bench: {} pairs in {:?}", pairs, start.elapsed());
            Ok((serde_json::to_value(stats).unwrap(), true))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let mut ctx = Ctx::new();
    match run(&cli.cmd, &mut ctx) {
        Ok((payload, ok)) => {
            // generators emit the bare graph so output pipes into the
            // other commands
            if matches!(cli.cmd, Cmd::Gen { .. }) {
                println!("{}", serde_json::to_string(&payload).unwrap());
                return ExitCode::SUCCESS;
            }
            let report = json!({
                "command": argv,
                "inputs_digest": format!("{:x}", ctx.digest.finalize()),
                "version": env!("CARGO_PKG_VERSION"),
                "result": payload,
            });
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                GraphsimError::Parse(..)
                | GraphsimError::InvalidArgument(_)
                | GraphsimError::InvalidGraph(_)
                | GraphsimError::OrderMismatch(..) => 2,
                GraphsimError::BudgetExceeded(_) => 3,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}
