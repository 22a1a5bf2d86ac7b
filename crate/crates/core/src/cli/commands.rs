use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::*;
use crate::cantor::{build_cone_graph, CantorSpace};
use crate::congestion::{
    certify, sampled_bound, BfsPaths, CongestionCertificate, PathSystem, YkRouter,
};
use crate::graph::GraphJson;
use crate::poincare::{h1_sweep, h2_exact, hp_minimize, MinimizerSettings, PoincareResult};
use crate::profiles::{
    cut_exact, cut_heuristic, fit_exponent, fit_log, ols, read_points_csv, sweep_yk,
    write_points_csv, CutResult, Epsilon, SepPoint, UpperSettings, EXACT_CUT_LIMIT,
};
use crate::round_tree::{build_half_plane, build_round_tree, RoundTreeGraph, YkGraph};

type Outputs = Vec<PathBuf>;

fn write_text(path: &Path, text: &str, outputs: &mut Outputs) -> Result<()> {
    std::fs::write(path, text)?;
    outputs.push(path.to_path_buf());
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T, outputs: &mut Outputs) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    write_text(path, &text, outputs)
}

fn write_graph(
    path: &Path,
    g: &GraphJson,
    format: GraphFormat,
    outputs: &mut Outputs,
) -> Result<()> {
    let text = match format {
        GraphFormat::Json => g.to_json_string(),
        GraphFormat::Dot => g.to_dot(),
    };
    write_text(path, &text, outputs)
}

/// Reads graph JSON, or DOT when the file name ends in `.dot`.
pub fn read_graph(path: &Path) -> Result<GraphJson> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "dot") {
        Ok(GraphJson::from_dot(&text)?.0)
    } else {
        GraphJson::parse(&text)
    }
}

fn poincare_out(r: &PoincareResult, a: &PoincareArgs, outputs: &mut Outputs) -> Result<()> {
    println!("value = {}", r.value);
    println!("method = {:?}, certified = {:?}", r.method, r.certified);
    if let Some(out) = &a.out {
        write_json(out, &r.record(), outputs)?;
    }
    if let Some(w) = &a.witness {
        write_text(w, &r.witness_csv(), outputs)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct FitReport {
    slope: f64,
    intercept: f64,
    r_squared: f64,
    sample_count: usize,
    size_range: [usize; 2],
    last3_slope: Option<f64>,
}

#[derive(Serialize)]
struct BallCheck {
    k: usize,
    center: String,
    formula: f64,
    enumerated: f64,
}

#[derive(Serialize)]
struct CantorReport {
    h: usize,
    v: usize,
    depth: usize,
    q_z: f64,
    c: f64,
    c_limit: f64,
    worst_center: String,
    worst_radius: f64,
    ball_checks: Vec<BallCheck>,
    all_match: bool,
}

fn print_certificate(cert: &CongestionCertificate) {
    println!("n = {}", cert.n);
    println!("bound = {}", cert.bound);
    println!("max_edge_load = {}", cert.formula_trace.max_edge_load);
    println!(
        "argmax_pair = {},{}",
        cert.argmax_pair.0, cert.argmax_pair.1
    );
    println!("certified = {}", cert.certified);
}

fn congestion<P: PathSystem + ?Sized>(
    ps: &P,
    a: &CongestionArgs,
    budget: &Budget,
    outputs: &mut Outputs,
) -> Result<()> {
    let cert = match a.sample {
        Some(samples) => sampled_bound(ps, a.p, samples, a.seed)?,
        None => certify(ps, a.p, budget)?,
    };
    print_certificate(&cert);
    if let Some(out) = &a.out {
        write_json(out, &cert.to_json(), outputs)?;
    }
    if let Some(path) = &a.loads {
        let g = ps.graph();
        let mut s = String::from("u,v,m_e\n");
        for (e, m) in cert.m_e.iter().enumerate() {
            let (u, v) = g.edge(e);
            writeln!(s, "{u},{v},{m}").expect("string write");
        }
        write_text(path, &s, outputs)?;
    }
    Ok(())
}

fn cut_by(g: &crate::graph::Graph, eps: Epsilon, method: CutChoice) -> Result<CutResult> {
    match method {
        CutChoice::Exact => cut_exact(g, eps),
        CutChoice::Heuristic => cut_heuristic(g, eps),
        CutChoice::Auto if g.n() <= EXACT_CUT_LIMIT => cut_exact(g, eps),
        CutChoice::Auto => cut_heuristic(g, eps),
    }
}

pub(super) fn dispatch(cmd: &Command, budget: &Budget, outputs: &mut Outputs) -> Result<()> {
    match cmd {
        Command::RtBuild(a) => {
            let rt = build_round_tree(a.h, a.v, a.depth, budget)?;
            println!(
                "vertices = {}, edges = {}",
                rt.graph.n(),
                rt.graph.edge_count()
            );
            write_graph(&a.out, &rt.to_json(), a.format, outputs)
        }
        Command::HalfPlane(a) => {
            let rt = build_half_plane(a.h, a.depth, budget)?;
            println!(
                "vertices = {}, edges = {}",
                rt.graph.n(),
                rt.graph.edge_count()
            );
            write_graph(&a.out, &rt.to_json(), a.format, outputs)
        }
        Command::RtValidate(a) => {
            let rt = RoundTreeGraph::from_json(&read_graph(&a.input)?, a.h, a.v)?;
            let report = rt.validate();
            for c in &report.checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                match &c.witness {
                    Some(w) => println!("axiom {} {status}: {} ({w})", c.axiom, c.description),
                    None => println!("axiom {} {status}: {}", c.axiom, c.description),
                }
            }
            if let Some(out) = &a.out {
                write_json(out, &report, outputs)?;
            }
            if report.all_passed() {
                Ok(())
            } else {
                Err(Error::invalid("round-tree axioms violated"))
            }
        }
        Command::YkBuild(a) => {
            let yk = YkGraph::build(a.h, a.v, a.p, a.k, budget)?;
            println!("vertices = {}, edges = {}", yk.n(), yk.graph.edge_count());
            println!("T = {}, base depth = {}", yk.big_t, yk.base_depth);
            println!("stage sizes = {:?}", yk.stage_sizes());
            write_graph(&a.out, &yk.to_json(), a.format, outputs)
        }
        Command::Hp(a) => {
            let g = read_graph(&a.common.input)?.to_graph()?;
            let r = hp_minimize(&g, a.p, a.restarts, a.seed, &MinimizerSettings::default())?;
            poincare_out(&r, &a.common, outputs)
        }
        Command::H1(a) => {
            let g = read_graph(&a.input)?.to_graph()?;
            poincare_out(&h1_sweep(&g)?, a, outputs)
        }
        Command::H2(a) => {
            let g = read_graph(&a.input)?.to_graph()?;
            poincare_out(&h2_exact(&g)?, a, outputs)
        }
        Command::Congestion(a) => {
            if a.sample == Some(0) {
                return Err(Error::invalid("--sample needs at least one pair"));
            }
            match &a.input {
                Some(path) => {
                    let g = read_graph(path)?.to_graph()?;
                    congestion(&BfsPaths::new(&g), a, budget, outputs)
                }
                None => {
                    let (Some(h), Some(v), Some(k)) = (a.h, a.v, a.k) else {
                        return Err(Error::invalid(
                            "congestion needs --in, or all of --H, --V and --k",
                        ));
                    };
                    let yk = YkGraph::build(h, v, a.build_p.unwrap_or(a.p), k, budget)?;
                    let router = YkRouter::new(&yk);
                    congestion(&router, a, budget, outputs)
                }
            }
        }
        Command::Sweep(a) => {
            let upper = a.upper.then_some(UpperSettings {
                restarts: a.restarts,
                seed: a.seed,
            });
            let points = sweep_yk(a.h, a.v, a.p, a.k.clone(), upper, budget)?;
            let mut buf = Vec::new();
            write_points_csv(&points, &mut buf)?;
            let text = String::from_utf8(buf).expect("CSV is UTF-8");
            print!("{text}");
            write_text(&a.out, &text, outputs)
        }
        Command::Fit(a) => {
            let points = read_points_csv(std::fs::File::open(&a.input)?)?;
            let f = fit_exponent(&points)?;
            println!("slope = {}", f.slope);
            println!("r_squared = {}", f.r_squared);
            if let Some(s) = f.last3_slope {
                println!("last3_slope = {s}");
            }
            let report = FitReport {
                slope: f.slope,
                intercept: f.intercept,
                r_squared: f.r_squared,
                sample_count: f.sample_count,
                size_range: f.size_range,
                last3_slope: f.last3_slope,
            };
            match &a.out {
                Some(out) => write_json(out, &report, outputs),
                None => Ok(()),
            }
        }
        Command::Cut(a) => {
            let eps: Epsilon = a.epsilon.parse()?;
            let g = read_graph(&a.input)?.to_graph()?;
            let cut = cut_by(&g, eps, a.method)?;
            println!("size = {}, optimal = {}", cut.size, cut.optimal);
            match &a.out {
                Some(out) => write_json(out, &cut, outputs),
                None => Ok(()),
            }
        }
        Command::SepScan(a) => {
            let eps: Epsilon = a.epsilon.parse()?;
            let mut rows: Vec<SepPoint> = Vec::new();
            for depth in a.depth.clone() {
                let rt = build_round_tree(a.h, a.v, depth, budget)?;
                let cut = cut_by(&rt.graph, eps, CutChoice::Auto)?;
                rows.push(SepPoint {
                    graph_id: format!("rt-h{}-v{}-d{depth}", a.h, a.v),
                    r: rt.graph.n(),
                    size: cut.size,
                    method: cut.method,
                    optimal: cut.optimal,
                });
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r)?;
            }
            let text = String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
                .expect("UTF-8");
            print!("{text}");
            let rs: Vec<f64> = rows.iter().map(|r| r.r as f64).collect();
            let sizes: Vec<f64> = rows.iter().map(|r| r.size as f64).collect();
            if rows.len() >= 2 && sizes.iter().all(|&s| s > 0.0) {
                let lx: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
                let ly: Vec<f64> = sizes.iter().map(|s| s.ln()).collect();
                if let (Ok(pow), Ok(log)) = (ols(&lx, &ly), fit_log(&rs, &sizes)) {
                    println!("power slope = {}, r_squared = {}", pow.slope, pow.r_squared);
                    println!("log slope = {}, r_squared = {}", log.slope, log.r_squared);
                }
            }
            write_text(&a.out, &text, outputs)
        }
        Command::CantorCheck(a) => {
            let space = CantorSpace::new(a.h, a.v, a.depth)?;
            let ahlfors = space.ahlfors_report()?;
            let mut ball_checks = Vec::new();
            let centers = [0, space.point_count() / 2, space.point_count() - 1];
            for k in 0..=a.depth {
                for &c in &centers {
                    let center = space.point(c);
                    let r = (a.h as f64).powi(-(k as i32));
                    ball_checks.push(BallCheck {
                        k,
                        center: crate::round_tree::word_to_string(&center),
                        formula: space.ball_measure(&center, k)?,
                        enumerated: space.ball_measure_enumerated(&center, r)?,
                    });
                }
            }
            let all_match = ball_checks.iter().all(|b| b.formula == b.enumerated);
            let c_limit = (a.v as f64).max((a.h as f64).powf(ahlfors.q_z));
            println!("q_z = {}", ahlfors.q_z);
            println!("c = {} (limit {c_limit})", ahlfors.c);
            println!("ball measures match enumeration: {all_match}");
            let report = CantorReport {
                h: a.h,
                v: a.v,
                depth: a.depth,
                q_z: ahlfors.q_z,
                c: ahlfors.c,
                c_limit,
                worst_center: ahlfors.worst_center,
                worst_radius: ahlfors.worst_radius,
                ball_checks,
                all_match,
            };
            if let Some(out) = &a.out {
                write_json(out, &report, outputs)?;
            }
            if all_match {
                Ok(())
            } else {
                Err(Error::Degenerate(
                    "ball measure formula disagrees with enumeration".into(),
                ))
            }
        }
        Command::ConeBuild(a) => {
            let space = CantorSpace::new(a.h, a.v, a.depth)?;
            let cone = build_cone_graph(&space, a.depth, budget)?;
            println!(
                "vertices = {}, edges = {}, max degree = {}",
                cone.graph.n(),
                cone.graph.edge_count(),
                cone.graph.max_degree()
            );
            write_graph(&a.out, &cone.to_json(), a.format, outputs)
        }
    }
}
