use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::json;
use treeconf::closed_form_oracle::{rank_table, GraphKind};
use treeconf::config_complex::{build_complex, chain_complex, ChainComplex, PolyComplex};
use treeconf::decomposer::{decompose, multiplicity_table, verify_decomposition, ClassKind};
use treeconf::homology::betti;
use treeconf::mayer_vietoris::{check_convergence, mv_pages, OrderedCover};
use treeconf::metric_graph::{subdivide_spec, GraphPoint, GraphSpec, MetricGraph, ParamPoint};
use treeconf::param_chambers::{graph_arrangement, ChamberArrangement};
use treeconf::persistence_module::{build_module, build_modules, check_functoriality};
use treeconf::rational::{fmt_q, qi, Q};
use treeconf::{Error, Result};

use crate::{svg, Command, Format, GraphSource, Outcome};

struct Graph {
    g: MetricGraph,
    kind: Option<GraphKind>,
    name: String,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn load(src: &GraphSource, l: &Q) -> Result<Graph> {
    if let Some(k) = src.star {
        return Ok(Graph { g: MetricGraph::star(k, l.clone())?, kind: Some(GraphKind::Star(k)), name: format!("star {k}") });
    }
    if let Some(mn) = &src.h {
        let (m, n) = (mn[0], mn[1]);
        return Ok(Graph { g: MetricGraph::generalized_h(m, n, l.clone())?, kind: Some(GraphKind::H(m, n)), name: format!("h {m} {n}") });
    }
    let path = src.graph.as_ref().expect("clap requires one graph source");
    let g = MetricGraph::from_json(&read(path)?)?.with_l(l);
    Ok(Graph { g, kind: None, name: format!("file {}", path.display()) })
}

fn only(format: Format, allowed: &[Format]) -> Result<()> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("format {format:?} for this subcommand")))
    }
}

fn json_body(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

fn point_name(g: &MetricGraph, p: &GraphPoint) -> String {
    match p {
        GraphPoint::Vertex(v) => g.vertex_name(*v).to_string(),
        GraphPoint::Interior(e, t) => format!("{}@{}", g.edge(*e).id, fmt_q(t)),
    }
}

fn complex_at(g: &MetricGraph, p: &ParamPoint) -> Result<(PolyComplex, ChainComplex)> {
    let cx = build_complex(&g.with_l(&p.l), p, None);
    let cc = chain_complex(&cx)?;
    Ok((cx, cc))
}

pub fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Betti { graph, point, format } => {
            only(*format, &[Format::Text, Format::Json])?;
            let gr = load(graph, &point.l)?;
            let p = ParamPoint::new(point.r.clone(), point.l.clone())?;
            let (_, cc) = complex_at(&gr.g, &p)?;
            let h = betti(&cc);
            let body = if *format == Format::Json {
                json_body(json!({
                    "graph": gr.name, "r": fmt_q(&p.r), "L": fmt_q(&p.l),
                    "betti": h.betti, "torsion": h.torsion, "cells": cc.n,
                }))
            } else {
                let mut s = format!("h0={} h1={} h2={}\n", h.betti[0], h.betti[1], h.betti[2]);
                if !h.torsion_free() {
                    writeln!(s, "torsion h0={:?} h1={:?} h2={:?}", h.torsion[0], h.torsion[1], h.torsion[2]).unwrap();
                }
                s
            };
            Ok(Outcome { body, passed: true })
        }
        Command::Complex { graph, point, incidence, format } => {
            only(*format, &[Format::Text, Format::Json])?;
            let gr = load(graph, &point.l)?;
            let p = ParamPoint::new(point.r.clone(), point.l.clone())?;
            let (cx, cc) = complex_at(&gr.g, &p)?;
            let g = &cx.graph;
            let pts: Vec<String> = cx.points.iter().map(|k| format!("({}, {})", point_name(g, &k.0), point_name(g, &k.1))).collect();
            let chart = |c: (usize, usize)| format!("{}x{}", g.edge(c.0).id, g.edge(c.1).id);
            let euler = cc.n[0] as i64 - cc.n[1] as i64 + cc.n[2] as i64;
            let body = if *format == Format::Json {
                let mut v = json!({ "graph": gr.name, "r": fmt_q(&p.r), "L": fmt_q(&p.l), "cells": cc.n, "euler": euler });
                if *incidence {
                    v["points"] = json!(pts);
                    v["edges"] = json!(cx.edges.iter().map(|e| json!({ "from": e.a, "to": e.b, "chart": chart(e.chart) })).collect::<Vec<_>>());
                    v["faces"] = json!(cx.faces.iter().map(|f| json!({ "chart": chart(f.chart), "boundary": f.boundary })).collect::<Vec<_>>());
                }
                json_body(v)
            } else {
                let mut s = format!("cells v={} e={} f={}\neuler={euler}\n", cc.n[0], cc.n[1], cc.n[2]);
                if *incidence {
                    for (k, name) in pts.iter().enumerate() {
                        writeln!(s, "v{k} {name}").unwrap();
                    }
                    for (k, e) in cx.edges.iter().enumerate() {
                        writeln!(s, "e{k} v{} -> v{} chart {}", e.a, e.b, chart(e.chart)).unwrap();
                    }
                    for (k, f) in cx.faces.iter().enumerate() {
                        let bd: Vec<String> = f.boundary.iter().map(|&(e, c)| format!("{}e{e}", if c < 0 { "-" } else { "+" })).collect();
                        writeln!(s, "f{k} chart {} boundary {}", chart(f.chart), bd.join(" ")).unwrap();
                    }
                }
                s
            };
            Ok(Outcome { body, passed: true })
        }
        Command::Chambers { graph, field, format, .. } => {
            only(*format, &[Format::Text, Format::Json, Format::Svg])?;
            let gr = load(graph, &qi(1))?;
            let arr = graph_arrangement(&gr.g)?;
            if *format == Format::Svg {
                return plot(&gr, &arr, field.prime);
            }
            let hasse = arr.hasse();
            let body = if *format == Format::Json {
                json_body(json!({
                    "graph": gr.name,
                    "lines": arr.lines.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
                    "chambers": arr.chambers.iter().map(|c| c.record()).collect::<Vec<_>>(),
                    "hasse": hasse,
                }))
            } else {
                let mut s = String::new();
                for l in &arr.lines {
                    writeln!(s, "line {l}").unwrap();
                }
                for c in &arr.chambers {
                    writeln!(s, "chamber {} r={} L={}", c.id, fmt_q(&c.sample.r), fmt_q(&c.sample.l)).unwrap();
                }
                for (a, b) in hasse {
                    writeln!(s, "cover {a} -> {b}").unwrap();
                }
                s
            };
            Ok(Outcome { body, passed: true })
        }
        Command::Plot { graph, field, .. } => {
            let gr = load(graph, &qi(1))?;
            let arr = graph_arrangement(&gr.g)?;
            plot(&gr, &arr, field.prime)
        }
        Command::Module { graph, field, degree, format } => {
            only(*format, &[Format::Text, Format::Json])?;
            let gr = load(graph, &qi(1))?;
            let cm = build_modules(&gr.g, &[*degree], field.prime)?;
            let m = &cm.modules[0];
            let rep = check_functoriality(m);
            let maps: Vec<(usize, usize, Vec<Vec<u32>>)> = cm
                .arrangement
                .hasse()
                .into_iter()
                .map(|(a, b)| {
                    let f = m.map_between(a, b).expect("covering pairs are comparable");
                    (a, b, (0..f.rows).map(|i| f.row(i).to_vec()).collect())
                })
                .collect();
            let body = if *format == Format::Json {
                json_body(json!({
                    "graph": gr.name, "degree": degree, "prime": field.prime, "dims": m.dims,
                    "maps": maps.iter().map(|(a, b, f)| json!({ "from": a, "to": b, "matrix": f })).collect::<Vec<_>>(),
                    "functoriality": rep,
                }))
            } else {
                let mut s = format!("module {} degree {degree} prime {}\n", gr.name, field.prime);
                for (c, d) in m.dims.iter().enumerate() {
                    writeln!(s, "dim {c} = {d}").unwrap();
                }
                for (a, b, f) in &maps {
                    writeln!(s, "map {a} -> {b} {f:?}").unwrap();
                }
                writeln!(s, "functoriality {} ({} pairs)", pass(rep.passed()), rep.pairs_checked).unwrap();
                for v in &rep.violations {
                    writeln!(s, "violation {v}").unwrap();
                }
                s
            };
            Ok(Outcome { body, passed: rep.passed() })
        }
        Command::Decompose { graph, field, degree, seed, format } => {
            only(*format, &[Format::Text, Format::Json])?;
            let gr = load(graph, &qi(1))?;
            let m = build_module(&gr.g, *degree, field.prime)?;
            let summands = decompose(&m, *seed)?;
            let table = multiplicity_table(&m, &summands);
            let rep = verify_decomposition(&m, &summands);
            let all_intervals = table.iter().all(|e| e.kind.is_interval());
            let body = if *format == Format::Json {
                json_body(json!({
                    "graph": gr.name, "degree": degree, "seed": seed, "prime": field.prime,
                    "summands": summands.iter().map(|s| json!({ "dims": s.dim_vector(&m), "support": s.support(&m) })).collect::<Vec<_>>(),
                    "classes": table,
                    "interval_decomposable": all_intervals,
                    "verification": rep,
                }))
            } else {
                let mut s = format!("decompose {} degree {degree} seed {seed} prime {}\n", gr.name, field.prime);
                writeln!(s, "summands {} classes {} interval_decomposable {all_intervals}", summands.len(), table.len()).unwrap();
                for (k, e) in table.iter().enumerate() {
                    match &e.kind {
                        ClassKind::Interval { support } => writeln!(s, "class {k} interval support {support:?} multiplicity {}", e.multiplicity),
                        ClassKind::NonInterval { dims } => writeln!(s, "class {k} non-interval dims {} multiplicity {}", dims_text(dims), e.multiplicity),
                    }
                    .unwrap();
                }
                for (k, x) in summands.iter().enumerate() {
                    writeln!(s, "summand {k} dims {} support {:?}", dims_text(&x.dim_vector(&m)), x.support(&m)).unwrap();
                }
                writeln!(s, "verification {}", pass(rep.passed())).unwrap();
                for v in &rep.violations {
                    writeln!(s, "violation {v}").unwrap();
                }
                s
            };
            Ok(Outcome { body, passed: rep.passed() })
        }
        Command::Verify { graph, field, seed, mv, format } => {
            only(*format, &[Format::Text, Format::Json, Format::Csv])?;
            let gr = load(graph, &qi(1))?;
            verify(&gr, field.prime, *seed, *mv, *format)
        }
        Command::Subdivide { graph } => {
            let spec: GraphSpec = serde_json::from_str(&read(graph)?).map_err(|e| Error::Parse(e.to_string()))?;
            let out = subdivide_spec(&spec)?;
            let mut body = serde_json::to_string_pretty(&out).expect("specs serialize");
            body.push('\n');
            Ok(Outcome { body, passed: true })
        }
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn dims_text(dims: &[(usize, usize)]) -> String {
    dims.iter().map(|(c, d)| format!("{c}:{d}")).collect::<Vec<_>>().join(",")
}

fn plot(gr: &Graph, arr: &ChamberArrangement, prime: u32) -> Result<Outcome> {
    let mut labels = Vec::with_capacity(arr.len());
    for c in &arr.chambers {
        let (_, cc) = complex_at(&gr.g, &c.sample)?;
        let b = treeconf::homology::betti_fp(&cc, prime);
        labels.push((b[0], b[1]));
    }
    Ok(Outcome { body: svg::arrangement(&gr.name, arr, &labels), passed: true })
}

#[derive(Serialize)]
struct Row {
    chamber_id: usize,
    sample_r: String,
    sample_l: String,
    h: [usize; 3],
    oracle: (usize, usize),
    matched: bool,
}

#[derive(Serialize)]
struct MvRow {
    chamber_id: usize,
    e1: Vec<[usize; 2]>,
    d1_ranks: Vec<[usize; 2]>,
    e2: Vec<[usize; 2]>,
    d1_squared_zero: bool,
    converges: bool,
}

#[derive(Serialize)]
struct DegreeCheck {
    degree: usize,
    functorial: bool,
    summands: usize,
    classes: usize,
    decomposition_verified: bool,
}

fn verify(gr: &Graph, prime: u32, seed: u64, with_mv: bool, format: Format) -> Result<Outcome> {
    let kind = gr.kind.ok_or_else(|| Error::Unsupported("verify needs a built-in family (--star or --h)".into()))?;
    let cm = build_modules(&gr.g, &[0, 1], prime)?;
    let arr = &cm.arrangement;
    let mut rows = Vec::with_capacity(arr.len());
    for (c, b) in arr.chambers.iter().zip(&cm.betti) {
        let oracle = rank_table(kind, &c.sample.r, &c.sample.l)?;
        rows.push(Row {
            chamber_id: c.id,
            sample_r: fmt_q(&c.sample.r),
            sample_l: fmt_q(&c.sample.l),
            h: *b,
            oracle,
            matched: (b[0], b[1]) == oracle && b[2] == 0,
        });
    }
    let mut degrees = Vec::new();
    for m in &cm.modules {
        let functorial = check_functoriality(m).passed();
        let summands = decompose(m, seed)?;
        let classes = multiplicity_table(m, &summands).len();
        let decomposition_verified = verify_decomposition(m, &summands).passed();
        degrees.push(DegreeCheck { degree: m.degree, functorial, summands: summands.len(), classes, decomposition_verified });
    }
    let mut mv_rows = Vec::new();
    if with_mv {
        for c in &arr.chambers {
            let (cx, cc) = complex_at(&gr.g, &c.sample)?;
            let cover = match kind {
                GraphKind::Star(_) => OrderedCover::star(&cx, &cc)?,
                GraphKind::H(..) => OrderedCover::h_graph(&cx, &cc)?,
            };
            let (e1, e2) = mv_pages(&cc, &cover, prime);
            let converges = check_convergence(&e2, &cm.betti[c.id]).map(|r| r.passed()).unwrap_or(false);
            mv_rows.push(MvRow {
                chamber_id: c.id,
                d1_squared_zero: e1.d1_squares_to_zero(prime),
                e1: e1.dims,
                d1_ranks: e1.ranks,
                e2: e2.dims,
                converges,
            });
        }
    }
    let passed = rows.iter().all(|r| r.matched)
        && degrees.iter().all(|d| d.functorial && d.decomposition_verified)
        && mv_rows.iter().all(|r| r.d1_squared_zero && r.converges);
    let body = match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["chamber_id", "sample_r", "sample_L", "h0", "h1", "h2", "oracle_h0", "oracle_h1", "match"]).expect("in-memory write");
            for r in &rows {
                w.write_record([
                    r.chamber_id.to_string(),
                    r.sample_r.clone(),
                    r.sample_l.clone(),
                    r.h[0].to_string(),
                    r.h[1].to_string(),
                    r.h[2].to_string(),
                    r.oracle.0.to_string(),
                    r.oracle.1.to_string(),
                    pass(r.matched).to_string(),
                ])
                .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
        }
        Format::Json => json_body(json!({
            "graph": gr.name, "seed": seed, "prime": prime,
            "chambers": rows, "modules": degrees, "mayer_vietoris": mv_rows, "passed": passed,
        })),
        _ => {
            let mut s = format!("verify {} seed {seed} prime {prime}\n", gr.name);
            writeln!(s, "chamber sample_r sample_L h0 h1 h2 oracle_h0 oracle_h1 result").unwrap();
            for r in &rows {
                writeln!(
                    s,
                    "{} {} {} {} {} {} {} {} {}",
                    r.chamber_id, r.sample_r, r.sample_l, r.h[0], r.h[1], r.h[2], r.oracle.0, r.oracle.1, pass(r.matched)
                )
                .unwrap();
            }
            for d in &degrees {
                writeln!(
                    s,
                    "PH{} functoriality {} summands {} classes {} decomposition {}",
                    d.degree,
                    pass(d.functorial),
                    d.summands,
                    d.classes,
                    pass(d.decomposition_verified)
                )
                .unwrap();
            }
            for r in &mv_rows {
                writeln!(
                    s,
                    "mv chamber {} E1 {:?} rank d1 {:?} E2 {:?} d1d1=0 {} convergence {}",
                    r.chamber_id,
                    r.e1,
                    r.d1_ranks,
                    r.e2,
                    pass(r.d1_squared_zero),
                    pass(r.converges)
                )
                .unwrap();
            }
            let ok = rows.iter().filter(|r| r.matched).count();
            writeln!(s, "summary {ok}/{} chambers {}", rows.len(), pass(passed)).unwrap();
            s
        }
    };
    Ok(Outcome { body, passed })
}
