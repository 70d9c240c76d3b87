//! Acceptance suite: one PASS/FAIL line per criterion; exits nonzero if any fails.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treeconf::closed_form_oracle::{expected_summands, rank_h, rank_h_base, rank_star, CatalogKind, GraphKind};
use treeconf::config_complex::{build_complex, chain_complex};
use treeconf::decomposer::{decompose, multiplicity_table, verify_decomposition, ClassKind};
use treeconf::homology::betti;
use treeconf::mayer_vietoris::{check_convergence, mv_pages, OrderedCover};
use treeconf::metric_graph::{MetricGraph, ParamPoint};
use treeconf::param_chambers::graph_arrangement;
use treeconf::persistence_module::{build_modules, check_functoriality, ChamberModules};
use treeconf::rational::{fmt_q, q, qi, Affine, Q};

const PRIME: u32 = 32003;
const SEEDS: [u64; 2] = [0, 11];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, ok: &str) -> Outcome {
    if failures.is_empty() {
        Outcome { pass: true, detail: ok.to_string() }
    } else {
        Outcome { pass: false, detail: failures.join("; ") }
    }
}

fn graph(kind: GraphKind, l: Q) -> MetricGraph {
    match kind {
        GraphKind::Star(k) => MetricGraph::star(k, l).unwrap(),
        GraphKind::H(m, n) => MetricGraph::generalized_h(m, n, l).unwrap(),
    }
}

fn name(kind: GraphKind) -> String {
    match kind {
        GraphKind::Star(3) => "Y".into(),
        GraphKind::Star(k) => format!("Star{k}"),
        GraphKind::H(m, n) => format!("H{m}{n}"),
    }
}

fn pipeline(g: &MetricGraph, r: &Q, l: &Q) -> [usize; 3] {
    let p = ParamPoint::new(r.clone(), l.clone()).unwrap();
    betti(&chain_complex(&build_complex(&g.with_l(l), &p, None)).unwrap()).betti
}

/// Mismatches of the pipeline against `table` at every chamber sample.
fn sweep(kind: GraphKind, table: impl Fn(&Q, &Q) -> (usize, usize)) -> Vec<String> {
    let g = graph(kind, qi(1));
    let arr = graph_arrangement(&g).unwrap();
    let mut bad = Vec::new();
    for c in &arr.chambers {
        let (r, l) = (&c.sample.r, &c.sample.l);
        let b = pipeline(&g, r, l);
        let want = table(r, l);
        if (b[0], b[1]) != want || b[2] != 0 {
            bad.push(format!("{} chamber {} ({}, {}): got {:?}, want {:?}", name(kind), c.id, fmt_q(r), fmt_q(l), b, want));
        }
    }
    bad
}

fn criterion1() -> Outcome {
    let mut bad = Vec::new();
    for k in 4..=7 {
        bad.extend(sweep(GraphKind::Star(k), |r, l| rank_star(k, r, l).unwrap()));
    }
    let g = graph(GraphKind::Star(4), qi(1));
    for (r, l, h0) in [(q(3, 2), qi(3), 8), (q(5, 2), q(7, 4), 6)] {
        if pipeline(&g, &r, &l)[0] != h0 {
            bad.push(format!("Star4 at ({}, {}) h0 != {h0}", fmt_q(&r), fmt_q(&l)));
        }
    }
    outcome(bad, "k = 4..7, 8 chambers each")
}

fn criterion2() -> Outcome {
    let table = |r: &Q, l: &Q| {
        let col = usize::from(*r > qi(1)) + usize::from(*r > qi(2));
        let row = usize::from(r > l) + usize::from(*r > l + qi(1));
        [[(1, 1), (4, 0), (2, 0)], [(2, 0), (6, 0), (4, 0)], [(2, 0), (2, 0), (0, 0)]][row][col]
    };
    outcome(sweep(GraphKind::Star(3), table), "8 chambers")
}

fn criterion3() -> Outcome {
    let mut bad = Vec::new();
    for (m, n) in [(3, 3), (4, 3), (3, 4), (4, 4), (5, 3)] {
        bad.extend(sweep(GraphKind::H(m, n), |r, l| rank_h(m, n, r, l).unwrap()));
        let g = graph(GraphKind::H(m, n), qi(1));
        let h1 = pipeline(&g, &q(5, 3), &qi(1))[1];
        if h1 != 2 * (m - 2) * (n - 2) {
            bad.push(format!("H{m}{n} band h1 = {h1}"));
        }
    }
    bad.extend(sweep(GraphKind::H(3, 3), |r, l| rank_h_base(r, l).unwrap()));
    outcome(bad, "5 shapes, 14 chambers each, base table at (3,3)")
}

type Table = Vec<(ClassKind, usize)>;

struct Decomposed {
    cm: ChamberModules,
    /// Per degree, the class table for each seed.
    tables: Vec<Vec<Table>>,
    verified: Vec<String>,
}

fn decomposed(kind: GraphKind) -> Decomposed {
    let cm = build_modules(&graph(kind, qi(1)), &[0, 1], PRIME).unwrap();
    let mut tables = Vec::new();
    let mut verified = Vec::new();
    for m in &cm.modules {
        let mut per_seed = Vec::new();
        for seed in SEEDS {
            let s = decompose(m, seed).unwrap();
            let rep = verify_decomposition(m, &s);
            verified.extend(rep.violations.iter().map(|v| format!("{} PH{}: {v}", name(kind), m.degree)));
            let mut t: Table = multiplicity_table(m, &s).into_iter().map(|e| (e.kind, e.multiplicity)).collect();
            t.sort();
            per_seed.push(t);
        }
        tables.push(per_seed);
    }
    Decomposed { cm, tables, verified }
}

fn show(t: &Table) -> String {
    let parts: Vec<String> = t
        .iter()
        .map(|(k, m)| match k {
            ClassKind::Interval { support } => format!("I{support:?}x{m}"),
            ClassKind::NonInterval { dims } => format!("N{}x{m}", dims.iter().map(|(_, d)| d).sum::<usize>()),
        })
        .collect();
    parts.join(" ")
}

fn criterion4(all: &BTreeMap<String, Decomposed>) -> Outcome {
    let mut bad = Vec::new();
    for kind in [GraphKind::Star(3), GraphKind::Star(4), GraphKind::Star(5), GraphKind::H(3, 3), GraphKind::H(4, 3), GraphKind::H(4, 4)] {
        let d = &all[&name(kind)];
        let want = expected_summands(CatalogKind::Ph0(kind)).unwrap().class_table(&d.cm.arrangement).unwrap();
        let got = &d.tables[0];
        if got.iter().any(|t| t != &got[0]) {
            bad.push(format!("{} PH0 depends on the seed", name(kind)));
        }
        if got[0] != want {
            bad.push(format!("{} PH0: got {}, want {}", name(kind), show(&got[0]), show(&want)));
        }
    }
    outcome(bad, "Y, Star4, Star5, H33, H43, H44 match, seeds 0 and 11")
}

fn non_intervals(t: &Table) -> usize {
    t.iter().filter(|(k, _)| !k.is_interval()).count()
}

fn criterion5(all: &BTreeMap<String, Decomposed>) -> Outcome {
    let mut bad = Vec::new();
    let y = &all["Y"].tables;
    if !(y[1][0].len() == 1 && y[1][0][0].0.is_interval() && y[1][0][0].1 == 1) {
        bad.push(format!("PH1(Y) is {}", show(&y[1][0])));
    }
    for key in ["Y", "Star4", "Star5"] {
        let n = non_intervals(&all[key].tables[0][0]);
        if n != 1 {
            bad.push(format!("PH0({key}) has {n} non-interval classes"));
        }
    }
    for key in ["H33", "H43", "H34", "H44", "H53"] {
        for deg in 0..2 {
            if non_intervals(&all[key].tables[deg][0]) != 0 {
                bad.push(format!("PH{deg}({key}) is not interval decomposable"));
            }
        }
    }
    outcome(bad, "all verdicts hold")
}

fn random_tree(rng: &mut ChaCha8Rng) -> (MetricGraph, ParamPoint) {
    let edges = rng.gen_range(1..=5);
    let l = q(rng.gen_range(1..=16), 4);
    let symbolic = rng.gen_bool(0.5);
    let vertices: Vec<String> = (0..=edges).map(|i| format!("w{i}")).collect();
    let list = (0..edges)
        .map(|i| {
            let len = if symbolic && i == 0 { Affine::l() } else { Affine::constant(q(rng.gen_range(1..=8), 4)) };
            (format!("e{}", i + 1), format!("w{}", rng.gen_range(0..=i)), format!("w{}", i + 1), len)
        })
        .collect();
    let g = MetricGraph::build(vertices, list, l.clone()).unwrap();
    let r = q(rng.gen_range(1..=24), 8);
    (g, ParamPoint::new(r, l).unwrap())
}

fn criterion6(all: &BTreeMap<String, Decomposed>) -> Outcome {
    let mut bad = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..200 {
        let (g, p) = random_tree(&mut rng);
        let cc = match chain_complex(&build_complex(&g, &p, None)) {
            Ok(cc) => cc,
            Err(e) => {
                bad.push(format!("instance {i}: {e}"));
                continue;
            }
        };
        let mut prod: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for (f, col) in cc.d2.iter().enumerate() {
            for &(e, s) in col {
                for &(v, t) in &cc.d1[e] {
                    *prod.entry((v, f)).or_default() += s * t;
                }
            }
        }
        if prod.values().any(|&x| x != 0) {
            bad.push(format!("instance {i}: d1 d2 != 0"));
        }
        let h = betti(&cc);
        let euler = cc.n[0] as i64 - cc.n[1] as i64 + cc.n[2] as i64;
        if euler != h.betti[0] as i64 - h.betti[1] as i64 + h.betti[2] as i64 {
            bad.push(format!("instance {i}: Euler characteristic"));
        }
        if !h.torsion_free() {
            bad.push(format!("instance {i}: torsion {:?}", h.torsion));
        }
    }
    for (key, d) in all {
        for m in &d.cm.modules {
            let rep = check_functoriality(m);
            bad.extend(rep.violations.iter().take(3).map(|v| format!("{key} PH{}: {v}", m.degree)));
        }
        bad.extend(d.verified.iter().cloned());
    }
    outcome(bad, "200 random complexes, functoriality and summand checks on all modules")
}

fn criterion7() -> Outcome {
    let mut bad = Vec::new();
    // (graph, r, L, [(p, q, dim E1)], [(p, q, rank d1 out of E_{p,q})], [(p, q, dim E2)])
    type Case = (GraphKind, Q, Q, Vec<(usize, usize, usize)>, Vec<(usize, usize, usize)>, Vec<(usize, usize, usize)>);
    let mut cases: Vec<Case> = Vec::new();
    for k in [4usize, 5] {
        cases.push((
            GraphKind::Star(k),
            q(1, 2),
            qi(2),
            vec![(0, 0, 5), (1, 0, 2 * k), (0, 1, (k - 1) * (k - 4) + 1)],
            vec![(1, 0, 4)],
            vec![(0, 0, 1), (1, 0, 2 * k - 4)],
        ));
        cases.push((
            GraphKind::Star(k),
            q(1, 2),
            q(1, 4),
            vec![(0, 0, 2 * k - 1), (1, 0, 2 * k - 2)],
            vec![(1, 0, 2 * k - 2)],
            vec![(0, 0, 1), (1, 0, 0)],
        ));
    }
    let h = GraphKind::H(3, 3);
    cases.push((h, q(1, 2), qi(2), vec![(0, 0, 4), (0, 1, 2), (1, 0, 4)], vec![(1, 0, 3)], vec![(0, 0, 1), (1, 0, 1)]));
    cases.push((h, q(1, 2), q(3, 4), vec![(0, 0, 6), (0, 1, 0), (1, 0, 8)], vec![(1, 0, 5)], vec![(0, 0, 1), (1, 0, 3)]));
    cases.push((h, q(1, 2), q(1, 4), vec![(0, 0, 6), (0, 1, 2), (1, 0, 8)], vec![(1, 0, 5)], vec![(0, 0, 1), (1, 0, 3), (0, 1, 2)]));
    for (kind, r, l, e1_want, rank_want, e2_want) in cases {
        let g = graph(kind, l.clone());
        let p = ParamPoint::new(r.clone(), l.clone()).unwrap();
        let cx = build_complex(&g, &p, None);
        let cc = chain_complex(&cx).unwrap();
        let cover = match kind {
            GraphKind::Star(_) => OrderedCover::star(&cx, &cc),
            GraphKind::H(..) => OrderedCover::h_graph(&cx, &cc),
        }
        .unwrap();
        let (e1, e2) = mv_pages(&cc, &cover, PRIME);
        let at = format!("{} at ({}, {})", name(kind), fmt_q(&r), fmt_q(&l));
        for (pp, qq, d) in e1_want {
            if e1.dim(pp, qq) != d {
                bad.push(format!("{at}: E1_{pp}{qq} = {}, want {d}", e1.dim(pp, qq)));
            }
        }
        for (pp, qq, d) in rank_want {
            if e1.rank(pp, qq) != d {
                bad.push(format!("{at}: rank d1 on E1_{pp}{qq} = {}, want {d}", e1.rank(pp, qq)));
            }
        }
        for (pp, qq, d) in e2_want {
            if e2.dim(pp, qq) != d {
                bad.push(format!("{at}: E2_{pp}{qq} = {}, want {d}", e2.dim(pp, qq)));
            }
        }
        if !e1.d1_squares_to_zero(PRIME) {
            bad.push(format!("{at}: d1 d1 != 0"));
        }
        match check_convergence(&e2, &betti(&cc).betti) {
            Ok(rep) if rep.passed() => {}
            Ok(rep) => bad.push(format!("{at}: convergence {:?}", rep.checks)),
            Err(e) => bad.push(format!("{at}: {e}")),
        }
    }
    outcome(bad, "7 covers")
}

fn criterion8(started: Instant) -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_treeconf")).args(["verify", "--star", "4", "--seed", "7"]).output().expect("binary runs")
    };
    let (a, b) = (run(), run());
    let mut bad = Vec::new();
    if a.stdout != b.stdout || a.stderr != b.stderr {
        bad.push("outputs differ".to_string());
    }
    if a.status.code() != Some(0) {
        bad.push(format!("exit code {:?}", a.status.code()));
    }
    let secs = started.elapsed().as_secs();
    if secs >= 600 {
        bad.push(format!("suite took {secs} s"));
    }
    outcome(bad, &format!("byte-identical, {} bytes; suite ran in {secs} s", a.stdout.len()))
}

fn main() {
    let started = Instant::now();
    let mut results = vec![(1, criterion1()), (2, criterion2()), (3, criterion3())];
    let mut all = BTreeMap::new();
    for kind in [
        GraphKind::Star(3),
        GraphKind::Star(4),
        GraphKind::Star(5),
        GraphKind::H(3, 3),
        GraphKind::H(4, 3),
        GraphKind::H(3, 4),
        GraphKind::H(4, 4),
        GraphKind::H(5, 3),
    ] {
        all.insert(name(kind), decomposed(kind));
    }
    results.push((4, criterion4(&all)));
    results.push((5, criterion5(&all)));
    results.push((6, criterion6(&all)));
    results.push((7, criterion7()));
    results.push((8, criterion8(started)));
    let mut failed = 0;
    for (id, o) in &results {
        println!("criterion {id}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {}/{} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
