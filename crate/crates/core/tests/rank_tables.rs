use treeconf::closed_form_oracle::{rank_h, rank_h_base, rank_star, rank_star_equal_length, rank_table, GraphKind};
use treeconf::config_complex::{build_complex, chain_complex};
use treeconf::homology::betti;
use treeconf::metric_graph::{MetricGraph, ParamPoint};
use treeconf::param_chambers::graph_arrangement;
use treeconf::rational::{q, qi, Q};

fn pipeline(g: &MetricGraph, r: &Q, l: &Q) -> [usize; 3] {
    let p = ParamPoint::new(r.clone(), l.clone()).unwrap();
    betti(&chain_complex(&build_complex(&g.with_l(l), &p, None)).unwrap()).betti
}

fn sweep(g: &MetricGraph, kind: GraphKind) -> usize {
    let arr = graph_arrangement(g).unwrap();
    for c in &arr.chambers {
        let (r, l) = (&c.sample.r, &c.sample.l);
        let b = pipeline(g, r, l);
        assert_eq!((b[0], b[1], b[2]), {
            let (h0, h1) = rank_table(kind, r, l).unwrap();
            (h0, h1, 0)
        }, "{kind:?} chamber {} at r={r} L={l}", c.id);
    }
    arr.len()
}

#[test]
fn star_tables_k4_to_k7() {
    for k in 4..=7 {
        let g = MetricGraph::star(k, qi(1)).unwrap();
        assert_eq!(sweep(&g, GraphKind::Star(k)), 8);
    }
}

#[test]
fn star_table_spot_values() {
    let g = MetricGraph::star(4, qi(1)).unwrap();
    assert_eq!(pipeline(&g, &q(3, 2), &qi(3)), [8, 0, 0]);
    assert_eq!(pipeline(&g, &q(5, 2), &q(7, 4)), [6, 0, 0]);
    assert_eq!(rank_star(4, &q(5, 2), &q(7, 4)).unwrap(), (6, 0));
}

/// The Y-graph diagram, one entry per region.
fn y_region(r: &Q, l: &Q) -> (usize, usize) {
    let col = usize::from(*r > qi(1)) + usize::from(*r > qi(2));
    let row = usize::from(r > l) + usize::from(*r > l + qi(1));
    [[(1, 1), (4, 0), (2, 0)], [(2, 0), (6, 0), (4, 0)], [(2, 0), (2, 0), (0, 0)]][row][col]
}

#[test]
fn y_graph_table() {
    let g = MetricGraph::star(3, qi(1)).unwrap();
    let arr = graph_arrangement(&g).unwrap();
    assert_eq!(arr.len(), 8);
    let mut seen = Vec::new();
    for c in &arr.chambers {
        let (r, l) = (&c.sample.r, &c.sample.l);
        let b = pipeline(&g, r, l);
        assert_eq!((b[0], b[1]), y_region(r, l), "chamber {}", c.id);
        assert_eq!(b[2], 0);
        seen.push((b[0], b[1]));
    }
    seen.sort();
    assert_eq!(seen, vec![(0, 0), (1, 1), (2, 0), (2, 0), (2, 0), (4, 0), (4, 0), (6, 0)]);
    assert_eq!(sweep(&g, GraphKind::Star(3)), 8);
}

#[test]
fn equal_length_stars() {
    for k in 3..=6 {
        let g = MetricGraph::star(k, qi(1)).unwrap();
        for r in [q(1, 2), q(3, 2), q(5, 2)] {
            let b = pipeline(&g, &r, &qi(1));
            assert_eq!((b[0], b[1]), rank_star_equal_length(k, &r).unwrap(), "k={k} r={r}");
        }
    }
}

#[test]
fn h_tables() {
    for (m, n) in [(3, 3), (4, 3), (3, 4), (4, 4), (5, 3)] {
        let g = MetricGraph::generalized_h(m, n, qi(1)).unwrap();
        assert_eq!(sweep(&g, GraphKind::H(m, n)), 14);
    }
}

#[test]
fn h_band_carries_h1() {
    for (m, n) in [(3, 3), (4, 3), (3, 4), (4, 4), (5, 3)] {
        let g = MetricGraph::generalized_h(m, n, qi(1)).unwrap();
        for (r, l) in [(q(5, 3), qi(1)), (q(7, 2), qi(3))] {
            assert_eq!(pipeline(&g, &r, &l)[1], 2 * (m - 2) * (n - 2), "({m},{n}) r={r} L={l}");
            assert_eq!(rank_h(m, n, &r, &l).unwrap().1, 2 * (m - 2) * (n - 2));
        }
    }
}

#[test]
fn h33_base_table() {
    let g = MetricGraph::generalized_h(3, 3, qi(1)).unwrap();
    let arr = graph_arrangement(&g).unwrap();
    for c in &arr.chambers {
        let (r, l) = (&c.sample.r, &c.sample.l);
        let b = pipeline(&g, r, l);
        assert_eq!((b[0], b[1]), rank_h_base(r, l).unwrap(), "chamber {}", c.id);
    }
}
