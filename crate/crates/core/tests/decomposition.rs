use treeconf::closed_form_oracle::{expected_summands, CatalogKind, GraphKind};
use treeconf::decomposer::{decompose, multiplicity_table, verify_decomposition, ClassKind};
use treeconf::metric_graph::MetricGraph;
use treeconf::persistence_module::{build_modules, ChamberModules};
use treeconf::rational::qi;

fn modules(kind: GraphKind) -> ChamberModules {
    let g = match kind {
        GraphKind::Star(k) => MetricGraph::star(k, qi(1)).unwrap(),
        GraphKind::H(m, n) => MetricGraph::generalized_h(m, n, qi(1)).unwrap(),
    };
    build_modules(&g, &[0, 1], 32003).unwrap()
}

/// Sorted `(class, multiplicity)` of `PH_degree`, after checking the splitting.
fn computed(cm: &ChamberModules, degree: usize, seed: u64) -> Vec<(ClassKind, usize)> {
    let m = &cm.modules[degree];
    let s = decompose(m, seed).unwrap();
    let rep = verify_decomposition(m, &s);
    assert!(rep.passed(), "{:?}", rep.violations);
    let mut t: Vec<_> = multiplicity_table(m, &s).into_iter().map(|e| (e.kind, e.multiplicity)).collect();
    t.sort();
    t
}

fn catalog(kind: CatalogKind, cm: &ChamberModules) -> Vec<(ClassKind, usize)> {
    expected_summands(kind).unwrap().class_table(&cm.arrangement).unwrap()
}

#[test]
fn star_ph0_matches_catalog() {
    for k in [4, 5] {
        let cm = modules(GraphKind::Star(k));
        let got = computed(&cm, 0, 0);
        assert_eq!(got, catalog(CatalogKind::Ph0(GraphKind::Star(k)), &cm), "k={k}");
        assert_eq!(got.iter().filter(|(c, _)| !c.is_interval()).count(), 1);
        let mut mult: Vec<usize> = got.iter().map(|x| x.1).collect();
        mult.sort();
        let mut want = vec![1, 1, 2 * k - 4, k * k - 3 * k + 1];
        want.sort();
        assert_eq!(mult, want);
    }
}

#[test]
fn h_ph0_matches_catalog() {
    for (m, n) in [(3, 3), (4, 3), (4, 4)] {
        let cm = modules(GraphKind::H(m, n));
        let got = computed(&cm, 0, 0);
        assert_eq!(got, catalog(CatalogKind::Ph0(GraphKind::H(m, n)), &cm), "({m},{n})");
        assert!(got.iter().all(|(c, _)| c.is_interval()));
    }
}

#[test]
fn h33_ph0_multiplicities() {
    let cm = modules(GraphKind::H(3, 3));
    let mut mult: Vec<usize> = computed(&cm, 0, 5).iter().map(|x| x.1).collect();
    mult.sort();
    assert_eq!(mult, vec![1, 1, 4, 6]);
}

/// Interval decomposable; the two class sizes of the computed splitting.
#[test]
fn h_ph1_is_interval_decomposable() {
    for (m, n) in [(3, 3), (4, 3), (4, 4)] {
        let cm = modules(GraphKind::H(m, n));
        let got = computed(&cm, 1, 0);
        assert!(got.iter().all(|(c, _)| c.is_interval()), "({m},{n})");
        let mult: Vec<usize> = got.iter().map(|x| x.1).collect();
        assert_eq!(mult, vec![m * (m - 3) + n * (n - 3) + 3, 2 * (m - 2) * (n - 2)]);
    }
}

#[test]
fn y_ph1_is_one_interval() {
    let cm = modules(GraphKind::Star(3));
    let got = computed(&cm, 1, 0);
    assert_eq!(got, catalog(CatalogKind::Ph1(GraphKind::Star(3)), &cm));
    assert_eq!(got, vec![(ClassKind::Interval { support: vec![0] }, 1)]);
}

/// The computed splitting of `PH_0(Y)`: two intervals and two non-interval
/// indecomposables. In the chamber `r <= 1, L < r` the two components are the
/// cyclic classes of ordered leaf pairs, so at most one interval on `{2, 7}` splits off.
#[test]
fn y_ph0_computed_splitting() {
    let cm = modules(GraphKind::Star(3));
    for seed in [0, 1, 7] {
        let got = computed(&cm, 0, seed);
        assert_eq!(
            got,
            vec![
                (ClassKind::Interval { support: vec![2, 3, 5, 7] }, 1),
                (ClassKind::Interval { support: vec![2, 7] }, 1),
                (ClassKind::NonInterval { dims: vec![(0, 1), (1, 1), (2, 2), (3, 2), (4, 1), (5, 1), (7, 1)] }, 1),
                (ClassKind::NonInterval { dims: vec![(1, 1), (2, 2), (3, 1), (4, 1), (7, 1)] }, 1),
            ]
        );
    }
}

/// Star `PH_1`: the closed form leaves the multiplicities open; these are the computed ones.
#[test]
fn star_ph1_splitting() {
    for (k, a, b) in [(4, 4, 1), (5, 6, 5)] {
        let cm = modules(GraphKind::Star(k));
        let got = computed(&cm, 1, 0);
        assert_eq!(got, vec![(ClassKind::Interval { support: vec![0] }, a), (ClassKind::Interval { support: vec![0, 1] }, b)]);
        assert!(!expected_summands(CatalogKind::Ph1(GraphKind::Star(k))).unwrap().is_complete());
    }
}
