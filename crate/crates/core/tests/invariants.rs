//! Property tests: parser totality, graph invariants, descriptor symmetry,
//! and numeric invariants of the preprocessing stack.

use nalgebra::DMatrix;
use proptest::prelude::*;

use gwp_screen::descriptors::featurize;
use gwp_screen::molgraph::parse_smiles;
use gwp_screen::preprocess::{pca_fit, pca_transform, QuantileTransformer};

/// A random acyclic halocarbon-ish molecule, as a tree we can serialize
/// into SMILES with any branch order.
#[derive(Debug, Clone)]
struct TreeAtom {
    symbol: &'static str,
    children: Vec<TreeAtom>,
}

fn leaf() -> impl Strategy<Value = TreeAtom> {
    prop_oneof![
        Just("C"),
        Just("F"),
        Just("Cl"),
        Just("Br"),
        Just("I"),
        Just("O"),
        Just("N"),
    ]
    .prop_map(|symbol| TreeAtom {
        symbol,
        children: Vec::new(),
    })
}

fn molecule() -> impl Strategy<Value = TreeAtom> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            // carbon with 1..=3 substituents
            prop::collection::vec(inner.clone(), 1..=3).prop_map(|children| TreeAtom {
                symbol: "C",
                children,
            }),
            // ether/amine link with a single continuation
            (prop_oneof![Just("O"), Just("N")], inner).prop_map(|(symbol, c)| TreeAtom {
                symbol,
                children: vec![c],
            }),
        ]
    })
}

fn to_smiles(atom: &TreeAtom, reverse: bool) -> String {
    let mut out = String::from(atom.symbol);
    let mut children: Vec<&TreeAtom> = atom.children.iter().collect();
    if reverse {
        children.reverse();
    }
    for (i, c) in children.iter().enumerate() {
        let sub = to_smiles(c, reverse);
        if i + 1 < children.len() {
            out.push('(');
            out.push_str(&sub);
            out.push(')');
        } else {
            out.push_str(&sub);
        }
    }
    out
}

proptest! {
    /// The parser must never panic, whatever bytes it sees.
    #[test]
    fn parser_is_total_on_ascii(s in "[ -~]{0,40}") {
        let _ = parse_smiles(&s);
    }

    #[test]
    fn parser_is_total_on_bytes(bytes in prop::collection::vec(any::<u8>(), 0..40)) {
        let _ = parse_smiles(&String::from_utf8_lossy(&bytes));
    }

    /// Handshake lemma and acyclicity on generated tree molecules.
    #[test]
    fn tree_molecules_parse_with_consistent_topology(m in molecule()) {
        let graph = parse_smiles(&to_smiles(&m, false)).unwrap();
        let degree_sum: usize = (0..graph.atoms.len()).map(|i| graph.neighbors(i).len()).sum();
        prop_assert_eq!(degree_sum, 2 * graph.bonds.len());
        prop_assert_eq!(graph.bonds.len(), graph.atoms.len() - 1);
        prop_assert!(graph.rings.is_empty());
    }

    /// Descriptors are a function of the graph, not of the traversal order
    /// the SMILES happened to use.
    #[test]
    fn descriptors_ignore_branch_order(m in molecule()) {
        let a = parse_smiles(&to_smiles(&m, false)).unwrap();
        let b = parse_smiles(&to_smiles(&m, true)).unwrap();
        prop_assert_eq!(a.graph_hash(), b.graph_hash());
        let da = featurize(&a).unwrap();
        let db = featurize(&b).unwrap();
        for (x, y) in da.values.iter().zip(&db.values) {
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{x} vs {y}");
        }
    }

    /// The two VSA partitions split the same surface area, and the Burden
    /// eigenvalue bounds are ordered.
    #[test]
    fn vsa_partitions_agree_and_bcut_ordered(m in molecule()) {
        let graph = parse_smiles(&to_smiles(&m, false)).unwrap();
        let d = featurize(&graph).unwrap();
        let sum = |prefix: &str| -> f64 {
            gwp_screen::descriptors::descriptor_names()
                .iter()
                .filter(|n| n.starts_with(prefix))
                .map(|n| d.get(n).unwrap())
                .sum()
        };
        let slogp = sum("SlogP_VSA");
        let smr = sum("SMR_VSA");
        prop_assert!((slogp - smr).abs() < 1e-6, "{slogp} vs {smr}");
        prop_assert!(d.get("BCUT2D_MWHI").unwrap() >= d.get("BCUT2D_MWLOW").unwrap());
        prop_assert!(d.get("BCUT2D_CHGHI").unwrap() >= d.get("BCUT2D_CHGLOW").unwrap());
        prop_assert!(d.get("BCUT2D_LOGPHI").unwrap() >= d.get("BCUT2D_LOGPLOW").unwrap());
    }

    /// Quantile transform: range, monotonicity, and round trip on the
    /// training points.
    #[test]
    fn quantile_invariants(raw in prop::collection::btree_set(-1_000_000i64..1_000_000, 10..120)) {
        let values: Vec<f64> = raw.iter().map(|&v| v as f64 / 7.0).collect();
        let qt = QuantileTransformer::fit(&values, values.len().min(1000)).unwrap();
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        let mut prev = -1.0;
        for &v in &sorted {
            let u = qt.transform(v);
            prop_assert!((0.0..=1.0).contains(&u));
            prop_assert!(u >= prev);
            prev = u;
            let back = qt.inverse(u);
            prop_assert!((back - v).abs() <= 1e-9 * v.abs().max(1.0), "{v} -> {u} -> {back}");
        }
    }

    /// PCA on random matrices: orthonormal basis, non-increasing variance
    /// ratios, reconstruction from a full basis.
    #[test]
    fn pca_invariants(rows in prop::collection::vec(prop::collection::vec(-10.0..10.0f64, 5), 12..40)) {
        let n = rows.len();
        let mut m = DMatrix::zeros(n, 5);
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        // center columns; pca_fit expects that
        for j in 0..5 {
            let mean = m.column(j).sum() / n as f64;
            for i in 0..n {
                m[(i, j)] -= mean;
            }
        }
        let model = pca_fit(&m, 1.0).unwrap();
        for a in 0..model.n_retained {
            for b in 0..model.n_retained {
                let dot: f64 = model.components[a]
                    .iter()
                    .zip(&model.components[b])
                    .map(|(x, y)| x * y)
                    .sum();
                let want = if a == b { 1.0 } else { 0.0 };
                prop_assert!((dot - want).abs() < 1e-8);
            }
        }
        for w in model.explained_variance_ratio.windows(2) {
            prop_assert!(w[0] >= w[1] - 1e-12);
        }
        let scores = pca_transform(&model, &m).unwrap();
        // full-threshold fit retains every direction with variance
        for i in 0..n {
            for j in 0..5 {
                let rec: f64 = (0..model.n_retained)
                    .map(|k| scores[(i, k)] * model.components[k][j])
                    .sum();
                prop_assert!((rec - m[(i, j)]).abs() < 1e-6);
            }
        }
    }
}
