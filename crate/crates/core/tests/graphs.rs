mod common;

use su3::fusion::*;
use su3::graphcat::*;
use su3::linalg::{is_normal, IMat};

/// Number of star-based paths of each length ending at each vertex, by explicit walk enumeration.
fn walk_endpoints(g: &Graph, len: usize) -> Vec<i64> {
    let mut out = vec![0i64; g.len()];
    fn go(g: &Graph, v: usize, left: usize, out: &mut Vec<i64>) {
        if left == 0 {
            out[v] += 1;
            return;
        }
        for &(s, t) in &g.edges {
            if s == v {
                go(g, t, left - 1, out);
            }
        }
    }
    go(g, g.star, len, &mut out);
    out
}

fn supertransitivity_oracle(g: &Graph, max_k: usize) -> Option<usize> {
    let a = build_a_graph(g.coxeter.unwrap()).unwrap();
    for p in 0..=max_k {
        let x: i64 = walk_endpoints(g, p).iter().map(|c| c * c).sum();
        let y: i64 = walk_endpoints(&a, p).iter().map(|c| c * c).sum();
        if x != y {
            return Some(p - 1);
        }
    }
    None
}

#[test]
fn a_graph_nimrep_is_fusion_ring() {
    for m in 4..=10u32 {
        let g = build_a_graph(m).unwrap();
        let k = m as usize - 3;
        let nim = nimrep_from_graph(&g, k).unwrap();
        assert_eq!(nim.g, fusion_matrices(k).unwrap().n);
    }
}

#[test]
fn orbifold_vertex_count_formula() {
    for m in 4..=15u32 {
        let k = m as usize - 3;
        let alcove = Alcove::new(k);
        let fixed = alcove.weights().iter().filter(|w| rotation_a(**w, k).unwrap() == **w).count();
        let d = orbifold_z3(&build_a_graph(m).unwrap(), k).unwrap();
        assert_eq!(d.len(), (alcove.len() - fixed) / 3 + 3 * fixed, "m = {m}");
        assert!(is_normal(&d.adjacency()));
    }
}

#[test]
fn perron_frobenius_data() {
    let a4 = pf_data(&build_a_graph(4).unwrap()).unwrap();
    assert!((a4.norm - 1.0).abs() < 1e-12);
    assert!(a4.phi.iter().all(|x| (x - 1.0).abs() < 1e-12));
    let a6 = pf_data(&build_a_graph(6).unwrap()).unwrap();
    assert!((a6.norm - 2.0).abs() < 1e-12);
    let d6 = orbifold_z3(&build_a_graph(6).unwrap(), 3).unwrap();
    let pf = pf_data(&d6).unwrap();
    assert!((pf.norm * pf.norm - 4.0).abs() < 1e-12);
    assert!((pf.phi[d6.star] - 1.0).abs() < 1e-15);
    assert!(pf.phi.iter().all(|&x| x >= 1.0 - 1e-12));
}

#[test]
fn catalog_validates() {
    let cat = GraphCatalog::load(&common::data_dir()).unwrap();
    for name in cat.names() {
        let r = cat.validate(name).unwrap();
        assert!(r.validated(1e-8), "{name}: {r:?}");
        assert_eq!(r.vertices as i64, r.exponents, "{name}");
    }
    let names = cat.names();
    for want in ["A4", "A12", "D5", "D12", "A4*", "A12*", "D5*", "D12*", "E8", "E8*", "E12_1", "E24"] {
        assert!(names.contains(&want), "{want} missing");
    }
}

#[test]
fn e8_graph_facts() {
    let cat = GraphCatalog::load(&common::data_dir()).unwrap();
    let e8 = cat.graph("E8").unwrap();
    assert_eq!(e8.len(), 12);
    let nim = nimrep_from_graph(e8, 5).unwrap();
    assert!(nim.g.iter().all(|m| m.iter().all(|&x| x >= 0)));
    assert_eq!(nim.representation_defect(&fusion_matrices(5).unwrap()), 0);
    let md = build_modular_data(5).unwrap();
    let err = verify_nimrep_spectrum(&nim, &ModularInvariant::identity(5), &md).unwrap_err();
    assert!(matches!(err, su3::Error::SizeMismatch { vertices: 12, exponents: 21 }));
}

#[test]
fn a4_file_round_trip() {
    let g = build_a_graph(4).unwrap();
    let text = serde_json::to_string(&g.to_json()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("A4.json");
    std::fs::write(&path, text).unwrap();
    let back = load_graph(&path).unwrap();
    assert_eq!(back, g);
}

#[test]
fn conjugation_on_coloured_graphs() {
    let cat = GraphCatalog::load(&common::data_dir()).unwrap();
    for e in &cat.entries {
        let g = &e.graph;
        if !g.is_coloured() || g.len() > 30 {
            continue;
        }
        let tau = conjugation_permutation(g).unwrap_or_else(|| panic!("{} has no conjugation", g.name));
        let p = permutation_matrix(&tau);
        let adj = g.adjacency();
        assert_eq!(&p * &p, IMat::identity(g.len(), g.len()));
        assert_eq!(&p * &adj * &p, adj.transpose(), "{}", g.name);
        let nim = nimrep_from_graph(g, e.level).unwrap();
        for (i, w) in nim.alcove.weights().iter().enumerate() {
            let j = nim.alcove.index_of(conjugate(*w)).unwrap();
            assert_eq!(nim.g[j], &p * &nim.g[i] * &p);
        }
    }
}

#[test]
fn supertransitivity_values() {
    let cat = GraphCatalog::load(&common::data_dir()).unwrap();
    let a7 = build_a_graph(7).unwrap();
    assert_eq!(supertransitivity(&a7, 12).unwrap(), Supertransitivity::AtLeast(12));
    let d6 = cat.graph("D6").unwrap();
    assert_eq!(supertransitivity_oracle(d6, 8), Some(1));
    assert_eq!(supertransitivity(d6, 8).unwrap(), Supertransitivity::Exact(1));
    let e8 = cat.graph("E8").unwrap();
    let oracle = supertransitivity_oracle(e8, 10).unwrap();
    assert_eq!(oracle, 1);
    assert_eq!(supertransitivity(e8, 10).unwrap(), Supertransitivity::Exact(oracle));
}

#[test]
fn abelian_mckay_graphs() {
    let g = mckay_graph_abelian(3, 3).unwrap();
    assert_eq!(g.len(), 9);
    assert!(is_normal(&g.adjacency()));
    for (m, n) in [(1, 1), (2, 3), (3, 3), (4, 5), (6, 2)] {
        let g = mckay_graph_abelian(m, n).unwrap();
        assert!((pf_data(&g).unwrap().norm - 3.0).abs() < 1e-12);
        assert!(g.adjacency().row_iter().all(|r| r.sum() == 3));
    }
}

#[test]
fn nimrep_rejects_wrong_level() {
    let g = build_a_graph(6).unwrap();
    assert!(nimrep_from_graph(&g, 4).is_err());
}
