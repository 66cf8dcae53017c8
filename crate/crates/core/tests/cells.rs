use rand::{Rng, SeedableRng};
use su3::arith::C64;
use su3::cells::*;
use su3::graphcat::*;

fn graph(name: &str) -> Graph {
    match name {
        "D6" => orbifold_z3(&build_a_graph(6).unwrap(), 3).unwrap(),
        _ => build_a_graph(name[1..].parse().unwrap()).unwrap(),
    }
}

fn solved(name: &str, seed: u64) -> CellSystem {
    solve_cells(&graph(name), SolveOptions { seed, ..Default::default() }).unwrap().cells
}

#[test]
fn triangle_counts() {
    assert_eq!(enumerate_triangles(&graph("A4")).len(), 1);
    assert_eq!(enumerate_triangles(&graph("A5")).len(), 4);
    let path = Graph::from_adjacency("path", Some(4), vec!["a".into(), "b".into()], &su3::linalg::IMat::from_row_slice(2, 2, &[0, 1, 1, 0])).unwrap();
    assert!(enumerate_triangles(&path).is_empty());
}

#[test]
fn a4_single_cell() {
    let cs = solved("A4", 1);
    assert_eq!(cs.w.len(), 1);
    assert!((cs.w[0].norm() - 2f64.powf(0.25)).abs() < 1e-8);
    assert!(verify_type_i(&cs).unwrap().max_residual < 1e-12);
    assert!(verify_type_ii(&cs).unwrap().max_residual < 1e-12);
    let exact = CellSystem::from_values(&graph("A4"), vec![C64::new(2f64.powf(0.25), 0.0)]).unwrap();
    assert!(verify_type_i(&exact).unwrap().max_residual < 1e-12);
    let doubled = CellSystem::from_values(&graph("A4"), vec![C64::new(2.0 * 2f64.powf(0.25), 0.0)]).unwrap();
    let r = verify_type_i(&doubled).unwrap().max_residual;
    assert!((r - 3.0 * 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn solutions_verify_and_conjugates_verify() {
    for name in ["A4", "A5", "A6", "D6"] {
        let cs = solved(name, 3);
        assert!(combined_residual(&cs).unwrap() < 1e-10, "{name}");
        assert!(combined_residual(&cs.conjugate()).unwrap() < 1e-10, "{name} conjugate");
    }
}

#[test]
fn gauge_invariance_of_frames() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for name in ["A5", "D6"] {
        let cs = solved(name, 5);
        let phases: Vec<C64> = (0..cs.graph.edges.len()).map(|_| C64::from_polar(1.0, rng.gen_range(0.0..6.3))).collect();
        let moved = gauge_transform(&cs, &phases).unwrap();
        let a = verify_type_i(&cs).unwrap().max_residual;
        let b = verify_type_i(&moved).unwrap().max_residual;
        assert!((a - b).abs() < 1e-12);
        let a = verify_type_ii(&cs).unwrap().max_residual;
        let b = verify_type_ii(&moved).unwrap().max_residual;
        assert!((a - b).abs() < 1e-12);
        assert!(gauge_equivalent(&cs, &moved, 1e-8));
    }
}

#[test]
fn sign_flip_on_one_edge() {
    let cs = solved("A5", 2);
    let mut phases = vec![C64::new(1.0, 0.0); cs.graph.edges.len()];
    phases[0] = C64::new(-1.0, 0.0);
    let moved = gauge_transform(&cs, &phases).unwrap();
    for (t, (a, b)) in cs.triangles.iter().zip(cs.w.iter().zip(&moved.w)) {
        let c = t.edges.iter().filter(|&&e| e == 0).count() as i32;
        assert!((a * (-1.0f64).powi(c) - b).norm() < 1e-15);
    }
    let same = gauge_transform(&cs, &vec![C64::new(1.0, 0.0); cs.graph.edges.len()]).unwrap();
    assert_eq!(same.w, cs.w);
}

#[test]
fn every_edge_lies_on_a_triangle() {
    for name in ["A5", "A6", "D6"] {
        let cs = solved(name, 4);
        for e in 0..cs.graph.edges.len() {
            let mass: f64 = cs.triangles.iter().zip(&cs.w).filter(|(t, _)| t.edges.contains(&e)).map(|(_, z)| z.norm_sqr()).sum();
            assert!(mass > 1e-6, "{name} edge {e}");
        }
    }
}

#[test]
fn d6_has_conjugate_pair_of_solutions() {
    let sols: Vec<CellSystem> = (0..6).map(|s| solved("D6", 100 + s)).collect();
    let first = &sols[0];
    let conj = first.conjugate();
    assert!(!gauge_equivalent(first, &conj, 1e-6));
    for s in &sols {
        assert!(gauge_equivalent(s, first, 1e-6) || gauge_equivalent(s, &conj, 1e-6));
    }
}

#[test]
fn cell_file_round_trip() {
    let cs = solved("A5", 9);
    let text = serde_json::to_string(&cs.to_file()).unwrap();
    let back = CellSystem::from_file(&cs.graph, &serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back.w, cs.w);
}
