mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use su3::arith::C64;
use su3::graphcat::*;
use su3::linalg::IMat;
use su3::specmeasure::*;

/// ⟨e_*, Δ^m (Δᵀ)^n e_*⟩ by integer matrix powers.
fn walk_moments(g: &Graph, max_m: usize, max_n: usize) -> Vec<Vec<i64>> {
    let a = g.adjacency();
    let n = a.nrows();
    let mut pm = vec![IMat::identity(n, n)];
    for _ in 0..max_m.max(max_n) {
        pm.push(pm.last().unwrap() * &a);
    }
    (0..=max_m).map(|m| (0..=max_n).map(|k| (&pm[m] * pm[k].transpose())[(g.star, g.star)]).collect()).collect()
}

fn matches_walks(t: &MomentTable, w: &[Vec<i64>], tol: f64) -> bool {
    w.iter().enumerate().all(|(m, row)| row.iter().enumerate().all(|(n, &v)| (t.get(m, n) - v as f64).norm() < tol))
}

#[test]
fn a4_atoms_are_cube_roots() {
    let mu = vacuum_measure_discoid(&build_a_graph(4).unwrap()).unwrap();
    assert_eq!(mu.len(), 3);
    for (p, w) in &mu.atoms {
        assert!((p.z().powu(3) - 1.0).norm() < 1e-10);
        assert!((w - 1.0 / 3.0).abs() < 1e-10);
    }
    let t = moments(&mu, 3, 3);
    assert!((t.get(3, 0) - 1.0).norm() < 1e-10);
}

#[test]
fn catalog_vacuum_measures_match_walk_counts() {
    let cat = GraphCatalog::load(&common::data_dir()).unwrap();
    for name in cat.names() {
        let g = cat.graph(name).unwrap();
        let mu = vacuum_measure_discoid(g).unwrap();
        assert!((mu.total_mass() - 1.0).abs() < 1e-12, "{name}");
        let t = moments(&mu, 4, 4);
        assert!(t.hermiticity_defect() < 1e-10, "{name}");
        let out_degree = g.edges.iter().filter(|e| e.0 == g.star).count() as f64;
        assert!((t.get(1, 1).re - out_degree).abs() < 1e-9, "{name}");
        assert!(matches_walks(&t, &walk_moments(g, 4, 4), 1e-8), "{name}");
    }
}

#[test]
fn e8_graph_measure_equals_displayed_measure() {
    let cat = GraphCatalog::load(&common::data_dir()).unwrap();
    let g = cat.graph("E8").unwrap();
    let displayed = e8_paper_measure();
    assert!((displayed.total_mass() - 1.0).abs() < 1e-12);
    let c = compare_measures(&moments(&vacuum_measure_discoid(g).unwrap(), 3, 3), &moments(&displayed, 3, 3), 1e-8).unwrap();
    assert!(c.passes(), "{c:?}");
    assert!(matches_walks(&moments(&displayed, 3, 3), &walk_moments(g, 3, 3), 1e-8));
}

#[test]
fn jacobian_weighted_dm_gives_a_graph_measures() {
    for m in 4..=7u32 {
        let d = uniform_dm_measure(m as usize).unwrap();
        assert_eq!(d.len(), 3 * (m * m) as usize);
        let weighted = jacobian_weighted(&d, 2).unwrap();
        let g = build_a_graph(m).unwrap();
        assert!(matches_walks(&moments(&weighted, 4, 4), &walk_moments(&g, 4, 4), 1e-8), "m = {m}");
    }
    let plain = moments(&uniform_dm_measure(4).unwrap(), 1, 1);
    assert!((plain.get(1, 1).re - 3.0).abs() < 1e-10);
}

#[test]
fn lift_preserves_moments() {
    let cat = GraphCatalog::load(&common::data_dir()).unwrap();
    for name in ["A4", "A5", "A7", "D6", "E8"] {
        let mu = vacuum_measure_discoid(cat.graph(name).unwrap()).unwrap();
        let lifted = lift_to_torus(&mu).unwrap();
        assert!((lifted.total_mass() - 1.0).abs() < 1e-12);
        let c = compare_measures(&moments(&mu, 4, 4), &moments(&lifted, 4, 4), 1e-10).unwrap();
        assert!(c.passes(), "{name} {c:?}");
    }
}

/// Distinct ordered root pairs of the cubic, from companion-matrix eigenvalues.
fn lifted_point_count(mu: &DiscreteMeasure) -> usize {
    let mut pts: Vec<(C64, C64)> = Vec::new();
    for (p, _) in &mu.atoms {
        let z = p.z();
        let comp = su3::linalg::CMat::from_row_slice(3, 3, &[z, -z.conj(), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let r = comp.eigenvalues().unwrap();
        for k in 0..3 {
            for l in 0..3 {
                let q = (r[k], r[l].conj());
                if k != l && !pts.iter().any(|x| (x.0 - q.0).norm() < 1e-6 && (x.1 - q.1).norm() < 1e-6) {
                    pts.push(q);
                }
            }
        }
    }
    pts.len()
}

#[test]
fn a4_lift_atom_count() {
    let mu = vacuum_measure_discoid(&build_a_graph(4).unwrap()).unwrap();
    let lifted = lift_to_torus(&mu).unwrap();
    assert_eq!(lifted.len(), lifted_point_count(&mu));
    assert_eq!(lifted.len(), 18);
    let cusp = DiscreteMeasure { domain: Domain::Discoid, atoms: vec![(Point::Discoid(C64::new(3.0, 0.0)), 1.0)] };
    let l = lift_to_torus(&cusp).unwrap();
    assert_eq!(l.len(), 1);
}

#[test]
fn cubic_inverse_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..1000 {
        let w1 = C64::from_polar(1.0, rng.gen_range(0.0..2.0 * std::f64::consts::PI));
        let w2 = C64::from_polar(1.0, rng.gen_range(0.0..2.0 * std::f64::consts::PI));
        let z = phi_map(w1, w2);
        let r = cubic_inverse(z).unwrap();
        let sum: C64 = r.iter().sum();
        assert!((sum - z).norm() < 1e-8 && (r[0] * r[1] * r[2] - 1.0).norm() < 1e-8);
        let best = r.iter().map(|w| (w - w1).norm()).fold(f64::INFINITY, f64::min);
        assert!(best < 1e-10, "{z} {best:e}");
    }
}

#[test]
fn subgroup_moments_match_mckay_graph() {
    let cd = load_class_data(&common::data_dir().join("classes/Z3xZ3.json")).unwrap();
    let t = subgroup_moments(&cd, 4, 4).unwrap();
    assert!((t.get(1, 1).re - 3.0).abs() < 1e-10);
    let g = mckay_graph_abelian(3, 3).unwrap();
    let c = compare_measures(&t, &moments(&vacuum_measure_discoid(&g).unwrap(), 4, 4), 1e-10).unwrap();
    assert!(c.passes(), "{c:?}");
    assert!(matches_walks(&t, &walk_moments(&g, 4, 4), 1e-10));
    let triv = subgroup_moments(&load_class_data(&common::data_dir().join("classes/trivial.json")).unwrap(), 4, 4).unwrap();
    for m in 0..=4 {
        for n in 0..=4 {
            assert!((triv.get(m, n).re - 3f64.powi((m + n) as i32)).abs() < 1e-9);
        }
    }
}

#[test]
fn bad_class_data_rejected() {
    let cd = ClassData { group: "x".into(), order: 2, classes: vec![ClassJson { size: 1, chi_re: 3.0, chi_im: 0.0 }] };
    assert!(subgroup_moments(&cd, 1, 1).is_err());
}

#[test]
fn continuous_moment_oracles() {
    let opts = QuadOptions::default();
    for k in 1..=3u32 {
        let oracle = walk_moments(&build_a_graph(k + 6).unwrap(), k as usize, k as usize)[k as usize][k as usize] as f64;
        let v = continuous_moments(ContinuousKind::Su3, k, k, opts).unwrap().value;
        assert!((v.re - oracle).abs() < 1e-4, "SU3 k={k}: {v} vs {oracle}");
    }
    assert_eq!(walk_moments(&build_a_graph(9).unwrap(), 3, 3)[3][3], 6);
    let n = 2 * 2 + 1;
    let torus_oracle = walk_moments(&mckay_graph_abelian(n, n).unwrap(), 2, 2);
    for k in 1..=2u32 {
        let v = continuous_moments(ContinuousKind::Torus, k, k, opts).unwrap().value;
        assert!((v.re - torus_oracle[k as usize][k as usize] as f64).abs() < 1e-6);
    }
    assert!((continuous_moments(ContinuousKind::Torus, 1, 1, opts).unwrap().value.re - 3.0).abs() < 1e-6);
    for (k, c) in [(1u32, 1.0), (2, 2.0), (3, 5.0), (4, 14.0)] {
        let v = continuous_moments(ContinuousKind::Semicircle, k, k, opts).unwrap().value;
        assert!((v.re - c).abs() < 1e-9);
    }
    let mean = continuous_moments(ContinuousKind::So3Semicircle, 1, 0, opts).unwrap().value;
    assert!((mean.re - 1.0).abs() < 1e-9);
    let mass = continuous_moments(ContinuousKind::Su3, 0, 0, opts).unwrap().value;
    assert!((mass.re - 1.0).abs() < 1e-9);
}

proptest! {
    #[test]
    fn vieta_holds_inside_discoid(t1 in 0.0..6.3f64, t2 in 0.0..6.3f64) {
        let z = phi_map(C64::from_polar(1.0, t1), C64::from_polar(1.0, t2));
        let r = cubic_inverse(z).unwrap();
        for w in r {
            prop_assert!((w.norm() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn moments_are_hermitian(ws in prop::collection::vec((0.0..6.3f64, 0.0..6.3f64, 0.01..1.0f64), 1..8)) {
        let total: f64 = ws.iter().map(|w| w.2).sum();
        let atoms = ws.iter().map(|&(a, b, w)| (Point::Torus(C64::from_polar(1.0, a), C64::from_polar(1.0, b)), w / total)).collect();
        let t = moments(&DiscreteMeasure { domain: Domain::Torus, atoms }, 4, 4);
        prop_assert!((t.get(0, 0).re - 1.0).abs() < 1e-12);
        prop_assert!(t.hermiticity_defect() < 1e-9);
    }
}
