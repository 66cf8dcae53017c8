use std::f64::consts::PI;

use proptest::prelude::*;
use su3::fusion::*;
use su3::linalg::IMat;

fn qint(n: i64, m: f64) -> f64 {
    (n as f64 * PI / m).sin() / (PI / m).sin()
}

/// Fusion coefficients from the Verlinde sum, rounded.
fn verlinde_oracle(k: usize) -> Vec<IMat> {
    let md = build_modular_data(k).unwrap();
    let n = md.alcove.len();
    let s = &md.s;
    (0..n)
        .map(|l| {
            IMat::from_fn(n, n, |r, t| {
                let mut acc = num_complex::Complex64::new(0.0, 0.0);
                for sig in 0..n {
                    acc += s[(r, sig)] * s[(l, sig)] * s[(t, sig)].conj() / s[(0, sig)];
                }
                assert!(acc.im.abs() < 1e-8 && (acc.re - acc.re.round()).abs() < 1e-8);
                acc.re.round() as i64
            })
        })
        .collect()
}

#[test]
fn recursion_agrees_with_verlinde_oracle() {
    for k in 1..=8 {
        let fr = fusion_matrices(k).unwrap();
        assert_eq!(fr.n, verlinde_oracle(k), "level {k}");
    }
}

#[test]
fn level_five_max_multiplicity() {
    // frozen from the Verlinde oracle above
    let fr = fusion_matrices(5).unwrap();
    assert_eq!(fr.max_entry(), 2);
    assert!(fr.max_entry() <= 3);
}

#[test]
fn quantum_dimensions_match_weyl_formula() {
    for k in 1..=10 {
        let md = build_modular_data(k).unwrap();
        let m = (k + 3) as f64;
        for (i, w) in md.alcove.weights().iter().enumerate() {
            let (a, b) = (w.l1 as i64, w.l2 as i64);
            let want = qint(a + 1, m) * qint(b + 1, m) * qint(a + b + 2, m) / qint(2, m);
            let got = md.s[(i, 0)] / md.s[(0, 0)];
            assert!((got.re - want).abs() < 1e-10 && got.im.abs() < 1e-10);
        }
    }
}

#[test]
fn modular_checks_levels_one_to_ten() {
    for k in 1..=10 {
        let md = build_modular_data(k).unwrap();
        let c = md.checks();
        assert!(c.worst() < 1e-9, "level {k}: {c:?}");
        assert!(c.min_vacuum_row > 0.0);
        let fr = fusion_matrices(k).unwrap();
        assert!(verify_verlinde(&md, &fr).unwrap() < 1e-9);
    }
}

#[test]
fn twist_has_finite_order() {
    for k in 1..=6 {
        let md = build_modular_data(k).unwrap();
        let order = 24 * (k + 3);
        for t in &md.t {
            assert!((t.powi(order as i32) - 1.0).norm() < 1e-8);
        }
    }
}

#[test]
fn verlinde_detects_perturbation() {
    let mut md = build_modular_data(5).unwrap();
    let fr = fusion_matrices(5).unwrap();
    md.s[(3, 4)] += 1e-3;
    assert!(verify_verlinde(&md, &fr).unwrap() > 1e-4);
}

#[test]
fn fusion_ring_structure() {
    for k in 1..=6 {
        let fr = fusion_matrices(k).unwrap();
        let n = fr.alcove.len();
        assert_eq!(fr.n[0], IMat::identity(n, n));
        assert_eq!(fr.associativity_defect(), 0);
        for (i, w) in fr.alcove.weights().iter().enumerate() {
            let j = fr.alcove.index_of(conjugate(*w)).unwrap();
            assert_eq!(fr.n[j], fr.n[i].transpose());
            for m in 0..n {
                assert_eq!(&fr.n[i] * &fr.n[m], &fr.n[m] * &fr.n[i]);
            }
        }
    }
}

#[test]
fn level_five_catalog() {
    let cat = invariant_catalog(5).unwrap();
    let names: Vec<&str> = cat.invariants.iter().map(|z| z.name.as_str()).collect();
    assert_eq!(names, ["A", "A*", "D", "D*", "E8", "E8*"]);
    assert!(cat.rejected.is_empty());
    let md = build_modular_data(5).unwrap();
    for z in &cat.invariants {
        let r = verify_invariant(z, &md).unwrap();
        assert!(r.passes(1e-8), "{}: {r:?}", z.name);
    }
    let traces: Vec<i64> = cat.invariants.iter().map(|z| z.trace()).collect();
    assert_eq!(traces, [21, 3, 7, 9, 12, 4]);
}

#[test]
fn e8_exponents() {
    let z = e8_invariant();
    let mut ex: Vec<(usize, usize)> = exponents(&z).into_iter().map(|(w, m)| {
        assert_eq!(m, 1);
        (w.l1, w.l2)
    }).collect();
    ex.sort();
    let mut want = vec![(0, 0), (2, 2), (0, 2), (3, 2), (2, 0), (2, 3), (2, 1), (0, 5), (3, 0), (0, 3), (1, 2), (5, 0)];
    want.sort();
    assert_eq!(ex, want);
}

#[test]
fn conjugate_exponents_are_self_conjugate_weights() {
    let z = ModularInvariant::conjugation(5);
    let ex = exponents(&z);
    assert_eq!(ex.len(), 3);
    assert!(ex.iter().all(|(w, m)| w.l1 == w.l2 && *m == 1));
}

#[test]
fn catalogs_commute_up_to_level_twelve() {
    for k in 1..=12 {
        let md = build_modular_data(k).unwrap();
        let cat = invariant_catalog(k).unwrap();
        assert!(cat.rejected.is_empty(), "level {k}: {:?}", cat.rejected);
        for z in &cat.invariants {
            assert!(verify_invariant(z, &md).unwrap().passes(1e-8));
        }
    }
}

#[test]
fn orbifold_traces() {
    // frozen from direct enumeration of the orbifold formula
    let want = [(2, 2), (3, 6), (4, 5), (5, 7), (6, 12), (7, 12), (8, 15), (9, 21)];
    for (k, t) in want {
        assert_eq!(ModularInvariant::orbifold(k).trace(), t, "level {k}");
    }
}

#[test]
fn random_matrix_is_not_invariant() {
    use rand::{Rng, SeedableRng};
    let md = build_modular_data(5).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let mut z = IMat::from_fn(21, 21, |_, _| rng.gen_range(0..2));
        z[(0, 0)] = 1;
        let r = verify_invariant(&ModularInvariant { name: "random".into(), level: 5, z }, &md).unwrap();
        assert!(r.s_residual.max(r.t_residual) > 1e-3);
    }
}

#[test]
fn shipped_invariants_commute() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/invariants");
    for (file, trace) in [("E12_1.json", 12), ("E24.json", 24)] {
        let z = load_invariant(&dir.join(file)).unwrap();
        let md = build_modular_data(z.level).unwrap();
        let r = verify_invariant(&z, &md).unwrap();
        assert!(r.passes(1e-8), "{file}: {r:?}");
        assert_eq!(z.trace(), trace);
    }
}

proptest! {
    #[test]
    fn rotation_has_order_three(k in 1usize..15, a in 0usize..15, b in 0usize..15) {
        prop_assume!(a + b <= k);
        let w = Weight::new(a, b);
        let r1 = rotation_a(w, k).unwrap();
        prop_assert!(r1.l1 + r1.l2 <= k);
        let r3 = rotation_a(rotation_a(r1, k).unwrap(), k).unwrap();
        prop_assert_eq!(r3, w);
        prop_assert_eq!(conjugate(conjugate(w)), w);
    }
}
