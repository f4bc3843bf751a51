mod support;

use std::collections::BTreeMap;

use genmaxent::distribution_for_theta;
use genmaxent::percolation::{
    build_instance, chain_tail_mass, enumerate_1d, enumerate_2d, merge_rotations,
    percolation_as_solver_instance, percolation_entropy, verify_family_identity,
};

#[test]
fn square_enumeration_matches_window_oracle() {
    for max_size in 1..=4 {
        let oracle = support::window_shape_classes(max_size);
        let shapes = enumerate_2d(max_size).unwrap();
        let mine: BTreeMap<_, _> = shapes[1..]
            .iter()
            .map(|s| (s.cells.clone(), (s.s, s.t, s.c)))
            .collect();
        assert_eq!(mine, oracle, "max_size {max_size}");
    }
}

#[test]
fn fixed_polyomino_counts_from_window_oracle() {
    // counts per size are taken from the brute-force oracle, not hard-coded
    let oracle = support::window_shape_classes(4);
    let shapes = enumerate_2d(4).unwrap();
    for s in 1..=4u32 {
        let a = oracle.values().filter(|v| v.0 == s).count();
        let b = shapes.iter().filter(|v| v.s == s).count();
        assert_eq!(a, b);
    }
    assert_eq!(shapes.iter().filter(|v| v.s == 4).count(), 19);
}

#[test]
fn translation_count_law() {
    for shape in enumerate_2d(7).unwrap().iter().skip(1) {
        assert_eq!(shape.c, shape.s as u64);
        assert_eq!(shape.cells.len(), shape.s as usize);
    }
}

#[test]
fn chain_completeness_closed_form_tail() {
    for q in [0.05, 0.3, 0.45] {
        for max_size in [1usize, 5, 20, 40] {
            let inst = build_instance(enumerate_1d(max_size).unwrap(), q).unwrap();
            let tail = chain_tail_mass(q, max_size);
            assert!((inst.tail_mass - tail).abs() < 1e-12);
            assert!(inst.tail_mass >= -1e-12);
        }
    }
    let inst = build_instance(enumerate_1d(50).unwrap(), 0.3).unwrap();
    assert!(chain_tail_mass(0.3, 50) < 1e-20);
    assert!(inst.tail_mass.abs() < 1e-15);
}

#[test]
fn family_identity_is_exact() {
    for (shapes, qs) in [
        (enumerate_1d(40).unwrap(), vec![0.1, 0.3]),
        (enumerate_1d(10).unwrap(), vec![0.3]),
        (enumerate_2d(5).unwrap(), vec![0.1, 0.2]),
    ] {
        for q in qs {
            let inst = build_instance(shapes.clone(), q).unwrap();
            assert!(verify_family_identity(&inst) < 1e-12);
            let merged = build_instance(merge_rotations(&shapes), q).unwrap();
            assert!(verify_family_identity(&merged) < 1e-12);
            let total = |v: &[f64]| v.iter().sum::<f64>();
            assert!((total(&inst.probabilities) - total(&merged.probabilities)).abs() < 1e-14);
        }
    }
}

#[test]
fn chain_entropy_matches_series() {
    let q: f64 = 0.3;
    let inst = build_instance(enumerate_1d(40).unwrap(), q).unwrap();
    let e = percolation_entropy(&inst);
    assert!(e.tail_mass < 1e-15);
    // -Σ p ln p / (s + t) straight from p_s = s q^s (1-q)^2
    let mut series = -(1.0 - q) * (1.0 - q).ln();
    for s in 1..=200 {
        let p = s as f64 * q.powi(s) * (1.0 - q).powi(2);
        if p > 0.0 {
            series -= p * p.ln() / (s as f64 + 2.0);
        }
    }
    assert!((e.value - series).abs() < 1e-10);
}

#[test]
fn truncation_error_bounded_by_tail() {
    for (q, shapes_small, shapes_big) in [
        (0.3, enumerate_1d(8).unwrap(), enumerate_1d(16).unwrap()),
        (0.15, enumerate_2d(3).unwrap(), enumerate_2d(6).unwrap()),
    ] {
        let small = build_instance(shapes_small, q).unwrap();
        let big = build_instance(shapes_big, q).unwrap();
        let a = percolation_entropy(&small);
        let b = percolation_entropy(&big);
        assert!(a.truncated && b.value >= a.value);
        let bound = a.tail_mass * (-q.ln()).max(-(1.0 - q).ln());
        assert!(b.value - a.value <= bound);
    }
}

#[test]
fn solver_reproduces_truncated_distribution() {
    for (shapes, q) in [
        (enumerate_1d(5).unwrap(), 0.25),
        (enumerate_2d(4).unwrap(), 0.15),
        (enumerate_1d(40).unwrap(), 0.1),
    ] {
        let inst = build_instance(shapes, q).unwrap();
        let emb = percolation_as_solver_instance(&inst).unwrap();
        let r = distribution_for_theta(&emb.instance, &emb.theta).unwrap();
        assert!(r.distribution.sup_distance(&emb.target) < 1e-8);
        assert!((r.alpha - inst.alpha).abs() < 1e-8);
    }
}
