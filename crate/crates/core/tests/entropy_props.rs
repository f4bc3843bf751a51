use genmaxent::numerics::{invert_increasing, INVERSE_FLOOR};
use genmaxent::{q_log, Boundary, EntropyModel, QLogParams};
use proptest::prelude::*;

fn builtins() -> Vec<EntropyModel> {
    vec![
        EntropyModel::shannon(),
        EntropyModel::tsallis(0.3).unwrap(),
        EntropyModel::tsallis(0.7).unwrap(),
        EntropyModel::tsallis(1.3).unwrap(),
        EntropyModel::tsallis(2.0).unwrap(),
        EntropyModel::tsallis(3.5).unwrap(),
        EntropyModel::tsallis_escort(0.5).unwrap(),
        EntropyModel::tsallis_escort(1.5).unwrap(),
        EntropyModel::weighted_shannon(vec![1.0, 7.0, 0.25]).unwrap(),
        EntropyModel::weighted_shannon_with_multiplicities(vec![3.0, 2.0], vec![4.0, 0.5]).unwrap(),
    ]
}

fn symbols(m: &EntropyModel) -> usize {
    m.alphabet_size().unwrap_or(1)
}

fn grid() -> impl Iterator<Item = f64> {
    (1..=99).map(|k| k as f64 / 100.0)
}

#[test]
fn f_is_minus_derivative_of_h() {
    let step = 1e-6;
    for m in builtins() {
        for a in 0..symbols(&m) {
            for u in grid() {
                let fd = -(m.eval_h(a, u + step).unwrap() - m.eval_h(a, u - step).unwrap())
                    / (2.0 * step);
                let f = m.eval_f(a, u).unwrap();
                assert!(
                    (fd - f).abs() <= 1e-6 * f.abs().max(1.0),
                    "{m:?} a={a} u={u}: {fd} vs {f}"
                );
            }
        }
    }
}

#[test]
fn phi_is_reciprocal_derivative_of_f() {
    let step = 1e-6;
    for m in builtins() {
        for a in 0..symbols(&m) {
            for u in grid() {
                let fd = (m.eval_f(a, u + step).unwrap() - m.eval_f(a, u - step).unwrap())
                    / (2.0 * step);
                let inv_phi = 1.0 / m.eval_phi(a, u).unwrap();
                assert!(
                    (fd - inv_phi).abs() <= 1e-6 * inv_phi.abs().max(1.0),
                    "{m:?} a={a} u={u}: {fd} vs {inv_phi}"
                );
                assert!(m.eval_phi(a, u).unwrap() > 0.0);
            }
        }
    }
}

#[test]
fn inverse_roundtrip_and_bisection_agree() {
    for m in builtins() {
        for a in 0..symbols(&m) {
            for u in grid().chain([1.0]) {
                let y = m.eval_f(a, u).unwrap();
                let back = m.eval_f_inverse(a, y).unwrap().value().unwrap();
                assert!((back - u).abs() < 1e-12, "{m:?} u={u} back={back}");
                let bis =
                    invert_increasing(|v| m.eval_f(a, v).unwrap(), y, INVERSE_FLOOR, 1.0).unwrap();
                assert!((bis - u).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn boundary_values() {
    for m in builtins() {
        for a in 0..symbols(&m) {
            assert_eq!(m.eval_h(a, 0.0).unwrap(), 0.0);
            if !m.is_per_symbol() {
                assert!(m.eval_h(a, 1.0).unwrap().abs() < 1e-15);
            }
        }
    }
    for q in [1.1, 2.0, 4.0] {
        let m = EntropyModel::tsallis(q).unwrap();
        match m.f_at_zero() {
            Boundary::Finite(v) => assert!((v + 1.0 / (q - 1.0)).abs() < 1e-14),
            b => panic!("{b:?}"),
        }
        let below = m.f_at_zero().value() - 1e-9;
        assert_eq!(
            m.eval_f_inverse(0, below).unwrap(),
            genmaxent::Inverse::BelowRange
        );
    }
}

#[test]
fn tsallis_approaches_shannon() {
    let t = EntropyModel::tsallis(1.0 + 1e-6).unwrap();
    let s = EntropyModel::shannon();
    for k in 10..=100 {
        let u = k as f64 / 100.0;
        let d = (t.eval_f(0, u).unwrap() - s.eval_f(0, u).unwrap()).abs();
        assert!(d < 1e-4);
    }
    // inside the band the log branch is used verbatim
    let t = EntropyModel::tsallis(1.0 + 1e-9).unwrap();
    assert_eq!(t.eval_f(0, 0.3).unwrap(), s.eval_f(0, 0.3).unwrap());
    assert_eq!(t.f_at_zero(), Boundary::NegInfinity);
}

proptest! {
    #[test]
    fn f_strictly_increasing(
        idx in 0usize..10,
        u1 in 1e-9f64..1.0,
        frac in 0.0f64..1.0,
    ) {
        let m = &builtins()[idx];
        let u2 = u1 + (1.0 - u1) * frac.max(1e-6);
        prop_assume!(u2 > u1 * (1.0 + 1e-12));
        for a in 0..symbols(m) {
            prop_assert!(m.eval_f(a, u1).unwrap() < m.eval_f(a, u2).unwrap());
        }
    }

    #[test]
    fn q_log_increasing_and_vanishes_at_one(q in 0.05f64..4.0, u in 1e-6f64..10.0, d in 1e-6f64..5.0) {
        let p = QLogParams { q };
        prop_assert!(q_log(p, u).unwrap() < q_log(p, u + d).unwrap());
        prop_assert_eq!(q_log(p, 1.0).unwrap(), 0.0);
    }
}
