use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use hyperideal::bounds::{
    b_n, beta, c10, c9, cos_2pi_over, eta, eta_quadratic, f_xi, h1, h2, h3, h4, mu_n, psi,
    verify_rows, xi_cubic, xi_infinity, xi_iteration, BoundsError, BoundsTable, Table1Row, TABLE1,
};
use hyperideal::tetra::phi_formula;
use proptest::prelude::*;

/// Root of the cubic on `[0.1, 0.2]` by plain bisection.
fn cubic_root() -> f64 {
    let (mut lo, mut hi) = (0.1, 0.2);
    assert!(xi_cubic(lo) * xi_cubic(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if xi_cubic(lo) * xi_cubic(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn f0(delta: f64) -> f64 {
    (-2.0 * delta * delta - 2.0 * delta + 4.0) / (delta * delta + 10.0 * delta + 4.0)
}

#[test]
fn b_sequence() {
    assert_eq!(b_n(9).unwrap(), 2.0);
    let b18 = b_n(18).unwrap();
    assert!((1.2487..=1.2488).contains(&b18));
    assert_abs_diff_eq!(b18, 1.248_729, epsilon = 1e-6);
    assert!(b_n(12).unwrap() <= 1.5744);
    for n in 10..400 {
        assert!(b_n(n + 1).unwrap() < b_n(n).unwrap());
    }
    assert!(b_n(100_000).unwrap() - 1.0 < 1e-8);
    assert_eq!(b_n(0), Err(BoundsError::ValenceBelowNine(0)));
}

#[test]
fn b_is_defined_by_phi() {
    for n in 10..200 {
        let p = phi_formula([b_n(n).unwrap(), 2.0, 2.0, 1.0, 2.0, 2.0]);
        assert_abs_diff_eq!(p, cos_2pi_over(n), epsilon = 1e-12);
    }
}

#[test]
fn xi_fixed_point() {
    let it = xi_iteration(1e-15).unwrap();
    assert!((0.125..=0.13).contains(&it.value));
    assert_abs_diff_eq!(it.value, cubic_root(), epsilon = 1e-8);
    assert_abs_diff_eq!(it.value, 0.12500, epsilon = 5e-5);
    assert_eq!(it.iterates[0], 0.0);
    assert_abs_diff_eq!(it.iterates[1], 0.09433, epsilon = 1e-5);
    assert!(it.iterates.windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(xi_infinity(), it.value);
    assert!(xi_iteration(0.0).is_err());
    assert!(xi_iteration(f64::NAN).is_err());
}

#[test]
fn mu_values() {
    assert_eq!(mu_n(9).unwrap(), xi_infinity());
    assert_abs_diff_eq!(mu_n(12).unwrap(), 0.06574, epsilon = 1e-5);
    assert!(mu_n(17).unwrap() >= 0.0314);
    for n in 9..200 {
        assert!(mu_n(n + 1).unwrap() < mu_n(n).unwrap(), "n = {n}");
    }
    assert!(mu_n(8).is_err());
}

#[test]
fn mu_dominates_row_deltas() {
    for row in TABLE1 {
        let top = row.n_max.unwrap_or(400);
        for n in row.n_min..=top {
            assert!(row.delta <= mu_n(n).unwrap(), "{} at n = {n}", row.label());
        }
    }
}

#[test]
fn eta_examples() {
    assert_eq!(eta(0.05, 1.0).unwrap(), 0.0);
    assert!(eta(0.0, 0.0).is_err());
    assert!(eta(0.0, 1.01).is_err());
    assert!(eta(-0.1, 0.5).is_err());
    assert_abs_diff_eq!(eta(0.0, c9()).unwrap(), 0.09433, epsilon = 1e-5);
}

#[test]
fn eta_monotone_on_grid() {
    for i in 0..=13 {
        let xi = 0.01 * i as f64;
        for j in 0..40 {
            let y = 0.2 + 0.02 * j as f64;
            let e = eta(xi, y).unwrap();
            assert!(eta(xi, y + 0.02).unwrap() < e);
            assert!(eta(xi + 0.01, y).unwrap() > e);
        }
    }
}

#[test]
fn beta_pieces() {
    assert_abs_diff_eq!(beta(c9()).unwrap(), 2.0, epsilon = 1e-12);
    assert_eq!(beta(1.0).unwrap(), 1.0);
    let c = c10();
    let left = beta(c - 1e-12).unwrap();
    let right = beta(c + 1e-12).unwrap();
    assert_abs_diff_eq!(left, right, epsilon = 1e-9);
    assert_abs_diff_eq!(beta(c).unwrap(), b_n(10).unwrap(), epsilon = 1e-12);
    assert!(beta(c9() - 1e-6).is_err());
}

#[test]
fn psi_examples() {
    let c = c9();
    let y = 0.9;
    assert_abs_diff_eq!(psi(0.1, 0.0, y, y, 0.95, c).unwrap(), 1.0, epsilon = 1e-15);
    for k in 0..=13 {
        let delta = 0.01 * k as f64;
        let xi = xi_infinity();
        let want = f_xi(eta(xi, c).unwrap(), delta);
        assert_abs_diff_eq!(psi(xi, delta, c, c, c, c).unwrap(), want, epsilon = 1e-12);
    }
    assert!(psi(0.2, 0.05, y, y, y, y).is_err());
    assert!(psi(0.1, 0.2, y, y, y, y).is_err());
    assert!(psi(0.1, 0.05, y, y, y, 1.0).is_err());
}

#[test]
fn upper_bound_bootstrap() {
    let tau = 2.0 * PI;
    assert!(h1(1.9526, 1.2488, 2.0).unwrap() >= tau);
    assert!(h2(1.9810, 1.9526, 0.0314).unwrap() >= tau);
    assert!(h1(1.9458, 1.2488, 1.9810).unwrap() >= tau);
    assert!(h2(1.9800, 1.9458, 0.0314).unwrap() >= tau);
    assert!(h1(2.1, 1.2, 2.0).is_err());
    assert!(h2(1.9, 1.9, 0.2).is_err());
}

#[test]
fn h_increasing_in_first_argument() {
    for row in TABLE1.iter().filter(|r| r.n_min >= 11) {
        let mut prev: Option<[f64; 4]> = None;
        for k in 0..=50 {
            let x = 1.9 + 0.1 * k as f64 / 50.0;
            let v = [
                h1(x, row.gamma, 1.98).unwrap(),
                h2(x, row.d, row.delta).unwrap(),
                h3(x, row.gamma).unwrap(),
                h4(x, row.gamma, row.d).unwrap(),
            ];
            if let Some(p) = prev {
                for i in 0..4 {
                    assert!(v[i] > p[i], "h{} at {x} for {}", i + 1, row.label());
                }
            }
            prev = Some(v);
        }
    }
}

#[test]
fn non_nine_neighbor_branches() {
    let c = c9();
    assert!(phi_formula([2.0, 1.7, 2.0, 1.0, 2.0, 2.0]) < c);
    assert!(phi_formula([2.0, 1.845, 1.98, 1.027, 2.0, 2.0]) < c);
    assert!(phi_formula([2.0, 1.845, 2.0, 1.027, 2.0, 1.98]) < c);
    assert!(phi_formula([2.0, 1.845, 1.932, 1.01, 2.0, 2.0]) < c);
    assert!(phi_formula([2.0, 1.845, 2.0, 1.01, 2.0, 1.932]) < c);
    assert!(phi_formula([2.0, 1.845, 1.923, 1.0, 2.0, 2.0]) < c);
    assert!(phi_formula([2.0, 1.845, 2.0, 1.0, 2.0, 1.923]) < c);
}

#[test]
fn table_reference_rows() {
    let find = |n: usize| *TABLE1.iter().find(|r| r.contains(n)).unwrap();
    let r18 = find(18);
    assert_eq!(
        (r18.gamma, r18.delta, r18.d, r18.q, r18.p),
        (1.2488, 0.0278, 1.9454, 1.9330, 1.9801)
    );
    let report = verify_rows(&[r18]);
    assert!(report.passed, "{report:#?}");
    let r9 = find(9);
    assert_eq!(r9, find(10));
    let report = verify_rows(&[r9]);
    assert!(report.passed, "{report:#?}");
}

#[test]
fn corrupted_delta_fails() {
    let mut r12: Table1Row = *TABLE1.iter().find(|r| r.contains(12)).unwrap();
    r12.delta = 0.07;
    let report = verify_rows(&[r12]);
    assert!(!report.passed);
    let failed: Vec<_> = report.failures().collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|c| c.worst_margin < 0.0));
    assert!(
        failed.iter().any(|c| c.name.contains("delta")),
        "{failed:#?}"
    );
}

#[test]
fn bounds_table() {
    let t = BoundsTable::new(40).unwrap();
    assert_eq!(t.valences.len(), 32);
    assert_eq!(t.valences[0].b, 2.0);
    assert_eq!(t.row_for(100).unwrap().n_min, 40);
    assert_eq!(t.row_for(10).unwrap().n_min, 9);
    assert!(BoundsTable::new(8).is_err());
}

proptest! {
    #[test]
    fn eta_inverts_f(xi in 0.0f64..=0.13, y in 0.2f64..=0.99) {
        let d = eta(xi, y).unwrap();
        prop_assert!(d > 0.0);
        prop_assert!((f_xi(xi, d) - y).abs() <= 1e-12);
        prop_assert!(eta_quadratic(xi, y, d).abs() <= 1e-12);
    }

    #[test]
    fn f_decreasing_in_delta(xi in 0.0f64..=0.13, a in 0.0f64..0.13, b in 0.0f64..0.13) {
        prop_assume!(a < b);
        prop_assert!(f_xi(xi, b) < f_xi(xi, a));
    }

    #[test]
    fn phi_above_f0(delta in 1e-6f64..=0.13, rest in prop::array::uniform5(1.0f64 + 1e-9..=2.0)) {
        let [x2, x3, x4, x5, x6] = rest;
        let p = phi_formula([1.0 + delta, x2, x3, x4, x5, x6]);
        prop_assert!(p >= f0(delta) - 1e-12, "{p} < {}", f0(delta));
    }

    #[test]
    fn beta_between_one_and_two(y in 0.766f64..=1.0) {
        prop_assume!(y >= c9());
        let b = beta(y).unwrap();
        prop_assert!((1.0..=2.0 + 1e-12).contains(&b));
    }

    #[test]
    fn psi_at_least_nine_branch(
        delta in 0.0f64..=0.13,
        n in prop::array::uniform4(9usize..=40),
    ) {
        let xi = xi_infinity();
        let y = n.map(cos_2pi_over);
        let v = psi(xi, delta, y[0], y[1], y[2], y[3]).unwrap();
        let floor = f_xi(eta(xi, c9()).unwrap(), delta);
        prop_assert!(v >= floor - 1e-9, "{v} < {floor}");
    }
}
