use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use relwalk::engine::{MemoryBudget, Sequential};
use relwalk::green::{
    cauchy_sums, f_ratio, fk_coefficients, green, green_derivative, green_metrics, spectral_radius,
    sphere_sums, GreenError, GreenField, GreenFunction, Truncation,
};
use relwalk::measures::{return_sequence, Measure};
use relwalk::parabolic::{ParabolicBudget, ParabolicModel};
use relwalk::{GroupElement, GroupSpec};

fn f2() -> GroupSpec {
    GroupSpec::free_group(2)
}

fn lazy_f2() -> Measure {
    Measure::lazy(&f2(), BigRational::new(BigInt::from(1), BigInt::from(2)))
}

fn el(g: &GroupSpec, s: &str) -> GroupElement {
    g.parse_element(s).unwrap()
}

/// Largest `z` with a real first-passage solution of
/// `F = z/4 + (3z/4) F^2` on the 4-regular tree, by bisection on the
/// discriminant.
fn tree_critical_z() -> f64 {
    let disc = |z: f64| 1.0 - 4.0 * (3.0 * z / 4.0) * (z / 4.0);
    let (mut lo, mut hi) = (0.0, 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if disc(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// First passage to a neighbour on the 4-regular tree.
fn tree_f(z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    (1.0 - (1.0 - 0.75 * z * z).sqrt()) / (1.5 * z)
}

/// `G(e, e | z)` for the simple walk on the 4-regular tree.
fn tree_g(z: f64) -> f64 {
    1.0 / (1.0 - z * tree_f(z))
}

#[test]
fn tree_oracle_is_consistent() {
    let zc = tree_critical_z();
    assert!((1.0 / zc - 0.866025).abs() < 1e-6);
    // first terms of G: 1 + z^2/4 + 7 z^4/64
    let z = 0.01;
    assert!((tree_g(z) - (1.0 + z * z / 4.0 + 7.0 * z.powi(4) / 64.0)).abs() < 1e-11);
}

#[test]
fn green_examples() {
    let g = f2();
    let m = Measure::simple(&g);
    let e = GroupElement::identity();
    let a = el(&g, "1:(1)");
    assert_eq!(green(&m, &e, &e, 0.0, 10).unwrap().value, 1.0);
    assert_eq!(green(&m, &e, &a, 0.0, 10).unwrap().value, 0.0);
    let r = 0.7;
    let v = green(&m, &e, &e, r, 4).unwrap().value;
    let expected = 1.0 + r * r / 4.0 + 7.0 * r.powi(4) / 64.0;
    assert!((v - expected).abs() < 1e-15);
    assert!(matches!(
        green(&m, &e, &e, -0.1, 4),
        Err(GreenError::Invalid(_))
    ));
}

#[test]
fn green_matches_tree_closed_form() {
    let g = f2();
    let m = Measure::simple(&g);
    let e = GroupElement::identity();
    let v = green(&m, &e, &e, 0.3, 20).unwrap();
    assert!((v.value - tree_g(0.3)).abs() < 1e-12);
    let zc = tree_critical_z();
    let killed = GreenField::killed(
        &m,
        0.5 * zc,
        9,
        1e-15,
        10_000,
        MemoryBudget::DEFAULT,
        &Sequential,
    )
    .unwrap();
    assert!((killed.at_identity() - tree_g(0.5 * zc)).abs() < 1e-6);
}

#[test]
fn derivative_examples() {
    let g = f2();
    let m = lazy_f2();
    let e = GroupElement::identity();
    let a = el(&g, "1:(1)");
    let q = return_sequence(&m, 4).unwrap().values;
    assert_eq!(
        green_derivative(&m, &e, &a, 0.0, 1, 6).unwrap().value,
        1.0 / 8.0
    );
    assert_eq!(
        green_derivative(&m, &e, &e, 0.0, 2, 6).unwrap().value,
        2.0 * q[2]
    );
    let mut prev = 0.0;
    for i in 0..10 {
        let v = green_derivative(&m, &e, &e, 0.1 * i as f64, 1, 12)
            .unwrap()
            .value;
        assert!(v >= prev);
        prev = v;
    }
}

#[test]
fn spectral_radius_simple_f2() {
    let m = Measure::simple(&f2());
    let est = spectral_radius(&m, 24).unwrap();
    let oracle = 1.0 / tree_critical_z();
    assert!(
        (est.inverse() - oracle).abs() < 1e-3,
        "{} vs {oracle}",
        est.inverse()
    );
    assert!(est.certified_upper >= est.r_hat());
    assert!(est.diagnostics.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn spectral_radius_on_z_tends_to_one() {
    let z = GroupSpec::free_group(1);
    let m = Measure::simple(&z);
    let est = spectral_radius(&m, 200).unwrap();
    assert!((est.inverse() - 1.0).abs() < 1e-3, "{}", est.inverse());
    assert!(est.certified_upper >= est.r_hat() - 1e-9);
}

#[test]
fn spectral_radius_needs_returns() {
    let g = f2();
    let m = Measure::parse(g, &[("1:(1)", "1")]).unwrap();
    assert!(matches!(
        spectral_radius(&m, 10),
        Err(GreenError::NoReturns(10))
    ));
}

#[test]
fn ratio_and_metrics() {
    let g = f2();
    let m = Measure::simple(&g);
    let zc = tree_critical_z();
    let field = GreenField::killed(
        &m,
        0.5 * zc,
        8,
        1e-15,
        10_000,
        MemoryBudget::DEFAULT,
        &Sequential,
    )
    .unwrap();
    let e = GroupElement::identity();
    let a = el(&g, "1:(1)");
    let ab = el(&g, "1:(1)|2:(1)");
    assert_eq!(f_ratio(&field, &e, &e).unwrap(), 1.0);
    let (d, sym) = green_metrics(&field, &a, &ab).unwrap();
    assert!((sym - 2.0 * d).abs() < 1e-12);
    assert_eq!(green_metrics(&field, &e, &e).unwrap().0, 0.0);
    // a cut point on the tree: equality up to the killing error
    let lhs = f_ratio(&field, &e, &a).unwrap() * f_ratio(&field, &a, &ab).unwrap();
    let rhs = f_ratio(&field, &e, &ab).unwrap();
    assert!(lhs <= rhs + 1e-8, "{lhs} vs {rhs}");
    assert!((lhs - rhs).abs() < 1e-8);
    let far = el(&g, "1:(9)");
    assert!(matches!(
        f_ratio(&field, &e, &far),
        Err(GreenError::Outside(_))
    ));
}

#[test]
fn left_invariance_on_small_ball() {
    let g = f2();
    let m = lazy_f2();
    let field = GreenField::killed(
        &m,
        0.6,
        6,
        1e-15,
        10_000,
        MemoryBudget::DEFAULT,
        &Sequential,
    )
    .unwrap();
    let ball: Vec<GroupElement> = g.enumerate_ball(2, 1).collect();
    for x in &ball {
        for y in &ball {
            let direct = green(&m, x, y, 0.6, 8).unwrap().value;
            let shifted = green(
                &m,
                &GroupElement::identity(),
                &g.multiply(&g.inverse(x).unwrap(), y).unwrap(),
                0.6,
                8,
            )
            .unwrap()
            .value;
            assert_eq!(direct, shifted);
            // symmetric measure: G(x, y) = G(y, x)
            let (gxy, gyx) = (field.green(x, y).unwrap(), field.green(y, x).unwrap());
            assert!((gxy - gyx).abs() < 1e-12 * gxy);
        }
    }
}

#[test]
fn fk_coefficients_match_displayed_expansions() {
    assert_eq!(fk_coefficients(1), vec![1, 1]);
    assert_eq!(fk_coefficients(2), vec![2, 4, 1]);
    assert_eq!(fk_coefficients(3), vec![6, 18, 9, 1]);
    for k in 1..8 {
        let f = fk_coefficients(k);
        let fact: u128 = (1..=k as u128).product();
        assert_eq!(f[0], fact);
        assert_eq!(f[k], 1);
    }
}

#[test]
fn spatial_sum_examples() {
    let m = lazy_f2();
    let r = 0.5;
    let n = 14;
    let sums = cauchy_sums(&m, 3, n, Truncation::new(0, 5)).unwrap();
    // only gamma = e: Cauchy powers of the return polynomial, cut at degree n
    let q = return_sequence(&m, n).unwrap().values;
    let mut power = q.clone();
    for k in 1..=2 {
        let mut next = vec![0.0; n + 1];
        for (a, pa) in power.iter().enumerate() {
            for (b, qb) in q.iter().enumerate().take(n + 1 - a) {
                next[a + b] += pa * qb;
            }
        }
        power = next;
        let expected: f64 = power.iter().rev().fold(0.0, |acc, c| acc * r + c);
        assert!((sums.spatial_sum(k, r) - expected).abs() < 1e-12);
    }
    let gee = sums.green_derivative(0, r);
    assert!((sums.spatial_sum(1, 0.2) - sums.green_derivative(0, 0.2).powi(2)).abs() < 1e-9);
    assert!(sums.spatial_sum(2, r) <= gee.powi(3));
    for k in 0..=3 {
        assert_eq!(sums.spatial_sum(k, 0.0), 1.0);
    }
    let residual = sums.lemma_first_derivative(0.0);
    assert_eq!(
        (residual.lhs, residual.rhs, residual.residual),
        (1.0, 1.0, 0.0)
    );
    assert_eq!(sums.fk_identity(2, 0.0).residual, 0.0);
}

#[test]
fn spatial_sums_grow_with_truncation() {
    let m = lazy_f2();
    let r = 0.5;
    let mut prev = 0.0;
    let mut prev_res = f64::INFINITY;
    for t in [
        Truncation::new(1, 1),
        Truncation::new(2, 2),
        Truncation::new(4, 4),
        Truncation::new(8, 8),
    ] {
        let sums = cauchy_sums(&m, 2, 16, t).unwrap();
        let v = sums.spatial_sum(2, r);
        assert!(v >= prev);
        prev = v;
        let res = sums.lemma_first_derivative(r).residual;
        assert!(res <= prev_res);
        prev_res = res;
    }
}

#[test]
fn lemma_identities_close_on_lazy_walk() {
    let m = lazy_f2();
    let r_hat = spectral_radius(&m, 20).unwrap().r_hat();
    let sums = cauchy_sums(&m, 3, 20, Truncation::new(10, 10)).unwrap();
    assert!(sums.lemma_first_derivative(0.5 * r_hat).residual < 1e-6);
    assert!(sums.fk_identity(2, 0.4 * r_hat).residual < 1e-5);
    assert!(sums.fk_identity(3, 0.4 * r_hat).residual < 1e-5);
}

#[test]
fn sphere_sums_generic_and_factorized_agree() {
    let g = f2();
    let m = lazy_f2();
    let r = 0.5;
    let field =
        GreenField::killed(&m, r, 10, 1e-15, 10_000, MemoryBudget::DEFAULT, &Sequential).unwrap();
    let generic = sphere_sums(&field, 3, 2).unwrap();
    let budget = ParabolicBudget {
        horizon: 200,
        exploration: 10,
        ..ParabolicBudget::default()
    };
    let model = ParabolicModel::new(&m, budget, &Sequential).unwrap();
    let fact = model.factorized(r).unwrap().sphere_sums(3, 2);
    assert!((generic.u[0] - field.at_identity().powi(2)).abs() < 1e-12);
    for (a, b) in generic.u.iter().zip(&fact.u) {
        assert!((a - b).abs() < 1e-8 * a.max(1e-300), "{a} vs {b}");
    }
    let zero =
        GreenField::killed(&m, 0.0, 4, 1e-15, 10, MemoryBudget::DEFAULT, &Sequential).unwrap();
    let t = sphere_sums(&zero, 2, 2).unwrap();
    assert_eq!(t.u, vec![1.0, 0.0, 0.0]);
    let _ = g;
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn green_series_monotone(r1 in 0.0f64..0.9, dr in 0.0f64..0.2, n in 2usize..10) {
        let m = lazy_f2();
        let e = GroupElement::identity();
        let lo = green(&m, &e, &e, r1, n).unwrap().value;
        let hi_r = green(&m, &e, &e, r1 + dr, n).unwrap().value;
        let hi_n = green(&m, &e, &e, r1, n + 2).unwrap().value;
        prop_assert!(hi_r >= lo);
        prop_assert!(hi_n >= lo);
    }
}
