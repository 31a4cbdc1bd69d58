use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use relwalk::engine::{MemoryBudget, Sequential};
use relwalk::green::{spectral_radius, GreenField, GreenFunction};
use relwalk::measures::{return_sequence, Measure};
use relwalk::parabolic::{
    classify, equadiff_ratio, kernel_coefficients, ClassifyBudget, MomentsVerdict, ParabolicBudget,
    ParabolicError, ParabolicModel, Verdict,
};
use relwalk::{FactorKind, GroupElement, GroupSpec};

fn f2() -> GroupSpec {
    GroupSpec::free_group(2)
}

fn lazy_f2() -> Measure {
    Measure::lazy(&f2(), BigRational::new(BigInt::from(1), BigInt::from(2)))
}

fn small_budget() -> ParabolicBudget {
    ParabolicBudget {
        horizon: 200,
        exploration: 10,
        ..ParabolicBudget::default()
    }
}

const R_TREE: f64 = 1.154_700_538_379_251_5; // 2 / sqrt(3)

/// First passage to a neighbour on the 4-regular tree.
fn tree_f(z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    (1.0 - (1.0 - 0.75 * z * z).sqrt()) / (1.5 * z)
}

fn tree_g(z: f64) -> f64 {
    1.0 / (1.0 - z * tree_f(z))
}

/// First-return counts to `<a>` for the simple walk on `F_2`, by listing
/// every path of length `<= n_max`: `(t, exponent of a) -> paths`.
fn first_return_counts(n_max: u32) -> BTreeMap<(u32, i64), u64> {
    let letters = [1i8, -1, 2, -2];
    let mut out = BTreeMap::new();
    for t in 1..=n_max {
        for code in 0..4u64.pow(t) {
            let mut c = code;
            let mut stack: Vec<i8> = Vec::new();
            let mut hit = None;
            for step in 1..=t {
                let l = letters[(c % 4) as usize];
                c /= 4;
                if stack.last() == Some(&-l) {
                    stack.pop();
                } else {
                    stack.push(l);
                }
                if stack.iter().all(|x| x.abs() == 1) {
                    hit = Some(step);
                    break;
                }
            }
            if hit == Some(t) {
                let exp: i64 = stack.iter().map(|&x| x as i64).sum();
                *out.entry((t, exp)).or_insert(0) += 1;
            }
        }
    }
    out
}

#[test]
fn kernel_matches_path_enumeration() {
    let m = Measure::simple(&f2());
    let c = kernel_coefficients(&m, 1, 8, 8, MemoryBudget::DEFAULT, &Sequential).unwrap();
    assert!(c.exact);
    let oracle = first_return_counts(8);
    let mut seen = 0;
    for (p, row) in c.points.iter().zip(&c.coeffs) {
        for (t, &v) in row.iter().enumerate().skip(1) {
            let count = oracle.get(&(t as u32, p[0])).copied().unwrap_or(0);
            assert_eq!(v, count as f64 / 4f64.powi(t as i32), "t = {t}, h = {p:?}");
            if count > 0 {
                seen += 1;
            }
        }
    }
    assert_eq!(seen, oracle.len());
}

#[test]
fn kernel_examples() {
    let m = Measure::simple(&f2());
    let c2 = kernel_coefficients(&m, 1, 2, 4, MemoryBudget::DEFAULT, &Sequential).unwrap();
    let r = 0.9;
    let k = c2.at(r);
    assert_eq!(k.weight(&[1]), r / 4.0);
    assert_eq!(k.weight(&[-1]), r / 4.0);
    assert!((k.weight(&[0]) - r * r / 8.0).abs() < 1e-15);
    assert!(c2.at(0.0).is_zero());
    let long = kernel_coefficients(&m, 1, 40, 10, MemoryBudget::DEFAULT, &Sequential)
        .unwrap()
        .at(r);
    assert_eq!(long.weight(&[1]), r / 4.0);
}

#[test]
fn kernel_matches_tree_closed_form() {
    let m = Measure::simple(&f2());
    let model = ParabolicModel::new(
        &m,
        ParabolicBudget {
            exploration: 12,
            ..small_budget()
        },
        &Sequential,
    )
    .unwrap();
    for frac in [0.3, 0.5, 0.8] {
        let r = frac * R_TREE;
        let k = model.kernel(1, r);
        assert!(
            (k.weight(&[0]) - 0.5 * r * tree_f(r)).abs() < 1e-6,
            "{frac}"
        );
        let g = model.factor_green(1, r, 1.0);
        assert!((g.at_identity() - tree_g(r)).abs() < 1e-6, "{frac}");
    }
}

#[test]
fn kernel_monotone_and_symmetric() {
    let m = lazy_f2();
    let r = 0.9;
    let mut prev: Option<relwalk::parabolic::ReturnKernel> = None;
    for (h, p) in [(4, 3), (8, 5), (16, 7), (32, 8)] {
        let k = kernel_coefficients(&m, 2, h, p, MemoryBudget::DEFAULT, &Sequential)
            .unwrap()
            .at(r);
        for (x, w) in &k.entries {
            assert!(*w >= 0.0);
            assert!((k.entry(&[0], x) - k.entry(x, &[0])).abs() < 1e-15);
        }
        if let Some(old) = &prev {
            for (x, w) in &old.entries {
                assert!(k.weight(x) >= *w);
            }
        }
        prev = Some(k);
    }
}

#[test]
fn parabolic_green_examples() {
    let m = lazy_f2();
    let model = ParabolicModel::new(&m, small_budget(), &Sequential).unwrap();
    assert_eq!(model.parabolic_green(1, 0.7, 0.0, 50).value, 1.0);
    assert_eq!(model.parabolic_green(1, 0.0, 0.9, 50).value, 1.0);
    let lo = model.parabolic_green(1, 0.7, 0.5, 50).value;
    let hi = model.parabolic_green(1, 0.7, 0.9, 50).value;
    assert!(hi >= lo);
    let r = 0.7;
    let series = model.parabolic_green(1, r, 1.0, 400).value;
    assert!((series - model.factor_green(1, r, 1.0).at_identity()).abs() < 1e-10);
}

#[test]
fn same_green_on_both_factors() {
    let m = Measure::simple(&f2());
    let r_hat = spectral_radius(&m, 20).unwrap().r_hat();
    let model = ParabolicModel::new(
        &m,
        ParabolicBudget {
            exploration: 11,
            ..small_budget()
        },
        &Sequential,
    )
    .unwrap();
    for frac in [0.0, 0.3, 0.5] {
        let r = frac * r_hat;
        let field =
            GreenField::killed(&m, r, 11, 1e-15, 20_000, MemoryBudget::DEFAULT, &Sequential)
                .unwrap();
        for k in 1..=2 {
            let residual =
                (model.factor_green(k, r, 1.0).at_identity() - field.at_identity()).abs();
            assert!(residual < 1e-6, "k = {k}, r = {r}: {residual}");
        }
    }
}

#[test]
fn derivatives_match_closed_form() {
    let m = Measure::simple(&f2());
    let model = ParabolicModel::new(
        &m,
        ParabolicBudget {
            exploration: 12,
            ..small_budget()
        },
        &Sequential,
    )
    .unwrap();
    let r = 0.5 * R_TREE;
    let h = 1e-4;
    let d1 = (tree_g(r + h) - tree_g(r - h)) / (2.0 * h);
    let d2 = (tree_g(r + h) - 2.0 * tree_g(r) + tree_g(r - h)) / (h * h);
    let d = model.derivatives(1, r);
    assert!((d.g - tree_g(r)).abs() < 1e-7);
    assert!((d.g1 - d1).abs() < 1e-6, "{} vs {d1}", d.g1);
    assert!((d.g2 - d2).abs() < 1e-4, "{} vs {d2}", d.g2);
    let at0 = model.derivatives(1, 0.0);
    assert_eq!((at0.g, at0.g1), (1.0, 0.0));
    let q = return_sequence(&m, 2).unwrap().values;
    assert!((at0.g2 - 2.0 * q[2]).abs() < 1e-15);
}

#[test]
fn parabolic_radius_examples() {
    let m = Measure::simple(&f2());
    let r_hat = spectral_radius(&m, 24).unwrap().r_hat();
    let model = ParabolicModel::new(&m, small_budget(), &Sequential).unwrap();
    assert_eq!(model.radius(1, 0.0, 100).point, f64::INFINITY);
    let at = model.radius(1, r_hat, 300);
    assert!(at.point >= 1.0 - 1e-3);
    assert!(at.point > 1.05, "{}", at.point);
    // symmetric kernel on Z: the radius is the inverse mass
    assert!((at.point - at.mass_bound).abs() < 1e-3 * at.mass_bound);
}

#[test]
fn green_moment_examples() {
    let m = lazy_f2();
    let model = ParabolicModel::new(&m, small_budget(), &Sequential).unwrap();
    let zero = model.factor_green(1, 0.0, 1.0);
    assert_eq!(model.green_moment(&zero, 8), 1.0);
    let fg = model.factor_green(1, 0.8, 1.0);
    assert!((model.green_moment(&fg, 0) - fg.at_identity().powi(3)).abs() < 1e-12);
    assert!(model.green_moment(&fg, 4) >= model.green_moment(&fg, 2));
}

#[test]
fn factorized_matches_killed_field() {
    let g = f2();
    let m = lazy_f2();
    let model = ParabolicModel::new(&m, small_budget(), &Sequential).unwrap();
    let r = 0.6;
    let fact = model.factorized(r).unwrap();
    assert!(fact.consistency() < 1e-10);
    let field =
        GreenField::killed(&m, r, 10, 1e-15, 10_000, MemoryBudget::DEFAULT, &Sequential).unwrap();
    for x in g.enumerate_ball(3, 2) {
        let a = fact.from_identity(&x).unwrap();
        let b = field.from_identity(&x).unwrap();
        assert!((a - b).abs() < 1e-6 * a, "{x}: {a} vs {b}");
    }
    let not_adapted =
        Measure::parse(g, &[("1:(1)|2:(1)", "1/2"), ("2:(-1)|1:(-1)", "1/2")]).unwrap();
    assert!(
        ParabolicModel::new(&not_adapted, small_budget(), &Sequential)
            .unwrap()
            .factorized(r)
            .is_none()
    );
}

#[test]
fn finite_factor_grid() {
    let g = GroupSpec::from_kinds(&[
        FactorKind::FreeAbelian { rank: 2 },
        FactorKind::FiniteCyclic { order: 3 },
    ])
    .unwrap();
    let m = Measure::simple(&g);
    let model = ParabolicModel::new(
        &m,
        ParabolicBudget {
            exploration: 6,
            ..small_budget()
        },
        &Sequential,
    )
    .unwrap();
    let r = 0.5;
    let field =
        GreenField::killed(&m, r, 8, 1e-15, 10_000, MemoryBudget::DEFAULT, &Sequential).unwrap();
    for k in 1..=2 {
        let v = model.factor_green(k, r, 1.0).at_identity();
        assert!(
            (v - field.at_identity()).abs() < 1e-6,
            "k = {k}: {v} vs {}",
            field.at_identity()
        );
    }
    let fact = model.factorized(r).unwrap();
    let x = g.parse_element("2:(2)|1:(1,-1)").unwrap();
    let (a, b) = (
        fact.from_identity(&x).unwrap(),
        field.from_identity(&x).unwrap(),
    );
    assert!((a - b).abs() < 1e-6 * a);
}

#[test]
fn classify_rejects_inadmissible() {
    let m = Measure::parse(f2(), &[("1:(1)", "1/2"), ("1:(-1)", "1/2")]).unwrap();
    let q = return_sequence(&m.to_float(), 10).unwrap().values;
    let err = classify(&m, &q, 1.0, &ClassifyBudget::default(), &Sequential).unwrap_err();
    assert!(matches!(err, ParabolicError::Inadmissible(_)));
}

#[test]
fn classify_lazy_f2() {
    let m = lazy_f2();
    let q = return_sequence(&m.to_float(), 24).unwrap().values;
    let r_hat = spectral_radius(&m, 24).unwrap().r_hat();
    let budget = ClassifyBudget {
        parabolic: small_budget(),
        ..ClassifyBudget::default()
    };
    let c = classify(&m, &q, r_hat, &budget, &Sequential).unwrap();
    assert_eq!(c.divergent, Verdict::Yes);
    for f in &c.factors {
        assert_eq!(f.degenerate, Verdict::No);
        assert_eq!(f.moments.verdict, MomentsVerdict::Finite);
    }
    assert_eq!(c.positive_recurrent, Verdict::Yes);
    assert!(c.warnings.is_empty(), "{:?}", c.warnings);
}

#[test]
fn equadiff_row_at_zero() {
    let m = lazy_f2();
    let model = ParabolicModel::new(&m, small_budget(), &Sequential).unwrap();
    let q = return_sequence(&m, 2).unwrap().values;
    let table = equadiff_ratio(&model, &[0.0, 0.3, 0.6]);
    let row = table.rows[0];
    assert!((row.g1 - q[1]).abs() < 1e-15);
    assert!((row.g2 - 2.0 * q[2]).abs() < 1e-15);
    assert!((row.lhs - 2.0 * q[2] / q[1].powi(3)).abs() < 1e-12);
    for w in table.rows.windows(2) {
        assert!(w[1].g1 >= w[0].g1 && w[1].g2 >= w[0].g2 && w[1].rhs >= w[0].rhs);
    }
    let _ = GroupElement::identity();
}
