use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relwalk::ancona::{ancona_ratio_audit, audit_tolerance, triangle_audit, Triple};
use relwalk::engine::Sequential;
use relwalk::green::GreenFunction;
use relwalk::measures::Measure;
use relwalk::parabolic::{FactorizedGreen, ParabolicBudget, ParabolicModel};
use relwalk::{GroupElement, GroupSpec};

const R_TREE: f64 = 1.154_700_538_379_251_5;

fn tree_f(z: f64) -> f64 {
    (1.0 - (1.0 - 0.75 * z * z).sqrt()) / (1.5 * z)
}

fn tree_g(z: f64) -> f64 {
    1.0 / (1.0 - z * tree_f(z))
}

fn budget() -> ParabolicBudget {
    ParabolicBudget {
        horizon: 200,
        exploration: 10,
        ..ParabolicBudget::default()
    }
}

fn simple_green(r: f64, b: ParabolicBudget) -> FactorizedGreen {
    let m = Measure::simple(&GroupSpec::free_group(2));
    ParabolicModel::new(&m, b, &Sequential)
        .unwrap()
        .factorized(r)
        .unwrap()
}

fn el(g: &GroupSpec, s: &str) -> GroupElement {
    g.parse_element(s).unwrap()
}

fn random_triples(g: &GroupSpec, count: usize, seed: u64) -> Vec<Triple> {
    let ball: Vec<GroupElement> = g.enumerate_ball(3, 3).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pick = || ball[rng.gen_range(0..ball.len())].clone();
    (0..count).map(|_| (pick(), pick(), pick())).collect()
}

#[test]
fn factorized_matches_tree_closed_form() {
    let g = GroupSpec::free_group(2);
    // the killed kernel loses accuracy near the radius
    for (frac, tol) in [(0.3, 1e-7), (0.6, 1e-7), (0.9, 1e-4)] {
        let r = frac * R_TREE;
        let fg = simple_green(r, budget());
        for x in g.enumerate_ball(2, 2) {
            let want = tree_g(r) * tree_f(r).powi(g.word_len(&x) as i32);
            let got = fg.from_identity(&x).unwrap();
            assert!(
                (got - want).abs() < tol * want,
                "{x} at {frac}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn triangle_examples() {
    let g = GroupSpec::free_group(2);
    let fg = simple_green(0.5 * R_TREE, budget());
    let e = GroupElement::identity();
    let z = el(&g, "1:(2)|2:(-1)");
    let a = triangle_audit(&fg, &[(e.clone(), e.clone(), z.clone())], 0.0);
    assert_eq!(a.worst_slack, 0.0);
    // on the tree the bound is an equality along geodesics
    let a = triangle_audit(&fg, &[(e, el(&g, "1:(1)"), el(&g, "1:(1)|2:(1)"))], 1e-12);
    assert!(a.passed() && a.worst_relative.abs() < 1e-12, "{a:?}");
}

#[test]
fn triangle_sweep() {
    let g = GroupSpec::free_group(2);
    let triples = random_triples(&g, 500, 7);
    for frac in [0.3, 0.6, 0.9] {
        let r = frac * R_TREE;
        let fine = simple_green(r, budget());
        let coarse = simple_green(
            r,
            ParabolicBudget {
                horizon: 100,
                exploration: 8,
                ..ParabolicBudget::default()
            },
        );
        let eps = audit_tolerance(&fine, &coarse, &triples);
        let a = triangle_audit(&fine, &triples, eps);
        assert_eq!(a.checked, 500);
        assert!(a.passed(), "{frac}: {a:?} eps {eps}");
        assert!(a.worst_slack <= eps);
    }
}

#[test]
fn ratio_examples() {
    let g = GroupSpec::free_group(2);
    let m = Measure::simple(&g);
    let r = 0.5 * R_TREE;
    let fg = simple_green(r, budget());
    let e = GroupElement::identity();
    let rep = ancona_ratio_audit(
        &m,
        std::slice::from_ref(&fg),
        &[(e.clone(), el(&g, "1:(3)"))],
        0.0,
    )
    .unwrap();
    assert!(rep.entries.is_empty());
    let rep = ancona_ratio_audit(
        &m,
        std::slice::from_ref(&fg),
        &[(e, el(&g, "1:(1)|2:(1)"))],
        1e-12,
    )
    .unwrap();
    assert_eq!(rep.entries.len(), 1);
    assert_eq!(rep.entries[0].y, el(&g, "1:(1)"));
    // tree: G F^2 / (G F)^2 = 1 / G
    assert!((rep.entries[0].ratio - 1.0 / tree_g(r)).abs() < 1e-7);
    assert_eq!(rep.lower_violations, 0);
    let skew = Measure::parse(g, &[("1:(1)", "1/2"), ("2:(1)", "1/2")]).unwrap();
    assert!(ancona_ratio_audit(&skew, &[fg], &[], 0.0).is_err());
}

#[test]
fn ratio_sweep_is_stable() {
    let g = GroupSpec::free_group(2);
    let m = Measure::lazy(&g, BigRational::new(BigInt::from(1), BigInt::from(2)));
    let ball: Vec<GroupElement> = g.enumerate_ball(3, 2).collect();
    let pairs: Vec<(GroupElement, GroupElement)> = ball
        .iter()
        .step_by(7)
        .flat_map(|x| ball.iter().step_by(11).map(move |z| (x.clone(), z.clone())))
        .collect();
    let run = |b: ParabolicBudget| {
        let model = ParabolicModel::new(&m, b, &Sequential).unwrap();
        let greens: Vec<FactorizedGreen> = [0.3, 0.6, 0.9]
            .iter()
            .map(|f| model.factorized(f * 1.071_796_769_724_490_8).unwrap())
            .collect();
        ancona_ratio_audit(&m, &greens, &pairs, 1e-9).unwrap()
    };
    let a = run(budget());
    let b = run(budget().doubled());
    assert_eq!(a.lower_violations, 0);
    assert!(a.entries.len() > 100);
    for (x, y) in a.per_r.iter().zip(&b.per_r) {
        assert!(x.min >= x.lower_bound - 1e-9);
        assert!((x.max - y.max).abs() < 1e-3 * y.max, "{x:?} {y:?}");
    }
}
