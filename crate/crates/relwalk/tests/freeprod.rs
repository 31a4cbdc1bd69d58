use proptest::prelude::*;
use relwalk::freeprod::{
    ball_count, components, extension_element, lift_path, relative_geodesic, sphere_counts,
    FactorElement, FactorKind, GroupElement, GroupError, GroupSpec,
};

fn zz() -> GroupSpec {
    GroupSpec::free_group(2)
}

fn z2_z() -> GroupSpec {
    GroupSpec::from_kinds(&[
        FactorKind::FreeAbelian { rank: 2 },
        FactorKind::FreeAbelian { rank: 1 },
    ])
    .unwrap()
}

fn z2_z3() -> GroupSpec {
    GroupSpec::from_kinds(&[
        FactorKind::FreeAbelian { rank: 2 },
        FactorKind::FiniteCyclic { order: 3 },
    ])
    .unwrap()
}

fn s(f: u16, c: &[i64]) -> FactorElement {
    FactorElement::new(f, c.to_vec())
}

fn el(g: &GroupSpec, t: &str) -> GroupElement {
    g.parse_element(t).unwrap()
}

#[test]
fn normalize_examples() {
    let g = zz();
    assert_eq!(g.normalize(&[]).unwrap(), GroupElement::identity());
    assert_eq!(
        g.normalize(&[s(1, &[1]), s(1, &[-1])]).unwrap(),
        GroupElement::identity()
    );
    let x = g
        .normalize(&[s(1, &[1]), s(2, &[1]), s(2, &[-1]), s(1, &[3])])
        .unwrap();
    assert_eq!(x.syllables(), &[s(1, &[4])]);
    assert_eq!(
        g.normalize(&[s(3, &[1])]),
        Err(GroupError::UnknownFactor(3))
    );
}

#[test]
fn multiply_inverse_examples() {
    let g = zz();
    let x = el(&g, "1:(3)|2:(1)|1:(-2)");
    assert_eq!(g.multiply(&GroupElement::identity(), &x).unwrap(), x);
    let y = el(&g, "1:(2)|2:(1)");
    assert_eq!(g.inverse(&y).unwrap(), el(&g, "2:(-1)|1:(-2)"));
    assert!(g
        .multiply(&x, &g.inverse(&x).unwrap())
        .unwrap()
        .is_identity());
    let bad = z2_z().parse_element("1:(1,0)").unwrap();
    assert!(g.multiply(&bad, &x).is_err());
}

#[test]
fn lengths_examples() {
    assert_eq!(zz().lengths(&GroupElement::identity()), (0, 0));
    let g = z2_z();
    assert_eq!(g.lengths(&el(&g, "1:(3,-4)")), (1, 7));
    let f = zz();
    assert_eq!(f.lengths(&el(&f, "1:(1)|2:(1)|1:(1)")), (3, 3));
    let c = z2_z3();
    assert_eq!(c.syllable_len(&s(2, &[2])), 1);
}

#[test]
fn text_round_trip() {
    let g = z2_z3();
    let x = el(&g, "1:(3,-4)|2:(1)");
    assert_eq!(x.to_string(), "1:(3,-4)|2:(1)");
    assert_eq!(el(&g, &x.to_string()), x);
    assert_eq!(el(&g, "2:(-1)").to_string(), "2:(2)");
    assert_eq!(GroupElement::identity().to_string(), "e");
    assert!(g.parse_element("1:(3)").is_err());
    assert!(g.parse_element("x").is_err());
}

#[test]
fn relative_geodesic_examples() {
    let g = zz();
    let e = GroupElement::identity();
    let p = relative_geodesic(&g, &e, &e).unwrap();
    assert_eq!(p.vertices, vec![e.clone()]);
    let z = el(&g, "1:(2)|2:(-1)");
    let p = relative_geodesic(&g, &e, &z).unwrap();
    assert_eq!(p.vertices, vec![e.clone(), el(&g, "1:(2)"), z.clone()]);
    let a = el(&g, "1:(1)");
    let ab = el(&g, "1:(1)|2:(1)");
    let p = relative_geodesic(&g, &a, &ab).unwrap();
    assert_eq!(p.vertices, vec![a, ab]);
    assert_eq!(p.len(), 1);
}

#[test]
fn lift_examples() {
    let g = zz();
    let e = GroupElement::identity();
    let l = lift_path(&g, &relative_geodesic(&g, &e, &e).unwrap()).unwrap();
    assert_eq!(l.vertices.len(), 1);
    let a3 = el(&g, "1:(3)");
    let l = lift_path(&g, &relative_geodesic(&g, &e, &a3).unwrap()).unwrap();
    assert_eq!(
        l.vertices,
        vec![e.clone(), el(&g, "1:(1)"), el(&g, "1:(2)"), a3]
    );
    assert_eq!(l.transition, vec![true, false, false, true]);
    let h = z2_z();
    let t = el(&h, "1:(2,1)");
    let l = lift_path(&h, &relative_geodesic(&h, &e, &t).unwrap()).unwrap();
    assert_eq!(l.vertices, vec![e, el(&h, "1:(1,0)"), el(&h, "1:(2,0)"), t]);
}

#[test]
fn lift_cyclic_direction() {
    let g = GroupSpec::from_kinds(&[
        FactorKind::FiniteCyclic { order: 4 },
        FactorKind::FiniteCyclic { order: 5 },
    ])
    .unwrap();
    // 2 in Z/4 is a tie and goes the positive way; 3 in Z/5 goes down.
    assert_eq!(g.factor_geodesic(&s(1, &[2])), vec![s(1, &[1]), s(1, &[1])]);
    assert_eq!(g.factor_geodesic(&s(2, &[3])), vec![s(2, &[4]), s(2, &[4])]);
}

#[test]
fn components_examples() {
    let g = zz();
    let e = GroupElement::identity();
    assert!(components(
        &g,
        &lift_path(&g, &relative_geodesic(&g, &e, &e).unwrap()).unwrap()
    )
    .is_empty());
    let l = lift_path(&g, &relative_geodesic(&g, &e, &el(&g, "1:(3)")).unwrap()).unwrap();
    let c = components(&g, &l);
    assert_eq!(c.len(), 1);
    assert_eq!((c[0].factor, c[0].travel), (1, 3));
    let l = lift_path(
        &g,
        &relative_geodesic(&g, &e, &el(&g, "1:(2)|2:(-1)")).unwrap(),
    )
    .unwrap();
    let c = components(&g, &l);
    assert_eq!(
        c.iter()
            .map(|r| (r.factor, r.entry, r.exit, r.travel))
            .collect::<Vec<_>>(),
        vec![(1, 0, 2, 2), (2, 2, 3, 1)]
    );
}

#[test]
fn extension_examples() {
    let g = zz();
    let a2 = el(&g, "1:(2)");
    assert_eq!(extension_element(&g, &a2, &el(&g, "2:(1)")).unwrap(), None);
    let sigma = extension_element(&g, &a2, &el(&g, "1:(3)"))
        .unwrap()
        .unwrap();
    assert_eq!(sigma, s(2, &[1]));
    let w = g
        .multiply(
            &g.multiply(&a2, &g.from_syllable(&sigma)).unwrap(),
            &el(&g, "1:(3)"),
        )
        .unwrap();
    assert_eq!(w.relative_len(), 3);
    assert_eq!(
        extension_element(&g, &GroupElement::identity(), &a2).unwrap(),
        None
    );
    assert_eq!(
        extension_element(&GroupSpec::free_group(1), &a2, &a2),
        Err(GroupError::TooFewFactors)
    );
}

#[test]
fn ball_examples() {
    let g = zz();
    assert_eq!(
        g.enumerate_ball(0, 5).collect::<Vec<_>>(),
        vec![GroupElement::identity()]
    );
    let b: Vec<_> = g
        .enumerate_ball(1, 2)
        .filter(|x| !x.is_identity())
        .collect();
    assert_eq!(b.len(), 8);
    let sphere2 = g
        .enumerate_ball(2, 1)
        .filter(|x| x.relative_len() == 2)
        .count();
    assert_eq!(sphere2, 8);
}

#[test]
fn ball_order_and_counts() {
    for g in [zz(), z2_z3(), GroupSpec::free_group(3)] {
        for (m, b) in [(0, 1), (1, 1), (2, 2), (3, 2), (4, 1)] {
            let all: Vec<_> = g.enumerate_ball(m, b).collect();
            assert_eq!(all.len() as u128, ball_count(&g, m, b));
            assert!(
                all.windows(2).all(|w| w[0] < w[1]),
                "order and no duplicates"
            );
            for x in &all {
                assert!(x.relative_len() <= m);
                assert!(x.syllables().iter().all(|s| g.syllable_len(s) <= b));
            }
        }
    }
    // Z*Z sphere formula 2 (2B)^m.
    let g = zz();
    for b in 1..4u64 {
        let c = sphere_counts(&g, 5, b);
        for (m, &cm) in c.iter().enumerate().skip(1) {
            assert_eq!(cm, 2 * (2 * b as u128).pow(m as u32));
        }
    }
}

#[test]
fn group_laws_on_ball() {
    let g = z2_z3();
    let ball: Vec<_> = g.enumerate_ball(2, 2).collect();
    for x in &ball {
        assert!(g.multiply(x, &g.inverse(x).unwrap()).unwrap().is_identity());
        assert_eq!(g.multiply(&GroupElement::identity(), x).unwrap(), *x);
        assert_eq!(g.multiply(x, &GroupElement::identity()).unwrap(), *x);
    }
    let dhat = |x: &GroupElement, y: &GroupElement| {
        g.multiply(&g.inverse(x).unwrap(), y)
            .unwrap()
            .relative_len()
    };
    let small: Vec<_> = g.enumerate_ball(2, 1).collect();
    for x in &small {
        for y in &small {
            assert_eq!(dhat(x, y), dhat(y, x));
            for z in small.iter().step_by(3) {
                assert!(dhat(x, z) <= dhat(x, y) + dhat(y, z));
            }
        }
    }
}

#[test]
fn extension_additivity_on_ball() {
    let g = zz();
    let ball: Vec<_> = g.enumerate_ball(2, 2).collect();
    for x in &ball {
        for y in &ball {
            let sigma = extension_element(&g, x, y).unwrap();
            let mid = match &sigma {
                Some(s) => {
                    assert_eq!(g.syllable_len(s), 1);
                    g.from_syllable(s)
                }
                None => GroupElement::identity(),
            };
            let w = g.multiply(&g.multiply(x, &mid).unwrap(), y).unwrap();
            assert!(w.relative_len() >= x.relative_len() + y.relative_len());
            let p = relative_geodesic(&g, &GroupElement::identity(), &w).unwrap();
            assert!(p.vertices.contains(x));
        }
    }
}

fn arb_raw() -> impl Strategy<Value = Vec<FactorElement>> {
    prop::collection::vec(
        prop_oneof![
            (prop::array::uniform2(-3i64..=3)).prop_map(|c| FactorElement::new(1, c.to_vec())),
            (0i64..3).prop_map(|c| FactorElement::new(2, vec![c])),
        ],
        0..10,
    )
}

proptest! {
    #[test]
    fn normalize_idempotent(raw in arb_raw()) {
        let g = z2_z3();
        let x = g.normalize(&raw).unwrap();
        prop_assert_eq!(g.normalize(x.syllables()).unwrap(), x.clone());
        prop_assert!(g.check_element(&x).is_ok());
    }

    #[test]
    fn associativity(a in arb_raw(), b in arb_raw(), c in arb_raw()) {
        let g = z2_z3();
        let (a, b, c) = (g.normalize(&a).unwrap(), g.normalize(&b).unwrap(), g.normalize(&c).unwrap());
        let left = g.multiply(&g.multiply(&a, &b).unwrap(), &c).unwrap();
        let right = g.multiply(&a, &g.multiply(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn geodesic_and_lift(a in arb_raw(), b in arb_raw()) {
        let g = z2_z3();
        let (x, z) = (g.normalize(&a).unwrap(), g.normalize(&b).unwrap());
        let p = relative_geodesic(&g, &x, &z).unwrap();
        let diff = g.multiply(&g.inverse(&x).unwrap(), &z).unwrap();
        prop_assert_eq!(p.len(), diff.relative_len());
        let l = lift_path(&g, &p).unwrap();
        let flagged: Vec<_> = l.vertices.iter().zip(&l.transition).filter(|(_, &f)| f).map(|(v, _)| v.clone()).collect();
        prop_assert_eq!(&flagged, &p.vertices);
        prop_assert_eq!((l.vertices.len() - 1) as u64, g.word_len(&diff));
        for w in l.vertices.windows(2) {
            let step = g.multiply(&g.inverse(&w[0]).unwrap(), &w[1]).unwrap();
            prop_assert_eq!(g.word_len(&step), 1);
        }
        let comps = components(&g, &p);
        for w in comps.windows(2) {
            prop_assert!(w[0].factor != w[1].factor);
        }
    }
}
