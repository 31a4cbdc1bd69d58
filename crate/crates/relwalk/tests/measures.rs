use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use relwalk::engine::MemoryBudget;
use relwalk::measures::{
    convolve, distribution, distribution_with, return_sequence, return_sequence_with, validate,
    Aperiodicity, MeasureError, Mode,
};
use relwalk::{Executor, FactorKind, GroupElement, GroupSpec, Measure};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Runs chunks last to first.
struct Reversed;

impl Executor for Reversed {
    fn for_chunks<T, F>(&self, data: &mut [T], chunk_len: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync,
    {
        let chunk_len = chunk_len.max(1);
        let mut chunks: Vec<(usize, &mut [T])> = data
            .chunks_mut(chunk_len)
            .enumerate()
            .map(|(i, c)| (i * chunk_len, c))
            .collect();
        for (s, c) in chunks.iter_mut().rev() {
            f(*s, c);
        }
    }
}

/// Counts closed words of length `n` over `k` free generators and their
/// inverses by brute-force free reduction.
fn closed_words(k: i8, n: u32) -> u64 {
    let letters: Vec<i8> = (1..=k).flat_map(|g| [g, -g]).collect();
    let base = letters.len() as u64;
    let mut count = 0;
    for code in 0..base.pow(n) {
        let mut c = code;
        let mut stack: Vec<i8> = Vec::new();
        for _ in 0..n {
            let l = letters[(c % base) as usize];
            c /= base;
            if stack.last() == Some(&-l) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        if stack.is_empty() {
            count += 1;
        }
    }
    count
}

#[test]
fn f2_returns_match_path_oracle() {
    let g = GroupSpec::free_group(2);
    let m = Measure::simple(&g);
    let seq = return_sequence(&m, 8).unwrap();
    assert_eq!(seq.mode, Mode::Exact);
    let exact = seq.exact.unwrap();
    assert_eq!(exact[0], q(1, 1));
    assert_eq!(exact[2], q(1, 4));
    assert_eq!(exact[4], q(7, 64));
    for n in 0..=8u32 {
        let oracle = BigRational::new(BigInt::from(closed_words(2, n)), BigInt::from(4u64.pow(n)));
        assert_eq!(exact[n as usize], oracle, "n = {n}");
    }
}

#[test]
fn point_mass_never_returns() {
    let g = GroupSpec::free_group(2);
    let m = Measure::parse(g, &[("1:(1)", "1")]).unwrap();
    let seq = return_sequence(&m, 6).unwrap();
    assert_eq!(seq.values, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
}

#[test]
fn convolve_examples() {
    let g = GroupSpec::free_group(2);
    let m = Measure::simple(&g);
    let delta = Measure::parse(g.clone(), &[("e", "1")]).unwrap();
    assert_eq!(convolve(&delta, &m).unwrap(), m);
    let m2 = convolve(&m, &m).unwrap();
    assert_eq!(m2.get_exact(&GroupElement::identity()).unwrap(), q(1, 4));
    assert_eq!(
        m2.get_exact(&g.parse_element("1:(2)").unwrap()).unwrap(),
        q(1, 16)
    );
    let total: BigRational = m2.support().iter().map(|x| m2.get_exact(x).unwrap()).sum();
    assert_eq!(total, q(1, 1));
    assert!(matches!(
        convolve(&m, &m.to_float()),
        Err(MeasureError::ModeMismatch)
    ));
}

#[test]
fn distribution_examples() {
    let g = GroupSpec::free_group(2);
    let m = Measure::simple(&g);
    let d0 = distribution(&m, 0, None).unwrap();
    assert_eq!(d0.support(), &[GroupElement::identity()]);
    let d2 = distribution(&m, 2, None).unwrap();
    assert_eq!(d2.len(), 13);
    for x in d2.support() {
        let want = if x.is_identity() { q(1, 4) } else { q(1, 16) };
        assert!(g.word_len(x) == 2 || x.is_identity());
        assert_eq!(d2.get_exact(x).unwrap(), want);
    }
    let p0 = distribution(&m, 2, Some(0)).unwrap();
    assert_eq!(p0.support(), &[GroupElement::identity()]);
    assert_eq!(p0.get_exact(&GroupElement::identity()).unwrap(), q(1, 4));
}

#[test]
fn pruned_distribution_is_restriction() {
    let g = GroupSpec::from_kinds(&[
        FactorKind::FreeAbelian { rank: 2 },
        FactorKind::FiniteCyclic { order: 3 },
    ])
    .unwrap();
    let m = Measure::lazy(&g, q(1, 3));
    let full = distribution(&m, 6, None).unwrap();
    for p in 0..5u32 {
        let cut = distribution(&m, 6, Some(p)).unwrap();
        let expect: Vec<_> = full
            .support()
            .iter()
            .filter(|x| g.word_len(x) <= p as u64)
            .cloned()
            .collect();
        assert_eq!(cut.support(), expect.as_slice());
        for x in cut.support() {
            assert_eq!(cut.get_exact(x), full.get_exact(x));
        }
    }
}

#[test]
fn pruned_returns_match_naive_powers() {
    let g = GroupSpec::from_kinds(&[
        FactorKind::FreeAbelian { rank: 1 },
        FactorKind::FiniteCyclic { order: 3 },
    ])
    .unwrap();
    let m = Measure::parse(
        g.clone(),
        &[
            ("e", "1/5"),
            ("1:(1)", "1/5"),
            ("1:(-1)", "1/10"),
            ("2:(1)|1:(2)", "1/2"),
        ],
    )
    .unwrap();
    let seq = return_sequence(&m, 8).unwrap().exact.unwrap();
    let mut power = Measure::parse(g, &[("e", "1")]).unwrap();
    for (n, qn) in seq.iter().enumerate() {
        assert_eq!(
            power.get_exact(&GroupElement::identity()).unwrap(),
            *qn,
            "n = {n}"
        );
        power = convolve(&power, &m).unwrap();
    }
}

#[test]
fn float_mode_matches_exact() {
    let g = GroupSpec::free_group(2);
    let m = Measure::lazy(&g, q(1, 2));
    let e = return_sequence(&m, 12).unwrap();
    let f = return_sequence(&m.to_float(), 12).unwrap();
    assert_eq!(f.mode, Mode::Float);
    for (a, b) in e.values.iter().zip(&f.values) {
        assert!((a - b).abs() <= 1e-15 * a.abs().max(1e-300));
    }
}

#[test]
fn supermultiplicative_and_symmetric() {
    let g = GroupSpec::from_kinds(&[
        FactorKind::FreeAbelian { rank: 2 },
        FactorKind::FreeAbelian { rank: 1 },
    ])
    .unwrap();
    let m = Measure::simple(&g);
    let s = return_sequence(&m, 12).unwrap().exact.unwrap();
    for a in 0..=12 {
        for b in 0..=(12 - a) {
            assert!(s[a + b] >= &s[a] * &s[b]);
        }
    }
    let d = distribution(&m, 2, None).unwrap();
    for x in d.support() {
        assert_eq!(d.get_exact(x), d.get_exact(&g.inverse(x).unwrap()));
    }
}

#[test]
fn budget_error_reports_progress() {
    let g = GroupSpec::free_group(2);
    let m = Measure::simple(&g);
    match return_sequence_with(
        &m,
        20,
        MemoryBudget { cap_bytes: 20_000 },
        &relwalk::Sequential,
    ) {
        Err(MeasureError::Budget {
            largest_completed,
            partial: Some(p),
        }) => {
            assert!(largest_completed < 20);
            assert_eq!(p.n_max(), largest_completed);
            assert_eq!(p.values[2], 0.25);
        }
        other => panic!("expected a budget error, got {other:?}"),
    }
    assert!(distribution_with(
        &m,
        20,
        None,
        MemoryBudget { cap_bytes: 1000 },
        &relwalk::Sequential
    )
    .is_err());
}

#[test]
fn executor_order_does_not_matter() {
    let g = GroupSpec::free_group(2);
    let m = Measure::lazy(&g, q(1, 2)).to_float();
    let a = return_sequence_with(&m, 16, MemoryBudget::DEFAULT, &relwalk::Sequential).unwrap();
    let b = return_sequence_with(&m, 16, MemoryBudget::DEFAULT, &Reversed).unwrap();
    assert_eq!(a, b);
}

#[test]
fn validate_examples() {
    let g = GroupSpec::free_group(2);
    let r = validate(&Measure::simple(&g), 6).unwrap();
    assert!(r.symmetric);
    assert_eq!(r.aperiodicity, Aperiodicity::Periodic { period: 2 });
    assert_eq!(r.admissible_to_depth, 6);
    assert_eq!(r.support_radius, 1);

    let r = validate(&Measure::lazy(&g, q(1, 2)), 4).unwrap();
    assert_eq!(r.is_aperiodic(), Some(true));

    let sub = Measure::parse(g.clone(), &[("1:(1)", "1/2"), ("1:(-1)", "1/2")]).unwrap();
    let r = validate(&sub, 4).unwrap();
    assert_eq!(r.admissible_to_depth, 0);

    let drift = Measure::parse(g, &[("1:(1)", "1/2"), ("2:(1)", "1/2")]).unwrap();
    let r = validate(&drift, 3).unwrap();
    assert_eq!(r.aperiodicity, Aperiodicity::Unknown { depth: 3 });
    assert!(!r.symmetric);
    assert_eq!(r.admissible_to_depth, 0);
}

#[test]
fn bad_measures_rejected() {
    let g = GroupSpec::free_group(2);
    assert!(matches!(
        Measure::parse(g.clone(), &[("1:(1)", "1/2")]),
        Err(MeasureError::NotNormalized(_))
    ));
    assert!(matches!(
        Measure::parse(g.clone(), &[("1:(1)", "-1/2"), ("e", "3/2")]),
        Err(MeasureError::NonPositive(_))
    ));
    assert!(matches!(
        Measure::parse(g.clone(), &[("1:(1)", "x")]),
        Err(MeasureError::BadWeight(_))
    ));
    assert!(matches!(
        Measure::parse(g, &[("3:(1)", "1")]),
        Err(MeasureError::Group(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn convolution_conserves_mass(w in prop::collection::vec(1u32..6, 5)) {
        let g = GroupSpec::from_kinds(&[FactorKind::FreeAbelian { rank: 1 }, FactorKind::FiniteCyclic { order: 4 }]).unwrap();
        let total: u32 = w.iter().sum();
        let elems = ["e", "1:(1)", "2:(1)", "1:(-2)|2:(3)", "2:(2)|1:(1)"];
        let pairs: Vec<(GroupElement, BigRational)> = elems
            .iter()
            .zip(&w)
            .map(|(s, &k)| (g.parse_element(s).unwrap(), q(k as i64, total as i64)))
            .collect();
        let m = Measure::exact(g.clone(), pairs).unwrap();
        let m3 = convolve(&convolve(&m, &m).unwrap(), &m).unwrap();
        let mass: BigRational = m3.support().iter().map(|x| m3.get_exact(x).unwrap()).sum();
        prop_assert_eq!(mass, q(1, 1));
        let d3 = distribution(&m, 3, None).unwrap();
        prop_assert_eq!(d3, m3);
    }
}
