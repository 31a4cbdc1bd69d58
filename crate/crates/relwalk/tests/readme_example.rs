use relwalk::green::estimate_from_returns;
use relwalk::measures::return_sequence;
use relwalk::{FactorKind, GroupSpec, Measure};

#[test]
fn simple_walk_radius() {
    let z = FactorKind::FreeAbelian { rank: 1 };
    let g = GroupSpec::from_kinds(&[z, z]).unwrap();
    let m = Measure::simple(&g);
    let q = return_sequence(&m, 28).unwrap();
    let est = estimate_from_returns(&q.values, true).unwrap();
    assert!((est.inverse() - 3f64.sqrt() / 2.0).abs() < 1e-3);
}
