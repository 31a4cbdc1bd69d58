use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::field::GreenFunction;
use super::GreenError;
use crate::engine::neumaier_sum;

/// `u_m = sum_{g in S_m, syllables <= b} G(e, g | r) G(g, e | r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereSumTable {
    pub r: f64,
    pub b: u64,
    pub u: Vec<f64>,
}

impl SphereSumTable {
    /// `max u_m / min u_m` over `m` in `lo..=hi`.
    pub fn spread(&self, lo: usize, hi: usize) -> f64 {
        let w = &self.u[lo..=hi.min(self.u.len() - 1)];
        let max = w.iter().cloned().fold(f64::MIN, f64::max);
        let min = w.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }
}

/// Sphere sums by enumerating the truncated ball; every element must be
/// inside the region where `g` is known.
pub fn sphere_sums<G: GreenFunction + ?Sized>(
    g: &G,
    max_m: usize,
    b: u64,
) -> Result<SphereSumTable, GreenError> {
    let spec = g.group().clone();
    let mut per: Vec<Vec<f64>> = vec![Vec::new(); max_m + 1];
    for x in spec.enumerate_ball(max_m, b) {
        let out = g
            .from_identity(&x)
            .ok_or_else(|| GreenError::Outside(format!("{x}")))?;
        let back = g
            .from_identity(&spec.inv(&x))
            .ok_or_else(|| GreenError::Outside(format!("{x}")))?;
        per[x.relative_len()].push(out * back);
    }
    Ok(SphereSumTable {
        r: g.r(),
        b,
        u: per.iter().map(|v| neumaier_sum(v)).collect(),
    })
}
