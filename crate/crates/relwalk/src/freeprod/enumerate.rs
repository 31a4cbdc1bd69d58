use alloc::vec;
use alloc::vec::Vec;

use super::{FactorElement, FactorId, FactorKind, GroupElement, GroupSpec};

/// Non-identity elements of factor `id` with factor word length at most `b`,
/// sorted in element order.
pub fn factor_letters(spec: &GroupSpec, id: FactorId, b: u64) -> Vec<FactorElement> {
    let mut out = Vec::new();
    match spec.kind(id) {
        FactorKind::FreeAbelian { rank } => {
            let mut coords = vec![0i64; rank as usize];
            lattice_points(&mut coords, 0, b as i64, &mut |c| {
                if c.iter().any(|&x| x != 0) {
                    out.push(FactorElement::new(id, c.to_vec()));
                }
            });
        }
        FactorKind::FiniteCyclic { order } => {
            for k in 1..order as u64 {
                if k.min(order as u64 - k) <= b {
                    out.push(FactorElement::new(id, vec![k as i64]));
                }
            }
        }
    }
    out
}

// Lexicographic walk over integer vectors with l1 norm <= budget.
fn lattice_points(coords: &mut [i64], pos: usize, budget: i64, f: &mut dyn FnMut(&[i64])) {
    if pos == coords.len() {
        f(coords);
        return;
    }
    for c in -budget..=budget {
        coords[pos] = c;
        lattice_points(coords, pos + 1, budget - c.abs(), f);
    }
    coords[pos] = 0;
}

/// Number of elements with at most `m` syllables, each of factor word length
/// at most `b`.
pub fn ball_count(spec: &GroupSpec, m: usize, b: u64) -> u128 {
    sphere_counts(spec, m, b).iter().sum()
}

/// Counts per syllable number `0..=m` of the truncated ball.
pub fn sphere_counts(spec: &GroupSpec, m: usize, b: u64) -> Vec<u128> {
    let sizes: Vec<u128> = (1..=spec.n_factors() as FactorId)
        .map(|id| factor_letters(spec, id, b).len() as u128)
        .collect();
    let mut out = vec![1u128];
    let mut last: Vec<u128> = sizes.clone();
    for len in 1..=m {
        if len > 1 {
            let total: u128 = last.iter().sum();
            last = sizes
                .iter()
                .zip(&last)
                .map(|(&n, &c)| n * (total - c))
                .collect();
        }
        out.push(last.iter().sum());
    }
    out
}

/// Streams the truncated ball in order of syllable count, then
/// lexicographically on syllables.
pub struct BallIter {
    letters: Vec<FactorElement>,
    max_len: usize,
    len: usize,
    stack: Vec<usize>,
    started: bool,
    done: bool,
}

impl BallIter {
    pub fn new(spec: &GroupSpec, m: usize, b: u64) -> Self {
        let mut letters = Vec::new();
        for id in 1..=spec.n_factors() as FactorId {
            letters.extend(factor_letters(spec, id, b));
        }
        BallIter {
            letters,
            max_len: m,
            len: 0,
            stack: Vec::new(),
            started: false,
            done: false,
        }
    }

    // Smallest valid letter index >= from at position pos.
    fn next_valid(&self, pos: usize, from: usize) -> Option<usize> {
        let prev = if pos == 0 {
            None
        } else {
            Some(self.letters[self.stack[pos - 1]].factor)
        };
        (from..self.letters.len()).find(|&i| Some(self.letters[i].factor) != prev)
    }

    // Fills positions from `pos` on with their smallest valid letters.
    fn fill_from(&mut self, pos: usize) -> bool {
        self.stack.truncate(pos);
        while self.stack.len() < self.len {
            match self.next_valid(self.stack.len(), 0) {
                Some(i) => self.stack.push(i),
                None => return false,
            }
        }
        true
    }

    fn advance(&mut self) -> bool {
        let mut pos = self.len;
        while pos > 0 {
            pos -= 1;
            let cur = self.stack[pos];
            self.stack.truncate(pos);
            if let Some(i) = self.next_valid(pos, cur + 1) {
                self.stack.push(i);
                if self.fill_from(pos + 1) {
                    return true;
                }
            }
        }
        false
    }

    fn current(&self) -> GroupElement {
        GroupElement::from_reduced(
            self.stack
                .iter()
                .map(|&i| self.letters[i].clone())
                .collect(),
        )
    }
}

impl Iterator for BallIter {
    type Item = GroupElement;

    fn next(&mut self) -> Option<GroupElement> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(GroupElement::identity());
        }
        if self.len > 0 && self.advance() {
            return Some(self.current());
        }
        self.len += 1;
        if self.len > self.max_len || !self.fill_from(0) {
            self.done = true;
            return None;
        }
        Some(self.current())
    }
}

impl GroupSpec {
    /// Elements with at most `m` syllables, each of factor word length at
    /// most `b`.
    pub fn enumerate_ball(&self, m: usize, b: u64) -> BallIter {
        BallIter::new(self, m, b)
    }
}
