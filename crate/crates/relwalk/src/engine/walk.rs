//! One convolution step on a word ball, for several value types.

use alloc::vec::Vec;
use core::sync::atomic::{AtomicBool, Ordering};
use num_bigint::BigUint;
use num_traits::Zero;

use super::exec::Executor;
use super::sum::Neumaier;
use super::wordball::{Move, WordBall, OUTSIDE};
use crate::freeprod::GroupElement;

pub(crate) const CHUNK: usize = 1 << 13;

/// Values carried by a convolution: probabilities, exact path counts, or
/// reachability.
pub trait WalkValue: Clone + Send + Sync {
    type Weight: Clone + Send + Sync;

    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    /// Sum of `weight * value`; `None` on overflow.
    fn combine<'a, I>(terms: I) -> Option<Self>
    where
        I: Iterator<Item = (&'a Self::Weight, &'a Self)>,
        Self: 'a,
        Self::Weight: 'a;
    /// Rough heap plus inline size, for memory budgets.
    fn approx_bytes() -> usize {
        core::mem::size_of::<Self>()
    }
}

impl WalkValue for f64 {
    type Weight = f64;

    fn zero() -> Self {
        0.0
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn combine<'a, I>(terms: I) -> Option<Self>
    where
        I: Iterator<Item = (&'a f64, &'a f64)>,
    {
        let mut acc = Neumaier::new();
        for (w, v) in terms {
            acc.add(w * v);
        }
        Some(acc.value())
    }
}

impl WalkValue for u128 {
    type Weight = u128;

    fn zero() -> Self {
        0
    }

    fn is_zero(&self) -> bool {
        *self == 0
    }

    fn combine<'a, I>(terms: I) -> Option<Self>
    where
        I: Iterator<Item = (&'a u128, &'a u128)>,
    {
        let mut acc = 0u128;
        for (w, v) in terms {
            acc = acc.checked_add(w.checked_mul(*v)?)?;
        }
        Some(acc)
    }
}

impl WalkValue for BigUint {
    type Weight = BigUint;

    fn zero() -> Self {
        <BigUint as Zero>::zero()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn combine<'a, I>(terms: I) -> Option<Self>
    where
        I: Iterator<Item = (&'a BigUint, &'a BigUint)>,
    {
        let mut acc = <BigUint as Zero>::zero();
        for (w, v) in terms {
            acc += w * v;
        }
        Some(acc)
    }

    fn approx_bytes() -> usize {
        core::mem::size_of::<Self>() + 32
    }
}

impl WalkValue for bool {
    type Weight = ();

    fn zero() -> Self {
        false
    }

    fn is_zero(&self) -> bool {
        !*self
    }

    fn combine<'a, I>(mut terms: I) -> Option<Self>
    where
        I: Iterator<Item = (&'a (), &'a bool)>,
    {
        Some(terms.any(|(_, &v)| v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overflow;

/// Pull-form convolution `new[x] = sum_s w_s old[x * g_s]` on a ball.
pub struct Walk<'a, V: WalkValue> {
    ball: &'a WordBall,
    moves: Vec<(V::Weight, Move)>,
}

impl<'a, V: WalkValue> Walk<'a, V> {
    /// `terms` are `(weight, g)`; the step reads `old` at `x * g`. For
    /// the law of the walk at the next time, pass `g = s^-1` with weight
    /// `mu(s)`.
    pub fn new(ball: &'a WordBall, terms: &[(V::Weight, GroupElement)]) -> Self {
        let moves = terms
            .iter()
            .filter_map(|(w, g)| ball.mover(g).map(|m| (w.clone(), m)))
            .collect();
        Walk { ball, moves }
    }

    pub fn ball(&self) -> &WordBall {
        self.ball
    }

    /// One step; entries with word length above `radius` are set to zero.
    pub fn step<E: Executor>(
        &self,
        exec: &E,
        old: &[V],
        new: &mut [V],
        radius: u32,
    ) -> Result<(), Overflow> {
        let overflow = AtomicBool::new(false);
        let ball = self.ball;
        exec.for_chunks(new, CHUNK, |start, chunk| {
            let mut terms: Vec<(&V::Weight, &V)> = Vec::with_capacity(self.moves.len());
            for (i, slot) in chunk.iter_mut().enumerate() {
                let x = (start + i) as u32;
                if ball.word_len(x) > radius {
                    *slot = V::zero();
                    continue;
                }
                terms.clear();
                for (w, mv) in &self.moves {
                    let y = ball.apply(x, mv);
                    if y != OUTSIDE && !old[y as usize].is_zero() {
                        terms.push((w, &old[y as usize]));
                    }
                }
                *slot = if terms.is_empty() {
                    V::zero()
                } else {
                    match V::combine(terms.iter().copied()) {
                        Some(v) => v,
                        None => {
                            overflow.store(true, Ordering::Relaxed);
                            V::zero()
                        }
                    }
                };
            }
        });
        if overflow.load(Ordering::Relaxed) {
            Err(Overflow)
        } else {
            Ok(())
        }
    }
}

/// Precomputed neighbour table `x -> x * g_k` for a fixed list of moves.
pub struct Transitions {
    pub n_moves: usize,
    /// Row-major: `table[x * n_moves + k]`.
    pub table: Vec<u32>,
}

impl Transitions {
    pub fn new<E: Executor>(exec: &E, ball: &WordBall, moves: &[GroupElement]) -> Self {
        let movers: Vec<Move> = moves.iter().filter_map(|g| ball.mover(g)).collect();
        let k = moves.len();
        let complete = movers.len() == k;
        let mut table = alloc::vec![OUTSIDE; ball.len() * k];
        exec.for_chunks(&mut table, CHUNK * k.max(1), |start, chunk| {
            if !complete {
                return;
            }
            let x0 = start / k.max(1);
            for (i, row) in chunk.chunks_mut(k.max(1)).enumerate() {
                let x = (x0 + i) as u32;
                for (slot, mv) in row.iter_mut().zip(&movers) {
                    *slot = ball.apply(x, mv);
                }
            }
        });
        Transitions { n_moves: k, table }
    }

    #[inline]
    pub fn get(&self, x: usize, k: usize) -> u32 {
        self.table[x * self.n_moves + k]
    }
}
