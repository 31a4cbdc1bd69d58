//! Convolution core: word balls indexed as tries, pull-form convolution
//! steps, executors and compensated sums.

pub mod exec;
pub mod sum;
pub mod walk;
pub mod wordball;

pub use exec::{Executor, Sequential};
pub use sum::{neumaier_sum, pairwise_sum, Neumaier};
pub use walk::{Transitions, Walk, WalkValue};
pub use wordball::{ball_size, LetterTable, Move, WordBall, NODE_BYTES, OUTSIDE};

/// Memory limit for the large tables, in bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryBudget {
    pub cap_bytes: u64,
}

impl MemoryBudget {
    pub const DEFAULT: MemoryBudget = MemoryBudget {
        cap_bytes: 16 << 30,
    };

    pub fn unlimited() -> Self {
        MemoryBudget {
            cap_bytes: u64::MAX,
        }
    }

    pub fn fits(&self, bytes: u128) -> bool {
        bytes <= self.cap_bytes as u128
    }
}

impl Default for MemoryBudget {
    fn default() -> Self {
        MemoryBudget::DEFAULT
    }
}
