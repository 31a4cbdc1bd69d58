//! First-return kernels to the factors `H_k`, parabolic Green functions,
//! parabolic radii, Green moments and the spectral classification.

pub mod classify;
pub mod equadiff;
pub mod grid;
pub mod kernel;
pub mod model;

use alloc::string::String;

pub use classify::{
    classify, Classification, ClassifyBudget, DivergenceFit, FactorReport, MomentLadder,
    MomentsVerdict, Verdict,
};
pub use equadiff::{equadiff_ratio, EquadiffRow, EquadiffTable};
pub use grid::{default_radius, FactorGrid};
pub use kernel::{
    factor_coords, factor_element, kernel_coefficients, KernelCoefficients, ReturnKernel,
};
pub use model::{FactorGreen, FactorizedGreen, KernelDerivatives, ParabolicModel, ParabolicRadius};

use crate::engine::MemoryBudget;
use crate::green::GreenError;
use crate::measures::MeasureError;

#[derive(Debug, Clone, thiserror::Error)]
pub enum ParabolicError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Green(#[from] GreenError),
    #[error("measure is not admissible: {0}")]
    Inadmissible(String),
}

/// Truncations for the kernel route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicBudget {
    /// Longest excursion counted in the kernel.
    pub horizon: usize,
    /// Word radius the excursions may explore.
    pub exploration: u32,
    /// Box half side on `Z^d` factors; `None` picks [`default_radius`].
    pub box_radius: Option<i64>,
    /// Multiplier on the default box half side.
    pub box_scale: i64,
    /// Most kernel powers summed in a factor Green function.
    pub max_steps: usize,
    pub tol: f64,
    pub memory: MemoryBudget,
}

impl Default for ParabolicBudget {
    fn default() -> Self {
        ParabolicBudget {
            horizon: 300,
            exploration: 10,
            box_radius: None,
            box_scale: 1,
            max_steps: 4000,
            tol: 1e-13,
            memory: MemoryBudget::DEFAULT,
        }
    }
}

impl ParabolicBudget {
    /// Every truncation made larger: horizon, box and step cap doubled, one
    /// more layer of exploration (a word ball grows by a factor of about 3
    /// per layer on free products).
    pub fn doubled(&self) -> Self {
        ParabolicBudget {
            horizon: self.horizon * 2,
            exploration: self.exploration + 1,
            box_radius: self.box_radius.map(|b| b * 2),
            box_scale: self.box_scale * 2,
            max_steps: self.max_steps * 2,
            tol: self.tol,
            memory: self.memory,
        }
    }

    /// Box half side actually used for a factor of rank `d`.
    pub fn resolved_box(&self, d: usize) -> i64 {
        self.box_radius
            .unwrap_or_else(|| default_radius(d) * self.box_scale)
    }
}
