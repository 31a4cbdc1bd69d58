//! Two-sided power-law checks for non-negative sequences and local limit
//! exponent fits.
//!
//! "Comparable" (`f ≍ g`) is tested as a ratio family with a finite spread
//! that does not grow by more than [`STABILITY`] when the range is doubled.

use alloc::string::String;
use alloc::vec::Vec;

/// Allowed growth of a spread from half range to full range.
pub const STABILITY: f64 = 1.10;

/// Default bound on the linear trend of an exponent fit, in units of `log R`.
pub const TREND_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TauberError {
    #[error("value {1} at index {0} is negative or not finite")]
    Negative(usize, f64),
    #[error("sequence is identically zero")]
    AllZero,
    #[error("sequence increases at index {0}")]
    NotMonotone(usize),
    #[error("window holds {0} usable points, need at least 4")]
    Window(usize),
    #[error("{0}")]
    Invalid(String),
}

/// `a_0, a_1, ...` with a free-form provenance note.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpec {
    pub values: Vec<f64>,
    pub note: String,
}

impl SequenceSpec {
    pub fn new(values: Vec<f64>, note: impl Into<String>) -> Result<Self, TauberError> {
        if let Some((i, &v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(TauberError::Negative(i, v));
        }
        Ok(SequenceSpec {
            values,
            note: note.into(),
        })
    }

    pub fn from_fn(
        n: usize,
        f: impl Fn(usize) -> f64,
        note: impl Into<String>,
    ) -> Result<Self, TauberError> {
        Self::new((0..n).map(f).collect(), note)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Min, max and `max / min` of a ratio family, over the full range and over
/// its first half.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioFamily {
    pub ratios: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub spread: f64,
    pub half_spread: f64,
}

impl RatioFamily {
    // `half` marks the points in the half range.
    fn new(ratios: Vec<f64>, half: &[bool]) -> Self {
        let (min, max) = min_max(ratios.iter().copied());
        let (hmin, hmax) = min_max(
            ratios
                .iter()
                .zip(half)
                .filter(|(_, h)| **h)
                .map(|(r, _)| *r),
        );
        RatioFamily {
            ratios,
            min,
            max,
            spread: max / min,
            half_spread: hmax / hmin,
        }
    }

    pub fn finite(&self) -> bool {
        self.min > 0.0 && self.spread.is_finite()
    }

    pub fn stable(&self) -> bool {
        self.finite() && self.spread <= STABILITY * self.half_spread
    }
}

fn min_max(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    })
}

/// `count` integers spread geometrically over `[lo, hi]`, deduplicated.
pub fn log_grid(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    let (a, b) = (libm::log(lo.max(1) as f64), libm::log(hi.max(1) as f64));
    let mut out: Vec<usize> = (0..count)
        .map(|i| {
            libm::round(libm::exp(
                a + (b - a) * i as f64 / (count.max(2) - 1) as f64,
            )) as usize
        })
        .collect();
    out.dedup();
    out
}

/// Points `s = 1 - 1/t` with `t` geometric over `[t_lo, t_hi]`.
pub fn s_grid(t_lo: f64, t_hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (libm::log(t_lo), libm::log(t_hi));
    (0..count)
        .map(|i| 1.0 - libm::exp(-(a + (b - a) * i as f64 / (count.max(2) - 1) as f64)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceReport {
    pub beta: f64,
    pub n_grid: Vec<usize>,
    pub s_grid: Vec<f64>,
    /// `sum_{k <= n} a_k / n^beta`.
    pub partial: RatioFamily,
    /// `A(s) (1 - s)^beta`.
    pub laplace: RatioFamily,
    pub consistent: bool,
}

// Second half of the grid in the scale variable is dropped for the half range.
fn half_mask(scale: &[f64]) -> Vec<bool> {
    let top = scale.iter().copied().fold(0.0, f64::max);
    scale.iter().map(|&x| x <= top / 2.0).collect()
}

fn check_half(mask: &[bool], what: &str) -> Result<(), TauberError> {
    if mask.iter().filter(|&&h| h).count() < 2 {
        return Err(TauberError::Invalid(alloc::format!(
            "{what} grid needs two points in its lower half"
        )));
    }
    Ok(())
}

/// Both sides of the weak Tauberian equivalence: partial sums against
/// `n^beta` and the power series against `(1 - s)^-beta`.
///
/// `A(s)` is summed over the stored values only, so every `s` must satisfy
/// `s^len < 1e-12`.
pub fn check_partial_sums_vs_laplace(
    a: &SequenceSpec,
    beta: f64,
    s_grid: &[f64],
    n_grid: &[usize],
) -> Result<LaplaceReport, TauberError> {
    if !(beta > 0.0) {
        return Err(TauberError::Invalid(alloc::format!(
            "beta must be positive, got {beta}"
        )));
    }
    if a.values.iter().all(|&v| v == 0.0) {
        return Err(TauberError::AllZero);
    }
    let len = a.len();
    if let Some(&n) = n_grid.iter().find(|&&n| n == 0 || n >= len) {
        return Err(TauberError::Invalid(alloc::format!(
            "n = {n} outside 1..{len}"
        )));
    }
    if let Some(&s) = s_grid
        .iter()
        .find(|&&s| !(0.0..1.0).contains(&s) || libm::pow(s, len as f64) >= 1e-12)
    {
        return Err(TauberError::Invalid(alloc::format!(
            "s = {s} needs more than {len} terms"
        )));
    }
    let n_mask = half_mask(&n_grid.iter().map(|&n| n as f64).collect::<Vec<_>>());
    let s_mask = half_mask(&s_grid.iter().map(|&s| 1.0 / (1.0 - s)).collect::<Vec<_>>());
    check_half(&n_mask, "n")?;
    check_half(&s_mask, "s")?;

    let mut prefix = Vec::with_capacity(len);
    let mut acc = crate::engine::Neumaier::new();
    for &v in &a.values {
        acc.add(v);
        prefix.push(acc.value());
    }
    let partial: Vec<f64> = n_grid
        .iter()
        .map(|&n| prefix[n] / libm::pow(n as f64, beta))
        .collect();
    let laplace: Vec<f64> = s_grid
        .iter()
        .map(|&s| {
            let mut acc = crate::engine::Neumaier::new();
            let mut p = 1.0;
            for &v in &a.values {
                acc.add(v * p);
                p *= s;
            }
            acc.value() * libm::pow(1.0 - s, beta)
        })
        .collect();
    let partial = RatioFamily::new(partial, &n_mask);
    let laplace = RatioFamily::new(laplace, &s_mask);
    let consistent = partial.stable() && laplace.stable();
    Ok(LaplaceReport {
        beta,
        n_grid: n_grid.to_vec(),
        s_grid: s_grid.to_vec(),
        partial,
        laplace,
        consistent,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneReport {
    pub beta: f64,
    pub n_grid: Vec<usize>,
    /// `sum_{1 <= k <= n} k b_k / n^beta`.
    pub hypothesis: RatioFamily,
    /// `b_n / n^(beta - 2)`.
    pub conclusion: RatioFamily,
    pub hypothesis_holds: bool,
    pub conclusion_holds: bool,
}

/// For non-increasing `b`: `sum k b_k ≍ n^beta` implies `b_n ≍ n^(beta - 2)`.
pub fn check_monotone_lemma(
    b: &SequenceSpec,
    beta: f64,
    n_grid: &[usize],
) -> Result<MonotoneReport, TauberError> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(TauberError::Invalid(alloc::format!(
            "beta must lie in (0, 1), got {beta}"
        )));
    }
    if let Some(i) = b.values.windows(2).position(|w| w[1] > w[0]) {
        return Err(TauberError::NotMonotone(i + 1));
    }
    let len = b.len();
    if let Some(&n) = n_grid.iter().find(|&&n| n == 0 || n >= len) {
        return Err(TauberError::Invalid(alloc::format!(
            "n = {n} outside 1..{len}"
        )));
    }
    let mask = half_mask(&n_grid.iter().map(|&n| n as f64).collect::<Vec<_>>());
    check_half(&mask, "n")?;
    let mut prefix = alloc::vec![0.0; len];
    let mut acc = crate::engine::Neumaier::new();
    for k in 1..len {
        acc.add(k as f64 * b.values[k]);
        prefix[k] = acc.value();
    }
    let hyp: Vec<f64> = n_grid
        .iter()
        .map(|&n| prefix[n] / libm::pow(n as f64, beta))
        .collect();
    let con: Vec<f64> = n_grid
        .iter()
        .map(|&n| b.values[n] / libm::pow(n as f64, beta - 2.0))
        .collect();
    let hypothesis = RatioFamily::new(hyp, &mask);
    let conclusion = RatioFamily::new(con, &mask);
    Ok(MonotoneReport {
        beta,
        n_grid: n_grid.to_vec(),
        hypothesis_holds: hypothesis.stable(),
        conclusion_holds: conclusion.stable(),
        hypothesis,
        conclusion,
    })
}

/// Power-law fit of `q_n R^n ≍ n^-alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    pub alpha: f64,
    pub intercept: f64,
    pub window: (usize, usize),
    pub period: usize,
    pub points: usize,
    /// RMS of the fit in log scale.
    pub residual: f64,
    pub r_hat: f64,
    /// Coefficient of `n` when it is added to the fit. A wrong `R` by a
    /// factor `rho` shows up here as about `log rho`.
    pub trend: f64,
    /// Exponent of the fit with the linear term.
    pub trend_alpha: f64,
}

impl ExponentFit {
    /// `R exp(-trend)`: the radius for which the linear term vanishes.
    pub fn trend_radius(&self) -> f64 {
        self.r_hat * libm::exp(-self.trend)
    }

    /// Whether the trend is within `rel` of zero in units of `log R`.
    pub fn trend_consistent(&self, rel: f64) -> bool {
        libm::fabs(self.trend) <= rel
    }
}

/// Least squares of `log(q_n R^n)` on `log n` over the window, restricted
/// to `n ≡ 0 mod period`.
pub fn fit_llt_exponent(
    q: &SequenceSpec,
    r_hat: f64,
    window: (usize, usize),
    period: usize,
) -> Result<ExponentFit, TauberError> {
    if !(r_hat > 0.0 && r_hat.is_finite()) || period == 0 {
        return Err(TauberError::Invalid(alloc::format!(
            "need R > 0 and period >= 1, got {r_hat} and {period}"
        )));
    }
    let hi = window.1.min(q.len().saturating_sub(1));
    let pts: Vec<(f64, f64, f64)> = (window.0.max(1)..=hi)
        .filter(|n| n % period == 0 && q.values[*n] > 0.0)
        .map(|n| {
            (
                n as f64,
                libm::log(n as f64),
                libm::log(q.values[n]) + n as f64 * libm::log(r_hat),
            )
        })
        .collect();
    if pts.len() < 4 {
        return Err(TauberError::Window(pts.len()));
    }
    let (slope, intercept) = linear_fit(&pts.iter().map(|p| (p.1, p.2)).collect::<Vec<_>>());
    let rss: f64 = pts
        .iter()
        .map(|p| p.2 - intercept - slope * p.1)
        .map(|d| d * d)
        .sum();
    let residual = libm::sqrt(rss / pts.len() as f64);
    let (trend_alpha, trend) = two_term_fit(&pts);
    Ok(ExponentFit {
        alpha: -slope,
        intercept,
        window: (window.0, hi),
        period,
        points: pts.len(),
        residual,
        r_hat,
        trend,
        trend_alpha,
    })
}

// (slope, intercept) of y on x.
fn linear_fit(p: &[(f64, f64)]) -> (f64, f64) {
    let n = p.len() as f64;
    let mx = p.iter().map(|q| q.0).sum::<f64>() / n;
    let my = p.iter().map(|q| q.1).sum::<f64>() / n;
    let sxy: f64 = p.iter().map(|q| (q.0 - mx) * (q.1 - my)).sum();
    let sxx: f64 = p.iter().map(|q| (q.0 - mx) * (q.0 - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

// y = c - alpha log n + tau n; returns (alpha, tau).
fn two_term_fit(p: &[(f64, f64, f64)]) -> (f64, f64) {
    let k = p.len() as f64;
    let m = |f: &dyn Fn(&(f64, f64, f64)) -> f64| p.iter().map(f).sum::<f64>() / k;
    let (mn, ml, my) = (m(&|q| q.0), m(&|q| q.1), m(&|q| q.2));
    let snn = m(&|q| (q.0 - mn) * (q.0 - mn));
    let sll = m(&|q| (q.1 - ml) * (q.1 - ml));
    let snl = m(&|q| (q.0 - mn) * (q.1 - ml));
    let sny = m(&|q| (q.0 - mn) * (q.2 - my));
    let sly = m(&|q| (q.1 - ml) * (q.2 - my));
    let det = snn * sll - snl * snl;
    let tau = (sll * sny - snl * sly) / det;
    let b = (snn * sly - snl * sny) / det;
    (-b, tau)
}
