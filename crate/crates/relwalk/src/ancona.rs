//! Audits of the triangle bound `G(x,y) G(y,z) <= G(e,e) G(x,z)` and of the
//! ratios `G(x,z) / (G(x,y) G(y,z))` along relative geodesics.

use alloc::string::String;
use alloc::vec::Vec;

use crate::freeprod::{relative_geodesic, GroupElement};
use crate::green::{GreenError, GreenFunction};
use crate::measures::{validate, Measure, MeasureError};

#[derive(Debug, thiserror::Error)]
pub enum AnconaError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Green(#[from] GreenError),
    #[error("measure is not {0}")]
    Hypothesis(String),
}

pub type Triple = (GroupElement, GroupElement, GroupElement);

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleAudit {
    pub r: f64,
    pub eps: f64,
    pub checked: usize,
    /// Triples with an element the Green function does not cover.
    pub skipped: usize,
    /// Largest `G(x,y) G(y,z) - G(e,e) G(x,z)`.
    pub worst_slack: f64,
    /// Largest slack relative to `G(e,e) G(x,z)`.
    pub worst_relative: f64,
    pub worst: Option<Triple>,
    pub violations: usize,
}

impl TriangleAudit {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Relative accuracy floor of computed Green values, added to `eps` per
/// triple; factor series stop at relative tolerances near `1e-13`.
pub const RELATIVE_FLOOR: f64 = 1e-12;

/// Checks every triple; a slack above `eps` plus the relative floor counts
/// as a violation.
pub fn triangle_audit<G: GreenFunction + ?Sized>(
    g: &G,
    triples: &[Triple],
    eps: f64,
) -> TriangleAudit {
    let gee = g.at_identity();
    let mut out = TriangleAudit {
        r: g.r(),
        eps,
        checked: 0,
        skipped: 0,
        worst_slack: f64::NEG_INFINITY,
        worst_relative: f64::NEG_INFINITY,
        worst: None,
        violations: 0,
    };
    for t in triples {
        let (Some(xy), Some(yz), Some(xz)) = (
            g.green(&t.0, &t.1),
            g.green(&t.1, &t.2),
            g.green(&t.0, &t.2),
        ) else {
            out.skipped += 1;
            continue;
        };
        out.checked += 1;
        let bound = gee * xz;
        let slack = xy * yz - bound;
        if slack > out.worst_slack {
            out.worst_slack = slack;
            out.worst = Some(t.clone());
        }
        out.worst_relative = out.worst_relative.max(slack / bound);
        if slack > eps + RELATIVE_FLOOR * (xy * yz + bound) {
            out.violations += 1;
        }
    }
    out
}

/// `eps` for an audit: the largest change of either side of the bound
/// between two approximations of the same Green function.
pub fn audit_tolerance<A, B>(fine: &A, coarse: &B, triples: &[Triple]) -> f64
where
    A: GreenFunction + ?Sized,
    B: GreenFunction + ?Sized,
{
    let side = |g: &dyn Fn(&GroupElement, &GroupElement) -> Option<f64>, e: f64, t: &Triple| {
        Some((g(&t.0, &t.1)? * g(&t.1, &t.2)?, e * g(&t.0, &t.2)?))
    };
    let (ef, ec) = (fine.at_identity(), coarse.at_identity());
    let mut eps: f64 = 0.0;
    for t in triples {
        if let (Some(a), Some(b)) = (
            side(&|x, y| fine.green(x, y), ef, t),
            side(&|x, y| coarse.green(x, y), ec, t),
        ) {
            eps = eps.max(libm::fabs(a.0 - b.0) + libm::fabs(a.1 - b.1));
        }
    }
    eps
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnconaEntry {
    pub x: GroupElement,
    pub y: GroupElement,
    pub z: GroupElement,
    pub r: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioSummary {
    pub r: f64,
    pub count: usize,
    pub min: f64,
    pub max: f64,
    /// `1 / G(e,e|r)`, the triangle lower bound for every ratio.
    pub lower_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnconaReport {
    pub r_grid: Vec<f64>,
    pub entries: Vec<AnconaEntry>,
    pub per_r: Vec<RatioSummary>,
    pub min: f64,
    pub max: f64,
    /// Ratios below `1 / G(e,e) - eps`.
    pub lower_violations: usize,
    pub skipped: usize,
}

/// Ratios for every pair and every interior vertex `y` of the relative
/// geodesic from `x` to `z`, once per Green function (one per `r`).
pub fn ancona_ratio_audit<G: GreenFunction>(
    m: &Measure,
    greens: &[G],
    pairs: &[(GroupElement, GroupElement)],
    eps: f64,
) -> Result<AnconaReport, AnconaError> {
    if !m.is_symmetric() {
        return Err(AnconaError::Hypothesis("symmetric".into()));
    }
    if validate(m, 2)?.admissible_to_depth < 1 {
        return Err(AnconaError::Hypothesis("admissible".into()));
    }
    let mut report = AnconaReport {
        r_grid: greens.iter().map(|g| g.r()).collect(),
        entries: Vec::new(),
        per_r: Vec::new(),
        min: f64::INFINITY,
        max: 0.0,
        lower_violations: 0,
        skipped: 0,
    };
    for g in greens {
        let lower_bound = 1.0 / g.at_identity();
        let mut summary = RatioSummary {
            r: g.r(),
            count: 0,
            min: f64::INFINITY,
            max: 0.0,
            lower_bound,
        };
        for (x, z) in pairs {
            let path = relative_geodesic(m.group(), x, z).map_err(MeasureError::from)?;
            let n = path.vertices.len();
            for y in path.vertices.iter().take(n.saturating_sub(1)).skip(1) {
                let (Some(xz), Some(xy), Some(yz)) = (g.green(x, z), g.green(x, y), g.green(y, z))
                else {
                    report.skipped += 1;
                    continue;
                };
                let ratio = xz / (xy * yz);
                if ratio < lower_bound - eps {
                    report.lower_violations += 1;
                }
                summary.count += 1;
                summary.min = summary.min.min(ratio);
                summary.max = summary.max.max(ratio);
                report.entries.push(AnconaEntry {
                    x: x.clone(),
                    y: y.clone(),
                    z: z.clone(),
                    r: g.r(),
                    ratio,
                });
            }
        }
        report.min = report.min.min(summary.min);
        report.max = report.max.max(summary.max);
        report.per_r.push(summary);
    }
    Ok(report)
}
