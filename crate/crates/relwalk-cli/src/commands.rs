//! One function per subcommand. Each writes its files into the output
//! directory and records resolved values for the manifest.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relwalk::ancona::{ancona_ratio_audit, audit_tolerance, triangle_audit, AnconaError, Triple};
use relwalk::automaton::{
    build_g0, cone_types, default_c, refine_g1, AutomatonGraph, StructureReport,
};
use relwalk::engine::ball_size;
use relwalk::green::{
    cauchy_sums_with, estimate_from_returns, GreenError, GreenField, GreenFunction, GreenSeries,
    SpectralRadiusEstimate, Truncation,
};
use relwalk::measures::{return_sequence_with, validate_with, MeasureError, ReturnSequence};
use relwalk::parabolic::{
    classify, equadiff_ratio, ClassifyBudget, FactorizedGreen, ParabolicError, ParabolicModel,
};
use relwalk::tauberian::{
    check_monotone_lemma, check_partial_sums_vs_laplace, fit_llt_exponent, log_grid, s_grid,
    RatioFamily, SequenceSpec, TREND_TOLERANCE,
};
use relwalk::{FactorElement, GroupElement, GroupSpec, Measure};
use serde_json::{json, Map, Value};

use crate::config::ExperimentConfig;
use crate::exec::Threaded;
use crate::output::{jnum, jnums, num, OutDir};

#[derive(Debug)]
pub enum CliError {
    /// Malformed config, bad flags or a measure outside a command's hypotheses.
    Validation(String),
    /// Memory cap reached; partial results are on disk.
    Budget(String),
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Budget(_) => 2,
            _ => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(s) | CliError::Budget(s) | CliError::Failed(s) => s,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        match e {
            MeasureError::Budget { .. } => CliError::Budget(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<GreenError> for CliError {
    fn from(e: GreenError) -> Self {
        match e {
            GreenError::Measure(m) => m.into(),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<ParabolicError> for CliError {
    fn from(e: ParabolicError) -> Self {
        match e {
            ParabolicError::Measure(m) => m.into(),
            ParabolicError::Green(g) => g.into(),
            ParabolicError::Inadmissible(s) => CliError::Validation(s),
        }
    }
}

impl From<AnconaError> for CliError {
    fn from(e: AnconaError) -> Self {
        match e {
            AnconaError::Measure(m) => m.into(),
            AnconaError::Green(g) => g.into(),
            AnconaError::Hypothesis(_) => CliError::Validation(e.to_string()),
        }
    }
}

pub struct Context<'a> {
    pub cfg: &'a ExperimentConfig,
    pub measure: Measure,
    pub exec: Threaded,
    pub out: &'a mut OutDir,
    pub export_dot: bool,
    pub sequence: Option<PathBuf>,
    pub beta: Option<f64>,
    /// Resolved values for the manifest.
    pub notes: Map<String, Value>,
}

impl Context<'_> {
    fn spec(&self) -> &GroupSpec {
        self.measure.group()
    }

    fn float(&self) -> Measure {
        self.measure.to_float()
    }

    /// `q_0..q_{n_max}`; on budget exhaustion the completed prefix is
    /// written before failing.
    fn returns(&mut self) -> Result<ReturnSequence, CliError> {
        let b = &self.cfg.budgets;
        match return_sequence_with(&self.measure, b.n_max, b.memory(), &self.exec) {
            Ok(seq) => {
                write_returns(self.out, &seq)?;
                Ok(seq)
            }
            Err(MeasureError::Budget {
                largest_completed,
                partial,
            }) => {
                if let Some(p) = &partial {
                    write_returns(self.out, p)?;
                }
                Err(CliError::Budget(format!(
                    "memory cap reached; returns complete up to n = {largest_completed}"
                )))
            }
            Err(e) => Err(e.into()),
        }
    }

    fn radius(&mut self, seq: &ReturnSequence) -> Result<SpectralRadiusEstimate, CliError> {
        let est = estimate_from_returns(&seq.values, self.measure.is_symmetric())?;
        self.notes.insert("r_hat".into(), jnum(est.r_hat()));
        let resolved: Vec<f64> = self.cfg.r_grid.iter().map(|f| f * est.r_hat()).collect();
        self.notes
            .insert("r_grid_resolved".into(), jnums(&resolved));
        Ok(est)
    }
}

fn write_returns(out: &mut OutDir, seq: &ReturnSequence) -> std::io::Result<()> {
    let rows: Vec<Vec<String>> = seq
        .values
        .iter()
        .enumerate()
        .map(|(n, q)| {
            let exact = seq
                .exact
                .as_ref()
                .map_or(String::new(), |e| e[n].to_string());
            vec![n.to_string(), exact, num(*q)]
        })
        .collect();
    out.csv("returns.csv", &["n", "q_exact", "q"], &rows)
}

fn family(f: &RatioFamily) -> Value {
    json!({
        "min": jnum(f.min),
        "max": jnum(f.max),
        "spread": jnum(f.spread),
        "half_spread": jnum(f.half_spread),
        "stable": f.stable(),
    })
}

pub fn validate(ctx: &mut Context) -> Result<(), CliError> {
    let r = validate_with(&ctx.measure, 4, &ctx.exec)?;
    let v = json!({
        "symmetric": r.symmetric,
        "aperiodic": r.is_aperiodic(),
        "period": r.period(),
        "admissible_to_depth": r.admissible_to_depth,
        "support_radius": r.support_radius,
        "adapted": ctx.measure.is_adapted(),
        "factors": ctx.spec().n_factors(),
        "support": ctx.measure.support().iter().map(|g| g.to_string()).collect::<Vec<_>>(),
    });
    ctx.out.json("walk_report.json", &v)?;
    Ok(())
}

pub fn radius(ctx: &mut Context) -> Result<(), CliError> {
    let seq = ctx.returns()?;
    let est = ctx.radius(&seq)?;
    let monotone = est.diagnostics.windows(2).all(|w| w[1] >= w[0]);
    let v = json!({
        "n_max": est.n_max,
        "certified_upper": jnum(est.certified_upper),
        "point": est.point.map(jnum),
        "r_hat": jnum(est.r_hat()),
        "inverse": jnum(est.inverse()),
        "spread": jnum(est.spread()),
        "fekete": jnums(&est.diagnostics),
        "fekete_non_decreasing": monotone,
        "extrapolations": jnums(&est.extrapolations),
    });
    ctx.out.json("radius.json", &v)?;
    Ok(())
}

pub fn green(ctx: &mut Context) -> Result<(), CliError> {
    let seq = ctx.returns()?;
    let r_hat = ctx.radius(&seq)?.r_hat();
    let series = GreenSeries::new(seq.values.clone());
    let mut rows = Vec::new();
    for &f in &ctx.cfg.r_grid {
        let r = f * r_hat;
        let cap = Some(f);
        let g = series.value(r, cap);
        let d1 = series.derivative(r, 1, cap);
        let d2 = series.derivative(r, 2, cap);
        rows.push(vec![
            num(f),
            num(r),
            num(g.value),
            num(g.tail),
            num(d1.value),
            num(d1.tail),
            num(d2.value),
            num(d2.tail),
            g.reliable.to_string(),
        ]);
    }
    ctx.out.csv(
        "green.csv",
        &[
            "r_fraction",
            "r",
            "g",
            "g_tail",
            "g1",
            "g1_tail",
            "g2",
            "g2_tail",
            "reliable",
        ],
        &rows,
    )?;
    Ok(())
}

pub fn identities(ctx: &mut Context) -> Result<(), CliError> {
    let seq = ctx.returns()?;
    let r_hat = ctx.radius(&seq)?.r_hat();
    let b = &ctx.cfg.budgets;
    let t = Truncation::new(b.truncation.0, b.truncation.1);
    let sums = cauchy_sums_with(&ctx.float(), 3, b.series_order, t, b.memory(), &ctx.exec)?;
    let mut rows = Vec::new();
    for &f in &ctx.cfg.r_grid {
        let r = f * r_hat;
        for (name, res) in [
            ("first-derivative", sums.lemma_first_derivative(r)),
            ("f2", sums.fk_identity(2, r)),
            ("f3", sums.fk_identity(3, r)),
        ] {
            rows.push(vec![
                num(f),
                num(r),
                name.into(),
                num(res.lhs),
                num(res.rhs),
                num(res.residual),
            ]);
        }
    }
    ctx.out.csv(
        "identities.csv",
        &["r_fraction", "r", "identity", "lhs", "rhs", "residual"],
        &rows,
    )?;
    Ok(())
}

pub fn parabolic(ctx: &mut Context) -> Result<(), CliError> {
    let seq = ctx.returns()?;
    let r_hat = ctx.radius(&seq)?.r_hat();
    let m = ctx.float();
    let b = ctx.cfg.budgets.clone();
    let model = ParabolicModel::new(&m, b.parabolic(), &ctx.exec)?;
    let n = ctx.spec().n_factors() as u16;
    let mut rows = Vec::new();
    let mut at_radius = Vec::new();
    let killed_radius = check_radius(ctx.spec(), b.exploration + 2);
    for &f in &ctx.cfg.r_grid {
        let r = f * r_hat;
        let field = GreenField::killed(&m, r, killed_radius, 1e-15, 20_000, b.memory(), &ctx.exec)?;
        for k in 1..=n {
            let d = model.derivatives(k, r);
            let rad = model.radius(k, r, 400);
            let lemma = model.factor_green(k, r, 1.0).at_identity();
            rows.push(vec![
                num(f),
                num(r),
                k.to_string(),
                num(model.kernel(k, r).total_mass()),
                num(rad.point),
                num(rad.mass_bound),
                num(d.g),
                num(d.g1),
                num(d.g2),
                num(d.parabolic2),
                num(lemma),
                num(field.at_identity()),
                num((lemma - field.at_identity()).abs()),
            ]);
        }
    }
    for k in 1..=n {
        let rad = model.radius(k, r_hat, 400);
        at_radius.push(
            json!({"factor": k, "point": jnum(rad.point), "mass_bound": jnum(rad.mass_bound)}),
        );
    }
    ctx.out.csv(
        "parabolic.csv",
        &[
            "r_fraction",
            "r",
            "factor",
            "kernel_mass",
            "radius",
            "mass_bound",
            "g",
            "g1",
            "g2",
            "g2_parabolic",
            "parabolic_green_at_1",
            "green_killed",
            "identity_residual",
        ],
        &rows,
    )?;
    let grid: Vec<f64> = (0..10).map(|i| (0.5 + 0.05 * i as f64) * r_hat).collect();
    let eq = equadiff_ratio(&model, &grid);
    let eq_rows: Vec<Vec<String>> = eq
        .rows
        .iter()
        .map(|row| {
            vec![
                num(row.r / r_hat),
                num(row.r),
                num(row.g1),
                num(row.g2),
                num(row.lhs),
                num(row.rhs),
                num(row.ratio),
            ]
        })
        .collect();
    ctx.out.csv(
        "equadiff.csv",
        &["r_fraction", "r", "g1", "g2", "lhs", "rhs", "ratio"],
        &eq_rows,
    )?;
    let mut sphere = Vec::new();
    let mut spreads = Vec::new();
    for &f in &ctx.cfg.r_grid {
        if let Some(fg) = model.factorized(f * r_hat) {
            let t = fg.sphere_sums(6, 6);
            for (mm, u) in t.u.iter().enumerate() {
                sphere.push(vec![num(f), num(t.r), mm.to_string(), num(*u)]);
            }
            spreads.push(json!({"r_fraction": jnum(f), "spread": jnum(t.spread(1, 6))}));
        }
    }
    if !sphere.is_empty() {
        ctx.out
            .csv("sphere.csv", &["r_fraction", "r", "m", "u"], &sphere)?;
    }
    let v = json!({
        "r_hat": jnum(r_hat),
        "killed_radius": killed_radius,
        "radius_at_r_hat": at_radius,
        "equadiff_band": jnum(eq.band()),
        "sphere_spreads": spreads,
        "adapted": m.is_adapted(),
    });
    ctx.out.json("parabolic.json", &v)?;
    Ok(())
}

/// Most nodes in a killed-walk ball used as a cross-check.
const CHECK_NODES: u128 = 1 << 22;

/// Largest radius up to `want` whose word ball stays under [`CHECK_NODES`].
fn check_radius(spec: &GroupSpec, want: u32) -> u32 {
    (1..=want)
        .rev()
        .find(|&r| ball_size(spec, r) <= CHECK_NODES)
        .unwrap_or(1)
}

pub fn classify_cmd(ctx: &mut Context) -> Result<(), CliError> {
    let seq = ctx.returns()?;
    let r_hat = ctx.radius(&seq)?.r_hat();
    let budget = ClassifyBudget {
        parabolic: ctx.cfg.budgets.parabolic(),
        ..ClassifyBudget::default()
    };
    let c = classify(&ctx.float(), &seq.values, r_hat, &budget, &ctx.exec)?;
    let factors: Vec<Value> = c
        .factors
        .iter()
        .map(|f| {
            json!({
                "factor": f.factor,
                "radius": jnum(f.radius.point),
                "mass_bound": jnum(f.radius.mass_bound),
                "degenerate": format!("{:?}", f.degenerate),
                "moments": {
                    "b": f.moments.b,
                    "sums": jnums(&f.moments.sums),
                    "increments": jnums(&f.moments.increments),
                    "verdict": format!("{:?}", f.moments.verdict),
                },
            })
        })
        .collect();
    let v = json!({
        "r_hat": jnum(c.r_hat),
        "divergent": format!("{:?}", c.divergent),
        "positive_recurrent": format!("{:?}", c.positive_recurrent),
        "divergence": {
            "r": jnums(&c.divergence.r),
            "derivative": jnums(&c.divergence.derivative),
            "slope": jnum(c.divergence.slope),
        },
        "factors": factors,
        "warnings": c.warnings,
    });
    ctx.out.json("classification.json", &v)?;
    Ok(())
}

pub fn llt(ctx: &mut Context) -> Result<(), CliError> {
    let seq = ctx.returns()?;
    let est = ctx.radius(&seq)?;
    let period = validate_with(&ctx.measure, 4, &ctx.exec)?.period() as usize;
    let q = SequenceSpec::new(seq.values.clone(), "return probabilities")
        .map_err(|e| CliError::Failed(e.to_string()))?;
    let fit = fit_llt_exponent(&q, est.r_hat(), ctx.cfg.budgets.window(), period)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let v = json!({
        "alpha": jnum(fit.alpha),
        "intercept": jnum(fit.intercept),
        "window": [fit.window.0, fit.window.1],
        "period": fit.period,
        "points": fit.points,
        "residual": jnum(fit.residual),
        "r_hat": jnum(fit.r_hat),
        "r_hat_spread": jnum(est.spread()),
        "trend": jnum(fit.trend),
        "trend_alpha": jnum(fit.trend_alpha),
        "trend_radius": jnum(fit.trend_radius()),
        "trend_tolerance": jnum(TREND_TOLERANCE),
        "trend_consistent": fit.trend_consistent(TREND_TOLERANCE),
    });
    ctx.out.json("exponent_fit.json", &v)?;
    Ok(())
}

fn structure_json(g: &AutomatonGraph, r: &StructureReport) -> Value {
    let seqs = |v: &[Vec<FactorElement>]| -> Vec<String> {
        v.iter()
            .map(|s| {
                s.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    };
    json!({
        "vertices": g.vertices.len(),
        "bundles": g.bundles.len(),
        "complete": g.complete,
        "nonempty_psets": g.vertices.iter().filter(|v| v.pset.as_ref().is_some_and(|p| !p.is_empty())).count(),
        "passed": r.passed(),
        "no_edge_into_start": r.no_edge_into_start(),
        "all_reachable": r.all_reachable(),
        "geodesic": r.geodesic(),
        "bijective": r.bijective(),
        "entering_start": r.entering_start,
        "unreachable": r.unreachable,
        "non_geodesic": seqs(&r.non_geodesic),
        "non_geodesic_count": r.non_geodesic_count,
        "accepted": r.accepted.to_string(),
        "ball": r.ball.to_string(),
        "duplicates": r.duplicates.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        "duplicate_count": r.duplicate_count,
        "outside": r.outside,
        "missing": r.missing.to_string(),
    })
}

pub fn automaton(ctx: &mut Context) -> Result<(), CliError> {
    let (m, b) = ctx.cfg.budgets.automaton;
    let c = ctx
        .cfg
        .budgets
        .cone_radius
        .unwrap_or_else(|| default_c(&ctx.measure));
    let types = cone_types(ctx.spec(), m, b, c).map_err(|e| CliError::Validation(e.to_string()))?;
    let g0 = build_g0(&types);
    let g1 = refine_g1(&g0, c).map_err(|e| CliError::Validation(e.to_string()))?;
    let list: Vec<Value> = types
        .types
        .iter()
        .map(|t| {
            json!({
                "index": t.index,
                "representative": t.representative.to_string(),
                "members": t.members,
                "fingerprints": t.fingerprints,
            })
        })
        .collect();
    ctx.out.json(
        "cone_types.json",
        &json!({
            "m": m, "b": b, "c": c,
            "count": types.len(),
            "fingerprint_classes": types.fingerprint_classes,
            "sound": types.sound,
            "types": list,
        }),
    )?;
    let r0 = g0.verify_structure(m, b);
    let r1 = g1.verify_structure(m, b);
    ctx.out.json(
        "structure.json",
        &json!({"g0": structure_json(&g0, &r0), "g1": structure_json(&g1, &r1)}),
    )?;
    let mut text = String::new();
    for seq in g1.language(m, b) {
        if seq.is_empty() {
            text.push('e');
        }
        text.push_str(
            &seq.iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join("\t"),
        );
        text.push('\n');
    }
    ctx.out.text("language.tsv", &text)?;
    if ctx.export_dot {
        ctx.out.text(
            "g0.dot",
            &g0.export_dot()
                .map_err(|e| CliError::Failed(e.to_string()))?,
        )?;
        ctx.out.text(
            "g1.dot",
            &g1.export_dot()
                .map_err(|e| CliError::Failed(e.to_string()))?,
        )?;
    }
    Ok(())
}

/// Green function from the factor decomposition when the measure is
/// adapted, otherwise from the killed walk on a word ball.
#[derive(Clone)]
enum AnyGreen {
    Factorized(Box<FactorizedGreen>),
    Field(Box<GreenField>),
}

impl GreenFunction for AnyGreen {
    fn group(&self) -> &GroupSpec {
        match self {
            AnyGreen::Factorized(g) => g.group(),
            AnyGreen::Field(g) => g.group(),
        }
    }

    fn r(&self) -> f64 {
        match self {
            AnyGreen::Factorized(g) => g.r(),
            AnyGreen::Field(g) => g.r(),
        }
    }

    fn from_identity(&self, x: &GroupElement) -> Option<f64> {
        match self {
            AnyGreen::Factorized(g) => g.from_identity(x),
            AnyGreen::Field(g) => g.from_identity(x),
        }
    }
}

fn sample<T: Clone>(rng: &mut ChaCha8Rng, pool: &[T]) -> T {
    pool[rng.gen_range(0..pool.len())].clone()
}

pub fn ancona(ctx: &mut Context) -> Result<(), CliError> {
    let seq = ctx.returns()?;
    let r_hat = ctx.radius(&seq)?.r_hat();
    let m = ctx.float();
    let b = ctx.cfg.budgets.clone();
    let mut coarse_budget = b.parabolic();
    coarse_budget.horizon /= 2;
    coarse_budget.exploration = coarse_budget.exploration.saturating_sub(2).max(2);
    let (fine, coarse) = if m.is_adapted() {
        (
            Some(ParabolicModel::new(&m, b.parabolic(), &ctx.exec)?),
            Some(ParabolicModel::new(&m, coarse_budget, &ctx.exec)?),
        )
    } else {
        (None, None)
    };
    let make = |r: f64,
                model: &Option<ParabolicModel<'_, Threaded>>,
                radius: u32|
     -> Result<AnyGreen, CliError> {
        Ok(match model {
            Some(model) => AnyGreen::Factorized(Box::new(model.factorized(r).expect("adapted"))),
            None => AnyGreen::Field(Box::new(GreenField::killed(
                &m,
                r,
                radius,
                1e-15,
                20_000,
                b.memory(),
                &ctx.exec,
            )?)),
        })
    };
    let spec = ctx.spec().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(b.seed);
    let ball: Vec<GroupElement> = spec
        .enumerate_ball(b.ancona_ball.0, b.ancona_ball.1)
        .collect();
    let triples: Vec<Triple> = (0..b.samples)
        .map(|_| {
            (
                sample(&mut rng, &ball),
                sample(&mut rng, &ball),
                sample(&mut rng, &ball),
            )
        })
        .collect();
    let pair_ball: Vec<GroupElement> = spec
        .enumerate_ball(b.ancona_ball.0, b.ancona_ball.1.min(2))
        .collect();
    let pairs: Vec<(GroupElement, GroupElement)> = (0..b.samples)
        .map(|_| (sample(&mut rng, &pair_ball), sample(&mut rng, &pair_ball)))
        .collect();

    let mut greens = Vec::new();
    let mut audits = Vec::new();
    let mut eps_max: f64 = 0.0;
    for &f in &ctx.cfg.r_grid {
        let r = f * r_hat;
        let g = make(r, &fine, b.exploration)?;
        let c = make(r, &coarse, b.exploration.saturating_sub(2).max(2))?;
        let eps = audit_tolerance(&g, &c, &triples);
        eps_max = eps_max.max(eps);
        let a = triangle_audit(&g, &triples, eps);
        audits.push(json!({
            "r_fraction": jnum(f),
            "r": jnum(r),
            "eps": jnum(eps),
            "checked": a.checked,
            "skipped": a.skipped,
            "worst_slack": jnum(a.worst_slack),
            "worst_relative": jnum(a.worst_relative),
            "worst": a.worst.map(|t| [t.0.to_string(), t.1.to_string(), t.2.to_string()]),
            "violations": a.violations,
        }));
        greens.push(g);
    }
    let report = ancona_ratio_audit(&m, &greens, &pairs, eps_max)?;
    let rows: Vec<Vec<String>> = report
        .entries
        .iter()
        .map(|e| {
            vec![
                e.x.to_string(),
                e.y.to_string(),
                e.z.to_string(),
                num(e.r),
                num(e.ratio),
            ]
        })
        .collect();
    ctx.out
        .csv("ancona.csv", &["x", "y", "z", "r", "ratio"], &rows)?;
    let per_r: Vec<Value> = report
        .per_r
        .iter()
        .map(|s| json!({"r": jnum(s.r), "count": s.count, "min": jnum(s.min), "max": jnum(s.max), "lower_bound": jnum(s.lower_bound)}))
        .collect();
    ctx.out.json(
        "ancona.json",
        &json!({
            "triangle": audits,
            "ratios": {
                "per_r": per_r,
                "min": jnum(report.min),
                "max": jnum(report.max),
                "lower_violations": report.lower_violations,
                "skipped": report.skipped,
            },
        }),
    )?;
    Ok(())
}

const TAUBER_LEN: usize = 200_000;

fn read_sequence(path: &PathBuf) -> Result<SequenceSpec, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Validation(e.to_string()))?;
    let mut values = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Validation(e.to_string()))?;
        let n: usize = rec
            .get(0)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| {
                CliError::Validation(format!("{}: row {}: bad index", path.display(), i + 2))
            })?;
        let v: f64 = rec
            .get(1)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| {
                CliError::Validation(format!("{}: row {}: bad value", path.display(), i + 2))
            })?;
        if n != values.len() {
            return Err(CliError::Validation(format!(
                "{}: row {}: expected n = {}",
                path.display(),
                i + 2,
                values.len()
            )));
        }
        values.push(v);
    }
    SequenceSpec::new(values, path.display().to_string())
        .map_err(|e| CliError::Validation(e.to_string()))
}

pub fn tauber(ctx: &mut Context) -> Result<(), CliError> {
    let laplace = |a: &SequenceSpec, beta: f64| -> Result<Value, CliError> {
        let len = a.len();
        let t_hi = (len as f64 / 28.0).min(4000.0);
        let n_hi = (len / 5).min(40_000);
        let r =
            check_partial_sums_vs_laplace(a, beta, &s_grid(4.0, t_hi, 24), &log_grid(4, n_hi, 24))
                .map_err(|e| CliError::Validation(e.to_string()))?;
        Ok(json!({
            "sequence": a.note,
            "beta": jnum(beta),
            "partial": family(&r.partial),
            "laplace": family(&r.laplace),
            "consistent": r.consistent,
        }))
    };
    let mut out = Map::new();
    if let Some(path) = ctx.sequence.clone() {
        let beta = ctx
            .beta
            .ok_or_else(|| CliError::Validation("--beta is required with --sequence".into()))?;
        out.insert("input".into(), laplace(&read_sequence(&path)?, beta)?);
    } else {
        let fam = |f: fn(usize) -> f64, note: &str| {
            SequenceSpec::from_fn(TAUBER_LEN, f, note).expect("non-negative")
        };
        let checks = vec![
            laplace(&fam(|_| 1.0, "constant"), 1.0)?,
            laplace(&fam(|n| n as f64 + 1.0, "linear"), 2.0)?,
            laplace(&fam(|n| ((n + 1) as f64).sqrt(), "square-root"), 1.5)?,
        ];
        out.insert("families".into(), Value::Array(checks));
        let mut lemma = Vec::new();
        let n_grid = log_grid(4, 40_000, 24);
        for beta in [0.25, 0.5, 0.75] {
            let b = SequenceSpec::from_fn(
                TAUBER_LEN,
                |n| ((n + 1) as f64).powf(beta - 2.0),
                format!("(n+1)^({beta}-2)"),
            )
            .expect("non-negative");
            let r = check_monotone_lemma(&b, beta, &n_grid)
                .map_err(|e| CliError::Failed(e.to_string()))?;
            lemma.push(json!({
                "beta": jnum(beta),
                "hypothesis": family(&r.hypothesis),
                "conclusion": family(&r.conclusion),
                "hypothesis_holds": r.hypothesis_holds,
                "conclusion_holds": r.conclusion_holds,
            }));
        }
        out.insert("monotone_lemma".into(), Value::Array(lemma));
        let geometric =
            SequenceSpec::from_fn(TAUBER_LEN, |n| 0.5f64.powi(n.min(2000) as i32), "2^-n")
                .expect("non-negative");
        let r = check_monotone_lemma(&geometric, 0.5, &n_grid)
            .map_err(|e| CliError::Failed(e.to_string()))?;
        out.insert(
            "geometric_hypothesis_holds".into(),
            Value::Bool(r.hypothesis_holds),
        );
        let rising = SequenceSpec::from_fn(1000, |n| n as f64, "n").expect("non-negative");
        let rejected = check_monotone_lemma(&rising, 0.5, &log_grid(4, 500, 8))
            .err()
            .map(|e| e.to_string());
        out.insert("increasing_rejected".into(), json!(rejected));
    }
    ctx.out.json("tauber.json", &Value::Object(out))?;
    Ok(())
}
