use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use serde::Serialize;

use hyptype_core::audit::{lipschitz_audit, metric_axiom_audit, AuditReport};
use hyptype_core::gromov::{self, delta_estimate, multiplicative_four_point_check, DeltaEstimate};
use hyptype_core::qc::{default_probes, dilatation_profile, DilatationProfile, WeightField};
use hyptype_core::sampling::binomial;
use hyptype_core::spaces::{build, BuiltSpace, SpaceKind, SpaceSpec, WeightSpec};
use hyptype_core::{
    bound_lower_global, bound_upper_near, comparison_functional, invert_distance_bound, rho,
    rho_unchecked, MetricFamily, SearchMode, Variant, TOL_ABS,
};

use crate::args::{
    CounterexampleArgs, DilatationArgs, EvalArgs, FamilyArg, FamilyArgs, Format, ModeArg,
    SpaceArgs, VariantArg,
};
use crate::counterexample::{search, SearchOutcome};
use crate::grid::{parse_grid, parse_point};
use crate::report::{Report, Status};

/// Largest number of unordered triples audited exhaustively under `--mode auto`.
pub const TRIPLE_BUDGET: u64 = 2_000_000;

/// Rendered report and exit status.
pub struct Outcome {
    pub body: String,
    pub exit: i32,
}

fn exit_for(status: Status) -> i32 {
    match status {
        Status::Ok | Status::Found => 0,
        Status::Violation | Status::NotFound => 2,
    }
}

fn family(args: &FamilyArgs) -> anyhow::Result<MetricFamily> {
    Ok(match args.family {
        FamilyArg::Go => MetricFamily::GehringOsgood,
        FamilyArg::Dhv => MetricFamily::dhv(args.c)?,
        FamilyArg::Na => MetricFamily::NikolovAndreev,
        FamilyArg::Ibr => MetricFamily::Ibragimov,
    })
}

fn variant(v: VariantArg) -> Variant {
    match v {
        VariantArg::Fine => Variant::Fine,
        VariantArg::Coarse => Variant::Coarse,
    }
}

fn mode(arg: ModeArg, total: u64, budget: u64, samples: u64, seed: u64) -> SearchMode {
    match arg {
        ModeArg::Auto => SearchMode::auto(total, budget, samples, seed),
        ModeArg::Exhaustive => SearchMode::Exhaustive,
        ModeArg::Sampled => SearchMode::Sampled { samples, seed },
    }
}

fn json_only(format: Format) -> anyhow::Result<()> {
    if format == Format::Csv {
        bail!("--format csv is only available for the dilatation command");
    }
    Ok(())
}

/// Reads and validates a space-spec file.
pub fn load_spec(path: &Path) -> anyhow::Result<SpaceSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec: SpaceSpec = serde_json::from_str(&text)
        .with_context(|| format!("parsing space spec {}", path.display()))?;
    spec.validate_finite()
        .with_context(|| format!("space spec {}", path.display()))?;
    Ok(spec)
}

fn load_space(path: &Path) -> anyhow::Result<(SpaceSpec, BuiltSpace)> {
    let spec = load_spec(path)?;
    let mut built =
        build(&spec).with_context(|| format!("building space from {}", path.display()))?;
    // Custom tables count as 1-Lipschitz only after a passing pair audit.
    let BuiltSpace { space, weights, .. } = &mut built;
    weights.certify_lipschitz(space, SearchMode::Exhaustive)?;
    Ok((spec, built))
}

#[derive(Serialize)]
struct EvalConfig {
    #[serde(flatten)]
    family: MetricFamily,
    x: Option<Vec<f64>>,
    y: Option<Vec<f64>>,
    d: f64,
    fx: f64,
    fy: f64,
    variant: Variant,
}

#[derive(Serialize)]
struct EvalResult {
    rho: f64,
    functional: Option<f64>,
    lower_envelope: f64,
    upper_envelope: Option<f64>,
    distance_bound: Option<f64>,
}

pub fn eval(args: &EvalArgs) -> anyhow::Result<Outcome> {
    json_only(args.output.format)?;
    let fam = family(&args.family)?;
    let x = args.x.as_deref().map(parse_point).transpose()?;
    let y = args.y.as_deref().map(parse_point).transpose()?;
    let d = match (args.d, &x, &y) {
        (Some(d), _, _) => d,
        (None, Some(x), Some(y)) => {
            if x.len() != y.len() {
                bail!("--x and --y have different dimensions");
            }
            x.iter()
                .zip(y)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        }
        _ => bail!("eval needs --d or both --x and --y"),
    };
    let var = variant(args.variant);
    let value = rho(fam, d, args.fx, args.fy)?;
    let result = EvalResult {
        rho: value,
        functional: comparison_functional(fam, d, args.fx, args.fy).ok(),
        lower_envelope: bound_lower_global(fam, d, args.fx, var)?,
        upper_envelope: bound_upper_near(fam, d, args.fx).ok(),
        distance_bound: invert_distance_bound(fam, value, args.fx, var).ok(),
    };
    let config = EvalConfig {
        family: fam,
        x,
        y,
        d,
        fx: args.fx,
        fy: args.fy,
        variant: var,
    };
    let report = Report::new("eval", config, 0, args.family.c, result, Status::Ok);
    Ok(Outcome {
        body: report.to_json(),
        exit: 0,
    })
}

#[derive(Serialize)]
struct SpaceConfig<'a> {
    #[serde(flatten)]
    family: MetricFamily,
    space: &'a SpaceSpec,
    mode: SearchMode,
    samples: u64,
    points: usize,
}

#[derive(Serialize)]
struct AuditResult {
    metric: AuditReport,
    worst_triangle_labels: Vec<String>,
    lipschitz: AuditReport,
    metricity_certified: bool,
}

pub fn audit(args: &SpaceArgs) -> anyhow::Result<Outcome> {
    json_only(args.output.format)?;
    let fam = family(&args.family)?;
    let (spec, built) = load_space(&args.space)?;
    let n = built.space.len();
    let m = mode(
        args.mode,
        binomial(n as u64, 3),
        TRIPLE_BUDGET,
        args.samples,
        args.seed,
    );
    let w = built.weights.values();
    let metric = metric_axiom_audit(
        &built.space,
        |i, j| rho_unchecked(fam, built.space.dist(i, j), w[i], w[j]),
        m,
    )?;
    let lipschitz = lipschitz_audit(&built.space, &built.weights, m)?;
    let status = if metric.passed() {
        Status::Ok
    } else {
        Status::Violation
    };
    let result = AuditResult {
        worst_triangle_labels: metric
            .witness
            .iter()
            .map(|&i| built.space.label(i).to_string())
            .collect(),
        metric,
        lipschitz,
        metricity_certified: fam.metricity_certified(),
    };
    let config = SpaceConfig {
        family: fam,
        space: &spec,
        mode: m,
        samples: args.samples,
        points: n,
    };
    let report = Report::new("audit", config, args.seed, args.family.c, result, status);
    Ok(Outcome {
        body: report.to_json(),
        exit: exit_for(status),
    })
}

#[derive(Serialize)]
struct DeltaResult {
    estimate: DeltaEstimate,
    witness_labels: Vec<String>,
    lipschitz_certified: bool,
    multiplicative: Option<AuditReport>,
    multiplicative_factor: Option<f64>,
}

pub fn delta(args: &SpaceArgs) -> anyhow::Result<Outcome> {
    json_only(args.output.format)?;
    let fam = family(&args.family)?;
    let (spec, built) = load_space(&args.space)?;
    let n = built.space.len();
    let m = mode(
        args.mode,
        binomial(n as u64, 4),
        gromov::QUAD_BUDGET,
        args.samples,
        args.seed,
    );
    let estimate = delta_estimate(fam, &built.space, &built.weights, m)?;
    let multiplicative = match fam {
        MetricFamily::GehringOsgood => None,
        _ => Some(multiplicative_four_point_check(
            fam,
            &built.space,
            &built.weights,
            m,
        )?),
    };
    let violation = estimate.exceeds_bound
        || multiplicative
            .as_ref()
            .is_some_and(|r| estimate.bound_applies && !r.passed());
    let status = if violation {
        Status::Violation
    } else {
        Status::Ok
    };
    let result = DeltaResult {
        witness_labels: estimate
            .witness
            .iter()
            .flatten()
            .map(|&i| built.space.label(i).to_string())
            .collect(),
        lipschitz_certified: built.weights.lipschitz_certified(),
        multiplicative_factor: fam.multiplicative_factor().ok(),
        estimate,
        multiplicative,
    };
    let config = SpaceConfig {
        family: fam,
        space: &spec,
        mode: m,
        samples: args.samples,
        points: n,
    };
    let report = Report::new("delta", config, args.seed, args.family.c, result, status);
    Ok(Outcome {
        body: report.to_json(),
        exit: exit_for(status),
    })
}

#[derive(Serialize)]
struct DilatationConfig<'a> {
    #[serde(flatten)]
    family: MetricFamily,
    variant: Variant,
    space: &'a SpaceSpec,
    center: Vec<f64>,
    r_grid: Vec<f64>,
    probes: usize,
}

#[derive(Serialize)]
struct DilatationResult {
    profile: DilatationProfile,
    /// Radii where the probe estimate exceeds the envelope.
    envelope_violations: usize,
}

#[derive(Serialize)]
struct CsvRow {
    r: f64,
    #[serde(rename = "H_hat")]
    h_hat: f64,
    #[serde(rename = "H_env")]
    h_env: f64,
}

pub fn dilatation(args: &DilatationArgs) -> anyhow::Result<Outcome> {
    let fam = family(&args.family)?;
    let (spec, built) = load_space(&args.space)?;
    if matches!(spec.kind, SpaceKind::Graph { .. }) {
        bail!("dilatation needs a Euclidean space (probes are placed geometrically)");
    }
    if spec.weight_source != WeightSpec::DistToObstacle {
        bail!("dilatation needs distance-to-obstacle weights");
    }
    let obstacle = built
        .obstacle
        .geometric()
        .expect("Euclidean spaces have geometric obstacles")
        .clone();
    let center = match &args.x {
        Some(x) => parse_point(x)?,
        None => built
            .space
            .point(0)
            .context("the space has no points")?
            .to_vec(),
    };
    let grid = parse_grid(&args.r_grid)?;
    let probes = args.probes.unwrap_or_else(|| default_probes(center.len()));
    let var = variant(args.variant);
    let field = WeightField::DistToObstacle { obstacle };
    let profile = dilatation_profile(fam, var, &field, &center, &grid, probes, args.seed)?;
    let envelope_violations = profile
        .h_hat
        .iter()
        .zip(&profile.h_env)
        .filter(|(h, e)| **h > **e + TOL_ABS * e.max(1.0))
        .count();
    let status = if envelope_violations == 0 {
        Status::Ok
    } else {
        Status::Violation
    };
    let body = match args.output.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for ((s, h), e) in profile.radii.iter().zip(&profile.h_hat).zip(&profile.h_env) {
                w.serialize(CsvRow {
                    r: s * profile.fx,
                    h_hat: *h,
                    h_env: *e,
                })?;
            }
            String::from_utf8(w.into_inner()?)?
        }
        Format::Json => {
            let config = DilatationConfig {
                family: fam,
                variant: var,
                space: &spec,
                center,
                r_grid: grid,
                probes,
            };
            let result = DilatationResult {
                profile,
                envelope_violations,
            };
            Report::new(
                "dilatation",
                config,
                args.seed,
                args.family.c,
                result,
                status,
            )
            .to_json()
        }
    };
    Ok(Outcome {
        body,
        exit: exit_for(status),
    })
}

#[derive(Serialize)]
struct CounterexampleConfig<'a> {
    #[serde(flatten)]
    family: MetricFamily,
    space: &'a SpaceSpec,
    budget: u64,
}

#[derive(Serialize)]
struct CounterexampleResult {
    #[serde(flatten)]
    outcome: SearchOutcome,
    matches_theory: bool,
}

pub fn counterexample(args: &CounterexampleArgs) -> anyhow::Result<Outcome> {
    json_only(args.output.format)?;
    let fam = family(&args.family)?;
    if args.family.family != FamilyArg::Dhv {
        bail!("counterexample search is defined for --family dhv");
    }
    let (spec, built) = load_space(&args.space)?;
    if !matches!(spec.kind, SpaceKind::UnitDisk { .. }) || spec.obstacle.is_some() {
        bail!("counterexample search needs a unit_disk space with its default obstacle");
    }
    let obstacle = built.obstacle.geometric().expect("disk obstacle");
    let outcome = search(fam, &built.space, obstacle, args.samples, args.seed)?;
    let matches_theory = outcome.matches_theory();
    let status = if outcome.found {
        Status::Found
    } else {
        Status::NotFound
    };
    let exit = if matches_theory { 0 } else { 2 };
    let config = CounterexampleConfig {
        family: fam,
        space: &spec,
        budget: args.samples,
    };
    let result = CounterexampleResult {
        outcome,
        matches_theory,
    };
    let report = Report::new(
        "counterexample",
        config,
        args.seed,
        args.family.c,
        result,
        status,
    );
    Ok(Outcome {
        body: report.to_json(),
        exit,
    })
}
