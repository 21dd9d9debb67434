//! Subcommand implementations. Each returns a structured value, a table and
//! whether the run passed.

use std::fs;
use std::path::Path;

use assouad_lab::constructions::{
    graph_length_space, path_graph, random_connected_graph, telescope, AsymptoticExampleSpec, TelescopeSpec,
};
use assouad_lab::covering::{
    covering_number_with_limit, doubling_constant_empirical, max_separated_set, CoverMode,
};
use assouad_lab::dimension::{
    assouad_estimate_covering, assouad_estimate_subsets, lower_assouad_estimate, DimensionEstimate, DimensionParams,
};
use assouad_lab::experiments::{
    ball_convergence_check, cantor_scenario, concentric_ball_check, dimension_inequality_check, grid_scenario,
    precompact_subsequence, pseudo_cone_convergence, telescope_lemma_checks, ConvergenceParams, ExperimentError,
    ExperimentReport, Scenario, StepRecord, Verdict,
};
use assouad_lab::gh::{extract_approximation, gh_bounds, gh_exact_with_limit, GhError};
use assouad_lab::io::{num, report_table, to_json, write_space, Table};
use assouad_lab::metric::frechet_embed;
use assouad_lab::{constructions, FiniteMetricSpace};
use serde_json::{json, Value};

use crate::{spaces, CliError, Command, CoverModeArg, DimMethod, Format, GhMode, Global, ScenarioArg};

/// Seeded random graphs in the concentric-ball scenario.
const CONCENTRIC_GRAPHS: u64 = 50;

struct Output {
    structured: Value,
    table: Table,
    pass: bool,
}

fn kv(pairs: &[(&str, String)]) -> Table {
    let mut t = Table::new(&["field", "value"]);
    for (k, v) in pairs {
        t.push(vec![k.to_string(), v.clone()]);
    }
    t
}

fn validation(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialise")
}

fn name_of(command: &Command) -> &'static str {
    match command {
        Command::Validate { .. } => "validate",
        Command::Ghdist { .. } => "ghdist",
        Command::Dim { .. } => "dim",
        Command::Cover { .. } => "cover",
        Command::Telescope { .. } => "telescope",
        Command::Asymcone { .. } => "asymcone",
        Command::Experiment { .. } => "experiment",
        Command::Embed { .. } => "embed",
        Command::Generate { .. } => "generate",
    }
}

pub fn run(command: &Command, g: &Global) -> Result<bool, CliError> {
    let out = match command {
        Command::Validate { input } => validate(input, g)?,
        Command::Ghdist { a, b, mode, exact_limit, approximation } => {
            ghdist(a, b, *mode, *exact_limit, *approximation, g)?
        }
        Command::Dim { input, method, rho_min, r_min, r_max, random_subsets, seed } => {
            let params = DimensionParams {
                rho_min: *rho_min,
                r_min: *r_min,
                r_max: *r_max,
                random_subsets: *random_subsets,
                seed: *seed,
            };
            dim(input, *method, &params, g)?
        }
        Command::Cover { input, r, mode, subset, separated, doubling, exact_limit } => {
            cover(input, *r, *mode, subset.as_deref(), *separated, *doubling, *exact_limit, g)?
        }
        Command::Telescope { component, rescale, infinity_label, out } => {
            telescope_cmd(component, *rescale, infinity_label, out.as_deref(), g)?
        }
        Command::Asymcone { ambient, base_point, truncation, radius, out } => {
            asymcone(ambient.as_deref(), *base_point, *truncation, *radius, out.as_deref(), g)?
        }
        Command::Experiment { scenario, convergence_tol, burn_in, slack, seed } => {
            if !(*convergence_tol > 0.0) {
                return Err(CliError::Usage("--convergence-tol must be positive".into()));
            }
            let conv = ConvergenceParams { tol: *convergence_tol, burn_in: *burn_in, ..Default::default() };
            experiment(*scenario, &conv, *slack, *seed, g)?
        }
        Command::Embed { input } => embed(input, g)?,
        Command::Generate { spec, out } => return generate(spec, out.as_deref()),
    };
    let structured = serde_json::to_string_pretty(&out.structured).expect("values serialise") + "\n";
    let table = out.table.render();
    match g.format {
        Format::Structured => print!("{structured}"),
        Format::Table => print!("{table}"),
    }
    if let Some(dir) = &g.output_dir {
        let name = name_of(command);
        fs::create_dir_all(dir).map_err(validation)?;
        fs::write(dir.join(format!("{name}.json")), &structured).map_err(validation)?;
        fs::write(dir.join(format!("{name}.tsv")), &table).map_err(validation)?;
    }
    Ok(out.pass)
}

fn validate(input: &str, g: &Global) -> Result<Output, CliError> {
    let x = spaces::load(input, "--in", g.tol)?;
    let structured = json!({
        "valid": true,
        "n": x.len(),
        "diameter": x.diameter(),
        "separation": x.separation(),
        "tol": g.tol,
    });
    let table = kv(&[
        ("valid", "true".into()),
        ("n", x.len().to_string()),
        ("diameter", num(x.diameter())),
        ("separation", num(x.separation())),
    ]);
    Ok(Output { structured, table, pass: true })
}

fn ghdist(a: &str, b: &str, mode: GhMode, limit: usize, approx: bool, g: &Global) -> Result<Output, CliError> {
    let x = spaces::load(a, "--a", g.tol)?;
    let y = spaces::load(b, "--b", g.tol)?;
    let result = match mode {
        GhMode::Bounds => gh_bounds(&x, &y),
        GhMode::Exact => gh_exact_with_limit(&x, &y, limit).map_err(validation)?,
        GhMode::Auto => match gh_exact_with_limit(&x, &y, limit) {
            Ok(r) => r,
            Err(GhError::ExactLimitExceeded { .. }) => gh_bounds(&x, &y),
            Err(e) => return Err(validation(e)),
        },
    };
    let mut structured = to_value(&result);
    let mut rows = vec![
        ("value", num(result.value)),
        ("kind", to_value(&result.kind).as_str().unwrap_or_default().to_string()),
        ("lower", num(result.lower)),
        ("upper", num(result.upper)),
        ("pairs", result.witness.pairs.len().to_string()),
    ];
    if approx {
        let pair = extract_approximation(&result.witness, &x, &y).map_err(validation)?;
        rows.push(("epsilon", num(pair.epsilon)));
        structured["approximation"] = to_value(&pair);
    }
    Ok(Output { structured, table: kv(&rows), pass: true })
}

fn estimate_rows(e: &DimensionEstimate) -> Vec<(&'static str, String)> {
    vec![
        ("method", to_value(&e.method).as_str().unwrap_or_default().to_string()),
        ("bound", to_value(&e.bound).as_str().unwrap_or_default().to_string()),
        ("beta_hat", num(e.beta_hat)),
        ("constant_c", num(e.constant_c)),
        ("raw_slope", num(e.raw_slope)),
        ("extremal_beta", num(e.extremal_beta)),
        ("fitted", e.fitted.to_string()),
        ("rho_min", num(e.window.rho_min)),
        ("r_min", num(e.window.r_min)),
        ("r_max", num(e.window.r_max)),
        ("samples", e.samples.to_string()),
        ("empirical", e.empirical.to_string()),
    ]
}

fn dim(input: &str, method: DimMethod, params: &DimensionParams, g: &Global) -> Result<Output, CliError> {
    let x = spaces::load(input, "--in", g.tol)?;
    let e = match method {
        DimMethod::Subsets => assouad_estimate_subsets(&x, params),
        DimMethod::Covering => assouad_estimate_covering(&x, params),
        DimMethod::Lower => lower_assouad_estimate(&x, params),
    }
    .map_err(validation)?;
    Ok(Output { structured: to_value(&e), table: kv(&estimate_rows(&e)), pass: true })
}

#[allow(clippy::too_many_arguments)]
fn cover(
    input: &str,
    r: Option<f64>,
    mode: CoverModeArg,
    subset: Option<&[usize]>,
    separated: bool,
    doubling: bool,
    limit: usize,
    g: &Global,
) -> Result<Output, CliError> {
    let x = spaces::load(input, "--in", g.tol)?;
    if doubling {
        let d = doubling_constant_empirical(&x);
        let table = kv(&[
            ("doubling_constant", d.value.to_string()),
            ("exact", d.exact.to_string()),
            ("center", d.center.to_string()),
            ("radius", num(d.radius)),
            ("restricted_to_balls", d.restricted_to_balls.to_string()),
        ]);
        return Ok(Output { structured: to_value(&d), table, pass: true });
    }
    let r = r.ok_or_else(|| CliError::Usage("--r is required unless --doubling is given".into()))?;
    let view = match subset {
        Some(s) => x.subset(s.to_vec()).map_err(|e| validation(format!("--subset: {e}")))?,
        None => x.full(),
    };
    if separated {
        if !(r > 0.0) {
            return Err(validation(format!("--r must be positive, got {r}")));
        }
        let s = max_separated_set(&view, r);
        let idx = s.indices().to_vec();
        let table = kv(&[("r", num(r)), ("size", idx.len().to_string()), ("indices", join(&idx))]);
        return Ok(Output { structured: json!({ "r": r, "indices": idx }), table, pass: true });
    }
    let mode = match mode {
        CoverModeArg::Exact => CoverMode::Exact,
        CoverModeArg::Greedy => CoverMode::Greedy,
    };
    let cert = covering_number_with_limit(&view, r, mode, limit).map_err(validation)?;
    let blocks: Vec<String> = cert.blocks.iter().map(|b| join(b)).collect();
    let table = kv(&[
        ("r", num(cert.r)),
        ("count", cert.count.to_string()),
        ("exactness", to_value(&cert.exactness).as_str().unwrap_or_default().to_string()),
        ("blocks", blocks.join(" | ")),
        ("blocks_within_subset", cert.blocks_within_subset.to_string()),
    ]);
    Ok(Output { structured: to_value(&cert), table, pass: true })
}

fn join(idx: &[usize]) -> String {
    idx.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn telescope_cmd(
    components: &[String],
    rescale: bool,
    infinity_label: &str,
    out: Option<&Path>,
    g: &Global,
) -> Result<Output, CliError> {
    let comps = components
        .iter()
        .enumerate()
        .map(|(i, c)| spaces::load(c, &format!("--component #{i}"), g.tol))
        .collect::<Result<Vec<_>, _>>()?;
    let mut spec = TelescopeSpec::new(comps, rescale);
    spec.infinity_label = infinity_label.to_string();
    let t = telescope(&spec).map_err(validation)?;
    if let Some(path) = out {
        write_space(path, &t.space).map_err(validation)?;
    }
    let structured = json!({
        "n": t.space.len(),
        "blocks": t.block_diameters.len(),
        "block_diameters": t.block_diameters,
        "diameter": t.space.diameter(),
        "out": out.map(|p| p.display().to_string()),
    });
    let mut table = kv(&[("n", t.space.len().to_string()), ("blocks", t.block_diameters.len().to_string())]);
    for (i, d) in t.block_diameters.iter().enumerate() {
        table.push(vec![format!("diam(X_{i})"), num(*d)]);
    }
    Ok(Output { structured, table, pass: true })
}

fn asymcone(
    ambient: Option<&str>,
    base_point: usize,
    truncation: usize,
    radius: f64,
    out: Option<&Path>,
    g: &Global,
) -> Result<Output, CliError> {
    let mut spec = AsymptoticExampleSpec::default_ambient(truncation);
    if let Some(a) = ambient {
        spec.ambient = spaces::load(a, "--ambient", g.tol)?;
        spec.base_point = base_point;
    }
    if !(radius > 0.0) {
        return Err(validation(format!("--radius must be positive, got {radius}")));
    }
    let report = finish(telescope_lemma_checks(&spec, radius).map_err(validation)?, g);
    let ex = constructions::asymptotic_example(&spec).map_err(validation)?;
    if let Some(path) = out {
        let space = ex.to_space().map_err(validation)?;
        write_space(path, &space).map_err(validation)?;
    }
    let pass = report.passed();
    let structured = json!({ "blocks": to_value(&ex.blocks), "report": to_value(&report) });
    Ok(Output { structured, table: report_table(&[report]), pass })
}

fn finish(report: ExperimentReport, g: &Global) -> ExperimentReport {
    if g.timing {
        report
    } else {
        report.without_runtime()
    }
}

fn failed(name: &str, e: &ExperimentError) -> ExperimentReport {
    ExperimentReport {
        name: name.to_string(),
        steps: vec![StepRecord { i: 0, label: "prerequisite".into(), measured: 0.0, bound: None, pass: false }],
        verdict: Verdict::Fail,
        notes: vec![e.to_string()],
        runtime_seconds: None,
    }
}

fn scenario_reports(s: &Scenario, conv: &ConvergenceParams, slack: Option<f64>, g: &Global) -> Vec<ExperimentReport> {
    let dim = DimensionParams::default();
    let mut c = finish(pseudo_cone_convergence(&s.sequence, &s.target, conv), g);
    c.name = format!("{}/convergence", s.name);
    let name = format!("{}/dimension", s.name);
    let d = match dimension_inequality_check(&s.base, &s.sequence, &s.target, slack.unwrap_or(s.slack), conv, &dim) {
        Ok(mut d) => {
            d.name = name;
            finish(d, g)
        }
        Err(e) => failed(&name, &e),
    };
    vec![c, d]
}

fn ball_report(g: &Global) -> ExperimentReport {
    let mesh = (-8f64).exp2();
    let k = path_graph(513, mesh).expect("path graph is connected");
    let samples: Vec<Vec<usize>> = (0..=6).map(|i| (0..513).step_by(1 << (8 - i)).collect()).collect();
    match ball_convergence_check(&k, 0, &samples, 1.0, mesh) {
        Ok(r) => finish(r, g),
        Err(e) => failed("ball-convergence", &e),
    }
}

fn concentric_report(seed: u64, g: &Global) -> ExperimentReport {
    let mut steps = Vec::new();
    let mut runtime = 0.0;
    for graph in 0..CONCENTRIC_GRAPHS {
        let edges = random_connected_graph(24, 12, 0.05, 0.5, seed.wrapping_add(graph));
        let k = graph_length_space(24, &edges).expect("generator yields connected graphs");
        let mesh = edges.iter().map(|e| e.2).fold(0.0, f64::max);
        let radii: Vec<(f64, f64)> = (1..=4).flat_map(|a| (a..=4).map(move |b| (a as f64 * 0.3, b as f64 * 0.3))).collect();
        let r = concentric_ball_check(&k, 0, &radii, mesh);
        runtime += r.runtime_seconds.unwrap_or(0.0);
        steps.extend(r.steps.into_iter().map(|mut s| {
            s.label = format!("graph {graph}: {}", s.label);
            s.i = graph as usize;
            s
        }));
    }
    let verdict = if steps.iter().all(|s| s.pass) { Verdict::Pass } else { Verdict::Fail };
    let report = ExperimentReport {
        name: "concentric-balls".into(),
        steps,
        verdict,
        notes: vec![format!("{CONCENTRIC_GRAPHS} random connected graphs, seed {seed}, mesh slack per graph")],
        runtime_seconds: Some(runtime),
    };
    finish(report, g)
}

fn lemma_report(g: &Global) -> ExperimentReport {
    match telescope_lemma_checks(&AsymptoticExampleSpec::default_ambient(8), 1.0) {
        Ok(r) => finish(r, g),
        Err(e) => failed("weighted-block-lemmas", &e),
    }
}

fn precompact_report(g: &Global) -> Result<ExperimentReport, CliError> {
    let start = std::time::Instant::now();
    let s = cantor_scenario().map_err(validation)?;
    let members: Vec<FiniteMetricSpace> = (0..s.sequence.len()).map(|i| s.sequence.member(i)).collect();
    let eps = 1e-3;
    let chain = precompact_subsequence(&members, eps);
    let mut steps: Vec<StepRecord> = chain
        .windows(2)
        .map(|w| {
            let d = gh_bounds(&members[w[0]], &members[w[1]]).upper;
            StepRecord { i: w[1], label: format!("gh upper {} -> {}", w[0], w[1]), measured: d, bound: Some(eps), pass: d <= eps }
        })
        .collect();
    let last = *chain.last().expect("chain starts at 0");
    steps.push(StepRecord {
        i: last,
        label: "chain reaches the last index".into(),
        measured: last as f64,
        bound: Some((members.len() - 1) as f64),
        pass: last + 1 == members.len(),
    });
    let verdict = if steps.iter().all(|s| s.pass) { Verdict::Pass } else { Verdict::Fail };
    let report = ExperimentReport {
        name: "precompact-subsequence".into(),
        steps,
        verdict,
        notes: vec![format!("chain {chain:?}, eps = {eps}")],
        runtime_seconds: Some(start.elapsed().as_secs_f64()),
    };
    Ok(finish(report, g))
}

fn experiment(
    scenario: ScenarioArg,
    conv: &ConvergenceParams,
    slack: Option<f64>,
    seed: u64,
    g: &Global,
) -> Result<Output, CliError> {
    let wants = |s: ScenarioArg| scenario == ScenarioArg::All || scenario == s;
    let mut reports = Vec::new();
    if wants(ScenarioArg::Cantor) {
        reports.extend(scenario_reports(&cantor_scenario().map_err(validation)?, conv, slack, g));
    }
    if wants(ScenarioArg::Grid) {
        reports.extend(scenario_reports(&grid_scenario().map_err(validation)?, conv, slack, g));
    }
    if wants(ScenarioArg::Ball) {
        reports.push(ball_report(g));
    }
    if wants(ScenarioArg::Concentric) {
        reports.push(concentric_report(seed, g));
    }
    if wants(ScenarioArg::Lemmas) {
        reports.push(lemma_report(g));
    }
    if wants(ScenarioArg::Precompact) {
        reports.push(precompact_report(g)?);
    }
    let pass = reports.iter().all(ExperimentReport::passed);
    let verdict = if pass { "pass" } else { "fail" };
    let structured = json!({ "verdict": verdict, "seed": seed, "reports": to_value(&reports) });
    Ok(Output { structured, table: report_table(&reports), pass })
}

fn embed(input: &str, g: &Global) -> Result<Output, CliError> {
    let x = spaces::load(input, "--in", g.tol)?;
    let e = frechet_embed(&x);
    let mut headers = vec!["label".to_string()];
    headers.extend(x.labels().iter().cloned());
    let mut table = Table { headers, rows: Vec::new() };
    for (i, v) in e.vectors.iter().enumerate() {
        let mut row = vec![x.labels()[i].clone()];
        row.extend(v.iter().map(|&c| num(c)));
        table.push(row);
    }
    let structured = json!({ "labels": x.labels(), "vectors": e.vectors, "norm": "sup" });
    Ok(Output { structured, table, pass: true })
}

fn generate(spec: &str, out: Option<&Path>) -> Result<bool, CliError> {
    let x = spaces::generate(spec).map_err(|e| CliError::Validation(format!("generator: {e}")))?;
    match out {
        Some(path) => write_space(path, &x).map_err(validation)?,
        None => print!("{}", to_json(&x)),
    }
    Ok(true)
}
