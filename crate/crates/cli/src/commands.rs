//! The five commands. Each returns its exit code and the text it would
//! print, so tests can drive them without spawning a process.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use normsq_core::critical::{enumerate_critical_components, group_by_f_value, CriticalComponent};
use normsq_core::degeneracy::{
    survey_strata, verify_components, SurveyParams, Tolerances, VerificationReport, VerifyParams,
    TOLERANCES,
};
use normsq_core::exactlin::rat_to_f64;
use normsq_core::poincare::{betti_numbers, equivariant_series, is_regular_value};
use serde_json::{json, Value};

use crate::document::{parse_target_arg, InputError, LoadedSpec, SpecDocument};
use crate::plot::render_svg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_CHECK: i32 = 2;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Options {
    pub target: Option<String>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub radius: Option<f64>,
    pub points: Option<usize>,
    pub csv: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutput {
    fn ok(stdout: String) -> Self {
        CommandOutput {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }
}

impl From<InputError> for CommandOutput {
    fn from(e: InputError) -> Self {
        CommandOutput {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Poincare,
    Verify,
    Flow,
    Plot,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Poincare => "poincare",
            Command::Verify => "verify",
            Command::Flow => "flow",
            Command::Plot => "plot",
        }
    }
}

/// Reads the spec file and runs one command.
pub fn run(command: Command, spec_path: &Path, opts: &Options) -> CommandOutput {
    match SpecDocument::read(spec_path) {
        Ok(doc) => run_document(command, &doc, opts),
        Err(e) => e.into(),
    }
}

pub fn run_document(command: Command, doc: &SpecDocument, opts: &Options) -> CommandOutput {
    let result = load(doc, opts).and_then(|loaded| match command {
        Command::Analyze => run_analyze(&loaded, opts),
        Command::Poincare => run_poincare(&loaded, opts),
        Command::Verify => {
            let components = enumerate(&loaded)?;
            run_verify_with_components(&loaded, &components, opts)
        }
        Command::Flow => run_flow(&loaded, opts),
        Command::Plot => run_plot(&loaded, opts),
    });
    result.unwrap_or_else(CommandOutput::from)
}

pub fn load(doc: &SpecDocument, opts: &Options) -> Result<LoadedSpec, InputError> {
    let target = opts.target.as_deref().map(parse_target_arg).transpose()?;
    doc.load(target.as_ref())
}

fn enumerate(loaded: &LoadedSpec) -> Result<Vec<CriticalComponent>, InputError> {
    enumerate_critical_components(&loaded.spec, &loaded.target)
        .map_err(|e| InputError(format!("enumeration: {e}")))
}

fn coords(c: &[usize]) -> String {
    let items: Vec<String> = c.iter().map(|j| j.to_string()).collect();
    format!("[{}]", items.join(","))
}

fn witnesses(w: &[Vec<usize>]) -> String {
    w.iter()
        .map(|s| {
            let items: Vec<String> = s.iter().map(|i| i.to_string()).collect();
            format!("{{{}}}", items.join(","))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Left-aligned columns separated by two spaces.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i + 1 == cells.len() {
                s.push_str(cell);
            } else {
                let pad = w - cell.chars().count();
                s.push_str(cell);
                s.push_str(&" ".repeat(pad + 2));
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(header.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), InputError> {
    let io = |e: csv::Error| InputError(format!("--csv {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    w.flush()
        .map_err(|e| InputError(format!("--csv {}: {e}", path.display())))
}

fn header(loaded: &LoadedSpec) -> Result<String, InputError> {
    let echo = SpecDocument::echo(&loaded.spec, Some(&loaded.target))?;
    let mut s = format!("spec: {}\n", echo.to_compact_json());
    for w in &loaded.warnings {
        writeln!(s, "warning: {w}").unwrap();
    }
    Ok(s)
}

fn tolerance_line(tol: &Tolerances) -> String {
    format!("tolerances: {tol}\n")
}

fn tolerance_json(tol: &Tolerances) -> Value {
    json!({
        "zero_eigenvalue": tol.zero_eigenvalue,
        "flow_gradient": tol.flow_gradient,
        "match_distance": tol.match_distance,
        "newton_step": tol.newton_step,
        "monotone_slack": tol.monotone_slack,
        "phase_drift": tol.phase_drift,
        "principal_angle": tol.principal_angle,
        "frontier_slack": tol.frontier_slack,
        "fibre_locus": tol.fibre_locus,
        "on_component": tol.on_component,
    })
}

/// Writes the structured report when `--out` is given.
fn write_report(
    command: Command,
    loaded: &LoadedSpec,
    opts: &Options,
    results: Value,
) -> Result<(), InputError> {
    let Some(path) = &opts.out else {
        return Ok(());
    };
    let echo = SpecDocument::echo(&loaded.spec, Some(&loaded.target))?;
    let doc = json!({
        "command": command.name(),
        "spec": echo,
        "tolerances": tolerance_json(&TOLERANCES),
        "results": results,
        "warnings": loaded.warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| InputError(format!("--out {}: {e}", path.display())))
}

const ANALYZE_COLUMNS: [&str; 8] = [
    "alpha",
    "f",
    "index",
    "minimizing",
    "negative",
    "stabilizer",
    "support",
    "witnesses",
];

pub fn run_analyze(loaded: &LoadedSpec, opts: &Options) -> Result<CommandOutput, InputError> {
    let components = enumerate(loaded)?;
    let rows: Vec<Vec<String>> = components
        .iter()
        .map(|c| {
            vec![
                c.value.to_string(),
                c.f_value.to_string(),
                c.index.to_string(),
                coords(&c.minimizing_coords),
                coords(&c.negative_coords),
                c.stabilizer_rank.to_string(),
                coords(&c.generic_support),
                witnesses(&c.witnesses),
            ]
        })
        .collect();
    let mut out = header(loaded)?;
    out.push_str(&table(&ANALYZE_COLUMNS, &rows));
    let groups = group_by_f_value(&components);
    let group_text: Vec<String> = groups
        .iter()
        .map(|(f, alphas)| {
            let a: Vec<String> = alphas.iter().map(|a| a.to_string()).collect();
            format!("{f} [{}]", a.join(" "))
        })
        .collect();
    writeln!(out, "f-values: {}", group_text.join("; ")).unwrap();

    if let Some(path) = &opts.csv {
        write_csv(path, &ANALYZE_COLUMNS, &rows)?;
    }
    let results: Vec<Value> = components
        .iter()
        .map(|c| {
            json!({
                "alpha": c.value.to_string(),
                "f_value": c.f_value.to_string(),
                "index": c.index,
                "minimizing_coords": c.minimizing_coords,
                "negative_coords": c.negative_coords,
                "stabilizer_rank": c.stabilizer_rank,
                "generic_support": c.generic_support,
                "witnesses": c.witnesses,
            })
        })
        .collect();
    let f_groups: Vec<Value> = groups
        .iter()
        .map(|(f, a)| json!({"f_value": f.to_string(), "alphas": a.iter().map(|x| x.to_string()).collect::<Vec<_>>()}))
        .collect();
    write_report(
        Command::Analyze,
        loaded,
        opts,
        json!({"components": results, "f_value_groups": f_groups}),
    )?;
    Ok(CommandOutput::ok(out))
}

pub fn run_poincare(loaded: &LoadedSpec, opts: &Options) -> Result<CommandOutput, InputError> {
    let core = |e: normsq_core::Error| InputError(format!("poincare: {e}"));
    let regular = is_regular_value(&loaded.spec, &loaded.target).map_err(core)?;
    let series = equivariant_series(&loaded.spec, &loaded.target).map_err(core)?;
    let mut out = header(loaded)?;
    let mut code = EXIT_OK;
    let mut betti: Option<Vec<u64>> = None;
    if regular {
        if series.is_zero() {
            writeln!(out, "regular; P = 0; empty level").unwrap();
        } else {
            match betti_numbers(&loaded.spec, &loaded.target) {
                Ok(b) if series.is_palindromic() && series.has_nonnegative_coefficients() => {
                    let items: Vec<String> = b.iter().map(|x| x.to_string()).collect();
                    writeln!(out, "regular; P = {series}; betti = [{}]", items.join(",")).unwrap();
                    betti = Some(b);
                }
                Ok(_) => {
                    writeln!(out, "regular; P = {series}; inconsistent: not palindromic with nonnegative coefficients")
                        .unwrap();
                    code = EXIT_CHECK;
                }
                Err(e) => {
                    writeln!(out, "regular; P = {series}; inconsistent: {e}").unwrap();
                    code = EXIT_CHECK;
                }
            }
        }
    } else {
        writeln!(out, "singular; P = {series}").unwrap();
    }
    write_report(
        Command::Poincare,
        loaded,
        opts,
        json!({
            "regular": regular,
            "series": series.to_string(),
            "numerator": series.numerator().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "denominator_power": series.denom_power(),
            "betti": betti,
        }),
    )?;
    Ok(CommandOutput {
        code,
        stdout: out,
        stderr: String::new(),
    })
}

fn verify_params(opts: &Options) -> Result<VerifyParams, InputError> {
    let mut p = VerifyParams::default();
    if let Some(s) = opts.seed {
        p.seed = s;
    }
    if let Some(n) = opts.samples {
        if n == 0 {
            return Err(InputError("--samples: must be at least 1".into()));
        }
        p.samples = n;
    }
    if let Some(r) = opts.radius {
        if !(r > 0.0 && r.is_finite()) {
            return Err(InputError(format!("--radius: must be positive, got {r}")));
        }
        p.radius = r;
    }
    Ok(p)
}

fn flag(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn verification_text(report: &VerificationReport) -> String {
    let mut out = String::new();
    let c = &report.criterion;
    writeln!(
        out,
        "criterion: {}/{} points agree ({} critical)",
        c.agreeing, c.points, c.critical
    )
    .unwrap();
    for v in &report.components {
        let counts: Vec<String> = v.negative_counts.iter().map(|k| k.to_string()).collect();
        writeln!(
            out,
            "{} f={} index={}: condition1 {}, condition2 {}, index {}, eigenspace {}, fibrewise {}, local {}; negative counts [{}], angle {:.1e}, margin c={}",
            v.value,
            v.f_value,
            v.index,
            flag(v.condition1_ok),
            flag(v.condition2_ok),
            flag(v.index_match && v.even_index),
            flag(v.eigenspace_ok),
            flag(v.fibrewise_ok),
            flag(v.local_coords_ok),
            counts.join(","),
            v.max_principal_angle,
            v.fitted_margin
                .as_ref()
                .map_or("n/a".to_string(), |m| format!("{:.6}", rat_to_f64(m))),
        )
        .unwrap();
    }
    if report.passed() {
        out.push_str("verdict: pass\n");
    } else {
        out.push_str("verdict: FAIL\n");
        if let Some(q) = &c.disagreement {
            let items: Vec<String> = q.values().iter().map(|x| x.to_string()).collect();
            writeln!(
                out,
                "worst witness: criterion disagreement at q = ({})",
                items.join(",")
            )
            .unwrap();
        }
        for v in report.components.iter().filter(|v| !v.passed()) {
            let reason = v
                .failures
                .first()
                .cloned()
                .unwrap_or_else(|| "check failed".into());
            writeln!(out, "worst witness: {}: {reason}", v.value).unwrap();
        }
    }
    out
}

/// Verification against a caller-supplied component table.
pub fn run_verify_with_components(
    loaded: &LoadedSpec,
    components: &[CriticalComponent],
    opts: &Options,
) -> Result<CommandOutput, InputError> {
    let params = verify_params(opts)?;
    let report = verify_components(
        &loaded.spec,
        &loaded.target,
        components,
        &params,
        &TOLERANCES,
    )
    .map_err(|e| InputError(format!("verify: {e}")))?;
    let mut out = header(loaded)?;
    out.push_str(&tolerance_line(&TOLERANCES));
    writeln!(
        out,
        "seed: {} samples: {} radius: {}",
        params.seed, params.samples, params.radius
    )
    .unwrap();
    out.push_str(&verification_text(&report));

    if let Some(path) = &opts.csv {
        let header = [
            "alpha",
            "index",
            "condition1",
            "condition2",
            "index_match",
            "eigenspace",
            "fibrewise",
            "local_coords",
        ];
        let rows: Vec<Vec<String>> = report
            .components
            .iter()
            .map(|v| {
                vec![
                    v.value.to_string(),
                    v.index.to_string(),
                    v.condition1_ok.to_string(),
                    v.condition2_ok.to_string(),
                    v.index_match.to_string(),
                    v.eigenspace_ok.to_string(),
                    v.fibrewise_ok.to_string(),
                    v.local_coords_ok.to_string(),
                ]
            })
            .collect();
        write_csv(path, &header, &rows)?;
    }
    let per_component: Vec<Value> = report
        .components
        .iter()
        .map(|v| {
            json!({
                "alpha": v.value.to_string(),
                "index": v.index,
                "condition1_ok": v.condition1_ok,
                "condition2_ok": v.condition2_ok,
                "index_match": v.index_match,
                "even_index": v.even_index,
                "eigenspace_ok": v.eigenspace_ok,
                "fibrewise_ok": v.fibrewise_ok,
                "local_coords_ok": v.local_coords_ok,
                "negative_counts": v.negative_counts,
                "max_principal_angle": v.max_principal_angle,
                "worst_float_margin": v.worst_float_margin,
                "fitted_margin": v.fitted_margin.as_ref().map(|m| m.to_string()),
                "max_locus_norm": v.max_locus_norm,
                "min_abs_det": v.min_abs_det,
                "failures": v.failures,
            })
        })
        .collect();
    write_report(
        Command::Verify,
        loaded,
        opts,
        json!({
            "seed": params.seed,
            "samples": params.samples,
            "radius": params.radius,
            "criterion": {
                "points": report.criterion.points,
                "agreeing": report.criterion.agreeing,
                "critical": report.criterion.critical,
            },
            "components": per_component,
            "passed": report.passed(),
        }),
    )?;
    Ok(CommandOutput {
        code: if report.passed() { EXIT_OK } else { EXIT_CHECK },
        stdout: out,
        stderr: String::new(),
    })
}

pub const DEFAULT_FLOW_POINTS: usize = 200;
pub const DEFAULT_FLOW_SEED: u64 = 7;

pub fn run_flow(loaded: &LoadedSpec, opts: &Options) -> Result<CommandOutput, InputError> {
    let points = opts.points.unwrap_or(DEFAULT_FLOW_POINTS);
    let seed = opts.seed.unwrap_or(DEFAULT_FLOW_SEED);
    let components = enumerate(loaded)?;
    let params = SurveyParams::with_points(points);
    let mut out = header(loaded)?;
    out.push_str(&tolerance_line(&params.flow.tol));
    writeln!(out, "points: {points} seed: {seed}").unwrap();
    let report = match survey_strata(&loaded.spec, &loaded.target, &params, seed) {
        Ok(r) => r,
        Err(e) => {
            writeln!(out, "flow failed: {e}").unwrap();
            return Ok(CommandOutput {
                code: EXIT_CHECK,
                stdout: out,
                stderr: String::new(),
            });
        }
    };
    let columns = ["alpha", "f", "index", "ensemble", "witnessed"];
    let rows: Vec<Vec<String>> = report
        .strata
        .iter()
        .filter(|(_, _, witnessed)| *witnessed)
        .map(|(alpha, count, witnessed)| {
            let c = components
                .iter()
                .find(|c| &c.value == alpha)
                .expect("enumerated");
            vec![
                alpha.to_string(),
                c.f_value.to_string(),
                c.index.to_string(),
                count.to_string(),
                witnessed.to_string(),
            ]
        })
        .collect();
    out.push_str(&table(&columns, &rows));
    let (_, frontier_total) = report.frontier_upper_tally;
    writeln!(out, "unmatched: {}", report.unmatched).unwrap();
    writeln!(
        out,
        "frontier: {} ({} samples, {} violations)",
        if report.frontier_ok() { "pass" } else { "FAIL" },
        frontier_total,
        report.frontier_violations
    )
    .unwrap();
    writeln!(
        out,
        "near-minimizing returns: {} mismatches; monotone: {}; max phase drift: {:.1e}",
        report.near_mismatches, report.all_monotone, report.max_arg_drift
    )
    .unwrap();

    if let Some(path) = &opts.csv {
        write_csv(path, &columns, &rows)?;
    }
    let strata: Vec<Value> = report
        .strata
        .iter()
        .map(|(a, c, w)| json!({"alpha": a.to_string(), "ensemble": c, "witnessed": w}))
        .collect();
    write_report(
        Command::Flow,
        loaded,
        opts,
        json!({
            "points": points,
            "seed": seed,
            "strata": strata,
            "trajectories": report.trajectories.len(),
            "unmatched": report.unmatched,
            "frontier_violations": report.frontier_violations,
            "frontier_samples": frontier_total,
            "near_mismatches": report.near_mismatches,
            "all_monotone": report.all_monotone,
            "max_arg_drift": report.max_arg_drift,
            "properness_certified": report.properness_certified,
            "passed": report.passed(),
        }),
    )?;
    Ok(CommandOutput {
        code: if report.passed() { EXIT_OK } else { EXIT_CHECK },
        stdout: out,
        stderr: String::new(),
    })
}

pub fn run_plot(loaded: &LoadedSpec, opts: &Options) -> Result<CommandOutput, InputError> {
    if loaded.spec.rank() != 2 {
        return Err(InputError(format!(
            "plot: only rank 2 can be drawn, this spec has rank {}",
            loaded.spec.rank()
        )));
    }
    let components = enumerate(loaded)?;
    let svg = render_svg(&loaded.spec, &components);
    match &opts.out {
        Some(path) => {
            std::fs::write(path, &svg)
                .map_err(|e| InputError(format!("--out {}: {e}", path.display())))?;
            Ok(CommandOutput::ok(format!(
                "wrote {} ({} critical values)\n",
                path.display(),
                components.len()
            )))
        }
        None => Ok(CommandOutput::ok(svg)),
    }
}
