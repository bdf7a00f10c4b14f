//! Runs the experiments named by a config and collects their tables,
//! summaries and invariant failures.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::corpus::{build_corpus, CorpusSpec};
use crate::error::{Error, Result};
use crate::grid::{Grid1D, MultiIndex, SampledFunction};
use crate::lpverify::{
    khintchine_check_with, lp_ratios, sign_sweep_many, tensor_pattern, weak11_check, weak11_sup, DetailBank,
    KhintchineMode, SignMode,
};
use crate::scaling::{ScalingSpec, ScalingSystem};
use crate::suite::{run_criterion, CRITERIA};
use crate::tensor::TensorContext;

use super::config::{Experiment, ExperimentConfig};
use super::output::{out_path, ratio_plot, write_atomic, Table};

pub const LP_RATIO_COLUMNS: [&str; 9] =
    ["config_hash", "f_id", "kind", "scale", "p", "norm_f", "norm_sf", "ratio", "truncation_error"];
pub const SQUARE_FN_COLUMNS: [&str; 7] = ["config_hash", "f_id", "kind", "scale", "p", "norm_f", "norm_sf"];
pub const SIGN_SWEEP_COLUMNS: [&str; 9] =
    ["config_hash", "f_id", "mode", "trial", "pattern_seed", "p", "norm_f", "norm", "ratio"];
pub const KHINTCHINE_COLUMNS: [&str; 11] = [
    "config_hash",
    "terms",
    "mode",
    "p",
    "moment",
    "l2",
    "ratio",
    "lower_ratio",
    "upper_ratio",
    "a_p",
    "b_p",
];
pub const WEAK11_COLUMNS: [&str; 7] = ["config_hash", "f_id", "trial", "pattern_seed", "alpha", "measure", "product"];
pub const SUITE_COLUMNS: [&str; 8] =
    ["config_hash", "id", "title", "passed", "property_ok", "elapsed_secs", "budget_secs", "detail"];

/// Parseval tolerance at `p = 2` for inputs representable at the cap.
const PARSEVAL_TOL: f64 = 1e-3;
/// Sign invariance tolerance at `p = 2`.
const SIGN_P2_TOL: f64 = 1e-6;
/// Desk-scale bracket for the norm equivalence ratio.
const BRACKET: (f64, f64) = (0.05, 20.0);
const SPREAD_BOUND: f64 = 10.0;

/// An input function with its provenance.
pub struct Input {
    pub id: String,
    pub kind: String,
    /// Finest scale `s` with the input in `V_s`, when known.
    pub scale: Option<u32>,
    pub f: SampledFunction,
}

struct ExperimentResult {
    table: Table,
    summary: Value,
    failures: Vec<String>,
    plot: Option<String>,
    extra: Vec<(PathBuf, Vec<u8>)>,
}

/// What a run wrote and whether every invariant held.
#[derive(Debug)]
pub struct RunOutcome {
    pub hash: String,
    pub files: Vec<PathBuf>,
    pub failures: Vec<String>,
    pub summary: Value,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn margin(sys: &ScalingSystem) -> i64 {
    let (lo, hi) = sys.support();
    (hi - lo - 1.0).max(0.0).ceil() as i64
}

/// Builds the systems and the context. Without an explicit box the box is
/// `[-m, 1 + m)` with `m` the generator overhang, which leaves `[0, 1)` as
/// the interior region.
pub fn build_context(cfg: &ExperimentConfig) -> Result<TensorContext> {
    let j = cfg.resolution;
    let specs: Vec<&ScalingSpec> = (0..cfg.dim).map(|i| &cfg.scaling[i.min(cfg.scaling.len() - 1)]).collect();
    // Haar is sampled on the box; every other system carries its own grid
    let probe = Grid1D::from_unit_bounds(j, 0, 1)?;
    let mut m = 0;
    for spec in &specs {
        if **spec != ScalingSpec::Haar {
            m = m.max(margin(&spec.build(j, probe)?));
        }
    }
    let (lo, hi) = cfg.bounds.unwrap_or((-m, 1 + m));
    let domain = Grid1D::from_unit_bounds(j, lo, hi)?;
    let systems = specs.iter().map(|s| s.build(j, domain)).collect::<Result<Vec<_>>>()?;
    TensorContext::new(systems, domain)
}

pub fn load_inputs(cfg: &ExperimentConfig, ctx: &TensorContext) -> Result<Vec<Input>> {
    let mut inputs = Vec::new();
    if !cfg.corpus.is_empty() && cfg.per_kind > 0 {
        let spec = CorpusSpec::new(cfg.corpus.clone(), cfg.per_kind, cfg.seed, cfg.scale);
        for e in build_corpus(ctx, &spec)? {
            inputs.push(Input {
                id: e.id,
                kind: e.kind.to_string(),
                scale: e.scale,
                f: e.f,
            });
        }
    }
    for path in &cfg.inputs {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
        let f = SampledFunction::read_from(std::io::BufReader::new(file))?;
        if f.grid() != ctx.grid() {
            return Err(Error::GridMismatch(format!(
                "{} is sampled on {} but the experiment grid is {}",
                path.display(),
                f.grid(),
                ctx.grid()
            )));
        }
        let id = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        inputs.push(Input {
            id,
            kind: "file".into(),
            scale: None,
            f,
        });
    }
    if inputs.is_empty() {
        return Err(Error::Domain(
            "no inputs: the corpus is empty and no input files were given".into(),
        ));
    }
    Ok(inputs)
}

fn num(x: f64) -> String {
    x.to_string()
}

fn scale_cell(s: Option<u32>) -> String {
    s.map_or(String::new(), |s| s.to_string())
}

/// The ratio is exactly one at `p = 2` only for orthonormal systems and
/// inputs the capped projector reproduces.
fn parseval_applies(ctx: &TensorContext, input: &Input, k_cap: &MultiIndex) -> Result<bool> {
    let orthonormal = (0..ctx.dim()).map(|j| ctx.axis(j).map(|a| a.system().orthonormal())).collect::<Result<Vec<_>>>()?;
    let min_cap = k_cap.components().iter().copied().min().unwrap_or(0);
    Ok(orthonormal.into_iter().all(|o| o) && input.scale.is_some_and(|s| s <= min_cap))
}

fn lp_ratio(cfg: &ExperimentConfig, hash: &str, ctx: &TensorContext, inputs: &[Input]) -> Result<ExperimentResult> {
    let mut table = Table::new(&LP_RATIO_COLUMNS);
    let mut failures = Vec::new();
    let mut per_p: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
    let mut series = Vec::new();
    let mut parseval_dev = 0.0f64;
    for input in inputs {
        let records = lp_ratios(ctx, &input.f, &input.id, &cfg.ps, &cfg.k_cap)?;
        let exact = parseval_applies(ctx, input, &cfg.k_cap)?;
        for (i, r) in records.iter().enumerate() {
            table.push(vec![
                hash.into(),
                input.id.clone(),
                input.kind.clone(),
                scale_cell(input.scale),
                num(r.p),
                num(r.norm_f),
                num(r.norm_sf),
                num(r.ratio),
                num(r.truncation_error),
            ]);
            let e = per_p.entry(i).or_insert((f64::INFINITY, 0.0));
            *e = (e.0.min(r.ratio), e.1.max(r.ratio));
            if !(r.ratio.is_finite() && r.ratio > 0.0) {
                failures.push(format!("lp-ratio {} p={}: ratio {} is not positive and finite", input.id, r.p, r.ratio));
            } else if r.p == 2.0 && exact {
                parseval_dev = parseval_dev.max((r.ratio - 1.0).abs());
                if (r.ratio - 1.0).abs() > PARSEVAL_TOL {
                    failures.push(format!("lp-ratio {} p=2: ratio {} outside 1 +- {PARSEVAL_TOL}", input.id, r.ratio));
                }
            } else if r.p != 2.0 && !(BRACKET.0..=BRACKET.1).contains(&r.ratio) {
                failures.push(format!(
                    "lp-ratio {} p={}: ratio {} outside [{}, {}]",
                    input.id, r.p, r.ratio, BRACKET.0, BRACKET.1
                ));
            }
        }
        series.push((input.id.clone(), records.iter().map(|r| (r.p, r.ratio)).collect()));
    }
    let by_p: Vec<Value> = per_p
        .iter()
        .map(|(&i, &(lo, hi))| {
            json!({ "p": cfg.ps[i], "inputs": inputs.len(), "min_ratio": lo, "max_ratio": hi, "spread": hi / lo })
        })
        .collect();
    Ok(ExperimentResult {
        table,
        summary: json!({ "by_p": by_p, "parseval_max_deviation": parseval_dev }),
        failures,
        plot: cfg.svg.then(|| ratio_plot("||S f||_p / ||f||_p", &series)),
        extra: Vec::new(),
    })
}

fn square_fn(
    cfg: &ExperimentConfig,
    hash: &str,
    ctx: &TensorContext,
    inputs: &[Input],
    out_dir: &Path,
) -> Result<ExperimentResult> {
    let mut table = Table::new(&SQUARE_FN_COLUMNS);
    let mut failures = Vec::new();
    let mut extra = Vec::new();
    for input in inputs {
        let sf = crate::lpverify::square_function(ctx, &input.f, &cfg.k_cap)?;
        for &p in &cfg.ps {
            let (nf, ns) = (crate::grid::lp_norm(&input.f, p)?, crate::grid::lp_norm(&sf, p)?);
            if !ns.is_finite() {
                failures.push(format!("square-fn {} p={p}: norm {ns} is not finite", input.id));
            }
            table.push(vec![
                hash.into(),
                input.id.clone(),
                input.kind.clone(),
                scale_cell(input.scale),
                num(p),
                num(nf),
                num(ns),
            ]);
        }
        if cfg.save_fn {
            extra.push((out_path(out_dir, &format!("square-fn-{}", input.id), hash, "fn"), sf.to_text().into_bytes()));
        }
    }
    Ok(ExperimentResult {
        table,
        summary: json!({ "inputs": inputs.len(), "saved_functions": extra.len() }),
        failures,
        plot: None,
        extra,
    })
}

fn sign_sweep(cfg: &ExperimentConfig, hash: &str, ctx: &TensorContext, inputs: &[Input]) -> Result<ExperimentResult> {
    let mut table = Table::new(&SIGN_SWEEP_COLUMNS);
    let mut failures = Vec::new();
    let mut per_input = Vec::new();
    let mut series = Vec::new();
    let mode_name = match cfg.signs {
        SignMode::Tensor => "tensor",
        SignMode::Free => "free",
    };
    let checked = cfg.signs == SignMode::Tensor;
    for input in inputs {
        let bank = DetailBank::new(ctx, &input.f, &cfg.k_cap)?;
        let reports = sign_sweep_many(&bank, &input.f, &cfg.ps, cfg.trials, cfg.seed, cfg.signs)?;
        let exact = parseval_applies(ctx, input, &cfg.k_cap)?;
        // rows trial-major, p-minor
        for t in 0..cfg.trials {
            for r in &reports {
                let rec = &r.records[t];
                table.push(vec![
                    hash.into(),
                    input.id.clone(),
                    mode_name.into(),
                    rec.trial.to_string(),
                    rec.pattern_seed.to_string(),
                    num(rec.p),
                    num(r.norm_f),
                    num(rec.norm),
                    num(rec.ratio),
                ]);
            }
        }
        let mut stats = Vec::new();
        for r in &reports {
            stats.push(json!({
                "p": r.p, "min": r.min, "median": r.median, "max": r.max, "spread": r.spread()
            }));
            if !checked {
                continue;
            }
            if r.p == 2.0 && exact {
                let dev = r.records.iter().map(|x| (x.ratio - 1.0).abs()).fold(0.0, f64::max);
                if dev > SIGN_P2_TOL {
                    failures.push(format!("sign-sweep {} p=2: |ratio - 1| = {dev:e} above {SIGN_P2_TOL:e}", input.id));
                }
            } else if r.p != 2.0 && (r.spread().is_nan() || r.spread() > SPREAD_BOUND) {
                failures.push(format!(
                    "sign-sweep {} p={}: max/median {} above {SPREAD_BOUND}",
                    input.id,
                    r.p,
                    r.spread()
                ));
            }
        }
        series.push((input.id.clone(), reports.iter().map(|r| (r.p, r.median)).collect()));
        per_input.push(json!({ "f_id": input.id, "by_p": stats }));
    }
    let mut summary = json!({ "mode": mode_name, "trials": cfg.trials, "inputs": per_input });
    if !checked {
        summary["note"] = json!(
            "exploratory: independent signs for every multi-index are outside the theorem; no bounds are checked"
        );
    }
    Ok(ExperimentResult {
        table,
        summary,
        failures,
        plot: cfg.svg.then(|| ratio_plot("median ||T_sigma f||_p / ||f||_p", &series)),
        extra: Vec::new(),
    })
}

fn khintchine(cfg: &ExperimentConfig, hash: &str) -> Result<ExperimentResult> {
    let mut table = Table::new(&KHINTCHINE_COLUMNS);
    let mut failures = Vec::new();
    let mode = match KhintchineMode::auto(cfg.coefficients.len()) {
        KhintchineMode::MonteCarlo { samples, .. } => KhintchineMode::MonteCarlo { samples, seed: cfg.seed },
        m => m,
    };
    let mut reports = Vec::new();
    for &p in &cfg.ps {
        let r = khintchine_check_with(&cfg.coefficients, p, mode)?;
        table.push(vec![
            hash.into(),
            r.terms.to_string(),
            match r.mode {
                KhintchineMode::Exhaustive => "exhaustive".into(),
                KhintchineMode::MonteCarlo { .. } => "monte-carlo".into(),
            },
            num(r.p),
            num(r.moment),
            num(r.l2),
            num(r.ratio),
            num(r.lower_ratio),
            num(r.upper_ratio),
            num(r.a_p),
            num(r.b_p),
        ]);
        // Monte Carlo estimates are reported, not checked
        if mode == KhintchineMode::Exhaustive && r.l2 > 0.0 {
            if p == 2.0 && (r.ratio - 1.0).abs() > 1e-12 {
                failures.push(format!("khintchine p=2: ratio {} is not 1", r.ratio));
            }
            if r.lower_ratio > 1.0 + 1e-12 || r.upper_ratio < 1.0 - 1e-12 {
                failures.push(format!("khintchine p={p}: ratio {} outside [A_p, B_p]", r.ratio));
            }
        }
        reports.push(r);
    }
    Ok(ExperimentResult {
        table,
        summary: json!({ "coefficients": cfg.coefficients, "reports": reports }),
        failures,
        plot: None,
        extra: Vec::new(),
    })
}

fn weak11(cfg: &ExperimentConfig, hash: &str, ctx: &TensorContext, inputs: &[Input]) -> Result<ExperimentResult> {
    if ctx.dim() != 1 {
        return Err(Error::Structural(format!("weak11 is one-dimensional, config has d = {}", ctx.dim())));
    }
    let k = cfg.k_cap.components()[0];
    let mut table = Table::new(&WEAK11_COLUMNS);
    let mut failures = Vec::new();
    let mut per_input = Vec::new();
    for input in inputs {
        let mut best = 0.0f64;
        for trial in 0..cfg.trials {
            let pattern_seed = cfg.seed.wrapping_add(trial as u64);
            let pattern = tensor_pattern(pattern_seed, &cfg.k_cap);
            let points = if cfg.alphas.is_empty() {
                vec![weak11_sup(ctx, &input.f, &pattern, k)?]
            } else {
                weak11_check(ctx, &input.f, &pattern, k, &cfg.alphas)?
            };
            for w in points {
                best = best.max(w.product);
                table.push(vec![
                    hash.into(),
                    input.id.clone(),
                    trial.to_string(),
                    pattern_seed.to_string(),
                    num(w.alpha),
                    num(w.measure),
                    num(w.product),
                ]);
            }
        }
        if !(best.is_finite() && best > 0.0) {
            failures.push(format!("weak11 {}: constant {best} is not positive and finite", input.id));
        }
        per_input.push(json!({ "f_id": input.id, "constant": best }));
    }
    Ok(ExperimentResult {
        table,
        summary: json!({
            "levels": if cfg.alphas.is_empty() { json!("attained") } else { json!(cfg.alphas) },
            "inputs": per_input
        }),
        failures,
        plot: None,
        extra: Vec::new(),
    })
}

fn suite(cfg: &ExperimentConfig, hash: &str, report: &mut dyn FnMut(&str)) -> Result<ExperimentResult> {
    let ids: Vec<u8> = if cfg.criteria.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { cfg.criteria.clone() };
    let mut table = Table::new(&SUITE_COLUMNS);
    let mut failures = Vec::new();
    let mut outcomes = Vec::new();
    for id in ids {
        match run_criterion(id) {
            Ok(o) => {
                report(&o.line());
                if !o.passed() {
                    failures.push(format!("suite criterion {id}: {}", o.detail));
                }
                table.push(vec![
                    hash.into(),
                    id.to_string(),
                    o.title.into(),
                    o.passed().to_string(),
                    o.property_ok.to_string(),
                    num(o.elapsed_secs),
                    num(o.budget_secs),
                    o.detail.clone(),
                ]);
                outcomes.push(serde_json::to_value(&o).map_err(|e| Error::Io(e.into()))?);
            }
            Err(e) => {
                let title = CRITERIA.iter().find(|c| c.0 == id).map_or("", |c| c.1);
                report(&format!("FAIL [{id:>2}] {title}: error: {e}"));
                failures.push(format!("suite criterion {id}: {e}"));
                table.push(vec![
                    hash.into(),
                    id.to_string(),
                    title.into(),
                    "false".into(),
                    "false".into(),
                    String::new(),
                    String::new(),
                    format!("error: {e}"),
                ]);
            }
        }
    }
    Ok(ExperimentResult {
        table,
        summary: json!({ "criteria": outcomes }),
        failures,
        plot: None,
        extra: Vec::new(),
    })
}

/// Runs every experiment of `cfg`, writing `<experiment>-<hash>.csv` (plus
/// `.svg` plots and saved functions) and `summary-<hash>.json` into
/// `out_dir`. `report` receives progress lines.
pub fn run_config(cfg: &ExperimentConfig, out_dir: &Path, report: &mut dyn FnMut(&str)) -> Result<RunOutcome> {
    let hash = cfg.hash();
    let needs_inputs = cfg.experiments.iter().any(|e| e.needs_inputs());
    let (ctx, inputs) = if needs_inputs {
        let ctx = build_context(cfg)?;
        let inputs = load_inputs(cfg, &ctx)?;
        (Some(ctx), inputs)
    } else {
        (None, Vec::new())
    };
    let mut files = Vec::new();
    let mut failures = Vec::new();
    let mut summaries = serde_json::Map::new();
    for &exp in &cfg.experiments {
        let ctx = || ctx.as_ref().expect("context is built for input experiments");
        let result = match exp {
            Experiment::LpRatio => lp_ratio(cfg, &hash, ctx(), &inputs)?,
            Experiment::SquareFn => square_fn(cfg, &hash, ctx(), &inputs, out_dir)?,
            Experiment::SignSweep => sign_sweep(cfg, &hash, ctx(), &inputs)?,
            Experiment::Khintchine => khintchine(cfg, &hash)?,
            Experiment::Weak11 => weak11(cfg, &hash, ctx(), &inputs)?,
            Experiment::Suite => suite(cfg, &hash, report)?,
        };
        let csv = out_path(out_dir, exp.name(), &hash, "csv");
        write_atomic(&csv, &result.table.to_csv()?)?;
        files.push(csv);
        if let Some(svg) = &result.plot {
            let path = out_path(out_dir, exp.name(), &hash, "svg");
            write_atomic(&path, svg.as_bytes())?;
            files.push(path);
        }
        for (path, bytes) in &result.extra {
            write_atomic(path, bytes)?;
            files.push(path.clone());
        }
        report(&format!(
            "{exp}: {} rows, {} invariant failures",
            result.table.rows.len(),
            result.failures.len()
        ));
        let mut s = result.summary;
        s["rows"] = json!(result.table.rows.len());
        s["failures"] = json!(result.failures);
        summaries.insert(exp.name().into(), s);
        failures.extend(result.failures);
    }
    let summary = json!({
        "config_hash": hash,
        "config": cfg.canonical().lines().collect::<Vec<_>>(),
        "status": if failures.is_empty() { "pass" } else { "fail" },
        "failures": failures,
        "experiments": summaries,
    });
    let path = out_path(out_dir, "summary", &hash, "json");
    let mut text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.into()))?;
    text.push('\n');
    write_atomic(&path, text.as_bytes())?;
    files.push(path);
    Ok(RunOutcome {
        hash,
        files,
        failures,
        summary,
    })
}
