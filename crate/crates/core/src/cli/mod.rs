//! The `lpmra` command line.
//!
//! Exit status: 0 on success, 1 when an invariant check fails, 2 on usage,
//! parse, input or I/O errors.

mod config;
mod experiments;
mod output;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

pub use config::{Experiment, ExperimentConfig};
pub use experiments::{
    build_context, load_inputs, run_config, Input, RunOutcome, KHINTCHINE_COLUMNS, LP_RATIO_COLUMNS,
    SIGN_SWEEP_COLUMNS, SQUARE_FN_COLUMNS, SUITE_COLUMNS, WEAK11_COLUMNS,
};
pub use output::{ratio_plot, write_atomic, Table, OUT_DIR_ENV};

use crate::czd::{cz_decompose, verify_cz};
use crate::error::{Error, Result};
use crate::grid::{Grid1D, MultiIndex, SampledFunction};
use crate::proj1d::{Operator1D, ProjectorContext};
use crate::scaling::{biorthogonality_defect, ScalingSpec};
use crate::tensor::{DetailPath, TensorContext};

const DEFAULT_OUT_DIR: &str = "lpmra-out";

#[derive(Debug, Parser)]
#[command(name = "lpmra", version, about = "Multiresolution projectors and Littlewood-Paley experiments on dyadic grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a scaling system file (phi block, then phi-dual block).
    GenScaling(GenScalingArgs),
    /// Report the decay conditions and biorthogonality defect of a system.
    Validate(ValidateArgs),
    /// Apply the 1-D projector E_kappa (or the detail D_kappa) to a function file.
    Project(ProjectArgs),
    /// Apply the tensor projector E_kappa (or the detail D_kappa) in d dimensions.
    ProjectNd(ProjectNdArgs),
    /// Calderón-Zygmund decomposition of a 1-D function file.
    Czd(CzdArgs),
    /// Square function norms (optionally the functions themselves).
    SquareFn(InputArgs),
    /// ||S f||_p / ||f||_p for every input and exponent.
    LpRatio(InputArgs),
    /// Randomized sign sums sum sigma_kappa D_kappa f.
    SignSweep(SweepArgs),
    /// Khintchine moments of a Rademacher sum.
    Khintchine(KhintchineArgs),
    /// Weak-(1,1) levels of the one-dimensional sign sum.
    Weak11(Weak11Args),
    /// Run the acceptance battery.
    Suite(SuiteArgs),
    /// Run the experiments named in a key = value config file.
    Run(RunArgs),
}

#[derive(Debug, Args)]
struct OutDir {
    /// Output directory [default: lpmra-out, or the config's `output`].
    #[arg(long, env = OUT_DIR_ENV)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Scaling system per axis: haar, dbN or file:PATH. One value applies to every axis.
    #[arg(long, value_delimiter = ',')]
    scaling: Vec<String>,
    #[arg(long)]
    dim: Option<usize>,
    /// Sampling resolution J (2^J cells per unit).
    #[arg(short = 'J', long = "resolution")]
    resolution: Option<u32>,
    /// Box `LO,HI` in unit coordinates [default: [-m, 1 + m) for generator overhang m].
    #[arg(long = "box")]
    bounds: Option<String>,
    /// Largest scale, one value or one per axis, e.g. 6 or 6,4 [default: J - 4].
    #[arg(long)]
    k_cap: Option<String>,
    /// Exponents in (1, inf).
    #[arg(short, long = "p", value_delimiter = ',')]
    ps: Vec<String>,
}

#[derive(Debug, Args)]
struct CorpusArgs {
    /// Built-in generators: box, step, bump, spike, scale-limited, mixed.
    #[arg(long, value_delimiter = ',')]
    corpus: Vec<String>,
    /// Function files on the experiment grid.
    #[arg(short, long = "input")]
    inputs: Vec<String>,
    #[arg(long)]
    per_kind: Option<usize>,
    /// Finest scale of dyadic and scale-limited corpus entries [default: k_cap - 2].
    #[arg(long)]
    scale: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Skip the SVG plot.
    #[arg(long)]
    no_svg: bool,
}

#[derive(Debug, Args)]
struct InputArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Also write each square function as a function file (square-fn only).
    #[arg(long)]
    save_fn: bool,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    trials: Option<usize>,
    /// Exploratory: an independent sign for every multi-index (outside the theorem for d >= 2).
    #[arg(long)]
    free_signs: bool,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Debug, Args)]
struct Weak11Args {
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    trials: Option<usize>,
    /// Levels alpha [default: just below every attained value of |T f|].
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<String>,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Debug, Args)]
struct KhintchineArgs {
    /// Coefficients a_kappa, comma separated.
    #[arg(long, conflicts_with = "terms")]
    coefficients: Option<String>,
    /// Number of unit coefficients [default: 10].
    #[arg(long)]
    terms: Option<usize>,
    #[arg(short, long = "p", value_delimiter = ',')]
    ps: Vec<String>,
    /// Seed of the Monte Carlo mode (more than 12 terms).
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Debug, Args)]
struct SuiteArgs {
    /// Run only these criteria.
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Debug, Args)]
struct RunArgs {
    config: PathBuf,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Debug, Args)]
struct GenScalingArgs {
    #[arg(long, default_value = "haar")]
    scaling: String,
    #[arg(short = 'J', long = "resolution", default_value_t = 10)]
    resolution: u32,
    /// Sampling box `LO,HI` for Haar; other systems use their support.
    #[arg(long = "box", default_value = "0,1")]
    bounds: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long, default_value = "haar")]
    scaling: String,
    #[arg(short = 'J', long = "resolution", default_value_t = 10)]
    resolution: u32,
    #[arg(long = "box", default_value = "0,1")]
    bounds: String,
    #[arg(long, default_value_t = 3)]
    shift_range: u32,
    /// Largest biorthogonality defect accepted.
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    /// Also write the report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ProjectArgs {
    #[arg(long)]
    kappa: u32,
    #[arg(long, default_value = "haar")]
    scaling: String,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Apply D_kappa = E_kappa - E_{kappa-1} instead.
    #[arg(long)]
    detail: bool,
}

#[derive(Debug, Args)]
struct ProjectNdArgs {
    /// Multi-index, e.g. 2,1.
    #[arg(long)]
    kappa: String,
    /// One system, or one per axis.
    #[arg(long, value_delimiter = ',', default_value = "haar")]
    scaling: Vec<String>,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    detail: bool,
    /// How details are formed: factored or inclusion-exclusion.
    #[arg(long, default_value = "factored")]
    path: String,
}

#[derive(Debug, Args)]
struct CzdArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long = "in")]
    input: PathBuf,
    /// JSON description; g and each h_r are written next to it.
    #[arg(long)]
    out: PathBuf,
}

/// Config text for a subcommand; flags become `key = value` lines so the
/// subcommands share validation and hashing with `run`.
struct Lines(String);

impl Lines {
    fn new(experiment: Experiment) -> Self {
        Lines(format!("experiment = {experiment}\n"))
    }

    fn put(&mut self, key: &str, value: impl std::fmt::Display) {
        self.0.push_str(&format!("{key} = {value}\n"));
    }

    fn opt(&mut self, key: &str, value: Option<impl std::fmt::Display>) {
        if let Some(v) = value {
            self.put(key, v);
        }
    }

    fn grid(&mut self, g: &GridArgs) {
        for s in &g.scaling {
            self.put("scaling", s);
        }
        self.opt("dim", g.dim);
        self.opt("J", g.resolution);
        self.opt("box", g.bounds.as_ref());
        self.opt("k_cap", g.k_cap.as_ref());
        for p in &g.ps {
            self.put("p", p);
        }
    }

    fn corpus(&mut self, c: &CorpusArgs) {
        for k in &c.corpus {
            self.put("corpus", k);
        }
        for i in &c.inputs {
            self.put("input", i);
        }
        self.opt("per_kind", c.per_kind);
        self.opt("scale", c.scale);
        self.opt("seed", c.seed);
        if c.no_svg {
            self.put("svg", false);
        }
    }

    /// Parses the generated text. Line numbers mean nothing to a flag user,
    /// so parse errors lose them.
    fn config(self) -> Result<ExperimentConfig> {
        if let Some(bad) = self.0.lines().find(|l| l.contains('#') || l.matches('=').count() > 1) {
            return Err(Error::Domain(format!("invalid character in option value: {bad:?}")));
        }
        ExperimentConfig::parse(&self.0).map_err(|e| match e {
            Error::Parse { msg, .. } => Error::Domain(msg),
            other => other,
        })
    }
}

fn parse_bounds(s: &str) -> Result<(i64, i64)> {
    let v: Vec<i64> = s
        .split(',')
        .map(|x| x.trim().parse().map_err(|_| Error::Domain(format!("invalid box {s:?}; expected LO,HI"))))
        .collect::<Result<_>>()?;
    match v.as_slice() {
        [lo, hi] if lo < hi => Ok((*lo, *hi)),
        _ => Err(Error::Domain(format!("invalid box {s:?}; expected LO,HI with LO < HI"))),
    }
}

fn read_function(path: &Path) -> Result<SampledFunction> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    SampledFunction::read_from(std::io::BufReader::new(file))
}

/// Resolution order: `--out-dir`, then the environment variable, then the
/// config's `output`, then the default.
fn resolve_out_dir(flag: &OutDir, config: Option<&Path>) -> PathBuf {
    flag.out_dir
        .clone()
        .or_else(|| config.map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

fn run_experiments(cfg: ExperimentConfig, out: &OutDir) -> Result<bool> {
    let dir = resolve_out_dir(out, cfg.output.as_deref());
    let outcome = run_config(&cfg, &dir, &mut |line| println!("{line}"))?;
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    for f in &outcome.failures {
        println!("invariant failed: {f}");
    }
    println!(
        "config {}: {}",
        outcome.hash,
        if outcome.passed() { "pass".to_string() } else { format!("{} invariant failures", outcome.failures.len()) }
    );
    Ok(outcome.passed())
}

fn gen_scaling(a: &GenScalingArgs) -> Result<bool> {
    let spec: ScalingSpec = a.scaling.parse()?;
    let (lo, hi) = parse_bounds(&a.bounds)?;
    let sys = spec.build(a.resolution, Grid1D::from_unit_bounds(a.resolution, lo, hi)?)?;
    write_atomic(&a.out, sys.to_text().as_bytes())?;
    let (s0, s1) = sys.support();
    println!(
        "wrote {} ({spec}, J = {}, support [{s0}, {s1}), orthonormal: {})",
        a.out.display(),
        a.resolution,
        sys.orthonormal()
    );
    Ok(true)
}

fn validate(a: &ValidateArgs) -> Result<bool> {
    let spec: ScalingSpec = a.scaling.parse()?;
    let (lo, hi) = parse_bounds(&a.bounds)?;
    let sys = spec.build(a.resolution, Grid1D::from_unit_bounds(a.resolution, lo, hi)?)?;
    let report = sys.condition_report();
    let defect = biorthogonality_defect(&sys, a.shift_range)?;
    let ok = report.valid() && defect <= a.tolerance;
    let value = json!({
        "scaling": spec.to_string(),
        "resolution": a.resolution,
        "orthonormal": sys.orthonormal(),
        "conditions": report,
        "conditions_valid": report.valid(),
        "biorthogonality_defect": defect,
        "shift_range": a.shift_range,
        "tolerance": a.tolerance,
        "valid": ok,
    });
    let mut text = serde_json::to_string_pretty(&value).map_err(|e| Error::Io(e.into()))?;
    text.push('\n');
    print!("{text}");
    if let Some(path) = &a.out {
        write_atomic(path, text.as_bytes())?;
    }
    Ok(ok)
}

fn project(a: &ProjectArgs) -> Result<bool> {
    let f = read_function(&a.input)?;
    if f.dim() != 1 {
        return Err(Error::Structural(format!("{} is {}-dimensional; use project-nd", a.input.display(), f.dim())));
    }
    let axis = f.axis();
    let sys = a.scaling.parse::<ScalingSpec>()?.build(axis.resolution(), axis)?;
    let ctx = ProjectorContext::new(sys, axis)?;
    let op = if a.detail { Operator1D::Detail(a.kappa) } else { Operator1D::Project(a.kappa) };
    let g = ctx.apply(&f, op)?;
    write_atomic(&a.out, g.to_text().as_bytes())?;
    println!("wrote {}", a.out.display());
    Ok(true)
}

fn project_nd(a: &ProjectNdArgs) -> Result<bool> {
    let f = read_function(&a.input)?;
    let kappa: MultiIndex = a.kappa.parse()?;
    let axis = f.axis();
    let specs = a.scaling.iter().map(|s| s.parse::<ScalingSpec>()).collect::<Result<Vec<_>>>()?;
    if specs.len() != 1 && specs.len() != f.dim() {
        return Err(Error::Domain(format!("{} scaling systems for d = {}", specs.len(), f.dim())));
    }
    let systems = (0..f.dim())
        .map(|j| specs[j.min(specs.len() - 1)].build(axis.resolution(), axis))
        .collect::<Result<Vec<_>>>()?;
    let ctx = TensorContext::new(systems, axis)?;
    let g = if a.detail {
        let path = match a.path.as_str() {
            "factored" => DetailPath::Factored,
            "inclusion-exclusion" => DetailPath::InclusionExclusion,
            other => return Err(Error::Domain(format!("unknown detail path {other:?}"))),
        };
        ctx.detail_nd_with(&f, &kappa, path)?
    } else {
        ctx.project_nd(&f, &kappa)?
    };
    write_atomic(&a.out, g.to_text().as_bytes())?;
    println!("wrote {}", a.out.display());
    Ok(true)
}

fn czd(a: &CzdArgs) -> Result<bool> {
    let f = read_function(&a.input)?;
    let dec = cz_decompose(&f, a.alpha)?;
    let report = verify_cz(&dec, &f)?;
    let dir = a.out.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let stem = a.out.file_stem().map_or("dec".into(), |s| s.to_string_lossy().into_owned());
    let good = format!("{stem}.g.fn");
    write_atomic(&dir.join(&good), dec.good.to_text().as_bytes())?;
    let mut parts = Vec::new();
    for (r, h) in dec.bad_parts.iter().enumerate() {
        let name = format!("{stem}.h{r}.fn");
        write_atomic(&dir.join(&name), h.to_text().as_bytes())?;
        parts.push(name);
    }
    let value = json!({
        "alpha": dec.alpha,
        "resolution": dec.resolution(),
        "selected": dec.selected.iter().map(|q| json!({
            "kappa": q.kappa, "nu": q.nu, "left": q.left(), "right": q.right()
        })).collect::<Vec<_>>(),
        "good": good,
        "bad_parts": parts,
        "checks": report.checks,
        "all_passed": report.all_passed(),
    });
    let mut text = serde_json::to_string_pretty(&value).map_err(|e| Error::Io(e.into()))?;
    text.push('\n');
    write_atomic(&a.out, text.as_bytes())?;
    println!(
        "wrote {} ({} intervals); properties {}",
        a.out.display(),
        dec.selected.len(),
        if report.all_passed() { "hold" } else { "FAILED" }
    );
    Ok(report.all_passed())
}

fn dispatch(command: Command) -> Result<bool> {
    match command {
        Command::GenScaling(a) => gen_scaling(&a),
        Command::Validate(a) => validate(&a),
        Command::Project(a) => project(&a),
        Command::ProjectNd(a) => project_nd(&a),
        Command::Czd(a) => czd(&a),
        Command::SquareFn(a) => {
            let mut l = Lines::new(Experiment::SquareFn);
            l.grid(&a.grid);
            l.corpus(&a.corpus);
            if a.save_fn {
                l.put("save_fn", true);
            }
            run_experiments(l.config()?, &a.out)
        }
        Command::LpRatio(a) => {
            let mut l = Lines::new(Experiment::LpRatio);
            l.grid(&a.grid);
            l.corpus(&a.corpus);
            run_experiments(l.config()?, &a.out)
        }
        Command::SignSweep(a) => {
            let mut l = Lines::new(Experiment::SignSweep);
            l.grid(&a.grid);
            l.corpus(&a.corpus);
            l.opt("trials", a.trials);
            if a.free_signs {
                l.put("signs", "free");
            }
            run_experiments(l.config()?, &a.out)
        }
        Command::Weak11(a) => {
            let mut l = Lines::new(Experiment::Weak11);
            l.grid(&a.grid);
            l.corpus(&a.corpus);
            l.opt("trials", a.trials);
            for x in &a.alpha {
                l.put("alpha", x);
            }
            run_experiments(l.config()?, &a.out)
        }
        Command::Khintchine(a) => {
            let mut l = Lines::new(Experiment::Khintchine);
            l.opt("coefficients", a.coefficients.as_ref());
            l.opt("terms", a.terms);
            for p in &a.ps {
                l.put("p", p);
            }
            l.opt("seed", a.seed);
            run_experiments(l.config()?, &a.out)
        }
        Command::Suite(a) => {
            let mut l = Lines::new(Experiment::Suite);
            for c in &a.only {
                l.put("criterion", c);
            }
            run_experiments(l.config()?, &a.out)
        }
        Command::Run(a) => {
            let text = std::fs::read_to_string(&a.config)
                .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", a.config.display()))))?;
            let cfg = ExperimentConfig::parse(&text)?;
            run_experiments(cfg, &a.out)
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = dispatch(cli.command);
    let _ = std::io::stdout().flush();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
