//! Flat `key = value` experiment configs.
//!
//! One setting per line, `#` starts a comment, list keys (`experiment`,
//! `scaling`, `p`, `corpus`, `input`, `alpha`, `criterion`) may repeat. Every other key
//! may appear once.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::corpus::CorpusKind;
use crate::error::{Error, Result};
use crate::grid::{kappa_limit, MultiIndex};
use crate::lpverify::SignMode;
use crate::scaling::ScalingSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Experiment {
    LpRatio,
    SquareFn,
    SignSweep,
    Khintchine,
    Weak11,
    Suite,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::LpRatio => "lp-ratio",
            Experiment::SquareFn => "square-fn",
            Experiment::SignSweep => "sign-sweep",
            Experiment::Khintchine => "khintchine",
            Experiment::Weak11 => "weak11",
            Experiment::Suite => "suite",
        }
    }

    /// Whether the experiment reads the grid, corpus and inputs.
    pub fn needs_inputs(self) -> bool {
        matches!(self, Experiment::LpRatio | Experiment::SquareFn | Experiment::SignSweep | Experiment::Weak11)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        [
            Experiment::LpRatio,
            Experiment::SquareFn,
            Experiment::SignSweep,
            Experiment::Khintchine,
            Experiment::Weak11,
            Experiment::Suite,
        ]
        .into_iter()
        .find(|e| e.name() == s)
        .ok_or_else(|| format!("unknown experiment {s:?}"))
    }
}

/// A fully resolved experiment description. Defaults are filled in, so
/// [`ExperimentConfig::canonical`] names every setting that affects output.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiments: Vec<Experiment>,
    /// One spec, or one per axis.
    pub scaling: Vec<ScalingSpec>,
    pub dim: usize,
    pub resolution: u32,
    /// Box in unit coordinates; `None` derives it from the systems.
    pub bounds: Option<(i64, i64)>,
    pub k_cap: MultiIndex,
    pub ps: Vec<f64>,
    pub corpus: Vec<CorpusKind>,
    pub inputs: Vec<PathBuf>,
    pub per_kind: usize,
    pub scale: u32,
    pub trials: usize,
    pub seed: u64,
    pub signs: SignMode,
    /// Weak-type levels; empty probes every attained level.
    pub alphas: Vec<f64>,
    pub coefficients: Vec<f64>,
    /// Acceptance criteria run by the suite; empty runs all of them.
    pub criteria: Vec<u8>,
    pub save_fn: bool,
    pub svg: bool,
    pub output: Option<PathBuf>,
}

const LIST_KEYS: [&str; 7] = ["experiment", "scaling", "p", "corpus", "input", "alpha", "criterion"];
const SCALAR_KEYS: [&str; 15] = [
    "dim",
    "J",
    "box",
    "k_cap",
    "per_kind",
    "scale",
    "trials",
    "seed",
    "signs",
    "coefficients",
    "save_fn",
    "svg",
    "output",
    "terms",
    "resolution",
];

struct Entries {
    lists: BTreeMap<&'static str, Vec<(usize, String)>>,
    scalars: BTreeMap<&'static str, (usize, String)>,
}

impl Entries {
    fn scalar<T>(&self, key: &str, parse: impl FnOnce(&str) -> std::result::Result<T, String>) -> Result<Option<(usize, T)>> {
        match self.scalars.get(key) {
            None => Ok(None),
            Some((line, raw)) => parse(raw)
                .map(|v| Some((*line, v)))
                .map_err(|msg| Error::Parse { line: *line, msg: format!("{key}: {msg}") }),
        }
    }

    fn list<T>(&self, key: &str, parse: impl Fn(&str) -> std::result::Result<T, String>) -> Result<Vec<(usize, T)>> {
        self.lists
            .get(key)
            .map(Vec::as_slice)
            .unwrap_or_default()
            .iter()
            .map(|(line, raw)| {
                parse(raw)
                    .map(|v| (*line, v))
                    .map_err(|msg| Error::Parse { line: *line, msg: format!("{key}: {msg}") })
            })
            .collect()
    }
}

fn parse_num<T: FromStr>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|_| format!("cannot parse {s:?}"))
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got {s:?}")),
    }
}

fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, String> {
    s.split(',').map(|x| parse_num(x.trim())).collect()
}

fn parse_exponent(s: &str) -> std::result::Result<f64, String> {
    let p: f64 = parse_num(s)?;
    if p > 1.0 && p.is_finite() {
        Ok(p)
    } else {
        Err(format!("p = {s} is outside (1, inf)"))
    }
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    let a: f64 = parse_num(s)?;
    if a > 0.0 && a.is_finite() {
        Ok(a)
    } else {
        Err(format!("{s} is not positive and finite"))
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Entries {
            lists: BTreeMap::new(),
            scalars: BTreeMap::new(),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                msg: format!("expected `key = value`, got {content:?}"),
            })?;
            let (key, value) = (key.trim(), value.trim().to_string());
            if value.is_empty() {
                return Err(Error::Parse { line, msg: format!("{key}: missing value") });
            }
            if let Some(k) = LIST_KEYS.iter().find(|k| **k == key) {
                entries.lists.entry(k).or_default().push((line, value));
            } else if let Some(k) = SCALAR_KEYS.iter().find(|k| **k == key) {
                if let Some((first, _)) = entries.scalars.insert(k, (line, value)) {
                    return Err(Error::Parse { line, msg: format!("{key} already set on line {first}") });
                }
            } else {
                return Err(Error::Parse { line, msg: format!("unknown key {key:?}") });
            }
        }
        Self::resolve(&entries)
    }

    fn resolve(e: &Entries) -> Result<Self> {
        let experiments: Vec<Experiment> = e.list("experiment", |s| s.parse())?.into_iter().map(|(_, x)| x).collect();
        if experiments.is_empty() {
            return Err(Error::Parse { line: 0, msg: "no experiment named; add `experiment = ...`".into() });
        }
        let scaling_lines = e.list("scaling", |s| s.parse::<ScalingSpec>().map_err(|err| err.to_string()))?;
        let dim = e.scalar("dim", parse_num::<usize>)?;
        let dim_value = dim.as_ref().map_or(1, |(_, d)| *d);
        if dim_value == 0 {
            return Err(Error::Parse { line: dim.map_or(0, |d| d.0), msg: "dim must be at least 1".into() });
        }
        let mut scaling: Vec<ScalingSpec> = scaling_lines.iter().map(|(_, s)| s.clone()).collect();
        if scaling.is_empty() {
            scaling.push(ScalingSpec::Haar);
        }
        if scaling.len() != 1 && scaling.len() != dim_value {
            return Err(Error::Parse {
                line: scaling_lines.last().map_or(0, |s| s.0),
                msg: format!("{} scaling entries for d = {dim_value}; give one or one per axis", scaling.len()),
            });
        }

        if e.scalars.contains_key("J") && e.scalars.contains_key("resolution") {
            let line = e.scalars["resolution"].0.max(e.scalars["J"].0);
            return Err(Error::Parse { line, msg: "J and resolution name the same setting".into() });
        }
        let resolution = match e.scalar("J", parse_num::<u32>)? {
            Some(r) => Some(r),
            None => e.scalar("resolution", parse_num::<u32>)?,
        };
        let (j_line, resolution) = resolution.unwrap_or((0, 10));
        let Some(limit) = kappa_limit(resolution).filter(|_| resolution <= 24) else {
            return Err(Error::Parse { line: j_line, msg: format!("J = {resolution} must lie in 4..=24") });
        };

        let bounds = e.scalar("box", |s| {
            let v = parse_list::<i64>(s)?;
            match v.as_slice() {
                [lo, hi] if lo < hi => Ok((*lo, *hi)),
                _ => Err(format!("expected `lo,hi` with lo < hi, got {s:?}")),
            }
        })?;

        let k_cap = match e.scalar("k_cap", |s| s.parse::<MultiIndex>().map_err(|err| err.to_string()))? {
            None => MultiIndex::splat(limit, dim_value),
            Some((line, k)) => {
                let k = if k.dim() == 1 && dim_value > 1 { MultiIndex::splat(k.components()[0], dim_value) } else { k };
                if k.dim() != dim_value {
                    return Err(Error::Parse { line, msg: format!("k_cap {k} has {} components for d = {dim_value}", k.dim()) });
                }
                if let Some(c) = k.components().iter().find(|c| **c > limit) {
                    return Err(Error::Parse {
                        line,
                        msg: format!("k_cap component {c} exceeds J - 4 = {limit} at J = {resolution}"),
                    });
                }
                k
            }
        };

        let mut ps: Vec<f64> = e.list("p", parse_exponent)?.into_iter().map(|(_, p)| p).collect();
        if ps.is_empty() {
            ps.push(2.0);
        }
        let corpus = e
            .list("corpus", |s| s.parse::<CorpusKind>().map_err(|err| err.to_string()))?
            .into_iter()
            .map(|(_, k)| k)
            .collect();
        let inputs = e.list("input", |s| Ok(PathBuf::from(s)))?.into_iter().map(|(_, p)| p).collect();
        let per_kind = e.scalar("per_kind", parse_num::<usize>)?.map_or(2, |x| x.1);
        let min_cap = k_cap.components().iter().copied().min().unwrap_or(0);
        let scale = match e.scalar("scale", parse_num::<u32>)? {
            Some((line, s)) if s > limit => {
                return Err(Error::Parse { line, msg: format!("scale {s} exceeds J - 4 = {limit}") });
            }
            Some((_, s)) => s,
            None => min_cap.saturating_sub(2),
        };
        let trials = match e.scalar("trials", parse_num::<usize>)? {
            Some((line, 0)) => return Err(Error::Parse { line, msg: "trials must be at least 1".into() }),
            Some((_, t)) => t,
            None => 200,
        };
        let seed = e.scalar("seed", parse_num::<u64>)?.map_or(0, |x| x.1);
        let signs = e
            .scalar("signs", |s| match s {
                "tensor" => Ok(SignMode::Tensor),
                "free" => Ok(SignMode::Free),
                _ => Err(format!("expected tensor or free, got {s:?}")),
            })?
            .map_or(SignMode::Tensor, |x| x.1);
        let alphas = e.list("alpha", positive)?.into_iter().map(|(_, a)| a).collect();

        let coefficients = match (e.scalar("coefficients", parse_list::<f64>)?, e.scalar("terms", parse_num::<usize>)?) {
            (Some((line, _)), Some(_)) => {
                return Err(Error::Parse { line, msg: "give either coefficients or terms, not both".into() });
            }
            (Some((line, c)), None) => {
                if c.iter().any(|a| !a.is_finite()) {
                    return Err(Error::Parse { line, msg: "coefficients must be finite".into() });
                }
                c
            }
            (None, Some((_, n))) => vec![1.0; n],
            (None, None) => vec![1.0; 10],
        };
        let criteria = e
            .list("criterion", |s| {
                let id: u8 = parse_num(s)?;
                if crate::suite::CRITERIA.iter().any(|c| c.0 == id) {
                    Ok(id)
                } else {
                    Err(format!("no acceptance criterion {id}"))
                }
            })?
            .into_iter()
            .map(|(_, id)| id)
            .collect();
        let save_fn = e.scalar("save_fn", parse_bool)?.is_some_and(|x| x.1);
        let svg = e.scalar("svg", parse_bool)?.is_none_or(|x| x.1);
        let output = e.scalar("output", |s| Ok(PathBuf::from(s)))?.map(|x| x.1);

        Ok(Self {
            experiments,
            scaling,
            dim: dim_value,
            resolution,
            bounds: bounds.map(|b| b.1),
            k_cap,
            ps,
            corpus,
            inputs,
            per_kind,
            scale,
            trials,
            seed,
            signs,
            alphas,
            coefficients,
            criteria,
            save_fn,
            svg,
            output,
        })
    }

    /// Every setting that affects results, one per line in a fixed order.
    /// The output directory is left out.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        for x in &self.experiments {
            put("experiment", x.to_string());
        }
        for s in &self.scaling {
            put("scaling", s.to_string());
        }
        put("dim", self.dim.to_string());
        put("J", self.resolution.to_string());
        put("box", self.bounds.map_or("auto".into(), |(lo, hi)| format!("{lo},{hi}")));
        put("k_cap", self.k_cap.to_string());
        for p in &self.ps {
            put("p", p.to_string());
        }
        for k in &self.corpus {
            put("corpus", k.to_string());
        }
        for i in &self.inputs {
            put("input", i.display().to_string());
        }
        put("per_kind", self.per_kind.to_string());
        put("scale", self.scale.to_string());
        put("trials", self.trials.to_string());
        put("seed", self.seed.to_string());
        put("signs", match self.signs {
            SignMode::Tensor => "tensor".into(),
            SignMode::Free => "free".into(),
        });
        for a in &self.alphas {
            put("alpha", a.to_string());
        }
        put("coefficients", self.coefficients.iter().map(f64::to_string).collect::<Vec<_>>().join(","));
        for c in &self.criteria {
            put("criterion", c.to_string());
        }
        put("save_fn", self.save_fn.to_string());
        put("svg", self.svg.to_string());
        out
    }

    /// First 16 hex digits of the SHA-256 of [`Self::canonical`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let c = ExperimentConfig::parse("experiment = lp-ratio\ncorpus = box\n").unwrap();
        assert_eq!(c.scaling, vec![ScalingSpec::Haar]);
        assert_eq!((c.dim, c.resolution), (1, 10));
        assert_eq!(c.k_cap, MultiIndex::new(vec![6]));
        assert_eq!(c.ps, vec![2.0]);
        assert_eq!(c.scale, 4);
    }

    #[test]
    fn comments_blank_lines_and_lists() {
        let text = "# header\n\nexperiment = lp-ratio  # trailing\np = 1.5\np = 4\ndim = 2\nk_cap = 3\n";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.ps, vec![1.5, 4.0]);
        assert_eq!(c.k_cap, MultiIndex::new(vec![3, 3]));
    }

    #[test]
    fn kappa_cap_above_the_limit_is_rejected_with_its_line() {
        let err = ExperimentConfig::parse("experiment = lp-ratio\nJ = 8\nk_cap = 5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(ExperimentConfig::parse("experiment = lp-ratio\nJ = 8\nk_cap = 4\n").is_ok());
    }

    #[test]
    fn malformed_lines_report_their_number() {
        for (text, line) in [
            ("experiment = lp-ratio\nbogus\n", 2),
            ("experiment = lp-ratio\nfoo = 1\n", 2),
            ("experiment = lp-ratio\nseed = 1\nseed = 2\n", 3),
            ("experiment = lp-ratio\n\np = 1\n", 3),
            ("experiment = nope\n", 1),
        ] {
            match ExperimentConfig::parse(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn hash_ignores_layout_and_output_but_not_settings() {
        let a = ExperimentConfig::parse("experiment = lp-ratio\nseed = 3\noutput = x\n").unwrap();
        let b = ExperimentConfig::parse("# c\nseed=3\n\nexperiment=lp-ratio\n").unwrap();
        let c = ExperimentConfig::parse("experiment = lp-ratio\nseed = 4\n").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 16);
    }
}
