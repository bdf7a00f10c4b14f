//! Seeded test functions for the experiments.
//!
//! Every entry is a tensor product of one-dimensional factors (or, for
//! [`CorpusKind::Mixed`], a sum of two such products) supported inside a
//! region of the box. Entries record the finest scale `s` with `f` in
//! `V_s` when that is known exactly for the context's systems.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{dilate_translate, Complex, Grid1D, SampledFunction};
use crate::scaling::ScalingSystem;
use crate::tensor::TensorContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusKind {
    /// Indicator of a dyadic interval.
    Box,
    /// Random heights on the dyadic cells of one scale.
    Step,
    /// `exp(1 - 1/(1 - r^2))` on a random interval.
    Bump,
    /// `2^m χ_[c, c + 2^-m)`, unit mass.
    Spike,
    /// Random complex combination of scale-`s` translates of `phi`.
    ScaleLimited,
    /// Sum of two products of randomly chosen factor kinds.
    Mixed,
}

impl CorpusKind {
    pub const ALL: [CorpusKind; 6] = [
        CorpusKind::Box,
        CorpusKind::Step,
        CorpusKind::Bump,
        CorpusKind::Spike,
        CorpusKind::ScaleLimited,
        CorpusKind::Mixed,
    ];

    fn name(self) -> &'static str {
        match self {
            CorpusKind::Box => "box",
            CorpusKind::Step => "step",
            CorpusKind::Bump => "bump",
            CorpusKind::Spike => "spike",
            CorpusKind::ScaleLimited => "scale-limited",
            CorpusKind::Mixed => "mixed",
        }
    }

    fn salt(self) -> u64 {
        Self::ALL.iter().position(|&k| k == self).unwrap() as u64
    }
}

impl fmt::Display for CorpusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CorpusKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown corpus kind {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub id: String,
    pub kind: CorpusKind,
    pub f: SampledFunction,
    /// `Some(s)` when `f` lies in `V_s` on every axis.
    pub scale: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusSpec {
    pub kinds: Vec<CorpusKind>,
    pub per_kind: usize,
    pub seed: u64,
    /// Finest scale used by dyadic and scale-limited entries.
    pub scale: u32,
    /// Support region in unit coordinates; `None` picks
    /// [`interior_region`].
    pub region: Option<(f64, f64)>,
}

impl CorpusSpec {
    pub fn new(kinds: Vec<CorpusKind>, per_kind: usize, seed: u64, scale: u32) -> Self {
        Self {
            kinds,
            per_kind,
            seed,
            scale,
            region: None,
        }
    }

    pub fn with_region(mut self, lo: f64, hi: f64) -> Self {
        self.region = Some((lo, hi));
        self
    }
}

/// The box shrunk so that `E_kappa f` stays inside it for every
/// `kappa >= 0` whenever `f` lives in the returned integer interval.
pub fn interior_region(ctx: &TensorContext) -> Result<(f64, f64)> {
    let axis = ctx.grid().axis();
    let mut margin = 0.0f64;
    for j in 0..ctx.dim() {
        let (lo, hi) = ctx.axis(j)?.system().support();
        margin = margin.max((hi - lo - 1.0).max(0.0).ceil());
    }
    let lo = axis.left_edge().ceil() + margin;
    let hi = axis.right_edge().floor() - margin;
    if hi - lo < 1.0 {
        return Err(Error::Domain(format!(
            "box {axis} leaves no unit interval clear of the generator support"
        )));
    }
    Ok((lo, hi))
}

struct Factory<'a> {
    axis: Grid1D,
    systems: Vec<&'a ScalingSystem>,
    haar: bool,
    region: (f64, f64),
    scale: u32,
}

type Factor = (SampledFunction, Option<u32>);

impl Factory<'_> {
    /// A dyadic subinterval of the region at level `level`, in units of `2^-level`.
    fn dyadic_interval(&self, rng: &mut Xoshiro256PlusPlus, level: u32) -> (i64, i64) {
        let n = (1i64 << level) as f64;
        let a = (self.region.0 * n).ceil() as i64;
        let b = (self.region.1 * n).floor() as i64;
        let start = rng.random_range(a..b);
        let len = rng.random_range(1..=(b - start).min(1i64 << level).max(1));
        (start, start + len)
    }

    fn dyadic_scale(&self, level: u32) -> Option<u32> {
        self.haar.then_some(level)
    }

    fn factor(&self, kind: CorpusKind, rng: &mut Xoshiro256PlusPlus, axis_index: usize) -> Result<Factor> {
        let axis = self.axis;
        Ok(match kind {
            CorpusKind::Box => {
                let level = rng.random_range(0..=self.scale);
                let (a, b) = self.dyadic_interval(rng, level);
                let w = 2f64.powi(-(level as i32));
                (
                    SampledFunction::indicator(axis, a as f64 * w, b as f64 * w),
                    self.dyadic_scale(level),
                )
            }
            CorpusKind::Step => {
                let level = self.scale;
                let (a, b) = self.dyadic_interval(rng, level);
                let heights: Vec<f64> = (a..b).map(|_| rng.random_range(-1.0..1.0)).collect();
                let n = (1i64 << level) as f64;
                let f = SampledFunction::from_fn_1d(axis, |x| {
                    let cell = (x * n).floor() as i64;
                    if (a..b).contains(&cell) {
                        Complex::from(heights[(cell - a) as usize])
                    } else {
                        Complex::default()
                    }
                });
                (f, self.dyadic_scale(level))
            }
            CorpusKind::Bump => {
                let (lo, hi) = self.region;
                let r = rng.random_range(0.1..0.5) * (hi - lo);
                let c = rng.random_range(lo + r..=hi - r);
                let f = SampledFunction::from_fn_1d(axis, |x| {
                    let t = (x - c) / r;
                    Complex::from(if t.abs() < 1.0 { (1.0 - 1.0 / (1.0 - t * t)).exp() } else { 0.0 })
                });
                (f, None)
            }
            CorpusKind::Spike => {
                let level = rng.random_range(0..=self.scale);
                let (a, _) = self.dyadic_interval(rng, level);
                let w = 2f64.powi(-(level as i32));
                let f = SampledFunction::indicator(axis, a as f64 * w, (a + 1) as f64 * w)
                    .scale(Complex::from(2f64.powi(level as i32)));
                (f, self.dyadic_scale(level))
            }
            CorpusKind::ScaleLimited => {
                let level = self.scale;
                let sys = self.systems[axis_index];
                let (phi, _) = sys.generators(level);
                let (gl, gh) = sys.support();
                let n = (1i64 << level) as f64;
                // translates whose support [(nu + gl) / n, (nu + gh) / n) lies in the region
                let first = (self.region.0 * n - gl).ceil() as i64;
                let last = (self.region.1 * n - gh).floor() as i64;
                if last < first {
                    return Err(Error::Domain(format!(
                        "region {:?} is too small for a scale-{level} translate",
                        self.region
                    )));
                }
                let a = rng.random_range(first..=last);
                let b = rng.random_range(a..=last.min(a + (1i64 << level) + 2));
                let mut f = SampledFunction::zeros(crate::grid::GridND::line(axis));
                for nu in a..=b {
                    let c = Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    let term = dilate_translate(&phi, level, nu, axis)?.scale(c);
                    f.add_assign(&term)?;
                }
                (f, Some(level))
            }
            CorpusKind::Mixed => unreachable!("mixed entries are assembled from other kinds"),
        })
    }

    fn product(&self, kinds: &[CorpusKind], rng: &mut Xoshiro256PlusPlus) -> Result<Factor> {
        let factors = kinds
            .iter()
            .enumerate()
            .map(|(j, &k)| self.factor(k, rng, j))
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<&SampledFunction> = factors.iter().map(|(f, _)| f).collect();
        let scale = factors
            .iter()
            .map(|(_, s)| *s)
            .try_fold(0, |acc, s| s.map(|s| acc.max(s)));
        Ok((SampledFunction::tensor_product(&refs)?, scale))
    }
}

/// Builds `spec.per_kind` entries of each kind on the context's grid.
/// The same spec and context always give the same corpus.
pub fn build_corpus(ctx: &TensorContext, spec: &CorpusSpec) -> Result<Vec<CorpusEntry>> {
    let axis = ctx.grid().axis();
    let region = match spec.region {
        Some(r) => r,
        None => interior_region(ctx)?,
    };
    if !(region.0 < region.1 && region.0 >= axis.left_edge() && region.1 <= axis.right_edge()) {
        return Err(Error::Domain(format!("region {region:?} is not inside the box {axis}")));
    }
    if spec.scale > ctx.kappa_max().components().iter().copied().min().unwrap_or(0) {
        return Err(Error::Resolution {
            kappa: spec.scale,
            max: ctx.kappa_max().components().iter().copied().min().unwrap_or(0),
        });
    }
    let systems = (0..ctx.dim())
        .map(|j| ctx.axis(j).map(|a| a.system()))
        .collect::<Result<Vec<_>>>()?;
    let factory = Factory {
        axis,
        haar: systems.iter().all(|s| s.is_haar()),
        systems,
        region,
        scale: spec.scale,
    };
    let dim = ctx.dim();
    let mut entries = Vec::new();
    for &kind in &spec.kinds {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(
            spec.seed ^ kind.salt().wrapping_mul(0x9e37_79b9_7f4a_7c15),
        );
        for i in 0..spec.per_kind {
            let (f, scale) = match kind {
                CorpusKind::Mixed => {
                    const PARTS: [CorpusKind; 4] =
                        [CorpusKind::Box, CorpusKind::Step, CorpusKind::Bump, CorpusKind::ScaleLimited];
                    let mut pick = || -> Vec<CorpusKind> {
                        (0..dim).map(|_| PARTS[rng.random_range(0..PARTS.len())]).collect()
                    };
                    let (k1, k2) = (pick(), pick());
                    let (f1, s1) = factory.product(&k1, &mut rng)?;
                    let (f2, s2) = factory.product(&k2, &mut rng)?;
                    let scale = s1.zip(s2).map(|(a, b)| a.max(b));
                    (f1.add(&f2)?, scale)
                }
                _ => factory.product(&vec![kind; dim], &mut rng)?,
            };
            entries.push(CorpusEntry {
                id: format!("{kind}-{i}"),
                kind,
                f,
                scale,
            });
        }
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{lp_norm, MultiIndex};
    use crate::scaling::{daubechies_system, haar_system};

    fn haar(dim: usize) -> TensorContext {
        let g = Grid1D::from_unit_bounds(8, 0, 2).unwrap();
        TensorContext::isotropic(haar_system(8, g).unwrap(), g, dim).unwrap()
    }

    #[test]
    fn corpus_is_reproducible_and_nonzero() {
        let ctx = haar(2);
        let spec = CorpusSpec::new(CorpusKind::ALL.to_vec(), 3, 42, 3);
        let a = build_corpus(&ctx, &spec).unwrap();
        let b = build_corpus(&ctx, &spec).unwrap();
        assert_eq!(a.len(), 18);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.f, y.f);
            assert!(lp_norm(&x.f, 2.0).unwrap() > 0.0, "{}", x.id);
        }
    }

    #[test]
    fn recorded_scales_are_exact() {
        let ctx = haar(2);
        let spec = CorpusSpec::new(CorpusKind::ALL.to_vec(), 3, 7, 3);
        for e in build_corpus(&ctx, &spec).unwrap() {
            if let Some(s) = e.scale {
                let k = MultiIndex::splat(s, 2);
                let err = e.f.sup_distance(&ctx.project_nd(&e.f, &k).unwrap()).unwrap();
                assert!(err < 1e-12, "{} err {err}", e.id);
            }
        }
    }

    #[test]
    fn daubechies_scale_limited_entries_are_reproduced() {
        let sys = daubechies_system(2, 8, 8).unwrap();
        let g = Grid1D::from_unit_bounds(8, -2, 4).unwrap();
        let ctx = TensorContext::isotropic(sys, g, 1).unwrap();
        assert_eq!(interior_region(&ctx).unwrap(), (0.0, 2.0));
        let spec = CorpusSpec::new(vec![CorpusKind::ScaleLimited, CorpusKind::Box], 4, 1, 2);
        let corpus = build_corpus(&ctx, &spec).unwrap();
        for e in &corpus {
            match e.kind {
                CorpusKind::ScaleLimited => {
                    assert_eq!(e.scale, Some(2));
                    let p = ctx.project_nd(&e.f, &MultiIndex::new(vec![2])).unwrap();
                    assert!(e.f.sup_distance(&p).unwrap() < 1e-10);
                }
                _ => assert_eq!(e.scale, None),
            }
        }
    }

    #[test]
    fn kind_names_round_trip() {
        for k in CorpusKind::ALL {
            assert_eq!(k.to_string().parse::<CorpusKind>().unwrap(), k);
        }
        assert!("wave".parse::<CorpusKind>().is_err());
    }
}
