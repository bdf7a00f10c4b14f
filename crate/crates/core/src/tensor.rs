//! Tensor-product lifting of the 1-D projectors to d dimensions.
//!
//! `apply_axis` applies a 1-D operator to every line parallel to one axis.
//! The anisotropic projector is `E_kappa = V_1(E_{kappa_1}) ... V_d(E_{kappa_d})`
//! and the detail `D_kappa` is either the product of per-axis 1-D details or
//! the inclusion-exclusion sum `sum_eps (-1)^|eps| E_{kappa - eps}` over
//! `eps ∈ {0,1}^d` with `eps <= kappa`. Axes are processed in ascending
//! order, which fixes every summation order.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Complex, Grid1D, GridND, MultiIndex, SampledFunction};
use crate::proj1d::{Operator1D, ProjectorContext};
use crate::scaling::ScalingSystem;

/// Lines handled together along strided axes.
const LINE_TILE: usize = 16;

#[derive(Clone, Debug)]
pub struct TensorContext {
    axes: Vec<ProjectorContext>,
    grid: GridND,
}

/// Which algebraic route `detail_nd` takes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DetailPath {
    /// Product of 1-D details, `d` line sweeps.
    #[default]
    Factored,
    /// Signed sum of up to `2^d` projectors.
    InclusionExclusion,
}

impl TensorContext {
    /// One scaling system per axis, all on the same box.
    pub fn new(systems: Vec<ScalingSystem>, domain: Grid1D) -> Result<Self> {
        let axes = systems
            .into_iter()
            .map(|s| ProjectorContext::new(s, domain))
            .collect::<Result<Vec<_>>>()?;
        Self::from_axes(axes)
    }

    /// The same system on every axis.
    pub fn isotropic(sys: ScalingSystem, domain: Grid1D, dim: usize) -> Result<Self> {
        Self::new(vec![sys; dim], domain)
    }

    pub fn from_axes(axes: Vec<ProjectorContext>) -> Result<Self> {
        let first = axes
            .first()
            .ok_or_else(|| Error::Structural("tensor context needs at least one axis".into()))?;
        let domain = first.domain();
        if let Some(bad) = axes.iter().find(|a| a.domain() != domain) {
            return Err(Error::GridMismatch(format!(
                "axis box {} differs from {}",
                bad.domain(),
                domain
            )));
        }
        let grid = GridND::new(domain, axes.len())?;
        Ok(Self { axes, grid })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn grid(&self) -> GridND {
        self.grid
    }

    pub fn axis(&self, axis: usize) -> Result<&ProjectorContext> {
        self.axes.get(axis).ok_or(Error::Axis {
            axis,
            dim: self.dim(),
        })
    }

    /// Componentwise largest admissible multi-index.
    pub fn kappa_max(&self) -> MultiIndex {
        MultiIndex::new(self.axes.iter().map(|a| a.kappa_max()).collect())
    }

    fn check_input(&self, f: &SampledFunction) -> Result<()> {
        if f.grid() != self.grid {
            return Err(Error::GridMismatch(format!(
                "input on {} but context grid is {}",
                f.grid(),
                self.grid
            )));
        }
        Ok(())
    }

    pub(crate) fn check_index(&self, kappa: &MultiIndex) -> Result<()> {
        if kappa.dim() != self.dim() {
            return Err(Error::Structural(format!(
                "multi-index {kappa} has {} components, context has {} axes",
                kappa.dim(),
                self.dim()
            )));
        }
        for (a, &k) in self.axes.iter().zip(kappa.components()) {
            if k > a.kappa_max() {
                return Err(Error::Resolution {
                    kappa: k,
                    max: a.kappa_max(),
                });
            }
        }
        Ok(())
    }

    /// Applies `op` along `axis` (0-based) to every line of `f`.
    pub fn apply_axis(&self, axis: usize, op: Operator1D, f: &SampledFunction) -> Result<SampledFunction> {
        self.check_input(f)?;
        let ctx = self.axis(axis)?;
        if op.kappa() > ctx.kappa_max() {
            return Err(Error::Resolution {
                kappa: op.kappa(),
                max: ctx.kappa_max(),
            });
        }
        Ok(self.map_lines(axis, f, 1, |line, outs, scratch| {
            ctx.apply_line(line, op, outs[0], scratch);
        })
        .pop()
        .expect("one output"))
    }

    /// Runs `kernel` on every line along `axis`, producing `outputs`
    /// functions. Lines are independent and processed in parallel. Lines
    /// along the last axis are contiguous and written in place; strided
    /// lines are handled in tiles of neighbours so that gathers and
    /// scatters touch contiguous runs.
    fn map_lines<F>(&self, axis: usize, f: &SampledFunction, outputs: usize, kernel: F) -> Vec<SampledFunction>
    where
        F: Fn(&[Complex], &mut [&mut [Complex]], &mut Vec<Complex>) + Sync,
    {
        let n = self.grid.axis().len();
        let stride = self.grid.stride(axis);
        let src = f.samples();
        let mut results: Vec<Vec<Complex>> = (0..outputs).map(|_| vec![Complex::default(); f.len()]).collect();

        if stride == 1 {
            let mut per_line: Vec<Vec<&mut [Complex]>> = (0..f.len() / n).map(|_| Vec::with_capacity(outputs)).collect();
            for result in results.iter_mut() {
                for (slots, chunk) in per_line.iter_mut().zip(result.chunks_mut(n)) {
                    slots.push(chunk);
                }
            }
            per_line
                .into_par_iter()
                .zip(src.par_chunks(n))
                .for_each_init(Vec::new, |scratch, (mut outs, line)| kernel(line, &mut outs, scratch));
        } else {
            let block = n * stride;
            let width = stride.min(LINE_TILE);
            let tiles_per_block = stride.div_ceil(width);
            let tiles = (f.len() / block) * tiles_per_block;
            let tile_len = width * outputs * n;
            let tile_origin = |tile: usize| {
                let base = (tile / tiles_per_block) * block;
                let first = (tile % tiles_per_block) * width;
                (base + first, width.min(stride - first))
            };
            // layout inside a tile: [output][lane][k], so every lane is a
            // contiguous line for the kernel
            let mut staging = vec![Complex::default(); tiles * tile_len];
            staging.par_chunks_mut(tile_len).enumerate().for_each_init(
                || (vec![Complex::default(); width * n], Vec::new()),
                |(lines, scratch), (tile, chunk)| {
                    let (origin, lanes) = tile_origin(tile);
                    for k in 0..n {
                        let run = &src[origin + k * stride..origin + k * stride + lanes];
                        for (lane, &v) in run.iter().enumerate() {
                            lines[lane * n + k] = v;
                        }
                    }
                    let mut per_output: Vec<Vec<&mut [Complex]>> =
                        chunk.chunks_mut(width * n).map(|o| o.chunks_mut(n).collect()).collect();
                    for lane in 0..lanes {
                        let mut views: Vec<&mut [Complex]> =
                            per_output.iter_mut().map(|o| &mut *o[lane]).collect();
                        kernel(&lines[lane * n..(lane + 1) * n], &mut views, scratch);
                    }
                },
            );
            for (tile, chunk) in staging.chunks(tile_len).enumerate() {
                let (origin, lanes) = tile_origin(tile);
                for (result, from) in results.iter_mut().zip(chunk.chunks(width * n)) {
                    for k in 0..n {
                        let at = origin + k * stride;
                        for (lane, slot) in result[at..at + lanes].iter_mut().enumerate() {
                            *slot = from[lane * n + k];
                        }
                    }
                }
            }
        }
        results
            .into_iter()
            .map(|s| SampledFunction::from_samples(self.grid, s).expect("same grid"))
            .collect()
    }

    /// All 1-D details `D_0 .. D_k` along `axis` from one pass of
    /// projections. Bitwise equal to separate `Detail(j)` sweeps.
    fn axis_details(&self, axis: usize, f: &SampledFunction, k: u32) -> Vec<SampledFunction> {
        let ctx = &self.axes[axis];
        self.map_lines(axis, f, k as usize + 1, |line, outs, scratch| {
            for j in 0..=k {
                ctx.apply_line(line, Operator1D::Project(j), outs[j as usize], scratch);
            }
            for j in (1..=k as usize).rev() {
                let (lower, upper) = outs.split_at_mut(j);
                for (o, p) in upper[0].iter_mut().zip(lower[j - 1].iter()) {
                    *o -= p;
                }
            }
        })
    }

    pub fn project_nd(&self, f: &SampledFunction, kappa: &MultiIndex) -> Result<SampledFunction> {
        self.check_input(f)?;
        self.check_index(kappa)?;
        self.sweep(f, kappa, Operator1D::Project)
    }

    pub fn detail_nd(&self, f: &SampledFunction, kappa: &MultiIndex) -> Result<SampledFunction> {
        self.detail_nd_with(f, kappa, DetailPath::Factored)
    }

    pub fn detail_nd_with(
        &self,
        f: &SampledFunction,
        kappa: &MultiIndex,
        path: DetailPath,
    ) -> Result<SampledFunction> {
        self.check_input(f)?;
        self.check_index(kappa)?;
        match path {
            DetailPath::Factored => self.sweep(f, kappa, Operator1D::Detail),
            DetailPath::InclusionExclusion => self.inclusion_exclusion(f, kappa),
        }
    }

    fn sweep(
        &self,
        f: &SampledFunction,
        kappa: &MultiIndex,
        op: fn(u32) -> Operator1D,
    ) -> Result<SampledFunction> {
        let mut g = f.clone();
        for (axis, &k) in kappa.components().iter().enumerate() {
            g = self.apply_axis(axis, op(k), &g)?;
        }
        Ok(g)
    }

    fn inclusion_exclusion(&self, f: &SampledFunction, kappa: &MultiIndex) -> Result<SampledFunction> {
        let active: Vec<usize> = kappa
            .components()
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(j, _)| j)
            .collect();
        let mut total = SampledFunction::zeros(self.grid);
        for mask in 0u32..(1 << active.len()) {
            let mut shifted = kappa.components().to_vec();
            for (bit, &axis) in active.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    shifted[axis] -= 1;
                }
            }
            let term = self.project_nd(f, &MultiIndex::new(shifted))?;
            let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            total.add_scaled(sign, &term)?;
        }
        Ok(total)
    }

    /// Calls `visit(kappa, D_kappa f)` for every `kappa <= k_cap` in
    /// lexicographic order (last axis fastest). Per-axis partial products
    /// are shared between multi-indices with a common prefix.
    pub fn for_each_detail<V>(&self, f: &SampledFunction, k_cap: &MultiIndex, mut visit: V) -> Result<()>
    where
        V: FnMut(&MultiIndex, &SampledFunction) -> Result<()>,
    {
        self.check_input(f)?;
        self.check_index(k_cap)?;
        let mut prefix = Vec::with_capacity(self.dim());
        self.detail_level(f.clone(), k_cap, &mut prefix, &mut visit)
    }

    fn detail_level<V>(
        &self,
        g: SampledFunction,
        k_cap: &MultiIndex,
        prefix: &mut Vec<u32>,
        visit: &mut V,
    ) -> Result<()>
    where
        V: FnMut(&MultiIndex, &SampledFunction) -> Result<()>,
    {
        let axis = prefix.len();
        if axis == self.dim() {
            return visit(&MultiIndex::new(prefix.clone()), &g);
        }
        let k = k_cap.components()[axis];
        let details = self.axis_details(axis, &g, k);
        drop(g);
        for (j, d) in details.into_iter().enumerate() {
            prefix.push(j as u32);
            self.detail_level(d, k_cap, prefix, visit)?;
            prefix.pop();
        }
        Ok(())
    }

    /// `sum_{kappa <= k} D_kappa f`, which telescopes to `E_k f`.
    pub fn partial_sum(&self, f: &SampledFunction, k: &MultiIndex) -> Result<SampledFunction> {
        let mut total = SampledFunction::zeros(self.grid);
        self.for_each_detail(f, k, |_, d| total.add_assign(d))?;
        Ok(total)
    }

    /// `||f - E_k f||_p`.
    pub fn reconstruction_error(&self, f: &SampledFunction, k: &MultiIndex, p: f64) -> Result<f64> {
        let approx = self.project_nd(f, k)?;
        crate::grid::lp_norm(&f.sub(&approx)?, p)
    }
}

/// Tensor sign pattern: one `±1` sequence per axis, indexed by scale.
/// The sign of `kappa` is the product `prod_j sigma^j_{kappa_j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignPattern {
    per_axis: Vec<Vec<i8>>,
}

impl SignPattern {
    pub fn new(per_axis: Vec<Vec<i8>>) -> Result<Self> {
        if per_axis.is_empty() {
            return Err(Error::Structural("sign pattern needs at least one axis".into()));
        }
        if per_axis.iter().flatten().any(|&s| s != 1 && s != -1) {
            return Err(Error::Domain("sign pattern entries must be +1 or -1".into()));
        }
        Ok(Self { per_axis })
    }

    pub fn all_ones(k_cap: &MultiIndex) -> Self {
        Self {
            per_axis: k_cap.components().iter().map(|&k| vec![1; k as usize + 1]).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.per_axis.len()
    }

    pub fn axis(&self, j: usize) -> &[i8] {
        &self.per_axis[j]
    }

    /// `prod_j sigma^j_{kappa_j}`.
    pub fn sign(&self, kappa: &MultiIndex) -> i8 {
        self.per_axis
            .iter()
            .zip(kappa.components())
            .map(|(s, &k)| s[k as usize])
            .product()
    }

    /// Defined for every `kappa <= k_cap`.
    pub fn covers(&self, k_cap: &MultiIndex) -> bool {
        self.dim() == k_cap.dim()
            && self
                .per_axis
                .iter()
                .zip(k_cap.components())
                .all(|(s, &k)| s.len() > k as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaling::haar_system;

    fn haar2(resolution: u32) -> TensorContext {
        let g = Grid1D::from_unit_bounds(resolution, -1, 2).unwrap();
        TensorContext::isotropic(haar_system(resolution, g).unwrap(), g, 2).unwrap()
    }

    fn chi(ctx: &TensorContext, a: f64, b: f64) -> SampledFunction {
        SampledFunction::indicator(ctx.grid().axis(), a, b)
    }

    fn tensor(a: &SampledFunction, b: &SampledFunction) -> SampledFunction {
        SampledFunction::tensor_product(&[a, b]).unwrap()
    }

    #[test]
    fn apply_axis_goldens() {
        let ctx = haar2(8);
        let phi = chi(&ctx, 0.0, 1.0);
        let f = tensor(&phi, &phi);
        assert_eq!(ctx.apply_axis(0, Operator1D::Project(0), &f).unwrap(), f);

        let half = chi(&ctx, 0.0, 0.5);
        let g = tensor(&half, &phi);
        let expected = tensor(&phi.scale(Complex::from(0.5)), &phi);
        assert_eq!(ctx.apply_axis(0, Operator1D::Project(0), &g).unwrap(), expected);
    }

    #[test]
    fn apply_axis_rejects_bad_axis() {
        let ctx = haar2(8);
        let f = SampledFunction::zeros(ctx.grid());
        assert!(matches!(
            ctx.apply_axis(2, Operator1D::Project(0), &f),
            Err(Error::Axis { axis: 2, dim: 2 })
        ));
        assert!(matches!(
            ctx.apply_axis(1, Operator1D::Detail(7), &f),
            Err(Error::Resolution { .. })
        ));
    }

    #[test]
    fn project_nd_goldens() {
        let ctx = haar2(8);
        let phi = chi(&ctx, 0.0, 1.0);
        let f = tensor(&phi, &phi);
        assert_eq!(ctx.project_nd(&f, &MultiIndex::zeros(2)).unwrap(), f);

        let half = chi(&ctx, 0.0, 0.5);
        let g = tensor(&half, &half);
        let expected = tensor(&half, &phi.scale(Complex::from(0.5)));
        assert_eq!(ctx.project_nd(&g, &MultiIndex::new(vec![1, 0])).unwrap(), expected);
    }

    #[test]
    fn detail_nd_goldens() {
        let ctx = haar2(8);
        let half = chi(&ctx, 0.0, 0.5);
        let g = tensor(&half, &half);
        assert_eq!(
            ctx.detail_nd(&g, &MultiIndex::zeros(2)).unwrap(),
            ctx.project_nd(&g, &MultiIndex::zeros(2)).unwrap()
        );
        let wave = half.sub(&chi(&ctx, 0.5, 1.0)).unwrap().scale(Complex::from(0.5));
        assert_eq!(
            ctx.detail_nd(&g, &MultiIndex::new(vec![1, 1])).unwrap(),
            tensor(&wave, &wave)
        );
    }

    #[test]
    fn shared_prefix_enumeration_matches_individual_details() {
        let ctx = haar2(7);
        let f = SampledFunction::from_fn(ctx.grid(), |x| {
            Complex::from(((3.0 * x[0]).sin() + x[1] * x[1]) * (-(x[0] * x[0] + x[1] * x[1])).exp())
        });
        let k = MultiIndex::new(vec![2, 3]);
        let mut seen = Vec::new();
        ctx.for_each_detail(&f, &k, |kappa, d| {
            assert_eq!(*d, ctx.detail_nd(&f, kappa).unwrap(), "kappa {kappa}");
            seen.push(kappa.clone());
            Ok(())
        })
        .unwrap();
        assert_eq!(seen, k.box_below());
    }

    #[test]
    fn sign_pattern_product() {
        let p = SignPattern::new(vec![vec![1, -1, -1], vec![1, -1]]).unwrap();
        assert_eq!(p.sign(&MultiIndex::new(vec![1, 1])), 1);
        assert_eq!(p.sign(&MultiIndex::new(vec![2, 0])), -1);
        assert!(p.covers(&MultiIndex::new(vec![2, 1])));
        assert!(!p.covers(&MultiIndex::new(vec![3, 1])));
        assert!(SignPattern::new(vec![vec![1, 0]]).is_err());
    }
}
