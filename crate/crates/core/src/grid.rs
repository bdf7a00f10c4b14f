//! Sampled functions on uniform dyadic grids.
//!
//! A [`Grid1D`] with resolution `J` and integer bounds `lo < hi` covers
//! `[lo * 2^-J, hi * 2^-J)` with cells of width `2^-J`. Sample `i` is the
//! value on cell `lo + i`. A d-dimensional grid is the d-fold product of one
//! axis grid. Functions are zero outside their grid.
//!
//! Integrals use the midpoint rule, which is exact for functions that are
//! constant on the grid cells.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Scales finer than `J - J_ACC` read fewer than 16 samples per translate and
/// are rejected.
pub const J_ACC: u32 = 4;

const MAX_RESOLUTION: u32 = 52;

/// Largest admissible dilation exponent at resolution `j`.
pub fn kappa_limit(resolution: u32) -> Option<u32> {
    resolution.checked_sub(J_ACC)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Grid1D {
    resolution: u32,
    lo: i64,
    hi: i64,
}

impl Grid1D {
    /// Bounds are given in cell units (multiples of `2^-resolution`).
    pub fn new(resolution: u32, lo: i64, hi: i64) -> Result<Self> {
        if resolution > MAX_RESOLUTION {
            return Err(Error::Domain(format!(
                "resolution {resolution} exceeds {MAX_RESOLUTION}"
            )));
        }
        if hi <= lo {
            return Err(Error::Structural(format!(
                "empty grid support [{lo}, {hi})"
            )));
        }
        Ok(Self { resolution, lo, hi })
    }

    /// Grid over `[lo_x, hi_x)` given in integer x-units.
    pub fn from_unit_bounds(resolution: u32, lo_x: i64, hi_x: i64) -> Result<Self> {
        let scale = 1i64 << resolution.min(MAX_RESOLUTION);
        Self::new(resolution, lo_x * scale, hi_x * scale)
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (-(self.resolution as f64)).exp2()
    }

    /// Cells per unit length, `2^J`.
    pub fn cells_per_unit(&self) -> i64 {
        1i64 << self.resolution
    }

    pub fn midpoint(&self, i: usize) -> f64 {
        ((self.lo + i as i64) as f64 + 0.5) * self.step()
    }

    pub fn left_edge(&self) -> f64 {
        self.lo as f64 * self.step()
    }

    pub fn right_edge(&self) -> f64 {
        self.hi as f64 * self.step()
    }

    /// `other` is covered by `self` at the same resolution.
    pub fn contains(&self, other: &Grid1D) -> bool {
        self.resolution == other.resolution && self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn index_of_cell(&self, cell: i64) -> Option<usize> {
        (self.lo..self.hi)
            .contains(&cell)
            .then(|| (cell - self.lo) as usize)
    }
}

impl fmt::Display for Grid1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J={} [{}, {})", self.resolution, self.lo, self.hi)
    }
}

/// The d-fold product of one axis grid. Row-major storage, axis 0 slowest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridND {
    axis: Grid1D,
    dim: usize,
}

impl GridND {
    pub fn new(axis: Grid1D, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Structural("dimension must be at least 1".into()));
        }
        Ok(Self { axis, dim })
    }

    pub fn line(axis: Grid1D) -> Self {
        Self { axis, dim: 1 }
    }

    pub fn axis(&self) -> Grid1D {
        self.axis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> u32 {
        self.axis.resolution
    }

    pub fn sample_count(&self) -> usize {
        self.axis.len().pow(self.dim as u32)
    }

    /// Quadrature weight of one cell, `2^(-J d)`.
    pub fn cell_volume(&self) -> f64 {
        self.axis.step().powi(self.dim as i32)
    }

    /// Distance in the flat array between neighbours along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.axis.len().pow((self.dim - 1 - axis) as u32)
    }
}

impl fmt::Display for GridND {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.axis, self.dim)
    }
}

/// Multi-index `κ ∈ Z_+^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(components: Vec<u32>) -> Self {
        Self(components)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn splat(value: u32, dim: usize) -> Self {
        Self(vec![value; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// All `κ` with `0 <= κ_j <= self_j`, in lexicographic order (last
    /// component fastest).
    pub fn box_below(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::zeros(self.dim())];
        for (axis, &bound) in self.0.iter().enumerate() {
            out = out
                .into_iter()
                .flat_map(|k| {
                    (0..=bound).map(move |v| {
                        let mut k = k.clone();
                        k.0[axis] = v;
                        k
                    })
                })
                .collect();
        }
        out
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    /// Comma-separated nonnegative integers, e.g. `2,1`.
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|p| {
                p.trim().parse::<u32>().map_err(|_| {
                    Error::Domain(format!("multi-index component {p:?} is not a nonnegative integer"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self(parts))
    }
}

/// Complex samples on a [`GridND`], one per cell.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    grid: GridND,
    samples: Vec<Complex>,
}

impl SampledFunction {
    pub fn zeros(grid: GridND) -> Self {
        Self {
            grid,
            samples: vec![Complex::new(0.0, 0.0); grid.sample_count()],
        }
    }

    pub fn from_samples(grid: GridND, samples: Vec<Complex>) -> Result<Self> {
        if samples.len() != grid.sample_count() {
            return Err(Error::Structural(format!(
                "{} samples supplied for grid {} with {} cells",
                samples.len(),
                grid,
                grid.sample_count()
            )));
        }
        Ok(Self { grid, samples })
    }

    pub fn from_real(grid: GridND, values: Vec<f64>) -> Result<Self> {
        Self::from_samples(grid, values.into_iter().map(Complex::from).collect())
    }

    /// Samples `f` at the cell midpoints of a 1-D grid.
    pub fn from_fn_1d(axis: Grid1D, f: impl Fn(f64) -> Complex) -> Self {
        let samples = (0..axis.len()).map(|i| f(axis.midpoint(i))).collect();
        Self {
            grid: GridND::line(axis),
            samples,
        }
    }

    /// Samples `f` at the cell midpoints of a d-D grid.
    pub fn from_fn(grid: GridND, f: impl Fn(&[f64]) -> Complex) -> Self {
        let axis = grid.axis();
        let n = axis.len();
        let mut point = vec![0.0; grid.dim()];
        let samples = (0..grid.sample_count())
            .map(|flat| {
                let mut rest = flat;
                for slot in point.iter_mut().rev() {
                    *slot = axis.midpoint(rest % n);
                    rest /= n;
                }
                f(&point)
            })
            .collect();
        Self { grid, samples }
    }

    /// Indicator of `[a, b)` decided at cell midpoints.
    pub fn indicator(axis: Grid1D, a: f64, b: f64) -> Self {
        Self::from_fn_1d(axis, |x| {
            Complex::from(if (a..b).contains(&x) { 1.0 } else { 0.0 })
        })
    }

    /// `f_1(x_1) f_2(x_2) ... f_d(x_d)` from 1-D factors on one shared axis.
    pub fn tensor_product(factors: &[&SampledFunction]) -> Result<Self> {
        let first = factors
            .first()
            .ok_or_else(|| Error::Structural("tensor product of zero factors".into()))?;
        let axis = first.grid.axis();
        for f in factors {
            if f.dim() != 1 || f.grid.axis() != axis {
                return Err(Error::GridMismatch(format!(
                    "tensor factor on {} does not match axis {}",
                    f.grid, axis
                )));
            }
        }
        let mut samples = vec![Complex::new(1.0, 0.0)];
        for f in factors {
            samples = samples
                .iter()
                .flat_map(|&a| f.samples.iter().map(move |&b| a * b))
                .collect();
        }
        Ok(Self {
            grid: GridND::new(axis, factors.len())?,
            samples,
        })
    }

    pub fn grid(&self) -> GridND {
        self.grid
    }

    pub fn axis(&self) -> Grid1D {
        self.grid.axis()
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn samples(&self) -> &[Complex] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// First and one-past-last nonzero sample of a 1-D function.
    pub fn nonzero_span(&self) -> Option<(usize, usize)> {
        nonzero_span(&self.samples)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn check_same_grid(&self, other: &SampledFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("{} vs {}", self.grid, other.grid)));
        }
        Ok(())
    }

    pub fn add(&self, other: &SampledFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add_assign(&mut self, other: &SampledFunction) -> Result<()> {
        self.check_same_grid(other)?;
        for (a, b) in self.samples.iter_mut().zip(&other.samples) {
            *a += b;
        }
        Ok(())
    }

    pub fn add_scaled(&mut self, scale: f64, other: &SampledFunction) -> Result<()> {
        self.check_same_grid(other)?;
        for (a, b) in self.samples.iter_mut().zip(&other.samples) {
            *a += b * scale;
        }
        Ok(())
    }

    pub fn scale(&self, factor: Complex) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|z| z * factor).collect(),
        }
    }

    fn zip_with(
        &self,
        other: &SampledFunction,
        op: impl Fn(Complex, Complex) -> Complex,
    ) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        })
    }

    /// Sup-norm distance `max_i |f_i - g_i|`.
    pub fn sup_distance(&self, other: &SampledFunction) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Zero-extends or truncates a 1-D function onto `target` (same
    /// resolution). Samples outside `target` are dropped.
    pub fn embed(&self, target: Grid1D) -> Result<Self> {
        let src = self.axis();
        if self.dim() != 1 {
            return Err(Error::Structural("embed is defined for 1-D functions".into()));
        }
        if src.resolution() != target.resolution() {
            return Err(Error::GridMismatch(format!("{src} vs {target}")));
        }
        let mut out = Self::zeros(GridND::line(target));
        let lo = src.lo().max(target.lo());
        let hi = src.hi().min(target.hi());
        for cell in lo..hi {
            out.samples[(cell - target.lo()) as usize] = self.samples[(cell - src.lo()) as usize];
        }
        Ok(out)
    }

    /// Writes the text form: header `J lo hi d`, then one `re im` pair per line.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let axis = self.axis();
        writeln!(w, "{} {} {} {}", axis.resolution(), axis.lo(), axis.hi(), self.dim())?;
        for z in &self.samples {
            writeln!(w, "{:e} {:e}", z.re, z.im)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Reads one function block. Blank lines and `#` comments are skipped.
    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        Self::read_block(&mut lines)
    }

    pub(crate) fn read_block<I>(lines: &mut I) -> Result<Self>
    where
        I: Iterator<Item = (usize, std::io::Result<String>)>,
    {
        let mut next_content = || -> Result<Option<(usize, String)>> {
            for (idx, line) in lines.by_ref() {
                let line = line?;
                let trimmed = line.trim();
                if trimmed.is_empty() || trimmed.starts_with('#') {
                    continue;
                }
                return Ok(Some((idx + 1, trimmed.to_string())));
            }
            Ok(None)
        };
        let (hline, header) = next_content()?.ok_or(Error::Parse {
            line: 0,
            msg: "missing header `J lo hi d`".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: hline,
                msg: format!("header needs 4 fields `J lo hi d`, found {}", fields.len()),
            });
        }
        let bad = |what: &str| Error::Parse {
            line: hline,
            msg: format!("invalid {what} in header"),
        };
        let resolution: u32 = fields[0].parse().map_err(|_| bad("J"))?;
        let lo: i64 = fields[1].parse().map_err(|_| bad("lo"))?;
        let hi: i64 = fields[2].parse().map_err(|_| bad("hi"))?;
        let dim: usize = fields[3].parse().map_err(|_| bad("d"))?;
        let grid = GridND::new(Grid1D::new(resolution, lo, hi)?, dim)?;
        let count = grid.sample_count();
        let mut samples = Vec::with_capacity(count);
        while samples.len() < count {
            let (ln, text) = next_content()?.ok_or(Error::Parse {
                line: hline,
                msg: format!("expected {count} samples, found {}", samples.len()),
            })?;
            let mut parts = text.split_whitespace();
            let parse = |part: Option<&str>| -> Result<f64> {
                part.ok_or(Error::Parse {
                    line: ln,
                    msg: "expected `re im`".into(),
                })?
                .parse()
                .map_err(|_| Error::Parse {
                    line: ln,
                    msg: format!("invalid number in {text:?}"),
                })
            };
            let re = parse(parts.next())?;
            let im = parse(parts.next())?;
            samples.push(Complex::new(re, im));
        }
        Self::from_samples(grid, samples)
    }
}

pub(crate) fn nonzero_span(samples: &[Complex]) -> Option<(usize, usize)> {
    let zero = Complex::new(0.0, 0.0);
    let first = samples.iter().position(|z| *z != zero)?;
    let last = samples.iter().rposition(|z| *z != zero)?;
    Some((first, last + 1))
}

/// Midpoint-rule `∫ f conj(g)`.
pub fn inner_product(f: &SampledFunction, g: &SampledFunction) -> Result<Complex> {
    f.check_same_grid(g)?;
    let sum: Complex = f
        .samples
        .iter()
        .zip(&g.samples)
        .map(|(a, b)| a * b.conj())
        .sum();
    Ok(sum * f.grid.cell_volume())
}

/// Midpoint-rule `L_p` norm. `p = f64::INFINITY` gives the sample maximum.
pub fn lp_norm(f: &SampledFunction, p: f64) -> Result<f64> {
    lp_norm_of(f.samples(), f.grid.cell_volume(), p)
}

pub(crate) fn lp_norm_of(samples: &[Complex], cell_volume: f64, p: f64) -> Result<f64> {
    let power = AbsPower::new(p)?;
    if p.is_infinite() {
        return Ok(samples.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let sum: f64 = samples.iter().map(|&z| power.term(z)).sum();
    Ok(power.finish(sum * cell_volume))
}

/// `z -> |z|^p` for a fixed finite `p >= 1`. Quarter-integer exponents avoid
/// `powf`; that path squares `|z|`, so it assumes `|z| < 1e150`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct AbsPower {
    p: f64,
    quarter: Option<(i32, u8)>,
}

impl AbsPower {
    pub(crate) fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::Domain(format!("L_p norm needs p >= 1, got {p}")));
        }
        let q = 4.0 * p;
        let quarter = (q.fract() == 0.0 && p <= 64.0).then(|| (p.floor() as i32, (q as i64 % 4) as u8));
        Ok(Self { p, quarter })
    }

    #[inline]
    pub(crate) fn term(&self, z: Complex) -> f64 {
        match self.quarter {
            Some((2, 0)) => z.norm_sqr(),
            Some((n, r)) => {
                let s = z.norm_sqr();
                let m = s.sqrt();
                let whole = if n % 2 == 0 { s.powi(n / 2) } else { m * s.powi(n / 2) };
                match r {
                    0 => whole,
                    1 => whole * m.sqrt().sqrt(),
                    2 => whole * m.sqrt(),
                    _ => {
                        let q = m.sqrt().sqrt();
                        whole * q * q * q
                    }
                }
            }
            None => z.norm().powf(self.p),
        }
    }

    /// `(integral |f|^p)^(1/p)` from the integral.
    pub(crate) fn finish(&self, integral: f64) -> f64 {
        if self.p == 1.0 {
            integral
        } else if self.p == 2.0 {
            integral.sqrt()
        } else {
            integral.powf(1.0 / self.p)
        }
    }
}

/// `x -> phi(2^kappa x - nu)` on `target` by exact stride lookup.
///
/// Output cell `c` reads `phi` at cell `2^kappa c - nu 2^J`.
pub fn dilate_translate(
    phi: &SampledFunction,
    kappa: u32,
    nu: i64,
    target: Grid1D,
) -> Result<SampledFunction> {
    if phi.dim() != 1 {
        return Err(Error::Structural("dilate_translate needs a 1-D function".into()));
    }
    let src = phi.axis();
    if src.resolution() != target.resolution() {
        return Err(Error::GridMismatch(format!("{src} vs {target}")));
    }
    let max = kappa_limit(target.resolution()).unwrap_or(0);
    if kappa_limit(target.resolution()).is_none() || kappa > max {
        return Err(Error::Resolution { kappa, max });
    }
    let stride = 1i64 << kappa;
    let shift = nu * target.cells_per_unit();
    let samples = (target.lo()..target.hi())
        .map(|c| match src.index_of_cell(stride * c - shift) {
            Some(i) => phi.samples[i],
            None => Complex::new(0.0, 0.0),
        })
        .collect();
    SampledFunction::from_samples(GridND::line(target), samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit(resolution: u32, lo_x: i64, hi_x: i64) -> Grid1D {
        Grid1D::from_unit_bounds(resolution, lo_x, hi_x).unwrap()
    }

    #[test]
    fn quarter_integer_powers_agree_with_powf() {
        for p in [1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 3.0, 3.5, 4.0, 5.75] {
            let power = AbsPower::new(p).unwrap();
            for z in [Complex::new(0.3, -1.7), Complex::new(1e-9, 0.0), Complex::new(42.0, 5.0)] {
                let want = z.norm().powf(p);
                assert!((power.term(z) - want).abs() <= 1e-14 * want, "p = {p}, z = {z}");
            }
        }
        assert!(AbsPower::new(0.5).is_err());
    }

    #[test]
    fn inner_product_goldens() {
        let g = unit(8, -2, 2);
        let haar = SampledFunction::indicator(g, 0.0, 1.0);
        assert_abs_diff_eq!(inner_product(&haar, &haar).unwrap().re, 1.0, epsilon = 2f64.powi(-20));

        let right = SampledFunction::indicator(g, 1.0, 2.0);
        assert_eq!(inner_product(&haar, &right).unwrap(), Complex::new(0.0, 0.0));

        let half = SampledFunction::indicator(g, 0.0, 0.5);
        assert_abs_diff_eq!(inner_product(&half, &haar).unwrap().re, 0.5, epsilon = 2f64.powi(-20));
    }

    #[test]
    fn inner_product_rejects_grid_mismatch() {
        let a = SampledFunction::indicator(unit(8, 0, 2), 0.0, 1.0);
        let b = SampledFunction::indicator(unit(7, 0, 2), 0.0, 1.0);
        assert!(matches!(inner_product(&a, &b), Err(Error::GridMismatch(_))));
        let c = SampledFunction::indicator(unit(8, -1, 2), 0.0, 1.0);
        assert!(matches!(inner_product(&a, &c), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn lp_norm_goldens() {
        let g = unit(8, -1, 2);
        let chi = SampledFunction::indicator(g, 0.0, 1.0);
        assert_eq!(lp_norm(&chi, 2.0).unwrap(), 1.0);
        assert_eq!(lp_norm(&chi, f64::INFINITY).unwrap(), 1.0);
        let two_half = SampledFunction::indicator(g, 0.0, 0.5).scale(Complex::from(2.0));
        assert_eq!(lp_norm(&two_half, 1.0).unwrap(), 1.0);
        assert!(matches!(lp_norm(&chi, 0.5), Err(Error::Domain(_))));
        assert!(matches!(lp_norm(&chi, f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn dilate_translate_goldens() {
        let g = unit(8, -2, 2);
        let haar = SampledFunction::indicator(g, 0.0, 1.0);
        assert_eq!(dilate_translate(&haar, 0, 0, g).unwrap(), haar);
        assert_eq!(
            dilate_translate(&haar, 1, 1, g).unwrap(),
            SampledFunction::indicator(g, 0.5, 1.0)
        );
        assert_eq!(
            dilate_translate(&haar, 1, -1, g).unwrap(),
            SampledFunction::indicator(g, -0.5, 0.0)
        );
    }

    #[test]
    fn dilate_translate_rejects_scales_beyond_accuracy_limit() {
        let g = unit(8, -2, 2);
        let haar = SampledFunction::indicator(g, 0.0, 1.0);
        assert!(dilate_translate(&haar, 4, 0, g).is_ok());
        assert!(matches!(
            dilate_translate(&haar, 5, 0, g),
            Err(Error::Resolution { kappa: 5, max: 4 })
        ));
    }

    #[test]
    fn text_format_round_trips() {
        let g = GridND::new(unit(4, 0, 1), 2).unwrap();
        let f = SampledFunction::from_fn(g, |x| Complex::new(x[0] * 3.0 - 1e-300, x[1] / 7.0));
        let text = f.to_text();
        assert!(text.starts_with("4 0 16 2\n"));
        let back = SampledFunction::read_from(text.as_bytes()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn text_format_reports_line_numbers() {
        let err = SampledFunction::read_from("2 0 4 1\n1 0\n2 0\nx 0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
        let err = SampledFunction::read_from("2 0 4\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn multi_index_parsing_and_lattice() {
        let k: MultiIndex = "2,1".parse().unwrap();
        assert_eq!(k.components(), &[2, 1]);
        assert!("2,-1".parse::<MultiIndex>().is_err());
        let lattice = k.box_below();
        assert_eq!(lattice.len(), 6);
        assert_eq!(lattice[0], MultiIndex::new(vec![0, 0]));
        assert_eq!(lattice[1], MultiIndex::new(vec![0, 1]));
        assert_eq!(lattice[5], MultiIndex::new(vec![2, 1]));
    }

    #[test]
    fn tensor_product_layout() {
        let g = unit(4, 0, 1);
        let a = SampledFunction::from_fn_1d(g, Complex::from);
        let b = SampledFunction::from_fn_1d(g, |x| Complex::from(1.0 + x));
        let t = SampledFunction::tensor_product(&[&a, &b]).unwrap();
        let direct = SampledFunction::from_fn(t.grid(), |x| Complex::from(x[0] * (1.0 + x[1])));
        assert_eq!(t, direct);
    }
}
