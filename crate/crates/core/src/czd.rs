//! Dyadic Calderón–Zygmund decomposition of a 1-D function at level `alpha`.
//!
//! The selected set consists of the maximal dyadic intervals on which the
//! mean of `|f|` exceeds `alpha`. Starting from a level where every dyadic
//! interval meeting the support has mean `<= alpha`, intervals are split
//! depth-first (left child first) and a child is selected the first time
//! its mean exceeds `alpha`; its parent's mean is at most `alpha`, so the
//! child's is at most `2 alpha`. Ties do not select.
//!
//! The good part is `f` off the selected intervals and the (signed) mean of
//! `f` on each of them; the bad part `h_r = (f - mean_r) χ_{Q_r}` integrates
//! to zero.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Complex, Grid1D, GridND, SampledFunction};

/// `Q = 2^-kappa (nu + [0, 1))`. `kappa` may be negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DyadicInterval {
    pub kappa: i32,
    pub nu: i64,
}

impl DyadicInterval {
    pub fn new(kappa: i32, nu: i64) -> Self {
        Self { kappa, nu }
    }

    pub fn length(&self) -> f64 {
        (-(self.kappa as f64)).exp2()
    }

    pub fn left(&self) -> f64 {
        self.nu as f64 * self.length()
    }

    pub fn right(&self) -> f64 {
        (self.nu + 1) as f64 * self.length()
    }

    /// Cells `[first, last)` at `resolution`. Requires `kappa <= resolution`.
    pub fn cells(&self, resolution: u32) -> (i64, i64) {
        let width = 1i64 << (resolution as i64 - self.kappa as i64);
        (self.nu * width, (self.nu + 1) * width)
    }

    pub fn children(&self) -> [DyadicInterval; 2] {
        [
            DyadicInterval::new(self.kappa + 1, 2 * self.nu),
            DyadicInterval::new(self.kappa + 1, 2 * self.nu + 1),
        ]
    }

    /// Exact overlap test on the integer labels.
    pub fn intersects(&self, other: &DyadicInterval) -> bool {
        let level = self.kappa.max(other.kappa);
        let span = |q: &DyadicInterval| {
            let w = 1i64 << (level - q.kappa);
            (q.nu * w, (q.nu + 1) * w)
        };
        let (a0, a1) = span(self);
        let (b0, b1) = span(other);
        a0 < b1 && b0 < a1
    }
}

#[derive(Clone, Debug)]
pub struct CZDecomposition {
    pub alpha: f64,
    /// Sorted by left endpoint.
    pub selected: Vec<DyadicInterval>,
    /// Lives on the hull of the input box and the selected intervals.
    pub good: SampledFunction,
    /// One per selected interval, each sampled on exactly that interval.
    pub bad_parts: Vec<SampledFunction>,
}

impl CZDecomposition {
    pub fn resolution(&self) -> u32 {
        self.good.axis().resolution()
    }

    /// `good + sum h_r` on the good part's grid.
    pub fn reassemble(&self) -> Result<SampledFunction> {
        let mut total = self.good.clone();
        let grid = self.good.axis();
        for h in &self.bad_parts {
            let part = h.axis();
            if part.resolution() != grid.resolution() || part.lo() < grid.lo() || part.hi() > grid.hi() {
                return Err(Error::GridMismatch(format!("bad part on {part} outside {grid}")));
            }
            let offset = (part.lo() - grid.lo()) as usize;
            for (t, z) in total.samples_mut()[offset..].iter_mut().zip(h.samples()) {
                *t += z;
            }
        }
        Ok(total)
    }
}

struct MassTable {
    grid: Grid1D,
    prefix: Vec<f64>,
}

impl MassTable {
    fn new(f: &SampledFunction) -> Self {
        let h = f.axis().step();
        let mut prefix = Vec::with_capacity(f.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for z in f.samples() {
            acc += z.norm();
            prefix.push(acc);
        }
        for v in prefix.iter_mut() {
            *v *= h;
        }
        Self { grid: f.axis(), prefix }
    }

    /// `∫_Q |f|` with `f = 0` off the box.
    fn mass(&self, q: &DyadicInterval) -> f64 {
        let (c0, c1) = q.cells(self.grid.resolution());
        let lo = c0.clamp(self.grid.lo(), self.grid.hi());
        let hi = c1.clamp(self.grid.lo(), self.grid.hi());
        let i0 = (lo - self.grid.lo()) as usize;
        let i1 = (hi - self.grid.lo()) as usize;
        self.prefix[i1] - self.prefix[i0]
    }

    fn mean(&self, q: &DyadicInterval) -> f64 {
        self.mass(q) / q.length()
    }
}

/// Covering intervals at `kappa` of the cells `[a, b)`.
fn cover(kappa: i32, resolution: u32, a: i64, b: i64) -> impl Iterator<Item = DyadicInterval> {
    let width = 1i64 << (resolution as i64 - kappa as i64);
    let first = a.div_euclid(width);
    let last = (b - 1).div_euclid(width);
    (first..=last).map(move |nu| DyadicInterval::new(kappa, nu))
}

pub fn cz_decompose(f: &SampledFunction, alpha: f64) -> Result<CZDecomposition> {
    if f.dim() != 1 {
        return Err(Error::Structural("Calderón–Zygmund decomposition is 1-D".into()));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha must be positive and finite, got {alpha}")));
    }
    let grid = f.axis();
    let resolution = grid.resolution();
    let Some((s0, s1)) = f.nonzero_span() else {
        return Ok(CZDecomposition {
            alpha,
            selected: Vec::new(),
            good: f.clone(),
            bad_parts: Vec::new(),
        });
    };
    let (a, b) = (grid.lo() + s0 as i64, grid.lo() + s1 as i64);
    let table = MassTable::new(f);

    // coarsen until every covering interval has mean <= alpha
    let mut root_level = resolution as i32;
    while cover(root_level, resolution, a, b).any(|q| table.mean(&q) > alpha) {
        root_level -= 1;
        if resolution as i32 - root_level >= 62 {
            return Err(Error::Domain(format!(
                "no dyadic level coarse enough for alpha = {alpha}"
            )));
        }
    }

    let mut selected = Vec::new();
    let mut stack: Vec<DyadicInterval> = cover(root_level, resolution, a, b).collect();
    stack.reverse();
    while let Some(q) = stack.pop() {
        if q.kappa as u32 == resolution {
            continue;
        }
        let [left, right] = q.children();
        for child in [right, left] {
            if table.mass(&child) == 0.0 {
                continue;
            }
            if table.mean(&child) > alpha {
                selected.push(child);
            } else {
                stack.push(child);
            }
        }
    }
    // children are pushed right then left but selection happens on push;
    // restore left-to-right order
    selected.sort_by_key(|q| q.cells(resolution).0);

    let mut lo = grid.lo();
    let mut hi = grid.hi();
    for q in &selected {
        let (c0, c1) = q.cells(resolution);
        lo = lo.min(c0);
        hi = hi.max(c1);
    }
    let hull = Grid1D::new(resolution, lo, hi)?;
    let mut good = f.embed(hull)?;
    let h = grid.step();
    let mut bad_parts = Vec::with_capacity(selected.len());
    for q in &selected {
        let (c0, c1) = q.cells(resolution);
        let qgrid = Grid1D::new(resolution, c0, c1)?;
        let local = f.embed(qgrid)?;
        let mean = local.samples().iter().sum::<Complex>() * h / q.length();
        let bad = SampledFunction::from_samples(
            GridND::line(qgrid),
            local.samples().iter().map(|z| z - mean).collect(),
        )?;
        let offset = (c0 - hull.lo()) as usize;
        for slot in &mut good.samples_mut()[offset..offset + qgrid.len()] {
            *slot = mean;
        }
        bad_parts.push(bad);
    }
    Ok(CZDecomposition {
        alpha,
        selected,
        good,
        bad_parts,
    })
}

/// Outcome of one checked property. `slack >= 0` means satisfied with that
/// margin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub passed: bool,
    pub slack: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CzReport {
    pub checks: Vec<PropertyCheck>,
}

impl CzReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const PROP_BOUNDED_OFF_SET: &str = "bounded_off_selected";
pub const PROP_MEASURE: &str = "measure_bound";
pub const PROP_MEANS: &str = "mean_bracket";
pub const PROP_MEAN_ZERO: &str = "bad_parts_mean_zero";
pub const PROP_GOOD_BOUND: &str = "good_part_bound";
pub const PROP_DISJOINT: &str = "disjoint";
pub const PROP_IDENTITY: &str = "reassembles_input";

/// Neumaier's compensated sum of complex samples.
fn compensated_sum(samples: &[Complex]) -> Complex {
    let mut re = (0.0f64, 0.0f64);
    let mut im = (0.0f64, 0.0f64);
    let add = |(sum, carry): &mut (f64, f64), x: f64| {
        let t = *sum + x;
        *carry += if sum.abs() >= x.abs() { (*sum - t) + x } else { (x - t) + *sum };
        *sum = t;
    };
    for z in samples {
        add(&mut re, z.re);
        add(&mut im, z.im);
    }
    Complex::new(re.0 + re.1, im.0 + im.1)
}

/// Checks the five decomposition properties plus disjointness and the
/// identity `f = g + sum h_r`.
pub fn verify_cz(dec: &CZDecomposition, f: &SampledFunction) -> Result<CzReport> {
    let grid = f.axis();
    let resolution = grid.resolution();
    let alpha = dec.alpha;
    let rel = 1e-12;
    let table = MassTable::new(f);
    let l1 = crate::grid::lp_norm(f, 1.0)?;

    let mut covered = vec![false; f.len()];
    for q in &dec.selected {
        let (c0, c1) = q.cells(resolution);
        for c in c0.max(grid.lo())..c1.min(grid.hi()) {
            covered[(c - grid.lo()) as usize] = true;
        }
    }
    let off_max = f
        .samples()
        .iter()
        .zip(&covered)
        .filter(|(_, &c)| !c)
        .map(|(z, _)| z.norm())
        .fold(0.0, f64::max);
    let bounded = alpha - off_max;

    let total: f64 = dec.selected.iter().map(DyadicInterval::length).sum();
    let measure = l1 / alpha - total;

    let mut means_slack = f64::INFINITY;
    let mut means_ok = true;
    for q in &dec.selected {
        let m = table.mean(q);
        means_ok &= m > alpha && m <= 2.0 * alpha * (1.0 + rel);
        means_slack = means_slack.min((m - alpha).min(2.0 * alpha - m));
    }

    // each integral is compared with the mass of f on its interval (the
    // scale of the rounding in f - mean); compensated summation keeps the
    // error independent of the interval length
    let mean_slack = dec
        .selected
        .iter()
        .zip(&dec.bad_parts)
        .map(|(q, h)| {
            let integral = compensated_sum(h.samples()) * h.axis().step();
            rel * table.mass(q) - integral.norm()
        })
        .fold(f64::INFINITY, f64::min);

    let good_slack = 2.0 * alpha - dec.good.max_abs();

    let mut disjoint = true;
    for (i, p) in dec.selected.iter().enumerate() {
        for q in &dec.selected[i + 1..] {
            disjoint &= !p.intersects(q);
        }
    }

    let scale = f.max_abs().max(1.0);
    let reassembled = dec.reassemble()?;
    let identity_err = reassembled.sup_distance(&f.embed(reassembled.axis())?)?;

    Ok(CzReport {
        checks: vec![
            PropertyCheck {
                name: PROP_BOUNDED_OFF_SET,
                passed: bounded >= 0.0,
                slack: bounded,
            },
            PropertyCheck {
                name: PROP_MEASURE,
                passed: measure >= -rel * total.max(1.0),
                slack: measure,
            },
            PropertyCheck {
                name: PROP_MEANS,
                passed: means_ok,
                slack: if dec.selected.is_empty() { 0.0 } else { means_slack },
            },
            PropertyCheck {
                name: PROP_MEAN_ZERO,
                passed: mean_slack >= 0.0,
                slack: if dec.bad_parts.is_empty() { 0.0 } else { mean_slack },
            },
            PropertyCheck {
                name: PROP_GOOD_BOUND,
                passed: good_slack >= -rel * alpha,
                slack: good_slack,
            },
            PropertyCheck {
                name: PROP_DISJOINT,
                passed: disjoint,
                slack: 0.0,
            },
            PropertyCheck {
                name: PROP_IDENTITY,
                passed: identity_err <= rel * scale,
                slack: rel * scale - identity_err,
            },
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box() -> SampledFunction {
        let g = Grid1D::from_unit_bounds(8, -2, 2).unwrap();
        SampledFunction::indicator(g, 0.0, 1.0)
    }

    #[test]
    fn unit_box_at_quarter_selects_zero_two() {
        let f = unit_box();
        let dec = cz_decompose(&f, 0.25).unwrap();
        assert_eq!(dec.selected, vec![DyadicInterval::new(-1, 0)]);
        let integral: Complex = dec.bad_parts[0].samples().iter().sum::<Complex>() * f.axis().step();
        assert!(integral.norm() <= 1e-12);
        let report = verify_cz(&dec, &f).unwrap();
        assert!(report.all_passed(), "{report:?}");
    }

    #[test]
    fn large_alpha_selects_nothing() {
        let f = unit_box();
        let dec = cz_decompose(&f, 2.0).unwrap();
        assert!(dec.selected.is_empty());
        assert_eq!(dec.good, f);
        assert!(verify_cz(&dec, &f).unwrap().all_passed());
    }

    #[test]
    fn tie_does_not_select() {
        // mean over [0, 1) is exactly 1
        let dec = cz_decompose(&unit_box(), 1.0).unwrap();
        assert!(dec.selected.is_empty());
    }

    #[test]
    fn zero_function_and_bad_alpha() {
        let g = Grid1D::from_unit_bounds(6, 0, 1).unwrap();
        let zero = SampledFunction::zeros(GridND::line(g));
        let dec = cz_decompose(&zero, 1.0).unwrap();
        assert!(dec.selected.is_empty() && dec.good.max_abs() == 0.0);
        assert!(matches!(cz_decompose(&zero, 0.0), Err(Error::Domain(_))));
        assert!(matches!(cz_decompose(&zero, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn dropping_an_interval_breaks_the_off_set_bound() {
        let f = unit_box();
        let mut dec = cz_decompose(&f, 0.25).unwrap();
        dec.selected.pop();
        dec.bad_parts.pop();
        let report = verify_cz(&dec, &f).unwrap();
        assert!(!report.check(PROP_BOUNDED_OFF_SET).unwrap().passed);
    }

    #[test]
    fn interval_arithmetic() {
        let q = DyadicInterval::new(-1, 0);
        assert_eq!((q.left(), q.right()), (0.0, 2.0));
        assert_eq!(q.cells(3), (0, 16));
        assert!(q.intersects(&DyadicInterval::new(2, 7)));
        assert!(!q.intersects(&DyadicInterval::new(2, 8)));
        assert!(!q.intersects(&DyadicInterval::new(-1, -1)));
        let [l, r] = q.children();
        assert_eq!((l, r), (DyadicInterval::new(0, 0), DyadicInterval::new(0, 1)));
    }
}
