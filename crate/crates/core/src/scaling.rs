//! Scaling systems `(phi, phi_dual)`: construction, biorthogonality and the
//! decay-hypothesis report.
//!
//! Daubechies systems are built by the cascade algorithm started from the
//! Haar box. After `n` steps the iterate is constant on cells of width `2^-n`
//! and keeps exactly orthonormal integer translates. A system built with
//! `cascade_iters = J` therefore yields a discrete multiresolution analysis
//! on the grid: the generator used at scale `kappa` is the iterate after
//! `J - kappa` steps, so that `V_kappa` is nested in `V_{kappa+1}` and every
//! projector identity holds to rounding error.

use std::fmt;
use std::io::BufRead;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filters::DAUBECHIES;
use crate::grid::{Complex, Grid1D, GridND, SampledFunction};

#[derive(Clone, Debug)]
struct Refinement {
    /// `sqrt(2) h_k`, summing to 2.
    taps: Vec<f64>,
    iterations: u32,
}

/// Numerical probe of the decay hypotheses on the truncation box.
///
/// Every integral is taken over the sampled support only. On a bounded box
/// all of them are finite, so the flags confirm consistency of the sampled
/// data and cannot certify integrability over the whole line.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    /// `|phi(x)| <= ∫_{[-1/2,1/2]} Phi(x - u) du` on every sample.
    pub majorant_ok: bool,
    /// Largest `|phi(x)| - ∫ Phi(x - u) du`; nonpositive when the bound holds.
    pub majorant_residual: f64,
    /// `∫_0^∞ tau ∫_{|eta| >= tau} Phi = ∫ Phi(eta) eta^2 / 2`.
    pub tail_moment_phi: f64,
    pub derivative_majorant_ok: bool,
    /// Same moment for the envelope of the finite-difference derivative of
    /// the dual.
    pub tail_moment_dual_deriv: f64,
    pub dual_majorant_ok: bool,
    /// `∫_1^∞ ∫_{|xi| >= s} PhiDual = ∫ PhiDual(xi) (|xi| - 1)_+`.
    pub dual_tail_moment: f64,
    pub dual_tail_ok: bool,
    /// `∫_0^∞ mu(x) ln(1 + x) dx` for the even decreasing envelope `mu` of
    /// `|phi|` and `|phi_dual|`.
    pub mu_log_moment: f64,
    pub caveat: &'static str,
}

const TRUNCATION_CAVEAT: &str =
    "integrals are evaluated on the truncation box; finiteness there cannot certify integrability on the whole line";

impl ConditionReport {
    pub fn valid(&self) -> bool {
        self.majorant_ok
            && self.derivative_majorant_ok
            && self.dual_majorant_ok
            && self.dual_tail_ok
            && self.tail_moment_phi.is_finite()
            && self.mu_log_moment.is_finite()
    }
}

#[derive(Clone, Debug)]
pub struct ScalingSystem {
    phi: SampledFunction,
    phi_dual: SampledFunction,
    orthonormal: bool,
    condition_report: ConditionReport,
    refinement: Option<Refinement>,
}

impl ScalingSystem {
    /// Wraps an externally supplied pair. Both must share one 1-D grid.
    pub fn from_pair(phi: SampledFunction, phi_dual: SampledFunction) -> Result<Self> {
        if phi.dim() != 1 || phi_dual.dim() != 1 {
            return Err(Error::Structural("scaling functions must be 1-D".into()));
        }
        if phi.grid() != phi_dual.grid() {
            return Err(Error::GridMismatch(format!(
                "phi on {} but phi_dual on {}",
                phi.grid(),
                phi_dual.grid()
            )));
        }
        Ok(Self::assemble(phi, phi_dual, None))
    }

    fn assemble(
        phi: SampledFunction,
        phi_dual: SampledFunction,
        refinement: Option<Refinement>,
    ) -> Self {
        let orthonormal = phi.samples() == phi_dual.samples();
        let condition_report = validate_pair(&phi, &phi_dual);
        Self {
            phi,
            phi_dual,
            orthonormal,
            condition_report,
            refinement,
        }
    }

    pub fn phi(&self) -> &SampledFunction {
        &self.phi
    }

    pub fn phi_dual(&self) -> &SampledFunction {
        &self.phi_dual
    }

    pub fn orthonormal(&self) -> bool {
        self.orthonormal
    }

    /// `phi = phi_dual = χ_[0,1)` exactly.
    pub fn is_haar(&self) -> bool {
        let grid = self.grid();
        let one = grid.cells_per_unit();
        self.orthonormal
            && (grid.lo()..grid.hi())
                .zip(self.phi.samples())
                .all(|(c, z)| *z == Complex::from(if (0..one).contains(&c) { 1.0 } else { 0.0 }))
    }

    /// Smallest interval `[lo, hi)` of unit coordinates holding the
    /// supports of `phi` and `phi_dual`.
    pub fn support(&self) -> (f64, f64) {
        let grid = self.grid();
        let spans = [self.phi.nonzero_span(), self.phi_dual.nonzero_span()];
        let (a, b) = spans
            .iter()
            .flatten()
            .fold((usize::MAX, 0), |(a, b), &(x, y)| (a.min(x), b.max(y)));
        if a >= b {
            return (0.0, 0.0);
        }
        let h = grid.step();
        (grid.left_edge() + a as f64 * h, grid.left_edge() + b as f64 * h)
    }

    pub fn condition_report(&self) -> &ConditionReport {
        &self.condition_report
    }

    pub fn grid(&self) -> Grid1D {
        self.phi.axis()
    }

    /// The system with `phi` and `phi_dual` exchanged. Its projectors are
    /// the adjoints of this system's projectors.
    pub fn swapped(&self) -> ScalingSystem {
        if self.orthonormal {
            return self.clone();
        }
        Self::assemble(self.phi_dual.clone(), self.phi.clone(), None)
    }

    pub fn resolution(&self) -> u32 {
        self.grid().resolution()
    }

    /// The pair read at scale `kappa` by the projectors.
    ///
    /// Refinable systems return the cascade iterate after
    /// `iterations - kappa` steps; other systems return `(phi, phi_dual)`.
    pub fn generators(&self, kappa: u32) -> (SampledFunction, SampledFunction) {
        match &self.refinement {
            Some(r) => {
                let steps = r.iterations.saturating_sub(kappa);
                let phi = cascade_on_grid(&r.taps, steps, self.grid());
                (phi.clone(), phi)
            }
            None => (self.phi.clone(), self.phi_dual.clone()),
        }
    }

    /// Reads two consecutive function blocks, `phi` then `phi_dual`.
    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let phi = SampledFunction::read_block(&mut lines)?;
        let phi_dual = SampledFunction::read_block(&mut lines)?;
        Self::from_pair(phi, phi_dual)
    }

    pub fn to_text(&self) -> String {
        let mut out = self.phi.to_text();
        out.push_str(&self.phi_dual.to_text());
        out
    }
}

/// `phi = phi_dual = χ_[0,1)` on `domain`.
pub fn haar_system(resolution: u32, domain: Grid1D) -> Result<ScalingSystem> {
    if domain.resolution() != resolution {
        return Err(Error::GridMismatch(format!(
            "box {domain} is not at resolution {resolution}"
        )));
    }
    let one = domain.cells_per_unit();
    if domain.lo() > 0 || domain.hi() < one {
        return Err(Error::Structural(format!("box {domain} does not contain [0, 1)")));
    }
    let samples = (domain.lo()..domain.hi())
        .map(|c| Complex::from(if (0..one).contains(&c) { 1.0 } else { 0.0 }))
        .collect();
    let phi = SampledFunction::from_samples(GridND::line(domain), samples)?;
    Ok(ScalingSystem::assemble(phi.clone(), phi, None))
}

/// Orthonormal Daubechies system of order `order` (`2 order` taps), sampled
/// on `[0, 2 order - 1)` at resolution `resolution`.
pub fn daubechies_system(order: usize, resolution: u32, cascade_iters: u32) -> Result<ScalingSystem> {
    let filter = order
        .checked_sub(1)
        .and_then(|i| DAUBECHIES.get(i))
        .ok_or(Error::UnsupportedOrder(order))?;
    if cascade_iters < resolution {
        return Err(Error::Domain(format!(
            "cascade_iters = {cascade_iters} is below the resolution {resolution}"
        )));
    }
    let sum: f64 = filter.iter().sum();
    let taps: Vec<f64> = filter.iter().map(|h| 2.0 * h / sum).collect();
    let width = (2 * order - 1) as i64;
    let grid = Grid1D::new(resolution, 0, width << resolution)?;
    let phi = cascade_on_grid(&taps, cascade_iters, grid);
    Ok(ScalingSystem::assemble(
        phi.clone(),
        phi,
        Some(Refinement {
            taps,
            iterations: cascade_iters,
        }),
    ))
}

/// Coefficients of the `steps`-th cascade iterate on cells of width
/// `2^-steps`, starting from `χ_[0,1)`.
fn cascade(taps: &[f64], steps: u32) -> Vec<f64> {
    let mut current = vec![1.0];
    for level in 0..steps {
        let spacing = 1usize << level;
        let mut next = vec![0.0; current.len() + (taps.len() - 1) * spacing];
        for (k, &a) in taps.iter().enumerate() {
            let offset = k * spacing;
            for (slot, &v) in next[offset..offset + current.len()].iter_mut().zip(&current) {
                *slot += a * v;
            }
        }
        current = next;
    }
    current
}

/// Midpoint samples of the cascade iterate on `grid`.
fn cascade_on_grid(taps: &[f64], steps: u32, grid: Grid1D) -> SampledFunction {
    let values = cascade(taps, steps);
    let resolution = grid.resolution();
    let lookup = |cell: i64| -> f64 {
        if cell < 0 {
            return 0.0;
        }
        let idx = if steps >= resolution {
            let ratio = 1i64 << (steps - resolution);
            cell * ratio + ratio / 2
        } else {
            cell >> (resolution - steps)
        };
        values.get(idx as usize).copied().unwrap_or(0.0)
    };
    let samples = (grid.lo()..grid.hi()).map(|c| Complex::from(lookup(c))).collect();
    SampledFunction::from_samples(GridND::line(grid), samples).expect("sample count matches grid")
}

/// `max_{|nu|,|mu| <= R} |<phi(. - nu), phi_dual(. - mu)> - δ_{nu mu}|`.
///
/// Integer shifts move samples by whole multiples of `2^J` cells, so the
/// inner products are evaluated on the unbounded line without resampling.
pub fn biorthogonality_defect(sys: &ScalingSystem, shift_range: u32) -> Result<f64> {
    if shift_range < 1 {
        return Err(Error::Domain("shift_range must be at least 1".into()));
    }
    let grid = sys.grid();
    let unit = grid.cells_per_unit();
    let phi = sys.phi.samples();
    let dual = sys.phi_dual.samples();
    let n = phi.len() as i64;
    let range = 2 * shift_range as i64;
    let mut worst: f64 = 0.0;
    for lag in -range..=range {
        // sum_m phi[m] conj(dual[m - lag 2^J])
        let offset = lag * unit;
        let lo = offset.max(0);
        let hi = (n + offset).min(n);
        let mut sum = Complex::new(0.0, 0.0);
        for m in lo..hi {
            sum += phi[m as usize] * dual[(m - offset) as usize].conj();
        }
        let value = sum * grid.step();
        let target = if lag == 0 { 1.0 } else { 0.0 };
        worst = worst.max((value - target).norm());
    }
    Ok(worst)
}

/// Rebuilds the condition report from the sampled pair.
pub fn validate_conditions(sys: &ScalingSystem) -> ConditionReport {
    validate_pair(&sys.phi, &sys.phi_dual)
}

/// Radially decreasing envelope `E(r) = max{|v(y)| : |y| >= r}` over sample
/// midpoints.
struct Envelope {
    /// Distinct `|y|` in descending order with running maxima.
    radii: Vec<f64>,
    maxima: Vec<f64>,
}

impl Envelope {
    fn new(points: &[f64], magnitudes: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[b].abs().total_cmp(&points[a].abs()));
        let mut radii = Vec::with_capacity(order.len());
        let mut maxima = Vec::with_capacity(order.len());
        let mut running: f64 = 0.0;
        for i in order {
            running = running.max(magnitudes[i]);
            radii.push(points[i].abs());
            maxima.push(running);
        }
        Self { radii, maxima }
    }

    fn at(&self, r: f64) -> f64 {
        // radii descend; count of entries with radius >= r
        let count = self.radii.partition_point(|&y| y >= r);
        if count == 0 {
            0.0
        } else {
            self.maxima[count - 1]
        }
    }
}

/// Probe of one bound `|v(x)| <= ∫_{[-1/2,1/2]} M(x - u) du` with `M` the
/// envelope shifted by 1/2. Returns the worst residual and the majorant
/// sampled on `grid` padded by one unit on each side.
fn majorant_probe(grid: Grid1D, magnitudes: &[f64]) -> (f64, Grid1D, Vec<f64>) {
    let points: Vec<f64> = (0..grid.len()).map(|i| grid.midpoint(i)).collect();
    let envelope = Envelope::new(&points, magnitudes);
    let unit = grid.cells_per_unit();
    let padded = Grid1D::new(grid.resolution(), grid.lo() - unit, grid.hi() + unit)
        .expect("padding keeps a nonempty grid");
    let majorant: Vec<f64> = (0..padded.len())
        .map(|i| envelope.at((padded.midpoint(i).abs() - 0.5).max(0.0)))
        .collect();

    let h = grid.step();
    let mut prefix = Vec::with_capacity(majorant.len() + 1);
    prefix.push(0.0);
    for v in &majorant {
        prefix.push(prefix.last().unwrap() + v);
    }
    // window [x - 1/2, x + 1/2]: cells strictly inside carry weight h, the
    // two cells centred on the ends (when the grid has them) carry h/2
    let half = unit / 2;
    let mut residual = f64::NEG_INFINITY;
    for (i, &m) in magnitudes.iter().enumerate() {
        let centre = i as i64 + unit;
        let integral = if unit >= 2 {
            let inner = (prefix[(centre + half) as usize] - prefix[(centre - half + 1) as usize]) * h;
            inner + 0.5 * h * (majorant[(centre - half) as usize] + majorant[(centre + half) as usize])
        } else {
            majorant[centre as usize] * h
        };
        residual = residual.max(m - integral);
    }
    (residual, padded, majorant)
}

fn moment(grid: Grid1D, values: &[f64], weight: impl Fn(f64) -> f64) -> f64 {
    let h = grid.step();
    values
        .iter()
        .enumerate()
        .map(|(i, v)| v * weight(grid.midpoint(i)))
        .sum::<f64>()
        * h
}

fn validate_pair(phi: &SampledFunction, dual: &SampledFunction) -> ConditionReport {
    let grid = phi.axis();
    let h = grid.step();
    let tol = |scale: f64| 1e-12 * scale.max(1.0);

    let phi_abs: Vec<f64> = phi.samples().iter().map(|z| z.norm()).collect();
    let dual_abs: Vec<f64> = dual.samples().iter().map(|z| z.norm()).collect();

    let (phi_residual, padded, phi_major) = majorant_probe(grid, &phi_abs);
    let tail_moment_phi = moment(padded, &phi_major, |x| x * x / 2.0);
    let phi_max = phi_abs.iter().cloned().fold(0.0, f64::max);
    let majorant_ok = phi_residual <= tol(phi_max) && phi_residual.is_finite();

    let d = dual.samples();
    let deriv: Vec<f64> = (0..d.len())
        .map(|i| {
            let left = if i == 0 { Complex::new(0.0, 0.0) } else { d[i - 1] };
            let right = d.get(i + 1).copied().unwrap_or_default();
            ((right - left) / (2.0 * h)).norm()
        })
        .collect();
    let (deriv_residual, padded_d, deriv_major) = majorant_probe(grid, &deriv);
    let tail_moment_dual_deriv = moment(padded_d, &deriv_major, |x| x * x / 2.0);
    let deriv_max = deriv.iter().cloned().fold(0.0, f64::max);
    let derivative_majorant_ok = deriv_residual <= tol(deriv_max)
        && deriv_residual.is_finite()
        && tail_moment_dual_deriv.is_finite();

    let (dual_residual, padded_t, dual_major) = majorant_probe(grid, &dual_abs);
    let dual_max = dual_abs.iter().cloned().fold(0.0, f64::max);
    let dual_majorant_ok = dual_residual <= tol(dual_max) && dual_residual.is_finite();
    let dual_tail_moment = moment(padded_t, &dual_major, |x| (x.abs() - 1.0).max(0.0));
    let dual_tail_ok = dual_tail_moment.is_finite() && dual_tail_moment >= 0.0;

    let points: Vec<f64> = (0..grid.len()).map(|i| grid.midpoint(i)).collect();
    let joint: Vec<f64> = phi_abs.iter().zip(&dual_abs).map(|(a, b)| a.max(*b)).collect();
    let mu = Envelope::new(&points, &joint);
    let reach = points.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let cells = (reach / h).ceil() as usize + 1;
    let mu_log_moment = (0..cells)
        .map(|k| {
            let x = (k as f64 + 0.5) * h;
            mu.at(x) * (1.0 + x).ln()
        })
        .sum::<f64>()
        * h;

    ConditionReport {
        majorant_ok,
        majorant_residual: phi_residual,
        tail_moment_phi,
        derivative_majorant_ok,
        tail_moment_dual_deriv,
        dual_majorant_ok,
        dual_tail_moment,
        dual_tail_ok,
        mu_log_moment,
        caveat: TRUNCATION_CAVEAT,
    }
}

/// Command-line form of a scaling system: `haar`, `dbN` or `file:PATH`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScalingSpec {
    Haar,
    Daubechies(usize),
    File(PathBuf),
}

impl ScalingSpec {
    /// Builds the system at `resolution`. Haar is sampled on `domain`; the
    /// other kinds keep their own support grid.
    pub fn build(&self, resolution: u32, domain: Grid1D) -> Result<ScalingSystem> {
        match self {
            ScalingSpec::Haar => haar_system(resolution, domain),
            ScalingSpec::Daubechies(n) => daubechies_system(*n, resolution, resolution),
            ScalingSpec::File(path) => {
                let file = std::fs::File::open(path)?;
                let sys = ScalingSystem::read_from(std::io::BufReader::new(file))?;
                if sys.resolution() != resolution {
                    return Err(Error::GridMismatch(format!(
                        "{} is sampled at J={}, expected J={resolution}",
                        path.display(),
                        sys.resolution()
                    )));
                }
                Ok(sys)
            }
        }
    }
}

impl FromStr for ScalingSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("haar") {
            return Ok(ScalingSpec::Haar);
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(ScalingSpec::File(PathBuf::from(path)));
        }
        if let Some(order) = s.strip_prefix("db").or_else(|| s.strip_prefix("DB")) {
            let n: usize = order
                .parse()
                .map_err(|_| Error::Domain(format!("invalid Daubechies order in {s:?}")))?;
            if !(1..=DAUBECHIES.len()).contains(&n) {
                return Err(Error::UnsupportedOrder(n));
            }
            return Ok(ScalingSpec::Daubechies(n));
        }
        Err(Error::Domain(format!(
            "unknown scaling {s:?}; expected haar, dbN or file:PATH"
        )))
    }
}

impl fmt::Display for ScalingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalingSpec::Haar => write!(f, "haar"),
            ScalingSpec::Daubechies(n) => write!(f, "db{n}"),
            ScalingSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{inner_product, lp_norm};

    fn domain(resolution: u32) -> Grid1D {
        Grid1D::from_unit_bounds(resolution, -2, 2).unwrap()
    }

    #[test]
    fn haar_goldens() {
        let sys = haar_system(8, domain(8)).unwrap();
        let phi = sys.phi();
        for (i, z) in phi.samples().iter().enumerate() {
            let x = phi.axis().midpoint(i);
            let expected = if (0.0..1.0).contains(&x) { 1.0 } else { 0.0 };
            assert_eq!(z.re, expected);
        }
        assert!(sys.orthonormal());
        assert_eq!(lp_norm(phi, 2.0).unwrap(), 1.0);
        let shifted = crate::grid::dilate_translate(phi, 0, 1, phi.axis()).unwrap();
        assert_eq!(inner_product(phi, &shifted).unwrap().norm(), 0.0);
    }

    #[test]
    fn haar_requires_unit_interval_inside_box() {
        let g = Grid1D::new(8, 1, 512).unwrap();
        assert!(matches!(haar_system(8, g), Err(Error::Structural(_))));
    }

    #[test]
    fn daubechies_one_is_haar() {
        let d1 = daubechies_system(1, 8, 8).unwrap();
        let haar = haar_system(8, domain(8)).unwrap();
        assert_eq!(d1.phi().embed(domain(8)).unwrap(), *haar.phi());
        assert_eq!(d1.generators(3).0.embed(domain(8)).unwrap(), *haar.phi());
    }

    #[test]
    fn daubechies_normalization_and_support() {
        for order in [2, 4, 10] {
            let sys = daubechies_system(order, 8, 8).unwrap();
            let integral: f64 = sys.phi().samples().iter().map(|z| z.re).sum::<f64>() * sys.grid().step();
            assert!((integral - 1.0).abs() <= 1e-8, "order {order}: {integral}");
            assert_eq!(sys.grid().right_edge(), (2 * order - 1) as f64);
        }
    }

    #[test]
    fn unsupported_orders_are_rejected() {
        assert!(matches!(daubechies_system(0, 8, 8), Err(Error::UnsupportedOrder(0))));
        assert!(matches!(daubechies_system(11, 8, 8), Err(Error::UnsupportedOrder(11))));
        assert!(matches!(daubechies_system(2, 8, 7), Err(Error::Domain(_))));
        assert!(matches!("db11".parse::<ScalingSpec>(), Err(Error::UnsupportedOrder(11))));
    }

    #[test]
    fn biorthogonality_goldens() {
        let haar = haar_system(8, domain(8)).unwrap();
        assert_eq!(biorthogonality_defect(&haar, 3).unwrap(), 0.0);

        let d2 = daubechies_system(2, 10, 10).unwrap();
        assert!(biorthogonality_defect(&d2, 3).unwrap() <= 1e-6);

        let doubled = haar.phi().scale(Complex::from(2.0));
        let skewed = ScalingSystem::from_pair(haar.phi().clone(), doubled).unwrap();
        assert!(!skewed.orthonormal());
        assert_eq!(biorthogonality_defect(&skewed, 1).unwrap(), 1.0);

        assert!(biorthogonality_defect(&haar, 0).is_err());
    }

    #[test]
    fn haar_conditions() {
        let report = validate_conditions(&haar_system(8, domain(8)).unwrap());
        assert!(report.valid(), "{report:?}");
        assert!(report.mu_log_moment <= 2.0 * std::f64::consts::LN_2);
        assert!(report.mu_log_moment <= 3.0 * 2.5f64.ln());
    }

    #[test]
    fn daubechies_four_conditions() {
        let report = validate_conditions(&daubechies_system(4, 8, 8).unwrap());
        assert!(report.valid(), "{report:?}");
        assert!(report.tail_moment_phi >= 0.0 && report.tail_moment_dual_deriv >= 0.0);
    }

    #[test]
    fn singular_profile_still_reports() {
        let g = domain(8);
        let phi = SampledFunction::from_fn_1d(g, |x| Complex::from(x.abs().powf(-0.5)));
        let sys = ScalingSystem::from_pair(phi.clone(), phi).unwrap();
        let report = validate_conditions(&sys);
        assert!(report.majorant_ok);
        assert!(report.mu_log_moment.is_finite());
    }

    #[test]
    fn validation_is_deterministic() {
        let sys = daubechies_system(3, 7, 7).unwrap();
        assert_eq!(validate_conditions(&sys), validate_conditions(&sys));
        assert_eq!(validate_conditions(&sys), *sys.condition_report());
    }

    #[test]
    fn scaling_file_round_trip() {
        let sys = daubechies_system(2, 6, 6).unwrap();
        let back = ScalingSystem::read_from(sys.to_text().as_bytes()).unwrap();
        assert_eq!(back.phi(), sys.phi());
        assert!(back.orthonormal());
    }

    #[test]
    fn scaling_spec_parsing() {
        assert_eq!("haar".parse::<ScalingSpec>().unwrap(), ScalingSpec::Haar);
        assert_eq!("db4".parse::<ScalingSpec>().unwrap(), ScalingSpec::Daubechies(4));
        assert_eq!(
            "file:/tmp/x.sc".parse::<ScalingSpec>().unwrap(),
            ScalingSpec::File("/tmp/x.sc".into())
        );
        assert!("sym4".parse::<ScalingSpec>().is_err());
    }
}
