//! One-dimensional projectors
//!
//! `E_kappa f = sum_nu c_nu phi(2^kappa . - nu)` with
//! `c_nu = 2^kappa ∫ f conj(phi_dual(2^kappa . - nu))`, and the details
//! `D_kappa = E_kappa - E_{kappa-1}`, `E_{-1} = 0`.
//!
//! The sum over `nu` runs over the finite set of translates whose dual
//! support meets the nonzero span of `f`. Translates that leave the box are
//! still used and their mass outside the box is lost.

use crate::error::{Error, Result};
use crate::grid::{kappa_limit, Complex, Grid1D, GridND, SampledFunction};
use crate::scaling::ScalingSystem;

/// Trimmed generator: samples on cells `lo .. lo + samples.len()`.
#[derive(Clone, Debug)]
struct Generator {
    lo: i64,
    samples: Vec<Complex>,
}

impl Generator {
    fn from_function(f: &SampledFunction) -> Self {
        match f.nonzero_span() {
            Some((a, b)) => Self {
                lo: f.axis().lo() + a as i64,
                samples: f.samples()[a..b].to_vec(),
            },
            None => Self {
                lo: 0,
                samples: Vec::new(),
            },
        }
    }

    fn hi(&self) -> i64 {
        self.lo + self.samples.len() as i64
    }
}

#[derive(Clone, Debug)]
struct Level {
    phi: Generator,
    dual: Generator,
}

/// A 1-D operator tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operator1D {
    Project(u32),
    Detail(u32),
}

impl Operator1D {
    pub fn kappa(&self) -> u32 {
        match *self {
            Operator1D::Project(k) | Operator1D::Detail(k) => k,
        }
    }
}

/// Expansion coefficients `c_nu` for `nu = first_nu .. first_nu + len`.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficients {
    pub first_nu: i64,
    pub values: Vec<Complex>,
}

impl Coefficients {
    /// `c_nu`, zero outside the active set.
    pub fn get(&self, nu: i64) -> Complex {
        usize::try_from(nu - self.first_nu)
            .ok()
            .and_then(|i| self.values.get(i).copied())
            .unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.first_nu + i as i64, c))
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

#[derive(Clone, Debug)]
pub struct ProjectorContext {
    sys: ScalingSystem,
    domain: Grid1D,
    kappa_max: u32,
    levels: Vec<Level>,
}

impl ProjectorContext {
    pub fn new(sys: ScalingSystem, domain: Grid1D) -> Result<Self> {
        if sys.resolution() != domain.resolution() {
            return Err(Error::GridMismatch(format!(
                "scaling system at J={} but box {domain}",
                sys.resolution()
            )));
        }
        let kappa_max = kappa_limit(domain.resolution()).ok_or_else(|| {
            Error::Domain(format!(
                "resolution {} leaves no admissible scale",
                domain.resolution()
            ))
        })?;
        let levels = (0..=kappa_max)
            .map(|k| {
                let (phi, dual) = sys.generators(k);
                Level {
                    phi: Generator::from_function(&phi),
                    dual: Generator::from_function(&dual),
                }
            })
            .collect();
        Ok(Self {
            sys,
            domain,
            kappa_max,
            levels,
        })
    }

    pub fn system(&self) -> &ScalingSystem {
        &self.sys
    }

    pub fn domain(&self) -> Grid1D {
        self.domain
    }

    pub fn kappa_max(&self) -> u32 {
        self.kappa_max
    }

    fn check_kappa(&self, kappa: u32) -> Result<()> {
        if kappa > self.kappa_max {
            return Err(Error::Resolution {
                kappa,
                max: self.kappa_max,
            });
        }
        Ok(())
    }

    fn check_input(&self, f: &SampledFunction) -> Result<()> {
        if f.grid() != GridND::line(self.domain) {
            return Err(Error::GridMismatch(format!(
                "input on {} but projector box is {}",
                f.grid(),
                self.domain
            )));
        }
        Ok(())
    }

    pub fn coefficients(&self, f: &SampledFunction, kappa: u32) -> Result<Coefficients> {
        self.check_input(f)?;
        self.check_kappa(kappa)?;
        Ok(self.coefficients_line(f.samples(), kappa))
    }

    pub fn project(&self, f: &SampledFunction, kappa: u32) -> Result<SampledFunction> {
        self.apply(f, Operator1D::Project(kappa))
    }

    pub fn detail(&self, f: &SampledFunction, kappa: u32) -> Result<SampledFunction> {
        self.apply(f, Operator1D::Detail(kappa))
    }

    pub fn apply(&self, f: &SampledFunction, op: Operator1D) -> Result<SampledFunction> {
        self.check_input(f)?;
        self.check_kappa(op.kappa())?;
        let mut out = vec![Complex::default(); f.len()];
        let mut scratch = Vec::new();
        self.apply_line(f.samples(), op, &mut out, &mut scratch);
        SampledFunction::from_samples(f.grid(), out)
    }

    /// Applies `op` to one line of samples on the box. `out` is overwritten.
    /// The scale must already be validated.
    pub(crate) fn apply_line(
        &self,
        line: &[Complex],
        op: Operator1D,
        out: &mut [Complex],
        scratch: &mut Vec<Complex>,
    ) {
        out.fill(Complex::default());
        match op {
            Operator1D::Project(k) => self.project_line(line, k, out),
            Operator1D::Detail(0) => self.project_line(line, 0, out),
            Operator1D::Detail(k) => {
                self.project_line(line, k, out);
                scratch.clear();
                scratch.resize(line.len(), Complex::default());
                self.project_line(line, k - 1, scratch);
                for (o, s) in out.iter_mut().zip(scratch.iter()) {
                    *o -= s;
                }
            }
        }
    }

    fn coefficients_line(&self, line: &[Complex], kappa: u32) -> Coefficients {
        let empty = Coefficients {
            first_nu: 0,
            values: Vec::new(),
        };
        let dual = &self.levels[kappa as usize].dual;
        let Some((a, b)) = crate::grid::nonzero_span(line) else {
            return empty;
        };
        if dual.samples.is_empty() {
            return empty;
        }
        let box_lo = self.domain.lo();
        let (a, b) = (box_lo + a as i64, box_lo + b as i64);
        let s = 1i64 << kappa;
        let unit = self.domain.cells_per_unit();
        let (gl, gh) = (dual.lo, dual.hi());
        // translate nu covers cells c with gl <= s c - nu unit < gh
        let nu_min = (s * a - gh).div_euclid(unit) + 1;
        let nu_max = (s * (b - 1) - gl).div_euclid(unit);
        if nu_max < nu_min {
            return empty;
        }
        let weight = s as f64 * self.domain.step();
        let values = (nu_min..=nu_max)
            .map(|nu| {
                let shift = nu * unit;
                let c0 = ceil_div(gl + shift, s).max(a);
                let c1 = ceil_div(gh + shift, s).min(b);
                let mut acc = Complex::default();
                for c in c0..c1 {
                    let g = dual.samples[(s * c - shift - gl) as usize];
                    acc += line[(c - box_lo) as usize] * g.conj();
                }
                acc * weight
            })
            .collect();
        Coefficients {
            first_nu: nu_min,
            values,
        }
    }

    fn project_line(&self, line: &[Complex], kappa: u32, out: &mut [Complex]) {
        let coeffs = self.coefficients_line(line, kappa);
        let phi = &self.levels[kappa as usize].phi;
        if phi.samples.is_empty() {
            return;
        }
        let box_lo = self.domain.lo();
        let box_hi = self.domain.hi();
        let s = 1i64 << kappa;
        let unit = self.domain.cells_per_unit();
        for (nu, c) in coeffs.iter() {
            if c == Complex::default() {
                continue;
            }
            let shift = nu * unit;
            let c0 = ceil_div(phi.lo + shift, s).max(box_lo);
            let c1 = ceil_div(phi.hi() + shift, s).min(box_hi);
            for cell in c0..c1 {
                out[(cell - box_lo) as usize] += c * phi.samples[(s * cell - shift - phi.lo) as usize];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{dilate_translate, inner_product};
    use crate::scaling::{daubechies_system, haar_system};

    fn haar_ctx(resolution: u32) -> ProjectorContext {
        let g = Grid1D::from_unit_bounds(resolution, -2, 3).unwrap();
        ProjectorContext::new(haar_system(resolution, g).unwrap(), g).unwrap()
    }

    fn chi(ctx: &ProjectorContext, a: f64, b: f64) -> SampledFunction {
        SampledFunction::indicator(ctx.domain(), a, b)
    }

    #[test]
    fn haar_coefficient_goldens() {
        let ctx = haar_ctx(8);
        let c = ctx.coefficients(&chi(&ctx, 0.0, 1.0), 0).unwrap();
        assert_eq!(c.get(0), Complex::from(1.0));
        assert!(c.iter().all(|(nu, v)| nu == 0 || v == Complex::default()));

        let half = chi(&ctx, 0.0, 0.5);
        assert_eq!(ctx.coefficients(&half, 0).unwrap().get(0), Complex::from(0.5));
        let c1 = ctx.coefficients(&half, 1).unwrap();
        assert_eq!(c1.get(0), Complex::from(1.0));
        assert_eq!(c1.get(1), Complex::default());
    }

    #[test]
    fn haar_projection_goldens() {
        let ctx = haar_ctx(8);
        let unit = chi(&ctx, 0.0, 1.0);
        assert_eq!(ctx.project(&unit, 0).unwrap(), unit);
        let half = chi(&ctx, 0.0, 0.5);
        assert_eq!(ctx.project(&half, 0).unwrap(), unit.scale(Complex::from(0.5)));
        assert_eq!(ctx.project(&half, 1).unwrap(), half);
    }

    #[test]
    fn haar_detail_goldens() {
        let ctx = haar_ctx(8);
        let half = chi(&ctx, 0.0, 0.5);
        assert_eq!(ctx.detail(&half, 0).unwrap(), ctx.project(&half, 0).unwrap());
        let expected = half
            .sub(&chi(&ctx, 0.5, 1.0))
            .unwrap()
            .scale(Complex::from(0.5));
        assert_eq!(ctx.detail(&half, 1).unwrap(), expected);
        let unit = chi(&ctx, 0.0, 1.0);
        assert!(ctx.detail(&unit, 1).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn scale_out_of_range_is_rejected() {
        let ctx = haar_ctx(8);
        let f = chi(&ctx, 0.0, 1.0);
        assert!(matches!(ctx.project(&f, 5), Err(Error::Resolution { kappa: 5, max: 4 })));
        assert!(matches!(ctx.coefficients(&f, 9), Err(Error::Resolution { .. })));
    }

    #[test]
    fn coefficients_match_direct_quadrature() {
        // c_nu = 2^kappa <f, phi_dual(2^kappa . - nu)> evaluated through the
        // grid primitives
        let sys = daubechies_system(2, 8, 8).unwrap();
        let g = Grid1D::from_unit_bounds(8, -4, 6).unwrap();
        let ctx = ProjectorContext::new(sys, g).unwrap();
        let f = SampledFunction::from_fn_1d(g, |x| Complex::from((x * 1.3).sin() * (-x * x).exp()));
        for kappa in [0, 2, 4] {
            let (_, dual) = ctx.system().generators(kappa);
            let dual = dual.embed(Grid1D::from_unit_bounds(8, -16, 16).unwrap()).unwrap();
            let coeffs = ctx.coefficients(&f, kappa).unwrap();
            for nu in -6..=6 {
                let translate = dilate_translate(&dual, kappa, nu, g).unwrap();
                let direct = inner_product(&f, &translate).unwrap() * (1u64 << kappa) as f64;
                assert!((coeffs.get(nu) - direct).norm() < 1e-12, "kappa {kappa} nu {nu}");
            }
        }
    }

    #[test]
    fn input_must_live_on_the_box() {
        let ctx = haar_ctx(8);
        let other = SampledFunction::indicator(Grid1D::from_unit_bounds(8, 0, 1).unwrap(), 0.0, 1.0);
        assert!(matches!(ctx.project(&other, 0), Err(Error::GridMismatch(_))));
    }
}
