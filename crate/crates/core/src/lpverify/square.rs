use serde::Serialize;

use crate::error::Result;
use crate::grid::{lp_norm, Complex, MultiIndex, SampledFunction};
use crate::tensor::TensorContext;

use super::check_theorem_exponent;

/// Both sides of the norm equivalence for one function and exponent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioRecord {
    pub p: f64,
    pub f_id: String,
    pub norm_f: f64,
    pub norm_sf: f64,
    pub ratio: f64,
    pub kappa_cap: String,
    /// `||f - E_{k_cap} f||_p`: the part of `f` the truncated square
    /// function cannot see.
    pub truncation_error: f64,
}

/// Pointwise `(sum_{kappa <= k_cap} |D_kappa f|^2)^{1/2}`.
pub fn square_function(ctx: &TensorContext, f: &SampledFunction, k_cap: &MultiIndex) -> Result<SampledFunction> {
    let mut acc = vec![0.0f64; f.len()];
    ctx.for_each_detail(f, k_cap, |_, d| {
        for (a, z) in acc.iter_mut().zip(d.samples()) {
            *a += z.norm_sqr();
        }
        Ok(())
    })?;
    SampledFunction::from_samples(f.grid(), acc.into_iter().map(|v| Complex::from(v.sqrt())).collect())
}

pub fn lp_ratio(
    ctx: &TensorContext,
    f: &SampledFunction,
    f_id: &str,
    p: f64,
    k_cap: &MultiIndex,
) -> Result<RatioRecord> {
    Ok(lp_ratios(ctx, f, f_id, &[p], k_cap)?.remove(0))
}

/// One record per exponent, sharing a single square-function evaluation.
pub fn lp_ratios(
    ctx: &TensorContext,
    f: &SampledFunction,
    f_id: &str,
    ps: &[f64],
    k_cap: &MultiIndex,
) -> Result<Vec<RatioRecord>> {
    for &p in ps {
        check_theorem_exponent(p)?;
    }
    let sf = square_function(ctx, f, k_cap)?;
    let residual = f.sub(&ctx.project_nd(f, k_cap)?)?;
    ps.iter()
        .map(|&p| {
            let norm_f = lp_norm(f, p)?;
            let norm_sf = lp_norm(&sf, p)?;
            Ok(RatioRecord {
                p,
                f_id: f_id.to_string(),
                norm_f,
                norm_sf,
                ratio: norm_sf / norm_f,
                kappa_cap: k_cap.to_string(),
                truncation_error: lp_norm(&residual, p)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use crate::scaling::haar_system;
    use crate::Error;

    fn haar(dim: usize) -> TensorContext {
        let g = Grid1D::from_unit_bounds(8, -1, 2).unwrap();
        TensorContext::isotropic(haar_system(8, g).unwrap(), g, dim).unwrap()
    }

    #[test]
    fn scaling_function_is_its_own_square_function() {
        let ctx = haar(1);
        let phi = SampledFunction::indicator(ctx.grid().axis(), 0.0, 1.0);
        let k = MultiIndex::new(vec![3]);
        assert_eq!(square_function(&ctx, &phi, &k).unwrap(), phi);
        for p in [1.25, 2.0, 4.0] {
            assert!((lp_ratio(&ctx, &phi, "phi", p, &k).unwrap().ratio - 1.0).abs() <= 1e-6);
        }
    }

    #[test]
    fn half_box_goldens() {
        let ctx = haar(1);
        let axis = ctx.grid().axis();
        let f = SampledFunction::indicator(axis, 0.0, 0.5);
        let k = MultiIndex::new(vec![2]);
        let sf = square_function(&ctx, &f, &k).unwrap();
        let expected = SampledFunction::indicator(axis, 0.0, 1.0).scale(Complex::from(0.5f64.sqrt()));
        assert!(sf.sup_distance(&expected).unwrap() <= 1e-15);
        assert!((lp_norm(&sf, 2.0).unwrap() - 0.5f64.sqrt()).abs() <= 1e-12);

        let r2 = lp_ratio(&ctx, &f, "half", 2.0, &k).unwrap();
        assert!((r2.ratio - 1.0).abs() <= 1e-6);
        let r4 = lp_ratio(&ctx, &f, "half", 4.0, &k).unwrap();
        assert!((r4.ratio - 2f64.powf(-0.25)).abs() <= 1e-4);
        assert_eq!(r4.truncation_error, 0.0);
    }

    #[test]
    fn product_parseval_in_two_dimensions() {
        let ctx = haar(2);
        let axis = ctx.grid().axis();
        let h = SampledFunction::indicator(axis, 0.0, 0.5);
        let f = SampledFunction::tensor_product(&[&h, &h]).unwrap();
        let r = lp_ratio(&ctx, &f, "prod", 2.0, &MultiIndex::new(vec![2, 2])).unwrap();
        assert!((r.ratio - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn exponent_outside_open_range_is_rejected() {
        let ctx = haar(1);
        let f = SampledFunction::indicator(ctx.grid().axis(), 0.0, 1.0);
        let k = MultiIndex::new(vec![1]);
        for p in [1.0, 0.5, f64::INFINITY] {
            assert!(matches!(lp_ratio(&ctx, &f, "x", p, &k), Err(Error::OutOfTheoremRange(_))));
        }
    }
}
