use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{lp_norm, MultiIndex, SampledFunction};
use crate::tensor::{SignPattern, TensorContext};

use super::sign_sum;

/// One level of the distribution function of `T f = sum sigma_kappa D_kappa f`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakPoint {
    pub alpha: f64,
    /// `mes{|T f| > alpha}`, counted in whole cells.
    pub measure: f64,
    /// `alpha * measure / ||f||_1`.
    pub product: f64,
}

/// Distribution of the one-dimensional sign sum at each level `alpha`. The
/// largest product is the empirical weak-(1,1) constant.
pub fn weak11_check(
    ctx: &TensorContext,
    f: &SampledFunction,
    signs: &SignPattern,
    k_cap: u32,
    alphas: &[f64],
) -> Result<Vec<WeakPoint>> {
    if ctx.dim() != 1 {
        return Err(Error::Structural(format!(
            "weak-type check is one-dimensional, context has d = {}",
            ctx.dim()
        )));
    }
    let l1 = lp_norm(f, 1.0)?;
    if l1 <= 0.0 {
        return Err(Error::Domain("f must have positive L1 norm".into()));
    }
    if let Some(a) = alphas.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
        return Err(Error::Domain(format!("levels must be positive and finite, got {a}")));
    }
    let tf = sign_sum(ctx, f, signs, &MultiIndex::new(vec![k_cap]))?;
    let h = f.grid().cell_volume();
    let mut mags: Vec<f64> = tf.samples().iter().map(|z| z.norm()).collect();
    mags.sort_by(f64::total_cmp);
    Ok(alphas
        .iter()
        .map(|&alpha| {
            let above = mags.len() - mags.partition_point(|&m| m <= alpha);
            let measure = above as f64 * h;
            WeakPoint {
                alpha,
                measure,
                product: alpha * measure / l1,
            }
        })
        .collect())
}

/// The level where `alpha mes{|T f| > alpha} / ||f||_1` peaks. The supremum
/// is approached just below an attained value of `|T f|`, so every distinct
/// magnitude `v` is probed at `v (1 - 1e-12)`.
pub fn weak11_sup(ctx: &TensorContext, f: &SampledFunction, signs: &SignPattern, k_cap: u32) -> Result<WeakPoint> {
    let tf = sign_sum(ctx, f, signs, &MultiIndex::new(vec![k_cap]))?;
    let mut levels: Vec<f64> = tf.samples().iter().map(|z| z.norm()).filter(|v| *v > 0.0).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    if levels.is_empty() {
        return Err(Error::Domain("the sign sum vanishes identically".into()));
    }
    let levels: Vec<f64> = levels.iter().map(|v| v * (1.0 - 1e-12)).collect();
    let points = weak11_check(ctx, f, signs, k_cap, &levels)?;
    Ok(points
        .into_iter()
        .reduce(|best, w| if w.product > best.product { w } else { best })
        .expect("levels are nonempty"))
}

/// `sup_alpha alpha mes{|T f| > alpha} / ||f||_1` over the supplied points.
pub fn weak11_constant(points: &[WeakPoint]) -> f64 {
    points.iter().map(|w| w.product).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use crate::scaling::haar_system;

    fn ctx() -> TensorContext {
        let g = Grid1D::from_unit_bounds(10, -1, 2).unwrap();
        TensorContext::isotropic(haar_system(10, g).unwrap(), g, 1).unwrap()
    }

    #[test]
    fn unit_box_with_plus_signs() {
        let ctx = ctx();
        let f = SampledFunction::indicator(ctx.grid().axis(), 0.0, 1.0);
        let k = MultiIndex::new(vec![3]);
        let pts = weak11_check(&ctx, &f, &SignPattern::all_ones(&k), 3, &[0.25, 0.5, 0.999, 1.0, 4.0]).unwrap();
        let products: Vec<f64> = pts.iter().map(|w| w.product).collect();
        assert_eq!(products, vec![0.25, 0.5, 0.999, 0.0, 0.0]);
    }

    #[test]
    fn spike_products_are_bounded() {
        let ctx = ctx();
        let m = 6;
        let w = 2f64.powi(-m);
        let f = SampledFunction::indicator(ctx.grid().axis(), 0.0, w).scale((1.0 / w).into());
        let pattern = SignPattern::new(vec![vec![1, -1, 1, 1, -1, -1, 1]]).unwrap();
        let alphas: Vec<f64> = (-4..=8).map(|e| 2f64.powi(e)).collect();
        let pts = weak11_check(&ctx, &f, &pattern, 6, &alphas).unwrap();
        let c = weak11_constant(&pts);
        assert!(c.is_finite() && c > 0.0 && c < 10.0, "{c}");
        assert_eq!(pts.last().unwrap().product, 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        let ctx = ctx();
        let k = MultiIndex::new(vec![1]);
        let zero = SampledFunction::zeros(ctx.grid());
        assert!(weak11_check(&ctx, &zero, &SignPattern::all_ones(&k), 1, &[1.0]).is_err());
        let f = SampledFunction::indicator(ctx.grid().axis(), 0.0, 1.0);
        assert!(weak11_check(&ctx, &f, &SignPattern::all_ones(&k), 1, &[-1.0]).is_err());
    }

    #[test]
    fn sup_of_a_unit_box_is_one() {
        // T f = f for all-plus signs, so alpha mes{f > alpha} peaks at 1-
        let ctx = ctx();
        let f = SampledFunction::indicator(ctx.grid().axis(), 0.0, 1.0);
        let k = MultiIndex::new(vec![3]);
        let w = weak11_sup(&ctx, &f, &SignPattern::all_ones(&k), 3).unwrap();
        assert!((w.product - 1.0).abs() <= 1e-11);
        assert_eq!(w.measure, 1.0);
    }
}
