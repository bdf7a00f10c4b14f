use lpmra::czd::{cz_decompose, verify_cz};
use lpmra::lpverify::{khintchine_moment, sign_sum, KhintchineMode};
use lpmra::{
    inner_product, lp_norm, Complex, Grid1D, MultiIndex, ProjectorContext, SampledFunction, ScalingSpec, SignPattern,
    TensorContext,
};
use proptest::prelude::*;

const J: u32 = 7;

fn haar_unit() -> ProjectorContext {
    let domain = Grid1D::from_unit_bounds(J, 0, 1).unwrap();
    ProjectorContext::new(ScalingSpec::Haar.build(J, domain).unwrap(), domain).unwrap()
}

fn db2_line() -> ProjectorContext {
    let domain = Grid1D::from_unit_bounds(J, -3, 4).unwrap();
    ProjectorContext::new(ScalingSpec::Daubechies(2).build(J, domain).unwrap(), domain).unwrap()
}

fn samples_on(ctx: &ProjectorContext, values: &[f64]) -> SampledFunction {
    // `values` are placed on the unit interval, zero elsewhere
    let domain = ctx.domain();
    let start = domain.index_of_cell(0).unwrap();
    let mut all = vec![0.0; domain.len()];
    all[start..start + values.len()].copy_from_slice(values);
    SampledFunction::from_real(lpmra::GridND::line(domain), all).unwrap()
}

fn unit_values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-4.0f64..4.0, 1usize << J)
}

fn close(a: &SampledFunction, b: &SampledFunction, tol: f64) -> bool {
    a.sup_distance(b).unwrap() <= tol * (1.0 + a.max_abs().max(b.max_abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn haar_projection_is_the_dyadic_average(values in unit_values(), kappa in 0u32..=3) {
        let ctx = haar_unit();
        let e = ctx.project(&samples_on(&ctx, &values), kappa).unwrap();
        let width = 1usize << (J - kappa);
        for (block, chunk) in values.chunks(width).enumerate() {
            let mean = chunk.iter().sum::<f64>() / width as f64;
            for i in 0..width {
                prop_assert!((e.samples()[block * width + i].re - mean).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn projections_are_nested_idempotent_and_self_adjoint(
        values in unit_values(),
        other in unit_values(),
        j in 0u32..=3,
        k in 0u32..=3,
    ) {
        for ctx in [haar_unit(), db2_line()] {
            let f = samples_on(&ctx, &values);
            let g = samples_on(&ctx, &other);
            let ej = ctx.project(&f, j).unwrap();
            prop_assert!(close(&ctx.project(&ej, j).unwrap(), &ej, 1e-10));
            let jk = ctx.project(&ctx.project(&f, k).unwrap(), j).unwrap();
            prop_assert!(close(&jk, &ctx.project(&f, j.min(k)).unwrap(), 1e-10));
            let lhs = inner_product(&ej, &g).unwrap();
            let rhs = inner_product(&f, &ctx.project(&g, j).unwrap()).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()));
        }
    }

    #[test]
    fn details_telescope_and_are_orthogonal(values in unit_values(), cap in 1u32..=3) {
        for ctx in [haar_unit(), db2_line()] {
            let f = samples_on(&ctx, &values);
            let mut sum = ctx.project(&f, 0).unwrap();
            let mut details = Vec::new();
            for k in 1..=cap {
                let d = ctx.detail(&f, k).unwrap();
                sum.add_assign(&d).unwrap();
                details.push(d);
            }
            prop_assert!(close(&sum, &ctx.project(&f, cap).unwrap(), 1e-10));
            let e0 = ctx.project(&f, 0).unwrap();
            for (a, da) in details.iter().enumerate() {
                prop_assert!(inner_product(da, &e0).unwrap().norm() <= 1e-9);
                for db in &details[a + 1..] {
                    prop_assert!(inner_product(da, db).unwrap().norm() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn tensor_projection_factors_over_axes(
        a in prop::collection::vec(-2.0f64..2.0, 64),
        b in prop::collection::vec(-2.0f64..2.0, 64),
        k0 in 0u32..=2,
        k1 in 0u32..=2,
    ) {
        let domain = Grid1D::from_unit_bounds(6, 0, 1).unwrap();
        let line = |v: &[f64]| SampledFunction::from_real(lpmra::GridND::line(domain), v.to_vec()).unwrap();
        let (fa, fb) = (line(&a), line(&b));
        let tc = TensorContext::isotropic(ScalingSpec::Haar.build(6, domain).unwrap(), domain, 2).unwrap();
        let one = tc.axis(0).unwrap();
        let product = SampledFunction::tensor_product(&[&fa, &fb]).unwrap();
        let got = tc.project_nd(&product, &MultiIndex::new(vec![k0, k1])).unwrap();
        let want = SampledFunction::tensor_product(&[&one.project(&fa, k0).unwrap(), &one.project(&fb, k1).unwrap()]).unwrap();
        prop_assert!(close(&got, &want, 1e-12));
    }

    #[test]
    fn signs_leave_the_l2_norm_unchanged(
        values in unit_values(),
        signs0 in prop::collection::vec(prop::bool::ANY, 4),
        signs1 in prop::collection::vec(prop::bool::ANY, 4),
    ) {
        let domain = Grid1D::from_unit_bounds(J, 0, 1).unwrap();
        let tc = TensorContext::isotropic(ScalingSpec::Haar.build(J, domain).unwrap(), domain, 2).unwrap();
        let line = SampledFunction::from_real(lpmra::GridND::line(domain), values.clone()).unwrap();
        let mut rev = values;
        rev.reverse();
        let other = SampledFunction::from_real(lpmra::GridND::line(domain), rev).unwrap();
        let f = SampledFunction::tensor_product(&[&line, &other]).unwrap();
        let cap = MultiIndex::splat(3, 2);
        let to_signs = |v: &[bool]| v.iter().map(|&s| if s { 1 } else { -1 }).collect::<Vec<i8>>();
        let pattern = SignPattern::new(vec![to_signs(&signs0), to_signs(&signs1)]).unwrap();
        let plain = lp_norm(&sign_sum(&tc, &f, &SignPattern::all_ones(&cap), &cap).unwrap(), 2.0).unwrap();
        let signed = lp_norm(&sign_sum(&tc, &f, &pattern, &cap).unwrap(), 2.0).unwrap();
        prop_assert!((plain - signed).abs() <= 1e-10 * (1.0 + plain));
    }

    #[test]
    fn cz_decomposition_holds_for_random_steps(
        steps in prop::collection::vec(0.0f64..8.0, 1..=16),
        signs in prop::collection::vec(prop::bool::ANY, 16),
        alpha in 0.05f64..6.0,
    ) {
        let axis = Grid1D::from_unit_bounds(8, 0, 4).unwrap();
        let n = steps.len() as f64;
        let f = SampledFunction::from_fn_1d(axis, |x| {
            if !(0.0..1.0).contains(&x) {
                return Complex::new(0.0, 0.0);
            }
            let i = (x * n) as usize;
            let v = if signs[i] { steps[i] } else { -steps[i] };
            Complex::new(v, 0.0)
        });
        let dec = cz_decompose(&f, alpha).unwrap();
        let report = verify_cz(&dec, &f).unwrap();
        prop_assert!(report.all_passed(), "{:?}", report.checks);
        let total = dec.reassemble().unwrap();
        let f_hull = f.embed(total.axis()).unwrap();
        prop_assert!(total.sup_distance(&f_hull).unwrap() <= 1e-12 * (1.0 + f.max_abs()));
    }

    #[test]
    fn khintchine_moments_match_closed_forms(a in prop::collection::vec(-3.0f64..3.0, 1..=10)) {
        // E|sum a_k e_k|^2 = sum a_k^2 and E|sum a_k e_k|^4 = 3 (sum a_k^2)^2 - 2 sum a_k^4
        let s2: f64 = a.iter().map(|x| x * x).sum();
        let s4: f64 = a.iter().map(|x| x.powi(4)).sum();
        let m2 = khintchine_moment(&a, 2.0, KhintchineMode::Exhaustive).unwrap();
        let m4 = khintchine_moment(&a, 4.0, KhintchineMode::Exhaustive).unwrap();
        prop_assert!((m2 - s2.sqrt()).abs() <= 1e-12 * (1.0 + s2.sqrt()));
        let want4 = (3.0 * s2 * s2 - 2.0 * s4).powf(0.25);
        prop_assert!((m4 - want4).abs() <= 1e-12 * (1.0 + want4));
    }
}
