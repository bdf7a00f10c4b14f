//! Experiments on the square function and randomized sign sums.
//!
//! Constants in the norm equivalences are existential; these routines
//! measure them. The only exact value is the ratio 1 at `p = 2` for
//! orthonormal systems.

mod khintchine;
mod signs;
mod square;
mod weak;

pub use khintchine::{
    khintchine_check, khintchine_check_with, khintchine_moment, rademacher, sharp_khintchine_constants, KhintchineMode,
    KhintchineReport, EXHAUSTIVE_LIMIT,
};
pub use signs::{
    sign_sum, sign_sweep, sign_sweep_many, tensor_pattern, DetailBank, SignMode, SignTrialRecord, SweepReport,
};
pub use square::{lp_ratio, lp_ratios, square_function, RatioRecord};
pub use weak::{weak11_check, weak11_constant, weak11_sup, WeakPoint};

pub(crate) fn check_theorem_exponent(p: f64) -> crate::Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(crate::Error::OutOfTheoremRange(p))
    }
}
