//! Rademacher functions and the Khintchine inequality on `[0, 1)`.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Largest coefficient list evaluated by enumerating all `2^n` atoms.
pub const EXHAUSTIVE_LIMIT: usize = 12;

const DEFAULT_SAMPLES: usize = 1 << 20;
const DEFAULT_SEED: u64 = 0x5eed;

/// `sign sin(2^{kappa+1} pi t)`, read off the parity of `floor(2^{kappa+1} t)`.
/// Dyadic breakpoints, where the sine vanishes, give 0.
pub fn rademacher(kappa: u32, t: f64) -> i8 {
    // multiplying by a power of two is exact
    let s = t * 2f64.powi(kappa as i32 + 1);
    if !s.is_finite() || s == s.floor() {
        return 0;
    }
    if s.floor().rem_euclid(2.0) == 0.0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KhintchineMode {
    /// Every atom `[m 2^{-n}, (m+1) 2^{-n})` once, at its midpoint.
    Exhaustive,
    /// `samples` uniform points `t` from the seeded generator.
    MonteCarlo { samples: usize, seed: u64 },
}

impl KhintchineMode {
    /// Exhaustive up to [`EXHAUSTIVE_LIMIT`] terms, Monte Carlo beyond.
    pub fn auto(terms: usize) -> Self {
        if terms <= EXHAUSTIVE_LIMIT {
            Self::Exhaustive
        } else {
            Self::MonteCarlo {
                samples: DEFAULT_SAMPLES,
                seed: DEFAULT_SEED,
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KhintchineReport {
    pub p: f64,
    pub terms: usize,
    pub mode: KhintchineMode,
    /// `||sum a_kappa omega_kappa||_{L_p(0,1)}`.
    pub moment: f64,
    /// `(sum |a_kappa|^2)^{1/2}`.
    pub l2: f64,
    pub ratio: f64,
    /// `ratio / B_p`; at most 1 when the inequality holds.
    pub lower_ratio: f64,
    /// `ratio / A_p`; at least 1 when the inequality holds.
    pub upper_ratio: f64,
    pub a_p: f64,
    pub b_p: f64,
}

/// Best constants `(A_p, B_p)` in `A_p |a|_2 <= ||sum a omega||_p <= B_p |a|_2`
/// (Haagerup).
pub fn sharp_khintchine_constants(p: f64) -> (f64, f64) {
    if p == 2.0 {
        // orthonormality; the gamma formula would round
        return (1.0, 1.0);
    }
    let gaussian = std::f64::consts::SQRT_2 * (gamma((p + 1.0) / 2.0) / std::f64::consts::PI.sqrt()).powf(1.0 / p);
    if p >= 2.0 {
        (1.0, gaussian)
    } else {
        (gaussian.min(2f64.powf(0.5 - 1.0 / p)), 1.0)
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("Khintchine moments need 0 < p < inf, got {p}")))
    }
}

fn value_at(a: &[f64], t: f64) -> f64 {
    a.iter()
        .enumerate()
        .fold(0.0, |acc, (k, &c)| acc + c * rademacher(k as u32, t) as f64)
}

/// `||sum a_kappa omega_kappa||_{L_p(0,1)}`.
pub fn khintchine_moment(a: &[f64], p: f64, mode: KhintchineMode) -> Result<f64> {
    check_exponent(p)?;
    if a.is_empty() {
        return Ok(0.0);
    }
    let mean = match mode {
        KhintchineMode::Exhaustive => {
            if a.len() > EXHAUSTIVE_LIMIT {
                return Err(Error::Domain(format!(
                    "exhaustive mode handles at most {EXHAUSTIVE_LIMIT} terms, got {}",
                    a.len()
                )));
            }
            let atoms = 1u64 << a.len();
            let width = 1.0 / atoms as f64;
            let mut sum = 0.0;
            for m in 0..atoms {
                sum += value_at(a, (m as f64 + 0.5) * width).abs().powf(p);
            }
            sum / atoms as f64
        }
        KhintchineMode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::Domain("Monte Carlo mode needs at least one sample".into()));
            }
            let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
            let mut sum = 0.0;
            for _ in 0..samples {
                // 53 random bits, shifted off the breakpoints
                let t = ((rng.next_u64() >> 11) as f64 + 0.5) * 2f64.powi(-53);
                sum += value_at(a, t).abs().powf(p);
            }
            sum / samples as f64
        }
    };
    Ok(mean.powf(1.0 / p))
}

/// Measures `||sum a omega||_p / |a|_2` and normalizes it by the sharp
/// constants. Exhaustive for up to [`EXHAUSTIVE_LIMIT`] terms.
pub fn khintchine_check(a: &[f64], p: f64) -> Result<KhintchineReport> {
    khintchine_check_with(a, p, KhintchineMode::auto(a.len()))
}

pub fn khintchine_check_with(a: &[f64], p: f64, mode: KhintchineMode) -> Result<KhintchineReport> {
    let moment = khintchine_moment(a, p, mode)?;
    let l2 = a.iter().map(|c| c * c).sum::<f64>().sqrt();
    let (a_p, b_p) = sharp_khintchine_constants(p);
    let (ratio, lower_ratio, upper_ratio) = if l2 == 0.0 {
        (0.0, 0.0, 0.0)
    } else {
        let r = moment / l2;
        (r, r / b_p, r / a_p)
    };
    Ok(KhintchineReport {
        p,
        terms: a.len(),
        mode,
        moment,
        l2,
        ratio,
        lower_ratio,
        upper_ratio,
        a_p,
        b_p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rademacher_goldens() {
        assert_eq!(rademacher(0, 0.25), 1);
        assert_eq!(rademacher(1, 0.3), -1);
        assert_eq!(rademacher(0, 0.5), 0);
        assert_eq!(rademacher(2, 0.125), 0);
        assert_eq!(rademacher(0, 0.75), -1);
    }

    #[test]
    fn rademacher_agrees_with_sine_away_from_zeros() {
        for k in 0..6u32 {
            for i in 1..200 {
                let t = i as f64 / 200.0 + 1e-4;
                if t >= 1.0 {
                    continue;
                }
                let s = (2f64.powi(k as i32 + 1) * std::f64::consts::PI * t).sin();
                if s.abs() > 1e-6 {
                    assert_eq!(rademacher(k, t) as f64, s.signum(), "k={k} t={t}");
                }
            }
        }
    }

    #[test]
    fn single_term_and_p2() {
        for p in [1.25, 2.0, 4.0] {
            assert_eq!(khintchine_check(&[1.0], p).unwrap().ratio, 1.0);
        }
        let r = khintchine_check(&[1.0, 1.0], 2.0).unwrap();
        assert!((r.ratio - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn two_terms_fourth_moment() {
        // |w0 + w1| is 2 on half the interval and 0 elsewhere
        let r = khintchine_check(&[1.0, 1.0], 4.0).unwrap();
        assert!((r.moment - 8f64.powf(0.25)).abs() <= 1e-15);
    }

    #[test]
    fn empty_list_is_degenerate() {
        let r = khintchine_check(&[], 3.0).unwrap();
        assert_eq!((r.lower_ratio, r.upper_ratio), (0.0, 0.0));
    }

    #[test]
    fn sharp_constants() {
        let (a, b) = sharp_khintchine_constants(2.0);
        assert!((a - 1.0).abs() < 1e-15 && (b - 1.0).abs() < 1e-12);
        // B_4 = 3^{1/4}
        assert!((sharp_khintchine_constants(4.0).1 - 3f64.powf(0.25)).abs() < 1e-12);
        // A_1 = 1/sqrt 2
        assert!((sharp_khintchine_constants(1.0).0 - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_is_close_to_enumeration() {
        let a = [0.3, -1.0, 0.7, 0.2, 0.5];
        let exact = khintchine_moment(&a, 3.0, KhintchineMode::Exhaustive).unwrap();
        let mc = khintchine_moment(&a, 3.0, KhintchineMode::MonteCarlo { samples: 200_000, seed: 3 }).unwrap();
        assert!((exact - mc).abs() / exact < 1e-2);
        assert!(khintchine_moment(&[1.0; 13], 2.0, KhintchineMode::Exhaustive).is_err());
        assert!(khintchine_moment(&[1.0], 0.0, KhintchineMode::Exhaustive).is_err());
    }
}
