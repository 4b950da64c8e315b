//! Closed-form symbol and bit error rates for point-to-point links, the
//! relay's superposed signal and the interfered opportunistic listeners.
//!
//! SNRs are linear average SNRs per received symbol. For square M-QAM the
//! distance form and SNR form are linked by `2 d^2 / N0 = 3 gamma / (M - 1)`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Gaussian tail probability `Q(x) = erfc(x / sqrt 2) / 2`.
#[inline]
pub fn q_func<T: Scalar>(x: T) -> T {
    T::lit(0.5) * (x * T::FRAC_1_SQRT_2()).erfc()
}

#[inline]
fn clamp_prob<T: Scalar>(p: T) -> T {
    p.max(T::zero()).min(T::one())
}

fn check_non_negative<T: Scalar>(name: &str, v: T) -> Result<()> {
    if v >= T::zero() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be non-negative, got {v}")))
    }
}

/// `sqrt(M)` for the supported square QAM orders.
pub fn square_side(m: usize) -> Result<usize> {
    match m {
        4 => Ok(2),
        16 => Ok(4),
        64 => Ok(8),
        256 => Ok(16),
        _ => Err(Error::UnsupportedModulation {
            name: format!("qam{m}"),
            supported: "square QAM 4, 16, 64, 256",
        }),
    }
}

/// Nearest-neighbour union bound `4 Q(sqrt(2 d^2 / N0))`, clamped to 1.
pub fn ser_upper<T: Scalar>(d2_over_n0: T) -> Result<T> {
    check_non_negative("d^2/N0", d2_over_n0)?;
    Ok(clamp_prob(T::lit(4.0) * q_func((T::lit(2.0) * d2_over_n0).sqrt())))
}

/// `1 - (1 - p)^2` with `p = prefactor * Q(q_arg)`, written as `p (2 - p)`
/// so tiny `p` does not cancel against 1.
fn square_form<T: Scalar>(prefactor: T, q_arg: T) -> T {
    let p = prefactor * q_func(q_arg);
    clamp_prob(p * (T::lit(2.0) - p))
}

/// Exact square M-QAM SER from the average SNR.
pub fn ser_square_exact<T: Scalar>(m: usize, gamma: T) -> Result<T> {
    check_non_negative("SNR", gamma)?;
    let side = square_side(m)?;
    let arg = (T::lit(3.0) * gamma / T::count(m - 1)).sqrt();
    Ok(square_form(T::count(2 * (side - 1)) / T::count(side), arg))
}

/// Exact square M-QAM SER in distance form (argument `d^2 / N0`).
pub fn ser_square_exact_distance<T: Scalar>(m: usize, d2_over_n0: T) -> Result<T> {
    check_non_negative("d^2/N0", d2_over_n0)?;
    let side = square_side(m)?;
    let arg = (T::lit(2.0) * d2_over_n0).sqrt();
    Ok(square_form(T::count(2 * (side - 1)) / T::count(side), arg))
}

/// SER of the relay's superposed square M-QAM signal, obtained by treating
/// it as a `(2L - 1)`-per-axis grid and ignoring coded-symbol repetition.
pub fn ser_superposed<T: Scalar>(m: usize, gamma: T) -> Result<T> {
    check_non_negative("SNR", gamma)?;
    let side = square_side(m)?;
    let arg = (T::lit(3.0) * gamma / T::count(m - 1)).sqrt();
    Ok(square_form(T::count(4 * (side - 1)) / T::count(2 * side - 1), arg))
}

fn pam_arg<T: Scalar>(m: usize, gamma: T) -> T {
    (T::lit(6.0) * gamma / T::count(m * m - 1)).sqrt()
}

fn check_pam(m: usize) -> Result<()> {
    if matches!(m, 2 | 4 | 8 | 16) {
        Ok(())
    } else {
        Err(Error::UnsupportedModulation {
            name: format!("pam{m}"),
            supported: "PAM 2, 4, 8, 16",
        })
    }
}

/// Exact M-PAM SER; for M = 2 this is the BPSK `Q(sqrt(2 gamma))`.
pub fn ser_pam_exact<T: Scalar>(m: usize, gamma: T) -> Result<T> {
    check_non_negative("SNR", gamma)?;
    check_pam(m)?;
    Ok(clamp_prob(
        T::count(2 * (m - 1)) / T::count(m) * q_func(pam_arg(m, gamma)),
    ))
}

/// M-PAM analogue of [`ser_superposed`]: `2M - 1` levels at the same spacing.
pub fn ser_pam_superposed<T: Scalar>(m: usize, gamma: T) -> Result<T> {
    check_non_negative("SNR", gamma)?;
    check_pam(m)?;
    Ok(clamp_prob(
        T::count(4 * (m - 1)) / T::count(2 * m - 1) * q_func(pam_arg(m, gamma)),
    ))
}

/// M-PAM analogue of `g(1)`: worst-case in-phase interference shrinks the
/// half-distance by `(M - 1) d'`.
pub fn ser_pam_listener_upper<T: Scalar>(m: usize, gamma: T, gamma_i: T) -> Result<T> {
    check_non_negative("SNR", gamma)?;
    check_non_negative("interference SNR", gamma_i)?;
    check_pam(m)?;
    let arg = (pam_arg(m, gamma) - T::count(m - 1) * pam_arg(m, gamma_i)).max(T::zero());
    Ok(clamp_prob(T::count(2 * (m - 1)) / T::count(m) * q_func(arg)))
}

/// `(p_s / log2 M, p_s)`.
pub fn ber_bounds<T: Scalar>(ps: T, m: usize) -> Result<(T, T)> {
    if !(ps >= T::zero() && ps <= T::one()) {
        return Err(Error::invalid(format!("probability {ps} outside [0, 1]")));
    }
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::invalid(format!("modulation order {m} is not a power of two >= 2")));
    }
    Ok((ps / T::count(m.trailing_zeros() as usize), ps))
}

/// Union-style bound for an interfered listener, in distance form:
/// `4 Q(max{0, a - (L - 1) b})` with `a = sqrt(2 d^2/N0)` and
/// `b = sqrt(2 d'^2/N0)`, clamped to 1.
pub fn ser_opp_upper_distance<T: Scalar>(a: T, b: T, side: usize) -> Result<T> {
    check_non_negative("sqrt(2 d^2/N0)", a)?;
    check_non_negative("sqrt(2 d'^2/N0)", b)?;
    if side < 2 {
        return Err(Error::invalid(format!("points per axis must be >= 2, got {side}")));
    }
    let arg = (a - T::count(side - 1) * b).max(T::zero());
    Ok(clamp_prob(T::lit(4.0) * q_func(arg)))
}

/// Intended and interfering average SNRs at a square M-QAM receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrPair<T> {
    pub gamma: T,
    pub gamma_i: T,
    pub order: usize,
}

impl<T: Scalar> SnrPair<T> {
    pub fn new(order: usize, gamma: T, gamma_i: T) -> Result<Self> {
        check_non_negative("SNR", gamma)?;
        check_non_negative("interference SNR", gamma_i)?;
        square_side(order)?;
        Ok(Self { gamma, gamma_i, order })
    }

    /// Effective Q argument with the interference term weighted by `alpha`.
    pub fn f_alpha(&self, alpha: T) -> Result<T> {
        if !(alpha >= T::zero() && alpha <= T::one()) {
            return Err(Error::invalid(format!("alpha {alpha} outside [0, 1]")));
        }
        let side = square_side(self.order)?;
        let m1 = T::count(self.order - 1);
        let s = (T::lit(3.0) * self.gamma / m1).sqrt();
        let si = (T::lit(3.0) * self.gamma_i / m1).sqrt();
        Ok((s - alpha * T::count(side - 1) * si).max(T::zero()))
    }
}

/// `g(alpha)`: `alpha = 0` is the interference-free lower bound, `1` the
/// worst-case upper bound and `1/2` the average-interference approximation.
pub fn g_alpha<T: Scalar>(snr: &SnrPair<T>, alpha: T) -> Result<T> {
    let side = square_side(snr.order)?;
    let f = snr.f_alpha(alpha)?;
    Ok(square_form(T::count(2 * (side - 1)) / T::count(side), f))
}

/// BER approximation `g(1/2) / log2 M` for an interfered listener.
pub fn ber_opp_approx<T: Scalar>(snr: &SnrPair<T>) -> Result<T> {
    Ok(g_alpha(snr, T::lit(0.5))? / T::count(snr.order.trailing_zeros() as usize))
}

/// SNR at which the interference-free BER lower bound `g(0) / log2 M`
/// equals `target`.
pub fn solve_snr_for_ber_lower_bound<T: Scalar>(m: usize, target: T) -> Result<T> {
    let bits = T::count(m.trailing_zeros() as usize);
    let lower_bound = |gamma: T| -> Result<T> { Ok(ser_square_exact(m, gamma)? / bits) };
    let ceiling = lower_bound(T::zero())?;
    let out_of_range = || Error::TargetOutOfRange {
        target: target.as_f64(),
        low: 0.0,
        high: ceiling.as_f64(),
    };
    if !(target > T::zero()) || !target.is_finite() {
        return Err(out_of_range());
    }
    if (target - ceiling).abs() <= T::epsilon() * ceiling {
        return Ok(T::zero());
    }
    if target > ceiling {
        return Err(out_of_range());
    }

    let mut lo = T::zero();
    let mut hi = T::one();
    while lower_bound(hi)? > target {
        lo = hi;
        hi = hi * T::lit(2.0);
        if !hi.is_finite() {
            return Err(out_of_range());
        }
    }
    // The lower bound is strictly decreasing in gamma; bisect until the
    // bracket stops shrinking.
    for _ in 0..4096 {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if lower_bound(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = (lower_bound(lo)? - target).abs();
    let b = (lower_bound(hi)? - target).abs();
    Ok(if a < b { lo } else { hi })
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from a 50-digit mpmath evaluation of erfc.
    const Q3: f64 = 1.3498980316300945e-3;
    const Q_SQRT20: f64 = 3.8721082155220418e-6;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn q_values() {
        assert_eq!(q_func(0.0_f64), 0.5);
        assert!(close(q_func(3.0_f64), Q3, 1e-13));
        assert!((q_func(3.0_f64) - 1.3499e-3).abs() < 1e-7);
        for &x in &[0.3_f64, 1.7, 4.2] {
            assert!(close(q_func(-x), 1.0 - q_func(x), 1e-14));
        }
    }

    #[test]
    fn union_bound() {
        assert!(close(ser_upper(4.5_f64).unwrap(), 4.0 * Q3, 1e-12));
        assert_eq!(ser_upper(0.0_f64).unwrap(), 1.0);
        assert!(ser_upper(-1.0_f64).is_err());
    }

    #[test]
    fn square_exact_values() {
        let want = 1.0 - (1.0 - Q3).powi(2);
        assert!(close(ser_square_exact(4, 9.0_f64).unwrap(), want, 1e-12));
        assert!((want - 2.698e-3).abs() < 1e-6);
        let want16 = 1.0 - (1.0 - 1.5 * Q_SQRT20).powi(2);
        assert!(close(ser_square_exact(16, 100.0_f64).unwrap(), want16, 1e-10));
        assert!((want16 - 1.16e-5).abs() < 1e-7);
        assert!(close(ser_square_exact(16, 0.0_f64).unwrap(), 1.0 - 0.25_f64.powi(2), 1e-15));
        assert!(ser_square_exact(32, 1.0_f64).is_err());
        // distance and SNR forms agree through 2 d^2/N0 = 3 gamma / (M - 1)
        let g = 37.0_f64;
        assert!(close(
            ser_square_exact_distance(64, 1.5 * g / 63.0).unwrap(),
            ser_square_exact(64, g).unwrap(),
            1e-14
        ));
    }

    #[test]
    fn superposed_values() {
        let want = 1.0 - (1.0 - 12.0 / 7.0 * Q_SQRT20).powi(2);
        assert!(close(ser_superposed(16, 100.0_f64).unwrap(), want, 1e-10));
        assert!((want - 1.33e-5).abs() < 1e-7);
        assert!(ser_superposed(16, 1e12_f64).unwrap() < 1e-300);
    }

    #[test]
    fn tiny_error_rates_keep_precision() {
        // 2 * 1.5 * Q(8) with Q(8) = 6.220960574271784e-16 (mpmath)
        let want = 3.0 * 6.220960574271784e-16;
        assert!(close(ser_square_exact(16, 320.0_f64).unwrap(), want, 1e-12));
        assert!(ser_square_exact(256, 5754.97_f64).unwrap() <= ser_upper(1.5 * 5754.97_f64 / 255.0).unwrap());
    }

    #[test]
    fn ber_bound_values() {
        assert_eq!(ber_bounds(4e-3_f64, 16).unwrap(), (1e-3, 4e-3));
        assert_eq!(ber_bounds(0.0_f64, 64).unwrap(), (0.0, 0.0));
        assert_eq!(ber_bounds(1.0_f64, 4).unwrap(), (0.5, 1.0));
        assert!(ber_bounds(1.5_f64, 4).is_err());
    }

    #[test]
    fn opp_distance_bound() {
        assert_eq!(ser_opp_upper_distance(2.0_f64, 0.0, 4).unwrap(), ser_upper(2.0_f64).unwrap());
        assert_eq!(ser_opp_upper_distance(2.0_f64, 1.0, 4).unwrap(), 1.0);
        assert!(close(ser_opp_upper_distance(4.0_f64, 1.0, 2).unwrap(), 4.0 * Q3, 1e-12));
    }

    #[test]
    fn g_alpha_values() {
        let p = SnrPair::new(16, 50.0_f64, 0.0).unwrap();
        assert_eq!(g_alpha(&p, 0.0).unwrap(), ser_square_exact(16, 50.0).unwrap());
        let sat = SnrPair::new(16, 10.0_f64, 10.0).unwrap();
        assert_eq!(sat.f_alpha(0.5).unwrap(), 0.0);
        assert!(close(g_alpha(&sat, 1.0).unwrap(), 0.9375, 1e-15));
        assert!(close(ber_opp_approx(&sat).unwrap(), 0.234375, 1e-15));
        assert!(g_alpha(&p, 1.5).is_err());
        assert!(SnrPair::new(32, 1.0_f64, 1.0).is_err());
    }

    #[test]
    fn solve_round_trip() {
        let target = ser_square_exact(4, 20.0_f64).unwrap() / 2.0;
        let g = solve_snr_for_ber_lower_bound(4, target).unwrap();
        assert!(close(g, 20.0, 1e-6));
        let g = solve_snr_for_ber_lower_bound(16, 1e-3_f64).unwrap();
        assert!(close(ser_square_exact(16, g).unwrap() / 4.0, 1e-3, 1e-9));
        assert_eq!(solve_snr_for_ber_lower_bound(16, 0.9375_f64 / 4.0).unwrap(), 0.0);
        assert!(solve_snr_for_ber_lower_bound(16, 0.3_f64).is_err());
        assert!(solve_snr_for_ber_lower_bound(16, 0.0_f64).is_err());
    }

    #[test]
    fn pam_forms() {
        assert!(close(ser_pam_exact(2, 4.5_f64).unwrap(), Q3, 1e-12));
        assert!(close(ser_pam_superposed(2, 4.5_f64).unwrap(), 4.0 / 3.0 * Q3, 1e-12));
        assert_eq!(
            ser_pam_listener_upper(2, 4.5_f64, 0.0).unwrap(),
            ser_pam_exact(2, 4.5_f64).unwrap()
        );
        assert!(ser_pam_exact(3, 1.0_f64).is_err());
    }
}
