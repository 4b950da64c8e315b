//! Link budget, Rician block fading and AWGN.

use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{from_db, to_db, Scalar};

/// Receiver noise power in dBm: density + noise figure + bandwidth.
pub fn noise_power_dbm<T: Scalar>(density_dbm_hz: T, nf_db: T, bw_hz: T) -> Result<T> {
    if !(bw_hz > T::zero()) {
        return Err(Error::invalid(format!("bandwidth must be positive, got {bw_hz}")));
    }
    Ok(density_dbm_hz + nf_db + to_db(bw_hz))
}

/// Average power gain `1 / r^4`.
pub fn path_gain<T: Scalar>(r: T) -> Result<T> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(Error::invalid(format!("distance must be positive, got {r}")));
    }
    Ok(r.powi(4).recip())
}

/// One Rician fading coefficient with unit mean power.
///
/// `h = sqrt(K/(K+1)) e^{j theta} + sqrt(1/(K+1)) w` with linear `K`,
/// `theta ~ U[0, 2 pi)` and `w` circular complex Gaussian of unit variance.
/// `K_db = +inf` gives a pure line-of-sight coefficient, `-inf` Rayleigh.
pub fn rician_sample<T: Scalar, R: Rng + ?Sized>(k_db: T, rng: &mut R) -> Complex<T> {
    let theta = T::TAU() * T::unit_uniform(rng);
    let los = Complex::from_polar(T::one(), theta);
    if k_db == T::infinity() {
        return los;
    }
    let k = from_db(k_db);
    let half = T::lit(0.5).sqrt();
    let w = Complex::new(T::standard_normal(rng) * half, T::standard_normal(rng) * half);
    los * (k / (k + T::one())).sqrt() + w * (T::one() / (k + T::one())).sqrt()
}

/// Add independent `N(0, sigma2)` noise to each real and imaginary part.
pub fn apply_awgn<T: Scalar, R: Rng + ?Sized>(points: &[Complex<T>], sigma2: T, rng: &mut R) -> Result<Vec<Complex<T>>> {
    if !(sigma2 >= T::zero()) {
        return Err(Error::invalid(format!("noise variance must be non-negative, got {sigma2}")));
    }
    let sigma = sigma2.sqrt();
    Ok(points.iter().map(|&p| p + awgn_sample(sigma, rng)).collect())
}

/// One complex noise sample with per-dimension standard deviation `sigma`.
#[inline]
pub fn awgn_sample<T: Scalar, R: Rng + ?Sized>(sigma: T, rng: &mut R) -> Complex<T> {
    if sigma == T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    Complex::new(T::standard_normal(rng) * sigma, T::standard_normal(rng) * sigma)
}

/// Per-dimension noise variance giving average SNR `gamma` for a signal of
/// average energy `es`: `N0 = es / gamma`, `sigma^2 = N0 / 2`.
#[inline]
pub fn noise_variance_for_snr<T: Scalar>(es: T, gamma: T) -> T {
    es / (T::lit(2.0) * gamma)
}

/// One directed link with a realized fading coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget<T> {
    pub p_tx_dbm: T,
    pub distance: T,
    pub k_db: T,
    pub p_noise_dbm: T,
    pub h: Complex<T>,
}

impl<T: Scalar> LinkBudget<T> {
    /// Draws the fading coefficient for this link from `rng`.
    pub fn draw<R: Rng + ?Sized>(p_tx_dbm: T, distance: T, k_db: T, p_noise_dbm: T, rng: &mut R) -> Result<Self> {
        path_gain(distance)?;
        Ok(Self {
            p_tx_dbm,
            distance,
            k_db,
            p_noise_dbm,
            h: rician_sample(k_db, rng),
        })
    }

    /// Linear power gain including path loss and fading.
    pub fn gain(&self) -> T {
        self.h.norm_sqr() / self.distance.powi(4)
    }

    pub fn rx_power_dbm(&self) -> T {
        self.p_tx_dbm + to_db(self.gain())
    }

    pub fn snr_db(&self) -> T {
        self.rx_power_dbm() - self.p_noise_dbm
    }

    pub fn snr(&self) -> T {
        from_db(self.snr_db())
    }
}

/// Independent generator for stream `stream` under a base seed. Streams with
/// different ids never overlap.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_power_values() {
        assert!((noise_power_dbm(-174.0_f64, 6.0, 1e6).unwrap() + 108.0).abs() < 1e-12);
        assert_eq!(noise_power_dbm(-174.0_f64, 0.0, 1.0).unwrap(), -174.0);
        // doubling the bandwidth adds 10 log10 2 = 3.0103 dB
        assert!((noise_power_dbm(-174.0_f64, 6.0, 2e6).unwrap() + 104.98970004336019).abs() < 1e-9);
        assert!(noise_power_dbm(-174.0_f64, 6.0, 0.0).is_err());
    }

    #[test]
    fn path_gain_values() {
        assert_eq!(path_gain(1.0_f64).unwrap(), 1.0);
        assert!((path_gain(10.0_f64).unwrap() - 1e-4).abs() < 1e-18);
        assert!((path_gain(250.0_f64).unwrap() - 2.56e-10).abs() < 1e-22);
        assert!(path_gain(0.0_f64).is_err());
        assert!(path_gain(-3.0_f64).is_err());
    }

    #[test]
    fn pure_los_has_unit_magnitude() {
        let mut rng = substream(1, 0);
        for _ in 0..100 {
            let h: Complex<f64> = rician_sample(f64::INFINITY, &mut rng);
            assert!((h.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_noise_is_identity() {
        let pts = vec![Complex::new(1.0_f64, -2.0), Complex::new(0.5, 0.25)];
        let mut rng = substream(3, 0);
        assert_eq!(apply_awgn(&pts, 0.0, &mut rng).unwrap(), pts);
        assert!(apply_awgn(&pts, -1.0, &mut rng).is_err());
    }

    #[test]
    fn snr_assembly_matches_linear() {
        let mut rng = substream(5, 1);
        let link = LinkBudget::draw(10.0_f64, 180.0, 5.0, -108.0, &mut rng).unwrap();
        // 10 dBm = 10 mW, -108 dBm = 10^-10.8 mW
        let linear = 10.0 * link.h.norm_sqr() * path_gain(180.0).unwrap() / 10f64.powf(-10.8);
        assert!((link.snr() - linear).abs() <= 1e-9 * linear);
    }

    #[test]
    fn substreams_differ_and_repeat() {
        let a: Vec<u64> = (0..4).map(|_| substream(9, 0).random()).collect();
        assert!(a.iter().all(|&x| x == a[0]));
        let mut r0 = substream(9, 0);
        let mut r1 = substream(9, 1);
        assert_ne!(r0.random::<u64>(), r1.random::<u64>());
    }
}
