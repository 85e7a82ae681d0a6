use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::is_power_of_two;

/// Uniform energy grid on `[0, omega_max]` shared by every channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyGrid {
    omega_max: f64,
    n_omega: usize,
    channel_count: usize,
}

impl EnergyGrid {
    pub fn new(omega_max: f64, n_omega: usize, channel_count: usize) -> Result<Self> {
        if !(omega_max.is_finite() && omega_max > 0.0) {
            return Err(Error::Domain(format!("omega_max must be positive, got {omega_max}")));
        }
        if !is_power_of_two(n_omega) || n_omega < 16 {
            return Err(Error::Domain(format!(
                "n_omega must be a power of two >= 16, got {n_omega}"
            )));
        }
        if channel_count == 0 {
            return Err(Error::Domain("channel_count must be positive".into()));
        }
        Ok(EnergyGrid {
            omega_max,
            n_omega,
            channel_count,
        })
    }

    pub fn single_channel(omega_max: f64, n_omega: usize) -> Result<Self> {
        Self::new(omega_max, n_omega, 1)
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    pub fn len(&self) -> usize {
        self.n_omega
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn channel_count(&self) -> usize {
        self.channel_count
    }

    pub fn spacing(&self) -> f64 {
        self.omega_max / (self.n_omega - 1) as f64
    }

    pub fn omega(&self, i: usize) -> f64 {
        if i + 1 == self.n_omega {
            self.omega_max
        } else {
            i as f64 * self.spacing()
        }
    }

    pub fn omegas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_omega).map(|i| self.omega(i))
    }

    /// First index of the outer 10% of the grid, where packets must have
    /// decayed.
    pub fn tail_start(&self) -> usize {
        ((0.9 * (self.n_omega - 1) as f64).ceil() as usize).min(self.n_omega - 1)
    }
}

/// Sampling of the Riesz coordinates `(nu, sigma)` and the channel pairs.
///
/// The nu-grid is `nu_j = (j - N/2) * dnu`, `dnu = 2 nu_max / N`, so it
/// contains 0 and is symmetric apart from the single endpoint `-nu_max`,
/// which is its own mirror image under periodic wrap. Its Fourier dual is
/// the age grid `a_k = (k - N/2) * da` with `da = 2 pi / (N dnu)`.
///
/// Sigma is a passive slice label on a uniform grid `[sigma_min, sigma_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuSigmaGrid {
    nu_max: f64,
    n_nu: usize,
    sigma_min: f64,
    sigma_max: f64,
    n_sigma: usize,
    channel_count: usize,
}

impl NuSigmaGrid {
    pub fn new(
        nu_max: f64,
        n_nu: usize,
        sigma_min: f64,
        sigma_max: f64,
        n_sigma: usize,
        channel_count: usize,
    ) -> Result<Self> {
        if !(nu_max.is_finite() && nu_max > 0.0) {
            return Err(Error::Domain(format!("nu_max must be positive, got {nu_max}")));
        }
        if !is_power_of_two(n_nu) || n_nu < 16 {
            return Err(Error::Domain(format!("n_nu must be a power of two >= 16, got {n_nu}")));
        }
        if !(sigma_min.is_finite() && sigma_max.is_finite()) || sigma_min < 0.0 || sigma_max < sigma_min {
            return Err(Error::Domain(format!(
                "sigma range [{sigma_min}, {sigma_max}] must satisfy 0 <= min <= max"
            )));
        }
        if n_sigma == 0 || (n_sigma == 1 && sigma_min != sigma_max) || (n_sigma > 1 && sigma_min == sigma_max) {
            return Err(Error::Domain(format!(
                "n_sigma = {n_sigma} is inconsistent with sigma range [{sigma_min}, {sigma_max}]"
            )));
        }
        if channel_count == 0 {
            return Err(Error::Domain("channel_count must be positive".into()));
        }
        Ok(NuSigmaGrid {
            nu_max,
            n_nu,
            sigma_min,
            sigma_max,
            n_sigma,
            channel_count,
        })
    }

    /// One sigma slice, one channel.
    pub fn single_slice(nu_max: f64, n_nu: usize, sigma: f64) -> Result<Self> {
        Self::new(nu_max, n_nu, sigma, sigma, 1, 1)
    }

    pub fn nu_max(&self) -> f64 {
        self.nu_max
    }

    pub fn n_nu(&self) -> usize {
        self.n_nu
    }

    pub fn n_sigma(&self) -> usize {
        self.n_sigma
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma_min
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma_max
    }

    pub fn channel_count(&self) -> usize {
        self.channel_count
    }

    pub fn nu_spacing(&self) -> f64 {
        2.0 * self.nu_max / self.n_nu as f64
    }

    pub fn nu(&self, j: usize) -> f64 {
        (j as f64 - (self.n_nu / 2) as f64) * self.nu_spacing()
    }

    pub fn nus(&self) -> Vec<f64> {
        (0..self.n_nu).map(|j| self.nu(j)).collect()
    }

    /// Index of `nu = 0`.
    pub fn zero_index(&self) -> usize {
        self.n_nu / 2
    }

    /// Index of `-nu_j`; the endpoint `-nu_max` maps to itself.
    pub fn mirror_index(&self, j: usize) -> usize {
        (self.n_nu - j) % self.n_nu
    }

    pub fn sigma_spacing(&self) -> f64 {
        if self.n_sigma == 1 {
            1.0
        } else {
            (self.sigma_max - self.sigma_min) / (self.n_sigma - 1) as f64
        }
    }

    pub fn sigma(&self, s: usize) -> f64 {
        if s + 1 == self.n_sigma {
            self.sigma_max
        } else {
            self.sigma_min + s as f64 * self.sigma_spacing()
        }
    }

    pub fn age_spacing(&self) -> f64 {
        2.0 * PI / (self.n_nu as f64 * self.nu_spacing())
    }

    pub fn age(&self, k: usize) -> f64 {
        (k as f64 - (self.n_nu / 2) as f64) * self.age_spacing()
    }

    pub fn ages(&self) -> Vec<f64> {
        (0..self.n_nu).map(|k| self.age(k)).collect()
    }

    /// Length of the periodic age window.
    pub fn age_window(&self) -> f64 {
        self.n_nu as f64 * self.age_spacing()
    }

    pub fn slice_count(&self) -> usize {
        self.channel_count * self.channel_count * self.n_sigma
    }

    pub fn slice_index(&self, n: usize, n_prime: usize, s: usize) -> usize {
        (n * self.channel_count + n_prime) * self.n_sigma + s
    }

    /// `(n, n', sigma index)` of a slice.
    pub fn slice_labels(&self, slice: usize) -> (usize, usize, usize) {
        let s = slice % self.n_sigma;
        let pair = slice / self.n_sigma;
        (pair / self.channel_count, pair % self.channel_count, s)
    }

    pub fn len(&self) -> usize {
        self.slice_count() * self.n_nu
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Whether `(nu, sigma)` satisfies the wedge constraint `|nu|/2 <= sigma`.
    pub fn in_wedge(nu: f64, sigma: f64) -> bool {
        nu.abs() / 2.0 <= sigma
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_grid_validation() {
        assert!(EnergyGrid::new(20.0, 256, 1).is_ok());
        assert!(EnergyGrid::new(20.0, 100, 1).is_err());
        assert!(EnergyGrid::new(20.0, 8, 1).is_err());
        assert!(EnergyGrid::new(-1.0, 256, 1).is_err());
        assert!(EnergyGrid::new(1.0, 256, 0).is_err());
        let g = EnergyGrid::single_channel(15.0, 16).unwrap();
        assert_eq!(g.omega(15), 15.0);
        assert_eq!(g.spacing(), 1.0);
    }

    #[test]
    fn nu_and_age_grids_are_dual() {
        let g = NuSigmaGrid::single_slice(16.0, 1024, 10.0).unwrap();
        assert_eq!(g.nu(g.zero_index()), 0.0);
        assert_eq!(g.nu(0), -16.0);
        assert_eq!(g.age(g.zero_index()), 0.0);
        let product = g.nu_spacing() * g.age_spacing() * g.n_nu() as f64;
        assert!((product - 2.0 * PI).abs() < 1e-12);
        for j in 1..g.n_nu() {
            assert_eq!(g.nu(g.mirror_index(j)), -g.nu(j));
        }
        assert_eq!(g.mirror_index(0), 0);
    }

    #[test]
    fn slice_labels_round_trip() {
        let g = NuSigmaGrid::new(8.0, 64, 4.0, 6.0, 5, 3).unwrap();
        for n in 0..3 {
            for np in 0..3 {
                for s in 0..5 {
                    assert_eq!(g.slice_labels(g.slice_index(n, np, s)), (n, np, s));
                }
            }
        }
        assert_eq!(g.sigma(4), 6.0);
    }

    #[test]
    fn grid_validation() {
        assert!(NuSigmaGrid::new(16.0, 1000, 8.0, 8.0, 1, 1).is_err());
        assert!(NuSigmaGrid::new(16.0, 1024, 9.0, 8.0, 2, 1).is_err());
        assert!(NuSigmaGrid::new(16.0, 1024, 8.0, 9.0, 1, 1).is_err());
        assert!(NuSigmaGrid::new(0.0, 1024, 8.0, 8.0, 1, 1).is_err());
    }
}
