//! Discrete transport between the nu-line and the age line.
//!
//! Continuum convention: `rho_hat(a) = (2 pi)^{-1/2} \int rho(nu) e^{-i nu a} dnu`.
//! On the centered grids `nu_j = (j - N/2) dnu` and `a_k = (k - N/2) da` the
//! kernel factors as `(-1)^{j+k} e^{-2 pi i jk/N}`, so each direction is one
//! FFT with a checkerboard sign on input and output.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Reusable forward/inverse plans for one nu-grid.
#[derive(Clone)]
pub struct SliceTransform {
    n: usize,
    nu_spacing: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl SliceTransform {
    pub fn new(n: usize, nu_spacing: f64) -> Self {
        let mut planner = FftPlanner::new();
        SliceTransform {
            n,
            nu_spacing,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn age_spacing(&self) -> f64 {
        2.0 * PI / (self.n as f64 * self.nu_spacing)
    }

    /// nu-samples to age-samples, in place.
    pub fn to_age(&self, slice: &mut [Complex64]) {
        debug_assert_eq!(slice.len(), self.n);
        checkerboard(slice);
        self.forward.process(slice);
        let scale = self.nu_spacing / (2.0 * PI).sqrt();
        for (k, z) in slice.iter_mut().enumerate() {
            *z *= if k % 2 == 0 { scale } else { -scale };
        }
    }

    /// age-samples to nu-samples, in place.
    pub fn from_age(&self, slice: &mut [Complex64]) {
        debug_assert_eq!(slice.len(), self.n);
        checkerboard(slice);
        self.inverse.process(slice);
        let scale = self.age_spacing() / (2.0 * PI).sqrt();
        for (j, z) in slice.iter_mut().enumerate() {
            *z *= if j % 2 == 0 { scale } else { -scale };
        }
    }
}

fn checkerboard(slice: &mut [Complex64]) {
    for z in slice.iter_mut().skip(1).step_by(2) {
        *z = -*z;
    }
}
