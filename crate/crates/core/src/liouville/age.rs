use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::NuSigmaGrid;
use super::kernel::DensityKernel;
use super::packet::DEFAULT_DECAY_THRESHOLD;
use super::transform::SliceTransform;
use crate::error::{Error, Result};
use crate::numerics::{compensated_sum, norm_sqr};

/// Largest fraction of the total mass allowed to wrap around the periodic
/// age window during a shift.
pub const DEFAULT_WINDOW_TOLERANCE: f64 = 1e-12;

/// Age-representation samples `rho_hat(a_k, sigma, n, n')` with the same
/// slice layout as [`DensityKernel`].
#[derive(Clone, Debug, PartialEq)]
pub struct AgeRepresentation {
    grid: NuSigmaGrid,
    samples: Vec<Complex64>,
}

impl AgeRepresentation {
    pub fn from_samples(grid: NuSigmaGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples for an age grid of {}",
                samples.len(),
                grid.len()
            )));
        }
        Ok(AgeRepresentation { grid, samples })
    }

    pub fn from_fn(grid: NuSigmaGrid, f: impl Fn(f64, f64, usize, usize) -> Complex64) -> Self {
        let mut samples = Vec::with_capacity(grid.len());
        for slice in 0..grid.slice_count() {
            let (n, np, s) = grid.slice_labels(slice);
            let sigma = grid.sigma(s);
            samples.extend((0..grid.n_nu()).map(|k| f(grid.age(k), sigma, n, np)));
        }
        AgeRepresentation { grid, samples }
    }

    pub fn grid(&self) -> &NuSigmaGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn slices(&self) -> std::slice::Chunks<'_, Complex64> {
        self.samples.chunks(self.grid.n_nu())
    }

    pub fn slice(&self, n: usize, n_prime: usize, s: usize) -> &[Complex64] {
        let i = self.grid.slice_index(n, n_prime, s);
        let n_nu = self.grid.n_nu();
        &self.samples[i * n_nu..(i + 1) * n_nu]
    }

    pub fn ages(&self) -> Vec<f64> {
        self.grid.ages()
    }

    /// `da * sum |rho_hat|^2`, summed over slices.
    pub fn mass(&self) -> f64 {
        let per_slice: Vec<f64> = self.slices().map(norm_sqr).collect();
        compensated_sum(per_slice) * self.grid.age_spacing()
    }

    pub fn slice_masses(&self) -> Vec<f64> {
        let da = self.grid.age_spacing();
        self.slices().map(|s| norm_sqr(s) * da).collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(
                "age representations live on different grids".into(),
            ));
        }
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `sqrt(da * sum |self - other|^2)`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(
                "age representations live on different grids".into(),
            ));
        }
        let d = compensated_sum(self.samples.iter().zip(&other.samples).map(|(a, b)| (a - b).norm_sqr()));
        Ok((d * self.grid.age_spacing()).sqrt())
    }

    pub(crate) fn map_slices(&self, f: impl Fn(&mut [Complex64]) + Sync + Send) -> Self {
        let mut samples = self.samples.clone();
        samples.par_chunks_mut(self.grid.n_nu()).for_each(f);
        AgeRepresentation {
            grid: self.grid,
            samples,
        }
    }

    /// Fraction of the mass that a shift by `t` would carry across the
    /// window edge: the samples with `a < a_min + t` for `t > 0`, or
    /// `a > a_max + t` for `t < 0`.
    pub fn window_loss(&self, t: f64) -> f64 {
        let total = self.mass();
        if total == 0.0 || t == 0.0 {
            return 0.0;
        }
        let n = self.grid.n_nu();
        let bins = ((t.abs() / self.grid.age_spacing()).ceil() as usize).min(n);
        let range = if t > 0.0 { 0..bins } else { n - bins..n };
        let lost: Vec<f64> = self
            .slices()
            .flat_map(|s| s[range.clone()].iter().map(|z| z.norm_sqr()))
            .collect();
        compensated_sum(lost) * self.grid.age_spacing() / total
    }

    pub fn check_window(&self, t: f64, tolerance: f64) -> Result<()> {
        let lost = self.window_loss(t);
        if lost > tolerance {
            return Err(Error::WindowOverflow { t, lost });
        }
        Ok(())
    }

    /// Largest `t >= 0` (a multiple of `da`) for which a forward shift keeps
    /// all but `tolerance` of the mass inside the window.
    pub fn forward_horizon(&self, tolerance: f64) -> f64 {
        let total = self.mass();
        let n = self.grid.n_nu();
        if total == 0.0 {
            return n as f64 * self.grid.age_spacing();
        }
        let da = self.grid.age_spacing();
        let mut lost = 0.0;
        for k in 0..n {
            let column: f64 = self.slices().map(|s| s[k].norm_sqr()).sum::<f64>() * da / total;
            if lost + column > tolerance {
                return k as f64 * da;
            }
            lost += column;
        }
        n as f64 * da
    }
}

/// Per-slice transport `rho(nu) -> rho_hat(a)`.
pub fn to_age(rho: &DensityKernel) -> Result<AgeRepresentation> {
    to_age_with_threshold(rho, DEFAULT_DECAY_THRESHOLD)
}

pub fn to_age_with_threshold(rho: &DensityKernel, decay_threshold: f64) -> Result<AgeRepresentation> {
    rho.check_decay(decay_threshold)?;
    Ok(to_age_unchecked(rho))
}

pub(crate) fn to_age_unchecked(rho: &DensityKernel) -> AgeRepresentation {
    let g = *rho.grid();
    let transform = SliceTransform::new(g.n_nu(), g.nu_spacing());
    let mut samples = rho.samples().to_vec();
    samples.par_chunks_mut(g.n_nu()).for_each(|s| transform.to_age(s));
    AgeRepresentation { grid: g, samples }
}

/// Inverse transport `rho_hat(a) -> rho(nu)`. The result is flagged
/// non-hermitian; callers that know better can rebuild it.
pub fn from_age(rep: &AgeRepresentation) -> DensityKernel {
    let g = rep.grid;
    let transform = SliceTransform::new(g.n_nu(), g.nu_spacing());
    let mut samples = rep.samples.clone();
    samples.par_chunks_mut(g.n_nu()).for_each(|s| transform.from_age(s));
    DensityKernel::from_samples(g, samples, false).expect("grid sizes agree")
}

/// `rho_hat(a) -> rho_hat(a + t)`.
///
/// The whole-bin part of `t` is an index rotation; the remaining fraction of
/// a bin is applied as the phase `e^{-i nu r}` on the nu-line.
pub fn evolve_age(rep: &AgeRepresentation, t: f64) -> Result<AgeRepresentation> {
    evolve_age_with_tolerance(rep, t, DEFAULT_WINDOW_TOLERANCE)
}

pub fn evolve_age_with_tolerance(rep: &AgeRepresentation, t: f64, tolerance: f64) -> Result<AgeRepresentation> {
    rep.check_window(t, tolerance)?;
    let g = rep.grid;
    let n = g.n_nu();
    let da = g.age_spacing();
    let whole = (t / da).round();
    let remainder = t - whole * da;
    let shift = (whole as i64).rem_euclid(n as i64) as usize;
    let transform = SliceTransform::new(n, g.nu_spacing());
    let phases: Vec<Complex64> = if remainder == 0.0 {
        Vec::new()
    } else {
        (0..n)
            .map(|j| Complex64::from_polar(1.0, -g.nu(j) * remainder))
            .collect()
    };
    Ok(rep.map_slices(|slice| {
        slice.rotate_left(shift);
        if !phases.is_empty() {
            transform.from_age(slice);
            for (z, p) in slice.iter_mut().zip(&phases) {
                *z *= p;
            }
            transform.to_age(slice);
        }
    }))
}

/// `sup_{a in window} |rho_hat(a + t)|` over the grid points of the window.
pub fn pointwise_sup_after(rep: &AgeRepresentation, t: f64, window: (f64, f64)) -> Result<f64> {
    let g = rep.grid;
    let (lo, hi) = window;
    let a_min = g.age(0);
    let a_max = g.age(g.n_nu() - 1);
    if !(lo <= hi && lo >= a_min && hi <= a_max) {
        return Err(Error::Domain(format!(
            "window [{lo}, {hi}] is not inside the age grid [{a_min}, {a_max}]"
        )));
    }
    let evolved = evolve_age(rep, t)?;
    let ages = g.ages();
    Ok(evolved
        .slices()
        .flat_map(|s| {
            s.iter()
                .zip(&ages)
                .filter(|(_, &a)| a >= lo && a <= hi)
                .map(|(z, _)| z.norm())
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::kernel::evolve_nu;
    use std::f64::consts::PI;

    fn gaussian(n_nu: usize, nu_max: f64) -> DensityKernel {
        let g = NuSigmaGrid::single_slice(nu_max, n_nu, nu_max).unwrap();
        DensityKernel::from_fn(g, true, |nu, _, _, _| Complex64::new((-0.5 * nu * nu).exp(), 0.0))
    }

    #[test]
    fn gaussian_transforms_to_gaussian() {
        let rep = to_age(&gaussian(4096, 16.0)).unwrap();
        for (z, a) in rep.samples().iter().zip(rep.ages()) {
            assert!((z - Complex64::new((-0.5 * a * a).exp(), 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn parseval_and_round_trip() {
        let rho = gaussian(4096, 16.0);
        let rep = to_age(&rho).unwrap();
        assert!((rep.mass() - rho.norm_sqr()).abs() < 1e-10 * rho.norm_sqr());
        let back = from_age(&rep);
        assert!(back.max_abs_diff(&rho).unwrap() < 1e-10);
    }

    #[test]
    fn point_mass_transforms_to_plane_wave() {
        let g = NuSigmaGrid::single_slice(8.0, 256, 8.0).unwrap();
        let k0 = 140;
        let a0 = g.age(k0);
        let mut samples = vec![Complex64::new(0.0, 0.0); 256];
        samples[k0] = Complex64::new(1.0, 0.0);
        let rep = AgeRepresentation::from_samples(g, samples).unwrap();
        let rho = from_age(&rep);
        let c = g.age_spacing() / (2.0 * PI).sqrt();
        for (j, z) in rho.samples().iter().enumerate() {
            let expect = Complex64::from_polar(c, g.nu(j) * a0);
            assert!((z - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn whole_bin_shift_moves_point_mass_left() {
        let g = NuSigmaGrid::single_slice(8.0, 256, 8.0).unwrap();
        let mut samples = vec![Complex64::new(0.0, 0.0); 256];
        samples[140] = Complex64::new(1.0, 0.0);
        let rep = AgeRepresentation::from_samples(g, samples).unwrap();
        let shifted = evolve_age(&rep, g.age_spacing()).unwrap();
        assert_eq!(shifted.samples()[139], Complex64::new(1.0, 0.0));
        assert_eq!(shifted.samples()[140], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn shift_matches_phase_evolution() {
        let rho = gaussian(1024, 16.0);
        for t in [0.0, 0.37, 2.0 * PI / 32.0 * 3.0, 5.0, -4.2] {
            let a = to_age(&evolve_nu(&rho, t)).unwrap();
            let b = evolve_age(&to_age(&rho).unwrap(), t).unwrap();
            assert!(a.distance(&b).unwrap() <= 1e-10 * rho.norm(), "t = {t}");
        }
    }

    #[test]
    fn shifted_gaussian_centroid() {
        let rep = to_age(&gaussian(4096, 16.0)).unwrap();
        let ev = evolve_age(&rep, 5.0).unwrap();
        let ages = rep.ages();
        let w: Vec<f64> = ev.samples().iter().map(|z| z.norm_sqr()).collect();
        let centroid = w.iter().zip(&ages).map(|(w, a)| w * a).sum::<f64>() / w.iter().sum::<f64>();
        assert!((centroid + 5.0).abs() < rep.grid().age_spacing());
    }

    #[test]
    fn window_overflow_is_reported() {
        let rep = to_age(&gaussian(256, 16.0)).unwrap();
        // window is 256 * da = 16 pi wide
        assert!(evolve_age(&rep, 10.0).is_ok());
        assert!(matches!(evolve_age(&rep, 22.0), Err(Error::WindowOverflow { .. })));
        let h = rep.forward_horizon(1e-12);
        assert!(h > 10.0 && h < 22.0, "{h}");
        assert!(evolve_age(&rep, h).is_ok());
    }

    #[test]
    fn pointwise_decay() {
        let rep = to_age(&gaussian(4096, 16.0)).unwrap();
        let s0 = pointwise_sup_after(&rep, 0.0, (-1.0, 1.0)).unwrap();
        assert!((s0 - 1.0).abs() < 1e-8);
        let s10 = pointwise_sup_after(&rep, 10.0, (-1.0, 1.0)).unwrap();
        assert!(s10 < (-0.5_f64 * 81.0).exp() + 1e-8);
        assert!(pointwise_sup_after(&rep, 1.0, (-1e6, 1.0)).is_err());
    }
}
