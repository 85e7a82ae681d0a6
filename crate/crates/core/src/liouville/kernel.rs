use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::NuSigmaGrid;
use super::packet::{WavePacket, DEFAULT_DECAY_THRESHOLD};
use super::transform::SliceTransform;
use crate::error::{Error, Result};
use crate::numerics::{compensated_sum, compensated_sum_complex, norm_sqr, simpson_weights};

/// `(omega, omega') -> (nu, sigma) = (omega - omega', (omega + omega') / 2)`.
pub fn riesz_forward(omega: f64, omega_prime: f64) -> Result<(f64, f64)> {
    if omega < 0.0 || omega_prime < 0.0 {
        return Err(Error::Domain(format!(
            "energies must be nonnegative, got ({omega}, {omega_prime})"
        )));
    }
    Ok((omega - omega_prime, 0.5 * (omega + omega_prime)))
}

/// `(nu, sigma) -> (sigma + nu/2, sigma - nu/2)`, defined on the wedge `|nu|/2 <= sigma`.
pub fn riesz_inverse(nu: f64, sigma: f64) -> Result<(f64, f64)> {
    if !NuSigmaGrid::in_wedge(nu, sigma) {
        return Err(Error::Domain(format!(
            "(nu, sigma) = ({nu}, {sigma}) lies outside the wedge |nu|/2 <= sigma"
        )));
    }
    Ok((sigma + 0.5 * nu, sigma - 0.5 * nu))
}

/// One term `weight * |f><g|` of a density-kernel mixture.
#[derive(Clone, Debug)]
pub struct KernelComponent {
    pub weight: f64,
    pub ket: WavePacket,
    pub bra: WavePacket,
}

impl KernelComponent {
    pub fn pure(weight: f64, packet: WavePacket) -> Self {
        KernelComponent {
            weight,
            ket: packet.clone(),
            bra: packet,
        }
    }
}

/// Density-matrix kernel `rho(nu, sigma, n, n')` sampled on a [`NuSigmaGrid`].
///
/// Samples are stored slice by slice, each slice being the full nu-line for
/// one `(n, n', sigma)`; see [`NuSigmaGrid::slice_index`]. Points outside the
/// wedge `|nu|/2 <= sigma` are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityKernel {
    grid: NuSigmaGrid,
    samples: Vec<Complex64>,
    hermitian: bool,
}

impl DensityKernel {
    pub fn zeros(grid: NuSigmaGrid) -> Self {
        DensityKernel {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.len()],
            hermitian: true,
        }
    }

    /// Samples `f(nu, sigma, n, n')` inside the wedge.
    pub fn from_fn(grid: NuSigmaGrid, hermitian: bool, f: impl Fn(f64, f64, usize, usize) -> Complex64) -> Self {
        let n_nu = grid.n_nu();
        let mut samples = Vec::with_capacity(grid.len());
        for slice in 0..grid.slice_count() {
            let (n, np, s) = grid.slice_labels(slice);
            let sigma = grid.sigma(s);
            for j in 0..n_nu {
                let nu = grid.nu(j);
                samples.push(if NuSigmaGrid::in_wedge(nu, sigma) {
                    f(nu, sigma, n, np)
                } else {
                    Complex64::new(0.0, 0.0)
                });
            }
        }
        DensityKernel {
            grid,
            samples,
            hermitian,
        }
    }

    pub fn from_samples(grid: NuSigmaGrid, samples: Vec<Complex64>, hermitian: bool) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a kernel grid of {}",
                samples.len(),
                grid.len()
            )));
        }
        Ok(DensityKernel {
            grid,
            samples,
            hermitian,
        })
    }

    pub fn grid(&self) -> &NuSigmaGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn hermitian_flag(&self) -> bool {
        self.hermitian
    }

    pub fn slice(&self, n: usize, n_prime: usize, s: usize) -> &[Complex64] {
        let i = self.grid.slice_index(n, n_prime, s);
        let n_nu = self.grid.n_nu();
        &self.samples[i * n_nu..(i + 1) * n_nu]
    }

    pub fn slices(&self) -> std::slice::Chunks<'_, Complex64> {
        self.samples.chunks(self.grid.n_nu())
    }

    pub fn value(&self, j: usize, s: usize, n: usize, n_prime: usize) -> Complex64 {
        self.slice(n, n_prime, s)[j]
    }

    /// `sum_slices dnu * sum_j |rho|^2`; sigma is a slice label and carries no weight.
    pub fn norm_sqr(&self) -> f64 {
        let per_slice: Vec<f64> = self.slices().map(norm_sqr).collect();
        compensated_sum(per_slice) * self.grid.nu_spacing()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `sum_n \int rho(0, sigma, n, n) dsigma` (Simpson over sigma).
    pub fn trace(&self) -> Complex64 {
        let j0 = self.grid.zero_index();
        let w = simpson_weights(self.grid.n_sigma(), self.grid.sigma_spacing());
        let mut terms = Vec::new();
        for n in 0..self.grid.channel_count() {
            for (s, ws) in w.iter().enumerate() {
                terms.push(self.value(j0, s, n, n) * ws);
            }
        }
        compensated_sum_complex(terms)
    }

    /// Largest deviation from `rho(nu, sigma, n, n') = conj(rho(-nu, sigma, n', n))`
    /// over the grid points whose mirror is also sampled.
    pub fn hermiticity_defect(&self) -> f64 {
        let g = &self.grid;
        let mut worst: f64 = 0.0;
        for slice in 0..g.slice_count() {
            let (n, np, s) = g.slice_labels(slice);
            let a = self.slice(n, np, s);
            let b = self.slice(np, n, s);
            for j in 1..g.n_nu() {
                worst = worst.max((a[j] - b[g.mirror_index(j)].conj()).norm());
            }
        }
        worst
    }

    /// Largest magnitude in the outer 10% of the nu-line on either side,
    /// relative to the kernel's peak magnitude.
    pub fn tail_ratio(&self) -> f64 {
        let n_nu = self.grid.n_nu();
        let width = (n_nu / 10).max(1);
        let mut peak: f64 = 0.0;
        let mut tail: f64 = 0.0;
        for slice in self.slices() {
            for (j, z) in slice.iter().enumerate() {
                let m = z.norm();
                peak = peak.max(m);
                if j < width || j >= n_nu - width {
                    tail = tail.max(m);
                }
            }
        }
        if peak == 0.0 {
            0.0
        } else {
            tail / peak
        }
    }

    pub fn check_decay(&self, threshold: f64) -> Result<()> {
        let magnitude = self.tail_ratio();
        if magnitude > threshold {
            return Err(Error::DecayViolation { magnitude, threshold });
        }
        Ok(())
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("kernels live on different grids".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        Ok(DensityKernel {
            grid: self.grid,
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect(),
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        DensityKernel {
            grid: self.grid,
            samples: self.samples.iter().map(|z| z * factor).collect(),
            hermitian: self.hermitian && factor.im == 0.0,
        }
    }

    /// Largest pointwise difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Multiplies every slice pointwise by `m(nu_j)`.
    pub(crate) fn map_nu(&self, hermitian: bool, m: impl Fn(f64) -> Complex64 + Sync) -> Self {
        let n_nu = self.grid.n_nu();
        let factors: Vec<Complex64> = (0..n_nu).map(|j| m(self.grid.nu(j))).collect();
        let samples = self
            .samples
            .par_chunks(n_nu)
            .flat_map_iter(|slice| slice.iter().zip(&factors).map(|(z, f)| z * f))
            .collect();
        DensityKernel {
            grid: self.grid,
            samples,
            hermitian,
        }
    }

    /// Applies an in-place per-slice transformation in parallel.
    pub(crate) fn map_slices(&self, hermitian: bool, f: impl Fn(&mut [Complex64]) + Sync + Send) -> Self {
        let mut samples = self.samples.clone();
        samples.par_chunks_mut(self.grid.n_nu()).for_each(f);
        DensityKernel {
            grid: self.grid,
            samples,
            hermitian,
        }
    }
}

/// `rho(nu, sigma, n, n') = sum_k w_k f_k(sigma + nu/2) conj(g_k(sigma - nu/2))`
/// with `n = channel(f_k)` and `n' = channel(g_k)`.
pub fn build_kernel(components: &[KernelComponent], grid: &NuSigmaGrid) -> Result<DensityKernel> {
    let mut interpolators = Vec::with_capacity(components.len());
    for (i, c) in components.iter().enumerate() {
        if !(c.weight.is_finite() && c.weight >= 0.0) {
            return Err(Error::Domain(format!("component {i} has negative weight {}", c.weight)));
        }
        if c.ket.grid() != c.bra.grid() {
            return Err(Error::GridMismatch(format!("component {i} mixes energy grids")));
        }
        if c.ket.grid().channel_count() != grid.channel_count() {
            return Err(Error::GridMismatch(format!(
                "component {i} has {} channels, kernel grid has {}",
                c.ket.grid().channel_count(),
                grid.channel_count()
            )));
        }
        interpolators.push((
            c.weight,
            c.ket.channel(),
            c.bra.channel(),
            c.ket.interpolator(),
            c.bra.interpolator(),
        ));
    }
    if let Some(first) = components.first() {
        if components.iter().any(|c| c.ket.grid() != first.ket.grid()) {
            return Err(Error::GridMismatch("components use different energy grids".into()));
        }
    }
    let hermitian = components.iter().all(|c| c.ket == c.bra);

    let n_nu = grid.n_nu();
    let nus = grid.nus();
    let mut samples = vec![Complex64::new(0.0, 0.0); grid.len()];
    samples.par_chunks_mut(n_nu).enumerate().for_each(|(slice, out)| {
        let (n, np, s) = grid.slice_labels(slice);
        let sigma = grid.sigma(s);
        for (weight, ket_ch, bra_ch, ket, bra) in &interpolators {
            if *ket_ch != n || *bra_ch != np {
                continue;
            }
            for (z, &nu) in out.iter_mut().zip(&nus) {
                if let Ok((w, wp)) = riesz_inverse(nu, sigma) {
                    *z += ket.eval(w) * bra.eval(wp).conj() * *weight;
                }
            }
        }
    });
    Ok(DensityKernel {
        grid: *grid,
        samples,
        hermitian,
    })
}

/// `L rho`: multiplication by `nu`.
pub fn liouvillian_apply(rho: &DensityKernel) -> DensityKernel {
    rho.map_nu(false, |nu| Complex64::new(nu, 0.0))
}

/// `exp(-i L t) rho`: multiplication by `e^{-i nu t}`.
pub fn evolve_nu(rho: &DensityKernel, t: f64) -> DensityKernel {
    rho.map_nu(rho.hermitian, |nu| Complex64::from_polar(1.0, -nu * t))
}

/// Continuous age operator `i d/dnu` at fixed `(sigma, n, n')`, by spectral
/// differentiation. In the age representation it multiplies by `-a`; the
/// unpaired Nyquist mode is dropped.
pub fn age_apply_continuous(rho: &DensityKernel) -> Result<DensityKernel> {
    age_apply_continuous_with_threshold(rho, DEFAULT_DECAY_THRESHOLD)
}

pub fn age_apply_continuous_with_threshold(rho: &DensityKernel, decay_threshold: f64) -> Result<DensityKernel> {
    rho.check_decay(decay_threshold)?;
    let g = rho.grid();
    let transform = SliceTransform::new(g.n_nu(), g.nu_spacing());
    let ages = g.ages();
    Ok(rho.map_slices(false, |slice| {
        transform.to_age(slice);
        slice[0] = Complex64::new(0.0, 0.0);
        for (z, a) in slice.iter_mut().zip(&ages).skip(1) {
            *z *= -a;
        }
        transform.from_age(slice);
    }))
}

/// `|| (A L - L A) rho - i rho || / || rho ||`.
pub fn commutator_residual(rho: &DensityKernel) -> Result<f64> {
    let norm = rho.norm();
    if norm == 0.0 {
        return Err(Error::ZeroState);
    }
    let al = age_apply_continuous(&liouvillian_apply(rho))?;
    let la = liouvillian_apply(&age_apply_continuous(rho)?);
    let residual = al.sub(&la)?.sub(&rho.scale(Complex64::new(0.0, 1.0)))?;
    Ok(residual.norm() / norm)
}
