//! The Psi+/Psi- decomposition in the age variable and the diagnostics that
//! certify convergence of evolved states to Psi- (age support on `a <= 0`).
//!
//! Two notions of "mass on a half-line" appear here:
//!
//! * sample masses: sums of `|rho_hat(a_k)|^2 da` over grid points on one
//!   side. [`PsiSplit`], [`hardy_residual`] and [`analytic_signal_check`]
//!   use these, with the `a = 0` sample assigned to Psi-.
//! * band-limited masses: exact integrals of `|rho_hat(a)|^2` over the two
//!   half-windows `(-W/2, 0)` and `(0, W/2)`, where `rho_hat` is the
//!   trigonometric polynomial defined by the nu-samples. [`psi_masses`],
//!   [`plus_mass`] and [`theorem_sweep`] use these. They carry no boundary
//!   bin and agree with tail integrals of the continuous profile to
//!   spectral accuracy, where a sample sum is only first-order accurate at
//!   the cut.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::liouville::{
    evolve_nu, from_age, to_age_unchecked, to_age_with_threshold, AgeRepresentation, DensityKernel, NuSigmaGrid,
    DEFAULT_DECAY_THRESHOLD, DEFAULT_WINDOW_TOLERANCE,
};
use crate::numerics::{compensated_sum, norm_sqr};

/// Forbidden-side mass fraction below which a state counts as a Psi- member.
pub const DEFAULT_CERTIFICATION_THRESHOLD: f64 = 1e-8;

/// Sample-level restriction of an age representation to `a > 0` (plus) and
/// `a <= 0` (minus).
#[derive(Clone, Debug, PartialEq)]
pub struct PsiSplit {
    pub plus: AgeRepresentation,
    pub minus: AgeRepresentation,
}

/// Sample masses of an age representation grouped by region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionMasses {
    /// `a > 0`.
    pub positive: f64,
    /// `a < 0`, excluding the window edge `a = -W/2`.
    pub negative: f64,
    /// `a = 0`.
    pub zero_bin: f64,
    /// `a = -W/2`, which is its own mirror image on the periodic grid.
    pub edge_bin: f64,
}

impl RegionMasses {
    /// Sums are accumulated in order of increasing `|a|`, so that reflecting
    /// `a -> -a` maps `positive` onto `negative` bit for bit.
    pub fn of(rep: &AgeRepresentation) -> Self {
        let g = rep.grid();
        let half = g.n_nu() / 2;
        let da = g.age_spacing();
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        let mut zero_bin = Vec::new();
        let mut edge_bin = Vec::new();
        for s in rep.slices() {
            for k in 1..half {
                positive.push(s[half + k].norm_sqr());
                negative.push(s[half - k].norm_sqr());
            }
            zero_bin.push(s[half].norm_sqr());
            edge_bin.push(s[0].norm_sqr());
        }
        RegionMasses {
            positive: compensated_sum(positive) * da,
            negative: compensated_sum(negative) * da,
            zero_bin: compensated_sum(zero_bin) * da,
            edge_bin: compensated_sum(edge_bin) * da,
        }
    }

    pub fn plus(&self) -> f64 {
        self.positive
    }

    pub fn minus(&self) -> f64 {
        self.negative + self.zero_bin + self.edge_bin
    }

    /// Symmetric in `positive` and `negative`, so it is unchanged bit for
    /// bit by the reflection.
    pub fn total(&self) -> f64 {
        (self.positive + self.negative) + self.zero_bin + self.edge_bin
    }
}

impl PsiSplit {
    pub fn plus_mass(&self) -> f64 {
        self.plus.mass()
    }

    pub fn minus_mass(&self) -> f64 {
        self.minus.mass()
    }

    pub fn reconstruct(&self) -> AgeRepresentation {
        let samples = self
            .plus
            .samples()
            .iter()
            .zip(self.minus.samples())
            .map(|(a, b)| a + b)
            .collect();
        AgeRepresentation::from_samples(*self.plus.grid(), samples).expect("same grid")
    }
}

/// Splits at `a = 0`; the `a = 0` sample goes to minus.
pub fn psi_split(rep: &AgeRepresentation) -> PsiSplit {
    let half = rep.grid().n_nu() / 2;
    let zero = Complex64::new(0.0, 0.0);
    let plus = rep.map_slices(|s| s[..=half].fill(zero));
    let minus = rep.map_slices(|s| s[half + 1..].fill(zero));
    PsiSplit { plus, minus }
}

/// Wigner time reversal in the age variable: `rho_hat(a) -> conj(rho_hat(-a))`.
pub fn time_reverse(rep: &AgeRepresentation) -> AgeRepresentation {
    let n = rep.grid().n_nu();
    rep.map_slices(|s| {
        let original = s.to_vec();
        for (k, z) in s.iter_mut().enumerate() {
            *z = original[(n - k) % n].conj();
        }
    })
}

/// Band-limited masses of the evolved state on the two half-windows.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PsiMasses {
    pub plus: f64,
    pub minus: f64,
}

/// Precomputed autocorrelations of a kernel's nu-slices, from which the
/// half-window masses of `rho_hat(a + t)` follow in O(N) per `t`.
///
/// With `rho_hat(a) = sum_j c_j e^{-i nu_j a}` on a window of width `W`,
/// `\int_0^{W/2} |rho_hat(a + t)|^2 da = (W/2) sum |c_j|^2
///   + sum_{m odd > 0} 4 / (m dnu) Im(R(m) e^{-i m dnu t})`
/// where `R(m) = sum_l c_{l+m} conj(c_l)`: even lags integrate to zero over a
/// half period and odd lags to `2 / (i m dnu)`.
pub struct HalfWindowMasses {
    nu_spacing: f64,
    half_total: f64,
    /// `(m, R(m))` for odd lags, summed over slices.
    odd_lags: Vec<(f64, Complex64)>,
}

impl HalfWindowMasses {
    pub fn new(rho: &DensityKernel) -> Self {
        let g = rho.grid();
        let n = g.n_nu();
        let dnu = g.nu_spacing();
        let scale = dnu / (2.0 * PI).sqrt();
        let l = 2 * n;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(l);
        let inverse = planner.plan_fft_inverse(l);
        let per_slice: Vec<Vec<Complex64>> = rho
            .slices()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|slice| {
                let mut buf = vec![Complex64::new(0.0, 0.0); l];
                for (b, z) in buf.iter_mut().zip(slice.iter()) {
                    *b = z * scale;
                }
                forward.process(&mut buf);
                for z in buf.iter_mut() {
                    *z = Complex64::new(z.norm_sqr(), 0.0);
                }
                inverse.process(&mut buf);
                buf.truncate(n);
                buf.iter_mut().for_each(|z| *z /= l as f64);
                buf
            })
            .collect();
        let odd_lags = (1..n)
            .step_by(2)
            .map(|m| {
                let r = per_slice.iter().map(|s| s[m]).sum::<Complex64>();
                (m as f64, r)
            })
            .collect();
        HalfWindowMasses {
            nu_spacing: dnu,
            half_total: 0.5 * rho.norm_sqr(),
            odd_lags,
        }
    }

    pub fn total(&self) -> f64 {
        2.0 * self.half_total
    }

    pub fn at(&self, t: f64) -> PsiMasses {
        let dnu = self.nu_spacing;
        let odd = compensated_sum(self.odd_lags.iter().map(|&(m, r)| {
            let phase = Complex64::from_polar(1.0, -m * dnu * t);
            4.0 / (m * dnu) * (r * phase).im
        }));
        PsiMasses {
            plus: self.half_total + odd,
            minus: self.half_total - odd,
        }
    }
}

/// Band-limited Psi+/Psi- masses of `exp(-i L t) rho`.
pub fn psi_masses(rho: &DensityKernel, t: f64) -> Result<PsiMasses> {
    let rep = to_age_with_threshold(rho, DEFAULT_DECAY_THRESHOLD)?;
    rep.check_window(t, DEFAULT_WINDOW_TOLERANCE)?;
    Ok(HalfWindowMasses::new(rho).at(t))
}

/// Squared norm of the Psi+ component of the evolved state.
pub fn plus_mass(rho: &DensityKernel, t: f64) -> Result<f64> {
    psi_masses(rho, t).map(|m| m.plus)
}

/// Which Hardy class membership to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HardySide {
    /// Psi+: age support on `a >= 0`; the forbidden side is `a < 0`.
    Above,
    /// Psi-: age support on `a <= 0`; the forbidden side is `a > 0`.
    Below,
}

fn forbidden_fraction(rep: &AgeRepresentation, side: HardySide) -> Result<f64> {
    let m = RegionMasses::of(rep);
    let total = m.total();
    if total == 0.0 {
        return Err(Error::ZeroState);
    }
    let forbidden = match side {
        HardySide::Below => m.positive,
        HardySide::Above => m.negative + m.edge_bin,
    };
    Ok(forbidden / total)
}

/// Fraction of the age-representation sample mass on the forbidden half-line.
pub fn hardy_residual(rho: &DensityKernel, side: HardySide) -> Result<f64> {
    forbidden_fraction(&to_age_with_threshold(rho, DEFAULT_DECAY_THRESHOLD)?, side)
}

/// `|| rho - P_minus rho || / || rho ||`, where `P_minus` rebuilds the
/// nu-function from the `a <= 0` half of its age representation only.
pub fn analytic_signal_check(rho: &DensityKernel) -> Result<f64> {
    let norm = rho.norm();
    if norm == 0.0 {
        return Err(Error::ZeroState);
    }
    let rep = to_age_with_threshold(rho, DEFAULT_DECAY_THRESHOLD)?;
    let projected = from_age(&psi_split(&rep).minus);
    let diff: Vec<f64> = rho
        .slices()
        .zip(projected.slices())
        .map(|(a, b)| {
            let d: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            norm_sqr(&d)
        })
        .collect();
    Ok((compensated_sum(diff) * rho.grid().nu_spacing()).sqrt() / norm)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepConfig {
    pub certification_threshold: f64,
    pub window_tolerance: f64,
    pub decay_threshold: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            certification_threshold: DEFAULT_CERTIFICATION_THRESHOLD,
            window_tolerance: DEFAULT_WINDOW_TOLERANCE,
            decay_threshold: DEFAULT_DECAY_THRESHOLD,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub t: f64,
    pub plus_mass: f64,
    pub minus_mass: f64,
    pub hardy_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub initial_mass: f64,
    pub threshold: f64,
    /// Final plus mass below `threshold * initial_mass` and final
    /// forbidden-side fraction below `threshold`.
    pub certified: bool,
    /// Earliest scheduled `t` from which every later row is certified.
    pub t_star: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSummary {
    pub certified: bool,
    pub t_star: Option<f64>,
    pub threshold: f64,
    pub seed: u64,
}

impl SweepReport {
    /// Largest increase of the plus-mass column between consecutive rows
    /// (0 when monotone nonincreasing).
    pub fn max_plus_increase(&self) -> f64 {
        self.rows
            .windows(2)
            .map(|w| (w[1].plus_mass - w[0].plus_mass).max(0.0))
            .fold(0.0, f64::max)
    }

    /// Largest deviation of `plus + minus` from the initial mass.
    pub fn conservation_defect(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.plus_mass + r.minus_mass - self.initial_mass).abs())
            .fold(0.0, f64::max)
    }

    pub fn summary(&self, seed: u64) -> SweepSummary {
        SweepSummary {
            certified: self.certified,
            t_star: self.t_star,
            threshold: self.threshold,
            seed,
        }
    }

    /// CSV with header `t,plus_mass,minus_mass,hardy_residual`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,plus_mass,minus_mass,hardy_residual")?;
        for r in &self.rows {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                r.t, r.plus_mass, r.minus_mass, r.hardy_residual
            )?;
        }
        Ok(())
    }
}

/// Evolves `rho` along `schedule` and records the Psi+/Psi- masses and the
/// Psi- membership residual at each time.
pub fn theorem_sweep(rho: &DensityKernel, schedule: &[f64], config: &SweepConfig) -> Result<SweepReport> {
    if schedule.is_empty() {
        return Err(Error::Domain("empty t schedule".into()));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) || schedule.iter().any(|t| !t.is_finite()) {
        return Err(Error::Domain(
            "t schedule must be finite and strictly increasing".into(),
        ));
    }
    let initial = to_age_with_threshold(rho, config.decay_threshold)?;
    let initial_mass = rho.norm_sqr();
    if initial_mass == 0.0 {
        return Err(Error::ZeroState);
    }
    for &t in schedule {
        initial.check_window(t, config.window_tolerance)?;
    }
    let masses = HalfWindowMasses::new(rho);
    let rows: Vec<SweepRow> = schedule
        .par_iter()
        .map(|&t| {
            let m = masses.at(t);
            let evolved = to_age_unchecked(&evolve_nu(rho, t));
            let hardy_residual = forbidden_fraction(&evolved, HardySide::Below).expect("nonzero state");
            SweepRow {
                t,
                plus_mass: m.plus,
                minus_mass: m.minus,
                hardy_residual,
            }
        })
        .collect();

    let threshold = config.certification_threshold;
    let row_ok = |r: &SweepRow| r.hardy_residual < threshold && r.plus_mass < threshold * initial_mass;
    let certified = rows.last().is_some_and(row_ok);
    let t_star = if certified {
        let first_bad_from_end = rows.iter().rposition(|r| !row_ok(r));
        Some(match first_bad_from_end {
            Some(i) => rows[i + 1].t,
            None => rows[0].t,
        })
    } else {
        None
    };
    Ok(SweepReport {
        rows,
        initial_mass,
        threshold,
        certified,
        t_star,
    })
}

/// Reference state whose age profile is the normalized Gaussian
/// `(pi s^2)^{-1/4} exp(-(a - center)^2 / (2 s^2))`, placed on every diagonal
/// channel slice of `grid`.
pub fn reference_gaussian(grid: &NuSigmaGrid, center: f64, width: f64) -> Result<DensityKernel> {
    if !(center.is_finite() && width.is_finite()) || width <= 0.0 {
        return Err(Error::Domain(format!(
            "invalid gaussian center {center} / width {width}"
        )));
    }
    let amp = (width * width / PI).powf(0.25);
    Ok(DensityKernel::from_fn(*grid, false, |nu, _, n, n_prime| {
        if n != n_prime {
            return Complex64::new(0.0, 0.0);
        }
        let d = width * nu;
        Complex64::from_polar(amp * (-0.5 * d * d).exp(), nu * center)
    }))
}

/// Mass of the reference Gaussian age profile on `(t, infinity)`.
pub fn gaussian_tail_mass(center: f64, width: f64, t: f64) -> f64 {
    0.5 * libm::erfc((t - center) / width)
}

/// `sum over slices of |rho_hat(a)|^2`, evaluated directly from the
/// nu-samples rather than through the FFT grid.
pub fn age_density_at(rho: &DensityKernel, a: f64) -> f64 {
    let g = rho.grid();
    let c = g.nu_spacing() / (2.0 * PI).sqrt();
    let start = Complex64::from_polar(c, -g.nu(0) * a);
    let step = Complex64::from_polar(1.0, -g.nu_spacing() * a);
    compensated_sum(rho.slices().map(|slice| {
        let mut phase = start;
        let mut acc = Complex64::new(0.0, 0.0);
        for z in slice {
            acc += z * phase;
            phase *= step;
        }
        acc.norm_sqr()
    }))
}

/// Composite Simpson quadrature of [`age_density_at`] over `[lo, hi]` with
/// `steps` intervals (rounded up to even).
pub fn tail_mass_quadrature(rho: &DensityKernel, lo: f64, hi: f64, steps: usize) -> f64 {
    let steps = (steps.max(2) + 1) & !1;
    let h = (hi - lo) / steps as f64;
    let values: Vec<f64> = (0..=steps)
        .into_par_iter()
        .map(|i| {
            let w = if i == 0 || i == steps {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * age_density_at(rho, lo + i as f64 * h)
        })
        .collect();
    compensated_sum(values) * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::to_age;

    fn gaussian_kernel(n_nu: usize, nu_max: f64, center: f64) -> DensityKernel {
        let g = NuSigmaGrid::single_slice(nu_max, n_nu, nu_max).unwrap();
        reference_gaussian(&g, center, 1.0).unwrap()
    }

    fn quadrature_mass(rho: &DensityKernel, lo: f64, hi: f64, steps: usize) -> f64 {
        tail_mass_quadrature(rho, lo, hi, steps)
    }

    #[test]
    fn split_of_negative_support_state() {
        let g = NuSigmaGrid::single_slice(16.0, 512, 16.0).unwrap();
        let rep = AgeRepresentation::from_fn(g, |a, _, _, _| {
            Complex64::new(if a <= 0.0 { (-(a + 6.0) * (a + 6.0)).exp() } else { 0.0 }, 0.0)
        });
        let split = psi_split(&rep);
        assert_eq!(split.plus_mass(), 0.0);
        assert_eq!(split.minus, rep);
        assert_eq!(split.reconstruct(), rep);
    }

    #[test]
    fn even_gaussian_splits_evenly_up_to_zero_bin() {
        let rep = to_age(&gaussian_kernel(1024, 16.0, 0.0)).unwrap();
        let split = psi_split(&rep);
        let m = RegionMasses::of(&rep);
        assert!((split.plus_mass() - (split.minus_mass() - m.zero_bin)).abs() < 1e-14);
        assert!((split.plus_mass() + split.minus_mass() - rep.mass()).abs() < 1e-12);
        assert_eq!(split.reconstruct(), rep);
    }

    #[test]
    fn time_reversal_properties() {
        let rep = to_age(&gaussian_kernel(512, 16.0, -3.0)).unwrap();
        let k = time_reverse(&rep);
        assert_eq!(time_reverse(&k), rep);
        assert_eq!(k.mass(), rep.mass());
        let (m, mk) = (RegionMasses::of(&rep), RegionMasses::of(&k));
        assert_eq!(mk.positive, m.negative);
        assert_eq!(mk.negative, m.positive);
        assert_eq!(mk.zero_bin, m.zero_bin);
    }

    #[test]
    fn half_window_masses_match_direct_quadrature() {
        let rho = gaussian_kernel(256, 8.0, 0.7);
        let masses = HalfWindowMasses::new(&rho);
        let w = rho.grid().age_window();
        for t in [0.0, 0.5, 1.3] {
            let m = masses.at(t);
            let expect = quadrature_mass(&rho, t, t + w / 2.0, 40000);
            assert!((m.plus - expect).abs() < 1e-10, "t={t}: {} vs {expect}", m.plus);
            assert!((m.plus + m.minus - rho.norm_sqr()).abs() < 1e-13);
        }
    }

    #[test]
    fn plus_mass_follows_erfc_tail() {
        let rho = gaussian_kernel(4096, 16.0, 0.0);
        for t in [0.0, 1.0, 2.5] {
            let oracle = quadrature_mass(&rho, t, t + 12.0, 6000);
            let got = plus_mass(&rho, t).unwrap();
            assert!((got - oracle).abs() < 1e-6);
            assert!((got - gaussian_tail_mass(0.0, 1.0, t)).abs() < 1e-10);
        }
        assert!((plus_mass(&rho, 0.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn hardy_residual_and_projection_agree() {
        let rho = gaussian_kernel(1024, 16.0, 0.0);
        let below = hardy_residual(&rho, HardySide::Below).unwrap();
        let check = analytic_signal_check(&rho).unwrap();
        assert!((check * check - below).abs() < 1e-8);
        assert!((check - 0.5_f64.sqrt()).abs() < 0.1);

        let minus_state = gaussian_kernel(1024, 16.0, -8.0);
        assert!(hardy_residual(&minus_state, HardySide::Below).unwrap() < 1e-8);
        let zero = DensityKernel::zeros(*rho.grid());
        assert!(matches!(hardy_residual(&zero, HardySide::Above), Err(Error::ZeroState)));
        assert!(matches!(analytic_signal_check(&zero), Err(Error::ZeroState)));
    }

    #[test]
    fn exact_minus_state_has_zero_projection_residual() {
        let g = NuSigmaGrid::single_slice(16.0, 512, 16.0).unwrap();
        let rep = AgeRepresentation::from_fn(g, |a, _, _, _| {
            Complex64::new(if a <= 0.0 { (-(a + 5.0) * (a + 5.0)).exp() } else { 0.0 }, 0.0)
        });
        let rho = from_age(&rep);
        assert!(analytic_signal_check(&rho).unwrap() < 1e-12);
        assert!(hardy_residual(&rho, HardySide::Below).unwrap() < 1e-24);
        let reversed = from_age(&time_reverse(&rep));
        assert!(hardy_residual(&reversed, HardySide::Above).unwrap() < 1e-24);
    }

    #[test]
    fn sweep_rejects_bad_schedules_and_overflow() {
        let rho = gaussian_kernel(256, 16.0, 0.0);
        let cfg = SweepConfig::default();
        assert!(theorem_sweep(&rho, &[], &cfg).is_err());
        assert!(theorem_sweep(&rho, &[1.0, 1.0], &cfg).is_err());
        match theorem_sweep(&rho, &[0.0, 5.0, 30.0, 40.0], &cfg) {
            Err(Error::WindowOverflow { t, .. }) => assert_eq!(t, 30.0),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn sweep_certifies_gaussian() {
        let rho = gaussian_kernel(1024, 16.0, 0.0);
        let schedule: Vec<f64> = (0..=10).map(f64::from).collect();
        let report = theorem_sweep(&rho, &schedule, &SweepConfig::default()).unwrap();
        assert!(report.certified);
        assert!(report.max_plus_increase() <= 1e-12);
        assert!(report.conservation_defect() < 1e-10);
        assert_eq!(report.rows.len(), 11);
        let t_star = report.t_star.unwrap();
        assert!(t_star > 3.0 && t_star <= 10.0, "{t_star}");
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("t,plus_mass,minus_mass,hardy_residual\n"));
    }
}
