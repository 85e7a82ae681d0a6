use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::grid::EnergyGrid;
use crate::error::{Error, Result};
use crate::numerics::{compensated_sum_complex, simpson_weights};

/// Tail bound used when none is configured: relative to the packet's peak.
pub const DEFAULT_DECAY_THRESHOLD: f64 = 1e-10;

/// Analytic energy profiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Profile {
    /// `amplitude * omega^power * exp(-(omega - center)^2 / (2 width^2))`.
    GaussianMonomial {
        amplitude: f64,
        power: u32,
        center: f64,
        width: f64,
    },
    Superposition {
        parts: Vec<Profile>,
    },
}

impl Profile {
    pub fn gaussian(center: f64, width: f64) -> Self {
        Profile::GaussianMonomial {
            amplitude: 1.0,
            power: 0,
            center,
            width,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Profile::GaussianMonomial {
                amplitude,
                center,
                width,
                ..
            } => {
                if !(amplitude.is_finite() && center.is_finite() && width.is_finite()) || *width <= 0.0 {
                    return Err(Error::Domain(format!("invalid gaussian-monomial profile {self:?}")));
                }
                Ok(())
            }
            Profile::Superposition { parts } => parts.iter().try_for_each(Profile::validate),
        }
    }

    pub fn eval(&self, omega: f64) -> f64 {
        match self {
            Profile::GaussianMonomial {
                amplitude,
                power,
                center,
                width,
            } => {
                let d = (omega - center) / width;
                amplitude * omega.powi(*power as i32) * (-0.5 * d * d).exp()
            }
            Profile::Superposition { parts } => parts.iter().map(|p| p.eval(omega)).sum(),
        }
    }
}

/// Sampled energy-space wave function `f(omega) = <omega, n | psi>` of one channel.
#[derive(Clone, Debug, PartialEq)]
pub struct WavePacket {
    grid: EnergyGrid,
    channel: usize,
    samples: Vec<Complex64>,
}

impl WavePacket {
    /// Wraps raw samples, checking the length and channel only.
    pub fn from_samples(grid: EnergyGrid, channel: usize, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {}",
                samples.len(),
                grid.len()
            )));
        }
        if channel >= grid.channel_count() {
            return Err(Error::Domain(format!(
                "channel {channel} out of range for {} channels",
                grid.channel_count()
            )));
        }
        Ok(WavePacket { grid, channel, samples })
    }

    pub fn grid(&self) -> &EnergyGrid {
        &self.grid
    }

    pub fn channel(&self) -> usize {
        self.channel
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Largest magnitude in the outer 10% of the grid divided by the peak
    /// magnitude (0 for the zero packet).
    pub fn tail_ratio(&self) -> f64 {
        let peak = self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let tail = self.samples[self.grid.tail_start()..]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        tail / peak
    }

    pub fn check_decay(&self, threshold: f64) -> Result<()> {
        let magnitude = self.tail_ratio();
        if magnitude > threshold {
            return Err(Error::DecayViolation { magnitude, threshold });
        }
        Ok(())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner(self).map(|z| z.re).expect("same grid")
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(self.scaled(1.0 / n))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        WavePacket {
            grid: self.grid,
            channel: self.channel,
            samples: self.samples.iter().map(|z| z * factor).collect(),
        }
    }

    /// `<self | other>` with Simpson weights; zero across different channels.
    pub fn inner(&self, other: &WavePacket) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("packets live on different energy grids".into()));
        }
        if self.channel != other.channel {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let w = simpson_weights(self.grid.len(), self.grid.spacing());
        Ok(compensated_sum_complex(
            self.samples
                .iter()
                .zip(&other.samples)
                .zip(&w)
                .map(|((a, b), w)| a.conj() * b * w),
        ))
    }

    /// Band-limited interpolant of the samples.
    pub fn interpolator(&self) -> PacketInterpolator {
        PacketInterpolator::new(self)
    }
}

/// Samples a profile into a packet on `grid` for `channel`.
pub fn make_packet(profile: &Profile, grid: &EnergyGrid, channel: usize) -> Result<WavePacket> {
    make_packet_with_threshold(profile, grid, channel, DEFAULT_DECAY_THRESHOLD)
}

pub fn make_packet_with_threshold(
    profile: &Profile,
    grid: &EnergyGrid,
    channel: usize,
    decay_threshold: f64,
) -> Result<WavePacket> {
    profile.validate()?;
    let samples = grid.omegas().map(|w| Complex64::new(profile.eval(w), 0.0)).collect();
    let packet = WavePacket::from_samples(*grid, channel, samples)?;
    packet.check_decay(decay_threshold)?;
    Ok(packet)
}

/// `H psi`: multiplication by the energy.
pub fn hamiltonian_apply(psi: &WavePacket) -> WavePacket {
    WavePacket {
        grid: psi.grid,
        channel: psi.channel,
        samples: psi.samples.iter().zip(psi.grid.omegas()).map(|(z, w)| z * w).collect(),
    }
}

/// `<phi | psi>` for states given as collections of channel packets.
pub fn inner_product(phi: &[WavePacket], psi: &[WavePacket]) -> Result<Complex64> {
    let mut terms = Vec::with_capacity(phi.len() * psi.len());
    for a in phi {
        for b in psi {
            terms.push(a.inner(b)?);
        }
    }
    Ok(compensated_sum_complex(terms))
}

/// `<psi|H|psi> / <psi|psi>`.
pub fn energy_expectation(psi: &WavePacket) -> Result<f64> {
    let norm = psi.norm_sqr();
    if norm == 0.0 {
        return Err(Error::ZeroState);
    }
    Ok(psi.inner(&hamiltonian_apply(psi))?.re / norm)
}

/// Cosine-series interpolant of a packet's even extension about `omega = 0`.
///
/// The even extension has no jump at the origin, so profiles with
/// `f(0) != 0` interpolate without Gibbs ringing from that end. Outside
/// `[0, omega_max]` the interpolant is taken to be zero.
#[derive(Clone, Debug)]
pub struct PacketInterpolator {
    omega_max: f64,
    coefficients: Vec<Complex64>,
}

impl PacketInterpolator {
    fn new(packet: &WavePacket) -> Self {
        let m = packet.samples.len();
        let l = 2 * (m - 1);
        let mut buf: Vec<Complex64> = Vec::with_capacity(l);
        buf.extend_from_slice(&packet.samples);
        buf.extend(packet.samples[1..m - 1].iter().rev());
        FftPlanner::new().plan_fft_forward(l).process(&mut buf);
        let scale = 1.0 / l as f64;
        let coefficients = (0..m)
            .map(|k| {
                let weight = if k == 0 || k == m - 1 { 1.0 } else { 2.0 };
                buf[k] * (weight * scale)
            })
            .collect();
        PacketInterpolator {
            omega_max: packet.grid.omega_max(),
            coefficients,
        }
    }

    pub fn eval(&self, omega: f64) -> Complex64 {
        if !(0.0..=self.omega_max).contains(&omega) {
            return Complex64::new(0.0, 0.0);
        }
        // Clenshaw recurrence for sum_k c_k cos(k theta).
        let theta = std::f64::consts::PI * omega / self.omega_max;
        let two_cos = 2.0 * theta.cos();
        let mut b1 = Complex64::new(0.0, 0.0);
        let mut b2 = Complex64::new(0.0, 0.0);
        for c in self.coefficients[1..].iter().rev() {
            let b0 = c + b1 * two_cos - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coefficients[0] + b1 * theta.cos() - b2
    }
}
