//! Continuous-spectrum machinery: energy wave packets, density kernels in
//! Riesz coordinates, the Liouvillian, the age operator, and transport
//! between the nu-line and the age line.

mod age;
mod grid;
pub mod io;
mod kernel;
mod packet;
mod transform;

pub(crate) use age::to_age_unchecked;
pub use age::{
    evolve_age, evolve_age_with_tolerance, from_age, pointwise_sup_after, to_age, to_age_with_threshold,
    AgeRepresentation, DEFAULT_WINDOW_TOLERANCE,
};
pub use grid::{EnergyGrid, NuSigmaGrid};
pub use kernel::{
    age_apply_continuous, age_apply_continuous_with_threshold, build_kernel, commutator_residual, evolve_nu,
    liouvillian_apply, riesz_forward, riesz_inverse, DensityKernel, KernelComponent,
};
pub use packet::{
    energy_expectation, hamiltonian_apply, inner_product, make_packet, make_packet_with_threshold, PacketInterpolator,
    Profile, WavePacket, DEFAULT_DECAY_THRESHOLD,
};
pub use transform::SliceTransform;
