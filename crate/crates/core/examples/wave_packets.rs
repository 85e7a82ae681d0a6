//! Energy wave packets and the density kernel they build in Riesz
//! coordinates.
//!
//! cargo run --example wave_packets

use agelab::liouville::{
    build_kernel, energy_expectation, hamiltonian_apply, make_packet, EnergyGrid, KernelComponent, NuSigmaGrid, Profile,
};

fn main() -> agelab::Result<()> {
    let energy = EnergyGrid::single_channel(20.0, 1024)?;
    let f = make_packet(&Profile::gaussian(8.0, 0.8), &energy, 0)?.normalized()?;
    let g = make_packet(
        &Profile::GaussianMonomial {
            amplitude: 1.0,
            power: 2,
            center: 9.0,
            width: 0.6,
        },
        &energy,
        0,
    )?
    .normalized()?;
    println!("<f|f> = {:.12}", f.inner(&f)?.re);
    println!("<f|g> = {:.12}", f.inner(&g)?);
    println!("<f|H f> = {:.12}", f.inner(&hamiltonian_apply(&f))?.re);
    println!("<H>_g = {:.12}", energy_expectation(&g)?);

    let grid = NuSigmaGrid::new(16.0, 1024, 3.0, 14.0, 89, 1)?;
    let rho = build_kernel(&[KernelComponent::pure(0.3, f), KernelComponent::pure(0.7, g)], &grid)?;
    println!("kernel ||rho||^2 = {:.12}", rho.norm_sqr());
    println!("trace over sigma = {:.8}", rho.trace());
    println!("hermiticity defect = {:e}", rho.hermiticity_defect());
    println!("tail ratio = {:e}", rho.tail_ratio());
    Ok(())
}
