//! Experiment runners. Each writes its tables into the output directory and
//! returns a [`RunSummary`]; `summary.json` and `checks.csv` are written for
//! every run.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentKind, StateSource};
use super::report::{CheckResult, Comparison, RunSummary};
use crate::baker::{BitTape, Cell, CylinderSpec, WalshExpansion};
use crate::error::{Error, Result};
use crate::hardy_continuous::{
    gaussian_tail_mass, reference_gaussian, tail_mass_quadrature, theorem_sweep, SweepConfig,
};
use crate::hardy_discrete::{
    absorption_time, convergence_table, minus_norm_after, verify_forward_stability, write_convergence_csv,
};
use crate::liouville::{
    build_kernel, commutator_residual, evolve_age_with_tolerance, evolve_nu, io, make_packet_with_threshold,
    to_age_with_threshold, DensityKernel, KernelComponent,
};
use crate::sampling::{random_expansion, random_plus_expansion, seeded_rng};

/// Output directory, seed and the directory relative paths in the config
/// resolve against.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub seed: u64,
    pub config_dir: Option<PathBuf>,
}

impl RunOptions {
    /// Command-line values take precedence over the config file.
    pub fn resolve(
        config: &ExperimentConfig,
        out: Option<PathBuf>,
        seed: Option<u64>,
        config_path: Option<&Path>,
    ) -> Result<Self> {
        let out_dir = out
            .or_else(|| config.output_dir.clone())
            .ok_or_else(|| Error::config("output_dir", "no output directory given (set it or pass --out)"))?;
        let seed = seed
            .or(config.seed)
            .ok_or_else(|| Error::config("seed", "no seed given (set it or pass --seed)"))?;
        Ok(RunOptions {
            out_dir,
            seed,
            config_dir: config_path.and_then(|p| p.parent().map(Path::to_path_buf)),
        })
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| Error::from(e).context(format!("creating {}", path.display())))
}

/// Runs one experiment and writes its artifacts.
pub fn run(kind: ExperimentKind, config: &ExperimentConfig, opts: &RunOptions) -> Result<RunSummary> {
    config.check_kind(kind)?;
    std::fs::create_dir_all(&opts.out_dir)
        .map_err(|e| Error::from(e).context(format!("creating {}", opts.out_dir.display())))?;
    let started = Instant::now();
    let checks = match kind {
        ExperimentKind::BakerVerify => baker_verify(config, opts),
        ExperimentKind::BakerConverge => baker_converge(config, opts),
        ExperimentKind::PacketsEvolve => packets_evolve(config, opts),
        ExperimentKind::Theorem => theorem(config, opts),
    }
    .map_err(|e| e.context(format!("experiment {kind}")))?;
    let summary = RunSummary::new(kind.name(), checks, started.elapsed().as_secs_f64(), opts.seed);
    let mut out = create(&opts.out_dir, "checks.csv")?;
    summary.write_checks_csv(&mut out)?;
    out.flush()?;
    let mut out = create(&opts.out_dir, "summary.json")?;
    writeln!(out, "{}", summary.to_json())?;
    out.flush()?;
    Ok(summary)
}

/// Every assignment of {absent, Left, Right} to the coordinates
/// `-radius..=radius` with between 1 and `depth` constraints.
fn count_cylinder_mismatches(radius: i64, depth: usize) -> Result<(u64, u64)> {
    let coords: Vec<i64> = (-radius..=radius).collect();
    let width = coords.len() as u32;
    let total = 3u64.pow(width);
    let (checked, bad) = (0..total)
        .into_par_iter()
        .map(|mut code| {
            let mut constraints = Vec::new();
            for &c in &coords {
                match code % 3 {
                    1 => constraints.push((c, Cell::Left)),
                    2 => constraints.push((c, Cell::Right)),
                    _ => {}
                }
                code /= 3;
            }
            if constraints.is_empty() || constraints.len() > depth {
                return (0, 0);
            }
            let d = constraints.len();
            let spec = CylinderSpec::new(constraints).expect("distinct coordinates");
            let expect = BigRational::new(BigInt::from(1), BigInt::from(1) << d);
            (1u64, u64::from(spec.measure() != expect))
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok((checked, bad))
}

/// Reads the cell of `B^{-n} w` for every `n` in the range from the real
/// x-coordinate of the iterated tape, and checks that it agrees with the
/// symbolic reading and that distinct tapes give distinct patterns, i.e.
/// every full cylinder over the range holds exactly one of the `2^(2r+1)`
/// dyadic tapes.
fn geometric_patterns_are_bijective(radius: i64) -> Result<bool> {
    let width = (2 * radius + 1) as usize;
    let x_len = radius as usize + 1;
    let mut seen = vec![false; 1 << width];
    for code in 0u32..(1 << width) {
        let bits: Vec<u8> = (0..width).map(|i| ((code >> i) & 1) as u8).collect();
        let tape = BitTape::new(&bits[..x_len], &bits[x_len..])?;
        let mut pattern = 0usize;
        for (i, n) in (-radius..=radius).enumerate() {
            let right = tape.iterate(-n)?.x() >= 0.5;
            if right != (tape.cell_at(n)? == Cell::Right) {
                return Ok(false);
            }
            if right {
                pattern |= 1 << i;
            }
        }
        if std::mem::replace(&mut seen[pattern], true) {
            return Ok(false);
        }
    }
    Ok(seen.into_iter().all(|s| s))
}

fn baker_verify(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<CheckResult>> {
    let b = &cfg.baker;
    let mut checks = Vec::new();

    let (checked, bad) = count_cylinder_mismatches(b.radius, b.depth)?;
    checks.push(CheckResult::new(
        "cylinder_measure_mismatches",
        bad as f64,
        Comparison::Equal,
        0.0,
    ));
    checks.push(CheckResult::flag("cylinder_specs_enumerated", checked > 0));
    checks.push(CheckResult::flag(
        "cylinder_geometry_bijective",
        geometric_patterns_are_bijective(b.radius.min(8))?,
    ));

    let mut rng = seeded_rng(opts.seed);
    let reach = (b.index_radius + b.shift_radius + 1) as usize;
    let mut duality_bad = 0u64;
    let mut age_residual_max = 0.0f64;
    let mut absorption_bad = 0u64;
    let mut stability_bad = 0u64;
    for _ in 0..b.samples {
        let rho = random_expansion(&mut rng, b.max_terms, -b.index_radius, b.index_radius);
        let tape = BitTape::random(&mut rng, reach + 1, reach);
        let n = rng.random_range(-b.shift_radius..=b.shift_radius);
        if rho.koopman_apply(n).evaluate(&tape)? != rho.evaluate(&tape.iterate(-n)?)? {
            duality_bad += 1;
        }
        age_residual_max = age_residual_max.max(rho.age_commutation_residual(n)?);
        let t = absorption_time(&rho)?;
        let scan = (0..)
            .find(|&m| minus_norm_after(&rho, m) == 0.0)
            .expect("finite expansion");
        let stays = (t..t + 4).all(|m| minus_norm_after(&rho, m) == 0.0);
        let sharp = t == 0 || minus_norm_after(&rho, t - 1) > 0.0;
        if scan != t || !stays || !sharp {
            absorption_bad += 1;
        }
        let plus = random_plus_expansion(&mut rng, b.max_terms, -b.index_radius, b.index_radius);
        if !verify_forward_stability(&plus)? {
            stability_bad += 1;
        }
    }
    checks.push(CheckResult::new(
        "koopman_duality_mismatches",
        duality_bad as f64,
        Comparison::Equal,
        0.0,
    ));
    checks.push(CheckResult::new(
        "age_commutation_residual_max",
        age_residual_max,
        Comparison::Equal,
        0.0,
    ));
    checks.push(CheckResult::new(
        "absorption_time_mismatches",
        absorption_bad as f64,
        Comparison::Equal,
        0.0,
    ));
    checks.push(CheckResult::new(
        "forward_stability_failures",
        stability_bad as f64,
        Comparison::Equal,
        0.0,
    ));

    if b.monte_carlo > 0 {
        let spec = CylinderSpec::new([(-2, Cell::Right), (0, Cell::Left), (3, Cell::Right)])?;
        let hits = (0..b.monte_carlo)
            .filter(|_| {
                spec.contains(&BitTape::random(&mut rng, 8, 8))
                    .expect("tape covers coordinates")
            })
            .count();
        let p = 0.125;
        let m = b.monte_carlo as f64;
        let z = (hits as f64 / m - p).abs() / (p * (1.0 - p) / m).sqrt();
        checks.push(CheckResult::new(
            "monte_carlo_cylinder_z_score",
            z,
            Comparison::Below,
            4.0,
        ));
    }
    Ok(checks)
}

fn baker_converge(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<CheckResult>> {
    let rho = cfg.walsh_expansion(opts.config_dir.as_deref())?;
    if rho.is_zero() {
        return Err(Error::config("walsh", "expansion has no terms"));
    }
    let rows = convergence_table(&rho, cfg.baker.steps);
    let mut out = create(&opts.out_dir, "convergence.csv")?;
    write_convergence_csv(&mut out, &rows)?;
    out.flush()?;
    let mut out = create(&opts.out_dir, "expansion.txt")?;
    out.write_all(rho.to_text().as_bytes())?;
    out.flush()?;

    let total = rho.norm_sqr();
    let conservation = rows
        .iter()
        .map(|r| (r.plus_norm * r.plus_norm + r.minus_norm * r.minus_norm - total).abs() / total)
        .fold(0.0, f64::max);
    let mut checks = vec![
        CheckResult::flag(
            "minus_norm_nonincreasing",
            rows.windows(2).all(|w| w[1].minus_norm <= w[0].minus_norm),
        ),
        CheckResult::new("norm_conservation_defect", conservation, Comparison::AtMost, 1e-12),
    ];
    // Convergence is claimed for the mean-zero part only.
    let mean_zero: WalshExpansion = rho.filter(|f| !f.is_empty());
    if !mean_zero.is_zero() {
        let t = absorption_time(&mean_zero)?;
        let scan = (0..)
            .find(|&m| minus_norm_after(&mean_zero, m) == 0.0)
            .expect("finite expansion");
        checks.push(CheckResult::new(
            "absorption_time",
            t as f64,
            Comparison::Equal,
            scan as f64,
        ));
        let residual = (t..=t.max(cfg.baker.steps))
            .map(|m| minus_norm_after(&mean_zero, m))
            .fold(0.0, f64::max);
        checks.push(CheckResult::new(
            "minus_norm_after_absorption",
            residual,
            Comparison::Equal,
            0.0,
        ));
    }
    Ok(checks)
}

fn packet_kernel(cfg: &ExperimentConfig, nu_grid: &crate::liouville::NuSigmaGrid) -> Result<DensityKernel> {
    if cfg.packets.is_empty() {
        return Err(Error::config("packets", "at least one packet is required"));
    }
    let energy = cfg.energy_grid()?;
    let components = cfg
        .packets
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let packet = make_packet_with_threshold(&p.profile, &energy, p.channel, cfg.thresholds.decay)
                .and_then(|w| w.normalized())
                .map_err(|e| e.context(format!("packets[{i}]")))?;
            Ok(KernelComponent::pure(p.weight, packet))
        })
        .collect::<Result<Vec<_>>>()?;
    build_kernel(&components, nu_grid)
}

fn packets_evolve(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<CheckResult>> {
    let th = &cfg.thresholds;
    let grid = cfg.nu_grid()?;
    let schedule = cfg.schedule()?;
    let rho = packet_kernel(cfg, &grid)?;
    let mut out = create(&opts.out_dir, "kernel.csv")?;
    io::write_kernel(&mut out, &rho)?;
    out.flush()?;

    let mass = rho.norm_sqr();
    if mass == 0.0 {
        return Err(Error::ZeroState);
    }
    let norm = mass.sqrt();
    let initial_age = to_age_with_threshold(&rho, th.decay)?;
    let rows = schedule
        .par_iter()
        .map(|&t| {
            let evolved = evolve_nu(&rho, t);
            let defect = (evolved.norm_sqr() - mass).abs() / mass;
            let via_age = evolve_age_with_tolerance(&initial_age, t, th.window)?;
            let via_nu = to_age_with_threshold(&evolved, th.decay)?;
            Ok((t, evolved.norm_sqr(), defect, via_nu.distance(&via_age)? / norm))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = create(&opts.out_dir, "evolution.csv")?;
    writeln!(out, "t,mass,mass_defect,two_route_error")?;
    for (t, m, d, e) in &rows {
        writeln!(out, "{t:.16e},{m:.16e},{d:.16e},{e:.16e}")?;
    }
    out.flush()?;

    Ok(vec![
        CheckResult::new("kernel_tail_ratio", rho.tail_ratio(), Comparison::AtMost, th.decay),
        CheckResult::new(
            "hermiticity_defect",
            rho.hermiticity_defect(),
            Comparison::AtMost,
            1e-12,
        ),
        CheckResult::new(
            "commutator_residual",
            commutator_residual(&rho)?,
            Comparison::Below,
            th.commutator,
        ),
        CheckResult::new(
            "unitarity_defect_max",
            rows.iter().map(|r| r.2).fold(0.0, f64::max),
            Comparison::AtMost,
            th.unitarity,
        ),
        CheckResult::new(
            "two_route_error_max",
            rows.iter().map(|r| r.3).fold(0.0, f64::max),
            Comparison::AtMost,
            th.two_route,
        ),
    ])
}

fn theorem(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<CheckResult>> {
    let th = &cfg.thresholds;
    let state = cfg
        .state
        .as_ref()
        .ok_or_else(|| Error::config("state", "a [state] section is required"))?;
    let schedule = cfg.schedule()?;
    let (rho, gaussian) = match state.source {
        StateSource::Gaussian => {
            let center = state.center.unwrap_or(0.0);
            let width = state.width.unwrap_or(1.0);
            let grid = cfg.nu_grid_or_single()?;
            (reference_gaussian(&grid, center, width)?, Some((center, width)))
        }
        StateSource::Packets => (packet_kernel(cfg, &cfg.nu_grid()?)?, None),
    };
    let sweep = theorem_sweep(
        &rho,
        &schedule,
        &SweepConfig {
            certification_threshold: th.certification,
            window_tolerance: th.window,
            decay_threshold: th.decay,
        },
    )?;
    let mut out = create(&opts.out_dir, "sweep.csv")?;
    sweep.write_csv(&mut out)?;
    out.flush()?;
    let mut out = create(&opts.out_dir, "sweep_summary.json")?;
    let summary = serde_json::to_string_pretty(&sweep.summary(opts.seed)).map_err(std::io::Error::from)?;
    writeln!(out, "{summary}")?;
    out.flush()?;

    // Independent oracle: Simpson quadrature of the initial age density,
    // evaluated directly from the nu-samples, up to where it is negligible.
    let initial = to_age_with_threshold(&rho, th.decay)?;
    let g = initial.grid();
    let peak = (0..g.n_nu())
        .map(|k| initial.slices().map(|s| s[k].norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max);
    let support_end = (0..g.n_nu())
        .rev()
        .find(|&k| initial.slices().map(|s| s[k].norm_sqr()).sum::<f64>() > 1e-26 * peak)
        .map(|k| (g.age(k) + 2.0).min(g.age_window() / 2.0))
        .unwrap_or(0.0);
    let oracle_error = sweep
        .rows
        .iter()
        .map(|r| {
            let oracle = if r.t >= support_end {
                0.0
            } else {
                let steps = ((support_end - r.t) / 2e-3).ceil() as usize;
                tail_mass_quadrature(&rho, r.t, support_end, steps)
            };
            (r.plus_mass - oracle).abs()
        })
        .fold(0.0, f64::max);

    let last = sweep.rows.last().expect("nonempty schedule");
    let mut checks = vec![
        CheckResult::new("tail_oracle_max_error", oracle_error, Comparison::AtMost, th.oracle),
        CheckResult::new(
            "plus_mass_max_increase",
            sweep.max_plus_increase(),
            Comparison::AtMost,
            1e-12,
        ),
        CheckResult::new(
            "conservation_defect",
            sweep.conservation_defect() / sweep.initial_mass,
            Comparison::AtMost,
            1e-10,
        ),
        CheckResult::new(
            "final_plus_mass_fraction",
            last.plus_mass / sweep.initial_mass,
            Comparison::Below,
            th.certification,
        ),
        CheckResult::new(
            "final_hardy_residual",
            last.hardy_residual,
            Comparison::Below,
            th.certification,
        ),
        CheckResult::flag("certified", sweep.certified),
    ];
    if let Some((center, width)) = gaussian {
        let slices = (g.channel_count() * g.n_sigma()) as f64;
        let err = sweep
            .rows
            .iter()
            .map(|r| (r.plus_mass - slices * gaussian_tail_mass(center, width, r.t)).abs())
            .fold(0.0, f64::max);
        checks.insert(
            1,
            CheckResult::new("erfc_oracle_max_error", err, Comparison::AtMost, th.oracle),
        );
    }
    Ok(checks)
}
