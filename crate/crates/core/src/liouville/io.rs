//! Self-describing CSV layout for kernels and age representations.
//!
//! ```text
//! # agelab-samples v1
//! # kind=density_kernel            (or age_representation)
//! # kernel=e^{-i nu a}
//! # nu_max=16
//! # n_nu=1024
//! # sigma_min=8
//! # sigma_max=8
//! # n_sigma=1
//! # channels=1
//! # hermitian=true                 (kernels only)
//! n,n_prime,sigma_index,grid_index,re,im
//! 0,0,0,0,1.2e-17,0
//! ...
//! ```
//!
//! Rows are row-major in `(n, n', sigma_index, grid_index)`, where the grid
//! index runs over nu for kernels and over the age variable for age
//! representations. The convention tag is mandatory on read.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::age::AgeRepresentation;
use super::grid::NuSigmaGrid;
use super::kernel::DensityKernel;
use crate::error::{Error, Result};

pub const CONVENTION_TAG: &str = "e^{-i nu a}";
const MAGIC: &str = "# agelab-samples v1";
const COLUMNS: &str = "n,n_prime,sigma_index,grid_index,re,im";

fn write_header<W: Write>(out: &mut W, kind: &str, g: &NuSigmaGrid, hermitian: Option<bool>) -> std::io::Result<()> {
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "# kind={kind}")?;
    writeln!(out, "# kernel={CONVENTION_TAG}")?;
    writeln!(out, "# nu_max={:.16e}", g.nu_max())?;
    writeln!(out, "# n_nu={}", g.n_nu())?;
    writeln!(out, "# sigma_min={:.16e}", g.sigma_min())?;
    writeln!(out, "# sigma_max={:.16e}", g.sigma_max())?;
    writeln!(out, "# n_sigma={}", g.n_sigma())?;
    writeln!(out, "# channels={}", g.channel_count())?;
    if let Some(h) = hermitian {
        writeln!(out, "# hermitian={h}")?;
    }
    writeln!(out, "{COLUMNS}")
}

fn write_rows<W: Write>(out: &mut W, g: &NuSigmaGrid, samples: &[Complex64]) -> std::io::Result<()> {
    for (slice, chunk) in samples.chunks(g.n_nu()).enumerate() {
        let (n, np, s) = g.slice_labels(slice);
        for (j, z) in chunk.iter().enumerate() {
            writeln!(out, "{n},{np},{s},{j},{:.16e},{:.16e}", z.re, z.im)?;
        }
    }
    Ok(())
}

pub fn write_kernel<W: Write>(mut out: W, rho: &DensityKernel) -> std::io::Result<()> {
    write_header(&mut out, "density_kernel", rho.grid(), Some(rho.hermitian_flag()))?;
    write_rows(&mut out, rho.grid(), rho.samples())
}

pub fn write_age<W: Write>(mut out: W, rep: &AgeRepresentation) -> std::io::Result<()> {
    write_header(&mut out, "age_representation", rep.grid(), None)?;
    write_rows(&mut out, rep.grid(), rep.samples())
}

struct Parsed {
    kind: String,
    grid: NuSigmaGrid,
    hermitian: bool,
    samples: Vec<Complex64>,
}

fn read<R: BufRead>(input: R) -> Result<Parsed> {
    let mut meta = HashMap::new();
    let mut lines = input.lines();
    let first = lines.next().transpose()?.unwrap_or_default();
    if first.trim() != MAGIC {
        return Err(Error::Parse(format!("missing `{MAGIC}` header")));
    }
    let mut saw_columns = false;
    for line in lines.by_ref() {
        let line = line?;
        if let Some(kv) = line.strip_prefix("# ") {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("malformed header line `{line}`")))?;
            meta.insert(k.trim().to_string(), v.trim().to_string());
        } else if line.trim() == COLUMNS {
            saw_columns = true;
            break;
        } else {
            return Err(Error::Parse(format!("unexpected line before column header: `{line}`")));
        }
    }
    if !saw_columns {
        return Err(Error::Parse("missing column header".into()));
    }
    match meta.get("kernel") {
        Some(tag) if tag == CONVENTION_TAG => {}
        Some(tag) => return Err(Error::Parse(format!("unsupported transform convention `{tag}`"))),
        None => return Err(Error::Parse("missing mandatory `kernel=` convention tag".into())),
    }
    let get = |k: &str| -> Result<&String> { meta.get(k).ok_or_else(|| Error::Parse(format!("missing header `{k}`"))) };
    let float = |k: &str| -> Result<f64> { get(k)?.parse().map_err(|_| Error::Parse(format!("bad `{k}`"))) };
    let int = |k: &str| -> Result<usize> { get(k)?.parse().map_err(|_| Error::Parse(format!("bad `{k}`"))) };
    let grid = NuSigmaGrid::new(
        float("nu_max")?,
        int("n_nu")?,
        float("sigma_min")?,
        float("sigma_max")?,
        int("n_sigma")?,
        int("channels")?,
    )?;
    let hermitian = meta.get("hermitian").map(|v| v == "true").unwrap_or(false);
    let kind = get("kind")?.clone();

    let mut samples = Vec::with_capacity(grid.len());
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Parse(format!("expected 6 fields: `{line}`")));
        }
        let idx: Vec<usize> = fields[..4]
            .iter()
            .map(|f| f.parse().map_err(|_| Error::Parse(format!("bad index in `{line}`"))))
            .collect::<Result<_>>()?;
        let expected = samples.len();
        let at = grid.slice_index(idx[0], idx[1], idx[2]) * grid.n_nu() + idx[3];
        if idx[0] >= grid.channel_count()
            || idx[1] >= grid.channel_count()
            || idx[2] >= grid.n_sigma()
            || idx[3] >= grid.n_nu()
            || at != expected
        {
            return Err(Error::Parse(format!("row out of order: `{line}`")));
        }
        let re: f64 = fields[4]
            .parse()
            .map_err(|_| Error::Parse(format!("bad value in `{line}`")))?;
        let im: f64 = fields[5]
            .parse()
            .map_err(|_| Error::Parse(format!("bad value in `{line}`")))?;
        samples.push(Complex64::new(re, im));
    }
    if samples.len() != grid.len() {
        return Err(Error::Parse(format!(
            "expected {} rows, found {}",
            grid.len(),
            samples.len()
        )));
    }
    Ok(Parsed {
        kind,
        grid,
        hermitian,
        samples,
    })
}

pub fn read_kernel<R: BufRead>(input: R) -> Result<DensityKernel> {
    let p = read(input)?;
    if p.kind != "density_kernel" {
        return Err(Error::Parse(format!("expected density_kernel, found {}", p.kind)));
    }
    DensityKernel::from_samples(p.grid, p.samples, p.hermitian)
}

pub fn read_age<R: BufRead>(input: R) -> Result<AgeRepresentation> {
    let p = read(input)?;
    if p.kind != "age_representation" {
        return Err(Error::Parse(format!("expected age_representation, found {}", p.kind)));
    }
    AgeRepresentation::from_samples(p.grid, p.samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::age::to_age;

    fn kernel() -> DensityKernel {
        let g = NuSigmaGrid::new(4.0, 16, 2.0, 3.0, 2, 2).unwrap();
        DensityKernel::from_fn(g, false, |nu, sigma, n, np| {
            Complex64::new((-nu * nu).exp() * sigma, (n + 2 * np) as f64 * 0.1)
        })
    }

    #[test]
    fn kernel_round_trip_is_bit_exact() {
        let rho = kernel();
        let mut buf = Vec::new();
        write_kernel(&mut buf, &rho).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("# kernel=e^{-i nu a}"));
        assert_eq!(read_kernel(buf.as_slice()).unwrap(), rho);
    }

    #[test]
    fn age_round_trip_and_kind_check() {
        let g = NuSigmaGrid::single_slice(8.0, 64, 8.0).unwrap();
        let rho = DensityKernel::from_fn(g, true, |nu, _, _, _| Complex64::new((-nu * nu).exp(), 0.0));
        let rep = to_age(&rho).unwrap();
        let mut buf = Vec::new();
        write_age(&mut buf, &rep).unwrap();
        assert_eq!(read_age(buf.as_slice()).unwrap(), rep);
        assert!(read_kernel(buf.as_slice()).is_err());
    }

    #[test]
    fn missing_convention_tag_is_rejected() {
        let mut buf = Vec::new();
        write_kernel(&mut buf, &kernel()).unwrap();
        let text = String::from_utf8(buf).unwrap().replace("# kernel=e^{-i nu a}\n", "");
        assert!(matches!(read_kernel(text.as_bytes()), Err(Error::Parse(_))));
        let mut buf = Vec::new();
        write_kernel(&mut buf, &kernel()).unwrap();
        let text = String::from_utf8(buf).unwrap().replace("e^{-i nu a}", "e^{+i nu a}");
        assert!(read_kernel(text.as_bytes()).is_err());
    }
}
