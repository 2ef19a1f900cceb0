//! `pueb mub-gen` and `pueb tomo`.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use pueb::density::{random_density_matrix, seeded_rng};
use pueb::finite_field::Field;
use pueb::io::{basis_to_json, density_from_json, density_to_json, prob_table_to_json};
use pueb::mub::{all_mubs, all_mubs_pp, verify_unbiased, BasisLabel};
use pueb::tomography::{exact_table, reconstruct_single, reconstruct_two, sample_table, settings_for, Scheme};
use serde::Serialize;

use crate::dims::Dim;
use crate::report::{Check, RunReport};

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

fn basis_file_name(label: BasisLabel) -> String {
    match label {
        BasisLabel::Computational => "basis_computational.json".into(),
        BasisLabel::Structured(b) => format!("basis_b{b}.json"),
    }
}

#[derive(Serialize)]
struct Manifest {
    format: u32,
    dim: u32,
    p: u32,
    n: u32,
    files: Vec<String>,
}

/// Writes the d + 1 bases and `manifest.json` into `out`.
pub fn mub_gen(dim: Dim, out: &Path) -> Result<RunReport> {
    let bases = if dim.is_prime() { all_mubs(dim.d)? } else { all_mubs_pp(&Field::new(dim.p, dim.n)?)? };
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut files = Vec::with_capacity(bases.len());
    for basis in &bases {
        let name = basis_file_name(basis.label);
        write(out, &name, &basis_to_json(basis))?;
        files.push(name);
    }
    let manifest = Manifest { format: pueb::io::FORMAT_VERSION, dim: dim.d, p: dim.p, n: dim.n, files };
    write(out, "manifest.json", &(serde_json::to_string_pretty(&manifest)? + "\n"))?;

    let mut report = RunReport::new("mub-gen", dim.d);
    report.push(Check::count("basis_files", bases.len() as u64, dim.d as u64 + 1));
    let mut cross: f64 = 0.0;
    for (i, a) in bases.iter().enumerate() {
        for b in &bases[i + 1..] {
            cross = cross.max(verify_unbiased(a, b)?.max_dev);
        }
    }
    report.push(Check::new("unbiased", cross, 1e-10));
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Single,
    TwoPartite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shots {
    Exact,
    Count(u64),
}

pub fn parse_shots(s: &str) -> Result<Shots, String> {
    if s == "exact" {
        return Ok(Shots::Exact);
    }
    match s.parse::<u64>() {
        Ok(0) => Err("shots must be at least 1".into()),
        Ok(n) => Ok(Shots::Count(n)),
        Err(_) => Err(format!("expected \"exact\" or a positive integer, got {s:?}")),
    }
}

/// Where the true state comes from. Random states are full-rank, drawn with `TomoArgs::seed`.
#[derive(Debug, Clone)]
pub enum StateSource {
    Random,
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub struct TomoArgs {
    pub dim: Dim,
    pub scheme: SchemeArg,
    pub state: StateSource,
    /// Seeds the random state and the sampling streams.
    pub seed: u64,
    pub shots: Shots,
    pub out: PathBuf,
}

/// Round trip: state, probabilities (exact or sampled), reconstruction.
/// Writes `true_state.json`, `probabilities.json`, `reconstructed.json` and `summary.json`.
pub fn tomo(args: &TomoArgs) -> Result<RunReport> {
    let d = args.dim.d;
    let scheme = match args.scheme {
        SchemeArg::Single => Scheme::SingleMub,
        SchemeArg::TwoPartite => Scheme::TwoPartite,
    };
    if !args.dim.is_prime() {
        bail!("tomography needs a prime dimension, got {d}");
    }
    if scheme == Scheme::TwoPartite && !args.dim.two_particle() {
        bail!("two-partite tomography needs d in 3, 5, 7, got {d}");
    }
    let total = match scheme {
        Scheme::SingleMub => d as usize,
        Scheme::TwoPartite => (d * d) as usize,
    };
    let rho = match &args.state {
        StateSource::Random => random_density_matrix(total, total, &mut seeded_rng(args.seed)),
        StateSource::File(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let rho = density_from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
            if rho.dim() != total {
                bail!("state in {} has dimension {}, expected {total}", path.display(), rho.dim());
            }
            rho
        }
    };
    let table = match args.shots {
        Shots::Exact => exact_table(&rho, d, scheme)?,
        Shots::Count(n) => sample_table(&rho, d, scheme, n, args.seed)?,
    };
    let recon = match scheme {
        Scheme::SingleMub => reconstruct_single(d, &table)?,
        Scheme::TwoPartite => reconstruct_two(d, &table)?,
    };
    let error = recon.max_norm_diff(&rho);

    let mut report = RunReport::new("tomo", d);
    report.push(Check::count("settings_used", table.settings_used() as u64, settings_for(d, scheme).len() as u64));
    report.push(Check::new("trace", (recon.trace() - 1.0).abs(), 1e-10));
    report.push(Check::new("hermiticity", recon.hermiticity_dev(), 1e-8));
    match args.shots {
        Shots::Exact => report.push(Check::new("round_trip", error, 1e-10)),
        Shots::Count(n) => {
            report.metrics.insert("shots".into(), n as f64);
        }
    }
    report.metrics.insert("reconstruction_error".into(), error);
    report.metrics.insert("min_eigenvalue".into(), recon.min_eigenvalue());
    report.metrics.insert("settings_used".into(), table.settings_used() as f64);

    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write(&args.out, "true_state.json", &density_to_json(&rho))?;
    write(&args.out, "probabilities.json", &prob_table_to_json(&table))?;
    write(&args.out, "reconstructed.json", &density_to_json(&recon))?;
    write(&args.out, "summary.json", &report.to_json_stable())?;
    Ok(report)
}
