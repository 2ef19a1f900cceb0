//! `pueb verify` suites.

use anyhow::{bail, Result};
use clap::ValueEnum;
use pueb::entangled::{
    all_entangled_bases, basis_deviation, classify_all, eigen_check, entanglement_dev, overlap_structure, project_mub,
    project_pp, projection_label_collisions, EntangledLabel,
};
use pueb::finite_field::Field;
use pueb::mub::{
    all_mubs, all_mubs_pp, clock_spectral_data, eigen_relation_dev, spectral_data, verify_completeness,
    verify_unbiased, MubBasis,
};
use pueb::schwinger::{canonical_form, monomial, MonomialLabel, WeylOperator};
use pueb::tomography::{measurement_count, CountScheme};

use crate::dims::Dim;
use crate::report::{Check, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Mub,
    Entangled,
    Count,
    Completeness,
    All,
}

fn unbiased_checks(report: &mut RunReport, bases: &[MubBasis], d: u32) -> Result<()> {
    report.push(Check::count("mub.basis_count", bases.len() as u64, d as u64 + 1));
    let (mut cross, mut gram) = (0.0f64, 0.0f64);
    for (i, a) in bases.iter().enumerate() {
        for b in &bases[i..] {
            let r = verify_unbiased(a, b)?;
            if r.same_basis {
                gram = gram.max(r.max_dev);
            } else {
                cross = cross.max(r.max_dev);
            }
        }
    }
    report.push(Check::new("mub.unbiased", cross, 1e-10));
    report.push(Check::new("mub.orthonormal", gram, 1e-12));
    Ok(())
}

fn mub_suite(report: &mut RunReport, dim: Dim) -> Result<()> {
    if !dim.is_prime() {
        let field = Field::new(dim.p, dim.n)?;
        unbiased_checks(report, &all_mubs_pp(&field)?, dim.d)?;
        let projection = projection_pp_dev(&field)?;
        report.push(Check::new("mub.entangled_projection", projection, 1e-10));
        return Ok(());
    }
    let d = dim.d;
    unbiased_checks(report, &all_mubs(d)?, d)?;
    let eig = (0..d).map(|b| eigen_relation_dev(d, b)).collect::<pueb::error::Result<Vec<_>>>()?;
    report.push(Check::new("mub.eigenbasis_of_xz^b", eig.into_iter().fold(0.0, f64::max), 1e-12));

    let ops: Vec<WeylOperator> =
        (0..d).flat_map(|m| (0..d).map(move |l| WeylOperator::shift_clock(d, m as i64, l as i64))).collect();
    let mut hs: f64 = 0.0;
    for (i, a) in ops.iter().enumerate() {
        for (j, b) in ops.iter().enumerate() {
            let target = if i == j { d as f64 } else { 0.0 };
            hs = hs.max((a.hs_inner(b) - target).norm());
        }
    }
    report.push(Check::new("mub.monomial_hs_orthogonality", hs, 1e-12));

    let field = Field::new(d, 1)?;
    let mut canon: f64 = 0.0;
    for m in 1..d {
        for l in 0..d {
            let lab = MonomialLabel { m, l };
            canon = canon.max(canonical_form(&field, lab)?.to_unitary(d).max_abs_diff(&monomial(d, lab)));
        }
    }
    report.push(Check::new("mub.canonical_form", canon, 1e-12));
    Ok(())
}

/// Exhaustive up to d = 9; above that, `b1` and `c1` run over the first three elements.
fn projection_pp_dev(field: &Field) -> Result<f64> {
    let limit = if field.order() <= 9 { field.order() as usize } else { 3 };
    let mut worst: f64 = 0.0;
    for b in field.elements() {
        for c in field.elements() {
            for b1 in field.elements().take(limit) {
                for c1 in field.elements().take(limit) {
                    worst = worst.max(project_pp(field, &b, &c, &b1, &c1)?.deviation);
                }
            }
        }
    }
    Ok(worst)
}

fn entangled_suite(report: &mut RunReport, d: u32) -> Result<()> {
    let bases = all_entangled_bases(d)?;
    report.push(Check::count("entangled.basis_count", bases.len() as u64, (d * (d - 1)) as u64));
    let (mut gram, mut res, mut ent) = (0.0f64, 0.0f64, 0.0f64);
    for basis in &bases {
        let (g, r) = basis_deviation(basis);
        gram = gram.max(g);
        res = res.max(r);
        for psi in &basis.states {
            ent = ent.max(entanglement_dev(psi, d)?);
        }
    }
    report.push(Check::new("entangled.orthonormal", gram, 1e-12));
    report.push(Check::new("entangled.complete", res, 1e-12));
    report.push(Check::new("entangled.reduced_states_maximally_mixed", ent, 1e-12));

    let ov = overlap_structure(d)?;
    report.push(Check::new("entangled.overlap_same_basis", ov.case_same, 1e-10).with_detail("orthonormal"));
    report.push(Check::new("entangled.overlap_same_s", ov.case_s_equal, 1e-10).with_detail("delta_{c2 c2'}/sqrt(d)"));
    report.push(Check::new("entangled.overlap_different_s", ov.case_full, 1e-10).with_detail("1/d"));
    if ov.c1c2_delta_dev > 1e-10 {
        report.findings.push(format!(
            "same-basis overlaps are delta_{{c1 c1'}} delta_{{c2 c2'}}; the reading delta_{{c1 c2}} is off by {:.3}",
            ov.c1c2_delta_dev
        ));
    }

    let mut proj: f64 = 0.0;
    for b in 0..d {
        for c1 in 0..d {
            let lab = EntangledLabel::new(d, b, 1, c1, 0)?;
            for b1 in 0..d {
                for c in 0..d {
                    proj = proj.max(project_mub(d, b1, c, lab)?.deviation);
                }
            }
        }
    }
    report
        .push(Check::new("entangled.projection", proj, 1e-10).with_detail("<b1;c| |b,1;c1,0> = |b-b1; c1-c>/sqrt(d)"));
    let collisions = projection_label_collisions(d);
    report.findings.push(format!(
        "projected label b - b1 equals b1 for {} of {} pairs (b = 2 b1 mod d)",
        collisions.len(),
        d * d
    ));

    let (mut eig1, mut resid, mut eig2, mut sbc2_mismatch, mut total) = (0.0f64, 0.0f64, 0.0f64, 0usize, 0usize);
    for s in 1..d {
        for b in 0..d {
            for c1 in 0..d {
                for c2 in 0..d {
                    let r = eigen_check(d, EntangledLabel::new(d, b, s, c1, c2)?)?;
                    eig1 = eig1.max(r.eig1_dev);
                    resid = resid.max(r.residual1.max(r.residual2));
                    let k = ((c1 + s * b % d * c2) % d) as i64;
                    eig2 = eig2.max((r.eig2 - pueb::schwinger::omega(d, k)).norm());
                    total += 1;
                    if !r.matches_sbc2() {
                        sbc2_mismatch += 1;
                    }
                }
            }
        }
    }
    report.push(Check::new("entangled.eigenvalue_zz", eig1, 1e-12).with_detail("w^{-c2}"));
    report.push(Check::new("entangled.eigenvalue_xx", eig2, 1e-10).with_detail("w^{c1 + s b c2}"));
    report.push(Check::new("entangled.eigen_residual", resid, 1e-10));
    if sbc2_mismatch > 0 {
        report.findings.push(format!(
            "X (x) X^s Z^(sb) eigenvalue is w^(c1 + s b c2); the form w^(s b c2) fails for {sbc2_mismatch} of {total} labels (all with c1 != 0)"
        ));
    }
    Ok(())
}

fn count_suite(report: &mut RunReport, d: u32) -> Result<()> {
    let p = classify_all(d)?;
    let sizes = |v: [usize; 4]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("/");
    let size_dev: usize = p.family_sizes.iter().zip(&p.expected_family_sizes).map(|(a, b)| a.abs_diff(*b)).sum();
    report.push(Check::new("count.family_sizes", size_dev as f64, 0.5).with_detail(format!(
        "{} (expected {})",
        sizes(p.family_sizes),
        sizes(p.expected_family_sizes)
    )));
    let d4 = (d as u64).pow(4);
    report.push(Check::count("count.total_labels", p.total_labels as u64, d4));
    report.push(Check::count("count.grouped_total", p.grouped_total as u64, d4));
    report.push(Check::count("count.reparameterized", p.reparameterized as u64, (d as u64 * (d as u64 - 1)).pow(2)));
    report.push(
        Check::count("count.z_partition", p.z_partition_sizes.iter().sum::<usize>() as u64, (d * d) as u64)
            .with_detail(sizes(p.z_partition_sizes)),
    );
    report.push(Check::count("count.clusters", p.cluster_count as u64, (d * (d - 1)) as u64));
    report.push(Check::count("count.cluster_size", p.cluster_size as u64, (d * d) as u64));
    report.push(Check::new("count.cluster_commutators", p.max_commutator_norm, 1e-12));
    report.push(Check::new("count.cluster_hs_orthogonality", p.max_hs_dev, 1e-12));
    report.push(Check::new("count.cluster_eigenbasis", p.max_eigenbasis_dev, 1e-10));

    let expected = [
        ("single_mub", CountScheme::SingleMub, d + 1),
        ("two_partite_full_mub", CountScheme::TwoPartiteFullMub, d * d + 1),
        ("two_partite_entangled", CountScheme::TwoPartiteEntangled, d * d + d + 1),
        ("product_single_mub", CountScheme::ProductSingleMub, (d + 1) * (d + 1)),
    ];
    for (name, scheme, want) in expected {
        report.push(Check::count(format!("count.measurements.{name}"), measurement_count(d, scheme), want as u64));
    }
    report.findings.push(format!(
        "product single-particle MUB tomography uses (d+1)^2 = {} settings; the figure (d^2+1)^2 = {} does not match that count",
        (d + 1) * (d + 1),
        (d * d + 1) * (d * d + 1)
    ));
    Ok(())
}

fn completeness_suite(report: &mut RunReport, d: u32) -> Result<()> {
    let mut data = (0..d).map(|b| spectral_data(d, b)).collect::<pueb::error::Result<Vec<_>>>()?;
    data.push(clock_spectral_data(d)?);
    let off = data.iter().map(|sd| sd.off_diagonal).fold(0.0, f64::max);
    let dev = data.iter().map(|sd| verify_completeness(sd).max_dev).fold(0.0, f64::max);
    report.push(Check::new("completeness.diagonal", off, 1e-12));
    report.push(Check::new("completeness.relation", dev, 1e-12).with_detail(format!("{} bases", data.len())));
    Ok(())
}

pub fn run_verify(dim: Dim, suite: Suite) -> Result<RunReport> {
    let mut report = RunReport::new("verify", dim.d);
    let needs_two = matches!(suite, Suite::Entangled | Suite::Count);
    if needs_two && !dim.two_particle() {
        bail!("suite {suite:?} needs a two-particle dimension (3, 5 or 7), got {}", dim.d);
    }
    if suite == Suite::Completeness && !dim.is_prime() {
        bail!("suite completeness needs a prime dimension, got {}", dim.d);
    }
    if matches!(suite, Suite::Mub | Suite::All) {
        mub_suite(&mut report, dim)?;
    }
    if matches!(suite, Suite::Completeness) || (suite == Suite::All && dim.is_prime()) {
        completeness_suite(&mut report, dim.d)?;
    }
    if matches!(suite, Suite::Entangled) || (suite == Suite::All && dim.two_particle()) {
        entangled_suite(&mut report, dim.d)?;
    }
    if matches!(suite, Suite::Count) || (suite == Suite::All && dim.two_particle()) {
        count_suite(&mut report, dim.d)?;
    }
    if suite == Suite::All && !dim.two_particle() {
        report
            .findings
            .push(format!("entangled and count suites skipped: d = {} has single-particle support only", dim.d));
    }
    Ok(report)
}
