use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use mincouple_core::{
    causal_direction, compute_coupling, greatest_lower_bound, majorizes, sample_coupling,
    verify_coupling, write_tsv, Direction, Layout, RenyiOrder, SplitLimits,
};

use crate::error::CliError;
use crate::files::{read_collection, read_coupling, read_joint, CouplingFile};
use crate::format::{float, floats, to_json};

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    InvariantFailed,
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
}

pub fn glb(input: &Path, order: RenyiOrder, out: &mut impl Write) -> Result<Status, CliError> {
    let coll = read_collection(input)?;
    let g = greatest_lower_bound(&coll.pmfs)?;
    let glb = g.to_pmf();
    writeln!(out, "glb\t{}", floats(glb.masses()))?;
    writeln!(out, "entropy\t{}", float(glb.entropy(RenyiOrder::SHANNON)))?;
    if !order.is_shannon() {
        writeln!(out, "renyi_{order}\t{}", float(glb.entropy(order)))?;
    }
    let mut status = Status::Ok;
    for (p, label) in coll.pmfs.iter().zip(&coll.labels) {
        let ok = majorizes(p, &glb);
        if !ok {
            status = Status::InvariantFailed;
        }
        writeln!(out, "majorizes\t{label}\t{}", if ok { "yes" } else { "NO" })?;
    }
    Ok(status)
}

pub struct CoupleArgs<'a> {
    pub input: &'a Path,
    pub limits: SplitLimits,
    pub order: RenyiOrder,
    pub out: Option<&'a Path>,
}

/// Writes the coupling to `--out` (or `artifact`) and the summary to `summary`.
pub fn couple(
    args: CoupleArgs<'_>,
    artifact: &mut impl Write,
    summary: &mut impl Write,
) -> Result<Status, CliError> {
    let coll = read_collection(args.input)?;
    let start = Instant::now();
    let c = compute_coupling(&coll.pmfs, args.limits)?;
    let elapsed = start.elapsed();

    let file = CouplingFile::from_coupling(&c);
    match args.out {
        Some(path) => {
            let mut w = create(path)?;
            to_json(&file, &mut w)?;
            writeln!(w)?;
            w.flush()?;
        }
        None => {
            to_json(&file, &mut *artifact)?;
            writeln!(artifact)?;
        }
    }

    let report = verify_coupling(&c, &coll.pmfs, args.order);
    writeln!(summary, "m\t{}", report.m)?;
    writeln!(summary, "n\t{}", report.n)?;
    writeln!(summary, "H(q)\t{}", float(report.entropy_q))?;
    writeln!(summary, "H(glb)\t{}", float(report.entropy_glb))?;
    writeln!(summary, "gap\t{}", float(report.gap))?;
    writeln!(summary, "bound\t{}", float(report.gap_bound))?;
    if !args.order.is_shannon() {
        writeln!(summary, "H_{0}(q)\t{1}", args.order, float(report.renyi_q))?;
        writeln!(
            summary,
            "H_{0}(glb)+H_{0}(CGeom)\t{1}",
            args.order,
            float(report.renyi_glb + report.renyi_bound)
        )?;
    }
    writeln!(summary, "support\t{}", report.support)?;
    writeln!(summary, "support_bound\t{}", report.support_bound)?;
    writeln!(summary, "tv_bound\t{}", float(args.limits.error_bound()))?;
    writeln!(summary, "elapsed_s\t{}", float(elapsed.as_secs_f64()))?;
    Ok(if report.passed() {
        Status::Ok
    } else {
        Status::InvariantFailed
    })
}

pub fn sample(
    coupling: &Path,
    seed: u64,
    count: usize,
    layout: Layout,
    out: Option<&Path>,
    stdout: &mut impl Write,
) -> Result<Status, CliError> {
    let c = read_coupling(coupling)?;
    let draws = sample_coupling(&c, seed, count);
    match out {
        Some(path) => {
            let mut w = create(path)?;
            write_tsv(draws, layout, &mut w)?;
            w.flush()?;
        }
        None => write_tsv(draws, layout, stdout)?,
    }
    Ok(Status::Ok)
}

pub fn verify(
    coupling: &Path,
    input: &Path,
    order: RenyiOrder,
    out: &mut impl Write,
) -> Result<Status, CliError> {
    let c = read_coupling(coupling)?;
    let coll = read_collection(input)?;
    if c.m() != coll.pmfs.len() {
        return Err(CliError::Parse(format!(
            "coupling has {} maps but {} lists {} distributions",
            c.m(),
            input.display(),
            coll.pmfs.len()
        )));
    }
    if c.n() < coll.n() {
        return Err(CliError::Parse(format!(
            "coupling covers {} labels but {} needs {}",
            c.n(),
            input.display(),
            coll.n()
        )));
    }
    let report = verify_coupling(&c, &coll.pmfs, order);
    for check in &report.checks {
        let mark = if check.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{mark}\t{}\t{}", check.name, check.detail)?;
    }
    for (i, &tv) in report.tv.iter().enumerate() {
        writeln!(out, "tv\t{}\t{}", coll.labels[i], float(tv))?;
    }
    writeln!(out, "H(q)\t{}", float(report.entropy_q))?;
    writeln!(out, "H(glb)\t{}", float(report.entropy_glb))?;
    Ok(if report.passed() {
        writeln!(out, "result\tok")?;
        Status::Ok
    } else {
        writeln!(out, "result\tfailed")?;
        Status::InvariantFailed
    })
}

pub fn causal(joint: &Path, out: &mut impl Write) -> Result<Status, CliError> {
    let table = read_joint(joint)?;
    let r = causal_direction(&table)?;
    writeln!(
        out,
        "# scores use H(glb of conditionals), within 2 bits of the minimum noise entropy"
    )?;
    writeln!(out, "H(X)\t{}", float(r.h_x))?;
    writeln!(out, "H(Y)\t{}", float(r.h_y))?;
    writeln!(out, "H(glb Y|X)\t{}", float(r.noise_forward))?;
    writeln!(out, "H(glb X|Y)\t{}", float(r.noise_backward))?;
    writeln!(out, "score X->Y\t{}", float(r.score_forward))?;
    writeln!(out, "score Y->X\t{}", float(r.score_backward))?;
    let direction = match r.direction {
        Direction::XToY => "X->Y",
        Direction::YToX => "Y->X",
        Direction::Tie => "tie",
    };
    writeln!(out, "direction\t{direction}")?;
    Ok(Status::Ok)
}
