use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use num_complex::Complex64;
use serde::Serialize;

use qutrit_qrg::block::{block_solution, ed_check, BlockSolution, Couplings, EdReport};
use qutrit_qrg::flow::{rg_trajectory, FlowStatus, FlowStep};
use qutrit_qrg::invariants::{invariants_full, InvariantSet};
use qutrit_qrg::scan::{
    classify_transition, find_crossing, gnuplot_script, locate_boundaries, scan_delta, write_csv,
    Boundary, BoundaryReport, Detection, ScanResult,
};
use qutrit_qrg::tensor::{apply_local, random_tensor, LocalOp, Tensor333};

use crate::error::{CliError, CliResult};
use crate::Context;

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text)
            .map_err(|e| CliError::invalid(format!("writing {}: {e}", p.display()))),
        None => {
            let mut w = io::stdout().lock();
            w.write_all(text.as_bytes())?;
            Ok(w.flush()?)
        }
    }
}

fn json_line<T: Serialize>(v: &T) -> CliResult<String> {
    Ok(serde_json::to_string(v)? + "\n")
}

fn couplings(j: f64, delta: f64, d: f64) -> CliResult<Couplings> {
    if delta < 0.0 {
        return Err(CliError::invalid(format!("delta = {delta}: only delta >= 0 is supported")));
    }
    Ok(Couplings::new(j, delta, d)?)
}

#[derive(Serialize)]
struct ComplexJson {
    re: f64,
    im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

#[derive(Serialize)]
struct InvariantsOut {
    i6: ComplexJson,
    i9: ComplexJson,
    i12: ComplexJson,
    j12: ComplexJson,
    delta333: ComplexJson,
    scale: f64,
    zero_floor: f64,
    genuine: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    sl_check_max_rel_dev: Option<f64>,
}

#[derive(Args, Debug)]
pub struct InvariantsArgs {
    /// Tensor JSON `{"re": [27], "im": [27]}`, `-` for standard input; a
    /// random tensor from `--seed` when absent
    input: Option<PathBuf>,
    /// Magnitudes below this are reported as exact zeros [default: 1e-12]
    #[arg(long)]
    zero_floor: Option<f64>,
    /// Also evaluate on a random SL(3)^3 image and report the largest relative deviation
    #[arg(long)]
    sl_check: bool,
}

fn read_tensor(input: Option<&Path>, seed: u64) -> CliResult<Tensor333> {
    let text = match input {
        None => return Ok(random_tensor(seed)),
        Some(p) if p == Path::new("-") => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
        Some(p) => fs::read_to_string(p)
            .map_err(|e| CliError::invalid(format!("reading {}: {e}", p.display())))?,
    };
    Ok(Tensor333::from_json_str(&text)?)
}

fn max_rel_dev(a: &InvariantSet, b: &InvariantSet) -> f64 {
    let (a, b) = (a.raw(), b.raw());
    [(a.i6, b.i6), (a.i9, b.i9), (a.i12, b.i12)]
        .into_iter()
        .map(|(x, y)| {
            let scale = x.norm().max(y.norm());
            if scale < 1e-12 {
                (x - y).norm()
            } else {
                (x - y).norm() / scale
            }
        })
        .fold(0.0, f64::max)
}

pub fn invariants(ctx: &Context, a: InvariantsArgs) -> CliResult<()> {
    let floor = ctx.config.pick(a.zero_floor, "zero_floor", 1e-12)?;
    if !(floor >= 0.0) {
        return Err(CliError::invalid("--zero-floor must be non-negative"));
    }
    let t = read_tensor(a.input.as_deref(), ctx.seed)?;
    let inv = invariants_full(&t)?;
    let sl_check = if ctx.config.switch(a.sl_check, "sl_check")? {
        let image = apply_local(&t, &LocalOp::random_special(ctx.seed));
        Some(max_rel_dev(&inv, &invariants_full(&image)?))
    } else {
        None
    };
    let f = inv.floored(floor);
    let out = InvariantsOut {
        i6: f.i6.into(),
        i9: f.i9.into(),
        i12: f.i12.into(),
        j12: f.j12.into(),
        delta333: f.delta333.into(),
        scale: f.scale,
        zero_floor: floor,
        genuine: inv.is_genuine(floor),
        sl_check_max_rel_dev: sl_check,
    };
    emit(ctx.out.as_deref(), &json_line(&out)?)
}

#[derive(Args, Debug)]
pub struct BlockArgs {
    /// Easy-axis anisotropy
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Single-ion anisotropy
    #[arg(long, allow_negative_numbers = true)]
    d: Option<f64>,
    /// Exchange coupling [default: 1]
    #[arg(long)]
    j: Option<f64>,
    /// Compare against exact diagonalization of the 27x27 block Hamiltonian
    #[arg(long)]
    verify_ed: bool,
}

#[derive(Serialize)]
struct BlockOut {
    couplings: Couplings,
    #[serde(flatten)]
    solution: BlockSolution,
    x_ren_sq: f64,
    z_ren_sq: f64,
    abs_i6: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    ed: Option<EdReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ed_max_deviation: Option<f64>,
}

fn required(flag: Option<f64>, ctx: &Context, key: &str) -> CliResult<f64> {
    match flag {
        Some(v) => Ok(v),
        None => ctx
            .config
            .get(key)?
            .ok_or_else(|| CliError::invalid(format!("--{} is required", key.replace('_', "-")))),
    }
}

pub fn block(ctx: &Context, a: BlockArgs) -> CliResult<()> {
    let c = couplings(
        ctx.config.pick(a.j, "j", 1.0)?,
        required(a.delta, ctx, "delta")?,
        required(a.d, ctx, "d")?,
    )?;
    let solution = block_solution(c.delta, c.d)?;
    let ed = if ctx.config.switch(a.verify_ed, "verify_ed")? {
        Some(ed_check(&c, &solution)?)
    } else {
        None
    };
    let out = BlockOut {
        couplings: c,
        solution,
        x_ren_sq: solution.x_ren * solution.x_ren,
        z_ren_sq: solution.z_ren * solution.z_ren,
        abs_i6: solution.abs_i6(),
        ed_max_deviation: ed.as_ref().map(EdReport::max),
        ed,
    };
    emit(ctx.out.as_deref(), &json_line(&out)?)
}

#[derive(Args, Debug)]
pub struct FlowArgs {
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    d: Option<f64>,
    /// [default: 1]
    #[arg(long)]
    j: Option<f64>,
    /// RG steps after the initial block [default: 16]
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Serialize)]
struct StepOut<'a> {
    #[serde(flatten)]
    step: &'a FlowStep,
    abs_i6: f64,
}

#[derive(Serialize)]
struct StatusOut<'a> {
    #[serde(flatten)]
    status: &'a FlowStatus,
}

pub fn flow(ctx: &Context, a: FlowArgs) -> CliResult<()> {
    let c = couplings(
        ctx.config.pick(a.j, "j", 1.0)?,
        required(a.delta, ctx, "delta")?,
        required(a.d, ctx, "d")?,
    )?;
    let steps = ctx.config.pick(a.steps, "steps", 16usize)?;
    let t = rg_trajectory(&c, steps);
    let mut text = String::new();
    for s in &t.steps {
        text += &json_line(&StepOut { step: s, abs_i6: s.abs_i6() })?;
    }
    if !t.is_complete() {
        text += &json_line(&StatusOut { status: &t.status })?;
    }
    emit(ctx.out.as_deref(), &text)
}

#[derive(Args, Debug)]
pub struct GridArgs {
    /// Single-ion anisotropy
    #[arg(long, allow_negative_numbers = true)]
    d: Option<f64>,
    /// [default: 0]
    #[arg(long)]
    delta_min: Option<f64>,
    /// [default: 3]
    #[arg(long)]
    delta_max: Option<f64>,
    /// Grid points, at least 2 [default: 400]
    #[arg(long)]
    points: Option<usize>,
    /// Comma-separated RG depths; boundaries use the two deepest [default: 9,10]
    #[arg(long, value_delimiter = ',')]
    depths: Option<Vec<usize>>,
}

fn run_scan(ctx: &Context, g: &GridArgs) -> CliResult<ScanResult> {
    let d = required(g.d, ctx, "d")?;
    let lo = ctx.config.pick(g.delta_min, "delta_min", 0.0)?;
    let hi = ctx.config.pick(g.delta_max, "delta_max", 3.0)?;
    let points = ctx.config.pick(g.points, "points", 400usize)?;
    let depths = ctx.config.pick(g.depths.clone(), "depths", vec![9, 10])?;
    if lo < 0.0 {
        return Err(CliError::invalid(format!("delta-min = {lo}: only delta >= 0 is supported")));
    }
    Ok(scan_delta(d, lo, hi, points, &depths)?)
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Also write a gnuplot script next to the CSV
    #[arg(long)]
    gnuplot: bool,
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

/// CSV to `--out` (or standard output), boundaries to `<stem>.boundaries.json`
/// (or standard error), gnuplot script to `<stem>.gp`.
pub fn scan(ctx: &Context, a: ScanArgs) -> CliResult<()> {
    let scan = run_scan(ctx, &a.grid)?;
    let report = json_line(&BoundaryReport::from(&scan))?;
    let gnuplot = ctx.config.switch(a.gnuplot, "gnuplot")?;
    match ctx.out.as_deref() {
        Some(csv) => {
            let file = File::create(csv)
                .map_err(|e| CliError::invalid(format!("writing {}: {e}", csv.display())))?;
            let mut w = BufWriter::new(file);
            write_csv(&scan, &mut w)?;
            w.flush()?;
            emit(Some(&sibling(csv, ".boundaries.json")), &report)?;
            if gnuplot {
                let name = csv.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                emit(Some(&sibling(csv, ".gp")), &gnuplot_script(&name, &scan))?;
            }
        }
        None => {
            let mut w = BufWriter::new(io::stdout().lock());
            write_csv(&scan, &mut w)?;
            w.flush()?;
            eprint!("{report}");
            if gnuplot {
                return Err(CliError::invalid("--gnuplot needs --out for the CSV path"));
            }
        }
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct PhaseArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Bisection tolerance for crossings [default: 1e-10]
    #[arg(long)]
    refine_tol: Option<f64>,
    /// Bisect only inside this bracket, `lo,hi`, instead of detecting from the scan
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    bracket: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct PhaseOut {
    #[serde(flatten)]
    report: BoundaryReport,
    refine_tol: f64,
}

pub fn phase(ctx: &Context, a: PhaseArgs) -> CliResult<()> {
    let tol = ctx.config.pick(a.refine_tol, "refine_tol", 1e-10)?;
    if !(tol > 0.0) {
        return Err(CliError::invalid("--refine-tol must be positive"));
    }
    let scan = run_scan(ctx, &a.grid)?;
    let boundaries = match ctx.config.pick(a.bracket, "bracket", Vec::new())?.as_slice() {
        [] => locate_boundaries(&scan, tol),
        &[lo, hi] => {
            let n = scan.depths.len();
            let pair = if n >= 2 { (scan.depths[n - 2], scan.depths[n - 1]) } else { (scan.depths[0], scan.depths[0]) };
            let delta_c = find_crossing(scan.d, pair.0, pair.1, (lo, hi), tol)?;
            let kind = classify_transition(&scan, delta_c)?;
            vec![Boundary { delta_c, kind, detection: Detection::Crossing, depths: pair }]
        }
        other => return Err(CliError::invalid(format!("--bracket needs two values, got {}", other.len()))),
    };
    let mut report = BoundaryReport::from(&scan);
    report.boundaries = boundaries;
    emit(ctx.out.as_deref(), &json_line(&PhaseOut { report, refine_tol: tol })?)
}
