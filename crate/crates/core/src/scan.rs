//! Fixed-D sweeps of `|I6|` over Δ, phase boundaries and their character.
//!
//! A boundary is where curves of consecutive RG depths cross. Each crossing is
//! then classified: a sharp peak of the deepest curve (Haldane–Néel) or an
//! abrupt drop (Haldane–large-D). Boundaries between two vanishing phases
//! show no crossing, only a diminishing peak; those are found by a separate
//! peak search.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::block::Couplings;
use crate::error::{Error, Result};
use crate::flow::{rg_trajectory, FlowStatus, FlowTrajectory};

/// `|I6|` below this counts as vanishing.
pub const ZERO_TOL: f64 = 1e-6;
/// Half-width, in grid points, of the classification window.
pub const WINDOW: usize = 5;
/// A peak must exceed both window edges by this factor.
pub const PEAK_FACTOR: f64 = 2.0;
const PEAK_SUBGRID: usize = 65;
/// Deeper/shallower `|I6|` ratio below which a side counts as collapsing.
pub const COLLAPSE_RATIO: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanCell {
    pub couplings: Option<Couplings>,
    pub abs_i6: Option<f64>,
    pub status: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransitionKind {
    Crossing,
    Peak,
    Drop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detection {
    /// Sign change of `|I6|_lo − |I6|_hi`, refined by bisection.
    Crossing,
    /// Isolated maximum of the deepest curve with no crossing nearby.
    PeakSearch,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub delta_c: f64,
    pub kind: TransitionKind,
    pub detection: Detection,
    pub depths: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub d: f64,
    pub grid: Vec<f64>,
    pub depths: Vec<usize>,
    /// `cells[i][k]` is grid point `i` at `depths[k]`.
    pub cells: Vec<Vec<ScanCell>>,
    pub boundaries: Vec<Boundary>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseLabel {
    Haldane,
    NonHaldane,
    Unlabeled,
}

fn trajectory(delta: f64, d: f64, depth: usize) -> FlowTrajectory {
    rg_trajectory(&Couplings { j: 1.0, delta, d }, depth)
}

fn abs_i6_at(t: &FlowTrajectory, depth: usize) -> Option<f64> {
    t.steps.get(depth).map(|s| s.abs_i6())
}

fn cell(t: &FlowTrajectory, depth: usize) -> ScanCell {
    match t.steps.get(depth) {
        Some(s) => ScanCell {
            couplings: Some(s.couplings),
            abs_i6: Some(s.abs_i6()),
            status: "ok".into(),
        },
        None => {
            let status = match &t.status {
                FlowStatus::Singular { step, .. } => format!("singular_at_step_{step}"),
                FlowStatus::Completed => "missing".into(),
            };
            ScanCell { couplings: None, abs_i6: None, status }
        }
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

/// Sweeps Δ at fixed `d` and detects boundaries between the two deepest depths.
pub fn scan_delta(
    d: f64,
    delta_min: f64,
    delta_max: f64,
    points: usize,
    depths: &[usize],
) -> Result<ScanResult> {
    if !(delta_min < delta_max) || !d.is_finite() || !delta_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need finite delta_min < delta_max, got [{delta_min}, {delta_max}]"
        )));
    }
    if points < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 points, got {points}")));
    }
    if depths.is_empty() {
        return Err(Error::InvalidArgument("no depths given".into()));
    }
    let mut depths = depths.to_vec();
    depths.sort_unstable();
    depths.dedup();
    let max_depth = *depths.last().unwrap();
    let grid = uniform_grid(delta_min, delta_max, points);
    let cells: Vec<Vec<ScanCell>> = grid
        .par_iter()
        .map(|&delta| {
            let t = trajectory(delta, d, max_depth);
            depths.iter().map(|&n| cell(&t, n)).collect()
        })
        .collect();
    let mut scan = ScanResult { d, grid, depths, cells, boundaries: Vec::new() };
    scan.boundaries = locate_boundaries(&scan, 1e-10);
    Ok(scan)
}

impl ScanResult {
    /// `|I6|` at `depths[k]` across the grid.
    pub fn curve(&self, k: usize) -> Vec<Option<f64>> {
        self.cells.iter().map(|row| row[k].abs_i6).collect()
    }

    pub fn deepest(&self) -> Vec<Option<f64>> {
        self.curve(self.depths.len() - 1)
    }

    fn nearest_index(&self, delta: f64) -> usize {
        let mut best = 0;
        for (i, g) in self.grid.iter().enumerate() {
            if (g - delta).abs() < (self.grid[best] - delta).abs() {
                best = i;
            }
        }
        best
    }
}

/// Bisection on `|I6|_lo(Δ) − |I6|_hi(Δ)` down to a bracket narrower than `tol`.
pub fn find_crossing(
    d: f64,
    depth_lo: usize,
    depth_hi: usize,
    bracket: (f64, f64),
    tol: f64,
) -> Result<f64> {
    let top = depth_lo.max(depth_hi);
    let g = |delta: f64| -> Option<f64> {
        let t = trajectory(delta, d, top);
        Some(abs_i6_at(&t, depth_lo)? - abs_i6_at(&t, depth_hi)?)
    };
    let (mut a, mut b) = bracket;
    let (ga, gb) = (g(a), g(b));
    let (Some(mut ga), Some(gb)) = (ga, gb) else {
        return Err(Error::NoBracket {
            lo: a,
            hi: b,
            g_lo: ga.unwrap_or(f64::NAN),
            g_hi: gb.unwrap_or(f64::NAN),
        });
    };
    if ga == 0.0 {
        return Ok(a);
    }
    if gb == 0.0 {
        return Ok(b);
    }
    if ga.signum() == gb.signum() {
        return Err(Error::NoBracket { lo: a, hi: b, g_lo: ga, g_hi: gb });
    }
    while (b - a).abs() > tol {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let Some(gm) = g(m) else {
            return Err(Error::TruncatedFlow {
                last_step: 0,
                cause: format!("flow at delta = {m} became singular during bisection"),
            });
        };
        if gm == 0.0 {
            return Ok(m);
        }
        if gm.signum() == ga.signum() {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Haldane iff `|I6|` after `depth` steps exceeds `zero_tol`.
pub fn phase_label(delta: f64, d: f64, depth: usize, zero_tol: f64) -> PhaseLabel {
    match abs_i6_at(&trajectory(delta, d, depth), depth) {
        Some(v) if v > zero_tol => PhaseLabel::Haldane,
        Some(_) => PhaseLabel::NonHaldane,
        None => PhaseLabel::Unlabeled,
    }
}

fn label_of(v: Option<f64>) -> PhaseLabel {
    match v {
        Some(v) if v > ZERO_TOL => PhaseLabel::Haldane,
        Some(_) => PhaseLabel::NonHaldane,
        None => PhaseLabel::Unlabeled,
    }
}

/// Position of the deepest flow in `(atan Δₙ, atan Dₙ)`; bounded even when the
/// couplings run off to infinity.
fn flow_endpoint(delta: f64, d: f64, depth: usize) -> Option<(f64, f64, Option<f64>)> {
    let t = trajectory(delta, d, depth);
    let last = t.steps.last()?;
    Some((
        last.couplings.delta.atan(),
        last.couplings.d.atan(),
        abs_i6_at(&t, depth),
    ))
}

/// Largest `|I6|` found by bisecting toward the separatrix between the
/// attractors reached from `lo` and `hi`.
fn separatrix_max(d: f64, depth: usize, lo: f64, hi: f64) -> Option<f64> {
    let (ax, ay, _) = flow_endpoint(lo, d, depth)?;
    let (bx, by, _) = flow_endpoint(hi, d, depth)?;
    let (mut a, mut b) = (lo, hi);
    let mut best: Option<f64> = None;
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let (px, py, v) = flow_endpoint(m, d, depth)?;
        if let Some(v) = v {
            best = Some(best.map_or(v, |b: f64| b.max(v)));
        }
        let to_a = (px - ax).hypot(py - ay);
        let to_b = (px - bx).hypot(py - by);
        if to_a < to_b {
            a = m;
        } else {
            b = m;
        }
    }
    best
}

/// Peak or drop at `delta_c`, judged on the deepest curve within ±5 grid points.
pub fn classify_transition(scan: &ScanResult, delta_c: f64) -> Result<TransitionKind> {
    let i = scan.nearest_index(delta_c);
    if i < WINDOW || i + WINDOW >= scan.grid.len() {
        return Err(Error::WindowOutOfGrid { delta: delta_c });
    }
    let deep = scan.deepest();
    let depth = *scan.depths.last().unwrap();
    let (l, r) = (i - WINDOW, i + WINDOW);
    let edge = deep[l].unwrap_or(0.0).max(deep[r].unwrap_or(0.0));
    let interior = deep[l + 1..r].iter().flatten().copied().fold(0.0, f64::max);
    let mut m = interior;
    if label_of(deep[l]) != label_of(deep[r]) {
        if let Some(s) = separatrix_max(scan.d, depth, scan.grid[l], scan.grid[r]) {
            m = m.max(s);
        }
    }
    if m >= PEAK_FACTOR * edge && m > edge && m > ZERO_TOL {
        Ok(TransitionKind::Peak)
    } else {
        Ok(TransitionKind::Drop)
    }
}

/// A genuine crossing separates a side where `|I6|` survives deeper RG steps
/// from one where it collapses; on a converged plateau the curves cross by
/// round-off with a depth ratio of one on both sides.
fn is_phase_crossing(shallow: &[Option<f64>], deep: &[Option<f64>], i: usize) -> bool {
    let l = i.saturating_sub(WINDOW);
    let r = (i + 1 + WINDOW).min(deep.len() - 1);
    if label_of(deep[l]) != label_of(deep[r]) {
        return true;
    }
    let ratio = |k: usize| match (shallow[k], deep[k]) {
        (Some(a), Some(b)) if a > 0.0 => Some(b / a),
        _ => None,
    };
    match (ratio(l), ratio(r)) {
        (Some(a), Some(b)) => a.min(b) < COLLAPSE_RATIO && a.max(b) >= COLLAPSE_RATIO,
        _ => false,
    }
}

/// Crossings of the two deepest curves plus isolated peaks of the deepest.
pub fn locate_boundaries(scan: &ScanResult, tol: f64) -> Vec<Boundary> {
    let n = scan.depths.len();
    let deep = scan.deepest();
    let depth_hi = scan.depths[n - 1];
    let mut out: Vec<Boundary> = Vec::new();
    let mut crossing_idx: Vec<usize> = Vec::new();

    if n >= 2 {
        let depth_lo = scan.depths[n - 2];
        let lo = scan.curve(n - 2);
        let g: Vec<Option<f64>> = lo.iter().zip(&deep).map(|(a, b)| Some((*a)? - (*b)?)).collect();
        for i in 0..scan.grid.len() - 1 {
            let (Some(g0), Some(g1)) = (g[i], g[i + 1]) else { continue };
            if g0 == 0.0 || g0.signum() == g1.signum() {
                continue;
            }
            let Ok(dc) = find_crossing(scan.d, depth_lo, depth_hi, (scan.grid[i], scan.grid[i + 1]), tol)
            else {
                continue;
            };
            let kind = classify_transition(scan, dc);
            let accept = is_phase_crossing(&lo, &deep, i) || matches!(kind, Ok(TransitionKind::Peak));
            if !accept {
                continue;
            }
            crossing_idx.push(i);
            out.push(Boundary {
                delta_c: dc,
                kind: kind.unwrap_or(TransitionKind::Crossing),
                detection: Detection::Crossing,
                depths: (depth_lo, depth_hi),
            });
        }
    }

    for i in WINDOW..scan.grid.len().saturating_sub(WINDOW) {
        let Some(v) = deep[i] else { continue };
        let left = deep[i - 1].unwrap_or(0.0);
        let right = deep[i + 1].unwrap_or(0.0);
        let edge = deep[i - WINDOW].unwrap_or(0.0).max(deep[i + WINDOW].unwrap_or(0.0));
        let is_max = v >= left && v >= right && (v > left || v > right);
        // No absolute floor: between two vanishing phases the peak itself
        // is far below ZERO_TOL and shrinks with depth.
        if !is_max || v <= 0.0 || v < PEAK_FACTOR * edge {
            continue;
        }
        if crossing_idx.iter().any(|&c| c.abs_diff(i) <= WINDOW) {
            continue;
        }
        let dc = refine_peak(scan.d, depth_hi, scan.grid[i - 1], scan.grid[i + 1]).unwrap_or(scan.grid[i]);
        out.push(Boundary {
            delta_c: dc,
            kind: TransitionKind::Peak,
            detection: Detection::PeakSearch,
            depths: (depth_hi, depth_hi),
        });
        crossing_idx.push(i);
    }
    out.sort_by(|a, b| a.delta_c.total_cmp(&b.delta_c));
    out
}

fn refine_peak(d: f64, depth: usize, lo: f64, hi: f64) -> Option<f64> {
    uniform_grid(lo, hi, PEAK_SUBGRID)
        .into_iter()
        .filter_map(|x| Some((x, abs_i6_at(&trajectory(x, d, depth), depth)?)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(x, _)| x)
}

/// A maximal run of Haldane-labelled grid points on the deepest curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub lo: f64,
    pub hi: f64,
    /// Median `|I6|` over the run with 10% trimmed from each end.
    pub level: f64,
}

pub fn haldane_plateaus(scan: &ScanResult) -> Vec<Plateau> {
    let deep = scan.deepest();
    let mut out = Vec::new();
    let mut i = 0;
    while i < deep.len() {
        if label_of(deep[i]) != PhaseLabel::Haldane {
            i += 1;
            continue;
        }
        let start = i;
        while i < deep.len() && label_of(deep[i]) == PhaseLabel::Haldane {
            i += 1;
        }
        let run: Vec<f64> = deep[start..i].iter().flatten().copied().collect();
        let margin = run.len() / 10;
        let mut inner: Vec<f64> = run[margin..run.len() - margin].to_vec();
        inner.sort_by(f64::total_cmp);
        out.push(Plateau { lo: scan.grid[start], hi: scan.grid[i - 1], level: inner[inner.len() / 2] });
    }
    out
}

pub const CSV_HEADER: &str = "delta,depth,J_n,delta_n,D_n,abs_I6,status";

fn sci(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.16e}"),
        None => "nan".into(),
    }
}

/// One row per `(Δ, depth)`, 17 significant digits.
pub fn write_csv(scan: &ScanResult, mut w: impl Write) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for (delta, row) in scan.grid.iter().zip(&scan.cells) {
        for (depth, c) in scan.depths.iter().zip(row) {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                sci(Some(*delta)),
                depth,
                sci(c.couplings.map(|k| k.j)),
                sci(c.couplings.map(|k| k.delta)),
                sci(c.couplings.map(|k| k.d)),
                sci(c.abs_i6),
                c.status
            )?;
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub d: f64,
    pub depths: Vec<usize>,
    pub boundaries: Vec<Boundary>,
}

impl From<&ScanResult> for BoundaryReport {
    fn from(s: &ScanResult) -> Self {
        BoundaryReport { d: s.d, depths: s.depths.clone(), boundaries: s.boundaries.clone() }
    }
}

/// Gnuplot script plotting one `|I6|` curve per depth from the CSV.
pub fn gnuplot_script(csv_path: &str, scan: &ScanResult) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set xlabel 'Delta'\nset ylabel '|I_6|'\n");
    s.push_str(&format!("set title 'D = {}'\n", scan.d));
    for b in &scan.boundaries {
        s.push_str(&format!(
            "set arrow from {0},graph 0 to {0},graph 1 nohead dt 2\n",
            b.delta_c
        ));
    }
    let plots: Vec<String> = scan
        .depths
        .iter()
        .map(|n| {
            format!(
                "'{csv_path}' every ::1 using ($2=={n} ? $1 : 1/0):6 with lines title 'n = {n}'"
            )
        })
        .collect();
    s.push_str("plot ");
    s.push_str(&plots.join(", \\\n     "));
    s.push('\n');
    s
}
