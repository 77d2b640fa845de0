//! Acceptance checks 1-9. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qutrit_qrg::block::{block_solution, ed_check, Couplings};
use qutrit_qrg::flow::{i6_after_steps, rg_step};
use qutrit_qrg::invariants::{
    closed_form, hyperdet_from, invariant_i12, invariant_i6, invariant_i9, invariants_full,
    j12_from, three_tangle, Tensor222,
};
use qutrit_qrg::scan::{
    classify_transition, haldane_plateaus, scan_delta, uniform_grid, Detection, ScanResult,
    TransitionKind,
};
use qutrit_qrg::tensor::{
    apply_local, assemble_psi0, psi0_normalization, random_product_tensor, random_tensor, LocalOp,
    Tensor333,
};

const SEED: u64 = 20240607;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

/// `|a − b|` over `max(|b|, floor)`.
fn rel(a: Complex64, b: Complex64, floor: f64) -> f64 {
    (a - b).norm() / b.norm().max(floor)
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

struct Raw {
    i6: Complex64,
    i9: Complex64,
    i12: Complex64,
    j12: Complex64,
    delta: Complex64,
}

fn raw_invariants(t: &Tensor333) -> Raw {
    let i6 = invariant_i6(t);
    let i9 = invariant_i9(t);
    let i12 = invariant_i12(t);
    let j12 = j12_from(i12, i6);
    Raw { i6, i9, i12, j12, delta: hyperdet_from(i6, i9, j12) }
}

/// Closed forms on a 10x10x10 grid of normal forms. Values that vanish in
/// closed form are compared against `s^deg` with `s = max |a_i|`; J12 is
/// measured against `(|I12| + I6²) / 24`, the size of the terms it cancels.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let g = uniform_grid(-2.0, 2.0, 10);
    let mut worst = [0.0f64; 4];
    for &a1 in &g {
        for &a2 in &g {
            for &a3 in &g {
                let t = Tensor333::nurmiev(a1, a2, a3);
                let r = raw_invariants(&t);
                let s = a1.abs().max(a2.abs()).max(a3.abs());
                let floor = |deg: i32| s.powi(deg) * 1e-3;
                let (i6, i12) = (closed_form::nurmiev_i6(a1, a2, a3), closed_form::nurmiev_i12(a1, a2, a3));
                let pairs = [
                    (r.i6, i6, floor(6)),
                    (r.i9, closed_form::nurmiev_i9(a1, a2, a3), floor(9)),
                    (r.i12, i12, floor(12)),
                    (r.j12, closed_form::nurmiev_j12(a1, a2, a3), (i12.abs() + i6 * i6) / 24.0),
                ];
                for (w, (got, want, fl)) in worst.iter_mut().zip(pairs) {
                    *w = w.max(rel(got, c(want), fl.max(1e-300)));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let max = worst.iter().copied().fold(0.0, f64::max);
    Outcome::new(
        max <= 1e-9 && secs < 30.0,
        format!(
            "max rel err I6 {:.1e}, I9 {:.1e}, I12 {:.1e}, J12 {:.1e}; {secs:.2} s",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn criterion_2(rng: &mut ChaCha8Rng) -> Outcome {
    let mut err_i6 = 0.0f64;
    let mut max_i9 = 0.0f64;
    let mut max_i12 = 0.0f64;
    let mut err_delta = 0.0f64;
    for _ in 0..100 {
        let a = rng.random_range(-3.0..3.0);
        let b = rng.random_range(-3.0..3.0);
        let t = assemble_psi0(a, b).expect("positive normalization");
        let inv = invariants_full(&t).expect("nonzero");
        let n0 = psi0_normalization(a, b);
        let want_i6 = -8.0 * n0.powi(6) * a.powi(4);
        err_i6 = err_i6.max(rel(inv.i6, c(want_i6), 1e-300));
        max_i9 = max_i9.max(inv.i9.norm());
        max_i12 = max_i12.max(inv.i12.norm());
        err_delta = err_delta.max(rel(inv.delta333, inv.i6.powi(6) / 1728.0, 1e-300));
    }
    let parts = [err_i6 <= 1e-10, max_i9 < 1e-10, max_i12 < 1e-10, err_delta <= 1e-9];
    Outcome::new(
        parts.iter().all(|&p| p),
        format!(
            "I6 rel err {err_i6:.1e} [{}], max|I9| {max_i9:.1e} [{}], max|I12| {max_i12:.1e} [{}], \
             Delta vs I6^6/1728 rel err {err_delta:.1e} [{}]",
            ok(parts[0]),
            ok(parts[1]),
            ok(parts[2]),
            ok(parts[3])
        ),
    )
}

fn ok(p: bool) -> &'static str {
    if p {
        "ok"
    } else {
        "fail"
    }
}

fn criterion_3() -> Outcome {
    let field = |r: &Raw| [r.i6, r.i9, r.i12, r.j12, r.delta];
    let mut sl_err = [0.0f64; 5];
    for k in 0..200u64 {
        let t = random_tensor(SEED ^ (k << 8));
        let op = LocalOp::random_special(SEED.wrapping_add(k));
        let before = raw_invariants(&t);
        let after = raw_invariants(&apply_local(&t, &op));
        for (e, (x, y)) in sl_err.iter_mut().zip(field(&after).into_iter().zip(field(&before))) {
            *e = e.max(rel(x, y, 1e-300));
        }
    }
    let degrees = [6, 9, 12, 12, 36];
    let mut hom_err = [0.0f64; 5];
    for k in 0..20u64 {
        let t = random_tensor(SEED ^ (k << 20) ^ 1);
        let base = raw_invariants(&t);
        for s in [c(2.0), c(0.5), Complex64::new(1.0, 1.0)] {
            let scaled = raw_invariants(&t.scaled(s));
            for (i, e) in hom_err.iter_mut().enumerate() {
                let want = field(&base)[i] * s.powi(degrees[i]);
                *e = e.max(rel(field(&scaled)[i], want, 1e-300));
            }
        }
    }
    let sl = sl_err.iter().copied().fold(0.0, f64::max);
    let hom = hom_err.iter().copied().fold(0.0, f64::max);
    Outcome::new(
        sl <= 1e-8 && hom <= 1e-10,
        format!(
            "SL rel err (I6, I9, I12, J12, Delta) {:.1e} {:.1e} {:.1e} {:.1e} {:.1e}; \
             homogeneity rel err {:.1e} {:.1e} {:.1e} {:.1e} {:.1e}",
            sl_err[0], sl_err[1], sl_err[2], sl_err[3], sl_err[4],
            hom_err[0], hom_err[1], hom_err[2], hom_err[3], hom_err[4]
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut worst = 0.0f64;
    for k in 0..100u64 {
        let inv = invariants_full(&random_product_tensor(SEED + 1000 + k)).expect("nonzero");
        worst = worst.max(inv.delta333.norm());
    }
    Outcome::new(worst < 1e-10, format!("max |Delta333| {worst:.1e}"))
}

fn criterion_5() -> Outcome {
    let deltas = uniform_grid(0.0, 3.0, 50);
    let ds = uniform_grid(-1.0, 3.0, 50);
    let mut worst = [0.0f64; 4];
    let mut worst_at = [(0.0, 0.0); 4];
    let (mut checked, mut skipped, mut failed) = (0, 0, 0);
    for &delta in &deltas {
        for &d in &ds {
            let Ok(sol) = block_solution(delta, d) else {
                skipped += 1;
                continue;
            };
            let cpl = Couplings::new(1.0, delta, d).expect("finite");
            let Ok(r) = ed_check(&cpl, &sol) else {
                failed += 1;
                continue;
            };
            checked += 1;
            let vals = [r.eps0, r.psi0, r.isometry, r.operators.max()];
            for i in 0..4 {
                if vals[i] > worst[i] {
                    worst[i] = vals[i];
                    worst_at[i] = (delta, d);
                }
            }
        }
    }
    let tols = [1e-9, 1e-8, 1e-12, 1e-9];
    let pass = failed == 0 && worst.iter().zip(tols).all(|(w, t)| *w <= t);
    let mut detail = format!("{checked} points checked, {skipped} singular skipped, {failed} ED errors;");
    for (i, name) in ["eps0", "psi0", "T^T T - I", "operators"].iter().enumerate() {
        detail += &format!(
            " {name} {:.1e} at ({:.3}, {:.3}) [{}]",
            worst[i],
            worst_at[i].0,
            worst_at[i].1,
            ok(worst[i] <= tols[i])
        );
    }
    Outcome::new(pass, detail)
}

fn criterion_6() -> Outcome {
    let c1 = rg_step(&Couplings::new(1.0, 1.0, 0.0).expect("finite")).expect("regular");
    let step_err = (c1.j - 0.5625).abs().max((c1.delta - 1.0).abs()).max(c1.d.abs());
    let mut i6_err = 0.0f64;
    for n in 0..=16 {
        i6_err = i6_err.max((i6_after_steps(1.0, 0.0, n).expect("regular") - 0.012).abs());
    }
    Outcome::new(
        step_err <= 1e-12 && i6_err <= 1e-12,
        format!("rg_step err {step_err:.1e}, |I6| err over n <= 16 {i6_err:.1e}"),
    )
}

struct Scans {
    d0: ScanResult,
    d25: ScanResult,
    d14: ScanResult,
    secs: [f64; 3],
}

fn run_scans() -> Scans {
    let timed = |d: f64, lo: f64, hi: f64, depths: &[usize]| {
        let start = Instant::now();
        let s = scan_delta(d, lo, hi, 400, depths).expect("valid scan arguments");
        (s, start.elapsed().as_secs_f64())
    };
    let (d0, t0) = timed(0.0, 0.0, 2.0, &[9, 10]);
    let (d25, t1) = timed(2.5, 2.0, 4.0, &[10, 11]);
    let (d14, t2) = timed(1.4, 0.0, 3.0, &[15, 16]);
    Scans { d0, d25, d14, secs: [t0, t1, t2] }
}

/// Boundary of `scan` nearest `target`, if it was found by a crossing.
fn nearest(scan: &ScanResult, target: f64) -> Option<(f64, Detection)> {
    scan.boundaries
        .iter()
        .min_by(|a, b| (a.delta_c - target).abs().total_cmp(&(b.delta_c - target).abs()))
        .map(|b| (b.delta_c, b.detection))
}

fn criterion_7(s: &Scans) -> Outcome {
    let targets: [(&ScanResult, f64, &str); 5] = [
        (&s.d0, 1.0, "D=0"),
        (&s.d25, 3.2325, "D=2.5"),
        (&s.d14, 0.52535, "D=1.4"),
        (&s.d14, 1.6495, "D=1.4"),
        (&s.d14, 2.1325, "D=1.4"),
    ];
    let mut pass = true;
    let mut detail = String::new();
    for (scan, target, label) in targets {
        match nearest(scan, target) {
            Some((dc, how)) => {
                let good = (dc - target).abs() <= 0.01 && how == Detection::Crossing;
                pass &= good;
                detail += &format!("{label} {target}: {dc:.5} via {how:?} [{}]; ", ok(good));
            }
            None => {
                pass = false;
                detail += &format!("{label} {target}: none [fail]; ");
            }
        }
    }
    let plateaus = haldane_plateaus(&s.d14);
    if plateaus.len() == 2 {
        let (p, q) = (plateaus[0].level, plateaus[1].level);
        let spread = (p - q).abs() / p.max(q);
        let good = spread <= 0.01;
        pass &= good;
        detail += &format!("plateaus {p:.6} vs {q:.6}, rel diff {spread:.3} [{}]; ", ok(good));
    } else {
        pass = false;
        detail += &format!("{} Haldane plateaus at D=1.4 [fail]; ", plateaus.len());
    }
    let slow = s.secs.iter().copied().fold(0.0, f64::max);
    pass &= slow < 10.0;
    detail += &format!("slowest scan {slow:.2} s");
    Outcome::new(pass, detail)
}

fn criterion_8(s: &Scans) -> Outcome {
    let cases = [
        (&s.d0, 1.0, TransitionKind::Peak),
        (&s.d14, 0.525, TransitionKind::Drop),
        (&s.d14, 1.6495, TransitionKind::Drop),
        (&s.d14, 2.1325, TransitionKind::Peak),
    ];
    let mut pass = true;
    let mut detail = String::new();
    for (scan, target, want) in cases {
        let Some((dc, _)) = nearest(scan, target) else {
            pass = false;
            detail += &format!("{target}: no boundary [fail]; ");
            continue;
        };
        let got = classify_transition(scan, dc);
        let good = matches!(got, Ok(k) if k == want);
        pass &= good;
        detail += &format!("D={} {dc:.4}: {got:?} [{}]; ", scan.d, ok(good));
    }
    Outcome::new(pass, detail.trim_end_matches("; ").to_string())
}

fn criterion_9() -> Outcome {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let w = 1.0 / 3f64.sqrt();
    let ghz = Tensor222::from_real([h, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, h]);
    let w_state = Tensor222::from_real([0.0, w, w, 0.0, w, 0.0, 0.0, 0.0]);
    let (u, v, x) = ([0.6, 0.8], [1.0, 0.0], [h, -h]);
    let mut prod = [0.0; 8];
    for (n, p) in prod.iter_mut().enumerate() {
        *p = u[n >> 2] * v[(n >> 1) & 1] * x[n & 1];
    }
    let prod = Tensor222::from_real(prod);
    let (tg, tw, tp) = (three_tangle(&ghz), three_tangle(&w_state), three_tangle(&prod));
    Outcome::new(
        (tg - 1.0).abs() <= 1e-12 && tw.abs() <= 1e-12 && tp.abs() <= 1e-12,
        format!("tau(GHZ) = {tg:.15}, tau(W) = {tw:.1e}, tau(product) = {tp:.1e}"),
    )
}

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let scans = run_scans();
    let outcomes = [
        criterion_1(),
        criterion_2(&mut rng),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(&scans),
        criterion_8(&scans),
        criterion_9(),
    ];
    let mut all = true;
    for (i, o) in outcomes.iter().enumerate() {
        all &= o.pass;
        println!("criterion {}: {} {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
