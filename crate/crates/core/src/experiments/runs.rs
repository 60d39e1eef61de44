use num_complex::Complex64;
use rayon::prelude::*;

use super::{Cell, ExperimentOutput, Params};
use crate::arith::{is_prime, SpfSieve};
use crate::characters::{argmax_nonprincipal, CharacterGroup};
use crate::dickman::{dickman_rho, DickmanInterpolant, DEFAULT_STEPS_PER_UNIT};
use crate::error::{LabError, Result};
use crate::moments::{
    divisor_counts, jackknife_mean, moment_character_side, moment_divisor_side, moment_divisor_side_exact,
    moment_monte_carlo, RandomModelSampler,
};
use crate::numeric::{floor_u64, pairwise_sum_complex};
use crate::polya::{poisson_identity_check, polya_truncated_sum, smoothed_moment_bound, smoothing_chain};
use crate::realchar::{smallest_prime_above, smooth_splitting_class, tail_sum_experiment, theorem9_search};
use crate::smooth::{omega_census, psi_count};
use crate::weight::WeightFunction;

/// Largest number of elementary operations an experiment may schedule.
const WORK_CAP: f64 = 1e10;

fn guard_work(what: &str, ops: f64) -> Result<()> {
    if ops > WORK_CAP {
        return Err(LabError::resource(format!("{what} needs about {ops:.3e} operations (cap {WORK_CAP:e})")));
    }
    Ok(())
}

fn small_int(p: &Params, key: &str, min: u64, max: u64) -> Result<u32> {
    let v = p.uint_min(key, min)?;
    if v > max {
        return Err(LabError::param(key, format!("must be at most {max}, got {v}")));
    }
    Ok(v as u32)
}

pub fn parse_weight(spec: &str) -> Result<WeightFunction> {
    let bad = |why: &str| LabError::param("weight", format!("{why}: {spec:?}"));
    let (head, arg) = match spec.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (spec, None),
    };
    let number = || -> Result<f64> {
        arg.and_then(|a| a.parse::<f64>().ok())
            .filter(|v| v.is_finite())
            .ok_or_else(|| bad("expected a numeric argument"))
    };
    match head {
        "unit" | "1" => Ok(WeightFunction::Unit),
        "moebius" | "mu" => Ok(WeightFunction::Moebius),
        "divisor" | "d" => Ok(WeightFunction::DivisorCount),
        "smooth" => Ok(WeightFunction::SmoothIndicator { y: number()? }),
        "phase" => Ok(WeightFunction::PowerPhase { t: number()? }),
        _ => Err(bad("unknown weight")),
    }
}

fn log_log(q: f64) -> Result<f64> {
    let v = q.ln().ln();
    if !(v > 0.0) {
        return Err(LabError::param("q", "log log q must be positive (q ≥ 16) for the default formula"));
    }
    Ok(v)
}

fn default_splitting_bound(q: f64) -> u64 {
    smallest_prime_above(q.ln() / 3.0)
}

pub(super) fn moment_verify(p: &Params, seed: u64) -> Result<ExperimentOutput> {
    let q = p.uint_min("q", 1)?;
    let x = p.real_min("x", 0.0)?;
    let k = small_int(p, "k", 1, 64)?;
    let f = parse_weight(p.text("weight"))?;
    let samples = p.uint_min("samples", 0)?;
    if samples != 0 && samples < 100 {
        return Err(LabError::param("samples", "must be 0 or at least 100"));
    }
    let table = divisor_counts(k, x, &f, q)?;
    let mut out = ExperimentOutput::new(&["n", "d_re", "d_im", "coprime"]);
    for n in 1..=table.max_n() {
        let d = table.value(n);
        out.push_row(vec![n.into(), d.re.into(), d.im.into(), (!table.is_flagged(n)).into()]);
    }
    let chars = moment_character_side(k, x, q, &f)?;
    let divisor_float = moment_divisor_side(k, x, q, &f, false)?;
    let divisor_exact = if table.is_exact() {
        Some(moment_divisor_side_exact(k, x, q, &f, false)?)
    } else {
        None
    };
    let equal = match (chars.exact, divisor_exact) {
        (Some(a), Some(b)) => a == b,
        _ => (chars.value - divisor_float).abs() <= 1e-9 * divisor_float.abs().max(1.0),
    };
    out.summarize("character_side", chars.exact.map_or(Cell::Real(chars.value), Cell::from_u128));
    out.summarize("character_side_float", chars.value);
    out.summarize("divisor_side", divisor_exact.map_or(Cell::Real(divisor_float), Cell::from_u128));
    out.summarize("exact", chars.exact.is_some() && divisor_exact.is_some());
    out.summarize("equal", equal);
    out.summarize("identity_valid", chars.identity_valid);
    if samples > 0 {
        let mc = moment_monte_carlo(k, x, q, &f, samples, seed)?;
        out.summarize("mc_estimate", mc.estimate);
        out.summarize("mc_std_error", mc.std_error);
        out.summarize("mc_z", (mc.estimate - divisor_float) / mc.std_error);
    }
    if chars.identity_valid && !equal {
        return Err(LabError::invariant(format!(
            "moment identity failed for q={q}, x={x}, k={k}: character side {} vs divisor side {divisor_float}",
            chars.value
        )));
    }
    Ok(out)
}

/// Nearest-rank quantile of a sorted slice.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let idx = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

pub(super) fn conjecture1_scan(p: &Params, _seed: u64) -> Result<ExperimentOutput> {
    let q = p.uint_min("q", 3)?;
    let x = p.real_min("x", 1.0)?;
    let a = p.real("A");
    let qf = q as f64;
    let y = match p.opt_real("y") {
        Some(y) => y,
        None => (qf.ln() + x.ln().powi(2)) * log_log(qf)?.powf(a),
    };
    if !(y >= 2.0) {
        return Err(LabError::param("y", format!("must be at least 2, got {y}")));
    }
    let group = CharacterGroup::new(q)?;
    let xs = floor_u64(x);
    guard_work("conjecture1-scan", 2.0 * xs.min(q) as f64 * group.order() as f64)?;
    let sums = group.all_sums(x, &WeightFunction::Unit)?;
    let psis = group.all_sums(x, &WeightFunction::SmoothIndicator { y })?;
    let mut out = ExperimentOutput::new(&["index", "sum_abs", "psi_abs", "diff_abs"]);
    let mut diffs = Vec::with_capacity(sums.len());
    for (i, (s, ps)) in sums.iter().zip(&psis).enumerate().skip(1) {
        let d = (s - ps).norm();
        diffs.push(d);
        out.push_row(vec![(i as u64).into(), s.norm().into(), ps.norm().into(), d.into()]);
    }
    if y >= x && diffs.iter().any(|&d| d != 0.0) {
        return Err(LabError::invariant("y ≥ x but some character has a nonzero smooth remainder"));
    }
    let psi_xy = psi_count(x, y, 0)?;
    let scale = psi_xy as f64 / log_log(qf).map_or(f64::NAN, |l| l * l);
    let mut sorted = diffs.clone();
    sorted.sort_by(f64::total_cmp);
    out.summarize("y", y);
    out.summarize("characters", diffs.len() as u64);
    out.summarize("psi_xy", psi_xy);
    out.summarize("psi_xy_chi0", psis[0].re);
    if !sorted.is_empty() {
        out.summarize("diff_median", quantile(&sorted, 0.5));
        out.summarize("diff_q90", quantile(&sorted, 0.9));
        out.summarize("diff_q99", quantile(&sorted, 0.99));
        out.summarize("diff_max", *sorted.last().unwrap());
    }
    out.summarize("sum_max", argmax_nonprincipal(&sums).1);
    out.summarize("error_scale", Cell::real_or_null(scale));
    out.summarize(
        "above_error_scale",
        if scale.is_finite() { Cell::UInt(diffs.iter().filter(|&&d| d > scale).count() as u64) } else { Cell::Null },
    );
    out.summarize("exception_allowance", Cell::real_or_null(qf.powf(1.0 - 1.0 / x.ln())));
    Ok(out)
}

pub(super) fn rho_table(p: &Params, _seed: u64) -> Result<ExperimentOutput> {
    let max_u = p.real_min("max_u", 0.0)?;
    if max_u > 50.0 {
        return Err(LabError::param("max_u", format!("must be at most 50, got {max_u}")));
    }
    let step = p.real("step");
    if !(step > 0.0) {
        return Err(LabError::param("step", "must be positive"));
    }
    let count = (max_u / step + 1e-9).floor() as u64 + 1;
    if count > 10_000_000 {
        return Err(LabError::resource(format!("{count} grid points requested")));
    }
    let rho = DickmanInterpolant::new(DEFAULT_STEPS_PER_UNIT, max_u.max(2.0))?;
    let mut out = ExperimentOutput::new(&["u", "rho"]);
    for i in 0..count {
        let u = i as f64 * step;
        out.push_row(vec![u.into(), rho.eval(u.min(rho.u_max()))?.into()]);
    }
    out.summarize("points", count);
    out.summarize("grid_step", rho.step());
    out.summarize("max_delay_residual", rho.max_delay_residual());
    Ok(out)
}

/// Integers spaced logarithmically in `[2, top]`, deduplicated.
fn log_grid(top: u64, points: u64) -> Vec<u64> {
    if top <= 2 || points <= 1 {
        return vec![top.max(1)];
    }
    let (lo, hi) = (2f64.ln(), (top as f64).ln());
    let mut g: Vec<u64> = (0..points)
        .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp().round() as u64)
        .map(|v| v.clamp(2, top))
        .collect();
    g.dedup();
    g
}

pub(super) fn delta_table(p: &Params, _seed: u64) -> Result<ExperimentOutput> {
    let q = p.uint_min("q", 3)?;
    let x_max = p.opt_real("x_max").unwrap_or((q - 1) as f64);
    if !(x_max >= 1.0) {
        return Err(LabError::param("x_max", format!("must be at least 1, got {x_max}")));
    }
    let points = p.uint_min("points", 1)?;
    let c = p.real("c");
    let group = CharacterGroup::new(q)?;
    let top = floor_u64(x_max);
    guard_work("delta-table", top as f64 * group.order() as f64)?;
    let grid = log_grid(top, points);
    let roots: Vec<Complex64> = (0..group.exponent()).map(|j| group.root(j)).collect();
    let mut sums = vec![Complex64::new(0.0, 0.0); group.order() as usize];
    let mut snapshots = Vec::with_capacity(grid.len());
    let mut next = 0;
    for n in 1..=top {
        if let Some(a) = group.value_exponents_all(n as i64) {
            for (s, &aj) in sums.iter_mut().zip(&a) {
                *s += roots[aj as usize];
            }
        }
        while next < grid.len() && grid[next] == n {
            snapshots.push(argmax_nonprincipal(&sums));
            next += 1;
        }
    }

    let lq = (q as f64).ln();
    let llq = lq.ln();
    let mut out = ExperimentOutput::new(super::find_experiment("delta-table")?.columns);
    let mut best_ratio = (0.0f64, 0u64);
    for (&x, &(witness, delta)) in grid.iter().zip(&snapshots) {
        let xf = x as f64;
        let lx = xf.ln();
        let root = xf.sqrt();
        let b = lx / (10.0 * lq).ln();
        let bi = b.floor();
        let shape_small = (b >= 1.0).then(|| xf.powf(0.5 + bi / (2.0 * b)) / (4.0 * lx).powf(bi));
        let tau = lx / (lq * llq).sqrt();
        let eta = tau + 1.0 / tau;
        let mid_root = (lq / llq).sqrt();
        let k_mid = (c / eta * mid_root).floor();
        let shape_mid = root * (c * (1.0 + (eta * tau).ln()) / eta * mid_root).exp();
        let shape_upper = root * tau.powf(lq / lx);
        let k_power = (lq / lx).floor();
        let shape_power = root * lq.powf((k_power - 1.0).powi(2) / (2.0 * k_power));
        let ratio = delta / root;
        if ratio > best_ratio.0 {
            best_ratio = (ratio, x);
        }
        out.push_row(vec![
            x.into(),
            delta.into(),
            (witness as u64).into(),
            root.into(),
            ratio.into(),
            b.into(),
            shape_small.map_or(Cell::Null, Cell::real_or_null),
            Cell::real_or_null(tau),
            if k_mid.is_finite() && k_mid >= 0.0 { Cell::UInt(k_mid as u64) } else { Cell::Null },
            Cell::real_or_null(shape_mid),
            Cell::real_or_null(shape_upper),
            if k_power.is_finite() { Cell::UInt(k_power as u64) } else { Cell::Null },
            Cell::real_or_null(shape_power),
        ]);
    }
    out.summarize("phi", group.order());
    out.summarize("x_max", top);
    out.summarize("max_delta_over_sqrt_x", best_ratio.0);
    out.summarize("argmax_x", best_ratio.1);
    Ok(out)
}

pub(super) fn paley_search(p: &Params, _seed: u64) -> Result<ExperimentOutput> {
    let q = p.real_min("q", 3.0)?;
    let n = p.real_min("N", 2.0)?;
    let y = match p.opt_int("y") {
        Some(_) => p.uint_min("y", 2)?,
        None => default_splitting_bound(q),
    };
    let class = smooth_splitting_class(y)?;
    guard_work("paley-search", q * q / n / 3.0)?;
    let rows = tail_sum_experiment(q, n, y)?;
    let mut out = ExperimentOutput::new(&["d", "sum", "normalized", "paley_ratio"]);
    for r in &rows {
        out.push_row(vec![r.d.into(), r.sum.into(), r.normalized.into(), r.paley_ratio.into()]);
    }
    let fold = |f: fn(&crate::realchar::TailRow) -> f64, max: bool| {
        rows.iter()
            .map(f)
            .reduce(if max { f64::max } else { f64::min })
            .map_or(Cell::Null, Cell::Real)
    };
    out.summarize("y", y);
    out.summarize("b", class.b);
    out.summarize("discriminants", rows.len() as u64);
    out.summarize("max_normalized", fold(|r| r.normalized, true));
    out.summarize("min_normalized", fold(|r| r.normalized, false));
    out.summarize("max_paley_ratio", fold(|r| r.paley_ratio, true));
    out.summarize("min_paley_ratio", fold(|r| r.paley_ratio, false));
    Ok(out)
}

pub(super) fn polya_residual(p: &Params, _seed: u64) -> Result<ExperimentOutput> {
    let q = p.uint_min("q", 3)?;
    let x = p.opt_real("x").unwrap_or((q / 2) as f64);
    if !(x >= 0.0) {
        return Err(LabError::param("x", "must be non-negative"));
    }
    let h = match p.opt_int("H") {
        Some(_) => p.uint_min("H", 1)?,
        None => q,
    };
    let group = CharacterGroup::new(q)?;
    guard_work("polya-residual", group.order() as f64 * (2.0 * h as f64 + x))?;
    let primitive: Vec<u64> = group
        .characters()
        .filter(|c| !c.is_principal() && c.is_primitive())
        .map(|c| c.index())
        .collect();
    let results: Vec<_> = primitive
        .par_iter()
        .map(|&i| polya_truncated_sum(&group.character(i)?, x, h))
        .collect::<Result<_>>()?;
    let mut out = ExperimentOutput::new(super::find_experiment("polya-residual")?.columns);
    let mut max_residual = 0.0f64;
    let mut max_ratio = 0.0f64;
    for (&i, r) in primitive.iter().zip(&results) {
        let ratio = r.residual / r.bound_shape;
        max_residual = max_residual.max(r.residual);
        max_ratio = max_ratio.max(ratio);
        out.push_row(vec![
            i.into(),
            r.direct.re.into(),
            r.direct.im.into(),
            r.expansion.re.into(),
            r.expansion.im.into(),
            r.residual.into(),
            r.bound_shape.into(),
            ratio.into(),
        ]);
    }
    out.summarize("x", x);
    out.summarize("H", h);
    out.summarize("characters", primitive.len() as u64);
    out.summarize("max_residual", max_residual);
    out.summarize("max_ratio", max_ratio);
    Ok(out)
}

pub(super) fn poisson_harness(p: &Params, _seed: u64) -> Result<ExperimentOutput> {
    let q = p.uint_min("q", 5)?;
    if !is_prime(q) {
        return Err(LabError::param("q", format!("must be prime, got {q}")));
    }
    let r = small_int(p, "r", 2, crate::polya::MAX_FOLD as u64)?;
    if r % 2 != 0 {
        return Err(LabError::param("r", format!("must be even, got {r}")));
    }
    let n = p.uint_min("N", 1)?;
    let k = small_int(p, "k", 1, 64)?;
    let x_scale = q as f64 / (r as f64 * n as f64);
    guard_work("poisson-harness", (q as f64) * (q as f64))?;
    let group = CharacterGroup::new(q)?;
    let even: Vec<u64> = group
        .characters()
        .filter(|c| !c.is_principal() && c.is_even())
        .map(|c| c.index())
        .collect();
    let rows: Vec<_> = even
        .par_iter()
        .map(|&i| {
            let chi = group.character(i)?;
            Ok((poisson_identity_check(&chi, x_scale, r, None)?, smoothing_chain(&chi, n, r)?))
        })
        .collect::<Result<_>>()?;
    let mut out = ExperimentOutput::new(super::find_experiment("poisson-harness")?.columns);
    let mut max_gap = 0.0f64;
    let mut chain_all = true;
    for (&i, (pc, ch)) in even.iter().zip(&rows) {
        max_gap = max_gap.max(pc.gap);
        chain_all &= ch.holds;
        out.push_row(vec![
            i.into(),
            pc.lhs.re.into(),
            pc.lhs.im.into(),
            pc.rhs.re.into(),
            pc.rhs.im.into(),
            pc.gap.into(),
            ch.smoothed.into(),
            ch.partial_max.into(),
            ch.holds.into(),
        ]);
    }
    out.summarize("X", x_scale);
    out.summarize("characters", even.len() as u64);
    out.summarize("max_gap", max_gap);
    out.summarize("chain_holds", chain_all);
    let rn = r as f64 * n as f64;
    let k_limit = (r as f64 - 1.0) * (q as f64 / 2.0).ln() / (r as f64 * rn.ln());
    out.summarize("k_limit", Cell::real_or_null(k_limit));
    if (k as f64) <= k_limit {
        let b = smoothed_moment_bound(q, n, r, k)?;
        out.summarize("moment_bound", b.bound);
        out.summarize("expectation", Cell::from_u128(b.expectation));
        out.summarize("measured_max", b.measured_max);
        out.summarize("witness", b.witness);
        out.summarize("measured_over_bound", b.measured_max / b.bound);
    } else {
        out.summarize("moment_bound", Cell::Null);
    }
    Ok(out)
}

pub(super) fn theorem9(p: &Params, _seed: u64) -> Result<ExperimentOutput> {
    let q = p.real_min("q", 3.0)?;
    let x = p.real_min("x", 1.0)?;
    let y = match p.opt_int("y") {
        Some(_) => p.uint_min("y", 2)?,
        None => default_splitting_bound(q),
    };
    guard_work("theorem9-search", q * x)?;
    let s = theorem9_search(q, x, y)?;
    let mut out = ExperimentOutput::new(super::find_experiment("theorem9-search")?.columns);
    out.push_row(vec![
        y.into(),
        s.class.b.into(),
        s.scanned.into(),
        s.best_d.into(),
        s.best_sum.into(),
        s.target.into(),
        s.achieved.into(),
        s.class_violations.into(),
        s.smooth_part_mismatches.into(),
    ]);
    out.summarize("y", y);
    out.summarize("achieved", s.achieved);
    out.summarize("best_sum", s.best_sum);
    out.summarize("target", s.target);
    out.summarize("scanned", s.scanned);
    if s.class_violations > 0 || s.smooth_part_mismatches > 0 {
        return Err(LabError::invariant(format!(
            "{} class violations and {} smooth-part mismatches",
            s.class_violations, s.smooth_part_mismatches
        )));
    }
    Ok(out)
}

fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Constants in the Hardy–Ramanujan shape `C (x/log x)(log log x + C')^{y−1}/(y−1)!`.
pub const HR_C: f64 = 35.0;
pub const HR_C_PRIME: f64 = 4.0;

/// `(x/log x)(log log x + C')^{y−1}/(y−1)!` for `y ≥ 1`.
pub fn hardy_ramanujan_shape(x: f64, y: u64) -> f64 {
    let lx = x.ln();
    ((y - 1) as f64 * (lx.ln() + HR_C_PRIME).ln() - ln_factorial(y - 1)).exp() * x / lx
}

pub(super) fn round_census(p: &Params, _seed: u64) -> Result<ExperimentOutput> {
    let x = p.real_min("x", 16.0)?;
    let counts = omega_census(x)?;
    let lx = x.ln();
    let llx = lx.ln();
    let mut out = ExperimentOutput::new(super::find_experiment("round-census")?.columns);
    let mut hr_max = 0.0f64;
    for (y, &count) in counts.iter().enumerate() {
        let y = y as u64;
        let (hr, hr_ratio) = if y >= 1 {
            let s = hardy_ramanujan_shape(x, y);
            hr_max = hr_max.max(count as f64 / s);
            (Cell::Real(s), Cell::Real(count as f64 / s))
        } else {
            (Cell::Null, Cell::Null)
        };
        let yf = y as f64;
        let big_l = if y >= 2 { (lx / (yf * yf.ln())).ln() } else { f64::NAN };
        let (asym, asym_ratio) = if big_l > 0.0 {
            let s = (yf * big_l.ln() - ln_factorial(y)).exp() * x / lx;
            (Cell::Real(s), Cell::Real(count as f64 / s))
        } else {
            (Cell::Null, Cell::Null)
        };
        let in_range = llx <= yf && yf <= lx / (3.0 * llx);
        out.push_row(vec![y.into(), count.into(), hr, hr_ratio, asym, asym_ratio, in_range.into()]);
    }
    let total: u64 = counts.iter().sum();
    if total != floor_u64(x) {
        return Err(LabError::invariant(format!("census total {total} differs from ⌊x⌋")));
    }
    out.summarize("total", total);
    out.summarize("hr_constant_measured", hr_max);
    out.summarize("hr_bound_holds", hr_max <= HR_C);
    Ok(out)
}

pub(super) fn smooth_vs_rho(p: &Params, _seed: u64) -> Result<ExperimentOutput> {
    let x = p.real_min("x", 2.0)?;
    let u_max = p.real_min("u_max", 1.0)?;
    if u_max > 50.0 {
        return Err(LabError::param("u_max", format!("must be at most 50, got {u_max}")));
    }
    let step = p.real("step");
    if !(step > 0.0) {
        return Err(LabError::param("step", "must be positive"));
    }
    guard_work("smooth-vs-rho", x * ((u_max - 1.0) / step + 1.0))?;
    let count = ((u_max - 1.0) / step + 1e-9).floor() as u64 + 1;
    let mut out = ExperimentOutput::new(&["u", "y", "psi", "density", "rho", "rel_dev"]);
    let mut worst = 0.0f64;
    for i in 0..count {
        let u = 1.0 + i as f64 * step;
        let y = x.powf(1.0 / u);
        if y < 2.0 {
            break;
        }
        let psi = psi_count(x, y, 0)?;
        let density = psi as f64 / x;
        let rho = dickman_rho(u)?;
        let rel = (density - rho) / rho;
        worst = worst.max(rel.abs());
        out.push_row(vec![u.into(), y.into(), psi.into(), density.into(), rho.into(), rel.into()]);
    }
    out.summarize("max_abs_rel_dev", worst);
    Ok(out)
}

pub(super) fn model_tail(p: &Params, seed: u64) -> Result<ExperimentOutput> {
    let x = p.real_min("x", 2.0)?;
    let y = p.real_min("y", 2.0)?;
    let k = small_int(p, "k", 1, 64)?;
    let samples = p.uint_min("samples", 100)?;
    let xs = floor_u64(x);
    guard_work("model-tail", xs as f64 * samples as f64)?;
    let sieve = SpfSieve::new(xs.max(1));
    let mut groups: Vec<Vec<usize>> = vec![Vec::new()];
    for n in 1..=xs {
        let ell = sieve.factor(n).iter().filter(|&&(pr, _)| pr as f64 > y).map(|&(_, e)| e as usize).sum::<usize>();
        if groups.len() <= ell {
            groups.resize(ell + 1, Vec::new());
        }
        groups[ell].push(n as usize);
    }
    let sampler = RandomModelSampler::new(seed, x);
    let kk = k as i32;
    // Column 0 is the full non-smooth part, column ℓ the part with Ω_{>y} = ℓ.
    let draws: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let v = sampler.values(s);
            let parts: Vec<Complex64> = groups
                .iter()
                .map(|g| pairwise_sum_complex(&g.iter().map(|&n| v[n]).collect::<Vec<_>>()))
                .collect();
            let rest = pairwise_sum_complex(&parts[1..]);
            std::iter::once(rest.norm_sqr().powi(kk))
                .chain(parts[1..].iter().map(|z| z.norm_sqr().powi(kk)))
                .collect()
        })
        .collect();
    let column = |j: usize| jackknife_mean(&draws.iter().map(|d| d[j]).collect::<Vec<_>>());
    let e = 1.0 / (2.0 * k as f64);
    let mut out = ExperimentOutput::new(&["ell", "count", "moment_root"]);
    let mut minkowski = 0.0;
    for ell in 1..groups.len() {
        let root = column(ell).0.powf(e);
        minkowski += root;
        out.push_row(vec![(ell as u64).into(), (groups[ell].len() as u64).into(), root.into()]);
    }
    let (moment, se) = column(0);
    let psi = groups[0].len() as f64;
    let lx = x.ln();
    let shape = psi * (k as f64 * y.ln() * lx * lx / y).sqrt();
    let root = moment.powf(e);
    out.summarize("psi_xy", psi);
    out.summarize("moment", moment);
    out.summarize("moment_std_error", se);
    out.summarize("moment_root", root);
    out.summarize("minkowski_sum", minkowski);
    out.summarize("shape", shape);
    out.summarize("ratio", root / shape);
    Ok(out)
}
