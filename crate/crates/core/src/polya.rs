//! Pólya's Fourier expansion of `Σ_{n≤x} χ(n)` and the smoothed sums built
//! from the box-spline kernels `Φ_r`.
//!
//! `Φ_1` is the indicator of `(−1, 1)` and `Φ_r = Φ_{r−1} ⋆ Φ_1`, with
//! `Φ̂_r(ξ) = ∫ Φ_r(t) e(−ξt) dt = (sin 2πξ / πξ)^r`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::Serialize;

use crate::arith::is_prime;
use crate::characters::{Character, CharacterGroup};
use crate::error::{LabError, Result};
use crate::moments::moment_divisor_side_exact;
use crate::numeric::{e, floor_u64, pairwise_sum_complex};
use crate::weight::WeightFunction;

/// Largest supported fold count; keeps the integer piece coefficients in `i128`.
pub const MAX_FOLD: u32 = 24;

/// `Φ_r` as `r` polynomial pieces on `[−r + 2i, −r + 2i + 2]`, each stored in
/// the local variable `s = t − (−r + 2i)` with integer coefficients, to be
/// divided by `(r − 1)!`.
#[derive(Debug, Clone, PartialEq)]
pub struct BSplineKernel {
    r: u32,
    /// `pieces[i][d]` is the coefficient of `s^d` on piece `i`.
    pieces: Vec<Vec<i128>>,
    denom: i128,
}

fn binomial(n: u32, k: u32) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

impl BSplineKernel {
    pub fn new(r: u32) -> Result<Self> {
        if r == 0 {
            return Err(LabError::domain("fold count r must be at least 1"));
        }
        if r > MAX_FOLD {
            return Err(LabError::domain(format!("fold count r must be at most {MAX_FOLD}")));
        }
        // Φ_r(t) = Σ_j (−1)^j C(r, j) (t + r − 2j)_+^{r−1} / (r−1)!.
        // On piece i, t + r − 2j = s + 2(i − j) and the terms with j ≤ i are active.
        let deg = r - 1;
        let pieces = (0..r)
            .map(|i| {
                let mut coeffs = vec![0i128; deg as usize + 1];
                for j in 0..=i {
                    let sign = if j % 2 == 0 { 1 } else { -1 };
                    let c = sign * binomial(r, j);
                    let shift = 2 * (i - j) as i128;
                    for d in 0..=deg {
                        coeffs[d as usize] += c * binomial(deg, d) * shift.pow(deg - d);
                    }
                }
                coeffs
            })
            .collect();
        let denom = (1..r as i128).product::<i128>().max(1);
        Ok(BSplineKernel { r, pieces, denom })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    fn locate(&self, t: f64) -> Option<(usize, f64)> {
        let r = self.r as f64;
        // Work on the left half; Φ_r is even.
        let t = -t.abs();
        if t <= -r {
            return None;
        }
        let pos = (t + r) / 2.0;
        let i = (pos.floor() as usize).min(self.r as usize - 1);
        Some((i, t + r - 2.0 * i as f64))
    }

    /// `Φ_r(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        if self.r == 1 {
            return if t.abs() < 1.0 { 1.0 } else { 0.0 };
        }
        let Some((i, s)) = self.locate(t) else {
            return 0.0;
        };
        let v = self.pieces[i].iter().rev().fold(0.0, |acc, &c| acc * s + c as f64);
        v / self.denom as f64
    }

    /// `Φ_r(t)` at a rational point, exactly.
    pub fn eval_exact(&self, t: Ratio<i128>) -> Ratio<i128> {
        let r = Ratio::from_integer(self.r as i128);
        let t = if t > Ratio::from_integer(0) { -t } else { t };
        if self.r == 1 {
            return Ratio::from_integer((t > -r) as i128);
        }
        if t <= -r {
            return Ratio::from_integer(0);
        }
        let two = Ratio::from_integer(2);
        let i = (((t + r) / two).floor().to_integer() as usize).min(self.r as usize - 1);
        let s = t + r - two * Ratio::from_integer(i as i128);
        let v = self.pieces[i]
            .iter()
            .rev()
            .fold(Ratio::from_integer(0), |acc, &c| acc * s + Ratio::from_integer(c));
        v / Ratio::from_integer(self.denom)
    }

    /// Breakpoints `−r, −r+2, …, r`.
    pub fn breakpoints(&self) -> Vec<f64> {
        (0..=self.r).map(|i| -(self.r as f64) + 2.0 * i as f64).collect()
    }
}

/// `Φ_r(t)`.
pub fn bspline_kernel(r: u32, t: f64) -> Result<f64> {
    Ok(BSplineKernel::new(r)?.eval(t))
}

/// `Φ̂_r(ξ) = (sin 2πξ / πξ)^r`, and `2^r` at `ξ = 0`.
pub fn bspline_kernel_hat(r: u32, xi: f64) -> Result<f64> {
    if r == 0 {
        return Err(LabError::domain("fold count r must be at least 1"));
    }
    if xi.abs() < 1e-8 {
        // Taylor: sin(2πξ)/(πξ) = 2(1 − (2πξ)²/6 + …)
        let z = 2.0 * PI * xi;
        return Ok((2.0 * (1.0 - z * z / 6.0)).powi(r as i32));
    }
    Ok(((2.0 * PI * xi).sin() / (PI * xi)).powi(r as i32))
}

/// Result of comparing the truncated Pólya expansion with the direct sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolyaComparison {
    pub expansion: Complex64,
    pub direct: Complex64,
    pub residual: f64,
    /// `1 + q log q / H`.
    pub bound_shape: f64,
}

fn require_primitive(chi: &Character<'_>) -> Result<()> {
    if !chi.is_primitive() {
        return Err(LabError::domain(format!(
            "character {} mod {} is not primitive",
            chi.index(),
            chi.modulus()
        )));
    }
    Ok(())
}

/// `τ(χ)/(2πi) Σ_{0<|h|≤H} χ̄(h)/h · (1 − e(−hx/q))` against `Σ_{n≤x} χ(n)`.
pub fn polya_truncated_sum(chi: &Character<'_>, x: f64, h_max: u64) -> Result<PolyaComparison> {
    require_primitive(chi)?;
    if h_max == 0 {
        return Err(LabError::param("H", "must be at least 1"));
    }
    let q = chi.modulus();
    let qf = q as f64;
    let tau = chi.gauss_sum();
    let mut terms = Vec::with_capacity(2 * h_max as usize);
    for h in 1..=h_max as i64 {
        for hh in [h, -h] {
            let c = chi.evaluate(hh).conj();
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let frac = ((hh as f64) * x / qf).rem_euclid(1.0);
            terms.push(c / hh as f64 * (Complex64::new(1.0, 0.0) - e(-frac)));
        }
    }
    let expansion = tau / Complex64::new(0.0, 2.0 * PI) * pairwise_sum_complex(&terms);
    let direct = chi.sum(x, &WeightFunction::Unit)?;
    Ok(PolyaComparison {
        expansion,
        direct,
        residual: (expansion - direct).norm(),
        bound_shape: 1.0 + qf * qf.ln() / h_max as f64,
    })
}

/// Both sides of the Poisson summation identity for `Φ_r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonCheck {
    /// `Σ_{|n| ≤ rX} χ(n) Φ_r(n/X)`.
    pub lhs: Complex64,
    /// `(Xτ(χ)/q) Σ_{a ∈ Z} χ̄(a) Φ̂_r(aX/q)`, summed in closed form.
    pub rhs: Complex64,
    /// The same sum truncated to `|a| ≤ tail_cut`, when that is affordable.
    pub rhs_truncated: Option<Complex64>,
    pub tail_cut: u64,
    /// Upper bound for the discarded part of the truncated sum.
    pub tail_bound: f64,
    /// `|lhs − rhs|`.
    pub gap: f64,
}

/// Largest truncation evaluated term by term.
pub const TRUNCATED_TERM_CAP: u64 = 2_000_000;

/// Default truncation: the smallest `A` with
/// `(M/(πA))^{r−1} (M/π) X√q/q ≤ 10^{-9}`, where `M = q/X`.
pub fn default_tail_cut(q: u64, x_scale: f64, r: u32) -> u64 {
    let qf = q as f64;
    let m = qf / x_scale;
    let lead = (m / PI) * x_scale * qf.sqrt() / qf;
    if r == 1 {
        return u64::MAX;
    }
    let a = (m / PI) * (lead / 1e-9).powf(1.0 / (r - 1) as f64);
    a.ceil().min(u64::MAX as f64) as u64
}

/// Periodic Bernoulli values `B_r({t})` for `r ≤ MAX_FOLD`.
struct Bernoulli {
    /// Coefficients of `B_r(x)`, lowest degree first.
    coeffs: Vec<f64>,
}

impl Bernoulli {
    fn new(r: u32) -> Bernoulli {
        // Bernoulli numbers with B_1 = −1/2 from Σ_{k<m+1} C(m+1,k) B_k = 0.
        let mut b: Vec<Ratio<i128>> = vec![Ratio::from_integer(1)];
        for m in 1..=r {
            let s: Ratio<i128> = (0..m)
                .map(|k| Ratio::from_integer(binomial(m + 1, k)) * b[k as usize])
                .sum();
            b.push(-s / Ratio::from_integer(m as i128 + 1));
        }
        let coeffs = (0..=r)
            .map(|d| {
                // coefficient of x^d in B_r(x) = Σ_k C(r,k) B_k x^{r−k}
                let k = r - d;
                let c = Ratio::from_integer(binomial(r, k)) * b[k as usize];
                *c.numer() as f64 / *c.denom() as f64
            })
            .collect();
        Bernoulli { coeffs }
    }

    fn periodic(&self, t: f64) -> f64 {
        let f = t - t.floor();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * f + c)
    }
}

/// Check `Σ_n χ(n) Φ_r(n/X) = (Xτ(χ)/q) Σ_a χ̄(a) Φ̂_r(aX/q)` for a primitive
/// even character.
///
/// The right side is evaluated exactly: writing `sin^r` as a sum of
/// exponentials and `χ̄(a) = τ(χ)^{-1} Σ_c χ(c) e(ac/q)` turns it into finitely
/// many sums `Σ_{a≠0} e(at)/a^r = −(2πi)^r B_r({t})/r!`.
pub fn poisson_identity_check(chi: &Character<'_>, x_scale: f64, r: u32, tail_cut: Option<u64>) -> Result<PoissonCheck> {
    require_primitive(chi)?;
    if !chi.is_even() {
        return Err(LabError::domain("the Poisson harness needs an even character"));
    }
    if r < 2 {
        return Err(LabError::domain("the Poisson harness needs r ≥ 2 (Φ_1 is discontinuous)"));
    }
    if !(x_scale > 0.0) || !x_scale.is_finite() {
        return Err(LabError::param("X", "must be positive"));
    }
    let kernel = BSplineKernel::new(r)?;
    let q = chi.modulus();
    let qf = q as f64;
    let tau = chi.gauss_sum();

    let n_max = floor_u64(r as f64 * x_scale) as i64;
    let lhs_terms: Vec<Complex64> = (-n_max..=n_max)
        .map(|n| chi.evaluate(n) * kernel.eval(n as f64 / x_scale))
        .collect();
    let lhs = pairwise_sum_complex(&lhs_terms);

    // Σ_{a≠0} χ̄(a) Φ̂_r(aX/q)
    //   = (q/(πX))^r (2i)^{-r} Σ_j C(r,j)(−1)^{r−j} τ^{-1} Σ_c χ(c) F_r(((2j−r)X + c)/q)
    // with F_r(t) = −(2πi)^r B_r({t}) / r!.
    let bern = Bernoulli::new(r);
    let chi_vals: Vec<Complex64> = (0..q).map(|c| chi.evaluate(c as i64)).collect();
    let mut outer = Vec::with_capacity(r as usize + 1);
    for j in 0..=r {
        let shift = (2.0 * j as f64 - r as f64) * x_scale;
        let inner: Vec<Complex64> = chi_vals
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm_sqr() > 0.0)
            .map(|(c, &v)| v * bern.periodic((shift + c as f64) / qf))
            .collect();
        let sign = if (r - j) % 2 == 0 { 1.0 } else { -1.0 };
        outer.push(pairwise_sum_complex(&inner) * (sign * binomial(r, j) as f64));
    }
    let r_fact: f64 = (1..=r).map(|v| v as f64).product();
    let f_scale = -Complex64::new(0.0, 2.0 * PI).powu(r) / r_fact;
    let pre = (qf / (PI * x_scale)).powi(r as i32) / Complex64::new(0.0, 2.0).powu(r);
    let full = pre * f_scale / tau * pairwise_sum_complex(&outer);
    let rhs = x_scale * tau / qf * full;

    let cut = tail_cut.unwrap_or_else(|| default_tail_cut(q, x_scale, r));
    let m = qf / x_scale;
    let tail_bound = 2.0 * x_scale * qf.sqrt() / qf * (m / PI).powi(r as i32)
        / ((r - 1) as f64 * (cut.max(1) as f64).powi(r as i32 - 1));
    let rhs_truncated = (cut <= TRUNCATED_TERM_CAP).then(|| {
        let terms: Vec<Complex64> = (1..=cut as i64)
            .flat_map(|a| [a, -a])
            .map(|a| {
                let v = chi.evaluate(a).conj();
                if v.norm_sqr() == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                v * bspline_kernel_hat(r, a as f64 * x_scale / qf).expect("r ≥ 2")
            })
            .collect();
        x_scale * tau / qf * pairwise_sum_complex(&terms)
    });
    Ok(PoissonCheck {
        lhs,
        rhs,
        rhs_truncated,
        tail_cut: cut,
        tail_bound,
        gap: (lhs - rhs).norm(),
    })
}

/// Both sides of `|Σ_n χ(n) Φ_r(n/X)| ≤ 2^r max_{t ≤ q/N} |Σ_{n≤t} χ(n)|`
/// with `X = q/(rN)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothingChain {
    pub smoothed: f64,
    pub partial_max: f64,
    pub holds: bool,
}

pub fn smoothing_chain(chi: &Character<'_>, n_param: u64, r: u32) -> Result<SmoothingChain> {
    if n_param == 0 {
        return Err(LabError::param("N", "must be at least 1"));
    }
    let kernel = BSplineKernel::new(r)?;
    let q = chi.modulus() as f64;
    let x_scale = q / (r as f64 * n_param as f64);
    let t_max = floor_u64(q / n_param as f64);
    let mut partial = Complex64::new(0.0, 0.0);
    let mut partial_max = 0.0f64;
    for n in 1..=t_max {
        partial += chi.evaluate(n as i64);
        partial_max = partial_max.max(partial.norm());
    }
    let n_max = floor_u64(r as f64 * x_scale) as i64;
    let terms: Vec<Complex64> = (-n_max..=n_max)
        .map(|n| chi.evaluate(n) * kernel.eval(n as f64 / x_scale))
        .collect();
    let smoothed = pairwise_sum_complex(&terms).norm();
    let rhs = 2f64.powi(r as i32) * partial_max;
    Ok(SmoothingChain {
        smoothed,
        partial_max,
        holds: smoothed <= rhs * (1.0 + 1e-12) + 1e-12,
    })
}

/// The smoothed-moment lower bound and what was measured against it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothedMomentBound {
    /// `(√q/(rN)) · E(|Σ_{a≤N} X_a|^{2k})^{1/2k}`, without the `O(1)` term.
    pub bound: f64,
    /// `E(|Σ_{a≤N} X_a|^{2k})`, exact.
    pub expectation: u128,
    /// `(r−1) log(q/2) / (r log(rN))`.
    pub k_limit: f64,
    /// `max` over nonprincipal even χ of `max_{t ≤ q/N} |Σ_{n≤t} χ(n)|`.
    pub measured_max: f64,
    pub witness: u64,
    pub even_characters: u64,
    /// Whether the smoothing chain held for every even nonprincipal χ.
    pub chain_holds: bool,
}

pub fn smoothed_moment_bound(q: u64, n_param: u64, r: u32, k: u32) -> Result<SmoothedMomentBound> {
    if !is_prime(q) || q < 5 {
        return Err(LabError::domain(format!("q must be a prime ≥ 5, got {q}")));
    }
    if r == 0 || r % 2 != 0 {
        return Err(LabError::domain(format!("r must be a positive even integer, got {r}")));
    }
    if n_param == 0 || k == 0 {
        return Err(LabError::domain("N and k must be at least 1"));
    }
    let qf = q as f64;
    let rn = r as f64 * n_param as f64;
    let k_limit = (r as f64 - 1.0) * (qf / 2.0).ln() / (r as f64 * rn.ln());
    if (k as f64) > k_limit {
        return Err(LabError::domain(format!(
            "k = {k} exceeds (r−1)log(q/2)/(r log(rN)) = {k_limit:.4}"
        )));
    }
    let expectation = moment_divisor_side_exact(k, n_param as f64, 1, &WeightFunction::Unit, false)?;
    let bound = qf.sqrt() / rn * (expectation as f64).powf(1.0 / (2.0 * k as f64));
    let group = CharacterGroup::new(q)?;
    let mut measured_max = 0.0f64;
    let mut witness = 0u64;
    let mut chain_holds = true;
    let mut even_characters = 0u64;
    for chi in group.characters().filter(|c| !c.is_principal() && c.is_even()) {
        even_characters += 1;
        let chain = smoothing_chain(&chi, n_param, r)?;
        chain_holds &= chain.holds;
        if chain.partial_max > measured_max {
            measured_max = chain.partial_max;
            witness = chi.index();
        }
    }
    Ok(SmoothedMomentBound {
        bound,
        expectation,
        k_limit,
        measured_max,
        witness,
        even_characters,
        chain_holds,
    })
}
