//! Moments of character sums and their divisor-count and random-model forms.
//!
//! For `x^k ≤ q` three quantities coincide:
//! the character average `φ(q)^{-1} Σ_χ |Σ_{n≤x} χ(n) f(n)|^{2k}`,
//! the divisor side `Σ_{N ≤ x^k, (N,q)=1} |d_{k,f}(N, x)|²`,
//! and `E|Σ_{n≤x, (n,q)=1} X_n f(n)|^{2k}` for the random multiplicative model.

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{gcd, primes_up_to, SpfSieve};
use crate::characters::{argmax_nonprincipal, CharacterGroup};
use crate::error::{LabError, Result};
use crate::numeric::{floor_u64, pairwise_sum, pairwise_sum_complex};
use crate::weight::WeightFunction;

/// Maximum number of table entries `⌊x⌋^k`.
pub const DEFAULT_TABLE_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq)]
enum Counts {
    Exact(Vec<i64>),
    Float(Vec<Complex64>),
}

/// `N ↦ d_{k,f}(N, x)` for `N ≤ ⌊x⌋^k`; index 0 is unused.
#[derive(Debug, Clone, PartialEq)]
pub struct DivisorCountTable {
    pub k: u32,
    pub x: f64,
    pub f: WeightFunction,
    pub q: u64,
    counts: Counts,
}

impl DivisorCountTable {
    /// Largest `N` in the table, `⌊x⌋^k`.
    pub fn max_n(&self) -> u64 {
        match &self.counts {
            Counts::Exact(v) => v.len() as u64 - 1,
            Counts::Float(v) => v.len() as u64 - 1,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.counts, Counts::Exact(_))
    }

    /// Integer entries, when the weight is integer valued.
    pub fn exact_counts(&self) -> Option<&[i64]> {
        match &self.counts {
            Counts::Exact(v) => Some(v),
            Counts::Float(_) => None,
        }
    }

    pub fn value(&self, n: u64) -> Complex64 {
        match &self.counts {
            Counts::Exact(v) => Complex64::new(v.get(n as usize).copied().unwrap_or(0) as f64, 0.0),
            Counts::Float(v) => v.get(n as usize).copied().unwrap_or_default(),
        }
    }

    /// Entries with `gcd(N, q) > 1` are kept but flagged here.
    pub fn is_flagged(&self, n: u64) -> bool {
        gcd(n, self.q) != 1
    }

    /// `Σ_N d_{k,f}(N, x)`.
    pub fn total(&self) -> Complex64 {
        match &self.counts {
            Counts::Exact(v) => Complex64::new(v.iter().map(|&c| c as i128).sum::<i128>() as f64, 0.0),
            Counts::Float(v) => pairwise_sum_complex(v),
        }
    }
}

fn table_len(xs: u64, k: u32, cap: u64) -> Result<u64> {
    match xs.checked_pow(k) {
        Some(n) if n <= cap => Ok(n),
        _ => Err(LabError::resource(format!(
            "table size x^k = {xs}^{k} exceeds the cap of {cap} entries"
        ))),
    }
}

fn check_k(k: u32) -> Result<()> {
    if k == 0 {
        return Err(LabError::domain("k must be at least 1"));
    }
    Ok(())
}

/// Build `d_{k,f}(·, x)` by truncated Dirichlet self-convolution.
pub fn divisor_counts(k: u32, x: f64, f: &WeightFunction, q: u64) -> Result<DivisorCountTable> {
    divisor_counts_capped(k, x, f, q, DEFAULT_TABLE_CAP)
}

pub fn divisor_counts_capped(k: u32, x: f64, f: &WeightFunction, q: u64, cap: u64) -> Result<DivisorCountTable> {
    check_k(k)?;
    if q == 0 {
        return Err(LabError::domain("q must be positive"));
    }
    let xs = floor_u64(x);
    table_len(xs, k, cap)?;
    let counts = match f.int_table(xs) {
        Some(base) if k == 1 => Counts::Exact(base),
        Some(base) => {
            let mut cur = convolve_exact(&base, &base)?;
            for _ in 2..k {
                cur = convolve_exact(&cur, &base)?;
            }
            Counts::Exact(cur)
        }
        None => {
            let base = f.table(xs);
            let mut cur = base.clone();
            for _ in 1..k {
                cur = convolve_float(&cur, &base);
            }
            Counts::Float(cur)
        }
    };
    Ok(DivisorCountTable {
        k,
        x,
        f: f.clone(),
        q,
        counts,
    })
}

fn convolve_exact(prev: &[i64], base: &[i64]) -> Result<Vec<i64>> {
    let xs = base.len() - 1;
    let mut out = vec![0i64; (prev.len() - 1) * xs + 1];
    for (big, &a) in prev.iter().enumerate().skip(1) {
        if a == 0 {
            continue;
        }
        for (m, &b) in base.iter().enumerate().skip(1) {
            if b == 0 {
                continue;
            }
            let slot = &mut out[big * m];
            *slot = a
                .checked_mul(b)
                .and_then(|t| slot.checked_add(t))
                .ok_or(LabError::Overflow("divisor_counts"))?;
        }
    }
    Ok(out)
}

fn convolve_float(prev: &[Complex64], base: &[Complex64]) -> Vec<Complex64> {
    let xs = base.len() - 1;
    let zero = Complex64::new(0.0, 0.0);
    let mut out = vec![zero; (prev.len() - 1) * xs + 1];
    for (big, &a) in prev.iter().enumerate().skip(1) {
        if a == zero {
            continue;
        }
        for (m, &b) in base.iter().enumerate().skip(1) {
            out[big * m] += a * b;
        }
    }
    out
}

/// `mask[n]` is true for squarefree `n ≥ 1`.
fn squarefree_mask(limit: u64) -> Vec<bool> {
    let mut mask = vec![true; limit as usize + 1];
    mask[0] = false;
    let root = (limit as f64).sqrt() as u64 + 1;
    for p in primes_up_to(root) {
        let sq = p * p;
        let mut m = sq;
        while m <= limit {
            mask[m as usize] = false;
            m += sq;
        }
    }
    mask
}

fn divisor_side_terms(table: &DivisorCountTable, squarefree_only: bool) -> Vec<(u64, Complex64)> {
    let sf = squarefree_only.then(|| squarefree_mask(table.max_n()));
    (1..=table.max_n())
        .filter(|&n| !table.is_flagged(n))
        .filter(|&n| sf.as_ref().is_none_or(|m| m[n as usize]))
        .map(|n| (n, table.value(n)))
        .collect()
}

/// `Σ_{N ≤ x^k, (N,q)=1} |d_{k,f}(N, x)|²`, optionally restricted to squarefree `N`.
pub fn moment_divisor_side(k: u32, x: f64, q: u64, f: &WeightFunction, squarefree_only: bool) -> Result<f64> {
    let table = divisor_counts(k, x, f, q)?;
    if let Some(v) = exact_divisor_side(&table, squarefree_only)? {
        return Ok(v as f64);
    }
    let terms: Vec<f64> = divisor_side_terms(&table, squarefree_only)
        .into_iter()
        .map(|(_, d)| d.norm_sqr())
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Integer form of [`moment_divisor_side`] for integer-valued weights.
pub fn moment_divisor_side_exact(k: u32, x: f64, q: u64, f: &WeightFunction, squarefree_only: bool) -> Result<u128> {
    let table = divisor_counts(k, x, f, q)?;
    exact_divisor_side(&table, squarefree_only)?
        .ok_or_else(|| LabError::domain("exact moments need an integer-valued weight"))
}

fn exact_divisor_side(table: &DivisorCountTable, squarefree_only: bool) -> Result<Option<u128>> {
    let Some(counts) = table.exact_counts() else {
        return Ok(None);
    };
    let sf = squarefree_only.then(|| squarefree_mask(table.max_n()));
    let mut total = 0u128;
    for (n, &c) in counts.iter().enumerate().skip(1) {
        if c == 0 || table.is_flagged(n as u64) || sf.as_ref().is_some_and(|m| !m[n]) {
            continue;
        }
        let sq = (c as i128 * c as i128) as u128;
        total = total.checked_add(sq).ok_or(LabError::Overflow("moment_divisor_side"))?;
    }
    Ok(Some(total))
}

/// Character-side average, with the exact value when it could be computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharacterMoment {
    pub value: f64,
    /// Exact rational integer, for integer weights and groups small enough
    /// for cyclotomic arithmetic.
    pub exact: Option<u128>,
    /// Whether `⌊x⌋^k ≤ q`, the range where the moment identity holds.
    pub identity_valid: bool,
}

/// `φ(q)^{-1} Σ_χ |Σ_{n ≤ x} χ(n) f(n)|^{2k}`.
pub fn moment_character_side(k: u32, x: f64, q: u64, f: &WeightFunction) -> Result<CharacterMoment> {
    check_k(k)?;
    let group = CharacterGroup::new(q)?;
    let xs = floor_u64(x);
    let identity_valid = xs.checked_pow(k).is_some_and(|v| v <= q);
    let sums = group.all_sums(x, f)?;
    let value = float_average(&sums, k, group.order());
    let exact = if f.is_integer_valued() {
        exact_character_side(&group, k, x, f)?
    } else {
        None
    };
    Ok(CharacterMoment {
        value,
        exact,
        identity_valid,
    })
}

fn float_average(sums: &[Complex64], k: u32, order: u64) -> f64 {
    let terms: Vec<f64> = sums.iter().map(|s| s.norm_sqr().powi(k as i32)).collect();
    pairwise_sum(&terms) / order as f64
}

/// Budget for the cyclotomic path, in coefficient multiplications.
const CYCLOTOMIC_BUDGET: u64 = 4_000_000_000;

/// Exact `Σ_χ |S_χ|^{2k} / φ(q)` computed in `Z[ζ_L]`. Returns `None` when the
/// computation would exceed the work budget.
pub fn exact_character_side(group: &CharacterGroup, k: u32, x: f64, f: &WeightFunction) -> Result<Option<u128>> {
    let l = group.exponent() as usize;
    let work = group.order().saturating_mul((l * l) as u64).saturating_mul(k as u64);
    if work > CYCLOTOMIC_BUDGET {
        return Ok(None);
    }
    let sums = group.cyclotomic_sums(x, f)?;
    let mut acc = vec![0i128; l];
    for s in &sums {
        let s: Vec<i128> = s.iter().map(|&c| c as i128).collect();
        let conj: Vec<i128> = (0..l).map(|j| s[(l - j) % l]).collect();
        let norm = cyclic_mul(&s, &conj)?;
        let mut power = norm.clone();
        for _ in 1..k {
            power = cyclic_mul(&power, &norm)?;
        }
        for (a, p) in acc.iter_mut().zip(&power) {
            *a = a.checked_add(*p).ok_or(LabError::Overflow("exact_character_side"))?;
        }
    }
    let reduced = reduce_mod_cyclotomic(&acc, l as u64)?;
    if reduced.iter().skip(1).any(|&c| c != 0) {
        return Err(LabError::invariant("character moment is not a rational integer"));
    }
    let total = reduced.first().copied().unwrap_or(0);
    let phi = group.order() as i128;
    if total < 0 || total % phi != 0 {
        return Err(LabError::invariant(format!(
            "Σ_χ |S_χ|^2k = {total} is not a nonnegative multiple of φ(q) = {phi}"
        )));
    }
    Ok(Some((total / phi) as u128))
}

fn cyclic_mul(a: &[i128], b: &[i128]) -> Result<Vec<i128>> {
    let l = a.len();
    let mut out = vec![0i128; l];
    let nz: Vec<(usize, i128)> = b.iter().copied().enumerate().filter(|&(_, v)| v != 0).collect();
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for &(j, bj) in &nz {
            let slot = &mut out[(i + j) % l];
            *slot = ai
                .checked_mul(bj)
                .and_then(|t| slot.checked_add(t))
                .ok_or(LabError::Overflow("cyclic_mul"))?;
        }
    }
    Ok(out)
}

/// Coefficients of the `m`-th cyclotomic polynomial, lowest degree first.
fn cyclotomic_polynomial(m: u64) -> Vec<i128> {
    // Φ_m = Π_{d | m} (x^d − 1)^{μ(m/d)}
    let mut num = vec![1i128];
    let mut den = vec![1i128];
    for d in 1..=m {
        if m % d != 0 {
            continue;
        }
        let mu = crate::arith::moebius(m / d).expect("positive");
        let mut factor = vec![0i128; d as usize + 1];
        factor[0] = -1;
        factor[d as usize] = 1;
        match mu {
            1 => num = poly_mul(&num, &factor),
            -1 => den = poly_mul(&den, &factor),
            _ => {}
        }
    }
    let (quot, rem) = poly_divmod(&num, &den);
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

fn poly_mul(a: &[i128], b: &[i128]) -> Vec<i128> {
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Division by a monic polynomial.
fn poly_divmod(a: &[i128], b: &[i128]) -> (Vec<i128>, Vec<i128>) {
    let db = b.len() - 1;
    let mut rem = a.to_vec();
    if a.len() <= db {
        return (vec![0], rem);
    }
    let mut quot = vec![0i128; a.len() - db];
    for i in (db..a.len()).rev() {
        let c = rem[i];
        if c == 0 {
            continue;
        }
        quot[i - db] = c;
        for (j, &bj) in b.iter().enumerate() {
            rem[i - db + j] -= c * bj;
        }
    }
    rem.truncate(db.max(1));
    (quot, rem)
}

fn reduce_mod_cyclotomic(a: &[i128], m: u64) -> Result<Vec<i128>> {
    let phi = cyclotomic_polynomial(m);
    let db = phi.len() - 1;
    let mut rem = a.to_vec();
    for i in (db..rem.len()).rev() {
        let c = rem[i];
        if c == 0 {
            continue;
        }
        for (j, &pj) in phi.iter().enumerate() {
            let slot = &mut rem[i - db + j];
            *slot = c
                .checked_mul(pj)
                .and_then(|t| slot.checked_sub(t))
                .ok_or(LabError::Overflow("reduce_mod_cyclotomic"))?;
        }
    }
    rem.truncate(db.max(1));
    Ok(rem)
}

/// The random multiplicative model restricted to `n ≤ x`.
///
/// `X_p = e(θ_p)` with `θ_p` a 53-bit uniform drawn from a ChaCha stream keyed
/// by `(seed, sample index, prime index)`, so any sample can be regenerated
/// alone and results do not depend on scheduling.
#[derive(Debug, Clone)]
pub struct RandomModelSampler {
    pub seed: u64,
    primes: Vec<u64>,
    sieve: SpfSieve,
}

impl RandomModelSampler {
    pub fn new(seed: u64, x: f64) -> Self {
        let xs = floor_u64(x).max(1);
        RandomModelSampler {
            seed,
            primes: primes_up_to(xs),
            sieve: SpfSieve::new(xs),
        }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// `X_p` for every prime `p ≤ x`, in prime order.
    pub fn prime_values(&self, sample: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(sample);
        (0..self.primes.len())
            .map(|i| {
                rng.set_word_pos(2 * i as u128);
                let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
                Complex64::from_polar(1.0, std::f64::consts::TAU * u)
            })
            .collect()
    }

    /// `X_n` for `0 ≤ n ≤ x` (with `X_0 = 0`), extended completely multiplicatively.
    pub fn values(&self, sample: u64) -> Vec<Complex64> {
        let xs = self.sieve.limit() as usize;
        let xp = self.prime_values(sample);
        let mut out = vec![Complex64::new(0.0, 0.0); xs + 1];
        if xs >= 1 {
            out[1] = Complex64::new(1.0, 0.0);
        }
        for n in 2..=xs {
            let p = self.sieve.smallest_prime_factor(n as u64);
            let idx = self.primes.partition_point(|&r| r < p);
            out[n] = xp[idx] * out[n / p as usize];
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Mean of `|Σ_{n≤x, (n,q)=1} X_n f(n)|^{2k}` over `samples` draws, with a
/// jackknife standard error.
pub fn moment_monte_carlo(k: u32, x: f64, q: u64, f: &WeightFunction, samples: u64, seed: u64) -> Result<MonteCarloEstimate> {
    check_k(k)?;
    if samples < 100 {
        return Err(LabError::param("samples", "at least 100 samples are required"));
    }
    if q == 0 {
        return Err(LabError::domain("q must be positive"));
    }
    let xs = floor_u64(x);
    let fv = f.table(xs);
    let coprime: Vec<usize> = (1..=xs as usize).filter(|&n| gcd(n as u64, q) == 1).collect();
    let sampler = RandomModelSampler::new(seed, x);
    let draws: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|s| {
            if xs == 0 {
                return 0.0;
            }
            let xv = sampler.values(s);
            let terms: Vec<Complex64> = coprime.iter().map(|&n| xv[n] * fv[n]).collect();
            pairwise_sum_complex(&terms).norm_sqr().powi(k as i32)
        })
        .collect();
    let (estimate, std_error) = jackknife_mean(&draws);
    Ok(MonteCarloEstimate {
        estimate,
        std_error,
        samples,
    })
}

/// Sample mean and its jackknife standard error.
pub fn jackknife_mean(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let total = pairwise_sum(xs);
    let mean = total / n;
    let dev: Vec<f64> = xs
        .iter()
        .map(|&v| {
            let loo = (total - v) / (n - 1.0);
            (loo - mean).powi(2)
        })
        .collect();
    (mean, ((n - 1.0) / n * pairwise_sum(&dev)).sqrt())
}

/// Intermediate quantities of the principal-character argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaDiagnostics {
    /// `Σ_{n≤x} χ₀(n)`.
    pub delta0: f64,
    /// `|Σ_{n≤x} χ₀(n) f(n)|`.
    pub delta1: f64,
    /// `Σ_{n≤x} χ₀(n) |f(n)|²`.
    pub delta2: f64,
    /// `φ(q)^{-1} Σ_χ |Σ_{n≤x} χ(n) f(n)|^{2k}`.
    pub average: f64,
    /// `Δ_f(x, q)`.
    pub delta_max: f64,
    pub witness: u64,
    pub identity_valid: bool,
    /// `Δ₁² ≤ Δ₀Δ₂` (checked with relative slack 1e-12).
    pub cauchy_schwarz: bool,
    /// `Δ_f(x, q) ≥ bound / slack`.
    pub bound_holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaLowerBound {
    /// `average^{1/2k}`.
    pub bound: f64,
    pub slack: f64,
    pub diagnostics: DeltaDiagnostics,
}

pub const DEFAULT_DELTA_SLACK: f64 = 2.0;

/// `(average moment)^{1/2k}` as a lower-bound proxy for `Δ_f(x, q)`, checked
/// against the measured maximum.
pub fn delta_lower_bound(q: u64, x: f64, k: u32, f: &WeightFunction) -> Result<DeltaLowerBound> {
    delta_lower_bound_with_slack(q, x, k, f, DEFAULT_DELTA_SLACK)
}

pub fn delta_lower_bound_with_slack(q: u64, x: f64, k: u32, f: &WeightFunction, slack: f64) -> Result<DeltaLowerBound> {
    check_k(k)?;
    if q <= 2 {
        return Err(LabError::domain(format!("q must exceed 2, got {q}")));
    }
    if !(x >= 1.0) {
        return Err(LabError::domain(format!("x must be ≥ 1, got {x}")));
    }
    if !(slack > 0.0) {
        return Err(LabError::param("slack", "must be positive"));
    }
    let group = CharacterGroup::new(q)?;
    let sums = group.all_sums(x, f)?;
    let average = float_average(&sums, k, group.order());
    let (witness, delta_max) = argmax_nonprincipal(&sums);
    let xs = floor_u64(x);
    let fv = f.table(xs);
    let coprime: Vec<usize> = (1..=xs as usize).filter(|&n| gcd(n as u64, q) == 1).collect();
    let delta0 = coprime.len() as f64;
    let delta1 = pairwise_sum_complex(&coprime.iter().map(|&n| fv[n]).collect::<Vec<_>>()).norm();
    let delta2 = pairwise_sum(&coprime.iter().map(|&n| fv[n].norm_sqr()).collect::<Vec<_>>());
    let bound = average.powf(1.0 / (2.0 * k as f64));
    let diagnostics = DeltaDiagnostics {
        delta0,
        delta1,
        delta2,
        average,
        delta_max,
        witness: witness as u64,
        identity_valid: xs.checked_pow(k).is_some_and(|v| v <= q),
        cauchy_schwarz: delta1 * delta1 <= delta0 * delta2 * (1.0 + 1e-12),
        bound_holds: delta_max >= bound / slack,
    };
    Ok(DeltaLowerBound {
        bound,
        slack,
        diagnostics,
    })
}

/// The bracket `(Σ♭)^{1/2k} ≤ M^{1/2k} ≤ x^{1/2} (log x / k)^{(k−1)²/2k} e^{Ck}`
/// for `f = 1`, `q = 1`, with the smallest `C` making the right inequality hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SquarefreeBracket {
    pub squarefree_root: f64,
    pub full_root: f64,
    /// `None` when `log x / k ≤ 0`.
    pub measured_c: Option<f64>,
}

pub fn squarefree_bracket(k: u32, x: f64) -> Result<SquarefreeBracket> {
    let sf = moment_divisor_side_exact(k, x, 1, &WeightFunction::Unit, true)? as f64;
    let full = moment_divisor_side_exact(k, x, 1, &WeightFunction::Unit, false)? as f64;
    let e = 1.0 / (2.0 * k as f64);
    let (sr, fr) = (sf.powf(e), full.powf(e));
    let lk = x.ln() / k as f64;
    let measured_c = (lk > 0.0).then(|| {
        let shape = x.sqrt() * lk.powf(((k - 1) * (k - 1)) as f64 * e);
        (fr / shape).ln() / k as f64
    });
    Ok(SquarefreeBracket {
        squarefree_root: sr,
        full_root: fr,
        measured_c,
    })
}
