//! Real characters `n ↦ (D/n)` attached to fundamental discriminants: the
//! residue classes that force `(D/p) = 1` for all small primes, discriminant
//! enumeration, and scans for large real character sums.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{is_fundamental_discriminant, is_prime, kronecker, primes_up_to, SpfSieve};
use crate::error::{LabError, Result};
use crate::numeric::floor_u64;
use crate::smooth::smooth_enumerate;

/// Largest `|D|` range scanned in one call.
pub const SCAN_CAP: u64 = 100_000_000;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Negative,
    Both,
}

impl Sign {
    fn admits(self, d: i64) -> bool {
        match self {
            Sign::Positive => d > 0,
            Sign::Negative => d < 0,
            Sign::Both => true,
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "positive" | "pos" => Ok(Sign::Positive),
            "-" | "negative" | "neg" => Ok(Sign::Negative),
            "both" | "+-" => Ok(Sign::Both),
            _ => Err(LabError::param("sign", format!("expected positive, negative or both, got {s:?}"))),
        }
    }
}

/// `a (mod b)` with `b = 4 Π_{p ≤ y} p`, `a ≡ 1 (mod 8)` and `(a/p) = 1` for
/// odd `p ≤ y`. The representative is always `a = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SmoothSplittingClass {
    pub y: u64,
    pub a: u64,
    pub b: u64,
}

impl SmoothSplittingClass {
    pub fn contains(&self, d: i64) -> bool {
        d.rem_euclid(self.b as i64) as u64 == self.a
    }
}

pub fn smooth_splitting_class(y: u64) -> Result<SmoothSplittingClass> {
    if y < 2 {
        return Err(LabError::domain(format!("y must be at least 2, got {y}")));
    }
    let mut b: u64 = 4;
    for p in primes_up_to(y) {
        b = b
            .checked_mul(p)
            .filter(|&v| v <= i64::MAX as u64)
            .ok_or_else(|| LabError::resource(format!("b(y) overflows 64 bits for y = {y}")))?;
    }
    Ok(SmoothSplittingClass { y, a: 1, b })
}

/// `mask[i]` is true when `lo + i` is squarefree.
fn squarefree_segment(lo: u64, hi: u64) -> Vec<bool> {
    if hi < lo {
        return Vec::new();
    }
    let mut mask = vec![true; (hi - lo + 1) as usize];
    if lo == 0 {
        mask[0] = false;
    }
    let root = (hi as f64).sqrt() as u64 + 1;
    for p in primes_up_to(root) {
        let sq = p * p;
        if sq > hi {
            break;
        }
        let mut m = lo.div_ceil(sq) * sq;
        while m <= hi {
            mask[(m - lo) as usize] = false;
            m += sq;
        }
    }
    mask
}

fn abs_range(lo: f64, hi: f64) -> Result<Option<(u64, u64)>> {
    if lo.is_nan() || hi.is_nan() {
        return Err(LabError::domain("range bounds must be numbers"));
    }
    let lo_i = lo.max(1.0).ceil() as u64;
    let hi_i = floor_u64(hi);
    if hi_i < lo_i {
        return Ok(None);
    }
    if hi_i - lo_i > SCAN_CAP {
        return Err(LabError::resource(format!(
            "discriminant range of {} values exceeds {SCAN_CAP}",
            hi_i - lo_i
        )));
    }
    Ok(Some((lo_i, hi_i)))
}

/// Fundamental discriminants with `lo ≤ |D| ≤ hi`, of the given sign and (if
/// given) in the class `a (mod b)`, ascending.
pub fn fundamental_discriminants_in(
    lo: f64,
    hi: f64,
    sign: Sign,
    class: Option<&SmoothSplittingClass>,
) -> Result<Vec<i64>> {
    let Some((lo, hi)) = abs_range(lo, hi)? else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    if let Some(c) = class {
        for s in [-1i64, 1] {
            if !sign.admits(s) {
                continue;
            }
            // D = s·m with m in [lo, hi] and D ≡ a (mod b)
            let b = c.b as i64;
            let target = if s > 0 { c.a as i64 } else { (-(c.a as i64)).rem_euclid(b) };
            let first = lo as i64 + (target - lo as i64).rem_euclid(b);
            let mut m = first;
            while m <= hi as i64 {
                let d = s * m;
                if is_fundamental_discriminant(d)? {
                    out.push(d);
                }
                m += b;
            }
        }
    } else {
        let sf = squarefree_segment(lo, hi);
        let sf4 = squarefree_segment(lo.div_ceil(4), hi / 4);
        let lo4 = lo.div_ceil(4);
        for m in lo..=hi {
            for s in [-1i64, 1] {
                if !sign.admits(s) {
                    continue;
                }
                let d = s * m as i64;
                let ok = match d.rem_euclid(4) {
                    1 => sf[(m - lo) as usize] && d != 1,
                    0 => {
                        let q = d / 4;
                        matches!(q.rem_euclid(4), 2 | 3) && sf4[(m / 4 - lo4) as usize]
                    }
                    _ => false,
                };
                if ok {
                    out.push(d);
                }
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// `(D/n)` for `0 ≤ n ≤ limit`, extended multiplicatively from the primes.
fn kronecker_table(d: i64, sieve: &SpfSieve, limit: u64) -> Vec<i8> {
    let mut out = vec![0i8; limit as usize + 1];
    if limit >= 1 {
        out[1] = 1;
    }
    for n in 2..=limit as usize {
        let p = sieve.smallest_prime_factor(n as u64) as usize;
        out[n] = if p == n { kronecker(d, n as u64) } else { out[p] * out[n / p] };
    }
    out
}

fn require_fundamental(d: i64) -> Result<()> {
    if !is_fundamental_discriminant(d)? {
        return Err(LabError::domain(format!("{d} is not a fundamental discriminant")));
    }
    Ok(())
}

/// `Σ_{n ≤ x} (D/n)` for a fundamental discriminant `D`.
pub fn real_char_sum(d: i64, x: f64) -> Result<i64> {
    require_fundamental(d)?;
    let xs = floor_u64(x);
    // (D/·) has period |D| and sums to 0 over a period.
    let period = d.unsigned_abs();
    let rem = xs % period;
    Ok((1..=rem).map(|n| kronecker(d, n) as i64).sum())
}

/// `(max_{q≤|D|≤2q} |Σ_{n≤x} (D/n)|, witness D)`; ties go to the smallest
/// `|D|`, then to the positive sign.
pub fn real_delta_search(q: f64, x: f64, sign: Sign) -> Result<(i64, i64)> {
    if !(q >= 3.0) {
        return Err(LabError::domain(format!("q must be at least 3, got {q}")));
    }
    let ds = fundamental_discriminants_in(q, 2.0 * q, sign, None)?;
    if ds.is_empty() {
        return Err(LabError::domain(format!("no fundamental discriminant with {q} ≤ |D| ≤ {}", 2.0 * q)));
    }
    let xs = floor_u64(x);
    let sieve = SpfSieve::new(xs.max(1));
    let sums: Vec<i64> = ds
        .par_iter()
        .map(|&d| {
            let t = kronecker_table(d, &sieve, xs);
            t[1..].iter().map(|&v| v as i64).sum()
        })
        .collect();
    let mut order: Vec<usize> = (0..ds.len()).collect();
    order.sort_by_key(|&i| (ds[i].unsigned_abs(), ds[i] < 0));
    let mut best = (sums[order[0]].abs(), ds[order[0]]);
    for &i in &order[1..] {
        if sums[i].abs() > best.0 {
            best = (sums[i].abs(), ds[i]);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem9Search {
    pub class: SmoothSplittingClass,
    pub best_d: Option<i64>,
    pub best_sum: i64,
    /// `Ψ(x, y)`.
    pub target: u64,
    pub achieved: bool,
    pub scanned: u64,
    /// Scanned `D` with `(D/p) ≠ 1` for some `p ≤ y` (expected 0).
    pub class_violations: u64,
    /// Scanned `D` whose sum over `S(x, y)` differs from `Ψ(x, y)` (expected 0).
    pub smooth_part_mismatches: u64,
}

/// Scan the positive fundamental `D ≡ 1 (mod b(y))` in `[q, 2q]` for the
/// largest `Σ_{n≤x} (D/n)`, and compare with `Ψ(x, y)`.
pub fn theorem9_search(q: f64, x: f64, y: u64) -> Result<Theorem9Search> {
    let class = smooth_splitting_class(y)?;
    let ds = fundamental_discriminants_in(q, 2.0 * q, Sign::Positive, Some(&class))?;
    let xs = floor_u64(x);
    let smooth = if xs >= 1 {
        smooth_enumerate(xs as f64, y as f64, 0)?.into_members()
    } else {
        Vec::new()
    };
    let target = smooth.len() as u64;
    let small_primes = primes_up_to(y);
    let sieve = SpfSieve::new(xs.max(1));
    let rows: Vec<(i64, bool, bool)> = ds
        .par_iter()
        .map(|&d| {
            let t = kronecker_table(d, &sieve, xs);
            let sum: i64 = t[1..].iter().map(|&v| v as i64).sum();
            let class_ok = small_primes.iter().all(|&p| kronecker(d, p) == 1);
            let smooth_sum: i64 = smooth.iter().map(|&n| t[n as usize] as i64).sum();
            (sum, class_ok, smooth_sum == target as i64)
        })
        .collect();
    let mut best: Option<(i64, i64)> = None;
    for (&d, &(s, _, _)) in ds.iter().zip(&rows) {
        if best.is_none_or(|(bs, _)| s > bs) {
            best = Some((s, d));
        }
    }
    let best_sum = best.map_or(0, |b| b.0);
    Ok(Theorem9Search {
        class,
        best_d: best.map(|b| b.1),
        best_sum,
        target,
        achieved: best.is_some() && best_sum >= target as i64,
        scanned: ds.len() as u64,
        class_violations: rows.iter().filter(|r| !r.1).count() as u64,
        smooth_part_mismatches: rows.iter().filter(|r| !r.2).count() as u64,
    })
}

/// `Σ_{n ≤ |D|/N} (D/n)`.
pub fn tail_sum(d: i64, n_param: f64) -> Result<i64> {
    if !(n_param >= 1.0) {
        return Err(LabError::domain(format!("N must be at least 1, got {n_param}")));
    }
    real_char_sum(d, d.unsigned_abs() as f64 / n_param)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailRow {
    pub d: i64,
    pub sum: i64,
    /// `sum / √|D|`.
    pub normalized: f64,
    /// `sum / ((e^γ/π) √|D| log log |D|)`.
    pub paley_ratio: f64,
}

/// Tail sums over the negative fundamental `D ≡ 1 (mod b(y))` with
/// `q ≤ |D| ≤ 2q`, ordered by `|D|`.
pub fn tail_sum_experiment(q: f64, n_param: f64, y: u64) -> Result<Vec<TailRow>> {
    if !(n_param >= 2.0) {
        return Err(LabError::domain(format!("N must be at least 2, got {n_param}")));
    }
    let class = smooth_splitting_class(y)?;
    let mut ds = fundamental_discriminants_in(q, 2.0 * q, Sign::Negative, Some(&class))?;
    ds.sort_by_key(|d| d.unsigned_abs());
    let scale = EULER_GAMMA.exp() / std::f64::consts::PI;
    ds.par_iter()
        .map(|&d| {
            let sum = tail_sum(d, n_param)?;
            let ad = d.unsigned_abs() as f64;
            let root = ad.sqrt();
            Ok(TailRow {
                d,
                sum,
                normalized: sum as f64 / root,
                paley_ratio: sum as f64 / (scale * root * ad.ln().ln()),
            })
        })
        .collect()
}

/// The smallest prime strictly greater than `t`.
pub fn smallest_prime_above(t: f64) -> u64 {
    let mut p = if t < 2.0 { 2 } else { t.floor() as u64 + 1 };
    while !is_prime(p) {
        p += 1;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::character_group;
    use crate::weight::WeightFunction;

    #[test]
    fn class_examples() {
        for (y, b) in [(2u64, 8u64), (3, 24), (5, 120), (7, 840)] {
            let c = smooth_splitting_class(y).unwrap();
            assert_eq!((c.a, c.b), (1, b));
        }
        assert!(smooth_splitting_class(1).is_err());
        assert!(smooth_splitting_class(43).is_ok());
        assert!(matches!(smooth_splitting_class(60), Err(LabError::Resource(_))));
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(fundamental_discriminants_in(5.0, 12.0, Sign::Positive, None).unwrap(), vec![5, 8, 12]);
        let c = smooth_splitting_class(3).unwrap();
        assert_eq!(fundamental_discriminants_in(1.0, 100.0, Sign::Positive, Some(&c)).unwrap(), vec![73, 97]);
        assert!(fundamental_discriminants_in(10.0, 9.0, Sign::Both, None).unwrap().is_empty());
        assert_eq!(fundamental_discriminants_in(3.0, 8.0, Sign::Negative, None).unwrap(), vec![-8, -7, -4, -3]);
    }

    #[test]
    fn sieve_scan_matches_predicate() {
        let all = fundamental_discriminants_in(1.0, 3000.0, Sign::Both, None).unwrap();
        let brute: Vec<i64> = (-3000i64..=3000)
            .filter(|&d| d != 0 && is_fundamental_discriminant(d).unwrap())
            .collect();
        assert_eq!(all, brute);
        let c = smooth_splitting_class(5).unwrap();
        let classed = fundamental_discriminants_in(1.0, 3000.0, Sign::Both, Some(&c)).unwrap();
        let expect: Vec<i64> = brute.iter().copied().filter(|&d| c.contains(d)).collect();
        assert_eq!(classed, expect);
    }

    #[test]
    fn char_sum_examples() {
        assert_eq!(real_char_sum(5, 4.0).unwrap(), 0);
        assert_eq!(real_char_sum(-7, 1.0).unwrap(), 1);
        assert_eq!(real_char_sum(73, 4.0).unwrap(), 4);
        assert!(real_char_sum(9, 4.0).is_err());
        for d in fundamental_discriminants_in(1.0, 2000.0, Sign::Both, None).unwrap() {
            assert_eq!(real_char_sum(d, d.unsigned_abs() as f64).unwrap(), 0);
            let direct: i64 = (1..=150u64).map(|n| kronecker(d, n) as i64).sum();
            assert_eq!(real_char_sum(d, 150.0).unwrap(), direct);
        }
    }

    #[test]
    fn delta_search_examples() {
        assert_eq!(real_delta_search(5.0, 4.0, Sign::Both).unwrap(), (2, -7));
        assert_eq!(real_delta_search(5.0, 1.0, Sign::Both).unwrap(), (1, 5));
        assert_eq!(real_delta_search(5.0, 1.0, Sign::Negative).unwrap(), (1, -7));
        let ds = fundamental_discriminants_in(70.0, 140.0, Sign::Both, None).unwrap();
        let (best, _) = ds
            .iter()
            .map(|&d| ((1..=20u64).map(|n| kronecker(d, n) as i64).sum::<i64>().abs(), d))
            .fold((i64::MIN, 0), |acc, v| if v.0 > acc.0 { v } else { acc });
        assert_eq!(real_delta_search(70.0, 20.0, Sign::Both).unwrap().0, best);
        assert!(real_delta_search(2.0, 4.0, Sign::Both).is_err());
    }

    #[test]
    fn theorem9_examples() {
        let r = theorem9_search(10_000.0, 50.0, 5).unwrap();
        assert!(r.scanned > 0);
        assert_eq!(r.class_violations, 0);
        assert_eq!(r.smooth_part_mismatches, 0);
        assert_eq!(r.target, crate::smooth::psi_count(50.0, 5.0, 0).unwrap());
    }

    #[test]
    fn prime_above() {
        assert_eq!(smallest_prime_above(0.3), 2);
        assert_eq!(smallest_prime_above(7.0), 11);
        assert_eq!(smallest_prime_above(7.5), 11);
        assert_eq!(smallest_prime_above((1e6f64).ln() / 3.0), 5);
    }

    #[test]
    fn tail_examples() {
        assert_eq!(tail_sum(-7, 7.0).unwrap(), 1);
        assert_eq!(tail_sum(-8, 2.0).unwrap(), 2);
        let rows = tail_sum_experiment(2000.0, 2.0, 3).unwrap();
        assert!(!rows.is_empty());
        assert!(rows.iter().all(|r| r.d < 0 && r.d % 24 == -23));
        assert!(tail_sum_experiment(2000.0, 1.5, 3).is_err());
    }

    #[test]
    fn agrees_with_character_sum() {
        for p in (5u64..=1000).filter(|&p| is_prime(p) && p % 4 == 1) {
            let g = character_group(p).unwrap();
            let leg = g.characters().find(|c| c.order() == 2).unwrap();
            for x in [p as f64 / 3.0, p as f64 / 2.0] {
                let a = real_char_sum(p as i64, x).unwrap() as f64;
                let b = leg.sum(x, &WeightFunction::Unit).unwrap();
                assert!((a - b.re).abs() < 1e-9 && b.im.abs() < 1e-9);
            }
        }
    }
}
