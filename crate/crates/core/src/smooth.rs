//! Smooth numbers: the sets `S_ℓ(x, y)` of integers `n ≤ x` with exactly `ℓ`
//! prime factors (with multiplicity) larger than `y`, their counts and
//! weighted sums, and prime-factor census counts.
//!
//! Enumeration is a recursive descent over nondecreasing prime sequences:
//! first the `ℓ` large primes (all `> y`), then every `y`-smooth cofactor
//! that fits below `x`.

use num_complex::Complex64;

use crate::arith::{for_each_factor_stats, gcd, primes_up_to};
use crate::characters::Character;
use crate::error::{LabError, Result};
use crate::numeric::{floor_u64, pairwise_sum, pairwise_sum_complex};
use crate::weight::WeightFunction;

pub const DEFAULT_MEMBER_CAP: u64 = 100_000_000;
pub const CENSUS_CAP: u64 = 100_000_000;

/// The integers `n ≤ x` with exactly `ell` prime factors `> y`, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothSet {
    pub x: f64,
    pub y: f64,
    pub ell: u32,
    members: Vec<u64>,
}

impl SmoothSet {
    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn into_members(self) -> Vec<u64> {
        self.members
    }
}

fn check_bounds(x: f64, y: f64) -> Result<()> {
    if !(x >= 1.0) {
        return Err(LabError::domain(format!("x must be ≥ 1, got {x}")));
    }
    if !(y >= 2.0) {
        return Err(LabError::domain(format!("y must be ≥ 2, got {y}")));
    }
    Ok(())
}

/// Primes `p ≤ y` and, when `ell > 0`, the primes in `(y, x]`.
struct PrimeSplit {
    small: Vec<u64>,
    large: Vec<u64>,
}

impl PrimeSplit {
    fn new(xs: u64, y: f64, ell: u32) -> PrimeSplit {
        let ys = (y.floor() as u64).min(xs.max(1));
        let upper = if ell == 0 { ys } else { xs };
        let all = primes_up_to(upper.max(ys));
        let (small, large): (Vec<u64>, Vec<u64>) = all.into_iter().partition(|&p| p as f64 <= y);
        PrimeSplit { small, large }
    }
}

/// Visit every `y`-smooth `m = cur · (…) ≤ limit` built from `primes[start..]`.
fn walk_smooth<F: FnMut(u64)>(primes: &[u64], start: usize, cur: u64, limit: u64, visit: &mut F) {
    visit(cur);
    for (i, &p) in primes.iter().enumerate().skip(start) {
        if p > limit / cur {
            break;
        }
        walk_smooth(primes, i, cur * p, limit, visit);
    }
}

fn count_smooth(primes: &[u64], start: usize, cur: u64, limit: u64) -> u64 {
    let mut total = 1;
    let budget = limit / cur;
    for (i, &p) in primes.iter().enumerate().skip(start) {
        if p > budget {
            break;
        }
        if p > budget / p {
            // cur·p·p' > limit for every p' ≥ p: each remaining prime ≤ budget adds one.
            let end = primes.partition_point(|&r| r <= budget);
            total += (end - i) as u64;
            break;
        }
        total += count_smooth(primes, i, cur * p, limit);
    }
    total
}

/// Visit every product of exactly `remaining` primes from `large[start..]`
/// (nondecreasing) with `cur · product ≤ limit`.
fn walk_large<F: FnMut(u64)>(large: &[u64], start: usize, cur: u64, remaining: u32, limit: u64, visit: &mut F) {
    if remaining == 0 {
        visit(cur);
        return;
    }
    for (i, &p) in large.iter().enumerate().skip(start) {
        let budget = limit / cur;
        // need p^remaining ≤ budget
        let mut pw = 1u64;
        let mut fits = true;
        for _ in 0..remaining {
            match pw.checked_mul(p) {
                Some(v) if v <= budget => pw = v,
                _ => {
                    fits = false;
                    break;
                }
            }
        }
        if !fits {
            break;
        }
        walk_large(large, i, cur * p, remaining - 1, limit, visit);
    }
}

/// Visit all members of `S_ℓ(x, y)` (unordered).
fn for_each_member<F: FnMut(u64)>(xs: u64, y: f64, ell: u32, visit: &mut F) {
    if xs == 0 {
        return;
    }
    let split = PrimeSplit::new(xs, y, ell);
    let small = &split.small;
    walk_large(&split.large, 0, 1, ell, xs, &mut |big| {
        walk_smooth(small, 0, 1, xs / big, &mut |s| visit(s * big));
    });
}

/// Enumerate `S_ℓ(x, y)`, sorted ascending.
pub fn smooth_enumerate(x: f64, y: f64, ell: u32) -> Result<SmoothSet> {
    smooth_enumerate_capped(x, y, ell, DEFAULT_MEMBER_CAP)
}

pub fn smooth_enumerate_capped(x: f64, y: f64, ell: u32, cap: u64) -> Result<SmoothSet> {
    check_bounds(x, y)?;
    let xs = floor_u64(x);
    let mut members = Vec::new();
    let mut overflow = false;
    for_each_member(xs, y, ell, &mut |n| {
        if members.len() as u64 >= cap {
            overflow = true;
        } else {
            members.push(n);
        }
    });
    if overflow {
        return Err(LabError::resource(format!(
            "S_{ell}({x}, {y}) has more than {cap} members"
        )));
    }
    members.sort_unstable();
    Ok(SmoothSet { x, y, ell, members })
}

/// `Ψ_ℓ(x, y) = |S_ℓ(x, y)|`, counted without materializing the set.
pub fn psi_count(x: f64, y: f64, ell: u32) -> Result<u64> {
    check_bounds(x, y)?;
    let xs = floor_u64(x);
    let split = PrimeSplit::new(xs, y, ell);
    let mut total = 0u64;
    walk_large(&split.large, 0, 1, ell, xs, &mut |big| {
        total += count_smooth(&split.small, 0, 1, xs / big);
    });
    Ok(total)
}

/// `Ψ(x, y; f) = Σ_{n ∈ S(x, y)} f(n)`.
pub fn psi_weighted(x: f64, y: f64, f: &WeightFunction) -> Result<Complex64> {
    let set = smooth_enumerate(x, y, 0)?;
    let terms: Vec<Complex64> = set.members().iter().map(|&n| f.value(n)).collect();
    Ok(pairwise_sum_complex(&terms))
}

/// `Ψ(x, y; χ) = Σ_{n ∈ S(x, y)} χ(n)`.
pub fn psi_character(x: f64, y: f64, chi: &Character<'_>) -> Result<Complex64> {
    let set = smooth_enumerate(x, y, 0)?;
    let terms: Vec<Complex64> = set.members().iter().map(|&n| chi.evaluate(n as i64)).collect();
    Ok(pairwise_sum_complex(&terms))
}

/// `Σ_{n ∈ S(x,y)} n^{−κ}`, or `Σ_{n ∈ S(x,y)} n^{−κ} log(x/n)` when `with_log`.
pub fn smooth_power_sums(x: f64, y: f64, kappa: f64, with_log: bool) -> Result<f64> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(LabError::domain(format!("κ must lie in [0, 1], got {kappa}")));
    }
    let set = smooth_enumerate(x, y, 0)?;
    let terms: Vec<f64> = set
        .members()
        .iter()
        .map(|&n| {
            let nf = n as f64;
            let base = nf.powf(-kappa);
            if with_log {
                base * (x / nf).ln()
            } else {
                base
            }
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Extra conditions for [`prime_factor_census`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CensusConstraint {
    None,
    /// Squarefree and coprime to `m`.
    SquarefreeCoprime { m: u64 },
    /// Every prime factor is `≥ p_min`.
    MinPrime { p_min: u64 },
    /// `Ω(n) = ell` and every prime factor is `> y_bound`.
    ExactLarge { ell: u32, y_bound: f64 },
}

/// Count `n ≤ x` with `ω(n) = omega` (when given) satisfying `constraint`.
///
/// `omega` counts distinct primes, while `ExactLarge` counts with
/// multiplicity; `prime_factor_census(x, Some(y), None)` is `π(x, y)`.
pub fn prime_factor_census(x: f64, omega: Option<u32>, constraint: CensusConstraint) -> Result<u64> {
    let xs = floor_u64(x);
    if xs > CENSUS_CAP {
        return Err(LabError::resource(format!("census bound {xs} exceeds {CENSUS_CAP}")));
    }
    let mut count = 0u64;
    for_each_factor_stats(xs, |n, s| {
        if omega.is_some_and(|w| s.omega != w) {
            return;
        }
        let ok = match constraint {
            CensusConstraint::None => true,
            CensusConstraint::SquarefreeCoprime { m } => s.squarefree && gcd(n, m) == 1,
            CensusConstraint::MinPrime { p_min } => n == 1 || s.min_prime >= p_min,
            CensusConstraint::ExactLarge { ell, y_bound } => {
                s.big_omega == ell && (n == 1 || s.min_prime as f64 > y_bound)
            }
        };
        if ok {
            count += 1;
        }
    });
    Ok(count)
}

/// `π(x, y)` for every `y` at once: `out[y]` counts `n ≤ x` with `ω(n) = y`.
pub fn omega_census(x: f64) -> Result<Vec<u64>> {
    let xs = floor_u64(x);
    if xs > CENSUS_CAP {
        return Err(LabError::resource(format!("census bound {xs} exceeds {CENSUS_CAP}")));
    }
    let mut out = vec![0u64; 16];
    for_each_factor_stats(xs, |_, s| out[s.omega as usize] += 1);
    while out.len() > 1 && *out.last().unwrap() == 0 {
        out.pop();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factorize;
    use crate::characters::character_group;

    /// Sieve oracle: count of prime factors `> y` with multiplicity, per n.
    fn large_factor_counts(xs: u64, y: f64) -> Vec<u32> {
        (0..=xs)
            .map(|n| {
                if n == 0 {
                    return u32::MAX;
                }
                factorize(n)
                    .unwrap()
                    .factors()
                    .iter()
                    .filter(|&&(p, _)| p as f64 > y)
                    .map(|&(_, a)| a)
                    .sum()
            })
            .collect()
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(smooth_enumerate(10.0, 2.0, 0).unwrap().members(), &[1, 2, 4, 8]);
        assert_eq!(smooth_enumerate(10.0, 3.0, 1).unwrap().members(), &[5, 7, 10]);
        assert_eq!(smooth_enumerate(100.0, 5.0, 0).unwrap().len(), 34);
        let oracle = large_factor_counts(100, 5.0);
        assert_eq!(oracle.iter().filter(|&&c| c == 0).count(), 34);
    }

    #[test]
    fn count_examples() {
        assert_eq!(psi_count(10.0, 2.0, 0).unwrap(), 4);
        assert_eq!(psi_count(100.0, 5.0, 0).unwrap(), 34);
        assert_eq!(psi_count(10.0, 3.0, 1).unwrap(), 3);
        assert!(psi_count(0.5, 3.0, 0).is_err());
        assert!(psi_count(10.0, 1.5, 0).is_err());
    }

    #[test]
    fn enumeration_matches_sieve_oracle() {
        let xs = 5000u64;
        for y in [2.0, 3.0, 7.5, 31.0, 100.0] {
            let oracle = large_factor_counts(xs, y);
            for ell in 0..5u32 {
                let expect: Vec<u64> = (1..=xs).filter(|&n| oracle[n as usize] == ell).collect();
                let got = smooth_enumerate(xs as f64, y, ell).unwrap();
                assert_eq!(got.members(), &expect[..], "y={y} ell={ell}");
                assert_eq!(psi_count(xs as f64, y, ell).unwrap(), expect.len() as u64);
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            smooth_enumerate_capped(1000.0, 10.0, 0, 5),
            Err(LabError::Resource(_))
        ));
    }

    #[test]
    fn weighted_examples() {
        assert_eq!(
            psi_weighted(50.0, 5.0, &WeightFunction::Unit).unwrap().re,
            psi_count(50.0, 5.0, 0).unwrap() as f64
        );
        let p4 = psi_weighted(10.0, 3.0, &WeightFunction::PrincipalIndicator { q: 4 }).unwrap();
        assert!((p4.re - 3.0).abs() < 1e-12);
        let g5 = character_group(5).unwrap();
        let leg = g5.characters().find(|c| c.order() == 2).unwrap();
        let v = psi_character(10.0, 3.0, &leg).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn power_sum_examples() {
        assert_eq!(smooth_power_sums(30.0, 3.0, 0.0, false).unwrap(), psi_count(30.0, 3.0, 0).unwrap() as f64);
        assert!((smooth_power_sums(10.0, 2.0, 1.0, false).unwrap() - 1.875).abs() < 1e-12);
        assert!((smooth_power_sums(4.0, 2.0, 0.0, true).unwrap() - 3.0 * 2f64.ln()).abs() < 1e-12);
        assert!(smooth_power_sums(4.0, 2.0, 1.5, false).is_err());
    }

    #[test]
    fn census_examples() {
        assert_eq!(prime_factor_census(10.0, Some(1), CensusConstraint::None).unwrap(), 7);
        for x in [1.0, 10.0, 1000.0] {
            assert_eq!(prime_factor_census(x, Some(0), CensusConstraint::None).unwrap(), 1);
        }
        assert_eq!(
            prime_factor_census(30.0, Some(2), CensusConstraint::SquarefreeCoprime { m: 2 }).unwrap(),
            2
        );
        // Ω(n) = 2 with both factors > 3 up to 60: 25, 35, 49, 55
        assert_eq!(
            prime_factor_census(60.0, None, CensusConstraint::ExactLarge { ell: 2, y_bound: 3.0 }).unwrap(),
            4
        );
        assert_eq!(
            prime_factor_census(30.0, Some(1), CensusConstraint::MinPrime { p_min: 5 }).unwrap(),
            // 5, 7, 11, 13, 17, 19, 23, 25, 29
            9
        );
        let all = omega_census(10_000.0).unwrap();
        assert_eq!(all.iter().sum::<u64>(), 10_000);
        assert_eq!(all[1], prime_factor_census(10_000.0, Some(1), CensusConstraint::None).unwrap());
    }

    #[test]
    fn partition_small() {
        for xs in [1u64, 2, 17, 100, 999] {
            for y in [2.0, 3.0, 5.0, 10.0, 100.0] {
                let total: u64 = (0..=12).map(|l| psi_count(xs as f64, y, l).unwrap()).sum();
                assert_eq!(total, xs);
            }
        }
    }
}
