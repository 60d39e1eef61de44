//! Quick invariant checks across the library, used by `charlab selftest`.

use num_complex::Complex64;

use super::{run_experiment, ExperimentConfig};
use crate::arith::{gcd, kronecker, primes_up_to};
use crate::characters::CharacterGroup;
use crate::dickman::dickman_rho;
use crate::error::Result;
use crate::moments::{delta_lower_bound, divisor_counts, moment_character_side, moment_divisor_side_exact, moment_monte_carlo};
use crate::polya::{poisson_identity_check, polya_truncated_sum, smoothing_chain};
use crate::realchar::{fundamental_discriminants_in, smooth_splitting_class, Sign};
use crate::smooth::psi_count;
use crate::weight::WeightFunction;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, body: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match body() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: format!("error: {e}") },
    }
}

fn orthogonality() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for q in 1..=40u64 {
        let g = CharacterGroup::new(q)?;
        let units: Vec<i64> = (1..=q as i64).filter(|&a| gcd(a as u64, q) == 1).collect();
        let chars: Vec<_> = g.characters().collect();
        for &a in &units {
            for &b in &units {
                let s: Complex64 = chars.iter().map(|c| c.evaluate(a) * c.evaluate(b).conj()).sum();
                let expect = if a == b { g.order() as f64 } else { 0.0 };
                worst = worst.max((s - expect).norm());
            }
        }
    }
    Ok((worst <= 1e-10, format!("q ≤ 40, max deviation {worst:.2e}")))
}

fn gauss_sums() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for q in [5u64, 7, 11, 13, 16, 45] {
        let g = CharacterGroup::new(q)?;
        for c in g.characters().filter(|c| c.is_primitive()) {
            worst = worst.max((c.gauss_sum().norm() - (q as f64).sqrt()).abs());
        }
    }
    Ok((worst <= 1e-6, format!("max ||τ| − √q| = {worst:.2e}")))
}

fn moment_identity() -> Result<(bool, String)> {
    let mut cases = 0;
    for q in [5u64, 7, 11, 12, 36] {
        for k in 1..=3u32 {
            let mut x = 1u64;
            while x.pow(k) <= q {
                for f in [WeightFunction::Unit, WeightFunction::Moebius] {
                    let c = moment_character_side(k, x as f64, q, &f)?;
                    let d = moment_divisor_side_exact(k, x as f64, q, &f, false)?;
                    if c.exact != Some(d) {
                        return Ok((false, format!("q={q}, k={k}, x={x}: {:?} vs {d}", c.exact)));
                    }
                    cases += 1;
                }
                x += 1;
            }
        }
    }
    Ok((true, format!("{cases} exact cases")))
}

fn tuple_oracle() -> Result<(bool, String)> {
    // d_k(N, x) by enumerating all k-tuples.
    for (k, x) in [(2u32, 10u64), (3, 6), (4, 4)] {
        let t = divisor_counts(k, x as f64, &WeightFunction::Unit, 1)?;
        let mut counts = vec![0i64; x.pow(k) as usize + 1];
        let mut idx = vec![1u64; k as usize];
        loop {
            counts[idx.iter().product::<u64>() as usize] += 1;
            let mut j = 0;
            while j < idx.len() && idx[j] == x {
                idx[j] = 1;
                j += 1;
            }
            if j == idx.len() {
                break;
            }
            idx[j] += 1;
        }
        if t.exact_counts() != Some(&counts[..]) {
            return Ok((false, format!("k={k}, x={x} differs")));
        }
    }
    Ok((true, "k-tuple enumeration matches".into()))
}

fn dickman() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for i in 0..=100 {
        let u = 1.0 + i as f64 / 100.0;
        worst = worst.max((dickman_rho(u)? - (1.0 - u.ln())).abs());
    }
    let r3 = dickman_rho(3.0)?;
    let ok = worst <= 1e-8 && (r3 - 0.048_608_388_291_4).abs() <= 1e-7;
    Ok((ok, format!("closed-form deviation {worst:.1e}, ρ(3) = {r3:.12}")))
}

fn partition() -> Result<(bool, String)> {
    let x = 20_000.0;
    for y in [2.0, 3.0, 5.0, 10.0, 100.0] {
        let mut total = 0;
        let mut ell = 0;
        while ell <= (x as f64).ln() as u32 * 2 {
            total += psi_count(x, y, ell)?;
            ell += 1;
        }
        if total != 20_000 {
            return Ok((false, format!("y={y}: Σ Ψ_ℓ = {total}")));
        }
    }
    Ok((true, "Σ_ℓ Ψ_ℓ(2·10^4, y) = ⌊x⌋".into()))
}

fn polya() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for q in [101u64, 103] {
        let g = CharacterGroup::new(q)?;
        for c in g.characters().filter(|c| !c.is_principal()) {
            let r = polya_truncated_sum(&c, (q / 2) as f64, q)?;
            worst = worst.max(r.residual / r.bound_shape);
        }
    }
    Ok((worst <= 12.0, format!("max residual/(1 + q log q/H) = {worst:.3}")))
}

fn poisson() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    let mut chain = true;
    for q in [13u64, 29] {
        let g = CharacterGroup::new(q)?;
        for c in g.characters().filter(|c| !c.is_principal() && c.is_even()) {
            for r in [2u32, 4] {
                let x = q as f64 / (2.0 * r as f64);
                worst = worst.max(poisson_identity_check(&c, x, r, None)?.gap);
                chain &= smoothing_chain(&c, 2, r)?.holds;
            }
        }
    }
    Ok((worst <= 1e-6 && chain, format!("max gap {worst:.1e}, chain holds: {chain}")))
}

fn splitting_class() -> Result<(bool, String)> {
    let mut violations = 0;
    for y in [3u64, 5, 7] {
        let class = smooth_splitting_class(y)?;
        let primes = primes_up_to(y);
        for d in fundamental_discriminants_in(1.0, 1e5, Sign::Both, Some(&class))? {
            violations += primes.iter().filter(|&&p| kronecker(d, p) != 1).count();
        }
    }
    Ok((violations == 0, format!("{violations} exceptions")))
}

fn delta_chain() -> Result<(bool, String)> {
    for f in [WeightFunction::Unit, WeightFunction::Moebius] {
        for (x, k) in [(10.0, 2u32), (4.0, 3)] {
            let d = delta_lower_bound(101, x, k, &f)?.diagnostics;
            if !d.cauchy_schwarz {
                return Ok((false, format!("Cauchy–Schwarz fails at x={x}, k={k}")));
            }
        }
    }
    Ok((true, "Δ₁² ≤ Δ₀Δ₂ for q = 101".into()))
}

fn monte_carlo() -> Result<(bool, String)> {
    let mc = moment_monte_carlo(2, 10.0, 1, &WeightFunction::Unit, 20_000, 7)?;
    let exact = moment_divisor_side_exact(2, 10.0, 1, &WeightFunction::Unit, false)? as f64;
    let z = (mc.estimate - exact) / mc.std_error;
    Ok((z.abs() <= 3.0, format!("estimate {:.3} vs {exact}, z = {z:.2}", mc.estimate)))
}

fn determinism() -> Result<(bool, String)> {
    let cfg = ExperimentConfig::new("moment-verify")
        .param("q", 7)
        .param("x", 3)
        .param("k", 1)
        .param("samples", 200)
        .seed(11);
    let a = run_experiment(&cfg)?;
    let b = run_experiment(&cfg)?;
    let same = a.csv_string()? == b.csv_string()? && a.json_string()? == b.json_string()?;
    Ok((same, "repeated run is byte-identical".into()))
}

/// Run every check; order is stable.
pub fn run_selftest() -> Vec<Check> {
    vec![
        check("orthogonality", orthogonality),
        check("gauss-sums", gauss_sums),
        check("moment-identity", moment_identity),
        check("divisor-tuple-oracle", tuple_oracle),
        check("dickman", dickman),
        check("partition-identity", partition),
        check("polya-expansion", polya),
        check("poisson-identity", poisson),
        check("splitting-class", splitting_class),
        check("delta-chain", delta_chain),
        check("monte-carlo", monte_carlo),
        check("determinism", determinism),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes() {
        for c in run_selftest() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
