//! Acceptance criteria, one line per criterion. Run with
//! `cargo test -p charlab-core --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use charlab_core::arith::{gcd, is_fundamental_discriminant, is_prime, kronecker, primes_up_to, SpfSieve};
use charlab_core::characters::CharacterGroup;
use charlab_core::dickman::dickman_rho;
use charlab_core::experiments::{registry, run_experiment, ExperimentConfig};
use charlab_core::moments::{
    delta_lower_bound, divisor_counts, moment_character_side, moment_divisor_side_exact, moment_monte_carlo,
};
use charlab_core::polya::{poisson_identity_check, polya_truncated_sum, smoothing_chain};
use charlab_core::realchar::{fundamental_discriminants_in, smooth_splitting_class, Sign};
use charlab_core::smooth::{psi_count, smooth_enumerate};
use charlab_core::weight::WeightFunction;
use charlab_core::Result;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { passed, detail: detail.into() })
}

fn moment_identity() -> Result<Outcome> {
    let (ex_c, ex_d) = (
        moment_character_side(1, 2.0, 5, &WeightFunction::Unit)?.exact,
        moment_divisor_side_exact(1, 2.0, 5, &WeightFunction::Unit, false)?,
    );
    if ex_c != Some(2) || ex_d != 2 {
        return outcome(false, format!("q=5, x=2, k=1 gave {ex_c:?} and {ex_d}"));
    }
    let mut cases = 0;
    for q in [5u64, 7, 11, 12, 36, 101] {
        for k in 1..=3u32 {
            let mut x = 1u64;
            while x.pow(k) <= q {
                let c = moment_character_side(k, x as f64, q, &WeightFunction::Unit)?;
                let d = moment_divisor_side_exact(k, x as f64, q, &WeightFunction::Unit, false)?;
                if c.exact != Some(d) {
                    return outcome(false, format!("q={q}, k={k}, x={x}: character side {:?}, divisor side {d}", c.exact));
                }
                cases += 1;
                x += 1;
            }
        }
    }
    outcome(true, format!("{cases} cases equal in exact arithmetic"))
}

/// `d_k(N, x)` for all `N` by running over every k-tuple in `[1, x]^k`.
fn tuple_counts(k: u32, x: u64) -> Vec<i64> {
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
            return counts;
        }
        idx[j] += 1;
    }
}

fn divisor_oracle() -> Result<Outcome> {
    const LIMIT: u64 = 100_000;
    let t = divisor_counts(2, 3.0, &WeightFunction::Unit, 1)?;
    let sq: i64 = t.exact_counts().unwrap().iter().map(|c| c * c).sum();
    let sf = moment_divisor_side_exact(2, 3.0, 1, &WeightFunction::Unit, true)?;
    if sq != 15 || sf != 13 {
        return outcome(false, format!("Σ d_2(N,3)² = {sq}, squarefree {sf}"));
    }
    let mut pairs = 0u64;
    // k = 1: the 1-tuples up to x are those up to x − 1 plus one more.
    let mut oracle = vec![0i64];
    for x in 1..=LIMIT {
        oracle.push(1);
        let lib = divisor_counts(1, x as f64, &WeightFunction::Unit, 1)?;
        if lib.exact_counts() != Some(&oracle[..]) {
            return outcome(false, format!("k=1, x={x} differs"));
        }
        pairs += 1;
    }
    for k in 2..=17u32 {
        let mut x = 1u64;
        while x.pow(k) <= LIMIT {
            let lib = divisor_counts(k, x as f64, &WeightFunction::Unit, 1)?;
            if lib.exact_counts() != Some(&tuple_counts(k, x)[..]) {
                return outcome(false, format!("k={k}, x={x} differs"));
            }
            pairs += 1;
            x += 1;
        }
    }
    outcome(true, format!("{pairs} (k, x) pairs match tuple enumeration"))
}

fn orthogonality() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for q in 1..=200u64 {
        let g = CharacterGroup::new(q)?;
        let units: Vec<i64> = (1..=q as i64).filter(|&a| gcd(a as u64, q) == 1).collect();
        let table: Vec<Vec<Complex64>> = g
            .characters()
            .map(|c| units.iter().map(|&a| c.evaluate(a)).collect())
            .collect();
        let phi = units.len() as f64;
        // Σ_χ χ(a) χ̄(b) = φ(q)·[a = b]
        for i in 0..units.len() {
            for j in 0..units.len() {
                let s: Complex64 = table.iter().map(|row| row[i] * row[j].conj()).sum();
                let expect = if i == j { phi } else { 0.0 };
                worst = worst.max((s - expect).norm());
            }
        }
        // Σ_a χ(a) ψ̄(a) = φ(q)·[χ = ψ]
        for (i, r) in table.iter().enumerate() {
            for (j, s) in table.iter().enumerate() {
                let v: Complex64 = r.iter().zip(s).map(|(a, b)| a * b.conj()).sum();
                let expect = if i == j { phi } else { 0.0 };
                worst = worst.max((v - expect).norm());
            }
        }
    }
    outcome(worst <= 1e-10, format!("max deviation {worst:.2e} over q ≤ 200"))
}

fn gauss_sums() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut count = 0;
    for q in [5u64, 7, 11, 13, 101] {
        let g = CharacterGroup::new(q)?;
        for c in g.characters().filter(|c| c.is_primitive()) {
            worst = worst.max((c.gauss_sum().norm() - (q as f64).sqrt()).abs());
            count += 1;
        }
    }
    let g = CharacterGroup::new(5)?;
    let legendre = g
        .characters()
        .find(|c| c.order() == 2)
        .expect("mod 5 has a quadratic character");
    let legendre_ok = (1..5).all(|n| legendre.evaluate(n).re == kronecker(5, n as u64) as f64);
    let tau = legendre.gauss_sum();
    let tau_err = (tau - Complex64::new(5f64.sqrt(), 0.0)).norm();
    outcome(
        worst <= 1e-6 && legendre_ok && tau_err <= 1e-9,
        format!("{count} primitive characters, max ||τ| − √q| = {worst:.1e}, |τ(Legendre mod 5) − √5| = {tau_err:.1e}"),
    )
}

fn dickman() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for i in 0..=10_000 {
        let u = 1.0 + i as f64 / 10_000.0;
        worst = worst.max((dickman_rho(u)? - (1.0 - u.ln())).abs());
    }
    // ρ(3) = ρ(2) − ∫_2^3 (1 − ln(t − 1))/t dt, composite Simpson with 2·10^6 panels.
    let n = 2_000_000usize;
    let h = 1.0 / n as f64;
    let f = |t: f64| (1.0 - (t - 1.0).ln()) / t;
    let mut s = f(2.0) + f(3.0);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(2.0 + i as f64 * h);
    }
    let oracle = (1.0 - 2f64.ln()) - s * h / 3.0;
    let rho3_err = (dickman_rho(3.0)? - oracle).abs();
    let mut psi_ok = true;
    let mut devs = Vec::new();
    for u in [1.5, 2.0, 2.5, 3.0] {
        let y = 10f64.powf(6.0 / u);
        let density = psi_count(1e6, y, 0)? as f64 / 1e6;
        let rho = dickman_rho(u)?;
        let rel = (density - rho).abs() / rho;
        psi_ok &= rel <= 0.2;
        devs.push(format!("u={u}: {rel:.3}"));
    }
    outcome(
        worst <= 1e-8 && rho3_err <= 1e-7 && psi_ok,
        format!(
            "[1,2] deviation {worst:.1e}, ρ(3) error {rho3_err:.1e}, |Ψ/x − ρ|/ρ ≤ 0.2: {} ({})",
            psi_ok,
            devs.join(", ")
        ),
    )
}

fn partition() -> Result<Outcome> {
    const X: u64 = 1_000_000;
    let sieve = SpfSieve::new(X);
    for y in [2u64, 3, 5, 10, 100] {
        let yf = y as f64;
        let max_ell = ((X as f64).ln() / yf.ln()).floor() as u32;
        let mut hits = vec![0u8; X as usize + 1];
        for ell in 0..=max_ell {
            for &n in smooth_enumerate(X as f64, yf, ell)?.members() {
                let large: u32 = sieve.factor(n).iter().filter(|f| f.0 > y).map(|f| f.1).sum();
                if large != ell {
                    return outcome(false, format!("y={y}: {n} listed with ℓ={ell}, has {large}"));
                }
                hits[n as usize] += 1;
            }
        }
        // Every n ≤ 10^6 lies in exactly one S_ℓ, so Σ_ℓ Ψ_ℓ(x, y) = ⌊x⌋ for every x ≤ 10^6.
        if let Some(n) = (1..=X as usize).find(|&n| hits[n] != 1) {
            return outcome(false, format!("y={y}: n={n} counted {} times", hits[n]));
        }
        for x in [1u64, 2, 97, 1000, 65_537, 999_999, X] {
            let total: u64 = (0..=max_ell).map(|l| psi_count(x as f64, yf, l)).sum::<Result<u64>>()?;
            if total != x {
                return outcome(false, format!("y={y}, x={x}: Σ Ψ_ℓ = {total}"));
            }
        }
    }
    outcome(true, "every n ≤ 10^6 in exactly one S_ℓ for y ∈ {2,3,5,10,100}")
}

fn polya() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut checked = 0u64;
    for q in primes_up_to(499).into_iter().filter(|&q| q >= 3) {
        let g = CharacterGroup::new(q)?;
        for c in g.characters().filter(|c| !c.is_principal()) {
            for x in [q / 4, q / 2] {
                for h in [q, 2 * q] {
                    let r = polya_truncated_sum(&c, x as f64, h)?;
                    worst = worst.max(r.residual / (12.0 * r.bound_shape));
                    checked += 1;
                }
            }
        }
    }
    outcome(worst <= 1.0, format!("{checked} configurations, max residual/bound = {worst:.4}"))
}

fn poisson() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut chain_fail = 0;
    let mut configs = 0;
    for q in primes_up_to(101) {
        let g = CharacterGroup::new(q)?;
        for c in g.characters().filter(|c| !c.is_principal() && c.is_even() && c.is_primitive()) {
            for r in [2u32, 4] {
                for n in [1u64, 2, 3] {
                    let x = q as f64 / (r as f64 * n as f64);
                    worst = worst.max(poisson_identity_check(&c, x, r, None)?.gap);
                    chain_fail += usize::from(!smoothing_chain(&c, n, r)?.holds);
                    configs += 1;
                }
            }
        }
    }
    outcome(
        worst <= 1e-6 && chain_fail == 0,
        format!("{configs} configurations, max gap {worst:.1e}, chain failures {chain_fail}"),
    )
}

fn splitting_class() -> Result<Outcome> {
    let mut scanned = 0;
    let mut exceptions = 0;
    for y in [3u64, 5, 7] {
        let class = smooth_splitting_class(y)?;
        let lib = fundamental_discriminants_in(1.0, 1e6, Sign::Both, Some(&class))?;
        // Independent listing: D = a + m·b on both sides of zero.
        let b = class.b as i64;
        let mut direct: Vec<i64> = (-1_000_000 / b - 1..=1_000_000 / b + 1)
            .map(|m| 1 + m * b)
            .filter(|d| d.unsigned_abs() <= 1_000_000 && is_fundamental_discriminant(*d).unwrap_or(false))
            .collect();
        direct.sort_unstable();
        if lib != direct {
            return outcome(false, format!("y={y}: enumeration differs ({} vs {})", lib.len(), direct.len()));
        }
        let primes = primes_up_to(y);
        for &d in &lib {
            exceptions += primes.iter().filter(|&&p| kronecker(d, p) != 1).count();
        }
        scanned += lib.len();
    }
    outcome(exceptions == 0, format!("{scanned} discriminants, {exceptions} exceptions"))
}

fn delta_chain() -> Result<Outcome> {
    // Failures grouped by (q, k, f) as (count, smallest x, largest x).
    let mut groups: Vec<(u64, u32, &str, u32, u64, u64)> = Vec::new();
    let mut cauchy_schwarz_failures = 0;
    let mut cases = 0;
    for q in [101u64, 499, 997] {
        for k in 1..=3u32 {
            for (fname, f) in [("1", WeightFunction::Unit), ("mu", WeightFunction::Moebius)] {
                let mut x = 1u64;
                while x.pow(k) <= q {
                    let diag = delta_lower_bound(q, x as f64, k, &f)?.diagnostics;
                    cauchy_schwarz_failures += usize::from(!diag.cauchy_schwarz);
                    if !diag.bound_holds {
                        match groups.last_mut() {
                            Some(g) if (g.0, g.1, g.2) == (q, k, fname) => {
                                g.3 += 1;
                                g.5 = x;
                            }
                            _ => groups.push((q, k, fname, 1, x, x)),
                        }
                    }
                    cases += 1;
                    x += 1;
                }
            }
        }
    }
    let failed: u32 = groups.iter().map(|g| g.3).sum();
    let shown: Vec<String> = groups
        .iter()
        .map(|g| format!("q={} k={} f={}: {} x in [{}, {}]", g.0, g.1, g.2, g.3, g.4, g.5))
        .collect();
    outcome(
        failed == 0 && cauchy_schwarz_failures == 0,
        format!(
            "{cases} cases, Cauchy-Schwarz failures {cauchy_schwarz_failures}, Δ < bound/2 in {failed}{}{}",
            if shown.is_empty() { "" } else { ": " },
            shown.join("; ")
        ),
    )
}

fn monte_carlo() -> Result<Outcome> {
    let mut parts = Vec::new();
    let mut ok = true;
    for (x, k) in [(10.0, 1u32), (10.0, 2), (30.0, 2)] {
        let mc = moment_monte_carlo(k, x, 1, &WeightFunction::Unit, 100_000, 20_240_601)?;
        let exact = moment_divisor_side_exact(k, x, 1, &WeightFunction::Unit, false)? as f64;
        let z = (mc.estimate - exact) / mc.std_error;
        ok &= z.abs() <= 3.0;
        parts.push(format!("(x={x}, k={k}): {:.2} vs {exact}, z={z:.2}", mc.estimate));
    }
    outcome(ok, parts.join("; "))
}

fn determinism_configs() -> Vec<ExperimentConfig> {
    vec![
        ExperimentConfig::new("moment-verify").param("q", 36).param("x", 3).param("k", 2).param("samples", 500),
        ExperimentConfig::new("conjecture1-scan").param("q", 1009).param("x", 60),
        ExperimentConfig::new("rho-table").param("max_u", 6).param("step", 0.1),
        ExperimentConfig::new("delta-table").param("q", 211),
        ExperimentConfig::new("paley-search").param("q", 5000),
        ExperimentConfig::new("polya-residual").param("q", 97),
        ExperimentConfig::new("poisson-harness").param("q", 53).param("r", 4),
        ExperimentConfig::new("theorem9-search").param("q", 20000).param("x", 50),
        ExperimentConfig::new("round-census").param("x", 1e5),
        ExperimentConfig::new("smooth-vs-rho").param("x", 1e5),
        ExperimentConfig::new("model-tail").param("x", 200).param("y", 10).param("samples", 300),
    ]
}

fn determinism() -> Result<Outcome> {
    let configs = determinism_configs();
    let covered: Vec<&str> = configs.iter().map(|c| c.name.as_str()).collect();
    if let Some(missing) = registry().iter().find(|e| !covered.contains(&e.name)) {
        return outcome(false, format!("no configuration for {}", missing.name));
    }
    for seed in [0u64, 42] {
        for cfg in &configs {
            let cfg = cfg.clone().seed(seed);
            let a = run_experiment(&cfg)?;
            let b = run_experiment(&cfg)?;
            if a.csv_string()? != b.csv_string()? || a.json_string()? != b.json_string()? {
                return outcome(false, format!("{} differs between runs with seed {seed}", cfg.name));
            }
        }
    }
    outcome(true, format!("{} experiments, byte-identical rows on re-run", configs.len()))
}

type Criterion = (&'static str, Duration, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("moment identity", Duration::from_secs(10), moment_identity),
        ("divisor counts vs tuple enumeration", Duration::from_secs(30), divisor_oracle),
        ("orthogonality", Duration::from_secs(20), orthogonality),
        ("Gauss sums", Duration::MAX, gauss_sums),
        ("Dickman rho", Duration::from_secs(60), dickman),
        ("partition identity", Duration::from_secs(60), partition),
        ("Polya expansion", Duration::from_secs(120), polya),
        ("Poisson identity", Duration::from_secs(60), poisson),
        ("splitting class", Duration::from_secs(60), splitting_class),
        ("lower-bound chain", Duration::from_secs(60), delta_chain),
        ("Monte Carlo consistency", Duration::from_secs(60), monte_carlo),
        ("determinism", Duration::MAX, determinism),
    ];
    assert!(is_prime(101));
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(o) => (o.passed && elapsed <= *limit, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let budget = if *limit == Duration::MAX { String::new() } else { format!(" / {}s", limit.as_secs()) };
        println!(
            "{} {:>2} {name}: {detail} [{:.2}s{budget}]",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64()
        );
        failed += usize::from(!passed);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
