//! Exact elementary number theory on 64-bit integers.
//!
//! Factorization uses trial division by small primes, a deterministic
//! Miller–Rabin test (valid for every `u64`) and Brent's variant of Pollard
//! rho for the remaining cofactor.

use crate::error::{LabError, Result};

/// Prime factorization `n = ∏ p^a`, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, a)| a == 1)
    }

    pub fn stats(&self) -> MultiplicativeStats {
        let omega = self.factors.len() as u32;
        let big_omega = self.factors.iter().map(|&(_, a)| a).sum();
        let mu = if !self.is_squarefree() {
            0
        } else if omega % 2 == 0 {
            1
        } else {
            -1
        };
        MultiplicativeStats {
            mu,
            omega,
            big_omega,
        }
    }

    /// All positive divisors, unsorted.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, a) in &self.factors {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..a {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs
    }
}

/// Möbius value and prime-factor counts of an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultiplicativeStats {
    pub mu: i8,
    /// Number of distinct prime factors, ω(n).
    pub omega: u32,
    /// Number of prime factors with multiplicity, Ω(n).
    pub big_omega: u32,
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality test for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &SMALL_PRIMES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's cycle-finding Pollard rho; `n` must be odd and composite.
fn pollard_brent(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut r = 1u64;
        let mut q = 1u64;
        let mut ys = y;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            // Batched gcd overshot; retrace one step at a time.
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn push_prime_factors(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    push_prime_factors(d, out);
    push_prime_factors(n / d, out);
}

/// Factor `n ≥ 1` completely.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(LabError::domain("cannot factor 0"));
    }
    let mut m = n;
    let mut primes = Vec::new();
    let mut p = 2u64;
    while p <= 1000 && p * p <= m {
        while m % p == 0 {
            primes.push(p);
            m /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        if m < 1_000_000 {
            // every prime below 1000 has been removed, so m is prime
            primes.push(m);
        } else {
            push_prime_factors(m, &mut primes);
        }
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, a)) if *q == p => *a += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { n, factors })
}

/// (μ(n), ω(n), Ω(n)).
pub fn multiplicative_stats(n: u64) -> Result<MultiplicativeStats> {
    Ok(factorize(n)?.stats())
}

pub fn moebius(n: u64) -> Result<i8> {
    Ok(multiplicative_stats(n)?.mu)
}

pub fn is_squarefree(n: u64) -> bool {
    n != 0 && factorize(n).map(|f| f.is_squarefree()).unwrap_or(false)
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> Result<u64> {
    let f = factorize(n)?;
    Ok(f.factors
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1)))
}

/// Jacobi symbol (a/n) for odd positive n.
pub fn jacobi(a: i64, n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut t = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol (D/n) for n ≥ 0, with (D/0) = 0 unless |D| = 1.
pub fn kronecker(d: i64, n: u64) -> i8 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let v = n.trailing_zeros();
    let odd = n >> v;
    let mut t = 1i8;
    if v > 0 {
        if d % 2 == 0 {
            return 0;
        }
        let r = d.rem_euclid(8);
        if (r == 3 || r == 5) && v % 2 == 1 {
            t = -1;
        }
    }
    if odd == 1 {
        return t;
    }
    t * jacobi(d, odd)
}

/// Fundamental discriminant test; `D = 1` is excluded.
pub fn is_fundamental_discriminant(d: i64) -> Result<bool> {
    if d == 0 {
        return Err(LabError::domain("discriminant must be nonzero"));
    }
    if d == 1 {
        return Ok(false);
    }
    let r = d.rem_euclid(4);
    if r == 1 {
        return Ok(is_squarefree(d.unsigned_abs()));
    }
    if r == 0 {
        let m = d / 4;
        let mr = m.rem_euclid(4);
        return Ok((mr == 2 || mr == 3) && is_squarefree(m.unsigned_abs()));
    }
    Ok(false)
}

/// Sieve of Eratosthenes: all primes `≤ limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            if let Some(start) = i.checked_mul(i) {
                let mut j = start;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
        }
    }
    primes
}

/// Smallest-prime-factor table for `0..=limit`, for fast repeated factoring
/// of small integers.
#[derive(Debug, Clone)]
pub struct SpfSieve {
    spf: Vec<u32>,
}

impl SpfSieve {
    pub fn new(limit: u64) -> Self {
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                let mut j = i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        SpfSieve { spf }
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    #[inline]
    pub fn smallest_prime_factor(&self, n: u64) -> u64 {
        self.spf[n as usize] as u64
    }

    pub fn factor(&self, mut n: u64) -> Vec<(u64, u32)> {
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            n /= p;
            match out.last_mut() {
                Some((q, a)) if *q == p => *a += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    pub fn stats(&self, n: u64) -> MultiplicativeStats {
        Factorization {
            n,
            factors: self.factor(n),
        }
        .stats()
    }
}

/// Per-integer factor statistics produced by [`for_each_factor_stats`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorStats {
    pub omega: u32,
    pub big_omega: u32,
    pub squarefree: bool,
    /// Smallest prime factor (0 for n = 1).
    pub min_prime: u64,
}

/// Segmented sieve visiting every `n` in `1..=limit` in increasing order with
/// its factor statistics; memory is proportional to `√limit` plus one block.
pub fn for_each_factor_stats<F: FnMut(u64, FactorStats)>(limit: u64, mut visit: F) {
    if limit == 0 {
        return;
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let primes = primes_up_to(root);
    const BLOCK: u64 = 1 << 16;
    let mut rem = vec![0u64; BLOCK as usize];
    let mut stats = vec![
        FactorStats {
            omega: 0,
            big_omega: 0,
            squarefree: true,
            min_prime: 0
        };
        BLOCK as usize
    ];
    let mut lo = 1u64;
    while lo <= limit {
        let hi = (lo + BLOCK - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        for i in 0..len {
            rem[i] = lo + i as u64;
            stats[i] = FactorStats {
                omega: 0,
                big_omega: 0,
                squarefree: true,
                min_prime: 0,
            };
        }
        for &p in &primes {
            if p * p > hi {
                break;
            }
            let mut m = lo.div_ceil(p) * p;
            while m <= hi {
                let i = (m - lo) as usize;
                let mut e = 0;
                while rem[i] % p == 0 {
                    rem[i] /= p;
                    e += 1;
                }
                let s = &mut stats[i];
                s.omega += 1;
                s.big_omega += e;
                if e > 1 {
                    s.squarefree = false;
                }
                if s.min_prime == 0 {
                    s.min_prime = p;
                }
                m += p;
            }
        }
        for i in 0..len {
            if rem[i] > 1 {
                let s = &mut stats[i];
                s.omega += 1;
                s.big_omega += 1;
                if s.min_prime == 0 {
                    s.min_prime = rem[i];
                }
            }
            visit(lo + i as u64, stats[i]);
        }
        lo = hi + 1;
    }
}
