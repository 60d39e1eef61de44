//! Arithmetic weights `f(n)` that enter weighted character sums.

use num_complex::Complex64;

use crate::arith::{gcd, SpfSieve};
use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum WeightFunction {
    /// f ≡ 1.
    Unit,
    /// f = μ.
    Moebius,
    /// f(n) = n^{it}.
    PowerPhase { t: f64 },
    /// Indicator of y-smooth integers.
    SmoothIndicator { y: f64 },
    /// Indicator of integers coprime to `q`.
    PrincipalIndicator { q: u64 },
    /// f = d, the number-of-divisors function.
    DivisorCount,
    /// Explicit table: `values[n - 1] = f(n)`, zero past the end.
    Custom(Vec<Complex64>),
}

impl WeightFunction {
    pub fn name(&self) -> String {
        match self {
            WeightFunction::Unit => "unit".into(),
            WeightFunction::Moebius => "moebius".into(),
            WeightFunction::PowerPhase { t } => format!("power_phase({t})"),
            WeightFunction::SmoothIndicator { y } => format!("smooth({y})"),
            WeightFunction::PrincipalIndicator { q } => format!("principal({q})"),
            WeightFunction::DivisorCount => "divisor_count".into(),
            WeightFunction::Custom(v) => format!("custom[{}]", v.len()),
        }
    }

    /// Whether every value is an integer, so sums can run in exact arithmetic.
    pub fn is_integer_valued(&self) -> bool {
        !matches!(
            self,
            WeightFunction::PowerPhase { .. } | WeightFunction::Custom(_)
        )
    }

    /// Integer values `f(1..=upto)` (index 0 holds f(0) := 0), if integer valued.
    pub fn int_table(&self, upto: u64) -> Option<Vec<i64>> {
        if !self.is_integer_valued() {
            return None;
        }
        let n = upto as usize;
        if let WeightFunction::Unit = self {
            let mut out = vec![1i64; n + 1];
            out[0] = 0;
            return Some(out);
        }
        let mut out = vec![0i64; n + 1];
        match self {
            WeightFunction::PrincipalIndicator { q } => {
                for (m, v) in out.iter_mut().enumerate().skip(1) {
                    *v = (gcd(m as u64, *q) == 1) as i64;
                }
            }
            WeightFunction::Moebius | WeightFunction::DivisorCount | WeightFunction::SmoothIndicator { .. } => {
                let sieve = SpfSieve::new(upto.max(1));
                for (m, v) in out.iter_mut().enumerate().skip(1) {
                    let factors = sieve.factor(m as u64);
                    *v = match self {
                        WeightFunction::Moebius => {
                            if factors.iter().any(|&(_, a)| a > 1) {
                                0
                            } else if factors.len() % 2 == 0 {
                                1
                            } else {
                                -1
                            }
                        }
                        WeightFunction::DivisorCount => {
                            factors.iter().map(|&(_, a)| a as i64 + 1).product()
                        }
                        WeightFunction::SmoothIndicator { y } => {
                            factors.iter().all(|&(p, _)| p as f64 <= *y) as i64
                        }
                        _ => unreachable!(),
                    };
                }
            }
            _ => unreachable!(),
        }
        Some(out)
    }

    /// Complex values `f(0..=upto)` with f(0) := 0.
    pub fn table(&self, upto: u64) -> Vec<Complex64> {
        if let Some(ints) = self.int_table(upto) {
            return ints.into_iter().map(|v| Complex64::new(v as f64, 0.0)).collect();
        }
        let n = upto as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        match self {
            WeightFunction::PowerPhase { t } => {
                for (m, v) in out.iter_mut().enumerate().skip(1) {
                    *v = Complex64::from_polar(1.0, t * (m as f64).ln());
                }
            }
            WeightFunction::Custom(vals) => {
                for (m, v) in out.iter_mut().enumerate().skip(1) {
                    *v = vals.get(m - 1).copied().unwrap_or_default();
                }
            }
            _ => unreachable!(),
        }
        out
    }

    /// Single value f(n).
    pub fn value(&self, n: u64) -> Complex64 {
        if n == 0 {
            return Complex64::new(0.0, 0.0);
        }
        match self {
            WeightFunction::Unit => Complex64::new(1.0, 0.0),
            WeightFunction::PowerPhase { t } => Complex64::from_polar(1.0, t * (n as f64).ln()),
            WeightFunction::PrincipalIndicator { q } => Complex64::new((gcd(n, *q) == 1) as u8 as f64, 0.0),
            WeightFunction::Custom(vals) => vals.get(n as usize - 1).copied().unwrap_or_default(),
            _ => {
                let f = crate::arith::factorize(n).expect("n ≥ 1");
                let v = match self {
                    WeightFunction::Moebius => f.stats().mu as f64,
                    WeightFunction::DivisorCount => f.factors().iter().map(|&(_, a)| a as f64 + 1.0).product(),
                    WeightFunction::SmoothIndicator { y } => f.primes().all(|p| p as f64 <= *y) as u8 as f64,
                    _ => unreachable!(),
                };
                Complex64::new(v, 0.0)
            }
        }
    }

    /// Decomposition `f(n) = g(n) h(n)` with `g` multiplicative, `|g| = 1`
    /// and `h ≥ 0`, when the weight is known to admit one.
    pub fn class_f_parts(&self, n: u64) -> Option<(Complex64, f64)> {
        if n == 0 {
            return None;
        }
        let one = Complex64::new(1.0, 0.0);
        match self {
            WeightFunction::Unit
            | WeightFunction::SmoothIndicator { .. }
            | WeightFunction::PrincipalIndicator { .. }
            | WeightFunction::DivisorCount => Some((one, self.value(n).re)),
            WeightFunction::PowerPhase { .. } => Some((self.value(n), 1.0)),
            WeightFunction::Moebius => {
                // μ = λ · μ², with λ the Liouville function.
                let st = crate::arith::factorize(n).ok()?.stats();
                let lambda = if st.big_omega % 2 == 0 { 1.0 } else { -1.0 };
                Some((Complex64::new(lambda, 0.0), (st.mu != 0) as u8 as f64))
            }
            WeightFunction::Custom(_) => None,
        }
    }

    /// Check the declared class-F decomposition on `1..=upto`: the product
    /// reproduces f, `|g| = 1`, `h ≥ 0`, and `g(mn) = g(m)g(n)` for coprime pairs.
    pub fn verify_class_f(&self, upto: u64) -> Result<()> {
        let tol = 1e-12;
        let parts: Vec<(Complex64, f64)> = (1..=upto)
            .map(|n| {
                self.class_f_parts(n).ok_or_else(|| {
                    LabError::domain(format!("{} has no declared class-F decomposition", self.name()))
                })
            })
            .collect::<Result<_>>()?;
        for n in 1..=upto {
            let (g, h) = parts[n as usize - 1];
            if (g.norm() - 1.0).abs() > tol || h < 0.0 {
                return Err(LabError::invariant(format!("class-F bounds fail at n={n}")));
            }
            if (g * h - self.value(n)).norm() > 1e-9 {
                return Err(LabError::invariant(format!("f ≠ g·h at n={n}")));
            }
        }
        for m in 1..=upto {
            for n in 1..=upto / m {
                if gcd(m, n) != 1 {
                    continue;
                }
                let g = |k: u64| parts[k as usize - 1].0;
                if (g(m * n) - g(m) * g(n)).norm() > 1e-9 {
                    return Err(LabError::invariant(format!("g not multiplicative at ({m},{n})")));
                }
            }
        }
        Ok(())
    }
}
