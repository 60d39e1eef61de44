//! Dickman's function: `ρ = 1` on `[0, 1]`, `ρ'(u) = −ρ(u−1)/u` for `u > 1`.
//!
//! On `[0, 2]` the closed form (`1` then `1 − ln u`) is used. Beyond `u = 2`
//! the grid is advanced with the integral form
//! `ρ(u) = ρ(v) − ∫_v^u ρ(t−1)/t dt`, whose integrand is known on the grid one
//! unit earlier, up to `u = 3`. That interval is covered by two interleaved
//! Simpson chains (even and odd offsets from the left endpoint); the odd
//! chain is seeded by a four-point Adams-type step. From `u = 3` on, the
//! averaging form `u ρ(u) = ∫_{u−1}^u ρ(t) dt` is used, which keeps the error
//! relative once ρ is tiny.

use std::sync::OnceLock;

use crate::error::{LabError, Result};

/// Grid points per unit (step `2^{-10}`).
pub const DEFAULT_STEPS_PER_UNIT: usize = 1024;
pub const DEFAULT_U_MAX: f64 = 50.0;

#[derive(Debug, Clone)]
pub struct DickmanInterpolant {
    steps_per_unit: usize,
    u_max: f64,
    values: Vec<f64>,
}

impl DickmanInterpolant {
    pub fn new(steps_per_unit: usize, u_max: f64) -> Result<Self> {
        Self::build(steps_per_unit, u_max, 2)
    }

    /// Build with closed-form values on `[0, closed_until]` (1 or 2) and the
    /// integral recursion beyond.
    fn build(steps_per_unit: usize, u_max: f64, closed_until: usize) -> Result<Self> {
        if steps_per_unit < 4 || steps_per_unit % 2 != 0 {
            return Err(LabError::domain("steps per unit must be even and ≥ 4"));
        }
        if !(u_max >= 2.0) || !u_max.is_finite() {
            return Err(LabError::domain("u_max must be finite and ≥ 2"));
        }
        let m = steps_per_unit;
        let units = u_max.ceil() as usize;
        let h = 1.0 / m as f64;
        let mut values = vec![0.0; units * m + 1];
        for (i, v) in values.iter_mut().enumerate().take(closed_until * m + 1) {
            let u = i as f64 * h;
            *v = if u <= 1.0 { 1.0 } else { 1.0 - u.ln() };
        }
        let stable_from = 3.min(units);
        for j in closed_until..stable_from {
            let base = j * m;
            let g = |values: &[f64], i: usize| values[i - m] / (i as f64 * h);
            let gs: Vec<f64> = (base..=base + m).map(|i| g(&values, i)).collect();
            values[base + 1] =
                values[base] - h * (9.0 * gs[0] + 19.0 * gs[1] - 5.0 * gs[2] + gs[3]) / 24.0;
            for start in [0usize, 1] {
                let mut s = start;
                while s + 2 <= m {
                    values[base + s + 2] =
                        values[base + s] - h / 3.0 * (gs[s] + 4.0 * gs[s + 1] + gs[s + 2]);
                    s += 2;
                }
            }
        }
        // u ρ(u) = ∫_{u-1}^{u} ρ(t) dt, Simpson over the trailing unit window
        // with the unknown endpoint solved for. Every term is positive, so the
        // error stays relative as ρ decays.
        for i in stable_from * m + 1..values.len() {
            let lo = i - m;
            let mut known = values[lo];
            for k in 1..m {
                known += if k % 2 == 1 { 4.0 } else { 2.0 } * values[lo + k];
            }
            values[i] = (h / 3.0) * known / (i as f64 * h - h / 3.0);
        }
        Ok(DickmanInterpolant {
            steps_per_unit,
            u_max,
            values,
        })
    }

    pub fn step(&self) -> f64 {
        1.0 / self.steps_per_unit as f64
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    /// Grid values at `u = 0, step, 2·step, …`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// ρ(u) by cubic interpolation inside the unit interval containing `u`.
    pub fn eval(&self, u: f64) -> Result<f64> {
        if u.is_nan() || u < 0.0 {
            return Err(LabError::domain(format!("ρ is defined for u ≥ 0, got {u}")));
        }
        if u > self.u_max {
            return Err(LabError::domain(format!("u = {u} exceeds u_max = {}", self.u_max)));
        }
        if u <= 1.0 {
            return Ok(1.0);
        }
        if u <= 2.0 {
            return Ok(1.0 - u.ln());
        }
        let m = self.steps_per_unit;
        let pos = u * m as f64;
        let i = pos.floor() as usize;
        if (pos - i as f64) == 0.0 {
            return Ok(self.values[i]);
        }
        let unit = i / m;
        let lo = unit * m;
        let hi = lo + m;
        let first = i.saturating_sub(1).clamp(lo, hi - 3);
        let nodes = [first, first + 1, first + 2, first + 3];
        let mut acc = 0.0;
        for (a, &na) in nodes.iter().enumerate() {
            let mut w = 1.0;
            for (b, &nb) in nodes.iter().enumerate() {
                if a != b {
                    w *= (pos - nb as f64) / (na as f64 - nb as f64);
                }
            }
            acc += w * self.values[na];
        }
        Ok(acc)
    }

    /// `max |ρ'(u) + ρ(u−1)/u|` over interior grid points `u > 1` that are not
    /// integers, with ρ' from central differences.
    pub fn max_delay_residual(&self) -> f64 {
        let m = self.steps_per_unit;
        let h = self.step();
        let last = self.values.len() - 1;
        (m + 1..last)
            .filter(|i| i % m != 0)
            .map(|i| {
                let deriv = (self.values[i + 1] - self.values[i - 1]) / (2.0 * h);
                (deriv + self.values[i - m] / (i as f64 * h)).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn default_interpolant() -> &'static DickmanInterpolant {
    static RHO: OnceLock<DickmanInterpolant> = OnceLock::new();
    RHO.get_or_init(|| {
        DickmanInterpolant::new(DEFAULT_STEPS_PER_UNIT, DEFAULT_U_MAX).expect("valid defaults")
    })
}

/// ρ(u) for `0 ≤ u ≤ 50`.
pub fn dickman_rho(u: f64) -> Result<f64> {
    default_interpolant().eval(u)
}
