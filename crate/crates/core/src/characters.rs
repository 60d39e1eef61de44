//! Dirichlet characters modulo `q`.
//!
//! The unit group `(Z/qZ)^*` is split by CRT into prime-power cells. Odd
//! cells `p^k` are cyclic with the least primitive root as generator; the
//! cell `4` is generated by `3`; a cell `2^k` with `k ≥ 3` is `⟨2^k − 1⟩ × ⟨5⟩`
//! of orders `2 × 2^{k−2}`; the cell `2` is trivial. Every unit gets a
//! discrete-log vector from per-cell lookup tables, and a character is an
//! exponent tuple `(e_1, …, e_r)` with `e_i` reduced modulo the order `n_i`
//! of the i-th cyclic factor:
//!
//! `χ(u) = ∏ e(e_i · log_i(u) / n_i)`.
//!
//! All values are powers of `ζ_L`, `L = lcm(n_i)`, so a character value is
//! stored as an exponent modulo `L` and looked up in a root-of-unity table.
//! Characters are enumerated in lexicographic order of exponent tuples; index
//! 0 is the principal character.

use num_complex::Complex64;

use crate::arith::{factorize, gcd, lcm, pow_mod};
use crate::error::{LabError, Result};
use crate::numeric::{e, floor_u64, roots_of_unity};
use crate::weight::WeightFunction;

pub const DEFAULT_MODULUS_CAP: u64 = 10_000_000;
pub const DEFAULT_SUM_CAP: u64 = 1_000_000_000;

const NOT_A_UNIT: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Cell {
    modulus: u64,
    p: u64,
    k: u32,
    generators: Vec<u64>,
    orders: Vec<u64>,
    /// `dlog[j][r]` is the exponent of generator `j` for residue `r`.
    dlog: Vec<Vec<u32>>,
}

impl Cell {
    fn new(p: u64, k: u32) -> Cell {
        let modulus = p.pow(k);
        let m = modulus as usize;
        if p == 2 {
            match k {
                1 => Cell {
                    modulus,
                    p,
                    k,
                    generators: vec![],
                    orders: vec![],
                    dlog: vec![],
                },
                2 => {
                    let mut t = vec![NOT_A_UNIT; 4];
                    t[1] = 0;
                    t[3] = 1;
                    Cell {
                        modulus,
                        p,
                        k,
                        generators: vec![3],
                        orders: vec![2],
                        dlog: vec![t],
                    }
                }
                _ => {
                    let half = modulus / 4;
                    let mut sign = vec![NOT_A_UNIT; m];
                    let mut five = vec![NOT_A_UNIT; m];
                    let mut pw = 1u64;
                    for b in 0..half {
                        sign[pw as usize] = 0;
                        five[pw as usize] = b as u32;
                        let neg = (modulus - pw) as usize;
                        sign[neg] = 1;
                        five[neg] = b as u32;
                        pw = pw * 5 % modulus;
                    }
                    Cell {
                        modulus,
                        p,
                        k,
                        generators: vec![modulus - 1, 5],
                        orders: vec![2, half],
                        dlog: vec![sign, five],
                    }
                }
            }
        } else {
            let order = modulus / p * (p - 1);
            let g = least_primitive_root(p, k);
            let mut t = vec![NOT_A_UNIT; m];
            let mut pw = 1u64;
            for j in 0..order {
                t[pw as usize] = j as u32;
                pw = pw * g % modulus;
            }
            Cell {
                modulus,
                p,
                k,
                generators: vec![g],
                orders: vec![order],
                dlog: vec![t],
            }
        }
    }
}

/// Least primitive root modulo `p^k` for an odd prime `p`.
fn least_primitive_root(p: u64, k: u32) -> u64 {
    let phi_p = p - 1;
    let qs: Vec<u64> = factorize(phi_p).expect("p ≥ 3").primes().collect();
    let p2 = p * p;
    (2..)
        .find(|&g| {
            g % p != 0
                && qs.iter().all(|&r| pow_mod(g, phi_p / r, p) != 1)
                && (k == 1 || pow_mod(g, phi_p, p2) != 1)
        })
        .expect("primitive roots exist modulo odd prime powers")
}

/// The full group of Dirichlet characters modulo `q`.
#[derive(Debug, Clone)]
pub struct CharacterGroup {
    q: u64,
    cells: Vec<Cell>,
    /// Order of each cyclic factor, flattened over cells.
    orders: Vec<u64>,
    /// `(cell index, generator index within the cell)` of each cyclic factor.
    factor_home: Vec<(usize, usize)>,
    order: u64,
    exponent: u64,
    roots: Vec<Complex64>,
}

/// One cyclic factor of the unit group, as seen inside its prime-power cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CyclicFactor {
    pub cell_modulus: u64,
    pub generator: u64,
    pub order: u64,
}

impl CharacterGroup {
    pub fn new(q: u64) -> Result<Self> {
        Self::with_cap(q, DEFAULT_MODULUS_CAP)
    }

    pub fn with_cap(q: u64, cap: u64) -> Result<Self> {
        if q == 0 {
            return Err(LabError::domain("modulus must be ≥ 1"));
        }
        if q > cap {
            return Err(LabError::resource(format!("modulus {q} exceeds cap {cap}")));
        }
        let cells: Vec<Cell> = factorize(q)?
            .factors()
            .iter()
            .map(|&(p, k)| Cell::new(p, k))
            .collect();
        let mut orders = Vec::new();
        let mut factor_home = Vec::new();
        for (ci, c) in cells.iter().enumerate() {
            for (gi, &o) in c.orders.iter().enumerate() {
                orders.push(o);
                factor_home.push((ci, gi));
            }
        }
        let order = orders.iter().product::<u64>();
        let exponent = orders.iter().fold(1, |a, &o| lcm(a, o));
        Ok(CharacterGroup {
            q,
            cells,
            orders,
            factor_home,
            order,
            exponent,
            roots: roots_of_unity(exponent),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// |G| = φ(q).
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Exponent `L` of the group; every value is a power of `e(1/L)`.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn factor_orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn factors(&self) -> Vec<CyclicFactor> {
        self.factor_home
            .iter()
            .map(|&(ci, gi)| CyclicFactor {
                cell_modulus: self.cells[ci].modulus,
                generator: self.cells[ci].generators[gi],
                order: self.cells[ci].orders[gi],
            })
            .collect()
    }

    /// `e(j/L)`.
    #[inline]
    pub fn root(&self, j: u64) -> Complex64 {
        self.roots[j as usize]
    }

    /// Discrete-log vector of `n` (one entry per cyclic factor), or `None`
    /// when `gcd(n, q) > 1`.
    pub fn log_vector(&self, n: i64) -> Option<Vec<u64>> {
        let mut out = Vec::with_capacity(self.orders.len());
        for c in &self.cells {
            let r = n.rem_euclid(c.modulus as i64) as usize;
            if c.p == 2 && c.k == 1 {
                if r % 2 == 0 {
                    return None;
                }
                continue;
            }
            for t in &c.dlog {
                let l = t[r];
                if l == NOT_A_UNIT {
                    return None;
                }
                out.push(l as u64);
            }
        }
        Some(out)
    }

    /// Per-factor multipliers `log_i(n) · L/n_i mod L`; the value exponent of
    /// the character with tuple `e` is `Σ e_i · c_i mod L`.
    fn log_weights(&self, n: i64) -> Option<Vec<u64>> {
        let logs = self.log_vector(n)?;
        Some(
            logs.iter()
                .zip(&self.orders)
                .map(|(&l, &o)| l * (self.exponent / o) % self.exponent)
                .collect(),
        )
    }

    /// Value exponents `a_χ(n)` of every character at `n`, in index order.
    pub fn value_exponents_all(&self, n: i64) -> Option<Vec<u64>> {
        let w = self.log_weights(n)?;
        let l = self.exponent;
        let mut acc = vec![0u64];
        for (i, &o) in self.orders.iter().enumerate() {
            let mut next = Vec::with_capacity(acc.len() * o as usize);
            for &a in &acc {
                let mut v = a;
                for _ in 0..o {
                    next.push(v);
                    v = (v + w[i]) % l;
                }
            }
            acc = next;
        }
        Some(acc)
    }

    pub fn character(&self, index: u64) -> Result<Character<'_>> {
        if index >= self.order {
            return Err(LabError::domain(format!(
                "character index {index} out of range for modulus {}",
                self.q
            )));
        }
        let mut exps = vec![0u64; self.orders.len()];
        let mut rest = index;
        for i in (0..self.orders.len()).rev() {
            exps[i] = rest % self.orders[i];
            rest /= self.orders[i];
        }
        Ok(Character {
            group: self,
            index,
            exponents: exps,
        })
    }

    /// Character with the given exponent tuple (reduced modulo the factor orders).
    pub fn character_from_exponents(&self, exps: &[u64]) -> Result<Character<'_>> {
        if exps.len() != self.orders.len() {
            return Err(LabError::domain("exponent tuple has the wrong length"));
        }
        let mut index = 0u64;
        for (e, o) in exps.iter().zip(&self.orders) {
            index = index * o + e % o;
        }
        self.character(index)
    }

    pub fn principal(&self) -> Character<'_> {
        self.character(0).expect("principal character always exists")
    }

    pub fn characters(&self) -> impl Iterator<Item = Character<'_>> + '_ {
        (0..self.order).map(move |i| self.character(i).expect("in range"))
    }

    /// `Σ_{n ≤ x} χ(n) f(n)` for every character, in index order.
    pub fn all_sums(&self, x: f64, f: &WeightFunction) -> Result<Vec<Complex64>> {
        let xs = floor_u64(x);
        check_sum_cap(xs)?;
        let fv = f.table(xs);
        // Aggregate weights by residue class first: the character only sees n mod q.
        let q = self.q as usize;
        let mut by_residue = vec![Complex64::new(0.0, 0.0); q];
        for n in 1..=xs as usize {
            by_residue[n % q] += fv[n];
        }
        let mut sums = vec![Complex64::new(0.0, 0.0); self.order as usize];
        for (r, &c) in by_residue.iter().enumerate() {
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            if let Some(a) = self.value_exponents_all(r as i64) {
                for (s, &aj) in sums.iter_mut().zip(&a) {
                    *s += c * self.roots[aj as usize];
                }
            }
        }
        Ok(sums)
    }

    /// Exact form of `Σ_{n ≤ x} χ(n) f(n)` for integer weights: for each
    /// character the coefficient vector `c` of length `L` with the sum equal
    /// to `Σ_j c_j ζ_L^j`.
    pub fn cyclotomic_sums(&self, x: f64, f: &WeightFunction) -> Result<Vec<Vec<i64>>> {
        let xs = floor_u64(x);
        check_sum_cap(xs)?;
        let fv = f
            .int_table(xs)
            .ok_or_else(|| LabError::domain("exact sums need an integer-valued weight"))?;
        let l = self.exponent as usize;
        if (self.order as usize).checked_mul(l).is_none_or(|c| c > 100_000_000) {
            return Err(LabError::resource("φ(q)·L exceeds 10^8 coefficients"));
        }
        let q = self.q as usize;
        let mut by_residue = vec![0i64; q];
        for n in 1..=xs as usize {
            by_residue[n % q] = by_residue[n % q]
                .checked_add(fv[n])
                .ok_or(LabError::Overflow("cyclotomic_sums"))?;
        }
        let mut out = vec![vec![0i64; l]; self.order as usize];
        for (r, &c) in by_residue.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if let Some(a) = self.value_exponents_all(r as i64) {
                for (row, &aj) in out.iter_mut().zip(&a) {
                    row[aj as usize] += c;
                }
            }
        }
        Ok(out)
    }

    /// For each character, `max_{t ≤ T} |Σ_{n ≤ t} χ(n)|`.
    pub fn max_partial_sums(&self, t_max: f64) -> Result<Vec<f64>> {
        let tm = floor_u64(t_max);
        check_sum_cap(tm)?;
        let mut sums = vec![Complex64::new(0.0, 0.0); self.order as usize];
        let mut best = vec![0.0f64; self.order as usize];
        for n in 1..=tm {
            if let Some(a) = self.value_exponents_all(n as i64) {
                for ((s, b), &aj) in sums.iter_mut().zip(best.iter_mut()).zip(&a) {
                    *s += self.roots[aj as usize];
                    *b = b.max(s.norm());
                }
            }
        }
        Ok(best)
    }

    /// `Δ_f(x, q) = max_{χ ≠ χ₀} |Σ_{n ≤ x} χ(n) f(n)|` with the achieving
    /// character; ties go to the lowest enumeration index.
    pub fn delta_max(&self, x: f64, f: &WeightFunction) -> Result<(f64, Character<'_>)> {
        if self.order < 2 {
            return Err(LabError::domain(format!(
                "modulus {} has no nonprincipal character",
                self.q
            )));
        }
        let sums = self.all_sums(x, f)?;
        let (idx, val) = argmax_nonprincipal(&sums);
        Ok((val, self.character(idx as u64)?))
    }
}

/// Index-ordered argmax of `|s|` over indices ≥ 1, first maximum wins.
pub(crate) fn argmax_nonprincipal(sums: &[Complex64]) -> (usize, f64) {
    let mut best = (1usize, sums[1].norm());
    for (i, s) in sums.iter().enumerate().skip(2) {
        let v = s.norm();
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

fn check_sum_cap(x: u64) -> Result<()> {
    if x > DEFAULT_SUM_CAP {
        return Err(LabError::resource(format!(
            "summation length {x} exceeds cap {DEFAULT_SUM_CAP}"
        )));
    }
    Ok(())
}

/// Construct the character group modulo `q`.
pub fn character_group(q: u64) -> Result<CharacterGroup> {
    CharacterGroup::new(q)
}

/// A Dirichlet character, identified by its exponent tuple within a group.
#[derive(Debug, Clone)]
pub struct Character<'g> {
    group: &'g CharacterGroup,
    index: u64,
    exponents: Vec<u64>,
}

impl PartialEq for Character<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.group.q == other.group.q && self.index == other.index
    }
}

impl<'g> Character<'g> {
    pub fn group(&self) -> &'g CharacterGroup {
        self.group
    }

    pub fn modulus(&self) -> u64 {
        self.group.q
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn is_principal(&self) -> bool {
        self.index == 0
    }

    /// Order of χ in the character group.
    pub fn order(&self) -> u64 {
        self.exponents
            .iter()
            .zip(&self.group.orders)
            .fold(1, |acc, (&e, &o)| lcm(acc, o / gcd(e, o)))
    }

    pub fn is_real(&self) -> bool {
        self.order() <= 2
    }

    /// χ(−1) = 1.
    pub fn is_even(&self) -> bool {
        self.value_exponent(-1) == Some(0)
    }

    pub fn conjugate(&self) -> Character<'g> {
        let exps: Vec<u64> = self
            .exponents
            .iter()
            .zip(&self.group.orders)
            .map(|(&e, &o)| (o - e) % o)
            .collect();
        self.group
            .character_from_exponents(&exps)
            .expect("same group")
    }

    /// Exponent `a` with `χ(n) = e(a/L)`, or `None` when `gcd(n, q) > 1`.
    pub fn value_exponent(&self, n: i64) -> Option<u64> {
        let w = self.group.log_weights(n)?;
        let l = self.group.exponent;
        Some(
            w.iter()
                .zip(&self.exponents)
                .fold(0u64, |acc, (&c, &e)| (acc + (c as u128 * e as u128 % l as u128) as u64) % l),
        )
    }

    pub fn evaluate(&self, n: i64) -> Complex64 {
        match self.value_exponent(n) {
            Some(a) => self.group.roots[a as usize],
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Smallest `f | q` such that χ is induced from a character modulo `f`.
    pub fn conductor(&self) -> u64 {
        let mut cond = 1u64;
        let mut fi = 0usize;
        for c in &self.group.cells {
            let nf = c.orders.len();
            let exps = &self.exponents[fi..fi + nf];
            fi += nf;
            if exps.iter().all(|&e| e == 0) {
                continue;
            }
            // Local character is trivial on 1 + p^j Z_{p^k} for the least such j.
            let trivial_from = |j: u32| -> bool {
                let step = c.p.pow(j);
                let mut u = 1u64;
                while u < c.modulus {
                    let phase: u64 = exps
                        .iter()
                        .enumerate()
                        .map(|(g, &e)| e * c.dlog[g][u as usize] as u64 % c.orders[g] * (self.group.exponent / c.orders[g]))
                        .sum::<u64>()
                        % self.group.exponent;
                    if phase != 0 {
                        return false;
                    }
                    u += step;
                }
                true
            };
            let j = (1..=c.k).find(|&j| trivial_from(j)).unwrap_or(c.k);
            cond *= c.p.pow(j);
        }
        cond
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.group.q
    }

    /// `τ(χ) = Σ_{n mod q} χ(n) e(n/q)`.
    pub fn gauss_sum(&self) -> Complex64 {
        let q = self.group.q;
        (1..=q as i64)
            .map(|n| self.evaluate(n) * e(n as f64 / q as f64))
            .sum()
    }

    /// `Σ_{n ≤ x} χ(n) f(n)` by direct summation.
    pub fn sum(&self, x: f64, f: &WeightFunction) -> Result<Complex64> {
        let xs = floor_u64(x);
        check_sum_cap(xs)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 1..=xs {
            if let Some(a) = self.value_exponent(n as i64) {
                acc += self.group.roots[a as usize] * f.value(n);
            }
        }
        Ok(acc)
    }
}

/// Weighted character sum `Σ_{n ≤ x} χ(n) f(n)`.
pub fn character_sum(chi: &Character<'_>, x: f64, f: &WeightFunction) -> Result<Complex64> {
    chi.sum(x, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::euler_phi;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn quadratic(g: &CharacterGroup) -> Character<'_> {
        g.characters()
            .find(|c| c.order() == 2)
            .expect("a quadratic character exists")
    }

    #[test]
    fn group_examples() {
        let g5 = character_group(5).unwrap();
        assert_eq!(g5.order(), 4);
        assert_eq!(g5.factor_orders(), &[4]);
        let g8 = character_group(8).unwrap();
        assert_eq!(g8.order(), 4);
        assert_eq!(g8.factor_orders(), &[2, 2]);
        assert_eq!(character_group(12).unwrap().order(), 4);
        assert!(matches!(character_group(0), Err(LabError::Domain(_))));
        assert!(matches!(
            CharacterGroup::with_cap(101, 100),
            Err(LabError::Resource(_))
        ));
        // units mod 8 all have order ≤ 2
        for u in [1i64, 3, 5, 7] {
            for chi in g8.characters() {
                assert!(close(chi.evaluate(u) * chi.evaluate(u), Complex64::new(1.0, 0.0), 1e-12));
            }
        }
    }

    #[test]
    fn generator_choices() {
        let g = character_group(7 * 7 * 16).unwrap();
        let f = g.factors();
        assert_eq!(f[0], CyclicFactor { cell_modulus: 16, generator: 15, order: 2 });
        assert_eq!(f[1], CyclicFactor { cell_modulus: 16, generator: 5, order: 4 });
        assert_eq!(f[2], CyclicFactor { cell_modulus: 49, generator: 3, order: 42 });
        let g4 = character_group(4).unwrap();
        assert_eq!(g4.factors()[0].generator, 3);
        assert_eq!(character_group(2).unwrap().order(), 1);
    }

    #[test]
    fn dlog_reconstructs_units() {
        for q in [5u64, 8, 9, 12, 16, 25, 27, 32, 36, 100, 128, 243, 360] {
            let g = character_group(q).unwrap();
            let facs = g.factors();
            for u in 1..q {
                let Some(logs) = g.log_vector(u as i64) else {
                    assert!(gcd(u, q) > 1);
                    continue;
                };
                // Each cell residue must be reproduced by its generators.
                let mut fi = 0;
                for c in &g.cells {
                    let mut prod = 1u64;
                    for gen in &c.generators {
                        prod = prod * pow_mod(*gen, logs[fi], c.modulus) % c.modulus;
                        fi += 1;
                    }
                    assert_eq!(prod, u % c.modulus, "q={q} u={u}");
                }
                assert_eq!(fi, facs.len());
            }
        }
    }

    #[test]
    fn evaluate_examples() {
        let g = character_group(5).unwrap();
        let chi0 = g.principal();
        assert_eq!(chi0.evaluate(3), Complex64::new(1.0, 0.0));
        for chi in g.characters() {
            assert_eq!(chi.evaluate(5), Complex64::new(0.0, 0.0));
        }
        let leg = quadratic(&g);
        assert!(close(leg.evaluate(2), Complex64::new(-1.0, 0.0), 1e-12));
    }

    #[test]
    fn conductor_examples() {
        let g12 = character_group(12).unwrap();
        assert_eq!(g12.principal().conductor(), 1);
        let g5 = character_group(5).unwrap();
        assert_eq!(quadratic(&g5).conductor(), 5);
        // induced from the nontrivial character mod 3: χ(n) depends on n mod 3 only
        let induced = g12
            .characters()
            .find(|c| {
                !c.is_principal()
                    && (1..12).filter(|&n| gcd(n, 12) == 1).all(|n| {
                        (1..12)
                            .filter(|&m| gcd(m, 12) == 1 && m % 3 == n % 3)
                            .all(|m| close(c.evaluate(n as i64), c.evaluate(m as i64), 1e-12))
                    })
            })
            .unwrap();
        assert_eq!(induced.conductor(), 3);
    }

    #[test]
    fn conductor_matches_definition() {
        for q in 1..=120u64 {
            let g = character_group(q).unwrap();
            for chi in g.characters() {
                let brute = (1..=q)
                    .filter(|d| q % d == 0)
                    .find(|&d| {
                        (1..q as i64)
                            .filter(|&n| gcd(n as u64, q) == 1 && (n as u64) % d == 1 % d)
                            .all(|n| chi.value_exponent(n) == Some(0))
                    })
                    .unwrap();
                assert_eq!(chi.conductor(), brute, "q={q} idx={}", chi.index());
                assert_eq!(q % chi.conductor(), 0);
            }
        }
    }

    #[test]
    fn gauss_sum_examples() {
        let g5 = character_group(5).unwrap();
        let tau = quadratic(&g5).gauss_sum();
        assert!(close(tau, Complex64::new(5f64.sqrt(), 0.0), 1e-12));
        for p in [5u64, 7, 11, 13] {
            let g = character_group(p).unwrap();
            assert!(close(g.principal().gauss_sum(), Complex64::new(-1.0, 0.0), 1e-10));
        }
        let g7 = character_group(7).unwrap();
        for chi in g7.characters().filter(|c| c.is_primitive()) {
            assert!((chi.gauss_sum().norm() - 7f64.sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn character_sum_examples() {
        let g4 = character_group(4).unwrap();
        let s = g4.principal().sum(5.0, &WeightFunction::Unit).unwrap();
        assert!(close(s, Complex64::new(3.0, 0.0), 1e-12));
        let g5 = character_group(5).unwrap();
        let s = quadratic(&g5).sum(4.0, &WeightFunction::Unit).unwrap();
        assert!(close(s, Complex64::new(0.0, 0.0), 1e-12));
        for q in [7u64, 12, 30] {
            let g = character_group(q).unwrap();
            for chi in g.characters().skip(1) {
                assert!(chi.sum(q as f64, &WeightFunction::Unit).unwrap().norm() < 1e-9);
            }
        }
    }

    #[test]
    fn delta_max_examples() {
        let g5 = character_group(5).unwrap();
        let (v, w) = g5.delta_max(2.0, &WeightFunction::Unit).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-12);
        assert!(!w.is_principal());
        let g3 = character_group(3).unwrap();
        assert!((g3.delta_max(1.0, &WeightFunction::Unit).unwrap().0 - 1.0).abs() < 1e-12);
        let g7 = character_group(7).unwrap();
        assert!((g7.delta_max(3.0, &WeightFunction::Unit).unwrap().0 - 2.0).abs() < 1e-12);
        assert!(character_group(2).unwrap().delta_max(1.0, &WeightFunction::Unit).is_err());
    }

    #[test]
    fn all_sums_agree_with_direct_sums() {
        let w = WeightFunction::Moebius;
        for q in [12u64, 35, 64] {
            let g = character_group(q).unwrap();
            let all = g.all_sums(150.0, &w).unwrap();
            for chi in g.characters() {
                assert!(close(all[chi.index() as usize], chi.sum(150.0, &w).unwrap(), 1e-9));
            }
        }
    }

    #[test]
    fn orthogonality_and_vanishing() {
        for q in 1..=60u64 {
            let g = character_group(q).unwrap();
            assert_eq!(g.order(), euler_phi(q).unwrap());
            let units: Vec<i64> = (1..=q as i64).filter(|&n| gcd(n as u64, q) == 1).collect();
            let table: Vec<Vec<Complex64>> = g
                .characters()
                .map(|c| units.iter().map(|&u| c.evaluate(u)).collect())
                .collect();
            for (i, &a) in units.iter().enumerate() {
                for (j, &b) in units.iter().enumerate() {
                    let s: Complex64 = table.iter().map(|row| row[i] * row[j].conj()).sum();
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!(close(s / g.order() as f64, Complex64::new(expect, 0.0), 1e-10));
                }
            }
            for chi in g.characters() {
                for n in -5..40i64 {
                    let v = chi.evaluate(n);
                    let unit = gcd(n.unsigned_abs(), q) == 1;
                    assert!((v.norm() - unit as u8 as f64).abs() < 1e-12);
                    assert!(close(v, chi.evaluate(n + q as i64), 1e-12));
                }
            }
        }
    }

    #[test]
    fn multiplicativity_and_order() {
        let g = character_group(720).unwrap();
        for chi in g.characters().step_by(7) {
            let ord = chi.order();
            for m in 1..60i64 {
                let vm = chi.evaluate(m);
                if vm.norm() > 0.5 {
                    let a = chi.value_exponent(m).unwrap();
                    assert_eq!(a * ord % g.exponent(), 0);
                }
                for n in 1..60i64 {
                    assert!(close(chi.evaluate(m * n), vm * chi.evaluate(n), 1e-12));
                }
            }
            assert!(close(
                chi.evaluate(7) * chi.conjugate().evaluate(7),
                Complex64::new(1.0, 0.0),
                1e-12
            ));
        }
    }
}
