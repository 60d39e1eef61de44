//! Small numeric helpers shared across modules.

use std::f64::consts::PI;

use num_complex::Complex64;

/// `e(z) = exp(2πiz)`.
#[inline]
pub fn e(z: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * z)
}

/// Table of the `m`-th roots of unity, `table[j] = e(j/m)`.
pub fn roots_of_unity(m: u64) -> Vec<Complex64> {
    (0..m).map(|j| e(j as f64 / m as f64)).collect()
}

/// Pairwise (tree) summation; the result depends only on the order of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn pairwise_sum_complex(xs: &[Complex64]) -> Complex64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_complex(&xs[..mid]) + pairwise_sum_complex(&xs[mid..])
}

/// Integer part of a nonnegative real bound, as used by every `n ≤ x` sum.
#[inline]
pub fn floor_u64(x: f64) -> u64 {
    if x.is_nan() || x < 1.0 {
        0
    } else {
        x.floor() as u64
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1] (10 points).
pub const GL10: [(f64, f64); 10] = [
    (-0.973_906_528_517_171_7, 0.066_671_344_308_688_14),
    (-0.865_063_366_688_984_5, 0.149_451_349_150_580_6),
    (-0.679_409_568_299_024_4, 0.219_086_362_515_982_04),
    (-0.433_395_394_129_247_2, 0.269_266_719_309_996_35),
    (-0.148_874_338_981_631_2, 0.295_524_224_714_752_87),
    (0.148_874_338_981_631_2, 0.295_524_224_714_752_87),
    (0.433_395_394_129_247_2, 0.269_266_719_309_996_35),
    (0.679_409_568_299_024_4, 0.219_086_362_515_982_04),
    (0.865_063_366_688_984_5, 0.149_451_349_150_580_6),
    (0.973_906_528_517_171_7, 0.066_671_344_308_688_14),
];

/// Ten-point Gauss–Legendre quadrature of `f` over `[a, b]`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    half * GL10.iter().map(|&(t, w)| w * f(mid + half * t)).sum::<f64>()
}

/// Composite Gauss–Legendre quadrature with `pieces` equal subintervals.
pub fn gauss_legendre_composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, pieces: usize) -> f64 {
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| gauss_legendre(&f, a + i as f64 * h, a + (i + 1) as f64 * h))
        .sum()
}
