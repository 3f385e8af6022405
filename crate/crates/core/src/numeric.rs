//! Small exact and floating-point helpers shared by the computation routes.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Memoized factorials `0!..=n!` as big integers.
#[derive(Debug, Clone)]
pub struct Factorials {
    table: Vec<BigUint>,
}

impl Factorials {
    pub fn up_to(n: usize) -> Self {
        let mut table = Vec::with_capacity(n + 1);
        table.push(BigUint::one());
        for k in 1..=n {
            let next = &table[k - 1] * BigUint::from(k);
            table.push(next);
        }
        Factorials { table }
    }

    pub fn get(&self, k: usize) -> &BigUint {
        &self.table[k]
    }

    pub fn max(&self) -> usize {
        self.table.len() - 1
    }

    /// `total! / prod(parts!)`; the caller guarantees `sum(parts) == total`.
    pub fn multinomial(&self, total: usize, parts: &[usize]) -> BigUint {
        debug_assert_eq!(parts.iter().sum::<usize>(), total);
        let mut denom = BigUint::one();
        for &p in parts {
            denom *= self.get(p);
        }
        self.get(total) / denom
    }
}

/// Exact square root of a big unsigned integer, if it is a perfect square.
pub fn exact_sqrt(value: &BigUint) -> Option<BigUint> {
    let root = num_integer::Roots::sqrt(value);
    if &root * &root == *value {
        Some(root)
    } else {
        None
    }
}

/// Formats a rational as `num/den`, or just `num` when the denominator is 1.
pub fn format_rational(value: &BigRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a rational number: `{text}`"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num = num.parse().map_err(|_| bad())?;
    let den: num_bigint::BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Nearest `f64` to an exact rational. Correct to a few ulps for the magnitudes
/// that occur here.
pub fn rational_to_f64(value: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    if let Some(v) = value.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back to scaling both parts when either overflows f64 on its own.
    let num = value.numer().abs();
    let den = value.denom().clone();
    let shift = num.bits().max(den.bits()).saturating_sub(1000);
    let n = (num >> shift).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
    let v = n / d;
    if value.is_negative() {
        -v
    } else {
        v
    }
}

/// Pairwise (cascade) summation: fixed association order, so the result only
/// depends on the input sequence.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Deterministic parallel mean of `f(i)` over `0..count`.
///
/// Work is cut into fixed-size blocks independent of the thread count; each block
/// is reduced pairwise, then the block sums are reduced pairwise in index order.
pub fn parallel_mean<F>(count: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    use rayon::prelude::*;
    const BLOCK: usize = 4096;
    if count == 0 {
        return 0.0;
    }
    let blocks = count.div_ceil(BLOCK);
    let sums: Vec<f64> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * BLOCK;
            let end = (start + BLOCK).min(count);
            let vals: Vec<f64> = (start..end).map(&f).collect();
            pairwise_sum(&vals)
        })
        .collect();
    pairwise_sum(&sums) / count as f64
}
