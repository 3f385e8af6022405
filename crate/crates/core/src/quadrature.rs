//! k-space side of the walk-count identities.
//!
//! Every integrand here is a trigonometric polynomial in fractional reciprocal
//! coordinates, so the plain mean over `N` equispaced nodes per axis (the periodic
//! trapezoid rule) is exact once `N` exceeds the per-axis bandwidth. Moments are
//! therefore computed directly instead of differentiating `Z` numerically.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{DispersionTerm, LatticeSpec};
use crate::numeric::{pairwise_sum, parallel_mean};
use crate::series::MultiIndex;

/// Upper limit on quadrature nodes per moment.
pub const MAX_GRID_NODES: u128 = 1 << 24;

/// Default number of `φ` nodes for the Fourier coefficients of the complex-hopping ring.
pub const DEFAULT_PHI_NODES: usize = 256;

/// Uniform grid `u_j = i_j / N` on the reciprocal primitive cell; the periodic
/// endpoint is excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureGrid {
    points_per_dim: usize,
    dimension: usize,
}

impl QuadratureGrid {
    pub fn new(points_per_dim: usize, dimension: usize) -> Result<Self> {
        if points_per_dim == 0 {
            return Err(Error::InvalidGrid("at least one node per axis required".into()));
        }
        let nodes = (points_per_dim as u128).pow(dimension as u32);
        if nodes > MAX_GRID_NODES {
            return Err(Error::GridTooLarge { nodes, limit: MAX_GRID_NODES });
        }
        Ok(QuadratureGrid { points_per_dim, dimension })
    }

    pub fn points_per_dim(&self) -> usize {
        self.points_per_dim
    }

    pub fn node_count(&self) -> usize {
        self.points_per_dim.pow(self.dimension as u32)
    }

    /// Fractional coordinates of node `i` (mixed radix, first axis fastest).
    pub fn node(&self, mut i: usize, out: &mut [f64]) {
        let n = self.points_per_dim;
        for x in out.iter_mut().take(self.dimension) {
            *x = (i % n) as f64 / n as f64;
            i /= n;
        }
    }

    /// Mean of `f` over all nodes, deterministic for any thread count.
    pub fn mean<F>(&self, f: F) -> f64
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let dim = self.dimension;
        parallel_mean(self.node_count(), |i| {
            let mut u = [0.0f64; 8];
            self.node(i, &mut u[..dim]);
            f(&u[..dim])
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentResult {
    pub index: MultiIndex,
    pub value: f64,
    pub grid: usize,
    /// The grid is finer than the bandwidth of the integrand, so the mean is exact
    /// up to rounding.
    pub estimated_exact: bool,
}

/// Smallest alias-free grid for a moment: `n h + 1` nodes per axis for single-atom
/// lattices (`h` the largest bandwidth among labels in use), `(n/2) h + 1` for the
/// squared-band kernel of two-sublattice lattices, and the ring size for the
/// finite chain, whose quasimomenta are discrete.
pub fn required_grid(spec: &LatticeSpec, index: &MultiIndex) -> Result<usize> {
    check_arity(spec, index)?;
    if let Some(ring) = spec.pbc_size {
        return Ok(ring);
    }
    let terms = spec.dispersion_terms()?;
    let n = index.total() as usize;
    if spec.is_bipartite() {
        let h = terms[0].bandwidth as usize;
        return Ok((n / 2) * h + 1);
    }
    let h = terms
        .iter()
        .zip(index.exponents())
        .filter(|(_, &m)| m > 0)
        .map(|(t, _)| t.bandwidth as usize)
        .max()
        .unwrap_or(0);
    Ok(n * h + 1)
}

fn check_arity(spec: &LatticeSpec, index: &MultiIndex) -> Result<()> {
    if index.arity() != spec.hopping_count {
        return Err(Error::IndexArity { got: index.arity(), expected: spec.hopping_count });
    }
    Ok(())
}

fn monomial(terms: &[DispersionTerm], exponents: &[u32], u: &[f64]) -> f64 {
    terms
        .iter()
        .zip(exponents)
        .filter(|(_, &m)| m > 0)
        .map(|(t, &m)| t.eval_fractional(u).powi(m as i32))
        .product()
}

/// Moment `M_m = (1/V) ∫ prod_s ε̂_s(k)^{m_s} dk` over the primitive cell on an
/// `N`-per-axis grid. Then `Z_m = M_m / prod m_s!`.
///
/// The finite chain always uses its `Λ` quasimomenta (`N` is ignored) and
/// two-sublattice lattices are routed through [`two_band_even_moment`].
pub fn moment(spec: &LatticeSpec, index: &MultiIndex, points_per_dim: usize) -> Result<MomentResult> {
    check_arity(spec, index)?;
    if points_per_dim == 0 {
        return Err(Error::InvalidGrid("at least one node per axis required".into()));
    }
    if spec.is_bipartite() {
        let mut r = two_band_even_moment(spec, index.total(), points_per_dim)?;
        r.index = index.clone();
        return Ok(r);
    }
    let terms = spec.dispersion_terms()?;
    let (grid, exact) = match spec.pbc_size {
        Some(ring) => (QuadratureGrid::new(ring, 1)?, true),
        None => {
            let need = required_grid(spec, index)?;
            (QuadratureGrid::new(points_per_dim, spec.dimension)?, points_per_dim >= need)
        }
    };
    let value = grid.mean(|u| monomial(&terms, index.exponents(), u));
    Ok(MomentResult { index: index.clone(), value, grid: grid.points_per_dim(), estimated_exact: exact })
}

/// `2 * mean((ε̂²)^{n/2})` for a two-sublattice lattice: the `ξ^n` moment of
/// `sum_σ exp(σ ξ sqrt(ε̂²))`. Odd `n` is zero because the two subbands cancel.
pub fn two_band_even_moment(spec: &LatticeSpec, n: u32, points_per_dim: usize) -> Result<MomentResult> {
    if !spec.is_bipartite() {
        return Err(Error::NotTwoSublattice(spec.name.to_string()));
    }
    let index = MultiIndex::single(n);
    if n % 2 == 1 {
        return Ok(MomentResult { index, value: 0.0, grid: points_per_dim, estimated_exact: true });
    }
    let kernel = spec.dispersion_term(1)?;
    let grid = QuadratureGrid::new(points_per_dim, spec.dimension)?;
    let half = (n / 2) as i32;
    let value = 2.0 * grid.mean(|u| kernel.eval_fractional(u).powi(half));
    let need = (n as usize / 2) * kernel.bandwidth as usize + 1;
    Ok(MomentResult { index, value, grid: points_per_dim, estimated_exact: points_per_dim >= need })
}

fn check_ring(ring: usize) -> Result<()> {
    if ring < 3 {
        return Err(Error::RingTooSmall(ring));
    }
    Ok(())
}

/// Mean of `f(2 pi m / ring)` over the ring's quasimomenta.
fn ring_mean(ring: usize, f: impl Fn(f64) -> f64) -> f64 {
    let vals: Vec<f64> = (0..ring).map(|m| f(2.0 * PI * m as f64 / ring as f64)).collect();
    pairwise_sum(&vals) / ring as f64
}

/// `Z(ξ, Λ) = (1/Λ) sum_k exp(2 ξ cos k)` over `k = 2 pi m / Λ`.
pub fn finite_chain_ksum(ring: usize, xi: f64) -> Result<f64> {
    check_ring(ring)?;
    Ok(ring_mean(ring, |k| (2.0 * xi * k.cos()).exp()))
}

/// Ring partition function for complex hopping `t = |t| e^{iφ}`, with `ξ = -ρ e^{iφ}`:
/// `(1/Λ) sum_k exp(-2 ρ cos(k + φ))`.
pub fn complex_ring_ksum(ring: usize, rho: f64, phi: f64) -> Result<f64> {
    check_ring(ring)?;
    Ok(ring_mean(ring, |k| (-2.0 * rho * (k + phi).cos()).exp()))
}

/// Fourier coefficient of the complex-hopping ring partition function in `φ`:
/// `a_0 = mean_φ Z`, `a_d = 2 mean_φ Z cos(d φ)` for `d > 0`, on `phi_nodes`
/// equispaced nodes of `[-π, π)`.
pub fn complex_fourier_a(ring: usize, rho: f64, d: u32, phi_nodes: usize) -> Result<f64> {
    check_ring(ring)?;
    if phi_nodes == 0 {
        return Err(Error::InvalidGrid("at least one φ node required".into()));
    }
    let vals: Vec<f64> = (0..phi_nodes)
        .map(|j| {
            let phi = -PI + 2.0 * PI * j as f64 / phi_nodes as f64;
            let z = ring_mean(ring, |k| (-2.0 * rho * (k + phi).cos()).exp());
            z * (f64::from(d) * phi).cos()
        })
        .collect();
    let mean = pairwise_sum(&vals) / phi_nodes as f64;
    Ok(if d == 0 { mean } else { 2.0 * mean })
}

/// Walk-sum side of the same coefficient, truncated at walk length `max_length`:
/// `(1 or 2) sum_n (-ρ)^n / (((n+d)/2)! ((n-d)/2)!)`, nonzero only for `Λ | d`.
pub fn complex_fourier_a_series(ring: usize, rho: f64, d: u32, max_length: u32) -> Result<f64> {
    check_ring(ring)?;
    if d as usize % ring != 0 {
        return Ok(0.0);
    }
    let mut terms = Vec::new();
    let mut n = d;
    while n <= max_length {
        let plus = (n + d) / 2;
        let minus = (n - d) / 2;
        terms.push((-rho).powi(n as i32) * inv_factorial(plus) * inv_factorial(minus));
        n += 2;
    }
    let s = pairwise_sum(&terms);
    Ok(if d == 0 { s } else { 2.0 * s })
}

fn inv_factorial(k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc / f64::from(j))
}

/// Residual of `(1/Λ) sum_k exp(2ρ sin k) = sum_ν ρ^{2ν} sum_δ (-1)^δ / ((ν+δ)!(ν-δ)!)`
/// for even `Λ`, where `2δ` runs over multiples of `Λ` with `|δ| <= ν`; the right side
/// is truncated at `ν <= nu_max`.
pub fn phi_half_identity_check(ring: usize, rho: f64, nu_max: u32) -> Result<f64> {
    check_ring(ring)?;
    if ring % 2 == 1 {
        return Err(Error::OddRing(ring));
    }
    let lhs = ring_mean(ring, |k| (2.0 * rho * k.sin()).exp());
    let step = (ring / 2) as i64;
    let mut terms = Vec::new();
    for nu in 0..=i64::from(nu_max) {
        let c_max = nu / step;
        for c in -c_max..=c_max {
            let delta = c * step;
            let sign = if delta.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let a = (nu + delta) as u32;
            let b = (nu - delta) as u32;
            terms.push(sign * rho.powi(2 * nu as i32) * inv_factorial(a) * inv_factorial(b));
        }
    }
    Ok((lhs - pairwise_sum(&terms)).abs())
}

/// Batch of moments for JSON or CSV output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentBatch {
    pub lattice: String,
    pub results: Vec<MomentResult>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MomentRow {
    lattice: String,
    index: String,
    grid: usize,
    value: f64,
    estimated_exact: bool,
}

impl MomentBatch {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.results {
            let idx: Vec<String> = r.index.exponents().iter().map(u32::to_string).collect();
            w.serialize(MomentRow {
                lattice: self.lattice.clone(),
                index: idx.join(";"),
                grid: r.grid,
                value: r.value,
                estimated_exact: r.estimated_exact,
            })?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let mut lattice = String::new();
        let mut results = Vec::new();
        for row in r.deserialize::<MomentRow>() {
            let row = row?;
            lattice = row.lattice;
            let index = row
                .index
                .split(';')
                .map(|t| t.parse::<u32>().map_err(|_| Error::Parse(format!("bad index `{t}`"))))
                .collect::<Result<Vec<_>>>()?;
            results.push(MomentResult {
                index: MultiIndex::new(index),
                value: row.value,
                grid: row.grid,
                estimated_exact: row.estimated_exact,
            });
        }
        Ok(MomentBatch { lattice, results })
    }
}
