//! Exact Taylor coefficients of the partition function from closed-form
//! walk-counting sums.
//!
//! Every lattice routine first counts closed walks `Γ(m)` as big integers, then
//! divides once by `n!` to obtain the coefficient of `ξ_1^{m_1} ... ξ_C^{m_C}`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeKind, LatticeSpec};
use crate::numeric::{format_rational, parse_rational, rational_to_f64, Factorials};

/// Exponent tuple `(n_1, ..., n_C)`; ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn single(n: u32) -> Self {
        MultiIndex(vec![n])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// All indices of the given arity with `total <= max_total`, lexicographic.
    pub fn all_up_to(arity: usize, max_total: u32) -> Vec<MultiIndex> {
        fn rec(arity: usize, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if prefix.len() == arity {
                out.push(MultiIndex(prefix.clone()));
                return;
            }
            for k in 0..=budget {
                prefix.push(k);
                rec(arity, budget - k, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(arity, max_total, &mut Vec::with_capacity(arity), &mut out);
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Number of closed walks.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct WalkCount(pub BigUint);

impl WalkCount {
    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

impl fmt::Display for WalkCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for WalkCount {
    fn from(v: u64) -> Self {
        WalkCount(BigUint::from(v))
    }
}

/// Truncated multivariate Taylor series of `Z` in the `ξ_s`.
/// Only nonzero coefficients are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    lattice: String,
    max_order: u32,
    arity: usize,
    coefficients: BTreeMap<MultiIndex, BigRational>,
}

impl Series {
    pub fn new(lattice: impl Into<String>, max_order: u32, arity: usize) -> Self {
        Series { lattice: lattice.into(), max_order, arity, coefficients: BTreeMap::new() }
    }

    pub fn lattice(&self) -> &str {
        &self.lattice
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Stores `value` at `index`; zeros are dropped. Indices beyond `max_order`
    /// are rejected.
    pub fn insert(&mut self, index: MultiIndex, value: BigRational) -> Result<()> {
        if index.arity() != self.arity {
            return Err(Error::IndexArity { got: index.arity(), expected: self.arity });
        }
        if index.total() > self.max_order {
            return Err(Error::Parse(format!("index {index} exceeds max order {}", self.max_order)));
        }
        if value.is_zero() {
            self.coefficients.remove(&index);
        } else {
            self.coefficients.insert(index, value);
        }
        Ok(())
    }

    pub fn coefficient(&self, index: &MultiIndex) -> BigRational {
        self.coefficients.get(index).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Coefficient of `ξ^n` for a single-label series.
    pub fn order(&self, n: u32) -> BigRational {
        self.coefficient(&MultiIndex::single(n))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &BigRational)> {
        self.coefficients.iter()
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `n! * coefficient`, the closed-walk count. `None` if it is not a nonnegative integer.
    pub fn walk_count(&self, index: &MultiIndex, factorials: &Factorials) -> Option<WalkCount> {
        let scaled = self.coefficient(index) * BigRational::from_integer(BigInt::from(factorials.get(index.total() as usize).clone()));
        if !scaled.is_integer() || scaled.is_negative() {
            return None;
        }
        scaled.to_integer().to_biguint().map(WalkCount)
    }

    /// Evaluates the truncated polynomial at `xi` in floating point.
    pub fn evaluate(&self, xi: &[f64]) -> f64 {
        let mut terms: Vec<f64> = self
            .coefficients
            .iter()
            .map(|(idx, c)| {
                let mono: f64 = idx.exponents().iter().zip(xi).map(|(&e, &x)| x.powi(e as i32)).product();
                rational_to_f64(c) * mono
            })
            .collect();
        // smallest magnitudes first
        terms.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
        terms.iter().sum()
    }

    pub fn to_document(&self) -> SeriesDocument {
        SeriesDocument {
            lattice: self.lattice.clone(),
            max_order: self.max_order,
            coefficients: self
                .coefficients
                .iter()
                .map(|(idx, c)| CoefficientEntry {
                    index: idx.exponents().to_vec(),
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &SeriesDocument) -> Result<Self> {
        let arity = doc.coefficients.first().map(|e| e.index.len()).unwrap_or(1);
        let mut series = Series::new(doc.lattice.clone(), doc.max_order, arity);
        for e in &doc.coefficients {
            let value = parse_rational(&format!("{}/{}", e.num, e.den))?;
            series.insert(MultiIndex::new(e.index.clone()), value)?;
        }
        Ok(series)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Series::from_document(&serde_json::from_str(text)?)
    }

    /// CSV with header `lattice,max_order,index,num,den`; index entries joined by `;`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["lattice", "max_order", "index", "num", "den"])?;
        for e in self.to_document().coefficients {
            let idx: Vec<String> = e.index.iter().map(u32::to_string).collect();
            w.write_record([self.lattice.clone(), self.max_order.to_string(), idx.join(";"), e.num, e.den])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let mut doc = SeriesDocument { lattice: String::new(), max_order: 0, coefficients: Vec::new() };
        for row in r.records() {
            let row = row?;
            let field = |i: usize| row.get(i).ok_or_else(|| Error::Parse(format!("missing column {i}")));
            doc.lattice = field(0)?.to_string();
            doc.max_order = field(1)?.parse().map_err(|_| Error::Parse("bad max_order".into()))?;
            let index = field(2)?
                .split(';')
                .map(|t| t.parse::<u32>().map_err(|_| Error::Parse(format!("bad index `{t}`"))))
                .collect::<Result<Vec<_>>>()?;
            doc.coefficients.push(CoefficientEntry { index, num: field(3)?.to_string(), den: field(4)?.to_string() });
        }
        Series::from_document(&doc)
    }

    /// `num/den` table, one line per stored coefficient.
    pub fn to_table(&self) -> String {
        let mut out = format!("# {}  (max order {})\n", self.lattice, self.max_order);
        for (idx, c) in &self.coefficients {
            out.push_str(&format!("{:<16} {}\n", idx.to_string(), format_rational(c)));
        }
        out
    }
}

/// Serialized form: `{lattice, max_order, coefficients: [{index, num, den}]}` with
/// integers as decimal strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDocument {
    pub lattice: String,
    pub max_order: u32,
    pub coefficients: Vec<CoefficientEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub index: Vec<u32>,
    pub num: String,
    pub den: String,
}

/// `{-d_max, -d_max + 2, ..., d_max}`; empty for negative `d_max`.
pub fn stepped_range(d_max: i64) -> impl Iterator<Item = i64> {
    (0..).map(move |j| -d_max + 2 * j).take_while(move |d| *d <= d_max)
}

/// Largest admissible `|d_2|` for the chain with next-nearest hopping. `n1` must be
/// even; `d_1 = -2 d_2` then needs `|d_2| <= n1/2` and `d_2 ≡ n2 (mod 2)`.
pub fn nnn_d_max(n1: u32, n2: u32) -> i64 {
    debug_assert!(n1 % 2 == 0);
    let half = i64::from(n1 / 2);
    let n2 = i64::from(n2);
    let below = if half % 2 == n2 % 2 { half } else { half - 1 };
    if 2 * n2 < i64::from(n1) {
        n2
    } else if 2 * n2 > i64::from(n1) {
        below
    } else {
        debug_assert_eq!(below, n2, "both d_max regimes must agree at n1 = 2 n2");
        n2
    }
}

/// Ordered compositions of `total` into `parts` nonnegative parts. With
/// `Some(parity)` every part must have that parity.
fn compositions(total: usize, parts: usize, parity: Option<usize>) -> Vec<Vec<usize>> {
    fn rec(remaining: usize, slots: usize, parity: Option<usize>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            if parity.is_none_or(|p| remaining % 2 == p) {
                prefix.push(remaining);
                out.push(prefix.clone());
                prefix.pop();
            }
            return;
        }
        let (mut k, stride) = match parity {
            Some(p) => (p, 2),
            None => (0, 1),
        };
        while k <= remaining {
            prefix.push(k);
            rec(remaining - k, slots - 1, parity, prefix, out);
            prefix.pop();
            k += stride;
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(total, parts, parity, &mut Vec::with_capacity(parts), &mut out);
    out
}

fn coefficient_from_count(count: &BigUint, n: usize, f: &Factorials) -> BigRational {
    BigRational::new(BigInt::from(count.clone()), BigInt::from(f.get(n).clone()))
}

fn univariate(name: &str, max_order: u32, counts: Vec<BigUint>, f: &Factorials) -> Series {
    let mut s = Series::new(name, max_order, 1);
    for (n, count) in counts.into_iter().enumerate() {
        s.insert(MultiIndex::single(n as u32), coefficient_from_count(&count, n, f))
            .expect("order within range");
    }
    s
}

/// Closed walks of length `n` returning to the origin on the infinite chain.
pub fn chain_infinite_count(n: u32, f: &Factorials) -> BigUint {
    if n % 2 == 1 {
        return BigUint::zero();
    }
    let half = (n / 2) as usize;
    f.multinomial(n as usize, &[half, half])
}

/// `Z(ξ) = sum_ν ξ^{2ν}/(ν!)^2`, the series of `I_0(2ξ)`.
pub fn chain_infinite(max_order: u32) -> Series {
    let f = Factorials::up_to(max_order as usize);
    let counts = (0..=max_order).map(|n| chain_infinite_count(n, &f)).collect();
    univariate(LatticeKind::ChainNn.name(), max_order, counts, &f)
}

/// Closed walks of length `n` from a fixed site of the ring of `ring` sites,
/// summed over winding numbers `c` with `|c| <= floor(n / ring)`.
pub fn chain_finite_count(ring: usize, n: u32, f: &Factorials) -> BigUint {
    let n_i = i64::from(n);
    let ring_i = ring as i64;
    let w = n_i / ring_i;
    (-w..=w)
        .map(|c| c * ring_i)
        .filter(|d| (n_i - d).rem_euclid(2) == 0)
        .map(|d| {
            let plus = ((n_i + d) / 2) as usize;
            let minus = ((n_i - d) / 2) as usize;
            f.multinomial(n as usize, &[plus, minus])
        })
        .sum()
}

pub fn chain_finite(ring: usize, max_order: u32) -> Result<Series> {
    if ring < 3 {
        return Err(Error::RingTooSmall(ring));
    }
    let f = Factorials::up_to(max_order as usize);
    let counts = (0..=max_order).map(|n| chain_finite_count(ring, n, &f)).collect();
    Ok(univariate(LatticeKind::ChainNnFinite.name(), max_order, counts, &f))
}

/// `Γ(n1, n2)`: closed walks on the chain with `n1` unit steps and `n2` double steps.
pub fn chain_nnn_count(n1: u32, n2: u32, f: &Factorials) -> BigUint {
    if n1 % 2 == 1 {
        return BigUint::zero();
    }
    let total = (n1 + n2) as usize;
    let n1 = i64::from(n1);
    let n2_i = i64::from(n2);
    stepped_range(nnn_d_max(n1 as u32, n2))
        .map(|d2| {
            let parts = [
                ((n1 + 2 * d2) / 2) as usize,
                ((n1 - 2 * d2) / 2) as usize,
                ((n2_i + d2) / 2) as usize,
                ((n2_i - d2) / 2) as usize,
            ];
            f.multinomial(total, &parts)
        })
        .sum()
}

/// Bivariate series `L_{n1,n2}` in `(ξ_1, ξ_2)` for all `n1 + n2 <= max_total_order`.
pub fn chain_nnn(max_total_order: u32) -> Series {
    let f = Factorials::up_to(max_total_order as usize);
    let mut s = Series::new(LatticeKind::ChainNnn.name(), max_total_order, 2);
    for idx in MultiIndex::all_up_to(2, max_total_order) {
        let (n1, n2) = (idx.exponents()[0], idx.exponents()[1]);
        let count = chain_nnn_count(n1, n2, &f);
        let value = coefficient_from_count(&count, (n1 + n2) as usize, &f);
        s.insert(idx, value).expect("index within range");
    }
    s
}

/// Closed walks on a lattice whose `k` step directions `±e_i` satisfy a single
/// linear relation `e_1 + ... + e_k = 0` with any `k - 1` of them independent
/// (triangular: k = 3, bcc: k = 4). Closure forces `d_1 = ... = d_k = d`.
pub fn simplex_count(directions: usize, n: u32, f: &Factorials) -> BigUint {
    let n = n as usize;
    let mut total = BigUint::zero();
    for parity in 0..=1 {
        if (directions * parity) % 2 != n % 2 {
            continue;
        }
        for parts in compositions(n, directions, Some(parity)) {
            let d_max = *parts.iter().min().expect("at least one direction") as i64;
            for d in stepped_range(d_max) {
                let halves: Vec<usize> = parts
                    .iter()
                    .flat_map(|&p| {
                        let p = p as i64;
                        [((p + d) / 2) as usize, ((p - d) / 2) as usize]
                    })
                    .collect();
                total += f.multinomial(n, &halves);
            }
        }
    }
    total
}

fn simplex_series(kind: LatticeKind, directions: usize, max_order: u32) -> Series {
    let f = Factorials::up_to(max_order as usize);
    let counts: Vec<BigUint> = (0..=max_order).into_par_iter().map(|n| simplex_count(directions, n, &f)).collect();
    univariate(kind.name(), max_order, counts, &f)
}

/// `T_n` for the triangular lattice with equal hoppings.
pub fn triangular(max_order: u32) -> Series {
    simplex_series(LatticeKind::Triangular, 3, max_order)
}

/// `B_n` for the bcc lattice with equal hoppings.
pub fn bcc(max_order: u32) -> Series {
    simplex_series(LatticeKind::Bcc, 4, max_order)
}

/// Closed walks on a two-sublattice lattice whose A-site neighbours are `e_1..e_k`
/// with `sum e_i = 0` as the only relation, counted over both starting sublattices:
/// `2 sum_{p_1 + ... + p_k = n/2} (p! / prod p_i!)^2`.
pub fn bipartite_count(directions: usize, n: u32, f: &Factorials) -> BigUint {
    if n % 2 == 1 {
        return BigUint::zero();
    }
    let p = (n / 2) as usize;
    let mut sum = BigUint::zero();
    for parts in compositions(p, directions, None) {
        let m = f.multinomial(p, &parts);
        sum += &m * &m;
    }
    sum * 2u32
}

fn bipartite_series(kind: LatticeKind, directions: usize, max_order: u32) -> Series {
    let f = Factorials::up_to(max_order as usize);
    let counts: Vec<BigUint> = (0..=max_order).into_par_iter().map(|n| bipartite_count(directions, n, &f)).collect();
    univariate(kind.name(), max_order, counts, &f)
}

/// `G_n` for the honeycomb lattice; `G_0 = 2`.
pub fn honeycomb(max_order: u32) -> Series {
    bipartite_series(LatticeKind::Honeycomb, 3, max_order)
}

/// `D_n` for the diamond lattice; `D_0 = 2`.
pub fn diamond(max_order: u32) -> Series {
    bipartite_series(LatticeKind::Diamond, 4, max_order)
}

/// Exact series for a built-in lattice.
pub fn for_spec(spec: &LatticeSpec, max_order: u32) -> Result<Series> {
    Ok(match spec.name {
        LatticeKind::ChainNn => chain_infinite(max_order),
        LatticeKind::ChainNnFinite => chain_finite(spec.pbc_size.ok_or(Error::MissingRingSize)?, max_order)?,
        LatticeKind::ChainNnn => chain_nnn(max_order),
        LatticeKind::Triangular => triangular(max_order),
        LatticeKind::Bcc => bcc(max_order),
        LatticeKind::Honeycomb => honeycomb(max_order),
        LatticeKind::Diamond => diamond(max_order),
    })
}

/// Sets `ξ_s = ξ_{assignment[s-1]}`: label `s` (1-based) is renamed to
/// `assignment[s-1]` in `1..=target_count` and coefficients are re-accumulated.
pub fn merge_labels(series: &Series, assignment: &[usize], target_count: usize) -> Result<Series> {
    if assignment.len() != series.arity() {
        return Err(Error::InvalidAssignment(format!(
            "{} labels assigned, series has {}",
            assignment.len(),
            series.arity()
        )));
    }
    if target_count == 0 || target_count > series.arity() {
        return Err(Error::InvalidAssignment(format!("target label count {target_count} not in 1..={}", series.arity())));
    }
    if let Some(bad) = assignment.iter().find(|&&t| t == 0 || t > target_count) {
        return Err(Error::InvalidAssignment(format!("target label {bad} not in 1..={target_count}")));
    }
    let mut merged: BTreeMap<MultiIndex, BigRational> = BTreeMap::new();
    for (idx, c) in series.iter() {
        let mut e = vec![0u32; target_count];
        for (&n, &t) in idx.exponents().iter().zip(assignment) {
            e[t - 1] += n;
        }
        *merged.entry(MultiIndex::new(e)).or_insert_with(BigRational::zero) += c;
    }
    let mut out = Series::new(series.lattice(), series.max_order(), target_count);
    for (idx, c) in merged {
        out.insert(idx, c)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn stepped_range_cases() {
        assert_eq!(stepped_range(0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(stepped_range(3).collect::<Vec<_>>(), vec![-3, -1, 1, 3]);
        assert_eq!(stepped_range(-1).count(), 0);
    }

    #[test]
    fn nnn_d_max_regimes() {
        // n1 >= 2 n2: every |d2| <= n2 is reachable
        assert_eq!(nnn_d_max(6, 2), 2);
        assert_eq!(nnn_d_max(2, 1), 1);
        // n1 <= 2 n2 with matching parity of n1/2 and n2
        assert_eq!(nnn_d_max(2, 3), 1);
        assert_eq!(nnn_d_max(4, 4), 2);
        // mismatched parity drops by one
        assert_eq!(nnn_d_max(4, 3), 1);
        assert_eq!(nnn_d_max(2, 2), 0);
        // n1 = 0: odd n2 has no admissible d2
        assert_eq!(nnn_d_max(0, 3), -1);
        assert_eq!(nnn_d_max(0, 2), 0);
        // boundary n1 = 2 n2
        for n2 in 0..10 {
            assert_eq!(nnn_d_max(2 * n2, n2), i64::from(n2));
        }
    }

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(4, 3, Some(0)).len(), 6); // (4,0,0)x3, (2,2,0)x3
        assert_eq!(compositions(3, 3, Some(1)).len(), 1);
        assert_eq!(compositions(5, 4, Some(1)).len(), 0);
        assert_eq!(compositions(0, 2, Some(0)), vec![vec![0, 0]]);
        assert_eq!(compositions(3, 3, None).len(), 10);
    }

    #[test]
    fn infinite_chain_values() {
        let s = chain_infinite(6);
        assert_eq!(s.order(0), q(1, 1));
        assert_eq!(s.order(1), q(0, 1));
        assert_eq!(s.order(2), q(1, 1));
        assert_eq!(s.order(4), q(1, 4));
        assert_eq!(s.order(6), q(1, 36));
    }

    #[test]
    fn finite_chain_values() {
        assert_eq!(chain_finite(3, 6).unwrap().order(3), q(1, 3));
        assert_eq!(chain_finite(4, 6).unwrap().order(3), q(0, 1));
        assert_eq!(chain_finite(6, 6).unwrap().order(6), q(11, 360));
        assert!(matches!(chain_finite(2, 4), Err(Error::RingTooSmall(2))));
    }

    #[test]
    fn nnn_values() {
        let s = chain_nnn(6);
        let l = |a, b| s.coefficient(&MultiIndex::new(vec![a, b]));
        assert_eq!(l(0, 0), q(1, 1));
        assert_eq!(l(2, 1), q(1, 1));
        assert_eq!(l(0, 2), q(1, 1));
        assert_eq!(l(2, 0), q(1, 1));
        assert_eq!(l(1, 2), q(0, 1));
        assert_eq!(l(0, 3), q(0, 1));
    }

    #[test]
    fn printed_expansions() {
        let t = triangular(6);
        let want = [q(1, 1), q(0, 1), q(3, 1), q(2, 1), q(15, 4), q(3, 1), q(17, 6)];
        for (n, w) in want.iter().enumerate() {
            assert_eq!(&t.order(n as u32), w, "T_{n}");
        }
        let b = bcc(8);
        assert_eq!(b.order(2), q(4, 1));
        assert_eq!(b.order(4), q(9, 1));
        assert_eq!(b.order(8), q(1225, 144));
        let g = honeycomb(6);
        assert_eq!(g.order(0), q(2, 1));
        assert_eq!(g.order(2), q(3, 1));
        assert_eq!(g.order(6), q(31, 120));
        let d = diamond(8);
        assert_eq!(d.order(0), q(2, 1));
        assert_eq!(d.order(2), q(4, 1));
        assert_eq!(d.order(4), q(7, 3));
        assert_eq!(d.order(8), q(97, 720));
    }

    #[test]
    fn merge_examples() {
        let s = chain_nnn(5);
        let same = merge_labels(&s, &[1, 2], 2).unwrap();
        assert_eq!(same, s);
        let merged = merge_labels(&s, &[1, 1], 1).unwrap();
        assert_eq!(merged.order(3), q(1, 1));
        let t = triangular(4);
        assert_eq!(merge_labels(&t, &[1], 1).unwrap(), t);
        assert!(merge_labels(&s, &[1], 1).is_err());
        assert!(merge_labels(&s, &[1, 3], 2).is_err());
    }

    #[test]
    fn serialization_formats_agree() {
        let s = chain_nnn(6);
        let from_json = Series::from_json(&s.to_json().unwrap()).unwrap();
        let from_csv = Series::from_csv(&s.to_csv().unwrap()).unwrap();
        assert_eq!(from_json, s);
        assert_eq!(from_csv, s);
        let table = bcc(12).to_table();
        assert!(table.trim_end().ends_with("5929/3600"));
    }
}
