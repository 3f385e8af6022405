//! Cross-route verification: exact series against the walk oracle and the
//! quadrature moments, the chain-nnn coefficient recurrence, and the bcc
//! square-rational test.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::LatticeSpec;
use crate::numeric::{exact_sqrt, format_rational, rational_to_f64, Factorials};
use crate::oracle::{enumerate_bounded, OracleBounds};
use crate::quadrature::{moment, required_grid};
use crate::series::{self, MultiIndex, Series};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative tolerance for quadrature against a nonzero exact coefficient.
    pub relative: f64,
    /// Absolute tolerance when the exact coefficient is zero.
    pub zero: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { relative: 1e-9, zero: 1e-12 }
    }
}

/// Grid selection for the quadrature route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridPolicy {
    /// `n h + 1` nodes per axis for each coefficient.
    Auto,
    Fixed(usize),
}

impl GridPolicy {
    pub fn resolve(&self, spec: &LatticeSpec, index: &MultiIndex) -> Result<usize> {
        match self {
            GridPolicy::Auto => required_grid(spec, index),
            GridPolicy::Fixed(n) => Ok(*n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub index: Vec<u32>,
    /// Exact coefficient as `num/den`.
    pub exact: String,
    /// `n!` times the exact coefficient.
    pub exact_count: Option<String>,
    /// Walk-oracle count, when the length is within the enumeration bound.
    pub oracle: Option<String>,
    pub oracle_match: Option<bool>,
    /// Quadrature coefficient `M_m / prod m_s!`.
    pub numeric: f64,
    pub grid: usize,
    pub abs_error: f64,
    pub rel_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub checked: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub lattice: String,
    pub pbc_size: Option<usize>,
    pub max_order: u32,
    pub tolerances: Tolerances,
    pub records: Vec<CoefficientRecord>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn summarize(passes: impl Iterator<Item = bool>) -> Summary {
    let mut s = Summary { checked: 0, passed: 0, failed: 0 };
    for p in passes {
        s.checked += 1;
        if p {
            s.passed += 1;
        } else {
            s.failed += 1;
        }
    }
    s
}

/// Compares all three routes for every multi-index with total `<= max_order`.
/// The oracle is consulted only up to its length bound.
pub fn verify_identity(
    spec: &LatticeSpec,
    max_order: u32,
    grid: GridPolicy,
    tolerances: Tolerances,
    bounds: &OracleBounds,
) -> Result<VerificationReport> {
    let exact = series::for_spec(spec, max_order)?;
    let factorials = Factorials::up_to(max_order as usize);
    let oracle_limit = bounds.for_dimension(spec.dimension).min(max_order);
    let tallies = (0..=oracle_limit)
        .into_par_iter()
        .map(|n| enumerate_bounded(spec, n, bounds))
        .collect::<Result<Vec<_>>>()?;

    let indices = MultiIndex::all_up_to(spec.hopping_count, max_order);
    let records = indices
        .par_iter()
        .map(|idx| -> Result<CoefficientRecord> {
            let n = idx.total();
            let value = exact.coefficient(idx);
            let exact_count = exact.walk_count(idx, &factorials);
            let oracle = tallies.get(n as usize).map(|t| t.count(idx));
            let oracle_match = oracle.as_ref().map(|o| exact_count.as_ref() == Some(o));

            let points = grid.resolve(spec, idx)?;
            let m = moment(spec, idx, points)?;
            let divisor: f64 = idx.exponents().iter().map(|&k| factorial_f64(k)).product();
            let numeric = m.value / divisor;
            let exact_f = rational_to_f64(&value);
            let abs_error = (numeric - exact_f).abs();
            let rel_error = if value.is_zero() { abs_error } else { abs_error / exact_f.abs() };
            let numeric_ok = if value.is_zero() { abs_error <= tolerances.zero } else { rel_error <= tolerances.relative };
            let nonneg = !value.is_negative();
            Ok(CoefficientRecord {
                index: idx.exponents().to_vec(),
                exact: format_rational(&value),
                exact_count: exact_count.as_ref().map(|c| c.to_string()),
                oracle: oracle.map(|o| o.to_string()),
                oracle_match,
                numeric,
                grid: m.grid,
                abs_error,
                rel_error,
                pass: nonneg && exact_count.is_some() && oracle_match.unwrap_or(true) && numeric_ok,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let summary = summarize(records.iter().map(|r| r.pass));
    Ok(VerificationReport {
        lattice: spec.name.to_string(),
        pbc_size: spec.pbc_size,
        max_order,
        tolerances,
        records,
        summary,
    })
}

fn factorial_f64(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceViolation {
    pub n1: u32,
    pub n2: u32,
    pub residual: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub max_total_order: u32,
    pub checked: usize,
    pub violations: Vec<RecurrenceViolation>,
}

impl RecurrenceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `(n1+2)(n1+1) L_{n1+2,n2} - (n2+1) L_{n1,n2+1} - 2 L_{n1,n2}`.
pub fn recurrence_residual(series: &Series, n1: u32, n2: u32) -> BigRational {
    let l = |a: u32, b: u32| series.coefficient(&MultiIndex::new(vec![a, b]));
    let int = |v: u32| BigRational::from_integer(BigInt::from(v));
    int((n1 + 2) * (n1 + 1)) * l(n1 + 2, n2) - int(n2 + 1) * l(n1, n2 + 1) - int(2) * l(n1, n2)
}

/// Checks the recurrence implied by `cos 2k = 2 cos² k - 1` for every `(n1, n2)` with
/// `n1 + n2 <= max_total_order`, in exact arithmetic.
pub fn verify_recurrence(max_total_order: u32) -> RecurrenceReport {
    let s = series::chain_nnn(max_total_order + 2);
    let mut checked = 0;
    let mut violations = Vec::new();
    for idx in MultiIndex::all_up_to(2, max_total_order) {
        let (n1, n2) = (idx.exponents()[0], idx.exponents()[1]);
        checked += 1;
        let r = recurrence_residual(&s, n1, n2);
        if !r.is_zero() {
            violations.push(RecurrenceViolation { n1, n2, residual: format_rational(&r) });
        }
    }
    RecurrenceReport { max_total_order, checked, violations }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareTestRecord {
    pub n: u32,
    /// `B_n` as `num/den`.
    pub value: String,
    pub is_square: bool,
    pub root: Option<String>,
}

/// Square test of a nonnegative rational in lowest terms.
pub fn rational_sqrt(value: &BigRational) -> Option<BigRational> {
    if value.is_negative() {
        return None;
    }
    let num: BigUint = value.numer().to_biguint()?;
    let den: BigUint = value.denom().to_biguint()?;
    let rn = exact_sqrt(&num)?;
    let rd = exact_sqrt(&den)?;
    Some(BigRational::new(BigInt::from(rn), BigInt::from(rd)))
}

/// Tests whether each bcc coefficient `B_n`, even `n` in `2..=n_max`, is the
/// square of a rational.
pub fn check_square_conjecture(n_max: u32) -> Vec<SquareTestRecord> {
    let b = series::bcc(n_max);
    (2..=n_max)
        .step_by(2)
        .map(|n| {
            let value = b.order(n);
            let root = rational_sqrt(&value);
            SquareTestRecord {
                n,
                value: format_rational(&value),
                is_square: root.is_some(),
                root: root.as_ref().map(format_rational),
            }
        })
        .collect()
}
