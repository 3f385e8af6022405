//! Brute-force closed-walk tallies, independent of the closed-form sums in
//! [`crate::series`].
//!
//! Walks are counted by dynamic programming over exact integer displacements:
//! the state after `j` steps is `(sublattice, displacement, label usage)` and each
//! layer extends every state by every admissible step. Sequences are never stored.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::series::{MultiIndex, WalkCount};

/// Largest walk length the oracle accepts, per spatial dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBounds {
    pub one_dim: u32,
    pub two_dim: u32,
    pub three_dim: u32,
}

impl Default for OracleBounds {
    fn default() -> Self {
        OracleBounds { one_dim: 12, two_dim: 10, three_dim: 8 }
    }
}

impl OracleBounds {
    pub fn for_dimension(&self, dimension: usize) -> u32 {
        match dimension {
            1 => self.one_dim,
            2 => self.two_dim,
            _ => self.three_dim,
        }
    }
}

/// Closed-walk counts of one length, split by label usage.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkTally {
    pub lattice: String,
    pub length: u32,
    pub counts: BTreeMap<MultiIndex, WalkCount>,
    /// Two-sublattice lattices: walks were enumerated from an A site and the counts
    /// doubled to account for B-site starts.
    pub sublattice_doubled: bool,
}

impl WalkTally {
    pub fn count(&self, index: &MultiIndex) -> WalkCount {
        self.counts.get(index).cloned().unwrap_or_default()
    }

    /// Total over all label usages, `Γ̃(n)`.
    pub fn total(&self) -> BigUint {
        self.counts.values().map(|c| &c.0).sum()
    }

    pub fn to_document(&self) -> TallyDocument {
        TallyDocument {
            lattice: self.lattice.clone(),
            length: self.length,
            sublattice_doubled: self.sublattice_doubled,
            total: self.total().to_string(),
            counts: self
                .counts
                .iter()
                .map(|(idx, c)| TallyEntry { index: idx.exponents().to_vec(), count: c.0.to_string() })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TallyDocument {
    pub lattice: String,
    pub length: u32,
    pub sublattice_doubled: bool,
    pub total: String,
    pub counts: Vec<TallyEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TallyEntry {
    pub index: Vec<u32>,
    pub count: String,
}

pub fn enumerate(spec: &LatticeSpec, n: u32) -> Result<WalkTally> {
    enumerate_bounded(spec, n, &OracleBounds::default())
}

type State = (bool, Vec<i64>, Vec<u32>);

pub fn enumerate_bounded(spec: &LatticeSpec, n: u32, bounds: &OracleBounds) -> Result<WalkTally> {
    let bound = bounds.for_dimension(spec.dimension);
    if n > bound {
        return Err(Error::OracleBound { n, bound, dimension: spec.dimension });
    }

    // Scale fractional coordinates by a common denominator so displacements are integers.
    let scale = spec
        .steps
        .iter()
        .flat_map(|s| s.displacement.iter().map(|x| *x.denom()))
        .fold(1i64, |acc, d| acc.lcm(&d));
    let modulus = spec.pbc_size.map(|ring| ring as i64 * scale);
    let scaled = |s: &crate::lattice::StepVector| -> Vec<i64> {
        s.displacement.iter().map(|x| (x * scale).to_integer()).collect()
    };
    let from_a: Vec<(Vec<i64>, usize)> = spec.steps_from(false).map(|s| (scaled(s), s.label - 1)).collect();
    let from_b: Vec<(Vec<i64>, usize)> = spec.steps_from(true).map(|s| (scaled(s), s.label - 1)).collect();
    let bipartite = spec.is_bipartite();

    let mut layer: HashMap<State, BigUint> = HashMap::new();
    layer.insert((false, vec![0; spec.dimension], vec![0; spec.hopping_count]), BigUint::from(1u32));
    for _ in 0..n {
        let mut next: HashMap<State, BigUint> = HashMap::with_capacity(layer.len() * 2);
        for ((on_b, pos, usage), count) in &layer {
            let moves = if *on_b { &from_b } else { &from_a };
            for (step, label) in moves {
                let mut p: Vec<i64> = pos.iter().zip(step).map(|(a, b)| a + b).collect();
                if let Some(m) = modulus {
                    p.iter_mut().for_each(|x| *x = x.rem_euclid(m));
                }
                let mut u = usage.clone();
                u[*label] += 1;
                let key = (bipartite && !*on_b, p, u);
                *next.entry(key).or_insert_with(BigUint::zero) += count;
            }
        }
        layer = next;
    }

    let mut counts = BTreeMap::new();
    for ((on_b, pos, usage), count) in layer {
        if !on_b && pos.iter().all(|&x| x == 0) {
            let count = if bipartite { count * 2u32 } else { count };
            counts.insert(MultiIndex::new(usage), WalkCount(count));
        }
    }
    Ok(WalkTally { lattice: spec.name.to_string(), length: n, counts, sublattice_doubled: bipartite })
}

/// Per-site closed-walk count on the ring of `ring` sites: `trace(A^n) / ring` for the
/// cycle-graph adjacency matrix `A`, in exact integers.
pub fn finite_chain_trace(ring: usize, n: u32) -> Result<WalkCount> {
    if ring < 3 {
        return Err(Error::RingTooSmall(ring));
    }
    let identity: Vec<Vec<BigUint>> = (0..ring)
        .map(|i| (0..ring).map(|j| BigUint::from(u32::from(i == j))).collect())
        .collect();
    // Right-multiplying by A: (M A)[i][j] = M[i][j-1] + M[i][j+1].
    let mut power = identity;
    for _ in 0..n {
        power = power
            .iter()
            .map(|row| (0..ring).map(|j| &row[(j + ring - 1) % ring] + &row[(j + 1) % ring]).collect())
            .collect();
    }
    let trace: BigUint = (0..ring).map(|i| &power[i][i]).sum();
    let (per_site, rem) = trace.div_rem(&BigUint::from(ring));
    debug_assert!(rem.is_zero(), "cycle graph is vertex-transitive");
    Ok(WalkCount(per_site))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{builtin, LatticeKind};

    fn total(kind: LatticeKind, n: u32) -> u64 {
        let spec = builtin(kind, Some(5)).unwrap();
        enumerate(&spec, n).unwrap().total().try_into().unwrap()
    }

    #[test]
    fn small_tallies() {
        let chain = builtin(LatticeKind::ChainNn, None).unwrap();
        let t = enumerate(&chain, 2).unwrap();
        assert_eq!(t.counts.len(), 1);
        assert_eq!(t.count(&MultiIndex::single(2)), WalkCount::from(2));
        assert_eq!(total(LatticeKind::Triangular, 3), 12);
        assert_eq!(total(LatticeKind::Honeycomb, 2), 6);
        assert_eq!(total(LatticeKind::Diamond, 2), 8);
        assert_eq!(total(LatticeKind::Bcc, 2), 8);
        assert_eq!(total(LatticeKind::Triangular, 6), 2040);
    }

    #[test]
    fn zero_length_walk() {
        assert_eq!(total(LatticeKind::ChainNn, 0), 1);
        assert_eq!(total(LatticeKind::Honeycomb, 0), 2);
    }

    #[test]
    fn nnn_usage_split() {
        let spec = builtin(LatticeKind::ChainNnn, None).unwrap();
        let t = enumerate(&spec, 3).unwrap();
        assert_eq!(t.count(&MultiIndex::new(vec![2, 1])), WalkCount::from(6));
        assert_eq!(t.count(&MultiIndex::new(vec![0, 3])), WalkCount::from(0));
        let t = enumerate(&spec, 2).unwrap();
        assert_eq!(t.count(&MultiIndex::new(vec![0, 2])), WalkCount::from(2));
    }

    #[test]
    fn bound_guard() {
        let bcc = builtin(LatticeKind::Bcc, None).unwrap();
        assert!(matches!(enumerate(&bcc, 9), Err(Error::OracleBound { n: 9, bound: 8, .. })));
        let loose = OracleBounds { three_dim: 9, ..Default::default() };
        assert!(enumerate_bounded(&bcc, 9, &loose).is_ok());
    }

    #[test]
    fn trace_examples() {
        assert_eq!(finite_chain_trace(4, 2).unwrap(), WalkCount::from(2));
        assert_eq!(finite_chain_trace(3, 3).unwrap(), WalkCount::from(2));
        assert_eq!(finite_chain_trace(6, 6).unwrap(), WalkCount::from(22));
        assert!(finite_chain_trace(2, 4).is_err());
    }

    #[test]
    fn ring_matches_brute_force_sequences() {
        // every ±1 sequence of length n, reduced mod ring
        for ring in 3..=7usize {
            let spec = builtin(LatticeKind::ChainNnFinite, Some(ring)).unwrap();
            for n in 0..=10u32 {
                let brute = (0u32..1 << n)
                    .filter(|bits| {
                        let d: i64 = (0..n).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).sum();
                        d.rem_euclid(ring as i64) == 0
                    })
                    .count() as u64;
                assert_eq!(enumerate(&spec, n).unwrap().total(), BigUint::from(brute), "ring {ring} n {n}");
                assert_eq!(finite_chain_trace(ring, n).unwrap(), WalkCount::from(brute));
            }
        }
    }
}
