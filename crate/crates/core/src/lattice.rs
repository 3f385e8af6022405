//! Lattice configurations: hopping step sets, hopping labels, sublattice structure
//! and the reciprocal primitive cell.
//!
//! Step displacements are stored in *fractional* coordinates with respect to the
//! direct primitive basis, as exact rationals. With the reciprocal basis
//! `b_j` satisfying `a_i . b_j = 2 pi delta_ij`, a wave vector `k = sum_j u_j b_j`
//! gives `k . v = 2 pi (u . f)` for a step with fractional coordinates `f`, so every
//! dispersion term is a trigonometric polynomial in `u` with integer frequencies.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational coordinate.
pub type Coord = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeKind {
    ChainNn,
    ChainNnFinite,
    ChainNnn,
    Triangular,
    Bcc,
    Honeycomb,
    Diamond,
}

impl LatticeKind {
    pub const ALL: [LatticeKind; 7] = [
        LatticeKind::ChainNn,
        LatticeKind::ChainNnFinite,
        LatticeKind::ChainNnn,
        LatticeKind::Triangular,
        LatticeKind::Bcc,
        LatticeKind::Honeycomb,
        LatticeKind::Diamond,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::ChainNn => "chain-nn",
            LatticeKind::ChainNnFinite => "chain-nn-finite",
            LatticeKind::ChainNnn => "chain-nnn",
            LatticeKind::Triangular => "triangular",
            LatticeKind::Bcc => "bcc",
            LatticeKind::Honeycomb => "honeycomb",
            LatticeKind::Diamond => "diamond",
        }
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LatticeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LatticeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownLattice(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SublatticeFlag {
    None,
    AToB,
    BToA,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepVector {
    /// Fractional coordinates with respect to the direct primitive basis.
    #[serde(with = "coord_strings")]
    pub displacement: Vec<Coord>,
    /// Hopping label `s` in `1..=C`; all steps sharing a label share `xi_s`.
    pub label: usize,
    /// Lattice direction `±e_i`, numbered from 1. Each direction owns exactly two
    /// steps, `v` and `-v`.
    pub direction: usize,
    pub sublattice: SublatticeFlag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub name: LatticeKind,
    pub dimension: usize,
    pub basis_size: usize,
    pub steps: Vec<StepVector>,
    pub hopping_count: usize,
    /// Direct primitive vectors in Cartesian coordinates (lattice constant 1).
    pub direct_basis: Vec<Vec<f64>>,
    /// Reciprocal primitive vectors, `a_i . b_j = 2 pi delta_ij`.
    pub reciprocal_basis: Vec<Vec<f64>>,
    pub cell_volume: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pbc_size: Option<usize>,
}

/// One harmonic `amplitude * cos(2 pi f . u)` of a dispersion term.
#[derive(Debug, Clone, PartialEq)]
pub struct Harmonic {
    pub frequency: Vec<i64>,
    pub amplitude: f64,
}

/// Dimensionless dispersion term `eps_s(k)` (hopping set to 1) as a cosine series in
/// fractional reciprocal coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionTerm {
    pub label: usize,
    pub harmonics: Vec<Harmonic>,
    /// Largest `|f_j|` over all harmonics and axes.
    pub bandwidth: u32,
}

impl DispersionTerm {
    /// Value at fractional reciprocal coordinates `u`.
    pub fn eval_fractional(&self, u: &[f64]) -> f64 {
        self.harmonics
            .iter()
            .map(|h| {
                let phase: f64 = h.frequency.iter().zip(u).map(|(&f, &x)| f as f64 * x).sum();
                h.amplitude * (2.0 * PI * phase).cos()
            })
            .sum()
    }
}

fn c(n: i64, d: i64) -> Coord {
    Ratio::new(n, d)
}

fn ci(n: i64) -> Coord {
    Ratio::from_integer(n)
}

fn pair(displacement: Vec<Coord>, label: usize, direction: usize) -> [StepVector; 2] {
    let neg = displacement.iter().map(|x| -x).collect();
    [
        StepVector { displacement, label, direction, sublattice: SublatticeFlag::None },
        StepVector { displacement: neg, label, direction, sublattice: SublatticeFlag::None },
    ]
}

fn bipartite(displacement: Vec<Coord>, direction: usize) -> [StepVector; 2] {
    let neg = displacement.iter().map(|x| -x).collect();
    [
        StepVector { displacement, label: 1, direction, sublattice: SublatticeFlag::AToB },
        StepVector { displacement: neg, label: 1, direction, sublattice: SublatticeFlag::BToA },
    ]
}

/// Built-in lattice configuration. `pbc_size` is required for `chain-nn-finite`
/// and ignored otherwise.
pub fn builtin(kind: LatticeKind, pbc_size: Option<usize>) -> Result<LatticeSpec> {
    let s3 = 3f64.sqrt();
    let (dimension, basis_size, hopping_count, direct, steps): (usize, usize, usize, Vec<Vec<f64>>, Vec<StepVector>) =
        match kind {
            LatticeKind::ChainNn | LatticeKind::ChainNnFinite => {
                (1, 1, 1, vec![vec![1.0]], pair(vec![ci(1)], 1, 1).to_vec())
            }
            LatticeKind::ChainNnn => {
                let mut steps = pair(vec![ci(1)], 1, 1).to_vec();
                steps.extend(pair(vec![ci(2)], 2, 2));
                (1, 1, 2, vec![vec![1.0]], steps)
            }
            LatticeKind::Triangular => {
                // a1 = e1 = (1, 0), a2 = e2 = (-1/2, sqrt3/2), e3 = -(e1 + e2).
                let mut steps = pair(vec![ci(1), ci(0)], 1, 1).to_vec();
                steps.extend(pair(vec![ci(0), ci(1)], 1, 2));
                steps.extend(pair(vec![ci(-1), ci(-1)], 1, 3));
                (2, 1, 1, vec![vec![1.0, 0.0], vec![-0.5, s3 / 2.0]], steps)
            }
            LatticeKind::Bcc => {
                // a_i = e_i for i = 1..3, e4 = -(e1 + e2 + e3).
                let mut steps = pair(vec![ci(1), ci(0), ci(0)], 1, 1).to_vec();
                steps.extend(pair(vec![ci(0), ci(1), ci(0)], 1, 2));
                steps.extend(pair(vec![ci(0), ci(0), ci(1)], 1, 3));
                steps.extend(pair(vec![ci(-1), ci(-1), ci(-1)], 1, 4));
                let direct = vec![
                    vec![0.5, 0.5, 0.5],
                    vec![-0.5, -0.5, 0.5],
                    vec![-0.5, 0.5, -0.5],
                ];
                (3, 1, 1, direct, steps)
            }
            LatticeKind::Honeycomb => {
                // Triangular Bravais lattice; A -> B neighbours
                // e1 = (0, -sqrt3/3), e2 = (1/2, sqrt3/6), e3 = (-1/2, sqrt3/6).
                let mut steps = bipartite(vec![c(-1, 3), c(-2, 3)], 1).to_vec();
                steps.extend(bipartite(vec![c(2, 3), c(1, 3)], 2));
                steps.extend(bipartite(vec![c(-1, 3), c(1, 3)], 3));
                (2, 2, 1, vec![vec![1.0, 0.0], vec![-0.5, s3 / 2.0]], steps)
            }
            LatticeKind::Diamond => {
                // fcc Bravais lattice (cube side 1); A -> B neighbours (±1,±1,±1)/4
                // with an even number of minus signs.
                let mut steps = bipartite(vec![c(1, 4), c(1, 4), c(1, 4)], 1).to_vec();
                steps.extend(bipartite(vec![c(1, 4), c(1, 4), c(-3, 4)], 2));
                steps.extend(bipartite(vec![c(1, 4), c(-3, 4), c(1, 4)], 3));
                steps.extend(bipartite(vec![c(-3, 4), c(1, 4), c(1, 4)], 4));
                let direct = vec![
                    vec![0.0, 0.5, 0.5],
                    vec![0.5, 0.0, 0.5],
                    vec![0.5, 0.5, 0.0],
                ];
                (3, 2, 1, direct, steps)
            }
        };

    let pbc_size = match kind {
        LatticeKind::ChainNnFinite => {
            let size = pbc_size.ok_or(Error::MissingRingSize)?;
            if size < 3 {
                return Err(Error::RingTooSmall(size));
            }
            Some(size)
        }
        _ => None,
    };

    let reciprocal_basis = reciprocal(&direct)?;
    let cell_volume = determinant(&reciprocal_basis).abs();
    let spec = LatticeSpec {
        name: kind,
        dimension,
        basis_size,
        steps,
        hopping_count,
        direct_basis: direct,
        reciprocal_basis,
        cell_volume,
        pbc_size,
    };
    spec.validate()?;
    Ok(spec)
}

/// `b_j` with `a_i . b_j = 2 pi delta_ij`, i.e. `B = 2 pi (A^-1)^T` for row bases.
fn reciprocal(direct: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = direct.len();
    let inv = invert(direct).ok_or_else(|| Error::InvalidLattice("singular direct basis".into()))?;
    Ok((0..d)
        .map(|j| (0..d).map(|i| 2.0 * PI * inv[i][j]).collect())
        .collect())
}

fn invert(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for row in 0..n {
            if row != col {
                let factor = a[row][col];
                for j in 0..n {
                    a[row][j] -= factor * a[col][j];
                    inv[row][j] -= factor * inv[col][j];
                }
            }
        }
    }
    Some(inv)
}

fn determinant(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => {
            // Laplace expansion along the first row; only used for D > 3.
            let n = m.len();
            (0..n)
                .map(|j| {
                    let minor: Vec<Vec<f64>> = m[1..]
                        .iter()
                        .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect())
                        .collect();
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    sign * m[0][j] * determinant(&minor)
                })
                .sum()
        }
    }
}

impl LatticeSpec {
    pub fn builtin(kind: LatticeKind, pbc_size: Option<usize>) -> Result<Self> {
        builtin(kind, pbc_size)
    }

    pub fn by_name(name: &str, pbc_size: Option<usize>) -> Result<Self> {
        builtin(name.parse()?, pbc_size)
    }

    pub fn is_bipartite(&self) -> bool {
        self.basis_size == 2
    }

    /// Cartesian displacement of a step.
    pub fn cartesian(&self, step: &StepVector) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension];
        for (f, a) in step.displacement.iter().zip(&self.direct_basis) {
            let f = *f.numer() as f64 / *f.denom() as f64;
            for (o, x) in out.iter_mut().zip(a) {
                *o += f * x;
            }
        }
        out
    }

    /// Fractional reciprocal coordinates `u_j = k . a_j / 2 pi` of a Cartesian wave vector.
    pub fn fractional_k(&self, k: &[f64]) -> Vec<f64> {
        self.direct_basis
            .iter()
            .map(|a| a.iter().zip(k).map(|(x, y)| x * y).sum::<f64>() / (2.0 * PI))
            .collect()
    }

    /// Steps that may be taken from the given sublattice.
    pub fn steps_from(&self, on_b: bool) -> impl Iterator<Item = &StepVector> {
        let bip = self.is_bipartite();
        self.steps.iter().filter(move |s| {
            !bip || (on_b && s.sublattice == SublatticeFlag::BToA) || (!on_b && s.sublattice == SublatticeFlag::AToB)
        })
    }

    pub fn check_label(&self, label: usize) -> Result<()> {
        if label == 0 || label > self.hopping_count {
            return Err(Error::UnknownLabel { label, count: self.hopping_count });
        }
        Ok(())
    }

    /// Dispersion term of one label. For two-sublattice lattices this is the
    /// squared-band kernel `|sum_{A->B steps} exp(i k.e)|^2`, whose square root is the
    /// upper subband.
    pub fn dispersion_term(&self, label: usize) -> Result<DispersionTerm> {
        self.check_label(label)?;
        let integer = |v: &[Coord]| -> Result<Vec<i64>> {
            v.iter()
                .map(|x| {
                    if x.is_integer() {
                        Ok(x.to_integer())
                    } else {
                        Err(Error::InvalidLattice(format!("harmonic with non-integer frequency in `{}`", self.name)))
                    }
                })
                .collect()
        };
        let mut raw: Vec<Vec<i64>> = Vec::new();
        if self.is_bipartite() {
            let forward: Vec<&StepVector> = self
                .steps
                .iter()
                .filter(|s| s.label == label && s.sublattice == SublatticeFlag::AToB)
                .collect();
            for a in &forward {
                for b in &forward {
                    let diff: Vec<Coord> = a.displacement.iter().zip(&b.displacement).map(|(x, y)| x - y).collect();
                    raw.push(integer(&diff)?);
                }
            }
        } else {
            for s in self.steps.iter().filter(|s| s.label == label) {
                raw.push(integer(&s.displacement)?);
            }
        }

        // cos is even: merge f and -f under the representative whose first nonzero
        // entry is positive.
        let mut harmonics: Vec<Harmonic> = Vec::new();
        for mut f in raw {
            if f.iter().find(|x| **x != 0).is_some_and(|x| *x < 0) {
                f.iter_mut().for_each(|x| *x = -*x);
            }
            match harmonics.iter_mut().find(|h| h.frequency == f) {
                Some(h) => h.amplitude += 1.0,
                None => harmonics.push(Harmonic { frequency: f, amplitude: 1.0 }),
            }
        }
        harmonics.sort_by(|a, b| a.frequency.cmp(&b.frequency));
        let bandwidth = harmonics
            .iter()
            .flat_map(|h| h.frequency.iter().map(|x| x.unsigned_abs() as u32))
            .max()
            .unwrap_or(0);
        Ok(DispersionTerm { label, harmonics, bandwidth })
    }

    pub fn dispersion_terms(&self) -> Result<Vec<DispersionTerm>> {
        (1..=self.hopping_count).map(|s| self.dispersion_term(s)).collect()
    }

    /// Checks the structural invariants; called by every constructor.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidLattice(msg));
        let d = self.dimension;
        if d == 0 {
            return bad("dimension must be at least 1".into());
        }
        if !(1..=2).contains(&self.basis_size) {
            return bad(format!("basis size {} not in 1..=2", self.basis_size));
        }
        if self.direct_basis.len() != d || self.direct_basis.iter().any(|a| a.len() != d) {
            return bad("direct basis must be D vectors of length D".into());
        }
        if self.reciprocal_basis.len() != d || self.reciprocal_basis.iter().any(|b| b.len() != d) {
            return bad("reciprocal basis must be D vectors of length D".into());
        }
        for (i, a) in self.direct_basis.iter().enumerate() {
            for (j, b) in self.reciprocal_basis.iter().enumerate() {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let want = if i == j { 2.0 * PI } else { 0.0 };
                if (dot - want).abs() > 1e-9 {
                    return bad(format!("a_{} . b_{} = {dot}, expected {want}", i + 1, j + 1));
                }
            }
        }
        let vol = determinant(&self.reciprocal_basis).abs();
        if !(self.cell_volume > 0.0) || (vol - self.cell_volume).abs() > 1e-9 * vol.max(1.0) {
            return bad(format!("cell volume {} does not match reciprocal basis ({vol})", self.cell_volume));
        }
        if self.hopping_count == 0 {
            return bad("at least one hopping label required".into());
        }
        if let Some(size) = self.pbc_size {
            if size < 3 {
                return Err(Error::RingTooSmall(size));
            }
            if d != 1 {
                return bad("periodic ring only supported in one dimension".into());
            }
        }
        if self.name == LatticeKind::ChainNnFinite && self.pbc_size.is_none() {
            return Err(Error::MissingRingSize);
        }
        for s in &self.steps {
            if s.displacement.len() != d {
                return bad(format!("step {:?} has wrong dimension", s.displacement));
            }
            if s.displacement.iter().all(|x| x.is_zero()) {
                return bad("zero step (on-site hopping) is not allowed".into());
            }
            if s.label == 0 || s.label > self.hopping_count {
                return bad(format!("step label {} outside 1..={}", s.label, self.hopping_count));
            }
            let want_flag = self.basis_size == 2;
            if want_flag == (s.sublattice == SublatticeFlag::None) {
                return bad(format!("step {:?} has sublattice flag {:?} for basis size {}", s.displacement, s.sublattice, self.basis_size));
            }
            let negated: Vec<Coord> = s.displacement.iter().map(|x| -x).collect();
            let flipped = match s.sublattice {
                SublatticeFlag::None => SublatticeFlag::None,
                SublatticeFlag::AToB => SublatticeFlag::BToA,
                SublatticeFlag::BToA => SublatticeFlag::AToB,
            };
            let partner = self
                .steps
                .iter()
                .filter(|t| t.displacement == negated && t.label == s.label && t.sublattice == flipped)
                .count();
            if partner != 1 {
                return bad(format!("step {:?} lacks a unique negated partner with the same label", s.displacement));
            }
            if !want_flag && s.displacement.iter().any(|x| !x.is_integer()) {
                return bad("single-atom lattices need integer fractional step coordinates".into());
            }
        }
        // Every direction owns exactly the pair {v, -v}.
        let mut directions: Vec<usize> = self.steps.iter().map(|s| s.direction).collect();
        directions.sort_unstable();
        for chunk in directions.chunks(2) {
            if chunk.len() != 2 || chunk[0] != chunk[1] {
                return bad("each direction must own exactly two steps".into());
            }
        }
        for (i, a) in self.steps.iter().enumerate() {
            for b in &self.steps[i + 1..] {
                if a.direction == b.direction && a.displacement.iter().zip(&b.displacement).any(|(x, y)| x != &-y) {
                    return bad(format!("direction {} pairs steps that are not negatives", a.direction));
                }
            }
        }
        for label in 1..=self.hopping_count {
            if !self.steps.iter().any(|s| s.label == label) {
                return bad(format!("label {label} has no steps"));
            }
        }
        if self.basis_size == 2 {
            // Walks alternate sublattices, so closed walks need B -> A steps to undo A -> B.
            // Harmonic frequencies of the band kernel must be integer for the quadrature.
            for label in 1..=self.hopping_count {
                self.dispersion_term(label)?;
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: LatticeSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }
}

/// `ε̂_s(k)` at a Cartesian wave vector. Two-sublattice lattices return the
/// squared-band kernel.
pub fn dispersion_value(spec: &LatticeSpec, label: usize, k: &[f64]) -> Result<f64> {
    if k.len() != spec.dimension {
        return Err(Error::InvalidLattice(format!("wave vector has {} components, lattice is {}-dimensional", k.len(), spec.dimension)));
    }
    let term = spec.dispersion_term(label)?;
    Ok(term.eval_fractional(&spec.fractional_k(k)))
}

mod coord_strings {
    use super::Coord;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Coord], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| {
            if x.is_integer() {
                x.numer().to_string()
            } else {
                format!("{}/{}", x.numer(), x.denom())
            }
        }))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Coord>, D::Error> {
        let raw: Vec<String> = Vec::deserialize(d)?;
        raw.iter()
            .map(|t| {
                let (n, den) = t.split_once('/').unwrap_or((t.as_str(), "1"));
                let n: i64 = n.trim().parse().map_err(D::Error::custom)?;
                let den: i64 = den.trim().parse().map_err(D::Error::custom)?;
                if den == 0 {
                    return Err(D::Error::custom("zero denominator"));
                }
                Ok(Coord::new(n, den))
            })
            .collect()
    }
}
