//! Linear torus actions on ℂⁿ: weights with multiplicities, a momentum shift,
//! and evaluation of the momentum map `Φ(z) = β + Σ |z_j|²/2 · μ_(j)`.
//!
//! Coordinates are expanded in a fixed order shared by every module: weights
//! in input order, the copies of one weight space consecutively.

use std::ops::Range;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactlin::simplex::{maximize, LpOutcome};
use crate::exactlin::{rat_to_f64, Rat, RatVec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightDatum {
    pub weight: RatVec,
    /// Complex dimension of the weight space.
    pub multiplicity: usize,
}

/// Unchecked input, as read from a document or built in code.
#[derive(Clone, Debug, PartialEq)]
pub struct RawSpec {
    pub rank: usize,
    pub weights: Vec<(Vec<Rat>, i64)>,
    pub shift: Vec<Rat>,
}

impl RawSpec {
    pub fn from_ints(rank: usize, weights: &[(&[i64], i64)], shift: &[i64]) -> Self {
        RawSpec {
            rank,
            weights: weights
                .iter()
                .map(|(w, d)| (RatVec::from_ints(w).into_entries(), *d))
                .collect(),
            shift: RatVec::from_ints(shift).into_entries(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecWarning {
    /// A weight vector was listed more than once; multiplicities were summed.
    MergedDuplicate { weight: RatVec, multiplicity: usize },
    /// No functional is positive on every weight: ‖Φ‖² is not certified proper.
    NotPolarized,
}

impl std::fmt::Display for SpecWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpecWarning::MergedDuplicate {
                weight,
                multiplicity,
            } => write!(
                f,
                "duplicate weight {weight} merged to multiplicity {multiplicity}"
            ),
            SpecWarning::NotPolarized => f.write_str("properness not certified"),
        }
    }
}

/// A validated linear torus action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSpec {
    rank: usize,
    weights: Vec<WeightDatum>,
    shift: RatVec,
    /// Weight index of every expanded coordinate.
    coord_weight: Vec<usize>,
    /// First expanded coordinate of every weight.
    offsets: Vec<usize>,
}

impl ActionSpec {
    fn assemble(rank: usize, weights: Vec<WeightDatum>, shift: RatVec) -> Self {
        let mut coord_weight = Vec::new();
        let mut offsets = Vec::with_capacity(weights.len());
        for (i, w) in weights.iter().enumerate() {
            offsets.push(coord_weight.len());
            coord_weight.extend(std::iter::repeat_n(i, w.multiplicity));
        }
        ActionSpec {
            rank,
            weights,
            shift,
            coord_weight,
            offsets,
        }
    }

    /// Convenience constructor from integer data; panics on invalid input.
    pub fn from_ints(rank: usize, weights: &[(&[i64], usize)], shift: &[i64]) -> Self {
        let raw = RawSpec::from_ints(
            rank,
            &weights
                .iter()
                .map(|(w, d)| (*w, *d as i64))
                .collect::<Vec<_>>(),
            shift,
        );
        validate_spec(&raw).expect("valid spec").0
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weights(&self) -> &[WeightDatum] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &RatVec {
        &self.weights[i].weight
    }

    pub fn weight_vectors(&self) -> Vec<RatVec> {
        self.weights.iter().map(|w| w.weight.clone()).collect()
    }

    pub fn shift(&self) -> &RatVec {
        &self.shift
    }

    /// Σ d_μ, the complex dimension of V.
    pub fn coordinate_count(&self) -> usize {
        self.coord_weight.len()
    }

    /// Weight index of expanded coordinate `j`.
    pub fn coordinate_weight(&self, j: usize) -> usize {
        self.coord_weight[j]
    }

    /// Expanded coordinates belonging to weight `i`.
    pub fn coordinates_of(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i] + self.weights[i].multiplicity
    }

    /// Expanded coordinates of a set of weight indices, in increasing order.
    pub fn coordinates_of_set(&self, weight_indices: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = weight_indices
            .iter()
            .flat_map(|&i| self.coordinates_of(i))
            .collect();
        out.sort_unstable();
        out
    }

    /// The action restricted to the sum of the given weight spaces, with the
    /// same rank and shift. Weight order follows `weight_indices`.
    pub fn restrict(&self, weight_indices: &[usize]) -> ActionSpec {
        let weights = weight_indices
            .iter()
            .map(|&i| self.weights[i].clone())
            .collect();
        ActionSpec::assemble(self.rank, weights, self.shift.clone())
    }

    /// Same weights, different shift.
    pub fn with_shift(&self, shift: RatVec) -> Result<ActionSpec> {
        if shift.len() != self.rank {
            return Err(Error::ShiftLength {
                expected: self.rank,
                found: shift.len(),
            });
        }
        Ok(ActionSpec::assemble(self.rank, self.weights.clone(), shift))
    }

    pub fn check_target(&self, target: &RatVec) -> Result<()> {
        if target.len() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                found: target.len(),
            });
        }
        Ok(())
    }

    pub fn to_raw(&self) -> RawSpec {
        RawSpec {
            rank: self.rank,
            weights: self
                .weights
                .iter()
                .map(|w| (w.weight.entries().to_vec(), w.multiplicity as i64))
                .collect(),
            shift: self.shift.entries().to_vec(),
        }
    }
}

/// Checks lengths and multiplicities and merges repeated weight vectors.
pub fn validate_spec(raw: &RawSpec) -> Result<(ActionSpec, Vec<SpecWarning>)> {
    if raw.rank == 0 {
        return Err(Error::EmptyRank);
    }
    if raw.shift.len() != raw.rank {
        return Err(Error::ShiftLength {
            expected: raw.rank,
            found: raw.shift.len(),
        });
    }
    let mut warnings = Vec::new();
    let mut weights: Vec<WeightDatum> = Vec::new();
    for (index, (w, d)) in raw.weights.iter().enumerate() {
        if w.len() != raw.rank {
            return Err(Error::WeightLength {
                index,
                expected: raw.rank,
                found: w.len(),
            });
        }
        if *d < 1 {
            return Err(Error::Multiplicity {
                index,
                multiplicity: *d,
            });
        }
        let weight = RatVec::new(w.clone());
        match weights.iter_mut().find(|x| x.weight == weight) {
            Some(existing) => existing.multiplicity += *d as usize,
            None => weights.push(WeightDatum {
                weight,
                multiplicity: *d as usize,
            }),
        }
    }
    for w in &weights {
        let listed = raw
            .weights
            .iter()
            .filter(|(v, _)| v == w.weight.entries())
            .count();
        if listed > 1 {
            warnings.push(SpecWarning::MergedDuplicate {
                weight: w.weight.clone(),
                multiplicity: w.multiplicity,
            });
        }
    }
    let spec = ActionSpec::assemble(raw.rank, weights, RatVec::new(raw.shift.clone()));
    if polarization_certificate(&spec).is_none() {
        warnings.push(SpecWarning::NotPolarized);
    }
    Ok((spec, warnings))
}

/// Radial data `q_j = |z_j|²/2`, one entry per expanded coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactSquares(Vec<Rat>);

impl ExactSquares {
    pub fn new(q: Vec<Rat>) -> Result<Self> {
        if let Some(j) = q.iter().position(Signed::is_negative) {
            return Err(Error::NegativeSquare(j));
        }
        Ok(ExactSquares(q))
    }

    pub fn zeros(n: usize) -> Self {
        ExactSquares(vec![Rat::zero(); n])
    }

    pub fn values(&self) -> &[Rat] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Coordinates with `q_j > 0`.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len())
            .filter(|&j| self.0[j].is_positive())
            .collect()
    }
}

/// A point of V in double precision, stored as interleaved real coordinates
/// `(x_0, y_0, x_1, y_1, …)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericPoint(Vec<f64>);

impl NumericPoint {
    pub fn from_real(v: Vec<f64>) -> Self {
        debug_assert!(v.len().is_multiple_of(2));
        debug_assert!(v.iter().all(|x| x.is_finite()));
        NumericPoint(v)
    }

    pub fn zeros(n: usize) -> Self {
        NumericPoint(vec![0.0; 2 * n])
    }

    /// The point with `|z_j| = sqrt(2 q_j)` and argument `phases[j]`.
    pub fn from_squares(q: &[f64], phases: &[f64]) -> Self {
        let mut v = Vec::with_capacity(2 * q.len());
        for (qj, th) in q.iter().zip(phases) {
            let r = (2.0 * qj.max(0.0)).sqrt();
            v.push(r * th.cos());
            v.push(r * th.sin());
        }
        NumericPoint(v)
    }

    pub fn coordinate_count(&self) -> usize {
        self.0.len() / 2
    }

    pub fn real(&self) -> &[f64] {
        &self.0
    }

    pub fn into_real(self) -> Vec<f64> {
        self.0
    }

    pub fn coordinate(&self, j: usize) -> (f64, f64) {
        (self.0[2 * j], self.0[2 * j + 1])
    }

    pub fn squares(&self) -> Vec<f64> {
        self.0
            .chunks_exact(2)
            .map(|c| 0.5 * (c[0] * c[0] + c[1] * c[1]))
            .collect()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

/// `β + Σ_j q_j μ_(j)`, exactly.
pub fn momentum_value(spec: &ActionSpec, q: &ExactSquares) -> Result<RatVec> {
    if q.len() != spec.coordinate_count() {
        return Err(Error::DimensionMismatch {
            expected: spec.coordinate_count(),
            found: q.len(),
        });
    }
    let mut acc = spec.shift.clone();
    for (j, qj) in q.values().iter().enumerate() {
        if !qj.is_zero() {
            acc = acc.add_scaled(qj, spec.weight(spec.coordinate_weight(j)));
        }
    }
    Ok(acc)
}

/// Floating-point momentum map from radial data.
pub fn momentum_from_squares(spec: &ActionSpec, q: &[f64]) -> Vec<f64> {
    let mut acc = spec.shift.to_f64();
    let weights: Vec<Vec<f64>> = spec.weights.iter().map(|w| w.weight.to_f64()).collect();
    for (j, qj) in q.iter().enumerate() {
        let mu = &weights[spec.coordinate_weight(j)];
        for (a, m) in acc.iter_mut().zip(mu) {
            *a += qj * m;
        }
    }
    acc
}

/// Floating-point momentum map at a point of V.
pub fn momentum_numeric(spec: &ActionSpec, z: &NumericPoint) -> Vec<f64> {
    momentum_from_squares(spec, &z.squares())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarizationCertificate {
    /// η with ⟨μ, η⟩ ≥ 1 for every weight μ.
    pub functional: RatVec,
    /// True when there are no weights to certify.
    pub vacuous: bool,
}

/// Finds η with ⟨μ, η⟩ ≥ 1 for every weight, minimizing ‖η‖₁, if one exists.
pub fn polarization_certificate(spec: &ActionSpec) -> Option<PolarizationCertificate> {
    let r = spec.rank;
    if spec.weights.is_empty() {
        return Some(PolarizationCertificate {
            functional: RatVec::zeros(r),
            vacuous: true,
        });
    }
    let m = spec.weights.len();
    // Columns: η⁺ (r), η⁻ (r), surplus (m).
    let cols = 2 * r + m;
    let mut a = Vec::with_capacity(m);
    for (i, w) in spec.weights.iter().enumerate() {
        let mut row = vec![Rat::zero(); cols];
        for (d, x) in w.weight.entries().iter().enumerate() {
            row[d] = x.clone();
            row[r + d] = -x.clone();
        }
        row[2 * r + i] = -Rat::one();
        a.push(row);
    }
    let b = vec![Rat::one(); m];
    let mut c = vec![Rat::zero(); cols];
    for v in c.iter_mut().take(2 * r) {
        *v = -Rat::one();
    }
    match maximize(&a, &b, &c) {
        LpOutcome::Optimal { x, .. } => {
            let eta = (0..r).map(|d| &x[d] - &x[r + d]).collect();
            Some(PolarizationCertificate {
                functional: RatVec::new(eta),
                vacuous: false,
            })
        }
        _ => None,
    }
}

/// Fraction of |Φ| lost to rounding is bounded by this in tests of the float path.
pub fn momentum_rel_error(spec: &ActionSpec, q: &ExactSquares, numeric: &[f64]) -> f64 {
    let exact = momentum_value(spec, q).expect("length checked by caller");
    let scale = exact
        .entries()
        .iter()
        .map(|x| rat_to_f64(x).abs())
        .fold(1.0f64, f64::max);
    exact
        .to_f64()
        .iter()
        .zip(numeric)
        .map(|(e, n)| (e - n).abs() / scale)
        .fold(0.0, f64::max)
}
