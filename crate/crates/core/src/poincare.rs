//! Equivariant Poincaré series of momentum level sets.
//!
//! The norm-square `‖Φ − ξ‖²` is equivariantly perfect, so
//!
//! ```text
//! 1/(1−t²)^r = P(Φ⁻¹(ξ)) + Σ_{α ≠ ξ} t^{λ_α} P(C_α)
//! ```
//!
//! where `C_α` is itself the level `Φ⁻¹(α)` of the action restricted to the
//! weights orthogonal to `α − ξ`. Solving for `P(Φ⁻¹(ξ))` gives a recursion on
//! strictly smaller weight sets. Perfection is the standard strengthening of
//! the equivariant Morse inequalities for norm-squares of momentum maps; the
//! results are checked against known quotients (S², ℂP²) in the tests.
//!
//! At a regular value the torus acts locally freely on the level and, with
//! rational coefficients, `P(Φ⁻¹(ξ))` is the Poincaré polynomial of the
//! symplectic quotient.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::critical::{critical_feet, MAX_DISTINCT_WEIGHTS};
use crate::error::{Error, Result};
use crate::exactlin::{cone_member, rational_rank, RatVec};
use crate::weights::ActionSpec;

/// `numerator(t) / (1 − t²)^denom_power`, kept maximally cancelled.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PoincareSeries {
    numerator: Vec<BigInt>,
    denom_power: u32,
}

fn trim(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn poly_add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    trim(&mut out);
    out
}

/// Multiplies by `(1 − t²)`.
fn mul_one_minus_t2(p: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); p.len() + 2];
    for (i, x) in p.iter().enumerate() {
        out[i] += x;
        out[i + 2] -= x;
    }
    trim(&mut out);
    out
}

/// Exact quotient by `(1 − t²)`, if it divides.
fn div_one_minus_t2(p: &[BigInt]) -> Option<Vec<BigInt>> {
    if p.is_empty() {
        return Some(Vec::new());
    }
    if p.len() < 3 {
        return None;
    }
    // p = (1 − t²) s  ⇒  s_i = p_i + s_{i−2}
    let deg = p.len() - 1;
    let mut s = vec![BigInt::zero(); deg - 1];
    for i in 0..deg - 1 {
        s[i] = if i >= 2 {
            &p[i] + &s[i - 2]
        } else {
            p[i].clone()
        };
    }
    (mul_one_minus_t2(&s) == p).then_some(s)
}

impl PoincareSeries {
    pub fn new(mut numerator: Vec<BigInt>, denom_power: u32) -> Self {
        trim(&mut numerator);
        let mut s = PoincareSeries {
            numerator,
            denom_power,
        };
        s.normalize();
        s
    }

    pub fn from_coefficients(coeffs: &[i64], denom_power: u32) -> Self {
        Self::new(
            coeffs.iter().map(|&c| BigInt::from(c)).collect(),
            denom_power,
        )
    }

    pub fn zero() -> Self {
        PoincareSeries {
            numerator: Vec::new(),
            denom_power: 0,
        }
    }

    /// `1/(1 − t²)^k`, the series of `BT^k`.
    pub fn classifying(k: u32) -> Self {
        PoincareSeries {
            numerator: vec![BigInt::one()],
            denom_power: k,
        }
    }

    pub fn numerator(&self) -> &[BigInt] {
        &self.numerator
    }

    pub fn denom_power(&self) -> u32 {
        self.denom_power
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_empty()
    }

    pub fn is_polynomial(&self) -> bool {
        self.denom_power == 0
    }

    /// Divides out every common factor `(1 − t²)`.
    pub fn normalize(&mut self) {
        if self.numerator.is_empty() {
            self.denom_power = 0;
            return;
        }
        while self.denom_power > 0 {
            match div_one_minus_t2(&self.numerator) {
                Some(q) => {
                    self.numerator = q;
                    self.denom_power -= 1;
                }
                None => break,
            }
        }
    }

    fn raised_to(&self, k: u32) -> Vec<BigInt> {
        let mut p = self.numerator.clone();
        for _ in self.denom_power..k {
            p = mul_one_minus_t2(&p);
        }
        p
    }

    pub fn add(&self, other: &PoincareSeries) -> PoincareSeries {
        let k = self.denom_power.max(other.denom_power);
        PoincareSeries::new(poly_add(&self.raised_to(k), &other.raised_to(k)), k)
    }

    pub fn neg(&self) -> PoincareSeries {
        PoincareSeries {
            numerator: self.numerator.iter().map(|c| -c).collect(),
            denom_power: self.denom_power,
        }
    }

    pub fn sub(&self, other: &PoincareSeries) -> PoincareSeries {
        self.add(&other.neg())
    }

    /// Multiplies by `t^degree`.
    pub fn shift(&self, degree: usize) -> PoincareSeries {
        if self.is_zero() {
            return self.clone();
        }
        let mut numerator = vec![BigInt::zero(); degree];
        numerator.extend(self.numerator.iter().cloned());
        PoincareSeries {
            numerator,
            denom_power: self.denom_power,
        }
    }

    /// Degree of the numerator; `None` for the zero series.
    pub fn degree(&self) -> Option<usize> {
        self.numerator.len().checked_sub(1)
    }

    /// Value at `t = −1` for a polynomial series.
    pub fn euler_characteristic(&self) -> Option<BigInt> {
        self.is_polynomial().then(|| {
            self.numerator
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 0 { c.clone() } else { -c })
                .sum()
        })
    }

    pub fn is_palindromic(&self) -> bool {
        self.numerator.iter().eq(self.numerator.iter().rev())
    }

    pub fn has_nonnegative_coefficients(&self) -> bool {
        self.numerator.iter().all(|c| !c.is_negative())
    }
}

fn write_polynomial(f: &mut fmt::Formatter<'_>, p: &[BigInt]) -> fmt::Result {
    let mut first = true;
    for (d, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if first {
            if c.is_negative() {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if c.is_negative() { " - " } else { " + " })?;
        }
        first = false;
        match d {
            0 => write!(f, "{mag}")?,
            _ => {
                if !mag.is_one() {
                    write!(f, "{mag}")?;
                }
                if d == 1 {
                    f.write_str("t")?;
                } else {
                    write!(f, "t^{d}")?;
                }
            }
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

/// Canonical text: terms in increasing degree, e.g. `1 + t^2` or
/// `(1 + t^2)/(1 - t^2)^1`.
impl fmt::Display for PoincareSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom_power == 0 {
            return write_polynomial(f, &self.numerator);
        }
        let terms = self.numerator.iter().filter(|c| !c.is_zero()).count();
        if terms > 1 {
            f.write_str("(")?;
            write_polynomial(f, &self.numerator)?;
            f.write_str(")")?;
        } else {
            write_polynomial(f, &self.numerator)?;
        }
        write!(f, "/(1 - t^2)^{}", self.denom_power)
    }
}

pub fn series_add(a: &PoincareSeries, b: &PoincareSeries) -> PoincareSeries {
    a.add(b)
}

pub fn series_sub(a: &PoincareSeries, b: &PoincareSeries) -> PoincareSeries {
    a.sub(b)
}

pub fn series_shift(s: &PoincareSeries, degree: usize) -> PoincareSeries {
    s.shift(degree)
}

pub fn series_normalize(s: &PoincareSeries) -> PoincareSeries {
    let mut s = s.clone();
    s.normalize();
    s
}

type MemoKey = (u32, RatVec);

struct Recursion<'a> {
    spec: &'a ActionSpec,
    memo: Option<HashMap<MemoKey, PoincareSeries>>,
}

fn mask_members(mask: u32, m: usize) -> Vec<usize> {
    (0..m).filter(|&i| mask & (1 << i) != 0).collect()
}

impl Recursion<'_> {
    fn full_mask(&self) -> u32 {
        let m = self.spec.weights().len();
        if m == 32 {
            u32::MAX
        } else {
            (1u32 << m) - 1
        }
    }

    /// Series of the level `Φ⁻¹(target)` of the action restricted to the
    /// weights in `mask`.
    fn level(&mut self, mask: u32, target: &RatVec, depth: usize) -> Result<PoincareSeries> {
        let m = self.spec.weights().len();
        if depth > m + 1 {
            return Err(Error::RecursionGuard(depth));
        }
        let key = (mask, target.clone());
        if let Some(hit) = self.memo.as_ref().and_then(|memo| memo.get(&key)) {
            return Ok(hit.clone());
        }

        let members = mask_members(mask, m);
        let sub = self.spec.restrict(&members);
        let series = if !level_nonempty(&sub, target)? {
            PoincareSeries::zero()
        } else {
            let mut acc = PoincareSeries::classifying(sub.rank() as u32);
            for (alpha, _) in critical_feet(&sub, target)? {
                if alpha == *target {
                    continue;
                }
                let (zero_mask, index) = self.zero_mask_and_index(&members, &alpha, target);
                let inner = self.level(zero_mask, &alpha, depth + 1)?;
                acc = acc.sub(&inner.shift(index));
            }
            acc
        };

        if let Some(memo) = self.memo.as_mut() {
            memo.entry(key).or_insert_with(|| series.clone());
        }
        Ok(series)
    }

    fn zero_mask_and_index(
        &self,
        members: &[usize],
        alpha: &RatVec,
        target: &RatVec,
    ) -> (u32, usize) {
        let b = alpha - target;
        let mut mask = 0u32;
        let mut index = 0;
        for &i in members {
            let s = self.spec.weight(i).dot(&b);
            if s.is_zero() {
                mask |= 1 << i;
            } else if s.is_negative() {
                index += 2 * self.spec.weights()[i].multiplicity;
            }
        }
        (mask, index)
    }
}

/// `Φ⁻¹(ξ) ≠ ∅` iff `ξ − β` lies in the cone of the weights.
pub fn level_nonempty(spec: &ActionSpec, target: &RatVec) -> Result<bool> {
    spec.check_target(target)?;
    cone_member(&(target - spec.shift()), &spec.weight_vectors())
}

fn run(spec: &ActionSpec, target: &RatVec, memoize: bool) -> Result<PoincareSeries> {
    spec.check_target(target)?;
    if spec.weights().len() > MAX_DISTINCT_WEIGHTS {
        return Err(Error::TooManyWeights {
            count: spec.weights().len(),
            limit: MAX_DISTINCT_WEIGHTS,
        });
    }
    let mut rec = Recursion {
        spec,
        memo: memoize.then(HashMap::new),
    };
    let full = rec.full_mask();
    rec.level(full, target, 0)
}

/// Equivariant Poincaré series of `Φ⁻¹(ξ)` with rational coefficients.
pub fn equivariant_series(spec: &ActionSpec, target: &RatVec) -> Result<PoincareSeries> {
    run(spec, target, true)
}

/// Same recursion without the memo table.
pub fn equivariant_series_unmemoized(spec: &ActionSpec, target: &RatVec) -> Result<PoincareSeries> {
    run(spec, target, false)
}

/// One term `t^{λ_α} P(C_α)` of the stratification identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumTerm {
    pub value: RatVec,
    pub index: usize,
    pub series: PoincareSeries,
}

/// Every term of `1/(1−t²)^r = Σ_α t^{λ_α} P(C_α)`, the minimum included.
pub fn stratification_terms(spec: &ActionSpec, target: &RatVec) -> Result<Vec<StratumTerm>> {
    spec.check_target(target)?;
    let mut rec = Recursion {
        spec,
        memo: Some(HashMap::new()),
    };
    let members: Vec<usize> = (0..spec.weights().len()).collect();
    let mut out = Vec::new();
    for (alpha, _) in critical_feet(spec, target)? {
        let (mask, index) = rec.zero_mask_and_index(&members, &alpha, target);
        let series = rec.level(mask, &alpha, 1)?;
        out.push(StratumTerm {
            value: alpha,
            index,
            series,
        });
    }
    Ok(out)
}

/// True iff no weight subset of rank below r has `ξ − β` in its cone, i.e.
/// every point of the level has finite stabilizer.
pub fn is_regular_value(spec: &ActionSpec, target: &RatVec) -> Result<bool> {
    spec.check_target(target)?;
    let m = spec.weights().len();
    if m > MAX_DISTINCT_WEIGHTS {
        return Err(Error::TooManyWeights {
            count: m,
            limit: MAX_DISTINCT_WEIGHTS,
        });
    }
    let offset = target - spec.shift();
    let r = spec.rank();
    let singular = (0..1u32 << m).into_par_iter().any(|mask| {
        let gens: Vec<RatVec> = mask_members(mask, m)
            .into_iter()
            .map(|i| spec.weight(i).clone())
            .collect();
        rational_rank(&gens) < r && cone_member(&offset, &gens).expect("lengths checked")
    });
    Ok(!singular)
}

/// Betti numbers of the symplectic quotient at a regular value, indexed by
/// degree.
pub fn betti_numbers(spec: &ActionSpec, target: &RatVec) -> Result<Vec<u64>> {
    if !level_nonempty(spec, target)? {
        return Err(Error::EmptyLevel);
    }
    if !is_regular_value(spec, target)? {
        return Err(Error::NotRegular);
    }
    let series = equivariant_series(spec, target)?;
    if !series.is_polynomial() {
        return Err(Error::ResidualDenominator(series.denom_power()));
    }
    series
        .numerator()
        .iter()
        .map(|c| {
            c.to_u64()
                .ok_or_else(|| Error::InvalidParameter(format!("negative Betti coefficient {c}")))
        })
        .collect()
}
