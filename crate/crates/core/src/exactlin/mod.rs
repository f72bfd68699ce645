//! Exact rational linear algebra: vectors over ℚ, consistent linear solves,
//! orthogonal feet on affine subspaces, rank, and cone membership by exact LP.
//!
//! Everything here is zero-error. Critical values are later grouped by exact
//! equality of [`RatVec`]s, so nothing in this module may round.

pub mod simplex;

use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use simplex::{maximize, LpOutcome};

/// Arbitrary-precision rational, always stored reduced with positive denominator.
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"` or `"p/q"` with `q > 0`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let num = BigInt::from_str(num).ok()?;
    let den = match den {
        Some(d) => BigInt::from_str(d).ok()?,
        None => BigInt::one(),
    };
    if !den.is_positive() {
        return None;
    }
    Some(Rat::new(num, den))
}

/// Rounds a finite float to the nearest rational with the given denominator.
pub fn rationalize(x: f64, denominator: i64) -> Rat {
    let scaled = (x * denominator as f64).round();
    let n = BigInt::from(scaled as i128);
    Rat::new(n, BigInt::from(denominator))
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fallback for huge numerators/denominators.
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// A vector in 𝔱* ≅ ℚʳ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatVec(Vec<Rat>);

impl RatVec {
    pub fn new(entries: Vec<Rat>) -> Self {
        RatVec(entries)
    }

    pub fn zeros(len: usize) -> Self {
        RatVec(vec![Rat::zero(); len])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        RatVec(v.iter().map(|&x| rat(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Rat] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Rat> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &RatVec) -> Rat {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> Rat {
        self.dot(self)
    }

    pub fn scale(&self, c: &Rat) -> RatVec {
        RatVec(self.0.iter().map(|a| a * c).collect())
    }

    /// `self + c * other`
    pub fn add_scaled(&self, c: &Rat, other: &RatVec) -> RatVec {
        RatVec(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + c * b)
                .collect(),
        )
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(rat_to_f64).collect()
    }

    fn check_len(&self, expected: usize) -> Result<()> {
        if self.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: self.len(),
            });
        }
        Ok(())
    }
}

impl Add for &RatVec {
    type Output = RatVec;
    fn add(self, rhs: &RatVec) -> RatVec {
        RatVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &RatVec {
    type Output = RatVec;
    fn sub(self, rhs: &RatVec) -> RatVec {
        RatVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

/// Formats as a parenthesized comma list of reduced rationals, e.g. `(-3,1/2)`.
impl fmt::Display for RatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

fn check_all(expected: usize, vs: &[RatVec]) -> Result<()> {
    vs.iter().try_for_each(|v| v.check_len(expected))
}

/// Solves `A x = b` exactly by Gauss–Jordan elimination. Free variables are
/// set to zero. Returns `None` when the system is inconsistent.
pub fn solve_consistent(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut rows: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.clone();
            row.push(bi.clone());
            row
        })
        .collect();

    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..n {
        let Some(p) = (next..m).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(next, p);
        let pv = rows[next][col].clone();
        for v in rows[next].iter_mut() {
            *v = &*v / &pv;
        }
        let prow = rows[next].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != next && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(col);
        next += 1;
        if next == m {
            break;
        }
    }
    if rows[next..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    let mut x = vec![Rat::zero(); n];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = rows[i][n].clone();
    }
    Some(x)
}

/// The unique point of `base + span(gens)` closest to `reference`.
///
/// Solved through the normal equations `GᵀG c = Gᵀ(reference − base)`, which
/// are always consistent; when the generators are dependent any solution `c`
/// yields the same foot.
pub fn nearest_affine_point(reference: &RatVec, base: &RatVec, gens: &[RatVec]) -> Result<RatVec> {
    let r = reference.len();
    base.check_len(r)?;
    check_all(r, gens)?;
    if gens.is_empty() {
        return Ok(base.clone());
    }
    let offset = reference - base;
    let gram: Vec<Vec<Rat>> = gens
        .iter()
        .map(|gi| gens.iter().map(|gj| gi.dot(gj)).collect())
        .collect();
    let rhs: Vec<Rat> = gens.iter().map(|g| g.dot(&offset)).collect();
    let coeffs = solve_consistent(&gram, &rhs).expect("normal equations are consistent");
    Ok(gens
        .iter()
        .zip(&coeffs)
        .fold(base.clone(), |acc, (g, c)| acc.add_scaled(c, g)))
}

/// Decides whether `target = Σ cᵢ gensᵢ` with every `cᵢ > 0`.
///
/// Maximizes the common lower bound δ on the coefficients (capped at 1 to keep
/// the LP bounded); membership holds iff the optimum is positive. On success
/// the returned coefficients reproduce `target` exactly.
pub fn strict_cone_member(target: &RatVec, gens: &[RatVec]) -> Result<(bool, Option<Vec<Rat>>)> {
    let r = target.len();
    check_all(r, gens)?;
    if gens.is_empty() {
        let member = target.is_zero();
        return Ok((member, member.then(Vec::new)));
    }
    let k = gens.len();
    // Columns: s_1..s_k, δ⁺, δ⁻, u   with  cᵢ = δ + sᵢ,  δ = δ⁺ − δ⁻,  δ + u = 1.
    let cols = k + 3;
    let mut a = Vec::with_capacity(r + 1);
    let mut b = Vec::with_capacity(r + 1);
    for d in 0..r {
        let mut row = vec![Rat::zero(); cols];
        let mut total = Rat::zero();
        for (i, g) in gens.iter().enumerate() {
            row[i] = g.0[d].clone();
            total += &g.0[d];
        }
        row[k] = total.clone();
        row[k + 1] = -total;
        a.push(row);
        b.push(target.0[d].clone());
    }
    let mut cap = vec![Rat::zero(); cols];
    cap[k] = Rat::one();
    cap[k + 1] = -Rat::one();
    cap[k + 2] = Rat::one();
    a.push(cap);
    b.push(Rat::one());

    let mut c = vec![Rat::zero(); cols];
    c[k] = Rat::one();
    c[k + 1] = -Rat::one();

    match maximize(&a, &b, &c) {
        LpOutcome::Optimal { x, value } if value.is_positive() => {
            let coeffs = x[..k].iter().map(|s| s + &value).collect();
            Ok((true, Some(coeffs)))
        }
        LpOutcome::Optimal { .. } | LpOutcome::Infeasible => Ok((false, None)),
        LpOutcome::Unbounded => unreachable!("δ is capped at 1"),
    }
}

/// Decides whether `target` is a nonnegative rational combination of `gens`.
pub fn cone_member(target: &RatVec, gens: &[RatVec]) -> Result<bool> {
    Ok(cone_combination(target, gens)?.is_some())
}

/// A nonnegative combination of `gens` equal to `target`, if one exists.
pub fn cone_combination(target: &RatVec, gens: &[RatVec]) -> Result<Option<Vec<Rat>>> {
    let r = target.len();
    check_all(r, gens)?;
    if gens.is_empty() {
        return Ok(target.is_zero().then(Vec::new));
    }
    let a: Vec<Vec<Rat>> = (0..r)
        .map(|d| gens.iter().map(|g| g.0[d].clone()).collect())
        .collect();
    let c = vec![Rat::zero(); gens.len()];
    Ok(match maximize(&a, target.entries(), &c) {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    })
}

/// Clears denominators row by row, returning integer rows.
fn integer_rows(gens: &[RatVec]) -> Vec<Vec<BigInt>> {
    gens.iter()
        .map(|g| {
            let l = g.0.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            g.0.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect()
}

/// Indices of a maximal linearly independent subset of `gens`, chosen greedily
/// in input order, computed by fraction-free elimination on integer rows.
pub fn independent_subset(gens: &[RatVec]) -> Vec<usize> {
    let mut rows = integer_rows(gens);
    let n = gens.first().map_or(0, RatVec::len);
    // Each accepted row is reduced against earlier pivots; a row that
    // reduces to zero is dependent on its predecessors.
    let mut accepted: Vec<(usize, usize)> = Vec::new(); // (row index, pivot column)
    for i in 0..rows.len() {
        for &(p, col) in &accepted {
            let pivot = rows[p][col].clone();
            let lead = rows[i][col].clone();
            if lead.is_zero() {
                continue;
            }
            let (head, tail) = rows.split_at_mut(i);
            let prow = &head[p];
            for (v, pv) in tail[0].iter_mut().zip(prow) {
                *v = &*v * &pivot - &lead * pv;
            }
            // Keep entries small: divide by the row content.
            let g = tail[0].iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            if !g.is_zero() && !g.is_one() {
                for v in tail[0].iter_mut() {
                    *v = &*v / &g;
                }
            }
        }
        if let Some(col) = (0..n).find(|&c| !rows[i][c].is_zero()) {
            accepted.push((i, col));
        }
    }
    accepted.into_iter().map(|(i, _)| i).collect()
}

/// Rank over ℚ.
pub fn rational_rank(gens: &[RatVec]) -> usize {
    independent_subset(gens).len()
}

/// A basis (not orthonormalized) of the orthogonal complement of `span(gens)`
/// in ℚʳ.
pub fn orthogonal_complement(gens: &[RatVec], r: usize) -> Vec<RatVec> {
    let rows: Vec<Vec<Rat>> = gens.iter().map(|g| g.0.clone()).collect();
    // Reduced row echelon form of the generator matrix; kernel vectors come
    // from free columns.
    let mut rows = rows;
    let mut pivot_cols = Vec::new();
    let mut next = 0;
    for col in 0..r {
        let Some(p) = (next..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(next, p);
        let pv = rows[next][col].clone();
        for v in rows[next].iter_mut() {
            *v = &*v / &pv;
        }
        let prow = rows[next].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != next && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= &f * pv;
                }
            }
        }
        pivot_cols.push(col);
        next += 1;
    }
    (0..r)
        .filter(|c| !pivot_cols.contains(c))
        .map(|free| {
            let mut v = vec![Rat::zero(); r];
            v[free] = Rat::one();
            for (i, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -rows[i][free].clone();
            }
            RatVec(v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> RatVec {
        RatVec::from_ints(x)
    }

    #[test]
    fn foot_examples() {
        let origin = v(&[0, 0]);
        let base = v(&[-3, 1]);
        assert_eq!(
            nearest_affine_point(&origin, &base, &[v(&[1, 0])]).unwrap(),
            v(&[0, 1])
        );
        assert_eq!(nearest_affine_point(&origin, &base, &[]).unwrap(), base);
        assert_eq!(
            nearest_affine_point(&origin, &base, &[v(&[1, 0]), v(&[0, 1])]).unwrap(),
            origin
        );
    }

    #[test]
    fn foot_with_dependent_generators() {
        let origin = v(&[0, 0]);
        let base = v(&[-3, 1]);
        let gens = [v(&[1, -1]), v(&[2, -2])];
        // minimize (−3+s)² + (1−s)² ⇒ s = 2
        assert_eq!(
            nearest_affine_point(&origin, &base, &gens).unwrap(),
            v(&[-1, -1])
        );
    }

    #[test]
    fn foot_dimension_mismatch() {
        let err = nearest_affine_point(&v(&[0, 0]), &v(&[0, 0, 0]), &[]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn strict_cone_examples() {
        let (ok, c) = strict_cone_member(&v(&[3, -1]), &[v(&[1, 0]), v(&[1, -1])]).unwrap();
        assert!(ok);
        assert_eq!(c.unwrap(), vec![rat(2), rat(1)]);
        let (ok, c) = strict_cone_member(&v(&[3, -1]), &[v(&[1, 0]), v(&[0, 1])]).unwrap();
        assert!(!ok && c.is_none());
        let (ok, _) = strict_cone_member(&v(&[0, 0]), &[]).unwrap();
        assert!(ok);
    }

    #[test]
    fn strict_cone_boundary_is_excluded() {
        // (1,0) lies on the boundary ray of cone{(1,0),(0,1)}.
        let (ok, _) = strict_cone_member(&v(&[1, 0]), &[v(&[1, 0]), v(&[0, 1])]).unwrap();
        assert!(!ok);
        // Opposite rays: 0 = 1·(1) + 1·(−1), strictly positive.
        let (ok, c) = strict_cone_member(&v(&[0]), &[v(&[1]), v(&[-1])]).unwrap();
        assert!(ok);
        let c = c.unwrap();
        assert!(c.iter().all(Signed::is_positive));
    }

    #[test]
    fn cone_examples() {
        let gens = [v(&[1, 0]), v(&[0, 1]), v(&[1, -1])];
        assert!(cone_member(&v(&[3, -1]), &gens).unwrap());
        assert!(cone_member(&v(&[0, 0]), &gens).unwrap());
        assert!(cone_member(&v(&[0, 0]), &[]).unwrap());
        assert!(!cone_member(&v(&[-1, 0]), &[v(&[1, 0])]).unwrap());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rational_rank(&[v(&[1, 0]), v(&[0, 1]), v(&[1, -1])]), 2);
        assert_eq!(rational_rank(&[]), 0);
        assert_eq!(rational_rank(&[v(&[2, -2]), v(&[1, -1])]), 1);
        assert_eq!(
            rational_rank(&[
                RatVec::new(vec![ratio(1, 2), ratio(1, 3), rat(0)]),
                RatVec::new(vec![rat(3), rat(2), rat(0)]),
                v(&[0, 0, 5]),
            ]),
            2
        );
    }

    #[test]
    fn complement_is_orthogonal() {
        let gens = [v(&[1, 2, 3])];
        let comp = orthogonal_complement(&gens, 3);
        assert_eq!(comp.len(), 2);
        for c in &comp {
            assert!(c.dot(&gens[0]).is_zero());
        }
        assert_eq!(orthogonal_complement(&[], 2).len(), 2);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(parse_rat("-3"), Some(rat(-3)));
        assert_eq!(parse_rat(" 2/4 "), Some(ratio(1, 2)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(parse_rat("1/-2"), None);
        assert_eq!(parse_rat("x"), None);
        assert_eq!(
            RatVec::new(vec![rat(-3), ratio(1, 2)]).to_string(),
            "(-3,1/2)"
        );
    }
}
