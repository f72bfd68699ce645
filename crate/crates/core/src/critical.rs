//! Exact critical structure of `f = ‖Φ − ξ‖²` for a linear torus action.
//!
//! For a subset `I` of weights, points with support exactly on `I` are
//! critical iff `Φ(z)` equals the foot `β′_I` of the perpendicular from `ξ`
//! to `β + span(I)`, and such points exist iff `β′_I − β` is a strictly
//! positive combination of `I`. Every critical value arises this way, so the
//! critical set is enumerated by running over the `2^m` subsets of distinct
//! weight directions.
//!
//! At a component with value `α`, set `b = α − ξ`. The weights split by the
//! sign of `⟨μ, b⟩`:
//! * `⟨μ, b⟩ = 0`: the component lives in these weight spaces;
//! * `⟨μ, b⟩ < 0`: the Hessian is negative definite on these (index `λ`);
//! * `⟨μ, b⟩ ≥ 0`: these span the minimizing manifold `N`.
//!
//! Near a point `x` of the component, supports of `x` and of a vector `ζ` in
//! the negative weight spaces are disjoint, so `Φ(x + ζ) = α + Q(ζ)` and
//! `f(x + ζ) = f(α) + 2 Σ ⟨μ, b⟩ |ζ_μ|²/2 + ‖Q(ζ)‖²`. This is what gives
//! `λ = 2 Σ_{⟨μ,b⟩<0} d_μ` for every component, not only the one through the
//! origin.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactlin::simplex::{maximize, LpOutcome};
use crate::exactlin::{
    cone_combination, cone_member, independent_subset, nearest_affine_point, orthogonal_complement,
    rational_rank, solve_consistent, strict_cone_member, Rat, RatVec,
};
use crate::weights::{momentum_value, ActionSpec, ExactSquares};

/// Enumeration is exponential in the number of distinct weights.
pub const MAX_DISTINCT_WEIGHTS: usize = 20;

/// Face enumeration for exact polytope projection is exponential in the
/// number of coordinates on the component.
pub const MAX_PROJECTION_COORDS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalComponent {
    /// Momentum value α on the component.
    pub value: RatVec,
    /// `‖α − ξ‖²`.
    pub f_value: Rat,
    /// Weights with `⟨μ, α − ξ⟩ = 0`.
    pub zero_weights: Vec<usize>,
    /// Weights with `⟨μ, α − ξ⟩ < 0`.
    pub negative_weights: Vec<usize>,
    /// Weights with `⟨μ, α − ξ⟩ > 0`.
    pub positive_weights: Vec<usize>,
    /// Morse index `λ = 2 Σ_{negative} d_μ`.
    pub index: usize,
    /// Expanded coordinates of `N = ⊕_{⟨μ,α−ξ⟩ ≥ 0} V_μ`.
    pub minimizing_coords: Vec<usize>,
    /// Expanded coordinates of the negative weight spaces (complement of N).
    pub negative_coords: Vec<usize>,
    /// Expanded coordinates of the zero weight spaces.
    pub zero_coords: Vec<usize>,
    /// Weight subsets whose feet produced α, in increasing bitmask order.
    pub witnesses: Vec<Vec<usize>>,
    /// Expanded coordinates that are nonzero somewhere on the component.
    pub generic_support: Vec<usize>,
    /// `r − rank{μ_(j) : j ∈ generic_support}`.
    pub stabilizer_rank: usize,
    /// Points of the polytope `P_α` of radial data on the component (full
    /// coordinate length, zero off `zero_coords`).
    pub polytope_points: Vec<ExactSquares>,
    /// True for the component with `α = ξ`.
    pub is_minimum: bool,
}

fn mask_members(mask: u32, m: usize) -> Vec<usize> {
    (0..m).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Sign partition of the weights against `b = α − ξ`.
fn partition(spec: &ActionSpec, b: &RatVec) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let mut zero = Vec::new();
    let mut neg = Vec::new();
    let mut pos = Vec::new();
    for (i, w) in spec.weights().iter().enumerate() {
        let s = w.weight.dot(b);
        if s.is_zero() {
            zero.push(i);
        } else if s.is_negative() {
            neg.push(i);
        } else {
            pos.push(i);
        }
    }
    (zero, neg, pos)
}

fn check_enumerable(spec: &ActionSpec) -> Result<()> {
    let m = spec.weights().len();
    if m > MAX_DISTINCT_WEIGHTS {
        return Err(Error::TooManyWeights {
            count: m,
            limit: MAX_DISTINCT_WEIGHTS,
        });
    }
    Ok(())
}

/// The surviving foot for one weight subset, if any.
fn subset_foot(spec: &ActionSpec, target: &RatVec, members: &[usize]) -> Option<RatVec> {
    let gens: Vec<RatVec> = members.iter().map(|&i| spec.weight(i).clone()).collect();
    let foot = nearest_affine_point(target, spec.shift(), &gens).expect("lengths checked");
    let offset = &foot - spec.shift();
    let (ok, _) = strict_cone_member(&offset, &gens).expect("lengths checked");
    ok.then_some(foot)
}

/// Distinct critical values α with the weight subsets whose feet produce
/// them, in lexicographic order of α.
pub(crate) fn critical_feet(
    spec: &ActionSpec,
    target: &RatVec,
) -> Result<BTreeMap<RatVec, Vec<Vec<usize>>>> {
    spec.check_target(target)?;
    check_enumerable(spec)?;
    let m = spec.weights().len();

    let feet: Vec<(u32, Option<RatVec>)> = (0..1u32 << m)
        .into_par_iter()
        .map(|mask| (mask, subset_foot(spec, target, &mask_members(mask, m))))
        .collect();

    let mut grouped: BTreeMap<RatVec, Vec<Vec<usize>>> = BTreeMap::new();
    for (mask, foot) in feet {
        if let Some(alpha) = foot {
            grouped
                .entry(alpha)
                .or_default()
                .push(mask_members(mask, m));
        }
    }
    Ok(grouped)
}

/// All critical components of `‖Φ − ξ‖²`, sorted lexicographically by α.
pub fn enumerate_critical_components(
    spec: &ActionSpec,
    target: &RatVec,
) -> Result<Vec<CriticalComponent>> {
    critical_feet(spec, target)?
        .into_iter()
        .map(|(alpha, witnesses)| describe_component(spec, target, alpha, witnesses))
        .collect()
}

fn describe_component(
    spec: &ActionSpec,
    target: &RatVec,
    alpha: RatVec,
    witnesses: Vec<Vec<usize>>,
) -> Result<CriticalComponent> {
    let b = &alpha - target;
    let (zero_weights, negative_weights, positive_weights) = partition(spec, &b);
    let index = 2 * negative_weights
        .iter()
        .map(|&i| spec.weights()[i].multiplicity)
        .sum::<usize>();
    let mut n_weights: Vec<usize> = zero_weights
        .iter()
        .chain(&positive_weights)
        .copied()
        .collect();
    n_weights.sort_unstable();
    let minimizing_coords = spec.coordinates_of_set(&n_weights);
    let negative_coords = spec.coordinates_of_set(&negative_weights);
    let zero_coords = spec.coordinates_of_set(&zero_weights);

    let (generic_support, polytope_points) = support_on_polytope(spec, &alpha, &zero_coords)?;
    let support_weights: Vec<RatVec> = generic_support
        .iter()
        .map(|&j| spec.weight(spec.coordinate_weight(j)).clone())
        .collect();
    let stabilizer_rank = spec.rank() - rational_rank(&support_weights);

    Ok(CriticalComponent {
        f_value: b.norm_sq(),
        is_minimum: b.is_zero(),
        value: alpha,
        zero_weights,
        negative_weights,
        positive_weights,
        index,
        minimizing_coords,
        negative_coords,
        zero_coords,
        witnesses,
        generic_support,
        stabilizer_rank,
        polytope_points,
    })
}

/// Coordinates that can be positive on `P_α = {q ≥ 0 on zero_coords :
/// Σ q_j μ_(j) = α − β}`, one exact LP per coordinate, together with the LP
/// solutions found along the way.
fn support_on_polytope(
    spec: &ActionSpec,
    alpha: &RatVec,
    zero_coords: &[usize],
) -> Result<(Vec<usize>, Vec<ExactSquares>)> {
    let n = spec.coordinate_count();
    let r = spec.rank();
    let rhs = alpha - spec.shift();
    let gens: Vec<RatVec> = zero_coords
        .iter()
        .map(|&j| spec.weight(spec.coordinate_weight(j)).clone())
        .collect();

    let expand = |local: &[Rat]| {
        let mut q = vec![Rat::zero(); n];
        for (&j, v) in zero_coords.iter().zip(local) {
            q[j] = v.clone();
        }
        ExactSquares::new(q).expect("LP solutions are nonnegative")
    };

    let Some(feasible) = cone_combination(&rhs, &gens)? else {
        return Err(Error::EmptyPolytope(alpha.to_string()));
    };
    let mut points = vec![expand(&feasible)];

    let k = zero_coords.len();
    let mut support = Vec::new();
    let rows: Vec<Vec<Rat>> = (0..r)
        .map(|d| gens.iter().map(|g| g.entries()[d].clone()).collect())
        .collect();
    for t in 0..k {
        let mut c = vec![Rat::zero(); k];
        c[t] = Rat::one();
        let x = match maximize(&rows, rhs.entries(), &c) {
            LpOutcome::Optimal { x, .. } => x,
            LpOutcome::Unbounded => {
                // Unbounded in q_t: cap it one unit above the known feasible point.
                let mut a = rows
                    .iter()
                    .map(|row| {
                        let mut row = row.clone();
                        row.push(Rat::zero());
                        row
                    })
                    .collect::<Vec<_>>();
                let mut cap = vec![Rat::zero(); k + 1];
                cap[t] = Rat::one();
                cap[k] = Rat::one();
                a.push(cap);
                let mut b = rhs.entries().to_vec();
                b.push(&feasible[t] + Rat::one());
                let mut c = c.clone();
                c.push(Rat::zero());
                match maximize(&a, &b, &c) {
                    LpOutcome::Optimal { x, .. } => x[..k].to_vec(),
                    _ => unreachable!("capped LP contains the feasible point"),
                }
            }
            LpOutcome::Infeasible => return Err(Error::EmptyPolytope(alpha.to_string())),
        };
        if x[t].is_positive() {
            support.push(zero_coords[t]);
            let p = expand(&x);
            if !points.contains(&p) {
                points.push(p);
            }
        }
    }
    Ok((support, points))
}

/// Support set and stabilizer rank of a component.
pub fn generic_support(
    spec: &ActionSpec,
    target: &RatVec,
    component: &CriticalComponent,
) -> Result<(Vec<usize>, usize)> {
    spec.check_target(target)?;
    let (support, _) = support_on_polytope(spec, &component.value, &component.zero_coords)?;
    let gens: Vec<RatVec> = support
        .iter()
        .map(|&j| spec.weight(spec.coordinate_weight(j)).clone())
        .collect();
    Ok((support, spec.rank() - rational_rank(&gens)))
}

/// Whether α is a critical value of `‖Φ − ξ‖²`: critical points over α are
/// exactly the points supported on `{⟨μ, α−ξ⟩ = 0}` with `Φ = α`.
pub fn is_critical_value(spec: &ActionSpec, target: &RatVec, alpha: &RatVec) -> Result<bool> {
    spec.check_target(target)?;
    spec.check_target(alpha)?;
    let (zero, _, _) = partition(spec, &(alpha - target));
    let gens: Vec<RatVec> = zero.iter().map(|&i| spec.weight(i).clone()).collect();
    cone_member(&(alpha - spec.shift()), &gens)
}

/// Morse index at the component with value α.
pub fn component_index(spec: &ActionSpec, target: &RatVec, alpha: &RatVec) -> Result<usize> {
    if !is_critical_value(spec, target, alpha)? {
        return Err(Error::NotCritical(alpha.to_string()));
    }
    let b = alpha - target;
    Ok(2 * spec
        .weights()
        .iter()
        .filter(|w| w.weight.dot(&b).is_negative())
        .map(|w| w.multiplicity)
        .sum::<usize>())
}

/// The four equivalent criticality conditions, each evaluated by its own
/// route.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CriterionPredicates {
    /// The gradient `2 q_j ⟨b, μ_(j)⟩` vanishes coordinatewise.
    pub critical: bool,
    /// `b` is perpendicular to the image of dΦ (the span of support weights).
    pub perpendicular_to_image: bool,
    /// `b` lies in the dual of the stabilizer algebra.
    pub in_stabilizer_dual: bool,
    /// The subtorus generated by `b` fixes the point.
    pub fixed_by_subtorus: bool,
}

impl CriterionPredicates {
    pub fn as_array(&self) -> [bool; 4] {
        [
            self.critical,
            self.perpendicular_to_image,
            self.in_stabilizer_dual,
            self.fixed_by_subtorus,
        ]
    }

    pub fn all_agree(&self) -> bool {
        let a = self.as_array();
        a.iter().all(|&x| x == a[0])
    }

    pub fn all_true(&self) -> bool {
        self.as_array().iter().all(|&x| x)
    }
}

pub fn criterion_predicates(
    spec: &ActionSpec,
    target: &RatVec,
    q: &ExactSquares,
) -> Result<CriterionPredicates> {
    spec.check_target(target)?;
    let b = &momentum_value(spec, q)? - target;
    let support = q.support();
    let support_weights: Vec<RatVec> = support
        .iter()
        .map(|&j| spec.weight(spec.coordinate_weight(j)).clone())
        .collect();

    let critical = q
        .values()
        .iter()
        .enumerate()
        .all(|(j, qj)| (qj * b.dot(spec.weight(spec.coordinate_weight(j)))).is_zero());

    // Orthogonality against a spanning subset of the image.
    let perpendicular_to_image = independent_subset(&support_weights)
        .into_iter()
        .all(|i| support_weights[i].dot(&b).is_zero());

    // b ∈ (span of support weights)^⊥: adjoining b to a basis of the
    // complement must not raise the rank.
    let complement = orthogonal_complement(&support_weights, spec.rank());
    let base_rank = rational_rank(&complement);
    let mut augmented = complement;
    augmented.push(b.clone());
    let in_stabilizer_dual = rational_rank(&augmented) == base_rank;

    let fixed_by_subtorus = support
        .iter()
        .all(|&j| spec.weight(spec.coordinate_weight(j)).dot(&b).is_zero());

    Ok(CriterionPredicates {
        critical,
        perpendicular_to_image,
        in_stabilizer_dual,
        fixed_by_subtorus,
    })
}

/// Critical values grouped by the value of f rather than by α.
pub fn group_by_f_value(components: &[CriticalComponent]) -> Vec<(Rat, Vec<RatVec>)> {
    let mut groups: BTreeMap<Rat, Vec<RatVec>> = BTreeMap::new();
    for c in components {
        groups
            .entry(c.f_value.clone())
            .or_default()
            .push(c.value.clone());
    }
    groups.into_iter().collect()
}

/// Exact Euclidean projection of radial data `q` (full coordinate length)
/// onto the component polytope `P_α`, padded by zeros off `zero_coords`.
/// Returns the projected point and the squared distance.
///
/// The projection lies in the relative interior of some face `{q_j = 0 for
/// j ∉ F}`, where it coincides with the projection onto the face's affine
/// hull; enumerating the faces and keeping feasible candidates finds it.
pub fn project_onto_polytope(
    spec: &ActionSpec,
    component: &CriticalComponent,
    q: &[Rat],
) -> Result<(Vec<Rat>, Rat)> {
    let n = spec.coordinate_count();
    if q.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: q.len(),
        });
    }
    let zc = &component.zero_coords;
    if zc.len() > MAX_PROJECTION_COORDS {
        return Err(Error::InvalidParameter(format!(
            "{} component coordinates exceed the projection limit of {}",
            zc.len(),
            MAX_PROJECTION_COORDS
        )));
    }
    let rhs = &component.value - spec.shift();
    let r = spec.rank();
    let mu = |j: usize| spec.weight(spec.coordinate_weight(j));

    let mut best: Option<(Vec<Rat>, Rat)> = None;
    for mask in 0..1u32 << zc.len() {
        let free: Vec<usize> = mask_members(mask, zc.len())
            .into_iter()
            .map(|i| zc[i])
            .collect();
        // q_F = p_F − A_Fᵀ y,   (A_F A_Fᵀ) y = A_F p_F − rhs
        let gram: Vec<Vec<Rat>> = (0..r)
            .map(|d1| {
                (0..r)
                    .map(|d2| {
                        free.iter()
                            .map(|&j| &mu(j).entries()[d1] * &mu(j).entries()[d2])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let apf: Vec<Rat> = (0..r)
            .map(|d| {
                let s: Rat = free.iter().map(|&j| &mu(j).entries()[d] * &q[j]).sum();
                s - &rhs.entries()[d]
            })
            .collect();
        let Some(y) = solve_consistent(&gram, &apf) else {
            continue;
        };
        let mut point = vec![Rat::zero(); n];
        let mut feasible = true;
        for &j in &free {
            let correction: Rat = (0..r).map(|d| &mu(j).entries()[d] * &y[d]).sum();
            let v = &q[j] - correction;
            if v.is_negative() {
                feasible = false;
                break;
            }
            point[j] = v;
        }
        if !feasible {
            continue;
        }
        // Empty free set: only feasible when α = β.
        if free.is_empty() && !rhs.is_zero() {
            continue;
        }
        let dist: Rat = q
            .iter()
            .zip(&point)
            .map(|(a, b)| {
                let d = a - b;
                &d * &d
            })
            .sum();
        if best.as_ref().is_none_or(|(_, bd)| dist < *bd) {
            best = Some((point, dist));
        }
    }
    best.ok_or_else(|| Error::EmptyPolytope(component.value.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{rat, ratio};

    fn c3() -> ActionSpec {
        ActionSpec::from_ints(2, &[(&[1, 0], 1), (&[0, 1], 1), (&[1, -1], 1)], &[-3, 1])
    }

    fn v(x: &[i64]) -> RatVec {
        RatVec::from_ints(x)
    }

    fn q(x: &[i64]) -> ExactSquares {
        ExactSquares::new(x.iter().map(|&a| rat(a)).collect()).unwrap()
    }

    #[test]
    fn c3_components() {
        let comps = enumerate_critical_components(&c3(), &v(&[0, 0])).unwrap();
        let values: Vec<RatVec> = comps.iter().map(|c| c.value.clone()).collect();
        assert_eq!(
            values,
            vec![v(&[-3, 1]), v(&[-1, -1]), v(&[0, 0]), v(&[0, 1])]
        );
        let idx: Vec<usize> = comps.iter().map(|c| c.index).collect();
        assert_eq!(idx, vec![4, 4, 0, 2]);
        let stab: Vec<usize> = comps.iter().map(|c| c.stabilizer_rank).collect();
        assert_eq!(stab, vec![2, 1, 0, 1]);
        assert!(comps[2].is_minimum);
        assert_eq!(comps[2].generic_support, vec![0, 1, 2]);
        assert_eq!(comps[3].generic_support, vec![0]);
        assert!(comps[0].generic_support.is_empty());
        assert_eq!(comps[3].minimizing_coords, vec![0, 1]);
        assert_eq!(comps[3].negative_coords, vec![2]);
        assert_eq!(comps[0].f_value, rat(10));
    }

    #[test]
    fn empty_weights_single_component() {
        let spec = ActionSpec::from_ints(2, &[], &[2, -1]);
        let comps = enumerate_critical_components(&spec, &v(&[0, 0])).unwrap();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].value, v(&[2, -1]));
        assert_eq!(comps[0].index, 0);
        assert_eq!(comps[0].stabilizer_rank, 2);
    }

    #[test]
    fn opposite_circle_weights() {
        let spec = ActionSpec::from_ints(1, &[(&[1], 1), (&[-1], 1)], &[0]);
        let comps = enumerate_critical_components(&spec, &v(&[0])).unwrap();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].value, v(&[0]));
        assert_eq!(comps[0].zero_weights, vec![0, 1]);
        assert_eq!(comps[0].index, 0);
        assert_eq!(comps[0].minimizing_coords, vec![0, 1]);
        // The cone {q₁ = q₂} is unbounded; capped LPs still see both coordinates.
        assert_eq!(comps[0].generic_support, vec![0, 1]);
        assert_eq!(comps[0].stabilizer_rank, 0);
    }

    #[test]
    fn index_examples() {
        let spec = c3();
        let o = v(&[0, 0]);
        assert_eq!(component_index(&spec, &o, &v(&[0, 0])).unwrap(), 0);
        assert_eq!(component_index(&spec, &o, &v(&[0, 1])).unwrap(), 2);
        assert_eq!(component_index(&spec, &o, &v(&[-1, -1])).unwrap(), 4);
        assert!(matches!(
            component_index(&spec, &o, &v(&[1, 1])),
            Err(Error::NotCritical(_))
        ));
    }

    #[test]
    fn predicate_examples() {
        let spec = c3();
        let o = v(&[0, 0]);
        assert!(criterion_predicates(&spec, &o, &q(&[0, 0, 2]))
            .unwrap()
            .all_true());
        assert!(criterion_predicates(&spec, &o, &q(&[0, 0, 0]))
            .unwrap()
            .all_true());
        let p = criterion_predicates(&spec, &o, &q(&[1, 0, 0])).unwrap();
        assert_eq!(p.as_array(), [false; 4]);
    }

    #[test]
    fn support_examples() {
        let spec = c3();
        let o = v(&[0, 0]);
        let comps = enumerate_critical_components(&spec, &o).unwrap();
        let by = |a: &[i64]| comps.iter().find(|c| c.value == v(a)).unwrap();
        assert_eq!(
            generic_support(&spec, &o, by(&[0, 0])).unwrap(),
            (vec![0, 1, 2], 0)
        );
        assert_eq!(
            generic_support(&spec, &o, by(&[0, 1])).unwrap(),
            (vec![0], 1)
        );
        assert_eq!(
            generic_support(&spec, &o, by(&[-3, 1])).unwrap(),
            (vec![], 2)
        );
    }

    #[test]
    fn polytope_points_are_critical() {
        let spec = c3();
        let o = v(&[0, 0]);
        for c in enumerate_critical_components(&spec, &o).unwrap() {
            for p in &c.polytope_points {
                assert_eq!(momentum_value(&spec, p).unwrap(), c.value);
                assert!(criterion_predicates(&spec, &o, p).unwrap().all_true());
            }
        }
    }

    #[test]
    fn projection_onto_component_polytope() {
        let spec = c3();
        let comps = enumerate_critical_components(&spec, &v(&[0, 0])).unwrap();
        let minimum = comps.iter().find(|c| c.is_minimum).unwrap();
        // P = {(3−c, c−1, c) : 1 ≤ c ≤ 3}; (2, 0, 1) lies on it.
        let (p, d) = project_onto_polytope(&spec, minimum, &[rat(2), rat(0), rat(1)]).unwrap();
        assert_eq!(p, vec![rat(2), rat(0), rat(1)]);
        assert!(d.is_zero());
        // (0,0,0) projects to the nearest point of the segment.
        let (p, d) = project_onto_polytope(&spec, minimum, &[rat(0), rat(0), rat(0)]).unwrap();
        // Minimize (3−c)² + (c−1)² + c² over c ∈ [1,3] ⇒ c = 4/3.
        assert_eq!(p, vec![ratio(5, 3), ratio(1, 3), ratio(4, 3)]);
        assert_eq!(d, ratio(25 + 1 + 16, 9));
        // Coordinates off the component count fully.
        let origin = &comps[0];
        let (_, d) = project_onto_polytope(&spec, origin, &[rat(0), rat(2), rat(0)]).unwrap();
        assert_eq!(d, rat(4));
    }

    #[test]
    fn f_value_grouping_keeps_ties() {
        // r=2, weights (1,0),(0,1), shift (−1,−1): feet (−1,−1), (0,−1), (−1,0), (0,0)
        let spec = ActionSpec::from_ints(2, &[(&[1, 0], 1), (&[0, 1], 1)], &[-1, -1]);
        let comps = enumerate_critical_components(&spec, &v(&[0, 0])).unwrap();
        assert_eq!(comps.len(), 4);
        let groups = group_by_f_value(&comps);
        assert_eq!(groups.len(), 3);
        assert_eq!(groups[1].0, rat(1));
        assert_eq!(groups[1].1.len(), 2);
    }

    #[test]
    fn too_many_weights() {
        let ws: Vec<Vec<i64>> = (1..=21).map(|k| vec![k]).collect();
        let refs: Vec<(&[i64], usize)> = ws.iter().map(|w| (w.as_slice(), 1)).collect();
        let spec = ActionSpec::from_ints(1, &refs, &[0]);
        assert!(matches!(
            enumerate_critical_components(&spec, &v(&[0])),
            Err(Error::TooManyWeights { .. })
        ));
    }
}
