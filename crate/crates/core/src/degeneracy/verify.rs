use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;

use super::fibre::{fibrewise_critical_locus, FibreGrid};
use super::hessian::{coordinate_basis, hessian_report, max_principal_angle, negative_eigenspace};
use super::minimizing::{local_coords_check, verify_minimizing, LocalCoordsParams};
use super::{sample_component_point, stream_rng, Tolerances};
use crate::critical::{criterion_predicates, CriticalComponent};
use crate::error::Result;
use crate::exactlin::{Rat, RatVec};
use crate::weights::{ActionSpec, ExactSquares};

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionTally {
    pub points: usize,
    /// Points where the four predicates agree.
    pub agreeing: usize,
    /// Points where all four predicates hold.
    pub critical: usize,
    /// First point where the predicates disagree.
    pub disagreement: Option<ExactSquares>,
}

impl CriterionTally {
    pub fn passed(&self) -> bool {
        self.agreeing == self.points
    }
}

fn random_rat<R: Rng>(rng: &mut R) -> Rat {
    Rat::new(
        BigInt::from(rng.random_range(1..=20i64)),
        BigInt::from(rng.random_range(1..=10i64)),
    )
}

/// Exact random radial data: half with random support and values, half
/// drawn from component polytopes (critical by construction) with an
/// occasional extra coordinate switched on.
pub fn sample_exact_point<R: Rng>(
    spec: &ActionSpec,
    components: &[CriticalComponent],
    i: usize,
    rng: &mut R,
) -> ExactSquares {
    let n = spec.coordinate_count();
    let mut q = vec![Rat::zero(); n];
    if i.is_multiple_of(2) || components.is_empty() {
        for v in q.iter_mut() {
            if rng.random_bool(0.5) {
                *v = random_rat(rng);
            }
        }
    } else {
        let c = &components[rng.random_range(0..components.len())];
        let weights: Vec<Rat> = c
            .polytope_points
            .iter()
            .map(|_| Rat::from_integer(BigInt::from(rng.random_range(1..=10i64))))
            .collect();
        let total: Rat = weights.iter().sum();
        for (p, w) in c.polytope_points.iter().zip(&weights) {
            for (qj, v) in q.iter_mut().zip(p.values()) {
                *qj += v * w / &total;
            }
        }
        if n > 0 && rng.random_bool(0.5) {
            let j = rng.random_range(0..n);
            q[j] += random_rat(rng);
        }
    }
    ExactSquares::new(q).expect("nonnegative by construction")
}

/// Evaluates the four criticality predicates on `count` seeded exact points.
pub fn criterion_survey(
    spec: &ActionSpec,
    target: &RatVec,
    components: &[CriticalComponent],
    count: usize,
    seed: u64,
) -> Result<CriterionTally> {
    let mut tally = CriterionTally {
        points: count,
        agreeing: 0,
        critical: 0,
        disagreement: None,
    };
    for i in 0..count {
        let mut rng = stream_rng(seed, i as u64);
        let q = sample_exact_point(spec, components, i, &mut rng);
        let p = criterion_predicates(spec, target, &q)?;
        if p.all_agree() {
            tally.agreeing += 1;
            if p.all_true() {
                tally.critical += 1;
            }
        } else if tally.disagreement.is_none() {
            tally.disagreement = Some(q);
        }
    }
    Ok(tally)
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyParams {
    pub seed: u64,
    /// Samples for the minimizing check.
    pub samples: usize,
    pub radius: f64,
    /// C points at which Hessian spectra are taken.
    pub hessian_points: usize,
    pub fibre: FibreGrid,
    pub local: LocalCoordsParams,
    pub criterion_points: usize,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            seed: 42,
            samples: 500,
            radius: 0.5,
            hessian_points: 10,
            fibre: FibreGrid::default(),
            local: LocalCoordsParams::default(),
            criterion_points: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentVerification {
    pub value: RatVec,
    pub f_value: Rat,
    pub index: usize,
    /// Hessian positive semidefinite on N and negative definite on E at
    /// every sampled C point.
    pub condition1_ok: bool,
    /// f grows off C along N with a positive quadratic margin.
    pub condition2_ok: bool,
    pub index_match: bool,
    pub even_index: bool,
    pub eigenspace_ok: bool,
    pub fibrewise_ok: bool,
    pub local_coords_ok: bool,
    pub negative_counts: Vec<usize>,
    pub max_principal_angle: f64,
    pub worst_float_margin: f64,
    pub fitted_margin: Option<Rat>,
    pub max_locus_norm: f64,
    pub min_abs_det: f64,
    /// Human-readable reasons for every failed check.
    pub failures: Vec<String>,
}

impl ComponentVerification {
    pub fn passed(&self) -> bool {
        self.condition1_ok
            && self.condition2_ok
            && self.index_match
            && self.even_index
            && self.eigenspace_ok
            && self.fibrewise_ok
            && self.local_coords_ok
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub components: Vec<ComponentVerification>,
    pub criterion: CriterionTally,
    pub tolerances: Tolerances,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.criterion.passed() && self.components.iter().all(|c| c.passed())
    }
}

fn component_seed(seed: u64, ci: usize) -> u64 {
    seed.wrapping_add((ci as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn verify_one(
    spec: &ActionSpec,
    target: &RatVec,
    component: &CriticalComponent,
    seed: u64,
    params: &VerifyParams,
    tol: &Tolerances,
) -> ComponentVerification {
    let n = spec.coordinate_count();
    let mut v = ComponentVerification {
        value: component.value.clone(),
        f_value: component.f_value.clone(),
        index: component.index,
        condition1_ok: true,
        condition2_ok: false,
        index_match: true,
        even_index: component.index.is_multiple_of(2),
        eigenspace_ok: true,
        fibrewise_ok: false,
        local_coords_ok: false,
        negative_counts: Vec::new(),
        max_principal_angle: 0.0,
        worst_float_margin: f64::NAN,
        fitted_margin: None,
        max_locus_norm: f64::NAN,
        min_abs_det: f64::NAN,
        failures: Vec::new(),
    };
    let e_basis = coordinate_basis(n, &component.negative_coords);
    let mut first_point = None;
    for i in 0..params.hessian_points {
        let mut rng = stream_rng(seed, i as u64);
        let z = sample_component_point(n, component, &mut rng);
        match hessian_report(spec, target, component, &z, tol) {
            Ok(r) => {
                v.negative_counts.push(r.negative_count);
                if !r.index_matches() {
                    v.index_match = false;
                }
                if !(r.restricted_psd_on_n && r.negative_definite_on_e) {
                    v.condition1_ok = false;
                }
            }
            Err(e) => {
                v.condition1_ok = false;
                v.index_match = false;
                v.failures.push(format!("hessian at sample {i}: {e}"));
                continue;
            }
        }
        match negative_eigenspace(spec, target, &z, component.index, tol) {
            Ok(basis) => {
                let angle = max_principal_angle(&basis, &e_basis);
                v.max_principal_angle = v.max_principal_angle.max(angle);
            }
            Err(e) => {
                v.eigenspace_ok = false;
                v.failures.push(format!("eigenspace at sample {i}: {e}"));
            }
        }
        first_point.get_or_insert(z);
    }
    if v.max_principal_angle >= tol.principal_angle {
        v.eigenspace_ok = false;
    }
    if !v.index_match {
        v.failures.push(format!(
            "negative eigenvalue counts {:?} against index {}",
            v.negative_counts, component.index
        ));
    }
    if !v.condition1_ok && v.failures.is_empty() {
        v.failures
            .push("Hessian not semidefinite on N or not definite on E".into());
    }
    if !v.eigenspace_ok && v.max_principal_angle >= tol.principal_angle {
        v.failures
            .push(format!("principal angle {:e}", v.max_principal_angle));
    }

    match verify_minimizing(
        spec,
        target,
        component,
        params.radius,
        params.samples,
        seed ^ 1,
        tol,
    ) {
        Ok(r) => {
            v.condition2_ok = r.passed;
            v.worst_float_margin = r.worst_float_margin;
            if !r.passed {
                v.failures.push(format!(
                    "minimizing margin {:e}, fitted c = {:?} at {:?}",
                    r.worst_float_margin,
                    r.fitted_margin.as_ref().map(|c| c.to_string()),
                    r.witness.real()
                ));
            }
            v.fitted_margin = r.fitted_margin;
        }
        Err(e) => v.failures.push(format!("minimizing: {e}")),
    }

    let grid = FibreGrid {
        seed: seed ^ 2,
        ..params.fibre
    };
    match fibrewise_critical_locus(spec, target, component, &grid, tol) {
        Ok(r) => {
            v.fibrewise_ok = r.passed();
            v.max_locus_norm = r.max_locus_norm;
            v.min_abs_det = r.min_abs_det;
            if !r.passed() {
                v.failures.push(format!(
                    "fibrewise locus {:e}, min |det| {:e}",
                    r.max_locus_norm, r.min_abs_det
                ));
            }
        }
        Err(e) => v.failures.push(format!("fibrewise: {e}")),
    }

    match first_point {
        Some(z) => {
            let local = LocalCoordsParams {
                seed: seed ^ 3,
                ..params.local
            };
            match local_coords_check(spec, target, component, &z, &local, tol) {
                Ok(r) => {
                    v.local_coords_ok = r.passed;
                    if !r.passed {
                        v.failures.push(format!(
                            "local coordinates: index constant {}, N growth {}, E fit {:?}",
                            r.index_constant, r.minimizing.passed, r.negative_fit
                        ));
                    }
                }
                Err(e) => v.failures.push(format!("local coordinates: {e}")),
            }
        }
        None => v.failures.push("no point of the component to check".into()),
    }
    v
}

/// Runs every local check on each listed component. Failures are recorded
/// in the report rather than returned as errors, so a corrupted table yields
/// a failing report.
pub fn verify_components(
    spec: &ActionSpec,
    target: &RatVec,
    components: &[CriticalComponent],
    params: &VerifyParams,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    spec.check_target(target)?;
    let criterion = criterion_survey(
        spec,
        target,
        components,
        params.criterion_points,
        params.seed,
    )?;
    let components = components
        .iter()
        .enumerate()
        .map(|(ci, c)| {
            verify_one(
                spec,
                target,
                c,
                component_seed(params.seed, ci),
                params,
                tol,
            )
        })
        .collect();
    Ok(VerificationReport {
        components,
        criterion,
        tolerances: *tol,
    })
}
