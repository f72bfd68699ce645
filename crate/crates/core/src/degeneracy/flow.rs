use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{norm, sample_component_point, sample_in_coords, stream_rng, NormSquare, Tolerances};
use crate::critical::{
    criterion_predicates, enumerate_critical_components, project_onto_polytope, CriticalComponent,
};
use crate::error::{Error, Result};
use crate::exactlin::{rat_to_f64, rationalize, RatVec};
use crate::weights::{polarization_certificate, ActionSpec, ExactSquares, NumericPoint};

/// Denominator used when rounding flow limits to exact radial data.
const ROUNDING_DENOMINATOR: i64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowParams {
    pub initial_step: f64,
    pub max_steps: usize,
    /// Absolute and relative local error targets for step doubling.
    pub atol: f64,
    pub rtol: f64,
    pub max_step: f64,
    /// `‖z‖` beyond which the trajectory is declared divergent.
    pub divergence_bound: f64,
    pub tol: Tolerances,
}

impl Default for FlowParams {
    fn default() -> Self {
        FlowParams {
            initial_step: 1e-2,
            max_steps: 1_000_000,
            atol: 1e-12,
            rtol: 1e-10,
            max_step: 10.0,
            divergence_bound: 1e6,
            tol: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowResult {
    pub start: NumericPoint,
    pub limit: NumericPoint,
    pub limit_momentum: Vec<f64>,
    pub matched_component: Option<RatVec>,
    /// `‖Φ(limit) − α‖` for the closest enumerated α.
    pub match_distance: f64,
    pub steps: usize,
    pub f_start: f64,
    pub f_limit: f64,
    pub f_monotone: bool,
    /// Largest single-step increase of f (negative when f strictly fell).
    pub max_f_increase: f64,
    pub max_arg_drift: f64,
    pub grad_norm: f64,
}

/// One classical Runge–Kutta step of `ẏ = −∇f(y)`.
fn rk4_step(model: &NormSquare, y: &[f64], h: f64) -> Vec<f64> {
    let axpy = |a: &[f64], s: f64, b: &[f64]| -> Vec<f64> {
        a.iter().zip(b).map(|(x, d)| x - s * d).collect()
    };
    let k1 = model.gradient(y);
    let k2 = model.gradient(&axpy(y, 0.5 * h, &k1));
    let k3 = model.gradient(&axpy(y, 0.5 * h, &k2));
    let k4 = model.gradient(&axpy(y, h, &k3));
    y.iter()
        .enumerate()
        .map(|(i, v)| v - h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

fn max_phase_drift(start: &[f64], end: &[f64]) -> f64 {
    let mut drift: f64 = 0.0;
    for (s, e) in start.chunks_exact(2).zip(end.chunks_exact(2)) {
        let rs = s[0].hypot(s[1]);
        let re = e[0].hypot(e[1]);
        if rs == 0.0 || re < 1e-150 {
            continue;
        }
        let mut d = (e[1].atan2(e[0]) - s[1].atan2(s[0])).abs();
        if d > std::f64::consts::PI {
            d = std::f64::consts::TAU - d;
        }
        drift = drift.max(d);
    }
    drift
}

/// Flows `z₀` down the negative gradient of f and matches the limit
/// against the given critical values.
/// Largest step RK4 takes stably on the linearised flow at `y`, from a
/// Gershgorin bound on the Hessian. Without it, steps in flat directions grow
/// until the stiff directions oscillate and `f` creeps upward.
fn stability_limit(model: &NormSquare, y: &[f64]) -> f64 {
    let h = model.hessian(y);
    let rho = h
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if rho > 0.0 {
        2.5 / rho
    } else {
        f64::INFINITY
    }
}

pub fn flow_against(
    spec: &ActionSpec,
    target: &RatVec,
    components: &[CriticalComponent],
    z0: &NumericPoint,
    params: &FlowParams,
) -> Result<FlowResult> {
    if !z0.is_finite() {
        return Err(Error::InvalidParameter("start point is not finite".into()));
    }
    let model = NormSquare::new(spec, target);
    let tol = &params.tol;
    let mut y = z0.real().to_vec();
    let mut f = model.value(&y);
    let f_start = f;
    let mut h = params.initial_step;
    let mut steps = 0;
    let mut max_f_increase = f64::NEG_INFINITY;
    let mut grad = norm(&model.gradient(&y));

    while grad >= tol.flow_gradient {
        if steps >= params.max_steps || h < 1e-14 {
            return Err(Error::NonConvergence {
                steps,
                grad_norm: grad,
            });
        }
        let full = rk4_step(&model, &y, h);
        let half = rk4_step(&model, &y, 0.5 * h);
        let half = rk4_step(&model, &half, 0.5 * h);
        let err = half
            .iter()
            .zip(&full)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / 15.0;
        let scale = params.atol + params.rtol * half.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let ratio = if err == 0.0 { 0.0 } else { err / scale };
        if ratio <= 1.0 && half.iter().all(|v| v.is_finite()) {
            let f_new = model.value(&half);
            max_f_increase = max_f_increase.max(f_new - f);
            y = half;
            f = f_new;
            steps += 1;
            grad = norm(&model.gradient(&y));
            let n = norm(&y);
            if n > params.divergence_bound {
                return Err(Error::Divergence { steps, norm: n });
            }
        }
        let factor = if ratio == 0.0 {
            5.0
        } else {
            (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h * factor)
            .min(params.max_step)
            .min(stability_limit(&model, &y));
    }

    let target_f = target.to_f64();
    let limit_momentum = model.momentum(&y, &target_f);
    let mut best: Option<(f64, &RatVec)> = None;
    for c in components {
        let d = norm(
            &limit_momentum
                .iter()
                .zip(c.value.to_f64())
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>(),
        );
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, &c.value));
        }
    }
    let (match_distance, matched_component) = match best {
        Some((d, alpha)) if d < tol.match_distance => (d, Some(alpha.clone())),
        Some((d, _)) => (d, None),
        None => (f64::INFINITY, None),
    };
    let max_f_increase = if steps == 0 { 0.0 } else { max_f_increase };

    Ok(FlowResult {
        start: z0.clone(),
        max_arg_drift: max_phase_drift(z0.real(), &y),
        limit: NumericPoint::from_real(y),
        limit_momentum,
        matched_component,
        match_distance,
        steps,
        f_start,
        f_limit: f,
        f_monotone: max_f_increase <= tol.monotone_slack,
        max_f_increase,
        grad_norm: grad,
    })
}

/// Flows `z₀` and matches the limit against a fresh enumeration.
pub fn flow_trajectory(
    spec: &ActionSpec,
    target: &RatVec,
    z0: &NumericPoint,
    params: &FlowParams,
) -> Result<FlowResult> {
    let components = enumerate_critical_components(spec, target)?;
    flow_against(spec, target, &components, z0, params)
}

/// Whether a flow limit satisfies the criticality criterion exactly: either
/// its rounded radial data does, or the rounded data lies within the match
/// tolerance of a polytope point of the matched component that does.
pub fn criterion_crosscheck(
    spec: &ActionSpec,
    target: &RatVec,
    component: &CriticalComponent,
    limit: &NumericPoint,
    tol: &Tolerances,
) -> Result<bool> {
    let q: Vec<_> = limit
        .squares()
        .iter()
        .map(|&v| rationalize(v, ROUNDING_DENOMINATOR))
        .collect();
    let rounded = ExactSquares::new(q.clone())?;
    if criterion_predicates(spec, target, &rounded)?.all_true() {
        return Ok(true);
    }
    let (projected, dist_sq) = project_onto_polytope(spec, component, &q)?;
    let projected = ExactSquares::new(projected)?;
    Ok(criterion_predicates(spec, target, &projected)?.all_true()
        && rat_to_f64(&dist_sq).sqrt() < tol.match_distance)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SampleKind {
    /// Uniform in the ball of radius `ensemble_radius`.
    Ensemble,
    /// On the minimizing manifold N of a component, near its critical set.
    NearMinimizing,
    /// Near a critical set, perturbed off N.
    Frontier,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurveyParams {
    pub points: usize,
    pub ensemble_radius: f64,
    pub near_per_component: usize,
    pub near_distance: f64,
    pub frontier_per_component: usize,
    pub frontier_distance: f64,
    pub flow: FlowParams,
}

impl SurveyParams {
    /// `points` ensemble trajectories, plus a fixed number of near-N and
    /// frontier samples per component when `points > 0`.
    pub fn with_points(points: usize) -> Self {
        let per = if points == 0 { 0 } else { 8 };
        SurveyParams {
            points,
            ensemble_radius: 5.0,
            near_per_component: per,
            near_distance: 1e-2,
            frontier_per_component: per,
            frontier_distance: 1e-2,
            flow: FlowParams::default(),
        }
    }
}

impl Default for SurveyParams {
    fn default() -> Self {
        SurveyParams::with_points(200)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub kind: SampleKind,
    pub sample: usize,
    /// The component the sample was drawn near (not set for the ensemble).
    pub origin: Option<RatVec>,
    pub result: FlowResult,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrataReport {
    /// Every enumerated critical value with its ensemble count and whether
    /// any trajectory of any kind landed there.
    pub strata: Vec<(RatVec, usize, bool)>,
    pub trajectories: Vec<TrajectoryRecord>,
    pub unmatched: usize,
    /// Frontier samples whose limit has a larger critical value of f than
    /// the component they started near.
    pub frontier_violations: usize,
    /// Frontier samples satisfying `f(α′) ≥ f(α) − slack`, with the total.
    pub frontier_upper_tally: (usize, usize),
    /// Near-N samples that did not return to their own component.
    pub near_mismatches: usize,
    pub all_monotone: bool,
    pub max_arg_drift: f64,
    pub properness_certified: bool,
    pub tolerances: Tolerances,
}

impl StrataReport {
    pub fn frontier_ok(&self) -> bool {
        self.frontier_violations == 0
    }

    pub fn passed(&self) -> bool {
        self.unmatched == 0 && self.frontier_ok() && self.near_mismatches == 0 && self.all_monotone
    }

    pub fn ensemble_count(&self, alpha: &RatVec) -> usize {
        self.strata
            .iter()
            .find(|(a, _, _)| a == alpha)
            .map_or(0, |(_, c, _)| *c)
    }
}

struct Job {
    kind: SampleKind,
    sample: usize,
    origin: Option<usize>,
}

/// Flows an ensemble plus near-N and frontier samples for every component,
/// tabulating the stratum of each limit.
pub fn survey_strata(
    spec: &ActionSpec,
    target: &RatVec,
    params: &SurveyParams,
    seed: u64,
) -> Result<StrataReport> {
    let components = enumerate_critical_components(spec, target)?;
    let n = spec.coordinate_count();
    let all: Vec<usize> = (0..n).collect();
    let tol = params.flow.tol;

    let mut jobs: Vec<Job> = (0..params.points)
        .map(|i| Job {
            kind: SampleKind::Ensemble,
            sample: i,
            origin: None,
        })
        .collect();
    for (ci, comp) in components.iter().enumerate() {
        for i in 0..params.near_per_component {
            jobs.push(Job {
                kind: SampleKind::NearMinimizing,
                sample: i,
                origin: Some(ci),
            });
        }
        if !comp.negative_coords.is_empty() {
            for i in 0..params.frontier_per_component {
                jobs.push(Job {
                    kind: SampleKind::Frontier,
                    sample: i,
                    origin: Some(ci),
                });
            }
        }
    }

    let records: Vec<TrajectoryRecord> = jobs
        .par_iter()
        .enumerate()
        .map(|(stream, job)| {
            let mut rng = stream_rng(seed, stream as u64);
            let z0 = match job.origin {
                None => NumericPoint::from_real(sample_in_coords(
                    n,
                    &all,
                    params.ensemble_radius,
                    &mut rng,
                )),
                Some(ci) => {
                    let c = &components[ci];
                    let base = sample_component_point(n, c, &mut rng);
                    let (coords, radius) = match job.kind {
                        SampleKind::NearMinimizing => (&c.minimizing_coords, params.near_distance),
                        _ => (&all, params.frontier_distance),
                    };
                    let mut dz = sample_in_coords(n, coords, radius, &mut rng);
                    if job.kind == SampleKind::Frontier {
                        // Ensure a nonzero component off N.
                        let off = sample_in_coords(n, &c.negative_coords, radius, &mut rng);
                        for (d, o) in dz.iter_mut().zip(off) {
                            if o != 0.0 {
                                *d = o;
                            }
                        }
                    }
                    NumericPoint::from_real(super::add_vectors(base.real(), &dz))
                }
            };
            let result = flow_against(spec, target, &components, &z0, &params.flow)?;
            Ok(TrajectoryRecord {
                kind: job.kind,
                sample: job.sample,
                origin: job.origin.map(|ci| components[ci].value.clone()),
                result,
            })
        })
        .collect::<Result<_>>()?;

    let f_of: BTreeMap<&RatVec, f64> = components
        .iter()
        .map(|c| (&c.value, rat_to_f64(&c.f_value)))
        .collect();
    let mut counts: BTreeMap<&RatVec, (usize, bool)> =
        components.iter().map(|c| (&c.value, (0, false))).collect();
    let mut unmatched = 0;
    let mut frontier_violations = 0;
    let mut frontier_upper = 0;
    let mut frontier_total = 0;
    let mut near_mismatches = 0;
    for rec in &records {
        let Some(alpha) = &rec.result.matched_component else {
            unmatched += 1;
            continue;
        };
        let entry = counts.get_mut(alpha).expect("matched against enumeration");
        entry.1 = true;
        match rec.kind {
            SampleKind::Ensemble => entry.0 += 1,
            SampleKind::NearMinimizing => {
                if rec.origin.as_ref() != Some(alpha) {
                    near_mismatches += 1;
                }
            }
            SampleKind::Frontier => {
                let origin = rec
                    .origin
                    .as_ref()
                    .expect("frontier samples have an origin");
                let (fa, fo) = (f_of[alpha], f_of[origin]);
                frontier_total += 1;
                if fa > fo + tol.frontier_slack {
                    frontier_violations += 1;
                }
                if fa >= fo - tol.frontier_slack {
                    frontier_upper += 1;
                }
            }
        }
    }

    Ok(StrataReport {
        strata: counts
            .into_iter()
            .map(|(a, (c, w))| (a.clone(), c, w))
            .collect(),
        unmatched,
        frontier_violations,
        frontier_upper_tally: (frontier_upper, frontier_total),
        near_mismatches,
        all_monotone: records.iter().all(|r| r.result.f_monotone),
        max_arg_drift: records
            .iter()
            .map(|r| r.result.max_arg_drift)
            .fold(0.0, f64::max),
        properness_certified: polarization_certificate(spec).is_some(),
        tolerances: tol,
        trajectories: records,
    })
}
