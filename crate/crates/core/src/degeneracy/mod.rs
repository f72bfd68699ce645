//! Double-precision certification of minimal degeneracy on concrete actions.
//!
//! The exact modules say where the critical components are and what their
//! indices and minimizing manifolds should be. This module checks those
//! claims against the function itself: analytic derivatives of
//! `f = ‖Φ − ξ‖²`, Hessian spectra on the components, the minimizing
//! property of `N`, fibrewise maximization along the negative directions,
//! and the negative gradient flow.
//!
//! All thresholds live in [`Tolerances`]; reports carry the values they used.

mod derivatives;
mod fibre;
mod flow;
mod hessian;
mod minimizing;
mod verify;

pub use derivatives::{f_value, grad_f, hess_f, NormSquare};
pub use fibre::{fibrewise_critical_locus, FibreGrid, FibreReport};
pub use flow::{
    criterion_crosscheck, flow_against, flow_trajectory, survey_strata, FlowParams, FlowResult,
    SampleKind, StrataReport, SurveyParams, TrajectoryRecord,
};
pub use hessian::{
    coordinate_basis, hessian_report, max_principal_angle, negative_eigenspace, HessianReport,
};
pub use minimizing::{
    local_coords_check, verify_minimizing, LocalCoordsParams, LocalCoordsReport, MinimizingReport,
};
pub use verify::{
    criterion_survey, sample_exact_point, verify_components, ComponentVerification, CriterionTally,
    VerificationReport, VerifyParams,
};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::critical::CriticalComponent;
use crate::exactlin::rat_to_f64;
use crate::weights::NumericPoint;

/// Numeric thresholds shared by every check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Eigenvalues with `|ev| ≤ zero_eigenvalue` count as zero.
    pub zero_eigenvalue: f64,
    /// Flow stops once `‖∇f‖` drops below this.
    pub flow_gradient: f64,
    /// `‖Φ(limit) − α‖` below this matches a flow limit to α.
    pub match_distance: f64,
    /// Newton steps shorter than this terminate the fibrewise iteration.
    pub newton_step: f64,
    /// Allowed per-step increase of f along a trajectory.
    pub monotone_slack: f64,
    /// Allowed drift of `arg z_j` along a trajectory.
    pub phase_drift: f64,
    /// Allowed principal angle between negative eigenspace and `E_α`.
    pub principal_angle: f64,
    /// Slack for comparing critical values of f in the frontier check.
    pub frontier_slack: f64,
    /// Allowed size of negative-direction coordinates on the fibrewise locus.
    pub fibre_locus: f64,
    /// `‖Φ(z) − α‖` below this accepts z as a point of the component.
    pub on_component: f64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    zero_eigenvalue: 1e-9,
    flow_gradient: 1e-8,
    match_distance: 1e-5,
    newton_step: 1e-10,
    monotone_slack: 1e-12,
    phase_drift: 1e-9,
    principal_angle: 1e-6,
    frontier_slack: 1e-9,
    fibre_locus: 1e-6,
    on_component: 1e-8,
};

impl Default for Tolerances {
    fn default() -> Self {
        TOLERANCES
    }
}

impl std::fmt::Display for Tolerances {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "zero_eigenvalue={:e} flow_gradient={:e} match={:e} newton={:e} monotone_slack={:e} \
             phase_drift={:e} principal_angle={:e} frontier_slack={:e} fibre_locus={:e} on_component={:e}",
            self.zero_eigenvalue,
            self.flow_gradient,
            self.match_distance,
            self.newton_step,
            self.monotone_slack,
            self.phase_drift,
            self.principal_angle,
            self.frontier_slack,
            self.fibre_locus,
            self.on_component,
        )
    }
}

/// Independent random stream `stream` derived from one 64-bit seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform sample from the ball of the given radius in the real span of the
/// listed complex coordinates, as a full-length real vector.
pub fn sample_in_coords<R: Rng>(
    n_coords: usize,
    coords: &[usize],
    radius: f64,
    rng: &mut R,
) -> Vec<f64> {
    let mut v = vec![0.0; 2 * n_coords];
    if coords.is_empty() || radius == 0.0 {
        return v;
    }
    let dim = 2 * coords.len();
    let mut norm = 0.0;
    for &j in coords {
        for a in 0..2 {
            let g: f64 = rng.sample(StandardNormal);
            v[2 * j + a] = g;
            norm += g * g;
        }
    }
    let norm = norm.sqrt();
    let u: f64 = rng.random();
    let scale = radius * u.powf(1.0 / dim as f64) / norm;
    for x in v.iter_mut() {
        *x *= scale;
    }
    v
}

/// Uniform sample from the sphere of the given radius in the span of the
/// listed coordinates.
pub fn sample_sphere_in_coords<R: Rng>(
    n_coords: usize,
    coords: &[usize],
    radius: f64,
    rng: &mut R,
) -> Vec<f64> {
    let mut v = vec![0.0; 2 * n_coords];
    if coords.is_empty() {
        return v;
    }
    let mut norm = 0.0;
    for &j in coords {
        for a in 0..2 {
            let g: f64 = rng.sample(StandardNormal);
            v[2 * j + a] = g;
            norm += g * g;
        }
    }
    let scale = radius / norm.sqrt();
    for x in v.iter_mut() {
        *x *= scale;
    }
    v
}

/// A random point of the component: a random convex combination of the
/// polytope points found during enumeration, lifted with random phases.
pub fn sample_component_point<R: Rng>(
    n_coords: usize,
    component: &CriticalComponent,
    rng: &mut R,
) -> NumericPoint {
    let points = &component.polytope_points;
    let mut weights: Vec<f64> = points.iter().map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    let mut q = vec![0.0; n_coords];
    for (p, w) in points.iter().zip(&weights) {
        for (qj, v) in q.iter_mut().zip(p.values()) {
            *qj += w * rat_to_f64(v);
        }
    }
    let phases: Vec<f64> = (0..n_coords)
        .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
        .collect();
    NumericPoint::from_squares(&q, &phases)
}

/// Real indices `2j, 2j+1` of the listed complex coordinates.
pub fn real_indices(coords: &[usize]) -> Vec<usize> {
    coords.iter().flat_map(|&j| [2 * j, 2 * j + 1]).collect()
}

pub(crate) fn add_vectors(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
