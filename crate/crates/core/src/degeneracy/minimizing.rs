use num_traits::{Signed, Zero};
use rand::Rng;
use rayon::prelude::*;

use super::hessian::{check_on_component, hessian_report};
use super::{
    add_vectors, norm, sample_component_point, sample_in_coords, sample_sphere_in_coords,
    stream_rng, NormSquare, Tolerances,
};
use crate::critical::{project_onto_polytope, CriticalComponent};
use crate::error::{Error, Result};
use crate::exactlin::{rat_to_f64, rationalize, Rat, RatVec};
use crate::weights::{momentum_value, ActionSpec, ExactSquares, NumericPoint};

/// Denominator for rounding sampled radial data to exact rationals.
const ROUNDING_DENOMINATOR: i64 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct MinimizingReport {
    pub samples: usize,
    /// Samples whose rounded radial data lies off the polytope `P_α`.
    pub off_component: usize,
    /// `min (f(z) − f(C))` in floating point over all samples.
    pub worst_float_margin: f64,
    /// `min (f(q) − f(C))` in exact arithmetic on the rounded samples.
    pub worst_exact_margin: Rat,
    /// Fitted `c = min (f − f(C)) / dist(q, P_α)²` over off-component
    /// samples; `None` when N has no directions at all (N = C = {0}).
    pub fitted_margin: Option<Rat>,
    /// The sample attaining the fitted margin.
    pub witness: NumericPoint,
    pub passed: bool,
}

struct SampleOutcome {
    z: NumericPoint,
    float_margin: f64,
    exact_margin: Rat,
    ratio: Option<Rat>,
}

/// Samples points of N within `radius` of the critical set and checks that
/// f stays above its critical value, with a quadratic margin off C.
pub fn verify_minimizing(
    spec: &ActionSpec,
    target: &RatVec,
    component: &CriticalComponent,
    radius: f64,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<MinimizingReport> {
    if radius.is_nan() || radius <= 0.0 || radius.is_infinite() {
        return Err(Error::InvalidParameter(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter(
            "at least one sample is required".into(),
        ));
    }
    let model = NormSquare::new(spec, target);
    let n = spec.coordinate_count();
    if component.minimizing_coords.is_empty() {
        return Ok(MinimizingReport {
            samples,
            off_component: 0,
            worst_float_margin: 0.0,
            worst_exact_margin: Rat::zero(),
            fitted_margin: None,
            witness: NumericPoint::zeros(n),
            passed: true,
        });
    }
    let f_c = rat_to_f64(&component.f_value);
    let slack = tol.monotone_slack * f_c.max(1.0);

    let outcomes: Vec<SampleOutcome> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let base = sample_component_point(n, component, &mut rng);
            let dz = sample_in_coords(n, &component.minimizing_coords, radius, &mut rng);
            let z = NumericPoint::from_real(add_vectors(base.real(), &dz));
            let float_margin = model.value(z.real()) - f_c;

            let q: Vec<Rat> = z
                .squares()
                .iter()
                .map(|&v| rationalize(v, ROUNDING_DENOMINATOR))
                .collect();
            let phi = momentum_value(spec, &ExactSquares::new(q.clone())?)?;
            let exact_margin = (&phi - target).norm_sq() - &component.f_value;
            let (_, dist_sq) = project_onto_polytope(spec, component, &q)?;
            let ratio = (!dist_sq.is_zero()).then(|| &exact_margin / &dist_sq);
            Ok(SampleOutcome {
                z,
                float_margin,
                exact_margin,
                ratio,
            })
        })
        .collect::<Result<_>>()?;

    let off_component = outcomes.iter().filter(|o| o.ratio.is_some()).count();
    if off_component == 0 {
        return Err(Error::NoOffComponentSamples);
    }
    let worst_float_margin = outcomes
        .iter()
        .map(|o| o.float_margin)
        .fold(f64::INFINITY, f64::min);
    let worst_exact_margin = outcomes
        .iter()
        .map(|o| o.exact_margin.clone())
        .min()
        .expect("samples > 0");
    let (fitted_margin, witness) = outcomes
        .iter()
        .filter_map(|o| o.ratio.as_ref().map(|r| (r, &o.z)))
        .min_by(|a, b| a.0.cmp(b.0))
        .map(|(r, z)| (Some(r.clone()), z.clone()))
        .expect("off-component samples exist");

    Ok(MinimizingReport {
        samples,
        off_component,
        passed: worst_float_margin >= -slack
            && !worst_exact_margin.is_negative()
            && fitted_margin.as_ref().is_some_and(|c| c.is_positive()),
        worst_float_margin,
        worst_exact_margin,
        fitted_margin,
        witness,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalCoordsParams {
    /// Radius of the N-direction samples.
    pub minimizing_radius: f64,
    /// Radius of the E-direction samples.
    pub negative_radius: f64,
    /// How far towards a random polytope point nearby C samples move.
    pub component_step: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for LocalCoordsParams {
    fn default() -> Self {
        LocalCoordsParams {
            minimizing_radius: 0.5,
            negative_radius: 0.5,
            component_step: 0.1,
            samples: 100,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalCoordsReport {
    /// Negative eigenvalue counts seen at the nearby C samples.
    pub indices_seen: Vec<usize>,
    pub index_constant: bool,
    pub minimizing: MinimizingReport,
    /// `min −(f(z+ζ) − f(z)) / ‖ζ‖²` over E-direction samples; `None` when
    /// E is trivial.
    pub negative_fit: Option<f64>,
    pub negative_ok: bool,
    pub passed: bool,
}

/// The three numeric signatures of the local normal form at `z ∈ C`:
/// constant index along C, growth along N, quadratic decay along E.
pub fn local_coords_check(
    spec: &ActionSpec,
    target: &RatVec,
    component: &CriticalComponent,
    z: &NumericPoint,
    params: &LocalCoordsParams,
    tol: &Tolerances,
) -> Result<LocalCoordsReport> {
    check_on_component(spec, target, component, z, tol)?;
    let n = spec.coordinate_count();
    let model = NormSquare::new(spec, target);

    // (a) index along nearby points of C: move the radial data a little
    // towards a random polytope point, keeping and jittering the phases.
    let q0 = z.squares();
    let mut indices_seen = Vec::with_capacity(params.samples);
    for i in 0..params.samples {
        let mut rng = stream_rng(params.seed, 3 * i as u64);
        let p = sample_component_point(n, component, &mut rng).squares();
        let s = params.component_step * rng.random::<f64>();
        let q: Vec<f64> = q0
            .iter()
            .zip(&p)
            .map(|(a, b)| (1.0 - s) * a + s * b)
            .collect();
        let phases: Vec<f64> = (0..n)
            .map(|j| {
                let (x, y) = z.coordinate(j);
                y.atan2(x) + 0.1 * (rng.random::<f64>() - 0.5)
            })
            .collect();
        let w = NumericPoint::from_squares(&q, &phases);
        indices_seen.push(hessian_report(spec, target, component, &w, tol)?.negative_count);
    }
    let index_constant = indices_seen.iter().all(|&k| k == component.index);

    // (b) growth along N.
    let minimizing = verify_minimizing(
        spec,
        target,
        component,
        params.minimizing_radius,
        params.samples,
        params.seed.wrapping_add(1),
        tol,
    )?;

    // (c) quadratic decay along E.
    let f0 = model.value(z.real());
    let mut negative_fit: Option<f64> = None;
    if !component.negative_coords.is_empty() {
        for i in 0..params.samples {
            let mut rng = stream_rng(params.seed, 3 * i as u64 + 2);
            let len = params.negative_radius * rng.random::<f64>();
            let zeta = sample_sphere_in_coords(n, &component.negative_coords, len, &mut rng);
            let nz = norm(&zeta);
            if nz == 0.0 {
                continue;
            }
            let drop = -(model.value(&add_vectors(z.real(), &zeta)) - f0) / (nz * nz);
            negative_fit = Some(negative_fit.map_or(drop, |c| c.min(drop)));
        }
    }
    let negative_ok = component.negative_coords.is_empty() || negative_fit.is_some_and(|c| c > 0.0);

    Ok(LocalCoordsReport {
        passed: index_constant && minimizing.passed && negative_ok,
        indices_seen,
        index_constant,
        minimizing,
        negative_fit,
        negative_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::enumerate_critical_components;
    use crate::degeneracy::TOLERANCES;

    fn c3() -> ActionSpec {
        ActionSpec::from_ints(2, &[(&[1, 0], 1), (&[0, 1], 1), (&[1, -1], 1)], &[-3, 1])
    }

    fn component(spec: &ActionSpec, target: &RatVec, alpha: &RatVec) -> CriticalComponent {
        enumerate_critical_components(spec, target)
            .unwrap()
            .into_iter()
            .find(|c| &c.value == alpha)
            .unwrap()
    }

    #[test]
    fn minimizing_examples_pass() {
        let spec = c3();
        let o = RatVec::from_ints(&[0, 0]);
        for alpha in [[0, 0], [-3, 1], [0, 1], [-1, -1]] {
            let c = component(&spec, &o, &RatVec::from_ints(&alpha));
            let r = verify_minimizing(&spec, &o, &c, 0.5, 200, 42, &TOLERANCES).unwrap();
            assert!(r.passed, "{alpha:?}: {r:?}");
        }
    }

    #[test]
    fn hand_expansion_at_shift() {
        // f(0,w,0) = 9 + (1 + |w|²/2)², so the margin is |w|²(1 + |w|²/4)
        // and the polytope distance is |w|²/2: c ≥ 2 exactly.
        let spec = c3();
        let o = RatVec::from_ints(&[0, 0]);
        let c = component(&spec, &o, &RatVec::from_ints(&[-3, 1]));
        let r = verify_minimizing(&spec, &o, &c, 0.5, 100, 5, &TOLERANCES).unwrap();
        assert!(r.fitted_margin.unwrap() >= crate::exactlin::rat(2));
        assert!(r.worst_float_margin >= 0.0);
    }

    #[test]
    fn zero_radius_is_rejected() {
        let spec = c3();
        let o = RatVec::from_ints(&[0, 0]);
        let c = component(&spec, &o, &RatVec::from_ints(&[0, 0]));
        assert!(matches!(
            verify_minimizing(&spec, &o, &c, 0.0, 10, 1, &TOLERANCES),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn local_coords_examples() {
        let spec = c3();
        let o = RatVec::from_ints(&[0, 0]);
        let c = component(&spec, &o, &RatVec::from_ints(&[0, 1]));
        let z = NumericPoint::from_squares(&[3.0, 0.0, 0.0], &[0.2, 0.0, 0.0]);
        let r = local_coords_check(
            &spec,
            &o,
            &c,
            &z,
            &LocalCoordsParams::default(),
            &TOLERANCES,
        )
        .unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.indices_seen.iter().all(|&k| k == 2));

        // f = (|z|²/2 − 1)² near the origin.
        let spec = ActionSpec::from_ints(1, &[(&[1], 1)], &[-1]);
        let o = RatVec::from_ints(&[0]);
        let c = component(&spec, &o, &RatVec::from_ints(&[-1]));
        assert_eq!(c.index, 2);
        let r = local_coords_check(
            &spec,
            &o,
            &c,
            &NumericPoint::zeros(1),
            &LocalCoordsParams::default(),
            &TOLERANCES,
        )
        .unwrap();
        assert!(r.passed, "{r:?}");
    }
}
