use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{
    real_indices, sample_component_point, sample_sphere_in_coords, stream_rng, NormSquare,
    Tolerances,
};
use crate::critical::CriticalComponent;
use crate::error::{Error, Result};
use crate::exactlin::RatVec;
use crate::weights::ActionSpec;

const MAX_NEWTON_ITERATIONS: usize = 50;

/// A `size × size` grid of base points `c + s·u + t·v` with `s, t` evenly
/// spaced in `[−half_width, half_width]`, `c` a random point of C and `u, v`
/// random unit directions in N. Each fibre starts `start_offset` away from
/// the base point along a random unit direction in E.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FibreGrid {
    pub size: usize,
    pub half_width: f64,
    pub start_offset: f64,
    pub seed: u64,
}

impl Default for FibreGrid {
    fn default() -> Self {
        FibreGrid {
            size: 10,
            half_width: 0.05,
            start_offset: 0.1,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FibreReport {
    pub fibres: usize,
    /// Largest `‖ζ*‖` over all fibrewise maximizers.
    pub max_locus_norm: f64,
    pub max_iterations: usize,
    /// Smallest `|det H_EE|` over the C samples.
    pub min_abs_det: f64,
    pub c_samples: usize,
    pub locus_ok: bool,
    pub nondegenerate: bool,
}

impl FibreReport {
    pub fn passed(&self) -> bool {
        self.locus_ok && self.nondegenerate
    }
}

/// Hessian block and gradient of f in the E directions at `y`.
fn fibre_derivatives(model: &NormSquare, y: &[f64], idx: &[usize]) -> (DMatrix<f64>, DVector<f64>) {
    let h = model.hessian(y);
    let g = model.gradient(y);
    (
        DMatrix::from_fn(idx.len(), idx.len(), |a, b| h[(idx[a], idx[b])]),
        DVector::from_fn(idx.len(), |a, _| g[idx[a]]),
    )
}

/// Newton maximization of f over the fibre through `base`; returns the
/// maximizer's E coordinates and the number of iterations.
fn maximize_on_fibre(
    model: &NormSquare,
    base: &[f64],
    start: &[f64],
    idx: &[usize],
    fibre: usize,
    tol: &Tolerances,
) -> Result<(DVector<f64>, usize)> {
    let mut y = base.to_vec();
    for (a, &i) in idx.iter().enumerate() {
        y[i] = start[a];
    }
    for it in 0..=MAX_NEWTON_ITERATIONS {
        let (h, g) = fibre_derivatives(model, &y, idx);
        let Some(chol) = (-h).cholesky() else {
            return Err(Error::NewtonNonConvergence {
                fibre,
                iterations: it,
                reason: "fibre Hessian is not negative definite".into(),
            });
        };
        // Newton step for the maximum: Δ = (−H)⁻¹ g.
        let step = chol.solve(&g);
        let len = step.norm();
        if !len.is_finite() {
            break;
        }
        for (a, &i) in idx.iter().enumerate() {
            y[i] += step[a];
        }
        if len < tol.newton_step {
            let zeta = DVector::from_fn(idx.len(), |a, _| y[idx[a]]);
            return Ok((zeta, it));
        }
    }
    Err(Error::NewtonNonConvergence {
        fibre,
        iterations: MAX_NEWTON_ITERATIONS,
        reason: "step did not fall below the Newton tolerance".into(),
    })
}

/// Maximizes f along E-coordinate fibres over a grid of base points on N
/// near C, checking the maximizers lie on N and the fibre Hessian is
/// nondegenerate on C.
pub fn fibrewise_critical_locus(
    spec: &ActionSpec,
    target: &RatVec,
    component: &CriticalComponent,
    grid: &FibreGrid,
    tol: &Tolerances,
) -> Result<FibreReport> {
    let n = spec.coordinate_count();
    let idx = real_indices(&component.negative_coords);
    let model = NormSquare::new(spec, target);
    let mut rng = stream_rng(grid.seed, 0);
    let centre = sample_component_point(n, component, &mut rng);
    let u = sample_sphere_in_coords(n, &component.minimizing_coords, 1.0, &mut rng);
    let v = sample_sphere_in_coords(n, &component.minimizing_coords, 1.0, &mut rng);
    let start_full =
        sample_sphere_in_coords(n, &component.negative_coords, grid.start_offset, &mut rng);
    let start: Vec<f64> = idx.iter().map(|&i| start_full[i]).collect();

    let size = grid.size.max(1);
    let coord = |k: usize| {
        if size == 1 {
            0.0
        } else {
            grid.half_width * (2.0 * k as f64 / (size - 1) as f64 - 1.0)
        }
    };

    let fibres: Vec<(f64, usize)> = (0..size * size)
        .into_par_iter()
        .map(|k| {
            let (s, t) = (coord(k / size), coord(k % size));
            let base: Vec<f64> = centre
                .real()
                .iter()
                .zip(u.iter().zip(&v))
                .map(|(c, (a, b))| c + s * a + t * b)
                .collect();
            if idx.is_empty() {
                return Ok((0.0, 0));
            }
            let (zeta, it) = maximize_on_fibre(&model, &base, &start, &idx, k, tol)?;
            Ok((zeta.norm(), it))
        })
        .collect::<Result<_>>()?;

    let c_samples = size;
    let mut min_abs_det = f64::INFINITY;
    for i in 0..c_samples {
        let mut rng = stream_rng(grid.seed, 1 + i as u64);
        let point = sample_component_point(n, component, &mut rng);
        let (h, _) = fibre_derivatives(&model, point.real(), &idx);
        min_abs_det = min_abs_det.min(h.determinant().abs());
    }

    let max_locus_norm = fibres.iter().map(|f| f.0).fold(0.0, f64::max);
    Ok(FibreReport {
        fibres: fibres.len(),
        max_locus_norm,
        max_iterations: fibres.iter().map(|f| f.1).max().unwrap_or(0),
        min_abs_det,
        c_samples,
        locus_ok: max_locus_norm < tol.fibre_locus,
        nondegenerate: min_abs_det > tol.zero_eigenvalue,
    })
}
