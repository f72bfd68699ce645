use nalgebra::DMatrix;

use crate::exactlin::RatVec;
use crate::weights::{ActionSpec, NumericPoint};

/// `f(z) = ‖Φ(z) − ξ‖²` in double precision, with the weight data unpacked
/// once per coordinate.
#[derive(Clone, Debug)]
pub struct NormSquare {
    /// Weight of every expanded coordinate.
    coord_weights: Vec<Vec<f64>>,
    /// `β − ξ`.
    offset: Vec<f64>,
}

impl NormSquare {
    pub fn new(spec: &ActionSpec, target: &RatVec) -> Self {
        let coord_weights = (0..spec.coordinate_count())
            .map(|j| spec.weight(spec.coordinate_weight(j)).to_f64())
            .collect();
        let offset = (spec.shift() - target).to_f64();
        NormSquare {
            coord_weights,
            offset,
        }
    }

    pub fn coordinate_count(&self) -> usize {
        self.coord_weights.len()
    }

    pub fn dimension(&self) -> usize {
        2 * self.coord_weights.len()
    }

    /// `Φ(z) − ξ` at interleaved real coordinates `y`.
    pub fn residual(&self, y: &[f64]) -> Vec<f64> {
        let mut acc = self.offset.clone();
        for (j, mu) in self.coord_weights.iter().enumerate() {
            let q = 0.5 * (y[2 * j] * y[2 * j] + y[2 * j + 1] * y[2 * j + 1]);
            for (a, m) in acc.iter_mut().zip(mu) {
                *a += q * m;
            }
        }
        acc
    }

    /// `Φ(z)` given `ξ`.
    pub fn momentum(&self, y: &[f64], target: &[f64]) -> Vec<f64> {
        self.residual(y)
            .iter()
            .zip(target)
            .map(|(a, b)| a + b)
            .collect()
    }

    pub fn value(&self, y: &[f64]) -> f64 {
        self.residual(y).iter().map(|x| x * x).sum()
    }

    /// `⟨Φ(z) − ξ, μ_(j)⟩` for every coordinate.
    fn pairings(&self, residual: &[f64]) -> Vec<f64> {
        self.coord_weights
            .iter()
            .map(|mu| mu.iter().zip(residual).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn gradient(&self, y: &[f64]) -> Vec<f64> {
        let p = self.pairings(&self.residual(y));
        let mut g = vec![0.0; y.len()];
        for (j, pj) in p.iter().enumerate() {
            g[2 * j] = 2.0 * pj * y[2 * j];
            g[2 * j + 1] = 2.0 * pj * y[2 * j + 1];
        }
        g
    }

    /// Entry `((j,a),(k,b)) = 2⟨Φ−ξ, μ_j⟩ δ_jk δ_ab + 2⟨μ_j, μ_k⟩ w_ja w_kb`.
    pub fn hessian(&self, y: &[f64]) -> DMatrix<f64> {
        let n = self.coordinate_count();
        let p = self.pairings(&self.residual(y));
        let mut h = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            for k in j..n {
                let g: f64 = self.coord_weights[j]
                    .iter()
                    .zip(&self.coord_weights[k])
                    .map(|(a, b)| a * b)
                    .sum();
                for a in 0..2 {
                    for b in 0..2 {
                        let v = 2.0 * g * y[2 * j + a] * y[2 * k + b];
                        h[(2 * j + a, 2 * k + b)] = v;
                        h[(2 * k + b, 2 * j + a)] = v;
                    }
                }
            }
            for a in 0..2 {
                h[(2 * j + a, 2 * j + a)] += 2.0 * p[j];
            }
        }
        h
    }
}

pub fn f_value(spec: &ActionSpec, target: &RatVec, z: &NumericPoint) -> f64 {
    NormSquare::new(spec, target).value(z.real())
}

pub fn grad_f(spec: &ActionSpec, target: &RatVec, z: &NumericPoint) -> Vec<f64> {
    NormSquare::new(spec, target).gradient(z.real())
}

pub fn hess_f(spec: &ActionSpec, target: &RatVec, z: &NumericPoint) -> DMatrix<f64> {
    NormSquare::new(spec, target).hessian(z.real())
}
