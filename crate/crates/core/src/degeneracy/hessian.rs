use nalgebra::{DMatrix, SymmetricEigen};

use super::{real_indices, NormSquare, Tolerances};
use crate::critical::CriticalComponent;
use crate::error::{Error, Result};
use crate::exactlin::RatVec;
use crate::weights::{ActionSpec, NumericPoint};

/// Spectral data of `Hess f` at a point of a critical component.
#[derive(Clone, Debug, PartialEq)]
pub struct HessianReport {
    pub point: NumericPoint,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub negative_count: usize,
    pub zero_count: usize,
    pub positive_count: usize,
    /// Predicted index λ of the component.
    pub expected_index: usize,
    /// Smallest eigenvalue of the Hessian restricted to `T N`.
    pub min_eigenvalue_on_n: f64,
    /// Largest eigenvalue of the Hessian restricted to `E`.
    pub max_eigenvalue_on_e: Option<f64>,
    pub restricted_psd_on_n: bool,
    pub negative_definite_on_e: bool,
    /// Distance of the smallest nonnegative eigenvalue from the largest
    /// negative one (`+∞` when one side is empty).
    pub spectral_gap: f64,
}

impl HessianReport {
    pub fn index_matches(&self) -> bool {
        self.negative_count == self.expected_index
    }
}

fn sorted_eigen(h: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    if h.nrows() == 0 {
        return (Vec::new(), h);
    }
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let n = eig.eigenvectors.nrows();
    let vectors = DMatrix::from_fn(n, order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

fn submatrix(h: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |a, b| h[(idx[a], idx[b])])
}

fn extreme_eigenvalues(h: &DMatrix<f64>) -> Option<(f64, f64)> {
    if h.nrows() == 0 {
        return None;
    }
    let ev = SymmetricEigen::new(h.clone()).eigenvalues;
    let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Some((lo, hi))
}

/// Rejects points that are not (numerically) on the component.
pub(crate) fn check_on_component(
    spec: &ActionSpec,
    target: &RatVec,
    component: &CriticalComponent,
    z: &NumericPoint,
    tol: &Tolerances,
) -> Result<()> {
    let model = NormSquare::new(spec, target);
    let phi = model.momentum(z.real(), &target.to_f64());
    let alpha = component.value.to_f64();
    let distance = phi
        .iter()
        .zip(&alpha)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let off_support = (0..spec.coordinate_count())
        .filter(|j| !component.zero_coords.contains(j))
        .map(|j| {
            let (x, y) = z.coordinate(j);
            x.hypot(y)
        })
        .fold(0.0, f64::max);
    if distance >= tol.on_component || off_support > tol.on_component {
        return Err(Error::NotOnComponent {
            distance: distance.max(off_support),
        });
    }
    Ok(())
}

pub fn hessian_report(
    spec: &ActionSpec,
    target: &RatVec,
    component: &CriticalComponent,
    z: &NumericPoint,
    tol: &Tolerances,
) -> Result<HessianReport> {
    check_on_component(spec, target, component, z, tol)?;
    let h = NormSquare::new(spec, target).hessian(z.real());
    let (eigenvalues, _) = sorted_eigen(h.clone());
    let tau = tol.zero_eigenvalue;
    let negative_count = eigenvalues.iter().filter(|&&e| e < -tau).count();
    let positive_count = eigenvalues.iter().filter(|&&e| e > tau).count();
    let zero_count = eigenvalues.len() - negative_count - positive_count;

    let n_idx = real_indices(&component.minimizing_coords);
    let e_idx = real_indices(&component.negative_coords);
    let min_eigenvalue_on_n =
        extreme_eigenvalues(&submatrix(&h, &n_idx)).map_or(f64::INFINITY, |(lo, _)| lo);
    let max_eigenvalue_on_e = extreme_eigenvalues(&submatrix(&h, &e_idx)).map(|(_, hi)| hi);

    let spectral_gap = if negative_count == 0 || negative_count == eigenvalues.len() {
        f64::INFINITY
    } else {
        eigenvalues[negative_count] - eigenvalues[negative_count - 1]
    };

    Ok(HessianReport {
        point: z.clone(),
        negative_count,
        zero_count,
        positive_count,
        expected_index: component.index,
        restricted_psd_on_n: min_eigenvalue_on_n > -tau,
        negative_definite_on_e: max_eigenvalue_on_e.is_none_or(|hi| hi < -tau),
        min_eigenvalue_on_n,
        max_eigenvalue_on_e,
        spectral_gap,
        eigenvalues,
    })
}

/// Orthonormal basis (as columns) of the span of eigenvectors for the `k`
/// most negative eigenvalues of `Hess f` at `z`.
pub fn negative_eigenspace(
    spec: &ActionSpec,
    target: &RatVec,
    z: &NumericPoint,
    k: usize,
    tol: &Tolerances,
) -> Result<DMatrix<f64>> {
    let h = NormSquare::new(spec, target).hessian(z.real());
    let dim = h.nrows();
    if k > dim {
        return Err(Error::InvalidParameter(format!(
            "k = {k} exceeds dimension {dim}"
        )));
    }
    let (values, vectors) = sorted_eigen(h);
    if k > 0 && k < dim {
        let gap = values[k] - values[k - 1];
        if gap <= tol.zero_eigenvalue {
            return Err(Error::SpectralGap {
                k,
                gap,
                threshold: tol.zero_eigenvalue,
            });
        }
    }
    Ok(vectors.columns(0, k).into_owned())
}

/// Columns `e_{2j}, e_{2j+1}` for the listed complex coordinates.
pub fn coordinate_basis(n_coords: usize, coords: &[usize]) -> DMatrix<f64> {
    let idx = real_indices(coords);
    DMatrix::from_fn(
        2 * n_coords,
        idx.len(),
        |r, c| if r == idx[c] { 1.0 } else { 0.0 },
    )
}

/// Largest principal angle between the column spans of two orthonormal
/// bases of equal size, computed from the sine side for accuracy at small
/// angles. Unequal sizes give `π/2`.
pub fn max_principal_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.ncols() != b.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let residual = a - b * (b.transpose() * a);
    let sigma = residual
        .singular_values()
        .iter()
        .copied()
        .fold(0.0f64, f64::max);
    sigma.min(1.0).asin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::enumerate_critical_components;
    use crate::degeneracy::TOLERANCES;

    fn c3() -> ActionSpec {
        ActionSpec::from_ints(2, &[(&[1, 0], 1), (&[0, 1], 1), (&[1, -1], 1)], &[-3, 1])
    }

    fn component(spec: &ActionSpec, alpha: &[i64]) -> CriticalComponent {
        enumerate_critical_components(spec, &RatVec::from_ints(&[0, 0]))
            .unwrap()
            .into_iter()
            .find(|c| c.value == RatVec::from_ints(alpha))
            .unwrap()
    }

    #[test]
    fn index_examples() {
        let spec = c3();
        let o = RatVec::from_ints(&[0, 0]);
        let z = NumericPoint::from_squares(&[0.0, 0.0, 2.0], &[0.0, 0.0, 0.7]);
        let r = hessian_report(&spec, &o, &component(&spec, &[-1, -1]), &z, &TOLERANCES).unwrap();
        assert_eq!(r.negative_count, 4);
        assert!(r.restricted_psd_on_n && r.negative_definite_on_e);

        let z = NumericPoint::from_squares(&[1.5, 0.5, 1.5], &[0.1, 0.2, 0.3]);
        let r = hessian_report(&spec, &o, &component(&spec, &[0, 0]), &z, &TOLERANCES).unwrap();
        assert_eq!(r.negative_count, 0);

        let z = NumericPoint::from_squares(&[3.0, 0.0, 0.0], &[2.0, 0.0, 0.0]);
        let r = hessian_report(&spec, &o, &component(&spec, &[0, 1]), &z, &TOLERANCES).unwrap();
        assert_eq!(r.negative_count, 2);
        assert!(r.index_matches());
    }

    #[test]
    fn off_component_point_is_rejected() {
        let spec = c3();
        let o = RatVec::from_ints(&[0, 0]);
        let z = NumericPoint::from_squares(&[1.0, 0.0, 0.0], &[0.0; 3]);
        assert!(matches!(
            hessian_report(&spec, &o, &component(&spec, &[0, 1]), &z, &TOLERANCES),
            Err(Error::NotOnComponent { .. })
        ));
    }

    #[test]
    fn eigenspace_examples() {
        let spec = c3();
        let o = RatVec::from_ints(&[0, 0]);
        let z = NumericPoint::from_squares(&[3.0, 0.0, 0.0], &[0.4, 0.0, 0.0]);
        let basis = negative_eigenspace(&spec, &o, &z, 2, &TOLERANCES).unwrap();
        let e = coordinate_basis(3, &[2]);
        assert!(max_principal_angle(&basis, &e) < 1e-6);

        let z = NumericPoint::from_squares(&[0.0, 0.0, 2.0], &[0.0, 0.0, 1.0]);
        let basis = negative_eigenspace(&spec, &o, &z, 4, &TOLERANCES).unwrap();
        assert!(max_principal_angle(&basis, &coordinate_basis(3, &[0, 1])) < 1e-6);

        let positive = ActionSpec::from_ints(2, &[(&[1, 0], 1), (&[0, 1], 1)], &[1, 1]);
        let basis =
            negative_eigenspace(&positive, &o, &NumericPoint::zeros(2), 0, &TOLERANCES).unwrap();
        assert_eq!(basis.ncols(), 0);
    }

    #[test]
    fn eigenspace_reports_small_gap() {
        let spec = c3();
        let o = RatVec::from_ints(&[0, 0]);
        // At the origin the spectrum is (−8,−8,−6,−6,2,2): splitting a pair fails.
        let err =
            negative_eigenspace(&spec, &o, &NumericPoint::zeros(3), 1, &TOLERANCES).unwrap_err();
        assert!(matches!(err, Error::SpectralGap { k: 1, .. }));
    }

    #[test]
    fn principal_angle_of_rotated_plane() {
        let a = coordinate_basis(2, &[0]);
        let t: f64 = 1e-3;
        let mut b = DMatrix::zeros(4, 2);
        b[(0, 0)] = t.cos();
        b[(2, 0)] = t.sin();
        b[(1, 1)] = 1.0;
        assert!((max_principal_angle(&b, &a) - t).abs() < 1e-12);
    }
}
