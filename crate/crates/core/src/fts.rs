//! Functional observations in an orthonormalized basis.
//!
//! Curves sampled on a grid are projected by least squares onto a basis and
//! then mapped through the orthonormalizer `R` (with `RᵀGR = I` for the basis
//! Gram matrix `G`). Every later stage works in these coordinates, where the
//! Hilbert–Schmidt inner product of operators is the plain Frobenius one.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Kind of basis used to represent curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisKind {
    /// Trigonometric basis; `constant` selects whether the constant function
    /// leads the `sin, cos` harmonic pairs.
    Fourier { constant: bool },
    /// Cubic B-splines on equispaced knots.
    BSpline,
    /// The sampling grid itself, one cell per basis element.
    RawGrid,
}

/// A basis on a closed interval together with its Gram matrix and
/// orthonormalizer.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpec {
    kind: BasisKind,
    dim: usize,
    domain: (f64, f64),
    gram: DMatrix<f64>,
    orthonormalizer: DMatrix<f64>,
    // Lᵀ from G = L Lᵀ; maps raw coefficients to orthonormal ones.
    to_orthonormal: DMatrix<f64>,
    knots: Vec<f64>,
}

const GAUSS_LEGENDRE_4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

impl BasisSpec {
    /// Fourier basis on `[0, 1]` with the constant function first.
    pub fn fourier(dim: usize) -> Result<Self> {
        Self::build(BasisKind::Fourier { constant: true }, dim, (0.0, 1.0))
    }

    /// Fourier harmonics `√2 sin(2πjτ), √2 cos(2πjτ), j = 1, 2, …` without the
    /// constant term.
    pub fn fourier_harmonics(dim: usize) -> Result<Self> {
        Self::build(BasisKind::Fourier { constant: false }, dim, (0.0, 1.0))
    }

    /// Cubic B-spline basis on `[0, 1]` with `dim - 2` equispaced knots
    /// (boundary knots included).
    pub fn bspline(dim: usize) -> Result<Self> {
        Self::build(BasisKind::BSpline, dim, (0.0, 1.0))
    }

    /// Raw-grid basis with `dim` equispaced cells on `[0, 1]`.
    pub fn raw_grid(dim: usize) -> Result<Self> {
        Self::build(BasisKind::RawGrid, dim, (0.0, 1.0))
    }

    /// Rebuilds the basis on another interval.
    pub fn on_domain(&self, lo: f64, hi: f64) -> Result<Self> {
        Self::build(self.kind, self.dim, (lo, hi))
    }

    pub fn build(kind: BasisKind, dim: usize, domain: (f64, f64)) -> Result<Self> {
        let (lo, hi) = domain;
        if dim == 0 {
            return Err(Error::InvalidInput("basis dimension must be positive".into()));
        }
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::InvalidInput("basis domain must be a proper interval".into()));
        }
        let len = hi - lo;
        let mut knots = Vec::new();
        let gram = match kind {
            BasisKind::Fourier { .. } => DMatrix::identity(dim, dim),
            BasisKind::RawGrid => DMatrix::identity(dim, dim) * (len / dim as f64),
            BasisKind::BSpline => {
                if dim < 4 {
                    return Err(Error::InvalidInput("cubic B-splines need dim >= 4".into()));
                }
                let n_breaks = dim - 2;
                let breaks: Vec<f64> = (0..n_breaks)
                    .map(|i| lo + len * i as f64 / (n_breaks - 1) as f64)
                    .collect();
                knots.extend([lo; 3]);
                knots.extend(breaks.iter().copied());
                knots.extend([hi; 3]);
                bspline_gram(&knots, dim, &breaks)
            }
        };
        let chol = nalgebra::Cholesky::new(gram.clone())
            .ok_or_else(|| Error::Numerical("Gram matrix is not positive definite".into()))?;
        let lower = chol.l();
        let to_orthonormal = lower.transpose();
        let orthonormalizer = to_orthonormal
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("Gram factor is singular".into()))?;
        let spec = BasisSpec { kind, dim, domain, gram, orthonormalizer, to_orthonormal, knots };
        if spec.orthonormality_defect() > 1e-10 {
            return Err(Error::Numerical("orthonormalizer does not whiten the Gram matrix".into()));
        }
        Ok(spec)
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn orthonormalizer(&self) -> &DMatrix<f64> {
        &self.orthonormalizer
    }

    /// Largest entry of `|RᵀGR - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let r = &self.orthonormalizer;
        let m = r.transpose() * &self.gram * r;
        let id = DMatrix::<f64>::identity(self.dim, self.dim);
        (m - id).amax()
    }

    /// Equispaced midpoint grid of `n` points on the domain.
    pub fn midpoint_grid(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = self.domain;
        (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect()
    }

    /// Values of the (raw, non-orthonormalized) basis functions at `x`.
    pub fn evaluate(&self, x: f64) -> Vec<f64> {
        let (lo, hi) = self.domain;
        let len = hi - lo;
        match self.kind {
            BasisKind::Fourier { constant } => {
                let u = (x - lo) / len;
                let amp = libm::sqrt(2.0 / len);
                let mut out = Vec::with_capacity(self.dim);
                if constant {
                    out.push(1.0 / libm::sqrt(len));
                }
                let mut j = 1;
                while out.len() < self.dim {
                    let arg = 2.0 * PI * j as f64 * u;
                    out.push(amp * libm::sin(arg));
                    if out.len() < self.dim {
                        out.push(amp * libm::cos(arg));
                    }
                    j += 1;
                }
                out
            }
            BasisKind::RawGrid => {
                let mut out = alloc::vec![0.0; self.dim];
                let cell = libm::floor((x - lo) / len * self.dim as f64);
                let idx = (cell.max(0.0) as usize).min(self.dim - 1);
                out[idx] = 1.0;
                out
            }
            BasisKind::BSpline => bspline_values(&self.knots, self.dim, x),
        }
    }

    /// Design matrix (grid points × basis functions).
    pub fn design(&self, grid: &[f64]) -> DMatrix<f64> {
        if self.kind == BasisKind::RawGrid && grid.len() == self.dim {
            return DMatrix::identity(self.dim, self.dim);
        }
        let mut m = DMatrix::zeros(grid.len(), self.dim);
        for (g, &x) in grid.iter().enumerate() {
            for (j, v) in self.evaluate(x).into_iter().enumerate() {
                m[(g, j)] = v;
            }
        }
        m
    }

    /// Orthonormal basis functions evaluated on `grid` (grid points × dim).
    pub fn orthonormal_design(&self, grid: &[f64]) -> DMatrix<f64> {
        self.design(grid) * &self.orthonormalizer
    }

    /// Least-squares operator mapping grid samples to orthonormal coordinates
    /// (dim × grid points).
    pub fn projector_on(&self, grid: &[f64]) -> Result<DMatrix<f64>> {
        if grid.len() < self.dim {
            return Err(Error::BasisNotIdentifiable);
        }
        if self.kind == BasisKind::RawGrid && grid.len() != self.dim {
            return Err(Error::BasisNotIdentifiable);
        }
        let design = self.design(grid);
        let svd = design.svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smax > 0.0) || smin <= 1e-10 * smax {
            return Err(Error::BasisNotIdentifiable);
        }
        let pinv = svd
            .pseudo_inverse(0.0)
            .map_err(|e| Error::Numerical(e.into()))?;
        Ok(&self.to_orthonormal * pinv)
    }
}

fn bspline_values(knots: &[f64], dim: usize, x: f64) -> Vec<f64> {
    // Cox–de Boor recursion for order 4 over the full knot vector.
    let order = 4;
    let lo = knots[0];
    let hi = knots[knots.len() - 1];
    let x = x.clamp(lo, hi);
    let n_spans = knots.len() - 1;
    let mut basis = alloc::vec![0.0; n_spans];
    for i in 0..n_spans {
        let (a, b) = (knots[i], knots[i + 1]);
        let inside = if b >= hi { x >= a && x <= b && a < b } else { x >= a && x < b };
        if inside {
            basis[i] = 1.0;
        }
    }
    for p in 1..order {
        for i in 0..(n_spans - p) {
            let mut v = 0.0;
            let d1 = knots[i + p] - knots[i];
            if d1 > 0.0 {
                v += (x - knots[i]) / d1 * basis[i];
            }
            let d2 = knots[i + p + 1] - knots[i + 1];
            if d2 > 0.0 {
                v += (knots[i + p + 1] - x) / d2 * basis[i + 1];
            }
            basis[i] = v;
        }
    }
    basis.truncate(dim);
    basis
}

fn bspline_gram(knots: &[f64], dim: usize, breaks: &[f64]) -> DMatrix<f64> {
    let mut gram = DMatrix::zeros(dim, dim);
    for span in breaks.windows(2) {
        let (a, b) = (span[0], span[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for &(node, weight) in GAUSS_LEGENDRE_4.iter() {
            let vals = bspline_values(knots, dim, mid + half * node);
            for i in 0..dim {
                if vals[i] == 0.0 {
                    continue;
                }
                for j in 0..dim {
                    gram[(i, j)] += weight * half * vals[i] * vals[j];
                }
            }
        }
    }
    gram
}

/// A functional time series stored as a `T × d` matrix of orthonormal-basis
/// coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSeries {
    coeffs: DMatrix<f64>,
    basis: BasisSpec,
    centered: bool,
}

impl FunctionalSeries {
    pub fn new(coeffs: DMatrix<f64>, basis: BasisSpec) -> Result<Self> {
        if coeffs.nrows() < 2 {
            return Err(Error::InvalidInput("a functional series needs T >= 2".into()));
        }
        if coeffs.ncols() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), found: coeffs.ncols() });
        }
        if coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("series contains non-finite values".into()));
        }
        Ok(FunctionalSeries { coeffs, basis, centered: false })
    }

    /// Number of time points `T`.
    pub fn len(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.coeffs.ncols()
    }

    pub fn coeffs(&self) -> &DMatrix<f64> {
        &self.coeffs
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    /// Multiplies every curve by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        FunctionalSeries { coeffs: &self.coeffs * c, basis: self.basis.clone(), centered: self.centered }
    }

    /// The first `len` observations.
    pub fn prefix(&self, len: usize) -> Result<Self> {
        if len < 2 || len > self.len() {
            return Err(Error::InvalidInput("prefix length out of range".into()));
        }
        let coeffs = self.coeffs.rows(0, len).into_owned();
        Ok(FunctionalSeries { coeffs, basis: self.basis.clone(), centered: false })
    }

    /// Coefficients in time-major order (`T·d` values, row `t` contiguous).
    pub fn time_major(&self) -> Vec<f64> {
        let (t, d) = self.coeffs.shape();
        let mut out = Vec::with_capacity(t * d);
        for i in 0..t {
            for j in 0..d {
                out.push(self.coeffs[(i, j)]);
            }
        }
        out
    }
}

/// Summary of a grid-to-basis projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionReport {
    /// `‖raw − reconstruction‖_F / ‖raw‖_F` over all samples.
    pub relative_residual: f64,
    /// Fraction of the sampled energy kept by the projection.
    pub captured_fraction: f64,
}

/// Projects curves sampled on `grid` (rows = time, columns = grid points) onto
/// `basis` and returns orthonormal coordinates.
pub fn project_to_basis(
    raw: &DMatrix<f64>,
    grid: &[f64],
    basis: &BasisSpec,
) -> Result<(FunctionalSeries, ProjectionReport)> {
    if raw.ncols() != grid.len() {
        return Err(Error::DimensionMismatch { expected: grid.len(), found: raw.ncols() });
    }
    if raw.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("raw samples contain non-finite values".into()));
    }
    let projector = basis.projector_on(grid)?;
    let coeffs = raw * projector.transpose();
    let series = FunctionalSeries::new(coeffs, basis.clone())?;
    let recon = reconstruct(&series, grid);
    let total = raw.norm_squared();
    let report = if total > 0.0 {
        ProjectionReport {
            relative_residual: libm::sqrt((raw - &recon).norm_squared() / total),
            captured_fraction: recon.norm_squared() / total,
        }
    } else {
        ProjectionReport { relative_residual: 0.0, captured_fraction: 1.0 }
    };
    Ok((series, report))
}

/// Evaluates the curves of `series` on `grid`.
pub fn reconstruct(series: &FunctionalSeries, grid: &[f64]) -> DMatrix<f64> {
    let phi = series.basis.orthonormal_design(grid);
    &series.coeffs * phi.transpose()
}

/// Subtracts the column means. Idempotent up to rounding.
pub fn center(series: &FunctionalSeries) -> FunctionalSeries {
    let mut coeffs = series.coeffs.clone();
    let t = coeffs.nrows() as f64;
    for mut col in coeffs.column_iter_mut() {
        let mean = col.iter().sum::<f64>() / t;
        for v in col.iter_mut() {
            *v -= mean;
        }
    }
    FunctionalSeries { coeffs, basis: series.basis.clone(), centered: true }
}

/// A `d × d` complex operator in orthonormal coordinates at frequency `freq`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub entries: DMatrix<Complex64>,
    pub freq: f64,
}

impl OperatorMatrix {
    pub fn new(entries: DMatrix<Complex64>, freq: f64) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch { expected: entries.nrows(), found: entries.ncols() });
        }
        Ok(OperatorMatrix { entries, freq })
    }

    pub fn from_real(entries: &DMatrix<f64>, freq: f64) -> Result<Self> {
        Self::new(entries.map(|v| Complex64::new(v, 0.0)), freq)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `‖A − A†‖_F`.
    pub fn hermitian_defect(&self) -> f64 {
        let a = &self.entries;
        let d = a.nrows();
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += (a[(i, j)] - a[(j, i)].conj()).norm_sqr();
            }
        }
        libm::sqrt(s)
    }

    /// `‖A − A†‖_F ≤ tol · (1 + ‖A‖_F)`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol * (1.0 + libm::sqrt(self.hs_norm_sq()))
    }

    /// `(A + A†) / 2`.
    pub fn hermitianized(&self) -> OperatorMatrix {
        let a = &self.entries;
        let sym = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
        OperatorMatrix { entries: sym, freq: self.freq }
    }

    pub fn hs_norm_sq(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.diagonal().iter().sum()
    }
}

/// `Σ_ij A_ij · conj(B_ij)`.
pub fn hs_inner(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<Complex64> {
    if a.entries.shape() != b.entries.shape() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(a.entries.iter().zip(b.entries.iter()).map(|(x, y)| x * y.conj()).sum())
}

pub fn hs_norm_sq(a: &OperatorMatrix) -> f64 {
    a.hs_norm_sq()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_complex(rng: &mut ChaCha8Rng, d: usize) -> OperatorMatrix {
        let m = DMatrix::from_fn(d, d, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        OperatorMatrix::new(m, 0.3).unwrap()
    }

    #[test]
    fn orthonormalizers_whiten_every_basis() {
        for basis in [
            BasisSpec::fourier(21).unwrap(),
            BasisSpec::fourier_harmonics(4).unwrap(),
            BasisSpec::bspline(12).unwrap(),
            BasisSpec::raw_grid(16).unwrap(),
            BasisSpec::bspline(8).unwrap().on_domain(-2.0, 3.0).unwrap(),
        ] {
            assert!(basis.orthonormality_defect() < 1e-10, "{:?}", basis.kind());
        }
    }

    #[test]
    fn bspline_gram_matches_fine_quadrature() {
        let basis = BasisSpec::bspline(9).unwrap();
        let n = 20_000;
        let grid = basis.midpoint_grid(n);
        let phi = basis.design(&grid);
        let approx = phi.transpose() * &phi / n as f64;
        assert!((approx - basis.gram()).amax() < 1e-6);
        // partition of unity
        for x in [0.0, 0.13, 0.5, 0.999, 1.0] {
            let s: f64 = basis.evaluate(x).iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "x = {x}: {s}");
        }
    }

    #[test]
    fn projecting_a_basis_function_gives_a_unit_vector() {
        let basis = BasisSpec::fourier(7).unwrap();
        let grid = basis.midpoint_grid(200);
        let phi = basis.orthonormal_design(&grid);
        for j in 0..7 {
            let raw = DMatrix::from_fn(2, 200, |_, g| phi[(g, j)]);
            let (series, report) = project_to_basis(&raw, &grid, &basis).unwrap();
            for c in 0..7 {
                let expect = if c == j { 1.0 } else { 0.0 };
                assert!((series.coeffs()[(0, c)] - expect).abs() < 1e-12);
            }
            assert!(report.relative_residual < 1e-12);
        }
    }

    #[test]
    fn constant_curve_only_hits_constant_coefficient() {
        let basis = BasisSpec::fourier(9).unwrap();
        let grid = basis.midpoint_grid(100);
        let raw = DMatrix::from_element(3, 100, 1.0);
        let (series, _) = project_to_basis(&raw, &grid, &basis).unwrap();
        assert!((series.coeffs()[(0, 0)] - 1.0).abs() < 1e-12);
        for c in 1..9 {
            assert!(series.coeffs()[(1, c)].abs() < 1e-12);
        }
    }

    #[test]
    fn smooth_curves_round_trip_through_bsplines() {
        let basis = BasisSpec::bspline(10).unwrap();
        let grid = basis.midpoint_grid(300);
        // cubic polynomials lie in the spline space
        let raw = DMatrix::from_fn(4, 300, |t, g| {
            let x = grid[g];
            1.0 + t as f64 * x - 2.0 * x * x + 0.5 * x * x * x
        });
        let (series, report) = project_to_basis(&raw, &grid, &basis).unwrap();
        let back = reconstruct(&series, &grid);
        assert!(report.relative_residual < 1e-6);
        assert!((back - raw).amax() < 1e-8);
    }

    #[test]
    fn rank_deficient_design_is_rejected() {
        let basis = BasisSpec::fourier(21).unwrap();
        let grid = basis.midpoint_grid(10);
        let raw = DMatrix::zeros(3, 10);
        assert_eq!(project_to_basis(&raw, &grid, &basis).unwrap_err(), Error::BasisNotIdentifiable);
        // repeated grid points cannot identify five functions
        let grid = vec![0.25; 8];
        let raw = DMatrix::zeros(3, 8);
        let basis = BasisSpec::fourier(5).unwrap();
        assert_eq!(project_to_basis(&raw, &grid, &basis).unwrap_err(), Error::BasisNotIdentifiable);
    }

    #[test]
    fn degenerate_series_are_rejected() {
        let basis = BasisSpec::fourier(3).unwrap();
        assert!(FunctionalSeries::new(DMatrix::zeros(1, 3), basis.clone()).is_err());
        let mut m = DMatrix::zeros(4, 3);
        m[(2, 1)] = f64::NAN;
        assert!(FunctionalSeries::new(m, basis.clone()).is_err());
        assert!(FunctionalSeries::new(DMatrix::zeros(4, 2), basis).is_err());
    }

    #[test]
    fn centering_matches_column_means_and_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let basis = BasisSpec::fourier(5).unwrap();
        let m = DMatrix::from_fn(40, 5, |_, _| rng.random_range(-3.0..5.0));
        let series = FunctionalSeries::new(m.clone(), basis.clone()).unwrap();
        let c = center(&series);
        assert!(c.is_centered());
        for j in 0..5 {
            let mut mean = 0.0;
            for t in 0..40 {
                mean += m[(t, j)];
            }
            mean /= 40.0;
            for t in 0..40 {
                assert!((c.coeffs()[(t, j)] - (m[(t, j)] - mean)).abs() < 1e-12);
            }
        }
        let cc = center(&c);
        assert!((cc.coeffs() - c.coeffs()).amax() < 1e-15);

        let constant = FunctionalSeries::new(DMatrix::from_element(6, 5, 2.5), basis).unwrap();
        assert_eq!(center(&constant).coeffs().amax(), 0.0);
    }

    #[test]
    fn hs_inner_identities() {
        let id = OperatorMatrix::from_real(&DMatrix::identity(3, 3), 0.0).unwrap();
        assert!((hs_inner(&id, &id).unwrap() - Complex64::new(3.0, 0.0)).norm() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_complex(&mut rng, 4);
        let b = random_complex(&mut rng, 4);
        let ab = hs_inner(&a, &b).unwrap();
        let ba = hs_inner(&b, &a).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-12);

        // rank-one identity: <u⊗u, v⊗v> = |<u, v>|²
        let unit = |rng: &mut ChaCha8Rng| {
            let v = nalgebra::DVector::from_fn(4, |_, _| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let n = v.norm();
            v / Complex64::new(n, 0.0)
        };
        let u = unit(&mut rng);
        let v = unit(&mut rng);
        let pu = OperatorMatrix::new(&u * u.adjoint(), 0.0).unwrap();
        let pv = OperatorMatrix::new(&v * v.adjoint(), 0.0).unwrap();
        let direct: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a * b.conj()).sum();
        assert!((hs_inner(&pu, &pv).unwrap().re - direct.norm_sqr()).abs() < 1e-12);

        let small = OperatorMatrix::from_real(&DMatrix::identity(2, 2), 0.0).unwrap();
        assert!(hs_inner(&a, &small).is_err());
    }

    #[test]
    fn hs_inner_is_sesquilinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let a = random_complex(&mut rng, 3);
            let b = random_complex(&mut rng, 3);
            let c = random_complex(&mut rng, 3);
            let s = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let lin = OperatorMatrix::new(&a.entries * s + &b.entries, 0.0).unwrap();
            let lhs = hs_inner(&lin, &c).unwrap();
            let rhs = s * hs_inner(&a, &c).unwrap() + hs_inner(&b, &c).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
            let lhs = hs_inner(&c, &lin).unwrap();
            let rhs = s.conj() * hs_inner(&c, &a).unwrap() + hs_inner(&c, &b).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
            assert!(a.hs_norm_sq() >= 0.0);
        }
        let zero = OperatorMatrix::new(DMatrix::zeros(3, 3), 0.0).unwrap();
        assert_eq!(zero.hs_norm_sq(), 0.0);
    }
}
