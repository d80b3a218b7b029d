//! Frequency-wise eigenanalysis of Hermitian operator estimates, and the
//! separable three-direction model whose eigenvalues are triple products of
//! directional eigenvalues.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fts::{BasisSpec, OperatorMatrix};
use crate::spectral::{surface_from_frames, Band, BandwidthRule, SpectralEstimate, WindowSpec};

/// Tolerance used to accept an operator as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Leading eigenpairs of a Hermitian operator, eigenvalues non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub freq: f64,
    /// Top-k eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// Unit eigenvectors matching `eigenvalues`.
    pub vectors: Vec<DVector<Complex64>>,
    /// Every eigenvalue of the operator, descending.
    pub spectrum: Vec<f64>,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `Π_j = v_j v_j†` for 1-based `j`.
    pub fn projector(&self, j: usize) -> Result<DMatrix<Complex64>> {
        let v = self.vector(j)?;
        Ok(v * v.adjoint())
    }

    /// Unit eigenvector for 1-based `j`.
    pub fn vector(&self, j: usize) -> Result<&DVector<Complex64>> {
        if j == 0 || j > self.vectors.len() {
            return Err(Error::ComponentOutOfRange { k: j, available: self.vectors.len() });
        }
        Ok(&self.vectors[j - 1])
    }

    /// Consecutive differences `λ_j − λ_{j+1}` of the full spectrum.
    pub fn gaps(&self) -> Vec<f64> {
        self.spectrum.windows(2).map(|w| w[0] - w[1]).collect()
    }

    /// `Σ_j λ_j Π_j` over the stored components.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let d = self.vectors.first().map_or(0, |v| v.len());
        let mut m = DMatrix::zeros(d, d);
        for (l, v) in self.eigenvalues.iter().zip(&self.vectors) {
            m += v * v.adjoint() * Complex64::new(*l, 0.0);
        }
        m
    }
}

/// Top-`k` eigenpairs of the Hermitian part of `op`.
pub fn eigensystem(op: &OperatorMatrix, k: usize) -> Result<EigenSystem> {
    let d = op.dim();
    if k == 0 || k > d {
        return Err(Error::ComponentOutOfRange { k, available: d });
    }
    if !op.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::NotHermitian(op.hermitian_defect()));
    }
    let h = op.hermitianized();
    let eig = nalgebra::SymmetricEigen::new(h.entries);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap_or(core::cmp::Ordering::Equal)
    });
    let spectrum: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    if spectrum.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite eigenvalue".into()));
    }
    let vectors = order[..k]
        .iter()
        .map(|&i| {
            let v = eig.eigenvectors.column(i).into_owned();
            let n = v.norm();
            v / Complex64::new(n, 0.0)
        })
        .collect();
    Ok(EigenSystem { freq: op.freq, eigenvalues: spectrum[..k].to_vec(), vectors, spectrum })
}

/// `‖Π_{X,k} − Π_{Y,k}‖²_HS = 2 − 2|⟨φ_X, φ_Y⟩|²`, clamped to `[0, 2]`.
pub fn projector_distance_sq(ex: &EigenSystem, ey: &EigenSystem, k: usize) -> Result<f64> {
    let u = ex.vector(k)?;
    let v = ey.vector(k)?;
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: u.len(), found: v.len() });
    }
    Ok(rank_one_distance(&[inner_sq(u, v)]))
}

/// `|⟨u, v⟩|² / (‖u‖² ‖v‖²)`; exactly 1 when `u == v`.
pub fn inner_sq(u: &DVector<Complex64>, v: &DVector<Complex64>) -> f64 {
    let z: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a * b.conj()).sum();
    let nu: f64 = u.iter().map(|a| a.norm_sqr()).sum();
    let nv: f64 = v.iter().map(|a| a.norm_sqr()).sum();
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    z.norm_sqr() / (nu * nv)
}

/// Distance between two rank-one tensor-product projectors whose factors have
/// squared overlaps `overlaps`.
pub fn rank_one_distance(overlaps: &[f64]) -> f64 {
    let prod: f64 = overlaps.iter().product();
    (2.0 - 2.0 * prod).clamp(0.0, 2.0)
}

/// Outcome of an eigengap check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    pub freq: f64,
    pub k: usize,
    /// Smallest gap separating `λ_k` from its neighbours.
    pub min_gap: f64,
    pub threshold: f64,
    pub ok: bool,
}

/// Default relative gap tolerance (times `λ_1`).
pub const DEFAULT_GAP_TOL: f64 = 0.01;

/// Checks that `λ_k` is separated from `λ_{k±1}` by more than `tol · λ_1`.
pub fn eigengap_diagnostic(e: &EigenSystem, k: usize, tol: f64) -> GapReport {
    let s = &e.spectrum;
    let threshold = tol * s.first().copied().unwrap_or(0.0).abs();
    let mut min_gap = f64::INFINITY;
    if k >= 1 && k < s.len() {
        min_gap = min_gap.min(s[k - 1] - s[k]);
    }
    if k > 1 && k <= s.len() {
        min_gap = min_gap.min(s[k - 2] - s[k - 1]);
    }
    if k == 0 || k > s.len() || (k == s.len() && k == 1) {
        min_gap = f64::NAN;
    }
    GapReport { freq: e.freq, k, min_gap, threshold, ok: min_gap > threshold }
}

/// A series of 3-D fields on a `G₁ × G₂ × G₃` grid; voxel `(i, j, l)` sits at
/// column `(i·G₂ + j)·G₃ + l`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableSeries3D {
    data: Vec<f64>,
    t_len: usize,
    dims: [usize; 3],
    bases: [BasisSpec; 3],
}

impl SeparableSeries3D {
    pub fn new(data: Vec<f64>, t_len: usize, dims: [usize; 3], bases: [BasisSpec; 3]) -> Result<Self> {
        if dims.iter().any(|&g| g < 2) {
            return Err(Error::InvalidInput("every axis needs at least 2 grid points".into()));
        }
        if t_len < 2 {
            return Err(Error::InvalidInput("a functional series needs T >= 2".into()));
        }
        let voxels = dims[0] * dims[1] * dims[2];
        if data.len() != t_len * voxels {
            return Err(Error::DimensionMismatch { expected: t_len * voxels, found: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("field contains non-finite values".into()));
        }
        for (basis, &g) in bases.iter().zip(&dims) {
            if basis.dim() > g {
                return Err(Error::BasisNotIdentifiable);
            }
        }
        Ok(SeparableSeries3D { data, t_len, dims, bases })
    }

    /// Raw-grid bases in every direction.
    pub fn on_raw_grid(data: Vec<f64>, t_len: usize, dims: [usize; 3]) -> Result<Self> {
        let bases = [
            BasisSpec::raw_grid(dims[0].max(1))?,
            BasisSpec::raw_grid(dims[1].max(1))?,
            BasisSpec::raw_grid(dims[2].max(1))?,
        ];
        Self::new(data, t_len, dims, bases)
    }

    pub fn len(&self) -> usize {
        self.t_len
    }

    pub fn is_empty(&self) -> bool {
        self.t_len == 0
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn bases(&self) -> &[BasisSpec; 3] {
        &self.bases
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn voxels(&self) -> usize {
        self.dims.iter().product()
    }

    /// Field at time `t`.
    pub fn field(&self, t: usize) -> &[f64] {
        let v = self.voxels();
        &self.data[t * v..(t + 1) * v]
    }

    /// Subtracts the per-voxel mean over time.
    pub fn centered(&self) -> Self {
        let v = self.voxels();
        let mut data = self.data.clone();
        for c in 0..v {
            let mean = (0..self.t_len).map(|t| data[t * v + c]).sum::<f64>() / self.t_len as f64;
            for t in 0..self.t_len {
                data[t * v + c] -= mean;
            }
        }
        SeparableSeries3D { data, ..self.clone() }
    }

    /// Removes a least-squares cubic polynomial in time from every voxel.
    pub fn detrended_cubic(&self) -> Result<Self> {
        let t_len = self.t_len;
        if t_len < 5 {
            return Err(Error::InvalidInput("cubic detrending needs T >= 5".into()));
        }
        let scale = (t_len - 1) as f64;
        let design = DMatrix::from_fn(t_len, 4, |t, p| {
            let u = 2.0 * t as f64 / scale - 1.0;
            libm::pow(u, p as f64)
        });
        let pinv = design
            .clone()
            .pseudo_inverse(1e-12)
            .map_err(|e| Error::Numerical(e.into()))?;
        let hat = &design * pinv;
        let v = self.voxels();
        let mut data = self.data.clone();
        let mut col = DVector::zeros(t_len);
        for c in 0..v {
            for t in 0..t_len {
                col[t] = self.data[t * v + c];
            }
            let fit = &hat * &col;
            for t in 0..t_len {
                data[t * v + c] -= fit[t];
            }
        }
        Ok(SeparableSeries3D { data, ..self.clone() })
    }

    /// Frames for `direction` (1-based): `G_dir × (product of the other two)`.
    pub fn frames(&self, direction: usize) -> Result<Vec<f64>> {
        if !(1..=3).contains(&direction) {
            return Err(Error::InvalidInput(alloc::format!("direction {direction} not in 1..=3")));
        }
        let [g1, g2, g3] = self.dims;
        let v = self.voxels();
        let mut out = Vec::with_capacity(self.data.len());
        for t in 0..self.t_len {
            let f = &self.data[t * v..(t + 1) * v];
            match direction {
                1 => out.extend_from_slice(f),
                2 => {
                    for j in 0..g2 {
                        for i in 0..g1 {
                            for l in 0..g3 {
                                out.push(f[(i * g2 + j) * g3 + l]);
                            }
                        }
                    }
                }
                _ => {
                    for l in 0..g3 {
                        for i in 0..g1 {
                            for j in 0..g2 {
                                out.push(f[(i * g2 + j) * g3 + l]);
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn frame_shape(&self, direction: usize) -> (usize, usize) {
        let p = self.dims[direction - 1];
        (p, self.voxels() / p)
    }

    /// Maps a grid-level kernel matrix for `direction` to orthonormal basis
    /// coordinates.
    fn to_basis(&self, direction: usize, op: OperatorMatrix) -> Result<OperatorMatrix> {
        let basis = &self.bases[direction - 1];
        let grid = basis.midpoint_grid(self.dims[direction - 1]);
        let proj = basis.projector_on(&grid)?.map(|v| Complex64::new(v, 0.0));
        let entries = &proj * op.entries * proj.transpose();
        OperatorMatrix::new(entries, op.freq)
    }
}

/// Directional sequential estimate at one `(η, ω)`, in the direction's
/// orthonormal basis coordinates.
pub fn directional_sequential_estimate(
    series: &SeparableSeries3D,
    direction: usize,
    eta: f64,
    omega: f64,
    window: &WindowSpec,
    b: f64,
) -> Result<OperatorMatrix> {
    let frames = series.frames(direction)?;
    let (p, q) = series.frame_shape(direction);
    let mut ops = surface_from_frames(frames.chunks(p * q), p, q, series.len(), &[omega], &[eta], window, b)?;
    let op = ops.remove(0).remove(0);
    series.to_basis(direction, op)
}

/// Directional estimates over an `(η, ω)` grid.
pub fn directional_surface(
    series: &SeparableSeries3D,
    direction: usize,
    band: Band,
    n_freq: usize,
    etas: &[f64],
    window: &WindowSpec,
    bandwidth: &BandwidthRule,
) -> Result<SpectralEstimate> {
    let t_len = series.len();
    let b = bandwidth.resolve(t_len)?;
    let freqs = band.grid(n_freq)?;
    let frames = series.frames(direction)?;
    let (p, q) = series.frame_shape(direction);
    let raw = surface_from_frames(frames.chunks(p * q), p, q, t_len, &freqs, etas, window, b)?;
    let ops = raw
        .into_iter()
        .map(|row| row.into_iter().map(|op| series.to_basis(direction, op)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralEstimate { freqs, etas: etas.to_vec(), ops, t_len, bandwidth: b, window: *window })
}

/// Directional components per axis used by default: `⌊T^{1/3}⌋` (at least 1).
pub fn default_components(t_len: usize) -> usize {
    (libm::floor(libm::cbrt(t_len as f64) + 1e-9) as usize).max(1)
}

/// Triple products of directional eigenvalues, largest first.
#[derive(Debug, Clone, PartialEq)]
pub struct KroneckerEigenSystem {
    pub freq: f64,
    /// Directional eigenvalues used (first `n` of each direction).
    pub directional: [Vec<f64>; 3],
    pub values: Vec<f64>,
    /// 1-based `(j, k, l)` index triples of `values`.
    pub triples: Vec<[usize; 3]>,
}

/// The `top_n` largest products `λ_{1,j} λ_{2,k} λ_{3,l}` over the first
/// `per_direction` eigenvalues of each direction. Ties are ordered by index
/// triple.
pub fn kronecker_eigensystem(
    dirs: [&EigenSystem; 3],
    per_direction: usize,
    top_n: usize,
) -> Result<KroneckerEigenSystem> {
    for e in dirs {
        if e.len() < per_direction {
            return Err(Error::ComponentOutOfRange { k: per_direction, available: e.len() });
        }
    }
    let full = per_direction * per_direction * per_direction;
    if top_n == 0 || top_n > full {
        return Err(Error::ComponentOutOfRange { k: top_n, available: full });
    }
    let lam: [Vec<f64>; 3] = [
        dirs[0].eigenvalues[..per_direction].to_vec(),
        dirs[1].eigenvalues[..per_direction].to_vec(),
        dirs[2].eigenvalues[..per_direction].to_vec(),
    ];
    let mut all: Vec<(f64, [usize; 3])> = Vec::with_capacity(full);
    for j in 0..per_direction {
        for k in 0..per_direction {
            for l in 0..per_direction {
                all.push((lam[0][j] * lam[1][k] * lam[2][l], [j + 1, k + 1, l + 1]));
            }
        }
    }
    all.sort_by(|a, b| {
        b.0.partial_cmp(&a.0).unwrap_or(core::cmp::Ordering::Equal).then(a.1.cmp(&b.1))
    });
    all.truncate(top_n);
    Ok(KroneckerEigenSystem {
        freq: dirs[0].freq,
        directional: lam,
        values: all.iter().map(|x| x.0).collect(),
        triples: all.iter().map(|x| x.1).collect(),
    })
}

/// `‖A₁⊗A₂⊗A₃ − B₁⊗B₂⊗B₃‖²_HS` from the factor inner products.
pub fn kronecker_distance_sq(a: [&OperatorMatrix; 3], b: [&OperatorMatrix; 3]) -> Result<f64> {
    let mut na = 1.0;
    let mut nb = 1.0;
    let mut cross = Complex64::new(1.0, 0.0);
    for i in 0..3 {
        na *= a[i].hs_norm_sq();
        nb *= b[i].hs_norm_sq();
        cross *= crate::fts::hs_inner(a[i], b[i])?;
    }
    Ok((na + nb - 2.0 * cross.re).max(0.0))
}
