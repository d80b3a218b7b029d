//! Separable synthetic 3-D fields.
//!
//! `X_t = Σ_{j,k,l} (λ_j λ_k λ_l)^{1/2} ξ_{t,jkl} φ¹_j ⊗ φ²_k ⊗ φ³_l` with
//! independent unit-variance AR(1) scores `ξ` (coefficient `c`), cosine
//! eigenvectors on each axis and `λ_j = j^{-2}`. The spectral operator is
//! `f_c(ω) · C₁ ⊗ C₂ ⊗ C₃`.

use rand::Rng;
use rand_distr::StandardNormal;
use specrel_core::seed::{derive, rng, Stream};

use crate::io::RawField;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub dims: [usize; 3],
    pub t_len: usize,
    /// AR(1) coefficient of the scores.
    pub c: f64,
    /// Swap the first two direction-1 eigenvectors (eigenvalues unchanged).
    pub permute_dir1: bool,
}

/// Orthonormal cosine vectors on `g` points, as columns `basis[j][i]`.
pub fn cosine_basis(g: usize) -> Vec<Vec<f64>> {
    (0..g)
        .map(|j| {
            let scale = if j == 0 { (1.0 / g as f64).sqrt() } else { (2.0 / g as f64).sqrt() };
            (0..g).map(|i| scale * (std::f64::consts::PI * j as f64 * (i as f64 + 0.5) / g as f64).cos()).collect()
        })
        .collect()
}

/// Axis eigenvalues `j^{-2}`.
pub fn axis_eigenvalues(g: usize) -> Vec<f64> {
    (1..=g).map(|j| 1.0 / (j * j) as f64).collect()
}

/// Generates a field from the `Generation` sub-stream of `seed`.
pub fn generate(spec: &SynthSpec, seed: u64) -> RawField {
    let [g1, g2, g3] = spec.dims;
    let mut bases = [cosine_basis(g1), cosine_basis(g2), cosine_basis(g3)];
    if spec.permute_dir1 && g1 >= 2 {
        bases[0].swap(0, 1);
    }
    let lam = [axis_eigenvalues(g1), axis_eigenvalues(g2), axis_eigenvalues(g3)];
    let n = g1 * g2 * g3;
    let mut scale = vec![0.0; n];
    for j in 0..g1 {
        for k in 0..g2 {
            for l in 0..g3 {
                scale[(j * g2 + k) * g3 + l] = (lam[0][j] * lam[1][k] * lam[2][l]).sqrt();
            }
        }
    }
    let mut r = rng(derive(seed, Stream::Generation, 0));
    let innov = (1.0 - spec.c * spec.c).sqrt();
    let mut xi: Vec<f64> = (0..n).map(|_| r.sample(StandardNormal)).collect();
    let mut data = Vec::with_capacity(spec.t_len * n);
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    for t in 0..spec.t_len {
        if t > 0 {
            for v in xi.iter_mut() {
                let e: f64 = r.sample(StandardNormal);
                *v = spec.c * *v + innov * e;
            }
        }
        for (dst, (x, s)) in a.iter_mut().zip(xi.iter().zip(&scale)) {
            *dst = x * s;
        }
        // mode products: score index (j, k, l) → voxel index (i1, i2, i3)
        b.fill(0.0);
        for j in 0..g1 {
            for i in 0..g1 {
                let p = bases[0][j][i];
                for kl in 0..g2 * g3 {
                    b[i * g2 * g3 + kl] += p * a[j * g2 * g3 + kl];
                }
            }
        }
        a.fill(0.0);
        for i in 0..g1 {
            for k in 0..g2 {
                for i2 in 0..g2 {
                    let p = bases[1][k][i2];
                    for l in 0..g3 {
                        a[(i * g2 + i2) * g3 + l] += p * b[(i * g2 + k) * g3 + l];
                    }
                }
            }
        }
        b.fill(0.0);
        for ij in 0..g1 * g2 {
            for l in 0..g3 {
                for i3 in 0..g3 {
                    b[ij * g3 + i3] += bases[2][l][i3] * a[ij * g3 + l];
                }
            }
        }
        data.extend_from_slice(&b);
    }
    RawField { data, t_len: spec.t_len, dims: spec.dims }
}
