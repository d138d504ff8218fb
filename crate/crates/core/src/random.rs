//! Seeded random generators for states, unitaries and channels.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::Channel;
use crate::linalg::{c, matrix_function, ComplexMatrix, MatrixFn, C64};
use crate::states::DensityMatrix;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Ginibre matrix with standard complex Gaussian entries.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    random_matrix(rng, d, d).hermitian_part()
}

/// Unit vector, uniformly distributed on the sphere.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..d).map(|_| gaussian(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// Haar-random unitary via Gram–Schmidt on a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let g = random_matrix(rng, d, d);
    let mut q = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        let mut v = g.col(j);
        for k in 0..j {
            let qk = q.col(k);
            let ov: C64 = qk.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(&qk) {
                *x -= ov * y;
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let v: Vec<C64> = v.into_iter().map(|z| z / n).collect();
        q.set_col(j, &v);
    }
    q
}

/// Full-rank density matrix from a Ginibre `G G† / tr`, mixed slightly with `I/d` so it stays
/// well inside the faithful cone.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityMatrix {
    let g = random_matrix(rng, d, d);
    let p = &g * &g.adjoint();
    let p = p.scale(p.trace().inv());
    let mixed = &p.scale_real(0.9) + &ComplexMatrix::identity(d).scale_real(0.1 / d as f64);
    DensityMatrix::new(mixed.hermitian_part()).expect("random density is valid")
}

/// Random unital channel with `n_kraus` Kraus operators: `K_λ = G_λ M^{−1/2}`, `M = Σ G†G`.
/// Needs `n_kraus · d_out ≥ d_in`, otherwise `M` is singular.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, d_in: usize, d_out: usize, n_kraus: usize) -> Channel {
    let gs: Vec<ComplexMatrix> = (0..n_kraus).map(|_| random_matrix(rng, d_out, d_in)).collect();
    let mut m = ComplexMatrix::zeros(d_in, d_in);
    for g in &gs {
        m = &m + &(&g.adjoint() * g);
    }
    let inv = matrix_function(&m, MatrixFn::InvSqrt).expect("Gram matrix is positive definite");
    let kraus = gs.iter().map(|g| g * &inv).collect();
    Channel::new(d_in, d_out, kraus).expect("shapes are consistent")
}

/// Random unitary channel `B ↦ U†BU`.
pub fn random_unitary_channel<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Channel {
    Channel::unitary(random_unitary(rng, d))
}
