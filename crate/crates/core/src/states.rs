//! Density matrices and faithful reference states.
//!
//! A [`ReferenceState`] pins an eigenbasis `K` of `ρ₀ = Σ t_ξ |ξ⟩⟨ξ|`. Everything that depends on
//! a basis (the GNS vector, transposes, entrywise conjugation) is taken relative to that basis, so
//! the basis choice for degenerate eigenvalues is made deterministic here.

use crate::error::{Error, Result};
use crate::linalg::{cr, herm_eig, kron_vec, ComplexMatrix, C64};

/// Validation tolerance for density matrices.
pub const STATE_TOL: f64 = 1e-10;
/// Eigenvalues below this are not faithful.
pub const FAITHFUL_FLOOR: f64 = 1e-12;
/// Eigenvalues closer than this are treated as one degenerate cluster.
const DEGENERACY_TOL: f64 = 1e-10;
/// Minimum residual norm for a projected standard vector to join a cluster basis.
const GRAM_SCHMIDT_FLOOR: f64 = 1e-6;

/// Hermitian, PSD, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch(format!("density matrix of shape {}x{}", mat.rows(), mat.cols())));
        }
        let res = mat.hermitian_residual();
        if res > STATE_TOL {
            return Err(Error::InvalidState(format!("hermiticity residual {res:.3e}")));
        }
        let tr = mat.trace();
        if (tr - cr(1.0)).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {:.12} != 1", tr.re)));
        }
        let eig = herm_eig(&mat)?;
        if eig.min() < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {:.3e}", eig.min())));
        }
        Ok(Self { mat: mat.hermitian_part() })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { mat: ComplexMatrix::identity(d).scale_real(1.0 / d as f64) }
    }

    pub fn from_diagonal(p: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::diag_real(p))
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }
}

/// A faithful state with a pinned eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceState {
    basis: ComplexMatrix,
    weights: Vec<f64>,
}

impl ReferenceState {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Eigenbasis `K`, as columns.
    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    /// Eigenvalues `t_ξ`, ascending, matching the basis columns.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { basis: ComplexMatrix::identity(d), weights: vec![1.0 / d as f64; d] }
    }

    /// `ρ₀` as a matrix in standard coordinates.
    pub fn density(&self) -> ComplexMatrix {
        self.spectral(cr)
    }

    /// `Σ f(t_ξ) |ξ⟩⟨ξ|`.
    pub fn spectral(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let w = &self.basis;
        let scaled = ComplexMatrix::from_fn(w.rows(), w.cols(), |i, k| w[(i, k)] * f(self.weights[k]));
        &scaled * &w.adjoint()
    }

    pub fn sqrt(&self) -> ComplexMatrix {
        self.spectral(|t| cr(t.sqrt()))
    }

    pub fn inv_sqrt(&self) -> ComplexMatrix {
        self.spectral(|t| cr(1.0 / t.sqrt()))
    }

    pub fn log(&self) -> ComplexMatrix {
        self.spectral(|t| cr(t.ln()))
    }

    /// `ρ₀^{it}`.
    pub fn pow_it(&self, t: f64) -> ComplexMatrix {
        self.spectral(|x| C64::from_polar(1.0, t * x.ln()))
    }

    /// Coordinates of `a` in the eigenbasis: `K† a K`.
    pub fn to_eigen_coords(&self, a: &ComplexMatrix) -> ComplexMatrix {
        &(&self.basis.adjoint() * a) * &self.basis
    }

    pub fn from_eigen_coords(&self, a: &ComplexMatrix) -> ComplexMatrix {
        &(&self.basis * a) * &self.basis.adjoint()
    }

    fn check_square(&self, a: &ComplexMatrix) -> Result<()> {
        if a.shape() != (self.dim(), self.dim()) {
            return Err(Error::DimensionMismatch(format!(
                "operator {}x{} against reference of dimension {}",
                a.rows(),
                a.cols(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// GNS vector `Ω = Σ √t_ξ ξ⊗ξ` with zero phases.
    pub fn gns_vector(&self) -> Vec<C64> {
        let d = self.dim();
        let mut omega = vec![cr(0.0); d * d];
        for (k, &t) in self.weights.iter().enumerate() {
            let xi = self.basis.col(k);
            let term = kron_vec(&xi, &xi);
            let s = t.sqrt();
            for (o, z) in omega.iter_mut().zip(term) {
                *o += z * s;
            }
        }
        omega
    }

    /// Transpose with respect to the pinned eigenbasis: `⟨ξ|Aᵀζ⟩ = ⟨ζ|Aξ⟩`.
    pub fn transpose_in_basis(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_square(a)?;
        Ok(self.from_eigen_coords(&self.to_eigen_coords(a).transpose()))
    }

    /// Entrywise complex conjugation in the pinned eigenbasis, `Ā = (Aᵀ)†`.
    pub fn conj_in_basis(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_square(a)?;
        Ok(self.from_eigen_coords(&self.to_eigen_coords(a).conj()))
    }

    /// Modular automorphism `α_t(a) = ρ₀^{it} a ρ₀^{−it}`.
    pub fn modular_flow(&self, a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
        self.check_square(a)?;
        let x = self.to_eigen_coords(a);
        let y = ComplexMatrix::from_fn(x.rows(), x.cols(), |i, j| {
            x[(i, j)] * C64::from_polar(1.0, t * (self.weights[i].ln() - self.weights[j].ln()))
        });
        Ok(self.from_eigen_coords(&y))
    }

    pub fn modular(&self) -> ModularData<'_> {
        ModularData { owner: self }
    }
}

/// Modular structure of `(ℋ⊗ℋ, Ω)` for a reference state: `Δ = ρ₀⊗ρ₀⁻¹` and `j(A⊗A') = Ā'⊗Ā`.
#[derive(Debug, Clone, Copy)]
pub struct ModularData<'a> {
    owner: &'a ReferenceState,
}

impl ModularData<'_> {
    pub fn owner(&self) -> &ReferenceState {
        self.owner
    }

    /// `Δ^{it} = ρ₀^{it} ⊗ ρ₀^{−it}` as its two factors.
    pub fn delta_it(&self, t: f64) -> (ComplexMatrix, ComplexMatrix) {
        (self.owner.pow_it(t), self.owner.pow_it(-t))
    }

    /// Modular conjugation on product operators, returned as factors `(Ā', Ā)`.
    pub fn j(&self, a: &ComplexMatrix, a_prime: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
        Ok((self.owner.conj_in_basis(a_prime)?, self.owner.conj_in_basis(a)?))
    }

    /// `A ↦ j(A⊗1)*`, which is the basis transpose.
    pub fn transpose(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        let (_, a_bar) = self.j(a, &ComplexMatrix::identity(self.owner.dim()))?;
        Ok(a_bar.adjoint())
    }
}

/// Extracts the spectral data of a faithful density matrix.
///
/// Eigenvalues come out ascending. Within a degenerate cluster the basis is built by Gram–Schmidt
/// over the projected standard basis vectors, taken in index order, so each basis vector has a
/// real positive component on the first standard vector it was built from.
pub fn make_reference(rho: &DensityMatrix) -> Result<ReferenceState> {
    let eig = herm_eig(rho.matrix())?;
    let d = rho.dim();
    if eig.min() < FAITHFUL_FLOOR {
        return Err(Error::NotFaithful(eig.min()));
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for k in 0..d {
        match clusters.last_mut() {
            Some(cl) if (eig.eigenvalues[k] - eig.eigenvalues[*cl.last().unwrap()]).abs() <= DEGENERACY_TOL => {
                cl.push(k)
            }
            _ => clusters.push(vec![k]),
        }
    }
    let mut basis = ComplexMatrix::zeros(d, d);
    let mut weights = Vec::with_capacity(d);
    let mut next = 0;
    for cl in &clusters {
        let v = eig.eigenvectors.columns(cl);
        let proj = &v * &v.adjoint();
        let mut chosen: Vec<Vec<C64>> = Vec::new();
        for i in 0..d {
            if chosen.len() == cl.len() {
                break;
            }
            let mut u = proj.col(i);
            for q in &chosen {
                let ov: C64 = q.iter().zip(&u).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in u.iter_mut().zip(q) {
                    *x -= ov * y;
                }
            }
            let nrm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm <= GRAM_SCHMIDT_FLOOR {
                continue;
            }
            // real positive component on e_i
            let phase = if u[i].norm() > 0.0 { u[i].conj() / u[i].norm() } else { cr(1.0) };
            for x in u.iter_mut() {
                *x = *x * phase / nrm;
            }
            chosen.push(u);
        }
        if chosen.len() != cl.len() {
            return Err(Error::InvalidState("could not fix a basis for a degenerate eigenspace".into()));
        }
        for q in chosen {
            let t: f64 = {
                let rq = rho.matrix().apply(&q);
                q.iter().zip(&rq).map(|(a, b)| a.conj() * b).sum::<C64>().re
            };
            basis.set_col(next, &q);
            weights.push(t);
            next += 1;
        }
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    if let Some(&m) = weights.iter().find(|&&w| w < FAITHFUL_FLOOR) {
        return Err(Error::NotFaithful(m));
    }
    Ok(ReferenceState { basis, weights })
}

/// Reference state diagonal in the standard basis, weights given in standard order.
pub fn diagonal_reference(p: &[f64]) -> Result<ReferenceState> {
    make_reference(&DensityMatrix::from_diagonal(p)?)
}
