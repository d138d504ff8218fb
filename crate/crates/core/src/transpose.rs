//! Transpose (Petz-type reversal) and commutant-dual channels.
//!
//! With `ρ₁ = Φ_*(ρ₀)` restricted to its support, the transpose is the unital map
//! `Φᵀ(A) = ρ₁^{−1/2} Φ_*(ρ₀^{1/2} A ρ₀^{1/2}) ρ₁^{−1/2}`, whose Kraus operators are
//! `ρ₀^{1/2} K_λ† ρ₁^{−1/2}`. The commutant dual `Φ^#` is `Φᵀ` sandwiched between basis
//! transposes taken in the eigenbases of `ρ₀` (input) and `ρ₁` (output).

use crate::channel::Channel;
use crate::choi::{channel_from_choi, choi_from_channel};
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, ComplexMatrix};
use crate::states::{make_reference, DensityMatrix, ReferenceState};

/// Eigenvalues of `ρ₁` at or below this are treated as outside its support.
pub const SUPPORT_FLOOR: f64 = 1e-12;

/// Compresses the output of `c` onto the support of `ρ₁ = Φ_*(ρ₀)`.
///
/// Returns the compressed channel and the support isometry `P` (`d_out × r`), so that the Kraus
/// operators of the result are `P† K_λ`. A channel whose `ρ₁` is already faithful comes back
/// unchanged with `P = I`.
pub fn restrict_to_support(c: &Channel, r: &ReferenceState) -> Result<(Channel, ComplexMatrix)> {
    if r.dim() != c.d_in() {
        return Err(Error::DimensionMismatch(format!(
            "reference of dimension {} for channel input {}",
            r.dim(),
            c.d_in()
        )));
    }
    let rho1 = c.apply_schrodinger(&r.density())?;
    let eig = herm_eig(&rho1)?;
    let keep: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&k| eig.eigenvalues[k] > SUPPORT_FLOOR).collect();
    if keep.len() == c.d_out() {
        return Ok((c.clone(), ComplexMatrix::identity(c.d_out())));
    }
    let p = eig.eigenvectors.columns(&keep);
    Ok((c.map_output(&p.adjoint())?, p))
}

/// A channel, its transpose, and the two reference states that tie them together.
#[derive(Debug, Clone)]
pub struct TransposePair {
    /// The support-restricted original.
    pub original: Channel,
    /// `Φᵀ`, with `d_in`/`d_out` swapped relative to `original`.
    pub transposed: Channel,
    pub rho0: ReferenceState,
    pub rho1: ReferenceState,
    /// Support isometry from [`restrict_to_support`].
    pub support: ComplexMatrix,
}

impl TransposePair {
    /// `max_A ‖ρ₁^{1/2} Φᵀ(A) ρ₁^{1/2} − Φ_*(ρ₀^{1/2} A ρ₀^{1/2})‖_F` over matrix units `A`.
    pub fn defining_residual(&self) -> Result<f64> {
        let d = self.rho0.dim();
        let (s0, s1) = (self.rho0.sqrt(), self.rho1.sqrt());
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let a = ComplexMatrix::unit(d, d, i, j);
                let lhs = &(&s1 * &self.transposed.apply_heisenberg(&a)?) * &s1;
                let rhs = self.original.apply_schrodinger(&(&(&s0 * &a) * &s0))?;
                worst = worst.max(lhs.dist(&rhs));
            }
        }
        Ok(worst)
    }
}

/// Transpose of a unital channel relative to `r`.
pub fn transpose_channel(c: &Channel, r: &ReferenceState) -> Result<TransposePair> {
    let (ok, res) = c.is_unital();
    if !ok {
        return Err(Error::NonUnital(res));
    }
    let (original, support) = restrict_to_support(c, r)?;
    let rho1 = make_reference(&DensityMatrix::new(original.apply_schrodinger(&r.density())?.hermitian_part())?)?;
    let (s0, inv1) = (r.sqrt(), rho1.inv_sqrt());
    let raw: Vec<ComplexMatrix> = original.kraus().iter().map(|k| &(&s0 * &k.adjoint()) * &inv1).collect();
    let raw = Channel::new(original.d_out(), original.d_in(), raw)?;
    let transposed = channel_from_choi(&choi_from_channel(&raw, &rho1)?)?;
    Ok(TransposePair { original, transposed, rho0: r.clone(), rho1, support })
}

/// `Φ^#(A) = Φᵀ(Aᵀ)^{T'}`, transposes in the `ρ₀` and `ρ₁` eigenbases.
///
/// Each Kraus operator `L` of `Φᵀ` becomes `W₀ conj(W₀† L W₁) W₁†`.
pub fn commutant_dual(c: &Channel, r: &ReferenceState) -> Result<Channel> {
    let pair = transpose_channel(c, r)?;
    let (w0, w1) = (pair.rho0.basis(), pair.rho1.basis());
    let kraus = pair
        .transposed
        .kraus()
        .iter()
        .map(|l| &(w0 * &(&(&w0.adjoint() * l) * w1).conj()) * &w1.adjoint())
        .collect();
    Channel::new(pair.transposed.d_in(), pair.transposed.d_out(), kraus)
}
