//! Channels in Kraus form.
//!
//! A [`Channel`] stores Heisenberg-picture Kraus operators `K_λ : ℋ → 𝒦` (shape `d_out × d_in`):
//! `Φ(B) = Σ K_λ† B K_λ` for `B` on 𝒦, and the Schrödinger dual `Φ_*(T) = Σ K_λ T K_λ†`.

use crate::error::{Error, Result};
use crate::linalg::{cr, herm_eig, ComplexMatrix};
use crate::states::ReferenceState;

/// Tolerance for `Σ K†K = I`.
pub const UNITAL_TOL: f64 = 1e-8;
/// Relative singular-value floor for the linear-independence test on Kraus sets.
pub const INDEPENDENCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    d_in: usize,
    d_out: usize,
    kraus: Vec<ComplexMatrix>,
}

impl Channel {
    pub fn new(d_in: usize, d_out: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::EmptyKraus);
        }
        if d_in == 0 || d_out == 0 {
            return Err(Error::DimensionMismatch("zero-dimensional channel".into()));
        }
        for (k, op) in kraus.iter().enumerate() {
            if op.shape() != (d_out, d_in) {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {k} is {}x{}, expected {d_out}x{d_in}",
                    op.rows(),
                    op.cols()
                )));
            }
        }
        Ok(Self { d_in, d_out, kraus })
    }

    pub fn identity(d: usize) -> Self {
        Self { d_in: d, d_out: d, kraus: vec![ComplexMatrix::identity(d)] }
    }

    /// `B ↦ U† B U`.
    pub fn unitary(u: ComplexMatrix) -> Self {
        let d = u.rows();
        Self { d_in: d, d_out: d, kraus: vec![u] }
    }

    /// Kraus `{|i⟩⟨j| / √d_out}`; sends every state to `I/d_out`.
    pub fn completely_depolarizing(d_in: usize, d_out: usize) -> Self {
        let s = 1.0 / (d_out as f64).sqrt();
        let mut kraus = Vec::with_capacity(d_in * d_out);
        for i in 0..d_out {
            for j in 0..d_in {
                kraus.push(ComplexMatrix::unit(d_out, d_in, i, j).scale_real(s));
            }
        }
        Self { d_in, d_out, kraus }
    }

    /// Qubit amplitude damping, Kraus `diag(1, √(1−γ))` and `√γ |0⟩⟨1|`.
    pub fn amplitude_damping(gamma: f64) -> Self {
        let a0 = ComplexMatrix::diag_real(&[1.0, (1.0 - gamma).sqrt()]);
        let a1 = ComplexMatrix::unit(2, 2, 0, 1).scale_real(gamma.sqrt());
        Self { d_in: 2, d_out: 2, kraus: vec![a0, a1] }
    }

    /// Qubit dephasing, Kraus `√(1−p) I` and `√p σ_z`.
    pub fn dephasing(p: f64) -> Self {
        let k0 = ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt());
        let k1 = ComplexMatrix::diag_real(&[1.0, -1.0]).scale_real(p.sqrt());
        Self { d_in: 2, d_out: 2, kraus: vec![k0, k1] }
    }

    /// Qubit depolarizing family `ρ ↦ (1−p)ρ + p·I/2`.
    pub fn depolarizing(p: f64) -> Self {
        let sx = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let sy = ComplexMatrix::from_rows(&[
            vec![cr(0.0), crate::linalg::c(0.0, -1.0)],
            vec![crate::linalg::c(0.0, 1.0), cr(0.0)],
        ]);
        let sz = ComplexMatrix::diag_real(&[1.0, -1.0]);
        let q = (p / 4.0).sqrt();
        let kraus = vec![
            ComplexMatrix::identity(2).scale_real((1.0 - 3.0 * p / 4.0).sqrt()),
            sx.scale_real(q),
            sy.scale_real(q),
            sz.scale_real(q),
        ];
        Self { d_in: 2, d_out: 2, kraus }
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn into_kraus(self) -> Vec<ComplexMatrix> {
        self.kraus
    }

    /// `Φ(B) = Σ K† B K`.
    pub fn apply_heisenberg(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        if b.shape() != (self.d_out, self.d_out) {
            return Err(Error::DimensionMismatch(format!(
                "Heisenberg input {}x{}, channel output dimension {}",
                b.rows(),
                b.cols(),
                self.d_out
            )));
        }
        let mut out = ComplexMatrix::zeros(self.d_in, self.d_in);
        for k in &self.kraus {
            out = &out + &(&(&k.adjoint() * b) * k);
        }
        Ok(out)
    }

    /// `Φ_*(T) = Σ K T K†`.
    pub fn apply_schrodinger(&self, t: &ComplexMatrix) -> Result<ComplexMatrix> {
        if t.shape() != (self.d_in, self.d_in) {
            return Err(Error::DimensionMismatch(format!(
                "Schrodinger input {}x{}, channel input dimension {}",
                t.rows(),
                t.cols(),
                self.d_in
            )));
        }
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for k in &self.kraus {
            out = &out + &(&(k * t) * &k.adjoint());
        }
        Ok(out)
    }

    /// `‖Σ K†K − I‖_F`.
    pub fn unital_residual(&self) -> f64 {
        let mut s = ComplexMatrix::zeros(self.d_in, self.d_in);
        for k in &self.kraus {
            s = &s + &(&k.adjoint() * k);
        }
        s.dist(&ComplexMatrix::identity(self.d_in))
    }

    /// Heisenberg-unital (equivalently Schrödinger trace preserving) within [`UNITAL_TOL`].
    pub fn is_unital(&self) -> (bool, f64) {
        let r = self.unital_residual();
        (r <= UNITAL_TOL, r)
    }

    /// `G[λ, μ] = tr[ρ₀ K_λ† K_μ]`.
    pub fn kraus_gram(&self, r: &ReferenceState) -> Result<ComplexMatrix> {
        if r.dim() != self.d_in {
            return Err(Error::DimensionMismatch(format!(
                "reference of dimension {} for channel input {}",
                r.dim(),
                self.d_in
            )));
        }
        let rho = r.density();
        Ok(gram(&self.kraus, |a, b| (&(&rho * &a.adjoint()) * b).trace()))
    }

    /// Linear (weak) independence of the Kraus set, decided on the uniform-reference Gram matrix.
    pub fn is_minimal_kraus(&self) -> bool {
        let n = self.d_in as f64;
        let g = gram(&self.kraus, |a, b| a.hs_inner(b) / n);
        let eig = herm_eig(&g).expect("Gram matrix is Hermitian");
        let top = eig.max();
        top > 0.0 && eig.min() > INDEPENDENCE_TOL * top
    }

    /// Convex combination `t·self + (1−t)·other` via the union of rescaled Kraus sets.
    pub fn mix(&self, other: &Channel, t: f64) -> Result<Channel> {
        if self.d_in != other.d_in || self.d_out != other.d_out {
            return Err(Error::DimensionMismatch("mixing channels of different shapes".into()));
        }
        let mut kraus: Vec<ComplexMatrix> = self.kraus.iter().map(|k| k.scale_real(t.sqrt())).collect();
        kraus.extend(other.kraus.iter().map(|k| k.scale_real((1.0 - t).sqrt())));
        Channel::new(self.d_in, self.d_out, kraus)
    }

    /// Kraus operators left-multiplied by `w` (shape `m × d_out`).
    pub fn map_output(&self, w: &ComplexMatrix) -> Result<Channel> {
        if w.cols() != self.d_out {
            return Err(Error::DimensionMismatch("output map does not match d_out".into()));
        }
        Channel::new(self.d_in, w.rows(), self.kraus.iter().map(|k| w * k).collect())
    }
}

fn gram(
    ops: &[ComplexMatrix],
    f: impl Fn(&ComplexMatrix, &ComplexMatrix) -> crate::linalg::C64,
) -> ComplexMatrix {
    let n = ops.len();
    ComplexMatrix::from_fn(n, n, |i, j| f(&ops[i], &ops[j]))
}

/// Sequential Schrödinger composition: `inner` acts first, then `outer`.
///
/// The Kraus set is every product `K_outer · K_inner`.
pub fn compose(outer: &Channel, inner: &Channel) -> Result<Channel> {
    if inner.d_out != outer.d_in {
        return Err(Error::DimensionMismatch(format!(
            "inner output {} does not feed outer input {}",
            inner.d_out, outer.d_in
        )));
    }
    let mut kraus = Vec::with_capacity(outer.kraus.len() * inner.kraus.len());
    for ko in &outer.kraus {
        for ki in &inner.kraus {
            kraus.push(ko * ki);
        }
    }
    Channel::new(inner.d_in, outer.d_out, kraus)
}

/// Largest action discrepancy of two channels over the matrix-unit basis (Schrödinger side).
pub fn action_distance(a: &Channel, b: &Channel) -> Result<f64> {
    if a.d_in != b.d_in || a.d_out != b.d_out {
        return Err(Error::DimensionMismatch("comparing channels of different shapes".into()));
    }
    let mut worst: f64 = 0.0;
    for i in 0..a.d_in {
        for j in 0..a.d_in {
            let e = ComplexMatrix::unit(a.d_in, a.d_in, i, j);
            worst = worst.max(a.apply_schrodinger(&e)?.dist(&b.apply_schrodinger(&e)?));
        }
    }
    Ok(worst)
}
