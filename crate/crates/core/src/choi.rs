//! Channel–state duality relative to a faithful reference state.
//!
//! For `ρ₀ = Σ t_ξ |ξ⟩⟨ξ|` with GNS vector `Ω = Σ √t_ξ ξ⊗ξ`, a channel with Kraus operators `K_λ`
//! has Choi state `S = Σ_λ |w_λ⟩⟨w_λ|`, `w_λ = (I⊗K_λ)Ω`, on `ℋ⊗𝒦` (input factor first). Its
//! first margin `tr_𝒦 S` equals `ρ₀` exactly when the channel is unital.
//!
//! The inverse direction reads a minimal, `ρ₀`-orthogonal Kraus set off the eigendecomposition of
//! `S`: each eigenvector scaled by the root of its eigenvalue is one `w_λ`, and
//! `K_λ ξ = t_ξ^{−1/2} (ξ†⊗I) w_λ`.

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::linalg::{cr, herm_eig, kron, partial_trace, psd_rank, swap_factors, ComplexMatrix, Factor, C64};
use crate::states::ReferenceState;

/// Hermiticity/PSD/trace tolerance for Choi states.
pub const CHOI_TOL: f64 = 1e-9;
/// Allowed margin deviation `‖tr_𝒦 S − ρ₀‖_F`.
pub const MARGIN_TOL: f64 = 1e-8;
/// Relative eigenvalue cutoff separating Kraus directions from rounding noise.
pub const RANK_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ChoiState {
    d_in: usize,
    d_out: usize,
    reference: ReferenceState,
    s: ComplexMatrix,
    margin_residual: f64,
}

impl ChoiState {
    /// Validates a candidate Choi matrix against its reference state.
    pub fn new(reference: ReferenceState, d_out: usize, s: ComplexMatrix) -> Result<Self> {
        let d_in = reference.dim();
        let n = d_in * d_out;
        if s.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix {}x{} for d_in = {d_in}, d_out = {d_out}",
                s.rows(),
                s.cols()
            )));
        }
        let herm = s.hermitian_residual();
        if herm > CHOI_TOL {
            return Err(Error::NonHermitian(herm));
        }
        let eig = herm_eig(&s)?;
        if eig.min() < -CHOI_TOL {
            return Err(Error::NonPsd(eig.min()));
        }
        let margin_residual = margin_residual(&s, &reference, d_out)?;
        if margin_residual > MARGIN_TOL {
            return Err(Error::MarginViolation(margin_residual));
        }
        Ok(Self { d_in, d_out, reference, s: s.hermitian_part(), margin_residual })
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn reference(&self) -> &ReferenceState {
        &self.reference
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.s
    }

    pub fn margin_residual(&self) -> f64 {
        self.margin_residual
    }

    /// Whether `tr_𝒦 S = ρ₀` holds within [`MARGIN_TOL`]; false for Choi states of non-unital maps.
    pub fn margin_ok(&self) -> bool {
        self.margin_residual <= MARGIN_TOL
    }

    /// Unchecked constructor for internal projections that preserve the invariants by construction.
    pub(crate) fn from_parts(reference: ReferenceState, d_out: usize, s: ComplexMatrix) -> Result<Self> {
        let margin_residual = margin_residual(&s, &reference, d_out)?;
        Ok(Self { d_in: reference.dim(), d_out, reference, s, margin_residual })
    }

    /// `tr[S (A'⊗B)]`.
    pub fn pairing(&self, a_prime: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
        if a_prime.shape() != (self.d_in, self.d_in) || b.shape() != (self.d_out, self.d_out) {
            return Err(Error::DimensionMismatch("pairing operands do not match the Choi factors".into()));
        }
        Ok((&self.s * &kron(a_prime, b)).trace())
    }

    /// Heisenberg action read directly off the Choi state:
    /// `⟨ζ|Φ(B)|ξ⟩ = (t_ζ t_ξ)^{−1/2} tr[S(|ζ⟩⟨ξ|⊗B)]` for `ζ, ξ` in the pinned eigenbasis.
    pub fn recover_heisenberg(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        if b.shape() != (self.d_out, self.d_out) {
            return Err(Error::DimensionMismatch("operand does not match d_out".into()));
        }
        let d = self.d_in;
        let basis = self.reference.basis();
        let t = self.reference.weights();
        // S' = (K†⊗I) S (K⊗I) is S in eigenbasis coordinates on the first factor.
        let kb = kron(basis, &ComplexMatrix::identity(self.d_out));
        let s_eig = &(&kb.adjoint() * &self.s) * &kb;
        let mut coords = ComplexMatrix::zeros(d, d);
        for z in 0..d {
            for x in 0..d {
                // tr[S' (|z⟩⟨x| ⊗ B)] = Σ_{k,l} S'[(x,k),(z,l)] B[l,k]
                let mut acc = cr(0.0);
                for k in 0..self.d_out {
                    for l in 0..self.d_out {
                        acc += s_eig[(x * self.d_out + k, z * self.d_out + l)] * b[(l, k)];
                    }
                }
                coords[(z, x)] = acc / (t[z] * t[x]).sqrt();
            }
        }
        Ok(self.reference.from_eigen_coords(&coords))
    }
}

fn margin_residual(s: &ComplexMatrix, r: &ReferenceState, d_out: usize) -> Result<f64> {
    Ok(partial_trace(s, Factor::Second, (r.dim(), d_out))?.dist(&r.density()))
}

fn check_input(c: &Channel, r: &ReferenceState) -> Result<()> {
    if r.dim() != c.d_in() {
        return Err(Error::DimensionMismatch(format!(
            "reference of dimension {} for channel input {}",
            r.dim(),
            c.d_in()
        )));
    }
    Ok(())
}

/// `(I⊗K) v` for `v ∈ ℋ⊗ℋ`, giving a vector in `ℋ⊗𝒦`.
fn lift(k: &ComplexMatrix, v: &[C64], d_in: usize) -> Vec<C64> {
    let d_out = k.rows();
    let mut w = vec![cr(0.0); d_in * d_out];
    for a in 0..d_in {
        for b in 0..d_out {
            let mut acc = cr(0.0);
            for cc in 0..d_in {
                acc += k[(b, cc)] * v[a * d_in + cc];
            }
            w[a * d_out + b] = acc;
        }
    }
    w
}

/// Choi state of `c` relative to `r`.
///
/// Non-unital channels still produce a state; check [`ChoiState::margin_ok`].
pub fn choi_from_channel(c: &Channel, r: &ReferenceState) -> Result<ChoiState> {
    check_input(c, r)?;
    let omega = r.gns_vector();
    let n = c.d_in() * c.d_out();
    let mut s = ComplexMatrix::zeros(n, n);
    for k in c.kraus() {
        let w = lift(k, &omega, c.d_in());
        s = &s + &ComplexMatrix::outer(&w, &w);
    }
    ChoiState::from_parts(r.clone(), c.d_out(), s)
}

/// `Σ_λ (I⊗K_λ) SWAP·X·SWAP (I⊗K_λ)†` for an operator `X` on `ℋ⊗ℋ`; the swap puts the
/// commutant copy first.
pub fn choi_of_operator(c: &Channel, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = c.d_in();
    if x.shape() != (d * d, d * d) {
        return Err(Error::DimensionMismatch("operator does not act on the doubled input space".into()));
    }
    let xs = swap_factors(x, (d, d));
    let n = d * c.d_out();
    let mut s = ComplexMatrix::zeros(n, n);
    for k in c.kraus() {
        let lk = kron(&ComplexMatrix::identity(d), k);
        s = &s + &xs.conjugate_by(&lk);
    }
    Ok(s)
}

/// Choi matrix at an arbitrary unit vector `ω ∈ ℋ⊗ℋ` in place of the GNS vector.
pub fn choi_from_vector(c: &Channel, omega: &[C64]) -> Result<ComplexMatrix> {
    let d = c.d_in();
    if omega.len() != d * d {
        return Err(Error::DimensionMismatch(format!("vector of length {} for d_in = {d}", omega.len())));
    }
    let nrm = omega.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (nrm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(format!("vector norm {nrm} is not 1")));
    }
    choi_of_operator(c, &ComplexMatrix::outer(omega, omega))
}

/// Minimal Kraus set read off the spectral decomposition of `S`.
pub fn channel_from_choi(s: &ChoiState) -> Result<Channel> {
    if !s.margin_ok() {
        return Err(Error::MarginViolation(s.margin_residual()));
    }
    let (d_in, d_out) = (s.d_in, s.d_out);
    let eig = herm_eig(&s.s)?;
    if eig.min() < -CHOI_TOL {
        return Err(Error::NonPsd(eig.min()));
    }
    let top = eig.max();
    let basis = s.reference.basis();
    let t = s.reference.weights();
    let mut kraus = Vec::new();
    for idx in (0..eig.eigenvalues.len()).rev() {
        let mu = eig.eigenvalues[idx];
        if mu <= RANK_CUTOFF * top {
            break;
        }
        let mut v = eig.eigenvectors.col(idx);
        canonical_phase(&mut v);
        let w: Vec<C64> = v.iter().map(|z| z * mu.sqrt()).collect();
        // K = Σ_ξ t_ξ^{-1/2} ψ_ξ ξ†, ψ_ξ = (ξ†⊗I) w
        let mut k = ComplexMatrix::zeros(d_out, d_in);
        for (xi_idx, &tx) in t.iter().enumerate() {
            let xi = basis.col(xi_idx);
            let psi: Vec<C64> = (0..d_out)
                .map(|b| (0..d_in).map(|a| xi[a].conj() * w[a * d_out + b]).sum::<C64>() / tx.sqrt())
                .collect();
            k = &k + &ComplexMatrix::outer(&psi, &xi);
        }
        kraus.push(k);
    }
    Channel::new(d_in, d_out, kraus)
}

/// Makes the first non-negligible component real and positive.
pub(crate) fn canonical_phase(v: &mut [C64]) {
    let top = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-6 * top).copied() {
        let ph = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= ph;
        }
    }
}

fn same_reference(a: &ReferenceState, b: &ReferenceState) -> bool {
    a.dim() == b.dim()
        && a.basis().dist(b.basis()) <= 1e-12
        && a.weights().iter().zip(b.weights()).all(|(x, y)| (x - y).abs() <= 1e-12)
}

/// `t·S₁ + (1−t)·S₂`, the Choi state of the mixed channel.
pub fn mix(s1: &ChoiState, s2: &ChoiState, t: f64) -> Result<ChoiState> {
    if s1.d_in != s2.d_in || s1.d_out != s2.d_out {
        return Err(Error::DimensionMismatch("mixing Choi states of different shapes".into()));
    }
    if !same_reference(&s1.reference, &s2.reference) {
        return Err(Error::RefMismatch);
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidState(format!("mixing weight {t} outside [0, 1]")));
    }
    let s = &s1.s.scale_real(t) + &s2.s.scale_real(1.0 - t);
    ChoiState::from_parts(s1.reference.clone(), s1.d_out, s)
}

/// Number of eigenvalues of `S` above `1e-10·λ_max`.
pub fn choi_rank(s: &ChoiState) -> usize {
    psd_rank(&herm_eig(&s.s).expect("Choi matrix is Hermitian"), RANK_CUTOFF)
}
