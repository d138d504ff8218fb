//! Spin-j representations, truncated orbital ⊗ radial spaces, and rotation-invariant states.
//!
//! Everything lives in the abstract `(l, m, n)` block basis; no wavefunctions are evaluated.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::linalg::{c, cr, exp_i, kron, ComplexMatrix};
use crate::states::{make_reference, DensityMatrix, ReferenceState};
use crate::symmetry::{check_covariance, CovarianceReport, Representation};

/// Angular momentum matrices for spin `j = two_j / 2`, basis ordered `m = j, j−1, …, −j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinRep {
    two_j: u32,
    jx: ComplexMatrix,
    jy: ComplexMatrix,
    jz: ComplexMatrix,
}

impl SpinRep {
    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    pub fn generators(&self) -> [ComplexMatrix; 3] {
        [self.jx.clone(), self.jy.clone(), self.jz.clone()]
    }

    pub fn jx(&self) -> &ComplexMatrix {
        &self.jx
    }

    pub fn jy(&self) -> &ComplexMatrix {
        &self.jy
    }

    pub fn jz(&self) -> &ComplexMatrix {
        &self.jz
    }

    /// `exp(−iθ n̂·J)`; the axis need not be normalized.
    pub fn rotation(&self, axis: [f64; 3], angle: f64) -> ComplexMatrix {
        rotation_matrix(&self.generators(), axis, angle)
    }

    pub fn into_representation(self) -> Representation {
        Representation::Spin { generators: [self.jx, self.jy, self.jz] }
    }
}

/// Ladder construction: `J₊|m⟩ = √(j(j+1) − m(m+1)) |m+1⟩`.
pub fn spin_rep(two_j: i64) -> Result<SpinRep> {
    if two_j < 0 {
        return Err(Error::InvalidSpin(two_j));
    }
    let n = two_j as usize + 1;
    let j = two_j as f64 / 2.0;
    let m_of = |k: usize| j - k as f64;
    let mut jp = ComplexMatrix::zeros(n, n);
    for k in 1..n {
        // index k−1 carries m+1 when index k carries m
        let m = m_of(k);
        jp[(k - 1, k)] = cr((j * (j + 1.0) - m * (m + 1.0)).sqrt());
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm).scale_real(0.5);
    let jy = (&jp - &jm).scale(c(0.0, -0.5));
    let jz = ComplexMatrix::diag_real(&(0..n).map(m_of).collect::<Vec<_>>());
    Ok(SpinRep { two_j: two_j as u32, jx, jy, jz })
}

/// Spin from a (half-)integer `j`.
pub fn spin_rep_from_j(j: f64) -> Result<SpinRep> {
    let two_j = 2.0 * j;
    if !two_j.is_finite() || (two_j - two_j.round()).abs() > 1e-12 {
        return Err(Error::InvalidRepresentation(format!("spin {j} is not a half-integer")));
    }
    spin_rep(two_j.round() as i64)
}

/// `exp(−iθ n̂·J)` for any generator triple.
pub fn rotation_matrix(generators: &[ComplexMatrix; 3], axis: [f64; 3], angle: f64) -> ComplexMatrix {
    let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
    let n = generators[0].rows();
    if norm == 0.0 {
        return ComplexMatrix::identity(n);
    }
    let mut h = ComplexMatrix::zeros(n, n);
    for (g, a) in generators.iter().zip(axis) {
        h = &h + &g.scale_real(a / norm);
    }
    exp_i(&h.hermitian_part(), -angle).expect("generator combination is Hermitian")
}

/// Haar-random rotation as `(axis, angle)`, via a uniformly random unit quaternion.
pub fn haar_rotation<R: Rng + ?Sized>(rng: &mut R) -> ([f64; 3], f64) {
    let mut q = [0.0f64; 4];
    for x in &mut q {
        *x = rng.sample(StandardNormal);
    }
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let q = q.map(|x| x / n);
    let angle = 2.0 * q[0].clamp(-1.0, 1.0).acos();
    let v = [q[1], q[2], q[3]];
    if v.iter().all(|&x| x == 0.0) {
        return ([0.0, 0.0, 1.0], 0.0);
    }
    (v, angle)
}

/// `⊕_{l ≤ L_max} (ℂ^{2l+1} ⊗ ℂ^{n_rad})`, laid out by ascending `l`, then `m = l, …, −l`, then `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitalSpace {
    pub l_max: usize,
    pub n_rad: usize,
}

impl OrbitalSpace {
    pub fn new(l_max: usize, n_rad: usize) -> Result<Self> {
        if n_rad == 0 {
            return Err(Error::DimensionMismatch("radial dimension must be positive".into()));
        }
        Ok(Self { l_max, n_rad })
    }

    pub fn dim(&self) -> usize {
        (0..=self.l_max).map(|l| self.block_dim(l)).sum()
    }

    pub fn block_dim(&self, l: usize) -> usize {
        (2 * l + 1) * self.n_rad
    }

    pub fn block_offset(&self, l: usize) -> usize {
        (0..l).map(|k| self.block_dim(k)).sum()
    }

    /// `(l, m, n)` for every basis index, in layout order.
    pub fn layout(&self) -> Vec<(usize, i64, usize)> {
        let mut out = Vec::with_capacity(self.dim());
        for l in 0..=self.l_max {
            for m in (-(l as i64)..=l as i64).rev() {
                for n in 0..self.n_rad {
                    out.push((l, m, n));
                }
            }
        }
        out
    }

    /// Block generators `⊕_l J^{(l)} ⊗ I_{n_rad}`.
    pub fn generators(&self) -> [ComplexMatrix; 3] {
        let d = self.dim();
        let mut gens = [ComplexMatrix::zeros(d, d), ComplexMatrix::zeros(d, d), ComplexMatrix::zeros(d, d)];
        let id = ComplexMatrix::identity(self.n_rad);
        for l in 0..=self.l_max {
            let spin = spin_rep(2 * l as i64).expect("integer spin");
            let off = self.block_offset(l);
            for (g, j) in gens.iter_mut().zip(spin.generators()) {
                let block = kron(&j, &id);
                for a in 0..block.rows() {
                    for b in 0..block.cols() {
                        g[(off + a, off + b)] = block[(a, b)];
                    }
                }
            }
        }
        gens
    }

    pub fn representation(&self) -> Representation {
        Representation::Spin { generators: self.generators() }
    }

    /// Block rotation `⊕_l D^l(R) ⊗ I`.
    pub fn rotation(&self, axis: [f64; 3], angle: f64) -> ComplexMatrix {
        rotation_matrix(&self.generators(), axis, angle)
    }
}

/// `ρ₀ = ⊕_l (t_l / (2l+1)) I_{2l+1} ⊗ σ_l`.
pub fn rotation_invariant_state(space: &OrbitalSpace, t: &[f64], sigmas: &[DensityMatrix]) -> Result<ReferenceState> {
    let blocks = space.l_max + 1;
    if t.len() != blocks || sigmas.len() != blocks {
        return Err(Error::DimensionMismatch(format!(
            "{} weights and {} radial states for {blocks} orbital blocks",
            t.len(),
            sigmas.len()
        )));
    }
    if let Some(&bad) = t.iter().find(|&&x| x.is_nan() || x <= 0.0) {
        return Err(Error::NotFaithful(bad));
    }
    let total: f64 = t.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(format!("orbital weights sum to {total}")));
    }
    let d = space.dim();
    let mut rho = ComplexMatrix::zeros(d, d);
    for (l, (tl, sigma)) in t.iter().zip(sigmas).enumerate() {
        if sigma.dim() != space.n_rad {
            return Err(Error::DimensionMismatch(format!(
                "radial state of dimension {} for n_rad = {}",
                sigma.dim(),
                space.n_rad
            )));
        }
        let block = kron(&ComplexMatrix::identity(2 * l + 1), sigma.matrix()).scale_real(tl / (2 * l + 1) as f64);
        let off = space.block_offset(l);
        for a in 0..block.rows() {
            for b in 0..block.cols() {
                rho[(off + a, off + b)] = block[(a, b)];
            }
        }
    }
    make_reference(&DensityMatrix::new(rho)?)
}

/// Covariance under rotations, decided on the three block generators.
pub fn check_rotation_covariance(
    c: &Channel,
    rep_a: &Representation,
    rep_b: &Representation,
    r: &ReferenceState,
) -> Result<CovarianceReport> {
    for rep in [rep_a, rep_b] {
        if !matches!(rep, Representation::Spin { .. }) {
            return Err(Error::InvalidRepresentation(format!("expected a rotation representation, got {}", rep.kind())));
        }
    }
    check_covariance(c, rep_a, rep_b, r)
}
